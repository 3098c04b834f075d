//! Globular collections over the enumerated pasting diagrams, parallel pairs,
//! contractions, lifting tables, and the bijection between chosen fillers and
//! contractions.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fincat::{self, Components, ObjId, Presheaf, PresheafMap, SearchOptions};
use crate::globes::{boundary_pushout, globe_category, GlobeCategory, GlobularSet};
use crate::pasting::{el_pd, enum_pd, PastingDiagram};
use crate::par;

/// Truncation bounds: diagrams of dimension `≤ max_dim` with `≤ max_nodes` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    pub max_dim: usize,
    pub max_nodes: usize,
}

impl Bounds {
    pub fn new(max_dim: usize, max_nodes: usize) -> Self {
        Bounds { max_dim, max_nodes }
    }
}

/// The enumerated diagrams, by dimension then canonical order, with the
/// index of each boundary.
#[derive(Debug, PartialEq, Eq)]
pub struct PdUniverse {
    bounds: Bounds,
    pds: Vec<PastingDiagram>,
    index: HashMap<PastingDiagram, usize>,
    bdry: Vec<Option<usize>>,
}

impl PdUniverse {
    pub fn new(bounds: Bounds) -> Arc<Self> {
        let pds: Vec<PastingDiagram> = (0..=bounds.max_dim).flat_map(|n| enum_pd(n, bounds.max_nodes)).collect();
        let index: HashMap<PastingDiagram, usize> = pds.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let bdry = pds.iter().map(|p| p.boundary().ok().map(|b| index[&b])).collect();
        Arc::new(PdUniverse { bounds, pds, index, bdry })
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn pds(&self) -> &[PastingDiagram] {
        &self.pds
    }

    pub fn len(&self) -> usize {
        self.pds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pds.is_empty()
    }

    pub fn index(&self, pi: &PastingDiagram) -> Result<usize> {
        self.index
            .get(pi)
            .copied()
            .ok_or_else(|| Error::OutOfBounds(format!("{pi}")))
    }

    pub fn boundary(&self, i: usize) -> Option<usize> {
        self.bdry[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.pds[i].dim()
    }

    /// Indices of the diagrams of dimension `k`.
    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.pds.len()).filter(move |&i| self.pds[i].dim() == k)
    }
}

/// A finite collection: sets `C(π)` with source and target maps into `C(∂π)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collection {
    universe: Arc<PdUniverse>,
    sizes: Vec<usize>,
    src: Vec<Vec<usize>>,
    tgt: Vec<Vec<usize>>,
}

impl Collection {
    pub fn new(universe: Arc<PdUniverse>, sizes: Vec<usize>, src: Vec<Vec<usize>>, tgt: Vec<Vec<usize>>) -> Result<Self> {
        let c = Collection { universe, sizes, src, tgt };
        c.validate()?;
        Ok(c)
    }

    /// Builds a collection diagram by diagram in universe order; `f` sees the
    /// part built so far (every boundary comes earlier) and returns the
    /// size with the source and target tables.
    pub fn from_fn(
        universe: Arc<PdUniverse>,
        mut f: impl FnMut(&Collection, usize) -> (usize, Vec<usize>, Vec<usize>),
    ) -> Result<Self> {
        let n = universe.len();
        let mut c = Collection { universe, sizes: vec![0; n], src: vec![Vec::new(); n], tgt: vec![Vec::new(); n] };
        for i in 0..n {
            let (size, s, t) = f(&c, i);
            c.sizes[i] = size;
            c.src[i] = s;
            c.tgt[i] = t;
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let u = &self.universe;
        let bad = |m: String| Err(Error::Collection(m));
        if self.sizes.len() != u.len() || self.src.len() != u.len() || self.tgt.len() != u.len() {
            return bad("tables do not cover the enumerated diagrams".into());
        }
        for i in 0..u.len() {
            let expect = if u.dim(i) == 0 { 0 } else { self.sizes[i] };
            for t in [&self.src[i], &self.tgt[i]] {
                if t.len() != expect {
                    return bad(format!("source/target table at {} has the wrong length", u.pds[i]));
                }
                if let Some(b) = u.boundary(i) {
                    if t.iter().any(|&x| x >= self.sizes[b]) {
                        return bad(format!("source/target at {} out of range", u.pds[i]));
                    }
                }
            }
            if u.dim(i) >= 2 {
                let b = u.boundary(i).expect("dim ≥ 1");
                for x in 0..self.sizes[i] {
                    let (s, t) = (self.src[i][x], self.tgt[i][x]);
                    if self.src[b][s] != self.src[b][t] || self.tgt[b][s] != self.tgt[b][t] {
                        return bad(format!("globularity fails at {} element {x}", u.pds[i]));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn universe(&self) -> &Arc<PdUniverse> {
        &self.universe
    }

    pub fn bounds(&self) -> Bounds {
        self.universe.bounds
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn src(&self, i: usize, x: usize) -> usize {
        self.src[i][x]
    }

    pub fn tgt(&self, i: usize, x: usize) -> usize {
        self.tgt[i][x]
    }

    pub fn src_table(&self) -> &[Vec<usize>] {
        &self.src
    }

    pub fn tgt_table(&self) -> &[Vec<usize>] {
        &self.tgt
    }

    /// `|C(⋆)| = 1`.
    pub fn is_normalised(&self) -> bool {
        self.sizes[0] == 1
    }

    /// The globular set `ΣC(π)` over the enumerated part of `pd`, cells of
    /// each dimension listed by diagram then element.
    pub fn total(&self) -> GlobularSet {
        let u = &self.universe;
        let n = u.bounds.max_dim;
        let offs = self.offsets();
        let dims: Vec<usize> = (0..=n).map(|k| u.of_dim(k).map(|i| self.sizes[i]).sum()).collect();
        let mut src = vec![Vec::new(); n];
        let mut tgt = vec![Vec::new(); n];
        for k in 1..=n {
            for i in u.of_dim(k) {
                let b = u.boundary(i).expect("dim ≥ 1");
                src[k - 1].extend(self.src[i].iter().map(|&x| offs[b] + x));
                tgt[k - 1].extend(self.tgt[i].iter().map(|&x| offs[b] + x));
            }
        }
        GlobularSet { dims, src, tgt }
    }

    /// Offset of `C(π)` inside its dimension of [`Collection::total`].
    pub fn offsets(&self) -> Vec<usize> {
        let u = &self.universe;
        let mut acc = vec![0; u.bounds.max_dim + 1];
        (0..u.len())
            .map(|i| {
                let d = u.dim(i);
                let o = acc[d];
                acc[d] += self.sizes[i];
                o
            })
            .collect()
    }

    /// Decodes a cell of the total globular set into `(diagram, element)`.
    pub fn decode(&self, dim: usize, cell: usize) -> (usize, usize) {
        let offs = self.offsets();
        for i in self.universe.of_dim(dim) {
            if cell < offs[i] + self.sizes[i] {
                return (i, cell - offs[i]);
            }
        }
        panic!("cell {cell} of dimension {dim} is out of range");
    }
}

pub fn terminal_collection(bounds: Bounds) -> Collection {
    let u = PdUniverse::new(bounds);
    let sizes = vec![1; u.len()];
    let maps: Vec<Vec<usize>> = (0..u.len()).map(|i| if u.dim(i) == 0 { Vec::new() } else { vec![0] }).collect();
    Collection { universe: u, sizes, src: maps.clone(), tgt: maps }
}

/// `P_π(C)` in lexicographic order: all of `C(⋆)²` in dimension 1, parallel
/// pairs in `C(∂π)` above.
pub fn parallel_pairs(c: &Collection, pi: usize) -> Result<Vec<(usize, usize)>> {
    let u = &c.universe;
    let b = u
        .boundary(pi)
        .ok_or_else(|| Error::Collection("a 0-dimensional diagram has no parallel pairs".into()))?;
    let m = c.sizes[b];
    let all = (0..m).flat_map(|a| (0..m).map(move |b| (a, b)));
    if u.dim(pi) == 1 {
        return Ok(all.collect());
    }
    Ok(all.filter(|&(x, y)| c.src[b][x] == c.src[b][y] && c.tgt[b][x] == c.tgt[b][y]).collect())
}

/// A natural map of collections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectionMap {
    pub comps: Vec<Vec<usize>>,
}

impl CollectionMap {
    pub fn new(dom: &Collection, cod: &Collection, comps: Vec<Vec<usize>>) -> Result<Self> {
        let u = &dom.universe;
        if dom.universe != cod.universe || comps.len() != u.len() {
            return Err(Error::Collection("map tables do not match the bounds".into()));
        }
        for i in 0..u.len() {
            if comps[i].len() != dom.sizes[i] || comps[i].iter().any(|&y| y >= cod.sizes[i]) {
                return Err(Error::Collection(format!("component at {} out of range", u.pds[i])));
            }
            if let Some(b) = u.boundary(i) {
                for x in 0..dom.sizes[i] {
                    if comps[b][dom.src[i][x]] != cod.src[i][comps[i][x]]
                        || comps[b][dom.tgt[i][x]] != cod.tgt[i][comps[i][x]]
                    {
                        return Err(Error::Collection(format!("map does not commute with boundaries at {}", u.pds[i])));
                    }
                }
            }
        }
        Ok(CollectionMap { comps })
    }

    pub fn identity(c: &Collection) -> Self {
        CollectionMap { comps: c.sizes.iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn to_terminal(c: &Collection) -> Self {
        CollectionMap { comps: c.sizes.iter().map(|&n| vec![0; n]).collect() }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CollectionMap) -> CollectionMap {
        CollectionMap {
            comps: self.comps.iter().enumerate().map(|(i, c)| c.iter().map(|&x| other.comps[i][x]).collect()).collect(),
        }
    }

    /// `P_π(f)` as a map of pair indices.
    pub fn on_pairs(&self, dom: &Collection, cod: &Collection, pi: usize) -> Result<Vec<usize>> {
        let b = dom.universe.boundary(pi).ok_or_else(|| Error::Collection("dimension 0".into()))?;
        let target: HashMap<(usize, usize), usize> =
            parallel_pairs(cod, pi)?.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
        parallel_pairs(dom, pi)?
            .into_iter()
            .map(|(x, y)| {
                target
                    .get(&(self.comps[b][x], self.comps[b][y]))
                    .copied()
                    .ok_or_else(|| Error::Collection("image pair is not parallel".into()))
            })
            .collect()
    }
}

/// `κ_π(a, b)` for every diagram of dimension `≥ 1`, indexed by the position
/// of `(a, b)` in [`parallel_pairs`]. Empty rows at dimension 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub kappa: Vec<Vec<usize>>,
}

/// A contraction together with a chosen element of `C(⋆)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedContraction {
    pub contraction: Contraction,
    pub chosen: usize,
}

impl AugmentedContraction {
    pub fn validate(&self, c: &Collection) -> Result<ContractionReport> {
        if self.chosen >= c.sizes[0] {
            return Err(Error::Collection("chosen 0-cell out of range".into()));
        }
        validate_contraction(c, &self.contraction)
    }
}

impl Contraction {
    pub fn value(&self, c: &Collection, pi: usize, a: usize, b: usize) -> Result<usize> {
        let pairs = parallel_pairs(c, pi)?;
        let k = pairs
            .iter()
            .position(|&p| p == (a, b))
            .ok_or_else(|| Error::Collection(format!("({a}, {b}) is not a parallel pair at {}", c.universe.pds[pi])))?;
        Ok(self.kappa[pi][k])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleViolation {
    pub pi: PastingDiagram,
    pub pair: (usize, usize),
    pub value: usize,
    pub got: (usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContractionReport {
    pub violations: Vec<TriangleViolation>,
}

impl ContractionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(src, tgt)(κ_π(a, b)) = (a, b)` everywhere; a partial `κ` is an error.
pub fn validate_contraction(c: &Collection, kappa: &Contraction) -> Result<ContractionReport> {
    let u = &c.universe;
    if kappa.kappa.len() != u.len() {
        return Err(Error::Collection("contraction does not cover the enumerated diagrams".into()));
    }
    let mut report = ContractionReport::default();
    for i in 0..u.len() {
        if u.dim(i) == 0 {
            continue;
        }
        let pairs = parallel_pairs(c, i)?;
        if kappa.kappa[i].len() != pairs.len() {
            return Err(Error::Collection(format!("contraction is partial at {}", u.pds[i])));
        }
        for (k, &(a, b)) in pairs.iter().enumerate() {
            let v = kappa.kappa[i][k];
            if v >= c.sizes[i] {
                return Err(Error::Collection(format!("contraction value out of range at {}", u.pds[i])));
            }
            let got = (c.src[i][v], c.tgt[i][v]);
            if got != (a, b) {
                report.violations.push(TriangleViolation { pi: u.pds[i].clone(), pair: (a, b), value: v, got });
            }
        }
    }
    Ok(report)
}

/// The unique contraction on the terminal collection.
pub fn terminal_contraction(c: &Collection) -> Contraction {
    let kappa = (0..c.universe.len())
        .map(|i| if c.universe.dim(i) == 0 { Vec::new() } else { vec![0] })
        .collect();
    Contraction { kappa }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationWitness {
    pub pi: PastingDiagram,
    pub pair: (usize, usize),
    /// `f(κ(a, b))`
    pub lhs: usize,
    /// `λ(f a, f b)`
    pub rhs: usize,
}

/// Checks `f(π) ∘ κ_π = λ_π ∘ P_π(f)`; returns the first failure.
pub fn preserves_contraction(
    f: &CollectionMap,
    dom: &Collection,
    cod: &Collection,
    kappa: &Contraction,
    lambda: &Contraction,
) -> Result<Option<PreservationWitness>> {
    let u = &dom.universe;
    for i in 0..u.len() {
        if u.dim(i) == 0 {
            continue;
        }
        let pairs = parallel_pairs(dom, i)?;
        let image = f.on_pairs(dom, cod, i)?;
        for (k, &pair) in pairs.iter().enumerate() {
            let lhs = f.comps[i][kappa.kappa[i][k]];
            let rhs = lambda.kappa[i][image[k]];
            if lhs != rhs {
                return Ok(Some(PreservationWitness { pi: u.pds[i].clone(), pair, lhs, rhs }));
            }
        }
    }
    Ok(None)
}

/// A random collection with `|C(π)| ∈ {1, 2, 3}` (`|C(⋆)| = 1` when
/// `normalised`) and uniform globular source/target choices.
pub fn random_collection<R: Rng>(u: &Arc<PdUniverse>, normalised: bool, rng: &mut R) -> Collection {
    let mut sizes = vec![0; u.len()];
    let mut src = vec![Vec::new(); u.len()];
    let mut tgt = vec![Vec::new(); u.len()];
    for i in 0..u.len() {
        if u.dim(i) == 0 {
            sizes[i] = if normalised { 1 } else { rng.gen_range(1..=3) };
            continue;
        }
        let n = rng.gen_range(1..=3);
        sizes[i] = n;
        let b = u.boundary(i).expect("dim ≥ 1");
        for _ in 0..n {
            let a = rng.gen_range(0..sizes[b]);
            let choices: Vec<usize> = if u.dim(i) == 1 {
                (0..sizes[b]).collect()
            } else {
                (0..sizes[b]).filter(|&y| src[b][y] == src[b][a] && tgt[b][y] == tgt[b][a]).collect()
            };
            src[i].push(a);
            tgt[i].push(*choices.choose(rng).expect("a is parallel to itself"));
        }
    }
    Collection::new(u.clone(), sizes, src, tgt).expect("generator respects globularity")
}

/// A random collection admitting a contraction: every parallel pair is hit,
/// plus up to one extra element per diagram.
pub fn random_contractible<R: Rng>(u: &Arc<PdUniverse>, normalised: bool, rng: &mut R) -> Collection {
    let mut c = Collection {
        universe: u.clone(),
        sizes: vec![0; u.len()],
        src: vec![Vec::new(); u.len()],
        tgt: vec![Vec::new(); u.len()],
    };
    for i in 0..u.len() {
        if u.dim(i) == 0 {
            c.sizes[i] = if normalised { 1 } else { rng.gen_range(1..=2) };
            continue;
        }
        let pairs = parallel_pairs(&c, i).expect("dim ≥ 1");
        let mut chosen = pairs.clone();
        chosen.shuffle(rng);
        if rng.gen_bool(0.5) {
            chosen.push(*pairs.choose(rng).expect("pairs are nonempty"));
        }
        c.sizes[i] = chosen.len();
        c.src[i] = chosen.iter().map(|p| p.0).collect();
        c.tgt[i] = chosen.iter().map(|p| p.1).collect();
    }
    c.validate().expect("generator respects globularity");
    c
}

/// Chooses `κ_π(a, b)` uniformly among the elements over `(a, b)`.
pub fn random_contraction<R: Rng>(c: &Collection, rng: &mut R) -> Result<Contraction> {
    let u = &c.universe;
    let mut kappa = vec![Vec::new(); u.len()];
    for i in 0..u.len() {
        if u.dim(i) == 0 {
            continue;
        }
        for (a, b) in parallel_pairs(c, i)? {
            let over: Vec<usize> = (0..c.sizes[i]).filter(|&x| c.src[i][x] == a && c.tgt[i][x] == b).collect();
            let v = over
                .choose(rng)
                .ok_or_else(|| Error::Collection(format!("no element over ({a}, {b}) at {}", u.pds[i])))?;
            kappa[i].push(*v);
        }
    }
    Ok(Contraction { kappa })
}

/// One square of the lifting display: a map `∂y(n) → C` over `π` and a
/// chosen filler `y(n) → C` over `π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftEntry {
    pub boundary: Components,
    pub filler: Components,
}

/// Chosen fillers for every square, grouped by diagram (empty at dimension 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftTable {
    pub entries: Vec<Vec<LiftEntry>>,
}

/// Shared data for working with the total globular set of a collection over
/// the truncated globe category.
pub struct LiftContext {
    pub globe: GlobeCategory,
    pub total: Arc<Presheaf>,
    /// `ι(n)` for every `n ≤ N`, from the explicit pushout description.
    pub iotas: Vec<PresheafMap>,
}

impl LiftContext {
    pub fn new(c: &Collection) -> Result<Self> {
        let globe = globe_category(c.bounds().max_dim);
        let total = Arc::new(c.total().to_presheaf(&globe)?);
        let iotas = (0..=globe.top())
            .map(|n| boundary_pushout(&globe, n).map(|(_, i)| i))
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftContext { globe, total, iotas })
    }

    /// Reads `(a, b)` off a boundary map: the images of the cells sent by
    /// `ι(n)` to `σ` and `τ` respectively.
    fn read_pair(&self, c: &Collection, n: usize, boundary: &Components) -> (usize, usize) {
        let iota = &self.iotas[n];
        let hom = self.globe.cat().hom(n - 1, n);
        let sigma = hom.iter().position(|&m| m == self.globe.sigma(n - 1, n)).expect("σ in hom");
        let tau = hom.iter().position(|&m| m == self.globe.tau(n - 1, n)).expect("τ in hom");
        let cell = |which: usize| {
            let x = iota.components()[n - 1].iter().position(|&y| y == which).expect("ι hits σ and τ");
            c.decode(n - 1, boundary[n - 1][x]).1
        };
        (cell(sigma), cell(tau))
    }

    /// All maps `∂y(n) → C` lying over `π`.
    fn squares(&self, c: &Collection, pi: usize) -> Vec<Components> {
        let u = c.universe();
        let n = u.dim(pi);
        let over: Vec<usize> = (0..=n).map(|k| u.index(&u.pds()[pi].boundary_to(k).unwrap()).unwrap()).collect();
        let test = |k: ObjId, _x: usize, cand: usize| c.decode(k, cand).0 == over[k];
        let opts = SearchOptions { injective: false, allowed: Some(&test) };
        let mut out = Vec::new();
        fincat::search_maps(self.iotas[n].dom(), &self.total, &opts, &mut |m| {
            out.push(m.clone());
            ControlFlow::Continue(())
        });
        out
    }

    /// The filler extending `boundary` whose top cell is element `v` of `C(π)`.
    fn filler(&self, c: &Collection, pi: usize, boundary: &Components, v: usize) -> Option<Components> {
        let n = c.universe().dim(pi);
        let iota = &self.iotas[n];
        let top = c.offsets()[pi] + v;
        let mut required: Vec<Vec<Option<usize>>> = (0..=self.globe.top()).map(|k| vec![None; iota.cod().count(k)]).collect();
        for (k, row) in iota.components().iter().enumerate() {
            for (x, &y) in row.iter().enumerate() {
                required[k][y] = Some(boundary[k][x]);
            }
        }
        required[n][0] = Some(top);
        let test = |k: ObjId, x: usize, cand: usize| required[k][x] == Some(cand);
        let opts = SearchOptions { injective: false, allowed: Some(&test) };
        fincat::find_map(iota.cod(), &self.total, &opts)
    }
}

/// Reads a lifting table as a contraction; requires `|C(⋆)| = 1`.
pub fn fillers_to_contraction(c: &Collection, table: &LiftTable) -> Result<Contraction> {
    if !c.is_normalised() {
        return Err(Error::Collection("collection is not normalised; use the augmented variant".into()));
    }
    let u = c.universe();
    if table.entries.len() != u.len() {
        return Err(Error::Collection("lifting table does not cover the enumerated diagrams".into()));
    }
    let ctx = LiftContext::new(c)?;
    let mut kappa = vec![Vec::new(); u.len()];
    for i in 0..u.len() {
        let n = u.dim(i);
        if n == 0 {
            continue;
        }
        let pairs = parallel_pairs(c, i)?;
        let mut row = vec![None; pairs.len()];
        for e in &table.entries[i] {
            let pair = ctx.read_pair(c, n, &e.boundary);
            let k = pairs
                .iter()
                .position(|&p| p == pair)
                .ok_or_else(|| Error::Collection("square boundary is not a parallel pair".into()))?;
            let (pi, v) = c.decode(n, e.filler[n][0]);
            if pi != i {
                return Err(Error::Collection(format!("filler does not lie over {}", u.pds()[i])));
            }
            let restricted: Components = ctx.iotas[n]
                .components()
                .iter()
                .enumerate()
                .map(|(k, r)| r.iter().map(|&y| e.filler[k][y]).collect())
                .collect();
            if restricted != e.boundary {
                return Err(Error::Collection("filler does not extend its square".into()));
            }
            if row[k].replace(v).is_some() {
                return Err(Error::Collection("square listed twice".into()));
            }
        }
        kappa[i] = row
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Collection(format!("lifting table is partial at {}", u.pds()[i])))?;
    }
    Ok(Contraction { kappa })
}

/// The lifting table whose filler on the square with boundary `(a, b)` has
/// top cell `κ_π(a, b)`. Squares are listed in enumeration order.
pub fn contraction_to_fillers(c: &Collection, kappa: &Contraction) -> Result<LiftTable> {
    let report = validate_contraction(c, kappa)?;
    if !report.is_valid() {
        return Err(Error::Collection(format!("invalid contraction: {} violations", report.violations.len())));
    }
    let ctx = LiftContext::new(c)?;
    let u = c.universe();
    let ids: Vec<usize> = (0..u.len()).collect();
    let rows = par::map(&ids, |&i| -> Result<Vec<LiftEntry>> {
        let n = u.dim(i);
        if n == 0 {
            return Ok(Vec::new());
        }
        ctx.squares(c, i)
            .into_iter()
            .map(|b| {
                let (a, bb) = ctx.read_pair(c, n, &b);
                let v = kappa.value(c, i, a, bb)?;
                let filler = ctx.filler(c, i, &b, v).ok_or_else(|| Error::Collection("filler does not extend".into()))?;
                Ok(LiftEntry { boundary: b, filler })
            })
            .collect()
    });
    Ok(LiftTable { entries: rows.into_iter().collect::<Result<Vec<_>>>()? })
}

/// Number of squares over each diagram.
pub fn square_counts(c: &Collection) -> Result<Vec<usize>> {
    let ctx = LiftContext::new(c)?;
    Ok((0..c.universe().len())
        .map(|i| if c.universe().dim(i) == 0 { 0 } else { ctx.squares(c, i).len() })
        .collect())
}

/// Both composites of the filler/contraction correspondence on a random
/// contraction and a random lifting table of `c`: `(κ ↦ fillers ↦ κ,
/// fillers ↦ κ ↦ fillers)`.
pub fn bijection_roundtrip<R: Rng>(c: &Collection, rng: &mut R) -> Result<(bool, bool)> {
    let k = random_contraction(c, rng)?;
    let there = fillers_to_contraction(c, &contraction_to_fillers(c, &k)?)? == k;
    let table = random_lift_table(c, rng)?;
    let back = contraction_to_fillers(c, &fillers_to_contraction(c, &table)?)? == table;
    Ok((there, back))
}

/// A lifting table chosen uniformly among all fillers of every square.
pub fn random_lift_table<R: Rng>(c: &Collection, rng: &mut R) -> Result<LiftTable> {
    let ctx = LiftContext::new(c)?;
    let u = c.universe();
    let mut entries = vec![Vec::new(); u.len()];
    for (i, row) in entries.iter_mut().enumerate() {
        let n = u.dim(i);
        if n == 0 {
            continue;
        }
        for b in ctx.squares(c, i) {
            let fillers: Vec<Components> = (0..c.size(i)).filter_map(|v| ctx.filler(c, i, &b, v)).collect();
            let filler = fillers
                .choose(rng)
                .cloned()
                .ok_or_else(|| Error::Collection(format!("square without filler at {}", u.pds()[i])))?;
            row.push(LiftEntry { boundary: b, filler });
        }
    }
    Ok(LiftTable { entries })
}

/// Outcome of comparing the coend boundary over the category of elements
/// with the boundary of a globe transported over `π`.
#[derive(Clone, Debug)]
pub struct CoincidenceEntry {
    pub pi: PastingDiagram,
    pub coincides: bool,
    pub detail: String,
}

/// A presheaf over the category of elements as a globular set, together
/// with its projection to `pd` (per dimension, the diagram index of each cell).
fn elements_to_gset(
    el: &crate::pasting::ElPd,
    x: &Presheaf,
    max_dim: usize,
) -> (GlobularSet, Vec<Vec<usize>>) {
    let objs = el.objects();
    let mut offs = vec![0; objs.len()];
    let mut dims = vec![0; max_dim + 1];
    let mut proj = vec![Vec::new(); max_dim + 1];
    for (a, p) in objs.iter().enumerate() {
        offs[a] = dims[p.dim()];
        dims[p.dim()] += x.count(a);
        proj[p.dim()].extend(std::iter::repeat_n(a, x.count(a)));
    }
    let mut src = vec![Vec::new(); max_dim];
    let mut tgt = vec![Vec::new(); max_dim];
    for (a, p) in objs.iter().enumerate() {
        if p.dim() == 0 {
            continue;
        }
        let b = el.object(&p.boundary().unwrap()).expect("boundary enumerated");
        let (s, t) = (el.step(a, false).unwrap(), el.step(a, true).unwrap());
        src[p.dim() - 1].extend(x.action(s).iter().map(|&c| offs[b] + c));
        tgt[p.dim() - 1].extend(x.action(t).iter().map(|&c| offs[b] + c));
    }
    (GlobularSet { dims, src, tgt }, proj)
}

/// For every object `(n, π)` of the category of elements, compares `ι(n, π)`
/// with `ι(n)` over `π`, up to isomorphisms over `pd`.
pub fn boundary_coincidence(bounds: Bounds) -> Result<Vec<CoincidenceEntry>> {
    let el = el_pd(bounds.max_dim, bounds.max_nodes);
    let globe = globe_category(bounds.max_dim);
    let objs: Vec<usize> = (0..el.objects().len()).collect();
    let out = par::map(&objs, |&a| -> Result<CoincidenceEntry> {
        let pi = el.objects()[a].clone();
        let n = pi.dim();
        let (_, iota_el) = fincat::boundary(el.cat(), a)?;
        let (bd, pd_b) = elements_to_gset(&el, iota_el.dom(), bounds.max_dim);
        let (yd, pd_y) = elements_to_gset(&el, iota_el.cod(), bounds.max_dim);
        let bd = Arc::new(bd.to_presheaf(&globe)?);
        let yd = Arc::new(yd.to_presheaf(&globe)?);
        // transport ι(n, π) into globular sets
        let offs_in = |x: &Presheaf| {
            let mut o = vec![0; el.objects().len()];
            let mut acc = vec![0; bounds.max_dim + 1];
            for (b, p) in el.objects().iter().enumerate() {
                o[b] = acc[p.dim()];
                acc[p.dim()] += x.count(b);
            }
            o
        };
        let (ob, oy) = (offs_in(iota_el.dom()), offs_in(iota_el.cod()));
        let mut comps: Components = vec![Vec::new(); bounds.max_dim + 1];
        for (b, p) in el.objects().iter().enumerate() {
            for x in 0..iota_el.dom().count(b) {
                debug_assert_eq!(comps[p.dim()].len(), ob[b] + x);
                comps[p.dim()].push(oy[b] + iota_el.apply(b, x));
            }
        }
        let iota_t = PresheafMap::new(bd.clone(), yd.clone(), comps)?;
        // the slice side: ι(n) with y(n) → pd given by π
        let (_, iota_g) = boundary_pushout(&globe, n)?;
        let over = |k: usize| el.object(&pi.boundary_to(k).unwrap()).unwrap();
        let y_over = |k: usize, _c: usize| over(k);
        let b_over = |k: usize, c: usize| y_over(k, iota_g.apply(k, c));
        let phi_test = |k: ObjId, x: usize, cand: usize| pd_y[k][x] == y_over(k, cand);
        let Some(phi) = fincat::iso_check_with(&yd, iota_g.cod(), Some(&phi_test)) else {
            return Ok(CoincidenceEntry { pi, coincides: false, detail: "y(n, π) is not y(n) over π".into() });
        };
        let psi_test = |k: ObjId, x: usize, cand: usize| {
            pd_b[k][x] == b_over(k, cand) && iota_g.apply(k, cand) == phi.apply(k, iota_t.apply(k, x))
        };
        let coincides = fincat::iso_check_with(&bd, iota_g.dom(), Some(&psi_test)).is_some();
        let detail = format!("boundary cells {:?}", bd.counts());
        Ok(CoincidenceEntry { pi, coincides, detail })
    });
    out.into_iter().collect()
}
