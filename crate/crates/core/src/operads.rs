//! Globular operads given operationally by units and composition, their law
//! checker, finite operads with contraction used as fixtures, and morphism
//! verification.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::ControlFlow;

use crate::collections::{parallel_pairs, terminal_collection, terminal_contraction, Bounds, Collection, CollectionMap, Contraction, PdUniverse};
use crate::error::{Error, Result};
use crate::par;
use crate::pasting::{enum_pd, flatten_with_embeddings, shape, CellMap, PastingDiagram};

pub trait GlobularOperad: Sync {
    type Op: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn bounds(&self) -> Bounds;

    /// Every operation of arity `pi` the operad exposes within its bounds.
    fn ops(&self, pi: &PastingDiagram) -> Vec<Self::Op>;

    fn arity(&self, op: &Self::Op) -> PastingDiagram;

    fn src(&self, op: &Self::Op) -> Result<Self::Op>;

    fn tgt(&self, op: &Self::Op) -> Result<Self::Op>;

    fn unit(&self, n: usize) -> Self::Op;

    /// `θ ∘ λ`, where `labels[k][x]` labels the `k`-cell `x` of the
    /// realization of `θ`'s arity. Results outside the bounds are reported as
    /// [`Error::OutOfBounds`].
    fn comp(&self, theta: &Self::Op, labels: &[Vec<Self::Op>]) -> Result<Self::Op>;

    /// Size measure used to budget exhaustive checks.
    fn weight(&self, _op: &Self::Op) -> usize {
        0
    }
}

pub trait OperadWithContraction: GlobularOperad {
    /// `κ_π(a, b)` with source `a` and target `b`.
    fn kappa(&self, pi: &PastingDiagram, a: &Self::Op, b: &Self::Op) -> Result<Self::Op>;
}

/// Labels pulled back along a cell map.
pub fn restrict<T: Clone>(labels: &[Vec<T>], map: &CellMap) -> Vec<Vec<T>> {
    map.iter().enumerate().map(|(d, m)| m.iter().map(|&x| labels[d][x].clone()).collect()).collect()
}

/// The labelling of `u_n` with top cell `φ` and its iterated boundaries.
pub fn top_labelling<O: GlobularOperad>(o: &O, phi: &O::Op) -> Result<Vec<Vec<O::Op>>> {
    let n = o.arity(phi).dim();
    let mut rows = vec![vec![phi.clone()]];
    let (mut s, mut t) = (phi.clone(), phi.clone());
    for _ in 0..n {
        s = o.src(&s)?;
        t = o.tgt(&t)?;
        rows.push(vec![s.clone(), t.clone()]);
    }
    rows.reverse();
    Ok(rows)
}

/// Every cell labelled by the unit of its dimension.
pub fn unit_labelling<O: GlobularOperad>(o: &O, rho: &PastingDiagram) -> Vec<Vec<O::Op>> {
    rho.cell_counts().iter().enumerate().map(|(k, &n)| vec![o.unit(k); n]).collect()
}

/// Operations grouped by dimension and by boundary pair.
pub struct Pool<Op> {
    by_dim: Vec<Vec<Op>>,
    by_bdry: Vec<HashMap<(Op, Op), Vec<Op>>>,
}

impl<Op: Clone + Eq + Hash> Pool<Op> {
    pub fn new<O: GlobularOperad<Op = Op>>(o: &O) -> Result<Self> {
        let b = o.bounds();
        let mut by_dim = Vec::new();
        let mut by_bdry = Vec::new();
        for k in 0..=b.max_dim {
            let ops: Vec<Op> = enum_pd(k, b.max_nodes).iter().flat_map(|p| o.ops(p)).collect();
            let mut m: HashMap<(Op, Op), Vec<Op>> = HashMap::new();
            if k > 0 {
                for op in &ops {
                    m.entry((o.src(op)?, o.tgt(op)?)).or_default().push(op.clone());
                }
            }
            by_dim.push(ops);
            by_bdry.push(m);
        }
        Ok(Pool { by_dim, by_bdry })
    }

    pub fn of_dim(&self, k: usize) -> &[Op] {
        self.by_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Operations of dimension `k ≥ 1` with the given source and target.
    pub fn between(&self, k: usize, s: &Op, t: &Op) -> &[Op] {
        self.by_bdry
            .get(k)
            .and_then(|m| m.get(&(s.clone(), t.clone())))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

/// Enumerates globularly compatible labellings of `realize(rho)` by pool
/// operations, with the total weight of labels on maximal cells at most
/// `budget`.
pub fn for_each_labelling<O: GlobularOperad>(
    o: &O,
    pool: &Pool<O::Op>,
    rho: &PastingDiagram,
    budget: Option<usize>,
    visit: &mut dyn FnMut(&[Vec<O::Op>]) -> ControlFlow<()>,
) {
    let sh = shape(rho);
    let counts = rho.cell_counts();
    let cells: Vec<(usize, usize)> = counts.iter().enumerate().flat_map(|(k, &n)| (0..n).map(move |x| (k, x))).collect();
    let mut labels: Vec<Vec<O::Op>> = counts.iter().map(|&n| Vec::with_capacity(n)).collect();
    #[allow(clippy::too_many_arguments)]
    fn go<O: GlobularOperad>(
        o: &O,
        pool: &Pool<O::Op>,
        sh: &crate::pasting::Shape,
        cells: &[(usize, usize)],
        i: usize,
        used: usize,
        budget: Option<usize>,
        labels: &mut Vec<Vec<O::Op>>,
        visit: &mut dyn FnMut(&[Vec<O::Op>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == cells.len() {
            return visit(labels);
        }
        let (k, x) = cells[i];
        let cands: &[O::Op] = if k == 0 {
            pool.of_dim(0)
        } else {
            let r = &sh.realization;
            let s = &labels[k - 1][r.src[k - 1][x]];
            let t = &labels[k - 1][r.tgt[k - 1][x]];
            pool.between(k, s, t)
        };
        for c in cands {
            let w = if sh.maximal[k][x] { o.weight(c) } else { 0 };
            if budget.is_some_and(|b| used + w > b) {
                continue;
            }
            labels[k].push(c.clone());
            let flow = go(o, pool, sh, cells, i + 1, used + w, budget, labels, visit);
            labels[k].pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    let _ = go(o, pool, &sh, &cells, 0, 0, budget, &mut labels, visit);
}

/// Total weight of the labels on maximal cells.
pub fn labelling_weight<O: GlobularOperad>(o: &O, rho: &PastingDiagram, labels: &[Vec<O::Op>]) -> usize {
    let sh = shape(rho);
    let sh = &*sh;
    labels
        .iter()
        .enumerate()
        .flat_map(|(k, row)| row.iter().enumerate().filter(move |(x, _)| sh.maximal[k][*x]).map(|(_, op)| op))
        .map(|op| o.weight(op))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    ArityCoherence,
    LeftUnit,
    RightUnit,
    Associativity,
    Boundary,
    GlobularUnit,
    Evaluation,
    Contraction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawFailure {
    pub law: Law,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub instances: usize,
    pub skipped: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: LawReport) {
        self.instances += other.instances;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }

    fn fail(&mut self, law: Law, detail: String) {
        self.failures.push(LawFailure { law, detail });
    }
}

/// Limits on the exhaustive law check: the total weight of `θ` and of the
/// labels on maximal cells, and whether two-stage associativity is run.
#[derive(Clone, Copy, Debug)]
pub struct LawBudget {
    pub max_weight: Option<usize>,
    pub associativity: bool,
}

impl Default for LawBudget {
    fn default() -> Self {
        LawBudget { max_weight: None, associativity: true }
    }
}

fn eval<T>(report: &mut LawReport, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(Error::OutOfBounds(_)) => {
            report.skipped += 1;
            None
        }
        Err(e) => {
            report.fail(Law::Evaluation, format!("{}: {e}", what()));
            None
        }
    }
}

/// Exhaustively checks arity coherence, both unit laws, associativity,
/// boundary compatibility and globular units within the operad's bounds.
pub fn check_operad_laws<O: GlobularOperad>(o: &O, budget: LawBudget) -> Result<LawReport> {
    let b = o.bounds();
    let pool = Pool::new(o)?;
    let mut report = LawReport::default();
    for n in 0..b.max_dim {
        let (u, v) = (o.unit(n), o.unit(n + 1));
        report.instances += 1;
        if o.arity(&u) != PastingDiagram::unit(n) {
            report.fail(Law::GlobularUnit, format!("unit {n} has arity {}", o.arity(&u)));
        }
        if o.src(&v)? != u || o.tgt(&v)? != u {
            report.fail(Law::GlobularUnit, format!("boundary of unit {} is not unit {n}", n + 1));
        }
    }
    let thetas: Vec<O::Op> = (0..=b.max_dim).flat_map(|k| pool.of_dim(k).to_vec()).collect();
    let parts = par::map(&thetas, |theta| check_at(o, &pool, theta, budget));
    for p in parts {
        report.merge(p);
    }
    Ok(report)
}

fn check_at<O: GlobularOperad>(o: &O, pool: &Pool<O::Op>, theta: &O::Op, budget: LawBudget) -> LawReport {
    let mut rep = LawReport::default();
    let rho = o.arity(theta);
    let n = rho.dim();
    let sh = shape(&rho);
    // unit laws
    rep.instances += 2;
    if let Some(top) = eval(&mut rep, top_labelling(o, theta), || format!("boundaries of {theta:?}")) {
        if let Some(r) = eval(&mut rep, o.comp(&o.unit(n), &top), || format!("unit composite with {theta:?}")) {
            if &r != theta {
                rep.fail(Law::LeftUnit, format!("unit ∘ {theta:?} = {r:?}"));
            }
        }
    }
    if let Some(r) = eval(&mut rep, o.comp(theta, &unit_labelling(o, &rho)), || format!("{theta:?} ∘ units")) {
        if &r != theta {
            rep.fail(Law::RightUnit, format!("{theta:?} ∘ units = {r:?}"));
        }
    }
    if n > 0 {
        if let (Ok(s), Ok(t)) = (o.src(theta), o.tgt(theta)) {
            let bd = rho.boundary().expect("dim ≥ 1");
            if o.arity(&s) != bd || o.arity(&t) != bd {
                rep.fail(Law::Boundary, format!("boundary of {theta:?} has the wrong arity"));
            }
        }
    }
    let wt = o.weight(theta);
    let remaining = budget.max_weight.map(|m| m.saturating_sub(wt));
    if budget.max_weight.is_some_and(|m| wt > m) {
        return rep;
    }
    for_each_labelling(o, pool, &rho, remaining, &mut |lambda| {
        rep.instances += 1;
        let Some(r) = eval(&mut rep, o.comp(theta, lambda), || format!("{theta:?} ∘ {lambda:?}")) else {
            return ControlFlow::Continue(());
        };
        let arities: Vec<Vec<PastingDiagram>> = lambda.iter().map(|row| row.iter().map(|l| o.arity(l)).collect()).collect();
        let (flat, emb) = match flatten_with_embeddings(&rho, &arities) {
            Ok(v) => v,
            Err(e) => {
                rep.fail(Law::ArityCoherence, format!("labels of {theta:?} do not flatten: {e}"));
                return ControlFlow::Continue(());
            }
        };
        if o.arity(&r) != flat {
            rep.fail(Law::ArityCoherence, format!("{theta:?} ∘ {lambda:?} has arity {} not {flat}", o.arity(&r)));
        }
        if n > 0 {
            for (target, incl) in [(false, &sh.src_incl), (true, &sh.tgt_incl)] {
                let incl = incl.as_ref().expect("dim ≥ 1");
                let bt = if target { o.tgt(theta) } else { o.src(theta) };
                let lhs = if target { o.tgt(&r) } else { o.src(&r) };
                let rhs = bt.and_then(|bt| o.comp(&bt, &restrict(lambda, incl)));
                if let (Some(l), Some(rr)) = (
                    eval(&mut rep, lhs, || format!("boundary of {r:?}")),
                    eval(&mut rep, rhs, || format!("boundary composite of {theta:?}")),
                ) {
                    if l != rr {
                        rep.fail(Law::Boundary, format!("{} of {theta:?} ∘ {lambda:?}: {l:?} vs {rr:?}", if target { "target" } else { "source" }));
                    }
                }
            }
        }
        if budget.associativity {
            let used = wt + labelling_weight(o, &rho, lambda);
            let rest = budget.max_weight.map(|m| m.saturating_sub(used));
            for_each_labelling(o, pool, &flat, rest, &mut |mu| {
                rep.instances += 1;
                let Some(lhs) = eval(&mut rep, o.comp(&r, mu), || format!("({theta:?} ∘ λ) ∘ {mu:?}")) else {
                    return ControlFlow::Continue(());
                };
                let mut inner: Vec<Vec<O::Op>> = Vec::with_capacity(lambda.len());
                for (k, row) in lambda.iter().enumerate() {
                    let mut out = Vec::with_capacity(row.len());
                    for (x, l) in row.iter().enumerate() {
                        let Some(v) = eval(&mut rep, o.comp(l, &restrict(mu, &emb[k][x])), || format!("{l:?} ∘ μ|x")) else {
                            return ControlFlow::Continue(());
                        };
                        out.push(v);
                    }
                    inner.push(out);
                }
                if let Some(rhs) = eval(&mut rep, o.comp(theta, &inner), || format!("{theta:?} ∘ (λ ∘ μ)")) {
                    if lhs != rhs {
                        rep.fail(Law::Associativity, format!("{theta:?}, {lambda:?}, {mu:?}: {lhs:?} vs {rhs:?}"));
                    }
                }
                ControlFlow::Continue(())
            });
        }
        ControlFlow::Continue(())
    });
    rep
}

/// `|O(⋆)| = 1`.
pub fn is_normalised<O: GlobularOperad>(o: &O) -> bool {
    o.ops(&PastingDiagram::point()).len() == 1
}

/// Parallel pairs of enumerated operations of arity `∂π`.
pub fn parallel_ops<O: GlobularOperad>(o: &O, pi: &PastingDiagram) -> Result<Vec<(O::Op, O::Op)>> {
    let bd = pi.boundary()?;
    let ops = o.ops(&bd);
    let mut out = Vec::new();
    for a in &ops {
        for b in &ops {
            if pi.dim() == 1 || (o.src(a)? == o.src(b)? && o.tgt(a)? == o.tgt(b)?) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}

/// `κ(π, a, b)` has arity `π`, source `a` and target `b` for every
/// enumerated `π` of positive dimension and every parallel pair.
pub fn check_contraction<O: OperadWithContraction>(o: &O) -> Result<LawReport> {
    let b = o.bounds();
    let pis: Vec<PastingDiagram> = (1..=b.max_dim).flat_map(|n| enum_pd(n, b.max_nodes)).collect();
    let per = par::map(&pis, |pi| -> Result<LawReport> {
        let mut rep = LawReport::default();
        for (a, bb) in parallel_ops(o, pi)? {
            let Some(k) = eval(&mut rep, o.kappa(pi, &a, &bb), || format!("κ at {pi}")) else { continue };
            rep.instances += 1;
            if o.arity(&k) != *pi || o.src(&k)? != a || o.tgt(&k)? != bb {
                rep.fail(Law::Contraction, format!("κ at {pi} on ({a:?}, {bb:?}) gives {k:?}"));
            }
        }
        Ok(rep)
    });
    let mut rep = LawReport::default();
    for r in per {
        rep.merge(r?);
    }
    Ok(rep)
}

/// Checks that `f` commutes with units, boundaries, composition and the
/// contractions on every enumerated instance.
pub fn check_owc_morphism<S, T>(
    s: &S,
    t: &T,
    f: &(dyn Fn(&S::Op) -> Result<T::Op> + Sync),
    budget: LawBudget,
) -> Result<LawReport>
where
    S: OperadWithContraction,
    T: OperadWithContraction,
{
    let b = s.bounds();
    let pool = Pool::new(s)?;
    let mut rep = LawReport::default();
    for n in 0..=b.max_dim {
        rep.instances += 1;
        if let Some(v) = eval(&mut rep, f(&s.unit(n)), || format!("image of unit {n}")) {
            if v != t.unit(n) {
                rep.fail(Law::LeftUnit, format!("unit {n} is sent to {v:?}"));
            }
        }
    }
    let all: Vec<S::Op> = (0..=b.max_dim).flat_map(|k| pool.of_dim(k).to_vec()).collect();
    let parts = par::map(&all, |theta| {
        let mut rep = LawReport::default();
        let Some(ft) = eval(&mut rep, f(theta), || format!("image of {theta:?}")) else { return rep };
        if s.arity(theta).dim() > 0 {
            rep.instances += 1;
            for (sb, tb) in [(s.src(theta), t.src(&ft)), (s.tgt(theta), t.tgt(&ft))] {
                let img = sb.and_then(|x| f(&x));
                if let (Some(l), Some(r)) = (eval(&mut rep, img, || "boundary image".into()), eval(&mut rep, tb, || "target boundary".into())) {
                    if l != r {
                        rep.fail(Law::Boundary, format!("f does not commute with boundaries at {theta:?}"));
                    }
                }
            }
        }
        let rho = s.arity(theta);
        let remaining = budget.max_weight.map(|m| m.saturating_sub(s.weight(theta)));
        if budget.max_weight.is_some_and(|m| s.weight(theta) > m) {
            return rep;
        }
        for_each_labelling(s, &pool, &rho, remaining, &mut |lambda| {
            rep.instances += 1;
            let Some(lhs) = eval(&mut rep, s.comp(theta, lambda).and_then(|c| f(&c)), || format!("f({theta:?} ∘ λ)")) else {
                return ControlFlow::Continue(());
            };
            let mut fl = Vec::with_capacity(lambda.len());
            for row in lambda {
                let Some(r) = eval(&mut rep, row.iter().map(f).collect::<Result<Vec<_>>>(), || "label images".into()) else {
                    return ControlFlow::Continue(());
                };
                fl.push(r);
            }
            if let Some(rhs) = eval(&mut rep, t.comp(&ft, &fl), || format!("f({theta:?}) ∘ fλ")) {
                if lhs != rhs {
                    rep.fail(Law::Associativity, format!("f does not preserve {theta:?} ∘ {lambda:?}: {lhs:?} vs {rhs:?}"));
                }
            }
            ControlFlow::Continue(())
        });
        rep
    });
    for p in parts {
        rep.merge(p);
    }
    for k in 1..=b.max_dim {
        for pi in enum_pd(k, b.max_nodes) {
            for (a, bb) in parallel_ops(s, &pi)? {
                rep.instances += 1;
                let lhs = s.kappa(&pi, &a, &bb).and_then(|x| f(&x));
                let rhs = f(&a).and_then(|fa| f(&bb).and_then(|fb| t.kappa(&pi, &fa, &fb)));
                if let (Some(l), Some(r)) = (eval(&mut rep, lhs, || "κ image".into()), eval(&mut rep, rhs, || "κ of images".into())) {
                    if l != r {
                        rep.fail(Law::Contraction, format!("κ at {pi} on ({a:?}, {bb:?}): {l:?} vs {r:?}"));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A finite commutative or noncommutative monoid given by its table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    pub table: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteMonoid {
    pub fn new(table: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let m = FiniteMonoid { table, unit };
        m.check_laws(false, false)?;
        Ok(m)
    }

    /// `({0, 1}, max, 0)`.
    pub fn boolean() -> Self {
        FiniteMonoid { table: vec![vec![0, 1], vec![1, 1]], unit: 0 }
    }

    /// `(ℤ/n, +, 0)`.
    pub fn cyclic(n: usize) -> Self {
        FiniteMonoid { table: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(), unit: 0 }
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn check_laws(&self, commutative: bool, idempotent: bool) -> Result<()> {
        let n = self.size();
        let bad = |m: &str| Err(Error::Operad(format!("monoid law fails: {m}")));
        if self.unit >= n || self.table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("table out of range");
        }
        for a in 0..n {
            if self.mul(self.unit, a) != a || self.mul(a, self.unit) != a {
                return bad("unit");
            }
            if idempotent && self.mul(a, a) != a {
                return bad("idempotence");
            }
            for b in 0..n {
                if commutative && self.mul(a, b) != self.mul(b, a) {
                    return bad("commutativity");
                }
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return bad("associativity");
                    }
                }
            }
        }
        Ok(())
    }
}

/// An element of a finite collection: diagram index and element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollOp {
    pub pi: usize,
    pub elem: usize,
}

#[derive(Clone, Debug)]
pub enum CompRule {
    Terminal,
    /// Join of `θ` and all 1-cell labels in dimension 1; above, the unique
    /// element over the composites of the boundaries.
    Semilattice(FiniteMonoid),
    /// Product of `θ` and every label of dimension `≥ 1` in cell order.
    Product(FiniteMonoid),
    /// Rows `[θ, labels…] ↦ result` over global element ids.
    Table(HashMap<Vec<usize>, usize>),
}

/// A finite operad, optionally with a contraction, over enumerated bounds.
#[derive(Clone, Debug)]
pub struct FiniteOwc {
    pub name: String,
    coll: Collection,
    units: Vec<usize>,
    rule: CompRule,
    contraction: Option<Contraction>,
    base: Vec<usize>,
}

impl FiniteOwc {
    pub fn new(
        name: impl Into<String>,
        coll: Collection,
        units: Vec<usize>,
        rule: CompRule,
        contraction: Option<Contraction>,
    ) -> Result<Self> {
        let u = coll.universe();
        if units.len() != u.bounds().max_dim + 1 {
            return Err(Error::Operad("one unit per dimension is required".into()));
        }
        for (n, &e) in units.iter().enumerate() {
            let i = u.index(&PastingDiagram::unit(n))?;
            if e >= coll.size(i) {
                return Err(Error::Operad(format!("unit {n} out of range")));
            }
        }
        let mut base = Vec::with_capacity(u.len());
        let mut acc = 0;
        for i in 0..u.len() {
            base.push(acc);
            acc += coll.size(i);
        }
        Ok(FiniteOwc { name: name.into(), coll, units, rule, contraction, base })
    }

    pub fn collection(&self) -> &Collection {
        &self.coll
    }

    pub fn contraction(&self) -> Option<&Contraction> {
        self.contraction.as_ref()
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn rule(&self) -> &CompRule {
        &self.rule
    }

    /// Global id of an element, counting through the diagrams in order.
    pub fn op_id(&self, op: &CollOp) -> usize {
        self.base[op.pi] + op.elem
    }

    pub fn op_from_id(&self, id: usize) -> Result<CollOp> {
        let pi = self.base.partition_point(|&b| b <= id).saturating_sub(1);
        let elem = id - self.base[pi];
        if elem >= self.coll.size(pi) {
            return Err(Error::Operad(format!("element id {id} out of range")));
        }
        Ok(CollOp { pi, elem })
    }

    pub fn total_ops(&self) -> usize {
        self.coll.sizes().iter().sum()
    }

    fn pair_index(&self, pi: usize, a: usize, b: usize) -> Result<usize> {
        parallel_pairs(&self.coll, pi)?
            .iter()
            .position(|&p| p == (a, b))
            .ok_or_else(|| Error::Operad(format!("({a}, {b}) is not parallel at {}", self.coll.universe().pds()[pi])))
    }

    fn check_labels(&self, theta: &CollOp, labels: &[Vec<CollOp>]) -> Result<PastingDiagram> {
        let u = self.coll.universe();
        let rho = &u.pds()[theta.pi];
        let sh = shape(rho);
        let counts = rho.cell_counts();
        if labels.len() != counts.len() || labels.iter().zip(&counts).any(|(l, &n)| l.len() != n) {
            return Err(Error::Operad("labelling does not match the arity".into()));
        }
        for (k, row) in labels.iter().enumerate() {
            for (x, l) in row.iter().enumerate() {
                if u.dim(l.pi) != k || l.elem >= self.coll.size(l.pi) {
                    return Err(Error::Operad(format!("label of {k}-cell {x} has the wrong dimension")));
                }
                if k > 0 {
                    let r = &sh.realization;
                    if self.src(l)? != labels[k - 1][r.src[k - 1][x]] || self.tgt(l)? != labels[k - 1][r.tgt[k - 1][x]] {
                        return Err(Error::Operad(format!("label of {k}-cell {x} is not compatible")));
                    }
                }
            }
        }
        let arities: Vec<Vec<PastingDiagram>> = labels.iter().map(|r| r.iter().map(|l| u.pds()[l.pi].clone()).collect()).collect();
        Ok(flatten_with_embeddings(rho, &arities)?.0)
    }
}

impl GlobularOperad for FiniteOwc {
    type Op = CollOp;

    fn bounds(&self) -> Bounds {
        self.coll.bounds()
    }

    fn ops(&self, pi: &PastingDiagram) -> Vec<CollOp> {
        match self.coll.universe().index(pi) {
            Ok(i) => (0..self.coll.size(i)).map(|elem| CollOp { pi: i, elem }).collect(),
            Err(_) => Vec::new(),
        }
    }

    fn arity(&self, op: &CollOp) -> PastingDiagram {
        self.coll.universe().pds()[op.pi].clone()
    }

    fn src(&self, op: &CollOp) -> Result<CollOp> {
        let b = self.coll.universe().boundary(op.pi).ok_or_else(|| Error::Operad("0-operations have no source".into()))?;
        Ok(CollOp { pi: b, elem: self.coll.src(op.pi, op.elem) })
    }

    fn tgt(&self, op: &CollOp) -> Result<CollOp> {
        let b = self.coll.universe().boundary(op.pi).ok_or_else(|| Error::Operad("0-operations have no target".into()))?;
        Ok(CollOp { pi: b, elem: self.coll.tgt(op.pi, op.elem) })
    }

    fn unit(&self, n: usize) -> CollOp {
        let pi = self.coll.universe().index(&PastingDiagram::unit(n)).expect("units lie within the bounds");
        CollOp { pi, elem: self.units[n] }
    }

    fn comp(&self, theta: &CollOp, labels: &[Vec<CollOp>]) -> Result<CollOp> {
        let flat = self.check_labels(theta, labels)?;
        let u = self.coll.universe();
        let res = u.index(&flat)?;
        let n = flat.dim();
        let elem = match &self.rule {
            CompRule::Terminal => 0,
            CompRule::Semilattice(m) => match n {
                0 => 0,
                1 => labels[1].iter().fold(theta.elem, |acc, l| m.mul(acc, l.elem)),
                _ => {
                    let sh = shape(&u.pds()[theta.pi]);
                    let s = self.comp(&self.src(theta)?, &restrict(labels, sh.src_incl.as_ref().expect("dim ≥ 1")))?;
                    let t = self.comp(&self.tgt(theta)?, &restrict(labels, sh.tgt_incl.as_ref().expect("dim ≥ 1")))?;
                    self.pair_index(res, s.elem, t.elem)?
                }
            },
            CompRule::Product(m) => {
                if n == 0 {
                    0
                } else {
                    labels[1..].iter().flatten().fold(theta.elem, |acc, l| m.mul(acc, l.elem))
                }
            }
            CompRule::Table(rows) => {
                let mut key = vec![self.op_id(theta)];
                key.extend(labels.iter().flatten().map(|l| self.op_id(l)));
                let out = *rows
                    .get(&key)
                    .ok_or_else(|| Error::OutOfBounds(format!("no composition row for {key:?}")))?;
                let op = self.op_from_id(out)?;
                if op.pi != res {
                    return Err(Error::Operad(format!("row {key:?} has arity {} not {flat}", u.pds()[op.pi])));
                }
                op.elem
            }
        };
        Ok(CollOp { pi: res, elem })
    }
}

impl OperadWithContraction for FiniteOwc {
    fn kappa(&self, pi: &PastingDiagram, a: &CollOp, b: &CollOp) -> Result<CollOp> {
        let c = self.contraction.as_ref().ok_or_else(|| Error::Operad(format!("{} carries no contraction", self.name)))?;
        let i = self.coll.universe().index(pi)?;
        Ok(CollOp { pi: i, elem: c.value(&self.coll, i, a.elem, b.elem)? })
    }
}

pub fn terminal_operad(bounds: Bounds) -> FiniteOwc {
    let coll = terminal_collection(bounds);
    let kappa = terminal_contraction(&coll);
    FiniteOwc::new("terminal", coll, vec![0; bounds.max_dim + 1], CompRule::Terminal, Some(kappa))
        .expect("terminal operad is well formed")
}

/// The operad with contraction built from a finite semilattice `M`:
/// `C(⋆) = 1`, `C(π) = M` in dimension 1, and above dimension 1 the
/// codiscrete extension `C(π) = P_π(C)` with `κ` the identity on pairs.
/// `choices` gives `κ_π ∈ M` for each diagram of dimension 1.
pub fn semilattice_owc(m: FiniteMonoid, choices: &dyn Fn(&PastingDiagram) -> usize, bounds: Bounds) -> Result<FiniteOwc> {
    m.check_laws(true, true)?;
    let u = PdUniverse::new(bounds);
    let size = m.size();
    let coll = Collection::from_fn(u.clone(), |c, i| match u.dim(i) {
        0 => (1, Vec::new(), Vec::new()),
        1 => (size, vec![0; size], vec![0; size]),
        _ => {
            let pairs = parallel_pairs(c, i).expect("dim ≥ 1");
            (pairs.len(), pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
        }
    })?;
    let mut kappa = vec![Vec::new(); u.len()];
    for (i, row) in kappa.iter_mut().enumerate() {
        match u.dim(i) {
            0 => {}
            1 => {
                let v = choices(&u.pds()[i]);
                if v >= size {
                    return Err(Error::Operad(format!("contraction choice {v} is not in M")));
                }
                *row = vec![v];
            }
            _ => *row = (0..coll.size(i)).collect(),
        }
    }
    let mut units = vec![0, m.unit];
    for n in 2..=bounds.max_dim {
        let i = u.index(&PastingDiagram::unit(n))?;
        let prev = units[n - 1];
        let pos = parallel_pairs(&coll, i)?.iter().position(|&p| p == (prev, prev)).expect("diagonal pair");
        units.push(pos);
    }
    units.truncate(bounds.max_dim + 1);
    FiniteOwc::new("semilattice", coll, units, CompRule::Semilattice(m), Some(Contraction { kappa }))
}

/// `C(π) = M` in every dimension `≥ 1` with identity boundaries and
/// composition by multiplying all labels. It is an operad only when `M` is
/// idempotent, and it carries no contraction: above dimension 1 the pairs
/// `(a, b)` with `a ≠ b` are parallel but nothing lies over them.
pub fn diagonal_monoid_operad(m: FiniteMonoid, bounds: Bounds) -> Result<FiniteOwc> {
    m.check_laws(false, false)?;
    let u = PdUniverse::new(bounds);
    let size = m.size();
    let coll = Collection::from_fn(u.clone(), |_, i| match u.dim(i) {
        0 => (1, Vec::new(), Vec::new()),
        1 => (size, vec![0; size], vec![0; size]),
        _ => (size, (0..size).collect(), (0..size).collect()),
    })?;
    let mut units = vec![m.unit; bounds.max_dim + 1];
    units[0] = 0;
    FiniteOwc::new("diagonal", coll, units, CompRule::Product(m), None)
}

/// Checks `f` as a morphism of finite operads with contraction.
pub fn check_owc_morphism_map(f: &CollectionMap, s: &FiniteOwc, t: &FiniteOwc, budget: LawBudget) -> Result<LawReport> {
    CollectionMap::new(s.collection(), t.collection(), f.comps.clone())?;
    let map = |op: &CollOp| Ok(CollOp { pi: op.pi, elem: f.comps[op.pi][op.elem] });
    check_owc_morphism(s, t, &map, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::validate_contraction;

    fn b23() -> Bounds {
        Bounds::new(2, 3)
    }

    #[test]
    fn terminal_is_clean() {
        let t = terminal_operad(b23());
        let rep = check_operad_laws(&t, LawBudget::default()).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.failures);
        assert!(rep.instances > 0);
        assert!(is_normalised(&t));
        let id = CollectionMap::identity(t.collection());
        assert!(check_owc_morphism_map(&id, &t, &t, LawBudget::default()).unwrap().is_clean());
    }

    #[test]
    fn semilattice_is_an_owc() {
        let s = semilattice_owc(FiniteMonoid::boolean(), &|_| 0, b23()).unwrap();
        let rep = check_operad_laws(&s, LawBudget::default()).unwrap();
        assert!(rep.is_clean(), "{:?}", &rep.failures[..rep.failures.len().min(3)]);
        assert!(validate_contraction(s.collection(), s.contraction().unwrap()).unwrap().is_valid());
        assert!(is_normalised(&s));
        // comp(1, all-zero labels) = 1
        let pi = PastingDiagram::unit(1);
        let theta = CollOp { pi: s.collection().universe().index(&pi).unwrap(), elem: 1 };
        let labels = vec![vec![CollOp { pi: 0, elem: 0 }; 2], vec![CollOp { pi: theta.pi, elem: 0 }]];
        assert_eq!(s.comp(&theta, &labels).unwrap().elem, 1);
    }

    #[test]
    fn semilattice_morphisms() {
        let b = b23();
        let s = semilattice_owc(FiniteMonoid::boolean(), &|_| 0, b).unwrap();
        let t = terminal_operad(b);
        let bang = CollectionMap::to_terminal(s.collection());
        assert!(check_owc_morphism_map(&bang, &s, &t, LawBudget::default()).unwrap().is_clean());
        // swap 0 and 1 in dimension 1 (and the induced pairs above)
        let u = s.collection().universe().clone();
        let comps = (0..u.len())
            .map(|i| match u.dim(i) {
                0 => vec![0],
                1 => vec![1, 0],
                _ => {
                    let pairs = parallel_pairs(s.collection(), i).unwrap();
                    pairs.iter().map(|&(x, y)| {
                        let sw = |v: usize| if u.dim(i) == 2 { 1 - v } else { v };
                        pairs.iter().position(|&p| p == (sw(x), sw(y))).unwrap()
                    }).collect()
                }
            })
            .collect();
        let swap = CollectionMap::new(s.collection(), s.collection(), comps).unwrap();
        let rep = check_owc_morphism_map(&swap, &s, &s, LawBudget::default()).unwrap();
        assert!(rep.failures.iter().any(|f| f.law == Law::LeftUnit), "{:?}", rep.failures);
    }

    #[test]
    fn diagonal_fixture_fails_without_idempotence() {
        let d = diagonal_monoid_operad(FiniteMonoid::cyclic(3), Bounds::new(2, 3)).unwrap();
        let rep = check_operad_laws(&d, LawBudget { max_weight: None, associativity: false }).unwrap();
        assert!(rep.failures.iter().any(|f| f.law == Law::LeftUnit));
        // with an idempotent monoid it is an operad
        let d = diagonal_monoid_operad(FiniteMonoid::boolean(), Bounds::new(2, 3)).unwrap();
        assert!(check_operad_laws(&d, LawBudget::default()).unwrap().is_clean());
        // but κ(a, b) = a violates the triangles whenever a ≠ b
        let c = d.collection();
        let u = c.universe();
        let kappa = (0..u.len())
            .map(|i| match u.dim(i) {
                0 => Vec::new(),
                1 => vec![0],
                _ => parallel_pairs(c, i).unwrap().iter().map(|p| p.0).collect(),
            })
            .collect();
        assert!(!validate_contraction(c, &Contraction { kappa }).unwrap().is_valid());
    }

    #[test]
    fn monoid_laws() {
        assert!(FiniteMonoid::boolean().check_laws(true, true).is_ok());
        assert!(FiniteMonoid::cyclic(3).check_laws(true, true).is_err());
        assert!(FiniteMonoid::new(vec![vec![0, 0], vec![0, 1]], 1).is_ok());
        assert!(FiniteMonoid::new(vec![vec![0, 0], vec![0, 0]], 1).is_err());
    }
}
