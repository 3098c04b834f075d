//! Positively graded chain complexes over ℤ/p, the cofibrant replacement `Q`
//! built generator by generator, its counit and comultiplication, coalgebras
//! from generator subsets, homology, and lifting against `S^{i-1} → D^i`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::par;

pub const DEFAULT_GEN_CAP: usize = 2048;

fn chain_err(m: impl Into<String>) -> Error {
    Error::Chain(m.into())
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv(a: u32, p: u32) -> u32 {
    let (mut r, mut b, mut e) = (1u64, a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Dense matrix over ℤ/p, row-major; columns are images of basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: &[Vec<u32>], p: u32) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(chain_err(format!("expected a {rows}×{cols} matrix")));
        }
        Ok(Matrix { rows, cols, data: entries.iter().flatten().map(|&v| v % p).collect() })
    }

    pub fn from_cols(rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, p: u32) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shapes");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) as u64 + a * other.get(k, j) as u64) % p as u64;
                    out.set(i, j, v as u32);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u32], p: u32) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) as u64 * v[j] as u64).sum::<u64>() % p as u64)
            .map(|x| x as u32)
            .collect()
    }

    /// Reduced row echelon form and pivot columns; pivots are the first
    /// nonzero entries.
    pub fn rref(&self, p: u32) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let s = inv(m.get(r, c), p) as u64;
            for j in 0..m.cols {
                m.set(r, j, (m.get(r, j) as u64 * s % p as u64) as u32);
            }
            for i in 0..m.rows {
                let f = m.get(i, c) as u64;
                if i == r || f == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = (m.get(i, j) as u64 + (p as u64 - f) * m.get(r, j) as u64) % p as u64;
                    m.set(i, j, v as u32);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, p: u32) -> usize {
        self.rref(p).1.len()
    }

    /// A basis of the null space, one vector per free column.
    pub fn kernel(&self, p: u32) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref(p);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0; self.cols];
                v[f] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - r.get(row, f)) % p;
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A x = b`, if any.
    pub fn solve(&self, b: &[u32], p: u32) -> Option<Vec<u32>> {
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i] % p);
        }
        let (r, pivots) = aug.rref(p);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols);
        }
        Some(x)
    }
}

fn add_into(a: &mut [u32], b: &[u32], c: u32, p: u32) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = ((*x as u64 + c as u64 * y as u64) % p as u64) as u32;
    }
}

/// All vectors of length `r` over ℤ/p in lexicographic order.
pub fn all_vectors(r: usize, p: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v| (0..p).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

/// All combinations `base + Σ c_j basis_j`, coefficients in lexicographic order.
fn span_coset(base: &[u32], basis: &[Vec<u32>], p: u32) -> Vec<Vec<u32>> {
    all_vectors(basis.len(), p)
        .into_iter()
        .map(|cs| {
            let mut v = base.to_vec();
            for (c, b) in cs.iter().zip(basis) {
                add_into(&mut v, b, *c, p);
            }
            v
        })
        .collect()
}

fn checked_pow(p: u32, e: usize) -> Option<usize> {
    u32::try_from(e).ok().and_then(|e| (p as usize).checked_pow(e))
}

/// `X_0 ← X_1 ← … ← X_N` over ℤ/p; `d[i]` is the differential out of
/// degree `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    p: u32,
    ranks: Vec<usize>,
    d: Vec<Matrix>,
}

impl ChainComplex {
    pub fn new(p: u32, ranks: Vec<usize>, d: Vec<Matrix>) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 16 {
            return Err(chain_err(format!("{p} is not a supported prime")));
        }
        if ranks.is_empty() {
            return Err(chain_err("at least degree 0 is required"));
        }
        if d.len() + 1 != ranks.len() {
            return Err(chain_err("one differential per positive degree is required"));
        }
        for (i, m) in d.iter().enumerate() {
            if m.rows != ranks[i] || m.cols != ranks[i + 1] || m.data.iter().any(|&v| v >= p) {
                return Err(chain_err(format!("differential out of degree {} has the wrong shape", i + 1)));
            }
        }
        for i in 1..d.len() {
            if !d[i - 1].mul(&d[i], p).is_zero() {
                return Err(chain_err(format!("d∘d ≠ 0 at degree {}", i + 1)));
            }
        }
        Ok(ChainComplex { p, ranks, d })
    }

    pub fn from_rows(p: u32, ranks: Vec<usize>, d: &[Vec<Vec<u32>>]) -> Result<Self> {
        if d.len() + 1 != ranks.len() {
            return Err(chain_err("one differential per positive degree is required"));
        }
        let ms = d.iter().enumerate().map(|(i, rows)| Matrix::from_rows(ranks[i], ranks[i + 1], rows, p)).collect::<Result<_>>()?;
        ChainComplex::new(p, ranks, ms)
    }

    /// `M = (ℤ/p)^r` concentrated in degree 0.
    pub fn module(p: u32, r: usize) -> Result<Self> {
        ChainComplex::new(p, vec![r], Vec::new())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks.get(i).copied().unwrap_or(0)
    }

    /// `d_i: X_i → X_{i-1}`, zero outside the stored range.
    pub fn diff(&self, i: usize) -> Matrix {
        if i == 0 || i > self.d.len() {
            return Matrix::zeros(if i == 0 { 0 } else { self.rank(i - 1) }, self.rank(i));
        }
        self.d[i - 1].clone()
    }

    pub fn diffs_as_rows(&self) -> Vec<Vec<Vec<u32>>> {
        self.d.iter().map(Matrix::to_rows).collect()
    }

    /// `dim ker d_i − rank d_{i+1}`.
    pub fn homology(&self, i: usize) -> usize {
        let p = self.p;
        let ker = self.rank(i) - self.diff(i).rank(p);
        ker - self.diff(i + 1).rank(p)
    }
}

pub fn homology(x: &ChainComplex, i: usize) -> usize {
    x.homology(i)
}

/// A degreewise linear map commuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    dom: Arc<ChainComplex>,
    cod: Arc<ChainComplex>,
    f: Vec<Matrix>,
}

impl ChainMap {
    pub fn new(dom: Arc<ChainComplex>, cod: Arc<ChainComplex>, f: Vec<Matrix>) -> Result<Self> {
        if dom.p != cod.p {
            return Err(chain_err("complexes over different primes"));
        }
        for (i, m) in f.iter().enumerate() {
            if m.rows != cod.rank(i) || m.cols != dom.rank(i) {
                return Err(chain_err(format!("component {i} has the wrong shape")));
            }
        }
        for i in 1..f.len() {
            if f[i - 1].mul(&dom.diff(i), dom.p) != cod.diff(i).mul(&f[i], dom.p) {
                return Err(chain_err(format!("not a chain map at degree {i}")));
            }
        }
        Ok(ChainMap { dom, cod, f })
    }

    pub fn identity(x: Arc<ChainComplex>) -> Self {
        let f = (0..=x.top()).map(|i| Matrix::identity(x.rank(i))).collect();
        ChainMap { dom: x.clone(), cod: x, f }
    }

    pub fn dom(&self) -> &Arc<ChainComplex> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<ChainComplex> {
        &self.cod
    }

    pub fn degree(&self, i: usize) -> Matrix {
        self.f.get(i).cloned().unwrap_or_else(|| Matrix::zeros(self.cod.rank(i), self.dom.rank(i)))
    }

    pub fn components(&self) -> &[Matrix] {
        &self.f
    }

    /// `other ∘ self`, over the common degree range.
    pub fn then(&self, other: &ChainMap) -> ChainMap {
        let n = self.f.len().min(other.f.len());
        let f = (0..n).map(|i| other.f[i].mul(&self.f[i], self.dom.p)).collect();
        ChainMap { dom: self.dom.clone(), cod: other.cod.clone(), f }
    }
}

/// A generator of `(QX)_i`: an element `x` of `X_0`, or a pair `(x, z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QGen {
    pub x: Vec<u32>,
    pub z: Option<Vec<u32>>,
}

/// `QX` through degree `top` with its counit.
#[derive(Clone, Debug)]
pub struct QResolution {
    pub base: Arc<ChainComplex>,
    gens: Vec<Vec<QGen>>,
    index: Vec<HashMap<QGen, usize>>,
    complex: Arc<ChainComplex>,
    eps: Vec<Matrix>,
}

impl QResolution {
    pub fn top(&self) -> usize {
        self.gens.len() - 1
    }

    pub fn gens(&self, i: usize) -> &[QGen] {
        &self.gens[i]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.gens.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, i: usize, g: &QGen) -> Option<usize> {
        self.index[i].get(g).copied()
    }

    /// `QX` with `d′` as a chain complex.
    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.complex
    }

    pub fn eps(&self, i: usize) -> &Matrix {
        &self.eps[i]
    }

    pub fn counit(&self) -> ChainMap {
        ChainMap { dom: self.complex.clone(), cod: self.base.clone(), f: self.eps.clone() }
    }
}

/// The literal induction: `G_0` is the set of elements of `X_0`, and
/// `G_{i+1}` is the set of pairs `(x, z)` with `z ∈ ker d′_i` and
/// `ε_i(z) = d_{i+1}(x)`. Fails with a resource error when a generator set
/// would exceed `cap`.
pub fn q_replace(x: &ChainComplex, top: usize, cap: usize) -> Result<QResolution> {
    let p = x.p;
    let too_big = |i: usize, what: String| Error::ResourceLimit(format!("(QX)_{i}: {what} exceeds the cap of {cap} generators"));
    let r0 = x.rank(0);
    if checked_pow(p, r0).is_none_or(|n| n > cap) {
        return Err(too_big(0, format!("{p}^{r0}")));
    }
    let g0: Vec<QGen> = all_vectors(r0, p).into_iter().map(|v| QGen { x: v, z: None }).collect();
    let mut eps = vec![Matrix::from_cols(r0, &g0.iter().map(|g| g.x.clone()).collect::<Vec<_>>())];
    let mut gens = vec![g0];
    let mut dq: Vec<Matrix> = Vec::new();
    for i in 0..top {
        let n = gens[i].len();
        let dprime = if i == 0 { Matrix::zeros(0, n) } else { dq[i - 1].clone() };
        let kernel = dprime.kernel(p);
        // ε restricted to the kernel, and its own kernel
        let eps_k = Matrix::from_cols(x.rank(i), &kernel.iter().map(|z| eps[i].apply(z, p)).collect::<Vec<_>>());
        let fibre_basis: Vec<Vec<u32>> = eps_k
            .kernel(p)
            .iter()
            .map(|c| {
                let mut v = vec![0; n];
                for (cj, z) in c.iter().zip(&kernel) {
                    add_into(&mut v, z, *cj, p);
                }
                v
            })
            .collect();
        let fibre = checked_pow(p, fibre_basis.len()).filter(|&f| f <= cap).ok_or_else(|| too_big(i + 1, format!("fibre {p}^{}", fibre_basis.len())))?;
        let r = x.rank(i + 1);
        checked_pow(p, r).filter(|&c| c <= cap).ok_or_else(|| too_big(i + 1, format!("{p}^{r} elements of X_{}", i + 1)))?;
        let dx = x.diff(i + 1);
        let mut next = Vec::new();
        for xv in all_vectors(r, p) {
            let target = dx.apply(&xv, p);
            let Some(c) = eps_k.solve(&target, p) else { continue };
            if next.len() + fibre > cap {
                return Err(too_big(i + 1, "the generator count".into()));
            }
            let mut z0 = vec![0; n];
            for (cj, z) in c.iter().zip(&kernel) {
                add_into(&mut z0, z, *cj, p);
            }
            for z in span_coset(&z0, &fibre_basis, p) {
                next.push(QGen { x: xv.clone(), z: Some(z) });
            }
        }
        dq.push(Matrix::from_cols(n, &next.iter().map(|g| g.z.clone().expect("pair")).collect::<Vec<_>>()));
        eps.push(Matrix::from_cols(r, &next.iter().map(|g| g.x.clone()).collect::<Vec<_>>()));
        gens.push(next);
    }
    let ranks = gens.iter().map(Vec::len).collect();
    let complex = Arc::new(ChainComplex::new(p, ranks, dq)?);
    let index = gens.iter().map(|g| g.iter().cloned().enumerate().map(|(j, g)| (g, j)).collect()).collect();
    Ok(QResolution { base: Arc::new(x.clone()), gens, index, complex, eps })
}

/// `Qf: QX → QY` on generators: `e_x ↦ e_{f x}` and `(x, z) ↦ (f x, Qf z)`.
pub fn q_map(f: &ChainMap, qx: &QResolution, qy: &QResolution) -> Result<ChainMap> {
    let p = qx.base.p;
    let top = qx.top().min(qy.top());
    let mut comps: Vec<Matrix> = Vec::with_capacity(top + 1);
    for i in 0..=top {
        let fi = f.degree(i);
        let mut cols = Vec::with_capacity(qx.gens[i].len());
        for g in &qx.gens[i] {
            let img = QGen { x: fi.apply(&g.x, p), z: g.z.as_ref().map(|z| comps[i - 1].apply(z, p)) };
            let j = qy.index_of(i, &img).ok_or_else(|| chain_err(format!("image generator missing in degree {i}")))?;
            let mut c = vec![0; qy.gens[i].len()];
            c[j] = 1;
            cols.push(c);
        }
        comps.push(Matrix::from_cols(qy.gens[i].len(), &cols));
    }
    ChainMap::new(qx.complex.clone(), qy.complex.clone(), comps)
}

/// An element of `Q^k X` for some `k`, as a finite combination of atoms:
/// basis vectors of `X` at the bottom, generators `e_y` and `(y, z)` above.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub BTreeMap<Atom, u32>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Basis(usize),
    Point(Sym),
    Pair(Sym, Sym),
}

impl Sym {
    pub fn zero() -> Self {
        Sym::default()
    }

    pub fn atom(a: Atom) -> Self {
        Sym(BTreeMap::from([(a, 1)]))
    }

    pub fn from_vec(v: &[u32]) -> Self {
        Sym(v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (Atom::Basis(i), c)).collect())
    }

    pub fn to_vec(&self, len: usize) -> Result<Vec<u32>> {
        let mut v = vec![0; len];
        for (a, &c) in &self.0 {
            match a {
                Atom::Basis(i) if *i < len => v[*i] = c,
                _ => return Err(chain_err("not a vector of the base complex")),
            }
        }
        Ok(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_scaled(&mut self, other: &Sym, c: u32, p: u32) {
        for (a, &v) in &other.0 {
            let e = self.0.entry(a.clone()).or_insert(0);
            *e = ((*e as u64 + c as u64 * v as u64) % p as u64) as u32;
            if *e == 0 {
                self.0.remove(a);
            }
        }
    }

    /// Linear extension of a map on atoms.
    fn map_atoms(&self, p: u32, f: &mut dyn FnMut(&Atom) -> Result<Sym>) -> Result<Sym> {
        let mut out = Sym::zero();
        for (a, &c) in &self.0 {
            out.add_scaled(&f(a)?, c, p);
        }
        Ok(out)
    }
}

/// Structure maps of the tower `X, QX, QQX, …` acting on [`Sym`] elements.
pub struct Tower<'a> {
    pub base: &'a ChainComplex,
}

impl Tower<'_> {
    fn p(&self) -> u32 {
        self.base.p
    }

    /// The differential at degree `deg`: `d` on the base, `d′` above.
    pub fn d(&self, e: &Sym, deg: usize) -> Result<Sym> {
        let dm = self.base.diff(deg);
        e.map_atoms(self.p(), &mut |a| match a {
            Atom::Basis(j) => Ok(if deg == 0 { Sym::zero() } else { Sym::from_vec(&dm.col(*j)) }),
            Atom::Point(_) => Ok(Sym::zero()),
            Atom::Pair(_, z) => Ok(z.clone()),
        })
    }

    pub fn eps(&self, e: &Sym) -> Result<Sym> {
        e.map_atoms(self.p(), &mut |a| match a {
            Atom::Basis(_) => Err(chain_err("ε is undefined on the base complex")),
            Atom::Point(y) | Atom::Pair(y, _) => Ok(y.clone()),
        })
    }

    /// `e_y ↦ e_{e_y}` and `(y, z) ↦ ((y, z), δz)`.
    pub fn delta(&self, e: &Sym) -> Result<Sym> {
        e.map_atoms(self.p(), &mut |a| match a {
            Atom::Basis(_) => Err(chain_err("δ is undefined on the base complex")),
            Atom::Point(_) => Ok(Sym::atom(Atom::Point(Sym::atom(a.clone())))),
            Atom::Pair(_, z) => Ok(Sym::atom(Atom::Pair(Sym::atom(a.clone()), self.delta(z)?))),
        })
    }

    /// `Qf` for a linear `f` given on elements.
    pub fn qmap(&self, f: &mut dyn FnMut(&Sym) -> Result<Sym>, e: &Sym) -> Result<Sym> {
        let p = self.p();
        let mut out = Sym::zero();
        for (a, &c) in &e.0 {
            let img = match a {
                Atom::Basis(_) => return Err(chain_err("Q acts on generators only")),
                Atom::Point(y) => Sym::atom(Atom::Point(f(y)?)),
                Atom::Pair(y, z) => {
                    let fy = f(y)?;
                    Sym::atom(Atom::Pair(fy, self.qmap(f, z)?))
                }
            };
            out.add_scaled(&img, c, p);
        }
        Ok(out)
    }

    /// Every pair generator `(y, z)` occurring in `e` satisfies `d′z = 0`
    /// and `ε z = d y`, recursively.
    pub fn well_formed(&self, e: &Sym, deg: usize) -> Result<bool> {
        for a in e.0.keys() {
            let ok = match a {
                Atom::Basis(_) => true,
                Atom::Point(y) => deg == 0 && self.well_formed(y, 0)?,
                Atom::Pair(y, z) => {
                    deg > 0
                        && self.d(z, deg - 1)?.is_zero()
                        && self.eps(z)? == self.d(y, deg)?
                        && self.well_formed(y, deg)?
                        && self.well_formed(z, deg - 1)?
                }
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The generator `g_j` of `(QX)_i` as a [`Sym`].
pub fn lift_gen(qx: &QResolution, i: usize, j: usize) -> Sym {
    let g = &qx.gens[i][j];
    match &g.z {
        None => Sym::atom(Atom::Point(Sym::from_vec(&g.x))),
        Some(z) => Sym::atom(Atom::Pair(Sym::from_vec(&g.x), lift(qx, i - 1, z))),
    }
}

/// A vector of `(QX)_i` in the generator basis as a [`Sym`].
pub fn lift(qx: &QResolution, i: usize, v: &[u32]) -> Sym {
    let mut out = Sym::zero();
    for (j, &c) in v.iter().enumerate() {
        if c != 0 {
            out.add_scaled(&lift_gen(qx, i, j), c, qx.base.p);
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComonadReport {
    pub generators: usize,
    pub well_formed: bool,
    pub counit_left: bool,
    pub counit_right: bool,
    pub coassociative: bool,
}

impl ComonadReport {
    pub fn holds(&self) -> bool {
        self.well_formed && self.counit_left && self.counit_right && self.coassociative
    }
}

/// `ε_Q∘δ = id`, `Q(ε)∘δ = id` and `δ_Q∘δ = Q(δ)∘δ` on every generator of
/// `QX` through degree `max_deg`.
pub fn comonad_check(qx: &QResolution, max_deg: usize) -> Result<ComonadReport> {
    let tower = Tower { base: &qx.base };
    let items: Vec<(usize, usize)> = (0..=max_deg.min(qx.top())).flat_map(|i| (0..qx.gens[i].len()).map(move |j| (i, j))).collect();
    let per = par::map(&items, |&(i, j)| -> Result<[bool; 4]> {
        let g = lift_gen(qx, i, j);
        let dg = tower.delta(&g)?;
        let wf = tower.well_formed(&dg, i)?;
        let left = tower.eps(&dg)? == g;
        let right = tower.qmap(&mut |y| tower.eps(y), &dg)? == g;
        let co = tower.delta(&dg)? == tower.qmap(&mut |y| tower.delta(y), &dg)?;
        Ok([wf, left, right, co])
    });
    let mut rep = ComonadReport { generators: items.len(), well_formed: true, counit_left: true, counit_right: true, coassociative: true };
    for r in per {
        let [wf, l, r, c] = r?;
        rep.well_formed &= wf;
        rep.counit_left &= l;
        rep.counit_right &= r;
        rep.coassociative &= c;
    }
    Ok(rep)
}

/// A `Q`-coalgebra determined by bases `G_i ⊆ X_i`.
#[derive(Clone, Debug)]
pub struct QCoalgebra {
    pub x: Arc<ChainComplex>,
    pub gens: Vec<Vec<Vec<u32>>>,
    coords: Vec<Matrix>,
    alpha: Vec<Vec<Sym>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraReport {
    pub counit: bool,
    pub coassociative: bool,
}

impl QCoalgebra {
    /// `α` on an arbitrary vector of `X_i`.
    pub fn alpha(&self, i: usize, v: &[u32]) -> Sym {
        let p = self.x.p;
        let c = self.coords[i].apply(v, p);
        let mut out = Sym::zero();
        for (j, &cj) in c.iter().enumerate() {
            out.add_scaled(&self.alpha[i][j], cj, p);
        }
        out
    }

    fn alpha_sym(&self, i: usize, e: &Sym) -> Result<Sym> {
        Ok(self.alpha(i, &e.to_vec(self.x.rank(i))?))
    }

    pub fn check(&self) -> Result<CoalgebraReport> {
        let t = Tower { base: &self.x };
        let mut rep = CoalgebraReport { counit: true, coassociative: true };
        for (i, gs) in self.gens.iter().enumerate() {
            for (j, g) in gs.iter().enumerate() {
                let a = &self.alpha[i][j];
                rep.counit &= t.eps(a)? == Sym::from_vec(g);
                // degrees inside a Sym are recovered from the atom nesting,
                // and α is applied at the degree of each element it meets
                let lhs = t.delta(a)?;
                let rhs = self.q_alpha(a, i)?;
                rep.coassociative &= lhs == rhs;
            }
        }
        Ok(rep)
    }

    fn q_alpha(&self, e: &Sym, deg: usize) -> Result<Sym> {
        let p = self.x.p;
        let mut out = Sym::zero();
        for (a, &c) in &e.0 {
            let img = match a {
                Atom::Basis(_) => return Err(chain_err("Q acts on generators only")),
                Atom::Point(y) => Sym::atom(Atom::Point(self.alpha_sym(0, y)?)),
                Atom::Pair(y, z) => Sym::atom(Atom::Pair(self.alpha_sym(deg, y)?, self.q_alpha(z, deg - 1)?)),
            };
            out.add_scaled(&img, c, p);
        }
        Ok(out)
    }

    /// The elements `x` whose image `α(x)` is a single generator.
    pub fn extract_generators(&self) -> Vec<Vec<Vec<u32>>> {
        (0..self.gens.len())
            .map(|i| {
                all_vectors(self.x.rank(i), self.x.p)
                    .into_iter()
                    .filter(|v| {
                        let a = self.alpha(i, v);
                        a.0.len() == 1 && a.0.values().all(|&c| c == 1)
                    })
                    .collect()
            })
            .collect()
    }
}

/// `α(g) = e_g` in degree 0 and `α(g) = (g, α(d g))` above. Each `G_i`
/// must be a basis of `X_i`.
pub fn coalgebra_from_generators(x: Arc<ChainComplex>, gens: Vec<Vec<Vec<u32>>>) -> Result<QCoalgebra> {
    let p = x.p;
    if gens.len() != x.top() + 1 {
        return Err(chain_err("one generator set per degree is required"));
    }
    let mut coords = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let r = x.rank(i);
        if g.len() != r || g.iter().any(|v| v.len() != r) {
            return Err(chain_err(format!("G_{i} is not a basis of X_{i}: wrong size")));
        }
        let m = Matrix::from_cols(r, g);
        if m.rank(p) != r {
            return Err(chain_err(format!("G_{i} is not a basis of X_{i}: dependent")));
        }
        // inverse by solving for each unit vector
        let cols: Vec<Vec<u32>> = (0..r)
            .map(|k| {
                let mut e = vec![0; r];
                e[k] = 1;
                m.solve(&e, p).expect("invertible")
            })
            .collect();
        coords.push(Matrix::from_cols(r, &cols));
    }
    let mut co = QCoalgebra { x: x.clone(), gens: gens.clone(), coords, alpha: Vec::new() };
    for (i, g) in gens.iter().enumerate() {
        let mut row = Vec::with_capacity(g.len());
        for v in g {
            let a = if i == 0 {
                Atom::Point(Sym::from_vec(v))
            } else {
                Atom::Pair(Sym::from_vec(v), co.alpha(i - 1, &x.diff(i).apply(v, p)))
            };
            row.push(Sym::atom(a));
        }
        co.alpha.push(row);
    }
    Ok(co)
}

/// A filler for `S^{i-1} → D^i` against `q`, or a certificate `y` with
/// `yᵀA = 0` and `yᵀb ≠ 0` for the linear system it reduces to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    Filler(Vec<u32>),
    Infeasible(Vec<u32>),
}

/// Solves `d w′ = w`, `q(w′) = x` for the square given by a cycle `w` of
/// `W_{i-1}` and `x ∈ X_i` with `d x = q(w)`.
pub fn chain_rlp(i: usize, q: &ChainMap, w: &[u32], x: &[u32]) -> Result<LiftOutcome> {
    let (wc, xc) = (q.dom(), q.cod());
    let p = wc.p;
    if x.len() != xc.rank(i) || (i > 0 && w.len() != wc.rank(i - 1)) {
        return Err(chain_err("square has the wrong shape"));
    }
    if i > 0 {
        if !wc.diff(i - 1).apply(w, p).iter().all(|&v| v == 0) {
            return Err(chain_err("w is not a cycle"));
        }
        if xc.diff(i).apply(x, p) != q.degree(i - 1).apply(w, p) {
            return Err(chain_err("square does not commute"));
        }
    }
    let (dw, qi) = (wc.diff(i), q.degree(i));
    let rows = if i > 0 { dw.rows } else { 0 } + qi.rows;
    let mut a = Matrix::zeros(rows, wc.rank(i));
    let mut b = Vec::with_capacity(rows);
    let mut r = 0;
    if i > 0 {
        for k in 0..dw.rows {
            for j in 0..dw.cols {
                a.set(r, j, dw.get(k, j));
            }
            b.push(w[k]);
            r += 1;
        }
    }
    for k in 0..qi.rows {
        for j in 0..qi.cols {
            a.set(r, j, qi.get(k, j));
        }
        b.push(x[k]);
        r += 1;
    }
    if let Some(s) = a.solve(&b, p) {
        return Ok(LiftOutcome::Filler(s));
    }
    let cert = a
        .transpose()
        .kernel(p)
        .into_iter()
        .find(|y| y.iter().zip(&b).map(|(&u, &v)| u as u64 * v as u64).sum::<u64>() % p as u64 != 0)
        .ok_or_else(|| chain_err("inconsistent system without certificate"))?;
    Ok(LiftOutcome::Infeasible(cert))
}

/// Every square `S^{i-1} → D^i` against `q`, as `(w, x)` pairs.
pub fn all_squares(i: usize, q: &ChainMap) -> Vec<(Vec<u32>, Vec<u32>)> {
    let (wc, xc) = (q.dom(), q.cod());
    let p = wc.p;
    let ws: Vec<Vec<u32>> = if i == 0 {
        vec![Vec::new()]
    } else {
        let z = wc.diff(i - 1).kernel(p);
        span_coset(&vec![0; wc.rank(i - 1)], &z, p)
    };
    let mut out = Vec::new();
    for x in all_vectors(xc.rank(i), p) {
        let dx = xc.diff(i).apply(&x, p);
        for w in &ws {
            if i == 0 || q.degree(i - 1).apply(w, p) == dx {
                out.push((w.clone(), x.clone()));
            }
        }
    }
    out
}

/// A random complex over ℤ/p with ranks at most `max_rank` through degree
/// `top`; each differential's columns are random combinations of a basis of
/// the kernel below.
pub fn random_complex<R: Rng>(p: u32, top: usize, max_rank: usize, rng: &mut R) -> Result<ChainComplex> {
    let ranks: Vec<usize> = (0..=top).map(|_| rng.gen_range(0..=max_rank)).collect();
    let mut d: Vec<Matrix> = Vec::with_capacity(top);
    for i in 1..=top {
        let ker = if i == 1 {
            (0..ranks[0]).map(|k| (0..ranks[0]).map(|j| u32::from(j == k)).collect()).collect()
        } else {
            d[i - 2].kernel(p)
        };
        let cols: Vec<Vec<u32>> = (0..ranks[i])
            .map(|_| {
                let mut v = vec![0; ranks[i - 1]];
                for b in &ker {
                    add_into(&mut v, b, rng.gen_range(0..p), p);
                }
                v
            })
            .collect();
        d.push(Matrix::from_cols(ranks[i - 1], &cols));
    }
    ChainComplex::new(p, ranks, d)
}

/// `(i, H_i(X), H_i(QX))` for `i ≤ top`, which needs `QX` through degree
/// `top + 1`.
pub fn quasi_iso_check(x: &ChainComplex, top: usize, cap: usize) -> Result<Vec<(usize, usize, usize)>> {
    let q = q_replace(x, top + 1, cap)?;
    Ok((0..=top).map(|i| (i, x.homology(i), q.complex().homology(i))).collect())
}

/// Largest `n ≤ limit` with `QX` computable through degree `n` under `cap`.
pub fn feasible_degree(x: &ChainComplex, limit: usize, cap: usize) -> Option<usize> {
    (0..=limit).take_while(|&n| q_replace(x, n, cap).is_ok()).last()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point2() -> ChainComplex {
        ChainComplex::module(2, 1).unwrap()
    }

    #[test]
    fn linear_algebra() {
        let m = Matrix::from_rows(2, 3, &[vec![1, 1, 0], vec![0, 1, 1]], 2).unwrap();
        assert_eq!(m.rank(2), 2);
        let k = m.kernel(2);
        assert_eq!(k, vec![vec![1, 1, 1]]);
        assert_eq!(m.apply(&k[0], 2), vec![0, 0]);
        assert_eq!(m.solve(&[1, 0], 2).map(|x| m.apply(&x, 2)), Some(vec![1, 0]));
        let z = Matrix::from_rows(1, 1, &[vec![0]], 3).unwrap();
        assert!(z.solve(&[1], 3).is_none());
        assert!(!is_prime(4) && is_prime(7));
        assert!(ChainComplex::module(4, 1).is_err());
    }

    #[test]
    fn bar_resolution_of_z2() {
        let q = q_replace(&point2(), 3, DEFAULT_GEN_CAP).unwrap();
        assert_eq!(q.ranks(), vec![2, 2, 2, 2]);
        let c = q.complex();
        assert_eq!(c.homology(0), 1);
        assert_eq!((c.homology(1), c.homology(2)), (0, 0));
        for i in 0..=3 {
            assert_eq!(q.eps(i).rank(2), point2().rank(i));
        }
        let zero = ChainComplex::module(2, 0).unwrap();
        assert_eq!(q_replace(&zero, 0, DEFAULT_GEN_CAP).unwrap().ranks(), vec![1]);
        let eps = q.counit();
        assert!(ChainMap::new(eps.dom().clone(), eps.cod().clone(), eps.components().to_vec()).is_ok());
    }

    #[test]
    fn comonad_laws_on_point() {
        let q = q_replace(&point2(), 3, DEFAULT_GEN_CAP).unwrap();
        let rep = comonad_check(&q, 3).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.generators, 8);
    }

    #[test]
    fn functoriality() {
        let x = Arc::new(point2());
        let q = q_replace(&x, 3, DEFAULT_GEN_CAP).unwrap();
        let id = q_map(&ChainMap::identity(x.clone()), &q, &q).unwrap();
        assert_eq!(id, ChainMap::identity(q.complex().clone()));
        let zero = ChainMap::new(x.clone(), x.clone(), vec![Matrix::zeros(1, 1)]).unwrap();
        let qz = q_map(&zero, &q, &q).unwrap();
        // e_1 ↦ e_0
        let j1 = q.index_of(0, &QGen { x: vec![1], z: None }).unwrap();
        let j0 = q.index_of(0, &QGen { x: vec![0], z: None }).unwrap();
        assert_eq!(qz.degree(0).col(j1)[j0], 1);
        let twice = q_map(&zero.then(&zero), &q, &q).unwrap();
        assert_eq!(twice, qz.then(&qz));
    }

    #[test]
    fn coalgebras() {
        let x = Arc::new(point2());
        let c = coalgebra_from_generators(x.clone(), vec![vec![vec![1]]]).unwrap();
        assert_eq!(c.check().unwrap(), CoalgebraReport { counit: true, coassociative: true });
        assert_eq!(c.extract_generators(), vec![vec![vec![1]]]);
        assert!(coalgebra_from_generators(x, vec![vec![vec![0]]]).is_err());
        // QM with its canonical generators has α = δ
        let q = q_replace(&point2(), 2, DEFAULT_GEN_CAP).unwrap();
        let qm = q.complex().clone();
        let gens: Vec<Vec<Vec<u32>>> = (0..=2)
            .map(|i| (0..qm.rank(i)).map(|j| (0..qm.rank(i)).map(|k| u32::from(j == k)).collect()).collect())
            .collect();
        let co = coalgebra_from_generators(qm.clone(), gens.clone()).unwrap();
        assert!(co.check().unwrap().coassociative);
        let t = Tower { base: &q.base };
        for (i, gs) in gens.iter().enumerate() {
            for (j, g) in gs.iter().enumerate() {
                let delta = t.delta(&lift_gen(&q, i, j)).unwrap();
                let relabel = relabel(&q, &co.alpha(i, g), i);
                assert_eq!(relabel, delta);
            }
        }
        let mut ex = co.extract_generators();
        ex.iter_mut().for_each(|v| v.sort());
        let mut want = gens;
        want.iter_mut().for_each(|v| v.sort());
        assert_eq!(ex, want);
    }

    /// Rewrites the bottom of an element of `Q(QM)` from QM's basis to
    /// the symbolic generators of `QM`.
    fn relabel(q: &QResolution, e: &Sym, deg: usize) -> Sym {
        let mut out = Sym::zero();
        for (a, &c) in &e.0 {
            let base = |y: &Sym, d: usize| lift(q, d, &y.to_vec(q.complex().rank(d)).unwrap());
            let img = match a {
                Atom::Point(y) => Sym::atom(Atom::Point(base(y, 0))),
                Atom::Pair(y, z) => Sym::atom(Atom::Pair(base(y, deg), relabel(q, z, deg - 1))),
                Atom::Basis(_) => unreachable!(),
            };
            out.add_scaled(&img, c, 2);
        }
        out
    }

    #[test]
    fn lifting_against_eps() {
        let q = q_replace(&point2(), 4, DEFAULT_GEN_CAP).unwrap();
        let eps = q.counit();
        for i in 0..=4 {
            let sq = all_squares(i, &eps);
            assert!(!sq.is_empty());
            for (w, x) in sq {
                assert!(matches!(chain_rlp(i, &eps, &w, &x).unwrap(), LiftOutcome::Filler(_)));
            }
        }
        // a circle: H_1 ≠ 0, mapped to zero
        let circle = Arc::new(ChainComplex::from_rows(2, vec![1, 1], &[vec![vec![0]]]).unwrap());
        let zero = Arc::new(ChainComplex::from_rows(2, vec![0, 0], &[vec![]]).unwrap());
        let to0 = ChainMap::new(circle.clone(), zero, vec![Matrix::zeros(0, 1), Matrix::zeros(0, 1)]).unwrap();
        let bad = all_squares(1, &to0).into_iter().any(|(w, x)| matches!(chain_rlp(1, &to0, &w, &x).unwrap(), LiftOutcome::Infeasible(_)));
        assert!(bad);
        let id = ChainMap::identity(circle);
        for i in 0..=1 {
            for (w, x) in all_squares(i, &id) {
                assert!(matches!(chain_rlp(i, &id, &w, &x).unwrap(), LiftOutcome::Filler(_)));
            }
        }
    }

    #[test]
    fn random_complexes_are_complexes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2, 3] {
            for _ in 0..5 {
                let x = random_complex(p, 4, 2, &mut rng).unwrap();
                assert_eq!(x.top(), 4);
            }
        }
        let three = ChainComplex::module(3, 1).unwrap();
        assert!(matches!(q_replace(&three, 3, DEFAULT_GEN_CAP), Err(Error::ResourceLimit(_))));
        assert_eq!(feasible_degree(&three, 4, DEFAULT_GEN_CAP), Some(1));
        assert_eq!(q_replace(&three, 2, 3000).unwrap().ranks(), vec![3, 9, 2187]);
    }
}
