//! A term model of the initial operad with contraction: terms built from
//! units, contraction cells and composites, normal forms of the free operad,
//! bounded enumeration, and the canonical map into any operad with
//! contraction.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::operads::{restrict, GlobularOperad, OperadWithContraction};
use crate::collections::Bounds;
use crate::par;
use crate::pasting::{enum_pd, flatten_with_embeddings, shape, PastingDiagram};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LTerm {
    /// The unit of dimension `n`; `Id(0)` is the unique 0-operation.
    Id(usize),
    /// The extra 0-dimensional generator of the augmented variant.
    Gen0,
    Kappa(Arc<KappaNode>),
    Comp(Arc<CompNode>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KappaNode {
    pi: PastingDiagram,
    a: LTerm,
    b: LTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompNode {
    head: LTerm,
    labels: Vec<Vec<LTerm>>,
    arity: PastingDiagram,
}

impl KappaNode {
    pub fn pi(&self) -> &PastingDiagram {
        &self.pi
    }

    pub fn a(&self) -> &LTerm {
        &self.a
    }

    pub fn b(&self) -> &LTerm {
        &self.b
    }
}

impl CompNode {
    pub fn head(&self) -> &LTerm {
        &self.head
    }

    pub fn labels(&self) -> &[Vec<LTerm>] {
        &self.labels
    }
}

fn term_err(m: impl Into<String>) -> Error {
    Error::Term(m.into())
}

impl LTerm {
    pub fn unit0() -> Self {
        LTerm::Id(0)
    }

    /// `κ_π(a, b)`; `a` and `b` must have arity `∂π` and be parallel.
    pub fn kappa(pi: PastingDiagram, a: LTerm, b: LTerm) -> Result<Self> {
        if pi.dim() == 0 {
            return Err(term_err("contraction cells have dimension at least 1"));
        }
        let bd = pi.boundary()?;
        if a.arity()? != bd || b.arity()? != bd {
            return Err(term_err(format!("boundary terms of k({pi}; ..) must have arity {bd}")));
        }
        if pi.dim() >= 2 && (src(&a)? != src(&b)? || tgt(&a)? != tgt(&b)?) {
            return Err(term_err(format!("{a} and {b} are not parallel")));
        }
        Ok(LTerm::Kappa(Arc::new(KappaNode { pi, a, b })))
    }

    /// `θ ∘ λ` with `labels[k][x]` on the `k`-cell `x` of the realization of
    /// `θ`'s arity; every label is checked against its boundary cells.
    pub fn comp(head: LTerm, labels: Vec<Vec<LTerm>>) -> Result<Self> {
        let arity = check_labels(&head.arity()?, &labels)?;
        Ok(LTerm::Comp(Arc::new(CompNode { head, labels, arity })))
    }

    /// `g^k` in the augmented variant, right nested.
    pub fn g_power(k: usize) -> Self {
        let mut t = LTerm::Id(0);
        for i in 0..k {
            t = if i == 0 { LTerm::Gen0 } else { comp_node(LTerm::Gen0, vec![vec![t]], PastingDiagram::point()) };
        }
        t
    }

    pub fn dim(&self) -> usize {
        match self {
            LTerm::Id(n) => *n,
            LTerm::Gen0 => 0,
            LTerm::Kappa(k) => k.pi.dim(),
            LTerm::Comp(c) => c.arity.dim(),
        }
    }

    pub fn arity(&self) -> Result<PastingDiagram> {
        Ok(match self {
            LTerm::Id(n) => PastingDiagram::unit(*n),
            LTerm::Gen0 => PastingDiagram::point(),
            LTerm::Kappa(k) => k.pi.clone(),
            LTerm::Comp(c) => c.arity.clone(),
        })
    }

    /// Number of unit, contraction and composite nodes, `u0` excluded; the
    /// augmentation generator counts as a node.
    pub fn size(&self) -> usize {
        match self {
            LTerm::Id(0) => 0,
            LTerm::Id(_) | LTerm::Gen0 => 1,
            LTerm::Kappa(k) => 1 + k.a.size() + k.b.size(),
            LTerm::Comp(c) => 1 + c.head.size() + c.labels.iter().flatten().map(LTerm::size).sum::<usize>(),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, LTerm::Id(_))
    }

    fn is_generator(&self) -> bool {
        matches!(self, LTerm::Gen0 | LTerm::Kappa(_))
    }

    /// Whether this is a normal form: composites have a generator head, a
    /// non-unit label and normal labels.
    pub fn is_normal(&self) -> bool {
        match self {
            LTerm::Id(_) | LTerm::Gen0 => true,
            LTerm::Kappa(k) => k.a.is_normal() && k.b.is_normal(),
            LTerm::Comp(c) => {
                c.head.is_generator()
                    && c.head.is_normal()
                    && c.labels.iter().flatten().all(LTerm::is_normal)
                    && c.labels.iter().flatten().any(|l| !l.is_unit())
            }
        }
    }
}

fn comp_node(head: LTerm, labels: Vec<Vec<LTerm>>, arity: PastingDiagram) -> LTerm {
    LTerm::Comp(Arc::new(CompNode { head, labels, arity }))
}

fn check_labels(rho: &PastingDiagram, labels: &[Vec<LTerm>]) -> Result<PastingDiagram> {
    let counts = rho.cell_counts();
    if labels.len() != counts.len() || labels.iter().zip(&counts).any(|(l, &n)| l.len() != n) {
        return Err(term_err(format!("labelling does not match the cells of {rho}")));
    }
    let sh = shape(rho);
    let r = &sh.realization;
    let mut nf: Vec<Vec<LTerm>> = Vec::with_capacity(labels.len());
    for (k, row) in labels.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (x, l) in row.iter().enumerate() {
            if l.dim() != k {
                return Err(term_err(format!("label {l} on a {k}-cell has dimension {}", l.dim())));
            }
            let n = normalize(l)?;
            if k > 0 {
                let (s, t) = (src_nf(&n)?, tgt_nf(&n)?);
                if s != nf[k - 1][r.src[k - 1][x]] || t != nf[k - 1][r.tgt[k - 1][x]] {
                    return Err(term_err(format!("label {l} does not fit its boundary cells")));
                }
            }
            out.push(n);
        }
        nf.push(out);
    }
    let arities: Vec<Vec<PastingDiagram>> = labels.iter().map(|row| row.iter().map(LTerm::arity).collect()).collect::<Result<_>>()?;
    Ok(flatten_with_embeddings(rho, &arities)?.0)
}

/// Composite of normal forms, itself in normal form. Labels are assumed
/// compatible.
pub fn comp_nf(theta: &LTerm, labels: &[Vec<LTerm>]) -> Result<LTerm> {
    match theta {
        LTerm::Id(n) => Ok(labels[*n][0].clone()),
        LTerm::Gen0 | LTerm::Kappa(_) => {
            if labels.iter().flatten().all(LTerm::is_unit) {
                return Ok(theta.clone());
            }
            let arities: Vec<Vec<PastingDiagram>> =
                labels.iter().map(|row| row.iter().map(LTerm::arity).collect()).collect::<Result<_>>()?;
            let flat = flatten_with_embeddings(&theta.arity()?, &arities)?.0;
            Ok(comp_node(theta.clone(), labels.to_vec(), flat))
        }
        LTerm::Comp(c) => {
            let arities: Vec<Vec<PastingDiagram>> =
                c.labels.iter().map(|row| row.iter().map(LTerm::arity).collect()).collect::<Result<_>>()?;
            let (_, emb) = flatten_with_embeddings(&c.head.arity()?, &arities)?;
            let mut inner = Vec::with_capacity(c.labels.len());
            for (k, row) in c.labels.iter().enumerate() {
                let mut out = Vec::with_capacity(row.len());
                for (x, l) in row.iter().enumerate() {
                    out.push(comp_nf(l, &restrict(labels, &emb[k][x]))?);
                }
                inner.push(out);
            }
            let arity = if labels.iter().flatten().all(LTerm::is_unit) {
                c.arity.clone()
            } else {
                let outer: Vec<Vec<PastingDiagram>> =
                    labels.iter().map(|row| row.iter().map(LTerm::arity).collect()).collect::<Result<_>>()?;
                flatten_with_embeddings(&c.arity, &outer)?.0
            };
            Ok(comp_node(c.head.clone(), inner, arity))
        }
    }
}

/// Innermost-first application of the unit and flattening rules.
pub fn normalize(t: &LTerm) -> Result<LTerm> {
    match t {
        LTerm::Id(_) | LTerm::Gen0 => Ok(t.clone()),
        LTerm::Kappa(k) => {
            let (a, b) = (normalize(&k.a)?, normalize(&k.b)?);
            if a == k.a && b == k.b {
                return Ok(t.clone());
            }
            Ok(LTerm::Kappa(Arc::new(KappaNode { pi: k.pi.clone(), a, b })))
        }
        LTerm::Comp(c) => {
            let head = normalize(&c.head)?;
            let labels: Vec<Vec<LTerm>> =
                c.labels.iter().map(|row| row.iter().map(normalize).collect()).collect::<Result<_>>()?;
            comp_nf(&head, &labels)
        }
    }
}

fn boundary_nf(t: &LTerm, target: bool) -> Result<LTerm> {
    match t {
        LTerm::Id(0) | LTerm::Gen0 => Err(term_err(format!("{t} has dimension 0"))),
        LTerm::Id(n) => Ok(LTerm::Id(n - 1)),
        LTerm::Kappa(k) => Ok(if target { k.b.clone() } else { k.a.clone() }),
        LTerm::Comp(c) => {
            let sh = shape(&c.head.arity()?);
            let incl = if target { &sh.tgt_incl } else { &sh.src_incl };
            let incl = incl.as_ref().ok_or_else(|| term_err("missing boundary inclusion"))?;
            comp_nf(&boundary_nf(&c.head, target)?, &restrict(&c.labels, incl))
        }
    }
}

fn src_nf(t: &LTerm) -> Result<LTerm> {
    boundary_nf(t, false)
}

fn tgt_nf(t: &LTerm) -> Result<LTerm> {
    boundary_nf(t, true)
}

/// Source, in normal form.
pub fn src(t: &LTerm) -> Result<LTerm> {
    src_nf(&normalize(t)?)
}

/// Target, in normal form.
pub fn tgt(t: &LTerm) -> Result<LTerm> {
    tgt_nf(&normalize(t)?)
}

pub fn term_eq(s: &LTerm, t: &LTerm) -> Result<bool> {
    Ok(normalize(s)? == normalize(t)?)
}

impl fmt::Display for LTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LTerm::Id(0) => write!(f, "u0"),
            LTerm::Id(n) => write!(f, "id{n}"),
            LTerm::Gen0 => write!(f, "g"),
            LTerm::Kappa(k) => write!(f, "k({}; {}, {})", k.pi, k.a, k.b),
            LTerm::Comp(c) => {
                write!(f, "c({};", c.head)?;
                for (i, l) in c.labels.iter().flatten().enumerate() {
                    write!(f, "{} x{i}={l}", if i == 0 { "" } else { "," })?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, m: impl Into<String>) -> Error {
        Error::parse(1, self.pos + 1, m)
    }

    fn ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(1, char::len_utf8);
        }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{tok}'")))
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.ws();
        let len = self.rest().chars().take_while(char::is_ascii_digit).count();
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        let v = self.rest()[..len].parse().map_err(|_| self.err("number too large"))?;
        self.pos += len;
        Ok(v)
    }

    fn term(&mut self) -> Result<LTerm> {
        self.ws();
        let at = self.pos;
        let wrap = |p: &Self, e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::parse(1, at + 1, format!("{other} (near column {})", p.pos + 1)),
        };
        if self.eat("u0") {
            return Ok(LTerm::Id(0));
        }
        if self.eat("id") {
            return Ok(LTerm::Id(self.number()?));
        }
        if self.eat("k(") {
            let end = self.rest().find(';').ok_or_else(|| self.err("expected ';' after the arity"))?;
            let pi: PastingDiagram = self.rest()[..end].trim().parse().map_err(|e| match e {
                Error::Parse { msg, .. } => self.err(format!("bad arity: {msg}")),
                other => self.err(other.to_string()),
            })?;
            self.pos += end + 1;
            let a = self.term()?;
            self.expect(",")?;
            let b = self.term()?;
            self.expect(")")?;
            return LTerm::kappa(pi, a, b).map_err(|e| wrap(self, e));
        }
        if self.eat("c(") {
            let head = self.term()?;
            self.expect(";")?;
            let mut flat: Vec<(usize, LTerm)> = Vec::new();
            loop {
                self.expect("x")?;
                let i = self.number()?;
                self.expect("=")?;
                flat.push((i, self.term()?));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
            let counts = head.arity().map_err(|e| wrap(self, e))?.cell_counts();
            let total: usize = counts.iter().sum();
            let mut slots: Vec<Option<LTerm>> = vec![None; total];
            for (i, t) in flat {
                if i >= total || slots[i].is_some() {
                    return Err(Error::parse(1, at + 1, format!("cell x{i} is out of range or repeated")));
                }
                slots[i] = Some(t);
            }
            let mut it = slots.into_iter();
            let mut labels = Vec::with_capacity(counts.len());
            for n in counts {
                let row: Option<Vec<LTerm>> = it.by_ref().take(n).collect();
                labels.push(row.ok_or_else(|| Error::parse(1, at + 1, "every cell needs a label"))?);
            }
            return LTerm::comp(head, labels).map_err(|e| wrap(self, e));
        }
        if self.eat("g") {
            return Ok(LTerm::Gen0);
        }
        Err(self.err("expected a term"))
    }
}

impl FromStr for LTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { s, pos: 0 };
        let t = p.term()?;
        p.ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

/// Bounds for enumeration: dimension, nodes of every arity occurring in a
/// term, and term size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermBounds {
    pub max_dim: usize,
    pub max_nodes: usize,
    pub max_size: usize,
}

impl TermBounds {
    /// Default bounds for terms of arity `pi`: arities of subterms have at
    /// most `max(|π|, max_size)` nodes.
    pub fn for_arity(pi: &PastingDiagram, max_size: usize) -> Self {
        TermBounds { max_dim: pi.dim(), max_nodes: pi.nodes().max(max_size).max(1), max_size }
    }
}

pub fn canonical_sort(terms: &mut [LTerm]) {
    terms.sort_by_cached_key(|t| (t.size(), t.to_string()));
}

/// Normal forms grouped for bottom-up enumeration.
#[derive(Default)]
struct NfPool {
    by_dim: Vec<Vec<(LTerm, usize)>>,
    by_arity: HashMap<PastingDiagram, Vec<(LTerm, usize)>>,
    by_bdry: HashMap<(LTerm, LTerm), Vec<(LTerm, usize)>>,
    bdry: HashMap<LTerm, (LTerm, LTerm)>,
    generators: Vec<(LTerm, usize)>,
}

impl NfPool {
    fn add(&mut self, t: LTerm, size: usize) -> Result<()> {
        let d = t.dim();
        if self.by_dim.len() <= d {
            self.by_dim.resize(d + 1, Vec::new());
        }
        self.by_dim[d].push((t.clone(), size));
        self.by_arity.entry(t.arity()?).or_default().push((t.clone(), size));
        if d > 0 {
            let st = (src_nf(&t)?, tgt_nf(&t)?);
            self.by_bdry.entry(st.clone()).or_default().push((t.clone(), size));
            self.bdry.insert(t.clone(), st);
        }
        if t.is_generator() {
            self.generators.push((t, size));
        }
        Ok(())
    }

    fn of_arity(&self, pi: &PastingDiagram) -> &[(LTerm, usize)] {
        self.by_arity.get(pi).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn kappas_of_size(pool: &NfPool, b: &TermBounds, s: usize) -> Result<Vec<LTerm>> {
    let mut out = Vec::new();
    for k in 1..=b.max_dim {
        for pi in enum_pd(k, b.max_nodes) {
            let bd = pi.boundary()?;
            for (a, sa) in pool.of_arity(&bd) {
                for (c, sc) in pool.of_arity(&bd) {
                    if sa + sc + 1 != s {
                        continue;
                    }
                    if k >= 2 && pool.bdry[a] != pool.bdry[c] {
                        continue;
                    }
                    out.push(LTerm::Kappa(Arc::new(KappaNode { pi: pi.clone(), a: a.clone(), b: c.clone() })));
                }
            }
        }
    }
    Ok(out)
}

fn comps_with_head(pool: &NfPool, b: &TermBounds, g: &LTerm, budget: usize) -> Result<Vec<LTerm>> {
    let rho = g.arity()?;
    let sh = shape(&rho);
    let counts = rho.cell_counts();
    let cells: Vec<(usize, usize)> = counts.iter().enumerate().flat_map(|(k, &n)| (0..n).map(move |x| (k, x))).collect();
    // minimal cost of the cells from position i on
    let mut min_rest = vec![0; cells.len() + 1];
    for i in (0..cells.len()).rev() {
        min_rest[i] = min_rest[i + 1] + usize::from(cells[i].0 > 0);
    }
    let mut labels: Vec<Vec<(LTerm, usize)>> = counts.iter().map(|&n| Vec::with_capacity(n)).collect();
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn go(
        pool: &NfPool,
        b: &TermBounds,
        g: &LTerm,
        sh: &crate::pasting::Shape,
        cells: &[(usize, usize)],
        min_rest: &[usize],
        i: usize,
        left: usize,
        labels: &mut Vec<Vec<(LTerm, usize)>>,
        out: &mut Vec<LTerm>,
    ) -> Result<()> {
        if left < min_rest[i] {
            return Ok(());
        }
        if i == cells.len() {
            if left != 0 || labels.iter().flatten().all(|(l, _)| l.is_unit()) {
                return Ok(());
            }
            let ls: Vec<Vec<LTerm>> = labels.iter().map(|r| r.iter().map(|(l, _)| l.clone()).collect()).collect();
            let arities: Vec<Vec<PastingDiagram>> = ls.iter().map(|r| r.iter().map(LTerm::arity).collect()).collect::<Result<_>>()?;
            let flat = flatten_with_embeddings(&g.arity()?, &arities)?.0;
            if flat.nodes() <= b.max_nodes {
                out.push(comp_node(g.clone(), ls, flat));
            }
            return Ok(());
        }
        let (k, x) = cells[i];
        let empty = Vec::new();
        let cands = if k == 0 {
            pool.by_dim.first().unwrap_or(&empty)
        } else {
            let r = &sh.realization;
            let key = (labels[k - 1][r.src[k - 1][x]].0.clone(), labels[k - 1][r.tgt[k - 1][x]].0.clone());
            pool.by_bdry.get(&key).unwrap_or(&empty)
        };
        for (c, sc) in cands {
            if *sc > left {
                continue;
            }
            labels[k].push((c.clone(), *sc));
            go(pool, b, g, sh, cells, min_rest, i + 1, left - sc, labels, out)?;
            labels[k].pop();
        }
        Ok(())
    }
    go(pool, b, g, &sh, &cells, &min_rest, 0, budget, &mut labels, &mut out)?;
    Ok(out)
}

/// All normal forms within the bounds, in canonical order. With `augmented`
/// the 0-dimensional generator `g` is added.
pub fn enum_all(b: &TermBounds, augmented: bool) -> Result<Vec<LTerm>> {
    let mut pool = NfPool::default();
    let mut all = Vec::new();
    pool.add(LTerm::Id(0), 0)?;
    all.push(LTerm::Id(0));
    for s in 1..=b.max_size {
        let mut stratum = Vec::new();
        if s == 1 {
            stratum.extend((1..=b.max_dim).map(LTerm::Id));
            if augmented {
                stratum.push(LTerm::Gen0);
            }
        }
        stratum.extend(kappas_of_size(&pool, b, s)?);
        let heads: Vec<(LTerm, usize)> = pool.generators.iter().filter(|(_, sg)| sg + 2 <= s).cloned().collect();
        let parts = par::map(&heads, |(g, sg)| comps_with_head(&pool, b, g, s - 1 - sg));
        for p in parts {
            stratum.extend(p?);
        }
        stratum.retain(|t| t.arity().is_ok_and(|a| a.nodes() <= b.max_nodes));
        canonical_sort(&mut stratum);
        stratum.dedup();
        for t in &stratum {
            pool.add(t.clone(), s)?;
        }
        all.extend(stratum);
    }
    Ok(all)
}

/// Normal forms of arity `pi` and size at most `max_size`, under
/// [`TermBounds::for_arity`].
pub fn enum_terms(pi: &PastingDiagram, max_size: usize) -> Result<Vec<LTerm>> {
    enum_terms_with(pi, &TermBounds::for_arity(pi, max_size))
}

pub fn enum_terms_with(pi: &PastingDiagram, b: &TermBounds) -> Result<Vec<LTerm>> {
    let all = enum_all(&TermBounds { max_dim: b.max_dim.max(pi.dim()), ..*b }, false)?;
    Ok(all.into_iter().filter(|t| t.arity().is_ok_and(|a| &a == pi)).collect())
}

/// Number of `g` factors in a 0-dimensional augmented normal form.
pub fn word_len(t: &LTerm) -> Option<usize> {
    match t {
        LTerm::Id(0) => Some(0),
        LTerm::Gen0 => Some(1),
        LTerm::Comp(c) if c.head == LTerm::Gen0 => word_len(&c.labels[0][0]).map(|n| n + 1),
        _ => None,
    }
}

/// The 0-dimensional normal forms of the augmented variant of length at most
/// `max_len`, shortest first.
pub fn augmented_enum0(max_len: usize) -> Result<Vec<LTerm>> {
    let b = TermBounds { max_dim: 0, max_nodes: 1, max_size: (2 * max_len).saturating_sub(1) };
    let mut out = enum_all(&b, true)?;
    out.sort_by_key(|t| word_len(t).unwrap_or(usize::MAX));
    Ok(out)
}

/// The unique structure-preserving map into `o`, by structural recursion.
pub fn initial_map<O: OperadWithContraction>(o: &O, t: &LTerm) -> Result<O::Op> {
    match t {
        LTerm::Id(n) => Ok(o.unit(*n)),
        LTerm::Gen0 => Err(term_err("the augmentation generator has no canonical image")),
        LTerm::Kappa(k) => o.kappa(&k.pi, &initial_map(o, &k.a)?, &initial_map(o, &k.b)?),
        LTerm::Comp(c) => {
            let labels: Vec<Vec<O::Op>> =
                c.labels.iter().map(|row| row.iter().map(|l| initial_map(o, l)).collect()).collect::<Result<_>>()?;
            o.comp(&initial_map(o, &c.head)?, &labels)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preserved {
    Unit,
    Contraction,
    Composition,
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessWitness {
    pub law: Preserved,
    pub term: LTerm,
    pub detail: String,
}

/// Checks a candidate table of images of normal forms against every law
/// instance whose terms all lie in the table. Returns the first violation in
/// canonical order.
pub fn uniqueness_check<O: OperadWithContraction>(
    o: &O,
    table: &HashMap<LTerm, O::Op>,
) -> Result<Option<UniquenessWitness>> {
    let mut terms: Vec<LTerm> = table.keys().cloned().collect();
    canonical_sort(&mut terms);
    let get = |t: &LTerm| table.get(t).ok_or_else(|| term_err(format!("candidate is not defined on {t}")));
    let witness = |law, t: &LTerm, detail: String| Ok(Some(UniquenessWitness { law, term: t.clone(), detail }));
    for t in &terms {
        let v = &table[t];
        match t {
            LTerm::Id(n) => {
                if *v != o.unit(*n) {
                    return witness(Preserved::Unit, t, format!("{t} ↦ {v:?}, unit is {:?}", o.unit(*n)));
                }
            }
            LTerm::Gen0 => return Err(term_err("the augmentation generator has no canonical image")),
            LTerm::Kappa(k) => {
                let want = o.kappa(&k.pi, get(&k.a)?, get(&k.b)?)?;
                if *v != want {
                    return witness(Preserved::Contraction, t, format!("{t} ↦ {v:?}, κ of the images is {want:?}"));
                }
            }
            LTerm::Comp(c) => {
                let labels: Vec<Vec<O::Op>> =
                    c.labels.iter().map(|row| row.iter().map(|l| get(l).cloned()).collect()).collect::<Result<_>>()?;
                let want = o.comp(get(&c.head)?, &labels)?;
                if *v != want {
                    return witness(Preserved::Composition, t, format!("{t} ↦ {v:?}, composite of the images is {want:?}"));
                }
            }
        }
        if t.dim() > 0 {
            for (law, bt, ov) in [(Preserved::Source, src_nf(t)?, o.src(v)?), (Preserved::Target, tgt_nf(t)?, o.tgt(v)?)] {
                if let Some(w) = table.get(&bt) {
                    if *w != ov {
                        return witness(law, t, format!("boundary {bt} ↦ {w:?} but the image has {ov:?}"));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The table of `initial_map` on a list of terms.
pub fn initial_table<O: OperadWithContraction>(o: &O, terms: &[LTerm]) -> Result<HashMap<LTerm, O::Op>> {
    terms.iter().map(|t| Ok((t.clone(), initial_map(o, t)?))).collect()
}

/// The term model as an operad with contraction, exposing the normal forms
/// within fixed bounds.
pub struct LeinsterOperad {
    bounds: TermBounds,
    by_arity: HashMap<PastingDiagram, Vec<LTerm>>,
}

impl LeinsterOperad {
    pub fn new(bounds: TermBounds) -> Result<Self> {
        let mut by_arity: HashMap<PastingDiagram, Vec<LTerm>> = HashMap::new();
        for t in enum_all(&bounds, false)? {
            by_arity.entry(t.arity()?).or_default().push(t);
        }
        Ok(LeinsterOperad { bounds, by_arity })
    }

    pub fn term_bounds(&self) -> TermBounds {
        self.bounds
    }

    pub fn terms(&self) -> Vec<LTerm> {
        let mut all: Vec<LTerm> = self.by_arity.values().flatten().cloned().collect();
        canonical_sort(&mut all);
        all
    }
}

impl GlobularOperad for LeinsterOperad {
    type Op = LTerm;

    fn bounds(&self) -> Bounds {
        Bounds::new(self.bounds.max_dim, self.bounds.max_nodes)
    }

    fn ops(&self, pi: &PastingDiagram) -> Vec<LTerm> {
        self.by_arity.get(pi).cloned().unwrap_or_default()
    }

    fn arity(&self, op: &LTerm) -> PastingDiagram {
        op.arity().expect("normal forms have an arity")
    }

    fn src(&self, op: &LTerm) -> Result<LTerm> {
        src_nf(op)
    }

    fn tgt(&self, op: &LTerm) -> Result<LTerm> {
        tgt_nf(op)
    }

    fn unit(&self, n: usize) -> LTerm {
        LTerm::Id(n)
    }

    fn comp(&self, theta: &LTerm, labels: &[Vec<LTerm>]) -> Result<LTerm> {
        check_labels(&theta.arity()?, labels)?;
        comp_nf(theta, labels)
    }

    fn weight(&self, op: &LTerm) -> usize {
        op.size()
    }
}

impl OperadWithContraction for LeinsterOperad {
    fn kappa(&self, pi: &PastingDiagram, a: &LTerm, b: &LTerm) -> Result<LTerm> {
        LTerm::kappa(pi.clone(), a.clone(), b.clone())
    }
}

/// A random well-formed term: a normal form of `l`, composed up to `depth`
/// times with random compatible labellings drawn from `l`.
pub fn random_term<R: Rng>(l: &LeinsterOperad, depth: usize, rng: &mut R) -> LTerm {
    let all = l.terms();
    let theta = all[rng.gen_range(0..all.len())].clone();
    if depth == 0 || theta.dim() == 0 && rng.gen_bool(0.5) {
        return theta;
    }
    let rho = theta.arity().expect("normal form");
    let sh = shape(&rho);
    let r = &sh.realization;
    let counts = rho.cell_counts();
    let mut labels: Vec<Vec<LTerm>> = Vec::with_capacity(counts.len());
    for (k, &n) in counts.iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for x in 0..n {
            let fits = |t: &LTerm| {
                t.dim() == k
                    && (k == 0
                        || (src_nf(t).ok().as_ref() == Some(&labels[k - 1][r.src[k - 1][x]])
                            && tgt_nf(t).ok().as_ref() == Some(&labels[k - 1][r.tgt[k - 1][x]])))
            };
            let cands: Vec<&LTerm> = all.iter().filter(|t| fits(t)).collect();
            let pick = if cands.is_empty() || rng.gen_bool(0.3) {
                // the unit always fits a cell whose boundary is a pair of units
                if k == 0 || (labels[k - 1][r.src[k - 1][x]].is_unit() && labels[k - 1][r.tgt[k - 1][x]].is_unit()) {
                    LTerm::Id(k)
                } else {
                    cands.first().map(|t| (*t).clone()).unwrap_or(LTerm::Id(k))
                }
            } else {
                cands[rng.gen_range(0..cands.len())].clone()
            };
            row.push(pick);
        }
        labels.push(row);
    }
    let labels: Vec<Vec<LTerm>> = labels
        .into_iter()
        .map(|row| row.into_iter().map(|t| if depth > 1 && rng.gen_bool(0.3) { wrap_units(t) } else { t }).collect())
        .collect();
    LTerm::comp(theta.clone(), labels).unwrap_or(theta)
}

/// `id ∘ t` or `t ∘ units`, a raw term equal to `t`.
fn wrap_units(t: LTerm) -> LTerm {
    let n = t.dim();
    if n == 0 {
        return t;
    }
    let rho = t.arity().expect("arity");
    let units: Vec<Vec<LTerm>> = rho.cell_counts().iter().enumerate().map(|(k, &c)| vec![LTerm::Id(k); c]).collect();
    LTerm::comp(t.clone(), units).unwrap_or(t)
}

/// Terms of the unbounded raw syntax reachable by one rewrite step: the
/// left and right unit laws and flattening of a composite head, at any
/// position.
pub fn rewrites(t: &LTerm) -> Result<Vec<LTerm>> {
    let mut out = Vec::new();
    match t {
        LTerm::Id(_) | LTerm::Gen0 => {}
        LTerm::Kappa(k) => {
            for a in rewrites(&k.a)? {
                out.push(LTerm::Kappa(Arc::new(KappaNode { pi: k.pi.clone(), a, b: k.b.clone() })));
            }
            for b in rewrites(&k.b)? {
                out.push(LTerm::Kappa(Arc::new(KappaNode { pi: k.pi.clone(), a: k.a.clone(), b })));
            }
        }
        LTerm::Comp(c) => {
            match &c.head {
                LTerm::Id(n) => out.push(c.labels[*n][0].clone()),
                LTerm::Comp(inner) => {
                    let arities: Vec<Vec<PastingDiagram>> =
                        inner.labels.iter().map(|row| row.iter().map(LTerm::arity).collect()).collect::<Result<_>>()?;
                    let (_, emb) = flatten_with_embeddings(&inner.head.arity()?, &arities)?;
                    let mut ls = Vec::new();
                    for (k, row) in inner.labels.iter().enumerate() {
                        let mut r = Vec::new();
                        for (x, l) in row.iter().enumerate() {
                            r.push(LTerm::comp(l.clone(), restrict(&c.labels, &emb[k][x]))?);
                        }
                        ls.push(r);
                    }
                    out.push(LTerm::comp(inner.head.clone(), ls)?);
                }
                _ => {}
            }
            if c.labels.iter().enumerate().all(|(k, row)| row.iter().all(|l| *l == LTerm::Id(k))) {
                out.push(c.head.clone());
            }
            for h in rewrites(&c.head)? {
                out.push(comp_node(h, c.labels.clone(), c.arity.clone()));
            }
            for (k, row) in c.labels.iter().enumerate() {
                for (x, l) in row.iter().enumerate() {
                    for l2 in rewrites(l)? {
                        let mut ls = c.labels.clone();
                        ls[k][x] = l2;
                        out.push(comp_node(c.head.clone(), ls, c.arity.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Raw well-formed terms of size at most `b.max_size`, with arbitrary
/// heads and labels, for equivalence oracles.
pub fn enum_raw(b: &TermBounds) -> Result<Vec<LTerm>> {
    let mut by_size: Vec<Vec<LTerm>> = vec![vec![LTerm::Id(0)]];
    let mut seen: HashSet<LTerm> = HashSet::from([LTerm::Id(0)]);
    for s in 1..=b.max_size {
        let mut stratum = Vec::new();
        if s == 1 {
            stratum.extend((1..=b.max_dim).map(LTerm::Id));
        }
        let smaller: Vec<LTerm> = by_size.iter().flatten().cloned().collect();
        for k in 1..=b.max_dim {
            for pi in enum_pd(k, b.max_nodes) {
                let bd = pi.boundary()?;
                for a in smaller.iter().filter(|t| t.arity().is_ok_and(|x| x == bd)) {
                    for c in smaller.iter().filter(|t| t.arity().is_ok_and(|x| x == bd)) {
                        if a.size() + c.size() + 1 == s {
                            if let Ok(t) = LTerm::kappa(pi.clone(), a.clone(), c.clone()) {
                                stratum.push(t);
                            }
                        }
                    }
                }
            }
        }
        for head in smaller.iter().filter(|h| h.size() + 1 < s || (h.size() + 1 == s && h.dim() == 0)) {
            let rho = head.arity()?;
            let counts = rho.cell_counts();
            let cells: Vec<(usize, usize)> =
                counts.iter().enumerate().flat_map(|(k, &n)| (0..n).map(move |x| (k, x))).collect();
            let budget = s - 1 - head.size();
            let mut acc: Vec<Vec<LTerm>> = counts.iter().map(|_| Vec::new()).collect();
            raw_labels(&smaller, head, &rho, &cells, 0, budget, &mut acc, &mut stratum)?;
        }
        stratum.retain(|t| t.arity().is_ok_and(|a| a.nodes() <= b.max_nodes) && seen.insert(t.clone()));
        by_size.push(stratum);
    }
    let mut all: Vec<LTerm> = by_size.into_iter().flatten().collect();
    canonical_sort(&mut all);
    Ok(all)
}

#[allow(clippy::too_many_arguments)]
fn raw_labels(
    pool: &[LTerm],
    head: &LTerm,
    rho: &PastingDiagram,
    cells: &[(usize, usize)],
    i: usize,
    left: usize,
    acc: &mut Vec<Vec<LTerm>>,
    out: &mut Vec<LTerm>,
) -> Result<()> {
    if i == cells.len() {
        if left == 0 {
            if let Ok(t) = LTerm::comp(head.clone(), acc.clone()) {
                out.push(t);
            }
        }
        return Ok(());
    }
    let (k, x) = cells[i];
    let sh = shape(rho);
    let r = &sh.realization;
    for c in pool {
        if c.dim() != k || c.size() > left {
            continue;
        }
        if k > 0 {
            let s = normalize(&acc[k - 1][r.src[k - 1][x]])?;
            let t = normalize(&acc[k - 1][r.tgt[k - 1][x]])?;
            if src(c)? != s || tgt(c)? != t {
                continue;
            }
        }
        acc[k].push(c.clone());
        raw_labels(pool, head, rho, cells, i + 1, left - c.size(), acc, out)?;
        acc[k].pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operads::{check_contraction, check_operad_laws, check_owc_morphism, is_normalised, semilattice_owc, terminal_operad, FiniteMonoid, LawBudget};

    fn pd(s: &str) -> PastingDiagram {
        s.parse().unwrap()
    }

    fn t(s: &str) -> LTerm {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        for s in ["u0", "id2", "k(1:[* *]; u0, u0)", "k(2:[[*]]; id1, k(1:[*]; u0, u0))", "c(id1; x0=u0, x1=u0, x2=k(1:[*]; u0, u0))"] {
            assert_eq!(t(s).to_string(), s);
        }
        assert!("k(2:[[*]]; id1, u0)".parse::<LTerm>().is_err());
        assert!("c(id1; x0=u0, x2=id1)".parse::<LTerm>().is_err());
        assert!("id1 id1".parse::<LTerm>().is_err());
    }

    #[test]
    fn arity_and_boundaries() {
        assert_eq!(LTerm::Id(2).arity().unwrap(), pd("2:[[*]]"));
        let k2 = t("k(1:[* *]; u0, u0)");
        let c = LTerm::comp(k2, vec![vec![LTerm::Id(0); 3], vec![t("k(1:[*]; u0, u0)"), t("k(1:[]; u0, u0)")]]).unwrap();
        assert_eq!(c.arity().unwrap(), pd("1:[*]"));
        let k = t("k(2:[[*]]; id1, k(1:[*]; u0, u0))");
        assert_eq!(src(&k).unwrap(), LTerm::Id(1));
        assert_eq!(src(&LTerm::Id(3)).unwrap(), LTerm::Id(2));
        assert!(src(&LTerm::Id(0)).is_err());
    }

    #[test]
    fn unit_laws_normalize() {
        let k = t("k(1:[*]; u0, u0)");
        let left = t("c(id1; x0=u0, x1=u0, x2=k(1:[*]; u0, u0))");
        assert_eq!(normalize(&left).unwrap(), k);
        let right = t("c(k(1:[*]; u0, u0); x0=u0, x1=u0, x2=id1)");
        assert_eq!(normalize(&right).unwrap(), k);
        assert!(!term_eq(&LTerm::Id(1), &k).unwrap());
        let k2 = "k(1:[* *]; u0, u0)";
        let l = t(&format!("c({k2}; x0=u0, x1=u0, x2=u0, x3={k2}, x4=id1)"));
        let r = t(&format!("c({k2}; x0=u0, x1=u0, x2=u0, x3=id1, x4={k2})"));
        assert!(!term_eq(&l, &r).unwrap());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enum_terms(&PastingDiagram::point(), 5).unwrap(), vec![LTerm::Id(0)]);
        let e = enum_terms(&pd("1:[*]"), 1).unwrap();
        assert_eq!(e, vec![LTerm::Id(1), t("k(1:[*]; u0, u0)")]);
        for x in enum_all(&TermBounds { max_dim: 2, max_nodes: 3, max_size: 4 }, false).unwrap() {
            assert!(x.is_normal(), "{x}");
            assert_eq!(normalize(&x).unwrap(), x);
            assert_eq!(x.to_string().parse::<LTerm>().unwrap(), x);
        }
    }

    #[test]
    fn augmented_words() {
        assert_eq!(augmented_enum0(0).unwrap(), vec![LTerm::Id(0)]);
        let w = augmented_enum0(3).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.iter().map(|x| word_len(x).unwrap()).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let g2 = LTerm::g_power(2);
        let g2g = LTerm::comp(g2, vec![vec![LTerm::Gen0]]).unwrap();
        assert_eq!(normalize(&g2g).unwrap(), LTerm::g_power(3));
    }

    #[test]
    fn initial_maps() {
        let b = Bounds::new(2, 3);
        let l = LeinsterOperad::new(TermBounds { max_dim: 2, max_nodes: 3, max_size: 3 }).unwrap();
        assert!(is_normalised(&l));
        let sl = semilattice_owc(FiniteMonoid::boolean(), &|p| usize::from(p.nodes() == 3), b).unwrap();
        let table = initial_table(&sl, &l.terms()).unwrap();
        assert_eq!(uniqueness_check(&sl, &table).unwrap(), None);
        for (x, v) in &table {
            assert_eq!(initial_map(&sl, &normalize(x).unwrap()).unwrap(), *v);
            if let LTerm::Kappa(k) = x {
                if k.pi().dim() == 1 {
                    assert_eq!(v.elem, usize::from(k.pi().nodes() == 3));
                }
            }
        }
        let mut bad = table.clone();
        for (x, v) in bad.iter_mut() {
            if x.dim() == 1 {
                v.elem = 1;
            }
        }
        let w = uniqueness_check(&sl, &bad).unwrap().unwrap();
        assert_eq!((w.law, w.term), (Preserved::Unit, LTerm::Id(1)));
        let term = terminal_operad(b);
        let map = |x: &LTerm| initial_map(&term, x);
        assert!(check_owc_morphism(&l, &term, &map, LawBudget { max_weight: Some(3), associativity: false }).unwrap().is_clean());
        let map = |x: &LTerm| initial_map(&sl, x);
        let rep = check_owc_morphism(&l, &sl, &map, LawBudget { max_weight: Some(3), associativity: false }).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.failures.first());
    }

    #[test]
    fn term_model_is_an_operad() {
        let l = LeinsterOperad::new(TermBounds { max_dim: 2, max_nodes: 3, max_size: 4 }).unwrap();
        let rep = check_operad_laws(&l, LawBudget { max_weight: Some(4), associativity: true }).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.failures.first());
        assert!(rep.instances > 100, "{} {}", rep.instances, rep.skipped);
        let k = check_contraction(&l).unwrap();
        assert!(k.is_clean() && k.instances > 10, "{k:?}");
    }
}
