//! Pasting diagrams as planar trees: enumeration, boundary, unit globes,
//! realization, grafting, and flattening of labelled diagrams. Also the
//! category of elements of `pd` at finite bounds.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::fincat::{FiniteDirectCategory, MorId, Morphism, ObjId};
use crate::globes::GlobularSet;

/// A planar rooted tree; leaves at the full depth print as `*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree(pub Vec<Tree>);

impl Tree {
    pub fn nodes(&self) -> usize {
        1 + self.0.iter().map(Tree::nodes).sum::<usize>()
    }

    fn height_within(&self, h: usize) -> bool {
        if h == 0 {
            self.0.is_empty()
        } else {
            self.0.iter().all(|c| c.height_within(h - 1))
        }
    }

    fn truncate(&self, h: usize) -> Tree {
        if h == 0 {
            Tree(Vec::new())
        } else {
            Tree(self.0.iter().map(|c| c.truncate(h - 1)).collect())
        }
    }

    fn write(&self, depth: usize, dim: usize, out: &mut String) {
        if depth == dim {
            out.push('*');
            return;
        }
        out.push('[');
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            c.write(depth + 1, dim, out);
        }
        out.push(']');
    }
}

/// An element of `pd_n`: a tree of height at most `dim`, with `dim` kept
/// explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PastingDiagram {
    dim: usize,
    tree: Tree,
}

impl PastingDiagram {
    pub fn new(dim: usize, tree: Tree) -> Result<Self> {
        if !tree.height_within(dim) {
            return Err(Error::Pasting(format!("tree is taller than dimension {dim}")));
        }
        Ok(PastingDiagram { dim, tree })
    }

    pub fn point() -> Self {
        PastingDiagram { dim: 0, tree: Tree(Vec::new()) }
    }

    /// `[c_1 … c_m]` of dimension `dim`; every child must have dimension `dim - 1`.
    pub fn from_children(dim: usize, children: Vec<PastingDiagram>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Pasting("a point has no children".into()));
        }
        if children.iter().any(|c| c.dim + 1 != dim) {
            return Err(Error::Pasting("child has the wrong dimension".into()));
        }
        Ok(PastingDiagram { dim, tree: Tree(children.into_iter().map(|c| c.tree).collect()) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Node count, root included.
    pub fn nodes(&self) -> usize {
        self.tree.nodes()
    }

    pub fn root_len(&self) -> usize {
        self.tree.0.len()
    }

    pub fn children(&self) -> Vec<PastingDiagram> {
        assert!(self.dim > 0, "a point has no children");
        self.tree.0.iter().map(|t| PastingDiagram { dim: self.dim - 1, tree: t.clone() }).collect()
    }

    pub fn child(&self, j: usize) -> PastingDiagram {
        PastingDiagram { dim: self.dim - 1, tree: self.tree.0[j].clone() }
    }

    /// `∂π`, which serves as both source and target on `pd`.
    pub fn boundary(&self) -> Result<PastingDiagram> {
        if self.dim == 0 {
            return Err(Error::Pasting("a point has no boundary".into()));
        }
        Ok(PastingDiagram { dim: self.dim - 1, tree: self.tree.truncate(self.dim - 1) })
    }

    /// `∂^{dim-k}π`, of dimension `k`.
    pub fn boundary_to(&self, k: usize) -> Result<PastingDiagram> {
        if k > self.dim {
            return Err(Error::Pasting(format!("cannot take the {k}-boundary of a {}-diagram", self.dim)));
        }
        Ok(PastingDiagram { dim: k, tree: self.tree.truncate(k) })
    }

    pub fn unit(n: usize) -> Self {
        let mut tree = Tree(Vec::new());
        for _ in 0..n {
            tree = Tree(vec![tree]);
        }
        PastingDiagram { dim: n, tree }
    }

    pub fn is_unit(&self) -> bool {
        *self == PastingDiagram::unit(self.dim)
    }

    /// Tree body without the dimension prefix.
    pub fn body(&self) -> String {
        let mut s = String::new();
        self.tree.write(0, self.dim, &mut s);
        s
    }

    /// Cell counts of the realization, one entry per dimension `0..=dim`.
    pub fn cell_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim + 1];
        if self.dim == 0 {
            out[0] = 1;
            return out;
        }
        out[0] = self.root_len() + 1;
        for c in self.children() {
            for (d, n) in c.cell_counts().into_iter().enumerate() {
                out[d + 1] += n;
            }
        }
        out
    }
}

impl fmt::Display for PastingDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dim, self.body())
    }
}

impl Ord for PastingDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.nodes(), self.to_string()).cmp(&(other.nodes(), other.to_string()))
    }
}

impl PartialOrd for PastingDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Parser for `n:<tree>`; without the prefix the dimension is inferred from
/// the depth of the leaves. Commas are accepted as separators.
impl FromStr for PastingDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { chars: s.chars().collect(), pos: 0 };
        p.skip_ws();
        let start = p.pos;
        while p.peek().is_some_and(|c| c.is_ascii_digit()) {
            p.pos += 1;
        }
        let explicit = if p.pos > start && p.peek() == Some(':') {
            let n: String = p.chars[start..p.pos].iter().collect();
            p.pos += 1;
            Some(n.parse::<usize>().map_err(|e| p.error(&e.to_string()))?)
        } else {
            p.pos = start;
            None
        };
        p.skip_ws();
        let raw = p.tree()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.error("trailing input"));
        }
        let (star_depth, bracket_depth) = raw.depths(0);
        let dim = match (explicit, star_depth) {
            (Some(n), _) => n,
            (None, Some(d)) => d,
            (None, None) => bracket_depth.map_or(0, |d| d + 1),
        };
        raw.into_tree(0, dim).ok_or_else(|| p.error(&format!("leaves do not sit at depth {dim}")))
            .map(|tree| PastingDiagram { dim, tree })
    }
}

enum RawTree {
    Star,
    Node(Vec<RawTree>),
}

impl RawTree {
    /// Depth of the first star, and maximal depth of a bracket node.
    fn depths(&self, d: usize) -> (Option<usize>, Option<usize>) {
        match self {
            RawTree::Star => (Some(d), None),
            RawTree::Node(cs) => {
                let mut star = None;
                let mut br = Some(d);
                for c in cs {
                    let (s, b) = c.depths(d + 1);
                    star = star.or(s);
                    br = br.max(b);
                }
                (star, br)
            }
        }
    }

    fn into_tree(self, depth: usize, dim: usize) -> Option<Tree> {
        match self {
            RawTree::Star if depth == dim => Some(Tree(Vec::new())),
            RawTree::Node(cs) if depth < dim => {
                cs.into_iter().map(|c| c.into_tree(depth + 1, dim)).collect::<Option<Vec<_>>>().map(Tree)
            }
            _ => None,
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace() || c == ',') {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> Error {
        let before = &self.chars[..self.pos.min(self.chars.len())];
        let line = 1 + before.iter().filter(|&&c| c == '\n').count();
        let column = 1 + before.iter().rev().take_while(|&&c| c != '\n').count();
        Error::parse(line, column, msg)
    }

    fn tree(&mut self) -> Result<RawTree> {
        match self.peek() {
            Some('*') => {
                self.pos += 1;
                Ok(RawTree::Star)
            }
            Some('[') => {
                self.pos += 1;
                let mut cs = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(']') => {
                            self.pos += 1;
                            return Ok(RawTree::Node(cs));
                        }
                        None => return Err(self.error("unclosed bracket")),
                        _ => cs.push(self.tree()?),
                    }
                }
            }
            Some(c) => Err(self.error(&format!("unexpected character {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn trees_exact(dim: usize, nodes: usize, memo: &mut HashMap<(usize, usize), Vec<Tree>>) -> Vec<Tree> {
    if let Some(v) = memo.get(&(dim, nodes)) {
        return v.clone();
    }
    let out = if nodes == 0 {
        Vec::new()
    } else if dim == 0 {
        if nodes == 1 {
            vec![Tree(Vec::new())]
        } else {
            Vec::new()
        }
    } else {
        forests(dim - 1, nodes - 1, memo).into_iter().map(Tree).collect()
    };
    memo.insert((dim, nodes), out.clone());
    out
}

fn forests(dim: usize, nodes: usize, memo: &mut HashMap<(usize, usize), Vec<Tree>>) -> Vec<Vec<Tree>> {
    if nodes == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=nodes {
        for t in trees_exact(dim, first, memo) {
            for rest in forests(dim, nodes - first, memo) {
                let mut f = vec![t.clone()];
                f.extend(rest);
                out.push(f);
            }
        }
    }
    out
}

/// All diagrams of dimension `n` with at most `max_nodes` nodes, in canonical
/// order (node count, then serialization).
pub fn enum_pd(n: usize, max_nodes: usize) -> Vec<PastingDiagram> {
    let mut memo = HashMap::new();
    let mut out: Vec<PastingDiagram> = (1..=max_nodes)
        .flat_map(|k| trees_exact(n, k, &mut memo))
        .map(|tree| PastingDiagram { dim: n, tree })
        .collect();
    out.sort();
    out
}

/// Grafts `rho` onto `pi` along their common `k`-boundary by concatenating
/// children at depth `k`.
pub fn compose_k(pi: &PastingDiagram, rho: &PastingDiagram, k: usize) -> Result<PastingDiagram> {
    if pi.dim != rho.dim || pi.dim <= k {
        return Err(Error::Pasting(format!("cannot compose along dimension {k}")));
    }
    if pi.boundary_to(k)? != rho.boundary_to(k)? {
        return Err(Error::Pasting(format!("{pi} and {rho} do not share a {k}-boundary")));
    }
    fn go(a: &Tree, b: &Tree, k: usize) -> Tree {
        if k == 0 {
            Tree(a.0.iter().chain(b.0.iter()).cloned().collect())
        } else {
            Tree(a.0.iter().zip(&b.0).map(|(x, y)| go(x, y, k - 1)).collect())
        }
    }
    Ok(PastingDiagram { dim: pi.dim, tree: go(&pi.tree, &rho.tree, k) })
}

/// Offsets of each child's suspended cells within dimension `d + 1` of the
/// parent's realization: `offsets[i][d]`.
fn block_offsets(children: &[PastingDiagram], dim: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(children.len() + 1);
    let mut acc = vec![0; dim];
    out.push(acc.clone());
    for c in children {
        for (d, n) in c.cell_counts().into_iter().enumerate() {
            acc[d] += n;
        }
        out.push(acc.clone());
    }
    out
}

/// The globular set drawn by `π`: a point for dimension 0, otherwise the
/// end-to-end gluing of the suspended realizations of the children.
pub fn realize(pi: &PastingDiagram) -> GlobularSet {
    let counts = pi.cell_counts();
    if pi.dim == 0 {
        return GlobularSet::point();
    }
    let children = pi.children();
    let offs = block_offsets(&children, pi.dim);
    let mut src: Vec<Vec<usize>> = vec![Vec::new(); pi.dim];
    let mut tgt: Vec<Vec<usize>> = vec![Vec::new(); pi.dim];
    for (i, c) in children.iter().enumerate() {
        let r = realize(c);
        src[0].extend(std::iter::repeat_n(i, r.count(0)));
        tgt[0].extend(std::iter::repeat_n(i + 1, r.count(0)));
        for d in 1..pi.dim {
            for x in 0..r.count(d) {
                src[d].push(offs[i][d - 1] + r.src[d - 1][x]);
                tgt[d].push(offs[i][d - 1] + r.tgt[d - 1][x]);
            }
        }
    }
    GlobularSet::new(counts, src, tgt).expect("realizations are globular")
}

/// Per-dimension cell map between realizations.
pub type CellMap = Vec<Vec<usize>>;

/// The source (`target = false`) or target inclusion `realize(∂π) → realize(π)`.
pub fn boundary_inclusion(pi: &PastingDiagram, target: bool) -> Result<CellMap> {
    if pi.dim == 0 {
        return Err(Error::Pasting("a point has no boundary".into()));
    }
    if pi.dim == 1 {
        return Ok(vec![vec![if target { pi.root_len() } else { 0 }]]);
    }
    let children = pi.children();
    let offs = block_offsets(&children, pi.dim);
    let mut out: CellMap = vec![Vec::new(); pi.dim];
    out[0] = (0..=children.len()).collect();
    for (i, c) in children.iter().enumerate() {
        let inc = boundary_inclusion(c, target)?;
        for (d, m) in inc.iter().enumerate() {
            out[d + 1].extend(m.iter().map(|&x| offs[i][d] + x));
        }
    }
    Ok(out)
}

/// Composite inclusion `realize(∂^{dim-k}π) → realize(π)`.
pub fn iterated_inclusion(pi: &PastingDiagram, k: usize, target: bool) -> Result<CellMap> {
    let mut cur = pi.clone();
    let mut map: Option<CellMap> = None;
    while cur.dim > k {
        let inc = boundary_inclusion(&cur, target)?;
        map = Some(match map {
            None => inc,
            Some(outer) => inc.iter().enumerate().map(|(d, m)| m.iter().map(|&x| outer[d][x]).collect()).collect(),
        });
        cur = cur.boundary()?;
    }
    Ok(map.unwrap_or_else(|| cur.cell_counts().iter().map(|&n| (0..n).collect()).collect()))
}

/// A diagram whose cells carry diagrams of matching dimension, compatible
/// with boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledPasting {
    pub base: PastingDiagram,
    pub labels: Vec<Vec<PastingDiagram>>,
}

impl LabelledPasting {
    pub fn new(base: PastingDiagram, labels: Vec<Vec<PastingDiagram>>) -> Result<Self> {
        let lp = LabelledPasting { base, labels };
        lp.validate()?;
        Ok(lp)
    }

    pub fn validate(&self) -> Result<()> {
        let r = realize(&self.base);
        let counts = self.base.cell_counts();
        if self.labels.len() != counts.len() || self.labels.iter().zip(&counts).any(|(l, &n)| l.len() != n) {
            return Err(Error::Pasting("label table does not match the base".into()));
        }
        for (k, ls) in self.labels.iter().enumerate() {
            for (x, l) in ls.iter().enumerate() {
                if l.dim != k {
                    return Err(Error::Pasting(format!("label of {k}-cell {x} has dimension {}", l.dim)));
                }
                if k > 0 {
                    let b = l.boundary()?;
                    if b != self.labels[k - 1][r.src[k - 1][x]] || b != self.labels[k - 1][r.tgt[k - 1][x]] {
                        return Err(Error::Pasting(format!("label of {k}-cell {x} is not boundary compatible")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every cell labelled by the unit globe of its dimension.
    pub fn units(base: PastingDiagram) -> Self {
        let labels = base
            .cell_counts()
            .iter()
            .enumerate()
            .map(|(k, &n)| vec![PastingDiagram::unit(k); n])
            .collect();
        LabelledPasting { base, labels }
    }

    /// The unit globe `u_n` with top cell labelled `π` and forced boundaries.
    pub fn top(pi: PastingDiagram) -> Self {
        let n = pi.dim;
        let labels = (0..=n)
            .map(|k| {
                let b = pi.boundary_to(k).expect("k ≤ n");
                vec![b; if k < n { 2 } else { 1 }]
            })
            .collect();
        LabelledPasting { base: PastingDiagram::unit(n), labels }
    }
}

/// Every boundary-compatible label table on `base` whose labels have at most
/// `max_nodes` nodes, cells filled in canonical order.
pub fn labellings(base: &PastingDiagram, max_nodes: usize) -> Vec<Vec<Vec<PastingDiagram>>> {
    let r = shape(base);
    let counts = base.cell_counts();
    let pools: Vec<Vec<PastingDiagram>> = (0..counts.len()).map(|k| enum_pd(k, max_nodes)).collect();
    let cells: Vec<(usize, usize)> = counts.iter().enumerate().flat_map(|(k, &n)| (0..n).map(move |x| (k, x))).collect();
    let mut out = Vec::new();
    let mut cur: Vec<Vec<PastingDiagram>> = counts.iter().map(|&n| Vec::with_capacity(n)).collect();
    fn go(
        i: usize,
        cells: &[(usize, usize)],
        pools: &[Vec<PastingDiagram>],
        r: &GlobularSet,
        cur: &mut Vec<Vec<PastingDiagram>>,
        out: &mut Vec<Vec<Vec<PastingDiagram>>>,
    ) {
        let Some(&(k, x)) = cells.get(i) else {
            out.push(cur.clone());
            return;
        };
        for p in &pools[k] {
            if k > 0 {
                let (s, t) = (&cur[k - 1][r.src[k - 1][x]], &cur[k - 1][r.tgt[k - 1][x]]);
                let b = p.boundary().expect("positive dimension");
                if &b != s || &b != t {
                    continue;
                }
            }
            cur[k].push(p.clone());
            go(i + 1, cells, pools, r, cur, out);
            cur[k].pop();
        }
    }
    go(0, &cells, &pools, &r.realization, &mut cur, &mut out);
    out
}

/// Embeddings `realize(label x) → realize(flatten)`, indexed `[k][x]`.
pub type Embeddings = Vec<Vec<CellMap>>;

/// Evaluates a labelled diagram in the strict structure on `pd`.
pub fn flatten(lp: &LabelledPasting) -> Result<PastingDiagram> {
    flatten_with_embeddings(&lp.base, &lp.labels).map(|(p, _)| p)
}

/// Flattening together with the image of every label inside the result.
///
/// Within the `i`-th block of the base all 1-cell labels agree (the block is
/// connected), say with `r_i` children; unzipping every label of the block
/// at position `j < r_i` gives a labelled diagram over the `i`-th child, and
/// the flattened results are concatenated in `(i, j)` order.
pub fn flatten_with_embeddings(
    base: &PastingDiagram,
    labels: &[Vec<PastingDiagram>],
) -> Result<(PastingDiagram, Embeddings)> {
    let counts = base.cell_counts();
    if labels.len() != counts.len() || labels.iter().zip(&counts).any(|(l, &n)| l.len() != n) {
        return Err(Error::Pasting("label table does not match the base".into()));
    }
    if labels[0].iter().any(|l| l.dim != 0) {
        return Err(Error::Pasting("0-cells must be labelled by the point".into()));
    }
    if base.dim == 0 {
        return Ok((PastingDiagram::point(), vec![vec![vec![vec![0]]]]));
    }
    let n = base.dim;
    let children = base.children();
    let offs = block_offsets(&children, n);
    let mut parts: Vec<Vec<(PastingDiagram, Embeddings)>> = Vec::with_capacity(children.len());
    for (i, c) in children.iter().enumerate() {
        let cc = c.cell_counts();
        let first = labels[1]
            .get(offs[i][0])
            .ok_or_else(|| Error::Pasting("missing 1-cell label".into()))?;
        let r = first.root_len();
        let mut block = Vec::with_capacity(r);
        for j in 0..r {
            let mut sub: Vec<Vec<PastingDiagram>> = Vec::with_capacity(cc.len());
            for (k, &m) in cc.iter().enumerate() {
                let mut row = Vec::with_capacity(m);
                for x in 0..m {
                    let l = &labels[k + 1][offs[i][k] + x];
                    if l.dim != k + 1 || l.root_len() != r {
                        return Err(Error::Pasting(format!("labels in block {i} are not compatible")));
                    }
                    row.push(l.child(j));
                }
                sub.push(row);
            }
            block.push(flatten_with_embeddings(c, &sub)?);
        }
        parts.push(block);
    }
    let flat_children: Vec<PastingDiagram> = parts.iter().flatten().map(|(p, _)| p.clone()).collect();
    let mut result = PastingDiagram { dim: n, tree: Tree(Vec::new()) };
    for piece in parts.iter() {
        let piece = PastingDiagram::from_children(n, piece.iter().map(|(p, _)| p.clone()).collect())?;
        result = compose_k(&result, &piece, 0)?;
    }
    let res_offs = block_offsets(&flat_children, n);
    let mut emb: Embeddings = counts.iter().map(|&m| Vec::with_capacity(m)).collect();
    let mut w = 0;
    let mut starts = Vec::with_capacity(children.len() + 1);
    for block in &parts {
        starts.push(w);
        w += block.len();
    }
    starts.push(w);
    for &s in &starts {
        emb[0].push(vec![vec![s]]);
    }
    for (i, c) in children.iter().enumerate() {
        for (k, &m) in c.cell_counts().iter().enumerate() {
            for x in 0..m {
                let l = &labels[k + 1][offs[i][k] + x];
                let lc = l.children();
                let loffs = block_offsets(&lc, k + 1);
                let mut map: CellMap = vec![Vec::new(); k + 2];
                map[0] = (0..=lc.len()).map(|j| starts[i] + j).collect();
                for (j, _) in lc.iter().enumerate() {
                    let b = starts[i] + j;
                    let inner = &parts[i][j].1[k][x];
                    for (d, cells) in inner.iter().enumerate() {
                        debug_assert_eq!(map[d + 1].len(), loffs[j][d]);
                        map[d + 1].extend(cells.iter().map(|&e| res_offs[b][d] + e));
                    }
                }
                emb[k + 1].push(map);
            }
        }
    }
    Ok((result, emb))
}

/// Cached per-diagram data: realization, boundary inclusions, and which
/// cells are maximal (not a source or target of a higher cell).
#[derive(Debug)]
pub struct Shape {
    pub realization: GlobularSet,
    pub src_incl: Option<CellMap>,
    pub tgt_incl: Option<CellMap>,
    pub maximal: Vec<Vec<bool>>,
}

pub fn shape(pi: &PastingDiagram) -> Arc<Shape> {
    static CACHE: OnceLock<Mutex<HashMap<PastingDiagram, Arc<Shape>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("shape cache").get(pi) {
        return s.clone();
    }
    let r = realize(pi);
    let counts = pi.cell_counts();
    let mut maximal: Vec<Vec<bool>> = counts.iter().map(|&n| vec![true; n]).collect();
    for k in 1..counts.len() {
        for x in 0..counts[k] {
            maximal[k - 1][r.src[k - 1][x]] = false;
            maximal[k - 1][r.tgt[k - 1][x]] = false;
        }
    }
    let s = Arc::new(Shape {
        src_incl: boundary_inclusion(pi, false).ok(),
        tgt_incl: boundary_inclusion(pi, true).ok(),
        realization: r,
        maximal,
    });
    cache.lock().expect("shape cache").insert(pi.clone(), s.clone());
    s
}

/// The category of elements of `pd` restricted to `dim ≤ max_dim` and
/// `nodes ≤ max_nodes`, with objects listed by dimension then canonical order.
#[derive(Clone, Debug)]
pub struct ElPd {
    cat: Arc<FiniteDirectCategory>,
    objects: Vec<PastingDiagram>,
    index: HashMap<PastingDiagram, ObjId>,
    bounds: (usize, usize),
    steps: HashMap<(ObjId, bool), MorId>,
}

pub fn el_pd(max_dim: usize, max_nodes: usize) -> ElPd {
    let objects: Vec<PastingDiagram> = (0..=max_dim).flat_map(|n| enum_pd(n, max_nodes)).collect();
    let index: HashMap<PastingDiagram, ObjId> = objects.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let named = objects.iter().map(|p| (p.to_string(), p.dim)).collect();
    let mut morphisms = Vec::new();
    let mut lookup = HashMap::new();
    let mut kinds = Vec::new();
    for (b, p) in objects.iter().enumerate() {
        for k in 0..p.dim {
            let a = index[&p.boundary_to(k).expect("k < dim")];
            for (target, letter) in [(false, 's'), (true, 't')] {
                lookup.insert((k, b, target), morphisms.len());
                kinds.push((k, target));
                morphisms.push(Morphism { name: format!("{letter}{k}>{p}"), src: a, tgt: b });
            }
        }
    }
    let tgts: Vec<ObjId> = morphisms.iter().map(|m| m.tgt).collect();
    let compose = |g: usize, f: usize| {
        let (k, target) = kinds[f];
        lookup[&(k, tgts[g], target)]
    };
    let cat = FiniteDirectCategory::new(format!("elpd{max_dim}_{max_nodes}"), named, morphisms, compose)
        .expect("category of elements is well formed");
    let offset = objects.len();
    let steps = lookup
        .iter()
        .filter(|((k, b, _), _)| k + 1 == objects[*b].dim)
        .map(|(&(_, b, target), &m)| ((b, target), m + offset))
        .collect();
    ElPd { cat: Arc::new(cat), objects, index, bounds: (max_dim, max_nodes), steps }
}

impl ElPd {
    pub fn cat(&self) -> &Arc<FiniteDirectCategory> {
        &self.cat
    }

    pub fn objects(&self) -> &[PastingDiagram] {
        &self.objects
    }

    pub fn object(&self, pi: &PastingDiagram) -> Option<ObjId> {
        self.index.get(pi).copied()
    }

    pub fn bounds(&self) -> (usize, usize) {
        self.bounds
    }

    /// The generating morphism `(n-1, ∂π) → (n, π)`, source or target copy.
    pub fn step(&self, obj: ObjId, target: bool) -> Option<MorId> {
        self.steps.get(&(obj, target)).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(s: &str) -> PastingDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(pd("[*,*]").to_string(), "1:[* *]");
        assert_eq!(pd("2:[[* *] [*]]").to_string(), "2:[[* *] [*]]");
        assert_eq!(pd("1:[]").to_string(), "1:[]");
        assert_eq!(pd("2:[]").to_string(), "2:[]");
        assert_eq!(pd("[[]]").dim(), 2);
        assert_eq!(pd("*"), PastingDiagram::point());
        assert!(matches!("2:[*]".parse::<PastingDiagram>(), Err(Error::Parse { .. })));
        assert!(matches!("[*".parse::<PastingDiagram>(), Err(Error::Parse { .. })));
        assert!(matches!("[* [*]]".parse::<PastingDiagram>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enum_pd(0, 5), vec![PastingDiagram::point()]);
        let one: Vec<String> = enum_pd(1, 4).iter().map(|p| p.to_string()).collect();
        assert_eq!(one, ["1:[]", "1:[*]", "1:[* *]", "1:[* * *]"]);
        // 2:[] ; 2:[[]] ; 2:[[] []], 2:[[*]]
        assert_eq!(enum_pd(2, 3).len(), 4);
    }

    #[test]
    fn boundaries() {
        assert_eq!(pd("[*,*]").boundary().unwrap(), PastingDiagram::point());
        assert_eq!(pd("2:[[* *] [*]]").boundary().unwrap().to_string(), "1:[* *]");
        for n in 1..5 {
            assert_eq!(PastingDiagram::unit(n).boundary().unwrap(), PastingDiagram::unit(n - 1));
        }
        assert!(PastingDiagram::point().boundary().is_err());
    }

    #[test]
    fn realization_counts() {
        assert_eq!(realize(&pd("1:[]")).dims, vec![1]);
        assert_eq!(realize(&pd("[*,*,*]")).dims, vec![4, 3]);
        assert_eq!(realize(&pd("[[*,*],[*]]")).dims, vec![3, 5, 3]);
        assert_eq!(realize(&PastingDiagram::unit(3)).dims, vec![2, 2, 2, 1]);
    }

    #[test]
    fn grafting() {
        assert_eq!(compose_k(&pd("[*]"), &pd("[*]"), 0).unwrap(), pd("[*,*]"));
        assert_eq!(compose_k(&pd("[[*,*]]"), &pd("[[*]]"), 1).unwrap(), pd("[[*,*,*]]"));
        assert!(compose_k(&pd("[[*,*]]"), &pd("[[*],[*]]"), 1).is_err());
        let p = pd("2:[[* *] [*]]");
        let b = p.boundary().unwrap();
        let unit = PastingDiagram::new(2, Tree(b.tree().0.iter().map(|_| Tree(Vec::new())).collect())).unwrap();
        assert_eq!(compose_k(&p, &unit, 1).unwrap(), p);
    }

    #[test]
    fn flatten_examples() {
        let base = pd("[*,*]");
        let lp = LabelledPasting::new(base.clone(), vec![vec![PastingDiagram::point(); 3], vec![pd("[*]"), pd("1:[]")]]).unwrap();
        assert_eq!(flatten(&lp).unwrap(), pd("[*]"));
        assert_eq!(flatten(&LabelledPasting::units(base.clone())).unwrap(), base);
        let p = pd("2:[[* *] [*]]");
        assert_eq!(flatten(&LabelledPasting::top(p.clone())).unwrap(), p);
    }

    #[test]
    fn embeddings_are_globular_maps() {
        let lp = LabelledPasting::top(pd("2:[[* *] [*]]"));
        let (res, emb) = flatten_with_embeddings(&lp.base, &lp.labels).unwrap();
        let r = realize(&res);
        for (k, row) in emb.iter().enumerate() {
            for (x, m) in row.iter().enumerate() {
                let src = realize(&lp.labels[k][x]);
                for d in 1..m.len() {
                    for (c, &img) in m[d].iter().enumerate() {
                        assert_eq!(r.src[d - 1][img], m[d - 1][src.src[d - 1][c]]);
                        assert_eq!(r.tgt[d - 1][img], m[d - 1][src.tgt[d - 1][c]]);
                    }
                }
            }
        }
    }

    #[test]
    fn el_pd_objects() {
        assert_eq!(el_pd(0, 3).objects().len(), 1);
        let e = el_pd(1, 2);
        let names: Vec<String> = e.objects().iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["0:*", "1:[]", "1:[*]"]);
        let e = el_pd(2, 4);
        for (a, p) in e.objects().iter().enumerate() {
            assert_eq!(e.cat().dim(a), p.dim());
        }
    }
}
