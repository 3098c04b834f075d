//! The globe category truncated at dimension `N`, globular sets, suspension,
//! and the explicit pushout description of the boundaries `∂y(n)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{
    coproduct, copair, pushout, representable, yoneda_map, FiniteDirectCategory, MorId, Morphism, Presheaf,
    PresheafMap,
};

pub const DEFAULT_TRUNCATION: usize = 4;

/// `𝔾` truncated at `N`: objects `0..=N`, and for `k < n` exactly two
/// morphisms `s: k → n`, `t: k → n` named after their first step.
#[derive(Clone, Debug)]
pub struct GlobeCategory {
    top: usize,
    cat: Arc<FiniteDirectCategory>,
}

fn user_index(k: usize, n: usize, target: bool) -> usize {
    // morphisms listed by codomain, then domain, then s before t
    n * (n - 1) + 2 * k + target as usize
}

pub fn globe_category(top: usize) -> GlobeCategory {
    let objects = (0..=top).map(|n| (n.to_string(), n)).collect();
    let mut morphisms = Vec::new();
    let mut kinds = Vec::new();
    for n in 1..=top {
        for k in 0..n {
            for (target, letter) in [(false, 's'), (true, 't')] {
                morphisms.push(Morphism { name: format!("{letter}{k}_{n}"), src: k, tgt: n });
                kinds.push((k, target));
            }
        }
    }
    let tgts: Vec<usize> = morphisms.iter().map(|m| m.tgt).collect();
    // A composite k → m → n is determined by its first step.
    let compose = |g: usize, f: usize| {
        let (k, target) = kinds[f];
        user_index(k, tgts[g], target)
    };
    let cat = FiniteDirectCategory::new(format!("globe{top}"), objects, morphisms, compose)
        .expect("globe category is well formed");
    GlobeCategory { top, cat: Arc::new(cat) }
}

impl GlobeCategory {
    pub fn top(&self) -> usize {
        self.top
    }

    pub fn cat(&self) -> &Arc<FiniteDirectCategory> {
        &self.cat
    }

    /// Iterated source `k → n`.
    pub fn sigma(&self, k: usize, n: usize) -> MorId {
        self.cat.num_objects() + user_index(k, n, false)
    }

    /// Iterated target `k → n`.
    pub fn tau(&self, k: usize, n: usize) -> MorId {
        self.cat.num_objects() + user_index(k, n, true)
    }

    pub fn representable(&self, n: usize) -> Result<Presheaf> {
        if n > self.top {
            return Err(Error::Truncation { dim: n, max: self.top });
        }
        representable(&self.cat, n)
    }
}

/// A finite globular set in explicit form: `src[k]`, `tgt[k]` send
/// `(k+1)`-cells to `k`-cells. Trailing empty dimensions are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobularSet {
    pub dims: Vec<usize>,
    pub src: Vec<Vec<usize>>,
    pub tgt: Vec<Vec<usize>>,
}

impl GlobularSet {
    pub fn new(dims: Vec<usize>, src: Vec<Vec<usize>>, tgt: Vec<Vec<usize>>) -> Result<Self> {
        let x = GlobularSet { dims, src, tgt };
        x.validate()?;
        Ok(x.trimmed())
    }

    pub fn empty() -> Self {
        GlobularSet { dims: Vec::new(), src: Vec::new(), tgt: Vec::new() }
    }

    pub fn point() -> Self {
        GlobularSet { dims: vec![1], src: Vec::new(), tgt: Vec::new() }
    }

    fn trimmed(mut self) -> Self {
        while self.dims.last() == Some(&0) {
            self.dims.pop();
        }
        let len = self.dims.len().saturating_sub(1);
        self.src.truncate(len);
        self.tgt.truncate(len);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadPresheaf(m.to_string()));
        let need = self.dims.len().saturating_sub(1);
        if self.src.len() < need || self.tgt.len() < need {
            return bad("missing source or target table");
        }
        for k in 0..need {
            for table in [&self.src[k], &self.tgt[k]] {
                if table.len() != self.dims[k + 1] || table.iter().any(|&c| c >= self.dims[k]) {
                    return bad(&format!("source/target table {k} out of range"));
                }
            }
        }
        for k in 1..need {
            for x in 0..self.dims[k + 1] {
                let (s, t) = (self.src[k][x], self.tgt[k][x]);
                if self.src[k - 1][s] != self.src[k - 1][t] || self.tgt[k - 1][s] != self.tgt[k - 1][t] {
                    return bad(&format!("globularity fails at cell {x} of dimension {}", k + 1));
                }
            }
        }
        Ok(())
    }

    /// Highest dimension with a cell, if any.
    pub fn top_dim(&self) -> Option<usize> {
        self.dims.len().checked_sub(1)
    }

    pub fn count(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn total_cells(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn to_presheaf(&self, g: &GlobeCategory) -> Result<Presheaf> {
        if let Some(d) = self.top_dim() {
            if d > g.top() {
                return Err(Error::Truncation { dim: d, max: g.top() });
            }
        }
        let counts = (0..=g.top()).map(|k| self.count(k)).collect();
        let mut gens = HashMap::new();
        for k in 0..g.top() {
            let (s, t) = if k + 1 < self.dims.len() {
                (self.src[k].clone(), self.tgt[k].clone())
            } else {
                (Vec::new(), Vec::new())
            };
            gens.insert(g.sigma(k, k + 1), s);
            gens.insert(g.tau(k, k + 1), t);
        }
        Presheaf::from_generators(g.cat().clone(), counts, &gens)
    }

    /// Reads back a presheaf over a truncated globe category.
    pub fn from_presheaf(g: &GlobeCategory, x: &Presheaf) -> Self {
        let dims: Vec<usize> = (0..=g.top()).map(|k| x.count(k)).collect();
        let src = (0..g.top()).map(|k| x.action(g.sigma(k, k + 1)).to_vec()).collect();
        let tgt = (0..g.top()).map(|k| x.action(g.tau(k, k + 1)).to_vec()).collect();
        GlobularSet { dims, src, tgt }.trimmed()
    }
}

/// `ΣX`: two new 0-cells `−, +`; every `k`-cell becomes a `(k+1)`-cell, the
/// old 0-cells running from `−` to `+`.
pub fn suspension(x: &GlobularSet, top: usize) -> Result<GlobularSet> {
    if let Some(d) = x.top_dim() {
        if d + 1 > top {
            return Err(Error::Truncation { dim: d + 1, max: top });
        }
    }
    let mut dims = vec![2];
    dims.extend(x.dims.iter().copied());
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    if !x.dims.is_empty() {
        src.push(vec![0; x.dims[0]]);
        tgt.push(vec![1; x.dims[0]]);
        src.extend(x.src.iter().cloned());
        tgt.extend(x.tgt.iter().cloned());
    }
    GlobularSet::new(dims, src, tgt)
}

/// `∂y(n)` and `ι(n)` built by the recursion through pushouts of
/// `[y(σ), y(τ)]` against itself.
pub fn boundary_pushout(g: &GlobeCategory, n: usize) -> Result<(Presheaf, PresheafMap)> {
    if n > g.top() {
        return Err(Error::Truncation { dim: n, max: g.top() });
    }
    let cat = g.cat();
    let y = |k: usize| g.representable(k).map(Arc::new);
    let yn = y(n)?;
    if n == 0 {
        let iota = PresheafMap::from_empty(yn);
        return Ok(((**iota.dom()).clone(), iota));
    }
    let m = n - 1;
    let ym = y(m)?;
    let ym1 = if n >= 2 { y(n - 2)? } else { ym.clone() };
    if n == 1 {
        let (sum, _) = coproduct(cat, &[ym.clone(), ym.clone()])?;
        let iota = copair(&sum, &yn, &[yoneda_map(&ym, &yn, g.sigma(0, 1))?, yoneda_map(&ym, &yn, g.tau(0, 1))?])?;
        return Ok(((*sum).clone(), iota));
    }
    let k = n - 2;
    let (sum, _) = coproduct(cat, &[ym1.clone(), ym1.clone()])?;
    let leg = copair(
        &sum,
        &ym,
        &[yoneda_map(&ym1, &ym, g.sigma(k, m))?, yoneda_map(&ym1, &ym, g.tau(k, m))?],
    )?;
    let po = pushout(&leg, &leg)?;
    let iota = po.induced(&yoneda_map(&ym, &yn, g.sigma(m, n))?, &yoneda_map(&ym, &yn, g.tau(m, n))?)?;
    Ok(((*po.object).clone(), iota))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{boundary, iso_check};

    #[test]
    fn hom_sizes() {
        let g = globe_category(3);
        let c = g.cat();
        assert_eq!(globe_category(0).cat().morphisms().len(), 1);
        for k in 0..=3 {
            for n in 0..=3 {
                let expected = if k < n { 2 } else if k == n { 1 } else { 0 };
                assert_eq!(c.hom(k, n).len(), expected, "hom({k},{n})");
            }
        }
        // coglobularity
        for n in 0..2 {
            assert_eq!(c.compose(g.sigma(n + 1, n + 2), g.sigma(n, n + 1)), c.compose(g.tau(n + 1, n + 2), g.sigma(n, n + 1)));
            assert_eq!(c.compose(g.sigma(n + 1, n + 2), g.tau(n, n + 1)), c.compose(g.tau(n + 1, n + 2), g.tau(n, n + 1)));
        }
    }

    #[test]
    fn pushout_boundaries_match_coends() {
        let g = globe_category(4);
        let counts = [vec![0, 0, 0, 0, 0], vec![2, 0, 0, 0, 0], vec![2, 2, 0, 0, 0], vec![2, 2, 2, 0, 0], vec![2, 2, 2, 2, 0]];
        for n in 0..=4 {
            let (bp, ip) = boundary_pushout(&g, n).unwrap();
            let (_, ic) = boundary(g.cat(), n).unwrap();
            assert_eq!(bp.counts(), &counts[n][..]);
            assert!(iso_check(ip.dom(), ic.dom()).is_some());
            // the two ι agree under some isomorphism
            let agree = |phi: &PresheafMap| phi.then(&ic).unwrap().components() == ip.components();
            assert!(crate::fincat::hom_enum(ip.dom(), ic.dom()).iter().any(|m| m.is_injective() && agree(m)));
            assert!(ip.is_injective());
        }
        assert!(boundary_pushout(&g, 5).is_err());
    }

    #[test]
    fn suspension_shapes() {
        let s = suspension(&GlobularSet::point(), 2).unwrap();
        assert_eq!(s.dims, vec![2, 1]);
        assert_eq!((s.src[0][0], s.tgt[0][0]), (0, 1));
        assert_eq!(suspension(&GlobularSet::empty(), 2).unwrap().dims, vec![2]);
        let chain = GlobularSet::new(vec![3, 2], vec![vec![0, 1]], vec![vec![1, 2]]).unwrap();
        assert_eq!(suspension(&chain, 2).unwrap().dims, vec![2, 3, 2]);
        assert!(suspension(&chain, 1).is_err());
    }

    #[test]
    fn presheaf_round_trip() {
        let g = globe_category(3);
        let x = GlobularSet::new(vec![2, 2, 1], vec![vec![0, 0], vec![0]], vec![vec![1, 1], vec![1]]).unwrap();
        let p = x.to_presheaf(&g).unwrap();
        assert_eq!(GlobularSet::from_presheaf(&g, &p), x);
        let nonglob = GlobularSet::new(vec![2, 2, 1], vec![vec![0, 0], vec![0]], vec![vec![1, 0], vec![1]]);
        assert!(nonglob.is_err());
    }
}
