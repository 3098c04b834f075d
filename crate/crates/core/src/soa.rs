//! One step of the small object argument for finite presheaves: the squares
//! against a set of generating maps, the pushout factorisation they induce,
//! the lifting/retraction and coalgebra/section characterisations, and
//! bounded iteration.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{
    copair, coproduct, find_map, has_rlp, hom_enum, pushout, search_maps, Components, ObjId, Presheaf, PresheafMap,
    SearchOptions,
};
use crate::par;

pub const DEFAULT_CELL_CAP: usize = 10_000;

/// A commutative square `f∘h = k∘j` from the generator `gens[j]` to `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub j: usize,
    pub h: Components,
    pub k: Components,
}

/// All squares from each generator to `f`, ordered by generator, then by
/// `k`, then by `h`.
pub fn squares(gens: &[PresheafMap], f: &PresheafMap) -> Vec<Square> {
    let idx: Vec<usize> = (0..gens.len()).collect();
    par::flat_map(&idx, |&j| {
        let g = &gens[j];
        let mut out = Vec::new();
        for k in hom_enum(g.cod(), f.cod()) {
            let kc = k.components();
            let test = |a: ObjId, u: usize, w: usize| f.apply(a, w) == kc[a][g.apply(a, u)];
            let opts = SearchOptions { injective: false, allowed: Some(&test) };
            search_maps(g.dom(), f.dom(), &opts, &mut |h| {
                out.push(Square { j, h: h.clone(), k: kc.clone() });
                ControlFlow::Continue(())
            });
        }
        out
    })
}

/// `X --λ′--> K′f --ρ′--> Y` with the squares it was built from.
#[derive(Clone, Debug)]
pub struct OneStep {
    pub squares: Vec<Square>,
    pub lambda: PresheafMap,
    pub rho: PresheafMap,
}

impl OneStep {
    pub fn object(&self) -> &Arc<Presheaf> {
        self.lambda.cod()
    }
}

/// Attaches one copy of `cod j` along `h` for every square `(j, h, k)`.
pub fn one_step(gens: &[PresheafMap], f: &PresheafMap) -> Result<OneStep> {
    let sq = squares(gens, f);
    if sq.is_empty() {
        return Ok(OneStep { squares: sq, lambda: PresheafMap::identity(f.dom().clone()), rho: f.clone() });
    }
    let cat = f.dom().category().clone();
    let doms: Vec<Arc<Presheaf>> = sq.iter().map(|s| gens[s.j].dom().clone()).collect();
    let cods: Vec<Arc<Presheaf>> = sq.iter().map(|s| gens[s.j].cod().clone()).collect();
    let (a, _) = coproduct(&cat, &doms)?;
    let (b, inj) = coproduct(&cat, &cods)?;
    let legs = sq.iter().zip(&inj).map(|(s, i)| gens[s.j].then(i)).collect::<Result<Vec<_>>>()?;
    let sum_j = copair(&a, &b, &legs)?;
    let hs = sq
        .iter()
        .map(|s| PresheafMap::new(gens[s.j].dom().clone(), f.dom().clone(), s.h.clone()))
        .collect::<Result<Vec<_>>>()?;
    let sum_h = copair(&a, f.dom(), &hs)?;
    let ks = sq
        .iter()
        .map(|s| PresheafMap::new(gens[s.j].cod().clone(), f.cod().clone(), s.k.clone()))
        .collect::<Result<Vec<_>>>()?;
    let sum_k = copair(&b, f.cod(), &ks)?;
    let po = pushout(&sum_j, &sum_h)?;
    let rho = po.induced(&sum_k, f)?;
    let lambda = po.inr;
    if lambda.then(&rho)?.components() != f.components() {
        return Err(Error::BadMap("one-step factorisation does not recompose".into()));
    }
    Ok(OneStep { squares: sq, lambda, rho })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RetractionReport {
    /// `f` lifts against every generator.
    pub rlp: bool,
    /// `(r, id): Λ′f → f` exists with `r∘λ′ = id` and `f∘r = ρ′`.
    pub retract: bool,
}

impl RetractionReport {
    pub fn agree(&self) -> bool {
        self.rlp == self.retract
    }
}

/// A map `s: V → W` with `s∘i = along` and `p∘s = target`, if one exists.
fn constrained_map(i: &PresheafMap, along: &PresheafMap, p: &PresheafMap, target: &PresheafMap) -> Option<Components> {
    let v = i.cod();
    let n = v.category().num_objects();
    let mut required: Vec<Vec<Option<usize>>> = (0..n).map(|a| vec![None; v.count(a)]).collect();
    for a in 0..n {
        for u in 0..i.dom().count(a) {
            let (c, w) = (i.apply(a, u), along.apply(a, u));
            match required[a][c] {
                Some(r) if r != w => return None,
                _ => required[a][c] = Some(w),
            }
        }
    }
    let test = |a: ObjId, c: usize, w: usize| p.apply(a, w) == target.apply(a, c) && required[a][c].is_none_or(|r| r == w);
    find_map(v, p.dom(), &SearchOptions { injective: false, allowed: Some(&test) })
}

pub fn retraction_equiv(gens: &[PresheafMap], f: &PresheafMap) -> Result<RetractionReport> {
    let rlp = gens.iter().all(|j| has_rlp(j, f).holds());
    let step = one_step(gens, f)?;
    let id = PresheafMap::identity(f.dom().clone());
    let retract = constrained_map(&step.lambda, &id, f, &step.rho).is_some();
    Ok(RetractionReport { rlp, retract })
}

/// Whether the counit `(id, ρ′): λ′_i → i` has a section `(id, s)`, that is
/// `s: cod i → K′i` with `s∘i = λ′` and `ρ′∘s = id`.
pub fn section_check(i: &PresheafMap, step: &OneStep) -> bool {
    let id = PresheafMap::identity(i.cod().clone());
    constrained_map(i, &step.lambda, &step.rho, &id).is_some()
}

/// The factorisations of `f`, of `ρ′f`, of `ρ′ρ′f`, and so on.
#[derive(Clone, Debug)]
pub struct Iteration {
    pub stages: Vec<OneStep>,
    /// Set when the cell cap stopped the iteration early.
    pub limit: Option<String>,
}

pub fn iterate(gens: &[PresheafMap], f: &PresheafMap, steps: usize, cell_cap: usize) -> Result<Iteration> {
    let mut stages: Vec<OneStep> = Vec::new();
    let mut current = f.clone();
    for s in 0..steps {
        let step = one_step(gens, &current)?;
        let cells = step.object().total_cells();
        current = step.rho.clone();
        stages.push(step);
        if cells > cell_cap && s + 1 < steps {
            let msg = Error::ResourceLimit(format!("stage {} has {cells} cells, cap {cell_cap}", s + 1)).to_string();
            return Ok(Iteration { stages, limit: Some(msg) });
        }
    }
    Ok(Iteration { stages, limit: None })
}

/// Every square against `prev.rho` becomes fillable against `next.rho` once
/// its top is pushed along `next.lambda`.
pub fn stage_fills(gens: &[PresheafMap], prev: &OneStep, next: &OneStep) -> Result<bool> {
    for s in &next.squares {
        let j = &gens[s.j];
        let h = PresheafMap::new(j.dom().clone(), prev.object().clone(), s.h.clone())?.then(&next.lambda)?;
        let k = PresheafMap::new(j.cod().clone(), next.rho.cod().clone(), s.k.clone())?;
        if constrained_map(j, &h, &next.rho, &k).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}
