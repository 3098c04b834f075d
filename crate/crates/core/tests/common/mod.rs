#![allow(dead_code)]

use std::collections::HashSet;

use globular::globes::GlobularSet;

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Least relabelling of `x` under all permutations of its cells.
fn canonical(x: &GlobularSet) -> (Vec<usize>, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let d = |k: usize| x.dims.get(k).copied().unwrap_or(0);
    let top = x.src.len();
    let mut best: Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> = None;
    let per: Vec<Vec<Vec<usize>>> = (0..=top).map(|k| perms(d(k))).collect();
    let mut idx = vec![0; top + 1];
    loop {
        let ps: Vec<&Vec<usize>> = (0..=top).map(|k| &per[k][idx[k]]).collect();
        let (mut src, mut tgt) = (Vec::new(), Vec::new());
        for k in 0..top {
            let (mut s, mut t) = (vec![0; d(k + 1)], vec![0; d(k + 1)]);
            for c in 0..d(k + 1) {
                s[ps[k + 1][c]] = ps[k][x.src[k][c]];
                t[ps[k + 1][c]] = ps[k][x.tgt[k][c]];
            }
            src.push(s);
            tgt.push(t);
        }
        let cand = (src, tgt);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        let mut k = 0;
        loop {
            if k > top {
                let (src, tgt) = best.expect("at least one permutation");
                return (x.dims.clone(), src, tgt);
            }
            idx[k] += 1;
            if idx[k] < per[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn choices<T: Clone>(pool: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| pool.iter().map(move |x| [v.clone(), vec![x.clone()]].concat())).collect();
    }
    out
}

/// One globular set per isomorphism class among those of dimension ≤ 2
/// with at most `max` cells in each dimension.
pub fn globular_sets(max: usize) -> Vec<GlobularSet> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=if a == 0 { 0 } else { max } {
            for c in 0..=if b == 0 { 0 } else { max } {
                let ends: Vec<(usize, usize)> = (0..a).flat_map(|s| (0..a).map(move |t| (s, t))).collect();
                for es in choices(&ends, b) {
                    let pairs: Vec<(usize, usize)> =
                        (0..b).flat_map(|s| (0..b).map(move |t| (s, t))).filter(|&(s, t)| es[s] == es[t]).collect();
                    for cs in choices(&pairs, c) {
                        let src = vec![es.iter().map(|p| p.0).collect(), cs.iter().map(|p| p.0).collect()];
                        let tgt = vec![es.iter().map(|p| p.1).collect(), cs.iter().map(|p| p.1).collect()];
                        let x = GlobularSet::new(vec![a, b, c], src, tgt).expect("globular by construction");
                        if seen.insert(canonical(&x)) {
                            out.push(x);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Largest number of cells in any dimension.
pub fn width(x: &GlobularSet) -> usize {
    x.dims.iter().copied().max().unwrap_or(0)
}
