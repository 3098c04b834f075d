use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use globular::chains::{comonad_check, q_replace, ChainComplex, DEFAULT_GEN_CAP};
use globular::collections::{boundary_coincidence, Bounds};
use globular::fincat::{has_rlp, hom_enum};
use globular::globes::{boundary_pushout, globe_category, GlobularSet};
use globular::leinster::{LeinsterOperad, TermBounds};
use globular::operads::{check_operad_laws, LawBudget};
use globular::par;

fn both(c: &mut Criterion, name: &str, mut f: impl FnMut()) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    for on in [false, true] {
        group.bench_function(BenchmarkId::from_parameter(if on { "parallel" } else { "sequential" }), |b| {
            par::set_parallel(on);
            b.iter(&mut f);
        });
    }
    par::set_parallel(true);
    group.finish();
}

fn operad_laws(c: &mut Criterion) {
    let l = LeinsterOperad::new(TermBounds { max_dim: 2, max_nodes: 4, max_size: 4 }).unwrap();
    both(c, "operad_laws", || {
        check_operad_laws(&l, LawBudget { max_weight: Some(6), associativity: true }).unwrap();
    });
}

fn coincidence(c: &mut Criterion) {
    both(c, "boundary_coincidence", || {
        boundary_coincidence(Bounds::new(2, 4)).unwrap();
    });
}

fn comonad(c: &mut Criterion) {
    let q = q_replace(&ChainComplex::module(2, 1).unwrap(), 3, DEFAULT_GEN_CAP).unwrap();
    both(c, "comonad_check", || {
        comonad_check(&q, 3).unwrap();
    });
}

fn lifting(c: &mut Criterion) {
    let g = globe_category(2);
    let (_, iota) = boundary_pushout(&g, 1).unwrap();
    // every endomorphism of a small set with two parallel 2-cells
    let x = GlobularSet::new(vec![2, 4, 2], vec![vec![0, 1, 0, 1], vec![0, 0]], vec![vec![1, 0, 1, 0], vec![2, 2]]).unwrap();
    let x = Arc::new(x.to_presheaf(&g).unwrap());
    let maps = hom_enum(&x, &x);
    both(c, "has_rlp", || {
        for f in &maps {
            has_rlp(&iota, f);
        }
    });
}

criterion_group!(benches, operad_laws, coincidence, comonad, lifting);
criterion_main!(benches);
