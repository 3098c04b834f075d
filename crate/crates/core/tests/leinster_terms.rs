use std::collections::HashMap;

use globular::leinster::*;
use globular::pasting::PastingDiagram;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// The equivalence generated by single rewrite steps, closed over every term
/// reachable from the raw terms of size at most 4.
#[test]
fn normal_forms_agree_with_rewrite_closure() {
    let b = TermBounds { max_dim: 2, max_nodes: 3, max_size: 4 };
    let raw = enum_raw(&b).unwrap();
    assert!(raw.len() > 50, "{}", raw.len());
    let mut ids: HashMap<LTerm, usize> = HashMap::new();
    let mut terms: Vec<LTerm> = Vec::new();
    let mut edges = Vec::new();
    for t in &raw {
        ids.entry(t.clone()).or_insert_with(|| {
            terms.push(t.clone());
            terms.len() - 1
        });
    }
    let mut i = 0;
    while i < terms.len() {
        let t = terms[i].clone();
        for r in rewrites(&t).unwrap() {
            let j = *ids.entry(r.clone()).or_insert_with(|| {
                terms.push(r);
                terms.len() - 1
            });
            edges.push((i, j));
        }
        i += 1;
        assert!(terms.len() < 200_000, "rewriting does not terminate");
    }
    let mut dsu = Dsu((0..terms.len()).collect());
    for (a, c) in edges {
        dsu.union(a, c);
    }
    let nfs: Vec<LTerm> = raw.iter().map(|t| normalize(t).unwrap()).collect();
    for (x, s) in raw.iter().enumerate() {
        // irreducible terms are exactly the normal forms
        let irreducible = rewrites(s).unwrap().is_empty();
        assert_eq!(irreducible, s.is_normal(), "{s}");
        for (y, t) in raw.iter().enumerate().skip(x + 1) {
            let closure = dsu.find(ids[s]) == dsu.find(ids[t]);
            assert_eq!(closure, nfs[x] == nfs[y], "{s} vs {t}");
        }
    }
}

#[test]
fn normalisation_preserves_boundaries() {
    let b = TermBounds { max_dim: 2, max_nodes: 3, max_size: 4 };
    for t in enum_raw(&b).unwrap() {
        let n = normalize(&t).unwrap();
        assert_eq!(normalize(&n).unwrap(), n);
        assert_eq!(n.arity().unwrap(), t.arity().unwrap());
        if t.dim() > 0 {
            assert_eq!(src(&t).unwrap(), src(&n).unwrap());
            assert_eq!(tgt(&t).unwrap(), tgt(&n).unwrap());
            assert_eq!(src(&t).unwrap().arity().unwrap(), t.arity().unwrap().boundary().unwrap());
        }
    }
}

/// Brute force: normal forms of arity `[* *]` and size at most 4 are the
/// normalised raw terms of that arity.
#[test]
fn enumeration_matches_normalised_raw_terms() {
    let pi: PastingDiagram = "1:[* *]".parse().unwrap();
    for max_size in 1..=4 {
        let b = TermBounds::for_arity(&pi, max_size);
        let mut want: Vec<LTerm> = enum_raw(&b)
            .unwrap()
            .iter()
            .filter(|t| t.arity().unwrap() == pi)
            .map(|t| normalize(t).unwrap())
            .filter(|t| t.size() <= max_size)
            .collect();
        canonical_sort(&mut want);
        want.dedup();
        assert_eq!(enum_terms(&pi, max_size).unwrap(), want, "max size {max_size}");
    }
    assert_eq!(enum_terms(&pi, 2).unwrap().len(), 1);
}

fn model() -> &'static LeinsterOperad {
    use std::sync::OnceLock;
    static L: OnceLock<LeinsterOperad> = OnceLock::new();
    L.get_or_init(|| LeinsterOperad::new(TermBounds { max_dim: 3, max_nodes: 3, max_size: 3 }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_terms_are_globular(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_term(model(), 2, &mut rng);
        let n = normalize(&t).unwrap();
        prop_assert_eq!(normalize(&n).unwrap(), n.clone());
        prop_assert_eq!(n.arity().unwrap(), t.arity().unwrap());
        if t.dim() >= 2 {
            prop_assert!(term_eq(&src(&src(&t).unwrap()).unwrap(), &src(&tgt(&t).unwrap()).unwrap()).unwrap());
            prop_assert!(term_eq(&tgt(&src(&t).unwrap()).unwrap(), &tgt(&tgt(&t).unwrap()).unwrap()).unwrap());
        }
        prop_assert_eq!(t.to_string().parse::<LTerm>().unwrap(), t);
    }
}
