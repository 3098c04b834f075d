//! JSON file formats for every on-disk value, and canonical round trips.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chains::ChainComplex;
use crate::collections::{parallel_pairs, Bounds, Collection, Contraction, PdUniverse};
use crate::error::{Error, Result};
use crate::fincat::{FiniteDirectCategory, Presheaf, PresheafMap};
use crate::globes::{globe_category, GlobularSet};
use crate::leinster::LTerm;
use crate::operads::{for_each_labelling, CollOp, CompRule, FiniteOwc, GlobularOperad, Pool};
use crate::pasting::{el_pd, LabelledPasting, PastingDiagram};

fn json_err(e: serde_json::Error) -> Error {
    Error::parse(e.line(), e.column(), e.to_string())
}

fn from_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(json_err)
}

fn to_string<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

/// Resolves `globe<N>` and `elpd<N>_<K>`.
pub fn category_by_name(name: &str) -> Result<Arc<FiniteDirectCategory>> {
    if let Some(n) = name.strip_prefix("globe").and_then(|n| n.parse().ok()) {
        return Ok(globe_category(n).cat().clone());
    }
    if let Some((n, k)) = name.strip_prefix("elpd").and_then(|r| r.split_once('_')) {
        if let (Ok(n), Ok(k)) = (n.parse(), k.parse()) {
            return Ok(el_pd(n, k).cat().clone());
        }
    }
    Err(Error::UnknownObject(format!("category {name}")))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresheafFile {
    category: String,
    cells: BTreeMap<String, usize>,
    actions: BTreeMap<String, Vec<usize>>,
}

pub fn presheaf_to_json(x: &Presheaf) -> String {
    let cat = x.category();
    let cells = (0..cat.num_objects()).map(|a| (cat.object_name(a).to_string(), x.count(a))).collect();
    let actions = cat.generators().iter().map(|&m| (cat.morphism(m).name.clone(), x.action(m).to_vec())).collect();
    to_string(&PresheafFile { category: cat.name().to_string(), cells, actions })
}

pub fn presheaf_from_json(s: &str) -> Result<Presheaf> {
    presheaf_from_file(from_str(s)?)
}

fn presheaf_file(x: &Presheaf) -> PresheafFile {
    from_str(&presheaf_to_json(x)).expect("own output parses")
}

fn presheaf_from_file(f: PresheafFile) -> Result<Presheaf> {
    let cat = category_by_name(&f.category)?;
    let mut counts = vec![0; cat.num_objects()];
    for (name, &n) in &f.cells {
        counts[cat.object_by_name(name)?] = n;
    }
    let mut gens = HashMap::new();
    for (name, act) in f.actions {
        let m = cat.morphism_by_name(&name).ok_or_else(|| Error::UnknownObject(format!("morphism {name}")))?;
        gens.insert(m, act);
    }
    Presheaf::from_generators(cat, counts, &gens)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    components: BTreeMap<String, Vec<usize>>,
}

pub fn map_to_json(f: &PresheafMap) -> String {
    let cat = f.dom().category();
    let components = f.components().iter().enumerate().map(|(a, c)| (cat.object_name(a).to_string(), c.clone())).collect();
    to_string(&MapFile { components })
}

pub fn map_from_json(dom: Arc<Presheaf>, cod: Arc<Presheaf>, s: &str) -> Result<PresheafMap> {
    let f: MapFile = from_str(s)?;
    let cat = dom.category().clone();
    let mut comps = vec![Vec::new(); cat.num_objects()];
    for (name, c) in f.components {
        comps[cat.object_by_name(&name)?] = c;
    }
    PresheafMap::new(dom, cod, comps)
}

/// A map together with its domain and codomain.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowFile {
    dom: PresheafFile,
    cod: PresheafFile,
    components: BTreeMap<String, Vec<usize>>,
}

pub fn arrow_to_json(f: &PresheafMap) -> String {
    let m: MapFile = from_str(&map_to_json(f)).expect("own output parses");
    to_string(&ArrowFile { dom: presheaf_file(f.dom()), cod: presheaf_file(f.cod()), components: m.components })
}

pub fn arrow_from_json(s: &str) -> Result<PresheafMap> {
    let f: ArrowFile = from_str(s)?;
    let dom = Arc::new(presheaf_from_file(f.dom)?);
    let cod = Arc::new(presheaf_from_file(f.cod)?);
    map_from_json(dom, cod, &to_string(&MapFile { components: f.components }))
}

pub fn globular_set_to_json(x: &GlobularSet) -> String {
    to_string(x)
}

pub fn globular_set_from_json(s: &str) -> Result<GlobularSet> {
    let x: GlobularSet = from_str(s)?;
    GlobularSet::new(x.dims, x.src, x.tgt)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelledFile {
    base: String,
    labels: Vec<Vec<String>>,
}

fn pd(s: &str) -> Result<PastingDiagram> {
    s.parse()
}

pub fn labelled_to_json(lp: &LabelledPasting) -> String {
    let labels = lp.labels.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    to_string(&LabelledFile { base: lp.base.to_string(), labels })
}

pub fn labelled_from_json(s: &str) -> Result<LabelledPasting> {
    let f: LabelledFile = from_str(s)?;
    let labels = f.labels.iter().map(|r| r.iter().map(|l| pd(l)).collect()).collect::<Result<_>>()?;
    LabelledPasting::new(pd(&f.base)?, labels)
}

#[derive(Serialize, Deserialize)]
struct CollectionFields {
    bounds: [usize; 2],
    ops: BTreeMap<String, usize>,
    src: BTreeMap<String, Vec<usize>>,
    tgt: BTreeMap<String, Vec<usize>>,
}

fn collection_fields(c: &Collection) -> CollectionFields {
    let u = c.universe();
    let b = u.bounds();
    let mut f = CollectionFields { bounds: [b.max_dim, b.max_nodes], ops: BTreeMap::new(), src: BTreeMap::new(), tgt: BTreeMap::new() };
    for (i, p) in u.pds().iter().enumerate() {
        f.ops.insert(p.to_string(), c.size(i));
        if p.dim() > 0 {
            f.src.insert(p.to_string(), c.src_table()[i].clone());
            f.tgt.insert(p.to_string(), c.tgt_table()[i].clone());
        }
    }
    f
}

fn collection_from_fields(f: &CollectionFields) -> Result<Collection> {
    let u = PdUniverse::new(Bounds::new(f.bounds[0], f.bounds[1]));
    let n = u.len();
    let (mut sizes, mut src, mut tgt) = (vec![0; n], vec![Vec::new(); n], vec![Vec::new(); n]);
    let idx = |k: &str| -> Result<usize> { u.index(&pd(k)?) };
    for (k, &m) in &f.ops {
        sizes[idx(k)?] = m;
    }
    for (k, v) in &f.src {
        src[idx(k)?] = v.clone();
    }
    for (k, v) in &f.tgt {
        tgt[idx(k)?] = v.clone();
    }
    Collection::new(u.clone(), sizes, src, tgt)
}

pub fn collection_to_json(c: &Collection) -> String {
    to_string(&collection_fields(c))
}

pub fn collection_from_json(s: &str) -> Result<Collection> {
    let f: CollectionFields = from_str(s)?;
    collection_from_fields(&f)
}

/// `{"<pd>": [value per parallel pair]}` over the diagrams of dimension ≥ 1.
fn contraction_fields(c: &Collection, k: &Contraction) -> BTreeMap<String, Vec<usize>> {
    c.universe()
        .pds()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dim() > 0)
        .map(|(i, p)| (p.to_string(), k.kappa[i].clone()))
        .collect()
}

fn contraction_from_fields(c: &Collection, f: &BTreeMap<String, Vec<usize>>) -> Result<Contraction> {
    let u = c.universe();
    let mut kappa = vec![Vec::new(); u.len()];
    for (k, v) in f {
        kappa[u.index(&pd(k)?)?] = v.clone();
    }
    for (i, p) in u.pds().iter().enumerate() {
        if p.dim() > 0 && kappa[i].len() != parallel_pairs(c, i)?.len() {
            return Err(Error::Collection(format!("contraction at {p} needs one value per parallel pair")));
        }
    }
    Ok(Contraction { kappa })
}

pub fn contraction_to_json(c: &Collection, k: &Contraction) -> String {
    to_string(&contraction_fields(c, k))
}

pub fn contraction_from_json(c: &Collection, s: &str) -> Result<Contraction> {
    contraction_from_fields(c, &from_str(s)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OwcFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(flatten)]
    coll: CollectionFields,
    unit: BTreeMap<String, usize>,
    comp: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kappa: Option<BTreeMap<String, Vec<usize>>>,
}

/// Every defined composite `[θ, labels…, result]` over global element ids,
/// sorted.
pub fn tabulate_comp(o: &FiniteOwc) -> Result<Vec<Vec<usize>>> {
    let pool = Pool::new(o)?;
    let b = o.bounds();
    let mut rows = Vec::new();
    let mut err = None;
    for k in 0..=b.max_dim {
        for theta in pool.of_dim(k) {
            let rho = o.collection().universe().pds()[theta.pi].clone();
            for_each_labelling(o, &pool, &rho, None, &mut |labels| match o.comp(theta, labels) {
                Ok(out) => {
                    let mut row = vec![o.op_id(theta)];
                    row.extend(labels.iter().flatten().map(|l| o.op_id(l)));
                    row.push(o.op_id(&out));
                    rows.push(row);
                    ControlFlow::Continue(())
                }
                Err(Error::OutOfBounds(_)) => ControlFlow::Continue(()),
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
            });
            if let Some(e) = err.take() {
                return Err(e);
            }
        }
    }
    rows.sort();
    Ok(rows)
}

pub fn owc_to_json(o: &FiniteOwc) -> Result<String> {
    let c = o.collection();
    let unit = o.units().iter().enumerate().map(|(n, &e)| (n.to_string(), e)).collect();
    let file = OwcFile {
        name: Some(o.name.clone()),
        coll: collection_fields(c),
        unit,
        comp: tabulate_comp(o)?,
        kappa: o.contraction().map(|k| contraction_fields(c, k)),
    };
    Ok(to_string(&file))
}

pub fn owc_from_json(s: &str) -> Result<FiniteOwc> {
    let f: OwcFile = from_str(s)?;
    let c = collection_from_fields(&f.coll)?;
    let mut units = vec![usize::MAX; c.bounds().max_dim + 1];
    for (k, &e) in &f.unit {
        let n: usize = k.parse().map_err(|_| Error::Operad(format!("unit key {k} is not a dimension")))?;
        *units.get_mut(n).ok_or_else(|| Error::Operad(format!("unit in dimension {n} is out of bounds")))? = e;
    }
    if units.contains(&usize::MAX) {
        return Err(Error::Operad("one unit per dimension is required".into()));
    }
    let mut table = HashMap::new();
    for row in &f.comp {
        let (out, key) = row.split_last().ok_or_else(|| Error::Operad("empty composition row".into()))?;
        if table.insert(key.to_vec(), *out).is_some_and(|o| o != *out) {
            return Err(Error::Operad(format!("conflicting composition rows for {key:?}")));
        }
    }
    let kappa = f.kappa.as_ref().map(|k| contraction_from_fields(&c, k)).transpose()?;
    let o = FiniteOwc::new(f.name.unwrap_or_else(|| "file".into()), c, units, CompRule::Table(table), kappa)?;
    // rows must be well formed against the collection
    for row in &f.comp {
        let theta = o.op_from_id(row[0])?;
        let ids = &row[1..row.len() - 1];
        let rho = &o.collection().universe().pds()[theta.pi];
        let mut labels: Vec<Vec<CollOp>> = Vec::new();
        let mut it = ids.iter();
        for &n in &rho.cell_counts() {
            labels.push(it.by_ref().take(n).map(|&g| o.op_from_id(g)).collect::<Result<_>>()?);
        }
        if it.next().is_some() || labels.iter().zip(rho.cell_counts()).any(|(l, n)| l.len() != n) {
            return Err(Error::Operad(format!("composition row {row:?} does not match its arity")));
        }
        o.comp(&theta, &labels)?;
    }
    Ok(o)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    p: u32,
    ranks: Vec<usize>,
    d: Vec<Vec<Vec<u32>>>,
}

pub fn chain_to_json(x: &ChainComplex) -> String {
    to_string(&ChainFile { p: x.p(), ranks: x.ranks().to_vec(), d: x.diffs_as_rows() })
}

pub fn chain_from_json(s: &str) -> Result<ChainComplex> {
    let f: ChainFile = from_str(s)?;
    ChainComplex::from_rows(f.p, f.ranks, &f.d)
}

/// The kind of value a file holds, told apart by its keys or, for a single
/// line of text, by its syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Presheaf,
    Map,
    Arrow,
    GlobularSet,
    Labelled,
    Collection,
    Owc,
    Chain,
    Pd,
    Term,
}

pub fn detect(s: &str) -> Result<Kind> {
    let t = s.trim();
    if !t.starts_with('{') {
        return Ok(if t.parse::<PastingDiagram>().is_ok() { Kind::Pd } else { Kind::Term });
    }
    let v: Value = from_str(t)?;
    let has = |k: &str| v.get(k).is_some();
    Ok(if has("category") {
        Kind::Presheaf
    } else if has("components") && has("dom") {
        Kind::Arrow
    } else if has("components") {
        Kind::Map
    } else if has("dims") {
        Kind::GlobularSet
    } else if has("base") {
        Kind::Labelled
    } else if has("comp") || has("unit") {
        Kind::Owc
    } else if has("bounds") {
        Kind::Collection
    } else if has("ranks") {
        Kind::Chain
    } else {
        return Err(Error::parse(1, 1, "unrecognised file format"));
    })
}

/// Parses and re-serialises in canonical form.
pub fn canonicalize(s: &str) -> Result<(Kind, String)> {
    let kind = detect(s)?;
    let out = match kind {
        Kind::Presheaf => presheaf_to_json(&presheaf_from_json(s)?),
        Kind::Map => to_string(&from_str::<MapFile>(s)?),
        Kind::Arrow => arrow_to_json(&arrow_from_json(s)?),
        Kind::GlobularSet => globular_set_to_json(&globular_set_from_json(s)?),
        Kind::Labelled => labelled_to_json(&labelled_from_json(s)?),
        Kind::Collection => collection_to_json(&collection_from_json(s)?),
        Kind::Owc => owc_to_json(&owc_from_json(s)?)?,
        Kind::Chain => chain_to_json(&chain_from_json(s)?),
        Kind::Pd => s.trim().parse::<PastingDiagram>()?.to_string(),
        Kind::Term => s.trim().parse::<LTerm>()?.to_string(),
    };
    Ok((kind, out))
}

/// parse → serialise → parse → serialise gives the same text twice.
pub fn roundtrip_str(s: &str) -> Result<bool> {
    let (k1, once) = canonicalize(s)?;
    let (k2, twice) = canonicalize(&once)?;
    Ok(k1 == k2 && once == twice)
}

pub fn roundtrip(path: &std::path::Path) -> Result<bool> {
    roundtrip_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::{terminal_collection, terminal_contraction};
    use crate::operads::{semilattice_owc, terminal_operad, FiniteMonoid};
    use crate::pasting::realize;

    #[test]
    fn presheaf_and_map() {
        let g = globe_category(2);
        let x = Arc::new(realize(&"2:[[* *] [*]]".parse().unwrap()).to_presheaf(&g).unwrap());
        let s = presheaf_to_json(&x);
        assert_eq!(&presheaf_from_json(&s).unwrap(), &*x);
        let id = PresheafMap::identity(x.clone());
        let back = map_from_json(x.clone(), x.clone(), &map_to_json(&id)).unwrap();
        assert_eq!(back.components(), id.components());
        let a = arrow_to_json(&id);
        assert_eq!(detect(&a).unwrap(), Kind::Arrow);
        assert_eq!(arrow_from_json(&a).unwrap().components(), id.components());
        assert!(roundtrip_str(&a).unwrap());
        assert!(roundtrip_str(&s).unwrap());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = presheaf_from_json("{\n  \"category\": 3 }").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(matches!(category_by_name("nope"), Err(Error::UnknownObject(_))));
    }

    #[test]
    fn collections_and_owcs() {
        let c = terminal_collection(Bounds::new(2, 3));
        assert_eq!(collection_from_json(&collection_to_json(&c)).unwrap(), c);
        let k = terminal_contraction(&c);
        assert_eq!(contraction_from_json(&c, &contraction_to_json(&c, &k)).unwrap(), k);
        let t = terminal_operad(Bounds::new(2, 3));
        let s = owc_to_json(&t).unwrap();
        let back = owc_from_json(&s).unwrap();
        assert_eq!(owc_to_json(&back).unwrap(), s);
        let sl = semilattice_owc(FiniteMonoid::boolean(), &|_| 1, Bounds::new(1, 3)).unwrap();
        assert!(roundtrip_str(&owc_to_json(&sl).unwrap()).unwrap());
    }

    #[test]
    fn text_values() {
        assert!(roundtrip_str("2:[[* *] [*]]").unwrap());
        let (k, s) = canonicalize("  2:[ [*  *]  [*] ]\n").unwrap();
        assert_eq!((k, s.as_str()), (Kind::Pd, "2:[[* *] [*]]"));
        assert_eq!(detect("c(g; x0=u0)").unwrap(), Kind::Term);
        let x = ChainComplex::module(2, 1).unwrap();
        assert!(roundtrip_str(&chain_to_json(&x)).unwrap());
        let messy = "{\"ranks\":[1,1],  \"p\":2,\"d\":[[[0]]]}";
        let (_, once) = canonicalize(messy).unwrap();
        assert_ne!(once, messy);
        assert!(roundtrip_str(messy).unwrap());
    }
}
