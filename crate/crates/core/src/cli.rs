//! Command-line front end, bundled scenarios and round trips.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! and parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chains::{self, ChainComplex, LiftOutcome, DEFAULT_GEN_CAP};
use crate::collections::{bijection_roundtrip, random_contractible, terminal_collection, validate_contraction, Bounds, PdUniverse};
use crate::error::{Error, Result};
use crate::formats;
use crate::leinster::{augmented_enum0, enum_terms, initial_map, term_eq, LTerm};
use crate::operads::{check_contraction, check_operad_laws, is_normalised, terminal_operad, LawBudget};
use crate::pasting::{enum_pd, flatten, realize, PastingDiagram};
use crate::soa::{iterate, DEFAULT_CELL_CAP};

#[derive(Parser, Debug)]
#[command(name = "globular", version, about = "Pasting diagrams, globular operads with contraction, and cofibrant replacement at desk scale")]
pub struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Pasting diagrams: enumeration, boundaries, realization, flattening.
    #[command(subcommand)]
    Pd(PdCmd),
    /// Operads with contraction given as tables.
    #[command(subcommand)]
    Owc(OwcCmd),
    /// Terms of the initial operad with contraction.
    #[command(subcommand)]
    Leinster(LeinsterCmd),
    /// Small-object factorisations of globular maps.
    #[command(subcommand)]
    Soa(SoaCmd),
    /// Chain complexes over a prime field and their cofibrant replacement.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Bundled end-to-end checks with recorded expectations.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Parse, serialise and parse again; fails unless the value is stable.
    Roundtrip {
        path: Option<PathBuf>,
        /// A pasting diagram or term given inline instead of a file.
        #[arg(long, conflicts_with = "path")]
        value: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum PdCmd {
    /// All pasting diagrams of a dimension up to a node count.
    Enum {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        max_nodes: usize,
    },
    /// The source (equivalently target) diagram.
    Boundary { pd: String },
    /// Emits the realization in the GlobularSet format.
    Realize { pd: String },
    /// Flattens a labelled pasting diagram file.
    Flatten { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum OwcCmd {
    /// Runs the operad laws and, if present, the contraction checks.
    Check {
        file: PathBuf,
        /// Cap on the weight of the instances visited.
        #[arg(long)]
        max_weight: Option<usize>,
    },
    /// The terminal operad with contraction at the given bounds.
    Terminal {
        #[arg(long, num_args = 2, value_names = ["N", "K"])]
        bounds: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum LeinsterCmd {
    /// Normal-form terms over an arity up to a size.
    Enum {
        #[arg(long)]
        arity: String,
        #[arg(long)]
        max_size: usize,
    },
    /// The image of a term under the unique map into an operad file.
    Map {
        #[arg(long)]
        owc: PathBuf,
        #[arg(long)]
        term: String,
    },
    /// Free-operad equality; exits with 1 when the terms differ.
    Eq { t1: String, t2: String },
    /// Dimension-0 terms of the augmented variant, one word per length.
    AugEnum0 {
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum SoaCmd {
    /// Factorisation chain of a map against generating maps; map files
    /// carry their domain and codomain.
    Factor {
        #[arg(long, num_args = 1.., required = true)]
        gens: Vec<PathBuf>,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChainCmd {
    /// Ranks, generators and counit of the replacement through a degree.
    Resolve {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        degrees: usize,
    },
    /// Homology dimensions in every stored degree.
    Homology {
        #[arg(long)]
        complex: PathBuf,
    },
    /// Counit and coassociativity laws of the replacement comonad.
    ComonadCheck {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, default_value_t = 3)]
        degrees: usize,
    },
    /// A random complex in the ChainComplex format.
    Random {
        #[arg(long, default_value_t = 2)]
        prime: u32,
        #[arg(long, default_value_t = 4)]
        degrees: usize,
        #[arg(long, default_value_t = 2)]
        max_rank: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum ScenarioCmd {
    /// Names of the bundled scenarios.
    List,
    /// Runs a bundled scenario, or a scenario file whose name selects the
    /// computation and whose expectations are compared.
    Run {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        file: Option<PathBuf>,
    },
    /// Prints a bundled scenario as a file.
    Show { name: String },
}

/// Outcome of one command: whether its checks passed, and its output.
#[derive(Clone, Debug)]
pub struct Report {
    pub ok: bool,
    pub text: String,
    pub json: Value,
}

impl Report {
    fn pass(text: String, json: Value) -> Self {
        Report { ok: true, text, json }
    }

    /// For commands that emit a file: the file is both outputs.
    fn file(s: String) -> Self {
        let json = serde_json::from_str(&s).unwrap_or(Value::String(s.clone()));
        Report::pass(s, json)
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn lines<T: ToString>(xs: &[T]) -> (String, Value) {
    let v: Vec<String> = xs.iter().map(ToString::to_string).collect();
    (v.join("\n"), json!(v))
}

pub fn execute(cli: &Cli) -> Result<Report> {
    match &cli.cmd {
        Cmd::Pd(c) => pd_cmd(c),
        Cmd::Owc(c) => owc_cmd(c),
        Cmd::Leinster(c) => leinster_cmd(c),
        Cmd::Soa(c) => soa_cmd(c),
        Cmd::Chain(c) => chain_cmd(c, cli.seed),
        Cmd::Scenario(c) => scenario_cmd(c, cli.seed),
        Cmd::Roundtrip { path, value } => {
            let ok = match (path, value) {
                (_, Some(v)) => formats::roundtrip_str(v)?,
                (Some(p), None) => formats::roundtrip(p)?,
                (None, None) => return Err(Error::parse(1, 1, "a path or --value is required")),
            };
            Ok(Report { ok, text: if ok { "stable" } else { "unstable" }.into(), json: json!({ "stable": ok }) })
        }
    }
}

fn pd_cmd(c: &PdCmd) -> Result<Report> {
    Ok(match c {
        PdCmd::Enum { dim, max_nodes } => {
            let (t, j) = lines(&enum_pd(*dim, *max_nodes));
            Report::pass(t, j)
        }
        PdCmd::Boundary { pd } => {
            let b = pd.parse::<PastingDiagram>()?.boundary()?.to_string();
            Report::pass(b.clone(), json!(b))
        }
        PdCmd::Realize { pd } => Report::file(formats::globular_set_to_json(&realize(&pd.parse()?))),
        PdCmd::Flatten { file } => {
            let f = flatten(&formats::labelled_from_json(&read(file)?)?)?.to_string();
            Report::pass(f.clone(), json!(f))
        }
    })
}

fn owc_cmd(c: &OwcCmd) -> Result<Report> {
    match c {
        OwcCmd::Check { file, max_weight } => {
            let o = formats::owc_from_json(&read(file)?)?;
            let laws = check_operad_laws(&o, LawBudget { max_weight: *max_weight, associativity: true })?;
            let mut ok = laws.is_clean();
            let mut text = format!("laws: {} instances, {} skipped, {} failures", laws.instances, laws.skipped, laws.failures.len());
            for f in laws.failures.iter().take(5) {
                text += &format!("\n  {:?}: {}", f.law, f.detail);
            }
            let mut contraction = Value::Null;
            if let Some(k) = o.contraction() {
                let v = validate_contraction(o.collection(), k)?;
                let typed = check_contraction(&o)?;
                ok &= v.is_valid() && typed.is_clean();
                text += &format!("\ncontraction: {} violations", v.violations.len() + typed.failures.len());
                contraction = json!({ "violations": v.violations.len() + typed.failures.len() });
            }
            let normalised = is_normalised(&o);
            text += &format!("\nnormalised: {normalised}");
            let json = json!({
                "instances": laws.instances,
                "skipped": laws.skipped,
                "failures": laws.failures.iter().map(|f| format!("{:?}: {}", f.law, f.detail)).collect::<Vec<_>>(),
                "contraction": contraction,
                "normalised": normalised,
            });
            Ok(Report { ok, text, json })
        }
        OwcCmd::Terminal { bounds } => Ok(Report::file(formats::owc_to_json(&terminal_operad(Bounds::new(bounds[0], bounds[1])))?)),
    }
}

fn leinster_cmd(c: &LeinsterCmd) -> Result<Report> {
    Ok(match c {
        LeinsterCmd::Enum { arity, max_size } => {
            let (t, j) = lines(&enum_terms(&arity.parse()?, *max_size)?);
            Report::pass(t, j)
        }
        LeinsterCmd::Map { owc, term } => {
            let o = formats::owc_from_json(&read(owc)?)?;
            let t: LTerm = term.parse()?;
            let op = initial_map(&o, &t)?;
            let pi = o.collection().universe().pds()[op.pi].to_string();
            Report::pass(format!("{pi} #{}", op.elem), json!({ "arity": pi, "element": op.elem }))
        }
        LeinsterCmd::Eq { t1, t2 } => {
            let eq = term_eq(&t1.parse()?, &t2.parse()?)?;
            Report { ok: eq, text: eq.to_string(), json: json!(eq) }
        }
        LeinsterCmd::AugEnum0 { max_len } => {
            let (t, j) = lines(&augmented_enum0(*max_len)?);
            Report::pass(t, j)
        }
    })
}

fn soa_cmd(c: &SoaCmd) -> Result<Report> {
    let SoaCmd::Factor { gens, map, steps } = c;
    let gens = gens.iter().map(|p| formats::arrow_from_json(&read(p)?)).collect::<Result<Vec<_>>>()?;
    let f = formats::arrow_from_json(&read(map)?)?;
    let it = iterate(&gens, &f, *steps, DEFAULT_CELL_CAP)?;
    let parse = |s: String| serde_json::from_str::<Value>(&s).expect("own output parses");
    let stages: Vec<Value> = it
        .stages
        .iter()
        .map(|s| {
            json!({
                "squares": s.squares.len(),
                "object": parse(formats::presheaf_to_json(s.object())),
                "lambda": parse(formats::map_to_json(&s.lambda)),
                "rho": parse(formats::map_to_json(&s.rho)),
            })
        })
        .collect();
    let json = json!({ "stages": stages, "limit": it.limit });
    let ok = it.limit.is_none();
    Ok(Report { ok, text: serde_json::to_string_pretty(&json)?, json })
}

fn chain_cmd(c: &ChainCmd, seed: u64) -> Result<Report> {
    let load = |p: &PathBuf| -> Result<ChainComplex> { formats::chain_from_json(&read(p)?) };
    Ok(match c {
        ChainCmd::Resolve { complex, degrees } => {
            let q = chains::q_replace(&load(complex)?, *degrees, DEFAULT_GEN_CAP)?;
            let json = json!({ "ranks": q.ranks(), "complex": serde_json::from_str::<Value>(&formats::chain_to_json(q.complex()))? });
            Report::pass(format!("ranks: {:?}", q.ranks()), json)
        }
        ChainCmd::Homology { complex } => {
            let x = load(complex)?;
            let h: Vec<usize> = (0..=x.top()).map(|i| x.homology(i)).collect();
            Report::pass(format!("H: {h:?}"), json!(h))
        }
        ChainCmd::ComonadCheck { complex, degrees } => {
            let q = chains::q_replace(&load(complex)?, *degrees, DEFAULT_GEN_CAP)?;
            let r = chains::comonad_check(&q, *degrees)?;
            let json = json!({
                "generators": r.generators,
                "well_formed": r.well_formed,
                "counit_left": r.counit_left,
                "counit_right": r.counit_right,
                "coassociative": r.coassociative,
            });
            let text = format!(
                "generators: {}\nwell-formed: {}\ncounit left: {}\ncounit right: {}\ncoassociative: {}",
                r.generators, r.well_formed, r.counit_left, r.counit_right, r.coassociative
            );
            Report { ok: r.holds(), text, json }
        }
        ChainCmd::Random { prime, degrees, max_rank } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Report::file(formats::chain_to_json(&chains::random_complex(*prime, *degrees, *max_rank, &mut rng)?))
        }
    })
}

/// A named computation with inputs and expected outputs; every expected
/// value carries a provenance note.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, Value>,
    pub expected: BTreeMap<String, Value>,
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

pub const SCENARIOS: [&str; 2] = ["filler-bijection", "bar-resolution-z2"];

pub fn bundled(name: &str, seed: u64) -> Result<Scenario> {
    let m = |kv: &[(&str, Value)]| kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>();
    let s = |kv: &[(&str, &str)]| kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<BTreeMap<_, _>>();
    match name {
        "filler-bijection" => Ok(Scenario {
            name: name.into(),
            inputs: m(&[("seed", json!(seed)), ("collections", json!(100)), ("bounds", json!([2, 4]))]),
            expected: m(&[
                ("collections", json!(101)),
                ("contraction_round_trips", json!(101)),
                ("filler_round_trips", json!(101)),
            ]),
            provenance: s(&[
                ("collections", "DERIVED: 100 seeded random normalised contractible collections plus the terminal one"),
                ("contraction_round_trips", "DERIVED: fillers_to_contraction after contraction_to_fillers is the identity"),
                ("filler_round_trips", "DERIVED: contraction_to_fillers after fillers_to_contraction is the identity"),
            ]),
        }),
        "bar-resolution-z2" => Ok(Scenario {
            name: name.into(),
            inputs: m(&[("p", json!(2)), ("degrees", json!(3))]),
            expected: m(&[
                ("ranks", json!([2, 2, 2, 2])),
                ("homology", json!([1, 0, 0, 0])),
                ("eps_surjective", json!(true)),
                ("comonad_laws", json!(true)),
                ("lifting_squares_solvable", json!(true)),
            ]),
            provenance: s(&[
                ("ranks", "DERIVED: direct evaluation of the generator induction"),
                ("homology", "DERIVED: Gaussian elimination on the resolution computed one degree further"),
                ("eps_surjective", "DERIVED: rank of each counit component"),
                ("comonad_laws", "DERIVED: both counit laws and coassociativity on every generator"),
                ("lifting_squares_solvable", "DERIVED: every square against the counit, degrees up to 4"),
            ]),
        }),
        _ => Err(Error::parse(1, 1, format!("unknown scenario {name}"))),
    }
}

fn input<T: for<'de> Deserialize<'de>>(s: &Scenario, key: &str) -> Result<T> {
    let v = s.inputs.get(key).ok_or_else(|| Error::parse(1, 1, format!("scenario input {key} is missing")))?;
    Ok(serde_json::from_value(v.clone())?)
}

fn scenario_actual(s: &Scenario) -> Result<BTreeMap<String, Value>> {
    let mut out = BTreeMap::new();
    match s.name.as_str() {
        "filler-bijection" => {
            let seed: u64 = input(s, "seed")?;
            let n: usize = input(s, "collections")?;
            let [bn, bk]: [usize; 2] = input(s, "bounds")?;
            let u = PdUniverse::new(Bounds::new(bn, bk));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cs: Vec<_> = (0..n).map(|_| random_contractible(&u, true, &mut rng)).collect();
            cs.push(terminal_collection(u.bounds()));
            let (mut there, mut back) = (0, 0);
            for c in &cs {
                let (a, b) = bijection_roundtrip(c, &mut rng)?;
                there += usize::from(a);
                back += usize::from(b);
            }
            out.insert("collections".into(), json!(cs.len()));
            out.insert("contraction_round_trips".into(), json!(there));
            out.insert("filler_round_trips".into(), json!(back));
        }
        "bar-resolution-z2" => {
            let p: u32 = input(s, "p")?;
            let n: usize = input(s, "degrees")?;
            let x = ChainComplex::module(p, 1)?;
            let q = chains::q_replace(&x, n, DEFAULT_GEN_CAP)?;
            let deeper = chains::q_replace(&x, (n + 1).max(4), DEFAULT_GEN_CAP)?;
            let h: Vec<usize> = (0..=n).map(|i| deeper.complex().homology(i)).collect();
            let surj = (0..=n).all(|i| q.eps(i).rank(p) == x.rank(i));
            let eps = deeper.counit();
            let mut lifts = true;
            for i in 0..=4 {
                for (w, v) in chains::all_squares(i, &eps) {
                    lifts &= matches!(chains::chain_rlp(i, &eps, &w, &v)?, LiftOutcome::Filler(_));
                }
            }
            out.insert("ranks".into(), json!(q.ranks()));
            out.insert("homology".into(), json!(h));
            out.insert("eps_surjective".into(), json!(surj));
            out.insert("comonad_laws".into(), json!(chains::comonad_check(&q, n)?.holds()));
            out.insert("lifting_squares_solvable".into(), json!(lifts));
        }
        other => return Err(Error::parse(1, 1, format!("unknown scenario {other}"))),
    }
    Ok(out)
}

/// Runs the computation and diffs every expected key against it.
pub fn run_scenario(s: &Scenario) -> Result<Report> {
    let actual = scenario_actual(s)?;
    let mut diffs = Vec::new();
    for (k, want) in &s.expected {
        match actual.get(k) {
            Some(got) if got == want => {}
            Some(got) => diffs.push(format!("{k}: expected {want}, got {got}")),
            None => diffs.push(format!("{k}: expected {want}, not computed")),
        }
    }
    let ok = diffs.is_empty();
    let mut text = format!("scenario {}: {}", s.name, if ok { "pass" } else { "fail" });
    for d in &diffs {
        text += &format!("\n  {d}");
    }
    Ok(Report { ok, text, json: json!({ "name": s.name, "pass": ok, "actual": actual, "diff": diffs }) })
}

fn scenario_cmd(c: &ScenarioCmd, seed: u64) -> Result<Report> {
    match c {
        ScenarioCmd::List => {
            let (t, j) = lines(&SCENARIOS);
            Ok(Report::pass(t, j))
        }
        ScenarioCmd::Show { name } => Ok(Report::file(serde_json::to_string_pretty(&bundled(name, seed)?)?)),
        ScenarioCmd::Run { name, file } => {
            let s = match (name, file) {
                (Some(n), None) => bundled(n, seed)?,
                (None, Some(f)) => serde_json::from_str(&read(f)?).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?,
                _ => return Err(Error::parse(1, 1, "a scenario name or --file is required")),
            };
            run_scenario(&s)
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(r) => {
            let body = match cli.format {
                Format::Text => r.text,
                Format::Json => serde_json::to_string_pretty(&r.json).expect("serialisable"),
            };
            let _ = writeln!(out, "{body}");
            if r.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::ResourceLimit(_) => 1,
                _ => 2,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("globular").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap() + &String::from_utf8(e).unwrap())
    }

    #[test]
    fn pd_commands() {
        assert_eq!(call(&["pd", "boundary", "2:[[* *] [*]]"]), (0, "1:[* *]\n".into()));
        let (c, o) = call(&["pd", "enum", "--dim", "1", "--max-nodes", "3"]);
        assert_eq!((c, o.lines().count()), (0, 3));
        assert_eq!(call(&["pd", "boundary", "2:[[*"]).0, 2);
        assert_eq!(call(&["pd", "frobnicate"]).0, 2);
        let (c, o) = call(&["--format", "json", "pd", "realize", "1:[*]"]);
        assert_eq!(c, 0);
        assert!(o.contains("\"dims\""));
    }

    #[test]
    fn leinster_commands() {
        assert_eq!(call(&["leinster", "eq", "c(id1; x0=u0, x1=u0, x2=id1)", "id1"]).0, 0);
        assert_eq!(call(&["leinster", "eq", "id1", "k(1:[*]; u0, u0)"]).0, 1);
        let (c, o) = call(&["leinster", "aug-enum0", "--max-len", "3"]);
        assert_eq!((c, o.lines().count()), (0, 4));
        assert_eq!(call(&["leinster", "enum", "--arity", "0:*", "--max-size", "3"]).1.lines().count(), 1);
    }

    #[test]
    fn scenarios() {
        let s = bundled("bar-resolution-z2", 0).unwrap();
        assert!(run_scenario(&s).unwrap().ok);
        let mut bad = s.clone();
        bad.expected.insert("ranks".into(), json!([2, 2, 2, 3]));
        let r = run_scenario(&bad).unwrap();
        assert!(!r.ok);
        assert!(r.text.contains("ranks: expected [2,2,2,3], got [2,2,2,2]"), "{}", r.text);
        assert!(matches!(bundled("nope", 0), Err(Error::Parse { .. })));
    }

    #[test]
    fn chain_and_owc_commands() {
        let dir = std::env::temp_dir().join(format!("globular-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cx = dir.join("point.json");
        std::fs::write(&cx, formats::chain_to_json(&ChainComplex::module(2, 1).unwrap())).unwrap();
        let cx = cx.to_str().unwrap();
        assert_eq!(call(&["chain", "resolve", "--complex", cx, "--degrees", "2"]), (0, "ranks: [2, 2, 2]\n".into()));
        assert_eq!(call(&["chain", "comonad-check", "--complex", cx]).0, 0);
        assert_eq!(call(&["chain", "homology", "--complex", cx]), (0, "H: [1]\n".into()));
        let owc = dir.join("terminal.json");
        let (c, o) = call(&["owc", "terminal", "--bounds", "1", "3"]);
        assert_eq!(c, 0);
        std::fs::write(&owc, o).unwrap();
        let owc = owc.to_str().unwrap();
        assert_eq!(call(&["owc", "check", owc]).0, 0);
        assert_eq!(call(&["roundtrip", owc]).0, 0);
        assert_eq!(call(&["leinster", "map", "--owc", owc, "--term", "k(1:[*]; u0, u0)"]), (0, "1:[*] #0\n".into()));
        assert_eq!(call(&["roundtrip", "--value", "2:[[* *] [*]]"]).0, 0);
        assert_eq!(call(&["chain", "homology", "--complex", "/nonexistent"]).0, 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
