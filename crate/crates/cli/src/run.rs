use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use ontomerge::closure::ClosureMember;
use ontomerge::ontology::{isomorphism, DEFAULT_HOM_BUDGET};
use ontomerge::verify::{check_property_with, random_system, verify_report_with, CheckOptions, VerifyError};
use ontomerge::{
    build_poset, canonical_form, compute_closure, find_homomorphisms, null_extend, poset_query, provenance_of, pushout,
    ClosureError, ClosureResult, Ontology, OrderRelation, Poset, PosetQuery, Property, SearchMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::dot::{hasse_dot, ontology_dot};
use crate::format::{
    file_resolver, parse_alignment, parse_ontology, serialize_ontology, to_json, FormatError, IdMap, Manifest,
    LIMITS_ENV,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ontomerge",
    version,
    about = "Merge ontologies along alignments and study the resulting merging system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate ontology, alignment or manifest files
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Merge the two ontologies of an alignment file (pushout)
    Merge {
        alignment: PathBuf,
        /// Write the result here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the merged ontology as DOT
        #[arg(long)]
        dot: bool,
    },
    /// Compute the merging closure of a manifest
    Closure {
        manifest: PathBuf,
        /// Output directory for member files (defaults to the manifest's `output`)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the natural order on the closure and its Hasse diagram
    Order {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the Hasse diagram as DOT instead of JSON
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Query the closure poset
    Query(QueryArgs),
    /// Check algebraic properties of the closure
    Check {
        manifest: PathBuf,
        /// Property to check (repeatable); all of them by default
        #[arg(long = "property", short = 'p')]
        properties: Vec<Property>,
        /// Allow carriers above the default size limit
        #[arg(long)]
        allow_large: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Search homomorphisms between two ontology files
    Hom {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, conflicts_with = "all")]
        count: bool,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Decide isomorphism of two ontology files
    Iso { left: PathBuf, right: PathBuf },
    /// Show how a closure member is built from generators
    Provenance { manifest: PathBuf, key: String },
    /// Run the property checker on random finite systems and audit the implications between properties
    Audit {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Debug, Args)]
struct Budget {
    /// Step budget for each homomorphism search
    #[arg(long = "budget", default_value_t = DEFAULT_HOM_BUDGET)]
    steps: u64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("query").required(true).args(["maximal", "minimal", "sort", "above", "below"])))]
struct QueryArgs {
    manifest: PathBuf,
    #[arg(long)]
    maximal: bool,
    #[arg(long)]
    minimal: bool,
    #[arg(long)]
    sort: bool,
    #[arg(long, value_name = "KEY")]
    above: Option<String>,
    #[arg(long, value_name = "KEY")]
    below: Option<String>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::new(EXIT_INPUT, e.to_string())
    }
}

impl From<ClosureError> for Failure {
    fn from(e: ClosureError) -> Self {
        let code = match e {
            ClosureError::LimitExceeded { .. } | ClosureError::HomBudget { .. } | ClosureError::Incomplete => {
                EXIT_LIMIT
            }
            ClosureError::UnknownKey(_) | ClosureError::AmbiguousKey(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        };
        let mut message = e.to_string();
        if let ClosureError::LimitExceeded { partial, .. } = &e {
            message.push_str(&format!(
                "\npartial closure: {} members after {} rounds",
                partial.len(),
                partial.rounds()
            ));
        }
        Failure::new(code, message)
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        let code = if matches!(e, VerifyError::CarrierTooLarge(_)) { EXIT_LIMIT } else { EXIT_INPUT };
        Failure::new(code, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_INPUT, format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Results go to stdout, diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Validate { files } => validate(&files),
        Command::Merge { alignment, out, dot } => merge(&alignment, out.as_deref(), dot),
        Command::Closure { manifest, out } => closure(&manifest, out),
        Command::Order { manifest, out, dot, budget } => order(&manifest, out, dot, budget.steps),
        Command::Query(q) => query(q),
        Command::Check { manifest, properties, allow_large, out, budget } => {
            check(&manifest, &properties, allow_large, out.as_deref(), budget.steps)
        }
        Command::Hom { source, target, count, all, budget } => hom(&source, &target, count, all, budget.steps),
        Command::Iso { left, right } => iso(&left, &right),
        Command::Provenance { manifest, key } => provenance(&manifest, &key),
        Command::Audit { seed, samples } => audit(seed, samples),
    }
}

fn validate(files: &[PathBuf]) -> Result<i32, Failure> {
    for path in files {
        let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
            Failure::new(
                EXIT_INPUT,
                format!("{}: parse error at line {}, column {}: {e}", path.display(), e.line(), e.column()),
            )
        })?;
        if value.get("ontologies").is_some() {
            let m = Manifest::load(path)?;
            println!(
                "ok {}: manifest, {} ontologies, {} alignments",
                path.display(),
                m.ontologies.len(),
                m.alignments.len()
            );
        } else if value.get("r1").is_some() {
            let a = parse_alignment(path, &mut file_resolver(path))?;
            println!(
                "ok {}: alignment {} ~ {} over a base of {} elements",
                path.display(),
                a.left,
                a.right,
                a.pair.base().element_count()
            );
        } else {
            let o = parse_ontology(path)?;
            println!(
                "ok {}: ontology, {} concepts, {} relations",
                path.display(),
                o.concept_count(),
                o.relation_count()
            );
        }
    }
    Ok(EXIT_OK)
}

fn merge(alignment: &Path, out: Option<&Path>, dot: bool) -> Result<i32, Failure> {
    let a = parse_alignment(alignment, &mut file_resolver(alignment))?;
    let po = pushout(&a.pair);
    let text = if dot {
        ontology_dot(&format!("{}_{}", a.left, a.right), &po.merged)
    } else {
        let merged: serde_json::Value = serde_json::from_str(&serialize_ontology(&po.merged)).expect("own output");
        to_json(&json!({
            "left": a.left,
            "right": a.right,
            "merged": merged,
            "inject_left": IdMap::of(&po.inject_left),
            "inject_right": IdMap::of(&po.inject_right),
        }))
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_closure(manifest: &Path) -> Result<(Manifest, ClosureResult), Failure> {
    let m = Manifest::load(manifest)?;
    let env = std::env::var(LIMITS_ENV).ok();
    let limits = m.limits(env.as_deref())?;
    let c = compute_closure(&m.repository(), limits)?;
    Ok((m, c))
}

fn member_file(m: &ClosureMember) -> String {
    let stem: String = m
        .display_name()
        .chars()
        .map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' { ch } else { '_' })
        .collect();
    format!("members/{stem}.json")
}

#[derive(Serialize)]
struct MemberSummary {
    name: String,
    names: Vec<String>,
    key: String,
    layer: usize,
    concepts: usize,
    relations: usize,
    provenance: String,
    file: String,
}

#[derive(Serialize)]
struct MergeEntry {
    left: String,
    right: String,
    result: String,
}

fn closure_summary(c: &ClosureResult) -> serde_json::Value {
    let name = |i: usize| c.member(i).display_name();
    let members: Vec<MemberSummary> = c
        .members()
        .iter()
        .enumerate()
        .map(|(i, m)| MemberSummary {
            name: name(i),
            names: m.names.clone(),
            key: m.key.digest(),
            layer: m.layer,
            concepts: m.ontology.concept_count(),
            relations: m.ontology.relation_count(),
            provenance: provenance_of(c, &m.key.digest()).map(|t| t.render(&name)).unwrap_or_default(),
            file: member_file(m),
        })
        .collect();
    let merges: Vec<MergeEntry> =
        c.merges().iter().map(|(&(a, b), &r)| MergeEntry { left: name(a), right: name(b), result: name(r) }).collect();
    json!({ "complete": c.is_complete(), "rounds": c.rounds(), "members": members, "merges": merges })
}

fn closure(manifest: &Path, out: Option<PathBuf>) -> Result<i32, Failure> {
    let (m, c) = load_closure(manifest)?;
    let summary = to_json(&closure_summary(&c));
    if let Some(dir) = out.or(m.output) {
        for member in c.members() {
            write_file(&dir.join(member_file(member)), &serialize_ontology(&member.ontology))?;
        }
        write_file(&dir.join("closure.json"), &summary)?;
    }
    print!("{summary}");
    Ok(EXIT_OK)
}

fn poset_json(c: &ClosureResult, p: &Poset) -> serde_json::Value {
    let name = |i: usize| c.member(i).display_name();
    let classes: Vec<Vec<String>> = p.classes().iter().map(|cl| cl.iter().map(|&i| name(i)).collect()).collect();
    let leq: Vec<[String; 2]> = (0..p.len())
        .flat_map(|a| (0..p.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && p.leq(a, b))
        .map(|(a, b)| [name(a), name(b)])
        .collect();
    let hasse: Vec<[usize; 2]> = p.hasse().iter().map(|&(a, b)| [a, b]).collect();
    json!({ "members": (0..p.len()).map(name).collect::<Vec<_>>(), "classes": classes, "leq": leq, "hasse": hasse })
}

fn order(manifest: &Path, out: Option<PathBuf>, dot: bool, budget: u64) -> Result<i32, Failure> {
    let (m, c) = load_closure(manifest)?;
    let p = build_poset(&c, budget)?;
    let json_text = to_json(&poset_json(&c, &p));
    let dot_text = hasse_dot(&c, &p);
    if let Some(dir) = out.or(m.output) {
        write_file(&dir.join("poset.json"), &json_text)?;
        write_file(&dir.join("hasse.dot"), &dot_text)?;
    }
    print!("{}", if dot { dot_text } else { json_text });
    Ok(EXIT_OK)
}

fn query(q: QueryArgs) -> Result<i32, Failure> {
    let (_, c) = load_closure(&q.manifest)?;
    let p = build_poset(&c, q.budget.steps)?;
    let query = if q.maximal {
        PosetQuery::Maximal
    } else if q.minimal {
        PosetQuery::Minimal
    } else if q.sort {
        PosetQuery::Sort
    } else if let Some(k) = q.above {
        PosetQuery::Above(k)
    } else {
        PosetQuery::Below(q.below.expect("clap requires one query"))
    };
    for i in poset_query(&p, &query)? {
        println!("{}", c.member(i).display_name());
    }
    Ok(EXIT_OK)
}

fn check(
    manifest: &Path,
    properties: &[Property],
    allow_large: bool,
    out: Option<&Path>,
    budget: u64,
) -> Result<i32, Failure> {
    let (_, c) = load_closure(manifest)?;
    let opts = CheckOptions { allow_large_carrier: allow_large };
    let sys = c.system();
    let selected: Vec<Property> = if properties.is_empty() { Property::ALL.to_vec() } else { properties.to_vec() };
    let order = if selected.iter().any(|p| p.needs_order()) {
        let p = build_poset(&c, budget)?;
        Some(OrderRelation::from_fn(c.len(), |a, b| p.leq(a, b)))
    } else {
        None
    };
    let name = |i: usize| c.member(i).display_name();
    let mut reports = Vec::new();
    let mut failed = 0;
    for &prop in &selected {
        let r = check_property_with(&sys, prop, order.as_ref(), opts)?;
        if let Some(cx) = &r.counterexample {
            failed += 1;
            let names: Vec<String> = cx.elements.iter().map(|&i| name(i)).collect();
            eprintln!("{prop} fails on {}: {}", names.join(", "), cx.equation);
        }
        reports.push(json!({
            "property": prop.to_string(),
            "holds": r.holds,
            "counterexample": r.counterexample.as_ref().map(|cx| json!({
                "elements": cx.elements.iter().map(|&i| name(i)).collect::<Vec<_>>(),
                "indices": cx.elements,
                "equation": cx.equation,
            })),
        }));
    }
    let mut doc = json!({ "members": (0..c.len()).map(name).collect::<Vec<_>>(), "reports": reports });
    if properties.is_empty() {
        let full = verify_report_with(&sys, opts)?;
        doc["null_extension_associative"] = json!(full.null_extension_associative);
        doc["implication_violations"] = json!(full.implication_violations);
        failed += full.implication_violations.len();
    }
    emit(out, &to_json(&doc))?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn load_pair(a: &Path, b: &Path) -> Result<(Arc<Ontology>, Arc<Ontology>), Failure> {
    Ok((Arc::new(parse_ontology(a)?), Arc::new(parse_ontology(b)?)))
}

fn hom(source: &Path, target: &Path, count: bool, all: bool, budget: u64) -> Result<i32, Failure> {
    let (s, t) = load_pair(source, target)?;
    let mode = if count {
        SearchMode::Count
    } else if all {
        SearchMode::All
    } else {
        SearchMode::First
    };
    let found = find_homomorphisms(&s, &t, mode, budget).map_err(|e| Failure::new(EXIT_LIMIT, e.to_string()))?;
    if count {
        println!("{}", found.count());
    } else {
        let maps: Vec<IdMap> = found.homs().iter().map(IdMap::of).collect();
        if all {
            print!("{}", to_json(&maps));
        } else {
            print!("{}", to_json(&maps.first()));
        }
    }
    Ok(EXIT_OK)
}

fn iso(left: &Path, right: &Path) -> Result<i32, Failure> {
    let (a, b) = load_pair(left, right)?;
    let mapping = isomorphism(&a, &b);
    print!(
        "{}",
        to_json(&json!({
            "isomorphic": mapping.is_some(),
            "left_key": canonical_form(&a).digest(),
            "right_key": canonical_form(&b).digest(),
            "mapping": mapping.as_ref().map(IdMap::of),
        }))
    );
    Ok(EXIT_OK)
}

fn provenance(manifest: &Path, key: &str) -> Result<i32, Failure> {
    let (_, c) = load_closure(manifest)?;
    let tree = provenance_of(&c, key)?;
    let name = |i: usize| c.member(i).display_name();
    let m = c.member(tree.member());
    println!("{} (layer {}, key {})", name(tree.member()), m.layer, m.key.digest());
    println!("{}", tree.render(&name));
    Ok(EXIT_OK)
}

fn audit(seed: u64, samples: usize) -> Result<i32, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut sa_passing = 0;
    let mut semigroups = 0;
    for i in 0..samples {
        let density = rng.gen_range(0.3..0.95);
        let s = random_system(&mut rng, density, 0.25);
        let r = verify_report_with(&s, CheckOptions::default())?;
        for v in &r.implication_violations {
            eprintln!("sample {i}: {v}");
        }
        violations += r.implication_violations.len();
        if r.holds(Property::SA) {
            sa_passing += 1;
            if null_extend(&s).is_semigroup() {
                semigroups += 1;
            } else {
                eprintln!("sample {i}: SA holds but the null extension is not associative");
            }
        }
    }
    print!(
        "{}",
        to_json(&json!({
            "seed": seed,
            "samples": samples,
            "implication_violations": violations,
            "sa_passing": sa_passing,
            "null_extension_semigroups": semigroups,
        }))
    );
    Ok(if violations == 0 && semigroups == sa_passing { EXIT_OK } else { EXIT_VIOLATION })
}
