//! On-disk formats: ontology, alignment and manifest JSON documents.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ontomerge::closure::Limits;
use ontomerge::error::HomError;
use ontomerge::ontology::validate;
use ontomerge::{Homomorphism, Ontology, RawOntology, Repository, VAlignmentPair, ValidationError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const LIMITS_ENV: &str = "ONTOMERGE_LIMITS";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: ValidationError },
    #[error("{path}: invalid homomorphism {which}: {source}")]
    InvalidHomomorphism { path: PathBuf, which: &'static str, source: HomError },
    #[error("{path}: {message}")]
    Reference { path: PathBuf, message: String },
    #[error("bad limits: {0}")]
    Limits(String),
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

pub fn parse_ontology_str(path: &Path, text: &str) -> Result<Ontology, FormatError> {
    let raw: RawOntology = from_json(path, text)?;
    validate(raw).map_err(|source| FormatError::Invalid { path: path.to_owned(), source })
}

pub fn parse_ontology(path: &Path) -> Result<Ontology, FormatError> {
    parse_ontology_str(path, &read(path)?)
}

/// Canonically ordered JSON for an ontology (elements sorted by id).
pub fn serialize_ontology(o: &Ontology) -> String {
    to_json(&o.to_raw())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdMap {
    #[serde(default)]
    pub concepts: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, String>,
}

impl IdMap {
    pub fn of(h: &Homomorphism) -> Self {
        IdMap { concepts: h.concept_id_map(), relations: h.relation_id_map() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseSpec {
    Path(String),
    Inline(RawOntology),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentFile {
    pub base: BaseSpec,
    pub left: String,
    pub right: String,
    pub r1: IdMap,
    pub r2: IdMap,
}

/// A parsed alignment together with the operand names it refers to.
#[derive(Debug, Clone)]
pub struct NamedAlignment {
    pub left: String,
    pub right: String,
    pub pair: VAlignmentPair,
}

fn relative(base_dir: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_owned()
    } else {
        base_dir.join(p)
    }
}

fn dir_of(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

/// Parses an alignment file, resolving operand names through `resolve`.
pub fn parse_alignment(
    path: &Path,
    resolve: &mut dyn FnMut(&str) -> Result<Arc<Ontology>, String>,
) -> Result<NamedAlignment, FormatError> {
    let file: AlignmentFile = from_json(path, &read(path)?)?;
    let base = match &file.base {
        BaseSpec::Inline(raw) => {
            validate(raw.clone()).map_err(|source| FormatError::Invalid { path: path.to_owned(), source })?
        }
        BaseSpec::Path(p) => parse_ontology(&relative(dir_of(path), p))?,
    };
    let base = Arc::new(base);
    let reference = |message: String| FormatError::Reference { path: path.to_owned(), message };
    let left = resolve(&file.left).map_err(reference)?;
    let right = resolve(&file.right).map_err(reference)?;
    let hom = |which, target: Arc<Ontology>, m: &IdMap| {
        Homomorphism::from_id_maps(base.clone(), target, &m.concepts, &m.relations)
            .map_err(|source| FormatError::InvalidHomomorphism { path: path.to_owned(), which, source })
    };
    let r1 = hom("r1", left, &file.r1)?;
    let r2 = hom("r2", right, &file.r2)?;
    let pair = VAlignmentPair::new(r1, r2).expect("both maps start at the parsed base");
    Ok(NamedAlignment { left: file.left, right: file.right, pair })
}

/// Resolves a bare operand name as an ontology file next to the alignment:
/// `<dir>/<name>`, then `<dir>/<name>.json`.
pub fn file_resolver(alignment: &Path) -> impl FnMut(&str) -> Result<Arc<Ontology>, String> {
    let dir = dir_of(alignment).to_owned();
    move |name: &str| {
        let direct = relative(&dir, name);
        let candidates = [direct.clone(), direct.with_extension("json")];
        let found =
            candidates.iter().find(|p| p.is_file()).ok_or_else(|| format!("cannot resolve ontology `{name}`"))?;
        parse_ontology(found).map(Arc::new).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitOverrides {
    pub max_members: Option<usize>,
    pub max_element_size: Option<usize>,
    pub max_rounds: Option<usize>,
}

impl LimitOverrides {
    pub fn apply(&self, mut limits: Limits) -> Limits {
        if let Some(v) = self.max_members {
            limits.max_members = v;
        }
        if let Some(v) = self.max_element_size {
            limits.max_element_size = v;
        }
        if let Some(v) = self.max_rounds {
            limits.max_rounds = v;
        }
        limits
    }

    /// Parses `max_members=100,max_rounds=8`.
    pub fn parse_env(s: &str) -> Result<Self, FormatError> {
        let mut out = LimitOverrides::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| FormatError::Limits(format!("`{part}` is not key=value")))?;
            let v: usize = v.trim().parse().map_err(|_| FormatError::Limits(format!("`{v}` is not a number")))?;
            match k.trim() {
                "max_members" => out.max_members = Some(v),
                "max_element_size" => out.max_element_size = Some(v),
                "max_rounds" => out.max_rounds = Some(v),
                other => return Err(FormatError::Limits(format!("unknown limit `{other}`"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub ontologies: BTreeMap<String, String>,
    #[serde(default)]
    pub alignments: Vec<String>,
    #[serde(default)]
    pub limits: LimitOverrides,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub path: PathBuf,
    pub ontologies: BTreeMap<String, (PathBuf, Arc<Ontology>)>,
    pub alignments: Vec<(PathBuf, NamedAlignment)>,
    pub limits: LimitOverrides,
    pub output: Option<PathBuf>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let file: ManifestFile = from_json(path, &read(path)?)?;
        let dir = dir_of(path);
        let mut ontologies = BTreeMap::new();
        for (name, p) in &file.ontologies {
            let p = relative(dir, p);
            let o = parse_ontology(&p)?;
            ontologies.insert(name.clone(), (p, Arc::new(o)));
        }
        let mut alignments = Vec::new();
        for a in &file.alignments {
            let p = relative(dir, a);
            let mut resolve = |name: &str| {
                ontologies
                    .get(name)
                    .map(|(_, o)| o.clone())
                    .ok_or_else(|| format!("`{name}` is not declared in the manifest"))
            };
            let named = parse_alignment(&p, &mut resolve)?;
            alignments.push((p, named));
        }
        Ok(Manifest {
            path: path.to_owned(),
            ontologies,
            alignments,
            limits: file.limits,
            output: file.output.map(|o| relative(dir, &o)),
        })
    }

    pub fn repository(&self) -> Repository {
        let mut repo = Repository::new();
        for (name, (_, o)) in &self.ontologies {
            repo.add(name.clone(), o.clone()).expect("manifest names are unique");
        }
        for (_, a) in &self.alignments {
            repo.align_names(&a.left, &a.right, a.pair.clone()).expect("operands resolved to these ontologies");
        }
        repo
    }

    /// Defaults, then the manifest, then `ONTOMERGE_LIMITS`.
    pub fn limits(&self, env: Option<&str>) -> Result<Limits, FormatError> {
        let mut limits = self.limits.apply(Limits::default());
        if let Some(s) = env {
            limits = LimitOverrides::parse_env(s)?.apply(limits);
        }
        Ok(limits)
    }
}
