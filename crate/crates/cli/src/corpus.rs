//! Bundled example corpus and its runner.
//!
//! Each section file holds entries with an algebra, a metric, optional free
//! parameters and a list of expectations. Every entry runs at its fixed
//! parameter samples plus a few seeded pseudo-random rational draws.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use nilsol_core::extension::{
    analyze_decomposition, azencott_wilson, extend_iwasawa, extend_non_iwasawa, extend_rank_one_nil3,
    extend_rank_one_nil4, extend_ricci_flat, is_completely_solvable, ricci_flat_companion, verify_correspondence,
    CorrespondenceReport, ExtensionResult,
};
use nilsol_core::lie::structure::{is_nilpotent, is_unimodular};
use nilsol_core::lie::{derivations, is_nice};
use nilsol_core::linalg::{in_span, is_nilpotent_matrix, is_semisimple_matrix};
use nilsol_core::metric::{einstein_check, ricci_koszul, ricci_structural, MetricLieAlgebra};
use nilsol_core::soliton::{solve_nilsoliton, table1_search, SolitonCertificate, SolitonType};
use nilsol_core::{parse_structure, Error as CoreError, LieAlgebra, Matrix, Scalar, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::expr::{eval, Bindings};
use crate::format::{parse_algebra, parse_basis, parse_matrix, parse_metric, parse_vector};

pub const SECTIONS: [(&str, &str); 4] = [
    ("section1", include_str!("../corpus/section1.json")),
    ("section2", include_str!("../corpus/section2.json")),
    ("section3", include_str!("../corpus/section3.json")),
    ("section4", include_str!("../corpus/section4.json")),
];

pub const MANIFEST: &str = include_str!("../corpus/manifest.json");

/// Tolerance for entries on the approximate backend unless overridden.
pub const APPROX_TOL: f64 = 1e-9;

fn default_draws() -> usize {
    3
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    #[default]
    Exact,
    Approx,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub section: String,
    pub entries: Vec<CorpusEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    /// Example label the expected values come from, with any correction noted.
    pub source: String,
    #[serde(default)]
    pub tags: Vec<String>,
    pub algebra: Value,
    pub metric: Value,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub parameters: Vec<String>,
    /// Fixed parameter values, one list per sample.
    #[serde(default)]
    pub samples: Vec<Vec<Value>>,
    #[serde(default = "default_draws")]
    pub random_draws: usize,
    #[serde(default)]
    pub seed: u64,
    /// Named expressions in the parameters, evaluated in order.
    #[serde(default)]
    pub derived: Vec<(String, String)>,
    /// Expressions that random draws must keep nonzero.
    #[serde(default)]
    pub nonzero: Vec<String>,
    pub expected: Vec<Expectation>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceExpect {
    #[serde(default)]
    pub rejected: Option<bool>,
    #[serde(default)]
    pub einstein: Option<bool>,
    #[serde(default)]
    pub nilsoliton_condition: Option<bool>,
    #[serde(default)]
    pub trace_condition: Option<bool>,
    /// An expression, or `null` when no common `λ` exists.
    #[serde(default)]
    pub restriction_lambda: Option<Value>,
    #[serde(default)]
    pub restriction_type: Option<String>,
    #[serde(default)]
    pub consistent: Option<bool>,
    /// Case name, or `"none"`.
    #[serde(default)]
    pub corollary: Option<String>,
    #[serde(default)]
    pub corollary_holds: Option<bool>,
    #[serde(default)]
    pub nilradical_is_ideal: Option<bool>,
    /// The restriction reproduces the nilsoliton `(λ, D)` the extension was built from.
    #[serde(default)]
    pub recovers_certificate: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AzencottWilsonExpect {
    #[serde(default)]
    pub rejected: Option<bool>,
    #[serde(default)]
    pub algebra: Option<String>,
    #[serde(default)]
    pub same_metric: Option<bool>,
    #[serde(default)]
    pub same_ricci: Option<bool>,
    #[serde(default)]
    pub pseudo_iwasawa: Option<bool>,
    #[serde(default)]
    pub completely_solvable: Option<bool>,
    /// The output, split the same way, restricts to the nilsoliton the input was built from.
    #[serde(default)]
    pub recovers_certificate: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionExpect {
    /// `iwasawa`, `rank_one_nil4`, `rank_one_nil3`, `ricci_flat` or `non_iwasawa`.
    pub construction: String,
    /// Derivations spanning `a`; the string `"D"` stands for the soliton derivation.
    #[serde(default)]
    pub a: Vec<Value>,
    #[serde(default)]
    pub a_metric: Option<Value>,
    #[serde(default)]
    pub psi: Option<Value>,
    /// Substring of the expected error message.
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub result_kind: Option<String>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub einstein: Option<bool>,
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default)]
    pub ricci_flat: Option<bool>,
    /// `[positive, negative, zero]`.
    #[serde(default)]
    pub signature: Option<[usize; 3]>,
    #[serde(default)]
    pub algebra: Option<String>,
    /// Basis change applied to the extension before comparing with `algebra`.
    #[serde(default)]
    pub basis_change: Option<Value>,
    #[serde(default)]
    pub metric: Option<Value>,
    #[serde(default)]
    pub h: Option<Value>,
    #[serde(default)]
    pub nilpotent: Option<bool>,
    #[serde(default)]
    pub unimodular: Option<bool>,
    #[serde(default)]
    pub completely_solvable: Option<bool>,
    #[serde(default)]
    pub correspondence: Option<CorrespondenceExpect>,
    #[serde(default)]
    pub azencott_wilson: Option<AzencottWilsonExpect>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    Ricci {
        #[serde(default)]
        ric: Option<Value>,
        #[serde(default)]
        operator: Option<Value>,
        #[serde(default)]
        scal: Option<String>,
    },
    Einstein {
        einstein: bool,
        #[serde(default)]
        lambda: Option<String>,
    },
    Structure {
        #[serde(default)]
        nilpotent: Option<bool>,
        #[serde(default)]
        unimodular: Option<bool>,
        #[serde(default)]
        completely_solvable: Option<bool>,
        #[serde(default)]
        nice: Option<bool>,
    },
    Soliton {
        #[serde(rename = "type")]
        soliton_type: String,
        #[serde(default)]
        lambda: Option<String>,
        #[serde(default, rename = "D")]
        d: Option<Value>,
        #[serde(default)]
        d_nilpotent: Option<bool>,
        #[serde(default)]
        d_semisimple: Option<bool>,
        #[serde(default)]
        d_in_null_space: Option<bool>,
    },
    Table1 {
        n_diag: Vec<Value>,
        intersection_dim: usize,
        nice: bool,
    },
    Decomposition {
        ideal: Value,
        complement: Value,
        #[serde(default)]
        error: Option<String>,
        #[serde(default)]
        flags: BTreeMap<String, bool>,
        #[serde(default)]
        h: Option<Value>,
        #[serde(default)]
        ad_complement: Option<Vec<Value>>,
        #[serde(default)]
        correspondence: Option<CorrespondenceExpect>,
        #[serde(default)]
        azencott_wilson: Option<AzencottWilsonExpect>,
    },
    Extension(ExtensionExpect),
    Companion {
        exists: bool,
        #[serde(default)]
        candidates: Option<usize>,
    },
}

impl Expectation {
    pub fn kind(&self) -> &'static str {
        match self {
            Expectation::Ricci { .. } => "ricci",
            Expectation::Einstein { .. } => "einstein",
            Expectation::Structure { .. } => "structure",
            Expectation::Soliton { .. } => "soliton",
            Expectation::Table1 { .. } => "table1",
            Expectation::Decomposition { .. } => "decomposition",
            Expectation::Extension(_) => "extension",
            Expectation::Companion { .. } => "companion",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<String>,
}

/// Summary of a soliton certificate met while running an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub origin: String,
    #[serde(rename = "type")]
    pub soliton_type: String,
    pub lambda: String,
    pub trace_identities: bool,
    /// `sign⟨e0, e0⟩ = −sign λ` on the rank-one extension, for `Nil4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_one_sign: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub bindings: BTreeMap<String, String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckOutcome>,
    pub certificates: Vec<CertificateRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub id: String,
    pub section: String,
    pub source: String,
    pub passed: bool,
    pub instances: Vec<InstanceReport>,
    pub elapsed_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub filter: Option<String>,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<EntryReport>,
    pub elapsed_us: u64,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// The report with every timing field zeroed.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        r.elapsed_us = 0;
        for e in &mut r.entries {
            e.elapsed_us = 0;
        }
        r
    }

    pub fn failures(&self) -> impl Iterator<Item = (&EntryReport, &InstanceReport, Option<&CheckOutcome>)> {
        self.entries.iter().flat_map(|e| {
            e.instances.iter().filter(|i| !i.passed).flat_map(move |i| {
                let failed: Vec<_> = i.checks.iter().filter(|c| !c.passed).map(Some).collect();
                let failed = if failed.is_empty() { vec![None] } else { failed };
                failed.into_iter().map(move |c| (e, i, c))
            })
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestItem {
    pub section: String,
    pub label: String,
    pub entries: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub examples: Vec<ManifestItem>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{name}: {source}")]
    Json { name: String, source: serde_json::Error },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("duplicate entry id {0}")]
    Duplicate(String),
}

pub type Corpus = Vec<(String, CorpusEntry)>;

fn parse_file(name: &str, text: &str) -> Result<CorpusFile, CorpusError> {
    serde_json::from_str(text).map_err(|source| CorpusError::Json { name: name.to_string(), source })
}

fn collect(files: Vec<CorpusFile>) -> Result<Corpus, CorpusError> {
    let mut out: Corpus = Vec::new();
    for f in files {
        for e in f.entries {
            if out.iter().any(|(_, x)| x.id == e.id) {
                return Err(CorpusError::Duplicate(e.id));
            }
            out.push((f.section.clone(), e));
        }
    }
    Ok(out)
}

/// The corpus compiled into the binary.
pub fn bundled() -> Result<Corpus, CorpusError> {
    collect(SECTIONS.iter().map(|(n, t)| parse_file(n, t)).collect::<Result<_, _>>()?)
}

/// Every `*.json` file in `dir` except the manifest, in name order.
pub fn load_dir(dir: &Path) -> Result<Corpus, CorpusError> {
    let io = |source| CorpusError::Io { path: dir.display().to_string(), source };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && p.file_name().is_some_and(|n| n != "manifest.json"))
        .collect();
    paths.sort();
    let mut files = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|source| CorpusError::Io { path: p.display().to_string(), source })?;
        files.push(parse_file(&p.display().to_string(), &text)?);
    }
    collect(files)
}

pub fn manifest() -> Result<Manifest, CorpusError> {
    serde_json::from_str(MANIFEST).map_err(|source| CorpusError::Json { name: "manifest".into(), source })
}

/// Whether `filter` is a substring of the id, section, a tag or an expectation kind.
pub fn matches(section: &str, e: &CorpusEntry, filter: &str) -> bool {
    e.id.contains(filter)
        || section.contains(filter)
        || e.tags.iter().any(|t| t.contains(filter))
        || e.expected.iter().any(|x| x.kind().contains(filter))
}

/// Run every entry matching `filter`; the report is ordered by entry id.
pub fn run(corpus: &Corpus, filter: Option<&str>) -> RunReport {
    let start = Instant::now();
    let selected: Vec<_> = corpus.iter().filter(|(s, e)| filter.is_none_or(|f| matches(s, e, f))).collect();
    let mut entries: Vec<EntryReport> = selected.par_iter().map(|(s, e)| run_entry(s, e)).collect();
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = entries.iter().filter(|e| e.passed).count();
    RunReport {
        filter: filter.map(str::to_string),
        total: entries.len(),
        passed,
        failed: entries.len() - passed,
        entries,
        elapsed_us: start.elapsed().as_micros() as u64,
    }
}

pub fn run_entry(section: &str, e: &CorpusEntry) -> EntryReport {
    let start = Instant::now();
    let mut instances: Vec<InstanceReport> = e.samples.iter().map(|s| run_fixed(e, s)).collect();
    if !e.parameters.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(e.seed);
        for _ in 0..e.random_draws {
            instances.push(run_random(e, &mut rng));
        }
    }
    if e.parameters.is_empty() && e.samples.is_empty() {
        instances.push(run_fixed(e, &[]));
    }
    EntryReport {
        id: e.id.clone(),
        section: section.to_string(),
        source: e.source.clone(),
        passed: instances.iter().all(|i| i.passed),
        instances,
        elapsed_us: start.elapsed().as_micros() as u64,
    }
}

fn failed_instance(bindings: &Bindings, error: String) -> InstanceReport {
    InstanceReport { bindings: show_bindings(bindings), passed: false, error: Some(error), checks: Vec::new(), certificates: Vec::new() }
}

fn show_bindings(b: &Bindings) -> BTreeMap<String, String> {
    b.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

fn run_fixed(e: &CorpusEntry, sample: &[Value]) -> InstanceReport {
    let mut b = Bindings::new();
    if sample.len() != e.parameters.len() {
        return failed_instance(&b, format!("sample has {} values for {} parameters", sample.len(), e.parameters.len()));
    }
    for (name, v) in e.parameters.iter().zip(sample) {
        let text = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        match eval(&text, &b) {
            Ok(x) => {
                b.insert(name.clone(), x);
            }
            Err(err) => return failed_instance(&b, err.to_string()),
        }
    }
    match prepare(e, b.clone()) {
        Ok(inst) => run_instance(e, inst),
        Err(msg) => failed_instance(&b, msg),
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let mut p = 0;
    while p == 0 {
        p = rng.gen_range(-9i64..=9);
    }
    Scalar::ratio(p, rng.gen_range(1i64..=6))
}

fn run_random(e: &CorpusEntry, rng: &mut ChaCha8Rng) -> InstanceReport {
    let mut last = String::new();
    for _ in 0..200 {
        let b: Bindings = e.parameters.iter().map(|p| (p.clone(), random_rational(rng))).collect();
        match prepare(e, b) {
            Ok(inst) => return run_instance(e, inst),
            Err(msg) => last = msg,
        }
    }
    failed_instance(&Bindings::new(), format!("no admissible random draw: {last}"))
}

struct Instance {
    vars: Bindings,
    m: MetricLieAlgebra,
    tol: Option<f64>,
}

fn prepare(e: &CorpusEntry, mut vars: Bindings) -> Result<Instance, String> {
    for (name, text) in &e.derived {
        let v = eval(text, &vars).map_err(|x| x.to_string())?;
        vars.insert(name.clone(), v);
    }
    for text in &e.nonzero {
        if eval(text, &vars).map_err(|x| x.to_string())?.is_zero() {
            return Err(format!("{text} vanishes"));
        }
    }
    let l = parse_algebra(&e.algebra, &vars).map_err(|x| x.to_string())?;
    let g = parse_metric(&e.metric, l.dim(), &vars).map_err(|x| x.to_string())?;
    let approx = e.backend == Backend::Approx || !g.is_exact();
    let (l, g) = if approx { (l.to_approx(), g.to_approx()) } else { (l, g) };
    let m = MetricLieAlgebra::from_gram(l, g).map_err(|x| x.to_string())?;
    let tol = e.tol.or(approx.then_some(APPROX_TOL));
    Ok(Instance { vars, m, tol })
}

/// Collects check outcomes for one instance.
struct Checker<'a> {
    vars: &'a Bindings,
    tol: Option<f64>,
    checks: Vec<CheckOutcome>,
    certificates: Vec<CertificateRecord>,
}

type Res<T> = Result<T, String>;

fn err<T: ToString>(e: T) -> String {
    e.to_string()
}

impl Checker<'_> {
    fn push(&mut self, name: impl Into<String>, passed: bool, expected: impl ToString, computed: impl ToString) {
        let (expected, computed) =
            if passed { (None, None) } else { (Some(expected.to_string()), Some(computed.to_string())) };
        self.checks.push(CheckOutcome { name: name.into(), passed, expected, computed });
    }

    fn flag(&mut self, name: impl Into<String>, expected: Option<bool>, computed: bool) {
        if let Some(x) = expected {
            self.push(name, x == computed, x, computed);
        }
    }

    fn scalar_eq(&self, a: &Scalar, b: &Scalar) -> bool {
        match self.tol {
            Some(t) if !(a.is_exact() && b.is_exact()) => a.approx_eq(b, t),
            _ => a == b,
        }
    }

    fn matrix_eq(&self, a: &Matrix, b: &Matrix) -> bool {
        if a.rows() != b.rows() || a.cols() != b.cols() {
            return false;
        }
        match self.tol {
            Some(t) if !(a.is_exact() && b.is_exact()) => a.approx_eq(b, t),
            _ => a == b,
        }
    }

    fn scalar(&mut self, name: &str, expected: &str, computed: &Scalar) -> Res<()> {
        let x = eval(expected, self.vars).map_err(err)?;
        let ok = self.scalar_eq(&x, computed);
        self.push(name, ok, &x, computed);
        Ok(())
    }

    fn optional_scalar(&mut self, name: &str, expected: &Value, computed: Option<&Scalar>) -> Res<()> {
        match (expected, computed) {
            (Value::Null, None) => self.push(name, true, "", ""),
            (Value::Null, Some(c)) => self.push(name, false, "none", c),
            (v, Some(c)) => {
                let x = scalar_of(v, self.vars)?;
                let ok = self.scalar_eq(&x, c);
                self.push(name, ok, &x, c);
            }
            (v, None) => self.push(name, false, v, "none"),
        }
        Ok(())
    }

    fn matrix(&mut self, name: &str, expected: &Matrix, computed: &Matrix) {
        let ok = self.matrix_eq(expected, computed);
        self.push(name, ok, expected, computed);
    }

    fn vector(&mut self, name: &str, expected: &Value, computed: &[Scalar]) -> Res<()> {
        let x = parse_vector(expected, computed.len(), self.vars).map_err(err)?;
        let ok = x.len() == computed.len() && x.iter().zip(computed).all(|(a, b)| self.scalar_eq(a, b));
        self.push(name, ok, join(&x), join(computed));
        Ok(())
    }

    fn record(&mut self, origin: &str, m: &MetricLieAlgebra, c: &SolitonCertificate) {
        if c.soliton_type == SolitonType::NotSoliton {
            return;
        }
        let rank_one_sign = (c.soliton_type == SolitonType::Nil4).then(|| match extend_rank_one_nil4(m, c) {
            Ok(ext) => {
                let n = m.dim();
                ext.extended.metric().gram().get(n, n).signum() == -c.lambda.signum()
            }
            Err(_) => false,
        });
        self.certificates.push(CertificateRecord {
            origin: origin.to_string(),
            soliton_type: c.soliton_type.to_string(),
            lambda: c.lambda.to_string(),
            trace_identities: c.checks.tr_d_sq_identity && c.checks.tr_ric_sq_identity,
            rank_one_sign,
        });
        self.push(format!("{origin}: certificate checks"), c.checks.all(), "all hold", format!("{:?}", c.checks));
        if let Some(ok) = rank_one_sign {
            self.push(format!("{origin}: rank-one sign"), ok, "sign <e0,e0> = -sign lambda", "violated");
        }
    }
}

fn join(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(Scalar::to_string).collect();
    format!("({})", parts.join(", "))
}

fn scalar_of(v: &Value, vars: &Bindings) -> Res<Scalar> {
    match v {
        Value::String(s) => eval(s, vars).map_err(err),
        Value::Number(n) => eval(&n.to_string(), vars).map_err(err),
        other => Err(format!("expected a scalar, found {other}")),
    }
}

fn matrix_of(v: &Value, n: usize, vars: &Bindings, d: Option<&Matrix>) -> Res<Matrix> {
    if v.as_str() == Some("D") {
        return d.cloned().ok_or_else(|| "\"D\" used without a soliton certificate".to_string());
    }
    parse_matrix(v, n, vars).map_err(err)
}

fn run_instance(e: &CorpusEntry, inst: Instance) -> InstanceReport {
    let Instance { vars, m, tol } = inst;
    let mut ck = Checker { vars: &vars, tol, checks: Vec::new(), certificates: Vec::new() };
    let error = run_checks(e, &m, &mut ck).err();
    let passed = error.is_none() && ck.checks.iter().all(|c| c.passed);
    InstanceReport { bindings: show_bindings(&vars), passed, error, checks: ck.checks, certificates: ck.certificates }
}

fn run_checks(e: &CorpusEntry, m: &MetricLieAlgebra, ck: &mut Checker) -> Res<()> {
    let s = ricci_structural(m);
    let k = ricci_koszul(m);
    let agree = s.ric == k.ric && s.ricci_operator == k.ricci_operator && s.scal == k.scal;
    ck.push("structural equals Koszul", agree, k.ric.as_matrix(), s.ric.as_matrix());
    let nilpotent = is_nilpotent(m.algebra());
    let cert = if nilpotent { Some(solve_nilsoliton(m).map_err(err)?) } else { None };
    if let Some(c) = &cert {
        ck.record("metric", m, c);
    }
    for x in &e.expected {
        check(x, m, cert.as_ref(), ck)?;
    }
    Ok(())
}

fn check(x: &Expectation, m: &MetricLieAlgebra, cert: Option<&SolitonCertificate>, ck: &mut Checker) -> Res<()> {
    let n = m.dim();
    let vars = ck.vars;
    match x {
        Expectation::Ricci { ric, operator, scal } => {
            let r = m.ricci();
            if let Some(v) = ric {
                ck.matrix("ric", &parse_metric(v, n, vars).map_err(err)?, r.ric.as_matrix());
            }
            if let Some(v) = operator {
                ck.matrix("Ricci operator", &parse_matrix(v, n, vars).map_err(err)?, &r.ricci_operator);
            }
            if let Some(v) = scal {
                ck.scalar("scalar curvature", v, &r.scal)?;
            }
        }
        Expectation::Einstein { einstein, lambda } => {
            let c = einstein_check(m);
            ck.flag("einstein", Some(*einstein), c.is_einstein);
            if let Some(l) = lambda {
                match &c.lambda {
                    Some(v) => ck.scalar("einstein lambda", l, v)?,
                    None => ck.push("einstein lambda", false, l, "none"),
                }
            }
        }
        Expectation::Structure { nilpotent, unimodular, completely_solvable, nice } => {
            let l = m.algebra();
            ck.flag("nilpotent", *nilpotent, is_nilpotent(l));
            ck.flag("unimodular", *unimodular, is_unimodular(l));
            if completely_solvable.is_some() {
                ck.flag("completely solvable", *completely_solvable, is_completely_solvable(l).map_err(err)?);
            }
            ck.flag("nice", *nice, is_nice(l));
        }
        Expectation::Soliton { soliton_type, lambda, d, d_nilpotent, d_semisimple, d_in_null_space } => {
            let c = cert.ok_or("soliton expectation on a non-nilpotent algebra")?;
            let t = c.soliton_type.to_string();
            ck.push("soliton type", &t == soliton_type, soliton_type, &t);
            if let Some(l) = lambda {
                ck.scalar("soliton lambda", l, &c.lambda)?;
            }
            if let Some(v) = d {
                ck.matrix("soliton D", &parse_matrix(v, n, vars).map_err(err)?, &c.d);
            }
            ck.flag("D nilpotent", *d_nilpotent, is_nilpotent_matrix(&c.d));
            if d_semisimple.is_some() {
                ck.flag("D semisimple", *d_semisimple, is_semisimple_matrix(&c.d).map_err(err)?);
            }
            if d_in_null_space.is_some() {
                let der = derivations(m.algebra());
                let null: Vec<Vector> = der.null_basis.iter().map(Matrix::vectorize).collect();
                ck.flag("D in null space of the trace form", *d_in_null_space, in_span(&null, &c.d.vectorize()));
            }
        }
        Expectation::Table1 { n_diag, intersection_dim, nice } => {
            let t = table1_search(m.algebra()).map_err(err)?;
            let diag = n_diag.iter().map(|v| scalar_of(v, vars)).collect::<Res<Vec<_>>>()?;
            ck.matrix("Nikolayevsky derivation", &Matrix::diag(&diag), &t.n);
            ck.push("centraliser dimension", t.intersection.len() == *intersection_dim, intersection_dim, t.intersection.len());
            ck.flag("nice", Some(*nice), is_nice(m.algebra()));
        }
        Expectation::Decomposition { ideal, complement, error, flags, h, ad_complement, correspondence, azencott_wilson: aw } => {
            let ideal = parse_basis(ideal, n, vars).map_err(err)?;
            let complement = parse_basis(complement, n, vars).map_err(err)?;
            let d = match (analyze_decomposition(m, &ideal, &complement), error) {
                (Err(e), Some(want)) => {
                    let got = e.to_string();
                    ck.push("decomposition error", got.contains(want.as_str()), want, got);
                    return Ok(());
                }
                (Ok(_), Some(want)) => {
                    ck.push("decomposition error", false, want, "accepted");
                    return Ok(());
                }
                (Err(e), None) => return Err(e.to_string()),
                (Ok(d), None) => d,
            };
            let f = &d.flags;
            let table = [
                ("is_standard", f.is_standard),
                ("is_orthogonal", f.is_orthogonal),
                ("ideal_nondegenerate", f.ideal_nondegenerate),
                ("is_pseudo_iwasawa", f.is_pseudo_iwasawa),
                ("each_adx_normal", f.each_adx_normal),
                ("each_adx_star_is_derivation", f.each_adx_star_is_derivation),
            ];
            for (name, want) in flags {
                let got = table.iter().find(|(k, _)| k == name).map(|p| p.1).ok_or(format!("unknown flag {name}"))?;
                ck.flag(name.as_str(), Some(*want), got);
            }
            if let Some(v) = h {
                ck.vector("H", v, &d.h)?;
            }
            if let Some(list) = ad_complement {
                let k = ideal.len();
                for (i, v) in list.iter().enumerate() {
                    let want = parse_matrix(v, k, vars).map_err(err)?;
                    match d.ad_complement.get(i) {
                        Some(got) => ck.matrix(&format!("ad of complement vector {}", i + 1), &want, got),
                        None => ck.push(format!("ad of complement vector {}", i + 1), false, &want, "missing"),
                    }
                }
            }
            if let Some(c) = correspondence {
                check_correspondence("", c, &d, None, ck)?;
            }
            if let Some(a) = aw {
                check_azencott_wilson("", a, &d, m, None, ck)?;
            }
        }
        Expectation::Extension(x) => check_extension(x, m, cert, ck)?,
        Expectation::Companion { exists, candidates } => {
            let c = cert.ok_or("companion expectation on a non-nilpotent algebra")?;
            let a = ricci_flat_companion(m, &c.d).map_err(err)?;
            ck.flag("companion exists", Some(*exists), a.exists);
            if let Some(k) = candidates {
                ck.push("companion candidates", a.candidates.len() == *k, k, a.candidates.len());
            }
        }
    }
    Ok(())
}

fn check_correspondence(
    prefix: &str,
    x: &CorrespondenceExpect,
    d: &nilsol_core::extension::Decomposition,
    cert: Option<&SolitonCertificate>,
    ck: &mut Checker,
) -> Res<()> {
    let r: CorrespondenceReport = match verify_correspondence(d) {
        Err(CoreError::NotPseudoIwasawa) => {
            ck.push(&format!("{prefix}correspondence rejected"), x.rejected == Some(true), "accepted", "rejected");
            return Ok(());
        }
        Err(e) => return Err(e.to_string()),
        Ok(r) => r,
    };
    if x.rejected == Some(true) {
        ck.push(&format!("{prefix}correspondence rejected"), false, "rejected", "accepted");
        return Ok(());
    }
    ck.flag(&format!("{prefix}correspondence einstein"), x.einstein, r.einstein);
    ck.flag(&format!("{prefix}nilsoliton condition"), x.nilsoliton_condition, r.nilsoliton_condition);
    ck.flag(&format!("{prefix}trace condition"), x.trace_condition, r.trace_condition);
    ck.flag(&format!("{prefix}correspondence consistent"), x.consistent, r.consistent);
    if let Some(v) = &x.restriction_lambda {
        ck.optional_scalar(&format!("{prefix}restriction lambda"), v, r.restriction_lambda.as_ref())?;
    }
    if let Some(t) = &x.restriction_type {
        let got = r.restriction_type.to_string();
        ck.push(&format!("{prefix}restriction type"), &got == t, t, got);
    }
    if let Some(c) = &x.corollary {
        let got = r.corollary.map_or("none".to_string(), |c| format!("{c:?}"));
        ck.push(&format!("{prefix}structure case"), &got == c, c, got);
    }
    if let Some(h) = x.corollary_holds {
        ck.push(&format!("{prefix}structure case holds"), r.corollary_holds == Some(h), h, format!("{:?}", r.corollary_holds));
    }
    if let Some(h) = x.nilradical_is_ideal {
        ck.push(&format!("{prefix}nilradical is the ideal"), r.nilradical_is_ideal == Some(h), h, format!("{:?}", r.nilradical_is_ideal));
    }
    if x.recovers_certificate == Some(true) {
        let c = cert.ok_or("recovers_certificate needs a certificate")?;
        let same_lambda = r.restriction_lambda.as_ref().is_some_and(|l| ck.scalar_eq(l, &c.lambda));
        let ok = same_lambda && ck.matrix_eq(&r.d, &c.d) && r.restriction_type == c.soliton_type;
        ck.push(&format!("{prefix}restriction recovers the certificate"),
            ok,
            format!("{} lambda={} D={}", c.soliton_type, c.lambda, c.d),
            format!("{} lambda={:?} D={}", r.restriction_type, r.restriction_lambda.as_ref().map(Scalar::to_string), r.d),
        );
    }
    Ok(())
}

fn check_azencott_wilson(
    prefix: &str,
    x: &AzencottWilsonExpect,
    d: &nilsol_core::extension::Decomposition,
    m: &MetricLieAlgebra,
    cert: Option<&SolitonCertificate>,
    ck: &mut Checker,
) -> Res<()> {
    let aw = match azencott_wilson(d) {
        Err(e) => {
            ck.push(&format!("{prefix}Azencott-Wilson rejected"), x.rejected == Some(true), "accepted", e);
            return Ok(());
        }
        Ok(aw) => aw,
    };
    if x.rejected == Some(true) {
        ck.push(&format!("{prefix}Azencott-Wilson rejected"), false, "rejected", "accepted");
        return Ok(());
    }
    if let Some(text) = &x.algebra {
        let want = parse_structure(text).map_err(err)?;
        let want = if aw.is_exact() { want } else { want.to_approx() };
        let ok = algebra_eq(ck, &want, aw.algebra());
        ck.push(&format!("{prefix}Azencott-Wilson algebra"), ok, text, nilsol_core::lie::to_notation(aw.algebra()));
    }
    if x.same_metric.is_some() {
        let ok = ck.matrix_eq(aw.metric().gram().as_matrix(), m.metric().gram().as_matrix());
        ck.flag(&format!("{prefix}Azencott-Wilson keeps the metric"), x.same_metric, ok);
    }
    if x.same_ricci.is_some() {
        let ok = ck.matrix_eq(aw.ricci().ric.as_matrix(), m.ricci().ric.as_matrix());
        ck.flag(&format!("{prefix}Azencott-Wilson keeps the Ricci tensor"), x.same_ricci, ok);
    }
    let again = analyze_decomposition(&aw, &d.ideal_basis, &d.complement_basis).map_err(err)?;
    ck.flag(&format!("{prefix}Azencott-Wilson output is pseudo-Iwasawa"), x.pseudo_iwasawa, again.flags.is_pseudo_iwasawa);
    if x.recovers_certificate == Some(true) {
        let c = CorrespondenceExpect { consistent: Some(true), recovers_certificate: Some(true), ..Default::default() };
        check_correspondence(&format!("{prefix}Azencott-Wilson output, "), &c, &again, cert, ck)?;
    }
    if x.completely_solvable.is_some() {
        ck.flag(&format!("{prefix}Azencott-Wilson output completely solvable"), x.completely_solvable, is_completely_solvable(aw.algebra()).map_err(err)?);
    }
    Ok(())
}

fn algebra_eq(ck: &Checker, a: &LieAlgebra, b: &LieAlgebra) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let n = a.dim();
    (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| ck.scalar_eq(a.constant(i, j, k), b.constant(i, j, k)))))
}

fn build_extension(x: &ExtensionExpect, m: &MetricLieAlgebra, cert: Option<&SolitonCertificate>, vars: &Bindings) -> Res<nilsol_core::Result<ExtensionResult>> {
    let n = m.dim();
    let d = cert.map(|c| &c.d);
    let convert = |mtx: Matrix| if m.is_exact() { mtx } else { mtx.to_approx() };
    let a: Vec<Matrix> = x.a.iter().map(|v| matrix_of(v, n, vars, d).map(convert)).collect::<Res<_>>()?;
    let k = a.len();
    let a_metric = x.a_metric.as_ref().map(|v| parse_metric(v, k, vars).map(convert)).transpose().map_err(err)?;
    let need = || cert.ok_or_else(|| "construction needs a nilpotent algebra".to_string());
    Ok(match x.construction.as_str() {
        "iwasawa" => extend_iwasawa(m, need()?, &a),
        "rank_one_nil4" => extend_rank_one_nil4(m, need()?),
        "rank_one_nil3" => {
            let psi = x.psi.as_ref().ok_or("rank_one_nil3 needs psi")?;
            extend_rank_one_nil3(m, &convert(parse_matrix(psi, n, vars).map_err(err)?))
        }
        "ricci_flat" => {
            let g = a_metric.ok_or("ricci_flat needs a_metric")?;
            extend_ricci_flat(m, need()?, &a, &g)
        }
        "non_iwasawa" => extend_non_iwasawa(m, need()?, &a, a_metric.as_ref()),
        other => return Err(format!("unknown construction {other}")),
    })
}

fn check_extension(x: &ExtensionExpect, m: &MetricLieAlgebra, cert: Option<&SolitonCertificate>, ck: &mut Checker) -> Res<()> {
    let vars = ck.vars;
    let name = &x.construction;
    let ext = match (build_extension(x, m, cert, vars)?, &x.error) {
        (Err(e), Some(want)) => {
            let got = e.to_string();
            ck.push(format!("{name}: error"), got.contains(want.as_str()), want, got);
            return Ok(());
        }
        (Ok(_), Some(want)) => {
            ck.push(format!("{name}: error"), false, want, "accepted");
            return Ok(());
        }
        (Err(e), None) => return Err(format!("{name}: {e}")),
        (Ok(ext), None) => ext,
    };
    if let Some(c) = cert {
        ck.record(name, m, c);
    }
    let big = &ext.extended;
    let nn = big.dim();
    if let Some(k) = &x.result_kind {
        ck.push(format!("{name}: kind"), &ext.kind.to_string() == k, k, ext.kind);
    }
    if let Some(dim) = x.dim {
        ck.push(format!("{name}: dimension"), dim == nn, dim, nn);
    }
    ck.flag(&format!("{name}: einstein"), x.einstein, ext.verification.einstein);
    if let Some(l) = &x.lambda {
        match &ext.verification.lambda {
            Some(v) => ck.scalar(&format!("{name}: lambda"), l, v)?,
            None => ck.push(format!("{name}: lambda"), false, l, "none"),
        }
    }
    if x.ricci_flat.is_some() {
        let flat = match ck.tol {
            Some(t) => big.ricci().ric.is_zero_tol(t),
            None => big.ricci().ric.is_zero(),
        };
        ck.flag(&format!("{name}: Ricci-flat"), x.ricci_flat, flat);
    }
    if let Some([p, q, r]) = x.signature {
        let s = ext.verification.signature;
        ck.push(format!("{name}: signature"), (s.positive, s.negative, s.zero) == (p, q, r), format!("({p},{q},{r})"), s);
    }
    if let Some(text) = &x.algebra {
        let want = parse_structure(text).map_err(err)?;
        let want = if big.is_exact() { want } else { want.to_approx() };
        let got = match &x.basis_change {
            Some(p) => big.algebra().change_basis(&parse_matrix(p, nn, vars).map_err(err)?).map_err(err)?,
            None => big.algebra().clone(),
        };
        let ok = algebra_eq(ck, &want, &got);
        ck.push(format!("{name}: algebra"), ok, text, nilsol_core::lie::to_notation(&got));
    }
    if let Some(v) = &x.metric {
        ck.matrix(&format!("{name}: metric"), &parse_metric(v, nn, vars).map_err(err)?, big.metric().gram().as_matrix());
    }
    if let Some(v) = &x.h {
        ck.vector(&format!("{name}: H"), v, &ext.decomposition.h)?;
    }
    ck.flag(&format!("{name}: nilpotent"), x.nilpotent, is_nilpotent(big.algebra()));
    ck.flag(&format!("{name}: unimodular"), x.unimodular, is_unimodular(big.algebra()));
    if x.completely_solvable.is_some() {
        ck.flag(&format!("{name}: completely solvable"), x.completely_solvable, is_completely_solvable(big.algebra()).map_err(err)?);
    }
    if let Some(c) = &x.correspondence {
        check_correspondence(&format!("{name}: "), c, &ext.decomposition, cert, ck)?;
    }
    if let Some(a) = &x.azencott_wilson {
        check_azencott_wilson(&format!("{name}: "), a, &ext.decomposition, big, cert, ck)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(json: &str) -> CorpusEntry {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn heisenberg_entry_runs() {
        let e = entry(
            r#"{"id": "h", "source": "test", "algebra": "(0,0,e^{12})", "metric": {"diag": [1, 1, "g"]},
                "parameters": ["g"], "samples": [["2"]], "seed": 7,
                "expected": [{"kind": "ricci", "operator": {"diag": ["-g/2", "-g/2", "g/2"]}},
                             {"kind": "soliton", "type": "Nil4", "lambda": "-3g/2"}]}"#,
        );
        let r = run_entry("s", &e);
        assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        assert_eq!(r.instances.len(), 4);
        assert_eq!(r.instances[0].bindings["g"], "2");
        assert!(r.instances.iter().all(|i| i.certificates.len() == 1));
    }

    #[test]
    fn mismatch_reports_both_sides() {
        let e = entry(
            r#"{"id": "h", "source": "test", "algebra": "(0,0,e^{12})", "metric": {"diag": [1, 1, 1]},
                "expected": [{"kind": "einstein", "einstein": true}]}"#,
        );
        let r = run_entry("s", &e);
        assert!(!r.passed);
        let c = r.instances[0].checks.iter().find(|c| c.name == "einstein").unwrap();
        assert_eq!(c.expected.as_deref(), Some("true"));
        assert_eq!(c.computed.as_deref(), Some("false"));
    }

    #[test]
    fn random_draws_are_seeded() {
        let e = entry(
            r#"{"id": "h", "source": "test", "algebra": "(0,0,e^{12})", "metric": {"diag": ["a", "b", 1]},
                "parameters": ["a", "b"], "seed": 11, "expected": []}"#,
        );
        let a = run_entry("s", &e);
        let b = run_entry("s", &e);
        assert_eq!(a.instances, b.instances);
        assert_eq!(a.instances.len(), 3);
    }

    #[test]
    fn bundled_corpus_parses() {
        let c = bundled().unwrap();
        assert!(c.len() >= 20);
        assert!(manifest().is_ok());
    }
}
