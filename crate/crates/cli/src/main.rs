use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilsol::corpus::{self, RunReport};
use nilsol::expr::Bindings;
use nilsol::format::{self, FormatError};
use nilsol_core::extension::{
    analyze_decomposition, azencott_wilson, extend_iwasawa, extend_non_iwasawa, extend_rank_one_nil3,
    extend_rank_one_nil4, extend_ricci_flat, verify_correspondence,
};
use nilsol_core::lie::{derivations, is_nice, structural_report};
use nilsol_core::metric::{einstein_check, ricci_koszul, ricci_structural, ricci_structural_h, MetricLieAlgebra};
use nilsol_core::soliton::{nikolayevsky, solve_nilsoliton, table1_search, SolitonType};
use nilsol_core::Matrix;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "nilsol", version, about = "Nilsolitons and Einstein solvmanifolds in indefinite signature")]
struct Cli {
    /// Indented JSON (and a text summary for corpus runs).
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct AlgebraArg {
    /// Structure equations such as "(0,0,e^{12})", JSON, or @file.
    #[arg(long)]
    algebra: String,
}

#[derive(Args)]
struct MetricArgs {
    #[command(flatten)]
    algebra: AlgebraArg,
    /// `diag:1,1,-1`, `entries:1,3,1;2,2,1` (upper triangle, 1-based), JSON, or @file.
    #[arg(long)]
    metric: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Structural,
    Koszul,
    MeanCurvature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Iwasawa,
    RankOneNil4,
    RankOneNil3,
    RicciFlat,
    NonIwasawa,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an algebra and report its structure.
    Parse(AlgebraArg),
    /// Ricci tensor, Ricci operator and Einstein test.
    Ricci {
        #[command(flatten)]
        input: MetricArgs,
        #[arg(long, value_enum, default_value = "structural")]
        method: Method,
    },
    /// Solve the nilsoliton equation.
    Soliton(MetricArgs),
    /// Nikolayevsky derivation and its centraliser in the trace-form null space.
    Nik(AlgebraArg),
    /// Basis of the derivation algebra.
    Derivations(AlgebraArg),
    /// Analyse a splitting into an ideal and a complement.
    Decompose {
        #[command(flatten)]
        input: MetricArgs,
        /// Ideal basis: 1-based indices "1,2,3" or a JSON list of vectors.
        #[arg(long)]
        ideal: String,
        /// Complement basis, same format as --ideal.
        #[arg(long)]
        complement: String,
        /// Also verify the Einstein/nilsoliton correspondence.
        #[arg(long)]
        correspondence: bool,
        /// Also build the isometric pseudo-Iwasawa algebra.
        #[arg(long)]
        azencott_wilson: bool,
    },
    /// Extend a nilsoliton to an Einstein solvable algebra.
    Extend {
        #[command(flatten)]
        input: MetricArgs,
        #[arg(long, value_enum)]
        construction: Construction,
        /// JSON list of derivations spanning a; "D" is the soliton derivation.
        #[arg(long, default_value = "[]")]
        a: String,
        /// Metric on a, in the --metric formats.
        #[arg(long)]
        a_metric: Option<String>,
        /// Derivation for the Nil3 rank-one construction, JSON matrix.
        #[arg(long)]
        psi: Option<String>,
    },
    /// Run the bundled example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Run entries whose id, section, tag or expectation kind contains the filter.
    Run {
        #[arg(long)]
        filter: Option<String>,
        /// Directory of corpus JSON files instead of the bundled corpus.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// List entry ids with their sections.
    List,
}

enum Failure {
    Input(String, Option<usize>),
    Verification(Value),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let offset = match &e {
            FormatError::Expr(x) => Some(x.offset),
            FormatError::Core(nilsol_core::Error::Parse { offset, .. }) => Some(*offset),
            FormatError::Json(j) => Some(j.column()),
            _ => None,
        };
        Failure::Input(e.to_string(), offset)
    }
}

impl From<nilsol_core::Error> for Failure {
    fn from(e: nilsol_core::Error) -> Self {
        FormatError::from(e).into()
    }
}

type Outcome = Result<Value, Failure>;

fn emit(v: &Value, pretty: bool) {
    if pretty {
        println!("{}", serde_json::to_string_pretty(v).expect("serialisable"));
    } else {
        println!("{v}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Corpus { action } = &cli.command {
        return corpus_command(action, cli.pretty);
    }
    match dispatch(&cli.command) {
        Ok(v) => {
            emit(&v, cli.pretty);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(v)) => {
            emit(&v, cli.pretty);
            ExitCode::from(1)
        }
        Err(Failure::Input(message, offset)) => {
            eprintln!("{}", json!({ "error": message, "offset": offset }));
            ExitCode::from(2)
        }
    }
}

fn metric_algebra(input: &MetricArgs) -> Result<MetricLieAlgebra, Failure> {
    let l = format::parse_algebra_arg(&input.algebra.algebra)?;
    let g = format::parse_metric_arg(&input.metric, l.dim())?;
    let (l, g) = if g.is_exact() { (l, g) } else { (l.to_approx(), g) };
    Ok(MetricLieAlgebra::from_gram(l, g)?)
}

fn basis_arg(text: &str, n: usize) -> Result<Vec<nilsol_core::Vector>, Failure> {
    let text = text.trim();
    let v: Value = if text.starts_with('[') {
        serde_json::from_str(text).map_err(FormatError::from)?
    } else {
        let idx = text
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|_| Failure::Input(format!("bad index {s:?}"), None)))
            .collect::<Result<Vec<_>, _>>()?;
        json!(idx)
    };
    Ok(format::parse_basis(&v, n, &Bindings::new())?)
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Parse(a) => {
            let l = format::parse_algebra_arg(&a.algebra)?;
            Ok(json!({ "algebra": format::algebra_json(&l), "structure": format::structure_json(&structural_report(&l)) }))
        }
        Command::Ricci { input, method } => {
            let m = metric_algebra(input)?;
            let r = match method {
                Method::Structural => ricci_structural(&m),
                Method::Koszul => ricci_koszul(&m),
                Method::MeanCurvature => ricci_structural_h(&m),
            };
            Ok(format::ricci_json(&r, &einstein_check(&m)))
        }
        Command::Soliton(input) => {
            let m = metric_algebra(input)?;
            let c = solve_nilsoliton(&m)?;
            let v = format::certificate_json(&c);
            if c.soliton_type != SolitonType::NotSoliton && !c.checks.all() {
                return Err(Failure::Verification(v));
            }
            Ok(v)
        }
        Command::Nik(a) => {
            let l = format::parse_algebra_arg(&a.algebra)?;
            let r = nikolayevsky(&l)?;
            let t = table1_search(&l)?;
            Ok(format::nikolayevsky_json(&r, &t, is_nice(&l)))
        }
        Command::Derivations(a) => {
            let l = format::parse_algebra_arg(&a.algebra)?;
            Ok(format::derivations_json(&derivations(&l)))
        }
        Command::Decompose { input, ideal, complement, correspondence, azencott_wilson: aw } => {
            let m = metric_algebra(input)?;
            let n = m.dim();
            let d = analyze_decomposition(&m, &basis_arg(ideal, n)?, &basis_arg(complement, n)?)?;
            let mut out = json!({ "decomposition": format::decomposition_json(&d) });
            if *correspondence {
                out["correspondence"] = match verify_correspondence(&d) {
                    Ok(r) => format::correspondence_json(&r),
                    Err(e) => json!({ "rejected": e.to_string() }),
                };
            }
            if *aw {
                out["azencott_wilson"] = match azencott_wilson(&d) {
                    Ok(x) => format::metric_algebra_json(&x),
                    Err(e) => json!({ "rejected": e.to_string() }),
                };
            }
            Ok(out)
        }
        Command::Extend { input, construction, a, a_metric, psi } => extend(input, *construction, a, a_metric.as_deref(), psi.as_deref()),
        Command::Corpus { .. } => unreachable!("handled in main"),
    }
}

fn extend(input: &MetricArgs, construction: Construction, a: &str, a_metric: Option<&str>, psi: Option<&str>) -> Outcome {
    let m = metric_algebra(input)?;
    let n = m.dim();
    let vars = Bindings::new();
    let needs_cert = !matches!(construction, Construction::RankOneNil3);
    let cert = if needs_cert { Some(solve_nilsoliton(&m)?) } else { None };
    let list: Value = serde_json::from_str(&format::read_arg(a)?).map_err(FormatError::from)?;
    let list = list.as_array().ok_or_else(|| Failure::Input("--a must be a JSON list".into(), None))?;
    let mut basis: Vec<Matrix> = Vec::new();
    for v in list {
        if v.as_str() == Some("D") {
            basis.push(cert.as_ref().ok_or_else(|| Failure::Input("\"D\" needs a nilsoliton".into(), None))?.d.clone());
        } else {
            basis.push(format::parse_matrix(v, n, &vars)?);
        }
    }
    let a_metric = a_metric.map(|s| format::parse_metric_arg(s, basis.len())).transpose()?;
    let result = match construction {
        Construction::Iwasawa => extend_iwasawa(&m, cert.as_ref().unwrap(), &basis),
        Construction::RankOneNil4 => extend_rank_one_nil4(&m, cert.as_ref().unwrap()),
        Construction::RankOneNil3 => {
            let text = psi.ok_or_else(|| Failure::Input("--psi is required".into(), None))?;
            let v: Value = serde_json::from_str(&format::read_arg(text)?).map_err(FormatError::from)?;
            extend_rank_one_nil3(&m, &format::parse_matrix(&v, n, &vars)?)
        }
        Construction::RicciFlat => {
            let g = a_metric.ok_or_else(|| Failure::Input("--a-metric is required".into(), None))?;
            extend_ricci_flat(&m, cert.as_ref().unwrap(), &basis, &g)
        }
        Construction::NonIwasawa => extend_non_iwasawa(&m, cert.as_ref().unwrap(), &basis, a_metric.as_ref()),
    }?;
    let mut out = format::extension_json(&result);
    match verify_correspondence(&result.decomposition) {
        Ok(r) => out["correspondence"] = format::correspondence_json(&r),
        Err(e) => out["correspondence"] = json!({ "rejected": e.to_string() }),
    }
    if !result.verification.einstein {
        return Err(Failure::Verification(out));
    }
    Ok(out)
}

fn summary(r: &RunReport) -> String {
    let mut s = String::new();
    for e in &r.entries {
        let mark = if e.passed { "ok  " } else { "FAIL" };
        s.push_str(&format!("{mark} {:<10} {:<45} {} instance(s)\n", e.section, e.id, e.instances.len()));
    }
    for (e, i, c) in r.failures() {
        match (c, &i.error) {
            (Some(c), _) => s.push_str(&format!(
                "  {} {:?}: {} expected {} computed {}\n",
                e.id,
                i.bindings,
                c.name,
                c.expected.as_deref().unwrap_or(""),
                c.computed.as_deref().unwrap_or("")
            )),
            (None, Some(err)) => s.push_str(&format!("  {} {:?}: {err}\n", e.id, i.bindings)),
            (None, None) => {}
        }
    }
    s.push_str(&format!("{} entries, {} passed, {} failed\n", r.total, r.passed, r.failed));
    s
}

fn corpus_command(action: &CorpusAction, pretty: bool) -> ExitCode {
    let loaded = match action {
        CorpusAction::Run { dir: Some(d), .. } => corpus::load_dir(d),
        _ => corpus::bundled(),
    };
    let c = match loaded {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    match action {
        CorpusAction::List => {
            for (section, e) in &c {
                println!("{}", json!({ "section": section, "id": e.id, "source": e.source }));
            }
            ExitCode::SUCCESS
        }
        CorpusAction::Run { filter, .. } => {
            let report = corpus::run(&c, filter.as_deref());
            if pretty {
                print!("{}", summary(&report));
            } else {
                println!("{}", serde_json::to_string(&report).expect("serialisable"));
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

