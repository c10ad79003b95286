//! Command-line front end for `phasemap`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use phasemap_core::pmap::{format_complex, JOINT_BLOCK, OUT1_BLOCK, OUT2_BLOCK};
use phasemap_core::{
    analyze, builtin, factorize, min_eigenvalue_profile, parse_pmap, theorem_search_parallel,
    AnalysisConfig, CaseVerdict, CatalogError, CloningReport, PhaseOperator, PmapDocument,
    PmapError, PositivityError, PositivityVerdict, SamplerParams,
};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "phasemap",
    version,
    about = "Phase-parametrized operator maps and uncorrelated cloning checks"
)]
pub struct Cli {
    /// Overrides the relation and classification tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prints the decomposition form of one entry.
    Factor {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
        entry: Vec<usize>,
        /// Block to read; defaults to lambda1 for triples, else the first block.
        #[arg(long)]
        block: Option<String>,
    },
    /// Relation, hermiticity and positivity checks.
    Check { file: PathBuf },
    /// Case classification and report summary.
    Classify { file: PathBuf },
    /// Minimum-eigenvalue profile as CSV.
    Profile {
        file: PathBuf,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized theorem search.
    Search {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Writes a built-in map as PMAP.
    Catalog {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Pmap { path: String, source: PmapError },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        Self::Io {
            path: "<output>".into(),
            source,
        }
    }
}

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
        }
    }
}

/// Runs a parsed command; 0/1 outcomes come back as `Ok`, everything else is exit 2.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let mut cfg = AnalysisConfig::default();
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {tol}"
            )));
        }
        cfg.tol = tol;
    }
    match &cli.command {
        Command::Factor { file, entry, block } => {
            factor(&load(file)?, entry[0], entry[1], block.as_deref(), out)
        }
        Command::Check { file } => check(&load(file)?, &cfg, out),
        Command::Classify { file } => classify(&load(file)?, &cfg, out),
        Command::Profile {
            file,
            samples,
            out: path,
        } => profile(&load(file)?, *samples, path.as_deref(), out),
        Command::Search { trials, seed } => {
            let report = theorem_search_parallel(*trials, *seed, &SamplerParams::default(), &cfg);
            writeln!(out, "{report}")?;
            Ok(Outcome::from_bool(report.violations.is_empty()))
        }
        Command::Catalog { name, out: path } => {
            let text = builtin(name)?.document().serialize();
            emit(path.as_deref(), text.as_bytes(), out)?;
            Ok(Outcome::Pass)
        }
    }
}

/// Full entry point: argument parsing, error reporting, exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            let _ = out.flush();
            eprintln!("phasemap: {e}");
            2
        }
    }
}

fn load(path: &Path) -> Result<PmapDocument, CliError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_pmap(&text).map_err(|source| CliError::Pmap {
        path: shown,
        source,
    })
}

fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => Ok(out.write_all(bytes)?),
    }
}

enum Loaded<'a> {
    Triple(phasemap_core::UncorrelatedTriple),
    Single(&'a str, &'a PhaseOperator),
}

fn interpret(doc: &PmapDocument) -> Result<Loaded<'_>, CliError> {
    if doc.is_triple() {
        let t = doc.to_triple().map_err(|source| CliError::Pmap {
            path: "<document>".into(),
            source,
        })?;
        return Ok(Loaded::Triple(t));
    }
    match doc.blocks.as_slice() {
        [b] => Ok(Loaded::Single(&b.name, &b.operator)),
        _ => Err(CliError::Usage(format!(
            "expected one block or the blocks {JOINT_BLOCK}, {OUT1_BLOCK}, {OUT2_BLOCK}"
        ))),
    }
}

fn factor(
    doc: &PmapDocument,
    i: usize,
    j: usize,
    block: Option<&str>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let name = match block {
        Some(b) => b,
        None if doc.is_triple() => OUT1_BLOCK,
        None => doc
            .blocks
            .first()
            .map(|b| b.name.as_str())
            .ok_or_else(|| CliError::Usage("document has no blocks".into()))?,
    };
    let op = doc
        .block(name)
        .ok_or_else(|| CliError::Usage(format!("no block `{name}`")))?;
    if i >= op.dim() || j >= op.dim() {
        return Err(CliError::Usage(format!(
            "entry ({i}, {j}) out of range for dim {}",
            op.dim()
        )));
    }
    let w = op.get(i, j);
    writeln!(out, "{name}[{i},{j}] = {w}")?;
    match factorize(w) {
        Ok(form) => {
            writeln!(out, "form: {form}  (x = e^(i phi))")?;
            Ok(Outcome::Pass)
        }
        Err(e) => {
            writeln!(out, "form: none ({e})")?;
            Ok(Outcome::Fail)
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_verdict(
    out: &mut dyn Write,
    name: &str,
    v: &Result<PositivityVerdict, PositivityError>,
) -> io::Result<()> {
    match v {
        Ok(v) if v.positive => writeln!(
            out,
            "positivity {name}: ok (min eigenvalue {:e})",
            v.min_eigenvalue
        ),
        Ok(v) => writeln!(
            out,
            "positivity {name}: FAIL (min eigenvalue {:e} at phi = {})",
            v.min_eigenvalue,
            v.witness_phi.unwrap_or(f64::NAN)
        ),
        Err(e) => writeln!(out, "positivity {name}: not evaluated ({e})"),
    }
}

const NAMES: [&str; 3] = [JOINT_BLOCK, OUT1_BLOCK, OUT2_BLOCK];

fn check(
    doc: &PmapDocument,
    cfg: &AnalysisConfig,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    match interpret(doc)? {
        Loaded::Triple(t) => {
            let r = analyze(&t, cfg);
            match &r.relation {
                Ok(rel) => {
                    writeln!(
                        out,
                        "relation: {} (max residual {:e})",
                        if rel.all_ok() { "ok" } else { "FAIL" },
                        rel.max_residual()
                    )?;
                    writeln!(
                        out,
                        "  traces equal: {} (residual {:e})",
                        yes_no(rel.traces_equal),
                        rel.trace_residual
                    )?;
                    writeln!(
                        out,
                        "  anomalous relation: {} (residual {:e})",
                        yes_no(rel.relation_holds),
                        rel.relation_residual
                    )?;
                    writeln!(
                        out,
                        "  partial traces: {} (residual {:e})",
                        yes_no(rel.partial_traces_consistent),
                        rel.partial_trace_residual
                    )?;
                }
                Err(e) => writeln!(out, "relation: FAIL ({e})")?,
            }
            for (name, hp) in NAMES.iter().zip(r.hp_ok) {
                writeln!(out, "hermitian-preserving {name}: {}", yes_no(hp))?;
            }
            for (name, v) in NAMES.iter().zip(&r.positivity) {
                write_verdict(out, name, v)?;
            }
            let ok = r.relation_ok && r.hp_all() && r.all_positive();
            writeln!(out, "result: {}", if ok { "pass" } else { "FAIL" })?;
            Ok(Outcome::from_bool(ok))
        }
        Loaded::Single(name, op) => {
            let hp = op.is_hermitian_preserving(
                phasemap_core::positivity::HERMITIAN_TOL * (1.0 + op.max_abs()),
            );
            writeln!(out, "hermitian-preserving {name}: {}", yes_no(hp))?;
            let v = phasemap_core::is_positive_over_phase(op, cfg.positivity_tol, cfg.grid);
            write_verdict(out, name, &v)?;
            let ok = hp && v.is_ok_and(|v| v.positive);
            writeln!(out, "result: {}", if ok { "pass" } else { "FAIL" })?;
            Ok(Outcome::from_bool(ok))
        }
    }
}

fn dependence(b: bool) -> &'static str {
    if b {
        "phase-dependent"
    } else {
        "phase-independent"
    }
}

fn headline(r: &CloningReport) -> String {
    let out1 = format!("out1 {}", dependence(r.out1_phase_dependent));
    let out2 = format!("out2 {}", dependence(r.out2_phase_dependent));
    match &r.case {
        Ok(CaseVerdict::Case1) => format!("Case 1; {out1}"),
        Ok(CaseVerdict::Case3) => format!("Case 3; {out2}"),
        Ok(v) => format!("{v}; {out1}, {out2}"),
        Err(e) => format!("unclassified ({e}); {out1}, {out2}"),
    }
}

fn classify(
    doc: &PmapDocument,
    cfg: &AnalysisConfig,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let Loaded::Triple(t) = interpret(doc)? else {
        return Err(CliError::Usage(
            "classify needs a triple (lambda12, lambda1, lambda2)".into(),
        ));
    };
    let r = analyze(&t, cfg);
    writeln!(out, "{}", headline(&r))?;
    writeln!(out, "hermitian-preserving: {}", yes_no(r.hp_all()))?;
    writeln!(out, "relation: {}", yes_no(r.relation_ok))?;
    match &r.probability {
        Ok(d) => writeln!(
            out,
            "probability: r = {}, p0 = {}, p1 = {}",
            d.r,
            format_complex(d.p0),
            format_complex(d.p1)
        )?,
        Err(e) => writeln!(out, "probability: {e}")?,
    }
    writeln!(out, "positive: {}", yes_no(r.all_positive()))?;
    if let Ok(CaseVerdict::Case2 {
        forced,
        entry_forms,
    }) = &r.case
    {
        writeln!(out, "forced factor: x + ({})", format_complex(*forced))?;
        for e in entry_forms {
            let f = e.f.map_or_else(|| "-".to_string(), format_complex);
            writeln!(
                out,
                "  out1[{},{}]: {} (M = {}, f = {f})",
                e.i, e.j, e.form, e.m
            )?;
        }
    }
    if let Some(forcing) = r.case2_forcing {
        writeln!(
            out,
            "case 2 forcing: {}",
            if forcing { "holds" } else { "VIOLATED" }
        )?;
    }
    writeln!(out, "theorem consistent: {}", yes_no(r.theorem_consistent))?;
    Ok(Outcome::from_bool(r.case.is_ok() && r.theorem_consistent))
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn profile(
    doc: &PmapDocument,
    samples: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    if samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let loaded = interpret(doc)?;
    let (p, ops): (_, Vec<&PhaseOperator>) = match &loaded {
        Loaded::Triple(t) => (
            t.probability(),
            vec![t.out1(), t.out2(), t.joint().as_operator()],
        ),
        Loaded::Single(_, op) => (op.trace_poly(), vec![*op]),
    };
    let profiles = match ops
        .iter()
        .map(|op| min_eigenvalue_profile(op, samples))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(v) => v,
        Err(e) => {
            eprintln!("phasemap: no eigenvalue profile: {e}");
            return Ok(Outcome::Fail);
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["phi", "P", "lmin_out1", "lmin_out2", "lmin_joint"])?;
    for k in 0..samples {
        let phi = profiles[0][k].0;
        let mut row = vec![fmt_value(phi), fmt_value(p.eval(phi).re)];
        row.extend((0..3).map(|c| {
            profiles
                .get(c)
                .map_or_else(String::new, |pr| fmt_value(pr[k].1))
        }));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::from(e.into_error()))?;
    emit(path, &bytes, out)?;
    Ok(Outcome::Pass)
}
