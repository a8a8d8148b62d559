//! Command-line front end. Every command builds a typed report, which is
//! rendered as JSON (the stable format, see `docs/report-schema.md`), as a
//! flat CSV projection, or as aligned text.
//!
//! Exit codes: 0 success, 1 a check or assertion reported failure, 2 bad
//! configuration, 3 dimension mismatch between the Clifford and the inputs.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bicep::{simulate_dense, simulate_pauli_path_with, Breakdown};
use crate::choi::{
    build_choi, marginal_deviation, ppt_min_eigenvalue, ppt_min_eigenvalue_dense, ppt_output_fidelity, pt_spectrum,
    tnorm_table, universality_margin, PtEigenvalue, TnormRow, MAX_DENSE_N,
};
use crate::clifford::{CliffordTableau, GateSequence};
use crate::error::Error;
use crate::exec::{current_threads, with_threads, Exec};
use crate::states::BellDiagonalState;
use crate::universality::{check_condition, exhaustive_no_go, fidelity_lower_bound, CheckReport, Condition, SearchOptions, SearchReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "EPP_NOGO_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExecArg {
    Parallel,
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Ordered,
}

impl From<ModeArg> for Condition {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => Condition::Full,
            ModeArg::Ordered => Condition::Ordered,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "epp-nogo", version, about = "Simulate and verify n-to-1 entanglement purification protocols")]
pub struct Cli {
    /// Worker threads (the EPP_NOGO_THREADS environment variable takes precedence).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "parallel")]
    pub exec: ExecArg,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CliffordArgs {
    /// Inline gate list, e.g. "H 0; CX 0 1".
    #[arg(long)]
    pub gates: Option<String>,
    /// File with one gate per line, or a tableau starting with `n=<k>`.
    #[arg(long)]
    pub gates_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a biCEP protocol on Bell-diagonal inputs.
    Simulate {
        #[command(flatten)]
        clifford: CliffordArgs,
        /// Input pair literal `iso:F` or `bds:pI,pX,pY,pZ`; repeat per pair, slot 0 first.
        #[arg(long = "in")]
        inputs: Vec<String>,
        /// Perfect assisting pairs appended after the inputs.
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        breakdown: bool,
        /// Cross-check against the density-matrix simulator (n + m <= 3).
        #[arg(long)]
        dense_oracle: bool,
    },
    /// Test a Clifford against a universality condition.
    Check {
        #[command(flatten)]
        clifford: CliffordArgs,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Input pairs; defaults to the Clifford size minus `m`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        m: usize,
    },
    /// Check every element of Sp(2(n+m), 2).
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Required when n + m = 3 (1,451,520 candidates).
        #[arg(long)]
        confirm_large: bool,
        /// Random inputs per ordered passer in the triviality probe.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Choi-operator analysis of the PPT universal protocol.
    Choi {
        #[command(subcommand)]
        command: ChoiCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChoiCommand {
    /// Bloch correlation 1-norms against the separability bound.
    Tnorm {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Partial-transpose spectrum.
    Ppt {
        #[arg(long)]
        n: usize,
    },
    /// Output fidelity for given input fidelities.
    Fidelity {
        #[arg(long = "in")]
        inputs: Vec<f64>,
    },
}

/// Settings shared by every command, resolved from flags and environment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub threads: Option<usize>,
    pub exec: Exec,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    fn resolve(cli: &Cli, env_threads: Option<String>) -> Result<Self, Failure> {
        let threads = match env_threads {
            Some(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&t| t > 0)
                    .ok_or_else(|| Failure::config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
            ),
            None => cli.threads,
        };
        if threads == Some(0) {
            return Err(Failure::config("--threads must be positive"));
        }
        Ok(RunConfig {
            command: command_name(&cli.command).to_string(),
            threads,
            exec: match cli.exec {
                ExecArg::Parallel => Exec::Parallel,
                ExecArg::Sequential => Exec::Sequential,
            },
            format: cli.format,
            output: cli.output.clone(),
            seed: cli.seed,
        })
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate { .. } => "simulate",
        Command::Check { .. } => "check",
        Command::Search { .. } => "search",
        Command::Choi { command } => match command {
            ChoiCommand::Tnorm { .. } => "choi tnorm",
            ChoiCommand::Ppt { .. } => "choi ppt",
            ChoiCommand::Fidelity { .. } => "choi fidelity",
        },
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::LengthMismatch { .. } | Error::SlotOutOfRange { .. } => EXIT_DIMENSION,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

/// A rendered command result.
struct Report {
    json: serde_json::Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    text: String,
    code: i32,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    threads: usize,
    exec: Exec,
    seed: u64,
    result: &'a serde_json::Value,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Parses arguments, runs the command and writes the report. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli, std::env::var(THREADS_ENV).ok()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, env_threads: Option<String>) -> Result<i32, Failure> {
    let cfg = RunConfig::resolve(cli, env_threads)?;
    let start = Instant::now();
    let (report, threads) = with_threads(cfg.threads, || {
        let threads = if cfg.exec.is_parallel() { current_threads() } else { 1 };
        (dispatch(&cli.command, &cfg), threads)
    });
    let report = report?;
    let body = render(&cfg, &report, threads)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| Failure::config(e.to_string()))?;
        }
    }
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    Ok(report.code)
}

fn render(cfg: &RunConfig, r: &Report, threads: usize) -> Result<String, Failure> {
    match cfg.format {
        Format::Json => {
            let env = Envelope { schema: SCHEMA_VERSION, command: &cfg.command, threads, exec: cfg.exec, seed: cfg.seed, result: &r.json };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Failure::config(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::config(e.to_string());
            w.write_record(&r.header).map_err(io)?;
            for row in &r.rows {
                w.write_record(row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::config(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::config(e.to_string()))
        }
        Format::Text => Ok(r.text.clone()),
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Report, Failure> {
    match cmd {
        Command::Simulate { clifford, inputs, m, breakdown, dense_oracle } => {
            cmd_simulate(cfg, clifford, inputs, *m, *breakdown, *dense_oracle)
        }
        Command::Check { clifford, mode, n, m } => cmd_check(clifford, (*mode).into(), *n, *m),
        Command::Search { n, m, mode, confirm_large, trials } => {
            cmd_search(cfg, *n, *m, (*mode).into(), *confirm_large, *trials)
        }
        Command::Choi { command } => cmd_choi(cfg, command),
    }
}

/// A Clifford given either as gates or as a tableau file.
struct ResolvedClifford {
    tableau: CliffordTableau,
    gates: Option<GateSequence>,
    label: String,
}

fn resolve_clifford(args: &CliffordArgs, qubits: Option<usize>, m: usize) -> Result<ResolvedClifford, Failure> {
    let (text, from_file) = match (&args.gates, &args.gates_file) {
        (Some(_), Some(_)) => return Err(Failure::config("give either --gates or --gates-file, not both")),
        (None, None) => return Err(Failure::config("a Clifford is required (--gates or --gates-file)")),
        (Some(g), None) => (g.clone(), false),
        (None, Some(p)) => (
            std::fs::read_to_string(p).map_err(|e| Failure::config(format!("cannot read {}: {e}", p.display())))?,
            true,
        ),
    };
    let is_tableau = from_file
        && text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).is_some_and(|l| l.starts_with("n="));
    if is_tableau {
        let tableau = CliffordTableau::parse_text(&text)?;
        if let Some(q) = qubits {
            if tableau.num_qubits() != q {
                return Err(Error::LengthMismatch { left: tableau.num_qubits(), right: q }.into());
            }
        }
        let label = format!("tableau:{}", args.gates_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        return Ok(ResolvedClifford { tableau, gates: None, label });
    }
    let gates = GateSequence::parse(&text)?;
    let q = qubits.unwrap_or_else(|| gates.min_qubits().max(2).max(m + 1));
    gates.validate(q)?;
    let tableau = CliffordTableau::from_gates(q, &gates)?;
    Ok(ResolvedClifford { label: gates.to_string(), tableau, gates: Some(gates) })
}

#[derive(Serialize)]
struct OracleReport {
    success_prob: f64,
    output_fidelity: f64,
    output_state: [f64; 4],
    max_abs_diff: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    n: usize,
    m: usize,
    gates: String,
    inputs: Vec<String>,
    success_prob: f64,
    output_fidelity: f64,
    output_state: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<Breakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
}

fn cmd_simulate(
    cfg: &RunConfig,
    args: &CliffordArgs,
    literals: &[String],
    m: usize,
    want_breakdown: bool,
    dense_oracle: bool,
) -> Result<Report, Failure> {
    let inputs = literals.iter().map(|l| BellDiagonalState::parse_literal(l)).collect::<Result<Vec<_>, _>>()?;
    if inputs.is_empty() {
        return Err(Error::EmptyInputs.into());
    }
    let n = inputs.len();
    if n + m < 2 {
        return Err(Failure::config(format!("need at least two pairs in total (n + m >= 2), got {}", n + m)));
    }
    let c = resolve_clifford(args, Some(n + m), m)?;
    let out = simulate_pauli_path_with(&c.tableau, &inputs, m, cfg.exec)?;
    let oracle = if dense_oracle {
        let gates = c.gates.as_ref().ok_or_else(|| Failure::config("--dense-oracle needs a gate list, not a tableau"))?;
        if n + m > 3 {
            return Err(Failure::config("--dense-oracle supports at most 3 pairs in total"));
        }
        let mut dense_inputs: Vec<_> = inputs.iter().map(BellDiagonalState::to_density).collect();
        dense_inputs.extend((0..m).map(|_| BellDiagonalState::perfect().to_density()));
        let d = simulate_dense(gates, &dense_inputs)?;
        let diff = std::iter::once((d.success_prob - out.success_prob).abs())
            .chain(d.output_state.probs().iter().zip(out.output_state.probs()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        Some(OracleReport {
            success_prob: d.success_prob,
            output_fidelity: d.output_fidelity,
            output_state: d.output_state.probs(),
            max_abs_diff: diff,
        })
    } else {
        None
    };
    let rep = SimulateReport {
        n,
        m,
        gates: c.label,
        inputs: inputs.iter().map(BellDiagonalState::to_literal).collect(),
        success_prob: out.success_prob,
        output_fidelity: out.output_fidelity,
        output_state: out.output_state.probs(),
        breakdown: if want_breakdown { out.breakdown } else { None },
        oracle,
    };

    let mut header = vec!["n", "m", "success_prob", "output_fidelity", "p_i", "p_x", "p_y", "p_z"];
    let s = rep.output_state;
    let mut row = vec![n.to_string(), m.to_string(), num(rep.success_prob), num(rep.output_fidelity), num(s[0]), num(s[1]), num(s[2]), num(s[3])];
    let mut text = format!(
        "gates            {}\ninputs           {}\nsuccess_prob     {}\noutput_fidelity  {}\noutput_state     {}\n",
        rep.gates,
        rep.inputs.join(" "),
        rep.success_prob,
        rep.output_fidelity,
        out.output_state
    );
    if let Some(b) = &rep.breakdown {
        header.extend(["correct_t1", "correct_t2", "undetectable_t1", "undetectable_t2", "incorrect"]);
        row.extend([b.correct_t1, b.correct_t2, b.undetectable_t1, b.undetectable_t2, b.incorrect].map(num));
        text.push_str(&format!(
            "correct          t1 {} t2 {}\nundetectable     t1 {} t2 {}\nincorrect        {}\nby_output        I {} X {} Y {} Z {}\n",
            b.correct_t1, b.correct_t2, b.undetectable_t1, b.undetectable_t2, b.incorrect,
            b.by_output[0], b.by_output[1], b.by_output[2], b.by_output[3]
        ));
    }
    if let Some(o) = &rep.oracle {
        header.extend(["oracle_success_prob", "oracle_output_fidelity", "max_abs_diff"]);
        row.extend([o.success_prob, o.output_fidelity, o.max_abs_diff].map(num));
        text.push_str(&format!(
            "oracle           success {} fidelity {} max|diff| {:e}\n",
            o.success_prob, o.output_fidelity, o.max_abs_diff
        ));
    }
    Ok(Report { json: to_value(&rep), header, rows: vec![row], text, code: EXIT_OK })
}

fn cmd_check(args: &CliffordArgs, cond: Condition, n: Option<usize>, m: usize) -> Result<Report, Failure> {
    let c = resolve_clifford(args, n.map(|n| n + m), m)?;
    let total = c.tableau.num_qubits();
    let n = n.unwrap_or(total.saturating_sub(m));
    let report: CheckReport = check_condition(cond, &c.tableau, n, m)?;
    let header = vec!["condition", "n", "m", "passed", "checked_count", "source", "image", "kind"];
    let base = |r: &CheckReport| {
        vec![format!("{:?}", r.condition).to_lowercase(), r.n.to_string(), r.m.to_string(), r.passed.to_string(), r.checked_count.to_string()]
    };
    let rows = if report.violations.is_empty() {
        let mut row = base(&report);
        row.extend([String::new(), String::new(), String::new()]);
        vec![row]
    } else {
        report
            .violations
            .iter()
            .map(|v| {
                let mut row = base(&report);
                row.extend([v.source.to_string(), v.image.to_string(), format!("{:?}", v.kind).to_lowercase()]);
                row
            })
            .collect()
    };
    let mut text = format!(
        "condition      {:?}\nclifford       {}\nn, m           {}, {}\nchecked        {}\npassed         {}\n",
        report.condition, c.label, report.n, report.m, report.checked_count, report.passed
    );
    for v in &report.violations {
        text.push_str(&format!("violation      {} -> {} ({:?})\n", v.source, v.image, v.kind));
    }
    let code = if report.passed { EXIT_OK } else { EXIT_FAILED };
    Ok(Report { json: to_value(&report), header, rows, text, code })
}

fn cmd_search(cfg: &RunConfig, n: usize, m: usize, cond: Condition, confirm: bool, trials: usize) -> Result<Report, Failure> {
    if n + m == 3 && !confirm {
        return Err(Failure::config("n + m = 3 checks 1,451,520 candidates; pass --confirm-large to run it"));
    }
    let opts = SearchOptions { probe_trials: trials, seed: cfg.seed, exec: cfg.exec, ..Default::default() };
    let r: SearchReport = exhaustive_no_go(n, m, cond, opts)?;
    eprintln!("search: {} candidates in {:.3}s", r.total_candidates, r.elapsed.as_secs_f64());
    let header = vec!["mode", "n", "m", "total_candidates", "valid_candidates", "full_pass_count", "ordered_pass_count", "ordered_pass_all_trivial", "max_trivial_deviation"];
    let opt = |v: Option<String>| v.unwrap_or_default();
    let rows = vec![vec![
        format!("{:?}", r.mode).to_lowercase(),
        r.n.to_string(),
        r.m.to_string(),
        r.total_candidates.to_string(),
        r.valid_candidates.to_string(),
        r.full_pass_count.to_string(),
        r.ordered_pass_count.to_string(),
        opt(r.ordered_pass_all_trivial.map(|b| b.to_string())),
        opt(r.max_trivial_deviation.map(num)),
    ]];
    let mut text = format!(
        "group            {}\ncandidates       {} ({} valid)\nfull passers     {}\nordered passers  {}\n",
        r.quotient, r.total_candidates, r.valid_candidates, r.full_pass_count, r.ordered_pass_count
    );
    if let (Some(t), Some(d)) = (r.ordered_pass_all_trivial, r.max_trivial_deviation) {
        text.push_str(&format!("all trivial      {t} (max deviation {d:e}, {} trials each)\n", r.probe_trials));
    }
    // The search confirms a no-go statement; a full passer or a non-trivial
    // ordered passer contradicts it.
    let ok = r.full_pass_count == 0 && r.ordered_pass_all_trivial != Some(false);
    Ok(Report { json: to_value(&r), header, rows, text, code: if ok { EXIT_OK } else { EXIT_FAILED } })
}

#[derive(Serialize)]
struct PptReport {
    n: usize,
    min_eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    marginal_max_deviation: Option<f64>,
    ppt: bool,
    spectrum: Vec<PtEigenvalue>,
}

#[derive(Serialize)]
struct FidelityReport {
    inputs: Vec<f64>,
    output_fidelity: f64,
    lower_bound: f64,
    max_input: f64,
    /// `F' - F_j` per input; present when every input is at least 1/2.
    #[serde(skip_serializing_if = "Option::is_none")]
    margins: Option<Vec<f64>>,
    universal: bool,
}

fn cmd_choi(cfg: &RunConfig, cmd: &ChoiCommand) -> Result<Report, Failure> {
    match cmd {
        ChoiCommand::Tnorm { n_max } => {
            if !(1..=30).contains(n_max) {
                return Err(Failure::config("--n-max must be in 1..=30"));
            }
            let rows: Vec<TnormRow> = tnorm_table(*n_max, cfg.exec)?;
            let agree = rows.iter().all(|r| (r.brute - r.closed).abs() <= 1e-9 * r.closed.abs().max(1.0));
            let header = vec!["n", "t_norm", "closed_form", "bound", "margin", "violated", "saturated", "ppt_min_eig"];
            let csv_rows = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        num(r.brute),
                        num(r.closed),
                        num(r.bound),
                        num(r.margin),
                        r.violated.to_string(),
                        r.saturated.to_string(),
                        r.ppt_min_eig.map(num).unwrap_or_default(),
                    ]
                })
                .collect();
            let mut text = format!("{:>3} {:>16} {:>16} {:>12} {:>14}  verdict\n", "n", "t_norm", "closed_form", "bound", "margin");
            for r in &rows {
                let verdict = if r.violated { "violated" } else if r.saturated { "saturated" } else { "below" };
                text.push_str(&format!("{:>3} {:>16.6} {:>16.6} {:>12} {:>14.6}  {verdict}\n", r.n, r.brute, r.closed, r.bound, r.margin));
            }
            Ok(Report { json: to_value(&rows), header, rows: csv_rows, text, code: if agree { EXIT_OK } else { EXIT_FAILED } })
        }
        ChoiCommand::Ppt { n } => {
            let j = build_choi(*n)?;
            let min = ppt_min_eigenvalue(&j);
            let dense = if *n <= MAX_DENSE_N { Some(ppt_min_eigenvalue_dense(&j)?) } else { None };
            let marg = if *n <= 3 { Some(marginal_deviation(&j).map(|(a, b)| a.max(b))?) } else { None };
            let ppt = min >= -1e-9 && dense.is_none_or(|d| d >= -1e-9);
            let rep = PptReport { n: *n, min_eigenvalue: min, dense_min_eigenvalue: dense, marginal_max_deviation: marg, ppt, spectrum: pt_spectrum(&j) };
            let header = vec!["n", "antisymmetric_slots", "value", "multiplicity"];
            let rows = rep
                .spectrum
                .iter()
                .map(|e| vec![n.to_string(), e.antisymmetric_slots.to_string(), num(e.value), e.multiplicity.to_string()])
                .collect();
            let mut text = format!("n              {n}\nmin eigenvalue {min}\n");
            if let Some(d) = dense {
                text.push_str(&format!("dense min      {d:e}\n"));
            }
            if let Some(d) = marg {
                text.push_str(&format!("marginal dev   {d:e}\n"));
            }
            text.push_str(&format!("ppt            {ppt}\n"));
            for e in &rep.spectrum {
                text.push_str(&format!("  k={:<2} value {:<24} x{}\n", e.antisymmetric_slots, e.value, e.multiplicity));
            }
            Ok(Report { json: to_value(&rep), header, rows, text, code: if ppt { EXIT_OK } else { EXIT_FAILED } })
        }
        ChoiCommand::Fidelity { inputs } => {
            let out = ppt_output_fidelity(inputs)?;
            let lb = fidelity_lower_bound(inputs)?;
            let max_input = inputs.iter().copied().fold(0.0, f64::max);
            let margins = if inputs.iter().all(|&f| f >= 0.5) {
                Some((0..inputs.len()).map(|j| universality_margin(inputs, j)).collect::<Result<Vec<_>, _>>()?)
            } else {
                None
            };
            let rep = FidelityReport { inputs: inputs.clone(), output_fidelity: out, lower_bound: lb, max_input, margins, universal: out >= max_input - 1e-12 };
            let header = vec!["inputs", "output_fidelity", "lower_bound", "max_input", "universal"];
            let joined = inputs.iter().map(|f| num(*f)).collect::<Vec<_>>().join(";");
            let rows = vec![vec![joined.clone(), num(out), num(lb), num(max_input), rep.universal.to_string()]];
            let text = format!(
                "inputs           {}\noutput_fidelity  {out}\nlower_bound      {lb}\nmax_input        {max_input}\nuniversal        {}\n",
                joined.replace(';', " "),
                rep.universal
            );
            Ok(Report { json: to_value(&rep), header, rows, text, code: EXIT_OK })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("epp-nogo").chain(args.iter().copied())).unwrap()
    }

    fn report(args: &[&str]) -> Result<(Report, RunConfig), Failure> {
        let cli = parse(args);
        let cfg = RunConfig::resolve(&cli, None)?;
        Ok((dispatch(&cli.command, &cfg)?, cfg))
    }

    #[test]
    fn env_threads_override_flag() {
        let cli = parse(&["--threads", "3", "choi", "fidelity", "--in", "0.9"]);
        assert_eq!(RunConfig::resolve(&cli, None).unwrap().threads, Some(3));
        assert_eq!(RunConfig::resolve(&cli, Some("5".into())).unwrap().threads, Some(5));
        assert_eq!(RunConfig::resolve(&cli, Some("x".into())).unwrap_err().code, EXIT_CONFIG);
        assert_eq!(RunConfig::resolve(&cli, Some("0".into())).unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn simulate_dejmps() {
        let (r, _) = report(&["simulate", "--gates", "CX 0 1", "--in", "iso:0.9", "--in", "iso:0.85"]).unwrap();
        let f = r.json["output_fidelity"].as_f64().unwrap();
        assert!((f - 0.9055).abs() < 5e-4);
        assert!(r.json.get("breakdown").is_none());
    }

    #[test]
    fn simulate_errors() {
        let e = report(&["simulate", "--gates", "", "--in", "iso:0.7"]).err().unwrap();
        assert_eq!(e.code, EXIT_CONFIG);
        let e = report(&["simulate", "--gates", "CX 0 2", "--in", "iso:0.7", "--in", "iso:0.8"]).err().unwrap();
        assert_eq!(e.code, EXIT_DIMENSION);
        let e = report(&["simulate", "--in", "iso:0.7", "--in", "iso:0.8"]).err().unwrap();
        assert_eq!(e.code, EXIT_CONFIG);
        let e = report(&["simulate", "--gates", "CX 0 1", "--in", "iso:1.7", "--in", "iso:0.8"]).err().unwrap();
        assert_eq!(e.code, EXIT_CONFIG);
    }

    #[test]
    fn simulate_oracle_and_breakdown() {
        let (r, _) = report(&["simulate", "--gates", "H 0; CX 0 1", "--in", "iso:0.8", "--in", "bds:0.7,0.1,0.1,0.1", "--m", "1", "--breakdown", "--dense-oracle"]).unwrap();
        assert!(r.json["oracle"]["max_abs_diff"].as_f64().unwrap() < 1e-10);
        assert!(r.json["breakdown"]["incorrect"].is_number());
        assert_eq!(r.header.len(), r.rows[0].len());
    }

    #[test]
    fn check_exit_codes() {
        let (r, _) = report(&["check", "--mode", "full", "--gates", "CX 0 1", "--n", "2"]).unwrap();
        assert_eq!(r.code, EXIT_FAILED);
        assert!(r.text.contains("ZI -> ZI"));
        let (r, _) = report(&["check", "--mode", "ordered", "--gates", "CX 1 2", "--n", "3"]).unwrap();
        assert_eq!(r.code, EXIT_OK);
        let (r, _) = report(&["check", "--gates", "CX 0 1", "--n", "2", "--m", "1"]).unwrap();
        assert_eq!(r.json["m"], 1);
    }

    #[test]
    fn search_gate() {
        assert_eq!(report(&["search", "--n", "3"]).err().unwrap().code, EXIT_CONFIG);
        let (r, _) = report(&["search", "--n", "2"]).unwrap();
        assert_eq!(r.json["full_pass_count"], 0);
        assert_eq!(r.code, EXIT_OK);
        assert!(r.json.get("elapsed").is_none());
    }

    #[test]
    fn choi_commands() {
        let (r, _) = report(&["choi", "tnorm", "--n-max", "4"]).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.code, EXIT_OK);
        let (r, _) = report(&["choi", "ppt", "--n", "3"]).unwrap();
        assert_eq!(r.json["min_eigenvalue"], 0.0);
        let (r, _) = report(&["choi", "fidelity", "--in", "0.9", "--in", "0.85"]).unwrap();
        assert!((r.json["output_fidelity"].as_f64().unwrap() - 0.98077).abs() < 1e-5);
    }

    #[test]
    fn renderings() {
        let (r, cfg) = report(&["--format", "csv", "choi", "tnorm", "--n-max", "3"]).unwrap();
        let csv = render(&cfg, &r, 1).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("n,t_norm"));
        let (r, cfg) = report(&["choi", "tnorm", "--n-max", "2"]).unwrap();
        let json = render(&cfg, &r, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "choi tnorm");
    }
}
