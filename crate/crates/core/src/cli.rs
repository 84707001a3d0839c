//! Command-line front end.
//!
//! Case grammar: `<family>-<letter> key=value ...`, for example
//! `laguerre-b M=1 n=20` or `jacobi-d alpha=0.5 beta=0.5 xi=1 M=0 n=10`.
//! Each case accepts exactly its own keys plus `n`; unknown or repeated keys
//! are rejected. Values may be comma-separated lists (`n=20,50,100`), in which
//! case every combination is evaluated in the order given.
//!
//! | case        | keys                     |
//! |-------------|--------------------------|
//! | laguerre-a  | alpha, xi                |
//! | laguerre-b  | M                        |
//! | laguerre-c  | alpha, xi, M             |
//! | jacobi-a    | alpha, beta, xi          |
//! | jacobi-b    | beta, M                  |
//! | jacobi-c    | alpha, M                 |
//! | jacobi-d    | alpha, beta, xi, M       |
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 numerical failure.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coherent::{CaseTag, CoherentCase};
use crate::error::{Error, Result};
use crate::solver::{bounds_for_case, BoundsReport};
use crate::verify::{check_identities_seeded, check_inequality, IdentityReport, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// JSON schema version.
pub const SCHEMA: u32 = 1;

/// Paper-table preset.
pub const PAPER_TABLE_M: [f64; 4] = [1.0, 5.0, 10.0, 50.0];
pub const PAPER_TABLE_N: [usize; 4] = [20, 50, 100, 500];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "coherent-mb", version, about = "Markov-Bernstein constants for coherent pairs of measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (default: csv for `table`, pretty otherwise).
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,

    /// Significant digits in csv and pretty output.
    #[arg(long, global = true, default_value_t = 9, value_parser = clap::value_parser!(u8).range(9..=15))]
    pub digits: u8,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    /// Case tokens, e.g. `laguerre-b M=1 n=20`.
    #[arg(required = true, num_args = 1..)]
    pub case: Vec<String>,

    /// Relative width of the bisection bracket.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest eigenvalue μ₁,ₙ and the constant Mₙ = 1/√μ₁,ₙ.
    Constant(CaseArgs),
    /// Lower bounds, qd upper bounds and the certified bracket.
    Bounds {
        #[command(flatten)]
        args: CaseArgs,
        /// Number of qd sweeps.
        #[arg(long, default_value_t = 2)]
        qd_rounds: usize,
    },
    /// Table of bounds over parameter and degree lists.
    Table {
        /// Case tokens with lists, e.g. `laguerre-b M=1,5 n=20,50`.
        case: Vec<String>,
        /// LaguerreB with M ∈ {1,5,10,50}, n ∈ {20,50,100,500}.
        #[arg(long)]
        paper_table: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Random-polynomial check of the inequality and the extremal equality.
    Verify {
        #[command(flatten)]
        args: CaseArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed-form identity suites.
    Identities {
        /// Largest index i, j.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Seed for the random γ draws.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

/// Which command a [`RunConfig`] drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Constant,
    Bounds,
    Table,
    Verify,
    Identities,
}

/// Fully parsed and validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// `(case, n)` in evaluation order.
    pub cells: Vec<(CoherentCase, usize)>,
    pub tol: f64,
    pub qd_rounds: usize,
    pub output: OutputFormat,
    pub digits: usize,
    pub seed: u64,
    pub trials: usize,
    pub depth: usize,
}

/// Output text and exit status of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INVALID
    } else {
        EXIT_NUMERICAL
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidParameters(format!("cannot parse `{s}` as a value for `{key}`")))
        })
        .collect()
}

/// Parses case tokens into `(case, n)` pairs. `n` is required and every value must be ≥ 1.
pub fn parse_case_tokens(tokens: &[String]) -> Result<Vec<(CoherentCase, usize)>> {
    let (head, rest) = tokens.split_first().ok_or_else(|| Error::InvalidParameters("missing case name".into()))?;
    let tag: CaseTag = head.parse()?;
    let keys = tag.keys();
    let mut values: Vec<Option<Vec<f64>>> = vec![None; keys.len()];
    let mut ns: Option<Vec<usize>> = None;
    for tok in rest {
        let (k, v) =
            tok.split_once('=').ok_or_else(|| Error::InvalidParameters(format!("expected key=value, got `{tok}`")))?;
        if k == "n" {
            if ns.is_some() {
                return Err(Error::InvalidParameters("key `n` given twice".into()));
            }
            let list: Vec<usize> = parse_list("n", v)?;
            if list.iter().any(|&n| n == 0) {
                return Err(Error::InvalidParameters("degree n must be >= 1".into()));
            }
            ns = Some(list);
            continue;
        }
        let idx = keys.iter().position(|&key| key == k).ok_or_else(|| {
            Error::InvalidParameters(format!("unknown key `{k}` for {tag}; allowed: {}, n", keys.join(", ")))
        })?;
        if values[idx].is_some() {
            return Err(Error::InvalidParameters(format!("key `{k}` given twice")));
        }
        values[idx] = Some(parse_list(k, v)?);
    }
    let ns = ns.ok_or_else(|| Error::InvalidParameters("missing degree `n`".into()))?;
    let mut lists = Vec::with_capacity(keys.len());
    for (k, v) in keys.iter().zip(values) {
        lists.push(v.ok_or_else(|| Error::InvalidParameters(format!("missing key `{k}` for {tag}")))?);
    }
    // cartesian product, last key varying fastest, then n
    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for list in &lists {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                list.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    let mut cells = Vec::new();
    for combo in combos {
        let get = |name: &str| keys.iter().position(|&k| k == name).map(|i| combo[i]).unwrap_or(0.0);
        let case = CoherentCase::new(tag, get("alpha"), get("beta"), get("xi"), get("M"))?;
        for &n in &ns {
            cells.push((case, n));
        }
    }
    Ok(cells)
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            command: CommandKind::Constant,
            cells: vec![],
            tol: 1e-10,
            qd_rounds: 2,
            output: cli.output.unwrap_or(OutputFormat::Pretty),
            digits: cli.digits as usize,
            seed: 0,
            trials: 0,
            depth: 0,
        };
        match &cli.command {
            Command::Constant(a) => {
                cfg.cells = parse_case_tokens(&a.case)?;
                cfg.tol = a.tol;
            }
            Command::Bounds { args, qd_rounds } => {
                cfg.command = CommandKind::Bounds;
                cfg.cells = parse_case_tokens(&args.case)?;
                cfg.tol = args.tol;
                cfg.qd_rounds = *qd_rounds;
            }
            Command::Table { case, paper_table, tol } => {
                cfg.command = CommandKind::Table;
                cfg.output = cli.output.unwrap_or(OutputFormat::Csv);
                cfg.tol = *tol;
                cfg.cells = match (paper_table, case.is_empty()) {
                    (true, true) => PAPER_TABLE_M
                        .iter()
                        .flat_map(|&m| PAPER_TABLE_N.iter().map(move |&n| (m, n)))
                        .map(|(m, n)| Ok((CoherentCase::laguerre_b(m)?, n)))
                        .collect::<Result<_>>()?,
                    (true, false) => return Err(Error::InvalidParameters("--paper-table takes no case tokens".into())),
                    (false, true) => {
                        return Err(Error::InvalidParameters("table needs case tokens or --paper-table".into()))
                    }
                    (false, false) => parse_case_tokens(case)?,
                };
            }
            Command::Verify { args, trials, seed } => {
                cfg.command = CommandKind::Verify;
                cfg.cells = parse_case_tokens(&args.case)?;
                cfg.tol = args.tol;
                if *trials == 0 {
                    return Err(Error::InvalidParameters("--trials must be >= 1".into()));
                }
                cfg.trials = *trials;
                cfg.seed = *seed;
            }
            Command::Identities { depth, seed } => {
                cfg.command = CommandKind::Identities;
                cfg.depth = *depth;
                cfg.seed = *seed;
            }
        }
        if !(cfg.tol >= 1e-14 && cfg.tol < 1.0) {
            return Err(Error::InvalidParameters(format!("--tol must lie in [1e-14, 1), got {}", cfg.tol)));
        }
        Ok(cfg)
    }
}

/// Locale-independent decimal with `digits` significant digits.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let e = v.abs().log10().floor() as i32;
    if !(-8..15).contains(&e) {
        return format!("{:.*e}", digits - 1, v);
    }
    let decimals = (digits as i32 - 1 - e).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new leading digit
    let sig = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if sig > digits && decimals > 0 {
        format!("{:.*}", decimals - 1, v)
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn envelope(command: &str, results: Value) -> String {
    let v = json!({ "schema": SCHEMA, "command": command, "results": results });
    serde_json::to_string_pretty(&v).expect("json serialization") + "\n"
}

fn bounds_json(case: &CoherentCase, r: &BoundsReport) -> Value {
    json!({ "case": case.spec_string(), "report": r })
}

/// Runs a validated configuration.
pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command {
        CommandKind::Constant | CommandKind::Bounds => run_bounds(cfg),
        CommandKind::Table => run_table(cfg),
        CommandKind::Verify => run_verify(cfg),
        CommandKind::Identities => run_identities(cfg),
    }
}

fn compute_cells(cfg: &RunConfig, rounds: usize) -> Vec<Result<BoundsReport>> {
    cfg.cells.par_iter().map(|(c, n)| bounds_for_case(c, *n, cfg.tol, rounds)).collect()
}

fn first_error(results: &[Result<BoundsReport>]) -> Option<&Error> {
    results.iter().find_map(|r| r.as_ref().err())
}

fn run_bounds(cfg: &RunConfig) -> Outcome {
    let results = compute_cells(cfg, cfg.qd_rounds);
    if let Some(e) = first_error(&results) {
        return Outcome { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") };
    }
    let reports: Vec<&BoundsReport> = results.iter().map(|r| r.as_ref().unwrap()).collect();
    let d = cfg.digits;
    let f = |v: f64| fmt_sig(v, d);
    let constant = cfg.command == CommandKind::Constant;
    let mut out = String::new();
    match cfg.output {
        OutputFormat::Json => {
            let results: Vec<Value> = cfg
                .cells
                .iter()
                .zip(&reports)
                .map(|((c, _), r)| {
                    if constant {
                        json!({ "case": c.spec_string(), "n": r.n, "mu": r.mu, "markov_constant": r.markov_constant })
                    } else {
                        bounds_json(c, r)
                    }
                })
                .collect();
            out = envelope(if constant { "constant" } else { "bounds" }, Value::Array(results));
        }
        OutputFormat::Csv => {
            if constant {
                out.push_str("case,n,mu,mu_lo,mu_hi,Mn_lo,Mn_hi\n");
            } else {
                out.push_str("case,n,newton_x1,paper_x1,laguerre_x1,mu_lo,mu_hi");
                for r in 0..=cfg.qd_rounds {
                    let _ = write!(out, ",q{r}");
                }
                out.push_str(",qd_breakdown\n");
            }
            for ((c, _), r) in cfg.cells.iter().zip(&reports) {
                let _ = write!(out, "{},{}", csv_field(&c.spec_string()), r.n);
                if constant {
                    let _ = writeln!(
                        out,
                        ",{},{},{},{},{}",
                        f(r.mu.mid()),
                        f(r.mu.lo),
                        f(r.mu.hi),
                        f(r.markov_constant.lo),
                        f(r.markov_constant.hi)
                    );
                } else {
                    let _ = write!(
                        out,
                        ",{},{},{},{},{}",
                        f(r.newton_x1),
                        r.paper_closed_x1.map(f).unwrap_or_default(),
                        f(r.laguerre_x1),
                        f(r.mu.lo),
                        f(r.mu.hi)
                    );
                    for k in 0..=cfg.qd_rounds {
                        let _ = write!(out, ",{}", r.qd(k).map(f).unwrap_or_default());
                    }
                    let _ = writeln!(out, ",{}", r.qd_breakdown);
                }
            }
        }
        OutputFormat::Pretty => {
            for ((c, _), r) in cfg.cells.iter().zip(&reports) {
                let _ = writeln!(out, "{c} n={}", r.n);
                let _ = writeln!(out, "  mu   = {}  [{}, {}]", f(r.mu.mid()), f(r.mu.lo), f(r.mu.hi));
                if r.mu.lo < f64::MIN_POSITIVE {
                    let _ = writeln!(out, "  ln mu = [{}, {}]", f(r.ln_mu.lo), f(r.ln_mu.hi));
                }
                let _ = writeln!(
                    out,
                    "  M_n  = {}  [{}, {}]",
                    f(r.markov_constant.mid()),
                    f(r.markov_constant.lo),
                    f(r.markov_constant.hi)
                );
                if !constant {
                    let _ = writeln!(out, "  newton x1     = {}", f(r.newton_x1));
                    if let Some(p) = r.paper_closed_x1 {
                        let _ = writeln!(out, "  closed-form x1 = {}", f(p));
                    }
                    let _ = writeln!(out, "  laguerre x~1  = {}", f(r.laguerre_x1));
                    for (k, q) in &r.qd_upper {
                        let _ = writeln!(out, "  q_n^({k})       = {}", f(*q));
                    }
                    if r.qd_breakdown {
                        out.push_str("  qd breakdown before the requested round\n");
                    }
                }
            }
        }
    }
    Outcome { code: EXIT_OK, stdout: out, stderr: String::new() }
}

fn run_table(cfg: &RunConfig) -> Outcome {
    let results = compute_cells(cfg, 2);
    let d = cfg.digits;
    let f = |v: f64| fmt_sig(v, d);
    let is_b = cfg.cells.first().map(|(c, _)| c.tag == CaseTag::LaguerreB).unwrap_or(false);
    let failed = first_error(&results).map(exit_code);
    let mut out = String::new();
    match cfg.output {
        OutputFormat::Json => {
            let rows: Vec<Value> = cfg
                .cells
                .iter()
                .zip(&results)
                .map(|((c, n), r)| match r {
                    Ok(r) => json!({
                        "case": c.spec_string(), "n": n, "x1": r.paper_closed_x1, "x_tilde1": r.laguerre_x1,
                        "mu": r.mu.mid(), "mu_interval": r.mu, "q2": r.qd(2), "status": "ok"
                    }),
                    Err(e) => json!({ "case": c.spec_string(), "n": n, "status": e.to_string() }),
                })
                .collect();
            out = envelope("table", Value::Array(rows));
        }
        OutputFormat::Csv | OutputFormat::Pretty => {
            let pretty = cfg.output == OutputFormat::Pretty;
            let header: Vec<&str> = if is_b {
                vec!["M", "n", "x1", "x_tilde1", "mu", "q2", "status"]
            } else {
                vec!["case", "n", "x_tilde1", "mu", "q2", "status"]
            };
            let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
            for ((c, n), r) in cfg.cells.iter().zip(&results) {
                let mut row =
                    if is_b { vec![fmt_num(c.mass), n.to_string()] } else { vec![c.spec_string(), n.to_string()] };
                match r {
                    Ok(r) => {
                        if is_b {
                            row.push(r.paper_closed_x1.map(f).unwrap_or_default());
                        }
                        row.push(f(r.laguerre_x1));
                        row.push(f(r.mu.mid()));
                        row.push(r.qd(2).map(f).unwrap_or_default());
                        row.push(if r.qd(2).is_some() { "ok".into() } else { "qd breakdown".into() });
                    }
                    Err(e) => {
                        row.extend(std::iter::repeat(String::new()).take(header.len() - 3));
                        row.push(e.to_string());
                    }
                }
                rows.push(row);
            }
            if pretty {
                let widths: Vec<usize> =
                    (0..header.len()).map(|k| rows.iter().map(|r| r[k].chars().count()).max().unwrap_or(0)).collect();
                for row in &rows {
                    let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
                    let _ = writeln!(out, "{}", line.join("  ").trim_end());
                }
            } else {
                for row in &rows {
                    let line: Vec<String> = row.iter().map(|s| csv_field(s)).collect();
                    let _ = writeln!(out, "{}", line.join(","));
                }
            }
        }
    }
    let code = failed.unwrap_or(EXIT_OK);
    let stderr = if code != EXIT_OK { "error: one or more table cells failed\n".into() } else { String::new() };
    Outcome { code, stdout: out, stderr }
}

/// Shortest round-trip decimal for parameter columns.
fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn run_verify(cfg: &RunConfig) -> Outcome {
    let results: Vec<Result<VerificationReport>> =
        cfg.cells.iter().map(|(c, n)| check_inequality(c, *n, cfg.trials, cfg.seed)).collect();
    if let Some(e) = results.iter().find_map(|r| r.as_ref().err()) {
        return Outcome { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") };
    }
    let reports: Vec<VerificationReport> = results.into_iter().map(|r| r.unwrap()).collect();
    let all = reports.iter().all(|r| r.passed);
    let f = |v: f64| fmt_sig(v, cfg.digits);
    let mut out = String::new();
    match cfg.output {
        OutputFormat::Json => out = envelope("verify", serde_json::to_value(&reports).expect("json")),
        OutputFormat::Csv => {
            out.push_str("case,n,trials,seed,mu_lo,mu_hi,max_ratio,extremal_gap,passed\n");
            for r in &reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    csv_field(&r.case),
                    r.n,
                    r.trials,
                    r.seed,
                    f(r.mu.lo),
                    f(r.mu.hi),
                    f(r.max_ratio),
                    f(r.extremal_gap),
                    r.passed
                );
            }
        }
        OutputFormat::Pretty => {
            for r in &reports {
                let _ = writeln!(
                    out,
                    "{} {} n={}: max_ratio = {} over {} trials (seed {}), extremal gap = {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.case,
                    r.n,
                    f(r.max_ratio),
                    r.trials,
                    r.seed,
                    f(r.extremal_gap)
                );
            }
        }
    }
    Outcome { code: if all { EXIT_OK } else { EXIT_VERIFY_FAILED }, stdout: out, stderr: String::new() }
}

fn run_identities(cfg: &RunConfig) -> Outcome {
    let report: IdentityReport = match check_identities_seeded(cfg.depth, cfg.seed, 10) {
        Ok(r) => r,
        Err(e) => return Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    let mut out = String::new();
    match cfg.output {
        OutputFormat::Json => out = envelope("identities", serde_json::to_value(&report).expect("json")),
        OutputFormat::Csv => {
            out.push_str("suite,checked,failures,max_rel_error,exact\n");
            for s in &report.suites {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    s.name,
                    s.checked,
                    s.failures,
                    fmt_sig(s.max_rel_error, cfg.digits),
                    s.exact
                );
            }
        }
        OutputFormat::Pretty => {
            for s in &report.suites {
                let _ = writeln!(
                    out,
                    "{} {}: {} checks, {} failures{}",
                    if s.failures == 0 { "PASS" } else { "FAIL" },
                    s.name,
                    s.checked,
                    s.failures,
                    if s.exact { String::from(" (exact)") } else { format!(", max rel error {:.2e}", s.max_rel_error) }
                );
            }
        }
    }
    let code = if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Outcome { code, stdout: out, stderr: String::new() }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match RunConfig::from_cli(&cli) {
        Ok(cfg) => run(&cfg),
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn run_str(s: &str) -> Outcome {
        run_args(std::iter::once("coherent-mb".to_string()).chain(toks(s)))
    }

    #[test]
    fn grammar() {
        let cells = parse_case_tokens(&toks("laguerre-b M=1,5 n=20,50")).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[1], (CoherentCase::laguerre_b(1.0).unwrap(), 50));
        assert_eq!(cells[2].0.mass, 5.0);
        let d = parse_case_tokens(&toks("jacobi-d alpha=0.5 beta=0.5 xi=1 M=0 n=3")).unwrap();
        assert_eq!(d[0].0, CoherentCase::jacobi_d(0.5, 0.5, 1.0, 0.0).unwrap());
    }

    #[test]
    fn grammar_rejections() {
        for bad in [
            "laguerre-b M=1",
            "laguerre-b M=1 n=0",
            "laguerre-b M=1 beta=2 n=3",
            "laguerre-b M=1 M=2 n=3",
            "laguerre-b n=3",
            "laguerre-z M=1 n=3",
            "laguerre-b M=x n=3",
            "laguerre-b M=-1 n=3",
            "laguerre-b M 1 n=3",
        ] {
            let e = parse_case_tokens(&toks(bad)).unwrap_err();
            assert!(e.is_input_error(), "{bad}");
        }
    }

    #[test]
    fn unknown_key_names_allowed_keys() {
        let e = parse_case_tokens(&toks("jacobi-b beta=1 M=0 alpha=1 n=2")).unwrap_err();
        assert!(e.to_string().contains("unknown key `alpha`"));
        assert!(e.to_string().contains("beta, M, n"));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.020393972123, 9), "0.0203939721");
        assert_eq!(fmt_sig(1.0, 9), "1.00000000");
        assert_eq!(fmt_sig(0.0, 9), "0");
        assert_eq!(fmt_sig(9.9999999999, 9), "10.0000000");
        assert_eq!(fmt_sig(-3.25e-12, 9), "-3.25000000e-12");
    }

    #[test]
    fn constant_trivial() {
        let o = run_str("--output csv constant laguerre-b M=0 n=1");
        assert_eq!(o.code, 0);
        let line = o.stdout.lines().nth(1).unwrap();
        assert_eq!(line, "laguerre-b M=0,1,1.00000000,1.00000000,1.00000000,1.00000000,1.00000000");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str("constant laguerre-b M=1 n=0").code, EXIT_INVALID);
        assert_eq!(run_str("verify laguerre-b M=1 n=0").code, EXIT_INVALID);
        assert_eq!(run_str("constant laguerre-b M=1 n=3 --tol 1e-20").code, EXIT_INVALID);
        assert_eq!(run_str("frobnicate").code, EXIT_INVALID);
        assert_eq!(run_str("identities --depth 21").code, EXIT_INVALID);
        assert_eq!(run_str("--digits 20 constant laguerre-b M=1 n=3").code, EXIT_INVALID);
    }

    #[test]
    fn json_has_schema() {
        let o = run_str("--output json bounds jacobi-a alpha=1 beta=1 xi=2 n=4");
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "bounds");
    }
}
