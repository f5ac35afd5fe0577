//! Command-line surface over every layer: exact counts and heights, the
//! lattice Dirichlet-constants table, convergence data for plotting, and the
//! cross-validation suites.
//!
//! Exit codes follow a stable contract: 0 success, 2 usage or domain error,
//! 3 internal-consistency failure, 4 numeric failure. CSV output uses a
//! comma separator, a header row, '.' decimal points and LF line endings,
//! and is byte-identical across runs for a fixed configuration. JSON output
//! mirrors the CSV columns, one object per row. Decimal rendering of exact
//! values is round-half-even at `--digits` significant digits.
//!
//! The `verify` suites pin their own working precision and tolerances so
//! that their pass/fail behavior does not drift with the global flags.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::asym::{
    convergence_ratio, g2_asym, g2_direct, h2_coefficient, ThirdCase, DISPLAY_SQRT_COEFF,
};
use crate::dirichlet::{
    beta_real, coprime_sum_check, special_value_check, zeta_anywhere, ConstantsSource,
    FrozenConstants, QuadratureConstants,
};
use crate::error::{MelonError, Result};
use crate::exact::{avg_height_exact, binomial, capped_melon_count, count_melons, dp_oracle_count};
use crate::hp::{decimal_string, HPReal, MIN_PRECISION_BITS};
use crate::specfun::{binom_quotient_approx, gamma_euler, theta_bar, ApproxOrder, ThetaSeriesParams};
use crate::sums::{
    avg_height1_sum, avg_height2_sum, SumMode, BIG_S2_TERMS_PRIMARY, BIG_S2_TERMS_SECONDARY,
};

/// Working precision of the verification suites, independent of `--precision-bits`.
const VERIFY_PREC: usize = 128;

#[derive(Parser)]
#[command(
    name = "melons",
    version,
    about = "Exact and asymptotic average height of nonintersecting path ensembles",
    disable_help_subcommand = true
)]
struct Cli {
    /// Working precision in bits for high-precision arithmetic (>= 53)
    #[arg(long, global = true, default_value_t = 128)]
    precision_bits: usize,

    /// Tolerance for quadrature and series truncation, as a decimal string
    #[arg(long, global = true, default_value = "1e-12", allow_hyphen_values = true)]
    tol: String,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write output to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Significant digits for decimal rendering (round-half-even)
    #[arg(long, global = true, default_value_t = 10)]
    digits: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Determinant,
    Sums,
    Both,
}

impl Route {
    fn label(self) -> &'static str {
        match self {
            Route::Determinant => "determinant",
            Route::Sums => "sums",
            Route::Both => "both",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Count p-watermelon configurations, optionally capped at height h
    Count {
        /// Half-length of each path
        #[arg(long)]
        n: u64,
        /// Number of nonintersecting paths
        #[arg(long)]
        p: u64,
        /// Count only configurations of height <= h
        #[arg(long)]
        h: Option<u64>,
    },
    /// Exact average height H(n,p) as a rational and a decimal
    Height {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        /// Computation route; `both` cross-checks the two and fails on mismatch
        #[arg(long, value_enum, default_value_t = Route::Determinant)]
        route: Route,
    },
    /// Table of Dirichlet-series constants c_{a,b} and the derived height coefficient
    Constants {
        /// Largest first index to tabulate
        #[arg(long, default_value_t = 3)]
        max_a: u32,
        /// Largest second index to tabulate
        #[arg(long, default_value_t = 1)]
        max_b: u32,
    },
    /// Exact-versus-asymptotic height ratio q(n) on a grid of n values
    Convergence {
        /// Largest n in the sweep (runtime guard: at most 2000)
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
        /// Grid spacing; n = 1 and n = n_max are always included
        #[arg(long, default_value_t = 50)]
        step: u64,
    },
    /// Run the cross-validation suites and print the discrepancy reports
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
}

/// Validated global configuration shared by the subcommands.
struct RunConfig {
    prec: usize,
    tol: HPReal,
    format: Format,
    digits: usize,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self> {
        if cli.precision_bits < MIN_PRECISION_BITS {
            return Err(MelonError::Domain(format!(
                "--precision-bits must be at least {MIN_PRECISION_BITS}, got {}",
                cli.precision_bits
            )));
        }
        if cli.digits < 1 {
            return Err(MelonError::Domain("--digits must be at least 1".into()));
        }
        let tol = HPReal::parse(&cli.tol, cli.precision_bits)?;
        if tol.is_zero() || tol.is_negative() {
            return Err(MelonError::Domain(format!(
                "--tol must parse to a positive real, got {}",
                cli.tol
            )));
        }
        Ok(RunConfig { prec: cli.precision_bits, tol, format: cli.format, digits: cli.digits })
    }
}

/// Entry point for the binary: parse, dispatch, deliver output, map errors
/// to the exit-code contract.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (output, err) = dispatch(&cli);
    // Deliver whatever was produced (possibly a partial table) before
    // reporting the failure.
    if !output.is_empty() {
        if let Some(path) = &cli.out {
            if let Err(io) = std::fs::write(path, output.as_bytes()) {
                eprintln!("error: cannot write {}: {io}", path.display());
                return 2;
            }
        } else {
            print!("{output}");
            let _ = std::io::stdout().flush();
        }
    }
    match err {
        None => 0,
        Some(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> (String, Option<MelonError>) {
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => return (String::new(), Some(e)),
    };
    match &cli.command {
        Command::Count { n, p, h } => plain(cmd_count(&cfg, *n, *p, *h)),
        Command::Height { n, p, route } => plain(cmd_height(&cfg, *n, *p, *route)),
        Command::Constants { max_a, max_b } => cmd_constants(&cfg, *max_a, *max_b),
        Command::Convergence { n_max, step } => plain(cmd_convergence(&cfg, *n_max, *step)),
        Command::Verify { level } => cmd_verify(*level),
    }
}

fn plain(r: Result<String>) -> (String, Option<MelonError>) {
    match r {
        Ok(s) => (s, None),
        Err(e) => (String::new(), Some(e)),
    }
}

// ─── row rendering ───────────────────────────────────────────────────────────

/// Renders header + rows in the chosen format. `int_cols` lists columns whose
/// cells should appear as JSON numbers when they parse as integers (empty
/// cells become null; anything else falls back to a string).
fn render_rows(fmt: Format, header: &[&str], rows: &[Vec<String>], int_cols: &[usize]) -> String {
    match fmt {
        Format::Table => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in rows {
                for (i, cell) in row.iter().enumerate() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
            let mut out = String::new();
            let emit = |out: &mut String, cells: &[String]| {
                let line = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
                    .collect::<Vec<_>>()
                    .join("  ");
                out.push_str(line.trim_end());
                out.push('\n');
            };
            emit(&mut out, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
            for row in rows {
                emit(&mut out, row);
            }
            out
        }
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let array: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (i, cell) in row.iter().enumerate() {
                        let v = if int_cols.contains(&i) {
                            if cell.is_empty() {
                                Value::Null
                            } else {
                                cell.parse::<i64>().map(Value::from).unwrap_or_else(|_| json!(cell))
                            }
                        } else {
                            json!(cell)
                        };
                        obj.insert(header[i].to_string(), v);
                    }
                    Value::Object(obj)
                })
                .collect();
            let mut out = serde_json::to_string_pretty(&Value::Array(array))
                .expect("row values serialize infallibly");
            out.push('\n');
            out
        }
    }
}

// ─── count ───────────────────────────────────────────────────────────────────

fn cmd_count(cfg: &RunConfig, n: u64, p: u64, h: Option<u64>) -> Result<String> {
    if n < 1 || p < 1 {
        return Err(MelonError::Domain(format!("count requires n, p >= 1, got ({n},{p})")));
    }
    let value = match h {
        Some(h) => capped_melon_count(n, p, h),
        None => count_melons(n, p)?,
    };
    if cfg.format == Format::Table {
        return Ok(format!("{value}\n"));
    }
    let row = vec![
        n.to_string(),
        p.to_string(),
        h.map(|x| x.to_string()).unwrap_or_default(),
        value.to_string(),
    ];
    Ok(render_rows(cfg.format, &["n", "p", "h", "count"], &[row], &[0, 1, 2]))
}

// ─── height ──────────────────────────────────────────────────────────────────

fn cmd_height(cfg: &RunConfig, n: u64, p: u64, route: Route) -> Result<String> {
    let by_sums = |n: u64| -> Result<BigRational> {
        let v = match p {
            1 => avg_height1_sum(n, SumMode::Exact)?,
            2 => avg_height2_sum(n, SumMode::Exact)?,
            _ => {
                return Err(MelonError::Domain(format!(
                    "the summation route covers p = 1 and p = 2 only, got p = {p}"
                )))
            }
        };
        Ok(v.as_exact().expect("exact mode yields a rational").clone())
    };
    let value = match route {
        Route::Determinant => avg_height_exact(n, p)?,
        Route::Sums => by_sums(n)?,
        Route::Both => {
            let det = avg_height_exact(n, p)?;
            let sums = by_sums(n)?;
            if det != sums {
                return Err(MelonError::Internal(format!(
                    "height routes disagree at n = {n}, p = {p}: determinant {det}, sums {sums}"
                )));
            }
            det
        }
    };
    let dec = decimal_string(&value, cfg.digits);
    if cfg.format == Format::Table {
        let mut out = format!("{}/{} = {dec}\n", value.numer(), value.denom());
        if route == Route::Both {
            out.push_str("routes agree\n");
        }
        return Ok(out);
    }
    let row = vec![
        n.to_string(),
        p.to_string(),
        route.label().to_string(),
        value.numer().to_string(),
        value.denom().to_string(),
        dec,
    ];
    Ok(render_rows(
        cfg.format,
        &["n", "p", "route", "H_num", "H_den", "H_decimal"],
        &[row],
        &[0, 1],
    ))
}

// ─── constants ───────────────────────────────────────────────────────────────

const CONSTANTS_HEADER: [&str; 6] =
    ["a", "b", "residue_main_coeff", "residue_half", "c_ab", "c_error"];

/// Emits the requested constant rows plus the eight pairs the height
/// coefficient needs; on quadrature failure the rows computed so far are
/// still rendered and the error propagates as the exit code.
fn cmd_constants(cfg: &RunConfig, max_a: u32, max_b: u32) -> (String, Option<MelonError>) {
    let src = QuadratureConstants::new(cfg.tol.clone(), cfg.prec);
    let mut pairs: BTreeSet<(u32, u32)> =
        crate::asym::H2_COEFFICIENT_MULTIPLIERS.iter().map(|&(a, b, _)| (a, b)).collect();
    for a in 0..=max_a {
        for b in 0..=a.min(max_b) {
            pairs.insert((a, b));
        }
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    for &(a, b) in &pairs {
        match src.constants(a, b) {
            Ok(c) => rows.push(vec![
                a.to_string(),
                b.to_string(),
                c.residue_main_coeff.to_string(),
                c.residue_half.to_string(),
                c.c_ab.to_decimal_string(cfg.digits),
                c.c_error.to_decimal_string(3),
            ]),
            Err(e) => return (render_constants(cfg, &rows, None), Some(e)),
        }
    }
    let coeff = match h2_coefficient(&src) {
        Ok(c) => c,
        Err(e) => return (render_constants(cfg, &rows, None), Some(e)),
    };
    let wp = cfg.prec + 16;
    let k_pi = coeff.k.round_to(wp).mul(&HPReal::pi(wp).sqrt());
    let footer = (
        coeff.k.to_decimal_string(cfg.digits),
        k_pi.to_decimal_string(cfg.digits),
        src.describe(),
    );
    (render_constants(cfg, &rows, Some(footer)), None)
}

fn render_constants(
    cfg: &RunConfig,
    rows: &[Vec<String>],
    footer: Option<(String, String, String)>,
) -> String {
    match cfg.format {
        Format::Table => {
            let mut out = render_rows(Format::Table, &CONSTANTS_HEADER, rows, &[]);
            if let Some((k, k_pi, source)) = footer {
                out.push('\n');
                out.push_str(&format!("K          = {k}\n"));
                out.push_str(&format!("K*sqrt(pi) = {k_pi}\n"));
                out.push_str(&format!("source: {source}\n"));
            }
            out
        }
        Format::Csv | Format::Json => {
            let mut all = rows.to_vec();
            if let Some((k, k_pi, _)) = footer {
                all.push(vec!["K".into(), String::new(), String::new(), String::new(), k, String::new()]);
                all.push(vec![
                    "K_sqrt_pi".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    k_pi,
                    String::new(),
                ]);
            }
            render_rows(cfg.format, &CONSTANTS_HEADER, &all, &[0, 1])
        }
    }
}

// ─── convergence ─────────────────────────────────────────────────────────────

fn cmd_convergence(cfg: &RunConfig, n_max: u64, step: u64) -> Result<String> {
    if !(1..=2000).contains(&n_max) {
        return Err(MelonError::Domain(format!(
            "convergence supports 1 <= n_max <= 2000 (runtime guard), got {n_max}"
        )));
    }
    if step < 1 {
        return Err(MelonError::Domain("step must be at least 1".into()));
    }
    let mut grid: BTreeSet<u64> = [1, n_max].into();
    let mut n = step;
    while n <= n_max {
        grid.insert(n);
        n += step;
    }
    let wp = cfg.prec + 16;
    let coeff = HPReal::parse(DISPLAY_SQRT_COEFF, wp)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &n in &grid {
        let h = avg_height_exact(n, 2)?;
        let asym = coeff
            .mul(&HPReal::from_u64(n, wp).sqrt())
            .sub(&HPReal::from_u64(2, wp));
        let q = HPReal::from_ratio(&h, wp).div(&asym);
        rows.push(vec![
            n.to_string(),
            h.numer().to_string(),
            h.denom().to_string(),
            asym.to_decimal_string(cfg.digits),
            q.to_decimal_string(cfg.digits),
        ]);
    }
    Ok(render_rows(
        cfg.format,
        &["n", "H_exact_num", "H_exact_den", "H_asym", "q"],
        &rows,
        &[0],
    ))
}

// ─── verify ──────────────────────────────────────────────────────────────────

struct SuiteOutcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(name: &'static str, r: Result<String>) -> SuiteOutcome {
    match r {
        Ok(detail) => SuiteOutcome { name, pass: true, detail },
        Err(e) => SuiteOutcome { name, pass: false, detail: e.to_string() },
    }
}

fn cmd_verify(level: Level) -> (String, Option<MelonError>) {
    let mut suites = vec![
        outcome("enumeration-oracle", suite_enumeration()),
        outcome("formula-equivalence", suite_formula_equivalence()),
        outcome("theta-reciprocity", suite_theta_reciprocity()),
        outcome("euler-product", suite_euler_product()),
        outcome("stirling-quotient", suite_stirling_quotient()),
    ];
    if level == Level::Full {
        suites.push(outcome("height-ratio-at-1000", suite_q1000()));
        suites.push(outcome("constants-pipeline", suite_constants_pipeline()));
    }
    let mut out = String::new();
    let mut failed = 0usize;
    for s in &suites {
        let tag = if s.pass { "PASS" } else { "FAIL" };
        if !s.pass {
            failed += 1;
        }
        out.push_str(&format!("{tag} {}: {}\n", s.name, s.detail));
    }
    out.push('\n');
    out.push_str(&discrepancy_reports());
    let err = (failed > 0)
        .then(|| MelonError::Internal(format!("{failed} verification suite(s) failed")));
    (out, err)
}

fn suite_enumeration() -> Result<String> {
    for n in 1..=6u64 {
        for p in 1..=3u64 {
            let total = count_melons(n, p)?;
            let oracle = dp_oracle_count(n, p, None)?;
            if total != oracle {
                return Err(MelonError::Internal(format!(
                    "C({n},{p}): product formula {total}, oracle {oracle}"
                )));
            }
            for h in 0..=2 * (n + p) {
                let capped = capped_melon_count(n, p, h);
                let oracle = dp_oracle_count(n, p, Some(h))?;
                if capped != oracle {
                    return Err(MelonError::Internal(format!(
                        "C({n},{p},{h}): determinant {capped}, oracle {oracle}"
                    )));
                }
            }
        }
    }
    Ok("determinant counts equal the path-walking oracle for n <= 6, p <= 3, every cap".into())
}

fn suite_formula_equivalence() -> Result<String> {
    for n in 1..=20u64 {
        let s = avg_height1_sum(n, SumMode::Exact)?;
        let s = s.as_exact().expect("exact mode");
        let d = avg_height_exact(n, 1)?;
        if *s != d {
            return Err(MelonError::Internal(format!(
                "H({n},1): summation {s}, determinant {d}"
            )));
        }
    }
    for n in 1..=12u64 {
        let s = avg_height2_sum(n, SumMode::Exact)?;
        let s = s.as_exact().expect("exact mode");
        let d = avg_height_exact(n, 2)?;
        if *s != d {
            return Err(MelonError::Internal(format!(
                "H({n},2): summation {s}, determinant {d}"
            )));
        }
    }
    let mut a = BIG_S2_TERMS_PRIMARY.to_vec();
    let mut b = BIG_S2_TERMS_SECONDARY.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(MelonError::Internal("the two S2 term tables diverge".into()));
    }
    Ok("summation heights equal determinant heights (p=1 n<=20, p=2 n<=12); term tables agree"
        .into())
}

fn suite_theta_reciprocity() -> Result<String> {
    let wp = VERIFY_PREC;
    let params = ThetaSeriesParams::for_precision(wp);
    let mut worst = 0.0f64;
    for &(num, den) in &[(1i64, 4i64), (1, 2), (2, 1), (5, 1)] {
        let u = HPReal::from_i64(num, wp).div(&HPReal::from_i64(den, wp));
        let lhs = theta_bar(&u, &params)?;
        let rhs = theta_bar(&u.recip(), &params)?.div(&u.sqrt());
        let diff = lhs.sub(&rhs).abs().to_f64();
        if diff >= 1e-10 {
            return Err(MelonError::Internal(format!(
                "theta reciprocity off by {diff:.3e} at u = {num}/{den}"
            )));
        }
        worst = worst.max(diff);
    }
    Ok(format!(
        "max |theta(u) - theta(1/u)/sqrt(u)| = {worst:.1e} over u in {{1/4, 1/2, 2, 5}}"
    ))
}

fn suite_euler_product() -> Result<String> {
    let mut worst = 0.0f64;
    for &(a, b, s) in &[(0u32, 0u32, 3i64), (2, 0, 4), (2, 2, 6)] {
        let s_hp = HPReal::from_i64(s, VERIFY_PREC);
        let (lhs, rhs) = coprime_sum_check(a, b, &s_hp, 400)?;
        let diff = (lhs - rhs).abs();
        if diff >= 1e-8 {
            return Err(MelonError::Internal(format!(
                "gcd factorization off by {diff:.3e} at (a,b,s) = ({a},{b},{s}): {lhs} vs {rhs}"
            )));
        }
        worst = worst.max(diff);
    }
    Ok(format!(
        "max |lhs - rhs| = {worst:.1e} over (a,b,s) in {{(0,0,3), (2,0,4), (2,2,6)}}, k,l <= 400"
    ))
}

fn suite_stirling_quotient() -> Result<String> {
    let wp = VERIFY_PREC;
    let center = binomial(200, 100);
    let mut worst = 0.0f64;
    for k in -25i64..=25 {
        let exact = BigRational::new(binomial(200, 100 - k), center.clone());
        let approx = binom_quotient_approx(100, 0, k, ApproxOrder::Full, wp)?;
        let exact_hp = HPReal::from_ratio(&exact, wp);
        let rel = approx.value.sub(&exact_hp).abs().div(&exact_hp).to_f64();
        if rel >= 1e-6 {
            return Err(MelonError::Internal(format!(
                "binomial quotient off by rel. {rel:.3e} at k = {k}"
            )));
        }
        worst = worst.max(rel);
    }
    Ok(format!(
        "max rel. error {worst:.1e} for binom(200,100-k)/binom(200,100), |k| <= 25"
    ))
}

fn suite_q1000() -> Result<String> {
    let q = convergence_ratio(1000, VERIFY_PREC)?;
    let qf = q.to_f64();
    if !(1.00684..=1.00784).contains(&qf) {
        return Err(MelonError::Internal(format!(
            "q(1000) = {} outside [1.00684, 1.00784]",
            q.to_decimal_string(10)
        )));
    }
    Ok(format!("q(1000) = {} in [1.00684, 1.00784]", q.to_decimal_string(10)))
}

fn suite_constants_pipeline() -> Result<String> {
    let wp = VERIFY_PREC;
    let src = QuadratureConstants::new(HPReal::parse("1e-8", wp)?, wp);
    let c00 = src.c_ab(0, 0)?;
    let half = HPReal::from_i64(1, wp).div(&HPReal::from_i64(2, wp));
    let ident = zeta_anywhere(&half, wp)?.mul(&beta_real(&half, wp)?).sub(&gamma_euler(wp));
    let dev = c00.sub(&ident).abs().to_f64();
    if dev >= 1e-6 {
        return Err(MelonError::Internal(format!(
            "c_00 deviates from the zeta*beta - gamma identity by {dev:.3e}"
        )));
    }
    let coeff = h2_coefficient(&src)?;
    let k_pi = coeff.k.round_to(wp).mul(&HPReal::pi(wp).sqrt());
    let kf = k_pi.to_f64();
    if !(2.57708..=2.57808).contains(&kf) {
        return Err(MelonError::Internal(format!(
            "K*sqrt(pi) = {} outside [2.57708, 2.57808]",
            k_pi.to_decimal_string(10)
        )));
    }
    Ok(format!(
        "|c_00 - (zeta(1/2)beta(1/2) - gamma)| = {dev:.1e}; K*sqrt(pi) = {} in [2.57708, 2.57808]",
        k_pi.to_decimal_string(10)
    ))
}

/// The informational discrepancy reports: places where the printed forms of
/// the expansions disagree with what both the continuation and truncated
/// summation support. Reported, never asserted.
fn discrepancy_reports() -> String {
    let wp = VERIFY_PREC;
    let mut out = String::from("discrepancy reports (informational, not scored):\n");

    match special_value_check(0, 0, 0, wp) {
        Ok(v) => {
            out.push_str(&format!(
                "  [origin value] the continued double series at s = 0 evaluates to {} (= 1/4);\n    \
                 the printed closed form reads 1/8. Consistently, the measured constant term\n    \
                 of the (0,0) double-sum expansion is zeta(0)*(1/4) = -1/8.\n",
                v.to_decimal_string(10)
            ));
        }
        Err(e) => out.push_str(&format!("  [origin value] evaluation failed: {e}\n")),
    }

    let frozen = FrozenConstants { prec: wp };
    let third = (|| -> Result<(f64, f64)> {
        let tol = HPReal::parse("1e-18", wp)?;
        let direct = g2_direct(400, 2, 2, &tol)?;
        let (derived, _) = g2_asym(400, 1, 1, &frozen, ThirdCase::Derived, wp)?;
        let (printed, _) = g2_asym(400, 1, 1, &frozen, ThirdCase::Printed, wp)?;
        let rel = |x: &HPReal| x.sub(&direct).abs().div(&direct).to_f64();
        Ok((rel(&derived), rel(&printed)))
    })();
    match third {
        Ok((rel_derived, rel_printed)) => out.push_str(&format!(
            "  [sqrt(pi n) coefficient, both indices positive] the printed expansion carries\n    \
             an extra factor (2a)!(2b)!/(a!b!) in its sqrt(pi n)-term (4 at (a,b) = (1,1)).\n    \
             Against direct summation at n = 400: derived form off by rel. {rel_derived:.1e},\n    \
             printed form off by rel. {rel_printed:.1e}.\n"
        )),
        Err(e) => out.push_str(&format!("  [sqrt(pi n) coefficient] evaluation failed: {e}\n")),
    }

    let additive = (|| -> Result<(f64, f64)> {
        let h = HPReal::from_ratio(&avg_height_exact(100, 2)?, wp);
        let coeff = h2_coefficient(&frozen)?;
        let base = coeff.k.round_to(wp).mul(&HPReal::pi(wp).mul(&HPReal::from_u64(100, wp)).sqrt());
        let three_halves = HPReal::from_i64(3, wp).div(&HPReal::from_i64(2, wp));
        let dev32 = h.sub(&base.sub(&three_halves)).abs().to_f64();
        let dev2 = h.sub(&base.sub(&HPReal::from_i64(2, wp))).abs().to_f64();
        Ok((dev32, dev2))
    })();
    match additive {
        Ok((dev32, dev2)) => out.push_str(&format!(
            "  [additive constant] the displayed height asymptotic ends in -2 while the\n    \
             assembled expansion ends in -3/2; at n = 100 the exact average sits {dev32:.4}\n    \
             from the -3/2 form and {dev2:.4} from the -2 form.\n"
        )),
        Err(e) => out.push_str(&format!("  [additive constant] evaluation failed: {e}\n")),
    }

    out
}
