//! Sector sweeps behind the `qop` binary.
//!
//! A [`RunConfig`] names a chain, a sector (or all of them), the solving
//! method and a list of checks. [`run`] produces a [`Report`] and an exit
//! code: 0 when everything requested holds, 1 for a violated identity or a
//! failed numeric check, 2 for invalid parameters, 3 for an internal alarm.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::{bae_residual, find_roots_seeded, RootRecord};
use crate::error::{Error, Result};
use crate::functional::{
    fundamental_checks, fusion_check, plucker_sweep, pq_decompose, wrong_side_p, IdentityCheck,
    IdentityReport, IdentityStatus, WronskianFamily,
};
use crate::halfint::HalfInt;
use crate::qsolver::{
    build_linear_system, closed_form_q, solve_q_linear, verify_tq, ChainParams, QPolynomial,
};

pub const SCHEMA: u32 = 1;

/// Tolerance on `max_j |LHS_j/RHS_j - 1|` for the `bae` check.
pub const BAE_TOL: f64 = 1e-9;

/// Spins used by the `plucker` and `fusion` checks.
pub const SPIN_GRID: [HalfInt; 6] = [
    HalfInt::from_twice(-2),
    HalfInt::from_twice(-1),
    HalfInt::from_twice(0),
    HalfInt::from_twice(1),
    HalfInt::from_twice(2),
    HalfInt::from_twice(3),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Closed,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Tq,
    Bae,
    Functional,
    Plucker,
    Fusion,
    Decompose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Latex,
    Plain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N")]
    pub n: u32,
    /// `None` sweeps every sector `NL ≤ p ≤ (N+1)L`.
    pub p: Option<u32>,
    pub method: Method,
    pub checks: Vec<Check>,
    pub output: OutputFormat,
    pub seed: u64,
}

impl RunConfig {
    pub fn sectors(&self) -> Result<Vec<ChainParams>> {
        match self.p {
            Some(p) => Ok(vec![ChainParams::new(self.l, self.n, p)?]),
            None => ChainParams::sectors(self.l, self.n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub method: Method,
    pub q: QPolynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaeReport {
    pub max_residual: f64,
    pub max_backward_error: f64,
    pub roots: Vec<RootRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub deg_f: Option<usize>,
    pub deg_c: Option<usize>,
    pub deg_r: Option<usize>,
    pub f: String,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorReport {
    pub params: ChainParams,
    pub solutions: Vec<Solution>,
    pub identities: Vec<IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bae: Option<BaeReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub config: RunConfig,
    pub sectors: Vec<SectorReport>,
    pub exit_code: i32,
}

/// Exit code for an error: 2 for bad input, 3 for an internal alarm,
/// 1 otherwise.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidParams(_) | Error::Parse(_) => 2,
        e if e.is_alarm() => 3,
        _ => 1,
    }
}

fn solve(params: &ChainParams, method: Method) -> Result<QPolynomial> {
    match method {
        Method::Linear | Method::Both => solve_q_linear(&build_linear_system(params)),
        Method::Closed => Ok(closed_form_q(params)?.1),
    }
}

fn sector(params: ChainParams, config: &RunConfig) -> SectorReport {
    let mut report = SectorReport {
        params,
        solutions: Vec::new(),
        identities: Vec::new(),
        bae: None,
        decomposition: None,
        error: None,
        exit_code: 0,
    };
    if let Err(e) = fill_sector(&mut report, config) {
        report.exit_code = report.exit_code.max(exit_code_for(&e));
        report.error = Some(e.to_string());
    }
    report
}

fn push(report: &mut SectorReport, check: &IdentityCheck) {
    let entry = IdentityReport::from_check(report.params, check);
    if entry.status == IdentityStatus::Nonzero {
        report.exit_code = report.exit_code.max(1);
    }
    report.identities.push(entry);
}

fn fill_sector(report: &mut SectorReport, config: &RunConfig) -> Result<()> {
    let params = report.params;
    let methods: &[Method] = match config.method {
        Method::Both => &[Method::Linear, Method::Closed],
        Method::Linear => &[Method::Linear],
        Method::Closed => &[Method::Closed],
    };
    for &m in methods {
        report.solutions.push(Solution {
            method: m,
            q: solve(&params, m)?,
        });
    }
    let q = report.solutions[0].q.clone();
    if let [a, b] = &report.solutions[..] {
        if a.q != b.q {
            return Err(Error::InvariantViolation(
                "closed form and linear solve disagree".into(),
            ));
        }
    }
    let checks = &config.checks;
    if checks.contains(&Check::Tq) {
        push(report, &IdentityCheck::new("tq", verify_tq(&q)));
    }
    if checks.contains(&Check::Bae) {
        let roots = find_roots_seeded(&q, config.seed)?;
        let max_residual = bae_residual(&roots)?;
        if !(max_residual < BAE_TOL) {
            report.exit_code = report.exit_code.max(1);
        }
        report.bae = Some(BaeReport {
            max_residual,
            max_backward_error: roots.backward_errors.iter().cloned().fold(0.0, f64::max),
            roots: roots.records()?,
        });
    }
    let needs_pair = [
        Check::Functional,
        Check::Plucker,
        Check::Fusion,
        Check::Decompose,
    ]
    .iter()
    .any(|c| checks.contains(c));
    if !needs_pair {
        return Ok(());
    }
    let pair = wrong_side_p(&q)?;
    if checks.contains(&Check::Functional) {
        for c in fundamental_checks(&pair)? {
            push(report, &c);
        }
    }
    if checks.contains(&Check::Decompose) {
        let d = pq_decompose(&pair)?;
        report.decomposition = Some(DecompositionReport {
            deg_f: d.f.degree(),
            deg_c: d.c.degree(),
            deg_r: d.r.degree(),
            f: d.f.to_string(),
            c: d.c.to_string(),
        });
    }
    let wants_family = [Check::Functional, Check::Plucker, Check::Fusion]
        .iter()
        .any(|c| checks.contains(c));
    if wants_family {
        let family = WronskianFamily::new(pair, 6)?;
        if checks.contains(&Check::Functional) {
            for c in family.structure_checks()? {
                push(report, &c);
            }
        }
        if checks.contains(&Check::Plucker) {
            for ((s1, s2, s3), r) in plucker_sweep(&family, &SPIN_GRID) {
                push(
                    report,
                    &IdentityCheck::new(format!("plucker[{s1},{s2},{s3}]"), r),
                );
            }
        }
        if checks.contains(&Check::Fusion) {
            for s in SPIN_GRID {
                push(
                    report,
                    &IdentityCheck::new(format!("fusion[s={s}]"), fusion_check(&family, s)),
                );
            }
        }
    }
    Ok(())
}

// 0 lets rayon pick
fn thread_count(var: Option<&str>) -> usize {
    var.and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

fn thread_pool() -> rayon::ThreadPool {
    let threads = thread_count(std::env::var("QOP_THREADS").ok().as_deref());
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Runs every requested sector, in parallel, and assembles the report in
/// increasing `p`.
pub fn run(config: &RunConfig) -> Report {
    let sectors = match config.sectors() {
        Ok(s) => s,
        Err(e) => {
            return Report {
                schema: SCHEMA,
                config: config.clone(),
                sectors: Vec::new(),
                exit_code: exit_code_for(&e),
            }
        }
    };
    let reports: Vec<SectorReport> =
        thread_pool().install(|| sectors.into_par_iter().map(|p| sector(p, config)).collect());
    let exit_code = reports.iter().map(|r| r.exit_code).max().unwrap_or(0);
    Report {
        schema: SCHEMA,
        config: config.clone(),
        sectors: reports,
        exit_code,
    }
}

impl Report {
    /// The report in the configured output format.
    pub fn render(&self) -> String {
        match self.config.output {
            OutputFormat::Json => {
                serde_json::to_string_pretty(self).expect("report serializes") + "\n"
            }
            OutputFormat::Latex | OutputFormat::Plain => {
                let latex = self.config.output == OutputFormat::Latex;
                let mut out = String::new();
                for s in &self.sectors {
                    for sol in &s.solutions {
                        let body = if latex {
                            sol.q.to_latex()
                        } else {
                            sol.q.to_string()
                        };
                        let method = format!("{:?}", sol.method).to_lowercase();
                        out.push_str(&format!("{} [{method}] Q(z) = {body}\n", s.params));
                    }
                    for id in s
                        .identities
                        .iter()
                        .filter(|i| i.status == IdentityStatus::Nonzero)
                    {
                        out.push_str(&format!(
                            "{} {} nonzero (degree {:?})\n",
                            s.params, id.identity_name, id.residual_degree
                        ));
                    }
                    if let Some(e) = &s.error {
                        out.push_str(&format!("{} error: {e}\n", s.params));
                    }
                }
                out
            }
        }
    }

    /// One line per sector plus a verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if self.sectors.is_empty() {
            out.push_str("no sectors run: invalid parameters\n");
        }
        for s in &self.sectors {
            let failed = s
                .identities
                .iter()
                .filter(|i| i.status == IdentityStatus::Nonzero)
                .count();
            let bae = s
                .bae
                .as_ref()
                .map(|b| format!(", bae {:.1e}", b.max_residual))
                .unwrap_or_default();
            let err = s
                .error
                .as_deref()
                .map(|e| format!(", error: {e}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{}: {} identities, {failed} nonzero{bae}{err}\n",
                s.params,
                s.identities.len()
            ));
        }
        out.push_str(if self.exit_code == 0 {
            "ok\n"
        } else {
            "FAILED\n"
        });
        out
    }
}

fn odd_l(s: &str) -> std::result::Result<u32, String> {
    let l: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if l % 2 == 0 {
        return Err(format!("L must be odd, got {l}"));
    }
    Ok(l)
}

#[derive(Debug, Parser)]
#[command(
    name = "qop",
    version,
    about = "Exact Q polynomials and functional-relation checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for Q and print it.
    Solve(CommonArgs),
    /// Solve for Q and run identity checks.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Twice the spin; must be odd.
    #[arg(long = "L", value_parser = odd_l)]
    pub l: u32,
    /// Number of sites is 2N+1.
    #[arg(long = "N")]
    pub n: u32,
    /// Number of Bethe roots; every sector when omitted.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long, value_enum, default_value = "linear")]
    pub method: Method,
    /// Comma-separated checks.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<Check>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Command {
    pub fn into_config(self) -> RunConfig {
        let (args, verify) = match self {
            Command::Solve(a) => (a, false),
            Command::Verify(a) => (a, true),
        };
        let checks = if verify && args.checks.is_empty() {
            vec![Check::Tq, Check::Functional]
        } else {
            args.checks
        };
        let default_output = if verify {
            OutputFormat::Json
        } else {
            OutputFormat::Plain
        };
        RunConfig {
            l: args.l,
            n: args.n,
            p: args.p,
            method: args.method,
            checks,
            output: args.output.unwrap_or(default_output),
            seed: args.seed,
        }
    }
}

/// Entry point of the binary: parses `args`, runs, writes the report to
/// `out` and the summary to `err`, and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let report = run(&cli.command.into_config());
    let _ = out.write_all(report.render().as_bytes());
    let _ = err.write_all(report.summary().as_bytes());
    report.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(
            std::iter::once("qop").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn even_l_rejected() {
        assert_eq!(call(&["solve", "--L", "2", "--N", "1"]).0, 2);
    }

    #[test]
    fn sector_out_of_range_is_invalid() {
        assert_eq!(call(&["solve", "--L", "3", "--N", "1", "--p", "9"]).0, 2);
    }

    #[test]
    fn verify_small() {
        let (code, out) = call(&[
            "verify",
            "--L",
            "3",
            "--N",
            "1",
            "--checks",
            "tq,functional",
        ]);
        assert_eq!(code, 0);
        let report: Report = serde_json::from_str(&out).unwrap();
        assert_eq!(report.schema, 1);
        assert_eq!(report.sectors.len(), 4);
    }

    #[test]
    fn thread_cap_parsing() {
        assert_eq!(thread_count(Some("3")), 3);
        assert_eq!(thread_count(Some("x")), 0);
        assert_eq!(thread_count(None), 0);
    }
}
