//! `gauss-renyi` command line.
//!
//! Exit status: 0 on success, 2 on domain errors (unphysical or non-faithful
//! states, `α` outside `(0,1)`, failed or unconverged verification), 1 on I/O
//! and malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::e2::{e2_to_state, state_to_e2};
use crate::error::Error;
use crate::fock::Recipe;
use crate::io::{
    fmt_num, is_quadruple, num, quadruple_from_json, quadruple_json, read_json, read_state, report_json, state_from_json,
    state_json, williamson_json, InputError,
};
use crate::renyi::{sandwiched_renyi, sandwiched_renyi_sweep, EntropyReport};
use crate::verify::{builtin_suite, run_instance, Instance, Outcome, Status, Suite, DEFAULT_CUTOFF, TOL_ONE_MODE};
use crate::williamson::williamson_decompose;

/// Environment variable overriding the comparison tolerance of `verify`.
pub const TOL_ENV: &str = "GAUSS_RENYI_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Entropy,
    Sweep,
    Williamson,
    Convert,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "gauss-renyi",
    version,
    about = "Sandwiched Rényi relative entropy between Gaussian states"
)]
pub struct RunConfig {
    pub command: Command,
    /// Rényi parameter in (0,1).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "alphas")]
    pub alpha: Option<f64>,
    /// Comma-separated Rényi parameters for `sweep`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alphas: Option<Vec<f64>>,
    #[arg(long)]
    pub rho: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// One-mode oracle cutoff for `verify`; the guard also evaluates twice this.
    #[arg(long)]
    pub verify_cutoff: Option<usize>,
    /// Comma-separated `verify` suites: thermal, one-mode, two-mode.
    #[arg(long)]
    pub suite: Option<String>,
    /// State files, read as rho then sigma when the flags are absent.
    pub files: Vec<PathBuf>,
}

/// A command failure and its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Output still written to stdout, e.g. the verification table.
    pub output: Option<String>,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
            output: None,
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
            output: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::domain(e.to_string())
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Malformed(m) => Failure::io(m),
            InputError::Domain(d) => Failure::domain(d.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&config) {
        Ok(text) => {
            let _ = writeln!(out, "{text}");
            0
        }
        Err(f) => {
            if let Some(text) = &f.output {
                let _ = writeln!(out, "{text}");
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn rho_path(c: &RunConfig) -> Option<PathBuf> {
    c.rho.clone().or_else(|| c.files.first().cloned())
}

fn sigma_path(c: &RunConfig) -> Option<PathBuf> {
    c.sigma.clone().or_else(|| {
        let skip = usize::from(c.rho.is_none());
        c.files.get(skip).cloned()
    })
}

fn need(path: Option<PathBuf>, what: &str) -> Result<PathBuf, Failure> {
    path.ok_or_else(|| Failure::io(format!("missing --{what} FILE")))
}

fn check_alpha(alpha: f64) -> Result<f64, Failure> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::AlphaOutOfRange(alpha).into())
    }
}

pub fn execute(c: &RunConfig) -> Result<String, Failure> {
    match c.command {
        Command::Entropy => cmd_entropy(c),
        Command::Sweep => cmd_sweep(c),
        Command::Williamson => cmd_williamson(c),
        Command::Convert => cmd_convert(c),
        Command::Verify => cmd_verify(c),
    }
}

fn read_pair(c: &RunConfig) -> Result<(crate::GaussianState, crate::GaussianState), Failure> {
    let rho = read_state(&need(rho_path(c), "rho")?)?;
    let sigma = read_state(&need(sigma_path(c), "sigma")?)?;
    Ok((rho, sigma))
}

fn report_table(reports: &[EntropyReport]) -> String {
    let mut lines = vec![format!(
        "{:>8} {:>20} {:>20} {:>20} {:>20}",
        "alpha", "divergence", "T_alpha", "trace_Z", "t_Z"
    )];
    for r in reports {
        let t_z: Vec<String> = r.t_z.iter().map(|&t| fmt_num(t)).collect();
        lines.push(format!(
            "{:>8} {:>20} {:>20} {:>20} {:>20}",
            fmt_num(r.alpha),
            fmt_num(r.divergence),
            fmt_num(r.t_alpha),
            fmt_num(r.trace_z),
            t_z.join(",")
        ));
    }
    lines.join("\n")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_entropy(c: &RunConfig) -> Result<String, Failure> {
    let alpha = match (c.alpha, &c.alphas) {
        (Some(a), _) => a,
        (None, Some(list)) if list.len() == 1 => list[0],
        _ => return Err(Failure::domain("entropy needs --alpha X with 0<alpha<1")),
    };
    check_alpha(alpha)?;
    let (rho, sigma) = read_pair(c)?;
    let report = sandwiched_renyi(&rho, &sigma, alpha)?;
    Ok(match c.format {
        Format::Json => pretty(&report_json(&report)),
        Format::Table => report_table(&[report]),
    })
}

fn cmd_sweep(c: &RunConfig) -> Result<String, Failure> {
    let alphas = match (&c.alphas, c.alpha) {
        (Some(list), _) => list.clone(),
        (None, Some(a)) => vec![a],
        (None, None) => return Err(Failure::domain("sweep needs --alphas X,Y,Z with 0<alpha<1")),
    };
    for &a in &alphas {
        check_alpha(a)?;
    }
    let (rho, sigma) = read_pair(c)?;
    let reports = sandwiched_renyi_sweep(&rho, &sigma, &alphas)?;
    Ok(match c.format {
        Format::Json => pretty(&Value::Array(reports.iter().map(report_json).collect())),
        Format::Table => report_table(&reports),
    })
}

fn cmd_williamson(c: &RunConfig) -> Result<String, Failure> {
    let state = read_state(&need(rho_path(c), "rho")?)?;
    crate::gaussian::ensure_physical(&state, "state")?;
    let w = williamson_decompose(state.cov())?;
    Ok(match c.format {
        Format::Json => pretty(&williamson_json(&w)),
        Format::Table => {
            let mut lines = vec![format!("{:>6} {:>20} {:>20}", "mode", "d", "t")];
            for (j, (d, t)) in w.d.iter().zip(w.t.values()).enumerate() {
                lines.push(format!("{j:>6} {:>20} {:>20}", fmt_num(*d), fmt_num(*t)));
            }
            lines.push("L =".into());
            let l = w.l.matrix();
            for i in 0..l.nrows() {
                let row: Vec<String> = (0..l.ncols()).map(|j| format!("{:>20}", fmt_num(l[(i, j)]))).collect();
                lines.push(row.join(" "));
            }
            lines.join("\n")
        }
    })
}

fn cmd_convert(c: &RunConfig) -> Result<String, Failure> {
    let path = need(rho_path(c), "rho")?;
    let v = read_json(&path)?;
    // Accept the output of a previous conversion.
    let v = match v.get("quadruple").or_else(|| v.get("state")) {
        Some(inner) => inner.clone(),
        None => v,
    };
    let out = if is_quadruple(&v) {
        let q = quadruple_from_json(&v)?;
        let state = e2_to_state(&q)?;
        json!({ "state": state_json(&state), "trace": num(crate::e2::trace_positive_e2(&q)?) })
    } else {
        let state = state_from_json(&v)?;
        crate::gaussian::ensure_physical(&state, "state")?;
        let q = state_to_e2(&state)?;
        json!({ "quadruple": quadruple_json(&q), "trace": num(crate::e2::trace_positive_e2(&q)?) })
    };
    Ok(pretty(&out))
}

fn tolerance_override() -> Result<Option<f64>, Failure> {
    match std::env::var(TOL_ENV) {
        Ok(s) => {
            let tol: f64 = s
                .trim()
                .parse()
                .map_err(|_| Failure::domain(format!("{TOL_ENV}={s:?} is not a number")))?;
            if !(tol > 0.0) {
                return Err(Failure::domain(format!("{TOL_ENV} must be positive")));
            }
            Ok(Some(tol))
        }
        Err(_) => Ok(None),
    }
}

fn cmd_verify(c: &RunConfig) -> Result<String, Failure> {
    let tol = tolerance_override()?;
    let cutoff = c.verify_cutoff.unwrap_or(DEFAULT_CUTOFF);
    if cutoff < 2 {
        return Err(Failure::domain("--verify-cutoff must be at least 2"));
    }
    let has_files = rho_path(c).is_some();
    let suites: Vec<Suite> = match &c.suite {
        Some(list) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| Suite::parse(s).ok_or_else(|| Failure::domain(format!("unknown suite {s:?}"))))
            .collect::<Result<_, _>>()?,
        None if has_files => Vec::new(),
        None => Suite::all(),
    };
    let mut instances = builtin_suite(&suites, cutoff, tol);
    if has_files {
        let (rho, sigma) = read_pair(c)?;
        let alphas = match (&c.alphas, c.alpha) {
            (Some(list), _) => list.clone(),
            (None, Some(a)) => vec![a],
            (None, None) => vec![0.5],
        };
        for &a in &alphas {
            check_alpha(a)?;
        }
        instances.push(Instance {
            name: "files".into(),
            rho: Recipe::from_state(&rho)?,
            sigma: Recipe::from_state(&sigma)?,
            alphas,
            tol: tol.unwrap_or(TOL_ONE_MODE),
            cutoffs: (cutoff, 2 * cutoff),
        });
    }
    if instances.is_empty() {
        return Err(Failure::domain("empty verification suite"));
    }
    let mut outcomes: Vec<Outcome> = Vec::new();
    for inst in &instances {
        outcomes.extend(run_instance(inst)?);
    }
    let text = match c.format {
        Format::Json => pretty(&Value::Array(
            outcomes
                .iter()
                .map(|o| {
                    json!({
                        "instance": o.name,
                        "alpha": num(o.alpha),
                        "closed_form": num(o.closed_form),
                        "oracle": num(o.oracle),
                        "diff": num(o.diff),
                        "guard_delta": num(o.guard_delta),
                        "tol": num(o.tol),
                        "cutoffs": [o.cutoffs.0, o.cutoffs.1],
                        "status": o.status.label(),
                    })
                })
                .collect(),
        )),
        Format::Table => {
            let mut lines = vec![format!(
                "{:<40} {:>6} {:>18} {:>18} {:>10} {:>10}  status",
                "instance", "alpha", "closed form", "oracle", "|diff|", "guard"
            )];
            for o in &outcomes {
                lines.push(format!(
                    "{:<40} {:>6} {:>18.12} {:>18.12} {:>10.2e} {:>10.2e}  {}",
                    o.name,
                    o.alpha,
                    o.closed_form,
                    o.oracle,
                    o.diff,
                    o.guard_delta,
                    o.status.label()
                ));
            }
            lines.join("\n")
        }
    };
    let failed = outcomes.iter().filter(|o| o.status != Status::Pass).count();
    if failed > 0 {
        let unconverged = outcomes.iter().any(|o| o.status == Status::NotConverged);
        let reason = if unconverged {
            "cutoff not converged; raise --verify-cutoff"
        } else {
            "closed form and oracle disagree"
        };
        return Err(Failure {
            output: Some(text),
            ..Failure::domain(format!("{failed} check(s) did not pass: {reason}"))
        });
    }
    Ok(text)
}
