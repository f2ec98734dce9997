//! Argument handling and subcommands for the `rpe` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rpe_core::elliptic::{
    elliptic_alpha, lambda_star, pi_reference, LambdaMethod, SingularValueIndex,
};
use rpe_core::numtheory::{class_number_forms, class_number_sum, Discriminant};
use rpe_core::params::{params_negative, params_positive, Family, SeriesParams};
use rpe_core::precision::stabilize;
use rpe_core::series::{eval_chudnovsky_binsplit, pi_from_series};
use rpe_core::verify::{bg163_closed_form_params, r243_printed_params, verify_all, Suite};
use rpe_core::{algebra::recognize_min_poly, Error, PrecReal, PrecisionContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Parser, Debug)]
#[command(
    name = "rpe",
    version,
    about = "High-precision Ramanujan-type series for 1/pi"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Precision {
    /// Significant decimal digits
    #[arg(long, env = "RPE_DIGITS", default_value_t = 100)]
    digits: u32,
}

impl Precision {
    fn context(self) -> Result<PrecisionContext, Error> {
        PrecisionContext::try_new(self.digits, rpe_core::precision::DEFAULT_GUARD)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute pi
    Pi {
        #[arg(long, value_enum, default_value_t = PiMethod::Chudnovsky)]
        method: PiMethod,
        #[command(flatten)]
        precision: Precision,
        /// Worker threads for binary splitting
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long)]
        json: bool,
    },
    /// Singular modulus lambda*(R)
    LambdaStar {
        r: SingularValueIndex,
        #[command(flatten)]
        precision: Precision,
        #[arg(long, value_enum, default_value_t = LambdaArg::Theta)]
        method: LambdaArg,
        #[arg(long)]
        json: bool,
    },
    /// Elliptic alpha function alpha(R)
    Alpha {
        r: SingularValueIndex,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        json: bool,
    },
    /// Level-1 series parameters (z, a, b) at index R
    Params {
        r: SingularValueIndex,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        json: bool,
    },
    /// Find an integer polynomial vanishing at a decimal value
    #[command(group(clap::ArgGroup::new("input").required(true).args(["value", "file"])))]
    Recognize {
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        value: Option<String>,
        /// File whose first non-empty line is the decimal value
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Class number h(-D)
    Classnum {
        d: u64,
        /// Also count reduced forms and compare
        #[arg(long)]
        oracle: bool,
    },
    /// Time pi computations
    Bench {
        #[command(flatten)]
        precision: Precision,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "chudnovsky,agm"
        )]
        methods: Vec<PiMethod>,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PiMethod {
    Chudnovsky,
    Bg163,
    R243,
    Agm,
}

impl PiMethod {
    fn name(self) -> &'static str {
        match self {
            PiMethod::Chudnovsky => "chudnovsky",
            PiMethod::Bg163 => "bg163",
            PiMethod::R243 => "r243",
            PiMethod::Agm => "agm",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LambdaArg {
    Theta,
    Bisect,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    Pos,
    Neg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Lambda163,
    Alpha163,
    Bg163,
    R243,
    G163,
    All,
}

enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::InvalidArgument(e.to_string()))
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::Parse(_) => EXIT_USAGE,
                _ => EXIT_COMPUTATION,
            }
        }
    }
}

fn compute_pi(
    method: PiMethod,
    digits: u32,
    workers: usize,
    ctx: &PrecisionContext,
) -> Result<String, Error> {
    Ok(match method {
        PiMethod::Chudnovsky => eval_chudnovsky_binsplit(digits, workers),
        PiMethod::Agm => pi_reference(ctx).to_decimal_string(digits as usize),
        PiMethod::Bg163 => {
            pi_from_series(&bg163_closed_form_params(ctx)?, ctx)?.to_decimal_string(digits as usize)
        }
        PiMethod::R243 => {
            pi_from_series(&r243_printed_params(ctx)?, ctx)?.to_decimal_string(digits as usize)
        }
    })
}

fn print_value(
    out: &mut dyn Write,
    json: bool,
    fields: serde_json::Value,
    value: &str,
) -> std::io::Result<()> {
    if json {
        let mut fields = fields;
        fields["value"] = json!(value);
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&fields).expect("json")
        )
    } else {
        writeln!(out, "{value}")
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Pi {
            method,
            precision,
            workers,
            json,
        } => {
            let ctx = precision.context()?;
            let value = compute_pi(method, precision.digits, workers, &ctx)?;
            print_value(
                out,
                json,
                json!({"method": method.name(), "digits": precision.digits}),
                &value,
            )?;
        }
        Command::LambdaStar {
            r,
            precision,
            method,
            json,
        } => {
            let ctx = precision.context()?;
            let m = match method {
                LambdaArg::Theta => LambdaMethod::Theta,
                LambdaArg::Bisect => LambdaMethod::AgmBisect,
            };
            let k = stabilize(&ctx, |c| Ok(lambda_star(&r, m, c)?.into_inner()))?;
            let name = match method {
                LambdaArg::Theta => "theta",
                LambdaArg::Bisect => "bisect",
            };
            print_value(
                out,
                json,
                json!({"r": r.to_string(), "digits": precision.digits, "method": name}),
                &k.to_decimal_string(precision.digits as usize),
            )?;
        }
        Command::Alpha { r, precision, json } => {
            let ctx = precision.context()?;
            let a = stabilize(&ctx, |c| elliptic_alpha(&r, c))?;
            print_value(
                out,
                json,
                json!({"r": r.to_string(), "digits": precision.digits}),
                &a.to_decimal_string(precision.digits as usize),
            )?;
        }
        Command::Params {
            r,
            family,
            precision,
            json,
        } => {
            let ctx = precision.context()?;
            let p = match family {
                FamilyArg::Pos => params_positive(&r, &ctx)?,
                FamilyArg::Neg => params_negative(&r, &ctx)?,
            };
            write_params(out, &p, precision.digits as usize, json)?;
        }
        Command::Verify {
            suite,
            precision,
            json,
        } => {
            let ctx = precision.context()?;
            let report = match suite {
                SuiteArg::All => verify_all(&ctx)?,
                SuiteArg::Lambda163 => Suite::Lambda163.run(&ctx)?,
                SuiteArg::Alpha163 => Suite::Alpha163.run(&ctx)?,
                SuiteArg::Bg163 => Suite::Bg163.run(&ctx)?,
                SuiteArg::R243 => Suite::R243.run(&ctx)?,
                SuiteArg::G163 => Suite::G163.run(&ctx)?,
            };
            if json {
                writeln!(out, "{}", report.to_json())?;
            } else {
                write!(out, "{}", report.to_text())?;
            }
            if !report.overall {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Recognize {
            degree,
            precision,
            value,
            file,
        } => {
            let ctx = precision.context()?;
            let text = match (value, file) {
                (Some(v), _) => v,
                (None, Some(path)) => std::fs::read_to_string(&path)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
                    .lines()
                    .map(str::trim)
                    .find(|l| !l.is_empty())
                    .ok_or_else(|| Failure::Usage(format!("{} is empty", path.display())))?
                    .to_string(),
                (None, None) => unreachable!("clap requires one input"),
            };
            if degree == 0 {
                return Err(Failure::Usage("--degree must be at least 1".into()));
            }
            let v = PrecReal::parse(&text, &ctx)?;
            match recognize_min_poly(&v, degree, &ctx) {
                Some(q) => writeln!(out, "{}", q.to_text())?,
                None => writeln!(out, "none")?,
            }
        }
        Command::Classnum { d, oracle } => {
            let d = Discriminant::new(d)?;
            let h = class_number_sum(d)?;
            if oracle {
                let forms = class_number_forms(d);
                writeln!(out, "sum {h}")?;
                writeln!(out, "forms {forms}")?;
                if forms != h {
                    return Ok(EXIT_VERIFY_FAILED);
                }
            } else {
                writeln!(out, "{h}")?;
            }
        }
        Command::Bench {
            precision,
            methods,
            workers,
        } => {
            let ctx = precision.context()?;
            let reference = pi_reference(&ctx).to_decimal_string(precision.digits as usize);
            for m in methods {
                let start = Instant::now();
                let value = compute_pi(m, precision.digits, workers, &ctx)?;
                let secs = start.elapsed().as_secs_f64();
                let agree = matching_digits(&value, &reference);
                writeln!(out, "{} {:.3}s {} digits", m.name(), secs, agree)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn write_params(
    out: &mut dyn Write,
    p: &SeriesParams,
    digits: usize,
    json: bool,
) -> std::io::Result<()> {
    let family = match p.family {
        Family::Positive => "pos",
        Family::Negative => "neg",
    };
    let (z, a, b) = (
        p.z.to_decimal_string(digits),
        p.a.to_decimal_string(digits),
        p.b.to_decimal_string(digits),
    );
    if json {
        let v = json!({
            "r": p.r.to_string(),
            "family": family,
            "digits": digits,
            "z": z,
            "a": a,
            "b": b,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))
    } else {
        writeln!(out, "z {z}")?;
        writeln!(out, "a {a}")?;
        writeln!(out, "b {b}")
    }
}

/// Leading significant digits shared by two decimal strings.
fn matching_digits(a: &str, b: &str) -> usize {
    a.chars()
        .zip(b.chars())
        .take_while(|(x, y)| x == y)
        .filter(|(x, _)| x.is_ascii_digit())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("rpe").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn matching_prefix() {
        assert_eq!(matching_digits("3.14159", "3.14158"), 5);
        assert_eq!(matching_digits("3.1", "3.1"), 2);
    }

    #[test]
    fn help_lists_defaults() {
        let (code, out, _) = run_args(&["pi", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("[default: 100]"));
        assert!(out.contains("RPE_DIGITS"));
        assert!(out.contains("[default: chudnovsky]"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["pi", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["classnum", "5"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["lambda-star", "zero"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["recognize", "--degree", "2"]).0, EXIT_USAGE);
    }

    #[test]
    fn classnum_values() {
        assert_eq!(
            run_args(&["classnum", "163"]),
            (0, "1\n".into(), String::new())
        );
        let (code, out, _) = run_args(&["classnum", "23", "--oracle"]);
        assert_eq!(code, 0);
        assert_eq!(out, "sum 3\nforms 3\n");
    }
}
