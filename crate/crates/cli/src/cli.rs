//! Argument parsing and dispatch for the `periodlab` binary.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use periodlab::cjson::ComplexJson;
use periodlab::CycleFile;
use serde::Serialize;

use crate::api::{self, CurveRef, CurveRequest, CyclesRef, DifferentialSpec};
use crate::error::ApiError;
use crate::render;
use crate::server;
use crate::session::Session;

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "periodlab", version, about = "Monodromy, homology and period matrices of plane algebraic curves")]
pub struct Cli {
    /// Print the JSON payload the HTTP service would return.
    #[arg(long, global = true)]
    pub json: bool,
    /// Quadrature tolerance for `periods`; comparison tolerance for `klein verify`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Use a Klein quartic model as the curve.
    #[arg(long, global = true, value_parser = ["klein-xy", "klein-ts", "klein-zw"])]
    pub model: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Polynomial f(x, y), e.g. "y^2 - x*(x-1)*(x-2)".
    #[arg(long)]
    pub curve: Option<String>,
    /// Base point as `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub basepoint: Option<ComplexJson>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch points, base point and sheet labels of a curve.
    BranchPoints(CurveArgs),
    /// Sheet permutation around every branch point.
    Monodromy(CurveArgs),
    /// Intersection number of two cycles in a cycle file.
    Intersect {
        #[arg(long)]
        cycles: PathBuf,
        /// Two cycle names, `a,b`.
        #[arg(long, value_parser = parse_pair)]
        pair: (String, String),
    },
    /// Intersection matrix of a cycle file and whether it is canonical.
    BasisCheck {
        #[arg(long)]
        cycles: PathBuf,
    },
    /// Symplectic matrix taking one canonical basis to another.
    Transform {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Period matrices of a canonical basis.
    Periods {
        #[arg(long)]
        cycles: PathBuf,
        /// Differential as `numerator,denominator`; repeat once per differential.
        #[arg(long = "differential")]
        differentials: Vec<String>,
    },
    /// Klein quartic checks.
    Klein {
        #[command(subcommand)]
        action: KleinCommand,
    },
    /// Run the HTTP JSON service.
    Serve {
        #[arg(long, env = "PERIODLAB_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Debug, Subcommand)]
pub enum KleinCommand {
    /// Run every verification and print the period matrix.
    Verify,
}

fn parse_point(s: &str) -> Result<ComplexJson, String> {
    let (re, im) = s.split_once(',').ok_or("expected re,im")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(ComplexJson { re: num(re)?, im: num(im)? })
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>()[..] {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err("expected two cycle names separated by a comma".into()),
    }
}

/// What a subcommand produced: JSON payload, table, and whether every check passed.
struct Report {
    json: String,
    table: String,
    ok: bool,
}

fn report<T: Serialize>(value: &T, table: fn(&T) -> String, ok: bool) -> Report {
    Report { json: api::payload(value), table: table(value), ok }
}

fn read_cycles(path: &Path) -> Result<CyclesRef, ApiError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ApiError::bad_request("unreadable_file", format!("{}: {e}", path.display())))?;
    let file = CycleFile::from_json(&text)
        .map_err(|e| ApiError::bad_request("invalid_cycle_file", format!("{}: {e}", path.display())))?;
    Ok(CyclesRef::Inline(file))
}

fn curve_request(model: &Option<String>, args: &CurveArgs) -> Result<CurveRequest, ApiError> {
    if model.is_some() == args.curve.is_some() {
        return Err(ApiError::bad_request("invalid_request", "give exactly one of --model and --curve"));
    }
    Ok(CurveRequest { polynomial: args.curve.clone(), model: model.clone(), basepoint: args.basepoint, labels: None })
}

fn dispatch(cli: &Cli, session: &Session) -> Result<Report, ApiError> {
    match &cli.command {
        Command::BranchPoints(args) => {
            let r = api::curve(session, curve_request(&cli.model, args)?)?;
            Ok(report(&r, render::curve, true))
        }
        Command::Monodromy(args) => {
            let req = api::MonodromyRequest { curve: CurveRef::Inline(curve_request(&cli.model, args)?) };
            Ok(report(&api::monodromy(session, req)?, render::monodromy, true))
        }
        Command::Intersect { cycles, pair } => {
            let req = api::IntersectRequest { cycles: read_cycles(cycles)?, pair: pair.clone() };
            Ok(report(&api::intersect(session, req)?, render::intersect, true))
        }
        Command::BasisCheck { cycles } => {
            let r = api::basis_check(session, api::BasisCheckRequest { cycles: read_cycles(cycles)? })?;
            let ok = r.canonical;
            Ok(report(&r, render::basis_check, ok))
        }
        Command::Transform { from, to } => {
            let req = api::TransformRequest { src: read_cycles(from)?, dst: read_cycles(to)? };
            Ok(report(&api::transform(session, req)?, render::transform, true))
        }
        Command::Periods { cycles, differentials } => {
            let differentials = differentials
                .iter()
                .map(|d| match d.split_once(',') {
                    Some((n, q)) => Ok(DifferentialSpec { numerator: n.trim().into(), denominator: q.trim().into() }),
                    None => Err(ApiError::bad_request(
                        "invalid_request",
                        format!("differential {d:?} is not numerator,denominator"),
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let req = api::PeriodsRequest {
                cycles: read_cycles(cycles)?,
                differentials: (!differentials.is_empty()).then_some(differentials),
                tol: cli.tol,
            };
            let r = api::periods(session, req)?;
            let ok = r.periods.diagnostics.riemann.passed;
            Ok(report(&r, render::periods, ok))
        }
        Command::Klein { action: KleinCommand::Verify } => {
            let r = api::klein_verify(api::KleinVerifyRequest { tol: cli.tol })?;
            let ok = r.passed;
            Ok(report(&r, render::klein_verify, ok))
        }
        Command::Serve { .. } => unreachable!("serve is handled before dispatch"),
    }
}

fn serve(host: IpAddr, port: u16) -> u8 {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return EXIT_FAILED;
        }
    };
    match runtime.block_on(server::serve(SocketAddr::new(host, port))) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
    }
}

/// Run the command line; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    if let Command::Serve { port, host } = cli.command {
        return serve(host, port);
    }
    match dispatch(&cli, &Session::new()) {
        Ok(r) => {
            print!("{}", if cli.json { &r.json } else { &r.table });
            if r.ok {
                0
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            if cli.json {
                print!("{}", api::payload(&e));
            }
            eprintln!("error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            }
        }
    }
}
