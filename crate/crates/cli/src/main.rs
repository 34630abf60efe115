mod args;
mod report;

use std::process::ExitCode;

use clap::Parser;

use spherical_points::archimedean::omega_inf_monte_carlo;
use spherical_points::counting::{enumerate_count, naive_count};
use spherical_points::local_densities::{omega_p, u_count_fp, x_count_fp, MAX_BRUTE_FORCE_PRIME};
use spherical_points::predict::{compare, fiber_report, leading_constant};
use spherical_points::{invariants, Boundary, Error, Setup};

use args::{Cli, Command, Format};
use report::{emit_one, emit_rows, exact, sig12, sig12_opt};

enum Failure {
    Library(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Consistency(_) => 1,
                _ => 2,
            })
        }
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Count { setup, bound, check, work_budget } => {
            count(cli, &setup.setup()?, *bound, check.then_some(*work_budget))
        }
        Command::Constants { setup, monte_carlo, seed } => {
            constants(cli.output, &setup.setup()?, monte_carlo.map(|m| (m, *seed)))
        }
        Command::Compare { setup, bounds } => {
            let rows = compare(&setup.setup()?, &bounds.to_vec())?;
            let out: Vec<_> = rows
                .into_iter()
                .map(|r| report::CompareRow {
                    bound: r.bound,
                    exact: r.exact,
                    supported: r.predicted.is_some(),
                    predicted: sig12_opt(r.predicted),
                    ratio: sig12_opt(r.ratio),
                })
                .collect();
            Ok(emit_rows(cli.output, &out)?)
        }
        Command::FpCheck { n, p_max } => fp_check(cli.output, *n, *p_max),
        Command::Fiber { setup, fiber, bounds } => {
            let rows = fiber_report(&setup.setup()?, fiber, &bounds.to_vec())?;
            let out: Vec<_> = rows
                .into_iter()
                .map(|r| report::FiberRow {
                    fiber: fiber.to_string(),
                    bound: r.bound,
                    exact: r.exact,
                    predicted: sig12(r.predicted.unwrap_or(f64::NAN)),
                    ratio: sig12_opt(r.ratio),
                })
                .collect();
            Ok(emit_rows(cli.output, &out)?)
        }
    }
}

fn count(cli: &Cli, s: &Setup, bound: u64, oracle_budget: Option<u64>) -> Outcome {
    let r = enumerate_count(s, bound)?;
    let naive = match oracle_budget {
        Some(budget) => {
            let slow = naive_count(s, bound, budget)?;
            if slow.count != r.count || slow.raw_tuple_count != r.raw_tuple_count {
                return Err(Error::Consistency(format!(
                    "{s} B={bound}: fast count {} ({} tuples), scan {} ({} tuples)",
                    r.count, r.raw_tuple_count, slow.count, slow.raw_tuple_count
                ))
                .into());
            }
            Some(slow.count)
        }
        None => None,
    };
    let row = report::CountRow {
        n: s.n(),
        boundary: s.boundary().as_str(),
        l1: exact(s.l1()),
        l2: exact(s.l2()),
        bound,
        count: r.count,
        raw_tuple_count: r.raw_tuple_count,
        naive_count: naive,
        elapsed_seconds: cli.timing.then(|| sig12(r.elapsed.as_secs_f64())),
    };
    Ok(emit_one(cli.output, &row)?)
}

fn constants(format: Format, s: &Setup, monte_carlo: Option<(u64, u64)>) -> Outcome {
    let inv = invariants(s);
    let pred = leading_constant(s)?;
    let k = &pred.constituents;
    let mc = match monte_carlo {
        Some((samples, seed)) => Some((omega_inf_monte_carlo(s, samples, seed)?, seed)),
        None => None,
    };
    let c_error = match (pred.c_leading, k.omega_inf, k.omega_inf_error) {
        (Some(c), Some(w), Some(err)) => Some(c * err / w),
        (Some(_), _, _) => k.tail_bound,
        _ => None,
    };
    let row = report::ConstantsRow {
        a: exact(&inv.a),
        b: inv.b,
        e: inv.e.as_ref().map(exact),
        alpha: inv.alpha.as_ref().map(exact),
        adjoint_d1: exact(&inv.adjoint.d1),
        adjoint_d2: exact(&inv.adjoint.d2),
        adjoint_type: inv.adjoint_type.as_str(),
        delta: inv.delta.as_ref().map(exact),
        omega_inf: sig12_opt(k.omega_inf),
        omega_inf_error: sig12_opt(k.omega_inf_error),
        omega_inf_mc: mc.as_ref().map(|(r, _)| sig12(r.value)),
        omega_inf_mc_error: mc.as_ref().map(|(r, _)| sig12(r.est_error)),
        seed: mc.as_ref().map(|(_, seed)| *seed),
        euler_product: sig12(k.euler),
        fiber_sum: sig12_opt(k.fiber_sum),
        truncation_m: k.truncation_m,
        tail_bound: sig12_opt(k.tail_bound),
        c: sig12_opt(pred.c_leading),
        c_error: sig12_opt(c_error),
        supported: pred.supported,
        n: s.n(),
        boundary: s.boundary().as_str(),
        l1: exact(s.l1()),
        l2: exact(s.l2()),
    };
    Ok(emit_one(format, &row)?)
}

fn fp_check(format: Format, n: u32, p_max: u64) -> Outcome {
    if p_max > MAX_BRUTE_FORCE_PRIME {
        return Err(Error::InvalidArgument(format!(
            "--p-max above {MAX_BRUTE_FORCE_PRIME} is beyond the brute-force point count"
        ))
        .into());
    }
    let w = Setup::parse(n, Boundary::Dw, "1", "1")?;
    let wz = Setup::parse(n, Boundary::DwDz, "1", "1")?;
    let mut rows = Vec::new();
    for p in (2..=p_max).filter(|&p| spherical_points::arith::is_prime(p)) {
        rows.push(report::FpRow {
            n,
            p,
            x_count: x_count_fp(n, p)?,
            u_count_w: u_count_fp(&w, p)?,
            u_count_wz: u_count_fp(&wz, p)?,
            omega_w: exact(&omega_p(&w, p)?.omega),
            omega_wz: exact(&omega_p(&wz, p)?.omega),
        });
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument(format!("no primes up to {p_max}")).into());
    }
    Ok(emit_rows(format, &rows)?)
}
