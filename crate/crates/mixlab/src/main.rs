//! mixlab — pseudo-spectral laboratory for passive-scalar transport.
//!
//! Subcommands
//!   simulate             --config FILE [--out DIR] [--seed N]
//!   commutator-scan      --config FILE [--out DIR] [--seed N]
//!   counterexample       [--config FILE] [--out DIR] [--seed N]
//!   norm                 --kind dual|besov|logd --input FIELD.mixf [--config FILE]
//!   kernel-csv           --kind cutoff|gaussian|log_averaged|log_laplacian_derived
//!                        [--config FILE] [--out DIR]
//!   <experiment>         --config FILE [--out DIR] [--seed N]
//!
//! Experiments: stability_cascade mixing field_perturbation vanishing_diffusion
//! regularity commutator_integral besov_decay counterexample_part1
//! counterexample_part2
//!
//! Exit codes: 0 all asserted checks passed, 1 a check failed (named in the
//! output), 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use mixcore::exponents::ExponentTriple;
use mixcore::flow::{FlowSpec, VelocityField, make_flow};
use mixcore::lp::LittlewoodPaleyFamily;
use mixcore::mollifier::{make_frequency_cutoff, make_gaussian};
use mixcore::norms::{BesovSpec, DualMode, SobolevDualSpec, besov_norm, sobolev_dual_norm};
use mixcore::solver::SolverConfig;
use mixcore::{ScalarField, TorusGrid};

use mixlab::config::Config;
use mixlab::experiments::{self, ExperimentKind};
use mixlab::report::{self, ExperimentReport};

struct Args {
    command: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: u64,
    kind: Option<String>,
    input: Option<PathBuf>,
}

fn usage() -> &'static str {
    "usage: mixlab <command> [--config FILE] [--out DIR] [--seed N] [--kind K] [--input F]\n\
     commands: simulate, commutator-scan, counterexample, norm, kernel-csv,\n\
     stability_cascade, mixing, field_perturbation, vanishing_diffusion, regularity,\n\
     commutator_integral, besov_decay, counterexample_part1, counterexample_part2"
}

fn parse_args() -> Result<Args, String> {
    let mut it = std::env::args().skip(1);
    let command = it.next().ok_or_else(|| usage().to_string())?;
    let mut args = Args {
        command,
        config: None,
        out: None,
        seed: 0,
        kind: None,
        input: None,
    };
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next().ok_or_else(|| format!("flag {name} needs a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value("--config")?)),
            "--out" => args.out = Some(PathBuf::from(value("--out")?)),
            "--seed" => {
                args.seed = value("--seed")?
                    .parse()
                    .map_err(|_| "--seed needs an integer".to_string())?
            }
            "--kind" => args.kind = Some(value("--kind")?),
            "--input" => args.input = Some(PathBuf::from(value("--input")?)),
            other => return Err(format!("unknown flag {other}\n{}", usage())),
        }
    }
    Ok(args)
}

fn load_config(args: &Args) -> Result<Config, String> {
    match &args.config {
        None => Ok(Config::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Config::parse(&text).map_err(|e| e.0)
        }
    }
}

fn finish(report: ExperimentReport, out: Option<&PathBuf>) -> ExitCode {
    print!("{}", report.summary());
    if let Some(dir) = out {
        if let Err(e) = report.write_to(dir) {
            eprintln!("cannot write report to {}: {e}", dir.display());
            return ExitCode::from(2);
        }
        println!("report written to {}", dir.display());
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        let failed = report.first_failure().map(|c| c.name.clone()).unwrap_or_default();
        eprintln!("FAILED check: {failed}");
        ExitCode::from(1)
    }
}

fn flow_from_config(cfg: &Config, grid: &TorusGrid) -> Result<VelocityField, String> {
    let kind = cfg.get_str("flow", "alternating_sine_shear");
    let amplitude = cfg.get_f64("amplitude", 1.0).map_err(|e| e.0)?;
    let switch_period = cfg.get_f64("switch_period", 0.5).map_err(|e| e.0)?;
    let spec = match kind {
        "periodized_shear" => FlowSpec::PeriodizedShear,
        "alternating_sine_shear" => FlowSpec::AlternatingSineShear { amplitude, switch_period },
        "cellular" => FlowSpec::Cellular { amplitude },
        "zero" => {
            return VelocityField::steady(vec![ScalarField::zero(*grid), ScalarField::zero(*grid)])
                .map_err(|e| e.to_string());
        }
        other => return Err(format!("unknown flow kind {other}")),
    };
    make_flow(&spec, grid).map_err(|e| e.to_string())
}

fn simulate(args: &Args) -> Result<ExitCode, String> {
    let cfg = load_config(args)?;
    cfg.check_keys(&[
        "grid_n", "period", "flow", "amplitude", "switch_period", "t_final", "cfl", "nu",
        "p", "q", "data_modes", "snapshot_stride", "dump_fields",
    ])
    .map_err(|e| e.0)?;
    let n = cfg.get_usize("grid_n", 128).map_err(|e| e.0)?;
    let period = cfg.get_f64("period", 1.0).map_err(|e| e.0)?;
    let grid = TorusGrid::new(2, n, period).map_err(|e| e.to_string())?;
    let u = flow_from_config(&cfg, &grid)?;
    let p = cfg.get_f64("p", 4.0).map_err(|e| e.0)?;
    let q = cfg.get_f64("q", 4.0).map_err(|e| e.0)?;
    let triple = ExponentTriple::new(p, q).map_err(|e| e.to_string())?;
    let t_final = cfg.get_f64("t_final", 1.0).map_err(|e| e.0)?;
    let nu = cfg.get_f64("nu", 0.0).map_err(|e| e.0)?;
    let cfl = cfg.get_f64("cfl", 0.35).map_err(|e| e.0)?;
    let modes = cfg.get_usize("data_modes", 4).map_err(|e| e.0)? as i64;
    let stride = cfg.get_usize("snapshot_stride", 16).map_err(|e| e.0)?;

    let rho0 = mixcore::corpus::random_band_limited(&grid, modes, args.seed.wrapping_add(1));
    let dt = mixlab::experiments::common::commensurate_dt(&u, cfl, nu);
    let mut scfg = SolverConfig::new(dt);
    scfg.nu = nu;
    scfg.tracked_exponents = vec![2.0, triple.q()];
    scfg.accumulator_exponent = triple.p();
    scfg.snapshot_stride = stride;
    let traj = mixcore::solver::solve(&rho0, &u, t_final, &scfg).map_err(|e| e.to_string())?;

    // dual norm at snapshots: exact at r = 2, surrogate otherwise (labeled)
    let exact = (triple.r() - 2.0).abs() <= 1e-12;
    let dual_spec = if exact {
        SobolevDualSpec::exact_h1(period)
    } else {
        SobolevDualSpec { r: triple.r(), length_scale: period, mode: DualMode::Surrogate }
    };
    let dual: Vec<f64> = traj
        .states
        .iter()
        .map(|s| sobolev_dual_norm(s, &dual_spec))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    println!(
        "simulated {} steps on {}^2, dual norm mode: {}",
        traj.step_times.len() - 1,
        n,
        if exact { "exact_r2" } else { "surrogate (upper bound)" }
    );
    let csv = report::trajectory_csv(&traj, &dual);
    match &args.out {
        None => print!("{csv}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join("trajectory.csv"), csv).map_err(|e| e.to_string())?;
            if cfg.get_usize("dump_fields", 0).map_err(|e| e.0)? != 0 {
                mixlab::mixf::dump_checkpoints(
                    &dir.join("fields"),
                    "state",
                    &traj.times,
                    &traj.states,
                )
                .map_err(|e| e.to_string())?;
            }
            println!("trajectory written to {}", dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn commutator_scan(args: &Args) -> Result<ExitCode, String> {
    let cfg = load_config(args)?;
    cfg.check_keys(&[
        "grid_n", "period", "flow", "amplitude", "switch_period", "p", "q", "data_modes",
        "delta_lo", "delta_hi", "per_decade", "mollifier",
    ])
    .map_err(|e| e.0)?;
    let n = cfg.get_usize("grid_n", 256).map_err(|e| e.0)?;
    let period = cfg.get_f64("period", 2.0 * std::f64::consts::PI).map_err(|e| e.0)?;
    let grid = TorusGrid::new(2, n, period).map_err(|e| e.to_string())?;
    let u = flow_from_config(&cfg, &grid)?;
    let p = cfg.get_f64("p", 4.0).map_err(|e| e.0)?;
    let q = cfg.get_f64("q", 4.0).map_err(|e| e.0)?;
    let triple = ExponentTriple::new(p, q).map_err(|e| e.to_string())?;
    let modes = cfg.get_usize("data_modes", 8).map_err(|e| e.0)? as i64;
    let lo = cfg.get_f64("delta_lo", 1e-3).map_err(|e| e.0)?;
    let hi = cfg.get_f64("delta_hi", 1.0).map_err(|e| e.0)?;
    let per_decade = cfg.get_usize("per_decade", 16).map_err(|e| e.0)?;
    let phi = match cfg.get_str("mollifier", "gaussian") {
        "gaussian" => make_gaussian(),
        "cutoff" => make_frequency_cutoff(),
        other => return Err(format!("unknown mollifier {other}")),
    };

    let rho = mixcore::corpus::random_band_limited(&grid, modes, args.seed.wrapping_add(1));
    let scan = mixcore::commutator::scan_dl_commutator(
        u.frame(0),
        &rho,
        &phi,
        lo,
        hi,
        per_decade,
        triple.r(),
    )
    .map_err(|e| e.to_string())?;

    let mut csv = String::from("delta,norm_r,envelope_small,envelope_large\n");
    for i in 0..scan.deltas.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            scan.deltas[i], scan.norms[i], scan.envelope_small[i], scan.envelope_large[i]
        ));
    }
    match &args.out {
        None => print!("{csv}"),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join("commutator_scan.csv"), csv).map_err(|e| e.to_string())?;
            println!("scan written to {}", dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn norm_cmd(args: &Args) -> Result<ExitCode, String> {
    let kind = args.kind.as_deref().ok_or("norm needs --kind dual|besov|logd")?;
    let input = args.input.as_ref().ok_or("norm needs --input FIELD.mixf")?;
    let field = mixlab::mixf::read_field(input).map_err(|e| e.to_string())?;
    let cfg = load_config(args)?;
    match kind {
        "dual" => {
            let r = cfg.get_f64("r", 2.0).map_err(|e| e.0)?;
            let l = cfg.get_f64("length_scale", field.grid().period()).map_err(|e| e.0)?;
            let exact = (r - 2.0).abs() <= 1e-12 && cfg.get_str("mode", "auto") != "surrogate";
            let spec = SobolevDualSpec {
                r,
                length_scale: l,
                mode: if exact { DualMode::ExactR2 } else { DualMode::Surrogate },
            };
            let v = sobolev_dual_norm(&field, &spec).map_err(|e| e.to_string())?;
            println!("dual_norm,{v},{}", if exact { "exact_r2" } else { "surrogate" });
        }
        "besov" => {
            let s = cfg.get_f64("s", 0.0).map_err(|e| e.0)?;
            let p = cfg.get_f64("p", 2.0).map_err(|e| e.0)?;
            let q = cfg.get_f64("q", 2.0).map_err(|e| e.0)?;
            let family = LittlewoodPaleyFamily::covering(field.grid());
            let v =
                besov_norm(&field, &BesovSpec { s, p, q, family }).map_err(|e| e.to_string())?;
            println!("besov_norm,{},covered={}", v.value, v.spectrum_covered);
        }
        "logd" => {
            let r = cfg.get_f64("r", 2.0).map_err(|e| e.0)?;
            let v = mixcore::norms::log_derivative_norm(&field, r).map_err(|e| e.to_string())?;
            println!("log_derivative_norm,{v}");
        }
        other => return Err(format!("unknown norm kind {other}")),
    }
    Ok(ExitCode::SUCCESS)
}

fn kernel_csv_cmd(args: &Args) -> Result<ExitCode, String> {
    let cfg = load_config(args)?;
    let kind = args.kind.as_deref().unwrap_or("log_averaged");
    let n = cfg.get_usize("grid_n", 256).map_err(|e| e.0)?;
    let period = cfg.get_f64("period", 16.0).map_err(|e| e.0)?;
    let grid = TorusGrid::new(2, n, period).map_err(|e| e.to_string())?;
    // defaults keep the kernel resolvable on the default grid
    let lo = cfg.get_f64("delta_lo", 0.1).map_err(|e| e.0)?;
    let hi = cfg.get_f64("delta_hi", 1.0).map_err(|e| e.0)?;
    let phi = match cfg.get_str("mollifier", "cutoff") {
        "gaussian" => make_gaussian(),
        _ => make_frequency_cutoff(),
    };
    let kernel = match kind {
        "cutoff" => mixcore::kernel::rescale(&make_frequency_cutoff(), hi),
        "gaussian" => mixcore::kernel::rescale(&make_gaussian(), hi),
        "log_averaged" => mixcore::kernel::log_averaged_kernel(&phi, lo, hi),
        "log_laplacian" => Ok(mixcore::kernel::KernelSpec::LogLaplacian),
        "log_laplacian_derived" => {
            mixcore::kernel::cz_derived_kernels(&mixcore::kernel::KernelSpec::LogLaplacian, 2)
                .map(|mut v| v.remove(1))
        }
        other => return Err(format!("unknown kernel kind {other}")),
    }
    .map_err(|e| e.to_string())?;

    let symbols = report::symbol_csv(&kernel, &grid);
    let cz = if matches!(kernel, mixcore::kernel::KernelSpec::LogLaplacian) {
        None
    } else {
        mixcore::kernel::cz_norm_estimate(&kernel, &grid)
            .ok()
            .map(|r| report::cz_csv(&[(kind.to_string(), r)]))
    };
    match &args.out {
        None => {
            print!("{symbols}");
            if let Some(cz) = cz {
                print!("{cz}");
            }
        }
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join("kernel_symbol.csv"), symbols).map_err(|e| e.to_string())?;
            if let Some(cz) = cz {
                std::fs::write(dir.join("cz_report.csv"), cz).map_err(|e| e.to_string())?;
            }
            println!("kernel CSVs written to {}", dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let result = match args.command.as_str() {
        "simulate" => simulate(&args),
        "commutator-scan" => commutator_scan(&args),
        "norm" => norm_cmd(&args),
        "kernel-csv" => kernel_csv_cmd(&args),
        "counterexample" => {
            let cfg = match load_config(&args) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("{msg}");
                    return ExitCode::from(2);
                }
            };
            let first = experiments::run(ExperimentKind::CounterexamplePart1, &cfg, args.seed);
            let second = experiments::run(ExperimentKind::CounterexamplePart2, &cfg, args.seed);
            return match (first, second) {
                (Ok(a), Ok(b)) => {
                    let code_a = finish(a, args.out.as_ref().map(|d| d.join("part1")).as_ref());
                    let code_b = finish(b, args.out.as_ref().map(|d| d.join("part2")).as_ref());
                    if code_a == ExitCode::SUCCESS && code_b == ExitCode::SUCCESS {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("configuration error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        name => match ExperimentKind::from_name(name) {
            Some(kind) => {
                let cfg = match load_config(&args) {
                    Ok(c) => c,
                    Err(msg) => {
                        eprintln!("{msg}");
                        return ExitCode::from(2);
                    }
                };
                match experiments::run(kind, &cfg, args.seed) {
                    Ok(rep) => return finish(rep, args.out.as_ref()),
                    Err(e) => {
                        eprintln!("configuration error: {e}");
                        return ExitCode::from(2);
                    }
                }
            }
            None => {
                eprintln!("unknown command {name}\n{}", usage());
                return ExitCode::from(2);
            }
        },
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
