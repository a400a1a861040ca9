//! Batch front-end: one subcommand per library operation, CSV/JSON output,
//! optional parallel parameter sweeps.

use clap::{Args, Parser, Subcommand};
use graphwave::evolution::{seeded_bump, EvolveOptions, Evolver};
use graphwave::profiles::{self, ProfileKind};
use graphwave::report::{self, RunConfig};
use graphwave::{functionals, make_grid, spectra, Error, GraphField, ModelParams};
use num_complex::Complex64;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "graphwave",
    about = "Standing waves of the focusing NLS equation on star graphs with δ'ₛ coupling",
    disable_help_subcommand = true
)]
struct Cli {
    /// Run every line of a parameter file as its own invocation
    /// (GRAPHWAVE_THREADS caps the parallelism).
    #[arg(long, value_name = "FILE", exclusive = true)]
    sweep: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Args, Debug, Clone)]
struct Physical {
    /// Nonlinearity exponent (> 1).
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
    /// Standing-wave frequency (> 0).
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    /// Vertex coupling intensity (≠ 0; negative = attractive).
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    /// Number of edges (≥ 2).
    #[arg(long = "N")]
    n_edges: usize,
    /// Grid points per edge.
    #[arg(long, default_value_t = 512)]
    points: usize,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ProfileChoice {
    /// Profile kind: symmetric | asymmetric.
    #[arg(long, default_value = "symmetric")]
    kind: String,
    /// Asymmetric index (1 ≤ k ≤ N-1).
    #[arg(long)]
    k: Option<usize>,
}

impl ProfileChoice {
    fn resolve(&self) -> Result<ProfileKind, Error> {
        match self.kind.as_str() {
            "symmetric" => Ok(ProfileKind::Symmetric),
            "asymmetric" => {
                let k = self.k.ok_or_else(|| Error::invalid("--kind asymmetric needs --k"))?;
                Ok(ProfileKind::Asymmetric { k })
            }
            other => Err(Error::invalid(format!("unknown profile kind `{other}`"))),
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
enum Cmd {
    /// Sampled profile values and stationarity residuals (CSV).
    Profile {
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        choice: ProfileChoice,
    },
    /// Action, Nehari, energy, charge and virial values (JSON).
    Actions {
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        choice: ProfileChoice,
    },
    /// Morse indices by shooting and by inertia with an agreement flag (JSON).
    Morse {
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        choice: ProfileChoice,
    },
    /// Unstable eigenvalues of the linearized flow (JSON).
    Modes {
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        choice: ProfileChoice,
    },
    /// Near-kernel dimensions and profile overlap (JSON).
    Kernel {
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        choice: ProfileChoice,
    },
    /// Mass-slope condition J(ω), J₁(ω) and its sign change (JSON).
    Slope {
        #[command(flatten)]
        physical: Physical,
    },
    /// Threshold frequencies and couplings (JSON).
    Thresholds {
        #[command(flatten)]
        physical: Physical,
    },
    /// Time evolution; writes the trajectory log (CSV).
    Evolve {
        #[command(flatten)]
        physical: Physical,
        #[command(flatten)]
        choice: ProfileChoice,
        /// Time step.
        #[arg(long)]
        dt: f64,
        /// Final time (integer number of steps).
        #[arg(long = "T")]
        t_final: f64,
        /// Sampling stride in steps.
        #[arg(long, default_value_t = 10)]
        sample_every: usize,
        /// Orbit-escape radius (enables escape detection).
        #[arg(long)]
        eps_escape: Option<f64>,
        /// Multiplicative amplitude perturbation of the initial profile.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        perturb_scale: f64,
        /// H¹ norm of an additive seeded bump.
        #[arg(long, default_value_t = 0.0)]
        perturb_bump: f64,
        /// Seed of the deterministic bump.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Disable the nonlinearity (free flow consistency mode).
        #[arg(long, default_value_t = false)]
        linear: bool,
    },
    /// All critical points ordered by action (JSON).
    Rank {
        #[command(flatten)]
        physical: Physical,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::SUCCESS;
                }
                _ => {
                    eprintln!("{e}");
                    return ExitCode::from(1);
                }
            }
        }
    };
    if let Some(file) = cli.sweep {
        return run_sweep(&file);
    }
    let Some(cmd) = cli.cmd else {
        eprintln!("a subcommand or --sweep is required; see --help");
        return ExitCode::from(1);
    };
    match run(cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::InvalidInput(_) => ExitCode::from(2),
        Error::NoRoot(_) | Error::Unresolved(_) => ExitCode::from(3),
        _ => ExitCode::from(4),
    }
}

fn run_sweep(file: &PathBuf) -> ExitCode {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read sweep file {}: {e}", file.display());
            return ExitCode::from(1);
        }
    };
    let lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let threads = std::env::var("GRAPHWAVE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    use rayon::prelude::*;
    let worst = pool.install(|| {
        lines
            .par_iter()
            .map(|line| {
                let argv = std::iter::once("graphwave").chain(line.split_whitespace());
                match Cli::try_parse_from(argv) {
                    Ok(Cli { cmd: Some(cmd), .. }) => match run(cmd) {
                        Ok(()) => 0u8,
                        Err(e) => {
                            eprintln!("sweep line `{line}` failed: {e}");
                            match e {
                                Error::InvalidInput(_) => 2,
                                Error::NoRoot(_) | Error::Unresolved(_) => 3,
                                _ => 4,
                            }
                        }
                    },
                    Ok(_) => {
                        eprintln!("sweep line `{line}` has no subcommand");
                        1
                    }
                    Err(e) => {
                        eprintln!("sweep line `{line}`: {e}");
                        1
                    }
                }
            })
            .max()
            .unwrap_or(0)
    });
    ExitCode::from(worst)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn config_for(ph: &Physical, choice: Option<&ProfileChoice>) -> RunConfig {
    RunConfig {
        p: ph.p,
        omega: ph.omega,
        beta: ph.beta,
        n_edges: ph.n_edges,
        points_per_edge: ph.points,
        kind: choice.map(|c| c.kind.clone()),
        k: choice.and_then(|c| c.k),
    }
}

fn params_of(ph: &Physical) -> Result<ModelParams, Error> {
    ModelParams::new(ph.p, ph.omega, ph.beta, ph.n_edges)
}

fn build(ph: &Physical, choice: &ProfileChoice) -> Result<(ModelParams, profiles::ProfileSpec, GraphField), Error> {
    let params = params_of(ph)?;
    let grid = make_grid(&params, ph.points)?;
    let kind = choice.resolve()?;
    let (spec, field) = profiles::build_critical_point(&params, kind, &grid)?;
    Ok((params, spec, field))
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Profile { physical, choice } => {
            let (params, _, field) = build(&physical, &choice)?;
            let rep = profiles::stationarity_check(&field, &params);
            let mut text = String::from("edge,x,value\n");
            for j in 0..field.grid.n_edges {
                for i in 0..field.grid.points_per_edge {
                    text.push_str(&format!(
                        "{j},{:.16e},{:.16e}\n",
                        field.grid.x(i),
                        field.value(j, i).re
                    ));
                }
            }
            text.push_str(&report::stationarity_comment(&rep));
            emit(&physical.out, &text)
        }
        Cmd::Actions { physical, choice } => {
            let (params, _, field) = build(&physical, &choice)?;
            let rep = profiles::stationarity_check(&field, &params);
            let out = report::ActionsOut {
                config: config_for(&physical, Some(&choice)),
                functionals: functionals::evaluate(&field, &params),
                stationarity_interior: rep.interior,
                stationarity_vertex_sum: rep.vertex_sum,
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
        Cmd::Morse { physical, choice } => {
            let (_, spec, _) = build(&physical, &choice)?;
            let shooting = spectra::morse_by_shooting(&spec)?;
            let inertia = spectra::morse_by_inertia(&spec, physical.points.max(512))?;
            let agreement = shooting.n1 == inertia.n1 && shooting.n2 == inertia.n2;
            let out = report::MorseOut {
                config: config_for(&physical, Some(&choice)),
                shooting,
                inertia,
                agreement,
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
        Cmd::Modes { physical, choice } => {
            let (_, spec, _) = build(&physical, &choice)?;
            let m = physical.points.min(512);
            let modes = spectra::unstable_modes(&spec, m)?;
            let bound = spectra::grillakis_lower_bound(&spec, m)?;
            let out = report::ModesOut {
                config: config_for(&physical, Some(&choice)),
                lambda_unstable: modes.lambdas,
                tau0: modes.tau0,
                grillakis_lower_bound: bound,
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
        Cmd::Kernel { physical, choice } => {
            let (_, spec, _) = build(&physical, &choice)?;
            let rep = spectra::kernel_report(&spec, physical.points)?;
            let out = report::KernelOut {
                config: config_for(&physical, Some(&choice)),
                ker1_dim: rep.ker1_dim,
                ker2_dim: rep.ker2_dim,
                overlap2: rep.overlap2,
                smallest_l1: rep.smallest_l1,
                smallest_l2: rep.smallest_l2,
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
        Cmd::Slope { physical } => {
            let params = params_of(&physical)?;
            let rep = functionals::mass_slope(&params)?;
            let out = report::SlopeOut {
                config: config_for(&physical, None),
                j: rep.j,
                j1: rep.j1,
                omega_star_slope: rep.omega_star_slope,
                classified: rep.classified,
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
        Cmd::Thresholds { physical } => {
            let params = params_of(&physical)?;
            let beta_star = profiles::compute_beta_star(params.p, params.omega, params.n_edges)?;
            let (xi_hat, omega3) = if params.p > 5.0 && params.beta < 0.0 {
                let (xi, w3) = functionals::omega3(params.p, params.n_edges, params.beta)?;
                (Some(xi), Some(w3))
            } else {
                (None, None)
            };
            let out = report::ThresholdsOut {
                config: config_for(&physical, None),
                omega_floor: params.omega_floor(),
                omega_star: params.omega_star(),
                beta_star,
                xi_hat,
                omega3,
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
        Cmd::Evolve {
            physical,
            choice,
            dt,
            t_final,
            sample_every,
            eps_escape,
            perturb_scale,
            perturb_bump,
            seed,
            linear,
        } => {
            let (params, _, phi) = build(&physical, &choice)?;
            let grid = phi.grid.clone();
            let mut u0 = phi.scale(Complex64::new(perturb_scale, 0.0));
            if perturb_bump != 0.0 {
                let bump = seeded_bump(&grid, seed, perturb_bump);
                u0 = u0.add_scaled(&bump, Complex64::new(1.0, 0.0));
            }
            let mut opts = EvolveOptions::new(dt, t_final, sample_every);
            opts.eps_escape = eps_escape;
            opts.reference = Some(phi);
            opts.nonlinear = !linear;
            let mut ev = Evolver::new(&params, &grid)?;
            let log = ev.evolve(&u0, &opts)?;
            let mut buf = Vec::new();
            log.write_csv(&mut buf).map_err(|e| Error::invalid(format!("csv: {e}")))?;
            emit(&physical.out, &String::from_utf8(buf).expect("csv is utf-8"))
        }
        Cmd::Rank { physical } => {
            let params = params_of(&physical)?;
            let grid = make_grid(&params, physical.points)?;
            let rows = functionals::rank_critical_points(&params, &grid)?;
            let out = report::RankOut {
                config: config_for(&physical, None),
                rows: rows
                    .into_iter()
                    .map(|(kind, action)| report::RankRow {
                        kind: match kind {
                            ProfileKind::Symmetric => "symmetric".into(),
                            ProfileKind::Asymmetric { .. } => "asymmetric".into(),
                        },
                        k: match kind {
                            ProfileKind::Asymmetric { k } => Some(k),
                            ProfileKind::Symmetric => None,
                        },
                        action,
                    })
                    .collect(),
            };
            emit(&physical.out, &report::to_json_17(&out))
        }
    }
}
