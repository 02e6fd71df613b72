use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pencil_core::experiments::{self, SplitExperimentConfig};
use pencil_core::inverse::{run_algorithm1, InverseOptions};
use pencil_core::spectral_data::truncate_hybrid;
use pencil_core::{forward, io, Background, Error, ErrorKind, ForwardOptions, PotentialPair};

#[derive(Parser, Debug)]
#[command(
    name = "pencil",
    version,
    about = "Spectral problems for the quadratic pencil on (0, π)"
)]
struct Cli {
    /// Accuracy preset for integration and contour quadrature.
    #[arg(long, value_enum, default_value_t = Profile::Default, global = true)]
    tolerance_profile: Profile,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    Fast,
    Default,
    Fine,
}

impl Profile {
    fn forward(self, n_star: usize) -> ForwardOptions {
        let base = ForwardOptions {
            n_star,
            ..ForwardOptions::default()
        };
        match self {
            Profile::Fast => ForwardOptions {
                refine: 4,
                contour_nodes: 128,
                newton_tol: 1e-10,
                ..base
            },
            Profile::Default => base,
            Profile::Fine => ForwardOptions {
                refine: 20,
                contour_nodes: 512,
                winding_nodes: 128,
                newton_tol: 1e-13,
                ..base
            },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Potentials CSV to spectral-data JSON.
    Forward {
        potentials: PathBuf,
        /// Largest |n| to compute.
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        n_star: usize,
        /// Mean shift "re,im"; estimated from q1 when omitted.
        #[arg(long, value_parser = parse_complex)]
        omega0: Option<Complex64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spectral-data JSON to recovered potentials CSV.
    Inverse {
        data: PathBuf,
        #[arg(long, default_value_t = 200)]
        grid_n: usize,
        /// Keep data only for |n| <= N, model values beyond.
        #[arg(long)]
        trunc_n: Option<usize>,
        /// Also write the recovered potentials in forward-solver form.
        #[arg(long)]
        potentials_out: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Eigenvalue-splitting table and per-δ plot data.
    SplitTable {
        /// Comma-separated δ values (may be empty); the published list when omitted.
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        deltas: Option<DeltaList>,
        /// Append the δ = 0 multiplicity row.
        #[arg(long)]
        include_zero: bool,
        #[arg(long, default_value_t = 200)]
        grid_n: usize,
        #[arg(long, default_value_t = 0.85)]
        contour_r: f64,
        #[arg(long, default_value_t = 1)]
        n_star: usize,
        #[arg(long, default_value = "split-table")]
        out_dir: PathBuf,
    },
    /// Reconstruct from spectral data, recompute the spectrum, report differences.
    Roundtrip {
        data: PathBuf,
        #[arg(long, default_value_t = 3)]
        n_check: usize,
        #[arg(long, default_value_t = 200)]
        grid_n: usize,
        #[arg(long, default_value_t = 1)]
        n_star: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

#[derive(Clone, Debug)]
struct DeltaList(Vec<f64>);

fn parse_list(s: &str) -> Result<DeltaList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(DeltaList)
}

fn emit(text: &str, output: Option<&Path>) -> pencil_core::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> pencil_core::Result<()> {
    let profile = cli.tolerance_profile;
    match cli.command {
        Command::Forward {
            potentials,
            n_max,
            n_star,
            omega0,
            output,
        } => {
            let pot = PotentialPair::read_csv(&potentials)?;
            let omega0 = omega0.unwrap_or_else(|| pot.omega0());
            let data = forward::spectral_data(&pot, n_max, omega0, &profile.forward(n_star))?;
            emit(&(io::spectral_to_json(&data)? + "\n"), output.as_deref())
        }
        Command::Inverse {
            data,
            grid_n,
            trunc_n,
            potentials_out,
            output,
        } => {
            let mut data = io::read_spectral(&data)?;
            if let Some(n) = trunc_n {
                let model = Background::Zero.spectral_data(data.window_extent().max(n));
                data = truncate_hybrid(&data, &model, n)?;
            }
            let opts = InverseOptions {
                n_grid: grid_n,
                ..Default::default()
            };
            let rec = run_algorithm1(&data, &Background::Zero, &opts)?;
            let worst = rec.conditions.iter().copied().fold(1.0, f64::max);
            eprintln!(
                "active indices {:?}, system size {}, worst condition {worst:.3e}",
                rec.active.indices, rec.active.dim
            );
            if let Some(p) = potentials_out {
                rec.potentials.to_potential_pair()?.write_csv(&p)?;
            }
            emit(&rec.potentials.to_csv(), output.as_deref())
        }
        Command::SplitTable {
            deltas,
            include_zero,
            grid_n,
            contour_r,
            n_star,
            out_dir,
        } => {
            let mut deltas = deltas.map_or_else(|| experiments::TABLE_DELTAS.to_vec(), |d| d.0);
            if include_zero {
                deltas.push(0.0);
            }
            let config = SplitExperimentConfig {
                deltas,
                n_grid: grid_n,
                contour_radius: contour_r,
                n_star,
            };
            let run = experiments::run_table(&config)?;
            println!(
                "{:>8}  {:>8}  {:>8}  {:>16}  {:>16}  {:>16}  {:>16}  {:>10}",
                "delta", "d1", "d0", "lambda_1", "lambda_-1", "M_1", "M_-1", "contour"
            );
            let z = |c: Complex64| format!("{:.3}{:+.3}i", c.re + 0.0, c.im + 0.0);
            for r in &run.rows {
                match &r.error {
                    Some(e) => println!("{:>8}  failed: {e}", r.delta),
                    None => {
                        println!(
                            "{:>8}  {:>8.4}  {:>8.4}  {:>16}  {:>16}  {:>16}  {:>16}  {:>10.3e}",
                            r.delta,
                            r.d1,
                            r.d0,
                            z(r.lambda_plus),
                            z(r.lambda_minus),
                            z(r.m_plus),
                            z(r.m_minus),
                            r.contour_metric + 0.0
                        );
                        if let Some(w) = r.winding {
                            println!("          (extension row) winding number around 0.5: {w}");
                        }
                    }
                }
            }
            experiments::write_table_outputs(&run, &out_dir)?;
            eprintln!("wrote {}", out_dir.join("table.csv").display());
            Ok(())
        }
        Command::Roundtrip {
            data,
            n_check,
            grid_n,
            n_star,
            output,
        } => {
            let data = io::read_spectral(&data)?;
            let inv = InverseOptions {
                n_grid: grid_n,
                ..Default::default()
            };
            let report =
                experiments::roundtrip_check(&data, &Background::Zero, n_check, &inv, &profile.forward(n_star))?;
            eprintln!(
                "max |lambda_in - lambda_out| = {:.3e}, max |M_in - M_out| = {:.3e}",
                report.max_lambda_error(),
                report.max_m_error()
            );
            emit(&report.to_csv(), output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Validation => 2,
        ErrorKind::Numerical => 3,
        ErrorKind::Io => 4,
    }
}
