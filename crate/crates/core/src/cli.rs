//! Command-line front end: argument parsing, file I/O and exit codes.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bodies::{
    hull_polytope, read_off, surface_area_measure, translative_hausdorff, BodySpec,
    DEFAULT_RESOLUTION,
};
use crate::error::{Error, Result};
use crate::reconstruct::{algorithm_hiv_lsq, algorithm_surface_tensor, CaseTag, SolverConfig};
use crate::stability::{convergence_experiment, noise_experiment, summarize_noise, to_csv};
use crate::tensors::{harmonic_vector, HarmonicVector, MomentHarmonicMap, TensorSet};
use crate::uniqueness::{counterexample_pair, degree_gaps};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_OPTIMIZER: i32 = 3;
pub const EXIT_NO_OUTPUT: i32 = 4;

/// Caps the worker threads used for multistart fits and experiments.
pub const THREADS_ENV: &str = "SHAPETENSOR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "shapetensor",
    version,
    about = "Surface tensors and shape reconstruction of convex bodies"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Surface tensors and harmonic intrinsic volumes of a body
    Tensors {
        /// body JSON file or builtin name (cube, pyramid, ellipsoid, ball)
        body: String,
        #[arg(long = "so")]
        s_o: usize,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// output directory for tensors.json and harmonics.json
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Reconstruct a polytope from tensors.json or harmonics.json
    Reconstruct {
        input: PathBuf,
        /// least-squares reconstruction from noisy harmonic intrinsic volumes
        #[arg(long)]
        noisy: bool,
        #[command(flatten)]
        solver: SolverArgs,
        /// output directory for result.json and mesh.off
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Polytope / non-polytope pair with matching low-order tensors, as CSV
    Counterexample {
        n: usize,
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Surface-tensor reconstruction error across orders s_o, as CSV
    Converge {
        body: String,
        /// comma-separated orders
        #[arg(long = "so", value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noisy least-squares reconstructions across noise variances, as CSV
    Noise {
        body: String,
        #[arg(long = "so")]
        s_o: usize,
        /// comma-separated noise variances
        #[arg(long, value_delimiter = ',', required = true)]
        sigma2: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translative Hausdorff distance between the hulls of two OFF meshes
    Distance { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub starts: usize,
    /// relative residual accepted as an exact fit
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        if self.starts == 0 {
            return Err(Error::InvalidInput("--starts must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("--tol must be positive".into()));
        }
        Ok(SolverConfig {
            starts: self.starts,
            seed: self.seed,
            exact_tol: self.tol,
            ..SolverConfig::default()
        })
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoExactFit { .. }
        | Error::NoConvergence { .. }
        | Error::Lp(_)
        | Error::Infeasible(_) => EXIT_OPTIMIZER,
        _ => EXIT_INPUT,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn body_spec(arg: &str) -> Result<BodySpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        return BodySpec::from_json(&text).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")));
    }
    match arg {
        "cube" => Ok(BodySpec::cube(1.0)),
        "pyramid" => Ok(BodySpec::pyramid()),
        "ellipsoid" => Ok(BodySpec::ellipsoid()),
        "ball" => Ok(BodySpec::Ball { n: 3, radius: 1.0 }),
        _ => Err(Error::InvalidInput(format!(
            "{arg}: no such file or builtin body"
        ))),
    }
}

enum Input {
    Tensors(TensorSet),
    Harmonics(HarmonicVector),
}

fn read_input(path: &Path) -> Result<Input> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let context = |e: Error| Error::InvalidInput(format!("{}: {e}", path.display()));
    match value.get("kind").and_then(|k| k.as_str()) {
        Some("tensors") => TensorSet::from_json(&text)
            .map(Input::Tensors)
            .map_err(context),
        Some("harmonics") => HarmonicVector::from_json(&text)
            .map(Input::Harmonics)
            .map_err(context),
        other => Err(Error::InvalidInput(format!(
            "{}: field \"kind\" must be \"tensors\" or \"harmonics\", got {other:?}",
            path.display()
        ))),
    }
}

fn execute(cfg: &RunConfig) -> Result<i32> {
    match &cfg.command {
        Command::Tensors {
            body,
            s_o,
            resolution,
            out,
        } => {
            let spec = body_spec(body)?;
            let mu = surface_area_measure(&spec, *resolution)?;
            let tensors = TensorSet::from_measure(&mu, *s_o, false)?;
            let harmonics = harmonic_vector(&mu, *s_o)?;
            fs::create_dir_all(out)?;
            write(&out.join("tensors.json"), &tensors.to_json()?)?;
            write(&out.join("harmonics.json"), &harmonics.to_json()?)?;
            println!("m_s_o = {}", harmonics.values.len());
            println!("surface_area = {}", mu.mass());
            Ok(EXIT_OK)
        }
        Command::Reconstruct {
            input,
            noisy,
            solver,
            out,
        } => {
            let solver = solver.config()?;
            let result = match (read_input(input)?, noisy) {
                (Input::Tensors(t), false) => algorithm_surface_tensor(&t, &solver)?,
                (Input::Tensors(t), true) => {
                    let h = MomentHarmonicMap::new(t.n, t.s_o)?.moment_to_harmonic(&t)?;
                    algorithm_hiv_lsq(&h, &solver)?
                }
                (Input::Harmonics(h), true) => algorithm_hiv_lsq(&h, &solver)?,
                (Input::Harmonics(h), false) => {
                    let t = MomentHarmonicMap::new(h.n, h.s_o)?.harmonic_to_moment(&h, false)?;
                    algorithm_surface_tensor(&t, &solver)?
                }
            };
            fs::create_dir_all(out)?;
            write(&out.join("result.json"), &result.to_json()?)?;
            let mesh = out.join("mesh.off");
            match result.off() {
                Some(text) => write(&mesh, &text)?,
                None if mesh.exists() => fs::remove_file(&mesh)?,
                None => {}
            }
            println!("case = {:?}", result.case);
            println!("residual = {:e}", result.residual);
            if result.case == CaseTag::Case4_NoOutput {
                eprintln!(
                    "the algorithm has no output: the fitted measure is not a surface area measure"
                );
                return Ok(EXIT_NO_OUTPUT);
            }
            Ok(EXIT_OK)
        }
        Command::Counterexample { n, m, out } => {
            let (p, k) = counterexample_pair(*n, *m)?;
            let max_degree = m + 2 - n;
            let gaps = degree_gaps(&p, &k, max_degree)?;
            let mut text = String::from("degree,gap,agree\n");
            for (deg, g) in gaps.iter().enumerate() {
                text.push_str(&format!("{deg},{g:e},{}\n", *g < 1e-9));
            }
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Converge {
            body,
            orders,
            resolution,
            solver,
            out,
        } => {
            let rows =
                convergence_experiment(&body_spec(body)?, orders, *resolution, &solver.config()?)?;
            emit(out, &to_csv(&rows)?)?;
            Ok(EXIT_OK)
        }
        Command::Noise {
            body,
            s_o,
            sigma2,
            trials,
            resolution,
            solver,
            out,
        } => {
            let cfg = solver.config()?;
            let rows = noise_experiment(
                &body_spec(body)?,
                *s_o,
                sigma2,
                *trials,
                cfg.seed,
                *resolution,
                &cfg,
            )?;
            emit(out, &to_csv(&rows)?)?;
            for s in summarize_noise(&rows) {
                eprintln!(
                    "sigma2 = {}: mean dt = {:.6}, cases = {}/{}/{}/{}",
                    s.sigma2, s.mean_dt, s.case1, s.case2, s.case3, s.case4
                );
            }
            Ok(EXIT_OK)
        }
        Command::Distance { a, b } => {
            let pa = read_off(&read(a)?)?;
            let pb = read_off(&read(b)?)?;
            let n = |pts: &[Vec<f64>]| {
                if pts.iter().all(|v| v.len() == 3 && v[2] == 0.0) {
                    2
                } else {
                    3
                }
            };
            let lower = |pts: Vec<Vec<f64>>, n: usize| -> Vec<Vec<f64>> {
                pts.into_iter().map(|v| v[..n].to_vec()).collect()
            };
            let dim = n(&pa).max(n(&pb));
            let ka = hull_polytope(dim, &lower(pa, dim))?;
            let kb = hull_polytope(dim, &lower(pb, dim))?;
            println!("{:e}", translative_hausdorff(&ka, &kb)?);
            Ok(EXIT_OK)
        }
    }
}

fn init_threads() {
    if let Some(k) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second initialization in the same process is harmless to ignore
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global();
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    init_threads();
    match execute(&cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
