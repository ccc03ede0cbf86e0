//! The `raytomo` command line.
//!
//! Every subcommand prints one summary line on stdout. Failures print a JSON
//! object `{"error": <kind>, "message": <text>}` on stderr and exit with 2 for
//! invalid input or 3 for numerical failures.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{check_type_h, default_type_h_samples, family_by_name, jacobian_ds, CurveFamily};
use crate::inversion::{reconstruct_attenuated_with, reconstruct_with, LambdaChoice, ReconImage, ReconOptions};
use crate::io::{read_sinogram, write_json, write_pgm, write_sinogram, ImageSidecar, SinogramContext};
use crate::phantom::{error_metrics, BumpSpec, Phantom, PhantomSpec};
use crate::scalar::Cx;
use crate::transforms::{attenuated_ray_transform, ray_transform, SGrid, Sinogram, DEFAULT_T_INTERVALS};
use crate::verification::{boundary_limits, holomorphy_residual, solve_u, transport_residual};

#[derive(Debug, Parser)]
#[command(name = "raytomo", version, about = "Ray transforms over curve families in the disc and their inversion")]
pub struct Cli {
    /// Worker threads; defaults to the available cores. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the ray transform of a phantom.
    Forward(ForwardArgs),
    /// Reconstruct a density from a plain sinogram.
    Invert(InvertArgs),
    /// Sample the attenuated ray transform of a phantom.
    ForwardAtt(ForwardAttArgs),
    /// Reconstruct a density from an attenuated sinogram.
    InvertAtt(InvertAttArgs),
    /// Run the numerical checks for a family and write a JSON report.
    Verify(VerifyArgs),
    /// Render a phantom on the reconstruction grid.
    Phantom(PhantomArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Built-in family name or path to a rational family JSON file.
    #[arg(long, default_value = "euclidean-lines")]
    pub family: String,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 360)]
    pub ntheta: usize,
    #[arg(long, default_value_t = 513)]
    pub ns: usize,
    /// Support margin: densities vanish for |z| > 1 − delta.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Trapezoid panels per curve.
    #[arg(long, default_value_t = DEFAULT_T_INTERVALS)]
    pub t_intervals: usize,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub phantom: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ForwardAttArgs {
    #[command(flatten)]
    pub forward: ForwardArgs,
    #[arg(long)]
    pub attenuation: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImageArgs {
    /// Pixels per side of the reconstruction grid.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Output PGM image; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Phantom to compare against; adds error metrics to the summary and sidecar.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Sidecar path, `<out>.json` by default.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub image: ImageArgs,
    #[arg(long)]
    pub sino: PathBuf,
    /// Use the zero of ξ/ρ at this position (0-based, ordered by modulus then argument).
    #[arg(long)]
    pub lambda_index: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_T_INTERVALS)]
    pub t_intervals: usize,
}

#[derive(Debug, Args)]
pub struct InvertAttArgs {
    #[command(flatten)]
    pub invert: InvertArgs,
    #[arg(long)]
    pub attenuation: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Density for the transport checks; a two-bump mollifier by default.
    #[arg(long)]
    pub phantom: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random samples for the Jacobian sign checks.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long)]
    pub phantom: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// What a successful run reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub summary: String,
    /// False when `verify` found a failing check.
    pub passed: bool,
}

/// Error payload printed on stderr.
#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

pub fn error_json(error: &Error) -> String {
    serde_json::to_string(&ErrorReport {
        error: error.kind(),
        message: error.to_string(),
    })
    .expect("error report serializes")
}

/// Parses `args` and runs the command, inside a pool of `--threads` workers if given.
pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.threads {
        Some(0) => Err(Error::Config("--threads must be positive".into())),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?
            .install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Forward(args) => forward(&args, None),
        Command::ForwardAtt(args) => forward(&args.forward, Some(&args.attenuation)),
        Command::Invert(args) => invert(&args, None),
        Command::InvertAtt(args) => invert(&args.invert, Some(&args.attenuation)),
        Command::Verify(args) => verify(&args),
        Command::Phantom(args) => render(&args),
    }
}

fn distinct(output: &Path, inputs: &[&Path]) -> Result<()> {
    if inputs.contains(&output) {
        return Err(Error::Config(format!("output {} would overwrite an input", output.display())));
    }
    Ok(())
}

fn attenuation_banner(family: &dyn CurveFamily<f64>) {
    if !family.is_builtin() {
        eprintln!(
            "warning: the attenuated inversion assumes u(z, lambda_i) = 0 for the attenuation's \
             transport solution; this is not certified for `{}`. Check it with `raytomo verify`.",
            family.name()
        );
    }
}

fn forward(args: &ForwardArgs, attenuation: Option<&PathBuf>) -> Result<Outcome> {
    let mut inputs = vec![args.phantom.as_path()];
    inputs.extend(attenuation.map(PathBuf::as_path));
    distinct(&args.out, &inputs)?;
    let family = family_by_name::<f64>(&args.family.family)?;
    let f = Phantom::<f64>::load(&args.phantom)?;
    let grid = SGrid::for_family(family.as_ref(), args.grid.ntheta, args.grid.ns, args.grid.delta)?
        .with_t_intervals(args.grid.t_intervals)?;
    let sino = match attenuation {
        None => ray_transform(&f, family.as_ref(), &grid)?,
        Some(path) => {
            attenuation_banner(family.as_ref());
            let a = Phantom::<f64>::load(path)?;
            attenuated_ray_transform(&f, &a, family.as_ref(), &grid)?
        }
    };
    write_sinogram(&sino, &args.out)?;
    Ok(Outcome {
        summary: format!(
            "{}: family={} ntheta={} ns={} peak={:.6e} wrote {}",
            if attenuation.is_some() { "forward-att" } else { "forward" },
            family.name(),
            grid.ntheta(),
            grid.ns(),
            sino.values().iter().fold(0.0f64, |acc, v| acc.max(v.abs())),
            args.out.display()
        ),
        passed: true,
    })
}

fn invert(args: &InvertArgs, attenuation: Option<&PathBuf>) -> Result<Outcome> {
    let image_args = &args.image;
    let mut inputs = vec![args.sino.as_path()];
    inputs.extend(attenuation.map(PathBuf::as_path));
    inputs.extend(image_args.reference.as_deref());
    distinct(&image_args.out, &inputs)?;
    let family = family_by_name::<f64>(&args.family.family)?;
    let context = SinogramContext {
        cover_radius: 1.0 - image_args.delta / 2.0,
        t_intervals: args.t_intervals,
    };
    let sino: Sinogram<f64> = read_sinogram(&args.sino, context)?;
    let options = ReconOptions {
        delta: image_args.delta,
        lambda: args.lambda_index.map_or(LambdaChoice::Smallest, LambdaChoice::Index),
        ..ReconOptions::default()
    };
    let (command, image) = match attenuation {
        None => ("invert", reconstruct_with(&sino, family.as_ref(), image_args.grid, &options)?),
        Some(path) => {
            attenuation_banner(family.as_ref());
            let a = Phantom::<f64>::load(path)?;
            (
                "invert-att",
                reconstruct_attenuated_with(&sino, &a, family.as_ref(), image_args.grid, &options)?,
            )
        }
    };
    let summary = write_image(
        &image,
        image_args,
        command,
        family.name(),
        (sino.grid().ntheta(), sino.grid().ns()),
        &options.lambda,
    )?;
    Ok(Outcome { summary, passed: true })
}

fn write_image(
    image: &ReconImage<f64>,
    args: &ImageArgs,
    command: &str,
    family: &str,
    (ntheta, ns): (usize, usize),
    lambda: &LambdaChoice,
) -> Result<String> {
    let metrics = match &args.reference {
        Some(path) => Some(error_metrics(image, &Phantom::<f64>::load(path)?)?),
        None => None,
    };
    let mapping = write_pgm(image, &args.out)?;
    let sidecar_path = args.report.clone().unwrap_or_else(|| {
        let mut path = args.out.clone().into_os_string();
        path.push(".json");
        PathBuf::from(path)
    });
    let sidecar = ImageSidecar {
        image: args.out.file_name().map(|name| name.to_string_lossy().into_owned()).unwrap_or_default(),
        family: family.to_string(),
        command: command.to_string(),
        n: image.n(),
        delta: image.delta(),
        masked_pixels: image.masked_indices().len(),
        mapping,
        ntheta,
        ns,
        lambda_choice: match lambda {
            LambdaChoice::Smallest => "smallest".to_string(),
            LambdaChoice::Index(index) => format!("index {index}"),
        },
        metrics: metrics.map(Into::into),
    };
    write_json(&sidecar, &sidecar_path)?;
    let scores = metrics.map_or(String::new(), |m| format!(" l2_rel={:.6} linf_rel={:.6}", m.l2_rel, m.linf_rel));
    Ok(format!(
        "{command}: family={family} n={}{scores} wrote {}",
        image.n(),
        args.out.display()
    ))
}

fn render(args: &PhantomArgs) -> Result<Outcome> {
    distinct(&args.out, &[args.phantom.as_path()])?;
    let phantom = Phantom::<f64>::load(&args.phantom)?;
    let image = phantom.rasterize(args.grid, args.delta)?;
    let mapping = write_pgm(&image, &args.out)?;
    Ok(Outcome {
        summary: format!(
            "phantom: n={} min={:.6} max={:.6} wrote {}",
            args.grid,
            mapping.min,
            mapping.max,
            args.out.display()
        ),
        passed: true,
    })
}

/// One line of the verification report.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            residual,
            threshold,
            passed: residual < threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn default_verify_phantom() -> Result<Phantom<f64>> {
    Phantom::from_spec(PhantomSpec {
        delta: 0.05,
        bumps: vec![
            BumpSpec::mollifier([0.1, -0.05], 0.45, 1.0),
            BumpSpec::mollifier([-0.3, 0.2], 0.3, 0.5),
        ],
    })
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> Cx<f64> {
    let modulus = radius * rng.gen::<f64>().sqrt();
    Cx::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Runs every check on `family` and returns the report.
pub fn verification_report(family: &dyn CurveFamily<f64>, f: &Phantom<f64>, seed: u64, samples: usize) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let (points, lambdas) = default_type_h_samples::<f64>();
    for condition in check_type_h(family, &points, &lambdas).conditions {
        checks.push(Check {
            name: format!("type-h/{}", condition.name),
            residual: condition.residual,
            threshold: condition.threshold,
            passed: condition.passed,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, modulus, expected_sign) in [("inside-circle", 0.5, 1.0), ("outside-circle", 2.0, -1.0)] {
        let mut wrong = 0usize;
        for _ in 0..samples {
            let z = random_point(&mut rng, 0.9);
            let lambda = Cx::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU));
            if jacobian_ds(family, z, lambda)? * expected_sign <= 0.0 {
                wrong += 1;
            }
        }
        checks.push(Check {
            name: format!("jacobian/{name}"),
            residual: wrong as f64,
            threshold: 0.0,
            passed: wrong == 0,
        });
    }
    let scale = f.peak();
    let mut holomorphy: f64 = 0.0;
    let mut transport: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    for _ in 0..3 {
        let z = random_point(&mut rng, 0.6);
        let modulus = rng.gen_range(0.3..0.7);
        let lambda0 = Cx::from_polar(modulus, rng.gen_range(0.0..std::f64::consts::TAU));
        let radius = 0.5 * modulus.min(1.0 - modulus);
        let u = solve_u(f, family, z, lambda0)?.norm();
        holomorphy = holomorphy.max(holomorphy_residual(f, family, z, lambda0, radius)? / u.max(f64::MIN_POSITIVE));
        transport = transport.max(transport_residual(f, family, z, lambda0, 1e-3)? / scale);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        boundary = boundary.max(boundary_limits(f, family, z, theta)?.worst_deviation() / scale);
    }
    checks.push(Check::below("solution/holomorphy", holomorphy, 1e-6));
    checks.push(Check::below("solution/transport", transport, 1e-3));
    checks.push(Check::below("solution/boundary-limits", boundary, 1e-3));
    Ok(VerifyReport {
        family: family.name().to_string(),
        seed,
        passed: checks.iter().all(|check| check.passed),
        checks,
    })
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    if let Some(phantom) = &args.phantom {
        distinct(&args.report, &[phantom.as_path()])?;
    }
    let family = family_by_name::<f64>(&args.family.family)?;
    let f = match &args.phantom {
        Some(path) => Phantom::load(path)?,
        None => default_verify_phantom()?,
    };
    let report = verification_report(family.as_ref(), &f, args.seed, args.samples)?;
    write_json(&report, &args.report)?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|check| !check.passed)
        .map(|check| check.name.as_str())
        .collect();
    Ok(Outcome {
        summary: format!(
            "verify: family={} checks={} failed={}{} wrote {}",
            report.family,
            report.checks.len(),
            failed.len(),
            if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) },
            args.report.display()
        ),
        passed: report.passed,
    })
}
