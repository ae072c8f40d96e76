use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gifs_core::render::{
    auto_viewport, compare_runs, compute_cloud, load_config, rasterize, write_pgm, Algorithm,
    RasterMode, RenderConfig, Viewport, DEFAULT_MARGIN,
};
use gifs_core::{Execution, GifsError};

const EXIT_USAGE: u8 = 1;
const EXIT_THRESHOLD: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Render and compare attractors of generalized iterated function systems.
///
/// Set GIFS_BUDGET to raise the enumeration and table size limits.
#[derive(Parser, Debug)]
#[command(name = "gifs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a definition file and report contractivity.
    Validate(Common),
    /// Compute an attractor and write it as a binary PGM.
    Render {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
        /// Output image path.
        #[arg(long, default_value = "attractor.pgm")]
        out: PathBuf,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Visible box as x0,x1,y0,y1; fitted to the points when omitted.
        #[arg(long, allow_hyphen_values = true)]
        viewport: Option<Viewport>,
        /// Pixel mode: density or binary.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Compute two algorithms' clouds and report their Hausdorff distance.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
        /// Algorithm for the second cloud.
        #[arg(long)]
        against: Algorithm,
        /// Depth for the second cloud; defaults to that algorithm's default.
        #[arg(long)]
        against_depth: Option<usize>,
        /// Exit with status 2 when the distance exceeds this value.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Time an algorithm sequentially and in parallel.
    Bench {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 3)]
        repeat: usize,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// System definition file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Treat a failed contractivity check as an error.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Iterations (deterministic) or level (affine).
    #[arg(long)]
    depth: Option<usize>,
    /// Chaos game point count.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid cell size used to thin intermediate clouds.
    #[arg(long = "decimate")]
    decimate: Option<f64>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

impl RunArgs {
    fn apply(&self, c: &mut RenderConfig) {
        if let Some(a) = self.algorithm {
            if a != c.algorithm {
                c.depth = None;
            }
            c.algorithm = a;
        }
        c.depth = self.depth.or(c.depth);
        c.points = self.points.or(c.points);
        c.burn_in = self.burn_in.or(c.burn_in);
        c.seed = self.seed.unwrap_or(c.seed);
        c.decimation = self.decimate.or(c.decimation);
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn load(common: &Common) -> Result<RenderConfig, GifsError> {
    let parsed = load_config(&common.config, common.strict)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.config)
}

fn run(cli: Cli) -> Result<u8, GifsError> {
    match cli.command {
        Command::Validate(common) => {
            let c = load(&common)?;
            let g = &c.system;
            println!("dimension {}, order {}, {} maps", g.dim(), g.order(), g.len());
            println!("{}", g.validate_contractive());
            Ok(0)
        }
        Command::Render {
            common,
            run,
            out,
            width,
            height,
            viewport,
            mode,
        } => {
            let mut c = load(&common)?;
            run.apply(&mut c);
            c.width = width.unwrap_or(c.width);
            c.height = height.unwrap_or(c.height);
            c.viewport = viewport.or(c.viewport);
            if let Some(m) = mode {
                c.mode = match m.as_str() {
                    "density" => RasterMode::Density,
                    "binary" => RasterMode::Binary,
                    other => {
                        return Err(GifsError::Config {
                            field: "mode".into(),
                            reason: format!("unknown `{other}`, expected density or binary"),
                        })
                    }
                };
            }
            c.validate()?;
            let cloud = compute_cloud(&c, run.exec())?;
            let vp = match c.viewport {
                Some(v) => v,
                None => auto_viewport(&cloud, DEFAULT_MARGIN)?,
            };
            let raster = rasterize(&cloud, &vp, c.width, c.height, c.mode)?;
            write_pgm(&raster.image, &out)?;
            eprintln!(
                "{}: {} points, viewport {vp}, {} outside, wrote {}",
                c.algorithm,
                cloud.len(),
                raster.outside,
                out.display()
            );
            Ok(0)
        }
        Command::Compare {
            common,
            run,
            against,
            against_depth,
            threshold,
        } => {
            let mut a = load(&common)?;
            run.apply(&mut a);
            a.validate()?;
            let mut b = a.clone();
            b.algorithm = against;
            b.depth = against_depth;
            let ca = compute_cloud(&a, run.exec())?;
            let cb = compute_cloud(&b, run.exec())?;
            let report = compare_runs(&ca, &cb, run.exec())?;
            println!("A = {}, B = {}", a.algorithm, b.algorithm);
            println!("{report}");
            match threshold {
                Some(t) if !report.within(t) => {
                    println!("FAIL: distance exceeds threshold {t}");
                    Ok(EXIT_THRESHOLD)
                }
                Some(t) => {
                    println!("PASS: distance within threshold {t}");
                    Ok(0)
                }
                None => Ok(0),
            }
        }
        Command::Bench { common, run, repeat } => {
            let mut c = load(&common)?;
            run.apply(&mut c);
            c.validate()?;
            for exec in [Execution::Sequential, Execution::Parallel] {
                let mut best = f64::INFINITY;
                let mut len = 0;
                for _ in 0..repeat.max(1) {
                    let t = Instant::now();
                    len = compute_cloud(&c, exec)?.len();
                    best = best.min(t.elapsed().as_secs_f64());
                }
                println!("{:<10} {}: {len} points, best of {} in {best:.4} s", format!("{exec:?}"), c.algorithm, repeat.max(1));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                GifsError::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_USAGE,
            })
        }
    }
}
