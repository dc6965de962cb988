//! `matcone`: evaluate single transforms or run the verification suite.

mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matcone::fracint::{ek_integral, gg_integral};
use matcone::radon::{dual_radon, radon};
use matcone::sampling::{sample_stiefel, sample_unit_interval};
use matcone::special::{siegel_beta, siegel_gamma, stiefel_volume};
use matcone::suite::{run_suite, Report, Status};
use matcone::{
    GrassmannConfig, IntegralSpec, Mat, Method, MonteCarloEstimate, RngState, Side, SpdMatrix,
    SymmetricMatrix, TestFunction, WallachParameter, ZonalFunction,
};

use config::VerifySettings;

/// A bad flag, file or argument; reported on one line with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<matcone::Error> for UsageError {
    fn from(e: matcone::Error) -> Self {
        UsageError(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "matcone", version, about = "Fractional integrals and Radon transforms on matrix cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Siegel gamma function of a given rank.
    Gamma {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
    /// Siegel beta function of a given rank.
    Beta {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Volume of the Stiefel manifold of n×m frames.
    Volume {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        json: bool,
    },
    /// Gårding–Gindikin fractional integral at a point.
    Gg {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Erdélyi–Kober fractional integral at a point.
    Ek {
        #[command(flatten)]
        point: PointArgs,
        /// Generic order beta.
        #[arg(long, conflicts_with = "half")]
        beta: Option<f64>,
        /// Half-integer order m/2.
        #[arg(long)]
        half: Option<usize>,
    },
    /// Radon transform of a zonal function at a random frame.
    Radon {
        #[command(flatten)]
        grass: GrassArgs,
    },
    /// Dual Radon transform of a zonal function at a random frame.
    DualRadon {
        #[command(flatten)]
        grass: GrassArgs,
    },
    /// Runs the verification suite and writes a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FunctionArgs {
    /// const1, exp-tr, trace, det-p or bump.
    #[arg(long = "f", default_value = "exp-tr")]
    function: String,
    /// Exponent of `det-p`.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

#[derive(Args)]
struct PointArgs {
    /// left or right.
    #[arg(long, default_value = "left")]
    side: String,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    alpha: f64,
    /// `random`, or the packed upper triangle row by row, e.g. `0.5,0.1,0.4`.
    #[arg(long, default_value = "random")]
    s: String,
    /// auto, uniform, matrix-beta or quadrature.
    #[arg(long, default_value = "auto")]
    method: String,
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct GrassArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    /// Rank of the zonal profile.
    #[arg(long)]
    rank: usize,
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// `key = value` file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Grassmann configurations `n,m,k,l[;n,m,k,l...]` for the theorem rows.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long = "z-cap")]
    z_cap: Option<f64>,
    /// Report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the report to stdout instead of the summary table.
    #[arg(long)]
    json: bool,
    /// Number of worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Leave the timestamp and wall times out of the report.
    #[arg(long)]
    reproducible: bool,
    /// Run only rows whose id contains this text.
    #[arg(long)]
    filter: Option<String>,
}

impl VerifyArgs {
    fn settings(&self) -> Result<VerifySettings, UsageError> {
        let mut s = match &self.config {
            Some(path) => config::load(path)?,
            None => VerifySettings::default(),
        };
        if let Some(seed) = self.seed {
            s.suite.seed = seed;
        }
        if let Some(samples) = self.samples {
            s.suite.samples = samples;
        }
        if let Some(dims) = &self.dims {
            s.suite.dims = config::parse_dims(dims)?;
        }
        if let Some(cap) = self.z_cap {
            s.suite.z_cap = cap;
        }
        if let Some(out) = &self.out {
            s.out = out.clone();
        }
        if self.filter.is_some() {
            s.suite.filter = self.filter.clone();
        }
        if self.workers.is_some() {
            s.workers = self.workers;
        }
        s.json |= self.json;
        s.reproducible |= self.reproducible;
        Ok(s)
    }
}

fn print_value(value: f64, json: bool) {
    if json {
        println!("{}", serde_json::json!({ "value": value }));
    } else {
        println!("{value}");
    }
}

fn print_estimate(e: &MonteCarloEstimate, json: bool) {
    if json {
        println!("{}", serde_json::to_string(e).expect("estimate is serializable"));
    } else if e.stderr == 0.0 {
        println!("{}", e.value);
    } else {
        println!("{} ± {:.3e}", e.value, e.stderr);
    }
}

fn parse_point(text: &str, rank: usize, side: Side, rng: &RngState) -> Result<SpdMatrix, UsageError> {
    if text == "random" {
        // spectrum in (0.1, 0.9), valid for either side
        let w = sample_unit_interval(rank, &mut rng.derive("point").rng())?;
        return Ok(SpdMatrix::new(w.scale(0.8).add(&SymmetricMatrix::scaled_identity(rank, 0.1)))?);
    }
    let entries: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("--s: '{text}' is not 'random' or a list of numbers")))?;
    let s = SpdMatrix::new(SymmetricMatrix::new(rank, entries)?)?;
    if side == Side::Right && !s.in_unit_interval() {
        return Err(UsageError("--s must satisfy 0 < s < I for the right side".into()));
    }
    Ok(s)
}

fn point_spec(p: &PointArgs) -> Result<(IntegralSpec, TestFunction), UsageError> {
    let side: Side = p.side.parse()?;
    let method: Method = p.method.parse()?;
    let rng = RngState::new(p.sampling.seed);
    let s = parse_point(&p.s, p.rank, side, &rng)?;
    let f = TestFunction::by_name(&p.function.function, p.rank, p.function.p)?;
    let spec = IntegralSpec::new(side, p.alpha, s)
        .samples(p.sampling.samples)
        .rng(rng)
        .method(method);
    Ok((spec, f))
}

fn grassmann(g: &GrassArgs, dual: bool) -> Result<(), UsageError> {
    let cfg = GrassmannConfig::new(g.n, g.m, g.k, g.rank)?;
    let profile = TestFunction::by_name(&g.function.function, g.rank, g.function.p)?;
    let rng = RngState::new(g.sampling.seed);
    let mut frame_rng = rng.derive("frame").rng();
    let estimate = if dual {
        let lift = ZonalFunction::new(profile, g.n, g.n - g.k)?;
        let v = sample_stiefel(g.n, g.m, &mut frame_rng)?;
        dual_radon(&|x: &Mat| lift.eval(x), &v, &cfg, g.sampling.samples, &rng)?
    } else {
        let lift = ZonalFunction::new(profile, g.n, g.m)?;
        let xi = sample_stiefel(g.n, g.n - g.k, &mut frame_rng)?;
        radon(&|x: &Mat| lift.eval(x), &xi, &cfg, g.sampling.samples, &rng)?
    };
    print_estimate(&estimate, g.sampling.json);
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, UsageError> {
    let settings = args.settings()?;
    settings.suite.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = settings.workers {
        if workers == 0 {
            return Err(UsageError("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(workers);
    }
    let pool = pool
        .build()
        .map_err(|e| UsageError(format!("cannot start worker pool: {e}")))?;
    let timed = !settings.reproducible;
    let rows = pool.install(|| run_suite(&settings.suite, timed))?;
    let timestamp = timed.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let report = Report::new(&settings.suite, timestamp, rows);
    let json = report.to_json();
    std::fs::write(&settings.out, format!("{json}\n"))
        .map_err(|e| UsageError(format!("cannot write {}: {e}", settings.out.display())))?;
    if settings.json {
        println!("{json}");
    } else {
        print!("{}", report.summary());
        println!("report written to {}", settings.out.display());
    }
    Ok(if report.count(Status::Fail) == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode, UsageError> {
    match cli.command {
        Command::Gamma { rank, alpha, json } => print_value(siegel_gamma(rank, alpha)?, json),
        Command::Beta { rank, alpha, beta, json } => print_value(siegel_beta(rank, alpha, beta)?, json),
        Command::Volume { n, m, json } => print_value(stiefel_volume(n, m)?, json),
        Command::Gg { point } => {
            let (spec, f) = point_spec(&point)?;
            print_estimate(&gg_integral(&spec, &f)?, point.sampling.json);
        }
        Command::Ek { point, beta, half } => {
            let order = match (beta, half) {
                (Some(b), None) => WallachParameter::Generic(b),
                (None, Some(m)) => WallachParameter::HalfInteger(m),
                _ => return Err(UsageError("ek needs exactly one of --beta or --half".into())),
            };
            let (spec, f) = point_spec(&point)?;
            print_estimate(&ek_integral(&spec, order, &f)?, point.sampling.json);
        }
        Command::Radon { grass } => grassmann(&grass, false)?,
        Command::DualRadon { grass } => grassmann(&grass, true)?,
        Command::Verify(args) => return verify(&args),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("matcone: {}", line.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("matcone: {e}");
            ExitCode::from(2)
        }
    }
}
