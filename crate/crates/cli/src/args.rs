use std::path::PathBuf;

use bieberbach::bieberbach::BuildMethod;
use bieberbach::orthopoly::Method;
use bieberbach::Precision;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "bieberbach",
    version,
    about = "Bieberbach polynomials and conformal-map experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory receiving CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Gram matrix cache directory.
    #[arg(long, global = true, env = "BIEBERBACH_CACHE")]
    pub cache: Option<PathBuf>,

    /// Skip the Gram cache entirely.
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List gallery domains, or validate one domain and dump its boundary.
    Domains {
        /// Domain config file or gallery name.
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Area moments of the monomials.
    Gram {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: usize,
    },
    /// Orthonormal polynomials K_0..K_N.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Cholesky)]
        method: MethodArg,
    },
    /// The polynomial B_n and optional point evaluations.
    Bieberbach {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Evaluation points, `re` or `re,im`; repeatable.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        eval: Vec<[f64; 2]>,
        #[arg(long, value_enum, default_value_t = RouteArg::Formula)]
        route: RouteArg,
    },
    /// Sampled sup error against the closed-form map.
    ErrorCurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        samples: SampleArgs,
        /// Degrees, comma separated and ascending.
        #[arg(long = "N", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
    },
    /// Fit `e_n = C q^(n^r)` to a sup-error curve.
    RateFit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        samples: SampleArgs,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        /// Degrees excluded from the fit and compared against its prediction.
        #[arg(long, value_delimiter = ',')]
        holdout: Vec<usize>,
    },
    /// Decay of the map toward a cusp vertex.
    CuspFit {
        /// Domain config file or gallery name.
        #[arg(long)]
        domain: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z0: Option<[f64; 2]>,
        #[arg(long, default_value_t = 0)]
        cusp: usize,
        /// Exponents to compare.
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 3.0])]
        p: Vec<f64>,
        /// Local abscissae along the cusp; defaults to 0.2 * 2^-j, j = 0..6.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Tabulate |B_n(x0)| past the rightmost boundary point.
    Diverge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x0: f64,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        ns: Vec<usize>,
    },
    /// Staged spike construction with certificates.
    Keldysh {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        stages: usize,
        #[arg(long, default_value_t = 120)]
        budget: usize,
        #[arg(long, default_value_t = 0.2)]
        step: f64,
        #[arg(long, default_value_t = 0.05)]
        spike: f64,
        #[arg(long, default_value_t = 0.1)]
        thinning: f64,
        #[arg(long, default_value_t = 16)]
        max_thinning: usize,
    },
    /// Summarize the JSON artifacts in a directory.
    Report {
        /// Directory to scan; defaults to `--out`.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Domain config file or gallery name.
    #[arg(long)]
    pub domain: String,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z0: Option<[f64; 2]>,
    /// Working precision in bits: 53, 106 or 212 [default: 106, 212 for diverge].
    #[arg(long, value_parser = parse_precision)]
    pub precision: Option<Precision>,
    /// Gauss points per panel.
    #[arg(long)]
    pub order: Option<usize>,
    /// Initial panels per arc.
    #[arg(long)]
    pub panels: Option<usize>,
    /// Panel ratio toward singular vertices.
    #[arg(long)]
    pub grading: Option<f64>,
}

impl Common {
    pub fn prec(&self) -> Precision {
        self.precision.unwrap_or(Precision::DoubleDouble)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 2048)]
    pub boundary_samples: usize,
    #[arg(long, default_value_t = 512)]
    pub interior_samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Cholesky,
    Arnoldi,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Cholesky => Method::Cholesky,
            MethodArg::Arnoldi => Method::Arnoldi,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RouteArg {
    Formula,
    Extremal,
}

impl From<RouteArg> for BuildMethod {
    fn from(r: RouteArg) -> BuildMethod {
        match r {
            RouteArg::Formula => BuildMethod::Formula,
            RouteArg::Extremal => BuildMethod::Extremal,
        }
    }
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected `re` or `re,im`, got '{s}'")),
    }
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    let bits: u32 = s.parse().map_err(|e| format!("'{s}': {e}"))?;
    Precision::from_bits(bits)
        .ok_or_else(|| format!("precision must be 53, 106 or 212 bits, got {bits}"))
}
