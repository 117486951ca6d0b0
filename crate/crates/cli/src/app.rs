//! Command-line definitions and dispatch.

use std::io;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degmag_core::asymptotics::{
    corr_exact, counting_density, psi_mass, sawtooth_g, sawtooth_g1, scaling_experiment, FieldParams,
    PotentialProfile,
};
use degmag_core::dynamics::{find_kstar, integrate_trajectory, orbit, orbit_start, period, ModelSymbol, Parity};
use degmag_core::spectrum1d::{
    bohr_sommerfeld, build_operator, gap_stats, lambda_curve, n0, refined_eigenvalues, GridConfig, ReducedSymbol,
    SymClass,
};
use serde::Serialize;

use crate::acceptance::{self, Tamper};
use crate::output::{fmt_f, svg_polyline, to_json, write_csv, write_json, write_text};

#[derive(Parser, Debug)]
#[command(name = "degmag", version, about = "Degenerating magnetic field: dynamics, spectra and counting asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pilot-model orbits and trajectories.
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Spectrum of the reduced one-dimensional operator.
    #[command(subcommand)]
    Spectrum(SpectrumCmd),
    /// Magnetic Weyl expressions and correction terms.
    #[command(subcommand)]
    Asympt(AsymptCmd),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClassArg {
    Even,
    Odd,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TamperArg {
    FlipDrift,
}

#[derive(Args, Debug)]
pub struct Model {
    #[arg(long, default_value_t = 2)]
    pub nu: u32,
    #[arg(long, value_enum, default_value_t = ParityArg::Even)]
    pub parity: ParityArg,
}

impl Model {
    fn symbol(&self) -> degmag_core::Result<ModelSymbol> {
        ModelSymbol::new(self.nu as f64, self.parity.into())
    }
}

#[derive(Args, Debug)]
pub struct Out {
    /// Output file (stdout when omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum DynamicsCmd {
    /// Turning points, period, drift integral and velocity over a k-grid.
    OrbitTable {
        #[command(flatten)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        k_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        k_max: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Critical momentum and its derived constants.
    Kstar {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        out: Out,
    },
    /// Integrated orbit from the outer turning point.
    Trajectory {
        #[command(flatten)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        periods: f64,
        #[arg(long, default_value_t = 2000)]
        steps_per_period: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args, Debug)]
pub struct Reduced {
    #[command(flatten)]
    pub model: Model,
    #[arg(long, allow_negative_numbers = true)]
    pub xi2: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub w: f64,
}

impl Reduced {
    fn symbol(&self) -> degmag_core::Result<ReducedSymbol> {
        ReducedSymbol::new(self.model.symbol()?, self.xi2, self.hbar, self.w)
    }
}

#[derive(Subcommand, Debug)]
pub enum SpectrumCmd {
    /// Finite-difference and Bohr–Sommerfeld eigenvalues in [lo, hi).
    Eigs {
        #[command(flatten)]
        reduced: Reduced,
        #[arg(long, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        hi: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Number of negative eigenvalues and its Weyl approximation.
    N0 {
        #[command(flatten)]
        reduced: Reduced,
        #[command(flatten)]
        out: Out,
    },
    /// Eigenvalue curves over a xi2-grid.
    Curves {
        #[command(flatten)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        hbar: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w: f64,
        #[arg(long, allow_negative_numbers = true)]
        xi2_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        xi2_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Comma-separated 0-based indices within the class.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        indices: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ClassArg::All)]
        class: ClassArg,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        top: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Minimal spacings and their fitted power law in hbar.
    Gaps {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        xi2: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        hbar_list: Vec<f64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w: f64,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        hi: f64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args, Debug)]
pub struct Field {
    #[command(flatten)]
    pub model: Model,
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub gamma_bar: f64,
}

impl Field {
    fn params(&self) -> degmag_core::Result<FieldParams> {
        FieldParams::from_hbar(self.model.nu, self.model.parity.into(), self.hbar, self.gamma_bar)
    }
}

#[derive(Subcommand, Debug)]
pub enum AsymptCmd {
    /// Exact correction term with its leading approximations.
    Correction {
        #[command(flatten)]
        field: Field,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w: f64,
        #[command(flatten)]
        out: Out,
    },
    /// G and G1 on a uniform grid over [t-min, t-max].
    Gfun {
        #[arg(long, default_value_t = 201)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t_max: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Correction term over a list of hbar at fixed gamma-bar, W = 1.
    Scaling {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        hbar_list: Vec<f64>,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        gamma_bar: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Counting density for W(x2) = w0 + amp·sin(freq·x2) under a bump cut-off.
    Counting {
        #[command(flatten)]
        field: Field,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        w0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        amp: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        freq: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        centre: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        radius: f64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only the fast subset.
    #[arg(long)]
    pub quick: bool,
    /// Comma-separated criterion numbers (overrides --quick).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
    #[arg(long, value_enum, hide = true)]
    pub tamper: Option<TamperArg>,
    #[command(flatten)]
    pub out: Out,
}

#[derive(Debug)]
pub enum CliError {
    Domain(degmag_core::Error),
    Usage(String),
    VerifyFailed,
}

impl From<degmag_core::Error> for CliError {
    fn from(e: degmag_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn to_json(&self) -> Option<serde_json::Value> {
        match self {
            CliError::Domain(e) => Some(serde_json::json!({ "error": e.kind(), "message": e.to_string() })),
            CliError::Usage(m) => Some(serde_json::json!({ "error": "Usage", "message": m })),
            CliError::VerifyFailed => None,
        }
    }
}

type CliResult = Result<(), CliError>;

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Dynamics(c) => dynamics(c),
        Command::Spectrum(c) => spectrum(c),
        Command::Asympt(c) => asympt(c),
        Command::Verify(a) => verify(a),
    }
}

fn json_out<T: Serialize>(out: &Out, value: &T) -> CliResult {
    Ok(write_json(out.out.as_deref(), &to_json(value))?)
}

fn csv_out(out: &Out, header: &[&str], rows: &[Vec<String>]) -> CliResult {
    Ok(write_csv(out.out.as_deref(), header, rows)?)
}

fn grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 || !(a < b) {
        return Err(CliError::Usage(format!("need n >= 2 and min < max, got n = {n}, [{a}, {b}]")));
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn dynamics(cmd: DynamicsCmd) -> CliResult {
    match cmd {
        DynamicsCmd::OrbitTable { model, k_min, k_max, n, out } => {
            let m = model.symbol()?;
            let rows = grid(k_min, k_max, n)?
                .into_iter()
                .map(|k| {
                    let o = orbit(&m, k)?;
                    Ok(vec![fmt_f(k), fmt_f(o.b1), fmt_f(o.b2), fmt_f(o.t), fmt_f(o.i), fmt_f(o.v)])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            csv_out(&out, &["k", "b1", "b2", "T", "I", "v"], &rows)
        }
        DynamicsCmd::Kstar { model, out } => json_out(&out, &find_kstar(&model.symbol()?)?),
        DynamicsCmd::Trajectory { model, k, periods, steps_per_period, format, out } => {
            if !(periods > 0.0) || steps_per_period == 0 {
                return Err(CliError::Usage("need periods > 0 and steps-per-period > 0".into()));
            }
            let m = model.symbol()?;
            let t = period(&m, k)?;
            let tr = integrate_trajectory(&m, orbit_start(&m, k)?, periods * t, t / steps_per_period as f64)?;
            match format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = tr
                        .samples
                        .iter()
                        .map(|(s, p)| {
                            let e = 0.5 * (p.xi1 * p.xi1 + m.p2(p.x1, p.xi2).powi(2) - 1.0);
                            vec![fmt_f(*s), fmt_f(p.x1), fmt_f(p.x2), fmt_f(p.xi1), fmt_f(p.xi2), fmt_f(e)]
                        })
                        .collect();
                    csv_out(&out, &["t", "x1", "x2", "xi1", "xi2", "energy"], &rows)
                }
                Format::Svg => {
                    let pts: Vec<(f64, f64)> = tr.samples.iter().map(|(_, p)| (p.x1, p.x2)).collect();
                    Ok(write_text(out.out.as_deref(), &svg_polyline(&pts))?)
                }
                Format::Json => Err(CliError::Usage("trajectory supports csv and svg".into())),
            }
        }
    }
}

fn class_filter(c: ClassArg) -> Vec<Option<SymClass>> {
    match c {
        ClassArg::Even => vec![Some(SymClass::Even)],
        ClassArg::Odd => vec![Some(SymClass::Odd)],
        ClassArg::All => vec![None],
    }
}

fn class_name(c: Option<SymClass>) -> &'static str {
    match c {
        Some(SymClass::Even) => "even",
        Some(SymClass::Odd) => "odd",
        None => "all",
    }
}

fn spectrum(cmd: SpectrumCmd) -> CliResult {
    match cmd {
        SpectrumCmd::Eigs { reduced, lo, hi, out } => {
            let s = reduced.symbol()?;
            let fd = refined_eigenvalues(&s, lo, hi, &GridConfig::default())?.values;
            let bs = bohr_sommerfeld(&s, lo, hi)?.values;
            let first = build_operator(&s, hi.max(lo + 1e-12))?.count_below(lo);
            let rows: Vec<Vec<String>> = fd
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    let near = bs.iter().copied().min_by(|a, b| (a - f).abs().total_cmp(&(b - f).abs()));
                    let (b, d) = match near {
                        Some(b) => (fmt_f(b), fmt_f(f - b)),
                        None => (String::new(), String::new()),
                    };
                    vec![(first + i).to_string(), fmt_f(f), b, d]
                })
                .collect();
            csv_out(&out, &["n", "lambda_fd", "lambda_bs", "delta"], &rows)
        }
        SpectrumCmd::N0 { reduced, out } => json_out(&out, &n0(&reduced.symbol()?)?),
        SpectrumCmd::Curves { model, hbar, w, xi2_min, xi2_max, points, indices, class, top, out } => {
            let xs = grid(xi2_min, xi2_max, points)?;
            let s = ReducedSymbol::new(model.symbol()?, xs[0], hbar, w)?;
            let mut rows = Vec::new();
            for c in class_filter(class) {
                for &j in &indices {
                    let curve = lambda_curve(&s, &xs, j, c, top, &GridConfig::default())?;
                    for i in 0..xs.len() {
                        rows.push(vec![
                            fmt_f(xs[i]),
                            j.to_string(),
                            class_name(c).to_string(),
                            fmt_f(curve.lambda[i]),
                            fmt_f(curve.d1[i]),
                            fmt_f(curve.d2[i]),
                        ]);
                    }
                }
            }
            csv_out(&out, &["xi2", "index", "class", "lambda", "d1", "d2"], &rows)
        }
        SpectrumCmd::Gaps { model, xi2, hbar_list, w, lo, hi, out } => {
            if xi2.is_empty() || hbar_list.is_empty() {
                return Err(CliError::Usage("need at least one xi2 and one hbar".into()));
            }
            let s = ReducedSymbol::new(model.symbol()?, xi2[0], hbar_list[0], w)?;
            json_out(&out, &gap_stats(&s, &xi2, &hbar_list, lo, hi)?)
        }
    }
}

fn asympt(cmd: AsymptCmd) -> CliResult {
    match cmd {
        AsymptCmd::Correction { field, w, out } => json_out(&out, &corr_exact(&field.params()?, w)?),
        AsymptCmd::Gfun { n, t_min, t_max, out } => {
            let rows: Vec<Vec<String>> = grid(t_min, t_max, n)?
                .into_iter()
                .map(|t| vec![fmt_f(t), fmt_f(sawtooth_g(t)), fmt_f(sawtooth_g1(t))])
                .collect();
            csv_out(&out, &["t", "G", "G1"], &rows)
        }
        AsymptCmd::Scaling { model, hbar_list, gamma_bar, out } => {
            let rows = scaling_experiment(model.nu, model.parity.into(), &hbar_list, gamma_bar)?;
            let header = [
                "hbar",
                "mu",
                "h",
                "n0_integral",
                "emw0_integral",
                "corr_exact",
                "corr_leading",
                "corr_leading_refined",
                "residual",
                "corr_norm",
                "residual_norm",
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    [
                        r.hbar,
                        r.mu,
                        r.h,
                        r.n0_integral,
                        r.emw0_integral,
                        r.corr_exact,
                        r.corr_leading,
                        r.corr_leading_refined,
                        r.residual,
                        r.corr_norm,
                        r.residual_norm,
                    ]
                    .iter()
                    .map(|&x| fmt_f(x))
                    .collect()
                })
                .collect();
            csv_out(&out, &header, &body)
        }
        AsymptCmd::Counting { field, w0, amp, freq, centre, radius, out } => {
            let fp = field.params()?;
            let prof = PotentialProfile::bump(Arc::new(move |x: f64| w0 + amp * (freq * x).sin()), centre, radius);
            #[derive(Serialize)]
            struct Counting {
                counting_density: f64,
                psi_mass: f64,
                hbar: f64,
                h: f64,
                mu: f64,
            }
            let value = Counting {
                counting_density: counting_density(&fp, &prof)?,
                psi_mass: psi_mass(&prof),
                hbar: fp.hbar,
                h: fp.h,
                mu: fp.mu,
            };
            json_out(&out, &value)
        }
    }
}

fn verify(args: VerifyArgs) -> CliResult {
    let tamper = args.tamper.map(|TamperArg::FlipDrift| Tamper::FlipDrift);
    let suite = acceptance::Suite::new(tamper);
    let ids: Vec<u32> = if !args.only.is_empty() {
        args.only.clone()
    } else if args.quick {
        acceptance::QUICK.to_vec()
    } else {
        acceptance::ALL.to_vec()
    };
    let mut criteria = Vec::new();
    for id in ids {
        let r = suite.criterion(id);
        eprintln!("{}", r.line());
        criteria.push(r);
    }
    let report =
        acceptance::Report { quick: args.quick, all_pass: criteria.iter().all(|c| c.pass), criteria };
    json_out(&args.out, &report)?;
    if report.all_pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            if let Some(j) = e.to_json() {
                eprintln!("{j}");
            }
            e.exit_code()
        }
    }
}
