mod output;
mod parse;

use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuethin::asymptotics::{
    predict_case1, predict_case3, predict_case4, sine_fredholm_det_converged, AsymptoticPrediction, LocalKernel,
    PointKind,
};
use cuethin::conditional::{count_stats, ConditionalCue};
use cuethin::equilibrium::{critical_x, EquilibriumData};
use cuethin::montecarlo::{estimate_conditional_count, estimate_gap_probability, McConfig};
use cuethin::numerics::PrecisionContext;
use cuethin::opuc::{build_state, log_toeplitz_det, phi_zeros};
use cuethin::symbol::{classify_regime, Regime, SymbolParams};
use cuethin::Error;
use output::{Cell, Format, Table};
use parse::Rate;
use serde_json::{json, Map, Value};

/// Gap probabilities, conditional statistics and asymptotics for the thinned CUE.
#[derive(Parser, Debug)]
#[command(name = "cuethin", version)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "CUETHIN_BITS", default_value_t = PrecisionContext::DEFAULT_BITS)]
    bits: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SymbolArgs {
    #[arg(long)]
    n: usize,
    /// Fixed removal probability.
    #[arg(long, conflicts_with = "x")]
    s: Option<f64>,
    /// Decay rate with s = e^{-xn}: a number, `xc`, `auto-half` or a multiple like `2xc`.
    #[arg(long, value_parser = parse::rate)]
    x: Option<Rate>,
    /// Half-arclength of γ in radians; `pi` literals allowed.
    #[arg(long = "L", value_parser = parse::angle)]
    l: f64,
}

impl SymbolArgs {
    fn params(&self) -> Result<SymbolParams, Error> {
        match (self.s, self.x) {
            (Some(s), None) => SymbolParams::new(s, self.l),
            (None, Some(r)) => SymbolParams::with_rate(r.resolve(critical_x(self.l)), self.l),
            _ => Err(Error::InvalidParameter("give exactly one of --s and --x".into())),
        }
    }

    /// The decay rate, if one was given.
    fn rate(&self) -> Option<f64> {
        self.x.map(|r| r.resolve(critical_x(self.l)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Bulk,
    Hard,
    Soft,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// log D_n with the regime's asymptotic prediction.
    Det(SymbolArgs),
    /// Equilibrium density on a θ grid for several rates.
    Eqdens {
        #[arg(long = "L", value_parser = parse::angle)]
        l: f64,
        #[arg(long, value_parser = parse::rate, value_delimiter = ',', default_value = "1.5xc,xc,0.6xc,0.3xc,0.1xc,0")]
        x: Vec<Rate>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Zeros of φ_n.
    Zeros(SymbolArgs),
    /// Rescaled finite-n kernel against its local limit.
    Kernel {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long, value_enum, default_value_t = Kind::Bulk)]
        kind: Kind,
        /// Bulk angle.
        #[arg(long, value_parser = parse::angle, default_value = "0")]
        theta: f64,
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// One-point density ψ_n on a θ grid.
    Density {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    /// Conditional mean and variance of the number of unobserved eigenvalues.
    Counts(SymbolArgs),
    /// Monte Carlo estimates next to the exact values.
    Mc {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact log D_n against the asymptotics of one case.
    Asymp {
        #[arg(long = "case", value_parser = clap::value_parser!(u8).range(1..=4))]
        case: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, value_parser = parse::rate)]
        x: Option<Rate>,
        #[arg(long = "L", value_parser = parse::angle)]
        l: Option<f64>,
        /// Retention probability 1 - s (case 2).
        #[arg(long)]
        p: Option<f64>,
        /// Gap scale with L = π(1 - 4y/n) (case 2).
        #[arg(long)]
        y: Option<f64>,
    },
}

fn digits(bits: u32) -> usize {
    ((bits as f64 * std::f64::consts::LOG10_2).floor() as usize).clamp(1, 40)
}

fn big(v: &rug::Float, bits: u32) -> Cell {
    Cell::decimal(v.to_string_radix(10, Some(digits(bits))))
}

fn terms_json(p: &AsymptoticPrediction) -> Value {
    let terms: Map<String, Value> = p.terms.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({ "regime": p.regime.to_string(), "log_value": p.log_value, "terms": terms })
}

fn missing(what: &str) -> Error {
    Error::InvalidParameter(format!("{what} is required"))
}

fn prediction(n: usize, a: &SymbolArgs, regime: Regime) -> Option<AsymptoticPrediction> {
    match regime {
        Regime::CaseI => predict_case1(n, a.s?, a.l).ok(),
        Regime::CaseIII => predict_case3(n, a.l).ok(),
        Regime::CaseIV => predict_case4(n, a.rate()?, a.l).ok(),
        Regime::CaseII => None,
    }
}

fn cmd_det(a: &SymbolArgs, ctx: &PrecisionContext, bits: u32) -> Result<Table, Error> {
    let p = a.params()?;
    let sym = p.at(a.n)?;
    let ld = log_toeplitz_det(a.n, &sym, ctx)?;
    let regime = classify_regime(a.n, &p)?;
    let ldf = ld.to_f64();
    let d = ldf.exp();
    let pred = prediction(a.n, a, regime);
    let mut t = Table::new("det", &["n", "s", "x", "L", "regime", "log_det", "det", "prediction", "residual"]);
    t.push(vec![
        a.n.into(),
        sym.s().into(),
        a.rate().into(),
        a.l.into(),
        regime.to_string().into(),
        big(&ld, bits),
        (if d > 0.0 && d.is_normal() { Some(d) } else { None }).into(),
        pred.as_ref().map(|p| p.log_value).into(),
        pred.as_ref().map(|p| ldf - p.log_value).into(),
    ]);
    if let Some(p) = &pred {
        t.extra.insert("prediction".into(), terms_json(p));
    }
    Ok(t)
}

fn grid_angles(m: usize) -> Vec<f64> {
    (0..m).map(|k| -PI + 2.0 * PI * k as f64 / m as f64).collect()
}

fn cmd_eqdens(l: f64, xs: &[Rate], grid: usize) -> Result<Table, Error> {
    let xc = critical_x(l);
    let mut t = Table::new("eqdens", &["x", "theta", "density"]);
    for r in xs {
        let x = r.resolve(xc);
        let eq = EquilibriumData::new(x, l)?;
        for th in grid_angles(grid) {
            t.push(vec![x.into(), th.into(), eq.density(th).into()]);
        }
    }
    Ok(t)
}

fn cmd_zeros(a: &SymbolArgs, ctx: &PrecisionContext) -> Result<Table, Error> {
    let sym = a.params()?.at(a.n)?;
    let st = build_state(a.n, &sym, ctx)?;
    let mut t = Table::new("zeros", &["re", "im", "abs", "within_0_8"]);
    for z in phi_zeros(&st, ctx)? {
        t.push(vec![z.re.into(), z.im.into(), z.norm().into(), (z.norm() <= 0.8).into()]);
    }
    Ok(t)
}

fn cmd_kernel(a: &SymbolArgs, kind: Kind, theta: f64, grid: usize, lo: Option<f64>, hi: Option<f64>) -> Result<Table, Error> {
    let (pk, dlo, dhi) = match kind {
        Kind::Bulk => (PointKind::Bulk(theta), -2.0, 2.0),
        Kind::Hard => (PointKind::HardEdge, 0.5, 10.0),
        Kind::Soft => (PointKind::SoftEdge, -3.0, 1.0),
    };
    let lk = LocalKernel::new(a.n, &a.params()?, pk)?;
    let pts = cuethin::asymptotics::square_grid(lo.unwrap_or(dlo), hi.unwrap_or(dhi), grid);
    let mut t = Table::new("kernel", &["u", "v", "finite_re", "finite_im", "limit", "abs_error"]);
    let mut sup: f64 = 0.0;
    for (u, v) in pts {
        let k = lk.stripped(u, v);
        let lim = match pk {
            PointKind::Bulk(_) => cuethin::asymptotics::sine_kernel(u, v),
            PointKind::HardEdge => cuethin::asymptotics::bessel_kernel(u, v)?,
            PointKind::SoftEdge => cuethin::asymptotics::airy_kernel(u, v),
        };
        let err = (k - lim).norm();
        sup = sup.max(err);
        t.push(vec![u.into(), v.into(), k.re.into(), k.im.into(), lim.into(), err.into()]);
    }
    t.extra.insert("scaling_constant".into(), json!(lk.scaling_constant()));
    t.extra.insert("sup_error".into(), json!(sup));
    Ok(t)
}

fn cmd_density(a: &SymbolArgs, grid: usize, ctx: &PrecisionContext) -> Result<Table, Error> {
    let cue = ConditionalCue::new(a.n, &a.params()?, ctx)?;
    let eq = a.rate().map(|x| EquilibriumData::new(x, a.l)).transpose()?;
    let mut t = Table::new("density", &["theta", "psi_n", "psi_limit"]);
    for th in grid_angles(grid) {
        t.push(vec![th.into(), cue.density(th).into(), eq.as_ref().map(|e| e.density(th)).into()]);
    }
    Ok(t)
}

fn cmd_counts(a: &SymbolArgs, ctx: &PrecisionContext) -> Result<Table, Error> {
    let p = a.params()?;
    let st = count_stats(a.n, &p, ctx)?;
    let mut t = Table::new("counts", &["n", "s", "x", "L", "mean", "variance", "fd_step"]);
    t.push(vec![
        a.n.into(),
        p.at(a.n)?.s().into(),
        a.rate().into(),
        a.l.into(),
        st.mean.into(),
        st.variance.into(),
        st.fd_step.into(),
    ]);
    Ok(t)
}

fn cmd_mc(a: &SymbolArgs, trials: usize, seed: u64, ctx: &PrecisionContext) -> Result<Table, Error> {
    let p = a.params()?;
    let cfg = McConfig::new(a.n, trials, seed, p)?;
    let mut t = Table::new("mc", &["quantity", "estimate", "std_error", "exact", "trials", "discarded"]);
    let gap = estimate_gap_probability(&cfg)?;
    let exact = log_toeplitz_det(a.n, &p.at(a.n)?, ctx)?.to_f64().exp();
    t.push(vec![
        "gap_probability".into(),
        gap.value.into(),
        gap.std_error.into(),
        exact.into(),
        gap.trials.into(),
        gap.discarded.into(),
    ]);
    if p.at(a.n)?.s() > 0.0 {
        let c = estimate_conditional_count(&cfg)?;
        let exact = count_stats(a.n, &p, ctx)?.mean;
        t.push(vec![
            "conditional_count".into(),
            c.value.into(),
            c.std_error.into(),
            exact.into(),
            c.trials.into(),
            c.discarded.into(),
        ]);
    }
    t.extra.insert("seed".into(), json!(seed));
    Ok(t)
}

struct AsympArgs {
    case: u8,
    n: usize,
    s: Option<f64>,
    x: Option<Rate>,
    l: Option<f64>,
    p: Option<f64>,
    y: Option<f64>,
}

fn cmd_asymp(a: &AsympArgs, ctx: &PrecisionContext) -> Result<Table, Error> {
    if a.case == 2 {
        let p = a.p.ok_or_else(|| missing("--p"))?;
        let y = a.y.ok_or_else(|| missing("--y"))?;
        let sym = SymbolParams::shrinking(1.0 - p, y)?.at(a.n)?;
        let toeplitz = log_toeplitz_det(a.n, &sym, ctx)?.to_f64().exp();
        let (fy, _) = sine_fredholm_det_converged(p, y)?;
        let (f2y, _) = sine_fredholm_det_converged(p, 2.0 * y)?;
        let mut t = Table::new(
            "asymp",
            &["case", "n", "p", "y", "L", "toeplitz", "fredholm_y", "fredholm_2y", "diff_y", "diff_2y"],
        );
        t.push(vec![
            2usize.into(),
            a.n.into(),
            p.into(),
            y.into(),
            sym.l.into(),
            toeplitz.into(),
            fy.into(),
            f2y.into(),
            (toeplitz - fy).abs().into(),
            (toeplitz - f2y).abs().into(),
        ]);
        return Ok(t);
    }
    let l = a.l.ok_or_else(|| missing("--L"))?;
    let (params, pred) = match a.case {
        1 => {
            let s = a.s.ok_or_else(|| missing("--s"))?;
            (SymbolParams::new(s, l)?, predict_case1(a.n, s, l)?)
        }
        3 => {
            let s = a.s.unwrap_or(0.0);
            (SymbolParams::new(s, l)?, predict_case3(a.n, l)?)
        }
        _ => {
            let x = a.x.ok_or_else(|| missing("--x"))?.resolve(critical_x(l));
            (SymbolParams::with_rate(x, l)?, predict_case4(a.n, x, l)?)
        }
    };
    let exact = log_toeplitz_det(a.n, &params.at(a.n)?, ctx)?.to_f64();
    let nn = (a.n * a.n) as f64;
    let mut t = Table::new("asymp", &["case", "n", "L", "exact_log", "prediction_log", "residual", "residual_per_n2"]);
    t.push(vec![
        (a.case as usize).into(),
        a.n.into(),
        l.into(),
        exact.into(),
        pred.log_value.into(),
        (exact - pred.log_value).into(),
        ((exact - pred.log_value) / nn).into(),
    ]);
    t.extra.insert("prediction".into(), terms_json(&pred));
    Ok(t)
}

fn run(cli: &Cli) -> Result<Table, Error> {
    let ctx = PrecisionContext::new(cli.bits)?;
    match &cli.command {
        Command::Det(a) => cmd_det(a, &ctx, cli.bits),
        Command::Eqdens { l, x, grid } => cmd_eqdens(*l, x, *grid),
        Command::Zeros(a) => cmd_zeros(a, &ctx),
        Command::Kernel { sym, kind, theta, grid, lo, hi } => cmd_kernel(sym, *kind, *theta, *grid, *lo, *hi),
        Command::Density { sym, grid } => cmd_density(sym, *grid, &ctx),
        Command::Counts(a) => cmd_counts(a, &ctx),
        Command::Mc { sym, trials, seed } => cmd_mc(sym, *trials, *seed, &ctx),
        Command::Asymp { case, n, s, x, l, p, y } => {
            cmd_asymp(&AsympArgs { case: *case, n: *n, s: *s, x: *x, l: *l, p: *p, y: *y }, &ctx)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(table) => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            if table.write(cli.format, &mut out).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
