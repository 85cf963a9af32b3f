use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::json;

use triavg::decomposition::{
    critical_exponent, norm_table, parse_reciprocal, region_contains, support_volume, DyadicIndex,
};
use triavg::geometry::QuadratureSpec;
use triavg::measure::{
    decay_bound, decay_fit, mu_hat_closed, mu_hat_mc, recommended_radii, FrequencyPair, Ray,
};
use triavg::operator::{apply_t, maximal_region, maximal_t, MaximalGrid, TestFunction};
use triavg::report::{CheckResult, Format, Report};
use triavg::verify::{run_all, Tier};
use triavg::Error;

#[derive(Parser)]
#[command(
    name = "triavg",
    version,
    about = "Numerical laboratory for the triangle averaging operator"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(short = 'd', long = "dimension", global = true, default_value_t = 3)]
    dimension: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 16)]
    n_outer: usize,
    #[arg(long, global = true, default_value_t = 32)]
    n_inner: usize,
    #[arg(long, global = true, default_value_t = 32)]
    n_radial: usize,
    #[arg(long, global = true, default_value_t = 30)]
    pole_decades: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MuMethod {
    Closed,
    Mc,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpMethod {
    Product,
    Mc,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Direction {
    EtaZero,
    Orthogonal,
    Parallel,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier transform of the triangle measure at (ξ, η)
    MuHat {
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        xi: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        eta: Vec<f64>,
        #[arg(long, value_enum, default_value_t = MuMethod::Closed)]
        method: MuMethod,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Envelope decay slope of |μ̂| along a ray
    Decay {
        #[arg(long, value_enum, default_value_t = Direction::All)]
        direction: Direction,
        #[arg(long, default_value_t = 2.0)]
        r_min: f64,
        #[arg(long, default_value_t = 200.0)]
        r_max: f64,
        /// Number of radii; by default enough to resolve the oscillation.
        #[arg(long)]
        radii: Option<usize>,
    },
    /// Piece norm bounds and their sums over the dyadic scales
    Decompose {
        #[arg(long, default_value_t = 20)]
        i_max: u32,
    },
    /// Monte Carlo volumes of the piece supports against the volume law
    Volume {
        #[arg(long, value_parser = parse_range, default_value = "3..6")]
        i: RangeInclusive<u32>,
        #[arg(long, value_parser = parse_range, default_value = "0..2")]
        j: RangeInclusive<u32>,
        #[arg(long, value_parser = parse_range, default_value = "0..2")]
        k: RangeInclusive<u32>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Membership of (1/p, 1/q, 1/r) in the bilinear boundedness region
    Region {
        #[arg(short = 'p')]
        p: String,
        #[arg(short = 'q')]
        q: String,
        #[arg(short = 'r')]
        r: String,
    },
    /// T_t(f, g)(x)
    Apply {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        x: Vec<f64>,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = OpMethod::Product)]
        method: OpMethod,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Grid lower bound for the maximal function sup_t |T_t(f, g)(x)|
    Maximal {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t_min: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 64)]
        per_decade: usize,
    },
    /// Runs the acceptance checks
    Verify {
        #[arg(long, conflicts_with = "full")]
        fast: bool,
        #[arg(long)]
        full: bool,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let bound = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(bound(a)?..=bound(b.trim_start_matches('='))?),
        None => {
            let v = bound(s)?;
            Ok(v..=v)
        }
    }
}

fn ratio_string(r: &BigRational) -> String {
    r.to_string()
}

struct Run {
    report: Report,
    echo: Vec<String>,
}

impl From<Report> for Run {
    fn from(report: Report) -> Self {
        Self {
            report,
            echo: Vec::new(),
        }
    }
}

fn run(g: &Global, command: &Command) -> triavg::Result<Run> {
    let d = g.dimension;
    let quad = QuadratureSpec {
        n_outer: g.n_outer,
        n_inner: g.n_inner,
        n_radial: g.n_radial,
        seed: g.seed,
        pole_decades: g.pole_decades,
        ..QuadratureSpec::default()
    };
    quad.validate()?;
    match command {
        Command::MuHat {
            xi,
            eta,
            method,
            samples,
        } => {
            if d < 3 {
                return Err(Error::Dimension { got: d, min: 3 });
            }
            if xi.len() != d || eta.len() != d {
                return Err(Error::Domain(format!("--xi and --eta need {d} components")));
            }
            let fp = FrequencyPair::new(xi.clone(), eta.clone())?;
            let bound = decay_bound(&fp);
            let spec = if *method == MuMethod::Closed {
                quad
            } else {
                QuadratureSpec::monte_carlo(*samples, g.seed)
            };
            let mut report = Report::new("mu-hat", d, g.seed, &spec)
                .with("xi", xi.clone())
                .with("eta", eta.clone())
                .columns(&[
                    "method",
                    "value",
                    "imag",
                    "std_error",
                    "decay_bound",
                    "ratio",
                ]);
            let mut closed = None;
            if *method != MuMethod::Mc {
                let v = mu_hat_closed(&fp)?;
                closed = Some(v);
                report.push_row(vec![
                    json!("closed"),
                    json!(v),
                    json!(0.0),
                    json!(0.0),
                    json!(bound),
                    json!(v.abs() / bound),
                ]);
            }
            if *method != MuMethod::Closed {
                let e = mu_hat_mc(&fp, *samples, g.seed)?;
                report.push_row(vec![
                    json!("monte_carlo"),
                    json!(e.re),
                    json!(e.im),
                    json!(e.se()),
                    json!(bound),
                    json!(e.re.hypot(e.im) / bound),
                ]);
                if let Some(v) = closed {
                    let z = e.distance_to(v, 0.0) / e.se();
                    report.push_check(CheckResult {
                        id: 1,
                        name: "closed form vs Monte Carlo".into(),
                        passed: z <= 3.0,
                        detail: format!("|closed - mc|/SE = {z:.3} (limit 3)"),
                        metrics: vec![("z".into(), z)],
                    });
                }
            }
            Ok(report.into())
        }
        Command::Decay {
            direction,
            r_min,
            r_max,
            radii,
        } => {
            if d < 3 {
                return Err(Error::Dimension { got: d, min: 3 });
            }
            let mut report = Report::new("decay", d, g.seed, &quad)
                .with("r_min", *r_min)
                .with("r_max", *r_max)
                .columns(&[
                    "direction",
                    "n_radii",
                    "n_envelope",
                    "slope",
                    "bound_slope",
                    "expected_slope",
                    "intercept",
                    "residual",
                    "pass",
                ]);
            let dh = d as f64;
            let rays = [
                (
                    Direction::EtaZero,
                    "eta_zero",
                    Ray::eta_zero(d)?,
                    -(dh - 1.0) / 2.0,
                ),
                (
                    Direction::Orthogonal,
                    "orthogonal",
                    Ray::orthogonal(d)?,
                    -(dh - 2.0),
                ),
                (
                    Direction::Parallel,
                    "parallel",
                    Ray::parallel(d)?,
                    -(dh - 2.0) / 2.0,
                ),
            ];
            for (dir, name, ray, expected) in rays {
                if *direction != Direction::All && *direction != dir {
                    continue;
                }
                let n = match radii {
                    Some(n) => *n,
                    None => recommended_radii(&ray, *r_min, *r_max)?,
                };
                let fit = decay_fit(&ray, *r_min, *r_max, n)?;
                let pass = fit.slope <= expected + 0.3;
                report.push_row(vec![
                    json!(name),
                    json!(n),
                    json!(fit.envelope.len()),
                    json!(fit.slope),
                    json!(fit.bound_slope),
                    json!(expected),
                    json!(fit.intercept),
                    json!(fit.residual),
                    json!(pass),
                ]);
                report.push_check(CheckResult {
                    id: 3,
                    name: format!("decay slope ({name})"),
                    passed: pass,
                    detail: format!("slope {:.3} <= {:.2}", fit.slope, expected + 0.3),
                    metrics: vec![("slope".into(), fit.slope)],
                });
            }
            Ok(report.into())
        }
        Command::Decompose { i_max } => {
            let table = norm_table(d, *i_max)?;
            let mut report = Report::new("decompose", d, g.seed, &quad)
                .with("i_max", *i_max)
                .with("rate_exponent", ratio_string(&table.rate_exponent))
                .with("tail_exponent", ratio_string(&table.tail_exponent))
                .with("geometric_ratio", table.geometric_ratio)
                .with("total", table.total)
                .with("divergent", table.divergent)
                .columns(&[
                    "i",
                    "j",
                    "k",
                    "piece_bound",
                    "scale_sum",
                    "companion_growth_log2",
                ]);
            for row in &table.rows {
                for (idx, bound) in &row.pieces {
                    report.push_row(vec![
                        json!(idx.i),
                        json!(idx.j),
                        json!(idx.k),
                        json!(bound),
                        json!(row.summed),
                        json!(row.companion_growth_log2),
                    ]);
                }
            }
            Ok(report.into())
        }
        Command::Volume { i, j, k, samples } => {
            let mut report = Report::new(
                "volume",
                d,
                g.seed,
                &QuadratureSpec::monte_carlo(*samples, g.seed),
            )
            .columns(&["i", "j", "k", "volume", "std_error", "model", "ratio"]);
            let mut ratios = Vec::new();
            let mut skipped = Vec::new();
            for ii in i.clone() {
                for jj in j.clone() {
                    for kk in k.clone() {
                        let Ok(idx) = DyadicIndex::new(ii, jj, kk) else {
                            skipped.push(format!("({ii},{jj},{kk})"));
                            continue;
                        };
                        let seed = g.seed ^ ((ii as u64) << 40 | (jj as u64) << 20 | kk as u64);
                        let v = support_volume(idx, d, *samples, seed)?;
                        ratios.push(v.ratio());
                        report.push_row(vec![
                            json!(ii),
                            json!(jj),
                            json!(kk),
                            json!(v.estimate),
                            json!(v.std_error),
                            json!(v.model),
                            json!(v.ratio()),
                        ]);
                    }
                }
            }
            if !ratios.is_empty() {
                let max = ratios.iter().copied().fold(f64::MIN, f64::max);
                let min = ratios.iter().copied().fold(f64::MAX, f64::min);
                report.push_check(CheckResult {
                    id: 6,
                    name: "volume law".into(),
                    passed: max / min <= 4.0,
                    detail: format!("ratio spread max/min = {:.3} (limit 4)", max / min),
                    metrics: vec![("spread".into(), max / min)],
                });
            }
            let mut report = report;
            if !skipped.is_empty() {
                report = report.with("skipped_indices", skipped.join(" "));
            }
            Ok(report.into())
        }
        Command::Region { p, q, r } => {
            let (pr, qr, rr) = (
                parse_reciprocal(p)?,
                parse_reciprocal(q)?,
                parse_reciprocal(r)?,
            );
            let inside = region_contains(d, &pr, &qr, &rr)?;
            let maximal = maximal_region(d)?;
            let report = Report::new("region", d, g.seed, &quad)
                .with("critical_exponent", ratio_string(&critical_exponent(d)?))
                .columns(&[
                    "p_recip",
                    "q_recip",
                    "r_recip",
                    "bilinear_region",
                    "maximal_interpolation",
                    "maximal_necessity",
                ]);
            let mut report = report;
            report.push_row(vec![
                json!(ratio_string(&pr)),
                json!(ratio_string(&qr)),
                json!(ratio_string(&rr)),
                json!(if inside { "inside" } else { "outside" }),
                json!(maximal.in_interpolation(&pr, &qr)),
                json!(maximal.in_necessity_square(&pr, &qr)),
            ]);
            let mut run = Run::from(report);
            run.echo.push(if inside {
                "inside".into()
            } else {
                "outside".into()
            });
            Ok(run)
        }
        Command::Apply {
            f,
            g: gs,
            x,
            t,
            method,
            samples,
        } => {
            let (ff, gf) = (TestFunction::parse(f, d)?, TestFunction::parse(gs, d)?);
            let spec = match method {
                OpMethod::Product => quad,
                OpMethod::Mc => QuadratureSpec::monte_carlo(*samples, g.seed),
            };
            let e = apply_t(&ff, &gf, x, *t, &spec)?;
            let mut report = Report::new("apply", d, g.seed, &spec)
                .with("f", ff.describe())
                .with("g", gf.describe())
                .with("x", x.clone())
                .with("t", *t)
                .columns(&["value", "error"]);
            report.push_row(vec![json!(e.value), json!(e.error)]);
            Ok(report.into())
        }
        Command::Maximal {
            f,
            g: gs,
            x,
            t_min,
            t_max,
            per_decade,
        } => {
            let (ff, gf) = (TestFunction::parse(f, d)?, TestFunction::parse(gs, d)?);
            let grid = MaximalGrid::per_decade(*t_min, *t_max, *per_decade)?;
            let m = maximal_t(&ff, &gf, x, &grid, &quad)?;
            let mut report = Report::new("maximal", d, g.seed, &quad)
                .with("f", ff.describe())
                .with("g", gf.describe())
                .with("x", x.clone())
                .with("t_min", *t_min)
                .with("t_max", *t_max)
                .with("per_decade", *per_decade)
                .with("maximal_value", m.value)
                .with("t_star", m.t_star)
                .columns(&["t", "abs_value", "error"]);
            for (t, v, e) in &m.profile {
                report.push_row(vec![json!(t), json!(v), json!(e)]);
            }
            Ok(report.into())
        }
        Command::Verify { fast: _, full } => {
            let tier = if *full { Tier::Full } else { Tier::Fast };
            let mut report = Report::new("verify", d, g.seed, &quad)
                .with("tier", if *full { "full" } else { "fast" })
                .columns(&["criterion", "name", "passed", "detail"]);
            let mut echo = Vec::new();
            for check in run_all(tier, g.seed) {
                echo.push(check.line());
                report.push_row(vec![
                    json!(check.id),
                    json!(check.name),
                    json!(check.passed),
                    json!(check.detail),
                ]);
                report.push_check(check);
            }
            Ok(Run { report, echo })
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EnvelopeFit { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match run(&cli.global, &cli.command) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let format = match cli.global.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let text = run.report.render(format);
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            for line in &run.echo {
                println!("{line}");
            }
        }
        None => {
            for line in &run.echo {
                eprintln!("{line}");
            }
            print!("{text}");
        }
    }
    if run.report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
