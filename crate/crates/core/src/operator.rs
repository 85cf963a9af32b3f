//! Pointwise evaluation of the triangle averaging operator
//! `T_t(f, g)(x) = ∫_M f(x − tu) g(x − tv) dμ(u, v)`, its maximal function
//! over dilations, the spherical-average majorant and the divergent pair.
//!
//! All test functions are radial about a center, so the product rules below
//! integrate in the few angles the integrand actually depends on: the polar
//! angle of u from x − c_f, the azimuth of u toward x − c_g, and the angle
//! of the fiber point around N_u.

use crate::error::{domain, Error, Result};
use crate::geometry::{
    dot, norm, sample_manifold_into, uniform_sphere_into, QuadMethod, QuadratureSpec, HALF_SQRT3,
};
use crate::measure::{mu_hat_closed, FrequencyPair};
use crate::par;
use crate::quadrature::{polar_rule, Estimate};
use crate::rng::RngStream;
use num::{BigRational, Signed};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::PI;

/// Distance used in place of an exact hit on a point singularity.
const SINGULAR_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Supported in |x| ≤ r (r < 1).
    InnerBall(f64),
    /// Supported in |x| ≥ r (r > 1).
    OuterBall(f64),
}

/// Radial test functions on R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// exp(−π|x − c|²/w²).
    Gaussian {
        center: Vec<f64>,
        width: f64,
    },
    /// |x|^{−a}(−ln|x|)^{−b} on an inner ball, |x|^{−a}(ln|x|)^{−b} on an
    /// outer one. The inner piece is 0 at the origin itself.
    RadialPowerLog {
        dim: usize,
        a: f64,
        b: f64,
        region: Region,
    },
    BallIndicator {
        center: Vec<f64>,
        radius: f64,
    },
    Constant(f64),
}

fn check_center(center: &[f64]) -> Result<()> {
    if center.is_empty() || center.iter().any(|x| !x.is_finite()) {
        return domain("center must be a finite vector");
    }
    Ok(())
}

impl TestFunction {
    pub fn gaussian(center: Vec<f64>, width: f64) -> Result<Self> {
        check_center(&center)?;
        if !(width > 0.0 && width.is_finite()) {
            return domain("gaussian width must be positive");
        }
        Ok(Self::Gaussian { center, width })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_center(&center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return domain("ball radius must be positive");
        }
        Ok(Self::BallIndicator { center, radius })
    }

    pub fn power_log(dim: usize, a: f64, b: f64, region: Region) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Dimension { got: dim, min: 1 });
        }
        match region {
            Region::InnerBall(r) if !(r > 0.0 && r < 1.0) => {
                return domain("inner radius must lie in (0, 1)")
            }
            Region::OuterBall(r) if !(r > 1.0 && r.is_finite()) => {
                return domain("outer radius must exceed 1")
            }
            _ => {}
        }
        Ok(Self::RadialPowerLog { dim, a, b, region })
    }

    /// |x|^{−d/p}(−ln|x|)^{−2/p} on |x| ≤ 1/8.
    pub fn counterexample_f(d: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return domain("p must be positive and finite");
        }
        Self::power_log(d, d as f64 / p, 2.0 / p, Region::InnerBall(0.125))
    }

    /// |x|^{−d/q}(ln|x|)^{−2/q} on |x| ≥ 8.
    pub fn counterexample_g(d: usize, q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return domain("q must be positive and finite");
        }
        Self::power_log(d, d as f64 / q, 2.0 / q, Region::OuterBall(8.0))
    }

    /// Parses `gaussian(c;w)`, `ball(c;r)`, `const(v)`, `cex-f(p=P)`,
    /// `cex-g(q=Q)`. A center is `0` (the origin) or d comma-separated reals.
    pub fn parse(spec: &str, d: usize) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("{spec:?}: {why}"));
        let s = spec.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| bad("expected name(args)"))?;
        let args = rest.strip_suffix(')').ok_or_else(|| bad("missing ')'"))?;
        let real = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let center = |t: &str| -> Result<Vec<f64>> {
            if t.trim() == "0" {
                return Ok(vec![0.0; d]);
            }
            let c = t.split(',').map(real).collect::<Result<Vec<_>>>()?;
            if c.len() != d {
                return Err(bad("center has the wrong dimension"));
            }
            Ok(c)
        };
        let keyed = |key: &str| -> Result<f64> {
            let (k, v) = args
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            if k.trim() != key {
                return Err(bad("unexpected key"));
            }
            real(v)
        };
        match name.trim() {
            "gaussian" | "ball" => {
                let (c, r) = args
                    .split_once(';')
                    .ok_or_else(|| bad("expected center;size"))?;
                if name.trim() == "gaussian" {
                    Self::gaussian(center(c)?, real(r)?)
                } else {
                    Self::ball(center(c)?, real(r)?)
                }
            }
            "const" => Ok(Self::Constant(real(args)?)),
            "cex-f" => Self::counterexample_f(d, keyed("p")?),
            "cex-g" => Self::counterexample_g(d, keyed("q")?),
            _ => Err(bad("unknown function")),
        }
    }

    pub fn describe(&self) -> String {
        let vec = |c: &[f64]| {
            c.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Self::Gaussian { center, width } => format!("gaussian({};{width})", vec(center)),
            Self::BallIndicator { center, radius } => format!("ball({};{radius})", vec(center)),
            Self::Constant(c) => format!("const({c})"),
            Self::RadialPowerLog { a, b, region, .. } => match region {
                Region::InnerBall(r) => format!("powerlog-inner(a={a};b={b};r={r})"),
                Region::OuterBall(r) => format!("powerlog-outer(a={a};b={b};r={r})"),
            },
        }
    }

    /// Dimension fixed by the function, or None for constants.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Gaussian { center, .. } | Self::BallIndicator { center, .. } => {
                Some(center.len())
            }
            Self::RadialPowerLog { dim, .. } => Some(*dim),
            Self::Constant(_) => None,
        }
    }

    fn center(&self, d: usize) -> Vec<f64> {
        match self {
            Self::Gaussian { center, .. } | Self::BallIndicator { center, .. } => center.clone(),
            _ => vec![0.0; d],
        }
    }

    /// Value at distance r from the center.
    pub fn profile(&self, r: f64) -> f64 {
        match self {
            Self::Gaussian { width, .. } => (-PI * r * r / (width * width)).exp(),
            Self::BallIndicator { radius, .. } => {
                if r <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Constant(c) => *c,
            Self::RadialPowerLog { a, b, region, .. } => match *region {
                Region::InnerBall(r0) => {
                    if r == 0.0 || r > r0 {
                        0.0
                    } else {
                        r.powf(-a) * (-r.ln()).powf(-b)
                    }
                }
                Region::OuterBall(r0) => {
                    if r < r0 {
                        0.0
                    } else {
                        r.powf(-a) * r.ln().powf(-b)
                    }
                }
            },
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant(c) => *c,
            _ => {
                let c = self.center(x.len());
                let r = x
                    .iter()
                    .zip(&c)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                self.profile(r)
            }
        }
    }

    /// Radii at which the profile jumps.
    fn jumps(&self) -> Vec<f64> {
        match self {
            Self::BallIndicator { radius, .. } => vec![*radius],
            Self::RadialPowerLog {
                region: Region::InnerBall(r) | Region::OuterBall(r),
                ..
            } => vec![*r],
            _ => Vec::new(),
        }
    }

    /// Radius of the neighborhood of a point singularity at the center.
    fn singular_radius(&self) -> Option<f64> {
        match self {
            Self::RadialPowerLog {
                region: Region::InnerBall(r),
                a,
                ..
            } if *a > 0.0 => Some(*r),
            _ => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular_radius().is_some()
    }

    /// ‖f‖_∞, or None when unbounded.
    pub fn sup_norm(&self) -> Option<f64> {
        match self {
            Self::Gaussian { .. } | Self::BallIndicator { .. } => Some(1.0),
            Self::Constant(c) => Some(c.abs()),
            Self::RadialPowerLog { a, b, region, .. } => match *region {
                Region::InnerBall(_) => (*a <= 0.0 && *b <= 0.0).then(|| self.profile(1e-300)),
                Region::OuterBall(r0) => (*a >= 0.0 && *b >= 0.0).then(|| self.profile(r0)),
            },
        }
    }

    /// x ↦ f(x/s).
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return domain("dilation factor must be positive");
        }
        let scaled = |c: &[f64]| c.iter().map(|x| s * x).collect::<Vec<_>>();
        match self {
            Self::Gaussian { center, width } => Self::gaussian(scaled(center), s * width),
            Self::BallIndicator { center, radius } => Self::ball(scaled(center), s * radius),
            Self::Constant(c) => Ok(Self::Constant(*c)),
            Self::RadialPowerLog { .. } => Err(Error::Unsupported(
                "dilation of power-log profiles changes their form".into(),
            )),
        }
    }
}

fn check_point(fs: &[&TestFunction], x: &[f64], t: f64) -> Result<usize> {
    let d = x.len();
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    if !(t > 0.0 && t.is_finite()) {
        return domain("radius t must be positive");
    }
    if x.iter().any(|v| !v.is_finite()) {
        return domain("x must be finite");
    }
    for f in fs {
        if let Some(k) = f.dim() {
            if k != d {
                return domain(format!("test function lives in R^{k}, x in R^{d}"));
            }
        }
    }
    Ok(d)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Polar-angle breakpoints where |a − tω| crosses the jump radii of `f`,
/// for |a| = dist.
fn jump_angles(f: &TestFunction, dist: f64, t: f64) -> Vec<f64> {
    f.jumps()
        .into_iter()
        .filter_map(|r| {
            let c = (dist * dist + t * t - r * r) / (2.0 * dist * t);
            (c > -1.0 && c < 1.0).then(|| c.acos())
        })
        .collect()
}

fn grading(f: &TestFunction, closest: f64, decades: u32) -> u32 {
    match f.singular_radius() {
        Some(r) if closest < r => decades,
        _ => 0,
    }
}

fn nudge(r: f64) -> f64 {
    if r == 0.0 {
        SINGULAR_NUDGE
    } else {
        r
    }
}

/// ∫_{S^{d−1}} h(f.profile(|a − tω|)) dσ(ω) for |a| = dist: a one-dimensional
/// integral in the polar angle of ω from a.
fn radial_sphere_mean(
    f: &TestFunction,
    dist: f64,
    t: f64,
    d: usize,
    n: usize,
    decades: u32,
    h: impl Fn(f64) -> f64,
) -> f64 {
    if dist == 0.0 {
        return h(f.profile(nudge(t)));
    }
    let rule = polar_rule(
        d - 2,
        n,
        &jump_angles(f, dist, t),
        grading(f, (dist - t).abs(), decades),
    );
    let gap = (dist - t) * (dist - t);
    rule.iter()
        .map(|&(phi, w)| {
            let s = (0.5 * phi).sin();
            w * h(f.profile(nudge((gap + 4.0 * dist * t * s * s).sqrt())))
        })
        .sum()
}

fn sphere_mean_mc(
    f: &TestFunction,
    x: &[f64],
    t: f64,
    samples: usize,
    seed: u64,
    signed: bool,
) -> Estimate {
    let d = x.len();
    let stream = RngStream::new(seed);
    let parts = par::map_slice(&par::chunks(samples), |&(chunk, len)| {
        let mut rng = stream.substream(chunk as u64).rng();
        let mut w = vec![0.0; d];
        let mut y = vec![0.0; d];
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            uniform_sphere_into(&mut rng, &mut w);
            for k in 0..d {
                y[k] = x[k] - t * w[k];
            }
            let v = f.eval(&y);
            let v = if signed { v } else { v.abs() };
            s1 += v;
            s2 += v * v;
        }
        (s1, s2)
    });
    Estimate::from_sums(&parts, samples)
}

fn sphere_mean(
    f: &TestFunction,
    x: &[f64],
    t: f64,
    quad: &QuadratureSpec,
    signed: bool,
) -> Result<Estimate> {
    let d = check_point(&[f], x, t)?;
    quad.validate()?;
    if let TestFunction::Constant(c) = f {
        return Ok(Estimate::exact(if signed { *c } else { c.abs() }));
    }
    match quad.method {
        QuadMethod::MonteCarlo => Ok(sphere_mean_mc(f, x, t, quad.n_outer, quad.seed, signed)),
        QuadMethod::ProductSlicing => {
            let dist = norm(&sub(x, &f.center(d)));
            let h = |v: f64| if signed { v } else { v.abs() };
            let value = radial_sphere_mean(f, dist, t, d, quad.n_radial, quad.pole_decades, h);
            let coarse = radial_sphere_mean(
                f,
                dist,
                t,
                d,
                quad.n_radial.div_ceil(2),
                quad.pole_decades,
                h,
            );
            Ok(Estimate {
                value,
                error: (value - coarse).abs(),
            })
        }
    }
}

/// S_t|f|(x) = ∫_{S^{d−1}} |f(x − tω)| dσ(ω). The product method integrates
/// in the polar angle about x − c_f, the only variable the integrand sees.
pub fn spherical_average(
    f: &TestFunction,
    x: &[f64],
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    sphere_mean(f, x, t, quad, false)
}

/// Average of g over the fiber {x − tv : v ∈ N_u} given |a|² and a·u,
/// a = x − c_g: a one-dimensional integral in the angle β of the fiber point
/// from the direction of a's component orthogonal to u.
fn fiber_mean(g: &TestFunction, a2: f64, au: f64, t: f64, d: usize, n: usize, decades: u32) -> f64 {
    let along = au - 0.5 * t;
    let perp = (a2 - au * au).max(0.0).sqrt();
    let rad = HALF_SQRT3 * t;
    // |a − tv|² = (a·u − t/2)² + (|a_⊥| − (√3/2)t cos β)² + (3/4)t² sin²β.
    let dist = |beta: f64| {
        let s = (0.5 * beta).sin();
        let c = perp - rad + 2.0 * rad * s * s;
        let sb = beta.sin();
        nudge((along * along + c * c + rad * rad * sb * sb).sqrt())
    };
    if perp == 0.0 {
        return g.profile(nudge(along.hypot(rad)));
    }
    let base = a2 + t * t - t * au;
    let breaks: Vec<f64> = g
        .jumps()
        .into_iter()
        .filter_map(|r| {
            let c = (base - r * r) / (2.0 * rad * perp);
            (c > -1.0 && c < 1.0).then(|| c.acos())
        })
        .collect();
    let closest = along.hypot(perp - rad);
    let rule = polar_rule(d - 3, n, &breaks, grading(g, closest, decades));
    rule.iter().map(|&(b, w)| w * g.profile(dist(b))).sum()
}

struct Nodes {
    radial: usize,
    outer: usize,
    inner: usize,
    decades: u32,
}

fn t_product(f: &TestFunction, g: &TestFunction, x: &[f64], t: f64, nodes: &Nodes) -> f64 {
    let d = x.len();
    let af = sub(x, &f.center(d));
    let ag = sub(x, &g.center(d));
    let df = norm(&af);
    let a2 = dot(&ag, &ag);
    let pole: Vec<f64> = if df > 0.0 {
        af.iter().map(|v| v / df).collect()
    } else if a2 > 0.0 {
        ag.iter().map(|v| v / a2.sqrt()).collect()
    } else {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    };
    let ag_pole = dot(&ag, &pole);
    let ag_perp = (a2 - ag_pole * ag_pole).max(0.0).sqrt();
    // The integrand depends on u only through u·pole and u·a_g; when a_g is
    // parallel to the pole the azimuth drops out.
    let azimuth = if ag_perp > 1e-14 * a2.sqrt() && d >= 3 {
        polar_rule(d - 3, nodes.outer, &[], 0)
    } else {
        vec![(0.0, 1.0)]
    };
    let polar = if df > 0.0 {
        polar_rule(
            d - 2,
            nodes.radial,
            &jump_angles(f, df, t),
            grading(f, (df - t).abs(), nodes.decades),
        )
    } else {
        polar_rule(d - 2, nodes.radial, &[], 0)
    };
    let gap = (df - t) * (df - t);
    polar
        .iter()
        .map(|&(phi, wp)| {
            let s = (0.5 * phi).sin();
            let fv = f.profile(nudge((gap + 4.0 * df * t * s * s).sqrt()));
            if fv == 0.0 {
                return 0.0;
            }
            let (sp, cp) = phi.sin_cos();
            let inner: f64 = azimuth
                .iter()
                .map(|&(gamma, wg)| {
                    let au = ag_pole * cp + ag_perp * sp * gamma.cos();
                    wg * fiber_mean(g, a2, au, t, d, nodes.inner, nodes.decades)
                })
                .sum();
            wp * fv * inner
        })
        .sum()
}

fn t_mc(
    f: &TestFunction,
    g: &TestFunction,
    x: &[f64],
    t: f64,
    samples: usize,
    seed: u64,
) -> Estimate {
    let d = x.len();
    let stream = RngStream::new(seed);
    let parts = par::map_slice(&par::chunks(samples), |&(chunk, len)| {
        let mut rng = stream.substream(chunk as u64).rng();
        let (mut u, mut v) = (vec![0.0; d], vec![0.0; d]);
        let (mut yu, mut yv) = (vec![0.0; d], vec![0.0; d]);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            sample_manifold_into(&mut rng, &mut u, &mut v);
            for k in 0..d {
                yu[k] = x[k] - t * u[k];
                yv[k] = x[k] - t * v[k];
            }
            let val = f.eval(&yu) * g.eval(&yv);
            s1 += val;
            s2 += val * val;
        }
        (s1, s2)
    });
    Estimate::from_sums(&parts, samples)
}

/// T_t(f, g)(x). The product method integrates the fibered form
/// `∫_{S^{d−1}} f(x − tu) [avg over N_u of g(x − tv)] dσ(u)` and estimates
/// its error by halving every node count; Monte Carlo averages
/// f(x − tu)g(x − tv) over manifold samples.
///
/// Since μ is invariant under (u, v) ↦ (v, u), a constant factor reduces T
/// to a spherical mean of the other factor, and a point singularity is
/// always placed in the outer integral where the polar rule is graded.
pub fn apply_t(
    f: &TestFunction,
    g: &TestFunction,
    x: &[f64],
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    let d = check_point(&[f, g], x, t)?;
    quad.validate()?;
    match (f, g) {
        (TestFunction::Constant(a), TestFunction::Constant(b)) => {
            return Ok(Estimate::exact(a * b))
        }
        (TestFunction::Constant(c), other) | (other, TestFunction::Constant(c)) => {
            let m = sphere_mean(other, x, t, quad, true)?;
            return Ok(Estimate {
                value: c * m.value,
                error: c.abs() * m.error,
            });
        }
        _ => {}
    }
    if quad.method == QuadMethod::MonteCarlo {
        return Ok(t_mc(f, g, x, t, quad.n_outer, quad.seed));
    }
    if d < 3 {
        return Err(Error::Dimension { got: d, min: 3 });
    }
    let (f, g) = if g.is_singular() && !f.is_singular() {
        (g, f)
    } else {
        (f, g)
    };
    let nodes = |q: &QuadratureSpec| Nodes {
        radial: q.n_radial,
        outer: q.n_outer,
        inner: q.n_inner,
        decades: q.pole_decades,
    };
    let value = t_product(f, g, x, t, &nodes(quad));
    let coarse = t_product(f, g, x, t, &nodes(&quad.halved()));
    Ok(Estimate {
        value,
        error: (value - coarse).abs(),
    })
}

/// Geometric grid of dilation radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
}

impl MaximalGrid {
    pub fn new(t_min: f64, t_max: f64, n_t: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite()) || n_t < 2 {
            return domain("grid needs 0 < t_min < t_max and n_t >= 2");
        }
        Ok(Self { t_min, t_max, n_t })
    }

    /// `per_decade` points per factor of ten (rounded up to cover the range).
    pub fn per_decade(t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        let decades = (t_max / t_min).log10();
        Self::new(
            t_min,
            t_max,
            (decades * per_decade as f64).ceil() as usize + 1,
        )
    }

    /// Halves every spacing; the old points are kept exactly.
    pub fn refined(&self) -> Self {
        Self {
            n_t: 2 * (self.n_t - 1) + 1,
            ..*self
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let m = (self.n_t - 1) as f64;
        let ratio = self.t_max / self.t_min;
        (0..self.n_t)
            .map(|k| {
                if k + 1 == self.n_t {
                    self.t_max
                } else {
                    self.t_min * ratio.powf(k as f64 / m)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalValue {
    pub value: f64,
    pub t_star: f64,
    /// (t, |T_t(f, g)(x)|, error estimate) for every evaluated radius.
    pub profile: Vec<(f64, f64, f64)>,
}

/// max over the grid of |T_t(f, g)(x)|, a lower bound for the maximal
/// function. The grid is augmented by the radii |x − c| at which the sphere
/// passes through a singular center, where the supremum concentrates.
pub fn maximal_t(
    f: &TestFunction,
    g: &TestFunction,
    x: &[f64],
    grid: &MaximalGrid,
    quad: &QuadratureSpec,
) -> Result<MaximalValue> {
    let d = check_point(&[f, g], x, grid.t_min)?;
    let mut ts = grid.points();
    for h in [f, g] {
        if h.is_singular() {
            let r = norm(&sub(x, &h.center(d)));
            if r >= grid.t_min && r <= grid.t_max && !ts.contains(&r) {
                ts.push(r);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    let stream = RngStream::new(quad.seed);
    let values = par::map_indexed(ts.len(), |k| {
        let q = QuadratureSpec {
            seed: stream.substream(k as u64).key(),
            ..*quad
        };
        apply_t(f, g, x, ts[k], &q)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let profile: Vec<(f64, f64, f64)> = ts
        .iter()
        .zip(&values)
        .map(|(t, e)| (*t, e.value.abs(), e.error))
        .collect();
    let best = profile
        .iter()
        .copied()
        .fold((f64::NEG_INFINITY, grid.t_min), |acc, p| {
            if p.1 > acc.0 {
                (p.1, p.0)
            } else {
                acc
            }
        });
    Ok(MaximalValue {
        value: best.0,
        t_star: best.1,
        profile,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorizationReport {
    /// |T_t(f, g)(x)| and its error estimate.
    pub lhs: f64,
    pub lhs_error: f64,
    /// ‖g‖_∞ · S_t|f|(x)
    pub rhs: f64,
    /// ‖f‖_∞ · S_t|g|(x), when f is bounded.
    pub rhs_swapped: Option<f64>,
    pub holds: bool,
}

/// Checks |T_t(f, g)(x)| ≤ ‖g‖_∞ S_t|f|(x) (and the mirrored bound) up to
/// three error estimates.
pub fn majorization_check(
    f: &TestFunction,
    g: &TestFunction,
    x: &[f64],
    t: f64,
    quad: &QuadratureSpec,
) -> Result<MajorizationReport> {
    let g_sup = g
        .sup_norm()
        .ok_or_else(|| Error::Unsupported(format!("{} is unbounded", g.describe())))?;
    let lhs = apply_t(f, g, x, t, quad)?;
    let sf = spherical_average(f, x, t, quad)?;
    let rhs = g_sup * sf.value;
    let slack = 3.0 * (lhs.error + g_sup * sf.error) + 1e-14;
    let mut holds = lhs.value.abs() <= rhs + slack;
    let rhs_swapped = match f.sup_norm() {
        Some(f_sup) => {
            let sg = spherical_average(g, x, t, quad)?;
            holds &=
                lhs.value.abs() <= f_sup * sg.value + 3.0 * (lhs.error + f_sup * sg.error) + 1e-14;
            Some(f_sup * sg.value)
        }
        None => None,
    };
    Ok(MajorizationReport {
        lhs: lhs.value.abs(),
        lhs_error: lhs.error,
        rhs,
        rhs_swapped,
        holds,
    })
}

/// The frequency side `∫∫ μ̂(tξ, tη) f̂(ξ) ĝ(η) e^{2πi x·(ξ+η)} dξ dη` for
/// Gaussian f and g, by sampling ξ and η from |f̂| and |ĝ| (centered normal
/// laws with variance 1/(2πw²)) and averaging the remaining real factor.
pub fn fourier_side(
    f: &TestFunction,
    g: &TestFunction,
    x: &[f64],
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let d = check_point(&[f, g], x, t)?;
    let (
        TestFunction::Gaussian {
            center: cf,
            width: wf,
        },
        TestFunction::Gaussian {
            center: cg,
            width: wg,
        },
    ) = (f, g)
    else {
        return Err(Error::Unsupported(
            "the frequency side needs two Gaussians".into(),
        ));
    };
    if d < 3 {
        return Err(Error::Dimension { got: d, min: 3 });
    }
    if samples == 0 {
        return domain("samples must be >= 1");
    }
    let sf = 1.0 / (wf * (2.0 * PI).sqrt());
    let sg = 1.0 / (wg * (2.0 * PI).sqrt());
    let sh_f = sub(x, cf);
    let sh_g = sub(x, cg);
    let stream = RngStream::new(seed);
    let parts = par::map_slice(&par::chunks(samples), |&(chunk, len)| {
        let mut rng = stream.substream(chunk as u64).rng();
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            let xi: Vec<f64> = (0..d)
                .map(|_| {
                    sf * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                })
                .collect();
            let eta: Vec<f64> = (0..d)
                .map(|_| {
                    sg * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                })
                .collect();
            let phase = 2.0 * PI * (dot(&sh_f, &xi) + dot(&sh_g, &eta));
            let fp = FrequencyPair::new(
                xi.iter().map(|v| t * v).collect(),
                eta.iter().map(|v| t * v).collect(),
            )
            .expect("finite frequencies");
            let v = mu_hat_closed(&fp).expect("d >= 3") * phase.cos();
            s1 += v;
            s2 += v * v;
        }
        (s1, s2)
    });
    Ok(Estimate::from_sums(&parts, samples))
}

/// Lower-bound profile `R^{−d(1 + 1/q − 1/p) − ε}(ln R)^{−2/q}` for the
/// divergent pair at |x| = R.
pub fn counterexample_profile(d: usize, p: f64, q: f64, eps: f64, r: f64) -> f64 {
    r.powf(-(d as f64) * (1.0 + 1.0 / q - 1.0 / p) - eps) * r.ln().powf(-2.0 / q)
}

fn ser_ratio<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// a·x + b·y ≤ c, or < c when strict, in the (1/p, 1/q) plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfPlane {
    #[serde(serialize_with = "ser_ratio")]
    pub a: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub b: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub c: BigRational,
    pub strict: bool,
}

impl HalfPlane {
    fn new(a: i64, b: i64, c: BigRational, strict: bool) -> Self {
        Self {
            a: BigRational::from_integer(a.into()),
            b: BigRational::from_integer(b.into()),
            c,
            strict,
        }
    }

    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        let lhs = &self.a * x + &self.b * y;
        if self.strict {
            lhs < self.c
        } else {
            lhs <= self.c
        }
    }
}

/// Boundedness data for the maximal operator in the (1/p, 1/q) plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalRegion {
    pub d: usize,
    /// Triangle {x, y ≥ 0, x + y < (d−1)/d} reached by interpolation.
    pub interpolation: Vec<HalfPlane>,
    /// Square [0, (d−1)/d)² outside of which the operator is unbounded.
    pub necessity: Vec<HalfPlane>,
}

impl MaximalRegion {
    pub fn in_interpolation(&self, x: &BigRational, y: &BigRational) -> bool {
        self.interpolation.iter().all(|h| h.contains(x, y))
    }

    pub fn in_necessity_square(&self, x: &BigRational, y: &BigRational) -> bool {
        self.necessity.iter().all(|h| h.contains(x, y))
    }
}

pub fn maximal_region(d: usize) -> Result<MaximalRegion> {
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    let edge = BigRational::new((d as i64 - 1).into(), (d as i64).into());
    let zero = BigRational::from_integer(0.into());
    Ok(MaximalRegion {
        d,
        interpolation: vec![
            HalfPlane::new(-1, 0, zero.clone(), false),
            HalfPlane::new(0, -1, zero.clone(), false),
            HalfPlane::new(1, 1, edge.clone(), true),
        ],
        necessity: vec![
            HalfPlane::new(-1, 0, zero.clone(), false),
            HalfPlane::new(0, -1, zero, false),
            HalfPlane::new(1, 0, edge.clone(), true),
            HalfPlane::new(0, 1, edge, true),
        ],
    })
}

/// Exact value of a decimal or fractional coordinate such as `0.3` or `4/5`.
pub fn parse_coordinate(s: &str) -> Result<BigRational> {
    if s.trim()
        .trim_start_matches('0')
        .trim_start_matches('.')
        .trim_start_matches('0')
        .is_empty()
    {
        return Ok(BigRational::from_integer(0.into()));
    }
    let r = crate::decomposition::parse_reciprocal(s)?;
    if r.is_positive() {
        Ok(r.recip())
    } else {
        Err(Error::Parse(format!("not a coordinate: {s:?}")))
    }
}
