//! The Fourier transform μ̂(ξ, η) of the triangle surface measure, by Monte
//! Carlo over the manifold and by the one-dimensional Bessel integral, plus
//! the decay-bound machinery.

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, sample_manifold_into, HALF_SQRT3};
use crate::par;
use crate::quadrature::GaussLegendre;
use crate::rng::RngStream;
use crate::special::SphereFt;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A frequency pair (ξ, η) ∈ R^d × R^d with its rotation invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPair {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub norm_xi: f64,
    pub norm_eta: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub joint_norm: f64,
}

impl FrequencyPair {
    /// When ξ = 0 or η = 0 the angle is taken to be 0 (sin θ = 0, cos θ = 1).
    pub fn new(xi: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        if xi.len() != eta.len() {
            return Err(Error::Domain(format!(
                "xi has {} components, eta has {}",
                xi.len(),
                eta.len()
            )));
        }
        if xi.is_empty() {
            return Err(Error::Dimension { got: 0, min: 1 });
        }
        if xi.iter().chain(&eta).any(|x| !x.is_finite()) {
            return Err(Error::Domain("frequencies must be finite".into()));
        }
        let norm_xi = norm(&xi);
        let norm_eta = norm(&eta);
        let (cos_theta, sin_theta) = if norm_xi == 0.0 || norm_eta == 0.0 {
            (1.0, 0.0)
        } else {
            // Lagrange: |ξ|²|η|² sin²θ = Σ_{a<b} (ξ_a η_b − ξ_b η_a)², which
            // stays accurate for nearly parallel pairs.
            let mut cross = 0.0;
            for a in 0..xi.len() {
                for b in a + 1..xi.len() {
                    let m = xi[a] * eta[b] - xi[b] * eta[a];
                    cross += m * m;
                }
            }
            let s = (cross.sqrt() / (norm_xi * norm_eta)).min(1.0);
            let c = (dot(&xi, &eta) / (norm_xi * norm_eta)).clamp(-1.0, 1.0);
            let r = c.hypot(s);
            (c / r, s / r)
        };
        Ok(Self {
            joint_norm: norm_xi.hypot(norm_eta),
            xi,
            eta,
            norm_xi,
            norm_eta,
            cos_theta,
            sin_theta,
        })
    }

    /// Canonical representative ξ = |ξ|(cos θ e₁ + sin θ e₂), η = |η| e₁.
    pub fn from_invariants(d: usize, norm_xi: f64, norm_eta: f64, cos_theta: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension { got: d, min: 2 });
        }
        if norm_xi < 0.0 || norm_eta < 0.0 || !(-1.0..=1.0).contains(&cos_theta) {
            return Err(Error::Domain("invalid frequency invariants".into()));
        }
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        let mut xi = vec![0.0; d];
        let mut eta = vec![0.0; d];
        xi[0] = norm_xi * cos_theta;
        xi[1] = norm_xi * sin_theta;
        eta[0] = norm_eta;
        Self::new(xi, eta)
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn swapped(&self) -> Self {
        Self {
            xi: self.eta.clone(),
            eta: self.xi.clone(),
            norm_xi: self.norm_eta,
            norm_eta: self.norm_xi,
            ..self.clone()
        }
    }
}

/// A complex Monte Carlo mean with componentwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

impl ComplexEstimate {
    /// Standard error of the complex mean, √(SE_re² + SE_im²).
    pub fn se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }

    /// |estimate − (re + i·im)|.
    pub fn distance_to(&self, re: f64, im: f64) -> f64 {
        (self.re - re).hypot(self.im - im)
    }
}

/// μ̂(ξ, η) = E[exp(−2πi(ξ·u + η·v))] over Haar-distributed (u, v) ∈ M.
pub fn mu_hat_mc(fp: &FrequencyPair, n_samples: usize, seed: u64) -> Result<ComplexEstimate> {
    let d = fp.dim();
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be >= 1".into()));
    }
    let stream = RngStream::new(seed);
    let parts = par::map_slice(&par::chunks(n_samples), |&(chunk, len)| {
        let mut rng = stream.substream(chunk as u64).rng();
        let mut u = vec![0.0; d];
        let mut v = vec![0.0; d];
        let mut s = [0.0f64; 4];
        for _ in 0..len {
            sample_manifold_into(&mut rng, &mut u, &mut v);
            let phase = -2.0 * PI * (dot(&fp.xi, &u) + dot(&fp.eta, &v));
            let (im, re) = phase.sin_cos();
            s[0] += re;
            s[1] += re * re;
            s[2] += im;
            s[3] += im * im;
        }
        s
    });
    let n = n_samples as f64;
    let mut t = [0.0f64; 4];
    for p in &parts {
        for (a, b) in t.iter_mut().zip(p) {
            *a += b;
        }
    }
    let se = |s1: f64, s2: f64| {
        if n_samples < 2 {
            return 0.0;
        }
        let m = s1 / n;
        (((s2 - n * m * m) / (n - 1.0)).max(0.0) / n).sqrt()
    };
    Ok(ComplexEstimate {
        re: t[0] / n,
        im: t[2] / n,
        se_re: se(t[0], t[1]),
        se_im: se(t[2], t[3]),
    })
}

/// Default Gauss–Legendre count for the closed form: 16 + 4⌈|(ξ, η)|⌉.
pub fn default_radial_nodes(fp: &FrequencyPair) -> usize {
    16 + 4 * fp.joint_norm.ceil() as usize
}

/// Closed form with the default node count.
pub fn mu_hat_closed(fp: &FrequencyPair) -> Result<f64> {
    mu_hat_closed_with(fp, default_radial_nodes(fp))
}

/// Evaluates
/// `μ̂ = C_d ∫_{−π/2}^{π/2} cos(2π cos φ (|ξ|cos θ + |η|/2)) σ̂_{d−2}(|ξ| |sin θ| sin φ)
///      σ̂_{d−2}((√3/2)|η| sin φ) sin^{d−2}φ dφ`
/// where C_d = 1/B((d−1)/2, 1/2) makes μ̂(0, 0) = 1. The constant is taken
/// from the rule itself (its value on sin^{d−2}), so the calibration holds to
/// roundoff at every node count.
pub fn mu_hat_closed_with(fp: &FrequencyPair, n_radial: usize) -> Result<f64> {
    let d = fp.dim();
    if d < 3 {
        return Err(Error::Dimension { got: d, min: 3 });
    }
    if n_radial < 8 {
        return Err(Error::Domain("n_radial must be >= 8".into()));
    }
    let ft = SphereFt::new(d - 2)?;
    let along = fp.norm_xi * fp.cos_theta + 0.5 * fp.norm_eta;
    let across_xi = fp.norm_xi * fp.sin_theta;
    let across_eta = HALF_SQRT3 * fp.norm_eta;
    let gl = GaussLegendre::cached(n_radial);
    let (mut total, mut mass) = (0.0, 0.0);
    for (phi, w) in gl.mapped(0.0, 0.5 * PI) {
        let (r, z) = phi.sin_cos();
        let bx = if across_xi == 0.0 {
            1.0
        } else {
            ft.eval(r * across_xi)
        };
        let be = if across_eta == 0.0 {
            1.0
        } else {
            ft.eval(r * across_eta)
        };
        let wr = w * r.powi(d as i32 - 2);
        mass += wr;
        total += wr * (2.0 * PI * z * along).cos() * bx * be;
    }
    Ok(total / mass)
}

/// Right side of the key decay estimate with constant 1:
/// `(1 + min{|ξ|,|η|}|sin θ|)^{−(d−2)/2} (1 + |(ξ,η)|)^{−(d−2)/2}`.
pub fn decay_bound(fp: &FrequencyPair) -> f64 {
    let e = -(fp.dim() as f64 - 2.0) / 2.0;
    let m = fp.norm_xi.min(fp.norm_eta) * fp.sin_theta;
    (1.0 + m).powf(e) * (1.0 + fp.joint_norm).powf(e)
}

/// sup over the grid of |μ̂| / decay_bound.
pub fn fit_constant(grid: &[FrequencyPair]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Domain("calibration grid is empty".into()));
    }
    let ratios = par::map_slice(grid, |fp| {
        mu_hat_closed(fp).map(|m| m.abs() / decay_bound(fp))
    });
    ratios
        .into_iter()
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
}

/// A ray (R ξ̂, R ρ η̂), R > 0, in frequency space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub xi_dir: Vec<f64>,
    pub eta_dir: Vec<f64>,
    pub ratio: f64,
}

impl Ray {
    pub fn new(xi_dir: Vec<f64>, eta_dir: Vec<f64>, ratio: f64) -> Result<Self> {
        if xi_dir.len() != eta_dir.len() {
            return Err(Error::Domain("ray directions differ in dimension".into()));
        }
        if (norm(&xi_dir) - 1.0).abs() > 1e-10 {
            return Err(Error::Domain("xi direction must be a unit vector".into()));
        }
        if ratio < 0.0 || !ratio.is_finite() {
            return Err(Error::Domain("ratio |eta|/|xi| must be >= 0".into()));
        }
        if ratio > 0.0 && (norm(&eta_dir) - 1.0).abs() > 1e-10 {
            return Err(Error::Domain("eta direction must be a unit vector".into()));
        }
        Ok(Self {
            xi_dir,
            eta_dir,
            ratio,
        })
    }

    fn unit(d: usize, k: usize) -> Vec<f64> {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        e
    }

    /// η = 0, ξ along e₁.
    pub fn eta_zero(d: usize) -> Result<Self> {
        Self::new(Self::unit(d, 0), Self::unit(d, 1), 0.0)
    }

    /// |ξ| = |η|, θ = π/2.
    pub fn orthogonal(d: usize) -> Result<Self> {
        Self::new(Self::unit(d, 0), Self::unit(d, 1), 1.0)
    }

    /// η = ξ.
    pub fn parallel(d: usize) -> Result<Self> {
        Self::new(Self::unit(d, 0), Self::unit(d, 0), 1.0)
    }

    pub fn dim(&self) -> usize {
        self.xi_dir.len()
    }

    pub fn at(&self, r: f64) -> Result<FrequencyPair> {
        FrequencyPair::new(
            self.xi_dir.iter().map(|x| r * x).collect(),
            self.eta_dir.iter().map(|x| r * self.ratio * x).collect(),
        )
    }

    /// Longest oscillation period in R among the three phases of the
    /// closed-form integrand (the along-axis cosine and the two kernels).
    pub fn period(&self) -> Result<f64> {
        let fp = self.at(1.0)?;
        let freqs = [
            (fp.norm_xi * fp.cos_theta + 0.5 * fp.norm_eta).abs(),
            fp.norm_xi * fp.sin_theta,
            HALF_SQRT3 * fp.norm_eta,
        ];
        let slowest = freqs
            .iter()
            .copied()
            .filter(|f| *f > 1e-12)
            .fold(f64::INFINITY, f64::min);
        Ok(if slowest.is_finite() {
            1.0 / slowest
        } else {
            1.0
        })
    }
}

/// Power-law fit of the upper envelope of |μ̂| along a ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub direction: Ray,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub envelope: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Slope of decay_bound over the same envelope radii.
    pub bound_slope: f64,
}

/// Geometric grid of `n` radii from `r_min` to `r_max`.
pub fn geometric_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r_min];
    }
    let ratio = r_max / r_min;
    (0..n)
        .map(|k| r_min * ratio.powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Radii count putting at least 16 grid points in one period at `r_max`.
pub fn recommended_radii(ray: &Ray, r_min: f64, r_max: f64) -> Result<usize> {
    let step = ray.period()? / 16.0;
    Ok(((r_max / r_min).ln() / (1.0 + step / r_max).ln()).ceil() as usize + 1)
}

/// Least-squares line through `(x, y)`; returns (slope, intercept, rms residual).
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Maxima of `values` over consecutive windows of length at least one period
/// (growing to a tenth of a decade at large R).
pub fn envelope(radii: &[f64], values: &[f64], period: f64) -> Vec<(f64, f64)> {
    let grow = 10f64.powf(0.1) - 1.0;
    let mut out = Vec::new();
    let mut k = 0;
    while k < radii.len() {
        let end = radii[k] + period.max(radii[k] * grow);
        let mut best = (radii[k], values[k]);
        let mut count = 0;
        while k < radii.len() && radii[k] < end {
            if values[k] > best.1 {
                best = (radii[k], values[k]);
            }
            count += 1;
            k += 1;
        }
        if count >= 3 && best.1 > 0.0 && k < radii.len() {
            out.push(best);
        }
    }
    out
}

/// Fits log(envelope |μ̂|) against log R on a geometric grid along `ray`.
pub fn decay_fit(ray: &Ray, r_min: f64, r_max: f64, n_radii: usize) -> Result<DecayFit> {
    if ray.dim() < 3 {
        return Err(Error::Dimension {
            got: ray.dim(),
            min: 3,
        });
    }
    if r_min < 2.0 || r_max <= r_min || n_radii < 2 {
        return Err(Error::Domain(
            "decay_fit needs 2 <= r_min < r_max and n_radii >= 2".into(),
        ));
    }
    let radii = geometric_grid(r_min, r_max, n_radii);
    let values = par::map_slice(&radii, |&r| {
        ray.at(r).and_then(|fp| mu_hat_closed(&fp)).map(f64::abs)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let env = envelope(&radii, &values, ray.period()?);
    if env.len() < 5 {
        return Err(Error::EnvelopeFit {
            found: env.len(),
            needed: 5,
        });
    }
    let logs: Vec<(f64, f64)> = env.iter().map(|(r, v)| (r.ln(), v.ln())).collect();
    let (slope, intercept, residual) = least_squares(&logs);
    let bound_logs = env
        .iter()
        .map(|(r, _)| ray.at(*r).map(|fp| (r.ln(), decay_bound(&fp).ln())))
        .collect::<Result<Vec<_>>>()?;
    let (bound_slope, _, _) = least_squares(&bound_logs);
    Ok(DecayFit {
        direction: ray.clone(),
        radii,
        values,
        envelope: env,
        slope,
        intercept,
        residual,
        bound_slope,
    })
}
