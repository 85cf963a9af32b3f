use super::cutoffs::CutoffProfile;
use crate::error::{Error, Result};
use crate::geometry::uniform_sphere_into;
use crate::measure::{mu_hat_closed, FrequencyPair};
use crate::par;
use crate::quadrature::GaussLegendre;
use crate::rng::RngStream;
use crate::special::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Index (i, j, k) of a multiplier piece: joint-norm scale i, ratio scale j,
/// angle scale k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl DyadicIndex {
    /// Accepts (j < i, k ≤ ⌊(i−j)/2⌋), (j = i, k = 0) and (j = i+1, k = 0, i ≥ 1).
    pub fn new(i: u32, j: u32, k: u32) -> Result<Self> {
        let valid = if j < i {
            k <= (i - j) / 2
        } else if j == i {
            k == 0
        } else {
            j == i + 1 && k == 0 && i >= 1
        };
        if valid {
            Ok(Self { i, j, k })
        } else {
            Err(Error::InvalidIndex { i, j, k })
        }
    }

    /// All valid indices at scale i.
    pub fn at_scale(i: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for j in 0..i {
            for k in 0..=(i - j) / 2 {
                out.push(Self { i, j, k });
            }
        }
        out.push(Self { i, j: i, k: 0 });
        if i >= 1 {
            out.push(Self { i, j: i + 1, k: 0 });
        }
        out
    }

    /// ⌊(i−j)/2⌋, the deepest angle scale for j < i.
    pub fn angle_depth(&self) -> u32 {
        self.i.saturating_sub(self.j) / 2
    }
}

/// φ_i·ψ·ρ factor of the piece: ψ_j·ρ_k (ρ^K at k = K) for j < i, ψ_i at
/// j = i (ψ^0 ≡ 1 when i = 0) and ψ^{i+1} at j = i + 1. These factors sum to
/// φ_i over the indices at scale i.
pub fn cutoff_weight(idx: DyadicIndex, fp: &FrequencyPair, profile: &CutoffProfile) -> f64 {
    let phi = profile.phi(idx.i, fp);
    if phi == 0.0 {
        return 0.0;
    }
    let ratio_angle = if idx.j < idx.i {
        let psi = profile.psi(idx.j, fp);
        if psi == 0.0 {
            return 0.0;
        }
        let rho = if idx.k < idx.angle_depth() {
            profile.rho(idx.k, fp)
        } else {
            profile.rho_upper(idx.k, fp)
        };
        psi * rho
    } else if idx.j == idx.i {
        if idx.i == 0 {
            1.0
        } else {
            profile.psi(idx.i, fp)
        }
    } else {
        profile.psi_upper(idx.i + 1, fp)
    };
    phi * ratio_angle
}

/// m_{i,j,k}(ξ, η) = μ̂(ξ, η)·cutoff_weight; μ̂ is only evaluated on the support.
pub fn m_piece(idx: DyadicIndex, fp: &FrequencyPair, profile: &CutoffProfile) -> Result<f64> {
    DyadicIndex::new(idx.i, idx.j, idx.k)?;
    let w = cutoff_weight(idx, fp, profile);
    if w == 0.0 {
        return Ok(0.0);
    }
    Ok(w * mu_hat_closed(fp)?)
}

/// Volume of the radius-r ball in R^d.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0) * r.powi(d as i32)
}

/// Probability that two independent uniform directions in R^d satisfy
/// lo ≤ |sin θ| ≤ hi, from `∫ r^{d−2}/√(1−r²) dr` over the band (r = sin θ).
pub fn angular_fraction(d: usize, lo: f64, hi: f64) -> f64 {
    let lo = lo.clamp(0.0, 1.0);
    let hi = hi.clamp(0.0, 1.0);
    if hi <= lo {
        return 0.0;
    }
    // r = sin φ removes the endpoint singularity.
    let gl = GaussLegendre::cached(64);
    let m = d as i32 - 2;
    let band = gl.integrate(lo.asin(), hi.asin(), |p| p.sin().powi(m));
    let full = gl.integrate(0.0, 0.5 * PI, |p| p.sin().powi(m));
    band / full
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub index: DyadicIndex,
    pub estimate: f64,
    pub std_error: f64,
    /// 2^{id}·2^{(i−j)d}·2^{−k(d−1)}
    pub model: f64,
}

impl VolumeEstimate {
    pub fn ratio(&self) -> f64 {
        self.estimate / self.model
    }
}

/// Monte Carlo measure of
/// S_{i,j,k} = {|ξ| ≤ 2·2^i, |η| ≤ 4·2^{i−j}, 2^{−k−1} ≤ |sin θ| ≤ 2^{−k+1}}.
pub fn support_volume(
    idx: DyadicIndex,
    d: usize,
    n_mc: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    DyadicIndex::new(idx.i, idx.j, idx.k)?;
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    if n_mc == 0 {
        return Err(Error::Domain("n_mc must be >= 1".into()));
    }
    let (i, j, k) = (idx.i as i32, idx.j as i32, idx.k as i32);
    let r_xi = 2f64.powi(i + 1);
    let r_eta = 2f64.powi(i - j + 2);
    let lo = 2f64.powi(-k - 1);
    let hi = 2f64.powi(-k + 1);
    let stream = RngStream::new(seed);
    let hits: usize = par::map_slice(&par::chunks(n_mc), |&(chunk, len)| {
        use rand::Rng as _;
        let mut rng = stream.substream(chunk as u64).rng();
        let mut a = vec![0.0; d];
        let mut b = vec![0.0; d];
        let mut count = 0usize;
        for _ in 0..len {
            uniform_sphere_into(&mut rng, &mut a);
            uniform_sphere_into(&mut rng, &mut b);
            let rx = r_xi * rng.random::<f64>().powf(1.0 / d as f64);
            let re = r_eta * rng.random::<f64>().powf(1.0 / d as f64);
            let xi: Vec<f64> = a.iter().map(|x| rx * x).collect();
            let eta: Vec<f64> = b.iter().map(|x| re * x).collect();
            let s = FrequencyPair::new(xi, eta)
                .map(|fp| fp.sin_theta)
                .unwrap_or(0.0);
            if (lo..=hi).contains(&s) {
                count += 1;
            }
        }
        count
    })
    .into_iter()
    .sum();
    let p = hits as f64 / n_mc as f64;
    let scale = ball_volume(d, r_xi) * ball_volume(d, r_eta);
    let model = 2f64.powi(i * d as i32 + (i - j) * d as i32 - k * (d as i32 - 1));
    Ok(VolumeEstimate {
        index: idx,
        estimate: scale * p,
        std_error: scale * (p * (1.0 - p) / n_mc as f64).sqrt(),
        model,
    })
}
