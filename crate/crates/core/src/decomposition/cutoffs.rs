use crate::error::{domain, Result};
use crate::measure::FrequencyPair;
use serde::{Deserialize, Serialize};

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1, `e^{−1/t} / (e^{−1/t} + e^{−1/(1−t)})` between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// The three sandwiched cutoffs and the partitions built from them:
///
/// * `χ_{B(0,1)} ≤ φ₀ ≤ χ_{B(0,2)}` with φ₀(z) = 1 − S(|z| − 1),
/// * `χ_{[0,1]} ≤ ψ* ≤ χ_{[−ε,1+ε]}`,
/// * `χ_{[−1,1]} ≤ ρ* ≤ χ_{[−2,2]}` with ρ*(t) = 1 − S(|t| − 1),
///
/// where S is [`smooth_step`]. Ratio logarithms are base 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub epsilon: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self { epsilon: 0.1 }
    }
}

impl CutoffProfile {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return domain("epsilon must lie in (0, 1/2)");
        }
        Ok(Self { epsilon })
    }

    pub fn phi0(&self, r: f64) -> f64 {
        1.0 - smooth_step(r - 1.0)
    }

    pub fn psi_star(&self, t: f64) -> f64 {
        let e = self.epsilon;
        smooth_step((t + e) / e) * smooth_step((1.0 + e - t) / e)
    }

    pub fn rho_star(&self, t: f64) -> f64 {
        1.0 - smooth_step(t.abs() - 1.0)
    }

    /// ψ*_l(t) = ψ*(t − l) / Σ_m ψ*(t − m).
    pub fn psi_star_j(&self, l: i64, t: f64) -> f64 {
        let base = t.floor() as i64;
        let denom: f64 = (base - 1..=base + 1)
            .map(|m| self.psi_star(t - m as f64))
            .sum();
        self.psi_star(t - l as f64) / denom
    }

    /// φ_i on the joint norm: φ₀ for i = 0, φ₀(2^{−i}·) − φ₀(2^{−(i−1)}·) otherwise.
    pub fn phi(&self, i: u32, fp: &FrequencyPair) -> f64 {
        let r = fp.joint_norm;
        if i == 0 {
            self.phi0(r)
        } else {
            self.phi0(r / 2f64.powi(i as i32)) - self.phi0(r / 2f64.powi(i as i32 - 1))
        }
    }

    /// log₂|η| − log₂|ξ|, or None on the axes.
    pub fn log_ratio(fp: &FrequencyPair) -> Option<f64> {
        (fp.norm_xi > 0.0 && fp.norm_eta > 0.0).then(|| fp.norm_eta.log2() - fp.norm_xi.log2())
    }

    /// ψ_j = ψ*_j(L) + ψ*_{−j−1}(L): the ratio min/max lies in
    /// [2^{−ε}2^{−j−1}, 2^{ε}2^{−j}] on its support. Zero on the axes.
    pub fn psi(&self, j: u32, fp: &FrequencyPair) -> f64 {
        match Self::log_ratio(fp) {
            None => 0.0,
            Some(l) => self.psi_star_j(j as i64, l) + self.psi_star_j(-(j as i64) - 1, l),
        }
    }

    /// ψ^j = Σ_{k ≥ j} ψ_k = 1 − Σ_{l=−j}^{j−1} ψ*_l(L); identically 1 where
    /// the ratio is at most 2^{−ε}2^{−j}, and on the axes.
    pub fn psi_upper(&self, j: u32, fp: &FrequencyPair) -> f64 {
        let Some(l) = Self::log_ratio(fp) else {
            return 1.0;
        };
        let j = j as i64;
        let base = l.floor() as i64;
        let covered: f64 = (base - 1..=base + 1)
            .filter(|m| (-j..j).contains(m))
            .map(|m| self.psi_star_j(m, l))
            .sum();
        (1.0 - covered).max(0.0)
    }

    /// ρ^k = ρ*(4^k sin²θ): identically 1 where |sin θ| ≤ 2^{−k}.
    pub fn rho_upper(&self, k: u32, fp: &FrequencyPair) -> f64 {
        let s2 = fp.sin_theta * fp.sin_theta;
        self.rho_star(4f64.powi(k as i32) * s2)
    }

    /// ρ_k = ρ^k − ρ^{k+1} (with ρ^0 ≡ 1), supported where
    /// 2^{−k−1} ≤ |sin θ| ≤ 2^{−k+1/2}.
    pub fn rho(&self, k: u32, fp: &FrequencyPair) -> f64 {
        let upper = if k == 0 { 1.0 } else { self.rho_upper(k, fp) };
        upper - self.rho_upper(k + 1, fp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(nx: f64, ne: f64, c: f64) -> FrequencyPair {
        FrequencyPair::from_invariants(5, nx, ne, c).unwrap()
    }

    #[test]
    fn step_and_sandwich() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let p = CutoffProfile::default();
        for k in 0..=400 {
            let t = -3.0 + 6.0 * k as f64 / 400.0;
            let r = t.abs();
            if r <= 1.0 {
                assert_eq!(p.phi0(r), 1.0);
                assert_eq!(p.rho_star(t), 1.0);
            }
            if r >= 2.0 {
                assert_eq!(p.phi0(r), 0.0);
                assert_eq!(p.rho_star(t), 0.0);
            }
            if (0.0..=1.0).contains(&t) {
                assert_eq!(p.psi_star(t), 1.0);
            }
            if !(-0.1..=1.1).contains(&t) {
                assert_eq!(p.psi_star(t), 0.0);
            }
        }
        assert!(CutoffProfile::new(0.5).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = CutoffProfile::default();
        let at = |r: f64| pair(r * 0.6, r * 0.8, 0.3);
        assert_eq!(p.phi(3, &at(3.0)), 0.0);
        let fp = at(5.0);
        assert!((p.phi(2, &fp) + p.phi(3, &fp) - 1.0).abs() < 1e-15);
        for r in [0.0, 0.5, 3.3, 17.0, 63.9] {
            let fp = at(r);
            let s: f64 = (0..=7).map(|i| p.phi(i, &fp)).sum();
            assert!((s - 1.0).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn psi_partition() {
        let p = CutoffProfile::default();
        let fp = pair(2.0, 2.0, 0.2);
        assert!((p.psi(0, &fp) - 1.0).abs() < 1e-15);
        let fp = pair(1.0, 2f64.powi(-10), 0.2);
        for j in 0..8 {
            assert_eq!(p.psi(j, &fp), 0.0);
        }
        for ratio in [0.9, 0.5, 0.3, 0.126, 2f64.powf(-3.05), 1.0 / 64.0] {
            for fp in [pair(1.0, ratio, 0.4), pair(ratio, 1.0, -0.4)] {
                let total: f64 = (0..12).map(|j| p.psi(j, &fp)).sum();
                assert!((total - 1.0).abs() < 1e-14);
                for j in 0..12 {
                    let tail: f64 = (j..12).map(|k| p.psi(k, &fp)).sum();
                    assert!((p.psi_upper(j, &fp) - tail).abs() < 1e-14);
                    let lo = 2f64.powf(-0.1 - j as f64 - 1.0);
                    let hi = 2f64.powf(0.1 - j as f64);
                    if p.psi(j, &fp) > 0.0 {
                        assert!(ratio >= lo * (1.0 - 1e-12) && ratio <= hi * (1.0 + 1e-12));
                    }
                    if ratio <= 2f64.powf(-0.1 - j as f64) {
                        assert_eq!(p.psi_upper(j, &fp), 1.0);
                    }
                }
            }
        }
        let axis = pair(3.0, 0.0, 1.0);
        assert_eq!(p.psi_upper(4, &axis), 1.0);
        assert_eq!(p.psi(4, &axis), 0.0);
    }

    #[test]
    fn rho_partition() {
        let p = CutoffProfile::default();
        let perp = pair(1.0, 1.0, 0.0);
        assert_eq!(p.rho(0, &perp), 1.0);
        for k in 1..6 {
            assert_eq!(p.rho(k, &perp), 0.0);
        }
        for k in 1..6u32 {
            let s = 2f64.powi(-(k as i32));
            let fp = pair(1.0, 1.0, (1.0 - s * s).sqrt());
            let sum = p.rho(k - 1, &fp) + p.rho(k, &fp) + p.rho(k + 1, &fp);
            assert!((sum - 1.0).abs() < 1e-12);
        }
        let par = pair(1.0, 2.0, 1.0);
        assert_eq!(p.rho_upper(9, &par), 1.0);
        for k in 0..9 {
            assert_eq!(p.rho(k, &par), 0.0);
        }
    }
}
