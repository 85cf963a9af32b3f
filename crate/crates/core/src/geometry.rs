//! Sampling and quadrature on spheres and SO(d), and the parameterization of
//! the triangle manifold M = {(u, v) : |u| = |v| = |u − v| = 1}.

use crate::error::{domain, Error, Result};
use crate::par;
use crate::quadrature::{polar_rule, Estimate, GaussLegendre};
use crate::rng::{Rng, RngStream};
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub(crate) const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A d×d rotation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.matrix.column(j).iter().copied().collect()
    }

    /// max |RᵀR − I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim();
        let g = self.matrix.transpose() * &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            matrix: &self.matrix * &other.matrix,
        }
    }
}

fn gaussian_columns(rng: &mut Rng, d: usize, cols: usize) -> Vec<f64> {
    (0..d * cols).map(|_| StandardNormal.sample(rng)).collect()
}

/// Haar-distributed rotation: QR of a standard Gaussian matrix with the
/// diagonal of R made positive, then the last column negated if det = −1.
pub fn haar_rotation(rng: &mut Rng, d: usize) -> Result<Rotation> {
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    loop {
        let g = DMatrix::from_vec(d, d, gaussian_columns(rng, d, d));
        let qr = g.qr();
        let r = qr.r();
        if (0..d).any(|i| r[(i, i)].abs() < 1e-300) {
            continue;
        }
        let mut q = qr.q();
        for i in 0..d {
            if r[(i, i)] < 0.0 {
                q.column_mut(i).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(d - 1).neg_mut();
        }
        return Ok(Rotation { matrix: q });
    }
}

/// The first two columns of a Haar rotation, drawn from exactly the same
/// Gaussian stream prefix that [`haar_rotation`] would consume for them.
/// Gram–Schmidt on two columns reproduces the sign-corrected QR factor, so
/// this is the same random variable at a fraction of the cost.
pub(crate) fn haar_frame_into(rng: &mut Rng, a: &mut [f64], b: &mut [f64]) {
    let d = a.len();
    loop {
        for x in a.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        for x in b.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        let na = norm(a);
        if na < 1e-300 {
            continue;
        }
        a.iter_mut().for_each(|x| *x /= na);
        if d == 2 {
            // SO(2): the second column is the first turned by +π/2.
            b[0] = -a[1];
            b[1] = a[0];
            return;
        }
        let p = dot(a, b);
        b.iter_mut().zip(a.iter()).for_each(|(y, x)| *y -= p * x);
        let nb = norm(b);
        if nb < 1e-300 {
            continue;
        }
        b.iter_mut().for_each(|x| *x /= nb);
        return;
    }
}

/// A point (u, v) of the triangle manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSample {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl ManifoldSample {
    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// Fills `(u, v) = (Re₁, R(e₁/2 + (√3/2)e₂))` for a Haar rotation R.
pub(crate) fn sample_manifold_into(rng: &mut Rng, u: &mut [f64], v: &mut [f64]) {
    haar_frame_into(rng, u, v);
    for (vi, ui) in v.iter_mut().zip(u.iter()) {
        *vi = 0.5 * ui + HALF_SQRT3 * *vi;
    }
}

/// Draws a point of M distributed by the normalized surface measure.
pub fn sample_manifold(rng: &mut Rng, d: usize) -> Result<ManifoldSample> {
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    let mut u = vec![0.0; d];
    let mut v = vec![0.0; d];
    sample_manifold_into(rng, &mut u, &mut v);
    Ok(ManifoldSample { u, v })
}

/// Uniform point on S^{d−1}.
pub(crate) fn uniform_sphere_into(rng: &mut Rng, out: &mut [f64]) {
    loop {
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
        }
        let n = norm(out);
        if n > 1e-300 {
            out.iter_mut().for_each(|x| *x /= n);
            return;
        }
    }
}

pub fn uniform_sphere(rng: &mut Rng, d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    uniform_sphere_into(rng, &mut out);
    out
}

/// Orthonormal basis w₁…w_{d−1} of u^⊥, read off a Householder reflection
/// H with He₁ = ±u. The reflection vector is e₁ + u when u₁ > 0 and e₁ − u
/// otherwise, so it never degenerates.
pub fn tangent_basis(u: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = u.len();
    if d < 2 {
        return Err(Error::Dimension { got: d, min: 2 });
    }
    if (norm(u) - 1.0).abs() > 1e-8 {
        return domain(format!(
            "tangent_basis needs a unit vector, |u| = {}",
            norm(u)
        ));
    }
    let sign = if u[0] > 0.0 { 1.0 } else { -1.0 };
    let mut w: Vec<f64> = u.iter().map(|x| sign * x).collect();
    w[0] += 1.0;
    let ww = dot(&w, &w);
    Ok((1..d)
        .map(|k| {
            let mut col: Vec<f64> = w.iter().map(|wi| -2.0 * wi * w[k] / ww).collect();
            col[k] += 1.0;
            col
        })
        .collect())
}

/// Point of N_u = S^{d−1} ∩ {v : u·v = 1/2} selected by ω ∈ S^{d−2}:
/// v = u/2 + (√3/2) Σ ωᵢ wᵢ.
pub fn fiber_point(u: &[f64], omega: &[f64]) -> Result<Vec<f64>> {
    let basis = tangent_basis(u)?;
    if omega.len() + 1 != u.len() {
        return domain("fiber direction must live in R^{d-1}");
    }
    if (norm(omega) - 1.0).abs() > 1e-8 {
        return domain("fiber direction must be a unit vector");
    }
    Ok(fiber_point_with(u, &basis, omega))
}

pub(crate) fn fiber_point_with(u: &[f64], basis: &[Vec<f64>], omega: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = u.iter().map(|x| 0.5 * x).collect();
    for (w, o) in basis.iter().zip(omega) {
        for (vi, wi) in v.iter_mut().zip(w) {
            *vi += HALF_SQRT3 * o * wi;
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadMethod {
    MonteCarlo,
    ProductSlicing,
}

/// Node counts and seed governing every integration.
///
/// For product rules `n_radial` is the Gauss–Legendre count per polar-angle
/// panel, `n_outer` the count for the S^{d−2} factor of the outer sphere and
/// `n_inner` the count per panel of the N_u fiber. For Monte Carlo,
/// `n_outer` is the number of samples. `pole_decades` grades the polar
/// panels toward a point singularity of the integrand (0 disables grading).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub n_outer: usize,
    pub n_inner: usize,
    pub n_radial: usize,
    pub seed: u64,
    pub pole_decades: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadMethod::ProductSlicing,
            n_outer: 16,
            n_inner: 32,
            n_radial: 32,
            seed: 0,
            pole_decades: 30,
        }
    }
}

impl QuadratureSpec {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: QuadMethod::MonteCarlo,
            n_outer: samples,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_outer == 0 || self.n_inner == 0 || self.n_radial == 0 {
            return domain("quadrature node counts must be >= 1");
        }
        if self.pole_decades > 140 {
            return domain("pole grading deeper than 1e-140 overflows f64 integrands");
        }
        Ok(())
    }

    /// Same spec with every node count halved (for error estimates).
    pub(crate) fn halved(&self) -> Self {
        Self {
            n_outer: self.n_outer.div_ceil(2),
            n_inner: self.n_inner.div_ceil(2),
            n_radial: self.n_radial.div_ceil(2),
            ..*self
        }
    }
}

/// Weighted product rule on S^m ⊂ R^{m+1} with `n` nodes per level; weights sum to 1.
pub fn sphere_product_rule(m: usize, n: usize) -> Vec<(Vec<f64>, f64)> {
    assert!(m >= 1);
    if m == 1 {
        return (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                (vec![a.cos(), a.sin()], 1.0 / n as f64)
            })
            .collect();
    }
    let polar = polar_rule(m - 1, n, &[], 0);
    let lower = sphere_product_rule(m - 1, n);
    let mut out = Vec::with_capacity(polar.len() * lower.len());
    for &(beta, wb) in &polar {
        let (s, c) = beta.sin_cos();
        for (p, wl) in &lower {
            let mut x = Vec::with_capacity(m + 1);
            x.push(c);
            x.extend(p.iter().map(|y| s * y));
            out.push((x, wb * wl));
        }
    }
    out
}

/// 1 / B((d−1)/2, 1/2): the normalizing constant of the slicing formula.
/// Uses C_3 = 1/2, C_4 = 2/π and C_{d+2} = C_d·d/(d−1).
pub(crate) fn slicing_constant(d: usize) -> f64 {
    let mut c = if d % 2 == 1 { 0.5 } else { 2.0 / PI };
    let mut k = if d % 2 == 1 { 3 } else { 4 };
    while k < d {
        c *= k as f64 / (k as f64 - 1.0);
        k += 2;
    }
    c
}

fn slice_product<F>(f: &F, d: usize, n_radial: usize, n_angular: usize) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let c = slicing_constant(d);
    let gl = GaussLegendre::cached(n_radial);
    let inner = sphere_product_rule(d - 2, n_angular);
    let mut x = vec![0.0; d];
    let mut total = 0.0;
    for (phi, wphi) in gl.mapped(0.0, 0.5 * PI) {
        let (r, z) = phi.sin_cos();
        let weight = wphi * r.powi(d as i32 - 2);
        let mut ring = 0.0;
        for (omega, wo) in &inner {
            for (xi, oi) in x[1..].iter_mut().zip(omega) {
                *xi = r * oi;
            }
            x[0] = z;
            let plus = f(&x);
            x[0] = -z;
            ring += wo * (plus + f(&x));
        }
        total += weight * ring;
    }
    c * total
}

/// ∫_{S^{d−1}} f dσ for the normalized measure, by the slicing formula
/// `Σ_± ∫_0^1 ∫_{S^{d−2}} f(±√(1−r²), rω) r^{d−2}/√(1−r²) dσ(ω) dr`
/// with r = sin φ, Gauss–Legendre in φ and a product or Monte Carlo rule on
/// S^{d−2}. The product error is estimated by halving every node count.
pub fn slice_integral<F>(f: F, d: usize, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if d < 3 {
        return Err(Error::Dimension { got: d, min: 3 });
    }
    spec.validate()?;
    match spec.method {
        QuadMethod::ProductSlicing => {
            let value = slice_product(&f, d, spec.n_radial, spec.n_outer);
            let coarse = slice_product(&f, d, spec.n_radial.div_ceil(2), spec.n_outer.div_ceil(2));
            Ok(Estimate {
                value,
                error: (value - coarse).abs(),
            })
        }
        QuadMethod::MonteCarlo => {
            let c = slicing_constant(d);
            let gl = GaussLegendre::cached(spec.n_radial);
            let nodes: Vec<(f64, f64, f64)> = gl
                .mapped(0.0, 0.5 * PI)
                .map(|(phi, w)| {
                    let (r, z) = phi.sin_cos();
                    (r, z, w * r.powi(d as i32 - 2))
                })
                .collect();
            let stream = RngStream::new(spec.seed);
            let partial = par::map_slice(&par::chunks(spec.n_outer), |&(chunk, len)| {
                let mut rng = stream.substream(chunk as u64).rng();
                let mut omega = vec![0.0; d - 1];
                let mut x = vec![0.0; d];
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..len {
                    uniform_sphere_into(&mut rng, &mut omega);
                    let mut g = 0.0;
                    for &(r, z, w) in &nodes {
                        for (xi, oi) in x[1..].iter_mut().zip(&omega) {
                            *xi = r * oi;
                        }
                        x[0] = z;
                        let plus = f(&x);
                        x[0] = -z;
                        g += w * (plus + f(&x));
                    }
                    g *= c;
                    s1 += g;
                    s2 += g * g;
                }
                (s1, s2)
            });
            Ok(Estimate::from_sums(&partial, spec.n_outer))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn haar_is_rotation() {
        let mut rng = RngStream::new(1).rng();
        for d in 2..8 {
            for _ in 0..20 {
                let r = haar_rotation(&mut rng, d).unwrap();
                assert!(r.orthogonality_defect() < 1e-12);
                assert!((r.determinant() - 1.0).abs() < 1e-10);
            }
        }
        assert!(haar_rotation(&mut rng, 1).is_err());
    }

    #[test]
    fn frame_matches_full_rotation() {
        for d in 2..7 {
            for s in 0..10 {
                let r = haar_rotation(&mut RngStream::new(s).rng(), d).unwrap();
                let mut a = vec![0.0; d];
                let mut b = vec![0.0; d];
                haar_frame_into(&mut RngStream::new(s).rng(), &mut a, &mut b);
                let (c0, c1) = (r.column(0), r.column(1));
                for k in 0..d {
                    assert!((a[k] - c0[k]).abs() < 1e-12, "d={d}");
                    assert!((b[k] - c1[k]).abs() < 1e-12, "d={d}");
                }
            }
        }
    }

    #[test]
    fn manifold_invariants() {
        let mut rng = RngStream::new(9).rng();
        for d in 2..9 {
            for _ in 0..100 {
                let m = sample_manifold(&mut rng, d).unwrap();
                assert!((norm(&m.u) - 1.0).abs() < 1e-12);
                assert!((norm(&m.v) - 1.0).abs() < 1e-12);
                let diff: Vec<f64> = m.u.iter().zip(&m.v).map(|(a, b)| a - b).collect();
                assert!((norm(&diff) - 1.0).abs() < 1e-12);
                assert!((dot(&m.u, &m.v) - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tangent_basis_cases() {
        let e1 = [1.0, 0.0, 0.0, 0.0];
        let b = tangent_basis(&e1).unwrap();
        for (k, w) in b.iter().enumerate() {
            for (i, x) in w.iter().enumerate() {
                assert_eq!(*x, if i == k + 1 { 1.0 } else { 0.0 });
            }
        }
        let b = tangent_basis(&[-1.0, 0.0, 0.0]).unwrap();
        for w in &b {
            assert!(w[0].abs() < 1e-15);
            assert!((norm(w) - 1.0).abs() < 1e-15);
        }
        assert!(dot(&b[0], &b[1]).abs() < 1e-15);
        assert!(tangent_basis(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn fiber_point_base_vertex() {
        let v = fiber_point(&[1.0, 0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_relative_eq!(v[0], 0.5);
        assert_relative_eq!(v[1], HALF_SQRT3);
        assert_eq!(v[2], 0.0);
        let v = fiber_point(&[1.0, 0.0, 0.0], &[-1.0, 0.0]).unwrap();
        assert_relative_eq!(v[1], -HALF_SQRT3);
        assert!(fiber_point(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).is_err());
        assert!(fiber_point(&[1.0, 0.0, 0.0], &[0.5, 0.0]).is_err());
    }

    #[test]
    fn slicing_constant_matches_beta() {
        use crate::special::ln_gamma;
        for d in 3..20 {
            let a = (d as f64 - 1.0) / 2.0;
            let beta = (ln_gamma(a + 0.5) - ln_gamma(a) - ln_gamma(0.5)).exp();
            assert_relative_eq!(slicing_constant(d), beta, max_relative = 1e-12);
        }
    }

    #[test]
    fn product_rule_moments() {
        for m in 1..5 {
            let rule = sphere_product_rule(m, 16);
            let w: f64 = rule.iter().map(|r| r.1).sum();
            assert_relative_eq!(w, 1.0, max_relative = 1e-13);
            let second: f64 = rule.iter().map(|(x, w)| w * x[m] * x[m]).sum();
            assert_relative_eq!(second, 1.0 / (m as f64 + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn slice_integral_constants() {
        let spec = QuadratureSpec {
            n_radial: 16,
            n_outer: 16,
            ..Default::default()
        };
        for d in 3..8 {
            let e = slice_integral(|_| 1.0, d, &spec).unwrap();
            assert!((e.value - 1.0).abs() < 1e-10, "d={d}: {}", e.value);
        }
        let e = slice_integral(|x| x[0] * x[0], 5, &spec).unwrap();
        assert_relative_eq!(e.value, 0.2, max_relative = 1e-12);
        let e = slice_integral(|x| x[3] * x[3], 5, &spec).unwrap();
        assert_relative_eq!(e.value, 0.2, max_relative = 1e-12);
        // Real part of e^{-2πi x₁} on S²: sin(2π)/(2π) = 0.
        let spec3 = QuadratureSpec {
            n_radial: 40,
            ..spec
        };
        let e = slice_integral(|x| (2.0 * PI * x[0]).cos(), 3, &spec3).unwrap();
        assert!(e.value.abs() < 1e-12);
        assert!(slice_integral(|_| 1.0, 2, &spec).is_err());
    }
}
