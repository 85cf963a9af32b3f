//! Gauss–Legendre rules and the composite/weighted variants used for the
//! polar-angle integrals on spheres.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess.
            let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared, lazily built rule. Rules are immutable once built.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(GaussLegendre::new(n));
        cache
            .lock()
            .expect("rule cache poisoned")
            .entry(n)
            .or_insert(rule)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, dp)
}

/// A numerical value with an error estimate: a standard error for Monte Carlo,
/// a node-halving difference for product rules.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }

    /// Mean and standard error from per-chunk `(Σx, Σx²)` sums over `n` samples.
    pub(crate) fn from_sums(parts: &[(f64, f64)], n: usize) -> Self {
        let (s1, s2) = parts
            .iter()
            .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
        let nf = n as f64;
        let mean = s1 / nf;
        let var = if n > 1 {
            ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            error: (var / nf).sqrt(),
        }
    }
}

/// A one-dimensional rule: a list of `(node, weight)` pairs.
pub type Rule1d = Vec<(f64, f64)>;

/// Composite Gauss–Legendre rule with `n` nodes per panel on each interval
/// between consecutive `breaks` (which must be sorted).
pub fn composite(breaks: &[f64], n: usize) -> Rule1d {
    let gl = GaussLegendre::cached(n);
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .flat_map(|w| gl.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect()
}

/// Rule for `∫_0^π h(φ) sin^m(φ) dφ / ∫_0^π sin^m(φ) dφ`, i.e. the marginal of the
/// polar angle of a uniform point on S^{m+1}. `breaks` are interior breakpoints
/// in (0, π) (jumps of the integrand). When `pole_decades > 0` the panels next
/// to φ = 0 are graded geometrically down to `10^{-pole_decades}` so that an
/// integrable singularity at the pole is resolved. Weights are normalized to
/// sum to one.
pub fn polar_rule(m: usize, n: usize, breaks: &[f64], pole_decades: u32) -> Rule1d {
    let mut pts: Vec<f64> = vec![0.0, PI];
    pts.extend(breaks.iter().copied().filter(|b| *b > 0.0 && *b < PI));
    let mut grade_top = 0.0;
    if pole_decades > 0 {
        // Graded panels live below the first breakpoint (or 0.1 rad).
        pts.sort_by(f64::total_cmp);
        grade_top = pts[1].min(0.1);
        let mut x = grade_top;
        while x > grade_top * 10f64.powi(-(pole_decades as i32)) {
            x *= 0.25;
            pts.push(x);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let gl = GaussLegendre::cached(n);
    let floor = if pole_decades > 0 {
        grade_top * 10f64.powi(-(pole_decades as i32))
    } else {
        0.0
    };
    let mut rule = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if pole_decades > 0 && b <= grade_top {
            if b <= floor {
                continue;
            }
            // Log-substituted panel: φ = e^s, dφ = φ ds.
            let la = a.max(floor).ln();
            let lb = b.ln();
            for (s, ws) in gl.mapped(la, lb) {
                let phi = s.exp();
                rule.push((phi, ws * phi * phi.sin().powi(m as i32)));
            }
        } else {
            for (phi, wp) in gl.mapped(a, b) {
                rule.push((phi, wp * phi.sin().powi(m as i32)));
            }
        }
    }
    let total: f64 = rule.iter().map(|r| r.1).sum();
    for r in &mut rule {
        r.1 /= total;
    }
    rule
}
