use super::hull::hull_contains;
use super::pieces::DyadicIndex;
use crate::error::{domain, Error, Result};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn ser_ratio<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Coefficients (a, b, c) of log₂ of the piece bound `2^{a·i + b·j + c·k}`:
/// a = 2 − d/2, b = d/4 − 1, c = d/4 − 3/4.
fn exponent_coefficients(d: usize) -> (BigRational, BigRational, BigRational) {
    let d = d as i64;
    (q(4 - d, 2), q(d - 4, 4), q(d - 3, 4))
}

/// log₂ of `2^{−i(d−2)/2} [2^{i−j−k}]^{−(d−2)/2} 2^{(2i−j−k)d/4} 2^{k/4}`.
pub fn piece_norm_exponent(idx: DyadicIndex, d: usize) -> BigRational {
    let (a, b, c) = exponent_coefficients(d);
    a * BigRational::from_integer(idx.i.into())
        + b * BigRational::from_integer(idx.j.into())
        + c * BigRational::from_integer(idx.k.into())
}

/// The displayed operator-norm bound of the piece with constant 1.
pub fn piece_norm_bound(idx: DyadicIndex, d: usize) -> f64 {
    2f64.powf(to_f64(&piece_norm_exponent(idx, d)))
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRow {
    pub i: u32,
    pub pieces: Vec<(DyadicIndex, f64)>,
    /// C_i = Σ_{j,k} piece bounds.
    pub summed: f64,
    /// log₂ of the L¹×L^p growth 2^{(d+1)i} used alongside C_i in interpolation.
    pub companion_growth_log2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormBoundTable {
    pub d: usize,
    pub rows: Vec<NormRow>,
    /// Σ_{i ≤ i_max} C_i.
    pub total: f64,
    /// log₂ of the ratio of consecutive diagonal (j = i) bounds, −(d/4 − 1).
    #[serde(serialize_with = "ser_ratio")]
    pub rate_exponent: BigRational,
    /// 2^{rate_exponent}.
    pub geometric_ratio: f64,
    /// Exact exponential rate of C_i itself: the diagonal rate plus the
    /// largest of 0, the j-coefficient and half the k-coefficient.
    #[serde(serialize_with = "ser_ratio")]
    pub tail_exponent: BigRational,
    /// Σ C_i diverges (tail exponent ≥ 0).
    pub divergent: bool,
}

pub fn norm_table(d: usize, i_max: u32) -> Result<NormBoundTable> {
    if d < 3 {
        return Err(Error::Dimension { got: d, min: 3 });
    }
    let rows: Vec<NormRow> = (0..=i_max)
        .map(|i| {
            let pieces: Vec<(DyadicIndex, f64)> = DyadicIndex::at_scale(i)
                .into_iter()
                .map(|idx| (idx, piece_norm_bound(idx, d)))
                .collect();
            NormRow {
                i,
                summed: pieces.iter().map(|p| p.1).sum(),
                pieces,
                companion_growth_log2: (d as f64 + 1.0) * i as f64,
            }
        })
        .collect();
    let (a, b, c) = exponent_coefficients(d);
    let rate_exponent = &a + &b;
    let half_c = c / BigRational::from_integer(2.into());
    let mut dominant = BigRational::zero();
    for x in [&b, &half_c] {
        if *x > dominant {
            dominant = x.clone();
        }
    }
    let tail_exponent = &a + dominant;
    Ok(NormBoundTable {
        d,
        total: rows.iter().map(|r| r.summed).sum(),
        geometric_ratio: 2f64.powf(to_f64(&rate_exponent)),
        divergent: !tail_exponent.is_negative() || !rate_exponent.is_negative(),
        rate_exponent,
        tail_exponent,
        rows,
    })
}

/// p_d = 5d/(3d − 2).
pub fn critical_exponent(d: usize) -> Result<BigRational> {
    if d < 5 {
        return Err(Error::Dimension { got: d, min: 5 });
    }
    let d = d as i64;
    Ok(q(5 * d, 3 * d - 2))
}

/// Interpolating an L²×L² → L¹ bound decaying like 2^{−αi} against an
/// L¹×L^p bound growing like 2^{βi} (p → 1) gives a summable family of
/// L^p×L^p → L^{p/2} bounds exactly when 1/p < (2α + β)/(2(α + β)).
pub fn summability_threshold(alpha: &BigRational, beta: &BigRational) -> Result<BigRational> {
    if !alpha.is_positive() || beta.is_negative() {
        return domain("need alpha > 0 and beta >= 0");
    }
    let two = BigRational::from_integer(2.into());
    Ok((&two * alpha + beta) / (two * (alpha + beta)))
}

/// Parses an exponent p ∈ (0, ∞] (integers, fractions `a/b`, decimals or
/// `inf`) into its exact reciprocal 1/p.
pub fn parse_reciprocal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "∞") {
        return Ok(BigRational::zero());
    }
    let bad = || Error::Parse(format!("not an exponent: {s:?}"));
    let value = if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        BigRational::new(a, b)
    } else if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(t.parse().map_err(|_| bad())?)
    };
    if !value.is_positive() {
        return Err(Error::Parse(format!("exponent must be positive: {s:?}")));
    }
    Ok(value.recip())
}

/// (1/p, 1/q, 1/r) in the convex hull of
/// {(0,0,0), (1,0,1), (0,1,1), (1/p_d, 1/p_d, 2/p_d)}.
pub fn region_contains(
    d: usize,
    p_recip: &BigRational,
    q_recip: &BigRational,
    r_recip: &BigRational,
) -> Result<bool> {
    let pd = critical_exponent(d)?.recip();
    let zero = BigRational::zero();
    let one = BigRational::one();
    let vertices = vec![
        vec![zero.clone(), zero.clone(), zero.clone()],
        vec![one.clone(), zero.clone(), one.clone()],
        vec![zero, one.clone(), one],
        vec![pd.clone(), pd.clone(), &pd + &pd],
    ];
    Ok(hull_contains(
        &vertices,
        &[p_recip.clone(), q_recip.clone(), r_recip.clone()],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_matches_displayed_product() {
        for d in 3..10usize {
            for i in 0..9 {
                for idx in DyadicIndex::at_scale(i) {
                    let (i, j, k) = (idx.i as f64, idx.j as f64, idx.k as f64);
                    let h = (d as f64 - 2.0) / 2.0;
                    let displayed = 2f64.powf(-i * h)
                        * 2f64.powf(i - j - k).powf(-h)
                        * 2f64.powf((2.0 * i - j - k) * d as f64 / 4.0)
                        * 2f64.powf(k / 4.0);
                    let ours = piece_norm_bound(idx, d);
                    assert!((ours / displayed - 1.0).abs() < 1e-12);
                }
            }
        }
        assert_eq!(piece_norm_bound(DyadicIndex::new(0, 0, 0).unwrap(), 7), 1.0);
    }

    #[test]
    fn table_rates() {
        let t = norm_table(5, 240).unwrap();
        assert_eq!(t.rate_exponent, q(-1, 4));
        assert_eq!(t.tail_exponent, q(-1, 4));
        assert!(!t.divergent);
        let c = |i: usize| t.rows[i].summed;
        let ratio = c(240) / c(239);
        assert!((ratio / 2f64.powf(-0.25) - 1.0).abs() < 0.01, "{ratio}");
        for i in 8..240 {
            assert!(c(i + 1) < c(i), "i={i}");
        }
        let t4 = norm_table(4, 20).unwrap();
        assert_eq!(t4.geometric_ratio, 1.0);
        assert_eq!(t4.tail_exponent, q(1, 8));
        assert!(t4.divergent);
        assert!(norm_table(3, 5).unwrap().divergent);
        let t8 = norm_table(8, 5).unwrap();
        assert_eq!(t8.rate_exponent, q(-1, 1));
        assert_eq!(t8.geometric_ratio, 0.5);
    }

    #[test]
    fn exponents() {
        assert_eq!(critical_exponent(5).unwrap(), q(25, 13));
        assert_eq!(critical_exponent(10).unwrap(), q(25, 14));
        assert!(critical_exponent(4).is_err());
        let p = critical_exponent(1_000_000).unwrap();
        assert!((to_f64(&p) - 5.0 / 3.0).abs() < 1e-5);
        for d in 5..40i64 {
            let alpha = q(d - 4, 4);
            let beta = q(d + 1, 1);
            let t = summability_threshold(&alpha, &beta).unwrap();
            assert_eq!(t, critical_exponent(d as usize).unwrap().recip());
        }
    }

    #[test]
    fn parse_and_region() {
        assert_eq!(parse_reciprocal("inf").unwrap(), q(0, 1));
        assert_eq!(parse_reciprocal("25/13").unwrap(), q(13, 25));
        assert_eq!(parse_reciprocal("1.5").unwrap(), q(2, 3));
        assert_eq!(parse_reciprocal("4").unwrap(), q(1, 4));
        assert!(parse_reciprocal("0").is_err());
        assert!(parse_reciprocal("x").is_err());
        assert!(parse_reciprocal("1.").is_err());
        let r = |p: &str, qq: &str, rr: &str| {
            region_contains(
                5,
                &parse_reciprocal(p).unwrap(),
                &parse_reciprocal(qq).unwrap(),
                &parse_reciprocal(rr).unwrap(),
            )
            .unwrap()
        };
        assert!(r("inf", "inf", "inf"));
        assert!(r("1", "inf", "1"));
        assert!(r("inf", "1", "1"));
        assert!(r("25/13", "25/13", "25/26"));
        assert!(!r("3/2", "3/2", "3/4"));
        assert!(r("2", "4", "4/3"));
        assert!(!r("2", "4", "2"));
    }
}
