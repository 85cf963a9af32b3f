use num::{BigRational, Signed, Zero};

/// Exact membership of `point` in the convex hull of `vertices`.
///
/// By Carathéodory the point is in the hull iff it is a convex combination
/// of some affinely independent subset; every subset is tried and the
/// barycentric system is solved by exact Gaussian elimination.
pub fn hull_contains(vertices: &[Vec<BigRational>], point: &[BigRational]) -> bool {
    let n = vertices.len();
    let dim = point.len();
    assert!(n < 32, "vertex enumeration is exponential");
    (1u32..1 << n).any(|mask| {
        let subset: Vec<&Vec<BigRational>> = (0..n)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| &vertices[b])
            .collect();
        subset.len() <= dim + 1 && convex_weights(&subset, point).is_some()
    })
}

/// Solves Σ λ_a V_a = P, Σ λ_a = 1 and returns λ if it is unique and ≥ 0.
fn convex_weights(subset: &[&Vec<BigRational>], point: &[BigRational]) -> Option<Vec<BigRational>> {
    let cols = subset.len();
    let one = BigRational::from_integer(1.into());
    let mut rows: Vec<Vec<BigRational>> = (0..point.len())
        .map(|r| {
            let mut row: Vec<BigRational> = subset.iter().map(|v| v[r].clone()).collect();
            row.push(point[r].clone());
            row
        })
        .collect();
    let mut last = vec![one.clone(); cols];
    last.push(one);
    rows.push(last);

    for (pivot_row, c) in (0..cols).enumerate() {
        let p = (pivot_row..rows.len()).find(|&r| !rows[r][c].is_zero())?;
        rows.swap(pivot_row, p);
        let lead = rows[pivot_row][c].clone();
        for x in rows[pivot_row].iter_mut() {
            *x = &*x / &lead;
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    if rows[cols..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let lambda: Vec<BigRational> = rows[..cols].iter().map(|row| row[cols].clone()).collect();
    lambda.iter().all(|l| !l.is_negative()).then_some(lambda)
}
