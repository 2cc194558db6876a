//! Unconstrained dynamic time warping with squared-difference local cost.
//!
//! Paths are monotone, anchored at both ends and use the three-predecessor
//! step pattern (match, insertion, deletion) with unit weights. The distance
//! is the plain sum of local costs, without square root or path-length
//! normalization.

use crate::error::{Error, Result};

pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_nonempty(a, b)?;
    Ok(dtw_core(a, b, f64::INFINITY).expect("unbounded DTW never abandons"))
}

/// Exact DTW distance when it is `<= bound`, otherwise `None`. Rows whose
/// minimum running cost already exceeds `bound` abandon the computation.
pub fn dtw_distance_bounded(a: &[f64], b: &[f64], bound: f64) -> Result<Option<f64>> {
    check_nonempty(a, b)?;
    if bound.is_nan() || bound < 0.0 {
        return Err(Error::param(format!("DTW bound must be nonnegative, got {bound}")));
    }
    Ok(dtw_core(a, b, bound))
}

fn check_nonempty(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("DTW needs nonempty sequences"));
    }
    Ok(())
}

fn dtw_core(a: &[f64], b: &[f64], bound: f64) -> Option<f64> {
    // iterate rows over the longer sequence so the buffers stay short
    let (rows, cols) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let m = cols.len();
    let mut prev = vec![f64::INFINITY; m];
    let mut curr = vec![f64::INFINITY; m];

    for (i, &r) in rows.iter().enumerate() {
        let mut row_min = f64::INFINITY;
        for (j, &c) in cols.iter().enumerate() {
            let d = r - c;
            let cost = d * d;
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => curr[j - 1],
                (_, 0) => prev[0],
                _ => prev[j - 1].min(prev[j]).min(curr[j - 1]),
            };
            let v = cost + best;
            curr[j] = v;
            row_min = row_min.min(v);
        }
        if row_min > bound {
            return None;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    let d = prev[m - 1];
    (d <= bound).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_zero() {
        let a = [1.5, -2.0, 3.25, 0.0];
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(dtw_distance_bounded(&a, &a, 0.0).unwrap(), Some(0.0));
    }

    #[test]
    fn hand_examples() {
        assert_eq!(dtw_distance(&[0.0], &[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(dtw_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn bounded_examples() {
        assert_eq!(dtw_distance_bounded(&[0.0], &[1.0, 1.0, 1.0], 2.0).unwrap(), None);
        assert_eq!(dtw_distance_bounded(&[0.0], &[1.0, 1.0, 1.0], 3.0).unwrap(), Some(3.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(dtw_distance(&[], &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(dtw_distance(&[1.0], &[]), Err(Error::Domain(_))));
        assert!(dtw_distance_bounded(&[1.0], &[1.0], -1.0).is_err());
    }
}
