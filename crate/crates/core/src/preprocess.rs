//! Per-series z-normalization and the positive shift the trading segmenter needs.

#[derive(Debug, Clone, PartialEq)]
pub struct ZNormalized {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation; reported as 1 for constant input.
    pub stddev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    pub values: Vec<f64>,
    pub offset: f64,
    pub mean: f64,
    pub stddev: f64,
}

/// `(x - mean) / stddev` with the population (1/T) variance. A constant
/// series maps to zeros and reports `stddev = 1`.
pub fn z_normalize(x: &[f64]) -> ZNormalized {
    if x.is_empty() {
        return ZNormalized {
            values: Vec::new(),
            mean: 0.0,
            stddev: 1.0,
        };
    }
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        return ZNormalized {
            values: vec![0.0; x.len()],
            mean: first,
            stddev: 1.0,
        };
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    // two-pass form of mean(x^2) - mean^2
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let stddev = var.sqrt();
    let stddev = if stddev > 0.0 { stddev } else { 1.0 };
    ZNormalized {
        values: x.iter().map(|v| (v - mean) / stddev).collect(),
        mean,
        stddev,
    }
}

/// z-normalize, then shift by `|min| + 1` so every value is at least 1.
pub fn normalize_for_trading(x: &[f64]) -> NormalizedSeries {
    let z = z_normalize(x);
    let min = z.values.iter().copied().fold(f64::INFINITY, f64::min);
    let offset = min.abs() + 1.0;
    let values = if min <= 0.0 {
        // subtracting the minimum first makes the smallest value exactly 1
        z.values.iter().map(|v| (v - min) + 1.0).collect()
    } else {
        z.values.iter().map(|v| v + offset).collect()
    };
    NormalizedSeries {
        values,
        offset,
        mean: z.mean,
        stddev: z.stddev,
    }
}
