use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonEstimate {
    pub limit: f64,
    /// Observed order `log2((v0 - v1) / (v1 - v2))`; infinite for an exactly
    /// stationary triple.
    pub rate: f64,
}

/// Richardson extrapolation from values at resolutions `n, 2n, 4n`.
///
/// Returns `None` when the differences do not shrink geometrically (sign
/// change or growing increments), since no limit can be inferred.
pub fn richardson(v: [f64; 3]) -> Option<RichardsonEstimate> {
    let d1 = v[0] - v[1];
    let d2 = v[1] - v[2];
    if d1 == 0.0 && d2 == 0.0 {
        return Some(RichardsonEstimate { limit: v[2], rate: f64::INFINITY });
    }
    if d2 == 0.0 {
        return None;
    }
    let r = d1 / d2;
    if !(r > 1.0) || !r.is_finite() {
        return None;
    }
    Some(RichardsonEstimate { limit: v[2] - d2 / (r - 1.0), rate: r.log2() })
}

/// Consecutive increments of a refinement sequence.
pub fn increments(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Minimum ratio between consecutive increments accepted as "non-shrinking".
/// Geometric shrinkage `2^(-eps)` with small `eps` is indistinguishable from a
/// constant increment over a few doublings; the floor sits just above
/// `2^(-0.05)`.
pub const NON_SHRINK_RATIO: f64 = 0.97;

/// Log-divergence signature: the last `run` increments all exceed `delta` and
/// none shrinks below [`NON_SHRINK_RATIO`] times its predecessor.
pub fn log_divergence(values: &[f64], delta: f64, run: usize) -> bool {
    let inc = increments(values);
    if run == 0 || inc.len() < run {
        return false;
    }
    let tail = &inc[inc.len() - run..];
    tail.iter().all(|&d| d > delta) && tail.windows(2).all(|w| w[1] >= NON_SHRINK_RATIO * w[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order() {
        let e = richardson([3.0 + 2.0, 3.0 + 1.0, 3.0 + 0.5]).unwrap();
        assert!((e.limit - 3.0).abs() < 1e-14);
        assert!((e.rate - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_order() {
        let v = [1.0, 0.25, 0.0625].map(|h2| -2.0 + 5.0 * h2);
        let e = richardson(v).unwrap();
        assert!((e.limit + 2.0).abs() < 1e-13);
        assert!((e.rate - 2.0).abs() < 1e-13);
    }

    #[test]
    fn non_monotone_gives_none() {
        assert!(richardson([1.0, 2.0, 1.5]).is_none());
        assert!(richardson([1.0, 2.0, 4.0]).is_none());
    }

    #[test]
    fn divergence_signature() {
        let log_growth: Vec<f64> = (0..6).map(|k| 5.0 * k as f64 + 0.1 / (k + 1) as f64).collect();
        assert!(log_divergence(&log_growth, 1.0, 3));
        let convergent: Vec<f64> = (0..6).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        assert!(!log_divergence(&convergent, 1e-3, 3));
        let slow: Vec<f64> = (0..6).map(|k| 10.0 * (1.0 - 0.8f64.powi(k))).collect();
        assert!(!log_divergence(&slow, 0.1, 3));
    }
}
