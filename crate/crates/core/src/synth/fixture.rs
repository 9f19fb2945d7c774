//! Reference summary statistics for industrial issuers and the canonical
//! data-generating model. The reference set has no thresholds; the values
//! here are chosen to give a realistic class mix.

use alloc::vec::Vec;

/// Column order: ROA, EBITDA/interest, total debt/EBITDA, cash flow/sales,
/// operating margin, liquidity proxy, log10 capitalization, LT debt/capital.
pub const SUMMARY_MEAN: [f64; 8] = [8.14, 18.64, 2.03, 22.89, 19.10, 1.29, 4.16, 34.31];
pub const SUMMARY_MEDIAN: [f64; 8] = [7.18, 10.81, 1.50, 18.50, 16.82, 1.10, 4.19, 30.62];
pub const SUMMARY_MAX: [f64; 8] = [40.56, 241.77, 9.63, 72.87, 59.53, 4.06, 5.67, 149.16];
pub const SUMMARY_MIN: [f64; 8] = [-12.82, 1.24, 0.03, 0.38, -6.10, 0.17, 2.33, 0.01];
pub const SUMMARY_SD: [f64; 8] = [6.39, 25.84, 1.67, 15.05, 12.40, 0.71, 0.55, 20.18];

/// Sample correlations in the column order above. The reference lower and
/// upper triangles differ in the third decimal for four pairs; those are
/// averaged.
#[rustfmt::skip]
pub const SUMMARY_CORRELATION: [[f64; 8]; 8] = [
    [1.000, 0.422, -0.564, 0.311, 0.5635, 0.259, 0.290, -0.333],
    [0.422, 1.000, -0.426, 0.128, 0.211, 0.183, 0.176, -0.445],
    [-0.564, -0.426, 1.000, -0.253, -0.357, -0.1985, -0.235, 0.688],
    [0.311, 0.128, -0.253, 1.000, 0.7805, -0.174, 0.016, -0.052],
    [0.5635, 0.211, -0.357, 0.7805, 1.000, 0.075, 0.073, -0.144],
    [0.259, 0.183, -0.1985, -0.174, 0.075, 1.000, 0.015, -0.212],
    [0.290, 0.176, -0.235, 0.016, 0.073, 0.015, 1.000, -0.2685],
    [-0.333, -0.445, 0.688, -0.052, -0.144, -0.212, -0.2685, 1.000],
];

/// Base S&P rating-class coefficients, in `base_sp` preset order.
pub const BASE_SP_BETA: [f64; 14] =
    [-0.617, -0.063, -0.011, 0.015, -0.059, 0.242, -1.107, -1.514, -1.884, -1.504, -2.795, 0.463, -0.171, -0.714];

/// Class-scale thresholds of the canonical model: latent-index quantiles of
/// the default generator (400000 draws) at cumulative shares 2, 8, 28, 62,
/// 86, 97 and 99.2 percent, so the eight classes hold roughly
/// 2/6/20/34/24/11/2.2/0.8 percent with the mass in BBB and BB.
pub const CLASS_THRESHOLDS: [f64; 7] = [-7.11, -5.94, -4.45, -2.71, -1.02, 0.75, 1.84];

/// Width of the CC notch past the last class threshold.
pub const CC_NOTCH_WIDTH: f64 = 0.5;

/// Twenty cuts over the 21 notches AAA..C. The AAA class is one notch; each
/// class from AA to CCC is split into equal thirds; the bottom class is CC
/// for [`CC_NOTCH_WIDTH`] beyond the last class threshold and C after that.
pub fn notch_thresholds(class_thresholds: &[f64; 7]) -> Vec<f64> {
    let mut cuts = Vec::with_capacity(20);
    cuts.push(class_thresholds[0]);
    for w in class_thresholds.windows(2) {
        let third = (w[1] - w[0]) / 3.0;
        cuts.extend([w[0] + third, w[0] + 2.0 * third, w[1]]);
    }
    cuts.push(class_thresholds[6] + CC_NOTCH_WIDTH);
    cuts
}

/// Disagreement model over `split_1s` regressors (volatility in percent,
/// developed-country dummy).
pub const SPLIT_BETA: [f64; 2] = [0.02, -0.4];
pub const SPLIT_THRESHOLD: f64 = 0.32;
