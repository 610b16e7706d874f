//! Thermal-state entropy and the rate expressions of the bosonic
//! multiple-access channel.
//!
//! All rate-side quantities reduce to the entropy `g(x)` of a single-mode
//! thermal state with mean photon number `x`,
//! `g(x) = (x+1)·log2(x+1) − x·log2(x)` (bits per channel use).

use crate::error::{QiccError, Result};
use crate::estimator::Scenario;

/// Mean photon number of a thermal state. Non-negative and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumber(f64);

impl PhotonNumber {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(QiccError::Domain(format!(
                "mean photon number must be finite and >= 0, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Below this threshold `g` is evaluated through its small-x expansion;
/// the direct formula would hit 0·log 0 at the origin.
const SMALL_X: f64 = 1e-12;

/// Thermal-state von Neumann entropy in bits, on validated input.
///
/// Internal hot-path variant: assumes `x >= 0` and finite. Evaluated as
/// `[ln(1+x) + x·ln(1+1/x)] / ln 2`, a sum of non-negative terms; the
/// textbook difference form cancels catastrophically for large x.
pub(crate) fn g_raw(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < SMALL_X {
        // g(x) = x·(log2 e − log2 x) + O(x²)
        return x * (std::f64::consts::LOG2_E - x.log2());
    }
    (x.ln_1p() + x * x.recip().ln_1p()) / std::f64::consts::LN_2
}

/// von Neumann entropy `g(x)` of a thermal state, bits per channel use.
///
/// Strictly increasing on x > 0 with g(0) = 0 by continuity.
pub fn von_neumann_g(x: PhotonNumber) -> f64 {
    g_raw(x.value())
}

/// `g(n_sig + n_eff) − g(n_eff)`: the sum-rate supported by aggregate signal
/// power `n_sig` over effective noise `n_eff`, in bits.
pub fn rate_gap(n_sig: PhotonNumber, n_eff: PhotonNumber) -> f64 {
    rate_gap_raw(n_sig.value(), n_eff.value())
}

pub(crate) fn rate_gap_raw(n_sig: f64, n_eff: f64) -> f64 {
    (g_raw(n_sig + n_eff) - g_raw(n_eff)).max(0.0)
}

/// Largest sum-rate the scenario can support: all communication devices at
/// full power against the bare noise floor.
pub fn max_sum_rate(scenario: &Scenario) -> f64 {
    rate_gap_raw(scenario.n_sig_max(), scenario.n0)
}
