//! MSE algebra of the computation task: LMMSE receive coefficient, full and
//! reduced MSE, boundary values, and the analytic gradient used by the
//! projected-gradient update.

use crate::error::{QiccError, Result};

/// Shared lift applied to OAC powers before the 1/sqrt(g_k) gradient term;
/// the closed-form gradient is unbounded at g_k = 0.
pub const EPSILON_FLOOR: f64 = 1e-12;

/// Static problem instance: device counts, transmissivities, noise and power
/// budgets. Immutable once validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Number of over-the-air-computation devices (K >= 1).
    pub k: usize,
    /// Number of communication devices (may be 0).
    pub m: usize,
    /// Transmissivities, OAC devices first then communication devices.
    /// All in (0, 1] and summing to 1.
    pub eta: Vec<f64>,
    /// Noise mean photon number.
    pub n0: f64,
    /// Per-device OAC power cap.
    pub pc: f64,
    /// Per-device communication power cap.
    pub pt: f64,
}

impl Scenario {
    pub fn new(k: usize, m: usize, eta: Vec<f64>, n0: f64, pc: f64, pt: f64) -> Result<Self> {
        if k < 1 {
            return Err(QiccError::InvalidArgument("K must be >= 1".into()));
        }
        if eta.len() != k + m {
            return Err(QiccError::InvalidArgument(format!(
                "expected {} transmissivities, got {}",
                k + m,
                eta.len()
            )));
        }
        if eta.iter().any(|&e| !(e > 0.0 && e <= 1.0) || !e.is_finite()) {
            return Err(QiccError::InvalidArgument(
                "all transmissivities must lie in (0, 1]".into(),
            ));
        }
        let sum: f64 = eta.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(QiccError::InvalidArgument(format!(
                "transmissivities must sum to 1, got {sum}"
            )));
        }
        for (name, v) in [("N0", n0), ("Pc", pc), ("Pt", pt)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(QiccError::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { k, m, eta, n0, pc, pt })
    }

    /// Transmissivities of the OAC devices.
    pub fn eta_oac(&self) -> &[f64] {
        &self.eta[..self.k]
    }

    /// Transmissivities of the communication devices.
    pub fn eta_comm(&self) -> &[f64] {
        &self.eta[self.k..]
    }

    /// Largest aggregate received communication power: all devices at Pt.
    pub fn n_sig_max(&self) -> f64 {
        self.eta_comm().iter().map(|e| e * self.pt).sum()
    }

    /// Largest aggregate received OAC power: all devices at Pc.
    pub fn gamma_cap(&self) -> f64 {
        self.eta_oac().iter().map(|e| e * self.pc).sum()
    }
}

/// Decision variables: OAC powers, aggregate communication power, and the
/// receive coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// OAC powers g_k, each in [0, Pc].
    pub g: Vec<f64>,
    /// Aggregate received communication power N_sig = Σ η_{K+m} P_m.
    pub n_sig: f64,
    /// Receive coefficient. The LMMSE solution is real for the real,
    /// non-negative channel gains of this model; the imaginary part is kept
    /// for model fidelity and is zero in practice.
    pub h: (f64, f64),
}

impl Allocation {
    pub fn new_real(g: Vec<f64>, n_sig: f64, h: f64) -> Self {
        Self { g, n_sig, h: (h, 0.0) }
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.g.len() != scenario.k {
            return Err(QiccError::InvalidArgument(format!(
                "expected {} OAC powers, got {}",
                scenario.k,
                self.g.len()
            )));
        }
        if self.g.iter().any(|&g| !(0.0..=scenario.pc + 1e-9).contains(&g)) {
            return Err(QiccError::InvalidArgument(
                "OAC powers must lie in [0, Pc]".into(),
            ));
        }
        if self.n_sig < 0.0 || self.n_sig > scenario.n_sig_max() + 1e-9 {
            return Err(QiccError::InvalidArgument(format!(
                "N_sig {} outside [0, {}]",
                self.n_sig,
                scenario.n_sig_max()
            )));
        }
        Ok(())
    }
}

/// Intermediate aggregates of the reduced MSE: A = Σ sqrt(η_k g_k),
/// D = Σ η_k g_k + N_sig + N_0, and the effective noise N_eff = D − N_sig.
#[derive(Debug, Clone, Copy)]
pub struct DerivedQuantities {
    pub a: f64,
    pub d: f64,
    pub n_eff: f64,
}

impl DerivedQuantities {
    pub fn compute(scenario: &Scenario, g: &[f64], n_sig: f64) -> Self {
        let mut a = 0.0;
        let mut eg = 0.0;
        for (eta, gk) in scenario.eta_oac().iter().zip(g) {
            a += (eta * gk).sqrt();
            eg += eta * gk;
        }
        DerivedQuantities {
            a,
            d: eg + n_sig + scenario.n0,
            n_eff: scenario.n0 + eg,
        }
    }
}

/// Optimal LMMSE receive coefficient h* = A / D. Finite since N_0 > 0.
pub fn lmmse_coefficient(scenario: &Scenario, g: &[f64], n_sig: f64) -> f64 {
    let q = DerivedQuantities::compute(scenario, g, n_sig);
    q.a / q.d
}

/// MSE of the linear estimate h·y for an arbitrary receive coefficient:
/// Σ_k |h·sqrt(η_k g_k) − 1|² + |h|²·(N_sig + N_0).
pub fn full_mse(scenario: &Scenario, alloc: &Allocation) -> f64 {
    let (hr, hi) = alloc.h;
    let h2 = hr * hr + hi * hi;
    let mut mse = 0.0;
    for (eta, gk) in scenario.eta_oac().iter().zip(&alloc.g) {
        let gain = (eta * gk).sqrt();
        let re = hr * gain - 1.0;
        let im = hi * gain;
        mse += re * re + im * im;
    }
    mse + h2 * (alloc.n_sig + scenario.n0)
}

/// MSE with h already at its LMMSE optimum: K − A²/D.
pub fn reduced_mse(scenario: &Scenario, g: &[f64], n_sig: f64) -> f64 {
    let q = DerivedQuantities::compute(scenario, g, n_sig);
    scenario.k as f64 - q.a * q.a / q.d
}

/// MSE floor: all OAC devices at full power, no communication interference.
///
/// This is the exact minimum when the OAC transmissivities are equal (the
/// standard split); with strongly skewed transmissivities and small noise,
/// backing a dominant device off the cap can do slightly better.
pub fn mse_min(scenario: &Scenario) -> f64 {
    let g = vec![scenario.pc; scenario.k];
    reduced_mse(scenario, &g, 0.0)
}

/// Maximum MSE, attained with all OAC powers at zero: exactly K.
pub fn mse_max(scenario: &Scenario) -> f64 {
    scenario.k as f64
}

/// Gradient of the reduced MSE with respect to the OAC powers, N_sig held
/// fixed: ∂MSE/∂g_k = −(D·A·sqrt(η_k)/sqrt(g_k) − A²·η_k)/D².
///
/// Components at or below [`EPSILON_FLOOR`] are lifted to it before the
/// 1/sqrt(g_k) evaluation.
pub fn mse_gradient(scenario: &Scenario, g: &[f64], n_sig: f64) -> Vec<f64> {
    let lifted: Vec<f64> = g.iter().map(|&gk| gk.max(EPSILON_FLOOR)).collect();
    let q = DerivedQuantities::compute(scenario, &lifted, n_sig);
    let d2 = q.d * q.d;
    scenario
        .eta_oac()
        .iter()
        .zip(&lifted)
        .map(|(&eta, &gk)| -(q.d * q.a * eta.sqrt() / gk.sqrt() - q.a * q.a * eta) / d2)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scen_k1() -> Scenario {
        Scenario::new(1, 1, vec![0.6, 0.4], 2.0, 10.0, 10.0).unwrap()
    }

    fn scen_k2() -> Scenario {
        Scenario::new(2, 2, vec![0.3, 0.3, 0.2, 0.2], 2.0, 10.0, 10.0).unwrap()
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::new(0, 1, vec![1.0], 2.0, 1.0, 1.0).is_err());
        assert!(Scenario::new(1, 0, vec![0.5], 2.0, 1.0, 1.0).is_err());
        assert!(Scenario::new(1, 1, vec![0.6, 0.4], -1.0, 1.0, 1.0).is_err());
        assert!(Scenario::new(1, 1, vec![0.6, 0.5], 2.0, 1.0, 1.0).is_err());
        assert!(Scenario::new(2, 0, vec![1.0, 0.0], 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lmmse_values() {
        let s = scen_k1();
        assert_eq!(lmmse_coefficient(&s, &[0.0], 0.0), 0.0);
        // sqrt(0.6·10) / (6 + 0 + 2) = sqrt(6)/8
        let h = lmmse_coefficient(&s, &[10.0], 0.0);
        assert!((h - 6f64.sqrt() / 8.0).abs() < 1e-15);
        assert!((h - 0.306186).abs() < 1e-6);
    }

    #[test]
    fn lmmse_matched_filter_limit() {
        // η g = 4, vanishing noise: h → sqrt(4)/4 = 0.5
        let s = Scenario::new(1, 1, vec![0.4, 0.6], 1e-12, 10.0, 10.0).unwrap();
        let h = lmmse_coefficient(&s, &[10.0], 0.0);
        assert!((h - 0.5).abs() < 1e-9);
    }

    #[test]
    fn full_mse_cases() {
        let s = scen_k2();
        let zero_h = Allocation::new_real(vec![5.0, 7.0], 1.0, 0.0);
        assert!((full_mse(&s, &zero_h) - 2.0).abs() < 1e-15);

        // g = 0, n_sig = 0: K + N0·|h|²
        let h = 0.7;
        let idle = Allocation::new_real(vec![0.0, 0.0], 0.0, h);
        assert!((full_mse(&s, &idle) - (2.0 + 2.0 * h * h)).abs() < 1e-15);
    }

    #[test]
    fn reduced_mse_values() {
        let s1 = scen_k1();
        assert_eq!(reduced_mse(&s1, &[0.0], 3.0), 1.0);
        assert!((reduced_mse(&s1, &[10.0], 0.0) - 0.25).abs() < 1e-15);

        let s2 = scen_k2();
        // 2 − (2·sqrt(3))²/8 = 2 − 12/8
        assert!((reduced_mse(&s2, &[10.0, 10.0], 0.0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn reduced_equals_full_at_lmmse() {
        let s = scen_k1();
        let h = lmmse_coefficient(&s, &[10.0], 0.0);
        let alloc = Allocation::new_real(vec![10.0], 0.0, h);
        assert!((full_mse(&s, &alloc) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn mse_bounds() {
        let s = scen_k2();
        assert!((mse_min(&s) - 0.5).abs() < 1e-14);
        assert_eq!(mse_max(&s), 2.0);
        let s1 = scen_k1();
        assert!((mse_min(&s1) - 0.25).abs() < 1e-15);
        // Pc → 0 degenerates toward K
        let tiny = Scenario::new(2, 2, vec![0.3, 0.3, 0.2, 0.2], 2.0, 1e-12, 10.0).unwrap();
        assert!((mse_min(&tiny) - 2.0).abs() < 1e-5);
    }

    #[test]
    fn gradient_negative_single_device() {
        let s = scen_k1();
        for g1 in [0.5, 2.0, 5.0, 9.9] {
            let grad = mse_gradient(&s, &[g1], 0.0);
            assert!(grad[0] < 0.0, "g1={g1}: {}", grad[0]);
        }
    }

    #[test]
    fn gradient_symmetry() {
        let s = scen_k2();
        let grad = mse_gradient(&s, &[4.0, 4.0], 1.5);
        assert!((grad[0] - grad[1]).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let s = scen_k2();
        let g = [5.0, 5.0];
        let n_sig = 1.0;
        let grad = mse_gradient(&s, &g, n_sig);
        let step = 1e-6;
        for k in 0..2 {
            let mut gp = g;
            let mut gm = g;
            gp[k] += step;
            gm[k] -= step;
            let fd = (reduced_mse(&s, &gp, n_sig) - reduced_mse(&s, &gm, n_sig)) / (2.0 * step);
            let rel = (grad[k] - fd).abs() / fd.abs();
            assert!(rel < 1e-5, "k={k}: analytic {} vs fd {fd}", grad[k]);
        }
    }
}
