//! Model parameters, initial state, and Fock-space truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical couplings of the three-level atom / two-field model.
///
/// Energies and times are measured in units of the common atom-field
/// coupling, so `lambda` is fixed at 1. The second field couples without
/// intensity dependence (`kappa2 = 0`) and both transitions are resonant
/// (`detuning = 0`). Those three values are part of the model definition
/// rather than tunables, but they are kept as explicit fields so every
/// serialized record states the regime it was produced in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Kerr coefficient of both field modes, in units of `lambda`.
    pub chi: f64,
    /// Intensity-dependence strength of the field-1 coupling, `f(N) = sqrt(1 + kappa N)`.
    pub kappa: f64,
    /// Atom-field coupling strength; fixed to 1 (sets the time unit).
    pub lambda: f64,
    /// Intensity-dependence of the field-2 coupling; fixed to 0.
    pub kappa2: f64,
    /// Common detuning `omega_3 - omega_i - Omega_i`; fixed to 0.
    pub detuning: f64,
}

impl ModelParams {
    /// Couplings for Kerr coefficient `chi > 0` and intensity parameter
    /// `0 <= kappa <= 1`.
    pub fn new(chi: f64, kappa: f64) -> Result<Self> {
        if !chi.is_finite() || chi <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "chi must be finite and positive, got {chi}"
            )));
        }
        if !kappa.is_finite() || !(0.0..=1.0).contains(&kappa) {
            return Err(Error::InvalidParameter(format!(
                "kappa must lie in [0, 1], got {kappa}"
            )));
        }
        Ok(Self {
            chi,
            kappa,
            lambda: 1.0,
            kappa2: 0.0,
            detuning: 0.0,
        })
    }
}

/// Initial product state: atom in level 1, both fields in coherent states of
/// equal mean photon number.
///
/// Only `|alpha|^2` enters any observable: the invariant subspaces for
/// different `(n, m)` are mutually orthogonal, so no interference term
/// sensitive to the phase of `alpha` survives in `<N1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    /// Mean photon number `|alpha|^2` of each field.
    pub alpha_sq: f64,
    /// Initial atomic level; fixed to 1.
    pub atom_level: u8,
}

impl InitialState {
    pub fn new(alpha_sq: f64) -> Result<Self> {
        if !alpha_sq.is_finite() || alpha_sq < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha_sq must be finite and non-negative, got {alpha_sq}"
            )));
        }
        Ok(Self {
            alpha_sq,
            atom_level: 1,
        })
    }
}

/// Per-field photon-number cutoff used when expanding the coherent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockTruncation {
    /// Largest photon number kept in each field.
    pub n_max: usize,
    /// Poisson upper-tail mass allowed above `n_max` per field.
    pub tail_eps: f64,
}

/// Smallest cutoff whose Poisson(`alpha_sq`) upper-tail mass is below
/// `tail_eps`: the minimal `n` with `P(X > n) < tail_eps`.
pub fn truncation_bound(alpha_sq: f64, tail_eps: f64) -> Result<FockTruncation> {
    if !alpha_sq.is_finite() || alpha_sq < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha_sq must be finite and non-negative, got {alpha_sq}"
        )));
    }
    if !tail_eps.is_finite() || !(1e-100..1.0).contains(&tail_eps) {
        return Err(Error::InvalidParameter(format!(
            "tail_eps must lie in [1e-100, 1), got {tail_eps}"
        )));
    }
    let mu = alpha_sq;
    let mut pmf = (-mu).exp();
    let mut tail = 1.0 - pmf;
    let mut n = 0usize;
    while tail >= tail_eps {
        n += 1;
        pmf *= mu / n as f64;
        tail -= pmf;
        if pmf == 0.0 && tail >= tail_eps {
            // The pmf has underflowed; the remaining mass is below f64
            // resolution, so the bound is already met for any reachable eps.
            break;
        }
    }
    Ok(FockTruncation {
        n_max: n,
        tail_eps,
    })
}

impl FockTruncation {
    /// Default production truncation: tail mass below 1e-12 per field, with a
    /// floor of `mu + 10 sqrt(mu)` for comfortable margin on every weighted
    /// sum and a cap of `mu + 12 sqrt(mu) + 20` to bound the block count.
    pub fn standard(alpha_sq: f64) -> Result<Self> {
        const TAIL_EPS: f64 = 1e-12;
        let bound = truncation_bound(alpha_sq, TAIL_EPS)?;
        let mu = alpha_sq;
        let floor = (mu + 10.0 * mu.sqrt()).ceil() as usize;
        let cap = (mu + 12.0 * mu.sqrt()).ceil() as usize + 20;
        Ok(Self {
            n_max: bound.n_max.max(floor).min(cap),
            tail_eps: TAIL_EPS,
        })
    }
}

/// Poisson(`mean`) probabilities `q(0) ..= q(n_max)`.
pub fn poisson_pmf(mean: f64, n_max: usize) -> Vec<f64> {
    let mut q = Vec::with_capacity(n_max + 1);
    let mut term = (-mean).exp();
    q.push(term);
    for n in 1..=n_max {
        term *= mean / n as f64;
        q.push(term);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent tail oracle: pmf through `ln Gamma` instead of the
    /// running-product recursion, summed top-down.
    fn poisson_tail_above(mu: f64, n: usize) -> f64 {
        use statrs::function::gamma::ln_gamma;
        if mu == 0.0 {
            return 0.0;
        }
        // Sum q(k) for k = n+1 .. far beyond the mass; descending terms.
        let hi = ((mu + 20.0 * mu.sqrt()) as usize).max(n + 200);
        let mut tail = 0.0;
        for k in (n + 1..=hi).rev() {
            let ln_q = -mu + k as f64 * mu.ln() - ln_gamma(k as f64 + 1.0);
            tail += ln_q.exp();
        }
        tail
    }

    #[test]
    fn zero_intensity_needs_no_photons() {
        assert_eq!(truncation_bound(0.0, 1e-12).unwrap().n_max, 0);
    }

    #[test]
    fn loose_tolerance_stays_near_the_mean() {
        let b = truncation_bound(25.0, 0.5).unwrap();
        assert!(b.n_max <= 25, "got {}", b.n_max);
        // Frozen from the ln-gamma oracle: P(X > 24) = 0.527, P(X > 25) = 0.447.
        assert_eq!(b.n_max, 25);
        assert!(poisson_tail_above(25.0, b.n_max) < 0.5);
        assert!(poisson_tail_above(25.0, b.n_max - 1) >= 0.5);
    }

    #[test]
    fn tight_tolerance_matches_oracle_and_is_minimal() {
        for mu in [20.0, 25.0, 30.0] {
            let b = truncation_bound(mu, 1e-12).unwrap();
            assert!(
                poisson_tail_above(mu, b.n_max) < 1e-12,
                "tail at n_max too heavy for mu={mu}"
            );
            assert!(
                poisson_tail_above(mu, b.n_max - 1) >= 1e-12,
                "n_max not minimal for mu={mu}"
            );
        }
    }

    #[test]
    fn standard_truncation_has_margin_and_cap() {
        let t = FockTruncation::standard(25.0).unwrap();
        // Floor mu + 10 sqrt(mu) = 75 dominates the raw 1e-12 bound here.
        assert_eq!(t.n_max, 75);
        let cap = (25.0_f64 + 12.0 * 5.0).ceil() as usize + 20;
        assert!(t.n_max <= cap);
        assert!(poisson_tail_above(25.0, t.n_max) < 1e-12);
    }

    #[test]
    fn pmf_matches_ln_gamma_route() {
        use statrs::function::gamma::ln_gamma;
        let q = poisson_pmf(25.0, 80);
        for (k, &qk) in q.iter().enumerate() {
            let ln_q = -25.0 + k as f64 * 25f64.ln() - ln_gamma(k as f64 + 1.0);
            // The log-route reference itself carries ~|ln q| * eps relative
            // error once exponentiated, so the comparison cannot be tighter.
            assert!(
                (qk - ln_q.exp()).abs() <= 5e-12 * ln_q.exp().max(1e-300),
                "pmf mismatch at k={k}: {qk} vs {}",
                ln_q.exp()
            );
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(ModelParams::new(0.0, 0.0).is_err());
        assert!(ModelParams::new(5.0, -0.1).is_err());
        assert!(ModelParams::new(5.0, 1.5).is_err());
        assert!(ModelParams::new(f64::NAN, 0.0).is_err());
        assert!(InitialState::new(-1.0).is_err());
        assert!(truncation_bound(25.0, 0.0).is_err());
        assert!(truncation_bound(25.0, 1.0).is_err());
        assert!(truncation_bound(-1.0, 0.5).is_err());
    }

    #[test]
    fn model_params_fixed_fields() {
        let p = ModelParams::new(5.0, 0.0033).unwrap();
        assert_eq!(p.lambda, 1.0);
        assert_eq!(p.kappa2, 0.0);
        assert_eq!(p.detuning, 0.0);
    }
}
