//! URLLC per-UE rates from the finite-blocklength normal approximation.
//!
//! Under OMA a URLLC packet waits up to `L_U` minislots for its reserved
//! slot; extra arrivals in between are dropped (blockage), which eats into
//! the error budget left for decoding. Under NOMA every packet is sent
//! immediately but sees the full eMBB interference.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{AccessMode, SystemParams};
use crate::qfunc::q_function_inverse;
use crate::scalar::Real;

/// Split of the OMA error budget between blockage and decoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockageBudget<T> {
    /// `Σ p(n)·n/(n+1)`.
    pub blockage_prob: T,
    /// `Σ p(n)/(n+1)`, the probability mass on which decoding errors count.
    pub weight: T,
    /// Decoding error target left after blockage.
    pub eps_u_d: T,
    pub feasible: bool,
}

/// Intermediate and final quantities of one URLLC rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UrllcResult<T> {
    pub rate: T,
    /// Decoding error target; zero when blockage alone exhausts `ε_U`.
    pub eps_u_d: T,
    pub blockage_prob: T,
    pub sinr: T,
    /// Channel dispersion `sinr / (1 + sinr)`.
    pub dispersion: T,
    pub feasible: bool,
}

fn binomial_pmf<T: Real>(trials: usize, q: T) -> Vec<T> {
    let mut pmf = Vec::with_capacity(trials + 1);
    let mut coeff = T::one();
    for n in 0..=trials {
        if n > 0 {
            coeff = coeff * T::of_usize(trials + 1 - n) / T::of_usize(n);
        }
        pmf.push(coeff * q.powi(n as i32) * (T::one() - q).powi((trials - n) as i32));
    }
    pmf
}

/// Solves the OMA reliability constraint for the decoding error target.
///
/// `N ~ Bin(L_U − 1, q)` counts the extra packets generated while waiting;
/// the transmitted one is picked uniformly among `N + 1`, so the overall
/// error is `blockage + weight·ε_D`, set equal to `ε_U` and solved for
/// `ε_D`. Infeasibility is reported through the flag, not as an error.
pub fn oma_blockage_and_target<T: Real>(q: T, l_u: usize, eps_u: T) -> Result<BlockageBudget<T>> {
    if l_u == 0 {
        return Err(Error::domain("L_U must be at least 1"));
    }
    if !(q >= T::zero() && q <= T::one()) {
        return Err(Error::domain(format!("q = {q} outside [0, 1]")));
    }
    if !(eps_u > T::zero() && eps_u < T::one()) {
        return Err(Error::domain(format!("eps_u = {eps_u} outside (0, 1)")));
    }
    let pmf = binomial_pmf(l_u - 1, q);
    let mut blockage = T::zero();
    let mut weight = T::zero();
    for (n, &p) in pmf.iter().enumerate() {
        let share = T::one() / T::of_usize(n + 1);
        blockage = blockage + p * T::of_usize(n) * share;
        weight = weight + p * share;
    }
    let eps_u_d = (eps_u - blockage) / weight;
    Ok(BlockageBudget {
        blockage_prob: blockage,
        weight,
        eps_u_d,
        feasible: eps_u_d > T::zero() && eps_u_d < T::one(),
    })
}

/// Normal approximation `log₂(1+s) − √(V/n_F)·Q⁻¹(ε)` with `V = s/(1+s)`,
/// clamped at zero.
pub fn finite_blocklength_rate<T: Real>(sinr: T, n_f: usize, eps_d: T) -> Result<T> {
    if !(sinr > T::zero()) || !sinr.is_finite() {
        return Err(Error::domain(format!("sinr = {sinr} must be finite and positive")));
    }
    if n_f == 0 {
        return Err(Error::domain("blocklength n_F must be positive"));
    }
    let dispersion = sinr / (T::one() + sinr);
    let penalty = (dispersion / T::of_usize(n_f)).sqrt() * q_function_inverse(eps_d)?;
    Ok(((T::one() + sinr).log2() - penalty).max(T::zero()))
}

/// URLLC per-UE rate for the given access mode.
///
/// OMA: interference-free SINR `β²P_U` with the blockage-adjusted decoding
/// target. NOMA: SINR `β²P_U / (1 + (1+2α²)P_B)` and the full target `ε_U`.
pub fn urllc_rate<T: Real>(params: &SystemParams<T>, mode: AccessMode) -> Result<UrllcResult<T>> {
    params.validate_for(mode)?;
    let signal = params.beta_sq * params.p_u;
    let (sinr, budget) = match mode {
        AccessMode::Oma => (signal, oma_blockage_and_target(params.q, params.l_u, params.eps_u)?),
        AccessMode::Noma => {
            let interference = (T::one() + T::of(2.0) * params.alpha_sq()) * params.p_b;
            let budget = BlockageBudget {
                blockage_prob: T::zero(),
                weight: T::one(),
                eps_u_d: params.eps_u,
                feasible: true,
            };
            (signal / (T::one() + interference), budget)
        }
    };
    let dispersion = sinr / (T::one() + sinr);
    let rate = if budget.feasible && sinr > T::zero() {
        finite_blocklength_rate(sinr, params.n_f, budget.eps_u_d)?
    } else {
        T::zero()
    };
    Ok(UrllcResult {
        rate,
        // an exhausted budget is reported as zero, not as a negative target
        eps_u_d: budget.eps_u_d.max(T::zero()),
        blockage_prob: budget.blockage_prob,
        sinr,
        dispersion,
        feasible: rate > T::zero(),
    })
}
