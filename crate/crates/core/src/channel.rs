//! Deterministic channel objects: the circulant Wyner radio channel, the
//! cable crosstalk channel, its post-combining equivalent, and the cable
//! power scaling.

use std::fmt::Write as _;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::numfmt::format_sig;
use crate::params::{AccessMode, CableBandwidth, SystemParams};
use crate::scalar::Real;

/// Circulant `M x M` radio channel with first column `[1, α, 0, …, 0, α]ᵀ`.
pub fn build_radio_channel<T: Real>(cells: usize, alpha: T) -> Result<Matrix<T>> {
    if cells < 3 {
        return Err(Error::dimension(format!("radio channel needs M >= 3, got {cells}")));
    }
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(Error::domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(Matrix::from_fn(cells, cells, |i, j| {
        let d = (i + cells - j) % cells;
        if d == 0 {
            T::one()
        } else if d == 1 || d == cells - 1 {
            alpha
        } else {
            T::zero()
        }
    }))
}

/// `γ·𝟙𝟙ᵀ + (1−γ)·I` of size `n`.
fn coupled_identity<T: Real>(n: usize, off: T, diag_shift: T) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| if i == j { off + diag_shift } else { off })
}

/// Cable channel `H_c = γ𝟙𝟙ᵀ + (1−γ)I` over `l_S` pairs.
pub fn build_fronthaul_channel<T: Real>(gamma: T, l_s: usize) -> Result<Matrix<T>> {
    if l_s == 0 {
        return Err(Error::dimension("l_s must be positive"));
    }
    if !(gamma >= T::zero()) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma = {gamma} must be finite and non-negative")));
    }
    Ok(coupled_identity(l_s, gamma, T::one() - gamma))
}

/// Equivalent cable channel after replica combining,
/// `γη𝟙𝟙ᵀ + (1−γ)I` of size `1/μ` with `η = μ·l_S`.
pub fn build_equivalent_fronthaul<T: Real>(
    gamma: T,
    l_s: usize,
    mu: CableBandwidth,
) -> Result<Matrix<T>> {
    if l_s == 0 || *mu.numer() == 0 {
        return Err(Error::dimension("l_s and mu must be positive"));
    }
    if !(gamma >= T::zero()) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma = {gamma} must be finite and non-negative")));
    }
    let inv = mu.recip();
    let eta = mu * Ratio::from_integer(l_s as u32);
    if !inv.is_integer() || !eta.is_integer() || eta.to_integer() == 0 {
        return Err(Error::domain(format!(
            "need integer 1/mu and eta >= 1, got 1/mu = {inv}, eta = {eta}"
        )));
    }
    let eta = T::of_usize(eta.to_integer() as usize);
    Ok(coupled_identity(inv.to_integer() as usize, gamma * eta, T::one() - gamma))
}

/// Squared cable power scaling `λ² = P_c / (δ·P_B·(1+2α²) + 1)` with
/// `δ = (1 − 1/L_U)⁻¹` under OMA and `δ = 1` under NOMA.
pub fn compute_lambda_sq<T: Real>(params: &SystemParams<T>, mode: AccessMode) -> Result<T> {
    params.validate_for(mode)?;
    let delta = power_boost(params, mode);
    let two = T::of(2.0);
    Ok(params.p_c / (delta * params.p_b * (T::one() + two * params.alpha_sq()) + T::one()))
}

/// eMBB power boost `δ`: eMBB users concentrate their frame budget on the
/// `L_U − 1` minislots they own under OMA.
pub(crate) fn power_boost<T: Real>(params: &SystemParams<T>, mode: AccessMode) -> T {
    match mode {
        AccessMode::Oma => {
            let l_u = T::of_usize(params.l_u);
            T::one() / (T::one() - T::one() / l_u)
        }
        AccessMode::Noma => T::one(),
    }
}

/// Per-entry variance `1/(η·λ²)` of the combined, rescaled cable noise.
pub fn effective_cable_noise_variance<T: Real>(
    params: &SystemParams<T>,
    mode: AccessMode,
) -> Result<T> {
    let lambda_sq = compute_lambda_sq(params, mode)?;
    Ok(T::one() / (T::of_usize(params.eta()) * lambda_sq))
}

/// SNR gain of the combined cable link over a single unit-gain pair, given
/// the scalar equivalent channel (full redundancy) and `η`:
/// `(H_c^η)² / (1/η)`.
pub fn combining_snr_gain<T: Real>(gamma: T, l_s: usize) -> Result<T> {
    let eq = build_equivalent_fronthaul(gamma, l_s, Ratio::from_integer(1))?;
    let g = eq[(0, 0)];
    Ok(g * g * T::of_usize(l_s))
}

/// All deterministic channel matrices for one parameter set and access mode.
#[derive(Debug, Clone)]
pub struct ChannelSet<T> {
    pub radio: Matrix<T>,
    pub fronthaul: Matrix<T>,
    pub equivalent_fronthaul: Matrix<T>,
    pub lambda_sq: T,
    pub mode: AccessMode,
}

impl<T: Real> ChannelSet<T> {
    pub fn build(params: &SystemParams<T>, mode: AccessMode) -> Result<Self> {
        params.validate_for(mode)?;
        Ok(Self {
            radio: build_radio_channel(params.cells, params.alpha)?,
            fronthaul: build_fronthaul_channel(params.gamma, params.l_s)?,
            equivalent_fronthaul: build_equivalent_fronthaul(params.gamma, params.l_s, params.mu)?,
            lambda_sq: compute_lambda_sq(params, mode)?,
            mode,
        })
    }

    /// Plain-text dump: each matrix row-major, 12 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode {}", self.mode);
        let _ = writeln!(out, "lambda_sq {}", format_sig(self.lambda_sq.to_f64_lossy(), 12));
        for (name, m) in [
            ("H", &self.radio),
            ("H_c", &self.fronthaul),
            ("H_c_eta", &self.equivalent_fronthaul),
        ] {
            let _ = writeln!(out, "{name} {}x{}", m.rows(), m.cols());
            for i in 0..m.rows() {
                let row: Vec<String> =
                    m.row(i).iter().map(|x| format_sig(x.to_f64_lossy(), 12)).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }
}
