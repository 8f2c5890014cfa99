//! eMBB per-UE rates over the analog fronthaul.
//!
//! Every scheme reduces to one log-det kernel evaluated on a per-realization
//! effective channel `(D·H) ⊗ C` and noise covariance
//! `diag(1 + i_k) ⊗ C² + σ²·I`, where `C` is the equivalent cable channel,
//! `σ²` the combined cable noise, `D` a diagonal mask on the radio channel
//! rows and `i_k` the URLLC interference power left in cell `k`:
//!
//! | scheme      | `D`        | `i_k`               |
//! |-------------|------------|---------------------|
//! | OMA         | `I`        | 0                   |
//! | puncturing  | `B = I−A`  | 0                   |
//! | TIN         | `I`        | `β²P_U·a_k`         |
//! | SIC         | `I − AE`   | `ρ²β²P_U·a_k(1−e_k)` |
//!
//! The expectation over `A`, `B`, `E` is handled by [`crate::expectation`].

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::channel::{build_equivalent_fronthaul, build_radio_channel, effective_cable_noise_variance};
use crate::error::{Error, Result};
use crate::expectation::{
    expectation, CellDistribution, Evaluation, ExpectationPolicy, FailureModel, InterferenceState,
};
use crate::linalg::{Cholesky, Matrix};
use crate::params::{AccessMode, SystemParams};
use crate::scalar::Real;

/// Diagonal jitter added to a noise covariance that fails to factor.
pub const JITTER: f64 = 1e-12;

/// `log₂det(I + P·R⁻¹HHᵀ)`, computed as `log₂det(R + P·HHᵀ) − log₂det(R)`
/// from two Cholesky factorizations. Both matrices are symmetrized first.
pub fn logdet_rate_kernel<T: Real>(h: &Matrix<T>, r: &Matrix<T>, p: T) -> Result<T> {
    check_kernel_shapes(h, r)?;
    let r = r.symmetrize()?;
    let base = Cholesky::factor(&r)?;
    kernel_with_base(h, &r, &base, p)
}

/// Kernel value plus whether jitter was needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue<T> {
    pub bits: T,
    pub jittered: bool,
}

/// Like [`logdet_rate_kernel`], but when `R` is not numerically positive
/// definite retries once with `R + 1e-12·I` and reports it.
pub fn logdet_rate_kernel_regularized<T: Real>(
    h: &Matrix<T>,
    r: &Matrix<T>,
    p: T,
) -> Result<KernelValue<T>> {
    check_kernel_shapes(h, r)?;
    let r = r.symmetrize()?;
    match Cholesky::factor(&r) {
        Ok(base) => Ok(KernelValue { bits: kernel_with_base(h, &r, &base, p)?, jittered: false }),
        Err(Error::Numerical(_)) => {
            let r = r.add_diagonal(T::of(JITTER));
            let base = Cholesky::factor(&r)?;
            Ok(KernelValue { bits: kernel_with_base(h, &r, &base, p)?, jittered: true })
        }
        Err(e) => Err(e),
    }
}

fn check_kernel_shapes<T: Real>(h: &Matrix<T>, r: &Matrix<T>) -> Result<()> {
    if !h.is_square() || !r.is_square() || h.rows() != r.rows() {
        return Err(Error::dimension(format!(
            "kernel needs square H and R of equal size, got {}x{} and {}x{}",
            h.rows(),
            h.cols(),
            r.rows(),
            r.cols()
        )));
    }
    Ok(())
}

fn kernel_with_base<T: Real>(h: &Matrix<T>, r: &Matrix<T>, base: &Cholesky<T>, p: T) -> Result<T> {
    if !(p >= T::zero()) || !p.is_finite() {
        return Err(Error::domain(format!("power {p} must be finite and non-negative")));
    }
    let signal = h.gram().scale(p);
    let total = r.try_add(&signal)?.symmetrize()?;
    let full = Cholesky::factor(&total)?;
    let bits = (full.ln_det() - base.ln_det()) / T::LN_2();
    Ok(bits.max(T::zero()))
}

/// The eMBB rate schemes, independent of the fronthaul model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmbbScheme {
    Oma,
    Puncturing,
    Tin,
    Sic,
}

/// Reduced-form channel objects shared by every realization.
#[derive(Debug, Clone)]
pub struct EmbbModel<T> {
    radio: Matrix<T>,
    fronthaul: Matrix<T>,
    fronthaul_sq: Matrix<T>,
    cable_noise: T,
    mu: T,
}

impl<T: Real> EmbbModel<T> {
    /// Model over the real fronthaul; the cable noise depends on the access
    /// mode through the power scaling.
    pub fn new(params: &SystemParams<T>, mode: AccessMode) -> Result<Self> {
        params.validate_for(mode)?;
        let fronthaul = build_equivalent_fronthaul(params.gamma, params.l_s, params.mu)?;
        Ok(Self {
            radio: build_radio_channel(params.cells, params.alpha)?,
            fronthaul_sq: fronthaul.gram(),
            fronthaul,
            cable_noise: effective_cable_noise_variance(params, mode)?,
            mu: params.mu_value(),
        })
    }

    /// Ideal fronthaul: unit 1x1 cable channel, no cable noise, `μ = 1`.
    pub fn ideal(params: &SystemParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            radio: build_radio_channel(params.cells, params.alpha)?,
            fronthaul: Matrix::identity(1),
            fronthaul_sq: Matrix::identity(1),
            cable_noise: T::zero(),
            mu: T::one(),
        })
    }

    pub fn with_cable_noise(mut self, variance: T) -> Self {
        self.cable_noise = variance;
        self
    }

    pub fn cells(&self) -> usize {
        self.radio.rows()
    }

    pub fn radio(&self) -> &Matrix<T> {
        &self.radio
    }

    pub fn fronthaul(&self) -> &Matrix<T> {
        &self.fronthaul
    }

    pub fn cable_noise(&self) -> T {
        self.cable_noise
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// Effective channel `(diag(row_gain)·H) ⊗ C` and noise covariance
    /// `diag(1 + interference) ⊗ C² + σ²·I`.
    pub fn effective(&self, row_gain: &[T], interference: &[T]) -> Result<(Matrix<T>, Matrix<T>)> {
        let m = self.cells();
        if row_gain.len() != m || interference.len() != m {
            return Err(Error::dimension(format!(
                "state vectors must have length {m}, got {} and {}",
                row_gain.len(),
                interference.len()
            )));
        }
        let h = self.radio.scale_rows(row_gain).kron(&self.fronthaul);
        let load: Vec<T> = interference.iter().map(|&i| T::one() + i).collect();
        let r = Matrix::from_diag(&load).kron(&self.fronthaul_sq).add_diagonal(self.cable_noise);
        Ok((h, r))
    }

    /// `μ/M · kernel` for one realization.
    pub fn realization_rate(
        &self,
        row_gain: &[T],
        interference: &[T],
        power: T,
    ) -> Result<KernelValue<T>> {
        let (h, r) = self.effective(row_gain, interference)?;
        let k = logdet_rate_kernel_regularized(&h, &r, power)?;
        Ok(KernelValue { bits: k.bits * self.mu / T::of_usize(self.cells()), ..k })
    }
}

/// Per-cell row gain and interference power of one scheme in one state.
pub fn state_terms<T: Real>(
    scheme: EmbbScheme,
    state: &InterferenceState<T>,
    params: &SystemParams<T>,
) -> (Vec<T>, Vec<T>) {
    let ind = |x: bool| if x { T::one() } else { T::zero() };
    let urllc = params.beta_sq * params.p_u;
    let residual = params.rho * params.rho * urllc;
    let m = state.len();
    match scheme {
        EmbbScheme::Oma => (vec![T::one(); m], vec![T::zero(); m]),
        EmbbScheme::Puncturing => (state.b.iter().map(|&b| ind(b)).collect(), vec![T::zero(); m]),
        EmbbScheme::Tin => (vec![T::one(); m], state.a.iter().map(|&a| ind(a) * urllc).collect()),
        EmbbScheme::Sic => (
            (0..m).map(|k| T::one() - ind(state.a[k] && state.e[k])).collect(),
            (0..m).map(|k| ind(state.a[k] && !state.e[k]) * residual).collect(),
        ),
    }
}

/// An eMBB rate with its evaluation details.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbbRate<T> {
    pub rate: T,
    /// Monte Carlo standard error; zero for deterministic or exact results.
    pub std_err: T,
    pub evaluation: Evaluation,
    /// Realizations whose noise covariance needed diagonal jitter.
    pub jittered: usize,
}

/// Evaluates `scheme` on `model`. `eps_u_d` and `failures` only matter for
/// SIC.
pub fn scheme_rate<T: Real>(
    model: &EmbbModel<T>,
    params: &SystemParams<T>,
    scheme: EmbbScheme,
    eps_u_d: T,
    failures: FailureModel,
    policy: &ExpectationPolicy,
) -> Result<EmbbRate<T>> {
    let m = model.cells();
    if m != params.cells {
        return Err(Error::dimension("model and parameters disagree on the number of cells"));
    }
    if scheme == EmbbScheme::Oma {
        params.validate_for(AccessMode::Oma)?;
        let share = T::one() - T::one() / T::of_usize(params.l_u);
        let boosted = params.p_b / share;
        let k = model.realization_rate(&vec![T::one(); m], &vec![T::zero(); m], boosted)?;
        return Ok(EmbbRate {
            rate: share * k.bits,
            std_err: T::zero(),
            evaluation: Evaluation::Exact { states: 1 },
            jittered: usize::from(k.jittered),
        });
    }
    params.validate()?;
    let dist = match scheme {
        EmbbScheme::Sic => CellDistribution::with_failures(params.q, eps_u_d, failures)?,
        _ => CellDistribution::arrivals(params.q)?,
    };
    let jittered = AtomicUsize::new(0);
    let e = expectation(m, &dist, policy, |state| {
        let (gain, interference) = state_terms(scheme, state, params);
        let k = model.realization_rate(&gain, &interference, params.p_b)?;
        if k.jittered {
            jittered.fetch_add(1, Ordering::Relaxed);
        }
        Ok(k.bits)
    })?;
    Ok(EmbbRate {
        rate: e.mean,
        std_err: e.std_err,
        evaluation: e.evaluation,
        jittered: jittered.into_inner(),
    })
}

fn noma_model<T: Real>(params: &SystemParams<T>) -> Result<EmbbModel<T>> {
    EmbbModel::new(params, AccessMode::Noma)
}

/// OMA eMBB rate: deterministic, with the power boost `P_B/(1−1/L_U)` over
/// the `L_U − 1` owned minislots.
pub fn oma_embb_rate<T: Real>(params: &SystemParams<T>) -> Result<T> {
    let model = EmbbModel::new(params, AccessMode::Oma)?;
    let policy = ExpectationPolicy::default();
    Ok(scheme_rate(&model, params, EmbbScheme::Oma, T::zero(), FailureModel::Conditional, &policy)?
        .rate)
}

/// NOMA with puncturing: cells with a URLLC arrival are discarded.
pub fn noma_puncturing_rate<T: Real>(
    params: &SystemParams<T>,
    policy: &ExpectationPolicy,
) -> Result<EmbbRate<T>> {
    let model = noma_model(params)?;
    scheme_rate(&model, params, EmbbScheme::Puncturing, T::zero(), FailureModel::Conditional, policy)
}

/// NOMA treating URLLC interference as noise.
pub fn noma_tin_rate<T: Real>(
    params: &SystemParams<T>,
    policy: &ExpectationPolicy,
) -> Result<EmbbRate<T>> {
    let model = noma_model(params)?;
    scheme_rate(&model, params, EmbbScheme::Tin, T::zero(), FailureModel::Conditional, policy)
}

/// NOMA with SIC of the URLLC signal at the edge nodes. Cells whose URLLC
/// decoding failed are discarded; decoded ones leave residual interference
/// `ρ²β²P_U`.
pub fn noma_sic_rate<T: Real>(
    params: &SystemParams<T>,
    eps_u_d: T,
    policy: &ExpectationPolicy,
) -> Result<EmbbRate<T>> {
    noma_sic_rate_with(params, eps_u_d, FailureModel::Conditional, policy)
}

/// [`noma_sic_rate`] with an explicit decode-failure model.
pub fn noma_sic_rate_with<T: Real>(
    params: &SystemParams<T>,
    eps_u_d: T,
    failures: FailureModel,
    policy: &ExpectationPolicy,
) -> Result<EmbbRate<T>> {
    let model = noma_model(params)?;
    scheme_rate(&model, params, EmbbScheme::Sic, eps_u_d, failures, policy)
}

/// Baseline over an ideal fronthaul. SIC uses the NOMA decoding target
/// `ε_U`.
pub fn ideal_fronthaul_rate<T: Real>(
    params: &SystemParams<T>,
    scheme: EmbbScheme,
    policy: &ExpectationPolicy,
) -> Result<EmbbRate<T>> {
    let model = EmbbModel::ideal(params)?;
    scheme_rate(&model, params, scheme, params.eps_u, FailureModel::Conditional, policy)
}
