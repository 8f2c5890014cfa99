//! System parameters of the uplink model.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{db_to_linear, Real};

/// Normalized cable bandwidth `μ = l_F / n_F`, kept exact so that the
/// integrality of `1/μ` and `η = μ·l_S` can be checked without rounding.
pub type CableBandwidth = Ratio<u32>;

/// Parses a rational such as `1/4` or `1`. Decimal notation is rejected.
pub fn parse_cable_bandwidth(s: &str) -> Result<CableBandwidth> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: u32 = n.trim().parse().map_err(|_| Error::domain(format!("bad numerator in mu '{s}'")))?;
            let d: u32 = d.trim().parse().map_err(|_| Error::domain(format!("bad denominator in mu '{s}'")))?;
            if d == 0 {
                return Err(Error::domain(format!("mu '{s}' has zero denominator")));
            }
            Ratio::new(n, d)
        }
        None => Ratio::from_integer(
            s.parse().map_err(|_| Error::domain(format!("mu '{s}' is not a rational p/q")))?,
        ),
    };
    Ok(parsed)
}

/// Radio access scheme shared by URLLC and eMBB users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessMode {
    /// One minislot in every `L_U` reserved for URLLC.
    Oma,
    /// URLLC transmits immediately on top of the eMBB frame.
    Noma,
}

impl fmt::Display for AccessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessMode::Oma => "OMA",
            AccessMode::Noma => "NOMA",
        })
    }
}

/// All scalar parameters of the model. Powers are linear-scale per-symbol
/// budgets; use [`SystemParams::with_powers_db`] to set them in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams<T> {
    /// Number of cells / edge nodes `M`.
    pub cells: usize,
    /// Radio frequency channels per minislot `n_F`.
    pub n_f: usize,
    /// Minislots per frame `n_T`. Only a normalization; never enters rates.
    pub n_t: usize,
    /// Twisted pairs per fronthaul cable `l_S`.
    pub l_s: usize,
    /// Normalized cable bandwidth `μ`.
    pub mu: CableBandwidth,
    /// Inter-cell eMBB amplitude gain.
    pub alpha: T,
    /// URLLC power gain `β²`.
    pub beta_sq: T,
    /// Cable crosstalk coupling. Values above 1 are accepted but lie outside
    /// the regime the model was built for.
    pub gamma: T,
    pub p_b: T,
    pub p_u: T,
    pub p_c: T,
    /// Per-minislot URLLC arrival probability.
    pub q: T,
    /// URLLC target error probability.
    pub eps_u: T,
    /// Worst-case URLLC access latency in minislots.
    pub l_u: usize,
    /// Residual SIC interference amplitude.
    pub rho: T,
}

impl<T: Real> Default for SystemParams<T> {
    /// Reference operating point: six cells, 60 subcarriers, four pairs,
    /// `P_B = P_c = 7 dB`, `P_U = 10 dB`, `ε_U = 1e-3`, `L_U = 2`,
    /// `α² = 0.2`, `γ² = 0.5`, `μ = 1`, `q = 1e-3`, perfect SIC.
    fn default() -> Self {
        Self {
            cells: 6,
            n_f: 60,
            n_t: 100,
            l_s: 4,
            mu: Ratio::from_integer(1),
            alpha: T::of(0.2).sqrt(),
            beta_sq: T::one(),
            gamma: T::of(0.5).sqrt(),
            p_b: db_to_linear(T::of(7.0)),
            p_u: db_to_linear(T::of(10.0)),
            p_c: db_to_linear(T::of(7.0)),
            q: T::of(1e-3),
            eps_u: T::of(1e-3),
            l_u: 2,
            rho: T::zero(),
        }
    }
}

impl<T: Real> SystemParams<T> {
    pub fn with_alpha_sq(mut self, alpha_sq: T) -> Self {
        self.alpha = alpha_sq.sqrt();
        self
    }

    pub fn with_gamma_sq(mut self, gamma_sq: T) -> Self {
        self.gamma = gamma_sq.sqrt();
        self
    }

    pub fn with_rho_sq(mut self, rho_sq: T) -> Self {
        self.rho = rho_sq.sqrt();
        self
    }

    /// Sets `P_B`, `P_U`, `P_c` from decibel values.
    pub fn with_powers_db(mut self, p_b_db: T, p_u_db: T, p_c_db: T) -> Self {
        self.p_b = db_to_linear(p_b_db);
        self.p_u = db_to_linear(p_u_db);
        self.p_c = db_to_linear(p_c_db);
        self
    }

    pub fn alpha_sq(&self) -> T {
        self.alpha * self.alpha
    }

    /// Number of radio sub-bands carried on distinct pair groups, `1/μ`.
    pub fn subbands(&self) -> usize {
        (self.mu.recip().to_integer()) as usize
    }

    /// Bandwidth amplification factor `η = μ·l_S`.
    pub fn eta(&self) -> usize {
        (self.mu * Ratio::from_integer(self.l_s as u32)).to_integer() as usize
    }

    /// Cable frequency channels per pair, `l_F = μ·n_F`.
    pub fn l_f(&self) -> usize {
        (self.mu * Ratio::from_integer(self.n_f as u32)).to_integer() as usize
    }

    pub fn mu_value(&self) -> T {
        T::of(*self.mu.numer() as f64) / T::of(*self.mu.denom() as f64)
    }

    /// Checks every structural and range invariant. Access-mode specific
    /// checks (`L_U ≥ 2` for OMA) are done by the operations that need them.
    pub fn validate(&self) -> Result<()> {
        if self.cells < 3 {
            return Err(Error::dimension(format!(
                "need at least 3 cells for distinct Wyner neighbours, got {}",
                self.cells
            )));
        }
        if self.n_f == 0 || self.n_t == 0 || self.l_s == 0 || self.l_u == 0 {
            return Err(Error::dimension("n_f, n_t, l_s and l_u must be positive"));
        }
        let l_s = u32::try_from(self.l_s).map_err(|_| Error::dimension("l_s too large"))?;
        let n_f = u32::try_from(self.n_f).map_err(|_| Error::dimension("n_f too large"))?;
        let mu = self.mu;
        if *mu.numer() == 0 || mu > Ratio::from_integer(1) || mu < Ratio::new(1, l_s) {
            return Err(Error::domain(format!("mu = {mu} must lie in [1/{l_s}, 1]")));
        }
        if !mu.recip().is_integer() {
            return Err(Error::domain(format!("1/mu = {} is not an integer", mu.recip())));
        }
        let eta = mu * Ratio::from_integer(l_s);
        if !eta.is_integer() {
            return Err(Error::domain(format!("eta = mu*l_s = {eta} is not an integer")));
        }
        let l_f = mu * Ratio::from_integer(n_f);
        if !l_f.is_integer() || l_f.to_integer() == 0 {
            return Err(Error::domain(format!("l_F = mu*n_F = {l_f} is not a positive integer")));
        }
        if l_s * l_f.to_integer() < n_f {
            return Err(Error::domain("cable cannot carry the radio band: l_S*l_F < n_F"));
        }
        check_range("alpha", self.alpha, T::zero(), T::one())?;
        check_range("q", self.q, T::zero(), T::one())?;
        check_range("rho", self.rho, T::zero(), T::one())?;
        check_nonneg("beta_sq", self.beta_sq)?;
        check_nonneg("gamma", self.gamma)?;
        check_nonneg("p_b", self.p_b)?;
        check_nonneg("p_u", self.p_u)?;
        if !(self.p_c > T::zero() && self.p_c.is_finite()) {
            return Err(Error::domain(format!("p_c = {} must be finite and positive", self.p_c)));
        }
        if !(self.eps_u > T::zero() && self.eps_u < T::one()) {
            return Err(Error::domain(format!("eps_u = {} must lie in (0, 1)", self.eps_u)));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus the OMA requirement `L_U ≥ 2`.
    pub fn validate_for(&self, mode: AccessMode) -> Result<()> {
        self.validate()?;
        if mode == AccessMode::Oma && self.l_u < 2 {
            return Err(Error::domain("OMA needs L_U >= 2 (no eMBB minislot otherwise)"));
        }
        Ok(())
    }

    /// Lossy conversion to another scalar width.
    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: T| U::of(x.to_f64_lossy());
        SystemParams {
            cells: self.cells,
            n_f: self.n_f,
            n_t: self.n_t,
            l_s: self.l_s,
            mu: self.mu,
            alpha: c(self.alpha),
            beta_sq: c(self.beta_sq),
            gamma: c(self.gamma),
            p_b: c(self.p_b),
            p_u: c(self.p_u),
            p_c: c(self.p_c),
            q: c(self.q),
            eps_u: c(self.eps_u),
            l_u: self.l_u,
            rho: c(self.rho),
        }
    }
}

fn check_range<T: Real>(name: &str, x: T, lo: T, hi: T) -> Result<()> {
    if x >= lo && x <= hi {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} outside [{lo}, {hi}]")))
    }
}

fn check_nonneg<T: Real>(name: &str, x: T) -> Result<()> {
    if x >= T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} must be finite and non-negative")))
    }
}
