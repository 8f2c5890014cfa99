//! Brute-force checks of the closed-form reductions.
//!
//! Each check rebuilds a quantity at full dimension from the signal model
//! (explicit reshapes, replica spreading, cable propagation, combining) and
//! compares it with the reduced form used by the rate code. The full-size
//! rate uses its own Gauss-Jordan inverse and LU determinant, so it shares
//! no factorization code with [`crate::embb`].

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{build_fronthaul_channel, build_radio_channel, compute_lambda_sq};
use crate::embb::{state_terms, EmbbModel, EmbbScheme};
use crate::error::{Error, Result};
use crate::expectation::{CellState, InterferenceState};
use crate::linalg::Matrix;
use crate::params::{AccessMode, SystemParams};

type Params = SystemParams<f64>;

pub const MAPPING_TOLERANCE: f64 = 1e-12;
pub const REDUCTION_TOLERANCE: f64 = 1e-9;
pub const KRON_TOLERANCE: f64 = 1e-12;
pub const MIN_NOISE_SAMPLES: usize = 10_000;

/// Outcome of one oracle check, possibly merged over many instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub check_name: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub instances_tested: usize,
    pub passed: bool,
    pub tolerance: f64,
}

impl OracleReport {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            check_name: name.to_string(),
            max_abs_error: 0.0,
            max_rel_error: 0.0,
            instances_tested: 0,
            passed: true,
            tolerance,
        }
    }

    /// Records one comparison. It passes when the relative error is within
    /// tolerance, or the absolute error is for quantities near zero.
    fn record(&mut self, got: f64, want: f64) {
        let abs = (got - want).abs();
        let rel = if want != 0.0 { abs / want.abs() } else { abs };
        self.record_errors(abs, rel);
    }

    fn record_errors(&mut self, abs: f64, rel: f64) {
        self.max_abs_error = self.max_abs_error.max(abs);
        self.max_rel_error = self.max_rel_error.max(rel);
        self.instances_tested += 1;
        let ok = rel <= self.tolerance || abs <= self.tolerance;
        self.passed &= ok && abs.is_finite();
    }

    /// Max-reduction of two reports of the same check. The tolerance of a
    /// statistical check may differ per instance; the loosest one is kept.
    pub fn merge(mut self, other: &Self) -> Self {
        self.max_abs_error = self.max_abs_error.max(other.max_abs_error);
        self.max_rel_error = self.max_rel_error.max(other.max_rel_error);
        self.instances_tested += other.instances_tested;
        self.passed &= other.passed;
        self.tolerance = self.tolerance.max(other.tolerance);
        self
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {} instances={} max_abs={:.3e} max_rel={:.3e} tol={:.1e}",
            self.check_name,
            if self.passed { "PASS" } else { "FAIL" },
            self.instances_tested,
            self.max_abs_error,
            self.max_rel_error,
            self.tolerance
        )
    }
}

fn complex(m: &Matrix<f64>) -> Matrix<Complex64> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Replica geometry of the cable for one parameter set.
struct CableLayout {
    subbands: usize,
    eta: usize,
    l_f: usize,
    l_s: usize,
    n_f: usize,
}

impl CableLayout {
    fn of(p: &Params) -> Result<Self> {
        p.validate()?;
        Ok(Self { subbands: p.subbands(), eta: p.eta(), l_f: p.l_f(), l_s: p.l_s, n_f: p.n_f })
    }

    /// `G = (1/η)(I_{1/μ} ⊗ 𝟙_η)`, built entry by entry.
    fn combiner(&self) -> Matrix<f64> {
        let w = 1.0 / self.eta as f64;
        Matrix::from_fn(self.l_s, self.subbands, |pair, band| {
            if pair / self.eta == band {
                w
            } else {
                0.0
            }
        })
    }

    /// Radio signal of one cell through spreading, cable and combining.
    /// The radio vector is cut into `1/μ` sub-bands of `l_F` frequencies;
    /// sub-band `j` is copied onto pairs `jη .. jη+η−1`.
    fn propagate(
        &self,
        y: &[Complex64],
        cable: &Matrix<Complex64>,
        combiner: &Matrix<Complex64>,
    ) -> Result<Vec<Complex64>> {
        let bands = Matrix::unvec(y, self.l_f, self.subbands)?;
        let spread = Matrix::from_fn(self.l_f, self.l_s, |f, pair| bands[(f, pair / self.eta)]);
        Ok(spread.try_mul(cable)?.try_mul(combiner)?.vec())
    }

    /// Combined cable noise for a noise matrix over (frequency, pair).
    fn combine_noise(&self, w: &Matrix<Complex64>, combiner: &Matrix<Complex64>) -> Result<Vec<Complex64>> {
        Ok(w.try_mul(combiner)?.vec())
    }
}

/// Compares the explicit replica/cable/combining chain against the reduced
/// map `(H_c^η ⊗ I_{l_F})·y` on random complex radio signals.
pub fn verify_fronthaul_mapping(p: &Params, trials: usize, seed: u64) -> Result<OracleReport> {
    let layout = CableLayout::of(p)?;
    let cable = complex(&build_fronthaul_channel(p.gamma, p.l_s)?);
    let combiner = complex(&layout.combiner());
    let reduced = complex(&EmbbModel::new(p, AccessMode::Noma)?.fronthaul().kron(&Matrix::identity(layout.l_f)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport::new("fronthaul_mapping", MAPPING_TOLERANCE);
    for _ in 0..trials.max(1) {
        let y: Vec<Complex64> = (0..layout.n_f).map(|_| complex_gaussian(&mut rng)).collect();
        let full = layout.propagate(&y, &cable, &combiner)?;
        let short = reduced.mul_vec(&y);
        let scale = short.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let abs = full.iter().zip(&short).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        report.record_errors(abs, if scale > 0.0 { abs / scale } else { abs });
    }
    Ok(report)
}

/// Empirical covariance of combined unit-variance cable noise against
/// `(1/η)·I`. Passes when the largest entrywise deviation is within
/// `5/√samples + 1e-3`.
pub fn verify_mrc_noise_covariance(p: &Params, samples: usize, seed: u64) -> Result<OracleReport> {
    if samples < MIN_NOISE_SAMPLES {
        return Err(Error::domain(format!("need at least {MIN_NOISE_SAMPLES} samples, got {samples}")));
    }
    let layout = CableLayout::of(p)?;
    let combiner = complex(&layout.combiner());
    let n = layout.n_f;
    const CHUNK: usize = 2048;
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Vec<Complex64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let w = Matrix::from_fn(layout.l_f, layout.l_s, |_, _| complex_gaussian(&mut rng));
                let v = layout.combine_noise(&w, &combiner)?;
                for i in 0..n {
                    for j in 0..n {
                        acc[i * n + j] += v[i] * v[j].conj();
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut cov = vec![Complex64::new(0.0, 0.0); n * n];
    for acc in &partial {
        for (c, a) in cov.iter_mut().zip(acc) {
            *c += a;
        }
    }
    let target = 1.0 / layout.eta as f64;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { target } else { 0.0 };
            dev = dev.max((cov[i * n + j] / samples as f64 - want).norm());
        }
    }
    let tolerance = 5.0 / (samples as f64).sqrt() + 1e-3;
    let mut report = OracleReport::new("mrc_noise_covariance", tolerance);
    report.max_abs_error = dev;
    report.max_rel_error = dev / target;
    report.instances_tested = 1;
    report.passed = dev <= tolerance;
    Ok(report)
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
fn gauss_jordan_inverse(a: &Matrix<f64>) -> Result<Matrix<f64>> {
    let n = a.rows();
    let mut m = Matrix::from_fn(n, 2 * n, |i, j| if j < n { a[(i, j)] } else if j - n == i { 1.0 } else { 0.0 });
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[(x, col)].abs().total_cmp(&m[(y, col)].abs()))
            .expect("non-empty range");
        if m[(pivot, col)] == 0.0 {
            return Err(Error::Numerical("singular matrix in oracle inverse".into()));
        }
        if pivot != col {
            for j in 0..2 * n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = t;
            }
        }
        let d = m[(col, col)];
        for j in 0..2 * n {
            m[(col, j)] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = m[(i, col)];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[(i, j)] -= f * m[(col, j)];
                    }
                }
            }
        }
    }
    Ok(Matrix::from_fn(n, n, |i, j| m[(i, j + n)]))
}

/// `ln det` by LU with partial pivoting; fails unless the determinant is
/// positive.
fn lu_ln_det(a: &Matrix<f64>) -> Result<f64> {
    let n = a.rows();
    let mut m = a.clone();
    let mut sign = 1.0;
    let mut ln = 0.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[(x, col)].abs().total_cmp(&m[(y, col)].abs()))
            .expect("non-empty range");
        if m[(pivot, col)] == 0.0 {
            return Err(Error::Numerical("singular matrix in oracle determinant".into()));
        }
        if pivot != col {
            sign = -sign;
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = t;
            }
        }
        let d = m[(col, col)];
        if d < 0.0 {
            sign = -sign;
        }
        ln += d.abs().ln();
        for i in (col + 1)..n {
            let f = m[(i, col)] / d;
            if f != 0.0 {
                for j in col..n {
                    m[(i, j)] -= f * m[(col, j)];
                }
            }
        }
    }
    if sign < 0.0 {
        return Err(Error::Numerical("negative determinant in oracle".into()));
    }
    Ok(ln)
}

/// Full-dimension matrices of the stacked model for one realization.
struct FullModel {
    channel: Matrix<f64>,
    noise: Matrix<f64>,
}

/// Builds the `n_F·M`-dimensional effective channel and noise covariance
/// directly from the signal model: radio frame `X ↦ X·H·D`, then per cell
/// the fronthaul chain with cable noise scaled by `1/λ`, plus URLLC signals
/// of power `i_k` entering the fronthaul of cell `k`.
fn full_model(p: &Params, mode: AccessMode, gain: &[f64], interference: &[f64]) -> Result<FullModel> {
    let layout = CableLayout::of(p)?;
    let m = p.cells;
    let n = layout.n_f;
    let h = build_radio_channel(m, p.alpha)?;
    let hd = Matrix::from_fn(m, m, |i, j| h[(i, j)] * gain[j]);
    let cable = complex(&build_fronthaul_channel(p.gamma, p.l_s)?);
    let combiner = complex(&layout.combiner());
    let lambda_sq = compute_lambda_sq(p, mode)?;

    // per-cell fronthaul map F (n_F x n_F) and cable-noise map N
    let mut fronthaul = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let out = layout.propagate(&e, &cable, &combiner)?;
        for (i, z) in out.iter().enumerate() {
            fronthaul[(i, j)] = z.re;
        }
    }
    let cable_inputs = layout.l_f * layout.l_s;
    let mut noise_map = Matrix::zeros(n, cable_inputs);
    for j in 0..cable_inputs {
        let mut e = vec![Complex64::new(0.0, 0.0); cable_inputs];
        e[j] = Complex64::new(1.0, 0.0);
        let w = Matrix::unvec(&e, layout.l_f, layout.l_s)?;
        for (i, z) in layout.combine_noise(&w, &combiner)?.iter().enumerate() {
            noise_map[(i, j)] = z.re;
        }
    }
    let ff = fronthaul.try_mul(&fronthaul.transpose())?;
    let nn = noise_map.try_mul(&noise_map.transpose())?.scale(1.0 / lambda_sq);

    // radio stage: column for basis frame E_{f,c} is vec(E_{f,c}·H·D)
    let size = n * m;
    let mut radio = Matrix::zeros(size, size);
    for c in 0..m {
        for f in 0..n {
            let mut x = Matrix::zeros(n, m);
            x[(f, c)] = 1.0;
            let y = x.try_mul(&hd)?.vec();
            for (i, v) in y.into_iter().enumerate() {
                radio[(i, c * n + f)] = v;
            }
        }
    }
    let mut stage = Matrix::zeros(size, size);
    let mut noise = Matrix::zeros(size, size);
    for k in 0..m {
        for i in 0..n {
            for j in 0..n {
                stage[(k * n + i, k * n + j)] = fronthaul[(i, j)];
                noise[(k * n + i, k * n + j)] = (1.0 + interference[k]) * ff[(i, j)] + nn[(i, j)];
            }
        }
    }
    Ok(FullModel { channel: stage.try_mul(&radio)?, noise })
}

/// `scale/(n_F·M) · log₂det(I + P·R⁻¹HHᵀ)` at full dimension.
fn full_rate(model: &FullModel, power: f64, scale: f64) -> Result<f64> {
    let size = model.channel.rows();
    let hh = model.channel.try_mul(&model.channel.transpose())?;
    let whitened = gauss_jordan_inverse(&model.noise)?.try_mul(&hh)?.scale(power);
    let ln = lu_ln_det(&whitened.add_diagonal(1.0))?;
    Ok(scale * ln / std::f64::consts::LN_2 / size as f64)
}

/// Full-dimension OMA rate.
pub fn full_dimension_oma_rate(p: &Params) -> Result<f64> {
    p.validate_for(AccessMode::Oma)?;
    let share = 1.0 - 1.0 / p.l_u as f64;
    let m = p.cells;
    let model = full_model(p, AccessMode::Oma, &vec![1.0; m], &vec![0.0; m])?;
    full_rate(&model, p.p_b / share, share)
}

/// Full-dimension NOMA rate of one interference realization.
pub fn full_dimension_noma_rate(p: &Params, scheme: EmbbScheme, state: &InterferenceState<f64>) -> Result<f64> {
    let (gain, interference) = state_terms(scheme, state, p);
    let model = full_model(p, AccessMode::Noma, &gain, &interference)?;
    full_rate(&model, p.p_b, 1.0)
}

fn random_state<R: Rng>(cells: usize, rng: &mut R) -> InterferenceState<f64> {
    let states: Vec<CellState> = (0..cells)
        .map(|_| match rng.gen_range(0..3) {
            0 => CellState::Idle,
            1 => CellState::Decoded,
            _ => CellState::Failed,
        })
        .collect();
    InterferenceState::from_cells(&states, 1.0)
}

/// Full-dimension against reduced-form rates: the OMA rate, a TIN
/// realization with a single arrival in cell 0, and `trials` random
/// puncturing/TIN/SIC realizations.
pub fn verify_rate_reduction(p: &Params, trials: usize, seed: u64) -> Result<OracleReport> {
    let mut report = OracleReport::new("rate_reduction", REDUCTION_TOLERANCE);
    report.record(crate::embb::oma_embb_rate(p)?, full_dimension_oma_rate(p)?);

    let model = EmbbModel::new(p, AccessMode::Noma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = p.cells;
    let mut single = vec![CellState::Idle; m];
    single[0] = CellState::Decoded;
    let mut cases = vec![(EmbbScheme::Tin, InterferenceState::from_cells(&single, 1.0))];
    let schemes = [EmbbScheme::Puncturing, EmbbScheme::Tin, EmbbScheme::Sic];
    for _ in 0..trials {
        let scheme = schemes[rng.gen_range(0..schemes.len())];
        cases.push((scheme, random_state(m, &mut rng)));
    }
    let pairs: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|(scheme, state)| {
            let (gain, interference) = state_terms(*scheme, state, p);
            let reduced = model.realization_rate(&gain, &interference, p.p_b)?.bits;
            Ok((reduced, full_dimension_noma_rate(p, *scheme, state)?))
        })
        .collect::<Result<_>>()?;
    for (got, want) in pairs {
        report.record(got, want);
    }
    Ok(report)
}

fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn matrix_error(got: &Matrix<f64>, want: &Matrix<f64>) -> (f64, f64) {
    let abs = got.try_sub(want).map(|d| d.max_abs()).unwrap_or(f64::INFINITY);
    let scale = want.max_abs();
    (abs, if scale > 0.0 { abs / scale } else { abs })
}

/// Randomized mixed-product and vec identities of the Kronecker product,
/// with dimensions drawn from `sizes`, plus the replica-combining identity
/// `𝟙_{l_S}ᵀ(I_{1/μ} ⊗ 𝟙_η) = η𝟙_{1/μ}ᵀ` for every `(1/μ, η)` pair in
/// `sizes`.
pub fn verify_kron_mixed_product(sizes: &[usize], trials: usize, seed: u64) -> Result<OracleReport> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::dimension("sizes must be non-empty and positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport::new("kron_mixed_product", KRON_TOLERANCE);
    let pick = |rng: &mut ChaCha8Rng| sizes[rng.gen_range(0..sizes.len())];
    for _ in 0..trials.max(1) {
        let (p, q, r, s, t, u) =
            (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let a = random_matrix(p, q, &mut rng);
        let b = random_matrix(r, s, &mut rng);
        let c = random_matrix(q, t, &mut rng);
        let d = random_matrix(s, u, &mut rng);
        let lhs = a.kron(&b).try_mul(&c.kron(&d))?;
        let rhs = a.try_mul(&c)?.kron(&b.try_mul(&d)?);
        let (abs, rel) = matrix_error(&lhs, &rhs);
        report.record_errors(abs, rel);

        let x = random_matrix(q, r, &mut rng);
        let e = random_matrix(r, t, &mut rng);
        let direct = Matrix::column(&a.try_mul(&x)?.try_mul(&e)?.vec());
        let via_kron = e.transpose().kron(&a).try_mul(&Matrix::column(&x.vec()))?;
        let (abs, rel) = matrix_error(&via_kron, &direct);
        report.record_errors(abs, rel);
    }
    for &subbands in sizes {
        for &eta in sizes {
            let l_s = subbands * eta;
            let spread = Matrix::<f64>::identity(subbands).kron(&Matrix::ones(eta, 1));
            let lhs = Matrix::ones(1, l_s).try_mul(&spread)?;
            let rhs = Matrix::ones(1, subbands).scale(eta as f64);
            let (abs, rel) = matrix_error(&lhs, &rhs);
            report.record_errors(abs, rel);
        }
    }
    Ok(report)
}

/// Settings for [`run_all`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSettings {
    /// Random parameter tuples in addition to the reference point.
    pub tuples: usize,
    pub seed: u64,
    pub mapping_trials: usize,
    pub reduction_trials: usize,
    pub noise_samples: usize,
    pub kron_trials: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            tuples: 50,
            seed: 0,
            mapping_trials: 100,
            reduction_trials: 4,
            noise_samples: 20_000,
            kron_trials: 100,
        }
    }
}

/// Reference operating point for the oracle: the default parameters with
/// four sub-bands, so the full model is `n_F·M = 360` against a reduced
/// size of 24.
pub fn reference_params() -> Params {
    let mut p = Params { mu: num_rational::Ratio::new(1, 4), ..Params::default() };
    p.gamma = 0.5f64.sqrt();
    p
}

/// One random tuple: `α, γ, ρ ~ U[0,1]`, `μ ∈ {1/4, 1/2, 1}`, `l_S = 4`,
/// `M ∈ {3, 4, 6}`, `n_F = 8`, `L_U ∈ 2..=5`.
pub fn random_params<R: Rng>(rng: &mut R) -> Params {
    let denom = [4u32, 2, 1][rng.gen_range(0..3)];
    Params {
        cells: [3usize, 4, 6][rng.gen_range(0..3)],
        n_f: 8,
        l_s: 4,
        mu: num_rational::Ratio::new(1, denom),
        alpha: rng.gen(),
        gamma: rng.gen(),
        rho: rng.gen(),
        q: rng.gen(),
        l_u: rng.gen_range(2..=5),
        ..Params::default()
    }
}

/// Runs all four checks on the reference point and `settings.tuples`
/// random tuples; returns one merged report per check.
pub fn run_all(settings: &OracleSettings) -> Result<Vec<OracleReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut tuples = vec![reference_params()];
    tuples.extend((0..settings.tuples).map(|_| random_params(&mut rng)));
    let seeds: Vec<u64> = (0..tuples.len()).map(|_| rng.gen()).collect();

    let per_tuple: Vec<[OracleReport; 3]> = tuples
        .par_iter()
        .zip(&seeds)
        .map(|(p, &s)| {
            Ok([
                verify_fronthaul_mapping(p, settings.mapping_trials, s)?,
                verify_mrc_noise_covariance(p, settings.noise_samples, s)?,
                verify_rate_reduction(p, settings.reduction_trials, s)?,
            ])
        })
        .collect::<Result<_>>()?;
    let mut merged: Vec<OracleReport> = per_tuple[0].to_vec();
    for reports in &per_tuple[1..] {
        for (m, r) in merged.iter_mut().zip(reports) {
            *m = m.clone().merge(r);
        }
    }
    merged.push(verify_kron_mixed_product(&[1, 2, 3, 4], settings.kron_trials, settings.seed)?);
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_jordan_and_lu_agree_with_known_values() {
        let a = Matrix::from_row_major(2, 2, vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let inv = gauss_jordan_inverse(&a).unwrap();
        let id = a.try_mul(&inv).unwrap();
        assert!(id.try_sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-15);
        assert!((lu_ln_det(&a).unwrap() - 11f64.ln()).abs() < 1e-15);
        let neg = Matrix::from_row_major(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(lu_ln_det(&neg).is_err());
    }

    #[test]
    fn mapping_is_identity_without_coupling() {
        let p = Params::default().with_gamma_sq(0.0);
        let r = verify_fronthaul_mapping(&p, 5, 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_abs_error, 0.0);
    }

    #[test]
    fn noise_check_rejects_small_sample() {
        assert!(verify_mrc_noise_covariance(&Params::default(), 100, 0).is_err());
    }

    #[test]
    fn combiner_shape() {
        let p = Params { mu: num_rational::Ratio::new(1, 2), ..Params::default() };
        let g = CableLayout::of(&p).unwrap().combiner();
        assert_eq!((g.rows(), g.cols()), (4, 2));
        assert_eq!(g[(1, 0)], 0.5);
        assert_eq!(g[(2, 0)], 0.0);
    }
}
