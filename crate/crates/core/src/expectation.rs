//! Expectations over the per-cell Bernoulli interference states, by exact
//! enumeration or by seeded Monte Carlo.
//!
//! Each cell independently sits in one of three states: no URLLC arrival,
//! an arrival whose packet was decoded at the edge node, or an arrival whose
//! decoding failed. Puncturing and TIN only distinguish the first two.
//!
//! Monte Carlo samples are drawn in fixed-size chunks; chunk `i` uses the
//! ChaCha stream `i` of the policy seed, and chunk statistics are merged in
//! chunk order. Results therefore do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const MC_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellState {
    Idle,
    /// URLLC packet present and decoded at the edge node.
    Decoded,
    /// URLLC packet present, decoding failed.
    Failed,
}

impl CellState {
    #[inline]
    pub fn arrival(self) -> bool {
        !matches!(self, CellState::Idle)
    }

    #[inline]
    pub fn decode_failure(self) -> bool {
        matches!(self, CellState::Failed)
    }
}

/// One joint realization of the arrival (`a`), absence (`b = 1 − a`) and
/// decode-failure (`e`) indicators, with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceState<T> {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    pub e: Vec<bool>,
    pub weight: T,
}

impl<T: Real> InterferenceState<T> {
    pub fn from_cells(cells: &[CellState], weight: T) -> Self {
        Self {
            a: cells.iter().map(|c| c.arrival()).collect(),
            b: cells.iter().map(|c| !c.arrival()).collect(),
            e: cells.iter().map(|c| c.decode_failure()).collect(),
            weight,
        }
    }

    /// All cells idle.
    pub fn quiet(cells: usize) -> Self {
        Self::from_cells(&vec![CellState::Idle; cells], T::one())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn cell(&self, k: usize) -> CellState {
        match (self.a[k], self.e[k]) {
            (false, _) => CellState::Idle,
            (true, false) => CellState::Decoded,
            (true, true) => CellState::Failed,
        }
    }

    /// Relabels cell `k` as cell `k + shift (mod M)`.
    pub fn rotated(&self, shift: usize) -> Self {
        let m = self.len();
        let rot = |v: &[bool]| (0..m).map(|k| v[(k + m - shift % m) % m]).collect();
        Self { a: rot(&self.a), b: rot(&self.b), e: rot(&self.e), weight: self.weight }
    }
}

/// How the decode-failure indicator is coupled to the arrival indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureModel {
    /// A decoded arrival has probability `q(1−ε)` and a failed one `qε`.
    #[default]
    Conditional,
    /// Failure indicator read as a marginal `B(qε)`: failed arrivals keep
    /// probability `qε` but decoded arrivals get `q(1−qε)`. Kept for
    /// sensitivity checks only.
    Marginal,
}

/// Categorical distribution of a single cell's state. Zero-probability
/// outcomes are dropped so they never inflate the enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDistribution<T> {
    outcomes: Vec<(CellState, T)>,
}

impl<T: Real> CellDistribution<T> {
    pub fn new(outcomes: Vec<(CellState, T)>) -> Result<Self> {
        if outcomes.iter().any(|&(_, p)| !(p >= T::zero() && p <= T::one())) {
            return Err(Error::domain("cell state probabilities must lie in [0, 1]"));
        }
        let total: T = outcomes.iter().map(|&(_, p)| p).sum();
        if (total - T::one()).abs() > T::of(1e-9).max(T::epsilon() * T::of(16.0)) {
            return Err(Error::domain(format!("cell state probabilities sum to {total}, not 1")));
        }
        let outcomes: Vec<_> = outcomes.into_iter().filter(|&(_, p)| p > T::zero()).collect();
        Ok(Self { outcomes })
    }

    /// URLLC arrivals only: idle with `1−q`, arrival with `q`.
    pub fn arrivals(q: T) -> Result<Self> {
        Self::new(vec![(CellState::Idle, T::one() - q), (CellState::Decoded, q)])
    }

    /// Arrivals and decode failures for SIC.
    pub fn with_failures(q: T, eps_d: T, model: FailureModel) -> Result<Self> {
        if !(eps_d >= T::zero() && eps_d <= T::one()) {
            return Err(Error::domain(format!("decoding error probability {eps_d} outside [0, 1]")));
        }
        let failed = q * eps_d;
        let decoded = match model {
            FailureModel::Conditional => q * (T::one() - eps_d),
            FailureModel::Marginal => q * (T::one() - q * eps_d),
        };
        Self::new(vec![
            (CellState::Idle, T::one() - failed - decoded),
            (CellState::Decoded, decoded),
            (CellState::Failed, failed),
        ])
    }

    pub fn outcomes(&self) -> &[(CellState, T)] {
        &self.outcomes
    }

    /// Number of joint states over `cells` cells, `None` on overflow.
    pub fn support_size(&self, cells: usize) -> Option<usize> {
        self.outcomes.len().checked_pow(u32::try_from(cells).ok()?)
    }

    fn sample(&self, u: f64) -> (CellState, T) {
        let mut acc = 0.0;
        for &(state, p) in &self.outcomes {
            acc += p.to_f64_lossy();
            if u < acc {
                return (state, p);
            }
        }
        *self.outcomes.last().expect("non-empty distribution")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    ExactEnumeration,
    MonteCarlo,
}

/// How expectations over interference states are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpectationPolicy {
    pub strategy: Strategy,
    pub sample_count: usize,
    pub seed: u64,
    /// Above this many joint states, exact enumeration falls back to Monte
    /// Carlo.
    pub exact_state_limit: usize,
}

impl Default for ExpectationPolicy {
    fn default() -> Self {
        Self {
            strategy: Strategy::ExactEnumeration,
            sample_count: 100_000,
            seed: 0,
            exact_state_limit: 59_049,
        }
    }
}

impl ExpectationPolicy {
    pub fn monte_carlo(sample_count: usize, seed: u64) -> Self {
        Self { strategy: Strategy::MonteCarlo, sample_count, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::domain("sample_count must be at least 1"));
        }
        if self.exact_state_limit == 0 {
            return Err(Error::domain("exact_state_limit must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    Exact { states: usize },
    MonteCarlo { samples: usize },
}

/// An expectation estimate; `std_err` is zero for exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectation<T> {
    pub mean: T,
    pub std_err: T,
    pub evaluation: Evaluation,
}

impl<T: Real> Expectation<T> {
    pub fn exact(value: T) -> Self {
        Self { mean: value, std_err: T::zero(), evaluation: Evaluation::Exact { states: 1 } }
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self { mean: f(self.mean), std_err: f(self.std_err).abs(), evaluation: self.evaluation }
    }
}

/// Every joint state of `cells` cells with its product probability.
pub fn enumerate_states<T: Real>(
    cells: usize,
    dist: &CellDistribution<T>,
) -> Vec<InterferenceState<T>> {
    let k = dist.outcomes.len();
    let total = dist.support_size(cells).expect("state space too large to enumerate");
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; cells];
    let mut states = vec![CellState::Idle; cells];
    for _ in 0..total {
        let mut weight = T::one();
        for (c, &d) in digits.iter().enumerate() {
            let (s, p) = dist.outcomes[d];
            states[c] = s;
            weight = weight * p;
        }
        out.push(InterferenceState::from_cells(&states, weight));
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < k {
                break;
            }
            *d = 0;
        }
    }
    out
}

/// Draws one joint state from `rng`.
pub fn sample_state<T: Real, R: Rng>(
    cells: usize,
    dist: &CellDistribution<T>,
    rng: &mut R,
) -> InterferenceState<T> {
    let mut weight = T::one();
    let states: Vec<CellState> = (0..cells)
        .map(|_| {
            let (s, p) = dist.sample(rng.gen::<f64>());
            weight = weight * p;
            s
        })
        .collect();
    InterferenceState::from_cells(&states, weight)
}

/// Running count / mean / sum of squared deviations.
#[derive(Clone, Copy)]
struct Moments<T> {
    n: usize,
    mean: T,
    m2: T,
}

impl<T: Real> Moments<T> {
    fn empty() -> Self {
        Self { n: 0, mean: T::zero(), m2: T::zero() }
    }

    fn push(&mut self, x: T) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::of_usize(self.n);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb, nn) = (T::of_usize(self.n), T::of_usize(other.n), T::of_usize(n));
        let delta = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * nb / nn,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nn,
        }
    }
}

/// `E[f(state)]` under independent per-cell states.
pub fn expectation<T, F>(
    cells: usize,
    dist: &CellDistribution<T>,
    policy: &ExpectationPolicy,
    f: F,
) -> Result<Expectation<T>>
where
    T: Real,
    F: Fn(&InterferenceState<T>) -> Result<T> + Sync,
{
    policy.validate()?;
    let support = dist.support_size(cells);
    let exact = policy.strategy == Strategy::ExactEnumeration
        && support.is_some_and(|n| n <= policy.exact_state_limit);
    if exact {
        let states = enumerate_states(cells, dist);
        let values: Vec<T> = states.par_iter().map(&f).collect::<Result<_>>()?;
        let mean = states.iter().zip(&values).map(|(s, &v)| s.weight * v).sum();
        return Ok(Expectation {
            mean,
            std_err: T::zero(),
            evaluation: Evaluation::Exact { states: states.len() },
        });
    }

    let n = policy.sample_count;
    let chunks = n.div_ceil(MC_CHUNK);
    let partial: Vec<Moments<T>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
            rng.set_stream(chunk as u64);
            let len = MC_CHUNK.min(n - chunk * MC_CHUNK);
            let mut m = Moments::empty();
            for _ in 0..len {
                m.push(f(&sample_state(cells, dist, &mut rng))?);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let total = partial.into_iter().fold(Moments::empty(), Moments::merge);
    let std_err = if total.n > 1 {
        (total.m2 / T::of_usize(total.n - 1) / T::of_usize(total.n)).sqrt()
    } else {
        T::zero()
    };
    Ok(Expectation { mean: total.mean, std_err, evaluation: Evaluation::MonteCarlo { samples: n } })
}
