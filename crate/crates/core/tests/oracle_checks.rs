use cran_core::embb::{oma_embb_rate, state_terms, EmbbModel, EmbbScheme};
use cran_core::expectation::{enumerate_states, CellDistribution};
use cran_core::oracle::{
    full_dimension_noma_rate, full_dimension_oma_rate, reference_params, run_all, verify_fronthaul_mapping,
    verify_kron_mixed_product, verify_mrc_noise_covariance, verify_rate_reduction, OracleSettings,
    MIN_NOISE_SAMPLES,
};
use cran_core::{AccessMode, Error, FailureModel, Params};
use num_rational::Ratio;

fn with(l_s: usize, n_f: usize, mu: Ratio<u32>, gamma_sq: f64) -> Params {
    Params { l_s, n_f, mu, ..Params::default() }.with_gamma_sq(gamma_sq)
}

#[test]
fn mapping_identity_cases() {
    let r = verify_fronthaul_mapping(&with(4, 8, Ratio::from_integer(1), 0.0), 10, 1).unwrap();
    assert!(r.passed && r.max_abs_error <= 1e-12, "{r}");
    let r = verify_fronthaul_mapping(&with(4, 8, Ratio::new(1, 4), 0.4), 10, 2).unwrap();
    assert!(r.passed, "{r}");
}

#[test]
fn mapping_random_instances() {
    let r = verify_fronthaul_mapping(&with(4, 8, Ratio::new(1, 2), 0.3), 100, 3).unwrap();
    assert!(r.passed && r.instances_tested >= 100 && r.max_rel_error <= 1e-12, "{r}");
}

#[test]
fn combining_noise_covariance() {
    for (mu, samples) in [(Ratio::new(1, 4), 20_000), (Ratio::from_integer(1), 20_000), (Ratio::new(1, 2), 100_000)] {
        let r = verify_mrc_noise_covariance(&with(4, 8, mu, 0.5), samples, 9).unwrap();
        assert!(r.passed, "{r}");
    }
    let few = verify_mrc_noise_covariance(&with(4, 8, Ratio::new(1, 2), 0.5), MIN_NOISE_SAMPLES - 1, 0);
    assert!(matches!(few, Err(Error::Domain(_))));
}

#[test]
fn reduction_at_reference_point() {
    let p = reference_params();
    assert_eq!(p.n_f * p.cells, 360);
    let full = full_dimension_oma_rate(&p).unwrap();
    assert!(((full - oma_embb_rate(&p).unwrap()) / full).abs() <= 1e-9);
    let r = verify_rate_reduction(&p, 4, 5).unwrap();
    assert!(r.passed && r.max_rel_error <= 1e-9, "{r}");
}

#[test]
fn reduction_single_arrival_tin() {
    let p = Params { n_f: 8, q: 0.5, ..Params::default() };
    let model = EmbbModel::new(&p, AccessMode::Noma).unwrap();
    let dist = CellDistribution::with_failures(0.5, 0.5, FailureModel::Conditional).unwrap();
    for state in enumerate_states(p.cells, &dist).iter().filter(|s| s.a.iter().filter(|&&a| a).count() == 1) {
        for scheme in [EmbbScheme::Puncturing, EmbbScheme::Tin, EmbbScheme::Sic] {
            let (g, i) = state_terms(scheme, state, &p);
            let reduced = model.realization_rate(&g, &i, p.p_b).unwrap().bits;
            let full = full_dimension_noma_rate(&p, scheme, state).unwrap();
            assert!(((reduced - full) / full).abs() <= 1e-9, "{scheme:?}: {reduced} vs {full}");
        }
    }
}

#[test]
fn kron_identities() {
    let r = verify_kron_mixed_product(&[1, 2, 3, 4], 100, 4).unwrap();
    assert!(r.passed && r.max_rel_error <= 1e-12, "{r}");
}

#[test]
fn full_suite_passes_and_is_reproducible() {
    let settings = OracleSettings { tuples: 8, ..OracleSettings::default() };
    let a = run_all(&settings).unwrap();
    assert_eq!(a.len(), 4);
    assert!(a.iter().all(|r| r.passed), "{a:?}");
    assert_eq!(a, run_all(&settings).unwrap());
    let line = a[0].to_string();
    assert!(line.contains("PASS") && !line.contains('\n'));
}
