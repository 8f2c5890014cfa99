mod support;

use cran_core::channel::{
    build_equivalent_fronthaul, build_fronthaul_channel, build_radio_channel, combining_snr_gain,
    compute_lambda_sq, effective_cable_noise_variance,
};
use cran_core::params::parse_cable_bandwidth;
use cran_core::{AccessMode, Error, Matrix64, Params};
use num_rational::Ratio;
use proptest::prelude::*;
use support::{jacobi_eigen, rel_err};

#[test]
fn radio_eigenvalues_follow_cosine_spectrum() {
    let alpha = 0.2f64.sqrt();
    let h = build_radio_channel(6, alpha).unwrap();
    let (got, _) = jacobi_eigen(&h);
    let mut want: Vec<f64> = (0..6)
        .map(|m| 1.0 + 2.0 * alpha * (2.0 * std::f64::consts::PI * m as f64 / 6.0).cos())
        .collect();
    want.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12, "{g} vs {w}");
    }
}

#[test]
fn radio_channel_small_cases() {
    assert_eq!(build_radio_channel(3, 0.0).unwrap(), Matrix64::identity(3));
    let h = build_radio_channel(4, 0.5).unwrap();
    assert_eq!(h.vec()[..4], [1.0, 0.5, 0.0, 0.5]);
    assert!(matches!(build_radio_channel(2, 0.5), Err(Error::Dimension(_))));
    assert!(matches!(build_radio_channel(4, 1.5), Err(Error::Domain(_))));
}

#[test]
fn equivalent_fronthaul_reference_cases() {
    let full = build_equivalent_fronthaul(1.0, 4, Ratio::from_integer(1)).unwrap();
    assert_eq!(full.vec(), vec![4.0]);
    let quarter = build_equivalent_fronthaul(0.5, 4, Ratio::new(1, 4)).unwrap();
    assert_eq!(quarter, build_fronthaul_channel(0.5, 4).unwrap());
    assert!(build_equivalent_fronthaul(0.5, 4, Ratio::new(1, 3)).is_err());
    assert!(build_equivalent_fronthaul(0.5, 4, Ratio::new(2, 3)).is_err());
}

#[test]
fn lambda_reference_values() {
    let p = Params { p_b: 0.0, p_c: 1.0, ..Params::default() };
    assert_eq!(compute_lambda_sq(&p, AccessMode::Noma).unwrap(), 1.0);
    assert_eq!(compute_lambda_sq(&p, AccessMode::Oma).unwrap(), 1.0);
    let p = Params::default();
    assert!(rel_err(compute_lambda_sq(&p, AccessMode::Noma).unwrap(), 0.625_185_120_636_732_5) < 1e-13);
    let p = Params::default().with_alpha_sq(0.0);
    assert!(rel_err(compute_lambda_sq(&p, AccessMode::Oma).unwrap(), 0.454_643_361_684_052_2) < 1e-13);
    let p = Params { l_u: 1, ..Params::default() };
    assert!(matches!(compute_lambda_sq(&p, AccessMode::Oma), Err(Error::Domain(_))));
}

#[test]
fn cable_noise_reference_values() {
    let unit = Params { p_b: 0.0, p_c: 1.0, ..Params::default() };
    assert_eq!(effective_cable_noise_variance(&unit, AccessMode::Noma).unwrap(), 0.25);
    let one_pair = Params { mu: Ratio::new(1, 4), ..unit };
    assert_eq!(effective_cable_noise_variance(&one_pair, AccessMode::Noma).unwrap(), 1.0);
    let p = Params::default().with_alpha_sq(0.0);
    let v = effective_cable_noise_variance(&p, AccessMode::Oma).unwrap();
    assert!(rel_err(v, 0.549_881_557_874_222) < 1e-13);
}

#[test]
fn cube_law_grid() {
    for gamma in [0.0, 0.25, 0.5, 1.0] {
        for l_s in [2usize, 4, 8] {
            let want = l_s as f64 * (1.0 + gamma * (l_s as f64 - 1.0)).powi(2);
            assert!(rel_err(combining_snr_gain(gamma, l_s).unwrap(), want) <= 1e-12);
        }
    }
}

#[test]
fn single_precision_channel_agrees() {
    let p32 = Params::default().cast::<f32>();
    let a = compute_lambda_sq(&p32, AccessMode::Noma).unwrap() as f64;
    let b = compute_lambda_sq(&Params::default(), AccessMode::Noma).unwrap();
    assert!(rel_err(a, b) < 1e-6);
}

fn valid_mu() -> impl Strategy<Value = (usize, Ratio<u32>)> {
    prop_oneof![Just((4usize, "1")), Just((4, "1/2")), Just((4, "1/4")), Just((2, "1/2")), Just((6, "1/3"))]
        .prop_map(|(l, m)| (l, parse_cable_bandwidth(m).unwrap()))
}

proptest! {
    #[test]
    fn radio_channel_is_symmetric_circulant(m in 3usize..12, alpha in 0.0f64..=1.0) {
        let h = build_radio_channel(m, alpha).unwrap();
        prop_assert!(h.is_symmetric(0.0));
        let shift = Matrix64::from_fn(m, m, |i, j| if (i + 1) % m == j { 1.0 } else { 0.0 });
        prop_assert_eq!(&(&h * &shift), &(&shift * &h));
        for i in 0..m {
            let s: f64 = h.row(i).iter().sum();
            prop_assert!((s - (1.0 + 2.0 * alpha)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coupling_gives_identity((l_s, mu) in valid_mu()) {
        let c = build_equivalent_fronthaul(0.0, l_s, mu).unwrap();
        let n = c.rows();
        prop_assert_eq!(c, Matrix64::identity(n));
    }

    #[test]
    fn lambda_decreases_in_power_and_alpha(
        p_b in 0.0f64..50.0, dp in 0.01f64..10.0, a in 0.0f64..0.9, da in 0.01f64..0.1, l_u in 2usize..9,
    ) {
        for mode in [AccessMode::Oma, AccessMode::Noma] {
            let base = Params { p_b, l_u, ..Params::default() }.with_alpha_sq(a);
            let lam = compute_lambda_sq(&base, mode).unwrap();
            let more_p = compute_lambda_sq(&Params { p_b: p_b + dp, ..base.clone() }, mode).unwrap();
            let more_a = compute_lambda_sq(&base.clone().with_alpha_sq(a + da), mode).unwrap();
            prop_assert!(more_p < lam);
            if p_b > 0.0 {
                prop_assert!(more_a < lam);
            }
        }
        let base = Params { p_b, l_u, ..Params::default() }.with_alpha_sq(a);
        prop_assert!(
            compute_lambda_sq(&base, AccessMode::Oma).unwrap()
                <= compute_lambda_sq(&base, AccessMode::Noma).unwrap()
        );
    }
}
