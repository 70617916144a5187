//! Randomized invariants over the configuration space.

mod common;

use common::{all_columns, config_in, config_in_capped, describe};
use hnoma::analytic::{asymptotic_breakdown, compute_constants, p_t_asymptotic, p_t_exact};
use hnoma::channel::OrderPairDensity;
use hnoma::numerics::Stream;
use hnoma::prob::{estimate_decomposition, integrate_event, EventRegion, IntegrateOptions};
use hnoma::schemes::{energy, noma_rate, oma_rate};
use hnoma::{Error, Scheme, SystemConfig};
use proptest::prelude::*;

fn any_config() -> impl Strategy<Value = SystemConfig> {
    (2usize..=6, 0.05f64..0.49, 0.1f64..3.0, 0.0f64..50.0, -1.5f64..2.5)
        .prop_flat_map(|(users, beta, rate, snr, log_eta)| {
            (Just((users, beta, rate, snr, log_eta)), 1..=users, 1..=users)
        })
        .prop_filter("distinct users", |(_, m, n)| m != n)
        .prop_map(|((users, beta, rate, snr, log_eta), m, n)| {
            SystemConfig::at_snr_db(users, m, n, rate, beta, snr, 10f64.powf(log_eta)).unwrap()
        })
}

/// Closed form where it resolves the value, numeric integration otherwise.
fn reference(cfg: &SystemConfig) -> f64 {
    match p_t_exact(cfg, &compute_constants(cfg).unwrap(), 256) {
        Ok(e) => e.value,
        Err(Error::PrecisionLoss { .. }) => {
            let pair = OrderPairDensity::new(cfg.users, cfg.m, cfg.n).unwrap();
            let opts = IntegrateOptions { abs_tol: 1e-300, rel_tol: 1e-10, ..Default::default() };
            integrate_event(&EventRegion::power_adaptation(cfg), &pair, &opts).unwrap().value
        }
        Err(e) => panic!("{}: {e}", describe(cfg)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rates_are_ordered_and_energy_is_bounded(cfg in any_config(), g_m in 0.0f64..8.0, g_n in 0.0f64..8.0) {
        let [f, npa, pa] = Scheme::NOMA.map(|s| noma_rate(&cfg, g_m, g_n, s));
        let tol = 1e-12;
        prop_assert!(pa.total_rate() >= npa.total_rate() - tol);
        prop_assert!(npa.total_rate() >= f.total_rate() - tol);
        let e = energy(&cfg, &pa);
        prop_assert!(e <= 2.0 * cfg.beta * cfg.rho_n * (1.0 + tol));
        prop_assert!(e < cfg.rho_n);
        prop_assert!(pa.gamma > 0.0 || g_n == 0.0);
        prop_assert!(pa.gamma <= 1.0);
        prop_assert!(f.oma_slot_rate <= oma_rate(&cfg, g_n, false));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_forms_are_probabilities(cfg in any_config()) {
        let consts = compute_constants(&cfg).unwrap();
        match p_t_exact(&cfg, &consts, 64) {
            Ok(e) => prop_assert!((0.0..=1.0).contains(&e.value)),
            Err(Error::PrecisionLoss { .. }) => {}
            Err(e) => prop_assert!(false, "{}: {e}", describe(&cfg)),
        }
        let b = asymptotic_breakdown(&cfg).unwrap();
        prop_assert!(b.coefficient.is_finite() && b.coefficient >= 0.0, "{}", describe(&cfg));
        prop_assert_eq!(b.order as usize, cfg.m.max(cfg.n));
        let a = p_t_asymptotic(&cfg).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(&b.regime, &consts.regime_tag(cfg.m < cfg.n));
    }

    #[test]
    fn failures_split_into_disjoint_buckets(cfg in any_config(), seed in any::<u64>()) {
        let d = estimate_decomposition(&cfg, 5_000, seed).unwrap();
        let sub: u64 = d.subevents.iter().map(|(_, c)| c).sum();
        prop_assert_eq!(sub, d.power_adaptation());
        prop_assert_eq!(d.type_one + d.no_budget + d.power_adaptation(), d.total);
    }
}

#[test]
fn asymptotic_coefficient_is_finite_in_every_column() {
    let mut s = Stream::new(17, 0);
    for column in all_columns() {
        for _ in 0..20 {
            let cfg = config_in(column, (20.0, 60.0), &mut s);
            let b = asymptotic_breakdown(&cfg).unwrap();
            assert!(b.coefficient.is_finite() && b.coefficient >= 0.0, "{}", describe(&cfg));
            // the coefficient does not depend on the SNR at fixed η
            let other = asymptotic_breakdown(&cfg.with_snr_db(cfg.snr_db() + 7.0).unwrap()).unwrap();
            assert!((other.coefficient - b.coefficient).abs() <= 1e-9 * b.coefficient.max(1e-300));
        }
    }
}

/// The expansion is in the legacy SNR `ρ_m = ρ_n/η`; with `η < 30` it is
/// above 30 dB whenever `ρ_n` is at 45 dB.
#[test]
fn asymptotic_converges_in_every_column() {
    let mut s = Stream::new(23, 0);
    let mut worst: f64 = 0.0;
    for column in all_columns() {
        for _ in 0..2 {
            let cfg = config_in_capped(column, (45.0, 45.0), 30.0, &mut s);
            let errors: Vec<f64> = [30.0, 35.0, 40.0, 45.0]
                .iter()
                .map(|&db| {
                    let c = cfg.with_snr_db(db).unwrap();
                    let (a, r) = (p_t_asymptotic(&c).unwrap().value, reference(&c));
                    if r == 0.0 {
                        assert_eq!(a, 0.0, "{}", describe(&c));
                        0.0
                    } else {
                        (a / r - 1.0).abs()
                    }
                })
                .collect();
            assert!(errors[3] < 0.05, "{}: {errors:?}", describe(&cfg));
            assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{}: {errors:?}", describe(&cfg));
            worst = worst.max(errors[3]);
        }
    }
    println!("largest relative error at 45 dB: {worst:.4}");
}
