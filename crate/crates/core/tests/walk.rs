use proptest::prelude::*;
use qw3::analysis::sigma_of;
use qw3::coin::{grover_coin, Spinor};
use qw3::walk::{
    gcp_step_identity_check, initial_state, localized_coin, nonlocalized_coin,
    position_distribution, step_pure, PositionDistribution,
};
use qw3::Complex64;

fn distributions(ic: Spinor, steps: usize) -> Vec<PositionDistribution> {
    let coin = grover_coin();
    let mut s = initial_state(ic, steps + 1).unwrap();
    let mut out = vec![position_distribution(&s)];
    for _ in 0..steps {
        s = step_pure(&s, &coin).unwrap();
        out.push(position_distribution(&s));
    }
    out
}

fn spinor() -> impl Strategy<Value = Spinor> {
    prop::array::uniform6(-1.0f64..1.0)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            [0, 1, 2].map(|k| Complex64::new(v[2 * k], v[2 * k + 1]) / norm)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gcp_identity_holds_for_random_coins(ic in spinor()) {
        let coin = grover_coin();
        let mut s = initial_state(ic, 51).unwrap();
        for _ in 0..50 {
            prop_assert!(gcp_step_identity_check(&s, &coin).unwrap() < 1e-10);
            s = step_pure(&s, &coin).unwrap();
        }
    }

    #[test]
    fn norm_and_light_cone(ic in spinor(), steps in 1usize..60) {
        for (t, d) in distributions(ic, steps).iter().enumerate() {
            prop_assert!((d.total() - 1.0).abs() < 1e-10);
            for (n, p) in d.iter() {
                if n.unsigned_abs() as usize > t {
                    prop_assert_eq!(p, 0.0);
                }
            }
        }
    }
}

#[test]
fn localization_signature() {
    let loc = distributions(localized_coin(), 200);
    let rel = (loc[200].at(0) - loc[100].at(0)).abs() / loc[100].at(0);
    assert!(rel < 0.25, "{rel}");

    let non = distributions(nonlocalized_coin(), 200);
    assert!(non[200].at(0) < non[100].at(0));
}

#[test]
fn coherent_spread_is_linear() {
    for ic in [localized_coin(), nonlocalized_coin()] {
        let sigma: Vec<f64> = distributions(ic, 100).iter().map(sigma_of).collect();
        let fit = qw3::analysis::SigmaSeries::new(sigma).fit(20..=100);
        assert!(fit.r_squared >= 0.999, "{fit:?}");
        assert!(fit.slope > 0.3);
    }
}
