use bkwg::baseline::{Family, FamilyId};
use bkwg::specialfn::{inv_reg_inc_beta, reg_inc_beta};
use bkwg::{BKw, Baseline};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = f64> {
    (-1.5f64..1.5).prop_map(f64::exp)
}

fn baseline() -> impl Strategy<Value = Baseline<f64>> {
    (0usize..4, shape(), shape(), shape()).prop_map(|(k, p, q, r)| {
        let (id, params) = match k {
            0 => (FamilyId::Exponential, vec![p]),
            1 => (FamilyId::Weibull, vec![p, q]),
            2 => (FamilyId::Lomax, vec![p + 0.5, q]),
            _ => (FamilyId::Dagum, vec![p, q, r + 0.5]),
        };
        Baseline::new(Family::from_id(id), params).unwrap()
    })
}

fn model() -> impl Strategy<Value = BKw<f64>> {
    (shape(), shape(), shape(), shape(), baseline())
        .prop_map(|(m, n, a, b, g)| BKw::new(m, n, a, b, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cdf_and_sf_are_complementary(d in model(), u in 0.001f64..0.999) {
        let t = d.quantile(u).unwrap();
        prop_assert!((d.cdf(t) + d.sf(t) - 1.0).abs() <= 1e-12);
        prop_assert!((d.cdf(t) - u).abs() <= 1e-9);
    }

    #[test]
    fn cdf_is_monotone(d in model(), u in 0.01f64..0.98, du in 0.001f64..0.02) {
        let t0 = d.quantile(u).unwrap();
        let t1 = d.quantile(u + du).unwrap();
        prop_assert!(t1 >= t0);
        prop_assert!(d.cdf(t1) >= d.cdf(t0));
        prop_assert!(d.chrf(t1) >= d.chrf(t0));
    }

    #[test]
    fn densities_are_non_negative(d in model(), u in 0.001f64..0.999) {
        let t = d.quantile(u).unwrap();
        prop_assert!(d.pdf(t) >= 0.0);
        prop_assert!(d.hrf(t) >= 0.0);
        prop_assert!(d.rhrf(t) >= 0.0);
        // hrf = pdf / sf and rhrf = pdf / cdf
        prop_assert!((d.hrf(t) * d.sf(t) - d.pdf(t)).abs() <= 1e-9 * d.pdf(t).max(1.0));
        prop_assert!((d.rhrf(t) * d.cdf(t) - d.pdf(t)).abs() <= 1e-9 * d.pdf(t).max(1.0));
    }

    #[test]
    fn unit_generator_is_the_baseline(g in baseline(), u in 0.001f64..0.999) {
        let d = BKw::new(1.0, 1.0, 1.0, 1.0, g.clone()).unwrap();
        let t = g.quantile(u).unwrap();
        prop_assert!((d.cdf(t) - g.cdf(t)).abs() <= 1e-12);
        prop_assert!((d.pdf(t) - g.pdf(t)).abs() <= 1e-12 * g.pdf(t).max(1.0));
    }

    #[test]
    fn incomplete_beta_inverts(m in shape(), n in shape(), u in 0.0001f64..0.9999) {
        let x = inv_reg_inc_beta(u, m, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((reg_inc_beta(x, m, n).unwrap() - u).abs() <= 1e-10);
    }

    #[test]
    fn incomplete_beta_reflects(m in shape(), n in shape(), x in 0.0f64..1.0) {
        let l = reg_inc_beta(x, m, n).unwrap();
        let r = reg_inc_beta(1.0 - x, n, m).unwrap();
        prop_assert!((l + r - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_seed_deterministic(d in model(), seed in any::<u64>()) {
        prop_assert_eq!(d.sample(8, seed).unwrap(), d.sample(8, seed).unwrap());
    }
}
