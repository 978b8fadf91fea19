use proptest::prelude::*;

use freqcap::capacity_bounds::{achievability_bound, converse_bound};
use freqcap::channel::{transmit, transmit_poissonized, ChannelParams, Kernel};
use freqcap::distributions::{multinomial_sample, DiscretePmf};
use freqcap::mutual_info::{mutual_information, PoissonChannelSpec};
use freqcap::special_math::{log_sum_exp, psi_max_entropy};
use freqcap::{CountVector, RngStream};

fn weights(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..max_len)
        .prop_filter("some mass", |w| w.iter().sum::<f64>() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn achievability_below_converse(g in 1.0f64..1e5, frac in 0.05f64..2.7) {
        let r = frac * g;
        let a = achievability_bound(g, r).unwrap().get();
        let c = converse_bound(g, r).unwrap().get();
        prop_assert!(a <= c + 1e-12, "g={g} r={r}: {a} > {c}");
    }

    #[test]
    fn converse_nondecreasing_in_r(g in 1.0f64..1e4, r in 0.01f64..1e4, dr in 0.0f64..100.0) {
        let lo = converse_bound(g, r).unwrap().get();
        let hi = converse_bound(g, r + dr).unwrap().get();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn psi_increasing(mu in 1e-3f64..1e3, d in 1e-3f64..10.0) {
        prop_assert!(psi_max_entropy(mu + d).unwrap().get() > psi_max_entropy(mu).unwrap().get());
    }

    #[test]
    fn log_sum_exp_shift(v in prop::collection::vec(-50.0f64..50.0, 1..20), c in -100.0f64..100.0) {
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        prop_assert!((log_sum_exp(&shifted) - log_sum_exp(&v) - c).abs() < 1e-10);
        let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(log_sum_exp(&v) >= m);
    }

    #[test]
    fn pmf_normalized(w in weights(30), offset in 0u64..50) {
        let p = DiscretePmf::from_weights(offset, &w).unwrap();
        prop_assert!((p.total_mass() - 1.0).abs() < 1e-12);
        let (lo, hi) = p.support_bounds();
        prop_assert!(lo >= offset && hi < offset + w.len() as u64);
        prop_assert!(p.entropy().get() >= -1e-12);
    }

    #[test]
    fn mi_between_zero_and_input_entropy(w in weights(12), gain in 0.01f64..20.0) {
        let p = DiscretePmf::from_weights(1, &w).unwrap();
        let h = p.entropy().get();
        let mi = mutual_information(&PoissonChannelSpec::new(p, gain).unwrap()).unwrap().get();
        prop_assert!(mi >= -1e-10 && mi <= h + 1e-9, "mi={mi} h={h}");
    }

    #[test]
    fn mi_nondecreasing_in_gain(w in weights(8), gain in 0.05f64..5.0) {
        let p = DiscretePmf::from_weights(1, &w).unwrap();
        let lo = mutual_information(&PoissonChannelSpec::new(p.clone(), gain).unwrap()).unwrap().get();
        let hi = mutual_information(&PoissonChannelSpec::new(p, 2.0 * gain).unwrap()).unwrap().get();
        prop_assert!(hi >= lo - 1e-9);
    }

    #[test]
    fn multinomial_preserves_total(w in weights(20), trials in 0u64..5000, seed in any::<u64>()) {
        let s: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / s).collect();
        let y = multinomial_sample(trials, &probs, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(y.total(), trials);
        for (yi, pi) in y.as_slice().iter().zip(&probs) {
            prop_assert!(*pi > 0.0 || *yi == 0);
        }
    }

    #[test]
    fn transmit_preserves_total_and_support(
        counts in prop::collection::vec(0u64..6, 2..16),
        seed in any::<u64>(),
        err in 0.0f64..0.5,
    ) {
        prop_assume!(counts.iter().sum::<u64>() > 0);
        let n = counts.len();
        let x = CountVector::new(counts.clone());
        let params = ChannelParams::new(n, 6.0, 2.0).unwrap();
        let mut rng = RngStream::new(seed, 1);
        let y = transmit(&x, &params, &mut rng).unwrap();
        prop_assert_eq!(y.total(), params.total_samples());
        for (xi, yi) in counts.iter().zip(y.as_slice()) {
            prop_assert!(*xi > 0 || *yi == 0);
        }
        let noisy = params.clone().with_kernel(Kernel::symmetric(n, err).unwrap()).unwrap();
        prop_assert_eq!(transmit(&x, &noisy, &mut rng).unwrap().total(), noisy.total_samples());
        let z = transmit_poissonized(&x, &params, &mut rng).unwrap();
        for (xi, zi) in counts.iter().zip(z.as_slice()) {
            prop_assert!(*xi > 0 || *zi == 0);
        }
    }

    #[test]
    fn fqcv_roundtrip(counts in prop::collection::vec(0..=u32::MAX as u64, 0..64), big in (u32::MAX as u64 + 1)..u64::MAX) {
        let x = CountVector::new(counts.clone());
        let mut buf = Vec::new();
        x.write_fqcv(&mut buf).unwrap();
        let back = CountVector::read_fqcv(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back, Some(x));

        let mut wide = counts;
        wide.push(big);
        prop_assert!(CountVector::new(wide).write_fqcv(&mut Vec::new()).is_err());
    }

    #[test]
    fn same_seed_same_output(seed in any::<u64>(), stream in any::<u64>()) {
        let x = CountVector::new(vec![3, 0, 5, 1]);
        let params = ChannelParams::new(4, 3.0, 2.0).unwrap();
        let a = transmit(&x, &params, &mut RngStream::new(seed, stream)).unwrap();
        let b = transmit(&x, &params, &mut RngStream::new(seed, stream)).unwrap();
        prop_assert_eq!(a, b);
    }
}
