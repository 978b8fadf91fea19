use std::ffi::CStr;
use std::ptr;

use freqcap_ffi::*;

fn last_error() -> String {
    let p = freqcap_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn bounds_match_the_library() {
    let mut conv = 0.0;
    let mut ach = 0.0;
    unsafe {
        assert_eq!(freqcap_converse_bound(100.0, 40.0, &mut conv), FreqcapStatus::Ok);
        assert_eq!(freqcap_achievability_bound(100.0, 40.0, &mut ach), FreqcapStatus::Ok);
    }
    assert_eq!(conv, freqcap::capacity_bounds::converse_bound(100.0, 40.0).unwrap().get());
    assert_eq!(ach, freqcap::capacity_bounds::achievability_bound(100.0, 40.0).unwrap().get());

    let (mut mu, mut off) = (0.0, 0.0);
    assert_eq!(unsafe { freqcap_optimal_ratio(&mut mu, &mut off) }, FreqcapStatus::Ok);
    assert!((mu - 0.398).abs() < 1e-3 && (off + 1.296).abs() < 1e-3);
}

#[test]
fn domain_errors_set_message() {
    let mut v = 0.0;
    let status = unsafe { freqcap_converse_bound(-1.0, 2.0, &mut v) };
    assert_eq!(status, FreqcapStatus::Domain);
    assert!(last_error().contains("converse_bound"));

    let status = unsafe { freqcap_converse_bound(1.0, 2.0, ptr::null_mut()) };
    assert_eq!(status, FreqcapStatus::NullPointer);
    assert!(last_error().contains("out"));
}

#[test]
fn dna_example() {
    let (mut lead, mut low) = (0.0, 0.0);
    let beta = 0.76 / 4f64.ln();
    let status = unsafe { freqcap_dna_log_cardinality(4e21, beta, 4, false, &mut lead, &mut low) };
    assert_eq!(status, FreqcapStatus::Ok);
    assert!((lead / 1.253e16 - 1.0).abs() < 0.01);
    assert!(low < lead);
}

#[test]
fn pmf_and_mutual_information() {
    let mut pmf = ptr::null_mut();
    let w = [0.5, 0.5];
    unsafe {
        assert_eq!(freqcap_pmf_from_weights(1, w.as_ptr(), 2, &mut pmf), FreqcapStatus::Ok);
        let (mut lo, mut hi, mut mean, mut p) = (0, 0, 0.0, 0.0);
        assert_eq!(freqcap_pmf_support(pmf, &mut lo, &mut hi), FreqcapStatus::Ok);
        assert_eq!((lo, hi), (1, 2));
        assert_eq!(freqcap_pmf_mean(pmf, &mut mean), FreqcapStatus::Ok);
        assert!((mean - 1.5).abs() < 1e-15);
        assert_eq!(freqcap_pmf_prob(pmf, 2, &mut p), FreqcapStatus::Ok);
        assert!((p - 0.5).abs() < 1e-15);
        let mut mi = 0.0;
        assert_eq!(freqcap_mutual_information(pmf, 1.0, &mut mi), FreqcapStatus::Ok);
        assert!((mi - 0.078_709_199_794_526_7).abs() < 1e-10);
        freqcap_pmf_free(pmf);

        let bad = [0.0, 0.0];
        let mut none = ptr::null_mut();
        assert_eq!(freqcap_pmf_from_weights(1, bad.as_ptr(), 2, &mut none), FreqcapStatus::Domain);
        assert!(none.is_null());
        assert_eq!(freqcap_pmf_from_weights(1, ptr::null(), 2, &mut none), FreqcapStatus::NullPointer);

        let mut gam = ptr::null_mut();
        assert_eq!(freqcap_pmf_truncated_gamma(100.0, 0.1, &mut gam), FreqcapStatus::Ok);
        let (mut lo, mut hi) = (0, 0);
        freqcap_pmf_support(gam, &mut lo, &mut hi);
        assert!(lo >= 1 && hi <= 159);
        freqcap_pmf_free(gam);
        freqcap_pmf_free(ptr::null_mut());
    }
}

#[test]
fn transmit_is_reproducible_and_checked() {
    unsafe {
        let mut ch = ptr::null_mut();
        assert_eq!(freqcap_channel_new(4, 3.0, 2.5, &mut ch), FreqcapStatus::Ok);
        let mut total = 0;
        freqcap_channel_total_samples(ch, &mut total);
        assert_eq!(total, 10);

        let x = [1u64, 2, 3, 6];
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let mut rng = ptr::null_mut();
            assert_eq!(freqcap_rng_new(5, 0, &mut rng), FreqcapStatus::Ok);
            let mut y = [0u64; 4];
            assert_eq!(freqcap_transmit(ch, rng, x.as_ptr(), y.as_mut_ptr(), 4), FreqcapStatus::Ok);
            assert_eq!(y.iter().sum::<u64>(), 10);
            outputs.push(y);
            freqcap_rng_free(rng);
        }
        assert_eq!(outputs[0], outputs[1]);

        let mut rng = ptr::null_mut();
        freqcap_rng_new(5, 0, &mut rng);
        let over = [4u64, 4, 4, 1];
        let mut y = [0u64; 4];
        assert_eq!(freqcap_transmit(ch, rng, over.as_ptr(), y.as_mut_ptr(), 4), FreqcapStatus::Codeword);
        assert_eq!(freqcap_transmit(ch, rng, x.as_ptr(), y.as_mut_ptr(), 3), FreqcapStatus::Dimension);
        freqcap_rng_free(rng);
        freqcap_channel_free(ch);

        let mut none = ptr::null_mut();
        assert_eq!(freqcap_channel_new(3, 2.0, 0.5, &mut none), FreqcapStatus::Domain);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(freqcap_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
