use genfun_core::association::{
    check_additivity, default_testset, implication_chain, implication_chain_rep, j_assoc, null_test, s_null, strong_assoc,
    Ball, Membership, NullSeq,
};
use genfun_core::basis::{Basis, ExpVec};
use genfun_core::gnum::{eq_quotient, GenNumber};
use genfun_core::torus::{embed, CoeffFamily, TorusGF};
use genfun_core::{GrowthClass, Scale};
use proptest::prelude::*;

fn log() -> Scale {
    Scale::log()
}

fn rep_from(a: f64, b: f64, c: f64) -> GenNumber {
    let exps = ExpVec::from_terms([(Basis::LOG, -a), (Basis::LogLog, b)]);
    GenNumber::from_class(GrowthClass::real(c).unwrap().with_exps(exps), log()).unwrap()
}

/// Pairing-like representatives `c · n^{-a} (log n)^b`, sometimes plus a second term.
fn pairing_rep() -> impl Strategy<Value = GenNumber> {
    (0.0..2.0f64, prop::sample::select(vec![-2.0, -1.0, 0.0, 1.0, 2.0]), 0.1..5.0f64, any::<bool>(), 0.0..2.0f64).prop_map(
        |(a, b, c, two, a2)| {
            let x = rep_from(a, b, c);
            if two {
                x.add(&rep_from(a2, 0.0, 1.0)).unwrap()
            } else {
                x
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chain_has_no_violations(x in pairing_rep(), s in 0.05..1.9f64, gap in 0.01..1.0f64) {
        let rep = implication_chain_rep(&x, s, s - gap);
        prop_assert!(rep.is_consistent(), "{:?}", rep.violations);
        prop_assert!(!rep.weak_s.is_inconclusive());
        prop_assert!(!rep.strong_weak_s.is_inconclusive());
    }

    /// `N^(s) = e_r^{-s} N`.
    #[test]
    fn shifted_null_sequences(x in pairing_rep(), s in -1.0..2.0f64) {
        let shifted = x.mul(&GenNumber::from_class(GrowthClass::e_r(&log(), s).unwrap(), log()).unwrap()).unwrap();
        prop_assert_eq!(s_null(&x, s).holds(), null_test(&shifted).holds());
    }

    /// Absolutely convex `J` is stable under multiplication by the closed unit ball.
    #[test]
    fn ball_association_is_stable(x in pairing_rep(), h_exp in -2.0..0.0f64, radius in 0.2..1.0f64) {
        let h = GenNumber::from_class(GrowthClass::power(h_exp), log()).unwrap();
        prop_assume!(h.norm().value <= 1.0);
        if Ball(radius).contains(&x).holds() {
            prop_assert!(Ball(radius).contains(&x.mul(&h).unwrap()).holds());
        }
    }
}

#[test]
fn negligible_sequences_are_null_for_every_shift() {
    let k = GenNumber::from_class(GrowthClass::one().with_exps(ExpVec::single(Basis::LogPow(2.0), -1.0)), log()).unwrap();
    for s in [0.0, 1.0, 5.0, 50.0] {
        assert!(s_null(&k, s).holds());
    }
    // N^(s) shrinks as s grows
    let x = rep_from(1.0, 0.0, 1.0);
    assert!(s_null(&x, 0.5).holds() && s_null(&x, 1.0).fails());
}

#[test]
fn strong_association_for_all_s_forces_equality() {
    let f = rep_from(-1.0, 0.0, 1.0);
    let neg = GenNumber::from_class(GrowthClass::one().with_exps(ExpVec::single(Basis::LogPow(2.0), -1.0)), log()).unwrap();
    let g = f.add(&neg).unwrap();
    let ladder = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    assert!(ladder.iter().all(|&s| strong_assoc(&f, &g, s).unwrap().holds()));
    assert!(eq_quotient(&f, &g).unwrap().holds());
    // a difference of norm e^{-3} is caught at s = 4
    let h = f.add(&rep_from(3.0, 0.0, 1.0)).unwrap();
    assert!(strong_assoc(&f, &h, 2.0).unwrap().holds());
    assert!(strong_assoc(&f, &h, 4.0).unwrap().fails());
    assert!(eq_quotient(&f, &h).unwrap().fails());
}

#[test]
fn delta_pairing_rate() {
    let r = log();
    let d = embed(CoeffFamily::Constant, &r).unwrap();
    let delta = TorusGF::distribution(CoeffFamily::Constant, &r).unwrap();
    let p = genfun_core::torus::pair(&d.sub(&delta).unwrap(), &CoeffFamily::Geometric(0.5)).unwrap();
    // -2 · 2^{-(K_n+1)} / (1 - 1/2) = -2 · 2^{-K_n}, i.e. about -2 n^{-log 2}
    for n in [1u64 << 8, 1 << 16] {
        let kk = genfun_core::torus::k_n(&r, n) as i32;
        let expected = -2.0 * 0.5f64.powi(kk);
        let got = p.eval(n);
        assert!((got.re - expected).abs() <= 1e-12 * expected.abs().max(1e-300), "{n}: {got} vs {expected}");
    }
    let rate = std::f64::consts::LN_2;
    assert!(s_null(&p, rate - 0.05).holds());
    assert!(s_null(&p, rate + 0.05).fails());
    let chain = implication_chain(&d, &delta, 0.5, 0.25, &default_testset()).unwrap();
    assert!(chain.is_consistent());
    assert!(j_assoc(&d, &delta, &NullSeq(0.5), &[CoeffFamily::Geometric(0.5)]).unwrap().holds());
}

#[test]
fn membership_sets_are_additive_on_samples() {
    let samples: Vec<GenNumber> =
        [(0.5, 0.0), (1.0, 1.0), (2.0, -1.0), (0.0, 0.0), (-0.5, 2.0)].iter().map(|&(a, b)| rep_from(a, b, 1.5)).collect();
    for m in [&NullSeq(0.0) as &dyn Membership, &NullSeq(0.7), &Ball(1.0), &Ball(0.3)] {
        assert!(check_additivity(m, &samples).holds());
    }
}
