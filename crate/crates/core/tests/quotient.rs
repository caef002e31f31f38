use genfun_core::basis::{Basis, ExpVec};
use genfun_core::gnum::{eq_quotient, maddox_c0_seq, maddox_linf_seq, GenNumber};
use genfun_core::ultranorm::classify;
use genfun_core::{Classification, Complex64, GrowthClass, Phase, Scale, SymbolicSeq};
use proptest::prelude::*;

fn number() -> impl Strategy<Value = GenNumber> {
    (-1.0..1.0f64, -2.0..2.0f64, -2.0..2.0f64, any::<bool>()).prop_map(|(c0, s, g, alt)| {
        let phase = if alt { Phase::Alternating } else { Phase::Positive };
        GenNumber::from_class(GrowthClass::from_fields(c0, s, g, 0.0, phase, &Scale::log()).unwrap(), Scale::log()).unwrap()
    })
}

fn eq(a: &GenNumber, b: &GenNumber) -> bool {
    eq_quotient(a, b).unwrap().holds()
}

proptest! {
    #[test]
    fn ring_axioms(a in number(), b in number(), c in number()) {
        prop_assert!(eq(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        prop_assert!(eq(&a.add(&b).unwrap().add(&c).unwrap(), &a.add(&b.add(&c).unwrap()).unwrap()));
        prop_assert!(eq(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        prop_assert!(eq(&a.mul(&b).unwrap().mul(&c).unwrap(), &a.mul(&b.mul(&c).unwrap()).unwrap()));
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(eq(&lhs, &rhs));
        prop_assert!(eq(&a.add(&a.neg()).unwrap(), &GenNumber::zero(Scale::log())));
        prop_assert!(!eq(&a, &GenNumber::zero(Scale::log())));
    }

    #[test]
    fn class_does_not_depend_on_representative(a in number(), k in 0.1..3.0f64) {
        let neg = GenNumber::from_class(GrowthClass::one().with_exps(ExpVec::single(Basis::LogPow(2.0), -k)), Scale::log()).unwrap();
        let moved = a.add(&neg).unwrap();
        prop_assert!(eq(&moved, &a));
        prop_assert_eq!(moved.mul(&moved).unwrap().norm().value.to_bits(), a.mul(&a).unwrap().norm().value.to_bits());
    }

    #[test]
    fn positive_single_terms_invert(c0 in -1.0..1.0f64, s in -2.0..2.0f64) {
        let a = GenNumber::from_class(GrowthClass::from_fields(c0, s, 0.0, 0.0, Phase::Positive, &Scale::log()).unwrap(), Scale::log()).unwrap();
        let one = GenNumber::constant(Complex64::new(1.0, 0.0), Scale::log());
        prop_assert!(eq(&a.mul(&a.inverse().unwrap()).unwrap(), &one));
    }
}

/// `f = exp(s (log n)² + γ log n)` on the Colombeau grid.
fn grid() -> Vec<(f64, f64, SymbolicSeq)> {
    let mut out = Vec::new();
    for s in -2..=2 {
        for g in -2..=2 {
            let exps = ExpVec::from_terms([(Basis::LogPow(2.0), s as f64), (Basis::LOG, g as f64)]);
            out.push((s as f64, g as f64, GrowthClass::one().with_exps(exps).into()));
        }
    }
    out
}

/// Polynomial-growth oracle: `log |f| / log n` at `log n = L` for growing `L`.
fn polynomial_orders(s: f64, g: f64) -> (bool, bool) {
    let order = |l: f64| (s * l * l + g * l) / l;
    let (a, b) = (order(1e3), order(1e6));
    let bounded_above = b <= a.abs() + 10.0;
    let to_minus_infinity = b < -1e5;
    (bounded_above, to_minus_infinity)
}

#[test]
fn colombeau_characterization() {
    let r = Scale::log();
    for (s, g, f) in grid() {
        let (some_gamma, all_gamma) = polynomial_orders(s, g);
        let c = classify(&f, &r);
        assert_eq!(c.is_moderate(), Some(some_gamma), "s={s} γ={g}");
        assert_eq!(c.is_negligible(), Some(all_gamma), "s={s} γ={g}");
    }
}

#[test]
fn maddox_equivalence() {
    let r = Scale::log();
    for (s, g, f) in grid() {
        let c = classify(&f, &r);
        let linf = maddox_linf_seq(&f, &r);
        let c0 = maddox_c0_seq(&f, &r);
        assert!(!linf.verdict.is_inconclusive() && !c0.verdict.is_inconclusive(), "s={s} γ={g}");
        assert_eq!(linf.verdict.holds(), c.is_moderate().unwrap(), "s={s} γ={g}");
        assert_eq!(c0.verdict.holds(), c.is_negligible().unwrap(), "s={s} γ={g}");
    }
    // n^γ needs k > e^γ
    let n3: SymbolicSeq = GrowthClass::power(3.0).into();
    assert_eq!(maddox_linf_seq(&n3, &r).k, Some(21));
    assert_eq!(classify(&n3, &r), Classification::ModerateNotNegligible);
}
