//! Generalized numbers: moderate sequences modulo negligible ones.

use alloc::format;
use alloc::sync::Arc;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;

use crate::growth::{GrowthClass, Phase, Precision, SymbolicSeq};
use crate::ladder::IndexLadder;
use crate::scales::Scale;
use crate::ultranorm::{self, Classification, FnSeq, UltraNormValue};
use crate::verdict::{Evidence, Verdict, Witness};
use crate::{Error, Result};

/// Largest `k` tried by the Maddox membership scans.
pub const MADDOX_K_MAX: u64 = 1_000_000;

pub type SeqFn = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum Rep {
    Symbolic(SymbolicSeq),
    /// Known only through its values.
    Callable(SeqFn),
}

impl fmt::Debug for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rep::Symbolic(s) => write!(f, "{s:?}"),
            Rep::Callable(_) => f.write_str("<callable>"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenNumber {
    rep: Rep,
    scale: Scale,
    class: Classification,
    /// Exact values when the symbolic rep is only known up to a bounded factor.
    values: Option<ValueFn>,
}

#[derive(Clone)]
struct ValueFn(SeqFn);

impl fmt::Debug for ValueFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<values>")
    }
}

impl GenNumber {
    pub fn symbolic(seq: SymbolicSeq, scale: Scale) -> Result<Self> {
        let seq = seq.collect_like_terms();
        let class = ultranorm::classify(&seq, &scale);
        Self::checked(Rep::Symbolic(seq), scale, class)
    }

    pub fn callable<F>(f: F, scale: Scale) -> Result<Self>
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        let f: SeqFn = Arc::new(f);
        let g = f.clone();
        let class = ultranorm::classify_estimate(&FnSeq(move |n| g(n)), &scale, &IndexLadder::default());
        Self::checked(Rep::Callable(f), scale, class)
    }

    fn checked(rep: Rep, scale: Scale, class: Classification) -> Result<Self> {
        if class == Classification::Unbounded {
            return Err(Error::NotModerate(format!("{rep:?} has infinite norm on {scale:?}")));
        }
        Ok(GenNumber { rep, scale, class, values: None })
    }

    pub fn from_class(g: GrowthClass, scale: Scale) -> Result<Self> {
        Self::symbolic(g.into(), scale)
    }

    pub fn constant(c: Complex64, scale: Scale) -> Self {
        let seq = match GrowthClass::constant(c) {
            Ok(g) => g.into(),
            Err(_) => SymbolicSeq::zero(),
        };
        Self::symbolic(seq, scale).expect("constants are moderate")
    }

    pub fn zero(scale: Scale) -> Self {
        Self::constant(Complex64::new(0.0, 0.0), scale)
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn as_symbolic(&self) -> Option<&SymbolicSeq> {
        match &self.rep {
            Rep::Symbolic(s) => Some(s),
            Rep::Callable(_) => None,
        }
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn classification(&self) -> Classification {
        self.class
    }

    /// Attaches exact pointwise values to a representative whose symbolic
    /// form only determines its growth.
    pub fn with_values<F>(mut self, f: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        self.values = Some(ValueFn(Arc::new(f)));
        self
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        if let Some(v) = &self.values {
            return (v.0)(n);
        }
        match &self.rep {
            Rep::Symbolic(s) => s.eval(n),
            Rep::Callable(f) => f(n),
        }
    }

    /// Exact norm for symbolic reps, estimated otherwise.
    pub fn norm(&self) -> UltraNormValue {
        match &self.rep {
            Rep::Symbolic(s) => ultranorm::norm_collected(s, &self.scale).unwrap_or(UltraNormValue::inconclusive()),
            Rep::Callable(f) => {
                let f = f.clone();
                ultranorm::norm_estimate(&FnSeq(move |n| f(n)), &self.scale, &IndexLadder::default())
            }
        }
    }

    fn as_fn(&self) -> SeqFn {
        if let Some(v) = &self.values {
            return v.0.clone();
        }
        match &self.rep {
            Rep::Symbolic(s) => {
                let s = s.clone();
                Arc::new(move |n| s.eval(n))
            }
            Rep::Callable(f) => f.clone(),
        }
    }

    fn same_scale(&self, other: &GenNumber) -> Result<()> {
        if self.scale == other.scale {
            Ok(())
        } else {
            Err(Error::ScaleMismatch)
        }
    }

    fn combine(
        &self,
        other: &GenNumber,
        sym: impl Fn(&SymbolicSeq, &SymbolicSeq) -> SymbolicSeq,
        num: fn(Complex64, Complex64) -> Complex64,
    ) -> Result<GenNumber> {
        self.same_scale(other)?;
        match (&self.rep, &other.rep) {
            (Rep::Symbolic(a), Rep::Symbolic(b)) => {
                let out = GenNumber::symbolic(sym(a, b), self.scale.clone())?;
                if self.values.is_none() && other.values.is_none() {
                    return Ok(out);
                }
                let (f, g) = (self.as_fn(), other.as_fn());
                Ok(out.with_values(move |n| num(f(n), g(n))))
            }
            _ => {
                let (f, g) = (self.as_fn(), other.as_fn());
                GenNumber::callable(move |n| num(f(n), g(n)), self.scale.clone())
            }
        }
    }

    pub fn add(&self, other: &GenNumber) -> Result<GenNumber> {
        self.combine(other, |a, b| a.add(b), |x, y| x + y)
    }

    pub fn sub(&self, other: &GenNumber) -> Result<GenNumber> {
        self.combine(other, |a, b| a.sub(b), |x, y| x - y)
    }

    pub fn mul(&self, other: &GenNumber) -> Result<GenNumber> {
        self.combine(other, |a, b| a.mul(b), |x, y| x * y)
    }

    pub fn neg(&self) -> GenNumber {
        self.scale_by(Complex64::new(-1.0, 0.0))
    }

    pub fn scale_by(&self, c: Complex64) -> GenNumber {
        let values = self.values.as_ref().map(|v| {
            let f = v.0.clone();
            ValueFn(Arc::new(move |n| c * f(n)) as SeqFn)
        });
        match &self.rep {
            Rep::Symbolic(s) => {
                let mut out =
                    GenNumber::symbolic(s.scale_by(c), self.scale.clone()).expect("scalar multiple stays moderate");
                out.values = values;
                out
            }
            Rep::Callable(f) => {
                let f = f.clone();
                let class = if c.norm() == 0.0 { Classification::Negligible } else { self.class };
                GenNumber { rep: Rep::Callable(Arc::new(move |n| c * f(n))), class, values, scale: self.scale.clone() }
            }
        }
    }

    /// Inverse of a single-term, non-alternating representative.
    pub fn inverse(&self) -> Result<GenNumber> {
        let Some(s) = self.as_symbolic() else {
            return Err(Error::NotInvertible);
        };
        match s.terms() {
            [t] if t.phase() == Phase::Positive && t.precision() == Precision::Exact => {
                GenNumber::from_class(t.inverse(), self.scale.clone())
            }
            _ => Err(Error::NotInvertible),
        }
    }
}

pub fn gn_add(a: &GenNumber, b: &GenNumber) -> Result<GenNumber> {
    a.add(b)
}

pub fn gn_mul(a: &GenNumber, b: &GenNumber) -> Result<GenNumber> {
    a.mul(b)
}

pub fn gn_neg(a: &GenNumber) -> GenNumber {
    a.neg()
}

/// The positive unit `e_r = (e^{1/r_n})_n`.
pub fn unit_e_r(r: &Scale) -> Result<GenNumber> {
    GenNumber::from_class(GrowthClass::e_r(r, 1.0)?, r.clone())
}

/// Powered values `|f_n|^{r_n}` on the ladder tail, for witnesses.
fn powered_tail(f: &dyn Fn(u64) -> f64, r: &Scale) -> (u64, f64) {
    let ladder = IndexLadder::default().clamp_start(r.domain_start().max(3));
    let n = ladder.last().unwrap_or(3);
    (n, libm::exp(r.eval(n) * f(n)))
}

/// `a = b` in the quotient: the difference is negligible.
pub fn eq_quotient(a: &GenNumber, b: &GenNumber) -> Result<Verdict> {
    let d = a.sub(b)?;
    let norm = d.norm();
    let (n, p) = match &d.rep {
        Rep::Symbolic(s) => powered_tail(&|n| s.ln_abs(n), &d.scale),
        Rep::Callable(f) => powered_tail(&|n| libm::log(f(n).norm()), &d.scale),
    };
    if d.as_symbolic().is_some() {
        return Ok(match Classification::from_norm(&norm) {
            Classification::Negligible => Verdict::Holds,
            Classification::Inconclusive | Classification::Moderate => {
                Verdict::inconclusive("difference has no closed-form norm")
            }
            _ => Verdict::Fails(Witness::at(n, alloc::vec![p, norm.value], format!("‖a - b‖ = {}", norm.value))),
        });
    }
    Ok(match norm.mode {
        ultranorm::NormMode::Estimated { ci_low, .. } if ci_low > 0.0 => {
            Verdict::Fails(Witness::at(n, alloc::vec![p, norm.value], "difference norm bounded away from 0"))
        }
        _ => Verdict::Inconclusive(Evidence::with_trace(alloc::vec![(n, p)], "black-box difference; negligibility unverifiable")),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaddoxOutcome {
    pub verdict: Verdict,
    /// The `k` that witnesses (ℓ∞) or refutes (c₀) membership.
    pub k: Option<u64>,
}

/// Does `|x_n| k^{s/r_n}` tend to zero (`strict`) or stay bounded, for every
/// term of `x`?
fn scan_term_ok(x: &SymbolicSeq, r: &Scale, ln_k: f64, strict: bool) -> bool {
    let recip = r.reciprocal().expect("checked by caller").scale(ln_k);
    x.terms().iter().all(|t| {
        let sign = t.exps().add(&recip).sign_at_infinity();
        if strict {
            sign == Ordering::Less
        } else {
            sign != Ordering::Greater
        }
    })
}

/// Smallest `k ≤ MADDOX_K_MAX` with `pred(k)`, for `pred` monotone in `k`.
fn first_true(pred: impl Fn(u64) -> bool) -> Option<u64> {
    if !pred(MADDOX_K_MAX) {
        return None;
    }
    let (mut lo, mut hi) = (1, MADDOX_K_MAX);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

fn maddox_input(x: &GenNumber) -> core::result::Result<&SymbolicSeq, Verdict> {
    x.as_symbolic().ok_or_else(|| Verdict::inconclusive("Maddox scan needs a symbolic representative"))
}

fn maddox_prepare(x: &SymbolicSeq, r: &Scale) -> core::result::Result<SymbolicSeq, Verdict> {
    if r.reciprocal().is_none() {
        return Err(Verdict::inconclusive("Maddox scan needs a closed-form scale"));
    }
    let s = x.collect_like_terms();
    if s.possible_cancellation() || s.precision() == Precision::Unknown {
        return Err(Verdict::inconclusive("representative may cancel"));
    }
    Ok(s)
}

/// `∃k : sup_n |x_n| k^{-1/r_n} < ∞`, which characterises moderation.
pub fn maddox_linf_test(x: &GenNumber) -> MaddoxOutcome {
    match maddox_input(x) {
        Ok(s) => maddox_linf_seq(s, &x.scale),
        Err(v) => MaddoxOutcome { verdict: v, k: None },
    }
}

/// `∀k : |x_n| k^{1/r_n} → 0`, which characterises negligibility.
pub fn maddox_c0_test(x: &GenNumber) -> MaddoxOutcome {
    match maddox_input(x) {
        Ok(s) => maddox_c0_seq(s, &x.scale),
        Err(v) => MaddoxOutcome { verdict: v, k: None },
    }
}

/// [`maddox_linf_test`] on any symbolic sequence, moderate or not.
pub fn maddox_linf_seq(x: &SymbolicSeq, r: &Scale) -> MaddoxOutcome {
    let s = match maddox_prepare(x, r) {
        Ok(s) => s,
        Err(v) => return MaddoxOutcome { verdict: v, k: None },
    };
    let found = first_true(|k| scan_term_ok(&s, r, -libm::log(k as f64), false));
    let moderate = ultranorm::classify(&s, r).is_moderate();
    match (found, moderate) {
        (Some(k), Some(true)) => MaddoxOutcome { verdict: Verdict::Holds, k: Some(k) },
        (None, Some(false)) => MaddoxOutcome {
            verdict: Verdict::fail(format!("no k ≤ {MADDOX_K_MAX} bounds |x_n| k^(-1/r_n)")),
            k: None,
        },
        _ => MaddoxOutcome { verdict: Verdict::inconclusive("scan and closed form disagree within k_max"), k: found },
    }
}

/// [`maddox_c0_test`] on any symbolic sequence.
pub fn maddox_c0_seq(x: &SymbolicSeq, r: &Scale) -> MaddoxOutcome {
    let s = match maddox_prepare(x, r) {
        Ok(s) => s,
        Err(v) => return MaddoxOutcome { verdict: v, k: None },
    };
    let failing = first_true(|k| !scan_term_ok(&s, r, libm::log(k as f64), true));
    match (failing, ultranorm::classify(&s, r).is_negligible()) {
        (None, Some(true)) => MaddoxOutcome { verdict: Verdict::Holds, k: None },
        (Some(k), Some(false)) => MaddoxOutcome {
            verdict: Verdict::Fails(Witness::new(format!("|x_n| {k}^(1/r_n) does not tend to 0"))),
            k: Some(k),
        },
        _ => MaddoxOutcome { verdict: Verdict::inconclusive("scan and closed form disagree within k_max"), k: failing },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Basis, ExpVec};
    use approx::assert_relative_eq;

    fn log() -> Scale {
        Scale::log()
    }

    fn pow(g: f64) -> GenNumber {
        GenNumber::from_class(GrowthClass::power(g), log()).unwrap()
    }

    fn neg_log_n() -> GrowthClass {
        GrowthClass::one().with_exps(ExpVec::single(Basis::LogPow(2.0), -1.0))
    }

    #[test]
    fn ring_examples() {
        let n = pow(1.0);
        let z = gn_add(&n, &gn_neg(&n)).unwrap();
        assert!(eq_quotient(&z, &GenNumber::zero(log())).unwrap().holds());
        let sq = gn_mul(&n, &n).unwrap();
        assert_eq!(sq.classification(), Classification::ModerateNotNegligible);
        assert_relative_eq!(sq.norm().value, libm::exp(2.0), max_relative = 1e-15);
        let e = unit_e_r(&log()).unwrap();
        let one = gn_mul(&e, &e.inverse().unwrap()).unwrap();
        assert!(eq_quotient(&one, &GenNumber::constant(Complex64::new(1.0, 0.0), log())).unwrap().holds());
    }

    #[test]
    fn unbounded_reps_are_rejected() {
        let en = GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(1.0), 1.0));
        assert!(matches!(GenNumber::from_class(en, log()), Err(Error::NotModerate(_))));
        // inverting a negligible number leaves the moderate ring
        let k = GenNumber::from_class(neg_log_n(), log()).unwrap();
        assert!(matches!(k.inverse(), Err(Error::NotModerate(_))));
    }

    #[test]
    fn eq_quotient_examples() {
        let a = pow(1.0);
        let b = GenNumber::symbolic(SymbolicSeq::from(GrowthClass::power(1.0)).add(&neg_log_n().into()), log()).unwrap();
        assert!(eq_quotient(&a, &b).unwrap().holds());
        let two_n = a.scale_by(Complex64::new(2.0, 0.0));
        let v = eq_quotient(&a, &two_n).unwrap();
        assert!(v.fails());
        assert!(eq_quotient(&a, &a).unwrap().holds());
        let c = GenNumber::constant(Complex64::new(3.0, 0.0), log());
        assert!(eq_quotient(&c, &GenNumber::zero(log())).unwrap().fails());
    }

    #[test]
    fn black_box_never_holds() {
        let f = GenNumber::callable(|n| Complex64::new(n as f64, 0.0), log()).unwrap();
        let g = GenNumber::callable(|n| Complex64::new(n as f64, 0.0), log()).unwrap();
        assert!(eq_quotient(&f, &g).unwrap().is_inconclusive());
        let h = GenNumber::callable(|n| Complex64::new(2.0 * n as f64, 0.0), log()).unwrap();
        assert!(eq_quotient(&f, &h).unwrap().fails());
    }

    #[test]
    fn mismatched_scales() {
        let a = pow(1.0);
        let b = GenNumber::from_class(GrowthClass::power(1.0), Scale::power(1.0).unwrap()).unwrap();
        assert_eq!(gn_add(&a, &b).unwrap_err(), Error::ScaleMismatch);
    }

    #[test]
    fn maddox_examples() {
        // need k ≥ e³: the smallest integer is 21
        let out = maddox_linf_test(&pow(3.0));
        assert!(out.verdict.holds());
        assert_eq!(out.k, Some(21));
        assert!(libm::log(20.0) < 3.0 && libm::log(21.0) > 3.0);

        let en = GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(0.5), 1.0));
        let col_row = log();
        // e^√n is unbounded on the log scale, so it is rejected before the scan
        assert!(GenNumber::from_class(en, col_row).is_err());

        let zero = GenNumber::zero(log());
        assert_eq!(maddox_linf_test(&zero), MaddoxOutcome { verdict: Verdict::Holds, k: Some(1) });
        assert!(maddox_c0_test(&zero).verdict.holds());

        let neg = GenNumber::from_class(neg_log_n(), log()).unwrap();
        assert!(maddox_c0_test(&neg).verdict.holds());

        // n^{log k - 5} stops tending to zero once log k ≥ 5: first at k = 149
        let out = maddox_c0_test(&pow(-5.0));
        assert!(out.verdict.fails());
        assert_eq!(out.k, Some(149));
        let x = GrowthClass::power(-5.0).mul(&GrowthClass::e_r(&log(), libm::log(404.0)).unwrap());
        assert!(x.exps().sign_at_infinity() == Ordering::Greater);
    }

    #[test]
    fn maddox_linf_fails_for_unbounded_on_small_k_range() {
        // a class whose norm is finite but beyond any k ≤ k_max is flagged, not misreported
        let huge = GenNumber::from_class(GrowthClass::power(20.0), log()).unwrap();
        let out = maddox_linf_test(&huge);
        assert!(out.verdict.is_inconclusive());
    }
}
