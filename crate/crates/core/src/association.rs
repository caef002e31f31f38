//! Association: weaker forms of equality in the quotient.
//!
//! Two generalized numbers are associated when their difference tends to
//! zero, `s`-associated when it is `o(e^{-s/r_n})`, and strongly associated
//! when it lies in an ultrametric ball. Generalized functions are weakly
//! associated when all pairings with a test set are.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::gnum::{GenNumber, Rep};
use crate::growth::{GrowthClass, Precision, SymbolicSeq};
use crate::ladder::IndexLadder;
use crate::scales::Scale;
use crate::torus::{self, CoeffFamily, TorusGF, TorusSeminorm};
use crate::ultranorm::{NormMode, UltraNormValue};
use crate::verdict::{Evidence, Verdict, Witness};
use crate::Result;

/// Tail threshold for deciding numeric null sequences.
const TAIL_SMALL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum AssocFlavor {
    Plain,
    S(f64),
    Strong,
    StrongS(f64),
    Weak(f64, Vec<CoeffFamily>),
    StrongWeak(f64, Vec<CoeffFamily>),
}

/// Geometric test functions `ρ^|k|` for `ρ ∈ {0.3, 0.5, 0.8}` and the
/// monomials `z^k`, `|k| ≤ 8`.
pub fn default_testset() -> Vec<CoeffFamily> {
    let mut d: Vec<CoeffFamily> = [0.3, 0.5, 0.8].iter().map(|&r| CoeffFamily::Geometric(r)).collect();
    d.extend((-8..=8).map(CoeffFamily::monomial));
    d
}

fn last_index(r: &Scale) -> u64 {
    IndexLadder::default().clamp_start(r.domain_start().max(3)).last().unwrap_or(3)
}

/// Is the symbolic sequence a null sequence?
fn null_seq(x: &SymbolicSeq, r: &Scale) -> Verdict {
    let x = x.collect_like_terms();
    if x.is_zero() {
        return Verdict::Holds;
    }
    if x.possible_cancellation() {
        return Verdict::inconclusive("terms may cancel");
    }
    let mut verdict = Verdict::Holds;
    for t in x.terms() {
        let v = match (t.precision(), t.exps().sign_at_infinity()) {
            (Precision::Unknown, _) => Verdict::inconclusive("leading behaviour cancelled"),
            (Precision::LogAsymptotic, Ordering::Equal) => Verdict::inconclusive("only log-asymptotics known"),
            (_, Ordering::Less) => Verdict::Holds,
            _ => {
                let n = last_index(r);
                Verdict::Fails(Witness::at(n, alloc::vec![libm::exp(x.ln_abs(n))], "term does not tend to 0"))
            }
        };
        verdict = verdict.and(v);
    }
    verdict
}

/// Numeric null test on `log |x_n|` sampled along the ladder.
fn null_tail(ln_x: &dyn Fn(u64) -> f64, r: &Scale) -> Verdict {
    let ladder = IndexLadder::default().clamp_start(r.domain_start().max(3));
    let trace: Vec<(u64, f64)> = ladder.iter().map(|n| (n, libm::exp(ln_x(n)))).collect();
    let tail = &trace[trace.len().saturating_sub(6)..];
    if tail.iter().any(|t| t.1.is_nan()) {
        return Verdict::Inconclusive(Evidence::with_trace(trace, "evaluation failed"));
    }
    let decreasing = tail.windows(2).all(|w| w[1].1 <= w[0].1);
    let last = tail.last().map_or(f64::NAN, |t| t.1);
    if decreasing && last < TAIL_SMALL {
        return Verdict::Holds;
    }
    if tail.iter().all(|t| t.1 >= TAIL_SMALL) && !decreasing {
        let (n, v) = *tail.last().expect("nonempty");
        return Verdict::Fails(Witness::at(n, alloc::vec![v], "tail values stay away from 0"));
    }
    Verdict::Inconclusive(Evidence::with_trace(trace, "tail neither vanishing nor bounded away"))
}

/// `x_n → 0`.
pub fn null_test(x: &GenNumber) -> Verdict {
    match x.rep() {
        Rep::Symbolic(s) => null_seq(s, x.scale()),
        Rep::Callable(_) => null_tail(&|n| libm::log(x.eval(n).norm()), x.scale()),
    }
}

/// `x_n - y_n = o(e^{-s/r_n})`.
pub fn s_assoc(x: &GenNumber, y: &GenNumber, s: f64) -> Result<Verdict> {
    let d = x.sub(y)?;
    Ok(s_null(&d, s))
}

/// `x_n e^{s/r_n} → 0`.
pub fn s_null(x: &GenNumber, s: f64) -> Verdict {
    let r = x.scale();
    if s == 0.0 {
        return null_test(x);
    }
    match (x.rep(), GrowthClass::e_r(r, s)) {
        (Rep::Symbolic(seq), Ok(e)) => null_seq(&seq.collect_like_terms().mul_class(&e), r),
        _ => {
            let r2 = r.clone();
            null_tail(&|n| libm::log(x.eval(n).norm()) + s / r2.eval(n), r)
        }
    }
}

/// Compare a norm against `e^{-s}` strictly.
fn below(v: &UltraNormValue, bound: f64) -> Verdict {
    match v.mode {
        NormMode::Exact if v.value < bound => Verdict::Holds,
        NormMode::Exact => Verdict::Fails(Witness { index: None, values: alloc::vec![v.value, bound], detail: format!("norm {} is not below {bound}", v.value) }),
        NormMode::Estimated { ci_high, .. } if ci_high < bound => Verdict::Holds,
        NormMode::Estimated { ci_low, .. } if ci_low >= bound => {
            Verdict::Fails(Witness { index: None, values: alloc::vec![v.value, bound], detail: "estimated norm above bound".into() })
        }
        _ => Verdict::inconclusive("norm not separated from the bound"),
    }
}

/// `‖x - y‖ < e^{-s}`.
pub fn strong_assoc(x: &GenNumber, y: &GenNumber, s: f64) -> Result<Verdict> {
    Ok(below(&x.sub(y)?.norm(), libm::exp(-s)))
}

/// `d_{p,r}(F, G) < e^{-s}` for every listed seminorm.
pub fn strong_assoc_gf(f: &TorusGF, g: &TorusGF, seminorms: &[TorusSeminorm], s: f64) -> Result<Verdict> {
    let d = f.sub(g)?;
    let ladder = IndexLadder::default();
    Ok(seminorms.iter().map(|p| below(&torus::gf_norm(&d, p, &ladder), libm::exp(-s))).collect())
}

/// `⟨F - G, ψ⟩ ≈ˢ 0` for every test function.
pub fn weak_assoc(f: &TorusGF, g: &TorusGF, s: f64, testset: &[CoeffFamily]) -> Result<Verdict> {
    let d = f.sub(g)?;
    let mut v = Verdict::Holds;
    for psi in testset {
        v = v.and(s_null(&torus::pair(&d, psi)?, s));
    }
    Ok(v)
}

/// `‖⟨F - G, ψ⟩‖ < e^{-s}` for every test function.
pub fn strong_weak_assoc(f: &TorusGF, g: &TorusGF, s: f64, testset: &[CoeffFamily]) -> Result<Verdict> {
    let d = f.sub(g)?;
    let mut v = Verdict::Holds;
    for psi in testset {
        v = v.and(below(&torus::pair(&d, psi)?.norm(), libm::exp(-s)));
    }
    Ok(v)
}

/// The verdicts along `StrongWeak(s) ⇒ Weak(s) ⇒ StrongWeak(s')`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub strong_weak_s: Verdict,
    pub weak_s: Verdict,
    pub strong_weak_s_prime: Verdict,
    pub violations: Vec<alloc::string::String>,
}

impl ChainReport {
    fn from_verdicts(sw: Verdict, w: Verdict, swp: Verdict) -> Self {
        let mut violations = Vec::new();
        if sw.holds() && w.fails() {
            violations.push("StrongWeak(s) holds but Weak(s) fails".into());
        }
        if w.holds() && swp.fails() {
            violations.push("Weak(s) holds but StrongWeak(s') fails".into());
        }
        ChainReport { strong_weak_s: sw, weak_s: w, strong_weak_s_prime: swp, violations }
    }

    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The chain on a single pairing representative.
pub fn implication_chain_rep(x: &GenNumber, s: f64, s_prime: f64) -> ChainReport {
    let norm = x.norm();
    ChainReport::from_verdicts(below(&norm, libm::exp(-s)), s_null(x, s), below(&norm, libm::exp(-s_prime)))
}

pub fn implication_chain(f: &TorusGF, g: &TorusGF, s: f64, s_prime: f64, testset: &[CoeffFamily]) -> Result<ChainReport> {
    if !(s_prime < s) {
        return Err(crate::Error::PreconditionFailed(format!("need s' < s, got s' = {s_prime}, s = {s}")));
    }
    Ok(ChainReport::from_verdicts(
        strong_weak_assoc(f, g, s, testset)?,
        weak_assoc(f, g, s, testset)?,
        strong_weak_assoc(f, g, s_prime, testset)?,
    ))
}

/// A set `M` of generalized numbers defining `J_M = {f : ⟨f, ψ⟩ ∈ M ∀ψ}`.
pub trait Membership {
    fn contains(&self, x: &GenNumber) -> Verdict;
}

/// `N^{(s)}`: sequences that are `o(e^{-s/r_n})`.
#[derive(Debug, Clone, Copy)]
pub struct NullSeq(pub f64);

/// Open ball `{x : ‖x‖ < radius}`.
#[derive(Debug, Clone, Copy)]
pub struct Ball(pub f64);

#[derive(Debug, Clone, Copy)]
pub struct All;

impl Membership for NullSeq {
    fn contains(&self, x: &GenNumber) -> Verdict {
        s_null(x, self.0)
    }
}

impl Membership for Ball {
    fn contains(&self, x: &GenNumber) -> Verdict {
        below(&x.norm(), self.0)
    }
}

impl Membership for All {
    fn contains(&self, _x: &GenNumber) -> Verdict {
        Verdict::Holds
    }
}

/// `F - G ∈ J_M`.
pub fn j_assoc(f: &TorusGF, g: &TorusGF, m: &dyn Membership, testset: &[CoeffFamily]) -> Result<Verdict> {
    let d = f.sub(g)?;
    let mut v = Verdict::Holds;
    for psi in testset {
        let p = torus::pair(&d, psi)?;
        let inner = m.contains(&p);
        if matches!(p.rep(), Rep::Callable(_)) && inner.holds() {
            v = v.and(Verdict::inconclusive("black-box pairing"));
        } else {
            v = v.and(inner);
        }
    }
    Ok(v)
}

/// Additivity of `M` on sampled pairs: `x, y ∈ M ⇒ x + y ∈ M`.
pub fn check_additivity(m: &dyn Membership, samples: &[GenNumber]) -> Verdict {
    let mut v = Verdict::Holds;
    for (i, x) in samples.iter().enumerate() {
        for y in &samples[i..] {
            if m.contains(x).holds() && m.contains(y).holds() {
                match x.add(y) {
                    Ok(sum) => {
                        if m.contains(&sum).fails() {
                            v = v.and(Verdict::fail("sum of members left the set"));
                        }
                    }
                    Err(e) => v = v.and(Verdict::inconclusive(format!("{e}"))),
                }
            }
        }
    }
    v
}

/// Association of generalized numbers for the flavours that need no pairing.
pub fn assoc_numbers(x: &GenNumber, y: &GenNumber, flavor: &AssocFlavor) -> Result<Verdict> {
    match flavor {
        AssocFlavor::Plain => s_assoc(x, y, 0.0),
        AssocFlavor::S(s) => s_assoc(x, y, *s),
        AssocFlavor::Strong => strong_assoc(x, y, 0.0),
        AssocFlavor::StrongS(s) => strong_assoc(x, y, *s),
        AssocFlavor::Weak(..) | AssocFlavor::StrongWeak(..) => {
            Err(crate::Error::Unsupported("weak association is defined through pairings".into()))
        }
    }
}

/// Association of generalized functions.
pub fn assoc_gf(f: &TorusGF, g: &TorusGF, flavor: &AssocFlavor, seminorms: &[TorusSeminorm]) -> Result<Verdict> {
    match flavor {
        AssocFlavor::Weak(s, d) => weak_assoc(f, g, *s, d),
        AssocFlavor::StrongWeak(s, d) => strong_weak_assoc(f, g, *s, d),
        AssocFlavor::Strong => strong_assoc_gf(f, g, seminorms, 0.0),
        AssocFlavor::StrongS(s) => strong_assoc_gf(f, g, seminorms, *s),
        AssocFlavor::Plain => weak_assoc(f, g, 0.0, &default_testset()),
        AssocFlavor::S(s) => weak_assoc(f, g, *s, &default_testset()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Basis, ExpVec};
    use crate::torus::embed;
    use num_complex::Complex64;

    fn log() -> Scale {
        Scale::log()
    }

    fn num(exps: ExpVec) -> GenNumber {
        GenNumber::from_class(GrowthClass::one().with_exps(exps), log()).unwrap()
    }

    fn pow(g: f64) -> GenNumber {
        num(ExpVec::single(Basis::LOG, g))
    }

    #[test]
    fn null_test_examples() {
        assert!(null_test(&pow(-1.0)).holds());
        // log n as a growth class: (log n)^1
        let ln = num(ExpVec::single(Basis::LogLog, 1.0));
        assert!(null_test(&ln).fails());
        let two = GenNumber::constant(Complex64::new(2.0, 0.0), log());
        assert!(null_test(&two).fails());
    }

    #[test]
    fn s_assoc_examples() {
        let zero = GenNumber::zero(log());
        let d = pow(-2.0);
        assert!(s_assoc(&d, &zero, 1.0).unwrap().holds());
        assert!(s_assoc(&d, &zero, 3.0).unwrap().fails());
        assert_eq!(s_assoc(&d, &zero, 0.0).unwrap(), null_test(&d));
    }

    #[test]
    fn strong_assoc_examples() {
        let zero = GenNumber::zero(log());
        assert!(strong_assoc(&pow(-2.0), &zero, 0.0).unwrap().holds());
        let ln = num(ExpVec::single(Basis::LogLog, 1.0));
        assert!(strong_assoc(&ln, &zero, 0.0).unwrap().fails());
        for s in [0.0, 1.0, 10.0] {
            assert!(strong_assoc(&ln, &ln, s).unwrap().holds());
        }
    }

    #[test]
    fn weak_association_rate() {
        let d = embed(CoeffFamily::Constant, &log()).unwrap();
        let delta = TorusGF::distribution(CoeffFamily::Constant, &log()).unwrap();
        let psi = [CoeffFamily::Geometric(0.5)];
        assert!(weak_assoc(&d, &delta, 0.5, &psi).unwrap().holds());
        assert!(weak_assoc(&d, &delta, 0.8, &psi).unwrap().fails());
        let zero = TorusGF::zero(&log()).unwrap();
        assert!(weak_assoc(&d, &zero, 0.0, &psi).unwrap().fails());
        assert!(weak_assoc(&d, &d, 5.0, &default_testset()).unwrap().holds());
    }

    #[test]
    fn strong_weak_examples() {
        let x = pow(-1.0);
        assert!(implication_chain_rep(&x, 0.5, 0.25).strong_weak_s.holds());
        let s = 0.7;
        // (log n) · n^{-s}: norm exactly e^{-s}
        let boundary = num(ExpVec::from_terms([(Basis::LOG, -s), (Basis::LogLog, 1.0)]));
        let rep = implication_chain_rep(&boundary, s, 0.5);
        assert!(rep.strong_weak_s.fails());
        assert!(rep.weak_s.fails());
        assert!(rep.is_consistent());
        let d = embed(CoeffFamily::Constant, &log()).unwrap();
        assert!(strong_weak_assoc(&d, &d, 3.0, &default_testset()).unwrap().holds());
    }

    #[test]
    fn boundary_witness_separates_weak_from_strong_weak() {
        let s = 0.7;
        // r_n e^{-s/r_n} = n^{-s} / log n
        let w = num(ExpVec::from_terms([(Basis::LOG, -s), (Basis::LogLog, -1.0)]));
        let rep = implication_chain_rep(&w, s, 0.5);
        assert!(rep.weak_s.holds());
        assert!(rep.strong_weak_s.fails());
        assert!(rep.strong_weak_s_prime.holds());
        assert!(rep.is_consistent());
    }

    #[test]
    fn j_assoc_recovers_other_flavours() {
        let d = embed(CoeffFamily::Constant, &log()).unwrap();
        let delta = TorusGF::distribution(CoeffFamily::Constant, &log()).unwrap();
        let psi = [CoeffFamily::Geometric(0.5)];
        for s in [0.0, 0.5, 0.8] {
            assert_eq!(
                j_assoc(&d, &delta, &NullSeq(s), &psi).unwrap().holds(),
                weak_assoc(&d, &delta, s, &psi).unwrap().holds()
            );
            assert_eq!(
                j_assoc(&d, &delta, &Ball(libm::exp(-s)), &psi).unwrap().holds(),
                strong_weak_assoc(&d, &delta, s, &psi).unwrap().holds()
            );
        }
        let zero = TorusGF::zero(&log()).unwrap();
        assert!(j_assoc(&d, &zero, &All, &default_testset()).unwrap().holds());
    }

    #[test]
    fn sampled_additivity() {
        let samples = [pow(-1.0), pow(-2.0), pow(0.0), pow(1.0)];
        assert!(check_additivity(&NullSeq(0.0), &samples).holds());
        assert!(check_additivity(&Ball(1.0), &samples).holds());
    }
}
