//! Algebras defined by scale families and by asymptotic scales.
//!
//! For a family of scales `(r^m)` the moderate class is an intersection of
//! row classes in case I and a union in case II, and the other way round for
//! the negligible class. An asymptotic scale `(a_m)` defines the algebra of
//! sequences that are `O(a_m)` for some `m` with ideal `o(a_m)` for all `m`;
//! the two constructions agree when `r^m = 1/|log a_m|`.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::basis::{Basis, ExpVec};
use crate::growth::{Precision, SymbolicSeq};
use crate::ladder::IndexLadder;
use crate::scales::{AsymptoticScale, Direction, Scale, ScaleFamily};
use crate::ultranorm::{self, Classification, UltraNormValue};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// Rows evaluated one by one.
pub const M_MAX: u32 = 8;

/// Further rows consulted to summarize the tail of a monotone family.
const TAIL_ROWS: [u32; 3] = [16, 32, 64];

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyClassification {
    pub moderate: Verdict,
    /// A row witnessing moderation (case II), or the first row refuting it
    /// (case I).
    pub moderate_row: Option<u32>,
    pub negligible: Verdict,
    pub rows: Vec<(u32, Classification)>,
}

impl FamilyClassification {
    pub fn label(&self) -> &'static str {
        match (self.moderate.holds(), self.negligible.holds()) {
            (_, true) => "negligible",
            (true, false) if self.negligible.fails() => "moderate",
            (false, _) if self.moderate.fails() => "not-moderate",
            _ => "inconclusive",
        }
    }
}

/// Row-wise classification combined by the family direction.
///
/// Row classes are monotone in `m` and both the moderate and the negligible
/// class of the family are decided by the far rows. Rows past `M_MAX` are
/// summarized by rows 16, 32 and 64.
pub fn family_classify(f: &SymbolicSeq, fam: &ScaleFamily) -> FamilyClassification {
    let f = f.collect_like_terms();
    let idx: Vec<u32> = (1..=M_MAX).chain(TAIL_ROWS).collect();
    let rows: Vec<(u32, Classification)> = idx.iter().map(|&m| (m, ultranorm::classify(&f, &fam.row(m)))).collect();
    let last = rows[rows.len() - 1].0;
    let (moderate, moderate_row) = match fam.direction() {
        Direction::CaseII => union(&rows, Classification::is_moderate, "moderate"),
        Direction::CaseI => intersection(&rows, Classification::is_moderate, "moderate", last),
    };
    let negligible = match fam.direction() {
        Direction::CaseII => intersection(&rows, Classification::is_negligible, "negligible", last).0,
        Direction::CaseI => union(&rows, Classification::is_negligible, "negligible").0,
    };
    FamilyClassification { moderate, moderate_row, negligible, rows }
}

type Member = fn(&Classification) -> Option<bool>;

/// Member of some row; the first such row is the witness.
fn union(rows: &[(u32, Classification)], member: Member, what: &str) -> (Verdict, Option<u32>) {
    match rows.iter().find(|r| member(&r.1) == Some(true)) {
        Some(r) => (Verdict::Holds, Some(r.0)),
        None if rows.iter().all(|r| member(&r.1) == Some(false)) => {
            (Verdict::Fails(Witness::new(format!("not {what} at any row up to {}", rows[rows.len() - 1].0))), None)
        }
        None => (Verdict::inconclusive(format!("{what} undecided on some row")), None),
    }
}

/// Member of every row; the first row that is not is the witness.
fn intersection(rows: &[(u32, Classification)], member: Member, what: &str, last: u32) -> (Verdict, Option<u32>) {
    match rows.iter().find(|r| member(&r.1) != Some(true)) {
        None => (Verdict::Holds, Some(last)),
        Some(r) if member(&r.1) == Some(false) => (Verdict::Fails(Witness::new(format!("not {what} at row {}", r.0))), Some(r.0)),
        Some(_) => (Verdict::inconclusive(format!("{what} undecided on some row")), None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AClass {
    /// `O(a_m)` with the largest such `m`.
    InAlgebra(i64),
    InIdeal,
    Neither,
}

impl AClass {
    pub fn label(&self) -> &'static str {
        match self {
            AClass::InAlgebra(_) => "in-algebra",
            AClass::InIdeal => "in-ideal",
            AClass::Neither => "neither",
        }
    }
}

/// `Less` for `o(a)`, `Equal` for `O(a)` but not `o(a)`, `Greater` otherwise.
fn compare(f: &SymbolicSeq, ln_a: &ExpVec) -> Option<Ordering> {
    let mut worst = Ordering::Less;
    for t in f.terms() {
        let d = t.exps().sub(ln_a);
        let ord = match t.precision() {
            Precision::Exact | Precision::BoundedRatio => d.sign_at_infinity(),
            Precision::LogAsymptotic => {
                // only the top entry of log |t| is known
                let known = match (d.top(), t.exps().top()) {
                    (Some((b, _)), Some((tb, _))) => b >= tb,
                    (Some(_), None) => true,
                    _ => false,
                };
                if !known {
                    return None;
                }
                d.sign_at_infinity()
            }
            Precision::Unknown => return None,
        };
        worst = worst.max(ord);
    }
    Some(worst)
}

/// Scan radius large enough that rows outside it behave like its ends.
fn scan_radius(f: &SymbolicSeq) -> i64 {
    let mut w = 0.0_f64;
    let mut depth = 0;
    for t in f.terms() {
        for &(b, c) in t.exps().terms() {
            w = w.max(libm::fabs(c));
            if let Basis::ExpIter(k) = b {
                depth = depth.max(k as i64);
            }
        }
    }
    libm::ceil(w) as i64 + depth + 3
}

/// `∃m: f = O(a_m)` against `∀m: f = o(a_m)`, decided by exact exponent
/// comparison.
pub fn classify_a(f: &SymbolicSeq, a: &AsymptoticScale) -> Result<AClass> {
    if !a.is_symbolic() {
        return Err(Error::Unsupported("classification needs a closed-form asymptotic scale".into()));
    }
    if let Verdict::Fails(w) = a.check_axioms(3, &IndexLadder::default()) {
        return Err(Error::PreconditionFailed(format!("not an asymptotic scale: {}", w.detail)));
    }
    let f = f.collect_like_terms();
    if f.is_zero() {
        return Ok(AClass::InIdeal);
    }
    if f.possible_cancellation() {
        return Err(Error::AmbiguousDominance);
    }
    let w = scan_radius(&f);
    let cmp = |m: i64| compare(&f, &a.ln_a(m).expect("symbolic"));
    let undecided = || Error::PreconditionFailed("growth of the sequence is not known precisely enough".into());
    if cmp(w).ok_or_else(undecided)? == Ordering::Less && cmp(2 * w).ok_or_else(undecided)? == Ordering::Less {
        return Ok(AClass::InIdeal);
    }
    for m in (-w..=w).rev() {
        match cmp(m).ok_or_else(undecided)? {
            Ordering::Greater => {}
            _ => return Ok(AClass::InAlgebra(m)),
        }
    }
    Ok(AClass::Neither)
}

/// The family built from `a` row-wise classifies `f` the same way as `a` does.
pub fn thm45_equivalence(f: &SymbolicSeq, a: &AsymptoticScale) -> Result<Verdict> {
    let fam = ScaleFamily::from_asymptotic(a)?;
    let fc = family_classify(f, &fam);
    let ac = classify_a(f, a)?;
    if fc.moderate.is_inconclusive() || fc.negligible.is_inconclusive() {
        return Ok(Verdict::inconclusive("family classification undecided"));
    }
    let in_algebra = !matches!(ac, AClass::Neither);
    let in_ideal = ac == AClass::InIdeal;
    Ok(Verdict::from_bool(
        fc.moderate.holds() == in_algebra && fc.negligible.holds() == in_ideal,
        format!("family says {}, asymptotic scale says {}", fc.label(), ac.label()),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondKind {
    /// Also in the subalgebra.
    InIdeal,
    InSubalgebra,
    Neither,
}

/// Second-kind algebra of a real-indexed scale, sampled at `σ = 1/m`:
/// subalgebra iff every row norm is at most 1, ideal iff some row norm is
/// below 1.
pub fn classify_a_secondkind(f: &SymbolicSeq, a: &AsymptoticScale) -> Result<(SecondKind, Vec<(u32, UltraNormValue)>)> {
    let fam = ScaleFamily::from_asymptotic(a)?;
    if !a.is_real_indexed() {
        return Err(Error::Unsupported("second-kind algebras need a real-indexed scale".into()));
    }
    let mut rows = Vec::new();
    for m in 1..=M_MAX {
        let v = ultranorm::norm_collected(f, &fam.row(m))?;
        if !v.is_exact() {
            return Err(Error::PreconditionFailed(format!("row {m} norm not exact")));
        }
        rows.push((m, v));
    }
    let class = if rows.iter().any(|r| r.1.value < 1.0) {
        SecondKind::InIdeal
    } else if rows.iter().all(|r| r.1.value <= 1.0) {
        SecondKind::InSubalgebra
    } else {
        SecondKind::Neither
    };
    Ok((class, rows))
}

/// Scale of row `m` of the family built from `a`.
pub fn row_scale(a: &AsymptoticScale, m: u32) -> Result<Scale> {
    Ok(ScaleFamily::from_asymptotic(a)?.row(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::GrowthClass;

    fn seq(exps: ExpVec) -> SymbolicSeq {
        GrowthClass::one().with_exps(exps).into()
    }

    fn n_pow(g: f64) -> SymbolicSeq {
        seq(ExpVec::single(Basis::LOG, g))
    }

    fn n_to_minus_log_n() -> SymbolicSeq {
        seq(ExpVec::single(Basis::LogPow(2.0), -1.0))
    }

    fn exp_sqrt_n() -> SymbolicSeq {
        seq(ExpVec::single(Basis::Pow(0.5), 1.0))
    }

    #[test]
    fn family_examples() {
        let col = ScaleFamily::colombeau();
        let c = family_classify(&n_pow(3.0), &col);
        assert!(c.moderate.holds());
        assert_eq!(c.moderate_row, Some(1));
        assert!(c.negligible.fails());
        let c = family_classify(&exp_sqrt_n(), &col);
        assert!(c.moderate.fails());
        assert!(family_classify(&n_to_minus_log_n(), &col).negligible.holds());

        let eg = ScaleFamily::egorov();
        let c = family_classify(&exp_sqrt_n(), &eg);
        assert!(c.moderate.holds());
        assert!(c.negligible.fails());
        assert!(family_classify(&SymbolicSeq::zero(), &eg).negligible.holds());
    }

    #[test]
    fn power_rows_intersect() {
        let fam = ScaleFamily::power_rows();
        assert!(family_classify(&n_pow(5.0), &fam).moderate.holds());
        // exp(n^(1/4)) is moderate at rows m ≤ 4 only
        let f = seq(ExpVec::single(Basis::Pow(0.25), 1.0));
        let c = family_classify(&f, &fam);
        assert!(c.moderate.fails());
        assert_eq!(c.moderate_row, Some(5));
    }

    #[test]
    fn classify_a_examples() {
        let poly = AsymptoticScale::polynomial();
        assert_eq!(classify_a(&n_pow(3.0), &poly).unwrap(), AClass::InAlgebra(-3));
        assert_eq!(classify_a(&n_pow(-2.5), &poly).unwrap(), AClass::InAlgebra(2));
        assert_eq!(classify_a(&n_to_minus_log_n(), &poly).unwrap(), AClass::InIdeal);
        assert_eq!(classify_a(&exp_sqrt_n(), &poly).unwrap(), AClass::Neither);

        let ei = AsymptoticScale::exp_iter();
        assert_eq!(classify_a(&n_pow(3.0), &ei).unwrap(), AClass::InAlgebra(-1));
        assert_eq!(classify_a(&seq(ExpVec::single(Basis::Pow(1.0), -1.0)), &ei).unwrap(), AClass::InAlgebra(1));
        assert_eq!(classify_a(&seq(ExpVec::single(Basis::ExpIter(1), 1.0)), &ei).unwrap(), AClass::InAlgebra(-2));
    }

    #[test]
    fn thm45_examples() {
        for a in [AsymptoticScale::polynomial(), AsymptoticScale::exp_iter()] {
            for f in [n_pow(3.0), n_to_minus_log_n(), exp_sqrt_n(), n_pow(-1.0)] {
                let v = thm45_equivalence(&f, &a).unwrap();
                assert!(v.holds(), "{a:?} {f:?}: {v:?}");
            }
        }
    }

    #[test]
    fn second_kind_examples() {
        let a = AsymptoticScale::infra_exp();
        let (k, rows) = classify_a_secondkind(&exp_sqrt_n(), &a).unwrap();
        assert_eq!(k, SecondKind::InSubalgebra);
        assert!(rows.iter().all(|r| r.1.value == 1.0));
        let third = seq(ExpVec::single(Basis::Pow(1.0), -1.0 / 3.0));
        let (k, rows) = classify_a_secondkind(&third, &a).unwrap();
        assert_eq!(k, SecondKind::InIdeal);
        approx::assert_relative_eq!(rows[0].1.value, libm::exp(-1.0 / 3.0), max_relative = 1e-12);
        let (k, _) = classify_a_secondkind(&seq(ExpVec::single(Basis::Pow(1.0), 2.0)), &a).unwrap();
        assert_eq!(k, SecondKind::Neither);
    }
}
