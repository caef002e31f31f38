//! Symbolic sequences with `log |f_n| = c0 + s/r_n + γ log n + δ log log n`.
//!
//! A [`GrowthClass`] stores its logarithm as a leading constant times an
//! [`ExpVec`] over the asymptotic basis, so products of classes are exact and
//! classes built on different scales can be combined. A [`SymbolicSeq`] is a
//! finite sum of classes.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::basis::{Basis, ExpVec};
use crate::scales::Scale;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Positive,
    /// Multiplies the value by `(-1)^n`.
    Alternating,
}

impl Phase {
    fn compose(self, other: Phase) -> Phase {
        if self == other {
            Phase::Positive
        } else {
            Phase::Alternating
        }
    }

    fn sign(self, n: u64) -> f64 {
        match self {
            Phase::Alternating if n % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }
}

/// How faithfully the symbolic form describes the actual sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Precision {
    /// The formula is the sequence.
    Exact,
    /// `|f_n| / |formula_n|` stays between two positive constants.
    BoundedRatio,
    /// `log |f_n| ~ leading term of the formula`; only the top entry is kept.
    LogAsymptotic,
    /// The leading behaviour cancelled; nothing is known.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClass {
    coef: Complex64,
    phase: Phase,
    exps: ExpVec,
    precision: Precision,
}

impl GrowthClass {
    pub fn new(coef: Complex64, phase: Phase, exps: ExpVec) -> Result<Self> {
        if coef.norm() == 0.0 || !coef.is_finite() {
            return Err(Error::InvalidParameter("growth class needs a finite nonzero coefficient".into()));
        }
        Ok(GrowthClass { coef, phase, exps, precision: Precision::Exact })
    }

    /// `exp(c0 + s/r_n + γ log n + δ log log n)`, times `(-1)^n` if alternating.
    pub fn from_fields(c0: f64, s: f64, gamma: f64, delta: f64, phase: Phase, scale: &Scale) -> Result<Self> {
        let mut exps = ExpVec::from_terms([(Basis::LOG, gamma), (Basis::LogLog, delta)]);
        if s != 0.0 {
            let recip = scale
                .reciprocal()
                .ok_or_else(|| Error::Unsupported("s/r_n needs a closed-form scale".into()))?;
            exps = exps.add(&recip.scale(s));
        }
        Self::new(Complex64::new(libm::exp(c0), 0.0), phase, exps)
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        Self::new(c, Phase::Positive, ExpVec::zero())
    }

    pub fn real(c: f64) -> Result<Self> {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// `n^γ`.
    pub fn power(gamma: f64) -> Self {
        GrowthClass::one().with_exps(ExpVec::single(Basis::LOG, gamma))
    }

    /// `e_r = (e^(1/r_n))_n`, raised to `s`.
    pub fn e_r(scale: &Scale, s: f64) -> Result<Self> {
        let recip = scale
            .reciprocal()
            .ok_or_else(|| Error::Unsupported("e_r needs a closed-form scale".into()))?;
        Ok(GrowthClass::one().with_exps(recip.scale(s)))
    }

    pub fn one() -> Self {
        GrowthClass { coef: Complex64::new(1.0, 0.0), phase: Phase::Positive, exps: ExpVec::zero(), precision: Precision::Exact }
    }

    pub fn with_exps(mut self, exps: ExpVec) -> Self {
        self.exps = exps;
        if self.precision == Precision::LogAsymptotic {
            self.exps = self.exps.truncate_to_top();
        }
        self
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_coef(mut self, coef: Complex64) -> Self {
        self.coef = coef;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        if precision == Precision::LogAsymptotic {
            self.exps = self.exps.truncate_to_top();
        }
        self
    }

    pub fn coef(&self) -> Complex64 {
        self.coef
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn exps(&self) -> &ExpVec {
        &self.exps
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// `log |leading constant|`.
    pub fn c0(&self) -> f64 {
        libm::log(self.coef.norm())
    }

    /// `(c0, s, γ, δ)` relative to `scale`, if the class has no other entries.
    /// On the log scale the `log n` coefficient is reported as `γ`.
    pub fn fields_in(&self, scale: &Scale) -> Option<(f64, f64, f64, f64)> {
        let br = scale.basis();
        let mut s = 0.0;
        let mut gamma = 0.0;
        let mut delta = 0.0;
        for &(b, c) in self.exps.terms() {
            if b == Basis::LOG {
                gamma = c;
            } else if b == Basis::LogLog {
                delta = c;
            } else if Some(b) == br {
                s = c * scale.factor();
            } else {
                return None;
            }
        }
        Some((self.c0(), s, gamma, delta))
    }

    pub fn domain_start(&self) -> u64 {
        self.exps.domain_start()
    }

    /// `log |f_n|`.
    pub fn ln_abs(&self, n: u64) -> f64 {
        self.c0() + self.exps.value(n as f64)
    }

    /// `f_n` (overflows to infinity for fast-growing classes).
    pub fn eval(&self, n: u64) -> Complex64 {
        self.coef * (self.phase.sign(n) * libm::exp(self.exps.value(n as f64)))
    }

    /// Angle of `f_n` in the complex plane.
    fn arg_at(&self, n: u64) -> f64 {
        let a = self.coef.arg();
        if self.phase.sign(n) < 0.0 {
            a + core::f64::consts::PI
        } else {
            a
        }
    }

    /// Product of two classes: leading constants multiply, exponents add.
    pub fn mul(&self, other: &GrowthClass) -> GrowthClass {
        let sum = self.exps.add(&other.exps);
        let precision = self.precision.max(other.precision);
        let mut exps = sum;
        let mut precision = precision;
        if precision >= Precision::LogAsymptotic {
            // the error terms of an asymptotic operand are o(its top entry)
            let floor = [self, other]
                .iter()
                .filter(|g| g.precision >= Precision::LogAsymptotic)
                .filter_map(|g| g.exps.top().map(|(b, _)| b))
                .max();
            exps = exps.truncate_to_top();
            let survived = match (exps.top(), floor) {
                (Some((b, _)), Some(f)) => b >= f,
                _ => false,
            };
            if !survived {
                precision = Precision::Unknown;
            }
        }
        GrowthClass { coef: self.coef * other.coef, phase: self.phase.compose(other.phase), exps, precision }
    }

    pub fn neg(&self) -> GrowthClass {
        let mut g = self.clone();
        g.coef = -g.coef;
        g
    }

    pub fn scale_by(&self, c: Complex64) -> Option<GrowthClass> {
        if c.norm() == 0.0 {
            return None;
        }
        let mut g = self.clone();
        g.coef *= c;
        Some(g)
    }

    /// `|f|`.
    pub fn abs(&self) -> GrowthClass {
        GrowthClass { coef: Complex64::new(self.coef.norm(), 0.0), phase: Phase::Positive, ..self.clone() }
    }

    /// `|f|^k`.
    pub fn abs_pow(&self, k: f64) -> GrowthClass {
        GrowthClass {
            coef: Complex64::new(libm::pow(self.coef.norm(), k), 0.0),
            phase: Phase::Positive,
            exps: self.exps.scale(k),
            precision: self.precision,
        }
    }

    /// `1/f`.
    pub fn inverse(&self) -> GrowthClass {
        GrowthClass { coef: self.coef.inv(), phase: self.phase, exps: self.exps.neg(), precision: self.precision }
    }

    /// Same exponents (up to rounding) and phase, so the two can be collected
    /// into one term.
    pub fn is_like(&self, other: &GrowthClass) -> bool {
        self.phase == other.phase && self.exps.sub(&other.exps).is_zero()
    }

    /// Asymptotic comparison of `|self|` against `|other|`, ties broken by the
    /// leading constant.
    pub fn cmp_dominance(&self, other: &GrowthClass) -> Ordering {
        self.exps
            .cmp_growth(&other.exps)
            .then_with(|| self.coef.norm().total_cmp(&other.coef.norm()))
    }
}

/// Product of two classes (spec name).
pub fn gc_mul(a: &GrowthClass, b: &GrowthClass) -> GrowthClass {
    a.mul(b)
}

/// A finite sum of growth classes; the empty sum is the zero sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolicSeq {
    terms: Vec<GrowthClass>,
}

impl From<GrowthClass> for SymbolicSeq {
    fn from(g: GrowthClass) -> Self {
        SymbolicSeq { terms: alloc::vec![g] }
    }
}

impl SymbolicSeq {
    pub fn zero() -> Self {
        SymbolicSeq { terms: Vec::new() }
    }

    pub fn from_terms(terms: Vec<GrowthClass>) -> Self {
        SymbolicSeq { terms }
    }

    pub fn terms(&self) -> &[GrowthClass] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.terms.iter().map(|t| t.precision).max().unwrap_or(Precision::Exact)
    }

    pub fn domain_start(&self) -> u64 {
        self.terms.iter().map(|t| t.domain_start()).max().unwrap_or(1)
    }

    /// Representative-level sum. Terms are concatenated, never simplified.
    pub fn add(&self, other: &SymbolicSeq) -> SymbolicSeq {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SymbolicSeq { terms }
    }

    pub fn neg(&self) -> SymbolicSeq {
        SymbolicSeq { terms: self.terms.iter().map(GrowthClass::neg).collect() }
    }

    pub fn sub(&self, other: &SymbolicSeq) -> SymbolicSeq {
        self.add(&other.neg())
    }

    pub fn scale_by(&self, c: Complex64) -> SymbolicSeq {
        SymbolicSeq { terms: self.terms.iter().filter_map(|t| t.scale_by(c)).collect() }
    }

    /// Distributive product.
    pub fn mul(&self, other: &SymbolicSeq) -> SymbolicSeq {
        let terms = self
            .terms
            .iter()
            .flat_map(|a| other.terms.iter().map(move |b| a.mul(b)))
            .collect();
        SymbolicSeq { terms }
    }

    pub fn mul_class(&self, g: &GrowthClass) -> SymbolicSeq {
        SymbolicSeq { terms: self.terms.iter().map(|a| a.mul(g)).collect() }
    }

    /// Two terms with identical exponents and phase could cancel exactly.
    pub fn possible_cancellation(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .any(|(i, a)| self.terms[i + 1..].iter().any(|b| a.is_like(b)))
    }

    /// Merges exact like terms by adding their leading constants, dropping
    /// those that cancel. Terms known only up to a factor are left alone.
    pub fn collect_like_terms(&self) -> SymbolicSeq {
        let mut out: Vec<GrowthClass> = Vec::new();
        for t in &self.terms {
            if t.precision == Precision::Exact {
                if let Some(o) = out.iter_mut().find(|o| o.precision == Precision::Exact && o.is_like(t)) {
                    let scale = o.coef.norm().max(t.coef.norm());
                    o.coef += t.coef;
                    if o.coef.norm() <= 1e-12 * scale {
                        o.coef = Complex64::new(0.0, 0.0);
                    }
                    continue;
                }
            }
            out.push(t.clone());
        }
        out.retain(|t| t.coef.norm() != 0.0);
        SymbolicSeq { terms: out }
    }

    /// The term of fastest growth.
    pub fn dominant_term(&self) -> Result<&GrowthClass> {
        if self.possible_cancellation() {
            return Err(Error::AmbiguousDominance);
        }
        self.terms
            .iter()
            .max_by(|a, b| a.cmp_dominance(b))
            .ok_or_else(|| Error::InvalidParameter("zero sequence has no dominant term".into()))
    }

    /// `log |f_n|`, computed without overflowing the individual terms.
    pub fn ln_abs(&self, n: u64) -> f64 {
        match self.terms.as_slice() {
            [] => f64::NEG_INFINITY,
            [t] => t.ln_abs(n),
            terms => {
                let mags: Vec<f64> = terms.iter().map(|t| t.ln_abs(n)).collect();
                let top = mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !top.is_finite() {
                    return top;
                }
                let sum: Complex64 = terms
                    .iter()
                    .zip(&mags)
                    .map(|(t, &m)| Complex64::from_polar(libm::exp(m - top), t.arg_at(n)))
                    .sum();
                top + libm::log(sum.norm())
            }
        }
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(n)).sum()
    }
}

/// Representative-level sum (spec name).
pub fn seq_add(a: &SymbolicSeq, b: &SymbolicSeq) -> SymbolicSeq {
    a.add(b)
}

pub fn dominant_term(x: &SymbolicSeq) -> Result<&GrowthClass> {
    x.dominant_term()
}
