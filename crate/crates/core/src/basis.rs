//! Asymptotic basis functions and the exponent vectors built from them.
//!
//! Every symbolic sequence in this crate has `log |f_n|` equal to a constant
//! plus a finite combination `Σ c_i B_i(n)` of basis functions `B_i` that all
//! tend to infinity and are totally ordered by growth:
//!
//! `log log n ≺ (log n)^b ≺ n^a ≺ exp(n) ≺ exp(exp(n)) ≺ …`
//!
//! Comparing two such combinations is a lexicographic comparison of their
//! coefficients from the fastest-growing basis downwards.

use alloc::vec::Vec;
use core::cmp::Ordering;

/// Coefficients closer to zero than this (relative to the operands) are
/// treated as an exact cancellation.
const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub enum Basis {
    /// `log log n`
    LogLog,
    /// `(log n)^b`, `b > 0`
    LogPow(f64),
    /// `n^a`, `a > 0`
    Pow(f64),
    /// `k`-fold iterated exponential of `n`, `k ≥ 1`
    ExpIter(u32),
}

impl Basis {
    pub const LOG: Basis = Basis::LogPow(1.0);

    fn tier(&self) -> u8 {
        match self {
            Basis::LogLog => 0,
            Basis::LogPow(_) => 1,
            Basis::Pow(_) => 2,
            Basis::ExpIter(_) => 3,
        }
    }

    fn param(&self) -> f64 {
        match *self {
            Basis::LogLog => 0.0,
            Basis::LogPow(b) => b,
            Basis::Pow(a) => a,
            Basis::ExpIter(k) => k as f64,
        }
    }

    pub fn eval(&self, n: f64) -> f64 {
        match *self {
            Basis::LogLog => libm::log(libm::log(n)),
            Basis::LogPow(b) => libm::pow(libm::log(n), b),
            Basis::Pow(a) => libm::pow(n, a),
            Basis::ExpIter(k) => (0..k).fold(n, |x, _| libm::exp(x)),
        }
    }

    /// `log B(n)` as an exponent vector, when the basis is closed under it.
    pub fn ln(&self) -> Option<ExpVec> {
        match *self {
            Basis::LogLog => None,
            Basis::LogPow(b) => Some(ExpVec::single(Basis::LogLog, b)),
            Basis::Pow(a) => Some(ExpVec::single(Basis::LOG, a)),
            Basis::ExpIter(1) => Some(ExpVec::single(Basis::Pow(1.0), 1.0)),
            Basis::ExpIter(k) => Some(ExpVec::single(Basis::ExpIter(k - 1), 1.0)),
        }
    }

    /// `sqrt(B(n))` as another basis function.
    pub fn sqrt(&self) -> Option<Basis> {
        match *self {
            Basis::LogPow(b) => Some(Basis::LogPow(b / 2.0)),
            Basis::Pow(a) => Some(Basis::Pow(a / 2.0)),
            Basis::LogLog | Basis::ExpIter(_) => None,
        }
    }

    /// `B(n)^e` for `e > 0`, when it is again a basis function.
    pub fn powf(&self, e: f64) -> Option<Basis> {
        match *self {
            Basis::LogPow(b) => Some(Basis::LogPow(b * e)),
            Basis::Pow(a) => Some(Basis::Pow(a * e)),
            _ if e == 1.0 => Some(*self),
            _ => None,
        }
    }

    /// Smallest index at which the basis is defined and positive.
    pub fn domain_start(&self) -> u64 {
        match self {
            Basis::LogLog => 3,
            Basis::LogPow(_) => 2,
            _ => 1,
        }
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Basis {}

impl PartialOrd for Basis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Basis {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tier().cmp(&other.tier()).then(self.param().total_cmp(&other.param()))
    }
}

fn snap_sum(a: f64, b: f64) -> f64 {
    let s = a + b;
    if libm::fabs(s) <= SNAP * libm::fmax(libm::fabs(a), libm::fabs(b)) {
        0.0
    } else {
        s
    }
}

/// `Σ c_i B_i(n)`, stored fastest-growing basis first, without zero entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpVec {
    terms: Vec<(Basis, f64)>,
}

impl ExpVec {
    pub fn zero() -> Self {
        ExpVec { terms: Vec::new() }
    }

    pub fn single(basis: Basis, coef: f64) -> Self {
        let mut v = ExpVec::zero();
        v.add_term(basis, coef);
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Basis, f64)>) -> Self {
        let mut v = ExpVec::zero();
        for (b, c) in terms {
            v.add_term(b, c);
        }
        v
    }

    pub fn add_term(&mut self, basis: Basis, coef: f64) {
        if coef == 0.0 {
            return;
        }
        match self.terms.binary_search_by(|(b, _)| basis.cmp(b)) {
            Ok(i) => {
                let c = snap_sum(self.terms[i].1, coef);
                if c == 0.0 {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = c;
                }
            }
            Err(i) => self.terms.insert(i, (basis, coef)),
        }
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        let mut out = self.clone();
        for &(b, c) in &other.terms {
            out.add_term(b, c);
        }
        out
    }

    pub fn scale(&self, k: f64) -> ExpVec {
        if k == 0.0 {
            return ExpVec::zero();
        }
        ExpVec { terms: self.terms.iter().map(|&(b, c)| (b, c * k)).collect() }
    }

    pub fn neg(&self) -> ExpVec {
        self.scale(-1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Fastest-growing basis with a nonzero coefficient.
    pub fn top(&self) -> Option<(Basis, f64)> {
        self.terms.first().copied()
    }

    pub fn coef(&self, basis: Basis) -> f64 {
        self.terms.iter().find(|(b, _)| *b == basis).map_or(0.0, |&(_, c)| c)
    }

    pub fn terms(&self) -> &[(Basis, f64)] {
        &self.terms
    }

    /// Keeps only the leading entry.
    pub fn truncate_to_top(&self) -> ExpVec {
        ExpVec { terms: self.terms.iter().take(1).copied().collect() }
    }

    pub fn value(&self, n: f64) -> f64 {
        self.terms.iter().map(|&(b, c)| c * b.eval(n)).sum()
    }

    pub fn domain_start(&self) -> u64 {
        self.terms.iter().map(|(b, _)| b.domain_start()).max().unwrap_or(1)
    }

    /// Asymptotic comparison of `exp(self)` against `exp(other)`.
    pub fn cmp_growth(&self, other: &ExpVec) -> Ordering {
        self.sub(other).sign_at_infinity()
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        self.add(&other.neg())
    }

    /// Sign of `Σ c_i B_i(n)` as `n → ∞` (`Equal` for the empty sum).
    pub fn sign_at_infinity(&self) -> Ordering {
        match self.top() {
            None => Ordering::Equal,
            Some((_, c)) if c > 0.0 => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }
}
