//! Generalized functions on the unit circle, on the Fourier side.
//!
//! An element is a family indexed by `n` of coefficient sequences
//! `(f̂_n(k))_{k∈ℤ}`. Distributions and hyperfunctions enter through the
//! mollifier embedding, which truncates their coefficients to
//! `|k| ≤ K_n = ⌊1/r_n⌋`.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::basis::{Basis, ExpVec};
use crate::gnum::GenNumber;
use crate::growth::{GrowthClass, Precision, SymbolicSeq};
use crate::ladder::IndexLadder;
use crate::scales::Scale;
use crate::ultranorm::{self, Classification, EstimatorConfig, LnSeq, UltraNormValue};
use crate::{Error, Result};

/// Samples per circle for sup-type seminorms.
pub const CIRCLE_SAMPLES: usize = 4096;

/// Largest truncation order materialized by numeric fallbacks.
const K_CAP: u64 = 4096;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A Laurent polynomial `Σ_k c_k z^k` with finite support.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Laurent {
    offset: i64,
    coeffs: Vec<Complex64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    /// `coeffs[i]` is the coefficient of `z^(offset + i)`.
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        let mut l = Laurent { offset, coeffs };
        l.trim();
        l
    }

    pub fn monomial(k: i64, coef: Complex64) -> Self {
        Laurent::new(k, alloc::vec![coef])
    }

    pub fn from_pairs(pairs: &[(i64, Complex64)]) -> Self {
        let Some(lo) = pairs.iter().map(|p| p.0).min() else {
            return Laurent::zero();
        };
        let hi = pairs.iter().map(|p| p.0).max().unwrap_or(lo);
        let mut coeffs = alloc::vec![c(0.0); (hi - lo + 1) as usize];
        for &(k, v) in pairs {
            coeffs[(k - lo) as usize] += v;
        }
        Laurent::new(lo, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|v| v.norm() == 0.0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|v| v.norm() == 0.0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.offset += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.offset = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let i = k - self.offset;
        if i < 0 {
            return c(0.0);
        }
        self.coeffs.get(i as usize).copied().unwrap_or(c(0.0))
    }

    /// `(min k, max k)` of the support.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.offset, self.offset + self.coeffs.len() as i64 - 1))
        }
    }

    /// `max |k|` over the support.
    pub fn degree(&self) -> u64 {
        self.support().map_or(0, |(a, b)| a.unsigned_abs().max(b.unsigned_abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, v)| (self.offset + i as i64, *v))
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut pairs: Vec<(i64, Complex64)> = self.iter().collect();
        pairs.extend(other.iter());
        Laurent::from_pairs(&pairs)
    }

    pub fn neg(&self) -> Laurent {
        self.scale(c(-1.0))
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: Complex64) -> Laurent {
        Laurent::new(self.offset, self.coeffs.iter().map(|v| v * s).collect())
    }

    /// Product of Laurent polynomials: convolution of coefficients.
    pub fn mul(&self, other: &Laurent) -> Laurent {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero();
        }
        let mut out = alloc::vec![c(0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Laurent::new(self.offset + other.offset, out)
    }

    /// `d/dx` of `Σ c_k e^{ikx}`: coefficient `k` times `ik`.
    pub fn derivative(&self) -> Laurent {
        Laurent::new(
            self.offset,
            self.iter().map(|(k, v)| v * Complex64::new(0.0, k as f64)).collect(),
        )
    }

    /// Keeps `|k| ≤ big_k`.
    pub fn truncate(&self, big_k: u64) -> Laurent {
        let pairs: Vec<_> = self.iter().filter(|(k, _)| k.unsigned_abs() <= big_k).collect();
        Laurent::from_pairs(&pairs)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let horner = self.coeffs.iter().rev().fold(c(0.0), |acc, v| acc * z + v);
        horner * z.powi(self.offset as i32)
    }

    /// `max_j |f(R e^{2πij/N})|`.
    pub fn circle_sup(&self, radius: f64, samples: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let shift = libm::pow(radius, self.offset as f64);
        let mut best = 0.0_f64;
        for j in 0..samples {
            let t = 2.0 * PI * j as f64 / samples as f64;
            let z = Complex64::from_polar(radius, t);
            let horner = self.coeffs.iter().rev().fold(c(0.0), |acc, v| acc * z + v);
            best = best.max(horner.norm() * shift);
        }
        best
    }

    pub fn is_nonneg_real(&self) -> bool {
        self.coeffs.iter().all(|v| v.im == 0.0 && v.re >= 0.0)
    }
}

/// Fourier coefficients `k ↦ ĉ_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffFamily {
    /// `ρ^|k|`
    Geometric(f64),
    /// `1`, the coefficients of δ
    Constant,
    /// `(1 + |k|)^α`
    PowerLaw(f64),
    /// `e^{β √|k|}`
    SubExp(f64),
    Finite(Laurent),
}

impl CoeffFamily {
    pub fn geometric(rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("geometric ratio must be positive, got {rho}")));
        }
        Ok(CoeffFamily::Geometric(rho))
    }

    pub fn monomial(k: i64) -> Self {
        CoeffFamily::Finite(Laurent::monomial(k, c(1.0)))
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as f64;
        match self {
            CoeffFamily::Geometric(rho) => c(libm::pow(*rho, a)),
            CoeffFamily::Constant => c(1.0),
            CoeffFamily::PowerLaw(alpha) => c(libm::pow(1.0 + a, *alpha)),
            CoeffFamily::SubExp(beta) => c(libm::exp(beta * libm::sqrt(a))),
            CoeffFamily::Finite(l) => l.get(k),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CoeffFamily::Finite(_))
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        match self {
            CoeffFamily::Finite(l) => l.support(),
            _ => None,
        }
    }

    pub fn truncate(&self, big_k: u64) -> Laurent {
        match self {
            CoeffFamily::Finite(l) => l.truncate(big_k),
            _ => {
                let kk = big_k as i64;
                Laurent::new(-kk, (-kk..=kk).map(|k| self.coeff(k)).collect())
            }
        }
    }

    fn nonneg(&self) -> bool {
        match self {
            CoeffFamily::Finite(l) => l.is_nonneg_real(),
            _ => true,
        }
    }

    /// Exponential rate in `K` of `max_{|k|≤K} λ^{|k|} |ĉ_k|`; `None` for the
    /// zero family.
    fn rate(&self, lambda: f64) -> Option<f64> {
        let ln_l = libm::log(lambda);
        match self {
            CoeffFamily::Geometric(rho) => Some(libm::fmax(0.0, ln_l + libm::log(*rho))),
            CoeffFamily::Constant | CoeffFamily::PowerLaw(_) | CoeffFamily::SubExp(_) => Some(libm::fmax(0.0, ln_l)),
            CoeffFamily::Finite(l) => (!l.is_zero()).then_some(0.0),
        }
    }

    /// `|ĉ_k|` for `k → +∞` as a growth class in the variable `k`.
    fn one_sided_class(&self) -> Option<GrowthClass> {
        match *self {
            CoeffFamily::Geometric(rho) => {
                Some(GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(1.0), libm::log(rho))))
            }
            CoeffFamily::Constant => Some(GrowthClass::one()),
            CoeffFamily::PowerLaw(alpha) => Some(
                GrowthClass::one()
                    .with_exps(ExpVec::single(Basis::LOG, alpha))
                    .with_precision(Precision::BoundedRatio),
            ),
            CoeffFamily::SubExp(beta) => Some(GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(0.5), beta))),
            CoeffFamily::Finite(_) => None,
        }
    }
}

/// `q̂^λ(c) = sup_k λ^{|k|} |ĉ_k|`.
pub fn qhat_lambda(cf: &CoeffFamily, lambda: f64) -> f64 {
    let ln_l = libm::log(lambda);
    // largest value of a unimodal weight sequence, scanned up to a safe bound
    let scan = |bound: f64, term: &dyn Fn(f64) -> f64| {
        let kmax = libm::ceil(bound).clamp(16.0, 1e7) as u64;
        (0..=kmax).map(|k| term(k as f64)).fold(0.0, f64::max)
    };
    match cf {
        CoeffFamily::Finite(l) => l.iter().map(|(k, v)| libm::pow(lambda, k.unsigned_abs() as f64) * v.norm()).fold(0.0, f64::max),
        CoeffFamily::Geometric(rho) => {
            if lambda * rho <= 1.0 {
                1.0
            } else {
                f64::INFINITY
            }
        }
        CoeffFamily::Constant => {
            if lambda <= 1.0 {
                1.0
            } else {
                f64::INFINITY
            }
        }
        CoeffFamily::PowerLaw(alpha) => {
            if *alpha <= 0.0 && lambda <= 1.0 {
                1.0
            } else if lambda >= 1.0 {
                f64::INFINITY
            } else {
                scan(4.0 * alpha / -ln_l + 16.0, &|k| libm::exp(alpha * libm::log1p(k) + k * ln_l))
            }
        }
        CoeffFamily::SubExp(beta) => {
            if *beta <= 0.0 && lambda <= 1.0 {
                1.0
            } else if lambda >= 1.0 {
                f64::INFINITY
            } else {
                let b = beta / -ln_l;
                scan(b * b + 16.0, &|k| libm::exp(beta * libm::sqrt(k) + k * ln_l))
            }
        }
    }
}

/// `q^λ(c) = sup_{1/λ<|z|<λ} |Σ ĉ_k z^k|`, from the two boundary circles.
pub fn q_lambda_numeric(cf: &CoeffFamily, lambda: f64) -> Result<f64> {
    match cf {
        CoeffFamily::Finite(l) => Ok(q_lambda_laurent(l, lambda)),
        _ => Err(Error::Unsupported("q^λ needs a finitely supported family".into())),
    }
}

fn q_lambda_laurent(l: &Laurent, lambda: f64) -> f64 {
    let outer = l.circle_sup(lambda, CIRCLE_SAMPLES);
    if lambda == 1.0 {
        outer
    } else {
        outer.max(l.circle_sup(1.0 / lambda, CIRCLE_SAMPLES))
    }
}

/// Seminorms on a single coefficient family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorusSeminorm {
    /// `sup_x |f(x)|`
    Sup,
    /// `max_{α≤ν} sup_x |f^{(α)}(x)|`
    DerivSup(u32),
    QLambda(f64),
    QHat(f64),
    /// `Σ_k |ĉ_k|`
    SumAbs,
}

impl TorusSeminorm {
    pub fn apply(&self, l: &Laurent) -> f64 {
        match *self {
            TorusSeminorm::Sup => l.circle_sup(1.0, CIRCLE_SAMPLES),
            TorusSeminorm::DerivSup(nu) => {
                let mut d = l.clone();
                let mut best = d.circle_sup(1.0, CIRCLE_SAMPLES);
                for _ in 0..nu {
                    d = d.derivative();
                    best = best.max(d.circle_sup(1.0, CIRCLE_SAMPLES));
                }
                best
            }
            TorusSeminorm::QLambda(lambda) => q_lambda_laurent(l, lambda),
            TorusSeminorm::QHat(lambda) => qhat_lambda(&CoeffFamily::Finite(l.clone()), lambda),
            TorusSeminorm::SumAbs => l.iter().map(|(_, v)| v.norm()).sum(),
        }
    }

    /// The geometric weight the seminorm puts on `|k|`.
    fn weight(&self) -> f64 {
        match *self {
            TorusSeminorm::QLambda(lambda) => lambda.max(1.0 / lambda),
            TorusSeminorm::QHat(lambda) => lambda,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> alloc::string::String {
        match self {
            TorusSeminorm::Sup => "sup".into(),
            TorusSeminorm::DerivSup(nu) => format!("deriv-sup-{nu}"),
            TorusSeminorm::QLambda(l) => format!("q-{l}"),
            TorusSeminorm::QHat(l) => format!("qhat-{l}"),
            TorusSeminorm::SumAbs => "sum-abs".into(),
        }
    }
}

pub type LaurentFn = Arc<dyn Fn(u64) -> Laurent + Send + Sync>;

#[derive(Clone)]
enum GfExpr {
    Embed(CoeffFamily),
    Const(Laurent),
    /// The untruncated family; only usable in pairings.
    Dist(CoeffFamily),
    Sum(Box<GfExpr>, Box<GfExpr>),
    Neg(Box<GfExpr>),
    Scalar(Complex64, Box<GfExpr>),
    Mul(Box<GfExpr>, Box<GfExpr>),
    Derivative(Box<GfExpr>),
    ScaleBy(GenNumber, Box<GfExpr>),
    Explicit(LaurentFn),
}

/// Structural equality; opaque parts never compare equal.
fn same_expr(a: &GfExpr, b: &GfExpr) -> bool {
    use GfExpr::*;
    match (a, b) {
        (Embed(x), Embed(y)) | (Dist(x), Dist(y)) => x == y,
        (Const(x), Const(y)) => x == y,
        (Sum(a1, a2), Sum(b1, b2)) | (Mul(a1, a2), Mul(b1, b2)) => same_expr(a1, b1) && same_expr(a2, b2),
        (Neg(x), Neg(y)) | (Derivative(x), Derivative(y)) => same_expr(x, y),
        (Scalar(s, x), Scalar(t, y)) => s == t && same_expr(x, y),
        _ => false,
    }
}

impl fmt::Debug for GfExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GfExpr::Embed(c) => write!(f, "embed({c:?})"),
            GfExpr::Const(l) => write!(f, "const({l:?})"),
            GfExpr::Dist(c) => write!(f, "dist({c:?})"),
            GfExpr::Sum(a, b) => write!(f, "({a:?} + {b:?})"),
            GfExpr::Neg(a) => write!(f, "-{a:?}"),
            GfExpr::Scalar(s, a) => write!(f, "{s}·{a:?}"),
            GfExpr::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            GfExpr::Derivative(a) => write!(f, "d({a:?})"),
            GfExpr::ScaleBy(_, a) => write!(f, "x·{a:?}"),
            GfExpr::Explicit(_) => f.write_str("<explicit>"),
        }
    }
}

/// `K_n = ⌊1/r_n⌋`.
pub fn k_n(r: &Scale, n: u64) -> u64 {
    let x = 1.0 / r.eval(n);
    libm::floor(x * (1.0 + 1e-12)) as u64
}

/// A generalized function on the circle.
#[derive(Debug, Clone)]
pub struct TorusGF {
    expr: GfExpr,
    scale: Scale,
}

impl TorusGF {
    fn check_scale(r: &Scale) -> Result<()> {
        if r.egorov_index().is_some() {
            return Err(Error::Unsupported("mollifier embedding needs r_n > 0".into()));
        }
        Ok(())
    }

    pub fn constant(l: Laurent, r: &Scale) -> Result<Self> {
        Self::check_scale(r)?;
        Ok(TorusGF { expr: GfExpr::Const(l), scale: r.clone() })
    }

    pub fn zero(r: &Scale) -> Result<Self> {
        Self::constant(Laurent::zero(), r)
    }

    /// The distribution itself, without mollification. It pairs with test
    /// functions but has no coefficients at a finite index.
    pub fn distribution(cf: CoeffFamily, r: &Scale) -> Result<Self> {
        Self::check_scale(r)?;
        Ok(TorusGF { expr: GfExpr::Dist(cf), scale: r.clone() })
    }

    pub fn explicit<F>(f: F, r: &Scale) -> Result<Self>
    where
        F: Fn(u64) -> Laurent + Send + Sync + 'static,
    {
        Self::check_scale(r)?;
        Ok(TorusGF { expr: GfExpr::Explicit(Arc::new(f)), scale: r.clone() })
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    fn binary(&self, other: &TorusGF, op: fn(Box<GfExpr>, Box<GfExpr>) -> GfExpr) -> Result<TorusGF> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch);
        }
        Ok(TorusGF { expr: op(Box::new(self.expr.clone()), Box::new(other.expr.clone())), scale: self.scale.clone() })
    }

    fn unary(&self, expr: GfExpr) -> TorusGF {
        TorusGF { expr, scale: self.scale.clone() }
    }

    pub fn add(&self, other: &TorusGF) -> Result<TorusGF> {
        self.binary(other, GfExpr::Sum)
    }

    pub fn sub(&self, other: &TorusGF) -> Result<TorusGF> {
        if self.scale == other.scale && same_expr(&self.expr, &other.expr) {
            return TorusGF::zero(&self.scale);
        }
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TorusGF {
        self.unary(GfExpr::Neg(Box::new(self.expr.clone())))
    }

    pub fn scalar(&self, s: Complex64) -> TorusGF {
        self.unary(GfExpr::Scalar(s, Box::new(self.expr.clone())))
    }

    /// Multiplication by a generalized number.
    pub fn scale_by(&self, x: &GenNumber) -> Result<TorusGF> {
        if x.scale() != &self.scale {
            return Err(Error::ScaleMismatch);
        }
        Ok(self.unary(GfExpr::ScaleBy(x.clone(), Box::new(self.expr.clone()))))
    }

    pub fn mul(&self, other: &TorusGF) -> Result<TorusGF> {
        if has_dist(&self.expr) || has_dist(&other.expr) {
            return Err(Error::Unsupported("product with an unmollified distribution".into()));
        }
        self.binary(other, GfExpr::Mul)
    }

    pub fn derivative(&self) -> TorusGF {
        self.unary(GfExpr::Derivative(Box::new(self.expr.clone())))
    }

    pub fn k_n(&self, n: u64) -> u64 {
        k_n(&self.scale, n)
    }

    /// Coefficients at index `n`.
    pub fn coeffs(&self, n: u64) -> Result<Laurent> {
        eval_expr(&self.expr, &self.scale, n)
    }

    /// Index-independent coefficients from some index on, if the element is
    /// built from finite families only.
    pub fn stable_coeffs(&self) -> Option<Laurent> {
        let d = stable_degree(&self.expr)?;
        let n = (1..63).map(|j| 1u64 << j).find(|&n| n >= self.scale.domain_start() && self.k_n(n) >= d)?;
        self.coeffs(n).ok()
    }
}

fn has_dist(e: &GfExpr) -> bool {
    match e {
        GfExpr::Dist(_) => true,
        GfExpr::Sum(a, b) | GfExpr::Mul(a, b) => has_dist(a) || has_dist(b),
        GfExpr::Neg(a) | GfExpr::Scalar(_, a) | GfExpr::Derivative(a) | GfExpr::ScaleBy(_, a) => has_dist(a),
        _ => false,
    }
}

fn eval_expr(e: &GfExpr, r: &Scale, n: u64) -> Result<Laurent> {
    Ok(match e {
        GfExpr::Embed(cf) => cf.truncate(k_n(r, n)),
        GfExpr::Const(l) => l.clone(),
        GfExpr::Dist(cf) => match cf {
            CoeffFamily::Finite(l) => l.clone(),
            _ => return Err(Error::Unsupported("unmollified distribution has no coefficients at an index".into())),
        },
        GfExpr::Sum(a, b) => eval_expr(a, r, n)?.add(&eval_expr(b, r, n)?),
        GfExpr::Neg(a) => eval_expr(a, r, n)?.neg(),
        GfExpr::Scalar(s, a) => eval_expr(a, r, n)?.scale(*s),
        GfExpr::Mul(a, b) => eval_expr(a, r, n)?.mul(&eval_expr(b, r, n)?),
        GfExpr::Derivative(a) => eval_expr(a, r, n)?.derivative(),
        GfExpr::ScaleBy(x, a) => eval_expr(a, r, n)?.scale(x.eval(n)),
        GfExpr::Explicit(f) => f(n),
    })
}

/// Truncation order from which the expression stops depending on `n`.
fn stable_degree(e: &GfExpr) -> Option<u64> {
    match e {
        GfExpr::Embed(CoeffFamily::Finite(l)) => Some(l.degree()),
        GfExpr::Const(_) | GfExpr::Dist(CoeffFamily::Finite(_)) => Some(0),
        GfExpr::Sum(a, b) | GfExpr::Mul(a, b) => Some(stable_degree(a)?.max(stable_degree(b)?)),
        GfExpr::Neg(a) | GfExpr::Scalar(_, a) | GfExpr::Derivative(a) => stable_degree(a),
        _ => None,
    }
}

fn nonneg(e: &GfExpr) -> bool {
    match e {
        GfExpr::Embed(cf) | GfExpr::Dist(cf) => cf.nonneg(),
        GfExpr::Const(l) => l.is_nonneg_real(),
        GfExpr::Sum(a, b) | GfExpr::Mul(a, b) => nonneg(a) && nonneg(b),
        GfExpr::Scalar(s, a) => s.im == 0.0 && s.re >= 0.0 && nonneg(a),
        _ => false,
    }
}

/// Closed-form norm of an expression, if the combination rules decide it.
fn expr_norm(e: &GfExpr, sn: &TorusSeminorm, r: &Scale) -> Option<f64> {
    match e {
        GfExpr::Embed(cf) => Some(cf.rate(sn.weight()).map_or(0.0, libm::exp)),
        GfExpr::Const(l) => Some(if l.is_zero() { 0.0 } else { 1.0 }),
        GfExpr::Dist(_) | GfExpr::Explicit(_) => None,
        GfExpr::Neg(a) => expr_norm(a, sn, r),
        GfExpr::Scalar(s, a) => {
            if s.norm() == 0.0 {
                Some(0.0)
            } else {
                expr_norm(a, sn, r)
            }
        }
        GfExpr::Sum(a, b) => {
            let (na, nb) = (expr_norm(a, sn, r)?, expr_norm(b, sn, r)?);
            if na != nb || na == 0.0 || (nonneg(a) && nonneg(b)) {
                Some(na.max(nb))
            } else {
                None
            }
        }
        GfExpr::Mul(a, b) => {
            let (na, nb) = (expr_norm(a, sn, r)?, expr_norm(b, sn, r)?);
            let zero_times_inf = (na == 0.0 && nb.is_infinite()) || (nb == 0.0 && na.is_infinite());
            if zero_times_inf {
                None
            } else if na == 0.0 || nb == 0.0 || (nonneg(a) && nonneg(b)) {
                Some(na * nb)
            } else {
                None
            }
        }
        GfExpr::Derivative(a) => match a.as_ref() {
            GfExpr::Embed(cf) if !cf.is_finite() => expr_norm(a, sn, r),
            _ => None,
        },
        GfExpr::ScaleBy(x, a) => {
            let nx = x.norm();
            let na = expr_norm(a, sn, r)?;
            if !nx.is_exact() || (nx.value == 0.0 && na.is_infinite()) || (na == 0.0 && nx.value.is_infinite()) {
                None
            } else {
                Some(nx.value * na)
            }
        }
    }
}

/// `‖f‖_{p,r} = limsup_n p(f̂_n)^{r_n}` for a torus seminorm `p`.
pub fn gf_norm(f: &TorusGF, sn: &TorusSeminorm, ladder: &IndexLadder) -> UltraNormValue {
    if let Some(l) = f.stable_coeffs() {
        return UltraNormValue::exact(if l.is_zero() || sn.apply(&l) == 0.0 { 0.0 } else { 1.0 });
    }
    if let Some(v) = expr_norm(&f.expr, sn, &f.scale) {
        return UltraNormValue::exact(v);
    }
    let g = f.clone();
    let sn = *sn;
    let seq = LnSeq(
        move |n| {
            if g.k_n(n) > K_CAP {
                return f64::NAN;
            }
            match g.coeffs(n) {
                Ok(l) => libm::log(sn.apply(&l)),
                Err(_) => f64::NAN,
            }
        },
        f.scale.domain_start(),
    );
    ultranorm::norm_estimate_with(&seq, &f.scale, ladder, &EstimatorConfig::default()).value
}

pub fn classify_gf(f: &TorusGF, sn: &TorusSeminorm, ladder: &IndexLadder) -> Classification {
    Classification::from_norm(&gf_norm(f, sn, ladder))
}

/// Mollifier embedding: truncation of `cf` to `|k| ≤ K_n`.
pub fn embed(cf: CoeffFamily, r: &Scale) -> Result<TorusGF> {
    TorusGF::check_scale(r)?;
    Ok(TorusGF { expr: GfExpr::Embed(cf), scale: r.clone() })
}

pub fn gf_mul(f: &TorusGF, g: &TorusGF) -> Result<TorusGF> {
    f.mul(g)
}

pub fn derivative(f: &TorusGF) -> TorusGF {
    f.derivative()
}

/// Max of the two one-sided ultranorms of `k ↦ |ĉ_{±k}|` on the scale `r`
/// indexed by `k`.
pub fn pm_norm(cf: &CoeffFamily, r: &Scale) -> UltraNormValue {
    match cf.one_sided_class() {
        // finitely supported: eventually zero
        None => UltraNormValue::exact(0.0),
        Some(g) => ultranorm::norm_exact(&g.into(), r).unwrap_or(UltraNormValue::inconclusive()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffClass {
    Analytic,
    Distribution,
    Hyperfunction,
    None,
}

/// Which of the three thresholds the coefficient family meets:
/// `(‖·‖^±_{1/k} < 1, ‖·‖^±_{1/log k} < ∞, ‖·‖^±_{1/k} ≤ 1)`.
pub fn coefficient_labels(cf: &CoeffFamily) -> (bool, bool, bool) {
    let inv_k = Scale::power(1.0).expect("m = 1");
    let inv_log = Scale::log();
    let a = pm_norm(cf, &inv_k).value;
    let d = pm_norm(cf, &inv_log).value;
    (a < 1.0, d < f64::INFINITY, a <= 1.0)
}

/// The strongest label among analytic, distribution, hyperfunction.
pub fn classify_coefficients(cf: &CoeffFamily) -> CoeffClass {
    match coefficient_labels(cf) {
        (true, _, _) => CoeffClass::Analytic,
        (_, true, _) => CoeffClass::Distribution,
        (_, _, true) => CoeffClass::Hyperfunction,
        _ => CoeffClass::None,
    }
}

/// `Σ_k a_k` for summable closed-form families, and a growth class for the
/// tail `Σ_{|k|>K} a_k` in terms of `1/r_n`.
fn summable_geometric(cf: &CoeffFamily, rho: f64) -> Option<(f64, f64)> {
    // returns (ratio, constant) with a_k = ratio^|k| up to the constant
    match *cf {
        CoeffFamily::Constant => Some((rho, 1.0)),
        CoeffFamily::Geometric(s) => Some((s * rho, 1.0)),
        _ => None,
    }
}

fn numeric_full_sum(f: impl Fn(i64) -> Complex64) -> Option<Complex64> {
    let mut s = f(0);
    for k in 1..200_000i64 {
        let t = f(k) + f(-k);
        s += t;
        if t.norm() < 1e-18 * s.norm().max(1e-300) {
            return Some(s);
        }
    }
    None
}

fn pair_laurent(l: &Laurent, psi: &CoeffFamily) -> Complex64 {
    l.iter().map(|(k, v)| v * psi.coeff(-k)).sum()
}

/// `⟨f, ψ⟩ = (Σ_k f̂_n(k) ψ̂(-k))_n` as a generalized number.
pub fn pair(f: &TorusGF, psi: &CoeffFamily) -> Result<GenNumber> {
    pair_expr(&f.expr, &f.scale, psi)
}

fn callable_pairing(e: &GfExpr, r: &Scale, psi: &CoeffFamily) -> Result<GenNumber> {
    let (e, r2, psi) = (e.clone(), r.clone(), psi.clone());
    let probe = eval_expr(&e, r, r.domain_start().max(2));
    probe?;
    GenNumber::callable(
        move |n| {
            if k_n(&r2, n) > K_CAP * 64 {
                return Complex64::new(f64::NAN, 0.0);
            }
            eval_expr(&e, &r2, n).map_or(Complex64::new(f64::NAN, 0.0), |l| pair_laurent(&l, &psi))
        },
        r.clone(),
    )
    .map_err(|_| Error::NotModerate("pairing diverges".into()))
}

fn pair_expr(e: &GfExpr, r: &Scale, psi: &CoeffFamily) -> Result<GenNumber> {
    let constant = |z: Complex64| GenNumber::constant(z, r.clone());
    match e {
        GfExpr::Const(l) => Ok(constant(pair_laurent(l, psi))),
        GfExpr::Dist(cf) => {
            let total = match (cf, psi) {
                (CoeffFamily::Finite(l), _) => Some(pair_laurent(l, psi)),
                (_, CoeffFamily::Finite(l)) => Some(l.iter().map(|(k, v)| v * cf.coeff(-k)).sum()),
                _ => numeric_full_sum(|k| cf.coeff(k) * psi.coeff(-k)),
            };
            total.map(constant).ok_or_else(|| Error::NotModerate("pairing series diverges".into()))
        }
        GfExpr::Embed(cf) => {
            if let CoeffFamily::Finite(l) = psi {
                // eventually Σ_k ĉ_k ψ̂_{-k} over the finite support of ψ
                let full: Complex64 = l.iter().map(|(k, v)| v * cf.coeff(-k)).sum();
                let (cf2, l2, r2) = (cf.clone(), l.clone(), r.clone());
                return Ok(constant(full).with_values(move |n| {
                    let kk = k_n(&r2, n);
                    l2.iter().filter(|(k, _)| k.unsigned_abs() <= kk).map(|(k, v)| v * cf2.coeff(-k)).sum()
                }));
            }
            if let CoeffFamily::Finite(l) = cf {
                let full = pair_laurent(l, psi);
                let (l2, psi2, r2) = (l.clone(), psi.clone(), r.clone());
                return Ok(constant(full)
                    .with_values(move |n| pair_laurent(&l2.truncate(k_n(&r2, n)), &psi2)));
            }
            if let (CoeffFamily::Geometric(rho), Some(recip)) = (psi, r.reciprocal()) {
                if let Some((q, _)) = summable_geometric(cf, *rho).filter(|(q, _)| *q < 1.0) {
                    // Σ_{|k|≤K} q^|k| = S - 2 q^{K+1}/(1-q), with q^{K+1} = Θ(q^{1/r_n})
                    let total = (1.0 + q) / (1.0 - q);
                    let tail = GrowthClass::one()
                        .with_exps(recip.scale(libm::log(q)))
                        .with_coef(c(-2.0 * q / (1.0 - q)))
                        .with_precision(Precision::BoundedRatio);
                    let seq = SymbolicSeq::from(GrowthClass::real(total)?).add(&tail.into());
                    let r2 = r.clone();
                    return Ok(GenNumber::symbolic(seq, r.clone())?.with_values(move |n| {
                        let kk = k_n(&r2, n) as f64;
                        c(total - 2.0 * libm::pow(q, kk + 1.0) / (1.0 - q))
                    }));
                }
                if *rho < 1.0 {
                    // polynomially or subexponentially weighted geometric tail
                    let total = numeric_full_sum(|k| cf.coeff(k) * psi.coeff(-k))
                        .ok_or_else(|| Error::NotModerate("pairing series diverges".into()))?;
                    let tail = GrowthClass::one()
                        .with_exps(recip.scale(libm::log(*rho)))
                        .with_coef(c(-1.0))
                        .with_precision(Precision::LogAsymptotic);
                    let seq = SymbolicSeq::from(GrowthClass::constant(total)?).add(&tail.into());
                    let (cf2, psi2, r2) = (cf.clone(), psi.clone(), r.clone());
                    return Ok(GenNumber::symbolic(seq, r.clone())?.with_values(move |n| {
                        pair_laurent(&cf2.truncate(k_n(&r2, n)), &psi2)
                    }));
                }
            }
            callable_pairing(e, r, psi)
        }
        GfExpr::Sum(a, b) => pair_expr(a, r, psi)?.add(&pair_expr(b, r, psi)?),
        GfExpr::Neg(a) => Ok(pair_expr(a, r, psi)?.neg()),
        GfExpr::Scalar(s, a) => Ok(pair_expr(a, r, psi)?.scale_by(*s)),
        GfExpr::ScaleBy(x, a) => x.mul(&pair_expr(a, r, psi)?),
        GfExpr::Mul(..) | GfExpr::Derivative(_) | GfExpr::Explicit(_) => callable_pairing(e, r, psi),
    }
}

/// `(n, sup|embed(δ)_n|) = (n, 2K_n + 1)`: the embedded delta is not bounded.
pub fn delta_unboundedness_trace(r: &Scale, ladder: &IndexLadder) -> Result<Vec<(u64, f64)>> {
    let d = embed(CoeffFamily::Constant, r)?;
    ladder
        .clamp_start(r.domain_start())
        .iter()
        .map(|n| {
            let kk = d.k_n(n);
            let v = if kk <= K_CAP {
                TorusSeminorm::Sup.apply(&d.coeffs(n)?)
            } else {
                (2 * kk + 1) as f64
            };
            Ok((n, v))
        })
        .collect()
}

/// `f = g` in the quotient for the seminorm `p`.
pub fn gf_eq_quotient(f: &TorusGF, g: &TorusGF, sn: &TorusSeminorm, ladder: &IndexLadder) -> Result<crate::Verdict> {
    let d = f.sub(g)?;
    let v = gf_norm(&d, sn, ladder);
    Ok(match Classification::from_norm(&v) {
        Classification::Negligible => crate::Verdict::Holds,
        Classification::ModerateNotNegligible | Classification::Unbounded => {
            crate::Verdict::fail(format!("‖f - g‖ = {}", v.value))
        }
        _ => crate::Verdict::inconclusive("difference norm not decided"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn log() -> Scale {
        Scale::log()
    }

    #[test]
    fn qhat_examples() {
        let g = CoeffFamily::Geometric(0.5);
        assert_eq!(qhat_lambda(&g, 1.4), 1.0);
        let brute = (0..1000).map(|k| libm::pow(0.7, k as f64)).fold(0.0, f64::max);
        assert_eq!(brute, 1.0);
        assert_eq!(qhat_lambda(&g, 3.0), f64::INFINITY);
        assert_eq!(qhat_lambda(&CoeffFamily::Constant, 1.0), 1.0);
        // (1+k)^2 0.5^k peaks between k = 1 and k = 2
        let p = qhat_lambda(&CoeffFamily::PowerLaw(2.0), 0.5);
        let brute = (0..200).map(|k| libm::pow(1.0 + k as f64, 2.0) * libm::pow(0.5, k as f64)).fold(0.0, f64::max);
        assert_relative_eq!(p, brute, max_relative = 1e-15);
    }

    #[test]
    fn q_lambda_examples() {
        let one = CoeffFamily::Finite(Laurent::monomial(0, c(1.0)));
        for l in [1.1, 1.5, 2.0] {
            assert_relative_eq!(q_lambda_numeric(&one, l).unwrap(), 1.0, max_relative = 1e-15);
        }
        let z = CoeffFamily::monomial(1);
        assert_relative_eq!(q_lambda_numeric(&z, 2.0).unwrap(), 2.0, max_relative = 1e-12);
        assert!(q_lambda_numeric(&CoeffFamily::Constant, 2.0).is_err());
    }

    #[test]
    fn pm_norm_examples() {
        let inv_k = Scale::power(1.0).unwrap();
        assert_eq!(pm_norm(&CoeffFamily::Constant, &log()).value, 1.0);
        assert_relative_eq!(pm_norm(&CoeffFamily::Geometric(0.5), &inv_k).value, 0.5, max_relative = 1e-15);
        assert_eq!(pm_norm(&CoeffFamily::SubExp(1.0), &inv_k).value, 1.0);
        assert_eq!(pm_norm(&CoeffFamily::SubExp(1.0), &log()).value, f64::INFINITY);
    }

    #[test]
    fn trichotomy() {
        assert_eq!(classify_coefficients(&CoeffFamily::Geometric(0.5)), CoeffClass::Analytic);
        assert_eq!(classify_coefficients(&CoeffFamily::Constant), CoeffClass::Distribution);
        assert_eq!(coefficient_labels(&CoeffFamily::Constant), (false, true, true));
        assert_eq!(classify_coefficients(&CoeffFamily::SubExp(1.0)), CoeffClass::Hyperfunction);
        assert_eq!(coefficient_labels(&CoeffFamily::SubExp(1.0)), (false, false, true));
        assert_eq!(classify_coefficients(&CoeffFamily::PowerLaw(3.0)), CoeffClass::Distribution);
        assert_eq!(classify_coefficients(&CoeffFamily::Geometric(1.5)), CoeffClass::None);
    }

    #[test]
    fn embed_examples() {
        let ladder = IndexLadder::default();
        let d = embed(CoeffFamily::Constant, &log()).unwrap();
        let n = 1u64 << 10;
        assert_eq!(d.k_n(n), 6);
        assert_eq!(d.coeffs(n).unwrap(), Laurent::new(-6, alloc::vec![c(1.0); 13]));
        assert_relative_eq!(TorusSeminorm::Sup.apply(&d.coeffs(n).unwrap()), 13.0, max_relative = 1e-12);
        assert_eq!(gf_norm(&d, &TorusSeminorm::Sup, &ladder), UltraNormValue::exact(1.0));

        let p = Laurent::from_pairs(&[(-3, c(1.0)), (0, c(2.0)), (3, c(-1.0))]);
        let e = embed(CoeffFamily::Finite(p.clone()), &log()).unwrap();
        assert_eq!(e.coeffs(1 << 5).unwrap(), p);
        assert_eq!(e.coeffs(4).unwrap(), Laurent::monomial(0, c(2.0)));
    }

    #[test]
    fn products_and_derivatives() {
        let ladder = IndexLadder::default();
        let d = embed(CoeffFamily::Constant, &log()).unwrap();
        let d2 = gf_mul(&d, &d).unwrap();
        let n = 1u64 << 10;
        let kk = 6i64;
        let tri = d2.coeffs(n).unwrap();
        for k in -2 * kk..=2 * kk {
            assert_eq!(tri.get(k), c((2 * kk + 1 - k.abs()) as f64));
        }
        assert_eq!(gf_norm(&d2, &TorusSeminorm::Sup, &ladder), UltraNormValue::exact(1.0));

        let one = TorusGF::constant(Laurent::monomial(0, c(1.0)), &log()).unwrap();
        assert_eq!(gf_mul(&d, &one).unwrap().coeffs(n).unwrap(), d.coeffs(n).unwrap());
        assert!(derivative(&one).coeffs(n).unwrap().is_zero());

        let cosish = TorusGF::constant(Laurent::from_pairs(&[(-1, c(1.0)), (1, c(1.0))]), &log()).unwrap();
        let dz = derivative(&cosish).coeffs(n).unwrap();
        assert_eq!(dz, Laurent::from_pairs(&[(-1, Complex64::new(0.0, -1.0)), (1, Complex64::new(0.0, 1.0))]));

        let dd = derivative(&d);
        let coeffs = dd.coeffs(n).unwrap();
        assert_eq!(coeffs.get(3), Complex64::new(0.0, 3.0));
        assert_eq!(gf_norm(&dd, &TorusSeminorm::Sup, &ladder).value, 1.0);
    }

    #[test]
    fn embedding_respects_trig_products() {
        let ladder = IndexLadder::default();
        let p = Laurent::from_pairs(&[(-2, c(1.0)), (1, c(3.0))]);
        let q = Laurent::from_pairs(&[(0, c(-1.0)), (4, Complex64::new(0.5, 2.0))]);
        let lhs = gf_mul(&embed(CoeffFamily::Finite(p.clone()), &log()).unwrap(), &embed(CoeffFamily::Finite(q.clone()), &log()).unwrap()).unwrap();
        let rhs = embed(CoeffFamily::Finite(p.mul(&q)), &log()).unwrap();
        assert!(gf_eq_quotient(&lhs, &rhs, &TorusSeminorm::Sup, &ladder).unwrap().holds());
        // early indices truncate differently, later ones agree exactly
        assert_ne!(lhs.coeffs(8).unwrap(), rhs.coeffs(8).unwrap());
        assert_eq!(lhs.coeffs(1 << 12).unwrap(), rhs.coeffs(1 << 12).unwrap());
    }

    #[test]
    fn pairing_examples() {
        let psi = CoeffFamily::Geometric(0.5);
        let d = embed(CoeffFamily::Constant, &log()).unwrap();
        let x = pair(&d, &psi).unwrap();
        for n in [4u64, 1 << 10, 1 << 20] {
            let kk = k_n(&log(), n) as f64;
            assert_relative_eq!(x.eval(n).re, 3.0 - libm::pow(2.0, 1.0 - kk), max_relative = 1e-14);
            // oracle: direct finite sum
            let direct: f64 = (-(kk as i64)..=kk as i64).map(|k| libm::pow(0.5, k.unsigned_abs() as f64)).sum();
            assert_relative_eq!(x.eval(n).re, direct, max_relative = 1e-14);
        }
        let zero = TorusGF::zero(&log()).unwrap();
        assert_eq!(pair(&zero, &psi).unwrap().eval(100), c(0.0));
        let z2 = embed(CoeffFamily::monomial(2), &log()).unwrap();
        assert_eq!(pair(&z2, &psi).unwrap().eval(1 << 10), c(0.25));
    }

    #[test]
    fn pairing_is_bilinear() {
        let psi = CoeffFamily::Geometric(0.3);
        let f = embed(CoeffFamily::Constant, &log()).unwrap();
        let g = embed(CoeffFamily::Finite(Laurent::from_pairs(&[(1, c(2.0)), (-4, c(1.0))])), &log()).unwrap();
        let lhs = pair(&f.add(&g).unwrap(), &psi).unwrap();
        let rhs = pair(&f, &psi).unwrap().add(&pair(&g, &psi).unwrap()).unwrap();
        for n in [2u64, 64, 1 << 16] {
            assert_relative_eq!(lhs.eval(n).re, rhs.eval(n).re, max_relative = 1e-14);
        }
    }

    #[test]
    fn delta_trace() {
        let t = delta_unboundedness_trace(&log(), &IndexLadder::default()).unwrap();
        assert!(t.contains(&(1 << 10, 13.0)));
        assert!(t.contains(&(1 << 20, 27.0)));
        assert!(t.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}
