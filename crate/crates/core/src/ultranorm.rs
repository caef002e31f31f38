//! The ultranorm `‖f‖_{p,r} = limsup p(f_n)^{r_n}`: exact evaluation on
//! symbolic sequences, a numeric limsup estimator for black boxes, distances,
//! classification, and the diagonal construction behind completeness.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::basis::Basis;
use crate::growth::{GrowthClass, Precision, SymbolicSeq};
use crate::ladder::IndexLadder;
use crate::scales::{ratio_limit, Limit, Scale};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormMode {
    Exact,
    Estimated { ci_low: f64, ci_high: f64 },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltraNormValue {
    /// In `[0, ∞]`; `NaN` when inconclusive.
    pub value: f64,
    pub mode: NormMode,
}

impl UltraNormValue {
    pub fn exact(value: f64) -> Self {
        UltraNormValue { value, mode: NormMode::Exact }
    }

    pub fn estimated(value: f64, ci_low: f64, ci_high: f64) -> Self {
        UltraNormValue { value, mode: NormMode::Estimated { ci_low, ci_high } }
    }

    pub fn inconclusive() -> Self {
        UltraNormValue { value: f64::NAN, mode: NormMode::Inconclusive }
    }

    pub fn is_exact(&self) -> bool {
        self.mode == NormMode::Exact
    }

    pub fn is_inconclusive(&self) -> bool {
        self.mode == NormMode::Inconclusive
    }

    /// Does the value (or its confidence interval) contain `x`?
    pub fn contains(&self, x: f64, rel_tol: f64) -> bool {
        match self.mode {
            NormMode::Exact => approx_eq(self.value, x, rel_tol),
            NormMode::Estimated { ci_low, ci_high } => x >= ci_low && x <= ci_high,
            NormMode::Inconclusive => false,
        }
    }

    /// `value^c` with `∞^c = ∞` and `0^c = 0` for `c > 0`.
    pub fn powf(&self, c: f64) -> Self {
        let p = |v: f64| {
            if v == 0.0 || v.is_infinite() {
                v
            } else {
                libm::pow(v, c)
            }
        };
        let mode = match self.mode {
            NormMode::Estimated { ci_low, ci_high } => NormMode::Estimated { ci_low: p(ci_low), ci_high: p(ci_high) },
            m => m,
        };
        UltraNormValue { value: p(self.value), mode }
    }
}

/// Relative comparison that treats equal infinities and exact zeros as equal.
pub fn approx_eq(a: f64, b: f64, rel_tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    libm::fabs(a - b) <= rel_tol * libm::fmax(libm::fabs(a), libm::fabs(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Negligible,
    ModerateNotNegligible,
    /// Finite norm; whether it vanishes is not settled.
    Moderate,
    Unbounded,
    Inconclusive,
}

impl Classification {
    pub fn from_norm(v: &UltraNormValue) -> Self {
        match v.mode {
            NormMode::Inconclusive => Classification::Inconclusive,
            NormMode::Exact if v.value == 0.0 => Classification::Negligible,
            _ if v.value.is_infinite() => Classification::Unbounded,
            NormMode::Exact => Classification::ModerateNotNegligible,
            NormMode::Estimated { .. } => Classification::Moderate,
        }
    }

    pub fn is_moderate(&self) -> Option<bool> {
        match self {
            Classification::Unbounded => Some(false),
            Classification::Inconclusive => None,
            _ => Some(true),
        }
    }

    pub fn is_negligible(&self) -> Option<bool> {
        match self {
            Classification::Negligible => Some(true),
            Classification::ModerateNotNegligible | Classification::Unbounded => Some(false),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::Negligible => "negligible",
            Classification::ModerateNotNegligible => "moderate-not-negligible",
            Classification::Moderate => "moderate",
            Classification::Unbounded => "unbounded",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

/// A seminorm on some carrier `E`.
#[derive(Clone)]
pub struct Seminorm<E: ?Sized> {
    name: String,
    apply: Arc<dyn Fn(&E) -> f64 + Send + Sync>,
    submult_constant: Option<f64>,
}

impl<E: ?Sized> core::fmt::Debug for Seminorm<E> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Seminorm({})", self.name)
    }
}

impl<E: ?Sized> Seminorm<E> {
    pub fn new<F>(name: impl Into<String>, submult_constant: Option<f64>, apply: F) -> Self
    where
        F: Fn(&E) -> f64 + Send + Sync + 'static,
    {
        Seminorm { name: name.into(), apply: Arc::new(apply), submult_constant }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, x: &E) -> f64 {
        (self.apply)(x)
    }

    pub fn submult_constant(&self) -> Option<f64> {
        self.submult_constant
    }
}

impl Seminorm<Complex64> {
    pub fn abs() -> Self {
        Seminorm::new("abs", Some(1.0), |z: &Complex64| z.norm())
    }
}

/// Something whose `log p(f_n)` can be evaluated; `-∞` for a zero value and
/// `NaN` when evaluation fails.
pub trait Sequence {
    fn ln_abs(&self, n: u64) -> f64;

    fn domain_start(&self) -> u64 {
        1
    }
}

impl Sequence for SymbolicSeq {
    fn ln_abs(&self, n: u64) -> f64 {
        SymbolicSeq::ln_abs(self, n)
    }

    fn domain_start(&self) -> u64 {
        SymbolicSeq::domain_start(self)
    }
}

impl Sequence for GrowthClass {
    fn ln_abs(&self, n: u64) -> f64 {
        GrowthClass::ln_abs(self, n)
    }

    fn domain_start(&self) -> u64 {
        GrowthClass::domain_start(self)
    }
}

/// A complex sequence given by a closure.
pub struct FnSeq<F>(pub F);

impl<F: Fn(u64) -> Complex64> Sequence for FnSeq<F> {
    fn ln_abs(&self, n: u64) -> f64 {
        let v = (self.0)(n);
        if v.is_nan() {
            f64::NAN
        } else {
            libm::log(v.norm())
        }
    }
}

/// A sequence given directly by `n ↦ log p(f_n)`, for values beyond `f64`.
pub struct LnSeq<F>(pub F, pub u64);

impl<F: Fn(u64) -> f64> Sequence for LnSeq<F> {
    fn ln_abs(&self, n: u64) -> f64 {
        (self.0)(n)
    }

    fn domain_start(&self) -> u64 {
        self.1
    }
}

/// Norm of a single class on a symbolic scale. `None` when the scale has no
/// closed form that decides it.
fn class_norm(g: &GrowthClass, r: &Scale) -> Option<f64> {
    if g.precision() == Precision::Unknown {
        return None;
    }
    if r.egorov_index().is_some() {
        return Some(1.0);
    }
    let exps = g.exps();
    let Some((top, coef)) = exps.top() else {
        return Some(1.0);
    };
    if let Some(br) = r.basis() {
        return Some(match top.cmp(&br) {
            Ordering::Greater => {
                if coef > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Ordering::Equal => libm::exp(r.factor() * coef),
            Ordering::Less => 1.0,
        });
    }
    // custom scale: decidable only for log-type exponents with known L
    let only_logs = exps.terms().iter().all(|(b, _)| *b == Basis::LOG || *b == Basis::LogLog);
    match (r.l(), only_logs) {
        (Limit::Finite(l), true) => Some(libm::exp(exps.coef(Basis::LOG) * l)),
        (Limit::Infinite, true) if exps.coef(Basis::LOG) != 0.0 => {
            Some(if exps.coef(Basis::LOG) > 0.0 { f64::INFINITY } else { 0.0 })
        }
        _ => None,
    }
}

/// Exact `‖f‖_{|·|,r}` for a symbolic sequence.
pub fn norm_exact(f: &SymbolicSeq, r: &Scale) -> Result<UltraNormValue> {
    if f.possible_cancellation() {
        return Err(Error::AmbiguousDominance);
    }
    let mut best = 0.0_f64;
    for t in f.terms() {
        match class_norm(t, r) {
            Some(v) => best = best.max(v),
            None => return Ok(UltraNormValue::inconclusive()),
        }
    }
    Ok(UltraNormValue::exact(best))
}

/// Exact norm after merging like terms, so that `f - f` has norm zero.
pub fn norm_collected(f: &SymbolicSeq, r: &Scale) -> Result<UltraNormValue> {
    norm_exact(&f.collect_like_terms(), r)
}

pub fn classify(f: &SymbolicSeq, r: &Scale) -> Classification {
    match norm_collected(f, r) {
        Ok(v) => Classification::from_norm(&v),
        Err(_) => Classification::Inconclusive,
    }
}

/// `‖f - g‖` for symbolic sequences.
pub fn distance(f: &SymbolicSeq, g: &SymbolicSeq, r: &Scale) -> Result<UltraNormValue> {
    norm_collected(&f.sub(g), r)
}

/// `‖f - g‖` for sequences known only pointwise.
pub fn distance_numeric<F, G>(f: F, g: G, r: &Scale, ladder: &IndexLadder, cfg: &EstimatorConfig) -> UltraNormValue
where
    F: Fn(u64) -> Complex64,
    G: Fn(u64) -> Complex64,
{
    norm_estimate_with(&FnSeq(|n| f(n) - g(n)), r, ladder, cfg).value
}

/// `Some(C)` when `s_n / r_n → C ∈ (0, ∞)` in closed form.
pub fn equivalent_scales(s: &Scale, r: &Scale) -> Option<f64> {
    match ratio_limit(s, r) {
        Limit::Finite(c) if c > 0.0 => Some(c),
        _ => None,
    }
}

/// `‖f‖_s = ‖f‖_r^C` for `s ~ C·r`.
pub fn scale_power_law(f: &SymbolicSeq, r: &Scale, s: &Scale, c: f64) -> Result<Verdict> {
    match equivalent_scales(s, r) {
        Some(c0) if approx_eq(c0, c, 1e-12) => {}
        _ => return Err(Error::PreconditionFailed(format!("s_n / r_n does not tend to {c}"))),
    }
    let ns = norm_collected(f, s)?;
    let nr = norm_collected(f, r)?;
    if ns.is_inconclusive() || nr.is_inconclusive() {
        return Ok(Verdict::inconclusive("norm not decidable in closed form"));
    }
    let rhs = nr.powf(c).value;
    Ok(if approx_eq(ns.value, rhs, 1e-9) {
        Verdict::Holds
    } else {
        Verdict::Fails(Witness { index: None, values: alloc::vec![ns.value, rhs], detail: "‖f‖_s ≠ ‖f‖_r^C".into() })
    })
}

/// `‖λ f‖` for shrinking `λ`: the norm does not move, so scalar
/// multiplication is not continuous at `λ = 0`.
pub fn scalar_continuity_demo(f: &SymbolicSeq, r: &Scale, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
    lambdas
        .iter()
        .map(|&l| Ok((l, norm_collected(&f.scale_by(Complex64::new(l, 0.0)), r)?.value)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Number of tail ladder points per window.
    pub window: usize,
    /// Largest disagreement between window limits, in log space.
    pub tol: f64,
    /// Smallest confidence half-width, relative, in log space.
    pub min_halfwidth: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig { window: 6, tol: 0.05, min_halfwidth: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    pub ln_p: f64,
    pub powered: f64,
}

impl TraceRow {
    pub fn p_value(&self) -> f64 {
        libm::exp(self.ln_p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: UltraNormValue,
    pub trace: Vec<TraceRow>,
    pub note: String,
}

pub fn norm_estimate(f: &dyn Sequence, r: &Scale, ladder: &IndexLadder) -> UltraNormValue {
    norm_estimate_with(f, r, ladder, &EstimatorConfig::default()).value
}

/// Numeric limsup of `p(f_n)^{r_n}` along the ladder.
///
/// `y_n = r_n log p(f_n)` is fitted on tail windows by least squares in the
/// columns `1, r_n, r_n log n, r_n log log n` and each fit is extrapolated
/// with the known limits of those columns. Three shifted windows give the
/// spread for the confidence interval, which is widened by that spread once
/// more on each side.
pub fn norm_estimate_with(f: &dyn Sequence, r: &Scale, ladder: &IndexLadder, cfg: &EstimatorConfig) -> NormEstimate {
    let start = f.domain_start().max(r.domain_start()).max(3);
    let ladder = ladder.clamp_start(start);
    let mut trace = Vec::with_capacity(ladder.len());
    let mut ys = Vec::with_capacity(ladder.len());
    for n in ladder.iter() {
        let ln_p = f.ln_abs(n);
        let rn = r.eval(n);
        let y = if ln_p == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else if rn == 0.0 && !ln_p.is_nan() {
            0.0
        } else {
            rn * ln_p
        };
        trace.push(TraceRow { n, ln_p, powered: libm::exp(y) });
        ys.push(y);
    }
    let done = |value, note: &str, trace| NormEstimate { value, trace, note: note.into() };
    if let Some(row) = trace.iter().find(|t| t.ln_p.is_nan() || (t.ln_p == f64::INFINITY)) {
        let note = format!("evaluation failed at n = {}", row.n);
        return NormEstimate { value: UltraNormValue::inconclusive(), trace, note };
    }
    let w = cfg.window.max(3);
    if ys.len() < w {
        return done(UltraNormValue::inconclusive(), "ladder too short", trace);
    }
    let tail = &ys[ys.len() - w..];
    let tail_rows = &trace[trace.len() - w..];

    if tail.iter().all(|y| *y == f64::NEG_INFINITY) {
        return done(UltraNormValue::estimated(0.0, 0.0, 0.0), "eventually zero", trace);
    }
    let decreasing = tail.windows(2).all(|p| p[1] < p[0]);
    let last_step = tail[w - 1] - tail[w - 2];
    if decreasing && tail_rows.iter().all(|t| t.powered < 1e-3) && last_step < -1e-3 {
        let hi = tail_rows.iter().map(|t| t.powered).fold(0.0, f64::max);
        return done(UltraNormValue::estimated(0.0, 0.0, hi), "tail powered values vanish", trace);
    }
    let increasing = tail.windows(2).all(|p| p[1] > p[0]);
    let steps_hold = tail.windows(3).all(|p| p[2] - p[1] >= 0.5 * (p[1] - p[0]));
    if increasing && steps_hold && tail[w - 1] > libm::log(1e6) {
        let lo = libm::exp(tail[w - 1]);
        return done(UltraNormValue::estimated(f64::INFINITY, lo, f64::INFINITY), "tail diverges", trace);
    }

    let l = r.l();
    let mut limits = Vec::new();
    let mut resid = 0.0_f64;
    for shift in 0..3 {
        if ys.len() < w + shift {
            break;
        }
        let end = ys.len() - shift;
        let rows: Vec<(u64, f64)> =
            (end - w..end).filter(|&i| ys[i].is_finite()).map(|i| (trace[i].n, ys[i])).collect();
        if rows.len() < 3 {
            return done(UltraNormValue::inconclusive(), "too few nonzero tail values", trace);
        }
        let (lim, rms) = extrapolate(&rows, r, l);
        limits.push(lim);
        resid = resid.max(rms);
    }
    let lo = limits.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = limits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo <= cfg.tol) {
        return done(UltraNormValue::inconclusive(), "tail windows disagree", trace);
    }
    // the window limits may still drift; allow one more spread beyond them
    let hw = (3.0 * resid + (hi - lo)).max(cfg.min_halfwidth * hi.abs().max(1.0));
    let value = UltraNormValue::estimated(libm::exp(hi), libm::exp(lo - hw), libm::exp(hi + hw));
    done(value, "extrapolated tail fit", trace)
}

/// Least-squares fit of `y` against the scale columns; returns the
/// extrapolated limit and the residual rms.
fn extrapolate(rows: &[(u64, f64)], r: &Scale, l: Limit) -> (f64, f64) {
    let finite_l = match l {
        Limit::Finite(v) => Some(v),
        _ => None,
    };
    // (column values, limit of the column)
    let mut cols: Vec<(Vec<f64>, f64)> = Vec::new();
    cols.push((rows.iter().map(|_| 1.0).collect(), 1.0));
    cols.push((rows.iter().map(|&(n, _)| r.eval(n)).collect(), 0.0));
    if let Some(lv) = finite_l {
        cols.push((rows.iter().map(|&(n, _)| r.eval(n) * libm::log(n as f64)).collect(), lv));
        cols.push((rows.iter().map(|&(n, _)| r.eval(n) * libm::log(libm::log(n as f64))).collect(), 0.0));
    }
    let y: Vec<f64> = rows.iter().map(|&(_, y)| y).collect();
    let (beta, kept, rms) = least_squares(&cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>(), &y);
    let lim = kept.iter().zip(&beta).map(|(&j, b)| b * cols[j].1).sum();
    (lim, rms)
}

/// Modified Gram–Schmidt least squares, dropping columns that are (nearly)
/// dependent on earlier ones. Returns coefficients, indices of kept columns,
/// and residual rms.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<usize>, f64) {
    let m = y.len();
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut rmat: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        if q.len() + 1 >= m {
            break;
        }
        let norm0 = libm::sqrt(c.iter().map(|v| v * v).sum::<f64>());
        if norm0 == 0.0 {
            continue;
        }
        let mut v = c.clone();
        let mut coeffs = Vec::with_capacity(q.len());
        for qi in &q {
            let d: f64 = qi.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vk, qk) in v.iter_mut().zip(qi) {
                *vk -= d * qk;
            }
            coeffs.push(d);
        }
        let nv = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if nv <= 1e-9 * norm0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        coeffs.push(nv);
        q.push(v);
        rmat.push(coeffs);
        kept.push(j);
    }
    let k = q.len();
    let qty: Vec<f64> = q.iter().map(|qi| qi.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut beta = alloc::vec![0.0; k];
    for i in (0..k).rev() {
        // rmat[j][i] holds R[i][j]
        let s: f64 = (i + 1..k).map(|j| rmat[j][i] * beta[j]).sum();
        beta[i] = (qty[i] - s) / rmat[i][i];
    }
    let mut sq = 0.0;
    for row in 0..m {
        let fit: f64 = kept.iter().zip(&beta).map(|(&j, b)| b * cols[j][row]).sum();
        sq += (y[row] - fit) * (y[row] - fit);
    }
    (beta, kept, libm::sqrt(sq / m as f64))
}

/// Estimated classification for a sequence known only pointwise.
pub fn classify_estimate(f: &dyn Sequence, r: &Scale, ladder: &IndexLadder) -> Classification {
    Classification::from_norm(&norm_estimate(f, r, ladder))
}

/// A sequence of sequences `m ↦ (f^m_n)_n` with values in `ℂ`.
pub trait SequenceFamily {
    fn value(&self, m: u32, n: u64) -> Complex64;

    /// `f^a_n - f^b_n`; override when the plain subtraction loses precision.
    fn diff(&self, a: u32, b: u32, n: u64) -> Complex64 {
        self.value(a, n) - self.value(b, n)
    }

    /// Exact `f^a - f^b` when the family is symbolic.
    fn exact_diff(&self, _a: u32, _b: u32) -> Option<SymbolicSeq> {
        None
    }
}

/// Budget for the finite diagonal construction.
#[derive(Debug, Clone)]
pub struct DiagonalBudget {
    pub ladder: IndexLadder,
    /// Family members `1..=members` are examined.
    pub members: u32,
    /// Levels `μ = 1..=levels`.
    pub levels: usize,
}

impl Default for DiagonalBudget {
    fn default() -> Self {
        DiagonalBudget { ladder: IndexLadder::default(), members: 256, levels: 8 }
    }
}

/// The diagonal sequence `f̄_n = f^{m_{μ̄(n)}}_n` of a Cauchy family.
pub struct DiagonalLimit {
    family: Arc<dyn SequenceFamily + Send + Sync>,
    /// `m_μ` for `μ = 1..`
    pub m_mu: Vec<u32>,
    /// `n_μ` for `μ = 1..`
    pub n_mu: Vec<u64>,
    /// Largest budget distance from `f̄` to members `m ≥ m_μ`, per level.
    pub tail_distance: Vec<f64>,
    /// Exact distances `‖f^{m_μ} - f^{budget}‖` when the family is symbolic.
    pub exact_tail: Vec<Option<f64>>,
}

impl core::fmt::Debug for DiagonalLimit {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DiagonalLimit")
            .field("m_mu", &self.m_mu)
            .field("n_mu", &self.n_mu)
            .field("tail_distance", &self.tail_distance)
            .finish()
    }
}

impl DiagonalLimit {
    fn member_for(&self, n: u64) -> u32 {
        let level = self.n_mu.iter().take_while(|&&nm| nm <= n).count();
        self.m_mu[level.max(1) - 1]
    }

    pub fn value(&self, n: u64) -> Complex64 {
        self.family.value(self.member_for(n), n)
    }

    /// `f̄_n - f^m_n`.
    pub fn diff_to(&self, m: u32, n: u64) -> Complex64 {
        self.family.diff(self.member_for(n), m, n)
    }

    pub fn as_fn(&self) -> impl Fn(u64) -> Complex64 + '_ {
        move |n| self.value(n)
    }
}

/// `p(z)^{r_n}` with `0^{r} = 0`.
fn powered(p: f64, rn: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else if rn == 0.0 {
        1.0
    } else {
        libm::pow(p, rn)
    }
}

/// Diagonal limit of a family that is Cauchy on the budget: for level `μ`,
/// members beyond `m_μ` are within `2^{-μ}` of each other in every listed
/// seminorm (the last one repeats), measured as the largest
/// `p(f^a_n - f^b_n)^{r_n}` over ladder indices.
pub fn diagonal_limit(
    family: Arc<dyn SequenceFamily + Send + Sync>,
    seminorms: &[Seminorm<Complex64>],
    r: &Scale,
    budget: &DiagonalBudget,
) -> Result<DiagonalLimit> {
    if seminorms.is_empty() {
        return Err(Error::InvalidParameter("need at least one seminorm".into()));
    }
    let ladder = budget.ladder.clamp_start(r.domain_start());
    if ladder.len() < budget.levels {
        return Err(Error::InvalidParameter("ladder shorter than the number of levels".into()));
    }
    let mm = budget.members as usize;
    let p_of = |mu: usize| &seminorms[(mu - 1).min(seminorms.len() - 1)];
    let rs: Vec<f64> = ladder.iter().map(|n| r.eval(n)).collect();

    let mut m_mu = Vec::with_capacity(budget.levels);
    for mu in 1..=budget.levels {
        let p = p_of(mu);
        let bound = libm::ldexp(1.0, -(mu as i32));
        // suffix[a] = largest pairwise distance among members a..=mm
        let mut suffix = alloc::vec![0.0_f64; mm + 2];
        for a in (1..=mm).rev() {
            let mut worst = suffix[a + 1];
            for b in a + 1..=mm {
                for (n, &rn) in ladder.iter().zip(&rs) {
                    let d = powered(p.apply(&family.diff(a as u32, b as u32, n)), rn);
                    worst = worst.max(d);
                }
            }
            suffix[a] = worst;
        }
        let first = (1..=mm).find(|&a| suffix[a] < bound).unwrap_or(mm + 1);
        if first > mm / 2 {
            return Err(Error::NotCauchy {
                mu,
                detail: format!("members beyond {} still differ by {} ≥ 2^-{mu}", mm / 2, suffix[mm / 2]),
            });
        }
        let prev = m_mu.last().copied().unwrap_or(1);
        m_mu.push((first as u32).max(prev));
    }
    let n_mu: Vec<u64> = (0..budget.levels).map(|i| ladder.indices()[i]).collect();
    let mut lim = DiagonalLimit { family: family.clone(), m_mu, n_mu, tail_distance: Vec::new(), exact_tail: Vec::new() };

    for mu in 1..=budget.levels {
        let p = p_of(mu);
        let mut worst = 0.0_f64;
        for m in lim.m_mu[mu - 1]..=budget.members {
            for (n, &rn) in ladder.iter().zip(&rs) {
                if n < lim.n_mu[mu - 1] {
                    continue;
                }
                worst = worst.max(powered(p.apply(&lim.diff_to(m, n)), rn));
            }
        }
        lim.tail_distance.push(worst);
        let exact = family
            .exact_diff(lim.m_mu[mu - 1], budget.members)
            .and_then(|d| norm_collected(&d, r).ok())
            .filter(|v| v.is_exact())
            .map(|v| v.value);
        lim.exact_tail.push(exact);
    }
    Ok(lim)
}

/// Ultrametric check used by property tests.
pub fn ultrametric_holds(dfh: f64, dfg: f64, dgh: f64) -> bool {
    dfh <= dfg.max(dgh) * (1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::Phase;
    use crate::basis::ExpVec;
    use approx::assert_relative_eq;

    fn numeric_limsup_oracle(ln_f: impl Fn(f64) -> f64, r: impl Fn(f64) -> f64, far: f64) -> f64 {
        // direct powered values near `far`; take the max
        [far, 0.9 * far, 0.8 * far].iter().map(|&n| libm::exp(r(n) * ln_f(n))).fold(0.0, f64::max)
    }

    #[test]
    fn norm_exact_examples() {
        let log = Scale::log();
        let n2 = SymbolicSeq::from(GrowthClass::power(2.0));
        let v = norm_exact(&n2, &log).unwrap();
        assert!(v.is_exact());
        assert_relative_eq!(v.value, libm::exp(2.0), max_relative = 1e-15);
        let oracle = numeric_limsup_oracle(|n| 2.0 * libm::log(n), |n| 1.0 / libm::log(n), 1e6);
        assert_relative_eq!(v.value, oracle, max_relative = 1e-3);

        let five = SymbolicSeq::from(GrowthClass::real(5.0).unwrap());
        for r in [Scale::log(), Scale::power(2.0).unwrap(), Scale::egorov_row(3)] {
            assert_eq!(norm_exact(&five, &r).unwrap().value, 1.0);
        }

        let p2 = Scale::power(2.0).unwrap();
        let n7 = SymbolicSeq::from(GrowthClass::power(7.0));
        assert_eq!(norm_exact(&n7, &p2).unwrap().value, 1.0);
        let oracle = numeric_limsup_oracle(|n| 7.0 * libm::log(n), |n| 1.0 / libm::sqrt(n), 1e12);
        assert_relative_eq!(oracle, 1.0, max_relative = 1e-3);

        let er = SymbolicSeq::from(GrowthClass::e_r(&log, 1.0).unwrap());
        assert_relative_eq!(norm_exact(&er, &log).unwrap().value, core::f64::consts::E, max_relative = 1e-15);
    }

    #[test]
    fn cancellation_is_rejected_unless_collected() {
        let f = SymbolicSeq::from(GrowthClass::power(1.0));
        let z = f.sub(&f);
        assert_eq!(norm_exact(&z, &Scale::log()), Err(Error::AmbiguousDominance));
        assert_eq!(norm_collected(&z, &Scale::log()).unwrap().value, 0.0);
    }

    #[test]
    fn classify_examples() {
        let log = Scale::log();
        assert_eq!(classify(&GrowthClass::power(5.0).into(), &log), Classification::ModerateNotNegligible);
        let neg = GrowthClass::one().with_exps(ExpVec::single(Basis::LogPow(2.0), -1.0));
        assert_eq!(classify(&neg.into(), &log), Classification::Negligible);
        let en = GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(1.0), 1.0));
        assert_eq!(classify(&en.into(), &log), Classification::Unbounded);
    }

    #[test]
    fn distance_examples() {
        let log = Scale::log();
        let f: SymbolicSeq = GrowthClass::power(2.0).into();
        let g: SymbolicSeq = GrowthClass::power(1.0).into();
        assert_eq!(distance(&f, &f, &log).unwrap().value, 0.0);
        assert_relative_eq!(distance(&f, &g, &log).unwrap().value, libm::exp(2.0), max_relative = 1e-15);
    }

    #[test]
    fn estimate_examples() {
        let log = Scale::log();
        let ladder = IndexLadder::default();
        let n2 = SymbolicSeq::from(GrowthClass::power(2.0));
        let v = norm_estimate(&n2, &log, &ladder);
        assert!(v.value >= 7.0 && v.value <= 7.8, "{v:?}");
        assert!(v.contains(libm::exp(2.0), 0.0));

        let vanish = LnSeq(|n: u64| -libm::log(n as f64) * libm::log(n as f64), 2);
        let v = norm_estimate(&vanish, &log, &ladder);
        assert_eq!(v.value, 0.0);

        let osc = FnSeq(|n: u64| Complex64::new(2.0 + if n.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0));
        let v = norm_estimate(&osc, &log, &ladder);
        assert!(v.contains(1.0, 0.0), "{v:?}");

        let broken = LnSeq(|n: u64| if n > 1000 { f64::NAN } else { 0.0 }, 1);
        assert!(norm_estimate(&broken, &log, &ladder).is_inconclusive());
    }

    #[test]
    fn estimate_extrapolates_slow_power_scale() {
        // n^3 · e^(1/r) on r = n^(-1/2): the tail max is still far from e
        let r = Scale::power(2.0).unwrap();
        let f = GrowthClass::from_fields(0.5, 1.0, 3.0, -1.0, Phase::Positive, &r).unwrap();
        let est = norm_estimate(&f, &r, &IndexLadder::default());
        assert!(est.contains(core::f64::consts::E, 0.0), "{est:?}");
    }

    #[test]
    fn power_law_examples() {
        let r = Scale::log();
        let s2 = r.scaled(2.0).unwrap();
        let n: SymbolicSeq = GrowthClass::power(1.0).into();
        assert!(scale_power_law(&n, &r, &s2, 2.0).unwrap().holds());
        assert_relative_eq!(norm_exact(&n, &s2).unwrap().value, libm::exp(2.0), max_relative = 1e-15);
        let one: SymbolicSeq = GrowthClass::real(4.0).unwrap().into();
        assert!(scale_power_law(&one, &r, &s2, 2.0).unwrap().holds());
        let er: SymbolicSeq = GrowthClass::e_r(&r, 1.0).unwrap().into();
        let s3 = r.scaled(3.0).unwrap();
        assert!(scale_power_law(&er, &r, &s3, 3.0).unwrap().holds());
        let p = Scale::power(1.0).unwrap();
        assert!(matches!(scale_power_law(&n, &r, &p, 2.0), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn scalar_multiplication_does_not_shrink_norm() {
        let f: SymbolicSeq = GrowthClass::power(1.0).into();
        let demo = scalar_continuity_demo(&f, &Scale::log(), &[1.0, 1e-3, 1e-9]).unwrap();
        for (_, v) in demo {
            assert_relative_eq!(v, core::f64::consts::E, max_relative = 1e-12);
        }
    }

    struct Constant;
    impl SequenceFamily for Constant {
        fn value(&self, _m: u32, n: u64) -> Complex64 {
            Complex64::new(n as f64, 0.0)
        }
    }

    #[test]
    fn diagonal_of_constant_family_is_the_constant() {
        let budget = DiagonalBudget { members: 16, ..Default::default() };
        let d = diagonal_limit(Arc::new(Constant), &[Seminorm::abs()], &Scale::log(), &budget).unwrap();
        for n in [2u64, 100, 1 << 20] {
            assert_eq!(d.value(n), Complex64::new(n as f64, 0.0));
        }
        assert!(d.tail_distance.iter().all(|&t| t == 0.0));
    }

    struct Diverging;
    impl SequenceFamily for Diverging {
        fn value(&self, m: u32, _n: u64) -> Complex64 {
            Complex64::new(m as f64, 0.0)
        }
    }

    #[test]
    fn non_cauchy_family_is_reported() {
        let budget = DiagonalBudget { members: 16, ..Default::default() };
        let e = diagonal_limit(Arc::new(Diverging), &[Seminorm::abs()], &Scale::log(), &budget).unwrap_err();
        assert!(matches!(e, Error::NotCauchy { mu: 1, .. }));
    }
}
