//! Extending maps to the generalized algebras.
//!
//! A map `φ` extends to the quotient when its growth is controlled by a
//! moderate gauge `g` (so moderate inputs stay moderate) and its increments by
//! `g₂(p(f)) · h(p(k))` with `h` compatible (so negligible perturbations stay
//! negligible). All universally quantified conditions are checked on a finite
//! probe corpus; a `Holds` means "holds on the corpus".

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;

use crate::basis::{Basis, ExpVec};
use crate::gnum::GenNumber;
use crate::growth::{GrowthClass, Precision, SymbolicSeq};
use crate::scales::{Direction, Scale, ScaleFamily};
use crate::torus::TorusGF;
use crate::ultranorm::{self, Classification, UltraNormValue};
use crate::verdict::{Verdict, Witness};
use crate::{Error, Result};

/// Rows searched on each side of a quantifier.
pub const M_MAX: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeTag {
    Power(f64),
    Exp,
    Log1p,
    Identity,
    /// `a·x + b`
    Affine(f64, f64),
}

/// An increasing map `ℝ₊ → ℝ₊`.
#[derive(Clone)]
pub enum GaugeFn {
    Tagged(GaugeTag),
    Sum(Box<GaugeFn>, Box<GaugeFn>),
    Product(Box<GaugeFn>, Box<GaugeFn>),
    /// `outer ∘ inner`
    Compose(Box<GaugeFn>, Box<GaugeFn>),
    Scale(f64, Box<GaugeFn>),
    Custom { name: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for GaugeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl GaugeFn {
    pub fn power(k: f64) -> Self {
        GaugeFn::Tagged(GaugeTag::Power(k))
    }

    pub fn exp() -> Self {
        GaugeFn::Tagged(GaugeTag::Exp)
    }

    pub fn log1p() -> Self {
        GaugeFn::Tagged(GaugeTag::Log1p)
    }

    pub fn identity() -> Self {
        GaugeFn::Tagged(GaugeTag::Identity)
    }

    pub fn affine(a: f64, b: f64) -> Self {
        GaugeFn::Tagged(GaugeTag::Affine(a, b))
    }

    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        GaugeFn::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn plus(self, other: GaugeFn) -> Self {
        GaugeFn::Sum(Box::new(self), Box::new(other))
    }

    pub fn times(self, other: GaugeFn) -> Self {
        GaugeFn::Product(Box::new(self), Box::new(other))
    }

    /// `self ∘ inner`.
    pub fn after(self, inner: GaugeFn) -> Self {
        GaugeFn::Compose(Box::new(self), Box::new(inner))
    }

    pub fn scaled(self, c: f64) -> Self {
        GaugeFn::Scale(c, Box::new(self))
    }

    pub fn symbolic_tag(&self) -> Option<GaugeTag> {
        match self {
            GaugeFn::Tagged(t) => Some(*t),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GaugeFn::Tagged(GaugeTag::Power(k)) => format!("x^{k}"),
            GaugeFn::Tagged(GaugeTag::Exp) => "exp(x)".into(),
            GaugeFn::Tagged(GaugeTag::Log1p) => "log(1+x)".into(),
            GaugeFn::Tagged(GaugeTag::Identity) => "x".into(),
            GaugeFn::Tagged(GaugeTag::Affine(a, b)) => format!("{a}x+{b}"),
            GaugeFn::Sum(a, b) => format!("({} + {})", a.name(), b.name()),
            GaugeFn::Product(a, b) => format!("({} · {})", a.name(), b.name()),
            GaugeFn::Compose(a, b) => format!("{}∘{}", a.name(), b.name()),
            GaugeFn::Scale(c, a) => format!("{c}·{}", a.name()),
            GaugeFn::Custom { name, .. } => name.clone(),
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            GaugeFn::Tagged(t) => match *t {
                GaugeTag::Power(k) => libm::pow(x, k),
                GaugeTag::Exp => libm::exp(x),
                GaugeTag::Log1p => libm::log1p(x),
                GaugeTag::Identity => x,
                GaugeTag::Affine(a, b) => a * x + b,
            },
            GaugeFn::Sum(a, b) => a.apply(x) + b.apply(x),
            GaugeFn::Product(a, b) => a.apply(x) * b.apply(x),
            GaugeFn::Compose(a, b) => a.apply(b.apply(x)),
            GaugeFn::Scale(c, a) => c * a.apply(x),
            GaugeFn::Custom { f, .. } => f(x),
        }
    }

    /// Non-decreasing and nonnegative on a log-spaced grid over `[1e-12, 1e6]`.
    pub fn check_monotone(&self) -> Verdict {
        let mut prev = (0.0, f64::NEG_INFINITY);
        for i in -120..=60 {
            let x = libm::pow(10.0, i as f64 / 10.0);
            let y = self.apply(x);
            if !(y >= 0.0) || y < prev.1 {
                return Verdict::Fails(Witness {
                    index: None,
                    values: alloc::vec![prev.0, x, prev.1, y],
                    detail: format!("{} is not increasing near x = {x}", self.name()),
                });
            }
            prev = (x, y);
        }
        Verdict::Holds
    }

    /// `g(|f_n|)` as a growth class, when the image stays representable.
    pub fn apply_class(&self, f: &GrowthClass) -> Option<GrowthClass> {
        let f = f.abs();
        match self {
            GaugeFn::Tagged(t) => tagged_class(*t, &f),
            GaugeFn::Sum(a, b) => Some(dominant(a.apply_class(&f)?, b.apply_class(&f)?)),
            GaugeFn::Product(a, b) => Some(a.apply_class(&f)?.mul(&b.apply_class(&f)?)),
            GaugeFn::Compose(a, b) => a.apply_class(&b.apply_class(&f)?),
            GaugeFn::Scale(c, a) if *c > 0.0 => a.apply_class(&f)?.scale_by(Complex64::new(*c, 0.0)),
            _ => None,
        }
    }
}

fn coarsen(p: Precision) -> Precision {
    p.max(Precision::BoundedRatio)
}

/// Larger of two positive classes; their sum is within a factor 2 of it.
fn dominant(a: GrowthClass, b: GrowthClass) -> GrowthClass {
    if a.precision() == Precision::Exact && b.precision() == Precision::Exact && a.is_like(&b) {
        return a.clone().with_coef(a.coef() + b.coef());
    }
    let worst = a.precision().max(b.precision());
    let top = if a.cmp_dominance(&b) == Ordering::Less { b } else { a };
    top.with_precision(if worst == Precision::Unknown { Precision::Unknown } else { coarsen(worst) })
}

fn constant(c: f64, precision: Precision) -> Option<GrowthClass> {
    GrowthClass::real(c).ok().map(|g| g.with_precision(precision))
}

/// `e^E` as a single basis function, for single-term `E`.
fn exp_of(e: &ExpVec) -> Option<(Basis, f64)> {
    match e.terms() {
        [(b, c)] => match (*b, *c) {
            (Basis::LogLog, c) => Some((Basis::LogPow(c), 1.0)),
            (Basis::LogPow(p), c) if p == 1.0 => Some((Basis::Pow(c), 1.0)),
            (Basis::Pow(a), c) if a == 1.0 && c == 1.0 => Some((Basis::ExpIter(1), 1.0)),
            (Basis::ExpIter(k), c) if c == 1.0 => Some((Basis::ExpIter(k + 1), 1.0)),
            _ => None,
        },
        _ => None,
    }
}

fn tagged_class(t: GaugeTag, f: &GrowthClass) -> Option<GrowthClass> {
    let size = f.exps().sign_at_infinity();
    let c = f.coef().norm();
    let p = f.precision();
    if p == Precision::Unknown {
        return None;
    }
    match t {
        GaugeTag::Identity => Some(f.clone()),
        GaugeTag::Power(k) if k > 0.0 => Some(f.abs_pow(k)),
        GaugeTag::Power(_) => None,
        GaugeTag::Affine(a, b) if a > 0.0 && b == 0.0 => f.scale_by(Complex64::new(a, 0.0)),
        GaugeTag::Affine(a, b) if a >= 0.0 && b > 0.0 => match size {
            _ if a == 0.0 => constant(b, Precision::Exact),
            Ordering::Greater => f.scale_by(Complex64::new(a, 0.0)).map(|g| g.with_precision(coarsen(p))),
            Ordering::Less => constant(b, coarsen(p)),
            Ordering::Equal => constant(a * c + b, p),
        },
        GaugeTag::Affine(..) => None,
        GaugeTag::Exp => match size {
            Ordering::Less => constant(1.0, coarsen(p)),
            Ordering::Equal => constant(libm::exp(c), p),
            Ordering::Greater => {
                // log of the image is c·e^E
                let (basis, k) = exp_of(f.exps())?;
                let precision = if p == Precision::Exact { Precision::Exact } else { Precision::LogAsymptotic };
                Some(GrowthClass::one().with_exps(ExpVec::single(basis, c * k)).with_precision(precision))
            }
        },
        GaugeTag::Log1p => match size {
            Ordering::Less => Some(f.clone().with_precision(coarsen(p))),
            Ordering::Equal => constant(libm::log1p(c), p),
            Ordering::Greater => {
                // log(1 + |f|) ~ top term of log |f|
                let (basis, coef) = f.exps().top()?;
                let exps = basis.ln()?;
                GrowthClass::real(coef).ok().map(|g| g.with_exps(exps).with_precision(coarsen(p)))
            }
        },
    }
}

fn row_class(g: &GrowthClass, row: &Scale) -> Classification {
    ultranorm::classify(&SymbolicSeq::from(g.clone()), row)
}

/// `s·(1/r¹) + γ·log n` for `s, γ ∈ {-2, …, 2}`.
pub fn default_probes(family: &ScaleFamily) -> Vec<GrowthClass> {
    let recip = family.row(1).reciprocal();
    let mut out = Vec::new();
    for s in -2..=2 {
        for gamma in -2..=2 {
            let mut exps = ExpVec::single(Basis::LOG, gamma as f64);
            match &recip {
                Some(r) => exps = exps.add(&r.scale(s as f64)),
                None if s != 0 => continue,
                None => {}
            }
            out.push(GrowthClass::one().with_exps(exps));
        }
    }
    out
}

/// Rapidly decaying probes: `n^γ e^{-c (log n)²}` and `e^{-n^a}`.
pub fn default_negligible_probes() -> Vec<GrowthClass> {
    let mut out = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        for gamma in [-2.0, 0.0, 2.0] {
            out.push(GrowthClass::one().with_exps(ExpVec::from_terms([(Basis::LogPow(2.0), -c), (Basis::LOG, gamma)])));
        }
    }
    for a in [0.5, 1.0] {
        out.push(GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(a), -1.0)));
    }
    out
}

/// Which side of the quantifier pair ranges universally.
#[derive(Clone, Copy, PartialEq)]
enum Order {
    /// `∀ source ∃ target`
    SourceFirst,
    /// `∀ target ∃ source`
    TargetFirst,
}

/// Searches `∀u ≤ M_MAX ∃e ≤ M_MAX` with `image(probe ∈ class(source)) ∈ class(target)`.
fn quantifier_search(
    gauge: &GaugeFn,
    family: &ScaleFamily,
    probes: &[GrowthClass],
    order: Order,
    member: fn(&Classification) -> Option<bool>,
    what: &str,
) -> Verdict {
    let rows: Vec<Scale> = (1..=M_MAX).map(|m| family.row(m)).collect();
    let images: Vec<Option<GrowthClass>> = probes.iter().map(|p| gauge.apply_class(p)).collect();
    let in_row = |g: &GrowthClass, m: u32| member(&row_class(g, &rows[m as usize - 1]));
    let mut verdict = Verdict::Holds;
    for u in 1..=M_MAX {
        // per inner row: refuted by some probe, or undecided, or passed
        let mut all_refuted = true;
        let mut witness = None;
        let found = (1..=M_MAX).any(|e| {
            let (src, tgt) = if order == Order::SourceFirst { (u, e) } else { (e, u) };
            let mut refuted = None;
            let mut undecided = false;
            for (p, img) in probes.iter().zip(&images) {
                match in_row(p, src) {
                    Some(true) => {}
                    Some(false) => continue,
                    None => {
                        undecided = true;
                        continue;
                    }
                }
                match img.as_ref().and_then(|g| in_row(g, tgt)) {
                    Some(true) => {}
                    Some(false) => {
                        refuted.get_or_insert_with(|| (p.clone(), img.clone()));
                    }
                    None => undecided = true,
                }
            }
            match refuted {
                Some(w) => {
                    witness.get_or_insert(w);
                    false
                }
                None => {
                    all_refuted = false;
                    !undecided
                }
            }
        });
        if found {
            continue;
        }
        let universal = if order == Order::SourceFirst { "source" } else { "target" };
        verdict = verdict.and(match (all_refuted, witness) {
            (true, Some((p, img))) => Verdict::fail(format!(
                "{}: {universal} row {u}: probe {:?} maps to {:?}, not {what} at any searched row",
                gauge.name(),
                p.exps(),
                img.map(|g| g.exps().clone())
            )),
            _ => Verdict::inconclusive(format!("{}: {universal} row {u} undecided", gauge.name())),
        });
        if verdict.fails() {
            return verdict;
        }
    }
    verdict
}

/// `g(𝔽⁺_{r^m}) ⊂ 𝔽⁺_{r^M}` with `∀m∃M` for case II families and `∀M∃m` for case I.
pub fn is_r_moderate(g: &GaugeFn, family: &ScaleFamily, probes: &[GrowthClass]) -> Verdict {
    let order = match family.direction() {
        Direction::CaseII => Order::SourceFirst,
        Direction::CaseI => Order::TargetFirst,
    };
    quantifier_search(g, family, probes, order, Classification::is_moderate, "moderate")
}

/// `h(0⁺) = 0` and `h(𝒦⁺_{r^m}) ⊂ 𝒦⁺_{r^M}` with `∀M∃m` for case II families
/// and `∀m∃M` for case I.
pub fn is_r_compatible(h: &GaugeFn, family: &ScaleFamily, probes: &[GrowthClass]) -> Verdict {
    let at_zero: Vec<(u64, f64)> = (1..=24).map(|k| (k, h.apply(libm::pow(10.0, -(k as f64))))).collect();
    let vanishing = at_zero.windows(2).all(|w| w[1].1 <= w[0].1) && at_zero[23].1 < 1e-6;
    if !vanishing {
        return Verdict::Fails(Witness {
            index: None,
            values: at_zero.iter().map(|t| t.1).collect(),
            detail: format!("{} is not continuous at 0 with value 0", h.name()),
        });
    }
    let order = match family.direction() {
        Direction::CaseII => Order::TargetFirst,
        Direction::CaseI => Order::SourceFirst,
    };
    quantifier_search(h, family, probes, order, Classification::is_negligible, "negligible")
}

/// The element-wise map on `ℂ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Square,
    Linear(Complex64),
    Exp,
}

impl MapKind {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        match self {
            MapKind::Square => z * z,
            MapKind::Linear(c) => c * z,
            MapKind::Exp => z.exp(),
        }
    }
}

/// `q(φ(f)) ≤ g(p(f))` and `q(φ(f+k) − φ(f)) ≤ g₂(p(f)) · h(p(k))`, with
/// `p = q = |·|` on `ℂ`.
#[derive(Debug, Clone)]
pub struct TemperateMapSpec {
    pub phi: MapKind,
    pub g: GaugeFn,
    pub g2: GaugeFn,
    pub h: GaugeFn,
}

impl TemperateMapSpec {
    /// `|(f+k)² − f²| ≤ (2|f| + 1)(|k| + |k|²)`.
    pub fn square() -> Self {
        TemperateMapSpec {
            phi: MapKind::Square,
            g: GaugeFn::power(2.0),
            g2: GaugeFn::affine(2.0, 1.0),
            h: GaugeFn::identity().plus(GaugeFn::power(2.0)),
        }
    }

    pub fn linear(c: Complex64) -> Self {
        let a = c.norm();
        TemperateMapSpec { phi: MapKind::Linear(c), g: GaugeFn::affine(a, 0.0), g2: GaugeFn::affine(0.0, 1.0), h: GaugeFn::affine(a, 0.0) }
    }

    /// `|e^{f+k} − e^f| ≤ e^{|f|} (e^{|k|} − 1)`.
    pub fn exp() -> Self {
        TemperateMapSpec {
            phi: MapKind::Exp,
            g: GaugeFn::exp(),
            g2: GaugeFn::exp(),
            h: GaugeFn::custom("exp(x)-1", libm::expm1),
        }
    }
}

fn sample_grid() -> Vec<Complex64> {
    let mut out = alloc::vec![Complex64::new(0.0, 0.0)];
    for e in -3..=3 {
        let r = libm::pow(10.0, e as f64);
        for j in 0..6 {
            out.push(Complex64::from_polar(r, j as f64 * core::f64::consts::PI / 3.0 + 0.1));
        }
    }
    out
}

/// Both pointwise inequalities on a complex grid, then moderation of `g`, `g₂`
/// and compatibility of `h` along the family.
pub fn check_temperate(
    spec: &TemperateMapSpec,
    family: &ScaleFamily,
    probes: &[GrowthClass],
    negligible_probes: &[GrowthClass],
) -> Verdict {
    let grid = sample_grid();
    let slack = |rhs: f64| 1e-12 * rhs.max(1.0);
    for &f in &grid {
        let lhs = spec.phi.apply(f).norm();
        let rhs = spec.g.apply(f.norm());
        if lhs > rhs + slack(rhs) {
            return Verdict::Fails(Witness { index: None, values: alloc::vec![f.re, f.im, lhs, rhs], detail: "growth bound (a) violated".into() });
        }
        for &k in &grid {
            let lhs = (spec.phi.apply(f + k) - spec.phi.apply(f)).norm();
            let rhs = spec.g2.apply(f.norm()) * spec.h.apply(k.norm());
            if lhs > rhs + slack(rhs) {
                return Verdict::Fails(Witness {
                    index: None,
                    values: alloc::vec![f.re, f.im, k.re, k.im, lhs, rhs],
                    detail: "increment bound (b) violated".into(),
                });
            }
        }
    }
    [&spec.g, &spec.g2, &spec.h]
        .iter()
        .map(|g| g.check_monotone())
        .chain([
            is_r_moderate(&spec.g, family, probes),
            is_r_moderate(&spec.g2, family, probes),
            is_r_compatible(&spec.h, family, negligible_probes),
        ])
        .collect()
}

fn require_temperate(spec: &TemperateMapSpec, r: &Scale) -> Result<()> {
    let family = ScaleFamily::constant(r.clone());
    match check_temperate(spec, &family, &default_probes(&family), &default_negligible_probes()) {
        Verdict::Fails(w) => Err(Error::PreconditionFailed(format!("map is not r-temperate: {}", w.detail))),
        _ => Ok(()),
    }
}

/// `[f] ↦ [φ(f)]`, applied to the representative.
pub fn extend(spec: &TemperateMapSpec, x: &GenNumber) -> Result<GenNumber> {
    require_temperate(spec, x.scale())?;
    let y = match spec.phi {
        MapKind::Square => x.mul(x)?,
        MapKind::Linear(c) => x.scale_by(c),
        MapKind::Exp => {
            let x2 = x.clone();
            GenNumber::callable(move |n| x2.eval(n).exp(), x.scale().clone())?
        }
    };
    match y.classification() {
        Classification::Unbounded => Err(Error::NotModerate("image of the representative".into())),
        _ => Ok(y),
    }
}

/// The extension on generalized functions on the torus.
pub fn extend_gf(spec: &TemperateMapSpec, f: &TorusGF) -> Result<TorusGF> {
    require_temperate(spec, f.scale())?;
    match spec.phi {
        MapKind::Square => f.mul(f),
        MapKind::Linear(c) => Ok(f.scalar(c)),
        MapKind::Exp => Err(Error::Unsupported("exp of a generalized function".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    /// `(ε, ‖φ(x + k_ε) − φ(x)‖)` with `‖k_ε‖ = ε`.
    pub rows: Vec<(f64, UltraNormValue)>,
    /// Distances do not grow as `ε` shrinks.
    pub monotone: bool,
}

/// Perturbs `x` by `k = e_r^{log ε}`, which has norm exactly `ε`.
pub fn continuity_probe(spec: &TemperateMapSpec, x: &GenNumber, epsilons: &[f64]) -> Result<ContinuityReport> {
    let base = extend(spec, x)?;
    let mut rows = Vec::new();
    for &eps in epsilons {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
        }
        let k = GenNumber::from_class(GrowthClass::e_r(x.scale(), libm::log(eps))?, x.scale().clone())?;
        let moved = extend(spec, &x.add(&k)?)?;
        rows.push((eps, moved.sub(&base)?.norm()));
    }
    let mut sorted: Vec<(f64, f64)> = rows.iter().map(|(e, v)| (*e, v.value)).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let monotone = sorted.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
    Ok(ContinuityReport { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnum::eq_quotient;
    use approx::assert_relative_eq;

    fn log_family() -> ScaleFamily {
        ScaleFamily::constant(Scale::log())
    }

    fn probes() -> Vec<GrowthClass> {
        default_probes(&log_family())
    }

    #[test]
    fn moderate_gauges() {
        let fam = log_family();
        assert!(is_r_moderate(&GaugeFn::power(2.0), &fam, &probes()).holds());
        assert!(is_r_moderate(&GaugeFn::identity(), &fam, &probes()).holds());
        let v = is_r_moderate(&GaugeFn::exp(), &fam, &probes());
        assert!(v.fails(), "{v:?}");
    }

    #[test]
    fn exp_gauge_image_of_n() {
        let img = GaugeFn::exp().apply_class(&GrowthClass::power(1.0)).unwrap();
        assert_eq!(img.exps(), &ExpVec::single(Basis::Pow(1.0), 1.0));
        assert_eq!(row_class(&img, &Scale::log()), Classification::Unbounded);
    }

    #[test]
    fn compatible_gauges() {
        let fam = log_family();
        let neg = default_negligible_probes();
        assert!(is_r_compatible(&GaugeFn::identity(), &fam, &neg).holds());
        let v = is_r_compatible(&GaugeFn::power(0.5), &fam, &neg);
        assert!(v.holds(), "{v:?}");
        let img = GaugeFn::power(0.5).apply_class(&neg[3]).unwrap();
        assert_eq!(img.exps().coef(Basis::LogPow(2.0)), -0.5);
        assert!(is_r_compatible(&GaugeFn::affine(1.0, 1.0), &fam, &neg).fails());
    }

    #[test]
    fn gauge_classes_match_values() {
        let f = GrowthClass::power(1.5);
        for g in [
            GaugeFn::power(2.0),
            GaugeFn::affine(2.0, 1.0),
            GaugeFn::identity().plus(GaugeFn::power(2.0)),
            GaugeFn::log1p(),
            GaugeFn::exp().after(GaugeFn::power(2.0).after(GaugeFn::log1p())),
        ] {
            let img = g.apply_class(&f).unwrap();
            // the ratio image / g(f_n) stays bounded along a ladder
            let ratios: Vec<f64> = [1u64 << 10, 1 << 15, 1 << 20]
                .iter()
                .map(|&n| libm::exp(img.ln_abs(n) - libm::log(g.apply(f.eval(n).norm()))))
                .collect();
            for r in &ratios {
                assert!(*r > 0.2 && *r < 5.0, "{g:?}: {ratios:?}");
            }
        }
    }

    /// `exp((log(1+x))²)` squares the growth exponent: on power rows it is
    /// moderate only when the target row is quantified first.
    #[test]
    fn quantifier_order_matters() {
        let g = GaugeFn::exp().after(GaugeFn::power(2.0).after(GaugeFn::log1p()));
        let corpus: Vec<GrowthClass> =
            [1.0, 0.5, 0.25].iter().map(|&a| GrowthClass::one().with_exps(ExpVec::single(Basis::Pow(a), 1.0))).collect();
        let case_i = ScaleFamily::power_rows();
        assert_eq!(case_i.direction(), Direction::CaseI);
        assert!(is_r_moderate(&g, &case_i, &corpus).holds());
        let flipped = ScaleFamily::new("power-rows-as-case-ii", Direction::CaseII, case_i_row);
        assert!(is_r_moderate(&g, &flipped, &corpus).fails());
    }

    fn case_i_row(m: u32) -> Scale {
        ScaleFamily::power_rows().row(m)
    }

    #[test]
    fn temperate_examples() {
        let fam = log_family();
        let neg = default_negligible_probes();
        assert!(check_temperate(&TemperateMapSpec::square(), &fam, &probes(), &neg).holds());
        assert!(check_temperate(&TemperateMapSpec::linear(Complex64::new(3.0, -1.0)), &fam, &probes(), &neg).holds());
        let v = check_temperate(&TemperateMapSpec::exp(), &fam, &probes(), &neg);
        match v {
            Verdict::Fails(w) => assert!(w.detail.contains("exp"), "{w:?}"),
            other => panic!("{other:?}"),
        }
        // the spec's h = identity misses the k² term
        let mut bad = TemperateMapSpec::square();
        bad.h = GaugeFn::identity();
        assert!(check_temperate(&bad, &fam, &probes(), &neg).fails());
        let colombeau = ScaleFamily::colombeau();
        assert!(check_temperate(&TemperateMapSpec::square(), &colombeau, &default_probes(&colombeau), &neg).holds());
    }

    #[test]
    fn extend_examples() {
        let r = Scale::log();
        let n = GenNumber::from_class(GrowthClass::power(1.0), r.clone()).unwrap();
        let sq = extend(&TemperateMapSpec::square(), &n).unwrap();
        let n2 = GenNumber::from_class(GrowthClass::power(2.0), r.clone()).unwrap();
        assert!(eq_quotient(&sq, &n2).unwrap().holds());
        // perturbing by a negligible sequence does not change the class
        let k = GenNumber::from_class(GrowthClass::one().with_exps(ExpVec::single(Basis::LogPow(2.0), -1.0)), r.clone()).unwrap();
        let moved = extend(&TemperateMapSpec::square(), &n.add(&k).unwrap()).unwrap();
        assert!(eq_quotient(&moved, &sq).unwrap().holds());
        let lin = TemperateMapSpec::linear(Complex64::new(2.5, 0.0));
        let e = crate::gnum::unit_e_r(&r).unwrap();
        let a = extend(&lin, &e).unwrap();
        let b = extend(&lin, &e.add(&k).unwrap()).unwrap();
        assert!(eq_quotient(&a, &b).unwrap().holds());
        assert!(eq_quotient(&a, &e.scale_by(Complex64::new(2.5, 0.0))).unwrap().holds());
        assert!(matches!(extend(&TemperateMapSpec::exp(), &n), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn continuity_examples() {
        let r = Scale::log();
        let n = GenNumber::from_class(GrowthClass::power(1.0), r).unwrap();
        let eps = [libm::exp(-1.0), libm::exp(-2.0), libm::exp(-4.0)];
        let rep = continuity_probe(&TemperateMapSpec::square(), &n, &eps).unwrap();
        assert!(rep.monotone);
        for (e, d) in &rep.rows {
            assert!(d.is_exact());
            // ‖2nk + k²‖ = max(e·ε, ε²)
            assert_relative_eq!(d.value, (core::f64::consts::E * e).max(e * e), max_relative = 1e-9);
        }
        let rep = continuity_probe(&TemperateMapSpec::linear(Complex64::new(0.5, 0.0)), &n, &eps).unwrap();
        for (e, d) in &rep.rows {
            assert!(d.value <= *e * (1.0 + 1e-12));
        }
    }
}
