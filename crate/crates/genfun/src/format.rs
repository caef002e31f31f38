//! JSON descriptors for scales, sequences, coefficient families, generalized
//! functions on the circle and temperate maps.
//!
//! Every descriptor is a plain JSON object. Unknown keys are rejected so a
//! typo does not silently fall back to a default.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use genfun_core::basis::{Basis, ExpVec};
use genfun_core::functorial::{GaugeFn, MapKind, TemperateMapSpec};
use genfun_core::growth::gc_mul;
use genfun_core::scales::scale_from_real_asymptotic;
use genfun_core::torus::{CoeffFamily, Laurent, TorusGF};
use genfun_core::{
    scales::scale_from_asymptotic, AsymptoticScale, Complex64, GrowthClass, Phase, Scale, ScaleFamily, SymbolicSeq,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Reads `arg` as inline JSON when it looks like an object or array,
/// otherwise as a path.
pub fn load_json(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("malformed JSON in {arg}"))
}

fn parse<T: DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| anyhow!("invalid {what} descriptor: {e}"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleDesc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Exponent of `log n` for `logpow`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Depth for `expiter`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Which asymptotic scale for `asymptotic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asym: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
}

pub fn asymptotic_by_name(name: &str) -> Result<AsymptoticScale> {
    match name {
        "polynomial" => Ok(AsymptoticScale::polynomial()),
        "exp-iter" => Ok(AsymptoticScale::exp_iter()),
        "infra-exp" => Ok(AsymptoticScale::infra_exp()),
        other => bail!("unknown asymptotic scale {other:?} (polynomial, exp-iter, infra-exp)"),
    }
}

impl ScaleDesc {
    pub fn log() -> Self {
        ScaleDesc { kind: "log".into(), m: None, sigma: None, b: None, k: None, asym: None, factor: None }
    }

    pub fn build(&self) -> Result<Scale> {
        let need_m = || self.m.ok_or_else(|| anyhow!("scale kind {:?} needs \"m\"", self.kind));
        let base = match self.kind.as_str() {
            "log" => Scale::log(),
            "power" => Scale::power(need_m()?)?,
            "logpow" => Scale::log_power(self.b.ok_or_else(|| anyhow!("logpow scale needs \"b\""))?)?,
            "expiter" => Scale::exp_iter(self.k.ok_or_else(|| anyhow!("expiter scale needs \"k\""))?)?,
            "egorov" => {
                let m = need_m()?;
                if m < 0.0 || m.fract() != 0.0 {
                    bail!("egorov row index must be a non-negative integer, got {m}");
                }
                Scale::egorov_row(m as u64)
            }
            "asymptotic" => {
                let a = asymptotic_by_name(self.asym.as_deref().unwrap_or("polynomial"))?;
                if a.is_real_indexed() {
                    scale_from_real_asymptotic(&a, self.sigma.unwrap_or(1.0))?
                } else {
                    let m = self.m.unwrap_or(1.0);
                    if m.fract() != 0.0 {
                        bail!("asymptotic row index must be an integer, got {m}");
                    }
                    scale_from_asymptotic(&a, m as i64)?
                }
            }
            other => bail!("unknown scale kind {other:?}"),
        };
        match self.factor {
            Some(c) => Ok(base.scaled(c)?),
            None => Ok(base),
        }
    }
}

pub fn scale_from_json(v: &Value) -> Result<Scale> {
    parse::<ScaleDesc>(v, "scale")?.build()
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseDesc {
    #[default]
    Positive,
    Alternating,
}

impl From<PhaseDesc> for Phase {
    fn from(p: PhaseDesc) -> Phase {
        match p {
            PhaseDesc::Positive => Phase::Positive,
            PhaseDesc::Alternating => Phase::Alternating,
        }
    }
}

/// One factor `coef · exp(Σ c_j · basis_j)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTerm {
    /// `loglog`, `logpow`, `log`, `pow` or `expiter`.
    pub basis: String,
    #[serde(default)]
    pub param: Option<f64>,
    pub coef: f64,
}

impl ExpTerm {
    fn basis(&self) -> Result<Basis> {
        let p = || self.param.ok_or_else(|| anyhow!("basis {:?} needs \"param\"", self.basis));
        let b = match self.basis.as_str() {
            "loglog" => Basis::LogLog,
            "log" => Basis::LOG,
            "logpow" => Basis::LogPow(p()?),
            "pow" => Basis::Pow(p()?),
            "expiter" => {
                let k = p()?;
                if k < 1.0 || k.fract() != 0.0 {
                    bail!("expiter depth must be a positive integer, got {k}");
                }
                Basis::ExpIter(k as u32)
            }
            other => bail!("unknown basis {other:?}"),
        };
        if let Basis::LogPow(x) | Basis::Pow(x) = b {
            if !(x > 0.0) {
                bail!("basis parameter must be positive, got {x}");
            }
        }
        Ok(b)
    }
}

/// `exp(c0 + s/r_n + γ log n + δ log log n)`, times optional extra
/// exponent terms and a real coefficient.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDesc {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub phase: PhaseDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exps: Vec<ExpTerm>,
}

impl TermDesc {
    pub fn build(&self, r: &Scale) -> Result<GrowthClass> {
        let mut g = GrowthClass::from_fields(self.c0, self.s, self.gamma, self.delta, self.phase.into(), r)?;
        if let Some(c) = self.coef {
            g = g
                .scale_by(Complex64::new(c, 0.0))
                .ok_or_else(|| anyhow!("coefficient must be non-zero"))?;
        }
        if !self.exps.is_empty() {
            let terms = self.exps.iter().map(|t| Ok((t.basis()?, t.coef))).collect::<Result<Vec<_>>>()?;
            g = gc_mul(&g, &GrowthClass::one().with_exps(ExpVec::from_terms(terms)));
        }
        Ok(g)
    }
}

/// Sequences known only pointwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BlackBox {
    /// `n^γ (2 + sin n)`
    OscillatingPower { gamma: f64 },
    /// `exp(c n^p)`
    ExpRoot { c: f64, p: f64 },
    /// `n^γ (log n)^δ (1 + 1/n)`
    PowerLog { gamma: f64, delta: f64 },
}

impl BlackBox {
    /// `n ↦ log |f_n|`.
    pub fn ln_abs(&self) -> Arc<dyn Fn(u64) -> f64 + Send + Sync> {
        match *self {
            BlackBox::OscillatingPower { gamma } => {
                Arc::new(move |n| gamma * (n as f64).ln() + (2.0 + (n as f64).sin()).ln())
            }
            BlackBox::ExpRoot { c, p } => Arc::new(move |n| c * (n as f64).powf(p)),
            BlackBox::PowerLog { gamma, delta } => Arc::new(move |n| {
                let x = n as f64;
                gamma * x.ln() + delta * x.ln().ln() + (1.0 / x).ln_1p()
            }),
        }
    }

    pub fn domain_start(&self) -> u64 {
        match self {
            BlackBox::PowerLog { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqDesc {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub phase: PhaseDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exps: Vec<ExpTerm>,
    /// A sum of terms; the head fields must then be left out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermDesc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blackbox: Option<BlackBox>,
}

pub enum SeqInput {
    Symbolic(SymbolicSeq),
    BlackBox(BlackBox),
}

impl SeqDesc {
    fn head(&self) -> TermDesc {
        TermDesc {
            c0: self.c0,
            s: self.s,
            gamma: self.gamma,
            delta: self.delta,
            phase: self.phase,
            coef: self.coef,
            exps: self.exps.clone(),
        }
    }

    fn head_is_default(&self) -> bool {
        self.c0 == 0.0
            && self.s == 0.0
            && self.gamma == 0.0
            && self.delta == 0.0
            && self.phase == PhaseDesc::Positive
            && self.coef.is_none()
            && self.exps.is_empty()
    }

    pub fn build(&self, r: &Scale) -> Result<SeqInput> {
        match (&self.terms, &self.blackbox) {
            (Some(_), Some(_)) => bail!("a sequence has either \"terms\" or \"blackbox\", not both"),
            (None, Some(b)) if self.head_is_default() => Ok(SeqInput::BlackBox(b.clone())),
            (Some(ts), None) if self.head_is_default() => {
                let terms = ts.iter().map(|t| t.build(r)).collect::<Result<Vec<_>>>()?;
                Ok(SeqInput::Symbolic(SymbolicSeq::from_terms(terms)))
            }
            (None, None) => Ok(SeqInput::Symbolic(self.head().build(r)?.into())),
            _ => bail!("growth fields cannot be combined with \"terms\" or \"blackbox\""),
        }
    }
}

pub fn seq_from_json(v: &Value, r: &Scale) -> Result<SeqInput> {
    parse::<SeqDesc>(v, "sequence")?.build(r)
}

pub fn symbolic_from_json(v: &Value, r: &Scale) -> Result<SymbolicSeq> {
    match seq_from_json(v, r)? {
        SeqInput::Symbolic(s) => Ok(s),
        SeqInput::BlackBox(_) => bail!("this command needs a closed-form sequence, not a black box"),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffTerm {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Fourier coefficient families `k ↦ ĉ_k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoeffDesc {
    Geometric { rho: f64 },
    /// All ones, the coefficients of δ.
    #[serde(alias = "delta")]
    Constant,
    PowerLaw { alpha: f64 },
    Subexp { beta: f64 },
    Monomial { k: i64 },
    Finite { terms: Vec<CoeffTerm> },
}

impl CoeffDesc {
    pub fn build(&self) -> Result<CoeffFamily> {
        Ok(match self {
            CoeffDesc::Geometric { rho } => CoeffFamily::geometric(*rho)?,
            CoeffDesc::Constant => CoeffFamily::Constant,
            CoeffDesc::PowerLaw { alpha } => CoeffFamily::PowerLaw(*alpha),
            CoeffDesc::Subexp { beta } => CoeffFamily::SubExp(*beta),
            CoeffDesc::Monomial { k } => CoeffFamily::monomial(*k),
            CoeffDesc::Finite { terms } => {
                let pairs: Vec<(i64, Complex64)> = terms.iter().map(|t| (t.k, Complex64::new(t.re, t.im))).collect();
                CoeffFamily::Finite(Laurent::from_pairs(&pairs))
            }
        })
    }
}

pub fn coeffs_from_json(v: &Value) -> Result<CoeffFamily> {
    parse::<CoeffDesc>(v, "coefficient")?.build()
}

pub fn testset_from_json(v: &Value) -> Result<Vec<CoeffFamily>> {
    let list: Vec<CoeffDesc> = parse(v, "test set")?;
    if list.is_empty() {
        bail!("test set is empty");
    }
    list.iter().map(CoeffDesc::build).collect()
}

/// Expressions over generalized functions on the circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GfDesc {
    Embed { coeffs: CoeffDesc },
    /// The distribution itself, usable in pairings.
    Dist { coeffs: CoeffDesc },
    Const { coeffs: CoeffDesc },
    Add { args: Vec<GfDesc> },
    Sub { args: Vec<GfDesc> },
    Mul { args: Vec<GfDesc> },
    Neg { arg: Box<GfDesc> },
    Derivative { arg: Box<GfDesc> },
    Scalar { re: f64, #[serde(default)] im: f64, arg: Box<GfDesc> },
}

fn fold(args: &[GfDesc], r: &Scale, op: impl Fn(&TorusGF, &TorusGF) -> genfun_core::Result<TorusGF>) -> Result<TorusGF> {
    let (first, rest) = args.split_first().ok_or_else(|| anyhow!("operation needs at least one argument"))?;
    let mut acc = first.build(r)?;
    for a in rest {
        acc = op(&acc, &a.build(r)?)?;
    }
    Ok(acc)
}

impl GfDesc {
    pub fn build(&self, r: &Scale) -> Result<TorusGF> {
        Ok(match self {
            GfDesc::Embed { coeffs } => genfun_core::torus::embed(coeffs.build()?, r)?,
            GfDesc::Dist { coeffs } => TorusGF::distribution(coeffs.build()?, r)?,
            GfDesc::Const { coeffs } => match coeffs.build()? {
                CoeffFamily::Finite(l) => TorusGF::constant(l, r)?,
                _ => bail!("a constant needs finitely many coefficients"),
            },
            GfDesc::Add { args } => fold(args, r, TorusGF::add)?,
            GfDesc::Sub { args } => fold(args, r, TorusGF::sub)?,
            GfDesc::Mul { args } => fold(args, r, TorusGF::mul)?,
            GfDesc::Neg { arg } => arg.build(r)?.neg(),
            GfDesc::Derivative { arg } => arg.build(r)?.derivative(),
            GfDesc::Scalar { re, im, arg } => arg.build(r)?.scalar(Complex64::new(*re, *im)),
        })
    }
}

pub fn gf_from_json(v: &Value, r: &Scale) -> Result<TorusGF> {
    parse::<GfDesc>(v, "generalized function")?.build(r)
}

/// Does the JSON value describe a generalized function rather than a number?
pub fn is_gf(v: &Value) -> bool {
    v.get("op").is_some()
}

/// Gauge functions `ℝ₊ → ℝ₊`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GaugeDesc {
    Power { k: f64 },
    Exp,
    Log1p,
    Identity,
    Expm1,
    Affine { a: f64, b: f64 },
    Sum { args: Vec<GaugeDesc> },
    Product { args: Vec<GaugeDesc> },
    Compose { outer: Box<GaugeDesc>, inner: Box<GaugeDesc> },
    Scale { c: f64, arg: Box<GaugeDesc> },
}

impl GaugeDesc {
    pub fn build(&self) -> Result<GaugeFn> {
        let reduce = |args: &[GaugeDesc], f: fn(GaugeFn, GaugeFn) -> GaugeFn| -> Result<GaugeFn> {
            let (first, rest) = args.split_first().ok_or_else(|| anyhow!("gauge needs at least one argument"))?;
            rest.iter().try_fold(first.build()?, |acc, a| Ok(f(acc, a.build()?)))
        };
        Ok(match self {
            GaugeDesc::Power { k } => GaugeFn::power(*k),
            GaugeDesc::Exp => GaugeFn::exp(),
            GaugeDesc::Log1p => GaugeFn::log1p(),
            GaugeDesc::Identity => GaugeFn::identity(),
            GaugeDesc::Expm1 => GaugeFn::custom("exp(x)-1", f64::exp_m1),
            GaugeDesc::Affine { a, b } => GaugeFn::affine(*a, *b),
            GaugeDesc::Sum { args } => reduce(args, GaugeFn::plus)?,
            GaugeDesc::Product { args } => reduce(args, GaugeFn::times)?,
            GaugeDesc::Compose { outer, inner } => outer.build()?.after(inner.build()?),
            GaugeDesc::Scale { c, arg } => arg.build()?.scaled(*c),
        })
    }
}

/// `{"phi": "square" | "linear:c" | "exp", "g": …, "g2": …, "h": …}`; gauges
/// left out take the defaults of the map.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpecDesc {
    pub phi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<GaugeDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<GaugeDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<GaugeDesc>,
}

/// `"2"`, `"-1.5"` or `"1,0.5"` (real, imaginary).
fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| anyhow!("bad number {t:?} in linear map"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("linear map constant must be \"re\" or \"re,im\""),
    }
}

impl MapSpecDesc {
    pub fn build(&self) -> Result<TemperateMapSpec> {
        let mut spec = match self.phi.as_str() {
            "square" => TemperateMapSpec::square(),
            "exp" => TemperateMapSpec::exp(),
            s if s.starts_with("linear:") => TemperateMapSpec::linear(parse_complex(&s["linear:".len()..])?),
            other => bail!("unknown map {other:?} (square, linear:c, exp)"),
        };
        if let Some(g) = &self.g {
            spec.g = g.build()?;
        }
        if let Some(g2) = &self.g2 {
            spec.g2 = g2.build()?;
        }
        if let Some(h) = &self.h {
            spec.h = h.build()?;
        }
        debug_assert!(matches!(spec.phi, MapKind::Square | MapKind::Linear(_) | MapKind::Exp));
        Ok(spec)
    }
}

pub fn map_spec_from_json(v: &Value) -> Result<TemperateMapSpec> {
    parse::<MapSpecDesc>(v, "map")?.build()
}

pub fn family_by_name(name: &str) -> Result<ScaleFamily> {
    match name {
        "colombeau" => Ok(ScaleFamily::colombeau()),
        "power-rows" => Ok(ScaleFamily::power_rows()),
        "egorov" => Ok(ScaleFamily::egorov()),
        "log" => Ok(ScaleFamily::constant(Scale::log())),
        other => bail!("unknown scale family {other:?} (colombeau, power-rows, egorov, log)"),
    }
}
