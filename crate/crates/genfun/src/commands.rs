//! One function per CLI verb. Each takes parsed JSON inputs and returns a
//! report whose outcome decides the exit code. Errors are usage errors:
//! malformed or invalid inputs.

use anyhow::{bail, Result};
use genfun_core::association::{self, AssocFlavor};
use genfun_core::asymptotic::{classify_a, classify_a_secondkind, family_classify, thm45_equivalence, SecondKind};
use genfun_core::functorial::{check_temperate, default_negligible_probes, default_probes, is_r_compatible, is_r_moderate};
use genfun_core::gnum::{maddox_c0_seq, maddox_linf_seq, GenNumber, MaddoxOutcome};
use genfun_core::torus::{
    self, classify_coefficients, coefficient_labels, gf_norm, k_n, pm_norm, CoeffClass, CoeffFamily, Laurent,
    TorusSeminorm,
};
use genfun_core::ultranorm::{norm_collected, norm_estimate_with, EstimatorConfig, LnSeq, NormEstimate};
use genfun_core::{
    scales::{scale_from_asymptotic, scale_from_real_asymptotic},
    basis::Basis, Classification, IndexLadder, Scale, ScaleFamily, UltraNormValue, Verdict,
};
use serde_json::{json, Value};

use crate::format::{
    asymptotic_by_name, coeffs_from_json, family_by_name, gf_from_json, is_gf, map_spec_from_json, scale_from_json,
    seq_from_json, symbolic_from_json, testset_from_json, ScaleDesc, SeqInput,
};
use crate::report::{num, Entry, Outcome, Report, Trace};

/// Largest truncation handled by explicit convolution in the δ² demo.
const CONVOLVE_CAP: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub ladder_max_exp: u32,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { ladder_max_exp: 20, tol: EstimatorConfig::default().tol }
    }
}

impl Settings {
    pub fn ladder(&self) -> IndexLadder {
        IndexLadder::with_max_exp(self.ladder_max_exp)
    }

    fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig { tol: self.tol, ..EstimatorConfig::default() }
    }

    fn echo(&self) -> Value {
        json!({"ladder_max_exp": self.ladder_max_exp, "tol": num(self.tol)})
    }
}

fn log_scale_json() -> Value {
    serde_json::to_value(ScaleDesc::log()).expect("plain struct")
}

fn powered_trace(est: &NormEstimate) -> Trace {
    let mut t = Trace::new("powered", &["n", "p_value", "powered_value"]);
    for row in &est.trace {
        t.push(&[row.n as f64, row.p_value(), row.powered]);
    }
    t
}

fn estimate(f: &SeqInput, r: &Scale, s: &Settings) -> NormEstimate {
    let ladder = s.ladder();
    match f {
        SeqInput::Symbolic(f) => norm_estimate_with(f, r, &ladder, &s.estimator()),
        SeqInput::BlackBox(b) => {
            let ln = b.ln_abs();
            norm_estimate_with(&LnSeq(move |n| ln(n), b.domain_start()), r, &ladder, &s.estimator())
        }
    }
}

fn exact(f: &SeqInput, r: &Scale) -> (UltraNormValue, Option<String>) {
    match f {
        SeqInput::Symbolic(f) => match norm_collected(f, r) {
            Ok(v) => (v, None),
            Err(e) => (UltraNormValue::inconclusive(), Some(e.to_string())),
        },
        SeqInput::BlackBox(_) => (UltraNormValue::inconclusive(), Some("black box: no closed form".into())),
    }
}

/// Exact and estimated norm side by side, with the powered trace.
pub fn norm(seq: &Value, scale: &Value, s: &Settings) -> Result<Report> {
    let r = scale_from_json(scale)?;
    let f = seq_from_json(seq, &r)?;
    let mut rep = Report::new("norm", json!({"seq": seq, "scale": scale, "settings": s.echo()}));
    let (ex, why) = exact(&f, &r);
    let est = estimate(&f, &r, s);
    let mut e = Entry::norm("exact", &ex);
    if let Some(w) = why {
        e = e.with_detail(w);
    }
    rep.push(e);
    rep.push(Entry::norm("estimated", &est.value).with_detail(est.note.clone()));
    let best = if ex.is_inconclusive() { &est.value } else { &ex };
    rep.push(Entry::label("classification", Classification::from_norm(best).label()));
    rep.outcome = if best.is_inconclusive() { Outcome::Inconclusive } else { Outcome::Holds };
    rep.traces.push(powered_trace(&est));
    Ok(rep)
}

fn maddox_entry(name: &str, m: &MaddoxOutcome) -> Entry {
    let e = Entry::verdict(name, &m.verdict);
    match m.k {
        Some(k) => Entry { value: Some(json!(k)), ..e },
        None => e,
    }
}

/// Moderate / negligible classification, plus the Maddox scans for closed
/// forms.
pub fn classify(seq: &Value, scale: &Value, s: &Settings) -> Result<Report> {
    let r = scale_from_json(scale)?;
    let f = seq_from_json(seq, &r)?;
    let mut rep = Report::new("classify", json!({"seq": seq, "scale": scale, "settings": s.echo()}));
    let (ex, _) = exact(&f, &r);
    let v = if ex.is_inconclusive() { estimate(&f, &r, s).value } else { ex };
    let class = Classification::from_norm(&v);
    rep.push(Entry::label("classification", class.label()));
    rep.push(Entry::norm("norm", &v));
    if let SeqInput::Symbolic(f) = &f {
        if r.reciprocal().is_some() {
            rep.push(maddox_entry("maddox_linf", &maddox_linf_seq(f, &r)));
            rep.push(maddox_entry("maddox_c0", &maddox_c0_seq(f, &r)));
        }
    }
    rep.outcome = if class == Classification::Inconclusive { Outcome::Inconclusive } else { Outcome::Holds };
    Ok(rep)
}

#[derive(Debug, Clone, Default)]
pub struct AssocArgs {
    pub flavor: String,
    pub s: Option<f64>,
    pub lhs: Option<Value>,
    pub rhs: Option<Value>,
    pub scale: Option<Value>,
    /// `default`, or a JSON list of coefficient families.
    pub testset: Option<Value>,
    /// `delta-pairing`: `embed(δ)` against the distribution `δ`, tested on
    /// `ψ̂_k = 2^{-|k|}`.
    pub demo: Option<String>,
}

fn flavor(name: &str, s: Option<f64>, testset: Vec<CoeffFamily>) -> Result<AssocFlavor> {
    let need_s = || match s {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => bail!("--s must be finite, got {x}"),
        None => bail!("flavor {name:?} needs --s"),
    };
    Ok(match name {
        "plain" => AssocFlavor::Plain,
        "s" => AssocFlavor::S(need_s()?),
        "strong" => AssocFlavor::Strong,
        "strong-s" => AssocFlavor::StrongS(need_s()?),
        "weak" => AssocFlavor::Weak(need_s()?, testset),
        "strong-weak" => AssocFlavor::StrongWeak(need_s()?, testset),
        other => bail!("unknown flavor {other:?} (plain, s, strong, strong-s, weak, strong-weak)"),
    })
}

pub fn assoc(a: &AssocArgs, st: &Settings) -> Result<Report> {
    let scale = a.scale.clone().unwrap_or_else(log_scale_json);
    let r = scale_from_json(&scale)?;
    let (lhs, rhs, demo_testset) = match a.demo.as_deref() {
        Some("delta-pairing") => {
            if a.lhs.is_some() || a.rhs.is_some() {
                bail!("--demo replaces --lhs and --rhs");
            }
            (
                json!({"op": "embed", "coeffs": {"form": "constant"}}),
                json!({"op": "dist", "coeffs": {"form": "constant"}}),
                Some(vec![CoeffFamily::geometric(0.5)?]),
            )
        }
        Some(other) => bail!("unknown demo {other:?} (delta-pairing)"),
        None => match (&a.lhs, &a.rhs) {
            (Some(l), Some(r)) => (l.clone(), r.clone(), None),
            _ => bail!("assoc needs --lhs and --rhs, or --demo"),
        },
    };
    let testset = match &a.testset {
        Some(Value::String(s)) if s == "default" => association::default_testset(),
        Some(v) => testset_from_json(v)?,
        None => demo_testset.unwrap_or_else(association::default_testset),
    };
    let n_tests = testset.len();
    let fl = flavor(&a.flavor, a.s, testset)?;
    let mut rep = Report::new(
        "assoc",
        json!({"flavor": a.flavor, "s": a.s.map(num), "lhs": lhs, "rhs": rhs, "scale": scale,
               "testset": a.testset, "demo": a.demo, "settings": st.echo()}),
    );
    let verdict = match (is_gf(&lhs), is_gf(&rhs)) {
        (true, true) => {
            let f = gf_from_json(&lhs, &r)?;
            let g = gf_from_json(&rhs, &r)?;
            association::assoc_gf(&f, &g, &fl, &[TorusSeminorm::Sup])
        }
        (false, false) => {
            let x = GenNumber::symbolic(symbolic_from_json(&lhs, &r)?, r.clone())?;
            let y = GenNumber::symbolic(symbolic_from_json(&rhs, &r)?, r.clone())?;
            association::assoc_numbers(&x, &y, &fl)
        }
        _ => bail!("--lhs and --rhs must both be numbers or both be generalized functions"),
    };
    let verdict = verdict.unwrap_or_else(|e| Verdict::inconclusive(e.to_string()));
    rep.push(Entry::label("flavor", a.flavor.clone()));
    if let Some(s) = a.s {
        rep.push(Entry::value("s", s));
    }
    if matches!(fl, AssocFlavor::Weak(..) | AssocFlavor::StrongWeak(..)) {
        rep.push(Entry::json("testset_size", json!(n_tests)));
    }
    rep.push(Entry::verdict("result", &verdict));
    rep.outcome = Outcome::of(&verdict);
    Ok(rep)
}

fn coeff_class_label(c: CoeffClass) -> &'static str {
    match c {
        CoeffClass::Analytic => "analytic",
        CoeffClass::Distribution => "distribution",
        CoeffClass::Hyperfunction => "hyperfunction",
        CoeffClass::None => "none",
    }
}

/// Fourier-side label of a coefficient family and the norms of its embedding.
pub fn embed(coeffs: &Value, scale: &Value, s: &Settings) -> Result<Report> {
    let r = scale_from_json(scale)?;
    let cf = coeffs_from_json(coeffs)?;
    let mut rep = Report::new("embed", json!({"coeffs": coeffs, "scale": scale, "settings": s.echo()}));
    let (analytic, distribution, hyper) = coefficient_labels(&cf);
    rep.push(Entry::label("coefficient_class", coeff_class_label(classify_coefficients(&cf))));
    rep.push(Entry::json("thresholds", json!({"analytic": analytic, "distribution": distribution, "hyperfunction": hyper})));
    rep.push(Entry::norm("pm_norm_inv_k", &pm_norm(&cf, &Scale::power(1.0)?)));
    rep.push(Entry::norm("pm_norm_inv_log_k", &pm_norm(&cf, &Scale::log())));
    let f = torus::embed(cf, &r)?;
    let ladder = s.ladder();
    let sup = gf_norm(&f, &TorusSeminorm::Sup, &ladder);
    let class = Classification::from_norm(&sup);
    rep.push(Entry::norm("sup_norm", &sup));
    rep.push(Entry::label("classification", class.label()));
    rep.outcome = if class == Classification::Inconclusive { Outcome::Inconclusive } else { Outcome::Holds };
    Ok(rep)
}

/// `δ_n` and `δ_n²` on the ladder: truncation, peak coefficient and sup norm.
pub fn demo_delta2(scale: Option<&Value>, s: &Settings) -> Result<Report> {
    let scale = scale.cloned().unwrap_or_else(log_scale_json);
    let r = scale_from_json(&scale)?;
    let mut rep = Report::new("demo-delta2", json!({"scale": scale, "settings": s.echo()}));
    let ladder = s.ladder().clamp_start(r.domain_start().max(2));
    let d = torus::embed(CoeffFamily::Constant, &r)?;
    let d2 = d.mul(&d)?;

    let mut peaks = Trace::new("coefficients", &["n", "k_n", "delta_peak", "delta2_peak", "delta2_peak_index"]);
    let mut sups = Trace::new("sup_norms", &["n", "sup_delta", "sup_delta2", "powered_delta", "powered_delta2"]);
    for n in ladder.iter() {
        let kk = k_n(&r, n);
        let (p1, p2, s1, s2) = if kk <= CONVOLVE_CAP {
            let c1 = d.coeffs(n)?;
            let c2 = d2.coeffs(n)?;
            let peak = |l: &Laurent| l.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
            (peak(&c1), peak(&c2), TorusSeminorm::Sup.apply(&c1), TorusSeminorm::Sup.apply(&c2))
        } else {
            // all-ones coefficients: the square is the box self-convolution
            let w = (2 * kk + 1) as f64;
            (1.0, w, w, w * w)
        };
        let rn = r.eval(n);
        peaks.push(&[n as f64, kk as f64, p1, p2, 0.0]);
        sups.push(&[n as f64, s1, s2, s1.powf(rn), s2.powf(rn)]);
    }
    let mut unbounded = Trace::new("unboundedness", &["n", "sup_delta"]);
    for (n, v) in torus::delta_unboundedness_trace(&r, &ladder)? {
        unbounded.push(&[n as f64, v]);
    }

    let n1 = gf_norm(&d, &TorusSeminorm::Sup, &s.ladder());
    let n2 = gf_norm(&d2, &TorusSeminorm::Sup, &s.ladder());
    let c1 = Classification::from_norm(&n1);
    let c2 = Classification::from_norm(&n2);
    rep.push(Entry::label("delta_class", c1.label()));
    rep.push(Entry::norm("delta_sup_norm", &n1));
    rep.push(Entry::label("delta2_class", c2.label()));
    rep.push(Entry::norm("delta2_sup_norm", &n2));
    if let Some(last) = ladder.last() {
        let kk = k_n(&r, last);
        rep.push(Entry::value("delta2_peak_at_last_n", (2 * kk + 1) as f64).with_detail(format!("n = {last}, K_n = {kk}")));
    }
    let both = [c1, c2];
    rep.outcome = if both.contains(&Classification::Inconclusive) {
        Outcome::Inconclusive
    } else if both.iter().all(|c| c.is_moderate() == Some(true)) {
        Outcome::Holds
    } else {
        Outcome::Fails
    };
    rep.traces.extend([peaks, sups, unbounded]);
    Ok(rep)
}

/// Pointwise inequalities, monotone gauges, moderation of `g` and
/// compatibility of `h` along a scale family.
pub fn temperate_check(spec: &Value, family: &str, s: &Settings) -> Result<Report> {
    let map = map_spec_from_json(spec)?;
    let fam: ScaleFamily = family_by_name(family)?;
    let mut rep = Report::new("temperate-check", json!({"spec": spec, "family": family, "settings": s.echo()}));
    let probes = default_probes(&fam);
    let neg = default_negligible_probes();
    rep.push(Entry::label("g", map.g.name()));
    rep.push(Entry::label("h", map.h.name()));
    rep.push(Entry::verdict("g_monotone", &map.g.check_monotone()));
    rep.push(Entry::verdict("h_monotone", &map.h.check_monotone()));
    rep.push(Entry::verdict("g_moderate", &is_r_moderate(&map.g, &fam, &probes)));
    rep.push(Entry::verdict("g2_moderate", &is_r_moderate(&map.g2, &fam, &probes)));
    rep.push(Entry::verdict("h_compatible", &is_r_compatible(&map.h, &fam, &neg)));
    let v = check_temperate(&map, &fam, &probes, &neg);
    rep.push(Entry::verdict("temperate", &v));
    rep.outcome = Outcome::of(&v);
    Ok(rep)
}

/// Classification against an asymptotic scale. The sequence's `s` field is
/// read on the log scale.
pub fn aclassify(seq: &Value, scale_kind: &str, s: &Settings) -> Result<Report> {
    let a = asymptotic_by_name(scale_kind)?;
    let f = symbolic_from_json(seq, &Scale::log())?;
    let mut rep = Report::new("aclassify", json!({"seq": seq, "scale_kind": scale_kind, "settings": s.echo()}));
    if a.is_real_indexed() {
        match classify_a_secondkind(&f, &a) {
            Ok((class, rows)) => {
                let label = match class {
                    SecondKind::InIdeal => "in-ideal",
                    SecondKind::InSubalgebra => "in-subalgebra",
                    SecondKind::Neither => "neither",
                };
                rep.push(Entry::label("second_kind", label));
                let mut t = Trace::new("rows", &["m", "sigma", "norm"]);
                for (m, v) in rows {
                    t.push(&[m as f64, 1.0 / m as f64, v.value]);
                }
                rep.traces.push(t);
            }
            Err(e) => {
                rep.push(Entry::label("second_kind", "inconclusive").with_detail(e.to_string()));
                rep.outcome = Outcome::Inconclusive;
            }
        }
        return Ok(rep);
    }
    match classify_a(&f, &a) {
        Ok(c) => {
            let mut e = Entry::label("a_class", c.label());
            if let genfun_core::asymptotic::AClass::InAlgebra(m) = c {
                e.value = Some(json!(m));
            }
            rep.push(e);
        }
        Err(e) => {
            rep.push(Entry::label("a_class", "inconclusive").with_detail(e.to_string()));
            rep.outcome = Outcome::Inconclusive;
        }
    }
    let fam = ScaleFamily::from_asymptotic(&a)?;
    let fc = family_classify(&f, &fam);
    rep.push(Entry::label("family_class", fc.label()));
    let agree = thm45_equivalence(&f, &a).unwrap_or_else(|e| Verdict::inconclusive(e.to_string()));
    rep.push(Entry::verdict("family_agrees", &agree));
    let mut t = Trace::new("rows", &["m", "class"]);
    for (m, c) in &fc.rows {
        t.rows.push(vec![json!(m), json!(c.label())]);
    }
    rep.traces.push(t);
    if rep.outcome == Outcome::Holds && !agree.holds() {
        rep.outcome = Outcome::of(&agree);
    }
    Ok(rep)
}

fn kind_desc(r: &Scale) -> Value {
    let f = num(r.factor());
    match (r.basis(), r.egorov_index()) {
        (Some(Basis::LogPow(b)), _) if b == 1.0 => json!({"kind": "log", "factor": f}),
        (Some(Basis::LogPow(b)), _) => json!({"kind": "logpow", "b": num(b), "factor": f}),
        (Some(Basis::Pow(a)), _) => json!({"kind": "power", "m": num(1.0 / a), "factor": f}),
        (Some(Basis::ExpIter(k)), _) => json!({"kind": "expiter", "k": k, "factor": f}),
        (Some(Basis::LogLog), _) => json!({"kind": "loglog", "factor": f}),
        (None, Some(m)) => json!({"kind": "egorov", "m": m}),
        (None, None) => json!({"kind": "custom"}),
    }
}

/// `r_n = 1/|log a_m(n)|` in closed form, with its values on the ladder.
pub fn convert_scale(asym: &str, m: Option<i64>, sigma: Option<f64>, s: &Settings) -> Result<Report> {
    let a = asymptotic_by_name(asym)?;
    let r = match (a.is_real_indexed(), m, sigma) {
        (true, None, sig) => scale_from_real_asymptotic(&a, sig.unwrap_or(1.0))?,
        (false, m, None) => scale_from_asymptotic(&a, m.unwrap_or(1))?,
        (true, Some(_), _) => bail!("{asym} is real-indexed: use --sigma"),
        (false, _, Some(_)) => bail!("{asym} is integer-indexed: use --m"),
    };
    let mut rep = Report::new("convert-scale", json!({"asym": asym, "m": m, "sigma": sigma.map(num), "settings": s.echo()}));
    let axioms = a.check_axioms(3, &s.ladder());
    rep.push(Entry::verdict("axioms", &axioms));
    rep.push(Entry::json("scale", kind_desc(&r)));
    let ladder = s.ladder();
    rep.push(Entry::verdict("monotone", &r.check_monotone(&ladder)));
    let mut t = Trace::new("values", &["n", "r_n"]);
    for n in ladder.clamp_start(r.domain_start()).iter() {
        t.push(&[n as f64, r.eval(n)]);
    }
    rep.traces.push(t);
    rep.outcome = Outcome::of(&axioms);
    Ok(rep)
}
