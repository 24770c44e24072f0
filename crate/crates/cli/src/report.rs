use serde_json::{json, Value};

use valuata::best_f::{self, classical_swan};
use valuata::extension::TrivialReason;
use valuata::kummer::{self, Precheck};
use valuata::norm_ideal::{self, NormIdealError};
use valuata::{
    ASExtension, AsVerdict, CycloElt, CycloField, ExtElt, InvariantsReport, KummerClassification,
    KummerOutcome, KummerVerdict, NormalizeOutcome, SeriesElt, SeriesField,
};

use crate::CliError;

pub fn invariants_json(inv: &InvariantsReport) -> Value {
    json!({
        "e": inv.e,
        "f": inv.f_res,
        "d": inv.d,
        "type": inv.ext_type.as_str(),
        "swan": inv.swan.as_ref().map_or("undefined (defect)".to_string(), ToString::to_string),
        "certified": inv.certified,
    })
}

fn trivial_json(k: &SeriesField, reason: &TrivialReason) -> Value {
    match reason {
        TrivialReason::PositiveValuation(v) => json!({
            "reason": "positive-valuation",
            "valuation": v.as_ref().map(ToString::to_string),
        }),
        TrivialReason::ResidueInImage(x) => json!({
            "reason": "residue-in-image",
            "preimage": k.residue().format(x),
        }),
    }
}

pub fn as_witness(k: &SeriesField, verdict: &AsVerdict) -> Value {
    match verdict {
        AsVerdict::Wild { valuation } => json!({ "valuation": valuation.to_string() }),
        AsVerdict::Ferocious {
            unit,
            g_exponent,
            unit_residue,
        } => json!({
            "unit": k.format(unit),
            "g_exponent": g_exponent.to_string(),
            "unit_residue": k.residue().format(unit_residue),
        }),
        AsVerdict::Unramified { residue } => json!({ "residue": k.residue().format(residue) }),
        AsVerdict::NotBest { h } => json!({ "h": k.format(h) }),
        AsVerdict::Trivial { reason } => trivial_json(k, reason),
    }
}

pub fn analyze_as(k: &SeriesField, f: &SeriesElt) -> Result<Value, CliError> {
    let c = best_f::classify(k, f)?;
    let (invariants, swan_norm) = if c.verdict.is_best() {
        let inv = best_f::classification_invariants(k, &c)?;
        (
            invariants_json(&inv),
            json!(classical_swan(k, f)?.to_string()),
        )
    } else {
        (Value::Null, Value::Null)
    };
    Ok(json!({
        "command": "analyze-as",
        "field": k.describe(),
        "input": k.format(f),
        "valuation": c.valuation.as_ref().map(ToString::to_string),
        "verdict": c.verdict.label(),
        "witness": as_witness(k, &c.verdict),
        "invariants": invariants,
        "swan_norm": swan_norm,
        "precision_used": k.default_precision().to_string(),
    }))
}

/// `certified` marks a defect outcome as known independently of the budget.
pub fn normalize_as(
    k: &SeriesField,
    f: &SeriesElt,
    outcome: &NormalizeOutcome,
    certified: bool,
) -> Result<Value, CliError> {
    let trajectory: Vec<String> = outcome
        .trajectory()
        .iter()
        .map(ToString::to_string)
        .collect();
    let mut r = json!({
        "command": "normalize-as",
        "field": k.describe(),
        "input": k.format(f),
        "outcome": outcome.label(),
        "trajectory": trajectory,
        "precision_used": k.default_precision().to_string(),
        "invariants": Value::Null,
    });
    match outcome {
        NormalizeOutcome::BestFound {
            f_star,
            steps,
            classification,
            ..
        } => {
            r["steps"] = json!(steps);
            r["f_star"] = json!(k.format(f_star));
            r["verdict"] = json!(classification.verdict.label());
            r["witness"] = as_witness(k, &classification.verdict);
            r["invariants"] = invariants_json(&best_f::invariants(k, outcome)?);
            r["swan_norm"] = json!(classical_swan(k, f_star)?.to_string());
        }
        NormalizeOutcome::DefectEvidence { budget, last, .. } => {
            let mut inv = best_f::invariants(k, outcome)?;
            inv.certified = certified;
            r["steps"] = json!(budget);
            r["budget"] = json!(budget);
            r["last"] = json!(k.format(last));
            r["invariants"] = invariants_json(&inv);
        }
        NormalizeOutcome::Trivial { steps, reason, .. } => {
            r["steps"] = json!(steps);
            r["verdict"] = json!("Trivial");
            r["witness"] = trivial_json(k, reason);
        }
    }
    Ok(r)
}

pub fn kummer_witness(k: &CycloField, verdict: &KummerVerdict) -> Value {
    let res = |r| k.residue().format(r);
    match verdict {
        KummerVerdict::Wild { valuation } => json!({ "valuation": valuation }),
        KummerVerdict::Ferocious { unit_residue } => json!({ "unit_residue": res(unit_residue) }),
        KummerVerdict::WildUnit { t, t_valuation } => {
            json!({ "t": k.format(t), "t_valuation": t_valuation })
        }
        KummerVerdict::FerociousUnit {
            s_exponent,
            unit_residue,
        } => json!({
            "s": format!("pi^{s_exponent}"),
            "unit_residue": res(unit_residue),
        }),
        KummerVerdict::Unramified { c_residue } => json!({ "c_residue": res(c_residue) }),
        KummerVerdict::NotBest { g, i } => json!({ "g": k.format(g), "i": i }),
        KummerVerdict::Trivial { bound } => json!({ "w_valuation_at_least": bound }),
    }
}

fn kummer_classification_json(k: &CycloField, c: &KummerClassification) -> Result<Value, CliError> {
    let invariants = if c.verdict.is_best() {
        invariants_json(&kummer::classification_invariants(k, c)?)
    } else {
        Value::Null
    };
    Ok(json!({
        "verdict": c.verdict.label(),
        "witness": kummer_witness(k, &c.verdict),
        "stripped": c.stripped,
        "unit": k.format(&c.unit),
        "w_valuation": c.w_valuation,
        "invariants": invariants,
    }))
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn classify_kummer(k: &CycloField, h: &CycloElt) -> Result<Value, CliError> {
    let v = k.valuation(h)?;
    let precheck = if v == 0 {
        match kummer::kummer_precheck(k, h)? {
            Precheck::Proceed { w_valuation } => {
                json!({ "result": "Proceed", "w_valuation": w_valuation, "bound": k.triviality_bound() })
            }
            Precheck::Trivial { bound } => {
                json!({ "result": "Trivial", "w_valuation_at_least": bound, "bound": k.triviality_bound() })
            }
        }
    } else {
        Value::Null
    };
    let c = kummer::classify_h(k, h)?;
    let mut r = json!({
        "command": "classify-kummer",
        "field": k.describe(),
        "input": k.format(h),
        "valuation": v,
        "precheck": precheck,
    });
    merge(&mut r, kummer_classification_json(k, &c)?);
    Ok(r)
}

pub fn normalize_kummer(
    k: &CycloField,
    h: &CycloElt,
    outcome: &KummerOutcome,
) -> Result<Value, CliError> {
    let mut r = json!({
        "command": "normalize-kummer",
        "field": k.describe(),
        "input": k.format(h),
        "outcome": outcome.label(),
        "trajectory": outcome.trajectory(),
        "invariants": Value::Null,
    });
    match outcome {
        KummerOutcome::BestFound {
            h_star,
            steps,
            classification,
            ..
        } => {
            r["steps"] = json!(steps);
            r["h_star"] = json!(k.format(h_star));
            merge(&mut r, kummer_classification_json(k, classification)?);
        }
        KummerOutcome::DefectEvidence { budget, last, .. } => {
            r["steps"] = json!(budget);
            r["budget"] = json!(budget);
            r["last"] = json!(k.format(last));
            r["invariants"] = invariants_json(&kummer::kummer_invariants(k, outcome)?);
        }
        KummerOutcome::Trivial { steps, bound, .. } => {
            r["steps"] = json!(steps);
            r["verdict"] = json!("Trivial");
            r["witness"] = json!({ "w_valuation_at_least": bound });
        }
    }
    Ok(r)
}

/// All checks on one generator. `Ok(None)` when `b` does not generate `L`.
pub fn norm_ideal_sample(ext: &ASExtension, b: &ExtElt) -> Result<Option<Value>, CliError> {
    let k = ext.base();
    let sample = match norm_ideal::y_construct(ext, b) {
        Ok(s) => s,
        Err(NormIdealError::NotAGenerator(..) | NormIdealError::FixedElement) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let trace = match norm_ideal::verify_trace_lemma(ext, b) {
        Ok(_) => json!("ok"),
        Err(e @ NormIdealError::IdentityViolated { .. }) => json!(e.to_string()),
        Err(e) => return Err(e.into()),
    };
    let mut independent = true;
    for j in 2..ext.p() {
        independent &= norm_ideal::lefschetz_val_power(ext, b, j)? == sample.s;
    }
    let s_holds = sample.s >= sample.s_prime;
    Ok(Some(json!({
        "b": ext.format(b),
        "unit": ext.valuation_l(b)?.is_zero(),
        "s": sample.s.to_string(),
        "s_prime": sample.s_prime.to_string(),
        "c": sample.c.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "y": ext.format(&sample.y),
        "as_constant": k.format(&sample.as_constant),
        "trace_lemma": trace,
        "sigma_power_independent": independent,
        "s_ge_s_prime": s_holds,
        "pass": s_holds && independent && trace == "ok",
    })))
}

pub fn verify_norm_ideal(
    ext: &ASExtension,
    given: &[ExtElt],
    random: &[ExtElt],
    budget: usize,
) -> Result<Value, CliError> {
    let k = ext.base();
    let mut samples = Vec::new();
    let mut skipped = 0;
    let tagged = given
        .iter()
        .map(|b| ("given", b))
        .chain(random.iter().map(|b| ("random", b)));
    for (source, b) in tagged {
        match norm_ideal_sample(ext, b)? {
            Some(mut s) => {
                s["source"] = json!(source);
                samples.push(s);
            }
            None => skipped += 1,
        }
    }
    let passed = samples.iter().filter(|s| s["pass"] == json!(true)).count();
    let hn = match best_f::normalize(k, ext.f(), budget.max(1))? {
        out @ NormalizeOutcome::BestFound { .. } => {
            let swan = norm_ideal::hn_defectless_check(k, &out)?;
            json!({ "outcome": out.label(), "swan": swan.to_string() })
        }
        out => json!({ "outcome": out.label() }),
    };
    Ok(json!({
        "command": "verify-norm-ideal",
        "field": k.describe(),
        "extension": { "p": ext.p(), "f": k.format(ext.f()) },
        "samples": samples,
        "total": samples.len(),
        "passed": passed,
        "skipped": skipped,
        "all_pass": passed == samples.len(),
        "hn_check": hn,
    }))
}
