//! Built-in instances with expected report fields.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use valuata::best_f::{self, NormalizeOutcome};
use valuata::kummer::{self, KummerOutcome};
use valuata::{
    parse_expr, ASExtension, CycloElt, CycloField, GroupElt, GroupKind, SeriesElt, SeriesField,
};

use crate::{report, sampling, CliError, Command, FieldSpec, Request};

pub const PROBES: usize = 200;
pub const NORM_IDEAL_SAMPLES: usize = 34;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub request: Request,
    /// JSON pointer into the report and the value expected there.
    pub expect: Vec<(&'static str, Value)>,
    /// Defect known independently of the budget.
    pub defect_certified: bool,
}

fn entry(
    name: &'static str,
    command: Command,
    field: FieldSpec,
    expr: &str,
    expect: Vec<(&'static str, Value)>,
) -> CorpusEntry {
    CorpusEntry {
        name,
        request: Request::new(command).with_field(field).with_expr(expr),
        expect,
        defect_certified: false,
    }
}

fn hull(p: u64) -> FieldSpec {
    FieldSpec::series(p, GroupKind::IntInvP, &format!("gf:{p}"), GroupElt::int(16))
}

fn lex2() -> FieldSpec {
    FieldSpec::series(
        2,
        GroupKind::Lex2,
        "gf:2",
        GroupElt::pair_frac((16, 1), (0, 1)),
    )
}

fn best(verdict: &str, ty: &str, e: u64, f: u64, swan: &str) -> Vec<(&'static str, Value)> {
    vec![
        ("/verdict", json!(verdict)),
        ("/invariants/type", json!(ty)),
        ("/invariants/e", json!(e)),
        ("/invariants/f", json!(f)),
        ("/invariants/d", json!(1)),
        ("/invariants/swan", json!(swan)),
    ]
}

fn with(
    mut v: Vec<(&'static str, Value)>,
    more: &[(&'static str, Value)],
) -> Vec<(&'static str, Value)> {
    v.extend_from_slice(more);
    v
}

pub fn corpus() -> Vec<CorpusEntry> {
    use Command::*;
    let gf2 = || FieldSpec::laurent("gf:2");
    let gf3 = || FieldSpec::laurent("gf:3");
    let q2 = || FieldSpec::cyclo(2, 1, false);
    let trivial = vec![
        ("/outcome", json!("Trivial")),
        ("/verdict", json!("Trivial")),
    ];
    let best_found = |steps: usize| [("/outcome", json!("BestFound")), ("/steps", json!(steps))];
    let mut v = vec![
        entry(
            "laurent(p=2,n=3)",
            NormalizeAs,
            gf2(),
            "X^(-3)",
            with(best("Best_i", "wild", 2, 1, "3"), &best_found(0)),
        ),
        entry(
            "laurent(p=2,n=5)",
            NormalizeAs,
            gf2(),
            "X^(-5)",
            with(best("Best_i", "wild", 2, 1, "5"), &best_found(0)),
        ),
        entry(
            "laurent(p=3,n=2)",
            NormalizeAs,
            gf3(),
            "X^(-2)",
            with(best("Best_i", "wild", 3, 1, "2"), &best_found(0)),
        ),
        entry(
            "laurent(p=3,n=4)",
            NormalizeAs,
            gf3(),
            "X^(-4)",
            with(best("Best_i", "wild", 3, 1, "4"), &best_found(0)),
        ),
        entry(
            "motivating(p=2,n=3)",
            NormalizeAs,
            gf2(),
            "X^(-6)",
            with(
                best("Best_i", "wild", 2, 1, "3"),
                &[
                    ("/f_star", json!("X^(-3)")),
                    ("/trajectory", json!(["-6", "-3"])),
                    best_found(1)[0].clone(),
                    best_found(1)[1].clone(),
                ],
            ),
        ),
        entry(
            "motivating(p=3,n=2)",
            NormalizeAs,
            gf3(),
            "X^(-6)",
            with(
                best("Best_i", "wild", 3, 1, "2"),
                &[
                    ("/f_star", json!("X^(-2)")),
                    best_found(1)[0].clone(),
                    best_found(1)[1].clone(),
                ],
            ),
        ),
        entry(
            "ferocious(p=2)",
            NormalizeAs,
            FieldSpec::laurent("ratfunc:2"),
            "y*X^(-2)",
            with(best("Best_ii", "ferocious", 1, 2, "2"), &best_found(0)),
        ),
        entry(
            "ferocious(p=3)",
            NormalizeAs,
            FieldSpec::laurent("ratfunc:3"),
            "y*X^(-3)",
            with(best("Best_ii", "ferocious", 1, 3, "3"), &best_found(0)),
        ),
        entry(
            "ferocious-after-step(p=2)",
            NormalizeAs,
            FieldSpec::laurent("ratfunc:2"),
            "y*X^(-2) + X^(-4)",
            with(best("Best_ii", "ferocious", 1, 2, "2"), &best_found(1)),
        ),
        entry(
            "unramified(GF(2))",
            NormalizeAs,
            gf2(),
            "1",
            with(best("Best_iii", "unramified", 1, 2, "0"), &best_found(0)),
        ),
        entry(
            "unramified(GF(4),w)",
            NormalizeAs,
            FieldSpec::laurent("gf:4"),
            "w",
            with(best("Best_iii", "unramified", 1, 2, "0"), &best_found(0)),
        ),
        entry(
            "unramified(GF(3))",
            NormalizeAs,
            gf3(),
            "1",
            with(best("Best_iii", "unramified", 1, 3, "0"), &best_found(0)),
        ),
        entry(
            "unramified-after-step(p=2)",
            NormalizeAs,
            gf2(),
            "X^(-2) + X^(-1) + 1",
            with(
                best("Best_iii", "unramified", 1, 2, "0"),
                &[
                    ("/f_star", json!("1")),
                    best_found(1)[0].clone(),
                    best_found(1)[1].clone(),
                ],
            ),
        ),
        CorpusEntry {
            defect_certified: true,
            ..entry(
                "hull-defect(p=2)",
                NormalizeAs,
                hull(2),
                "X^(-1)",
                vec![
                    ("/outcome", json!("DefectEvidence")),
                    ("/invariants/type", json!("defect")),
                    ("/invariants/d", json!(2)),
                    ("/invariants/e", json!(1)),
                    ("/invariants/f", json!(1)),
                    ("/invariants/certified", json!(true)),
                    ("/trajectory/12", json!("-1/4096")),
                ],
            )
        },
        CorpusEntry {
            defect_certified: true,
            ..entry(
                "hull-defect(p=3)",
                NormalizeAs,
                FieldSpec::series(3, GroupKind::IntInvP, "gf:3", GroupElt::int(8)),
                "X^(-1)",
                vec![
                    ("/outcome", json!("DefectEvidence")),
                    ("/invariants/type", json!("defect")),
                    ("/invariants/d", json!(3)),
                    ("/trajectory/4", json!("-1/81")),
                ],
            )
        },
        entry(
            "trivial-positive(p=2)",
            NormalizeAs,
            gf2(),
            "X^(2)",
            trivial.clone(),
        ),
        entry(
            "trivial-residue(GF(4))",
            NormalizeAs,
            FieldSpec::laurent("gf:4"),
            "1",
            trivial.clone(),
        ),
        entry(
            "trivial-after-step(p=2)",
            NormalizeAs,
            gf2(),
            "X^(-2) + X^(-1)",
            with(trivial.clone(), &[("/steps", json!(1))]),
        ),
        entry(
            "kummer-Q2-sqrt2",
            NormalizeKummer,
            q2(),
            "2",
            with(best("Best_i", "wild", 2, 1, "2"), &best_found(0)),
        ),
        entry(
            "kummer-Q2-sqrt3",
            NormalizeKummer,
            q2(),
            "3",
            with(best("Best_iii", "wild", 2, 1, "1"), &best_found(0)),
        ),
        entry(
            "kummer-Q2-sqrt5",
            NormalizeKummer,
            q2(),
            "5",
            with(best("Best_v", "unramified", 1, 2, "0"), &best_found(0)),
        ),
        entry(
            "kummer-Q2-sqrt20",
            NormalizeKummer,
            q2(),
            "20",
            with(best("Best_v", "unramified", 1, 2, "0"), &best_found(0)),
        ),
        entry(
            "kummer-Q2y-sqrty",
            NormalizeKummer,
            FieldSpec::cyclo(2, 1, true),
            "y",
            with(best("Best_ii", "ferocious", 1, 2, "2"), &best_found(0)),
        ),
        entry(
            "kummer-m2-1+y*pi^2",
            NormalizeKummer,
            FieldSpec::cyclo(2, 2, true),
            "1 + y*pi^2",
            with(best("Best_iv", "ferocious", 1, 2, "2"), &best_found(0)),
        ),
        entry(
            "kummer-m2-chain",
            NormalizeKummer,
            FieldSpec::cyclo(2, 2, false),
            "1 + pi^2",
            with(
                best("Best_iii", "wild", 2, 1, "1"),
                &[
                    ("/trajectory", json!([2, 3])),
                    best_found(1)[0].clone(),
                    best_found(1)[1].clone(),
                ],
            ),
        ),
        entry(
            "kummer-Q3-z",
            NormalizeKummer,
            FieldSpec::cyclo(3, 1, false),
            "z",
            with(best("Best_i", "wild", 3, 1, "3"), &best_found(0)),
        ),
        entry(
            "kummer-Q3-1+z^3",
            NormalizeKummer,
            FieldSpec::cyclo(3, 1, false),
            "1 + z^3",
            with(best("Best_v", "unramified", 1, 3, "0"), &best_found(0)),
        ),
        entry("kummer-Q2-9", NormalizeKummer, q2(), "9", trivial.clone()),
        entry(
            "classify-Q2-sqrt5",
            ClassifyKummer,
            q2(),
            "5",
            vec![
                ("/verdict", json!("Best_v")),
                ("/precheck/result", json!("Proceed")),
            ],
        ),
        entry(
            "classify-Q2-9",
            ClassifyKummer,
            q2(),
            "9",
            vec![
                ("/verdict", json!("Trivial")),
                ("/precheck/result", json!("Trivial")),
            ],
        ),
        entry(
            "classify-m2-1+pi^2",
            ClassifyKummer,
            FieldSpec::cyclo(2, 2, false),
            "1 + pi^2",
            vec![("/verdict", json!("NotBest")), ("/witness/i", json!(1))],
        ),
    ];
    for (name, budget) in [("hull-defect(p=2)", 12), ("hull-defect(p=3)", 4)] {
        let e = v
            .iter_mut()
            .find(|e| e.name == name)
            .expect("defect entries exist");
        e.request.budget = budget;
    }
    for (name, field, f) in [
        ("norm-ideal-laurent", gf2(), "X^(-3)"),
        ("norm-ideal-hull-defect", hull(2), "X^(-1)"),
        ("norm-ideal-lex2", lex2(), "X^((-1, 0))"),
    ] {
        let mut e = entry(
            name,
            VerifyNormIdeal,
            field,
            f,
            vec![("/all_pass", json!(true))],
        );
        e.request.samples = NORM_IDEAL_SAMPLES;
        e.request.budget = 8;
        v.push(e);
    }
    v
}

/// Number of probes `h` (and all `i`) that beat `f*`.
pub fn probe_as(
    k: &SeriesField,
    f_star: &SeriesElt,
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<usize, CliError> {
    let v = k
        .valuation(f_star)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut violations = 0;
    for _ in 0..probes {
        let h = sampling::as_probe(k, rng, &v);
        for i in 1..k.p() as i64 {
            if best_f::is_strictly_better(k, f_star, &h, i)? {
                violations += 1;
            }
        }
    }
    Ok(violations)
}

/// Number of unit probes `g` (and all `i`) that beat `h*`.
pub fn probe_kummer(
    k: &CycloField,
    h_star: &CycloElt,
    probes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<usize, CliError> {
    let mut violations = 0;
    for _ in 0..probes {
        let g = sampling::cyclo_unit(k, rng);
        for i in 1..k.p() as u32 {
            if kummer::is_strictly_better(k, h_star, &g, i)? {
                violations += 1;
            }
        }
    }
    Ok(violations)
}

/// Runs one entry; returns the report and probe counts `(probes, violations)`.
pub fn run_entry(e: &CorpusEntry, rng: &mut ChaCha8Rng) -> Result<(Value, usize, usize), CliError> {
    let req = &e.request;
    let spec = req.field.clone().expect("corpus entries carry a field");
    let expr = req
        .expr
        .as_deref()
        .expect("corpus entries carry an expression");
    let parse = |err: valuata::ParseError| CliError::Usage(err.to_string());
    Ok(match req.command {
        Command::NormalizeAs => {
            let k = spec.build_series()?;
            let f = parse_expr(expr, &k).map_err(parse)?;
            let out = best_f::normalize(&k, &f, req.budget)?;
            let r = report::normalize_as(&k, &f, &out, e.defect_certified)?;
            match &out {
                NormalizeOutcome::BestFound { f_star, .. } => {
                    (r, PROBES, probe_as(&k, f_star, PROBES, rng)?)
                }
                _ => (r, 0, 0),
            }
        }
        Command::NormalizeKummer => {
            let k = spec.build_cyclo()?;
            let h = parse_expr(expr, &k).map_err(parse)?;
            let out = kummer::normalize_h(&k, &h, req.budget)?;
            let r = report::normalize_kummer(&k, &h, &out)?;
            match &out {
                KummerOutcome::BestFound { h_star, .. } => {
                    (r, PROBES, probe_kummer(&k, h_star, PROBES, rng)?)
                }
                _ => (r, 0, 0),
            }
        }
        Command::VerifyNormIdeal => {
            let k = spec.build_series()?;
            let f = parse_expr(expr, &k).map_err(parse)?;
            let ext = ASExtension::new(k, f)?;
            let random = sampling::generators(&ext, rng, req.samples);
            (
                report::verify_norm_ideal(&ext, &[], &random, req.budget)?,
                0,
                0,
            )
        }
        _ => (crate::run(req)?.report, 0, 0),
    })
}

/// Fields whose value differs from the expectation, plus a failed
/// `p = d e f` check when invariants are present.
pub fn mismatches(e: &CorpusEntry, report: &Value, p: u64) -> Vec<String> {
    let mut out: Vec<String> = e
        .expect
        .iter()
        .filter(|(ptr, want)| report.pointer(ptr).unwrap_or(&Value::Null) != want)
        .map(|(ptr, want)| {
            format!(
                "{ptr}: expected {want}, got {}",
                report.pointer(ptr).unwrap_or(&Value::Null)
            )
        })
        .collect();
    let inv = &report["invariants"];
    if let (Some(d), Some(ee), Some(f)) = (inv["d"].as_u64(), inv["e"].as_u64(), inv["f"].as_u64())
    {
        if d * ee * f != p {
            out.push(format!("p = d e f failed: {d} * {ee} * {f} != {p}"));
        }
    }
    out
}

fn field_p(spec: &FieldSpec) -> u64 {
    match spec {
        FieldSpec::Series { p, .. } | FieldSpec::Cyclo { p, .. } => *p,
    }
}

pub fn run_corpus(seed: u64) -> Result<Value, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let mut passed = 0;
    for e in corpus() {
        let (report, probes, violations) = run_entry(&e, &mut rng)?;
        let spec = e
            .request
            .field
            .as_ref()
            .expect("corpus entries carry a field");
        let mut bad = mismatches(&e, &report, field_p(spec));
        if violations > 0 {
            bad.push(format!(
                "{violations} probes produced a strictly better generator"
            ));
        }
        let pass = bad.is_empty();
        passed += pass as usize;
        entries.push(json!({
            "name": e.name,
            "command": e.request.command.name(),
            "field": spec.to_json(),
            "expr": e.request.expr,
            "pass": pass,
            "mismatches": bad,
            "probes": { "count": probes, "violations": violations },
            "report": report,
        }));
    }
    let total = entries.len();
    Ok(json!({
        "command": "run-corpus",
        "entries": entries,
        "total": total,
        "passed": passed,
        "all_pass": passed == total,
    }))
}
