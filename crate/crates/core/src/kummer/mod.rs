//! Best generators of Kummer extensions `T^p = h` over fields containing
//! a primitive p-th root of unity.
//!
//! With `e' = v(z)`, a generator `h` is best when one of the following holds:
//!
//! * `v(h)` is not divisible by `p` (wild);
//! * `h` is a unit whose residue is not a p-th power (ferocious);
//! * `h = 1 + t` with `0 < v(t) < e'p`, `p` not dividing `v(t)` (wild);
//! * `h = 1 + u s^p` with `0 < v(s) < e'` and `u` a unit whose residue is
//!   not a p-th power (ferocious);
//! * `h = 1 + c z^p` with the residue of `c` outside `{x^p - x}`
//!   (unramified).
//!
//! Otherwise `h g^p` has strictly larger `v(h g^p - 1)` for an explicit `g`.
//! Since `v(h - 1) > e'p` forces `h` to be a p-th power, the improvement
//! loop always terminates.

mod ring;

use thiserror::Error;

pub use ring::{CycloElt, CycloField};

use crate::best_f::{ExtType, InvariantsReport};
use crate::residue::{ResidueElt, ResidueError};
use crate::value_group::GroupElt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KummerError {
    #[error("unusable field parameters: {0}")]
    BadField(String),
    #[error("element is zero to precision pi^{precision}")]
    ZeroToPrecision { precision: i64 },
    #[error("division by an element that is zero to precision")]
    DivisionByZero,
    #[error("residue class needs valuation 0, got {0}")]
    NotUnit(i64),
    #[error("y is only available with the transcendental layer")]
    NoIndeterminate,
    #[error("insufficient precision: v(h - 1) is only known to be at least {have}, need {needed}")]
    InsufficientPrecision { needed: i64, have: i64 },
    #[error("improvement did not raise v(h - 1) ({before} -> {after:?})")]
    NoImprovement { before: i64, after: Option<i64> },
    #[error("generator is already best or trivial; nothing to improve")]
    NotImprovable,
    #[error("the extension is trivial")]
    TrivialOutcome,
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precheck {
    Proceed {
        w_valuation: i64,
    },
    /// `v(h - 1)` is at least `bound > e'p`.
    Trivial {
        bound: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KummerVerdict {
    /// `p` does not divide `v(h)`.
    Wild {
        valuation: i64,
    },
    /// Unit with non-p-th-power residue.
    Ferocious {
        unit_residue: ResidueElt,
    },
    /// `h = 1 + t`, `p` does not divide `v(t) < e'p`.
    WildUnit {
        t: CycloElt,
        t_valuation: i64,
    },
    /// `h = 1 + u s^p` with `s = pi^s_exponent`.
    FerociousUnit {
        s_exponent: i64,
        unit_residue: ResidueElt,
    },
    /// `h = 1 + c z^p`, `c` residue outside the Artin-Schreier image.
    Unramified {
        c_residue: ResidueElt,
    },
    /// `v(h^i g^p - 1) > v(h - 1)`.
    NotBest {
        g: CycloElt,
        i: u32,
    },
    Trivial {
        bound: i64,
    },
}

impl KummerVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            KummerVerdict::Wild { .. } => "Best_i",
            KummerVerdict::Ferocious { .. } => "Best_ii",
            KummerVerdict::WildUnit { .. } => "Best_iii",
            KummerVerdict::FerociousUnit { .. } => "Best_iv",
            KummerVerdict::Unramified { .. } => "Best_v",
            KummerVerdict::NotBest { .. } => "NotBest",
            KummerVerdict::Trivial { .. } => "Trivial",
        }
    }

    pub fn is_best(&self) -> bool {
        !matches!(
            self,
            KummerVerdict::NotBest { .. } | KummerVerdict::Trivial { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KummerClassification {
    pub h: CycloElt,
    /// `h / pi^stripped`, where `pi^stripped` is a p-th power; equals `h`
    /// unless `v(h)` is a nonzero multiple of `p`.
    pub unit: CycloElt,
    pub stripped: i64,
    /// `v(unit - 1)` when known exactly.
    pub w_valuation: Option<i64>,
    pub verdict: KummerVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KummerOutcome {
    BestFound {
        h_star: CycloElt,
        steps: usize,
        classification: KummerClassification,
        trajectory: Vec<i64>,
    },
    DefectEvidence {
        trajectory: Vec<i64>,
        budget: usize,
        last: CycloElt,
    },
    Trivial {
        steps: usize,
        trajectory: Vec<i64>,
        bound: i64,
    },
}

impl KummerOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            KummerOutcome::BestFound { .. } => "BestFound",
            KummerOutcome::DefectEvidence { .. } => "DefectEvidence",
            KummerOutcome::Trivial { .. } => "Trivial",
        }
    }

    pub fn trajectory(&self) -> &[i64] {
        match self {
            KummerOutcome::BestFound { trajectory, .. }
            | KummerOutcome::DefectEvidence { trajectory, .. }
            | KummerOutcome::Trivial { trajectory, .. } => trajectory,
        }
    }
}

/// Compares `v(h - 1)` with the triviality bound `e'p`.
pub fn kummer_precheck(k: &CycloField, h: &CycloElt) -> Result<Precheck, KummerError> {
    let bound = k.triviality_bound();
    match k.valuation(&k.sub(h, &k.one())) {
        Ok(t) if t > bound => Ok(Precheck::Trivial { bound: t }),
        Ok(t) => Ok(Precheck::Proceed { w_valuation: t }),
        Err(KummerError::ZeroToPrecision { precision }) if precision > bound => {
            Ok(Precheck::Trivial { bound: precision })
        }
        Err(KummerError::ZeroToPrecision { precision }) => {
            Err(KummerError::InsufficientPrecision {
                needed: bound + 1,
                have: precision,
            })
        }
        Err(e) => Err(e),
    }
}

pub fn classify_h(k: &CycloField, h: &CycloElt) -> Result<KummerClassification, KummerError> {
    let p = k.p() as i64;
    let v = k.valuation(h)?;
    let w_val = |x: &CycloElt| k.valuation(&k.sub(x, &k.one())).ok();
    if v % p != 0 {
        return Ok(KummerClassification {
            h: h.clone(),
            unit: h.clone(),
            stripped: 0,
            w_valuation: w_val(h),
            verdict: KummerVerdict::Wild { valuation: v },
        });
    }
    let unit = if v == 0 {
        h.clone()
    } else {
        k.div(h, &k.pow(&k.pi(), v)?)?
    };
    let verdict = classify_unit(k, &unit)?;
    Ok(KummerClassification {
        h: h.clone(),
        w_valuation: w_val(&unit),
        unit,
        stripped: v,
        verdict,
    })
}

fn classify_unit(k: &CycloField, u: &CycloElt) -> Result<KummerVerdict, KummerError> {
    let res = k.residue();
    let u_bar = k.residue_class(u)?;
    let Some(root) = res.pth_root(&u_bar) else {
        return Ok(KummerVerdict::Ferocious {
            unit_residue: u_bar,
        });
    };
    if !res.is_one(&u_bar) {
        // scale the residue to 1 by a p-th power
        return Ok(KummerVerdict::NotBest {
            g: k.inv(&k.lift(&root))?,
            i: 1,
        });
    }
    let t = match kummer_precheck(k, u)? {
        Precheck::Trivial { bound } => return Ok(KummerVerdict::Trivial { bound }),
        Precheck::Proceed { w_valuation } => w_valuation,
    };
    let w = k.sub(u, &k.one());
    let p = k.p() as i64;
    if t == k.triviality_bound() {
        // z^p has angular component 1
        let c = k.angular_component(&w)?;
        return Ok(match res.artin_schreier_preimage(&c) {
            None => KummerVerdict::Unramified { c_residue: c },
            Some(x) => {
                // (1 + x z)^p = 1 + (x^p - x) z^p + higher terms
                let g = k.inv(&k.add(&k.one(), &k.mul(&k.lift(&x), &k.z())))?;
                KummerVerdict::NotBest { g, i: 1 }
            }
        });
    }
    if t % p != 0 {
        return Ok(KummerVerdict::WildUnit {
            t: w,
            t_valuation: t,
        });
    }
    let s_exponent = t / p;
    let u_w = k.angular_component(&w)?;
    match res.pth_root(&u_w) {
        None => Ok(KummerVerdict::FerociousUnit {
            s_exponent,
            unit_residue: u_w,
        }),
        Some(lambda) => {
            let s = k.pow(&k.pi(), s_exponent)?;
            let g = k.inv(&k.add(&k.mul(&k.lift(&lambda), &s), &k.one()))?;
            Ok(KummerVerdict::NotBest { g, i: 1 })
        }
    }
}

/// `v(x - 1)` as a lower bound: exact, or the precision when `x - 1`
/// vanishes to precision.
fn w_lower_bound(k: &CycloField, x: &CycloElt) -> Result<(i64, bool), KummerError> {
    match k.valuation(&k.sub(x, &k.one())) {
        Ok(v) => Ok((v, true)),
        Err(KummerError::ZeroToPrecision { precision }) => Ok((precision, false)),
        Err(e) => Err(e),
    }
}

/// `h^i g^p`, asserting `v(h' - 1) > v(h - 1)`.
pub fn improve_h(
    k: &CycloField,
    h: &CycloElt,
    g: &CycloElt,
    i: u32,
) -> Result<CycloElt, KummerError> {
    let before = k.valuation(&k.sub(h, &k.one()))?;
    let next = k.mul(&k.pow(h, i as i64)?, &k.pow(g, k.p() as i64)?);
    let (after, exact) = w_lower_bound(k, &next)?;
    if after <= before {
        return Err(KummerError::NoImprovement {
            before,
            after: exact.then_some(after),
        });
    }
    Ok(next)
}

/// Strips p-th-power monomials, then iterates classify/improve for at most
/// `budget` improvement steps. The trajectory records `v(h - 1)`.
pub fn normalize_h(
    k: &CycloField,
    h: &CycloElt,
    budget: usize,
) -> Result<KummerOutcome, KummerError> {
    if budget == 0 {
        return Err(KummerError::ZeroBudget);
    }
    let mut current = h.clone();
    let mut trajectory = Vec::new();
    let mut steps = 0;
    loop {
        let c = classify_h(k, &current)?;
        if let Some(t) = c.w_valuation {
            trajectory.push(t);
        }
        match &c.verdict {
            KummerVerdict::Trivial { bound } => {
                return Ok(KummerOutcome::Trivial {
                    steps,
                    trajectory,
                    bound: *bound,
                });
            }
            KummerVerdict::NotBest { g, i } => {
                if steps == budget {
                    return Ok(KummerOutcome::DefectEvidence {
                        trajectory,
                        budget,
                        last: c.unit,
                    });
                }
                current = improve_h(k, &c.unit, g, *i)?;
                steps += 1;
            }
            _ => {
                return Ok(KummerOutcome::BestFound {
                    h_star: c.unit.clone(),
                    steps,
                    classification: c,
                    trajectory,
                });
            }
        }
    }
}

/// Ramification data of a best verdict. The Swan conductor is reported as
/// `e'p - v(h* - 1)`.
pub fn classification_invariants(
    k: &CycloField,
    c: &KummerClassification,
) -> Result<InvariantsReport, KummerError> {
    let ext_type = match &c.verdict {
        KummerVerdict::Wild { .. } | KummerVerdict::WildUnit { .. } => ExtType::Wild,
        KummerVerdict::Ferocious { .. } | KummerVerdict::FerociousUnit { .. } => ExtType::Ferocious,
        KummerVerdict::Unramified { .. } => ExtType::Unramified,
        KummerVerdict::NotBest { .. } => return Err(KummerError::NotImprovable),
        KummerVerdict::Trivial { .. } => return Err(KummerError::TrivialOutcome),
    };
    let swan = c
        .w_valuation
        .map(|t| GroupElt::int(k.triviality_bound() - t));
    Ok(InvariantsReport::new(k.p(), ext_type, swan, true))
}

pub fn kummer_invariants(
    k: &CycloField,
    outcome: &KummerOutcome,
) -> Result<InvariantsReport, KummerError> {
    match outcome {
        KummerOutcome::BestFound { classification, .. } => {
            classification_invariants(k, classification)
        }
        KummerOutcome::DefectEvidence { .. } => {
            Ok(InvariantsReport::new(k.p(), ExtType::Defect, None, false))
        }
        KummerOutcome::Trivial { .. } => Err(KummerError::TrivialOutcome),
    }
}

/// Whether `v(h^i g^p - 1) > v(h - 1)`.
pub fn is_strictly_better(
    k: &CycloField,
    h: &CycloElt,
    g: &CycloElt,
    i: u32,
) -> Result<bool, KummerError> {
    let (before, _) = w_lower_bound(k, h)?;
    let probe = k.mul(&k.pow(h, i as i64)?, &k.pow(g, k.p() as i64)?);
    let (after, exact) = w_lower_bound(k, &probe)?;
    if !exact && after <= before {
        return Err(KummerError::InsufficientPrecision {
            needed: before + 1,
            have: after,
        });
    }
    Ok(after > before)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u64, m: u32, with_y: bool) -> CycloField {
        CycloField::new(p, m, with_y, 12).unwrap()
    }

    fn label(k: &CycloField, h: &CycloElt) -> &'static str {
        classify_h(k, h).unwrap().verdict.label()
    }

    #[test]
    fn precheck_examples() {
        let k = field(2, 1, false);
        assert_eq!(
            kummer_precheck(&k, &k.from_int(9)),
            Ok(Precheck::Trivial { bound: 3 })
        );
        assert_eq!(
            kummer_precheck(&k, &k.from_int(5)),
            Ok(Precheck::Proceed { w_valuation: 2 })
        );
        assert_eq!(
            kummer_precheck(&k, &k.from_int(3)),
            Ok(Precheck::Proceed { w_valuation: 1 })
        );
        assert!(matches!(
            kummer_precheck(&k, &k.one()),
            Ok(Precheck::Trivial { bound: 12 })
        ));
    }

    #[test]
    fn classify_examples() {
        let k = field(2, 1, false);
        assert_eq!(label(&k, &k.from_int(2)), "Best_i");
        assert_eq!(label(&k, &k.from_int(5)), "Best_v");
        assert_eq!(label(&k, &k.from_int(3)), "Best_iii");
        assert_eq!(label(&k, &k.from_int(9)), "Trivial");
        let ky = field(2, 1, true);
        assert_eq!(label(&ky, &ky.y().unwrap()), "Best_ii");
        let k2y = field(2, 2, true);
        let h = k2y.from_coeffs(&[vec![1], vec![0, 0, 1]]).unwrap();
        match classify_h(&k2y, &h).unwrap().verdict {
            KummerVerdict::FerociousUnit {
                s_exponent,
                unit_residue,
            } => {
                assert_eq!(s_exponent, 1);
                assert_eq!(Some(unit_residue), k2y.residue().indeterminate());
            }
            other => panic!("unexpected {other:?}"),
        }
        let k2 = field(2, 2, false);
        let h = k2.from_coeffs(&[vec![1, 0, 1]]).unwrap();
        let KummerVerdict::NotBest { g, i } = classify_h(&k2, &h).unwrap().verdict else {
            panic!("expected NotBest")
        };
        assert_eq!(i, 1);
        let expected = k2.inv(&k2.add(&k2.one(), &k2.pi())).unwrap();
        assert!(k2.eq_to_precision(&g, &expected));
    }

    #[test]
    fn improvement_chain() {
        let k = field(2, 2, false);
        let h = k.from_coeffs(&[vec![1, 0, 1]]).unwrap();
        let g = k.inv(&k.add(&k.one(), &k.pi())).unwrap();
        let h2 = improve_h(&k, &h, &g, 1).unwrap();
        let onepi = k.add(&k.one(), &k.pi());
        let expected = k.div(&h, &k.mul(&onepi, &onepi)).unwrap();
        assert!(k.eq_to_precision(&h2, &expected));
        assert_eq!(k.valuation(&k.sub(&h2, &k.one())), Ok(3));
        assert_eq!(label(&k, &h2), "Best_iii");
        assert!(matches!(
            improve_h(&k, &h, &k.one(), 1),
            Err(KummerError::NoImprovement {
                before: 2,
                after: Some(2)
            })
        ));
        match normalize_h(&k, &h, 4).unwrap() {
            KummerOutcome::BestFound {
                steps,
                trajectory,
                classification,
                ..
            } => {
                assert_eq!(steps, 1);
                assert_eq!(trajectory, vec![2, 3]);
                assert_eq!(classification.verdict.label(), "Best_iii");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalize_examples() {
        let k = field(2, 1, false);
        assert_eq!(
            normalize_h(&k, &k.from_int(9), 4).unwrap().label(),
            "Trivial"
        );
        match normalize_h(&k, &k.from_int(5), 4).unwrap() {
            KummerOutcome::BestFound {
                steps,
                classification,
                ..
            } => {
                assert_eq!(steps, 0);
                assert_eq!(classification.verdict.label(), "Best_v");
            }
            other => panic!("unexpected {other:?}"),
        }
        // 17 = 1 + 2 * 8 over Q_2: v(16) = 4 > 2
        assert_eq!(
            normalize_h(&k, &k.from_int(17), 4).unwrap().label(),
            "Trivial"
        );
        // 4 * 5 strips to 5
        let out = normalize_h(&k, &k.from_int(20), 4).unwrap();
        let inv = kummer_invariants(&k, &out).unwrap();
        assert_eq!(inv.ext_type, ExtType::Unramified);
        // h = 1 + (y^3 - y) z^3: the residue of c lies in the Artin-Schreier image
        let k3 = field(3, 1, true);
        let y = k3.y().unwrap();
        let c = k3.sub(&k3.pow(&y, 3).unwrap(), &y);
        let h = k3.add(&k3.one(), &k3.mul(&c, &k3.pow(&k3.z(), 3).unwrap()));
        assert_eq!(label(&k3, &h), "NotBest");
        assert_eq!(normalize_h(&k3, &h, 4).unwrap().label(), "Trivial");
        let h = k3.add(&k3.one(), &k3.pow(&k3.z(), 3).unwrap());
        assert_eq!(label(&k3, &h), "Best_v");
    }

    #[test]
    fn invariants_examples() {
        let k = field(2, 1, false);
        let inv = |h: i64| kummer_invariants(&k, &normalize_h(&k, &k.from_int(h), 4).unwrap());
        let r = inv(2).unwrap();
        assert_eq!((r.e, r.f_res, r.d, r.ext_type), (2, 1, 1, ExtType::Wild));
        assert_eq!(r.swan, Some(GroupElt::int(2)));
        let r = inv(5).unwrap();
        assert_eq!(
            (r.e, r.f_res, r.d, r.ext_type),
            (1, 2, 1, ExtType::Unramified)
        );
        assert_eq!(r.swan, Some(GroupElt::int(0)));
        let r = inv(3).unwrap();
        assert_eq!(r.swan, Some(GroupElt::int(1)));
        assert_eq!(inv(9), Err(KummerError::TrivialOutcome));
        let ky = field(2, 1, true);
        let out = normalize_h(&ky, &ky.y().unwrap(), 2).unwrap();
        let r = kummer_invariants(&ky, &out).unwrap();
        assert_eq!(
            (r.e, r.f_res, r.d, r.ext_type),
            (1, 2, 1, ExtType::Ferocious)
        );
    }

    fn random_unit(k: &CycloField, rng: &mut ChaCha8Rng) -> CycloElt {
        let rows = if k.with_y() { rng.gen_range(1..3) } else { 1 };
        let mut coeffs: Vec<Vec<i64>> = (0..rows)
            .map(|_| {
                (0..rng.gen_range(1..4))
                    .map(|_| rng.gen_range(-9..10))
                    .collect()
            })
            .collect();
        let p = k.p() as i64;
        if coeffs[0][0].rem_euclid(p) == 0 {
            coeffs[0][0] += 1;
        }
        k.from_coeffs(&coeffs).unwrap()
    }

    #[test]
    fn best_generators_cannot_be_improved_by_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(310);
        let k2 = field(2, 1, false);
        let k2y = field(2, 1, true);
        let k22y = field(2, 2, true);
        let k3 = field(3, 1, false);
        let cases = vec![
            (k2.clone(), k2.from_int(2)),
            (k2.clone(), k2.from_int(3)),
            (k2.clone(), k2.from_int(5)),
            (k2y.clone(), k2y.y().unwrap()),
            (
                k22y.clone(),
                k22y.from_coeffs(&[vec![1], vec![0, 0, 1]]).unwrap(),
            ),
            (k3.clone(), k3.add(&k3.one(), &k3.pi())),
            (k3.clone(), k3.from_int(3)),
        ];
        for (k, h) in cases {
            assert!(classify_h(&k, &h).unwrap().verdict.is_best());
            for _ in 0..200 {
                let g = random_unit(&k, &mut rng);
                for i in 1..k.p() as u32 {
                    assert!(
                        !is_strictly_better(&k, &h, &g, i).unwrap(),
                        "{}",
                        k.format(&g)
                    );
                }
            }
        }
    }

    #[test]
    fn normalization_terminates_and_respects_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, m, with_y) in [
            (2, 1, false),
            (2, 2, false),
            (2, 2, true),
            (3, 1, false),
            (3, 2, true),
        ] {
            let k = field(p, m, with_y);
            for _ in 0..25 {
                let h = random_unit(&k, &mut rng);
                let out = normalize_h(&k, &h, 32).unwrap();
                assert!(out.trajectory().windows(2).all(|w| w[0] < w[1]));
                if let Ok(r) = kummer_invariants(&k, &out) {
                    assert_eq!(r.degree(), p);
                    assert_ne!(r.ext_type, ExtType::Defect);
                }
            }
        }
    }
}
