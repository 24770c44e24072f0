//! Classification and normalization of Artin-Schreier generators.
//!
//! A generator `f` of `T^p - T = f` is *best* when no `f + h^p - h` (up to a
//! unit multiple `i` in `1..p`) has strictly larger valuation. A best `f`
//! exists iff the extension is defectless, and is recognized by one of three
//! local conditions:
//!
//! * wild: `v(f) < 0` is not divisible by `p` in the value group;
//! * ferocious: `f = u g^-p` with `u` a unit whose residue is not a p-th power;
//! * unramified: `f` is a unit whose residue is not of the form `x^p - x`.
//!
//! Otherwise an explicit `h` raises `v(f)`, and [`normalize`] iterates that
//! step. When the value group is discrete the iteration terminates; when it
//! does not within the budget, the strictly increasing trajectory is
//! returned as evidence of defect.

use thiserror::Error;

use crate::extension::{ASExtension, ExtError, TrivialReason};
use crate::residue::ResidueElt;
use crate::series::{SeriesElt, SeriesError, SeriesField, ValuationBound};
use crate::value_group::GroupElt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BestError {
    #[error("insufficient precision to classify: {0}")]
    InsufficientPrecision(SeriesError),
    #[error("improvement did not raise the valuation ({before} -> {after:?})")]
    NoImprovement {
        before: GroupElt,
        after: Option<GroupElt>,
    },
    #[error("generator is already best or trivial; nothing to improve")]
    NotImprovable,
    #[error("the extension is trivial")]
    TrivialOutcome,
    #[error("Swan conductor mismatch: norm side {norm_side}, generator side {generator_side}")]
    Mismatch {
        norm_side: GroupElt,
        generator_side: GroupElt,
    },
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Extension(#[from] ExtError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AsVerdict {
    /// `v(f) < 0` and not p-divisible.
    Wild {
        valuation: GroupElt,
    },
    /// `f = u X^v` with `X^v = g^-p`, `u` a unit with non-p-th-power residue.
    Ferocious {
        unit: SeriesElt,
        g_exponent: GroupElt,
        unit_residue: ResidueElt,
    },
    /// `f` a unit whose residue lies outside `{x^p - x}`.
    Unramified {
        residue: ResidueElt,
    },
    /// `v(f + h^p - h) > v(f)` for this `h`.
    NotBest {
        h: SeriesElt,
    },
    Trivial {
        reason: TrivialReason,
    },
}

impl AsVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            AsVerdict::Wild { .. } => "Best_i",
            AsVerdict::Ferocious { .. } => "Best_ii",
            AsVerdict::Unramified { .. } => "Best_iii",
            AsVerdict::NotBest { .. } => "NotBest",
            AsVerdict::Trivial { .. } => "Trivial",
        }
    }

    pub fn is_best(&self) -> bool {
        matches!(
            self,
            AsVerdict::Wild { .. } | AsVerdict::Ferocious { .. } | AsVerdict::Unramified { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsClassification {
    pub f: SeriesElt,
    /// `None` only for trivial verdicts without a finite valuation.
    pub valuation: Option<GroupElt>,
    pub verdict: AsVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtType {
    Unramified,
    Wild,
    Ferocious,
    Defect,
}

impl ExtType {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtType::Unramified => "unramified",
            ExtType::Wild => "wild",
            ExtType::Ferocious => "ferocious",
            ExtType::Defect => "defect",
        }
    }
}

/// Ramification data with `p = d * e * f_res`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantsReport {
    pub e: u64,
    pub f_res: u64,
    pub d: u64,
    pub ext_type: ExtType,
    /// `None` for defect extensions, where no best generator exists.
    pub swan: Option<GroupElt>,
    /// False when the report rests on budget exhaustion alone.
    pub certified: bool,
}

impl InvariantsReport {
    pub fn new(p: u64, ext_type: ExtType, swan: Option<GroupElt>, certified: bool) -> Self {
        let (e, f_res, d) = match ext_type {
            ExtType::Wild => (p, 1, 1),
            ExtType::Ferocious | ExtType::Unramified => (1, p, 1),
            ExtType::Defect => (1, 1, p),
        };
        InvariantsReport {
            e,
            f_res,
            d,
            ext_type,
            swan,
            certified,
        }
    }

    pub fn degree(&self) -> u64 {
        self.d * self.e * self.f_res
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeOutcome {
    BestFound {
        f_star: SeriesElt,
        steps: usize,
        classification: AsClassification,
        trajectory: Vec<GroupElt>,
    },
    DefectEvidence {
        trajectory: Vec<GroupElt>,
        budget: usize,
        last: SeriesElt,
    },
    Trivial {
        steps: usize,
        trajectory: Vec<GroupElt>,
        reason: TrivialReason,
    },
}

impl NormalizeOutcome {
    pub fn trajectory(&self) -> &[GroupElt] {
        match self {
            NormalizeOutcome::BestFound { trajectory, .. }
            | NormalizeOutcome::DefectEvidence { trajectory, .. }
            | NormalizeOutcome::Trivial { trajectory, .. } => trajectory,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            NormalizeOutcome::BestFound { .. } => "BestFound",
            NormalizeOutcome::DefectEvidence { .. } => "DefectEvidence",
            NormalizeOutcome::Trivial { .. } => "Trivial",
        }
    }
}

/// Decides which of the best conditions `f` meets, or produces an improving
/// `h`, or detects a trivial extension.
pub fn classify(k: &SeriesField, f: &SeriesElt) -> Result<AsClassification, BestError> {
    let trivial = |valuation: Option<GroupElt>, reason| AsClassification {
        f: f.clone(),
        valuation,
        verdict: AsVerdict::Trivial { reason },
    };
    let v = match f.valuation_bound() {
        ValuationBound::Infinite => {
            return Ok(trivial(None, TrivialReason::PositiveValuation(None)));
        }
        ValuationBound::AtLeast(bound) if bound.is_positive() => {
            return Ok(trivial(None, TrivialReason::PositiveValuation(Some(bound))));
        }
        ValuationBound::AtLeast(bound) => {
            return Err(BestError::InsufficientPrecision(
                SeriesError::ZeroToPrecision { precision: bound },
            ));
        }
        ValuationBound::Exact(v) => v,
    };
    let done = |verdict| {
        Ok(AsClassification {
            f: f.clone(),
            valuation: Some(v.clone()),
            verdict,
        })
    };
    if v.is_positive() {
        return done(AsVerdict::Trivial {
            reason: TrivialReason::PositiveValuation(Some(v.clone())),
        });
    }
    let residue = k.residue();
    if v.is_zero() {
        let r = k
            .residue_class(f)
            .map_err(BestError::InsufficientPrecision)?;
        return match residue.artin_schreier_preimage(&r) {
            // (-x)^p - (-x) = -(x^p - x) cancels the constant term
            Some(x) => done(AsVerdict::NotBest {
                h: k.neg(&k.lift(&x)),
            }),
            None => done(AsVerdict::Unramified { residue: r }),
        };
    }
    let Some(root_exp) = k.group().is_p_divisible(&v) else {
        return done(AsVerdict::Wild {
            valuation: v.clone(),
        });
    };
    // f = u g^-p with g = X^(-v/p), so u = f X^(-v)
    let unit = k.shift(f, &v.neg(), &residue.one());
    let unit_residue = k
        .residue_class(&unit)
        .map_err(BestError::InsufficientPrecision)?;
    match residue.pth_root(&unit_residue) {
        None => done(AsVerdict::Ferocious {
            unit,
            g_exponent: root_exp.neg(),
            unit_residue,
        }),
        Some(r) => {
            // h = -lambda g^-1 with lambda^p = residue of u
            let h = k.monomial(root_exp, residue.neg(&r))?;
            done(AsVerdict::NotBest { h })
        }
    }
}

/// `f + h^p - h`, asserting the valuation strictly increases.
pub fn improve(k: &SeriesField, f: &SeriesElt, h: &SeriesElt) -> Result<SeriesElt, BestError> {
    let before = k.valuation(f)?;
    let next = k.artin_schreier_shift(f, h);
    let strictly_better = match next.valuation_bound() {
        ValuationBound::Exact(v) => v > before,
        ValuationBound::AtLeast(bound) => bound > before,
        ValuationBound::Infinite => true,
    };
    if !strictly_better {
        return Err(BestError::NoImprovement {
            before,
            after: k.valuation(&next).ok(),
        });
    }
    Ok(next)
}

/// Iterates classify/improve for at most `budget` improvement steps.
pub fn normalize(
    k: &SeriesField,
    f: &SeriesElt,
    budget: usize,
) -> Result<NormalizeOutcome, BestError> {
    if budget == 0 {
        return Err(BestError::ZeroBudget);
    }
    let mut current = f.clone();
    let mut trajectory = Vec::new();
    let mut steps = 0;
    loop {
        let c = classify(k, &current)?;
        if let Some(v) = &c.valuation {
            trajectory.push(v.clone());
        }
        match c.verdict {
            AsVerdict::Trivial { reason } => {
                return Ok(NormalizeOutcome::Trivial {
                    steps,
                    trajectory,
                    reason,
                });
            }
            AsVerdict::NotBest { h } => {
                if steps == budget {
                    return Ok(NormalizeOutcome::DefectEvidence {
                        trajectory,
                        budget,
                        last: current,
                    });
                }
                current = improve(k, &current, &h)?;
                steps += 1;
            }
            _ => {
                return Ok(NormalizeOutcome::BestFound {
                    f_star: current,
                    steps,
                    classification: c,
                    trajectory,
                });
            }
        }
    }
}

/// Invariants of a best classification: `(e, f, d)` and the Swan conductor
/// `-v(f)`.
pub fn classification_invariants(
    k: &SeriesField,
    c: &AsClassification,
) -> Result<InvariantsReport, BestError> {
    let p = k.p();
    let ext_type = match &c.verdict {
        AsVerdict::Wild { .. } => ExtType::Wild,
        AsVerdict::Ferocious { .. } => ExtType::Ferocious,
        AsVerdict::Unramified { .. } => ExtType::Unramified,
        AsVerdict::NotBest { .. } => return Err(BestError::NotImprovable),
        AsVerdict::Trivial { .. } => return Err(BestError::TrivialOutcome),
    };
    let swan = c.valuation.as_ref().map(GroupElt::neg);
    Ok(InvariantsReport::new(p, ext_type, swan, true))
}

/// Invariants of a normalization outcome. Defect evidence is reported as
/// uncertified; callers holding an independent certificate may flip the flag.
pub fn invariants(
    k: &SeriesField,
    outcome: &NormalizeOutcome,
) -> Result<InvariantsReport, BestError> {
    match outcome {
        NormalizeOutcome::BestFound { classification, .. } => {
            classification_invariants(k, classification)
        }
        NormalizeOutcome::DefectEvidence { .. } => {
            Ok(InvariantsReport::new(k.p(), ExtType::Defect, None, false))
        }
        NormalizeOutcome::Trivial { .. } => Err(BestError::TrivialOutcome),
    }
}

/// Checks `v(N(1/a)) = -v(f*)` for the extension generated by a best `f*`
/// and returns the common value.
pub fn classical_swan(k: &SeriesField, f_star: &SeriesElt) -> Result<GroupElt, BestError> {
    let ext = ASExtension::new(k.clone(), f_star.clone())?;
    let inv_alpha = ext.invert_ext(&ext.alpha())?;
    let norm_side = k.valuation(&ext.norm(&inv_alpha)?)?;
    let generator_side = k.valuation(f_star)?.neg();
    if norm_side != generator_side {
        return Err(BestError::Mismatch {
            norm_side,
            generator_side,
        });
    }
    Ok(norm_side)
}

/// Whether `i (f + h^p - h)` has strictly larger valuation than `f`.
pub fn is_strictly_better(
    k: &SeriesField,
    f: &SeriesElt,
    h: &SeriesElt,
    i: i64,
) -> Result<bool, BestError> {
    let before = k.valuation(f)?;
    let candidate = k.mul_int(&k.artin_schreier_shift(f, h), i);
    Ok(match candidate.valuation_bound() {
        ValuationBound::Exact(v) => v > before,
        ValuationBound::Infinite => true,
        ValuationBound::AtLeast(bound) if bound > before => true,
        ValuationBound::AtLeast(bound) => {
            return Err(BestError::InsufficientPrecision(
                SeriesError::ZeroToPrecision { precision: bound },
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::ResidueField;
    use crate::value_group::{GroupKind, ValueGroup};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laurent(q: u64) -> SeriesField {
        SeriesField::laurent(ResidueField::gf(q).unwrap(), 16).unwrap()
    }

    fn hull() -> SeriesField {
        SeriesField::new(
            ResidueField::gf(2).unwrap(),
            ValueGroup::new(GroupKind::IntInvP, 2),
            GroupElt::int(16),
        )
        .unwrap()
    }

    fn ratfunc2() -> SeriesField {
        SeriesField::laurent(ResidueField::ratfunc(2).unwrap(), 16).unwrap()
    }

    fn x(k: &SeriesField, n: i64) -> SeriesElt {
        k.x_pow(GroupElt::int(n)).unwrap()
    }

    #[test]
    fn classify_examples() {
        let k = laurent(2);
        assert_eq!(classify(&k, &x(&k, -3)).unwrap().verdict.label(), "Best_i");
        let c = classify(&k, &k.one()).unwrap();
        assert_eq!(c.verdict.label(), "Best_iii");
        let c = classify(&k, &x(&k, -6)).unwrap();
        assert_eq!(c.verdict, AsVerdict::NotBest { h: x(&k, -3) });

        let r = ratfunc2();
        let y = r.residue().indeterminate().unwrap();
        let f = r.monomial(GroupElt::int(-2), y.clone()).unwrap();
        match classify(&r, &f).unwrap().verdict {
            AsVerdict::Ferocious {
                unit_residue,
                g_exponent,
                ..
            } => {
                assert_eq!(unit_residue, y);
                assert_eq!(g_exponent, GroupElt::int(1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classify_trivial_and_precision_cases() {
        let k = laurent(2);
        assert_eq!(classify(&k, &x(&k, 1)).unwrap().verdict.label(), "Trivial");
        assert_eq!(
            classify(&k, &k.zero_to(GroupElt::int(2)))
                .unwrap()
                .verdict
                .label(),
            "Trivial"
        );
        assert!(matches!(
            classify(&k, &k.zero_to(GroupElt::int(-2))),
            Err(BestError::InsufficientPrecision(_))
        ));
        // residue 1 over GF(4) is w^2 + w: shift to a positive valuation
        let k4 = laurent(4);
        let c = classify(&k4, &k4.one()).unwrap();
        let AsVerdict::NotBest { h } = c.verdict else {
            panic!("expected NotBest")
        };
        let next = improve(&k4, &k4.one(), &h).unwrap();
        assert!(next.has_no_terms());
    }

    #[test]
    fn improve_examples() {
        let k = laurent(2);
        assert_eq!(improve(&k, &x(&k, -6), &x(&k, -3)), Ok(x(&k, -3)));
        let h = hull();
        let half = h.x_pow(GroupElt::frac(-1, 2)).unwrap();
        assert_eq!(improve(&h, &x(&h, -1), &half), Ok(half));

        // f = X^-2 + X^-1 over GF(2): u = 1 + X, h = X^-1, and the X^-1 terms cancel
        let f = k.add(&x(&k, -2), &x(&k, -1));
        let AsVerdict::NotBest { h } = classify(&k, &f).unwrap().verdict else {
            panic!("expected NotBest")
        };
        assert_eq!(h, x(&k, -1));
        let next = improve(&k, &f, &h).unwrap();
        assert!(next.is_exact_zero());
        assert!(matches!(
            improve(&k, &x(&k, -3), &k.zero()),
            Err(BestError::NoImprovement { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        let k = laurent(2);
        match normalize(&k, &x(&k, -6), 5).unwrap() {
            NormalizeOutcome::BestFound {
                f_star,
                steps,
                classification,
                trajectory,
            } => {
                assert_eq!(f_star, x(&k, -3));
                assert_eq!(steps, 1);
                assert_eq!(classification.verdict.label(), "Best_i");
                assert_eq!(trajectory, vec![GroupElt::int(-6), GroupElt::int(-3)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let h = hull();
        match normalize(&h, &x(&h, -1), 10).unwrap() {
            NormalizeOutcome::DefectEvidence {
                trajectory, budget, ..
            } => {
                assert_eq!(budget, 10);
                let expected: Vec<_> = (0..=10).map(|t| GroupElt::frac(-1, 1 << t)).collect();
                assert_eq!(trajectory, expected);
            }
            other => panic!("unexpected {other:?}"),
        }
        for p in [2u64, 3, 5] {
            let k = laurent(p);
            assert_eq!(normalize(&k, &x(&k, 1), 3).unwrap().label(), "Trivial");
        }
        assert_eq!(normalize(&k, &x(&k, -1), 0), Err(BestError::ZeroBudget));
    }

    #[test]
    fn invariants_examples() {
        let k = laurent(2);
        let out = normalize(&k, &x(&k, -3), 4).unwrap();
        let inv = invariants(&k, &out).unwrap();
        assert_eq!((inv.e, inv.f_res, inv.d), (2, 1, 1));
        assert_eq!(inv.ext_type, ExtType::Wild);
        assert_eq!(inv.swan, Some(GroupElt::int(3)));

        let k3 = laurent(3);
        let out = normalize(&k3, &k3.one(), 4).unwrap();
        let inv = invariants(&k3, &out).unwrap();
        assert_eq!(
            (inv.e, inv.f_res, inv.d, inv.ext_type),
            (1, 3, 1, ExtType::Unramified)
        );
        assert_eq!(inv.swan, Some(GroupElt::int(0)));

        let h = hull();
        let out = normalize(&h, &x(&h, -1), 6).unwrap();
        let inv = invariants(&h, &out).unwrap();
        assert_eq!((inv.e, inv.f_res, inv.d, inv.swan.clone()), (1, 1, 2, None));
        assert!(!inv.certified);

        let trivial = normalize(&k, &x(&k, 2), 1).unwrap();
        assert_eq!(invariants(&k, &trivial), Err(BestError::TrivialOutcome));
    }

    #[test]
    fn classical_swan_examples() {
        let k = laurent(2);
        assert_eq!(classical_swan(&k, &x(&k, -3)), Ok(GroupElt::int(3)));
        assert_eq!(classical_swan(&k, &k.one()), Ok(GroupElt::int(0)));
        let r = ratfunc2();
        let f = r
            .monomial(GroupElt::int(-2), r.residue().indeterminate().unwrap())
            .unwrap();
        assert_eq!(classical_swan(&r, &f), Ok(GroupElt::int(2)));
        // a non-monomial best generator needs a truncated inverse of f
        let f = k.add(&x(&k, -5), &x(&k, -2));
        assert_eq!(classical_swan(&k, &f), Ok(GroupElt::int(5)));
    }

    fn random_h(k: &SeriesField, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> SeriesElt {
        let q = k.residue().base().order();
        let n = rng.gen_range(1..4);
        let terms: Vec<_> = (0..n)
            .map(|_| {
                let c = k.residue().from_gf(crate::Gf(rng.gen_range(1..q)));
                (GroupElt::int(rng.gen_range(lo..=hi)), c)
            })
            .collect();
        k.from_terms(terms, None).unwrap()
    }

    #[test]
    fn best_generators_cannot_be_improved_by_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let k2 = laurent(2);
        let k3 = laurent(3);
        let k4 = laurent(4);
        let r = ratfunc2();
        let y = r.residue().indeterminate().unwrap();
        let cases = [
            (k2.clone(), x(&k2, -3)),
            (k2.clone(), k2.add(&x(&k2, -5), &x(&k2, -2))),
            (k3.clone(), k3.add(&x(&k3, -4), &k3.one())),
            (k3.clone(), k3.from_int(1)),
            (
                k4.clone(),
                k4.from_residue(k4.residue().from_gf(crate::Gf(2))),
            ),
            (r.clone(), r.monomial(GroupElt::int(-2), y).unwrap()),
        ];
        for (k, f) in cases {
            let c = classify(&k, &f).unwrap();
            assert!(c.verdict.is_best(), "{} is {:?}", k.format(&f), c.verdict);
            let v = k.valuation(&f).unwrap();
            let lo = v.clone();
            let GroupElt::Rank1(lo) = lo else {
                unreachable!()
            };
            let lo = lo.to_integer().try_into().unwrap();
            for _ in 0..200 {
                let h = random_h(&k, &mut rng, lo, 0);
                for i in 1..k.p() as i64 {
                    assert!(!is_strictly_better(&k, &f, &h, i).unwrap());
                }
            }
        }
    }

    #[test]
    fn normalization_is_invariant_under_generator_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2u64, 3, 4] {
            let k = laurent(q);
            for _ in 0..30 {
                let f = random_h(&k, &mut rng, -7, 0);
                let Ok(base) = normalize(&k, &f, 64) else {
                    continue;
                };
                let NormalizeOutcome::BestFound { .. } = base else {
                    continue;
                };
                let h = random_h(&k, &mut rng, -4, 2);
                let i = rng.gen_range(1..k.p() as i64);
                let g = k.mul_int(&k.artin_schreier_shift(&f, &h), i);
                let other = normalize(&k, &g, 64).unwrap();
                let (a, b) = (
                    invariants(&k, &base).unwrap(),
                    invariants(&k, &other).unwrap(),
                );
                assert_eq!(a, b, "f = {}, g = {}", k.format(&f), k.format(&g));
                assert_eq!(a.degree(), k.p());
            }
        }
    }

    #[test]
    fn defect_trajectory_has_exact_shape() {
        let h = hull();
        let NormalizeOutcome::DefectEvidence { trajectory, .. } =
            normalize(&h, &x(&h, -1), 12).unwrap()
        else {
            panic!("expected defect evidence")
        };
        for (t, v) in trajectory.iter().enumerate() {
            assert_eq!(*v, GroupElt::frac(-1, 1 << t));
        }
        assert!(trajectory.windows(2).all(|w| w[0] < w[1]));
        assert!(trajectory.iter().all(GroupElt::is_negative));
    }
}
