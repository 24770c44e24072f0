//! Truncated generalized power series `sum c_g X^g` over a residue field `k`
//! with exponents in a value group.
//!
//! Every element carries its own validity bound: either it is an exact
//! finite sum, or it is known modulo terms of exponent `>= precision`. Terms
//! below the precision are exact, so the leading term (and hence the
//! valuation) of an element with at least one stored term is certified.
//! An element with no stored terms is exact zero only if flagged exact;
//! otherwise its valuation is merely bounded below, and asking for it is an
//! error rather than a guess.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::residue::{ResidueElt, ResidueError, ResidueField};
use crate::value_group::{GroupElt, GroupError, GroupKind, ValueGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("valuation of exact zero is +infinity")]
    ExactZero,
    #[error("element is zero to precision {precision}; raise the precision")]
    ZeroToPrecision { precision: GroupElt },
    #[error("residue class requested for an element of negative valuation {0}")]
    NegativeValuation(GroupElt),
    #[error("insufficient precision: need data up to {needed}, have {have}")]
    InsufficientPrecision { needed: GroupElt, have: GroupElt },
    #[error(
        "truncation to {target} needs infinitely many powers of an element of valuation {step}"
    )]
    UnboundedTruncation { step: GroupElt, target: GroupElt },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// Lower-bound information about a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationBound {
    Exact(GroupElt),
    AtLeast(GroupElt),
    Infinite,
}

impl ValuationBound {
    fn lower(&self) -> Option<&GroupElt> {
        match self {
            ValuationBound::Exact(g) | ValuationBound::AtLeast(g) => Some(g),
            ValuationBound::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesField {
    residue: ResidueField,
    group: ValueGroup,
    default_precision: GroupElt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesElt {
    terms: Vec<(GroupElt, ResidueElt)>,
    precision: Option<GroupElt>,
}

impl SeriesElt {
    pub fn terms(&self) -> &[(GroupElt, ResidueElt)] {
        &self.terms
    }

    /// `None` for exact elements.
    pub fn precision(&self) -> Option<&GroupElt> {
        self.precision.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_none()
    }

    /// No stored terms: exact zero, or zero modulo the precision.
    pub fn has_no_terms(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<&(GroupElt, ResidueElt)> {
        self.terms.first()
    }

    pub fn coefficient(&self, exp: &GroupElt) -> Option<&ResidueElt> {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(exp))
            .ok()
            .map(|i| &self.terms[i].1)
    }

    pub fn valuation_bound(&self) -> ValuationBound {
        match (self.terms.first(), &self.precision) {
            (Some((e, _)), _) => ValuationBound::Exact(e.clone()),
            (None, Some(p)) => ValuationBound::AtLeast(p.clone()),
            (None, None) => ValuationBound::Infinite,
        }
    }
}

fn min_opt(a: Option<GroupElt>, b: Option<GroupElt>) -> Option<GroupElt> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x <= y { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

impl SeriesField {
    pub fn new(
        residue: ResidueField,
        group: ValueGroup,
        default_precision: GroupElt,
    ) -> Result<Self, SeriesError> {
        if residue.characteristic() as u64 != group.p() {
            return Err(SeriesError::FieldMismatch(format!(
                "residue characteristic {} but group prime {}",
                residue.characteristic(),
                group.p()
            )));
        }
        if default_precision.rank() != group.rank() || !default_precision.is_positive() {
            return Err(SeriesError::FieldMismatch(format!(
                "default precision {default_precision} must be a positive element of {group}"
            )));
        }
        Ok(SeriesField {
            residue,
            group,
            default_precision,
        })
    }

    /// `GF(q)((X))` style field with integer exponents.
    pub fn laurent(residue: ResidueField, precision: i64) -> Result<Self, SeriesError> {
        let p = residue.characteristic() as u64;
        Self::new(
            residue,
            ValueGroup::new(GroupKind::Int, p),
            GroupElt::int(precision),
        )
    }

    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    pub fn group(&self) -> &ValueGroup {
        &self.group
    }

    pub fn default_precision(&self) -> &GroupElt {
        &self.default_precision
    }

    pub fn with_default_precision(&self, precision: GroupElt) -> Result<Self, SeriesError> {
        Self::new(self.residue.clone(), self.group.clone(), precision)
    }

    pub fn p(&self) -> u64 {
        self.group.p()
    }

    pub fn describe(&self) -> String {
        format!("{}(({})) over {}", self.residue, "X", self.group)
    }

    fn build(&self, map: BTreeMap<GroupElt, ResidueElt>, precision: Option<GroupElt>) -> SeriesElt {
        let terms = map
            .into_iter()
            .filter(|(e, c)| !self.residue.is_zero(c) && precision.as_ref().is_none_or(|p| e < p))
            .collect();
        SeriesElt { terms, precision }
    }

    pub fn zero(&self) -> SeriesElt {
        SeriesElt {
            terms: Vec::new(),
            precision: None,
        }
    }

    /// Zero known only modulo `X^precision`.
    pub fn zero_to(&self, precision: GroupElt) -> SeriesElt {
        SeriesElt {
            terms: Vec::new(),
            precision: Some(precision),
        }
    }

    pub fn one(&self) -> SeriesElt {
        self.from_residue(self.residue.one())
    }

    pub fn from_int(&self, n: i64) -> SeriesElt {
        self.from_residue(self.residue.from_int(n))
    }

    pub fn from_residue(&self, c: ResidueElt) -> SeriesElt {
        self.build(BTreeMap::from([(self.group.zero(), c)]), None)
    }

    /// Canonical lift of a residue element: the constant series.
    pub fn lift(&self, c: &ResidueElt) -> SeriesElt {
        self.from_residue(c.clone())
    }

    pub fn monomial(&self, exp: GroupElt, coeff: ResidueElt) -> Result<SeriesElt, SeriesError> {
        self.group.check(&exp)?;
        Ok(self.build(BTreeMap::from([(exp, coeff)]), None))
    }

    /// `X^exp`.
    pub fn x_pow(&self, exp: GroupElt) -> Result<SeriesElt, SeriesError> {
        self.monomial(exp, self.residue.one())
    }

    pub fn from_terms(
        &self,
        terms: impl IntoIterator<Item = (GroupElt, ResidueElt)>,
        precision: Option<GroupElt>,
    ) -> Result<SeriesElt, SeriesError> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            self.group.check(&e)?;
            let slot = map.entry(e).or_insert_with(|| self.residue.zero());
            *slot = self.residue.add(slot, &c);
        }
        if let Some(p) = &precision {
            if p.rank() != self.group.rank() {
                return Err(GroupError::MixedRank(p.rank(), self.group.rank()).into());
            }
        }
        Ok(self.build(map, precision))
    }

    /// Drops everything at or above `precision`.
    pub fn truncate(&self, a: &SeriesElt, precision: &GroupElt) -> SeriesElt {
        let precision = min_opt(a.precision.clone(), Some(precision.clone()));
        let map = a.terms.iter().cloned().collect();
        self.build(map, precision)
    }

    pub fn add(&self, a: &SeriesElt, b: &SeriesElt) -> SeriesElt {
        let precision = min_opt(a.precision.clone(), b.precision.clone());
        let mut map: BTreeMap<GroupElt, ResidueElt> = a.terms.iter().cloned().collect();
        for (e, c) in &b.terms {
            match map.get_mut(e) {
                Some(slot) => *slot = self.residue.add(slot, c),
                None => {
                    map.insert(e.clone(), c.clone());
                }
            }
        }
        self.build(map, precision)
    }

    pub fn neg(&self, a: &SeriesElt) -> SeriesElt {
        SeriesElt {
            terms: a
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.residue.neg(c)))
                .collect(),
            precision: a.precision.clone(),
        }
    }

    pub fn sub(&self, a: &SeriesElt, b: &SeriesElt) -> SeriesElt {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &SeriesElt, c: &ResidueElt) -> SeriesElt {
        if self.residue.is_zero(c) {
            return self.zero();
        }
        SeriesElt {
            terms: a
                .terms
                .iter()
                .map(|(e, x)| (e.clone(), self.residue.mul(x, c)))
                .collect(),
            precision: a.precision.clone(),
        }
    }

    pub fn mul_int(&self, a: &SeriesElt, n: i64) -> SeriesElt {
        self.scale(a, &self.residue.from_int(n))
    }

    /// Multiplication by `c X^exp`.
    pub fn shift(&self, a: &SeriesElt, exp: &GroupElt, c: &ResidueElt) -> SeriesElt {
        if self.residue.is_zero(c) {
            return self.zero();
        }
        SeriesElt {
            terms: a
                .terms
                .iter()
                .map(|(e, x)| (e.add(exp), self.residue.mul(x, c)))
                .collect(),
            precision: a.precision.as_ref().map(|p| p.add(exp)),
        }
    }

    pub fn mul(&self, a: &SeriesElt, b: &SeriesElt) -> SeriesElt {
        self.mul_capped(a, b, None)
    }

    /// Product whose precision is additionally capped at `cap`.
    pub fn mul_capped(&self, a: &SeriesElt, b: &SeriesElt, cap: Option<&GroupElt>) -> SeriesElt {
        if a.is_exact_zero() || b.is_exact_zero() {
            return self.zero();
        }
        let (va, vb) = (a.valuation_bound(), b.valuation_bound());
        let from_a = a.precision.as_ref().zip(vb.lower()).map(|(p, v)| p.add(v));
        let from_b = b.precision.as_ref().zip(va.lower()).map(|(p, v)| p.add(v));
        let precision = min_opt(min_opt(from_a, from_b), cap.cloned());
        let mut map: BTreeMap<GroupElt, ResidueElt> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e = ea.add(eb);
                if precision.as_ref().is_some_and(|p| &e >= p) {
                    // later b-terms only increase the exponent
                    break;
                }
                let c = self.residue.mul(ca, cb);
                match map.get_mut(&e) {
                    Some(slot) => *slot = self.residue.add(slot, &c),
                    None => {
                        map.insert(e, c);
                    }
                }
            }
        }
        self.build(map, precision)
    }

    pub fn pow(&self, a: &SeriesElt, mut e: u64) -> SeriesElt {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn valuation(&self, a: &SeriesElt) -> Result<GroupElt, SeriesError> {
        match a.valuation_bound() {
            ValuationBound::Exact(v) => Ok(v),
            ValuationBound::AtLeast(p) => Err(SeriesError::ZeroToPrecision { precision: p }),
            ValuationBound::Infinite => Err(SeriesError::ExactZero),
        }
    }

    /// Whether `a - b` vanishes to the available precision.
    pub fn eq_to_precision(&self, a: &SeriesElt, b: &SeriesElt) -> bool {
        self.sub(a, b).has_no_terms()
    }

    pub fn invert(&self, a: &SeriesElt) -> Result<SeriesElt, SeriesError> {
        self.invert_to(a, &self.default_precision)
    }

    /// Inverse with `a * invert_to(a, t) = 1 + O(X^t)` (or the best precision
    /// the input supports, if lower). Writing `a = c X^g (1 + m)` with
    /// `v(m) > 0`, returns `c^-1 X^-g sum (-m)^i`, summed until the terms pass
    /// the target.
    pub fn invert_to(&self, a: &SeriesElt, target: &GroupElt) -> Result<SeriesElt, SeriesError> {
        let (g, c) = match a.leading_term() {
            Some(t) => t.clone(),
            None => return Err(self.valuation(a).unwrap_err()),
        };
        let cinv = self.residue.inv(&c)?;
        let neg_g = g.neg();
        let unit = self.shift(a, &neg_g, &cinv);
        let minus_m = self.neg(&self.sub(&unit, &self.one()));
        let t = min_opt(unit.precision.clone(), Some(target.clone())).expect("target is set");
        let sum = if minus_m.has_no_terms() && unit.is_exact() {
            self.one()
        } else if minus_m.has_no_terms() {
            self.truncate(&self.one(), &t)
        } else {
            let step = self.valuation(&minus_m)?;
            let n = GroupElt::multiples_to_reach(&step, &t).ok_or_else(|| {
                SeriesError::UnboundedTruncation {
                    step,
                    target: t.clone(),
                }
            })?;
            let mut sum = self.truncate(&self.one(), &t);
            let mut power = self.one();
            for _ in 0..n {
                power = self.mul_capped(&power, &minus_m, Some(&t));
                if power.has_no_terms() {
                    break;
                }
                sum = self.add(&sum, &power);
            }
            sum
        };
        Ok(self.shift(&sum, &neg_g, &cinv))
    }

    /// Constant coefficient of an element of non-negative valuation.
    pub fn residue_class(&self, a: &SeriesElt) -> Result<ResidueElt, SeriesError> {
        let zero = self.group.zero();
        if let Some((e, _)) = a.leading_term() {
            if e.is_negative() {
                return Err(SeriesError::NegativeValuation(e.clone()));
            }
        }
        match &a.precision {
            Some(p) if !p.is_positive() => Err(SeriesError::InsufficientPrecision {
                needed: zero,
                have: p.clone(),
            }),
            _ => Ok(a
                .coefficient(&zero)
                .cloned()
                .unwrap_or_else(|| self.residue.zero())),
        }
    }

    /// `sum c^p X^(p g)`, the p-th power map in characteristic p.
    pub fn frobenius(&self, a: &SeriesElt) -> SeriesElt {
        let p = self.p() as i64;
        SeriesElt {
            terms: a
                .terms
                .iter()
                .map(|(e, c)| (e.scale(p), self.residue.frobenius(c)))
                .collect(),
            precision: a.precision.as_ref().map(|q| q.scale(p)),
        }
    }

    /// Inverse of [`SeriesField::frobenius`]: present when every exponent is
    /// p-divisible in the group and every coefficient is a p-th power.
    pub fn pth_root(&self, a: &SeriesElt) -> Option<SeriesElt> {
        let p = self.p() as i64;
        let terms = a
            .terms
            .iter()
            .map(|(e, c)| Some((self.group.is_p_divisible(e)?, self.residue.pth_root(c)?)))
            .collect::<Option<Vec<_>>>()?;
        Some(SeriesElt {
            terms,
            precision: a.precision.as_ref().map(|q| q.div_int(p)),
        })
    }

    /// `f + h^p - h`.
    pub fn artin_schreier_shift(&self, f: &SeriesElt, h: &SeriesElt) -> SeriesElt {
        self.add(f, &self.sub(&self.frobenius(h), h))
    }

    fn format_coeff(&self, c: &ResidueElt) -> String {
        let s = self.residue.format(c);
        let mut depth = 0i32;
        let top_level_sum = s.chars().any(|ch| {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            depth == 0 && ch == '+'
        });
        if top_level_sum {
            format!("({s})")
        } else {
            s
        }
    }

    /// Text form accepted by the expression parser.
    pub fn format(&self, a: &SeriesElt) -> String {
        let mut parts: Vec<String> = a
            .terms
            .iter()
            .map(|(e, c)| {
                let coeff = self.format_coeff(c);
                if e.is_zero() {
                    coeff
                } else if self.residue.is_one(c) {
                    format!("X^({e})")
                } else {
                    format!("{coeff}*X^({e})")
                }
            })
            .collect();
        if let Some(p) = &a.precision {
            parts.push(format!("O(X^({p}))"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for SeriesField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2x() -> SeriesField {
        SeriesField::laurent(ResidueField::gf(2).unwrap(), 8).unwrap()
    }

    fn perfect_hull(p: u64) -> SeriesField {
        SeriesField::new(
            ResidueField::gf(p).unwrap(),
            ValueGroup::new(GroupKind::IntInvP, p),
            GroupElt::int(8),
        )
        .unwrap()
    }

    fn x(k: &SeriesField, n: i64) -> SeriesElt {
        k.x_pow(GroupElt::int(n)).unwrap()
    }

    #[test]
    fn char_two_cancellation() {
        let k = f2x();
        let a = k.add(&x(&k, -1), &k.truncate(&k.one(), &GroupElt::int(4)));
        let b = k.add(&a, &x(&k, -1));
        assert_eq!(b.terms().len(), 1);
        assert_eq!(k.residue_class(&b), Ok(k.residue().one()));
        assert_eq!(b.precision(), Some(&GroupElt::int(4)));
    }

    #[test]
    fn rational_exponent_product() {
        let k = SeriesField::new(
            ResidueField::gf(3).unwrap(),
            ValueGroup::new(GroupKind::Rat, 3),
            GroupElt::int(4),
        )
        .unwrap();
        let h = k.x_pow(GroupElt::frac(1, 2)).unwrap();
        assert_eq!(k.mul(&h, &h), x(&k, 1));
    }

    #[test]
    fn difference_of_squares_gf3() {
        let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 8).unwrap();
        let a = k.add(&k.one(), &x(&k, 1));
        let b = k.sub(&k.one(), &x(&k, 1));
        assert_eq!(k.mul(&a, &b), k.sub(&k.one(), &x(&k, 2)));
    }

    #[test]
    fn valuation_examples() {
        let k = f2x();
        assert_eq!(
            k.valuation(&k.add(&x(&k, -3), &k.one())),
            Ok(GroupElt::int(-3))
        );
        assert_eq!(k.valuation(&k.zero()), Err(SeriesError::ExactZero));
        assert_eq!(
            k.valuation(&k.zero_to(GroupElt::int(5))),
            Err(SeriesError::ZeroToPrecision {
                precision: GroupElt::int(5)
            })
        );
        let h = perfect_hull(2);
        assert_eq!(
            h.valuation(&h.x_pow(GroupElt::frac(1, 4)).unwrap()),
            Ok(GroupElt::frac(1, 4))
        );
        assert!(k.x_pow(GroupElt::frac(1, 2)).is_err());
    }

    #[test]
    fn invert_examples() {
        let k = f2x();
        assert_eq!(k.invert(&x(&k, 3)), Ok(x(&k, -3)));
        let inv = k
            .invert_to(&k.add(&k.one(), &x(&k, 1)), &GroupElt::int(4))
            .unwrap();
        let expected = k
            .from_terms(
                (0..4).map(|i| (GroupElt::int(i), k.residue().one())),
                Some(GroupElt::int(4)),
            )
            .unwrap();
        assert_eq!(inv, expected);
        assert_eq!(k.format(&inv), "1 + X^(1) + X^(2) + X^(3) + O(X^(4))");
        assert_eq!(k.invert(&k.zero()), Err(SeriesError::ExactZero));
    }

    #[test]
    fn invert_lex2_needs_a_reachable_target() {
        let k = SeriesField::new(
            ResidueField::gf(2).unwrap(),
            ValueGroup::new(GroupKind::Lex2, 2),
            GroupElt::pair_frac((4, 1), (0, 1)),
        )
        .unwrap();
        let good = k.add(
            &k.one(),
            &k.x_pow(GroupElt::pair_frac((1, 2), (-3, 1))).unwrap(),
        );
        let inv = k.invert(&good).unwrap();
        assert!(k.eq_to_precision(&k.mul(&good, &inv), &k.one()));
        let bad = k.add(
            &k.one(),
            &k.x_pow(GroupElt::pair_frac((0, 1), (1, 1))).unwrap(),
        );
        assert!(matches!(
            k.invert(&bad),
            Err(SeriesError::UnboundedTruncation { .. })
        ));
    }

    #[test]
    fn residue_class_examples() {
        let k = f2x();
        assert_eq!(
            k.residue_class(&k.add(&k.one(), &x(&k, 1))),
            Ok(k.residue().one())
        );
        assert_eq!(k.residue_class(&x(&k, 1)), Ok(k.residue().zero()));
        assert!(matches!(
            k.residue_class(&x(&k, -1)),
            Err(SeriesError::NegativeValuation(_))
        ));
        let r = SeriesField::laurent(ResidueField::ratfunc(2).unwrap(), 8).unwrap();
        let y = r.residue().indeterminate().unwrap();
        let a = r.add(&r.from_residue(y.clone()), &x(&r, 1));
        assert_eq!(r.residue_class(&a), Ok(y));
    }

    #[test]
    fn frobenius_and_roots() {
        let k = f2x();
        assert_eq!(k.frobenius(&x(&k, -1)), x(&k, -2));
        let h = perfect_hull(2);
        let root = h.pth_root(&h.x_pow(GroupElt::int(-1)).unwrap()).unwrap();
        assert_eq!(root, h.x_pow(GroupElt::frac(-1, 2)).unwrap());
        let r = SeriesField::laurent(ResidueField::ratfunc(2).unwrap(), 8).unwrap();
        let y = r.from_residue(r.residue().indeterminate().unwrap());
        let a = r.add(&y, &x(&r, 1));
        let y2 = r.from_residue(
            r.residue()
                .pow(&r.residue().indeterminate().unwrap(), 2)
                .unwrap(),
        );
        assert_eq!(r.frobenius(&a), r.add(&y2, &x(&r, 2)));
        assert_eq!(r.pth_root(&a), None);
    }

    #[test]
    fn artin_schreier_shift_examples() {
        let k = f2x();
        assert_eq!(k.artin_schreier_shift(&x(&k, -6), &x(&k, -3)), x(&k, -3));
        let f = k.add(&x(&k, -5), &k.one());
        assert_eq!(k.artin_schreier_shift(&f, &k.zero()), f);
        let h = perfect_hull(2);
        let half = h.x_pow(GroupElt::frac(-1, 2)).unwrap();
        assert_eq!(
            h.artin_schreier_shift(&h.x_pow(GroupElt::int(-1)).unwrap(), &half),
            half
        );
    }

    fn gf3_series() -> impl Strategy<Value = SeriesElt> {
        proptest::collection::vec((-4i64..6, 0u32..3), 1..5).prop_map(|ts| {
            let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 12).unwrap();
            let terms = ts
                .into_iter()
                .map(|(e, c)| (GroupElt::int(e), ResidueElt::Gf(crate::Gf(c))));
            k.from_terms(terms, None).unwrap()
        })
    }

    fn hull_series() -> impl Strategy<Value = SeriesElt> {
        proptest::collection::vec((-8i64..12, 0u32..4, 0u32..2), 1..4).prop_map(|ts| {
            let k = perfect_hull(2);
            let terms = ts
                .into_iter()
                .map(|(n, d, c)| (GroupElt::frac(n, 1 << d), ResidueElt::Gf(crate::Gf(c))));
            k.from_terms(terms, None).unwrap()
        })
    }

    proptest! {
        #[test]
        fn valuation_axioms(a in gf3_series(), b in gf3_series()) {
            let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 12).unwrap();
            prop_assume!(!a.has_no_terms() && !b.has_no_terms());
            let (va, vb) = (k.valuation(&a).unwrap(), k.valuation(&b).unwrap());
            prop_assert_eq!(k.valuation(&k.mul(&a, &b)).unwrap(), va.add(&vb));
            let s = k.add(&a, &b);
            if let Ok(vs) = k.valuation(&s) {
                let m = if va <= vb { va.clone() } else { vb.clone() };
                prop_assert!(vs >= m);
                if va != vb {
                    prop_assert_eq!(vs, m);
                }
            }
        }

        #[test]
        fn inverse_round_trip(a in gf3_series()) {
            let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 12).unwrap();
            prop_assume!(!a.has_no_terms());
            let inv = k.invert(&a).unwrap();
            let prod = k.mul(&a, &inv);
            prop_assert!(k.eq_to_precision(&prod, &k.one()));
            // monomials invert exactly
            prop_assert!(prod.precision().is_none_or(|q| *q == GroupElt::int(12)));
        }

        #[test]
        fn frobenius_root_round_trip(a in hull_series()) {
            let k = perfect_hull(2);
            let r = k.pth_root(&a).expect("perfect hull");
            prop_assert_eq!(k.frobenius(&r), a);
        }

        #[test]
        fn refinement_is_monotone(a in gf3_series(), b in gf3_series(), lo in 1i64..6) {
            // truncating the inputs never changes terms below the new precision
            let k = SeriesField::laurent(ResidueField::gf(3).unwrap(), 12).unwrap();
            let exact = k.mul(&a, &b);
            let coarse = k.mul(&k.truncate(&a, &GroupElt::int(lo)), &k.truncate(&b, &GroupElt::int(lo)));
            prop_assert!(k.eq_to_precision(&coarse, &exact));
            if !a.has_no_terms() {
                let fine = k.invert_to(&a, &GroupElt::int(10)).unwrap();
                let rough = k.invert_to(&a, &GroupElt::int(4)).unwrap();
                prop_assert!(k.eq_to_precision(&rough, &fine));
            }
        }
    }
}
