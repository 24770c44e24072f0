//! Ordered abelian value groups and their elements.
//!
//! Elements are exact rationals (rank 1) or lexicographically ordered pairs of
//! rationals (rank 2). A [`ValueGroup`] restricts which elements are admissible
//! as exponents of series terms; the elements themselves always live in the
//! rational hull so that quantities such as `v(x) / p` can be represented
//! whether or not they land back in the group.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cannot combine a rank-{0} element with a rank-{1} element")]
    MixedRank(usize, usize),
    #[error("{0} is not an element of the value group {1}")]
    NotInGroup(GroupElt, ValueGroup),
    #[error("cannot parse group element from {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// The integers.
    Int,
    /// Rationals whose denominator is a power of `p`.
    IntInvP,
    /// All rationals.
    Rat,
    /// Lexicographically ordered pairs of rationals.
    Lex2,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Int => "int",
            GroupKind::IntInvP => "int-inv-p",
            GroupKind::Rat => "rat",
            GroupKind::Lex2 => "lex2",
        }
    }
}

impl FromStr for GroupKind {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "int" => Ok(GroupKind::Int),
            "int-inv-p" | "intinvp" => Ok(GroupKind::IntInvP),
            "rat" => Ok(GroupKind::Rat),
            "lex2" => Ok(GroupKind::Lex2),
            _ => Err(GroupError::Parse(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValueGroup {
    kind: GroupKind,
    p: u64,
}

impl fmt::Display for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::IntInvP => write!(f, "Z[1/{}]", self.p),
            GroupKind::Int => write!(f, "Z"),
            GroupKind::Rat => write!(f, "Q"),
            GroupKind::Lex2 => write!(f, "Q x Q (lex)"),
        }
    }
}

/// An element of a value group, or of its rational hull.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElt {
    Rank1(BigRational),
    Rank2(BigRational, BigRational),
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn is_power_of(mut d: BigInt, p: u64) -> bool {
    let p = BigInt::from(p);
    while d > BigInt::one() {
        let (q, r) = d.div_rem(&p);
        if !r.is_zero() {
            return false;
        }
        d = q;
    }
    true
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rat(s: &str) -> Result<BigRational, GroupError> {
    let err = || GroupError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

impl GroupElt {
    pub fn int(n: i64) -> Self {
        GroupElt::Rank1(rat(n, 1))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        GroupElt::Rank1(rat(n, d))
    }

    pub fn pair(a: BigRational, b: BigRational) -> Self {
        GroupElt::Rank2(a, b)
    }

    pub fn pair_frac(a: (i64, i64), b: (i64, i64)) -> Self {
        GroupElt::Rank2(rat(a.0, a.1), rat(b.0, b.1))
    }

    pub fn zero_of_rank(rank: usize) -> Self {
        match rank {
            1 => GroupElt::Rank1(BigRational::zero()),
            _ => GroupElt::Rank2(BigRational::zero(), BigRational::zero()),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            GroupElt::Rank1(_) => 1,
            GroupElt::Rank2(..) => 2,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GroupElt::Rank1(a) => a.is_zero(),
            GroupElt::Rank2(a, b) => a.is_zero() && b.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn signum(&self) -> Ordering {
        self.cmp(&GroupElt::zero_of_rank(self.rank()))
    }

    /// Order comparison that reports mixed ranks instead of panicking.
    pub fn compare(&self, other: &Self) -> Result<Ordering, GroupError> {
        match (self, other) {
            (GroupElt::Rank1(a), GroupElt::Rank1(b)) => Ok(a.cmp(b)),
            (GroupElt::Rank2(a1, a2), GroupElt::Rank2(b1, b2)) => Ok(a1.cmp(b1).then(a2.cmp(b2))),
            _ => Err(GroupError::MixedRank(self.rank(), other.rank())),
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        match (self, other) {
            (GroupElt::Rank1(a), GroupElt::Rank1(b)) => GroupElt::Rank1(op(a, b)),
            (GroupElt::Rank2(a1, a2), GroupElt::Rank2(b1, b2)) => {
                GroupElt::Rank2(op(a1, b1), op(a2, b2))
            }
            _ => panic!("{}", GroupError::MixedRank(self.rank(), other.rank())),
        }
    }

    fn map(&self, op: impl Fn(&BigRational) -> BigRational) -> Self {
        match self {
            GroupElt::Rank1(a) => GroupElt::Rank1(op(a)),
            GroupElt::Rank2(a, b) => GroupElt::Rank2(op(a), op(b)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    pub fn scale(&self, n: i64) -> Self {
        let n = BigRational::from_integer(BigInt::from(n));
        self.map(|a| a * &n)
    }

    /// Division by a nonzero integer, landing in the rational hull.
    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division of a group element by zero");
        let n = BigRational::from_integer(BigInt::from(n));
        self.map(|a| a / &n)
    }

    /// Smallest `n >= 0` with `n * step >= target`, for a strictly positive
    /// `step`. Absent when no finite multiple reaches the target (rank 2 with
    /// a step that is infinitesimal relative to the target).
    pub fn multiples_to_reach(step: &Self, target: &Self) -> Option<u64> {
        assert!(step.is_positive(), "step must be positive");
        if !target.is_positive() {
            return Some(0);
        }
        let count = |num: &BigRational, den: &BigRational| -> Option<u64> {
            let q = (num / den).ceil().to_integer();
            u64::try_from(q).ok()
        };
        match (step, target) {
            (GroupElt::Rank1(s), GroupElt::Rank1(t)) => count(t, s),
            (GroupElt::Rank2(s1, s2), GroupElt::Rank2(t1, t2)) => {
                if s1.is_positive() {
                    // one extra multiple clears any tie in the first component
                    count(t1, s1).map(|n| n + 1)
                } else if t1.is_positive() {
                    None
                } else {
                    // t1 == 0 == s1, so only the second component matters
                    count(t2, s2)
                }
            }
            _ => panic!("{}", GroupError::MixedRank(step.rank(), target.rank())),
        }
    }
}

impl PartialOrd for GroupElt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order within one rank. Comparing ranks 1 and 2 is a usage error and
/// panics; use [`GroupElt::compare`] for a fallible comparison.
impl Ord for GroupElt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Display for GroupElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElt::Rank1(a) => write!(f, "{}", fmt_rat(a)),
            GroupElt::Rank2(a, b) => write!(f, "({}, {})", fmt_rat(a), fmt_rat(b)),
        }
    }
}

impl FromStr for GroupElt {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| GroupError::Parse(s.to_string()))?;
            Ok(GroupElt::Rank2(parse_rat(a)?, parse_rat(b)?))
        } else {
            Ok(GroupElt::Rank1(parse_rat(t)?))
        }
    }
}

impl ValueGroup {
    pub fn new(kind: GroupKind, p: u64) -> Self {
        assert!(p >= 2, "p must be a prime");
        ValueGroup { kind, p }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            GroupKind::Lex2 => 2,
            _ => 1,
        }
    }

    pub fn zero(&self) -> GroupElt {
        GroupElt::zero_of_rank(self.rank())
    }

    pub fn contains(&self, a: &GroupElt) -> bool {
        match (self.kind, a) {
            (GroupKind::Int, GroupElt::Rank1(r)) => r.is_integer(),
            (GroupKind::IntInvP, GroupElt::Rank1(r)) => is_power_of(r.denom().clone(), self.p),
            (GroupKind::Rat, GroupElt::Rank1(_)) => true,
            (GroupKind::Lex2, GroupElt::Rank2(..)) => true,
            _ => false,
        }
    }

    pub fn check(&self, a: &GroupElt) -> Result<(), GroupError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(GroupError::NotInGroup(a.clone(), self.clone()))
        }
    }

    /// Checked comparison of two elements of this group.
    pub fn compare(&self, a: &GroupElt, b: &GroupElt) -> Result<Ordering, GroupError> {
        self.check(a)?;
        self.check(b)?;
        a.compare(b)
    }

    /// Returns `b` in this group with `p * b = a`, if one exists.
    pub fn is_p_divisible(&self, a: &GroupElt) -> Option<GroupElt> {
        if !self.contains(a) {
            return None;
        }
        let b = a.div_int(self.p as i64);
        self.contains(&b).then_some(b)
    }

    /// Whether every element of the group is divisible by `p`.
    pub fn is_p_divisible_group(&self) -> bool {
        !matches!(self.kind, GroupKind::Int)
    }
}
