//! Arithmetic in `L = K[T]/(T^p - T - f)`.
//!
//! Elements are coefficient vectors over the basis `1, a, ..., a^(p-1)` where
//! `a` is a fixed root. The Galois group is generated by `sigma(a) = a + 1`.

use thiserror::Error;

use crate::residue::ResidueElt;
use crate::series::{SeriesElt, SeriesError, SeriesField};
use crate::value_group::GroupElt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialReason {
    /// `v(f) > 0` (or `f = 0`): a root already lies in `K` by Hensel.
    PositiveValuation(Option<GroupElt>),
    /// `v(f) = 0` and the residue of `f` is `x^p - x` for this `x`.
    ResidueInImage(ResidueElt),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("the extension is trivial: {0:?}")]
    Trivial(TrivialReason),
    #[error("norm or trace left a nonzero component at a^{index}: precision loss or a bug")]
    ResidualAlphaComponent { index: usize },
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("element does not lie in the base field")]
    NotInBase,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ASExtension {
    base: SeriesField,
    f: SeriesElt,
    p: usize,
}

/// `sum coeffs[i] a^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElt {
    coeffs: Vec<SeriesElt>,
}

impl ExtElt {
    pub fn coeffs(&self) -> &[SeriesElt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &SeriesElt {
        &self.coeffs[i]
    }
}

fn binomial_mod(n: usize, k: usize, p: i64) -> i64 {
    let mut row = vec![1i64];
    for _ in 0..n {
        let mut next = vec![1i64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = (row[i - 1] + row[i]) % p;
        }
        row = next;
    }
    row.get(k).copied().unwrap_or(0)
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), inversions % 2 == 1));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl ASExtension {
    /// The extension defined by `T^p - T = f`, refusing generators that
    /// visibly define the trivial extension.
    pub fn new(base: SeriesField, f: SeriesElt) -> Result<Self, ExtError> {
        let p = base.p() as usize;
        match base.valuation(&f) {
            Err(SeriesError::ExactZero) => {
                return Err(ExtError::Trivial(TrivialReason::PositiveValuation(None)))
            }
            Err(SeriesError::ZeroToPrecision { precision }) if precision.is_positive() => {
                return Err(ExtError::Trivial(TrivialReason::PositiveValuation(Some(
                    precision,
                ))))
            }
            Err(e) => return Err(e.into()),
            Ok(v) if v.is_positive() => {
                return Err(ExtError::Trivial(TrivialReason::PositiveValuation(Some(v))))
            }
            Ok(v) if v.is_zero() => {
                let r = base.residue_class(&f)?;
                if let Some(x) = base.residue().artin_schreier_preimage(&r) {
                    return Err(ExtError::Trivial(TrivialReason::ResidueInImage(x)));
                }
            }
            Ok(_) => {}
        }
        Ok(ASExtension { base, f, p })
    }

    pub fn base(&self) -> &SeriesField {
        &self.base
    }

    pub fn f(&self) -> &SeriesElt {
        &self.f
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn from_coeffs(&self, coeffs: Vec<SeriesElt>) -> Result<ExtElt, ExtError> {
        if coeffs.len() != self.p {
            return Err(ExtError::WrongLength {
                expected: self.p,
                got: coeffs.len(),
            });
        }
        Ok(ExtElt { coeffs })
    }

    pub fn from_base(&self, c: &SeriesElt) -> ExtElt {
        let mut coeffs = vec![self.base.zero(); self.p];
        coeffs[0] = c.clone();
        ExtElt { coeffs }
    }

    pub fn zero(&self) -> ExtElt {
        self.from_base(&self.base.zero())
    }

    pub fn one(&self) -> ExtElt {
        self.from_base(&self.base.one())
    }

    pub fn from_int(&self, n: i64) -> ExtElt {
        self.from_base(&self.base.from_int(n))
    }

    /// The root `a` of `T^p - T - f`.
    pub fn alpha(&self) -> ExtElt {
        let mut e = self.zero();
        e.coeffs[1] = self.base.one();
        e
    }

    pub fn add(&self, a: &ExtElt, b: &ExtElt) -> ExtElt {
        ExtElt {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| self.base.add(x, y))
                .collect(),
        }
    }

    pub fn neg(&self, a: &ExtElt) -> ExtElt {
        ExtElt {
            coeffs: a.coeffs.iter().map(|x| self.base.neg(x)).collect(),
        }
    }

    pub fn sub(&self, a: &ExtElt, b: &ExtElt) -> ExtElt {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &ExtElt, c: &SeriesElt) -> ExtElt {
        ExtElt {
            coeffs: a.coeffs.iter().map(|x| self.base.mul(x, c)).collect(),
        }
    }

    pub fn mul_int(&self, a: &ExtElt, n: i64) -> ExtElt {
        ExtElt {
            coeffs: a.coeffs.iter().map(|x| self.base.mul_int(x, n)).collect(),
        }
    }

    /// Polynomial product reduced by `a^p = a + f`.
    pub fn mul(&self, a: &ExtElt, b: &ExtElt) -> ExtElt {
        let k = &self.base;
        let p = self.p;
        let mut r = vec![k.zero(); 2 * p - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_exact_zero() {
                    continue;
                }
                r[i + j] = k.add(&r[i + j], &k.mul(x, y));
            }
        }
        for d in (p..2 * p - 1).rev() {
            let c = std::mem::replace(&mut r[d], k.zero());
            if c.is_exact_zero() {
                continue;
            }
            r[d - p + 1] = k.add(&r[d - p + 1], &c);
            r[d - p] = k.add(&r[d - p], &k.mul(&c, &self.f));
        }
        r.truncate(p);
        ExtElt { coeffs: r }
    }

    pub fn pow(&self, a: &ExtElt, mut e: u64) -> ExtElt {
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

    /// `sigma^power`, substituting `a -> a + power`.
    pub fn sigma(&self, a: &ExtElt, power: usize) -> ExtElt {
        let p = self.p as i64;
        let j = (power % self.p) as i64;
        if j == 0 {
            return a.clone();
        }
        let k = &self.base;
        let mut out = vec![k.zero(); self.p];
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            let mut jpow = 1i64;
            for t in (0..=i).rev() {
                // (a + j)^i contributes C(i, t) j^(i-t) a^t
                let factor = binomial_mod(i, t, p) * jpow % p;
                if factor != 0 {
                    out[t] = k.add(&out[t], &k.mul_int(c, factor));
                }
                jpow = jpow * j % p;
            }
        }
        ExtElt { coeffs: out }
    }

    pub fn conjugates(&self, a: &ExtElt) -> Vec<ExtElt> {
        (0..self.p).map(|i| self.sigma(a, i)).collect()
    }

    /// Whether all components above the constant one vanish to precision.
    pub fn is_in_base(&self, a: &ExtElt) -> bool {
        a.coeffs[1..].iter().all(SeriesElt::has_no_terms)
    }

    fn constant_part(&self, a: ExtElt) -> Result<SeriesElt, ExtError> {
        if let Some(index) = (1..self.p).find(|&i| !a.coeffs[i].has_no_terms()) {
            return Err(ExtError::ResidualAlphaComponent { index });
        }
        Ok(a.coeffs.into_iter().next().expect("p >= 2"))
    }

    pub fn to_base(&self, a: &ExtElt) -> Result<SeriesElt, ExtError> {
        if !self.is_in_base(a) {
            return Err(ExtError::NotInBase);
        }
        Ok(a.coeffs[0].clone())
    }

    /// Product of the conjugates `sigma^i(a)`, `i = 1..p-1`.
    fn conjugate_cofactor(&self, a: &ExtElt) -> ExtElt {
        (1..self.p).fold(self.one(), |acc, i| self.mul(&acc, &self.sigma(a, i)))
    }

    /// Norm as the product of all conjugates.
    pub fn norm(&self, a: &ExtElt) -> Result<SeriesElt, ExtError> {
        let prod = self.mul(a, &self.conjugate_cofactor(a));
        self.constant_part(prod)
    }

    /// Trace as the sum of all conjugates.
    pub fn trace(&self, a: &ExtElt) -> Result<SeriesElt, ExtError> {
        let sum = self
            .conjugates(a)
            .iter()
            .fold(self.zero(), |acc, c| self.add(&acc, c));
        self.constant_part(sum)
    }

    /// Matrix of multiplication by `a`: entry `[i][j]` is the `a^i`
    /// component of `a * alpha^j`.
    pub fn multiplication_matrix(&self, a: &ExtElt) -> Vec<Vec<SeriesElt>> {
        let mut cols = Vec::with_capacity(self.p);
        let mut col = a.clone();
        for _ in 0..self.p {
            cols.push(col.clone());
            col = self.mul(&col, &self.alpha());
        }
        (0..self.p)
            .map(|i| (0..self.p).map(|j| cols[j].coeffs[i].clone()).collect())
            .collect()
    }

    /// Norm as the determinant of the multiplication matrix (Leibniz
    /// expansion, division free).
    pub fn norm_by_determinant(&self, a: &ExtElt) -> SeriesElt {
        let k = &self.base;
        let m = self.multiplication_matrix(a);
        permutations(self.p)
            .into_iter()
            .fold(k.zero(), |acc, (perm, odd)| {
                let term = perm
                    .iter()
                    .enumerate()
                    .fold(k.one(), |t, (i, &j)| k.mul(&t, &m[i][j]));
                if odd {
                    k.sub(&acc, &term)
                } else {
                    k.add(&acc, &term)
                }
            })
    }

    pub fn trace_by_matrix(&self, a: &ExtElt) -> SeriesElt {
        let m = self.multiplication_matrix(a);
        (0..self.p).fold(self.base.zero(), |acc, i| self.base.add(&acc, &m[i][i]))
    }

    /// The unique extension of the valuation: `v(N(a)) / p`, in the rational
    /// hull of the value group.
    pub fn valuation_l(&self, a: &ExtElt) -> Result<GroupElt, ExtError> {
        let n = self.norm(a)?;
        Ok(self.base.valuation(&n)?.div_int(self.p as i64))
    }

    /// Whether a valuation on `L` already lies in the value group of `K`.
    pub fn lies_in_base_group(&self, v: &GroupElt) -> bool {
        self.base.group().contains(v)
    }

    /// `a^-1 = (prod_{i >= 1} sigma^i(a)) / N(a)`.
    pub fn invert_ext(&self, a: &ExtElt) -> Result<ExtElt, ExtError> {
        if self.is_in_base(a) && a.coeffs[1..].iter().all(SeriesElt::is_exact) {
            return Ok(self.from_base(&self.base.invert(&a.coeffs[0])?));
        }
        let cof = self.conjugate_cofactor(a);
        let n = self.constant_part(self.mul(a, &cof))?;
        Ok(self.scale(&cof, &self.base.invert(&n)?))
    }

    pub fn eq_to_precision(&self, a: &ExtElt, b: &ExtElt) -> bool {
        self.sub(a, b).coeffs.iter().all(SeriesElt::has_no_terms)
    }

    pub fn format(&self, a: &ExtElt) -> Vec<String> {
        a.coeffs.iter().map(|c| self.base.format(c)).collect()
    }
}
