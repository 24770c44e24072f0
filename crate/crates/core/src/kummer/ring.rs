//! Truncated arithmetic in `Q_p(zeta_p, pi)` and its Gauss extension by `y`.
//!
//! With `z = zeta_p - 1` and `pi^m = z`, the ring of integers is
//! `Z_p[pi] / (Phi_p(1 + pi^m))`, an Eisenstein extension of degree
//! `e = m(p - 1)`. Elements are stored with coefficients modulo `p^N` on the
//! basis `1, pi, ..., pi^(e-1)`, which is the same as working modulo
//! `pi^(eN)`. Field elements are fractions of polynomials in `y` over that
//! ring. Fractions are not reduced; equality is tested by cross
//! multiplication.

use std::fmt::Write as _;

use crate::residue::{Gf, GfPoly, ResidueElt, ResidueField};

use super::KummerError;

type Ring = Vec<u64>;
type YPoly = Vec<Ring>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloField {
    p: u64,
    m: u32,
    with_y: bool,
    n: u32,
    modulus: u64,
    e: usize,
    /// `pi^e = sum tail[k] pi^k`.
    tail: Ring,
    residue: ResidueField,
}

/// `num / den` with `num`, `den` polynomials in `y` (constant without `y`).
/// Derived equality is structural; use [`CycloField::eq_to_precision`] for
/// field equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloElt {
    num: YPoly,
    den: YPoly,
}

impl CycloElt {
    pub fn has_unit_denominator(&self) -> bool {
        self.den.len() == 1
            && self.den[0].first() == Some(&1)
            && self.den[0][1..].iter().all(|&c| c == 0)
    }
}

fn v_p(mut a: u64, p: u64) -> u64 {
    let mut v = 0;
    while a.is_multiple_of(p) {
        a /= p;
        v += 1;
    }
    v
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

impl CycloField {
    pub fn new(p: u64, m: u32, with_y: bool, n: u32) -> Result<Self, KummerError> {
        let residue = if with_y {
            ResidueField::ratfunc(p)
        } else {
            ResidueField::gf(p)
        }
        .map_err(|_| KummerError::BadField(format!("{p} is not prime")))?;
        if residue.base().degree() != 1 {
            return Err(KummerError::BadField(format!("{p} is not prime")));
        }
        if m == 0 || n < 2 {
            return Err(KummerError::BadField("need m >= 1 and N >= 2".into()));
        }
        let modulus = p
            .checked_pow(n)
            .filter(|&q| q < 1 << 62)
            .ok_or_else(|| KummerError::BadField(format!("{p}^{n} exceeds 2^62")))?;
        let e = (m as u64 * (p - 1)) as usize;
        // Phi_p(1 + X) = sum_{j=1..p} C(p, j) X^(j-1), with X = pi^m
        let mut tail = vec![0u64; e];
        let mut binom = 1u128;
        for j in 1..p {
            binom = binom * (p - j + 1) as u128 / j as u128;
            let idx = (m as u64 * (j - 1)) as usize;
            tail[idx] = (modulus - (binom % modulus as u128) as u64) % modulus;
        }
        Ok(CycloField {
            p,
            m,
            with_y,
            n,
            modulus,
            e,
            tail,
            residue,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn with_y(&self) -> bool {
        self.with_y
    }

    pub fn padic_precision(&self) -> u32 {
        self.n
    }

    /// Ramification index over `Q_p`, equal to `v(p)`.
    pub fn e(&self) -> i64 {
        self.e as i64
    }

    /// `e' = v(p) / (p - 1) = v(z)`.
    pub fn e_prime(&self) -> i64 {
        self.m as i64
    }

    /// Valuation of `z^p`, the bound on `v(h - 1)` for non-trivial `h`.
    pub fn triviality_bound(&self) -> i64 {
        self.m as i64 * self.p as i64
    }

    /// Absolute precision of ring elements, `v(p^N)`.
    pub fn absolute_precision(&self) -> i64 {
        self.e as i64 * self.n as i64
    }

    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    pub fn describe(&self) -> String {
        format!(
            "cyclo:p={},m={},with_y={},N={}",
            self.p, self.m, self.with_y, self.n
        )
    }

    // ring layer

    fn r_zero(&self) -> Ring {
        vec![0; self.e]
    }

    fn r_const(&self, c: i64) -> Ring {
        let mut r = self.r_zero();
        r[0] = c.rem_euclid(self.modulus as i64) as u64;
        r
    }

    fn r_is_zero(&self, a: &Ring) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn r_add(&self, a: &Ring, b: &Ring) -> Ring {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x + y) % self.modulus)
            .collect()
    }

    fn r_neg(&self, a: &Ring) -> Ring {
        a.iter()
            .map(|&x| (self.modulus - x) % self.modulus)
            .collect()
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    fn r_mul(&self, a: &Ring, b: &Ring) -> Ring {
        let e = self.e;
        let mut buf = vec![0u64; 2 * e - 1];
        for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in b.iter().enumerate().filter(|(_, y)| **y != 0) {
                buf[i + j] = (buf[i + j] + self.mulmod(x, y)) % self.modulus;
            }
        }
        for d in (e..buf.len()).rev() {
            let c = buf[d];
            if c == 0 {
                continue;
            }
            for (k, &t) in self.tail.iter().enumerate().filter(|(_, t)| **t != 0) {
                let idx = d - e + k;
                buf[idx] = (buf[idx] + self.mulmod(c, t)) % self.modulus;
            }
        }
        buf.truncate(e);
        buf
    }

    /// Valuation and angular component digit, `None` when zero mod `p^N`.
    fn r_ac(&self, a: &Ring) -> Option<(i64, u32)> {
        let (k, vp) = a
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, &c)| (k, v_p(c, self.p)))
            .min_by_key(|&(k, vp)| self.e as u64 * vp + k as u64)?;
        let mut digit = (a[k] / self.p.pow(vp as u32)) % self.p;
        // p / pi^e has residue -1
        if vp % 2 == 1 {
            digit = (self.p - digit) % self.p;
        }
        Some((self.e as i64 * vp as i64 + k as i64, digit as u32))
    }

    fn r_val(&self, a: &Ring) -> Option<i64> {
        self.r_ac(a).map(|(v, _)| v)
    }

    /// Inverse of a ring unit by Newton iteration from the inverse of the
    /// constant coefficient.
    fn r_inv_unit(&self, a: &Ring) -> Option<Ring> {
        let c = inverse_mod(a[0], self.modulus)?;
        let mut x = self.r_const(c as i64);
        let one = self.r_const(1);
        let two = self.r_const(2);
        for _ in 0..128 {
            let ax = self.r_mul(a, &x);
            if ax == one {
                return Some(x);
            }
            x = self.r_mul(&x, &self.r_add(&two, &self.r_neg(&ax)));
        }
        None
    }

    // polynomials in y

    fn y_trim(&self, mut a: YPoly) -> YPoly {
        while a.last().is_some_and(|c| self.r_is_zero(c)) {
            a.pop();
        }
        a
    }

    fn y_add(&self, a: &YPoly, b: &YPoly) -> YPoly {
        let len = a.len().max(b.len());
        let zero = self.r_zero();
        let out = (0..len)
            .map(|i| self.r_add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
            .collect();
        self.y_trim(out)
    }

    fn y_neg(&self, a: &YPoly) -> YPoly {
        a.iter().map(|c| self.r_neg(c)).collect()
    }

    fn y_mul(&self, a: &YPoly, b: &YPoly) -> YPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.r_zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.r_is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.r_add(&out[i + j], &self.r_mul(x, y));
            }
        }
        self.y_trim(out)
    }

    fn y_val(&self, a: &YPoly) -> Option<i64> {
        a.iter().filter_map(|c| self.r_val(c)).min()
    }

    fn y_ac(&self, a: &YPoly) -> Option<(i64, GfPoly)> {
        let t = self.y_val(a)?;
        let coeffs = a
            .iter()
            .map(|c| match self.r_ac(c) {
                Some((v, d)) if v == t => Gf(d),
                _ => Gf(0),
            })
            .collect();
        Some((t, GfPoly::new(coeffs)))
    }

    fn make(&self, num: YPoly, den: YPoly) -> CycloElt {
        let num = self.y_trim(num);
        let den = self.y_trim(den);
        if den.len() == 1 && self.r_val(&den[0]) == Some(0) {
            if let Some(inv) = self.r_inv_unit(&den[0]) {
                let num = num.iter().map(|c| self.r_mul(c, &inv)).collect();
                return CycloElt {
                    num,
                    den: vec![self.r_const(1)],
                };
            }
        }
        CycloElt { num, den }
    }

    // field layer

    pub fn zero(&self) -> CycloElt {
        CycloElt {
            num: Vec::new(),
            den: vec![self.r_const(1)],
        }
    }

    pub fn one(&self) -> CycloElt {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> CycloElt {
        self.make(vec![self.r_const(n)], vec![self.r_const(1)])
    }

    pub fn pi(&self) -> CycloElt {
        self.pi_pow(1)
    }

    fn pi_pow(&self, k: usize) -> CycloElt {
        let mut r = self.r_const(1);
        let mut pi = self.r_zero();
        if self.e == 1 {
            pi = self.tail.clone();
        } else {
            pi[1] = 1;
        }
        for _ in 0..k {
            r = self.r_mul(&r, &pi);
        }
        self.make(vec![r], vec![self.r_const(1)])
    }

    /// `z = zeta_p - 1 = pi^m`.
    pub fn z(&self) -> CycloElt {
        self.pi_pow(self.m as usize)
    }

    pub fn y(&self) -> Result<CycloElt, KummerError> {
        if !self.with_y {
            return Err(KummerError::NoIndeterminate);
        }
        Ok(self.make(vec![self.r_zero(), self.r_const(1)], vec![self.r_const(1)]))
    }

    /// `sum_i (sum_j c[i][j] pi^j) y^i`; `y` degrees above 0 need `with_y`.
    pub fn from_coeffs(&self, coeffs: &[Vec<i64>]) -> Result<CycloElt, KummerError> {
        if !self.with_y && coeffs.len() > 1 {
            return Err(KummerError::NoIndeterminate);
        }
        let mut acc = self.zero();
        let pi = self.pi();
        let y = if self.with_y { self.y()? } else { self.one() };
        let mut y_pow = self.one();
        for row in coeffs {
            let mut pi_pow = self.one();
            for &c in row {
                acc = self.add(
                    &acc,
                    &self.mul(&self.mul(&self.from_int(c), &pi_pow), &y_pow),
                );
                pi_pow = self.mul(&pi_pow, &pi);
            }
            y_pow = self.mul(&y_pow, &y);
        }
        Ok(acc)
    }

    pub fn add(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        if a.den == b.den {
            return self.make(self.y_add(&a.num, &b.num), a.den.clone());
        }
        let num = self.y_add(&self.y_mul(&a.num, &b.den), &self.y_mul(&b.num, &a.den));
        self.make(num, self.y_mul(&a.den, &b.den))
    }

    pub fn neg(&self, a: &CycloElt) -> CycloElt {
        CycloElt {
            num: self.y_neg(&a.num),
            den: a.den.clone(),
        }
    }

    pub fn sub(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &CycloElt, b: &CycloElt) -> CycloElt {
        self.make(self.y_mul(&a.num, &b.num), self.y_mul(&a.den, &b.den))
    }

    pub fn mul_int(&self, a: &CycloElt, n: i64) -> CycloElt {
        self.mul(a, &self.from_int(n))
    }

    pub fn inv(&self, a: &CycloElt) -> Result<CycloElt, KummerError> {
        if self.y_val(&a.num).is_none() {
            return Err(KummerError::DivisionByZero);
        }
        Ok(self.make(a.den.clone(), a.num.clone()))
    }

    pub fn div(&self, a: &CycloElt, b: &CycloElt) -> Result<CycloElt, KummerError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &CycloElt, e: i64) -> Result<CycloElt, KummerError> {
        let mut base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Absolute precision of `a`: it is known modulo `pi^precision`.
    pub fn precision(&self, a: &CycloElt) -> i64 {
        self.absolute_precision() - self.y_val(&a.den).unwrap_or(0)
    }

    pub fn valuation(&self, a: &CycloElt) -> Result<i64, KummerError> {
        let d = self.y_val(&a.den).ok_or(KummerError::DivisionByZero)?;
        match self.y_val(&a.num) {
            Some(v) => Ok(v - d),
            None => Err(KummerError::ZeroToPrecision {
                precision: self.precision(a),
            }),
        }
    }

    pub fn is_zero_to_precision(&self, a: &CycloElt) -> bool {
        self.y_val(&a.num).is_none()
    }

    pub fn eq_to_precision(&self, a: &CycloElt, b: &CycloElt) -> bool {
        self.is_zero_to_precision(&self.sub(a, b))
    }

    /// Residue of `a / pi^v(a)`.
    pub fn angular_component(&self, a: &CycloElt) -> Result<ResidueElt, KummerError> {
        let (_, n) = self.y_ac(&a.num).ok_or(KummerError::ZeroToPrecision {
            precision: self.precision(a),
        })?;
        let (_, d) = self.y_ac(&a.den).ok_or(KummerError::DivisionByZero)?;
        Ok(match &self.residue {
            ResidueField::Gf(f) => ResidueElt::Gf(f.mul(n.coeff(0), f.inv(d.coeff(0))?)),
            ResidueField::RatFunc(_) => self.residue.fraction(n, d)?,
        })
    }

    pub fn residue_class(&self, a: &CycloElt) -> Result<ResidueElt, KummerError> {
        match self.valuation(a)? {
            0 => self.angular_component(a),
            v => Err(KummerError::NotUnit(v)),
        }
    }

    /// Teichmuller-free lift: integer coefficients in `[0, p)`.
    pub fn lift(&self, r: &ResidueElt) -> CycloElt {
        let poly = |g: &GfPoly| -> YPoly {
            self.y_trim(
                g.coeffs()
                    .iter()
                    .map(|c| self.r_const(c.0 as i64))
                    .collect(),
            )
        };
        match r {
            ResidueElt::Gf(c) => self.from_int(c.0 as i64),
            ResidueElt::RatFunc { num, den } => self.make(poly(num), poly(den)),
        }
    }

    fn balanced(&self, c: u64) -> i64 {
        if c > self.modulus / 2 {
            c as i64 - self.modulus as i64
        } else {
            c as i64
        }
    }

    fn format_poly(&self, a: &YPoly) -> String {
        let mut out = String::new();
        for (i, r) in a.iter().enumerate() {
            for (j, &c) in r.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let c = self.balanced(c);
                let mut factors = Vec::new();
                if j > 0 {
                    factors.push(if j == 1 {
                        "pi".to_string()
                    } else {
                        format!("pi^{j}")
                    });
                }
                if i > 0 {
                    factors.push(if i == 1 {
                        "y".to_string()
                    } else {
                        format!("y^{i}")
                    });
                }
                let mag = c.unsigned_abs();
                let body = match (mag, factors.is_empty()) {
                    (_, true) => mag.to_string(),
                    (1, false) => factors.join("*"),
                    _ => format!("{mag}*{}", factors.join("*")),
                };
                match (out.is_empty(), c < 0) {
                    (true, false) => out.push_str(&body),
                    (true, true) => write!(out, "-{body}").unwrap(),
                    (false, false) => write!(out, " + {body}").unwrap(),
                    (false, true) => write!(out, " - {body}").unwrap(),
                }
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    pub fn format(&self, a: &CycloElt) -> String {
        let num = self.format_poly(&a.num);
        if a.has_unit_denominator() {
            return num;
        }
        format!("({num})/({})", self.format_poly(&a.den))
    }
}
