//! Residue fields: finite fields `GF(q)` and rational function fields
//! `GF(q)(y)`, with the two membership tests the classifications need:
//! p-th powers and the image of `x -> x^p - x`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("division by zero in the residue field")]
    DivisionByZero,
    #[error("{0} is not a prime power with a usable modulus")]
    BadOrder(u64),
    #[error("modulus {0:?} is not a monic irreducible polynomial of degree {1} over GF({2})")]
    BadModulus(Vec<u32>, u32, u32),
    #[error("element belongs to a different residue field")]
    WrongField,
}

/// Conway polynomials for the small non-prime fields, coefficients low-first.
const DEFAULT_MODULI: &[(u32, &[u32])] = &[
    (4, &[1, 1, 1]),
    (8, &[1, 1, 0, 1]),
    (9, &[2, 2, 1]),
    (16, &[1, 1, 0, 0, 1]),
    (25, &[2, 4, 1]),
    (27, &[1, 2, 0, 1]),
];

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn prime_power(q: u64) -> Option<(u32, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    if !is_prime(p) {
        return None;
    }
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p as u32, m))
}

// Dense polynomials over the prime field, low-first; used for modulus checks.
mod fp_poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let r = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(r)
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let inv_lead = super::inv_mod(m[dm], p);
        while r.len() > dm {
            let k = r.len() - 1 - dm;
            let c = (r[r.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
            for (i, &mi) in m.iter().enumerate() {
                let t = (c as u64 * mi as u64 % p as u64) as u32;
                r[k + i] = (r[k + i] + p - t) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        rem(&r.into_iter().map(|x| x as u32).collect::<Vec<_>>(), m, p)
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^(p^k) mod m`.
    pub fn frobenius_power_of_x(k: u32, m: &[u32], p: u32) -> Vec<u32> {
        let mut r = rem(&[0, 1], m, p);
        for _ in 0..k {
            let mut acc = vec![1u32];
            let mut base = r.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &base, m, p);
                }
                base = mulmod(&base, &base, m, p);
                e >>= 1;
            }
            r = acc;
        }
        r
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let n = (m.len() - 1) as u32;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        if frobenius_power_of_x(n, m, p) != rem(&[0, 1], m, p) {
            return false;
        }
        let prime_divisors = (2..=n).filter(|d| n.is_multiple_of(*d) && super::is_prime(*d as u64));
        for r in prime_divisors {
            let h = sub(&frobenius_power_of_x(n / r, m, p), &[0, 1], p);
            if gcd(&h, m, p).len() != 1 {
                return false;
            }
        }
        true
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Solves `M x = rhs` over GF(p); `rows` is a list of equations.
pub(crate) fn solve_mod_p(mut rows: Vec<Vec<u32>>, mut rhs: Vec<u32>, p: u32) -> Option<Vec<u32>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        rhs.swap(r, pr);
        let inv = inv_mod(rows[r][c], p) as u64;
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * inv % p as u64) as u32;
        }
        rhs[r] = (rhs[r] as u64 * inv % p as u64) as u32;
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c] as u64;
                let pivot = rows[r].clone();
                for (x, &y) in rows[i].iter_mut().zip(&pivot) {
                    let t = (f * y as u64 % p as u64) as u32;
                    *x = (*x + p - t) % p;
                }
                let t = (f * rhs[r] as u64 % p as u64) as u32;
                rhs[i] = (rhs[i] + p - t) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rhs[r..].iter().any(|&x| x != 0) {
        return None;
    }
    let mut x = vec![0u32; n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i];
    }
    Some(x)
}

/// An element of `GF(q)`, packed as the base-`p` digits of its coefficient
/// vector over the power basis `1, w, ..., w^(m-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GfField {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
}

impl GfField {
    /// `GF(q)` with the built-in modulus table, falling back to the
    /// lexicographically smallest monic irreducible polynomial.
    pub fn new(q: u64) -> Result<Self, ResidueError> {
        let (p, m) = prime_power(q).ok_or(ResidueError::BadOrder(q))?;
        if q > (1 << 24) {
            return Err(ResidueError::BadOrder(q));
        }
        if m == 1 {
            return Ok(GfField {
                p,
                m,
                q: p,
                modulus: vec![0, 1],
            });
        }
        if let Some((_, coeffs)) = DEFAULT_MODULI.iter().find(|(qq, _)| *qq as u64 == q) {
            return Self::with_modulus(p, coeffs.to_vec());
        }
        let q = q as u32;
        let modulus = (0..q)
            .map(|code| {
                let mut c: Vec<u32> = (0..m).map(|i| code / p.pow(i) % p).collect();
                c.push(1);
                c
            })
            .find(|c| fp_poly::is_irreducible(c, p))
            .expect("irreducible polynomials exist in every degree");
        Self::with_modulus(p, modulus)
    }

    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self, ResidueError> {
        let m = modulus.len() as u32 - 1;
        let bad = || ResidueError::BadModulus(modulus.clone(), m, p);
        if !is_prime(p as u64) || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(bad());
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(bad());
        }
        let q = p.checked_pow(m).ok_or_else(bad)?;
        Ok(GfField { p, m, q, modulus })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Gf {
        Gf(0)
    }

    pub fn one(&self) -> Gf {
        Gf(1)
    }

    /// The generator `w` of the power basis; prime fields have none.
    pub fn generator(&self) -> Option<Gf> {
        (self.m > 1).then_some(Gf(self.p))
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf> {
        (0..self.q).map(Gf)
    }

    pub fn from_int(&self, n: i64) -> Gf {
        Gf(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn digits(&self, a: Gf) -> Vec<u32> {
        let mut x = a.0;
        (0..self.m)
            .map(|_| {
                let d = x % self.p;
                x /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> Gf {
        Gf(digits
            .iter()
            .rev()
            .fold(0, |acc, &d| acc * self.p + d % self.p))
    }

    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        if self.m == 1 {
            return Gf((a.0 + b.0) % self.p);
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.from_digits(&s)
    }

    pub fn neg(&self, a: Gf) -> Gf {
        let s: Vec<u32> = self
            .digits(a)
            .iter()
            .map(|u| (self.p - u) % self.p)
            .collect();
        self.from_digits(&s)
    }

    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        let p = self.p as u64;
        if self.m == 1 {
            return Gf((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        let prod = fp_poly::mulmod(
            &fp_poly::trim(self.digits(a)),
            &fp_poly::trim(self.digits(b)),
            &self.modulus,
            self.p,
        );
        self.from_digits(&prod)
    }

    pub fn pow(&self, a: Gf, mut e: u64) -> Gf {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Gf) -> Result<Gf, ResidueError> {
        if a.0 == 0 {
            return Err(ResidueError::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn frobenius(&self, a: Gf) -> Gf {
        self.pow(a, self.p as u64)
    }

    /// The unique `r` with `r^p = a`; every element of a finite field has one.
    pub fn pth_root(&self, a: Gf) -> Gf {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// Absolute trace to the prime field, returned as an integer in `0..p`.
    pub fn absolute_trace(&self, a: Gf) -> u32 {
        let mut acc = self.zero();
        let mut x = a;
        for _ in 0..self.m {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    pub fn format(&self, a: Gf) -> String {
        if self.m == 1 {
            return a.0.to_string();
        }
        let d = self.digits(a);
        let parts: Vec<String> = d
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "w".to_string(),
                (1, c) => format!("{c}*w"),
                (i, 1) => format!("w^{i}"),
                (i, c) => format!("{c}*w^{i}"),
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

/// A polynomial over `GF(q)`, coefficients low-first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GfPoly(Vec<Gf>);

impl GfPoly {
    pub fn new(mut c: Vec<Gf>) -> Self {
        while c.last() == Some(&Gf(0)) {
            c.pop();
        }
        GfPoly(c)
    }

    pub fn constant(c: Gf) -> Self {
        GfPoly::new(vec![c])
    }

    pub fn monomial(c: Gf, deg: usize) -> Self {
        let mut v = vec![Gf(0); deg + 1];
        v[deg] = c;
        GfPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Gf] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Gf {
        self.0.last().copied().unwrap_or(Gf(0))
    }

    pub fn coeff(&self, i: usize) -> Gf {
        self.0.get(i).copied().unwrap_or(Gf(0))
    }
}

impl GfField {
    pub fn poly_add(&self, a: &GfPoly, b: &GfPoly) -> GfPoly {
        let n = a.0.len().max(b.0.len());
        GfPoly::new((0..n).map(|i| self.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn poly_neg(&self, a: &GfPoly) -> GfPoly {
        GfPoly::new(a.0.iter().map(|&c| self.neg(c)).collect())
    }

    pub fn poly_sub(&self, a: &GfPoly, b: &GfPoly) -> GfPoly {
        self.poly_add(a, &self.poly_neg(b))
    }

    pub fn poly_scale(&self, a: &GfPoly, c: Gf) -> GfPoly {
        GfPoly::new(a.0.iter().map(|&x| self.mul(x, c)).collect())
    }

    pub fn poly_mul(&self, a: &GfPoly, b: &GfPoly) -> GfPoly {
        if a.is_zero() || b.is_zero() {
            return GfPoly::default();
        }
        let mut r = vec![Gf(0); a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.0 == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                r[i + j] = self.add(r[i + j], self.mul(x, y));
            }
        }
        GfPoly::new(r)
    }

    pub fn poly_pow(&self, a: &GfPoly, mut e: u64) -> GfPoly {
        let mut acc = GfPoly::constant(self.one());
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(&acc, &base);
            }
            base = self.poly_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn poly_divrem(&self, a: &GfPoly, b: &GfPoly) -> Result<(GfPoly, GfPoly), ResidueError> {
        let db = b.degree().ok_or(ResidueError::DivisionByZero)?;
        let inv = self.inv(b.leading())?;
        let mut r = a.0.clone();
        let mut q = vec![Gf(0); a.0.len().saturating_sub(db).max(1)];
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let c = self.mul(*r.last().unwrap(), inv);
            q[k] = c;
            for (i, &bi) in b.0.iter().enumerate() {
                r[k + i] = self.sub(r[k + i], self.mul(c, bi));
            }
            while r.last() == Some(&Gf(0)) {
                r.pop();
            }
        }
        Ok((GfPoly::new(q), GfPoly::new(r)))
    }

    pub fn poly_monic(&self, a: &GfPoly) -> GfPoly {
        if a.is_zero() {
            return a.clone();
        }
        let inv = self.inv(a.leading()).expect("nonzero leading coefficient");
        self.poly_scale(a, inv)
    }

    pub fn poly_gcd(&self, a: &GfPoly, b: &GfPoly) -> GfPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = self.poly_divrem(&a, &b).expect("b is nonzero");
            a = b;
            b = r;
        }
        self.poly_monic(&a)
    }

    pub fn poly_derivative(&self, a: &GfPoly) -> GfPoly {
        GfPoly::new(
            a.0.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.mul(c, self.from_int(i as i64)))
                .collect(),
        )
    }

    /// `sum c_i^p y^(ip)`.
    pub fn poly_frobenius(&self, a: &GfPoly) -> GfPoly {
        let p = self.p as usize;
        let mut r = vec![Gf(0); a.0.len().saturating_sub(1) * p + 1];
        for (i, &c) in a.0.iter().enumerate() {
            r[i * p] = self.frobenius(c);
        }
        GfPoly::new(r)
    }

    /// Inverse of [`GfField::poly_frobenius`], when `a` is a p-th power.
    pub fn poly_pth_root(&self, a: &GfPoly) -> Option<GfPoly> {
        let p = self.p as usize;
        if a.0.iter().enumerate().any(|(i, c)| c.0 != 0 && i % p != 0) {
            return None;
        }
        Some(GfPoly::new(
            a.0.iter().step_by(p).map(|&c| self.pth_root(c)).collect(),
        ))
    }

    /// Square-free factorization of a nonzero polynomial: monic factors `g_i`
    /// with multiplicities `i`, such that `a = lc(a) * prod g_i^i`.
    pub fn squarefree_factorization(&self, a: &GfPoly) -> Vec<(GfPoly, usize)> {
        let mut out = Vec::new();
        self.sff_into(&self.poly_monic(a), 1, &mut out);
        out.sort_by_key(|(_, m)| *m);
        let mut merged: Vec<(GfPoly, usize)> = Vec::new();
        for (g, m) in out {
            match merged.iter_mut().find(|(_, mm)| *mm == m) {
                Some(slot) => slot.0 = self.poly_mul(&slot.0, &g),
                None => merged.push((g, m)),
            }
        }
        merged
    }

    fn sff_into(&self, f: &GfPoly, scale: usize, out: &mut Vec<(GfPoly, usize)>) {
        if f.degree().unwrap_or(0) == 0 {
            return;
        }
        let df = self.poly_derivative(f);
        if df.is_zero() {
            let root = self
                .poly_pth_root(f)
                .expect("zero derivative means p-th power");
            self.sff_into(&root, scale * self.p as usize, out);
            return;
        }
        let div = |x: &GfPoly, y: &GfPoly| self.poly_divrem(x, y).expect("nonzero divisor").0;
        let mut c = self.poly_gcd(f, &df);
        let mut w = div(f, &c);
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = self.poly_gcd(&w, &c);
            let z = div(&w, &y);
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i * scale));
            }
            i += 1;
            w = y;
            c = div(&c, &w);
        }
        if c.degree().unwrap_or(0) > 0 {
            let root = self
                .poly_pth_root(&c)
                .expect("remaining cofactor is a p-th power");
            self.sff_into(&root, scale * self.p as usize, out);
        }
    }

    /// Solves `a^p - a * b^(p-1) = rhs` for a polynomial `a` of degree at most
    /// `bound`. The map is GF(p)-linear in the coefficients of `a`.
    fn solve_artin_schreier_poly(&self, rhs: &GfPoly, b: &GfPoly, bound: usize) -> Option<GfPoly> {
        let p = self.p as usize;
        let m = self.m as usize;
        let bp = self.poly_pow(b, p as u64 - 1);
        let images: Vec<GfPoly> = (0..=bound)
            .flat_map(|d| (0..m).map(move |j| (d, j)))
            .map(|(d, j)| {
                let mut digits = vec![0u32; m];
                digits[j] = 1;
                let e = GfPoly::monomial(self.from_digits(&digits), d);
                self.poly_sub(&self.poly_frobenius(&e), &self.poly_mul(&e, &bp))
            })
            .collect();
        let len = images
            .iter()
            .filter_map(GfPoly::degree)
            .chain(rhs.degree())
            .max()
            .map_or(1, |d| d + 1);
        let mut rows = vec![vec![0u32; images.len()]; len * m];
        for (col, img) in images.iter().enumerate() {
            for k in 0..len {
                for (t, digit) in self.digits(img.coeff(k)).into_iter().enumerate() {
                    rows[k * m + t][col] = digit;
                }
            }
        }
        let rhs_digits: Vec<u32> = (0..len).flat_map(|k| self.digits(rhs.coeff(k))).collect();
        let sol = solve_mod_p(rows, rhs_digits, self.p)?;
        let coeffs = sol.chunks(m).map(|ch| self.from_digits(ch)).collect();
        Some(GfPoly::new(coeffs))
    }

    fn format_coeff(&self, c: Gf) -> String {
        let s = self.format(c);
        if s.contains('+') {
            format!("({s})")
        } else {
            s
        }
    }

    pub fn format_poly(&self, a: &GfPoly, var: &str) -> String {
        let parts: Vec<String> =
            a.0.iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| c.0 != 0)
                .map(|(i, &c)| {
                    let mono = match i {
                        0 => String::new(),
                        1 => var.to_string(),
                        _ => format!("{var}^{i}"),
                    };
                    match (i, c == self.one()) {
                        (0, _) => self.format_coeff(c),
                        (_, true) => mono,
                        (_, false) => format!("{}*{mono}", self.format_coeff(c)),
                    }
                })
                .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResidueField {
    Gf(GfField),
    /// `GF(q)(y)`.
    RatFunc(GfField),
}

/// Residue field element in canonical form: packed `GF(q)` value, or a
/// reduced fraction with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResidueElt {
    Gf(Gf),
    RatFunc { num: GfPoly, den: GfPoly },
}

/// Result of an Artin-Schreier membership query, with the degree bound used
/// by the rational-function solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinSchreierSolve {
    pub solution: Option<ResidueElt>,
    pub degree_bound: Option<usize>,
}

impl ResidueField {
    pub fn gf(q: u64) -> Result<Self, ResidueError> {
        Ok(ResidueField::Gf(GfField::new(q)?))
    }

    pub fn ratfunc(q: u64) -> Result<Self, ResidueError> {
        Ok(ResidueField::RatFunc(GfField::new(q)?))
    }

    pub fn base(&self) -> &GfField {
        match self {
            ResidueField::Gf(f) | ResidueField::RatFunc(f) => f,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.base().p()
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self, ResidueField::Gf(_))
    }

    pub fn describe(&self) -> String {
        match self {
            ResidueField::Gf(f) => format!("gf:{}", f.order()),
            ResidueField::RatFunc(f) => format!("ratfunc:{}", f.order()),
        }
    }

    pub fn zero(&self) -> ResidueElt {
        self.from_gf(Gf(0))
    }

    pub fn one(&self) -> ResidueElt {
        self.from_gf(Gf(1))
    }

    pub fn from_int(&self, n: i64) -> ResidueElt {
        self.from_gf(self.base().from_int(n))
    }

    pub fn from_gf(&self, c: Gf) -> ResidueElt {
        match self {
            ResidueField::Gf(_) => ResidueElt::Gf(c),
            ResidueField::RatFunc(_) => ResidueElt::RatFunc {
                num: GfPoly::constant(c),
                den: GfPoly::constant(Gf(1)),
            },
        }
    }

    /// The indeterminate `y` of a rational function field.
    pub fn indeterminate(&self) -> Option<ResidueElt> {
        match self {
            ResidueField::Gf(_) => None,
            ResidueField::RatFunc(_) => Some(ResidueElt::RatFunc {
                num: GfPoly::monomial(Gf(1), 1),
                den: GfPoly::constant(Gf(1)),
            }),
        }
    }

    /// Builds `num / den` in canonical form.
    pub fn fraction(&self, num: GfPoly, den: GfPoly) -> Result<ResidueElt, ResidueError> {
        let f = match self {
            ResidueField::RatFunc(f) => f,
            ResidueField::Gf(_) => return Err(ResidueError::WrongField),
        };
        if den.is_zero() {
            return Err(ResidueError::DivisionByZero);
        }
        let g = f.poly_gcd(&num, &den);
        let (num, _) = f.poly_divrem(&num, &g)?;
        let (den, _) = f.poly_divrem(&den, &g)?;
        let lc = f.inv(den.leading())?;
        Ok(ResidueElt::RatFunc {
            num: f.poly_scale(&num, lc),
            den: f.poly_scale(&den, lc),
        })
    }

    fn parts<'a>(&self, a: &'a ResidueElt) -> (&'a GfPoly, &'a GfPoly) {
        match a {
            ResidueElt::RatFunc { num, den } => (num, den),
            ResidueElt::Gf(_) => panic!("{}", ResidueError::WrongField),
        }
    }

    pub fn is_zero(&self, a: &ResidueElt) -> bool {
        match a {
            ResidueElt::Gf(x) => x.0 == 0,
            ResidueElt::RatFunc { num, .. } => num.is_zero(),
        }
    }

    pub fn is_one(&self, a: &ResidueElt) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &ResidueElt, b: &ResidueElt) -> ResidueElt {
        match self {
            ResidueField::Gf(f) => match (a, b) {
                (ResidueElt::Gf(x), ResidueElt::Gf(y)) => ResidueElt::Gf(f.add(*x, *y)),
                _ => panic!("{}", ResidueError::WrongField),
            },
            ResidueField::RatFunc(f) => {
                let ((an, ad), (bn, bd)) = (self.parts(a), self.parts(b));
                if ad == bd {
                    let num = f.poly_add(an, bn);
                    return self.fraction(num, ad.clone()).expect("nonzero denominator");
                }
                let num = f.poly_add(&f.poly_mul(an, bd), &f.poly_mul(bn, ad));
                self.fraction(num, f.poly_mul(ad, bd))
                    .expect("nonzero denominator")
            }
        }
    }

    pub fn neg(&self, a: &ResidueElt) -> ResidueElt {
        match (self, a) {
            (ResidueField::Gf(f), ResidueElt::Gf(x)) => ResidueElt::Gf(f.neg(*x)),
            (ResidueField::RatFunc(f), ResidueElt::RatFunc { num, den }) => ResidueElt::RatFunc {
                num: f.poly_neg(num),
                den: den.clone(),
            },
            _ => panic!("{}", ResidueError::WrongField),
        }
    }

    pub fn sub(&self, a: &ResidueElt, b: &ResidueElt) -> ResidueElt {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &ResidueElt, b: &ResidueElt) -> ResidueElt {
        match self {
            ResidueField::Gf(f) => match (a, b) {
                (ResidueElt::Gf(x), ResidueElt::Gf(y)) => ResidueElt::Gf(f.mul(*x, *y)),
                _ => panic!("{}", ResidueError::WrongField),
            },
            ResidueField::RatFunc(f) => {
                let ((an, ad), (bn, bd)) = (self.parts(a), self.parts(b));
                self.fraction(f.poly_mul(an, bn), f.poly_mul(ad, bd))
                    .expect("nonzero denominator")
            }
        }
    }

    pub fn inv(&self, a: &ResidueElt) -> Result<ResidueElt, ResidueError> {
        match (self, a) {
            (ResidueField::Gf(f), ResidueElt::Gf(x)) => Ok(ResidueElt::Gf(f.inv(*x)?)),
            (ResidueField::RatFunc(_), ResidueElt::RatFunc { num, den }) => {
                self.fraction(den.clone(), num.clone())
            }
            _ => Err(ResidueError::WrongField),
        }
    }

    pub fn div(&self, a: &ResidueElt, b: &ResidueElt) -> Result<ResidueElt, ResidueError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &ResidueElt, e: i64) -> Result<ResidueElt, ResidueError> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn mul_int(&self, a: &ResidueElt, n: i64) -> ResidueElt {
        self.mul(a, &self.from_int(n))
    }

    pub fn frobenius(&self, a: &ResidueElt) -> ResidueElt {
        match (self, a) {
            (ResidueField::Gf(f), ResidueElt::Gf(x)) => ResidueElt::Gf(f.frobenius(*x)),
            (ResidueField::RatFunc(f), ResidueElt::RatFunc { num, den }) => ResidueElt::RatFunc {
                num: f.poly_frobenius(num),
                den: f.poly_frobenius(den),
            },
            _ => panic!("{}", ResidueError::WrongField),
        }
    }

    /// The `r` with `r^p = c`, when one exists.
    pub fn pth_root(&self, c: &ResidueElt) -> Option<ResidueElt> {
        match (self, c) {
            (ResidueField::Gf(f), ResidueElt::Gf(x)) => Some(ResidueElt::Gf(f.pth_root(*x))),
            (ResidueField::RatFunc(f), ResidueElt::RatFunc { num, den }) => {
                let num = f.poly_pth_root(num)?;
                let den = f.poly_pth_root(den)?;
                Some(ResidueElt::RatFunc { num, den })
            }
            _ => None,
        }
    }

    pub fn artin_schreier_preimage(&self, c: &ResidueElt) -> Option<ResidueElt> {
        self.artin_schreier_solve(c).solution
    }

    /// Decides whether `c = x^p - x` for some `x` and returns such an `x`.
    ///
    /// For `GF(q)(y)` the reduced denominator of `x^p - x` is the p-th power of
    /// the denominator of `x`, so the denominator `b` of a solution is forced;
    /// the numerator is found by a GF(p)-linear solve with its degree bounded
    /// by `max(deg num c, deg den c) / p + 1`, which is reported.
    pub fn artin_schreier_solve(&self, c: &ResidueElt) -> ArtinSchreierSolve {
        match (self, c) {
            (ResidueField::Gf(f), ResidueElt::Gf(x)) => {
                let sol = f.solve_artin_schreier_poly(
                    &GfPoly::constant(*x),
                    &GfPoly::constant(f.one()),
                    0,
                );
                ArtinSchreierSolve {
                    solution: sol.map(|a| ResidueElt::Gf(a.coeff(0))),
                    degree_bound: None,
                }
            }
            (ResidueField::RatFunc(f), ResidueElt::RatFunc { num, den }) => {
                let bound =
                    num.degree().unwrap_or(0).max(den.degree().unwrap_or(0)) / f.p() as usize + 1;
                let solution = f.poly_pth_root(den).and_then(|b| {
                    let a = f.solve_artin_schreier_poly(num, &b, bound)?;
                    Some(self.fraction(a, b).expect("monic denominator"))
                });
                ArtinSchreierSolve {
                    solution,
                    degree_bound: Some(bound),
                }
            }
            _ => ArtinSchreierSolve {
                solution: None,
                degree_bound: None,
            },
        }
    }

    pub fn format(&self, a: &ResidueElt) -> String {
        match (self, a) {
            (ResidueField::Gf(f), ResidueElt::Gf(x)) => f.format(*x),
            (ResidueField::RatFunc(f), ResidueElt::RatFunc { num, den }) => {
                let n = f.format_poly(num, "y");
                if den.degree() == Some(0) {
                    return n;
                }
                format!("({n})/({})", f.format_poly(den, "y"))
            }
            _ => "<wrong field>".to_string(),
        }
    }
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidueField::Gf(g) => write!(f, "GF({})", g.order()),
            ResidueField::RatFunc(g) => write!(f, "GF({})(y)", g.order()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_as(f: &GfField, c: Gf) -> Option<Gf> {
        f.elements().find(|&x| f.sub(f.frobenius(x), x) == c)
    }

    #[test]
    fn default_moduli_are_irreducible() {
        for (q, m) in DEFAULT_MODULI {
            let (p, _) = prime_power(*q as u64).unwrap();
            assert!(fp_poly::is_irreducible(m, p), "q = {q}");
        }
        assert!(!fp_poly::is_irreducible(&[1, 0, 1], 2));
        assert!(GfField::with_modulus(2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn fallback_modulus_search() {
        for q in [32u64, 49, 64, 81, 125] {
            let f = GfField::new(q).unwrap();
            assert_eq!(f.order() as u64, q);
            for x in f.elements().step_by(7) {
                assert_eq!(f.pow(x, q), x);
            }
        }
        assert!(GfField::new(12).is_err());
    }

    #[test]
    fn gf4_frobenius_of_generator() {
        let f = GfField::new(4).unwrap();
        let w = f.generator().unwrap();
        assert_eq!(f.frobenius(w), f.add(w, f.one()));
        assert_eq!(f.format(f.frobenius(w)), "w+1");
    }

    #[test]
    fn gf3_fermat() {
        let f = GfField::new(3).unwrap();
        assert_eq!(f.pow(Gf(2), 3), Gf(2));
        assert_eq!(f.inv(Gf(2)), Ok(Gf(2)));
        assert_eq!(f.inv(Gf(0)), Err(ResidueError::DivisionByZero));
    }

    #[test]
    fn ratfunc_inverse_of_y() {
        let k = ResidueField::ratfunc(2).unwrap();
        let y = k.indeterminate().unwrap();
        let inv = k.inv(&y).unwrap();
        assert_eq!(k.format(&inv), "(1)/(y)");
        assert_eq!(k.mul(&y, &inv), k.one());
        assert_eq!(k.inv(&k.zero()), Err(ResidueError::DivisionByZero));
    }

    #[test]
    fn pth_root_examples() {
        let gf2 = ResidueField::gf(2).unwrap();
        assert_eq!(gf2.pth_root(&gf2.one()), Some(gf2.one()));
        let k = ResidueField::ratfunc(2).unwrap();
        let y = k.indeterminate().unwrap();
        assert_eq!(k.pth_root(&y), None);
        let y2 = k.mul(&y, &y);
        assert_eq!(k.pth_root(&y2), Some(y.clone()));
        let k3 = ResidueField::ratfunc(9).unwrap();
        let y = k3.indeterminate().unwrap();
        let w = k3.from_gf(GfField::new(9).unwrap().generator().unwrap());
        let c = k3
            .div(
                &k3.pow(&k3.add(&y, &w), 3).unwrap(),
                &k3.pow(&y, 6).unwrap(),
            )
            .unwrap();
        let r = k3.pth_root(&c).unwrap();
        assert_eq!(k3.frobenius(&r), c);
    }

    #[test]
    fn artin_schreier_examples() {
        let gf2 = ResidueField::gf(2).unwrap();
        assert_eq!(gf2.artin_schreier_preimage(&gf2.one()), None);
        let x = gf2.artin_schreier_preimage(&gf2.zero()).unwrap();
        assert!(gf2.is_zero(&gf2.sub(&gf2.frobenius(&x), &x)));

        let f4 = GfField::new(4).unwrap();
        let w = f4.generator().unwrap();
        let gf4 = ResidueField::Gf(f4.clone());
        assert_eq!(f4.absolute_trace(w), 1);
        assert_eq!(brute_force_as(&f4, w), None);
        assert_eq!(gf4.artin_schreier_preimage(&ResidueElt::Gf(w)), None);
        assert!(gf4.artin_schreier_preimage(&gf4.one()).is_some());
    }

    #[test]
    fn artin_schreier_trace_criterion_exhaustive() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = GfField::new(q).unwrap();
            let k = ResidueField::Gf(f.clone());
            for c in f.elements() {
                let sol = k.artin_schreier_preimage(&ResidueElt::Gf(c));
                assert_eq!(
                    sol.is_none(),
                    f.absolute_trace(c) != 0,
                    "q = {q}, c = {c:?}"
                );
                assert_eq!(sol.is_none(), brute_force_as(&f, c).is_none());
                if let Some(ResidueElt::Gf(x)) = sol {
                    assert_eq!(f.sub(f.frobenius(x), x), c);
                }
            }
        }
    }

    #[test]
    fn artin_schreier_ratfunc() {
        let k = ResidueField::ratfunc(3).unwrap();
        let y = k.indeterminate().unwrap();
        // x = (y^2 + 1)/y gives a solvable right-hand side with a pole
        let x = k.div(&k.add(&k.mul(&y, &y), &k.one()), &y).unwrap();
        let c = k.sub(&k.frobenius(&x), &x);
        let solve = k.artin_schreier_solve(&c);
        let sol = solve.solution.unwrap();
        assert_eq!(k.sub(&k.frobenius(&sol), &sol), c);
        assert_eq!(solve.degree_bound, Some(3));
        // y itself is not of the form x^3 - x
        assert_eq!(k.artin_schreier_preimage(&y), None);
        // a denominator that is not a cube
        assert_eq!(k.artin_schreier_preimage(&k.inv(&y).unwrap()), None);
        let k2 = ResidueField::ratfunc(2).unwrap();
        assert_eq!(k2.artin_schreier_preimage(&k2.one()), None);
    }

    #[test]
    fn squarefree_factorization_recombines() {
        let f = GfField::new(3).unwrap();
        let y = GfPoly::monomial(Gf(1), 1);
        let y1 = f.poly_add(&y, &GfPoly::constant(Gf(1)));
        // y^3 * (y+1)^2 * (y+2)
        let a = f.poly_mul(
            &f.poly_mul(&f.poly_pow(&y, 3), &f.poly_pow(&y1, 2)),
            &f.poly_add(&y, &GfPoly::constant(Gf(2))),
        );
        let sff = f.squarefree_factorization(&a);
        let mut back = GfPoly::constant(Gf(1));
        for (g, m) in &sff {
            back = f.poly_mul(&back, &f.poly_pow(g, *m as u64));
        }
        assert_eq!(back, a);
        let mults: Vec<usize> = sff.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 2, 3]);
    }

    fn ratfunc_elt(k: ResidueField) -> impl Strategy<Value = ResidueElt> {
        let q = k.base().order();
        (
            proptest::collection::vec(0..q, 0..4),
            proptest::collection::vec(0..q, 1..3),
        )
            .prop_filter_map("zero denominator", move |(n, mut d)| {
                d.push(1);
                let num = GfPoly::new(n.into_iter().map(Gf).collect());
                let den = GfPoly::new(d.into_iter().map(Gf).collect());
                k.fraction(num, den).ok()
            })
    }

    proptest! {
        #[test]
        fn frobenius_additive_and_root_round_trip(a in 0u32..27, b in 0u32..27) {
            let f = GfField::new(27).unwrap();
            let (a, b) = (Gf(a), Gf(b));
            prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
            prop_assert_eq!(f.pth_root(f.frobenius(a)), a);
        }

        #[test]
        fn ratfunc_frobenius_round_trip(x in ratfunc_elt(ResidueField::ratfunc(4).unwrap())) {
            let k = ResidueField::ratfunc(4).unwrap();
            prop_assert_eq!(k.pth_root(&k.frobenius(&x)), Some(x.clone()));
            let c = k.sub(&k.frobenius(&x), &x);
            let sol = k.artin_schreier_preimage(&c).expect("image of x");
            prop_assert_eq!(k.sub(&k.frobenius(&sol), &sol), c);
        }
    }
}
