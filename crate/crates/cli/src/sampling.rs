//! Seeded random elements for property runs and best-ness probes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use valuata::{
    ASExtension, CycloElt, CycloField, ExtElt, Gf, GroupElt, GroupKind, ResidueElt, SeriesElt,
    SeriesField, ValueGroup,
};

/// Exponent roughly in `[lo, hi]`, with denominators allowed by the group.
/// Lex2 exponents have an IntInvP first component and an integer second one.
pub fn exponent(group: &ValueGroup, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> GroupElt {
    let p = group.p() as i64;
    let frac =
        |rng: &mut ChaCha8Rng, den: i64| GroupElt::frac(rng.gen_range(lo * den..=hi * den), den);
    match group.kind() {
        GroupKind::Int => GroupElt::int(rng.gen_range(lo..=hi)),
        GroupKind::IntInvP => {
            let den = p.pow(rng.gen_range(0..=2));
            frac(rng, den)
        }
        GroupKind::Rat => {
            let den = rng.gen_range(1..=3);
            frac(rng, den)
        }
        GroupKind::Lex2 => {
            let den = p.pow(rng.gen_range(0..=2));
            let a = rng.gen_range(lo * den..=hi * den);
            GroupElt::pair_frac((a, den), (rng.gen_range(-2..=2), 1))
        }
    }
}

/// Nonzero residue; over `F_q(y)` sometimes a multiple of `y`.
pub fn residue(k: &SeriesField, rng: &mut ChaCha8Rng) -> ResidueElt {
    let res = k.residue();
    let q = res.base().order();
    let c = res.from_gf(Gf(rng.gen_range(1..q)));
    match res.indeterminate() {
        Some(y) if rng.gen_bool(0.3) => res.mul(&c, &y),
        _ => c,
    }
}

/// Exact sum of up to `max_terms` random monomials.
pub fn series(
    k: &SeriesField,
    rng: &mut ChaCha8Rng,
    max_terms: usize,
    lo: i64,
    hi: i64,
) -> SeriesElt {
    let n = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..n)
        .map(|_| (exponent(k.group(), rng, lo, hi), residue(k, rng)))
        .collect();
    k.from_terms(terms, None)
        .expect("sampled exponents lie in the group")
}

fn monomial(k: &SeriesField, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> SeriesElt {
    k.monomial(exponent(k.group(), rng, lo, hi), residue(k, rng))
        .expect("sampled exponents lie in the group")
}

/// A random element of `L` outside `K`: half the time a unit `1 + t a^i`
/// with `t` a monomial, otherwise a small-support element. Over Lex2 the
/// `a^i` coefficients are kept monomial.
pub fn generator(ext: &ASExtension, rng: &mut ChaCha8Rng) -> ExtElt {
    let k = ext.base();
    let p = ext.p();
    let rank2 = k.group().rank() == 2;
    loop {
        let mut coeffs = vec![k.zero(); p];
        if rng.gen_bool(0.5) {
            coeffs[0] = k.one();
            coeffs[rng.gen_range(1..p)] = monomial(k, rng, 0, 3);
        } else {
            coeffs[0] = series(k, rng, 2, -2, 3);
            for c in coeffs.iter_mut().skip(1) {
                *c = if rank2 {
                    if rng.gen_bool(0.6) {
                        monomial(k, rng, -1, 3)
                    } else {
                        k.zero()
                    }
                } else {
                    series(k, rng, 2, -2, 3)
                };
            }
        }
        let b = ext.from_coeffs(coeffs).expect("p coefficients");
        if !ext.is_in_base(&b) {
            return b;
        }
    }
}

pub fn generators(ext: &ASExtension, rng: &mut ChaCha8Rng, n: usize) -> Vec<ExtElt> {
    (0..n).map(|_| generator(ext, rng)).collect()
}

/// Probe `h` for a best `f*`: up to three terms with valuations between
/// `v(f*)` and `0`.
pub fn as_probe(k: &SeriesField, rng: &mut ChaCha8Rng, v_star: &GroupElt) -> SeriesElt {
    let at = |n: i64| match v_star.rank() {
        2 => GroupElt::pair_frac((n, 1), (0, 1)),
        _ => GroupElt::int(n),
    };
    let mut lo = 0;
    while at(lo) > *v_star {
        lo -= 1;
    }
    loop {
        let h = series(k, rng, 3, lo, 0);
        if !h.has_no_terms() {
            return h;
        }
    }
}

/// Random unit of the cyclotomic ring: small balanced digits on every
/// `pi`-power, constant digit prime to `p`.
pub fn cyclo_unit(k: &CycloField, rng: &mut ChaCha8Rng) -> CycloElt {
    let p = k.p() as i64;
    let width = k.e() as usize;
    let rows = if k.with_y() { rng.gen_range(1..=2) } else { 1 };
    let coeffs: Vec<Vec<i64>> = (0..rows)
        .map(|row| {
            (0..width)
                .map(|j| {
                    if row == 0 && j == 0 {
                        rng.gen_range(1..p) + p * rng.gen_range(-2..=2)
                    } else {
                        rng.gen_range(-3..=3)
                    }
                })
                .collect()
        })
        .collect();
    k.from_coeffs(&coeffs).expect("rows fit the field")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FieldSpec;
    use rand::SeedableRng;

    #[test]
    fn generators_leave_the_base_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in [FieldSpec::laurent("gf:2"), FieldSpec::laurent("gf:3")] {
            let k = spec.build_series().unwrap();
            let f = k.x_pow(GroupElt::int(-1)).unwrap();
            let ext = ASExtension::new(k, f).unwrap();
            for b in generators(&ext, &mut rng, 30) {
                assert!(!ext.is_in_base(&b));
            }
        }
    }

    #[test]
    fn sampled_exponents_belong_to_their_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for kind in [
            GroupKind::Int,
            GroupKind::IntInvP,
            GroupKind::Rat,
            GroupKind::Lex2,
        ] {
            let g = ValueGroup::new(kind, 3);
            for _ in 0..50 {
                assert!(g.contains(&exponent(&g, &mut rng, -2, 2)));
            }
        }
    }

    #[test]
    fn cyclo_units_have_valuation_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = FieldSpec::cyclo(3, 2, true).build_cyclo().unwrap();
        for _ in 0..50 {
            assert_eq!(k.valuation(&cyclo_unit(&k, &mut rng)), Ok(0));
        }
    }
}
