//! Seeded random polynomials, forms and multivector fields.

use crate::forms::{Graded, Kind, Patch};
use crate::perm::subsets;
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bound on numerators and denominators of sampled coefficients.
pub const COEFF_BOUND: i64 = 7;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `p/q` with `|p| ≤ 7`, `1 ≤ q ≤ 7`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-COEFF_BOUND..=COEFF_BOUND), rng.gen_range(1..=COEFF_BOUND))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let c = rational(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// All exponent vectors in `nvars` variables of total degree at most `max_deg`,
/// ordered by degree and then lexicographically.
pub fn monomials(nvars: usize, max_deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        let mut cur = vec![0u32; nvars];
        fill(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill(out: &mut Vec<Monomial>, cur: &mut Vec<u32>, i: usize, left: u32) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == cur.len() - 1 {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

/// Sparse polynomial with up to `max_terms` terms of degree at most `max_deg`.
pub fn poly<R: Rng>(rng: &mut R, patch: &Patch, max_deg: u32, max_terms: usize) -> Poly {
    let monos = monomials(patch.dim(), max_deg);
    let n = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<(Monomial, Rational)> = (0..n).map(|_| (monos.choose(rng).expect("nonempty").clone(), nonzero_rational(rng))).collect();
    Poly::from_terms(patch.vars(), terms)
}

/// Sparse element of `Graded<K>` of the given degree (zero when the degree exceeds the dimension).
pub fn graded<K: Kind, R: Rng>(rng: &mut R, patch: &Patch, degree: usize, max_deg: u32, max_terms: usize) -> Graded<K> {
    let masks = subsets(&(0..patch.dim()).collect::<Vec<_>>(), degree);
    let mut out = Graded::zero(patch, degree);
    if masks.is_empty() {
        return out;
    }
    let n = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..n {
        let idx = masks.choose(rng).expect("nonempty");
        let f = poly(rng, patch, max_deg, 2);
        out = out.add(&Graded::basis(patch, idx, f));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::PolyForm;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(2, 2).len(), 6);
        assert_eq!(monomials(3, 3).len(), 20);
        assert_eq!(monomials(0, 3).len(), 1);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = Patch::standard(3);
        let a: PolyForm = graded(&mut seeded(5), &p, 2, 3, 3);
        let b: PolyForm = graded(&mut seeded(5), &p, 2, 3, 3);
        assert_eq!(a, b);
    }
}
