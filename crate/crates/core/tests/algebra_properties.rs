use num_integer::Integer;
use num_traits::{One, Signed};
use prequant::perm::{binomial, block_unshuffles, chi, koszul_of, sign_of, unshuffles};
use prequant::poly::make_vars;
use prequant::sample::monomials;
use prequant::{Poly, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=15).prop_map(|(n, d)| Rational::new(n, d))
}

fn poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    let vars = make_vars(&["x", "y", "z"][..nvars]);
    let monos = monomials(nvars, max_deg);
    prop::collection::vec((prop::sample::select(monos), rational()), 0..6).prop_map(move |terms| Poly::from_terms(&vars, terms))
}

fn permutation(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max_len).prop_flat_map(|m| Just((0..m).collect::<Vec<_>>()).prop_shuffle())
}

fn permutation_pair(max_len: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (1..=max_len).prop_flat_map(|m| {
        let id: Vec<usize> = (0..m).collect();
        (Just(id.clone()).prop_shuffle(), Just(id).prop_shuffle())
    })
}

fn reduced(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

/// Sign of moving `images` into place through an explicit word of adjacent transpositions.
/// `noise` swaps are applied first and then undone by a bubble sort steered by `choices`.
fn word_signs(images: &[usize], degrees: &[i32], noise: &[usize], choices: &[usize]) -> (i32, i32) {
    let m = images.len();
    let mut pos = vec![0; m];
    for (slot, &input) in images.iter().enumerate() {
        pos[input] = slot;
    }
    let mut cur: Vec<usize> = (0..m).collect();
    let (mut sign, mut koszul) = (1, 1);
    let mut swap = |cur: &mut Vec<usize>, i: usize| {
        sign = -sign;
        if degrees[cur[i]] * degrees[cur[i + 1]] % 2 != 0 {
            koszul = -koszul;
        }
        cur.swap(i, i + 1);
    };
    if m >= 2 {
        for &n in noise {
            swap(&mut cur, n % (m - 1));
        }
    }
    let mut step = 0;
    loop {
        let inverted: Vec<usize> = (0..m.saturating_sub(1)).filter(|&i| pos[cur[i]] > pos[cur[i + 1]]).collect();
        if inverted.is_empty() {
            break;
        }
        let c = choices.get(step % choices.len().max(1)).copied().unwrap_or(0);
        swap(&mut cur, inverted[c % inverted.len()]);
        step += 1;
    }
    assert_eq!(cur, images);
    (sign, koszul)
}

proptest! {
    #[test]
    fn rational_field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        for r in [&a + &b, &a - &b, &a * &b, &a * &c - &b] {
            prop_assert!(reduced(&r));
        }
        if !b.is_zero() {
            let q = &a / &b;
            prop_assert!(reduced(&q));
            prop_assert_eq!(&q * &b, a.clone());
        }
    }

    #[test]
    fn rational_text_round_trip(a in rational()) {
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn poly_ring_axioms(f in poly(3, 3), g in poly(3, 3), h in poly(3, 2)) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert!((&f - &f).is_zero());
    }

    #[test]
    fn poly_leibniz_and_evaluation(f in poly(3, 3), g in poly(3, 3), pt in prop::collection::vec(rational(), 3)) {
        for i in 0..3 {
            let lhs = (&f * &g).partial(i);
            let rhs = &(&f.partial(i) * &g) + &(&f * &g.partial(i));
            prop_assert_eq!(lhs, rhs);
        }
        let fg = (&f * &g).eval(&pt).unwrap();
        prop_assert_eq!(fg, f.eval(&pt).unwrap() * g.eval(&pt).unwrap());
    }

    #[test]
    fn poly_text_round_trip(f in poly(3, 4)) {
        let back = Poly::parse(&f.to_string(), f.vars()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn koszul_sign_is_independent_of_the_decomposition(
        images in permutation(5),
        degrees in prop::collection::vec(-3i32..=3, 5),
        noise in prop::collection::vec(0usize..8, 0..6),
        choices in prop::collection::vec(0usize..8, 1..10),
        other in prop::collection::vec(0usize..8, 1..10),
    ) {
        let degrees = &degrees[..images.len()];
        let (s1, k1) = word_signs(&images, degrees, &noise, &choices);
        let (s2, k2) = word_signs(&images, degrees, &[], &other);
        prop_assert_eq!((s1, k1), (s2, k2));
        prop_assert_eq!(s1, sign_of(&images));
        prop_assert_eq!(k1, koszul_of(&images, degrees));
    }

    #[test]
    fn koszul_and_chi_compose_multiplicatively(
        (sigma, tau) in permutation_pair(6),
        degrees in prop::collection::vec(-3i32..=3, 6),
    ) {
        let degrees = &degrees[..sigma.len()];
        let moved: Vec<i32> = sigma.iter().map(|&j| degrees[j]).collect();
        let composite: Vec<usize> = tau.iter().map(|&i| sigma[i]).collect();
        prop_assert_eq!(koszul_of(&composite, degrees), koszul_of(&sigma, degrees) * koszul_of(&tau, &moved));
        prop_assert_eq!(chi(&composite, degrees), chi(&sigma, degrees) * chi(&tau, &moved));
    }

    #[test]
    fn chi_is_multiplicative_on_unshuffles(
        k in 1usize..=3, l in 1usize..=3, pick in 0usize..64, pick2 in 0usize..64,
        degrees in prop::collection::vec(-2i32..=2, 6),
    ) {
        let m = k + l;
        let degrees = &degrees[..m];
        let us = unshuffles(k, l);
        let sigma = &us[pick % us.len()];
        let inner = block_unshuffles(&[1, m - 1]);
        let tau = &inner[pick2 % inner.len()];
        let moved: Vec<i32> = sigma.iter().map(|&j| degrees[j]).collect();
        let composite: Vec<usize> = tau.iter().map(|&i| sigma[i]).collect();
        prop_assert_eq!(chi(&composite, degrees), chi(sigma, degrees) * chi(tau, &moved));
    }
}

#[test]
fn unshuffle_counts_are_binomial() {
    for k in 0..=8 {
        for l in 0..=8 - k {
            let us = unshuffles(k, l);
            assert_eq!(us.len() as u64, binomial((k + l) as u64, k as u64), "k={k} l={l}");
            for u in &us {
                assert!(u[..k].windows(2).all(|w| w[0] < w[1]) && u[k..].windows(2).all(|w| w[0] < w[1]));
                let mut sorted = u.clone();
                sorted.sort();
                assert_eq!(sorted, (0..k + l).collect::<Vec<_>>());
            }
        }
    }
}
