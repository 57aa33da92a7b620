use prequant::calculus::{exterior_d, interior, lie_derivative, poincare_homotopy, schouten, sum_same, vector_bracket};
use prequant::forms::{FormKind, Graded, Kind, VectorKind};
use prequant::perm::subsets;
use prequant::poly::make_vars;
use prequant::sample::monomials;
use prequant::{Patch, Poly, PolyForm, PolyMultivector, Rational};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=4, any::<bool>()).prop_map(|(n, d, neg)| Rational::new(if neg { -n } else { n }, d))
}

fn poly(dim: usize, max_deg: u32) -> impl Strategy<Value = Poly> {
    let vars = make_vars(&NAMES[..dim]);
    let monos = monomials(dim, max_deg);
    prop::collection::vec((prop::sample::select(monos), nonzero_rational()), 1..4).prop_map(move |terms| Poly::from_terms(&vars, terms))
}

fn graded<K: Kind>(dim: usize, degree: usize, max_deg: u32) -> impl Strategy<Value = Graded<K>> {
    let patch = Patch::standard(dim);
    let masks = subsets(&(0..dim).collect::<Vec<_>>(), degree);
    let n = masks.len();
    prop::collection::vec((0..n.max(1), poly(dim, max_deg)), 1..4).prop_map(move |terms| {
        let mut out = Graded::<K>::zero(&patch, degree);
        if n > 0 {
            for (i, f) in terms {
                out = out.add(&Graded::basis(&patch, &masks[i], f));
            }
        }
        out
    })
}

fn form(dim: usize, degree: usize, max_deg: u32) -> impl Strategy<Value = PolyForm> {
    graded::<FormKind>(dim, degree, max_deg)
}

fn multivector(dim: usize, degree: usize, max_deg: u32) -> impl Strategy<Value = PolyMultivector> {
    graded::<VectorKind>(dim, degree, max_deg)
}

/// Patch dimension 3 or 4 with a form of any degree on it.
fn any_form(max_deg: u32) -> impl Strategy<Value = PolyForm> {
    (3usize..=4).prop_flat_map(move |dim| (0..=dim).prop_flat_map(move |k| form(dim, k, max_deg)))
}

fn field(dim: usize, max_deg: u32) -> impl Strategy<Value = PolyMultivector> {
    multivector(dim, 1, max_deg)
}

/// Form of the given degree on ℝ^dim plus vector fields on the same patch.
fn form_and_fields(n_fields: usize, max_deg: u32) -> impl Strategy<Value = (PolyForm, Vec<PolyMultivector>)> {
    (3usize..=4)
        .prop_flat_map(move |dim| (0..=dim).prop_flat_map(move |k| (form(dim, k, max_deg), prop::collection::vec(field(dim, max_deg), n_fields))))
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `ι_{vk} … ι_{v1} β`, the decomposable contraction read right to left.
fn iterated(vs: &[&PolyMultivector], beta: &PolyForm) -> PolyForm {
    vs.iter().fold(beta.clone(), |acc, v| interior(v, &acc))
}

fn wedge_all(patch: &Patch, vs: &[&PolyMultivector]) -> PolyMultivector {
    vs.iter().fold(PolyMultivector::constant(patch, Rational::one()), |acc, v| acc.wedge(v))
}

fn field_oracle_bracket(u: &PolyMultivector, v: &PolyMultivector) -> PolyMultivector {
    let patch = u.patch().clone();
    let n = patch.dim();
    let coeff = |w: &PolyMultivector, i: usize| w.coeff(1 << i);
    let apply = |w: &PolyMultivector, f: &Poly| (0..n).fold(patch.zero_poly(), |acc, j| &acc + &(&coeff(w, j) * &f.partial(j)));
    (0..n).fold(PolyMultivector::zero(&patch, 1), |acc, i| {
        let c = &apply(u, &coeff(v, i)) - &apply(v, &coeff(u, i));
        acc.add(&PolyMultivector::basis(&patch, &[i], c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_squared_vanishes(a in any_form(4)) {
        prop_assert!(exterior_d(&exterior_d(&a)).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_graded_commutative_and_associative(
        (a, b, c) in (3usize..=4).prop_flat_map(|dim| (0..=2usize, 0..=2usize, 0..=1usize)
            .prop_flat_map(move |(p, q, r)| (form(dim, p, 2), form(dim, q, 2), form(dim, r, 2))))
    ) {
        let (p, q) = (a.degree(), b.degree());
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale_int(sign(p * q)));
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
    }

    #[test]
    fn contraction_by_a_wedge_is_iterated_contraction((a, vs) in form_and_fields(2, 2)) {
        let u = vs[0].wedge(&vs[1]);
        prop_assert_eq!(interior(&u, &a), interior(&vs[1], &interior(&vs[0], &a)));
    }

    #[test]
    fn lie_derivative_is_the_graded_commutator_with_d(
        (a, u) in (3usize..=4).prop_flat_map(|dim| (0..=dim, 1..=2usize)
            .prop_flat_map(move |(k, q)| (form(dim, k, 2), multivector(dim, q, 2))))
    ) {
        let q = u.degree();
        let oracle = sum_same(&exterior_d(&interior(&u, &a)), &interior(&u, &exterior_d(&a)).scale_int(-sign(q)));
        prop_assert_eq!(lie_derivative(&u, &a), oracle);
    }

    #[test]
    fn lie_derivative_commutes_with_d((a, vs) in form_and_fields(1, 3)) {
        let v = &vs[0];
        prop_assert_eq!(lie_derivative(v, &exterior_d(&a)), exterior_d(&lie_derivative(v, &a)));
    }

    #[test]
    fn schouten_restricts_to_the_field_bracket((_, vs) in form_and_fields(2, 2)) {
        let oracle = field_oracle_bracket(&vs[0], &vs[1]);
        prop_assert_eq!(vector_bracket(&vs[0], &vs[1]), oracle.clone());
        prop_assert_eq!(schouten(&vs[0], &vs[1]), oracle);
    }

    #[test]
    fn schouten_is_graded_antisymmetric(
        (u, v) in (3usize..=4).prop_flat_map(|dim| (1..=3usize, 1..=2usize)
            .prop_flat_map(move |(p, q)| (multivector(dim, p, 2), multivector(dim, q, 2))))
    ) {
        let s = sign((u.degree() - 1) * (v.degree() - 1));
        prop_assert_eq!(schouten(&u, &v), schouten(&v, &u).scale_int(-s));
    }

    #[test]
    fn cartan_commutator_identity(
        (u, v, a) in (3usize..=4).prop_flat_map(|dim| (1..=2usize, 1..=2usize, 0..=dim)
            .prop_flat_map(move |(p, q, k)| (
                multivector(dim, p, 2),
                multivector(dim, q, 2),
                form(dim, k, 2),
            )))
    ) {
        let lhs = interior(&schouten(&u, &v), &a);
        let t1 = lie_derivative(&u, &interior(&v, &a)).scale_int(sign((u.degree() - 1) * v.degree()));
        let t2 = interior(&v, &lie_derivative(&u, &a));
        prop_assert!(sum_same(&lhs, &sum_same(&t1, &t2.neg()).neg()).is_zero());
    }

    #[test]
    fn extended_cartan_identity(k in 1usize..=4, (beta, vs) in form_and_fields(4, 2)) {
        let vs = &vs[..k];
        let patch = beta.patch().clone();
        let refs: Vec<&PolyMultivector> = vs.iter().collect();
        let lhs = exterior_d(&iterated(&refs, &beta)).scale_int(sign(k));
        let mut rhs = iterated(&refs, &exterior_d(&beta));
        for i in 0..k {
            for j in i + 1..k {
                let br = vector_bracket(&vs[i], &vs[j]);
                let mut parts = vec![&br];
                parts.extend((0..k).filter(|&l| l != i && l != j).map(|l| &vs[l]));
                rhs = sum_same(&rhs, &interior(&wedge_all(&patch, &parts), &beta).scale_int(sign(i + j + 2)));
            }
            let rest: Vec<&PolyMultivector> = (0..k).filter(|&l| l != i).map(|l| &vs[l]).collect();
            rhs = sum_same(&rhs, &iterated(&rest, &lie_derivative(&vs[i], &beta)).scale_int(sign(i + 1)));
        }
        prop_assert!(sum_same(&lhs, &rhs.neg()).is_zero());
    }

    #[test]
    fn poincare_homotopy_contracts(a in any_form(3)) {
        let da = exterior_d(&a);
        if a.degree() == 0 {
            let f = a.as_function();
            let origin = vec![Rational::zero(); a.patch().dim()];
            let expected = &f - &Poly::constant(f.vars(), f.eval(&origin).unwrap());
            prop_assert_eq!(poincare_homotopy(&da).unwrap().as_function(), expected);
        } else {
            let dh = exterior_d(&poincare_homotopy(&a).unwrap());
            let hd = if da.is_zero() { PolyForm::zero(a.patch(), a.degree()) } else { poincare_homotopy(&da).unwrap() };
            prop_assert_eq!(sum_same(&dh, &hd), a);
        }
    }

    #[test]
    fn form_text_round_trip(a in any_form(3)) {
        let back = PolyForm::parse_with_degree(a.patch(), &a.to_string(), a.degree()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn multivector_text_round_trip(
        u in (3usize..=4).prop_flat_map(|dim| (0..=dim).prop_flat_map(move |q| multivector(dim, q, 3)))
    ) {
        let back = PolyMultivector::parse_with_degree(u.patch(), &u.to_string(), u.degree()).unwrap();
        prop_assert_eq!(back, u);
    }
}
