use prequant::calculus::{lie_derivative, vector_bracket};
use prequant::cech::CechSampler;
use prequant::complex::{fiber_product, ChainComplexFD, ChainMap};
use prequant::config::Zoo;
use prequant::courant::CourantDiagram;
use prequant::linalg::Matrix;
use prequant::linfty::{bracket_or_zero, check_equal_morphisms, compose_low, LInfty, Linear, Sampler};
use prequant::observables::{is_hamiltonian, ObservableSampler, Observables};
use prequant::{PolyMultivector, Rational};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |xs| {
        let rows: Vec<Vec<Rational>> = xs.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|&x| Rational::from_int(x)).collect()).collect();
        if cols == 0 {
            Matrix::zeros(rows.len(), 0)
        } else {
            Matrix::from_rows(rows)
        }
    })
}

/// Complex in degrees 0..=3: each differential is a random combination of rows killing the image of the next.
fn chain_complex() -> impl Strategy<Value = ChainComplexFD> {
    prop::collection::vec(1usize..=3, 4).prop_flat_map(|dims| {
        let (d0, d1, d2, d3) = (dims[0], dims[1], dims[2], dims[3]);
        (matrix(d2, d3), matrix(d1, d2), matrix(d0, d1)).prop_map(move |(d3m, r2, r1)| {
            let d2m = killing(&r2, &d3m);
            let d1m = killing(&r1, &d2m);
            let dims: BTreeMap<i32, usize> = [(0, d0), (1, d1), (2, d2), (3, d3)].into();
            ChainComplexFD::new(dims, [(1, d1m), (2, d2m), (3, d3m)].into()).unwrap()
        })
    })
}

/// `R K^T` with `K` a basis of the left kernel of `next`, using the leading columns of `r`.
fn killing(r: &Matrix, next: &Matrix) -> Matrix {
    let k = next.transpose().kernel();
    let cols: Vec<Vec<Rational>> = (0..k.cols()).map(|j| r.col(j)).collect();
    if cols.is_empty() {
        return Matrix::zeros(r.rows(), next.rows());
    }
    Matrix::from_cols(r.rows(), cols).mul(&k.transpose())
}

fn same_map(a: &Matrix, b: &Matrix) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && a.sub(b).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_of_the_identity_is_acyclic(c in chain_complex()) {
        prop_assert!(c.is_complex().is_ok());
        let k = c.cone_identity();
        prop_assert!(k.is_complex().is_ok());
        prop_assert!(k.is_acyclic());
        prop_assert!(c.cone_projection().is_chain_map());
    }

    #[test]
    fn fiber_product_projections_commute(c in chain_complex(), zero_leg in any::<bool>()) {
        let target = c.shift_up();
        let f = c.cone_projection();
        let g = if zero_leg { ChainMap::zero(&c, &target) } else { ChainMap::identity(&target) };
        let fp = fiber_product(&f, &g).unwrap();
        prop_assert!(fp.complex.is_complex().is_ok());
        prop_assert!(fp.to_a.is_chain_map() && fp.to_b.is_chain_map());
        for k in fp.complex.degrees() {
            prop_assert!(same_map(&f.map(k).mul(&fp.to_a.map(k)), &g.map(k).mul(&fp.to_b.map(k))), "degree {}", k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn higher_observable_brackets_vanish_on_positive_degrees(seed in any::<u64>(), slot in 0usize..3, name in prop::sample::select(vec!["r3-volume", "r4-2plectic"])) {
        let zoo = Zoo::builtin();
        let p = &zoo.plectic(name).unwrap().plectic;
        let obs = Observables::new(p);
        let mut os = ObservableSampler::new(p, 2, seed);
        let mut xs: Vec<_> = (0..3).map(|_| os.sample(0)).collect();
        xs[slot] = os.sample(1);
        let refs: Vec<_> = xs.iter().collect();
        prop_assert!(obs.bracket(&refs).is_zero());
    }

    #[test]
    fn hamiltonian_fields_close_under_the_bracket(seed in any::<u64>(), name in prop::sample::select(vec!["r2-area", "r3-volume", "r4-2plectic"])) {
        let zoo = Zoo::builtin();
        let p = &zoo.plectic(name).unwrap().plectic;
        let mut os = ObservableSampler::new(p, 2, seed);
        let (a, b) = (os.pair(), os.pair());
        let v = vector_bracket(&a.v, &b.v);
        let h = p.contract(&[&a.v, &b.v]);
        prop_assert!(is_hamiltonian(p, &v, &h).unwrap());
        prop_assert!(lie_derivative(&a.v, p.omega()).is_zero());
    }

    #[test]
    fn cech_differentials_square_to_zero(seed in any::<u64>(), degree in 0usize..=4) {
        let zoo = Zoo::builtin();
        for named in &zoo.covers {
            let cover = &named.cover;
            let mut s = CechSampler::new(cover, 2, seed);
            let t = s.tot(degree);
            prop_assert!(cover.delta(&cover.delta(&t)).is_zero(), "delta^2 on {}", named.name);
            prop_assert!(cover.d_tot(&cover.d_tot(&t)).is_zero(), "d_tot^2 on {}", named.name);
            let v: PolyMultivector = prequant::sample::graded(s.rng(), cover.patch(), 1, 2, 2);
            if degree >= 1 {
                let lhs = cover.delta(&t.interior(&v));
                let rhs = cover.delta(&t).interior(&v);
                prop_assert!(lhs.sub(&rhs).is_zero(), "delta and contraction on {}", named.name);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn low_composition_is_associative(seed in any::<u64>()) {
        let zoo = Zoo::builtin();
        let c = zoo.cocycle("n2-two-box").unwrap();
        let d = CourantDiagram::new(&c.plectic.plectic, &c.cocycle).unwrap();
        let mut os = ObservableSampler::new(&c.plectic.plectic, 2, seed);
        let left_inner = compose_low(&d.psi, &d.phi).unwrap();
        let left = compose_low(&d.fa, &left_inner).unwrap();
        let right_inner = compose_low(&d.fa, &d.psi).unwrap();
        let right = compose_low(&right_inner, &d.phi).unwrap();
        prop_assert!(check_equal_morphisms(&left, &right, 3, &mut os, 4).is_ok());
    }
}

#[test]
fn bracket_or_zero_respects_arity_bound() {
    let zoo = Zoo::builtin();
    let p = &zoo.plectic("r2-area").unwrap().plectic;
    let obs = Observables::new(p);
    let mut os = ObservableSampler::new(p, 2, 3);
    let xs: Vec<_> = (0..3).map(|_| os.sample(0)).collect();
    let refs: Vec<_> = xs.iter().collect();
    assert!(bracket_or_zero(&obs, &refs).is_zero());
}
