//! The KKS homotopy fiber: the cone `K` of the identity of `Ω^0 → … → Ω^{n−1}`, the
//! projection `πR: K → BH`, and the lift `f: L∞(X, ω) → K`.
//!
//! `K_k = C_k ⊕ C_{k−1}` with `C_k = Ω^{n−1−k}` and `d(a, b) = (da + b, −db)`.
//! `πR(a) = da` on `K_0` and `πR(a, b) = (−1)^{k−1} b` on `K_k`, `k ≥ 1`.

use crate::calculus::exterior_d;
use crate::complex::{ChainComplexFD, ChainMap};
use crate::element::Elt;
use crate::fd::{FieldSpace, FormSpace};
use crate::fiber::FiberSquareFD;
use crate::forms::PolyForm;
use crate::linalg::Matrix;
use crate::linfty::{zeta, LInfty, LInftyMorphism};
use crate::observables::{BhComplex, HamFields, Kks, ObsElem, Observables, PrePlecticPatch};
use crate::perm::neg_one_pow;
use crate::rational::Rational;
use std::collections::BTreeMap;

pub type ConeElem = Elt<(PolyForm, PolyForm)>;

/// The abelian L∞-algebra `K`.
#[derive(Debug, Clone)]
pub struct ConeK {
    pub p: PrePlecticPatch,
}

impl ConeK {
    fn c_degree(&self, k: i32) -> usize {
        (self.p.n() as i32 - 1 - k).clamp(0, self.p.n() as i32) as usize
    }

    pub fn element(&self, k: i32, a: PolyForm, b: PolyForm) -> ConeElem {
        Elt::pure(self.p.patch(), k, (a, b))
    }
}

impl LInfty for ConeK {
    type Elem = ConeElem;

    fn degree(&self, x: &ConeElem) -> i32 {
        x.degree
    }

    fn zero(&self, k: i32) -> ConeElem {
        let patch = self.p.patch();
        self.element(k, PolyForm::zero(patch, self.c_degree(k)), PolyForm::zero(patch, self.c_degree(k - 1)))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, self.p.n() as i32)
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn bracket(&self, xs: &[&ConeElem]) -> ConeElem {
        let x = xs[0];
        let k = x.degree;
        if k == 0 {
            return self.zero(-1);
        }
        let (a, b) = &x.p;
        let first = exterior_d(a).add(b);
        let second = if k >= 2 { exterior_d(b).neg() } else { PolyForm::zero(self.p.patch(), 0) };
        self.element(k - 1, first, second)
    }
}

/// `πR: K → BH`.
#[derive(Debug, Clone)]
pub struct PiR {
    pub source: ConeK,
    pub target: BhComplex,
}

impl LInftyMorphism for PiR {
    type Source = ConeK;
    type Target = BhComplex;

    fn source(&self) -> &ConeK {
        &self.source
    }

    fn target(&self) -> &BhComplex {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&ConeElem]) -> Elt<PolyForm> {
        let x = xs[0];
        let patch = self.source.p.patch();
        if x.degree == 0 {
            return Elt::pure(patch, 0, exterior_d(&x.p.0));
        }
        Elt::pure(patch, x.degree, x.p.1.scale_int(neg_one_pow(x.degree as i64 - 1) as i64))
    }
}

/// `πL: L∞(X, ω) → 𝔛_Ham`, forgetting everything but the vector field.
#[derive(Debug, Clone)]
pub struct PiL {
    pub source: Observables,
    pub target: HamFields,
}

impl LInftyMorphism for PiL {
    type Source = Observables;
    type Target = HamFields;

    fn source(&self) -> &Observables {
        &self.source
    }

    fn target(&self) -> &HamFields {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&ObsElem]) -> Elt<()> {
        crate::observables::project_field(xs[0])
    }
}

/// The lift `f: L∞(X, ω) → K`: `f_1(v + η) = (η, 0)` and
/// `f_k(x_1, …, x_k) = (0, twist · ζ(k) ι_{v1∧…∧vk} ω)` for `k ≥ 2`.
#[derive(Debug, Clone)]
pub struct FiberLift {
    pub source: Observables,
    pub target: ConeK,
    /// `1` for the genuine lift; other values corrupt the higher components.
    pub twist: Rational,
}

impl LInftyMorphism for FiberLift {
    type Source = Observables;
    type Target = ConeK;

    fn source(&self) -> &Observables {
        &self.source
    }

    fn target(&self) -> &ConeK {
        &self.target
    }

    fn max_arity(&self) -> usize {
        self.source.p.n() + 1
    }

    fn component(&self, xs: &[&ObsElem]) -> ConeElem {
        let k = xs.len();
        let patch = self.source.p.patch();
        if k == 1 {
            let x = xs[0];
            return self.target.element(x.degree, x.p.clone(), PolyForm::zero(patch, 0));
        }
        let out = xs.iter().map(|x| x.degree).sum::<i32>() + k as i32 - 1;
        if xs.iter().any(|x| x.degree != 0) {
            return self.target.zero(out);
        }
        let vs: Vec<_> = xs.iter().map(|x| &x.v).collect();
        let c = self.source.p.contract(&vs).scale_int(zeta(k) as i64).scale(&self.twist);
        self.target.element(out, PolyForm::zero(patch, 0), c)
    }
}

/// All objects of the KKS fiber square.
pub struct KksFiberData {
    pub observables: Observables,
    pub cone: ConeK,
    pub pi_r: PiR,
    pub pi_l: PiL,
    pub lift: FiberLift,
    pub kks: Kks,
}

pub fn kks_fiber_data(p: &PrePlecticPatch) -> KksFiberData {
    let observables = Observables::new(p);
    let cone = ConeK { p: p.clone() };
    let kks = Kks::new(p);
    KksFiberData {
        pi_r: PiR { source: cone.clone(), target: kks.target.clone() },
        pi_l: PiL { source: observables.clone(), target: kks.source.clone() },
        lift: FiberLift { source: observables.clone(), target: cone.clone(), twist: Rational::one() },
        observables,
        cone,
        kks,
    }
}

/// Column basis of the image of `m` (its pivot columns).
fn image_basis(m: &Matrix) -> Matrix {
    let (_, pivots) = m.rref();
    let cols = pivots.iter().map(|&j| m.col(j)).collect();
    Matrix::from_cols(m.rows(), cols)
}

/// Coordinates of the columns of `m` in the column basis `basis`.
fn coords_in(basis: &Matrix, m: &Matrix) -> Matrix {
    let cols = (0..m.cols()).map(|j| basis.solve(&m.col(j)).expect("column lies in the span")).collect();
    Matrix::from_cols(basis.cols(), cols)
}

/// Weight-`≤ W` truncation of the chain-level square `K → BH ← 𝔛_Ham`.
///
/// Vector fields have coefficient degree at most `W + 1 − weight(ω)`, so that `ι_v ω`
/// stays in the slice. `expected` holds the dimensions of the truncated observables
/// complex: the Hamiltonian pairs in degree 0 (a kernel computed directly from
/// `ι_v ω + dH = 0`) and `Ω^{n−1−k}` in degree `k`.
pub fn kks_fiber_truncation(p: &PrePlecticPatch, max_weight: u32) -> FiberSquareFD {
    let n = p.n() as i32;
    let patch = p.patch();
    let c_space = |k: i32| FormSpace::by_weight(patch, (n - 1 - k) as usize, max_weight);
    let mut c_labels = BTreeMap::new();
    let mut c_d = BTreeMap::new();
    for k in 0..n {
        c_labels.insert(k, (0..c_space(k).dim()).map(|i| format!("c{k}.{i}")).collect());
        if k >= 1 {
            c_d.insert(k, c_space(k).matrix_to(&c_space(k - 1), exterior_d));
        }
    }
    let c = ChainComplexFD::with_labels(c_labels, c_d).expect("truncated de Rham complex");
    let k_cplx = c.cone_identity();

    let top = FormSpace::by_weight(patch, n as usize, max_weight);
    let d_top = c_space(0).matrix_to(&top, exterior_d);
    let exact = image_basis(&d_top);
    let pi0 = coords_in(&exact, &d_top);

    let mut bh_labels: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    bh_labels.insert(0, (0..exact.cols()).map(|i| format!("e{i}")).collect());
    let mut bh_d = BTreeMap::new();
    for k in 1..=n {
        bh_labels.insert(k, c.labels(k - 1).to_vec());
        bh_d.insert(k, if k == 1 { pi0.clone() } else { c.d(k - 1) });
    }
    let bh = ChainComplexFD::with_labels(bh_labels, bh_d).expect("truncated BH complex");

    let mut pr = BTreeMap::new();
    pr.insert(0, pi0.clone());
    for k in 1..=n {
        let (ak, bk) = (c.dim(k), c.dim(k - 1));
        let mut m = Matrix::zeros(bk, ak + bk);
        let s = Rational::from_int(neg_one_pow(k as i64 - 1) as i64);
        for i in 0..bk {
            m.set(i, ak + i, s.clone());
        }
        pr.insert(k, m);
    }
    let p_a = ChainMap::new(k_cplx, bh.clone(), pr).expect("projection shapes");

    let field_deg = (max_weight + 1).checked_sub(p.omega_weight());
    let fields = FieldSpace::by_poly_degree(patch, 1, field_deg);
    let sym = if fields.dim() == 0 {
        Matrix::zeros(0, 0)
    } else {
        fields.matrix_to(&FormSpace::by_weight(patch, n as usize + 1, max_weight), |v| exterior_d(&p.contract(&[v]))).kernel()
    };
    let iota = if fields.dim() == 0 { Matrix::zeros(top.dim(), 0) } else { fields.matrix_to(&top, |v| p.contract(&[v]).neg()).mul(&sym) };
    let mut ham_labels = BTreeMap::new();
    ham_labels.insert(0, (0..sym.cols()).map(|i| format!("v{i}")).collect());
    let ham = ChainComplexFD::with_labels(ham_labels, BTreeMap::new()).expect("fields in degree 0");
    let mut f1 = BTreeMap::new();
    f1.insert(0, coords_in(&exact, &iota));
    let f_1 = ChainMap::new(ham, bh, f1).expect("kks shapes");

    let pairs =
        if fields.dim() == 0 { c_space(0).dim() - d_top.rank() } else { fields.matrix_to(&top, |v| p.contract(&[v])).hstack(&d_top).kernel().cols() };
    let mut expected = BTreeMap::new();
    expected.insert(0, pairs);
    for k in 1..n {
        expected.insert(k, c.dim(k));
    }
    FiberSquareFD { p_a, f_1, expected }
}
