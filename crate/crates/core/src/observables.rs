//! Pre-n-plectic patches, Hamiltonian pairs, the observables Lie n-algebra, the truncated
//! de Rham complex `BH` and the KKS cocycle.

use crate::calculus::{exterior_d, interior, poincare_homotopy, vector_bracket, wedge_fields};
use crate::element::Elt;
use crate::fd::{flatten, sparse_columns, FieldSpace};
use crate::forms::{Patch, PolyForm, PolyMultivector};
use crate::linfty::{kappa, zeta, LInfty, LInftyMorphism, Sampler};
use crate::rational::Rational;
use crate::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObservablesError {
    #[error("omega not closed")]
    NotClosed,
    #[error("omega must have degree {expected}, found {found}")]
    OmegaDegree { expected: usize, found: usize },
    #[error("plectic degree must be at least 1")]
    ZeroDegree,
    #[error("expected a form of degree {expected}, found {found}")]
    Degree { expected: usize, found: usize },
    #[error("v is not symplectic: d(i_v omega) = {0}")]
    NotSymplectic(String),
}

/// A coordinate patch with a closed `(n+1)`-form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrePlecticPatch {
    patch: Patch,
    n: usize,
    omega: PolyForm,
}

impl PrePlecticPatch {
    pub fn new(patch: &Patch, n: usize, omega: PolyForm) -> Result<Self, ObservablesError> {
        if n == 0 {
            return Err(ObservablesError::ZeroDegree);
        }
        let omega = if omega.is_zero() { PolyForm::zero(patch, n + 1) } else { omega };
        if omega.degree() != n + 1 {
            return Err(ObservablesError::OmegaDegree { expected: n + 1, found: omega.degree() });
        }
        if !exterior_d(&omega).is_zero() {
            return Err(ObservablesError::NotClosed);
        }
        Ok(PrePlecticPatch { patch: patch.clone(), n, omega })
    }

    /// Parses `omega` on the standard patch of the given dimension.
    pub fn parse(dim: usize, n: usize, omega: &str) -> Result<Self, String> {
        let patch = Patch::standard(dim);
        let w = PolyForm::parse_with_degree(&patch, omega, n + 1).map_err(|e| e.to_string())?;
        PrePlecticPatch::new(&patch, n, w).map_err(|e| e.to_string())
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &PolyForm {
        &self.omega
    }

    /// `ι_{v1∧…∧vk} ω`.
    pub fn contract(&self, vs: &[&PolyMultivector]) -> PolyForm {
        if vs.len() > self.n + 1 {
            return PolyForm::zero(&self.patch, 0);
        }
        interior(&wedge_fields(&self.patch, vs), &self.omega)
    }

    /// Largest weight (coefficient degree plus form degree) of a term of `omega`.
    pub fn omega_weight(&self) -> u32 {
        self.omega.poly_degree().map_or(self.n as u32 + 1, |d| d + self.n as u32 + 1)
    }
}

/// A pair `(v, H)` with `ι_v ω + dH = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianPair {
    pub v: PolyMultivector,
    pub h: PolyForm,
}

pub fn is_hamiltonian(p: &PrePlecticPatch, v: &PolyMultivector, h: &PolyForm) -> Result<bool, ObservablesError> {
    if !h.is_zero() && h.degree() != p.n - 1 {
        return Err(ObservablesError::Degree { expected: p.n - 1, found: h.degree() });
    }
    Ok(p.contract(&[v]).add(&exterior_d(h)).is_zero())
}

/// The pair `(v, −h(ι_v ω))` with `h` the Poincaré homotopy.
pub fn solve_hamiltonian(p: &PrePlecticPatch, v: &PolyMultivector) -> Result<HamiltonianPair, ObservablesError> {
    let a = p.contract(&[v]);
    let da = exterior_d(&a);
    if !da.is_zero() {
        return Err(ObservablesError::NotSymplectic(da.to_string()));
    }
    let h = if a.is_zero() { PolyForm::zero(&p.patch, p.n - 1) } else { poincare_homotopy(&a).expect("degree n >= 1").neg() };
    Ok(HamiltonianPair { v: v.clone(), h })
}

pub type ObsElem = Elt<PolyForm>;

/// The Lie n-algebra `L∞(X, ω)`: `Ω^0 → … → Ω^{n−2} → Ham^{n−1}`.
#[derive(Debug, Clone)]
pub struct Observables {
    pub p: PrePlecticPatch,
}

impl Observables {
    pub fn new(p: &PrePlecticPatch) -> Self {
        Observables { p: p.clone() }
    }

    pub fn pair(&self, hp: &HamiltonianPair) -> ObsElem {
        Elt::new(0, hp.v.clone(), hp.h.clone())
    }

    /// Degree-`k` element given by an `(n−1−k)`-form.
    pub fn form(&self, k: i32, eta: PolyForm) -> ObsElem {
        Elt::pure(&self.p.patch, k, eta)
    }

    fn form_degree(&self, k: i32) -> usize {
        (self.p.n as i32 - 1 - k).max(0) as usize
    }
}

impl LInfty for Observables {
    type Elem = ObsElem;

    fn degree(&self, x: &ObsElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> ObsElem {
        Elt::pure(&self.p.patch, degree, PolyForm::zero(&self.p.patch, self.form_degree(degree)))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, self.p.n as i32 - 1)
    }

    fn max_arity(&self) -> usize {
        self.p.n + 1
    }

    fn bracket(&self, xs: &[&ObsElem]) -> ObsElem {
        let k = xs.len();
        let total: i32 = xs.iter().map(|x| x.degree).sum::<i32>() + k as i32 - 2;
        if k == 1 {
            let x = xs[0];
            if x.degree == 0 {
                return self.zero(-1);
            }
            return self.form(x.degree - 1, exterior_d(&x.p));
        }
        if xs.iter().any(|x| x.degree != 0) {
            return self.zero(total);
        }
        let vs: Vec<&PolyMultivector> = xs.iter().map(|x| &x.v).collect();
        let c = self.p.contract(&vs);
        if k == 2 {
            return Elt::new(0, vector_bracket(vs[0], vs[1]), c);
        }
        self.form(total, c.scale_int(zeta(k) as i64))
    }
}

/// The Lie algebra of Hamiltonian vector fields, in degree 0.
#[derive(Debug, Clone)]
pub struct HamFields {
    pub p: PrePlecticPatch,
}

impl LInfty for HamFields {
    type Elem = Elt<()>;

    fn degree(&self, x: &Elt<()>) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> Elt<()> {
        Elt::pure(&self.p.patch, degree, ())
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, 0)
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, xs: &[&Elt<()>]) -> Elt<()> {
        match xs.len() {
            2 => Elt::new(0, vector_bracket(&xs[0].v, &xs[1].v), ()),
            k => self.zero(k as i32 - 2),
        }
    }
}

/// Abelian complex `Ω^0 → … → Ω^{n−1} → dΩ^{n−1}`, with `Ω^{n−k}` in degree `k`.
#[derive(Debug, Clone)]
pub struct BhComplex {
    pub p: PrePlecticPatch,
}

impl BhComplex {
    /// Whether `form` is an element of degree `k`; in degree 0 exactness is decided
    /// by the Poincaré homotopy.
    pub fn accepts(&self, k: i32, form: &PolyForm) -> bool {
        if k < 0 || k > self.p.n as i32 {
            return form.is_zero();
        }
        let deg = self.p.n - k as usize;
        if form.is_zero() {
            return true;
        }
        if form.degree() != deg {
            return false;
        }
        if k > 0 {
            return true;
        }
        match poincare_homotopy(form) {
            Ok(h) => exterior_d(&h) == *form,
            Err(_) => false,
        }
    }
}

impl LInfty for BhComplex {
    type Elem = Elt<PolyForm>;

    fn degree(&self, x: &Self::Elem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> Self::Elem {
        let deg = (self.p.n as i32 - degree).clamp(0, self.p.n as i32) as usize;
        Elt::pure(&self.p.patch, degree, PolyForm::zero(&self.p.patch, deg))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, self.p.n as i32)
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn bracket(&self, xs: &[&Self::Elem]) -> Self::Elem {
        let x = xs[0];
        if x.degree == 0 {
            return self.zero(-1);
        }
        Elt::pure(&self.p.patch, x.degree - 1, exterior_d(&x.p))
    }
}

/// The KKS cocycle `ω_[k](v1, …, vk) = κ(k) ι_{v1∧…∧vk} ω`.
#[derive(Debug, Clone)]
pub struct Kks {
    pub source: HamFields,
    pub target: BhComplex,
}

impl Kks {
    pub fn new(p: &PrePlecticPatch) -> Self {
        Kks { source: HamFields { p: p.clone() }, target: BhComplex { p: p.clone() } }
    }
}

impl LInftyMorphism for Kks {
    type Source = HamFields;
    type Target = BhComplex;

    fn source(&self) -> &HamFields {
        &self.source
    }

    fn target(&self) -> &BhComplex {
        &self.target
    }

    fn max_arity(&self) -> usize {
        self.source.p.n + 1
    }

    fn component(&self, xs: &[&Elt<()>]) -> Elt<PolyForm> {
        let k = xs.len();
        let vs: Vec<&PolyMultivector> = xs.iter().map(|x| &x.v).collect();
        let c = self.source.p.contract(&vs).scale_int(kappa(k) as i64);
        Elt::pure(&self.source.p.patch, k as i32 - 1, c)
    }
}

/// Residual of `d ι_{v1…vk} ω = Σ_{i<j} (−1)^{i+j+k} ι_{[vi,vj]∧…} ω` for Hamiltonian fields.
pub fn kks_proof_identity_residual(p: &PrePlecticPatch, vs: &[PolyMultivector]) -> PolyForm {
    let k = vs.len();
    let all: Vec<&PolyMultivector> = vs.iter().collect();
    let lhs = exterior_d(&p.contract(&all));
    let mut rhs = PolyForm::zero(&p.patch, 0);
    for i in 0..k {
        for j in i + 1..k {
            let br = vector_bracket(&vs[i], &vs[j]);
            let mut parts: Vec<&PolyMultivector> = vec![&br];
            parts.extend((0..k).filter(|&l| l != i && l != j).map(|l| &vs[l]));
            let s = crate::perm::neg_one_pow((i + j + 2 + k) as i64);
            rhs = rhs.add(&p.contract(&parts).scale_int(s as i64));
        }
    }
    lhs.sub(&rhs)
}

/// Basis of the symplectic vector fields (`d ι_v ω = 0`) with coefficients of degree ≤ `max_deg`.
pub fn symplectic_field_basis(p: &PrePlecticPatch, max_deg: u32) -> Vec<PolyMultivector> {
    let space = FieldSpace::by_poly_degree(&p.patch, 1, Some(max_deg));
    let cols: Vec<_> = (0..space.dim()).map(|i| flatten(&exterior_d(&p.contract(&[&space.element(i)])))).collect();
    let m = sparse_columns(&cols);
    if m.rows() == 0 {
        return (0..space.dim()).map(|i| space.element(i)).collect();
    }
    let ker = m.kernel();
    (0..ker.cols()).map(|j| space.combine(&ker.col(j))).collect()
}

/// Seeded sampler of observables: Hamiltonian pairs in degree 0, forms above.
pub struct ObservableSampler {
    p: PrePlecticPatch,
    fields: Vec<PolyMultivector>,
    max_deg: u32,
    rng: ChaCha8Rng,
}

impl ObservableSampler {
    pub fn new(p: &PrePlecticPatch, max_deg: u32, seed: u64) -> Self {
        ObservableSampler { p: p.clone(), fields: symplectic_field_basis(p, max_deg), max_deg, rng: sample::seeded(seed) }
    }

    pub fn field(&mut self) -> PolyMultivector {
        let mut v = PolyMultivector::zero(&self.p.patch, 1);
        if self.fields.is_empty() {
            return v;
        }
        let n = self.rng.gen_range(1..=3);
        for _ in 0..n {
            let b = self.fields.choose(&mut self.rng).expect("nonempty").clone();
            v = v.add(&b.scale(&sample::nonzero_rational(&mut self.rng)));
        }
        v
    }

    /// A closed `(n−1)`-form.
    fn closed_form(&mut self) -> PolyForm {
        let n = self.p.n;
        if n == 1 {
            return PolyForm::constant(&self.p.patch, sample::rational(&mut self.rng));
        }
        let a: PolyForm = sample::graded(&mut self.rng, &self.p.patch, n - 2, self.max_deg, 2);
        exterior_d(&a)
    }

    pub fn pair(&mut self) -> HamiltonianPair {
        let v = self.field();
        let mut hp = solve_hamiltonian(&self.p, &v).expect("sampled fields are symplectic");
        hp.h = hp.h.add(&self.closed_form());
        hp
    }
}

impl Sampler<ObsElem> for ObservableSampler {
    fn sample(&mut self, degree: i32) -> ObsElem {
        if degree == 0 {
            let hp = self.pair();
            return Elt::new(0, hp.v, hp.h);
        }
        let deg = (self.p.n as i32 - 1 - degree).max(0) as usize;
        let eta: PolyForm = sample::graded(&mut self.rng, &self.p.patch, deg, self.max_deg, 3);
        Elt::pure(&self.p.patch, degree, eta)
    }
}

/// Projection of observables to Hamiltonian fields.
pub fn project_field(x: &ObsElem) -> Elt<()> {
    Elt::new(x.degree, if x.degree == 0 { x.v.clone() } else { x.v.scale(&Rational::zero()) }, ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linfty::bracket_or_zero;

    fn r2() -> PrePlecticPatch {
        PrePlecticPatch::parse(2, 1, "dx^dy").unwrap()
    }

    fn r3() -> PrePlecticPatch {
        PrePlecticPatch::parse(3, 2, "dx^dy^dz").unwrap()
    }

    fn field(p: &PrePlecticPatch, s: &str) -> PolyMultivector {
        PolyMultivector::parse(p.patch(), s).unwrap()
    }

    fn form(p: &PrePlecticPatch, s: &str) -> PolyForm {
        PolyForm::parse(p.patch(), s).unwrap()
    }

    #[test]
    fn hamiltonian_pairs() {
        let p = r2();
        assert!(is_hamiltonian(&p, &field(&p, "Dx"), &form(&p, "-y")).unwrap());
        let q = r3();
        assert!(is_hamiltonian(&q, &field(&q, "Dx"), &form(&q, "-y dz")).unwrap());
        assert!(is_hamiltonian(&q, &PolyMultivector::zero(q.patch(), 1), &form(&q, "dx")).unwrap());
        assert!(is_hamiltonian(&q, &field(&q, "Dx"), &form(&q, "y")).is_err());
    }

    #[test]
    fn solving_hamiltonians() {
        let p = r2();
        assert_eq!(solve_hamiltonian(&p, &field(&p, "Dx")).unwrap().h, form(&p, "-y"));
        assert!(solve_hamiltonian(&p, &PolyMultivector::zero(p.patch(), 1)).unwrap().h.is_zero());
        let q = r3();
        assert_eq!(solve_hamiltonian(&q, &field(&q, "Dz")).unwrap().h, form(&q, "-1/2*x dy + 1/2*y dx"));
        assert!(matches!(solve_hamiltonian(&p, &field(&p, "x Dx")), Err(ObservablesError::NotSymplectic(_))));
    }

    #[test]
    fn non_closed_omega_is_rejected() {
        let err = PrePlecticPatch::parse(3, 1, "x dy^dz").unwrap_err();
        assert_eq!(err, "omega not closed");
    }

    #[test]
    fn displayed_brackets() {
        let p = r2();
        let obs = Observables::new(&p);
        let a = Elt::new(0, field(&p, "Dx"), form(&p, "-y"));
        let b = Elt::new(0, field(&p, "Dy"), form(&p, "x"));
        let l2 = bracket_or_zero(&obs, &[&a, &b]);
        assert!(l2.v.is_zero());
        assert_eq!(l2.p, PolyForm::constant(p.patch(), Rational::one()));

        let q = r3();
        let obs = Observables::new(&q);
        let a = Elt::new(0, field(&q, "Dx"), form(&q, "-y dz"));
        let b = Elt::new(0, field(&q, "Dy"), form(&q, "x dz"));
        let c = Elt::new(0, field(&q, "Dz"), solve_hamiltonian(&q, &field(&q, "Dz")).unwrap().h);
        assert_eq!(bracket_or_zero(&obs, &[&a, &b]).p, form(&q, "dz"));
        let l3 = bracket_or_zero(&obs, &[&a, &b, &c]);
        assert_eq!(l3.degree, 1);
        assert_eq!(l3.p, PolyForm::constant(q.patch(), Rational::from_int(-1)));
    }

    #[test]
    fn kks_components() {
        let q = r3();
        let kks = Kks::new(&q);
        let e = |s: &str| Elt::new(0, field(&q, s), ());
        let (x, y, z) = (e("Dx"), e("Dy"), e("Dz"));
        assert_eq!(kks.component(&[&x]).p, form(&q, "-dy^dz"));
        assert_eq!(kks.component(&[&x, &y]).p, form(&q, "dz"));
        assert_eq!(kks.component(&[&x, &y, &z]).p, PolyForm::constant(q.patch(), Rational::one()));
    }

    #[test]
    fn bh_membership() {
        let p = r2();
        let bh = BhComplex { p: p.clone() };
        assert!(bh.accepts(0, &form(&p, "dx + dy")));
        assert!(!bh.accepts(0, &form(&p, "x dy")));
        let q = r3();
        let bh = BhComplex { p: q.clone() };
        assert_eq!(bh.degree_range(), (0, 2));
        assert!(bh.accepts(1, &form(&q, "x dy")));
        assert!(bh.accepts(2, &form(&q, "x")));
    }

    #[test]
    fn sampled_pairs_are_hamiltonian() {
        let q = PrePlecticPatch::parse(4, 2, "dx^dy^dz + dx^dw^dz").unwrap();
        let mut s = ObservableSampler::new(&q, 2, 1);
        for _ in 0..5 {
            let hp = s.pair();
            assert!(is_hamiltonian(&q, &hp.v, &hp.h).unwrap());
        }
    }
}
