//! Restriction of the KKS cocycle along Lie algebra actions: the Heisenberg extension
//! and the string Lie 2-algebra.

use crate::calculus::vector_bracket;
use crate::complex::{ChainComplexFD, ChainMap};
use crate::fiber::FiberSquareFD;
use crate::forms::{PolyForm, PolyMultivector};
use crate::lie::{ce_coboundary, AltForm, ComplexAsLInfty, FdElem, FdLieAlgebra, LieAsLInfty, LieError};
use crate::linalg::Matrix;
use crate::linfty::{kappa, LInfty, LInftyMorphism};
use crate::observables::{solve_hamiltonian, PrePlecticPatch};
use crate::perm::subsets;
use crate::rational::Rational;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error("rho does not preserve the bracket on (e{0}, e{1})")]
    NotBracketPreserving(usize, usize),
    #[error("rho(e{0}) is not Hamiltonian")]
    NotHamiltonian(usize),
    #[error("rho must assign one vector field per basis element")]
    Shape,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Pullback of the KKS cocycle along `ρ: g → 𝔛_Ham`.
#[derive(Debug, Clone)]
pub struct RestrictedCocycle {
    /// `components[k−1][I] = κ(k) ι_{ρ(e_I)} ω` on increasing index tuples `I` of length `k`.
    pub components: Vec<BTreeMap<Vec<usize>, PolyForm>>,
    /// The `(n+1)`-ary component evaluated at the origin.
    pub at_zero: Option<AltForm>,
}

pub fn restrict_cocycle(
    g: &FdLieAlgebra,
    rho: &[PolyMultivector],
    p: &PrePlecticPatch,
    evaluate_at_zero: bool,
) -> Result<RestrictedCocycle, ExtensionError> {
    let d = g.dim();
    if rho.len() != d {
        return Err(ExtensionError::Shape);
    }
    for (i, v) in rho.iter().enumerate() {
        if solve_hamiltonian(p, v).is_err() {
            return Err(ExtensionError::NotHamiltonian(i));
        }
    }
    for i in 0..d {
        for j in 0..d {
            let lhs = vector_bracket(&rho[i], &rho[j]);
            let mut rhs = PolyMultivector::zero(p.patch(), 1);
            for (k, r) in rho.iter().enumerate() {
                let c = g.structure_constant(i, j, k);
                if !c.is_zero() {
                    rhs = rhs.add(&r.scale(c));
                }
            }
            if lhs != rhs {
                return Err(ExtensionError::NotBracketPreserving(i, j));
            }
        }
    }
    let n = p.n();
    let mut components = Vec::new();
    for k in 1..=n + 1 {
        let mut comp = BTreeMap::new();
        for t in subsets(&(0..d).collect::<Vec<_>>(), k) {
            let vs: Vec<&PolyMultivector> = t.iter().map(|&i| &rho[i]).collect();
            let c = p.contract(&vs).scale_int(kappa(k) as i64);
            if !c.is_zero() {
                comp.insert(t, c);
            }
        }
        components.push(comp);
    }
    let at_zero = evaluate_at_zero.then(|| {
        let top = &components[n];
        AltForm::from_fn(d, n + 1, |t| top.get(t).map_or_else(Rational::zero, |f| f.as_function().constant_term()))
    });
    Ok(RestrictedCocycle { components, at_zero })
}

/// Heisenberg data on `(ℝ², dx∧dy)` acted on by constant fields: the cocycle and the
/// 3-dimensional central extension.
pub fn heisenberg_r2() -> Result<(AltForm, FdLieAlgebra), ExtensionError> {
    let p = PrePlecticPatch::parse(2, 1, "dx^dy").expect("valid symplectic plane");
    let g = FdLieAlgebra::abelian(2);
    let rho = vec![PolyMultivector::unit(p.patch(), 0), PolyMultivector::unit(p.patch(), 1)];
    let c = restrict_cocycle(&g, &rho, &p, true)?.at_zero.expect("requested");
    if !ce_coboundary(&g, &c).is_zero() {
        return Err(LieError::NotCocycle.into());
    }
    let h = g.central_extension(&c, "z")?;
    Ok((c, h))
}

/// Lie 2-algebra `g ⊕ ℝ[1]` with `l_2` the bracket of `g` and `l_3 = −μ`.
pub struct StringLie2 {
    pub g: FdLieAlgebra,
    pub mu: AltForm,
}

impl StringLie2 {
    pub fn new(g: &FdLieAlgebra) -> Result<Self, LieError> {
        let mu = crate::lie::string_cocycle(g)?;
        if !ce_coboundary(g, &mu).is_zero() {
            return Err(LieError::NotCocycle);
        }
        Ok(StringLie2 { g: g.clone(), mu })
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        BTreeMap::from([(0, self.g.dim()), (1, 1)])
    }
}

impl LInfty for StringLie2 {
    type Elem = FdElem;

    fn degree(&self, x: &FdElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> FdElem {
        FdElem::zeros(degree, self.dims().get(&degree).copied().unwrap_or(0))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, 1)
    }

    fn max_arity(&self) -> usize {
        3
    }

    fn bracket(&self, xs: &[&FdElem]) -> FdElem {
        let k = xs.len();
        let out = xs.iter().map(|x| x.degree).sum::<i32>() + k as i32 - 2;
        if xs.iter().any(|x| x.degree != 0) {
            return self.zero(out);
        }
        match k {
            2 => FdElem::new(0, self.g.bracket(&xs[0].coords, &xs[1].coords)),
            3 => {
                let args: Vec<&[Rational]> = xs.iter().map(|x| x.coords.as_slice()).collect();
                FdElem::new(1, vec![-self.mu.eval(&args)])
            }
            _ => self.zero(out),
        }
    }
}

/// Strict morphism between finite-dimensional complexes given by a chain map.
pub struct MatrixMorphism {
    pub source: ComplexAsLInfty,
    pub target: ComplexAsLInfty,
    pub map: ChainMap,
}

impl LInftyMorphism for MatrixMorphism {
    type Source = ComplexAsLInfty;
    type Target = ComplexAsLInfty;

    fn source(&self) -> &ComplexAsLInfty {
        &self.source
    }

    fn target(&self) -> &ComplexAsLInfty {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&FdElem]) -> FdElem {
        let x = xs[0];
        FdElem::new(x.degree, self.map.map(x.degree).apply(&x.coords))
    }
}

/// `μ` as an L∞-morphism `g → ℝ[2]` with a single ternary component.
pub struct MuMorphism {
    pub source: LieAsLInfty,
    pub target: ComplexAsLInfty,
    pub mu: AltForm,
}

impl LInftyMorphism for MuMorphism {
    type Source = LieAsLInfty;
    type Target = ComplexAsLInfty;

    fn source(&self) -> &LieAsLInfty {
        &self.source
    }

    fn target(&self) -> &ComplexAsLInfty {
        &self.target
    }

    fn max_arity(&self) -> usize {
        3
    }

    fn component(&self, xs: &[&FdElem]) -> FdElem {
        let out = xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 1;
        if xs.len() != 3 {
            return self.target.zero(out);
        }
        let args: Vec<&[Rational]> = xs.iter().map(|x| x.coords.as_slice()).collect();
        FdElem::new(2, vec![self.mu.eval(&args)])
    }
}

/// Projection `g ⊕ ℝ[1] → g`.
pub struct StringProjection {
    pub source: StringLie2,
    pub target: LieAsLInfty,
}

impl LInftyMorphism for StringProjection {
    type Source = StringLie2;
    type Target = LieAsLInfty;

    fn source(&self) -> &StringLie2 {
        &self.source
    }

    fn target(&self) -> &LieAsLInfty {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&FdElem]) -> FdElem {
        let x = xs[0];
        if x.degree == 0 {
            x.clone()
        } else {
            self.target.zero(x.degree)
        }
    }
}

/// Lift `g ⊕ ℝ[1] → K` into the cone of the identity of `ℝ[1]`:
/// `f_1(r) = r`, `f_3(x, y, z) = (0, twist · (−μ(x, y, z)))`.
pub struct StringLift {
    pub source: StringLie2,
    pub target: ComplexAsLInfty,
    pub twist: Rational,
}

impl LInftyMorphism for StringLift {
    type Source = StringLie2;
    type Target = ComplexAsLInfty;

    fn source(&self) -> &StringLie2 {
        &self.source
    }

    fn target(&self) -> &ComplexAsLInfty {
        &self.target
    }

    fn max_arity(&self) -> usize {
        3
    }

    fn component(&self, xs: &[&FdElem]) -> FdElem {
        let k = xs.len();
        let out = xs.iter().map(|x| x.degree).sum::<i32>() + k as i32 - 1;
        match k {
            1 if xs[0].degree == 1 => FdElem::new(1, xs[0].coords.clone()),
            3 if xs.iter().all(|x| x.degree == 0) => {
                let args: Vec<&[Rational]> = xs.iter().map(|x| x.coords.as_slice()).collect();
                FdElem::new(2, vec![-&(&self.mu_value(&args) * &self.twist)])
            }
            _ => self.target.zero(out),
        }
    }
}

impl StringLift {
    fn mu_value(&self, args: &[&[Rational]]) -> Rational {
        self.source.mu.eval(args)
    }
}

/// The string square: `πL: g ⊕ ℝ[1] → g`, the lift into `K = cone(id_{ℝ[1]})`,
/// `pA: K → ℝ[2]` and `μ: g → ℝ[2]`.
pub struct StringFiberData {
    pub pi_l: StringProjection,
    pub lift: StringLift,
    pub p_a: MatrixMorphism,
    pub mu: MuMorphism,
    pub fd: FiberSquareFD,
}

pub fn string_fiber_data(g: &FdLieAlgebra) -> Result<StringFiberData, LieError> {
    let line = ChainComplexFD::with_labels(BTreeMap::from([(1, vec!["r".to_string()])]), BTreeMap::new()).expect("one-dimensional complex");
    let cone = line.cone_identity();
    let proj = line.cone_projection();
    let target = line.shift_up();
    let gc = ChainComplexFD::new(BTreeMap::from([(0, g.dim())]), BTreeMap::new()).expect("g in degree 0");
    let mu1 = ChainMap::new(gc, target.clone(), BTreeMap::from([(0, Matrix::zeros(0, g.dim()))])).expect("zero map");
    let fd = FiberSquareFD { p_a: proj.clone(), f_1: mu1, expected: BTreeMap::from([(0, g.dim()), (1, 1)]) };
    let s = StringLie2::new(g)?;
    Ok(StringFiberData {
        pi_l: StringProjection { source: StringLie2::new(g)?, target: LieAsLInfty(g.clone()) },
        lift: StringLift { source: StringLie2::new(g)?, target: ComplexAsLInfty(cone.clone()), twist: Rational::one() },
        p_a: MatrixMorphism { source: ComplexAsLInfty(cone), target: ComplexAsLInfty(target.clone()), map: proj },
        mu: MuMorphism { source: LieAsLInfty(g.clone()), target: ComplexAsLInfty(target), mu: s.mu.clone() },
        fd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Patch;

    #[test]
    fn heisenberg_cocycle() {
        let (c, h) = heisenberg_r2().unwrap();
        assert_eq!(c.eval_basis(&[0, 1]), Rational::one());
        assert_eq!(h.dim(), 3);
        let z = h.bracket(&h.basis(0), &h.basis(1));
        assert_eq!(z, h.basis(2));
    }

    #[test]
    fn zero_form_gives_zero_cocycle() {
        let p = PrePlecticPatch::new(&Patch::standard(2), 1, PolyForm::zero(&Patch::standard(2), 2)).unwrap();
        let g = FdLieAlgebra::abelian(2);
        let rho = vec![PolyMultivector::unit(p.patch(), 0), PolyMultivector::unit(p.patch(), 1)];
        let c = restrict_cocycle(&g, &rho, &p, true).unwrap().at_zero.unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn non_bracket_preserving_action_is_rejected() {
        let p = PrePlecticPatch::parse(2, 1, "dx^dy").unwrap();
        let g = FdLieAlgebra::abelian(2);
        let rho = vec![PolyMultivector::unit(p.patch(), 0), PolyMultivector::parse(p.patch(), "x Dy").unwrap()];
        assert_eq!(restrict_cocycle(&g, &rho, &p, true).unwrap_err(), ExtensionError::NotBracketPreserving(0, 1));
        let rho = vec![PolyMultivector::parse(p.patch(), "x Dx").unwrap(), PolyMultivector::unit(p.patch(), 1)];
        assert_eq!(restrict_cocycle(&g, &rho, &p, true).unwrap_err(), ExtensionError::NotHamiltonian(0));
    }
}
