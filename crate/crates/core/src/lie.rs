//! Finite-dimensional Lie algebras by structure constants, Chevalley–Eilenberg cochains
//! with trivial coefficients, and graded coordinate elements.

use crate::complex::ChainComplexFD;
use crate::linalg::Matrix;
use crate::linfty::{LInfty, Linear, Sampler};
use crate::perm::{sign_of, subsets};
use crate::rational::Rational;
use crate::sample;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("structure constants have the wrong shape")]
    Shape,
    #[error("bracket is not antisymmetric on (e{0}, e{1})")]
    NotAntisymmetric(usize, usize),
    #[error("Jacobi identity fails on (e{0}, e{1}, e{2})")]
    Jacobi(usize, usize, usize),
    #[error("Killing form is degenerate")]
    DegenerateKilling,
    #[error("cochain is not a cocycle")]
    NotCocycle,
}

/// Lie algebra with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdLieAlgebra {
    labels: Vec<String>,
    c: Vec<Vec<Vec<Rational>>>,
}

impl FdLieAlgebra {
    /// Validates antisymmetry and the Jacobi identity on all basis triples.
    pub fn new(labels: Vec<String>, c: Vec<Vec<Vec<Rational>>>) -> Result<Self, LieError> {
        let g = FdLieAlgebra::unchecked(labels, c)?;
        g.validate()?;
        Ok(g)
    }

    /// Checks only the shape of the structure constants.
    pub fn unchecked(labels: Vec<String>, c: Vec<Vec<Vec<Rational>>>) -> Result<Self, LieError> {
        let d = labels.len();
        if c.len() != d || c.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(LieError::Shape);
        }
        Ok(FdLieAlgebra { labels, c })
    }

    pub fn validate(&self) -> Result<(), LieError> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if (0..d).any(|k| self.c[i][j][k] != -&self.c[j][i][k]) {
                    return Err(LieError::NotAntisymmetric(i, j));
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let (x, y, z) = (self.basis(i), self.basis(j), self.basis(k));
                    let t1 = self.bracket(&x, &self.bracket(&y, &z));
                    let t2 = self.bracket(&y, &self.bracket(&z, &x));
                    let t3 = self.bracket(&z, &self.bracket(&x, &y));
                    if (0..d).any(|l| !(&(&t1[l] + &t2[l]) + &t3[l]).is_zero()) {
                        return Err(LieError::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn abelian(dim: usize) -> Self {
        let labels = (1..=dim).map(|i| format!("e{i}")).collect();
        FdLieAlgebra { labels, c: vec![vec![vec![Rational::zero(); dim]; dim]; dim] }
    }

    /// `su(2)` with `[e_i, e_j] = ε_{ijk} e_k`.
    pub fn su2() -> Self {
        let mut c = vec![vec![vec![Rational::zero(); 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = Rational::one();
            c[j][i][k] = -Rational::one();
        }
        FdLieAlgebra::new(vec!["e1".into(), "e2".into(), "e3".into()], c).expect("su(2) is a Lie algebra")
    }

    /// Central extension `g ⊕ ℝz` with `[x, y]' = [x, y] + c(x, y) z` by a 2-cocycle.
    pub fn central_extension(&self, c2: &AltForm, center: &str) -> Result<Self, LieError> {
        if c2.arity() != 2 || !ce_coboundary(self, c2).is_zero() {
            return Err(LieError::NotCocycle);
        }
        let d = self.dim();
        let mut c = vec![vec![vec![Rational::zero(); d + 1]; d + 1]; d + 1];
        for (i, plane) in c.iter_mut().take(d).enumerate() {
            for (j, row) in plane.iter_mut().take(d).enumerate() {
                row[..d].clone_from_slice(&self.c[i][j]);
                row[d] = c2.eval_basis(&[i, j]);
            }
        }
        let mut labels = self.labels.clone();
        labels.push(center.to_string());
        FdLieAlgebra::new(labels, c)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (xi, ci) in x.iter().zip(&self.c) {
            if xi.is_zero() {
                continue;
            }
            for (yj, cij) in y.iter().zip(ci) {
                if yj.is_zero() {
                    continue;
                }
                let xy = xi * yj;
                for (o, c) in out.iter_mut().zip(cij) {
                    if !c.is_zero() {
                        *o += &(&xy * c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` in the basis.
    pub fn ad(&self, x: &[Rational]) -> Matrix {
        let cols = (0..self.dim()).map(|j| self.bracket(x, &self.basis(j))).collect();
        Matrix::from_cols(self.dim(), cols)
    }

    /// `K(e_i, e_j) = tr(ad_{e_i} ad_{e_j})`.
    pub fn killing(&self) -> Matrix {
        let d = self.dim();
        let ads: Vec<Matrix> = (0..d).map(|i| self.ad(&self.basis(i))).collect();
        let mut k = Matrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                k.set(i, j, ads[i].mul(&ads[j]).trace());
            }
        }
        k
    }
}

/// Alternating multilinear form on `ℝ^d`, stored on strictly increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AltForm {
    dim: usize,
    arity: usize,
    values: BTreeMap<Vec<usize>, Rational>,
}

impl AltForm {
    pub fn zero(dim: usize, arity: usize) -> Self {
        AltForm { dim, arity, values: BTreeMap::new() }
    }

    /// Alternating form determined by its values on increasing basis tuples.
    pub fn from_fn(dim: usize, arity: usize, f: impl Fn(&[usize]) -> Rational) -> Self {
        let mut values = BTreeMap::new();
        for t in subsets(&(0..dim).collect::<Vec<_>>(), arity) {
            let v = f(&t);
            if !v.is_zero() {
                values.insert(t, v);
            }
        }
        AltForm { dim, arity, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Value on an arbitrary tuple of basis indices.
    pub fn eval_basis(&self, idx: &[usize]) -> Rational {
        let mut sorted: Vec<usize> = idx.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Rational::zero();
        }
        let order: Vec<usize> = idx.iter().map(|i| sorted.iter().position(|s| s == i).expect("present")).collect();
        let v = self.values.get(&sorted).cloned().unwrap_or_else(Rational::zero);
        if sign_of(&order) < 0 {
            -v
        } else {
            v
        }
    }

    /// Multilinear evaluation on coordinate vectors.
    pub fn eval(&self, xs: &[&[Rational]]) -> Rational {
        assert_eq!(xs.len(), self.arity);
        let mut acc = Rational::zero();
        let mut idx = vec![0usize; self.arity];
        self.eval_rec(xs, 0, &Rational::one(), &mut idx, &mut acc);
        acc
    }

    fn eval_rec(&self, xs: &[&[Rational]], pos: usize, coeff: &Rational, idx: &mut Vec<usize>, acc: &mut Rational) {
        if pos == xs.len() {
            *acc += &(coeff * &self.eval_basis(idx));
            return;
        }
        for i in 0..self.dim {
            if xs[pos][i].is_zero() || idx[..pos].contains(&i) {
                continue;
            }
            idx[pos] = i;
            self.eval_rec(xs, pos + 1, &(coeff * &xs[pos][i]), idx, acc);
        }
    }

    pub fn scale(&self, c: &Rational) -> AltForm {
        AltForm::from_fn(self.dim, self.arity, |t| c * &self.eval_basis(t))
    }

    pub fn values(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.values
    }
}

/// `(δc)(x_0, …, x_k) = Σ_{a<b} (−1)^{a+b} c([x_a, x_b], x_0, …, x̂_a, …, x̂_b, …, x_k)`.
pub fn ce_coboundary(g: &FdLieAlgebra, c: &AltForm) -> AltForm {
    let k = c.arity;
    AltForm::from_fn(g.dim(), k + 1, |t| {
        let mut acc = Rational::zero();
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                let br = g.bracket(&g.basis(t[a]), &g.basis(t[b]));
                let rest: Vec<Vec<Rational>> = t.iter().enumerate().filter(|(i, _)| *i != a && *i != b).map(|(_, &e)| g.basis(e)).collect();
                let mut args: Vec<&[Rational]> = vec![&br];
                args.extend(rest.iter().map(|v| v.as_slice()));
                let v = c.eval(&args);
                if (a + b) % 2 == 0 {
                    acc += &v;
                } else {
                    acc -= &v;
                }
            }
        }
        acc
    })
}

/// Coboundary evaluated on every ordered basis tuple; returns the first nonzero one.
pub fn ce_cocycle_witness(g: &FdLieAlgebra, c: &AltForm) -> Option<(Vec<usize>, Rational)> {
    let dc = ce_coboundary(g, c);
    dc.values().iter().next().map(|(t, v)| (t.clone(), v.clone()))
}

/// `μ(x, y, z) = K(x, [y, z])`; fails if the Killing form is degenerate.
pub fn string_cocycle(g: &FdLieAlgebra) -> Result<AltForm, LieError> {
    let k = g.killing();
    if k.det().is_zero() {
        return Err(LieError::DegenerateKilling);
    }
    Ok(AltForm::from_fn(g.dim(), 3, |t| {
        let yz = g.bracket(&g.basis(t[1]), &g.basis(t[2]));
        k.apply(&yz)[t[0]].clone()
    }))
}

/// `μ(x, y, z) = K(x, [y, z])` evaluated directly on coordinates (no alternation assumed).
pub fn killing_triple(g: &FdLieAlgebra, x: &[Rational], y: &[Rational], z: &[Rational]) -> Rational {
    let k = g.killing();
    let yz = g.bracket(y, z);
    let kyz = k.apply(&yz);
    x.iter().zip(&kyz).fold(Rational::zero(), |acc, (a, b)| &acc + &(a * b))
}

/// Coordinate vector placed in a homological degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdElem {
    pub degree: i32,
    pub coords: Vec<Rational>,
}

impl FdElem {
    pub fn new(degree: i32, coords: Vec<Rational>) -> Self {
        FdElem { degree, coords }
    }

    pub fn zeros(degree: i32, dim: usize) -> Self {
        FdElem { degree, coords: vec![Rational::zero(); dim] }
    }
}

impl Linear for FdElem {
    fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        FdElem { degree: self.degree, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() }
    }

    fn scale(&self, c: &Rational) -> Self {
        FdElem { degree: self.degree, coords: self.coords.iter().map(|a| a * c).collect() }
    }

    fn is_zero(&self) -> bool {
        self.coords.iter().all(|a| a.is_zero())
    }
}

/// A Lie algebra as an L∞-algebra concentrated in degree 0.
pub struct LieAsLInfty(pub FdLieAlgebra);

impl LInfty for LieAsLInfty {
    type Elem = FdElem;

    fn degree(&self, x: &FdElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> FdElem {
        FdElem::zeros(degree, if degree == 0 { self.0.dim() } else { 0 })
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, 0)
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, xs: &[&FdElem]) -> FdElem {
        if xs.len() != 2 {
            return self.zero(xs.len() as i32 - 2);
        }
        FdElem::new(0, self.0.bracket(&xs[0].coords, &xs[1].coords))
    }
}

/// A finite-dimensional complex as an abelian L∞-algebra.
pub struct ComplexAsLInfty(pub ChainComplexFD);

impl LInfty for ComplexAsLInfty {
    type Elem = FdElem;

    fn degree(&self, x: &FdElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> FdElem {
        FdElem::zeros(degree, self.0.dim(degree))
    }

    fn degree_range(&self) -> (i32, i32) {
        let ds = self.0.degrees();
        (ds.first().copied().unwrap_or(0), ds.last().copied().unwrap_or(0))
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn bracket(&self, xs: &[&FdElem]) -> FdElem {
        let x = xs[0];
        FdElem::new(x.degree - 1, self.0.d(x.degree).apply(&x.coords))
    }
}

/// Seeded sampler of coordinate vectors with prescribed dimensions per degree.
pub struct FdSampler {
    dims: BTreeMap<i32, usize>,
    rng: ChaCha8Rng,
}

impl FdSampler {
    pub fn new(dims: BTreeMap<i32, usize>, seed: u64) -> Self {
        FdSampler { dims, rng: sample::seeded(seed) }
    }
}

impl Sampler<FdElem> for FdSampler {
    fn sample(&mut self, degree: i32) -> FdElem {
        let d = self.dims.get(&degree).copied().unwrap_or(0);
        FdElem::new(degree, (0..d).map(|_| sample::rational(&mut self.rng)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_killing_and_mu() {
        let g = FdLieAlgebra::su2();
        let k = g.killing();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*k.get(i, j), Rational::from_int(if i == j { -2 } else { 0 }));
            }
        }
        let mu = string_cocycle(&g).unwrap();
        assert_eq!(mu.eval_basis(&[0, 1, 2]), Rational::from_int(-2));
        assert_eq!(mu.eval_basis(&[1, 0, 2]), Rational::from_int(2));
        assert!(ce_coboundary(&g, &mu).is_zero());
    }

    #[test]
    fn corrupted_constants_are_rejected() {
        let mut c = vec![vec![vec![Rational::zero(); 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[i][j][k] = Rational::one();
            c[j][i][k] = -Rational::one();
        }
        c[0][1][2] = -Rational::one();
        let labels: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        assert!(matches!(FdLieAlgebra::new(labels.clone(), c.clone()), Err(LieError::NotAntisymmetric(..))));
        c[1][0][2] = Rational::one();
        assert!(FdLieAlgebra::new(labels.clone(), c.clone()).is_ok());
        c[0][1][0] = Rational::one();
        c[1][0][0] = -Rational::one();
        assert!(matches!(FdLieAlgebra::new(labels, c), Err(LieError::Jacobi(..))));
    }

    #[test]
    fn abelian_killing_is_degenerate() {
        assert_eq!(string_cocycle(&FdLieAlgebra::abelian(2)), Err(LieError::DegenerateKilling));
    }
}
