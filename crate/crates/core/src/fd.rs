//! Finite-dimensional slices of forms and multivector fields, and matrices of linear maps
//! between them.
//!
//! The weight of `f dx^I` with `f` homogeneous is `deg f + |I|`. Exterior derivative,
//! Čech differentials and contraction with constant-coefficient data preserve weight.

use crate::complex::{ChainComplexFD, ChainMap};
use crate::forms::{indices, mask_of, FormKind, Graded, IndexSet, Kind, Patch, VectorKind};
use crate::linalg::Matrix;
use crate::linfty::Linear;
use crate::perm::subsets;
use crate::poly::{Monomial, Poly};
use crate::rational::Rational;
use crate::sample::monomials;
use std::collections::{BTreeMap, HashMap};

/// Span of `x^a e_I` with `|I| = degree` and `|a| ≤ max_poly`.
#[derive(Clone, Debug)]
pub struct GradedSpace<K: Kind> {
    patch: Patch,
    degree: usize,
    basis: Vec<(IndexSet, Monomial)>,
    index: HashMap<(IndexSet, Monomial), usize>,
    _kind: std::marker::PhantomData<K>,
}

pub type FormSpace = GradedSpace<FormKind>;
pub type FieldSpace = GradedSpace<VectorKind>;

impl<K: Kind> GradedSpace<K> {
    /// Coefficients of polynomial degree at most `max_poly` (`None`: the zero space).
    pub fn by_poly_degree(patch: &Patch, degree: usize, max_poly: Option<u32>) -> Self {
        let mut basis = Vec::new();
        if let Some(d) = max_poly {
            let monos = monomials(patch.dim(), d);
            for idx in subsets(&(0..patch.dim()).collect::<Vec<_>>(), degree) {
                let m = mask_of(&idx);
                for e in &monos {
                    basis.push((m, e.clone()));
                }
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        GradedSpace { patch: patch.clone(), degree, basis, index, _kind: std::marker::PhantomData }
    }

    /// Terms of weight at most `max_weight`.
    pub fn by_weight(patch: &Patch, degree: usize, max_weight: u32) -> Self {
        let max_poly = (max_weight as usize).checked_sub(degree).map(|d| d as u32);
        Self::by_poly_degree(patch, degree, max_poly)
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, i: usize) -> Graded<K> {
        let (m, e) = &self.basis[i];
        Graded::basis(&self.patch, &indices(*m), Poly::monomial(self.patch.vars(), e.clone(), Rational::one()))
    }

    pub fn combine(&self, coords: &[Rational]) -> Graded<K> {
        assert_eq!(coords.len(), self.dim());
        let mut terms: HashMap<IndexSet, Vec<(Monomial, Rational)>> = HashMap::new();
        for ((m, e), c) in self.basis.iter().zip(coords) {
            if !c.is_zero() {
                terms.entry(*m).or_default().push((e.clone(), c.clone()));
            }
        }
        Graded::from_terms(&self.patch, self.degree, terms.into_iter().map(|(m, t)| (m, Poly::from_terms(self.patch.vars(), t))))
    }

    /// Coordinates of `g`, or `None` if `g` leaves the slice.
    pub fn coords(&self, g: &Graded<K>) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.dim()];
        if g.is_zero() {
            return Some(out);
        }
        if g.degree() != self.degree {
            return None;
        }
        for (m, f) in g.terms() {
            for (e, c) in f.terms() {
                let i = *self.index.get(&(*m, e.clone()))?;
                out[i] = c.clone();
            }
        }
        Some(out)
    }

    pub fn contains(&self, g: &Graded<K>) -> bool {
        self.coords(g).is_some()
    }

    /// Matrix of a linear map from this slice into `target`; panics if an image leaves `target`.
    pub fn matrix_to<L: Kind>(&self, target: &GradedSpace<L>, op: impl Fn(&Graded<K>) -> Graded<L>) -> Matrix {
        let cols = (0..self.dim()).map(|i| target.coords(&op(&self.element(i))).expect("image leaves the target slice")).collect();
        Matrix::from_cols(target.dim(), cols)
    }
}

/// Sparse coordinates of a graded element in the monomial basis.
pub fn flatten<K: Kind>(g: &Graded<K>) -> Vec<((IndexSet, Monomial), Rational)> {
    let mut out = Vec::new();
    for (m, f) in g.terms() {
        for (e, c) in f.terms() {
            out.push(((*m, e.clone()), c.clone()));
        }
    }
    out
}

/// Matrix whose columns are the given sparse vectors, rows indexed by first appearance.
pub fn sparse_columns<T: std::hash::Hash + Eq + Clone>(cols: &[Vec<(T, Rational)>]) -> Matrix {
    let mut rows: HashMap<T, usize> = HashMap::new();
    for col in cols {
        for (k, _) in col {
            let n = rows.len();
            rows.entry(k.clone()).or_insert(n);
        }
    }
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (k, c) in col {
            let i = rows[k];
            let v = m.get(i, j) + c;
            m.set(i, j, v);
        }
    }
    m
}

/// Linear combination `Σ c_i g_i` of graded elements.
pub fn combination<K: Kind>(patch: &Patch, degree: usize, gs: &[Graded<K>], cs: &[Rational]) -> Graded<K> {
    let mut out = Graded::zero(patch, degree);
    for (g, c) in gs.iter().zip(cs) {
        if !c.is_zero() {
            out = out.add(&g.scale(c));
        }
    }
    out
}

/// Coordinate key of a sparse vector: a summand tag, a simplex, an index set and a monomial.
pub type FlatKey = (u8, Vec<usize>, IndexSet, Monomial);
pub type Flat = Vec<(FlatKey, Rational)>;

/// Sparse coordinates of `g` under the given summand tag and simplex.
pub fn flat_graded<K: Kind>(tag: u8, simplex: &[usize], g: &Graded<K>) -> Flat {
    flatten(g).into_iter().map(|((m, e), c)| ((tag, simplex.to_vec(), m, e), c)).collect()
}

fn linear_combination<E: Linear>(elems: &[E], coords: &[Rational]) -> Option<E> {
    let mut out: Option<E> = None;
    for (e, c) in elems.iter().zip(coords) {
        if c.is_zero() {
            continue;
        }
        let term = e.scale(c);
        out = Some(match out {
            Some(acc) => acc.add(&term),
            None => term,
        });
    }
    out
}

/// Basis of `{x ∈ span(ambient) : constraint(x) = 0}`; `ambient` must be independent.
pub fn kernel_basis<E: Linear>(ambient: &[E], constraint: impl Fn(&E) -> Flat) -> Vec<E> {
    let cols: Vec<Flat> = ambient.iter().map(constraint).collect();
    let m = sparse_columns(&cols);
    if m.rows() == 0 {
        return ambient.to_vec();
    }
    let ker = m.kernel();
    (0..ker.cols()).filter_map(|j| linear_combination(ambient, &ker.col(j))).collect()
}

/// Finite-dimensional space spanned by independent elements, with exact coordinates.
#[derive(Debug, Clone)]
pub struct Presented<E> {
    basis: Vec<E>,
    rows: HashMap<FlatKey, usize>,
    matrix: Matrix,
    pivots: Vec<usize>,
    inverse: Matrix,
}

impl<E: Linear> Presented<E> {
    pub fn new(basis: Vec<E>, flatten: &dyn Fn(&E) -> Flat) -> Result<Self, String> {
        let cols: Vec<Flat> = basis.iter().map(flatten).collect();
        let mut rows: HashMap<FlatKey, usize> = HashMap::new();
        for col in &cols {
            for (k, _) in col {
                let n = rows.len();
                rows.entry(k.clone()).or_insert(n);
            }
        }
        let matrix = sparse_columns(&cols);
        let matrix = if matrix.rows() == rows.len() { matrix } else { Matrix::zeros(rows.len(), basis.len()) };
        let (_, pivots) = matrix.transpose().rref();
        if pivots.len() != basis.len() {
            return Err(format!("{} spanning elements have rank {}", basis.len(), pivots.len()));
        }
        let square = Matrix::from_rows(pivots.iter().map(|&r| (0..basis.len()).map(|j| matrix.get(r, j).clone()).collect()).collect());
        let inverse = if basis.is_empty() { Matrix::zeros(0, 0) } else { square.inverse().expect("pivot rows are independent") };
        Ok(Presented { basis, rows, matrix, pivots, inverse })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[E] {
        &self.basis
    }

    /// Coordinates of a sparse vector, or `None` if it lies outside the span.
    pub fn coords(&self, v: &Flat) -> Option<Vec<Rational>> {
        let mut b = vec![Rational::zero(); self.rows.len()];
        for (k, c) in v {
            if c.is_zero() {
                continue;
            }
            let i = *self.rows.get(k)?;
            b[i] += c;
        }
        if self.basis.is_empty() {
            return b.iter().all(Rational::is_zero).then(Vec::new);
        }
        let rhs: Vec<Rational> = self.pivots.iter().map(|&r| b[r].clone()).collect();
        let x = self.inverse.apply(&rhs);
        (self.matrix.apply(&x) == b).then_some(x)
    }
}

/// A complex presented by bases in each degree, with its differential matrices.
pub struct FdComplex<E> {
    pub spaces: BTreeMap<i32, Presented<E>>,
    pub complex: ChainComplexFD,
}

/// Builds the matrices of `d` (of degree −1) between the spans of the given bases.
pub fn fd_complex<E: Linear>(bases: BTreeMap<i32, Vec<E>>, flatten: &dyn Fn(&E) -> Flat, d: &dyn Fn(&E) -> E) -> Result<FdComplex<E>, String> {
    let mut spaces = BTreeMap::new();
    for (k, b) in bases {
        spaces.insert(k, Presented::new(b, flatten).map_err(|e| format!("degree {k}: {e}"))?);
    }
    let mut labels = BTreeMap::new();
    let mut mats = BTreeMap::new();
    for (&k, s) in &spaces {
        labels.insert(k, (0..s.dim()).map(|i| format!("b{i}")).collect());
        let Some(t) = spaces.get(&(k - 1)) else { continue };
        let mut cols = Vec::with_capacity(s.dim());
        for e in s.basis() {
            let img = flatten(&d(e));
            cols.push(t.coords(&img).ok_or_else(|| format!("d leaves the slice in degree {}", k - 1))?);
        }
        mats.insert(k, Matrix::from_cols(t.dim(), cols));
    }
    let complex = ChainComplexFD::with_labels(labels, mats).map_err(|e| e.to_string())?;
    Ok(FdComplex { spaces, complex })
}

/// Matrix presentation of a degreewise map between presented complexes.
pub fn fd_chain_map<E: Linear, F: Linear>(
    source: &FdComplex<E>,
    target: &FdComplex<F>,
    flatten: &dyn Fn(&F) -> Flat,
    f: &dyn Fn(&E) -> F,
) -> Result<ChainMap, String> {
    let mut maps = BTreeMap::new();
    for (&k, s) in &source.spaces {
        let Some(t) = target.spaces.get(&k) else {
            if s.basis().iter().any(|e| !f(e).is_zero()) {
                return Err(format!("map leaves the target in degree {k}"));
            }
            continue;
        };
        let mut cols = Vec::with_capacity(s.dim());
        for e in s.basis() {
            cols.push(t.coords(&flatten(&f(e))).ok_or_else(|| format!("map leaves the target slice in degree {k}"))?);
        }
        maps.insert(k, Matrix::from_cols(t.dim(), cols));
    }
    ChainMap::new(source.complex.clone(), target.complex.clone(), maps).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::exterior_d;

    #[test]
    fn round_trip_and_d_matrix() {
        let p = Patch::standard(2);
        let f0 = FormSpace::by_weight(&p, 0, 2);
        let f1 = FormSpace::by_weight(&p, 1, 2);
        assert_eq!(f0.dim(), 6);
        assert_eq!(f1.dim(), 6);
        let a = f0.combine(&(0..6).map(|i| Rational::from_int(i as i64)).collect::<Vec<_>>());
        assert_eq!(f0.combine(&f0.coords(&a).unwrap()), a);
        let d = f0.matrix_to(&f1, exterior_d);
        assert_eq!(d.rank(), 5);
    }
}
