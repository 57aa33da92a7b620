//! Finite-dimensional chain complexes (differential of degree −1) with exact matrices.

use crate::linalg::Matrix;
use crate::rational::Rational;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("dimension mismatch in degree {degree}: {msg}")]
    Dimension { degree: i32, msg: String },
    #[error("maps do not share a target")]
    TargetMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainComplexFD {
    labels: BTreeMap<i32, Vec<String>>,
    /// `d[k]`: C_k → C_{k−1}, of shape dim(k−1) × dim(k).
    d: BTreeMap<i32, Matrix>,
}

/// Failure witness of `d∘d = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResidual {
    pub degree: i32,
    pub residual: Matrix,
}

impl ChainComplexFD {
    /// Complex with anonymous basis labels `e0, e1, …`.
    pub fn new(dims: BTreeMap<i32, usize>, d: BTreeMap<i32, Matrix>) -> Result<Self, ComplexError> {
        let labels = dims.into_iter().map(|(k, n)| (k, (0..n).map(|i| format!("e{i}")).collect())).collect();
        ChainComplexFD::with_labels(labels, d)
    }

    pub fn with_labels(labels: BTreeMap<i32, Vec<String>>, d: BTreeMap<i32, Matrix>) -> Result<Self, ComplexError> {
        let c = ChainComplexFD { labels, d };
        for (&k, m) in &c.d {
            if m.rows() != c.dim(k - 1) || m.cols() != c.dim(k) {
                return Err(ComplexError::Dimension {
                    degree: k,
                    msg: format!("d is {}x{}, expected {}x{}", m.rows(), m.cols(), c.dim(k - 1), c.dim(k)),
                });
            }
        }
        Ok(c)
    }

    pub fn zero() -> Self {
        ChainComplexFD { labels: BTreeMap::new(), d: BTreeMap::new() }
    }

    pub fn dim(&self, k: i32) -> usize {
        self.labels.get(&k).map_or(0, |l| l.len())
    }

    pub fn labels(&self, k: i32) -> &[String] {
        self.labels.get(&k).map_or(&[], |l| l.as_slice())
    }

    /// Degrees carrying a nonzero space.
    pub fn degrees(&self) -> Vec<i32> {
        self.labels.iter().filter(|(_, l)| !l.is_empty()).map(|(&k, _)| k).collect()
    }

    fn span(&self) -> Option<(i32, i32)> {
        let ds = self.degrees();
        Some((*ds.first()?, *ds.last()?))
    }

    /// The differential out of degree `k`.
    pub fn d(&self, k: i32) -> Matrix {
        self.d.get(&k).cloned().unwrap_or_else(|| Matrix::zeros(self.dim(k - 1), self.dim(k)))
    }

    pub fn is_complex(&self) -> Result<(), ComplexResidual> {
        let Some((lo, hi)) = self.span() else { return Ok(()) };
        for k in lo + 1..=hi {
            let r = self.d(k - 1).mul(&self.d(k));
            if !r.is_zero() {
                return Err(ComplexResidual { degree: k, residual: r });
            }
        }
        Ok(())
    }

    pub fn cohomology_dims(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        let Some((lo, hi)) = self.span() else { return out };
        for k in lo..=hi {
            let n = self.dim(k);
            let out_rank = self.d(k).rank();
            let in_rank = self.d(k + 1).rank();
            out.insert(k, n - out_rank - in_rank);
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_dims().values().all(|&h| h == 0)
    }

    /// Mapping cone of the identity: `K_k = C_k ⊕ C_{k−1}`, `d(a, b) = (d a + b, −d b)`.
    ///
    /// With this convention `(a, b) ↦ (−1)^{k−1} b` is a chain map onto `C[1]`
    /// (the complex `C[1]_k = C_{k−1}` with the unsigned differential).
    pub fn cone_identity(&self) -> ChainComplexFD {
        self.mapping_cone(&ChainMap::identity(self))
    }

    /// Mapping cone of `f: A → B`: `Cone_k = B_k ⊕ A_{k−1}`, `d(b, a) = (d b + f a, −d a)`.
    pub fn mapping_cone(&self, f: &ChainMap) -> ChainComplexFD {
        let a = &f.source;
        let b = &f.target;
        let mut labels = BTreeMap::new();
        let mut ks: Vec<i32> = b.degrees();
        ks.extend(a.degrees().into_iter().map(|k| k + 1));
        ks.sort();
        ks.dedup();
        for &k in &ks {
            let mut l: Vec<String> = b.labels(k).iter().map(|s| format!("B:{s}")).collect();
            l.extend(a.labels(k - 1).iter().map(|s| format!("A:{s}")));
            labels.insert(k, l);
        }
        let mut d = BTreeMap::new();
        for &k in &ks {
            let (bk, ak1, bk1, ak2) = (b.dim(k), a.dim(k - 1), b.dim(k - 1), a.dim(k - 2));
            let mut m = Matrix::zeros(bk1 + ak2, bk + ak1);
            let db = b.d(k);
            let fa = f.map(k - 1);
            let da = a.d(k - 1);
            for i in 0..bk1 {
                for j in 0..bk {
                    m.set(i, j, db.get(i, j).clone());
                }
                for j in 0..ak1 {
                    m.set(i, bk + j, fa.get(i, j).clone());
                }
            }
            for i in 0..ak2 {
                for j in 0..ak1 {
                    m.set(bk1 + i, bk + j, -da.get(i, j));
                }
            }
            d.insert(k, m);
        }
        ChainComplexFD::with_labels(labels, d).expect("cone dimensions are consistent")
    }

    /// `C[1]_k = C_{k−1}` with the same (unsigned) differential.
    pub fn shift_up(&self) -> ChainComplexFD {
        let labels = self.labels.iter().map(|(&k, l)| (k + 1, l.clone())).collect();
        let d = self.d.iter().map(|(&k, m)| (k + 1, m.clone())).collect();
        ChainComplexFD::with_labels(labels, d).expect("shift preserves shapes")
    }

    /// Chain map from `cone_identity()` onto `shift_up()`: `(a, b) ↦ (−1)^{k−1} b`.
    pub fn cone_projection(&self) -> ChainMap {
        let cone = self.cone_identity();
        let shifted = self.shift_up();
        let mut maps = BTreeMap::new();
        for k in cone.degrees() {
            let (ak, bk) = (self.dim(k), self.dim(k - 1));
            let mut m = Matrix::zeros(bk, ak + bk);
            let s = if (k - 1).rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() };
            for i in 0..bk {
                m.set(i, ak + i, s.clone());
            }
            maps.insert(k, m);
        }
        ChainMap::new(cone, shifted, maps).expect("projection shapes")
    }

    pub fn direct_sum(&self, other: &ChainComplexFD) -> ChainComplexFD {
        let mut ks: Vec<i32> = self.degrees();
        ks.extend(other.degrees());
        ks.sort();
        ks.dedup();
        let mut labels = BTreeMap::new();
        let mut d = BTreeMap::new();
        for &k in &ks {
            let mut l: Vec<String> = self.labels(k).to_vec();
            l.extend(other.labels(k).iter().cloned());
            labels.insert(k, l);
        }
        for &k in &ks {
            d.insert(k, self.d(k).direct_sum(&other.d(k)));
        }
        ChainComplexFD::with_labels(labels, d).expect("direct sum shapes")
    }
}

/// Degreewise linear map between finite-dimensional complexes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMap {
    pub source: ChainComplexFD,
    pub target: ChainComplexFD,
    maps: BTreeMap<i32, Matrix>,
}

impl ChainMap {
    pub fn new(source: ChainComplexFD, target: ChainComplexFD, maps: BTreeMap<i32, Matrix>) -> Result<Self, ComplexError> {
        for (&k, m) in &maps {
            if m.rows() != target.dim(k) || m.cols() != source.dim(k) {
                return Err(ComplexError::Dimension { degree: k, msg: "chain map shape".into() });
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn identity(c: &ChainComplexFD) -> ChainMap {
        let maps = c.degrees().into_iter().map(|k| (k, Matrix::identity(c.dim(k)))).collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &ChainComplexFD, target: &ChainComplexFD) -> ChainMap {
        ChainMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn map(&self, k: i32) -> Matrix {
        self.maps.get(&k).cloned().unwrap_or_else(|| Matrix::zeros(self.target.dim(k), self.source.dim(k)))
    }

    /// Degree where `f d ≠ d f`, if any.
    pub fn chain_defect(&self) -> Option<i32> {
        let mut ks = self.source.degrees();
        ks.extend(self.target.degrees());
        ks.sort();
        ks.dedup();
        ks.into_iter().find(|&k| {
            let lhs = self.map(k - 1).mul(&self.source.d(k));
            let rhs = self.target.d(k).mul(&self.map(k));
            lhs != rhs
        })
    }

    pub fn is_chain_map(&self) -> bool {
        self.chain_defect().is_none()
    }

    pub fn is_surjective(&self) -> bool {
        self.target.degrees().into_iter().all(|k| self.map(k).rank() == self.target.dim(k))
    }

    pub fn is_injective(&self) -> bool {
        self.source.degrees().into_iter().all(|k| self.map(k).rank() == self.source.dim(k))
    }

    pub fn compose(&self, after: &ChainMap) -> ChainMap {
        let mut maps = BTreeMap::new();
        for k in self.source.degrees() {
            maps.insert(k, after.map(k).mul(&self.map(k)));
        }
        ChainMap { source: self.source.clone(), target: after.target.clone(), maps }
    }

    /// Quasi-isomorphism test via acyclicity of the mapping cone.
    pub fn is_quasi_isomorphism(&self) -> bool {
        self.source.mapping_cone(self).is_acyclic()
    }
}

/// Degreewise pullback `{(a, b) : f a = g b}` with its two projections.
pub struct FiberProduct {
    pub complex: ChainComplexFD,
    pub to_a: ChainMap,
    pub to_b: ChainMap,
}

pub fn fiber_product(f: &ChainMap, g: &ChainMap) -> Result<FiberProduct, ComplexError> {
    if f.target != g.target {
        return Err(ComplexError::TargetMismatch);
    }
    let (a, b) = (&f.source, &g.source);
    let mut ks: Vec<i32> = a.degrees();
    ks.extend(b.degrees());
    ks.sort();
    ks.dedup();
    let mut bases: BTreeMap<i32, Matrix> = BTreeMap::new();
    for &k in &ks {
        let constraint = f.map(k).hstack(&g.map(k).scale(&-Rational::one()));
        bases.insert(k, constraint.kernel());
    }
    let basis = |k: i32| bases.get(&k).cloned().unwrap_or_else(|| Matrix::zeros(a.dim(k) + b.dim(k), 0));
    let mut labels = BTreeMap::new();
    for &k in &ks {
        labels.insert(k, (0..basis(k).cols()).map(|i| format!("p{i}")).collect());
    }
    let mut d = BTreeMap::new();
    for &k in &ks {
        let src = basis(k);
        let dst = basis(k - 1);
        let dsum = a.d(k).direct_sum(&b.d(k));
        let mut cols = Vec::with_capacity(src.cols());
        for j in 0..src.cols() {
            let image = dsum.apply(&src.col(j));
            let coords = dst.solve(&image).ok_or(ComplexError::Dimension { degree: k, msg: "differential leaves the pullback".into() })?;
            cols.push(coords);
        }
        d.insert(k, Matrix::from_cols(dst.cols(), cols));
    }
    let complex = ChainComplexFD::with_labels(labels, d)?;
    let mut pa = BTreeMap::new();
    let mut pb = BTreeMap::new();
    for &k in &ks {
        let bk = basis(k);
        let (na, nb) = (a.dim(k), b.dim(k));
        let mut ma = Matrix::zeros(na, bk.cols());
        let mut mb = Matrix::zeros(nb, bk.cols());
        for j in 0..bk.cols() {
            for i in 0..na {
                ma.set(i, j, bk.get(i, j).clone());
            }
            for i in 0..nb {
                mb.set(i, j, bk.get(na + i, j).clone());
            }
        }
        pa.insert(k, ma);
        pb.insert(k, mb);
    }
    Ok(FiberProduct { to_a: ChainMap::new(complex.clone(), a.clone(), pa)?, to_b: ChainMap::new(complex.clone(), b.clone(), pb)?, complex })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(d: i64) -> ChainComplexFD {
        ChainComplexFD::new([(0, 1), (1, 1)].into(), [(1, Matrix::from_ints(&[&[d]]))].into()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(ChainComplexFD::zero().is_complex().is_ok());
        let c = line(1);
        assert!(c.is_complex().is_ok());
        assert_eq!(c.cohomology_dims(), [(0, 0), (1, 0)].into());
        let three =
            ChainComplexFD::new([(0, 1), (1, 1), (2, 1)].into(), [(1, Matrix::from_ints(&[&[1]])), (2, Matrix::from_ints(&[&[1]]))].into()).unwrap();
        let r = three.is_complex().unwrap_err();
        assert_eq!(r.residual, Matrix::from_ints(&[&[1]]));
        let flat = ChainComplexFD::new([(0, 3)].into(), BTreeMap::new()).unwrap();
        assert_eq!(flat.cohomology_dims()[&0], 3);
    }

    #[test]
    fn cones_are_acyclic() {
        let q = ChainComplexFD::new([(0, 1)].into(), BTreeMap::new()).unwrap();
        assert!(q.cone_identity().is_acyclic());
        let z = line(0);
        let k = z.cone_identity();
        assert!(k.is_complex().is_ok());
        assert!(k.is_acyclic());
        let p = z.cone_projection();
        assert!(p.is_chain_map());
        assert!(p.is_surjective());
    }

    #[test]
    fn pullbacks() {
        let a = line(1);
        let id = ChainMap::identity(&a);
        let fp = fiber_product(&id, &id).unwrap();
        assert_eq!(fp.complex.dim(0), 1);
        assert!(fp.to_a.is_chain_map() && fp.to_b.is_chain_map());
        let b = line(0);
        let c = ChainComplexFD::zero();
        let f = ChainMap::zero(&a, &c);
        let g = ChainMap::zero(&b, &c);
        let fp = fiber_product(&f, &g).unwrap();
        assert_eq!(fp.complex.cohomology_dims(), a.direct_sum(&b).cohomology_dims());
    }
}
