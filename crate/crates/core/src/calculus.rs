//! Exterior derivative, contractions, Lie derivatives, the Schouten bracket and
//! the Poincaré homotopy on polynomial forms.

use crate::forms::{count_below, indices, FormError, IndexSet, PolyForm, PolyMultivector};
use crate::perm::neg_one_pow;
use crate::rational::Rational;

fn signed(f: crate::poly::Poly, s: u32) -> crate::poly::Poly {
    if s.is_multiple_of(2) {
        f
    } else {
        -&f
    }
}

pub fn exterior_d(a: &PolyForm) -> PolyForm {
    let patch = a.patch();
    let n = patch.dim();
    let mut out = PolyForm::zero(patch, a.degree() + 1);
    if a.degree() >= n {
        return out;
    }
    for (m, f) in a.terms() {
        for i in 0..n {
            if m & (1 << i) != 0 {
                continue;
            }
            let df = f.partial(i);
            if df.is_zero() {
                continue;
            }
            out.add_term(m | (1 << i), &signed(df, count_below(*m, i)));
        }
    }
    out
}

/// Sign of `ι_{e_I} e^J` (contracting the lowest index first), or `None` unless `I ⊆ J`.
pub fn contraction_sign(i_set: IndexSet, j_set: IndexSet) -> Option<u32> {
    if i_set & !j_set != 0 {
        return None;
    }
    let mut cur = j_set;
    let mut s = 0;
    for i in indices(i_set) {
        s += count_below(cur, i);
        cur &= !(1 << i);
    }
    Some(s)
}

/// `ι_U a`, with `ι_{v1∧…∧vk} = ι_{vk} ∘ … ∘ ι_{v1}`.
pub fn interior(u: &PolyMultivector, a: &PolyForm) -> PolyForm {
    assert!(u.patch() == a.patch(), "patch mismatch");
    if u.degree() > a.degree() {
        return PolyForm::zero(a.patch(), 0);
    }
    let mut out = PolyForm::zero(a.patch(), a.degree() - u.degree());
    for (i_set, f) in u.terms() {
        for (j_set, g) in a.terms() {
            if let Some(s) = contraction_sign(*i_set, *j_set) {
                out.add_term(j_set & !i_set, &signed(f * g, s));
            }
        }
    }
    out
}

pub fn try_interior(u: &PolyMultivector, a: &PolyForm) -> Result<PolyForm, FormError> {
    if u.patch() != a.patch() {
        return Err(FormError::PatchMismatch);
    }
    Ok(interior(u, a))
}

/// Contraction with the wedge of a list of vector fields, applied first to last.
pub fn interior_seq(vs: &[&PolyMultivector], a: &PolyForm) -> PolyForm {
    let mut cur = a.clone();
    for v in vs {
        if cur.degree() == 0 {
            return PolyForm::zero(a.patch(), 0);
        }
        cur = interior(v, &cur);
    }
    cur
}

/// `L_U a = d ι_U a − (−1)^{deg U} ι_U d a`.
pub fn lie_derivative(u: &PolyMultivector, a: &PolyForm) -> PolyForm {
    assert!(u.patch() == a.patch(), "patch mismatch");
    let target = a.degree() as i64 - u.degree() as i64 + 1;
    if target < 0 {
        return PolyForm::zero(a.patch(), 0);
    }
    let first = if u.degree() <= a.degree() { exterior_d(&interior(u, a)) } else { PolyForm::zero(a.patch(), target as usize) };
    let second = if u.degree() <= a.degree() + 1 { interior(u, &exterior_d(a)) } else { PolyForm::zero(a.patch(), target as usize) };
    let second = if u.degree().is_multiple_of(2) { second } else { second.neg() };
    fix_degree(first, target as usize).sub(&fix_degree(second, target as usize))
}

fn fix_degree(a: PolyForm, d: usize) -> PolyForm {
    if a.is_zero() {
        PolyForm::zero(a.patch(), d)
    } else {
        assert_eq!(a.degree(), d);
        a
    }
}

pub fn try_lie_derivative(u: &PolyMultivector, a: &PolyForm) -> Result<PolyForm, FormError> {
    if u.patch() != a.patch() {
        return Err(FormError::PatchMismatch);
    }
    Ok(lie_derivative(u, a))
}

/// Lie bracket of vector fields: `[u, v]^j = u(v^j) − v(u^j)`.
pub fn vector_bracket(u: &PolyMultivector, v: &PolyMultivector) -> PolyMultivector {
    assert!(u.degree() == 1 && v.degree() == 1, "vector fields expected");
    assert!(u.patch() == v.patch(), "patch mismatch");
    let patch = u.patch();
    let mut out = PolyMultivector::zero(patch, 1);
    for (mi, ui) in u.terms() {
        let i = mi.trailing_zeros() as usize;
        for (mj, vj) in v.terms() {
            let j = mj.trailing_zeros() as usize;
            out.add_term(*mj, &(ui * &vj.partial(i)));
            out.add_term(*mi, &-&(vj * &ui.partial(j)));
        }
    }
    out
}

/// Splits one term `f ∂_{i1}∧…∧∂_{ik}` into the decomposable factors `(f∂_{i1}, ∂_{i2}, …)`.
fn factors(u_set: IndexSet, f: &crate::poly::Poly, u: &PolyMultivector) -> Vec<PolyMultivector> {
    let patch = u.patch();
    indices(u_set)
        .into_iter()
        .enumerate()
        .map(|(k, i)| if k == 0 { PolyMultivector::basis(patch, &[i], f.clone()) } else { PolyMultivector::unit(patch, i) })
        .collect()
}

fn wedge_all(patch: &crate::forms::Patch, parts: &[&PolyMultivector]) -> PolyMultivector {
    let mut acc = PolyMultivector::constant(patch, Rational::one());
    for p in parts {
        acc = acc.wedge(p);
    }
    acc
}

/// Schouten bracket, extended from the decomposable formula
/// `[u1∧…∧um, v1∧…∧vn] = Σ (−1)^{i+j} [ui,vj] ∧ u1…ûi…um ∧ v1…v̂j…vn`
/// by writing every coordinate term as a decomposable whose first factor carries the coefficient.
pub fn schouten(u: &PolyMultivector, v: &PolyMultivector) -> PolyMultivector {
    assert!(u.patch() == v.patch(), "patch mismatch");
    assert!(u.degree() >= 1 && v.degree() >= 1, "schouten needs degrees >= 1");
    let patch = u.patch();
    let mut out = PolyMultivector::zero(patch, u.degree() + v.degree() - 1);
    for (us, f) in u.terms() {
        let uf = factors(*us, f, u);
        for (vs, g) in v.terms() {
            let vf = factors(*vs, g, v);
            for i in 0..uf.len() {
                for j in 0..vf.len() {
                    let b = vector_bracket(&uf[i], &vf[j]);
                    if b.is_zero() {
                        continue;
                    }
                    let mut parts: Vec<&PolyMultivector> = vec![&b];
                    parts.extend(uf.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| x));
                    parts.extend(vf.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x));
                    let w = wedge_all(patch, &parts);
                    let w = if (i + j) % 2 == 0 { w } else { w.neg() };
                    if !w.is_zero() {
                        out = out.add(&w);
                    }
                }
            }
        }
    }
    out
}

pub fn try_schouten(u: &PolyMultivector, v: &PolyMultivector) -> Result<PolyMultivector, FormError> {
    if u.patch() != v.patch() {
        return Err(FormError::PatchMismatch);
    }
    if u.degree() == 0 || v.degree() == 0 {
        return Err(FormError::Precondition("schouten bracket needs degrees >= 1".into()));
    }
    Ok(schouten(u, v))
}

/// Wedge of a list of vector fields as a multivector (`1` for the empty list).
pub fn wedge_fields(patch: &crate::forms::Patch, vs: &[&PolyMultivector]) -> PolyMultivector {
    wedge_all(patch, vs)
}

/// Euler vector field `Σ x^i ∂_i`.
pub fn euler_field(patch: &crate::forms::Patch) -> PolyMultivector {
    let mut e = PolyMultivector::zero(patch, 1);
    for i in 0..patch.dim() {
        e = e.add(&PolyMultivector::basis(patch, &[i], patch.coord(i)));
    }
    e
}

/// Poincaré homotopy: on a term with homogeneous coefficient of degree k and form degree p,
/// `h = ι_E / (k + p)`.
pub fn poincare_homotopy(a: &PolyForm) -> Result<PolyForm, FormError> {
    if a.degree() == 0 {
        return Err(FormError::Precondition("poincare homotopy needs a form of degree >= 1".into()));
    }
    let patch = a.patch();
    let e = euler_field(patch);
    let p = a.degree() as i64;
    let mut out = PolyForm::zero(patch, a.degree() - 1);
    for (m, f) in a.terms() {
        for (k, fk) in f.homogeneous_parts() {
            let term = PolyForm::from_terms(patch, a.degree(), [(*m, fk)]);
            let c = Rational::new(1, k as i64 + p);
            out = out.add(&interior(&e, &term).scale(&c));
        }
    }
    Ok(out)
}

/// Whether a form is exact (closed forms are exact on the patch).
pub fn is_exact(a: &PolyForm) -> bool {
    if a.degree() == 0 {
        return a.is_zero();
    }
    exterior_d(a).is_zero()
}

/// Residual of `ι_{[u,v]} a = (−1)^{(deg u − 1) deg v} L_u ι_v a − ι_v L_u a`.
pub fn cartan_commutator_residual(u: &PolyMultivector, v: &PolyMultivector, a: &PolyForm) -> PolyForm {
    let lhs = interior(&schouten(u, v), a);
    let s = neg_one_pow((u.degree() as i64 - 1) * v.degree() as i64);
    let t1 = lie_derivative(u, &interior(v, a));
    let t2 = interior(v, &lie_derivative(u, a));
    let rhs = sum_same(&t1.scale_int(s as i64), &t2.neg());
    sum_same(&lhs, &rhs.neg())
}

/// Sum of two forms allowing either to be a degree-mismatched zero.
pub fn sum_same(a: &PolyForm, b: &PolyForm) -> PolyForm {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    a.add(b)
}

/// Residual of the extended Cartan identity
/// `(−1)^k d ι_{v1…vk} β = Σ_{i<j} (−1)^{i+j} ι_{[vi,vj]∧…} β + Σ_i (−1)^i ι_{…v̂i…} L_{vi} β + ι_{v1…vk} dβ`.
pub fn extended_cartan_residual(beta: &PolyForm, vs: &[PolyMultivector]) -> PolyForm {
    let k = vs.len();
    assert!(k >= 1);
    let patch = beta.patch();
    let all: Vec<&PolyMultivector> = vs.iter().collect();
    let lhs = exterior_d(&interior(&wedge_fields(patch, &all), beta)).scale_int(neg_one_pow(k as i64) as i64);
    let mut rhs = PolyForm::zero(patch, 0);
    for i in 0..k {
        for j in i + 1..k {
            let br = vector_bracket(&vs[i], &vs[j]);
            let mut parts: Vec<&PolyMultivector> = vec![&br];
            parts.extend((0..k).filter(|&l| l != i && l != j).map(|l| &vs[l]));
            let t = interior(&wedge_fields(patch, &parts), beta);
            rhs = sum_same(&rhs, &t.scale_int(neg_one_pow((i + j + 2) as i64) as i64));
        }
    }
    for i in 0..k {
        let parts: Vec<&PolyMultivector> = (0..k).filter(|&l| l != i).map(|l| &vs[l]).collect();
        let t = interior(&wedge_fields(patch, &parts), &lie_derivative(&vs[i], beta));
        rhs = sum_same(&rhs, &t.scale_int(neg_one_pow((i + 1) as i64) as i64));
    }
    rhs = sum_same(&rhs, &interior(&wedge_fields(patch, &all), &exterior_d(beta)));
    sum_same(&lhs, &rhs.neg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Patch;

    fn f(p: &Patch, s: &str) -> PolyForm {
        PolyForm::parse(p, s).unwrap()
    }
    fn v(p: &Patch, s: &str) -> PolyMultivector {
        PolyMultivector::parse(p, s).unwrap()
    }

    #[test]
    fn d_examples() {
        let p = Patch::standard(3);
        assert_eq!(exterior_d(&f(&p, "x dy")), f(&p, "dx^dy"));
        assert_eq!(exterior_d(&f(&p, "x^2 dy^dz")), f(&p, "2*x dx^dy^dz"));
        assert!(exterior_d(&f(&p, "dx^dy")).is_zero());
    }

    #[test]
    fn interior_examples() {
        let p = Patch::standard(3);
        assert_eq!(interior(&v(&p, "Dx"), &f(&p, "dx^dy")), f(&p, "dy"));
        assert_eq!(interior(&v(&p, "Dx^Dy"), &f(&p, "dx^dy")), f(&p, "1"));
        assert_eq!(interior(&v(&p, "Dx^Dy^Dz"), &f(&p, "dx^dy^dz")), f(&p, "1"));
        // ι_{∂x∧∂y} = ι_{∂y} ι_{∂x}
        let step = interior(&v(&p, "Dy"), &interior(&v(&p, "Dx"), &f(&p, "dx^dy^dz")));
        assert_eq!(interior(&v(&p, "Dx^Dy"), &f(&p, "dx^dy^dz")), step);
    }

    #[test]
    fn lie_examples() {
        let p = Patch::standard(3);
        assert_eq!(lie_derivative(&v(&p, "Dx"), &f(&p, "x dy")), f(&p, "dy"));
        assert_eq!(lie_derivative(&v(&p, "x Dx"), &f(&p, "dx")), f(&p, "dx"));
        assert!(lie_derivative(&v(&p, "Dx^Dy"), &f(&p, "dx^dy^dz")).is_zero());
    }

    #[test]
    fn schouten_examples() {
        let p = Patch::standard(3);
        assert!(schouten(&v(&p, "Dx"), &v(&p, "Dy")).is_zero());
        assert_eq!(schouten(&v(&p, "x Dy"), &v(&p, "y Dx")), v(&p, "x Dx - y Dy"));
        assert_eq!(schouten(&v(&p, "Dx^Dy"), &v(&p, "x Dz")), v(&p, "-1 Dy^Dz"));
    }

    #[test]
    fn homotopy_examples() {
        let p = Patch::standard(2);
        assert_eq!(poincare_homotopy(&f(&p, "dx")).unwrap(), f(&p, "x"));
        assert_eq!(poincare_homotopy(&f(&p, "dx^dy")).unwrap(), f(&p, "1/2*x dy - 1/2*y dx"));
        assert_eq!(poincare_homotopy(&f(&p, "y dx")).unwrap(), f(&p, "1/2*x*y"));
        assert!(poincare_homotopy(&f(&p, "x")).is_err());
    }

    #[test]
    fn commutator_examples() {
        let p = Patch::standard(3);
        for (a, b, c) in [("Dx", "Dy", "dx^dy"), ("x Dy", "y Dx", "dx^dy"), ("Dx^Dy", "x Dz", "x dx^dy^dz")] {
            assert!(cartan_commutator_residual(&v(&p, a), &v(&p, b), &f(&p, c)).is_zero());
        }
    }

    #[test]
    fn extended_cartan_examples() {
        let p = Patch::standard(3);
        assert!(extended_cartan_residual(&f(&p, "dx"), &[v(&p, "Dx")]).is_zero());
        assert!(extended_cartan_residual(&f(&p, "x dy^dz"), &[v(&p, "Dx"), v(&p, "Dy")]).is_zero());
        assert!(extended_cartan_residual(&f(&p, "dx^dy^dz"), &[v(&p, "Dx"), v(&p, "Dy"), v(&p, "Dz")]).is_zero());
    }
}
