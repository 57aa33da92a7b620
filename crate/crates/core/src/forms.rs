//! Polynomial differential forms and multivector fields on a coordinate patch.

use crate::poly::{make_vars, Poly, PolyError, Vars};
use crate::rational::Rational;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("patch mismatch")]
    PatchMismatch,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Precondition(String),
}

/// A coordinate chart ℝ^N with named coordinates.
#[derive(Clone)]
pub struct Patch {
    vars: Vars,
}

impl Patch {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Patch, FormError> {
        if names.is_empty() {
            return Err(FormError::InvalidPatch("at least one coordinate required".into()));
        }
        if names.len() > 16 {
            return Err(FormError::InvalidPatch("at most 16 coordinates supported".into()));
        }
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref();
            let ok =
                n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(FormError::InvalidPatch(format!("bad coordinate name `{n}`")));
            }
            if names[..i].iter().any(|m| m.as_ref() == n) {
                return Err(FormError::InvalidPatch(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Patch { vars: make_vars(names) })
    }

    /// Standard patch with coordinates x, y, z, w (then x5, x6, ...).
    pub fn standard(dim: usize) -> Patch {
        let names: Vec<String> = (0..dim)
            .map(|i| match i {
                0 => "x".to_string(),
                1 => "y".to_string(),
                2 => "z".to_string(),
                3 => "w".to_string(),
                _ => format!("x{}", i + 1),
            })
            .collect();
        Patch::new(&names).expect("standard names are valid")
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn names(&self) -> &[String] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn coord(&self, i: usize) -> Poly {
        Poly::var(&self.vars, i)
    }

    pub fn zero_poly(&self) -> Poly {
        Poly::zero(&self.vars)
    }

    pub fn constant(&self, c: Rational) -> Poly {
        Poly::constant(&self.vars, c)
    }

    pub fn poly(&self, text: &str) -> Result<Poly, FormError> {
        Ok(Poly::parse(text, &self.vars)?)
    }
}

impl PartialEq for Patch {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars[..] == other.vars[..]
    }
}

impl Eq for Patch {}

impl fmt::Debug for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Patch({})", self.vars.join(","))
    }
}

/// Distinguishes forms (`dx`) from multivectors (`Dx`).
pub trait Kind: Clone + Send + Sync + 'static {
    const MARKER: char;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormKind;
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorKind;

impl Kind for FormKind {
    const MARKER: char = 'd';
}

impl Kind for VectorKind {
    const MARKER: char = 'D';
}

/// Strictly increasing index subsets are stored as bitmasks.
pub type IndexSet = u32;

pub fn indices(mask: IndexSet) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn mask_of(idx: &[usize]) -> IndexSet {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

/// Number of elements of `mask` strictly below `i`.
pub fn count_below(mask: IndexSet, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

/// Sign of `e_I ∧ e_J` relative to `e_{I∪J}`, or `None` when the sets meet.
pub fn wedge_sign(a: IndexSet, b: IndexSet) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        swaps += (a >> (j + 1)).count_ones();
    }
    Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
}

/// Homogeneous alternating tensor with polynomial coefficients.
#[derive(Clone)]
pub struct Graded<K: Kind> {
    patch: Patch,
    degree: usize,
    terms: BTreeMap<IndexSet, Poly>,
    _kind: PhantomData<K>,
}

pub type PolyForm = Graded<FormKind>;
pub type PolyMultivector = Graded<VectorKind>;

impl<K: Kind> PartialEq for Graded<K> {
    fn eq(&self, other: &Self) -> bool {
        self.patch == other.patch && self.degree == other.degree && self.terms == other.terms
    }
}

impl<K: Kind> Eq for Graded<K> {}

impl<K: Kind> Graded<K> {
    pub fn zero(patch: &Patch, degree: usize) -> Self {
        Graded { patch: patch.clone(), degree, terms: BTreeMap::new(), _kind: PhantomData }
    }

    /// Degree-0 element given by a function.
    pub fn function(patch: &Patch, f: Poly) -> Self {
        Self::basis(patch, &[], f)
    }

    pub fn constant(patch: &Patch, c: Rational) -> Self {
        Self::function(patch, patch.constant(c))
    }

    /// `f · e_{i1} ∧ … ∧ e_{ik}` for an arbitrary (unsorted, possibly repeating) index list.
    pub fn basis(patch: &Patch, idx: &[usize], f: Poly) -> Self {
        let mut out = Self::zero(patch, idx.len());
        let mut mask = 0;
        let mut sign = 1;
        for &i in idx {
            assert!(i < patch.dim(), "index out of range");
            match wedge_sign(mask, 1 << i) {
                Some(s) => sign *= s,
                None => return out,
            }
            mask |= 1 << i;
        }
        let f = f.embed(patch.vars()).expect("coefficient variables must belong to the patch");
        let f = if sign < 0 { -&f } else { f };
        out.add_term(mask, &f);
        out
    }

    /// Coordinate basis element `e_i` (a one-form `dx^i` or a field `∂_i`).
    pub fn unit(patch: &Patch, i: usize) -> Self {
        Self::basis(patch, &[i], Poly::one(patch.vars()))
    }

    pub fn from_terms(patch: &Patch, degree: usize, terms: impl IntoIterator<Item = (IndexSet, Poly)>) -> Self {
        let mut out = Self::zero(patch, degree);
        for (m, f) in terms {
            assert_eq!(m.count_ones() as usize, degree, "index set size");
            out.add_term(m, &f);
        }
        out
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mask: IndexSet) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| self.patch.zero_poly())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum polynomial degree of the coefficients.
    pub fn poly_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(|p| p.degree()).max()
    }

    /// The coefficient of a degree-0 element.
    pub fn as_function(&self) -> Poly {
        assert_eq!(self.degree, 0, "not a degree-0 element");
        self.coeff(0)
    }

    pub(crate) fn add_term(&mut self, mask: IndexSet, f: &Poly) {
        if f.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(g) => {
                *g += f;
                if g.is_zero() {
                    self.terms.remove(&mask);
                }
            }
            None => {
                self.terms.insert(mask, f.clone());
            }
        }
    }

    /// Sum; a zero summand is absorbed whatever its nominal degree.
    pub fn add(&self, other: &Self) -> Self {
        assert!(self.patch == other.patch, "patch mismatch");
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(*m, f);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.patch, self.degree);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, f)| (*m, f.scale(c))).collect();
        out
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&Rational::from_int(c))
    }

    pub fn mul_poly(&self, g: &Poly) -> Self {
        let mut out = Self::zero(&self.patch, self.degree);
        for (m, f) in &self.terms {
            out.add_term(*m, &(f * g));
        }
        out
    }

    pub fn map_coeffs(&self, mut op: impl FnMut(&Poly) -> Poly) -> Self {
        let mut out = Self::zero(&self.patch, self.degree);
        for (m, f) in &self.terms {
            out.add_term(*m, &op(f));
        }
        out
    }

    /// Exterior product (of forms, or of multivectors).
    pub fn wedge(&self, other: &Self) -> Self {
        assert!(self.patch == other.patch, "patch mismatch");
        let mut out = Self::zero(&self.patch, self.degree + other.degree);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                if let Some(s) = wedge_sign(*a, *b) {
                    let c = f * g;
                    out.add_term(a | b, &if s < 0 { -&c } else { c });
                }
            }
        }
        out
    }

    pub fn try_wedge(&self, other: &Self) -> Result<Self, FormError> {
        if self.patch != other.patch {
            return Err(FormError::PatchMismatch);
        }
        Ok(self.wedge(other))
    }

    /// Coefficients evaluated at a point.
    pub fn eval_at(&self, point: &[Rational]) -> BTreeMap<IndexSet, Rational> {
        self.terms.iter().map(|(m, f)| (*m, f.eval(point).expect("point dimension"))).filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn eval_at_origin(&self) -> BTreeMap<IndexSet, Rational> {
        self.eval_at(&vec![Rational::zero(); self.patch.dim()])
    }

    fn basis_text(&self, mask: IndexSet) -> String {
        indices(mask).into_iter().map(|i| format!("{}{}", K::MARKER, self.patch.names()[i])).collect::<Vec<_>>().join("^")
    }

    pub fn parse(patch: &Patch, text: &str) -> Result<Self, FormError> {
        parse_graded(patch, text, None)
    }

    pub fn parse_with_degree(patch: &Patch, text: &str, degree: usize) -> Result<Self, FormError> {
        parse_graded(patch, text, Some(degree))
    }
}

impl<K: Kind> fmt::Display for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if self.degree == 0 {
            return write!(f, "{}", self.coeff(0));
        }
        let mut keys: Vec<IndexSet> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| indices(*m));
        for (n, m) in keys.into_iter().enumerate() {
            let c = &self.terms[&m];
            let basis = self.basis_text(m);
            if c.num_terms() == 1 {
                let (e, a) = c.terms().next().unwrap();
                let mono = Poly::monomial_text(c.vars(), e);
                let body = match Poly::term_text(&a.abs(), &mono) {
                    t if t == "1" => basis.clone(),
                    t => format!("{t} {basis}"),
                };
                match (n, a.is_negative()) {
                    (0, false) => write!(f, "{body}")?,
                    (0, true) => write!(f, "-{body}")?,
                    (_, false) => write!(f, " + {body}")?,
                    (_, true) => write!(f, " - {body}")?,
                }
            } else {
                let sep = if n == 0 { "" } else { " + " };
                write!(f, "{sep}({c}) {basis}")?;
            }
        }
        Ok(())
    }
}

impl<K: Kind> fmt::Debug for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; deg {}] {}", K::MARKER, self.degree, self)
    }
}

fn split_top_level(text: &str) -> Result<Vec<(bool, String)>, FormError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut neg = false;
    let mut pending_sign = false;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(FormError::Parse("unbalanced `)`".into()));
                }
                cur.push(c);
            }
            '+' | '-' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push((neg, std::mem::take(&mut cur)));
                } else if pending_sign || !out.is_empty() {
                    return Err(FormError::Parse("dangling sign".into()));
                }
                neg = c == '-';
                pending_sign = true;
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(FormError::Parse("unbalanced `(`".into()));
    }
    if cur.trim().is_empty() {
        return Err(FormError::Parse("empty term".into()));
    }
    out.push((neg, cur));
    Ok(out)
}

fn parse_basis<K: Kind>(patch: &Patch, tok: &str) -> Option<Vec<usize>> {
    if patch.index_of(tok).is_some() {
        return None;
    }
    let mut idx = Vec::new();
    for piece in tok.split('^') {
        let name = piece.strip_prefix(K::MARKER)?;
        idx.push(patch.index_of(name)?);
    }
    Some(idx)
}

fn parse_graded<K: Kind>(patch: &Patch, text: &str, degree: Option<usize>) -> Result<Graded<K>, FormError> {
    let mut terms: Vec<Graded<K>> = Vec::new();
    for (neg, body) in split_top_level(text)? {
        let body = body.trim();
        let (coef_text, idx) = match body.rsplit_once(char::is_whitespace) {
            Some((head, tail)) => match parse_basis::<K>(patch, tail) {
                Some(idx) => (head.trim(), idx),
                None => (body, vec![]),
            },
            None => match parse_basis::<K>(patch, body) {
                Some(idx) => ("1", idx),
                None => (body, vec![]),
            },
        };
        if idx.len() > patch.dim() {
            return Err(FormError::Parse("degree exceeds dimension".into()));
        }
        let mut c = Poly::parse(coef_text, patch.vars())?;
        if neg {
            c = -&c;
        }
        terms.push(Graded::<K>::basis(patch, &idx, c));
    }
    let nonzero_degree = terms.iter().find(|t| !t.is_zero()).map(|t| t.degree);
    let deg = match (nonzero_degree, degree) {
        (Some(d), Some(h)) if d != h => return Err(FormError::DegreeMismatch { expected: h, found: d }),
        (Some(d), _) => d,
        (None, Some(h)) => h,
        (None, None) => terms.iter().map(|t| t.degree).max().unwrap_or(0),
    };
    let mut out = Graded::zero(patch, deg);
    for t in terms.into_iter().filter(|t| !t.is_zero()) {
        if t.degree != deg {
            return Err(FormError::DegreeMismatch { expected: deg, found: t.degree });
        }
        out = out.add(&t);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r3() -> Patch {
        Patch::standard(3)
    }

    #[test]
    fn print_parse_round_trip() {
        let p = r3();
        let a = PolyForm::parse(&p, "x^2*y dx^dy + 3 dz").unwrap_err();
        assert!(matches!(a, FormError::DegreeMismatch { .. }));
        let a = PolyForm::parse(&p, "x^2*y dx^dy + 3 dx^dz - (x + y) dy^dz").unwrap();
        let s = a.to_string();
        assert_eq!(s, "x^2*y dx^dy + 3 dx^dz + (-x - y) dy^dz");
        assert_eq!(PolyForm::parse(&p, &s).unwrap(), a);
        let v = PolyMultivector::parse(&p, "x Dy - y Dx").unwrap();
        assert_eq!(v.to_string(), "-y Dx + x Dy");
        assert_eq!(PolyMultivector::parse(&p, &v.to_string()).unwrap(), v);
    }

    #[test]
    fn reordered_basis_gets_sign() {
        let p = r3();
        let a = PolyForm::parse(&p, "dy^dx").unwrap();
        assert_eq!(a, PolyForm::parse(&p, "-1 dx^dy").unwrap());
        assert!(PolyForm::parse(&p, "dx^dx").unwrap().is_zero());
    }

    #[test]
    fn zero_and_functions() {
        let p = r3();
        let z = PolyForm::parse_with_degree(&p, "0", 2).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 2);
        let f = PolyForm::parse(&p, "3/2*x^2*y - 1*z").unwrap();
        assert_eq!(f.degree(), 0);
        assert_eq!(f.to_string(), "3/2*x^2*y - z");
    }
}
