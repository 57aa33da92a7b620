//! Finite box covers, the Čech–de Rham total complex, real Deligne cocycles and the
//! collation operators `K`, `H`, `ĵ`.
//!
//! A form on an intersection `U_{α0…αi}` is stored as a global polynomial expression, so
//! restriction is the identity on expressions. Cochains are alternating and stored on
//! strictly increasing simplices.

use crate::calculus::{exterior_d, interior, lie_derivative};
use crate::complex::ChainComplexFD;
use crate::fd::{flat_graded, Flat, FormSpace};
use crate::forms::{Patch, PolyForm, PolyMultivector};
use crate::linalg::Matrix;
use crate::linfty::Linear;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

pub type Simplex = Vec<usize>;

/// Largest number of opens accepted by [`Cover::new`].
pub const MAX_OPENS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CechError {
    #[error("a cover needs between 1 and {MAX_OPENS} opens")]
    OpenCount,
    #[error("open {name} has {found} sides, expected {expected}")]
    Sides { name: String, expected: usize, found: usize },
    #[error("open {0} is empty")]
    EmptyOpen(String),
    #[error("simplex {0:?} is not in the nerve")]
    NotInNerve(Simplex),
    #[error("component on {simplex:?} has form degree {found}, expected {expected}")]
    ComponentDegree { simplex: Simplex, expected: usize, found: usize },
    #[error("expected {expected} partition weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("partition weights sum to {0}, not 1")]
    WeightSum(String),
    #[error("collation needs a nerve containing every simplex on the opens")]
    NerveNotFull,
    #[error("cocycle relation {relation} fails on {simplex:?}: residual {residual}")]
    Relation { relation: String, simplex: Simplex, residual: String },
}

/// Open interval `(lo, hi)`; a missing endpoint is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Self {
        Interval { lo, hi }
    }

    pub fn all() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(a), Some(b)) if a >= b)
    }

    pub fn meet(&self, other: &Interval) -> Interval {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), |r| r.to_string());
        let hi = self.hi.as_ref().map_or("inf".to_string(), |r| r.to_string());
        write!(f, "({lo}, {hi})")
    }
}

/// Product of open intervals, one per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxRegion {
    pub name: String,
    pub sides: Vec<Interval>,
}

impl BoxRegion {
    pub fn new(name: &str, sides: Vec<Interval>) -> Self {
        BoxRegion { name: name.to_string(), sides }
    }

    pub fn whole(name: &str, dim: usize) -> Self {
        BoxRegion::new(name, vec![Interval::all(); dim])
    }

    pub fn is_empty(&self) -> bool {
        self.sides.iter().any(Interval::is_empty)
    }

    pub fn meet(&self, other: &BoxRegion) -> BoxRegion {
        let sides = self.sides.iter().zip(&other.sides).map(|(a, b)| a.meet(b)).collect();
        BoxRegion { name: format!("{}&{}", self.name, other.name), sides }
    }
}

/// A finite cover of a patch by boxes, with its nerve.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    patch: Patch,
    opens: Vec<BoxRegion>,
    nerve: Vec<Vec<Simplex>>,
    members: HashSet<Simplex>,
}

impl Cover {
    pub fn new(patch: &Patch, opens: Vec<BoxRegion>) -> Result<Cover, CechError> {
        if opens.is_empty() || opens.len() > MAX_OPENS {
            return Err(CechError::OpenCount);
        }
        for o in &opens {
            if o.sides.len() != patch.dim() {
                return Err(CechError::Sides { name: o.name.clone(), expected: patch.dim(), found: o.sides.len() });
            }
            if o.is_empty() {
                return Err(CechError::EmptyOpen(o.name.clone()));
            }
        }
        let k = opens.len();
        let mut nerve: Vec<Vec<Simplex>> = vec![Vec::new(); k];
        for mask in 1u32..(1 << k) {
            let s: Simplex = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let meet = s[1..].iter().fold(opens[s[0]].clone(), |acc, &i| acc.meet(&opens[i]));
            if !meet.is_empty() {
                nerve[s.len() - 1].push(s);
            }
        }
        for level in &mut nerve {
            level.sort();
        }
        while nerve.last().is_some_and(|l| l.is_empty()) {
            nerve.pop();
        }
        let members = nerve.iter().flatten().cloned().collect();
        Ok(Cover { patch: patch.clone(), opens, nerve, members })
    }

    /// The cover by the whole patch.
    pub fn trivial(patch: &Patch) -> Cover {
        Cover::new(patch, vec![BoxRegion::whole("X", patch.dim())]).expect("one nonempty open")
    }

    pub fn patch(&self) -> &Patch {
        &self.patch
    }

    pub fn opens(&self) -> &[BoxRegion] {
        &self.opens
    }

    pub fn len(&self) -> usize {
        self.opens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opens.is_empty()
    }

    /// The `i`-simplices of the nerve.
    pub fn simplices(&self, i: usize) -> &[Simplex] {
        self.nerve.get(i).map_or(&[], |l| l.as_slice())
    }

    pub fn max_dim(&self) -> usize {
        self.nerve.len() - 1
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.members.contains(s)
    }

    /// Whether every nonempty set of opens has nonempty intersection.
    pub fn is_full(&self) -> bool {
        self.members.len() + 1 == 1 << self.opens.len()
    }

    /// The restriction `res(a)`: `a` on every open.
    pub fn res(&self, a: &PolyForm) -> TotElement {
        let mut t = TotElement::zero(a.degree());
        for s in self.simplices(0) {
            t.insert(s.clone(), a.clone());
        }
        t
    }

    /// Čech differential `(δc)_τ = Σ_j (−1)^j c_{τ∖j}`.
    pub fn delta(&self, t: &TotElement) -> TotElement {
        let mut out = TotElement::zero(t.degree + 1);
        let levels: HashSet<usize> = t.comps.keys().map(|s| s.len()).collect();
        for len in levels {
            for tau in self.simplices(len) {
                for j in 0..tau.len() {
                    let mut face = tau.clone();
                    face.remove(j);
                    if let Some(c) = t.comps.get(&face) {
                        out.insert(tau.clone(), if j % 2 == 0 { c.clone() } else { c.neg() });
                    }
                }
            }
        }
        out
    }

    /// Signed de Rham differential `D″ = (−1)^i d` on Čech degree `i`.
    pub fn d_signed(&self, t: &TotElement) -> TotElement {
        t.map(t.degree + 1, |s, a| {
            let da = exterior_d(a);
            if s.len() % 2 == 1 {
                da
            } else {
                da.neg()
            }
        })
    }

    /// `d_Tot = δ + (−1)^i d`.
    pub fn d_tot(&self, t: &TotElement) -> TotElement {
        self.delta(t).add(&self.d_signed(t))
    }

    /// `d_Tot` on the total complex of `Ω^{≤cutoff}`.
    pub fn d_tot_cut(&self, t: &TotElement, cutoff: Option<usize>) -> TotElement {
        let out = self.d_tot(t);
        match cutoff {
            Some(c) => out.truncate(c),
            None => out,
        }
    }

    fn check_element(&self, t: &TotElement) -> Result<(), CechError> {
        for (s, a) in &t.comps {
            if !self.contains(s) {
                return Err(CechError::NotInNerve(s.clone()));
            }
            let expected = t.degree + 1 - s.len();
            if a.degree() != expected {
                return Err(CechError::ComponentDegree { simplex: s.clone(), expected, found: a.degree() });
            }
        }
        Ok(())
    }
}

/// Element `Σ_i θ^{m−i}` of `Tot^m`, with `θ^{m−i}` a Čech `i`-cochain of `(m−i)`-forms.
#[derive(Clone, PartialEq, Eq)]
pub struct TotElement {
    degree: usize,
    comps: BTreeMap<Simplex, PolyForm>,
}

impl TotElement {
    pub fn zero(degree: usize) -> Self {
        TotElement { degree, comps: BTreeMap::new() }
    }

    /// Builds an element from components on sorted simplices.
    pub fn from_components(degree: usize, comps: impl IntoIterator<Item = (Simplex, PolyForm)>) -> Self {
        let mut t = TotElement::zero(degree);
        for (s, a) in comps {
            t.insert(s, a);
        }
        t
    }

    /// Validates components against the nerve of `cover`.
    pub fn on_cover(cover: &Cover, degree: usize, comps: impl IntoIterator<Item = (Simplex, PolyForm)>) -> Result<Self, CechError> {
        let t = TotElement::from_components(degree, comps);
        cover.check_element(&t)?;
        Ok(t)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, s: &[usize]) -> Option<&PolyForm> {
        self.comps.get(s)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Simplex, &PolyForm)> {
        self.comps.iter()
    }

    /// Adds `a` to the component on `s`.
    pub fn insert(&mut self, s: Simplex, a: PolyForm) {
        if a.is_zero() {
            return;
        }
        assert!(s.windows(2).all(|w| w[0] < w[1]), "simplex must be strictly increasing");
        assert_eq!(a.degree() + s.len(), self.degree + 1, "component degree");
        let sum = match self.comps.remove(&s) {
            Some(b) => b.add(&a),
            None => a,
        };
        if !sum.is_zero() {
            self.comps.insert(s, sum);
        }
    }

    /// The part of Čech degree `i`.
    pub fn cech_part(&self, i: usize) -> TotElement {
        let comps = self.comps.iter().filter(|(s, _)| s.len() == i + 1).map(|(s, a)| (s.clone(), a.clone()));
        TotElement::from_components(self.degree, comps)
    }

    /// Applies `op` to every component, producing an element of degree `degree`.
    pub fn map(&self, degree: usize, op: impl Fn(&Simplex, &PolyForm) -> PolyForm) -> TotElement {
        let mut out = TotElement::zero(degree);
        for (s, a) in &self.comps {
            out.insert(s.clone(), op(s, a));
        }
        out
    }

    /// Componentwise `ι_U`.
    pub fn interior(&self, u: &PolyMultivector) -> TotElement {
        let Some(deg) = self.degree.checked_sub(u.degree()) else { return TotElement::zero(0) };
        self.map(deg, |_, a| interior(u, a))
    }

    /// Componentwise `L_U`.
    pub fn lie(&self, u: &PolyMultivector) -> TotElement {
        let Some(deg) = (self.degree + 1).checked_sub(u.degree()) else { return TotElement::zero(0) };
        self.map(deg, |_, a| lie_derivative(u, a))
    }

    /// Drops components of form degree above `cutoff`.
    pub fn truncate(&self, cutoff: usize) -> TotElement {
        let comps = self.comps.iter().filter(|(_, a)| a.degree() <= cutoff).map(|(s, a)| (s.clone(), a.clone()));
        TotElement::from_components(self.degree, comps)
    }

    /// Largest form degree among nonzero components.
    pub fn max_form_degree(&self) -> Option<usize> {
        self.comps.values().map(|a| a.degree()).max()
    }

    /// Largest weight (coefficient degree plus form degree) of a term.
    pub fn weight(&self) -> Option<u32> {
        self.comps.values().filter_map(|a| a.poly_degree().map(|d| d + a.degree() as u32)).max()
    }

    /// Whether every term has weight exactly `w`.
    /// Sparse coordinates under the given summand tag, keyed by simplex.
    pub fn flat(&self, tag: u8) -> Flat {
        self.comps.iter().flat_map(|(s, a)| flat_graded(tag, s, a)).collect()
    }

    pub fn is_homogeneous(&self, w: u32) -> bool {
        self.comps.values().all(|a| a.terms().all(|(_, f)| f.homogeneous_parts().keys().all(|&d| d + a.degree() as u32 == w)))
    }
}

impl Linear for TotElement {
    fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let mut out = self.clone();
        for (s, a) in &other.comps {
            out.insert(s.clone(), a.clone());
        }
        out
    }

    fn scale(&self, c: &Rational) -> Self {
        self.map(self.degree, |_, a| a.scale(c))
    }

    fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
}

impl fmt::Debug for TotElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tot^{}{{", self.degree)?;
        for (k, (s, a)) in self.comps.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s:?}: {a}")?;
        }
        write!(f, "}}")
    }
}

/// Real-presentation Čech–Deligne data `Ā = Σ_i A^{n−i}`, `A^{n−i}` a Čech `i`-cochain.
#[derive(Debug, Clone)]
pub struct DeligneCocycle {
    cover: Cover,
    n: usize,
    a: TotElement,
}

impl DeligneCocycle {
    pub fn new(cover: &Cover, n: usize, a: TotElement) -> Result<Self, CechError> {
        let a = if a.is_zero() { TotElement::zero(n) } else { a };
        if a.degree != n {
            let (s, f) = a.comps.iter().next().expect("nonzero");
            return Err(CechError::ComponentDegree { simplex: s.clone(), expected: n + 1 - s.len(), found: f.degree() });
        }
        cover.check_element(&a)?;
        Ok(DeligneCocycle { cover: cover.clone(), n, a })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> &TotElement {
        &self.a
    }

    /// `A^{n−i}`.
    pub fn component(&self, i: usize) -> TotElement {
        self.a.cech_part(i)
    }

    /// `Ā(m) = Σ_i (−1)^{mi} A^{n−i}`.
    pub fn twisted(&self, m: usize) -> TotElement {
        if m.is_multiple_of(2) {
            return self.a.clone();
        }
        self.a.map(self.n, |s, f| if s.len() % 2 == 1 { f.clone() } else { f.neg() })
    }

    /// Checks `dA^n = ω`, `δA^{n−i} = (−1)^i dA^{n−i−1}` and that `δA^0` is constant.
    pub fn check(&self, omega: &PolyForm) -> Result<(), CechError> {
        let r = self.cover.d_tot(&self.a).sub(&self.cover.res(omega));
        for (s, f) in r.components() {
            let i = s.len() - 1;
            let relation = if i == 0 {
                "dA^n = omega".to_string()
            } else if i <= self.n {
                format!("delta A^{} = (-1)^{} d A^{}", self.n + 1 - i, i - 1, self.n - i)
            } else {
                if f.degree() == 0 && f.as_function().degree().is_none_or(|d| d == 0) {
                    continue;
                }
                "delta A^0 constant".to_string()
            };
            return Err(CechError::Relation { relation, simplex: s.clone(), residual: f.to_string() });
        }
        Ok(())
    }
}

/// Collation data of a cover with full nerve: polynomial weights `ρ_α` with `Σ ρ_α = 1`.
#[derive(Debug, Clone)]
pub struct Collation {
    cover: Cover,
    weights: Vec<Poly>,
}

impl Collation {
    pub fn new(cover: &Cover, weights: Vec<Poly>) -> Result<Self, CechError> {
        if weights.len() != cover.len() {
            return Err(CechError::WeightCount { expected: cover.len(), found: weights.len() });
        }
        let vars = cover.patch().vars();
        let mut sum = Poly::zero(vars);
        for w in &weights {
            sum += w;
        }
        if sum != Poly::one(vars) {
            return Err(CechError::WeightSum(sum.to_string()));
        }
        if !cover.is_full() {
            return Err(CechError::NerveNotFull);
        }
        Ok(Collation { cover: cover.clone(), weights })
    }

    /// The single weight `1` on a trivial cover.
    pub fn trivial(cover: &Cover) -> Result<Self, CechError> {
        let one = Poly::one(cover.patch().vars());
        let mut ws = vec![Poly::zero(cover.patch().vars()); cover.len()];
        if let Some(w) = ws.first_mut() {
            *w = one;
        }
        Collation::new(cover, ws)
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn weights(&self) -> &[Poly] {
        &self.weights
    }

    /// `(Kθ)_σ = Σ_α ρ_α θ_{α σ}` on one Čech degree; the empty simplex holds global forms.
    fn k(&self, piece: &BTreeMap<Simplex, PolyForm>) -> BTreeMap<Simplex, PolyForm> {
        let mut out: BTreeMap<Simplex, PolyForm> = BTreeMap::new();
        for (tau, a) in piece {
            for (p, &alpha) in tau.iter().enumerate() {
                let mut sigma = tau.clone();
                sigma.remove(p);
                let mut term = a.mul_poly(&self.weights[alpha]);
                if p % 2 == 1 {
                    term = term.neg();
                }
                let slot = out.remove(&sigma);
                let sum = match slot {
                    Some(b) => b.add(&term),
                    None => term,
                };
                if !sum.is_zero() {
                    out.insert(sigma, sum);
                }
            }
        }
        out
    }

    /// `−D″` on one Čech degree.
    fn minus_d_signed(piece: &BTreeMap<Simplex, PolyForm>) -> BTreeMap<Simplex, PolyForm> {
        piece
            .iter()
            .map(|(s, a)| {
                let da = exterior_d(a);
                (s.clone(), if s.len() % 2 == 1 { da.neg() } else { da })
            })
            .filter(|(_, a)| !a.is_zero())
            .collect()
    }

    /// `(Hθ̄, ĵθ̄)`: `(Hθ̄)_i = Σ_{j>i} K(−D″K)^{j−i−1} θ^{m−j}` and `ĵθ̄ = Σ_j K(−D″K)^j θ^{m−j}`.
    pub fn collate(&self, t: &TotElement) -> (TotElement, PolyForm) {
        let m = t.degree;
        let patch = self.cover.patch();
        let mut h = TotElement::zero(m.saturating_sub(1));
        let mut j_form = PolyForm::zero(patch, m);
        let max_i = t.comps.keys().map(|s| s.len()).max().unwrap_or(0);
        for len in 1..=max_i {
            let piece: BTreeMap<Simplex, PolyForm> = t.comps.iter().filter(|(s, _)| s.len() == len).map(|(s, a)| (s.clone(), a.clone())).collect();
            let mut cur = self.k(&piece);
            loop {
                if let Some(g) = cur.get(&Vec::new()) {
                    j_form = j_form.add(g);
                    break;
                }
                for (s, a) in &cur {
                    h.insert(s.clone(), a.clone());
                }
                if cur.is_empty() {
                    break;
                }
                cur = self.k(&Self::minus_d_signed(&cur));
            }
        }
        (h, j_form)
    }

    pub fn homotopy(&self, t: &TotElement) -> TotElement {
        self.collate(t).0
    }

    pub fn j(&self, t: &TotElement) -> PolyForm {
        self.collate(t).1
    }

    /// Residual of `ĵ ∘ res = id` at `a`.
    pub fn retraction_residual(&self, a: &PolyForm) -> PolyForm {
        self.j(&self.cover.res(a)).sub(a)
    }

    /// Residual of `id − res∘ĵ = d_Tot H + H d_Tot` at `t`.
    pub fn homotopy_residual(&self, t: &TotElement) -> TotElement {
        let c = &self.cover;
        let lhs = t.sub(&c.res(&self.j(t)));
        let rhs = c.d_tot(&self.homotopy(t)).add(&self.homotopy(&c.d_tot(t)));
        lhs.sub(&rhs)
    }

    /// Residual of `d ĵ = ĵ d_Tot` at `t`.
    pub fn chain_residual(&self, t: &TotElement) -> PolyForm {
        exterior_d(&self.j(t)).sub(&self.j(&self.cover.d_tot(t)))
    }
}

/// Finite-dimensional slice of `Tot^m` of weight at most `max_weight`, optionally keeping
/// only form degrees up to `cutoff`.
#[derive(Debug, Clone)]
pub struct TotSpace {
    degree: usize,
    blocks: Vec<(Simplex, FormSpace)>,
    offsets: Vec<usize>,
}

impl TotSpace {
    pub fn by_weight(cover: &Cover, degree: usize, max_weight: u32, cutoff: Option<usize>) -> Self {
        let mut blocks = Vec::new();
        for i in 0..=degree.min(cover.max_dim()) {
            let form_deg = degree - i;
            if form_deg > cover.patch().dim() || cutoff.is_some_and(|c| form_deg > c) {
                continue;
            }
            for s in cover.simplices(i) {
                blocks.push((s.clone(), FormSpace::by_weight(cover.patch(), form_deg, max_weight)));
            }
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for (_, b) in &blocks {
            offsets.push(acc);
            acc += b.dim();
        }
        TotSpace { degree, blocks, offsets }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|(_, b)| b.dim()).sum()
    }

    pub fn element(&self, i: usize) -> TotElement {
        let k = self.offsets.partition_point(|&o| o <= i) - 1;
        let (s, b) = &self.blocks[k];
        TotElement::from_components(self.degree, [(s.clone(), b.element(i - self.offsets[k]))])
    }

    pub fn combine(&self, coords: &[Rational]) -> TotElement {
        assert_eq!(coords.len(), self.dim());
        let mut t = TotElement::zero(self.degree);
        for ((s, b), &o) in self.blocks.iter().zip(&self.offsets) {
            t.insert(s.clone(), b.combine(&coords[o..o + b.dim()]));
        }
        t
    }

    /// Coordinates of `t`, or `None` if `t` leaves the slice.
    pub fn coords(&self, t: &TotElement) -> Option<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.dim()];
        if t.is_zero() {
            return Some(out);
        }
        if t.degree != self.degree {
            return None;
        }
        let mut seen = 0;
        for ((s, b), &o) in self.blocks.iter().zip(&self.offsets) {
            if let Some(a) = t.comps.get(s) {
                let c = b.coords(a)?;
                out[o..o + b.dim()].clone_from_slice(&c);
                seen += 1;
            }
        }
        (seen == t.comps.len()).then_some(out)
    }

    /// Matrix of `op` into `target`; panics if an image leaves `target`.
    pub fn matrix_to(&self, target: &TotSpace, op: impl Fn(&TotElement) -> TotElement) -> Matrix {
        let cols = (0..self.dim()).map(|i| target.coords(&op(&self.element(i))).expect("image leaves the target slice")).collect();
        Matrix::from_cols(target.dim(), cols)
    }
}

/// The weight-`≤ W` total complex, with `Tot^m` placed in homological degree `−m`.
pub fn tot_complex(cover: &Cover, max_weight: u32, cutoff: Option<usize>) -> (ChainComplexFD, Vec<TotSpace>) {
    let top = cover.patch().dim() + cover.max_dim();
    let spaces: Vec<TotSpace> = (0..=top).map(|m| TotSpace::by_weight(cover, m, max_weight, cutoff)).collect();
    let mut labels = BTreeMap::new();
    let mut d = BTreeMap::new();
    for (m, s) in spaces.iter().enumerate() {
        labels.insert(-(m as i32), (0..s.dim()).map(|i| format!("t{m}.{i}")).collect());
        if m < top {
            d.insert(-(m as i32), s.matrix_to(&spaces[m + 1], |t| cover.d_tot_cut(t, cutoff)));
        }
    }
    let c = ChainComplexFD::with_labels(labels, d).expect("shapes agree");
    (c, spaces)
}

/// Dimensions of `H^m` of the weight-`≤ W` total complex.
pub fn truncated_tot_cohomology(cover: &Cover, max_weight: u32) -> BTreeMap<usize, usize> {
    let (c, _) = tot_complex(cover, max_weight, None);
    c.cohomology_dims().into_iter().map(|(k, h)| ((-k) as usize, h)).collect()
}

/// Dimensions of the weight-`≤ W` de Rham cohomology of the patch.
pub fn truncated_de_rham_cohomology(patch: &Patch, max_weight: u32) -> BTreeMap<usize, usize> {
    truncated_tot_cohomology(&Cover::trivial(patch), max_weight)
}

/// Seeded random total-complex elements.
pub struct CechSampler {
    cover: Cover,
    max_deg: u32,
    cutoff: Option<usize>,
    rng: ChaCha8Rng,
}

impl CechSampler {
    pub fn new(cover: &Cover, max_deg: u32, seed: u64) -> Self {
        CechSampler { cover: cover.clone(), max_deg, cutoff: None, rng: sample::seeded(seed) }
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn form(&mut self, degree: usize) -> PolyForm {
        sample::graded(&mut self.rng, self.cover.patch(), degree, self.max_deg, 2)
    }

    pub fn tot(&mut self, degree: usize) -> TotElement {
        let mut t = TotElement::zero(degree);
        let dim = self.cover.patch().dim();
        for i in 0..=degree.min(self.cover.max_dim()) {
            let form_deg = degree - i;
            if form_deg > dim || self.cutoff.is_some_and(|c| form_deg > c) {
                continue;
            }
            for s in self.cover.simplices(i).to_vec() {
                if self.rng.gen_bool(0.75) {
                    let a = self.form(form_deg);
                    t.insert(s, a);
                }
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: Option<i64>, hi: Option<i64>) -> Interval {
        Interval::new(lo.map(Rational::from_int), hi.map(Rational::from_int))
    }

    fn two_box_r1() -> Cover {
        let p = Patch::standard(1);
        Cover::new(&p, vec![BoxRegion::new("U1", vec![iv(None, Some(1))]), BoxRegion::new("U2", vec![iv(Some(0), None)])]).unwrap()
    }

    fn chain_r1() -> Cover {
        let p = Patch::standard(1);
        let opens = vec![
            BoxRegion::new("U1", vec![iv(None, Some(1))]),
            BoxRegion::new("U2", vec![iv(Some(0), Some(3))]),
            BoxRegion::new("U3", vec![iv(Some(2), None)]),
        ];
        Cover::new(&p, opens).unwrap()
    }

    fn form(p: &Patch, s: &str) -> PolyForm {
        PolyForm::parse(p, s).unwrap()
    }

    #[test]
    fn nerves() {
        let c = two_box_r1();
        assert_eq!(c.simplices(0).len(), 2);
        assert_eq!(c.simplices(1), &[vec![0, 1]]);
        assert!(c.is_full());
        let ch = chain_r1();
        assert_eq!(ch.simplices(1), &[vec![0, 1], vec![1, 2]]);
        assert!(!ch.contains(&[0, 2]));
        assert!(!ch.is_full());
        let touching =
            Cover::new(&Patch::standard(1), vec![BoxRegion::new("U1", vec![iv(None, Some(0))]), BoxRegion::new("U2", vec![iv(Some(0), None)])])
                .unwrap();
        assert_eq!(touching.max_dim(), 0);
    }

    #[test]
    fn delta_on_two_opens() {
        let c = two_box_r1();
        let p = c.patch().clone();
        let t = TotElement::from_components(0, [(vec![0], form(&p, "x")), (vec![1], form(&p, "x^2"))]);
        let dt = c.delta(&t);
        assert_eq!(dt.component(&[0, 1]), Some(&form(&p, "x^2 - x")));
        assert!(Cover::trivial(&p).delta(&c.res(&form(&p, "x"))).is_zero());
    }

    #[test]
    fn d_tot_squares_to_zero() {
        let p = Patch::standard(2);
        let opens = vec![
            BoxRegion::new("A", vec![iv(None, Some(1)), Interval::all()]),
            BoxRegion::new("B", vec![iv(Some(0), None), iv(None, Some(1))]),
            BoxRegion::new("C", vec![Interval::all(), iv(Some(0), None)]),
        ];
        let c = Cover::new(&p, opens).unwrap();
        assert!(c.is_full());
        let mut s = CechSampler::new(&c, 2, 7);
        for m in 0..4 {
            let t = s.tot(m);
            assert!(c.d_tot(&c.d_tot(&t)).is_zero());
            assert!(c.delta(&c.delta(&t)).is_zero());
        }
    }

    #[test]
    fn deligne_relations() {
        let p = Patch::standard(2);
        let c = Cover::new(
            &p,
            vec![BoxRegion::new("U1", vec![iv(None, Some(1)), Interval::all()]), BoxRegion::new("U2", vec![iv(Some(0), None), Interval::all()])],
        )
        .unwrap();
        let omega = form(&p, "dx^dy");
        let a =
            TotElement::from_components(1, [(vec![0], form(&p, "x dy")), (vec![1], form(&p, "x dy + y dx + x dy")), (vec![0, 1], form(&p, "x*y"))]);
        let d = DeligneCocycle::new(&c, 1, a.clone()).unwrap();
        d.check(&omega).unwrap();
        assert_eq!(d.twisted(1).component(&[0, 1]), Some(&form(&p, "-x*y")));
        assert_eq!(d.twisted(2), a);
        let bad = a.add(&TotElement::from_components(1, [(vec![0, 1], form(&p, "x"))]));
        let err = DeligneCocycle::new(&c, 1, bad).unwrap().check(&omega).unwrap_err();
        assert!(matches!(err, CechError::Relation { ref relation, .. } if relation.starts_with("delta A^1")));
    }

    #[test]
    fn collation_identities() {
        let c = two_box_r1();
        let p = c.patch().clone();
        let col = Collation::new(&c, vec![p.poly("x").unwrap(), p.poly("1 - x").unwrap()]).unwrap();
        let mut s = CechSampler::new(&c, 2, 3);
        for m in 0..=2 {
            for _ in 0..10 {
                let t = s.tot(m);
                assert!(col.homotopy_residual(&t).is_zero(), "{t:?}");
                assert!(col.chain_residual(&t).is_zero());
            }
        }
        assert!(col.retraction_residual(&form(&p, "x^2 dx")).is_zero());
        assert!(matches!(Collation::new(&c, vec![p.poly("x").unwrap(), p.poly("x").unwrap()]), Err(CechError::WeightSum(_))));
        assert!(matches!(Collation::trivial(&chain_r1()), Err(CechError::NerveNotFull)));
    }

    #[test]
    fn trivial_collation_is_identity() {
        let p = Patch::standard(2);
        let c = Cover::trivial(&p);
        let col = Collation::trivial(&c).unwrap();
        let a = form(&p, "x dy");
        assert!(col.homotopy(&c.res(&a)).is_zero());
        assert_eq!(col.j(&c.res(&a)), a);
    }

    #[test]
    fn cohomology_matches_de_rham() {
        let p = Patch::standard(1);
        let dr = truncated_de_rham_cohomology(&p, 2);
        assert_eq!(dr.get(&0), Some(&1));
        assert!(dr.iter().filter(|(&k, _)| k > 0).all(|(_, &h)| h == 0));
        for c in [two_box_r1(), chain_r1()] {
            let h = truncated_tot_cohomology(&c, 2);
            for (k, v) in &h {
                assert_eq!(*v, dr.get(k).copied().unwrap_or(0), "degree {k}");
            }
            let h0 = truncated_tot_cohomology(&c, 0);
            assert_eq!(h0.values().sum::<usize>(), 1);
        }
    }
}
