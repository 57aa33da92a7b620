//! Atiyah and Courant structures for `n = 1, 2`, their Čech models and the morphisms
//! relating them to the observables and the quantomorphisms.

use crate::calculus::{exterior_d, interior, lie_derivative, vector_bracket, wedge_fields};
use crate::cech::{CechSampler, DeligneCocycle, TotElement};
use crate::element::Elt;
use crate::fd::{fd_chain_map, fd_complex, flat_graded, FdComplex, FormSpace};
use crate::forms::{Patch, PolyForm, PolyMultivector};
use crate::linfty::{bracket_or_zero, component_or_zero, LInfty, LInftyMorphism, Linear, Sampler};
use crate::observables::{ObsElem, Observables, PrePlecticPatch};
use crate::quantomorphism::{field_slice, flat_obs, flat_qu, homogeneous_weight, quantomorphism_slice, DgLieQu, QuElem, QuasiIsoReport};
use crate::rational::Rational;
use crate::sample;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Elements `v + θ` in degree 0 and `η` in degree 1, as observables are stored.
pub type CourantElem = Elt<PolyForm>;

fn half() -> Rational {
    Rational::new(1, 2)
}

fn zero_form(patch: &Patch, degree: usize) -> PolyForm {
    PolyForm::zero(patch, degree)
}

/// `ι_{v_1} θ_2 − ι_{v_2} θ_1`.
fn skew_contraction(x: &CourantElem, y: &CourantElem) -> PolyForm {
    interior(&x.v, &y.p).sub(&interior(&y.v, &x.p))
}

/// `⟨v_1 + θ_1, v_2 + θ_2⟩ = ι_{v_1} θ_2 + ι_{v_2} θ_1`.
pub fn pairing(x: &CourantElem, y: &CourantElem) -> PolyForm {
    interior(&x.v, &y.p).add(&interior(&y.v, &x.p))
}

fn check_plectic(p: &PrePlecticPatch, n: usize) -> Result<(), String> {
    if p.n() != n {
        return Err(format!("needs a pre-{n}-plectic patch, got n = {}", p.n()));
    }
    Ok(())
}

/// `atiyah(X, ω)` for presymplectic `ω`: the Lie algebra on `𝔛(X) ⊕ C^∞(X)`.
#[derive(Debug, Clone)]
pub struct AtiyahOne {
    p: PrePlecticPatch,
}

impl AtiyahOne {
    pub fn new(p: &PrePlecticPatch) -> Result<Self, String> {
        check_plectic(p, 1)?;
        Ok(AtiyahOne { p: p.clone() })
    }

    pub fn plectic(&self) -> &PrePlecticPatch {
        &self.p
    }
}

impl LInfty for AtiyahOne {
    type Elem = CourantElem;

    fn degree(&self, x: &CourantElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> CourantElem {
        Elt::pure(self.p.patch(), degree, zero_form(self.p.patch(), 0))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, 0)
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, xs: &[&CourantElem]) -> CourantElem {
        match xs {
            [x, y] => {
                let c = lie_derivative(&x.v, &y.p).sub(&lie_derivative(&y.v, &x.p)).sub(&self.p.contract(&[&x.v, &y.v]));
                Elt::new(0, vector_bracket(&x.v, &y.v), c)
            }
            _ => self.zero(xs.len() as i32 - 2),
        }
    }
}

/// `atiyah(X, ω)` for pre-2-plectic `ω`: `𝔛(X)` in degree 0, `Ω^0(X)` in degree 1.
#[derive(Debug, Clone)]
pub struct AtiyahTwo {
    p: PrePlecticPatch,
}

impl AtiyahTwo {
    pub fn new(p: &PrePlecticPatch) -> Result<Self, String> {
        check_plectic(p, 2)?;
        Ok(AtiyahTwo { p: p.clone() })
    }

    pub fn field(&self, v: PolyMultivector) -> CourantElem {
        Elt::new(0, v, zero_form(self.p.patch(), 0))
    }
}

impl LInfty for AtiyahTwo {
    type Elem = CourantElem;

    fn degree(&self, x: &CourantElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> CourantElem {
        Elt::pure(self.p.patch(), degree, zero_form(self.p.patch(), 0))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, 1)
    }

    fn max_arity(&self) -> usize {
        3
    }

    fn bracket(&self, xs: &[&CourantElem]) -> CourantElem {
        let patch = self.p.patch();
        match xs {
            [x, y] => match (x.degree, y.degree) {
                (0, 0) => self.field(vector_bracket(&x.v, &y.v)),
                (0, 1) => Elt::pure(patch, 1, lie_derivative(&x.v, &y.p)),
                (1, 0) => Elt::pure(patch, 1, lie_derivative(&y.v, &x.p).neg()),
                _ => self.zero(x.degree + y.degree),
            },
            [x, y, z] if x.degree == 0 && y.degree == 0 && z.degree == 0 => Elt::pure(patch, 1, self.p.contract(&[&x.v, &y.v, &z.v]).neg()),
            _ => {
                let deg = xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 2;
                self.zero(deg)
            }
        }
    }
}

/// `courant(X, ω)`: `𝔛(X) ⊕ Ω^1(X)` in degree 0, `Ω^0(X)` in degree 1.
#[derive(Debug, Clone)]
pub struct CourantTwo {
    p: PrePlecticPatch,
}

impl CourantTwo {
    pub fn new(p: &PrePlecticPatch) -> Result<Self, String> {
        check_plectic(p, 2)?;
        Ok(CourantTwo { p: p.clone() })
    }

    pub fn plectic(&self) -> &PrePlecticPatch {
        &self.p
    }

    fn l2_fields(&self, x: &CourantElem, y: &CourantElem) -> CourantElem {
        let theta = lie_derivative(&x.v, &y.p)
            .sub(&lie_derivative(&y.v, &x.p))
            .sub(&exterior_d(&skew_contraction(x, y)).scale(&half()))
            .sub(&self.p.contract(&[&x.v, &y.v]));
        Elt::new(0, vector_bracket(&x.v, &y.v), theta)
    }

    /// `l_3` on degree-0 inputs from the cyclic pairing formula.
    fn l3_fields(&self, x: &CourantElem, y: &CourantElem, z: &CourantElem) -> PolyForm {
        let sum = pairing(&self.l2_fields(x, y), z).add(&pairing(&self.l2_fields(y, z), x)).add(&pairing(&self.l2_fields(z, x), y));
        sum.scale(&Rational::new(-1, 6))
    }
}

impl LInfty for CourantTwo {
    type Elem = CourantElem;

    fn degree(&self, x: &CourantElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> CourantElem {
        let form_deg = if degree == 0 { 1 } else { 0 };
        Elt::pure(self.p.patch(), degree, zero_form(self.p.patch(), form_deg))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, 1)
    }

    fn max_arity(&self) -> usize {
        3
    }

    fn bracket(&self, xs: &[&CourantElem]) -> CourantElem {
        let patch = self.p.patch();
        match xs {
            [x] if x.degree == 1 => Elt::pure(patch, 0, exterior_d(&x.p)),
            [x, y] => match (x.degree, y.degree) {
                (0, 0) => self.l2_fields(x, y),
                (0, 1) => Elt::pure(patch, 1, interior(&x.v, &exterior_d(&y.p)).scale(&half())),
                (1, 0) => Elt::pure(patch, 1, interior(&y.v, &exterior_d(&x.p)).scale(&-half())),
                _ => self.zero(x.degree + y.degree),
            },
            [x, y, z] if x.degree == 0 && y.degree == 0 && z.degree == 0 => Elt::pure(patch, 1, self.l3_fields(x, y, z)),
            _ => {
                let deg = xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 2;
                self.zero(deg)
            }
        }
    }
}

/// `φ: L∞(X, ω) → courant(X, ω)` with `φ_2 = −½(ι_{v_1}θ_2 − ι_{v_2}θ_1)`.
#[derive(Debug, Clone)]
pub struct Phi {
    source: Observables,
    target: CourantTwo,
}

impl Phi {
    pub fn new(p: &PrePlecticPatch) -> Result<Self, String> {
        Ok(Phi { source: Observables::new(p), target: CourantTwo::new(p)? })
    }
}

impl LInftyMorphism for Phi {
    type Source = Observables;
    type Target = CourantTwo;

    fn source(&self) -> &Observables {
        &self.source
    }

    fn target(&self) -> &CourantTwo {
        &self.target
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn component(&self, xs: &[&ObsElem]) -> CourantElem {
        match xs {
            [x] => (*x).clone(),
            [x, y] if x.degree == 0 && y.degree == 0 => Elt::pure(self.target.p.patch(), 1, skew_contraction(x, y).scale(&-half())),
            _ => self.target.zero(xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 1),
        }
    }
}

/// `ψ: courant(X, ω) → atiyah(X, ω)` with `ψ_1(v + θ) = v` and `ψ_2 = φ_2`.
#[derive(Debug, Clone)]
pub struct PsiCourant {
    source: CourantTwo,
    target: AtiyahTwo,
}

impl PsiCourant {
    pub fn new(p: &PrePlecticPatch) -> Result<Self, String> {
        Ok(PsiCourant { source: CourantTwo::new(p)?, target: AtiyahTwo::new(p)? })
    }
}

impl LInftyMorphism for PsiCourant {
    type Source = CourantTwo;
    type Target = AtiyahTwo;

    fn source(&self) -> &CourantTwo {
        &self.source
    }

    fn target(&self) -> &AtiyahTwo {
        &self.target
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn component(&self, xs: &[&CourantElem]) -> CourantElem {
        let patch = self.target.p.patch();
        match xs {
            [x] if x.degree == 0 => self.target.field(x.v.clone()),
            [x] => Elt::pure(patch, x.degree, x.p.clone()),
            [x, y] if x.degree == 0 && y.degree == 0 => Elt::pure(patch, 1, skew_contraction(x, y).scale(&-half())),
            _ => self.target.zero(xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 1),
        }
    }
}

/// `f^c: courant(X, ω) → dgLie_Cou(X, Ā)`.
#[derive(Debug, Clone)]
pub struct FCourant {
    source: CourantTwo,
    target: DgLieQu,
}

impl FCourant {
    pub fn new(target: &DgLieQu) -> Result<Self, String> {
        if target.cutoff() != Some(1) {
            return Err("f^c targets the Ω^{≤1} model".into());
        }
        Ok(FCourant { source: CourantTwo::new(target.plectic())?, target: target.clone() })
    }
}

impl LInftyMorphism for FCourant {
    type Source = CourantTwo;
    type Target = DgLieQu;

    fn source(&self) -> &CourantTwo {
        &self.source
    }

    fn target(&self) -> &DgLieQu {
        &self.target
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn component(&self, xs: &[&CourantElem]) -> QuElem {
        let t = &self.target;
        let cover = t.cover();
        let a = t.cocycle();
        match xs {
            [x] if x.degree == 0 => {
                let theta = cover.res(&x.p).neg().add(&a.twisted(1).interior(&x.v));
                t.element(x.v.clone(), t.cut(&theta))
            }
            [x] => t.tot(x.degree, cover.res(&x.p).neg()),
            [x, y] if x.degree == 0 && y.degree == 0 => {
                let w = wedge_fields(t.patch(), &[&x.v, &y.v]);
                let body = cover.res(&skew_contraction(x, y).scale(&half())).add(&a.total().interior(&w));
                t.tot(1, t.cut(&body))
            }
            _ => t.zero(xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 1),
        }
    }
}

/// `f^a: atiyah(X, ω) → dgLie_At(X, Ā)`.
#[derive(Debug, Clone)]
pub struct FAtiyah {
    source: AtiyahTwo,
    target: DgLieQu,
}

impl FAtiyah {
    pub fn new(target: &DgLieQu) -> Result<Self, String> {
        if target.cutoff() != Some(0) {
            return Err("f^a targets the Ω^{≤0} model".into());
        }
        Ok(FAtiyah { source: AtiyahTwo::new(target.plectic())?, target: target.clone() })
    }
}

impl LInftyMorphism for FAtiyah {
    type Source = AtiyahTwo;
    type Target = DgLieQu;

    fn source(&self) -> &AtiyahTwo {
        &self.source
    }

    fn target(&self) -> &DgLieQu {
        &self.target
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn component(&self, xs: &[&CourantElem]) -> QuElem {
        let t = &self.target;
        let a = t.cocycle();
        match xs {
            [x] if x.degree == 0 => t.element(x.v.clone(), t.cut(&a.twisted(1).interior(&x.v))),
            [x] => t.tot(x.degree, t.cover().res(&x.p).neg()),
            [x, y] if x.degree == 0 && y.degree == 0 => {
                let w = wedge_fields(t.patch(), &[&x.v, &y.v]);
                t.tot(1, t.cut(&a.total().interior(&w)))
            }
            _ => t.zero(xs.iter().map(|x| x.degree).sum::<i32>() + xs.len() as i32 - 1),
        }
    }
}

/// The strict map between two cutoffs of the quantomorphism model that forgets form
/// degrees above the target's cutoff; `i` and `p` are instances.
#[derive(Debug, Clone)]
pub struct Forget {
    source: DgLieQu,
    target: DgLieQu,
}

impl Forget {
    pub fn new(source: &DgLieQu, target: &DgLieQu) -> Result<Self, String> {
        let finer = match (source.cutoff(), target.cutoff()) {
            (_, None) => source.cutoff().is_none(),
            (None, Some(_)) => true,
            (Some(s), Some(t)) => t <= s,
        };
        if !finer {
            return Err("forgetful maps only lower the cutoff".into());
        }
        Ok(Forget { source: source.clone(), target: target.clone() })
    }
}

impl LInftyMorphism for Forget {
    type Source = DgLieQu;
    type Target = DgLieQu;

    fn source(&self) -> &DgLieQu {
        &self.source
    }

    fn target(&self) -> &DgLieQu {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&QuElem]) -> QuElem {
        self.target.restrict(xs[0])
    }
}

/// `ψ: atiyah(X, ω) → LieAlg_At(X, Ā)` for `n = 1`, `ψ(v + c) = v − c|_{U_α} + ι_v A^1`.
#[derive(Debug, Clone)]
pub struct PsiAtiyah {
    source: AtiyahOne,
    target: DgLieQu,
}

impl PsiAtiyah {
    pub fn new(target: &DgLieQu) -> Result<Self, String> {
        if target.cutoff() != Some(0) {
            return Err("ψ targets the Ω^{≤0} model".into());
        }
        Ok(PsiAtiyah { source: AtiyahOne::new(target.plectic())?, target: target.clone() })
    }
}

impl LInftyMorphism for PsiAtiyah {
    type Source = AtiyahOne;
    type Target = DgLieQu;

    fn source(&self) -> &AtiyahOne {
        &self.source
    }

    fn target(&self) -> &DgLieQu {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&CourantElem]) -> QuElem {
        let t = &self.target;
        let x = xs[0];
        let theta = t.cover().res(&x.p).neg().add(&t.cocycle().twisted(1).interior(&x.v));
        t.element(x.v.clone(), t.cut(&theta))
    }
}

/// The inclusion `L∞(X, ω) ↪ atiyah(X, ω)` for `n = 1`.
#[derive(Debug, Clone)]
pub struct ObservablesInAtiyah {
    source: Observables,
    target: AtiyahOne,
}

impl ObservablesInAtiyah {
    pub fn new(p: &PrePlecticPatch) -> Result<Self, String> {
        Ok(ObservablesInAtiyah { source: Observables::new(p), target: AtiyahOne::new(p)? })
    }
}

impl LInftyMorphism for ObservablesInAtiyah {
    type Source = Observables;
    type Target = AtiyahOne;

    fn source(&self) -> &Observables {
        &self.source
    }

    fn target(&self) -> &AtiyahOne {
        &self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&ObsElem]) -> CourantElem {
        xs[0].clone()
    }
}

/// Seeded samples `v + θ` with arbitrary polynomial `v`, and forms above degree 0.
///
/// `theta_degree` is the form degree of the degree-0 payload; `None` leaves it zero.
pub struct FieldFormSampler {
    patch: Patch,
    theta_degree: Option<usize>,
    max_deg: u32,
    rng: ChaCha8Rng,
}

impl FieldFormSampler {
    pub fn new(patch: &Patch, theta_degree: Option<usize>, max_deg: u32, seed: u64) -> Self {
        FieldFormSampler { patch: patch.clone(), theta_degree, max_deg, rng: sample::seeded(seed) }
    }

    /// Samples for `courant(X, ω)`.
    pub fn courant(p: &PrePlecticPatch, max_deg: u32, seed: u64) -> Self {
        FieldFormSampler::new(p.patch(), Some(1), max_deg, seed)
    }

    /// Samples for `atiyah(X, ω)` with `n = 2`.
    pub fn atiyah2(p: &PrePlecticPatch, max_deg: u32, seed: u64) -> Self {
        FieldFormSampler::new(p.patch(), None, max_deg, seed)
    }

    /// Samples for `atiyah(X, ω)` with `n = 1`.
    pub fn atiyah1(p: &PrePlecticPatch, max_deg: u32, seed: u64) -> Self {
        FieldFormSampler::new(p.patch(), Some(0), max_deg, seed)
    }

    pub fn field(&mut self) -> PolyMultivector {
        sample::graded(&mut self.rng, &self.patch, 1, self.max_deg, 3)
    }
}

impl Sampler<CourantElem> for FieldFormSampler {
    fn sample(&mut self, degree: i32) -> CourantElem {
        if degree == 0 {
            let v = self.field();
            let p = match self.theta_degree {
                Some(k) => sample::graded(&mut self.rng, &self.patch, k, self.max_deg, 3),
                None => zero_form(&self.patch, 0),
            };
            return Elt::new(0, v, p);
        }
        Elt::pure(&self.patch, degree, sample::graded(&mut self.rng, &self.patch, 0, self.max_deg, 3))
    }
}

/// Seeded samples of a truncated quantomorphism model: in degree 0, images of arbitrary
/// `v + θ` shifted by `d_Tot` of a random element; positive degrees uniformly.
pub struct TruncatedSampler {
    t: DgLieQu,
    forms: FieldFormSampler,
    cech: CechSampler,
}

impl TruncatedSampler {
    pub fn new(t: &DgLieQu, max_deg: u32, seed: u64) -> Self {
        let cutoff = t.cutoff().expect("truncated model");
        let n = t.n();
        TruncatedSampler {
            t: t.clone(),
            forms: FieldFormSampler::new(t.patch(), Some(n - 1), max_deg, seed),
            cech: CechSampler::new(t.cover(), max_deg, seed ^ 0x7a11).with_cutoff(cutoff),
        }
    }
}

impl Sampler<QuElem> for TruncatedSampler {
    fn sample(&mut self, degree: i32) -> QuElem {
        let t = &self.t;
        let n = t.n();
        if degree == 0 {
            let x = self.forms.sample(0);
            let theta = t.cover().res(&x.p).neg().add(&t.cocycle().twisted(1).interior(&x.v));
            let mut theta = t.cut(&theta);
            if n >= 2 {
                theta = theta.add(&t.d_tot(&self.cech.tot(n - 2)));
            }
            return t.element(x.v, theta);
        }
        let eta = self.cech.tot((n as i32 - 1 - degree).max(0) as usize);
        t.tot(degree, eta)
    }
}

fn cyclic<T: Linear>(xs: [&CourantElem; 3], f: impl Fn(&CourantElem, &CourantElem, &CourantElem) -> T) -> T {
    let [a, b, c] = xs;
    f(a, b, c).add(&f(b, c, a)).add(&f(c, a, b))
}

/// `Σ_cyc (ι_{v_3} L_{v_1} θ_2 − ι_{v_3} L_{v_2} θ_1)`.
fn lie_cyclic(xs: [&CourantElem; 3]) -> PolyForm {
    cyclic(xs, |a, b, c| interior(&c.v, &lie_derivative(&a.v, &b.p)).sub(&interior(&c.v, &lie_derivative(&b.v, &a.p))))
}

/// `Σ_cyc ι_{v_1∧v_2} dθ_3`.
fn d_cyclic(patch: &Patch, xs: [&CourantElem; 3]) -> PolyForm {
    cyclic(xs, |a, b, c| interior(&wedge_fields(patch, &[&a.v, &b.v]), &exterior_d(&c.p)))
}

/// An identity whose two sides are evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofIdentity {
    /// `ψ_2(dη, x) = ψ_1⟦η, x⟧ − ⟦ψ_1 η, ψ_1 x⟧`.
    PsiTwoDifferential,
    /// `l_3` of the Courant algebra in closed form.
    CourantL3Closed,
    /// `Σ_cyc ψ_2(⟦x_1, x_2⟧, x_3)`.
    PsiTwoOfBracket,
    /// `Σ_cyc ⟦ψ_1 x_1, ψ_2(x_2, x_3)⟧`.
    BracketOfPsiTwo,
    /// `⟦f^c_1 x_1, f^c_1 x_2⟧`.
    FcBracketOfImages,
    /// `Σ_cyc f^c_2(⟦x_1, x_2⟧, x_3)`.
    FcTwoOfBracket,
    /// `Σ_cyc ⟦f^c_1 x_1, f^c_2(x_2, x_3)⟧`.
    BracketOfFcTwo,
    /// `⟦f^a_1 v_1, f^a_1 v_2⟧`.
    FaBracketOfImages,
    /// `Σ_cyc f^a_2(⟦v_1, v_2⟧, v_3)`.
    FaTwoOfBracket,
    /// `Σ_cyc ⟦f^a_1 v_1, f^a_2(v_2, v_3)⟧`.
    BracketOfFaTwo,
}

impl ProofIdentity {
    /// Identities used for `ψ`.
    pub const PSI: [ProofIdentity; 4] =
        [ProofIdentity::PsiTwoDifferential, ProofIdentity::CourantL3Closed, ProofIdentity::PsiTwoOfBracket, ProofIdentity::BracketOfPsiTwo];

    /// Identities used for `f^c` and `f^a`.
    pub const WEAK_EQUIVALENCES: [ProofIdentity; 6] = [
        ProofIdentity::FcBracketOfImages,
        ProofIdentity::FcTwoOfBracket,
        ProofIdentity::BracketOfFcTwo,
        ProofIdentity::FaBracketOfImages,
        ProofIdentity::FaTwoOfBracket,
        ProofIdentity::BracketOfFaTwo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProofIdentity::PsiTwoDifferential => "psi2-of-differential",
            ProofIdentity::CourantL3Closed => "courant-l3-closed-form",
            ProofIdentity::PsiTwoOfBracket => "psi2-of-bracket",
            ProofIdentity::BracketOfPsiTwo => "bracket-of-psi2",
            ProofIdentity::FcBracketOfImages => "fc-bracket-of-images",
            ProofIdentity::FcTwoOfBracket => "fc2-of-bracket",
            ProofIdentity::BracketOfFcTwo => "bracket-of-fc2",
            ProofIdentity::FaBracketOfImages => "fa-bracket-of-images",
            ProofIdentity::FaTwoOfBracket => "fa2-of-bracket",
            ProofIdentity::BracketOfFaTwo => "bracket-of-fa2",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            ProofIdentity::PsiTwoDifferential | ProofIdentity::CourantL3Closed | ProofIdentity::PsiTwoOfBracket | ProofIdentity::BracketOfPsiTwo => {
                "§5.2 Prop 5.6 proof, 'obtain the following equalities'"
            }
            _ => "§5.2 final Proposition proof, 'we obtain the following equalities'",
        }
    }

    /// Number of degree-0 inputs; `PsiTwoDifferential` also takes a degree-1 input first.
    pub fn arity(self) -> usize {
        match self {
            ProofIdentity::PsiTwoDifferential | ProofIdentity::FcBracketOfImages | ProofIdentity::FaBracketOfImages => 2,
            _ => 3,
        }
    }

    /// Whether the inputs are Courant elements (otherwise Atiyah elements).
    pub fn courant_inputs(self) -> bool {
        !matches!(self, ProofIdentity::FaBracketOfImages | ProofIdentity::FaTwoOfBracket | ProofIdentity::BracketOfFaTwo)
    }
}

/// The morphisms and algebras of the `n = 2` diagram.
#[derive(Debug, Clone)]
pub struct CourantDiagram {
    pub courant: CourantTwo,
    pub atiyah: AtiyahTwo,
    pub qu: DgLieQu,
    pub cou: DgLieQu,
    pub at: DgLieQu,
    pub phi: Phi,
    pub psi: PsiCourant,
    pub f: crate::quantomorphism::AppendixMorphism,
    pub fc: FCourant,
    pub fa: FAtiyah,
    pub i: Forget,
    pub p: Forget,
}

impl CourantDiagram {
    pub fn new(p: &PrePlecticPatch, a: &DeligneCocycle) -> Result<Self, String> {
        check_plectic(p, 2)?;
        let qu = DgLieQu::new(p, a).map_err(|e| e.to_string())?;
        let cou = DgLieQu::truncated(p, a, 1).map_err(|e| e.to_string())?;
        let at = DgLieQu::truncated(p, a, 0).map_err(|e| e.to_string())?;
        Ok(CourantDiagram {
            courant: CourantTwo::new(p)?,
            atiyah: AtiyahTwo::new(p)?,
            phi: Phi::new(p)?,
            psi: PsiCourant::new(p)?,
            f: crate::quantomorphism::AppendixMorphism::new(&qu),
            fc: FCourant::new(&cou)?,
            fa: FAtiyah::new(&at)?,
            i: Forget::new(&qu, &cou)?,
            p: Forget::new(&cou, &at)?,
            qu,
            cou,
            at,
        })
    }

    fn patch(&self) -> &Patch {
        self.qu.patch()
    }

    fn omega3(&self, xs: [&CourantElem; 3]) -> PolyForm {
        self.qu.plectic().contract(&[&xs[0].v, &xs[1].v, &xs[2].v])
    }

    /// Left and right sides of a proof identity on the given inputs, as total-complex
    /// elements for the weak equivalences and as Courant/Atiyah elements otherwise.
    pub fn sides(&self, id: ProofIdentity, xs: &[&CourantElem]) -> (IdentitySide, IdentitySide) {
        use IdentitySide::{Plain, Qu};
        let patch = self.patch().clone();
        let res = |a: &PolyForm| self.cou.cover().res(a);
        let a = self.qu.cocycle();
        let triple = || -> [&CourantElem; 3] { [xs[0], xs[1], xs[2]] };
        let bracket_wedge_a = |t: &DgLieQu| -> TotElement {
            cyclic(triple(), |x, y, z| {
                let w = wedge_fields(&patch, &[&vector_bracket(&x.v, &y.v), &z.v]);
                t.cut(&a.total().interior(&w))
            })
        };
        match id {
            ProofIdentity::PsiTwoDifferential => {
                let (eta, x) = (xs[0], xs[1]);
                let d_eta = bracket_or_zero(&self.courant, &[eta]);
                let lhs = component_or_zero(&self.psi, &[&d_eta, x]);
                let inner = bracket_or_zero(&self.courant, &[eta, x]);
                let rhs = component_or_zero(&self.psi, &[&inner])
                    .sub(&bracket_or_zero(&self.atiyah, &[&component_or_zero(&self.psi, &[eta]), &component_or_zero(&self.psi, &[x])]));
                (Plain(lhs), Plain(rhs))
            }
            ProofIdentity::CourantL3Closed => {
                let lhs = bracket_or_zero(&self.courant, xs);
                let rhs = lie_cyclic(triple()).scale(&Rational::new(-1, 4)).add(&self.omega3(triple()).scale(&half()));
                (Plain(lhs), Plain(Elt::pure(&patch, 1, rhs)))
            }
            ProofIdentity::PsiTwoOfBracket => {
                let lhs = cyclic(triple(), |x, y, z| component_or_zero(&self.psi, &[&bracket_or_zero(&self.courant, &[x, y]), z]));
                let rhs = lie_cyclic(triple())
                    .scale(&Rational::new(-1, 4))
                    .sub(&d_cyclic(&patch, triple()))
                    .sub(&self.omega3(triple()).scale(&Rational::new(3, 2)));
                (Plain(lhs), Plain(Elt::pure(&patch, 1, rhs)))
            }
            ProofIdentity::BracketOfPsiTwo => {
                let lhs = cyclic(triple(), |x, y, z| {
                    let px = component_or_zero(&self.psi, &[x]);
                    bracket_or_zero(&self.atiyah, &[&px, &component_or_zero(&self.psi, &[y, z])])
                });
                let rhs = lie_cyclic(triple()).scale(&-half()).sub(&d_cyclic(&patch, triple()));
                (Plain(lhs), Plain(Elt::pure(&patch, 1, rhs)))
            }
            ProofIdentity::FcBracketOfImages => {
                let (x, y) = (xs[0], xs[1]);
                let t = &self.cou;
                let lhs = bracket_or_zero(t, &[&component_or_zero(&self.fc, &[x]), &component_or_zero(&self.fc, &[y])]);
                let br = vector_bracket(&x.v, &y.v);
                let w = wedge_fields(&patch, &[&x.v, &y.v]);
                let theta = res(&lie_derivative(&y.v, &x.p).sub(&lie_derivative(&x.v, &y.p)))
                    .add(&a.twisted(1).interior(&br))
                    .add(&res(&self.qu.plectic().contract(&[&x.v, &y.v])))
                    .sub(&t.d_tot(&a.total().interior(&w)));
                (Qu(lhs), Qu(t.element(br, t.cut(&theta))))
            }
            ProofIdentity::FcTwoOfBracket => {
                let t = &self.cou;
                let lhs = cyclic(triple(), |x, y, z| component_or_zero(&self.fc, &[&bracket_or_zero(&self.courant, &[x, y]), z]));
                let forms = lie_cyclic(triple())
                    .scale(&Rational::new(1, 4))
                    .add(&d_cyclic(&patch, triple()))
                    .add(&self.omega3(triple()).scale(&Rational::new(3, 2)));
                let rhs = t.cut(&res(&forms)).add(&bracket_wedge_a(t));
                (Qu(lhs), Qu(t.tot(1, rhs)))
            }
            ProofIdentity::BracketOfFcTwo => {
                let t = &self.cou;
                let lhs = cyclic(triple(), |x, y, z| {
                    let fx = component_or_zero(&self.fc, &[x]);
                    bracket_or_zero(t, &[&fx, &component_or_zero(&self.fc, &[y, z])])
                });
                let forms = lie_cyclic(triple()).scale(&half()).add(&d_cyclic(&patch, triple()));
                let lie_terms = cyclic(triple(), |x, y, z| {
                    let w = wedge_fields(&patch, &[&y.v, &z.v]);
                    t.cut(&a.total().lie(&x.v).interior(&w))
                });
                let rhs = t.cut(&res(&forms)).add(&bracket_wedge_a(t).scale(&Rational::from_int(2))).add(&lie_terms);
                (Qu(lhs), Qu(t.tot(1, rhs)))
            }
            ProofIdentity::FaBracketOfImages => {
                let (x, y) = (xs[0], xs[1]);
                let t = &self.at;
                let lhs = bracket_or_zero(t, &[&component_or_zero(&self.fa, &[x]), &component_or_zero(&self.fa, &[y])]);
                let br = vector_bracket(&x.v, &y.v);
                let w = wedge_fields(&patch, &[&x.v, &y.v]);
                let theta = a.component(1).interior(&br).neg().sub(&t.d_tot(&a.total().interior(&w)));
                (Qu(lhs), Qu(t.element(br, t.cut(&theta))))
            }
            ProofIdentity::FaTwoOfBracket => {
                let t = &self.at;
                let lhs = cyclic(triple(), |x, y, z| component_or_zero(&self.fa, &[&bracket_or_zero(&self.atiyah, &[x, y]), z]));
                (Qu(lhs), Qu(t.tot(1, bracket_wedge_a(t))))
            }
            ProofIdentity::BracketOfFaTwo => {
                let t = &self.at;
                let lhs = cyclic(triple(), |x, y, z| {
                    let fx = component_or_zero(&self.fa, &[x]);
                    bracket_or_zero(t, &[&fx, &component_or_zero(&self.fa, &[y, z])])
                });
                let lie_terms = cyclic(triple(), |x, y, z| {
                    let w = wedge_fields(&patch, &[&y.v, &z.v]);
                    t.cut(&a.total().lie(&x.v).interior(&w))
                });
                let rhs = bracket_wedge_a(t).scale(&Rational::from_int(2)).add(&lie_terms);
                (Qu(lhs), Qu(t.tot(1, rhs)))
            }
        }
    }

    /// Checks a proof identity on sampled inputs; returns the first witness on failure.
    pub fn check_identity(&self, id: ProofIdentity, seed: u64, max_deg: u32, count: usize) -> Result<usize, String> {
        let p = self.qu.plectic();
        let mut s = if id.courant_inputs() { FieldFormSampler::courant(p, max_deg, seed) } else { FieldFormSampler::atiyah2(p, max_deg, seed) };
        for k in 0..count {
            let mut xs: Vec<CourantElem> = Vec::with_capacity(3);
            if id == ProofIdentity::PsiTwoDifferential {
                xs.push(s.sample(1));
                xs.push(s.sample(0));
            } else {
                xs.extend((0..id.arity()).map(|_| s.sample(0)));
            }
            if k == 1 && xs.len() >= 3 {
                xs[2] = xs[0].clone();
            }
            let refs: Vec<&CourantElem> = xs.iter().collect();
            let (lhs, rhs) = self.sides(id, &refs);
            if !lhs.matches(&rhs) {
                let inputs: Vec<String> = refs.iter().map(|x| format!("{x:?}")).collect();
                return Err(format!("inputs: [{}]; left: {lhs:?}; right: {rhs:?}", inputs.join(", ")));
            }
        }
        Ok(count)
    }

    /// `d_Tot(θ̄ − ι_v(A^2 − A^1)) = 0` on `dgLie_Cou` and `d_Tot(θ̄ + ι_v A^1) = 0` on `dgLie_At`,
    /// for sampled degree-0 elements.
    pub fn check_shifted_closed(&self, seed: u64, max_deg: u32, count: usize) -> Result<usize, String> {
        let a = self.qu.cocycle();
        let a2 = a.component(0);
        let a1 = a.component(1);
        let mut cs = TruncatedSampler::new(&self.cou, max_deg, seed);
        let mut ats = TruncatedSampler::new(&self.at, max_deg, seed ^ 1);
        for _ in 0..count {
            let x = cs.sample(0);
            let shifted = x.p.sub(&self.cou.cut(&a2.sub(&a1).interior(&x.v)));
            let r = self.cou.d_tot(&shifted);
            if !r.is_zero() {
                return Err(format!("dgLie_Cou element {x:?}: residual {r:?}"));
            }
            let y = ats.sample(0);
            let r = self.at.d_tot(&y.p.add(&a1.interior(&y.v)));
            if !r.is_zero() {
                return Err(format!("dgLie_At element {y:?}: residual {r:?}"));
            }
        }
        Ok(count)
    }
}

/// One side of a proof identity.
#[derive(Debug, Clone)]
pub enum IdentitySide {
    Plain(CourantElem),
    Qu(QuElem),
}

impl IdentitySide {
    fn matches(&self, other: &IdentitySide) -> bool {
        match (self, other) {
            (IdentitySide::Plain(a), IdentitySide::Plain(b)) => a.sub(b).is_zero(),
            (IdentitySide::Qu(a), IdentitySide::Qu(b)) => a.sub(b).is_zero(),
            _ => false,
        }
    }
}

/// `L_{v_1} ι_{v_2} A^1 − L_{v_2} ι_{v_1} A^1 − ι_{[v_1,v_2]} A^1 − ι_{v_1∧v_2} ω` on every open.
pub fn atiyah_iso_residual(p: &PrePlecticPatch, a: &DeligneCocycle, v1: &PolyMultivector, v2: &PolyMultivector) -> TotElement {
    let a1 = a.component(0);
    let lhs = a1.interior(v2).lie(v1).sub(&a1.interior(v1).lie(v2));
    let rhs = a1.interior(&vector_bracket(v1, v2)).add(&a.cover().res(&p.contract(&[v1, v2])));
    lhs.sub(&rhs)
}

/// The weight-`≤ W` slice of `courant(X, ω)` (or of `atiyah(X, ω)` when `with_forms` is false).
pub fn field_form_slice(p: &PrePlecticPatch, c: u32, max_weight: u32, with_forms: bool) -> Result<FdComplex<CourantElem>, String> {
    let patch = p.patch();
    let fs = field_slice(patch, c, max_weight);
    let mut deg0: Vec<CourantElem> = (0..fs.dim()).map(|i| Elt::new(0, fs.element(i), zero_form(patch, 0))).collect();
    if with_forms {
        let forms = FormSpace::by_weight(patch, 1, max_weight);
        deg0.extend((0..forms.dim()).map(|i| Elt::pure(patch, 0, forms.element(i))));
    }
    let funcs = FormSpace::by_weight(patch, 0, max_weight);
    let deg1: Vec<CourantElem> = (0..funcs.dim()).map(|i| Elt::pure(patch, 1, funcs.element(i))).collect();
    let bases = BTreeMap::from([(0, deg0), (1, deg1)]);
    let d = |x: &CourantElem| -> CourantElem {
        if with_forms && x.degree == 1 {
            Elt::pure(patch, 0, exterior_d(&x.p))
        } else {
            Elt::pure(patch, x.degree - 1, zero_form(patch, 0))
        }
    };
    fd_complex(bases, &flat_obs, &d)
}

/// `f^c_1` and `f^a_1` on weight-`≤ W` slices.
pub fn weak_equivalence_truncations(d: &CourantDiagram, max_weight: u32) -> Result<(QuasiIsoReport, QuasiIsoReport), String> {
    let c = homogeneous_weight(d.qu.plectic(), d.qu.cocycle()).ok_or("truncation needs homogeneous data")?;
    let p = d.qu.plectic();
    let mut out = Vec::new();
    for (with_forms, t) in [(true, &d.cou), (false, &d.at)] {
        let src = field_form_slice(p, c, max_weight, with_forms)?;
        let tgt = quantomorphism_slice(t, c, max_weight)?;
        let map = if with_forms {
            fd_chain_map(&src, &tgt, &flat_qu, &|x| d.fc.component(&[x]))?
        } else {
            fd_chain_map(&src, &tgt, &flat_qu, &|x| d.fa.component(&[x]))?
        };
        out.push(QuasiIsoReport {
            source_cohomology: src.complex.cohomology_dims(),
            target_cohomology: tgt.complex.cohomology_dims(),
            chain_map: map.is_chain_map(),
            quasi_isomorphism: map.is_quasi_isomorphism(),
        });
    }
    let at = out.pop().expect("two reports");
    let cou = out.pop().expect("two reports");
    Ok((cou, at))
}

/// Dimensions and rank of `ψ` (for `n = 1`) between weight-`≤ W` slices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionReport {
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

impl BijectionReport {
    pub fn bijective(&self) -> bool {
        self.source_dim == self.target_dim && self.rank == self.source_dim
    }
}

pub fn atiyah_iso_truncation(psi: &PsiAtiyah, max_weight: u32) -> Result<BijectionReport, String> {
    let t = psi.target();
    let p = t.plectic();
    let c = homogeneous_weight(p, t.cocycle()).ok_or("truncation needs homogeneous data")?;
    let patch = p.patch();
    let fs = field_slice(patch, c, max_weight);
    let funcs = FormSpace::by_weight(patch, 0, max_weight);
    let mut basis: Vec<CourantElem> = (0..fs.dim()).map(|i| Elt::new(0, fs.element(i), zero_form(patch, 0))).collect();
    basis.extend((0..funcs.dim()).map(|i| Elt::pure(patch, 0, funcs.element(i))));
    let src = fd_complex(
        BTreeMap::from([(0, basis)]),
        &|x: &CourantElem| {
            let mut f = flat_graded(0, &[], &x.v);
            f.extend(flat_graded(1, &[], &x.p));
            f
        },
        &|_| Elt::pure(patch, -1, zero_form(patch, 0)),
    )?;
    let tgt = quantomorphism_slice(t, c, max_weight)?;
    let map = fd_chain_map(&src, &tgt, &flat_qu, &|x| psi.component(&[x]))?;
    Ok(BijectionReport { source_dim: src.complex.dim(0), target_dim: tgt.complex.dim(0), rank: map.map(0).rank() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{BoxRegion, Cover, Interval};
    use crate::linfty::{check_equal_morphisms, check_generalized_jacobi, check_morphism, compose_low, PostStrict, PreStrict};
    use crate::observables::ObservableSampler;
    use crate::quantomorphism::QuSampler;

    fn r3() -> PrePlecticPatch {
        PrePlecticPatch::parse(3, 2, "dx^dy^dz").unwrap()
    }

    fn field(p: &PrePlecticPatch, s: &str) -> PolyMultivector {
        PolyMultivector::parse(p.patch(), s).unwrap()
    }

    fn form(p: &PrePlecticPatch, s: &str) -> PolyForm {
        PolyForm::parse(p.patch(), s).unwrap()
    }

    fn trivial_diagram() -> CourantDiagram {
        let p = r3();
        let cover = Cover::trivial(p.patch());
        let a = TotElement::from_components(2, [(vec![0], form(&p, "z dx^dy"))]);
        CourantDiagram::new(&p, &DeligneCocycle::new(&cover, 2, a).unwrap()).unwrap()
    }

    fn two_box_diagram() -> CourantDiagram {
        let p = r3();
        let iv = |lo: Option<i64>, hi: Option<i64>| Interval::new(lo.map(Rational::from_int), hi.map(Rational::from_int));
        let cover = Cover::new(
            p.patch(),
            vec![
                BoxRegion::new("U1", vec![iv(None, Some(1)), Interval::all(), Interval::all()]),
                BoxRegion::new("U2", vec![iv(Some(0), None), Interval::all(), Interval::all()]),
            ],
        )
        .unwrap();
        let a = TotElement::from_components(
            2,
            [(vec![0], form(&p, "z dx^dy")), (vec![1], form(&p, "z dx^dy + y dx^dz + x dy^dz")), (vec![0, 1], form(&p, "x*y dz"))],
        );
        CourantDiagram::new(&p, &DeligneCocycle::new(&cover, 2, a).unwrap()).unwrap()
    }

    #[test]
    fn displayed_values() {
        let p = r3();
        let c = CourantTwo::new(&p).unwrap();
        let e = |v: &str, t: &str| Elt::new(0, field(&p, v), form(&p, t));
        assert_eq!(pairing(&e("Dx", "dy"), &e("Dy", "dx")), form(&p, "2"));
        let l3 = c.bracket(&[&e("Dx", "0"), &e("Dy", "0"), &e("Dz", "0")]);
        assert_eq!(l3.p, form(&p, "1/2"));
        let a = AtiyahTwo::new(&p).unwrap();
        let l3 = a.bracket(&[&a.field(field(&p, "Dx")), &a.field(field(&p, "Dy")), &a.field(field(&p, "Dz"))]);
        assert_eq!(l3.p, form(&p, "-1"));
        let phi = Phi::new(&p).unwrap();
        assert!(phi.component(&[&e("Dx", "dy"), &e("Dy", "dx")]).is_zero());

        let d = trivial_diagram();
        let fa1 = d.fa.component(&[&d.atiyah.field(field(&p, "Dx"))]);
        assert_eq!(fa1.v, field(&p, "Dx"));
        assert!(fa1.p.is_zero());
        let fa2 = d.fa.component(&[&d.atiyah.field(field(&p, "Dx")), &d.atiyah.field(field(&p, "Dy"))]);
        assert_eq!(fa2.p, d.at.cover().res(&form(&p, "z")));
        let fc2 = d.fc.component(&[&e("Dx", "0"), &e("Dy", "0")]);
        assert_eq!(fc2.p, d.cou.cover().res(&form(&p, "z")));
    }

    #[test]
    fn jacobi_and_morphisms() {
        for d in [trivial_diagram(), two_box_diagram()] {
            let p = d.qu.plectic().clone();
            let mut cs = FieldFormSampler::courant(&p, 2, 3);
            let mut az = FieldFormSampler::atiyah2(&p, 2, 4);
            for m in 1..=4 {
                assert!(check_generalized_jacobi(&d.courant, m, &mut cs, 20).passed(), "courant m={m}");
                assert!(check_generalized_jacobi(&d.atiyah, m, &mut az, 20).passed(), "atiyah m={m}");
            }
            for t in [&d.cou, &d.at] {
                let mut ts = TruncatedSampler::new(t, 2, 6);
                for _ in 0..5 {
                    assert!(t.accepts(&ts.sample(0)));
                }
                for m in 1..=3 {
                    assert!(check_generalized_jacobi(t, m, &mut ts, 20).passed());
                }
            }
            let mut os = ObservableSampler::new(&p, 2, 7);
            let mut qs = QuSampler::new(&d.f, 2, 8);
            for m in 1..=3 {
                let r = check_morphism(&d.phi, m, &mut os, 20);
                assert!(r.passed(), "phi m={m}: {:?}", r.failure);
                let r = check_morphism(&d.psi, m, &mut cs, 20);
                assert!(r.passed(), "psi m={m}: {:?}", r.failure);
                let r = check_morphism(&d.fc, m, &mut cs, 20);
                assert!(r.passed(), "fc m={m}: {:?}", r.failure);
                let r = check_morphism(&d.fa, m, &mut az, 20);
                assert!(r.passed(), "fa m={m}: {:?}", r.failure);
                assert!(check_morphism(&d.i, m, &mut qs, 20).passed());
                let mut cou_s = TruncatedSampler::new(&d.cou, 2, 9);
                assert!(check_morphism(&d.p, m, &mut cou_s, 20).passed());
            }
        }
    }

    #[test]
    fn diagram_commutes() {
        let d = two_box_diagram();
        let p = d.qu.plectic().clone();
        let mut os = ObservableSampler::new(&p, 2, 1);
        let mut cs = FieldFormSampler::courant(&p, 2, 2);
        let lower = compose_low(&d.fc, &d.phi).unwrap();
        check_equal_morphisms(&lower, &PostStrict { f: &d.i, g: &d.f }, 2, &mut os, 30).unwrap();
        let upper = compose_low(&d.fa, &d.psi).unwrap();
        check_equal_morphisms(&upper, &PostStrict { f: &d.p, g: &d.fc }, 2, &mut cs, 30).unwrap();
        let left = compose_low(&d.psi, &d.phi).unwrap();
        let outer = compose_low(&d.fa, &left).unwrap();
        let right = PostStrict { f: &d.i, g: &d.f };
        check_equal_morphisms(&outer, &PostStrict { f: &d.p, g: &right }, 2, &mut os, 30).unwrap();
    }

    #[test]
    fn proof_identities() {
        for d in [trivial_diagram(), two_box_diagram()] {
            for id in ProofIdentity::PSI.into_iter().chain(ProofIdentity::WEAK_EQUIVALENCES) {
                d.check_identity(id, 5, 2, 20).unwrap_or_else(|w| panic!("{}: {w}", id.name()));
            }
            d.check_shifted_closed(5, 2, 20).unwrap();
        }
    }

    #[test]
    fn truncated_weak_equivalences() {
        for d in [trivial_diagram(), two_box_diagram()] {
            let (cou, at) = weak_equivalence_truncations(&d, 4).unwrap();
            assert!(cou.passed(), "{}", cou.summary());
            assert!(at.passed(), "{}", at.summary());
        }
    }

    #[test]
    fn atiyah_one() {
        let p = PrePlecticPatch::parse(2, 1, "dx^dy").unwrap();
        let at = AtiyahOne::new(&p).unwrap();
        let e = |v: &str, c: &str| Elt::new(0, field(&p, v), form(&p, c));
        let b = at.bracket(&[&e("Dx", "0"), &e("Dy", "0")]);
        assert!(b.v.is_zero());
        assert_eq!(b.p, form(&p, "-1"));
        let mut s = FieldFormSampler::atiyah1(&p, 2, 3);
        assert!(check_generalized_jacobi(&at, 3, &mut s, 20).passed());

        let iv = |lo: Option<i64>, hi: Option<i64>| Interval::new(lo.map(Rational::from_int), hi.map(Rational::from_int));
        let cover = Cover::new(
            p.patch(),
            vec![BoxRegion::new("U1", vec![iv(None, Some(1)), Interval::all()]), BoxRegion::new("U2", vec![iv(Some(0), None), Interval::all()])],
        )
        .unwrap();
        let a = TotElement::from_components(1, [(vec![0], form(&p, "x dy")), (vec![1], form(&p, "2*x dy + y dx")), (vec![0, 1], form(&p, "x*y"))]);
        let a = DeligneCocycle::new(&cover, 1, a).unwrap();
        let lie_at = DgLieQu::truncated(&p, &a, 0).unwrap();
        let psi = PsiAtiyah::new(&lie_at).unwrap();
        let x = psi.component(&[&e("0", "1")]);
        assert_eq!(x.p, cover.res(&form(&p, "-1")));
        let mut ts = TruncatedSampler::new(&lie_at, 2, 4);
        assert!(check_generalized_jacobi(&lie_at, 3, &mut ts, 20).passed());
        assert!(check_morphism(&psi, 2, &mut s, 30).passed());
        for _ in 0..10 {
            let (v1, v2) = (s.field(), s.field());
            assert!(atiyah_iso_residual(&p, &a, &v1, &v2).is_zero());
        }
        let r = atiyah_iso_truncation(&psi, 3).unwrap();
        assert!(r.bijective(), "{r:?}");

        let qu = DgLieQu::new(&p, &a).unwrap();
        let f = crate::quantomorphism::AppendixMorphism::new(&qu);
        let incl1 = ObservablesInAtiyah::new(&p).unwrap();
        let incl2 = Forget::new(&qu, &lie_at).unwrap();
        let mut os = ObservableSampler::new(&p, 2, 5);
        check_equal_morphisms(&PreStrict { f: &psi, g: &incl1 }, &PostStrict { f: &incl2, g: &f }, 2, &mut os, 30).unwrap();
    }
}
