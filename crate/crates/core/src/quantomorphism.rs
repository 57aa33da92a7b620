//! The dg Lie algebra of infinitesimal quantomorphisms, the L∞-morphism from the observables
//! into it, the blocks of its defining identity and their closed forms.

use crate::calculus::{exterior_d, poincare_homotopy, vector_bracket, wedge_fields};
use crate::cech::{CechError, CechSampler, Cover, DeligneCocycle, TotElement, TotSpace};
use crate::element::Elt;
use crate::fd::{fd_chain_map, fd_complex, flat_graded, kernel_basis, FieldSpace, Flat, FormSpace, Presented};
use crate::forms::{Patch, PolyForm, PolyMultivector};
use crate::linfty::{bracket_or_zero, component_or_zero, draw_samples, plan_tuples, zeta, JacobiOutcome, LInfty, LInftyMorphism, Linear, Sampler};
use crate::observables::{ObsElem, ObservableSampler, Observables, PrePlecticPatch};
use crate::perm::{binomial, chi, neg_one_pow, unshuffles};
use crate::rational::Rational;
use std::collections::BTreeMap;

pub type QuElem = Elt<TotElement>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuantError {
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error("cocycle has degree {cocycle}, patch is {plectic}-plectic")]
    DegreeMismatch { cocycle: usize, plectic: usize },
    #[error("cocycle and omega live on different patches")]
    PatchMismatch,
    #[error("truncation needs omega and the cocycle homogeneous of one weight")]
    NotHomogeneous,
}

/// `dgLie_Qu(X, Ā)`: degree 0 holds `v + θ̄` with `L_v Ā = d_Tot θ̄`, degree `i` holds `Tot^{n−1−i}`.
///
/// With a cutoff `c` every total complex is replaced by that of `Ω^{≤c}`; this gives
/// `dgLie_Cou` (`c = 1`) and `dgLie_At` (`c = 0`).
#[derive(Debug, Clone)]
pub struct DgLieQu {
    p: PrePlecticPatch,
    a: DeligneCocycle,
    cutoff: Option<usize>,
}

impl DgLieQu {
    pub fn new(p: &PrePlecticPatch, a: &DeligneCocycle) -> Result<Self, QuantError> {
        if a.n() != p.n() {
            return Err(QuantError::DegreeMismatch { cocycle: a.n(), plectic: p.n() });
        }
        if a.cover().patch() != p.patch() {
            return Err(QuantError::PatchMismatch);
        }
        a.check(p.omega())?;
        Ok(DgLieQu { p: p.clone(), a: a.clone(), cutoff: None })
    }

    /// The same construction over `Ω^{≤cutoff}`.
    pub fn truncated(p: &PrePlecticPatch, a: &DeligneCocycle, cutoff: usize) -> Result<Self, QuantError> {
        let mut t = DgLieQu::new(p, a)?;
        t.cutoff = Some(cutoff);
        Ok(t)
    }

    pub fn cutoff(&self) -> Option<usize> {
        self.cutoff
    }

    /// Truncation of a total-complex element to this algebra's form degrees.
    pub fn cut(&self, t: &TotElement) -> TotElement {
        match self.cutoff {
            Some(c) => t.truncate(c),
            None => t.clone(),
        }
    }

    /// `d_Tot` of this algebra's total complex.
    pub fn d_tot(&self, t: &TotElement) -> TotElement {
        self.cover().d_tot_cut(t, self.cutoff)
    }

    /// Truncation of an element of the untruncated algebra.
    pub fn restrict(&self, x: &QuElem) -> QuElem {
        Elt::new(x.degree, x.v.clone(), self.cut(&x.p))
    }

    pub fn plectic(&self) -> &PrePlecticPatch {
        &self.p
    }

    pub fn cocycle(&self) -> &DeligneCocycle {
        &self.a
    }

    pub fn cover(&self) -> &Cover {
        self.a.cover()
    }

    pub fn patch(&self) -> &Patch {
        self.p.patch()
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    /// Degree-0 element `v + θ̄`.
    pub fn element(&self, v: PolyMultivector, theta: TotElement) -> QuElem {
        Elt::new(0, v, theta)
    }

    /// Degree-`k` element `η̄ ∈ Tot^{n−1−k}`.
    pub fn tot(&self, k: i32, eta: TotElement) -> QuElem {
        Elt::pure(self.patch(), k, eta)
    }

    /// `L_v Ā − d_Tot θ̄` for a degree-0 element.
    pub fn defect(&self, x: &QuElem) -> TotElement {
        self.cut(&self.a.total().lie(&x.v)).sub(&self.d_tot(&x.p))
    }

    pub fn accepts(&self, x: &QuElem) -> bool {
        x.degree != 0 || self.defect(x).is_zero()
    }

    fn tot_degree(&self, k: i32) -> usize {
        (self.n() as i32 - 1 - k).max(0) as usize
    }
}

impl LInfty for DgLieQu {
    type Elem = QuElem;

    fn degree(&self, x: &QuElem) -> i32 {
        x.degree
    }

    fn zero(&self, degree: i32) -> QuElem {
        Elt::pure(self.patch(), degree, TotElement::zero(self.tot_degree(degree)))
    }

    fn degree_range(&self) -> (i32, i32) {
        (0, self.n() as i32 - 1)
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn bracket(&self, xs: &[&QuElem]) -> QuElem {
        match xs {
            [x] if x.degree == 0 => self.zero(-1),
            [x] => self.tot(x.degree - 1, self.d_tot(&x.p)),
            [x, y] => {
                let deg = x.degree + y.degree;
                let t = y.p.lie(&x.v).sub(&x.p.lie(&y.v));
                if deg == 0 {
                    Elt::new(0, vector_bracket(&x.v, &y.v), t)
                } else {
                    self.tot(deg, t)
                }
            }
            _ => self.zero(xs.len() as i32 - 2),
        }
    }
}

fn fields<'a>(xs: &[&'a ObsElem]) -> Vec<&'a PolyMultivector> {
    xs.iter().map(|x| &x.v).collect()
}

/// Wedge of `first` (if any) followed by the `vs` whose indices are not in `skip`.
fn wedge_rest(patch: &Patch, first: Option<&PolyMultivector>, vs: &[&PolyMultivector], skip: &[usize]) -> PolyMultivector {
    let mut parts: Vec<&PolyMultivector> = first.into_iter().collect();
    parts.extend(vs.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, v)| *v));
    wedge_fields(patch, &parts)
}

/// `S_m(x_1, …, x_m) = Σ_i (−1)^i ι_{v_1∧…v̂_i…∧v_m} θ_i` (indices from 1).
pub fn s_map(patch: &Patch, xs: &[&ObsElem]) -> PolyForm {
    let vs = fields(xs);
    let mut out = PolyForm::zero(patch, 0);
    for (i, x) in xs.iter().enumerate() {
        let u = wedge_rest(patch, None, &vs, &[i]);
        let term = crate::calculus::interior(&u, &x.p);
        out = out.add(&term.scale_int(neg_one_pow(i as i64 + 1) as i64));
    }
    out
}

/// The L∞-morphism `f: L∞(X, ω) → dgLie_Qu(X, Ā)` with
/// `f_1(v + H) = v − res H + ι_v Ā(1)`, `f_1(η) = −res η` and
/// `f_m = ζ(m)(res S_m + ι_{v_1∧…∧v_m} Ā(m))` for `2 ≤ m ≤ n`.
#[derive(Debug, Clone)]
pub struct AppendixMorphism {
    source: Observables,
    target: DgLieQu,
}

impl AppendixMorphism {
    pub fn new(target: &DgLieQu) -> Self {
        AppendixMorphism { source: Observables::new(&target.p), target: target.clone() }
    }
}

impl LInftyMorphism for AppendixMorphism {
    type Source = Observables;
    type Target = DgLieQu;

    fn source(&self) -> &Observables {
        &self.source
    }

    fn target(&self) -> &DgLieQu {
        &self.target
    }

    fn max_arity(&self) -> usize {
        self.target.n()
    }

    fn component(&self, xs: &[&ObsElem]) -> QuElem {
        let t = &self.target;
        let cover = t.cover();
        let m = xs.len();
        let out_deg = xs.iter().map(|x| x.degree).sum::<i32>() + m as i32 - 1;
        if m == 1 {
            let x = xs[0];
            let theta = cover.res(&x.p).neg();
            if x.degree == 0 {
                return Elt::new(0, x.v.clone(), theta.add(&t.a.twisted(1).interior(&x.v)));
            }
            return t.tot(x.degree, theta);
        }
        let vs = fields(xs);
        let s = cover.res(&s_map(t.patch(), xs));
        let w = wedge_fields(t.patch(), &vs);
        let body = s.add(&t.a.twisted(m).interior(&w));
        t.tot(out_deg, body.scale_sign(zeta(m)))
    }
}

/// Degree-0 samples `f_1(x) + d_Tot η̄`, positive degrees uniformly from the total complex.
pub struct QuSampler {
    f: AppendixMorphism,
    obs: ObservableSampler,
    cech: CechSampler,
}

impl QuSampler {
    pub fn new(f: &AppendixMorphism, max_deg: u32, seed: u64) -> Self {
        let t = f.target();
        QuSampler { f: f.clone(), obs: ObservableSampler::new(&t.p, max_deg, seed), cech: CechSampler::new(t.cover(), max_deg, seed ^ 0x5eed) }
    }
}

impl Sampler<QuElem> for QuSampler {
    fn sample(&mut self, degree: i32) -> QuElem {
        let t = self.f.target();
        let n = t.n();
        if degree == 0 {
            let x = self.obs.sample(0);
            let base = self.f.component(&[&x]);
            if n < 2 {
                return base;
            }
            let eta = self.cech.tot(n - 2);
            return base.add(&Elt::new(0, PolyMultivector::zero(t.patch(), 1), t.cover().d_tot(&eta)));
        }
        let eta = self.cech.tot(t.tot_degree(degree));
        t.tot(degree, eta)
    }
}

/// The five summands `l'_1 f_m`, `I^m_(1)`, `I^m_(2)`, `I^m_(3)`, `J^m` of the morphism identity.
#[derive(Debug, Clone)]
pub struct MasterBlocks {
    pub l1f: QuElem,
    pub i1: QuElem,
    pub i2: QuElem,
    pub i3: QuElem,
    pub j: QuElem,
}

impl MasterBlocks {
    pub fn sum(&self) -> QuElem {
        self.l1f.add(&self.i1).add(&self.i2).add(&self.i3).add(&self.j)
    }
}

fn pick<'a>(xs: &[&'a ObsElem], idx: &[usize]) -> Vec<&'a ObsElem> {
    idx.iter().map(|&i| xs[i]).collect()
}

/// `Σ_{σ ∈ Sh(k, m−k)} χ(σ) sign · f_{m+1−k}(l_k(x_σ(1..k)), x_σ(k+1..m))`.
fn f_of_l(f: &AppendixMorphism, xs: &[&ObsElem], k: usize, sign: i32) -> QuElem {
    let m = xs.len();
    let src = f.source();
    let degs: Vec<i32> = xs.iter().map(|x| x.degree).collect();
    let out_deg = degs.iter().sum::<i32>() + m as i32 - 2;
    let mut acc = f.target().zero(out_deg);
    for sigma in unshuffles(k, m - k) {
        let inner = bracket_or_zero(src, &pick(xs, &sigma[..k]));
        if inner.is_zero() {
            continue;
        }
        let mut args = vec![&inner];
        args.extend(pick(xs, &sigma[k..]));
        let term = component_or_zero(f, &args);
        acc = acc.add(&term.scale_sign(chi(&sigma, &degs) * sign));
    }
    acc
}

/// Evaluates each block from its defining sum.
pub fn master_blocks(f: &AppendixMorphism, xs: &[&ObsElem]) -> MasterBlocks {
    let m = xs.len();
    let t = f.target();
    let degs: Vec<i32> = xs.iter().map(|x| x.degree).collect();
    let out_deg = degs.iter().sum::<i32>() + m as i32 - 2;
    let zero = t.zero(out_deg);
    let l1f = bracket_or_zero(t, &[&component_or_zero(f, xs)]);
    let i1 = f_of_l(f, xs, 1, neg_one_pow(m as i64));
    let i2 = if m >= 2 { f_of_l(f, xs, 2, -1) } else { zero.clone() };
    let mut i3 = zero.clone();
    for k in 3..=m {
        i3 = i3.add(&f_of_l(f, xs, k, neg_one_pow((k * (m - k)) as i64 + 1)));
    }
    let mut j = zero;
    for s in 1..m {
        let tt = m - s;
        for tau in unshuffles(s, tt) {
            if tau[0] > tau[s] {
                continue;
            }
            let left = component_or_zero(f, &pick(xs, &tau[..s]));
            let right = component_or_zero(f, &pick(xs, &tau[s..]));
            if left.is_zero() || right.is_zero() {
                continue;
            }
            let deg_left: i32 = tau[..s].iter().map(|&i| degs[i]).sum();
            let sign = chi(&tau, &degs) * neg_one_pow(s as i64 - 1) * neg_one_pow((tt as i64 - 1) * deg_left as i64);
            j = j.add(&bracket_or_zero(t, &[&left, &right]).scale_sign(sign));
        }
    }
    MasterBlocks { l1f, i1, i2, i3, j }
}

/// Outcome of a sampled run of the morphism identity at one arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterOutcome {
    pub samples: usize,
    pub vacuous_by_degree: bool,
    pub failure: Option<String>,
}

impl MasterOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn describe_inputs(xs: &[&ObsElem]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", parts.join(", "))
}

fn sample_tuples(f: &AppendixMorphism, m: usize, sampler: &mut dyn Sampler<ObsElem>, count: usize) -> (Vec<Vec<ObsElem>>, bool) {
    let src = f.source();
    let (tuples, vacuous) = plan_tuples(src.degree_range(), m, -2, f.target().degree_range());
    (draw_samples(sampler, |d| src.zero(d), &tuples, count), vacuous)
}

/// Checks `l'_1 f_m + I_(1) + I_(2) + I_(3) + J = 0` on sampled inputs, reporting every block on failure.
pub fn verify_master_equation(f: &AppendixMorphism, m: usize, sampler: &mut dyn Sampler<ObsElem>, count: usize) -> MasterOutcome {
    let (samples, vacuous) = sample_tuples(f, m, sampler, count);
    for xs in &samples {
        let refs: Vec<&ObsElem> = xs.iter().collect();
        let b = master_blocks(f, &refs);
        let total = b.sum();
        if !total.is_zero() {
            let w = format!(
                "inputs: {}; l1f = {:?}; I1 = {:?}; I2 = {:?}; I3 = {:?}; J = {:?}; sum = {:?}",
                describe_inputs(&refs),
                b.l1f,
                b.i1,
                b.i2,
                b.i3,
                b.j,
                total
            );
            return MasterOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: Some(w) };
        }
    }
    MasterOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: None }
}

/// A block of the identity and the closed form it is claimed to equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    /// `I_(1)` as contractions of `l_1 θ_i`, for `m ≥ 2`.
    I1,
    /// `I_(2)` through brackets `[v_i, v_k]`, for `m ≥ 2`.
    I2,
    /// `I_(3)` as a multiple of `ι_{v_1∧…∧v_m} ω`, for `m ≥ 3`.
    I3,
    /// `J` as brackets with `f_1`, for `m ≥ 3`.
    JViaF1,
    /// `J = ⟦f_1 x_1, f_1 x_2⟧` at `m = 2`.
    JBinary,
    /// `J` expanded in contractions and Lie derivatives, for `m ≥ 3`.
    JExpanded,
    /// `l'_1 f_m` through `d S_m`, `ω` and `L_{v_1∧…∧v_m} Ā(m−1)`, for `m ≥ 2`.
    L1F,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 7] =
        [ClosedForm::I1, ClosedForm::I2, ClosedForm::I3, ClosedForm::JViaF1, ClosedForm::JBinary, ClosedForm::JExpanded, ClosedForm::L1F];

    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::I1 => "i1-closed-form",
            ClosedForm::I2 => "i2-closed-form",
            ClosedForm::I3 => "i3-closed-form",
            ClosedForm::JViaF1 => "j-via-f1",
            ClosedForm::JBinary => "j-binary",
            ClosedForm::JExpanded => "j-expanded",
            ClosedForm::L1F => "l1f-closed-form",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            ClosedForm::I1 => "Appendix A Lemma A.2, 'For all m >= 2'",
            ClosedForm::I2 => "Appendix A Lemma A.3, 'the following equality holds'",
            ClosedForm::I3 => "Appendix A Lemma A.4, 'For all m >= 3'",
            ClosedForm::JViaF1 => "Appendix A Lemma A.5, 'the following equality holds'",
            ClosedForm::JBinary => "Appendix A Lemma A.5 proof, 'it is easy to see that'",
            ClosedForm::JExpanded => "Appendix A Lemma A.6, 'the following equality holds'",
            ClosedForm::L1F => "Appendix A Lemma A.7, 'the following equality holds'",
        }
    }

    /// Arities at which the closed form is asserted, up to `n + 1`.
    pub fn arities(self, n: usize) -> Vec<usize> {
        let lo = match self {
            ClosedForm::I1 | ClosedForm::I2 | ClosedForm::L1F => 2,
            ClosedForm::JBinary => return vec![2],
            ClosedForm::I3 | ClosedForm::JViaF1 | ClosedForm::JExpanded => 3,
        };
        (lo..=n + 1).collect()
    }

    /// The block the closed form describes.
    pub fn block(self, b: &MasterBlocks) -> QuElem {
        match self {
            ClosedForm::I1 => b.i1.clone(),
            ClosedForm::I2 => b.i2.clone(),
            ClosedForm::I3 => b.i3.clone(),
            ClosedForm::JViaF1 | ClosedForm::JBinary | ClosedForm::JExpanded => b.j.clone(),
            ClosedForm::L1F => b.l1f.clone(),
        }
    }

    pub fn evaluate(self, f: &AppendixMorphism, xs: &[&ObsElem]) -> QuElem {
        let e = ClosedFormEval::new(f, xs);
        match self {
            ClosedForm::I1 => e.i1(),
            ClosedForm::I2 => e.i2(),
            ClosedForm::I3 => e.i3(),
            ClosedForm::JViaF1 => e.j_via_f1(),
            ClosedForm::JBinary => e.j_binary(),
            ClosedForm::JExpanded => e.j_expanded(),
            ClosedForm::L1F => e.l1f(),
        }
    }
}

struct ClosedFormEval<'a> {
    f: &'a AppendixMorphism,
    t: &'a DgLieQu,
    xs: &'a [&'a ObsElem],
    vs: Vec<&'a PolyMultivector>,
    m: usize,
    out_deg: i32,
}

/// `(−1)^{i}` for 0-based `i`, read as the 1-based index `i + 1`.
fn sgn1(i: usize) -> i32 {
    neg_one_pow(i as i64 + 1)
}

impl<'a> ClosedFormEval<'a> {
    fn new(f: &'a AppendixMorphism, xs: &'a [&'a ObsElem]) -> Self {
        let m = xs.len();
        let out_deg = xs.iter().map(|x| x.degree).sum::<i32>() + m as i32 - 2;
        ClosedFormEval { f, t: f.target(), xs, vs: fields(xs), m, out_deg }
    }

    fn patch(&self) -> &Patch {
        self.t.patch()
    }

    fn res(&self, a: &PolyForm) -> TotElement {
        self.t.cover().res(a)
    }

    fn out(&self, t: TotElement) -> QuElem {
        self.t.tot(self.out_deg, t)
    }

    fn omega_term(&self) -> TotElement {
        self.res(&self.t.p.contract(&self.vs))
    }

    fn bin(&self, k: usize) -> i64 {
        binomial(self.m as u64, k as u64) as i64
    }

    /// `ζ(m)(−1)^m Σ_i (−1)^i ι_{v̂_i}(l_1 θ_i)`.
    fn i1(&self) -> QuElem {
        let mut acc = PolyForm::zero(self.patch(), 0);
        for (i, x) in self.xs.iter().enumerate() {
            if x.degree == 0 {
                continue;
            }
            let u = wedge_rest(self.patch(), None, &self.vs, &[i]);
            acc = acc.add(&crate::calculus::interior(&u, &exterior_d(&x.p)).scale_int(sgn1(i) as i64));
        }
        let s = zeta(self.m) * neg_one_pow(self.m as i64);
        self.out(self.res(&acc).scale_sign(s))
    }

    /// `Σ_{i<k} (−1)^{i+k} ι_{[v_i,v_k] ∧ rest} target`.
    fn bracket_sum(&self, target: &TotElement) -> TotElement {
        let mut acc = TotElement::zero(0);
        for i in 0..self.m {
            for k in i + 1..self.m {
                let br = vector_bracket(self.vs[i], self.vs[k]);
                let u = wedge_rest(self.patch(), Some(&br), &self.vs, &[i, k]);
                acc = acc.add(&target.interior(&u).scale_sign(neg_one_pow((i + k) as i64)));
            }
        }
        acc
    }

    /// `(Σ_{i<k<j} − Σ_{i<j<k} + Σ_{j<i<k}) (−1)^{i+j+k} ι_{[v_i,v_k] ∧ rest} θ_j`.
    fn triple_sum(&self) -> PolyForm {
        let mut acc = PolyForm::zero(self.patch(), 0);
        for i in 0..self.m {
            for k in i + 1..self.m {
                let br = vector_bracket(self.vs[i], self.vs[k]);
                for j in 0..self.m {
                    if j == i || j == k {
                        continue;
                    }
                    let region = if j > k {
                        1
                    } else if j > i {
                        -1
                    } else {
                        1
                    };
                    let u = wedge_rest(self.patch(), Some(&br), &self.vs, &[i, j, k]);
                    let term = crate::calculus::interior(&u, &self.xs[j].p);
                    let s = region * neg_one_pow((i + j + k) as i64 + 3);
                    acc = acc.add(&term.scale_int(s as i64));
                }
            }
        }
        acc
    }

    fn i2(&self) -> QuElem {
        let a1 = self.t.a.twisted(1);
        if self.m == 2 {
            let br = vector_bracket(self.vs[0], self.vs[1]);
            let theta = self.omega_term().sub(&a1.interior(&br));
            if self.out_deg == 0 {
                return Elt::new(0, br.neg(), theta);
            }
            return self.out(theta);
        }
        let c = neg_one_pow(self.bin(2));
        let am = self.t.a.twisted(self.m - 1);
        let first = self.omega_term().scale(&Rational::from_int(self.bin(2))).add(&self.bracket_sum(&am));
        let total = first.scale_sign(-c).add(&self.res(&self.triple_sum()).scale_sign(c));
        self.out(total)
    }

    fn i3(&self) -> QuElem {
        let m = self.m as i64;
        let sign = neg_one_pow(binomial(self.m as u64 + 1, 2) as i64) * neg_one_pow(m);
        let coeff = self.bin(2) - m + 1;
        self.out(self.omega_term().scale(&Rational::from_int(sign as i64 * coeff)))
    }

    fn j_via_f1(&self) -> QuElem {
        let mut acc = self.t.zero(self.out_deg);
        for i in 0..self.m {
            let f1 = component_or_zero(self.f, &[self.xs[i]]);
            let rest: Vec<&ObsElem> = (0..self.m).filter(|&j| j != i).map(|j| self.xs[j]).collect();
            let fr = component_or_zero(self.f, &rest);
            acc = acc.add(&bracket_or_zero(self.t, &[&f1, &fr]).scale_sign(neg_one_pow(i as i64)));
        }
        acc
    }

    fn j_binary(&self) -> QuElem {
        let a = component_or_zero(self.f, &[self.xs[0]]);
        let b = component_or_zero(self.f, &[self.xs[1]]);
        bracket_or_zero(self.t, &[&a, &b])
    }

    fn j_expanded(&self) -> QuElem {
        let am = self.t.a.twisted(self.m - 1);
        let mut u_sum = PolyForm::zero(self.patch(), 0);
        for i in 0..self.m {
            for j in 0..self.m {
                if i == j {
                    continue;
                }
                let region = if i < j { 1 } else { -1 };
                let u = wedge_rest(self.patch(), None, &self.vs, &[i, j]);
                let lt = crate::calculus::lie_derivative(self.vs[i], &self.xs[j].p);
                let term = crate::calculus::interior(&u, &lt);
                u_sum = u_sum.add(&term.scale_int((region * neg_one_pow((i + j) as i64)) as i64));
            }
        }
        let mut last = TotElement::zero(0);
        for i in 0..self.m {
            let u = wedge_rest(self.patch(), None, &self.vs, &[i]);
            last = last.add(&am.lie(self.vs[i]).interior(&u).scale_sign(sgn1(i)));
        }
        let forms = self.res(&self.triple_sum().scale_int(2).add(&u_sum));
        let rhs = forms.sub(&self.bracket_sum(&am).scale(&Rational::from_int(2))).sub(&last);
        let c = -neg_one_pow(self.bin(2));
        self.out(rhs.scale_sign(c))
    }

    fn l1f(&self) -> QuElem {
        let ds = exterior_d(&s_map(self.patch(), self.xs));
        let w = wedge_fields(self.patch(), &self.vs);
        let am = self.t.a.twisted(self.m - 1);
        let body = self.res(&ds).add(&self.omega_term().scale_sign(neg_one_pow(self.m as i64))).add(&am.lie(&w));
        let body = body.scale_sign(zeta(self.m));
        if self.out_deg == 0 {
            return Elt::new(0, PolyMultivector::zero(self.patch(), 1), body);
        }
        self.out(body)
    }
}

/// Checks one closed form against its block at arity `m` on sampled inputs.
pub fn check_closed_form(f: &AppendixMorphism, form: ClosedForm, m: usize, sampler: &mut dyn Sampler<ObsElem>, count: usize) -> JacobiOutcome {
    let (samples, vacuous) = sample_tuples(f, m, sampler, count);
    for xs in &samples {
        let refs: Vec<&ObsElem> = xs.iter().collect();
        let lhs = form.block(&master_blocks(f, &refs));
        let rhs = form.evaluate(f, &refs);
        let r = lhs.sub(&rhs);
        if !r.is_zero() {
            let w = format!("inputs: {}; block: {lhs:?}; closed form: {rhs:?}", describe_inputs(&refs));
            return JacobiOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: Some(w) };
        }
    }
    JacobiOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: None }
}

/// Whether every term of `a` has weight `w`.
pub fn form_is_homogeneous(a: &PolyForm, w: u32) -> bool {
    a.terms().all(|(_, f)| f.homogeneous_parts().keys().all(|&d| d + a.degree() as u32 == w))
}

pub fn flat_obs(x: &ObsElem) -> Flat {
    let mut out = flat_graded(0, &[], &x.v);
    out.extend(flat_graded(1, &[], &x.p));
    out
}

pub fn flat_qu(x: &QuElem) -> Flat {
    let mut out = flat_graded(0, &[], &x.v);
    out.extend(x.p.flat(1));
    out
}

/// Cohomology of both sides and the verdicts for a truncated linear map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIsoReport {
    pub source_cohomology: BTreeMap<i32, usize>,
    pub target_cohomology: BTreeMap<i32, usize>,
    pub chain_map: bool,
    pub quasi_isomorphism: bool,
}

impl QuasiIsoReport {
    pub fn passed(&self) -> bool {
        self.chain_map && self.quasi_isomorphism && self.source_cohomology == self.target_cohomology
    }

    pub fn summary(&self) -> String {
        format!(
            "source H = {:?}, target H = {:?}, chain map: {}, quasi-isomorphism: {}",
            self.source_cohomology, self.target_cohomology, self.chain_map, self.quasi_isomorphism
        )
    }
}

/// Weight of the homogeneous data `(ω, Ā)`, if they share one.
pub fn homogeneous_weight(p: &PrePlecticPatch, a: &DeligneCocycle) -> Option<u32> {
    let c = p.omega_weight();
    (form_is_homogeneous(p.omega(), c) && a.total().is_homogeneous(c)).then_some(c)
}

/// Vector fields whose contraction with weight-`c` data stays within weight `max_weight`.
pub fn field_slice(patch: &Patch, c: u32, max_weight: u32) -> FieldSpace {
    FieldSpace::by_poly_degree(patch, 1, (max_weight + 1).checked_sub(c))
}

/// The weight-`≤ W` slice of `L∞(X, ω)` as a complex.
pub fn observables_slice(p: &PrePlecticPatch, c: u32, max_weight: u32) -> Result<crate::fd::FdComplex<ObsElem>, String> {
    let patch = p.patch();
    let n = p.n();
    let obs = Observables::new(p);
    let mut bases = BTreeMap::new();
    let fs = field_slice(patch, c, max_weight);
    let hs = FormSpace::by_weight(patch, n - 1, max_weight);
    let mut ambient: Vec<ObsElem> = (0..fs.dim()).map(|i| Elt::new(0, fs.element(i), PolyForm::zero(patch, n - 1))).collect();
    ambient.extend((0..hs.dim()).map(|i| obs.form(0, hs.element(i))));
    let ham = kernel_basis(&ambient, |x| flat_graded(1, &[], &p.contract(&[&x.v]).add(&exterior_d(&x.p))));
    bases.insert(0, ham);
    for k in 1..n as i32 {
        let s = FormSpace::by_weight(patch, n - 1 - k as usize, max_weight);
        bases.insert(k, (0..s.dim()).map(|i| obs.form(k, s.element(i))).collect());
    }
    fd_complex(bases, &flat_obs, &|x| bracket_or_zero(&obs, &[x]))
}

/// The weight-`≤ W` slice of `dgLie_Qu(X, Ā)` as a complex.
pub fn quantomorphism_slice(t: &DgLieQu, c: u32, max_weight: u32) -> Result<crate::fd::FdComplex<QuElem>, String> {
    let patch = t.patch();
    let n = t.n();
    let cover = t.cover();
    let mut bases = BTreeMap::new();
    let fs = field_slice(patch, c, max_weight);
    let ts = TotSpace::by_weight(cover, n - 1, max_weight, t.cutoff());
    let mut ambient: Vec<QuElem> = (0..fs.dim()).map(|i| t.element(fs.element(i), TotElement::zero(n - 1))).collect();
    ambient.extend((0..ts.dim()).map(|i| t.tot(0, ts.element(i))));
    bases.insert(0, kernel_basis(&ambient, |x| t.defect(x).flat(1)));
    for k in 1..n as i32 {
        let s = TotSpace::by_weight(cover, n - 1 - k as usize, max_weight, t.cutoff());
        bases.insert(k, (0..s.dim()).map(|i| t.tot(k, s.element(i))).collect());
    }
    fd_complex(bases, &flat_qu, &|x| bracket_or_zero(t, &[x]))
}

/// `f_1` on the weight-`≤ W` slices: chain-map property and quasi-isomorphism.
pub fn f1_truncation(f: &AppendixMorphism, max_weight: u32) -> Result<QuasiIsoReport, String> {
    let t = f.target();
    let c = homogeneous_weight(&t.p, &t.a).ok_or_else(|| QuantError::NotHomogeneous.to_string())?;
    let src = observables_slice(&t.p, c, max_weight)?;
    let tgt = quantomorphism_slice(t, c, max_weight)?;
    let map = fd_chain_map(&src, &tgt, &flat_qu, &|x| f.component(&[x]))?;
    Ok(QuasiIsoReport {
        source_cohomology: src.complex.cohomology_dims(),
        target_cohomology: tgt.complex.cohomology_dims(),
        chain_map: map.is_chain_map(),
        quasi_isomorphism: map.is_quasi_isomorphism(),
    })
}

/// Projection of degree-0 quantomorphisms to vector fields on the weight-`≤ W` slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionReport {
    pub checked: usize,
    pub image_rank: usize,
    pub hamiltonian_rank: usize,
    pub failure: Option<String>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.image_rank == self.hamiltonian_rank
    }
}

/// Every projected `v` has `ι_v ω` exact (by the Poincaré homotopy), and the projection
/// reaches all Hamiltonian fields of the slice.
pub fn hamiltonian_projection(t: &DgLieQu, max_weight: u32) -> Result<ProjectionReport, String> {
    let c = homogeneous_weight(&t.p, &t.a).ok_or_else(|| QuantError::NotHomogeneous.to_string())?;
    let slice = quantomorphism_slice(t, c, max_weight)?;
    let basis = slice.spaces.get(&0).map(|s| s.basis().to_vec()).unwrap_or_default();
    let mut failure = None;
    for x in &basis {
        let a = t.p.contract(&[&x.v]);
        let exact = a.is_zero() || poincare_homotopy(&a).is_ok_and(|h| exterior_d(&h) == a);
        if !exact && failure.is_none() {
            failure = Some(format!("i_v omega not exact for v = {}", x.v));
        }
    }
    let image: Vec<PolyMultivector> = basis.iter().map(|x| x.v.clone()).filter(|v| !v.is_zero()).collect();
    let image_rank = crate::fd::sparse_columns(&image.iter().map(|v| flat_graded(0, &[], v)).collect::<Vec<_>>()).rank();
    let fs = field_slice(t.patch(), c, max_weight);
    let fields: Vec<PolyMultivector> = (0..fs.dim()).map(|i| fs.element(i)).collect();
    let ham = kernel_basis(&fields, |v| flat_graded(1, &[], &exterior_d(&t.p.contract(&[v]))));
    let hamiltonian_rank = Presented::new(ham, &|v: &PolyMultivector| flat_graded(0, &[], v))?.dim();
    Ok(ProjectionReport { checked: basis.len(), image_rank, hamiltonian_rank, failure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{BoxRegion, Interval};
    use crate::linfty::{check_generalized_jacobi, check_morphism};

    fn r3_trivial() -> (PrePlecticPatch, DgLieQu) {
        let p = PrePlecticPatch::parse(3, 2, "dx^dy^dz").unwrap();
        let cover = Cover::trivial(p.patch());
        let a = TotElement::from_components(2, [(vec![0], PolyForm::parse(p.patch(), "z dx^dy").unwrap())]);
        let a = DeligneCocycle::new(&cover, 2, a).unwrap();
        let t = DgLieQu::new(&p, &a).unwrap();
        (p, t)
    }

    fn r2_two_box() -> (PrePlecticPatch, DgLieQu) {
        let p = PrePlecticPatch::parse(2, 1, "dx^dy").unwrap();
        let half = |lo: Option<i64>, hi: Option<i64>| Interval::new(lo.map(Rational::from_int), hi.map(Rational::from_int));
        let cover = Cover::new(
            p.patch(),
            vec![BoxRegion::new("U1", vec![half(None, Some(1)), Interval::all()]), BoxRegion::new("U2", vec![half(Some(0), None), Interval::all()])],
        )
        .unwrap();
        let f = |s: &str| PolyForm::parse(p.patch(), s).unwrap();
        let a = TotElement::from_components(1, [(vec![0], f("x dy")), (vec![1], f("x dy + y dx + x dy")), (vec![0, 1], f("x*y"))]);
        let a = DeligneCocycle::new(&cover, 1, a).unwrap();
        let t = DgLieQu::new(&p, &a).unwrap();
        (p, t)
    }

    #[test]
    fn displayed_values() {
        let (p, t) = r3_trivial();
        let f = AppendixMorphism::new(&t);
        let field = |s: &str| PolyMultivector::parse(p.patch(), s).unwrap();
        let form = |s: &str| PolyForm::parse(p.patch(), s).unwrap();
        let x1 = Elt::new(0, field("Dx"), form("-y dz"));
        let x2 = Elt::new(0, field("Dy"), form("x dz"));
        let f1 = f.component(&[&x1]);
        assert_eq!(f1.v, field("Dx"));
        assert_eq!(f1.p, t.cover().res(&form("y dz + z dy")));
        assert!(t.accepts(&f1));
        assert!(s_map(p.patch(), &[&x1, &x2]).is_zero());
        assert_eq!(f.component(&[&x1, &x2]).p, t.cover().res(&form("z")));
        let eta = Elt::pure(p.patch(), 1, form("x"));
        assert_eq!(f.component(&[&eta]).p, t.cover().res(&form("-x")));
    }

    #[test]
    fn dg_lie_and_morphism() {
        for (p, t) in [r3_trivial(), r2_two_box()] {
            let f = AppendixMorphism::new(&t);
            let mut qs = QuSampler::new(&f, 2, 11);
            for _ in 0..5 {
                assert!(t.accepts(&qs.sample(0)));
            }
            for m in 1..=3 {
                assert!(check_generalized_jacobi(&t, m, &mut qs, 20).passed(), "jacobi m={m}");
            }
            let mut os = ObservableSampler::new(&p, 2, 5);
            for m in 1..=p.n() + 1 {
                let o = verify_master_equation(&f, m, &mut os, 20);
                assert!(o.passed(), "m={m}: {:?}", o.failure);
                assert!(check_morphism(&f, m, &mut os, 20).passed());
            }
        }
    }

    #[test]
    fn closed_forms_small() {
        let (p, t) = r3_trivial();
        let f = AppendixMorphism::new(&t);
        let mut os = ObservableSampler::new(&p, 2, 9);
        for form in ClosedForm::ALL {
            for m in form.arities(p.n()) {
                let o = check_closed_form(&f, form, m, &mut os, 20);
                assert!(o.passed(), "{} m={m}: {:?}", form.name(), o.failure);
            }
        }
    }

    #[test]
    fn j_via_f1_double_counts_at_arity_two() {
        for (p, t) in [r3_trivial(), r2_two_box()] {
            let f = AppendixMorphism::new(&t);
            let mut os = ObservableSampler::new(&p, 2, 13);
            for _ in 0..10 {
                let (x, y) = (os.sample(0), os.sample(0));
                let j = master_blocks(&f, &[&x, &y]).j;
                assert_eq!(ClosedForm::JBinary.evaluate(&f, &[&x, &y]), j);
                let doubled = ClosedForm::JViaF1.evaluate(&f, &[&x, &y]);
                assert_eq!(doubled, j.scale(&Rational::from_int(2)));
            }
        }
    }

    #[test]
    fn truncated_quasi_isomorphism() {
        let (_, t) = r2_two_box();
        let f = AppendixMorphism::new(&t);
        let r = f1_truncation(&f, 3).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let h = hamiltonian_projection(&t, 3).unwrap();
        assert!(h.passed(), "{h:?}");
    }
}
