//! L∞-algebras and L∞-morphisms given by bracket evaluators, plus sampled identity checks.
//!
//! Conventions are homological: `l_k` has degree `k − 2`, morphism components `f_k`
//! have degree `k − 1`, and signs are those of Lada–Markl.

use crate::perm::{block_unshuffles, chi, compositions, neg_one_pow, unshuffles};
use crate::rational::Rational;
use crate::report::CheckRecord;
use std::fmt::Debug;

/// Vector-space operations on elements. Zero summands are absorbed regardless of degree.
pub trait Linear: Clone + Debug {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn is_zero(&self) -> bool;

    fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn scale_sign(&self, s: i32) -> Self {
        if s >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }
}

pub type Elem<A> = <A as LInfty>::Elem;

pub trait LInfty {
    type Elem: Linear;

    fn degree(&self, x: &Self::Elem) -> i32;
    /// The zero element of the given degree.
    fn zero(&self, degree: i32) -> Self::Elem;
    /// Inclusive range of degrees in which the carrier can be nonzero.
    fn degree_range(&self) -> (i32, i32);
    /// Largest `k` with `l_k` possibly nonzero.
    fn max_arity(&self) -> usize;
    /// `l_k(x_1, …, x_k)` with `k = xs.len() ≥ 1`.
    fn bracket(&self, xs: &[&Self::Elem]) -> Self::Elem;

    fn describe(&self, x: &Self::Elem) -> String {
        format!("{x:?}")
    }
}

pub trait LInftyMorphism {
    type Source: LInfty;
    type Target: LInfty;

    fn source(&self) -> &Self::Source;
    fn target(&self) -> &Self::Target;
    fn max_arity(&self) -> usize;
    /// `f_k(x_1, …, x_k)` with `k = xs.len() ≥ 1`.
    fn component(&self, xs: &[&Elem<Self::Source>]) -> Elem<Self::Target>;
}

/// Produces elements of a prescribed degree.
pub trait Sampler<E> {
    fn sample(&mut self, degree: i32) -> E;
}

fn degrees<L: LInfty>(l: &L, xs: &[&L::Elem]) -> Vec<i32> {
    xs.iter().map(|x| l.degree(x)).collect()
}

/// `l_k` when `k` is within the declared arity, zero otherwise.
pub fn bracket_or_zero<L: LInfty>(l: &L, xs: &[&L::Elem]) -> L::Elem {
    let k = xs.len();
    let out_deg = degrees(l, xs).iter().sum::<i32>() + k as i32 - 2;
    let (lo, hi) = l.degree_range();
    if k == 0 || k > l.max_arity() || out_deg < lo || out_deg > hi {
        return l.zero(out_deg);
    }
    l.bracket(xs)
}

/// `f_k` when `k` is within the declared arity, zero otherwise.
pub fn component_or_zero<F: LInftyMorphism>(f: &F, xs: &[&Elem<F::Source>]) -> Elem<F::Target> {
    let k = xs.len();
    let src = f.source();
    let out_deg = xs.iter().map(|x| src.degree(x)).sum::<i32>() + k as i32 - 1;
    let (lo, hi) = f.target().degree_range();
    if k == 0 || k > f.max_arity() || out_deg < lo || out_deg > hi {
        return f.target().zero(out_deg);
    }
    f.component(xs)
}

fn pick<'a, E>(xs: &[&'a E], idx: &[usize]) -> Vec<&'a E> {
    idx.iter().map(|&i| xs[i]).collect()
}

/// Σ_{k+l=m+1} Σ_{σ∈Sh(k,m−k)} χ(σ)(−1)^{k(l−1)} l_l(l_k(x_σ(1..k)), x_σ(k+1..m)).
pub fn jacobi_residual<L: LInfty>(l: &L, xs: &[&L::Elem]) -> L::Elem {
    let m = xs.len();
    let degs = degrees(l, xs);
    let out_deg = degs.iter().sum::<i32>() + m as i32 - 3;
    let mut acc = l.zero(out_deg);
    for k in 1..=m {
        let ll = m + 1 - k;
        if k > l.max_arity() || ll > l.max_arity() {
            continue;
        }
        for sigma in unshuffles(k, m - k) {
            let inner = bracket_or_zero(l, &pick(xs, &sigma[..k]));
            if inner.is_zero() {
                continue;
            }
            let mut args = vec![&inner];
            args.extend(pick(xs, &sigma[k..]));
            let outer = bracket_or_zero(l, &args);
            let s = chi(&sigma, &degs) * neg_one_pow((k * (ll - 1)) as i64);
            acc = acc.add(&outer.scale_sign(s));
        }
    }
    acc
}

/// The part Σ_{j+k=m+1} Σ_σ χ(σ)(−1)^{k(j−1)+1} f_j(l_k(…), …) of the morphism identity,
/// restricted to inner arities `k` accepted by `keep`.
pub fn morphism_f_of_l<F: LInftyMorphism>(f: &F, xs: &[&Elem<F::Source>], keep: impl Fn(usize) -> bool) -> Elem<F::Target> {
    let src = f.source();
    let m = xs.len();
    let degs = degrees(src, xs);
    let out_deg = degs.iter().sum::<i32>() + m as i32 - 2;
    let mut acc = f.target().zero(out_deg);
    for k in 1..=m {
        if !keep(k) || k > src.max_arity() {
            continue;
        }
        let j = m + 1 - k;
        if j > f.max_arity() {
            continue;
        }
        for sigma in unshuffles(k, m - k) {
            let inner = bracket_or_zero(src, &pick(xs, &sigma[..k]));
            if inner.is_zero() {
                continue;
            }
            let mut args = vec![&inner];
            args.extend(pick(xs, &sigma[k..]));
            let val = component_or_zero(f, &args);
            let s = chi(&sigma, &degs) * neg_one_pow((k * (j - 1) + 1) as i64);
            acc = acc.add(&val.scale_sign(s));
        }
    }
    acc
}

/// The part Σ_t Σ_τ χ(τ)(−1)^u l'_t(f_{k1}(…), …, f_{kt}(…)) of the morphism identity,
/// restricted to the target arities `t` accepted by `keep`.
pub fn morphism_l_of_f<F: LInftyMorphism>(f: &F, xs: &[&Elem<F::Source>], keep: impl Fn(usize) -> bool) -> Elem<F::Target> {
    let src = f.source();
    let tgt = f.target();
    let m = xs.len();
    let degs = degrees(src, xs);
    let out_deg = degs.iter().sum::<i32>() + m as i32 - 2;
    let mut acc = tgt.zero(out_deg);
    for t in 1..=m.min(tgt.max_arity()) {
        if !keep(t) {
            continue;
        }
        for blocks in compositions(m, t) {
            if blocks.iter().any(|&b| b > f.max_arity()) {
                continue;
            }
            let starts: Vec<usize> = blocks
                .iter()
                .scan(0, |s, &b| {
                    let st = *s;
                    *s += b;
                    Some(st)
                })
                .collect();
            for tau in block_unshuffles(&blocks) {
                if (1..t).any(|i| tau[starts[i - 1]] > tau[starts[i]]) {
                    continue;
                }
                let mut u: i64 = blocks.iter().take(t.saturating_sub(1)).enumerate().map(|(i, &b)| ((t - 1 - i) * (b - 1)) as i64).sum();
                for i in 1..t {
                    let prefix: i64 = tau[..starts[i]].iter().map(|&p| degs[p] as i64).sum();
                    u += (1 - blocks[i] as i64) * prefix;
                }
                let vals: Vec<Elem<F::Target>> = (0..t).map(|i| component_or_zero(f, &pick(xs, &tau[starts[i]..starts[i] + blocks[i]]))).collect();
                if vals.iter().any(|v| v.is_zero()) {
                    continue;
                }
                let refs: Vec<&Elem<F::Target>> = vals.iter().collect();
                let val = bracket_or_zero(tgt, &refs);
                let s = chi(&tau, &degs) * neg_one_pow(u);
                acc = acc.add(&val.scale_sign(s));
            }
        }
    }
    acc
}

/// Full morphism identity residual (zero iff the identity holds on `xs`).
pub fn morphism_residual<F: LInftyMorphism>(f: &F, xs: &[&Elem<F::Source>]) -> Elem<F::Target> {
    morphism_f_of_l(f, xs, |_| true).add(&morphism_l_of_f(f, xs, |_| true))
}

/// All degree tuples of length `m` within `range`.
pub fn degree_tuples(range: (i32, i32), m: usize) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for t in &out {
            for d in range.0..=range.1 {
                let mut u = t.clone();
                u.push(d);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Input tuples for an identity whose output sits in degree `Σ deg + m + shift`.
///
/// Tuples whose output degree leaves `out_range` are vacuous; they are used only when no
/// other tuple exists. Returns the tuples and whether they are all vacuous.
pub fn plan_tuples(range: (i32, i32), m: usize, shift: i32, out_range: (i32, i32)) -> (Vec<Vec<i32>>, bool) {
    let all = degree_tuples(range, m);
    let live: Vec<Vec<i32>> = all
        .iter()
        .filter(|t| {
            let d = t.iter().sum::<i32>() + m as i32 + shift;
            d >= out_range.0 && d <= out_range.1
        })
        .cloned()
        .collect();
    if live.is_empty() {
        (all, true)
    } else {
        (live, false)
    }
}

/// Draws `count` input tuples, cycling through the planned degree patterns.
/// The first sample has a zero first argument; the second repeats an argument when possible.
pub fn draw_samples<E: Linear>(sampler: &mut dyn Sampler<E>, zero: impl Fn(i32) -> E, tuples: &[Vec<i32>], count: usize) -> Vec<Vec<E>> {
    let mut out = Vec::with_capacity(count);
    for s in 0..count {
        let mut pattern = tuples[s % tuples.len()].clone();
        if s == 1 && pattern.len() >= 2 {
            if let Some(t) = tuples.iter().find(|t| t[0] == t[1]) {
                pattern = t.clone();
            }
        }
        let mut xs: Vec<E> = pattern.iter().map(|&d| sampler.sample(d)).collect();
        if s == 0 && !xs.is_empty() {
            xs[0] = zero(pattern[0]);
        }
        if s == 1 && xs.len() >= 2 && pattern[0] == pattern[1] {
            xs[1] = xs[0].clone();
        }
        out.push(xs);
    }
    out
}

fn witness<L: LInfty>(l: &L, xs: &[&L::Elem], residual: &L::Elem) -> String {
    let inputs: Vec<String> = xs.iter().map(|x| l.describe(x)).collect();
    format!("inputs: [{}]; residual: {}", inputs.join(", "), l.describe(residual))
}

/// Outcome of a sampled generalized-Jacobi run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiOutcome {
    pub samples: usize,
    pub vacuous_by_degree: bool,
    pub failure: Option<String>,
}

impl JacobiOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_record(self, name: impl Into<String>, anchor: impl Into<String>) -> CheckRecord {
        let vacuous = self.vacuous_by_degree;
        let rec = match self.failure {
            None => CheckRecord::pass(name, anchor, self.samples),
            Some(w) => CheckRecord::fail(name, anchor, self.samples, w),
        };
        if vacuous {
            rec.with_detail("output degree outside the carrier; identity vanishes by degree")
        } else {
            rec
        }
    }
}

pub fn check_generalized_jacobi<L: LInfty>(l: &L, m: usize, sampler: &mut dyn Sampler<L::Elem>, count: usize) -> JacobiOutcome {
    let (tuples, vacuous) = plan_tuples(l.degree_range(), m, -3, l.degree_range());
    let samples = draw_samples(sampler, |d| l.zero(d), &tuples, count);
    for xs in &samples {
        let refs: Vec<&L::Elem> = xs.iter().collect();
        let r = jacobi_residual(l, &refs);
        if !r.is_zero() {
            return JacobiOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: Some(witness(l, &refs, &r)) };
        }
    }
    JacobiOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: None }
}

pub fn check_morphism<F: LInftyMorphism>(f: &F, m: usize, sampler: &mut dyn Sampler<Elem<F::Source>>, count: usize) -> JacobiOutcome {
    let src = f.source();
    let (tuples, vacuous) = plan_tuples(src.degree_range(), m, -2, f.target().degree_range());
    let samples = draw_samples(sampler, |d| src.zero(d), &tuples, count);
    for xs in &samples {
        let refs: Vec<&Elem<F::Source>> = xs.iter().collect();
        let r = morphism_residual(f, &refs);
        if !r.is_zero() {
            let inputs: Vec<String> = refs.iter().map(|x| src.describe(x)).collect();
            let w = format!("inputs: [{}]; residual: {}", inputs.join(", "), f.target().describe(&r));
            return JacobiOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: Some(w) };
        }
    }
    JacobiOutcome { samples: samples.len(), vacuous_by_degree: vacuous, failure: None }
}

/// Graded skew-symmetry of `l_k` under each adjacent transposition.
pub fn check_skew_symmetry<L: LInfty>(l: &L, k: usize, sampler: &mut dyn Sampler<L::Elem>, count: usize) -> Result<(), String> {
    let tuples = degree_tuples(l.degree_range(), k);
    let samples = draw_samples(sampler, |d| l.zero(d), &tuples, count);
    for xs in &samples {
        let refs: Vec<&L::Elem> = xs.iter().collect();
        let base = bracket_or_zero(l, &refs);
        for i in 0..k.saturating_sub(1) {
            let mut sw = refs.clone();
            sw.swap(i, i + 1);
            let s = -neg_one_pow((l.degree(refs[i]) * l.degree(refs[i + 1])) as i64);
            let r = base.sub(&bracket_or_zero(l, &sw).scale_sign(s));
            if !r.is_zero() {
                return Err(witness(l, &refs, &r));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("compose_low needs morphisms with components in arities 1 and 2 only")]
pub struct ArityError;

/// `F ∘ G` for morphisms without components above arity 2.
pub struct ComposedLow<'a, F, G> {
    pub f: &'a F,
    pub g: &'a G,
}

pub fn compose_low<'a, F, G>(f: &'a F, g: &'a G) -> Result<ComposedLow<'a, F, G>, ArityError>
where
    G: LInftyMorphism,
    F: LInftyMorphism<Source = G::Target>,
{
    if f.max_arity() > 2 || g.max_arity() > 2 {
        return Err(ArityError);
    }
    Ok(ComposedLow { f, g })
}

impl<F, G> LInftyMorphism for ComposedLow<'_, F, G>
where
    G: LInftyMorphism,
    F: LInftyMorphism<Source = G::Target>,
{
    type Source = G::Source;
    type Target = F::Target;

    fn source(&self) -> &Self::Source {
        self.g.source()
    }

    fn target(&self) -> &Self::Target {
        self.f.target()
    }

    fn max_arity(&self) -> usize {
        2
    }

    fn component(&self, xs: &[&Elem<Self::Source>]) -> Elem<Self::Target> {
        match xs.len() {
            1 => component_or_zero(self.f, &[&component_or_zero(self.g, xs)]),
            2 => {
                let g2 = component_or_zero(self.g, xs);
                let a = component_or_zero(self.f, &[&g2]);
                let g1x = component_or_zero(self.g, &xs[..1]);
                let g1y = component_or_zero(self.g, &xs[1..]);
                a.add(&component_or_zero(self.f, &[&g1x, &g1y]))
            }
            _ => {
                let out_deg = xs.iter().map(|x| self.source().degree(x)).sum::<i32>() + xs.len() as i32 - 1;
                self.target().zero(out_deg)
            }
        }
    }
}

/// Compares two morphisms componentwise on sampled inputs for arities `1..=max_arity`.
pub fn check_equal_morphisms<F, G>(f: &F, g: &G, max_arity: usize, sampler: &mut dyn Sampler<Elem<F::Source>>, count: usize) -> Result<(), String>
where
    F: LInftyMorphism,
    G: LInftyMorphism<Source = F::Source, Target = F::Target>,
{
    let src = f.source();
    for k in 1..=max_arity {
        let tuples = degree_tuples(src.degree_range(), k);
        for xs in draw_samples(sampler, |d| src.zero(d), &tuples, count) {
            let refs: Vec<&Elem<F::Source>> = xs.iter().collect();
            let r = component_or_zero(f, &refs).sub(&component_or_zero(g, &refs));
            if !r.is_zero() {
                let inputs: Vec<String> = refs.iter().map(|x| src.describe(x)).collect();
                return Err(format!("arity {k}; inputs: [{}]; difference: {}", inputs.join(", "), f.target().describe(&r)));
            }
        }
    }
    Ok(())
}

/// Morphism with only a linear component.
pub struct Strict<'a, S, T, F> {
    source: &'a S,
    target: &'a T,
    map: F,
}

impl<'a, S, T, F> Strict<'a, S, T, F>
where
    S: LInfty,
    T: LInfty,
    F: Fn(&S::Elem) -> T::Elem,
{
    pub fn new(source: &'a S, target: &'a T, map: F) -> Self {
        Strict { source, target, map }
    }
}

impl<S, T, F> LInftyMorphism for Strict<'_, S, T, F>
where
    S: LInfty,
    T: LInfty,
    F: Fn(&S::Elem) -> T::Elem,
{
    type Source = S;
    type Target = T;

    fn source(&self) -> &S {
        self.source
    }

    fn target(&self) -> &T {
        self.target
    }

    fn max_arity(&self) -> usize {
        1
    }

    fn component(&self, xs: &[&S::Elem]) -> T::Elem {
        (self.map)(xs[0])
    }
}

/// `F ∘ G` with `F` strict: `(F∘G)_k = F_1 ∘ G_k`.
pub struct PostStrict<'a, F, G> {
    pub f: &'a F,
    pub g: &'a G,
}

impl<F, G> LInftyMorphism for PostStrict<'_, F, G>
where
    G: LInftyMorphism,
    F: LInftyMorphism<Source = G::Target>,
{
    type Source = G::Source;
    type Target = F::Target;

    fn source(&self) -> &Self::Source {
        self.g.source()
    }

    fn target(&self) -> &Self::Target {
        self.f.target()
    }

    fn max_arity(&self) -> usize {
        self.g.max_arity()
    }

    fn component(&self, xs: &[&Elem<Self::Source>]) -> Elem<Self::Target> {
        debug_assert_eq!(self.f.max_arity(), 1);
        component_or_zero(self.f, &[&component_or_zero(self.g, xs)])
    }
}

/// `F ∘ G` with `G` strict: `(F∘G)_k = F_k ∘ (G_1 ⊗ … ⊗ G_1)`.
pub struct PreStrict<'a, F, G> {
    pub f: &'a F,
    pub g: &'a G,
}

impl<F, G> LInftyMorphism for PreStrict<'_, F, G>
where
    G: LInftyMorphism,
    F: LInftyMorphism<Source = G::Target>,
{
    type Source = G::Source;
    type Target = F::Target;

    fn source(&self) -> &Self::Source {
        self.g.source()
    }

    fn target(&self) -> &Self::Target {
        self.f.target()
    }

    fn max_arity(&self) -> usize {
        self.f.max_arity()
    }

    fn component(&self, xs: &[&Elem<Self::Source>]) -> Elem<Self::Target> {
        debug_assert_eq!(self.g.max_arity(), 1);
        let images: Vec<Elem<G::Target>> = xs.iter().map(|x| component_or_zero(self.g, &[*x])).collect();
        let refs: Vec<&Elem<G::Target>> = images.iter().collect();
        component_or_zero(self.f, &refs)
    }
}

/// Sampler transformed by a map on elements.
pub struct MapSampler<'a, A, F> {
    pub inner: &'a mut dyn Sampler<A>,
    pub map: F,
}

impl<A, B, F: Fn(A) -> B> Sampler<B> for MapSampler<'_, A, F> {
    fn sample(&mut self, degree: i32) -> B {
        (self.map)(self.inner.sample(degree))
    }
}

/// Sign of the brackets `l_{k≥3}` of the observables algebra: `ζ(k) = −(−1)^{k(k+1)/2}`.
pub fn zeta(k: usize) -> i32 {
    -neg_one_pow((k * (k + 1) / 2) as i64)
}

/// Sign of the KKS components: `κ(k) = −(−1)^{k(k−1)/2}`.
pub fn kappa(k: usize) -> i32 {
    -neg_one_pow((k * (k.saturating_sub(1)) / 2) as i64)
}
