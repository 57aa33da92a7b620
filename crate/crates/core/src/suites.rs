//! Named verification suites over the data zoo.

use crate::calculus::{cartan_commutator_residual, extended_cartan_residual, exterior_d};
use crate::cech::{CechSampler, Collation, Cover};
use crate::config::{ConfigError, DataError, NamedCocycle, NamedCover, NamedLie, NamedPlectic, SuiteConfig, Zoo};
use crate::courant::{
    atiyah_iso_residual, atiyah_iso_truncation, weak_equivalence_truncations, AtiyahOne, CourantDiagram, FieldFormSampler, Forget,
    ObservablesInAtiyah, ProofIdentity, PsiAtiyah, TruncatedSampler,
};
use crate::extensions::{heisenberg_r2, string_fiber_data, StringLie2};
use crate::fiber::check_fiber_hypotheses;
use crate::forms::{Patch, PolyForm, PolyMultivector};
use crate::kks_fiber::{kks_fiber_data, kks_fiber_truncation};
use crate::lie::{ce_cocycle_witness, killing_triple, string_cocycle, FdSampler};
use crate::linfty::{
    check_equal_morphisms, check_generalized_jacobi, check_morphism, compose_low, JacobiOutcome, LInftyMorphism, Linear, MapSampler, PostStrict,
    PreStrict,
};
use crate::observables::{kks_proof_identity_residual, project_field, Kks, ObservableSampler, Observables};
use crate::perm::neg_one_pow;
use crate::quantomorphism::{
    check_closed_form, f1_truncation, hamiltonian_projection, verify_master_equation, AppendixMorphism, ClosedForm, DgLieQu, MasterOutcome, QuSampler,
};
use crate::rational::Rational;
use crate::report::{CheckRecord, VerificationReport};
use crate::sample;
use rand::Rng;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Cartan,
    Observables,
    Kks,
    MasterEquation,
    CourantAtiyah,
    Fiber,
    Collation,
    Cohomology,
    Extensions,
    All,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Cartan,
        Suite::Observables,
        Suite::Kks,
        Suite::MasterEquation,
        Suite::CourantAtiyah,
        Suite::Fiber,
        Suite::Collation,
        Suite::Cohomology,
        Suite::Extensions,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cartan => "cartan",
            Suite::Observables => "observables",
            Suite::Kks => "kks",
            Suite::MasterEquation => "master-equation",
            Suite::CourantAtiyah => "courant-atiyah",
            Suite::Fiber => "fiber",
            Suite::Collation => "collation",
            Suite::Cohomology => "cohomology",
            Suite::Extensions => "extensions",
            Suite::All => "all",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Cartan => "d^2 = 0, graded commutativity, the Cartan commutator and the extended Cartan identity",
            Suite::Observables => "generalized Jacobi identities of the observables L-infinity algebra",
            Suite::Kks => "the KKS cocycle as an L-infinity morphism and its homotopy fiber square",
            Suite::MasterEquation => "the quantomorphism morphism equation and the closed forms of its blocks",
            Suite::CourantAtiyah => "Courant and Atiyah algebras, their morphisms and the comparison diagram",
            Suite::Fiber => "strict fiber product hypotheses for the KKS and string squares",
            Suite::Collation => "collation by polynomial weights and its chain homotopy",
            Suite::Cohomology => "truncated cohomology of covers and quasi-isomorphism of linear parts",
            Suite::Extensions => "su(2) string Lie 2-algebra and the Heisenberg extension of the plane",
            Suite::All => "every suite above",
        }
    }

    /// The suites run by this one.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::ALL.into_iter().filter(|s| *s != Suite::All).collect(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, SuiteError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite '{0}'")]
    UnknownSuite(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Sampling and truncation parameters shared by every check of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub seed: u64,
    pub samples: usize,
    pub poly_degree: u32,
    pub truncation: u32,
}

impl From<&SuiteConfig> for Params {
    fn from(c: &SuiteConfig) -> Self {
        Params { seed: c.seed, samples: c.samples, poly_degree: c.poly_degree, truncation: c.truncation }
    }
}

impl Params {
    /// Seed of the check called `name`, independent of scheduling.
    pub fn seed_for(&self, name: &str) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in name.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        let mut z = h ^ self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

type Job = Box<dyn FnOnce() -> Vec<CheckRecord> + Send>;

fn job(f: impl FnOnce() -> Vec<CheckRecord> + Send + 'static) -> Job {
    Box::new(f)
}

/// Validates the config, loads its data and runs the suite.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport, SuiteError> {
    let suite: Suite = config.suite.parse()?;
    config.validate()?;
    let zoo = config.zoo()?;
    let start = Instant::now();
    let mut report = run_on(&zoo, suite, Params::from(config));
    if config.wall_time {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

/// Runs a suite on loaded data; checks run in parallel and are reported sorted by name.
pub fn run_on(zoo: &Zoo, suite: Suite, params: Params) -> VerificationReport {
    let jobs: Vec<Job> = suite.members().into_iter().flat_map(|s| jobs_for(s, zoo, params)).collect();
    let checks: Vec<CheckRecord> = jobs.into_par_iter().flat_map_iter(|j| j()).collect();
    VerificationReport::new(suite.name(), params.seed, params.samples, params.poly_degree, params.truncation, checks)
}

fn jobs_for(suite: Suite, zoo: &Zoo, p: Params) -> Vec<Job> {
    match suite {
        Suite::Cartan => cartan_jobs(zoo, p),
        Suite::Observables => observables_jobs(zoo, p),
        Suite::Kks => kks_jobs(zoo, p),
        Suite::MasterEquation => master_equation_jobs(zoo, p),
        Suite::CourantAtiyah => courant_atiyah_jobs(zoo, p),
        Suite::Fiber => fiber_jobs(zoo, p),
        Suite::Collation => collation_jobs(zoo, p),
        Suite::Cohomology => cohomology_jobs(zoo, p),
        Suite::Extensions => extension_jobs(zoo, p),
        Suite::All => Vec::new(),
    }
}

/// Runs `check` on sample indices `0..count`, stopping at the first witness.
fn sampled(name: String, anchor: &str, count: usize, mut check: impl FnMut() -> Option<String>) -> CheckRecord {
    for i in 0..count {
        if let Some(w) = check() {
            return CheckRecord::fail(name, anchor, i + 1, w);
        }
    }
    CheckRecord::pass(name, anchor, count)
}

fn outcome_record(name: String, anchor: &str, o: MasterOutcome) -> CheckRecord {
    JacobiOutcome { samples: o.samples, vacuous_by_degree: o.vacuous_by_degree, failure: o.failure }.into_record(name, anchor)
}

fn failed_setup(name: String, anchor: &str, message: String) -> Vec<CheckRecord> {
    vec![CheckRecord::fail(name, anchor, 0, message)]
}

// Cartan calculus.

const D_SQUARED: &str = "§1.2.1, 'graded commutator of d and'";
const WEDGE: &str = "§1.2.1, 'form α ∈ Ω•(X)'";
const CARTAN: &str = "§1.2.1 Eq. (2), 'Lie derivative and the interior product'";
const EXTENDED_CARTAN: &str = "§3.1 Lemma 3.1, 'the following identity holds'";

fn cartan_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &dim in &zoo.cartan_dims {
        let prefix = format!("cartan.r{dim}");
        let pre = prefix.clone();
        jobs.push(job(move || {
            let patch = Patch::standard(dim);
            let name = format!("{pre}.d-squared");
            let mut rng = sample::seeded(p.seed_for(&name));
            vec![sampled(name, D_SQUARED, p.samples, || {
                let k = rng.gen_range(0..=dim);
                let a: PolyForm = sample::graded(&mut rng, &patch, k, p.poly_degree, 3);
                let r = exterior_d(&exterior_d(&a));
                (!r.is_zero()).then(|| format!("a = {a}; d(d a) = {r}"))
            })]
        }));
        let pre = prefix.clone();
        jobs.push(job(move || {
            let patch = Patch::standard(dim);
            let name = format!("{pre}.wedge-graded-commutativity");
            let mut rng = sample::seeded(p.seed_for(&name));
            vec![sampled(name, WEDGE, p.samples, || {
                let (i, j) = (rng.gen_range(0..=dim), rng.gen_range(0..=dim));
                let a: PolyForm = sample::graded(&mut rng, &patch, i, p.poly_degree, 3);
                let b: PolyForm = sample::graded(&mut rng, &patch, j, p.poly_degree, 3);
                let lhs = a.wedge(&b);
                let rhs = b.wedge(&a).scale_int(neg_one_pow((i * j) as i64) as i64);
                (lhs != rhs).then(|| format!("a = {a}; b = {b}; a^b = {lhs}; sign * b^a = {rhs}"))
            })]
        }));
        let pre = prefix.clone();
        jobs.push(job(move || {
            let patch = Patch::standard(dim);
            let name = format!("{pre}.cartan-commutator");
            let mut rng = sample::seeded(p.seed_for(&name));
            vec![sampled(name, CARTAN, p.samples, || {
                let (i, j, k) = (rng.gen_range(1..=dim.min(3)), rng.gen_range(1..=dim.min(3)), rng.gen_range(0..=dim));
                let u: PolyMultivector = sample::graded(&mut rng, &patch, i, p.poly_degree, 2);
                let v: PolyMultivector = sample::graded(&mut rng, &patch, j, p.poly_degree, 2);
                let a: PolyForm = sample::graded(&mut rng, &patch, k, p.poly_degree, 2);
                let r = cartan_commutator_residual(&u, &v, &a);
                (!r.is_zero()).then(|| format!("u = {u}; v = {v}; a = {a}; residual = {r}"))
            })]
        }));
        for k in 1..=4usize {
            let pre = prefix.clone();
            jobs.push(job(move || {
                let patch = Patch::standard(dim);
                let name = format!("{pre}.extended-cartan.k{k}");
                let mut rng = sample::seeded(p.seed_for(&name));
                vec![sampled(name, EXTENDED_CARTAN, p.samples, || {
                    let deg = rng.gen_range(k.saturating_sub(1).min(dim)..=dim);
                    let beta: PolyForm = sample::graded(&mut rng, &patch, deg, p.poly_degree, 2);
                    let vs: Vec<PolyMultivector> = (0..k).map(|_| sample::graded(&mut rng, &patch, 1, p.poly_degree, 2)).collect();
                    let r = extended_cartan_residual(&beta, &vs);
                    (!r.is_zero()).then(|| {
                        let fields: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                        format!("beta = {beta}; fields = [{}]; residual = {r}", fields.join(", "))
                    })
                })]
            }));
        }
    }
    jobs
}

// Observables and KKS.

const OBSERVABLES: &str = "§3.1 Prop 3.2, 'There exists a Lie n-algebra'";
const KKS: &str = "§3.2 Prop 3.8, 'define an L∞-morphism'";
const KKS_PROOF: &str = "§3.2 proof of Prop 3.8, 'define an L∞-morphism'";

fn observables_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for np in &zoo.plectic {
        let n = np.plectic.n();
        for m in 1..=n + 3 {
            let np = np.clone();
            jobs.push(job(move || {
                let name = format!("observables.{}.jacobi.m{m}", np.name);
                let obs = Observables::new(&np.plectic);
                let mut s = ObservableSampler::new(&np.plectic, p.poly_degree, p.seed_for(&name));
                let out = check_generalized_jacobi(&obs, m, &mut s, p.samples);
                if m == n + 3 && !out.vacuous_by_degree {
                    return vec![CheckRecord::fail(name, OBSERVABLES, out.samples, "identity is not zero by degree".into())];
                }
                vec![out.into_record(name, OBSERVABLES)]
            }));
        }
    }
    jobs
}

fn kks_fiber_job(prefix: String, np: NamedPlectic, p: Params) -> Job {
    job(move || {
        let data = kks_fiber_data(&np.plectic);
        let fd = kks_fiber_truncation(&np.plectic, p.truncation);
        let mut s = ObservableSampler::new(&np.plectic, p.poly_degree, p.seed_for(&prefix));
        let arity = data.lift.max_arity();
        check_fiber_hypotheses(&prefix, &data.pi_l, &data.lift, &data.pi_r, &data.kks, &fd, &mut s, arity, p.samples).records()
    })
}

fn kks_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for np in &zoo.plectic {
        let n = np.plectic.n();
        for m in 1..=n + 1 {
            let np = np.clone();
            jobs.push(job(move || {
                let name = format!("kks.{}.morphism.m{m}", np.name);
                let kks = Kks::new(&np.plectic);
                let mut obs = ObservableSampler::new(&np.plectic, p.poly_degree, p.seed_for(&name));
                let mut s = MapSampler { inner: &mut obs, map: |x| project_field(&x) };
                vec![check_morphism(&kks, m, &mut s, p.samples).into_record(name, KKS)]
            }));
        }
        for k in 2..=n + 1 {
            let np = np.clone();
            jobs.push(job(move || {
                let name = format!("kks.{}.proof-identity.k{k}", np.name);
                let mut s = ObservableSampler::new(&np.plectic, p.poly_degree, p.seed_for(&name));
                vec![sampled(name, KKS_PROOF, p.samples, || {
                    let vs: Vec<PolyMultivector> = (0..k).map(|_| s.field()).collect();
                    let r = kks_proof_identity_residual(&np.plectic, &vs);
                    (!r.is_zero()).then(|| {
                        let fields: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                        format!("fields = [{}]; residual = {r}", fields.join(", "))
                    })
                })]
            }));
        }
        jobs.push(kks_fiber_job(format!("kks.{}.fiber", np.name), np.clone(), p));
    }
    jobs
}

// Master equation.

const MASTER: &str = "Appendix A Eq. (A.7), 'or, in our notation:'";
const APPENDIX_MORPHISM: &str = "§4.2 Thm 4.6, 'whose linear term is'";
const DG_LIE_QU: &str = "§4.2 Def/Prop 4.5, 'dg Lie algebra of infinitesimal quantomorphisms'";

fn master_equation_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for c in &zoo.cocycles {
        let n = c.plectic.plectic.n();
        let prefix = format!("master-equation.{}", c.name);
        let c2 = c.clone();
        let pre = prefix.clone();
        jobs.push(job(move || {
            let name = format!("{pre}.dg-lie-jacobi");
            let t = match DgLieQu::new(&c2.plectic.plectic, &c2.cocycle) {
                Ok(t) => t,
                Err(e) => return failed_setup(name, DG_LIE_QU, e.to_string()),
            };
            let f = AppendixMorphism::new(&t);
            let mut s = QuSampler::new(&f, p.poly_degree, p.seed_for(&name));
            (1..=3).map(|m| check_generalized_jacobi(&t, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), DG_LIE_QU)).collect()
        }));
        for m in 1..=n + 1 {
            let c = c.clone();
            let pre = prefix.clone();
            jobs.push(job(move || {
                let name = format!("{pre}.m{m}");
                let t = match DgLieQu::new(&c.plectic.plectic, &c.cocycle) {
                    Ok(t) => t,
                    Err(e) => return failed_setup(name, MASTER, e.to_string()),
                };
                let f = AppendixMorphism::new(&t);
                let mut s = ObservableSampler::new(&c.plectic.plectic, p.poly_degree, p.seed_for(&name));
                let master = outcome_record(name, MASTER, verify_master_equation(&f, m, &mut s, p.samples));
                let name = format!("{pre}.morphism.m{m}");
                let mut s = ObservableSampler::new(&c.plectic.plectic, p.poly_degree, p.seed_for(&name));
                let morphism = check_morphism(&f, m, &mut s, p.samples).into_record(name, APPENDIX_MORPHISM);
                vec![master, morphism]
            }));
        }
        for form in ClosedForm::ALL {
            for m in form.arities(n) {
                let c = c.clone();
                let pre = prefix.clone();
                jobs.push(job(move || {
                    let name = format!("{pre}.lemma.{}.m{m}", form.name());
                    let t = match DgLieQu::new(&c.plectic.plectic, &c.cocycle) {
                        Ok(t) => t,
                        Err(e) => return failed_setup(name, form.anchor(), e.to_string()),
                    };
                    let f = AppendixMorphism::new(&t);
                    let mut s = ObservableSampler::new(&c.plectic.plectic, p.poly_degree, p.seed_for(&name));
                    vec![check_closed_form(&f, form, m, &mut s, p.samples).into_record(name, form.anchor())]
                }));
            }
        }
    }
    jobs
}

// Courant and Atiyah algebras.

const ATIYAH1: &str = "§5.1 Def 5.1, 'endowed with the Lie bracket'";
const LIE_AT: &str = "§5.1 Def 5.2, 'whose underlying vector space is'";
const PSI_SQUARE: &str = "§5.1 Prop 5.3, 'such that the following diagram commutes'";
const ATIYAH2: &str = "§5.2 Def/Prop 5.4, 'Atiyah Lie 2-algebra'";
const COURANT2: &str = "§5.2 Def/Prop 5.5, 'natural symmetric pairing between sections'";
const PHI_PSI: &str = "§5.2 Prop 5.6, 'natural sequence of L∞ morphisms'";
const TRUNCATED: &str = "§5.2 Def/Prop 5.8, 'whose underlying complexes are'";
const FORGET: &str = "§5.2 Prop 5.9, 'natural sequence of dg Lie algebras'";
const WEAK_EQ: &str = "§5.2 final Proposition, 'natural weak equivalences of Lie 2-algebras'";

fn diagram(c: &NamedCocycle) -> Result<CourantDiagram, String> {
    CourantDiagram::new(&c.plectic.plectic, &c.cocycle)
}

fn courant_jobs(c: &NamedCocycle, p: Params) -> Vec<Job> {
    let prefix = format!("courant-atiyah.{}", c.name);
    let mut jobs = Vec::new();
    let mut push = |suffix: &str, anchor: &'static str, run: fn(&CourantDiagram, &str, &Params) -> Vec<CheckRecord>| {
        let name = format!("{prefix}.{suffix}");
        let c = c.clone();
        jobs.push(job(move || match diagram(&c) {
            Ok(d) => run(&d, &name, &p),
            Err(e) => failed_setup(name, anchor, e),
        }));
    };
    push("jacobi.courant2", COURANT2, |d, name, p| {
        let mut s = FieldFormSampler::courant(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        (1..=4).map(|m| check_generalized_jacobi(&d.courant, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), COURANT2)).collect()
    });
    push("jacobi.atiyah2", ATIYAH2, |d, name, p| {
        let mut s = FieldFormSampler::atiyah2(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        (1..=4).map(|m| check_generalized_jacobi(&d.atiyah, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), ATIYAH2)).collect()
    });
    push("jacobi.dglie-cou", TRUNCATED, |d, name, p| {
        let mut s = TruncatedSampler::new(&d.cou, p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_generalized_jacobi(&d.cou, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), TRUNCATED)).collect()
    });
    push("jacobi.dglie-at", TRUNCATED, |d, name, p| {
        let mut s = TruncatedSampler::new(&d.at, p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_generalized_jacobi(&d.at, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), TRUNCATED)).collect()
    });
    push("morphism.phi", PHI_PSI, |d, name, p| {
        let mut s = ObservableSampler::new(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_morphism(&d.phi, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), PHI_PSI)).collect()
    });
    push("morphism.psi", PHI_PSI, |d, name, p| {
        let mut s = FieldFormSampler::courant(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_morphism(&d.psi, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), PHI_PSI)).collect()
    });
    push("morphism.fc", WEAK_EQ, |d, name, p| {
        let mut s = FieldFormSampler::courant(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_morphism(&d.fc, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), WEAK_EQ)).collect()
    });
    push("morphism.fa", WEAK_EQ, |d, name, p| {
        let mut s = FieldFormSampler::atiyah2(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_morphism(&d.fa, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), WEAK_EQ)).collect()
    });
    push("morphism.i", FORGET, |d, name, p| {
        let mut s = QuSampler::new(&d.f, p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_morphism(&d.i, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), FORGET)).collect()
    });
    push("morphism.p", FORGET, |d, name, p| {
        let mut s = TruncatedSampler::new(&d.cou, p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_morphism(&d.p, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), FORGET)).collect()
    });
    push("diagram.lower-square", WEAK_EQ, |d, name, p| {
        let mut s = ObservableSampler::new(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        let r = compose_low(&d.fc, &d.phi)
            .map_err(|e| e.to_string())
            .and_then(|lower| check_equal_morphisms(&lower, &PostStrict { f: &d.i, g: &d.f }, 3, &mut s, p.samples));
        vec![CheckRecord::from_result(name, WEAK_EQ, 3 * p.samples, r)]
    });
    push("diagram.upper-square", WEAK_EQ, |d, name, p| {
        let mut s = FieldFormSampler::courant(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        let r = compose_low(&d.fa, &d.psi)
            .map_err(|e| e.to_string())
            .and_then(|upper| check_equal_morphisms(&upper, &PostStrict { f: &d.p, g: &d.fc }, 3, &mut s, p.samples));
        vec![CheckRecord::from_result(name, WEAK_EQ, 3 * p.samples, r)]
    });
    push("diagram.outer-rectangle", WEAK_EQ, |d, name, p| {
        let mut s = ObservableSampler::new(d.qu.plectic(), p.poly_degree, p.seed_for(name));
        let r = compose_low(&d.psi, &d.phi).map_err(|e| e.to_string()).and_then(|left| {
            let outer = compose_low(&d.fa, &left).map_err(|e| e.to_string())?;
            let right = PostStrict { f: &d.i, g: &d.f };
            check_equal_morphisms(&outer, &PostStrict { f: &d.p, g: &right }, 3, &mut s, p.samples)
        });
        vec![CheckRecord::from_result(name, WEAK_EQ, 3 * p.samples, r)]
    });
    push("shifted-closed", WEAK_EQ, |d, name, p| {
        let r = d.check_shifted_closed(p.seed_for(name), p.poly_degree, p.samples);
        vec![match r {
            Ok(n) => CheckRecord::pass(name, WEAK_EQ, n),
            Err(w) => CheckRecord::fail(name, WEAK_EQ, p.samples, w),
        }]
    });
    for id in ProofIdentity::PSI.into_iter().chain(ProofIdentity::WEAK_EQUIVALENCES) {
        let name = format!("{prefix}.identity.{}", id.name());
        let c = c.clone();
        jobs.push(job(move || {
            let d = match diagram(&c) {
                Ok(d) => d,
                Err(e) => return failed_setup(name, id.anchor(), e),
            };
            vec![match d.check_identity(id, p.seed_for(&name), p.poly_degree, p.samples) {
                Ok(n) => CheckRecord::pass(name, id.anchor(), n),
                Err(w) => CheckRecord::fail(name, id.anchor(), p.samples, w),
            }]
        }));
    }
    jobs
}

struct AtiyahOneData {
    at: AtiyahOne,
    lie_at: DgLieQu,
    psi: PsiAtiyah,
    qu: DgLieQu,
}

fn atiyah_one(c: &NamedCocycle) -> Result<AtiyahOneData, String> {
    let pl = &c.plectic.plectic;
    let lie_at = DgLieQu::truncated(pl, &c.cocycle, 0).map_err(|e| e.to_string())?;
    Ok(AtiyahOneData { at: AtiyahOne::new(pl)?, psi: PsiAtiyah::new(&lie_at)?, qu: DgLieQu::new(pl, &c.cocycle).map_err(|e| e.to_string())?, lie_at })
}

fn atiyah_one_jobs(c: &NamedCocycle, p: Params) -> Vec<Job> {
    let prefix = format!("courant-atiyah.{}", c.name);
    let mut jobs = Vec::new();
    let mut push = |suffix: &str, anchor: &'static str, run: fn(&NamedCocycle, &AtiyahOneData, &str, &Params) -> Vec<CheckRecord>| {
        let name = format!("{prefix}.{suffix}");
        let c = c.clone();
        jobs.push(job(move || match atiyah_one(&c) {
            Ok(a) => run(&c, &a, &name, &p),
            Err(e) => failed_setup(name, anchor, e),
        }));
    };
    push("jacobi.atiyah1", ATIYAH1, |c, a, name, p| {
        let mut s = FieldFormSampler::atiyah1(&c.plectic.plectic, p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_generalized_jacobi(&a.at, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), ATIYAH1)).collect()
    });
    push("jacobi.lie-at", LIE_AT, |_, a, name, p| {
        let mut s = TruncatedSampler::new(&a.lie_at, p.poly_degree, p.seed_for(name));
        (1..=3).map(|m| check_generalized_jacobi(&a.lie_at, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), LIE_AT)).collect()
    });
    push("morphism.psi-atiyah", PSI_SQUARE, |c, a, name, p| {
        let mut s = FieldFormSampler::atiyah1(&c.plectic.plectic, p.poly_degree, p.seed_for(name));
        (1..=2).map(|m| check_morphism(&a.psi, m, &mut s, p.samples).into_record(format!("{name}.m{m}"), PSI_SQUARE)).collect()
    });
    push("psi-bracket-identity", PSI_SQUARE, |c, _, name, p| {
        let mut s = FieldFormSampler::atiyah1(&c.plectic.plectic, p.poly_degree, p.seed_for(name));
        vec![sampled(name.to_string(), PSI_SQUARE, p.samples, || {
            let (v1, v2) = (s.field(), s.field());
            let r = atiyah_iso_residual(&c.plectic.plectic, &c.cocycle, &v1, &v2);
            (!r.is_zero()).then(|| format!("v1 = {v1}; v2 = {v2}; residual = {r:?}"))
        })]
    });
    push("psi-bijection", PSI_SQUARE, |_, a, name, p| {
        let r = atiyah_iso_truncation(&a.psi, p.truncation).and_then(|r| {
            if r.bijective() {
                Ok(())
            } else {
                Err(format!("source dim {}, target dim {}, rank {}", r.source_dim, r.target_dim, r.rank))
            }
        });
        vec![CheckRecord::from_result(name, PSI_SQUARE, 1, r)]
    });
    push("psi-square", PSI_SQUARE, |c, a, name, p| {
        let pl = &c.plectic.plectic;
        let r = ObservablesInAtiyah::new(pl).and_then(|incl1| {
            let incl2 = Forget::new(&a.qu, &a.lie_at)?;
            let f = AppendixMorphism::new(&a.qu);
            let mut s = ObservableSampler::new(pl, p.poly_degree, p.seed_for(name));
            check_equal_morphisms(&PreStrict { f: &a.psi, g: &incl1 }, &PostStrict { f: &incl2, g: &f }, 2, &mut s, p.samples)
        });
        vec![CheckRecord::from_result(name, PSI_SQUARE, 2 * p.samples, r)]
    });
    jobs
}

fn courant_atiyah_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for c in &zoo.cocycles {
        match c.plectic.plectic.n() {
            1 => jobs.extend(atiyah_one_jobs(c, p)),
            2 => jobs.extend(courant_jobs(c, p)),
            _ => {}
        }
    }
    jobs
}

// Fiber squares.

fn string_fiber_job(prefix: String, l: NamedLie, p: Params) -> Job {
    job(move || {
        let data = match string_fiber_data(&l.algebra) {
            Ok(d) => d,
            Err(e) => return failed_setup(prefix, "Appendix B Thm B.2, 'is a model for the homotopy fiber'", e.to_string()),
        };
        let mut s = FdSampler::new(data.lift.source().dims(), p.seed_for(&prefix));
        let arity = data.lift.max_arity();
        check_fiber_hypotheses(&prefix, &data.pi_l, &data.lift, &data.p_a, &data.mu, &data.fd, &mut s, arity, p.samples).records()
    })
}

fn fiber_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs: Vec<Job> = zoo.plectic.iter().map(|np| kks_fiber_job(format!("fiber.kks-{}", np.name), np.clone(), p)).collect();
    jobs.extend(zoo.lie.iter().map(|l| string_fiber_job(format!("fiber.string-{}", l.name), l.clone(), p)));
    jobs
}

// Collation.

const COLLATION: &str = "Appendix A proof of Prop A.1 Eq. (A.9), 'is the chain homotopy given'";
const DEGREE_ZERO: &str = "Appendix A proof of Prop A.1, 'it follows from the definition of'";

fn collation_of(cover: &Cover, weights: &[crate::poly::Poly]) -> Result<Collation, String> {
    Collation::new(cover, weights.to_vec()).map_err(|e| e.to_string())
}

fn cover_collation_jobs(nc: &NamedCover, weights: Vec<crate::poly::Poly>, p: Params) -> Vec<Job> {
    let prefix = format!("collation.{}", nc.name);
    let mut jobs = Vec::new();
    let mut push = |suffix: &str, run: fn(&Collation, &mut CechSampler, usize) -> Option<String>| {
        let name = format!("{prefix}.{suffix}");
        let cover = nc.cover.clone();
        let weights = weights.clone();
        jobs.push(job(move || {
            let col = match collation_of(&cover, &weights) {
                Ok(c) => c,
                Err(e) => return failed_setup(name, COLLATION, e),
            };
            let top = cover.patch().dim() + cover.max_dim();
            let mut s = CechSampler::new(&cover, p.poly_degree, p.seed_for(&name));
            let mut i = 0;
            vec![sampled(name, COLLATION, p.samples, || {
                i += 1;
                run(&col, &mut s, i % (top + 1))
            })]
        }));
    };
    push("retraction", |col, s, k| {
        let k = k.min(col.cover().patch().dim());
        let a = s.form(k);
        let r = col.retraction_residual(&a);
        (!r.is_zero()).then(|| format!("a = {a}; j(res a) - a = {r}"))
    });
    push("chain-homotopy", |col, s, k| {
        let t = s.tot(k);
        let r = col.homotopy_residual(&t);
        (!r.is_zero()).then(|| format!("t = {t:?}; residual = {r:?}"))
    });
    push("j-chain-map", |col, s, k| {
        let t = s.tot(k);
        let r = col.chain_residual(&t);
        (!r.is_zero()).then(|| format!("t = {t:?}; d j t - j d_Tot t = {r}"))
    });
    push("homotopy-kills-restrictions", |col, s, k| {
        let k = k.min(col.cover().patch().dim());
        let a = s.form(k);
        let h = col.homotopy(&col.cover().res(&a));
        (!h.is_zero()).then(|| format!("a = {a}; H(res a) = {h:?}"))
    });
    jobs
}

/// Degree-0 elements `v + θ̄` with `d_Tot θ̄ = res(ι_v ω)`: `θ̄ = −res H + d_Tot ξ̄`.
fn degree_zero_job(c: &NamedCocycle, weights: Vec<crate::poly::Poly>, p: Params) -> Job {
    let name = format!("collation.{}.degree0-homotopy", c.name);
    let c = c.clone();
    job(move || {
        let cover = c.cocycle.cover().clone();
        let col = match collation_of(&cover, &weights) {
            Ok(col) => col,
            Err(e) => return failed_setup(name, DEGREE_ZERO, e),
        };
        let pl = &c.plectic.plectic;
        let n = pl.n();
        let mut obs = ObservableSampler::new(pl, p.poly_degree, p.seed_for(&name));
        let mut tot = CechSampler::new(&cover, p.poly_degree, p.seed_for(&format!("{name}.xi")));
        vec![sampled(name, DEGREE_ZERO, p.samples, || {
            let hp = obs.pair();
            let mut theta = cover.res(&hp.h).neg();
            if n >= 2 {
                theta = theta.add(&cover.d_tot(&tot.tot(n - 2)));
            }
            let dt = cover.d_tot(&theta);
            let want = cover.res(&pl.contract(&[&hp.v]));
            if dt.sub(&want).is_zero() {
                let h = col.homotopy(&dt);
                if !h.is_zero() {
                    return Some(format!("theta = {theta:?}; H(d_Tot theta) = {h:?}"));
                }
                let r = theta.sub(&cover.res(&col.j(&theta))).sub(&cover.d_tot(&col.homotopy(&theta)));
                (!r.is_zero()).then(|| format!("theta = {theta:?}; theta - res j theta - d_Tot H theta = {r:?}"))
            } else {
                Some(format!("theta = {theta:?} does not satisfy d_Tot theta = res(i_v omega)"))
            }
        })]
    })
}

fn collation_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for nc in &zoo.covers {
        if let Some(w) = &nc.weights {
            jobs.extend(cover_collation_jobs(nc, w.clone(), p));
        }
    }
    for c in &zoo.cocycles {
        if let Some(w) = &c.weights {
            jobs.push(degree_zero_job(c, w.clone(), p));
        }
    }
    jobs
}

// Truncated cohomology.

const QUASI_ISO: &str = "Appendix A Prop A.1, 'is a quasi-isomorphism of chain complexes'";

fn cohomology_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for nc in &zoo.covers {
        for w in 0..=p.truncation {
            let name = format!("cohomology.{}.tot-vs-de-rham.D{w}", nc.name);
            let cover = nc.cover.clone();
            jobs.push(job(move || {
                let tot = crate::cech::truncated_tot_cohomology(&cover, w);
                let dr = crate::cech::truncated_de_rham_cohomology(cover.patch(), w);
                let degs: std::collections::BTreeSet<usize> = tot.keys().chain(dr.keys()).copied().collect();
                let r = match degs.into_iter().find(|k| tot.get(k).copied().unwrap_or(0) != dr.get(k).copied().unwrap_or(0)) {
                    None => Ok(()),
                    Some(k) => Err(format!("degree {k}: total complex {tot:?}, de Rham {dr:?}")),
                };
                vec![CheckRecord::from_result(name, QUASI_ISO, 1, r)]
            }));
        }
    }
    for c in &zoo.cocycles {
        let prefix = format!("cohomology.{}", c.name);
        let cc = c.clone();
        let pre = prefix.clone();
        jobs.push(job(move || {
            let t = match DgLieQu::new(&cc.plectic.plectic, &cc.cocycle) {
                Ok(t) => t,
                Err(e) => return failed_setup(format!("{pre}.f1-quasi-iso"), QUASI_ISO, e.to_string()),
            };
            let f = AppendixMorphism::new(&t);
            let quasi = f1_truncation(&f, p.truncation).and_then(|r| if r.passed() { Ok(()) } else { Err(r.summary()) });
            let proj = hamiltonian_projection(&t, p.truncation).and_then(|r| if r.passed() { Ok(()) } else { Err(format!("{r:?}")) });
            vec![
                CheckRecord::from_result(format!("{pre}.f1-quasi-iso"), QUASI_ISO, 1, quasi),
                CheckRecord::from_result(format!("{pre}.hamiltonian-projection"), QUASI_ISO, 1, proj),
            ]
        }));
        if c.plectic.plectic.n() == 2 {
            let cc = c.clone();
            jobs.push(job(move || {
                let r = diagram(&cc).and_then(|d| weak_equivalence_truncations(&d, p.truncation));
                let verdict = |r: &crate::quantomorphism::QuasiIsoReport| if r.passed() { Ok(()) } else { Err(r.summary()) };
                match r {
                    Ok((cou, at)) => vec![
                        CheckRecord::from_result(format!("{prefix}.fc1-quasi-iso"), WEAK_EQ, 1, verdict(&cou)),
                        CheckRecord::from_result(format!("{prefix}.fa1-quasi-iso"), WEAK_EQ, 1, verdict(&at)),
                    ],
                    Err(e) => failed_setup(format!("{prefix}.fc1-quasi-iso"), WEAK_EQ, e),
                }
            }));
        }
    }
    jobs
}

// Lie algebra extensions.

const STRING: &str = "§3.4 Example 3.17, 'the Heisenberg Lie 2-algebra of'";
const HEISENBERG: &str = "§3.2 Example 3.11, 'the traditional Heisenberg cocycle'";

/// `tr(ad_{e_i} ad_{e_j}) = Σ_{k,l} c_{ik}^l c_{jl}^k`, straight from the structure constants.
fn killing_from_constants(l: &NamedLie, i: usize, j: usize) -> Rational {
    let g = &l.algebra;
    let d = g.dim();
    let mut s = Rational::zero();
    for k in 0..d {
        for m in 0..d {
            s = &s + &(g.structure_constant(i, k, m) * g.structure_constant(j, m, k));
        }
    }
    s
}

fn lie_jobs(l: &NamedLie, p: Params) -> Vec<Job> {
    let prefix = format!("extensions.{}", l.name);
    let mut jobs = Vec::new();
    let (pre, l1) = (prefix.clone(), l.clone());
    jobs.push(job(move || {
        let g = &l1.algebra;
        let k = g.killing();
        let d = g.dim();
        let mut r = Ok(());
        'outer: for i in 0..d {
            for j in 0..d {
                let oracle = killing_from_constants(&l1, i, j);
                if k.get(i, j) != &oracle {
                    r = Err(format!("K({i},{j}) = {} but the trace of ad products is {oracle}", k.get(i, j)));
                    break 'outer;
                }
                if let Some(diag) = &l1.killing_diagonal {
                    let want = if i == j { diag.clone() } else { Rational::zero() };
                    if oracle != want {
                        r = Err(format!("K({i},{j}) = {oracle}, expected {want}"));
                        break 'outer;
                    }
                }
            }
        }
        vec![CheckRecord::from_result(format!("{pre}.killing-form"), STRING, d * d, r)]
    }));
    let (pre, l2) = (prefix.clone(), l.clone());
    jobs.push(job(move || {
        let g = &l2.algebra;
        let name = format!("{pre}.string-cocycle");
        let mu = match string_cocycle(g) {
            Ok(mu) => mu,
            Err(e) => return failed_setup(name, STRING, e.to_string()),
        };
        let d = g.dim();
        let mut r = Ok(());
        for t in crate::perm::subsets(&(0..d).collect::<Vec<_>>(), 3) {
            let direct = killing_triple(g, &g.basis(t[0]), &g.basis(t[1]), &g.basis(t[2]));
            if mu.eval_basis(&t) != direct {
                r = Err(format!("mu{t:?} = {} but K(x, [y, z]) = {direct}", mu.eval_basis(&t)));
                break;
            }
        }
        if let (Ok(()), Some(want), true) = (&r, &l2.mu_123, d >= 3) {
            let got = mu.eval_basis(&[0, 1, 2]);
            if &got != want {
                r = Err(format!("mu(e1, e2, e3) = {got}, expected {want}"));
            }
        }
        let cocycle = match ce_cocycle_witness(g, &mu) {
            None => Ok(()),
            Some((idx, v)) => Err(format!("(d mu){idx:?} = {v}")),
        };
        vec![
            CheckRecord::from_result(format!("{name}.value"), STRING, 1, r),
            CheckRecord::from_result(format!("{name}.ce-closed"), STRING, 1, cocycle),
        ]
    }));
    let (pre, l3) = (prefix, l.clone());
    jobs.push(job(move || {
        let name = format!("{pre}.string-jacobi");
        let s = match StringLie2::new(&l3.algebra) {
            Ok(s) => s,
            Err(e) => return failed_setup(name, STRING, e.to_string()),
        };
        let mut sampler = FdSampler::new(s.dims(), p.seed_for(&name));
        (1..=4).map(|m| check_generalized_jacobi(&s, m, &mut sampler, p.samples).into_record(format!("{name}.m{m}"), STRING)).collect()
    }));
    jobs
}

fn extension_jobs(zoo: &Zoo, p: Params) -> Vec<Job> {
    let mut jobs: Vec<Job> = zoo.lie.iter().flat_map(|l| lie_jobs(l, p)).collect();
    jobs.push(job(|| {
        let name = "extensions.heisenberg-r2";
        let (c, h) = match heisenberg_r2() {
            Ok(x) => x,
            Err(e) => return failed_setup(name.to_string(), HEISENBERG, e.to_string()),
        };
        let value = c.eval_basis(&[0, 1]);
        let cocycle = if value == Rational::one() { Ok(()) } else { Err(format!("c(e1, e2) = {value}, expected 1")) };
        let jacobi = match h.validate() {
            Ok(()) if h.dim() == 3 => Ok(()),
            Ok(()) => Err(format!("extension has dimension {}", h.dim())),
            Err(e) => Err(e.to_string()),
        };
        vec![
            CheckRecord::from_result(format!("{name}.cocycle"), HEISENBERG, 1, cocycle),
            CheckRecord::from_result(format!("{name}.extension-jacobi"), HEISENBERG, 27, jacobi),
        ]
    }));
    jobs
}
