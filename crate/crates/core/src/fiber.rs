//! Checkable hypotheses for presenting a homotopy fiber as a strict fiber product.
//!
//! Given a square `πL: L → g`, `πB: L → B`, `pA: B → A`, `f: g → A`, the checks are:
//! (i) `pA` is degreewise surjective, (ii) `B` is acyclic, (iii) `pA ∘ πB = f ∘ πL` as
//! L∞-morphisms (with `πB` itself an L∞-morphism), and (iv) the underlying chain-level
//! square is a pullback.

use crate::complex::{fiber_product, ChainComplexFD, ChainMap};
use crate::linfty::{check_equal_morphisms, check_morphism, Elem, LInftyMorphism, PostStrict, PreStrict, Sampler};
use crate::report::CheckRecord;
use std::collections::BTreeMap;

/// Finite-dimensional truncation of the chain-level square.
pub struct FiberSquareFD {
    /// `pA: B → A`.
    pub p_a: ChainMap,
    /// Linear part `f_1: g → A`.
    pub f_1: ChainMap,
    /// Dimensions of the truncated `L`, computed independently of the pullback.
    pub expected: BTreeMap<i32, usize>,
}

#[derive(Debug, Clone)]
pub struct FiberHypotheses {
    pub fibration: CheckRecord,
    pub acyclic: CheckRecord,
    pub square: CheckRecord,
    pub pullback: CheckRecord,
}

impl FiberHypotheses {
    pub fn records(self) -> Vec<CheckRecord> {
        vec![self.fibration, self.acyclic, self.square, self.pullback]
    }

    pub fn passed(&self) -> bool {
        self.fibration.passed && self.acyclic.passed && self.square.passed && self.pullback.passed
    }
}

const ANCHOR: &str = "Appendix B Thm B.2, 'is a model for the homotopy fiber'";

fn fd_records(prefix: &str, fd: &FiberSquareFD) -> (CheckRecord, CheckRecord, CheckRecord) {
    let fibration = CheckRecord::from_result(
        format!("{prefix}.i-fibration"),
        ANCHOR,
        1,
        if fd.p_a.is_surjective() { Ok(()) } else { Err("pA is not degreewise surjective".into()) },
    );
    let b = &fd.p_a.source;
    let acyclic = CheckRecord::from_result(
        format!("{prefix}.ii-acyclic"),
        ANCHOR,
        1,
        if b.is_acyclic() { Ok(()) } else { Err(format!("H(B) = {:?}", b.cohomology_dims())) },
    );
    let pullback = CheckRecord::from_result(format!("{prefix}.iv-pullback"), ANCHOR, 1, pullback_check(fd));
    (fibration, acyclic, pullback)
}

fn pullback_check(fd: &FiberSquareFD) -> Result<(), String> {
    for (name, m) in [("pA", &fd.p_a), ("f1", &fd.f_1)] {
        if let Some(k) = m.chain_defect() {
            return Err(format!("{name} is not a chain map in degree {k}"));
        }
    }
    let fp = fiber_product(&fd.p_a, &fd.f_1).map_err(|e| e.to_string())?;
    let c: &ChainComplexFD = &fp.complex;
    if c.is_complex().is_err() {
        return Err("pullback differential does not square to zero".into());
    }
    if !fp.to_a.is_chain_map() || !fp.to_b.is_chain_map() {
        return Err("pullback projections are not chain maps".into());
    }
    let mut degs: Vec<i32> = c.degrees();
    degs.extend(fd.expected.keys().copied());
    degs.sort();
    degs.dedup();
    for k in degs {
        let got = c.dim(k);
        let want = fd.expected.get(&k).copied().unwrap_or(0);
        if got != want {
            return Err(format!("pullback has dimension {got} in degree {k}, expected {want}"));
        }
        let lhs = fd.p_a.map(k).mul(&fp.to_a.map(k));
        let rhs = fd.f_1.map(k).mul(&fp.to_b.map(k));
        if lhs != rhs {
            return Err(format!("chain-level square does not commute in degree {k}"));
        }
    }
    Ok(())
}

/// Runs the four checks; (iii) is sampled for arities `1..=max_arity`.
#[allow(clippy::too_many_arguments)]
pub fn check_fiber_hypotheses<PL, PB, PA, F>(
    prefix: &str,
    pi_l: &PL,
    pi_b: &PB,
    p_a: &PA,
    f: &F,
    fd: &FiberSquareFD,
    sampler: &mut dyn Sampler<Elem<PB::Source>>,
    max_arity: usize,
    count: usize,
) -> FiberHypotheses
where
    PL: LInftyMorphism,
    PB: LInftyMorphism<Source = PL::Source>,
    PA: LInftyMorphism<Source = PB::Target>,
    F: LInftyMorphism<Source = PL::Target, Target = PA::Target>,
{
    let (fibration, acyclic, pullback) = fd_records(prefix, fd);
    let mut samples = 0;
    let mut failure = None;
    for m in 1..=max_arity {
        let out = check_morphism(pi_b, m, sampler, count);
        samples += out.samples;
        if let Some(w) = out.failure {
            failure = Some(format!("piB is not an L-infinity morphism at arity {m}: {w}"));
            break;
        }
    }
    if failure.is_none() {
        let lhs = PostStrict { f: p_a, g: pi_b };
        let rhs = PreStrict { f, g: pi_l };
        if let Err(w) = check_equal_morphisms(&lhs, &rhs, max_arity, sampler, count) {
            failure = Some(format!("square does not commute: {w}"));
        }
        samples += max_arity * count;
    }
    let square = match failure {
        None => CheckRecord::pass(format!("{prefix}.iii-square"), ANCHOR, samples),
        Some(w) => CheckRecord::fail(format!("{prefix}.iii-square"), ANCHOR, samples, w),
    };
    FiberHypotheses { fibration, acyclic, square, pullback }
}
