//! Acceptance criteria 1-9, each at exact zero tolerance; prints one line per criterion.

use prequant::bundle::{build_example, ExampleKind};
use prequant::config::{SuiteConfig, Zoo};
use prequant::report::{CheckRecord, VerificationReport};
use prequant::suites::run_suite;
use std::process::ExitCode;
use std::time::Instant;

const VACUOUS: &str = "identity vanishes by degree";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn run(suite: &str, samples: usize, poly_degree: u32, truncation: u32) -> VerificationReport {
    let config = SuiteConfig { samples, poly_degree, truncation, ..SuiteConfig::new(suite) };
    run_suite(&config).expect("shipped data loads")
}

fn record<'a>(r: &'a VerificationReport, name: &str) -> Result<&'a CheckRecord, String> {
    let c = r.checks.iter().find(|c| c.name == name).ok_or_else(|| format!("missing record {name}"))?;
    if c.passed {
        Ok(c)
    } else {
        Err(format!("{name} failed: {}", c.witness.as_deref().unwrap_or("")))
    }
}

fn vacuous(c: &CheckRecord) -> bool {
    c.detail.as_deref().is_some_and(|d| d.contains(VACUOUS))
}

/// Requires the record to pass on at least `min` samples unless it vanishes by degree.
fn sampled(r: &VerificationReport, name: &str, min: usize) -> Result<(), String> {
    let c = record(r, name)?;
    if vacuous(c) || c.samples >= min {
        Ok(())
    } else {
        Err(format!("{name} ran {} samples, wanted {min}", c.samples))
    }
}

fn all_pass(r: &VerificationReport) -> Outcome {
    match r.failures().next() {
        Some(c) => Err(format!("{} failed: {}", c.name, c.witness.as_deref().unwrap_or(""))),
        None => Ok(format!("{} records", r.checks.len())),
    }
}

fn cartan() -> Outcome {
    let r = run("cartan", 200, 3, 3);
    for dim in [3, 4] {
        for id in ["d-squared", "wedge-graded-commutativity", "cartan-commutator"] {
            sampled(&r, &format!("cartan.r{dim}.{id}"), 200)?;
        }
        for k in 1..=4 {
            sampled(&r, &format!("cartan.r{dim}.extended-cartan.k{k}"), 200)?;
        }
    }
    all_pass(&r)
}

fn observables() -> Outcome {
    let r = run("observables", 100, 2, 3);
    for (p, n) in [("r2-area", 1), ("r3-volume", 2), ("r4-2plectic", 2)] {
        for m in 1..=n + 2 {
            sampled(&r, &format!("observables.{p}.jacobi.m{m}"), 100)?;
        }
        let top = format!("observables.{p}.jacobi.m{}", n + 3);
        if !vacuous(record(&r, &top)?) {
            return Err(format!("{top} is not vacuous by degree"));
        }
    }
    all_pass(&r)
}

fn kks() -> Outcome {
    let r = run("kks", 100, 2, 3);
    for (p, n) in [("r2-area", 1), ("r3-volume", 2), ("r4-2plectic", 2)] {
        for m in 1..=n + 1 {
            sampled(&r, &format!("kks.{p}.morphism.m{m}"), 100)?;
        }
        for k in 2..=n + 1 {
            record(&r, &format!("kks.{p}.proof-identity.k{k}"))?;
        }
        for h in ["i-fibration", "ii-acyclic", "iv-pullback"] {
            record(&r, &format!("kks.{p}.fiber.{h}"))?;
        }
        sampled(&r, &format!("kks.{p}.fiber.iii-square"), 100)?;
    }
    all_pass(&r)
}

fn master_equation() -> Outcome {
    let r = run("master-equation", 100, 2, 3);
    for (c, n) in [("n1-trivial", 1), ("n1-two-box", 1), ("n2-trivial", 2), ("n2-two-box", 2)] {
        for m in 1..=n + 1 {
            sampled(&r, &format!("master-equation.{c}.m{m}"), 100)?;
            sampled(&r, &format!("master-equation.{c}.morphism.m{m}"), 100)?;
        }
        let lemmas = ["i1-closed-form", "i2-closed-form", "l1f-closed-form", "j-binary"];
        for l in lemmas {
            record(&r, &format!("master-equation.{c}.lemma.{l}.m2"))?;
        }
        if n == 2 {
            for l in ["i1-closed-form", "i2-closed-form", "i3-closed-form", "l1f-closed-form", "j-expanded", "j-via-f1"] {
                record(&r, &format!("master-equation.{c}.lemma.{l}.m3"))?;
            }
        }
    }
    all_pass(&r)
}

fn collation() -> Outcome {
    let r = run("collation", 100, 2, 3);
    for cover in ["r1-two-box", "r2-two-box", "r2-three-box", "r3-two-box"] {
        for id in ["retraction", "chain-homotopy", "j-chain-map", "homotopy-kills-restrictions"] {
            record(&r, &format!("collation.{cover}.{id}"))?;
        }
    }
    for c in ["n1-trivial", "n1-two-box", "n2-trivial", "n2-two-box"] {
        record(&r, &format!("collation.{c}.degree0-homotopy"))?;
    }
    all_pass(&r)
}

fn courant_atiyah() -> Outcome {
    let r = run("courant-atiyah", 100, 2, 3);
    for c in ["n1-trivial", "n1-two-box"] {
        for m in 1..=3 {
            sampled(&r, &format!("courant-atiyah.{c}.jacobi.atiyah1.m{m}"), 100)?;
        }
        for m in 1..=2 {
            sampled(&r, &format!("courant-atiyah.{c}.morphism.psi-atiyah.m{m}"), 100)?;
        }
        for id in ["psi-bijection", "psi-bracket-identity", "psi-square"] {
            record(&r, &format!("courant-atiyah.{c}.{id}"))?;
        }
    }
    for c in ["n2-trivial", "n2-two-box"] {
        for alg in ["courant2", "atiyah2"] {
            for m in 1..=4 {
                sampled(&r, &format!("courant-atiyah.{c}.jacobi.{alg}.m{m}"), 100)?;
            }
        }
        for f in ["phi", "psi", "fc", "fa", "i", "p"] {
            for m in 1..=3 {
                sampled(&r, &format!("courant-atiyah.{c}.morphism.{f}.m{m}"), 100)?;
            }
        }
        for d in ["lower-square", "upper-square", "outer-rectangle"] {
            sampled(&r, &format!("courant-atiyah.{c}.diagram.{d}"), 100)?;
        }
    }
    all_pass(&r)
}

fn string_heisenberg() -> Outcome {
    let r = run("extensions", 100, 2, 3);
    for id in ["killing-form", "string-cocycle.value", "string-cocycle.ce-closed"] {
        record(&r, &format!("extensions.su2.{id}"))?;
    }
    for m in 1..=4 {
        record(&r, &format!("extensions.su2.string-jacobi.m{m}"))?;
    }
    record(&r, "extensions.heisenberg-r2.cocycle")?;
    record(&r, "extensions.heisenberg-r2.extension-jacobi")?;
    let s = build_example(ExampleKind::StringSu2)?;
    if s.cocycle["mu"][0]["value"] != "-2" {
        return Err(format!("string-su2 bundle mu = {}", s.cocycle["mu"][0]["value"]));
    }
    let h = build_example(ExampleKind::HeisenbergR2)?;
    if h.cocycle["c"][0]["value"] != "1" || h.structure["dimension"] != 3 {
        return Err("heisenberg-r2 bundle has the wrong cocycle or dimension".to_string());
    }
    all_pass(&r)
}

fn quasi_isomorphisms() -> Outcome {
    let r = run("cohomology", 100, 2, 3);
    let zoo = Zoo::builtin();
    for cover in &zoo.covers {
        for d in 0..=3 {
            record(&r, &format!("cohomology.{}.tot-vs-de-rham.D{d}", cover.name))?;
        }
    }
    for c in &zoo.cocycles {
        record(&r, &format!("cohomology.{}.f1-quasi-iso", c.name))?;
        if c.plectic.plectic.n() == 2 {
            record(&r, &format!("cohomology.{}.fc1-quasi-iso", c.name))?;
            record(&r, &format!("cohomology.{}.fa1-quasi-iso", c.name))?;
        }
    }
    all_pass(&r)
}

fn determinism() -> Outcome {
    let first = run("all", 4, 2, 2).to_json();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let second = pool.install(|| run("all", 4, 2, 2).to_json());
    if first == second {
        Ok(format!("{} bytes identical across a parallel and a single-threaded run", first.len()))
    } else {
        Err("reports differ".to_string())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("cartan calculus identities", cartan),
        ("observables generalized Jacobi", observables),
        ("KKS morphism and homotopy fiber", kks),
        ("quantomorphism master equation", master_equation),
        ("collation homotopy", collation),
        ("Courant/Atiyah diagram", courant_atiyah),
        ("string and Heisenberg extensions", string_heisenberg),
        ("quasi-isomorphism evidence", quasi_isomorphisms),
        ("deterministic reports", determinism),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} PASS {title}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {title}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
