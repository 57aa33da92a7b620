//! Example objects written to disk: structure, cocycle data and bracket tables.

use crate::element::Elt;
use crate::extensions::{heisenberg_r2, StringLie2};
use crate::forms::{PolyForm, PolyMultivector};
use crate::lie::{FdElem, FdLieAlgebra};
use crate::linfty::{LInfty, LInftyMorphism};
use crate::observables::{solve_hamiltonian, Kks, ObsElem, Observables, PrePlecticPatch};
use crate::perm::subsets;
use crate::rational::Rational;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    PoissonR2,
    R3TwoPlectic,
    StringSu2,
    HeisenbergR2,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 4] = [ExampleKind::PoissonR2, ExampleKind::R3TwoPlectic, ExampleKind::StringSu2, ExampleKind::HeisenbergR2];

    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::PoissonR2 => "poisson-r2",
            ExampleKind::R3TwoPlectic => "r3-2plectic",
            ExampleKind::StringSu2 => "string-su2",
            ExampleKind::HeisenbergR2 => "heisenberg-r2",
        }
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExampleKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown example kind '{s}'"))
    }
}

/// One evaluated bracket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub operation: String,
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bundle {
    pub kind: String,
    pub structure: Value,
    pub cocycle: Value,
    pub summary: Vec<TableEntry>,
}

impl Bundle {
    pub fn entry(&self, operation: &str, inputs: &[&str]) -> Option<&TableEntry> {
        self.summary.iter().find(|e| e.operation == operation && e.inputs.iter().map(String::as_str).eq(inputs.iter().copied()))
    }

    /// Writes `structure.json`, `cocycle.json` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let files = [
            ("structure.json", json!({ "kind": self.kind, "structure": self.structure })),
            ("cocycle.json", json!({ "kind": self.kind, "cocycle": self.cocycle })),
            ("summary.json", json!({ "kind": self.kind, "brackets": self.summary })),
        ];
        for (name, value) in files {
            let path = dir.join(name);
            let mut text = serde_json::to_string_pretty(&value).expect("bundle serializes");
            text.push('\n');
            std::fs::write(&path, text)?;
            out.push(path);
        }
        Ok(out)
    }
}

pub fn build_example(kind: ExampleKind) -> Result<Bundle, String> {
    match kind {
        ExampleKind::PoissonR2 => Ok(plectic_bundle(kind, &PrePlecticPatch::parse(2, 1, "dx^dy")?)),
        ExampleKind::R3TwoPlectic => Ok(plectic_bundle(kind, &PrePlecticPatch::parse(3, 2, "dx^dy^dz")?)),
        ExampleKind::StringSu2 => string_bundle(kind, &FdLieAlgebra::su2()),
        ExampleKind::HeisenbergR2 => heisenberg_bundle(kind),
    }
}

fn show_obs(x: &ObsElem) -> String {
    if x.degree == 0 {
        format!("({}, {})", x.v, x.p)
    } else {
        x.p.to_string()
    }
}

/// Hamiltonian pairs of the coordinate fields, plus the constant function `1` when `n = 1`.
fn canonical_pairs(p: &PrePlecticPatch) -> Vec<ObsElem> {
    let patch = p.patch();
    let mut out: Vec<ObsElem> = (0..patch.dim())
        .map(|i| {
            let hp = solve_hamiltonian(p, &PolyMultivector::unit(patch, i)).expect("constant fields preserve a constant form");
            Elt::new(0, hp.v, hp.h)
        })
        .collect();
    if p.n() == 1 {
        out.push(Elt::new(0, PolyMultivector::zero(patch, 1), PolyForm::constant(patch, Rational::one())));
    }
    out
}

fn plectic_bundle(kind: ExampleKind, p: &PrePlecticPatch) -> Bundle {
    let obs = Observables::new(p);
    let n = p.n();
    let xs = canonical_pairs(p);
    let mut summary = Vec::new();
    for k in 2..=n + 1 {
        for idx in subsets(&(0..xs.len()).collect::<Vec<_>>(), k) {
            let args: Vec<&ObsElem> = idx.iter().map(|&i| &xs[i]).collect();
            summary.push(TableEntry {
                operation: format!("l{k}"),
                inputs: args.iter().map(|x| show_obs(x)).collect(),
                output: show_obs(&obs.bracket(&args)),
            });
        }
    }
    let kks = Kks::new(p);
    let fields: Vec<Elt<()>> = (0..p.patch().dim()).map(|i| Elt::new(0, PolyMultivector::unit(p.patch(), i), ())).collect();
    let mut components = Vec::new();
    for k in 1..=n + 1 {
        for idx in subsets(&(0..fields.len()).collect::<Vec<_>>(), k) {
            let args: Vec<&Elt<()>> = idx.iter().map(|&i| &fields[i]).collect();
            let c = kks.component(&args);
            components.push(json!({
                "arity": k,
                "inputs": args.iter().map(|x| x.v.to_string()).collect::<Vec<_>>(),
                "value": c.p.to_string(),
            }));
        }
    }
    Bundle {
        kind: kind.name().to_string(),
        structure: json!({
            "coordinates": p.patch().names(),
            "n": n,
            "omega": p.omega().to_string(),
            "degrees": (0..n).map(|k| if k == 0 {
                format!("0: Hamiltonian pairs (v, H) with H of form degree {}", n - 1)
            } else {
                format!("{k}: forms of degree {}", n - 1 - k)
            }).collect::<Vec<_>>(),
        }),
        cocycle: json!({ "kks": components }),
        summary,
    }
}

fn show_fd(g: &FdLieAlgebra, x: &FdElem) -> String {
    if x.degree == 0 {
        let terms: Vec<String> = x
            .coords
            .iter()
            .zip(g.labels())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, l)| if c.is_one() { l.clone() } else { format!("{c}*{l}") })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    } else {
        format!("{}[{}]", x.coords.first().cloned().unwrap_or_else(Rational::zero), x.degree)
    }
}

fn structure_constants(g: &FdLieAlgebra) -> Vec<Value> {
    let d = g.dim();
    let mut out = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..d {
                let c = g.structure_constant(i, j, k);
                if !c.is_zero() {
                    out.push(json!({ "i": g.labels()[i], "j": g.labels()[j], "k": g.labels()[k], "c": c.to_string() }));
                }
            }
        }
    }
    out
}

fn matrix_rows(g: &FdLieAlgebra, m: &crate::linalg::Matrix) -> Vec<Vec<String>> {
    (0..g.dim()).map(|i| (0..g.dim()).map(|j| m.get(i, j).to_string()).collect()).collect()
}

fn string_bundle(kind: ExampleKind, g: &FdLieAlgebra) -> Result<Bundle, String> {
    let s = StringLie2::new(g).map_err(|e| e.to_string())?;
    let d = g.dim();
    let basis: Vec<FdElem> = (0..d).map(|i| FdElem::new(0, g.basis(i))).collect();
    let mut summary = Vec::new();
    for k in 2..=3 {
        for idx in subsets(&(0..d).collect::<Vec<_>>(), k) {
            let args: Vec<&FdElem> = idx.iter().map(|&i| &basis[i]).collect();
            summary.push(TableEntry {
                operation: format!("l{k}"),
                inputs: idx.iter().map(|&i| g.labels()[i].clone()).collect(),
                output: show_fd(g, &s.bracket(&args)),
            });
        }
    }
    let mu: Vec<Value> =
        s.mu.values()
            .iter()
            .map(|(idx, v)| json!({ "inputs": idx.iter().map(|&i| g.labels()[i].clone()).collect::<Vec<_>>(), "value": v.to_string() }))
            .collect();
    Ok(Bundle {
        kind: kind.name().to_string(),
        structure: json!({
            "labels": g.labels(),
            "brackets": structure_constants(g),
            "killing_form": matrix_rows(g, &g.killing()),
            "degrees": { "0": d, "1": 1 },
            "l3": "-mu",
        }),
        cocycle: json!({ "mu": mu, "normalization": "mu(x, y, z) = K(x, [y, z]) with K the Killing form" }),
        summary,
    })
}

fn heisenberg_bundle(kind: ExampleKind) -> Result<Bundle, String> {
    let (c, h) = heisenberg_r2().map_err(|e| e.to_string())?;
    let d = h.dim();
    let mut summary = Vec::new();
    for idx in subsets(&(0..d).collect::<Vec<_>>(), 2) {
        let b = h.bracket(&h.basis(idx[0]), &h.basis(idx[1]));
        summary.push(TableEntry {
            operation: "bracket".to_string(),
            inputs: idx.iter().map(|&i| h.labels()[i].clone()).collect(),
            output: show_fd(&h, &FdElem::new(0, b)),
        });
    }
    let values: Vec<Value> = c
        .values()
        .iter()
        .map(|(idx, v)| json!({ "inputs": idx.iter().map(|&i| format!("e{}", i + 1)).collect::<Vec<_>>(), "value": v.to_string() }))
        .collect();
    Ok(Bundle {
        kind: kind.name().to_string(),
        structure: json!({
            "plectic": { "coordinates": ["x", "y"], "n": 1, "omega": "dx^dy" },
            "action": ["Dx", "Dy"],
            "labels": h.labels(),
            "brackets": structure_constants(&h),
            "dimension": d,
        }),
        cocycle: json!({ "c": values, "evaluated_at": "origin" }),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_bracket_of_coordinates() {
        let b = build_example(ExampleKind::PoissonR2).unwrap();
        let e = b.entry("l2", &["(Dx, -y)", "(Dy, x)"]).unwrap();
        assert_eq!(e.output, "(0, 1)");
    }

    #[test]
    fn heisenberg_and_string_values() {
        let h = build_example(ExampleKind::HeisenbergR2).unwrap();
        assert_eq!(h.structure["dimension"], 3);
        assert_eq!(h.cocycle["c"][0]["value"], "1");
        let s = build_example(ExampleKind::StringSu2).unwrap();
        assert_eq!(s.cocycle["mu"][0]["value"], "-2");
        assert_eq!(s.entry("l3", &["e1", "e2", "e3"]).unwrap().output, "2[1]");
        let r3 = build_example(ExampleKind::R3TwoPlectic).unwrap();
        assert!(r3.entry("l3", &["(Dx, 1/2*z dy - 1/2*y dz)", "(Dy, -1/2*z dx + 1/2*x dz)", "(Dz, 1/2*y dx - 1/2*x dy)"]).is_some());
    }

    #[test]
    fn kinds_round_trip() {
        for k in ExampleKind::ALL {
            assert_eq!(k.name().parse::<ExampleKind>().unwrap(), k);
        }
        assert!("torus".parse::<ExampleKind>().is_err());
    }
}
