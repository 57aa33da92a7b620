//! Suite configuration and the TOML data zoo.

use crate::cech::{BoxRegion, CechError, Cover, DeligneCocycle, Interval, Simplex, TotElement};
use crate::forms::{Patch, PolyForm};
use crate::lie::FdLieAlgebra;
use crate::observables::PrePlecticPatch;
use crate::poly::Poly;
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// The zoo shipped with the crate.
pub const BUILTIN_ZOO: &str = include_str!("../data/zoo.toml");

/// Name of the cover made of the whole patch.
pub const TRIVIAL_COVER: &str = "trivial";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed data: {0}")]
    Syntax(String),
    #[error("duplicate {kind} '{name}'")]
    Duplicate { kind: &'static str, name: String },
    #[error("{kind} '{name}' is not defined")]
    Unknown { kind: &'static str, name: String },
    #[error("plectic '{name}': {message}")]
    Plectic { name: String, message: String },
    #[error("cover '{name}': {message}")]
    Cover { name: String, message: String },
    #[error("cocycle '{name}': {message}")]
    Cocycle { name: String, message: String },
    #[error("invalid cocycle '{name}': {source}")]
    InvalidCocycle { name: String, source: CechError },
    #[error("lie algebra '{name}': {message}")]
    Lie { name: String, message: String },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZooFile {
    #[serde(default)]
    cartan_dims: Vec<usize>,
    #[serde(default)]
    plectic: Vec<PlecticSpec>,
    #[serde(default)]
    cover: Vec<CoverSpec>,
    #[serde(default)]
    cocycle: Vec<CocycleSpec>,
    #[serde(default)]
    lie: Vec<LieSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlecticSpec {
    name: String,
    dim: usize,
    n: usize,
    omega: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpenSpec {
    name: String,
    sides: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverSpec {
    name: String,
    dim: usize,
    opens: Vec<OpenSpec>,
    #[serde(default)]
    weights: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    simplex: Simplex,
    form: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleSpec {
    name: String,
    plectic: String,
    cover: String,
    components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketSpec {
    i: usize,
    j: usize,
    k: usize,
    c: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LieSpec {
    name: String,
    labels: Vec<String>,
    #[serde(default)]
    brackets: Vec<BracketSpec>,
    #[serde(default)]
    killing_diagonal: Option<String>,
    #[serde(default)]
    mu_123: Option<String>,
}

#[derive(Debug, Clone)]
pub struct NamedPlectic {
    pub name: String,
    pub plectic: PrePlecticPatch,
}

#[derive(Debug, Clone)]
pub struct NamedCover {
    pub name: String,
    pub cover: Cover,
    /// Collation weights, when the entry provides them.
    pub weights: Option<Vec<Poly>>,
}

#[derive(Debug, Clone)]
pub struct NamedCocycle {
    pub name: String,
    pub plectic: NamedPlectic,
    pub cover: String,
    pub cocycle: DeligneCocycle,
    pub weights: Option<Vec<Poly>>,
}

#[derive(Debug, Clone)]
pub struct NamedLie {
    pub name: String,
    pub algebra: FdLieAlgebra,
    /// Expected value of `K(e_i, e_i)` for every `i` (off-diagonal entries zero).
    pub killing_diagonal: Option<Rational>,
    /// Expected value of `μ(e_1, e_2, e_3)`.
    pub mu_123: Option<Rational>,
}

/// Validated verification data.
#[derive(Debug, Clone, Default)]
pub struct Zoo {
    pub cartan_dims: Vec<usize>,
    pub plectic: Vec<NamedPlectic>,
    pub covers: Vec<NamedCover>,
    pub cocycles: Vec<NamedCocycle>,
    pub lie: Vec<NamedLie>,
}

fn bound(s: &str) -> Result<Option<Rational>, String> {
    match s.trim() {
        "-inf" | "inf" | "+inf" => Ok(None),
        t => t.parse::<Rational>().map(Some).map_err(|e| format!("bad interval bound '{t}': {e}")),
    }
}

fn interval(side: &[String; 2]) -> Result<Interval, String> {
    let (lo, hi) = (side[0].trim(), side[1].trim());
    if lo == "inf" || lo == "+inf" || hi == "-inf" {
        return Err(format!("interval [{lo}, {hi}] is empty"));
    }
    Ok(Interval::new(bound(lo)?, bound(hi)?))
}

fn unique<'a>(kind: &'static str, names: impl Iterator<Item = &'a str>) -> Result<(), DataError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(DataError::Duplicate { kind, name: n.to_string() });
        }
    }
    Ok(())
}

fn build_cover(spec: &CoverSpec) -> Result<NamedCover, DataError> {
    let err = |message: String| DataError::Cover { name: spec.name.clone(), message };
    let patch = Patch::standard(spec.dim);
    let mut opens = Vec::new();
    for o in &spec.opens {
        let sides = o.sides.iter().map(interval).collect::<Result<Vec<_>, _>>().map_err(err)?;
        opens.push(BoxRegion::new(&o.name, sides));
    }
    let cover = Cover::new(&patch, opens).map_err(|e| err(e.to_string()))?;
    let weights = match &spec.weights {
        None => None,
        Some(ws) => {
            let ws = ws.iter().map(|w| patch.poly(w).map_err(|e| err(format!("weight '{w}': {e}")))).collect::<Result<Vec<_>, _>>()?;
            crate::cech::Collation::new(&cover, ws.clone()).map_err(|e| err(e.to_string()))?;
            Some(ws)
        }
    };
    Ok(NamedCover { name: spec.name.clone(), cover, weights })
}

fn build_lie(spec: &LieSpec) -> Result<NamedLie, DataError> {
    let err = |message: String| DataError::Lie { name: spec.name.clone(), message };
    let d = spec.labels.len();
    let mut c = vec![vec![vec![Rational::zero(); d]; d]; d];
    for b in &spec.brackets {
        if b.i >= d || b.j >= d || b.k >= d || b.i == b.j {
            return Err(err(format!("bad bracket indices ({}, {}, {})", b.i, b.j, b.k)));
        }
        let v: Rational = b.c.parse().map_err(|e| err(format!("bad constant '{}': {e}", b.c)))?;
        c[b.i][b.j][b.k] = v.clone();
        c[b.j][b.i][b.k] = -v;
    }
    let algebra = FdLieAlgebra::new(spec.labels.clone(), c).map_err(|e| err(e.to_string()))?;
    let parse = |s: &Option<String>| -> Result<Option<Rational>, DataError> {
        s.as_ref().map(|t| t.parse::<Rational>().map_err(|e| err(format!("bad value '{t}': {e}")))).transpose()
    };
    Ok(NamedLie { name: spec.name.clone(), algebra, killing_diagonal: parse(&spec.killing_diagonal)?, mu_123: parse(&spec.mu_123)? })
}

impl ZooFile {
    fn merge(&mut self, other: ZooFile) {
        for d in other.cartan_dims {
            if !self.cartan_dims.contains(&d) {
                self.cartan_dims.push(d);
            }
        }
        self.plectic.extend(other.plectic);
        self.cover.extend(other.cover);
        self.cocycle.extend(other.cocycle);
        self.lie.extend(other.lie);
    }

    fn build(self) -> Result<Zoo, DataError> {
        unique("plectic", self.plectic.iter().map(|p| p.name.as_str()))?;
        unique("cover", self.cover.iter().map(|c| c.name.as_str()).chain(std::iter::once(TRIVIAL_COVER)))?;
        unique("cocycle", self.cocycle.iter().map(|c| c.name.as_str()))?;
        unique("lie", self.lie.iter().map(|l| l.name.as_str()))?;

        let plectic = self
            .plectic
            .iter()
            .map(|s| {
                PrePlecticPatch::parse(s.dim, s.n, &s.omega)
                    .map(|plectic| NamedPlectic { name: s.name.clone(), plectic })
                    .map_err(|message| DataError::Plectic { name: s.name.clone(), message })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let covers = self.cover.iter().map(build_cover).collect::<Result<Vec<_>, _>>()?;

        let mut cocycles = Vec::new();
        for s in &self.cocycle {
            let err = |message: String| DataError::Cocycle { name: s.name.clone(), message };
            let p = plectic.iter().find(|p| p.name == s.plectic).ok_or_else(|| DataError::Unknown { kind: "plectic", name: s.plectic.clone() })?;
            let patch = p.plectic.patch();
            let (cover, weights) = if s.cover == TRIVIAL_COVER {
                (Cover::trivial(patch), Some(vec![Poly::one(patch.vars())]))
            } else {
                let c = covers.iter().find(|c| c.name == s.cover).ok_or_else(|| DataError::Unknown { kind: "cover", name: s.cover.clone() })?;
                (c.cover.clone(), c.weights.clone())
            };
            if cover.patch() != patch {
                return Err(err(format!("cover '{}' lives on a different patch than plectic '{}'", s.cover, s.plectic)));
            }
            let n = p.plectic.n();
            let mut comps = Vec::new();
            for c in &s.components {
                if c.simplex.is_empty() || c.simplex.len() > n + 1 {
                    return Err(err(format!("simplex {:?} outside Čech degrees 0..={n}", c.simplex)));
                }
                let degree = n + 1 - c.simplex.len();
                let f = PolyForm::parse_with_degree(patch, &c.form, degree).map_err(|e| err(format!("form '{}': {e}", c.form)))?;
                comps.push((c.simplex.clone(), f));
            }
            let total = TotElement::on_cover(&cover, n, comps).map_err(|source| DataError::InvalidCocycle { name: s.name.clone(), source })?;
            let cocycle = DeligneCocycle::new(&cover, n, total).map_err(|source| DataError::InvalidCocycle { name: s.name.clone(), source })?;
            cocycle.check(p.plectic.omega()).map_err(|source| DataError::InvalidCocycle { name: s.name.clone(), source })?;
            cocycles.push(NamedCocycle { name: s.name.clone(), plectic: p.clone(), cover: s.cover.clone(), cocycle, weights });
        }
        let lie = self.lie.iter().map(build_lie).collect::<Result<Vec<_>, _>>()?;
        Ok(Zoo { cartan_dims: self.cartan_dims, plectic, covers, cocycles, lie })
    }
}

fn parse_file(text: &str) -> Result<ZooFile, DataError> {
    toml::from_str(text).map_err(|e| DataError::Syntax(e.to_string()))
}

impl Zoo {
    pub fn parse(text: &str) -> Result<Zoo, DataError> {
        parse_file(text)?.build()
    }

    pub fn builtin() -> Zoo {
        Zoo::parse(BUILTIN_ZOO).expect("shipped zoo is valid")
    }

    /// Loads and merges data files; a directory contributes its `*.toml` files in name order.
    pub fn load(paths: &[PathBuf]) -> Result<Zoo, DataError> {
        let mut merged = ZooFile::default();
        for path in paths {
            for file in data_files(path)? {
                let text = std::fs::read_to_string(&file).map_err(|e| DataError::Io { path: file.display().to_string(), message: e.to_string() })?;
                merged.merge(parse_file(&text).map_err(|e| match e {
                    DataError::Syntax(m) => DataError::Syntax(format!("{}: {m}", file.display())),
                    other => other,
                })?);
            }
        }
        merged.build()
    }

    pub fn plectic(&self, name: &str) -> Option<&NamedPlectic> {
        self.plectic.iter().find(|p| p.name == name)
    }

    pub fn cover(&self, name: &str) -> Option<&NamedCover> {
        self.covers.iter().find(|c| c.name == name)
    }

    pub fn cocycle(&self, name: &str) -> Option<&NamedCocycle> {
        self.cocycles.iter().find(|c| c.name == name)
    }
}

fn data_files(path: &Path) -> Result<Vec<PathBuf>, DataError> {
    let io = |e: std::io::Error| DataError::Io { path: path.display().to_string(), message: e.to_string() };
    let meta = std::fs::metadata(path).map_err(io)?;
    if !meta.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("data path {0} does not exist")]
    MissingPath(String),
}

fn default_seed() -> u64 {
    42
}

fn default_samples() -> usize {
    100
}

fn default_poly_degree() -> u32 {
    2
}

fn default_truncation() -> u32 {
    3
}

/// Parameters of one verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// May be left out of a file and supplied by the caller.
    #[serde(default)]
    pub suite: String,
    /// Data files or directories; empty means the shipped zoo.
    #[serde(default)]
    pub data: Vec<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Samples per sampled check.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Bound on the coefficient degree of sampled polynomials.
    #[serde(default = "default_poly_degree")]
    pub poly_degree: u32,
    /// Weight bound `D` for the finite-dimensional truncations.
    #[serde(default = "default_truncation")]
    pub truncation: u32,
    /// Record the wall time in the report (breaks byte-identical reruns).
    #[serde(default)]
    pub wall_time: bool,
}

impl SuiteConfig {
    pub fn new(suite: &str) -> Self {
        SuiteConfig {
            suite: suite.to_string(),
            data: Vec::new(),
            seed: default_seed(),
            samples: default_samples(),
            poly_degree: default_poly_degree(),
            truncation: default_truncation(),
            wall_time: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let c: SuiteConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file; relative data paths resolve against the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Syntax(format!("{}: {e}", path.display())))?;
        let mut c: SuiteConfig = toml::from_str(&text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in &mut c.data {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seed == 0 {
            return Err(ConfigError::NotPositive("seed"));
        }
        if self.samples == 0 {
            return Err(ConfigError::NotPositive("samples"));
        }
        if self.poly_degree == 0 {
            return Err(ConfigError::NotPositive("poly_degree"));
        }
        if let Some(p) = self.data.iter().find(|p| !p.exists()) {
            return Err(ConfigError::MissingPath(p.display().to_string()));
        }
        Ok(())
    }

    pub fn zoo(&self) -> Result<Zoo, DataError> {
        if self.data.is_empty() {
            Ok(Zoo::builtin())
        } else {
            Zoo::load(&self.data)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_zoo_loads() {
        let z = Zoo::builtin();
        assert_eq!(z.cartan_dims, vec![3, 4]);
        assert_eq!(z.plectic.len(), 3);
        assert_eq!(z.cocycles.len(), 4);
        assert!(z.cover("r2-three-box").unwrap().cover.is_full());
        assert!(z.cover("r1-chain").unwrap().weights.is_none());
        assert_eq!(z.lie[0].algebra.dim(), 3);
        assert_eq!(z.cocycle("n2-two-box").unwrap().plectic.plectic.n(), 2);
    }

    #[test]
    fn non_closed_omega_is_a_data_error() {
        let text = "[[plectic]]\nname = \"bad\"\ndim = 3\nn = 1\nomega = \"x dy^dz\"\n";
        let err = Zoo::parse(text).unwrap_err();
        assert!(err.to_string().contains("omega not closed"), "{err}");
    }

    #[test]
    fn broken_cocycle_is_rejected() {
        let text = BUILTIN_ZOO.replace("{ simplex = [0, 1], form = \"x*y\" }", "{ simplex = [0, 1], form = \"x\" }");
        assert!(matches!(Zoo::parse(&text), Err(DataError::InvalidCocycle { ref name, .. }) if name == "n1-two-box"));
    }

    #[test]
    fn references_and_duplicates() {
        let text = BUILTIN_ZOO.replace("cover = \"r2-two-box\"", "cover = \"nowhere\"");
        assert!(matches!(Zoo::parse(&text), Err(DataError::Unknown { kind: "cover", .. })));
        let text = format!("{BUILTIN_ZOO}\n[[plectic]]\nname = \"r2-area\"\ndim = 2\nn = 1\nomega = \"dx^dy\"\n");
        assert!(matches!(Zoo::parse(&text), Err(DataError::Duplicate { kind: "plectic", .. })));
        assert!(matches!(Zoo::parse("[[plectic]]\nname = 1\n"), Err(DataError::Syntax(_))));
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = SuiteConfig::from_toml("suite = \"cartan\"\n").unwrap();
        assert_eq!(c, SuiteConfig::new("cartan"));
        assert_eq!(SuiteConfig::from_toml("suite = \"all\"\nsamples = 0\n").unwrap_err(), ConfigError::NotPositive("samples"));
        assert!(matches!(SuiteConfig::from_toml("suite = \"all\"\ndata = [\"/nonexistent/zoo.toml\"]\n"), Err(ConfigError::MissingPath(_))));
        assert!(matches!(SuiteConfig::from_toml("suite = \"all\"\nbogus = 1\n"), Err(ConfigError::Syntax(_))));
    }
}
