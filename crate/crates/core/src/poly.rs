//! Sparse multivariate polynomials over the rationals.

use crate::rational::Rational;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Shared, ordered list of variable names.
pub type Vars = Arc<[String]>;

/// Dense exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("variable lists cannot be aligned: {0}")]
    VariableMismatch(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { got: usize, expected: usize },
}

pub fn make_vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Vars,
    terms: BTreeMap<Monomial, Rational>,
}

fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

impl Poly {
    pub fn zero(vars: &Vars) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Poly::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn one(vars: &Vars) -> Self {
        Poly::constant(vars, Rational::one())
    }

    /// The coordinate function `vars[i]`.
    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Poly::monomial(vars, e, Rational::one())
    }

    pub fn monomial(vars: &Vars, exps: Monomial, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { vars: vars.clone(), terms }
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length");
            p.add_term(e, &c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars()])
    }

    fn add_term(&mut self, e: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-expresses `self` over a larger variable list containing all of its names.
    pub fn embed(&self, vars: &Vars) -> Result<Poly, PolyError> {
        if same_vars(&self.vars, vars) {
            return Ok(Poly { vars: vars.clone(), terms: self.terms.clone() });
        }
        let mut map = Vec::with_capacity(self.nvars());
        for name in self.vars.iter() {
            match vars.iter().position(|v| v == name) {
                Some(j) => map.push(j),
                None => {
                    if self.terms.keys().any(|e| e[map.len()] != 0) {
                        return Err(PolyError::VariableMismatch(format!("`{name}` missing from target")));
                    }
                    map.push(usize::MAX);
                }
            }
        }
        let mut out = Poly::zero(vars);
        for (e, c) in &self.terms {
            let mut f = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    f[map[i]] = k;
                }
            }
            out.add_term(f, c);
        }
        Ok(out)
    }

    /// Union of two variable lists, preserving the order of `a` then new names of `b`.
    pub fn align_vars(a: &Vars, b: &Vars) -> Result<Vars, PolyError> {
        if same_vars(a, b) {
            return Ok(a.clone());
        }
        for list in [a, b] {
            for (i, n) in list.iter().enumerate() {
                if list[..i].contains(n) {
                    return Err(PolyError::VariableMismatch(format!("duplicate variable `{n}`")));
                }
            }
        }
        let mut names: Vec<String> = a.to_vec();
        for n in b.iter() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        Ok(names.into())
    }

    fn aligned(a: &Poly, b: &Poly) -> Result<(Poly, Poly), PolyError> {
        let vars = Poly::align_vars(&a.vars, &b.vars)?;
        Ok((a.embed(&vars)?, b.embed(&vars)?))
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        let (a, b) = Poly::aligned(self, other)?;
        Ok(&a + &b)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        let (a, b) = Poly::aligned(self, other)?;
        Ok(&a * &b)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect() }
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, &(c * &Rational::from_int(e[i] as i64)));
            }
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<Poly, PolyError> {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => Ok(self.partial(i)),
            None => Err(PolyError::VariableMismatch(format!("no variable `{name}`"))),
        }
    }

    /// Multiplies by the coordinate `vars[i]`.
    pub fn mul_var(&self, i: usize) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f[i] += 1;
                    (f, c.clone())
                })
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::PointDimension { got: point.len(), expected: self.nvars() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= &x.pow(k);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Splits into homogeneous components keyed by total degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = e.iter().sum();
            out.entry(d).or_insert_with(|| Poly::zero(&self.vars)).add_term(e.clone(), c);
        }
        out
    }

    /// Terms in canonical print order: descending total degree, then descending exponents.
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    /// Monomial text without coefficient, e.g. `x^2*y`; empty for the constant monomial.
    pub fn monomial_text(vars: &Vars, e: &[u32]) -> String {
        let mut parts = Vec::new();
        for (name, &k) in vars.iter().zip(e) {
            match k {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{k}")),
            }
        }
        parts.join("*")
    }

    pub fn parse(text: &str, vars: &Vars) -> Result<Poly, PolyError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0, vars, depth: 0 };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

impl Poly {
    /// `c*m`, written `m` when `c = 1` and `c` when `m` is empty.
    pub(crate) fn term_text(c: &Rational, mono: &str) -> String {
        match (mono.is_empty(), c.is_one()) {
            (true, _) => c.to_string(),
            (false, true) => mono.to_string(),
            (false, false) => format!("{c}*{mono}"),
        }
    }
}

fn write_signed_terms(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    for (i, (e, c)) in p.sorted_terms().into_iter().enumerate() {
        let body = Poly::term_text(&c.abs(), &Poly::monomial_text(&p.vars, e));
        match (i, c.is_negative()) {
            (0, false) => write!(f, "{body}")?,
            (0, true) => write!(f, "-{body}")?,
            (_, false) => write!(f, " + {body}")?,
            (_, true) => write!(f, " - {body}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write_signed_terms(f, self)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        debug_assert!(same_vars(&self.vars, &rhs.vars), "unaligned polynomial add");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        debug_assert!(same_vars(&self.vars, &rhs.vars), "unaligned polynomial sub");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        debug_assert!(same_vars(&self.vars, &rhs.vars), "unaligned polynomial mul");
        let mut out = Poly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }
}

impl std::ops::AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        debug_assert!(same_vars(&self.vars, &rhs.vars), "unaligned polynomial add");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c);
        }
    }
}

/// Bounds that keep parsing of untrusted text cheap.
const MAX_DEPTH: usize = 64;
const MAX_DEGREE: u32 = 64;
const MAX_TERMS: usize = 4096;

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: &'a Vars,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, PolyError> {
        let mut acc = Poly::zero(self.vars);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            if sign < 0 {
                acc = &acc - &t;
            } else {
                acc += &t;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, PolyError> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.power()?;
            self.check_degree(acc.degree().unwrap_or(0) + f.degree().unwrap_or(0))?;
            acc = self.product(&acc, &f)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.uint()?;
            if k > MAX_DEGREE {
                return Err(self.err("exponent too large"));
            }
            self.check_degree(base.degree().unwrap_or(0) * k)?;
            let mut acc = Poly::one(self.vars);
            for _ in 0..k {
                acc = self.product(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn check_degree(&self, d: u32) -> Result<(), PolyError> {
        if d > MAX_DEGREE {
            Err(self.err("degree too large"))
        } else {
            Ok(())
        }
    }

    fn product(&self, a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        if a.num_terms().saturating_mul(b.num_terms()) > 64 * MAX_TERMS {
            return Err(self.err("polynomial too large"));
        }
        let p = a * b;
        if p.num_terms() > MAX_TERMS {
            return Err(self.err("polynomial too large"));
        }
        Ok(p)
    }

    fn uint(&mut self) -> Result<u32, PolyError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("integer out of range"))
    }

    fn atom(&mut self) -> Result<Poly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return Err(self.err("nesting too deep"));
                }
                let inner = self.expr()?;
                self.depth -= 1;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.s.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let d0 = self.pos;
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if d0 == self.pos {
                        return Err(self.err("expected denominator"));
                    }
                }
                let lit = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let r: Rational = lit.parse().map_err(|_| self.err("bad number"))?;
                Ok(Poly::constant(self.vars, r))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(Poly::var(self.vars, i)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{name}`")))
                    }
                }
            }
            _ => Err(self.err("expected number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xyz() -> Vars {
        make_vars(&["x", "y", "z"])
    }

    #[test]
    fn canonical_round_trip() {
        let v = xyz();
        let p = Poly::parse("3/2*x^2*y - 1*z", &v).unwrap();
        assert_eq!(p.to_string(), "3/2*x^2*y - z");
        let q = Poly::parse("-z + x*y*3/2*x", &v).unwrap();
        assert_eq!(q, p);
        assert_eq!(Poly::parse("0", &v).unwrap().to_string(), "0");
        assert!(Poly::parse("x/2", &v).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let v = xyz();
        let x = Poly::var(&v, 0);
        let y = Poly::var(&v, 1);
        let prod = &(&x + &y) * &(&x - &y);
        assert_eq!(prod, Poly::parse("x^2 - y^2", &v).unwrap());
        let p = Poly::parse("x^2*y", &v).unwrap();
        assert_eq!(p.partial(0), Poly::parse("2*x*y", &v).unwrap());
        let pt = [Rational::from_int(2), Rational::from_int(3), Rational::zero()];
        assert_eq!(p.eval(&pt).unwrap(), Rational::from_int(12));
    }

    #[test]
    fn alignment_by_name() {
        let a = Poly::parse("x", &make_vars(&["x"])).unwrap();
        let b = Poly::parse("y", &make_vars(&["y"])).unwrap();
        let s = a.try_add(&b).unwrap();
        assert_eq!(s.vars()[..], ["x".to_string(), "y".to_string()][..]);
        assert_eq!(s.to_string(), "x + y");
        let dup = make_vars(&["x", "x"]);
        assert!(Poly::align_vars(&dup, &make_vars(&["y"])).is_err());
    }

    #[test]
    fn parser_bounds_untrusted_input() {
        let v = make_vars(&["x", "y", "z", "w"]);
        let deep = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(matches!(Poly::parse(&deep, &v), Err(PolyError::Parse { msg, .. }) if msg == "nesting too deep"));
        assert!(Poly::parse(&format!("{}x{}", "(".repeat(60), ")".repeat(60)), &v).is_ok());
        assert!(Poly::parse("((x + y + z + w)^64)^64", &v).is_err());
        assert!(Poly::parse("(x + y + z + w)^40", &v).is_err());
        assert!(Poly::parse("x^40*y^40", &v).is_err());
        assert_eq!(Poly::parse("(x + 1)^3", &v).unwrap().num_terms(), 4);
    }
}
