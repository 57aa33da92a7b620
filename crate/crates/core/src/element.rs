//! Graded elements `v + p` shared by the geometric L∞ structures.

use crate::forms::{Graded, Kind, Patch, PolyMultivector};
use crate::linfty::Linear;
use crate::rational::Rational;
use std::fmt;

impl<K: Kind> Linear for Graded<K> {
    fn add(&self, other: &Self) -> Self {
        Graded::add(self, other)
    }

    fn scale(&self, c: &Rational) -> Self {
        Graded::scale(self, c)
    }

    fn is_zero(&self) -> bool {
        Graded::is_zero(self)
    }
}

impl<A: Linear, B: Linear> Linear for (A, B) {
    fn add(&self, other: &Self) -> Self {
        (self.0.add(&other.0), self.1.add(&other.1))
    }

    fn scale(&self, c: &Rational) -> Self {
        (self.0.scale(c), self.1.scale(c))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }
}

/// Element `v + p` of homological degree `degree`; `v` is a vector field that vanishes
/// outside degree 0.
#[derive(Clone, PartialEq, Eq)]
pub struct Elt<P> {
    pub degree: i32,
    pub v: PolyMultivector,
    pub p: P,
}

impl<P> Elt<P> {
    pub fn new(degree: i32, v: PolyMultivector, p: P) -> Self {
        Elt { degree, v, p }
    }

    /// Element with zero vector part.
    pub fn pure(patch: &Patch, degree: i32, p: P) -> Self {
        Elt { degree, v: PolyMultivector::zero(patch, 1), p }
    }
}

impl<P: Linear> Linear for Elt<P> {
    fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        Elt { degree: self.degree, v: self.v.add(&other.v), p: self.p.add(&other.p) }
    }

    fn scale(&self, c: &Rational) -> Self {
        Elt { degree: self.degree, v: self.v.scale(c), p: self.p.scale(c) }
    }

    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.p.is_zero()
    }
}

impl<P: fmt::Debug> fmt::Debug for Elt<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            write!(f, "(deg 0: v = {}; {:?})", self.v, self.p)
        } else {
            write!(f, "(deg {}: {:?})", self.degree, self.p)
        }
    }
}

impl Linear for () {
    fn add(&self, _: &Self) -> Self {}

    fn scale(&self, _: &Rational) -> Self {}

    fn is_zero(&self) -> bool {
        true
    }
}
