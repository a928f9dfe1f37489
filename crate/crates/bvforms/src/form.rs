//! Linear combinations of canonical monomials with exact rational
//! coefficients. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use crate::monomial::{GenKind, Generator, Monomial, MultiDegree};
use crate::scalar::{int, Scalar};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperForm {
    n: u32,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SuperForm {
    pub fn zero(n: u32) -> Self {
        SuperForm { n, terms: BTreeMap::new() }
    }

    pub fn one(n: u32) -> Self {
        SuperForm::from_monomial(Monomial::one(n), int(1))
    }

    pub fn scalar(n: u32, c: Scalar) -> Self {
        SuperForm::from_monomial(Monomial::one(n), c)
    }

    pub fn generator(n: u32, g: Generator) -> Self {
        SuperForm::from_monomial(Monomial::generator(n, g), int(1))
    }

    pub fn from_monomial(m: Monomial, c: Scalar) -> Self {
        let mut f = SuperForm::zero(m.n());
        f.add_term(m, c);
        f
    }

    /// The product of all `dx_i`.
    pub fn dx_top(n: u32) -> Self {
        SuperForm::from_monomial(Monomial::dx_top(n), int(1))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.n(), self.n, "context mismatch");
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> SuperForm {
        if c.is_zero() {
            return SuperForm::zero(self.n);
        }
        SuperForm {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Left derivative by one generator, extended linearly.
    pub fn partial_left(&self, g: Generator) -> SuperForm {
        assert!(
            g.index >= 1 && g.index <= self.n,
            "generator index {} outside 1..={}",
            g.index,
            self.n
        );
        let mut out = SuperForm::zero(self.n);
        for (m, c) in &self.terms {
            if let Some((rest, factor, neg)) = m.partial_left(g) {
                let mut v = c * int(factor as i64);
                if neg {
                    v = -v;
                }
                out.add_term(rest, v);
            }
        }
        out
    }

    /// Interior product with the coordinate vector field of `g`, which must
    /// be an `x` or `p` generator: contraction removes the paired `dx`
    /// resp. `dp` factor.
    pub fn contract(&self, g: Generator) -> SuperForm {
        let paired = match g.kind {
            GenKind::X => Generator::dx(g.index),
            GenKind::P => Generator::dp(g.index),
            GenKind::Dx | GenKind::Dp => {
                panic!("contract expects a coordinate generator, got {:?}", g.kind)
            }
        };
        self.partial_left(paired)
    }

    /// Splits into auxiliary-degree homogeneous components.
    pub fn split_by_auxdeg(&self) -> BTreeMap<i64, SuperForm> {
        let mut out: BTreeMap<i64, SuperForm> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degrees().auxdeg())
                .or_insert_with(|| SuperForm::zero(self.n))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The component of the given auxiliary degree.
    pub fn auxdeg_component(&self, auxdeg: i64) -> SuperForm {
        let mut out = SuperForm::zero(self.n);
        for (m, c) in &self.terms {
            if m.degrees().auxdeg() == auxdeg {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// True when no term carries a `dx` or `dp` factor.
    pub fn is_function_degree(&self) -> bool {
        self.terms.keys().all(|m| m.degrees().form_degree() == 0)
    }

    /// Largest form degree among the terms, 0 for the zero form.
    pub fn max_form_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degrees().form_degree())
            .max()
            .unwrap_or(0)
    }

    /// Degrees when the form is a single monomial, `None` otherwise.
    pub fn single_degrees(&self) -> Option<MultiDegree> {
        if self.terms.len() == 1 {
            self.terms.keys().next().map(|m| m.degrees())
        } else {
            None
        }
    }
}

impl Add for &SuperForm {
    type Output = SuperForm;

    fn add(self, rhs: &SuperForm) -> SuperForm {
        assert_eq!(self.n, rhs.n, "context mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SuperForm {
    type Output = SuperForm;

    fn sub(self, rhs: &SuperForm) -> SuperForm {
        assert_eq!(self.n, rhs.n, "context mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &SuperForm {
    type Output = SuperForm;

    fn neg(self) -> SuperForm {
        SuperForm {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &SuperForm {
    type Output = SuperForm;

    fn mul(self, rhs: &SuperForm) -> SuperForm {
        assert_eq!(self.n, rhs.n, "context mismatch");
        let mut out = SuperForm::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((m, neg)) = ma.mul(mb) {
                    let mut c = ca * cb;
                    if neg {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }
}

/// Convenience for building forms in tests and generators: the product of a
/// scalar and a list of generators, `c * g1 * g2 * ...`.
pub fn term(n: u32, c: Scalar, gens: &[Generator]) -> SuperForm {
    let mut acc = SuperForm::scalar(n, c);
    for g in gens {
        acc = &acc * &SuperForm::generator(n, *g);
    }
    acc
}

impl SuperForm {
    /// `self` raised to a non-negative integer power.
    pub fn pow(&self, k: u32) -> SuperForm {
        let mut acc = SuperForm::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_one() && c.is_one())
    }
}
