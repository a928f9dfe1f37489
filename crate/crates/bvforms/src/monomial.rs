//! Canonical monomials over Darboux generators.
//!
//! A context of `n` pairs has four generator families, `i = 1..=n`:
//!
//! ```text
//!   x_i   even function coordinate
//!   p_i   odd function coordinate
//!   dx_i  odd  (form degree 1, auxiliary degree +1)
//!   dp_i  even (form degree 1, auxiliary degree -1)
//! ```
//!
//! Total parity is function parity plus form degree mod 2. The commuting
//! generators (`x`, `dp`) are stored as exponent vectors; the anticommuting
//! ones (`p`, `dx`) as bit sets. The canonical factor order is: all `p` by
//! index, then all `dx` by index. Reordering a product into that form
//! accumulates the Koszul sign, one `-1` per transposition of odd factors.

use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GenKind {
    X,
    P,
    Dx,
    Dp,
}

impl GenKind {
    /// 0 for even, 1 for odd.
    pub fn parity(self) -> u32 {
        match self {
            GenKind::X | GenKind::Dp => 0,
            GenKind::P | GenKind::Dx => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self.parity() == 1
    }
}

/// One generator, identified by kind and 1-based index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Generator {
    pub kind: GenKind,
    pub index: u32,
}

impl Generator {
    pub fn x(index: u32) -> Self {
        Generator { kind: GenKind::X, index }
    }

    pub fn p(index: u32) -> Self {
        Generator { kind: GenKind::P, index }
    }

    pub fn dx(index: u32) -> Self {
        Generator { kind: GenKind::Dx, index }
    }

    pub fn dp(index: u32) -> Self {
        Generator { kind: GenKind::Dp, index }
    }
}

/// Dimension (number of Darboux pairs) plus enumeration caps.
///
/// The algebra itself is untruncated; the caps only bound what the
/// verification suites enumerate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Context {
    pub n: u32,
    pub max_x_deg: u32,
    pub max_p_deg: u32,
}

impl Context {
    /// Panics if `n` is 0 or larger than the bit-set width.
    pub fn new(n: u32, max_x_deg: u32, max_p_deg: u32) -> Self {
        assert!(n >= 1, "context requires at least one Darboux pair");
        assert!(n <= 64, "bit-set representation holds at most 64 indices");
        Context { n, max_x_deg, max_p_deg }
    }
}

/// Degree data of a monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct MultiDegree {
    pub x_deg: u32,
    pub p_deg: u32,
    pub dx_count: u32,
    pub dp_count: u32,
}

impl MultiDegree {
    /// `dx` count minus `dp` count.
    pub fn auxdeg(&self) -> i64 {
        self.dx_count as i64 - self.dp_count as i64
    }

    pub fn form_degree(&self) -> u32 {
        self.dx_count + self.dp_count
    }

    /// `p` and `dx` are odd, `x` and `dp` even.
    pub fn parity(&self) -> u32 {
        (self.p_deg + self.dx_count) % 2
    }

    pub fn total(&self) -> u32 {
        self.x_deg + self.p_deg + self.dx_count + self.dp_count
    }
}

/// Pairs `(i in a, j in b)` with `j < i`; the swap count when a sorted block
/// `b` is merged after a sorted block `a`.
fn mask_inversions(a: u64, b: u64) -> u32 {
    let mut count = 0;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        count += (b & ((1u64 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    count
}

fn mask_below(mask: u64, bit: u32) -> u32 {
    (mask & ((1u64 << bit) - 1)).count_ones()
}

/// A canonical monomial. Equality and ordering are structural, so a
/// `BTreeMap` keyed by monomials iterates deterministically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    x_exp: Vec<u32>,
    p_mask: u64,
    dx_mask: u64,
    dp_exp: Vec<u32>,
}

impl Monomial {
    pub fn one(n: u32) -> Self {
        Monomial {
            x_exp: vec![0; n as usize],
            p_mask: 0,
            dx_mask: 0,
            dp_exp: vec![0; n as usize],
        }
    }

    /// Panics if the index is outside `1..=n`.
    pub fn generator(n: u32, g: Generator) -> Self {
        assert!(
            g.index >= 1 && g.index <= n,
            "generator index {} outside 1..={}",
            g.index,
            n
        );
        let mut m = Monomial::one(n);
        let i = (g.index - 1) as usize;
        match g.kind {
            GenKind::X => m.x_exp[i] = 1,
            GenKind::P => m.p_mask = 1 << i,
            GenKind::Dx => m.dx_mask = 1 << i,
            GenKind::Dp => m.dp_exp[i] = 1,
        }
        m
    }

    pub fn from_parts(x_exp: Vec<u32>, p_mask: u64, dx_mask: u64, dp_exp: Vec<u32>) -> Self {
        assert_eq!(x_exp.len(), dp_exp.len());
        Monomial { x_exp, p_mask, dx_mask, dp_exp }
    }

    /// The product of all `dx_i`, the top auxiliary-degree monomial.
    pub fn dx_top(n: u32) -> Self {
        let mut m = Monomial::one(n);
        m.dx_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        m
    }

    pub fn n(&self) -> u32 {
        self.x_exp.len() as u32
    }

    pub fn is_one(&self) -> bool {
        self.p_mask == 0
            && self.dx_mask == 0
            && self.x_exp.iter().all(|&e| e == 0)
            && self.dp_exp.iter().all(|&e| e == 0)
    }

    pub fn x_exp(&self, index: u32) -> u32 {
        self.x_exp[(index - 1) as usize]
    }

    pub fn dp_exp(&self, index: u32) -> u32 {
        self.dp_exp[(index - 1) as usize]
    }

    pub fn has_p(&self, index: u32) -> bool {
        self.p_mask & (1 << (index - 1)) != 0
    }

    pub fn has_dx(&self, index: u32) -> bool {
        self.dx_mask & (1 << (index - 1)) != 0
    }

    pub fn p_mask(&self) -> u64 {
        self.p_mask
    }

    pub fn dx_mask(&self) -> u64 {
        self.dx_mask
    }

    pub fn degrees(&self) -> MultiDegree {
        MultiDegree {
            x_deg: self.x_exp.iter().sum(),
            p_deg: self.p_mask.count_ones(),
            dx_count: self.dx_mask.count_ones(),
            dp_count: self.dp_exp.iter().sum(),
        }
    }

    pub fn parity(&self) -> u32 {
        (self.p_mask.count_ones() + self.dx_mask.count_ones()) % 2
    }

    /// Canonical product. `None` when an anticommuting generator repeats;
    /// otherwise the merged monomial and whether the Koszul sign is negative.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        assert_eq!(self.x_exp.len(), other.x_exp.len(), "context mismatch");
        if self.p_mask & other.p_mask != 0 || self.dx_mask & other.dx_mask != 0 {
            return None;
        }
        // other's p block crosses self's whole dx block, then both odd
        // families merge within themselves.
        let swaps = self.dx_mask.count_ones() * other.p_mask.count_ones()
            + mask_inversions(self.p_mask, other.p_mask)
            + mask_inversions(self.dx_mask, other.dx_mask);
        let merged = Monomial {
            x_exp: self
                .x_exp
                .iter()
                .zip(&other.x_exp)
                .map(|(a, b)| a + b)
                .collect(),
            p_mask: self.p_mask | other.p_mask,
            dx_mask: self.dx_mask | other.dx_mask,
            dp_exp: self
                .dp_exp
                .iter()
                .zip(&other.dp_exp)
                .map(|(a, b)| a + b)
                .collect(),
        };
        Some((merged, swaps % 2 == 1))
    }

    /// Left derivative data for one generator: the reduced monomial, the
    /// integer factor pulled down, and whether the sign flips. `None` when
    /// the derivative kills the monomial.
    pub fn partial_left(&self, g: Generator) -> Option<(Monomial, u32, bool)> {
        let i = (g.index - 1) as usize;
        let bit = 1u64 << i;
        let mut m = self.clone();
        match g.kind {
            GenKind::X => {
                if m.x_exp[i] == 0 {
                    return None;
                }
                let e = m.x_exp[i];
                m.x_exp[i] -= 1;
                Some((m, e, false))
            }
            GenKind::Dp => {
                if m.dp_exp[i] == 0 {
                    return None;
                }
                let e = m.dp_exp[i];
                m.dp_exp[i] -= 1;
                Some((m, e, false))
            }
            GenKind::P => {
                if m.p_mask & bit == 0 {
                    return None;
                }
                // Odd factors strictly left of p_i: lower-index p's only.
                let before = mask_below(m.p_mask, i as u32);
                m.p_mask &= !bit;
                Some((m, 1, before % 2 == 1))
            }
            GenKind::Dx => {
                if m.dx_mask & bit == 0 {
                    return None;
                }
                // Odd factors strictly left of dx_i: the whole p block plus
                // lower-index dx's.
                let before = m.p_mask.count_ones() + mask_below(m.dx_mask, i as u32);
                m.dx_mask &= !bit;
                Some((m, 1, before % 2 == 1))
            }
        }
    }

    /// Factors in canonical print order with their exponents.
    pub fn factors(&self) -> Vec<(Generator, u32)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 1..=n {
            let e = self.x_exp(i);
            if e > 0 {
                out.push((Generator::x(i), e));
            }
        }
        for i in 1..=n {
            if self.has_p(i) {
                out.push((Generator::p(i), 1));
            }
        }
        for i in 1..=n {
            if self.has_dx(i) {
                out.push((Generator::dx(i), 1));
            }
        }
        for i in 1..=n {
            let e = self.dp_exp(i);
            if e > 0 {
                out.push((Generator::dp(i), e));
            }
        }
        out
    }

    /// The function-degree part, with `dx`/`dp` removed. Only meaningful for
    /// monomials whose form part is exactly `dx_top`; asserted.
    pub fn strip_dx_top(&self) -> Monomial {
        let n = self.n();
        assert_eq!(self.dx_mask, Monomial::dx_top(n).dx_mask, "not a top monomial");
        assert!(self.dp_exp.iter().all(|&e| e == 0), "not a top monomial");
        Monomial {
            x_exp: self.x_exp.clone(),
            p_mask: self.p_mask,
            dx_mask: 0,
            dp_exp: vec![0; n as usize],
        }
    }
}
