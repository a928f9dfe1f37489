//! The two differentials and the operators built from them.
//!
//! `de_rham` and `omega_wedge` anticommute and square to zero, so they make
//! the form algebra a bicomplex. The auxiliary degree (`dx` count minus `dp`
//! count) is preserved by `omega_wedge` and shifted by one either way by
//! `de_rham`. The double contraction `homotopy_l` satisfies
//!
//! ```text
//!   L(ω∧α) + ω∧L(α) = (n - auxdeg α) · α
//! ```
//!
//! on auxdeg-homogeneous α, which is what makes `invert_omega` possible away
//! from auxdeg = n and pins every sign convention in this crate: the identity
//! holds exactly, with coefficient exactly `n - auxdeg`, only for the factor
//! order implemented here (derivative generator applied first, form generator
//! multiplied from the left).

use thiserror::Error;

use crate::form::SuperForm;
use crate::monomial::Generator;
use crate::scalar::{int, Scalar};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OperatorError {
    /// Inversion requested for a component sitting at the top auxiliary
    /// degree, where wedging by ω has no image.
    #[error("component at top auxiliary degree {auxdeg} cannot be inverted: {component}")]
    ComponentAtTopAuxdeg { auxdeg: i64, component: SuperForm },
    /// The re-wedged candidate did not reproduce the input.
    #[error("form is not exact for the wedge operator; residual {residual}")]
    NotExact { residual: SuperForm },
    /// The input is not annihilated by wedging with ω.
    #[error("form is not closed under the wedge operator; residual {residual}")]
    NotClosed { residual: SuperForm },
    /// A function-degree form was required.
    #[error("expected a form of degree 0, found form degree {found}")]
    NotFunctionDegree { found: u32 },
}

/// Exterior differential: `d = Σ_i dx_i ∂_{x_i} + dp_i ∂_{p_i}` with the
/// form factor multiplied from the left.
pub fn de_rham(f: &SuperForm) -> SuperForm {
    let n = f.n();
    let mut out = SuperForm::zero(n);
    for i in 1..=n {
        let dx = SuperForm::generator(n, Generator::dx(i));
        let dp = SuperForm::generator(n, Generator::dp(i));
        out = &out + &(&dx * &f.partial_left(Generator::x(i)));
        out = &out + &(&dp * &f.partial_left(Generator::p(i)));
    }
    out
}

/// The odd symplectic form `Σ_i dp_i ∧ dx_i` in canonical order.
pub fn omega(n: u32) -> SuperForm {
    let mut out = SuperForm::zero(n);
    for i in 1..=n {
        let dx = SuperForm::generator(n, Generator::dx(i));
        let dp = SuperForm::generator(n, Generator::dp(i));
        out = &out + &(&dx * &dp);
    }
    out
}

/// Left multiplication by ω.
pub fn omega_wedge(f: &SuperForm) -> SuperForm {
    &omega(f.n()) * f
}

/// Double contraction `Σ_i ∂_{x_i} ⌟ ∂_{p_i} ⌟ α`.
pub fn homotopy_l(f: &SuperForm) -> SuperForm {
    let n = f.n();
    let mut out = SuperForm::zero(n);
    for i in 1..=n {
        out = &out + &f.contract(Generator::p(i)).contract(Generator::x(i));
    }
    out
}

/// Solves `ω ∧ α = β` componentwise via the homotopy: on the auxdeg-k
/// component, `α_k = L(β_k) / (n - k)`. Fails if β has a component at
/// auxdeg n, or if the re-wedged candidate misses β (β not exact).
pub fn invert_omega(beta: &SuperForm) -> Result<SuperForm, OperatorError> {
    let n = beta.n();
    let mut alpha = SuperForm::zero(n);
    for (auxdeg, component) in beta.split_by_auxdeg() {
        if auxdeg == n as i64 {
            return Err(OperatorError::ComponentAtTopAuxdeg { auxdeg, component });
        }
        let denom = int(n as i64 - auxdeg);
        let inv: Scalar = int(1) / denom;
        alpha = &alpha + &homotopy_l(&component).scale(&inv);
    }
    let residual = &omega_wedge(&alpha) - beta;
    if !residual.is_zero() {
        return Err(OperatorError::NotExact { residual });
    }
    Ok(alpha)
}

/// Second-order operator `Σ_k ∂_{x_k} ∂_{p_k}` on function-degree forms.
pub fn bv_delta(f: &SuperForm) -> Result<SuperForm, OperatorError> {
    if !f.is_function_degree() {
        return Err(OperatorError::NotFunctionDegree { found: f.max_form_degree() });
    }
    let n = f.n();
    let mut out = SuperForm::zero(n);
    for k in 1..=n {
        out = &out + &f.partial_left(Generator::p(k)).partial_left(Generator::x(k));
    }
    Ok(out)
}

/// For an ω∧-closed γ, the unique function f with γ = f·dx_top modulo the
/// image of ω∧. The component at top auxiliary degree is read off directly;
/// every other component is certified exact by running `invert_omega` on it.
pub fn canonical_rep(gamma: &SuperForm) -> Result<SuperForm, OperatorError> {
    let n = gamma.n();
    let closed_residual = omega_wedge(gamma);
    if !closed_residual.is_zero() {
        return Err(OperatorError::NotClosed { residual: closed_residual });
    }
    let top = gamma.auxdeg_component(n as i64);
    let rest = gamma - &top;
    if !rest.is_zero() {
        invert_omega(&rest)?;
    }
    let mut f = SuperForm::zero(n);
    for (m, c) in top.terms() {
        f.add_term(m.strip_dx_top(), c.clone());
    }
    Ok(f)
}

/// A polynomial in a formal central even variable `h` with `SuperForm`
/// coefficients. Trailing zero levels are trimmed, so equality is exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HbarForm {
    n: u32,
    levels: Vec<SuperForm>,
}

impl HbarForm {
    pub fn new(n: u32, mut levels: Vec<SuperForm>) -> Self {
        for level in &levels {
            assert_eq!(level.n(), n, "context mismatch");
        }
        while levels.last().is_some_and(SuperForm::is_zero) {
            levels.pop();
        }
        HbarForm { n, levels }
    }

    pub fn zero(n: u32) -> Self {
        HbarForm { n, levels: Vec::new() }
    }

    pub fn from_form(f: SuperForm) -> Self {
        let n = f.n();
        HbarForm::new(n, vec![f])
    }

    /// `h^k` times a plain form.
    pub fn shifted(k: usize, f: SuperForm) -> Self {
        let n = f.n();
        let mut levels = vec![SuperForm::zero(n); k];
        levels.push(f);
        HbarForm::new(n, levels)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    /// Number of stored levels; the h-degree is one less.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, j: usize) -> SuperForm {
        self.levels.get(j).cloned().unwrap_or_else(|| SuperForm::zero(self.n))
    }

    pub fn levels(&self) -> &[SuperForm] {
        &self.levels
    }

    /// The plain form when no positive h-power is present.
    pub fn constant_part(&self) -> Option<SuperForm> {
        if self.levels.len() <= 1 {
            Some(self.level(0))
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &HbarForm) -> HbarForm {
        assert_eq!(self.n, rhs.n, "context mismatch");
        let len = self.levels.len().max(rhs.levels.len());
        let levels = (0..len).map(|j| &self.level(j) + &rhs.level(j)).collect();
        HbarForm::new(self.n, levels)
    }

    pub fn neg(&self) -> HbarForm {
        HbarForm::new(self.n, self.levels.iter().map(|f| -f).collect())
    }

    pub fn sub(&self, rhs: &HbarForm) -> HbarForm {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &HbarForm) -> HbarForm {
        assert_eq!(self.n, rhs.n, "context mismatch");
        if self.is_zero() || rhs.is_zero() {
            return HbarForm::zero(self.n);
        }
        let len = self.levels.len() + rhs.levels.len() - 1;
        let mut levels = vec![SuperForm::zero(self.n); len];
        for (i, a) in self.levels.iter().enumerate() {
            for (j, b) in rhs.levels.iter().enumerate() {
                levels[i + j] = &levels[i + j] + &(a * b);
            }
        }
        HbarForm::new(self.n, levels)
    }

    pub fn scale(&self, c: &Scalar) -> HbarForm {
        HbarForm::new(self.n, self.levels.iter().map(|f| f.scale(c)).collect())
    }

    pub fn pow(&self, k: u32) -> HbarForm {
        let mut acc = HbarForm::from_form(SuperForm::one(self.n));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

/// The deformed differential `h·d + ω∧` applied levelwise: the coefficient
/// of `h^j` in the result is `d(z_{j-1}) + ω∧z_j`.
pub fn hbar_d(z: &HbarForm) -> HbarForm {
    let n = z.n();
    if z.is_zero() {
        return HbarForm::zero(n);
    }
    let len = z.len() + 1;
    let mut levels = Vec::with_capacity(len);
    for j in 0..len {
        let from_d = if j == 0 { SuperForm::zero(n) } else { de_rham(&z.level(j - 1)) };
        levels.push(&from_d + &omega_wedge(&z.level(j)));
    }
    HbarForm::new(n, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::term;
    use crate::scalar::ratio;

    fn g(n: u32, gen: Generator) -> SuperForm {
        SuperForm::generator(n, gen)
    }

    #[test]
    fn de_rham_examples() {
        let n = 1;
        let x1 = g(n, Generator::x(1));
        let p1 = g(n, Generator::p(1));
        let dx1 = g(n, Generator::dx(1));
        assert_eq!(de_rham(&x1), dx1);
        // d(x1^2) = 2*x1*dx1
        let expect = term(n, int(2), &[Generator::x(1), Generator::dx(1)]);
        assert_eq!(de_rham(&x1.pow(2)), expect);
        // d(p1*dx1) = omega for n = 1
        assert_eq!(de_rham(&(&p1 * &dx1)), omega(n));
        // d(1) = 0
        assert!(de_rham(&SuperForm::one(n)).is_zero());
    }

    #[test]
    fn omega_matches_hand_expansion() {
        assert_eq!(
            omega(1),
            term(1, int(1), &[Generator::dx(1), Generator::dp(1)])
        );
        let expect = &term(2, int(1), &[Generator::dx(1), Generator::dp(1)])
            + &term(2, int(1), &[Generator::dx(2), Generator::dp(2)]);
        assert_eq!(omega(2), expect);
    }

    #[test]
    fn bicomplex_laws_on_small_range() {
        for n in 1..=2 {
            for m in crate::cohomology::all_monomials(n, 4) {
                let f = SuperForm::from_monomial(m, int(1));
                assert!(de_rham(&de_rham(&f)).is_zero());
                assert!(omega_wedge(&omega_wedge(&f)).is_zero());
                let anti = &de_rham(&omega_wedge(&f)) + &omega_wedge(&de_rham(&f));
                assert!(anti.is_zero());
            }
        }
    }

    #[test]
    fn homotopy_identity_examples() {
        // L(omega) = n
        for n in 1..=3 {
            assert_eq!(homotopy_l(&omega(n)), SuperForm::scalar(n, int(n as i64)));
        }
        // L(1) = 0, L(dx1) = 0
        assert!(homotopy_l(&SuperForm::one(2)).is_zero());
        assert!(homotopy_l(&g(2, Generator::dx(1))).is_zero());
    }

    #[test]
    fn invert_omega_examples() {
        let n = 1;
        // omega = ω∧1
        assert_eq!(invert_omega(&omega(n)).unwrap(), SuperForm::one(n));
        // x1*dx1*dp1 = ω∧x1
        let beta = term(n, int(1), &[Generator::x(1), Generator::dx(1), Generator::dp(1)]);
        assert_eq!(invert_omega(&beta).unwrap(), g(n, Generator::x(1)));
        // top-degree component refuses
        let top = g(n, Generator::dx(1));
        match invert_omega(&top) {
            Err(OperatorError::ComponentAtTopAuxdeg { auxdeg, .. }) => assert_eq!(auxdeg, 1),
            other => panic!("expected top-degree failure, got {other:?}"),
        }
        // non-exact input refuses: dp1 is closed in no sense here
        let dp1 = g(n, Generator::dp(1));
        match invert_omega(&dp1) {
            Err(OperatorError::NotExact { .. }) => {}
            other => panic!("expected NotExact, got {other:?}"),
        }
    }

    #[test]
    fn bv_delta_examples() {
        let n1 = 1;
        let f = term(n1, int(1), &[Generator::x(1), Generator::p(1)]);
        assert_eq!(bv_delta(&f).unwrap(), SuperForm::one(n1));
        let f2 = term(n1, int(1), &[Generator::p(1)]);
        assert!(bv_delta(&f2).unwrap().is_zero());
        // Δ(x1^2*p1) = 2*x1
        let f = &g(n1, Generator::x(1)).pow(2) * &g(n1, Generator::p(1));
        assert_eq!(bv_delta(&f).unwrap(), g(n1, Generator::x(1)).scale(&int(2)));
        // Δ(x1*p1*p2) = p2 for n = 2
        let n2 = 2;
        let f = term(n2, int(1), &[Generator::x(1), Generator::p(1), Generator::p(2)]);
        assert_eq!(bv_delta(&f).unwrap(), g(n2, Generator::p(2)));
        // form-degree input rejected
        let bad = g(n2, Generator::dx(1));
        assert!(matches!(
            bv_delta(&bad),
            Err(OperatorError::NotFunctionDegree { found: 1 })
        ));
    }

    #[test]
    fn delta_squares_to_zero() {
        for n in 1..=2 {
            for m in crate::cohomology::function_monomials(n, 4) {
                let f = SuperForm::from_monomial(m, int(1));
                let once = bv_delta(&f).unwrap();
                assert!(bv_delta(&once).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn canonical_rep_examples() {
        let n = 1;
        // x1*dx1 is already in canonical shape
        let gamma = term(n, int(1), &[Generator::x(1), Generator::dx(1)]);
        assert_eq!(canonical_rep(&gamma).unwrap(), g(n, Generator::x(1)));
        // omega is exact, so its class is zero
        assert!(canonical_rep(&omega(n)).unwrap().is_zero());
        // adding an exact piece does not change the class
        let h = g(n, Generator::x(1));
        let gamma = &term(n, ratio(3, 2), &[Generator::p(1), Generator::dx(1)])
            + &omega_wedge(&h);
        assert_eq!(
            canonical_rep(&gamma).unwrap(),
            g(n, Generator::p(1)).scale(&ratio(3, 2))
        );
        // non-closed input rejected
        let open = g(n, Generator::dp(1));
        assert!(matches!(
            canonical_rep(&open),
            Err(OperatorError::NotClosed { .. })
        ));
    }

    #[test]
    fn hbar_levels_trim_and_compare() {
        let n = 1;
        let z = HbarForm::new(n, vec![SuperForm::one(n), SuperForm::zero(n)]);
        assert_eq!(z.len(), 1);
        assert_eq!(z, HbarForm::from_form(SuperForm::one(n)));
        let w = HbarForm::shifted(2, g(n, Generator::x(1)));
        assert_eq!(w.len(), 3);
        assert_eq!(w.level(2), g(n, Generator::x(1)));
        assert!(w.level(0).is_zero());
    }

    #[test]
    fn hbar_d_certifies_the_basic_cocycle() {
        let n = 1;
        // z = p1*dx1 - h
        let z0 = term(n, int(1), &[Generator::p(1), Generator::dx(1)]);
        let z = HbarForm::new(n, vec![z0, SuperForm::scalar(n, int(-1))]);
        assert!(hbar_d(&z).is_zero());
        // hbar_d on a bare function shows each level
        let f = HbarForm::from_form(g(n, Generator::x(1)));
        let out = hbar_d(&f);
        assert_eq!(out.level(0), omega_wedge(&g(n, Generator::x(1))));
        assert_eq!(out.level(1), de_rham(&g(n, Generator::x(1))));
    }

    #[test]
    fn hbar_d_squares_to_zero() {
        let n = 2;
        for m in crate::cohomology::all_monomials(n, 3) {
            let z = HbarForm::from_form(SuperForm::from_monomial(m, int(1)));
            assert!(hbar_d(&hbar_d(&z)).is_zero());
        }
    }
}
