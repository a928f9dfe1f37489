//! Substitution of generator images: the pullback of a form along a
//! polynomial map of the coordinates.
//!
//! A substitution sends each `x_i` and `p_i` to a function-degree form; the
//! images of `dx_i` and `dp_i` are the differentials of those, so the chain
//! rule is built in. A canonical monomial is expanded factor by factor in
//! canonical order, which is well defined because images are required to
//! have the parity of the generator they replace.

use crate::form::SuperForm;
use crate::monomial::{GenKind, Generator};
use crate::operators::de_rham;

#[derive(Clone, Debug)]
pub struct Substitution {
    n: u32,
    x_images: Vec<SuperForm>,
    p_images: Vec<SuperForm>,
    dx_images: Vec<SuperForm>,
    dp_images: Vec<SuperForm>,
}

impl Substitution {
    /// Builds a substitution from the coordinate images. Panics on arity or
    /// context mismatch; parity is the caller's contract (the coordinate
    /// change type validates it).
    pub fn new(n: u32, x_images: Vec<SuperForm>, p_images: Vec<SuperForm>) -> Self {
        assert_eq!(x_images.len(), n as usize, "need one image per x generator");
        assert_eq!(p_images.len(), n as usize, "need one image per p generator");
        for f in x_images.iter().chain(&p_images) {
            assert_eq!(f.n(), n, "context mismatch");
            assert!(f.is_function_degree(), "coordinate images must be function-degree");
        }
        let dx_images = x_images.iter().map(de_rham).collect();
        let dp_images = p_images.iter().map(de_rham).collect();
        Substitution { n, x_images, p_images, dx_images, dp_images }
    }

    pub fn identity(n: u32) -> Self {
        let x = (1..=n).map(|i| SuperForm::generator(n, Generator::x(i))).collect();
        let p = (1..=n).map(|i| SuperForm::generator(n, Generator::p(i))).collect();
        Substitution::new(n, x, p)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn image(&self, g: Generator) -> &SuperForm {
        let i = (g.index - 1) as usize;
        match g.kind {
            GenKind::X => &self.x_images[i],
            GenKind::P => &self.p_images[i],
            GenKind::Dx => &self.dx_images[i],
            GenKind::Dp => &self.dp_images[i],
        }
    }

    pub fn x_images(&self) -> &[SuperForm] {
        &self.x_images
    }

    pub fn p_images(&self) -> &[SuperForm] {
        &self.p_images
    }

    /// Applies the substitution to every monomial of `f`.
    pub fn apply(&self, f: &SuperForm) -> SuperForm {
        assert_eq!(f.n(), self.n, "context mismatch");
        let mut out = SuperForm::zero(self.n);
        for (m, c) in f.terms() {
            let mut acc = SuperForm::scalar(self.n, c.clone());
            for (g, exp) in m.factors() {
                for _ in 0..exp {
                    acc = &acc * self.image(g);
                }
            }
            out = &out + &acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::term;
    use crate::operators::omega;
    use crate::scalar::int;

    #[test]
    fn identity_fixes_forms() {
        let n = 2;
        let s = Substitution::identity(n);
        let f = &term(n, int(3), &[Generator::x(1), Generator::p(2), Generator::dx(1)])
            + &omega(n);
        assert_eq!(s.apply(&f), f);
    }

    #[test]
    fn chain_rule_on_a_point_map() {
        // x'2 = x2 + x1^2 sends dx'2 to dx2 + 2*x1*dx1.
        let n = 2;
        let x1 = SuperForm::generator(n, Generator::x(1));
        let x2 = SuperForm::generator(n, Generator::x(2));
        let s = Substitution::new(
            n,
            vec![x1.clone(), &x2 + &x1.pow(2)],
            vec![
                SuperForm::generator(n, Generator::p(1)),
                SuperForm::generator(n, Generator::p(2)),
            ],
        );
        let got = s.apply(&SuperForm::generator(n, Generator::dx(2)));
        let expect = &SuperForm::generator(n, Generator::dx(2))
            + &term(n, int(2), &[Generator::x(1), Generator::dx(1)]);
        assert_eq!(got, expect);
    }

    #[test]
    fn distributes_over_products() {
        let n = 2;
        let x1 = SuperForm::generator(n, Generator::x(1));
        let x2 = SuperForm::generator(n, Generator::x(2));
        let s = Substitution::new(
            n,
            vec![x1.clone(), &x2 + &x1.pow(2)],
            vec![
                SuperForm::generator(n, Generator::p(1)),
                SuperForm::generator(n, Generator::p(2)),
            ],
        );
        let mut gens = Vec::new();
        for i in 1..=n {
            gens.push(SuperForm::generator(n, Generator::x(i)));
            gens.push(SuperForm::generator(n, Generator::p(i)));
            gens.push(SuperForm::generator(n, Generator::dx(i)));
            gens.push(SuperForm::generator(n, Generator::dp(i)));
        }
        for a in &gens {
            for b in &gens {
                let prod = a * b;
                assert_eq!(s.apply(&prod), &s.apply(a) * &s.apply(b));
            }
        }
    }

    #[test]
    fn commutes_with_the_differential() {
        let n = 2;
        let x1 = SuperForm::generator(n, Generator::x(1));
        let x2 = SuperForm::generator(n, Generator::x(2));
        let p1 = SuperForm::generator(n, Generator::p(1));
        let p2 = SuperForm::generator(n, Generator::p(2));
        // Cotangent-style map: x'2 = x2 + x1^2, p'1 = p1 - 2*x1*p2.
        let s = Substitution::new(
            n,
            vec![x1.clone(), &x2 + &x1.pow(2)],
            vec![&p1 - &term(n, int(2), &[Generator::x(1), Generator::p(2)]), p2],
        );
        for m in crate::cohomology::all_monomials(n, 3) {
            let f = SuperForm::from_monomial(m, int(1));
            assert_eq!(s.apply(&de_rham(&f)), de_rham(&s.apply(&f)));
        }
    }
}
