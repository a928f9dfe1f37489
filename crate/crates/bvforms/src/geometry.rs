//! Darboux coordinate changes and what they do to semidensities.
//!
//! A `CoordinateChange` sends the generators to polynomial images of the
//! right parity; the induced pullback is a superalgebra map commuting with
//! the exterior differential. On top of that sit the super-Jacobian, its
//! Berezinian through the Schur-complement formula, and the two payoff
//! checks: the transported top form `dx'_1⋯dx'_n` reduces to a function `r`
//! with `r² = Ber(J)`, and transport commutes with the second-order
//! operator `bv_delta` on canonical representatives.
//!
//! All generated test families keep the Jacobian data polynomially
//! invertible: numeric symplectic blocks, unipotent triangular point maps,
//! and shifts generated by an odd polynomial in the `p`'s alone, so every
//! inverse in sight is an adjugate times a finite geometric series.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cohomology::function_monomials;
use crate::form::SuperForm;
use crate::monomial::{Context, Generator, Monomial};
use crate::operators::{bv_delta, canonical_rep, omega, OperatorError};
use crate::printer::display_form;
use crate::scalar::{int, Scalar};
use crate::subst::Substitution;

#[derive(Error, Debug)]
pub enum GeometryError {
    #[error("coordinate image {coordinate} = {image} has the wrong parity")]
    ParityViolation { coordinate: String, image: String },
    #[error("map data rejected: {reason}")]
    BadMap { reason: String },
    #[error("D block is not invertible: {reason}")]
    NonInvertibleD { reason: String },
    #[error("not a symplectomorphism; residual {residual}")]
    NotSymplectic { residual: SuperForm },
    #[error("transformation law fails for {input}: got {got}, want {want}")]
    LawMismatch { input: String, got: String, want: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Parse(#[from] crate::parser::ParseError),
}

fn has_pure_parity(f: &SuperForm, parity: u32) -> bool {
    f.terms().all(|(m, _)| m.parity() == parity)
}

/// A polynomial change of Darboux coordinates: even images for the `x`'s,
/// odd images for the `p`'s, differentials induced by the chain rule.
#[derive(Clone, Debug)]
pub struct CoordinateChange {
    n: u32,
    subst: Substitution,
}

impl CoordinateChange {
    pub fn new(
        n: u32,
        x_images: Vec<SuperForm>,
        p_images: Vec<SuperForm>,
    ) -> Result<Self, GeometryError> {
        if x_images.len() != n as usize || p_images.len() != n as usize {
            return Err(GeometryError::BadMap {
                reason: format!(
                    "need {n} x-images and {n} p-images, got {} and {}",
                    x_images.len(),
                    p_images.len()
                ),
            });
        }
        for (i, f) in x_images.iter().enumerate() {
            if f.n() != n {
                return Err(GeometryError::BadMap {
                    reason: format!("x'{} lives in a context of {} pairs, not {n}", i + 1, f.n()),
                });
            }
            if !f.is_function_degree() {
                return Err(GeometryError::BadMap {
                    reason: format!("x'{} is not function-degree", i + 1),
                });
            }
            if !has_pure_parity(f, 0) {
                return Err(GeometryError::ParityViolation {
                    coordinate: format!("x'{}", i + 1),
                    image: display_form(f),
                });
            }
        }
        for (i, f) in p_images.iter().enumerate() {
            if f.n() != n {
                return Err(GeometryError::BadMap {
                    reason: format!("p'{} lives in a context of {} pairs, not {n}", i + 1, f.n()),
                });
            }
            if !f.is_function_degree() {
                return Err(GeometryError::BadMap {
                    reason: format!("p'{} is not function-degree", i + 1),
                });
            }
            if !has_pure_parity(f, 1) {
                return Err(GeometryError::ParityViolation {
                    coordinate: format!("p'{}", i + 1),
                    image: display_form(f),
                });
            }
        }
        Ok(CoordinateChange { n, subst: Substitution::new(n, x_images, p_images) })
    }

    pub fn identity(n: u32) -> Self {
        let x = (1..=n).map(|i| SuperForm::generator(n, Generator::x(i))).collect();
        let p = (1..=n).map(|i| SuperForm::generator(n, Generator::p(i))).collect();
        CoordinateChange::new(n, x, p).unwrap()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn x_images(&self) -> &[SuperForm] {
        self.subst.x_images()
    }

    pub fn p_images(&self) -> &[SuperForm] {
        self.subst.p_images()
    }

    /// Rewrites a form in primed letters as a form in unprimed letters.
    pub fn pullback(&self, f: &SuperForm) -> SuperForm {
        self.subst.apply(f)
    }

    /// `self` after `inner`: primed letters of `self` are rewritten through
    /// `inner`, so the pullback factors as `inner.pullback ∘ self.pullback`.
    pub fn compose_after(&self, inner: &CoordinateChange) -> Result<CoordinateChange, GeometryError> {
        let x = self.x_images().iter().map(|f| inner.pullback(f)).collect();
        let p = self.p_images().iter().map(|f| inner.pullback(f)).collect();
        CoordinateChange::new(self.n, x, p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "xprime": self.x_images().iter().map(display_form).collect::<Vec<_>>(),
            "pprime": self.p_images().iter().map(display_form).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, GeometryError> {
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| GeometryError::BadMap { reason: "missing numeric field n".into() })?;
        if n == 0 || n > 64 {
            return Err(GeometryError::BadMap { reason: format!("unsupported dimension n = {n}") });
        }
        let n = n as u32;
        let read = |key: &str| -> Result<Vec<SuperForm>, GeometryError> {
            let arr = v
                .get(key)
                .and_then(|x| x.as_array())
                .ok_or_else(|| GeometryError::BadMap { reason: format!("missing array {key}") })?;
            arr.iter()
                .map(|e| {
                    let s = e.as_str().ok_or_else(|| GeometryError::BadMap {
                        reason: format!("non-string entry in {key}"),
                    })?;
                    Ok(crate::parser::parse_form(s, n)?)
                })
                .collect()
        };
        CoordinateChange::new(n, read("xprime")?, read("pprime")?)
    }
}

/// `substitute(ω') = ω`, with the residual on failure.
pub fn is_symplectomorphism(c: &CoordinateChange) -> (bool, SuperForm) {
    let residual = &c.pullback(&omega(c.n)) - &omega(c.n);
    (residual.is_zero(), residual)
}

/// Jacobian blocks in the left-derivative convention.
#[derive(Clone, Debug)]
pub struct SuperMatrix {
    pub n: u32,
    /// ∂x'/∂x, even entries.
    pub a: Vec<Vec<SuperForm>>,
    /// ∂x'/∂p, odd entries.
    pub b: Vec<Vec<SuperForm>>,
    /// ∂p'/∂x, odd entries.
    pub c: Vec<Vec<SuperForm>>,
    /// ∂p'/∂p, even entries.
    pub d: Vec<Vec<SuperForm>>,
}

impl SuperMatrix {
    pub fn new(
        n: u32,
        a: Vec<Vec<SuperForm>>,
        b: Vec<Vec<SuperForm>>,
        c: Vec<Vec<SuperForm>>,
        d: Vec<Vec<SuperForm>>,
    ) -> Result<Self, GeometryError> {
        let check = |name: &str, block: &[Vec<SuperForm>], parity: u32| {
            for row in block {
                for entry in row {
                    if !entry.is_function_degree() || !has_pure_parity(entry, parity) {
                        return Err(GeometryError::BadMap {
                            reason: format!("block {name} entry {entry} breaks the parity layout"),
                        });
                    }
                }
            }
            Ok(())
        };
        check("A", &a, 0)?;
        check("B", &b, 1)?;
        check("C", &c, 1)?;
        check("D", &d, 0)?;
        Ok(SuperMatrix { n, a, b, c, d })
    }
}

pub fn jacobian(c: &CoordinateChange) -> SuperMatrix {
    let n = c.n;
    let block = |images: &[SuperForm], gen: fn(u32) -> Generator| -> Vec<Vec<SuperForm>> {
        images
            .iter()
            .map(|f| (1..=n).map(|j| f.partial_left(gen(j))).collect())
            .collect()
    };
    SuperMatrix::new(
        n,
        block(c.x_images(), Generator::x),
        block(c.x_images(), Generator::p),
        block(c.p_images(), Generator::x),
        block(c.p_images(), Generator::p),
    )
    .expect("coordinate change parities induce the block layout")
}

type Mat = Vec<Vec<SuperForm>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let rows = a.len();
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = SuperForm::zero(a[i][0].n());
                    for (k, b_row) in b.iter().enumerate().take(inner) {
                        acc = &acc + &(&a[i][k] * &b_row[j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

fn minor(m: &Mat, drop_row: usize, drop_col: usize) -> Mat {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != drop_row)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != drop_col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// Determinant by Laplace expansion; valid because entries are even.
fn poly_det(m: &Mat, n_ctx: u32) -> SuperForm {
    let k = m.len();
    if k == 0 {
        return SuperForm::one(n_ctx);
    }
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = SuperForm::zero(n_ctx);
    for j in 0..k {
        let cof = &m[0][j] * &poly_det(&minor(m, 0, j), n_ctx);
        acc = if j % 2 == 0 { &acc + &cof } else { &acc - &cof };
    }
    acc
}

fn adjugate(m: &Mat, n_ctx: u32) -> Mat {
    let k = m.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let cof = poly_det(&minor(m, j, i), n_ctx);
                    if (i + j) % 2 == 0 { cof } else { -&cof }
                })
                .collect()
        })
        .collect()
}

/// Inverse of an even scalar of the shape `c·(1 + ν)` with `c` a nonzero
/// rational and every monomial of `ν` containing an odd generator, via the
/// finite geometric series.
fn invert_unit(det: &SuperForm) -> Result<SuperForm, GeometryError> {
    let n = det.n();
    let c = det.coeff(&Monomial::one(n));
    if num::Zero::is_zero(&c) {
        return Err(GeometryError::NonInvertibleD {
            reason: format!("determinant {det} has no constant term"),
        });
    }
    let unit = det.scale(&(int(1) / c.clone()));
    let nu = &unit - &SuperForm::one(n);
    if !nu.terms().all(|(m, _)| m.degrees().p_deg >= 1) {
        return Err(GeometryError::NonInvertibleD {
            reason: format!("determinant {det} is not constant plus nilpotent"),
        });
    }
    let mut series = SuperForm::one(n);
    let mut power = SuperForm::one(n);
    let mut k = 0u32;
    while !power.is_zero() && k <= n {
        power = -&(&power * &nu);
        series = &series + &power;
        k += 1;
    }
    assert!(power.is_zero(), "nilpotent part failed to vanish");
    Ok(series.scale(&(int(1) / c)))
}

fn invert_even_matrix(m: &Mat, n_ctx: u32) -> Result<Mat, GeometryError> {
    let det_inv = invert_unit(&poly_det(m, n_ctx))?;
    let adj = adjugate(m, n_ctx);
    Ok(adj
        .iter()
        .map(|row| row.iter().map(|e| e * &det_inv).collect())
        .collect())
}

/// `Ber = det(A − B·D⁻¹·C) · det(D)⁻¹`.
pub fn berezinian(m: &SuperMatrix) -> Result<SuperForm, GeometryError> {
    let d_inv = invert_even_matrix(&m.d, m.n)?;
    let schur = mat_sub(&m.a, &mat_mul(&m.b, &mat_mul(&d_inv, &m.c)));
    let det_d_inv = invert_unit(&poly_det(&m.d, m.n))?;
    Ok(&poly_det(&schur, m.n) * &det_d_inv)
}

/// The function `r` with `substitute(dx'_1⋯dx'_n) = r·dx_1⋯dx_n` modulo
/// wedge-exact terms. Squaring it gives the Berezinian of the Jacobian.
pub fn semidensity_factor(c: &CoordinateChange) -> Result<SuperForm, GeometryError> {
    let (ok, residual) = is_symplectomorphism(c);
    if !ok {
        return Err(GeometryError::NotSymplectic { residual });
    }
    Ok(canonical_rep(&c.pullback(&SuperForm::dx_top(c.n)))?)
}

/// Checks `r² = Ber(J)` for one change; returns both sides.
pub fn verify_factor_squares(
    label: &str,
    c: &CoordinateChange,
) -> Result<(SuperForm, SuperForm), GeometryError> {
    let r = semidensity_factor(c)?;
    let ber = berezinian(&jacobian(c))?;
    let r2 = &r * &r;
    if r2 != ber {
        return Err(GeometryError::LawMismatch {
            input: label.to_string(),
            got: display_form(&r2),
            want: display_form(&ber),
        });
    }
    Ok((r, ber))
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub n: u32,
    pub cases: usize,
}

/// Transport of the canonical representative: `f'·dx'_top` pulled back and
/// reduced to a function again.
pub fn transport(c: &CoordinateChange, f: &SuperForm) -> Result<SuperForm, GeometryError> {
    let top = f * &SuperForm::dx_top(c.n);
    Ok(canonical_rep(&c.pullback(&top))?)
}

/// `bv_delta ∘ transport = transport ∘ bv_delta` on every enumerated
/// function monomial: the operator does not see the coordinate choice.
pub fn verify_delta_invariance(
    label: &str,
    c: &CoordinateChange,
    ctx: &Context,
) -> Result<InvarianceReport, GeometryError> {
    let (ok, residual) = is_symplectomorphism(c);
    if !ok {
        return Err(GeometryError::NotSymplectic { residual });
    }
    let cap = ctx.max_x_deg + c.n.min(ctx.max_p_deg);
    let mut cases = 0usize;
    for m in function_monomials(c.n, cap) {
        let d = m.degrees();
        if d.x_deg > ctx.max_x_deg || d.p_deg > ctx.max_p_deg {
            continue;
        }
        let f = SuperForm::from_monomial(m, int(1));
        let lhs = bv_delta(&transport(c, &f)?)?;
        let rhs = transport(c, &bv_delta(&f)?)?;
        if lhs != rhs {
            return Err(GeometryError::LawMismatch {
                input: format!("{label}: {f}"),
                got: display_form(&lhs),
                want: display_form(&rhs),
            });
        }
        cases += 1;
    }
    Ok(InvarianceReport { n: c.n, cases })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum FamilyTag {
    LinearSymplectic,
    PointTransformation,
    OddShift,
    Composite,
}

pub struct FamilyInstance {
    pub tag: FamilyTag,
    pub label: String,
    pub change: CoordinateChange,
}

fn x_form(n: u32, i: u32) -> SuperForm {
    SuperForm::generator(n, Generator::x(i))
}

fn p_form(n: u32, i: u32) -> SuperForm {
    SuperForm::generator(n, Generator::p(i))
}

fn linear_from_matrix(n: u32, m: &[Vec<Scalar>]) -> Result<CoordinateChange, GeometryError> {
    let mat: Mat = m
        .iter()
        .map(|row| row.iter().map(|c| SuperForm::scalar(n, c.clone())).collect())
        .collect();
    let inv = invert_even_matrix(&mat, n)?;
    let x = (0..n as usize)
        .map(|i| {
            let mut acc = SuperForm::zero(n);
            for (j, e) in m[i].iter().enumerate() {
                acc = &acc + &x_form(n, j as u32 + 1).scale(e);
            }
            acc
        })
        .collect();
    // p' = M^{-T} p keeps Σ dx_i·dp_i on the nose.
    let p = (0..n as usize)
        .map(|i| {
            let mut acc = SuperForm::zero(n);
            for (j, row) in inv.iter().enumerate() {
                acc = &acc + &(&row[i] * &p_form(n, j as u32 + 1));
            }
            acc
        })
        .collect();
    CoordinateChange::new(n, x, p)
}

/// Unipotent triangular point map `x'_i = x_i + g_i(x_1..x_{i-1}) + c_i`
/// with the cotangent momenta `p' = (Dg)^{-T} p`.
fn point_from_polys(n: u32, shifts: Vec<SuperForm>) -> Result<CoordinateChange, GeometryError> {
    assert_eq!(shifts.len(), n as usize);
    let x: Vec<SuperForm> = (0..n as usize)
        .map(|i| &x_form(n, i as u32 + 1) + &shifts[i])
        .collect();
    let dg: Mat = x
        .iter()
        .map(|g| (1..=n).map(|j| g.partial_left(Generator::x(j))).collect())
        .collect();
    let dg_inv = invert_even_matrix(&dg, n)?;
    let p = (0..n as usize)
        .map(|i| {
            let mut acc = SuperForm::zero(n);
            for (j, row) in dg_inv.iter().enumerate() {
                acc = &acc + &(&row[i] * &p_form(n, j as u32 + 1));
            }
            acc
        })
        .collect();
    CoordinateChange::new(n, x, p)
}

/// Shift generated by an odd polynomial in the `p`'s: `x'_i = x_i + ∂H/∂p_i`,
/// `p'_i = p_i`. The correction to ω pairs the symmetric `dp_j·dp_i` against
/// the antisymmetric second derivatives of `H`, so it cancels identically.
fn shift_from_hamiltonian(n: u32, h: &SuperForm) -> Result<CoordinateChange, GeometryError> {
    let x = (1..=n)
        .map(|i| &x_form(n, i) + &h.partial_left(Generator::p(i)))
        .collect();
    let p = (1..=n).map(|i| p_form(n, i)).collect();
    CoordinateChange::new(n, x, p)
}

fn small(rng: &mut ChaCha8Rng) -> Scalar {
    int(rng.gen_range(-2..=2))
}

fn small_nonzero(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let c = rng.gen_range(-2..=2);
        if c != 0 {
            return int(c);
        }
    }
}

fn random_linear(n: u32, rng: &mut ChaCha8Rng) -> Result<CoordinateChange, GeometryError> {
    // L·U with unit lower and invertible upper triangle: determinant is the
    // product of the chosen diagonal, never zero.
    let k = n as usize;
    let mut l = vec![vec![int(0); k]; k];
    let mut u = vec![vec![int(0); k]; k];
    for i in 0..k {
        l[i][i] = int(1);
        u[i][i] = small_nonzero(rng);
        for e in l[i].iter_mut().take(i) {
            *e = small(rng);
        }
        for e in u[i].iter_mut().skip(i + 1) {
            *e = small(rng);
        }
    }
    let m: Vec<Vec<Scalar>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut acc = int(0);
                    for (c, u_row) in l[i].iter().zip(&u) {
                        acc += c.clone() * u_row[j].clone();
                    }
                    acc
                })
                .collect()
        })
        .collect();
    linear_from_matrix(n, &m)
}

fn random_point(n: u32, rng: &mut ChaCha8Rng) -> Result<CoordinateChange, GeometryError> {
    let mut shifts = Vec::new();
    for i in 0..n as usize {
        let mut s = SuperForm::scalar(n, small(rng));
        // Quadratic terms in strictly earlier coordinates keep Dg unipotent.
        for j in 1..=i {
            for l in j..=i {
                let c = small(rng);
                let quad = &x_form(n, j as u32) * &x_form(n, l as u32);
                s = &s + &quad.scale(&c);
            }
        }
        shifts.push(s);
    }
    point_from_polys(n, shifts)
}

fn random_odd_shift(n: u32, rng: &mut ChaCha8Rng) -> Result<CoordinateChange, GeometryError> {
    let mut h = SuperForm::zero(n);
    for i in 1..=n {
        h = &h + &p_form(n, i).scale(&small(rng));
    }
    if n >= 3 {
        let cubic = &(&p_form(n, 1) * &p_form(n, 2)) * &p_form(n, 3);
        h = &h + &cubic.scale(&small(rng));
    }
    shift_from_hamiltonian(n, &h)
}

/// Deterministic members of the three families plus their pairwise
/// composites in both orders. Every instance is checked symplectic here.
pub fn family_instances(n: u32, seed: u64) -> Result<Vec<FamilyInstance>, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<FamilyInstance> = Vec::new();
    for k in 0..2 {
        out.push(FamilyInstance {
            tag: FamilyTag::LinearSymplectic,
            label: format!("linear[{k}]"),
            change: random_linear(n, &mut rng)?,
        });
    }
    // A fixed representative with determinant away from 1, so the factor
    // and the Berezinian are both nontrivial.
    let mut scaled = vec![vec![int(0); n as usize]; n as usize];
    for (i, row) in scaled.iter_mut().enumerate() {
        row[i] = if i == 0 { int(2) } else { int(1) };
    }
    out.push(FamilyInstance {
        tag: FamilyTag::LinearSymplectic,
        label: "linear[scale2]".to_string(),
        change: linear_from_matrix(n, &scaled)?,
    });
    for k in 0..2 {
        out.push(FamilyInstance {
            tag: FamilyTag::PointTransformation,
            label: format!("point[{k}]"),
            change: random_point(n, &mut rng)?,
        });
    }
    for k in 0..2 {
        out.push(FamilyInstance {
            tag: FamilyTag::OddShift,
            label: format!("shift[{k}]"),
            change: random_odd_shift(n, &mut rng)?,
        });
    }
    let base: Vec<(String, CoordinateChange)> = vec![
        ("linear[0]".to_string(), out[0].change.clone()),
        ("point[0]".to_string(), out[3].change.clone()),
        ("shift[0]".to_string(), out[5].change.clone()),
    ];
    for (i, (outer_label, outer)) in base.iter().enumerate() {
        for (j, (inner_label, inner)) in base.iter().enumerate() {
            if i == j {
                continue;
            }
            out.push(FamilyInstance {
                tag: FamilyTag::Composite,
                label: format!("{outer_label} after {inner_label}"),
                change: outer.compose_after(inner)?,
            });
        }
    }
    for inst in &out {
        let (ok, residual) = is_symplectomorphism(&inst.change);
        if !ok {
            return Err(GeometryError::NotSymplectic { residual });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorEntry {
    pub label: String,
    pub r: String,
    pub ber: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemidensityReport {
    pub n: u32,
    pub seed: u64,
    pub entries: Vec<FactorEntry>,
    pub composition_checks: usize,
}

/// `r² = Ber` on every family instance, plus multiplicativity of the factor
/// across the generated composites.
pub fn verify_semidensity_law(n: u32, seed: u64) -> Result<SemidensityReport, GeometryError> {
    let instances = family_instances(n, seed)?;
    let mut entries = Vec::new();
    for inst in &instances {
        let (r, ber) = verify_factor_squares(&inst.label, &inst.change)?;
        entries.push(FactorEntry {
            label: inst.label.clone(),
            r: display_form(&r),
            ber: display_form(&ber),
        });
    }
    let base: Vec<&FamilyInstance> = instances
        .iter()
        .filter(|i| i.tag != FamilyTag::Composite)
        .collect();
    let mut composition_checks = 0usize;
    for outer in base.iter().take(3) {
        for inner in base.iter().take(3) {
            let total = outer.change.compose_after(&inner.change)?;
            let lhs = semidensity_factor(&total)?;
            let rhs = &inner.change.pullback(&semidensity_factor(&outer.change)?)
                * &semidensity_factor(&inner.change)?;
            if lhs != rhs {
                return Err(GeometryError::LawMismatch {
                    input: format!("{} after {}", outer.label, inner.label),
                    got: display_form(&lhs),
                    want: display_form(&rhs),
                });
            }
            composition_checks += 1;
        }
    }
    Ok(SemidensityReport { n, seed, entries, composition_checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceSweep {
    pub n: u32,
    pub seed: u64,
    pub instances: usize,
    pub cases: usize,
}

/// Δ-invariance across every generated family instance.
pub fn verify_delta_invariance_families(
    ctx: &Context,
    seed: u64,
) -> Result<InvarianceSweep, GeometryError> {
    let instances = family_instances(ctx.n, seed)?;
    let mut cases = 0usize;
    let count = instances.len();
    for inst in &instances {
        cases += verify_delta_invariance(&inst.label, &inst.change, ctx)?.cases;
    }
    Ok(InvarianceSweep { n: ctx.n, seed, instances: count, cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::term;
    use crate::scalar::ratio;

    #[test]
    fn identity_change() {
        let c = CoordinateChange::identity(2);
        let (ok, _) = is_symplectomorphism(&c);
        assert!(ok);
        let j = jacobian(&c);
        assert!(j.a[0][0].is_one() && j.a[1][1].is_one());
        assert!(j.b[0][0].is_zero() && j.c[1][0].is_zero());
        assert!(berezinian(&j).unwrap().is_one());
        assert!(semidensity_factor(&c).unwrap().is_one());
    }

    #[test]
    fn parity_is_enforced() {
        // x' picking up an odd term is rejected.
        let bad = &x_form(2, 1) + &p_form(2, 2);
        let err = CoordinateChange::new(
            2,
            vec![bad, x_form(2, 2)],
            vec![p_form(2, 1), p_form(2, 2)],
        );
        assert!(matches!(err, Err(GeometryError::ParityViolation { .. })));
    }

    #[test]
    fn jacobian_entries() {
        // x'2 = x2 + x1^2 with cotangent momenta: A[1][0] = 2*x1.
        let shifts = vec![SuperForm::zero(2), &x_form(2, 1) * &x_form(2, 1)];
        let c = point_from_polys(2, shifts).unwrap();
        let j = jacobian(&c);
        assert_eq!(j.a[1][0], term(2, int(2), &[Generator::x(1)]));
        // p'1 = p1 - 2*x1*p2 balances it.
        assert_eq!(
            c.p_images()[0],
            &p_form(2, 1) - &term(2, int(2), &[Generator::x(1), Generator::p(2)])
        );
        assert!(is_symplectomorphism(&c).0);
    }

    #[test]
    fn berezinian_of_numeric_blocks() {
        // Block-diagonal numeric case reduces to det(A)/det(D).
        let m = SuperMatrix::new(
            1,
            vec![vec![SuperForm::scalar(1, int(2))]],
            vec![vec![SuperForm::zero(1)]],
            vec![vec![SuperForm::zero(1)]],
            vec![vec![SuperForm::scalar(1, int(3))]],
        )
        .unwrap();
        assert_eq!(berezinian(&m).unwrap(), SuperForm::scalar(1, ratio(2, 3)));
    }

    #[test]
    fn geometric_series_inverse() {
        let nu = term(2, int(1), &[Generator::p(1), Generator::p(2)]);
        let det = &SuperForm::one(2) + &nu;
        let inv = invert_unit(&det).unwrap();
        assert!((&inv * &det).is_one());

        let err = invert_unit(&x_form(1, 1));
        assert!(matches!(err, Err(GeometryError::NonInvertibleD { .. })));
        let err = invert_unit(&(&SuperForm::one(1) + &x_form(1, 1)));
        assert!(matches!(err, Err(GeometryError::NonInvertibleD { .. })));
    }

    #[test]
    fn linear_scaling_factor() {
        // x' = 2x, p' = p/2: r = 2 and Ber = 4.
        let c = linear_from_matrix(1, &[vec![int(2)]]).unwrap();
        assert_eq!(c.p_images()[0], p_form(1, 1).scale(&ratio(1, 2)));
        let (r, ber) = verify_factor_squares("scale", &c).unwrap();
        assert_eq!(r, SuperForm::scalar(1, int(2)));
        assert_eq!(ber, SuperForm::scalar(1, int(4)));
    }

    #[test]
    fn odd_shift_in_three_pairs() {
        // H = p1*p2*p3 mixes the B block but stays unipotent: Ber = 1, r = 1.
        let h = &(&p_form(3, 1) * &p_form(3, 2)) * &p_form(3, 3);
        let c = shift_from_hamiltonian(3, &h).unwrap();
        assert!(is_symplectomorphism(&c).0);
        let j = jacobian(&c);
        assert!(!j.b[0][1].is_zero());
        let (r, ber) = verify_factor_squares("shift", &c).unwrap();
        assert!(r.is_one());
        assert!(ber.is_one());
    }

    #[test]
    fn families_pass_the_squared_law() {
        let report = verify_semidensity_law(2, 7).unwrap();
        assert_eq!(report.entries.len(), 13);
        assert_eq!(report.composition_checks, 9);
        // The fixed representative really has a nontrivial factor.
        let scale = report.entries.iter().find(|e| e.label == "linear[scale2]").unwrap();
        assert_eq!(scale.r, "2");
        assert_eq!(scale.ber, "4");
    }

    #[test]
    fn delta_invariance_on_a_point_map() {
        let shifts = vec![SuperForm::zero(2), &x_form(2, 1) * &x_form(2, 1)];
        let c = point_from_polys(2, shifts).unwrap();
        let report = verify_delta_invariance("point", &c, &Context::new(2, 2, 2)).unwrap();
        assert!(report.cases > 10);
    }

    #[test]
    fn delta_invariance_across_families() {
        let sweep = verify_delta_invariance_families(&Context::new(2, 2, 2), 11).unwrap();
        assert_eq!(sweep.instances, 13);
        assert!(sweep.cases > 100);
    }

    #[test]
    fn map_json_round_trip() {
        let c = random_point(2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let v = c.to_json();
        let back = CoordinateChange::from_json(&v).unwrap();
        assert_eq!(back.x_images(), c.x_images());
        assert_eq!(back.p_images(), c.p_images());

        let err = CoordinateChange::from_json(&serde_json::json!({"n": 1, "xprime": ["x1"]}));
        assert!(matches!(err, Err(GeometryError::BadMap { .. })));
        let err = CoordinateChange::from_json(
            &serde_json::json!({"n": 1, "xprime": ["y1"], "pprime": ["p1"]}),
        );
        assert!(matches!(err, Err(GeometryError::Parse(_))));
    }

    #[test]
    fn composition_order() {
        // Scaling after translation: x ↦ 2(x+1); translation after scaling:
        // x ↦ 2x+1.
        let scale = linear_from_matrix(1, &[vec![int(2)]]).unwrap();
        let shift = point_from_polys(1, vec![SuperForm::one(1)]).unwrap();
        let a = scale.compose_after(&shift).unwrap();
        assert_eq!(a.x_images()[0].to_string(), "2 + 2*x1");
        let b = shift.compose_after(&scale).unwrap();
        assert_eq!(b.x_images()[0].to_string(), "1 + 2*x1");
    }
}
