//! Slice-by-slice cohomology of the wedge operator.
//!
//! Wedging with ω preserves x-degree, p-degree and auxiliary degree, and
//! raises the dp-count by one. Fixing (x_deg, p_deg, auxdeg) therefore cuts
//! out a finite chain of monomial bases graded by dp-count m,
//!
//! ```text
//!   m = max(0, -auxdeg), ..., n - auxdeg
//! ```
//!
//! and the whole question of the wedge cohomology reduces to exact ranks of
//! the matrices of ω∧ between adjacent levels. The expected answer: nothing
//! survives except at auxdeg = n, where the classes are exactly the
//! function multiples of dx_1∧…∧dx_n.

use serde::Serialize;
use thiserror::Error;

use crate::form::SuperForm;
use crate::matrix::SparseMatrix;
use crate::monomial::{Context, Monomial};
use crate::printer::display_monomial;
use crate::scalar::int;

#[derive(Error, Debug)]
pub enum CohomologyError {
    #[error("operator image leaves the codomain slice: term {term} from input {input}")]
    OperatorLeavesSlice { input: String, term: String },
    #[error("slice ({x_deg},{p_deg},{auxdeg}) disagrees with the expected dimension: got {got}, want {want}")]
    DimensionMismatch {
        x_deg: u32,
        p_deg: u32,
        auxdeg: i64,
        got: usize,
        want: usize,
    },
    #[error("witness outside canonical shape in slice ({x_deg},{p_deg},{auxdeg}): {witness}")]
    BadWitnessShape { x_deg: u32, p_deg: u32, auxdeg: i64, witness: String },
    #[error("certificate failed for {input}: {source}")]
    Certificate {
        input: String,
        source: crate::operators::OperatorError,
    },
}

/// All exponent vectors of the given length summing to `total`.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = Vec::with_capacity(parts);
            v.push(first);
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// All bit masks over `n` indices with exactly `k` bits set, ascending.
fn masks_with_popcount(n: u32, k: u32) -> Vec<u64> {
    let mut out = Vec::new();
    for mask in 0..(1u64 << n) {
        if mask.count_ones() == k {
            out.push(mask);
        }
    }
    out
}

/// A fixed-(x_deg, p_deg, auxdeg) subspace.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Slice {
    pub n: u32,
    pub x_deg: u32,
    pub p_deg: u32,
    pub auxdeg: i64,
}

impl Slice {
    /// Inclusive dp-count bounds; empty when the upper bound is negative.
    pub fn dp_bounds(&self) -> (i64, i64) {
        ((-self.auxdeg).max(0), self.n as i64 - self.auxdeg)
    }

    /// Basis monomials at one dp-count level, deterministic order.
    pub fn basis_at(&self, dp_count: i64) -> Vec<Monomial> {
        let (lo, hi) = self.dp_bounds();
        if dp_count < lo || dp_count > hi {
            return Vec::new();
        }
        let dx_count = (self.auxdeg + dp_count) as u32;
        if dx_count > self.n || self.p_deg > self.n {
            return Vec::new();
        }
        let mut out = Vec::new();
        for x_exp in compositions(self.x_deg, self.n as usize) {
            for p_mask in masks_with_popcount(self.n, self.p_deg) {
                for dx_mask in masks_with_popcount(self.n, dx_count) {
                    for dp_exp in compositions(dp_count as u32, self.n as usize) {
                        out.push(Monomial::from_parts(
                            x_exp.clone(),
                            p_mask,
                            dx_mask,
                            dp_exp,
                        ));
                    }
                }
            }
        }
        out
    }

    /// The full slice basis across every dp-count level.
    pub fn basis(&self) -> Vec<Monomial> {
        let (lo, hi) = self.dp_bounds();
        let mut out = Vec::new();
        for m in lo..=hi {
            out.extend(self.basis_at(m));
        }
        out
    }
}

pub fn enumerate_basis(slice: &Slice) -> Vec<Monomial> {
    slice.basis()
}

/// Every monomial of total degree at most `max_total` in a context of `n`
/// pairs. Used by the exhaustive law checks.
pub fn all_monomials(n: u32, max_total: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        for x_deg in 0..=total {
            for p_deg in 0..=(total - x_deg).min(n) {
                for dx_count in 0..=(total - x_deg - p_deg).min(n) {
                    let dp_count = total - x_deg - p_deg - dx_count;
                    let slice = Slice {
                        n,
                        x_deg,
                        p_deg,
                        auxdeg: dx_count as i64 - dp_count as i64,
                    };
                    out.extend(slice.basis_at(dp_count as i64));
                }
            }
        }
    }
    out
}

/// Function-degree monomials (no dx, no dp) of total degree at most `max_total`.
pub fn function_monomials(n: u32, max_total: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        for p_deg in 0..=total.min(n) {
            let x_deg = total - p_deg;
            for x_exp in compositions(x_deg, n as usize) {
                for p_mask in masks_with_popcount(n, p_deg) {
                    out.push(Monomial::from_parts(
                        x_exp.clone(),
                        p_mask,
                        0,
                        vec![0; n as usize],
                    ));
                }
            }
        }
    }
    out
}

/// Matrix of a linear operator between two monomial bases. Every image term
/// must lie in the codomain basis.
pub fn operator_matrix<F>(
    op: F,
    domain: &[Monomial],
    codomain: &[Monomial],
    n: u32,
) -> Result<SparseMatrix, CohomologyError>
where
    F: Fn(&SuperForm) -> SuperForm,
{
    let index: std::collections::BTreeMap<&Monomial, usize> =
        codomain.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = SparseMatrix::new(codomain.len(), domain.len());
    for (j, m) in domain.iter().enumerate() {
        let image = op(&SuperForm::from_monomial(m.clone(), int(1)));
        for (term, coeff) in image.terms() {
            match index.get(term) {
                Some(&i) => mat.set(i, j, coeff.clone()),
                None => {
                    return Err(CohomologyError::OperatorLeavesSlice {
                        input: display_monomial(m),
                        term: display_monomial(term),
                    })
                }
            }
        }
    }
    let _ = n;
    Ok(mat)
}

/// Kernel, image and cohomology dimensions of ω∧ on one slice, with witness
/// representatives for the surviving classes.
#[derive(Clone, Debug, Serialize)]
pub struct SliceHomology {
    pub x_deg: u32,
    pub p_deg: u32,
    pub auxdeg: i64,
    pub dim: usize,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub h_dim: usize,
    #[serde(skip)]
    pub witnesses: Vec<SuperForm>,
}

pub fn slice_homology(slice: &Slice) -> Result<SliceHomology, CohomologyError> {
    let (lo, hi) = slice.dp_bounds();
    let mut dim = 0usize;
    let mut kernel_dim = 0usize;
    let mut image_dim = 0usize;
    let mut witnesses = Vec::new();
    for m in lo..=hi {
        let domain = slice.basis_at(m);
        if domain.is_empty() {
            continue;
        }
        dim += domain.len();
        let codomain = slice.basis_at(m + 1);
        let mat = operator_matrix(
            crate::operators::omega_wedge,
            &domain,
            &codomain,
            slice.n,
        )?;
        let (rank_out, kernel) = mat.rank_kernel();
        kernel_dim += domain.len() - rank_out;
        image_dim += rank_out;

        // Incoming rank decides how much of this kernel is hit from below.
        let below = slice.basis_at(m - 1);
        let rank_in = if below.is_empty() {
            0
        } else {
            operator_matrix(crate::operators::omega_wedge, &below, &domain, slice.n)?
                .rank()
        };
        let h_here = domain.len() - rank_out - rank_in;
        if h_here > 0 {
            // Quotient witnesses: kernel vectors that add rank on top of the
            // image of the level below.
            let below_mat = if below.is_empty() {
                SparseMatrix::new(domain.len(), 0)
            } else {
                operator_matrix(crate::operators::omega_wedge, &below, &domain, slice.n)?
            };
            let mut span: Vec<Vec<crate::scalar::Scalar>> = (0..below_mat.cols())
                .map(|j| (0..domain.len()).map(|i| below_mat.get(i, j)).collect())
                .collect();
            let mut base_rank = rank_in;
            for v in kernel {
                let mut candidate = span.clone();
                candidate.push(v.clone());
                let stacked = SparseMatrix::from_rows(candidate.clone());
                if stacked.rank() > base_rank {
                    base_rank = stacked.rank();
                    span = candidate;
                    let mut w = SuperForm::zero(slice.n);
                    for (i, mono) in domain.iter().enumerate() {
                        w.add_term(mono.clone(), v[i].clone());
                    }
                    witnesses.push(w);
                }
            }
        }
    }
    let h_dim = kernel_dim - image_dim;
    Ok(SliceHomology {
        x_deg: slice.x_deg,
        p_deg: slice.p_deg,
        auxdeg: slice.auxdeg,
        dim,
        kernel_dim,
        image_dim,
        h_dim,
        witnesses,
    })
}

/// One slice entry of a cohomology report, shaped for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct SliceReport {
    pub slice: SliceKey,
    pub dims: DimTriple,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceKey {
    pub xdeg: u32,
    pub pdeg: u32,
    pub auxdeg: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimTriple {
    pub ker: usize,
    pub im: usize,
    #[serde(rename = "H")]
    pub h: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub n: u32,
    pub slices: Vec<SliceReport>,
    pub cases: usize,
}

fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let mut out = 1u64;
    for k in 0..b.min(a - b) {
        out = out * (a - k) / (k + 1);
    }
    out
}

/// Independent count of function monomials with the given exact degrees.
pub fn function_monomial_count(n: u32, x_deg: u32, p_deg: u32) -> usize {
    let x_count = binomial((x_deg + n - 1) as u64, (n - 1) as u64);
    let p_count = binomial(n as u64, p_deg as u64);
    (x_count * p_count) as usize
}

/// Checks that the wedge cohomology of every slice in range is zero away
/// from auxdeg = n and has the function-monomial dimension there, with all
/// witnesses of the canonical `f·dx_top` shape.
pub fn verify_e1(ctx: &Context) -> Result<CohomologyReport, CohomologyError> {
    let n = ctx.n;
    let mut slices = Vec::new();
    let mut cases = 0usize;
    for x_deg in 0..=ctx.max_x_deg {
        for p_deg in 0..=n.min(ctx.max_p_deg) {
            for auxdeg in -(n as i64)..=(n as i64) {
                let slice = Slice { n, x_deg, p_deg, auxdeg };
                let hom = slice_homology(&slice)?;
                let want = if auxdeg == n as i64 {
                    function_monomial_count(n, x_deg, p_deg)
                } else {
                    0
                };
                if hom.h_dim != want {
                    return Err(CohomologyError::DimensionMismatch {
                        x_deg,
                        p_deg,
                        auxdeg,
                        got: hom.h_dim,
                        want,
                    });
                }
                if hom.kernel_dim != hom.image_dim + hom.h_dim {
                    return Err(CohomologyError::DimensionMismatch {
                        x_deg,
                        p_deg,
                        auxdeg,
                        got: hom.kernel_dim,
                        want: hom.image_dim + hom.h_dim,
                    });
                }
                for w in &hom.witnesses {
                    let ok = w.terms().all(|(m, _)| {
                        m.dx_mask() == Monomial::dx_top(n).dx_mask()
                            && m.degrees().dp_count == 0
                    });
                    if !ok {
                        return Err(CohomologyError::BadWitnessShape {
                            x_deg,
                            p_deg,
                            auxdeg,
                            witness: crate::printer::display_form(w),
                        });
                    }
                }
                cases += 1;
                slices.push(SliceReport {
                    slice: SliceKey { xdeg: x_deg, pdeg: p_deg, auxdeg },
                    dims: DimTriple {
                        ker: hom.kernel_dim,
                        im: hom.image_dim,
                        h: hom.h_dim,
                    },
                    witnesses: hom
                        .witnesses
                        .iter()
                        .map(crate::printer::display_form)
                        .collect(),
                });
            }
        }
    }
    Ok(CohomologyReport { n, slices, cases })
}

/// One certificate that `d(f·dx_top)` is killed by passing to wedge classes.
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessCertificate {
    pub f: String,
    pub alpha: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct D1Report {
    pub n: u32,
    pub certificates: Vec<ExactnessCertificate>,
}

/// For every function monomial in range, exhibits α with ω∧α = d(f·dx_top),
/// which is why the induced differential on wedge classes vanishes.
pub fn verify_d1_zero(ctx: &Context) -> Result<D1Report, CohomologyError> {
    let n = ctx.n;
    let cap = ctx.max_x_deg + n.min(ctx.max_p_deg);
    let mut certificates = Vec::new();
    for m in function_monomials(n, cap) {
        let d = m.degrees();
        if d.x_deg > ctx.max_x_deg || d.p_deg > ctx.max_p_deg {
            continue;
        }
        let f = SuperForm::from_monomial(m.clone(), int(1));
        let beta = crate::operators::de_rham(&(&f * &SuperForm::dx_top(n)));
        let alpha = crate::operators::invert_omega(&beta).map_err(|source| {
            CohomologyError::Certificate { input: display_monomial(&m), source }
        })?;
        certificates.push(ExactnessCertificate {
            f: display_monomial(&m),
            alpha: crate::printer::display_form(&alpha),
        });
    }
    Ok(D1Report { n, certificates })
}

/// The constant-coefficient fiber: x-degree and p-degree both zero. The
/// wedge cohomology there is one-dimensional, generated by dx_1∧…∧dx_n at
/// auxdeg n, and zero in every other slice.
pub fn manin_fiber_check(n: u32) -> Result<CohomologyReport, CohomologyError> {
    let mut slices = Vec::new();
    let mut cases = 0usize;
    for auxdeg in -(n as i64)..=(n as i64) {
        let slice = Slice { n, x_deg: 0, p_deg: 0, auxdeg };
        let hom = slice_homology(&slice)?;
        let want = if auxdeg == n as i64 { 1 } else { 0 };
        if hom.h_dim != want {
            return Err(CohomologyError::DimensionMismatch {
                x_deg: 0,
                p_deg: 0,
                auxdeg,
                got: hom.h_dim,
                want,
            });
        }
        if auxdeg == n as i64 {
            let top = SuperForm::dx_top(n);
            if hom.witnesses.len() != 1 || hom.witnesses[0] != top {
                return Err(CohomologyError::BadWitnessShape {
                    x_deg: 0,
                    p_deg: 0,
                    auxdeg,
                    witness: hom
                        .witnesses
                        .first()
                        .map(crate::printer::display_form)
                        .unwrap_or_else(|| "<none>".into()),
                });
            }
        }
        cases += 1;
        slices.push(SliceReport {
            slice: SliceKey { xdeg: 0, pdeg: 0, auxdeg },
            dims: DimTriple { ker: hom.kernel_dim, im: hom.image_dim, h: hom.h_dim },
            witnesses: hom
                .witnesses
                .iter()
                .map(crate::printer::display_form)
                .collect(),
        });
    }
    Ok(CohomologyReport { n, slices, cases })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_basis_example() {
        // n = 1, (0, 0, auxdeg 0): the constants and dx1*dp1.
        let slice = Slice { n: 1, x_deg: 0, p_deg: 0, auxdeg: 0 };
        let basis = slice.basis();
        assert_eq!(basis.len(), 2);
        assert!(basis[0].is_one());
        assert_eq!(basis[1], Monomial::from_parts(vec![0], 0, 0b1, vec![1]));
    }

    #[test]
    fn empty_slice() {
        // auxdeg beyond n holds nothing.
        let slice = Slice { n: 1, x_deg: 0, p_deg: 0, auxdeg: 2 };
        assert!(slice.basis().is_empty());
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(3, 2).len(), 4);
        assert_eq!(compositions(0, 3).len(), 1);
        assert_eq!(masks_with_popcount(3, 2).len(), 3);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(function_monomial_count(2, 3, 1), 8);
    }

    #[test]
    fn wedge_keeps_slices() {
        let slice = Slice { n: 2, x_deg: 1, p_deg: 1, auxdeg: 0 };
        let (lo, hi) = slice.dp_bounds();
        for m in lo..=hi {
            let domain = slice.basis_at(m);
            let codomain = slice.basis_at(m + 1);
            if domain.is_empty() {
                continue;
            }
            // Never errors: ω∧ stays inside the slice, one level up.
            operator_matrix(crate::operators::omega_wedge, &domain, &codomain, 2).unwrap();
        }
    }

    #[test]
    fn operator_matrix_example() {
        let slice = Slice { n: 1, x_deg: 0, p_deg: 0, auxdeg: 0 };
        let basis = slice.basis();
        let mat = operator_matrix(crate::operators::omega_wedge, &basis, &basis, 1).unwrap();
        // 1 goes to dx1*dp1, the other basis vector dies.
        assert_eq!(mat.get(1, 0), int(1));
        assert_eq!(mat.rank(), 1);
    }

    #[test]
    fn operator_leaves_slice_detected() {
        let slice = Slice { n: 1, x_deg: 0, p_deg: 1, auxdeg: 0 };
        let basis = slice.basis();
        let err = operator_matrix(crate::operators::de_rham, &basis, &basis, 1);
        assert!(matches!(err, Err(CohomologyError::OperatorLeavesSlice { .. })));
    }

    #[test]
    fn e1_on_the_smallest_context() {
        let ctx = Context::new(1, 2, 1);
        let report = verify_e1(&ctx).unwrap();
        assert!(report.cases > 0);
        // Survivors only at auxdeg 1 for n = 1.
        for s in &report.slices {
            if s.slice.auxdeg == 1 {
                assert_eq!(s.dims.h, function_monomial_count(1, s.slice.xdeg, s.slice.pdeg));
            } else {
                assert_eq!(s.dims.h, 0);
            }
        }
    }

    #[test]
    fn manin_n2() {
        let report = manin_fiber_check(2).unwrap();
        let top: Vec<_> = report.slices.iter().filter(|s| s.dims.h > 0).collect();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].slice.auxdeg, 2);
        assert_eq!(top[0].witnesses, vec!["dx1*dx2".to_string()]);
    }

    #[test]
    fn d1_certificates_cover_the_range() {
        let ctx = Context::new(1, 2, 1);
        let report = verify_d1_zero(&ctx).unwrap();
        // (x_deg 0..=2) x (p_deg 0..=1) function monomials.
        assert_eq!(report.certificates.len(), 6);
    }
}
