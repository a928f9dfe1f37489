//! The differential induced on wedge classes, and its degeneration.
//!
//! On classes `[f·dx_top]` the composite d∘(ω∧)⁻¹∘d is again of the
//! canonical shape, and `third_differential` computes it. It coincides with
//! the second-order operator `bv_delta`; `verify_d3_equals_delta` checks
//! that on every enumerated monomial.
//!
//! Past that level nothing survives, and the proof is constructive:
//! `extend_cocycle` lifts every `bv_delta`-closed function to a total
//! cocycle of the deformed differential `h·d + ω∧`, one `h`-correction per
//! stage. The only possible obstruction lives at top auxiliary degree, and
//! it is exactly `bv_delta(f)·dx_top`, so inputs not killed by `bv_delta`
//! must fail at the second stage with that residue. `negative_control`
//! asserts the failure.

use serde::Serialize;
use thiserror::Error;

use crate::cohomology::function_monomials;
use crate::form::SuperForm;
use crate::monomial::Context;
use crate::operators::{
    bv_delta, de_rham, hbar_d, invert_omega, omega_wedge, HbarForm, OperatorError,
};
use crate::printer::display_form;
use crate::scalar::int;

#[derive(Error, Debug)]
pub enum SpectralError {
    #[error("input is not killed by the second-order operator; residual {residual}")]
    DeltaNotClosed { residual: SuperForm },
    #[error("extension obstructed at level {level}; residue {residue}")]
    ObstructionFound { level: usize, residue: SuperForm },
    #[error("negative control requires an input the second-order operator does not kill")]
    ControlInputClosed,
    #[error("disagrees with bv_delta at {input}: got {got}, want {want}")]
    MismatchAgainstDelta { input: String, got: String, want: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// `f·dx_top` as a form.
fn times_dx_top(f: &SuperForm) -> SuperForm {
    f * &SuperForm::dx_top(f.n())
}

/// Reads `g` off a pure `g·dx_top` component.
fn strip_top(component: &SuperForm) -> SuperForm {
    let mut out = SuperForm::zero(component.n());
    for (m, c) in component.terms() {
        out.add_term(m.strip_dx_top(), c.clone());
    }
    out
}

/// The composite d∘(ω∧)⁻¹∘d on the canonical representative `f·dx_top`,
/// read back off as a function.
pub fn third_differential(f: &SuperForm) -> Result<SuperForm, SpectralError> {
    if !f.is_function_degree() {
        return Err(OperatorError::NotFunctionDegree { found: f.max_form_degree() }.into());
    }
    let beta = de_rham(&times_dx_top(f));
    let closed_residual = omega_wedge(&beta);
    if !closed_residual.is_zero() {
        return Err(OperatorError::NotClosed { residual: closed_residual }.into());
    }
    let alpha = invert_omega(&beta)?;
    Ok(crate::operators::canonical_rep(&de_rham(&alpha))?)
}

#[derive(Clone, Debug, Serialize)]
pub struct D3Report {
    pub n: u32,
    pub cases: usize,
}

/// Exact agreement of `third_differential` with `bv_delta` on every
/// function monomial within the context caps.
pub fn verify_d3_equals_delta(ctx: &Context) -> Result<D3Report, SpectralError> {
    let n = ctx.n;
    let cap = ctx.max_x_deg + n.min(ctx.max_p_deg);
    let mut cases = 0usize;
    for m in function_monomials(n, cap) {
        let d = m.degrees();
        if d.x_deg > ctx.max_x_deg || d.p_deg > ctx.max_p_deg {
            continue;
        }
        let f = SuperForm::from_monomial(m, int(1));
        let got = third_differential(&f)?;
        let want = bv_delta(&f)?;
        if got != want {
            return Err(SpectralError::MismatchAgainstDelta {
                input: display_form(&f),
                got: display_form(&got),
                want: display_form(&want),
            });
        }
        cases += 1;
    }
    Ok(D3Report { n, cases })
}

/// One correction stage: the produced level and the equation it solves.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionStep {
    pub level: usize,
    pub alpha: String,
    pub rhs: String,
}

/// A total cocycle `z = f·dx_top + h·α₁ + h²·α₂ + …` for `h·d + ω∧`.
#[derive(Clone, Debug)]
pub struct CocycleExtension {
    pub f: SuperForm,
    pub z: HbarForm,
    pub steps: Vec<ExtensionStep>,
}

impl CocycleExtension {
    /// Expression strings plus a replay of the final check, so a report
    /// reader can re-parse `z` and re-run the deformed differential.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "f": display_form(&self.f),
            "z": self.z.to_string(),
            "levels": self.z.levels().iter().map(display_form).collect::<Vec<_>>(),
            "steps": self.steps,
            "replay": {
                "hbar_d": hbar_d(&self.z).to_string(),
                "verified": hbar_d(&self.z).is_zero(),
            },
        })
    }
}

/// Lifts a `bv_delta`-closed function to a total cocycle. Each stage solves
/// `ω∧z_{j+1} = -d(z_j)`; the solve fails only on a component at top
/// auxiliary degree, which is the obstruction.
pub fn extend_cocycle(f: &SuperForm) -> Result<CocycleExtension, SpectralError> {
    if !f.is_function_degree() {
        return Err(OperatorError::NotFunctionDegree { found: f.max_form_degree() }.into());
    }
    let residual = bv_delta(f)?;
    if !residual.is_zero() {
        return Err(SpectralError::DeltaNotClosed { residual });
    }
    run_extension(f)
}

/// The correction loop itself, shared with the negative control, which runs
/// it on inputs that violate the closedness precondition on purpose.
fn run_extension(f: &SuperForm) -> Result<CocycleExtension, SpectralError> {
    let n = f.n();
    let mut levels = vec![times_dx_top(f)];
    let mut steps = Vec::new();
    loop {
        let rhs = -&de_rham(levels.last().unwrap());
        if rhs.is_zero() {
            break;
        }
        let alpha = match invert_omega(&rhs) {
            Ok(alpha) => alpha,
            Err(OperatorError::ComponentAtTopAuxdeg { component, .. }) => {
                return Err(SpectralError::ObstructionFound {
                    level: levels.len(),
                    residue: strip_top(&component),
                });
            }
            Err(e) => return Err(e.into()),
        };
        steps.push(ExtensionStep {
            level: levels.len(),
            alpha: display_form(&alpha),
            rhs: display_form(&rhs),
        });
        levels.push(alpha);
        // Each correction drops p-degree, so n + 1 levels is a hard bound.
        assert!(
            levels.len() <= n as usize + 1,
            "cocycle extension failed to terminate"
        );
    }
    let z = HbarForm::new(n, levels);
    let replay = hbar_d(&z);
    assert!(replay.is_zero(), "extension produced a non-cocycle: {replay}");
    Ok(CocycleExtension { f: f.clone(), z, steps })
}

/// Outcome of the soundness control on an input with `bv_delta(f) ≠ 0`.
#[derive(Clone, Debug)]
pub struct NegativeControl {
    pub f: SuperForm,
    pub level: usize,
    pub residue: SuperForm,
    pub delta: SuperForm,
}

/// Runs the extension on an input that must obstruct and checks the residue
/// is exactly `bv_delta(f)`, at the second stage.
pub fn negative_control(f: &SuperForm) -> Result<NegativeControl, SpectralError> {
    let delta = bv_delta(f)?;
    if delta.is_zero() {
        return Err(SpectralError::ControlInputClosed);
    }
    match run_extension(f) {
        Err(SpectralError::ObstructionFound { level, residue }) => {
            if level != 2 || residue != delta {
                return Err(SpectralError::MismatchAgainstDelta {
                    input: display_form(f),
                    got: format!("level {level} residue {}", display_form(&residue)),
                    want: format!("level 2 residue {}", display_form(&delta)),
                });
            }
            Ok(NegativeControl { f: f.clone(), level, residue, delta })
        }
        Err(e) => Err(e),
        Ok(_) => Err(SpectralError::MismatchAgainstDelta {
            input: display_form(f),
            got: "an unobstructed extension".to_string(),
            want: format!("an obstruction with residue {}", display_form(&delta)),
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationReport {
    pub n: u32,
    pub extended: usize,
    pub obstructed: usize,
    pub max_levels: usize,
}

/// Sweeps the function monomials in range: `bv_delta`-closed ones must
/// extend, the rest must obstruct with residue `bv_delta(f)`.
pub fn verify_degeneration(ctx: &Context) -> Result<DegenerationReport, SpectralError> {
    let n = ctx.n;
    let cap = ctx.max_x_deg + n.min(ctx.max_p_deg);
    let mut extended = 0usize;
    let mut obstructed = 0usize;
    let mut max_levels = 0usize;
    for m in function_monomials(n, cap) {
        let d = m.degrees();
        if d.x_deg > ctx.max_x_deg || d.p_deg > ctx.max_p_deg {
            continue;
        }
        let f = SuperForm::from_monomial(m, int(1));
        if bv_delta(&f)?.is_zero() {
            let ext = extend_cocycle(&f)?;
            max_levels = max_levels.max(ext.z.len());
            extended += 1;
        } else {
            negative_control(&f)?;
            obstructed += 1;
        }
    }
    Ok(DegenerationReport { n, extended, obstructed, max_levels })
}
