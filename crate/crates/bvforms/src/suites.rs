//! Named verification suites over enumerated inputs.
//!
//! Each suite sweeps a finite range and records one `CheckResult` per law,
//! with the first counterexample in `detail` on failure. Reports are
//! deterministic for fixed (suite, n, caps, seed) up to the timing field.
//!
//! The degree cap is interpreted per suite: total monomial degree for the
//! algebra-law sweeps (`bicomplex`, `homotopy`, `d3`, `delta-squared`,
//! `degeneration`), x-degree for the slice sweeps (`e1`, `d1`), and both
//! x- and p-caps for `invariance`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{all_monomials, function_monomials};
use crate::form::SuperForm;
use crate::monomial::Context;
use crate::operators::{bv_delta, de_rham, homotopy_l, omega_wedge};
use crate::printer::display_monomial;
use crate::scalar::{int, ratio};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    Bicomplex,
    Homotopy,
    E1,
    D1,
    D3,
    DeltaSquared,
    Degeneration,
    Invariance,
    Manin,
    Parser,
    All,
}

pub const SUITE_NAMES: [(&str, Suite); 11] = [
    ("bicomplex", Suite::Bicomplex),
    ("homotopy", Suite::Homotopy),
    ("e1", Suite::E1),
    ("d1", Suite::D1),
    ("d3", Suite::D3),
    ("delta-squared", Suite::DeltaSquared),
    ("degeneration", Suite::Degeneration),
    ("invariance", Suite::Invariance),
    ("manin", Suite::Manin),
    ("parser", Suite::Parser),
    ("all", Suite::All),
];

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; expected one of bicomplex, homotopy, e1, d1, d3, delta-squared, degeneration, invariance, manin, parser, all")]
    UnknownSuite(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl FromStr for Suite {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SUITE_NAMES
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, suite)| *suite)
            .ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = SUITE_NAMES
            .iter()
            .find(|(_, suite)| suite == self)
            .map(|(name, _)| *name)
            .unwrap();
        write!(f, "{name}")
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteParams {
    pub n: u32,
    pub max_deg: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub cases: usize,
    pub detail: String,
}

impl CheckResult {
    fn ok(name: &str, cases: usize, detail: impl Into<String>) -> Self {
        CheckResult { name: name.to_string(), pass: true, cases, detail: detail.into() }
    }

    fn fail(name: &str, cases: usize, detail: impl Into<String>) -> Self {
        CheckResult { name: name.to_string(), pass: false, cases, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub schema: u32,
    pub suite: String,
    pub params: SuiteParams,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    pub millis: u128,
}

/// Runs one law over every monomial, recording the first counterexample.
fn sweep<F>(name: &str, n: u32, max_total: u32, law: F) -> CheckResult
where
    F: Fn(&SuperForm) -> Result<(), String>,
{
    let mut cases = 0usize;
    for m in all_monomials(n, max_total) {
        let f = SuperForm::from_monomial(m.clone(), int(1));
        if let Err(detail) = law(&f) {
            return CheckResult::fail(
                name,
                cases,
                format!("counterexample {}: {detail}", display_monomial(&m)),
            );
        }
        cases += 1;
    }
    CheckResult::ok(name, cases, "")
}

fn bicomplex_checks(n: u32, max_total: u32) -> Vec<CheckResult> {
    vec![
        sweep("d squares to zero", n, max_total, |f| {
            let r = de_rham(&de_rham(f));
            if r.is_zero() { Ok(()) } else { Err(format!("d(d(f)) = {r}")) }
        }),
        sweep("wedge squares to zero", n, max_total, |f| {
            let r = omega_wedge(&omega_wedge(f));
            if r.is_zero() { Ok(()) } else { Err(format!("ω∧ω∧f = {r}")) }
        }),
        sweep("d and wedge anticommute", n, max_total, |f| {
            let r = &de_rham(&omega_wedge(f)) + &omega_wedge(&de_rham(f));
            if r.is_zero() { Ok(()) } else { Err(format!("anticommutator = {r}")) }
        }),
    ]
}

fn homotopy_checks(n: u32, max_total: u32) -> Vec<CheckResult> {
    vec![sweep("homotopy identity", n, max_total, |f| {
        let auxdeg = f.single_degrees().unwrap().auxdeg();
        let lhs = &homotopy_l(&omega_wedge(f)) + &omega_wedge(&homotopy_l(f));
        let rhs = f.scale(&int(n as i64 - auxdeg));
        if lhs == rhs {
            Ok(())
        } else {
            Err(format!("got {lhs}, want {rhs}"))
        }
    })]
}

fn e1_checks(ctx: &Context) -> Vec<CheckResult> {
    match crate::cohomology::verify_e1(ctx) {
        Ok(report) => {
            let witnesses: usize = report.slices.iter().map(|s| s.witnesses.len()).sum();
            vec![CheckResult::ok(
                "slice cohomology dimensions",
                report.cases,
                format!("{} surviving witnesses, all of top shape", witnesses),
            )]
        }
        Err(e) => vec![CheckResult::fail("slice cohomology dimensions", 0, e.to_string())],
    }
}

fn d1_checks(ctx: &Context) -> Vec<CheckResult> {
    match crate::cohomology::verify_d1_zero(ctx) {
        Ok(report) => {
            // Replay every certificate independently of its construction.
            let mut replayed = 0usize;
            for cert in &report.certificates {
                let f = match crate::parser::parse_form(&cert.f, ctx.n) {
                    Ok(f) => f,
                    Err(e) => {
                        return vec![CheckResult::fail(
                            "exactness certificates",
                            replayed,
                            format!("unreadable certificate for {}: {e}", cert.f),
                        )]
                    }
                };
                let alpha = match crate::parser::parse_form(&cert.alpha, ctx.n) {
                    Ok(a) => a,
                    Err(e) => {
                        return vec![CheckResult::fail(
                            "exactness certificates",
                            replayed,
                            format!("unreadable certificate for {}: {e}", cert.f),
                        )]
                    }
                };
                let want = de_rham(&(&f * &SuperForm::dx_top(ctx.n)));
                let got = omega_wedge(&alpha);
                if got != want {
                    return vec![CheckResult::fail(
                        "exactness certificates",
                        replayed,
                        format!("certificate for {} replays to {got}, want {want}", cert.f),
                    )];
                }
                replayed += 1;
            }
            vec![CheckResult::ok("exactness certificates", replayed, "")]
        }
        Err(e) => vec![CheckResult::fail("exactness certificates", 0, e.to_string())],
    }
}

fn d3_checks(ctx: &Context) -> Vec<CheckResult> {
    match crate::spectral::verify_d3_equals_delta(ctx) {
        Ok(report) => vec![CheckResult::ok("induced differential equals bv_delta", report.cases, "")],
        Err(e) => vec![CheckResult::fail("induced differential equals bv_delta", 0, e.to_string())],
    }
}

fn delta_squared_checks(n: u32, max_total: u32) -> Vec<CheckResult> {
    let mut cases = 0usize;
    for m in function_monomials(n, max_total) {
        let f = SuperForm::from_monomial(m.clone(), int(1));
        let r = bv_delta(&bv_delta(&f).unwrap()).unwrap();
        if !r.is_zero() {
            return vec![CheckResult::fail(
                "bv_delta squares to zero",
                cases,
                format!("counterexample {}: {r}", display_monomial(&m)),
            )];
        }
        cases += 1;
    }
    vec![CheckResult::ok("bv_delta squares to zero", cases, "")]
}

fn degeneration_checks(ctx: &Context) -> Vec<CheckResult> {
    match crate::spectral::verify_degeneration(ctx) {
        Ok(report) => vec![
            CheckResult::ok(
                "closed inputs extend to total cocycles",
                report.extended,
                format!("at most {} h-levels", report.max_levels),
            ),
            CheckResult::ok(
                "non-closed inputs obstruct with residue bv_delta(f)",
                report.obstructed,
                "",
            ),
        ],
        Err(e) => vec![CheckResult::fail("degeneration sweep", 0, e.to_string())],
    }
}

fn invariance_checks(ctx: &Context, seed: u64) -> Vec<CheckResult> {
    match crate::geometry::verify_delta_invariance_families(ctx, seed) {
        Ok(sweep) => vec![CheckResult::ok(
            "bv_delta commutes with transport",
            sweep.cases,
            format!("{} coordinate changes", sweep.instances),
        )],
        Err(e) => vec![CheckResult::fail("bv_delta commutes with transport", 0, e.to_string())],
    }
}

fn semidensity_checks(n: u32, seed: u64) -> Vec<CheckResult> {
    match crate::geometry::verify_semidensity_law(n, seed) {
        Ok(report) => vec![
            CheckResult::ok(
                "factor squares to the Berezinian",
                report.entries.len(),
                format!(
                    "factors: {}",
                    report
                        .entries
                        .iter()
                        .map(|e| format!("{}: r = {}", e.label, e.r))
                        .collect::<Vec<_>>()
                        .join("; ")
                ),
            ),
            CheckResult::ok("factor composes across pairs", report.composition_checks, ""),
        ],
        Err(e) => vec![CheckResult::fail("factor squares to the Berezinian", 0, e.to_string())],
    }
}

fn manin_checks(n: u32) -> Vec<CheckResult> {
    match crate::cohomology::manin_fiber_check(n) {
        Ok(report) => vec![CheckResult::ok(
            "constant-coefficient classes concentrate at the top",
            report.cases,
            "single witness dx1*…*dxn",
        )],
        Err(e) => vec![CheckResult::fail(
            "constant-coefficient classes concentrate at the top",
            0,
            e.to_string(),
        )],
    }
}

/// Canonical forms for the round-trip sweep: single monomials with varied
/// rational coefficients, then two-term combinations.
pub fn round_trip_corpus(n: u32, at_least: usize) -> Vec<SuperForm> {
    let coeffs = [int(1), int(-1), int(3), ratio(-3, 7), ratio(5, 2)];
    let mut out = Vec::new();
    let mut max_total = 2;
    while out.len() < at_least {
        out.clear();
        let monomials = all_monomials(n, max_total);
        for (i, m) in monomials.iter().enumerate() {
            let c = coeffs[i % coeffs.len()].clone();
            out.push(SuperForm::from_monomial(m.clone(), c));
        }
        for pair in monomials.chunks(2) {
            if let [a, b] = pair {
                let mut f = SuperForm::from_monomial(a.clone(), ratio(1, 2));
                f.add_term(b.clone(), int(-2));
                out.push(f);
            }
        }
        max_total += 1;
    }
    out.truncate(at_least);
    out
}

pub const MALFORMED_CORPUS: [(&str, usize); 12] = [
    ("", 0),
    ("x", 1),
    ("x0", 1),
    ("3/0", 2),
    ("x1 +", 4),
    ("q1", 0),
    ("dq1", 1),
    ("x1 x2", 3),
    ("(x1", 3),
    ("x1^p1", 3),
    ("*x1", 0),
    ("x1^(2)", 3),
];

fn parser_checks(n: u32) -> Vec<CheckResult> {
    let corpus = round_trip_corpus(n, 1000);
    let mut round_trips = 0usize;
    for f in &corpus {
        let text = f.to_string();
        match crate::parser::parse_form(&text, n) {
            Ok(back) if back == *f => round_trips += 1,
            Ok(back) => {
                return vec![CheckResult::fail(
                    "print/parse round-trip",
                    round_trips,
                    format!("{text} re-parses to {back}"),
                )]
            }
            Err(e) => {
                return vec![CheckResult::fail(
                    "print/parse round-trip",
                    round_trips,
                    format!("{text} fails to parse: {e}"),
                )]
            }
        }
    }
    // Fixed two-pair context so the recorded byte offsets stay stable.
    let mut positioned = 0usize;
    for (text, want_at) in MALFORMED_CORPUS {
        match crate::parser::parse_hbar(text, 2) {
            Ok(v) => {
                return vec![
                    CheckResult::ok("print/parse round-trip", round_trips, ""),
                    CheckResult::fail(
                        "malformed inputs are rejected with positions",
                        positioned,
                        format!("{text:?} unexpectedly parses to {v}"),
                    ),
                ]
            }
            Err(e) if e.position == want_at => positioned += 1,
            Err(e) => {
                return vec![
                    CheckResult::ok("print/parse round-trip", round_trips, ""),
                    CheckResult::fail(
                        "malformed inputs are rejected with positions",
                        positioned,
                        format!("{text:?} reports byte {}, want {want_at}", e.position),
                    ),
                ]
            }
        }
    }
    vec![
        CheckResult::ok("print/parse round-trip", round_trips, ""),
        CheckResult::ok("malformed inputs are rejected with positions", positioned, ""),
    ]
}

fn suite_checks(suite: Suite, params: &SuiteParams) -> Vec<CheckResult> {
    let n = params.n;
    let deg = params.max_deg;
    let ctx = Context::new(n, deg, n);
    match suite {
        Suite::Bicomplex => bicomplex_checks(n, deg),
        Suite::Homotopy => homotopy_checks(n, deg),
        Suite::E1 => e1_checks(&ctx),
        Suite::D1 => d1_checks(&ctx),
        Suite::D3 => d3_checks(&ctx),
        Suite::DeltaSquared => delta_squared_checks(n, deg),
        Suite::Degeneration => degeneration_checks(&ctx),
        Suite::Invariance => invariance_checks(&ctx, params.seed),
        Suite::Manin => manin_checks(n),
        Suite::Parser => parser_checks(n),
        Suite::All => {
            let mut checks = Vec::new();
            for (name, sub) in SUITE_NAMES.iter().filter(|(_, s)| *s != Suite::All) {
                for mut check in suite_checks(*sub, params) {
                    check.name = format!("{name}: {}", check.name);
                    checks.push(check);
                }
            }
            // The squared semidensity law rides along with every full run.
            for mut check in semidensity_checks(n, params.seed) {
                check.name = format!("semidensity: {}", check.name);
                checks.push(check);
            }
            checks
        }
    }
}

pub fn run_suite(suite: Suite, params: &SuiteParams) -> Result<CheckReport, SuiteError> {
    if params.n == 0 || params.n > 8 {
        return Err(SuiteError::InvalidParams(format!(
            "n = {} outside the supported sweep range 1..=8",
            params.n
        )));
    }
    if params.max_deg > 12 {
        return Err(SuiteError::InvalidParams(format!(
            "degree cap {} too large for an exhaustive sweep",
            params.max_deg
        )));
    }
    let start = Instant::now();
    let mut checks = suite_checks(suite, params);
    if suite == Suite::All {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(CheckReport {
        schema: 1,
        suite: suite.to_string(),
        params: *params,
        pass,
        checks,
        millis: start.elapsed().as_millis(),
    })
}

/// One line per check plus a verdict, for terminal use.
pub fn render_text(report: &CheckReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "suite {} (n={}, max-deg={}, seed={})\n",
        report.suite, report.params.n, report.params.max_deg, report.params.seed
    ));
    for c in &report.checks {
        if c.pass {
            out.push_str(&format!("  ok   {} ({} cases)", c.name, c.cases));
        } else {
            out.push_str(&format!("  FAIL {}: {}", c.name, c.detail));
        }
        if c.pass && !c.detail.is_empty() {
            out.push_str(&format!(" [{}]", c.detail));
        }
        out.push('\n');
    }
    out.push_str(if report.pass { "pass\n" } else { "FAIL\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for (name, suite) in SUITE_NAMES {
            assert_eq!(Suite::from_str(name).unwrap(), suite);
            assert_eq!(suite.to_string(), name);
        }
        assert!(matches!(
            Suite::from_str("nope"),
            Err(SuiteError::UnknownSuite(_))
        ));
    }

    #[test]
    fn parameter_validation() {
        let bad = SuiteParams { n: 0, max_deg: 3, seed: 0 };
        assert!(matches!(
            run_suite(Suite::D3, &bad),
            Err(SuiteError::InvalidParams(_))
        ));
    }

    #[test]
    fn small_suites_pass() {
        let params = SuiteParams { n: 1, max_deg: 3, seed: 0 };
        for suite in [Suite::Bicomplex, Suite::Homotopy, Suite::D3, Suite::Manin, Suite::Parser] {
            let report = run_suite(suite, &params).unwrap();
            assert!(report.pass, "{}", render_text(&report));
            assert_eq!(report.schema, 1);
        }
    }

    #[test]
    fn all_suite_aggregates() {
        let params = SuiteParams { n: 1, max_deg: 2, seed: 0 };
        let report = run_suite(Suite::All, &params).unwrap();
        assert!(report.pass, "{}", render_text(&report));
        assert!(report.checks.len() >= 12);
        let names: Vec<_> = report.checks.iter().map(|c| c.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn corpus_is_large_enough() {
        let corpus = round_trip_corpus(2, 1000);
        assert_eq!(corpus.len(), 1000);
    }

    #[test]
    fn reports_serialize_with_schema() {
        let params = SuiteParams { n: 1, max_deg: 2, seed: 0 };
        let report = run_suite(Suite::Manin, &params).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["suite"], "manin");
        assert!(v["checks"].as_array().unwrap()[0]["pass"].as_bool().unwrap());
    }
}
