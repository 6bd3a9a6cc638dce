//! Command execution and report assembly. Reports are deterministic:
//! fields are emitted in a fixed order and all numbers are exact rational
//! strings, except monodromy float diagnostics which are labeled as such.

use serde_json::{json, Map, Value};

use isokit::conformal::{cone_condition, solve_factor_equation_opts, ConeDecision, ConformalData};
use isokit::hermitian::{
    factor_by_h, form_from_map, form_pow, resolvable_check_form, veronese, HermitianError,
    MapTuple, Resolvability,
};
use isokit::identity::{IdentityInstance, WeightedForm};
use isokit::puiseux::monodromy::LoopShape;
use isokit::puiseux::{
    classify_branching, monodromy_circle, monodromy_loci, newton_puiseux, Branching, Center,
    PuiseuxError,
};
use isokit::scalar::{format_rational, QModReal, Rational};

use crate::problem::{Instance, ProblemFile};

pub struct Runtime {
    pub order: Option<u32>,
    pub bound: Option<u32>,
    pub json: bool,
    pub parallel: bool,
}

#[derive(Debug, Clone)]
pub struct InstanceReport {
    pub name: String,
    pub index: usize,
    pub pass: bool,
    pub input_error: bool,
    pub message: Option<String>,
    pub fields: Map<String, Value>,
}

impl InstanceReport {
    fn new(name: &str, index: usize) -> Self {
        InstanceReport {
            name: name.to_string(),
            index,
            pass: true,
            input_error: false,
            message: None,
            fields: Map::new(),
        }
    }

    fn fail(mut self, message: impl Into<String>) -> Self {
        self.pass = false;
        self.message = Some(message.into());
        self
    }

    pub fn input_error(name: &str, index: usize, message: &str) -> Self {
        let mut r = InstanceReport::new(name, index);
        r.pass = false;
        r.input_error = true;
        r.message = Some(message.to_string());
        r
    }

    fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.to_string(), value);
    }
}

pub enum RunError {
    Input(String),
}

fn need<'a, T>(field: &'a Option<T>, what: &str) -> Result<&'a T, RunError> {
    field
        .as_ref()
        .ok_or_else(|| RunError::Input(format!("missing required field `{what}`")))
}

fn monomial_str(exp: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &p) in exp.iter().enumerate() {
        match p {
            0 => {}
            1 => parts.push(format!("{}{}", var, i + 1)),
            _ => parts.push(format!("{}{}^{}", var, i + 1, p)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn scalar_str(x: &QModReal) -> String {
    x.to_string()
}

fn default_r(file: &ProblemFile) -> QModReal {
    QModReal::from_rational(&file.basis, Rational::from_integer(1.into()))
}

pub fn run_command(
    file: &ProblemFile,
    idx: usize,
    command: &str,
    rt: &Runtime,
) -> Result<InstanceReport, RunError> {
    let inst = &file.instances[idx];
    match command {
        "verify" => run_verify(file, inst, idx, rt),
        "cone" => run_cone(file, inst, idx),
        "factors" => run_factors(file, inst, idx, rt),
        "resolvable" => run_resolvable(file, inst, idx, rt),
        "factor" => run_factor(inst, idx),
        "puiseux" => run_puiseux(file, inst, idx),
        "monodromy" => run_monodromy(inst, idx),
        "classify" => run_classify(inst, idx),
        "example62" => run_example62(file, inst, idx, rt),
        other => Err(RunError::Input(format!("unknown command `{other}`"))),
    }
}

fn build_identity(file: &ProblemFile, inst: &Instance) -> Result<IdentityInstance, RunError> {
    let h = need(&inst.h, "h")?;
    let f_factors = need(&inst.f_factors, "f_factors")?;
    let g_factors = inst.g_factors.clone().unwrap_or_default();
    let r = inst.r.clone().unwrap_or_else(|| default_r(file));
    let mut n = h.n();
    for f in f_factors.iter().chain(&g_factors) {
        n = n.max(f.form.n());
    }
    Ok(IdentityInstance {
        h: h.pad_to(n),
        r,
        f_factors: f_factors
            .iter()
            .map(|f| WeightedForm {
                weight: f.weight.clone(),
                form: f.form.pad_to(n),
            })
            .collect(),
        g_factors: g_factors
            .iter()
            .map(|f| WeightedForm {
                weight: f.weight.clone(),
                form: f.form.pad_to(n),
            })
            .collect(),
    })
}

fn verify_report(
    identity: &IdentityInstance,
    order: u32,
    mut rep: InstanceReport,
) -> Result<InstanceReport, RunError> {
    let report = identity
        .verify(order)
        .map_err(|e| RunError::Input(e.to_string()))?;
    rep.set("order", json!(report.order));
    rep.set("proof_order", json!(report.proof_order));
    rep.set("conclusive", json!(report.conclusive));
    rep.set("residual_zero", json!(report.all_zero));
    rep.set(
        "residuals",
        Value::Array(
            report
                .residuals
                .iter()
                .map(|s| Value::String(s.to_string()))
                .collect(),
        ),
    );
    let factor_value = |f: &Option<isokit::hermitian::FactorResult>| match f {
        Some(r) => json!({"a": format_rational(&r.a), "m": r.m}),
        None => Value::Null,
    };
    rep.set(
        "f_factorizations",
        Value::Array(report.f_factorizations.iter().map(factor_value).collect()),
    );
    rep.set(
        "g_factorizations",
        Value::Array(report.g_factorizations.iter().map(factor_value).collect()),
    );
    if !report.all_zero {
        return Ok(rep.fail(format!("residual is nonzero at order {order}")));
    }
    Ok(rep)
}

fn run_verify(
    file: &ProblemFile,
    inst: &Instance,
    idx: usize,
    rt: &Runtime,
) -> Result<InstanceReport, RunError> {
    let identity = build_identity(file, inst)?;
    let order = rt
        .order
        .or(file.options.order)
        .unwrap_or_else(|| identity.default_order());
    let mut rep = InstanceReport::new(&inst.name, idx);
    match isokit::hermitian::irreducibility_screen(&identity.h) {
        None => rep.set(
            "h_irreducibility_screen",
            json!("no reducibility witness found"),
        ),
        Some(w) => rep.set("h_irreducibility_screen", json!(format!("warning: {w}"))),
    }
    match isokit::hermitian::sample_positivity(&identity.h, 3) {
        None => rep.set(
            "h_positivity_sampled",
            json!("positive at all sample points"),
        ),
        Some((point, value)) => rep.set(
            "h_positivity_sampled",
            json!(format!(
                "non-positive value {} at {point}",
                format_rational(&value)
            )),
        ),
    }
    verify_report(&identity, order, rep)
}

fn conformal_data(file: &ProblemFile, inst: &Instance) -> Result<ConformalData, RunError> {
    let mu = need(&inst.mu, "mu")?.clone();
    let lambda = inst.lambda.clone().unwrap_or_default();
    let r = inst.r.clone().unwrap_or_else(|| default_r(file));
    ConformalData::new(mu, lambda, r).map_err(|e| RunError::Input(e.to_string()))
}

fn run_cone(file: &ProblemFile, inst: &Instance, idx: usize) -> Result<InstanceReport, RunError> {
    let data = conformal_data(file, inst)?;
    let mut rep = InstanceReport::new(&inst.name, idx);
    match cone_condition(&data).map_err(|e| RunError::Input(e.to_string()))? {
        ConeDecision::Holds { vacuous } => {
            rep.set("cone_condition", json!("holds"));
            rep.set("vacuous", json!(vacuous));
            Ok(rep)
        }
        ConeDecision::Violated(w) => {
            rep.set("cone_condition", json!("violated"));
            rep.set(
                "witness",
                json!({
                    "c": w.c.iter().map(format_rational).collect::<Vec<_>>(),
                    "d": w.d.iter().map(format_rational).collect::<Vec<_>>(),
                    "value": scalar_str(&w.value),
                }),
            );
            Ok(rep.fail("cone condition violated"))
        }
    }
}

fn run_factors(
    file: &ProblemFile,
    inst: &Instance,
    idx: usize,
    rt: &Runtime,
) -> Result<InstanceReport, RunError> {
    let data = conformal_data(file, inst)?;
    let bound = rt.bound.or(file.options.bound).unwrap_or(5);
    let sols = solve_factor_equation_opts(&data, bound, file.options.allow_zero)
        .map_err(|e| RunError::Input(e.to_string()))?;
    let mut rep = InstanceReport::new(&inst.name, idx);
    rep.set("bound", json!(bound));
    rep.set(
        "solutions",
        Value::Array(sols.iter().map(|s| json!({"m": s.m, "n": s.n})).collect()),
    );
    rep.set("count", json!(sols.len()));
    Ok(rep)
}

fn run_resolvable(
    file: &ProblemFile,
    inst: &Instance,
    idx: usize,
    rt: &Runtime,
) -> Result<InstanceReport, RunError> {
    let form = need(&inst.potential, "potential")?;
    let order = rt
        .order
        .or(file.options.order)
        .unwrap_or_else(|| form.max_total_degree());
    let mut rep = InstanceReport::new(&inst.name, idx);
    rep.set("degree", json!(order));
    match resolvable_check_form(form, order).map_err(|e| RunError::Input(e.to_string()))? {
        Resolvability::Resolvable { pivots, witness } => {
            rep.set("resolvable", json!(true));
            rep.set(
                "pivots",
                Value::Array(
                    pivots
                        .iter()
                        .map(|(m, p)| json!([monomial_str(m, "z"), format_rational(p)]))
                        .collect(),
                ),
            );
            rep.set(
                "witness_components",
                Value::Array(
                    witness
                        .components
                        .iter()
                        .map(|c| {
                            Value::String(
                                c.terms
                                    .iter()
                                    .map(|(e, coeff)| format!("{}*{}", coeff, monomial_str(e, "z")))
                                    .collect::<Vec<_>>()
                                    .join(" + "),
                            )
                        })
                        .collect(),
                ),
            );
            Ok(rep)
        }
        Resolvability::NotResolvable {
            z_monomial,
            xi_monomial,
            value,
        } => {
            rep.set("resolvable", json!(false));
            rep.set(
                "certificate",
                json!({
                    "z_monomial": monomial_str(&z_monomial, "z"),
                    "xi_monomial": monomial_str(&xi_monomial, "xi"),
                    "value": format_rational(&value),
                }),
            );
            Ok(rep.fail("potential is not resolvable"))
        }
    }
}

fn run_factor(inst: &Instance, idx: usize) -> Result<InstanceReport, RunError> {
    let p = need(&inst.p, "p")?;
    let h = need(&inst.h, "h")?;
    let n = p.n().max(h.n());
    let mut rep = InstanceReport::new(&inst.name, idx);
    match factor_by_h(&p.pad_to(n), &h.pad_to(n)) {
        Ok(r) => {
            rep.set("a", json!(format_rational(&r.a)));
            rep.set("m", json!(r.m));
            Ok(rep)
        }
        Err(HermitianError::NotAPurePower(msg)) => {
            rep.set("a", Value::Null);
            rep.set("m", Value::Null);
            Ok(rep.fail(format!("not a pure power: {msg}")))
        }
        Err(e) => Err(RunError::Input(e.to_string())),
    }
}

fn run_puiseux(
    file: &ProblemFile,
    inst: &Instance,
    idx: usize,
) -> Result<InstanceReport, RunError> {
    let poly = need(&inst.poly, "poly")?;
    let center = inst
        .center
        .clone()
        .unwrap_or(Center::Rational(Rational::from_integer(0.into())));
    let terms = inst.terms.or(file.options.terms).unwrap_or(8);
    let mut rep = InstanceReport::new(&inst.name, idx);
    rep.set("center", json!(center.to_string()));
    rep.set("terms_requested", json!(terms));
    match newton_puiseux(poly, &center, terms) {
        Ok(cycles) => {
            rep.set(
                "cycles",
                Value::Array(
                    cycles
                        .iter()
                        .map(|c| {
                            json!({
                                "ramification": c.ramification,
                                "leading_exponent": c
                                    .leading_exponent()
                                    .map(|(i, n)| format!("{i}/{n}")),
                                "series": c.describe(),
                                "exact": c.exact,
                                "residual_valuation": c.residual_valuation,
                            })
                        })
                        .collect(),
                ),
            );
            rep.set(
                "branch_count",
                json!(cycles.iter().map(|c| c.ramification).sum::<u32>()),
            );
            Ok(rep)
        }
        Err(
            e @ (PuiseuxError::UnsupportedCoefficientField(_) | PuiseuxError::ExpansionOverflow(_)),
        ) => Ok(rep.fail(e.to_string())),
        Err(e) => Err(RunError::Input(e.to_string())),
    }
}

fn run_monodromy(inst: &Instance, idx: usize) -> Result<InstanceReport, RunError> {
    let poly = need(&inst.poly, "poly")?;
    let shape = need(&inst.loop_shape, "loop")?;
    let mut rep = InstanceReport::new(&inst.name, idx);
    let action = match shape {
        LoopShape::Circle { center, radius } => {
            monodromy_circle(poly, center.clone(), radius.clone())
        }
        LoopShape::Loci { basepoint, indices } => monodromy_loci(poly, basepoint.clone(), indices),
    };
    match action {
        Ok(act) => {
            rep.set("permutation", json!(act.permutation));
            rep.set("cycle_structure", json!(act.cycle_structure()));
            rep.set("identity", json!(act.is_identity()));
            rep.set(
                "float_diagnostics",
                json!({
                    "steps": act.diagnostics.steps,
                    "final_residual": act.diagnostics.final_residual,
                    "min_separation": act.diagnostics.min_separation,
                }),
            );
            Ok(rep)
        }
        Err(e @ (PuiseuxError::PathTooCloseToLocus | PuiseuxError::AmbiguousMatching)) => {
            Ok(rep.fail(e.to_string()))
        }
        Err(e) => Err(RunError::Input(e.to_string())),
    }
}

fn run_classify(inst: &Instance, idx: usize) -> Result<InstanceReport, RunError> {
    let poly = need(&inst.poly, "poly")?;
    let point = need(&inst.point, "point")?;
    let mut rep = InstanceReport::new(&inst.name, idx);
    rep.set("point", json!(point.to_string()));
    match classify_branching(poly, point) {
        Ok(Branching::NonBranching) => {
            rep.set("classification", json!("non-branching"));
            Ok(rep)
        }
        Ok(Branching::SimpleCyclic { period }) => {
            rep.set("classification", json!("simple-cyclic"));
            rep.set("period", json!(period));
            Ok(rep)
        }
        Ok(Branching::NonCyclic) => {
            rep.set("classification", json!("non-cyclic"));
            Ok(rep)
        }
        Err(
            e @ (PuiseuxError::TruncationInconclusive
            | PuiseuxError::UnsupportedCoefficientField(_)),
        ) => {
            rep.set("classification", json!("inconclusive"));
            Ok(rep.fail(e.to_string()))
        }
        Err(e) => Err(RunError::Input(e.to_string())),
    }
}

fn run_example62(
    file: &ProblemFile,
    inst: &Instance,
    idx: usize,
    rt: &Runtime,
) -> Result<InstanceReport, RunError> {
    let mu = need(&inst.mu, "mu")?.clone();
    let lambda = inst.lambda.clone().unwrap_or_default();
    let m = need(&inst.m, "m")?.clone();
    let n = inst.n.clone().unwrap_or_default();
    let m_prime = inst.m_prime.clone().unwrap_or_else(|| vec![0; mu.len()]);
    let n_prime = inst
        .n_prime
        .clone()
        .unwrap_or_else(|| vec![0; lambda.len()]);
    let f = inst.f.clone().unwrap_or_else(|| MapTuple::empty(1));
    let mut rep = InstanceReport::new(&inst.name, idx);
    match isokit::hermitian::example62_construct(&mu, &lambda, &m, &n, &m_prime, &n_prime, &f) {
        Ok(identity) => {
            let order = rt
                .order
                .or(file.options.order)
                .unwrap_or_else(|| identity.default_order());
            rep.set(
                "factors_built",
                json!(identity.f_factors.len() + identity.g_factors.len()),
            );
            verify_report(&identity, order, rep)
        }
        Err(e @ HermitianError::PreconditionViolated(_)) => Ok(rep.fail(e.to_string())),
        Err(e) => Err(RunError::Input(e.to_string())),
    }
}

pub fn run_veronese(n: usize, k: u32) -> InstanceReport {
    let mut rep = InstanceReport::new(&format!("veronese n={n} k={k}"), 0);
    if n == 0 || k == 0 {
        return rep.fail("n and k must be positive");
    }
    let map = veronese(n, k);
    rep.set("target_dimension", json!(map.target_dim()));
    rep.set(
        "components",
        Value::Array(
            map.components
                .iter()
                .map(|c| {
                    Value::String(
                        c.terms
                            .iter()
                            .map(|(e, coeff)| format!("{}*{}", coeff, monomial_str(e, "z")))
                            .collect::<Vec<_>>()
                            .join(" + "),
                    )
                })
                .collect(),
        ),
    );
    let ok = match (form_from_map(&map), form_from_map(&MapTuple::identity(n))) {
        (Ok(form), Ok(base)) => match form_pow(&base, k) {
            Ok(expect) => form == expect,
            Err(_) => false,
        },
        _ => false,
    };
    rep.set("identity_check", json!(ok));
    if !ok {
        return rep.fail("veronese form does not match the defining identity");
    }
    rep
}

/// Print reports and return overall pass. Output is buffered and written
/// once; a closed pipe downstream is not an error.
pub fn emit(rt: &Runtime, command: &str, reports: Vec<InstanceReport>) -> bool {
    use std::fmt::Write as _;
    let pass = reports.iter().all(|r| r.pass);
    let mut out = String::new();
    if rt.json {
        let doc = json!({
            "schema": "isokit-report/1",
            "command": command,
            "pass": pass,
            "instances": reports
                .iter()
                .map(|r| {
                    let mut obj = Map::new();
                    obj.insert("index".into(), json!(r.index));
                    obj.insert("name".into(), json!(r.name));
                    obj.insert("pass".into(), json!(r.pass));
                    if let Some(m) = &r.message {
                        obj.insert("message".into(), json!(m));
                    }
                    for (k, v) in &r.fields {
                        obj.insert(k.clone(), v.clone());
                    }
                    Value::Object(obj)
                })
                .collect::<Vec<_>>(),
        });
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("report serialization")
        );
    } else {
        let _ = writeln!(out, "command: {command}");
        for r in &reports {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "instance {} ({}): {status}", r.index, r.name);
            if let Some(m) = &r.message {
                let _ = writeln!(out, "  note: {m}");
            }
            for (k, v) in &r.fields {
                let _ = writeln!(out, "  {k}: {}", compact(v));
            }
        }
        let _ = writeln!(out, "overall: {}", if pass { "PASS" } else { "FAIL" });
    }
    use std::io::Write as _;
    let _ = std::io::stdout().write_all(out.as_bytes());
    pass
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("value serialization")
}
