//! Problem file parsing and printing.
//!
//! Files are JSON with one schema version. Scalars are coordinate lists of
//! `"p/q"` strings over the declared basis; potentials are expression
//! strings or term lists `{z_exp, xi_exp, coeff}`; maps are component
//! lists. Parsing yields position-annotated syntax errors or path-annotated
//! schema errors.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use isokit::expr::{parse_algebraic, parse_polarized};
use isokit::hermitian::{HermitianForm, MapCoeff, MapComponent, MapTuple};
use isokit::puiseux::monodromy::LoopShape;
use isokit::puiseux::{AlgebraicFunction, Center};
use isokit::scalar::{format_rational, parse_rational, QBasis, QModReal, Rational, Refiner};
use isokit::series::Exponents;

pub const SCHEMA: &str = "isokit/1";

#[derive(Debug, Clone)]
pub enum ProblemError {
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    Schema {
        path: String,
        message: String,
    },
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::Syntax {
                line,
                column,
                expected,
            } => write!(
                f,
                "syntax error at line {line}, column {column}: {expected}"
            ),
            ProblemError::Schema { path, message } => {
                write!(f, "schema error at {path}: {message}")
            }
        }
    }
}

impl std::error::Error for ProblemError {}

fn schema_err(path: &str, message: impl Into<String>) -> ProblemError {
    ProblemError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub order: Option<u32>,
    pub bound: Option<u32>,
    pub terms: Option<usize>,
    pub allow_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPotential {
    pub weight: QModReal,
    pub form: HermitianForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub mu: Option<Vec<QModReal>>,
    pub lambda: Option<Vec<QModReal>>,
    pub r: Option<QModReal>,
    pub h: Option<HermitianForm>,
    pub f_factors: Option<Vec<WeightedPotential>>,
    pub g_factors: Option<Vec<WeightedPotential>>,
    pub potential: Option<HermitianForm>,
    pub p: Option<HermitianForm>,
    pub poly: Option<AlgebraicFunction>,
    pub center: Option<Center>,
    pub point: Option<Center>,
    pub terms: Option<usize>,
    pub loop_shape: Option<LoopShape>,
    pub m: Option<Vec<u32>>,
    pub n: Option<Vec<u32>>,
    pub m_prime: Option<Vec<u32>>,
    pub n_prime: Option<Vec<u32>>,
    pub f: Option<MapTuple>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub basis: Arc<QBasis>,
    pub options: Options,
    pub instances: Vec<Instance>,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ProblemError::Syntax {
        line: e.line(),
        column: e.column(),
        expected: e.to_string(),
    })?;
    let root = value
        .as_object()
        .ok_or_else(|| schema_err("$", "top level must be an object"))?;
    let schema = root
        .get("schema")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err("$.schema", "missing schema string"))?;
    if schema != SCHEMA {
        return Err(schema_err(
            "$.schema",
            format!("unsupported schema `{schema}`, expected `{SCHEMA}`"),
        ));
    }
    let basis = parse_basis(root.get("basis"), "$.basis")?;
    let options = parse_options(root.get("options"))?;
    let mut instances = Vec::new();
    if let Some(v) = root.get("instances") {
        let arr = v
            .as_array()
            .ok_or_else(|| schema_err("$.instances", "must be an array"))?;
        for (i, inst) in arr.iter().enumerate() {
            instances.push(parse_instance(inst, &basis, &format!("$.instances[{i}]"))?);
        }
    }
    Ok(ProblemFile {
        basis,
        options,
        instances,
    })
}

fn parse_basis(v: Option<&Value>, path: &str) -> Result<Arc<QBasis>, ProblemError> {
    let Some(v) = v else {
        return Ok(QBasis::rational());
    };
    let arr = v
        .as_array()
        .ok_or_else(|| schema_err(path, "must be an array of {label, rule}"))?;
    let mut entries = Vec::new();
    for (i, e) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let obj = e
            .as_object()
            .ok_or_else(|| schema_err(&p, "must be an object"))?;
        let label = obj
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| schema_err(&p, "missing label"))?;
        let rule = obj
            .get("rule")
            .and_then(Value::as_str)
            .ok_or_else(|| schema_err(&p, "missing rule"))?;
        let refiner = if rule == "unit" {
            Refiner::Unit
        } else if let Some(inner) = rule.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
            Refiner::Sqrt(parse_rat(inner, &format!("{p}.rule"))?)
        } else {
            return Err(schema_err(&p, format!("unknown rule `{rule}`")));
        };
        entries.push((label.to_string(), refiner));
    }
    QBasis::new(entries).map_err(|e| schema_err(path, e.to_string()))
}

fn parse_options(v: Option<&Value>) -> Result<Options, ProblemError> {
    let mut o = Options::default();
    let Some(v) = v else { return Ok(o) };
    let obj = v
        .as_object()
        .ok_or_else(|| schema_err("$.options", "must be an object"))?;
    let uint = |obj: &Map<String, Value>, key: &str| -> Result<Option<u64>, ProblemError> {
        match obj.get(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| {
                schema_err(&format!("$.options.{key}"), "must be a nonnegative integer")
            }),
        }
    };
    o.order = uint(obj, "order")?.map(|x| x as u32);
    o.bound = uint(obj, "bound")?.map(|x| x as u32);
    o.terms = uint(obj, "terms")?.map(|x| x as usize);
    if let Some(v) = obj.get("allow_zero") {
        o.allow_zero = v
            .as_bool()
            .ok_or_else(|| schema_err("$.options.allow_zero", "must be a boolean"))?;
    }
    Ok(o)
}

fn parse_rat(s: &str, path: &str) -> Result<Rational, ProblemError> {
    // A malformed rational literal is a syntax error in the embedded
    // little language; the path pins it down.
    parse_rational(s).map_err(|_| ProblemError::Syntax {
        line: 0,
        column: 0,
        expected: format!("valid rational `p/q` at {path}, got `{s}`"),
    })
}

fn parse_scalar(v: &Value, basis: &Arc<QBasis>, path: &str) -> Result<QModReal, ProblemError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema_err(path, "scalar must be a coordinate array of `p/q` strings"))?;
    let mut coords = Vec::new();
    for (i, c) in arr.iter().enumerate() {
        let s = c
            .as_str()
            .ok_or_else(|| schema_err(&format!("{path}[{i}]"), "must be a string"))?;
        coords.push(parse_rat(s, &format!("{path}[{i}]"))?);
    }
    QModReal::new(basis.clone(), coords).map_err(|e| schema_err(path, e.to_string()))
}

fn parse_scalar_list(
    v: &Value,
    basis: &Arc<QBasis>,
    path: &str,
) -> Result<Vec<QModReal>, ProblemError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema_err(path, "must be an array of scalars"))?;
    arr.iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(s, basis, &format!("{path}[{i}]")))
        .collect()
}

fn parse_uint_list(v: &Value, path: &str) -> Result<Vec<u32>, ProblemError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema_err(path, "must be an array of integers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_u64()
                .and_then(|u| u32::try_from(u).ok())
                .ok_or_else(|| {
                    schema_err(
                        &format!("{path}[{i}]"),
                        "must be a small nonnegative integer",
                    )
                })
        })
        .collect()
}

fn exponent_list(v: &Value, path: &str) -> Result<Vec<u32>, ProblemError> {
    parse_uint_list(v, path)
}

/// A potential: an expression string or a term-list series literal.
fn parse_potential(v: &Value, path: &str) -> Result<HermitianForm, ProblemError> {
    match v {
        Value::String(src) => {
            let series =
                parse_polarized(src, u32::MAX).map_err(|e| schema_err(path, e.to_string()))?;
            form_from_series_data(&series, path)
        }
        Value::Array(terms) => {
            let mut n = 1usize;
            let mut parsed = Vec::new();
            for (i, t) in terms.iter().enumerate() {
                let p = format!("{path}[{i}]");
                let obj = t
                    .as_object()
                    .ok_or_else(|| schema_err(&p, "term must be an object"))?;
                let z_exp = exponent_list(
                    obj.get("z_exp")
                        .ok_or_else(|| schema_err(&p, "missing z_exp"))?,
                    &format!("{p}.z_exp"),
                )?;
                let xi_exp = exponent_list(
                    obj.get("xi_exp")
                        .ok_or_else(|| schema_err(&p, "missing xi_exp"))?,
                    &format!("{p}.xi_exp"),
                )?;
                if z_exp.len() != xi_exp.len() {
                    return Err(schema_err(&p, "z_exp and xi_exp lengths differ"));
                }
                let coeff = obj
                    .get("coeff")
                    .and_then(Value::as_str)
                    .ok_or_else(|| schema_err(&p, "missing coeff string"))?;
                let coeff = parse_rat(coeff, &format!("{p}.coeff"))?;
                n = n.max(z_exp.len());
                parsed.push((z_exp, xi_exp, coeff));
            }
            let mut series = isokit::series::PolarizedSeries::zero(n, u32::MAX);
            for (mut z_exp, mut xi_exp, coeff) in parsed {
                z_exp.resize(n, 0);
                xi_exp.resize(n, 0);
                series.add_term(Exponents { z_exp, xi_exp }, coeff);
            }
            form_from_series_data(&series, path)
        }
        _ => Err(schema_err(
            path,
            "potential must be a string or a term array",
        )),
    }
}

fn form_from_series_data(
    series: &isokit::series::PolarizedSeries,
    path: &str,
) -> Result<HermitianForm, ProblemError> {
    let mut entries = std::collections::BTreeMap::new();
    for (e, c) in series.terms() {
        entries.insert((e.z_exp.clone(), e.xi_exp.clone()), c.clone());
    }
    HermitianForm::from_entries(series.n(), &entries).map_err(|e| schema_err(path, e.to_string()))
}

/// A map: components given as pure-z expression strings or term lists
/// with optional `sqrt` tags.
fn parse_map(v: &Value, path: &str) -> Result<MapTuple, ProblemError> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema_err(path, "map must be an array of components"))?;
    let mut n = 1usize;
    let mut comps: Vec<MapComponent> = Vec::new();
    for (i, comp) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        match comp {
            Value::String(src) => {
                let series =
                    parse_polarized(src, u32::MAX).map_err(|e| schema_err(&p, e.to_string()))?;
                let mut terms = std::collections::BTreeMap::new();
                for (e, c) in series.terms() {
                    if e.xi_exp.iter().any(|&x| x > 0) {
                        return Err(schema_err(&p, "map components must not use xi variables"));
                    }
                    terms.insert(e.z_exp.clone(), MapCoeff::rational(c.clone()));
                }
                n = n.max(series.n());
                comps.push(MapComponent { terms });
            }
            Value::Array(term_list) => {
                let mut terms = std::collections::BTreeMap::new();
                for (j, t) in term_list.iter().enumerate() {
                    let q = format!("{p}[{j}]");
                    let obj = t
                        .as_object()
                        .ok_or_else(|| schema_err(&q, "term must be an object"))?;
                    let z_exp = exponent_list(
                        obj.get("z_exp")
                            .ok_or_else(|| schema_err(&q, "missing z_exp"))?,
                        &format!("{q}.z_exp"),
                    )?;
                    let coeff = obj
                        .get("coeff")
                        .and_then(Value::as_str)
                        .ok_or_else(|| schema_err(&q, "missing coeff string"))?;
                    let coeff = parse_rat(coeff, &format!("{q}.coeff"))?;
                    let sqrt = match obj.get("sqrt") {
                        None => None,
                        Some(s) => {
                            let s = s
                                .as_str()
                                .ok_or_else(|| schema_err(&q, "sqrt must be a string"))?;
                            Some(parse_rat(s, &format!("{q}.sqrt"))?)
                        }
                    };
                    n = n.max(z_exp.len());
                    terms.insert(z_exp, MapCoeff::new(coeff, sqrt));
                }
                comps.push(MapComponent { terms });
            }
            _ => return Err(schema_err(&p, "component must be a string or a term array")),
        }
    }
    // pad exponent vectors to the common dimension
    let comps = comps
        .into_iter()
        .map(|c| MapComponent {
            terms: c
                .terms
                .into_iter()
                .map(|(mut e, v)| {
                    e.resize(n, 0);
                    (e, v)
                })
                .collect(),
        })
        .collect();
    Ok(MapTuple::new(n, comps))
}

fn parse_center(v: &Value, path: &str) -> Result<Center, ProblemError> {
    let s = v
        .as_str()
        .ok_or_else(|| schema_err(path, "center must be a string (`p/q` or `inf`)"))?;
    if s == "inf" || s == "infinity" {
        return Ok(Center::Infinity);
    }
    Ok(Center::Rational(parse_rat(s, path)?))
}

fn parse_loop(v: &Value, path: &str) -> Result<LoopShape, ProblemError> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema_err(path, "loop must be an object"))?;
    if let Some(circle) = obj.get("circle") {
        let c = circle
            .as_object()
            .ok_or_else(|| schema_err(&format!("{path}.circle"), "must be an object"))?;
        let center = c
            .get("center")
            .ok_or_else(|| schema_err(&format!("{path}.circle"), "missing center"))?;
        let arr = center
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| schema_err(&format!("{path}.circle.center"), "must be [re, im]"))?;
        let re = parse_rat(
            arr[0].as_str().ok_or_else(|| {
                schema_err(&format!("{path}.circle.center[0]"), "must be a string")
            })?,
            &format!("{path}.circle.center[0]"),
        )?;
        let im = parse_rat(
            arr[1].as_str().ok_or_else(|| {
                schema_err(&format!("{path}.circle.center[1]"), "must be a string")
            })?,
            &format!("{path}.circle.center[1]"),
        )?;
        let radius = parse_rat(
            c.get("radius").and_then(Value::as_str).ok_or_else(|| {
                schema_err(&format!("{path}.circle.radius"), "missing radius string")
            })?,
            &format!("{path}.circle.radius"),
        )?;
        return Ok(LoopShape::Circle {
            center: (re, im),
            radius,
        });
    }
    if let Some(loci) = obj.get("loci") {
        let indices: Vec<usize> = loci
            .as_array()
            .ok_or_else(|| schema_err(&format!("{path}.loci"), "must be an array"))?
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| schema_err(&format!("{path}.loci[{i}]"), "must be an index"))
            })
            .collect::<Result<_, _>>()?;
        let bp = obj
            .get("basepoint")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| schema_err(&format!("{path}.basepoint"), "missing [re, im]"))?;
        let re = parse_rat(
            bp[0]
                .as_str()
                .ok_or_else(|| schema_err(&format!("{path}.basepoint[0]"), "must be a string"))?,
            &format!("{path}.basepoint[0]"),
        )?;
        let im = parse_rat(
            bp[1]
                .as_str()
                .ok_or_else(|| schema_err(&format!("{path}.basepoint[1]"), "must be a string"))?,
            &format!("{path}.basepoint[1]"),
        )?;
        return Ok(LoopShape::Loci {
            basepoint: (re, im),
            indices,
        });
    }
    Err(schema_err(path, "loop must contain `circle` or `loci`"))
}

fn parse_instance(v: &Value, basis: &Arc<QBasis>, path: &str) -> Result<Instance, ProblemError> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema_err(path, "instance must be an object"))?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("unnamed")
        .to_string();
    let scalar_list = |key: &str| -> Result<Option<Vec<QModReal>>, ProblemError> {
        obj.get(key)
            .map(|v| parse_scalar_list(v, basis, &format!("{path}.{key}")))
            .transpose()
    };
    let potential = |key: &str| -> Result<Option<HermitianForm>, ProblemError> {
        obj.get(key)
            .map(|v| parse_potential(v, &format!("{path}.{key}")))
            .transpose()
    };
    let uints = |key: &str| -> Result<Option<Vec<u32>>, ProblemError> {
        obj.get(key)
            .map(|v| parse_uint_list(v, &format!("{path}.{key}")))
            .transpose()
    };
    let factors = |key: &str| -> Result<Option<Vec<WeightedPotential>>, ProblemError> {
        let Some(v) = obj.get(key) else {
            return Ok(None);
        };
        let arr = v
            .as_array()
            .ok_or_else(|| schema_err(&format!("{path}.{key}"), "must be an array"))?;
        let mut out = Vec::new();
        for (i, f) in arr.iter().enumerate() {
            let p = format!("{path}.{key}[{i}]");
            let fo = f
                .as_object()
                .ok_or_else(|| schema_err(&p, "factor must be an object"))?;
            let weight = parse_scalar(
                fo.get("weight")
                    .ok_or_else(|| schema_err(&p, "missing weight"))?,
                basis,
                &format!("{p}.weight"),
            )?;
            let form = parse_potential(
                fo.get("potential")
                    .ok_or_else(|| schema_err(&p, "missing potential"))?,
                &format!("{p}.potential"),
            )?;
            out.push(WeightedPotential { weight, form });
        }
        Ok(Some(out))
    };

    let poly = obj
        .get("poly")
        .map(|v| -> Result<AlgebraicFunction, ProblemError> {
            let src = v
                .as_str()
                .ok_or_else(|| schema_err(&format!("{path}.poly"), "must be a string"))?;
            parse_algebraic(src).map_err(|e| schema_err(&format!("{path}.poly"), e.to_string()))
        })
        .transpose()?;

    Ok(Instance {
        name,
        mu: scalar_list("mu")?,
        lambda: scalar_list("lambda")?,
        r: obj
            .get("r")
            .map(|v| parse_scalar(v, basis, &format!("{path}.r")))
            .transpose()?,
        h: potential("h")?,
        f_factors: factors("f_factors")?,
        g_factors: factors("g_factors")?,
        potential: potential("potential")?,
        p: potential("p")?,
        poly,
        center: obj
            .get("center")
            .map(|v| parse_center(v, &format!("{path}.center")))
            .transpose()?,
        point: obj
            .get("point")
            .map(|v| parse_center(v, &format!("{path}.point")))
            .transpose()?,
        terms: obj
            .get("terms")
            .map(|v| {
                v.as_u64().map(|u| u as usize).ok_or_else(|| {
                    schema_err(&format!("{path}.terms"), "must be a nonnegative integer")
                })
            })
            .transpose()?,
        loop_shape: obj
            .get("loop")
            .map(|v| parse_loop(v, &format!("{path}.loop")))
            .transpose()?,
        m: uints("m")?,
        n: uints("n")?,
        m_prime: uints("m_prime")?,
        n_prime: uints("n_prime")?,
        f: obj
            .get("f")
            .map(|v| parse_map(v, &format!("{path}.f")))
            .transpose()?,
    })
}

// ---- canonical printing ----

fn scalar_value(x: &QModReal) -> Value {
    Value::Array(
        x.coords()
            .iter()
            .map(|c| Value::String(format_rational(c)))
            .collect(),
    )
}

fn form_value(form: &HermitianForm) -> Value {
    let mut terms = Vec::new();
    for ((a, b), c) in form.entries() {
        terms.push(json!({
            "z_exp": a,
            "xi_exp": b,
            "coeff": format_rational(&c),
        }));
    }
    Value::Array(terms)
}

fn map_value(map: &MapTuple) -> Value {
    let comps: Vec<Value> = map
        .components
        .iter()
        .map(|c| {
            Value::Array(
                c.terms
                    .iter()
                    .map(|(e, coeff)| {
                        let mut obj = Map::new();
                        obj.insert("z_exp".into(), json!(e));
                        obj.insert(
                            "coeff".into(),
                            Value::String(format_rational(&coeff.rational)),
                        );
                        if let Some(q) = &coeff.sqrt {
                            obj.insert("sqrt".into(), Value::String(format_rational(q)));
                        }
                        Value::Object(obj)
                    })
                    .collect(),
            )
        })
        .collect();
    Value::Array(comps)
}

fn poly_string(f: &AlgebraicFunction) -> String {
    let mut parts = Vec::new();
    for (j, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coeff = format!("({})", c.to_display("z"));
        let term = match j {
            0 => coeff,
            1 => format!("{coeff}*Y"),
            _ => format!("{coeff}*Y^{j}"),
        };
        parts.push(term);
    }
    parts.join(" + ")
}

fn center_value(c: &Center) -> Value {
    Value::String(match c {
        Center::Rational(r) => format_rational(r),
        Center::Infinity => "inf".to_string(),
    })
}

fn loop_value(l: &LoopShape) -> Value {
    match l {
        LoopShape::Circle { center, radius } => json!({
            "circle": {
                "center": [format_rational(&center.0), format_rational(&center.1)],
                "radius": format_rational(radius),
            }
        }),
        LoopShape::Loci { basepoint, indices } => json!({
            "loci": indices,
            "basepoint": [format_rational(&basepoint.0), format_rational(&basepoint.1)],
        }),
    }
}

/// Canonical JSON serialization; reparsing yields an equal structure.
pub fn print_problem(p: &ProblemFile) -> String {
    let basis: Vec<Value> = p
        .basis
        .entries()
        .iter()
        .map(|e| {
            json!({
                "label": e.label,
                "rule": match &e.refiner {
                    Refiner::Unit => "unit".to_string(),
                    Refiner::Sqrt(q) => format!("sqrt({})", format_rational(q)),
                },
            })
        })
        .collect();
    let mut options = Map::new();
    if let Some(o) = p.options.order {
        options.insert("order".into(), json!(o));
    }
    if let Some(b) = p.options.bound {
        options.insert("bound".into(), json!(b));
    }
    if let Some(t) = p.options.terms {
        options.insert("terms".into(), json!(t));
    }
    if p.options.allow_zero {
        options.insert("allow_zero".into(), json!(true));
    }
    let instances: Vec<Value> = p.instances.iter().map(instance_value).collect();
    let doc = json!({
        "schema": SCHEMA,
        "basis": basis,
        "options": Value::Object(options),
        "instances": instances,
    });
    serde_json::to_string_pretty(&doc).expect("serialization cannot fail")
}

fn instance_value(inst: &Instance) -> Value {
    let mut o = Map::new();
    o.insert("name".into(), json!(inst.name));
    if let Some(mu) = &inst.mu {
        o.insert(
            "mu".into(),
            Value::Array(mu.iter().map(scalar_value).collect()),
        );
    }
    if let Some(lambda) = &inst.lambda {
        o.insert(
            "lambda".into(),
            Value::Array(lambda.iter().map(scalar_value).collect()),
        );
    }
    if let Some(r) = &inst.r {
        o.insert("r".into(), scalar_value(r));
    }
    if let Some(h) = &inst.h {
        o.insert("h".into(), form_value(h));
    }
    for (key, factors) in [
        ("f_factors", &inst.f_factors),
        ("g_factors", &inst.g_factors),
    ] {
        if let Some(fs) = factors {
            o.insert(
                key.into(),
                Value::Array(
                    fs.iter()
                        .map(|f| {
                            json!({
                                "weight": scalar_value(&f.weight),
                                "potential": form_value(&f.form),
                            })
                        })
                        .collect(),
                ),
            );
        }
    }
    if let Some(p) = &inst.potential {
        o.insert("potential".into(), form_value(p));
    }
    if let Some(p) = &inst.p {
        o.insert("p".into(), form_value(p));
    }
    if let Some(poly) = &inst.poly {
        o.insert("poly".into(), Value::String(poly_string(poly)));
    }
    if let Some(c) = &inst.center {
        o.insert("center".into(), center_value(c));
    }
    if let Some(c) = &inst.point {
        o.insert("point".into(), center_value(c));
    }
    if let Some(t) = inst.terms {
        o.insert("terms".into(), json!(t));
    }
    if let Some(l) = &inst.loop_shape {
        o.insert("loop".into(), loop_value(l));
    }
    for (key, list) in [
        ("m", &inst.m),
        ("n", &inst.n),
        ("m_prime", &inst.m_prime),
        ("n_prime", &inst.n_prime),
    ] {
        if let Some(l) = list {
            o.insert(key.into(), json!(l));
        }
    }
    if let Some(f) = &inst.f {
        o.insert("f".into(), map_value(f));
    }
    Value::Object(o)
}
