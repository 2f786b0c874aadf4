//! JSON family descriptions.
//!
//! ```json
//! {"explicit": [{"dirac": "0"}, {"uniform": {"a": "0", "b": "1"}}],
//!  "tails": [{"template": "mixture-escape", "a": "3/10",
//!             "base": {"dirac": "0"}, "t": "n", "horizon": 128}]}
//! ```
//!
//! Rationals are `"p/q"` strings; plain JSON integers are also accepted.

use cdf_compact::family::{FamilySpec, Locations, ParametricTail, Template};
use cdf_compact::rational::{int, one, parse_rational};
use cdf_compact::{Cdf, Rational};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const DEFAULT_HORIZON: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct SpecError {
    /// Location of the offending field, e.g. `tails[0].base.uniform.a`.
    pub path: String,
    pub message: String,
}

type Result<T> = std::result::Result<T, SpecError>;

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(SpecError {
        path: path.to_string(),
        message: message.into(),
    })
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let Some(map) = v.as_object() else {
        return fail(path, "expected an object");
    };
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return fail(
            &join(path, k),
            format!("unknown field (expected one of {})", allowed.join(", ")),
        );
    }
    Ok(map)
}

fn field<'a>(map: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    map.get(key).ok_or_else(|| SpecError {
        path: join(path, key),
        message: "missing field".into(),
    })
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| SpecError {
        path: path.to_string(),
        message: "expected a list".into(),
    })
}

fn rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => match parse_rational(s) {
            Some(r) => Ok(r),
            None => fail(path, format!("`{s}` is not a rational of the form p/q")),
        },
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(int(i)),
            None => fail(path, "floating point numbers are not accepted; write \"p/q\""),
        },
        _ => fail(path, "expected a rational as \"p/q\""),
    }
}

fn lib<T>(r: cdf_compact::Result<T>, path: &str) -> Result<T> {
    r.or_else(|e| fail(path, e.to_string()))
}

pub fn parse_cdf(v: &Value, path: &str) -> Result<Cdf> {
    let map = object(v, path, &["dirac", "uniform", "mixture", "shift", "convolve"])?;
    if map.len() != 1 {
        return fail(path, "expected exactly one of dirac, uniform, mixture, shift, convolve");
    }
    let (kind, body) = map.iter().next().expect("one entry");
    let here = join(path, kind);
    match kind.as_str() {
        "dirac" => Ok(Cdf::dirac(rational(body, &here)?)),
        "uniform" => {
            let m = object(body, &here, &["a", "b"])?;
            let a = rational(field(m, &here, "a")?, &join(&here, "a"))?;
            let b = rational(field(m, &here, "b")?, &join(&here, "b"))?;
            lib(Cdf::uniform(a, b), &here)
        }
        "mixture" => {
            let m = object(body, &here, &["weights", "parts"])?;
            let wpath = join(&here, "weights");
            let weights = array(field(m, &here, "weights")?, &wpath)?
                .iter()
                .enumerate()
                .map(|(i, w)| rational(w, &format!("{wpath}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let ppath = join(&here, "parts");
            let parts = array(field(m, &here, "parts")?, &ppath)?
                .iter()
                .enumerate()
                .map(|(i, p)| parse_cdf(p, &format!("{ppath}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            lib(Cdf::mixture(&weights, &parts), &here)
        }
        "shift" => {
            let m = object(body, &here, &["base", "t"])?;
            let base = parse_cdf(field(m, &here, "base")?, &join(&here, "base"))?;
            let t = rational(field(m, &here, "t")?, &join(&here, "t"))?;
            Ok(base.shift(&t))
        }
        "convolve" => {
            let m = object(body, &here, &["f", "g"])?;
            let f = parse_cdf(field(m, &here, "f")?, &join(&here, "f"))?;
            let g = parse_cdf(field(m, &here, "g")?, &join(&here, "g"))?;
            lib(f.convolve(&g), &here)
        }
        _ => unreachable!("keys checked above"),
    }
}

/// Escaping locations: `"n"`, `"<k>n"` (e.g. `"2n"`, `"3/2n"`) or an
/// explicit increasing list.
fn escaping_locations(v: &Value, path: &str) -> Result<Locations> {
    match v {
        Value::String(s) => {
            let Some(k) = s.trim().strip_suffix('n') else {
                return fail(path, format!("`{s}` is not of the form \"n\" or \"<k>n\""));
            };
            let step = if k.is_empty() {
                one()
            } else {
                parse_rational(k).ok_or_else(|| SpecError {
                    path: path.into(),
                    message: format!("bad multiplier `{k}`"),
                })?
            };
            lib(Locations::multiple(step), path)
        }
        Value::Array(items) => {
            let prefix = items
                .iter()
                .enumerate()
                .map(|(i, t)| rational(t, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            lib(Locations::explicit(prefix), path)
        }
        _ => fail(path, "expected \"n\", \"<k>n\" or a list of increasing locations"),
    }
}

/// Converging locations `"<k>/n"`, i.e. `t_n = k / n`.
fn converging_scale(v: &Value, path: &str) -> Result<Rational> {
    let s = v.as_str().unwrap_or_default();
    match s.trim().strip_suffix("/n").and_then(parse_rational) {
        Some(k) => Ok(k),
        None => fail(path, "expected locations of the form \"<k>/n\""),
    }
}

pub fn parse_tail(v: &Value, path: &str) -> Result<ParametricTail> {
    let map = object(v, path, &["template", "base", "a", "t", "horizon"])?;
    let tpath = join(path, "template");
    let Some(name) = field(map, path, "template")?.as_str() else {
        return fail(&tpath, "expected a template name");
    };
    let base = parse_cdf(field(map, path, "base")?, &join(path, "base"))?;
    let horizon = match map.get("horizon") {
        None => DEFAULT_HORIZON,
        Some(h) => match h.as_u64() {
            Some(h) if h > 0 => h as usize,
            _ => return fail(&join(path, "horizon"), "expected a positive integer"),
        },
    };
    let forbid = |key: &str| match map.contains_key(key) {
        true => fail(&join(path, key), format!("not used by template `{name}`")),
        false => Ok(()),
    };
    let t = || field(map, path, "t");
    let tp = join(path, "t");
    let template = match name {
        "constant" => {
            forbid("a")?;
            forbid("t")?;
            Template::Constant
        }
        "shift-escape" => {
            forbid("a")?;
            Template::ShiftEscape {
                locations: escaping_locations(t()?, &tp)?,
            }
        }
        "mixture-escape" => {
            let weight = rational(field(map, path, "a")?, &join(path, "a"))?;
            Template::MixtureEscape {
                weight,
                locations: escaping_locations(t()?, &tp)?,
            }
        }
        "shift-converge" => {
            forbid("a")?;
            Template::ShiftConverge {
                scale: converging_scale(t()?, &tp)?,
            }
        }
        other => {
            return fail(
                &tpath,
                format!("unknown template `{other}` (expected constant, shift-escape, mixture-escape, shift-converge)"),
            )
        }
    };
    lib(ParametricTail::new(template, base, horizon), path)
}

pub fn parse_family_value(v: &Value) -> Result<FamilySpec> {
    let map = object(v, "", &["explicit", "tails"])?;
    let explicit = match map.get("explicit") {
        None => vec![],
        Some(list) => array(list, "explicit")?
            .iter()
            .enumerate()
            .map(|(i, c)| parse_cdf(c, &format!("explicit[{i}]")))
            .collect::<Result<Vec<_>>>()?,
    };
    let tails = match map.get("tails") {
        None => vec![],
        Some(list) => array(list, "tails")?
            .iter()
            .enumerate()
            .map(|(i, t)| parse_tail(t, &format!("tails[{i}]")))
            .collect::<Result<Vec<_>>>()?,
    };
    lib(FamilySpec::new(explicit, tails), "(document)")
}

pub fn parse_family_spec(text: &str) -> Result<FamilySpec> {
    let v: Value = serde_json::from_str(text).or_else(|e| fail("(document)", format!("invalid JSON: {e}")))?;
    parse_family_value(&v)
}

fn r(x: &Rational) -> Value {
    Value::String(x.to_string())
}

/// A CDF as a mixture of atoms and uniform pieces.
pub fn cdf_to_json(f: &Cdf) -> Value {
    let mut weights = Vec::new();
    let mut parts = Vec::new();
    for j in f.jumps() {
        weights.push(r(&j.mass));
        parts.push(json!({ "dirac": r(&j.at) }));
    }
    for s in f.segments() {
        weights.push(r(&s.mass));
        parts.push(json!({ "uniform": { "a": r(&s.left), "b": r(&s.right) } }));
    }
    if parts.len() == 1 {
        return parts.pop().expect("one part");
    }
    json!({ "mixture": { "weights": weights, "parts": parts } })
}

fn locations_to_json(l: &Locations) -> Value {
    match l {
        Locations::Multiple(k) if *k == one() => json!("n"),
        Locations::Multiple(k) => Value::String(format!("{k}n")),
        Locations::Explicit(prefix) => Value::Array(prefix.iter().map(r).collect()),
    }
}

pub fn tail_to_json(t: &ParametricTail) -> Value {
    let mut m = Map::new();
    m.insert("template".into(), json!(t.template().name()));
    m.insert("base".into(), cdf_to_json(t.base()));
    match t.template() {
        Template::Constant => {}
        Template::ShiftEscape { locations } => {
            m.insert("t".into(), locations_to_json(locations));
        }
        Template::MixtureEscape { weight, locations } => {
            m.insert("a".into(), r(weight));
            m.insert("t".into(), locations_to_json(locations));
        }
        Template::ShiftConverge { scale } => {
            m.insert("t".into(), Value::String(format!("{scale}/n")));
        }
    }
    m.insert("horizon".into(), json!(t.horizon()));
    Value::Object(m)
}

pub fn family_to_json(f: &FamilySpec) -> Value {
    json!({
        "explicit": f.explicit.iter().map(cdf_to_json).collect::<Vec<_>>(),
        "tails": f.tails.iter().map(tail_to_json).collect::<Vec<_>>(),
    })
}

pub fn serialize_family_spec(f: &FamilySpec) -> String {
    serde_json::to_string_pretty(&family_to_json(f)).expect("JSON values always serialise")
}

#[cfg(test)]
mod tests {
    use super::*;
    use cdf_compact::rational::{ratio, zero};

    #[test]
    fn example_document() {
        let f = parse_family_spec(
            r#"{"tails":[{"template":"mixture-escape","a":"3/10","base":{"dirac":"0"},"t":"n","horizon":128}]}"#,
        )
        .unwrap();
        assert_eq!(f.tails.len(), 1);
        assert_eq!(f.tails[0].member(2).eval(&int(1)), ratio(7, 10));
    }

    #[test]
    fn constructors() {
        let f = parse_family_spec(
            r#"{"explicit":[
                {"uniform":{"a":0,"b":"1/2"}},
                {"mixture":{"weights":["1/2","1/2"],"parts":[{"dirac":"0"},{"dirac":1}]}},
                {"shift":{"base":{"dirac":"0"},"t":"-3/2"}},
                {"convolve":{"f":{"dirac":"1"},"g":{"uniform":{"a":"0","b":"1"}}}}]}"#,
        )
        .unwrap();
        assert_eq!(f.explicit[0], Cdf::uniform(zero(), ratio(1, 2)).unwrap());
        assert_eq!(f.explicit[2], Cdf::dirac(ratio(-3, 2)));
        assert_eq!(f.explicit[3], Cdf::uniform(one(), int(2)).unwrap());
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse_family_spec(r#"{"explicit":[{"uniform":{"a":0.5,"b":"1"}}]}"#).unwrap_err();
        assert_eq!(e.path, "explicit[0].uniform.a");
        let e = parse_family_spec(r#"{"tails":[{"template":"shift-escape","base":{"dirac":"0"},"t":["2","1"]}]}"#)
            .unwrap_err();
        assert_eq!(e.path, "tails[0].t");
        let e =
            parse_family_spec(r#"{"tails":[{"template":"mixture-escape","base":{"dirac":"0"},"t":"n"}]}"#).unwrap_err();
        assert_eq!(e.path, "tails[0].a");
        let e = parse_family_spec(r#"{"explicit":[], "extra": 1}"#).unwrap_err();
        assert_eq!(e.path, "extra");
        let e = parse_family_spec(r#"{"explicit":[]}"#).unwrap_err();
        assert_eq!(e.path, "(document)");
    }

    #[test]
    fn locations_forms() {
        let v = json!({"template":"shift-escape","base":{"dirac":"0"},"t":"3/2n","horizon":4});
        let t = parse_tail(&v, "t").unwrap();
        assert_eq!(t.member(2), Cdf::dirac(int(3)));
        assert_eq!(tail_to_json(&t), v);
        let v = json!({"template":"shift-converge","base":{"dirac":"0"},"t":"1/n","horizon":8});
        let t = parse_tail(&v, "t").unwrap();
        assert_eq!(t.member(4), Cdf::dirac(ratio(1, 4)));
        assert_eq!(tail_to_json(&t), v);
    }
}
