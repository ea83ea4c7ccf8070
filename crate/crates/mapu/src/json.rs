//! JSON reading and writing for instances, variant fixtures, and scheduling
//! instances.
//!
//! Parsers walk [`serde_json::Value`] trees by hand so every diagnostic can
//! name the exact field that failed (`suppliers[2].base_cost`). Numeric
//! values are exact end to end: a JSON number is accepted only when it is an
//! integer; everything else must be a string in one of the exact forms
//! [`Rational`] parses (`"0.9"`, `"9/10"`, `"-3"`), because float literals
//! like `0.9` have no exact binary representation. Serializers emit those
//! same exact strings, so a parse → serialize → parse round trip is the
//! identity.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::instance::{Customer, Instance, Supplier};
use crate::rational::Rational;
use crate::scheduling::SchedulingInstance;
use crate::variants::{DualUpgradeSpec, EdgeMask, PartitionBudget, Variant};

/// A fixture file: a named instance plus an optional variant constraint
/// (`mask`, `groups`, or `customer_upgrades`).
#[derive(Clone, Debug, PartialEq)]
pub struct FixtureFile {
    pub name: String,
    pub instance: Instance,
    pub variant: Variant,
}

fn parse_error(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), message: message.into() }
}

fn parse_root(text: &str, source: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_error(source, e.to_string()))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_error(path, "expected a JSON object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_error(path, "expected a JSON array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| parse_error(path, "expected a JSON string"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| parse_error(path, "expected a non-negative integer"))
}

/// Exact rational: an integral JSON number, or a string `"p/q"` / decimal.
fn as_rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => {
            s.parse().map_err(|e| parse_error(path, format!("{e} (from {s:?})")))
        }
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from(i))
            } else {
                Err(parse_error(
                    path,
                    format!(
                        "non-integer number {n} cannot be read exactly; \
                         write it as a string like \"0.9\" or \"9/10\""
                    ),
                ))
            }
        }
        _ => Err(parse_error(path, "expected an integer or an exact rational string")),
    }
}

fn require<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| parse_error(path, format!("missing field `{key}`")))
}

fn reject_unknown(m: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in m.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(parse_error(
                path,
                format!("unknown field `{key}` (expected one of: {})", allowed.join(", ")),
            ));
        }
    }
    Ok(())
}

const VARIANT_KEYS: [&str; 3] = ["mask", "groups", "customer_upgrades"];

fn parse_instance_object(m: &Map<String, Value>, source: &str) -> Result<Instance> {
    let mut suppliers = Vec::new();
    for (i, v) in as_array(require(m, "suppliers", source)?, &format!("{source}:suppliers"))?
        .iter()
        .enumerate()
    {
        let path = format!("{source}:suppliers[{i}]");
        let s = as_object(v, &path)?;
        reject_unknown(s, &["id", "base_cost", "upgraded_cost"], &path)?;
        suppliers.push(Supplier {
            id: as_str(require(s, "id", &path)?, &format!("{path}.id"))?.to_string(),
            base_cost: as_rational(
                require(s, "base_cost", &path)?,
                &format!("{path}.base_cost"),
            )?,
            upgraded_cost: as_rational(
                require(s, "upgraded_cost", &path)?,
                &format!("{path}.upgraded_cost"),
            )?,
        });
    }
    let mut customers = Vec::new();
    for (j, v) in as_array(require(m, "customers", source)?, &format!("{source}:customers"))?
        .iter()
        .enumerate()
    {
        let path = format!("{source}:customers[{j}]");
        let c = as_object(v, &path)?;
        reject_unknown(c, &["id", "demand"], &path)?;
        customers.push(Customer {
            id: as_str(require(c, "id", &path)?, &format!("{path}.id"))?.to_string(),
            demand: as_rational(require(c, "demand", &path)?, &format!("{path}.demand"))?,
        });
    }
    let k = as_usize(require(m, "k", source)?, &format!("{source}:k"))?;
    Instance::new(suppliers, customers, k)
}

/// Parse a core-model instance. `source` labels diagnostics (usually the
/// file path). A fixture's `name` field is tolerated; the variant-constraint
/// keys are not — point the variant tooling at those files instead.
pub fn parse_instance(text: &str, source: &str) -> Result<Instance> {
    let root = parse_root(text, source)?;
    let m = as_object(&root, source)?;
    for key in VARIANT_KEYS {
        if m.contains_key(key) {
            return Err(parse_error(
                source,
                format!(
                    "field `{key}` marks a variant fixture; the solver handles the core model \
                     only — use verify-fixtures for this file"
                ),
            ));
        }
    }
    reject_unknown(m, &["name", "suppliers", "customers", "k"], source)?;
    parse_instance_object(m, source)
}

/// Parse a fixture file: instance fields plus `name` and at most one of
/// `mask`, `groups`, `customer_upgrades`.
pub fn parse_fixture(text: &str, source: &str) -> Result<FixtureFile> {
    let root = parse_root(text, source)?;
    let m = as_object(&root, source)?;
    reject_unknown(
        m,
        &["name", "suppliers", "customers", "k", "mask", "groups", "customer_upgrades"],
        source,
    )?;
    let present: Vec<&str> =
        VARIANT_KEYS.iter().copied().filter(|k| m.contains_key(*k)).collect();
    if present.len() > 1 {
        return Err(parse_error(
            source,
            format!("at most one variant key is allowed, found: {}", present.join(", ")),
        ));
    }
    let name = as_str(require(m, "name", source)?, &format!("{source}:name"))?.to_string();
    let instance = parse_instance_object(m, source)?;
    let variant = match present.first().copied() {
        None => Variant::Plain,
        Some("mask") => {
            let path = format!("{source}:mask");
            let mut pairs = Vec::new();
            for (i, v) in as_array(&m["mask"], &path)?.iter().enumerate() {
                let path = format!("{path}[{i}]");
                let pair = as_array(v, &path)?;
                if pair.len() != 2 {
                    return Err(parse_error(&path, "expected [supplier_id, customer_id]"));
                }
                pairs.push((
                    as_str(&pair[0], &format!("{path}[0]"))?.to_string(),
                    as_str(&pair[1], &format!("{path}[1]"))?.to_string(),
                ));
            }
            let mask = EdgeMask::new(pairs).map_err(|e| parse_error(&path, e.to_string()))?;
            mask.validate(&instance).map_err(|e| parse_error(&path, e.to_string()))?;
            Variant::Masked(mask)
        }
        Some("groups") => {
            let path = format!("{source}:groups");
            let mut groups = Vec::new();
            for (i, v) in as_array(&m["groups"], &path)?.iter().enumerate() {
                let path = format!("{path}[{i}]");
                let g = as_object(v, &path)?;
                reject_unknown(g, &["suppliers", "budget"], &path)?;
                let ids = as_array(require(g, "suppliers", &path)?, &format!("{path}.suppliers"))?
                    .iter()
                    .enumerate()
                    .map(|(t, v)| {
                        Ok(as_str(v, &format!("{path}.suppliers[{t}]"))?.to_string())
                    })
                    .collect::<Result<_>>()?;
                let budget =
                    as_usize(require(g, "budget", &path)?, &format!("{path}.budget"))?;
                groups.push((ids, budget));
            }
            let budgets =
                PartitionBudget::new(groups).map_err(|e| parse_error(&path, e.to_string()))?;
            budgets.validate(&instance).map_err(|e| parse_error(&path, e.to_string()))?;
            Variant::Partition(budgets)
        }
        Some("customer_upgrades") => {
            let path = format!("{source}:customer_upgrades");
            let map = as_object(&m["customer_upgrades"], &path)?
                .iter()
                .map(|(id, v)| Ok((id.clone(), as_rational(v, &format!("{path}.{id}"))?)))
                .collect::<Result<_>>()?;
            let spec = DualUpgradeSpec::new(map, instance.k());
            spec.validate(&instance).map_err(|e| parse_error(&path, e.to_string()))?;
            Variant::Dual(spec)
        }
        Some(other) => unreachable!("unhandled variant key `{other}`"),
    };
    Ok(FixtureFile { name, instance, variant })
}

/// Parse a scheduling instance:
/// `{"machines":[{"speed":…}], "jobs":[{"p":…, "q":…}], "k":…}`.
pub fn parse_scheduling(text: &str, source: &str) -> Result<SchedulingInstance> {
    let root = parse_root(text, source)?;
    let m = as_object(&root, source)?;
    reject_unknown(m, &["name", "machines", "jobs", "k"], source)?;
    let mut speeds = Vec::new();
    for (i, v) in as_array(require(m, "machines", source)?, &format!("{source}:machines"))?
        .iter()
        .enumerate()
    {
        let path = format!("{source}:machines[{i}]");
        let mach = as_object(v, &path)?;
        reject_unknown(mach, &["speed"], &path)?;
        speeds.push(as_rational(require(mach, "speed", &path)?, &format!("{path}.speed"))?);
    }
    let mut jobs = Vec::new();
    for (j, v) in
        as_array(require(m, "jobs", source)?, &format!("{source}:jobs"))?.iter().enumerate()
    {
        let path = format!("{source}:jobs[{j}]");
        let job = as_object(v, &path)?;
        reject_unknown(job, &["p", "q"], &path)?;
        jobs.push((
            as_rational(require(job, "p", &path)?, &format!("{path}.p"))?,
            as_rational(require(job, "q", &path)?, &format!("{path}.q"))?,
        ));
    }
    let k = as_usize(require(m, "k", source)?, &format!("{source}:k"))?;
    SchedulingInstance::new(speeds, jobs, k)
}

fn instance_fields(instance: &Instance, out: &mut Map<String, Value>) {
    out.insert(
        "suppliers".into(),
        Value::Array(
            instance
                .suppliers()
                .iter()
                .map(|s| {
                    json!({
                        "id": s.id,
                        "base_cost": s.base_cost.to_string(),
                        "upgraded_cost": s.upgraded_cost.to_string(),
                    })
                })
                .collect(),
        ),
    );
    out.insert(
        "customers".into(),
        Value::Array(
            instance
                .customers()
                .iter()
                .map(|c| json!({"id": c.id, "demand": c.demand.to_string()}))
                .collect(),
        ),
    );
    out.insert("k".into(), json!(instance.k()));
}

/// Serialize an instance with exact rational strings.
pub fn instance_to_value(instance: &Instance) -> Value {
    let mut out = Map::new();
    instance_fields(instance, &mut out);
    Value::Object(out)
}

/// Serialize a fixture file; inverse of [`parse_fixture`].
pub fn fixture_to_value(fixture: &FixtureFile) -> Value {
    let mut out = Map::new();
    out.insert("name".into(), json!(fixture.name));
    instance_fields(&fixture.instance, &mut out);
    match &fixture.variant {
        Variant::Plain => {}
        Variant::Masked(mask) => {
            out.insert(
                "mask".into(),
                Value::Array(mask.iter().map(|(s, c)| json!([s, c])).collect()),
            );
        }
        Variant::Partition(budgets) => {
            out.insert(
                "groups".into(),
                Value::Array(
                    budgets
                        .groups()
                        .iter()
                        .map(|(ids, budget)| {
                            json!({
                                "suppliers": ids.iter().collect::<Vec<_>>(),
                                "budget": budget,
                            })
                        })
                        .collect(),
                ),
            );
        }
        Variant::Dual(spec) => {
            out.insert(
                "customer_upgrades".into(),
                Value::Object(
                    spec.upgraded_demands()
                        .iter()
                        .map(|(id, d)| (id.clone(), json!(d.to_string())))
                        .collect(),
                ),
            );
        }
    }
    Value::Object(out)
}

/// Serialize a scheduling instance; inverse of [`parse_scheduling`].
pub fn scheduling_to_value(instance: &SchedulingInstance) -> Value {
    json!({
        "machines": instance
            .speeds()
            .iter()
            .map(|s| json!({"speed": s.to_string()}))
            .collect::<Vec<_>>(),
        "jobs": instance
            .jobs()
            .iter()
            .map(|(p, q)| json!({"p": p.to_string(), "q": q.to_string()}))
            .collect::<Vec<_>>(),
        "k": instance.k(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{inst, r};
    use crate::variants::builtin_fixtures;

    #[test]
    fn parses_a_minimal_instance() {
        let text = r#"{
            "suppliers": [
                {"id": "s1", "base_cost": 1, "upgraded_cost": "0"},
                {"id": "s2", "base_cost": "3", "upgraded_cost": 2}
            ],
            "customers": [{"id": "c1", "demand": 1}, {"id": "c2", "demand": "1"}],
            "k": 1
        }"#;
        assert_eq!(parse_instance(text, "mem").unwrap(), inst(&[(0, 1), (2, 3)], &[1, 1], 1));
    }

    #[test]
    fn accepts_exact_decimal_and_fraction_strings() {
        let text = r#"{
            "suppliers": [{"id": "s1", "base_cost": "2.5", "upgraded_cost": "9/10"}],
            "customers": [{"id": "c1", "demand": "0.9"}],
            "k": 0
        }"#;
        let i = parse_instance(text, "mem").unwrap();
        assert_eq!(i.suppliers()[0].base_cost, r("5/2"));
        assert_eq!(i.suppliers()[0].upgraded_cost, r("9/10"));
        assert_eq!(i.customers()[0].demand, r("9/10"));
    }

    #[test]
    fn diagnostics_name_the_failing_field() {
        let text = r#"{
            "suppliers": [{"id": "s1", "base_cost": 1, "upgraded_cost": 0.5}],
            "customers": [],
            "k": 0
        }"#;
        let err = parse_instance(text, "f.json").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("f.json:suppliers[0].upgraded_cost"),
            "diagnostic should name the field, got: {msg}"
        );
        assert!(msg.contains("0.9"), "diagnostic should suggest exact forms, got: {msg}");
    }

    #[test]
    fn missing_and_unknown_fields_are_reported() {
        let err =
            parse_instance(r#"{"suppliers": [], "customers": []}"#, "mem").unwrap_err();
        assert!(err.to_string().contains("missing field `k`"));
        let err = parse_instance(
            r#"{"suppliers": [], "customers": [], "k": 0, "budget": 3}"#,
            "mem",
        )
        .unwrap_err();
        assert!(err.to_string().contains("unknown field `budget`"));
    }

    #[test]
    fn instance_parser_rejects_variant_fixtures_with_guidance() {
        let f = builtin_fixtures().into_iter().find(|f| f.name == "noncomplete").unwrap();
        let text = fixture_to_value(&FixtureFile {
            name: f.name.clone(),
            instance: f.instance.clone(),
            variant: f.variant.clone(),
        })
        .to_string();
        let err = parse_instance(&text, "mem").unwrap_err();
        assert!(err.to_string().contains("verify-fixtures"), "got: {err}");
    }

    #[test]
    fn malformed_json_reports_line_and_column() {
        let err = parse_instance("{", "broken.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("broken.json") && msg.contains("line"), "got: {msg}");
    }

    #[test]
    fn every_builtin_fixture_round_trips() {
        for f in builtin_fixtures() {
            let file = FixtureFile {
                name: f.name.clone(),
                instance: f.instance.clone(),
                variant: f.variant.clone(),
            };
            let text = serde_json::to_string_pretty(&fixture_to_value(&file)).unwrap();
            let reparsed = parse_fixture(&text, "mem").unwrap();
            assert_eq!(reparsed, file, "fixture {} must round-trip", f.name);
        }
    }

    #[test]
    fn instance_round_trips() {
        for seed in 0..25 {
            let i = crate::generator::random_instance(seed, 6);
            let text = instance_to_value(&i).to_string();
            assert_eq!(parse_instance(&text, "mem").unwrap(), i);
        }
    }

    #[test]
    fn scheduling_round_trips() {
        for seed in 0..25 {
            let s = crate::generator::random_scheduling_instance(seed);
            let text = scheduling_to_value(&s).to_string();
            assert_eq!(parse_scheduling(&text, "mem").unwrap(), s);
        }
    }

    #[test]
    fn fixture_parser_rejects_two_variant_keys() {
        let text = r#"{
            "name": "x",
            "suppliers": [{"id": "s1", "base_cost": 1, "upgraded_cost": 0}],
            "customers": [{"id": "c1", "demand": 1}],
            "k": 1,
            "mask": [["s1", "c1"]],
            "groups": [{"suppliers": ["s1"], "budget": 1}]
        }"#;
        let err = parse_fixture(text, "mem").unwrap_err();
        assert!(err.to_string().contains("at most one variant key"), "got: {err}");
    }

    #[test]
    fn fixture_parser_validates_constraints_against_the_instance() {
        let text = r#"{
            "name": "x",
            "suppliers": [{"id": "s1", "base_cost": 1, "upgraded_cost": 0}],
            "customers": [{"id": "c1", "demand": 1}],
            "k": 1,
            "mask": [["s9", "c1"]]
        }"#;
        let err = parse_fixture(text, "mem").unwrap_err();
        assert!(err.to_string().contains("s9"), "got: {err}");
    }

    #[test]
    fn scheduling_parser_reports_paths() {
        let text = r#"{"machines": [{"speed": "0.5"}], "jobs": [{"p": 3, "q": "x"}], "k": 0}"#;
        let err = parse_scheduling(text, "s.json").unwrap_err();
        assert!(err.to_string().contains("s.json:jobs[0].q"), "got: {err}");
    }
}
