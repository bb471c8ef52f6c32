//! JSON documents for priorities, profiles, matchings, subdomains and
//! classifications.
//!
//! Applicants are written as letters (`"a"`, `"b"`, ...) and positions as
//! 1-based numbers; numeric strings are accepted for positions on input.

use serde_json::{json, Map, Value};

use crate::classify::{Classification, Verdict};
use crate::error::{Error, Result};
use crate::market::{Matching, PreferenceProfile, PrioritySet};
use crate::order::{applicant_name, Order};
use crate::witness::{Evidence, Subdomain};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'v>(doc: &'v Value, key: &str) -> Result<&'v Value> {
    doc.get(key).ok_or_else(|| parse_err(format!("missing key \"{key}\"")))
}

fn array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what} must be an array")))
}

fn declared_n(doc: &Value) -> Result<usize> {
    field(doc, "n")?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| parse_err("\"n\" must be a non-negative integer"))
}

fn applicant_index(v: &Value, n: usize) -> Result<usize> {
    let s = v.as_str().ok_or_else(|| parse_err(format!("applicant names must be strings, got {v}")))?;
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() && ((c as u8 - b'a') as usize) < n => Ok((c as u8 - b'a') as usize),
        _ => Err(parse_err(format!("unknown applicant \"{s}\" for n = {n}"))),
    }
}

fn position_index(v: &Value, n: usize) -> Result<usize> {
    let x = match v {
        Value::Number(num) => num.as_u64(),
        Value::String(s) => s.parse::<u64>().ok(),
        _ => None,
    }
    .ok_or_else(|| parse_err(format!("positions must be 1-based numbers, got {v}")))?;
    if x == 0 || x as usize > n {
        return Err(parse_err(format!("position {x} out of range 1..={n}")));
    }
    Ok(x as usize - 1)
}

fn check_len(found: usize, n: usize, what: &str) -> Result<()> {
    if found != n {
        return Err(parse_err(format!("{what}: expected {n} entries, found {found}")));
    }
    Ok(())
}

pub fn priorities_to_value(q: &PrioritySet) -> Value {
    let lists: Vec<Vec<String>> = q
        .lists()
        .iter()
        .map(|l| l.ranking().map(|a| applicant_name(a).to_string()).collect())
        .collect();
    json!({ "n": q.n(), "priorities": lists })
}

pub fn priorities_to_json(q: &PrioritySet) -> String {
    priorities_to_value(q).to_string()
}

pub fn priorities_from_json(text: &str) -> Result<PrioritySet> {
    let doc: Value = serde_json::from_str(text)?;
    let n = declared_n(&doc)?;
    let rows = array(field(&doc, "priorities")?, "\"priorities\"")?;
    check_len(rows.len(), n, "\"priorities\"")?;
    let lists = rows
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let items = array(row, "a priority list")?;
            check_len(items.len(), n, &format!("priority list of position {}", x + 1))?;
            Order::new(items.iter().map(|v| applicant_index(v, n)).collect::<Result<Vec<_>>>()?)
        })
        .collect::<Result<Vec<_>>>()?;
    PrioritySet::new(lists)
}

fn position_list(o: &Order) -> Vec<usize> {
    o.ranking().map(|x| x + 1).collect()
}

fn parse_positions(v: &Value, n: usize, what: &str) -> Result<Order> {
    let items = array(v, what)?;
    check_len(items.len(), n, what)?;
    Order::new(items.iter().map(|v| position_index(v, n)).collect::<Result<Vec<_>>>()?)
}

pub fn profile_to_value(p: &PreferenceProfile) -> Value {
    let prefs: Vec<Vec<usize>> = p.prefs().iter().map(position_list).collect();
    json!({ "n": p.n(), "preferences": prefs })
}

pub fn profile_to_json(p: &PreferenceProfile) -> String {
    profile_to_value(p).to_string()
}

pub fn profile_from_json(text: &str) -> Result<PreferenceProfile> {
    let doc: Value = serde_json::from_str(text)?;
    let n = declared_n(&doc)?;
    let rows = array(field(&doc, "preferences")?, "\"preferences\"")?;
    check_len(rows.len(), n, "\"preferences\"")?;
    let prefs = rows
        .iter()
        .enumerate()
        .map(|(a, row)| parse_positions(row, n, &format!("preferences of applicant {}", applicant_name(a))))
        .collect::<Result<Vec<_>>>()?;
    PreferenceProfile::new(prefs)
}

pub fn matching_to_value(m: &Matching) -> Value {
    let assignment: Map<String, Value> = (0..m.n())
        .map(|a| (applicant_name(a).to_string(), json!(m.position_of(a) + 1)))
        .collect();
    json!({ "n": m.n(), "assignment": assignment })
}

pub fn matching_to_json(m: &Matching) -> String {
    matching_to_value(m).to_string()
}

pub fn matching_from_json(text: &str) -> Result<Matching> {
    let doc: Value = serde_json::from_str(text)?;
    let n = declared_n(&doc)?;
    let assignment = field(&doc, "assignment")?
        .as_object()
        .ok_or_else(|| parse_err("\"assignment\" must be an object"))?;
    check_len(assignment.len(), n, "\"assignment\"")?;
    let mut positions = vec![usize::MAX; n];
    for (name, x) in assignment {
        let a = applicant_index(&Value::String(name.clone()), n)?;
        positions[a] = position_index(x, n)?;
    }
    Matching::from_applicant_positions(positions)
}

pub fn subdomain_to_value(d: &Subdomain) -> Value {
    let types: Vec<Vec<Vec<usize>>> = d.types().iter().map(|l| l.iter().map(position_list).collect()).collect();
    json!({ "n": d.n(), "types": types })
}

pub fn subdomain_to_json(d: &Subdomain) -> String {
    subdomain_to_value(d).to_string()
}

pub fn subdomain_from_json(text: &str) -> Result<Subdomain> {
    let doc: Value = serde_json::from_str(text)?;
    let n = declared_n(&doc)?;
    let rows = array(field(&doc, "types")?, "\"types\"")?;
    check_len(rows.len(), n, "\"types\"")?;
    let types = rows
        .iter()
        .enumerate()
        .map(|(a, list)| {
            array(list, "a type list")?
                .iter()
                .map(|row| parse_positions(row, n, &format!("type of applicant {}", applicant_name(a))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Subdomain::new(types)
}

pub fn evidence_to_value(e: &Evidence) -> Value {
    json!({
        "applicant": applicant_name(e.applicant).to_string(),
        "type": e.type_index + 1,
        "truthful": profile_to_value(&e.truthful),
        "deviation": profile_to_value(&e.deviation),
    })
}

fn names(applicants: &[usize]) -> Vec<String> {
    applicants.iter().map(|&a| applicant_name(a).to_string()).collect()
}

fn one_based(positions: &[usize]) -> Vec<usize> {
    positions.iter().map(|x| x + 1).collect()
}

pub fn classification_to_value(c: &Classification) -> Value {
    let verdict = match c.verdict {
        Verdict::LimitedCyclic => "limited_cyclic",
        Verdict::NotLimitedCyclic => "not_limited_cyclic",
    };
    let mut doc = Map::new();
    doc.insert("verdict".into(), json!(verdict));
    if let Some(blocks) = &c.partition {
        doc.insert("blocks".into(), json!(blocks.iter().map(|b| names(b)).collect::<Vec<_>>()));
        let labelings: Vec<Value> = c
            .block_labelings
            .iter()
            .map(|(block, l)| {
                json!({
                    "block": block + 1,
                    "applicants": names(&l.applicants),
                    "x": one_based(&l.x_positions),
                    "u": l.u_position + 1,
                    "v": l.v_position + 1,
                })
            })
            .collect();
        doc.insert("labelings".into(), json!(labelings));
    }
    if let Some(w) = &c.witness {
        doc.insert(
            "witness".into(),
            json!({
                "pattern": w.pattern().letter.to_string(),
                "label": w.pattern().label(),
                "applicants": names(w.restriction.applicants()),
                "positions": one_based(w.restriction.positions()),
            }),
        );
    }
    Value::Object(doc)
}
