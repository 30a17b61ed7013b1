//! Parameter overrides addressed by parameter name.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::params::YarnParams;

#[derive(Debug, Clone, PartialEq)]
pub enum Override {
    Set(String, f64),
    Scale(String, f64),
}

impl Override {
    /// Parse `key=value` (set) or `key*=factor` (scale).
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse override '{spec}'"));
        if let Some((key, factor)) = spec.split_once("*=") {
            let f = factor.trim().parse().map_err(|_| bad())?;
            return Ok(Override::Scale(key.trim().to_string(), f));
        }
        let (key, value) = spec.split_once('=').ok_or_else(bad)?;
        let v = value.trim().parse().map_err(|_| bad())?;
        Ok(Override::Set(key.trim().to_string(), v))
    }

    fn key(&self) -> &str {
        match self {
            Override::Set(k, _) | Override::Scale(k, _) => k,
        }
    }
}

const INTEGER_KEYS: [&str; 3] = ["m", "n", "g"];

/// Flat `name -> value` view of every parameter.
pub fn to_flat(params: &YarnParams) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for v in [serde_json::to_value(&params.raw)?, serde_json::to_value(&params.fly)?] {
        if let Value::Object(m) = v {
            map.extend(m);
        }
    }
    Ok(map)
}

/// Rebuild parameters from a flat map, filling missing names from `base`.
pub fn from_flat(map: &Map<String, Value>, base: &YarnParams) -> Result<YarnParams> {
    let mut merged = to_flat(base)?;
    for (k, v) in map {
        if !merged.contains_key(k) {
            return Err(Error::invalid(format!("unknown parameter '{k}'")));
        }
        merged.insert(k.clone(), v.clone());
    }
    let value = Value::Object(merged);
    Ok(YarnParams {
        raw: serde_json::from_value(value.clone())?,
        fly: serde_json::from_value(value)?,
    })
}

pub fn apply_overrides(params: &YarnParams, overrides: &[Override]) -> Result<YarnParams> {
    let mut map = to_flat(params)?;
    for o in overrides {
        let key = o.key();
        let current = map
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::invalid(format!("unknown parameter '{key}'")))?;
        let next = match o {
            Override::Set(_, v) => *v,
            Override::Scale(_, f) => current * f,
        };
        let value = if INTEGER_KEYS.contains(&key) {
            if !(next >= 0.0) || next > u32::MAX as f64 {
                return Err(Error::invalid(format!("'{key}' must be a non-negative integer")));
            }
            Value::from(next.round() as u32)
        } else {
            serde_json::Number::from_f64(next)
                .map(Value::Number)
                .ok_or_else(|| Error::invalid(format!("'{key}' must be finite")))?
        };
        map.insert(key.to_string(), value);
    }
    from_flat(&map, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sampler::sample_yarn;

    #[test]
    fn parse_forms() {
        assert_eq!(Override::parse("alpha*=0.5").unwrap(), Override::Scale("alpha".into(), 0.5));
        assert_eq!(Override::parse("g=12").unwrap(), Override::Set("g".into(), 12.0));
        assert!(Override::parse("alpha").is_err());
        assert!(Override::parse("alpha=x").is_err());
    }

    #[test]
    fn halve_pitches_and_double_flyaways() {
        let (p, _) = sample_yarn(&mut RngStream::new(4));
        let edits = [
            Override::parse("alpha*=0.5").unwrap(),
            Override::parse("alpha_ply*=0.5").unwrap(),
            Override::parse("g*=2").unwrap(),
        ];
        let q = apply_overrides(&p, &edits).unwrap();
        assert_eq!(q.raw.alpha, p.raw.alpha * 0.5);
        assert_eq!(q.raw.alpha_ply, p.raw.alpha_ply * 0.5);
        assert_eq!(q.fly.g, p.fly.g * 2);
        assert_eq!(q.raw.r_x, p.raw.r_x);
    }

    #[test]
    fn identity_and_unknown() {
        let (p, _) = sample_yarn(&mut RngStream::new(5));
        assert_eq!(apply_overrides(&p, &[]).unwrap(), p);
        assert!(apply_overrides(&p, &[Override::Set("bogus".into(), 1.0)]).is_err());
        let r = apply_overrides(&p, &[Override::Set("R_ply".into(), 0.25)]).unwrap();
        assert_eq!(r.raw.r_ply, 0.25);
    }
}
