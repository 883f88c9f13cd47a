use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Harmonic, Painleve4, Painleve5, PotentialModel1D, SingularOscillator};
use crate::error::{Error, Result};

/// A named model parameter. Physical constants never carry defaults.
#[derive(Clone, Copy, Debug)]
pub struct Param {
    pub name: &'static str,
    pub default: Option<f64>,
    pub doc: &'static str,
}

impl Param {
    pub const fn required(name: &'static str, doc: &'static str) -> Self {
        Param { name, default: None, doc }
    }

    pub const fn optional(name: &'static str, default: f64, doc: &'static str) -> Self {
        Param {
            name,
            default: Some(default),
            doc,
        }
    }
}

/// Catalog tag plus parameters, as read from configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(kind: &str, params: &[(&str, f64)]) -> Self {
        ModelSpec {
            kind: kind.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

pub trait ModelBuilder: Send + Sync {
    fn name(&self) -> &'static str;

    fn parameters(&self) -> &'static [Param];

    /// Builds from a parameter map already checked against `parameters()`
    /// with defaults filled in.
    fn build(&self, params: &BTreeMap<String, f64>) -> Result<PotentialModel1D>;
}

pub struct ModelRegistry {
    builders: BTreeMap<&'static str, Box<dyn ModelBuilder>>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        let mut r = ModelRegistry::empty();
        r.register(Box::new(Harmonic));
        r.register(Box::new(SingularOscillator));
        r.register(Box::new(Painleve4));
        r.register(Box::new(Painleve5));
        r
    }
}

impl ModelRegistry {
    pub fn empty() -> Self {
        ModelRegistry {
            builders: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, b: Box<dyn ModelBuilder>) {
        self.builders.insert(b.name(), b);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn ModelBuilder> {
        self.builders.get(name).map(|b| b.as_ref())
    }

    /// Checks keys and finiteness and fills defaults.
    pub fn resolve(&self, spec: &ModelSpec) -> Result<BTreeMap<String, f64>> {
        let b = self
            .get(&spec.kind)
            .ok_or_else(|| Error::UnknownModel(spec.kind.clone()))?;
        let known = b.parameters();
        for (k, v) in &spec.params {
            if !known.iter().any(|p| p.name == k) {
                return Err(Error::InvalidParameter(format!("unknown parameter '{k}' for model '{}'", spec.kind)));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("parameter '{k}' must be finite")));
            }
        }
        let mut out = BTreeMap::new();
        for p in known {
            match (spec.params.get(p.name), p.default) {
                (Some(v), _) => {
                    out.insert(p.name.to_string(), *v);
                }
                (None, Some(d)) => {
                    out.insert(p.name.to_string(), d);
                }
                (None, None) => {
                    return Err(Error::InvalidParameter(format!(
                        "missing parameter '{}' for model '{}'",
                        p.name, spec.kind
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn build(&self, spec: &ModelSpec) -> Result<PotentialModel1D> {
        let params = self.resolve(spec)?;
        self.get(&spec.kind)
            .expect("resolved above")
            .build(&params)
    }
}

/// Reads a resolved parameter.
pub(crate) fn p(params: &BTreeMap<String, f64>, name: &str) -> f64 {
    params[name]
}

/// Value is NaN-encoded "absent" for optional parameters without a meaningful default.
pub(crate) fn opt(params: &BTreeMap<String, f64>, name: &str) -> Option<f64> {
    params.get(name).copied().filter(|v| !v.is_nan())
}

pub(crate) fn positive(params: &BTreeMap<String, f64>, name: &str) -> Result<f64> {
    let v = p(params, name);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("'{name}' must be positive, got {v}")))
    }
}

pub(crate) fn grid_size(params: &BTreeMap<String, f64>) -> Result<usize> {
    let n = p(params, "n");
    if n.fract() != 0.0 || n < 200.0 {
        return Err(Error::InvalidParameter(format!("grid size n = {n} must be an integer ≥ 200")));
    }
    Ok(n as usize)
}
