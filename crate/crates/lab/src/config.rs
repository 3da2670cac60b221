//! Flat `key = value` configuration with dotted keys.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use bergkern::geometry::{DefiningFunction, Domain, RadialWeight, Weight};
use toml::Value;

use crate::io::read_two_columns;

/// Shipped defaults, including every tolerance the gates use.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<String, Value>,
    base_dir: PathBuf,
}

impl Config {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).context("parsing config")?;
        let mut values = BTreeMap::new();
        flatten("", &Value::Table(table), &mut values);
        Ok(Self { values, base_dir: base_dir.to_path_buf() })
    }

    pub fn default_config() -> Self {
        Self::parse(DEFAULT_CONFIG, Path::new(".")).expect("shipped config parses")
    }

    /// Defaults overlaid with the keys of `path`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut cfg = Self::default_config();
        let user = Self::parse(&text, &base)?;
        cfg.values.extend(user.values);
        cfg.base_dir = base;
        Ok(cfg)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    /// `KEY=VAL`; keys without a `tol.` prefix are taken relative to `tol`.
    pub fn apply_tol_override(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec.split_once('=').ok_or_else(|| anyhow!("tolerance override {spec:?} is not KEY=VAL"))?;
        let key = if k.starts_with("tol.") { k.trim().to_string() } else { format!("tol.{}", k.trim()) };
        if !self.contains(&key) {
            bail!("unknown tolerance {key}");
        }
        let v: f64 = v.trim().parse().with_context(|| format!("tolerance value in {spec:?}"))?;
        self.set(&key, Value::Float(v));
        Ok(())
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        match self.values.get(key) {
            Some(Value::Float(x)) => Ok(*x),
            Some(Value::Integer(i)) => Ok(*i as f64),
            Some(v) => bail!("config key {key} is not a number: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        if self.contains(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        match self.values.get(key) {
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(v) => bail!("config key {key} is not a nonnegative integer: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.usize(key).map(|v| v as u64)
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.values.get(key) {
            Some(Value::Boolean(b)) => Ok(*b),
            Some(v) => bail!("config key {key} is not a boolean: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        match self.values.get(key) {
            Some(Value::String(s)) => Ok(s),
            Some(v) => bail!("config key {key} is not a string: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        match self.values.get(key) {
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => bail!("config key {key} holds a non-number"),
                })
                .collect(),
            Some(v) => bail!("config key {key} is not a list: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        match self.values.get(key) {
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    _ => bail!("config key {key} holds a non-integer"),
                })
                .collect(),
            Some(v) => bail!("config key {key} is not a list: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    pub fn str_list(&self, key: &str) -> Result<Vec<String>> {
        match self.values.get(key) {
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    _ => bail!("config key {key} holds a non-string"),
                })
                .collect(),
            Some(v) => bail!("config key {key} is not a list: {v}"),
            None => bail!("missing config key {key}"),
        }
    }

    /// `tol.<name>`.
    pub fn tol(&self, name: &str) -> Result<f64> {
        self.f64(&format!("tol.{name}"))
    }

    /// All `tol.*` entries.
    pub fn tolerances(&self) -> BTreeMap<String, f64> {
        self.values
            .iter()
            .filter_map(|(k, v)| {
                let name = k.strip_prefix("tol.")?;
                match v {
                    Value::Float(x) => Some((name.to_string(), *x)),
                    Value::Integer(i) => Some((name.to_string(), *i as f64)),
                    _ => None,
                }
            })
            .collect()
    }

    pub fn n(&self) -> Result<usize> {
        self.usize("n")
    }

    pub fn weight_spec(&self) -> Result<&str> {
        self.str("weight")
    }

    pub fn domain_spec(&self) -> Result<&str> {
        self.str("domain")
    }

    pub fn weight(&self) -> Result<Weight> {
        parse_weight(self.weight_spec()?, &self.base_dir)
    }

    pub fn domain(&self) -> Result<Domain> {
        parse_domain(self.domain_spec()?, self.n()?)
    }

    /// `k_list`, strictly increasing; capped at `general_k_cap` unless both
    /// weight and domain take the radial path.
    pub fn k_list(&self) -> Result<Vec<usize>> {
        let ks = self.usize_list("k_list")?;
        if ks.windows(2).any(|w| w[0] >= w[1]) {
            bail!("k_list must be strictly increasing: {ks:?}");
        }
        let radial = self.weight()?.is_radial() && self.domain()?.is_radial();
        if radial {
            return Ok(ks);
        }
        let cap = self.usize("general_k_cap")?;
        let kept: Vec<usize> = ks.iter().copied().filter(|&k| k <= cap).collect();
        if kept.len() < ks.len() {
            log::warn!("general quadrature path: k_list capped at {cap}");
        }
        Ok(kept)
    }

    /// Key of the per-example expectations, e.g. `expected.fs@ball`.
    pub fn expected(&self, name: &str) -> Result<Option<f64>> {
        let key = format!("expected.{}@{}.{name}", self.weight_spec()?, self.domain_spec()?);
        self.opt_f64(&key)
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn numbers(list: &str) -> Result<Vec<f64>> {
    list.split(',').map(|x| x.trim().parse::<f64>().with_context(|| format!("number {x:?}"))).collect()
}

/// `fs`, `log`, `euclid`, `torus-fs:a1,a2,…` or `radial:PATH` with a sampled
/// `u(s)` on a uniform grid.
pub fn parse_weight(spec: &str, base_dir: &Path) -> Result<Weight> {
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
    Ok(match (name, arg) {
        ("fs", None) => Weight::FubiniStudy,
        ("log", None) => Weight::LogModulus,
        ("euclid", None) => Weight::Euclidean,
        ("torus-fs", Some(a)) => Weight::TorusFs { a: numbers(a)? },
        ("radial", Some(p)) => {
            let path = base_dir.join(p);
            let (s, u) = read_two_columns(&path)?;
            if s.len() < 3 {
                bail!("{}: need at least three samples", path.display());
            }
            let h = s[1] - s[0];
            if s.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
                bail!("{}: s-grid is not uniform", path.display());
            }
            Weight::Radial(RadialWeight::new(s[0], h, u)?)
        }
        _ => bail!("unknown weight {spec:?}"),
    })
}

/// `ball`, `ball-quadratic`, `chart`, `ellipsoid:a1,…` or
/// `ellipsoid-quadratic:a1,…`.
pub fn parse_domain(spec: &str, n: usize) -> Result<Domain> {
    let (name, arg) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
    let d = match (name, arg) {
        ("ball", None) => Domain::exterior_ball(n),
        ("ball-quadratic", None) => Domain::exterior_ball(n).with_defining(DefiningFunction::Quadratic),
        ("chart", None) => Domain::chart(n),
        ("ellipsoid", Some(a)) => Domain::exterior_ellipsoid(numbers(a)?)?,
        ("ellipsoid-quadratic", Some(a)) => Domain::exterior_ellipsoid(numbers(a)?)?.with_defining(DefiningFunction::Quadratic),
        _ => bail!("unknown domain {spec:?}"),
    };
    if d.n() != n {
        bail!("domain {spec:?} has dimension {} but n = {n}", d.n());
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_and_flatten() {
        let c = Config::default_config();
        assert_eq!(c.n().unwrap(), 2);
        assert_eq!(c.k_list().unwrap(), vec![8, 12, 16, 24, 32, 48, 64]);
        assert!(c.tol("morse.total").unwrap() > 0.0);
        assert_eq!(c.expected("slope").unwrap(), Some(0.5));
    }

    #[test]
    fn overrides() {
        let mut c = Config::default_config();
        c.apply_tol_override("morse.total=0.5").unwrap();
        assert_eq!(c.tol("morse.total").unwrap(), 0.5);
        c.apply_tol_override("tol.morse.total = 0.25").unwrap();
        assert_eq!(c.tol("morse.total").unwrap(), 0.25);
        assert!(c.apply_tol_override("nope=1").is_err());
        assert!(c.apply_tol_override("morse.total").is_err());
    }

    #[test]
    fn general_path_caps_k() {
        let mut c = Config::default_config();
        c.set("domain", Value::String("ellipsoid:1,2".into()));
        assert_eq!(c.k_list().unwrap(), vec![8, 12, 16, 24]);
    }

    #[test]
    fn specs() {
        assert!(matches!(parse_weight("torus-fs:1,2", Path::new(".")).unwrap(), Weight::TorusFs { .. }));
        assert!(parse_weight("bogus", Path::new(".")).is_err());
        assert!(!parse_domain("ellipsoid:1,2", 2).unwrap().is_radial());
        assert!(parse_domain("ellipsoid:1,2,3", 2).is_err());
        assert!(!parse_domain("chart", 3).unwrap().has_boundary());
    }
}
