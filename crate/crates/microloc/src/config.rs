//! Run-configuration files: a flat text format of `[section]` headers and
//! `key = value` pairs with typed scalars, strings, and arrays.
//!
//! Grammar (one entry per line, `#` starts a comment):
//!   file    := (line NEWLINE)*
//!   line    := section | pair | blank
//!   section := '[' ident ']'
//!   pair    := ident '=' value
//!   value   := number | 'true' | 'false' | string | array
//!   string  := '"' chars '"'        (no escapes, no embedded quotes)
//!   array   := '[' value (',' value)* ']'  (homogeneous numbers or strings)
//! Numbers parse as f64. Section and key names are `[A-Za-z0-9_-]+`.
//! Duplicate sections and duplicate keys within a section are errors, as is
//! any pair before the first section header.

use crate::geometry::expr::Expr;
use crate::geometry::{CustomMetric, MetricSpec, ScaleFactor};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("section [{section}]: missing key '{key}'")]
    MissingKey { section: String, key: String },
    #[error("line {line}: key '{key}': {msg}")]
    BadValue { line: usize, key: String, msg: String },
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Str(String),
    Numbers(Vec<f64>),
    Strings(Vec<String>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Numbers(_) => "number array",
            Value::Strings(_) => "string array",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Item {
    pub value: Value,
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Section {
    pub name: String,
    pub line: usize,
    items: BTreeMap<String, Item>,
}

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, Section>,
}

impl Section {
    fn item(&self, key: &str) -> Result<&Item, ConfigError> {
        self.items.get(key).ok_or_else(|| ConfigError::MissingKey {
            section: self.name.clone(),
            key: key.to_string(),
        })
    }

    fn bad(&self, key: &str, item: &Item, want: &str) -> ConfigError {
        ConfigError::BadValue {
            line: item.line,
            key: key.to_string(),
            msg: format!("expected {}, found {}", want, item.value.type_name()),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.items.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.items.keys().map(|k| k.as_str())
    }

    pub fn number(&self, key: &str) -> Result<f64, ConfigError> {
        let item = self.item(key)?;
        match &item.value {
            Value::Number(v) => Ok(*v),
            _ => Err(self.bad(key, item, "number")),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        if self.has(key) {
            self.number(key)
        } else {
            Ok(default)
        }
    }

    pub fn count(&self, key: &str) -> Result<usize, ConfigError> {
        let item = self.item(key)?;
        match &item.value {
            Value::Number(v) if *v >= 0.0 && v.fract() == 0.0 => Ok(*v as usize),
            _ => Err(self.bad(key, item, "non-negative integer")),
        }
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        if self.has(key) {
            self.count(key)
        } else {
            Ok(default)
        }
    }

    pub fn string(&self, key: &str) -> Result<&str, ConfigError> {
        let item = self.item(key)?;
        match &item.value {
            Value::Str(v) => Ok(v),
            _ => Err(self.bad(key, item, "string")),
        }
    }

    pub fn string_or<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str, ConfigError> {
        if self.has(key) {
            self.string(key)
        } else {
            Ok(default)
        }
    }

    pub fn boolean_or(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        if !self.has(key) {
            return Ok(default);
        }
        let item = self.item(key)?;
        match &item.value {
            Value::Bool(v) => Ok(*v),
            _ => Err(self.bad(key, item, "boolean")),
        }
    }

    pub fn strings(&self, key: &str) -> Result<&[String], ConfigError> {
        let item = self.item(key)?;
        match &item.value {
            Value::Strings(v) => Ok(v),
            _ => Err(self.bad(key, item, "string array")),
        }
    }

    pub fn numbers(&self, key: &str) -> Result<&[f64], ConfigError> {
        let item = self.item(key)?;
        match &item.value {
            Value::Numbers(v) => Ok(v),
            _ => Err(self.bad(key, item, "number array")),
        }
    }

    pub fn vec4(&self, key: &str) -> Result<[f64; 4], ConfigError> {
        let v = self.numbers(key)?;
        v.try_into().map_err(|_| ConfigError::BadValue {
            line: self.item(key).unwrap().line,
            key: key.to_string(),
            msg: format!("expected 4 components, found {}", v.len()),
        })
    }
}

impl RawConfig {
    pub fn parse(src: &str) -> Result<RawConfig, ConfigError> {
        let mut cfg = RawConfig::default();
        let mut current: Option<String> = None;
        for (idx, raw) in src.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            };
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let col = line.len() - line.trim_start().len() + 1;
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(lineno, col, "unterminated section header"))?
                    .trim();
                if !is_ident(name) {
                    return Err(parse_err(lineno, col, format!("bad section name '{}'", name)));
                }
                if cfg.sections.contains_key(name) {
                    return Err(parse_err(lineno, col, format!("duplicate section [{}]", name)));
                }
                cfg.sections.insert(
                    name.to_string(),
                    Section {
                        name: name.to_string(),
                        line: lineno,
                        items: BTreeMap::new(),
                    },
                );
                current = Some(name.to_string());
                continue;
            }
            let eq = trimmed
                .find('=')
                .ok_or_else(|| parse_err(lineno, col, "expected 'key = value'"))?;
            let key = trimmed[..eq].trim();
            if !is_ident(key) {
                return Err(parse_err(lineno, col, format!("bad key name '{}'", key)));
            }
            let val_src = trimmed[eq + 1..].trim();
            let val_col = col + eq + 1;
            let value = parse_value(val_src, lineno, val_col)?;
            let section = current
                .as_ref()
                .ok_or_else(|| parse_err(lineno, col, "key outside of any [section]"))?;
            let sec = cfg.sections.get_mut(section).unwrap();
            if sec.items.contains_key(key) {
                return Err(parse_err(lineno, col, format!("duplicate key '{}'", key)));
            }
            sec.items.insert(
                key.to_string(),
                Item {
                    value,
                    line: lineno,
                },
            );
        }
        Ok(cfg)
    }

    pub fn section(&self, name: &str) -> Result<&Section, ConfigError> {
        self.sections
            .get(name)
            .ok_or_else(|| ConfigError::MissingSection(name.to_string()))
    }

    pub fn section_opt(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn parse_value(src: &str, line: usize, col: usize) -> Result<Value, ConfigError> {
    if src.is_empty() {
        return Err(parse_err(line, col, "missing value"));
    }
    if src == "true" {
        return Ok(Value::Bool(true));
    }
    if src == "false" {
        return Ok(Value::Bool(false));
    }
    if let Some(body) = src.strip_prefix('"') {
        let body = body
            .strip_suffix('"')
            .ok_or_else(|| parse_err(line, col, "unterminated string"))?;
        if body.contains('"') {
            return Err(parse_err(line, col, "embedded quote in string"));
        }
        return Ok(Value::Str(body.to_string()));
    }
    if let Some(body) = src.strip_prefix('[') {
        let body = body
            .strip_suffix(']')
            .ok_or_else(|| parse_err(line, col, "unterminated array"))?;
        let parts: Vec<&str> = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(str::trim).collect()
        };
        if parts.iter().all(|p| p.starts_with('"')) && !parts.is_empty() {
            let mut out = Vec::new();
            for p in parts {
                match parse_value(p, line, col)? {
                    Value::Str(s) => out.push(s),
                    _ => return Err(parse_err(line, col, "mixed array element types")),
                }
            }
            return Ok(Value::Strings(out));
        }
        let mut out = Vec::new();
        for p in parts {
            let v: f64 = p
                .parse()
                .map_err(|_| parse_err(line, col, format!("bad array element '{}'", p)))?;
            out.push(v);
        }
        return Ok(Value::Numbers(out));
    }
    src.parse::<f64>()
        .map(Value::Number)
        .map_err(|_| parse_err(line, col, format!("bad value '{}'", src)))
}

const CUSTOM_COMPONENT_KEYS: [&str; 10] = [
    "g00", "g01", "g02", "g03", "g11", "g12", "g13", "g22", "g23", "g33",
];

/// Builds the metric from a `[metric]` section:
///   name = "minkowski" | "schwarzschild" | "frw" | "custom"
///   schwarzschild: mass = <number>
///   frw: scale = "power-law" (exponent = <n>) | "exponential" (hubble = <n>)
///   custom: chart = "t,x,y,z" | "t,r,theta,phi"; g00 .. g33 expression strings
pub fn metric_from_section(sec: &Section) -> Result<MetricSpec, ConfigError> {
    match sec.string("name")? {
        "minkowski" => Ok(MetricSpec::Minkowski),
        "schwarzschild" => Ok(MetricSpec::Schwarzschild {
            mass: sec.number("mass")?,
        }),
        "frw" => {
            let scale = match sec.string("scale")? {
                "power-law" => ScaleFactor::PowerLaw {
                    exponent: sec.number("exponent")?,
                },
                "exponential" => ScaleFactor::Exponential {
                    hubble: sec.number("hubble")?,
                },
                other => {
                    return Err(ConfigError::BadValue {
                        line: sec.item("scale")?.line,
                        key: "scale".to_string(),
                        msg: format!("unknown scale factor '{}'", other),
                    })
                }
            };
            Ok(MetricSpec::FrwFlat { scale })
        }
        "custom" => {
            let chart = sec.string("chart")?.to_string();
            if chart != "t,x,y,z" && chart != "t,r,theta,phi" {
                return Err(ConfigError::BadValue {
                    line: sec.item("chart")?.line,
                    key: "chart".to_string(),
                    msg: format!("unknown chart '{}'", chart),
                });
            }
            let mut components = Vec::with_capacity(10);
            for key in CUSTOM_COMPONENT_KEYS {
                let src = sec.string(key)?;
                let line = sec.item(key)?.line;
                let expr = Expr::parse(src).map_err(|e| ConfigError::BadValue {
                    line,
                    key: key.to_string(),
                    msg: e.to_string(),
                })?;
                components.push(expr);
            }
            Ok(MetricSpec::Custom(CustomMetric {
                components: components.try_into().expect("ten components collected"),
                chart,
            }))
        }
        other => Err(ConfigError::BadValue {
            line: sec.item("name")?.line,
            key: "name".to_string(),
            msg: format!("unknown metric '{}'", other),
        }),
    }
}
