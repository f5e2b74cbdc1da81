//! Pass/fail reports for table comparisons, one line per component.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentResult {
    Pass,
    Fail(String),
}

impl ComponentResult {
    pub fn passed(&self) -> bool {
        matches!(self, ComponentResult::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub per_component: BTreeMap<String, ComponentResult>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        CheckReport { name: name.into(), per_component: BTreeMap::new() }
    }

    pub fn pass(&mut self, component: impl Into<String>) {
        self.per_component.insert(component.into(), ComponentResult::Pass);
    }

    pub fn fail(&mut self, component: impl Into<String>, detail: impl Into<String>) {
        self.per_component.insert(component.into(), ComponentResult::Fail(detail.into()));
    }

    pub fn record(&mut self, component: impl Into<String>, ok: bool, detail: impl Into<String>) {
        if ok {
            self.pass(component);
        } else {
            self.fail(component, detail);
        }
    }

    pub fn overall(&self) -> bool {
        self.per_component.values().all(ComponentResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&String, &str)> {
        self.per_component.iter().filter_map(|(k, v)| match v {
            ComponentResult::Pass => None,
            ComponentResult::Fail(d) => Some((k, d.as_str())),
        })
    }
}

impl Serialize for CheckReport {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            name: &'a str,
            per_component: PerComponent<'a>,
            overall: bool,
        }
        struct PerComponent<'a>(&'a BTreeMap<String, ComponentResult>);
        impl Serialize for PerComponent<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
                let mut map = ser.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    match v {
                        ComponentResult::Pass => map.serialize_entry(k, "pass")?,
                        ComponentResult::Fail(d) => map.serialize_entry(k, &format!("fail:{d}"))?,
                    }
                }
                map.end()
            }
        }
        Repr { name: &self.name, per_component: PerComponent(&self.per_component), overall: self.overall() }
            .serialize(ser)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.name, if self.overall() { "PASS" } else { "FAIL" })?;
        for (k, v) in &self.per_component {
            match v {
                ComponentResult::Pass => writeln!(f, "  \u{2713} {k}")?,
                ComponentResult::Fail(d) => writeln!(f, "  \u{2717} {k}: {d}")?,
            }
        }
        Ok(())
    }
}
