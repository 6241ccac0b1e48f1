use std::fmt;
use std::str::FromStr;

use gga_core::{Caveat, TailClass64};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Warning {
    Conservative,
    Projection,
    /// Operands share these stochastic ancestors but were treated as independent.
    DependenceAssumed { shared: Vec<String> },
}

impl From<Caveat> for Warning {
    fn from(c: Caveat) -> Self {
        match c {
            Caveat::Conservative => Warning::Conservative,
            Caveat::Projection => Warning::Projection,
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Conservative => f.write_str("conservative"),
            Warning::Projection => f.write_str("projection"),
            Warning::DependenceAssumed { shared } => write!(f, "dependence_assumed({})", shared.join(", ")),
        }
    }
}

impl FromStr for Warning {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "conservative" => Ok(Warning::Conservative),
            "projection" => Ok(Warning::Projection),
            _ => {
                let inner = s
                    .strip_prefix("dependence_assumed(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown warning `{s}`"))?;
                let shared = inner.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
                Ok(Warning::DependenceAssumed { shared })
            }
        }
    }
}

impl Serialize for Warning {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Warning {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub expr: String,
    /// `None` when the class could not be determined.
    pub class: Option<TailClass64>,
    pub warnings: Vec<Warning>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub model: String,
    pub nodes: Vec<ReportEntry>,
}

impl TailReport {
    pub fn entry(&self, id: usize) -> Option<&ReportEntry> {
        self.nodes.iter().find(|e| e.id == id)
    }

    pub fn by_name(&self, name: &str) -> Option<&ReportEntry> {
        self.nodes.iter().find(|e| e.name.as_deref() == Some(name))
    }

    pub fn has_errors(&self) -> bool {
        self.nodes.iter().any(|e| e.error.is_some())
    }

    pub fn has_warnings(&self) -> bool {
        self.nodes.iter().any(|e| !e.warnings.is_empty())
    }

    /// 1 if any node failed, 2 if any node carries warnings, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.has_errors() {
            1
        } else if self.has_warnings() {
            2
        } else {
            0
        }
    }
}
