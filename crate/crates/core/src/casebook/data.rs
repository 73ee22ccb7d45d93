use serde::{Deserialize, Serialize};

use super::{CasebookError, RuleSet};

const LOCAL_DATA: &str = include_str!("../../data/local_data.json");
const REALIZATIONS: &str = include_str!("../../data/realizations.json");
const DIM13: &str = include_str!("../../data/rules/dim13.json");
const DIM14: &str = include_str!("../../data/rules/dim14.json");
const DIM15: &str = include_str!("../../data/rules/dim15.json");

/// Group-theoretic input for one inertial quotient, optionally with the
/// `l(b_u)` values of its subsection representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDatum {
    pub id: String,
    pub inertial_quotient_name: String,
    pub order_e: u64,
    pub class_count_e: u64,
    pub p: u64,
    #[serde(default)]
    pub l_central: Vec<u64>,
    #[serde(default)]
    pub l_noncentral: Vec<u64>,
    #[serde(default)]
    pub provenance: String,
}

/// A known block realizing a Brauer tree algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub label: String,
    pub m: u64,
    pub p: u64,
    pub defect_group: String,
    pub morita_class: String,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Deserialize)]
struct Versioned<T> {
    #[allow(dead_code)]
    version: u32,
    entries: Vec<T>,
}

pub fn local_data() -> Result<Vec<LocalDatum>, CasebookError> {
    let v: Versioned<LocalDatum> = serde_json::from_str(LOCAL_DATA)?;
    for d in &v.entries {
        if d.class_count_e > d.order_e || d.class_count_e == 0 {
            return Err(CasebookError::InconsistentDatum { id: d.id.clone(), reason: "k(E) out of range".into() });
        }
        if d.l_central.iter().chain(&d.l_noncentral).any(|&l| l == 0) {
            return Err(CasebookError::InconsistentDatum { id: d.id.clone(), reason: "l-values must be positive".into() });
        }
    }
    Ok(v.entries)
}

pub fn realizations() -> Result<Vec<Realization>, CasebookError> {
    let v: Versioned<Realization> = serde_json::from_str(REALIZATIONS)?;
    Ok(v.entries)
}

pub fn shipped_rules(dimension: u64) -> Result<RuleSet, CasebookError> {
    let text = match dimension {
        13 => DIM13,
        14 => DIM14,
        15 => DIM15,
        other => return Err(CasebookError::NoShippedRules(other)),
    };
    RuleSet::from_json(text)
}
