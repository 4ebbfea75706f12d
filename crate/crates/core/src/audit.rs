//! Rule-level bias metrics over learned programs.
//!
//! * partial weight `PW`: number of rules with a given head atom whose body
//!   contains a given feature atom;
//! * global weight `GW`: `Σ_val PW(body, target = val) · val`;
//! * attribute frequency `freq`: body occurrences of an attribute across all
//!   rules, and its normalized share `NP`;
//! * relative increment `AIP = (freq_biased − freq_unbiased) / freq_unbiased`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mvl::{Atom, Program};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("program has no body atoms, normalized percentages are undefined")]
    NoBodyAtoms,
    #[error("attribute `{0}` never occurs in the unbiased program, increment undefined")]
    ZeroBaseline(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("global weight needs exactly one target variable, found {0}")]
    TargetCount(usize),
    #[error("pair `{0}`: programs are defined over different schemas")]
    SchemaMismatch(String),
}

pub fn partial_weight(p: &Program, head: Atom, body: Atom) -> u64 {
    p.rules_for(head).filter(|r| r.body_var(body.var) == Some(body.value)).count() as u64
}

/// Variant of [`partial_weight`] where each rule counts `1 / |body|`.
pub fn partial_weight_by_length(p: &Program, head: Atom, body: Atom) -> f64 {
    p.rules_for(head)
        .filter(|r| r.body_var(body.var) == Some(body.value))
        .map(|r| 1.0 / r.body().len() as f64)
        .sum()
}

pub fn global_weight(p: &Program, body: Atom) -> Result<f64, AuditError> {
    let [target] = p.schema().targets() else {
        return Err(AuditError::TargetCount(p.schema().targets().len()));
    };
    Ok(target
        .domain
        .iter()
        .map(|&val| partial_weight(p, Atom::new(0, val), body) as f64 * f64::from(val))
        .sum())
}

/// Each value's share of the attribute's total global weight; `None` when
/// the total is zero.
pub fn global_weight_shares(p: &Program, attribute: usize) -> Result<Vec<(u32, Option<f64>)>, AuditError> {
    let var = p
        .schema()
        .features()
        .get(attribute)
        .ok_or_else(|| AuditError::UnknownAttribute(format!("#{attribute}")))?;
    let gws: Vec<(u32, f64)> = var
        .domain
        .iter()
        .map(|&v| global_weight(p, Atom::new(attribute, v)).map(|gw| (v, gw)))
        .collect::<Result<_, _>>()?;
    let total: f64 = gws.iter().map(|(_, g)| g).sum();
    Ok(gws.into_iter().map(|(v, g)| (v, (total > 0.0).then(|| g / total))).collect())
}

pub fn attribute_frequency(p: &Program, attribute: usize) -> u64 {
    p.rules().iter().filter(|r| r.body_var(attribute).is_some()).count() as u64
}

/// Frequency of each value of an attribute in rule bodies.
pub fn value_frequency(p: &Program, body: Atom) -> u64 {
    p.rules().iter().filter(|r| r.body_var(body.var) == Some(body.value)).count() as u64
}

pub fn normalized_percentage(p: &Program, attribute: usize) -> Result<f64, AuditError> {
    let total: usize = p.rules().iter().map(|r| r.body().len()).sum();
    if total == 0 {
        return Err(AuditError::NoBodyAtoms);
    }
    Ok(attribute_frequency(p, attribute) as f64 / total as f64)
}

pub fn absolute_increment(biased: &Program, unbiased: &Program, attribute: usize) -> Result<f64, AuditError> {
    let base = attribute_frequency(unbiased, attribute);
    if base == 0 {
        let name = unbiased.schema().features().get(attribute).map_or_else(|| format!("#{attribute}"), |v| v.name.clone());
        return Err(AuditError::ZeroBaseline(name));
    }
    Ok((attribute_frequency(biased, attribute) as f64 - base as f64) / base as f64)
}

/// Descriptive metadata attached to a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A biased run and its unbiased baseline.
#[derive(Debug, Clone)]
pub struct RunPair<'a> {
    pub label: String,
    pub unbiased: (&'a Program, RunMeta),
    pub biased: (&'a Program, RunMeta),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuditConfig {
    /// Also report the length-weighted partial weight.
    pub length_weighted: bool,
    /// Attributes never named as the top bias driver.
    pub exclude_from_top: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialWeightRow {
    pub target_value: u32,
    pub attribute: String,
    pub value: u32,
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_weighted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalWeightRow {
    pub attribute: String,
    pub value: u32,
    pub global_weight: f64,
    pub share: Option<f64>,
    pub occurrences: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub attribute: String,
    pub frequency: u64,
    pub normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub meta: RunMeta,
    pub rules: usize,
    pub partial_weights: Vec<PartialWeightRow>,
    pub global_weights: Vec<GlobalWeightRow>,
    pub frequencies: Vec<FrequencyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementRow {
    pub attribute: String,
    pub unbiased_frequency: u64,
    pub biased_frequency: u64,
    /// `None` when the unbiased frequency is zero.
    pub increment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub label: String,
    pub unbiased: RunMetrics,
    pub biased: RunMetrics,
    pub increments: Vec<IncrementRow>,
    pub top_driver: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub version: u32,
    pub pairs: Vec<PairReport>,
}

fn run_metrics(p: &Program, meta: RunMeta, cfg: &AuditConfig) -> Result<RunMetrics, AuditError> {
    let schema = p.schema();
    let [target] = schema.targets() else {
        return Err(AuditError::TargetCount(schema.targets().len()));
    };
    let mut partial_weights = Vec::new();
    let mut global_weights = Vec::new();
    let mut frequencies = Vec::new();
    let np_defined = p.rules().iter().any(|r| !r.body().is_empty());
    for (var, v) in schema.features().iter().enumerate() {
        for &tv in &target.domain {
            for &value in &v.domain {
                let head = Atom::new(0, tv);
                let body = Atom::new(var, value);
                partial_weights.push(PartialWeightRow {
                    target_value: tv,
                    attribute: v.name.clone(),
                    value,
                    count: partial_weight(p, head, body),
                    length_weighted: cfg.length_weighted.then(|| partial_weight_by_length(p, head, body)),
                });
            }
        }
        for (value, share) in global_weight_shares(p, var)? {
            let body = Atom::new(var, value);
            global_weights.push(GlobalWeightRow {
                attribute: v.name.clone(),
                value,
                global_weight: global_weight(p, body)?,
                share,
                occurrences: value_frequency(p, body),
            });
        }
        frequencies.push(FrequencyRow {
            attribute: v.name.clone(),
            frequency: attribute_frequency(p, var),
            normalized: if np_defined { Some(normalized_percentage(p, var)?) } else { None },
        });
    }
    Ok(RunMetrics { meta, rules: p.len(), partial_weights, global_weights, frequencies })
}

/// Attribute with the largest increment, skipping `exclude`. An undefined
/// increment (zero baseline) with a non-zero biased frequency ranks above
/// every finite one.
pub fn top_driver<'a>(rows: &'a [IncrementRow], exclude: &[String]) -> Option<&'a IncrementRow> {
    let key = |r: &IncrementRow| match r.increment {
        Some(x) => Some(x),
        None if r.biased_frequency > 0 => Some(f64::INFINITY),
        None => None,
    };
    rows.iter()
        .filter(|r| !exclude.contains(&r.attribute))
        .filter_map(|r| key(r).map(|k| (r, k)))
        .fold(None, |best: Option<(&IncrementRow, f64)>, (r, k)| match best {
            Some((_, bk)) if bk >= k => best,
            _ => Some((r, k)),
        })
        .map(|(r, _)| r)
}

pub fn audit_pair(pair: &RunPair<'_>, cfg: &AuditConfig) -> Result<PairReport, AuditError> {
    let (u, umeta) = &pair.unbiased;
    let (b, bmeta) = &pair.biased;
    if u.schema() != b.schema() {
        return Err(AuditError::SchemaMismatch(pair.label.clone()));
    }
    let increments: Vec<IncrementRow> = u
        .schema()
        .features()
        .iter()
        .enumerate()
        .map(|(var, v)| IncrementRow {
            attribute: v.name.clone(),
            unbiased_frequency: attribute_frequency(u, var),
            biased_frequency: attribute_frequency(b, var),
            increment: absolute_increment(b, u, var).ok(),
        })
        .collect();
    let top = top_driver(&increments, &cfg.exclude_from_top).map(|r| r.attribute.clone());
    Ok(PairReport {
        label: pair.label.clone(),
        unbiased: run_metrics(u, umeta.clone(), cfg)?,
        biased: run_metrics(b, bmeta.clone(), cfg)?,
        increments,
        top_driver: top,
    })
}

pub fn audit(pairs: &[RunPair<'_>], cfg: &AuditConfig) -> Result<AuditReport, AuditError> {
    let pairs = pairs.iter().map(|p| audit_pair(p, cfg)).collect::<Result<_, _>>()?;
    Ok(AuditReport { version: REPORT_VERSION, pairs })
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Flat table `pair,run,metric,attribute,value,target_value,number`;
    /// empty cells for undefined quantities, reals with six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,run,metric,attribute,value,target_value,number\n");
        for p in &self.pairs {
            for (run, m) in [("unbiased", &p.unbiased), ("biased", &p.biased)] {
                for r in &m.partial_weights {
                    let _ = writeln!(out, "{},{run},pw,{},{},{},{}", p.label, r.attribute, r.value, r.target_value, r.count);
                    if let Some(lw) = r.length_weighted {
                        let _ = writeln!(
                            out,
                            "{},{run},pw_length,{},{},{},{}",
                            p.label, r.attribute, r.value, r.target_value, num(lw)
                        );
                    }
                }
                for r in &m.global_weights {
                    let _ = writeln!(out, "{},{run},gw,{},{},,{}", p.label, r.attribute, r.value, num(r.global_weight));
                    let _ = writeln!(out, "{},{run},gw_share,{},{},,{}", p.label, r.attribute, r.value, opt(r.share));
                }
                for r in &m.frequencies {
                    let _ = writeln!(out, "{},{run},freq,{},,,{}", p.label, r.attribute, r.frequency);
                    let _ = writeln!(out, "{},{run},np,{},,,{}", p.label, r.attribute, opt(r.normalized));
                }
            }
            for r in &p.increments {
                let _ = writeln!(out, "{},pair,aip,{},,,{}", p.label, r.attribute, opt(r.increment));
            }
        }
        out
    }
}
