//! Scans over squarefree quadratic fields.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_squarefree;
use crate::criteria::afc_verdict;
use crate::error::{Error, Result};
use crate::field::quadratic::quadratic_field;
use crate::field::SplittingType;
use crate::solver::{solve_with, SolveOptions};
use crate::sunit::SUnitGroup;

pub const DENSITY_SCHEMA: &str = "density-report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Real,
    Imaginary,
}

impl Family {
    pub fn radicand(self, d: u64) -> i64 {
        match self {
            Family::Real => d as i64,
            Family::Imaginary => -(d as i64),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    pub bound: i64,
    /// Only tally the splitting of 2; no fields are built.
    pub classify_only: bool,
    pub record_entries: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { bound: 10, classify_only: false, record_entries: true }
    }
}

/// Splitting of 2 in Q(sqrt(d)) for squarefree d != 0, 1.
pub fn splitting_of_two(d: i64) -> SplittingType {
    match d.rem_euclid(8) {
        1 => SplittingType::Split,
        5 => SplittingType::Inert,
        _ => SplittingType::Ramified,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldEntry {
    pub d: i64,
    pub splitting: SplittingType,
    pub verdict: String,
    pub solutions: Option<usize>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub schema: &'static str,
    pub x: u64,
    pub family: Family,
    pub bound: Option<i64>,
    pub total: u64,
    pub splitting: BTreeMap<String, u64>,
    pub splitting_proportions: BTreeMap<String, String>,
    pub verdicts: BTreeMap<String, u64>,
    pub verdict_proportions: BTreeMap<String, String>,
    pub entries: Vec<FieldEntry>,
}

impl DensityReport {
    pub fn proportion(&self, class: &str) -> Ratio<u64> {
        Ratio::new(self.splitting.get(class).copied().unwrap_or(0), self.total.max(1))
    }
}

fn class_name(s: SplittingType) -> &'static str {
    match s {
        SplittingType::Split => "split",
        SplittingType::Inert => "inert",
        SplittingType::Ramified => "ramified",
        SplittingType::Other => "other",
    }
}

fn evaluate(d: i64, cfg: &ScanConfig) -> FieldEntry {
    let splitting = splitting_of_two(d);
    let run = || -> Result<(String, usize)> {
        let k = quadratic_field(d)?;
        let g = SUnitGroup::above(&k, &[2])?;
        let opts = SolveOptions { threads: Some(1), ..Default::default() };
        let sols = solve_with(&g, cfg.bound, &opts)?;
        let rep = afc_verdict(&k, &sols)?;
        Ok((rep.verdict.class_name().to_string(), sols.len()))
    };
    match run() {
        Ok((v, n)) => FieldEntry { d, splitting, verdict: v, solutions: Some(n), error: None },
        Err(e) => FieldEntry { d, splitting, verdict: "skipped".into(), solutions: None, error: Some(e.to_string()) },
    }
}

fn proportions(m: &BTreeMap<String, u64>, total: u64) -> BTreeMap<String, String> {
    m.iter().map(|(k, &v)| (k.clone(), Ratio::new(v, total.max(1)).to_string())).collect()
}

/// Tally the splitting of 2 and the criterion verdict over squarefree
/// d in [1, x] (real family: d >= 2).
pub fn squarefree_scan(x: u64, family: Family, cfg: &ScanConfig) -> Result<DensityReport> {
    if x < 2 {
        return Err(Error::Domain("scan limit must be at least 2".into()));
    }
    let start = if family == Family::Real { 2 } else { 1 };
    let ds: Vec<i64> = (start..=x).filter(|&d| is_squarefree(d as i64)).map(|d| family.radicand(d)).collect();
    let mut splitting: BTreeMap<String, u64> = ["split", "inert", "ramified"].iter().map(|s| (s.to_string(), 0)).collect();
    for &d in &ds {
        *splitting.entry(class_name(splitting_of_two(d)).into()).or_insert(0) += 1;
    }
    let total = ds.len() as u64;
    let mut rep = DensityReport {
        schema: DENSITY_SCHEMA,
        x,
        family,
        bound: (!cfg.classify_only).then_some(cfg.bound),
        total,
        splitting_proportions: proportions(&splitting, total),
        splitting,
        verdicts: BTreeMap::new(),
        verdict_proportions: BTreeMap::new(),
        entries: vec![],
    };
    if cfg.classify_only {
        return Ok(rep);
    }
    let entries: Vec<FieldEntry> = ds.par_iter().map(|&d| evaluate(d, cfg)).collect();
    for e in &entries {
        *rep.verdicts.entry(e.verdict.clone()).or_insert(0) += 1;
    }
    rep.verdict_proportions = proportions(&rep.verdicts, total);
    if cfg.record_entries {
        rep.entries = entries;
    }
    Ok(rep)
}
