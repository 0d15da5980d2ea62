//! Conditional probability tables ("behaviors"): for every tuple of setting
//! values, a distribution over outcome tuples. This is the common currency
//! between the scenario engine, the polytope tools, and the CLI.

use crate::jsonfmt::{fmt_f64, fmt_f64_array, fmt_str};
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Probability vectors must sum to one within this tolerance.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BehaviorError {
    #[error("invalid behavior shape: {0}")]
    BadShape(String),
    #[error("distribution at {key} sums to {sum}, expected 1")]
    Normalization { key: String, sum: f64 },
    #[error("negative probability {value} at {key}")]
    NegativeEntry { key: String, value: f64 },
    #[error("missing table entry for setting {0}")]
    MissingSetting(String),
    #[error("unexpected table key {0}")]
    UnknownKey(String),
    #[error("malformed behavior JSON: {0}")]
    Parse(String),
}

/// A conditional probability table p(outcomes | settings).
///
/// Settings and outcomes are each an ordered list of named finite variables;
/// tables are stored row-major (first variable most significant) on both
/// axes. Every setting tuple in the declared product space has an entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    settings: Vec<(String, usize)>,
    outcomes: Vec<(String, usize)>,
    table: Vec<Vec<f64>>,
}

pub(crate) fn product_dim(vars: &[(String, usize)]) -> usize {
    vars.iter().map(|(_, d)| d).product()
}

/// Flat row-major index of a tuple in the product space of `vars`.
pub(crate) fn flat_index(vars: &[(String, usize)], tuple: &[usize]) -> usize {
    tuple
        .iter()
        .zip(vars)
        .fold(0, |acc, (&v, (_, d))| acc * d + v)
}

/// Inverse of `flat_index`.
pub(crate) fn unflatten(vars: &[(String, usize)], mut idx: usize) -> Vec<usize> {
    let mut tuple = vec![0; vars.len()];
    for (slot, (_, d)) in tuple.iter_mut().zip(vars).rev() {
        *slot = idx % d;
        idx /= d;
    }
    tuple
}

fn key_of(vars: &[(String, usize)], tuple: &[usize]) -> String {
    vars.iter()
        .zip(tuple)
        .map(|((name, _), v)| format!("{name}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

impl Behavior {
    /// `table[flat setting index][flat outcome index]`; validates coverage,
    /// nonnegativity, and normalization of every row.
    pub fn new(
        settings: Vec<(String, usize)>,
        outcomes: Vec<(String, usize)>,
        table: Vec<Vec<f64>>,
    ) -> Result<Self, BehaviorError> {
        if settings.is_empty() || outcomes.is_empty() {
            return Err(BehaviorError::BadShape(
                "settings and outcomes must be non-empty".into(),
            ));
        }
        for (name, d) in settings.iter().chain(&outcomes) {
            if *d == 0 {
                return Err(BehaviorError::BadShape(format!(
                    "variable {name} has zero cardinality"
                )));
            }
        }
        let n_settings = product_dim(&settings);
        let n_outcomes = product_dim(&outcomes);
        if table.len() != n_settings {
            return Err(BehaviorError::BadShape(format!(
                "expected {n_settings} setting rows, got {}",
                table.len()
            )));
        }
        let mut clean = Vec::with_capacity(n_settings);
        for (si, row) in table.into_iter().enumerate() {
            let key = key_of(&settings, &unflatten(&settings, si));
            if row.len() != n_outcomes {
                return Err(BehaviorError::BadShape(format!(
                    "row {key} has {} entries, expected {n_outcomes}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            let mut cleaned = Vec::with_capacity(n_outcomes);
            for &v in &row {
                if v < -1e-12 {
                    return Err(BehaviorError::NegativeEntry { key, value: v });
                }
                sum += v;
                cleaned.push(v.max(0.0));
            }
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(BehaviorError::Normalization { key, sum });
            }
            clean.push(cleaned);
        }
        Ok(Behavior {
            settings,
            outcomes,
            table: clean,
        })
    }

    pub fn settings(&self) -> &[(String, usize)] {
        &self.settings
    }

    pub fn outcomes(&self) -> &[(String, usize)] {
        &self.outcomes
    }

    pub fn n_setting_tuples(&self) -> usize {
        self.table.len()
    }

    /// Distribution over outcome tuples at the given setting tuple.
    pub fn prob_row(&self, setting: &[usize]) -> &[f64] {
        &self.table[flat_index(&self.settings, setting)]
    }

    /// Single entry p(outcome tuple | setting tuple).
    pub fn prob(&self, setting: &[usize], outcome: &[usize]) -> f64 {
        self.prob_row(setting)[flat_index(&self.outcomes, outcome)]
    }

    /// Restriction of a two-setting-variable behavior to subsets of each
    /// setting variable's values (re-indexed in the order given).
    pub fn restrict_settings(
        &self,
        first_keep: &[usize],
        second_keep: &[usize],
    ) -> Result<Behavior, BehaviorError> {
        if self.settings.len() != 2 {
            return Err(BehaviorError::BadShape(
                "restriction requires exactly two setting variables".into(),
            ));
        }
        let mut table = Vec::new();
        for &x in first_keep {
            for &y in second_keep {
                if x >= self.settings[0].1 || y >= self.settings[1].1 {
                    return Err(BehaviorError::BadShape(format!(
                        "setting ({x},{y}) out of range"
                    )));
                }
                table.push(self.prob_row(&[x, y]).to_vec());
            }
        }
        Behavior::new(
            vec![
                (self.settings[0].0.clone(), first_keep.len()),
                (self.settings[1].0.clone(), second_keep.len()),
            ],
            self.outcomes.clone(),
            table,
        )
    }

    /// Stable JSON rendering: fixed key order, floats with 17 significant
    /// digits. Byte-identical output for identical behaviors.
    pub fn to_json(&self) -> String {
        let vars = |vs: &[(String, usize)]| {
            let items: Vec<String> = vs
                .iter()
                .map(|(n, d)| format!("[{}, {}]", fmt_str(n), d))
                .collect();
            format!("[{}]", items.join(", "))
        };
        let mut s = String::from("{\n");
        s.push_str(&format!("  \"settings\": {},\n", vars(&self.settings)));
        s.push_str(&format!("  \"outcomes\": {},\n", vars(&self.outcomes)));
        s.push_str("  \"table\": {\n");
        for (si, row) in self.table.iter().enumerate() {
            let key = key_of(&self.settings, &unflatten(&self.settings, si));
            s.push_str(&format!("    {}: {}", fmt_str(&key), fmt_f64_array(row)));
            s.push_str(if si + 1 < self.table.len() {
                ",\n"
            } else {
                "\n"
            });
        }
        s.push_str("  }\n}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self, BehaviorError> {
        #[derive(Deserialize)]
        struct Raw {
            settings: Vec<(String, usize)>,
            outcomes: Vec<(String, usize)>,
            table: BTreeMap<String, Vec<f64>>,
        }
        let raw: Raw =
            serde_json::from_str(text).map_err(|e| BehaviorError::Parse(e.to_string()))?;
        let n_settings = product_dim(&raw.settings);
        let mut table = Vec::with_capacity(n_settings);
        for si in 0..n_settings {
            let key = key_of(&raw.settings, &unflatten(&raw.settings, si));
            let row = raw
                .table
                .get(&key)
                .ok_or(BehaviorError::MissingSetting(key))?;
            table.push(row.clone());
        }
        if raw.table.len() != n_settings {
            let expected: std::collections::BTreeSet<String> = (0..n_settings)
                .map(|si| key_of(&raw.settings, &unflatten(&raw.settings, si)))
                .collect();
            let extra = raw
                .table
                .keys()
                .find(|k| !expected.contains(*k))
                .cloned()
                .unwrap_or_default();
            return Err(BehaviorError::UnknownKey(extra));
        }
        Behavior::new(raw.settings, raw.outcomes, table)
    }

    /// CSV rendering: one row per setting tuple; outcome columns are labelled
    /// by concatenated outcome digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let names: Vec<&str> = self.settings.iter().map(|(n, _)| n.as_str()).collect();
        s.push_str(&names.join(","));
        for oi in 0..product_dim(&self.outcomes) {
            let digits: String = unflatten(&self.outcomes, oi)
                .iter()
                .map(|v| v.to_string())
                .collect();
            s.push_str(&format!(",p{digits}"));
        }
        s.push('\n');
        for (si, row) in self.table.iter().enumerate() {
            let tuple = unflatten(&self.settings, si);
            let cells: Vec<String> = tuple
                .iter()
                .map(|v| v.to_string())
                .chain(row.iter().map(|v| fmt_f64(*v)))
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Human-readable table.
    pub fn to_pretty(&self) -> String {
        let mut s = String::new();
        let header: Vec<String> = (0..product_dim(&self.outcomes))
            .map(|oi| {
                let t = unflatten(&self.outcomes, oi);
                let parts: Vec<String> = self
                    .outcomes
                    .iter()
                    .zip(&t)
                    .map(|((n, _), v)| format!("{n}={v}"))
                    .collect();
                parts.join(",")
            })
            .collect();
        s.push_str(&format!("{:<16}", "setting"));
        for h in &header {
            s.push_str(&format!(" {h:>14}"));
        }
        s.push('\n');
        for (si, row) in self.table.iter().enumerate() {
            let key = key_of(&self.settings, &unflatten(&self.settings, si));
            s.push_str(&format!("{key:<16}"));
            for v in row {
                s.push_str(&format!(" {v:>14.9}"));
            }
            s.push('\n');
        }
        s
    }
}
