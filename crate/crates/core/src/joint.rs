//! Joint distributions over named finite variables, with the marginal and
//! conditional extractions used by the agency premise checks.

use crate::behavior::{flat_index, product_dim, unflatten, BehaviorError, PROB_TOL};

/// Mass below which a conditioning event is treated as absent.
pub const MASS_EPS: f64 = 1e-12;

/// A joint probability distribution over an ordered list of named variables,
/// stored row-major (first variable most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<(String, usize)>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(vars: Vec<(String, usize)>, probs: Vec<f64>) -> Result<Self, BehaviorError> {
        let n = product_dim(&vars);
        if vars.is_empty() || probs.len() != n {
            return Err(BehaviorError::BadShape(format!(
                "expected {n} entries, got {}",
                probs.len()
            )));
        }
        let mut sum = 0.0;
        let mut clean = Vec::with_capacity(n);
        for &v in &probs {
            if v < -1e-12 {
                return Err(BehaviorError::NegativeEntry {
                    key: "joint".into(),
                    value: v,
                });
            }
            sum += v;
            clean.push(v.max(0.0));
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(BehaviorError::Normalization {
                key: "joint".into(),
                sum,
            });
        }
        Ok(JointTable { vars, probs: clean })
    }

    pub fn vars(&self) -> &[(String, usize)] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, assignment: &[usize]) -> f64 {
        self.probs[flat_index(&self.vars, assignment)]
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>, BehaviorError> {
        names
            .iter()
            .map(|n| {
                self.vars
                    .iter()
                    .position(|(v, _)| v == n)
                    .ok_or_else(|| BehaviorError::BadShape(format!("unknown variable {n}")))
            })
            .collect()
    }

    /// Marginal distribution over `names`, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointTable, BehaviorError> {
        let pos = self.positions(names)?;
        let out_vars: Vec<(String, usize)> = pos.iter().map(|&p| self.vars[p].clone()).collect();
        let mut out = vec![0.0; product_dim(&out_vars)];
        for (i, &p) in self.probs.iter().enumerate() {
            let full = unflatten(&self.vars, i);
            let sub: Vec<usize> = pos.iter().map(|&q| full[q]).collect();
            out[flat_index(&out_vars, &sub)] += p;
        }
        JointTable::new(out_vars, out)
    }

    /// Conditional distributions p(targets | given = assignment) for every
    /// assignment of `given` (row-major). Entries with conditioning mass
    /// below `MASS_EPS` are `None`.
    pub fn conditionals(
        &self,
        targets: &[&str],
        given: &[&str],
    ) -> Result<Vec<Option<Conditional>>, BehaviorError> {
        let tpos = self.positions(targets)?;
        let gpos = self.positions(given)?;
        let tvars: Vec<(String, usize)> = tpos.iter().map(|&p| self.vars[p].clone()).collect();
        let gvars: Vec<(String, usize)> = gpos.iter().map(|&p| self.vars[p].clone()).collect();
        let t_dim = product_dim(&tvars);
        let g_dim = product_dim(&gvars);
        let mut joint = vec![vec![0.0; t_dim]; g_dim];
        for (i, &p) in self.probs.iter().enumerate() {
            let full = unflatten(&self.vars, i);
            let t: Vec<usize> = tpos.iter().map(|&q| full[q]).collect();
            let g: Vec<usize> = gpos.iter().map(|&q| full[q]).collect();
            joint[flat_index(&gvars, &g)][flat_index(&tvars, &t)] += p;
        }
        Ok(joint
            .into_iter()
            .enumerate()
            .map(|(gi, row)| {
                let mass: f64 = row.iter().sum();
                if mass <= MASS_EPS {
                    None
                } else {
                    Some(Conditional {
                        given_assignment: unflatten(&gvars, gi),
                        mass,
                        dist: row.iter().map(|v| v / mass).collect(),
                    })
                }
            })
            .collect())
    }

    /// Compact one-line JSON: variables with cardinalities, then the
    /// row-major probability vector at 17 significant digits.
    pub fn to_json(&self) -> String {
        let vars: Vec<String> = self
            .vars
            .iter()
            .map(|(n, d)| format!("[{}, {}]", crate::jsonfmt::fmt_str(n), d))
            .collect();
        format!(
            "{{\"vars\": [{}], \"probs\": {}}}",
            vars.join(", "),
            crate::jsonfmt::fmt_f64_array(&self.probs)
        )
    }

    /// Largest absolute entry-wise difference; the tables must share layout.
    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64, BehaviorError> {
        if self.vars != other.vars {
            return Err(BehaviorError::BadShape(
                "joint tables have different variables".into(),
            ));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// One conditional distribution p(targets | given = given_assignment).
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional {
    pub given_assignment: Vec<usize>,
    pub mass: f64,
    pub dist: Vec<f64>,
}
