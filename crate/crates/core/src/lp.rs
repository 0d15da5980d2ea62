//! Marginal-problem feasibility as a linear program, with certificates.
//!
//! A marginal constraint set asks for a joint distribution over named finite
//! variables reproducing given sub-marginals. Feasibility is decided by a
//! phase-1 simplex (dense tableau, Bland's anti-cycling rule, double
//! precision). Every answer carries evidence: a witness joint distribution
//! when feasible, or a Farkas-style dual certificate when infeasible — a
//! linear functional of the constraint rows that is at least `slack` on every
//! joint distribution while the targets demand a negative value, checkable by
//! direct arithmetic in `validate_certificate`.

use crate::behavior::{product_dim, unflatten};
use crate::jsonfmt::{fmt_f64, fmt_f64_array, fmt_str};
use serde::Deserialize;
use thiserror::Error;

/// Feasibility tolerance: violations within this bound count as satisfied.
pub const FEAS_TOL: f64 = 1e-9;

/// Cap on the joint outcome space.
pub const MAX_JOINT_DIM: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("invalid constraint set: {0}")]
    InvalidConstraints(String),
    #[error("joint outcome space has {0} cells, exceeding the supported size")]
    JointSpaceTooLarge(usize),
    #[error("simplex failed to converge: {0}")]
    Numerical(String),
    #[error("malformed constraint-set JSON: {0}")]
    Parse(String),
}

/// One marginal constraint: the joint's marginal on `subset` must equal
/// `target` (row-major over the subset variables in the order listed).
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraint {
    pub subset: Vec<String>,
    pub target: Vec<f64>,
}

/// A set of marginal constraints over named finite variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraintSet {
    variables: Vec<(String, usize)>,
    constraints: Vec<MarginalConstraint>,
}

impl MarginalConstraintSet {
    pub fn new(
        variables: Vec<(String, usize)>,
        constraints: Vec<MarginalConstraint>,
    ) -> Result<Self, LpError> {
        if variables.is_empty() {
            return Err(LpError::InvalidConstraints("no variables declared".into()));
        }
        let mut joint_dim: usize = 1;
        for (name, d) in &variables {
            if *d == 0 {
                return Err(LpError::InvalidConstraints(format!(
                    "variable {name} has zero cardinality"
                )));
            }
            if variables.iter().filter(|(n, _)| n == name).count() > 1 {
                return Err(LpError::InvalidConstraints(format!(
                    "duplicate variable {name}"
                )));
            }
            joint_dim = joint_dim.saturating_mul(*d);
        }
        if joint_dim > MAX_JOINT_DIM {
            return Err(LpError::JointSpaceTooLarge(joint_dim));
        }
        for c in &constraints {
            let mut dim = 1usize;
            for s in &c.subset {
                let (_, d) = variables
                    .iter()
                    .find(|(n, _)| n == s)
                    .ok_or_else(|| LpError::InvalidConstraints(format!("unknown variable {s}")))?;
                if c.subset.iter().filter(|t| *t == s).count() > 1 {
                    return Err(LpError::InvalidConstraints(format!(
                        "subset repeats variable {s}"
                    )));
                }
                dim *= d;
            }
            if c.target.len() != dim {
                return Err(LpError::InvalidConstraints(format!(
                    "target for subset {:?} has {} entries, expected {dim}",
                    c.subset,
                    c.target.len()
                )));
            }
            let sum: f64 = c.target.iter().sum();
            if (sum - 1.0).abs() > FEAS_TOL {
                return Err(LpError::InvalidConstraints(format!(
                    "target for subset {:?} sums to {sum}",
                    c.subset
                )));
            }
            if let Some(v) = c.target.iter().find(|v| **v < -1e-12) {
                return Err(LpError::InvalidConstraints(format!(
                    "negative target entry {v} for subset {:?}",
                    c.subset
                )));
            }
        }
        Ok(MarginalConstraintSet {
            variables,
            constraints,
        })
    }

    pub fn variables(&self) -> &[(String, usize)] {
        &self.variables
    }

    pub fn constraints(&self) -> &[MarginalConstraint] {
        &self.constraints
    }

    pub fn joint_dim(&self) -> usize {
        product_dim(&self.variables)
    }

    /// Scalar equality rows (coefficients over the joint space, rhs), in
    /// constraint order; one row per target entry.
    fn rows(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.joint_dim();
        let mut rows = Vec::new();
        for c in &self.constraints {
            let pos: Vec<usize> = c
                .subset
                .iter()
                .map(|s| self.variables.iter().position(|(n, _)| n == s).unwrap())
                .collect();
            let sub_vars: Vec<(String, usize)> =
                pos.iter().map(|&p| self.variables[p].clone()).collect();
            for (combo, &t) in c.target.iter().enumerate() {
                let combo_digits = unflatten(&sub_vars, combo);
                let mut coeffs = vec![0.0; n];
                for (j, slot) in coeffs.iter_mut().enumerate() {
                    let digits = unflatten(&self.variables, j);
                    if pos.iter().zip(&combo_digits).all(|(&p, &d)| digits[p] == d) {
                        *slot = 1.0;
                    }
                }
                rows.push((coeffs, t));
            }
        }
        rows
    }

    /// Stable JSON rendering (17 significant digits, fixed key order).
    pub fn to_json(&self) -> String {
        let vars: Vec<String> = self
            .variables
            .iter()
            .map(|(n, d)| format!("[{}, {}]", fmt_str(n), d))
            .collect();
        let mut s = String::from("{\n");
        s.push_str(&format!("  \"variables\": [{}],\n", vars.join(", ")));
        s.push_str("  \"constraints\": [\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let subset: Vec<String> = c.subset.iter().map(|n| fmt_str(n)).collect();
            s.push_str(&format!(
                "    {{\"subset\": [{}], \"target\": {}}}",
                subset.join(", "),
                fmt_f64_array(&c.target)
            ));
            s.push_str(if i + 1 < self.constraints.len() {
                ",\n"
            } else {
                "\n"
            });
        }
        s.push_str("  ]\n}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self, LpError> {
        #[derive(Deserialize)]
        struct RawConstraint {
            subset: Vec<String>,
            target: Vec<f64>,
        }
        #[derive(Deserialize)]
        struct Raw {
            variables: Vec<(String, usize)>,
            constraints: Vec<RawConstraint>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| LpError::Parse(e.to_string()))?;
        MarginalConstraintSet::new(
            raw.variables,
            raw.constraints
                .into_iter()
                .map(|c| MarginalConstraint {
                    subset: c.subset,
                    target: c.target,
                })
                .collect(),
        )
    }
}

/// Outcome of a marginal feasibility decision, with checkable evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// Joint distribution over the full outcome space (feasible case).
    pub witness: Option<Vec<f64>>,
    /// Dual vector, one real per scalar marginal constraint row, scaled to
    /// unit max-norm (infeasible case).
    pub certificate: Option<Vec<f64>>,
    /// Max constraint violation of the witness, or the certificate margin.
    pub slack: f64,
}

impl FeasibilityResult {
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        s.push_str(&format!("  \"feasible\": {},\n", self.feasible));
        s.push_str(&format!(
            "  \"witness\": {},\n",
            match &self.witness {
                Some(w) => fmt_f64_array(w),
                None => "null".into(),
            }
        ));
        s.push_str(&format!(
            "  \"certificate\": {},\n",
            match &self.certificate {
                Some(c) => fmt_f64_array(c),
                None => "null".into(),
            }
        ));
        s.push_str(&format!("  \"slack\": {}\n}}\n", fmt_f64(self.slack)));
        s
    }
}

/// Decides whether some joint distribution reproduces every target marginal.
pub fn lp_feasibility(cs: &MarginalConstraintSet) -> Result<FeasibilityResult, LpError> {
    let n = cs.joint_dim();
    if cs.constraints.is_empty() {
        // Any distribution works; report the uniform one.
        return Ok(FeasibilityResult {
            feasible: true,
            witness: Some(vec![1.0 / n as f64; n]),
            certificate: None,
            slack: 0.0,
        });
    }
    let rows = cs.rows();
    // Rows of the first constraint sum to one in every column, which lets the
    // certificate absorb the normalization row's dual below.
    let unit_rows = 0..cs.constraints[0].target.len();
    match solve_equality_feasibility(n, &rows, unit_rows)? {
        RawOutcome::Feasible { x } => {
            let slack = rows
                .iter()
                .map(|(a, b)| (dot(a, &x) - b).abs())
                .fold((x.iter().sum::<f64>() - 1.0).abs(), f64::max);
            Ok(FeasibilityResult {
                feasible: true,
                witness: Some(x),
                certificate: None,
                slack,
            })
        }
        RawOutcome::Infeasible { cert, margin } => Ok(FeasibilityResult {
            feasible: false,
            witness: None,
            certificate: Some(cert),
            slack: margin,
        }),
    }
}

/// Marginal problem behind the four-pairwise-table existence question: is
/// there a joint over binary (a, b, c, d) with the given (a,b), (a,d), (c,b),
/// (c,d) marginals? Tables are row-major over (first, second) variable.
pub fn fine_check(
    pair_ab: &[f64],
    pair_ad: &[f64],
    pair_cb: &[f64],
    pair_cd: &[f64],
) -> Result<FeasibilityResult, LpError> {
    let cs = fine_constraint_set(pair_ab, pair_ad, pair_cb, pair_cd)?;
    lp_feasibility(&cs)
}

/// The constraint set used by `fine_check`.
pub fn fine_constraint_set(
    pair_ab: &[f64],
    pair_ad: &[f64],
    pair_cb: &[f64],
    pair_cd: &[f64],
) -> Result<MarginalConstraintSet, LpError> {
    let mk = |subset: [&str; 2], t: &[f64]| MarginalConstraint {
        subset: subset.iter().map(|s| s.to_string()).collect(),
        target: t.to_vec(),
    };
    MarginalConstraintSet::new(
        vec![
            ("a".into(), 2),
            ("b".into(), 2),
            ("c".into(), 2),
            ("d".into(), 2),
        ],
        vec![
            mk(["a", "b"], pair_ab),
            mk(["a", "d"], pair_ad),
            mk(["c", "b"], pair_cb),
            mk(["c", "d"], pair_cd),
        ],
    )
}

/// Re-derives the claimed evidence by direct arithmetic; no simplex involved.
///
/// Feasible results need a witness that is nonnegative, sums to one, and
/// reproduces every target within 1e-9. Infeasible results need a dual vector
/// whose induced functional is ≥ margin > 1e-9 on every joint distribution
/// while the value demanded by the targets is negative.
pub fn validate_certificate(cs: &MarginalConstraintSet, result: &FeasibilityResult) -> bool {
    let rows = cs.rows();
    if result.feasible {
        let Some(w) = &result.witness else {
            return false;
        };
        if w.len() != cs.joint_dim() || w.iter().any(|v| !v.is_finite() || *v < -FEAS_TOL) {
            return false;
        }
        if (w.iter().sum::<f64>() - 1.0).abs() > FEAS_TOL {
            return false;
        }
        rows.iter().all(|(a, b)| (dot(a, w) - b).abs() <= FEAS_TOL)
    } else {
        let Some(y) = &result.certificate else {
            return false;
        };
        if y.len() != rows.len() || y.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let margin = (0..cs.joint_dim())
            .map(|j| {
                rows.iter()
                    .zip(y)
                    .map(|((a, _), yr)| a[j] * yr)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        let demanded: f64 = rows.iter().zip(y).map(|((_, b), yr)| b * yr).sum();
        margin > FEAS_TOL && demanded < 0.0
    }
}

pub(crate) enum RawOutcome {
    Feasible { x: Vec<f64> },
    Infeasible { cert: Vec<f64>, margin: f64 },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Decides { x ≥ 0 : row_i · x = b_i for all i, Σx = 1 } ≠ ∅ by phase-1
/// simplex. `unit_rows` must index a row block whose coefficients sum to one
/// in every column (used to fold the normalization dual into the returned
/// certificate and to center its margin).
pub(crate) fn solve_equality_feasibility(
    n_vars: usize,
    rows: &[(Vec<f64>, f64)],
    unit_rows: std::ops::Range<usize>,
) -> Result<RawOutcome, LpError> {
    // Equalities are handled as two inequalities: row·x + s = b (s ≥ 0) and
    // row·x - s' = b (s' ≥ 0), then sign-normalized so every rhs is ≥ 0 and
    // one artificial variable per inequality forms the starting basis.
    let mut all_rows: Vec<(&[f64], f64)> = rows.iter().map(|(a, b)| (a.as_slice(), *b)).collect();
    let norm_row: Vec<f64> = vec![1.0; n_vars];
    all_rows.push((&norm_row, 1.0));

    let m = all_rows.len();
    let m2 = 2 * m;
    let n_cols = n_vars + 2 * m2; // structural, slacks, artificials
    let art0 = n_vars + m2;

    let mut tab = vec![vec![0.0f64; n_cols]; m2];
    let mut rhs = vec![0.0f64; m2];
    for (r, (coeffs, b)) in all_rows.iter().enumerate() {
        for (pair, slack_sign) in [(2 * r, 1.0), (2 * r + 1, -1.0)] {
            let flip = if *b < 0.0 { -1.0 } else { 1.0 };
            for (j, &v) in coeffs.iter().enumerate() {
                tab[pair][j] = flip * v;
            }
            tab[pair][n_vars + pair] = flip * slack_sign;
            tab[pair][art0 + pair] = 1.0;
            rhs[pair] = flip * b;
        }
    }

    // Phase-1 objective: minimize the artificial sum. obj[j] holds the
    // reduced profit yᵀA_j − c_j; optimality when all entries ≤ tol.
    let mut obj = vec![0.0f64; n_cols];
    let mut value = 0.0;
    for r in 0..m2 {
        for j in 0..n_cols {
            obj[j] += tab[r][j];
        }
        value += rhs[r];
    }
    for j in art0..n_cols {
        obj[j] -= 1.0;
    }

    let mut basis: Vec<usize> = (art0..n_cols).collect();
    let max_iters = 200_000;
    for iter in 0.. {
        if iter >= max_iters {
            return Err(LpError::Numerical(format!(
                "no convergence after {max_iters} pivots"
            )));
        }
        // Bland: entering column is the smallest improving non-artificial.
        let Some(enter) = (0..art0).find(|&j| obj[j] > FEAS_TOL) else {
            break;
        };
        // Ratio test; ties resolved by smallest basic column index (Bland).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..m2 {
            if tab[r][enter] > FEAS_TOL {
                let ratio = rhs[r] / tab[r][enter];
                let better = ratio < best - 1e-15
                    || ((ratio - best).abs() <= 1e-15
                        && leave.is_some_and(|l| basis[r] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(lr) = leave else {
            return Err(LpError::Numerical(
                "phase-1 column unbounded; inconsistent tableau".into(),
            ));
        };
        // Pivot on (lr, enter).
        let piv = tab[lr][enter];
        for v in tab[lr].iter_mut() {
            *v /= piv;
        }
        rhs[lr] /= piv;
        for r in 0..m2 {
            if r != lr && tab[r][enter].abs() > 0.0 {
                let f = tab[r][enter];
                for j in 0..n_cols {
                    tab[r][j] -= f * tab[lr][j];
                }
                rhs[r] -= f * rhs[lr];
                if rhs[r] < 0.0 && rhs[r] > -1e-12 {
                    rhs[r] = 0.0;
                }
            }
        }
        let f = obj[enter];
        for j in 0..n_cols {
            obj[j] -= f * tab[lr][j];
        }
        value -= f * rhs[lr];
        basis[lr] = enter;
    }

    if value.abs() <= FEAS_TOL {
        let mut x = vec![0.0f64; n_vars];
        for (r, &col) in basis.iter().enumerate() {
            if col < n_vars {
                x[col] = rhs[r].max(0.0);
            }
        }
        return Ok(RawOutcome::Feasible { x });
    }

    // Infeasible: read the phase-1 duals off the artificial columns
    // (y_r = obj[art_r] + 1), map back through the sign normalization, and
    // sum each inequality pair into one multiplier per equality row.
    let mut g = vec![0.0f64; m];
    for r in 0..m {
        for pair in [2 * r, 2 * r + 1] {
            let flip = if all_rows[r].1 < 0.0 { -1.0 } else { 1.0 };
            g[r] += flip * (obj[art0 + pair] + 1.0);
        }
    }
    // g satisfies gᵀA ≤ 0 columnwise with gᵀb = phase-1 value > 0; the spec
    // form is the negation.
    let mut h: Vec<f64> = g.iter().map(|v| -v).collect();
    // Fold the normalization row's dual into the unit block, then center so
    // the margin is positive and the demanded value negative.
    let h_norm = h.pop().expect("normalization row present");
    for r in unit_rows.clone() {
        h[r] += h_norm;
    }
    let eval = |h: &[f64]| -> (f64, f64) {
        let margin = (0..n_vars)
            .map(|j| {
                rows.iter()
                    .zip(h)
                    .map(|((a, _), yr)| a[j] * yr)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        let demanded = rows.iter().zip(h).map(|((_, b), yr)| b * yr).sum::<f64>();
        (margin, demanded)
    };
    let (margin0, demanded0) = eval(&h);
    let shift = -(margin0 + demanded0) / 2.0;
    for r in unit_rows {
        h[r] += shift;
    }
    let scale = h.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale <= 0.0 {
        return Err(LpError::Numerical("degenerate certificate".into()));
    }
    for v in h.iter_mut() {
        *v /= scale;
    }
    let (margin, _) = eval(&h);
    Ok(RawOutcome::Infeasible { cert: h, margin })
}
