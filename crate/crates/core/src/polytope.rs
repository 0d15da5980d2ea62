//! Local-polytope geometry: deterministic-strategy vertices, convex
//! membership, and CHSH-style inequality evaluation, including the
//! prepare-and-measure route to noncontextuality violations.

use crate::behavior::{Behavior, BehaviorError, PROB_TOL};
use crate::lp::{
    lp_feasibility, FeasibilityResult, LpError, MarginalConstraint, MarginalConstraintSet,
};
use crate::quantum::{make_bloch_state, pauli_xz_measurement, BlochAngle};
use thiserror::Error;

/// Cap on the number of enumerated deterministic strategies.
pub const MAX_VERTICES: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("behavior shape does not match scenario: {0}")]
    ShapeMismatch(String),
    #[error("{0} deterministic strategies exceed the enumeration cap")]
    SizeCap(usize),
    #[error(
        "preparation ensembles are not operationally equivalent: max deviation {max_abs_diff}"
    )]
    MixingEquivalenceViolated { max_abs_diff: f64 },
    #[error("sign map invalid: {0}")]
    BadSignMap(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// Index ranges of a bipartite measurement scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioShape {
    pub n_settings_alice: usize,
    pub n_settings_bob: usize,
    pub n_outcomes_alice: usize,
    pub n_outcomes_bob: usize,
}

impl ScenarioShape {
    pub fn new(
        n_settings_alice: usize,
        n_settings_bob: usize,
        n_outcomes_alice: usize,
        n_outcomes_bob: usize,
    ) -> Result<Self, PolytopeError> {
        if n_settings_alice == 0
            || n_settings_bob == 0
            || n_outcomes_alice == 0
            || n_outcomes_bob == 0
        {
            return Err(PolytopeError::ShapeMismatch(
                "all setting and outcome counts must be at least 1".into(),
            ));
        }
        Ok(ScenarioShape {
            n_settings_alice,
            n_settings_bob,
            n_outcomes_alice,
            n_outcomes_bob,
        })
    }

    /// Number of deterministic strategies.
    pub fn vertex_count(&self) -> usize {
        self.n_outcomes_alice
            .checked_pow(self.n_settings_alice as u32)
            .and_then(|a| {
                self.n_outcomes_bob
                    .checked_pow(self.n_settings_bob as u32)
                    .and_then(|b| a.checked_mul(b))
            })
            .unwrap_or(usize::MAX)
    }

    fn matches(&self, behavior: &Behavior) -> Result<(), PolytopeError> {
        let s = behavior.settings();
        let o = behavior.outcomes();
        let ok = s.len() == 2
            && o.len() == 2
            && s[0].1 == self.n_settings_alice
            && s[1].1 == self.n_settings_bob
            && o[0].1 == self.n_outcomes_alice
            && o[1].1 == self.n_outcomes_bob;
        if ok {
            Ok(())
        } else {
            Err(PolytopeError::ShapeMismatch(format!(
                "expected {}x{} settings with {}x{} outcomes",
                self.n_settings_alice,
                self.n_settings_bob,
                self.n_outcomes_alice,
                self.n_outcomes_bob
            )))
        }
    }
}

/// One local deterministic response: a fixed outcome per setting on each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub alice_map: Vec<usize>,
    pub bob_map: Vec<usize>,
}

impl DeterministicStrategy {
    /// The behavior that plays this strategy with certainty.
    pub fn behavior(&self, shape: &ScenarioShape) -> Behavior {
        let mut table = Vec::with_capacity(shape.n_settings_alice * shape.n_settings_bob);
        for x in 0..shape.n_settings_alice {
            for y in 0..shape.n_settings_bob {
                let mut row = vec![0.0; shape.n_outcomes_alice * shape.n_outcomes_bob];
                row[self.alice_map[x] * shape.n_outcomes_bob + self.bob_map[y]] = 1.0;
                table.push(row);
            }
        }
        Behavior::new(
            vec![
                ("x".into(), shape.n_settings_alice),
                ("y".into(), shape.n_settings_bob),
            ],
            vec![
                ("a".into(), shape.n_outcomes_alice),
                ("b".into(), shape.n_outcomes_bob),
            ],
            table,
        )
        .expect("deterministic table is a valid behavior")
    }
}

fn strategy_maps(n_settings: usize, n_outcomes: usize, mut index: usize) -> Vec<usize> {
    let mut map = vec![0usize; n_settings];
    for slot in map.iter_mut().rev() {
        *slot = index % n_outcomes;
        index /= n_outcomes;
    }
    map
}

/// All deterministic strategies of the scenario, as behaviors. The order is
/// row-major over (alice response table, bob response table), matching the
/// weight vector returned by `membership`.
pub fn enumerate_vertices(shape: &ScenarioShape) -> Result<Vec<Behavior>, PolytopeError> {
    let total = shape.vertex_count();
    if total > MAX_VERTICES {
        return Err(PolytopeError::SizeCap(total));
    }
    let n_alice = shape.n_outcomes_alice.pow(shape.n_settings_alice as u32);
    let n_bob = shape.n_outcomes_bob.pow(shape.n_settings_bob as u32);
    let mut out = Vec::with_capacity(total);
    for ia in 0..n_alice {
        let alice_map = strategy_maps(shape.n_settings_alice, shape.n_outcomes_alice, ia);
        for ib in 0..n_bob {
            let strat = DeterministicStrategy {
                alice_map: alice_map.clone(),
                bob_map: strategy_maps(shape.n_settings_bob, shape.n_outcomes_bob, ib),
            };
            out.push(strat.behavior(shape));
        }
    }
    Ok(out)
}

/// Decides whether the behavior is a convex combination of deterministic
/// strategies. Equivalent to asking for a joint distribution over one
/// response variable per setting, so the decision reduces to a marginal
/// problem: the witness is the weight vector over `enumerate_vertices`
/// order, and the certificate is a Bell-type functional over the behavior's
/// entries.
pub fn membership(
    behavior: &Behavior,
    shape: &ScenarioShape,
) -> Result<FeasibilityResult, PolytopeError> {
    shape.matches(behavior)?;
    let mut variables: Vec<(String, usize)> = Vec::new();
    for x in 0..shape.n_settings_alice {
        variables.push((format!("a{x}"), shape.n_outcomes_alice));
    }
    for y in 0..shape.n_settings_bob {
        variables.push((format!("b{y}"), shape.n_outcomes_bob));
    }
    let mut constraints = Vec::new();
    for x in 0..shape.n_settings_alice {
        for y in 0..shape.n_settings_bob {
            constraints.push(MarginalConstraint {
                subset: vec![format!("a{x}"), format!("b{y}")],
                target: behavior.prob_row(&[x, y]).to_vec(),
            });
        }
    }
    let cs = MarginalConstraintSet::new(variables, constraints)?;
    Ok(lp_feasibility(&cs)?)
}

/// Per-setting outcome sign conventions for correlator evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSignMap {
    pub alice: Vec<i8>,
    pub bob: Vec<i8>,
}

impl OutcomeSignMap {
    pub fn identity(n_settings_alice: usize, n_settings_bob: usize) -> Self {
        OutcomeSignMap {
            alice: vec![1; n_settings_alice],
            bob: vec![1; n_settings_bob],
        }
    }

    fn check(&self, behavior: &Behavior) -> Result<(), PolytopeError> {
        if self.alice.len() != behavior.settings()[0].1
            || self.bob.len() != behavior.settings()[1].1
        {
            return Err(PolytopeError::BadSignMap(
                "one sign per setting on each side".into(),
            ));
        }
        if self.alice.iter().chain(&self.bob).any(|s| s.abs() != 1) {
            return Err(PolytopeError::BadSignMap("signs must be ±1".into()));
        }
        Ok(())
    }
}

/// Correlator of two binary outcomes under the map {0 ↦ +1, 1 ↦ −1}, with
/// per-setting sign flips applied.
fn correlator(behavior: &Behavior, signs: &OutcomeSignMap, x: usize, y: usize) -> f64 {
    let row = behavior.prob_row(&[x, y]);
    let sign = (signs.alice[x] * signs.bob[y]) as f64;
    sign * (row[0] - row[1] - row[2] + row[3])
}

/// Largest CHSH combination: max over the four three-plus-one-minus sign
/// patterns of |±E(0,0) ± E(0,1) ± E(1,0) ± E(1,1)|. Values above 2 lie
/// outside the local polytope.
pub fn chsh_value(behavior: &Behavior, signs: &OutcomeSignMap) -> Result<f64, PolytopeError> {
    let s = behavior.settings();
    let o = behavior.outcomes();
    if s.len() != 2 || o.len() != 2 || s[0].1 != 2 || s[1].1 != 2 || o[0].1 != 2 || o[1].1 != 2 {
        return Err(PolytopeError::ShapeMismatch(
            "CHSH needs 2x2 settings with binary outcomes".into(),
        ));
    }
    signs.check(behavior)?;
    let e: Vec<f64> = (0..4)
        .map(|i| correlator(behavior, signs, i / 2, i % 2))
        .collect();
    let mut best: f64 = 0.0;
    for minus in 0..4 {
        let s: f64 = (0..4).map(|i| if i == minus { -e[i] } else { e[i] }).sum();
        best = best.max(s.abs());
    }
    Ok(best)
}

/// Born-rule prepare-and-measure table: preparations are the pure states at
/// the given Bloch-circle angles, measurements the projective readouts at the
/// given angles; outcome 0 projects onto the measurement-angle state.
pub fn prepare_measure_behavior(prep_angles: &[f64], meas_angles: &[f64]) -> Behavior {
    let mut table = Vec::with_capacity(prep_angles.len() * meas_angles.len());
    for &theta in prep_angles {
        let state = make_bloch_state(BlochAngle::new(theta));
        for &mu in meas_angles {
            let meas = pauli_xz_measurement(BlochAngle::new(mu));
            table.push(state.born(&meas).expect("qubit readout"));
        }
    }
    Behavior::new(
        vec![
            ("p".into(), prep_angles.len()),
            ("m".into(), meas_angles.len()),
        ],
        vec![("b".into(), 2)],
        table,
    )
    .expect("Born rows form a valid behavior")
}

/// Noncontextuality-inequality value of a 4-preparation, 2-measurement,
/// binary-outcome table.
///
/// Preparation index p encodes a steering-side setting/outcome pair
/// (x, a) = (p / 2, p % 2). The two ensembles {p=0, p=1} and {p=2, p=3} must
/// be operationally equivalent — their uniform mixtures indistinguishable on
/// every measurement within 1e-9 — which is what makes the table a valid
/// image of a bipartite behavior. The returned value is `chsh_value` of that
/// image; above 2 no noncontextual model exists.
pub fn nc_inequality_value(pm_behavior: &Behavior) -> Result<f64, PolytopeError> {
    let s = pm_behavior.settings();
    let o = pm_behavior.outcomes();
    if s.len() != 2 || s[0].1 != 4 || s[1].1 != 2 || o.len() != 1 || o[0].1 != 2 {
        return Err(PolytopeError::ShapeMismatch(
            "need 4 preparations, 2 measurements, binary outcomes".into(),
        ));
    }
    let mut worst: f64 = 0.0;
    for m in 0..2 {
        for b in 0..2 {
            let first = pm_behavior.prob(&[0, m], &[b]) + pm_behavior.prob(&[1, m], &[b]);
            let second = pm_behavior.prob(&[2, m], &[b]) + pm_behavior.prob(&[3, m], &[b]);
            worst = worst.max((first - second).abs() / 2.0);
        }
    }
    if worst > PROB_TOL {
        return Err(PolytopeError::MixingEquivalenceViolated {
            max_abs_diff: worst,
        });
    }
    // Image behavior: Alice's setting/outcome select the preparation (each
    // outcome equally likely within an ensemble), Bob measures it.
    let mut table = Vec::with_capacity(4);
    for x in 0..2 {
        for y in 0..2 {
            let mut row = vec![0.0; 4];
            for a in 0..2 {
                for b in 0..2 {
                    row[a * 2 + b] = 0.5 * pm_behavior.prob(&[2 * x + a, y], &[b]);
                }
            }
            table.push(row);
        }
    }
    let image = Behavior::new(
        vec![("x".into(), 2), ("y".into(), 2)],
        vec![("a".into(), 2), ("b".into(), 2)],
        table,
    )
    .expect("image rows are normalized by construction");
    chsh_value(&image, &OutcomeSignMap::identity(2, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::validate_certificate;
    use crate::lp::FEAS_TOL;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    const PI: f64 = std::f64::consts::PI;

    fn chsh_shape() -> ScenarioShape {
        ScenarioShape::new(2, 2, 2, 2).unwrap()
    }

    fn correlated_behavior(e: [f64; 4]) -> Behavior {
        let table = e
            .iter()
            .map(|&v| {
                vec![
                    (1.0 + v) / 4.0,
                    (1.0 - v) / 4.0,
                    (1.0 - v) / 4.0,
                    (1.0 + v) / 4.0,
                ]
            })
            .collect();
        Behavior::new(
            vec![("x".into(), 2), ("y".into(), 2)],
            vec![("a".into(), 2), ("b".into(), 2)],
            table,
        )
        .unwrap()
    }

    #[test]
    fn vertex_counts_match_strategy_counting() {
        assert_eq!(enumerate_vertices(&chsh_shape()).unwrap().len(), 16);
        let shape = ScenarioShape::new(3, 3, 2, 2).unwrap();
        assert_eq!(enumerate_vertices(&shape).unwrap().len(), 64);
    }

    #[test]
    fn vertices_are_deterministic_and_distinct() {
        let vertices = enumerate_vertices(&chsh_shape()).unwrap();
        for v in &vertices {
            for x in 0..2 {
                for y in 0..2 {
                    let row = v.prob_row(&[x, y]);
                    assert_eq!(row.iter().filter(|p| **p == 1.0).count(), 1);
                    assert_eq!(row.iter().filter(|p| **p == 0.0).count(), 3);
                }
            }
        }
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                assert_ne!(vertices[i], vertices[j]);
            }
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let shape = ScenarioShape::new(8, 8, 8, 8).unwrap();
        assert!(matches!(
            enumerate_vertices(&shape),
            Err(PolytopeError::SizeCap(_))
        ));
    }

    #[test]
    fn each_vertex_is_a_member_with_weight_on_itself() {
        let shape = chsh_shape();
        let vertices = enumerate_vertices(&shape).unwrap();
        for (i, v) in vertices.iter().enumerate() {
            let res = membership(v, &shape).unwrap();
            assert!(res.feasible);
            let w = res.witness.as_ref().unwrap();
            assert_eq!(w.len(), 16);
            assert!((w[i] - 1.0).abs() <= 1e-9, "vertex {i} weight {}", w[i]);
        }
    }

    #[test]
    fn tsirelson_behavior_is_outside_with_valid_certificate() {
        // Frozen correlators of the singlet protocol at the standard angles.
        let behavior = correlated_behavior([-R, -R, -R, R]);
        let res = membership(&behavior, &chsh_shape()).unwrap();
        assert!(!res.feasible);
        assert!(res.slack > FEAS_TOL);
        let signs = OutcomeSignMap::identity(2, 2);
        let v = chsh_value(&behavior, &signs).unwrap();
        assert!((v - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn membership_witness_reconstructs_the_behavior() {
        // A strictly interior point: 60% uniform noise over a quantum point.
        let e = 0.4 * R;
        let behavior = correlated_behavior([e, e, e, -e]);
        let shape = chsh_shape();
        let res = membership(&behavior, &shape).unwrap();
        assert!(res.feasible);
        let w = res.witness.as_ref().unwrap();
        let vertices = enumerate_vertices(&shape).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for ab in 0..4 {
                    let mixed: f64 = w
                        .iter()
                        .zip(&vertices)
                        .map(|(wt, v)| wt * v.prob_row(&[x, y])[ab])
                        .sum();
                    assert!((mixed - behavior.prob_row(&[x, y])[ab]).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn uniform_noise_is_member_and_chsh_zero() {
        let behavior = correlated_behavior([0.0; 4]);
        let res = membership(&behavior, &chsh_shape()).unwrap();
        assert!(res.feasible);
        let v = chsh_value(&behavior, &OutcomeSignMap::identity(2, 2)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn deterministic_vertices_score_exactly_two() {
        let signs = OutcomeSignMap::identity(2, 2);
        for v in enumerate_vertices(&chsh_shape()).unwrap() {
            let s = chsh_value(&v, &signs).unwrap();
            assert!((s - 2.0).abs() < 1e-12, "vertex scored {s}");
        }
    }

    #[test]
    fn chsh_invariant_under_relabeling_with_sign_flip() {
        let mut lcg = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((lcg >> 11) as f64) / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let alpha = [rnd() * 2.0 - 1.0, rnd() * 2.0 - 1.0];
            let beta = [rnd() * 2.0 - 1.0, rnd() * 2.0 - 1.0];
            let mut table = Vec::new();
            for x in 0..2 {
                for y in 0..2 {
                    let lo = -1.0 + (alpha[x] + beta[y]).abs();
                    let hi = 1.0 - (alpha[x] - beta[y]).abs();
                    let e = lo + rnd() * (hi - lo);
                    let mut row = vec![0.0; 4];
                    for a in 0..2 {
                        for b in 0..2 {
                            let sa = if a == 0 { 1.0 } else { -1.0 };
                            let sb = if b == 0 { 1.0 } else { -1.0 };
                            row[a * 2 + b] =
                                (1.0 + sa * alpha[x] + sb * beta[y] + sa * sb * e) / 4.0;
                        }
                    }
                    table.push(row);
                }
            }
            let behavior = Behavior::new(
                vec![("x".into(), 2), ("y".into(), 2)],
                vec![("a".into(), 2), ("b".into(), 2)],
                table.clone(),
            )
            .unwrap();
            let base = chsh_value(&behavior, &OutcomeSignMap::identity(2, 2)).unwrap();

            // Relabel Alice's outcome on setting x=1 and flip that sign.
            let mut flipped = table;
            for y in 0..2 {
                let row = &mut flipped[2 + y];
                row.swap(0, 2);
                row.swap(1, 3);
            }
            let relabeled = Behavior::new(
                vec![("x".into(), 2), ("y".into(), 2)],
                vec![("a".into(), 2), ("b".into(), 2)],
                flipped,
            )
            .unwrap();
            let signs = OutcomeSignMap {
                alice: vec![1, -1],
                bob: vec![1, 1],
            };
            let same = chsh_value(&relabeled, &signs).unwrap();
            assert!((base - same).abs() < 1e-12, "{base} vs {same}");
        }
    }

    #[test]
    fn canonical_prepare_measure_table_reaches_tsirelson() {
        let pm = prepare_measure_behavior(
            &[PI / 4.0, 5.0 * PI / 4.0, 3.0 * PI / 4.0, 7.0 * PI / 4.0],
            &[0.0, PI / 2.0],
        );
        let v = nc_inequality_value(&pm).unwrap();
        assert!((v - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn pauli_eigenstate_table_scores_exactly_two() {
        // Ensembles {Z+, Z−} and {X+, X−}, measured in Z and X.
        let pm = prepare_measure_behavior(&[0.0, PI, PI / 2.0, 3.0 * PI / 2.0], &[0.0, PI / 2.0]);
        let v = nc_inequality_value(&pm).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn uniform_measurements_score_zero() {
        let table = vec![vec![0.5, 0.5]; 8];
        let pm = Behavior::new(
            vec![("p".into(), 4), ("m".into(), 2)],
            vec![("b".into(), 2)],
            table,
        )
        .unwrap();
        assert_eq!(nc_inequality_value(&pm).unwrap(), 0.0);
    }

    #[test]
    fn mixing_equivalence_violation_is_an_error() {
        // First ensemble averages to Z+-biased, second to uniform.
        let pm = prepare_measure_behavior(&[0.0, 0.0, PI / 2.0, 3.0 * PI / 2.0], &[0.0, PI / 2.0]);
        match nc_inequality_value(&pm) {
            Err(PolytopeError::MixingEquivalenceViolated { max_abs_diff }) => {
                assert!(
                    (max_abs_diff - 0.5).abs() < 1e-12,
                    "deviation {max_abs_diff}"
                )
            }
            other => panic!("expected mixing violation, got {other:?}"),
        }
    }

    #[test]
    fn membership_certificates_validate_both_ways() {
        let shape = chsh_shape();
        let inside = correlated_behavior([0.3, 0.1, -0.2, 0.4]);
        let res = membership(&inside, &shape).unwrap();
        assert!(res.feasible);

        let outside = correlated_behavior([-R, -R, -R, R]);
        let res = membership(&outside, &shape).unwrap();
        assert!(!res.feasible);
        // Rebuild the underlying constraint set to validate independently.
        let mut variables: Vec<(String, usize)> = Vec::new();
        for x in 0..2 {
            variables.push((format!("a{x}"), 2));
        }
        for y in 0..2 {
            variables.push((format!("b{y}"), 2));
        }
        let mut constraints = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                constraints.push(MarginalConstraint {
                    subset: vec![format!("a{x}"), format!("b{y}")],
                    target: outside.prob_row(&[x, y]).to_vec(),
                });
            }
        }
        let cs = MarginalConstraintSet::new(variables, constraints).unwrap();
        assert!(validate_certificate(&cs, &res));
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let behavior = correlated_behavior([0.0; 4]);
        let shape = ScenarioShape::new(3, 2, 2, 2).unwrap();
        assert!(matches!(
            membership(&behavior, &shape),
            Err(PolytopeError::ShapeMismatch(_))
        ));
    }
}
