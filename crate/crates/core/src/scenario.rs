//! Step-by-step simulators for the friend protocols.
//!
//! Friends (Charlie, Debbie) measure via explicit unitary dilations into
//! memory registers; supervisors (Alice, Bob) either take the friend's
//! outcome as their own, or undo the friend's measurement and act on the
//! restored system. All probabilities are exact Born values — nothing is
//! sampled. The "Eve tap" mode copies a friend's memory into an extra
//! register that the rest of the protocol never touches, giving empirical
//! access to joints over outcomes the real protocol discards.

use crate::behavior::{Behavior, BehaviorError};
use crate::joint::JointTable;
use crate::quantum::{
    make_bloch_state, measurement_dilation, mix, pauli_xz_measurement, trace_distance, BlochAngle,
    PureState, QuantumError, UnitaryOp, ALG_TOL,
};
use crate::registers::RegisterState;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("preparation prior is not a distribution: {0}")]
    InvalidPrior(String),
    #[error("setting {name}={value} outside supported range 0..{max}")]
    BadSetting {
        name: &'static str,
        value: usize,
        max: usize,
    },
    #[error("shared state must live on two qubits, got dimension {0}")]
    BadSharedState(usize),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// Single-system protocol: a qubit prepared in one of two states is measured
/// by Charlie, optionally un-measured by Alice (x=1), then measured by
/// Debbie, optionally un-measured by Bob who reads the system directly (y=1).
#[derive(Debug, Clone)]
pub struct OFConfig {
    /// States P_0, P_1; the preparation label a is Alice's x=1 outcome.
    pub preparation_angles: (BlochAngle, BlochAngle),
    pub charlie_basis_angle: BlochAngle,
    pub debbie_basis_angle: BlochAngle,
    /// Bob's direct measurement when y=1.
    pub bob_basis_angle: BlochAngle,
    /// Distribution of the preparation label; uniform in the protocol.
    pub preparation_prior: [f64; 2],
}

impl Default for OFConfig {
    fn default() -> Self {
        OFConfig {
            preparation_angles: (BlochAngle::new(FRAC_PI_4), BlochAngle::new(5.0 * FRAC_PI_4)),
            charlie_basis_angle: BlochAngle::new(3.0 * FRAC_PI_4),
            debbie_basis_angle: BlochAngle::new(0.0),
            bob_basis_angle: BlochAngle::new(FRAC_PI_2),
            preparation_prior: [0.5, 0.5],
        }
    }
}

impl OFConfig {
    fn check_prior(&self) -> Result<(), ScenarioError> {
        let [p0, p1] = self.preparation_prior;
        if !(p0 >= 0.0 && p1 >= 0.0) {
            return Err(ScenarioError::InvalidPrior(format!(
                "negative weight in [{p0}, {p1}]"
            )));
        }
        if (p0 + p1 - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::InvalidPrior(format!(
                "weights sum to {}",
                p0 + p1
            )));
        }
        Ok(())
    }

    fn preparation(&self, a: usize) -> PureState {
        let angle = if a == 0 {
            self.preparation_angles.0
        } else {
            self.preparation_angles.1
        };
        make_bloch_state(angle)
    }
}

/// Bipartite protocol: two qubits in a shared state; Charlie measures the
/// first, Debbie the second, each via dilation. Alice (x=1) and Bob (y=1)
/// undo their friend's measurement and measure the restored halves.
#[derive(Debug, Clone)]
pub struct LFConfig {
    pub shared_state: PureState,
    pub charlie_angle: BlochAngle,
    pub debbie_angle: BlochAngle,
    /// Alice's measurement on the first qubit after undoing Charlie.
    pub alice_undo_angle: BlochAngle,
    /// Bob's measurement on the second qubit after undoing Debbie.
    pub bob_undo_angle: BlochAngle,
}

/// The singlet (|01⟩ − |10⟩)/√2.
pub fn singlet_state() -> PureState {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::new(vec![
        Complex64::new(0.0, 0.0),
        r,
        -r,
        Complex64::new(0.0, 0.0),
    ])
    .expect("singlet amplitudes are normalized")
}

impl Default for LFConfig {
    fn default() -> Self {
        LFConfig {
            shared_state: singlet_state(),
            charlie_angle: BlochAngle::new(FRAC_PI_4),
            debbie_angle: BlochAngle::new(0.0),
            alice_undo_angle: BlochAngle::new(-FRAC_PI_4),
            bob_undo_angle: BlochAngle::new(FRAC_PI_2),
        }
    }
}

/// Three-setting extension of the single-system protocol: x=2 undoes Charlie
/// and rotates the system about the Bloch y-axis; y=2 undoes Debbie and
/// measures an alternative basis.
#[derive(Debug, Clone)]
pub struct ExtendedOFConfig {
    pub base: OFConfig,
    /// Signed rotation angle applied to the system when x=2; the Bloch-circle
    /// angle shifts by this amount. The default −π/4 carries the Z
    /// eigenstates onto the Z−X eigenvectors.
    pub alice_x2_rotation_angle: f64,
    /// Bob's measurement when y=2.
    pub bob_y2_basis_angle: BlochAngle,
}

impl Default for ExtendedOFConfig {
    fn default() -> Self {
        ExtendedOFConfig {
            base: OFConfig {
                preparation_angles: (BlochAngle::new(0.0), BlochAngle::new(PI)),
                charlie_basis_angle: BlochAngle::new(FRAC_PI_2),
                debbie_basis_angle: BlochAngle::new(FRAC_PI_2),
                bob_basis_angle: BlochAngle::new(0.0),
                preparation_prior: [0.5, 0.5],
            },
            alice_x2_rotation_angle: -FRAC_PI_4,
            bob_y2_basis_angle: BlochAngle::new(FRAC_PI_4),
        }
    }
}

/// Which registers hold the readable outcome variables after a run.
struct VarSlots {
    c: Option<usize>,
    d: Option<usize>,
    b: Option<usize>,
}

/// Shared engine for the single-system protocol and its x,y=2 extension.
struct OfFamily<'a> {
    cfg: &'a OFConfig,
    x2_rotation: Option<f64>,
    y2_basis: Option<BlochAngle>,
}

const S: usize = 0;
const MC: usize = 1;
const MD: usize = 2;

impl OfFamily<'_> {
    fn n_settings(&self) -> usize {
        if self.x2_rotation.is_some() {
            3
        } else {
            2
        }
    }

    fn check_setting(&self, name: &'static str, value: usize) -> Result<(), ScenarioError> {
        if value >= self.n_settings() {
            return Err(ScenarioError::BadSetting {
                name,
                value,
                max: self.n_settings(),
            });
        }
        Ok(())
    }

    /// Preparation, Charlie's dilation, optional Eve copy, and Alice's
    /// setting. Returns the state and Eve's register index if tapped.
    fn run_alice_side(
        &self,
        a: usize,
        x: usize,
        tap_c: bool,
    ) -> Result<(RegisterState, Option<usize>), ScenarioError> {
        let zero = PureState::basis(2, 0);
        let init = self.cfg.preparation(a).tensor(&zero).tensor(&zero);
        let mut st = RegisterState::from_state(&init, &[2, 2, 2])?;
        let ec = tap_c.then(|| st.append(&zero));
        let u_c = measurement_dilation(&pauli_xz_measurement(self.cfg.charlie_basis_angle));
        st.apply(&u_c, &[S, MC])?;
        if let Some(e) = ec {
            st.cnot_copy(MC, e)?;
        }
        match x {
            0 => {}
            1 => st.apply(&u_c.adjoint(), &[S, MC])?,
            _ => {
                st.apply(&u_c.adjoint(), &[S, MC])?;
                let phi = self.x2_rotation.expect("x=2 only in the extended protocol");
                st.apply(&UnitaryOp::bloch_rotation(phi), &[S])?;
            }
        }
        Ok((st, ec))
    }

    /// Debbie's dilation, optional Eve copy, and Bob's setting.
    fn run_bob_side(
        &self,
        st: &mut RegisterState,
        y: usize,
        tap_d: bool,
    ) -> Result<Option<usize>, ScenarioError> {
        let ed = tap_d.then(|| st.append(&PureState::basis(2, 0)));
        let u_d = measurement_dilation(&pauli_xz_measurement(self.cfg.debbie_basis_angle));
        st.apply(&u_d, &[S, MD])?;
        if let Some(e) = ed {
            st.cnot_copy(MD, e)?;
        }
        if y >= 1 {
            st.apply(&u_d.adjoint(), &[S, MD])?;
            let basis = if y == 1 {
                self.cfg.bob_basis_angle
            } else {
                self.y2_basis.expect("y=2 only in the extended protocol")
            };
            st.apply(&UnitaryOp::bloch_rotation(-basis.radians()), &[S])?;
        }
        Ok(ed)
    }

    /// Joint distribution over the preparation label and every outcome
    /// variable available under the given settings and taps, in the fixed
    /// order (a, c, d, b).
    fn joint(
        &self,
        x: usize,
        y: usize,
        tap_c: bool,
        tap_d: bool,
    ) -> Result<JointTable, ScenarioError> {
        self.check_setting("x", x)?;
        self.check_setting("y", y)?;
        self.cfg.check_prior()?;
        let mut vars: Vec<(String, usize)> = vec![("a".into(), 2)];
        let mut probs: Option<Vec<f64>> = None;
        for a in 0..2 {
            let (mut st, ec) = self.run_alice_side(a, x, tap_c)?;
            let ed = self.run_bob_side(&mut st, y, tap_d)?;
            let slots = VarSlots {
                c: if tap_c {
                    ec
                } else if x == 0 {
                    Some(MC)
                } else {
                    None
                },
                d: if tap_d {
                    ed
                } else if y == 0 {
                    Some(MD)
                } else {
                    None
                },
                b: (y >= 1).then_some(S),
            };
            let mut regs = Vec::new();
            for (name, slot) in [("c", slots.c), ("d", slots.d), ("b", slots.b)] {
                if let Some(r) = slot {
                    if a == 0 {
                        vars.push((name.into(), 2));
                    }
                    regs.push(r);
                }
            }
            let block = st.probabilities(&regs);
            let all = probs.get_or_insert_with(|| vec![0.0; 2 * block.len()]);
            for (i, v) in block.iter().enumerate() {
                all[a * block.len() + i] += self.cfg.preparation_prior[a] * v;
            }
        }
        Ok(JointTable::new(
            vars,
            probs.expect("two preparation branches"),
        )?)
    }
}

fn behavior_from_joints<F>(n_settings: usize, mut joint_at: F) -> Result<Behavior, ScenarioError>
where
    F: FnMut(usize, usize) -> Result<JointTable, ScenarioError>,
{
    let mut table = Vec::with_capacity(n_settings * n_settings);
    for x in 0..n_settings {
        for y in 0..n_settings {
            let alice_var = if x == 0 { "c" } else { "a" };
            let bob_var = if y == 0 { "d" } else { "b" };
            let pair = joint_at(x, y)?.marginal(&[alice_var, bob_var])?;
            table.push(pair.probs().to_vec());
        }
    }
    Ok(Behavior::new(
        vec![("x".into(), n_settings), ("y".into(), n_settings)],
        vec![("alice".into(), 2), ("bob".into(), 2)],
        table,
    )?)
}

/// Empirical tables of the single-system protocol, one row per setting pair.
/// Alice's observed variable is Charlie's outcome c when x=0 and the
/// preparation label a when x=1; Bob's is Debbie's outcome d when y=0 and
/// his direct outcome b when y=1.
pub fn run_of_scenario(cfg: &OFConfig) -> Result<Behavior, ScenarioError> {
    let fam = OfFamily {
        cfg,
        x2_rotation: None,
        y2_basis: None,
    };
    behavior_from_joints(2, |x, y| fam.joint(x, y, false, false))
}

/// Empirical tables of the three-setting extension; same observed-variable
/// convention with Alice's variable a for x ∈ {1, 2} and Bob's b for
/// y ∈ {1, 2}.
pub fn run_extended_of_scenario(cfg: &ExtendedOFConfig) -> Result<Behavior, ScenarioError> {
    let fam = OfFamily {
        cfg: &cfg.base,
        x2_rotation: Some(cfg.alice_x2_rotation_angle),
        y2_basis: Some(cfg.bob_y2_basis_angle),
    };
    behavior_from_joints(3, |x, y| fam.joint(x, y, false, false))
}

pub(crate) fn of_tapped_joint(
    cfg: &OFConfig,
    x: usize,
    y: usize,
    tap_c: bool,
    tap_d: bool,
) -> Result<JointTable, ScenarioError> {
    OfFamily {
        cfg,
        x2_rotation: None,
        y2_basis: None,
    }
    .joint(x, y, tap_c, tap_d)
}

pub(crate) fn extended_of_tapped_joint(
    cfg: &ExtendedOFConfig,
    x: usize,
    y: usize,
    tap_c: bool,
    tap_d: bool,
) -> Result<JointTable, ScenarioError> {
    OfFamily {
        cfg: &cfg.base,
        x2_rotation: Some(cfg.alice_x2_rotation_angle),
        y2_basis: Some(cfg.bob_y2_basis_angle),
    }
    .joint(x, y, tap_c, tap_d)
}

/// A protocol family Eve can tap.
#[derive(Debug, Clone, Copy)]
pub enum EveScenario<'a> {
    Of(&'a OFConfig),
    ExtendedOf(&'a ExtendedOFConfig),
}

/// Runs the protocol with Eve coherently copying Charlie's memory right
/// after his measurement; her register is never touched again. Returns the
/// joint over (a, c, d-or-b) with c read from Eve's copy, so it exists even
/// when x ≥ 1 undoes Charlie's memory.
pub fn eve_tap_run(
    scenario: EveScenario<'_>,
    x: usize,
    y: usize,
) -> Result<JointTable, ScenarioError> {
    let joint = match scenario {
        EveScenario::Of(cfg) => of_tapped_joint(cfg, x, y, true, false),
        EveScenario::ExtendedOf(cfg) => extended_of_tapped_joint(cfg, x, y, true, false),
    }?;
    let bob_var = if y == 0 { "d" } else { "b" };
    Ok(joint.marginal(&["a", "c", bob_var])?)
}

/// Registers of the bipartite protocol.
const R2: usize = 0;
const S2: usize = 1;
const MC2: usize = 2;
const MD2: usize = 3;

pub(crate) fn lf_tapped_joint(
    cfg: &LFConfig,
    x: usize,
    y: usize,
    tap_c: bool,
    tap_d: bool,
) -> Result<JointTable, ScenarioError> {
    if cfg.shared_state.dim() != 4 {
        return Err(ScenarioError::BadSharedState(cfg.shared_state.dim()));
    }
    for (name, value) in [("x", x), ("y", y)] {
        if value >= 2 {
            return Err(ScenarioError::BadSetting {
                name: if name == "x" { "x" } else { "y" },
                value,
                max: 2,
            });
        }
    }
    let zero = PureState::basis(2, 0);
    let init = cfg.shared_state.tensor(&zero).tensor(&zero);
    let mut st = RegisterState::from_state(&init, &[2, 2, 2, 2])?;
    let ec = tap_c.then(|| st.append(&zero));
    let ed = tap_d.then(|| st.append(&zero));
    let u_c = measurement_dilation(&pauli_xz_measurement(cfg.charlie_angle));
    st.apply(&u_c, &[R2, MC2])?;
    if let Some(e) = ec {
        st.cnot_copy(MC2, e)?;
    }
    let u_d = measurement_dilation(&pauli_xz_measurement(cfg.debbie_angle));
    st.apply(&u_d, &[S2, MD2])?;
    if let Some(e) = ed {
        st.cnot_copy(MD2, e)?;
    }
    let mut a_slot = None;
    if x == 1 {
        st.apply(&u_c.adjoint(), &[R2, MC2])?;
        st.apply(
            &UnitaryOp::bloch_rotation(-cfg.alice_undo_angle.radians()),
            &[R2],
        )?;
        a_slot = Some(R2);
    }
    let mut b_slot = None;
    if y == 1 {
        st.apply(&u_d.adjoint(), &[S2, MD2])?;
        st.apply(
            &UnitaryOp::bloch_rotation(-cfg.bob_undo_angle.radians()),
            &[S2],
        )?;
        b_slot = Some(S2);
    }
    let slots = [
        ("a", a_slot),
        (
            "c",
            if tap_c {
                ec
            } else if x == 0 {
                Some(MC2)
            } else {
                None
            },
        ),
        (
            "d",
            if tap_d {
                ed
            } else if y == 0 {
                Some(MD2)
            } else {
                None
            },
        ),
        ("b", b_slot),
    ];
    let mut vars = Vec::new();
    let mut regs = Vec::new();
    for (name, slot) in slots {
        if let Some(r) = slot {
            vars.push((name.to_string(), 2));
            regs.push(r);
        }
    }
    Ok(JointTable::new(vars, st.probabilities(&regs))?)
}

/// Empirical tables of the bipartite protocol; same observed-variable
/// convention as `run_of_scenario`.
pub fn run_lf_scenario(cfg: &LFConfig) -> Result<Behavior, ScenarioError> {
    behavior_from_joints(2, |x, y| lf_tapped_joint(cfg, x, y, false, false))
}

/// Compares two preparation ensembles as density operators: equivalent when
/// the trace distance of their mixtures vanishes (within 1e-12).
pub fn check_preparation_equivalence(
    lhs: &[(f64, PureState)],
    rhs: &[(f64, PureState)],
) -> Result<(bool, f64), ScenarioError> {
    let a = mix(lhs)?;
    let b = mix(rhs)?;
    let dist = trace_distance(&a, &b)?;
    Ok((dist <= ALG_TOL, dist))
}
