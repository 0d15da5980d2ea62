//! Exact finite-dimensional quantum mechanics on small Hilbert spaces: pure
//! states, density operators, projective measurements, unitaries, tensor
//! products, the Born rule, and unitary measurement dilation.
//!
//! Everything is computed analytically in double precision; construction
//! validates algebraic invariants (normalization, unitarity, projectivity)
//! to 1e-12 so downstream probability errors stay at rounding level.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for algebraic identities checked at construction time.
pub const ALG_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("matrix is not unitary (max |U\u{2020}U - I| = {defect})")]
    NotUnitary { defect: f64 },
    #[error("matrix is not Hermitian (max |M - M\u{2020}| = {defect})")]
    NotHermitian { defect: f64 },
    #[error("operator has trace {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("projectors are not an orthogonal resolution of identity (defect {defect})")]
    NotProjective { defect: f64 },
    #[error("mixture weights invalid: {reason}")]
    BadWeights { reason: String },
}

type Result<T> = std::result::Result<T, QuantumError>;

/// Angle on the Bloch-sphere x–z great circle, normalized to [0, 2π).
///
/// `BlochAngle(θ)` labels the real state cos(θ/2)|0⟩ + sin(θ/2)|1⟩, the +1
/// eigenstate of cos(θ)Z + sin(θ)X. Antipodal angles (θ and θ+π) label
/// orthogonal states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngle(f64);

impl BlochAngle {
    pub fn new(radians: f64) -> Self {
        BlochAngle(radians.rem_euclid(2.0 * std::f64::consts::PI))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// The antipodal angle θ + π, labelling the orthogonal state.
    pub fn antipode(self) -> Self {
        BlochAngle::new(self.0 + std::f64::consts::PI)
    }
}

impl std::fmt::Display for BlochAngle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Normalized pure state on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<Complex64>,
}

impl PureState {
    /// Builds a state from amplitudes, enforcing unit norm within 1e-12.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if (norm - 1.0).abs() > ALG_TOL {
            return Err(QuantumError::NotNormalized { norm });
        }
        Ok(PureState { amps: v })
    }

    /// Computational basis state |k⟩ in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        v[k] = Complex64::new(1.0, 0.0);
        PureState { amps: v }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// |⟨self|other⟩|², the transition probability.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Tensor product; the joint index is i_self * other.dim + i_other.
    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Born probabilities of `meas` on this state.
    pub fn born(&self, meas: &ProjectiveMeasurement) -> Result<Vec<f64>> {
        if meas.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                got: meas.dim(),
            });
        }
        Ok(meas
            .projectors
            .iter()
            .map(|p| {
                let v = p * &self.amps;
                self.amps.dotc(&v).re.max(0.0)
            })
            .collect())
    }
}

/// The real qubit state cos(θ/2)|0⟩ + sin(θ/2)|1⟩ at Bloch angle θ.
pub fn make_bloch_state(angle: BlochAngle) -> PureState {
    let half = angle.radians() / 2.0;
    PureState {
        amps: DVector::from_vec(vec![
            Complex64::new(half.cos(), 0.0),
            Complex64::new(half.sin(), 0.0),
        ]),
    }
}

/// Density operator: Hermitian, unit-trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validates Hermiticity and unit trace to 1e-12 and eigenvalues ≥ -1e-10.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let defect = hermiticity_defect(&mat);
        if defect > ALG_TOL {
            return Err(QuantumError::NotHermitian { defect });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > ALG_TOL || trace.im.abs() > ALG_TOL {
            return Err(QuantumError::TraceNotOne { trace: trace.re });
        }
        let min_eigenvalue = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -1e-10 {
            return Err(QuantumError::NotPositive { min_eigenvalue });
        }
        Ok(DensityOperator { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            mat: self.mat.kronecker(&other.mat),
        }
    }
}

/// Unitary operator; construction checks U†U = I within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    mat: DMatrix<Complex64>,
}

impl UnitaryOp {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(QuantumError::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        let prod = mat.adjoint() * &mat;
        let defect = identity_defect(&prod);
        if defect > ALG_TOL {
            return Err(QuantumError::NotUnitary { defect });
        }
        Ok(UnitaryOp { mat })
    }

    pub fn identity(dim: usize) -> Self {
        UnitaryOp {
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// Rotation about the Bloch y-axis mapping Bloch angle θ to θ + φ:
    /// rows (cos φ/2, −sin φ/2) and (sin φ/2, cos φ/2).
    pub fn bloch_rotation(phi: f64) -> Self {
        let (s, c) = (phi / 2.0).sin_cos();
        UnitaryOp {
            mat: DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(c, 0.0),
                    Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(c, 0.0),
                ],
            ),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn adjoint(&self) -> UnitaryOp {
        UnitaryOp {
            mat: self.mat.adjoint(),
        }
    }

    pub fn tensor(&self, other: &UnitaryOp) -> UnitaryOp {
        UnitaryOp {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        if state.dim() != self.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        Ok(PureState {
            amps: &self.mat * state.amplitudes(),
        })
    }
}

/// Projective measurement: orthogonal projectors resolving the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<DMatrix<Complex64>>,
}

impl ProjectiveMeasurement {
    /// Validates Π_i† = Π_i, Π_iΠ_j = δ_ij Π_i and ΣΠ_i = I within 1e-12.
    pub fn new(projectors: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(QuantumError::NotProjective { defect: f64::NAN });
        }
        let dim = projectors[0].nrows();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        let mut defect: f64 = 0.0;
        for (i, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    got: p.nrows(),
                });
            }
            defect = defect.max(hermiticity_defect(p));
            for (j, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let target = if i == j {
                    p.clone()
                } else {
                    DMatrix::zeros(dim, dim)
                };
                defect = defect.max((prod - target).camax());
            }
            sum += p;
        }
        defect = defect.max(identity_defect(&sum));
        if defect > ALG_TOL {
            return Err(QuantumError::NotProjective { defect });
        }
        Ok(ProjectiveMeasurement { projectors })
    }

    /// Measurement with rank-1 projectors onto the given orthonormal states.
    pub fn from_basis(states: &[PureState]) -> Result<Self> {
        ProjectiveMeasurement::new(
            states
                .iter()
                .map(|s| s.amplitudes() * s.amplitudes().adjoint())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn n_outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn projector(&self, outcome: usize) -> &DMatrix<Complex64> {
        &self.projectors[outcome]
    }
}

/// Qubit measurement along the x–z great circle: outcome 0 projects onto the
/// state at `angle`, outcome 1 onto its antipode. `angle` = 0 is Pauli Z,
/// `angle` = π/2 is Pauli X.
pub fn pauli_xz_measurement(angle: BlochAngle) -> ProjectiveMeasurement {
    let plus = make_bloch_state(angle);
    let minus = make_bloch_state(angle.antipode());
    ProjectiveMeasurement::from_basis(&[plus, minus]).expect("antipodal states are orthonormal")
}

/// Born probabilities tr(Π_k ρ) for each outcome.
pub fn born(rho: &DensityOperator, meas: &ProjectiveMeasurement) -> Result<Vec<f64>> {
    if meas.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            got: meas.dim(),
        });
    }
    Ok(meas
        .projectors
        .iter()
        .map(|p| (p * rho.matrix()).trace().re.max(0.0))
        .collect())
}

/// Unitary dilation of a projective measurement onto system ⊗ memory, with
/// memory dimension equal to the number of outcomes:
///
///   U (|ψ⟩ ⊗ |m⟩) = Σ_c (Π_c |ψ⟩) ⊗ |m ⊕ c⟩   (⊕ mod #outcomes)
///
/// On the |0⟩ memory sector this records the outcome, U(|ψ⟩⊗|0⟩) =
/// Σ_c Π_c|ψ⟩ ⊗ |c⟩; the completion on other memory states is the
/// generalized CNOT in the measurement eigenbasis, which makes U unitary.
pub fn measurement_dilation(meas: &ProjectiveMeasurement) -> UnitaryOp {
    let n_sys = meas.dim();
    let n_out = meas.n_outcomes();
    let dim = n_sys * n_out;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for c in 0..n_out {
        let p = meas.projector(c);
        for m in 0..n_out {
            let m_to = (m + c) % n_out;
            // Block (m_to, m) accumulates Π_c.
            for i in 0..n_sys {
                for j in 0..n_sys {
                    mat[(i * n_out + m_to, j * n_out + m)] += p[(i, j)];
                }
            }
        }
    }
    UnitaryOp::new(mat).expect("dilation of a projective measurement is unitary")
}

/// Convex mixture Σ w_i |ψ_i⟩⟨ψ_i| of pure states.
pub fn mix(parts: &[(f64, PureState)]) -> Result<DensityOperator> {
    if parts.is_empty() {
        return Err(QuantumError::BadWeights {
            reason: "empty mixture".into(),
        });
    }
    let dim = parts[0].1.dim();
    let mut sum = 0.0;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for (w, psi) in parts {
        if *w < -ALG_TOL {
            return Err(QuantumError::BadWeights {
                reason: format!("negative weight {w}"),
            });
        }
        if psi.dim() != dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim,
                got: psi.dim(),
            });
        }
        sum += w;
        mat += (psi.amplitudes() * psi.amplitudes().adjoint()).scale(*w);
    }
    if (sum - 1.0).abs() > ALG_TOL {
        return Err(QuantumError::BadWeights {
            reason: format!("weights sum to {sum}"),
        });
    }
    DensityOperator::new(mat)
}

/// Trace distance ½‖ρ − σ‖₁ = ½ Σ |eig(ρ − σ)|.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    Ok(hermitian_eigenvalues(&diff)
        .iter()
        .map(|v| v.abs())
        .sum::<f64>()
        / 2.0)
}

/// Eigenvalues of a Hermitian matrix (real by construction).
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .collect()
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).camax()
}

fn identity_defect(m: &DMatrix<Complex64>) -> f64 {
    let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    (m - id).camax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const FROZEN_TOL: f64 = 1e-6;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Brute-force 2x2 Hermitian eigensolver via the characteristic
    /// polynomial; independent of nalgebra's decomposition.
    fn eig2x2(m: &DMatrix<Complex64>) -> [(f64, DVector<Complex64>); 2] {
        assert_eq!(m.nrows(), 2);
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let disc = ((a - d) / 2.0).powi(2) + b.norm_sqr();
        let mid = (a + d) / 2.0;
        let lam = [mid + disc.sqrt(), mid - disc.sqrt()];
        lam.map(|l| {
            // (m - l) v = 0; pick the larger row to solve.
            let v = if (a - l).abs() > b.norm() {
                DVector::from_vec(vec![-b / c(a - l), c(1.0)])
            } else if b.norm() > 1e-300 {
                DVector::from_vec(vec![c(1.0), -c(a - l) / b])
            } else {
                DVector::from_vec(vec![c(1.0), c(0.0)])
            };
            let v = v.normalize();
            (l, v)
        })
    }

    #[test]
    fn bloch_state_quarter_pi_matches_frozen_amplitudes() {
        let s = make_bloch_state(BlochAngle::new(PI / 4.0));
        assert!((s.amplitudes()[0].re - 0.923880).abs() < FROZEN_TOL);
        assert!((s.amplitudes()[1].re - 0.382683).abs() < FROZEN_TOL);
    }

    #[test]
    fn bloch_angle_normalizes_into_range() {
        let a = BlochAngle::new(-PI / 4.0);
        assert!((a.radians() - 7.0 * PI / 4.0).abs() < 1e-12);
        let b = BlochAngle::new(9.0 * PI);
        assert!((b.radians() - PI).abs() < 1e-12);
    }

    #[test]
    fn pauli_xz_projects_onto_eigenvectors_of_cos_z_plus_sin_x() {
        // Oracle: eigendecompose cos(t)Z + sin(t)X by hand and compare the
        // outcome-0 projector with the +1 eigenvector projector.
        for &t in &[0.0, PI / 4.0, 3.0 * PI / 4.0, 1.234, 5.0] {
            let obs =
                DMatrix::from_row_slice(2, 2, &[c(t.cos()), c(t.sin()), c(t.sin()), c(-t.cos())]);
            let eig = eig2x2(&obs);
            let (lam_plus, v_plus) = &eig[0];
            assert!((lam_plus - 1.0).abs() < 1e-12);
            let meas = pauli_xz_measurement(BlochAngle::new(t));
            let proj_oracle = v_plus * v_plus.adjoint();
            let diff = (meas.projector(0) - proj_oracle).camax();
            assert!(diff < 1e-10, "t={t}: projector mismatch {diff}");
        }
    }

    #[test]
    fn born_on_plus_x_of_quarter_pi_state_matches_frozen_values() {
        let rho = make_bloch_state(BlochAngle::new(PI / 4.0)).to_density();
        let x = pauli_xz_measurement(BlochAngle::new(PI / 2.0));
        let p = born(&rho, &x).unwrap();
        assert!((p[0] - 0.853553).abs() < FROZEN_TOL);
        assert!((p[1] - 0.146447).abs() < FROZEN_TOL);
        assert!((p[0] - (PI / 8.0).cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn born_rejects_dimension_mismatch() {
        let rho = make_bloch_state(BlochAngle::new(0.0)).to_density();
        let big = rho.tensor(&rho);
        let z = pauli_xz_measurement(BlochAngle::new(0.0));
        assert!(born(&big, &z).is_err());
    }

    #[test]
    fn tensor_indexing_is_row_major() {
        let s = PureState::basis(2, 1).tensor(&PureState::basis(2, 0));
        // |1⟩⊗|0⟩ should occupy index 1*2 + 0 = 2.
        assert!((s.amplitudes()[2].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dilation_of_z_acts_as_cnot_on_plus_state() {
        let z = pauli_xz_measurement(BlochAngle::new(0.0));
        let u = measurement_dilation(&z);
        let plus = make_bloch_state(BlochAngle::new(PI / 2.0));
        let joint = plus.tensor(&PureState::basis(2, 0));
        let out = u.apply(&joint).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [c(r), c(0.0), c(0.0), c(r)];
        for (i, e) in expect.iter().enumerate() {
            assert!((out.amplitudes()[i] - e).norm() < 1e-12, "index {i}");
        }
    }

    #[test]
    fn dilation_branch_weights_match_born_rule() {
        let meas = pauli_xz_measurement(BlochAngle::new(3.0 * PI / 4.0));
        let u = measurement_dilation(&meas);
        let psi = make_bloch_state(BlochAngle::new(PI / 4.0));
        let out = u.apply(&psi.tensor(&PureState::basis(2, 0))).unwrap();
        // Weight of memory value c = Σ_i |amp[i*2+c]|².
        let w: Vec<f64> = (0..2)
            .map(|cv| {
                (0..2)
                    .map(|i| out.amplitudes()[i * 2 + cv].norm_sqr())
                    .sum()
            })
            .collect();
        let p = psi.born(&meas).unwrap();
        assert!((w[0] - p[0]).abs() < 1e-12 && (w[0] - 0.5).abs() < 1e-12);
        assert!((w[1] - p[1]).abs() < 1e-12);
    }

    #[test]
    fn dilation_then_inverse_restores_input_exactly() {
        let meas = pauli_xz_measurement(BlochAngle::new(3.0 * PI / 4.0));
        let u = measurement_dilation(&meas);
        let psi = make_bloch_state(BlochAngle::new(1.0));
        let joint = psi.tensor(&PureState::basis(2, 0));
        let back = u.adjoint().apply(&u.apply(&joint).unwrap()).unwrap();
        assert!(back.overlap(&joint) >= 1.0 - 1e-12);
    }

    #[test]
    fn mix_of_antipodal_pairs_is_maximally_mixed_both_ways() {
        // Half-half mixtures of both antipodal preparation pairs coincide:
        // ½P(π/4) + ½P(5π/4) = ½P(3π/4) + ½P(7π/4) = I/2.
        let pair = |t: f64| {
            mix(&[
                (0.5, make_bloch_state(BlochAngle::new(t))),
                (0.5, make_bloch_state(BlochAngle::new(t + PI))),
            ])
            .unwrap()
        };
        let lhs = pair(PI / 4.0);
        let rhs = pair(3.0 * PI / 4.0);
        assert!(trace_distance(&lhs, &rhs).unwrap() <= 1e-12);
        let half_id = DensityOperator::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(0.5),
            c(0.5),
        ])))
        .unwrap();
        assert!(trace_distance(&lhs, &half_id).unwrap() <= 1e-12);
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let s = make_bloch_state(BlochAngle::new(0.0));
        assert!(mix(&[(0.7, s.clone()), (0.7, s.clone())]).is_err());
        assert!(mix(&[(1.5, s.clone()), (-0.5, s)]).is_err());
    }

    #[test]
    fn trace_distance_of_pure_states_is_sine_of_half_angle_gap() {
        let a = make_bloch_state(BlochAngle::new(PI / 4.0)).to_density();
        let b = make_bloch_state(BlochAngle::new(3.0 * PI / 4.0)).to_density();
        let d = trace_distance(&a, &b).unwrap();
        assert!((d - 0.707107).abs() < FROZEN_TOL);
        assert!((d - (PI / 4.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn density_constructor_rejects_negative_operators() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(matches!(
            DensityOperator::new(m),
            Err(QuantumError::NotPositive { .. })
        ));
    }

    #[test]
    fn unitary_constructor_rejects_non_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(matches!(
            UnitaryOp::new(m),
            Err(QuantumError::NotUnitary { .. })
        ));
    }

    #[test]
    fn bloch_rotation_shifts_bloch_angle() {
        for &(t, phi) in &[(0.0, -PI / 4.0), (PI / 2.0, PI / 4.0), (1.1, 2.2)] {
            let rotated = UnitaryOp::bloch_rotation(phi)
                .apply(&make_bloch_state(BlochAngle::new(t)))
                .unwrap();
            let target = make_bloch_state(BlochAngle::new(t + phi));
            assert!(rotated.overlap(&target) >= 1.0 - 1e-12, "t={t}, phi={phi}");
        }
    }

    proptest! {
        #[test]
        fn overlap_law_cos_squared_half_angle(t1 in 0.0..(2.0 * PI), t2 in 0.0..(2.0 * PI)) {
            let a = make_bloch_state(BlochAngle::new(t1));
            let b = make_bloch_state(BlochAngle::new(t2));
            let expect = (((t1 - t2) / 2.0).cos()).powi(2);
            prop_assert!((a.overlap(&b) - expect).abs() < 1e-12);
        }

        #[test]
        fn dilation_is_unitary_and_reversible(t in 0.0..(2.0 * PI), s in 0.0..(2.0 * PI)) {
            let meas = pauli_xz_measurement(BlochAngle::new(t));
            let u = measurement_dilation(&meas);
            let joint = make_bloch_state(BlochAngle::new(s)).tensor(&PureState::basis(2, 0));
            let back = u.adjoint().apply(&u.apply(&joint).unwrap()).unwrap();
            prop_assert!(back.overlap(&joint) >= 1.0 - 1e-12);
        }

        #[test]
        fn born_probabilities_are_a_distribution(t in 0.0..(2.0 * PI), s in 0.0..(2.0 * PI)) {
            let rho = make_bloch_state(BlochAngle::new(s)).to_density();
            let p = born(&rho, &pauli_xz_measurement(BlochAngle::new(t))).unwrap();
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
