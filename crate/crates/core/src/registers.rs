//! Pure-state simulator over an ordered list of registers.
//!
//! The joint amplitude vector is indexed row-major over the register list
//! (register 0 most significant), matching the tensor convention
//! `i = i_first * dim_rest + i_rest`. Unitaries can act on any subset of
//! registers, in any order, without materializing full-space matrices.

use crate::quantum::{DensityOperator, PureState, QuantumError, UnitaryOp};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct RegisterState {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl RegisterState {
    /// Interprets `state` as the joint state of registers with the given
    /// dimensions (their product must equal the state dimension).
    pub fn from_state(state: &PureState, dims: &[usize]) -> Result<Self, QuantumError> {
        let total: usize = dims.iter().product();
        if total != state.dim() || dims.is_empty() {
            return Err(QuantumError::DimensionMismatch {
                expected: state.dim(),
                got: total,
            });
        }
        Ok(RegisterState {
            dims: dims.to_vec(),
            amps: state.amplitudes().iter().cloned().collect(),
        })
    }

    pub fn n_registers(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn total_dim(&self) -> usize {
        self.amps.len()
    }

    fn stride(&self, reg: usize) -> usize {
        self.dims[reg + 1..].iter().product()
    }

    fn digit(&self, index: usize, reg: usize) -> usize {
        (index / self.stride(reg)) % self.dims[reg]
    }

    /// Appends a fresh register in the given pure state; returns its index.
    pub fn append(&mut self, state: &PureState) -> usize {
        let d = state.dim();
        let mut next = Vec::with_capacity(self.amps.len() * d);
        for a in &self.amps {
            for k in 0..d {
                next.push(a * state.amplitudes()[k]);
            }
        }
        self.amps = next;
        self.dims.push(d);
        self.dims.len() - 1
    }

    /// Applies `u` to the listed registers (distinct, orientation follows the
    /// listed order); `u` must act on the product of their dimensions.
    pub fn apply(&mut self, u: &UnitaryOp, regs: &[usize]) -> Result<(), QuantumError> {
        let sub_dim: usize = regs.iter().map(|&r| self.dims[r]).product();
        if u.dim() != sub_dim {
            return Err(QuantumError::DimensionMismatch {
                expected: sub_dim,
                got: u.dim(),
            });
        }
        // Offsets of each local sub-index within the full index space; the
        // local index is row-major over the listed registers.
        let mut offsets = vec![0usize; sub_dim];
        for (local, slot) in offsets.iter_mut().enumerate() {
            let mut rem = local;
            let mut off = 0;
            for &r in regs.iter().rev() {
                off += (rem % self.dims[r]) * self.stride(r);
                rem /= self.dims[r];
            }
            *slot = off;
        }
        let m = u.matrix();
        let mut gathered = vec![Complex64::new(0.0, 0.0); sub_dim];
        for base in 0..self.total_dim() {
            if regs.iter().any(|&r| self.digit(base, r) != 0) {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                gathered[l] = self.amps[base + off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, g) in gathered.iter().enumerate() {
                    acc += m[(row, col)] * g;
                }
                self.amps[base + off] = acc;
            }
        }
        Ok(())
    }

    /// Generalized CNOT copying `control` into `target` in the computational
    /// basis: |m⟩|t⟩ → |m⟩|t ⊕ m⟩ (addition mod the shared dimension).
    pub fn cnot_copy(&mut self, control: usize, target: usize) -> Result<(), QuantumError> {
        let d = self.dims[control];
        if self.dims[target] != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                got: self.dims[target],
            });
        }
        let (sc, st) = (self.stride(control), self.stride(target));
        let mut next = vec![Complex64::new(0.0, 0.0); self.total_dim()];
        for (i, a) in self.amps.iter().enumerate() {
            let m = (i / sc) % d;
            let t = (i / st) % d;
            let j = i - t * st + ((t + m) % d) * st;
            next[j] = *a;
        }
        self.amps = next;
        Ok(())
    }

    /// Joint computational-basis distribution over the listed registers
    /// (row-major in the listed order), other registers marginalized.
    pub fn probabilities(&self, regs: &[usize]) -> Vec<f64> {
        let out_dim: usize = regs.iter().map(|&r| self.dims[r]).product();
        let mut p = vec![0.0; out_dim];
        for (i, a) in self.amps.iter().enumerate() {
            let mut idx = 0;
            for &r in regs {
                idx = idx * self.dims[r] + self.digit(i, r);
            }
            p[idx] += a.norm_sqr();
        }
        p
    }

    /// Reduced density operator of the listed registers (partial trace over
    /// the rest), indexed row-major in the listed order.
    pub fn reduced_density(&self, regs: &[usize]) -> Result<DensityOperator, QuantumError> {
        let out_dim: usize = regs.iter().map(|&r| self.dims[r]).product();
        let kept = |i: usize| -> usize {
            let mut idx = 0;
            for &r in regs {
                idx = idx * self.dims[r] + self.digit(i, r);
            }
            idx
        };
        let rest: Vec<usize> = (0..self.dims.len()).filter(|r| !regs.contains(r)).collect();
        let rest_key = |i: usize| -> usize {
            let mut idx = 0;
            for &r in &rest {
                idx = idx * self.dims[r] + self.digit(i, r);
            }
            idx
        };
        let mut mat = nalgebra::DMatrix::<Complex64>::zeros(out_dim, out_dim);
        for i in 0..self.total_dim() {
            for j in 0..self.total_dim() {
                if rest_key(i) == rest_key(j) {
                    mat[(kept(i), kept(j))] += self.amps[i] * self.amps[j].conj();
                }
            }
        }
        DensityOperator::new(mat)
    }

    /// Projects `reg` onto each computational value: returns the weight and
    /// the normalized post-projection state (None when the weight vanishes).
    pub fn branch(&self, reg: usize) -> Vec<(f64, Option<RegisterState>)> {
        let d = self.dims[reg];
        (0..d)
            .map(|v| {
                let mut amps = self.amps.clone();
                let mut w = 0.0;
                for (i, a) in amps.iter_mut().enumerate() {
                    if self.digit(i, reg) == v {
                        w += a.norm_sqr();
                    } else {
                        *a = Complex64::new(0.0, 0.0);
                    }
                }
                if w <= 1e-14 {
                    (w, None)
                } else {
                    let scale = 1.0 / w.sqrt();
                    for a in amps.iter_mut() {
                        *a *= scale;
                    }
                    (
                        w,
                        Some(RegisterState {
                            dims: self.dims.clone(),
                            amps,
                        }),
                    )
                }
            })
            .collect()
    }
}
