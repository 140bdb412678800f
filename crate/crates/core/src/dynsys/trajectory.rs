use std::fmt::Write as _;

use nalgebra::DVector;

use super::{costate_step, jacobian_at, step_forward, DiscreteMap, DynsysError, Result, DEFAULT_FD_STEP};
use crate::convergence::format_f64;

/// Paired state/costate histories of the extended system.
///
/// `pairing_samples[k] = l(k)·δs(k+1)` where the tangent obeys
/// `δs(k+1) = M(s(k)) δs(k)`; with the costate update evaluated at `s(k+1)`
/// this shifted pairing is the conserved quantity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtendedTrajectory {
    pub map_name: String,
    pub states: Vec<Vec<f64>>,
    pub costates: Vec<Vec<f64>>,
    pub hamiltonian_samples: Vec<f64>,
    pub pairing_samples: Option<Vec<f64>>,
    /// `‖l(k)‖ ‖δs(k+1)‖`: the magnitude scale against which the rounding
    /// error of each pairing sample is measured.
    pub pairing_scales: Option<Vec<f64>>,
}

impl ExtendedTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest `|c(k) − c(0)|`, or `None` without a tracked tangent.
    pub fn pairing_drift(&self) -> Option<f64> {
        let c = self.pairing_samples.as_ref()?;
        let c0 = *c.first()?;
        Some(c.iter().map(|ck| (ck - c0).abs()).fold(0.0, f64::max))
    }

    /// Largest `|c(k) − c(0)| / max(1, scale(k))`: drift relative to the
    /// floating-point conditioning of the dot product `l(k)·δs(k+1)`.
    pub fn relative_pairing_drift(&self) -> Option<f64> {
        let c = self.pairing_samples.as_ref()?;
        let scales = self.pairing_scales.as_ref()?;
        let c0 = *c.first()?;
        Some(
            c.iter()
                .zip(scales)
                .map(|(ck, s)| (ck - c0).abs() / s.max(1.0))
                .fold(0.0, f64::max),
        )
    }

    /// CSV with columns `k, s_0..s_{N-1}, l_0..l_{N-1}, H, pairing`.
    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, Vec::len);
        let mut out = String::from("k");
        for i in 0..dim {
            let _ = write!(out, ",s_{i}");
        }
        for i in 0..dim {
            let _ = write!(out, ",l_{i}");
        }
        out.push_str(",H,pairing\n");
        for k in 0..self.states.len() {
            let _ = write!(out, "{k}");
            for v in self.states[k].iter().chain(&self.costates[k]) {
                let _ = write!(out, ",{}", format_f64(*v));
            }
            let h = self.hamiltonian_samples.get(k).copied().unwrap_or(f64::NAN);
            let c = self
                .pairing_samples
                .as_ref()
                .and_then(|c| c.get(k).copied())
                .unwrap_or(f64::NAN);
            let _ = writeln!(out, ",{},{}", format_f64(h), format_f64(c));
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Runs the extended system for `steps` steps, recording `steps + 1` states.
///
/// With `tangent0` the tangent `δs` is propagated alongside and the shifted
/// pairing is sampled. An irregular Jacobian aborts the run with
/// [`DynsysError::IrregularAt`] carrying everything computed so far.
pub fn run_extended(
    map: &dyn DiscreteMap,
    s0: &[f64],
    l0: &[f64],
    steps: usize,
    tangent0: Option<&[f64]>,
) -> Result<ExtendedTrajectory> {
    if map.output_dim() != map.input_dim() {
        return Err(DynsysError::Irregular { det: 0.0 });
    }
    let dim = map.input_dim();
    for v in [Some(s0), Some(l0), tangent0].into_iter().flatten() {
        if v.len() != dim {
            return Err(DynsysError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }

    let mut traj = ExtendedTrajectory {
        map_name: map.name(),
        states: vec![s0.to_vec()],
        costates: vec![l0.to_vec()],
        hamiltonian_samples: Vec::with_capacity(steps + 1),
        pairing_samples: tangent0.map(|_| Vec::with_capacity(steps + 1)),
        pairing_scales: tangent0.map(|_| Vec::with_capacity(steps + 1)),
    };
    let mut s = s0.to_vec();
    let mut l = l0.to_vec();
    let mut tangent = tangent0.map(DVector::from_column_slice);

    for k in 0..=steps {
        let s_next = step_forward(map, &s)?;
        traj.hamiltonian_samples.push(dot(&l, &s_next));
        if let Some(ds) = tangent.as_mut() {
            let m = jacobian_at(map, &s, DEFAULT_FD_STEP).entries;
            *ds = m * &*ds;
            let ds = ds.as_slice();
            if let (Some(c), Some(scale)) = (traj.pairing_samples.as_mut(), traj.pairing_scales.as_mut()) {
                c.push(dot(&l, ds));
                scale.push(dot(&l, &l).sqrt() * dot(ds, ds).sqrt());
            }
        }
        if k == steps {
            break;
        }
        let l_next = match costate_step(map, &s_next, &l) {
            Ok(l_next) => l_next,
            Err(DynsysError::Irregular { .. }) => {
                return Err(DynsysError::IrregularAt {
                    step: k + 1,
                    partial: Box::new(traj),
                })
            }
            Err(e) => return Err(e),
        };
        traj.states.push(s_next.clone());
        traj.costates.push(l_next.clone());
        s = s_next;
        l = l_next;
    }
    Ok(traj)
}
