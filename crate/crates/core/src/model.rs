//! Network parameters, full-phase equilibria and the vector fields of the
//! full-phase, phase, rotating-frame and phase-difference models.
//!
//! States are flat vectors of per-node pairs `[x1_1, x2_1, x1_2, x2_2, ...]`
//! where `x1` is an angle and `x2` its angular velocity. Phase-difference
//! states hold one pair per ordered node pair `(i, j)`, `i != j`, in
//! lexicographic order.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt;

pub type StateVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub n_nodes: usize,
    pub coupling: f64,
    pub filter_gain: f64,
    pub free_freq: f64,
    pub delay: f64,
}

impl NetworkParams {
    /// Normalized parameters (`free_freq = 1`).
    pub fn new(n_nodes: usize, coupling: f64, filter_gain: f64, delay: f64) -> Self {
        Self {
            n_nodes,
            coupling,
            filter_gain,
            free_freq: 1.0,
            delay,
        }
    }

    pub fn with_delay(mut self, delay: f64) -> Self {
        self.delay = delay;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if self.n_nodes < 2 {
            return bad("N must be at least 2");
        }
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return bad("K must be positive");
        }
        if !(self.filter_gain > 0.0 && self.filter_gain.is_finite()) {
            return bad("mu must be positive");
        }
        if !(self.free_freq > 0.0 && self.free_freq.is_finite()) {
            return bad("omega_M must be positive");
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return bad("tau must be nonnegative");
        }
        Ok(())
    }

    /// `K μ / (N − 1)`, the per-link coupling weight.
    pub fn link_gain(&self) -> f64 {
        self.coupling * self.filter_gain / (self.n_nodes as f64 - 1.0)
    }
}

/// Rescales time by `ω_M`: `K/ω_M`, `μ/ω_M`, `ω_M τ`.
pub fn normalize(physical: &NetworkParams) -> NetworkParams {
    let w = physical.free_freq;
    NetworkParams {
        n_nodes: physical.n_nodes,
        coupling: physical.coupling / w,
        filter_gain: physical.filter_gain / w,
        free_freq: 1.0,
        delay: physical.delay * w,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquilibriumBranch {
    Plus,
    Minus,
}

impl fmt::Display for EquilibriumBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquilibriumBranch::Plus => "plus",
            EquilibriumBranch::Minus => "minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub branch: EquilibriumBranch,
    pub phi: f64,
    pub cos_two_phi: f64,
}

impl Equilibrium {
    pub fn new(coupling: f64, branch: EquilibriumBranch) -> Result<Self> {
        if coupling < 1.0 {
            return Err(Error::NoEquilibrium { coupling });
        }
        let root = (1.0 - 1.0 / (coupling * coupling)).max(0.0).sqrt();
        let cos_two_phi = match branch {
            EquilibriumBranch::Plus => root,
            EquilibriumBranch::Minus => -root,
        };
        // sin 2φ = −1/K from the velocity equation at rest.
        let two_phi = (-1.0 / coupling).atan2(cos_two_phi);
        Ok(Self {
            branch,
            phi: 0.5 * two_phi,
            cos_two_phi,
        })
    }

    /// Synchronized equilibrium state `(φ, 0)` repeated over `n` nodes.
    pub fn state(&self, n_nodes: usize) -> StateVector {
        (0..n_nodes).flat_map(|_| [self.phi, 0.0]).collect()
    }
}

/// Synchronized equilibria of the full-phase model; one record when `K = 1`.
pub fn equilibria(params: &NetworkParams) -> Result<Vec<Equilibrium>> {
    params.validate()?;
    let k = params.coupling / params.free_freq;
    if k < 1.0 {
        return Err(Error::NoEquilibrium { coupling: k });
    }
    if k == 1.0 {
        return Ok(vec![Equilibrium::new(k, EquilibriumBranch::Plus)?]);
    }
    Ok(vec![
        Equilibrium::new(k, EquilibriumBranch::Plus)?,
        Equilibrium::new(k, EquilibriumBranch::Minus)?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    FullPhase,
    Phase,
    PhaseRotatingFrame,
    PhaseDifference,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::FullPhase => "full-phase",
            ModelKind::Phase => "phase",
            ModelKind::PhaseRotatingFrame => "phase-rotating",
            ModelKind::PhaseDifference => "phase-difference",
        })
    }
}

impl ModelKind {
    pub fn state_len(&self, n_nodes: usize) -> usize {
        match self {
            ModelKind::PhaseDifference => 2 * n_nodes * (n_nodes - 1),
            _ => 2 * n_nodes,
        }
    }
}

/// Ordered pairs `(i, j)`, `i != j`, in lexicographic order.
pub fn ordered_pairs(n_nodes: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_nodes * (n_nodes - 1));
    for i in 0..n_nodes {
        for j in 0..n_nodes {
            if i != j {
                out.push((i, j));
            }
        }
    }
    out
}

fn pair_index(n_nodes: usize, i: usize, j: usize) -> usize {
    i * (n_nodes - 1) + if j > i { j - 1 } else { j }
}

/// Time derivative of `state` given the delayed state `delayed = x(t − τ)`.
///
/// `aux` is the rotation frequency `Ω` and is required for
/// [`ModelKind::PhaseRotatingFrame`] only.
pub fn rhs(
    kind: ModelKind,
    params: &NetworkParams,
    state: &[f64],
    delayed: &[f64],
    aux: Option<f64>,
) -> Result<StateVector> {
    let mut out = vec![0.0; state.len()];
    rhs_into(kind, params, state, delayed, aux, &mut out)?;
    Ok(out)
}

/// Allocation-free form of [`rhs`].
pub fn rhs_into(
    kind: ModelKind,
    params: &NetworkParams,
    state: &[f64],
    delayed: &[f64],
    aux: Option<f64>,
    out: &mut [f64],
) -> Result<()> {
    let n = params.n_nodes;
    if kind == ModelKind::PhaseDifference && !(2..=3).contains(&n) {
        return Err(Error::UnsupportedKind(format!("{kind} with N = {n}")));
    }
    let len = kind.state_len(n);
    for got in [state.len(), delayed.len(), out.len()] {
        if got != len {
            return Err(Error::DimensionMismatch { expected: len, got });
        }
    }
    let mu = params.filter_gain;
    let w = params.free_freq;
    let tau = params.delay;
    let g = params.link_gain();

    match kind {
        ModelKind::FullPhase => {
            for i in 0..n {
                let xi = state[2 * i];
                let mut acc = 0.0;
                for j in (0..n).filter(|&j| j != i) {
                    let xj = delayed[2 * j];
                    acc += (xj - xi).sin() + (xj + xi).sin();
                }
                out[2 * i] = state[2 * i + 1];
                out[2 * i + 1] = -mu * state[2 * i + 1] + mu * w + g * acc;
            }
        }
        ModelKind::Phase | ModelKind::PhaseRotatingFrame => {
            let (omega, forcing) = match kind {
                ModelKind::Phase => (0.0, 0.0),
                _ => {
                    let omega = aux.ok_or_else(|| {
                        Error::InvalidParams("rotating frame needs the rotation frequency".into())
                    })?;
                    (omega, -mu * omega)
                }
            };
            let shift = (omega + w) * tau;
            for i in 0..n {
                let xi = state[2 * i];
                let mut acc = 0.0;
                for j in (0..n).filter(|&j| j != i) {
                    acc += (delayed[2 * j] - xi - shift).sin();
                }
                out[2 * i] = state[2 * i + 1];
                out[2 * i + 1] = -mu * state[2 * i + 1] + forcing + g * acc;
            }
        }
        ModelKind::PhaseDifference => {
            let wt = w * tau;
            for (p, &(i, j)) in ordered_pairs(n).iter().enumerate() {
                let mut acc = 0.0;
                for l in (0..n).filter(|&l| l != i) {
                    acc += (state[2 * pair_index(n, i, l)] + wt).sin();
                }
                for l in (0..n).filter(|&l| l != j) {
                    acc -= (delayed[2 * pair_index(n, j, l)] + wt).sin();
                }
                out[2 * p] = state[2 * p + 1];
                out[2 * p + 1] = -mu * state[2 * p + 1] - g * acc;
            }
        }
    }
    Ok(())
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permute(x: &[f64], a: usize, b: usize) -> Vec<f64> {
        let mut y = x.to_vec();
        y.swap(2 * a, 2 * b);
        y.swap(2 * a + 1, 2 * b + 1);
        y
    }

    #[test]
    fn normalize_scales() {
        let p = NetworkParams {
            n_nodes: 2,
            coupling: 2.0,
            filter_gain: 1.0,
            free_freq: 2.0,
            delay: 3.0,
        };
        let q = normalize(&p);
        assert_eq!(q, NetworkParams::new(2, 1.0, 0.5, 6.0));
        let r = NetworkParams::new(2, 1.05, 0.3, 6.34);
        assert_eq!(normalize(&r), r);
    }

    #[test]
    fn equilibria_values() {
        let eq = equilibria(&NetworkParams::new(2, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!(eq.len(), 1);
        assert!(eq[0].cos_two_phi.abs() < 1e-15);

        let eq = equilibria(&NetworkParams::new(2, 2.0, 1.0, 0.0)).unwrap();
        assert!((eq[0].cos_two_phi - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((eq[1].cos_two_phi + 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((eq[0].phi + PI / 12.0).abs() < 1e-12);
        for e in &eq {
            assert!(((2.0 * e.phi).cos() - e.cos_two_phi).abs() < 1e-12);
            assert!((1.0 + 2.0 * (2.0 * e.phi).sin()).abs() < 1e-12);
        }

        assert!(matches!(
            equilibria(&NetworkParams::new(2, 0.5, 1.0, 0.0)),
            Err(Error::NoEquilibrium { .. })
        ));
    }

    #[test]
    fn minus_branch_matches_reported_angle() {
        let e = Equilibrium::new(1.05, EquilibriumBranch::Minus).unwrap();
        assert!((e.phi.rem_euclid(2.0 * PI) - 5.3429).abs() < 1e-4);
    }

    #[test]
    fn saddle_node_coincidence() {
        let k = 1.0 + 1e-6;
        let p = Equilibrium::new(k, EquilibriumBranch::Plus).unwrap();
        let m = Equilibrium::new(k, EquilibriumBranch::Minus).unwrap();
        assert!((p.phi - m.phi).abs() < 1e-2);
    }

    #[test]
    fn full_phase_equilibrium_residual() {
        for k in [1.0, 1.05, 2.0, 5.0] {
            for n in 2..6 {
                let params = NetworkParams::new(n, k, 0.3, 4.0);
                for e in equilibria(&params).unwrap() {
                    let x = e.state(n);
                    let f = rhs(ModelKind::FullPhase, &params, &x, &x, None).unwrap();
                    assert!(f.iter().all(|v| v.abs() < 1e-12), "{f:?}");
                }
            }
        }
    }

    #[test]
    fn phase_sync_rotation_closes() {
        // θ_i = Ωt with Ω = Ω̂ − ω_M where Ω̂ + K sin(Ω̂τ) = ω_M.
        let params = NetworkParams::new(3, 1.0, 1.0, 1.0);
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m + (m * params.delay).sin() - 1.0 > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let omega = 0.5 * (lo + hi) - 1.0;
        let t = 3.7;
        let x: Vec<f64> = (0..3).flat_map(|_| [omega * t, omega]).collect();
        let d: Vec<f64> = (0..3).flat_map(|_| [omega * (t - params.delay), omega]).collect();
        let f = rhs(ModelKind::Phase, &params, &x, &d, None).unwrap();
        for i in 0..3 {
            assert!((f[2 * i] - omega).abs() < 1e-12);
            assert!(f[2 * i + 1].abs() < 1e-12);
        }
        let zero = vec![0.0; 6];
        let f = rhs(ModelKind::PhaseRotatingFrame, &params, &zero, &zero, Some(omega)).unwrap();
        assert!(f.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dimension_and_kind_errors() {
        let p = NetworkParams::new(3, 1.0, 1.0, 1.0);
        assert!(matches!(
            rhs(ModelKind::FullPhase, &p, &[0.0; 4], &[0.0; 6], None),
            Err(Error::DimensionMismatch { .. })
        ));
        let p4 = NetworkParams::new(4, 1.0, 1.0, 1.0);
        assert!(matches!(
            rhs(ModelKind::PhaseDifference, &p4, &[0.0; 24], &[0.0; 24], None),
            Err(Error::UnsupportedKind(_))
        ));
        assert!(rhs(ModelKind::PhaseRotatingFrame, &p, &[0.0; 6], &[0.0; 6], None).is_err());
    }

    #[test]
    fn phase_difference_rest_state() {
        // φ^{ij} ≡ C with C + ω_M τ = 0 is a rest point.
        for n in [2, 3] {
            let p = NetworkParams::new(n, 1.3, 0.7, 2.0);
            let c = -2.0;
            let x: Vec<f64> = ordered_pairs(n).iter().flat_map(|_| [c, 0.0]).collect();
            let f = rhs(ModelKind::PhaseDifference, &p, &x, &x, None).unwrap();
            assert!(f.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn transposition_equivariance_example() {
        let p = NetworkParams::new(3, 1.2, 0.4, 2.0);
        let x = [0.3, 0.1, -1.2, 0.5, 2.2, -0.4];
        let d = [1.1, -0.3, 0.2, 0.0, -0.7, 0.9];
        for kind in [ModelKind::FullPhase, ModelKind::Phase] {
            let f = rhs(kind, &p, &x, &d, None).unwrap();
            let g = rhs(kind, &p, &permute(&x, 0, 2), &permute(&d, 0, 2), None).unwrap();
            let pf = permute(&f, 0, 2);
            for (a, b) in g.iter().zip(&pf) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }
}
