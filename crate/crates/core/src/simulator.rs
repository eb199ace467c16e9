//! Method-of-steps integration of the delay models, period estimation and
//! spatio-temporal symmetry classification of computed orbits.
//!
//! The step is shrunk so that `τ` is a whole number of steps; delayed
//! arguments of the fourth-order stages then fall on grid points or step
//! midpoints, and the latter are read from cubic Hermite interpolants.

use crate::charfun::{isotypic_direction, project_standard};
use crate::error::{Error, Result};
use crate::model::{rhs_into, wrap_angle, ModelKind, NetworkParams, StateVector};
use std::fmt;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryKind {
    Constant,
    EquilibriumPerturbed,
}

/// Constant initial history `base + amplitude · direction` on `[−τ, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySpec {
    pub kind: HistoryKind,
    pub base: StateVector,
    pub direction: StateVector,
    pub amplitude: f64,
}

impl HistorySpec {
    pub fn constant(base: StateVector) -> Self {
        let direction = vec![0.0; base.len()];
        Self {
            kind: HistoryKind::Constant,
            base,
            direction,
            amplitude: 0.0,
        }
    }

    /// `base` with node angles shifted by `amplitude · node_direction`.
    pub fn perturbed(base: StateVector, node_direction: &[f64], amplitude: f64) -> Result<Self> {
        if base.len() != 2 * node_direction.len() {
            return Err(Error::DimensionMismatch {
                expected: base.len(),
                got: 2 * node_direction.len(),
            });
        }
        let mut direction = vec![0.0; base.len()];
        for (i, d) in node_direction.iter().enumerate() {
            direction[2 * i] = *d;
        }
        Ok(Self {
            kind: HistoryKind::EquilibriumPerturbed,
            base,
            direction,
            amplitude,
        })
    }

    /// Perturbation along the real or imaginary part of isotypic component `j`.
    pub fn isotypic(base: StateVector, j: usize, imaginary: bool, amplitude: f64) -> Result<Self> {
        let dir = isotypic_direction(base.len() / 2, j, imaginary)?;
        Self::perturbed(base, &dir, amplitude)
    }

    /// Perturbation along the standard-representation part of `node_vector`.
    pub fn standard(base: StateVector, node_vector: &[f64], amplitude: f64) -> Result<Self> {
        let dir = project_standard(node_vector)?;
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParams("direction has no standard component".into()));
        }
        let dir: Vec<f64> = dir.iter().map(|x| x / norm).collect();
        Self::perturbed(base, &dir, amplitude)
    }

    pub fn value(&self) -> StateVector {
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(b, d)| b + self.amplitude * d)
            .collect()
    }

    fn validate(&self, len: usize) -> Result<()> {
        if !(self.amplitude >= 0.0) {
            return Err(Error::InvalidParams(format!("negative amplitude {}", self.amplitude)));
        }
        for got in [self.base.len(), self.direction.len()] {
            if got != len {
                return Err(Error::DimensionMismatch { expected: len, got });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Right-hand side at each grid point; with the states these are the
    /// Hermite data of every step.
    pub dense_coeffs: Vec<StateVector>,
    pub params: NetworkParams,
    pub kind: ModelKind,
    pub step: f64,
    history: StateVector,
}

fn hermite(y0: &[f64], f0: &[f64], y1: &[f64], f1: &[f64], h: f64, c: f64, out: &mut [f64]) {
    let c2 = c * c;
    let c3 = c2 * c;
    let h00 = 2.0 * c3 - 3.0 * c2 + 1.0;
    let h10 = c3 - 2.0 * c2 + c;
    let h01 = -2.0 * c3 + 3.0 * c2;
    let h11 = c3 - c2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn dim(&self) -> usize {
        self.history.len()
    }

    /// Dense output at `t`; the history for `t ≤ 0`.
    pub fn at(&self, t: f64) -> Option<StateVector> {
        if t <= 0.0 {
            return Some(self.history.clone());
        }
        if t > self.t_end() + 1e-12 * self.t_end().max(1.0) {
            return None;
        }
        let j = ((t / self.step).floor() as usize).min(self.len() - 2);
        let c = (t - self.times[j]) / self.step;
        let mut out = vec![0.0; self.dim()];
        hermite(
            &self.states[j],
            &self.dense_coeffs[j],
            &self.states[j + 1],
            &self.dense_coeffs[j + 1],
            self.step,
            c,
            &mut out,
        );
        Some(out)
    }

    /// CSV with columns `t, x1_1, x2_1, …, x1_N, x2_N` at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for i in 1..=self.dim() / 2 {
            write!(w, ",x1_{i},x2_{i}")?;
        }
        writeln!(w)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            write!(w, "{t:.16e}")?;
            for v in x {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Integrates `kind` from the constant history up to `t_end`.
pub fn integrate(
    kind: ModelKind,
    params: &NetworkParams,
    history: &HistorySpec,
    t_end: f64,
    step: f64,
) -> Result<Trajectory> {
    integrate_with_aux(kind, params, history, t_end, step, None)
}

/// As [`integrate`], passing the rotation frequency for the rotating frame.
pub fn integrate_with_aux(
    kind: ModelKind,
    params: &NetworkParams,
    history: &HistorySpec,
    t_end: f64,
    step: f64,
    aux: Option<f64>,
) -> Result<Trajectory> {
    params.validate()?;
    let dim = kind.state_len(params.n_nodes);
    history.validate(dim)?;
    if !(t_end > 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParams(format!("t_end = {t_end}, step = {step}")));
    }
    let tau = params.delay;
    let (h, lag) = if tau > 0.0 {
        if step > tau / 4.0 {
            return Err(Error::StepTooLarge {
                step,
                limit: tau / 4.0,
            });
        }
        let m = (tau / step).ceil() as usize;
        (tau / m as f64, m)
    } else {
        (step, 0)
    };
    let steps = (t_end / h - 1e-9).ceil() as usize;
    let x0 = history.value();

    let mut states: Vec<StateVector> = Vec::with_capacity(steps + 1);
    let mut derivs: Vec<StateVector> = Vec::with_capacity(steps + 1);
    let f = |x: &[f64], d: &[f64], out: &mut [f64]| rhs_into(kind, params, x, d, aux, out);

    // Delayed state at `t_k + c·h − τ`, where the lagged step index is k − lag.
    let delayed = |states: &[StateVector], derivs: &[StateVector], k: usize, c: f64, out: &mut [f64]| {
        if k < lag {
            out.copy_from_slice(&x0);
            return;
        }
        let j = k - lag;
        if c == 0.0 {
            out.copy_from_slice(&states[j]);
        } else if c == 1.0 {
            out.copy_from_slice(&states[j + 1]);
        } else {
            hermite(&states[j], &derivs[j], &states[j + 1], &derivs[j + 1], h, c, out);
        }
    };

    let mut d = vec![0.0; dim];
    let mut f0 = vec![0.0; dim];
    f(&x0, &x0, &mut f0)?;
    states.push(x0.clone());
    derivs.push(f0);

    let (mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    for k in 0..steps {
        let x = states[k].clone();
        let k1 = derivs[k].clone();
        let stage = |c: f64, slope: &[f64], d: &mut Vec<f64>, tmp: &mut Vec<f64>, states: &[StateVector], derivs: &[StateVector]| {
            for i in 0..dim {
                tmp[i] = x[i] + c * h * slope[i];
            }
            if lag == 0 {
                d.copy_from_slice(tmp);
            } else {
                delayed(states, derivs, k, c, d);
            }
        };
        stage(0.5, &k1, &mut d, &mut tmp, &states, &derivs);
        f(&tmp, &d, &mut k2)?;
        stage(0.5, &k2, &mut d, &mut tmp, &states, &derivs);
        f(&tmp, &d, &mut k3)?;
        stage(1.0, &k3, &mut d, &mut tmp, &states, &derivs);
        f(&tmp, &d, &mut k4)?;
        let next: StateVector = (0..dim)
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let t_next = (k + 1) as f64 * h;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { t: t_next });
        }
        if lag == 0 {
            d.copy_from_slice(&next);
        } else {
            delayed(&states, &derivs, k + 1, 0.0, &mut d);
        }
        let mut fn1 = vec![0.0; dim];
        f(&next, &d, &mut fn1)?;
        states.push(next);
        derivs.push(fn1);
    }
    Ok(Trajectory {
        times: (0..=steps).map(|k| k as f64 * h).collect(),
        states,
        dense_coeffs: derivs,
        params: *params,
        kind,
        step: h,
        history: x0,
    })
}

/// Default fraction of a run discarded as transient.
pub const TRANSIENT_FRACTION: f64 = 0.6;

const PERIOD_SPREAD: f64 = 1e-3;
const MIN_PERIODS: usize = 5;

fn tail_start(traj: &Trajectory, transient_fraction: f64) -> usize {
    ((traj.len() as f64 * transient_fraction) as usize).min(traj.len().saturating_sub(1))
}

/// Oscillation period from upward mean crossings of the velocity coordinate
/// with the largest variance after the transient.
pub fn period_estimate(traj: &Trajectory, transient_fraction: f64) -> Result<f64> {
    let start = tail_start(traj, transient_fraction);
    let tail = &traj.states[start..];
    let not_periodic = |why: &str| Err(Error::NotPeriodic(why.to_string()));
    if tail.len() < 16 {
        return not_periodic("trajectory too short");
    }
    let nodes = traj.dim() / 2;
    let (coord, mean) = {
        let mut best = (1, 0.0, -1.0);
        for i in 0..nodes {
            let c = 2 * i + 1;
            let m = tail.iter().map(|x| x[c]).sum::<f64>() / tail.len() as f64;
            let v = tail.iter().map(|x| (x[c] - m).powi(2)).sum::<f64>();
            if v > best.2 {
                best = (c, m, v);
            }
        }
        (best.0, best.1)
    };

    // Sustained amplitude: the two halves of the tail must agree.
    let half = tail.len() / 2;
    let amp = |xs: &[StateVector]| {
        let (lo, hi) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x[coord]), hi.max(x[coord])));
        hi - lo
    };
    let (a1, a2) = (amp(&tail[..half]), amp(&tail[half..]));
    if !(a2 > 1e-8 * (1.0 + mean.abs())) || (a2 / a1 - 1.0).abs() > 1e-2 {
        return not_periodic("no sustained oscillation");
    }

    let g = |t: f64| traj.at(t).map(|x| x[coord] - mean).unwrap_or(f64::NAN);
    let mut crossings = Vec::new();
    for k in start..traj.len() - 1 {
        let (u, v) = (traj.states[k][coord] - mean, traj.states[k + 1][coord] - mean);
        if u < 0.0 && v >= 0.0 {
            let (mut a, mut b) = (traj.times[k], traj.times[k + 1]);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if g(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            crossings.push(0.5 * (a + b));
        }
    }
    // A waveform may cross its mean upward more than once per period.
    for lag in 1..=4 {
        if crossings.len() < lag * MIN_PERIODS + 1 {
            break;
        }
        let periods: Vec<f64> = crossings.windows(lag + 1).map(|w| w[lag] - w[0]).collect();
        let mean_p = periods.iter().sum::<f64>() / periods.len() as f64;
        let (lo, hi) = periods
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        if (hi - lo) / mean_p < PERIOD_SPREAD {
            return Ok(mean_p);
        }
    }
    not_periodic("crossing intervals do not settle")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryTag {
    FullySync,
    RotatingWave,
    /// Nodes are 1-based.
    Z2SpatioTemporal(usize, usize),
    Z2Spatial(usize, usize),
    Asymmetric,
}

impl fmt::Display for SymmetryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryTag::FullySync => write!(f, "fully-sync"),
            SymmetryTag::RotatingWave => write!(f, "rotating-wave"),
            SymmetryTag::Z2SpatioTemporal(a, b) => write!(f, "z2-spatiotemporal({a},{b})"),
            SymmetryTag::Z2Spatial(a, b) => write!(f, "z2-spatial({a},{b})"),
            SymmetryTag::Asymmetric => write!(f, "asymmetric"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryClass {
    pub tag: SymmetryTag,
    pub period: Option<f64>,
    pub residual: f64,
}

const CLASSIFY_SAMPLES: usize = 400;

/// Node states over one period ending a full period before the end of the
/// run, with angles taken relative to the node mean for the phase models.
fn window_samples(traj: &Trajectory, period: f64, shift: f64) -> Option<Vec<Vec<(f64, f64)>>> {
    let t0 = traj.t_end() - 2.0 * period;
    if t0 < 0.0 {
        return None;
    }
    let nodes = traj.dim() / 2;
    let quotient = matches!(traj.kind, ModelKind::Phase | ModelKind::PhaseRotatingFrame);
    (0..CLASSIFY_SAMPLES)
        .map(|s| {
            let t = t0 + period * s as f64 / CLASSIFY_SAMPLES as f64 + shift;
            traj.at(t).map(|x| {
                let mean = if quotient {
                    (0..nodes).map(|i| x[2 * i]).sum::<f64>() / nodes as f64
                } else {
                    0.0
                };
                (0..nodes).map(|i| (x[2 * i] - mean, x[2 * i + 1])).collect()
            })
        })
        .collect()
}

fn defect(a: (f64, f64), b: (f64, f64)) -> f64 {
    wrap_angle(a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// Tests the symmetry relations over one period and reports the first of
/// fully synchronized, rotating wave, spatio-temporal `Z₂` and spatial `Z₂`
/// whose defect is below `tol`.
pub fn symmetry_classify(traj: &Trajectory, period: f64, tol: f64) -> SymmetryClass {
    let asym = SymmetryClass {
        tag: SymmetryTag::Asymmetric,
        period: Some(period),
        residual: f64::INFINITY,
    };
    let nodes = traj.dim() / 2;
    if !(period > 0.0) || nodes < 2 || traj.kind == ModelKind::PhaseDifference {
        return asym;
    }
    let Some(now) = window_samples(traj, period, 0.0) else {
        return asym;
    };
    let max_over = |f: &dyn Fn(usize) -> f64| (0..CLASSIFY_SAMPLES).map(f).fold(0.0, f64::max);
    let mut candidates: Vec<(SymmetryTag, f64)> = Vec::new();

    let sync = max_over(&|s| (1..nodes).map(|i| defect(now[s][i], now[s][0])).fold(0.0, f64::max));
    candidates.push((SymmetryTag::FullySync, sync));

    if nodes >= 3 {
        if let Some(later) = window_samples(traj, period, period / nodes as f64) {
            let forward = max_over(&|s| {
                (0..nodes)
                    .map(|i| defect(now[s][(i + 1) % nodes], later[s][i]))
                    .fold(0.0, f64::max)
            });
            let backward = max_over(&|s| {
                (0..nodes)
                    .map(|i| defect(now[s][(i + nodes - 1) % nodes], later[s][i]))
                    .fold(0.0, f64::max)
            });
            candidates.push((SymmetryTag::RotatingWave, forward.min(backward)));
        }
    }

    let pairs: Vec<(usize, usize)> = (0..nodes)
        .flat_map(|a| (a + 1..nodes).map(move |b| (a, b)))
        .collect();
    if let Some(half) = window_samples(traj, period, 0.5 * period) {
        let best = pairs
            .iter()
            .map(|&(a, b)| {
                let r = max_over(&|s| {
                    (0..nodes)
                        .map(|i| {
                            let j = if i == a {
                                b
                            } else if i == b {
                                a
                            } else {
                                i
                            };
                            defect(now[s][j], half[s][i])
                        })
                        .fold(0.0, f64::max)
                });
                (SymmetryTag::Z2SpatioTemporal(a + 1, b + 1), r)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1));
        candidates.extend(best);
    }
    let best = pairs
        .iter()
        .map(|&(a, b)| {
            (
                SymmetryTag::Z2Spatial(a + 1, b + 1),
                max_over(&|s| defect(now[s][a], now[s][b])),
            )
        })
        .min_by(|x, y| x.1.total_cmp(&y.1));
    candidates.extend(best);

    candidates
        .into_iter()
        .find(|c| c.1 < tol)
        .map(|(tag, residual)| SymmetryClass {
            tag,
            period: Some(period),
            residual,
        })
        .unwrap_or(asym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfun::{build_blocks, LinearizationPoint};
    use crate::model::{Equilibrium, EquilibriumBranch};
    use crate::spectrum::{rightmost_root, Scheme};

    fn eq_state(k: f64, n: usize) -> StateVector {
        Equilibrium::new(k, EquilibriumBranch::Minus).unwrap().state(n)
    }

    #[test]
    fn equilibrium_is_fixed() {
        let p = NetworkParams::new(3, 1.05, 0.3, 2.0);
        let tr = integrate(ModelKind::FullPhase, &p, &HistorySpec::constant(eq_state(1.05, 3)), 100.0, 0.05).unwrap();
        let x0 = eq_state(1.05, 3);
        for x in &tr.states {
            for (a, b) in x.iter().zip(&x0) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        assert!(matches!(period_estimate(&tr, TRANSIENT_FRACTION), Err(Error::NotPeriodic(_))));
    }

    #[test]
    fn step_constraints() {
        let p = NetworkParams::new(2, 1.05, 0.3, 1.0);
        let h = HistorySpec::constant(eq_state(1.05, 2));
        assert!(matches!(integrate(ModelKind::FullPhase, &p, &h, 10.0, 0.3), Err(Error::StepTooLarge { .. })));
        let tr = integrate(ModelKind::FullPhase, &p, &h, 10.0, 0.07).unwrap();
        assert!((1.0 / tr.step - (1.0 / tr.step).round()).abs() < 1e-9);
        assert!(tr.step <= 0.07);
        assert!(integrate(ModelKind::FullPhase, &p, &h, -1.0, 0.1).is_err());
        assert!(HistorySpec::perturbed(vec![0.0; 4], &[1.0, 0.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn blow_up_detected() {
        let p = NetworkParams::new(2, 1e300, 1e300, 1.0);
        let h = HistorySpec::constant(vec![0.3, 1e300, 0.1, 0.0]);
        assert!(matches!(integrate(ModelKind::FullPhase, &p, &h, 10.0, 0.1), Err(Error::NonFinite { .. })));
    }

    fn terminal(tau: f64, step: f64) -> StateVector {
        let p = NetworkParams::new(2, 1.3, 0.8, tau);
        let h = HistorySpec::constant(vec![0.2, 1.5, -0.7, 0.4]);
        integrate(ModelKind::FullPhase, &p, &h, 8.0, step).unwrap().states.last().unwrap().clone()
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn fourth_order_without_delay() {
        // Richardson: successive differences shrink by 2^order.
        let (a, b, c) = (terminal(0.0, 0.1), terminal(0.0, 0.05), terminal(0.0, 0.025));
        let order = (dist(&a, &b) / dist(&b, &c)).log2();
        assert!((3.7..=4.3).contains(&order), "{order}");
    }

    #[test]
    fn fourth_order_with_delay() {
        let (a, b, c) = (terminal(2.0, 0.1), terminal(2.0, 0.05), terminal(2.0, 0.025));
        let ratio = dist(&a, &b) / dist(&b, &c);
        assert!((10.0..=22.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn dense_output_continuous() {
        let p = NetworkParams::new(2, 1.3, 0.8, 1.5);
        let h = HistorySpec::constant(vec![0.2, 1.5, -0.7, 0.4]);
        let tr = integrate(ModelKind::FullPhase, &p, &h, 20.0, 0.05).unwrap();
        for k in 1..tr.len() - 1 {
            let t = tr.times[k];
            let left = {
                let mut out = vec![0.0; 4];
                hermite(&tr.states[k - 1], &tr.dense_coeffs[k - 1], &tr.states[k], &tr.dense_coeffs[k], tr.step, 1.0, &mut out);
                out
            };
            let right = tr.at(t).unwrap();
            assert!(dist(&left, &right) < 1e-12);
        }
        // Interpolated values agree with a finer run at off-grid times.
        let fine = integrate(ModelKind::FullPhase, &p, &h, 20.0, 0.0125).unwrap();
        for t in [0.33, 4.71, 13.02, 19.9] {
            assert!(dist(&tr.at(t).unwrap(), &fine.at(t).unwrap()) < 1e-5);
        }
    }

    #[test]
    fn transposition_equivariance() {
        let x = vec![0.1, 1.2, -0.4, 0.7, 0.9, 0.95];
        let swapped = vec![-0.4, 0.7, 0.1, 1.2, 0.9, 0.95];
        for kind in [ModelKind::FullPhase, ModelKind::Phase] {
            let p = NetworkParams::new(3, 1.1, 0.5, 2.0);
            let a = integrate(kind, &p, &HistorySpec::constant(x.clone()), 30.0, 0.05).unwrap();
            let b = integrate(kind, &p, &HistorySpec::constant(swapped.clone()), 30.0, 0.05).unwrap();
            for (u, v) in a.states.iter().zip(&b.states) {
                let v = [v[2], v[3], v[0], v[1], v[4], v[5]];
                assert!(dist(u, &v) < 1e-9);
            }
        }
    }

    #[test]
    fn phase_translation() {
        let p = NetworkParams::new(3, 1.1, 0.5, 2.0);
        let x = vec![0.1, 1.2, -0.4, 0.7, 0.9, 0.95];
        let shifted: Vec<f64> = x.iter().enumerate().map(|(i, v)| if i % 2 == 0 { v + 2.5 } else { *v }).collect();
        let a = integrate(ModelKind::Phase, &p, &HistorySpec::constant(x), 30.0, 0.05).unwrap();
        let b = integrate(ModelKind::Phase, &p, &HistorySpec::constant(shifted), 30.0, 0.05).unwrap();
        for (u, v) in a.states.iter().zip(&b.states) {
            for i in 0..6 {
                let d = if i % 2 == 0 { 2.5 } else { 0.0 };
                assert!((v[i] - u[i] - d).abs() < 1e-9);
            }
        }
    }

    fn fix_growth(tau: f64) -> f64 {
        let p = NetworkParams::new(2, 1.05, 0.3, tau);
        let base = eq_state(1.05, 2);
        let h = HistorySpec::isotypic(base.clone(), 0, false, 1e-4).unwrap();
        let tr = integrate(ModelKind::FullPhase, &p, &h, 40.0 * tau, 0.02).unwrap();
        let dev = |lo: f64, hi: f64| {
            tr.times
                .iter()
                .zip(&tr.states)
                .filter(|(t, _)| **t >= lo && **t <= hi)
                .map(|(_, x)| dist(x, &base))
                .fold(0.0, f64::max)
        };
        dev(28.0 * tau, 40.0 * tau) / dev(4.0 * tau, 16.0 * tau)
    }

    #[test]
    fn fix_crossing_changes_stability() {
        let eq = Equilibrium::new(1.05, EquilibriumBranch::Minus).unwrap();
        for (tau, grows) in [(6.0, false), (6.7, true)] {
            let p = NetworkParams::new(2, 1.05, 0.3, tau);
            let fix = build_blocks(ModelKind::FullPhase, &p, LinearizationPoint::Equilibrium(eq)).unwrap().fix_block;
            let re = rightmost_root(&fix, tau, Scheme::Newton).unwrap().lambda.re;
            assert_eq!(re > 0.0, grows);
            let g = fix_growth(tau);
            assert_eq!(g > 1.0, grows, "tau={tau} growth={g} re={re}");
        }
    }

    /// Orbit born at the first crossing of `block`, sampled at 1.01·τ*, with
    /// its Hopf frequency.
    fn orbit_past_crossing(n: usize, block: crate::charfun::Block, dir: &[f64]) -> (Trajectory, f64) {
        use crate::snmap::crossings_up_to;
        let eq = Equilibrium::new(1.05, EquilibriumBranch::Minus).unwrap();
        let p0 = NetworkParams::new(n, 1.05, 0.075, 0.0);
        let q = build_blocks(ModelKind::FullPhase, &p0, LinearizationPoint::Equilibrium(eq)).unwrap();
        let first = crossings_up_to(q.block(block), block, 30.0)
            .unwrap()
            .into_iter()
            .find(|c| c.delta_sign > 0)
            .unwrap();
        let tau = 1.01 * first.tau_star;
        let h = HistorySpec::perturbed(eq.state(n), dir, 1e-2).unwrap();
        let tr = integrate(ModelKind::FullPhase, &p0.with_delay(tau), &h, 20000.0, 0.05).unwrap();
        (tr, first.omega())
    }

    #[test]
    fn sync_orbit_after_fix_hopf() {
        let (tr, omega) = orbit_past_crossing(3, crate::charfun::Block::Fix, &[1.0, 1.0, 1.0]);
        let period = period_estimate(&tr, TRANSIENT_FRACTION).unwrap();
        let hopf = 2.0 * std::f64::consts::PI / omega;
        assert!((period / hopf - 1.0).abs() < 0.02, "{period} {hopf}");
        let class = symmetry_classify(&tr, period, 1e-2);
        assert_eq!(class.tag, SymmetryTag::FullySync);
    }

    #[test]
    fn z2_orbit_after_standard_hopf() {
        let (tr, omega) = orbit_past_crossing(2, crate::charfun::Block::Standard, &[1.0, -1.0]);
        let period = period_estimate(&tr, TRANSIENT_FRACTION).unwrap();
        let hopf = 2.0 * std::f64::consts::PI / omega;
        assert!((period / hopf - 1.0).abs() < 0.02, "{period} {hopf}");
        let class = symmetry_classify(&tr, period, 1e-2);
        assert_eq!(class.tag, SymmetryTag::Z2SpatioTemporal(1, 2), "{class:?}");
        assert!(class.residual < 1e-2);
    }

    #[test]
    fn growing_linear_mode_is_not_periodic() {
        // Just past a subcritical crossing the oscillation is still growing.
        let p = NetworkParams::new(2, 1.05, 0.3, 6.36);
        let h = HistorySpec::isotypic(eq_state(1.05, 2), 0, false, 1e-3).unwrap();
        let tr = integrate(ModelKind::FullPhase, &p, &h, 8000.0, 0.053).unwrap();
        assert!(matches!(period_estimate(&tr, TRANSIENT_FRACTION), Err(Error::NotPeriodic(_))));
    }

    #[test]
    fn classify_synthetic() {
        // A rotating wave written directly into a trajectory.
        let period = 10.0;
        let p = NetworkParams::new(3, 1.0, 1.0, 0.0);
        let h = 0.01;
        let times: Vec<f64> = (0..=10_000).map(|k| k as f64 * h).collect();
        let w = 2.0 * std::f64::consts::PI / period;
        let node = |t: f64, i: usize| {
            let s = t + i as f64 * period / 3.0;
            ((w * s).sin(), w * (w * s).cos())
        };
        let states: Vec<StateVector> = times
            .iter()
            .map(|&t| (0..3).flat_map(|i| [node(t, i).0, node(t, i).1]).collect())
            .collect();
        let derivs: Vec<StateVector> = times
            .iter()
            .map(|&t| (0..3).flat_map(|i| [node(t, i).1, -w * w * node(t, i).0]).collect())
            .collect();
        let tr = Trajectory {
            times,
            history: states[0].clone(),
            states,
            dense_coeffs: derivs,
            params: p,
            kind: ModelKind::FullPhase,
            step: h,
        };
        assert_eq!(symmetry_classify(&tr, period, 1e-6).tag, SymmetryTag::RotatingWave);
        assert_eq!(symmetry_classify(&tr, 7.3, 1e-6).tag, SymmetryTag::Asymmetric);
    }

    #[test]
    fn csv_export() {
        let p = NetworkParams::new(2, 1.05, 0.3, 1.0);
        let tr = integrate(ModelKind::FullPhase, &p, &HistorySpec::constant(eq_state(1.05, 2)), 1.0, 0.25).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "t,x1_1,x2_1,x1_2,x2_2");
        let row: Vec<f64> = lines.nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], 0.25);
        assert_eq!(row[1], tr.states[1][0]);
    }
}
