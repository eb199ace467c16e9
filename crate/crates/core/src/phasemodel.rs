//! Phase-model relative equilibria and their bifurcations.
//!
//! Synchronized solutions rotate as `θ_k(t) = Ω(τ)t` with `Ω̂ = Ω + ω_M`
//! solving `Ω̂ + K sin(Ω̂τ) = ω_M`. Several such rotations coexist for large
//! delays; each is followed as a branch `τ ↦ Ω̂(τ)` and scanned for
//! imaginary-axis crossings of its fix and standard blocks.

use crate::charfun::{Block, QuasiPolynomial, RelEqCoeffs, RotationSource};
use crate::model::NetworkParams;
use crate::snmap::{default_scan_step, sn_scan, CrossingCandidate, RootBranch};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn releq_residual(params: &NetworkParams, w: f64, tau: f64) -> f64 {
    w + params.coupling * (w * tau).sin() - params.free_freq
}

fn releq_slope(params: &NetworkParams, w: f64, tau: f64) -> f64 {
    1.0 + params.coupling * tau * (w * tau).cos()
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All `Ω̂ ∈ [ω_M − K, ω_M + K]` with `Ω̂ + K sin(Ω̂τ) = ω_M`, ascending.
///
/// Cells of the scan grid contain at most one extremum of the residual, so
/// pairs of roots inside one cell are separated at that extremum first.
pub fn releq_solve(params: &NetworkParams, tau: f64) -> Vec<f64> {
    let k = params.coupling;
    let w_m = params.free_freq;
    if tau == 0.0 {
        return vec![w_m];
    }
    let (lo, hi) = (w_m - k, w_m + k);
    let range = hi - lo;
    let step = (PI / (4.0 * tau * k)).min(PI / (2.0 * tau)).min(range / 100.0);
    let cells = (range / step).ceil() as usize;
    let g = |w: f64| releq_residual(params, w, tau);
    let dg = |w: f64| releq_slope(params, w, tau);
    let mut roots = Vec::new();
    let push_root = |a: f64, b: f64, roots: &mut Vec<f64>| {
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            roots.push(a);
        } else if gb != 0.0 && ga.signum() != gb.signum() {
            let mut r = bisect(g, a, b, 1e-12);
            let d = dg(r);
            if d != 0.0 {
                let next = r - g(r) / d;
                if next >= a && next <= b && g(next).abs() < g(r).abs() {
                    r = next;
                }
            }
            roots.push(r);
        }
    };
    for i in 0..cells {
        let a = lo + i as f64 * step;
        let b = (lo + (i + 1) as f64 * step).min(hi);
        let (da, db) = (dg(a), dg(b));
        if da.signum() != db.signum() && da != 0.0 && db != 0.0 {
            let m = bisect(dg, a, b, 1e-15);
            push_root(a, m, &mut roots);
            push_root(m, b, &mut roots);
        } else {
            push_root(a, b, &mut roots);
        }
    }
    if g(hi) == 0.0 {
        roots.push(hi);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-11);
    roots
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelEqBranch {
    pub branch_id: usize,
    pub samples: Vec<(f64, f64)>,
    pub window: (f64, f64),
    params: NetworkParams,
}

impl RelEqBranch {
    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    /// `Ω̂(τ)` on this branch: interpolated between samples and polished by
    /// Newton on the defining equation.
    pub fn omega_hat_at(&self, tau: f64) -> Option<f64> {
        let (lo, hi) = self.window;
        if tau < lo || tau > hi || self.samples.is_empty() {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.0 <= tau);
        let guess = match idx {
            0 => self.samples[0].1,
            i if i >= self.samples.len() => self.samples[self.samples.len() - 1].1,
            i => {
                let (t0, w0) = self.samples[i - 1];
                let (t1, w1) = self.samples[i];
                if t1 > t0 {
                    w0 + (w1 - w0) * (tau - t0) / (t1 - t0)
                } else {
                    w0
                }
            }
        };
        let mut w = guess;
        for _ in 0..50 {
            let d = releq_slope(&self.params, w, tau);
            if d == 0.0 {
                break;
            }
            let step = releq_residual(&self.params, w, tau) / d;
            w -= step;
            if step.abs() < 1e-15 * w.abs().max(1.0) {
                break;
            }
        }
        let ok = releq_residual(&self.params, w, tau).abs() < 1e-10
            && (w - guess).abs() < 0.05 * (2.0 * self.params.coupling).max(1e-3);
        ok.then_some(w)
    }
}

impl RotationSource for RelEqBranch {
    fn omega_hat(&self, tau: f64) -> Option<f64> {
        self.omega_hat_at(tau)
    }
}

impl RotationSource for Arc<RelEqBranch> {
    fn omega_hat(&self, tau: f64) -> Option<f64> {
        self.omega_hat_at(tau)
    }
}

/// Minimum-cost order-preserving matching of `pred` (length m) into
/// `sols` (length n); returns for each prediction its solution index.
fn monotone_match(pred: &[f64], sols: &[f64]) -> Vec<Option<usize>> {
    let (m, n) = (pred.len(), sols.len());
    let k = m.min(n);
    // cost[i][j]: best cost matching the first i of the longer side choosing
    // k of them against the first j of the shorter side.
    let swap = m > n;
    let (long, short) = if swap { (pred, sols) } else { (sols, pred) };
    let (lm, sm) = (long.len(), short.len());
    let inf = f64::INFINITY;
    let mut cost = vec![vec![inf; sm + 1]; lm + 1];
    let mut take = vec![vec![false; sm + 1]; lm + 1];
    for row in cost.iter_mut() {
        row[0] = 0.0;
    }
    for i in 1..=lm {
        for j in 1..=sm.min(i) {
            let skip = cost[i - 1][j];
            let pick = cost[i - 1][j - 1] + (long[i - 1] - short[j - 1]).abs();
            if pick <= skip {
                cost[i][j] = pick;
                take[i][j] = true;
            } else {
                cost[i][j] = skip;
            }
        }
    }
    let mut out = vec![None; m];
    let (mut i, mut j) = (lm, k);
    while j > 0 {
        if take[i][j] {
            if swap {
                out[i - 1] = Some(j - 1);
            } else {
                out[j - 1] = Some(i - 1);
            }
            j -= 1;
        }
        i -= 1;
    }
    out
}

struct Open {
    birth: f64,
    samples: Vec<(f64, f64)>,
    end: Option<f64>,
}

impl Open {
    fn predict(&self, tau: f64) -> f64 {
        let n = self.samples.len();
        let (t1, w1) = self.samples[n - 1];
        if n < 2 {
            return w1;
        }
        let (t0, w0) = self.samples[n - 2];
        if t1 > t0 {
            w1 + (w1 - w0) / (t1 - t0) * (tau - t1)
        } else {
            w1
        }
    }
}

/// Relative-equilibrium branches over `tau_window`, sampled every
/// `resolution` in `τ`. Folds where a pair of branches is born are located
/// to within `1e−6` by bisection on the solution count.
pub fn releq_branches(params: &NetworkParams, tau_window: (f64, f64), resolution: f64) -> Vec<RelEqBranch> {
    let (lo, hi) = tau_window;
    let steps = (((hi - lo) / resolution).ceil() as usize).max(1);
    let mut open: Vec<Open> = releq_solve(params, lo)
        .into_iter()
        .map(|w| Open {
            birth: lo,
            samples: vec![(lo, w)],
            end: None,
        })
        .collect();

    let advance = |open: &mut Vec<Open>, tau: f64, sols: &[f64]| {
        let active: Vec<usize> = (0..open.len()).filter(|&i| open[i].end.is_none()).collect();
        let pred: Vec<f64> = active.iter().map(|&i| open[i].predict(tau)).collect();
        let assign = monotone_match(&pred, sols);
        let mut used = vec![false; sols.len()];
        for (slot, &bi) in active.iter().enumerate() {
            match assign[slot] {
                Some(j) => {
                    let last = open[bi].samples.last().unwrap().1;
                    let gate = 10.0 * (pred[slot] - last).abs() + 0.1 * params.coupling;
                    if (sols[j] - pred[slot]).abs() <= gate {
                        open[bi].samples.push((tau, sols[j]));
                        used[j] = true;
                    } else {
                        open[bi].end = Some(open[bi].samples.last().unwrap().0);
                    }
                }
                None => open[bi].end = Some(open[bi].samples.last().unwrap().0),
            }
        }
        for (j, &w) in sols.iter().enumerate() {
            if !used[j] {
                open.push(Open {
                    birth: tau,
                    samples: vec![(tau, w)],
                    end: None,
                });
            }
        }
    };

    let mut prev_tau = lo;
    let mut prev_count = open.len();
    for i in 1..=steps {
        let tau = (lo + i as f64 * resolution).min(hi);
        let mut sols = releq_solve(params, tau);
        // Split the interval at every change of the solution count.
        let mut a = prev_tau;
        while sols.len() != prev_count {
            let (mut l, mut r) = (a, tau);
            while r - l > 1e-6 {
                let m = 0.5 * (l + r);
                if releq_solve(params, m).len() == prev_count {
                    l = m;
                } else {
                    r = m;
                }
            }
            let at_fold = releq_solve(params, r);
            advance(&mut open, r, &at_fold);
            prev_count = at_fold.len();
            a = r;
            if r >= tau {
                sols = at_fold;
                break;
            }
        }
        if a < tau {
            advance(&mut open, tau, &sols);
        }
        prev_count = sols.len();
        prev_tau = tau;
    }

    let mut branches: Vec<Open> = open;
    branches.sort_by(|a, b| {
        a.birth
            .total_cmp(&b.birth)
            .then(a.samples[0].1.total_cmp(&b.samples[0].1))
    });
    branches
        .into_iter()
        .enumerate()
        .map(|(id, b)| {
            let end = b.end.unwrap_or(b.samples.last().unwrap().0);
            RelEqBranch {
                branch_id: id,
                window: (b.birth, end),
                samples: b.samples,
                params: *params,
            }
        })
        .collect()
}

/// Default `τ` resolution for branch tracing.
pub fn default_resolution(tau_window: (f64, f64)) -> f64 {
    (tau_window.1 - tau_window.0) / 2000.0
}

/// Imaginary-axis crossings of `block` along every relative-equilibrium
/// branch in `tau_window`.
pub fn relative_hopf_scan(params: &NetworkParams, block: Block, tau_window: (f64, f64)) -> Vec<CrossingCandidate> {
    let branches = releq_branches(params, tau_window, default_resolution(tau_window));
    relative_hopf_scan_on(params, block, &branches)
}

/// As [`relative_hopf_scan`] on precomputed branches.
pub fn relative_hopf_scan_on(
    params: &NetworkParams,
    block: Block,
    branches: &[RelEqBranch],
) -> Vec<CrossingCandidate> {
    let selectors: &[RootBranch] = match block {
        Block::Fix => &[RootBranch::PlusRoot],
        Block::Standard => &[RootBranch::PlusRoot, RootBranch::MinusRoot],
    };
    let mut out: Vec<CrossingCandidate> = branches
        .par_iter()
        .flat_map_iter(|br| {
            let window = br.window;
            let provider = RelEqCoeffs::new(*params, block, Arc::new(br.clone()));
            let p = QuasiPolynomial::new(Arc::new(provider), window.0);
            let mut found = Vec::new();
            if window.1 > window.0 {
                for &sel in selectors {
                    found.extend(sn_scan(
                        &p,
                        block,
                        sel,
                        window,
                        default_scan_step(window),
                        Some(br.branch_id),
                    ));
                }
            }
            found
        })
        .collect();
    out.sort_by(|a, b| {
        a.tau_star
            .total_cmp(&b.tau_star)
            .then(a.branch_id.cmp(&b.branch_id))
    });
    out
}

/// Whether `ω_M τ` is a whole multiple of `π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayCase {
    EvenMultiple(u64),
    OddMultiple(u64),
    Generic,
}

pub fn delay_case(params: &NetworkParams, tol: f64) -> DelayCase {
    let x = params.free_freq * params.delay / PI;
    let m = x.round();
    if (x - m).abs() > tol || m < 0.0 {
        return DelayCase::Generic;
    }
    let m = m as u64;
    if m % 2 == 0 {
        DelayCase::EvenMultiple(m / 2)
    } else {
        DelayCase::OddMultiple(m / 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCurvePoint {
    pub m: i64,
    pub mu: f64,
    pub coupling: f64,
    pub residual: f64,
}

/// Residual of `√(2Kμ − μ²) = (ω_M/2nπ)(arg(μ − K, −√(2Kμ − μ²)) + 2mπ)`.
pub fn equilibrium_case_residual(omega_m: f64, n: u64, m: i64, mu: f64, k: f64) -> f64 {
    let root = (2.0 * k * mu - mu * mu).max(0.0).sqrt();
    let arg = (-root).atan2(mu - k);
    root - omega_m / (2.0 * n as f64 * PI) * (arg + 2.0 * PI * m as f64)
}

/// Curves `K(μ)` on which the fix block of the equilibrium `Ω̂ = ω_M`
/// (delay `ω_M τ = 2nπ`) has an imaginary root.
///
/// `half_turns` is `ω_M τ / π`; odd values admit no nonzero root and give an
/// empty table.
pub fn equilibrium_case_curves(
    omega_m: f64,
    half_turns: u64,
    m_range: std::ops::RangeInclusive<i64>,
    mu_grid: &[f64],
) -> Vec<KCurvePoint> {
    if half_turns % 2 == 1 || half_turns == 0 {
        return Vec::new();
    }
    let n = half_turns / 2;
    let mut out = Vec::new();
    for m in m_range.filter(|&m| m >= 1) {
        for &mu in mu_grid.iter().filter(|&&mu| mu > 0.0) {
            let h = |k: f64| equilibrium_case_residual(omega_m, n, m, mu, k);
            let lo = 0.5 * mu;
            let mut hi = mu.max(1.0);
            while h(hi) <= 0.0 && hi < 1e12 {
                hi *= 2.0;
            }
            if h(hi) <= 0.0 {
                continue;
            }
            let k = bisect(h, lo, hi, 1e-14 * hi);
            out.push(KCurvePoint {
                m,
                mu,
                coupling: k,
                residual: h(k).abs(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRootEvent {
    pub tau_star: f64,
    pub n: i64,
    pub delta0: f64,
}

/// Delays where the standard block has the root `λ = 0`, with the crossing
/// speed of that root; entries with a nonpositive denominator or negative
/// delay are dropped.
pub fn zero_root_taus(params: &NetworkParams, n_range: std::ops::RangeInclusive<i64>) -> Vec<ZeroRootEvent> {
    let k = params.coupling;
    let w = params.free_freq;
    let nn = params.n_nodes as f64;
    let mut out: Vec<ZeroRootEvent> = n_range
        .filter_map(|n| {
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let denom = w - sign * k;
            if !(denom > 0.0) {
                return None;
            }
            let tau_star = (0.5 * PI + n as f64 * PI) / denom;
            if tau_star < 0.0 {
                return None;
            }
            Some(ZeroRootEvent {
                tau_star,
                n,
                delta0: sign * k * nn / (nn - 1.0) * denom,
            })
        })
        .collect();
    out.sort_by(|a, b| a.tau_star.total_cmp(&b.tau_star));
    out
}
