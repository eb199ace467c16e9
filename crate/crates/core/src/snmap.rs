//! Imaginary-axis crossings of a block `P(λ, τ) = R + S e^{−λτ}`.
//!
//! A root `λ = iω` needs `|R(iω)|² = |S(iω)|²`, i.e. `F(ω) = ω⁴ + bω² + c = 0`
//! with `b = r₁² − 2r₀`, `c = r₀² − s₀²`. The angle `θ = ωτ mod 2π` then
//! follows from `R`, `S`, and the delays are the zeros of the map
//! `S_n(τ) = τ − (θ(τ) + 2nπ)/ω(τ)`.

use crate::charfun::{build_blocks, Block, BlockCoeffs, LinearizationPoint, QuasiPolynomial};
use crate::error::{Error, Result};
use crate::model::{Equilibrium, EquilibriumBranch, ModelKind, NetworkParams};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootBranch {
    PlusRoot,
    MinusRoot,
}

impl fmt::Display for RootBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootBranch::PlusRoot => "plus",
            RootBranch::MinusRoot => "minus",
        })
    }
}

/// Sign pattern of `(b, c)` deciding which of `ω±` are real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExistenceCase {
    /// `b² − 4c < 0`: no real `ω`.
    NoRealRoot,
    /// `b ≥ 0, c ≤ 0`: only `ω₊` real.
    NonNegativeBNonPositiveC,
    /// `b ≥ 0, c > 0`: neither real.
    NonNegativeBPositiveC,
    /// `b < 0, c ≤ 0`: only `ω₊` real.
    NegativeBNonPositiveC,
    /// `b < 0, c > 0`: both real.
    NegativeBPositiveC,
}

pub fn existence_case(b: f64, c: f64) -> ExistenceCase {
    if b * b - 4.0 * c < 0.0 {
        ExistenceCase::NoRealRoot
    } else if b >= 0.0 {
        if c <= 0.0 {
            ExistenceCase::NonNegativeBNonPositiveC
        } else {
            ExistenceCase::NonNegativeBPositiveC
        }
    } else if c <= 0.0 {
        ExistenceCase::NegativeBNonPositiveC
    } else {
        ExistenceCase::NegativeBPositiveC
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaCandidate {
    pub omega: f64,
    pub root_branch: RootBranch,
    pub b: f64,
    pub c: f64,
    pub case: ExistenceCase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingCandidate {
    pub omega_candidate: OmegaCandidate,
    pub tau_star: f64,
    pub winding: i64,
    pub delta: f64,
    pub delta_sign: i8,
    pub block: Block,
    /// Relative-equilibrium branch the crossing was found on (phase model).
    pub branch_id: Option<usize>,
}

impl CrossingCandidate {
    pub fn omega(&self) -> f64 {
        self.omega_candidate.omega
    }
}

pub fn f_poly(b: f64, c: f64, omega: f64) -> f64 {
    let w2 = omega * omega;
    (w2 + b) * w2 + c
}

/// `(b, c)` of `F` for a block with `r₂ = 1` and constant-in-λ `S`.
pub fn f_coefficients(k: &BlockCoeffs) -> (f64, f64) {
    (k.r1 * k.r1 - 2.0 * k.r0 * k.r2, k.r0 * k.r0 - k.s0 * k.s0)
}

/// Positive real roots of `F(ω) = ω⁴ + bω² + c`.
pub fn omega_candidates(b: f64, c: f64) -> Vec<OmegaCandidate> {
    let case = existence_case(b, c);
    if case == ExistenceCase::NoRealRoot {
        return Vec::new();
    }
    let disc = (b * b - 4.0 * c).max(0.0).sqrt();
    // Larger-magnitude root first, the other from Vieta to avoid cancellation.
    let big = if b <= 0.0 { 0.5 * (-b + disc) } else { 0.5 * (-b - disc) };
    let small = if big != 0.0 { c / big } else { 0.0 };
    let (w2_plus, w2_minus) = if b <= 0.0 { (big, small) } else { (small, big) };
    let mut out = Vec::new();
    for (w2, branch) in [(w2_plus, RootBranch::PlusRoot), (w2_minus, RootBranch::MinusRoot)] {
        if !(w2 > 0.0) || !w2.is_finite() {
            continue;
        }
        if branch == RootBranch::MinusRoot && disc == 0.0 {
            // Double root, reported once.
            continue;
        }
        let mut omega = w2.sqrt();
        let dfw = 4.0 * omega.powi(3) + 2.0 * b * omega;
        if dfw.abs() > 1e-8 * omega.powi(3).max(1e-300) {
            let next = omega - f_poly(b, c, omega) / dfw;
            if next > 0.0 && f_poly(b, c, next).abs() <= f_poly(b, c, omega).abs() {
                omega = next;
            }
        }
        out.push(OmegaCandidate {
            omega,
            root_branch: branch,
            b,
            c,
            case,
        });
    }
    out
}

/// `(cos ωτ, sin ωτ)` forced by `P(iω) = 0`.
pub fn crossing_trig(p: &QuasiPolynomial, omega: f64) -> Result<(f64, f64)> {
    let l = Complex64::new(0.0, omega);
    let r = p.r(l);
    let s = p.s(l);
    let s2 = s.norm_sqr();
    if s2 == 0.0 || !s2.is_finite() {
        return Err(Error::DegenerateS);
    }
    let cos = -(s.im * r.im + s.re * r.re) / s2;
    let sin = (r.im * s.re - s.im * r.re) / s2;
    Ok((cos, sin))
}

/// `θ ∈ (−π, π]` with `e^{iθ} = e^{iωτ}` at a crossing.
pub fn crossing_angle(p: &QuasiPolynomial, omega: f64) -> Result<f64> {
    let (cos, sin) = crossing_trig(p, omega)?;
    let theta = sin.atan2(cos);
    Ok(if theta <= -PI { PI } else { theta })
}

/// Real part of `dλ/dτ` at the crossing `λ = iω`, `τ = τ*`, with its sign.
pub fn transversality(p: &QuasiPolynomial, omega: f64, tau_star: f64) -> Result<(f64, i8)> {
    let q = p.with_delay(tau_star);
    let k = q.coeffs().ok_or(Error::DegenerateS)?;
    let l = Complex64::new(0.0, omega);
    let e = (-l * tau_star).exp();
    let s = Complex64::new(k.s0, 0.0);
    let num = e * (l * s - k.ds0_dtau) - k.dr0_dtau;
    let den = l * (2.0 * k.r2) + k.r1 + e * (-s * tau_star);
    let (a, b, c, d) = (num.re, num.im, den.re, den.im);
    let top = a * c + b * d;
    let scale = (a * c).abs() + (b * d).abs();
    let delta = top / (c * c + d * d);
    if !(top.abs() > 1e-9 * scale) {
        return Err(Error::DegenerateCrossing {
            tau: tau_star,
            delta,
        });
    }
    Ok((delta, if delta > 0.0 { 1 } else { -1 }))
}

fn candidate(
    p: &QuasiPolynomial,
    block: Block,
    cand: OmegaCandidate,
    tau: f64,
    n: i64,
    branch_id: Option<usize>,
) -> CrossingCandidate {
    let (delta, delta_sign) = match transversality(p, cand.omega, tau) {
        Ok(v) => v,
        Err(Error::DegenerateCrossing { delta, .. }) => (delta, 0),
        Err(_) => (f64::NAN, 0),
    };
    CrossingCandidate {
        omega_candidate: cand,
        tau_star: tau,
        winding: n,
        delta,
        delta_sign,
        block,
        branch_id,
    }
}

/// Crossing delays `τ = (θ + 2nπ)/ω ≥ 0` for a block with `τ`-independent
/// coefficients, sorted ascending.
pub fn tau_candidates(
    p: &QuasiPolynomial,
    block: Block,
    cand: &OmegaCandidate,
    n_range: RangeInclusive<i64>,
) -> Result<Vec<CrossingCandidate>> {
    if !p.is_constant() {
        return Err(Error::InvalidParams(
            "tau_candidates needs tau-independent coefficients; use sn_scan".into(),
        ));
    }
    let theta = crossing_angle(p, cand.omega)?;
    let mut out: Vec<CrossingCandidate> = n_range
        .filter_map(|n| {
            let tau = (theta + 2.0 * PI * n as f64) / cand.omega;
            (tau >= 0.0).then(|| candidate(p, block, *cand, tau, n, None))
        })
        .collect();
    out.sort_by(|a, b| a.tau_star.total_cmp(&b.tau_star));
    Ok(out)
}

/// Windings `n ∈ {−2, …, ⌈ωτ_max/2π⌉ + 1}` covering every `τ ∈ [0, τ_max]`.
pub fn winding_range(omega: f64, tau_max: f64) -> RangeInclusive<i64> {
    -2..=((omega * tau_max / (2.0 * PI)).ceil() as i64 + 1)
}

/// All crossings of a constant-coefficient block in `[0, τ_max]`, sorted.
pub fn crossings_up_to(p: &QuasiPolynomial, block: Block, tau_max: f64) -> Result<Vec<CrossingCandidate>> {
    let k = p.coeffs().ok_or(Error::DegenerateS)?;
    let (b, c) = f_coefficients(&k);
    let mut out = Vec::new();
    for cand in omega_candidates(b, c) {
        let found = tau_candidates(p, block, &cand, winding_range(cand.omega, tau_max))?;
        out.extend(found.into_iter().filter(|x| x.tau_star <= tau_max));
    }
    out.sort_by(|a, b| a.tau_star.total_cmp(&b.tau_star));
    Ok(out)
}

/// Default grid step for [`sn_scan`].
pub fn default_scan_step(window: (f64, f64)) -> f64 {
    1e-3 * (window.1 - window.0)
}

/// Tolerance on `|S_n|` accepted as a zero.
pub const SN_TOL: f64 = 1e-9;

/// Zeros of `S_n(τ)` on `window` for the `ω` branch `selector`.
///
/// Grid points where the selected `ω` does not exist are skipped. Sign
/// changes caused by the `2π` jump of `θ` are rejected because bisection
/// does not drive `|S_n|` to zero across a jump.
pub fn sn_scan(
    p: &QuasiPolynomial,
    block: Block,
    selector: RootBranch,
    window: (f64, f64),
    step: f64,
    branch_id: Option<usize>,
) -> Vec<CrossingCandidate> {
    let (lo, hi) = window;
    if !(hi > lo) || !(step > 0.0) {
        return Vec::new();
    }
    let eval = |tau: f64| -> Option<(OmegaCandidate, f64)> {
        let q = p.with_delay(tau);
        let k = q.coeffs()?;
        let (b, c) = f_coefficients(&k);
        let cand = omega_candidates(b, c)
            .into_iter()
            .find(|c| c.root_branch == selector)?;
        let theta = crossing_angle(&q, cand.omega).ok()?;
        Some((cand, theta))
    };
    let sn = |tau: f64, n: i64| -> Option<f64> {
        let (cand, theta) = eval(tau)?;
        Some(tau - (theta + 2.0 * PI * n as f64) / cand.omega)
    };
    // Real-valued winding index ν(τ) = (ωτ − θ)/2π; S_n changes sign where ν crosses n.
    let nu = |tau: f64| eval(tau).map(|(c, th)| (c.omega * tau - th) / (2.0 * PI));

    let steps = ((hi - lo) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (lo + i as f64 * step).min(hi))
        .collect();
    let nus: Vec<Option<f64>> = grid.iter().map(|&t| nu(t)).collect();
    let mut out: Vec<CrossingCandidate> = Vec::new();
    for w in 0..grid.len() - 1 {
        let (Some(na), Some(nb)) = (nus[w], nus[w + 1]) else {
            continue;
        };
        let (ta, tb) = (grid[w], grid[w + 1]);
        let n_lo = na.min(nb).floor() as i64;
        let n_hi = na.max(nb).ceil() as i64;
        for n in n_lo..=n_hi {
            let (Some(mut fa), Some(fb)) = (sn(ta, n), sn(tb, n)) else {
                continue;
            };
            let root = if fa == 0.0 {
                Some(ta)
            } else if fb == 0.0 {
                // Picked up as the left endpoint of the next interval.
                if w + 2 < grid.len() {
                    None
                } else {
                    Some(tb)
                }
            } else if fa.signum() != fb.signum() {
                let (mut a, mut b) = (ta, tb);
                let mut found = None;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    let Some(fm) = sn(m, n) else { break };
                    if fm.abs() < SN_TOL {
                        found = Some(m);
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                    if b - a < 1e-15 * b.abs().max(1.0) {
                        break;
                    }
                }
                found
            } else {
                None
            };
            let Some(tau) = root else { continue };
            if tau < 0.0 {
                continue;
            }
            let Some((cand, _)) = eval(tau) else { continue };
            let q = p.with_delay(tau);
            out.push(candidate(&q, block, cand, tau, n, branch_id));
        }
    }
    out.sort_by(|a, b| a.tau_star.total_cmp(&b.tau_star));
    out.dedup_by(|a, b| a.winding == b.winding && (a.tau_star - b.tau_star).abs() < 1e-7);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBoundaries {
    pub mu_minus: Option<f64>,
    pub mu_plus: Option<f64>,
    pub mu_b: f64,
    pub k_n: f64,
    pub mu_max: Option<f64>,
}

/// Curves in the `(K, μ)` plane bounding where imaginary roots can exist.
///
/// * `mu_max` (fix block, `cos 2φ ≤ 0`): `b² = 4c`, beyond which `ω±` vanish.
/// * `mu_minus`, `mu_plus` (standard block): `b² = 4c` for the standard block,
///   present when `(N − 1)(1 − cos 2φ) ≥ 1 + cos 2φ`.
/// * `mu_b`: `b = 0`. `k_n`: the coupling where the standard `c = 0` curve
///   meets `b = 0`.
pub fn region_boundaries(params: &NetworkParams, eq: &Equilibrium, block: Block) -> RegionBoundaries {
    let k = params.coupling;
    let n = params.n_nodes as f64;
    let c2 = eq.cos_two_phi;
    let mu_b = 2.0 * k * (1.0 - c2);
    let k_n = 0.5 * n / (n - 1.0).sqrt();
    let (mut mu_minus, mut mu_plus, mut mu_max) = (None, None, None);
    match block {
        Block::Fix => {
            if c2 <= 0.0 && k >= 1.0 {
                let s = (k * k - 1.0).max(0.0).sqrt();
                mu_max = Some(2.0 * (k + s) - 4.0 * (k * s).sqrt());
            }
        }
        Block::Standard => {
            let rad = (1.0 - c2).powi(2) - (1.0 + c2).powi(2) / (n - 1.0).powi(2);
            if rad >= 0.0 {
                let root = 2.0 * k * rad.sqrt();
                mu_minus = Some(2.0 * k * (1.0 - c2) - root);
                mu_plus = Some(2.0 * k * (1.0 - c2) + root);
            }
        }
    }
    RegionBoundaries {
        mu_minus,
        mu_plus,
        mu_b,
        k_n,
        mu_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    FilterGain,
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub sweep_value: f64,
    pub winding: i64,
    pub root_branch: RootBranch,
    pub omega: f64,
    pub tau_star: f64,
    pub delta_sign: i8,
}

/// Crossing delays of one block over a one-parameter sweep of `μ` or `K`.
pub fn bifurcation_curves(
    kind: ModelKind,
    base: &NetworkParams,
    block: Block,
    eq_branch: EquilibriumBranch,
    sweep: SweepParam,
    values: &[f64],
    n_range: RangeInclusive<i64>,
) -> Result<Vec<CurveRow>> {
    if kind != ModelKind::FullPhase {
        return Err(Error::UnsupportedKind(format!(
            "{kind}: curves need tau-independent blocks"
        )));
    }
    let per_value: Vec<Result<Vec<CurveRow>>> = values
        .par_iter()
        .map(|&v| {
            let mut params = *base;
            match sweep {
                SweepParam::FilterGain => params.filter_gain = v,
                SweepParam::Coupling => params.coupling = v,
            }
            let eq = Equilibrium::new(params.coupling, eq_branch)?;
            let bs = build_blocks(kind, &params, LinearizationPoint::Equilibrium(eq))?;
            let p = bs.block(block);
            let k = p.coeffs().ok_or(Error::DegenerateS)?;
            let (b, c) = f_coefficients(&k);
            let mut rows = Vec::new();
            for cand in omega_candidates(b, c) {
                for x in tau_candidates(p, block, &cand, n_range.clone())? {
                    rows.push(CurveRow {
                        sweep_value: v,
                        winding: x.winding,
                        root_branch: cand.root_branch,
                        omega: cand.omega,
                        tau_star: x.tau_star,
                        delta_sign: x.delta_sign,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_value {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.tau_star.total_cmp(&b.tau_star))
    });
    Ok(rows)
}
