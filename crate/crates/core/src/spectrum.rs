//! Rightmost characteristic roots of a block quasi-polynomial.
//!
//! Seeds come from the auxiliary polynomial `R(λ) = 0` and from Lambert-W
//! solutions of first-order reductions of `P`. They are polished by complex
//! Newton or Halley iteration on `P`. An argument-principle census on a box
//! right of the best root certifies that nothing was missed.

use crate::charfun::QuasiPolynomial;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{E, PI};

const INV_E: f64 = 1.0 / E;

/// Branch `k` of the Lambert W function, `w e^w = z`.
///
/// Branch cuts follow the usual convention: `W_0` is real on `[−1/e, ∞)`,
/// `W_{−1}` is real on `[−1/e, 0)` approached from above, and every branch
/// satisfies `W_k(z) + log W_k(z) = log z + 2πik` away from the cuts.
pub fn lambert_w(k: i32, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return if k == 0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::BranchDomain { branch: k })
        };
    }
    let d = z + INV_E;
    if d.norm() == 0.0 && (k == 0 || k == -1) {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    let near_branch_point = d.norm() < 0.3;
    let p = (2.0 * (E * z + 1.0)).sqrt();
    let series = |p: Complex64| -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0);

    let mut w = if k == 0 && near_branch_point {
        series(p)
    } else if k == 0 && z.norm() < 0.5 {
        z * (1.0 - z * (1.0 - 1.5 * z))
    } else if k == 0 && z.norm() < 3.0 {
        (1.0 + z).ln()
    } else if near_branch_point && ((k == -1 && z.im >= 0.0) || (k == 1 && z.im < 0.0)) {
        series(-p)
    } else {
        let l1 = z.ln() + Complex64::new(0.0, 2.0 * PI * k as f64);
        if k != 0 {
            // Newton on w + log w = log z + 2πik keeps the iterate on branch k.
            unwound_newton(l1)
        } else {
            let l2 = l1.ln();
            l1 - l2 + l2 / l1
        }
    };

    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - z;
        let w1 = w + 1.0;
        let denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
        if denom.norm() == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * w.norm().max(1.0) {
            break;
        }
    }
    Ok(w)
}

fn unwound_newton(l1: Complex64) -> Complex64 {
    let l2 = l1.ln();
    let mut w = l1 - l2 + l2 / l1;
    for _ in 0..60 {
        let g = w + w.ln() - l1;
        let step = g * w / (w + 1.0);
        w -= step;
        if step.norm() <= 1e-15 * w.norm() {
            break;
        }
    }
    w
}

/// `W_k(z)` given `log z`, for arguments whose modulus overflows `f64`.
pub fn lambert_w_of_log(k: i32, log_z: Complex64) -> Complex64 {
    if log_z.re < 300.0 {
        if let Ok(w) = lambert_w(k, log_z.exp()) {
            return w;
        }
    }
    unwound_newton(log_z + Complex64::new(0.0, 2.0 * PI * k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Newton,
    Halley,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEstimate {
    pub lambda: Complex64,
    pub scheme: Scheme,
    pub residual: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusBox {
    pub re_interval: (f64, f64),
    pub im_interval: (f64, f64),
    pub count: Option<usize>,
}

impl CensusBox {
    pub fn new(re_interval: (f64, f64), im_interval: (f64, f64)) -> Self {
        Self {
            re_interval,
            im_interval,
            count: None,
        }
    }
}

/// Distance below which a root counts as lying on the census contour.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Iteration budget per seed.
pub const MAX_ITER: usize = 200;

/// Number of zeros of `p` at delay `tau` inside `bx`, by the winding of
/// `P` along the boundary.
pub fn root_census(p: &QuasiPolynomial, tau: f64, bx: &CensusBox) -> Result<usize> {
    let q = p.with_delay(tau);
    let (x0, x1) = bx.re_interval;
    let (y0, y1) = bx.im_interval;
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::InvalidParams("empty census box".into()));
    }
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let check = |z: Complex64| -> Result<Complex64> {
        let (v, dv, _) = q.derivatives(z);
        if !v.is_finite() {
            return Err(Error::InvalidParams("non-finite P on census contour".into()));
        }
        if v.norm() == 0.0 || v.norm() < BOUNDARY_TOL * dv.norm() {
            return Err(Error::BoundaryRoot);
        }
        Ok(v)
    };
    // Initial resolution: e^{−λτ} turns at rate τ along vertical edges.
    let h0 = 0.25 / (tau.abs() + 1.0);
    let mut total = 0.0;
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let m = (((b - a).norm() / h0).ceil() as usize).max(8);
        let mut prev_z = a;
        let mut prev_v = check(a)?;
        for i in 1..=m {
            let z = a + (b - a) * (i as f64 / m as f64);
            let v = check(z)?;
            total += winding_increment(&check, prev_z, prev_v, z, v, 0)?;
            prev_z = z;
            prev_v = v;
        }
    }
    let turns = total / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > 1e-3 || count < 0.0 {
        return Err(Error::BoundaryRoot);
    }
    Ok(count as usize)
}

fn winding_increment(
    check: &dyn Fn(Complex64) -> Result<Complex64>,
    za: Complex64,
    va: Complex64,
    zb: Complex64,
    vb: Complex64,
    depth: usize,
) -> Result<f64> {
    let zm = 0.5 * (za + zb);
    let vm = check(zm)?;
    let d1 = (vm / va).arg();
    let d2 = (vb / vm).arg();
    let whole = (vb / va).arg();
    if d1.abs() < PI / 4.0 && d2.abs() < PI / 4.0 && (d1 + d2 - whole).abs() < 1e-9 {
        return Ok(d1 + d2);
    }
    if depth > 48 || (zb - za).norm() < 1e-13 {
        return Err(Error::BoundaryRoot);
    }
    Ok(winding_increment(check, za, va, zm, vm, depth + 1)?
        + winding_increment(check, zm, vm, zb, vb, depth + 1)?)
}

fn quadratic_roots(a1: f64, a0: f64) -> [Complex64; 2] {
    let disc = Complex64::new(a1 * a1 - 4.0 * a0, 0.0).sqrt();
    [(-a1 + disc) * 0.5, (-a1 - disc) * 0.5]
}

/// Candidate starting points for root polishing at the current delay.
pub fn seeds(p: &QuasiPolynomial) -> Vec<Complex64> {
    let Some(k) = p.coeffs() else {
        return Vec::new();
    };
    let tau = p.delay;
    let mut out = Vec::new();
    let rho = quadratic_roots(k.r1, k.r0);
    out.extend(rho);
    out.extend(quadratic_roots(k.r1, k.r0 + k.s0));
    if tau > 0.0 && k.s0 != 0.0 {
        for i in 0..2 {
            // Near a root ρ of R: (λ − ρ)(ρ − ρ') + s₀ e^{−λτ} ≈ 0.
            let gap = rho[i] - rho[1 - i];
            if gap.norm() > 1e-12 {
                let log_z = (-k.s0 * tau / gap).ln() - rho[i] * tau;
                for br in -3..=3 {
                    out.push(rho[i] + lambert_w_of_log(br, log_z) / tau);
                }
            }
        }
        if k.r1 != 0.0 {
            // Dropping λ²: λ + r₀/r₁ + (s₀/r₁) e^{−λτ} = 0.
            let a = k.r0 / k.r1;
            let log_z = Complex64::new(-k.s0 / k.r1 * tau, 0.0).ln() + a * tau;
            for br in -3..=3 {
                out.push(lambert_w_of_log(br, log_z) / tau - a);
            }
        }
    }
    out.retain(|z| z.is_finite());
    out
}

/// Polishes `seed` with the chosen scheme. `None` if it does not converge.
pub fn polish(p: &QuasiPolynomial, seed: Complex64, scheme: Scheme) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..MAX_ITER {
        let (v, dv, d2v) = p.derivatives(z);
        if !v.is_finite() || dv.norm() == 0.0 {
            return None;
        }
        let step = match scheme {
            Scheme::Newton => v / dv,
            Scheme::Halley => {
                let den = 2.0 * dv * dv - v * d2v;
                if den.norm() == 0.0 {
                    v / dv
                } else {
                    2.0 * v * dv / den
                }
            }
        };
        z -= step;
        if !z.is_finite() || z.norm() > 1e8 {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            let r = p.eval(z).norm();
            return (r < 1e-10).then_some(z);
        }
    }
    None
}

fn pick_rightmost(roots: &[Complex64]) -> Option<Complex64> {
    roots.iter().copied().reduce(|best, z| {
        if z.re > best.re + 1e-12 || ((z.re - best.re).abs() <= 1e-12 && z.im > best.im) {
            z
        } else {
            best
        }
    })
}

/// Modulus bound for every root with `Re λ ≥ sigma`.
fn modulus_bound(p: &QuasiPolynomial, sigma: f64) -> f64 {
    let k = p.coeffs().unwrap();
    let c = k.r0.abs() + k.s0.abs() * (-sigma * p.delay).exp();
    0.5 * (k.r1.abs() + (k.r1 * k.r1 + 4.0 * c).sqrt())
}

/// Box covering every possible root with real part above `sigma`.
fn certification_box(p: &QuasiPolynomial, sigma: f64) -> Option<CensusBox> {
    let bound = modulus_bound(p, sigma);
    if !bound.is_finite() || bound > 1e4 {
        return None;
    }
    let h = bound + 1.0;
    Some(CensusBox::new((sigma, (sigma + 1.0).max(h)), (-h, h)))
}

/// Number of roots with `Re λ > 0` at delay `tau`.
pub fn unstable_count(p: &QuasiPolynomial, tau: f64) -> Result<usize> {
    let p = p.with_delay(tau);
    let bx = certification_box(&p, 0.0).ok_or(Error::NoConvergence { tau })?;
    root_census(&p, tau, &bx)
}

fn census_with_retry(p: &QuasiPolynomial, sigma: f64) -> Option<(CensusBox, usize)> {
    for attempt in 0..4 {
        let s = sigma + 1e-7 * attempt as f64;
        let mut bx = certification_box(p, s)?;
        bx.im_interval.1 *= 1.0 + 0.01 * attempt as f64;
        bx.im_interval.0 *= 1.0 + 0.013 * attempt as f64;
        match root_census(p, p.delay, &bx) {
            Ok(n) => {
                bx.count = Some(n);
                return Some((bx, n));
            }
            Err(Error::BoundaryRoot) => continue,
            Err(_) => return None,
        }
    }
    None
}

fn grid_roots(p: &QuasiPolynomial, bx: &CensusBox, scheme: Scheme) -> Vec<Complex64> {
    let (x0, x1) = bx.re_interval;
    let (y0, y1) = bx.im_interval;
    let m = 20;
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let s = Complex64::new(
                x0 + (x1 - x0) * (i as f64 + 0.5) / m as f64,
                y0 + (y1 - y0) * (j as f64 + 0.5) / m as f64,
            );
            out.extend(polish(p, s, scheme));
        }
    }
    out
}

/// Rightmost root of `p` at delay `tau > 0`, census-certified when possible.
pub fn rightmost_root(p: &QuasiPolynomial, tau: f64, scheme: Scheme) -> Result<SpectrumEstimate> {
    rightmost_root_from(p, tau, scheme, &[])
}

/// As [`rightmost_root`], with extra seeds tried first.
pub fn rightmost_root_from(
    p: &QuasiPolynomial,
    tau: f64,
    scheme: Scheme,
    extra: &[Complex64],
) -> Result<SpectrumEstimate> {
    if !(tau > 0.0) {
        return rightmost_at_zero_delay(p, scheme);
    }
    let q = p.with_delay(tau);
    let mut roots: Vec<Complex64> = extra
        .iter()
        .chain(seeds(&q).iter())
        .filter_map(|&s| polish(&q, s, scheme))
        .collect();
    let mut best = pick_rightmost(&roots).ok_or(Error::NoConvergence { tau })?;
    let mut certified = false;
    for _ in 0..3 {
        match census_with_retry(&q, best.re + 1e-6) {
            Some((_, 0)) => {
                certified = true;
                break;
            }
            Some((bx, _)) => {
                // Something sits further right: seed a grid over the box.
                let more = grid_roots(&q, &bx, scheme);
                if more.is_empty() {
                    break;
                }
                roots.extend(more);
                let next = pick_rightmost(&roots).unwrap();
                if next.re <= best.re + 1e-6 {
                    break;
                }
                best = next;
            }
            None => break,
        }
    }
    Ok(SpectrumEstimate {
        lambda: best,
        scheme,
        residual: q.eval(best).norm(),
        certified,
    })
}

/// At `τ = 0` the block is the quadratic `λ² + r₁λ + r₀ + s₀`.
fn rightmost_at_zero_delay(p: &QuasiPolynomial, scheme: Scheme) -> Result<SpectrumEstimate> {
    let q = p.with_delay(0.0);
    let k = q.coeffs().ok_or(Error::NoConvergence { tau: 0.0 })?;
    let roots = quadratic_roots(k.r1, k.r0 + k.s0);
    let best = pick_rightmost(&roots).unwrap();
    Ok(SpectrumEstimate {
        lambda: best,
        scheme,
        residual: q.eval(best).norm(),
        certified: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub lambda: Complex64,
    pub certified: bool,
}

/// Rightmost root along an ascending delay grid, each point warm-started
/// from the previous root.
pub fn rightmost_sweep(p: &QuasiPolynomial, tau_grid: &[f64], scheme: Scheme) -> Result<Vec<SweepRow>> {
    if tau_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("tau grid must be strictly ascending".into()));
    }
    let mut out: Vec<SweepRow> = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let extra: Vec<Complex64> = out
            .last()
            .map(|r| vec![r.lambda, r.lambda.conj()])
            .unwrap_or_default();
        let est = rightmost_root_from(p, tau, scheme, &extra)?;
        out.push(SweepRow {
            tau,
            lambda: est.lambda,
            certified: est.certified,
        });
    }
    Ok(out)
}
