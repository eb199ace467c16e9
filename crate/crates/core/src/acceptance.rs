//! End-to-end acceptance checks with the reference numbers of the analysis.
//!
//! Each check returns a one-line outcome; the CLI `verify` command and the
//! `acceptance` test target both print them.

use crate::charfun::{build_blocks, full_determinant, Block, LinearizationPoint};
use crate::model::{Equilibrium, EquilibriumBranch, ModelKind, NetworkParams};
use crate::phasediff::{char_functions_n2, determinant_n3};
use crate::phasemodel::{default_resolution, relative_hopf_scan_on, releq_branches, releq_solve, zero_root_taus};
use crate::simulator::{integrate, period_estimate, symmetry_classify, HistorySpec, SymmetryTag, TRANSIENT_FRACTION};
use crate::snmap::{crossings_up_to, region_boundaries, RootBranch};
use crate::spectrum::{lambert_w, rightmost_sweep, unstable_count, Scheme};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{E, PI};
use std::fmt;
use std::time::Instant;

pub const CRITERIA: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{:>2}] {}: {}", self.id, self.title, self.detail)
    }
}

type Check = std::result::Result<String, String>;

const TITLES: [&str; CRITERIA] = [
    "fix-block crossing delays",
    "existence boundary mu_max",
    "symmetry-breaking Hopf N=3",
    "Z2 orbit reproduction",
    "block factorization",
    "Lambert W",
    "rightmost-root sweep",
    "root-count switching",
    "phase-model branches and crossings",
    "zero-root events",
    "phase-difference blocks",
    "simulator properties",
];

/// Runs criterion `id` (1-based).
pub fn run(id: usize) -> Outcome {
    let check: fn() -> Check = match id {
        1 => fix_crossings,
        2 => existence_boundary,
        3 => symmetry_breaking_hopf,
        4 => orbit_reproduction,
        5 => block_factorization,
        6 => lambert,
        7 => rightmost,
        8 => root_count_switching,
        9 => phase_model,
        10 => zero_roots,
        11 => phase_difference,
        12 => simulator_properties,
        _ => {
            return Outcome {
                id,
                title: "unknown",
                passed: false,
                detail: format!("no criterion {id}"),
            }
        }
    };
    let (passed, detail) = match check() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        title: TITLES[id - 1],
        passed,
        detail,
    }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=CRITERIA).map(run).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn minus_eq(k: f64) -> Equilibrium {
    Equilibrium::new(k, EquilibriumBranch::Minus).expect("K ≥ 1")
}

fn full_phase_blocks(n: usize, k: f64, mu: f64, branch: EquilibriumBranch) -> crate::BlockSet {
    let eq = Equilibrium::new(k, branch).expect("K ≥ 1");
    build_blocks(ModelKind::FullPhase, &NetworkParams::new(n, k, mu, 0.0), LinearizationPoint::Equilibrium(eq))
        .expect("full-phase blocks")
}

const FIX_TAUS: [f64; 5] = [6.34, 11.00, 15.41, 23.51, 24.48];
const FIX_SIGNS: [i8; 5] = [1, -1, 1, -1, 1];

fn fix_crossings() -> Check {
    let start = Instant::now();
    let p = full_phase_blocks(2, 1.05, 0.3, EquilibriumBranch::Minus).fix_block;
    let found = crossings_up_to(&p, Block::Fix, 25.0).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let taus: Vec<f64> = found.iter().map(|c| c.tau_star).collect();
    let signs: Vec<i8> = found.iter().map(|c| c.delta_sign).collect();
    let detail = format!("tau = {taus:.4?}, signs = {signs:?}, {secs:.3} s");
    ensure(taus.len() == 5, || detail.clone())?;
    ensure(taus.iter().zip(FIX_TAUS).all(|(t, e)| (t - e).abs() <= 0.01), || detail.clone())?;
    ensure(signs == FIX_SIGNS, || detail.clone())?;
    ensure(secs < 1.0, || detail.clone())?;
    Ok(detail)
}

fn existence_boundary() -> Check {
    let params = NetworkParams::new(2, 1.05, 0.3, 0.0);
    let b = region_boundaries(&params, &minus_eq(1.05), Block::Fix);
    let mu_max = b.mu_max.ok_or("mu_max absent")?;
    let detail = format!("mu_max = {mu_max:.6}");
    ensure((mu_max - 0.4211).abs() <= 5e-4, || detail.clone())?;
    Ok(detail)
}

fn symmetry_breaking_hopf() -> Check {
    let p = full_phase_blocks(3, 1.05, 0.075, EquilibriumBranch::Minus).standard_block;
    let found = crossings_up_to(&p, Block::Standard, 20.0).map_err(err)?;
    let first = found
        .iter()
        .find(|c| c.omega_candidate.root_branch == RootBranch::MinusRoot)
        .ok_or("no minus-root crossing below 20")?;
    let detail = format!(
        "first crossing tau = {:.5}, omega = {:.5} ({:?})",
        first.tau_star,
        first.omega(),
        first.omega_candidate.root_branch
    );
    ensure((first.omega() - 0.2942).abs() <= 5e-4, || detail.clone())?;
    ensure((first.tau_star - 7.4898).abs() <= 5e-3, || detail.clone())?;
    Ok(detail)
}

fn orbit_reproduction() -> Check {
    let start = Instant::now();
    let tau = 9.5;
    let params = NetworkParams::new(3, 1.05, 0.075, tau);
    let eq = minus_eq(1.05);
    let history = HistorySpec::standard(eq.state(3), &[1.0, -1.0, 0.0], 1e-2).map_err(err)?;
    let traj = integrate(ModelKind::FullPhase, &params, &history, 20_000.0, tau / 100.0).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let period = period_estimate(&traj, TRANSIENT_FRACTION).map_err(|e| {
        let last = traj.states.last().unwrap();
        let dev = last
            .iter()
            .zip(eq.state(3))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        format!("{e}; terminal distance to equilibrium {dev:.2e}, {secs:.1} s")
    })?;
    let class = symmetry_classify(&traj, period, 1e-2);
    let detail = format!("T = {period:.4}, class = {}, residual = {:.2e}, {secs:.1} s", class.tag, class.residual);
    ensure((period - 24.19).abs() <= 0.5, || detail.clone())?;
    ensure(class.tag == SymmetryTag::Z2SpatioTemporal(1, 2) && class.residual < 1e-2, || detail.clone())?;
    ensure(secs < 60.0, || detail.clone())?;
    Ok(detail)
}

fn block_factorization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for _ in 0..100 {
            let k = rng.gen_range(1.0..3.0);
            let mu = rng.gen_range(0.05..2.0);
            let tau = rng.gen_range(0.0..15.0);
            let lambda = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-8.0..8.0));
            let params = NetworkParams::new(n, k, mu, tau);
            let branch = if rng.gen_bool(0.5) {
                EquilibriumBranch::Plus
            } else {
                EquilibriumBranch::Minus
            };
            let eq = Equilibrium::new(k, branch).map_err(err)?;
            let rotation = rng.gen_range(0.0..2.0);
            for (kind, point) in [
                (ModelKind::FullPhase, LinearizationPoint::Equilibrium(eq)),
                (ModelKind::Phase, LinearizationPoint::Rotation(rotation)),
            ] {
                let det = full_determinant(kind, &params, point, lambda).map_err(err)?;
                let prod = build_blocks(kind, &params, point).map_err(err)?.product(lambda);
                worst = worst.max((det - prod).norm() / det.norm());
            }
        }
    }
    let detail = format!("max relative defect {worst:.2e} over 800 evaluations");
    ensure(worst < 1e-10, || detail.clone())?;
    Ok(detail)
}

fn lambert() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for k in -3..=3 {
        for _ in 0..1000 {
            let r = 10f64.powf(rng.gen_range(-3.0..3.0));
            let z = Complex64::from_polar(r, rng.gen_range(-PI..PI));
            let w = lambert_w(k, z).map_err(err)?;
            worst = worst.max((w * w.exp() - z).norm() / z.norm().max(1.0));
        }
    }
    let branch_point = lambert_w(0, Complex64::new(-1.0 / E, 0.0)).map_err(err)?;
    let omega = lambert_w(0, Complex64::new(1.0, 0.0)).map_err(err)?;
    // Oracle: bisection on x e^x = 1.
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m * m.exp() < 1.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let detail = format!(
        "identity defect {worst:.2e}, W0(-1/e) = {branch_point:.12}, W0(1) = {:.9} (oracle {a:.9})",
        omega.re
    );
    ensure(worst <= 1e-12, || detail.clone())?;
    ensure((branch_point - Complex64::new(-1.0, 0.0)).norm() <= 1e-10, || detail.clone())?;
    ensure((omega.re - 0.5671433).abs() <= 1e-6 && (omega.re - a).abs() <= 1e-12, || detail.clone())?;
    Ok(detail)
}

fn rightmost() -> Check {
    let grid: Vec<f64> = (0..=100).map(|i| 0.5 * i as f64).collect();
    let k = 2.0;
    let mut lines = Vec::new();
    for mu in [0.1, 0.2, 0.4, 0.6, 0.8] {
        let p = full_phase_blocks(2, k, mu, EquilibriumBranch::Plus).fix_block;
        let rows = rightmost_sweep(&p, &grid, Scheme::Newton).map_err(err)?;
        let c2 = Equilibrium::new(k, EquilibriumBranch::Plus).map_err(err)?.cos_two_phi;
        let closed = 0.5 * (-mu + (mu * mu + 8.0 * k * mu * c2).sqrt());
        let re0 = rows[0].lambda.re;
        let re50 = rows.last().unwrap().lambda.re;
        let line = format!("mu={mu}: Re(0)={re0:.6} Re(50)={re50:.4}");
        ensure((re0 - closed).abs() <= 1e-9, || format!("{line}, closed form {closed:.12}"))?;
        ensure(rows.iter().all(|r| r.lambda.re > 0.0), || format!("{line}, nonpositive Re"))?;
        ensure(re50 < re0 / 10.0, || line.clone())?;
        ensure(rows.iter().all(|r| r.certified), || format!("{line}, uncertified root"))?;
        lines.push(line);
    }
    Ok(lines.join("; "))
}

fn root_count_switching() -> Check {
    let p = full_phase_blocks(2, 1.05, 0.3, EquilibriumBranch::Minus).fix_block;
    let found = crossings_up_to(&p, Block::Fix, 40.0).map_err(err)?;
    let taus: Vec<f64> = found.iter().map(|c| c.tau_star).collect();
    if taus.len() < 6 {
        return Err(format!("need six crossings, found {taus:?}"));
    }
    let mut edges = vec![0.0];
    edges.extend_from_slice(&taus[..6]);
    let mut counts = Vec::new();
    for w in edges.windows(2) {
        counts.push(unstable_count(&p, 0.5 * (w[0] + w[1])).map_err(err)?);
    }
    let detail = format!("unstable counts {counts:?}");
    ensure(counts == [0, 2, 0, 2, 0, 2], || detail.clone())?;
    Ok(detail)
}

fn phase_model() -> Check {
    let params = NetworkParams::new(2, 1.0, 1.0, 0.0);
    let window = (0.0, 5.0 * PI);
    let branches = releq_branches(&params, window, default_resolution(window));
    let fix = relative_hopf_scan_on(&params, Block::Fix, &branches);
    let standard = relative_hopf_scan_on(&params, Block::Standard, &branches);
    let first_std = standard.first().map(|c| c.tau_star).unwrap_or(f64::NAN);
    let detail = format!(
        "{} branches, {} fix zeros (signs {:?}), first standard zero at {first_std:.5}",
        branches.len(),
        fix.len(),
        fix.iter().map(|c| c.delta_sign).collect::<Vec<_>>()
    );
    ensure(branches.len() == 11, || detail.clone())?;
    ensure(!fix.is_empty() && fix.iter().all(|c| c.delta > 0.0), || detail.clone())?;
    ensure((3.0..=3.3).contains(&first_std), || detail.clone())?;
    Ok(detail)
}

fn zero_roots() -> Check {
    let ev = zero_root_taus(&NetworkParams::new(2, 1.0, 1.0, 0.0), 0..=10);
    let first = ev.first().ok_or("no events")?;
    let detail = format!("tau* = {:.12} (n = {}), delta0 = {:.12}", first.tau_star, first.n, first.delta0);
    ensure((first.tau_star - 0.75 * PI).abs() <= 1e-10, || detail.clone())?;
    ensure(first.n == 1 && (first.delta0 + 4.0).abs() <= 1e-10, || detail.clone())?;
    Ok(detail)
}

/// Size of the largest term of a block at `λ`, the scale of its rounding error.
pub fn term_scale(params: &NetworkParams, l: Complex64) -> f64 {
    let km = params.coupling * params.filter_gain;
    (l.norm_sqr() + params.filter_gain * l.norm() + km * (1.0 + (-l * params.delay).exp().norm())).max(1.0)
}

fn phase_difference() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut n2, mut n3): (f64, f64) = (0.0, 0.0);
    for (k, mu, tau) in [(1.0, 1.0, 1.0), (1.3, 0.4, 4.2), (0.8, 1.4, 7.1)] {
        for n in [2usize, 3] {
            let params = NetworkParams::new(n, k, mu, tau);
            for w in releq_solve(&params, tau) {
                let c = (w - params.free_freq) * tau;
                let pm = build_blocks(ModelKind::Phase, &params, LinearizationPoint::Rotation(w)).map_err(err)?;
                if n == 2 {
                    let pd = char_functions_n2(&params, c).map_err(err)?;
                    for _ in 0..1000 {
                        let l = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-6.0..6.0));
                        let scale = term_scale(&params, l);
                        n2 = n2.max((pd.p1.eval(l) - pm.fix_block.eval(l)).norm() / scale);
                        n2 = n2.max((pd.p2.eval(l) - pm.standard_block.eval(l)).norm() / scale);
                    }
                } else {
                    for _ in 0..100 {
                        let l = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-6.0..6.0));
                        let u = pm.standard_block.eval(l);
                        let expect = (l * l + mu * l).powu(3) * pm.fix_block.eval(l) * u * u;
                        let d = determinant_n3(&params, c, l).map_err(err)?;
                        n3 = n3.max((d / expect - 1.0).norm());
                    }
                }
            }
        }
    }
    let detail = format!("N=2 block defect {n2:.2e} (relative to term size), N=3 factorization defect {n3:.2e}");
    ensure(n2 < 1e-12 && n3 < 1e-10, || detail.clone())?;
    Ok(detail)
}

fn simulator_properties() -> Check {
    let max_dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let x0 = vec![0.2, 1.5, -0.7, 0.4];
    let terminal = |step: f64| -> std::result::Result<Vec<f64>, String> {
        let p = NetworkParams::new(2, 1.3, 0.8, 0.0);
        let tr = integrate(ModelKind::FullPhase, &p, &HistorySpec::constant(x0.clone()), 8.0, step).map_err(err)?;
        Ok(tr.states.last().unwrap().clone())
    };
    let (a, b, c) = (terminal(0.1)?, terminal(0.05)?, terminal(0.025)?);
    let order = (max_dist(&a, &b) / max_dist(&b, &c)).log2();

    let x = vec![0.1, 1.2, -0.4, 0.7, 0.9, 0.95];
    let swapped = vec![-0.4, 0.7, 0.1, 1.2, 0.9, 0.95];
    let mut equivariance: f64 = 0.0;
    for kind in [ModelKind::FullPhase, ModelKind::Phase] {
        let p = NetworkParams::new(3, 1.1, 0.5, 2.0);
        let u = integrate(kind, &p, &HistorySpec::constant(x.clone()), 30.0, 0.05).map_err(err)?;
        let v = integrate(kind, &p, &HistorySpec::constant(swapped.clone()), 30.0, 0.05).map_err(err)?;
        for (s, t) in u.states.iter().zip(&v.states) {
            equivariance = equivariance.max(max_dist(s, &[t[2], t[3], t[0], t[1], t[4], t[5]]));
        }
    }

    let eq = minus_eq(1.05).state(3);
    let p = NetworkParams::new(3, 1.05, 0.3, 2.0);
    let tr = integrate(ModelKind::FullPhase, &p, &HistorySpec::constant(eq.clone()), 100.0, 0.05).map_err(err)?;
    let residual = tr.states.iter().map(|s| max_dist(s, &eq)).fold(0.0, f64::max);

    let detail = format!("order {order:.3}, equivariance {equivariance:.2e}, equilibrium residual {residual:.2e}");
    ensure((3.7..=4.3).contains(&order), || detail.clone())?;
    ensure(equivariance < 1e-9 && residual < 1e-10, || detail.clone())?;
    Ok(detail)
}
