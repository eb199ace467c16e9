//! Block characteristic functions `P(λ, τ) = R(λ, τ) + S(λ, τ) e^{−λτ}`.
//!
//! The linearization of an `S_N`-equivariant network splits into the
//! synchronous block (on `Fix(S_N)`, multiplicity 1) and the standard block
//! (multiplicity `N − 1`). Every block here has `R = λ² + r₁λ + r₀(τ)` and
//! `S = s₀(τ)`.

use crate::error::{Error, Result};
use crate::linalg::{characteristic_matrix, det};
use crate::model::{Equilibrium, ModelKind, NetworkParams};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Fix,
    Standard,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::Fix => "fix",
            Block::Standard => "standard",
        })
    }
}

/// Coefficients of one block at a fixed delay, with their `τ`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCoeffs {
    pub r2: f64,
    pub r1: f64,
    pub r0: f64,
    pub s0: f64,
    pub dr0_dtau: f64,
    pub ds0_dtau: f64,
}

pub trait CoefficientProvider: Send + Sync {
    /// `None` outside the provider's domain.
    fn at(&self, tau: f64) -> Option<BlockCoeffs>;

    /// True when no coefficient depends on `τ`.
    fn is_constant(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoeffs {
    pub r1: f64,
    pub r0: f64,
    pub s0: f64,
}

impl CoefficientProvider for ConstantCoeffs {
    fn at(&self, _tau: f64) -> Option<BlockCoeffs> {
        Some(BlockCoeffs {
            r2: 1.0,
            r1: self.r1,
            r0: self.r0,
            s0: self.s0,
            dr0_dtau: 0.0,
            ds0_dtau: 0.0,
        })
    }

    fn is_constant(&self) -> bool {
        true
    }
}

/// Source of the synchronous rotation frequency `Ω̂(τ)`.
pub trait RotationSource: Send + Sync {
    fn omega_hat(&self, tau: f64) -> Option<f64>;
}

impl RotationSource for f64 {
    fn omega_hat(&self, _tau: f64) -> Option<f64> {
        Some(*self)
    }
}

/// Phase-model blocks at a relative equilibrium rotating with `Ω̂(τ)`:
/// `r₀ = Kμ cos(Ω̂τ)`, `s₀ = −Kμ cos(Ω̂τ)` (fix) or `Kμ cos(Ω̂τ)/(N−1)`
/// (standard). The `τ`-derivative includes `Ω̂′(τ)` from implicit
/// differentiation of `Ω̂ + K sin(Ω̂τ) = ω_M`.
pub struct RelEqCoeffs<S> {
    pub params: NetworkParams,
    pub block: Block,
    pub source: S,
}

impl<S> RelEqCoeffs<S> {
    pub fn new(params: NetworkParams, block: Block, source: S) -> Self {
        Self { params, block, source }
    }

    fn s_scale(&self) -> f64 {
        match self.block {
            Block::Fix => -1.0,
            Block::Standard => 1.0 / (self.params.n_nodes as f64 - 1.0),
        }
    }
}

/// `Ω̂′(τ) = −Ω̂ K cos(Ω̂τ) / (1 + τ K cos(Ω̂τ))`.
pub fn omega_hat_slope(coupling: f64, omega_hat: f64, tau: f64) -> f64 {
    let c = (omega_hat * tau).cos();
    -omega_hat * coupling * c / (1.0 + tau * coupling * c)
}

impl<S: RotationSource> CoefficientProvider for RelEqCoeffs<S> {
    fn at(&self, tau: f64) -> Option<BlockCoeffs> {
        let w = self.source.omega_hat(tau)?;
        let k = self.params.coupling;
        let km = k * self.params.filter_gain;
        let (s, c) = (w * tau).sin_cos();
        let dw = omega_hat_slope(k, w, tau);
        let dr0 = -km * s * (w + tau * dw);
        let scale = self.s_scale();
        Some(BlockCoeffs {
            r2: 1.0,
            r1: self.params.filter_gain,
            r0: km * c,
            s0: scale * km * c,
            dr0_dtau: dr0,
            ds0_dtau: scale * dr0,
        })
    }
}

/// Phase-difference blocks at the rest point `φ^{(i,j)} ≡ C`: the phase-model
/// blocks with `Ω̂τ` replaced by `C + ω_M τ`.
pub struct OffsetCoeffs {
    pub params: NetworkParams,
    pub block: Block,
    pub c_const: f64,
}

impl CoefficientProvider for OffsetCoeffs {
    fn at(&self, tau: f64) -> Option<BlockCoeffs> {
        let km = self.params.coupling * self.params.filter_gain;
        let w = self.params.free_freq;
        let (s, c) = (self.c_const + w * tau).sin_cos();
        let scale = match self.block {
            Block::Fix => -1.0,
            Block::Standard => 1.0 / (self.params.n_nodes as f64 - 1.0),
        };
        Some(BlockCoeffs {
            r2: 1.0,
            r1: self.params.filter_gain,
            r0: km * c,
            s0: scale * km * c,
            dr0_dtau: -km * s * w,
            ds0_dtau: -scale * km * s * w,
        })
    }
}

#[derive(Clone)]
pub struct QuasiPolynomial {
    provider: Arc<dyn CoefficientProvider>,
    pub delay: f64,
}

impl fmt::Debug for QuasiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuasiPolynomial")
            .field("delay", &self.delay)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl QuasiPolynomial {
    pub fn new(provider: Arc<dyn CoefficientProvider>, delay: f64) -> Self {
        Self { provider, delay }
    }

    pub fn constant(r1: f64, r0: f64, s0: f64, delay: f64) -> Self {
        Self::new(Arc::new(ConstantCoeffs { r1, r0, s0 }), delay)
    }

    pub fn with_delay(&self, delay: f64) -> Self {
        Self {
            provider: Arc::clone(&self.provider),
            delay,
        }
    }

    pub fn coeffs(&self) -> Option<BlockCoeffs> {
        self.provider.at(self.delay)
    }

    pub fn coeffs_at(&self, tau: f64) -> Option<BlockCoeffs> {
        self.provider.at(tau)
    }

    pub fn is_constant(&self) -> bool {
        self.provider.is_constant()
    }

    /// `R(λ)` at the current delay.
    pub fn r(&self, lambda: Complex64) -> Complex64 {
        match self.coeffs() {
            Some(c) => (lambda * c.r2 + c.r1) * lambda + c.r0,
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// `S(λ)` at the current delay.
    pub fn s(&self, _lambda: Complex64) -> Complex64 {
        match self.coeffs() {
            Some(c) => Complex64::new(c.s0, 0.0),
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.derivatives(lambda).0
    }

    /// `(P, ∂P/∂λ, ∂²P/∂λ²)` at the current delay.
    pub fn derivatives(&self, lambda: Complex64) -> (Complex64, Complex64, Complex64) {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let Some(c) = self.coeffs() else {
            return (nan, nan, nan);
        };
        let tau = self.delay;
        let se = c.s0 * (-lambda * tau).exp();
        let p = (lambda * c.r2 + c.r1) * lambda + c.r0 + se;
        let dp = lambda * (2.0 * c.r2) + c.r1 - se * tau;
        let d2p = Complex64::new(2.0 * c.r2, 0.0) + se * (tau * tau);
        (p, dp, d2p)
    }
}

/// `R(λ) + S(λ) e^{−λτ}` at the delay carried by `p`.
pub fn eval(p: &QuasiPolynomial, lambda: Complex64) -> Complex64 {
    p.eval(lambda)
}

#[derive(Debug, Clone)]
pub struct BlockSet {
    pub fix_block: QuasiPolynomial,
    pub standard_block: QuasiPolynomial,
    pub n_nodes: usize,
}

impl BlockSet {
    pub fn fix_multiplicity(&self) -> usize {
        1
    }

    pub fn standard_multiplicity(&self) -> usize {
        self.n_nodes - 1
    }

    pub fn block(&self, block: Block) -> &QuasiPolynomial {
        match block {
            Block::Fix => &self.fix_block,
            Block::Standard => &self.standard_block,
        }
    }

    /// `P_Fix · P_U^{N−1}` at the current delay.
    pub fn product(&self, lambda: Complex64) -> Complex64 {
        self.fix_block.eval(lambda) * self.standard_block.eval(lambda).powu(self.n_nodes as u32 - 1)
    }
}

/// The state a linearization is taken at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearizationPoint {
    /// Full-phase synchronized equilibrium.
    Equilibrium(Equilibrium),
    /// Phase-model relative equilibrium with rotation frequency `Ω̂`.
    Rotation(f64),
    /// Phase-difference rest point `φ^{(i,j)} ≡ C`.
    PhaseOffset(f64),
}

/// Fix and standard blocks for the model linearized at `point`.
pub fn build_blocks(
    kind: ModelKind,
    params: &NetworkParams,
    point: LinearizationPoint,
) -> Result<BlockSet> {
    params.validate()?;
    let n = params.n_nodes;
    let tau = params.delay;
    let mu = params.filter_gain;
    let km = params.coupling * mu;
    let (fix_block, standard_block) = match (kind, point) {
        (ModelKind::FullPhase, LinearizationPoint::Equilibrium(eq)) => {
            let c2 = eq.cos_two_phi;
            let q = km * (1.0 - c2);
            (
                QuasiPolynomial::constant(mu, q, -km * (1.0 + c2), tau),
                QuasiPolynomial::constant(mu, q, km * (1.0 + c2) / (n as f64 - 1.0), tau),
            )
        }
        (ModelKind::Phase | ModelKind::PhaseRotatingFrame, LinearizationPoint::Rotation(w)) => (
            QuasiPolynomial::new(Arc::new(RelEqCoeffs::new(*params, Block::Fix, w)), tau),
            QuasiPolynomial::new(Arc::new(RelEqCoeffs::new(*params, Block::Standard, w)), tau),
        ),
        (ModelKind::PhaseDifference, LinearizationPoint::PhaseOffset(c_const)) => {
            if n > 3 {
                return Err(Error::UnsupportedKind(format!("{kind} with N = {n}")));
            }
            let make = |block| {
                QuasiPolynomial::new(
                    Arc::new(OffsetCoeffs {
                        params: *params,
                        block,
                        c_const,
                    }),
                    tau,
                )
            };
            (make(Block::Fix), make(Block::Standard))
        }
        (kind, point) => {
            return Err(Error::UnsupportedKind(format!("{kind} at {point:?}")));
        }
    };
    Ok(BlockSet {
        fix_block,
        standard_block,
        n_nodes: n,
    })
}

/// Jacobians `(A₀, A_τ)` of the full-phase or rotating-frame phase model with
/// respect to current and delayed states, from the partial derivatives of the
/// coupling terms node by node.
pub fn jacobians(
    kind: ModelKind,
    params: &NetworkParams,
    point: LinearizationPoint,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = params.n_nodes;
    let dim = 2 * n;
    let g = params.link_gain();
    let mu = params.filter_gain;
    let mut a0 = vec![vec![0.0; dim]; dim];
    let mut at = vec![vec![0.0; dim]; dim];
    let (angles, shift, full) = match (kind, point) {
        (ModelKind::FullPhase, LinearizationPoint::Equilibrium(eq)) => (vec![eq.phi; n], 0.0, true),
        (ModelKind::Phase | ModelKind::PhaseRotatingFrame, LinearizationPoint::Rotation(w)) => {
            (vec![0.0; n], w * params.delay, false)
        }
        (kind, point) => {
            return Err(Error::UnsupportedKind(format!("{kind} at {point:?}")));
        }
    };
    for i in 0..n {
        a0[2 * i][2 * i + 1] = 1.0;
        a0[2 * i + 1][2 * i + 1] = -mu;
        for j in (0..n).filter(|&j| j != i) {
            let (xi, xj) = (angles[i], angles[j]);
            if full {
                // d/dx_i and d/dx_j of sin(x_j − x_i) + sin(x_j + x_i)
                a0[2 * i + 1][2 * i] += g * (-(xj - xi).cos() + (xj + xi).cos());
                at[2 * i + 1][2 * j] += g * ((xj - xi).cos() + (xj + xi).cos());
            } else {
                let c = (xj - xi - shift).cos();
                a0[2 * i + 1][2 * i] -= g * c;
                at[2 * i + 1][2 * j] += g * c;
            }
        }
    }
    Ok((a0, at))
}

/// `det(λ I − A₀ − A_τ e^{−λτ})` for the full `2N × 2N` linearization.
pub fn full_determinant(
    kind: ModelKind,
    params: &NetworkParams,
    point: LinearizationPoint,
    lambda: Complex64,
) -> Result<Complex64> {
    let (a0, at) = jacobians(kind, params, point)?;
    Ok(det(characteristic_matrix(&a0, &at, lambda, params.delay)))
}

/// The two rows of the isotypic basis `W_j`, length `2N`, with entries
/// `e^{2πi kj/N}/√N` on the angle (row 0) or velocity (row 1) slots.
pub fn isotypic_basis(n_nodes: usize, index: usize) -> Result<[Vec<Complex64>; 2]> {
    if index >= n_nodes {
        return Err(Error::IndexOutOfRange {
            index,
            len: n_nodes,
        });
    }
    let scale = 1.0 / (n_nodes as f64).sqrt();
    let mut rows = [
        vec![Complex64::new(0.0, 0.0); 2 * n_nodes],
        vec![Complex64::new(0.0, 0.0); 2 * n_nodes],
    ];
    for k in 0..n_nodes {
        let phase = 2.0 * PI * ((k * index) % n_nodes) as f64 / n_nodes as f64;
        let v = Complex64::from_polar(scale, phase);
        rows[0][2 * k] = v;
        rows[1][2 * k + 1] = v;
    }
    Ok(rows)
}

/// Real node-space direction from isotypic component `j`: the real
/// (`imaginary = false`) or imaginary part of the angle row, unit length.
pub fn isotypic_direction(n_nodes: usize, index: usize, imaginary: bool) -> Result<Vec<f64>> {
    let rows = isotypic_basis(n_nodes, index)?;
    let v: Vec<f64> = (0..n_nodes)
        .map(|k| {
            let z = rows[0][2 * k];
            if imaginary {
                z.im
            } else {
                z.re
            }
        })
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(v);
    }
    Ok(v.into_iter().map(|x| x / norm).collect())
}

/// Orthogonal projection of a node-space vector onto the standard
/// representation (all components `j ≠ 0`).
pub fn project_standard(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len();
    let mut out = vec![0.0; n];
    for j in 1..n {
        let row = &isotypic_basis(n, j)?[0];
        let coef: Complex64 = (0..n).map(|k| row[2 * k].conj() * v[k]).sum();
        for k in 0..n {
            out[k] += (coef * row[2 * k]).re;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matmul;
    use crate::model::EquilibriumBranch;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn full_phase_k1_fix_block() {
        let params = NetworkParams::new(2, 1.0, 1.0, 2.0);
        let eq = Equilibrium::new(1.0, EquilibriumBranch::Plus).unwrap();
        let bs = build_blocks(ModelKind::FullPhase, &params, LinearizationPoint::Equilibrium(eq)).unwrap();
        let k = bs.fix_block.coeffs().unwrap();
        assert!((k.r1 - 1.0).abs() < 1e-15 && (k.r0 - 1.0).abs() < 1e-15 && (k.s0 + 1.0).abs() < 1e-15);
        assert!(bs.fix_block.eval(c(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn standard_block_s0_example() {
        let params = NetworkParams::new(3, 1.05, 0.075, 7.4898);
        let eq = Equilibrium::new(1.05, EquilibriumBranch::Minus).unwrap();
        let bs = build_blocks(ModelKind::FullPhase, &params, LinearizationPoint::Equilibrium(eq)).unwrap();
        let s0 = bs.standard_block.coeffs().unwrap().s0;
        assert!((s0 - 0.027369).abs() < 1e-6, "{s0}");
        let v = bs.standard_block.eval(c(0.0, 0.2942));
        assert!(v.norm() < 1e-3, "{v}");
    }

    #[test]
    fn phase_fix_block_zero_root() {
        for tau in [0.0, 0.7, 3.0, 11.0] {
            let params = NetworkParams::new(4, 1.3, 0.6, tau);
            let bs = build_blocks(ModelKind::Phase, &params, LinearizationPoint::Rotation(0.9)).unwrap();
            assert!(bs.fix_block.eval(c(0.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn leading_order_and_conjugate_symmetry() {
        let p = QuasiPolynomial::constant(0.3, 0.2, -0.5, 4.0);
        let l = c(0.0, 1e6);
        assert!(((p.eval(l) - l * l) / (l * l)).norm() < 1e-6);
        let z = c(0.4, -1.3);
        assert!((p.eval(z.conj()) - p.eval(z).conj()).norm() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = QuasiPolynomial::constant(0.3, 0.2, -0.5, 4.0);
        let z = c(0.1, 0.7);
        let h = 1e-6;
        let (_, dp, d2p) = p.derivatives(z);
        let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        let fd2 = (p.derivatives(z + h).1 - p.derivatives(z - h).1) / (2.0 * h);
        assert!((dp - fd).norm() < 1e-8);
        assert!((d2p - fd2).norm() < 1e-8);
    }

    #[test]
    fn determinant_special_cases() {
        let params = NetworkParams::new(2, 1.0, 0.8, 1.5);
        let eq = Equilibrium::new(1.0, EquilibriumBranch::Plus).unwrap();
        let point = LinearizationPoint::Equilibrium(eq);
        let d0 = full_determinant(ModelKind::FullPhase, &params, point, c(0.0, 0.0)).unwrap();
        assert!(d0.norm() < 1e-14);
        let big = full_determinant(ModelKind::FullPhase, &params, point, c(50.0, 0.0)).unwrap();
        assert!(big.re > 0.0 && big.im.abs() < 1e-9 * big.re);
    }

    #[test]
    fn isotypic_rows_orthonormal() {
        for n in 2..7 {
            let rows: Vec<Vec<Complex64>> = (0..n)
                .flat_map(|j| isotypic_basis(n, j).unwrap())
                .collect();
            for (a, ra) in rows.iter().enumerate() {
                for (b, rb) in rows.iter().enumerate() {
                    let ip: Complex64 = ra.iter().zip(rb).map(|(x, y)| x.conj() * y).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - expect).norm() < 1e-12, "n={n} a={a} b={b} {ip}");
                }
            }
        }
        let r = isotypic_basis(2, 0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((r[0][0] - s).norm() < 1e-15 && (r[0][2] - s).norm() < 1e-15);
        assert!((r[1][1] - s).norm() < 1e-15 && (r[1][3] - s).norm() < 1e-15);
        assert!(matches!(isotypic_basis(3, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn isotypic_conjugation_block_diagonalizes() {
        for n in 2..6 {
            let params = NetworkParams::new(n, 1.4, 0.5, 2.3);
            let eq = Equilibrium::new(1.4, EquilibriumBranch::Minus).unwrap();
            let (a0, at) = jacobians(ModelKind::FullPhase, &params, LinearizationPoint::Equilibrium(eq)).unwrap();
            let delta = characteristic_matrix(&a0, &at, c(0.3, 0.8), params.delay);
            let w: Vec<Vec<Complex64>> = (0..n)
                .flat_map(|j| isotypic_basis(n, j).unwrap())
                .collect();
            let wbar: Vec<Vec<Complex64>> =
                w.iter().map(|r| r.iter().map(|z| z.conj()).collect()).collect();
            let wt: Vec<Vec<Complex64>> = (0..2 * n)
                .map(|i| (0..2 * n).map(|j| w[j][i]).collect())
                .collect();
            let m = matmul(&matmul(&wbar, &delta), &wt);
            let mut off = 0.0;
            for i in 0..2 * n {
                for j in 0..2 * n {
                    if i / 2 != j / 2 {
                        off += m[i][j].norm();
                    }
                }
            }
            assert!(off < 1e-12, "n={n} off={off}");
            let bs = build_blocks(ModelKind::FullPhase, &params, LinearizationPoint::Equilibrium(eq)).unwrap();
            let blk = |k: usize| m[2 * k][2 * k] * m[2 * k + 1][2 * k + 1] - m[2 * k][2 * k + 1] * m[2 * k + 1][2 * k];
            assert!((blk(0) - bs.fix_block.eval(c(0.3, 0.8))).norm() < 1e-12);
            for k in 1..n {
                assert!((blk(k) - bs.standard_block.eval(c(0.3, 0.8))).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_projection() {
        let p = project_standard(&[1.0, -1.0, 0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-14 && (p[1] + 1.0).abs() < 1e-14 && p[2].abs() < 1e-14);
        let q = project_standard(&[1.0, 1.0, 1.0]).unwrap();
        assert!(q.iter().all(|x| x.abs() < 1e-14));
        let d = isotypic_direction(3, 1, false).unwrap();
        assert!((d.iter().sum::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn relative_equilibrium_slope_matches_finite_difference() {
        // Ω̂(τ) on the unique branch near τ = 1 for K = ω_M = 1.
        let solve = |tau: f64| {
            let mut w = 0.6;
            for _ in 0..100 {
                let g = w + (w * tau).sin() - 1.0;
                let dg = 1.0 + tau * (w * tau).cos();
                w -= g / dg;
            }
            w
        };
        let h = 1e-6;
        let fd = (solve(1.0 + h) - solve(1.0 - h)) / (2.0 * h);
        assert!((omega_hat_slope(1.0, solve(1.0), 1.0) - fd).abs() < 1e-8);
    }
}
