//! Spectra of the phase-difference model `φ^{(i,j)} = θ_i(t) − θ_j(t − τ)`.
//!
//! For `N = 2` the linearization at the rest point `φ ≡ C` splits into two
//! blocks that coincide with the phase-model blocks when `C = Ω(τ)τ`. For
//! `N = 3` the six pair variables over-parameterize the three phases and the
//! determinant picks up a factor `(λ² + μλ)³` whose roots are not part of the
//! phase-model spectrum.

use crate::charfun::{build_blocks, BlockSet, LinearizationPoint, QuasiPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{characteristic_matrix, det};
use crate::model::{ordered_pairs, ModelKind, NetworkParams};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct PhaseDiffChar {
    pub c_const: f64,
    pub p1: QuasiPolynomial,
    pub p2: QuasiPolynomial,
    params: NetworkParams,
}

impl PhaseDiffChar {
    /// Block functions and full determinant at `φ ≡ c_const` for `N ∈ {2, 3}`.
    pub fn new(params: &NetworkParams, c_const: f64) -> Result<Self> {
        let n = params.n_nodes;
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedKind(format!("phase-difference with N = {n}")));
        }
        let BlockSet {
            fix_block,
            standard_block,
            ..
        } = build_blocks(ModelKind::PhaseDifference, params, LinearizationPoint::PhaseOffset(c_const))?;
        Ok(Self {
            c_const,
            p1: fix_block,
            p2: standard_block,
            params: *params,
        })
    }

    /// `det(λI − L)` of the full `2N(N−1)`-dimensional linearization.
    pub fn det_full(&self, lambda: Complex64) -> Complex64 {
        let (a0, a_tau) = jacobians(&self.params, self.c_const);
        det(characteristic_matrix(&a0, &a_tau, lambda, self.params.delay))
    }
}

/// First-order Jacobians of the phase-difference dynamics at `φ ≡ C`, in the
/// lexicographic pair ordering.
fn jacobians(params: &NetworkParams, c_const: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = params.n_nodes;
    let pairs = ordered_pairs(n);
    let dim = 2 * pairs.len();
    let index = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).unwrap();
    let mut a0 = vec![vec![0.0; dim]; dim];
    let mut a_tau = vec![vec![0.0; dim]; dim];
    let slope = params.link_gain() * (c_const + params.free_freq * params.delay).cos();
    for (p, &(i, j)) in pairs.iter().enumerate() {
        a0[2 * p][2 * p + 1] = 1.0;
        a0[2 * p + 1][2 * p + 1] = -params.filter_gain;
        for l in (0..n).filter(|&l| l != i) {
            a0[2 * p + 1][2 * index(i, l)] -= slope;
        }
        for l in (0..n).filter(|&l| l != j) {
            a_tau[2 * p + 1][2 * index(j, l)] += slope;
        }
    }
    (a0, a_tau)
}

/// The two `N = 2` block functions
/// `P₁ = λ² + μλ + a − a e^{−λτ}` and `P₂ = λ² + μλ + a + a e^{−λτ}`
/// with `a = Kμ cos(C + ω_M τ)`.
pub fn char_functions_n2(params: &NetworkParams, c_const: f64) -> Result<PhaseDiffChar> {
    if params.n_nodes != 2 {
        return Err(Error::InvalidParams(format!(
            "two-node block functions need N = 2, got {}",
            params.n_nodes
        )));
    }
    PhaseDiffChar::new(params, c_const)
}

/// `det(λI − L)` of the 12-dimensional `N = 3` linearization at `φ ≡ C`.
pub fn determinant_n3(params: &NetworkParams, c_const: f64, lambda: Complex64) -> Result<Complex64> {
    if params.n_nodes != 3 {
        return Err(Error::InvalidParams(format!(
            "three-node determinant needs N = 3, got {}",
            params.n_nodes
        )));
    }
    let (a0, a_tau) = jacobians(params, c_const);
    Ok(det(characteristic_matrix(&a0, &a_tau, lambda, params.delay)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FictitiousRoot {
    pub lambda: Complex64,
    /// Multiplicity contributed by the `(λ² + μλ)³` factor.
    pub multiplicity: usize,
    pub is_fictitious: bool,
}

const ROOT_TOL: f64 = 1e-6;

/// Roots `λ ∈ {0, −μ}` of the `N = 3` determinant, flagged fictitious when
/// they are not roots of the phase-model product `P_Fix · P_U²`.
pub fn fictitious_roots(params: &NetworkParams, c_const: f64) -> Result<Vec<FictitiousRoot>> {
    let phase = build_blocks(
        ModelKind::PhaseDifference,
        params,
        LinearizationPoint::PhaseOffset(c_const),
    )?;
    let mut out = Vec::new();
    for lambda in [0.0, -params.filter_gain] {
        let lambda = Complex64::new(lambda, 0.0);
        if determinant_n3(params, c_const, lambda)?.norm() > ROOT_TOL {
            continue;
        }
        let block = phase.product(lambda);
        out.push(FictitiousRoot {
            lambda,
            multiplicity: 3,
            is_fictitious: block.norm() >= ROOT_TOL,
        });
    }
    Ok(out)
}
