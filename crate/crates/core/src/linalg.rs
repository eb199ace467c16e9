use num_complex::Complex64;

pub type CMatrix = Vec<Vec<Complex64>>;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: CMatrix) -> Complex64 {
    let n = a.len();
    let mut d = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            d = -d;
        }
        let p = a[col][col];
        d *= p;
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
        }
    }
    d
}

#[cfg(test)]
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for k in 0..inner {
            let aik = a[i][k];
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// `λ I − A₀ − A_τ e^{−λτ}` for real Jacobians.
pub fn characteristic_matrix(
    a0: &[Vec<f64>],
    a_tau: &[Vec<f64>],
    lambda: Complex64,
    tau: f64,
) -> CMatrix {
    let e = (-lambda * tau).exp();
    let n = a0.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
                    diag - a0[i][j] - e * a_tau[i][j]
                })
                .collect()
        })
        .collect()
}
