use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL};
use super::MatError;

/// Off-diagonal Frobenius norm below which the Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-13;
/// Hard cap on cyclic sweeps; at dim <= 4 convergence takes a handful.
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues of a PSD matrix in [-SQRT_CLAMP, 0) are treated as zero by the
/// matrix square root.
pub const SQRT_CLAMP: f64 = 1e-12;

/// Spectral decomposition of a Hermitian matrix.
///
/// `eigenvalues` are ascending, `eigenvectors[k]` is the unit-norm column
/// paired with `eigenvalues[k]`. Each vector is rephased so its
/// largest-magnitude entry is real positive, which makes repeated runs and
/// snapshot tests reproducible.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Matrix whose k-th column is the k-th eigenvector.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |i, k| self.eigenvectors[k][i])
    }

    /// Sum_k lambda_k |v_k><v_k|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x)
    }

    /// Sum_k f(lambda_k) |v_k><v_k|; exactly Hermitian by construction.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.eigenvectors[k][i] * self.eigenvectors[k][j].conj() * f(self.eigenvalues[k]))
                .sum()
        })
    }

    /// Largest deviation of V^dagger V from the identity.
    pub fn gram_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let g: Complex64 = (0..n)
                    .map(|i| self.eigenvectors[a][i].conj() * self.eigenvectors[b][i])
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Deterministic: a fixed sweep order and no pivot search, so identical
/// inputs give bit-identical output.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Eigensystem, MatError> {
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(MatError::NotHermitian);
    }
    let n = m.dim();
    // Symmetrize away the <=1e-12 slack so the iteration sees an exactly
    // Hermitian matrix.
    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(n);

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > JACOBI_TOL {
        if sweeps == MAX_SWEEPS {
            return Err(MatError::NoConvergence {
                off_diagonal: off_diagonal_norm(&a),
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    // Sort ascending, carrying the eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(a[(k, k)].re);
        let mut col: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
        fix_phase_and_normalize(&mut col);
        eigenvectors.push(col);
    }
    Ok(Eigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating a[(p,q)].
///
/// The 2x2 subproblem [[alpha, beta], [conj(beta), gamma]] is diagonalized by
/// V = [[c, s], [-s*conj(u), c*conj(u)]] with u = beta/|beta| and the usual
/// real rotation (c, s); a <- V^dagger a V, v <- v V.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let beta = a[(p, q)];
    let b = beta.norm();
    if b == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let gamma = a[(q, q)].re;
    let u = beta / b;

    let tau = (gamma - alpha) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    // a <- a V (columns p, q)
    for j in 0..n {
        let ajp = a[(j, p)];
        let ajq = a[(j, q)];
        a[(j, p)] = ajp * c - ajq * u.conj() * s;
        a[(j, q)] = ajp * s + ajq * u.conj() * c;
    }
    // a <- V^dagger a (rows p, q)
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c - aqj * u * s;
        a[(q, j)] = apj * s + aqj * u * c;
    }
    // Exact zeros / real diagonal on the rotated pair.
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // v <- v V (columns p, q)
    for j in 0..n {
        let vjp = v[(j, p)];
        let vjq = v[(j, q)];
        v[(j, p)] = vjp * c - vjq * u.conj() * s;
        v[(j, q)] = vjp * s + vjq * u.conj() * c;
    }
}

/// Rephases so the largest-magnitude entry is real positive, then normalizes.
pub(crate) fn fix_phase_and_normalize(col: &mut [Complex64]) {
    let mut k0 = 0;
    let mut best = 0.0;
    for (k, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            k0 = k;
        }
    }
    if best > 0.0 {
        let phase = col[k0] / best;
        for z in col.iter_mut() {
            *z *= phase.conj();
        }
    }
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in col.iter_mut() {
            *z /= norm;
        }
    }
}

/// f applied to the spectrum: Sum f(lambda_k) |v_k><v_k|.
///
/// Errors with `DomainError` if f is not finite at some eigenvalue.
pub fn matrix_function(
    m: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix, MatError> {
    let eig = hermitian_eig(m)?;
    for &lambda in &eig.eigenvalues {
        if !f(lambda).is_finite() {
            return Err(MatError::DomainError { eigenvalue: lambda });
        }
    }
    Ok(eig.map_eigenvalues(f))
}

pub fn matrix_exp(m: &ComplexMatrix) -> Result<ComplexMatrix, MatError> {
    matrix_function(m, f64::exp)
}

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-12, 0) are
/// clamped to zero; anything more negative is a domain error.
pub fn matrix_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix, MatError> {
    matrix_function(m, |x| {
        if x >= 0.0 {
            x.sqrt()
        } else if x >= -SQRT_CLAMP {
            0.0
        } else {
            f64::NAN
        }
    })
}
