//! Spectral kernels: one-sided Jacobi SVD, Hermitian Jacobi eigensolver,
//! matrix exponential, dense solves, null spaces and commutants.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// Relative singular-value threshold for rank and null-space decisions.
pub const RANK_RTOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 80;

/// Thin-in-`U`, full-in-`V` singular value decomposition `M = U Σ V^*`.
///
/// `u` is `m × n` (columns belonging to zero singular values are zero),
/// `s` holds the `n` singular values in descending order and `v` is the full
/// `n × n` unitary.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn rank(&self, rtol: f64) -> usize {
        let top = self.s.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.s.iter().filter(|&&x| x > rtol * top).count()
    }
}

/// One-sided (Hestenes) Jacobi SVD. Works on the columns of `m`.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, n) = m.shape();
    // Column-major working copy: cols[j] is column j.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..rows).map(|i| m[(i, j)]).collect()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let eps = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 } / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                // Rotate (p, e^{-iφ} q) by the real rotation.
                let conj_phase = phase.conj();
                rotate_pair(&mut cols, p, q, c, s, conj_phase);
                rotate_pair(&mut v, p, q, c, s, conj_phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut norms: Vec<(usize, f64)> =
        cols.iter().enumerate().map(|(j, c)| (j, libm::sqrt(c.iter().map(|z| z.norm_sqr()).sum()))).collect();
    norms.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(core::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    let mut u = ComplexMatrix::zeros(rows, n);
    let mut vm = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (new_j, &(old_j, sigma)) in norms.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            for i in 0..rows {
                u[(i, new_j)] = cols[old_j][i] / sigma;
            }
        }
        for i in 0..n {
            vm[(i, new_j)] = v[old_j][i];
        }
    }
    Svd { u, s, v: vm }
}

fn rotate_pair(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, conj_phase: C64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let bq = conj_phase * *b;
        let ap = *a;
        *a = ap * c - bq * s;
        *b = ap * s + bq * c;
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    // Work on the smaller Gram side by transposing wide matrices.
    if m.cols() > m.rows() {
        svd(&m.adjoint()).s
    } else {
        svd(m).s
    }
}

/// Largest singular value (the norm of `B(H)`).
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Top singular triplet `(σ, u, v)` with `M v = σ u`, plus the gap `σ₁ − σ₂`.
pub fn top_singular(m: &ComplexMatrix) -> (f64, ComplexMatrix, ComplexMatrix, f64) {
    let d = svd(m);
    let gap = if d.s.len() > 1 { d.s[0] - d.s[1] } else { d.s[0] };
    (d.s[0], d.u.column(0), d.v.column(0), gap)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in ascending order and eigenvectors as columns.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(h.is_square(), "hermitian_eigen needs a square matrix");
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= 1e-300 || g <= 1e-17 * scale {
                    continue;
                }
                let phase = apq / g; // e^{iφ}
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = if theta >= 0.0 { 1.0 } else { -1.0 } / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                let ph_c = phase.conj(); // e^{-iφ}
                // Column update A ← A U.
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = arp * c - arq * ph_c * s;
                    a[(r, q)] = arp * s + arq * ph_c * c;
                }
                // Row update A ← U^* A.
                for col in 0..n {
                    let apc = a[(p, col)];
                    let aqc = a[(q, col)];
                    a[(p, col)] = apc * c - aqc * phase * s;
                    a[(q, col)] = apc * s + aqc * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c - vrq * ph_c * s;
                    v[(r, q)] = vrp * s + vrq * ph_c * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(core::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(t: &ComplexMatrix) -> ComplexMatrix {
    assert!(t.is_square());
    let n = t.rows();
    let norm1 = (0..n).map(|j| (0..n).map(|i| t[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scaled = norm1;
    while scaled > 0.25 {
        scaled *= 0.5;
        squarings += 1;
    }
    let a = t.scale_real(libm::pow(0.5, squarings as f64));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Solve `A X = B` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::ShapeMismatch(alloc::format!(
            "solve: {}x{} system with {}x{} right-hand side",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols();
    let scale = a.max_abs();
    for k in 0..n {
        let (piv, pval) = (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pval <= 1e-14 * scale || pval == 0.0 {
            return Err(Error::Singular);
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            for j in 0..m {
                let tmp = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = tmp;
            }
        }
        let d = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
            for j in 0..m {
                let v = x[(k, j)];
                x[(i, j)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..m {
            let mut acc = x[(k, j)];
            for l in (k + 1)..n {
                acc -= lu[(k, l)] * x[(l, j)];
            }
            x[(k, j)] = acc / lu[(k, k)];
        }
    }
    Ok(x)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Moore–Penrose pseudoinverse with relative cutoff `rtol`.
pub fn pinv(a: &ComplexMatrix, rtol: f64) -> ComplexMatrix {
    let d = svd(a);
    let top = d.s.first().copied().unwrap_or(0.0);
    let mut out = ComplexMatrix::zeros(a.cols(), a.rows());
    for (k, &sigma) in d.s.iter().enumerate() {
        if sigma <= rtol * top || sigma == 0.0 {
            continue;
        }
        for i in 0..a.cols() {
            for j in 0..a.rows() {
                out[(i, j)] += d.v[(i, k)] * d.u[(j, k)].conj() / sigma;
            }
        }
    }
    out
}

/// Orthonormal basis of `{x : A x = 0}`, thresholding singular values at
/// `rtol · σ_max`. Each basis vector is returned as a `cols × 1` matrix.
pub fn null_space(a: &ComplexMatrix, rtol: f64) -> Vec<ComplexMatrix> {
    let d = svd(a);
    let top = d.s.first().copied().unwrap_or(0.0);
    (0..a.cols()).filter(|&k| top == 0.0 || d.s[k] <= rtol * top).map(|k| d.v.column(k)).collect()
}

/// Basis of the commutant `{X : X A = A X for every A}`, orthonormal under the
/// trace inner product. Always contains (a multiple of) the identity.
pub fn commutant_basis(mats: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    assert!(!mats.is_empty(), "commutant of an empty family is undefined here");
    let k = mats[0].rows();
    for m in mats {
        assert!(m.is_square() && m.rows() == k, "commutant needs equal square matrices");
    }
    let n2 = k * k;
    // Row-major vec(X); (XA − AX)[r,c] = Σ_s X[r,s] A[s,c] − A[r,s] X[s,c].
    let mut sys = ComplexMatrix::zeros(mats.len() * n2, n2);
    for (idx, a) in mats.iter().enumerate() {
        for r in 0..k {
            for c in 0..k {
                let row = idx * n2 + r * k + c;
                for s in 0..k {
                    sys[(row, r * k + s)] += a[(s, c)];
                    sys[(row, s * k + c)] -= a[(r, s)];
                }
            }
        }
    }
    let d = svd(&sys);
    let top = d.s[0];
    (0..n2)
        .filter(|&j| top == 0.0 || d.s[j] <= RANK_RTOL * top)
        .map(|j| ComplexMatrix::from_fn(k, k, |r, c| d.v[(r * k + c, j)]))
        .collect()
}

/// Pack `theta` (length `2r²`, real then imaginary parts row-major) as an
/// arbitrary complex `r × r` matrix.
pub fn pack_complex(r: usize, theta: &[f64]) -> ComplexMatrix {
    assert_eq!(theta.len(), 2 * r * r, "gl_param needs 2r² parameters");
    ComplexMatrix::from_fn(r, r, |i, j| C64::new(theta[i * r + j], theta[r * r + i * r + j]))
}

/// Smooth chart onto invertible matrices: `exp(T(θ))`.
pub fn gl_param(r: usize, theta: &[f64]) -> ComplexMatrix {
    expm(&pack_complex(r, theta))
}

pub fn determinant(a: &ComplexMatrix) -> C64 {
    let n = a.rows();
    let mut lu = a.clone();
    let mut det = ONE;
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| lu[(i, k)].norm().partial_cmp(&lu[(j, k)].norm()).unwrap()).unwrap();
        if lu[(piv, k)] == ZERO {
            return ZERO;
        }
        if piv != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            det = -det;
        }
        let d = lu[(k, k)];
        det *= d;
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            for j in k..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_matrix, stream};

    /// Power iteration on `M^* M`, used only as an oracle.
    fn power_norm(m: &ComplexMatrix) -> f64 {
        let g = m.adjoint_mul(m);
        let mut x = ComplexMatrix::from_fn(g.rows(), 1, |i, _| C64::new(1.0 + i as f64 * 0.37, 0.11 * i as f64));
        let mut lambda = 0.0;
        for _ in 0..20000 {
            let y = &g * &x;
            let n = y.frobenius_norm();
            lambda = n / x.frobenius_norm();
            x = y.scale_real(1.0 / n);
        }
        libm::sqrt(lambda)
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::identity(2)) - 1.0).abs() < 1e-14);
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((operator_norm(&m) - 2.0).abs() < 1e-14);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 2)), 0.0);
    }

    #[test]
    fn operator_norm_matches_power_iteration() {
        let mut rng = stream(7, "linalg-test", 0);
        for _ in 0..5 {
            let m = gaussian_matrix(&mut rng, 4, 4);
            let a = operator_norm(&m);
            let b = power_norm(&m);
            assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let mut rng = stream(3, "svd", 0);
        for (r, c) in [(5, 3), (3, 5), (4, 4), (1, 6), (6, 1)] {
            let m = gaussian_matrix(&mut rng, r, c);
            let d = svd(&m);
            let sig = ComplexMatrix::diag_real(&d.s);
            let rec = &(&d.u * &sig) * &d.v.adjoint();
            assert!(rec.max_diff(&m) < 1e-12, "{r}x{c}");
            let vv = d.v.adjoint_mul(&d.v);
            assert!(vv.max_diff(&ComplexMatrix::identity(c)) < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigen_diagonalizes() {
        let mut rng = stream(5, "eig", 0);
        let a = gaussian_matrix(&mut rng, 6, 6);
        let h = &a + &a.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        let rec = &(&vecs * &ComplexMatrix::diag_real(&vals)) * &vecs.adjoint();
        assert!(rec.max_diff(&h) < 1e-11);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn commutant_examples() {
        let d = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let basis = commutant_basis(&[d]);
        assert_eq!(basis.len(), 2);
        for x in &basis {
            assert!(x[(0, 1)].norm() < 1e-12 && x[(1, 0)].norm() < 1e-12);
        }
        let units: Vec<_> = (0..4).map(|t| ComplexMatrix::unit(2, 2, t / 2, t % 2)).collect();
        assert_eq!(commutant_basis(&units).len(), 1);
        assert_eq!(commutant_basis(&[ComplexMatrix::identity(3)]).len(), 9);
    }

    #[test]
    fn commutant_of_generic_matrix_has_dimension_k() {
        let mut rng = stream(11, "comm", 0);
        for k in 2..5 {
            let a = gaussian_matrix(&mut rng, k, k);
            let basis = commutant_basis(core::slice::from_ref(&a));
            assert_eq!(basis.len(), k);
            for x in &basis {
                assert!((&(x * &a) - &(&a * x)).max_abs() <= 1e-10);
                assert!((x.frobenius_norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gl_param_examples() {
        let id = gl_param(3, &[0.0; 18]);
        assert!(id.max_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let mut rng = stream(1, "gl", 0);
        let theta: Vec<f64> = (0..8).map(|_| crate::rng::gaussian(&mut rng)).collect();
        let neg: Vec<f64> = theta.iter().map(|x| -x).collect();
        let s = gl_param(2, &theta);
        assert!(determinant(&s).norm() > 1e-8);
        let prod = &s * &gl_param(2, &neg);
        assert!(prod.max_diff(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn solve_and_pinv() {
        let mut rng = stream(2, "solve", 0);
        let a = gaussian_matrix(&mut rng, 4, 4);
        let b = gaussian_matrix(&mut rng, 4, 2);
        let x = solve(&a, &b).unwrap();
        assert!((&a * &x).max_diff(&b) < 1e-11);
        let p = pinv(&a, 1e-12);
        assert!((&p * &a).max_diff(&ComplexMatrix::identity(4)) < 1e-10);
        assert_eq!(solve(&ComplexMatrix::zeros(2, 2), &b.block(0, 0, 2, 2)), Err(Error::Singular));
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let a = ComplexMatrix::from_real(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]).unwrap();
        let ns = null_space(&a, RANK_RTOL);
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!((&a * x).max_abs() < 1e-12);
        }
    }
}
