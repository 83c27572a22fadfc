//! Smooth surrogate of the operator norm used to drive descent.
//!
//! For `H` the smaller Gram matrix of `M` with spectrum `λ_1 ≥ … ≥ λ_d`,
//! `φ_β(H) = λ_1 + β⁻¹ log Σ exp(β(λ_i − λ_1))` satisfies
//! `λ_1 ≤ φ_β ≤ λ_1 + log(d)/β`. With `β = c/λ_1` the relative gap is at most
//! `log(d)/c`, so `sqrt(φ)` is within a factor `1 + log(d)/(2c)` of `‖M‖`.
//! `c = ∞` selects the top eigenvector (the plain `σ_max` gradient).

use crate::linalg::hermitian_eigen;
use alloc::vec::Vec;

use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone)]
pub struct SmoothNorm {
    /// Surrogate value, `≥ exact`.
    pub value: f64,
    /// `‖M‖` itself.
    pub exact: f64,
    /// Gradient of `value`: `d value = Re⟨grad, dM⟩`.
    pub grad: ComplexMatrix,
}

/// Non-finite input (an overflowed trial point) scores `+∞`.
pub fn smooth_norm(m: &ComplexMatrix, sharpness: f64) -> SmoothNorm {
    if !m.is_finite() {
        let inf = f64::INFINITY;
        return SmoothNorm { value: inf, exact: inf, grad: ComplexMatrix::zeros(m.rows(), m.cols()) };
    }
    let tall = m.rows() >= m.cols();
    let gram = if tall { m.adjoint_mul(m) } else { m.mul_adjoint(m) };
    let (vals, vecs) = hermitian_eigen(&gram);
    let d = vals.len();
    let lmax = vals[d - 1].max(0.0);
    if lmax <= 1e-300 {
        return SmoothNorm { value: 0.0, exact: 0.0, grad: ComplexMatrix::zeros(m.rows(), m.cols()) };
    }
    let (phi, weights) = if sharpness.is_infinite() {
        let mut w = alloc::vec![0.0; d];
        w[d - 1] = 1.0;
        (lmax, w)
    } else {
        // φ = λ_1·g(r) with r_i = λ_i/λ_1, g(r) = 1 + c⁻¹ log Σ exp(c(r_i − 1)).
        // dφ = Σ w_i dλ_i + (g − Σ w_i r_i) dλ_1, with w the softmax weights.
        let beta = sharpness / lmax;
        let e: alloc::vec::Vec<f64> = vals.iter().map(|&l| libm::exp(beta * (l - lmax))).collect();
        let z: f64 = e.iter().sum();
        let mut w: alloc::vec::Vec<f64> = e.iter().map(|x| x / z).collect();
        let g = 1.0 + libm::log(z) / sharpness;
        let wr: f64 = w.iter().zip(&vals).map(|(wi, l)| wi * l / lmax).sum();
        w[d - 1] += g - wr;
        (lmax * g, w)
    };
    // P = Σ w_i q_i q_i^*
    let mut p = ComplexMatrix::zeros(d, d);
    for (k, &w) in weights.iter().enumerate() {
        if w < 1e-18 {
            continue;
        }
        for i in 0..d {
            let qi = vecs[(i, k)] * w;
            for j in 0..d {
                p[(i, j)] += qi * vecs[(j, k)].conj();
            }
        }
    }
    let value = libm::sqrt(phi);
    // dφ = 2 Re⟨M P, dM⟩ (tall) or 2 Re⟨P M, dM⟩ (wide); d sqrt(φ) = dφ / (2 sqrt φ).
    let gphi = if tall { m * &p } else { &p * m };
    SmoothNorm { value, exact: libm::sqrt(lmax), grad: gphi.scale_real(1.0 / value) }
}

/// Smooth maximum of nonnegative values with the same relative sharpness as
/// [`smooth_norm`]: `m·(1 + c⁻¹ log Σ exp(c(v_i/m − 1)))` for `m = max v_i`.
/// Returns the value and its partial derivatives.
pub fn smooth_max(values: &[f64], sharpness: f64) -> (f64, Vec<f64>) {
    let (mut top, mut arg) = (f64::NEG_INFINITY, 0);
    for (i, &v) in values.iter().enumerate() {
        if v > top {
            top = v;
            arg = i;
        }
    }
    let mut w = alloc::vec![0.0; values.len()];
    if sharpness.is_infinite() || top <= 1e-300 || !top.is_finite() {
        w[arg] = 1.0;
        return (top, w);
    }
    let e: Vec<f64> = values.iter().map(|&v| libm::exp(sharpness * (v / top - 1.0))).collect();
    let z: f64 = e.iter().sum();
    let g = 1.0 + libm::log(z) / sharpness;
    let mut wr = 0.0;
    for (i, x) in e.iter().enumerate() {
        w[i] = x / z;
        wr += w[i] * values[i] / top;
    }
    w[arg] += g - wr;
    (top * g, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;
    use crate::matrix::C64;
    use crate::rng::{gaussian_matrix, stream};

    #[test]
    fn surrogate_brackets_norm() {
        let mut rng = stream(4, "smooth", 0);
        for (r, c) in [(3, 5), (5, 2), (4, 4)] {
            let m = gaussian_matrix(&mut rng, r, c);
            let n = operator_norm(&m);
            for sharp in [10.0, 1000.0] {
                let s = smooth_norm(&m, sharp);
                assert!((s.exact - n).abs() < 1e-12 * n);
                assert!(s.value >= n - 1e-12);
                let d = r.min(c) as f64;
                assert!(s.value <= n * (1.0 + libm::log(d) / sharp) + 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = stream(9, "smooth-fd", 0);
        let m = gaussian_matrix(&mut rng, 3, 4);
        let dir = gaussian_matrix(&mut rng, 3, 4);
        for sharp in [5.0, 50.0, f64::INFINITY] {
            let s = smooth_norm(&m, sharp);
            let h = 1e-6;
            let mut plus = m.clone();
            plus.axpy(C64::new(h, 0.0), &dir);
            let mut minus = m.clone();
            minus.axpy(C64::new(-h, 0.0), &dir);
            let fd = (smooth_norm(&plus, sharp).value - smooth_norm(&minus, sharp).value) / (2.0 * h);
            let an = s.grad.inner(&dir).re;
            assert!((fd - an).abs() < 1e-6, "sharp {sharp}: {fd} vs {an}");
        }
    }

    #[test]
    fn smooth_max_gradient() {
        let v = [1.0, 0.7, 0.95];
        for sharp in [4.0, 40.0] {
            let (m, w) = smooth_max(&v, sharp);
            assert!(m >= 1.0 && m <= 1.0 + libm::log(3.0) / sharp + 1e-12);
            for i in 0..3 {
                let h = 1e-6;
                let mut p = v;
                p[i] += h;
                let mut q = v;
                q[i] -= h;
                let fd = (smooth_max(&p, sharp).0 - smooth_max(&q, sharp).0) / (2.0 * h);
                assert!((fd - w[i]).abs() < 1e-6);
            }
        }
        assert_eq!(smooth_max(&v, f64::INFINITY), (1.0, alloc::vec![1.0, 0.0, 0.0]));
    }
}
