//! Complex-matrix primitives: Hermitian checks, PSD square roots, and trace
//! products.
//!
//! Correlation matrices built from sinc kernels are rank-deficient, so the
//! square root goes through an eigendecomposition with eigenvalue clamping
//! rather than a Cholesky factorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the simulator.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

/// Relative tolerance for Hermitian symmetry checks.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative factor for the default eigenvalue clamp in [`hermitian_psd_sqrt`]:
/// eigenvalues in `[-clamp, 0)` are treated as numerical zeros, where
/// `clamp = PSD_CLAMP_REL * lambda_max`.
pub const PSD_CLAMP_REL: f64 = 1e-10;

/// Largest absolute deviation from Hermitian symmetry, `max |A_ij - conj(A_ji)|`.
pub fn hermitian_error(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Checks Hermitian symmetry relative to the matrix scale.
pub fn is_hermitian(m: &CMat) -> bool {
    m.is_square() && hermitian_error(m) <= HERMITIAN_TOL * max_abs(m).max(1.0)
}

/// Hermitian PSD square root via eigendecomposition.
///
/// Returns Hermitian `S` with `S * S ≈ R`. Eigenvalues in `[-clamp_tol, 0)`
/// are clamped to zero; anything below `-clamp_tol` is rejected as indefinite.
/// `clamp_tol = None` uses the default `PSD_CLAMP_REL * lambda_max`.
pub fn hermitian_psd_sqrt(r: &CMat, clamp_tol: Option<f64>) -> Result<CMat> {
    if !r.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_psd_sqrt",
            left: format!("{}x{}", r.nrows(), r.ncols()),
            right: "square".into(),
        });
    }
    let tolerance = HERMITIAN_TOL * max_abs(r).max(1.0);
    let asym = hermitian_error(r);
    if asym > tolerance {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
            tolerance,
        });
    }

    // Symmetrize before factoring so roundoff in the input cannot leak into
    // complex eigenvalues.
    let h = (r + r.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x));
    let clamp = clamp_tol.unwrap_or(PSD_CLAMP_REL * lambda_max);
    let lambda_min = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if lambda_min < -clamp {
        return Err(Error::IndefiniteMatrix {
            min_eigenvalue: lambda_min,
            clamp_tol: clamp,
        });
    }

    let sqrt_diag = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&x| Complex64::new(x.max(0.0).sqrt(), 0.0)),
    );
    let scaled = &eig.eigenvectors * CMat::from_diagonal(&sqrt_diag);
    let s = &scaled * eig.eigenvectors.adjoint();
    Ok((&s + s.adjoint()).scale(0.5))
}

/// `tr(A * B)` computed as the entrywise sum, without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Result<Complex64> {
    if a.ncols() != b.nrows() || a.nrows() != b.ncols() {
        return Err(Error::DimensionMismatch {
            context: "trace_product",
            left: format!("{}x{}", a.nrows(), a.ncols()),
            right: format!("{}x{}", b.nrows(), b.ncols()),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    Ok(acc)
}

/// `tr(R^2)` for a Hermitian `R`; real by construction, imaginary part checked
/// and discarded.
pub fn trace_square(r: &CMat) -> Result<f64> {
    let t = trace_product(r, r)?;
    debug_assert!(t.im.abs() <= 1e-9 * t.re.abs().max(1.0));
    Ok(t.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn identity(n: usize) -> CMat {
        CMat::identity(n, n)
    }

    /// 4x4 sinc correlation of a 2x2 grid with spacing lambda/4, built by hand
    /// so the oracle stays independent of the correlation module.
    fn sinc_2x2_quarter_wave() -> CMat {
        let sinc = |x: f64| {
            if x == 0.0 {
                1.0
            } else {
                (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
            }
        };
        // grid positions in units of lambda: (0,0), (0,1/4), (1/4,0), (1/4,1/4)
        let pos = [(0.0, 0.0), (0.0, 0.25), (0.25, 0.0), (0.25, 0.25)];
        CMat::from_fn(4, 4, |i, j| {
            let dx: f64 = pos[i].0 - pos[j].0;
            let dy: f64 = pos[i].1 - pos[j].1;
            Complex64::new(sinc(2.0 * dx.hypot(dy)), 0.0)
        })
    }

    #[test]
    fn sqrt_of_identity_is_identity() {
        let s = hermitian_psd_sqrt(&identity(4), None).unwrap();
        assert!((s - identity(4)).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal_is_elementwise() {
        let r = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(4.0, 0.0),
            Complex64::new(9.0, 0.0),
        ]));
        let s = hermitian_psd_sqrt(&r, None).unwrap();
        assert_relative_eq!(s[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_relative_eq!(s[(1, 1)].re, 3.0, epsilon = 1e-12);
        assert!(s[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_sinc_grid_squares_back() {
        let r = sinc_2x2_quarter_wave();
        let s = hermitian_psd_sqrt(&r, None).unwrap();
        let err = (&s * &s - &r).norm() / r.norm();
        assert!(err <= 1e-8, "relative reconstruction error {err:e}");
        // the square root commutes with its argument
        let comm = (&s * &r - &r * &s).norm();
        assert!(comm <= 1e-7 * r.norm());
    }

    #[test]
    fn sqrt_rejects_non_hermitian() {
        let mut r = identity(3);
        r[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            hermitian_psd_sqrt(&r, None),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let r = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(matches!(
            hermitian_psd_sqrt(&r, None),
            Err(Error::IndefiniteMatrix { .. })
        ));
    }

    #[test]
    fn sqrt_clamps_small_negatives() {
        let r = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1e-14, 0.0),
        ]));
        let s = hermitian_psd_sqrt(&r, None).unwrap();
        assert_relative_eq!(s[(1, 1)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_product_identity() {
        let t = trace_product(&identity(3), &identity(3)).unwrap();
        assert_relative_eq!(t.re, 3.0, epsilon = 1e-12);
        assert_relative_eq!(t.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_product_is_cyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut draw = |r: usize, c: usize| {
            CMat::from_fn(r, c, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        };
        let a = draw(3, 5);
        let b = draw(5, 3);
        let ab = trace_product(&a, &b).unwrap();
        let ba = trace_product(&b, &a).unwrap();
        assert!((ab - ba).norm() < 1e-12);
    }

    #[test]
    fn trace_product_bs_correlation_example() {
        // R_B for M = 2, rho = 0.5: tr(R_B^2) = 1 + 0.25 + 0.25 + 1 = 2.5
        let r = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert_relative_eq!(trace_square(&r).unwrap(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn trace_product_rejects_mismatched_shapes() {
        let a = CMat::zeros(2, 3);
        let b = CMat::zeros(2, 3);
        assert!(matches!(
            trace_product(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn hermitian_strategy(max_n: usize) -> impl Strategy<Value = CMat> {
        (1..=max_n, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = CMat::from_fn(n, n, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            (&a + a.adjoint()).scale(0.5)
        })
    }

    proptest! {
        #[test]
        fn psd_sqrt_reconstructs_and_commutes(h in hermitian_strategy(6)) {
            // force PSD: H^2 is PSD for Hermitian H
            let r = &h * &h;
            let s = hermitian_psd_sqrt(&r, None).unwrap();
            let scale = r.norm().max(1e-12);
            prop_assert!((&s * &s - &r).norm() / scale <= 1e-8);
            prop_assert!((&s * &r - &r * &s).norm() <= 1e-7 * scale);
            prop_assert!(is_hermitian(&s));
        }

        #[test]
        fn hermitian_self_trace_is_real_nonnegative(h in hermitian_strategy(6)) {
            let t = trace_product(&h, &h).unwrap();
            prop_assert!(t.im.abs() <= 1e-10);
            prop_assert!(t.re >= -1e-12);
        }
    }
}
