//! Spatial correlation models and the phase-weighted trace statistic.
//!
//! The BS uses the exponential (Kronecker) model for a uniform linear array;
//! each RIS uses the sinc correlation of an isotropically scattered field over
//! a rectangular element grid. `sinc` here is the normalized convention
//! `sinc(x) = sin(pi x) / (pi x)`, `sinc(0) = 1`.
//!
//! RIS elements are enumerated column-major over the grid: the vertical index
//! runs fastest, so element `l` sits at grid coordinates
//! `(v, h) = (l % n_vertical, l / n_vertical)`. The ordering is fixed so that
//! correlation matrices are reproducible bit-for-bit across runs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_psd_sqrt, trace_square, CMat};

/// Exponential correlation parameters for the BS uniform linear array.
///
/// The correlation coefficient is supplied as magnitude and phase because
/// sweeps run over `|rho|` while the closed-form rate only depends on the
/// magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsCorrelationSpec {
    /// Number of BS antennas (M).
    pub antennas: usize,
    /// `|rho|`, in `[0, 1]`.
    pub rho_magnitude: f64,
    /// Phase of rho in radians.
    pub rho_phase: f64,
}

impl BsCorrelationSpec {
    pub fn new(antennas: usize, rho_magnitude: f64, rho_phase: f64) -> Result<Self> {
        let spec = Self {
            antennas,
            rho_magnitude,
            rho_phase,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::InvalidConfig {
                reason: "BS antenna count must be at least 1".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.rho_magnitude) || !self.rho_magnitude.is_finite() {
            return Err(Error::InvalidCorrelation {
                magnitude: self.rho_magnitude,
            });
        }
        if !self.rho_phase.is_finite() {
            return Err(Error::InvalidConfig {
                reason: "rho phase must be finite".into(),
            });
        }
        Ok(())
    }
}

/// Rectangular RIS panel: element grid, spacing, and per-element dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGeometry {
    /// Vertical element count (N_V).
    pub n_vertical: usize,
    /// Horizontal element count (N_H).
    pub n_horizontal: usize,
    /// Distance between adjacent elements in meters (epsilon).
    pub element_spacing: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Element height d_V in meters.
    pub element_height: f64,
    /// Element width d_H in meters.
    pub element_width: f64,
}

impl RisGeometry {
    pub fn new(
        n_vertical: usize,
        n_horizontal: usize,
        element_spacing: f64,
        wavelength: f64,
        element_height: f64,
        element_width: f64,
    ) -> Result<Self> {
        let geom = Self {
            n_vertical,
            n_horizontal,
            element_spacing,
            wavelength,
            element_height,
            element_width,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("element_spacing", self.element_spacing),
            ("wavelength", self.wavelength),
            ("element_height", self.element_height),
            ("element_width", self.element_width),
        ];
        for (name, v) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidGeometry {
                    reason: format!("{name} must be positive and finite, got {v}"),
                });
            }
        }
        if self.n_vertical == 0 || self.n_horizontal == 0 {
            return Err(Error::InvalidGeometry {
                reason: "element grid must be non-empty in both dimensions".into(),
            });
        }
        Ok(())
    }

    /// Total element count N = N_V * N_H.
    pub fn elements(&self) -> usize {
        self.n_vertical * self.n_horizontal
    }

    /// Per-element area A = d_V * d_H in square meters.
    pub fn element_area(&self) -> f64 {
        self.element_height * self.element_width
    }

    /// Grid coordinates (vertical, horizontal) of element `l` under the fixed
    /// column-major enumeration.
    fn grid_index(&self, l: usize) -> (usize, usize) {
        (l % self.n_vertical, l / self.n_vertical)
    }

    /// Euclidean distance in meters between elements `l` and `m`.
    pub fn element_distance(&self, l: usize, m: usize) -> f64 {
        let (vl, hl) = self.grid_index(l);
        let (vm, hm) = self.grid_index(m);
        let dv = vl.abs_diff(vm) as f64;
        let dh = hl.abs_diff(hm) as f64;
        self.element_spacing * dv.hypot(dh)
    }
}

/// Normalized sinc: `sin(pi x) / (pi x)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// BS correlation matrix: `[R_B]_{ij} = rho^(j-i)` for `i <= j`, conjugate
/// symmetric below the diagonal; unit diagonal.
pub fn build_bs_correlation(spec: &BsCorrelationSpec) -> Result<CMat> {
    spec.validate()?;
    let m = spec.antennas;
    let mut r = CMat::identity(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let d = (j - i) as i32;
            let entry = Complex64::from_polar(
                spec.rho_magnitude.powi(d),
                spec.rho_phase * f64::from(d),
            );
            r[(i, j)] = entry;
            r[(j, i)] = entry.conj();
        }
    }
    Ok(r)
}

/// RIS correlation matrix: `[R_i]_{lm} = sinc(2 d(l,m) / lambda)` over the
/// rectangular grid. Real symmetric by construction.
pub fn build_ris_correlation(geom: &RisGeometry) -> Result<CMat> {
    geom.validate()?;
    let n = geom.elements();
    let mut r = CMat::identity(n, n);
    for l in 0..n {
        for m in (l + 1)..n {
            let value = sinc(2.0 * geom.element_distance(l, m) / geom.wavelength);
            let entry = Complex64::new(value, 0.0);
            r[(l, m)] = entry;
            r[(m, l)] = entry;
        }
    }
    Ok(r)
}

/// Synthetic fully-correlated matrix (all entries one). Hypothetical extreme
/// with `tr(R^2) = N^2`; not reachable through any physical geometry.
pub fn all_ones_correlation(n: usize) -> CMat {
    CMat::from_element(n, n, Complex64::new(1.0, 0.0))
}

/// `tr(R Theta R Theta^H)` with `Theta = diag(exp(j theta))`.
///
/// For Hermitian `R` this equals `sum_{n,l} |R_{nl}|^2 exp(j(theta_l - theta_n))`,
/// which is real; the imaginary part is checked and discarded.
pub fn phase_weighted_trace(r: &CMat, theta: &[f64]) -> Result<f64> {
    let n = r.nrows();
    if !r.is_square() || theta.len() != n {
        return Err(Error::DimensionMismatch {
            context: "phase_weighted_trace",
            left: format!("{}x{}", r.nrows(), r.ncols()),
            right: format!("theta[{}]", theta.len()),
        });
    }
    let unit: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for row in 0..n {
        let xn = unit[row].conj();
        for col in 0..n {
            acc += r[(row, col)].norm_sqr() * xn * unit[col];
        }
    }
    debug_assert!(
        acc.im.abs() <= 1e-9 * acc.re.abs().max(1.0),
        "phase-weighted trace should be real, got imaginary part {:e}",
        acc.im
    );
    Ok(acc.re)
}

/// Correlation matrices, their PSD square roots, and cached trace statistics.
///
/// Immutable after construction; shared read-only across Monte Carlo trials.
#[derive(Debug, Clone)]
pub struct CorrelationSet {
    pub r_bs: CMat,
    pub r_ris1: CMat,
    pub r_ris2: CMat,
    pub sqrt_bs: CMat,
    pub sqrt_ris1: CMat,
    pub sqrt_ris2: CMat,
    /// tr(R_B^2)
    pub tr_bs_sq: f64,
    /// tr(R_1^2)
    pub tr_ris1_sq: f64,
    /// tr(R_2^2)
    pub tr_ris2_sq: f64,
}

impl CorrelationSet {
    /// Builds the set from the BS spec and both RIS geometries.
    pub fn build(
        bs: &BsCorrelationSpec,
        ris1: &RisGeometry,
        ris2: &RisGeometry,
    ) -> Result<Self> {
        Self::from_matrices(
            build_bs_correlation(bs)?,
            build_ris_correlation(ris1)?,
            build_ris_correlation(ris2)?,
        )
    }

    /// Builds the set from explicit matrices, e.g. identity or the synthetic
    /// all-ones extreme.
    pub fn from_matrices(r_bs: CMat, r_ris1: CMat, r_ris2: CMat) -> Result<Self> {
        let sqrt_bs = hermitian_psd_sqrt(&r_bs, None)?;
        let sqrt_ris1 = hermitian_psd_sqrt(&r_ris1, None)?;
        let sqrt_ris2 = hermitian_psd_sqrt(&r_ris2, None)?;
        let tr_bs_sq = trace_square(&r_bs)?;
        let tr_ris1_sq = trace_square(&r_ris1)?;
        let tr_ris2_sq = trace_square(&r_ris2)?;
        Ok(Self {
            r_bs,
            r_ris1,
            r_ris2,
            sqrt_bs,
            sqrt_ris1,
            sqrt_ris2,
            tr_bs_sq,
            tr_ris1_sq,
            tr_ris2_sq,
        })
    }

    pub fn bs_antennas(&self) -> usize {
        self.r_bs.nrows()
    }

    pub fn ris1_elements(&self) -> usize {
        self.r_ris1.nrows()
    }

    pub fn ris2_elements(&self) -> usize {
        self.r_ris2.nrows()
    }
}
