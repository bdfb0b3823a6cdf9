//! Coefficient functionals of a normalized function `f(z) = z + a_2 z^2 + ...`.
//!
//! Everything bounded by the ledger is a polynomial in `(a_2, a_3, a_4)`, so
//! the closed forms below take a [`CoeffTriple`]. The series routes
//! ([`compositional_inverse`], [`log_ratio`]) are kept as cross-checks and as
//! the source of higher-index coefficients.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::classes::OzakiFunction;
use crate::serde_util::complex;
use crate::series::{compositional_inverse, log_ratio, NormalizedFunction, TruncatedSeries};

/// Largest `|Im a_2|` accepted by [`toeplitz_t21_log`].
pub const REAL_A2_TOLERANCE: f64 = 1e-12;
/// Agreement required between closed-form and series inverse coefficients.
pub const INVERSE_CROSS_CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("functional needs a series of order at least {required}, got {actual}")]
    OrderTooLow { required: usize, actual: usize },
    #[error("Toeplitz formula needs a real second coefficient (Im a2 = {0:e}); rotate first")]
    NonRealSecondCoefficient(f64),
    #[error("inverse coefficient A{index} disagrees with series inversion by {residual:e}")]
    InverseCrossCheck { index: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffTriple {
    #[serde(with = "complex")]
    pub a2: Complex64,
    #[serde(with = "complex")]
    pub a3: Complex64,
    #[serde(with = "complex")]
    pub a4: Complex64,
}

impl CoeffTriple {
    pub fn new(a2: Complex64, a3: Complex64, a4: Complex64) -> Self {
        Self { a2, a3, a4 }
    }

    pub fn real(a2: f64, a3: f64, a4: f64) -> Self {
        Self::new(a2.into(), a3.into(), a4.into())
    }

    pub fn from_function(f: &NormalizedFunction) -> Result<Self, FunctionalError> {
        if f.order() < 4 {
            return Err(FunctionalError::OrderTooLow {
                required: 4,
                actual: f.order(),
            });
        }
        Ok(Self::new(f.a(2), f.a(3), f.a(4)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.a2 - other.a2).norm(),
            (self.a3 - other.a3).norm(),
            (self.a4 - other.a4).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `(A_2, A_3, A_4)`, the leading coefficients of the inverse function.
pub fn inverse_coeffs(t: &CoeffTriple) -> (Complex64, Complex64, Complex64) {
    let CoeffTriple { a2, a3, a4 } = *t;
    (
        -a2,
        -a3 + 2.0 * a2 * a2,
        -a4 + 5.0 * a2 * a3 - 5.0 * a2 * a2 * a2,
    )
}

/// `(γ_1, γ_2)` where `log(f(z)/z) = 2 Σ γ_n z^n`.
pub fn log_coeffs(t: &CoeffTriple) -> (Complex64, Complex64) {
    (t.a2 / 2.0, (t.a3 - t.a2 * t.a2 / 2.0) / 2.0)
}

/// `(Γ_1, Γ_2, Γ_3)`, the logarithmic coefficients of the inverse function.
pub fn log_inverse_coeffs(t: &CoeffTriple) -> (Complex64, Complex64, Complex64) {
    let CoeffTriple { a2, a3, a4 } = *t;
    (
        -a2 / 2.0,
        -(a3 - 1.5 * a2 * a2) / 2.0,
        -(a4 - 4.0 * a2 * a3 + (10.0 / 3.0) * a2 * a2 * a2) / 2.0,
    )
}

/// `(S_3, S_4)`, the third- and fourth-order Schwarzian derivatives at 0.
pub fn schwarzian_initial(t: &CoeffTriple) -> (Complex64, Complex64) {
    let CoeffTriple { a2, a3, a4 } = *t;
    (
        6.0 * (a3 - a2 * a2),
        24.0 * (a4 - 3.0 * a2 * a3 + 2.0 * a2 * a2 * a2),
    )
}

/// Second-order Hermitian-Toeplitz determinant `γ_1^2 - |γ_2|^2`, written in
/// terms of `a_2` (which must be real) and `a_3`.
pub fn toeplitz_t21_log(t: &CoeffTriple) -> Result<f64, FunctionalError> {
    if t.a2.im.abs() > REAL_A2_TOLERANCE {
        return Err(FunctionalError::NonRealSecondCoefficient(t.a2.im));
    }
    let a2 = t.a2.re;
    let a2sq = a2 * a2;
    Ok((-a2sq * a2sq + 4.0 * a2sq + 4.0 * a2sq * t.a3.re - 4.0 * t.a3.norm_sqr()) / 16.0)
}

/// Rotation `e^{-iθ} f(e^{iθ} z)` making `a_2` real and non-negative.
pub fn rotate_to_real_a2(f: &NormalizedFunction) -> NormalizedFunction {
    let a2 = f.a(2);
    if a2 == Complex64::new(0.0, 0.0) {
        return f.clone();
    }
    // a_n -> a_n e^{iθ(n-1)} with θ = -arg a_2
    let unit = a2.conj() / a2.norm();
    let mut factor = Complex64::new(1.0, 0.0);
    let mut coeffs = f.series().coeffs().to_vec();
    for c in coeffs.iter_mut().skip(2) {
        factor *= unit;
        *c *= factor;
    }
    // make the rotated a_2 exactly real; its modulus is unchanged
    if coeffs.len() > 2 {
        coeffs[2] = Complex64::new(a2.norm(), 0.0);
    }
    let series = TruncatedSeries::new(coeffs).expect("non-empty");
    NormalizedFunction::new(series).expect("rotation preserves normalization")
}

/// `(|A_3 - A_2|, |Γ_3 - Γ_2|)`.
pub fn successive_diffs(t: &CoeffTriple) -> (f64, f64) {
    let (big_a2, big_a3, _) = inverse_coeffs(t);
    let (_, g2, g3) = log_inverse_coeffs(t);
    ((big_a3 - big_a2).norm(), (g3 - g2).norm())
}

/// Logarithmic coefficients `γ_1 .. γ_{N-1}` from the series of `log(f/z)`.
pub fn log_coeffs_series(f: &NormalizedFunction) -> Vec<Complex64> {
    log_ratio(f).coeffs()[1..].iter().map(|c| c / 2.0).collect()
}

/// Logarithmic inverse coefficients `Γ_1 .. Γ_{N-1}` from the inverse series.
pub fn log_inverse_coeffs_series(f: &NormalizedFunction) -> Vec<Complex64> {
    log_coeffs_series(&compositional_inverse(f))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct FunctionalReport {
    pub triple: CoeffTriple,
    #[serde(with = "complex")]
    pub A2: Complex64,
    #[serde(with = "complex")]
    pub A3: Complex64,
    #[serde(with = "complex")]
    pub A4: Complex64,
    #[serde(with = "complex")]
    pub gamma1: Complex64,
    #[serde(with = "complex")]
    pub gamma2: Complex64,
    #[serde(with = "complex")]
    pub Gamma1: Complex64,
    #[serde(with = "complex")]
    pub Gamma2: Complex64,
    #[serde(with = "complex")]
    pub Gamma3: Complex64,
    #[serde(with = "complex")]
    pub S3: Complex64,
    #[serde(with = "complex")]
    pub S4: Complex64,
    pub T21_log: f64,
    pub diff_A: f64,
    pub diff_Gamma: f64,
}

pub fn report_for(f: &NormalizedFunction) -> Result<FunctionalReport, FunctionalError> {
    let triple = CoeffTriple::from_function(f)?;
    let (big_a2, big_a3, big_a4) = inverse_coeffs(&triple);

    let inverse = compositional_inverse(f);
    for (index, closed) in [(2, big_a2), (3, big_a3), (4, big_a4)] {
        let residual = (inverse.a(index) - closed).norm();
        // NaN must fail too
        if !(residual <= INVERSE_CROSS_CHECK_TOLERANCE) {
            return Err(FunctionalError::InverseCrossCheck { index, residual });
        }
    }

    let (gamma1, gamma2) = log_coeffs(&triple);
    let (g1, g2, g3) = log_inverse_coeffs(&triple);
    let (s3, s4) = schwarzian_initial(&triple);
    let rotated = CoeffTriple::from_function(&rotate_to_real_a2(f))?;
    let t21 = toeplitz_t21_log(&rotated)?;
    let (diff_a, diff_gamma) = successive_diffs(&triple);

    Ok(FunctionalReport {
        triple,
        A2: big_a2,
        A3: big_a3,
        A4: big_a4,
        gamma1,
        gamma2,
        Gamma1: g1,
        Gamma2: g2,
        Gamma3: g3,
        S3: s3,
        S4: s4,
        T21_log: t21,
        diff_A: diff_a,
        diff_Gamma: diff_gamma,
    })
}

pub fn full_report(f: &OzakiFunction) -> Result<FunctionalReport, FunctionalError> {
    report_for(&f.f)
}
