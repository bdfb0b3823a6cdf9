//! Truncated formal power series over `Complex64`.
//!
//! A [`TruncatedSeries`] of order `N` stores the Taylor coefficients of
//! `z^0 .. z^N` at the origin. Every binary operation returns a series whose
//! order is the minimum of the operand orders, so no coefficient is ever
//! reported past the point where the inputs stop determining it.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("division by a series with zero constant term")]
    DivisionByNonUnit,
    #[error("composition requires an inner series vanishing at the origin (constant term {0})")]
    CompositionAtNonOrigin(Complex64),
    #[error("exp requires a zero constant term (got {0})")]
    ExpOfNonZeroConstant(Complex64),
    #[error("log and real powers require constant term 1 (got {0})")]
    PowOfNonUnitConstant(Complex64),
    #[error("cannot differentiate an order-0 series")]
    DerivativeOfConstant,
    #[error("series is not normalized: coefficient {index} is {value}, expected {expected}")]
    NotNormalized {
        index: usize,
        value: Complex64,
        expected: f64,
    },
}

pub type Result<T> = std::result::Result<T, SeriesError>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Taylor coefficients `a_0 .. a_N` of an analytic function at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![ZERO; order + 1],
        }
    }

    /// The constant series `1`.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = ONE;
        s
    }

    /// The series `z` (requires `order >= 1` to be non-trivial).
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = ONE;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, or zero past the truncation order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Drops coefficients above `order`; a higher `order` is clamped.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    /// Zero-pads up to `order`. Only valid when the caller knows the series
    /// is a polynomial of degree at most its current order.
    pub fn pad_polynomial(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < order + 1 {
            coeffs.resize(order + 1, ZERO);
        }
        Self { coeffs }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| alpha * c).collect(),
        }
    }

    /// `f(z) / z` for a series with zero constant term (index shift down).
    /// The constant term is discarded, so the caller checks it beforehand.
    pub(crate) fn shift_down(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self {
            coeffs: self.coeffs[1..].to_vec(),
        }
    }

    /// Largest coefficient difference over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order().min(other.order());
        (0..=n)
            .map(|k| (self.coeffs[k] - other.coeffs[k]).norm())
            .fold(0.0, f64::max)
    }
}

/// A series with `a_0 = 0` and `a_1 = 1` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFunction {
    series: TruncatedSeries,
}

impl NormalizedFunction {
    pub fn new(series: TruncatedSeries) -> Result<Self> {
        let expected = [(0usize, 0.0), (1usize, 1.0)];
        for (index, want) in expected {
            let value = series.coeff(index);
            if index > series.order() || value != Complex64::new(want, 0.0) {
                return Err(SeriesError::NotNormalized {
                    index,
                    value,
                    expected: want,
                });
            }
        }
        Ok(Self { series })
    }

    pub fn identity(order: usize) -> Self {
        Self {
            series: TruncatedSeries::identity(order.max(1)),
        }
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// `a_n`, the coefficient of `z^n`.
    pub fn a(&self, n: usize) -> Complex64 {
        self.series.coeff(n)
    }

    pub fn into_series(self) -> TruncatedSeries {
        self.series
    }
}

pub fn linear_combine(
    alpha: Complex64,
    s: &TruncatedSeries,
    beta: Complex64,
    t: &TruncatedSeries,
) -> TruncatedSeries {
    let n = s.order().min(t.order());
    TruncatedSeries {
        coeffs: (0..=n)
            .map(|k| alpha * s.coeffs[k] + beta * t.coeffs[k])
            .collect(),
    }
}

/// Cauchy product truncated at the smaller order.
pub fn mul(s: &TruncatedSeries, t: &TruncatedSeries) -> TruncatedSeries {
    let n = s.order().min(t.order());
    let coeffs = (0..=n)
        .map(|k| (0..=k).map(|j| s.coeffs[j] * t.coeffs[k - j]).sum())
        .collect();
    TruncatedSeries { coeffs }
}

pub fn div(s: &TruncatedSeries, t: &TruncatedSeries) -> Result<TruncatedSeries> {
    let t0 = t.coeffs[0];
    if t0 == ZERO {
        return Err(SeriesError::DivisionByNonUnit);
    }
    let n = s.order().min(t.order());
    let mut q: Vec<Complex64> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let acc: Complex64 = (1..=k).map(|j| t.coeffs[j] * q[k - j]).sum();
        q.push((s.coeffs[k] - acc) / t0);
    }
    Ok(TruncatedSeries { coeffs: q })
}

pub fn derivative(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    if s.order() == 0 {
        return Err(SeriesError::DerivativeOfConstant);
    }
    let coeffs = s.coeffs[1..]
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (k + 1) as f64)
        .collect();
    Ok(TruncatedSeries { coeffs })
}

/// Integral from 0; the order grows by one.
pub fn antiderivative(s: &TruncatedSeries) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(s.coeffs.len() + 1);
    coeffs.push(ZERO);
    coeffs.extend(
        s.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c / (k + 1) as f64),
    );
    TruncatedSeries { coeffs }
}

/// `outer ∘ inner` by Horner accumulation in powers of `inner`.
pub fn compose(outer: &TruncatedSeries, inner: &TruncatedSeries) -> Result<TruncatedSeries> {
    if inner.coeffs[0] != ZERO {
        return Err(SeriesError::CompositionAtNonOrigin(inner.coeffs[0]));
    }
    let n = outer.order().min(inner.order());
    let inner = inner.truncate(n);
    let mut acc = TruncatedSeries::zero(n);
    for k in (0..=n).rev() {
        acc = mul(&acc, &inner);
        acc.coeffs[0] += outer.coeffs[k];
    }
    Ok(acc)
}

/// `exp(s)` from the recurrence `k e_k = Σ_{j=1..k} j s_j e_{k-j}`.
pub fn exp_series(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    if s.coeffs[0] != ZERO {
        return Err(SeriesError::ExpOfNonZeroConstant(s.coeffs[0]));
    }
    let n = s.order();
    let mut e: Vec<Complex64> = Vec::with_capacity(n + 1);
    e.push(ONE);
    for k in 1..=n {
        let acc: Complex64 = (1..=k).map(|j| s.coeffs[j] * e[k - j] * j as f64).sum();
        e.push(acc / k as f64);
    }
    Ok(TruncatedSeries { coeffs: e })
}

/// `log(s)` for `s_0 = 1`, from `k l_k = k s_k - Σ_{j=1..k-1} j l_j s_{k-j}`.
pub fn log_series(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    if s.coeffs[0] != ONE {
        return Err(SeriesError::PowOfNonUnitConstant(s.coeffs[0]));
    }
    let n = s.order();
    let mut l: Vec<Complex64> = Vec::with_capacity(n + 1);
    l.push(ZERO);
    for k in 1..=n {
        let acc: Complex64 = (1..k).map(|j| l[j] * s.coeffs[k - j] * j as f64).sum();
        l.push(s.coeffs[k] - acc / k as f64);
    }
    Ok(TruncatedSeries { coeffs: l })
}

pub fn pow_real(s: &TruncatedSeries, alpha: f64) -> Result<TruncatedSeries> {
    let log = log_series(s)?;
    exp_series(&log.scale(Complex64::new(alpha, 0.0)))
}

/// `log(f(z)/z)`; coefficient `n` equals `2 γ_n`. The result has order `N-1`.
pub fn log_ratio(f: &NormalizedFunction) -> TruncatedSeries {
    let quotient = f.series.shift_down();
    log_series(&quotient).expect("normalized function has f(z)/z = 1 + ...")
}

/// Compositional inverse by Lagrange inversion:
/// `A_n = [z^{n-1}] (z / f(z))^n / n`.
pub fn compositional_inverse(f: &NormalizedFunction) -> NormalizedFunction {
    let n = f.order();
    let mut coeffs = vec![ZERO; n + 1];
    if n >= 1 {
        coeffs[1] = ONE;
    }
    if n >= 2 {
        let h = div(&TruncatedSeries::one(n - 1), &f.series.shift_down())
            .expect("normalized function has f(z)/z = 1 + ...");
        let mut power = h.clone();
        for k in 2..=n {
            power = mul(&power, &h);
            coeffs[k] = power.coeffs[k - 1] / k as f64;
        }
    }
    NormalizedFunction {
        series: TruncatedSeries { coeffs },
    }
}
