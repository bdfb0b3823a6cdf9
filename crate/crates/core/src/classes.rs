//! Members of the Ozaki classes F and G.
//!
//! A member is generated from a Schwarz function `w` through
//! `p = (1 + w) / (1 - w)` and the defining ODE
//!
//! ```text
//! F:  1 + z f''/f' = (3p - 1) / 2
//! G:  1 + z f''/f' = (3 - p) / 2
//! ```
//!
//! Schwarz functions are drawn from `z · B(z)` with `B` a finite Blaschke
//! product (or a convex mixture of two), so every sample is a genuine class
//! member and needs no rejection step.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::functionals::CoeffTriple;
use crate::serde_util::complex_vec;
use crate::series::{
    antiderivative, div, exp_series, mul, pow_real, NormalizedFunction, SeriesError,
    TruncatedSeries,
};

/// Slack on the Schwarz coefficient inequalities and on `|p_k| <= 2`.
pub const PREFIX_TOLERANCE: f64 = 1e-12;
/// Smallest order at which members are built.
pub const MIN_MEMBER_ORDER: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("Blaschke zero {index} has modulus {modulus} >= 1")]
    ZeroOutsideDisk { index: usize, modulus: f64 },
    #[error("mixture weight {0} is outside [0, 1]")]
    InvalidMixtureWeight(f64),
    #[error("coefficients fail the Schwarz prefix inequalities: c1={c1}, c2={c2}, c3={c3}")]
    InvalidSchwarzPrefix {
        c1: Complex64,
        c2: Complex64,
        c3: Complex64,
    },
    #[error("Caratheodory coefficient p{index} has modulus {modulus} > 2")]
    CaratheodoryOutOfRange { index: usize, modulus: f64 },
    #[error("Libera parameter {name} out of range: {value}")]
    LiberaOutOfRange { name: &'static str, value: f64 },
    #[error("unknown extremal function {0:?} (expected f1, f2, g1 or g2)")]
    UnknownExtremalName(String),
    #[error("unknown class {0:?} (expected F or G)")]
    UnknownClass(String),
    #[error("member order {0} is below the minimum of {MIN_MEMBER_ORDER}")]
    OrderTooLow(usize),
    #[error("{needed} coefficients required, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, ClassError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassLabel {
    F,
    G,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::F, ClassLabel::G];
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::F => "F",
            ClassLabel::G => "G",
        })
    }
}

impl FromStr for ClassLabel {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" | "f" => Ok(ClassLabel::F),
            "G" | "g" => Ok(ClassLabel::G),
            other => Err(ClassError::UnknownClass(other.to_string())),
        }
    }
}

/// Coefficients `c_1 .. c_N` of a Schwarz function `w(z) = Σ c_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SchwarzCoeffs(#[serde(with = "complex_vec")] pub Vec<Complex64>);

impl SchwarzCoeffs {
    pub fn new(c: Vec<Complex64>) -> Self {
        Self(c)
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![ZERO; len])
    }

    /// `c_k` (1-based), zero when not stored.
    pub fn c(&self, k: usize) -> Complex64 {
        k.checked_sub(1)
            .and_then(|i| self.0.get(i))
            .copied()
            .unwrap_or(ZERO)
    }

    /// Exactly `len` coefficients, zero-padded or truncated.
    pub fn padded(&self, len: usize) -> Self {
        Self((1..=len).map(|k| self.c(k)).collect())
    }

    /// `w` as a series of the given order; missing coefficients are zero.
    pub fn to_series(&self, order: usize) -> TruncatedSeries {
        let coeffs = (0..=order).map(|k| self.c(k)).collect();
        TruncatedSeries::new(coeffs).expect("non-empty")
    }

    /// Recovers `w = (p - 1) / (p + 1)` from Carathéodory coefficients.
    pub fn from_caratheodory(p: &CaratheodoryCoeffs, order: usize) -> Self {
        let mut coeffs = vec![ZERO; order + 1];
        for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
            *slot = p.p(k);
        }
        let p_minus_1 = TruncatedSeries::new(coeffs.clone()).expect("non-empty");
        coeffs[0] = Complex64::new(2.0, 0.0);
        let p_plus_1 = TruncatedSeries::new(coeffs).expect("non-empty");
        let w = div(&p_minus_1, &p_plus_1).expect("constant term 2");
        Self(w.coeffs()[1..].to_vec())
    }
}

/// Coefficients `p_1 .. p_N` of `p(z) = 1 + Σ p_k z^k` with `Re p > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CaratheodoryCoeffs(#[serde(with = "complex_vec")] Vec<Complex64>);

impl CaratheodoryCoeffs {
    /// Checks the necessary condition `|p_k| <= 2`.
    pub fn new(p: Vec<Complex64>) -> Result<Self> {
        for (i, z) in p.iter().enumerate() {
            let modulus = z.norm();
            if !(modulus <= 2.0 + PREFIX_TOLERANCE) {
                return Err(ClassError::CaratheodoryOutOfRange {
                    index: i + 1,
                    modulus,
                });
            }
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    /// `p_k` (1-based), zero when not stored.
    pub fn p(&self, k: usize) -> Complex64 {
        k.checked_sub(1)
            .and_then(|i| self.0.get(i))
            .copied()
            .unwrap_or(ZERO)
    }
}

/// Parameters of the Libera–Złotkiewicz representation of `p_2, p_3, p_4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiberaParams {
    p1: f64,
    xi: Complex64,
    eta: Complex64,
    gamma: Complex64,
}

impl LiberaParams {
    pub fn new(p1: f64, xi: Complex64, eta: Complex64, gamma: Complex64) -> Result<Self> {
        if !(0.0..=2.0).contains(&p1) {
            return Err(ClassError::LiberaOutOfRange {
                name: "p1",
                value: p1,
            });
        }
        for (name, z) in [("xi", xi), ("eta", eta), ("gamma", gamma)] {
            if !(z.norm() <= 1.0 + PREFIX_TOLERANCE) {
                return Err(ClassError::LiberaOutOfRange {
                    name,
                    value: z.norm(),
                });
            }
        }
        Ok(Self { p1, xi, eta, gamma })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn t(&self) -> f64 {
        4.0 - self.p1 * self.p1
    }
}

/// One finite Blaschke product `e^{iθ} Π (a_k - z) / (1 - conj(a_k) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    pub rotation: f64,
    pub zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn rotation(theta: f64) -> Self {
        Self {
            rotation: theta,
            zeros: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (index, a) in self.zeros.iter().enumerate() {
            let modulus = a.norm();
            if !(modulus < 1.0) {
                return Err(ClassError::ZeroOutsideDisk { index, modulus });
            }
        }
        Ok(())
    }

    fn series(&self, order: usize) -> TruncatedSeries {
        let mut acc = TruncatedSeries::one(order).scale(Complex64::from_polar(1.0, self.rotation));
        for &a in &self.zeros {
            let numer = TruncatedSeries::new(vec![a, -ONE])
                .unwrap()
                .pad_polynomial(order);
            let denom = TruncatedSeries::new(vec![ONE, -a.conj()])
                .unwrap()
                .pad_polynomial(order);
            let factor = div(&numer, &denom).expect("constant term 1");
            acc = mul(&acc, &factor.truncate(order));
        }
        acc
    }
}

/// `w(z) = z · (λ B_1(z) + (1 - λ) B_2(z))`; without a mixture `w = z B_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeSpec {
    pub primary: BlaschkeProduct,
    pub mixture: Option<(f64, BlaschkeProduct)>,
}

impl BlaschkeSpec {
    pub fn single(product: BlaschkeProduct) -> Self {
        Self {
            primary: product,
            mixture: None,
        }
    }

    /// `weight` multiplies `primary`, `1 - weight` multiplies `secondary`.
    pub fn mixed(primary: BlaschkeProduct, weight: f64, secondary: BlaschkeProduct) -> Self {
        Self {
            primary,
            mixture: Some((weight, secondary)),
        }
    }
}

pub fn schwarz_from_blaschke(spec: &BlaschkeSpec, order: usize) -> Result<SchwarzCoeffs> {
    spec.primary.validate()?;
    if order == 0 {
        return Ok(SchwarzCoeffs(Vec::new()));
    }
    let inner_order = order - 1;
    let mut b = spec.primary.series(inner_order);
    if let Some((weight, second)) = &spec.mixture {
        if !(0.0..=1.0).contains(weight) {
            return Err(ClassError::InvalidMixtureWeight(*weight));
        }
        second.validate()?;
        let other = second.series(inner_order);
        b = crate::series::linear_combine(
            Complex64::new(*weight, 0.0),
            &b,
            Complex64::new(1.0 - weight, 0.0),
            &other,
        );
    }
    Ok(SchwarzCoeffs(b.into_coeffs()))
}

/// The three necessary coefficient inequalities for a Schwarz function.
pub fn validate_schwarz_prefix(c: &SchwarzCoeffs) -> bool {
    let m1 = c.c(1).norm();
    let m2 = c.c(2).norm();
    let m3 = c.c(3).norm();
    let tol = PREFIX_TOLERANCE;
    m1 <= 1.0 + tol && m2 <= 1.0 - m1 * m1 + tol && m3 <= 1.0 - m1 * m1 - m2 * m2 / (1.0 + m1) + tol
}

/// `p_1 .. p_N` of `p = (1 + w) / (1 - w)`.
pub fn caratheodory_from_schwarz(c: &SchwarzCoeffs, order: usize) -> CaratheodoryCoeffs {
    CaratheodoryCoeffs(caratheodory_series(c, order).coeffs()[1..].to_vec())
}

fn caratheodory_series(c: &SchwarzCoeffs, order: usize) -> TruncatedSeries {
    let w = c.to_series(order);
    let one = TruncatedSeries::one(order);
    let numer = crate::series::linear_combine(ONE, &one, ONE, &w);
    let denom = crate::series::linear_combine(ONE, &one, -ONE, &w);
    div(&numer, &denom).expect("w(0) = 0")
}

/// `(p_1, p_2, p_3, p_4)` from the Libera–Złotkiewicz formulas.
pub fn libera_expand(params: &LiberaParams) -> Result<CaratheodoryCoeffs> {
    let p = Complex64::new(params.p1, 0.0);
    let t = params.t();
    let xi = params.xi;
    let eta = params.eta;
    let gamma = params.gamma;
    let one_minus_xi2 = 1.0 - xi.norm_sqr();
    let one_minus_eta2 = 1.0 - eta.norm_sqr();
    let p_sq = p * p;

    let p2 = (p_sq + t * xi) / 2.0;
    let p3 = (p_sq * p + 2.0 * p * t * xi - p * t * xi * xi + 2.0 * t * one_minus_xi2 * eta) / 4.0;
    let p4 = (p_sq * p_sq
        + 3.0 * p_sq * t * xi
        + (4.0 - 3.0 * p_sq) * t * xi * xi
        + p_sq * t * xi * xi * xi
        + 4.0 * t * one_minus_xi2 * one_minus_eta2 * gamma
        + 4.0 * t * one_minus_xi2 * (p * eta - p * xi * eta - xi.conj() * eta * eta))
        / 8.0;
    CaratheodoryCoeffs::new(vec![p, p2, p3, p4])
}

/// How an [`OzakiFunction`] was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Schwarz(SchwarzCoeffs),
    Extremal(ExtremalName),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OzakiFunction {
    pub label: ClassLabel,
    pub f: NormalizedFunction,
    pub provenance: Provenance,
}

impl OzakiFunction {
    pub fn order(&self) -> usize {
        self.f.order()
    }
}

/// Solves `f''/f' = q` with `q = 3(p-1)/(2z)` (F) or `(1-p)/(2z)` (G).
pub fn build_member(label: ClassLabel, w: &SchwarzCoeffs, order: usize) -> Result<OzakiFunction> {
    if order < MIN_MEMBER_ORDER {
        return Err(ClassError::OrderTooLow(order));
    }
    if !validate_schwarz_prefix(w) {
        return Err(ClassError::InvalidSchwarzPrefix {
            c1: w.c(1),
            c2: w.c(2),
            c3: w.c(3),
        });
    }
    // p to order N-1 determines f'' / f' to order N-2, hence f to order N
    let p = caratheodory_series(w, order - 1);
    let scale = match label {
        ClassLabel::F => 1.5,
        ClassLabel::G => -0.5,
    };
    let mut q_coeffs = p.coeffs()[1..].to_vec();
    for x in q_coeffs.iter_mut() {
        *x *= scale;
    }
    let q = TruncatedSeries::new(q_coeffs)?;
    let derivative = exp_series(&antiderivative(&q))?;
    let f = NormalizedFunction::new(antiderivative(&derivative))?;
    Ok(OzakiFunction {
        label,
        f,
        provenance: Provenance::Schwarz(w.clone()),
    })
}

/// The four extremal functions: `f1, f2` in F and `g1, g2` in G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ExtremalName {
    #[serde(rename = "f1")]
    F1,
    #[serde(rename = "f2")]
    F2,
    #[serde(rename = "g1")]
    G1,
    #[serde(rename = "g2")]
    G2,
}

impl ExtremalName {
    pub const ALL: [ExtremalName; 4] = [
        ExtremalName::F1,
        ExtremalName::F2,
        ExtremalName::G1,
        ExtremalName::G2,
    ];

    pub fn class(self) -> ClassLabel {
        match self {
            ExtremalName::F1 | ExtremalName::F2 => ClassLabel::F,
            ExtremalName::G1 | ExtremalName::G2 => ClassLabel::G,
        }
    }

    /// The two extremals of a class.
    pub fn of_class(label: ClassLabel) -> [ExtremalName; 2] {
        match label {
            ClassLabel::F => [ExtremalName::F1, ExtremalName::F2],
            ClassLabel::G => [ExtremalName::G1, ExtremalName::G2],
        }
    }
}

impl fmt::Display for ExtremalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremalName::F1 => "f1",
            ExtremalName::F2 => "f2",
            ExtremalName::G1 => "g1",
            ExtremalName::G2 => "g2",
        })
    }
}

impl FromStr for ExtremalName {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(ExtremalName::F1),
            "f2" => Ok(ExtremalName::F2),
            "g1" => Ok(ExtremalName::G1),
            "g2" => Ok(ExtremalName::G2),
            other => Err(ClassError::UnknownExtremalName(other.to_string())),
        }
    }
}

/// Closed-form extremals; `f1, f2, g2` integrate a real power of `1 - z^k`.
pub fn extremal_member(name: ExtremalName, order: usize) -> Result<OzakiFunction> {
    if order < MIN_MEMBER_ORDER {
        return Err(ClassError::OrderTooLow(order));
    }
    let n = order - 1;
    let one_minus = |k: usize| {
        let mut s = TruncatedSeries::one(n).into_coeffs();
        s[k] = -ONE;
        TruncatedSeries::new(s).expect("non-empty")
    };
    let series = match name {
        ExtremalName::F1 => antiderivative(&pow_real(&one_minus(1), -3.0)?),
        ExtremalName::F2 => antiderivative(&pow_real(&one_minus(2), -1.5)?),
        ExtremalName::G1 => {
            TruncatedSeries::new(vec![ZERO, ONE, Complex64::new(-0.5, 0.0)])?.pad_polynomial(order)
        }
        ExtremalName::G2 => antiderivative(&pow_real(&one_minus(2), 0.5)?),
    };
    Ok(OzakiFunction {
        label: name.class(),
        f: NormalizedFunction::new(series)?,
        provenance: Provenance::Extremal(name),
    })
}

fn need(len: usize, needed: usize) -> Result<()> {
    if len < needed {
        return Err(ClassError::TooFewCoefficients { needed, got: len });
    }
    Ok(())
}

/// `(a_2, a_3, a_4)` written directly in `p_1, p_2, p_3`.
pub fn coeffs_from_caratheodory_direct(
    label: ClassLabel,
    p: &CaratheodoryCoeffs,
) -> Result<CoeffTriple> {
    need(p.0.len(), 3)?;
    let (p1, p2, p3) = (p.p(1), p.p(2), p.p(3));
    Ok(match label {
        ClassLabel::F => CoeffTriple::new(
            0.75 * p1,
            (3.0 * p1 * p1 + 2.0 * p2) / 8.0,
            (9.0 * p1 * p1 * p1 + 18.0 * p1 * p2 + 8.0 * p3) / 64.0,
        ),
        ClassLabel::G => CoeffTriple::new(
            -p1 / 4.0,
            (p1 * p1 - 2.0 * p2) / 24.0,
            (-p1 * p1 * p1 + 6.0 * p1 * p2 - 8.0 * p3) / 192.0,
        ),
    })
}

/// `(a_2, a_3, a_4)` written directly in `c_1, c_2, c_3`.
pub fn coeffs_from_schwarz_direct(label: ClassLabel, c: &SchwarzCoeffs) -> Result<CoeffTriple> {
    need(c.0.len(), 3)?;
    let (c1, c2, c3) = (c.c(1), c.c(2), c.c(3));
    Ok(match label {
        ClassLabel::F => CoeffTriple::new(
            1.5 * c1,
            (4.0 * c1 * c1 + c2) / 2.0,
            (20.0 * c1 * c1 * c1 + 13.0 * c1 * c2 + 2.0 * c3) / 8.0,
        ),
        ClassLabel::G => CoeffTriple::new(-c1 / 2.0, -c2 / 6.0, -(c1 * c2 + 2.0 * c3) / 24.0),
    })
}

/// Draws Schwarz functions `z · B(z)` from a biased family of Blaschke
/// products: 10% pure rotations, 10% with every zero at modulus >= 0.9,
/// the rest with zeros uniform in the disk; a quarter of the latter are
/// convex mixtures of two products.
#[derive(Debug, Clone, Copy)]
pub struct BlaschkeSampler {
    pub max_zeros: usize,
}

impl Default for BlaschkeSampler {
    fn default() -> Self {
        Self { max_zeros: 3 }
    }
}

impl BlaschkeSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BlaschkeSpec {
        let kind: f64 = rng.gen();
        if kind < 0.1 {
            BlaschkeSpec::single(BlaschkeProduct::rotation(rng.gen::<f64>() * TAU))
        } else if kind < 0.2 {
            BlaschkeSpec::single(self.product(rng, 0.81))
        } else if kind < 0.4 {
            let first = self.product(rng, 0.0);
            let second = self.product(rng, 0.0);
            BlaschkeSpec::mixed(first, rng.gen(), second)
        } else {
            BlaschkeSpec::single(self.product(rng, 0.0))
        }
    }

    /// Zeros with `|a|^2` uniform in `[min_radius_sq, 1)` and uniform angle.
    fn product<R: Rng + ?Sized>(&self, rng: &mut R, min_radius_sq: f64) -> BlaschkeProduct {
        let count = if min_radius_sq > 0.0 {
            rng.gen_range(1..=self.max_zeros.max(1))
        } else {
            rng.gen_range(0..=self.max_zeros)
        };
        let zeros = (0..count)
            .map(|_| {
                let r2 = min_radius_sq + (1.0 - min_radius_sq) * rng.gen::<f64>();
                Complex64::from_polar(r2.sqrt(), rng.gen::<f64>() * TAU)
            })
            .collect();
        BlaschkeProduct {
            rotation: rng.gen::<f64>() * TAU,
            zeros,
        }
    }
}

fn eval_poly(s: &TruncatedSeries, z: Complex64) -> Complex64 {
    s.coeffs().iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Extremes of `Re(1 + z f''/f')` over `points` equally spaced points on
/// `|z| = radius`, from the truncated series of `1 + z f''/f'`.
pub fn boundary_real_part_range(f: &NormalizedFunction, radius: f64, points: usize) -> (f64, f64) {
    let d1 = crate::series::derivative(f.series()).expect("order >= 1");
    let d2 = crate::series::derivative(&d1).expect("order >= 2");
    let ratio = div(&d2, &d1.truncate(d2.order())).expect("f'(0) = 1");
    let mut coeffs = vec![ONE];
    coeffs.extend_from_slice(ratio.coeffs());
    let expr = TruncatedSeries::new(coeffs).expect("non-empty");
    (0..points)
        .map(|k| {
            let z = Complex64::from_polar(radius, TAU * k as f64 / points as f64);
            eval_poly(&expr, z).re
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
}
