//! Numerical reproduction of the sharp bounds.
//!
//! Three independent routes are provided:
//!
//! * [`check_extremals`] evaluates every ledger functional exactly at its
//!   extremal witness;
//! * [`grid_extremize`] globally extremizes the eight reduced real objectives
//!   over their compact regions by deterministic nested grid search;
//! * [`sample_and_check`] draws random class members and looks for any
//!   functional value outside its ledger bound.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classes::{
    build_member, extremal_member, schwarz_from_blaschke, BlaschkeSampler, ClassError, ClassLabel,
    ExtremalName, OzakiFunction,
};
use crate::functionals::{full_report, FunctionalError, FunctionalReport};
use crate::serde_util::rational;

/// Allowed `|computed| - bound` at an extremal witness.
pub const SHARPNESS_TOLERANCE: f64 = 1e-12;
/// Allowed distance between a grid extremum and the closed-form extremum.
pub const OPTIMIZATION_TOLERANCE: f64 = 1e-6;
/// Default slack for sampled members exceeding a bound.
pub const DEFAULT_VIOLATION_TOLERANCE: f64 = 1e-9;
/// Order at which extremal witnesses are built for [`check_extremals`].
pub const WITNESS_ORDER: usize = 8;
pub const MIN_RESOLUTION: usize = 100;
pub const MIN_SAMPLE_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("point ({0}, {1}) lies outside the domain of {2}")]
    PointOutsideDomain(f64, f64, ObjectiveId),
    #[error("grid resolution {0} is below the minimum of {MIN_RESOLUTION}")]
    ResolutionTooLow(usize),
    #[error("unknown objective {0:?}")]
    UnknownObjective(String),
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("sample order {0} is below the minimum of {MIN_SAMPLE_ORDER}")]
    SampleOrderTooLow(usize),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Functional(#[from] FunctionalError),
}

pub type Result<T> = std::result::Result<T, VerifierError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Mode::Max => candidate > incumbent,
            Mode::Min => candidate < incumbent,
        }
    }
}

/// `Box` is `[0,2] × [0,1]`; `Parabolic` is `{0 <= u <= 1, 0 <= v <= 1 - u^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainSpec {
    Box,
    Parabolic,
}

impl DomainSpec {
    /// `(u_min, u_max, v_min, v_max)` of the bounding box.
    pub fn bounds(self) -> (f64, f64, f64, f64) {
        match self {
            DomainSpec::Box => (0.0, 2.0, 0.0, 1.0),
            DomainSpec::Parabolic => (0.0, 1.0, 0.0, 1.0),
        }
    }

    pub fn contains(self, (u, v): (f64, f64)) -> bool {
        let (u0, u1, v0, v1) = self.bounds();
        let in_box = u0 <= u && u <= u1 && v0 <= v && v <= v1;
        match self {
            DomainSpec::Box => in_box,
            DomainSpec::Parabolic => in_box && v <= 1.0 - u * u,
        }
    }
}

/// The eight reduced objectives. The first four take `(p, x)` on the box,
/// the last four `(u, v) = (|c_1|, |c_2|)` on the parabolic region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ObjectiveId {
    UpsilonF,
    PsiF,
    PhiG,
    NG,
    ChiF,
    MF,
    SG,
    DeltaG,
}

impl ObjectiveId {
    pub const ALL: [ObjectiveId; 8] = [
        ObjectiveId::UpsilonF,
        ObjectiveId::PsiF,
        ObjectiveId::PhiG,
        ObjectiveId::NG,
        ObjectiveId::ChiF,
        ObjectiveId::MF,
        ObjectiveId::SG,
        ObjectiveId::DeltaG,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveId::UpsilonF => "UpsilonF",
            ObjectiveId::PsiF => "PsiF",
            ObjectiveId::PhiG => "PhiG",
            ObjectiveId::NG => "NG",
            ObjectiveId::ChiF => "ChiF",
            ObjectiveId::MF => "MF",
            ObjectiveId::SG => "SG",
            ObjectiveId::DeltaG => "DeltaG",
        }
    }

    pub fn domain(self) -> DomainSpec {
        match self {
            ObjectiveId::UpsilonF | ObjectiveId::PsiF | ObjectiveId::PhiG | ObjectiveId::NG => {
                DomainSpec::Box
            }
            _ => DomainSpec::Parabolic,
        }
    }

    /// Direction in which the objective bounds its functional.
    pub fn mode(self) -> Mode {
        match self {
            ObjectiveId::PsiF | ObjectiveId::NG => Mode::Min,
            _ => Mode::Max,
        }
    }

    /// Closed-form extremum in [`ObjectiveId::mode`].
    pub fn paper_value(self) -> Rational64 {
        let r = Rational64::new;
        match self {
            ObjectiveId::UpsilonF => r(95, 256),
            ObjectiveId::PsiF => r(-1, 16),
            ObjectiveId::PhiG => r(15, 256),
            ObjectiveId::NG => r(-1, 144),
            ObjectiveId::ChiF => r(7, 8),
            ObjectiveId::MF => r(25, 16),
            ObjectiveId::SG => r(5, 24),
            ObjectiveId::DeltaG => r(6, 1),
        }
    }

    /// The formula, without a domain check.
    pub fn formula(self, a: f64, b: f64) -> f64 {
        match self {
            ObjectiveId::UpsilonF => toeplitz_kernel(a, b, 49.0, 56.0) / 4096.0,
            ObjectiveId::PsiF => toeplitz_kernel(a, b, 49.0, -56.0) / 4096.0,
            ObjectiveId::PhiG => toeplitz_kernel(a, b, 9.0, 24.0) / 36864.0,
            ObjectiveId::NG => toeplitz_kernel(a, b, 9.0, -24.0) / 36864.0,
            ObjectiveId::ChiF => (42.0 * a.powi(3) + 33.0 * a * b + 6.0 * c3_bound(a, b)) / 48.0,
            ObjectiveId::MF => {
                (42.0 * a.powi(3) + 33.0 * a * b + 33.0 * a * a + 12.0 * b + 6.0 * c3_bound(a, b))
                    / 48.0
            }
            ObjectiveId::SG => (10.0 * a.powi(3) + 9.0 * a * b + 2.0 * c3_bound(a, b)) / 48.0,
            ObjectiveId::DeltaG => 6.0 * a.powi(3) + 7.0 * a * b + 2.0 * c3_bound(a, b),
        }
    }
}

/// `-quartic p^4 + 576 p^2 + cross p^2 (4-p^2) x - 16 (4-p^2)^2 x^2`.
fn toeplitz_kernel(p: f64, x: f64, quartic: f64, cross: f64) -> f64 {
    let p2 = p * p;
    let t = 4.0 - p2;
    -quartic * p2 * p2 + 576.0 * p2 + cross * p2 * t * x - 16.0 * t * t * x * x
}

/// Upper bound on `|c_3|` in terms of `u = |c_1|`, `v = |c_2|`.
fn c3_bound(u: f64, v: f64) -> f64 {
    1.0 - u * u - v * v / (1.0 + u)
}

impl fmt::Display for ObjectiveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveId {
    type Err = VerifierError;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| VerifierError::UnknownObjective(s.to_string()))
    }
}

pub fn eval_objective(id: ObjectiveId, point: (f64, f64)) -> Result<f64> {
    if !id.domain().contains(point) {
        return Err(VerifierError::PointOutsideDomain(point.0, point.1, id));
    }
    Ok(id.formula(point.0, point.1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub objective_id: ObjectiveId,
    pub mode: Mode,
    pub value: f64,
    pub argpoint: (f64, f64),
    pub grid_resolution: usize,
    pub refine_iterations: usize,
    #[serde(with = "rational")]
    pub paper_value: Rational64,
    pub gap: f64,
}

impl OptResult {
    pub fn passed(&self) -> bool {
        self.gap <= OPTIMIZATION_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    point: (f64, f64),
    // (row, column) in the current scan, used only to break ties
    rank: (usize, usize),
}

fn pick(mode: Mode, a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if mode.better(b.value, a.value) || (b.value == a.value && b.rank < a.rank) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Scans an `r × r` grid of the window plus, for the parabolic region, `r`
/// points of the curve `v = 1 - u^2` whose `v` lies inside the window.
fn scan_window(
    id: ObjectiveId,
    mode: Mode,
    (u0, u1): (f64, f64),
    (v0, v1): (f64, f64),
    r: usize,
) -> Option<Candidate> {
    let domain = id.domain();
    let grid = (0..r)
        .into_par_iter()
        .map(|i| {
            let u = lerp(u0, u1, i, r);
            let mut best = None;
            for j in 0..r {
                let v = lerp(v0, v1, j, r);
                if domain.contains((u, v)) {
                    let c = Candidate {
                        value: id.formula(u, v),
                        point: (u, v),
                        rank: (i, j),
                    };
                    best = pick(mode, best, Some(c));
                }
            }
            best
        })
        .reduce(|| None, |a, b| pick(mode, a, b));

    if domain != DomainSpec::Parabolic {
        return grid;
    }
    let curve = (0..r)
        .map(|i| {
            let u = lerp(u0, u1, i, r);
            (i, u, 1.0 - u * u)
        })
        .filter(|&(_, u, v)| v0 <= v && v <= v1 && domain.contains((u, v)))
        .map(|(i, u, v)| Candidate {
            value: id.formula(u, v),
            point: (u, v),
            rank: (r + i, 0),
        })
        .fold(None, |acc, c| pick(mode, acc, Some(c)));
    pick(mode, grid, curve)
}

/// Deterministic nested grid search: an `R × R` scan of the bounding box,
/// then `K` rounds over windows shrunk by a factor 10 per round around the
/// incumbent. The incumbent is only ever replaced by a strictly better point,
/// so the result is monotone in `K`.
pub fn grid_extremize(
    id: ObjectiveId,
    mode: Mode,
    resolution: usize,
    refine_iters: usize,
) -> Result<OptResult> {
    if resolution < MIN_RESOLUTION {
        return Err(VerifierError::ResolutionTooLow(resolution));
    }
    let (u_lo, u_hi, v_lo, v_hi) = id.domain().bounds();
    let mut best = scan_window(id, mode, (u_lo, u_hi), (v_lo, v_hi), resolution)
        .expect("bounding box contains domain points");

    let (mut du, mut dv) = (u_hi - u_lo, v_hi - v_lo);
    for _ in 0..refine_iters {
        du /= 10.0;
        dv /= 10.0;
        let (u, v) = best.point;
        let uw = ((u - du / 2.0).max(u_lo), (u + du / 2.0).min(u_hi));
        let vw = ((v - dv / 2.0).max(v_lo), (v + dv / 2.0).min(v_hi));
        if let Some(c) = scan_window(id, mode, uw, vw, resolution) {
            if mode.better(c.value, best.value) {
                best = c;
            }
        }
    }

    let paper_value = id.paper_value();
    Ok(OptResult {
        objective_id: id,
        mode,
        value: best.value,
        argpoint: best.point,
        grid_resolution: resolution,
        refine_iterations: refine_iters,
        paper_value,
        gap: (best.value - rational::to_f64(&paper_value)).abs(),
    })
}

/// Functionals carrying a ledger bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Functional {
    #[serde(rename = "T21_log")]
    T21Log,
    #[serde(rename = "|Gamma1|")]
    AbsGamma1,
    #[serde(rename = "|Gamma2|")]
    AbsGamma2,
    #[serde(rename = "|Gamma3|")]
    AbsGamma3,
    #[serde(rename = "|S3|")]
    AbsS3,
    #[serde(rename = "|S4|")]
    AbsS4,
    #[serde(rename = "|A3-A2|")]
    DiffA,
    #[serde(rename = "|Gamma3-Gamma2|")]
    DiffGamma,
}

impl Functional {
    pub const ALL: [Functional; 8] = [
        Functional::T21Log,
        Functional::AbsGamma1,
        Functional::AbsGamma2,
        Functional::AbsGamma3,
        Functional::AbsS3,
        Functional::AbsS4,
        Functional::DiffA,
        Functional::DiffGamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Functional::T21Log => "T21_log",
            Functional::AbsGamma1 => "|Gamma1|",
            Functional::AbsGamma2 => "|Gamma2|",
            Functional::AbsGamma3 => "|Gamma3|",
            Functional::AbsS3 => "|S3|",
            Functional::AbsS4 => "|S4|",
            Functional::DiffA => "|A3-A2|",
            Functional::DiffGamma => "|Gamma3-Gamma2|",
        }
    }

    pub fn value(self, r: &FunctionalReport) -> f64 {
        match self {
            Functional::T21Log => r.T21_log,
            Functional::AbsGamma1 => r.Gamma1.norm(),
            Functional::AbsGamma2 => r.Gamma2.norm(),
            Functional::AbsGamma3 => r.Gamma3.norm(),
            Functional::AbsS3 => r.S3.norm(),
            Functional::AbsS4 => r.S4.norm(),
            Functional::DiffA => r.diff_A,
            Functional::DiffGamma => r.diff_Gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSide {
    #[serde(with = "rational")]
    pub value: Rational64,
    pub witness: ExtremalName,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub class: ClassLabel,
    pub functional: Functional,
    pub kind: &'static str,
    pub lower: Option<BoundSide>,
    pub upper: BoundSide,
}

impl LedgerEntry {
    fn upper(
        class: ClassLabel,
        functional: Functional,
        value: Rational64,
        witness: ExtremalName,
    ) -> Self {
        Self {
            class,
            functional,
            kind: "upper",
            lower: None,
            upper: BoundSide { value, witness },
        }
    }

    fn two_sided(class: ClassLabel, lower: BoundSide, upper: BoundSide) -> Self {
        Self {
            class,
            functional: Functional::T21Log,
            kind: "two-sided",
            lower: Some(lower),
            upper,
        }
    }

    /// Largest amount by which `value` leaves the admissible range
    /// (negative when strictly inside).
    pub fn excess(&self, value: f64) -> f64 {
        let above = value - rational::to_f64(&self.upper.value);
        match &self.lower {
            Some(lower) => above.max(rational::to_f64(&lower.value) - value),
            None => above,
        }
    }

    pub fn sides(&self) -> Vec<(Side, BoundSide)> {
        let mut out = Vec::with_capacity(2);
        if let Some(lower) = self.lower {
            out.push((Side::Lower, lower));
        }
        out.push((Side::Upper, self.upper));
        out
    }
}

/// The sharp bounds per class and functional, with their extremal witnesses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundLedger {
    pub entries: Vec<LedgerEntry>,
}

impl BoundLedger {
    pub fn standard() -> Self {
        use ClassLabel::{F, G};
        use ExtremalName::{F1, F2, G1, G2};
        let r = Rational64::new;
        let side = |value, witness| BoundSide { value, witness };
        let entries = vec![
            LedgerEntry::two_sided(F, side(r(-1, 16), F2), side(r(95, 256), F1)),
            LedgerEntry::upper(F, Functional::AbsGamma1, r(3, 4), F1),
            LedgerEntry::upper(F, Functional::AbsGamma2, r(11, 16), F1),
            LedgerEntry::upper(F, Functional::AbsGamma3, r(7, 8), F1),
            LedgerEntry::upper(F, Functional::AbsS3, r(3, 1), F2),
            LedgerEntry::upper(F, Functional::DiffA, r(4, 1), F1),
            LedgerEntry::upper(F, Functional::DiffGamma, r(25, 16), F1),
            LedgerEntry::two_sided(G, side(r(-1, 144), G2), side(r(15, 256), G1)),
            LedgerEntry::upper(G, Functional::AbsGamma1, r(1, 4), G1),
            LedgerEntry::upper(G, Functional::AbsGamma2, r(3, 16), G1),
            LedgerEntry::upper(G, Functional::AbsGamma3, r(5, 24), G1),
            LedgerEntry::upper(G, Functional::AbsS3, r(3, 2), G1),
            LedgerEntry::upper(G, Functional::AbsS4, r(6, 1), G1),
        ];
        Self { entries }
    }

    pub fn for_class(&self, class: ClassLabel) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(move |e| e.class == class)
    }

    pub fn find(&self, class: ClassLabel, functional: Functional) -> Option<&LedgerEntry> {
        self.for_class(class).find(|e| e.functional == functional)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attainment {
    pub side: Side,
    pub witness: ExtremalName,
    #[serde(with = "rational")]
    pub bound: Rational64,
    pub computed: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalCheck {
    pub entry: LedgerEntry,
    pub attainments: Vec<Attainment>,
    pub passed: bool,
}

/// Evaluates every ledger entry (optionally one class) at its witness.
pub fn check_extremals_for(class: Option<ClassLabel>) -> Result<Vec<ExtremalCheck>> {
    let ledger = BoundLedger::standard();
    let mut reports = std::collections::HashMap::new();
    for name in ExtremalName::ALL {
        reports.insert(name, full_report(&extremal_member(name, WITNESS_ORDER)?)?);
    }
    Ok(ledger
        .entries
        .iter()
        .filter(|e| class.is_none_or(|c| c == e.class))
        .map(|entry| {
            let attainments: Vec<Attainment> = entry
                .sides()
                .into_iter()
                .map(|(side, b)| {
                    let computed = entry.functional.value(&reports[&b.witness]);
                    Attainment {
                        side,
                        witness: b.witness,
                        bound: b.value,
                        computed,
                        residual: computed - rational::to_f64(&b.value),
                    }
                })
                .collect();
            let passed = attainments
                .iter()
                .all(|a| a.residual.abs() <= SHARPNESS_TOLERANCE);
            ExtremalCheck {
                entry: *entry,
                attainments,
                passed,
            }
        })
        .collect())
}

pub fn check_extremals() -> Result<Vec<ExtremalCheck>> {
    check_extremals_for(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub class_label: ClassLabel,
    pub count: usize,
    pub order: usize,
    pub seed: u64,
    pub blaschke_max_zeros: usize,
    pub include_extremals: bool,
    pub violation_tolerance: f64,
}

impl SampleConfig {
    pub fn new(class_label: ClassLabel, count: usize, seed: u64) -> Self {
        Self {
            class_label,
            count,
            order: MIN_SAMPLE_ORDER,
            seed,
            blaschke_max_zeros: 3,
            include_extremals: true,
            violation_tolerance: DEFAULT_VIOLATION_TOLERANCE,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(VerifierError::EmptySample);
        }
        if self.order < MIN_SAMPLE_ORDER {
            return Err(VerifierError::SampleOrderTooLow(self.order));
        }
        Ok(())
    }
}

/// Empirical range of one functional, against its ledger bound if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalStat {
    pub name: &'static str,
    pub empirical_min: f64,
    pub empirical_max: f64,
    pub bound: Option<LedgerEntry>,
    /// Distance from the empirical range to the bound; negative on violation.
    pub margin: Option<f64>,
    /// Distance between the empirical extreme and the sharp value.
    pub attainment_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub class: ClassLabel,
    pub seed: u64,
    pub order: usize,
    pub random_members: usize,
    pub injected_extremals: Vec<ExtremalName>,
    pub violation_tolerance: f64,
    pub functionals: Vec<FunctionalStat>,
    pub violations: usize,
    pub worst_excess: f64,
    pub construction_failures: usize,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.construction_failures == 0
    }

    pub fn stat(&self, name: &str) -> Option<&FunctionalStat> {
        self.functionals.iter().find(|s| s.name == name)
    }
}

const N_FUNCTIONALS: usize = Functional::ALL.len();

#[derive(Debug, Clone)]
struct Accumulator {
    min: [f64; N_FUNCTIONALS],
    max: [f64; N_FUNCTIONALS],
    violations: usize,
    worst_excess: f64,
    failures: usize,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            min: [f64::INFINITY; N_FUNCTIONALS],
            max: [f64::NEG_INFINITY; N_FUNCTIONALS],
            violations: 0,
            worst_excess: f64::NEG_INFINITY,
            failures: 0,
        }
    }

    fn add(
        mut self,
        bounds: &[Option<LedgerEntry>],
        tol: f64,
        report: Option<&FunctionalReport>,
    ) -> Self {
        let Some(report) = report else {
            self.failures += 1;
            return self;
        };
        for (i, functional) in Functional::ALL.iter().enumerate() {
            let x = functional.value(report);
            self.min[i] = self.min[i].min(x);
            self.max[i] = self.max[i].max(x);
            if let Some(entry) = &bounds[i] {
                let excess = entry.excess(x);
                // NaN counts as a violation
                if !(excess <= tol) {
                    self.violations += 1;
                }
                self.worst_excess = self.worst_excess.max(excess);
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for i in 0..N_FUNCTIONALS {
            self.min[i] = self.min[i].min(other.min[i]);
            self.max[i] = self.max[i].max(other.max[i]);
        }
        self.violations += other.violations;
        self.worst_excess = self.worst_excess.max(other.worst_excess);
        self.failures += other.failures;
        self
    }
}

fn class_bounds(class: ClassLabel) -> Vec<Option<LedgerEntry>> {
    let ledger = BoundLedger::standard();
    Functional::ALL
        .iter()
        .map(|&f| ledger.find(class, f).copied())
        .collect()
}

fn finish(
    cfg: &SampleConfig,
    random_members: usize,
    injected: Vec<ExtremalName>,
    acc: Accumulator,
) -> SampleReport {
    let bounds = class_bounds(cfg.class_label);
    let functionals = Functional::ALL
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let (lo, hi) = (acc.min[i], acc.max[i]);
            let (margin, attainment_gap) = match &bounds[i] {
                Some(entry) => {
                    let upper = rational::to_f64(&entry.upper.value);
                    let mut margin = upper - hi;
                    let mut gap = (upper - hi).abs();
                    if let Some(lower) = &entry.lower {
                        let lower = rational::to_f64(&lower.value);
                        margin = margin.min(lo - lower);
                        gap = gap.max((lo - lower).abs());
                    }
                    (Some(margin), Some(gap))
                }
                None => (None, None),
            };
            FunctionalStat {
                name: f.name(),
                empirical_min: lo,
                empirical_max: hi,
                bound: bounds[i],
                margin,
                attainment_gap,
            }
        })
        .collect();
    SampleReport {
        class: cfg.class_label,
        seed: cfg.seed,
        order: cfg.order,
        random_members,
        injected_extremals: injected,
        violation_tolerance: cfg.violation_tolerance,
        functionals,
        violations: acc.violations,
        worst_excess: acc.worst_excess,
        construction_failures: acc.failures,
    }
}

/// Checks an explicit list of members against the ledger of `cfg.class_label`.
pub fn check_members(cfg: &SampleConfig, members: &[OzakiFunction]) -> SampleReport {
    let bounds = class_bounds(cfg.class_label);
    let acc = members.iter().fold(Accumulator::new(), |acc, m| {
        acc.add(
            &bounds,
            cfg.violation_tolerance,
            full_report(m).ok().as_ref(),
        )
    });
    finish(cfg, members.len(), Vec::new(), acc)
}

/// Random member number `index` of the stream `seed`. Each index owns an
/// independent ChaCha stream, so results do not depend on how indices are
/// partitioned across threads.
pub fn sample_member(cfg: &SampleConfig, index: u64) -> Result<OzakiFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let sampler = BlaschkeSampler {
        max_zeros: cfg.blaschke_max_zeros,
    };
    let spec = sampler.sample(&mut rng);
    let w = schwarz_from_blaschke(&spec, cfg.order)?;
    Ok(build_member(cfg.class_label, &w, cfg.order)?)
}

pub fn sample_and_check(cfg: &SampleConfig) -> Result<SampleReport> {
    cfg.validate()?;
    let bounds = class_bounds(cfg.class_label);
    let tol = cfg.violation_tolerance;

    let mut acc = (0..cfg.count as u64)
        .into_par_iter()
        .fold(Accumulator::new, |acc, index| {
            let report = sample_member(cfg, index)
                .ok()
                .and_then(|m| full_report(&m).ok());
            acc.add(&bounds, tol, report.as_ref())
        })
        .reduce(Accumulator::new, Accumulator::merge);

    let mut injected = Vec::new();
    if cfg.include_extremals {
        for name in ExtremalName::of_class(cfg.class_label) {
            let report = full_report(&extremal_member(name, cfg.order)?)?;
            acc = acc.add(&bounds, tol, Some(&report));
            injected.push(name);
        }
    }
    Ok(finish(cfg, cfg.count, injected, acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_examples() {
        let v = eval_objective(ObjectiveId::UpsilonF, (2.0, 0.5)).unwrap();
        assert!((v - 95.0 / 256.0).abs() < 1e-15);
        let v = eval_objective(ObjectiveId::ChiF, (1.0, 0.0)).unwrap();
        assert!((v - 7.0 / 8.0).abs() < 1e-15);
        assert_eq!(
            eval_objective(ObjectiveId::DeltaG, (0.0, 1.0)).unwrap(),
            0.0
        );
        let v = eval_objective(ObjectiveId::NG, (0.0, 1.0)).unwrap();
        assert!((v + 1.0 / 144.0).abs() < 1e-16);
    }

    #[test]
    fn objective_rejects_points_outside_domain() {
        assert!(matches!(
            eval_objective(ObjectiveId::ChiF, (0.9, 0.5)),
            Err(VerifierError::PointOutsideDomain(..))
        ));
        assert!(eval_objective(ObjectiveId::PsiF, (2.1, 0.5)).is_err());
        assert!(eval_objective(ObjectiveId::PsiF, (1.0, -0.01)).is_err());
    }

    #[test]
    fn objective_names_round_trip() {
        for id in ObjectiveId::ALL {
            assert_eq!(id.name().parse::<ObjectiveId>().unwrap(), id);
        }
        assert!("Omega".parse::<ObjectiveId>().is_err());
    }

    #[test]
    fn grid_search_examples() {
        let r = grid_extremize(ObjectiveId::SG, Mode::Max, 400, 2).unwrap();
        assert!(r.gap < 1e-6, "{r:?}");
        assert_eq!(r.argpoint, (1.0, 0.0));
        let r = grid_extremize(ObjectiveId::PsiF, Mode::Min, 400, 2).unwrap();
        assert!(r.gap < 1e-6, "{r:?}");
        assert_eq!(r.argpoint, (0.0, 1.0));
    }

    #[test]
    fn grid_search_rejects_coarse_grids() {
        assert_eq!(
            grid_extremize(ObjectiveId::SG, Mode::Max, 99, 0).unwrap_err(),
            VerifierError::ResolutionTooLow(99)
        );
    }

    #[test]
    fn ledger_has_thirteen_entries() {
        let ledger = BoundLedger::standard();
        assert_eq!(ledger.entries.len(), 13);
        assert_eq!(ledger.for_class(ClassLabel::F).count(), 7);
        assert_eq!(ledger.for_class(ClassLabel::G).count(), 6);
        assert!(ledger.find(ClassLabel::F, Functional::AbsS4).is_none());
    }

    #[test]
    fn excess_is_signed() {
        let ledger = BoundLedger::standard();
        let t21 = ledger.find(ClassLabel::F, Functional::T21Log).unwrap();
        assert!(t21.excess(0.0) < 0.0);
        assert!((t21.excess(-0.0625 - 0.5) - 0.5).abs() < 1e-15);
        assert!(t21.excess(0.5) > 0.0);
    }

    #[test]
    fn extremal_checks_pass() {
        let checks = check_extremals().unwrap();
        assert_eq!(checks.len(), 13);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
        assert_eq!(check_extremals_for(Some(ClassLabel::G)).unwrap().len(), 6);
    }

    #[test]
    fn sampling_is_partition_independent() {
        let cfg = SampleConfig::new(ClassLabel::F, 300, 5);
        let a = sample_and_check(&cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_and_check(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn sample_config_validation() {
        let mut cfg = SampleConfig::new(ClassLabel::G, 0, 1);
        assert_eq!(
            sample_and_check(&cfg).unwrap_err(),
            VerifierError::EmptySample
        );
        cfg.count = 1;
        cfg.order = 6;
        assert_eq!(
            sample_and_check(&cfg).unwrap_err(),
            VerifierError::SampleOrderTooLow(6)
        );
    }
}
