use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ozaki_core::classes::{
    boundary_real_part_range, build_member, libera_expand, schwarz_from_blaschke,
    validate_schwarz_prefix, BlaschkeSampler, ClassLabel, LiberaParams,
};
use ozaki_core::functionals::{
    log_coeffs, log_coeffs_series, log_inverse_coeffs, log_inverse_coeffs_series, report_for,
    CoeffTriple,
};
use ozaki_core::series::{
    antiderivative, compose, compositional_inverse, derivative, div, exp_series, log_series, mul,
    NormalizedFunction, TruncatedSeries,
};
use ozaki_core::verifier::{
    eval_objective, grid_extremize, sample_member, Mode, ObjectiveId, SampleConfig,
};

fn disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(move |(r, t)| Complex64::from_polar(radius * r.sqrt(), t))
}

fn series(len: std::ops::Range<usize>, radius: f64) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(disk(radius), len).prop_map(|c| TruncatedSeries::new(c).unwrap())
}

fn normalized(order: std::ops::Range<usize>) -> impl Strategy<Value = NormalizedFunction> {
    prop::collection::vec(disk(1.0), order).prop_map(|tail| {
        let mut c = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        c.extend(tail);
        NormalizedFunction::new(TruncatedSeries::new(c).unwrap()).unwrap()
    })
}

fn with_constant(s: TruncatedSeries, c0: Complex64) -> TruncatedSeries {
    let mut c = s.into_coeffs();
    c[0] = c0;
    TruncatedSeries::new(c).unwrap()
}

fn scale_of(s: &TruncatedSeries) -> f64 {
    s.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max)
}

fn class() -> impl Strategy<Value = ClassLabel> {
    prop_oneof![Just(ClassLabel::F), Just(ClassLabel::G)]
}

fn sampled_function(class: ClassLabel, seed: u64) -> NormalizedFunction {
    let cfg = SampleConfig::new(class, 1, seed);
    sample_member(&cfg, 0).unwrap().f
}

fn rotate(f: &NormalizedFunction, theta: f64) -> NormalizedFunction {
    let c = f
        .series()
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| {
            if n == 0 {
                *a
            } else {
                a * Complex64::from_polar(1.0, (n as f64 - 1.0) * theta)
            }
        })
        .collect();
    NormalizedFunction::new(TruncatedSeries::new(c).unwrap()).unwrap()
}

/// Plain substitution: `Σ a_k g^k` with powers built by repeated products.
fn naive_compose(outer: &TruncatedSeries, inner: &TruncatedSeries) -> TruncatedSeries {
    let n = outer.order().min(inner.order());
    let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut power = TruncatedSeries::one(n);
    for k in 0..=n {
        for (slot, c) in acc.iter_mut().zip(power.coeffs()) {
            *slot += outer.coeff(k) * c;
        }
        power = mul(&power, &inner.truncate(n));
    }
    TruncatedSeries::new(acc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_composes_to_identity(f in normalized(2..11)) {
        let inv = compositional_inverse(&f);
        let left = compose(f.series(), inv.series()).unwrap();
        let right = compose(inv.series(), f.series()).unwrap();
        let id = TruncatedSeries::identity(f.order());
        let tol = 1e-12 * scale_of(inv.series()).powi(2);
        prop_assert!(left.max_abs_diff(&id) <= tol);
        prop_assert!(right.max_abs_diff(&id) <= tol);
    }

    #[test]
    fn mul_then_div_round_trips(s in series(1..12, 1.0), t in series(1..12, 0.5), phase in 0.0..6.3f64) {
        let t = with_constant(t, Complex64::from_polar(1.0, phase));
        let q = div(&mul(&s, &t), &t).unwrap();
        let n = s.order().min(t.order());
        prop_assert_eq!(q.order(), n);
        prop_assert!(q.max_abs_diff(&s.truncate(n)) <= 1e-12);
    }

    #[test]
    fn exp_inverts_log(s in series(1..12, 1.0)) {
        let s = with_constant(s, Complex64::new(1.0, 0.0));
        let back = exp_series(&log_series(&s).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-12);
    }

    #[test]
    fn derivative_inverts_antiderivative(s in series(1..16, 3.0)) {
        let back = derivative(&antiderivative(&s)).unwrap();
        prop_assert!(back.max_abs_diff(&s) <= 1e-15 * scale_of(&s));
    }

    #[test]
    fn compose_matches_naive_substitution(outer in series(1..10, 1.0), inner in series(1..10, 1.0)) {
        let inner = with_constant(inner, Complex64::new(0.0, 0.0));
        let fast = compose(&outer, &inner).unwrap();
        prop_assert!(fast.max_abs_diff(&naive_compose(&outer, &inner)) <= 1e-12);
    }

    #[test]
    fn blaschke_samples_are_schwarz(seed in any::<u64>(), max_zeros in 0usize..5, order in 3usize..12) {
        let sampler = BlaschkeSampler { max_zeros };
        let spec = sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed));
        let w = schwarz_from_blaschke(&spec, order).unwrap();
        prop_assert!(validate_schwarz_prefix(&w));
    }

    #[test]
    fn libera_coefficients_stay_in_range(p1 in 0.0..=2.0f64, xi in disk(1.0), eta in disk(1.0), gamma in disk(1.0)) {
        let p = libera_expand(&LiberaParams::new(p1, xi, eta, gamma).unwrap()).unwrap();
        prop_assert!((p.p(1).re - p1).abs() <= 1e-15 && p.p(1).im == 0.0);
        prop_assert!(p.p(2).norm() <= 2.0 + 1e-12);
        prop_assert!(p.p(3).norm() <= 2.0 + 1e-12);
    }

    #[test]
    fn rotation_preserves_moduli(class in class(), seed in any::<u64>(), theta in 0.0..6.3f64) {
        let f = sampled_function(class, seed);
        let a = report_for(&f).unwrap();
        let b = report_for(&rotate(&f, theta)).unwrap();
        for (x, y) in [(a.Gamma2, b.Gamma2), (a.Gamma3, b.Gamma3), (a.S3, b.S3), (a.S4, b.S4)] {
            prop_assert!((x.norm() - y.norm()).abs() <= 1e-12 * x.norm().max(1.0));
        }
        prop_assert!((a.T21_log - b.T21_log).abs() <= 1e-12);
    }

    #[test]
    fn inverse_log_coefficient_negates(class in class(), seed in any::<u64>()) {
        let r = report_for(&sampled_function(class, seed)).unwrap();
        prop_assert!((r.Gamma1 + r.gamma1).norm() <= 1e-15);
    }

    #[test]
    fn closed_forms_match_series(class in class(), seed in any::<u64>()) {
        let f = sampled_function(class, seed);
        let t = CoeffTriple::from_function(&f).unwrap();
        let (g1, g2) = log_coeffs(&t);
        let gs = log_coeffs_series(&f);
        prop_assert!((g1 - gs[0]).norm() <= 1e-13 && (g2 - gs[1]).norm() <= 1e-13);
        let (h1, h2, h3) = log_inverse_coeffs(&t);
        let hs = log_inverse_coeffs_series(&f);
        for (x, y) in [(h1, hs[0]), (h2, hs[1]), (h3, hs[2])] {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn objectives_match_reference(id_index in 0usize..8, a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let id = ObjectiveId::ALL[id_index];
        let (u, v) = match id {
            ObjectiveId::UpsilonF | ObjectiveId::PsiF | ObjectiveId::PhiG | ObjectiveId::NG => (2.0 * a, b),
            _ => (a, b * (1.0 - a * a)),
        };
        let got = eval_objective(id, (u, v)).unwrap();
        let want = reference_objective(id, u, v);
        prop_assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn refinement_never_worsens(id_index in 0usize..8, resolution in 100usize..160) {
        let id = ObjectiveId::ALL[id_index];
        let mut last = None;
        for k in 0..3 {
            let v = grid_extremize(id, id.mode(), resolution, k).unwrap().value;
            if let Some(prev) = last {
                match id.mode() {
                    Mode::Max => prop_assert!(v >= prev),
                    Mode::Min => prop_assert!(v <= prev),
                }
            }
            last = Some(v);
        }
    }

    #[test]
    fn sampled_members_satisfy_boundary_condition(class in class(), seed in any::<u64>()) {
        let mut cfg = SampleConfig::new(class, 1, seed);
        cfg.order = 200;
        let f = sample_member(&cfg, 0).unwrap().f;
        let (lo, hi) = boundary_real_part_range(&f, 0.95, 720);
        match class {
            ClassLabel::F => prop_assert!(lo > -0.5 - 1e-9, "min {}", lo),
            ClassLabel::G => prop_assert!(hi < 1.5 + 1e-9, "max {}", hi),
        }
    }
}

fn reference_objective(id: ObjectiveId, u: f64, v: f64) -> f64 {
    let c3 = 1.0 - u * u - v * v / (1.0 + u);
    let t = 4.0 - u * u;
    match id {
        ObjectiveId::UpsilonF => {
            (-49.0 * u.powi(4) + 576.0 * u * u + 56.0 * u * u * t * v - 16.0 * t * t * v * v)
                / 4096.0
        }
        ObjectiveId::PsiF => {
            (-49.0 * u.powi(4) + 576.0 * u * u - 56.0 * u * u * t * v - 16.0 * t * t * v * v)
                / 4096.0
        }
        ObjectiveId::PhiG => {
            (-9.0 * u.powi(4) + 576.0 * u * u + 24.0 * u * u * t * v - 16.0 * t * t * v * v)
                / 36864.0
        }
        ObjectiveId::NG => {
            (-9.0 * u.powi(4) + 576.0 * u * u - 24.0 * u * u * t * v - 16.0 * t * t * v * v)
                / 36864.0
        }
        ObjectiveId::ChiF => (42.0 * u.powi(3) + 33.0 * u * v + 6.0 * c3) / 48.0,
        ObjectiveId::MF => {
            (42.0 * u.powi(3) + 33.0 * u * v + 33.0 * u * u + 12.0 * v + 6.0 * c3) / 48.0
        }
        ObjectiveId::SG => (10.0 * u.powi(3) + 9.0 * u * v + 2.0 * c3) / 48.0,
        ObjectiveId::DeltaG => 6.0 * u.powi(3) + 7.0 * u * v + 2.0 * c3,
    }
}

/// On the edge `x = 1` the F Toeplitz kernel peaks at `p^2 = 464/121`,
/// strictly inside the rectangle, with value `45/121`.
#[test]
fn upsilon_edge_maximum_is_interior() {
    let p = (464.0f64 / 121.0).sqrt();
    let peak = eval_objective(ObjectiveId::UpsilonF, (p, 1.0)).unwrap();
    assert!((peak - 45.0 / 121.0).abs() < 1e-15);
    assert!(peak > eval_objective(ObjectiveId::UpsilonF, (2.0, 1.0)).unwrap());
    let grid = grid_extremize(ObjectiveId::UpsilonF, Mode::Max, 400, 3).unwrap();
    assert!((grid.value - 45.0 / 121.0).abs() < 1e-9);
    assert!((grid.argpoint.0 - p).abs() < 1e-3 && grid.argpoint.1 == 1.0);
}

/// A Carathéodory function with `p_k = 2 cos kθ` yields a member of F whose
/// Toeplitz determinant reaches the kernel peak.
#[test]
fn two_point_measure_member_reaches_upsilon_peak() {
    use ozaki_core::classes::{coeffs_from_caratheodory_direct, CaratheodoryCoeffs};
    use ozaki_core::functionals::toeplitz_t21_log;
    let theta = ((464.0f64 / 121.0).sqrt() / 2.0).acos();
    let p = CaratheodoryCoeffs::new(
        (1..=3)
            .map(|k| Complex64::new(2.0 * (k as f64 * theta).cos(), 0.0))
            .collect(),
    )
    .unwrap();
    let t21 =
        toeplitz_t21_log(&coeffs_from_caratheodory_direct(ClassLabel::F, &p).unwrap()).unwrap();
    assert!((t21 - 45.0 / 121.0).abs() < 1e-13);
}

#[test]
fn members_built_from_schwarz_agree_with_report_cross_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let sampler = BlaschkeSampler::default();
    for class in ClassLabel::ALL {
        for _ in 0..200 {
            let w = schwarz_from_blaschke(&sampler.sample(&mut rng), 10).unwrap();
            let member = build_member(class, &w, 10).unwrap();
            report_for(&member.f).unwrap();
        }
    }
}
