use dynex_core::engine::{
    aq_set, delta_prime_exact, fit_two_piece_breakpoint, g_value, gamma_hat, mc_block_maxima, mc_theta_runs,
    mixing_diagnostic, theta_exact, theta_limit, ConditionCheckConfig, EstimateResult, RunsConfig, Status,
};
use dynex_core::{rat, rint, ExampleId, FrequencyVector, MapSpec, ObservableSpec, Rational, System};

const N18: u64 = 1 << 18;

fn tau(a: i64, b: i64) -> FrequencyVector {
    FrequencyVector::new(vec![rint(a), rint(b)]).unwrap()
}

fn tau_alpha(num: i64, den: i64) -> FrequencyVector {
    FrequencyVector::from_simplex(&[rat(num, den)]).unwrap()
}

fn exact(e: &EstimateResult) -> Rational {
    e.exact.clone().expect("exact value")
}

#[test]
fn gamma_hat_examples() {
    let g = gamma_hat(&ExampleId::CommonPoint.system(), &tau(1, 2), N18).unwrap();
    assert_eq!(exact(&g), rint(2));
    let g = gamma_hat(&ExampleId::DisjointPoints.system(), &tau(1, 2), N18).unwrap();
    assert_eq!(exact(&g), rint(3));
    let g = gamma_hat(&ExampleId::OverlapNonPeriodic.system(), &tau(1, 1), N18).unwrap();
    assert_eq!(exact(&g), rat(3, 2));
    let g = gamma_hat(&ExampleId::CatMap.system(), &tau(1, 1), 1000).unwrap();
    assert!((g.value - 2.0).abs() < 1e-12);
}

#[test]
fn aq_set_stabilizes() {
    let sys = ExampleId::LinkedNonPeriodic.system();
    let t = tau(1, 1);
    let a0 = aq_set(&sys, &t, N18, 0).unwrap();
    assert_eq!(a0.set, a0.exceedance);
    let a1 = aq_set(&sys, &t, N18, 1).unwrap();
    for q in 2..6 {
        assert_eq!(aq_set(&sys, &t, N18, q).unwrap().set, a1.set);
    }
    let sys = ExampleId::LinkedPeriodic.system();
    let t = tau(4, 1);
    let a2 = aq_set(&sys, &t, N18, 2).unwrap();
    assert_ne!(aq_set(&sys, &t, N18, 1).unwrap().set, a2.set);
    for q in 3..7 {
        assert_eq!(aq_set(&sys, &t, N18, q).unwrap().set, a2.set);
    }
}

#[test]
fn theta_examples() {
    let th = theta_exact(&ExampleId::LinkedPeriodic.system(), &tau(1, 1), N18, 2).unwrap();
    assert_eq!(exact(&th), rat(1, 2));
    let th = theta_exact(&ExampleId::LinkedNonPeriodic.system(), &tau(1, 1), N18, 1).unwrap();
    assert_eq!(exact(&th), rat(3, 4));
    for q in 0..4 {
        let th = theta_exact(&ExampleId::DisjointPoints.system(), &tau(2, 3), N18, q).unwrap();
        assert_eq!(exact(&th), rint(1));
    }
}

#[test]
fn measures_monotone_in_q() {
    for id in ExampleId::ALL.into_iter().filter(|e| e.is_circle() && e.dim() == 2) {
        let sys = id.system();
        let t = tau_alpha(7, 10);
        let mut prev = None;
        for q in 0..6 {
            let m = aq_set(&sys, &t, N18, q).unwrap().set.measure();
            if let Some(p) = &prev {
                assert!(m <= *p, "{id} q={q}");
            }
            prev = Some(m);
        }
    }
}

#[test]
fn theta_limit_reports_stabilization() {
    let qs: Vec<usize> = (0..=6).collect();
    let lim = theta_limit(
        &ExampleId::LinkedPeriodic.system(),
        &tau(4, 1),
        &qs,
        &[1 << 10, 1 << 14, 1 << 18],
    )
    .unwrap();
    assert_eq!(lim.stabilized_q, Some(2));
    assert_eq!(lim.estimate.status, Status::Ok);
    assert_eq!(exact(&lim.estimate), rat(3, 5));
    assert_eq!(lim.n0, Some(1 << 10));

    let lim = theta_limit(
        &ExampleId::OverlapNonPeriodic.system(),
        &tau(1, 1),
        &qs,
        &[1 << 10, 1 << 14],
    )
    .unwrap();
    assert_eq!(lim.stabilized_q, Some(1));
    assert_eq!(exact(&lim.estimate), rat(2, 3));

    // a period-1 point of the tripling map: constant ratio once inside the linear branch
    let sys = System::new(
        MapSpec::tripling(),
        vec![ObservableSpec::log_at(vec![rat(1, 2)]).unwrap()],
    )
    .unwrap();
    let one = FrequencyVector::new(vec![rint(1)]).unwrap();
    let lim = theta_limit(&sys, &one, &qs, &[4, 1 << 10, 1 << 14]).unwrap();
    assert_eq!(exact(&lim.estimate), rat(2, 3));
    assert_eq!(lim.n0, Some(1 << 10));

    // a schedule too short in q cannot confirm stabilization
    let lim = theta_limit(&ExampleId::LinkedPeriodic.system(), &tau(4, 1), &[0, 1], &[1 << 14]).unwrap();
    assert_eq!(lim.estimate.status, Status::NotStabilized);
    assert!(theta_limit(&sys, &one, &[1, 0], &[8]).is_err());
}

#[test]
fn homogeneity_and_bounds() {
    let sys = ExampleId::OverlapNonPeriodic.system();
    let t = FrequencyVector::new(vec![rat(2, 3), rat(5, 4)]).unwrap();
    let base_theta = exact(&theta_exact(&sys, &t, N18, 1).unwrap());
    let base_gamma = exact(&gamma_hat(&sys, &t, N18).unwrap());
    for c in [rat(1, 2), rint(2), rint(3)] {
        let ct = t.scaled(&c).unwrap();
        assert_eq!(exact(&theta_exact(&sys, &ct, N18, 1).unwrap()), base_theta);
        assert_eq!(exact(&gamma_hat(&sys, &ct, N18).unwrap()), &base_gamma * &c);
    }
    let (lo, hi) = (rat(5, 4), rat(2, 3) + rat(5, 4));
    assert!(lo <= base_gamma && base_gamma <= hi);
}

#[test]
fn marginal_recovery_matches_univariate_engine() {
    let sys = ExampleId::LinkedPeriodic2.system();
    let single = System::new(MapSpec::tripling(), vec![sys.observables[1].clone()]).unwrap();
    let one = FrequencyVector::new(vec![rint(1)]).unwrap();
    let uni = exact(&theta_exact(&single, &one, N18, 2).unwrap());
    let marg = exact(&theta_exact(&sys, &tau(0, 1), N18, 2).unwrap());
    assert_eq!(uni, marg);
    assert_eq!(marg, rat(2, 3));
}

#[test]
fn delta_prime_examples() {
    let n = 1u64 << 40;
    let cfg = ConditionCheckConfig::for_n(n);
    let d = delta_prime_exact(&ExampleId::DisjointPoints.system(), &tau(1, 1), n, 0, &cfg).unwrap();
    assert_eq!(exact(&d.estimate), rint(0));
    assert_eq!(d.j_last, 20);

    let sys = ExampleId::LinkedPeriodic.system();
    let d = delta_prime_exact(&sys, &tau(4, 1), n, 2, &cfg).unwrap();
    assert!(d.terms.iter().all(|t| *t == rint(0)));
    let d = delta_prime_exact(&sys, &tau_alpha(4, 5), n, 1, &cfg).unwrap();
    assert_eq!(exact(&d.estimate), rat(1, 10));
    // linear in the scale of tau
    let d = delta_prime_exact(&sys, &tau(4, 1), n, 1, &cfg).unwrap();
    assert_eq!(exact(&d.estimate), rat(1, 2));

    // full circle: every term is 1
    let small = 16u64;
    let full = FrequencyVector::new(vec![rint(16), rint(16)]).unwrap();
    let cfg = ConditionCheckConfig::for_n(small);
    let d = delta_prime_exact(&ExampleId::DisjointPoints.system(), &full, small, 0, &cfg).unwrap();
    assert_eq!(d.j_limit, 3);
    assert_eq!(exact(&d.estimate), rint(16 * 3));

    let tight = ConditionCheckConfig {
        budget: 5,
        ..ConditionCheckConfig::for_n(1 << 30)
    };
    let big = FrequencyVector::new(vec![rint(1 << 30), rint(1 << 30)]).unwrap();
    let d = delta_prime_exact(&ExampleId::DisjointPoints.system(), &big, 1 << 30, 0, &tight).unwrap();
    assert_eq!(d.estimate.status, Status::BudgetExceeded);
    assert_eq!(d.j_last, 5);
    assert_eq!(exact(&d.estimate), rint(5 << 30));
}

#[test]
fn block_maxima_matches_limit_law() {
    let sys = ExampleId::LinkedPeriodic.system();
    let est = mc_block_maxima(&sys, &tau(1, 1), 2000, 20_000, 11).unwrap();
    let target = (-1.0f64).exp();
    assert!(est.within(target, 3.0, 0.01), "{est:?}");
    let again = mc_block_maxima(&sys, &tau(1, 1), 2000, 20_000, 11).unwrap();
    assert_eq!(est, again);
    assert!(mc_block_maxima(&sys, &tau(1, 1), 2000, 0, 11).is_err());
}

#[test]
fn runs_estimator_matches_exact_ratio() {
    let sys = ExampleId::LinkedNonPeriodic.system();
    let t = tau(1, 1);
    let est = mc_theta_runs(&sys, &t, 1000, 1, RunsConfig::new(2_000_000), 5).unwrap();
    assert!(est.within(0.75, 3.0, 0.0), "{est:?}");

    let sys = ExampleId::OverlapPeriodic.system();
    let est = mc_theta_runs(&sys, &t, 1000, 2, RunsConfig::new(2_000_000), 5).unwrap();
    assert!(est.within(2.0 / 3.0, 3.0, 0.0), "{est:?}");

    let full = FrequencyVector::new(vec![rint(100), rint(100)]).unwrap();
    let est = mc_theta_runs(
        &ExampleId::DisjointPoints.system(),
        &full,
        100,
        1,
        RunsConfig::new(10_000),
        5,
    )
    .unwrap();
    assert_eq!(est.value, 0.0);

    let est = mc_theta_runs(
        &ExampleId::DisjointPoints.system(),
        &t,
        1 << 40,
        1,
        RunsConfig::new(1000),
        5,
    )
    .unwrap();
    assert_eq!(est.status, Status::Undefined);
}

#[test]
fn cat_map_runs_near_formula() {
    let sys = ExampleId::CatMap.system();
    let est = mc_theta_runs(&sys, &tau(1, 1), 1000, 2, RunsConfig::new(2_000_000), 3).unwrap();
    let lambda = (3.0 + 5f64.sqrt()) / 2.0;
    let target = 1.0 - (1.0 + 1.0 / lambda) / 4.0;
    assert!(est.within(target, 3.0, 0.01), "{est:?} vs {target}");
}

#[test]
fn g_value_examples() {
    let th = EstimateResult::exact(rat(1, 2), 0, 2);
    let gh = EstimateResult::exact(rint(2), 0, 0);
    assert!((g_value(&th, &gh).value - (-1.0f64).exp()).abs() < 1e-15);
    let one = EstimateResult::exact(rint(1), 0, 0);
    let sum = EstimateResult::exact(rint(3), 0, 0);
    assert!((g_value(&one, &sum).value - (-3.0f64).exp()).abs() < 1e-15);
    let noisy = EstimateResult::approx(0.5, 0.01, 0, 0);
    assert!(g_value(&noisy, &gh).stderr > 0.0);
}

#[test]
fn mixing_diagnostic_decays() {
    let sys = ExampleId::DisjointPoints.system();
    let d = mixing_diagnostic(&sys, &tau(1, 1), 200, 0, 400_000, 5, 9).unwrap();
    assert_eq!(d.label, "diagnostic only");
    assert!(d.autocorrelation.iter().all(|r| r.abs() < 0.05), "{d:?}");
}

#[test]
fn breakpoint_fit_recovers_kink_of_exact_curve() {
    let sys = ExampleId::LinkedNonPeriodic.system();
    let xs: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    let ys: Vec<f64> = (1..20)
        .map(|k| theta_exact(&sys, &tau_alpha(k, 20), N18, 1).unwrap().value)
        .collect();
    let b = fit_two_piece_breakpoint(&xs, &ys).unwrap();
    assert!((b.x - 1.0 / 3.0).abs() < 1e-9, "{b:?}");
}
