use ftscale::shor::{energy_bill, min_photon_budget, optimize_photon_budget, PhotonBudget, ShorProblem};
use ftscale::FtScheme;
use proptest::prelude::*;

fn budget(r: u64) -> (f64, u32) {
    match min_photon_budget(&ShorProblem::new(r).unwrap(), &FtScheme::aliferis2006()).unwrap() {
        PhotonBudget::Feasible { n_l, k, .. } => (n_l, k),
        other => panic!("R={r}: {other:?}"),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn minimum_budget_is_tight() {
    let s = FtScheme::aliferis2006();
    for r in [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000] {
        let problem = ShorProblem::new(r).unwrap();
        let target = ftscale::shor::target_logical_error(&problem).log10();
        let (n_l, _) = budget(r);
        let at = optimize_photon_budget(&problem, n_l, &s).unwrap();
        assert!(at.log10_p_min.log10() <= target, "R={r}");
        let below = optimize_photon_budget(&problem, n_l * 0.5, &s).unwrap();
        assert!(below.log10_p_min.log10() > target, "R={r}");
        let just_below = optimize_photon_budget(&problem, n_l / 1.0101, &s).unwrap();
        assert!(just_below.log10_p_min.log10() > target, "R={r}: bisection left slack");
    }
}

#[test]
fn levels_step_up_with_key_length() {
    let ks: Vec<u32> = [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000].iter().map(|&r| budget(r).1).collect();
    assert!(ks.windows(2).all(|w| w[0] <= w[1]), "{ks:?}");
    assert!(ks[4] > ks[0]);
}

#[test]
fn more_photons_never_hurt() {
    let s = FtScheme::aliferis2006();
    for r in [1_000u64, 100_000, 10_000_000] {
        let problem = ShorProblem::new(r).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=120 {
            let n_l = 10f64.powf(f64::from(i) * 0.25);
            let p = optimize_photon_budget(&problem, n_l, &s).unwrap().log10_p_min.log10();
            assert!(p <= prev, "R={r}, n_L={n_l:e}");
            prev = p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bill_identities(
        r in 2u64..100_000_000,
        log10_n in 0.0f64..20.0,
        k in 0u32..6,
        gamma in 0.1f64..1e3,
        omega0 in 1e6f64..1e12,
        a in 1u64..1000,
        m in 1u64..20,
    ) {
        let s = FtScheme::new(a, 291, 10_000, 291, m).unwrap();
        let problem = ShorProblem::new(r).unwrap();
        let n_l = 10f64.powf(log10_n);
        let bill = energy_bill(&problem, n_l, k, gamma, omega0, &s).unwrap();
        prop_assert!(rel(bill.n_g, n_l / (a as f64).powi(k as i32)) <= 1e-12);
        prop_assert!(rel(bill.tau_l, (m as f64).powi(k as i32) * bill.tau_g) <= 1e-12);
        prop_assert!(rel(bill.t_tot, problem.l * bill.tau_l) <= 1e-12);
        prop_assert!(rel(bill.p_avg * bill.t_tot, bill.e_tot) <= 1e-12);
        if k == 0 {
            prop_assert_eq!(bill.tau_l, bill.tau_g);
        }
    }
}
