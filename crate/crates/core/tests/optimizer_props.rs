use hcn_sleep::analytic::{constraint_offloaded, constraint_sc, outage_mbs_simplified_ok};
use hcn_sleep::optimizer::{
    best_scheme, random_cb_closed_form, random_cb_gain, repulsive_radius_cap, repulsive_upper_bound, solve_random_cb,
    solve_random_no_cb, solve_repulsive, Problem, SolveResult,
};
use hcn_sleep::{BandAllocation, LoadState, NetworkConfig, QosSpec, Scheme, SleepPolicy};

fn problem(lm: f64, ls: f64) -> Problem {
    Problem::new(NetworkConfig::table1(), LoadState::per_km2(lm, ls), QosSpec::table1())
}

/// Largest `p_s` accepted by the analytic predicates, found by plain bisection.
fn bisect_random_no_cb(p: &Problem) -> f64 {
    let w_m = p.mbs_band();
    let bands = BandAllocation::new(&p.cfg, w_m, 0.0, false).unwrap();
    let ok = |x: f64| {
        let policy = SleepPolicy::without_cb(Scheme::Random { p_s: x });
        constraint_offloaded(&policy, p.load.lambda_s, &bands, &p.cfg, p.i, &p.qos)
            .unwrap()
            .holds()
    };
    if ok(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid
        } else {
            hi = mid
        }
    }
    lo
}

/// Whether some band split makes both offloaded constraints hold.
fn offloaded_ok_any_split(p: &Problem, scheme: Scheme, cb: bool, bands: &BandAllocation) -> bool {
    let splits: Vec<f64> = if cb { (1..=2000).map(|k| k as f64 / 2000.0).collect() } else { vec![1.0] };
    splits.iter().any(|&p_m| {
        let policy = SleepPolicy::new(scheme, cb, p_m).unwrap();
        constraint_offloaded(&policy, p.load.lambda_s, bands, &p.cfg, p.i, &p.qos)
            .unwrap()
            .holds()
    })
}

fn check_solution(p: &Problem, r: &SolveResult) {
    assert!((0.0..=1.0).contains(&r.sleeping_ratio));
    if !r.is_feasible() {
        return;
    }
    assert!(outage_mbs_simplified_ok(&p.cfg, p.i, p.load.lambda_m, r.bands.w_m, &p.qos));
    if !r.sc_layer_overloaded {
        assert!(constraint_sc(
            &r.scheme,
            p.cfg.alpha_s,
            p.load.lambda_s,
            p.cfg.rho_s,
            r.bands.w_s,
            &p.qos,
            p.opts.p_hat_s
        )
        .unwrap());
    }
    let policy = SleepPolicy::new(r.scheme, r.cb, r.p_m).unwrap();
    assert!(constraint_offloaded(&policy, p.load.lambda_s, &r.bands, &p.cfg, p.i, &p.qos)
        .unwrap()
        .holds());
    // Nudging the policy parameter up must break a constraint or hit a cap.
    let nudged = match r.scheme {
        Scheme::Random { p_s } if p_s + 1e-4 <= 1.0 => Some(Scheme::Random { p_s: p_s + 1e-4 }),
        Scheme::Repulsive { r_s } if !r.clamped => Some(Scheme::Repulsive { r_s: r_s + 1e-4 }),
        _ => None,
    };
    if let Some(s) = nudged {
        let w_s = p.sc_band(&s).min(p.cfg.w_s);
        let bands = BandAllocation::new(&p.cfg, r.bands.w_m, w_s, r.cb).unwrap();
        assert!(!offloaded_ok_any_split(p, s, r.cb, &bands), "{s:?} still feasible");
    } else {
        assert!(r.clamped || r.sleeping_ratio > 1.0 - 1e-4);
    }
}

#[test]
fn random_closed_form_matches_bisection_and_scales_inversely() {
    let mut products = Vec::new();
    for ls in [50.0, 100.0, 150.0, 200.0, 300.0, 400.0] {
        let p = problem(20.0, ls);
        let r = solve_random_no_cb(&p).unwrap();
        assert!(!r.clamped);
        assert!((r.sleeping_ratio - bisect_random_no_cb(&p)).abs() <= 1e-6);
        products.push(r.sleeping_ratio * p.load.lambda_s);
    }
    for w in products.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn random_optimum_is_linear_in_macro_load() {
    let v: Vec<f64> = [5.0, 10.0, 15.0]
        .iter()
        .map(|&lm| solve_random_no_cb(&problem(lm, 300.0)).unwrap().sleeping_ratio)
        .collect();
    assert!(v[0] > v[2]);
    assert!((v[0] - 2.0 * v[1] + v[2]).abs() < 1e-9);
}

#[test]
fn random_optimum_ignores_small_cell_density_and_favors_dense_macros() {
    for lm in [5.0, 10.0, 20.0] {
        for ls in [100.0, 200.0, 400.0] {
            let p = problem(lm, ls);
            let base = solve_random_no_cb(&p).unwrap().sleeping_ratio;
            for rho in [10.0, 50.0, 100.0] {
                let mut q = p;
                q.cfg.rho_s = hcn_sleep::config::per_km2(rho);
                assert_eq!(solve_random_no_cb(&q).unwrap().sleeping_ratio, base);
            }
            let dense = Problem::new(p.cfg.with_radius(400.0), p.load, p.qos);
            assert!(solve_random_no_cb(&dense).unwrap().sleeping_ratio >= base);
        }
    }
}

#[test]
fn repulsive_decays_slower_than_random() {
    let slope = |f: &dyn Fn(f64) -> f64| (f(400.0) / f(100.0)).ln() / 4f64.ln();
    let random = slope(&|ls| solve_random_no_cb(&problem(20.0, ls)).unwrap().sleeping_ratio);
    let repulsive = slope(&|ls| solve_repulsive(&problem(20.0, ls), false).unwrap().sleeping_ratio);
    assert!((random + 1.0).abs() < 1e-9);
    assert!(repulsive > random, "{repulsive} vs {random}");
}

#[test]
fn solutions_satisfy_all_constraints_and_are_maximal() {
    for lm in [2.0, 10.0, 20.0] {
        for ls in [20.0, 100.0, 250.0, 400.0] {
            let p = problem(lm, ls);
            check_solution(&p, &solve_random_no_cb(&p).unwrap());
            check_solution(&p, &solve_random_cb(&p).unwrap());
            check_solution(&p, &solve_repulsive(&p, false).unwrap());
            check_solution(&p, &solve_repulsive(&p, true).unwrap());
        }
    }
}

#[test]
fn doubling_small_cell_load_shrinks_radius() {
    for ls in [25.0, 50.0, 100.0, 200.0] {
        let a = solve_repulsive(&problem(20.0, ls), false).unwrap().param();
        let b = solve_repulsive(&problem(20.0, 2.0 * ls), false).unwrap().param();
        assert!(b < a);
    }
}

#[test]
fn upper_bound_dominates_and_tightens_as_rate_shrinks() {
    let mut p = problem(20.0, 400.0);
    let cap = repulsive_radius_cap(p.cfg.d);
    let mut prev = 0.0;
    for u_o in [1e5, 3e4, 1e4, 3e3, 1e3, 1e2] {
        p.qos.u_o = u_o;
        let r = solve_repulsive(&p, false).unwrap();
        let bound = repulsive_upper_bound(&p, false);
        assert!(bound >= r.param());
        // Past the cap the solver saturates while the bound keeps growing.
        let ratio = r.param() / bound.min(cap);
        assert!(ratio >= prev, "ratio {ratio} after {prev}");
        prev = ratio;
    }
}

#[test]
fn cb_gain_identity_with_equal_exponents() {
    let mut cfg = NetworkConfig::table1();
    cfg.alpha_s = cfg.alpha_m;
    for ls in [100.0, 200.0, 400.0] {
        let p = Problem::new(cfg, LoadState::per_km2(20.0, ls), QosSpec::table1());
        let no_cb = solve_random_no_cb(&p).unwrap();
        assert!(!no_cb.clamped);
        let unclamped_no_cb = no_cb.sleeping_ratio;
        let gain = random_cb_gain(&p);
        assert!((random_cb_closed_form(&p) - unclamped_no_cb - gain).abs() < 1e-9);
        // Inversely proportional to λ_s at a fixed spare SC band.
        let w_s = p.sc_band(&Scheme::Random { p_s: p.opts.p_hat_s });
        let p2 = Problem::new(cfg, LoadState::per_km2(20.0, 2.0 * ls), QosSpec::table1());
        let w_s2 = p2.sc_band(&Scheme::Random { p_s: p.opts.p_hat_s });
        let per_spare = |g: f64, spare: f64| g / spare;
        assert!(
            (per_spare(random_cb_gain(&p2), cfg.w_s - w_s2) * 2.0 / per_spare(gain, cfg.w_s - w_s) - 1.0).abs()
                < 1e-12
        );
        // Linear in the spare SC band.
        let mut wider = p;
        wider.cfg.w_s += 1e6;
        let per_hz = gain / (p.cfg.w_s - w_s);
        assert!((random_cb_gain(&wider) - per_hz * (wider.cfg.w_s - w_s)).abs() < 1e-12);
    }
}

#[test]
fn best_scheme_falls_back_when_one_is_infeasible() {
    let mut p = problem(20.0, 100.0);
    // No spare macro band at D: random is infeasible, a tiny radius is not.
    p.qos.u_o = 1e9;
    let random = solve_random_no_cb(&p).unwrap();
    let rep = solve_repulsive(&p, false).unwrap();
    assert!(!random.is_feasible() && rep.is_feasible());
    assert_eq!(best_scheme(&p, false).unwrap().scheme, rep.scheme);
}
