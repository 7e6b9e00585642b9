use hcn_sleep::analytic::{constraint_offloaded, outage_mbs_closed, outage_sc_closed};
use hcn_sleep::config::per_km2;
use hcn_sleep::geometry::{associate, repulsive_sleep_set, Point};
use hcn_sleep::linklayer::{interference_factor, rate, InterferenceFactor};
use hcn_sleep::{BandAllocation, NetworkConfig, QosSpec, Scheme, SleepPolicy};
use proptest::prelude::*;

fn table1_i() -> InterferenceFactor {
    InterferenceFactor::new(149_310.79).unwrap()
}

fn point() -> impl Strategy<Value = Point> {
    (-500.0..500.0f64, -500.0..500.0f64).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mbs_outage_monotone(
        w in 1e5..1e7f64, dw in 0.0..5e6f64,
        lm in 0.0..3e-5f64, dl in 0.0..1e-5f64,
        u in 0.0..2e5f64, du in 0.0..1e5f64,
    ) {
        let cfg = NetworkConfig::table1();
        let i = table1_i();
        let g = |w, lm, u| outage_mbs_closed(&cfg, i, lm, w, u).value;
        let base = g(w, lm, u);
        prop_assert!(g(w + dw, lm, u) <= base);
        prop_assert!(g(w, lm + dl, u) >= base);
        prop_assert!(g(w, lm, u + du) >= base);
    }

    #[test]
    fn sc_outage_depends_on_product_only(
        alpha in 2.1..4.0f64,
        ls in 0.0..5e-4f64,
        ws in 1e6..2e7f64,
        us in 0.0..2e5f64,
        k in 0.2..5.0f64,
    ) {
        let rho = per_km2(25.0);
        let a = outage_sc_closed(alpha, ls, rho, ws, us).unwrap().value;
        // Same (U/w)(1 + λ/ρ) with a rescaled rate and band.
        let b = outage_sc_closed(alpha, ls, rho, ws * k, us * k).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
        // Same product through the load term.
        let ratio = 1.0 + ls / rho;
        let ls2 = (ratio * k - 1.0).max(0.0) * rho;
        let us2 = us * ratio / (1.0 + ls2 / rho);
        let c = outage_sc_closed(alpha, ls2, rho, ws, us2).unwrap().value;
        prop_assert!((a - c).abs() < 1e-9);
    }

    #[test]
    fn sc_outage_monotone(alpha in 2.1..4.0f64, x in 0.0..3.0f64, dx in 0.0..1.0f64) {
        // x = (U_s/w_s)(1 + λ_s/ρ_s), expressed through U_s at λ_s = 0.
        let g = |x: f64| outage_sc_closed(alpha, 0.0, 1.0, 1.0, x).unwrap().value;
        prop_assert!(g(x + dx) >= g(x) - 1e-15);
    }

    #[test]
    fn offloaded_predicate_monotone(
        random in any::<bool>(),
        cb in any::<bool>(),
        param in 0.0..1.0f64, dparam in 0.0..0.3f64,
        ls in 0.0..4e-4f64, dls in 0.0..2e-4f64,
        uo in 1e3..3e5f64, duo in 0.0..1e5f64,
        w_m in 0.0..9e6f64, dw in 0.0..1e6f64,
        w_s in 0.0..1e7f64,
        p_m in 0.05..1.0f64,
    ) {
        let cfg = NetworkConfig::table1();
        let i = table1_i();
        let scheme = |v: f64| if random {
            Scheme::Random { p_s: v.min(1.0) }
        } else {
            Scheme::Repulsive { r_s: 450.0 * v }
        };
        let p_m = if cb { p_m } else { 1.0 };
        let holds = |v: f64, ls: f64, uo: f64, w_m: f64| {
            let mut qos = QosSpec::table1();
            qos.u_o = uo;
            let policy = SleepPolicy::new(scheme(v), cb, p_m).unwrap();
            let bands = BandAllocation::new(&cfg, w_m.min(cfg.w_m), w_s, cb).unwrap();
            constraint_offloaded(&policy, ls, &bands, &cfg, i, &qos).unwrap().holds()
        };
        if !holds(param, ls, uo, w_m) {
            prop_assert!(!holds(param, ls + dls, uo, w_m));
            prop_assert!(!holds(param, ls, uo + duo, w_m));
            prop_assert!(!holds(param, ls, uo, w_m + dw));
            // For the repulsive scheme a larger radius also lowers the edge SINR.
            prop_assert!(!holds(param + dparam, ls, uo, w_m));
        }
    }

    #[test]
    fn repulsive_set_monotone_in_radius(
        pts in proptest::collection::vec(point(), 0..60),
        r1 in 0.0..600.0f64, dr in 0.0..300.0f64,
    ) {
        let mbs = hcn_sleep::geometry::hex_lattice(500.0, 1);
        let a = repulsive_sleep_set(&pts, &mbs, r1);
        let b = repulsive_sleep_set(&pts, &mbs, r1 + dr);
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn association_idempotent_and_permutation_invariant(
        anchors in proptest::collection::vec(point(), 1..8),
        pts in proptest::collection::vec(point(), 0..40),
        shift in 0usize..8,
    ) {
        let a = associate(&pts, &anchors).unwrap();
        // Each point sits at least as close to its anchor as to any other.
        for (p, &k) in pts.iter().zip(&a) {
            for q in &anchors {
                prop_assert!(p.dist2(anchors[k]) <= p.dist2(*q));
            }
        }
        // Re-associating the anchors' own positions is the identity up to duplicates.
        let own = associate(&anchors, &anchors).unwrap();
        for (k, &j) in own.iter().enumerate() {
            prop_assert_eq!(anchors[k], anchors[j]);
        }
        let n = anchors.len();
        let rotated: Vec<Point> = (0..n).map(|k| anchors[(k + shift) % n]).collect();
        let b = associate(&pts, &rotated).unwrap();
        for (p, (&i, &j)) in pts.iter().zip(a.iter().zip(&b)) {
            prop_assert_eq!(p.dist2(anchors[i]), p.dist2(rotated[j]));
        }
    }

    #[test]
    fn rate_monotone(w in 0.0..2e7f64, dw in 0.0..1e6f64, n in 0u64..50, s in 0.0..100.0f64, ds in 0.0..10.0f64) {
        let r = rate(w, n, s);
        prop_assert!(rate(w + dw, n, s) >= r);
        prop_assert!(rate(w, n, s + ds) >= r);
        prop_assert!(rate(w, n + 1, s) <= r);
    }
}

#[test]
fn frozen_interference_matches_library() {
    let i = interference_factor(&NetworkConfig::table1()).value();
    assert!((i / table1_i().value() - 1.0).abs() < 1e-4);
}
