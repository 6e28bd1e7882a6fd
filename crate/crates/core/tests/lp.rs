use commlp::functions::{Family, TruthTable};
use commlp::lp::{
    apply_ambiguity_variant, build_lovasz_lp, build_paper_dual_certificate, build_search_lp, build_smooth_lp, cell,
    check_primal, solve_constraint_generation, solve_full_enumeration, verify_dual_certificate, LpInstance, LpStatus,
    SolveConfig, VerifyCaps, VerifyMode,
};
use commlp::scalar::rational_to_f64;
use commlp::{Rational, Scalar};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn random_table(n: usize, rng: &mut ChaCha8Rng) -> TruthTable {
    let bits: Vec<bool> = (0..1usize << (2 * n)).map(|_| rng.gen_bool(0.5)).collect();
    let size = 1usize << n;
    TruthTable::from_fn(n, |x, y| bits[x.index() * size + y.index()]).unwrap()
}

fn optimum<T: Scalar>(lp: &LpInstance<T>, full: bool) -> Option<T> {
    let cfg = SolveConfig::default();
    let r = if full {
        solve_full_enumeration(lp, &cfg).unwrap()
    } else {
        let tol = if T::EXACT { T::zero() } else { T::tolerance() };
        solve_constraint_generation(lp, tol, &cfg).unwrap()
    };
    r.optimum
}

/// Strong duality and primal feasibility of an exact solve.
fn certify_solution(lp: &LpInstance<Rational>) -> Rational {
    let r = solve_full_enumeration(lp, &SolveConfig::default()).unwrap();
    assert_eq!(r.status, LpStatus::Optimal);
    let opt = r.optimum.clone().unwrap();
    assert_eq!(r.dual_objective(lp), opt);
    let check = check_primal(lp, &r.weights, 0.0);
    assert!(check.feasible);
    assert_eq!(check.cost, opt);
    opt
}

#[test]
fn solvers_agree_on_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..12 {
        let n = if trial < 4 { 1 } else { 2 };
        let f = random_table(n, &mut rng);
        for eps in [Rational::zero(), q(1, 4)] {
            for lp in [build_lovasz_lp(&f, eps.clone()).unwrap(), build_smooth_lp(&f, eps.clone()).unwrap()] {
                let full = certify_solution(&lp);
                let cg = optimum(&lp, false).unwrap();
                assert_eq!(full, cg, "trial {trial} {}", lp.kind);
                let fl = build_lovasz_lp::<f64>(&f, rational_to_f64(&eps)).unwrap();
                let fl = if lp.kind == commlp::lp::LpKind::Smooth {
                    build_smooth_lp::<f64>(&f, rational_to_f64(&eps)).unwrap()
                } else {
                    fl
                };
                let fv = optimum(&fl, true).unwrap();
                assert!((fv - rational_to_f64(&full)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn smooth_dominates_lovasz_at_three_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tables = vec![
        TruthTable::family(Family::Ndisj, 3).unwrap(),
        TruthTable::family(Family::Eq, 3).unwrap(),
        TruthTable::family(Family::Ip, 3).unwrap(),
    ];
    tables.push(random_table(3, &mut rng));
    for f in &tables {
        let lov = build_lovasz_lp::<f64>(f, 0.0).unwrap();
        let smo = build_smooth_lp::<f64>(f, 0.0).unwrap();
        let (l, s) = (optimum(&lov, false).unwrap(), optimum(&smo, false).unwrap());
        assert!(s >= l - 1e-9, "smooth {s} < lovasz {l}");
    }
}

#[test]
fn ambiguity_never_raises_the_optimum() {
    for (n, k) in [(2, 1), (2, 2), (3, 1)] {
        let base = build_search_lp(n, k, Rational::one()).unwrap();
        let opt = optimum(&base, n == 2).unwrap();
        for rate in [q(0, 1), q(1, 2), q(1, 1), q(2, 1)] {
            let lp = apply_ambiguity_variant(&base, &rate, k).unwrap();
            let relaxed = optimum(&lp, n == 2).unwrap();
            assert!(relaxed <= opt, "n={n} k={k} rate={rate}");
        }
    }
}

#[test]
fn hand_cover_bounds_the_optimum() {
    // One singleton per target pair is feasible for the search LP.
    for (n, k) in [(2, 1), (3, 1), (3, 2)] {
        let lp = build_search_lp(n, k, Rational::one()).unwrap();
        let weights: Vec<_> = lp
            .constraints
            .iter()
            .filter(|c| c.lower.as_ref().is_some_and(|l| l.is_pos()))
            .map(|c| (cell(&c.pair), Rational::one()))
            .collect();
        let check = check_primal(&lp, &weights, 0.0);
        assert!(check.feasible);
        assert!(optimum(&lp, n == 2).unwrap() <= check.cost);
    }
}

#[test]
fn feasible_certificates_lower_bound_the_lp() {
    for (n, k, m) in [(2, 1, 1), (3, 1, 1)] {
        for beta in [q(0, 1), q(1, 4), q(1, 3), q(1, 2), q(2, 3), q(1, 1)] {
            let cert = build_paper_dual_certificate(n, k, m, &q(1, 1), &beta).unwrap();
            let report = verify_dual_certificate(&cert, VerifyMode::Oracle, &Rational::zero(), &VerifyCaps::default())
                .unwrap();
            if !report.feasible {
                continue;
            }
            if n + k <= 3 {
                let lp = build_search_lp(n + k, k, cert.sigma.clone()).unwrap();
                let opt = optimum(&lp, false).unwrap();
                assert!(cert.value() <= opt, "n={n} beta={beta}: {} > {opt}", cert.value());
            } else {
                // Exact pivoting gets slow at four bits; floats suffice here.
                let lp = build_search_lp::<f64>(n + k, k, rational_to_f64(&cert.sigma)).unwrap();
                let opt = optimum(&lp, false).unwrap();
                assert!(rational_to_f64(&cert.value()) <= opt + 1e-9);
            }
        }
    }
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lovasz_weak_duality(seed in any::<u64>(), eps_q in 0i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_table(2, &mut rng);
        let eps = q(eps_q, 10);
        let lp = build_lovasz_lp(&f, eps).unwrap();
        let opt = certify_solution(&lp);
        // Random nonnegative primal: scale a random cover until feasible.
        let cfg = SolveConfig::default();
        let r = solve_full_enumeration(&lp, &cfg).unwrap();
        let mut bumped = r.weights.clone();
        for (_, w) in bumped.iter_mut() {
            *w = w.clone() * q(rng.gen_range(10..=13), 10);
        }
        let check = check_primal(&lp, &bumped, 0.0);
        if check.feasible {
            prop_assert!(check.cost >= opt);
        }
    }
}
