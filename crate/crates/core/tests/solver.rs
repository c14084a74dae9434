mod support;

use kpc_core::gen::SplitMix64;
use kpc_core::{
    evaluate, solve_bb, solve_bb_with, solve_oracle, BoundKind, Instance, KpcError, Limits,
    SolverOptions, Status,
};
use support::{oracle_suite, random_instance, six_items};

/// Exhaustive search over all 2^n subsets, written independently of the
/// library oracle.
fn enumerate_optimum(inst: &Instance) -> u64 {
    let n = inst.len();
    let mut best = 0;
    for mask in 0u64..(1 << n) {
        let chosen = (0..n).filter(|&i| mask >> i & 1 == 1);
        let sol = evaluate(inst, chosen).unwrap();
        if sol.feasible {
            best = best.max(sol.profit);
        }
    }
    best
}

const BOUNDS: [BoundKind; 3] = [
    BoundKind::Dantzig,
    BoundKind::CliqueRoot,
    BoundKind::CliqueDynamic,
];

#[test]
fn six_items_optimum() {
    let inst = six_items();
    for bound in BOUNDS {
        for warm_start in [false, true] {
            let opts = SolverOptions {
                bound,
                warm_start,
                ..Default::default()
            };
            let res = solve_bb_with(&inst, &opts).unwrap();
            assert_eq!(res.status, Status::Optimal);
            let best = res.best.unwrap();
            assert_eq!(
                (best.selected.as_slice(), best.profit, best.weight),
                (&[1, 3, 4, 5][..], 21, 19)
            );
            assert_eq!(res.upper_bound, 21);
            assert_eq!(res.gap_percent, 0.0);
        }
    }
    assert_eq!(solve_oracle(&inst).unwrap().profit(), 21);
}

#[test]
fn library_oracle_agrees_with_enumeration() {
    let mut rng = SplitMix64::new(21);
    for k in 0..200 {
        let inst = random_instance(&mut rng, 1 + k % 13, (k % 10) as u64, format!("e{k}"));
        let res = solve_oracle(&inst).unwrap();
        assert_eq!(res.status, Status::Optimal);
        assert_eq!(res.profit(), enumerate_optimum(&inst), "{}", inst.name());
        let best = res.best.unwrap();
        assert_eq!(
            evaluate(&inst, best.selected.iter().copied()).unwrap(),
            best
        );
        assert!(best.feasible);
    }
}

#[test]
fn branch_and_bound_matches_oracle() {
    for inst in oracle_suite() {
        let expected = solve_oracle(&inst).unwrap().profit();
        for bound in BOUNDS {
            for warm_start in [false, true] {
                let opts = SolverOptions {
                    bound,
                    warm_start,
                    ..Default::default()
                };
                let res = solve_bb_with(&inst, &opts).unwrap();
                assert_eq!(res.status, Status::Optimal, "{} {bound:?}", inst.name());
                assert_eq!(
                    res.profit(),
                    expected,
                    "{} {bound:?} warm={warm_start}",
                    inst.name()
                );
                assert_eq!(res.upper_bound, expected);
                let best = res.best.unwrap();
                assert!(best.feasible);
                assert_eq!(
                    evaluate(&inst, best.selected.iter().copied()).unwrap(),
                    best
                );
            }
        }
    }
}

#[test]
fn node_limited_runs_are_sound() {
    let suite = oracle_suite();
    for inst in suite.iter().step_by(5) {
        let opt = solve_oracle(inst).unwrap().profit();
        for limit in [1, 2, 3, 7, 30, 200] {
            for bound in BOUNDS {
                let opts = SolverOptions {
                    limits: Limits::nodes(limit),
                    bound,
                    warm_start: limit % 2 == 0,
                };
                let res = solve_bb_with(inst, &opts).unwrap();
                assert!(
                    res.nodes <= limit,
                    "{} used {} nodes",
                    inst.name(),
                    res.nodes
                );
                assert!(
                    res.profit() <= opt && opt <= res.upper_bound,
                    "{} {limit} {bound:?}",
                    inst.name()
                );
                if let Some(best) = &res.best {
                    assert!(best.feasible);
                }
                match res.status {
                    Status::Optimal => assert_eq!(res.profit(), opt),
                    Status::Feasible => {
                        assert!(res.gap_percent > 0.0 || res.upper_bound == res.profit())
                    }
                    other => panic!("unexpected status {other}"),
                }
                let expected_gap = if res.upper_bound == 0 {
                    0.0
                } else {
                    100.0 * (res.upper_bound - res.profit()) as f64 / res.upper_bound as f64
                };
                assert!((res.gap_percent - expected_gap).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn node_limited_runs_are_deterministic() {
    let mut rng = SplitMix64::new(22);
    for k in 0..40 {
        let inst = random_instance(&mut rng, 30 + k, 3, format!("det{k}"));
        let opts = SolverOptions::with_limits(Limits::nodes(50));
        let a = solve_bb_with(&inst, &opts).unwrap();
        let b = solve_bb_with(&inst, &opts).unwrap();
        assert_eq!(
            (a.status, &a.best, a.upper_bound, a.nodes),
            (b.status, &b.best, b.upper_bound, b.nodes)
        );
    }
}

#[test]
fn one_node_gap_is_consistent() {
    let mut rng = SplitMix64::new(23);
    for k in 0..100 {
        let inst = random_instance(&mut rng, 20 + k % 40, (k % 10) as u64, format!("g{k}"));
        let res = solve_bb(&inst, Limits::nodes(1)).unwrap();
        assert!(matches!(res.status, Status::Optimal | Status::Feasible));
        let lb = res.profit();
        let ub = res.upper_bound;
        assert!(lb <= ub);
        let expected = if ub == 0 {
            0.0
        } else {
            100.0 * (ub - lb) as f64 / ub as f64
        };
        assert!((res.gap_percent - expected).abs() <= 1e-9);
    }
}

#[test]
fn degenerate_instances() {
    let empty = Instance::empty();
    for res in [
        solve_bb(&empty, Limits::default()).unwrap(),
        solve_oracle(&empty).unwrap(),
    ] {
        assert_eq!(res.status, Status::Optimal);
        assert_eq!(
            (res.profit(), res.upper_bound, res.gap_percent),
            (0, 0, 0.0)
        );
    }
    // nothing fits
    let heavy = Instance::new("heavy", vec![5, 6], vec![10, 11], 9, vec![]).unwrap();
    let res = solve_bb(&heavy, Limits::default()).unwrap();
    assert_eq!(
        (res.status, res.profit(), res.upper_bound),
        (Status::Optimal, 0, 0)
    );
    // complete conflict graph: best single item
    let n = 12;
    let edges = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let clique = Instance::new("k12", (1..=n as u64).collect(), vec![1; n], 100, edges).unwrap();
    assert_eq!(solve_bb(&clique, Limits::default()).unwrap().profit(), 12);
    // zero capacity
    let zero = Instance::new("zero", vec![3], vec![1], 0, vec![]).unwrap();
    assert_eq!(solve_bb(&zero, Limits::default()).unwrap().profit(), 0);
}

#[test]
fn limits_are_validated() {
    assert!(matches!(
        Limits::time(-1.0),
        Err(KpcError::LimitsInvalid(_))
    ));
    assert!(matches!(
        Limits::time(f64::NAN),
        Err(KpcError::LimitsInvalid(_))
    ));
    assert!(solve_bb(&six_items(), Limits::nodes(0)).is_err());
}

#[test]
fn oracle_refuses_large_instances() {
    let mut rng = SplitMix64::new(24);
    let inst = random_instance(&mut rng, 31, 2, "big".into());
    assert!(matches!(
        solve_oracle(&inst),
        Err(KpcError::TooLargeForOracle(31))
    ));
}

#[test]
fn time_limited_run_reports_a_valid_bound() {
    // A loose instance that a short deadline cannot close.
    let mut rng = SplitMix64::new(25);
    let inst = random_instance(&mut rng, 400, 0, "loose".into());
    let opts = SolverOptions {
        limits: Limits::time(0.05).unwrap(),
        bound: BoundKind::Dantzig,
        warm_start: true,
    };
    let res = solve_bb_with(&inst, &opts).unwrap();
    assert!(res.profit() <= res.upper_bound);
    assert!(res.best.as_ref().unwrap().feasible);
    if res.status == Status::Feasible {
        assert!(res.wall_time < 5.0);
    }
}
