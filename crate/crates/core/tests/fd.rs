use pucci_core::asym::bracket_field;
use pucci_core::fd::{
    discrete_pucci, solve_elliptic, solve_parabolic, EllipticOptions, GridConfig, NodeKind, ParabolicOptions,
    ScalarField, Window,
};
use pucci_core::geometry::{Domain, Shape};
use pucci_core::{PucciParams, Sign};

fn disk() -> Domain {
    Domain::new(Shape::ball(vec![0.0, 0.0], 1.0).unwrap())
}

fn params(big: f64) -> PucciParams {
    PucciParams::new(1.0, big, 2).unwrap()
}

fn elliptic(sign: Sign, eps: f64, p: &PucciParams, cfg: &GridConfig) -> ScalarField {
    let sol = solve_elliptic(&disk(), sign, eps, p, cfg, &EllipticOptions::default()).unwrap();
    assert!(sol.report.converged, "{:?}", sol.report);
    sol.field
}

fn interior_pairs<'a>(a: &'a ScalarField, b: &'a ScalarField) -> impl Iterator<Item = (f64, f64)> + 'a {
    assert_eq!(a.values.len(), b.values.len());
    a.interior().map(move |(n, _, v)| (v, b.values[n]))
}

#[test]
fn elliptic_values_lie_in_the_unit_interval() {
    let cfg = GridConfig::new(0.05);
    for sign in Sign::BOTH {
        let f = elliptic(sign, 0.2, &params(2.0), &cfg);
        assert!(f.interior().all(|(_, _, v)| v > 0.0 && v < 1.0));
    }
}

#[test]
fn minus_solution_lies_below_plus_solution() {
    let cfg = GridConfig::new(0.05);
    let p = params(3.0);
    let lo = elliptic(Sign::Minus, 0.2, &p, &cfg);
    let hi = elliptic(Sign::Plus, 0.2, &p, &cfg);
    let mut strict = 0;
    for (a, b) in interior_pairs(&lo, &hi) {
        assert!(a <= b + 1e-12, "{a} > {b}");
        strict += usize::from(a < b - 1e-6);
    }
    assert!(strict > 0);
}

#[test]
fn larger_epsilon_gives_larger_values() {
    let cfg = GridConfig::new(0.05);
    let p = params(2.0);
    for sign in Sign::BOTH {
        let small = elliptic(sign, 0.2, &p, &cfg);
        let large = elliptic(sign, 0.3, &p, &cfg);
        for (a, b) in interior_pairs(&small, &large) {
            assert!(a <= b + 1e-12);
        }
    }
}

#[test]
fn equal_ellipticity_makes_the_signs_agree() {
    let p = params(1.0);
    let mut cfg = GridConfig::new(0.05);
    cfg.stencil_radius = 1;
    cfg.directions = 1;
    let lo = elliptic(Sign::Minus, 0.2, &p, &cfg);
    let hi = elliptic(Sign::Plus, 0.2, &p, &cfg);
    for (a, b) in interior_pairs(&lo, &hi) {
        assert!((a - b).abs() <= 1e-9 * b, "{a} {b}");
    }
    // Wide frames pick a different Laplacian stencil per sign; the gap is consistency error.
    let gap = |h: f64| {
        let lo = elliptic(Sign::Minus, 0.2, &p, &GridConfig::new(h));
        let hi = elliptic(Sign::Plus, 0.2, &p, &GridConfig::new(h));
        interior_pairs(&lo, &hi).fold(0.0f64, |m, (a, b)| {
            assert!(a <= b + 1e-12);
            m.max(b - a)
        })
    };
    let (coarse, fine) = (gap(0.05), gap(0.025));
    assert!(fine < 0.6 * coarse, "{coarse} {fine}");
}

#[test]
fn converged_solution_has_small_discrete_residual() {
    let cfg = GridConfig::new(0.05);
    let p = params(2.0);
    let eps = 0.2;
    for sign in Sign::BOTH {
        let f = elliptic(sign, eps, &p, &cfg);
        let mut worst: f64 = 0.0;
        for (n, _, v) in f.interior() {
            let m = discrete_pucci(&f.grid, &f.values, n, sign, &p).unwrap();
            worst = worst.max((-eps * eps * m + v).abs());
        }
        assert!(worst < 1e-8, "{worst}");
    }
}

#[test]
fn windowed_solve_is_a_lower_bound() {
    let p = params(2.0);
    let full = elliptic(Sign::Minus, 0.2, &p, &GridConfig::new(0.05));
    let mut cfg = GridConfig::new(0.05);
    cfg.window = Some(Window {
        center: [0.8, 0.0],
        radius: 0.8,
    });
    let part = elliptic(Sign::Minus, 0.2, &p, &cfg);
    assert!(part.grid.kind.iter().any(|k| *k == NodeKind::Frozen));
    // The window crops the grid, so nodes are matched by position.
    for (_, x, v) in part.interior() {
        assert!(v <= full.sample(&x).unwrap() + 1e-12);
    }
    let near = part.sample(&[0.9, 0.0]).unwrap();
    let exact = full.sample(&[0.9, 0.0]).unwrap();
    assert!((near - exact).abs() < 1e-2 * exact);
}

#[test]
fn elliptic_fields_sit_between_the_barriers() {
    let p = params(2.0);
    for sign in Sign::BOTH {
        let f = elliptic(sign, 0.1, &p, &GridConfig::new(0.1 / 8.0));
        let r = bracket_field(&f, &disk(), 0.5).unwrap();
        assert!(r.bracketed(), "{r:?}");
    }
}

#[test]
fn coarse_grid_is_rejected() {
    let err = solve_elliptic(&disk(), Sign::Minus, 0.05, &params(2.0), &GridConfig::new(0.1), &EllipticOptions::default());
    assert!(err.is_err());
}

#[test]
fn parabolic_snapshots_grow_in_time() {
    let p = params(2.0);
    let opts = ParabolicOptions {
        times: vec![0.01, 0.02, 0.04],
        dt: None,
    };
    let cfg = GridConfig::new(0.05);
    let lo = solve_parabolic(&disk(), Sign::Minus, 0.04, &p, &cfg, &opts).unwrap();
    let hi = solve_parabolic(&disk(), Sign::Plus, 0.04, &p, &cfg, &opts).unwrap();
    assert_eq!(lo.times, vec![0.01, 0.02, 0.04]);
    for sol in [&lo, &hi] {
        for w in sol.snapshots.windows(2) {
            for (a, b) in interior_pairs(&w[0], &w[1]) {
                assert!((0.0..=1.0).contains(&a) && a <= b + 1e-14);
            }
        }
    }
    for (a, b) in lo.snapshots.iter().zip(&hi.snapshots) {
        for (x, y) in interior_pairs(a, b) {
            assert!(x <= y + 1e-14);
        }
    }
}

#[test]
fn oversized_time_step_is_rejected() {
    let opts = ParabolicOptions {
        times: vec![],
        dt: Some(1.0),
    };
    assert!(solve_parabolic(&disk(), Sign::Minus, 0.1, &params(2.0), &GridConfig::new(0.05), &opts).is_err());
}
