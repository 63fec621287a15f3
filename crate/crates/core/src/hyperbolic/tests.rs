use super::*;
use crate::constructions::gen_hyperbolic;
use crate::search::random_partition;

fn h(z: &[f64]) -> HPoint {
    HPoint::from_spatial(z)
}

#[test]
fn lorentz_form_examples() {
    assert_eq!(lorentz_q(&[1.0, 0.0, 0.0]).unwrap(), -1.0);
    assert_eq!(lorentz_p(&[2.0, 1.0], &[3.0, 4.0]).unwrap(), -2.0);
    assert_eq!(lorentz_q(&[0.0, 1.0]).unwrap(), 1.0);
    assert!(lorentz_p(&[1.0, 0.0], &[1.0, 0.0, 0.0]).is_err());
}

#[test]
fn hpoint_validation() {
    assert!(HPoint::new(vec![1.0, 0.0]).is_ok());
    assert!(HPoint::new(vec![-1.0, 0.0]).is_err());
    assert!(HPoint::new(vec![2.0, 0.0]).is_err());
    let t: f64 = 0.7;
    assert!(HPoint::new(vec![t.cosh(), t.sinh()]).is_ok());
    let b = HPoint::base(3);
    assert_eq!(b.coords(), &[1.0, 0.0, 0.0, 0.0]);
}

#[test]
fn hdist_examples() {
    let base = HPoint::base(1);
    assert_eq!(hdist(&base, &base).unwrap(), 0.0);
    for &t in &[1e-8, 0.3, 1.0, 5.0] {
        let x = HPoint::new(vec![f64::cosh(t), f64::sinh(t)]).unwrap();
        let d = hdist(&base, &x).unwrap();
        assert!((d - t).abs() <= 1e-12 * t.max(1.0), "t = {t}, d = {d}");
    }
}

#[test]
fn lift_examples() {
    let z = Point::new(vec![0.0, 0.0]).unwrap();
    assert_eq!(lift(&z).coords(), &[1.0, 0.0, 0.0]);
    let z = Point::new(vec![3.0, 4.0]).unwrap();
    let w = lift(&z);
    assert!((w.x0() - 26f64.sqrt()).abs() < 1e-15);
    assert!((lorentz_q(w.coords()).unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(w.chart(), z);
}

#[test]
fn pairing_examples() {
    let a = [h(&[0.0]), h(&[1.0])];
    let expected = 2.0 * lp(a[0].coords(), a[1].coords());
    assert!((pairing(&a, &a).unwrap() - expected).abs() < 1e-15);
    let single = [HPoint::base(2)];
    assert_eq!(pairing(&single, &single).unwrap(), 0.0);
    assert!(pairing(&a, &single).is_err());
}

#[test]
fn ball_of_two_points_is_the_geodesic_ball() {
    for &t in &[0.2, 1.0, 3.0] {
        let x = HPoint::new(vec![f64::cosh(t), f64::sinh(t)]).unwrap();
        let y = HPoint::new(vec![f64::cosh(t), -f64::sinh(t)]).unwrap();
        let ball = hyper_ball(&[x, y]).unwrap();
        assert!((ball.center.coords()[0] - 1.0).abs() < 1e-12);
        assert!(ball.center.coords()[1].abs() < 1e-12);
        assert!((ball.radius - t).abs() < 1e-9 * t.max(1.0), "t = {t}, radius = {}", ball.radius);
    }
}

#[test]
fn ball_needs_two_points() {
    assert!(hyper_ball(&[HPoint::base(2)]).is_err());
}

#[test]
fn threshold_and_distance_membership_agree() {
    let cfg = gen_hyperbolic(3, 4, 2, 1.0, 11).unwrap();
    let parts = cfg.parts_of(&random_partition(3, 4, 5)).unwrap();
    let probes = gen_hyperbolic(2, 50, 2, 1.5, 12).unwrap();
    for part in &parts {
        let ball = hyper_ball(part).unwrap();
        for z in probes.colors().iter().flatten() {
            let by_sum = ball.defining_sum(z) <= 0.0;
            let by_threshold = ball.contains_by_threshold(z);
            let d = hdist(z, &ball.center).unwrap();
            if (d - ball.radius).abs() > 1e-9 {
                assert_eq!(by_threshold, d <= ball.radius);
                assert_eq!(by_sum, by_threshold);
            }
            assert_eq!(ball.contains_by_distance(z, 1e-9), d <= ball.radius + 1e-9);
        }
    }
}

#[test]
fn local_search_k2_matches_exhaustive() {
    for seed in 0..10 {
        let cfg = gen_hyperbolic(2, 3, 2, 1.0, seed).unwrap();
        let mut best = f64::INFINITY;
        for a in 0..2usize {
            for b in 0..2usize {
                let assignment = vec![vec![0, 1], vec![a, 1 - a], vec![b, 1 - b]];
                let p = TransversalPartition::new(assignment).unwrap();
                best = best.min(objective(&cfg, &p).unwrap());
            }
        }
        // for k = 2 every swap improvement reaches the other partition, so
        // local optima are global
        let rep = local_search_hyper(&cfg, &TransversalPartition::identity(2, 3), default_eps(&cfg)).unwrap();
        assert!((rep.objective - best).abs() <= 1e-9 * best.abs().max(1.0), "seed {seed}");
    }
}

#[test]
fn locally_optimal_pairs_satisfy_inequality() {
    for seed in 0..5 {
        let cfg = gen_hyperbolic(4, 3, 2, 1.0, 100 + seed).unwrap();
        let eps = default_eps(&cfg);
        let rep = local_search_hyper(&cfg, &random_partition(4, 3, seed), eps).unwrap();
        let parts = cfg.parts_of(&rep.partition).unwrap();
        for i in 0..parts.len() {
            for j in (i + 1)..parts.len() {
                let v = pair_inequality(&parts[i], &parts[j]).unwrap();
                assert!(v <= 3.0 * eps / 2.0 + 1e-9, "seed {seed}: ({i},{j}) = {v}");
            }
        }
        assert!(rep.common_point.is_some());
        assert!(rep.residual <= 1e-7, "seed {seed}: residual {}", rep.residual);
    }
}

#[test]
fn f_at_base_point() {
    let parts = vec![vec![h(&[1.0, 0.0]), h(&[-1.0, 0.0])]];
    let z = Point::zeros(2);
    let (f, g) = hyper_f_and_grad(&z, &parts).unwrap();
    let direct = defining_sum(&parts[0], &HPoint::base(2));
    assert!((f[0] - direct).abs() < 1e-12);
    assert!(g[0].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn f_matches_defining_sum_and_gradient_matches_differences() {
    let cfg = gen_hyperbolic(3, 3, 3, 1.0, 21).unwrap();
    let parts = cfg.parts_of(&TransversalPartition::identity(3, 3)).unwrap();
    let z = Point::new(vec![0.3, -0.2, 0.5]).unwrap();
    let (f, g) = hyper_f_and_grad(&z, &parts).unwrap();
    for (i, part) in parts.iter().enumerate() {
        let direct = defining_sum(part, &lift(&z));
        assert!((f[i] - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        for t in 0..3 {
            let step = 1e-6;
            let mut up = z.coords().to_vec();
            let mut down = z.coords().to_vec();
            up[t] += step;
            down[t] -= step;
            let (fu, _) = hyper_f_and_grad(&Point::new(up).unwrap(), &parts).unwrap();
            let (fd, _) = hyper_f_and_grad(&Point::new(down).unwrap(), &parts).unwrap();
            let fdiff = (fu[i] - fd[i]) / (2.0 * step);
            assert!((fdiff - g[i][t]).abs() <= 1e-6 * g[i][t].abs().max(1.0), "part {i} coord {t}");
        }
    }
}

#[test]
fn f_is_bounded_below_by_alpha() {
    let cfg = gen_hyperbolic(3, 4, 2, 1.0, 31).unwrap();
    let parts = cfg.parts_of(&TransversalPartition::identity(3, 4)).unwrap();
    let probes = gen_hyperbolic(2, 20, 2, 2.0, 32).unwrap();
    for z in probes.colors().iter().flatten() {
        let (f, _) = hyper_f_and_grad(&z.chart(), &parts).unwrap();
        for (part, fi) in parts.iter().zip(&f) {
            let alpha = pairing(part, part).unwrap() - 12.0;
            assert!(*fi >= alpha);
        }
    }
}

#[test]
fn common_point_of_single_part_is_its_center() {
    let part = vec![h(&[1.0, 0.5]), h(&[-0.5, 0.2]), h(&[0.1, -1.0])];
    let ball = hyper_ball(&part).unwrap();
    let m = find_common_point_hyper(&[part], 1e-12, 10_000).unwrap();
    assert!(hdist(&m.point, &ball.center).unwrap() < 1e-9);
    assert!(m.residual <= 0.0);
}

#[test]
fn iterative_path_agrees_with_exact() {
    for seed in 0..4 {
        let cfg = gen_hyperbolic(6, 3, 2, 1.0, 200 + seed).unwrap();
        let parts = cfg.parts_of(&random_partition(6, 3, seed)).unwrap();
        let exact = find_common_point_hyper_with(&parts, HyperMinOptions::default()).unwrap();
        assert!(exact.exact);
        let opts = HyperMinOptions { exact_max: 4, ..HyperMinOptions::default() };
        let iterative = find_common_point_hyper_with(&parts, opts).unwrap();
        assert!(!iterative.exact);
        let scale = exact.residual.abs().max(1.0);
        assert!((iterative.residual - exact.residual).abs() <= 1e-8 * scale, "seed {seed}");
    }
}

#[test]
fn timelike_cauchy_schwarz() {
    let c = check_timelike_cs(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
    assert!(c.passed);
    assert_eq!(c.find("p-negative").unwrap().lhs, -1.0);
    let c = check_timelike_cs(&[2.0, 1.0], &[3.0, -1.0]).unwrap();
    assert!(c.passed);
    let rcs = c.find("reverse-cs").unwrap();
    assert_eq!((rcs.lhs, rcs.rhs), (24.0, 49.0));
    assert!(matches!(check_timelike_cs(&[1.0, 2.0], &[1.0, 0.0]), Err(Error::Precondition(_))));
    assert!(matches!(check_timelike_cs(&[-1.0, 0.0], &[1.0, 0.0]), Err(Error::Precondition(_))));
}

#[test]
fn balanced_point_single_part() {
    let part = vec![h(&[1.0, 0.5]), h(&[-0.5, 0.2]), h(&[0.1, -1.0])];
    let m = find_common_point_hyper(std::slice::from_ref(&part), 1e-12, 10_000).unwrap();
    let rep = check_balanced_point(&[part], &[1.0], &m.z, 1e-8).unwrap();
    assert!(rep.certificate.passed, "{}", rep.certificate);
    assert!(rep.lhs <= 1e-9);
}

#[test]
fn balanced_point_at_minimizers() {
    for seed in 0..5 {
        let cfg = gen_hyperbolic(4, 3, 2, 1.0, 300 + seed).unwrap();
        let parts = cfg.parts_of(&random_partition(4, 3, seed)).unwrap();
        let m = find_common_point_hyper(&parts, 1e-12, 100_000).unwrap();
        let mut weights = vec![0.0; parts.len()];
        for (i, w) in m.active.iter().zip(&m.weights) {
            weights[*i] = *w;
        }
        let rep = check_balanced_point(&parts, &weights, &m.z, 1e-8).unwrap();
        assert!(rep.certificate.passed, "seed {seed}: {}", rep.certificate);
        assert!(rep.beta.iter().all(|&b| b >= 1.0 - 1e-12));
        let sum_beta: f64 = rep.beta.iter().sum();
        assert!(rep.minus_q_total >= sum_beta * sum_beta * (1.0 - 1e-12));
    }
}

#[test]
fn balanced_point_rejects_unbalanced_points() {
    let cfg = gen_hyperbolic(3, 3, 2, 1.0, 7).unwrap();
    let parts = cfg.parts_of(&TransversalPartition::identity(3, 3)).unwrap();
    let z = Point::new(vec![5.0, 5.0]).unwrap();
    let res = check_balanced_point(&parts, &[1.0 / 3.0; 3], &z, 1e-8);
    assert!(matches!(res, Err(Error::Precondition(_))));
}
