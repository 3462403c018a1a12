use dc_split::data::Dataset;
use dc_split::linalg::{gaussian_matrix, gaussian_vector, DenseMatrix, DenseVector, RngSeed};
use dc_split::problems::{
    build_quad_l1_huber, build_rls_log, build_svm, predict_svm, split_params, QuadL1Huber, QuadL1HuberSpec,
    RlsLogSpec, SvmSpec,
};
use dc_split::{check_assumption, solve, Condition, DcProblem, KappaSchedule, Method, SolverConfig, StopRule};
use rand::Rng;

/// Original regularized objective, written out independently.
fn rls_reference(a: &DenseMatrix, b: &DenseVector, mu: f64, eps: f64, w: &DenseVector) -> f64 {
    let mut r = 0.0;
    for i in 0..a.rows() {
        let ai: f64 = a.row(i).iter().zip(w.iter()).map(|(p, q)| p * q).sum();
        r += (ai - b[i]).powi(2);
    }
    0.5 * r + w.iter().map(|wi| mu * (wi.abs() + eps).ln() - mu * eps.ln()).sum::<f64>()
}

#[test]
fn rls_split_reproduces_original_objective() {
    let p = build_rls_log(&RlsLogSpec::new(30, 12).with_seed(RngSeed(4))).unwrap();
    let reg = p.regularizer();
    let mut rng = RngSeed(40).rng();
    for k in 0..100 {
        let scale = if k % 2 == 0 { 0.01 } else { 3.0 };
        let w = gaussian_vector(12, &mut rng).scaled(scale);
        let expect = rls_reference(p.matrix(), p.data(), reg.mu, reg.epsilon, &w);
        let got = p.objective(&w).unwrap();
        assert!((got - expect).abs() <= 1e-10 * (1.0 + expect.abs()), "{got} vs {expect}");
    }
}

#[test]
fn rls_constants() {
    let p = build_rls_log(&RlsLogSpec::new(100, 50)).unwrap();
    assert!((p.l1_weight() - 0.002).abs() < 1e-15);
    assert!((p.lipschitz().unwrap() - 0.004).abs() < 1e-15);
    let report = check_assumption(&p, Some(&KappaSchedule::default()));
    assert_eq!(report.strong_convexity, Condition::Violated);
}

#[test]
fn quad_objective_matches_direct_formula() {
    let p = build_quad_l1_huber(&QuadL1HuberSpec::new(25, 25).with_seed(RngSeed(2))).unwrap();
    let f = p.quadratic();
    let mut rng = RngSeed(3).rng();
    for _ in 0..50 {
        let x = gaussian_vector(25, &mut rng);
        let qx = f.q.mul_vec(&x).unwrap();
        let huber: f64 = x
            .iter()
            .map(|&t| if t.abs() <= 0.001 { 0.5 * t * t } else { 0.001 * (t.abs() - 0.0005) })
            .sum();
        let expect = 0.5 * x.dot(&qx) + f.c.dot(&x) + f.d + 0.1 * x.norm_l1() - huber;
        assert!((p.objective(&x).unwrap() - expect).abs() < 1e-9 * (1.0 + expect.abs()));
    }
}

#[test]
fn quad_strong_convexity_estimate() {
    let spd = QuadL1HuberSpec {
        spd: true,
        ridge: 1.0,
        ..QuadL1HuberSpec::new(50, 30)
    };
    let p = build_quad_l1_huber(&spd).unwrap();
    assert_eq!(p.strong_convexity(), Some(1.0));
    let report = check_assumption(&p, Some(&KappaSchedule::constant(1.0).unwrap()));
    assert!(report.all_satisfied());
    let no_ridge = build_quad_l1_huber(&QuadL1HuberSpec { ridge: 0.0, ..spd }).unwrap();
    assert_eq!(no_ridge.strong_convexity(), Some(0.0));
    let rect = build_quad_l1_huber(&QuadL1HuberSpec::new(100, 25)).unwrap();
    assert_eq!(rect.strong_convexity(), None);
    assert_eq!(check_assumption(&rect, None).strong_convexity, Condition::Unknown);
}

#[test]
fn quad_builder_rejects_wide_matrices() {
    assert!(build_quad_l1_huber(&QuadL1HuberSpec::new(10, 20)).is_err());
}

#[test]
fn seeded_builders_repeat() {
    let spec = QuadL1HuberSpec::new(40, 20).with_seed(RngSeed(9));
    let a = build_quad_l1_huber(&spec).unwrap();
    let b = build_quad_l1_huber(&spec).unwrap();
    assert_eq!(a.quadratic().q, b.quadratic().q);
    assert_eq!(a.quadratic().c, b.quadratic().c);
    let other = build_quad_l1_huber(&spec.with_seed(RngSeed(10))).unwrap();
    assert_ne!(a.quadratic().c, other.quadratic().c);
}

fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset {
    let x = gaussian_matrix(n, d, RngSeed(seed), false);
    let mut rng = RngSeed(seed + 1).rng();
    let y = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    Dataset::new(x, y).unwrap()
}

#[test]
fn svm_without_l1_is_soft_margin_objective() {
    let data = random_dataset(20, 3, 5);
    let spec = SvmSpec {
        lambda: 0.0,
        c: 0.7,
        ..SvmSpec::default()
    };
    let p = build_svm(&spec, &data).unwrap();
    let mut rng = RngSeed(6).rng();
    for _ in 0..50 {
        let x = gaussian_vector(4, &mut rng);
        let (w, b) = split_params(&x);
        let hinge: f64 = (0..20)
            .map(|i| {
                let s: f64 = data.x.row(i).iter().zip(w.iter()).map(|(p, q)| p * q).sum();
                (1.0 - data.y[i] * (s + b)).max(0.0)
            })
            .sum();
        let expect = 0.5 * w.norm_sq() + 0.7 * hinge;
        assert!((p.objective(&x).unwrap() - expect).abs() < 1e-10);
    }
}

fn svm_config() -> SolverConfig {
    SolverConfig {
        beta: 0.5,
        kappa: KappaSchedule::constant(1.0).unwrap(),
        stop: StopRule::absolute(1e-10),
        max_iter: 20_000,
        ..SolverConfig::default()
    }
}

#[test]
fn two_point_svm_has_unit_margin() {
    let data = Dataset::new(DenseMatrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap(), vec![1.0, -1.0]).unwrap();
    let p = build_svm(&SvmSpec { lambda: 0.0, ..SvmSpec::default() }, &data).unwrap();
    for method in [Method::Gdcp, Method::DrsTheta] {
        let r = solve(&p, method, &svm_config(), &DenseVector::zeros(2), None).unwrap();
        assert!(r.converged());
        let (w, b) = split_params(&r.solution);
        assert!((w[0] - 1.0).abs() < 1e-6 && b.abs() < 1e-6, "w {} b {b}", w[0]);
        assert_eq!(predict_svm(&w, b, &data.x).unwrap(), data.y);
    }
}

#[test]
fn zero_weights_give_zero_normal() {
    let data = random_dataset(15, 2, 8);
    let p = build_svm(&SvmSpec { lambda: 0.0, c: 0.0, ..SvmSpec::default() }, &data).unwrap();
    let x0 = DenseVector::from([1.0, -2.0, 0.25]);
    let r = solve(&p, Method::Gdcp, &svm_config(), &x0, None).unwrap();
    let (w, b) = split_params(&r.solution);
    assert!(w.norm() < 1e-8);
    assert!(b.is_finite());
}

#[test]
fn svm_solution_is_stationary() {
    let data = random_dataset(40, 4, 11);
    let p = build_svm(&SvmSpec::default(), &data).unwrap();
    let r = solve(&p, Method::Gdcp, &svm_config(), &DenseVector::zeros(5), None).unwrap();
    assert!(r.converged());
    assert_eq!(r.trace.summary.inner_nonconverged, 0);
    assert!(r.trace.summary.r1 < 1e-6 && r.trace.summary.r2 < 1e-6);
}

#[test]
fn problems_are_object_safe() {
    let problems: Vec<Box<dyn DcProblem>> = vec![
        Box::new(build_rls_log(&RlsLogSpec::new(10, 4)).unwrap()),
        Box::new(build_quad_l1_huber(&QuadL1HuberSpec::new(10, 4)).unwrap()),
        Box::new(build_svm(&SvmSpec::default(), &random_dataset(6, 2, 1)).unwrap()),
    ];
    for p in &problems {
        let x = DenseVector::zeros(p.dim());
        assert!(p.objective(&x).unwrap().is_finite());
        assert_eq!(p.prox_f(0.5, &x).unwrap().len(), p.dim());
        assert!(p.prox_g(0.5, &DenseVector::zeros(p.dim() + 1)).is_err());
    }
}

#[test]
fn quad_from_parts_known_instance() {
    // ½x² − x on the line; a tiny δ makes the Huber part negligible
    let q = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
    let p = QuadL1Huber::from_parts(q, DenseVector::from([-1.0]), 0.0, 1e-12, 0.0, 0.0).unwrap();
    let cfg = SolverConfig {
        stop: StopRule::absolute(1e-13),
        max_iter: 10_000,
        ..SolverConfig::default()
    };
    let r = solve(&p, Method::Gdcp, &cfg, &DenseVector::zeros(1), None).unwrap();
    assert!((r.solution[0] - 1.0).abs() < 1e-6, "got {}", r.solution[0]);
}
