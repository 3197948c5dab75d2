use ganlab::asymptotics::Moments;
use ganlab::criterion::{js_divergence, population_criterion_between, POPULATION_REL_TOL, LN_4};
use ganlab::densities::{joint_points, Density};
use ganlab::families::{model, Mlp};
use ganlab::numerics::{derive_seed, integrate_pieces, normal_cdf, normal_quantile, Matrix, SeededRng};
use ganlab::solvers::{train_gan, TrainConfig};
use proptest::prelude::*;

fn catalog() -> impl Strategy<Value = Density> {
    prop_oneof![
        (-2.0..2.0f64, 0.3..3.0f64).prop_map(|(m, s)| Density::gaussian(m, s).unwrap()),
        (0.3..3.0f64).prop_map(|b| Density::laplace(b).unwrap()),
        (0.2..2.0f64).prop_map(|s| Density::logistic(s).unwrap()),
        (0.3..3.0f64).prop_map(|r| Density::exponential(r).unwrap()),
        (-2.0..1.0f64, 0.5..4.0f64).prop_map(|(lo, w)| Density::uniform(lo, lo + w).unwrap()),
        Just(Density::claw()),
    ]
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 50,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn quadrature_is_linear(f in catalog(), g in catalog(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let pts = joint_points(&[&f, &g]);
        let tol = 1e-10;
        let both = integrate_pieces(|x| a * f.pdf(x) + b * g.pdf(x), &pts, tol).unwrap();
        let fi = integrate_pieces(|x| f.pdf(x), &pts, tol).unwrap();
        let gi = integrate_pieces(|x| g.pdf(x), &pts, tol).unwrap();
        prop_assert!((both - a * fi - b * gi).abs() <= 1e-8 * (1.0 + a.abs() + b.abs()));
        prop_assert!((fi - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn inverse_times_matrix_is_identity(n in 1usize..=6, entries in proptest::collection::vec(-1.0..1.0f64, 36)) {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = entries[i * 6 + j];
            }
            m[(i, i)] += n as f64 + 1.0;
        }
        let prod = m.invert().unwrap().matmul(&m).unwrap();
        let err = prod.sub(&Matrix::identity(n)).unwrap().max_abs();
        prop_assert!(err <= 1e-8, "max error {err}");
    }

    #[test]
    fn quantile_inverts_cdf(x in -8.0..5.0f64) {
        let back = normal_quantile(normal_cdf(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-9 * (1.0 + x.abs()));
    }

    #[test]
    fn equal_seeds_give_equal_streams(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = SeededRng::new(derive_seed(seed, stream));
        let mut b = SeededRng::new(derive_seed(seed, stream));
        for _ in 0..1000 {
            prop_assert_eq!(a.next_u64(), b.next_u64());
        }
        prop_assert_ne!(derive_seed(seed, stream), derive_seed(seed, stream.wrapping_add(1)));
    }

    #[test]
    fn js_symmetric_and_bounded(p in catalog(), q in catalog()) {
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        prop_assert!((pq - qp).abs() <= 1e-9);
        prop_assert!((0.0..=std::f64::consts::LN_2).contains(&pq));
        prop_assert!(js_divergence(&p, &p).unwrap() <= 1e-9);
    }

    #[test]
    fn sqrt_js_triangle(p in catalog(), q in catalog(), r in catalog()) {
        let d = |a: &Density, b: &Density| js_divergence(a, b).unwrap().sqrt();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-8);
    }

    #[test]
    fn criterion_sandwich(p in catalog(), q in catalog(), c in 0.05..0.95f64) {
        let js = js_divergence(&p, &q).unwrap();
        let constant = move |_x: f64| c;
        let l = population_criterion_between(&p, &q, &constant, POPULATION_REL_TOL).unwrap();
        prop_assert!(l <= 2.0 * js - LN_4 + 1e-8);
        prop_assert!(2.0 * js - LN_4 <= 1e-12);
        let half = |_x: f64| 0.5;
        let l_half = population_criterion_between(&p, &q, &half, POPULATION_REL_TOL).unwrap();
        prop_assert!((l_half + LN_4).abs() <= 1e-8);
    }

    #[test]
    fn moments_merge_matches_single_stream(
        data in proptest::collection::vec((-50.0..50.0f64, -1.0..1.0f64), 2..200),
        cut in 0.0..1.0f64,
    ) {
        let k = ((data.len() as f64) * cut) as usize;
        let mut whole = Moments::new(2, true);
        let mut left = Moments::new(2, true);
        let mut right = Moments::new(2, true);
        for (i, &(a, b)) in data.iter().enumerate() {
            whole.push(&[a, b]);
            if i < k { left.push(&[a, b]) } else { right.push(&[a, b]) }
        }
        let mut lr = left.clone();
        lr.merge(&right);
        let mut rl = right;
        rl.merge(&left);
        for m in [&lr, &rl] {
            prop_assert_eq!(m.count, whole.count);
            for i in 0..2 {
                prop_assert!((m.mean[i] - whole.mean[i]).abs() <= 1e-10 * (1.0 + whole.mean[i].abs()));
            }
            let scale = whole.scatter.max_abs().max(1.0);
            prop_assert!(m.scatter.sub(&whole.scatter).unwrap().max_abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn discriminator_output_in_unit_interval(a0 in 0.1..1000.0f64, a1 in 0.1..1000.0f64, x in -1e3..1e3f64) {
        let p = model("laplace-gaussian").unwrap();
        let d = p.discriminator.apply(&[a0, a1], x);
        prop_assert!(d > 0.0 && d < 1.0);
    }

    #[test]
    fn scale_generators_are_monotone(theta in 0.001..1000.0f64, z1 in 0.001..0.999f64, z2 in 0.001..0.999f64) {
        for name in ["laplace-gaussian", "exponential-uniform"] {
            let g = model(name).unwrap().generator;
            let (lo, hi) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
            prop_assert!(g.apply(&[theta], lo) <= g.apply(&[theta], hi));
        }
    }

    #[test]
    fn mlp_parameter_count(depth in 1usize..7) {
        let net = Mlp::discriminator(depth).unwrap();
        let w = net.widths();
        let expected: usize = w.windows(2).map(|p| p[0] * p[1] + p[1]).sum();
        prop_assert_eq!(net.param_count(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn training_stays_in_box_and_is_deterministic(
        seed in any::<u64>(),
        lr_g in 0.01..2.0f64,
        lr_d in 0.01..2.0f64,
        theta0 in 0.01..500.0f64,
        name in prop_oneof![Just("laplace-gaussian"), Just("exponential-uniform")],
    ) {
        let p = model(name).unwrap();
        let mut rng = SeededRng::new(seed);
        let xs = p.target.sample(&mut rng, 64);
        let zs = p.noise.sample(&mut rng, 64);
        let cfg = TrainConfig {
            rounds: 8,
            lr_generator: lr_g,
            lr_discriminator: lr_d,
            init_theta: ganlab::solvers::Init::Fixed(vec![theta0]),
            seed,
            ..TrainConfig::scale_model()
        };
        let a = train_gan(&p, &xs, &zs, &cfg);
        let b = train_gan(&p, &xs, &zs, &cfg);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.trace.len(), 8);
                prop_assert!(p.theta_box[0].contains(a.theta_hat[0]));
                for (v, bx) in a.alpha_hat.iter().zip(&p.alpha_box) {
                    prop_assert!(bx.contains(*v));
                }
                prop_assert_eq!(&a.trace, &b.trace);
                prop_assert_eq!(a.theta_hat, b.theta_hat);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            _ => prop_assert!(false, "nondeterministic outcome"),
        }
    }
}
