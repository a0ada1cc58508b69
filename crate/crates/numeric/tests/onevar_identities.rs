use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablefrac_numeric::onevar::*;

fn random_stable(rng: &mut ChaCha8Rng, deg: usize) -> StablePoly {
    let roots: Vec<C> = (0..deg).map(|_| C::new(rng.random_range(-3.0..3.0), -rng.random_range(0.2..2.0))).collect();
    StablePoly::from_roots(&roots).unwrap()
}

#[test]
fn parseval_closed_forms() {
    // ∫ dy / (π (y^2 + 1)) = 1 and ∫ dy / (π (y^2 + 1)^2) = 1/2
    let one = [C::new(1.0, 0.0)];
    let p1 = StablePoly::from_roots(&[C::new(0.0, -1.0)]).unwrap();
    let r = parseval_check(&one, &p1, 0.0, 1e-8).unwrap();
    assert!(r.pass && (r.sum - 1.0).abs() < 1e-12);
    let p2 = StablePoly::from_roots(&[C::new(0.0, -1.0); 2]).unwrap();
    let r = parseval_check(&one, &p2, 0.0, 1e-8).unwrap();
    assert!(r.pass && (r.sum - 0.5).abs() < 1e-12 && (r.integral - 0.5).abs() < 1e-8);
}

#[test]
fn parseval_random_cubics() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let p = random_stable(&mut rng, 3);
        let q: Vec<C> = (0..3).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let t = rng.random_range(-2.0..2.0);
        let r = parseval_check(&q, &p, t, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn representation_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = random_stable(&mut rng, 3);
    let samples: Vec<f64> = (-5..=5).map(|k| k as f64 * 0.7).collect();
    let y = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
    assert!(representation_check(&y, &p, 0.5, &samples).unwrap() < 1e-9);
    assert!(representation_check(&[], &p, 0.5, &samples).unwrap() == 0.0);
}

#[test]
fn kernel_diagonal_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let p = random_stable(&mut rng, 4);
        let y = C::new(rng.random_range(-3.0..3.0), rng.random_range(0.0..2.0));
        let k = kernel_eval(&p, y, y);
        assert!(k.re > 0.0 && k.im.abs() < 1e-9 * k.re.max(1.0), "{k}");
    }
}

#[test]
fn interlacing_fifty_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..50 {
        let deg = rng.random_range(1..=6);
        let p = random_stable(&mut rng, deg);
        let t = rng.random_range(-3.0..3.0);
        let r = interlacing_check(&p, t).unwrap();
        assert!(r.holds, "{r:?}");
        let q = quadrature(&p, t).unwrap();
        assert!(q.weights.iter().all(|&w| w > 0.0));
    }
}

#[test]
fn sampling_inequalities() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for deg in 2..=4 {
        let p = random_stable(&mut rng, deg);
        let q: Vec<C> = (0..deg).map(|_| C::new(rng.random_range(-1.0..1.0), 0.0)).collect();
        for e in [4.0 / 3.0, 2.0, 4.0] {
            let r = sampling_bounds_check(&q, &p, e, 0.3, 1.0).unwrap();
            assert!(r.upper_holds && r.lower_holds, "{r:?}");
        }
        let r = sampling_bounds_check(&q[..deg - 1], &p, 1.0, 0.0, 1.0).unwrap();
        assert!(r.upper_holds && r.lower_holds, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn weights_positive(re in prop::collection::vec(-3.0f64..3.0, 1..5), t in -3.0f64..3.0) {
        let roots: Vec<C> = re.iter().enumerate().map(|(k, &r)| C::new(r, -0.3 - 0.2 * k as f64)).collect();
        let p = StablePoly::from_roots(&roots).unwrap();
        let q = quadrature(&p, t).unwrap();
        prop_assert_eq!(q.nodes.len(), roots.len());
        prop_assert!(q.weights.iter().all(|&w| w > 0.0));
    }
}
