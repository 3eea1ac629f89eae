use proptest::prelude::*;

use polywalk::baseline::{chord, sample_baseline, BaselineConfig, ChordKind};
use polywalk::diagnostics::{ess, psrf};
use polywalk::io;
use polywalk::lp::{chebyshev_center, from_equality_form, EqualityModel};
use polywalk::polytope::{generate, random_rotation, Billiard, Bookkeeping, Family, HPolytope, Travel};
use polywalk::rehmc::{self, leapfrog_step, Leapfrog, ReHmcConfig, StepSize, WalkState};
use polywalk::rng::ChainRng;
use polywalk::univariate::{truncated_exponential, truncated_standard_normal};
use polywalk::{Gaussian, LogDensity, Uniform};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Cube), Just(Family::Simplex), Just(Family::Cross), Just(Family::ProductSimplex)]
}

/// A (possibly rotated) standard body with its Chebyshev ball.
fn body() -> impl Strategy<Value = (HPolytope, Vec<f64>, f64)> {
    (family(), 1usize..7, any::<u64>(), any::<bool>()).prop_map(|(f, d, seed, rotate)| {
        let mut p = generate(f, d).unwrap();
        if rotate {
            p = random_rotation(&p, seed);
        }
        let ball = chebyshev_center(&p).unwrap();
        (p.precompute_gram(), ball.center, ball.radius)
    })
}

fn interior(p: &HPolytope, c: &[f64], frac: f64, seed: u64) -> Vec<f64> {
    let u = ChainRng::new(seed).normal_vec(p.dim());
    let t = p.ray_intersect(c, &u, None).unwrap().t;
    c.iter().zip(&u).map(|(ci, ui)| ci + frac * t * ui).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chebyshev_ball_is_inscribed((p, c, r) in body()) {
        prop_assert!(r > 0.0);
        for i in 0..p.num_facets() {
            let lhs: f64 = p.normal(i).iter().zip(&c).map(|(a, x)| a * x).sum();
            prop_assert!(lhs + r <= p.offset(i) + 1e-8);
        }
    }

    #[test]
    fn billiard_stays_inside_and_keeps_speed(
        (p, c, r) in body(), frac in 0.0..0.9f64, seed in any::<u64>(), scale in 0.1..20.0f64,
    ) {
        let x = interior(&p, &c, frac, seed);
        let v = ChainRng::new(seed ^ 1).normal_vec(p.dim());
        let speed: f64 = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut b = Billiard::new(&p, x, v);
        let done = matches!(b.travel(scale * r, 100_000), Travel::Completed { .. });
        prop_assert!(done);
        prop_assert!(p.max_violation(b.position()) <= 1e-9);
        let after: f64 = b.velocity().iter().map(|t| t * t).sum::<f64>().sqrt();
        prop_assert!((after - speed).abs() <= 1e-10 * speed.max(1.0));
    }

    #[test]
    fn gram_and_naive_paths_agree(
        (p, c, r) in body(), frac in 0.0..0.9f64, seed in any::<u64>(), scale in 0.1..20.0f64,
    ) {
        let x = interior(&p, &c, frac, seed);
        let v = ChainRng::new(seed ^ 2).normal_vec(p.dim());
        let mut a = Billiard::with_bookkeeping(&p, x.clone(), v.clone(), Bookkeeping::Gram);
        let mut b = Billiard::with_bookkeeping(&p, x, v, Bookkeeping::Naive);
        prop_assert_eq!(a.travel(scale * r, 100_000), b.travel(scale * r, 100_000));
        for (s, t) in a.position().iter().zip(b.position()) {
            prop_assert!((s - t).abs() <= 1e-10);
        }
    }

    #[test]
    fn leapfrog_is_reversible(
        (p, c, r) in body(), frac in 0.0..0.9f64, seed in any::<u64>(), scale in 0.05..5.0f64, gaussian in any::<bool>(),
    ) {
        let x = interior(&p, &c, frac, seed);
        let v = ChainRng::new(seed ^ 3).normal_vec(p.dim());
        let g = Gaussian::isotropic(c.clone(), r * r).unwrap();
        let f: &dyn LogDensity = if gaussian { &g } else { &Uniform };
        let eta = scale * r;
        let Leapfrog::Moved { x: x1, v: v1, .. } = leapfrog_step(&WalkState::new(x.clone(), v.clone(), eta), f, &p, 100_000).unwrap()
        else { return Err(TestCaseError::fail("overflow")) };
        let back: Vec<f64> = v1.iter().map(|t| -t).collect();
        let Leapfrog::Moved { x: x2, v: v2, .. } = leapfrog_step(&WalkState::new(x1, back, eta), f, &p, 100_000).unwrap()
        else { return Err(TestCaseError::fail("overflow")) };
        for k in 0..p.dim() {
            prop_assert!((x2[k] - x[k]).abs() <= 1e-8);
            prop_assert!((v2[k] + v[k]).abs() <= 1e-8);
        }
    }

    #[test]
    fn chord_endpoints_are_on_the_boundary((p, c, _r) in body(), frac in 0.0..0.9f64, seed in any::<u64>()) {
        let x = interior(&p, &c, frac, seed);
        let u = ChainRng::new(seed ^ 4).normal_vec(p.dim());
        let ch = chord(&p, &x, &u).unwrap();
        prop_assert!(ch.t_minus < 0.0 && ch.t_plus > 0.0);
        for t in [ch.t_minus, ch.t_plus] {
            let end = ch.point(t);
            prop_assert!(p.max_violation(&end).abs() <= 1e-9);
        }
    }

    #[test]
    fn one_dimensional_draws_stay_in_range(a in -8.0..8.0f64, len in 1e-6..10.0f64, slope in -50.0..50.0f64, seed in any::<u64>()) {
        let mut rng = ChainRng::new(seed);
        let b = a + len;
        if let Some(z) = truncated_standard_normal(a, b, &mut rng) {
            prop_assert!((a..=b).contains(&z));
        }
        let t = truncated_exponential(slope, a, b, &mut rng);
        prop_assert!((a..=b).contains(&t));
    }

    #[test]
    fn equality_reduction_maps_into_the_model(
        n in 3usize..7, seed in any::<u64>(),
    ) {
        // one random conservation row with a known interior solution
        let mut rng = ChainRng::new(seed);
        let row: Vec<f64> = (0..n).map(|_| 0.5 + rng.uniform()).collect();
        let x0: Vec<f64> = (0..n).map(|_| 0.2 + 0.6 * rng.uniform()).collect();
        let b = row.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let model = EqualityModel { a_eq: vec![row], b_eq: vec![b], l: vec![0.0; n], u: vec![1.0; n] };
        let e = from_equality_form(&model).unwrap();
        prop_assert_eq!(e.polytope.dim(), n - 1);
        let y = chebyshev_center(&e.polytope).unwrap().center;
        let x = e.to_original(&y);
        prop_assert!(model.residual(&x) <= 1e-8);
        prop_assert!(x.iter().all(|v| (-1e-8..=1.0 + 1e-8).contains(v)));
    }

    #[test]
    fn ess_is_between_zero_and_n(seed in any::<u64>(), rho in -0.9..0.95f64) {
        let mut rng = ChainRng::new(seed);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..2000).map(|_| { x = rho * x + rng.normal(); x }).collect();
        let e = ess(&xs).unwrap();
        prop_assert!(e > 0.0 && e <= xs.len() as f64);
        prop_assert!(psrf(&xs).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_sampler_emits_members_that_survive_csv((p, _c, _r) in body(), seed in any::<u64>(), kind in 0usize..3) {
        let f = Gaussian::isotropic(vec![0.0; p.dim()], 1.0).unwrap();
        let chain = match kind {
            0 => rehmc::sample(&f, &p, &ReHmcConfig { n_samples: 200, burn_in: 50, seed, eta0: StepSize::Auto, ..ReHmcConfig::default() }).unwrap(),
            k => {
                let kind = if k == 1 { ChordKind::Har } else { ChordKind::Char };
                sample_baseline(&f, &p, &BaselineConfig { kind, n_samples: 200, burn_in: 50, seed, ..Default::default() }).unwrap()
            }
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        io::write_chain(&path, &chain).unwrap();
        let rows = io::read_samples(&path).unwrap();
        prop_assert_eq!(rows.len(), 200);
        for (row, orig) in rows.iter().zip(chain.iter()) {
            prop_assert_eq!(row.as_slice(), orig);
            prop_assert!(p.contains(row, 0.0).unwrap());
        }
    }
}
