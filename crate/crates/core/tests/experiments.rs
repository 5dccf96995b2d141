use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyirr_core::experiments::{irreducible_over_z, mc_irreducibility, ExperimentConfig, ZBudget, ZVerdict};
use polyirr_core::IntPoly;

fn random_monic(rng: &mut ChaCha8Rng, max_deg: usize) -> IntPoly {
    let d = rng.random_range(1..=max_deg);
    let h = [1i64, 3, 10, 100][rng.random_range(0..4)];
    let mut c: Vec<i64> = (0..d).map(|_| rng.random_range(-h..=h)).collect();
    c.push(1);
    IntPoly::from_i64(&c)
}

#[test]
fn ten_thousand_products_are_reducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let budget = ZBudget::default();
    let mut by_stage = [0u32; 3];
    for _ in 0..10_000 {
        let b = random_monic(&mut rng, 8);
        let c = random_monic(&mut rng, 8);
        let a = b.mul(&c);
        let d = irreducible_over_z(&a, &budget).unwrap();
        assert_eq!(d.verdict, ZVerdict::Reducible, "({}) · ({})", b.pretty(), c.pretty());
        let w = d.witness.unwrap();
        assert!(w.deg() >= 1 && w.deg() < a.deg());
        assert!(a.exact_div_monic(&w).is_some());
        // Any stage-1 degree set must contain the true factor degrees.
        if !d.primes.is_empty() {
            assert!(d.degree_set.contains(&b.deg()) && d.degree_set.contains(&c.deg()));
        }
        by_stage[d.stage as usize] += 1;
    }
    // Stage 0 alone cannot do it: most products need lifting.
    assert!(by_stage[2] > 1000, "{by_stage:?}");
}

/// P(A(−1) = 0) for A = T^n + Σ a_j T^j with a_j uniform on [1, H]:
/// the law of Σ (−1)^j a_j by convolution.
fn p_root_minus_one(n: usize, h: i64) -> f64 {
    let off = n as i64 * h;
    let mut dist = vec![0f64; (2 * off + 1) as usize];
    dist[off as usize] = 1.0;
    for j in 0..n {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let mut next = vec![0f64; dist.len()];
        for (i, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for a in 1..=h {
                let k = i as i64 + sign * a;
                next[k as usize] += w / h as f64;
            }
        }
        dist = next;
    }
    // A(−1) = Σ (−1)^j a_j + (−1)^n.
    let target = -if n % 2 == 0 { 1 } else { -1 };
    dist[(off + target) as usize]
}

#[test]
fn root_at_minus_one_scales_like_inverse_sqrt_n() {
    let samples = 10_000u64;
    let run = |n| {
        mc_irreducibility(&ExperimentConfig {
            measure: "box:1..35".into(),
            n,
            samples,
            seed: 64,
            budget: ZBudget::default(),
            keep_samples: false,
        })
        .unwrap()
    };
    let (e16, e64) = (p_root_minus_one(16, 35), p_root_minus_one(64, 35));
    // The exact probabilities already follow c/√n closely.
    assert!((e16 / e64 - 2.0).abs() < 0.05, "exact ratio {}", e16 / e64);
    let (r16, r64) = (run(16), run(64));
    let (p16, p64) = (r16.root_minus_one.estimate, r64.root_minus_one.estimate);
    let n = samples as f64;
    for (p, e) in [(p16, e16), (p64, e64)] {
        assert!((p - e).abs() <= 5.0 * (e * (1.0 - e) / n).sqrt(), "{p} vs exact {e}");
    }
    let ratio = p16 / p64;
    let sd = ratio * ((1.0 - p16) / (n * p16) + (1.0 - p64) / (n * p64)).sqrt();
    assert!((ratio - 2.0).abs() <= 5.0 * sd, "ratio {ratio} ± {sd}");
    // A(1) > 0 always for positive coefficients.
    assert_eq!(r16.root_plus_one.count, 0);
}
