//! Reduction moves on constructed weak instances and the g₂ → f₄ embedding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqfsieve_core::arith::{int, rat};
use sqfsieve_core::forms::{act, random_form_with, random_unimodular};
use sqfsieve_core::invariants::{disc, disc_binary_form};
use sqfsieve_core::localdensity::{classify_point, PointClass};
use sqfsieve_core::moves::{
    f3_normalize, f3_reduce, f4_reduce, g2_no_move_witness, g3_node_move, g3_normalize, phi_embed,
    sample_f3_normal, sample_f4_normal, sample_g2_normal, sample_g3_node,
};
use sqfsieve_core::{Family, FormVector};

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

#[test]
fn f3_reduce_divides_disc_by_p_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let v = sample_f3_normal(p, 30, &mut rng);
        let r = f3_reduce(&v, p).unwrap();
        assert!(r.output.is_integral());
        assert_eq!(disc(&r.output) * int((p * p) as i64), disc(&v));
        assert_eq!(r.disc_ratio, rat(1, (p * p) as i64));
    }
}

#[test]
fn f3_normalize_then_reduce() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    while done < 200 {
        let p = PRIMES[rng.gen_range(0..PRIMES.len())];
        let v = act(&random_unimodular(Family::F3, &mut rng, 5), &sample_f3_normal(p, 20, &mut rng)).unwrap();
        if classify_point(&v, p).unwrap() != PointClass::WeakMultiple {
            continue;
        }
        let (g, norm) = f3_normalize(&v, p).unwrap();
        assert!(g.is_integral_unimodular());
        let r = f3_reduce(&norm, p).unwrap();
        assert_eq!(disc(&r.output) * int((p * p) as i64), disc(&v));
        done += 1;
    }
}

#[test]
fn f4_reduce_divides_disc_by_p_squared() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let p = PRIMES[rng.gen_range(0..3)];
        let v = sample_f4_normal(p, 8, &mut rng);
        let r = f4_reduce(&v, p).unwrap();
        assert!(r.output.is_integral());
        assert_eq!(disc(&r.output) * int((p * p) as i64), disc(&v));
        let back = act(&r.gamma.inverse().unwrap(), &r.output).unwrap();
        assert_eq!(back, v.scaled(&r.scale));
    }
}

#[test]
fn f4_preimages_per_output_are_few() {
    // exhaustive small box at p = 3: distinct normalized inputs with equal output
    let p = 3i64;
    let mut seen = std::collections::HashMap::<String, u32>::new();
    for a12 in -1..=1 {
        for a22 in -1..=1 {
            for b11 in [0, 9] {
                for b22 in [1, 2] {
                    for a33 in -1..=1 {
                        let coords = [p, a12, 1, a22, 0, a33, b11, 0, 3, b22, 1, 1];
                        let v = FormVector::from_lattice_i64(Family::F4, &coords).unwrap();
                        if let Ok(r) = f4_reduce(&v, 3) {
                            *seen.entry(r.output.to_string()).or_default() += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(!seen.is_empty());
    assert!(seen.values().all(|&c| c <= 6));
}

#[test]
fn g3_node_move_preserves_disc_and_strengthens() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut strong_checked = 0;
    for i in 0..1000 {
        let p = PRIMES[i % 3];
        let v = sample_g3_node(p, 6, &mut rng);
        let r = g3_node_move(&v, p).unwrap();
        assert!(r.output.is_integral());
        assert_eq!(disc(&r.output), disc(&v));
        for k in [0usize, 1, 3, 6] {
            let c = r.output.coeffs()[k].to_integer();
            assert_eq!(c % p as i64, 0.into());
        }
        let d = disc(&v).to_integer();
        if d % (p * p) as i64 == 0.into() {
            assert_eq!(r.target_class, PointClass::StrongMultiple);
            strong_checked += 1;
        }
    }
    assert!(strong_checked > 0);
}

#[test]
fn g3_normalize_produces_movable_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut moved = 0;
    for _ in 0..50 {
        let v = act(&random_unimodular(Family::G3, &mut rng, 4), &sample_g3_node(5, 5, &mut rng)).unwrap();
        let (_, norm) = g3_normalize(&v, 5).unwrap();
        if let Ok(r) = g3_node_move(&norm, 5) {
            assert_eq!(disc(&r.output), disc(&v));
            moved += 1;
        }
    }
    assert!(moved > 0);
}

#[test]
fn phi_identity_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20_000 {
        let v = random_form_with(Family::G2, 100, &mut rng);
        let w = phi_embed(&v).unwrap();
        assert_eq!(disc(&w), disc(&v));
        assert_eq!(disc(&w), disc_binary_form(v.coeffs()).unwrap());
    }
}

#[test]
fn g2_candidate_stays_weak() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut weak = 0;
    for _ in 0..200 {
        let v = sample_g2_normal(5, 10, &mut rng);
        let r = g2_no_move_witness(&v, 5).unwrap();
        assert_eq!(disc(&r.output), disc(&v));
        // the residual quadratic c s² + (d/p) st + (e/p²) t² of the image
        let o: Vec<i64> = r.output.lattice_i64().unwrap();
        let generic = o[4] % 5 != 0 && (o[3] * o[3] - 4 * o[2] * o[4]) % 5 != 0;
        if generic && classify_point(&v, 5).unwrap() == PointClass::WeakMultiple {
            assert_eq!(r.target_class, PointClass::WeakMultiple);
            weak += 1;
        }
    }
    assert!(weak > 50);
}
