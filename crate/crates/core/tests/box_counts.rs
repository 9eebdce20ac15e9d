//! Box experiments: partition independence, sandwich bounds, tail counts.

use num_bigint::BigInt;
use sqfsieve_core::arith::int;
use sqfsieve_core::geosieve::{
    count_on_variety, density_box, density_box_slab, squarefree_test, strong_weak_histogram, tail_count,
    tail_count_skewed, tail_counts, Equation, IntBox, SieveReport, SquarefreeVerdict, SampleMode,
};
use sqfsieve_core::localdensity::cp_hensel;
use sqfsieve_core::{Family, DEFAULT_BUDGET};

#[test]
fn slab_merge_order_is_irrelevant() {
    let whole = density_box(Family::F3, 4, 13, 1000, DEFAULT_BUDGET).unwrap();
    let slabs: Vec<SieveReport> = (0..9).map(|s| density_box_slab(Family::F3, 4, 13, 1000, s)).collect();
    let empty = || SieveReport::empty(Family::F3, 4, SampleMode::Exhaustive, 13, 1000);
    let reversed = slabs.iter().rev().fold(empty(), |a, r| a.merge(r));
    let halves = slabs[..4].iter().fold(empty(), |a, r| a.merge(r)).merge(&slabs[4..].iter().fold(empty(), |a, r| a.merge(r)));
    assert_eq!(whole, reversed);
    assert_eq!(whole, halves);
}

#[test]
fn sandwich_bounds_hold() {
    let rep = density_box(Family::F3, 8, 47, 10_000, DEFAULT_BUDGET).unwrap();
    assert_eq!(rep.unresolved, 0);
    let sandwich = rep.sandwich_counts();
    assert!(sandwich.values().all(|&s| s >= rep.squarefree));
    assert!(sandwich.values().zip(sandwich.values().skip(1)).all(|(a, b)| a >= b));
}

#[test]
fn weierstrass_box_against_brute_force() {
    let rep = density_box(Family::W1, 30, 7, 10_000, DEFAULT_BUDGET).unwrap();
    let mut sf = 0u64;
    for a in -30i64..=30 {
        for b in -30i64..=30 {
            let f = -4 * a * a * a - 27 * b * b;
            if f != 0 && squarefree_test(&BigInt::from(f), 10_000) == SquarefreeVerdict::Squarefree {
                sf += 1;
            }
        }
    }
    assert_eq!(rep.squarefree, sf);
}

#[test]
fn strong_frequency_near_local_density() {
    let h = strong_weak_histogram(Family::F3, 13, &[3], DEFAULT_BUDGET).unwrap();
    let rec = cp_hensel(Family::F3, 3, DEFAULT_BUDGET).unwrap();
    // the box [−13, 13] is a union of complete residue classes mod 9 up to one layer
    let freq = h.counts[&3].0 as f64 / h.total as f64;
    let expected = num_traits::ToPrimitive::to_f64(&(&rec.strong / num_rational::BigRational::from_integer(rec.volume()))).unwrap();
    assert!((freq - expected).abs() < 0.01, "{freq} vs {expected}");
}

#[test]
fn tail_counts_monotone_and_skew_consistent() {
    let ms = [5, 10, 20, 40];
    let counts = tail_counts(Family::F3, 8, &ms, DEFAULT_BUDGET).unwrap();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    for (k, &m) in ms.iter().enumerate() {
        assert_eq!(tail_count(Family::F3, 8, m, DEFAULT_BUDGET).unwrap(), counts[k]);
    }
    let id = vec![int(1); 4];
    assert_eq!(tail_count_skewed(Family::F3, 8, &id, 10, DEFAULT_BUDGET).unwrap(), counts[1]);
    let skew = vec![int(2), int(1), num_rational::BigRational::new(1.into(), 2.into()), int(1)];
    assert!(tail_count_skewed(Family::F3, 8, &skew, 10, DEFAULT_BUDGET).is_ok());
}

#[test]
fn variety_counts_grow_slower_than_box() {
    let c5 = count_on_variety(Family::F3, &[Equation::Disc], 5, DEFAULT_BUDGET).unwrap();
    let c10 = count_on_variety(Family::F3, &[Equation::Disc], 10, DEFAULT_BUDGET).unwrap();
    assert!((c10 as f64) < 16.0 * c5 as f64);
    assert!(c10 > c5);
    let f4 = count_on_variety(Family::F4, &[Equation::PencilDegenerate], 1, DEFAULT_BUDGET).unwrap();
    let box_size = IntBox::cube(12, 1).volume() as u64;
    assert!(f4 > 0 && f4 < box_size);
}
