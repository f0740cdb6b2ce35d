use std::cmp::Ordering;
use std::collections::HashMap;

use num_complex::Complex64;
use proptest::prelude::*;

use uncommon_core::density::{density_direct, density_fourier, pairwise_sum, DEFAULT_BUDGET};
use uncommon_core::fp;
use uncommon_core::function::{forward_transform, inverse_transform};
use uncommon_core::linalg::{kernel_basis, mat_vec, rank, rref};
use uncommon_core::witness::{cancelling_partition, cancelling_partition_indices};
use uncommon_core::{GroupElement, GroupFunction, LinearSystem, PrimeModulus};

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7, 11, 13])
}

fn small_prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7])
}

fn function(p: u32, n: u32) -> impl Strategy<Value = GroupFunction> {
    let size = (p as usize).pow(n);
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), size).prop_map(move |v| {
        let m = PrimeModulus::new(p, n).unwrap();
        GroupFunction::new(m, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

fn matrix(p: u32, rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    prop::collection::vec(prop::collection::vec(0..p, cols), rows)
}

proptest! {
    #[test]
    fn field_inverse_and_distributivity(p in prime(), a in 0u32..13, b in 0u32..13, c in 0u32..13) {
        let (a, b, c) = (a % p, b % p, c % p);
        if a != 0 {
            prop_assert_eq!(fp::mul(a, fp::inv(a, p), p), 1);
        }
        prop_assert_eq!(fp::mul(a, fp::add(b, c, p), p), fp::add(fp::mul(a, b, p), fp::mul(a, c, p), p));
        prop_assert_eq!(fp::add(a, fp::neg(a, p), p), 0);
        prop_assert_eq!(fp::reduce(fp::signed(a, p), p), a);
    }

    #[test]
    fn order_is_antisymmetric_and_negation_flips_sign(p in small_prime(), coords in prop::collection::vec(0u32..7, 2), other in prop::collection::vec(0u32..7, 2)) {
        let x = GroupElement::new(p, coords.iter().map(|c| c % p).collect());
        let y = GroupElement::new(p, other.iter().map(|c| c % p).collect());
        prop_assert_eq!(x.compare(&y).unwrap(), y.compare(&x).unwrap().reverse());
        if !x.is_zero() {
            prop_assert_eq!(x.sign(), x.neg().sign().reverse());
            prop_assert_eq!(x.abs().sign(), Ordering::Greater);
        }
    }

    #[test]
    fn rref_is_idempotent_and_kernel_is_annihilated(p in small_prime(), rows in 1usize..4, cols in 1usize..6, seed in matrix(7, 3, 5)) {
        let m: Vec<Vec<u32>> = seed.iter().take(rows).map(|r| r.iter().take(cols).map(|x| x % p).collect()).collect();
        let (r, pivots) = rref(&m, p);
        let (again, pivots2) = rref(&r, p);
        prop_assert_eq!(&r, &again);
        prop_assert_eq!(pivots, pivots2);
        let k = kernel_basis(&m, cols, p);
        prop_assert_eq!(k.len() + rank(&m, p), cols);
        for v in &k {
            prop_assert!(mat_vec(&m, v, p).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn transform_roundtrip(f in small_prime().prop_flat_map(|p| function(p, 2))) {
        let back = inverse_transform(&forward_transform(&f));
        for (a, b) in f.values().iter().zip(back.values()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        prop_assert!((forward_transform(&f).get(0) - f.mean()).norm() < 1e-12);
    }

    #[test]
    fn direct_and_fourier_agree(
        (p, f) in small_prime().prop_flat_map(|p| (Just(p), function(p, 1))),
        rows in matrix(7, 2, 4),
    ) {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        if let Ok(sys) = LinearSystem::new(p, &rows) {
            let d = density_direct(sys.space(), &f, DEFAULT_BUDGET).unwrap().value;
            let q = density_fourier(sys.space(), &forward_transform(&f), DEFAULT_BUDGET).unwrap().value;
            prop_assert!((d - q).norm() < 1e-9, "{} vs {}", d, q);
        }
    }

    #[test]
    fn tensor_is_multiplicative(
        (f, g) in (function(5, 1), function(5, 1)),
        rows in matrix(5, 1, 3),
    ) {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        if let Ok(sys) = LinearSystem::new(5, &rows) {
            let t = |h: &GroupFunction| density_direct(sys.space(), h, DEFAULT_BUDGET).unwrap().value;
            let fg = f.tensor(&g).unwrap();
            prop_assert!((t(&fg) - t(&f) * t(&g)).norm() < 1e-10);
        }
    }

    #[test]
    fn cancelling_partition_matches_counts(p in small_prime(), raw in prop::collection::vec(0u32..49, 0..8)) {
        let m = PrimeModulus::new(p, 2).unwrap();
        let idx: Vec<usize> = raw.iter().map(|&x| x as usize % m.size()).collect();
        let mut count: HashMap<usize, i64> = HashMap::new();
        for &h in &idx {
            *count.entry(h).or_default() += 1;
        }
        let expected = count.iter().all(|(&h, &c)| {
            if h == 0 { c % 2 == 0 } else { count.get(&m.neg_index(h)).copied().unwrap_or(0) == c }
        });
        prop_assert_eq!(cancelling_partition_indices(&m, &idx), expected);
        let elems: Vec<GroupElement> = idx.iter().map(|&h| m.element(h)).collect();
        prop_assert_eq!(cancelling_partition(&elems), expected);
    }

    #[test]
    fn pairwise_sum_matches_naive(v in prop::collection::vec(-1e3f64..1e3, 0..200)) {
        let c: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, -x)).collect();
        let naive: f64 = v.iter().sum();
        let s = pairwise_sum(&c);
        prop_assert!((s.re - naive).abs() < 1e-8);
        prop_assert!((s.im + naive).abs() < 1e-8);
    }
}
