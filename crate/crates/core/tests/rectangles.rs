use commlp::combinatorics::{BitString, MuParams};
use commlp::rectangles::{
    decompose_by_witness, exhaustive_max, max_weight_rectangle, max_weight_rectangle_in_family, mu_mass,
    rect_weight, witness_set, OracleConfig, RectFamily, Rectangle, WeightMatrix, DEFAULT_ENUMERATION_CAP,
};
use commlp::Rational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Best rectangle weight by double enumeration of row and column subsets.
fn brute_max(w: &[Vec<i64>], keep: impl Fn(&[usize], &[usize]) -> bool) -> i64 {
    let (r, c) = (w.len(), w[0].len());
    let mut best = 0;
    for a in 0u32..1 << r {
        for b in 0u32..1 << c {
            let rows: Vec<usize> = (0..r).filter(|i| a >> i & 1 == 1).collect();
            let cols: Vec<usize> = (0..c).filter(|j| b >> j & 1 == 1).collect();
            if rows.is_empty() || cols.is_empty() || !keep(&rows, &cols) {
                continue;
            }
            let s: i64 = rows.iter().flat_map(|&i| cols.iter().map(move |&j| w[i][j])).sum();
            best = best.max(s);
        }
    }
    best
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

proptest! {
    #[test]
    fn oracle_matches_double_enumeration(w in matrix()) {
        let m = WeightMatrix::from_rows(w.clone()).unwrap();
        let (rect, value) = max_weight_rectangle(&m, &OracleConfig::default()).unwrap();
        prop_assert_eq!(value, brute_max(&w, |_, _| true));
        prop_assert_eq!(rect_weight(&m, &rect), value);
    }

    #[test]
    fn rational_and_integer_oracles_agree(w in matrix()) {
        let ints = WeightMatrix::from_rows(w.clone()).unwrap();
        let rats = WeightMatrix::from_rows(
            w.iter().map(|r| r.iter().map(|&v| Rational::new(v.into(), 7.into())).collect()).collect(),
        ).unwrap();
        let (_, a) = max_weight_rectangle(&ints, &OracleConfig::default()).unwrap();
        let (_, b) = max_weight_rectangle(&rats, &OracleConfig::default()).unwrap();
        prop_assert_eq!(Rational::new(a.into(), 7.into()), b);
    }
}

#[test]
fn seeded_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let w: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-20..=20)).collect()).collect();
        let m = WeightMatrix::from_rows(w.clone()).unwrap();
        let (_, v) = max_weight_rectangle(&m, &OracleConfig::default()).unwrap();
        assert_eq!(v, brute_max(&w, |_, _| true), "{w:?}");
    }
}

/// Common coordinates of every row and column string.
fn common(n: usize, rows: &[usize], cols: &[usize]) -> u32 {
    rows.iter().chain(cols).fold((1u32 << n) - 1, |acc, &i| acc & i as u32)
}

#[test]
fn family_oracles_match_filtered_enumeration() {
    let n = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..60 {
        let w: Vec<Vec<i64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(-6..=6)).collect()).collect();
        let m = WeightMatrix::from_rows(w.clone()).unwrap();
        let families = [
            (RectFamily::Full, brute_max(&w, |_, _| true)),
            (RectFamily::Witness { k: 1 }, brute_max(&w, |r, c| common(n, r, c).count_ones() >= 1)),
            (RectFamily::Witness { k: 2 }, brute_max(&w, |r, c| common(n, r, c).count_ones() >= 2)),
            (
                RectFamily::AvoidDisjoint,
                brute_max(&w, |r, c| r.iter().all(|&x| c.iter().all(|&y| x & y != 0))),
            ),
        ];
        for (family, expected) in families {
            let hit = max_weight_rectangle_in_family(&m, n, family, &OracleConfig::default()).unwrap();
            assert_eq!(hit.value, expected, "trial {trial} {family}");
            assert!(hit.rect.is_empty() || family.contains(&hit.rect));
            let (_, ex, _) = exhaustive_max(&m, family, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_eq!(ex, expected);
        }
    }
}

fn random_rect(rng: &mut ChaCha8Rng, n: usize) -> Rectangle {
    let size = 1usize << n;
    let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..size).filter(|_| rng.gen_bool(0.4)).collect() };
    let (rows, cols) = (pick(rng), pick(rng));
    Rectangle::from_indices(size, size, rows, cols).unwrap()
}

/// `mu` mass of a rectangle by scanning every pair.
fn brute_mass(p: MuParams, rect: &Rectangle) -> Rational {
    let mut hits = 0i64;
    let mut total = 0i64;
    for x in 0u64..1 << p.n {
        for y in 0u64..1 << p.n {
            let ok = x.count_ones() as usize == p.m
                && y.count_ones() as usize == p.m
                && (x & y).count_ones() as usize == p.k;
            if ok {
                total += 1;
                if rect.contains(x as usize, y as usize) {
                    hits += 1;
                }
            }
        }
    }
    Rational::new(hits.into(), total.into())
}

#[test]
fn decomposition_identity_on_seeded_rectangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(1..=2usize.min(n - 1));
        let m = rng.gen_range(k + 1..=n);
        if MuParams::new(k + 1, n, m).is_err() {
            continue;
        }
        let rect = random_rect(&mut rng, n);
        let d = decompose_by_witness(&rect, k, n, m).unwrap();
        assert!(d.holds(), "n={n} k={k} m={m}");
        assert_eq!(d.lhs, brute_mass(MuParams { k: k + 1, n, m }, &rect));
        checked += 1;
    }
}

#[test]
fn mass_matches_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let rect = random_rect(&mut rng, 4);
        for p in [MuParams { k: 0, n: 4, m: 1 }, MuParams { k: 1, n: 4, m: 2 }, MuParams { k: 2, n: 4, m: 2 }] {
            assert_eq!(mu_mass(p, &rect).unwrap(), brute_mass(p, &rect));
        }
    }
}

#[test]
fn witness_sets_are_common_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let rect = random_rect(&mut rng, 3);
        if rect.is_empty() {
            continue;
        }
        let rows: Vec<usize> = rect.row_indices().collect();
        let cols: Vec<usize> = rect.col_indices().collect();
        let c = common(3, &rows, &cols);
        for k in 0..=3 {
            let w = witness_set(&rect, k);
            assert_eq!(w.is_some(), c.count_ones() as usize >= k);
            if let Some(w) = w {
                let bits: BitString = w.as_bits();
                assert_eq!(bits.mask() as u32 & c, bits.mask() as u32);
            }
        }
    }
    let zero = Rectangle::empty(8, 8);
    assert!(rect_weight(&WeightMatrix::<Rational>::zeros(8, 8), &zero).is_zero());
}
