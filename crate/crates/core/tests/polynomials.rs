use proptest::prelude::*;
use wronski::linalg::QMatrix;
use wronski::polynomials::*;
use wronski::rational::{frac, int, Rational};

fn poly(coeffs: &[i64]) -> RationalPoly {
    RationalPoly::from_i64(coeffs)
}

fn polys(p: usize, deg: usize) -> impl Strategy<Value = Vec<RationalPoly>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, deg + 1), p)
        .prop_map(|cs| cs.iter().map(|c| poly(c)).collect())
}

fn combine(a: &QMatrix, fs: &[RationalPoly]) -> Vec<RationalPoly> {
    (0..a.nrows())
        .map(|i| fs.iter().enumerate().fold(RationalPoly::zero(), |acc, (j, f)| &acc + &f.scale(&a[(i, j)])))
        .collect()
}

#[test]
fn monomial_wronskian_is_vandermonde() {
    for exps in [vec![0usize, 1], vec![2, 3], vec![1, 4, 6], vec![0, 2, 3, 7]] {
        let fs: Vec<RationalPoly> = exps.iter().map(|&e| RationalPoly::monomial(int(1), e)).collect();
        let p = exps.len();
        let mut c = int(1);
        for i in 0..p {
            for j in i + 1..p {
                c *= int(exps[j] as i64 - exps[i] as i64);
            }
        }
        let shift = exps.iter().sum::<usize>() - p * (p - 1) / 2;
        assert_eq!(wronskian(&fs).unwrap(), RationalPoly::monomial(c, shift));
    }
}

#[test]
fn sturm_counts_planted_roots() {
    let roots = [frac(-7, 2), int(-1), frac(1, 3), int(2), frac(9, 4)];
    let f = RationalPoly::from_roots(&roots);
    let s = SturmSequence::new(&f);
    assert_eq!(s.count_all(), 5);
    // half-open (a, b]
    assert_eq!(s.count(&int(-1), &int(2)), 2);
    assert_eq!(s.count(&int(-2), &int(2)), 3);
    // repeated roots count once
    let g = &f * &RationalPoly::from_roots(&[int(2), int(2)]);
    let sf = square_free_decomposition(&g);
    let total: usize = sf.iter().map(|(h, k)| h.degree().unwrap() * k).sum();
    assert_eq!(total, 7);
    let list = real_roots(&g, &RealInterval::all()).unwrap();
    assert_eq!(list.len(), 5);
    assert_eq!(list.total_multiplicity(), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn wronskian_is_multilinear(fs in polys(3, 4), g in polys(1, 4), a in -4i64..=4, b in -4i64..=4, slot in 0usize..3) {
        let g = &g[0];
        let mut mixed = fs.clone();
        mixed[slot] = &fs[slot].scale(&int(a)) + &g.scale(&int(b));
        let mut with_g = fs.clone();
        with_g[slot] = g.clone();
        let lhs = wronskian(&mixed).unwrap();
        let rhs = &wronskian(&fs).unwrap().scale(&int(a)) + &wronskian(&with_g).unwrap().scale(&int(b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn matrix_action_scales_by_det(fs in polys(3, 4), entries in prop::collection::vec(-3i64..=3, 9)) {
        let a = QMatrix::from_fn(3, 3, |i, j| int(entries[3 * i + j]));
        let lhs = wronskian(&combine(&a, &fs)).unwrap();
        prop_assert_eq!(lhs, wronskian(&fs).unwrap().scale(&a.det()));
    }

    #[test]
    fn degree_bound(fs in polys(2, 3)) {
        // deg f_i <= m + p - 1 with (m, p) = (2, 2)
        let w = wronskian(&fs).unwrap();
        prop_assert!(w.degree().map_or(true, |d| d <= 4));
    }

    #[test]
    fn sturm_matches_distinct_roots(raw in prop::collection::btree_set(-40i64..=40, 1..7), extra in prop::collection::vec(-3i64..=3, 0..3)) {
        let roots: Vec<Rational> = raw.iter().map(|&r| frac(r, 8)).collect();
        // multiply by a factor without real roots
        let mut f = RationalPoly::from_roots(&roots);
        if !extra.is_empty() {
            let c = extra.iter().map(|x| x * x).sum::<i64>() + 1;
            f = &f * &poly(&[c, 0, 1]);
        }
        let list = real_roots(&f, &RealInterval::all()).unwrap();
        prop_assert_eq!(list.len(), roots.len());
        prop_assert_eq!(SturmSequence::new(&f).count_all(), roots.len());
        for (r, want) in list.roots().iter().zip(&roots) {
            prop_assert!(r.lo() <= want && want <= r.hi());
        }
    }

    #[test]
    fn json_round_trip(c in prop::collection::vec((-50i64..=50, 1i64..=9), 0..6)) {
        let f = RationalPoly::from_coeffs(c.iter().map(|&(n, d)| frac(n, d)).collect());
        let s = serde_json::to_string(&f).unwrap();
        let back: RationalPoly = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn decimal_input_is_exact() {
    let f: RationalPoly = serde_json::from_str(r#"{"coeffs": ["0.125", "-3/4", 2]}"#).unwrap();
    assert_eq!(f.coeffs(), &[frac(1, 8), frac(-3, 4), int(2)]);
}
