use pairtransfer::compare::compare_structures;
use pairtransfer::hpl::{build_main_contraction, Choices};
use pairtransfer::lie_pair::{Bilinear, LiePair};
use pairtransfer::transfer::transfer;
use pairtransfer::Scalar;
use proptest::prelude::*;

fn q(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn pairs() -> Vec<LiePair> {
    vec![
        LiePair::from_antisymmetric(2, 1, &[(0, 1, 1, q(1))]).unwrap(),
        LiePair::from_antisymmetric(3, 1, &[(0, 1, 2, q(1))]).unwrap(),
        LiePair::from_antisymmetric(3, 1, &[(1, 2, 0, q(1))]).unwrap(),
        LiePair::from_antisymmetric(3, 2, &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))]).unwrap(),
    ]
}

fn choices(p: &LiePair, split: &[i64], aux: &[(usize, usize, usize, i64)]) -> Choices {
    let (n, m, k) = (p.dim_g(), p.dim_h(), p.dim_b());
    let splitting = (0..k).map(|l| (0..m).map(|a| Scalar::ratio(split[(l * m + a) % split.len()], 2)).collect()).collect();
    let entries: Vec<_> = aux.iter().map(|&(x, y, z, c)| (x % n, y % n, z % n, q(c))).collect();
    Choices { splitting: Some(splitting), aux: Some(Bilinear::from_entries(n, &entries).unwrap()) }
}

fn aux_strategy() -> impl Strategy<Value = Vec<(usize, usize, usize, i64)>> {
    proptest::collection::vec((0usize..3, 0usize..3, 0usize..3, -2i64..3), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn stasheff_and_weights_for_random_choices(
        which in 0usize..4,
        split in proptest::collection::vec(-3i64..4, 1..3),
        aux in aux_strategy(),
    ) {
        let p = &pairs()[which];
        let mc = build_main_contraction(p, &choices(p, &split, &aux), 3).unwrap();
        let arity = if which < 3 { 4 } else { 3 };
        let t = transfer(&mc, arity).unwrap();
        for n in 1..=arity {
            prop_assert!(t.stasheff_defect(n).max_defect.is_zero(), "arity {}", n);
            prop_assert!(t.bar_stasheff_defect(n).is_zero(), "arity {}", n);
        }
        for n in 2..=3 {
            for (inputs, out) in t.m_table(n) {
                let w: usize = inputs.iter().map(|&i| t.small_weights[i]).sum();
                prop_assert!(out.iter().all(|(j, _)| t.small_weights[j] <= w));
            }
        }
        prop_assert!(t.unit_check().pass);
    }

    #[test]
    fn comparison_has_identity_first_coefficient(
        which in 0usize..3,
        s1 in proptest::collection::vec(-3i64..4, 1..3),
        s2 in proptest::collection::vec(-3i64..4, 1..3),
        a1 in aux_strategy(),
        a2 in aux_strategy(),
    ) {
        let p = &pairs()[which];
        let cmp = compare_structures(p, &choices(p, &s1, &a1), &choices(p, &s2, &a2), 3, 2).unwrap();
        for c in &cmp.checks {
            prop_assert!(c.pass, "{:?}", c);
        }
    }
}
