//! Shipped example pairs. Bases list 𝔥 first.

use super::document::{BracketEntry, PairDocument};
use crate::scalar::Scalar;

fn doc(name: &str, dim_g: usize, dim_h: usize, brackets: &[(usize, usize, usize, i64)]) -> PairDocument {
    let mut entries = Vec::new();
    for &(i, j, k, c) in brackets {
        entries.push(BracketEntry { i, j, k, coeff: Scalar::from_int(c) });
        entries.push(BracketEntry { i: j, j: i, k, coeff: Scalar::from_int(-c) });
    }
    PairDocument {
        name: Some(name.to_string()),
        dim_g,
        dim_h,
        brackets: entries,
        splitting_matrix: None,
        aux_connection: None,
        truncation: None,
        max_arity: None,
        compare_with: None,
    }
}

/// All catalog entries, in a fixed order.
pub fn catalog() -> Vec<PairDocument> {
    vec![
        doc("abelian-2-1", 2, 1, &[]),
        doc("abelian-3-1", 3, 1, &[]),
        // [e, b] = b, 𝔥 = span{e}
        doc("solvable", 2, 1, &[(0, 1, 1, 1)]),
        // basis x, y, z with [x, y] = z, 𝔥 = span{x}
        doc("heisenberg-x", 3, 1, &[(0, 1, 2, 1)]),
        // basis z, x, y with [x, y] = z, 𝔥 = span{z}
        doc("heisenberg-center", 3, 1, &[(1, 2, 0, 1)]),
        // basis h, e, f, 𝔥 = span{h, e}
        doc("sl2-borel", 3, 2, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)]),
        doc("line-h0", 1, 0, &[]),
        doc("solvable-h0", 2, 0, &[(0, 1, 1, 1)]),
        doc("heisenberg-h0", 3, 0, &[(0, 1, 2, 1)]),
        doc("sl2-h0", 3, 0, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)]),
    ]
}

pub fn lookup(name: &str) -> Option<PairDocument> {
    catalog().into_iter().find(|d| d.name.as_deref() == Some(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_pairs_are_valid() {
        for d in catalog() {
            d.check_schema().unwrap();
            assert!(d.valid_pair().is_ok(), "{:?}", d.name);
        }
        assert!(lookup("solvable").is_some() && lookup("nope").is_none());
    }
}
