//! Published type numberings for m = 2 and m = 3. Entry `p` is the canonical
//! index of published type `p + 1`; `RatMatrix::permuted` with these arrays
//! turns canonical matrices into the published layout.

pub const BINARY: [usize; 5] = [2, 0, 3, 1, 4];

pub const TERNARY: [usize; 19] = [
    15, 12, 10, 6, 9, 16, 4, 13, 3, 1, 11, 7, 0, 17, 5, 14, 2, 8, 18,
];

pub fn permutation(m: usize) -> Option<&'static [usize]> {
    match m {
        2 => Some(&BINARY),
        3 => Some(&TERNARY),
        _ => None,
    }
}

/// Reorders a canonical vector into the published order.
pub fn reorder<T: Clone>(v: &[T], perm: &[usize]) -> Vec<T> {
    perm.iter().map(|&i| v[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::enumerate_types;

    #[test]
    fn permutations_are_bijections() {
        for (m, p) in [(2, &BINARY[..]), (3, &TERNARY[..])] {
            let mut s = p.to_vec();
            s.sort_unstable();
            assert_eq!(
                s,
                (0..enumerate_types(m).unwrap().len()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn published_activities() {
        let t = enumerate_types(3).unwrap();
        let a: Vec<u64> = reorder(&t, &TERNARY).iter().map(|t| t.activity()).collect();
        assert_eq!(
            a,
            vec![9, 8, 7, 7, 6, 6, 6, 5, 5, 5, 4, 4, 4, 3, 3, 2, 2, 1, 0]
        );
        let b: Vec<Vec<u32>> = reorder(&enumerate_types(2).unwrap(), &BINARY)
            .iter()
            .map(|t| t.k.clone())
            .collect();
        assert_eq!(
            b,
            vec![vec![0, 2], vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 0]]
        );
    }
}
