//! Small exact set-arithmetic helpers on element sets.
//!
//! Sets are sorted `Vec<u64>` of element indices. Everything here is a
//! direct enumeration; sizes are desk scale by construction.

use std::collections::HashSet;

use crate::group::Group;

/// `A + B = {a + b}` as a sorted set.
pub fn sumset(group: &Group, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: HashSet<u64> = HashSet::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.insert(group.add(x, y));
        }
    }
    let mut v: Vec<u64> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// `A - B` (Minkowski difference of sets, `{a - b}`).
pub fn difference_set(group: &Group, a: &[u64], b: &[u64]) -> Vec<u64> {
    let neg: Vec<u64> = b.iter().map(|&y| group.neg(y)).collect();
    sumset(group, a, &neg)
}

/// `c . A` as a sorted set (c must reduce to a unit for this to be a
/// bijection; callers enforce that).
pub fn dilate_set(group: &Group, c: i64, a: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(|&x| group.scale(c, x)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// `A + t` as a sorted set.
pub fn translate_set(group: &Group, a: &[u64], t: u64) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(|&x| group.add(x, t)).collect();
    v.sort_unstable();
    v
}

/// `-A` as a sorted set.
pub fn negate_set(group: &Group, a: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = a.iter().map(|&x| group.neg(x)).collect();
    v.sort_unstable();
    v
}

/// `|X \ Y|` for sorted slices.
pub fn count_outside(x: &[u64], y: &[u64]) -> usize {
    x.iter().filter(|e| y.binary_search(e).is_err()).count()
}

/// Sorted intersection.
pub fn intersect(x: &[u64], y: &[u64]) -> Vec<u64> {
    x.iter()
        .copied()
        .filter(|e| y.binary_search(e).is_ok())
        .collect()
}

/// True when `x` (sorted) is a subset of `y` (sorted).
pub fn is_subset(x: &[u64], y: &[u64]) -> bool {
    x.iter().all(|e| y.binary_search(e).is_ok())
}

/// Sorted union.
pub fn union(x: &[u64], y: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = x.iter().chain(y.iter()).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic_group;

    #[test]
    fn sumset_wraps() {
        let g = cyclic_group(7).unwrap();
        assert_eq!(sumset(&g, &[5, 6], &[3]), vec![1, 2]);
        assert_eq!(difference_set(&g, &[0], &[1, 2]), vec![5, 6]);
    }

    #[test]
    fn set_algebra() {
        let g = cyclic_group(11).unwrap();
        assert_eq!(dilate_set(&g, -1, &[1, 2]), vec![9, 10]);
        assert_eq!(count_outside(&[1, 2, 3], &[2, 3, 4]), 1);
        assert!(is_subset(&[2, 3], &[1, 2, 3]));
        assert_eq!(intersect(&[1, 2, 5], &[2, 5, 7]), vec![2, 5]);
        assert_eq!(union(&[1, 5], &[2, 5]), vec![1, 2, 5]);
        assert_eq!(translate_set(&g, &[10], 3), vec![2]);
        assert_eq!(negate_set(&g, &[1, 10]), vec![1, 10]);
    }
}
