use std::collections::BTreeSet;

use polymod::combinatorics::{canonical_label, enumerate_labels, face_config, Marking};

/// All permutations of `1..=n`, by Heap's algorithm.
fn permutations(n: u32) -> Vec<Vec<u32>> {
    fn heap(k: usize, a: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut a: Vec<u32> = (1..=n).collect();
    let mut out = Vec::new();
    heap(n as usize, &mut a, &mut out);
    out
}

/// Orbit representative under rotation and reversal: the smallest word.
fn orbit_min(word: &[u32]) -> Vec<u32> {
    let n = word.len();
    let mut best = word.to_vec();
    for r in 0..n {
        let rot: Vec<u32> = (0..n).map(|i| word[(i + r) % n]).collect();
        let rev: Vec<u32> = rot.iter().rev().copied().collect();
        best = best.min(rot).min(rev);
    }
    best
}

#[test]
fn label_counts_match_brute_force() {
    for n in 4..=7u32 {
        let orbits: BTreeSet<Vec<u32>> = permutations(n).iter().map(|w| orbit_min(w)).collect();
        let labels = enumerate_labels(n as usize).unwrap();
        assert_eq!(labels.len(), orbits.len(), "n = {n}");
    }
    assert_eq!(enumerate_labels(5).unwrap().len(), 12);
    assert_eq!(enumerate_labels(6).unwrap().len(), 60);
}

#[test]
fn canonical_label_is_orbit_invariant() {
    for w in permutations(6) {
        let l = canonical_label(&w).unwrap();
        let mut rev = w.clone();
        rev.reverse();
        assert_eq!(l, canonical_label(&rev).unwrap());
        let rot: Vec<u32> = w[2..].iter().chain(&w[..2]).copied().collect();
        assert_eq!(l, canonical_label(&rot).unwrap());
    }
}

#[test]
fn every_face_configuration_occurs_twice() {
    for n in [5usize, 6] {
        let mut seen = std::collections::BTreeMap::new();
        for l in enumerate_labels(n).unwrap() {
            let m: Marking = l.marking();
            for j in 0..n {
                *seen.entry(face_config(&m, j).unwrap().to_string()).or_insert(0) += 1;
            }
        }
        assert!(seen.values().all(|&c| c == 2), "n = {n}");
        let cells = if n == 5 { 12 } else { 60 };
        assert_eq!(seen.len(), cells * n / 2);
    }
}

#[test]
fn malformed_words_are_rejected() {
    assert!(canonical_label(&[1, 2, 2, 4]).is_err());
    assert!(canonical_label(&[1, 2, 5]).is_err());
    assert!(Marking::parse("12a45").is_err());
}
