use std::collections::BTreeSet;

use polymod::combinatorics::{enumerate_labels, WeightVector};
use polymod::complex::{build_complex, cusp_classes};
use polymod::lorentz::build_model;
use polymod::moduli::psi6;

/// Partitions of `{1..6}` into two triples, the one holding 1 first.
fn triple_partitions() -> Vec<[[u8; 3]; 2]> {
    let mut out = Vec::new();
    for a in 2..=6u8 {
        for b in a + 1..=6 {
            let rest: Vec<u8> = (2..=6).filter(|&x| x != a && x != b).collect();
            out.push([[1, a, b], [rest[0], rest[1], rest[2]]]);
        }
    }
    out
}

/// Whether `word`, read circularly, has `triple` in consecutive positions.
fn consecutive(word: &[u8], triple: &[u8; 3]) -> bool {
    (0..6).any(|k| {
        let mut w = [word[k], word[(k + 1) % 6], word[(k + 2) % 6]];
        w.sort();
        w == *triple
    })
}

#[test]
fn cusps_are_the_triple_partitions() {
    let c = build_complex(6, &WeightVector::equal(6)).unwrap();
    assert_eq!(c.cells().len(), 60);
    assert_eq!(c.pairings().len(), 180);
    let cusps = cusp_classes(&c).unwrap();
    assert_eq!(cusps.len(), 10);
    let got: BTreeSet<_> = cusps.iter().map(|k| k.partition).collect();
    let want: BTreeSet<_> = triple_partitions().into_iter().collect();
    assert_eq!(got, want);

    for cusp in &cusps {
        let labels: BTreeSet<String> = cusp.incidences.iter().map(|i| c.cells()[i.cell].to_string()).collect();
        let brute: BTreeSet<String> = enumerate_labels(6)
            .unwrap()
            .into_iter()
            .filter(|l| consecutive(l.word(), &cusp.partition[0]))
            .map(|l| l.to_string())
            .collect();
        assert_eq!(brute.len(), 18);
        assert_eq!(labels, brute, "cusp {:?}", cusp.partition);
        assert_eq!(cusp.incidences.len(), 18);
    }
}

#[test]
fn cusp_facets_are_tangent_at_equal_weight() {
    // At a cusp incidence the two pairs of adjacent facets, whose colliding
    // triples sum to π, are tangent.
    let theta = WeightVector::equal(6);
    let c = build_complex(6, &theta).unwrap();
    for cusp in cusp_classes(&c).unwrap() {
        for inc in &cusp.incidences {
            let m = c.cells()[inc.cell].marking();
            let shape = psi6(&theta, &m).unwrap();
            assert!(shape.params().iter().all(|p| (p - 1.0).abs() < 1e-9));
            let model = build_model(&theta, &m).unwrap();
            let f = inc.facets();
            for (a, b) in [(f[0], f[1]), (f[2], f[3])] {
                let cos = model.facet_cosine(a, b).unwrap();
                assert!((cos - 1.0).abs() < 1e-9, "cell {} facets {a},{b}: {cos}", inc.cell);
            }
        }
    }
}

#[test]
fn cusps_need_the_equal_weight() {
    let theta = polymod::combinatorics::sample_weight_seeded(6, 3).unwrap();
    let c = build_complex(6, &theta).unwrap();
    assert!(cusp_classes(&c).is_err());
}
