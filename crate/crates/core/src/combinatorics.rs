//! Weight vectors, cyclic labels and degenerate configurations.
//!
//! A weight vector is a point of the open set of `n` positive angles that sum
//! to `2π` with every pairwise sum below `π`. A label is a circular
//! permutation of `1..=n` read up to rotation and reversal; it names one
//! connected component of the configuration space and therefore one
//! polyhedron. Geometry needs a *starting point* on the circle as well, which
//! is what [`Marking`] carries.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on `Σθ = 2π`.
pub const TOL_SUM: f64 = 1e-12;

/// Attempts allowed to [`sample_weight`] before giving up.
pub const REJECTION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("need at least 4 angles, got {0}")]
    TooFew(usize),
    #[error("angle {index} is not a finite number")]
    NonFinite { index: usize },
    #[error("angle {index} = {value} is not positive")]
    NonPositive { index: usize, value: f64 },
    #[error("angles sum to {sum}, which differs from 2π by more than {tol}")]
    SumMismatch { sum: f64, tol: f64 },
    #[error("θ{i} + θ{j} = {sum} is not below π")]
    PairSumTooLarge { i: usize, j: usize, sum: f64 },
    #[error("no admissible weight found after {0} attempts")]
    RejectionBudgetExceeded(usize),
}

impl WeightError {
    pub fn kind(&self) -> &'static str {
        match self {
            WeightError::TooFew(_) => "TooFew",
            WeightError::NonFinite { .. } => "NonFinite",
            WeightError::NonPositive { .. } => "NonPositive",
            WeightError::SumMismatch { .. } => "SumMismatch",
            WeightError::PairSumTooLarge { .. } => "PairSumTooLarge",
            WeightError::RejectionBudgetExceeded(_) => "RejectionBudgetExceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("{0:?} is not a permutation of 1..=n")]
    NotAPermutation(Vec<u32>),
    #[error("n = {0} is outside the supported range 4..=8")]
    OutOfRange(usize),
    #[error("cannot parse label {0:?}")]
    Parse(String),
    #[error("facet index {index} out of range for n = {n}")]
    BadIndex { index: usize, n: usize },
    #[error("cannot collapse {collapsed} of {n} edges")]
    TooDegenerate { collapsed: usize, n: usize },
}

impl LabelError {
    pub fn kind(&self) -> &'static str {
        match self {
            LabelError::NotAPermutation(_) => "NotAPermutation",
            LabelError::OutOfRange(_) => "OutOfRange",
            LabelError::Parse(_) => "NotAPermutation",
            LabelError::BadIndex { .. } => "BadIndex",
            LabelError::TooDegenerate { .. } => "TooDegenerate",
        }
    }
}

/// A validated point of the weight domain.
///
/// `theta[k]` is the external angle carried by the marked point `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    theta: Vec<f64>,
}

impl WeightVector {
    /// The equal weight `(2π/n, …, 2π/n)`.
    pub fn equal(n: usize) -> Self {
        WeightVector { theta: vec![TAU / n as f64; n] }
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Angle carried by the marked point `point` (1-based).
    pub fn of_point(&self, point: u8) -> f64 {
        self.theta[point as usize - 1]
    }

    /// True when every angle is within `tol` of `2π/n`.
    pub fn is_equal_weight(&self, tol: f64) -> bool {
        let e = TAU / self.n() as f64;
        self.theta.iter().all(|t| (t - e).abs() <= tol)
    }

    /// Max-norm distance between two weight vectors of the same size.
    pub fn distance_inf(&self, other: &WeightVector) -> f64 {
        self.theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Checks membership in the weight domain with the default [`TOL_SUM`].
pub fn validate_weight(theta: &[f64]) -> Result<WeightVector, WeightError> {
    validate_weight_with(theta, TOL_SUM)
}

/// Checks membership in the weight domain; on success the angles are rescaled
/// uniformly so that they sum to `2π` up to rounding.
pub fn validate_weight_with(theta: &[f64], tol_sum: f64) -> Result<WeightVector, WeightError> {
    let n = theta.len();
    if n < 4 {
        return Err(WeightError::TooFew(n));
    }
    if let Some(index) = theta.iter().position(|t| !t.is_finite()) {
        return Err(WeightError::NonFinite { index: index + 1 });
    }
    if let Some(index) = theta.iter().position(|&t| t <= 0.0) {
        return Err(WeightError::NonPositive { index: index + 1, value: theta[index] });
    }
    let sum: f64 = theta.iter().sum();
    if (sum - TAU).abs() > tol_sum {
        return Err(WeightError::SumMismatch { sum, tol: tol_sum });
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = theta[i] + theta[j];
            if s >= PI {
                return Err(WeightError::PairSumTooLarge { i: i + 1, j: j + 1, sum: s });
            }
        }
    }
    let scale = TAU / sum;
    Ok(WeightVector { theta: theta.iter().map(|t| t * scale).collect() })
}

/// Deterministic rejection sampler: uniform points of the simplex scaled to
/// `2π`, kept when the pairwise-sum constraint holds.
pub fn sample_weight<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<WeightVector, WeightError> {
    if n < 4 {
        return Err(WeightError::TooFew(n));
    }
    let mut draw = vec![0.0; n];
    for _ in 0..REJECTION_BUDGET {
        for d in draw.iter_mut() {
            *d = rng.sample::<f64, _>(Exp1);
        }
        let total: f64 = draw.iter().sum();
        let theta: Vec<f64> = draw.iter().map(|d| TAU * d / total).collect();
        if let Ok(w) = validate_weight(&theta) {
            return Ok(w);
        }
    }
    Err(WeightError::RejectionBudgetExceeded(REJECTION_BUDGET))
}

/// [`sample_weight`] with a fresh generator seeded from `seed`.
pub fn sample_weight_seeded(n: usize, seed: u64) -> Result<WeightVector, WeightError> {
    sample_weight(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Generator for trial `index` of a run seeded with `seed`. Trials get
/// independent streams, so results do not depend on evaluation order.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_permutation(word: &[u32]) -> Result<Vec<u8>, LabelError> {
    let n = word.len();
    let mut seen = vec![false; n];
    for &w in word {
        let w = w as usize;
        if w == 0 || w > n || seen[w - 1] {
            return Err(LabelError::NotAPermutation(word.to_vec()));
        }
        seen[w - 1] = true;
    }
    if n < 3 || n > u8::MAX as usize {
        return Err(LabelError::NotAPermutation(word.to_vec()));
    }
    Ok(word.iter().map(|&w| w as u8).collect())
}

fn parse_word(text: &str) -> Result<Vec<u32>, LabelError> {
    let text = text.trim().trim_start_matches('⟨').trim_end_matches('⟩').trim();
    let err = || LabelError::Parse(text.to_string());
    if text.contains(',') || text.contains(' ') {
        text.split([',', ' '])
            .filter(|t| !t.is_empty())
            .map(|t| t.trim().parse::<u32>().map_err(|_| err()))
            .collect()
    } else {
        text.chars().map(|c| c.to_digit(10).ok_or_else(err)).collect()
    }
}

fn rotate_to_one(word: &[u8]) -> Vec<u8> {
    let start = word.iter().position(|&w| w == 1).expect("permutation contains 1");
    word[start..].iter().chain(&word[..start]).copied().collect()
}

/// A circular permutation of `1..=n` up to rotation and reversal, stored in
/// canonical form: `1` first, then the lexicographically smaller of the two
/// reading directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    word: Vec<u8>,
}

impl Label {
    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// The marking that reads this label from the point `1`.
    pub fn marking(&self) -> Marking {
        Marking { word: self.word.clone() }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, &self.word)
    }
}

fn write_word(f: &mut fmt::Formatter<'_>, word: &[u8]) -> fmt::Result {
    let sep = if word.len() > 9 { "," } else { "" };
    for (k, w) in word.iter().enumerate() {
        if k > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{w}")?;
    }
    Ok(())
}

/// Canonical representative of the class of `word` under rotation and
/// reversal.
pub fn canonical_label(word: &[u32]) -> Result<Label, LabelError> {
    let word = check_permutation(word)?;
    Ok(canonical_of(&word))
}

fn canonical_of(word: &[u8]) -> Label {
    let forward = rotate_to_one(word);
    let mut reversed: Vec<u8> = word.iter().rev().copied().collect();
    reversed = rotate_to_one(&reversed);
    Label { word: forward.min(reversed) }
}

/// All canonical labels for `n` marked points, sorted; there are `(n−1)!/2`.
pub fn enumerate_labels(n: usize) -> Result<Vec<Label>, LabelError> {
    if !(4..=8).contains(&n) {
        return Err(LabelError::OutOfRange(n));
    }
    let mut out = Vec::new();
    let mut rest: Vec<u8> = (2..=n as u8).collect();
    permute(&mut rest, 0, &mut |tail| {
        // Canonical iff the second entry is smaller than the last one.
        if tail[0] < tail[tail.len() - 1] {
            let mut word = Vec::with_capacity(n);
            word.push(1);
            word.extend_from_slice(tail);
            out.push(Label { word });
        }
    });
    out.sort();
    Ok(out)
}

fn permute(items: &mut Vec<u8>, k: usize, visit: &mut impl FnMut(&[u8])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// A label read from a chosen starting point: the ordered word
/// `⟨i₁ i₂ … iₙ⟩`. Edge `x_{i_j}` of the polygon sits at position `j − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Marking {
    word: Vec<u8>,
}

impl Marking {
    pub fn new(word: &[u32]) -> Result<Self, LabelError> {
        Ok(Marking { word: check_permutation(word)? })
    }

    /// Accepts `"12345"`, `"1,2,3,4,5"` or `"⟨12345⟩"`.
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        Marking::new(&parse_word(text)?)
    }

    /// `⟨1 2 … n⟩`.
    pub fn identity(n: usize) -> Self {
        Marking { word: (1..=n as u8).collect() }
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Marked point at position `j` (0-based, cyclic).
    pub fn point(&self, j: usize) -> u8 {
        self.word[j % self.word.len()]
    }

    /// Angle turned before edge `j`, i.e. `θ_{i_{j+1}}`.
    pub fn angle(&self, theta: &WeightVector, j: usize) -> f64 {
        theta.of_point(self.point(j))
    }

    pub fn label(&self) -> Label {
        canonical_of(&self.word)
    }

    /// Sum of the `len` consecutive angles starting at position `j`.
    pub fn run_sum(&self, theta: &WeightVector, j: usize, len: usize) -> f64 {
        (j..j + len).map(|k| self.angle(theta, k)).sum()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_word(f, &self.word)
    }
}

impl From<&Label> for Marking {
    fn from(label: &Label) -> Self {
        label.marking()
    }
}

/// A degenerate configuration: the cyclic arrangement of marked points after
/// some adjacent points collide, up to rotation and reversal.
///
/// Blocks are sorted sets of colliding points; a block of size one is an
/// ordinary point. One two-point block is a facet, two pairs or a triple is a
/// codimension-two face, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DegenerateConfig {
    blocks: Vec<Vec<u8>>,
}

impl DegenerateConfig {
    /// Collapses edges `edges` of `marking`; edge `j` joins positions `j` and
    /// `j + 1`.
    pub fn collapse(marking: &Marking, edges: &[usize]) -> Result<Self, LabelError> {
        let n = marking.n();
        let mut joined = vec![false; n];
        for &e in edges {
            if e >= n {
                return Err(LabelError::BadIndex { index: e, n });
            }
            joined[e] = true;
        }
        let collapsed = joined.iter().filter(|&&j| j).count();
        if collapsed + 1 >= n {
            return Err(LabelError::TooDegenerate { collapsed, n });
        }
        // Start right after an edge that is not collapsed, so no block wraps.
        let start = (0..n).find(|&j| !joined[j]).expect("some edge survives") + 1;
        let mut blocks = Vec::new();
        let mut current = Vec::new();
        for k in 0..n {
            let pos = (start + k) % n;
            current.push(marking.point(pos));
            if !joined[pos] {
                current.sort_unstable();
                blocks.push(std::mem::take(&mut current));
            }
        }
        Ok(DegenerateConfig { blocks: canonical_cycle(blocks) })
    }

    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    /// Number of collisions, i.e. the codimension of the face.
    pub fn codim(&self) -> usize {
        self.blocks.iter().map(|b| b.len() - 1).sum()
    }
}

fn canonical_cycle(blocks: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let m = blocks.len();
    let reversed: Vec<Vec<u8>> = blocks.iter().rev().cloned().collect();
    let mut best: Option<Vec<Vec<u8>>> = None;
    for seq in [&blocks, &reversed] {
        for r in 0..m {
            let cand: Vec<Vec<u8>> = seq[r..].iter().chain(&seq[..r]).cloned().collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

impl fmt::Display for DegenerateConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            if b.len() == 1 {
                write!(f, "{}", b[0])?;
            } else {
                f.write_str("(")?;
                for p in b {
                    write!(f, "{p}")?;
                }
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

/// Key of facet `facet` (0-based) of `marking`: the configuration where the
/// points at positions `facet` and `facet + 1` collide. Two facets glue
/// exactly when their keys are equal.
pub fn face_config(marking: &Marking, facet: usize) -> Result<DegenerateConfig, LabelError> {
    DegenerateConfig::collapse(marking, &[facet])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn w(v: &[u32]) -> Vec<u8> {
        canonical_label(v).unwrap().word().to_vec()
    }

    #[test]
    fn equal_weight_is_valid() {
        let t = vec![TAU / 5.0; 5];
        assert!(validate_weight(&t).is_ok());
    }

    #[test]
    fn rejects_large_pair() {
        let t = [1.6, 1.6, 1.0, 1.0, TAU - 5.2];
        match validate_weight(&t) {
            Err(WeightError::PairSumTooLarge { i: 1, j: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_short_sum() {
        let e = TAU / 5.0;
        let t = [e, e, e, e, e - 0.1];
        assert!(matches!(validate_weight(&t), Err(WeightError::SumMismatch { .. })));
    }

    #[test]
    fn rejects_nonpositive_and_short_input() {
        assert!(matches!(
            validate_weight(&[0.0, 2.0, 2.0, TAU - 4.0]),
            Err(WeightError::NonPositive { index: 1, .. })
        ));
        assert!(matches!(validate_weight(&[1.0, 2.0, 3.0]), Err(WeightError::TooFew(3))));
        assert!(matches!(
            validate_weight(&[f64::NAN, 1.0, 1.0, 1.0]),
            Err(WeightError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn renormalizes_sum() {
        let e = TAU / 6.0;
        let t = [e + 4e-13, e, e, e, e, e];
        let v = validate_weight(&t).unwrap();
        let s: f64 = v.angles().iter().sum();
        assert!((s - TAU).abs() < 1e-14);
    }

    #[test]
    fn label_counts() {
        assert_eq!(enumerate_labels(4).unwrap().len(), 3);
        assert_eq!(enumerate_labels(5).unwrap().len(), 12);
        assert_eq!(enumerate_labels(6).unwrap().len(), 60);
        assert_eq!(enumerate_labels(7).unwrap().len(), 360);
        assert!(matches!(enumerate_labels(3), Err(LabelError::OutOfRange(3))));
        assert!(matches!(enumerate_labels(9), Err(LabelError::OutOfRange(9))));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(w(&[3, 4, 5, 1, 2]), vec![1, 2, 3, 4, 5]);
        assert_eq!(w(&[1, 5, 4, 3, 2]), vec![1, 2, 3, 4, 5]);
        assert_eq!(w(&[2, 1, 4, 3, 5]), vec![1, 2, 5, 3, 4]);
        assert!(matches!(canonical_label(&[1, 2, 2, 4]), Err(LabelError::NotAPermutation(_))));
        assert!(matches!(canonical_label(&[1, 2, 5, 4]), Err(LabelError::NotAPermutation(_))));
    }

    #[test]
    fn parse_forms() {
        let a = Marking::parse("21435").unwrap();
        let b = Marking::parse("2,1,4,3,5").unwrap();
        let c = Marking::parse("⟨21435⟩").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_string(), "21435");
        assert!(Marking::parse("2143x").is_err());
        assert!(Marking::parse("2144").is_err());
    }

    #[test]
    fn face_keys() {
        let m = Marking::identity(5);
        let k1 = face_config(&m, 0).unwrap();
        let other = Marking::parse("21345").unwrap();
        assert_eq!(k1, face_config(&other, 0).unwrap());
        let k2 = face_config(&m, 1).unwrap();
        assert_eq!(k2.blocks(), &[vec![1], vec![2, 3], vec![4], vec![5]]);
        assert_eq!(k2.to_string(), "1(23)45");
        assert!(face_config(&m, 5).is_err());
    }

    #[test]
    fn wrapped_collapse() {
        let m = Marking::identity(6);
        // Edge 5 joins positions 5 and 0, i.e. points 6 and 1.
        let k = DegenerateConfig::collapse(&m, &[5, 0]).unwrap();
        assert_eq!(k.codim(), 2);
        assert!(k.blocks().contains(&vec![1, 2, 6]));
        assert!(DegenerateConfig::collapse(&m, &[0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn five_point_faces_pair_up() {
        let mut seen: HashMap<DegenerateConfig, Vec<(usize, usize)>> = HashMap::new();
        for (c, l) in enumerate_labels(5).unwrap().iter().enumerate() {
            for k in 0..5 {
                seen.entry(face_config(&l.marking(), k).unwrap()).or_default().push((c, k));
            }
        }
        assert_eq!(seen.len(), 30);
        for slots in seen.values() {
            assert_eq!(slots.len(), 2);
            assert_ne!(slots[0].0, slots[1].0);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_weight_seeded(5, 42).unwrap();
        let b = sample_weight_seeded(5, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_weight(6, &mut trial_rng(7, 3)).unwrap();
        let d = sample_weight(6, &mut trial_rng(7, 3)).unwrap();
        assert_eq!(c, d);
        assert_ne!(c, sample_weight(6, &mut trial_rng(7, 4)).unwrap());
    }

    #[test]
    fn samples_validate() {
        for n in [5, 6] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..10_000 {
                let s = sample_weight(n, &mut rng).unwrap();
                validate_weight(s.angles()).unwrap();
            }
        }
    }
}
