//! Tours, the distance matrix, and the cyclic tour-length cost.
//!
//! Internally a tour stores 0-based node indices. The textual form (and
//! every user-facing message) is 1-based, matching TSPLIB node numbering.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::error::{Error, Result};

/// Dense symmetric distance matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds the matrix from `f(i, j)` evaluated on the upper triangle and
    /// mirrored, so symmetry and the zero diagonal hold by construction.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    /// Cycle length of `order` without validation. Callers guarantee that
    /// `order` is a permutation of `0..n`.
    #[inline]
    pub(crate) fn cycle_length(&self, order: &[usize]) -> f64 {
        let mut total = 0.0;
        for w in order.windows(2) {
            total += self.get(w[0], w[1]);
        }
        if let (Some(&first), Some(&last)) = (order.first(), order.last()) {
            total += self.get(last, first);
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TourViolation {
    #[error("length mismatch: expected {expected} nodes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("node {} out of range 1..={n}", .node + 1)]
    OutOfRange { node: usize, n: usize },
    #[error("duplicate {} / missing {}", .duplicate + 1, .missing + 1)]
    Duplicate { duplicate: usize, missing: usize },
}

/// Checks that `order` (0-based) is a permutation of `0..n`.
pub fn validate_tour(order: &[usize], n: usize) -> std::result::Result<(), TourViolation> {
    if order.len() != n {
        return Err(TourViolation::LengthMismatch { expected: n, found: order.len() });
    }
    let mut seen = vec![false; n];
    let mut duplicate = None;
    for &v in order {
        if v >= n {
            return Err(TourViolation::OutOfRange { node: v, n });
        }
        if seen[v] {
            duplicate.get_or_insert(v);
        }
        seen[v] = true;
    }
    match duplicate {
        None => Ok(()),
        Some(duplicate) => {
            let missing = seen.iter().position(|s| !s).expect("a duplicate implies a gap");
            Err(TourViolation::Duplicate { duplicate, missing })
        }
    }
}

/// A cyclic route: a permutation of the node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// From 0-based indices.
    pub fn new(order: Vec<usize>) -> std::result::Result<Self, TourViolation> {
        validate_tour(&order, order.len())?;
        Ok(Self { order })
    }

    /// From 1-based node ids, as printed in TSPLIB tour listings.
    pub fn from_one_based(ids: &[usize]) -> std::result::Result<Self, TourViolation> {
        let n = ids.len();
        let order = ids
            .iter()
            .map(|&id| id.checked_sub(1).ok_or(TourViolation::OutOfRange { node: usize::MAX, n }))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(order)
    }

    pub fn identity(n: usize) -> Self {
        Self { order: (0..n).collect() }
    }

    pub(crate) fn from_vec_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(validate_tour(&order, order.len()).is_ok());
        Self { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.order.iter().map(|v| v + 1).collect()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.order
    }
}

/// Whitespace-separated 1-based node ids.
impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Tour {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ids = s
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidConfig(format!("bad node id `{t}` in tour")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Tour::from_one_based(&ids)?)
    }
}

impl Serialize for Tour {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Tour {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(deserializer)?;
        Tour::from_one_based(&ids).map_err(serde::de::Error::custom)
    }
}

/// The cost function: total length of the closed cycle.
pub fn tour_length(tour: &Tour, dmat: &DistanceMatrix) -> Result<f64> {
    if tour.len() != dmat.n() {
        return Err(Error::DimensionMismatch { expected: dmat.n(), found: tour.len() });
    }
    Ok(dmat.cycle_length(tour.order()))
}

/// Uniformly random permutation of `0..n` (Fisher-Yates).
pub fn random_tour<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tour> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!("a tour needs at least 3 nodes, got {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Ok(Tour { order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> DistanceMatrix {
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        DistanceMatrix::from_fn(4, |i, j| {
            let (a, b): ((f64, f64), (f64, f64)) = (pts[i], pts[j]);
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
        })
    }

    #[test]
    fn unit_square_perimeter() {
        let t = Tour::from_one_based(&[1, 2, 3, 4]).unwrap();
        assert_eq!(tour_length(&t, &unit_square()).unwrap(), 4.0);
    }

    #[test]
    fn length_dimension_mismatch() {
        let t = Tour::identity(3);
        assert!(matches!(
            tour_length(&t, &unit_square()),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn validation_messages() {
        assert!(Tour::from_one_based(&[1, 2, 3, 4, 5]).is_ok());
        let dup = Tour::from_one_based(&[1, 2, 2, 4, 5]).unwrap_err();
        assert_eq!(dup.to_string(), "duplicate 2 / missing 3");
        let short = validate_tour(&[0, 1, 2], 5).unwrap_err();
        assert!(short.to_string().starts_with("length mismatch"), "{short}");
        assert!(matches!(
            validate_tour(&[0, 1, 7], 3),
            Err(TourViolation::OutOfRange { node: 7, n: 3 })
        ));
        assert!(Tour::from_one_based(&[0, 1, 2]).is_err());
    }

    #[test]
    fn random_tour_rejects_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_tour(2, &mut rng).is_err());
        let t = random_tour(3, &mut rng).unwrap();
        assert!(validate_tour(t.order(), 3).is_ok());
    }

    #[test]
    fn random_tour_deterministic_per_seed() {
        let a = random_tour(20, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = random_tour(20, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_tour_is_uniform_over_s4() {
        // 24 permutations of 4 nodes, 10^4 draws: each count should be
        // within 3 sigma of N/24, sigma = sqrt(N p (1-p)).
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let draws = 10_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(random_tour(4, &mut rng).unwrap().into_inner()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 24);
        let p = 1.0 / 24.0;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (perm, c) in counts {
            assert!((c as f64 - mean).abs() <= 3.0 * sigma, "{perm:?} drawn {c} times");
        }
    }

    #[test]
    fn text_round_trip() {
        let t: Tour = "3 1 2 4".parse().unwrap();
        assert_eq!(t.order(), &[2, 0, 1, 3]);
        assert_eq!(t.to_string(), "3 1 2 4");
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, "[3,1,2,4]");
        assert_eq!(serde_json::from_str::<Tour>(&json).unwrap(), t);
    }
}
