//! Swap, shift and symmetry transformations on tours.
//!
//! Every move has two realizations: [`Move::apply_into`] rearranges the tour
//! directly, and [`Move::to_matrix`] builds the equivalent permutation
//! matrix `G` so that the new tour is `G * x`. The matrix construction is
//! written independently of the index form and is used to cross-check it.
//!
//! Positions are 0-based in the API; the textual form of a move is 1-based.

use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tour::Tour;

const SYMMETRY_MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorParams {
    /// Number of positions whose contents a swap permutes (m_a).
    pub swap_factor: usize,
    /// Longest block a shift moves (m_b).
    pub shift_factor: usize,
    /// Longest fixed center of a symmetry (m_c).
    pub symmetry_factor: usize,
    /// Redraw swap moves whose permutation happens to be the identity.
    #[serde(default)]
    pub skip_identity_swaps: bool,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self { swap_factor: 2, shift_factor: 1, symmetry_factor: 0, skip_identity_swaps: false }
    }
}

impl OperatorParams {
    pub fn validate(&self) -> Result<()> {
        if self.swap_factor < 2 {
            return Err(Error::InvalidConfig(format!(
                "swap factor must be at least 2, got {}",
                self.swap_factor
            )));
        }
        if self.shift_factor < 1 {
            return Err(Error::InvalidConfig("shift factor must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Swap,
    Shift,
    Symmetry,
}

impl OperatorKind {
    /// Phase order of one outer iteration.
    pub const PHASES: [OperatorKind; 3] =
        [OperatorKind::Swap, OperatorKind::Shift, OperatorKind::Symmetry];

    pub fn sample<R: Rng + ?Sized>(
        self,
        n: usize,
        params: &OperatorParams,
        rng: &mut R,
    ) -> Result<Move> {
        match self {
            OperatorKind::Swap => loop {
                let mv = sample_swap(n, params.swap_factor, rng)?;
                if !params.skip_identity_swaps || !mv.is_identity() {
                    return Ok(mv);
                }
            },
            OperatorKind::Shift => sample_shift(n, params.shift_factor, rng),
            OperatorKind::Symmetry => sample_symmetry(n, params.symmetry_factor, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    /// The content at `targets[i]` is replaced by the old content at
    /// `sources[i]`; `sources` is a permutation of `targets`.
    Swap { targets: Vec<usize>, sources: Vec<usize> },
    /// Remove the block `start..start + len` and reinsert it right after the
    /// element that was at position `insert_after`.
    Shift { start: usize, len: usize, insert_after: usize },
    /// Reverse positions `pivot + 1 - half ..= pivot + center + half`: the
    /// `center` positions after the pivot stay put (up to reflection around
    /// themselves) and the `half` positions on either side trade places.
    Symmetry { pivot: usize, center: usize, half: usize },
}

impl Move {
    pub fn kind(&self) -> OperatorKind {
        match self {
            Move::Swap { .. } => OperatorKind::Swap,
            Move::Shift { .. } => OperatorKind::Shift,
            Move::Symmetry { .. } => OperatorKind::Symmetry,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Move::Swap { targets, sources } => targets == sources,
            _ => false,
        }
    }

    /// Inclusive bounds of the reversed block of a symmetry move.
    fn symmetry_span(pivot: usize, center: usize, half: usize) -> (usize, usize) {
        (pivot + 1 - half, pivot + center + half)
    }

    /// Checks the move against a tour of `n` nodes.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMove(format!("{self}: {msg}")));
        match self {
            Move::Swap { targets, sources } => {
                if targets.len() != sources.len() {
                    return bad("targets and sources differ in length".into());
                }
                if let Some(&p) = targets.iter().find(|&&p| p >= n) {
                    return bad(format!("position {} beyond n = {n}", p + 1));
                }
                let mut t = targets.clone();
                t.sort_unstable();
                if t.windows(2).any(|w| w[0] == w[1]) {
                    return bad("repeated target position".into());
                }
                let mut s = sources.clone();
                s.sort_unstable();
                if s != t {
                    return bad("sources are not a permutation of targets".into());
                }
                Ok(())
            }
            Move::Shift { start, len, insert_after } => {
                if *len == 0 || start + len > n {
                    return bad(format!("block out of range for n = {n}"));
                }
                if *insert_after >= n {
                    return bad(format!("insertion point beyond n = {n}"));
                }
                if (*start..start + len).contains(insert_after) {
                    return bad("insertion point inside the block".into());
                }
                if *start > 0 && *insert_after == start - 1 {
                    return bad("insertion right before the block is the identity".into());
                }
                Ok(())
            }
            Move::Symmetry { pivot, center, half } => {
                if *half == 0 {
                    return bad("half length must be at least 1".into());
                }
                if pivot + 1 < *half || pivot + center + half >= n {
                    return bad(format!("reversed block out of range for n = {n}"));
                }
                Ok(())
            }
        }
    }

    /// Writes the transformed `src` into `dst`. The move must be valid for
    /// `src.len()`.
    pub fn apply_into(&self, src: &[usize], dst: &mut Vec<usize>) {
        dst.clear();
        match self {
            Move::Swap { targets, sources } => {
                dst.extend_from_slice(src);
                for (&t, &s) in targets.iter().zip(sources) {
                    dst[t] = src[s];
                }
            }
            &Move::Shift { start, len, insert_after } => {
                let end = start + len;
                if insert_after >= end {
                    dst.extend_from_slice(&src[..start]);
                    dst.extend_from_slice(&src[end..=insert_after]);
                    dst.extend_from_slice(&src[start..end]);
                    dst.extend_from_slice(&src[insert_after + 1..]);
                } else {
                    dst.extend_from_slice(&src[..=insert_after]);
                    dst.extend_from_slice(&src[start..end]);
                    dst.extend_from_slice(&src[insert_after + 1..start]);
                    dst.extend_from_slice(&src[end..]);
                }
            }
            &Move::Symmetry { pivot, center, half } => {
                dst.extend_from_slice(src);
                let (lo, hi) = Self::symmetry_span(pivot, center, half);
                dst[lo..=hi].reverse();
            }
        }
    }

    /// Permutation matrix of this move for tours of `n` nodes, assembled
    /// row by row from the definition of each transformation.
    pub fn to_matrix(&self, n: usize) -> Result<PermutationMatrix> {
        self.validate(n)?;
        let mut perm: Vec<usize> = (0..n).collect();
        match self {
            Move::Swap { targets, sources } => {
                // Rows `targets` of the identity are overwritten by rows `sources`.
                for (&t, &s) in targets.iter().zip(sources) {
                    perm[t] = s;
                }
            }
            &Move::Shift { start, len, insert_after } => {
                let q = insert_after;
                for (i, p) in perm.iter_mut().enumerate() {
                    *p = if q >= start + len {
                        // Block lands after q: positions start..=q-len take the
                        // elements that followed the block, then the block.
                        if i < start || i > q {
                            i
                        } else if i + len <= q {
                            i + len
                        } else {
                            start + (i + len - q - 1)
                        }
                    } else if i <= q || i >= start + len {
                        i
                    } else if i <= q + len {
                        start + (i - q - 1)
                    } else {
                        i - len
                    };
                }
            }
            &Move::Symmetry { pivot, center, half } => {
                let (lo, hi) = Self::symmetry_span(pivot, center, half);
                for (i, p) in perm.iter_mut().enumerate().take(hi + 1).skip(lo) {
                    *p = lo + hi - i;
                }
            }
        }
        PermutationMatrix::from_perm(perm)
    }
}

/// `swap 2,4,5->5,2,4`, `shift [2..3]->after 4`, `sym 3,0,2` (1-based).
impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",");
        match self {
            Move::Swap { targets, sources } => {
                write!(f, "swap {}->{}", list(targets), list(sources))
            }
            Move::Shift { start, len, insert_after } => {
                write!(f, "shift [{}..{}]->after {}", start + 1, start + len, insert_after + 1)
            }
            Move::Symmetry { pivot, center, half } => {
                write!(f, "sym {},{},{}", pivot + 1, center, half)
            }
        }
    }
}

/// Draws `swap_factor` distinct positions uniformly and a uniformly random
/// rearrangement of them. The rearrangement may be the identity.
pub fn sample_swap<R: Rng + ?Sized>(n: usize, swap_factor: usize, rng: &mut R) -> Result<Move> {
    if swap_factor < 2 {
        return Err(Error::InvalidConfig(format!("swap factor must be at least 2, got {swap_factor}")));
    }
    if n < swap_factor {
        return Err(Error::InfeasibleMove {
            n,
            reason: format!("swap needs {swap_factor} positions"),
        });
    }
    let targets = index::sample(rng, n, swap_factor).into_vec();
    let mut sources = targets.clone();
    sources.shuffle(rng);
    Ok(Move::Swap { targets, sources })
}

/// Number of non-identity insertion points for a block at `start` of `len`.
fn shift_choices(n: usize, start: usize, len: usize) -> usize {
    n - len - usize::from(start > 0)
}

/// Block length uniform in `1..=min(shift_factor, n - 1)`, start uniform over
/// the starts that admit a non-identity insertion, insertion point uniform
/// over those.
pub fn sample_shift<R: Rng + ?Sized>(n: usize, shift_factor: usize, rng: &mut R) -> Result<Move> {
    if shift_factor < 1 {
        return Err(Error::InvalidConfig("shift factor must be at least 1".into()));
    }
    if n < 3 {
        return Err(Error::InfeasibleMove { n, reason: "shift needs at least 3 nodes".into() });
    }
    let len = rng.random_range(1..=shift_factor.min(n - 1));
    let max_start = n - len;
    // Only (start = 1, len = n - 1) has no insertion point.
    let start = if len == n - 1 {
        0
    } else {
        rng.random_range(0..=max_start)
    };
    let r = rng.random_range(0..shift_choices(n, start, len));
    let before = start.saturating_sub(1);
    let insert_after = if r < before { r } else { start + len + (r - before) };
    Ok(Move::Shift { start, len, insert_after })
}

/// Center length uniform in `0..=symmetry_factor`, pivot uniform over the
/// positions that admit at least one flanking pair, half length uniform over
/// its feasible range. Center lengths that do not fit are redrawn a bounded
/// number of times.
pub fn sample_symmetry<R: Rng + ?Sized>(
    n: usize,
    symmetry_factor: usize,
    rng: &mut R,
) -> Result<Move> {
    for _ in 0..SYMMETRY_MAX_ATTEMPTS {
        let center = rng.random_range(0..=symmetry_factor);
        if n < center + 2 {
            continue;
        }
        // 1-based pivot p in 1..=n-c-1, half in 1..=min(p, n-p-c).
        let p = rng.random_range(1..=n - center - 1);
        let half = rng.random_range(1..=p.min(n - p - center));
        return Ok(Move::Symmetry { pivot: p - 1, center, half });
    }
    Err(Error::InfeasibleMove {
        n,
        reason: format!(
            "no symmetry with center <= {symmetry_factor} found in {SYMMETRY_MAX_ATTEMPTS} draws"
        ),
    })
}

/// Every move the sampler of `kind` can produce for `n` nodes.
pub fn enumerate_moves(kind: OperatorKind, n: usize, params: &OperatorParams) -> Vec<Move> {
    let mut out = Vec::new();
    match kind {
        OperatorKind::Swap => {
            let k = params.swap_factor;
            if n < k {
                return out;
            }
            let mut targets = Vec::with_capacity(k);
            arrangements(n, k, &mut targets, &mut |t| {
                let mut sources = Vec::with_capacity(k);
                arrangements_of(t, &mut sources, &mut vec![false; k], &mut |s| {
                    out.push(Move::Swap { targets: t.to_vec(), sources: s.to_vec() });
                });
            });
        }
        OperatorKind::Shift => {
            if n < 3 {
                return out;
            }
            for len in 1..=params.shift_factor.min(n - 1) {
                for start in 0..=n - len {
                    for q in 0..n {
                        let mv = Move::Shift { start, len, insert_after: q };
                        if mv.validate(n).is_ok() {
                            out.push(mv);
                        }
                    }
                }
            }
        }
        OperatorKind::Symmetry => {
            for center in 0..=params.symmetry_factor {
                if n < center + 2 {
                    continue;
                }
                for p in 1..=n - center - 1 {
                    for half in 1..=p.min(n - p - center) {
                        out.push(Move::Symmetry { pivot: p - 1, center, half });
                    }
                }
            }
        }
    }
    out
}

/// Ordered selections of `k` distinct values from `0..n`.
fn arrangements(n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for v in 0..n {
        if !cur.contains(&v) {
            cur.push(v);
            arrangements(n, k, cur, f);
            cur.pop();
        }
    }
}

fn arrangements_of(
    items: &[usize],
    cur: &mut Vec<usize>,
    used: &mut Vec<bool>,
    f: &mut impl FnMut(&[usize]),
) {
    if cur.len() == items.len() {
        f(cur);
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i]);
            arrangements_of(items, cur, used, f);
            cur.pop();
            used[i] = false;
        }
    }
}

/// A general elementary matrix: exactly one 1 in every row and column.
/// Stored as `perm[row] = column of the 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMatrix {
    perm: Vec<usize>,
}

impl PermutationMatrix {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for (row, &col) in perm.iter().enumerate() {
            if col >= n || std::mem::replace(&mut seen[col], true) {
                return Err(Error::InvalidMove(format!(
                    "row {} does not map to a free column",
                    row + 1
                )));
            }
        }
        Ok(Self { perm })
    }

    /// From a dense 0/1 matrix, rejecting anything that is not a
    /// permutation matrix.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut perm = Vec::with_capacity(n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n || row.iter().any(|&v| v > 1) {
                return Err(Error::InvalidMove(format!("row {} is not a 0/1 row of width {n}", r + 1)));
            }
            let ones: Vec<usize> =
                row.iter().enumerate().filter(|(_, &v)| v == 1).map(|(c, _)| c).collect();
            if ones.len() != 1 {
                return Err(Error::InvalidMove(format!("row {} has {} ones", r + 1, ones.len())));
            }
            perm.push(ones[0]);
        }
        Self::from_perm(perm)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let n = self.perm.len();
        self.perm
            .iter()
            .map(|&c| {
                let mut row = vec![0; n];
                row[c] = 1;
                row
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Matrix product `self * other` (apply `other` first, then `self`).
    pub fn compose(&self, other: &PermutationMatrix) -> Result<PermutationMatrix> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(Self { perm: self.perm.iter().map(|&i| other.perm[i]).collect() })
    }
}

/// `G * x`: row `i` of the result selects `x[perm[i]]`.
pub fn apply_matrix(matrix: &PermutationMatrix, tour: &Tour) -> Result<Tour> {
    if matrix.n() != tour.len() {
        return Err(Error::DimensionMismatch { expected: matrix.n(), found: tour.len() });
    }
    let order = tour.order();
    Ok(Tour::from_vec_unchecked(matrix.perm.iter().map(|&c| order[c]).collect()))
}

pub fn apply_move(tour: &Tour, mv: &Move) -> Result<Tour> {
    mv.validate(tour.len())?;
    let mut out = Vec::with_capacity(tour.len());
    mv.apply_into(tour.order(), &mut out);
    Ok(Tour::from_vec_unchecked(out))
}

pub fn move_to_matrix(mv: &Move, n: usize) -> Result<PermutationMatrix> {
    mv.to_matrix(n)
}
