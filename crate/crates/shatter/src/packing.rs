//! Crossing counts, δ-separated packings, and the low-crossing partition.
//!
//! A member set `A` *crosses* a pair `{u, v}` when it contains exactly one of
//! the two points, so the crossing count of a pair equals the Hamming distance
//! between the two incidence columns. Crossing counts therefore form a
//! pseudometric on the ground set, and the partition construction below rests
//! on nothing but the triangle inequality plus a greedy maximal packing.

use crate::bits::BitRow;
use crate::set_system::SetSystem;
use serde::{Deserialize, Serialize};
use thiserror::Error;

// ==================== Errors ====================

#[derive(Debug, Error, PartialEq)]
pub enum PackingError {
    #[error("crossing count requires two distinct points, got {point} twice")]
    SamePoint { point: usize },
    #[error("point {point} out of range for ground size {ground_size}")]
    PointOutOfRange { point: usize, ground_size: usize },
    #[error("delta must be at least 1, got {delta}")]
    DeltaTooSmall { delta: usize },
    #[error("delta {delta} out of range; need 1 <= delta <= {family_size}")]
    DeltaOutOfRange { delta: usize, family_size: usize },
    #[error("dimension bound d must be at least 1, got {d}")]
    DimensionTooSmall { d: usize },
    #[error(
        "partition was built over ground size {expected_ground} with {expected_members} members; \
         verifying against ground size {got_ground} with {got_members} members"
    )]
    SystemMismatch {
        expected_ground: usize,
        expected_members: usize,
        got_ground: usize,
        got_members: usize,
    },
}

// ==================== Types ====================

/// A δ-separated set of ground points: every pair of points is crossed by at
/// least `delta` members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    /// Selected points, ascending.
    pub points: Vec<usize>,
    pub delta: usize,
    /// Whether no further point can be added. The greedy construction always
    /// produces a maximal packing.
    pub maximal: bool,
    /// Echo of the analyzed system's shape, for later compatibility checks.
    pub ground_size: usize,
    pub member_count: usize,
}

/// A partition of the ground set in which same-part pairs are crossed by at
/// most `2·delta` members and parts obey the packing-derived size cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Nonempty parts, each sorted ascending; together they cover the ground
    /// set exactly once.
    pub parts: Vec<Vec<usize>>,
    pub delta: usize,
    /// `⌊2n / (c1·(|F|/δ)^d)⌋`. When this is zero the cap is meaningless;
    /// `cap_vacuous` is set and parts of size one are used instead.
    pub size_cap: usize,
    pub cap_vacuous: bool,
    pub c1: f64,
    pub c2: f64,
    pub d: usize,
    pub ground_size: usize,
    pub member_count: usize,
}

/// Result of exhaustively re-checking a partition's four invariants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionReport {
    /// Parts are disjoint and cover the ground set.
    pub covers_ground: bool,
    pub cover_defect: Option<CoverDefect>,
    /// Every part fits the size cap (trivially true when the cap is vacuous).
    pub size_cap_ok: bool,
    pub size_cap_vacuous: bool,
    pub oversized_part: Option<OversizedPart>,
    /// Part count is at most c2·(|F|/δ)^d.
    pub part_count_ok: bool,
    pub part_count: usize,
    pub part_count_bound: f64,
    /// Every same-part pair is crossed by at most 2δ members.
    pub crossing_ok: bool,
    /// The same-part pair with the largest crossing count; the violation
    /// witness whenever `crossing_ok` is false.
    pub worst_pair: Option<WorstPair>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverDefect {
    Missing { point: usize },
    Duplicated { point: usize },
    OutOfRange { point: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OversizedPart {
    pub part: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstPair {
    pub u: usize,
    pub v: usize,
    pub crossing: usize,
}

// ==================== Crossing counts ====================

fn check_point(sys: &SetSystem, p: usize) -> Result<(), PackingError> {
    if p >= sys.ground_size() {
        return Err(PackingError::PointOutOfRange {
            point: p,
            ground_size: sys.ground_size(),
        });
    }
    Ok(())
}

/// Number of members containing exactly one of `u`, `v`. Equals the Hamming
/// distance of the two incidence columns; symmetric and triangle-inequality
/// compliant. Asking about a pair `{u, u}` is an error, not zero.
pub fn crossing_count(sys: &SetSystem, u: usize, v: usize) -> Result<usize, PackingError> {
    if u == v {
        return Err(PackingError::SamePoint { point: u });
    }
    check_point(sys, u)?;
    check_point(sys, v)?;
    Ok(sys
        .members()
        .iter()
        .filter(|m| m.get(u) != m.get(v))
        .count())
}

/// All incidence columns at once; `columns[v]` is a bit row over member
/// indices. Bulk crossing counts are XOR popcounts of two columns.
fn incidence_columns(sys: &SetSystem) -> Vec<BitRow> {
    (0..sys.ground_size()).map(|v| sys.column(v)).collect()
}

// ==================== Greedy packing ====================

/// Greedy maximal δ-separated packing: scan ground points in ascending order
/// and keep a point when it is crossed at least `delta` times against every
/// point already kept. Deterministic; the result is maximal by construction.
pub fn greedy_delta_packing(sys: &SetSystem, delta: usize) -> Result<Packing, PackingError> {
    if delta == 0 {
        return Err(PackingError::DeltaTooSmall { delta });
    }
    let columns = incidence_columns(sys);
    let points = greedy_packing_from_columns(&columns, delta);
    Ok(Packing {
        points,
        delta,
        maximal: true,
        ground_size: sys.ground_size(),
        member_count: sys.member_count(),
    })
}

fn greedy_packing_from_columns(columns: &[BitRow], delta: usize) -> Vec<usize> {
    let mut points: Vec<usize> = Vec::new();
    for v in 0..columns.len() {
        if points
            .iter()
            .all(|&x| columns[v].xor_count(&columns[x]) >= delta)
        {
            points.push(v);
        }
    }
    points
}

// ==================== Haussler bound ====================

/// Leading constant `c1(d) = e·(d+1)·(2e)^d` of the packing bound.
pub fn haussler_c1(d: usize) -> f64 {
    assert!(d >= 1, "dimension bound must be at least 1");
    let e = std::f64::consts::E;
    e * (d as f64 + 1.0) * (2.0 * e).powi(d as i32)
}

/// Constant of the part-count bound: `c2(d) = 2·c1(d)`.
pub fn haussler_c2(d: usize) -> f64 {
    2.0 * haussler_c1(d)
}

/// Packing bound `c1(d)·(family_size/delta)^d`: the maximum size of a
/// δ-separated set when the family's dual VC dimension is at most `d`.
pub fn haussler_bound(d: usize, family_size: usize, delta: usize) -> f64 {
    assert!(delta >= 1, "delta must be at least 1");
    haussler_c1(d) * (family_size as f64 / delta as f64).powi(d as i32)
}

// ==================== Partition ====================

/// Partition the ground set so that same-part pairs are crossed by at most
/// `2·delta` members, using a greedy maximal packing and smallest-index
/// assignment:
///
/// 1. take the greedy δ-separated packing `x_1 < x_2 < …`;
/// 2. assign each point `v` to the first `x_i` with `crossing(v, x_i) ≤ δ`
///    (one exists because the packing is maximal; a point's own packing entry
///    crosses it zero times). Same-part pairs then satisfy the 2δ bound by
///    the triangle inequality;
/// 3. split any part larger than `size_cap = ⌊2n / (c1·(|F|/δ)^d)⌋` into
///    consecutive chunks of exactly `size_cap` plus one smaller remainder.
///    When the cap is below 1 the lemma carries no content; singleton parts
///    are used and the cap is recorded as vacuous.
///
/// Empty parts (possible when a packing point sits within δ of an earlier
/// one — equality is allowed by the assignment rule) are dropped. `d` must be
/// a genuine dual VC upper bound for the packing-derived bounds to be
/// guaranteed; `verify_partition` re-checks them regardless.
pub fn partition(sys: &SetSystem, delta: usize, d: usize) -> Result<Partition, PackingError> {
    if d < 1 {
        return Err(PackingError::DimensionTooSmall { d });
    }
    if delta < 1 || delta > sys.member_count() {
        return Err(PackingError::DeltaOutOfRange {
            delta,
            family_size: sys.member_count(),
        });
    }
    let n = sys.ground_size();
    let columns = incidence_columns(sys);
    let points = greedy_packing_from_columns(&columns, delta);

    // Smallest-index assignment.
    let mut raw_parts: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for v in 0..n {
        let i = points
            .iter()
            .position(|&x| x == v || columns[v].xor_count(&columns[x]) <= delta)
            .expect("maximal packing leaves no point unassigned");
        raw_parts[i].push(v);
    }

    let ratio = sys.member_count() as f64 / delta as f64;
    let c1 = haussler_c1(d);
    let c2 = haussler_c2(d);
    let cap_real = 2.0 * n as f64 / (c1 * ratio.powi(d as i32));
    let size_cap = if cap_real >= 1.0 { cap_real as usize } else { 0 };
    let cap_vacuous = size_cap == 0;
    let chunk = size_cap.max(1);

    let mut parts = Vec::new();
    for part in raw_parts {
        if part.is_empty() {
            continue;
        }
        for piece in part.chunks(chunk) {
            parts.push(piece.to_vec());
        }
    }

    Ok(Partition {
        parts,
        delta,
        size_cap,
        cap_vacuous,
        c1,
        c2,
        d,
        ground_size: n,
        member_count: sys.member_count(),
    })
}

/// Exhaustively re-check all four partition invariants against the system.
pub fn verify_partition(
    part: &Partition,
    sys: &SetSystem,
) -> Result<PartitionReport, PackingError> {
    if part.ground_size != sys.ground_size() || part.member_count != sys.member_count() {
        return Err(PackingError::SystemMismatch {
            expected_ground: part.ground_size,
            expected_members: part.member_count,
            got_ground: sys.ground_size(),
            got_members: sys.member_count(),
        });
    }
    let n = sys.ground_size();

    // Invariant 1: disjoint cover.
    let mut seen = vec![false; n];
    let mut cover_defect = None;
    'cover: for p in &part.parts {
        for &v in p {
            if v >= n {
                cover_defect = Some(CoverDefect::OutOfRange { point: v });
                break 'cover;
            }
            if seen[v] {
                cover_defect = Some(CoverDefect::Duplicated { point: v });
                break 'cover;
            }
            seen[v] = true;
        }
    }
    if cover_defect.is_none() {
        if let Some(missing) = seen.iter().position(|&s| !s) {
            cover_defect = Some(CoverDefect::Missing { point: missing });
        }
    }
    let covers_ground = cover_defect.is_none();

    // Invariant 2: size cap (vacuous when the cap is below 1).
    let mut oversized_part = None;
    if !part.cap_vacuous {
        for (i, p) in part.parts.iter().enumerate() {
            if p.len() > part.size_cap {
                oversized_part = Some(OversizedPart {
                    part: i,
                    size: p.len(),
                });
                break;
            }
        }
    }
    let size_cap_ok = oversized_part.is_none();

    // Invariant 3: part count against c2·(|F|/δ)^d.
    let ratio = part.member_count as f64 / part.delta as f64;
    let part_count_bound = part.c2 * ratio.powi(part.d as i32);
    let part_count_ok = (part.parts.len() as f64) <= part_count_bound;

    // Invariant 4: same-part crossing at most 2δ, exhaustive over pairs.
    let columns = incidence_columns(sys);
    let mut worst_pair: Option<WorstPair> = None;
    for p in &part.parts {
        for (a, &u) in p.iter().enumerate() {
            for &v in &p[a + 1..] {
                if u >= n || v >= n {
                    continue; // already reported as a cover defect
                }
                let crossing = columns[u].xor_count(&columns[v]);
                if worst_pair.as_ref().is_none_or(|w| crossing > w.crossing) {
                    worst_pair = Some(WorstPair { u, v, crossing });
                }
            }
        }
    }
    let crossing_ok = worst_pair
        .as_ref()
        .is_none_or(|w| w.crossing <= 2 * part.delta);

    let pass = covers_ground && size_cap_ok && part_count_ok && crossing_ok;
    Ok(PartitionReport {
        covers_ground,
        cover_defect,
        size_cap_ok,
        size_cap_vacuous: part.cap_vacuous,
        oversized_part,
        part_count_ok,
        part_count: part.parts.len(),
        part_count_bound,
        crossing_ok,
        worst_pair,
        pass,
    })
}

// ==================== Tests ====================
