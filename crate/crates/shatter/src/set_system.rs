//! Indexed families of subsets of a finite ground set.
//!
//! A [`SetSystem`] is an ordered, possibly-duplicated list of members over the
//! ground set `{0, …, ground_size-1}`. Duplicates and order are meaningful:
//! families arising as neighborhood lists are indexed by (vertex, color) and
//! two distinct indices may carry the same underlying set. Deduplication is
//! always explicit ([`SetSystem::deduplicated`]), never implicit.

use crate::bits::BitRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Default cap on the number of shattering tests a VC-dimension search may
/// perform before aborting with [`SetSystemError::BudgetExceeded`].
pub const DEFAULT_SHATTER_BUDGET: u64 = 1 << 24;

// ==================== Errors ====================

#[derive(Debug, Error, PartialEq)]
pub enum SetSystemError {
    #[error("member {member}: index {index} out of range for ground size {ground_size}")]
    MemberIndexOutOfRange {
        member: usize,
        index: usize,
        ground_size: usize,
    },
    #[error("subset index {index} out of range for ground size {ground_size}")]
    SubsetIndexOutOfRange { index: usize, ground_size: usize },
    #[error("subset contains duplicate index {index}")]
    DuplicateSubsetIndex { index: usize },
    #[error("label count {labels} does not match member count {members}")]
    LabelCountMismatch { labels: usize, members: usize },
    #[error("work budget exceeded after {examined} shattering tests (budget {budget})")]
    BudgetExceeded { examined: u64, budget: u64 },
    #[error("density {density} out of range; need 0.0 <= density <= 1.0")]
    InvalidDensity { density: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

// ==================== Types ====================

/// An indexed family of subsets of `{0, …, ground_size-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    ground_size: usize,
    members: Vec<BitRow>,
    labels: Option<Vec<String>>,
}

/// The realized traces of a family on one subset of the ground set.
///
/// `traces` lists the distinct intersections `member ∩ subset`, each as a
/// sorted index list, ordered lexicographically as bit patterns. The subset is
/// shattered exactly when all `2^|subset|` patterns are realized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShatterWitness {
    pub subset: Vec<usize>,
    pub traces: Vec<Vec<usize>>,
}

impl ShatterWitness {
    /// True iff every subset of `subset` occurs as a trace.
    pub fn is_shattered(&self) -> bool {
        let k = self.subset.len();
        k < 64 && self.traces.len() as u64 == 1u64 << k
    }
}

// ==================== Construction ====================

impl SetSystem {
    /// Build a system from members given as index lists. Rejects any index
    /// outside the ground set, naming the offending member.
    pub fn new(ground_size: usize, members: &[Vec<usize>]) -> Result<Self, SetSystemError> {
        let mut rows = Vec::with_capacity(members.len());
        for (mi, indices) in members.iter().enumerate() {
            for &i in indices {
                if i >= ground_size {
                    return Err(SetSystemError::MemberIndexOutOfRange {
                        member: mi,
                        index: i,
                        ground_size,
                    });
                }
            }
            rows.push(BitRow::from_indices(ground_size, indices));
        }
        Ok(SetSystem {
            ground_size,
            members: rows,
            labels: None,
        })
    }

    /// Build a system directly from bit rows, all of length `ground_size`.
    pub fn from_rows(ground_size: usize, members: Vec<BitRow>) -> Self {
        debug_assert!(members.iter().all(|r| r.len() == ground_size));
        SetSystem {
            ground_size,
            members,
            labels: None,
        }
    }

    /// Attach one opaque label per member.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SetSystemError> {
        if labels.len() != self.members.len() {
            return Err(SetSystemError::LabelCountMismatch {
                labels: labels.len(),
                members: self.members.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Seeded random system: each of `member_count` members contains each
    /// ground element independently with probability `density`.
    pub fn random(
        ground_size: usize,
        member_count: usize,
        density: f64,
        seed: u64,
    ) -> Result<Self, SetSystemError> {
        if !(0.0..=1.0).contains(&density) {
            return Err(SetSystemError::InvalidDensity { density });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..member_count)
            .map(|_| {
                let mut row = BitRow::zeros(ground_size);
                for v in 0..ground_size {
                    if rng.random::<f64>() < density {
                        row.set(v, true);
                    }
                }
                row
            })
            .collect();
        Ok(SetSystem {
            ground_size,
            members,
            labels: None,
        })
    }

    // ==================== Accessors ====================

    #[inline]
    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    #[inline]
    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn member(&self, i: usize) -> &BitRow {
        &self.members[i]
    }

    pub fn members(&self) -> &[BitRow] {
        &self.members
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Incidence column of ground element `v`: the set of member indices
    /// whose member contains `v`, as a bit row over the member indices.
    pub fn column(&self, v: usize) -> BitRow {
        debug_assert!(v < self.ground_size);
        let mut col = BitRow::zeros(self.members.len());
        for (i, member) in self.members.iter().enumerate() {
            if member.get(v) {
                col.set(i, true);
            }
        }
        col
    }

    /// Copy of the system with duplicate members removed, keeping the first
    /// occurrence of each distinct set (labels of survivors are kept).
    pub fn deduplicated(&self) -> SetSystem {
        let mut seen: HashSet<&BitRow> = HashSet::new();
        let mut members = Vec::new();
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for (i, row) in self.members.iter().enumerate() {
            if seen.insert(row) {
                members.push(row.clone());
                if let (Some(out), Some(all)) = (labels.as_mut(), self.labels.as_ref()) {
                    out.push(all[i].clone());
                }
            }
        }
        SetSystem {
            ground_size: self.ground_size,
            members,
            labels,
        }
    }

    // ==================== Traces and shattering ====================

    fn check_subset(&self, subset: &[usize]) -> Result<(), SetSystemError> {
        let mut seen = HashSet::new();
        for &i in subset {
            if i >= self.ground_size {
                return Err(SetSystemError::SubsetIndexOutOfRange {
                    index: i,
                    ground_size: self.ground_size,
                });
            }
            if !seen.insert(i) {
                return Err(SetSystemError::DuplicateSubsetIndex { index: i });
            }
        }
        Ok(())
    }

    /// Distinct traces `member ∩ subset` over all members.
    ///
    /// The empty subset traces to `{∅}` on a nonempty family and to `∅` on an
    /// empty one. Subsets larger than 63 elements are rejected as out of scope
    /// (no family representable here could shatter them, and the witness
    /// encoding packs traces into a word).
    pub fn trace(&self, subset: &[usize]) -> Result<ShatterWitness, SetSystemError> {
        self.check_subset(subset)?;
        assert!(
            subset.len() < 64,
            "trace subsets larger than 63 elements are not supported"
        );
        let mut patterns: Vec<u64> = self
            .members
            .iter()
            .map(|m| m.extract(subset))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        patterns.sort_unstable();
        let traces = patterns
            .into_iter()
            .map(|word| {
                (0..subset.len())
                    .filter(|j| word >> j & 1 == 1)
                    .map(|j| subset[j])
                    .collect()
            })
            .collect();
        Ok(ShatterWitness {
            subset: subset.to_vec(),
            traces,
        })
    }

    /// True iff all `2^|subset|` traces are realized.
    pub fn is_shattered(&self, subset: &[usize]) -> Result<bool, SetSystemError> {
        self.check_subset(subset)?;
        Ok(self.shattered_unchecked(subset))
    }

    fn shattered_unchecked(&self, subset: &[usize]) -> bool {
        let k = subset.len();
        if k >= 64 || (self.members.len() as u128) < (1u128 << k) {
            return false;
        }
        let need = 1u64 << k;
        if k <= 16 {
            let mut seen = vec![0u64; (need as usize).div_ceil(64)];
            let mut distinct = 0u64;
            for m in &self.members {
                let w = m.extract(subset) as usize;
                if seen[w / 64] >> (w % 64) & 1 == 0 {
                    seen[w / 64] |= 1 << (w % 64);
                    distinct += 1;
                    if distinct == need {
                        return true;
                    }
                }
            }
            false
        } else {
            let mut seen = HashSet::new();
            for m in &self.members {
                seen.insert(m.extract(subset));
                if seen.len() as u64 == need {
                    return true;
                }
            }
            false
        }
    }

    // ==================== VC dimension ====================

    /// Exact VC dimension with the default work budget. `-1` for an empty
    /// family (no subset, not even the empty one, is shattered).
    pub fn vc_dimension(&self) -> Result<i32, SetSystemError> {
        self.vc_dimension_budgeted(DEFAULT_SHATTER_BUDGET)
    }

    /// Exact VC dimension, spending at most `budget` shattering tests.
    ///
    /// Searches subset sizes in increasing order. If no subset of size `k` is
    /// shattered, no larger subset can be (all subsets of a shattered set are
    /// shattered), so the search stops with the exact answer. Sizes with
    /// `2^k > member_count` are skipped outright: `2^k` distinct traces need
    /// `2^k` members. Exceeding the budget is an explicit error, never a
    /// silently truncated answer.
    pub fn vc_dimension_budgeted(&self, budget: u64) -> Result<i32, SetSystemError> {
        if self.members.is_empty() {
            return Ok(-1);
        }
        let mut max_k = 0usize;
        while max_k < self.ground_size && (1u128 << (max_k + 1)) <= self.members.len() as u128 {
            max_k += 1;
        }
        let mut examined = 0u64;
        let mut dim = 0i32; // the empty subset is shattered by any nonempty family
        for k in 1..=max_k {
            let mut any = false;
            let mut combos = Combinations::new(self.ground_size, k);
            while let Some(subset) = combos.next() {
                examined += 1;
                if examined > budget {
                    return Err(SetSystemError::BudgetExceeded { examined, budget });
                }
                if self.shattered_unchecked(subset) {
                    any = true;
                    break;
                }
            }
            if any {
                dim = k as i32;
            } else {
                break;
            }
        }
        Ok(dim)
    }

    // ==================== Duality ====================

    /// The dual system: incidence-matrix transpose. Ground elements of the
    /// dual are the member indices of `self`; the dual has one member per
    /// ground element `v` of `self`, namely `{i : v ∈ member_i}`.
    ///
    /// Applying `dual` twice reproduces the original incidence matrix (same
    /// member order, duplicates preserved); labels are not carried over.
    pub fn dual(&self) -> SetSystem {
        let members = (0..self.ground_size).map(|v| self.column(v)).collect();
        SetSystem {
            ground_size: self.members.len(),
            members,
            labels: None,
        }
    }

    /// VC dimension of the dual system, default budget.
    pub fn dual_vc_dimension(&self) -> Result<i32, SetSystemError> {
        self.dual().vc_dimension()
    }

    /// VC dimension of the dual system with an explicit budget.
    pub fn dual_vc_dimension_budgeted(&self, budget: u64) -> Result<i32, SetSystemError> {
        self.dual().vc_dimension_budgeted(budget)
    }

    // ==================== Text format ====================

    /// Parse the plain text format: first line `ground_size member_count`,
    /// then one member per line, either a bit string of length `ground_size`
    /// or `s` followed by space-separated element indices. Blank lines are
    /// ignored; anything else is rejected with its line number.
    pub fn parse_text(input: &str) -> Result<Self, SetSystemError> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header line"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(
                line_no,
                "header must be `ground_size member_count`",
            ));
        }
        let ground_size: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid ground size {:?}", fields[0])))?;
        let member_count: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid member count {:?}", fields[1])))?;

        let mut members = Vec::with_capacity(member_count);
        for mi in 0..member_count {
            let (line_no, line) = lines.next().ok_or_else(|| {
                parse_err(
                    0,
                    format!("expected {member_count} member lines, found {mi}"),
                )
            })?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens[0] == "s" {
                let mut indices = Vec::with_capacity(tokens.len() - 1);
                for t in &tokens[1..] {
                    let idx: usize = t
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("invalid element index {t:?}")))?;
                    if idx >= ground_size {
                        return Err(parse_err(
                            line_no,
                            format!("element index {idx} out of range for ground size {ground_size}"),
                        ));
                    }
                    indices.push(idx);
                }
                members.push(BitRow::from_indices(ground_size, &indices));
            } else if tokens.len() == 1 {
                let bits = tokens[0];
                if bits.len() != ground_size {
                    return Err(parse_err(
                        line_no,
                        format!(
                            "bit string has length {} but ground size is {ground_size}",
                            bits.len()
                        ),
                    ));
                }
                let mut row = BitRow::zeros(ground_size);
                for (v, c) in bits.chars().enumerate() {
                    match c {
                        '1' => row.set(v, true),
                        '0' => {}
                        other => {
                            return Err(parse_err(
                                line_no,
                                format!("invalid bit character {other:?}"),
                            ))
                        }
                    }
                }
                members.push(row);
            } else {
                return Err(parse_err(
                    line_no,
                    "member line must be a bit string or `s` followed by indices",
                ));
            }
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(parse_err(line_no, "unexpected content after last member"));
        }
        Ok(SetSystem {
            ground_size,
            members,
            labels: None,
        })
    }

    /// Write the text format with bit-string member lines. Labels are not
    /// part of the text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.ground_size, self.members.len());
        for m in &self.members {
            let mut line = String::with_capacity(self.ground_size + 1);
            for v in 0..self.ground_size {
                line.push(if m.get(v) { '1' } else { '0' });
            }
            line.push('\n');
            out.push_str(&line);
        }
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> SetSystemError {
    SetSystemError::Parse {
        line,
        message: message.into(),
    }
}

// JSON mirrors the same fields: ground size, members as sorted index arrays,
// optional labels.
#[derive(Serialize, Deserialize)]
struct SetSystemRepr {
    ground_size: usize,
    members: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Serialize for SetSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SetSystemRepr {
            ground_size: self.ground_size,
            members: self.members.iter().map(|m| m.to_indices()).collect(),
            labels: self.labels.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SetSystemRepr::deserialize(deserializer)?;
        let mut system = SetSystem::new(repr.ground_size, &repr.members)
            .map_err(serde::de::Error::custom)?;
        if let Some(labels) = repr.labels {
            system = system.with_labels(labels).map_err(serde::de::Error::custom)?;
        }
        Ok(system)
    }
}

// ==================== Subset enumeration ====================

/// Lexicographic k-combinations of {0, …, n-1}, yielded as a reusable slice.
struct Combinations {
    n: usize,
    k: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            k,
            current: (0..k).collect(),
            started: false,
            done: k > n,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        // Advance: rightmost position that can still move right.
        let k = self.k;
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(&self.current);
            }
        }
    }
}

// ==================== Tests ====================
