//! Level-by-level trace of the covering-family construction: neighborhood
//! families 𝓕_j over shrinking vertex sets V_j, uncovered edge sets B_j,
//! per-part color menus (Q_t, Q′_t), the counting-based clique extension,
//! and a per-level report of the three bookkeeping properties.
//!
//! The iterated-log thresholds of the asymptotic argument are replaced by an
//! explicit strictly decreasing `budgets` list; property violations are
//! reported rather than fatal, since at practical sizes the inequalities are
//! not expected to hold.

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitRow;
use crate::clique::{verify_clique, CliqueError};
use crate::coloring::{
    edge_count, edge_index, find_monochromatic_clique_budgeted, CliqueCertificate, ColoringError,
    EdgeColoring, DEFAULT_CLIQUE_BUDGET,
};
use crate::packing::{partition, PackingError, Partition};
use crate::set_system::SetSystem;

// ==================== Errors ====================

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("budgets must be a nonempty strictly decreasing list of positive thresholds")]
    InvalidBudgets,
    #[error("expected one clique target per color ({m}), got {got}")]
    TargetsLengthMismatch { m: usize, got: usize },
    #[error("clique target for color {color} must be at least 1")]
    ZeroTarget { color: usize },
    #[error("expected one color menu per vertex ({n}), got {got}")]
    MenuCountMismatch { n: usize, got: usize },
    #[error("menu of vertex {vertex} has width {got}, expected {m}")]
    MenuWidthMismatch { vertex: usize, m: usize, got: usize },
    #[error("stored uncovered set disagrees with recomputation at edge ({u}, {v})")]
    CoverageMismatch { u: usize, v: usize },
    #[error("partition ground size {got} does not match the {expected} active vertices")]
    PartitionGroundMismatch { expected: usize, got: usize },
    #[error("partition does not list ground element {vertex} exactly once")]
    PartitionNotExact { vertex: usize },
    #[error("partition was built over {got} members, the family has {expected}")]
    PartitionFamilyMismatch { expected: usize, got: usize },
    #[error("family is empty at level {level}; nothing to partition")]
    EmptyFamily { level: usize },
    #[error("base certificate is not a monochromatic clique under this coloring")]
    BaseNotMonochromatic,
    #[error("vertex {vertex} is not active at level {level}")]
    VertexInactive { vertex: usize, level: usize },
    #[error("pivot {pivot} out of range for {n} vertices")]
    PivotOutOfRange { pivot: usize, n: usize },
    #[error("candidate {u} out of range for {n} vertices")]
    CandidateOutOfRange { u: usize, n: usize },
    #[error("candidate equals the pivot {pivot}")]
    CandidateIsPivot { pivot: usize },
    #[error("candidate {u} joins pivot {pivot} in color {color}, expected {expected}")]
    CandidateWrongColor {
        u: usize,
        pivot: usize,
        color: usize,
        expected: usize,
    },
    #[error("edge ({u}, {pivot}) is uncovered; candidates must reach the pivot by covered edges")]
    CandidateUncovered { u: usize, pivot: usize },
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Clique(#[from] CliqueError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

// ==================== Edge sets ====================

/// A set of K_n edges stored as one bit per unordered vertex pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    n: usize,
    bits: BitRow,
}

impl EdgeSet {
    pub fn empty(n: usize) -> Self {
        EdgeSet {
            n,
            bits: BitRow::zeros(edge_count(n)),
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains(&self, u: usize, v: usize) -> bool {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u}, {v})");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.bits.get(edge_index(self.n, a, b))
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u}, {v})");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.bits.set(edge_index(self.n, a, b), true);
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "invalid edge ({u}, {v})");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.bits.set(edge_index(self.n, a, b), false);
    }

    pub fn is_subset_of(&self, other: &EdgeSet) -> bool {
        assert_eq!(self.n, other.n);
        other.bits.contains_all(&self.bits)
    }

    /// All edges in ascending `(u, v)` order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        let (mut u, mut base) = (0usize, 0usize);
        for id in self.bits.iter_ones() {
            while id >= base + (self.n - 1 - u) {
                base += self.n - 1 - u;
                u += 1;
            }
            out.push((u, u + 1 + (id - base)));
        }
        out
    }
}

// ==================== Pipeline state ====================

/// One level of the covering pipeline over a fixed edge coloring: the
/// surviving vertices V_j, the per-vertex color menus Q_v, the neighborhood
/// family 𝓕_j they generate, and the uncovered edge set B_j.
#[derive(Clone, Debug)]
pub struct PipelineState<'a> {
    pub coloring: &'a EdgeColoring,
    /// Iteration index j.
    pub level: usize,
    /// Level threshold standing in for the iterated-log term.
    pub budget: usize,
    pub k_targets: Vec<usize>,
    /// Sum of the clique targets.
    pub s: usize,
    /// V_j as a mask over the original vertex set.
    pub active: BitRow,
    /// Q_v per original vertex, as a mask over the colors. Inactive vertices
    /// have empty menus.
    pub menus: Vec<BitRow>,
    /// 𝓕_j: one member N_q(v) ∩ V_j per surviving (v, q), over the ground
    /// set `vertex_list` reindexed to 0.., labeled `v{v}.q{q}`.
    pub family: SetSystem,
    /// The (vertex, color) pair generating each family member, aligned with
    /// the family's member indices.
    pub member_keys: Vec<(usize, usize)>,
    /// Sorted original ids of V_j; position = reindexed ground element.
    pub vertex_list: Vec<usize>,
    /// B_j: the edges of K_n not covered by 𝓕_j.
    pub uncovered: EdgeSet,
}

fn validate_targets(m: usize, k_targets: &[usize]) -> Result<(), PipelineError> {
    if k_targets.len() != m {
        return Err(PipelineError::TargetsLengthMismatch {
            m,
            got: k_targets.len(),
        });
    }
    if let Some(color) = k_targets.iter().position(|&t| t == 0) {
        return Err(PipelineError::ZeroTarget { color });
    }
    Ok(())
}

/// B recomputed from the definition: an edge uv is covered iff both
/// endpoints are active and its color sits in both endpoint menus, i.e. both
/// generated neighborhoods are present in the family.
fn recompute_uncovered(coloring: &EdgeColoring, active: &BitRow, menus: &[BitRow]) -> EdgeSet {
    let n = coloring.vertex_count();
    let mut uncovered = EdgeSet::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            let q = coloring.color(u, v);
            let covered = active.get(u) && active.get(v) && menus[u].get(q) && menus[v].get(q);
            if !covered {
                uncovered.insert(u, v);
            }
        }
    }
    uncovered
}

impl<'a> PipelineState<'a> {
    /// Level 0: every vertex active, every color on every menu, so the
    /// family holds all n·m neighborhoods and every edge is covered.
    pub fn initial(
        coloring: &'a EdgeColoring,
        k_targets: &[usize],
        budget: usize,
    ) -> Result<Self, PipelineError> {
        let n = coloring.vertex_count();
        let m = coloring.color_count();
        let menus = vec![BitRow::ones(m); n];
        Self::from_menus(coloring, BitRow::ones(n), menus, 0, budget, k_targets)
    }

    /// Build a consistent state from a vertex mask and per-vertex color
    /// menus: the family and the uncovered set are derived, never trusted.
    pub fn from_menus(
        coloring: &'a EdgeColoring,
        active: BitRow,
        mut menus: Vec<BitRow>,
        level: usize,
        budget: usize,
        k_targets: &[usize],
    ) -> Result<Self, PipelineError> {
        let n = coloring.vertex_count();
        let m = coloring.color_count();
        if budget == 0 {
            return Err(PipelineError::InvalidBudgets);
        }
        validate_targets(m, k_targets)?;
        if menus.len() != n {
            return Err(PipelineError::MenuCountMismatch {
                n,
                got: menus.len(),
            });
        }
        if let Some(v) = menus.iter().position(|menu| menu.len() != m) {
            return Err(PipelineError::MenuWidthMismatch {
                vertex: v,
                m,
                got: menus[v].len(),
            });
        }
        // Inactive vertices contribute nothing; normalize their menus.
        for (v, menu) in menus.iter_mut().enumerate() {
            if !active.get(v) {
                *menu = BitRow::zeros(m);
            }
        }

        let vertex_list = active.to_indices();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in vertex_list.iter().enumerate() {
            position[v] = i;
        }

        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut member_keys = Vec::new();
        for &v in &vertex_list {
            for q in menus[v].iter_ones() {
                let mut full = coloring.neighborhood(v, q);
                full.intersect_with(&active);
                let mut row = BitRow::zeros(vertex_list.len());
                for u in full.iter_ones() {
                    row.set(position[u], true);
                }
                rows.push(row);
                labels.push(format!("v{v}.q{q}"));
                member_keys.push((v, q));
            }
        }
        let family = SetSystem::from_rows(vertex_list.len(), rows)
            .with_labels(labels)
            .expect("one label per member by construction");
        let uncovered = recompute_uncovered(coloring, &active, &menus);

        Ok(PipelineState {
            coloring,
            level,
            budget,
            k_targets: k_targets.to_vec(),
            s: k_targets.iter().sum(),
            active,
            menus,
            family,
            member_keys,
            vertex_list,
            uncovered,
        })
    }

    #[inline]
    pub fn active_count(&self) -> usize {
        self.vertex_list.len()
    }
}

// ==================== Coverage recomputation ====================

/// The covered/uncovered split of K_n's edges at one level.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub total_edges: usize,
    pub covered: usize,
    /// B_j in ascending edge order.
    pub uncovered: Vec<(usize, usize)>,
}

/// Recompute B_j from the covering definition and cross-check it against the
/// state's stored copy; a disagreement is an integrity error naming the
/// first witness edge.
pub fn covered_edges(state: &PipelineState) -> Result<CoverageReport, PipelineError> {
    let n = state.coloring.vertex_count();
    let recomputed = recompute_uncovered(state.coloring, &state.active, &state.menus);
    if recomputed != state.uncovered {
        for u in 0..n {
            for v in u + 1..n {
                if recomputed.contains(u, v) != state.uncovered.contains(u, v) {
                    return Err(PipelineError::CoverageMismatch { u, v });
                }
            }
        }
        unreachable!("unequal edge sets must differ at some edge");
    }
    Ok(CoverageReport {
        total_edges: edge_count(n),
        covered: edge_count(n) - recomputed.len(),
        uncovered: recomputed.edges(),
    })
}

// ==================== Per-part color menus ====================

/// The two color sets of one part: Q_t (colors with a high covered-degree
/// vertex) and Q′_t (colors whose clique target minus one fits in the part).
#[derive(Clone, Debug, Serialize)]
pub struct PartMenus {
    pub part: usize,
    /// Original vertex ids of S_t.
    pub vertices: Vec<usize>,
    pub q_t: Vec<usize>,
    pub q_prime_t: Vec<usize>,
    /// Colors whose K_{k−1} search exceeded the work budget (undecided —
    /// reported, never silently dropped).
    pub budget_exceeded: Vec<usize>,
}

fn validate_partition(state: &PipelineState, parts: &Partition) -> Result<(), PipelineError> {
    let ground = state.vertex_list.len();
    if parts.ground_size != ground {
        return Err(PipelineError::PartitionGroundMismatch {
            expected: ground,
            got: parts.ground_size,
        });
    }
    if parts.member_count != state.family.member_count() {
        return Err(PipelineError::PartitionFamilyMismatch {
            expected: state.family.member_count(),
            got: parts.member_count,
        });
    }
    let mut seen = vec![0usize; ground];
    for part in &parts.parts {
        for &i in part {
            if i >= ground {
                return Err(PipelineError::PartitionNotExact { vertex: i });
            }
            seen[i] += 1;
        }
    }
    if let Some(v) = seen.iter().position(|&c| c != 1) {
        return Err(PipelineError::PartitionNotExact { vertex: v });
    }
    Ok(())
}

/// Covered degree of `v` in color `q`: the vertices u ∈ V_j with χ(uv) = q
/// and uv covered.
fn covered_degree(state: &PipelineState, v: usize, q: usize) -> usize {
    state
        .vertex_list
        .iter()
        .filter(|&&u| {
            u != v && state.coloring.color(u, v) == q && !state.uncovered.contains(u, v)
        })
        .count()
}

/// Compute (Q_t, Q′_t) for every part of a partition of V_j.
///
/// Q_t keeps color q iff some v ∈ S_t has covered q-degree at least
/// n/budget²; Q′_t keeps q iff S_t contains a monochromatic K_{k_q−1} in
/// color q, decided by the exhaustive finder under `work_budget` per part
/// and color (blowups are reported per color).
pub fn color_menus(
    state: &PipelineState,
    parts: &Partition,
    work_budget: u64,
) -> Result<Vec<PartMenus>, PipelineError> {
    validate_partition(state, parts)?;
    let n = state.coloring.vertex_count();
    let m = state.coloring.color_count();
    let b2 = (state.budget as u64) * (state.budget as u64);

    let mut out = Vec::with_capacity(parts.parts.len());
    for (t, part) in parts.parts.iter().enumerate() {
        let vertices: Vec<usize> = part.iter().map(|&i| state.vertex_list[i]).collect();

        let mut q_t = Vec::new();
        for q in 0..m {
            let hit = vertices
                .iter()
                .any(|&v| covered_degree(state, v, q) as u64 * b2 >= n as u64);
            if hit {
                q_t.push(q);
            }
        }

        let induced = EdgeColoring::from_fn(vertices.len(), m, |a, b| {
            state.coloring.color(vertices[a], vertices[b])
        })?;
        let mut q_prime_t = Vec::new();
        let mut budget_exceeded = Vec::new();
        for q in 0..m {
            let need = state.k_targets[q] - 1;
            match find_monochromatic_clique_budgeted(&induced, need, Some(q), work_budget) {
                Ok(Some(_)) => q_prime_t.push(q),
                Ok(None) => {}
                Err(ColoringError::SearchBudgetExceeded { .. }) => budget_exceeded.push(q),
                Err(e) => return Err(e.into()),
            }
        }

        out.push(PartMenus {
            part: t,
            vertices,
            q_t,
            q_prime_t,
            budget_exceeded,
        });
    }
    Ok(out)
}

// ==================== Counting-based clique extension ====================

/// Counts reported when no extension vertex exists: the counting argument
/// guarantees one whenever `candidates − k` exceeds `2·k·δ`, so these numbers
/// show exactly which side of that inequality failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionMiss {
    /// |U| after deduplication.
    pub candidates: usize,
    /// Candidates skipped because they already sit in the base clique.
    pub in_base: usize,
    /// Candidates whose color-neighborhood misses part of the base clique.
    pub not_containing: usize,
    /// |U| − k, the supply side of the counting argument.
    pub threshold: usize,
    /// 2·k·δ, the demand side: neighborhoods that may miss the base.
    pub crossing_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ExtensionOutcome {
    Extended(CliqueCertificate),
    Absent(ExtensionMiss),
}

/// Extend a monochromatic K_{k−1} to K_k through a pivot's candidate set U:
/// scan U in ascending order for a vertex whose color-neighborhood contains
/// the whole base clique. Candidates must be active, distinct from the
/// pivot, joined to it in the base color, and by covered edges — the
/// conditions that place their neighborhoods inside 𝓕_j.
pub fn clique_extension(
    state: &PipelineState,
    base: &CliqueCertificate,
    pivot: usize,
    candidates: &[usize],
    delta: usize,
) -> Result<ExtensionOutcome, PipelineError> {
    let n = state.coloring.vertex_count();
    if !verify_clique(state.coloring, base)? {
        return Err(PipelineError::BaseNotMonochromatic);
    }
    if pivot >= n {
        return Err(PipelineError::PivotOutOfRange { pivot, n });
    }
    if !state.active.get(pivot) {
        return Err(PipelineError::VertexInactive {
            vertex: pivot,
            level: state.level,
        });
    }
    for &x in &base.vertices {
        if !state.active.get(x) {
            return Err(PipelineError::VertexInactive {
                vertex: x,
                level: state.level,
            });
        }
    }
    let q = base.color;
    for &u in candidates {
        if u >= n {
            return Err(PipelineError::CandidateOutOfRange { u, n });
        }
        if u == pivot {
            return Err(PipelineError::CandidateIsPivot { pivot });
        }
        if !state.active.get(u) {
            return Err(PipelineError::VertexInactive {
                vertex: u,
                level: state.level,
            });
        }
        let color = state.coloring.color(u, pivot);
        if color != q {
            return Err(PipelineError::CandidateWrongColor {
                u,
                pivot,
                color,
                expected: q,
            });
        }
        if state.uncovered.contains(u, pivot) {
            return Err(PipelineError::CandidateUncovered { u, pivot });
        }
    }

    let mut sorted: Vec<usize> = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let k = base.size + 1;

    let mut in_base = 0usize;
    let mut not_containing = 0usize;
    for &u in &sorted {
        if base.vertices.contains(&u) {
            in_base += 1;
            continue;
        }
        let contains = base
            .vertices
            .iter()
            .all(|&x| state.coloring.color(u, x) == q);
        if contains {
            let mut vertices = base.vertices.clone();
            vertices.push(u);
            vertices.sort_unstable();
            return Ok(ExtensionOutcome::Extended(CliqueCertificate::new(
                vertices, q,
            )));
        }
        not_containing += 1;
    }
    Ok(ExtensionOutcome::Absent(ExtensionMiss {
        candidates: sorted.len(),
        in_base,
        not_containing,
        threshold: sorted.len().saturating_sub(k),
        crossing_bound: 2 * k * delta,
    }))
}

// ==================== Level advancement ====================

/// Why an edge newly landed in (or stayed in) the uncovered set, following
/// the four-case analysis; every uncovered edge gets exactly one type, the
/// first that applies in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeType {
    /// Already uncovered at the previous level.
    Carryover,
    /// An endpoint sat in a dropped (small) part.
    SmallPart,
    /// Both endpoints survived inside the same part.
    SamePart,
    /// Covered before, but an endpoint's part pruned the edge's color.
    PrunedColor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifiedEdge {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeType,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EdgeTypeHistogram {
    pub carryover: usize,
    pub small_part: usize,
    pub same_part: usize,
    pub pruned_color: usize,
}

impl EdgeTypeHistogram {
    pub fn total(&self) -> usize {
        self.carryover + self.small_part + self.same_part + self.pruned_color
    }
}

/// Everything one level transition did: the δ used, the parts with their
/// menus and fate, and the classification of the next level's uncovered set.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionReport {
    pub from_level: usize,
    /// ⌊|𝓕_j| / budget⁴⌋ clamped into [1, |𝓕_j|].
    pub delta: usize,
    pub delta_clamped: bool,
    pub part_count: usize,
    pub parts: Vec<PartReport>,
    pub dropped_vertex_count: usize,
    pub new_uncovered_count: usize,
    pub edge_types: EdgeTypeHistogram,
    /// Per-edge classification of the whole next uncovered set, kept in
    /// memory for cross-checking; omitted from serialized reports.
    #[serde(skip)]
    pub classified: Vec<ClassifiedEdge>,
}

/// One part's menus and fate during a transition.
#[derive(Clone, Debug, Serialize)]
pub struct PartReport {
    pub index: usize,
    pub size: usize,
    /// Original vertex ids of S_t.
    pub vertices: Vec<usize>,
    pub q_t: Vec<usize>,
    pub q_prime_t: Vec<usize>,
    pub budget_exceeded: Vec<usize>,
    /// Q_t ∩ Q′_t ≠ ∅: the counting extension applies to this part.
    pub extension_applies: bool,
    /// The part is large and its menu reaches the next budget — the
    /// recursion hypothesis of the shrinking argument.
    pub recursion_applies: bool,
    pub dropped: bool,
}

/// size·budget^{6d} < n, evaluated without overflow: if budget^{6d}
/// overflows u128 the threshold n/budget^{6d} is below any real part size.
fn is_small_part(size: usize, n: usize, budget: usize, d: usize) -> bool {
    match (budget as u128).checked_pow(6 * d as u32) {
        Some(p) => (size as u128)
            .checked_mul(p)
            .is_some_and(|lhs| lhs < n as u128),
        None => false,
    }
}

/// Apply a partition of V_j to build level j+1: compute per-part menus,
/// drop parts smaller than n/budget^{6d}, prune the surviving vertices'
/// menus to their part's Q_t, rebuild the family and the uncovered set, and
/// classify every uncovered edge of the new level.
///
/// [`advance`] feeds this the low-crossing partition at the level's δ;
/// it is exposed separately so hand-chosen partitions can be studied too.
pub fn apply_partition<'a>(
    state: &PipelineState<'a>,
    parts: &Partition,
    d: usize,
    next_budget: usize,
) -> Result<(PipelineState<'a>, TransitionReport), PipelineError> {
    if next_budget == 0 || next_budget >= state.budget {
        return Err(PipelineError::InvalidBudgets);
    }
    let n = state.coloring.vertex_count();
    let m = state.coloring.color_count();
    let b = state.budget;

    let menus_per_part = color_menus(state, parts, DEFAULT_CLIQUE_BUDGET)?;

    // Decide each part's fate and assemble the per-part reports.
    let mut part_reports = Vec::with_capacity(menus_per_part.len());
    let mut part_of = vec![usize::MAX; n];
    let mut dropped_mask = BitRow::zeros(n);
    let mut next_active = state.active.clone();
    let mut next_menus = state.menus.clone();
    for pm in menus_per_part {
        let size = pm.vertices.len();
        let dropped = is_small_part(size, n, b, d);
        let mut q_t_mask = BitRow::zeros(m);
        for &q in &pm.q_t {
            q_t_mask.set(q, true);
        }
        for &v in &pm.vertices {
            part_of[v] = pm.part;
            if dropped {
                dropped_mask.set(v, true);
                next_active.set(v, false);
                next_menus[v] = BitRow::zeros(m);
            } else {
                next_menus[v].intersect_with(&q_t_mask);
            }
        }
        let extension_applies = pm.q_t.iter().any(|q| pm.q_prime_t.contains(q));
        let recursion_applies = !dropped && pm.q_t.len() >= next_budget;
        part_reports.push(PartReport {
            index: pm.part,
            size,
            vertices: pm.vertices,
            q_t: pm.q_t,
            q_prime_t: pm.q_prime_t,
            budget_exceeded: pm.budget_exceeded,
            extension_applies,
            recursion_applies,
            dropped,
        });
    }

    let next_state = PipelineState::from_menus(
        state.coloring,
        next_active,
        next_menus,
        state.level + 1,
        next_budget,
        &state.k_targets,
    )?;

    // Shrinking menus and vertex sets can only lose coverage.
    debug_assert!(state.uncovered.is_subset_of(&next_state.uncovered));

    // Classify every uncovered edge of the new level, first matching type
    // wins. The four cases are exhaustive: an edge that was covered, kept
    // both endpoints, and straddles two parts can only have lost its color
    // from an endpoint's menu.
    let mut classified = Vec::with_capacity(next_state.uncovered.len());
    let mut histogram = EdgeTypeHistogram::default();
    for (u, v) in next_state.uncovered.edges() {
        let kind = if state.uncovered.contains(u, v) {
            EdgeType::Carryover
        } else if dropped_mask.get(u) || dropped_mask.get(v) {
            EdgeType::SmallPart
        } else if part_of[u] == part_of[v] {
            EdgeType::SamePart
        } else {
            let q = state.coloring.color(u, v);
            debug_assert!(
                !next_state.menus[u].get(q) || !next_state.menus[v].get(q),
                "edge ({u}, {v}) misclassified"
            );
            EdgeType::PrunedColor
        };
        match kind {
            EdgeType::Carryover => histogram.carryover += 1,
            EdgeType::SmallPart => histogram.small_part += 1,
            EdgeType::SamePart => histogram.same_part += 1,
            EdgeType::PrunedColor => histogram.pruned_color += 1,
        }
        classified.push(ClassifiedEdge { u, v, kind });
    }

    let report = TransitionReport {
        from_level: state.level,
        delta: parts.delta,
        delta_clamped: false,
        part_count: parts.parts.len(),
        parts: part_reports,
        dropped_vertex_count: dropped_mask.count_ones(),
        new_uncovered_count: next_state.uncovered.len() - state.uncovered.len(),
        edge_types: histogram,
        classified,
    };
    Ok((next_state, report))
}

/// Construct level j+1 from level j along the standard path: partition 𝓕_j
/// at δ = |𝓕_j|/budget⁴ (clamped into [1, |𝓕_j|]) and apply it.
pub fn advance<'a>(
    state: &PipelineState<'a>,
    d: usize,
    next_budget: usize,
) -> Result<(PipelineState<'a>, TransitionReport), PipelineError> {
    if next_budget == 0 || next_budget >= state.budget {
        return Err(PipelineError::InvalidBudgets);
    }
    let family_size = state.family.member_count();
    if family_size == 0 {
        return Err(PipelineError::EmptyFamily { level: state.level });
    }
    let raw_delta = family_size / state.budget.pow(4);
    let delta = raw_delta.clamp(1, family_size);
    let parts = partition(&state.family, delta, d)?;
    let (next_state, mut report) = apply_partition(state, &parts, d, next_budget)?;
    report.delta_clamped = raw_delta != delta;
    Ok((next_state, report))
}

// ==================== Whole-pipeline trace ====================

/// Pass/fail of the three per-level bookkeeping properties, evaluated with
/// the budget-substituted right-hand sides in exact integer arithmetic.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PropertyReport {
    /// |𝓕_j| ≤ n·budget_j.
    pub family_bound: bool,
    /// |V_j| ≥ n − n/budget_{j−1}; trivially true at level 0.
    pub active_bound: bool,
    /// |B_j| ≤ 8n²/budget_{j−1}; trivially true at level 0.
    pub coverage_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub budget: usize,
    pub family_size: usize,
    pub active_count: usize,
    pub uncovered_count: usize,
    pub properties: PropertyReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineTrace {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k_targets: Vec<usize>,
    pub s: usize,
    pub budgets: Vec<usize>,
    pub levels: Vec<LevelReport>,
    pub transitions: Vec<TransitionReport>,
    /// Set when the loop stopped before exhausting the budget list.
    pub halted: Option<String>,
}

fn level_report(state: &PipelineState, budgets: &[usize]) -> LevelReport {
    let n = state.coloring.vertex_count();
    let j = state.level;
    let family_size = state.family.member_count();
    let active_count = state.active_count();
    let uncovered_count = state.uncovered.len();
    let (active_bound, coverage_bound) = if j == 0 {
        (true, true)
    } else {
        let prev = budgets[j - 1];
        (
            active_count * prev >= n * (prev - 1),
            uncovered_count * prev <= 8 * n * n,
        )
    };
    LevelReport {
        level: j,
        budget: state.budget,
        family_size,
        active_count,
        uncovered_count,
        properties: PropertyReport {
            family_bound: family_size <= n * budgets[j],
            active_bound,
            coverage_bound,
        },
    }
}

/// Run the level construction once per budget and report everything: sizes
/// and property verdicts per level, partition/menu/classification details
/// per transition. Property violations are recorded, not fatal; the trace
/// halts early only when the family empties out.
pub fn pipeline_trace(
    coloring: &EdgeColoring,
    d: usize,
    k_targets: &[usize],
    budgets: &[usize],
) -> Result<PipelineTrace, PipelineError> {
    if budgets.is_empty()
        || budgets.contains(&0)
        || budgets.windows(2).any(|w| w[0] <= w[1])
    {
        return Err(PipelineError::InvalidBudgets);
    }
    let mut state = PipelineState::initial(coloring, k_targets, budgets[0])?;
    let mut levels = vec![level_report(&state, budgets)];
    let mut transitions = Vec::new();
    let mut halted = None;

    for &next_budget in &budgets[1..] {
        if state.family.member_count() == 0 {
            halted = Some(format!("family empty at level {}", state.level));
            break;
        }
        let (next_state, report) = advance(&state, d, next_budget)?;
        transitions.push(report);
        levels.push(level_report(&next_state, budgets));
        state = next_state;
    }

    Ok(PipelineTrace {
        n: coloring.vertex_count(),
        m: coloring.color_count(),
        d,
        k_targets: k_targets.to_vec(),
        s: k_targets.iter().sum(),
        budgets: budgets.to_vec(),
        levels,
        transitions,
        halted,
    })
}

// ==================== Tests ====================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::random_coloring;
    use crate::packing::{haussler_c1, haussler_c2};

    fn single_color(n: usize) -> EdgeColoring {
        EdgeColoring::from_fn(n, 1, |_, _| 0).unwrap()
    }

    fn whole_ground_partition(state: &PipelineState) -> Partition {
        let ground = state.vertex_list.len();
        Partition {
            parts: vec![(0..ground).collect()],
            delta: state.family.member_count().max(1),
            size_cap: ground,
            cap_vacuous: false,
            c1: haussler_c1(1),
            c2: haussler_c2(1),
            d: 1,
            ground_size: ground,
            member_count: state.family.member_count(),
        }
    }

    #[test]
    fn initial_level_covers_everything() {
        let coloring = random_coloring(12, 3, 9).unwrap();
        let state = PipelineState::initial(&coloring, &[3, 3, 3], 4).unwrap();
        assert_eq!(state.family.member_count(), 12 * 3);
        assert_eq!(state.active_count(), 12);
        assert!(state.uncovered.is_empty());
        let report = covered_edges(&state).unwrap();
        assert_eq!(report.covered, report.total_edges);
        assert!(report.uncovered.is_empty());
    }

    #[test]
    fn removing_one_vertexs_menus_uncovers_its_star() {
        let coloring = random_coloring(7, 2, 4).unwrap();
        let n = 7;
        let mut menus = vec![BitRow::ones(2); n];
        menus[3] = BitRow::zeros(2);
        let state =
            PipelineState::from_menus(&coloring, BitRow::ones(n), menus, 0, 3, &[3, 3]).unwrap();
        let uncovered = state.uncovered.edges();
        assert_eq!(uncovered.len(), n - 1);
        assert!(uncovered.iter().all(|&(u, v)| u == 3 || v == 3));
        assert!(covered_edges(&state).is_ok());
        // The family lost exactly vertex 3's two neighborhoods.
        assert_eq!(state.family.member_count(), n * 2 - 2);
        assert!(state.member_keys.iter().all(|&(v, _)| v != 3));
    }

    #[test]
    fn coverage_mismatch_names_a_witness_edge() {
        let coloring = random_coloring(8, 2, 11).unwrap();
        let mut state = PipelineState::initial(&coloring, &[3, 3], 4).unwrap();
        state.uncovered.insert(2, 5);
        assert_eq!(
            covered_edges(&state).unwrap_err(),
            PipelineError::CoverageMismatch { u: 2, v: 5 }
        );
    }

    #[test]
    fn single_color_whole_part_gets_full_menus() {
        let coloring = single_color(8);
        let state = PipelineState::initial(&coloring, &[3], 2).unwrap();
        let parts = whole_ground_partition(&state);
        let menus = color_menus(&state, &parts, DEFAULT_CLIQUE_BUDGET).unwrap();
        assert_eq!(menus.len(), 1);
        assert_eq!(menus[0].q_t, vec![0]);
        assert_eq!(menus[0].q_prime_t, vec![0]);
        assert!(menus[0].budget_exceeded.is_empty());
    }

    #[test]
    fn part_too_small_for_any_clique_has_empty_q_prime() {
        let coloring = single_color(8);
        let state = PipelineState::initial(&coloring, &[5], 2).unwrap();
        let mut parts = whole_ground_partition(&state);
        parts.parts = vec![vec![0, 1], (2..8).collect()];
        let menus = color_menus(&state, &parts, DEFAULT_CLIQUE_BUDGET).unwrap();
        // K_4 does not fit in two vertices, but fits in six.
        assert!(menus[0].q_prime_t.is_empty());
        assert_eq!(menus[1].q_prime_t, vec![0]);
    }

    #[test]
    fn color_menus_rejects_foreign_partitions() {
        let coloring = single_color(8);
        let state = PipelineState::initial(&coloring, &[3], 2).unwrap();
        let mut parts = whole_ground_partition(&state);
        parts.ground_size = 5;
        assert_eq!(
            color_menus(&state, &parts, DEFAULT_CLIQUE_BUDGET).unwrap_err(),
            PipelineError::PartitionGroundMismatch {
                expected: 8,
                got: 5
            }
        );
        let mut duplicated = whole_ground_partition(&state);
        duplicated.parts = vec![(0..8).collect(), vec![0]];
        assert_eq!(
            color_menus(&state, &duplicated, DEFAULT_CLIQUE_BUDGET).unwrap_err(),
            PipelineError::PartitionNotExact { vertex: 0 }
        );
    }

    #[test]
    fn extension_on_complete_graph_always_succeeds() {
        let coloring = single_color(6);
        let state = PipelineState::initial(&coloring, &[4], 3).unwrap();
        let base = CliqueCertificate::new(vec![0, 1], 0);
        let out = clique_extension(&state, &base, 2, &[3, 4, 5], 1).unwrap();
        assert_eq!(
            out,
            ExtensionOutcome::Extended(CliqueCertificate::new(vec![0, 1, 3], 0))
        );
    }

    #[test]
    fn extension_finds_the_planted_vertex() {
        // χ(1,2) = 0 is the base edge; pivot 0 reaches 3, 4, 5 in color 0;
        // only u = 4 sees both base vertices in color 0.
        let coloring = EdgeColoring::from_fn(8, 2, |u, v| match (u, v) {
            (1, 2) => 0,
            (0, _) => 0,
            (1, 4) | (2, 4) => 0,
            (2, 3) => 0, // 3 still fails via χ(1,3) = 1
            (1, 5) => 0, // 5 still fails via χ(2,5) = 1
            _ => 1,
        })
        .unwrap();
        let state = PipelineState::initial(&coloring, &[3, 3], 2).unwrap();
        let base = CliqueCertificate::new(vec![1, 2], 0);

        let out = clique_extension(&state, &base, 0, &[3, 4, 5], 2).unwrap();
        assert_eq!(
            out,
            ExtensionOutcome::Extended(CliqueCertificate::new(vec![1, 2, 4], 0))
        );
        // Brute-force cross-check: u = 4 is the only candidate that works.
        let works: Vec<usize> = [3, 4, 5]
            .into_iter()
            .filter(|&u| coloring.color(u, 1) == 0 && coloring.color(u, 2) == 0)
            .collect();
        assert_eq!(works, vec![4]);

        // Without u = 4 the extension honestly reports the failed counts.
        let miss = clique_extension(&state, &base, 0, &[3, 5], 2).unwrap();
        assert_eq!(
            miss,
            ExtensionOutcome::Absent(ExtensionMiss {
                candidates: 2,
                in_base: 0,
                not_containing: 2,
                threshold: 0,
                crossing_bound: 12,
            })
        );
    }

    #[test]
    fn extension_with_no_candidates_reports_counts() {
        let coloring = single_color(5);
        let state = PipelineState::initial(&coloring, &[3], 2).unwrap();
        let base = CliqueCertificate::new(vec![0, 1], 0);
        let out = clique_extension(&state, &base, 2, &[], 4).unwrap();
        assert_eq!(
            out,
            ExtensionOutcome::Absent(ExtensionMiss {
                candidates: 0,
                in_base: 0,
                not_containing: 0,
                threshold: 0,
                crossing_bound: 24,
            })
        );
    }

    #[test]
    fn extension_validates_base_and_candidates() {
        let coloring = EdgeColoring::from_fn(6, 2, |u, v| ((u + v) % 2 == 0) as usize).unwrap();
        let state = PipelineState::initial(&coloring, &[3, 3], 2).unwrap();
        let not_mono = CliqueCertificate::new(vec![0, 1, 2], 0);
        assert_eq!(
            clique_extension(&state, &not_mono, 3, &[], 1),
            Err(PipelineError::BaseNotMonochromatic)
        );
        let base = CliqueCertificate::new(vec![1, 3], 1);
        assert_eq!(
            clique_extension(&state, &base, 5, &[5], 1),
            Err(PipelineError::CandidateIsPivot { pivot: 5 })
        );
        assert!(matches!(
            clique_extension(&state, &base, 5, &[2], 1),
            Err(PipelineError::CandidateWrongColor { u: 2, .. })
        ));
    }

    #[test]
    fn single_budget_trace_is_the_trivial_level_zero() {
        let coloring = random_coloring(10, 3, 2).unwrap();
        let trace = pipeline_trace(&coloring, 2, &[3, 3, 3], &[3]).unwrap();
        assert_eq!(trace.levels.len(), 1);
        assert!(trace.transitions.is_empty());
        assert!(trace.halted.is_none());
        let level = &trace.levels[0];
        assert_eq!(level.uncovered_count, 0);
        assert!(level.properties.family_bound);
        assert!(level.properties.active_bound);
        assert!(level.properties.coverage_bound);
    }

    #[test]
    fn single_color_trace_never_violates_the_family_bound() {
        let coloring = single_color(12);
        let trace = pipeline_trace(&coloring, 1, &[4], &[4, 2]).unwrap();
        assert_eq!(trace.levels.len(), 2);
        assert!(trace.levels.iter().all(|l| l.properties.family_bound));
        // One color shared by everyone: nothing is ever pruned or dropped.
        assert_eq!(trace.levels[1].family_size, 12);
        assert_eq!(trace.levels[1].uncovered_count, 0);
        assert_eq!(trace.transitions[0].edge_types.total(), 0);
    }

    #[test]
    fn trace_validates_inputs() {
        let coloring = random_coloring(6, 2, 1).unwrap();
        assert_eq!(
            pipeline_trace(&coloring, 2, &[3, 3], &[]).unwrap_err(),
            PipelineError::InvalidBudgets
        );
        assert_eq!(
            pipeline_trace(&coloring, 2, &[3, 3], &[3, 3]).unwrap_err(),
            PipelineError::InvalidBudgets
        );
        assert_eq!(
            pipeline_trace(&coloring, 2, &[3], &[4, 2]).unwrap_err(),
            PipelineError::TargetsLengthMismatch { m: 2, got: 1 }
        );
        assert_eq!(
            pipeline_trace(&coloring, 2, &[3, 0], &[4, 2]).unwrap_err(),
            PipelineError::ZeroTarget { color: 1 }
        );
    }

    #[test]
    fn two_level_trace_reports_consistent_sizes() {
        let coloring = random_coloring(40, 4, 7).unwrap();
        let trace = pipeline_trace(&coloring, 2, &[3, 3, 3, 3], &[4, 2]).unwrap();
        assert_eq!(trace.levels.len(), 2);
        assert_eq!(trace.transitions.len(), 1);
        let tr = &trace.transitions[0];
        // Parts cover V_0 exactly.
        let mut seen: Vec<usize> = tr.parts.iter().flat_map(|p| p.vertices.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..40).collect::<Vec<_>>());
        // The histogram accounts for every uncovered edge of level 1.
        assert_eq!(tr.edge_types.total(), trace.levels[1].uncovered_count);
        assert_eq!(tr.edge_types.total(), tr.classified.len());
        // B_0 = ∅, so nothing can be a carryover.
        assert_eq!(tr.edge_types.carryover, 0);
        assert_eq!(tr.new_uncovered_count, trace.levels[1].uncovered_count);
    }

    #[test]
    fn edge_set_roundtrips_edges() {
        let mut set = EdgeSet::empty(9);
        let edges = [(0, 1), (0, 8), (3, 7), (7, 8), (2, 3)];
        for &(u, v) in &edges {
            set.insert(u, v);
        }
        let mut expected: Vec<(usize, usize)> = edges.to_vec();
        expected.sort_unstable();
        assert_eq!(set.edges(), expected);
        assert_eq!(set.len(), 5);
        assert!(set.contains(8, 0));
        set.remove(0, 8);
        assert!(!set.contains(8, 0));
        assert_eq!(set.len(), 4);
    }
}
