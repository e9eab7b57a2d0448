//! Edge colorings of complete graphs and their neighborhood set systems.
//!
//! An [`EdgeColoring`] assigns one of `m` colors to every unordered pair of
//! `n` vertices, stored as a dense row-major upper-triangular array. The
//! *neighborhood family* of a coloring collects, for every color `q` and
//! vertex `v`, the set of vertices joined to `v` by a `q`-colored edge; it is
//! an indexed family with `n·m` members, duplicates and empty members
//! included. The recursive [`lower_bound_coloring`] keeps every color class
//! triangle-free while its neighborhood family has small dual VC dimension.

use crate::bits::BitRow;
use crate::set_system::{SetSystem, SetSystemError, DEFAULT_SHATTER_BUDGET};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on vertex counts so the dense color array stays in memory reach.
pub const MAX_VERTICES: usize = 4096;

/// Default cap on search nodes explored by the exhaustive clique finder.
pub const DEFAULT_CLIQUE_BUDGET: u64 = 1 << 22;

// ==================== Errors ====================

#[derive(Debug, Error, PartialEq)]
pub enum ColoringError {
    #[error("a coloring of {n} vertices needs at least one color")]
    NoColors { n: usize },
    #[error("{vertices} vertices exceed the capacity of {max}")]
    CapacityExceeded { vertices: usize, max: usize },
    #[error("expected {expected} edge colors for {n} vertices, got {got}")]
    WrongColorArrayLength {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("edge ({u}, {v}) has color {color}, valid colors are 0..{m}")]
    ColorOutOfRange {
        u: usize,
        v: usize,
        color: usize,
        m: usize,
    },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex {vertex} appears twice")]
    DuplicateVertex { vertex: usize },
    #[error("edge ({u}, {v}) is a self-loop")]
    SelfLoop { u: usize, v: usize },
    #[error("edge ({u}, {v}) appears more than once")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge ({u}, {v}) is missing")]
    MissingEdge { u: usize, v: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("search budget exceeded after exploring {explored} nodes (budget {budget})")]
    SearchBudgetExceeded { explored: u64, budget: u64 },
}

// ==================== Types ====================

/// A complete-graph edge coloring: every unordered pair of distinct vertices
/// carries exactly one color in `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    n: usize,
    m: usize,
    /// Row-major upper triangle: color of (u, v) with u < v sits at
    /// `u·(2n−u−1)/2 + (v−u−1)`.
    colors: Vec<u32>,
}

/// A claimed monochromatic clique: `vertices` pairwise joined in `color`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueCertificate {
    /// Sorted, distinct vertices.
    pub vertices: Vec<usize>,
    pub color: usize,
    pub size: usize,
}

impl CliqueCertificate {
    pub fn new(mut vertices: Vec<usize>, color: usize) -> Self {
        vertices.sort_unstable();
        let size = vertices.len();
        CliqueCertificate {
            vertices,
            color,
            size,
        }
    }
}

#[inline]
pub(crate) fn edge_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

pub(crate) fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

// ==================== Construction ====================

impl EdgeColoring {
    /// Build from an explicit row-major upper-triangular color array.
    pub fn from_colors(n: usize, m: usize, colors: Vec<u32>) -> Result<Self, ColoringError> {
        if n > MAX_VERTICES {
            return Err(ColoringError::CapacityExceeded {
                vertices: n,
                max: MAX_VERTICES,
            });
        }
        if n >= 2 && m == 0 {
            return Err(ColoringError::NoColors { n });
        }
        let expected = edge_count(n);
        if colors.len() != expected {
            return Err(ColoringError::WrongColorArrayLength {
                n,
                expected,
                got: colors.len(),
            });
        }
        for u in 0..n {
            for v in (u + 1)..n {
                let c = colors[edge_index(n, u, v)] as usize;
                if c >= m {
                    return Err(ColoringError::ColorOutOfRange { u, v, color: c, m });
                }
            }
        }
        Ok(EdgeColoring { n, m, colors })
    }

    /// Build by evaluating `f(u, v)` on every pair `u < v`.
    pub fn from_fn(
        n: usize,
        m: usize,
        mut f: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self, ColoringError> {
        let mut colors = Vec::with_capacity(edge_count(n));
        for u in 0..n {
            for v in (u + 1)..n {
                colors.push(f(u, v) as u32);
            }
        }
        EdgeColoring::from_colors(n, m, colors)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn color_count(&self) -> usize {
        self.m
    }

    /// Color of the edge `{u, v}`. Symmetric; asking about a self-loop or an
    /// out-of-range vertex is a programming error and panics.
    #[inline]
    pub fn color(&self, u: usize, v: usize) -> usize {
        assert!(u != v, "edge ({u}, {u}) is a self-loop");
        assert!(u < self.n && v < self.n, "vertex out of range");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.colors[edge_index(self.n, a, b)] as usize
    }

    /// The `q`-colored neighborhood of `v` as a bit row over vertices.
    pub fn neighborhood(&self, v: usize, q: usize) -> BitRow {
        debug_assert!(v < self.n && q < self.m);
        let mut row = BitRow::zeros(self.n);
        for u in 0..self.n {
            if u != v && self.color(u, v) == q {
                row.set(u, true);
            }
        }
        row
    }
}

// ==================== Neighborhood family ====================

/// The indexed neighborhood family of a coloring: one member per
/// `(color q, vertex v)` pair in lexicographic order, labeled `v{v}.q{q}`,
/// with member content `N_q(v) ∩ restriction` (the restriction defaults to
/// all vertices and never changes the member count — empty members and
/// duplicates are kept). The family always has exactly `n·m` members over the
/// full vertex ground set.
pub fn neighborhood_family(
    coloring: &EdgeColoring,
    restriction: Option<&[usize]>,
) -> Result<SetSystem, ColoringError> {
    let n = coloring.n;
    let restriction_row = match restriction {
        None => None,
        Some(vertices) => {
            let mut row = BitRow::zeros(n);
            for &v in vertices {
                if v >= n {
                    return Err(ColoringError::VertexOutOfRange { vertex: v, n });
                }
                if row.get(v) {
                    return Err(ColoringError::DuplicateVertex { vertex: v });
                }
                row.set(v, true);
            }
            Some(row)
        }
    };
    let mut members = Vec::with_capacity(n * coloring.m);
    let mut labels = Vec::with_capacity(n * coloring.m);
    for q in 0..coloring.m {
        for v in 0..n {
            let mut row = coloring.neighborhood(v, q);
            if let Some(r) = &restriction_row {
                row.intersect_with(r);
            }
            members.push(row);
            labels.push(format!("v{v}.q{q}"));
        }
    }
    Ok(SetSystem::from_rows(n, members)
        .with_labels(labels)
        .expect("label count matches member count"))
}

/// Dual VC dimension of the coloring's neighborhood family, default budget.
pub fn coloring_dual_vc(coloring: &EdgeColoring) -> Result<i32, SetSystemError> {
    coloring_dual_vc_budgeted(coloring, DEFAULT_SHATTER_BUDGET)
}

/// Dual VC dimension of the neighborhood family with an explicit budget.
pub fn coloring_dual_vc_budgeted(
    coloring: &EdgeColoring,
    budget: u64,
) -> Result<i32, SetSystemError> {
    let family = neighborhood_family(coloring, None).expect("no restriction to validate");
    family.dual_vc_dimension_budgeted(budget)
}

// ==================== Constructions ====================

/// The recursive lower-bound coloring of `K_{2^m}` with `m` colors: two
/// disjoint copies of the `(m−1)`-color construction with all edges between
/// the copies in color `m−1`. Closed form: vertices are `m`-bit strings and
/// the color of `{u, v}` is the index of the highest bit where they differ.
/// Every color class is a disjoint union of complete bipartite graphs, hence
/// triangle-free.
pub fn lower_bound_coloring(m: usize) -> Result<EdgeColoring, ColoringError> {
    if m == 0 {
        return Err(ColoringError::NoColors { n: 1 });
    }
    if m >= usize::BITS as usize || (1usize << m) > MAX_VERTICES {
        return Err(ColoringError::CapacityExceeded {
            vertices: 1usize.checked_shl(m as u32).unwrap_or(usize::MAX),
            max: MAX_VERTICES,
        });
    }
    let n = 1usize << m;
    EdgeColoring::from_fn(n, m, |u, v| {
        let x = u ^ v;
        usize::BITS as usize - 1 - x.leading_zeros() as usize
    })
}

/// Uniform random coloring, deterministic in the seed: edges are colored in
/// row-major upper-triangular order from a ChaCha8 stream.
pub fn random_coloring(n: usize, m: usize, seed: u64) -> Result<EdgeColoring, ColoringError> {
    if n >= 2 && m == 0 {
        return Err(ColoringError::NoColors { n });
    }
    if n > MAX_VERTICES {
        return Err(ColoringError::CapacityExceeded {
            vertices: n,
            max: MAX_VERTICES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colors = (0..edge_count(n))
        .map(|_| rng.random_range(0..m as u32))
        .collect();
    EdgeColoring::from_colors(n, m, colors)
}

// ==================== Exhaustive clique search ====================

/// Exhaustive monochromatic clique search with the default node budget.
pub fn find_monochromatic_clique_bruteforce(
    coloring: &EdgeColoring,
    k: usize,
    color: Option<usize>,
) -> Result<Option<CliqueCertificate>, ColoringError> {
    find_monochromatic_clique_budgeted(coloring, k, color, DEFAULT_CLIQUE_BUDGET)
}

/// Exhaustive monochromatic clique search.
///
/// Scans colors in ascending order (or only `color` when given) and runs a
/// branch-and-bound over common neighborhoods in ascending vertex order, so
/// the first hit is the lexicographically smallest clique of the lowest
/// color. `None` is a definitive absence claim. The budget counts search
/// nodes; exhausting it is an explicit error, never a silent `None`.
///
/// `k = 0` succeeds immediately with an empty certificate (every graph
/// contains the empty clique).
pub fn find_monochromatic_clique_budgeted(
    coloring: &EdgeColoring,
    k: usize,
    color: Option<usize>,
    budget: u64,
) -> Result<Option<CliqueCertificate>, ColoringError> {
    if let Some(q) = color {
        if q >= coloring.m {
            return Err(ColoringError::ColorOutOfRange {
                u: 0,
                v: 0,
                color: q,
                m: coloring.m,
            });
        }
    }
    if k == 0 {
        return Ok(Some(CliqueCertificate::new(vec![], color.unwrap_or(0))));
    }
    if k > coloring.n {
        return Ok(None);
    }
    let colors: Vec<usize> = match color {
        Some(q) => vec![q],
        None => (0..coloring.m).collect(),
    };
    let mut explored = 0u64;
    for q in colors {
        let neighbors: Vec<BitRow> = (0..coloring.n)
            .map(|v| coloring.neighborhood(v, q))
            .collect();
        let mut clique = Vec::with_capacity(k);
        let mut candidates = BitRow::ones(coloring.n);
        if let Some(found) = extend_clique(
            &neighbors,
            k,
            &mut clique,
            &mut candidates,
            &mut explored,
            budget,
        )? {
            return Ok(Some(CliqueCertificate::new(found, q)));
        }
    }
    Ok(None)
}

/// Depth-first extension in ascending vertex order. `candidates` holds the
/// common neighborhood of the current clique, minus already-branched
/// vertices; pruning cuts branches that cannot reach size `k`.
fn extend_clique(
    neighbors: &[BitRow],
    k: usize,
    clique: &mut Vec<usize>,
    candidates: &mut BitRow,
    explored: &mut u64,
    budget: u64,
) -> Result<Option<Vec<usize>>, ColoringError> {
    if clique.len() == k {
        return Ok(Some(clique.clone()));
    }
    if clique.len() + candidates.count_ones() < k {
        return Ok(None);
    }
    for v in candidates.to_indices() {
        *explored += 1;
        if *explored > budget {
            return Err(ColoringError::SearchBudgetExceeded {
                explored: *explored,
                budget,
            });
        }
        candidates.set(v, false);
        let mut next = candidates.and(&neighbors[v]);
        clique.push(v);
        let found = extend_clique(neighbors, k, clique, &mut next, explored, budget)?;
        clique.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

// ==================== Text format ====================

impl EdgeColoring {
    /// Parse the plain text format: first line `n m`, then the `n·(n−1)/2`
    /// row-major upper-triangular edge colors as whitespace-separated
    /// integers across any number of lines.
    pub fn parse_text(input: &str) -> Result<Self, ColoringError> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or_else(|| ColoringError::Parse {
            line: 1,
            message: "missing header line".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ColoringError::Parse {
                line: line_no,
                message: "header must be `vertex_count color_count`".into(),
            });
        }
        let n: usize = fields[0].parse().map_err(|_| ColoringError::Parse {
            line: line_no,
            message: format!("invalid vertex count {:?}", fields[0]),
        })?;
        let m: usize = fields[1].parse().map_err(|_| ColoringError::Parse {
            line: line_no,
            message: format!("invalid color count {:?}", fields[1]),
        })?;
        let expected = edge_count(n);
        let mut colors = Vec::with_capacity(expected);
        for (line_no, line) in lines {
            for token in line.split_whitespace() {
                if colors.len() == expected {
                    return Err(ColoringError::Parse {
                        line: line_no,
                        message: format!("unexpected extra color {token:?}"),
                    });
                }
                let c: u32 = token.parse().map_err(|_| ColoringError::Parse {
                    line: line_no,
                    message: format!("invalid color {token:?}"),
                })?;
                colors.push(c);
            }
        }
        if colors.len() != expected {
            return Err(ColoringError::Parse {
                line: 0,
                message: format!("expected {expected} edge colors, found {}", colors.len()),
            });
        }
        EdgeColoring::from_colors(n, m, colors)
    }

    /// Write the text format, one vertex row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m);
        for u in 0..self.n.saturating_sub(1) {
            let row: Vec<String> = ((u + 1)..self.n)
                .map(|v| self.colors[edge_index(self.n, u, v)].to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

// JSON mirrors the text format's content with explicit edge triples.
#[derive(Serialize, Deserialize)]
struct ColoringRepr {
    n: usize,
    m: usize,
    edges: Vec<(usize, usize, usize)>,
}

impl Serialize for EdgeColoring {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut edges = Vec::with_capacity(edge_count(self.n));
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                edges.push((u, v, self.colors[edge_index(self.n, u, v)] as usize));
            }
        }
        ColoringRepr {
            n: self.n,
            m: self.m,
            edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EdgeColoring {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ColoringRepr::deserialize(deserializer)?;
        let expected = edge_count(repr.n);
        let mut colors: Vec<Option<u32>> = vec![None; expected];
        for (u, v, c) in repr.edges {
            if u == v {
                return Err(D::Error::custom(ColoringError::SelfLoop { u, v }));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if b >= repr.n {
                return Err(D::Error::custom(ColoringError::VertexOutOfRange {
                    vertex: b,
                    n: repr.n,
                }));
            }
            let idx = edge_index(repr.n, a, b);
            if colors[idx].is_some() {
                return Err(D::Error::custom(ColoringError::DuplicateEdge { u: a, v: b }));
            }
            colors[idx] = Some(c as u32);
        }
        let mut flat = Vec::with_capacity(expected);
        for u in 0..repr.n {
            for v in (u + 1)..repr.n {
                match colors[edge_index(repr.n, u, v)] {
                    Some(c) => flat.push(c),
                    None => {
                        return Err(D::Error::custom(ColoringError::MissingEdge { u, v }));
                    }
                }
            }
        }
        EdgeColoring::from_colors(repr.n, repr.m, flat).map_err(D::Error::custom)
    }
}

// ==================== Tests ====================
