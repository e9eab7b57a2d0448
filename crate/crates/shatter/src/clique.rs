//! Certificate verification and a practical best-effort clique finder.
//!
//! [`neighborhood_descent`] is the constructive counterpart of the proof's
//! final averaging step: repeatedly pick the vertex whose largest single-color
//! degree inside the surviving vertex set is maximal, commit it to that
//! color's partial clique, and descend into the chosen neighborhood. It
//! always terminates with a *valid* certificate for some color, recording the
//! achieved size per color so callers can assert their own thresholds.

use crate::bits::BitRow;
use crate::coloring::{CliqueCertificate, EdgeColoring};
use serde::{Deserialize, Serialize};
use thiserror::Error;

// ==================== Errors ====================

#[derive(Debug, Error, PartialEq)]
pub enum CliqueError {
    #[error("certificate vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("certificate vertices must be sorted and distinct (offending vertex {vertex})")]
    UnsortedVertices { vertex: usize },
    #[error("certificate size field {size} does not match {vertices} vertices")]
    SizeMismatch { size: usize, vertices: usize },
    #[error("certificate color {color} out of range for {m} colors")]
    ColorOutOfRange { color: usize, m: usize },
    #[error("expected one target per color ({m}), got {got}")]
    TargetsLengthMismatch { m: usize, got: usize },
    #[error("target for color {color} must be at least 1")]
    ZeroTarget { color: usize },
    #[error("menu bound must be at least 1")]
    ZeroMenuBound,
}

// ==================== Certificate verification ====================

/// Check that a certificate is well-formed and that every internal pair
/// carries the certificate's color. Malformed certificates (out-of-range or
/// unsorted vertices, wrong size field, bad color) are errors; a well-formed
/// certificate whose edges disagree simply returns `false`.
pub fn verify_clique(
    coloring: &EdgeColoring,
    cert: &CliqueCertificate,
) -> Result<bool, CliqueError> {
    let n = coloring.vertex_count();
    if cert.size != cert.vertices.len() {
        return Err(CliqueError::SizeMismatch {
            size: cert.size,
            vertices: cert.vertices.len(),
        });
    }
    if cert.color >= coloring.color_count() {
        return Err(CliqueError::ColorOutOfRange {
            color: cert.color,
            m: coloring.color_count(),
        });
    }
    for (i, &v) in cert.vertices.iter().enumerate() {
        if v >= n {
            return Err(CliqueError::VertexOutOfRange { vertex: v, n });
        }
        if i > 0 && cert.vertices[i - 1] >= v {
            return Err(CliqueError::UnsortedVertices { vertex: v });
        }
    }
    for (i, &u) in cert.vertices.iter().enumerate() {
        for &v in &cert.vertices[i + 1..] {
            if coloring.color(u, v) != cert.color {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ==================== Neighborhood descent ====================

/// Outcome of [`neighborhood_descent`]: the best certificate found plus the
/// per-color sizes achieved, so callers can assert success thresholds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentOutcome {
    pub certificate: CliqueCertificate,
    /// Final partial-clique size per color; never exceeds the target.
    pub achieved: Vec<usize>,
    pub targets: Vec<usize>,
    /// Whether some color reached its full target.
    pub completed: bool,
}

/// Best-effort monochromatic clique search by greedy neighborhood descent.
///
/// The greedy core maintains a surviving vertex set `W` and one partial
/// clique per color. Each round:
///
/// 1. any color needing one more vertex is completed with the lowest vertex
///    of `W`; any color needing two is completed by the lexicographically
///    first edge of that color inside `W`;
/// 2. otherwise the pair `(v, q)` maximizing `|N_q(v) ∩ W|` is committed:
///    `v` joins color `q`'s partial clique and `W` descends into the chosen
///    neighborhood. Every vertex of `W` stays adjacent in color `q` to all of
///    that color's picks, so partial cliques are monochromatic by
///    construction. Per vertex, only its `menu_bound` highest-degree colors
///    compete (ties toward lower color index).
///
/// Ties break toward the lowest vertex index, then the lowest color index.
/// When `W` runs dry the largest partial clique is returned, extended by one
/// surviving vertex when possible. The certificate is always valid, whatever
/// size it reached.
///
/// The descent is evaluated once per index prefix `{0, …, j-1}` of the vertex
/// set and the largest certificate wins, ties going to the smallest prefix.
/// A prefix run depends only on vertices inside the prefix, so appending
/// vertices to a coloring can only add candidate runs: the achieved size is
/// monotone under growing `n` with the old coloring induced on the old
/// vertices, and outputs stay stable when growth brings no improvement.
pub fn neighborhood_descent(
    coloring: &EdgeColoring,
    k_targets: &[usize],
    menu_bound: usize,
) -> Result<DescentOutcome, CliqueError> {
    let n = coloring.vertex_count();
    let m = coloring.color_count();
    if k_targets.len() != m {
        return Err(CliqueError::TargetsLengthMismatch {
            m,
            got: k_targets.len(),
        });
    }
    if let Some(q) = k_targets.iter().position(|&t| t == 0) {
        return Err(CliqueError::ZeroTarget { color: q });
    }
    if menu_bound == 0 {
        return Err(CliqueError::ZeroMenuBound);
    }

    // neighbors[q][v] = N_q(v) over the full graph; prefix runs stay inside
    // their prefix because every lookup is masked by the surviving set.
    let neighbors: Vec<Vec<BitRow>> = (0..m)
        .map(|q| (0..n).map(|v| coloring.neighborhood(v, q)).collect())
        .collect();

    let mut best: Option<DescentOutcome> = None;
    for prefix in 1..=n {
        let mut start = BitRow::zeros(n);
        for v in 0..prefix {
            start.set(v, true);
        }
        let out = descend(&neighbors, k_targets, menu_bound, start, m);
        if best
            .as_ref()
            .is_none_or(|b| out.certificate.size > b.certificate.size)
        {
            best = Some(out);
        }
    }
    Ok(best.unwrap_or_else(|| DescentOutcome {
        certificate: CliqueCertificate::new(vec![], 0),
        achieved: vec![0; m],
        targets: k_targets.to_vec(),
        completed: false,
    }))
}

/// One greedy descent run starting from the given surviving set.
fn descend(
    neighbors: &[Vec<BitRow>],
    k_targets: &[usize],
    menu_bound: usize,
    mut active: BitRow,
    m: usize,
) -> DescentOutcome {
    let mut partial: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut remaining: Vec<usize> = k_targets.to_vec();

    // With zero colors (possible only for n ≤ 1) the certificate degenerates
    // to an empty vertex list tagged color 0.
    let outcome = |partial: Vec<Vec<usize>>, completed: Option<usize>| {
        let best = completed.unwrap_or_else(|| {
            (0..m)
                .max_by(|&a, &b| partial[a].len().cmp(&partial[b].len()).then(b.cmp(&a)))
                .unwrap_or(0)
        });
        let certificate =
            CliqueCertificate::new(partial.get(best).cloned().unwrap_or_default(), best);
        let achieved: Vec<usize> = partial.iter().map(|p| p.len()).collect();
        DescentOutcome {
            certificate,
            achieved,
            targets: k_targets.to_vec(),
            completed: completed.is_some(),
        }
    };

    loop {
        let survivors = active.to_indices();

        // Base case: one vertex to go — any survivor completes the clique.
        if !survivors.is_empty() {
            if let Some(q) = (0..m).find(|&q| remaining[q] == 1) {
                partial[q].push(survivors[0]);
                return outcome(partial, Some(q));
            }
        }
        // Base case: two to go — the first same-color edge inside W completes.
        for q in (0..m).filter(|&q| remaining[q] == 2) {
            for (i, &a) in survivors.iter().enumerate() {
                if let Some(&b) = survivors[i + 1..]
                    .iter()
                    .find(|&&b| neighbors[q][a].get(b))
                {
                    partial[q].push(a);
                    partial[q].push(b);
                    return outcome(partial, Some(q));
                }
            }
        }

        // Greedy step: the (vertex, color) pair of maximal surviving degree.
        let mut best: Option<(usize, usize, usize)> = None; // (degree, v, q)
        for &v in &survivors {
            let degrees: Vec<usize> = (0..m)
                .map(|q| neighbors[q][v].and_count(&active))
                .collect();
            let mut menu: Vec<usize> = (0..m).collect();
            menu.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
            menu.truncate(menu_bound);
            menu.sort_unstable(); // ascending color order for deterministic ties
            for q in menu {
                if degrees[q] > 0 && best.is_none_or(|(d, _, _)| degrees[q] > d) {
                    best = Some((degrees[q], v, q));
                }
            }
        }

        match best {
            Some((_, v, q)) => {
                partial[q].push(v);
                remaining[q] -= 1; // ≥ 3 entering the greedy step, so stays ≥ 2
                active.intersect_with(&neighbors[q][v]);
                active.set(v, false);
            }
            None => {
                // Every surviving degree is zero (or W is empty): extend the
                // largest partial clique by one survivor if possible, then
                // report the best certificate found so far.
                let grow = (0..m)
                    .filter(|&q| remaining[q] >= 1)
                    .max_by(|&a, &b| partial[a].len().cmp(&partial[b].len()).then(b.cmp(&a)));
                if let (Some(q), Some(&w)) = (grow, survivors.first()) {
                    partial[q].push(w);
                    remaining[q] -= 1;
                    if remaining[q] == 0 {
                        return outcome(partial, Some(q));
                    }
                }
                return outcome(partial, None);
            }
        }
    }
}

// ==================== Tests ====================
