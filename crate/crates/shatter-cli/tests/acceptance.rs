//! The nine release acceptance checks. Each test re-derives the expected
//! result with machinery written independently in this file (bitmask
//! oracles, direct scans, per-edge re-classification) and prints a single
//! `ACCEPTANCE <i> PASS` line with its measurements.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use shatter::coloring::find_monochromatic_clique_budgeted;
use shatter::pipeline::{advance, ClassifiedEdge, EdgeType, PipelineState, TransitionReport};
use shatter::{
    coloring_dual_vc, lower_bound_coloring, neighborhood_descent, partition, random_coloring,
    verify_clique, verify_partition, EdgeColoring, SetSystem,
};

use shatter_cli::ramsey::{ramsey_small, RamseyOptions, RamseyOutcome};

// ==================== shared oracle helpers ====================

/// Exhaustive VC dimension over all 2^n ground subsets, via u32 masks.
fn oracle_vc(sys: &SetSystem) -> i32 {
    let n = sys.ground_size();
    assert!(n <= 16, "oracle is exponential in n");
    let members = member_masks(sys);
    let mut best = -1;
    for subset in 0u32..(1 << n) {
        let size = subset.count_ones() as i32;
        if size <= best {
            continue;
        }
        if trace_count(&members, subset) == 1usize << size {
            best = size;
        }
    }
    best
}

fn member_masks(sys: &SetSystem) -> Vec<u32> {
    sys.members()
        .iter()
        .map(|m| {
            let mut mask = 0u32;
            for v in m.to_indices() {
                mask |= 1 << v;
            }
            mask
        })
        .collect()
}

/// Number of distinct restrictions of the members to `subset`.
fn trace_count(members: &[u32], subset: u32) -> usize {
    let traces: HashSet<u32> = members.iter().map(|&m| m & subset).collect();
    traces.len()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut result = 1u128;
    for i in 0..k {
        result = result * (n - i) as u128 / (i + 1) as u128;
    }
    result
}

/// Σ_{i ≤ d} C(s, i); the trace-count bound for VC dimension d.
fn binomial_sum(s: usize, d: i32) -> u128 {
    (0..=d.max(0) as usize).map(|i| binomial(s, i)).sum()
}

/// 100 seeded systems whose exact VC dimension is at most 3.
fn bounded_vc_corpus() -> Vec<(u64, SetSystem, i32)> {
    let mut corpus = Vec::new();
    let mut seed = 1000u64;
    while corpus.len() < 100 {
        let s = seed as usize;
        let n = 3 + s % 6;
        let count = 2 + (s * 11) % 11;
        let density = [0.15, 0.3, 0.5][s % 3];
        let sys = SetSystem::random(n, count, density, seed).unwrap();
        let vc = sys.vc_dimension().unwrap();
        if (0..=3).contains(&vc) {
            corpus.push((seed, sys, vc));
        }
        seed += 1;
    }
    corpus
}

// ==================== 1: VC oracle equivalence ====================

#[test]
fn acceptance_1_vc_dimension_matches_the_exhaustive_oracle() {
    let start = Instant::now();
    let mut checked = 0;
    for seed in 0..200u64 {
        let s = seed as usize;
        let n = 1 + s % 10;
        let count = 1 + (s * 7) % 32;
        let density = [0.2, 0.35, 0.5, 0.65, 0.8][s % 5];
        let sys = SetSystem::random(n, count, density, seed).unwrap();
        let expected = oracle_vc(&sys);
        let got = sys.vc_dimension().unwrap();
        assert_eq!(got, expected, "seed {seed}: n={n} count={count}");
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:.2?}");
    println!(
        "ACCEPTANCE 1 PASS: vc_dimension equals the 2^n-subset oracle on {checked}/200 systems in {elapsed:.2?}"
    );
}

// ==================== 2: dual VC bound ====================

#[test]
fn acceptance_2_dual_vc_obeys_the_exponential_bound() {
    let corpus = bounded_vc_corpus();
    let mut violations = 0;
    for (seed, sys, vc) in &corpus {
        let dual = sys.dual_vc_dimension().unwrap();
        let bound = (1i32 << (vc + 1)) - 1;
        if dual > bound {
            violations += 1;
            eprintln!("seed {seed}: dual vc {dual} exceeds 2^{}-1 = {bound}", vc + 1);
        }
    }
    assert_eq!(violations, 0);
    println!(
        "ACCEPTANCE 2 PASS: dual_vc_dimension <= 2^(d+1)-1 on {}/100 systems with d <= 3, 0 violations",
        corpus.len()
    );
}

// ==================== 3: Sauer–Shelah trace bound ====================

#[test]
fn acceptance_3_trace_counts_obey_the_binomial_sum() {
    let corpus = bounded_vc_corpus();
    let mut sampled = 0u64;
    let mut violations = 0;
    for (seed, sys, vc) in &corpus {
        let n = sys.ground_size();
        let members = member_masks(sys);
        let full = (1u32 << n) - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
        let mut subsets = vec![full];
        subsets.extend((0..8).map(|_| rng.random::<u32>() & full));
        for subset in subsets {
            let traces = trace_count(&members, subset) as u128;
            let bound = binomial_sum(subset.count_ones() as usize, *vc);
            if traces > bound {
                violations += 1;
                eprintln!("seed {seed}: subset {subset:b} has {traces} traces > {bound}");
            }
            sampled += 1;
        }
    }
    assert_eq!(violations, 0);
    println!(
        "ACCEPTANCE 3 PASS: trace counts within the binomial-sum bound on {sampled} sampled subsets, 0 violations"
    );
}

// ==================== 4: partition invariants ====================

#[test]
fn acceptance_4_partitions_satisfy_all_four_invariants() {
    let start = Instant::now();
    let d = 2;
    let mut partitions = 0;
    for i in 0..50u64 {
        let s = i as usize;
        let n = 32 + (s * 37) % 225;
        let count = 64 + (s * 97) % 449;
        let density = [0.1, 0.3, 0.5, 0.7, 0.9][s % 5];
        let sys = SetSystem::random(n, count, density, i).unwrap();
        let mut delta = 1;
        while delta <= count {
            let part = partition(&sys, delta, d).unwrap();
            let report = verify_partition(&part, &sys).unwrap();
            assert!(
                report.pass,
                "seed {i} (n={n}, count={count}), delta {delta}: {report:?}"
            );
            partitions += 1;
            delta *= 2;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:.2?}");
    println!(
        "ACCEPTANCE 4 PASS: coverage, size cap, part count, and crossing bound verified for {partitions} partitions over 50 systems in {elapsed:.2?}"
    );
}

// ==================== 5: lower-bound construction ====================

#[test]
fn acceptance_5_lower_bound_coloring_properties() {
    let start = Instant::now();
    let mut triples_scanned = 0u64;
    for m in 1..=7usize {
        let coloring = lower_bound_coloring(m).unwrap();
        let n = coloring.vertex_count();
        assert_eq!(n, 1 << m);
        // direct scan over every vertex triple
        for a in 0..n {
            for b in (a + 1)..n {
                let ab = coloring.color(a, b);
                for c in (b + 1)..n {
                    triples_scanned += 1;
                    assert!(
                        ab != coloring.color(b, c) || ab != coloring.color(a, c),
                        "m={m}: monochromatic triangle {a},{b},{c}"
                    );
                }
            }
        }
        // and the library search agrees there is none
        assert_eq!(
            find_monochromatic_clique_budgeted(&coloring, 3, None, 1 << 32).unwrap(),
            None
        );
    }
    let mut dual_dims = Vec::new();
    for m in 1..=5usize {
        let coloring = lower_bound_coloring(m).unwrap();
        let dim = coloring_dual_vc(&coloring).unwrap();
        assert!(dim <= 2, "m={m}: dual vc {dim}");
        dual_dims.push(dim);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:.2?}");
    println!(
        "ACCEPTANCE 5 PASS: 0 monochromatic triangles in {triples_scanned} scanned triples (m <= 7); exact dual VC {dual_dims:?} <= 2 (m <= 5) in {elapsed:.2?}"
    );
}

// ==================== 6: classical Ramsey checkpoint ====================

#[test]
fn acceptance_6_two_color_ramsey_number_is_six() {
    let start = Instant::now();
    let report = ramsey_small(3, 2, 8, &RamseyOptions::default()).unwrap();
    assert_eq!(report.outcome, RamseyOutcome::Exact { value: 6 });
    assert_eq!(report.witness_n, 5);
    assert!(report.witness_verified);

    // the stored K_5 witness, re-checked triple by triple
    let witness = EdgeColoring::parse_text(&report.witness).unwrap();
    assert_eq!((witness.vertex_count(), witness.color_count()), (5, 2));
    for a in 0..5 {
        for b in (a + 1)..5 {
            for c in (b + 1)..5 {
                assert!(
                    witness.color(a, b) != witness.color(b, c)
                        || witness.color(a, b) != witness.color(a, c),
                    "witness has a monochromatic triangle {a},{b},{c}"
                );
            }
        }
    }

    let confirmation = report.confirmation.expect("deciding level was swept");
    assert_eq!(confirmation.n, 6);
    assert_eq!(confirmation.colorings_checked, 1 << 15);
    assert!(confirmation.all_contain_clique);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:.2?}");
    println!(
        "ACCEPTANCE 6 PASS: ramsey_small(3, 2) = 6 with a verified K_5 witness and all 2^15 colorings of K_6 confirmed in {elapsed:.2?}"
    );
}

// ==================== 7: finder soundness and K_6 completeness ====================

#[test]
fn acceptance_7_descent_soundness_and_k6_completeness() {
    let start = Instant::now();
    let mut sound = 0;
    for seed in 0..1000u64 {
        let s = seed as usize;
        let n = 4 + (s * 7) % 61;
        let m = 1 + s % 6;
        let coloring = random_coloring(n, m, seed).unwrap();
        let targets: Vec<usize> = (0..m).map(|q| 2 + (s + q) % 3).collect();
        let menu_bound = 1 + s % 4;
        let outcome = neighborhood_descent(&coloring, &targets, menu_bound).unwrap();
        assert!(
            verify_clique(&coloring, &outcome.certificate).unwrap(),
            "seed {seed}: certificate {:?} fails verification",
            outcome.certificate
        );
        for (q, (&a, &t)) in outcome.achieved.iter().zip(&targets).enumerate() {
            assert!(a <= t, "seed {seed}: color {q} overshoots its target");
        }
        assert_eq!(
            outcome.completed,
            outcome.certificate.size == targets[outcome.certificate.color],
            "seed {seed}: completion flag inconsistent"
        );
        sound += 1;
    }

    let mut complete = 0;
    for code in 0..(1u32 << 15) {
        let colors: Vec<u32> = (0..15).map(|i| (code >> i) & 1).collect();
        let coloring = EdgeColoring::from_colors(6, 2, colors).unwrap();
        let outcome = neighborhood_descent(&coloring, &[3, 3], 2).unwrap();
        assert!(
            outcome.completed && outcome.certificate.size == 3,
            "coloring {code:#017b}: no triangle found"
        );
        assert!(verify_clique(&coloring, &outcome.certificate).unwrap());
        complete += 1;
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:.2?}");
    println!(
        "ACCEPTANCE 7 PASS: {sound}/1000 random-coloring descents sound; triangle found on all {complete} 2-colorings of K_6 in {elapsed:.2?}"
    );
}

// ==================== 8: pipeline classification ====================

/// Re-derive one level transition from scratch — partition fates, color
/// menus, the new uncovered set, and the per-edge classification — and
/// compare against the reported transition. Returns the number of
/// re-classified edges.
fn verify_transition_independently(
    coloring: &EdgeColoring,
    prev: &PipelineState,
    next: &PipelineState,
    tr: &TransitionReport,
    d: usize,
    label: &str,
) -> usize {
    let n = coloring.vertex_count();
    let m = coloring.color_count();

    // parts tile the previous active set exactly once
    let mut part_of = vec![usize::MAX; n];
    let mut dropped = vec![false; n];
    for (i, part) in tr.parts.iter().enumerate() {
        assert_eq!(part.index, i, "{label}: part order");
        let small = (prev.budget as u128)
            .checked_pow(6 * d as u32)
            .is_some_and(|p| (part.size as u128) * p < n as u128);
        assert_eq!(part.dropped, small, "{label}: part {} fate", part.index);
        assert_eq!(part.size, part.vertices.len(), "{label}: part size field");
        for &v in &part.vertices {
            assert!(prev.active.get(v), "{label}: inactive vertex {v} in part");
            assert_eq!(part_of[v], usize::MAX, "{label}: vertex {v} in two parts");
            part_of[v] = part.index;
            dropped[v] = small;
        }
    }
    for (v, &part) in part_of.iter().enumerate() {
        assert_eq!(
            prev.active.get(v),
            part != usize::MAX,
            "{label}: vertex {v} not tiled"
        );
    }

    // covered at the previous level, from the definition
    let prev_covered = |u: usize, v: usize| {
        let q = coloring.color(u, v);
        prev.active.get(u) && prev.active.get(v) && prev.menus[u].get(q) && prev.menus[v].get(q)
    };

    // Q_t per part from the covered-degree threshold
    for part in &tr.parts {
        for q in 0..m {
            let expected = part.vertices.iter().any(|&v| {
                let degree = (0..n)
                    .filter(|&u| {
                        u != v
                            && prev.active.get(u)
                            && coloring.color(u, v) == q
                            && prev_covered(u, v)
                    })
                    .count();
                degree as u64 * (prev.budget as u64).pow(2) >= n as u64
            });
            assert_eq!(
                part.q_t.contains(&q),
                expected,
                "{label}: part {} color {q} menu",
                part.index
            );
        }
    }

    // next level's active set and menus
    for v in 0..n {
        let expect_active = prev.active.get(v) && !dropped[v];
        assert_eq!(next.active.get(v), expect_active, "{label}: active {v}");
        for q in 0..m {
            let expect = expect_active
                && prev.menus[v].get(q)
                && tr.parts[part_of[v]].q_t.contains(&q);
            assert_eq!(
                next.menus[v].get(q),
                expect,
                "{label}: menu bit ({v}, {q})"
            );
        }
    }

    // the new uncovered set and its classification, first matching type wins
    let mut expected = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let q = coloring.color(u, v);
            let covered = next.active.get(u)
                && next.active.get(v)
                && next.menus[u].get(q)
                && next.menus[v].get(q);
            assert_eq!(
                next.uncovered.contains(u, v),
                !covered,
                "{label}: coverage of ({u}, {v})"
            );
            if covered {
                continue;
            }
            let kind = if prev.uncovered.contains(u, v) {
                EdgeType::Carryover
            } else if dropped[u] || dropped[v] {
                EdgeType::SmallPart
            } else if part_of[u] == part_of[v] {
                EdgeType::SamePart
            } else {
                // the only remaining way to lose coverage
                assert!(
                    !next.menus[u].get(q) || !next.menus[v].get(q),
                    "{label}: edge ({u}, {v}) fits no uncovered type"
                );
                EdgeType::PrunedColor
            };
            expected.push(ClassifiedEdge { u, v, kind });
        }
    }
    assert_eq!(tr.classified, expected, "{label}: classification differs");

    let count = |k: EdgeType| expected.iter().filter(|e| e.kind == k).count();
    assert_eq!(tr.edge_types.carryover, count(EdgeType::Carryover), "{label}");
    assert_eq!(tr.edge_types.small_part, count(EdgeType::SmallPart), "{label}");
    assert_eq!(tr.edge_types.same_part, count(EdgeType::SamePart), "{label}");
    assert_eq!(
        tr.edge_types.pruned_color,
        count(EdgeType::PrunedColor),
        "{label}"
    );
    assert_eq!(
        tr.new_uncovered_count,
        next.uncovered.len() - prev.uncovered.len(),
        "{label}: new uncovered count"
    );
    expected.len()
}

#[test]
fn acceptance_8_uncovered_edges_classify_into_exactly_one_type() {
    let start = Instant::now();
    let budgets = [8usize, 3];
    let targets = [3usize; 8];
    // Classification does not depend on the dimension parameter; 2 is the
    // guarantee the structured construction carries.
    let d = 2;

    let mut instances: Vec<(String, EdgeColoring)> = (0..20u64)
        .map(|seed| {
            (
                format!("random seed {seed}"),
                random_coloring(256, 8, seed).unwrap(),
            )
        })
        .collect();
    // One structured instance whose thin colors are provably pruned, so the
    // classification is exercised on a nonempty uncovered set as well.
    instances.push((
        "lower-bound m=8".to_string(),
        lower_bound_coloring(8).unwrap(),
    ));

    let mut edges = 0;
    for (label, coloring) in &instances {
        let state0 = PipelineState::initial(coloring, &targets, budgets[0]).unwrap();
        let (state1, report) = advance(&state0, d, budgets[1]).unwrap();
        edges += verify_transition_independently(coloring, &state0, &state1, &report, d, label);
    }

    // In the structured instance colors 0 and 1 sit below the degree
    // threshold everywhere, so its uncovered set is exactly the edges of
    // those colors: 256·3/2.
    let (_, structured) = instances.last().unwrap();
    let state0 = PipelineState::initial(structured, &targets, budgets[0]).unwrap();
    let (_, report) = advance(&state0, d, budgets[1]).unwrap();
    assert_eq!(report.edge_types.pruned_color, 384);
    assert_eq!(report.edge_types.total(), 384);

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 8 PASS: {edges} uncovered edges re-classified independently into exactly one of four types across {} instances (n=256, m=8, budgets [8, 3]), 0 misclassifications in {elapsed:.2?}",
        instances.len()
    );
}

// ==================== 9: determinism ====================

fn bin_path() -> &'static str {
    env!("CARGO_BIN_EXE_shatter")
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run_bytes(args: &[String]) -> (i32, Vec<u8>) {
    let out = std::process::Command::new(bin_path())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        out.stdout,
    )
}

#[test]
fn acceptance_9_reports_are_byte_identical_across_reruns() {
    let sys_path = tmp("acc9_sys.txt");
    let col_path = tmp("acc9_col.txt");
    let k16_path = tmp("acc9_k16.txt");
    let s = |v: &[&str]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
    let commands: Vec<Vec<String>> = vec![
        s(&[
            "random", "--kind", "system", "-n", "48", "--count", "64", "--density", "0.4",
            "--seed", "13", "-o", sys_path.to_str().unwrap(),
        ]),
        s(&[
            "random", "--kind", "coloring", "-n", "40", "-m", "4", "--seed", "99", "-o",
            col_path.to_str().unwrap(),
        ]),
        s(&["construct", "--lower-bound", "-m", "4", "-o", k16_path.to_str().unwrap()]),
        s(&["analyze", sys_path.to_str().unwrap(), "--vc", "--dual-vc"]),
        s(&["pack", sys_path.to_str().unwrap(), "--delta", "6"]),
        s(&["partition", sys_path.to_str().unwrap(), "--delta", "4", "-d", "2"]),
        s(&["search", col_path.to_str().unwrap(), "--targets", "3,3,3,3"]),
        s(&["search", col_path.to_str().unwrap(), "--exact", "4", "--color", "1"]),
        s(&[
            "trace", col_path.to_str().unwrap(), "-d", "2", "--targets", "3,3,3,3",
            "--budgets", "4,2",
        ]),
        s(&["ramsey-small", "-k", "3", "-m", "2", "--n-max", "8", "--seed", "5"]),
        s(&["verify", k16_path.to_str().unwrap(), "--triangle-free"]),
    ];

    let mut reran = 0;
    for args in &commands {
        let (code_a, bytes_a) = run_bytes(args);
        let (code_b, bytes_b) = run_bytes(args);
        assert_eq!(code_a, 0, "command failed: {args:?}");
        assert_eq!(code_b, 0, "rerun failed: {args:?}");
        assert_eq!(bytes_a, bytes_b, "rerun differed for {args:?}");
        let report: Value = serde_json::from_slice(&bytes_a).expect("valid JSON report");
        assert_eq!(report["schema_version"], 1, "schema version for {args:?}");
        reran += 1;
    }
    println!(
        "ACCEPTANCE 9 PASS: {reran} commands reran with byte-identical JSON reports (seeds fixed, no timestamps)"
    );
}
