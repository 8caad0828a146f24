//! Acceptance suite. Prints one line per criterion and exits non-zero when a
//! criterion fails unexpectedly. Criteria listed in `KNOWN_SHORTFALLS` are
//! still run and reported as FAIL, but do not fail the target.

use std::collections::HashSet;
use std::time::Instant;

use bip_ramsey_core::construction::{l_range, run_pipeline, theorem_harness, ConstructionParams};
use bip_ramsey_core::experiments;
use bip_ramsey_core::graph::{Selection, Side, VertexId};
use bip_ramsey_core::numtheory;
use bip_ramsey_core::ramsey::{self, BicliqueKind, BicliqueSearch};
use bip_ramsey_core::seed;
use bip_ramsey_core::spectrum::{phi_exact, phi_exact_oracle, DEFAULT_SPECTRUM_BUDGET};
use bip_ramsey_core::BipartiteGraph;
use rand::Rng;

/// (criterion, reason). Kept in sync with the decisions ledger.
const KNOWN_SHORTFALLS: &[(u32, &str)] = &[(
    9,
    "claim 4 needs min |N_U(x) △ N_U(y)| >= 1 over all pairs of A; with p < 0.1 U meets X in about six vertices at n = 64",
)];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Criterion 1 ---------------------------------------------------------------

fn mtable_oracle() -> Outcome {
    // Grows the product set one row at a time: M(n) = M(n−1) ∪ {n·j : j <= n}.
    let max = 2000u64;
    let mut seen = vec![false; (max * max + 1) as usize];
    seen[0] = true;
    let mut count = 1u64;
    for n in 1..=max {
        for j in 1..=n {
            let p = (n * j) as usize;
            if !seen[p] {
                seen[p] = true;
                count += 1;
            }
        }
        let table = numtheory::multiplication_table(n).map_err(|e| e.to_string())?;
        if table.cardinality() != count || table.iter().any(|v| !seen[v as usize]) {
            return Err(format!("mismatch at n = {n}"));
        }
        if n == 2 && count != 4 || n == 3 && count != 7 {
            return Err(format!("|M({n})| = {count}"));
        }
    }
    Ok(format!("n <= {max} equal; |M(2)| = 4, |M(3)| = 7"))
}

// Criterion 2 ---------------------------------------------------------------

fn spectrum_oracles() -> Outcome {
    let mut rng = seed::rng(2);
    for t in 0..500u64 {
        let total = rng.random_range(2..=16usize);
        let x = rng.random_range(1..total);
        let p = rng.random_range(0.05..0.95);
        let g = BipartiteGraph::random(x, total - x, p, seed::sub_seed(2, seed::stream::GRAPH, t)).unwrap();
        let fast = phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).map_err(|e| e.to_string())?;
        let slow = phi_exact_oracle(&g).map_err(|e| e.to_string())?;
        if fast.sizes != slow.sizes {
            return Err(format!("graph {t} ({x}x{}): {} vs {}", total - x, fast.phi, slow.phi));
        }
    }
    for a in 1..=8u64 {
        for b in 1..=8u64 {
            let g = BipartiteGraph::complete(a as usize, b as usize);
            let phi = phi_exact(&g, DEFAULT_SPECTRUM_BUDGET).unwrap().phi;
            let table = numtheory::phi_complete_bipartite(a, b).unwrap();
            if phi != table {
                return Err(format!("K_{{{a},{b}}}: {phi} vs {table}"));
            }
        }
    }
    Ok("500 random graphs and K_{a,b}, a, b <= 8".into())
}

// Criterion 3 ---------------------------------------------------------------

fn hxyz_exact() -> Outcome {
    let max = 10_000u64;
    let grid = [(0.0, 2.0), (1.0, 3.0), (2.5, 7.5), (3.0, 100.0), (9.2, 96.0), (10.0, 10.0), (50.0, 5000.0), (99.0, 100.0)];
    for &(y, z) in &grid {
        // Prefix counts of integers with a divisor in (y, z], by enumeration.
        let mut prefix = vec![0u64; max as usize + 1];
        for n in 1..=max {
            let hit = (1..=n).filter(|d| n % d == 0).any(|d| (d as f64) > y && (d as f64) <= z);
            prefix[n as usize] = prefix[n as usize - 1] + hit as u64;
        }
        for x in 0..=max {
            let h = numtheory::hxyz(x, y, z);
            if h != prefix[x as usize] {
                return Err(format!("H({x}, {y}, {z}) = {h}, enumeration gives {}", prefix[x as usize]));
            }
        }
    }
    let ratio = |x: u64| numtheory::hxyz(x, (x as f64).ln(), (x as f64).sqrt()) as f64 / x as f64;
    let (small, big) = (ratio(1000), ratio(1_000_000));
    check(big > small, format!("{} (y, z) pairs exact; H ratio {small:.4} at 1e3 -> {big:.4} at 1e6", grid.len()))
}

// Criterion 4 ---------------------------------------------------------------

fn sandwich() -> Outcome {
    let mut cases = 0;
    for d in 1..=32u64 {
        // The bounds are stated for the K_{d, m/d} orientation with d <= √m.
        for m in (d * d..=4096).step_by(d as usize) {
            let s = numtheory::phi_sandwich(d, m).map_err(|e| e.to_string())?;
            let phi = numtheory::phi_complete_bipartite(d, m / d).unwrap();
            if !s.brackets(phi) {
                return Err(format!("d = {d}, m = {m}: {} <= {} <= {} fails", s.lower, phi - 1, s.upper));
            }
            cases += 1;
        }
    }
    check(
        numtheory::phi_sandwich(8, 16).is_err(),
        format!("{cases} (d, m) pairs with d <= sqrt(m) bracketed"),
    )
}

// Criterion 5 ---------------------------------------------------------------

fn richness_implications() -> Outcome {
    let mut graphs = 0;
    let mut met = 0;
    let mut failures = Vec::new();
    for t in 0..240u64 {
        let s = seed::sub_seed(5, seed::stream::GRAPH, t);
        let mut rng = seed::rng(s);
        let (x, y) = (rng.random_range(4..=12usize), rng.random_range(4..=12usize));
        let p = [0.3, 0.5, 0.7][(t % 3) as usize];
        let g = BipartiteGraph::random(x, y, p, s).unwrap();
        graphs += 1;
        for gamma in [0.1, 0.2, 0.3, 0.4] {
            for delta in [0.5, 0.8] {
                for eps in [0.1, 0.2, 0.3] {
                    let r = ramsey::richness_implications(&g, gamma, delta, eps).map_err(|e| e.to_string())?;
                    if r.hypothesis_met {
                        met += 1;
                        if r.all_hold() != Some(true) {
                            failures.push((t, gamma, delta, eps));
                        }
                    }
                }
            }
        }
    }
    check(
        failures.is_empty() && met > 0,
        format!("{graphs} graphs, {met} rich instances, {} counterexamples {:?}", failures.len(), failures.first()),
    )
}

// Criterion 6 ---------------------------------------------------------------

fn biclique_by_enumeration(g: &BipartiteGraph, a: usize, b: usize, kind: BicliqueKind) -> bool {
    let n = g.x_size();
    (0u32..1 << n).filter(|m| m.count_ones() as usize == a).any(|m| {
        let hits = (0..g.y_size())
            .filter(|&y| {
                (0..n)
                    .filter(|&x| m >> x & 1 == 1)
                    .all(|x| g.has_edge(x, y) == (kind == BicliqueKind::Complete))
            })
            .count();
        hits >= b
    })
}

fn biclique_search() -> Outcome {
    let mut checked = 0;
    for t in 0..50u64 {
        let g = BipartiteGraph::random(12, 12, 0.5, seed::sub_seed(6, seed::stream::GRAPH, t)).unwrap();
        for a in 1..=4 {
            for b in 1..=4 {
                for kind in [BicliqueKind::Complete, BicliqueKind::Empty] {
                    let want = biclique_by_enumeration(&g, a, b, kind);
                    let got = match ramsey::find_induced_biclique(&g, a, b, kind, u64::MAX).map_err(|e| e.to_string())? {
                        BicliqueSearch::Found { witness } => {
                            if !witness.verify(&g) {
                                return Err(format!("graph {t}: invalid witness for ({a}, {b}, {kind:?})"));
                            }
                            true
                        }
                        BicliqueSearch::NotFound => false,
                        BicliqueSearch::Unknown { .. } => return Err("unbounded search gave up".into()),
                    };
                    if got != want {
                        return Err(format!("graph {t}, ({a}, {b}, {kind:?}): search {got}, enumeration {want}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} queries agree"))
}

// Criterion 7 ---------------------------------------------------------------

fn diversity() -> Outcome {
    let mut passing = 0;
    for s in 0..100u64 {
        let g = BipartiteGraph::random(64, 64, 0.5, seed::sub_seed(7, seed::stream::GRAPH, s)).unwrap();
        passing += ramsey::diversity_check(&g, 0.2, 0.5).unwrap().passes as u32;
    }
    let complete_fails = (4..=40).all(|n| !ramsey::diversity_check(&BipartiteGraph::complete(n, n), 0.2, 0.5).unwrap().passes);
    check(passing >= 90 && complete_fails, format!("{passing}/100 random pass; K_{{n,n}} fails for 4 <= n <= 40: {complete_fails}"))
}

// Criterion 8 ---------------------------------------------------------------

/// Edge count of `sel` by scanning every cell.
fn recount(g: &BipartiteGraph, sel: &Selection) -> u64 {
    let mut e = 0;
    for x in 0..g.x_size() {
        for y in 0..g.y_size() {
            e += (sel.contains(VertexId::x(x)) && sel.contains(VertexId::y(y)) && g.has_edge(x, y)) as u64;
        }
    }
    e
}

fn pipeline() -> Outcome {
    let params = ConstructionParams::default();
    let mut ok = 0;
    let mut checked = 0u64;
    let mut mismatches = 0u64;
    for s in 0..100u64 {
        let g = BipartiteGraph::random(64, 64, 0.5, seed::sub_seed(8, seed::stream::GRAPH, s)).unwrap();
        let g = g.oriented().into_owned();
        let (lo, hi) = l_range(&g, params.c);
        let Ok(out) = run_pipeline(&g, (lo + hi) / 2, &params.clone().with_seed(s)) else {
            continue;
        };
        ok += 1;
        let w = &out.witness;
        let q = &w.q_family;
        let mut sizes = HashSet::new();
        for &(k, i, _) in &out.family.thinned {
            let mut sel = w.u.clone();
            for pk in q.s.iter().take((k - i) as usize).chain(q.t.iter().take(i as usize)) {
                sel.insert_pack(pk);
            }
            let zs: Vec<Option<&_>> = if w.z.is_empty() { vec![None] } else { w.z.iter().map(Some).collect() };
            for z in zs {
                let mut with_z = sel.clone();
                if let Some(pk) = z {
                    assert_eq!(pk.side(), Side::Y);
                    with_z.insert_pack(pk);
                }
                sizes.insert(recount(&g, &with_z));
                checked += 1;
            }
        }
        let reported: HashSet<u64> = out.family.final_sizes.iter().collect();
        mismatches += (sizes != reported) as u64 + out.family.mismatches;
    }
    check(ok >= 80 && mismatches == 0, format!("{ok}/100 succeed; {checked} sizes recounted, {mismatches} mismatched runs"))
}

// Criterion 9 ---------------------------------------------------------------

fn claims() -> Outcome {
    let params = ConstructionParams::default();
    let r = experiments::claim_frequencies(64, 200, &params, 9).map_err(|e| e.to_string())?;
    let freqs: Vec<String> = r.frequencies.iter().map(|f| format!("{f:.3}")).collect();
    check(r.passes(), format!("frequencies [{}] against floor {}", freqs.join(", "), r.floor))
}

// Criterion 10 --------------------------------------------------------------

fn median_harness(n: usize) -> Result<u64, String> {
    let params = ConstructionParams::default();
    let mut counts: Vec<u64> = (0..20u64)
        .map(|s| {
            let g = BipartiteGraph::random(n, n, 0.5, seed::sub_seed(10, seed::stream::GRAPH, s)).unwrap();
            theorem_harness(&g, &params.clone().with_seed(s)).map_or(0, |r| r.distinct_count)
        })
        .collect();
    counts.sort_unstable();
    Ok((counts[9] + counts[10]) / 2)
}

fn scaling() -> Outcome {
    let (small, large) = (median_harness(64)?, median_harness(128)?);
    let ratio = large as f64 / small.max(1) as f64;
    check(ratio >= 2.2, format!("median {small} at n = 64, {large} at n = 128, ratio {ratio:.2}"))
}

// Criterion 11 --------------------------------------------------------------

fn conjecture() -> Outcome {
    let two = experiments::conjecture_exhaustive(2, 4, DEFAULT_SPECTRUM_BUDGET).map_err(|e| e.to_string())?;
    let three = experiments::conjecture_sampled(3, 1000, 11, 9, DEFAULT_SPECTRUM_BUDGET).map_err(|e| e.to_string())?;
    let all_exact = three.rows.iter().all(|r| r.note == "exact");
    check(
        two.passes() && three.passes() && all_exact && two.target == 4 && three.target == 7,
        format!(
            "n = 2: {} graphs, min phi {:?}; n = 3: 1000 exact samples, min phi {:?}",
            two.graphs_checked, two.min_phi, three.min_phi
        ),
    )
}

// Criterion 12 --------------------------------------------------------------

fn density() -> Outcome {
    let r = experiments::density_study(64, 100, 5.0, 12).map_err(|e| e.to_string())?;
    check(
        r.passing > 0 && r.within(0.4, 0.6),
        format!("{} of 100 Ramsey; densities in [{:?}, {:?}]", r.passing, r.min_density, r.max_density),
    )
}

// Criterion 13 --------------------------------------------------------------

fn probability_bound() -> Outcome {
    let at_100 = numtheory::ramsey_probability_bound_ln(100, 5.0).unwrap().unwrap();
    let limit = -100.0 * std::f64::consts::LN_10;
    let values: Vec<f64> = (50..=10_000).map(|n| numtheory::ramsey_probability_bound_ln(n, 5.0).unwrap().unwrap()).collect();
    let monotone = values.windows(2).all(|w| w[1] < w[0]);
    check(
        at_100 < limit && monotone,
        format!("ln bound(100) = {at_100:.1} < {limit:.1}; strictly decreasing on [50, 10^4]: {monotone}"),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "multiplication table oracle", mtable_oracle),
        (2, "spectrum cross-oracles", spectrum_oracles),
        (3, "H(x, y, z) exactness", hxyz_exact),
        (4, "sandwich inequality", sandwich),
        (5, "richness implications", richness_implications),
        (6, "biclique search", biclique_search),
        (7, "diversity on random graphs", diversity),
        (8, "construction pipeline", pipeline),
        (9, "claim frequencies", claims),
        (10, "harness scaling", scaling),
        (11, "conjecture desk check", conjecture),
        (12, "density of Ramsey graphs", density),
        (13, "probability bound", probability_bound),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_SHORTFALLS.iter().find(|k| k.0 == id);
        match (&outcome, known) {
            (Ok(d), _) => println!("criterion {id:>2} PASS [{secs:.1}s] {name}: {d}"),
            (Err(d), Some((_, why))) => println!("criterion {id:>2} FAIL [{secs:.1}s] {name}: {d} (known shortfall: {why})"),
            (Err(d), None) => {
                unexpected += 1;
                println!("criterion {id:>2} FAIL [{secs:.1}s] {name}: {d}");
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
