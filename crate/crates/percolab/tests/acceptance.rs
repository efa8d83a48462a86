//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Desk scale throughout: 2000 m × 2000 m window unless a criterion needs a
//! larger one for interior statistics, 100–500 realizations, fixed seeds.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use percolab::bounds::{
    self, cond_avg_degree_simplified, DegreeKernel, DegreeModelInputs, KernelOptions,
    PercolationConstants,
};
use percolab::config::DegreeConfig;
use percolab::geometry::Point;
use percolab::oppgraph::{build_graph, evaluate_opportunities, label_components};
use percolab::percolation::{boundary_at, crossing_probability, ExperimentConfig};
use percolab::pointprocess::{
    DensityPair, PrimaryPair, RadioParams, Realization, SeedRecord, Window,
};
use percolab::runner::{degree_table, sweep_curves, validate_geometry_checks};

const KM2: f64 = 1e-6; // km⁻² → m⁻²

fn verdict(criterion: u32, ok: bool, detail: &str) -> bool {
    println!(
        "ACCEPTANCE {:02} {}: {}",
        criterion,
        if ok { "PASS" } else { "FAIL" },
        detail
    );
    ok
}

/// R_p = 50 m, R_I = 80 m, r_p = 50 m, r_I = 80 m.
fn contrast_params() -> RadioParams {
    RadioParams::new(50.0, 80.0, 50.0, 80.0).unwrap()
}

/// R_p = 100 m, R_I = 120 m, r_p = 150 m, r_I = 240 m.
fn region_params() -> RadioParams {
    RadioParams::new(100.0, 120.0, 150.0, 240.0).unwrap()
}

fn desk_experiment(params: RadioParams, realizations: u64, seed: u64) -> ExperimentConfig {
    let window = Window::padded_for(2000.0, 2000.0, &params).unwrap();
    ExperimentConfig::new(params, window, realizations, seed).unwrap()
}

#[test]
fn acceptance_01_critical_density_takeoff() {
    let cfg = desk_experiment(contrast_params(), 200, 1);
    let above = crossing_probability(&cfg, &DensityPair::new(650.0 * KM2, 0.0).unwrap()).unwrap();
    let below = crossing_probability(&cfg, &DensityPair::new(450.0 * KM2, 0.0).unwrap()).unwrap();
    let ok = above.estimate > 0.5 && below.estimate < 0.5;
    let detail = format!(
        "zero primary density, 50 m link range: crossing {:.3} at 650 km^-2 (want > 0.5), \
         {:.3} at 450 km^-2 (want < 0.5); critical density is near 576 km^-2",
        above.estimate, below.estimate
    );
    assert!(verdict(1, ok, &detail), "{detail}");
}

#[test]
fn acceptance_02_primary_density_contrast() {
    let cfg = desk_experiment(contrast_params(), 200, 1);
    let lambda_s = 650.0 * KM2;
    let at_10 =
        crossing_probability(&cfg, &DensityPair::new(lambda_s, 10.0 * KM2).unwrap()).unwrap();
    let at_20 =
        crossing_probability(&cfg, &DensityPair::new(lambda_s, 20.0 * KM2).unwrap()).unwrap();
    let gap = at_10.estimate - at_20.estimate;
    let ok = gap >= 0.3;
    let detail = format!(
        "crossing fraction {:.3} at 10 km^-2 primaries vs {:.3} at 20 km^-2; gap {:.3} \
         (criterion wants >= 0.3). The single-user opportunity probability at 10 km^-2 \
         is 0.776, so the thinned user density 650*0.776 = 504 km^-2 sits below the \
         576 km^-2 critical density: the measured gap ~0.21 is the honest value at \
         this window, and the 0.3 threshold is not attainable at desk scale.",
        at_10.estimate, at_20.estimate, gap
    );
    assert!(verdict(2, ok, &detail), "{detail}");
}

#[test]
fn acceptance_03_primary_density_cap_plateau() {
    let cfg = desk_experiment(region_params(), 200, 1);
    let cap = bounds::primary_density_cap(&cfg.params, &PercolationConstants::default()).unwrap();
    assert!((cap - 1.44 / 207_900.0).abs() < 1e-18);

    let grid_km2 = [200.0, 400.0, 800.0, 1600.0, 3000.0];
    let mut samples = Vec::new();
    for ls in grid_km2 {
        samples.push(boundary_at(&cfg, ls * KM2).unwrap());
    }
    let max_boundary = samples
        .iter()
        .map(|s| s.lambda_pt_star)
        .fold(f64::NEG_INFINITY, f64::max);
    let last = samples.last().unwrap();
    let never_exceeds = max_boundary <= cap;
    let reaches = last.lambda_pt_star >= 0.7 * cap;
    let ok = never_exceeds && reaches;
    let detail = format!(
        "empirical boundary on 200..3000 km^-2 grid peaks at {:.3} km^-2 vs cap {:.3} km^-2 \
         (never exceeds: {}); at 3000 km^-2 it reaches {:.0}% of the cap (want >= 70%)",
        max_boundary / KM2,
        cap / KM2,
        never_exceeds,
        100.0 * last.lambda_pt_star / cap
    );
    assert!(verdict(3, ok, &detail), "{detail}");
}

#[test]
fn acceptance_04_degree_quadrature_vs_simulation() {
    // Degree-sweep parameters: primary range 200 m, primary interference
    // 250 m, 25 km^-2 secondary users, 2.5 km^-2 primaries, r_I = r_p/0.8.
    let check_points = [200.0, 300.0, 400.0, 500.0, 700.0];
    let mut grid: Vec<f64> = vec![
        80.0, 160.0, 240.0, 320.0, 400.0, 480.0, 560.0, 640.0, 720.0, 800.0, 880.0, 960.0,
    ];
    grid.extend_from_slice(&check_points);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let cfg = DegreeConfig {
        primary_tx_range: 200.0,
        primary_interference_range: 250.0,
        density: DensityPair::new(25.0 * KM2, 2.5 * KM2).unwrap(),
        r_p_grid: grid,
        interference_ratio: 1.25,
        window_width: 3000.0,
        window_height: 3000.0,
        realizations: 500,
        master_seed: 1,
        raw: BTreeMap::new(),
    };
    let table = degree_table(&cfg).unwrap();

    // Unimodality of the quadrature column: strictly rising, then falling.
    let mu: Vec<f64> = table.points.iter().map(|p| p.mu_quadrature).collect();
    let peak = mu
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let unimodal = peak > 0
        && peak < mu.len() - 1
        && mu
            .windows(2)
            .enumerate()
            .all(|(i, w)| if i < peak { w[1] > w[0] } else { w[1] < w[0] });

    // Agreement at the designated points: |quad - emp| within 5% of quad
    // plus the 95% sampling interval.
    let mut agree = true;
    let mut details = String::new();
    for p in &table.points {
        if !check_points.contains(&p.r_p) {
            continue;
        }
        let emp = p.mu_empirical.unwrap();
        let se = p.stderr.unwrap();
        let ok = (p.mu_quadrature - emp).abs() <= 0.05 * p.mu_quadrature + 1.96 * se;
        agree &= ok;
        details.push_str(&format!(
            "r_p={}: quad {:.3} vs sim {:.3}±{:.3}; ",
            p.r_p, p.mu_quadrature, emp, se
        ));
    }
    let ok = unimodal && agree;
    let detail = format!(
        "{}unimodal quadrature curve: {} (peak at r_p = {} m)",
        details, unimodal, table.points[peak].r_p
    );
    assert!(verdict(4, ok, &detail), "{detail}");
}

#[test]
fn acceptance_05_matched_regime_equivalence() {
    // (a) General nested quadrature vs the simplified integrand, 1e-6
    // relative, where the secondary interference range covers the whole
    // primary pair zone.
    let tight = KernelOptions {
        rel_tol: 1e-10,
        nodes_per_panel: 13,
        max_depth: 12,
    };
    let mut worst_rel: f64 = 0.0;
    for (params, lambda_s_km2, lambda_pt_km2) in [
        (region_params(), 1000.0, 10.0),
        (region_params(), 500.0, 5.0),
        (
            RadioParams::new(50.0, 80.0, 80.0, 240.0).unwrap(),
            650.0,
            10.0,
        ),
    ] {
        let density = DensityPair::new(lambda_s_km2 * KM2, lambda_pt_km2 * KM2).unwrap();
        let kernel = DegreeKernel::with_options(&params, tight).unwrap();
        let general = kernel.cond_avg_degree(&density).unwrap();
        let simplified =
            cond_avg_degree_simplified(&DegreeModelInputs { params, density }).unwrap();
        worst_rel = worst_rel.max((general - simplified).abs() / simplified.abs());
    }
    let equivalence = worst_rel <= 1e-6;

    // (b) The large-power bound dominates the degree across 20 large
    // interference ranges.
    let density = DensityPair::new(1000.0 * KM2, 10.0 * KM2).unwrap();
    let mut dominated = true;
    let mut checked = 0;
    for i in 0..20 {
        let r_i = 260.0 + (1500.0 - 260.0) * i as f64 / 19.0;
        let params = RadioParams::new(100.0, 120.0, 0.8 * r_i, r_i).unwrap();
        let inputs = DegreeModelInputs { params, density };
        let mu = bounds::cond_avg_degree(&inputs).unwrap();
        let bound = bounds::mu_asymptotic_bound(&inputs).unwrap();
        dominated &= mu <= bound;
        checked += 1;
    }
    let ok = equivalence && dominated;
    let detail = format!(
        "general vs simplified degree: worst relative difference {:.2e} (want <= 1e-6); \
         asymptotic bound dominates at {checked}/20 large-range points: {dominated}",
        worst_rel
    );
    assert!(verdict(5, ok, &detail), "{detail}");
}

#[test]
fn acceptance_06_sandwich_ordering() {
    let mut cfg = desk_experiment(region_params(), 100, 1);
    cfg.bisection_steps = 10;
    let grid: Vec<f64> = [200.0, 600.0, 1800.0].iter().map(|v| v * KM2).collect();
    let curves = sweep_curves(&cfg, &grid, &PercolationConstants::default()).unwrap();
    let empirical = &curves[0];
    let outer = &curves[1];
    let inner = &curves[2];
    assert_eq!(
        empirical.samples.len(),
        grid.len(),
        "all grid points above takeoff"
    );

    let mut ok = true;
    let mut details = String::new();
    for ((e, o), i) in empirical
        .samples
        .iter()
        .zip(&outer.samples)
        .zip(&inner.samples)
    {
        // Inner bound below the empirical boundary where positive (with CI
        // slack); empirical below the outer bound (CI slack on the low end).
        let inner_ok = i.lambda_pt_star <= 0.0 || i.lambda_pt_star <= e.ci_high;
        let outer_ok = e.ci_low <= o.lambda_pt_star && e.lambda_pt_star <= o.lambda_pt_star;
        ok &= inner_ok && outer_ok;
        details.push_str(&format!(
            "ls={:.0}: inner {:.3} <= emp {:.3} <= outer {:.3}; ",
            e.lambda_s / KM2,
            i.lambda_pt_star / KM2,
            e.lambda_pt_star / KM2,
            o.lambda_pt_star / KM2
        ));
    }
    let detail = format!("row-wise ordering with CI slack: {details}");
    assert!(verdict(6, ok, &detail), "{detail}");
}

#[test]
fn acceptance_07_power_design_argmax() {
    let constants = PercolationConstants::default();
    let big_ri = 120.0;
    let beta = 0.625;
    // 200-point grid, 30..428 m step 2, containing the matching range.
    let grid: Vec<f64> = (0..200).map(|i| 30.0 + 2.0 * i as f64).collect();
    assert!(grid.contains(&big_ri));
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &r_i in &grid {
        let v = bounds::power_design_bound(r_i, big_ri, beta, &constants).unwrap();
        if v > best.1 {
            best = (r_i, v);
        }
    }
    let left =
        bounds::power_design_bound(big_ri * (1.0 - 1e-13), big_ri, beta, &constants).unwrap();
    let right =
        bounds::power_design_bound(big_ri * (1.0 + 1e-13), big_ri, beta, &constants).unwrap();
    let junction_rel = (left - right).abs() / left;
    let ok = best.0 == big_ri && junction_rel <= 1e-12;
    let detail = format!(
        "argmax over 200-point grid = {} m (want exactly {} m), peak {:.3} km^-2; \
         branch mismatch at the junction {:.2e} relative (want <= 1e-12)",
        best.0,
        big_ri,
        best.1 / KM2,
        junction_rel
    );
    assert!(verdict(7, ok, &detail), "{detail}");
}

#[test]
fn acceptance_08_geometry_oracle_suite() {
    let cfg = percolab::config::validate_geometry_config(
        "cases = 50\nmc_samples = 10000000\nmaster_seed = 2\n",
        None,
    )
    .unwrap();
    let checks = validate_geometry_checks(&cfg).unwrap();
    let max_abs_z = checks.iter().map(|c| c.z_score.abs()).fold(0.0, f64::max);
    let near_tangent = checks
        .iter()
        .filter(|c| {
            (c.separation - (c.radius_a + c.radius_b)).abs() < 1e-6
                || (c.separation - (c.radius_a - c.radius_b).abs()).abs() < 1e-6
        })
        .count();
    let ok = max_abs_z <= 3.0 && near_tangent > 0 && checks.len() == 200;
    let detail = format!(
        "{} analytic-vs-Monte-Carlo comparisons over 50 randomized configurations \
         ({} near-tangent rows) at 1e7 samples: max |z| = {:.3} (want <= 3)",
        checks.len(),
        near_tangent,
        max_abs_z
    );
    assert!(verdict(8, ok, &detail), "{detail}");
}

// Independent oracles for criterion 9.
mod oracle {
    use super::*;

    pub fn brute_force(
        realization: &Realization,
        params: &RadioParams,
    ) -> (Vec<bool>, Vec<(u32, u32)>) {
        let n = realization.secondary.len();
        let sees: Vec<bool> = realization
            .secondary
            .iter()
            .map(|u| {
                !realization.primary_pairs.iter().any(|pair| {
                    pair.tx.dist(*u) <= params.primary_interference_range
                        || pair.rx.dist(*u) <= params.secondary_interference_range
                })
            })
            .collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if sees[u]
                    && sees[v]
                    && realization.secondary[u].dist(realization.secondary[v])
                        <= params.secondary_tx_range
                {
                    edges.push((u as u32, v as u32));
                }
            }
        }
        (sees, edges)
    }

    pub fn bfs_partition(n: usize, edges: &[(u32, u32)]) -> Vec<u32> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut comp = vec![u32::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != u32::MAX {
                continue;
            }
            comp[s] = next;
            let mut queue = std::collections::VecDeque::from([s as u32]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u as usize] {
                    if comp[v as usize] == u32::MAX {
                        comp[v as usize] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

#[test]
fn acceptance_09_graph_oracle_suite() {
    use rand::{Rng, SeedableRng};
    let params = RadioParams::new(5.0, 8.0, 5.0, 8.0).unwrap();
    let side = 60.0;
    let window = Window::padded_for(side, side, &params).unwrap();
    let mut all_ok = true;
    for seed in 0..100u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n_users = 50 + (rng.random::<u64>() % 151) as usize; // <= 200
        let n_pairs = (rng.random::<u64>() % 10) as usize;
        let pad = window.padding;
        let secondary: Vec<Point> = (0..n_users)
            .map(|_| Point::new(side * rng.random::<f64>(), side * rng.random::<f64>()))
            .collect();
        let primary_pairs: Vec<PrimaryPair> = (0..n_pairs)
            .map(|_| {
                let tx = Point::new(
                    -pad + (side + 2.0 * pad) * rng.random::<f64>(),
                    -pad + (side + 2.0 * pad) * rng.random::<f64>(),
                );
                let r = params.primary_tx_range * rng.random::<f64>().sqrt();
                let a = 2.0 * PI * rng.random::<f64>();
                PrimaryPair {
                    tx,
                    rx: Point::new(tx.x + r * a.cos(), tx.y + r * a.sin()),
                }
            })
            .collect();
        let realization = Realization {
            primary_pairs,
            secondary,
            window,
            seed: SeedRecord {
                master_seed: seed,
                realization_index: 0,
            },
        };

        let flags = evaluate_opportunities(&realization, &params);
        let graph = build_graph(&realization, &flags, &params);
        let labeling = label_components(&graph);

        let (oracle_flags, oracle_edges) = oracle::brute_force(&realization, &params);
        let oracle_comp = oracle::bfs_partition(n_users, &oracle_edges);

        let flags_ok = flags.sees_opportunity == oracle_flags;
        let edges_ok = graph.edges == oracle_edges;
        // Partitions must agree up to component renaming.
        let mut forward: std::collections::HashMap<u32, u32> = Default::default();
        let mut backward: std::collections::HashMap<u32, u32> = Default::default();
        let partition_ok = labeling.component.iter().zip(&oracle_comp).all(|(&a, &b)| {
            *forward.entry(a).or_insert(b) == b && *backward.entry(b).or_insert(a) == a
        });
        if !(flags_ok && edges_ok && partition_ok) {
            all_ok = false;
            println!(
                "instance {seed}: flags {flags_ok}, edges {edges_ok}, partition {partition_ok}"
            );
        }
    }
    let detail = "spatial-hash graph and union-find labeling match brute-force and BFS \
                  oracles on 100 random instances of <= 200 users"
        .to_string();
    assert!(verdict(9, all_ok, &detail), "{detail}");
}

#[test]
fn acceptance_10_determinism_across_threads() {
    use std::process::Command;

    let sweep_config = "\
primary_tx_range_m = 50
primary_interference_range_m = 80
secondary_tx_range_m = 50
secondary_interference_range_m = 80
window_width_m = 600
window_height_m = 600
realizations = 30
bisection_steps = 6
master_seed = 9
lambda_s_grid_per_km2 = 700, 1000
";
    let simulate_config = "\
primary_tx_range_m = 50
primary_interference_range_m = 80
secondary_tx_range_m = 50
secondary_interference_range_m = 80
window_width_m = 600
window_height_m = 600
realizations = 20
master_seed = 9
lambda_s_per_km2 = 650
lambda_pt_per_km2 = 10
";
    let base = std::env::temp_dir().join(format!("percolab_acceptance10_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let sweep_path = base.join("sweep.conf");
    let sim_path = base.join("simulate.conf");
    std::fs::write(&sweep_path, sweep_config).unwrap();
    std::fs::write(&sim_path, simulate_config).unwrap();

    let threads = ["1", "2", "4", "1"]; // the trailing 1 re-runs the first setup
    let mut sweep_outputs: Vec<Vec<u8>> = Vec::new();
    let mut simulate_outputs: Vec<Vec<u8>> = Vec::new();
    for (i, t) in threads.iter().enumerate() {
        let out = base.join(format!("run{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_percolab"))
            .args(["sweep", "--config"])
            .arg(&sweep_path)
            .arg("--out")
            .arg(out.join("sweep"))
            .env("PERCOLAB_THREADS", t)
            .status()
            .unwrap();
        assert!(status.success(), "sweep run {i} failed");
        sweep_outputs.push(std::fs::read(out.join("sweep/region.csv")).unwrap());

        let status = Command::new(env!("CARGO_BIN_EXE_percolab"))
            .args(["simulate", "--config"])
            .arg(&sim_path)
            .arg("--out")
            .arg(out.join("sim"))
            .env("PERCOLAB_THREADS", t)
            .status()
            .unwrap();
        assert!(status.success(), "simulate run {i} failed");
        let mut blob = Vec::new();
        for f in ["nodes.csv", "edges.csv", "flags.csv", "summary.json"] {
            blob.extend(std::fs::read(out.join("sim").join(f)).unwrap());
        }
        simulate_outputs.push(blob);
    }
    let sweep_ok = sweep_outputs.windows(2).all(|w| w[0] == w[1]);
    let simulate_ok = simulate_outputs.windows(2).all(|w| w[0] == w[1]);

    // Corrupt config exits with code 2.
    let bad_path = base.join("bad.conf");
    std::fs::write(&bad_path, "this is not a config\n").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_percolab"))
        .args(["sweep", "--config"])
        .arg(&bad_path)
        .arg("--out")
        .arg(base.join("bad_out"))
        .status()
        .unwrap();
    let exit_ok = status.code() == Some(2);

    let _ = std::fs::remove_dir_all(&base);
    let ok = sweep_ok && simulate_ok && exit_ok;
    let detail = format!(
        "byte-identical outputs at 1, 2, 4 threads and across re-runs \
         (sweep: {sweep_ok}, simulate: {simulate_ok}); corrupt config exits 2: {exit_ok}"
    );
    assert!(verdict(10, ok, &detail), "{detail}");
}
