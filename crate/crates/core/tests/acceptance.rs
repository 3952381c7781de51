//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and exits
//! non-zero if any check fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use markov_iso::bounds::{
    check_chung, check_main_theorem, check_morris_peres, gadget_c_supremum, gadget_log_chain, BOUND_TOL,
};
use markov_iso::families::{
    arc_min_phi_half, blocks_h, blocks_merge_check, circulant_lambda2_analytic, gen_hypercube,
    gen_ht_counterexample, ht_laplacian_first_row, hypercube_quantities, lower_bound_fab_check,
    random_directed_suite, random_reversible_suite, scaling_scan, PartitionBlocks, ScanRow,
};
use markov_iso::isoperimetry::{phi_p_exact, phi_p_of_set, phi_profile, sweep_cut};
use markov_iso::spectral::{lambda2_directed, lambda2_reversible, symmetric_eigensolve, normalized_laplacian};
use markov_iso::{MarkovChain, HALF_MASS_SLACK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE_SEED: u64 = 0x5eed_0001;
const DIRECTED_SEED: u64 = 0x5eed_0002;
const SUITE_DENSITY: f64 = 0.3;

/// Scaled-column values measured at n = 64 and n = 1024, frozen.
const LAMBDA2_SCALED_AT: [f64; 2] = [14.58364814337761, 15.315209938733421];
const PHI_SCALED_AT: [f64; 2] = [1.8723293449219165, 1.852858505660494];
const BAND_MARGIN: f64 = 0.2;

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reversible_suite() -> Vec<MarkovChain> {
    random_reversible_suite(200, 3..=12, SUITE_DENSITY, SUITE_SEED).unwrap()
}

/// Sets of `π`-mass at most 1/2.
fn admissible_sets(c: &MarkovChain) -> Vec<Vec<usize>> {
    let n = c.n();
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.iter().map(|&v| c.stationary()[v]).sum::<f64>() <= 0.5 + HALF_MASS_SLACK)
        .collect()
}

fn main_theorem_suite(suite: &[MarkovChain], started: Instant) -> Outcome {
    let mut worst = f64::INFINITY;
    for (i, c) in suite.iter().enumerate() {
        for p in [0.6, 0.75, 0.9, 1.0] {
            let r = check_main_theorem(c, p, false).map_err(|e| format!("chain {i}: {e}"))?;
            ensure(r.lhs <= r.rhs + BOUND_TOL, || format!("chain {i}, p = {p}: {} > {}", r.lhs, r.rhs))?;
            worst = worst.min(r.slack);
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} chains x 4 exponents, min slack {worst:.3e}, {elapsed:.2?}", suite.len()))
}

fn morris_peres_suite(suite: &[MarkovChain]) -> Outcome {
    let mut worst = f64::INFINITY;
    for (i, c) in suite.iter().enumerate() {
        let r = check_morris_peres(c, false).map_err(|e| format!("chain {i}: {e}"))?;
        ensure(r.rhs >= r.lhs - BOUND_TOL, || format!("chain {i}: λ₂ = {} < {}", r.rhs, r.lhs))?;
        worst = worst.min(r.slack);
    }
    Ok(format!("{} chains, min slack {worst:.3e}", suite.len()))
}

fn band(values: [f64; 2]) -> (f64, f64) {
    let lo = values[0].min(values[1]) * (1.0 - BAND_MARGIN);
    let hi = values[0].max(values[1]) * (1.0 + BAND_MARGIN);
    (lo, hi)
}

fn counterexample_scan() -> Outcome {
    let started = Instant::now();
    let rows: Vec<ScanRow> = scaling_scan(&[64, 128, 256, 512, 1024]).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let rho: Vec<f64> = rows.iter().map(|r| r.rho).collect();
    let summary = format!(
        "rho = [{}], ratio {:.4}, {elapsed:.2?}",
        rho.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>().join(", "),
        rho[4] / rho[0]
    );
    ensure(rho.windows(2).all(|w| w[1] > w[0]), || format!("rho not increasing: {summary}"))?;
    let (l_lo, l_hi) = band(LAMBDA2_SCALED_AT);
    let (p_lo, p_hi) = band(PHI_SCALED_AT);
    for r in &rows {
        ensure((l_lo..=l_hi).contains(&r.lambda2_scaled), || {
            format!("n = {}: λ₂·n²/log n = {} outside [{l_lo}, {l_hi}]", r.n, r.lambda2_scaled)
        })?;
        ensure((p_lo..=p_hi).contains(&r.phi_scaled), || {
            format!("n = {}: φ·n/log n = {} outside [{p_lo}, {p_hi}]", r.n, r.phi_scaled)
        })?;
    }
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    ensure(rho[4] / rho[0] >= 1.5, || format!("ratio below 1.5: {summary}"))?;
    Ok(summary)
}

fn exactness_cross_checks() -> Outcome {
    let mut notes = Vec::new();
    for n in [8, 12, 16] {
        let (c, _) = gen_ht_counterexample(n).unwrap();
        let exact = phi_p_exact(&c, 0.5).map_err(|e| e.to_string())?.phi;
        let (arc, _) = arc_min_phi_half(n).unwrap();
        let floor = 0.5 * (n as f64).ln() / n as f64;
        ensure(exact <= arc + 1e-12, || format!("n = {n}: exact {exact} > arc {arc}"))?;
        ensure(exact >= floor && arc >= floor, || format!("n = {n}: {exact}, {arc} below {floor}"))?;
        notes.push(format!("n={n}: {exact:.5}/{arc:.5}"));
    }
    let sizes: Vec<usize> = (3..=64).chain([96, 128, 192, 256]).collect();
    let mut worst = 0.0f64;
    for &n in &sizes {
        let (ht, _) = gen_ht_counterexample(n).unwrap();
        let ring = markov_iso::families::gen_cycle(n).unwrap();
        let mut ring_row = vec![0.0; n];
        ring_row[0] = 1.0;
        ring_row[1] -= 0.5;
        ring_row[n - 1] -= 0.5;
        for (chain, row) in [(ht, ht_laplacian_first_row(n).unwrap()), (ring, ring_row)] {
            let analytic = circulant_lambda2_analytic(&row).map_err(|e| e.to_string())?;
            let dense = symmetric_eigensolve(&normalized_laplacian(&chain)).map_err(|e| e.to_string())?.values[1];
            worst = worst.max((analytic - dense).abs());
            ensure((analytic - dense).abs() <= 1e-8, || format!("n = {n}: {analytic} vs {dense}"))?;
        }
    }
    Ok(format!("{}; circulant λ₂ max error {worst:.2e} over {} sizes", notes.join(", "), sizes.len()))
}

fn sweep_guarantee_suite(suite: &[MarkovChain]) -> Outcome {
    let mut worst = f64::INFINITY;
    for (i, c) in suite.iter().enumerate() {
        let cert = lambda2_reversible(c).map_err(|e| e.to_string())?;
        for p in [0.6, 0.75, 1.0] {
            let cut = sweep_cut(c, p, &cert).map_err(|e| format!("chain {i}: {e}"))?;
            let bound = 2.0 * (cert.lambda2 / (2.0 * p - 1.0)).sqrt();
            let exact = phi_p_exact(c, p).unwrap().phi;
            ensure(cut.pi_mass <= 0.5 + HALF_MASS_SLACK, || format!("chain {i}: mass {}", cut.pi_mass))?;
            ensure(cut.phi <= bound + 1e-8, || format!("chain {i}, p = {p}: {} > {bound}", cut.phi))?;
            ensure(cut.phi >= exact - 1e-12, || format!("chain {i}, p = {p}: sweep {} < exact {exact}", cut.phi))?;
            worst = worst.min(bound - cut.phi);
        }
    }
    Ok(format!("{} chains x 3 exponents, min slack {worst:.3e}", suite.len()))
}

fn directed_suite(reversible: &[MarkovChain]) -> Outcome {
    let suite = random_directed_suite(100, 3..=10, SUITE_DENSITY, DIRECTED_SEED).map_err(|e| e.to_string())?;
    let mut non_reversible = 0;
    for (i, c) in suite.iter().enumerate() {
        non_reversible += usize::from(!c.is_reversible_default());
        let mut reports: Vec<_> = check_chung(c).map_err(|e| format!("chain {i}: {e}"))?.to_vec();
        for p in [0.6, 1.0] {
            reports.push(check_main_theorem(c, p, true).map_err(|e| format!("chain {i}: {e}"))?);
        }
        for r in reports {
            ensure(r.lhs <= r.rhs + BOUND_TOL, || format!("chain {i}: {} {} > {}", r.name, r.lhs, r.rhs))?;
        }
    }
    let mut worst = 0.0f64;
    for c in reversible {
        let a = lambda2_reversible(c).unwrap().lambda2;
        let b = lambda2_directed(c).unwrap().lambda2;
        worst = worst.max((a - b).abs());
    }
    ensure(worst <= 1e-8, || format!("directed vs reversible λ₂ differ by {worst}"))?;
    Ok(format!(
        "{} digraphs ({non_reversible} non-reversible); reversible agreement {worst:.2e}",
        suite.len()
    ))
}

fn lazy_scaling(suite: &[MarkovChain]) -> Outcome {
    let mut worst_set = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for c in suite.iter().take(20) {
        let sets = admissible_sets(c);
        let l2 = lambda2_reversible(c).unwrap().lambda2;
        let ratio = phi_p_exact(c, 0.5).unwrap().phi / l2.sqrt();
        for delta in [0.1, 0.5, 0.9] {
            let lazy = c.lazy_transform(delta).map_err(|e| e.to_string())?;
            for p in [0.5, 0.75, 1.0] {
                for s in &sets {
                    let a = phi_p_of_set(c, s, p).unwrap().phi;
                    let b = phi_p_of_set(&lazy, s, p).unwrap().phi;
                    worst_set = worst_set.max((b - delta.powf(p) * a).abs());
                }
            }
            let ll2 = lambda2_reversible(&lazy).unwrap().lambda2;
            worst_gap = worst_gap.max((ll2 - delta * l2).abs());
            let lazy_ratio = phi_p_exact(&lazy, 0.5).unwrap().phi / ll2.sqrt();
            worst_ratio = worst_ratio.max((lazy_ratio - ratio).abs());
        }
    }
    let summary = format!("per-set {worst_set:.2e}, λ₂ {worst_gap:.2e}, ratio {worst_ratio:.2e}");
    ensure(worst_set <= 1e-12 && worst_gap <= 1e-9 && worst_ratio <= 1e-9, || summary.clone())?;
    Ok(summary)
}

fn proof_gadgets() -> Outcome {
    let mut notes = Vec::new();
    for p in [0.51, 0.6, 0.75, 1.0] {
        let sup = gadget_c_supremum(p, 100_000, 7).map_err(|e| e.to_string())?;
        let bound = 1.0 / (2.0 * p - 1.0);
        ensure(sup <= bound + 1e-9, || format!("p = {p}: {sup} > {bound}"))?;
        notes.push(format!("p={p}: {sup:.4}/{bound:.4}"));
    }
    let ms: Vec<u64> = (1..=1000).chain((1..=6).map(|k| 10u64.pow(k))).collect();
    for b0 in [0.01, 0.25, 0.9] {
        let mut sorted = ms.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let values: Vec<f64> = sorted.iter().map(|&m| gadget_log_chain(b0, m)).collect();
        ensure(values.windows(2).all(|w| w[1] >= w[0]), || format!("b0 = {b0}: not monotone in m"))?;
        let limit = 0.5 * (1.0 / b0).ln();
        let last = *values.last().unwrap();
        ensure((last - limit).abs() <= 1e-4, || format!("b0 = {b0}: {last} vs {limit}"))?;
    }
    notes.push("log chain monotone and converged".into());
    Ok(notes.join(", "))
}

fn block_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
    let mut worst_concavity = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let k = rng.random_range(2..=5);
        let mut sizes: Vec<usize> = (0..2 * k).map(|_| rng.random_range(1..=6)).collect();
        let s = sizes[0] + sizes[2];
        let g: Vec<f64> = (0..=s)
            .map(|x| {
                sizes[0] = x;
                sizes[2] = s - x;
                blocks_h(&PartitionBlocks::new(sizes.clone()).unwrap())
            })
            .collect();
        for x in 1..s {
            worst_concavity = worst_concavity.max(g[x - 1] - 2.0 * g[x] + g[x + 1]);
        }
        let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(g[0].min(g[s]) <= min + 1e-12, || format!("interior minimum for {sizes:?}"))?;
    }
    ensure(worst_concavity <= 1e-9, || format!("second difference {worst_concavity}"))?;

    let mut worst_merge = 0.0f64;
    for _ in 0..1000 {
        let k = rng.random_range(2..=5);
        let mut sizes: Vec<usize> = (0..2 * k).map(|_| rng.random_range(1..=6)).collect();
        let z = rng.random_range(0..2 * k);
        sizes[z] = 0;
        worst_merge = worst_merge.max(blocks_merge_check(&PartitionBlocks::new(sizes).unwrap()).unwrap());
    }
    ensure(worst_merge <= 1e-12, || format!("merge error {worst_merge}"))?;

    let mut worst_slack = f64::INFINITY;
    for n in [8, 16, 32] {
        let (c, _) = gen_ht_counterexample(n).unwrap();
        let mut done = 0;
        while done < 500 {
            let coloring: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
            let Ok((blocks, _)) = PartitionBlocks::from_coloring(&coloring) else {
                continue;
            };
            let r = lower_bound_fab_check(&c, &blocks).map_err(|e| e.to_string())?;
            ensure(r.holds, || format!("n = {n}, blocks {:?}: {} > {}", blocks.sizes, r.lhs, r.rhs))?;
            worst_slack = worst_slack.min(r.slack);
            done += 1;
        }
    }
    Ok(format!(
        "concavity {worst_concavity:.2e}, merge {worst_merge:.2e}, log-sum min slack {worst_slack:.3e}"
    ))
}

fn hypercubes() -> Outcome {
    let mut checked = 0usize;
    for d in 2..=4usize {
        let q = gen_hypercube(d).map_err(|e| e.to_string())?;
        let phi1 = phi_p_exact(&q, 1.0).unwrap().phi;
        ensure((phi1 - 1.0 / d as f64).abs() <= 1e-12, || format!("d = {d}: φ₁ = {phi1}"))?;
        let half = phi_p_exact(&q, 0.5).unwrap().phi;
        let dictator: Vec<usize> = (0..1usize << d).filter(|x| x & 1 == 0).collect();
        let witness = phi_p_of_set(&q, &dictator, 0.5).unwrap().phi;
        let target = 1.0 / (d as f64).sqrt();
        ensure((witness - target).abs() <= 1e-12, || format!("d = {d}: dictator φ_1/2 = {witness}"))?;
        ensure(half <= target + 1e-12, || format!("d = {d}: φ_1/2 = {half}"))?;
        let counted = hypercube_quantities(d, &dictator).unwrap();
        ensure((counted.phi_half(d) - witness).abs() <= 1e-12, || format!("d = {d}: boundary count mismatch"))?;
        for s in admissible_sets(&q) {
            let prof = phi_profile(&q, &s).unwrap();
            ensure(prof.phi0 + 1e-12 >= prof.phi_half && prof.phi_half + 1e-12 >= prof.phi1, || {
                format!("d = {d}, S = {s:?}: {prof:?}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("d = 2..4, {checked} sets profiled"))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let suite = reversible_suite();
    let checks: Vec<Check> = vec![
        ("main theorem, reversible suite", Box::new(|| main_theorem_suite(&suite, started))),
        ("Morris-Peres form, reversible suite", Box::new(|| morris_peres_suite(&suite))),
        ("counterexample separation scan", Box::new(counterexample_scan)),
        ("exact/arc/analytic cross-checks", Box::new(exactness_cross_checks)),
        ("sweep-cut guarantee", Box::new(|| sweep_guarantee_suite(&suite))),
        ("directed suite", Box::new(|| directed_suite(&suite))),
        ("lazy scaling identities", Box::new(|| lazy_scaling(&suite))),
        ("proof gadgets", Box::new(proof_gadgets)),
        ("block function machinery", Box::new(block_machinery)),
        ("hypercube isoperimetry", Box::new(hypercubes)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
