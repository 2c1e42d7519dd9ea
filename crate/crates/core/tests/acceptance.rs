//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use consensus_lab::graph::{build_laplacian, random_connected, Family, Graph, LaplacianKind};
use consensus_lab::monic_roots;
use consensus_lab::scaling::{critical_n_vs_q, find_critical_n, SweepSpec};
use consensus_lab::sim::{integrate, Classification, SimConfig};
use consensus_lab::spectral::{
    algebraic_connectivity, connectivity_bound, fuzz_constant, lambda2_real_via_mirror, spectrum,
    BoundKind,
};
use consensus_lab::stability::{assess, eigen_oracle, mode_char_poly, Gains, Mode, ModeVerdict};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {:.1?}, limit {:?}", elapsed, limit)
    })
}

fn gains(a: &[f64]) -> Gains {
    Gains::new(a.to_vec()).unwrap()
}

fn threshold_reproduction() -> Check {
    let start = Instant::now();
    let g3 = gains(&[0.5, 1.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut tested, mut stable, mut skipped) = (0, 0, 0);
    while tested < 200 {
        let n = rng.gen_range(3..=30);
        let extra = rng.gen_range(0.0..0.4);
        let g = random_connected(n, extra, (0.2, 1.5), &mut rng);
        let lambda2 = algebraic_connectivity(&g).map_err(|e| e.to_string())?;
        if (lambda2 - 0.5).abs() <= 1e-3 {
            skipped += 1;
            continue;
        }
        let report = assess(&g3, &g, Mode::Leaderless).map_err(|e| e.to_string())?;
        ensure(report.system_stable == (lambda2 > 0.5), || {
            format!("N={} λ₂={} but stable={}", n, lambda2, report.system_stable)
        })?;
        let l = build_laplacian(&g, LaplacianKind::Full).unwrap();
        let oracle = eigen_oracle(&g3, &l).map_err(|e| e.to_string())?;
        ensure(
            (oracle.max_real_nonzero < 0.0) == report.system_stable,
            || {
                format!(
                    "oracle disagrees at N={} (max Re {})",
                    n, oracle.max_real_nonzero
                )
            },
        )?;
        stable += report.system_stable as usize;
        tested += 1;
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "200 graphs ({} stable, {} unstable, {} near-threshold skipped), oracle 100%",
        stable,
        200 - stable,
        skipped
    ))
}

fn phase_transition() -> Check {
    let start = Instant::now();
    let g3 = gains(&[0.5, 1.0, 1.0]);
    let mut detail = Vec::new();
    for (n, want_stable, want_class) in [
        (8, true, Classification::Consensus),
        (9, false, Classification::Diverging),
    ] {
        let g = Family::Cycle { w: 1.0 }.generate(n).unwrap();
        let report = assess(&g3, &g, Mode::Leaderless).map_err(|e| e.to_string())?;
        ensure(report.system_stable == want_stable, || {
            format!("N={} stable={}", n, report.system_stable)
        })?;
        ensure(!report.marginal, || format!("N={} is marginal", n))?;
        let trace = integrate(&SimConfig::new(g3.clone(), g, 42)).map_err(|e| e.to_string())?;
        ensure(trace.classification == want_class, || {
            format!("N={} simulated as {:?}", n, trace.classification)
        })?;
        detail.push(format!(
            "N={} {} (rate {:+.4})",
            n,
            trace.classification.tag(),
            trace.growth_rate
        ));
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(detail.join(", "))
}

fn fig1_reproduction() -> Check {
    let start = Instant::now();
    let qs = [2, 4, 6, 8, 10, 12];
    let all = gains(&[0.1, 0.8, 1.0, 1.0, 1.0]);
    let table = critical_n_vs_q(&qs, &[3, 4, 5], &all, 100, 4).map_err(|e| e.to_string())?;
    let row = |n: usize| -> Result<Vec<usize>, String> {
        table
            .iter()
            .filter(|c| c.n == n)
            .map(|c| {
                c.critical_n
                    .ok_or_else(|| format!("no N̄ for n={} q={}", n, c.q))
            })
            .collect()
    };
    let (r3, r4, r5) = (row(3)?, row(4)?, row(5)?);

    ensure(r3[0] == 9, || format!("N̄(n=3, q=2) = {}", r3[0]))?;
    ensure(r3.windows(2).all(|w| w[0] < w[1]), || {
        format!("n=3 not increasing: {:?}", r3)
    })?;
    for (i, &q) in qs.iter().enumerate() {
        if let Some(j) = qs.iter().position(|&p| p == 2 * q) {
            ensure(r3[j] > 2 * r3[i], || {
                format!("N̄(2q={}) = {} <= 2 N̄(q) = {}", 2 * q, r3[j], 2 * r3[i])
            })?;
        }
    }
    for i in 0..qs.len() {
        ensure(r5[i] <= r4[i] && r4[i] <= r3[i], || {
            format!(
                "order ranking broken at q={}: {} {} {}",
                qs[i], r5[i], r4[i], r3[i]
            )
        })?;
    }
    // Frozen sweep results for these gains.
    ensure(r3 == [9, 20, 34, 49, 66, 85], || {
        format!("n=3 row {:?}", r3)
    })?;
    ensure(r4 == [4, 7, 12, 18, 24, 31], || format!("n=4 row {:?}", r4))?;
    ensure(r5 == [2; 6], || format!("n=5 row {:?}", r5))?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("n=3 {:?}, n=4 {:?}, n=5 {:?}", r3, r4, r5))
}

fn hurwitz_oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut tested, mut stable, mut banded) = (0, 0, 0);
    while tested < 1000 {
        let n = rng.gen_range(3..=5);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..2.0)).collect();
        let lambda = Complex64::new(rng.gen_range(0.0..3.0), rng.gen_range(-2.0..2.0));
        let v = ModeVerdict::evaluate(&gains(&a), 2, lambda).map_err(|e| e.to_string())?;
        if v.marginal {
            banded += 1;
            continue;
        }
        ensure(v.hurwitz_stable == (v.oracle_max_real_part < 0.0), || {
            format!(
                "a={:?} λ={} det={:?} max Re={}",
                a, lambda, v.det_signed, v.oracle_max_real_part
            )
        })?;
        stable += v.hurwitz_stable as usize;
        tested += 1;
    }
    Ok(format!(
        "1000 samples ({} stable), {} in margin band skipped",
        stable, banded
    ))
}

fn max_matching_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

fn block_diagonalization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut graphs: Vec<Graph> = (0..40)
        .map(|_| {
            let n = rng.gen_range(2..=12);
            random_connected(n, rng.gen_range(0.0..0.5), (0.3, 1.5), &mut rng)
        })
        .collect();
    graphs.extend((2..=12).map(|n| Family::DirectedCycle { w: 1.0 }.generate(n).unwrap()));
    graphs.extend((3..=12).map(|n| Family::StarTree { w: 0.7 }.generate(n).unwrap()));

    let mut worst = 0.0f64;
    let mut cases = 0;
    for g in &graphs {
        let l = build_laplacian(g, LaplacianKind::Full).unwrap();
        let lambdas = spectrum(&l).map_err(|e| e.to_string())?.eigenvalues;
        for n in 1..=5 {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
            let gk = gains(&a);
            let oracle = eigen_oracle(&gk, &l).map_err(|e| e.to_string())?;
            let mut union = Vec::with_capacity(n * g.node_count());
            for &lam in &lambdas {
                union.extend(
                    monic_roots(mode_char_poly(&gk, lam).tail()).map_err(|e| e.to_string())?,
                );
            }
            let err = max_matching_error(&oracle.eigenvalues, &union);
            ensure(err <= 1e-8, || {
                format!("N={} n={} mismatch {:e}", g.node_count(), n, err)
            })?;
            ensure(oracle.zero_mode_count == n, || {
                format!(
                    "N={} n={} zero modes {}",
                    g.node_count(),
                    n,
                    oracle.zero_mode_count
                )
            })?;
            worst = worst.max(err);
            cases += 1;
        }
    }
    Ok(format!(
        "{} (graph, n) cases, worst mismatch {:.1e}, zero modes = n",
        cases, worst
    ))
}

fn certify(g: &Graph, kind: BoundKind) -> Result<(), String> {
    let c = connectivity_bound(g, kind).map_err(|e| e.to_string())?;
    ensure(c.satisfied, || {
        format!(
            "{} bound {} < computed {} at N={}",
            kind.tag(),
            c.bound,
            c.computed,
            g.node_count()
        )
    })
}

fn connectivity_lemmas() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut count = 0;

    for n in 2..=40 {
        certify(
            &Family::TreePath { w: 1.0 }.generate(n).unwrap(),
            BoundKind::Tree,
        )?;
        count += 1;
    }
    for n in 3..=40 {
        certify(
            &Family::StarTree { w: 1.3 }.generate(n).unwrap(),
            BoundKind::Tree,
        )?;
        count += 1;
    }
    for _ in 0..30 {
        let n = rng.gen_range(3..=30);
        certify(
            &random_connected(n, 0.0, (0.5, 2.0), &mut rng),
            BoundKind::Tree,
        )?;
        count += 1;
    }

    for n in 10..=100 {
        certify(
            &Family::DelaunayPlanar { seed: 11, w: 1.0 }
                .generate(n)
                .unwrap(),
            BoundKind::Planar,
        )?;
        count += 1;
    }

    for n in 3..=40 {
        for g in [
            Family::TreePath { w: 1.0 }.generate(n).unwrap(),
            Family::Cycle { w: 0.8 }.generate(n).unwrap(),
        ] {
            for leader in [0, n / 2] {
                certify(&g, BoundKind::LeaderGrounded { leader })?;
                count += 1;
            }
        }
    }

    let mut worst_scaled = 0.0f64;
    for (d, r, sides) in [(1, 1, 5usize..=200), (1, 2, 6..=200), (2, 1, 3..=14)] {
        let c = fuzz_constant(d, r, 1.0);
        for m in sides {
            let n = m.pow(d as u32);
            let g = Family::ToricLattice { d, r, w: 1.0 }.generate(n).unwrap();
            certify(&g, BoundKind::Fuzz { d, r })?;
            let scaled = algebraic_connectivity(&g).unwrap() * (n as f64).powf(2.0 / d as f64);
            ensure(scaled <= c + 1e-9, || {
                format!("λ₂·N^(2/d) = {} exceeds {} (d={}, r={})", scaled, c, d, r)
            })?;
            worst_scaled = worst_scaled.max(scaled / c);
            count += 1;
        }
    }

    for n in 3..=30 {
        let g = Family::DirectedCycle { w: 1.0 }.generate(n).unwrap();
        let direct = spectrum(&build_laplacian(&g, LaplacianKind::Full).unwrap())
            .unwrap()
            .lambda2_real();
        let mirror = lambda2_real_via_mirror(&g).map_err(|e| e.to_string())?;
        ensure((direct - mirror).abs() <= 1e-9, || {
            format!("mirror mismatch at N={}: {} vs {}", n, direct, mirror)
        })?;
        count += 1;
    }
    Ok(format!(
        "{} certificates, max λ₂·N^(2/d)/c = {:.3}",
        count, worst_scaled
    ))
}

fn edge_monotonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(4..=20);
        let g = random_connected(n, rng.gen_range(0.0..0.5), (0.2, 2.0), &mut rng);
        let before = algebraic_connectivity(&g).unwrap();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| g.weight(i, j) == 0.0)
            .collect();
        let after = if !missing.is_empty() && rng.gen_bool(0.5) {
            let (i, j) = missing[rng.gen_range(0..missing.len())];
            g.with_edge(i, j, rng.gen_range(0.01..2.0))
                .map_err(|e| e.to_string())?
        } else {
            let (i, j, w) = g
                .unique_edges()
                .nth(rng.gen_range(0..g.unique_edges().count()))
                .unwrap();
            g.with_weight(i, j, w + rng.gen_range(0.01..2.0))
                .map_err(|e| e.to_string())?
        };
        let delta = algebraic_connectivity(&after).unwrap() - before;
        ensure(delta >= -1e-9, || format!("λ₂ dropped by {:e}", -delta))?;
        worst = worst.min(delta);
    }
    Ok(format!("100 trials, smallest change {:.2e}", worst))
}

fn leader_inadmissibility() -> Check {
    let mut detail = Vec::new();
    for a0 in [0.05, 0.1, 0.2, 0.3, 0.5] {
        for (a1, a2) in [(0.8, 1.0), (1.0, 1.0)] {
            let (q, w) = (2.0, 1.0);
            let bound = a2 * a1 * q * w / a0 + 1.0;
            let spec = SweepSpec::new(
                Family::TreePath { w },
                gains(&[a0, a1, a2]),
                2,
                bound.floor() as usize,
            )
            .with_mode(Mode::Leader { index: 0 });
            let res = find_critical_n(&spec).map_err(|e| e.to_string())?;
            let c = res.critical_n.ok_or_else(|| {
                format!(
                    "a=({}, {}, {}): no critical N below {:.1}",
                    a0, a1, a2, bound
                )
            })?;
            ensure((c as f64) < bound, || {
                format!("critical N {} not below {}", c, bound)
            })?;
            detail.push(format!("{}<{:.1}", c, bound));
        }
    }
    Ok(detail.join(" "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("threshold reproduction", threshold_reproduction),
        ("phase transition by node addition", phase_transition),
        ("critical size vs neighborhood", fig1_reproduction),
        ("determinant chain vs roots", hurwitz_oracle_equivalence),
        ("block-diagonalization identity", block_diagonalization),
        ("connectivity bound suite", connectivity_lemmas),
        ("edge monotonicity", edge_monotonicity),
        ("leader-follower inadmissibility", leader_inadmissibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("acceptance {} {}: PASS [{:.1}s] {}", i + 1, name, secs, msg),
            Err(msg) => {
                failed += 1;
                println!("acceptance {} {}: FAIL [{:.1}s] {}", i + 1, name, secs, msg);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
