use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use consensus_lab::graph::{random_connected, Family};
use consensus_lab::scaling::{find_critical_n, Decider, SweepSpec};
use consensus_lab::sim::{classify_against_report, integrate, SimConfig};
use consensus_lab::stability::{assess, Gains, Mode, MARGIN};

fn random_gains(rng: &mut ChaCha8Rng, n: usize) -> Gains {
    Gains::new((0..n).map(|_| rng.gen_range(0.2..2.0)).collect()).unwrap()
}

#[test]
fn higher_order_sweeps_always_find_a_critical_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let families = [
        Family::PathFuzz { q: 4, w: 1.0 },
        Family::Cycle { w: 1.0 },
        Family::TreePath { w: 1.0 },
    ];
    for fam in families {
        for _ in 0..6 {
            let n = rng.gen_range(3..=5);
            let spec = SweepSpec::new(fam, random_gains(&mut rng, n), 2, 200)
                .with_step(9)
                .with_jobs(4);
            let res = find_critical_n(&spec).unwrap();
            assert!(res.critical_n.is_some(), "{:?} {:?}", fam, spec.gains);
        }
    }
}

#[test]
fn leader_sweeps_stay_below_the_grounded_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for fam in [Family::TreePath { w: 1.0 }, Family::Cycle { w: 1.0 }] {
        for _ in 0..5 {
            let gains = random_gains(&mut rng, 3);
            let a = gains.a();
            let bound = 2.0 * a[2] * a[1] * 2.0 / a[0];
            let n_max = (bound.ceil() as usize).max(10);
            let spec =
                SweepSpec::new(fam, gains.clone(), 2, n_max).with_mode(Mode::Leader { index: 0 });
            let res = find_critical_n(&spec).unwrap();
            assert!(res.critical_n.is_some(), "{:?} {:?}", fam, gains);
        }
    }
}

#[test]
fn second_order_never_destabilizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let families = [
        Family::PathFuzz { q: 2, w: 1.0 },
        Family::Cycle { w: 0.5 },
        Family::TreePath { w: 1.0 },
        Family::StarTree { w: 1.0 },
        Family::DelaunayPlanar { seed: 2, w: 1.0 },
    ];
    for fam in families {
        let spec = SweepSpec::new(fam, random_gains(&mut rng, 2), 2, 120).with_step(7);
        assert_eq!(
            find_critical_n(&spec).unwrap().critical_n,
            None,
            "{:?}",
            fam
        );
    }
}

#[test]
fn determinant_and_oracle_sweeps_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let families = [
        Family::PathFuzz { q: 4, w: 1.0 },
        Family::Cycle { w: 1.0 },
        Family::DirectedCycle { w: 1.0 },
        Family::TreePath { w: 1.0 },
    ];
    for fam in families {
        for n in 3..=4 {
            let base = SweepSpec::new(fam, random_gains(&mut rng, n), 2, 40);
            let chain = find_critical_n(&base).unwrap();
            let oracle = find_critical_n(&base.clone().with_decider(Decider::Oracle)).unwrap();
            assert_eq!(
                chain.critical_n, oracle.critical_n,
                "{:?} {:?}",
                fam, base.gains
            );
        }
    }
}

#[test]
fn simulation_agrees_with_clear_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decided = 0;
    for seed in 0..30 {
        let n_nodes = rng.gen_range(2..=12);
        let g = random_connected(n_nodes, rng.gen_range(0.0..0.4), (0.3, 1.5), &mut rng);
        let gains = random_gains(&mut rng, 3);
        let report = assess(&gains, &g, Mode::Leaderless).unwrap();
        let min_det = report.min_signed_det().unwrap();
        if min_det.abs() <= MARGIN {
            continue;
        }
        let trace = integrate(&SimConfig::new(gains, g, seed)).unwrap();
        let agreement = classify_against_report(&trace, &report).unwrap();
        if let Some(ok) = agreement.agreement {
            assert!(
                ok,
                "seed {}: {:?} but stable={}",
                seed, trace.classification, report.system_stable
            );
            decided += 1;
        }
    }
    assert!(decided >= 20, "only {} decided runs", decided);
}
