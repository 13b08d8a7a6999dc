use gswarm::engine::EngineKind;
use gswarm::harness::{ExperimentStats, RunRecord};
use gswarm::problems::ProblemKind;
use proptest::prelude::*;

fn record(seed: u64, best_error: f64, fes_used: u64) -> RunRecord {
    RunRecord {
        seed,
        engine: EngineKind::Mfo,
        problem: ProblemKind::Regression,
        best_error,
        success: best_error <= 0.01,
        fes_used,
        best_program: String::new(),
        wall_ms: 0,
        iterations: 0,
        invalid_evaluations: 0,
        trace: Vec::new(),
    }
}

// one-pass Welford, sample variance
fn welford(xs: &[f64]) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for &x in xs {
        n += 1.0;
        let delta = x - mean;
        mean += delta / n;
        m2 += delta * (x - mean);
    }
    (
        mean,
        if n > 1.0 {
            (m2 / (n - 1.0)).sqrt()
        } else {
            0.0
        },
    )
}

proptest! {
    #[test]
    fn matches_welford(errors in prop::collection::vec(0.0f64..50.0, 1..40)) {
        let records: Vec<RunRecord> = errors.iter().enumerate()
            .map(|(i, &e)| record(i as u64, e, 1000 + 37 * i as u64))
            .collect();
        let stats = ExperimentStats::from_records(&records).unwrap();
        let (mean, std) = welford(&errors);
        prop_assert!((stats.mean_error - mean).abs() <= 1e-9 * (1.0 + mean.abs()));
        prop_assert!((stats.std_error - std).abs() <= 1e-9 * (1.0 + std));
        let fes: Vec<f64> = records.iter().map(|r| r.fes_used as f64).collect();
        let (fmean, fstd) = welford(&fes);
        prop_assert!((stats.mean_fes - fmean).abs() <= 1e-9 * fmean);
        prop_assert!((stats.std_fes - fstd).abs() <= 1e-9 * (1.0 + fstd));
        let hits = errors.iter().filter(|&&e| e <= 0.01).count();
        prop_assert_eq!(stats.success_count, hits);
    }

    #[test]
    fn independent_of_record_order(
        errors in prop::collection::vec(0.0f64..50.0, 2..30),
        perm_seed in any::<u64>(),
    ) {
        let records: Vec<RunRecord> = errors.iter().enumerate()
            .map(|(i, &e)| record(i as u64, e, i as u64))
            .collect();
        let mut shuffled = records.clone();
        let mut s = perm_seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(
            ExperimentStats::from_records(&records).unwrap(),
            ExperimentStats::from_records(&shuffled).unwrap()
        );
    }
}

#[test]
fn single_run_has_zero_spread() {
    let stats = ExperimentStats::from_records(&[record(1, 3.5, 700)]).unwrap();
    assert_eq!(
        (stats.mean_error, stats.std_error, stats.std_fes),
        (3.5, 0.0, 0.0)
    );
}

#[test]
fn known_sample_std() {
    let rs: Vec<RunRecord> = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]
        .iter()
        .enumerate()
        .map(|(i, &e)| record(i as u64, e, 0))
        .collect();
    let stats = ExperimentStats::from_records(&rs).unwrap();
    assert_eq!(stats.mean_error, 5.0);
    assert!((stats.std_error - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
}
