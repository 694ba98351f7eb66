use std::fs;

use primefeat::baseline::{generate_gaussian, BaselineConfig};
use primefeat::basis::{PrimeBasis, StaticBasis};
use primefeat::encoder::{dynamic_codebook, generate_static};
use primefeat::harness::bundle::{self, DatasetParams, RegimeRunConfig};
use primefeat::harness::{
    bench, run_classification_study, run_regime_study, run_welch_population, BenchConfig,
    ClassificationConfig, GridSpec, RegimeConfig,
};
use primefeat::metrics::{report, HISTOGRAM_BINS};
use primefeat::synth::{make_circles, make_spiral};
use primefeat::{Matrix, PrimeTable, Source};

#[test]
fn static_codebook_matches_direct_formula() {
    let mut primes = PrimeTable::new();
    let basis = StaticBasis::build(16, &mut primes).unwrap();
    let cb = generate_static(&basis, 50);
    let first: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    for t in 0..50 {
        for (i, p) in first.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * (p.sqrt() * t as f64);
            assert!((cb.rows.get(t, i) - phase.cos()).abs() < 1e-15);
            assert!((cb.rows.get(t, 8 + i) - phase.sin()).abs() < 1e-15);
        }
    }
}

#[test]
fn reports_for_each_source() {
    let mut primes = PrimeTable::new();
    let stat = generate_static(&StaticBasis::build(32, &mut primes).unwrap(), 100);
    let gauss = generate_gaussian(&BaselineConfig {
        seed: 42,
        n: 100,
        dim: 32,
    })
    .unwrap();
    let basis = PrimeBasis::build(2, 32, 0.05, &mut primes).unwrap();
    let xs = Matrix::from_vec(100, 2, (0..200).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
    let dynamic = dynamic_codebook(&basis, &xs).unwrap();
    for (cb, source) in [
        (stat, Source::StaticPrime),
        (gauss, Source::GaussianBaseline),
        (dynamic, Source::DynamicPrime),
    ] {
        let r = report(&cb).unwrap();
        assert_eq!(r.source, source);
        assert_eq!(r.histogram.len(), HISTOGRAM_BINS);
        assert_eq!(r.histogram.iter().sum::<u64>(), 100 * 99 / 2);
        assert!(r.mu_max >= r.welch.unwrap() - 1e-12);
        assert!(r.e_rms > 0.0 && r.e_rms <= r.mu_max);
    }
}

#[test]
fn bundles_for_every_study() {
    let dir = tempfile::tempdir().unwrap();
    let mut primes = PrimeTable::new();

    let spec = GridSpec {
        n_values: vec![60],
        d_values: vec![8, 16],
        sources: vec![Source::StaticPrime, Source::GaussianBaseline],
        seeds: vec![1, 2],
    };
    let pop = run_welch_population(&spec, &mut primes).unwrap();
    let welch_dir = dir.path().join("welch");
    bundle::write_welch(&welch_dir, &pop).unwrap();
    for f in [
        "config.json",
        "reports.csv",
        "summary.json",
        "plots/optimality_ratio.svg",
        "plots/excess_coherence.svg",
    ] {
        assert!(welch_dir.join(f).exists(), "{f}");
    }

    let datasets = vec![
        make_spiral(120, 0.0, 3).unwrap(),
        make_circles(120, 0.0, 3).unwrap(),
    ];
    let cfg = RegimeConfig::default();
    let results = run_regime_study(&datasets, &cfg, &mut primes).unwrap();
    let regime_dir = dir.path().join("regimes");
    let run_cfg = RegimeRunConfig {
        study: &cfg,
        datasets: datasets
            .iter()
            .map(|d| DatasetParams {
                kind: d.kind.to_string(),
                n: d.len(),
                noise: d.noise,
                seed: d.seed,
            })
            .collect(),
    };
    bundle::write_regimes(&regime_dir, &run_cfg, &results).unwrap();
    let csv = fs::read_to_string(regime_dir.join("reports.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
    assert_eq!(fs::read_dir(regime_dir.join("plots")).unwrap().count(), 8);

    let ccfg = ClassificationConfig {
        n: 100,
        ..ClassificationConfig::default()
    };
    let cresults = run_classification_study(&ccfg, &mut primes).unwrap();
    let cdir = dir.path().join("classify");
    bundle::write_classification(&cdir, &ccfg, &cresults).unwrap();
    // 6 cells, two matrices of 16 entries each
    assert_eq!(
        fs::read_to_string(cdir.join("reports.csv"))
            .unwrap()
            .lines()
            .count(),
        1 + 6 * 32
    );

    let bcfg = BenchConfig {
        n_sizes: vec![200, 400],
        d_out_sizes: vec![8, 16],
        base_n: 100,
        base_d_out: 8,
        d_in: 2,
        trials: 1,
        threads: 1,
    };
    let table = bench(&bcfg).unwrap();
    let bdir = dir.path().join("bench");
    bundle::write_bench(&bdir, &table).unwrap();
    assert_eq!(
        fs::read_to_string(bdir.join("reports.csv"))
            .unwrap()
            .lines()
            .count(),
        1 + 8
    );
}

#[test]
fn prime_cache_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    let table = PrimeTable::with_count(5000).unwrap();
    table.save(&path).unwrap();
    let mut loaded = PrimeTable::load(&path).unwrap();
    assert_eq!(loaded.values(), table.values());
    loaded.ensure_count(6000).unwrap();
    assert_eq!(
        &loaded.values()[..6000],
        &PrimeTable::with_count(6000).unwrap().values()[..6000]
    );
}
