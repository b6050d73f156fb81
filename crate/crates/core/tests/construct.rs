mod common;

use nkline::construct::{
    adjust_k, adjust_n, biuniform_construct, explicit_construct, pipeline, sample_biuniform,
    strip_factors, BiUniformConfig, BiUniformOutcome, ConstructError, MatrixKind, PipelineConfig,
    Step,
};
use nkline::feasibility::{build_paper_r, SubgridDecomposition};
use nkline::format::PointSetFile;
use nkline::secants::{verify, SweepMode};
use nkline::{Execution, GridSpec, PointSet};
use proptest::prelude::*;

fn assert_regular(s: &PointSet, k: usize) {
    assert!(s.column_counts().iter().all(|&c| c == k));
    assert!(s.row_counts().iter().all(|&c| c == k));
}

#[test]
fn explicit_sets_pass_exhaustive_verification() {
    for n in 12u32..=30 {
        for k in (2 * n).div_ceil(3)..=n {
            let s = explicit_construct(n, k).unwrap();
            assert_eq!(s.len(), (n * k) as usize);
            assert_regular(&s, k as usize);
            let r = verify(&s, k, 0, SweepMode::Exhaustive);
            assert!(r.passed(), "n={n} k={k} worst={:?}", r.worst_line);
        }
    }
}

#[test]
fn explicit_matches_pair_oracle() {
    let s = explicit_construct(16, 11).unwrap();
    let pts: Vec<(u32, u32)> = s.iter().map(|p| (p.x, p.y)).collect();
    assert!(common::max_collinear(&pts) <= 11);
}

#[test]
fn biuniform_is_deterministic_per_seed() {
    let r = build_paper_r(40, 30).unwrap();
    let dec = SubgridDecomposition::new(GridSpec::new(40).unwrap(), 4).unwrap();
    let a = sample_biuniform(&dec, &r, 7, 0, None, Execution::Sequential).unwrap();
    let b = sample_biuniform(&dec, &r, 7, 0, None, Execution::Parallel).unwrap();
    let c = sample_biuniform(&dec, &r, 7, 1, None, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn biuniform_block_densities_follow_the_matrix() {
    let r = build_paper_r(40, 30).unwrap();
    let dec = SubgridDecomposition::new(GridSpec::new(40).unwrap(), 4).unwrap();
    let s = sample_biuniform(&dec, &r, 3, 0, None, Execution::default()).unwrap();
    let mut per_block = [[0u32; 4]; 4];
    for p in s.iter() {
        let (i, j) = dec.block_of(p);
        per_block[i][j] += 1;
    }
    for (i, row) in per_block.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            assert_eq!(c, r.entry(i, j) * 10, "block ({i}, {j})");
        }
    }
}

#[test]
fn adjustment_chain_from_a_biuniform_set() {
    let r = build_paper_r(120, 100).unwrap();
    let cfg = BiUniformConfig::new(99, 16, 5);
    let BiUniformOutcome::Certified(base) = biuniform_construct(120, 100, &r, cfg).unwrap() else {
        panic!("no certified sample in 16 retries");
    };
    assert!(base.report.achieved_reserve >= 5);

    let lowered = adjust_k(&base.set, 100, 5, 97).unwrap();
    assert_eq!(lowered.len(), 97 * 120);
    assert_regular(&lowered, 97);
    assert!(verify(&lowered, 97, 2, SweepMode::Threshold).passed());
    assert!(lowered.iter().all(|p| base.set.contains(p)));

    let grown = adjust_n(&lowered, 97, 2).unwrap();
    assert_eq!(grown.n(), 121);
    assert_eq!(grown.len(), 97 * 121);
    assert_regular(&grown, 97);
    assert!(verify(&grown, 97, 0, SweepMode::Exhaustive).passed());
}

#[test]
fn stripping_the_full_grid() {
    let full = PointSet::full(GridSpec::new(12).unwrap());
    let s = strip_factors(&full, 1).unwrap();
    assert_regular(&s, 11);
    // the full grid has reserve 0, so the audited path refuses it
    assert!(matches!(
        adjust_k(&full, 12, 1, 11),
        Err(ConstructError::ReserveAudit { required: 1, achieved: 0 })
    ));
}

#[test]
fn pipeline_routes_through_every_stage() {
    for (matrix, n, k, seed) in [(MatrixKind::Paper4, 243, 155, 11), (MatrixKind::Remark3, 245, 155, 11)] {
        let cfg = PipelineConfig { seed, retries: 32, matrix, ..Default::default() };
        let cert = pipeline(n, k, cfg).unwrap();
        assert_eq!(cert.set.len(), (n * k) as usize);
        assert_eq!(cert.set.n(), n);
        assert_regular(&cert.set, k as usize);
        assert!(cert.report.passed());
        assert!(matches!(cert.lineage[..], [Step::BiUniform { .. }, Step::AdjustK { .. }, Step::AdjustN { .. }]));

        let again = pipeline(n, k, cfg).unwrap();
        let file = |c: &nkline::construct::ConstructionCertificate| {
            PointSetFile { set: c.set.clone(), k: c.k, reserve: Some(0), seed: c.seed }.serialize()
        };
        assert_eq!(file(&cert), file(&again));
    }
}

#[test]
fn pipeline_uses_explicit_route_for_dense_k() {
    let cert = pipeline(30, 20, PipelineConfig::default()).unwrap();
    assert_eq!(cert.lineage, vec![Step::Explicit { n: 30, k: 20 }]);
    assert!(verify(&cert.set, 20, 0, SweepMode::Exhaustive).passed());
    let cert = pipeline(68, 46, PipelineConfig::default()).unwrap();
    assert_eq!(cert.set.len(), 3128);
    assert_eq!(cert.lineage, vec![Step::Explicit { n: 68, k: 46 }]);
}

#[test]
fn strict_pipeline_refuses_small_k() {
    let cfg = PipelineConfig { strict: true, ..Default::default() };
    assert!(matches!(pipeline(243, 155, cfg), Err(ConstructError::Strict(_))));
    assert!(matches!(pipeline(60, 50, cfg), Err(ConstructError::Strict(_))));
    // 14.79·sqrt(100 ln 100) ≈ 317 > n
    assert!(pipeline(100, 100, cfg).is_err());
    let ok = pipeline(100, 80, PipelineConfig { c_const: 1.0, ..cfg }).unwrap();
    assert_eq!(ok.set.len(), 8000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructed_sets_roundtrip(n in 6u32..40, frac in 0.0f64..1.0, seed: u64) {
        let lo = (2 * n).div_ceil(3);
        let k = lo + ((n - lo) as f64 * frac) as u32;
        let set = explicit_construct(n, k).unwrap();
        let f = PointSetFile { set, k, reserve: Some(0), seed: Some(seed) };
        let text = f.serialize();
        prop_assert_eq!(text.lines().count(), 2 + (n * k) as usize);
        prop_assert_eq!(PointSetFile::parse(&text).unwrap(), f);
    }

    #[test]
    fn stripping_preserves_regularity(n in 12u32..30, drop in 0u32..4) {
        let k = n;
        let full = PointSet::full(GridSpec::new(n).unwrap());
        let s = strip_factors(&full, drop).unwrap();
        prop_assert_eq!(s.regularity(), Some((k - drop) as usize));
        prop_assert!(s.iter().all(|p| full.contains(p)));
    }
}
