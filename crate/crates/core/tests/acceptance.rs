//! End-to-end acceptance checks, one per criterion, each reporting a single
//! PASS/FAIL line. Criterion 12 (CLI byte-for-byte determinism) lives in the
//! CLI crate's integration tests.

use std::collections::HashMap;

use rayon::prelude::*;

use coset_walk_core::{
    balls_isomorphic, conjugate_roots, entropy_increments, expected_returns, hmax_reference,
    irs_entropy_estimate, loop_at, rank2_measure, return_probabilities, rho_entropy_estimate,
    rn_ratio, shadows_of_root, shannon_entropy, spec_increments, stabilizer_witness, Axis,
    CellSampler, CellStatus, CosetSpace, IrsSpec, Letter, SegmentVertex, SparseDist, Word,
    DEFAULT_BUDGET,
};
use coset_walk_core::rng::{derive_seed, step_letter, stream};

fn report(criterion: u32, ok: bool, detail: &str) {
    println!("criterion {criterion} {}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_trivial_irs_increments() {
    let s = CosetSpace::trivial();
    let inc = entropy_increments(&s, s.root(), &rank2_measure(), 12).unwrap();
    let hmax = hmax_reference();
    let positive = inc.iter().all(|&d| d > 0.0);
    let monotone = inc.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let above = inc.iter().all(|&d| d >= hmax - 1e-6);
    let cushion = inc[11] <= hmax + 0.07;
    report(
        1,
        positive && monotone && above && cushion,
        &format!("delta_12 = {:.6}, h_max = {:.6}", inc[11], hmax),
    );
}

#[test]
fn criterion_02_rho_closed_form() {
    let est =
        rho_entropy_estimate(&IrsSpec::TrivialSubgroup, &rank2_measure(), 40, 200_000, 1, 0xC2, DEFAULT_BUDGET)
            .unwrap();
    let err = (est.estimate - hmax_reference()).abs();
    report(
        2,
        err <= 0.01 + 2.0 * est.stderr,
        &format!("rho = {:.6} +- {:.6}, target {:.6}", est.estimate, est.stderr, hmax_reference()),
    );
}

#[test]
fn criterion_03_zero_entropy_controls() {
    let mu = rank2_measure();
    let full = irs_entropy_estimate(&IrsSpec::FullGroup, &mu, 12, 1, 0, DEFAULT_BUDGET).unwrap();
    let zmix = irs_entropy_estimate(&IrsSpec::ZQuotientMix, &mu, 20, 1, 0, DEFAULT_BUDGET).unwrap();
    let ok = full.increments.iter().all(|&d| d == 0.0) && zmix.increments[19] <= 0.06;
    report(3, ok, &format!("full all-zero; zmix delta_20 = {:.4}", zmix.increments[19]));
}

#[test]
fn criterion_04_endpoint_identifications() {
    let mut ok = true;
    for n in [2u32, 3] {
        let base = CosetSpace::kn(n).unwrap();
        let closed =
            CosetSpace::cover(n, SegmentVertex::root(), CellSampler::new(4, 0.0).unwrap(), DEFAULT_BUDGET)
                .unwrap();
        let open =
            CosetSpace::cover(n, SegmentVertex::root(), CellSampler::new(4, 1.0).unwrap(), DEFAULT_BUDGET)
                .unwrap();
        ok &= balls_isomorphic(&closed, &base, 8).unwrap();
        ok &= balls_isomorphic(&open, &CosetSpace::trivial(), 8).unwrap();
    }
    report(4, ok, "p=0 matches base, p=1 matches free group, radius 8, n in {2,3}");
}

#[test]
fn criterion_05_stabilizer_witnesses() {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for config in 0..100u32 {
        let mut rng = stream(0xC5, u64::from(config));
        let n = 2 + (config % 2);
        let p = if config % 4 < 2 { 0.3 } else { 0.7 };
        let seed = derive_seed(0xC5C5, u64::from(config));
        let sampler = CellSampler::new(seed, p).unwrap();
        let cover = CosetSpace::cover(n, SegmentVertex::root(), sampler, DEFAULT_BUDGET).unwrap();
        let mut found = 0;
        let mut attempts = 0;
        while found < 20 && attempts < 10_000 {
            attempts += 1;
            // A random base path; usable when it ends at a loop vertex.
            let len = 1 + (attempts % 7);
            let mut g = Word::empty();
            for _ in 0..len {
                g.push(step_letter(&mut rng));
            }
            let mut end = SegmentVertex::root();
            for &l in g.letters() {
                coset_walk_core::segment::kn_step_in_place(n, &mut end, l);
            }
            let Some(cell) = loop_at(n, &end) else { continue };
            found += 1;
            checked += 1;
            let s = Letter::new(cell.axis, if attempts % 2 == 0 { 1 } else { -1 });
            let filled = sampler.status(&cell) == CellStatus::Filled;
            if stabilizer_witness(&cover, &g, s).unwrap() != filled {
                failures += 1;
            }
        }
        assert_eq!(found, 20, "could not find 20 loops for config {config}");
    }
    report(5, failures == 0, &format!("{checked} witnesses, {failures} mismatches"));
}

#[test]
fn criterion_06_coupled_monotonicity() {
    let mu = rank2_measure();
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let master = 0xC6;
    let samples = 12u32;
    let mut ok = true;
    for i in 0..samples {
        let per_p: Vec<Vec<f64>> = grid
            .iter()
            .map(|&p| {
                let spec = IrsSpec::PercolationKn { n: 2, p }.sample_spec(master, i).unwrap();
                spec_increments(&spec, &mu, 8, DEFAULT_BUDGET).unwrap()
            })
            .collect();
        for w in per_p.windows(2) {
            ok &= w[0].iter().zip(&w[1]).all(|(lo, hi)| *lo <= hi + 1e-9);
        }
    }
    report(6, ok, &format!("{samples} samples, 8 steps, grid of 5 thresholds, exact inequality"));
}

#[test]
fn criterion_07_entropy_path() {
    let mu = rank2_measure();
    let master = 0xC7;
    let samples = 200u32;
    let grid: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
    let estimates: Vec<f64> = grid
        .iter()
        .map(|&p| {
            irs_entropy_estimate(&IrsSpec::PercolationKn { n: 2, p }, &mu, 10, samples, master, DEFAULT_BUDGET)
                .unwrap()
                .estimate
        })
        .collect();
    let conj = irs_entropy_estimate(&IrsSpec::ConjClassKn { n: 2 }, &mu, 10, 1, 0, DEFAULT_BUDGET)
        .unwrap()
        .estimate;
    let trivial = irs_entropy_estimate(&IrsSpec::TrivialSubgroup, &mu, 10, 1, 0, DEFAULT_BUDGET)
        .unwrap()
        .estimate;
    let max_gap = estimates
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0f64, f64::max);
    let anchored = (estimates[0] - conj).abs() <= 1e-9 && (estimates[20] - trivial).abs() <= 0.03;
    report(
        7,
        anchored && max_gap <= 0.08,
        &format!(
            "span {:.4}..{:.4} (targets {:.4}, {:.4}), max adjacent gap {:.4}",
            estimates[0], estimates[20], conj, trivial, max_gap
        ),
    );
}

#[test]
fn criterion_08_eta_n_decay() {
    let mu = rank2_measure();
    let h = |irs: &IrsSpec| {
        irs_entropy_estimate(irs, &mu, 10, 1, 0, DEFAULT_BUDGET).unwrap().estimate
    };
    let h2 = h(&IrsSpec::ConjClassKn { n: 2 });
    let h4 = h(&IrsSpec::ConjClassKn { n: 4 });
    let h8 = h(&IrsSpec::ConjClassKn { n: 8 });
    let ht = h(&IrsSpec::TrivialSubgroup);
    let ok = h2 > h4 && h4 > h8 && h8 < 0.5 * ht;
    report(8, ok, &format!("h(eta_2)={h2:.4} > h(eta_4)={h4:.4} > h(eta_8)={h8:.4}; trivial {ht:.4}"));
}

#[test]
fn criterion_09_rn_ratio_bounds() {
    let mut spaces: Vec<(String, CosetSpace)> = vec![("trivial".into(), CosetSpace::trivial())];
    for n in [2u32, 3] {
        spaces.push((format!("kn:{n}"), CosetSpace::kn(n).unwrap()));
        for (axis, i) in conjugate_roots(n).into_iter().skip(1) {
            spaces.push((
                format!("kn:{n}@{}^{i}", axis.symbol()),
                CosetSpace::kn_conjugate(n, axis, i, DEFAULT_BUDGET).unwrap(),
            ));
        }
        for (p, seed) in [(0.3, 91u64), (0.7, 92)] {
            spaces.push((
                format!("cover:kn={n},p={p}"),
                CosetSpace::cover(n, SegmentVertex::root(), CellSampler::new(seed, p).unwrap(), DEFAULT_BUDGET)
                    .unwrap(),
            ));
        }
    }
    let mut ok = true;
    let mut count = 0usize;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (si, (name, space)) in spaces.iter().enumerate() {
        let shadows = shadows_of_root(space).unwrap();
        for (ki, sh) in shadows.iter().enumerate() {
            for (ti, t) in Letter::ALL.into_iter().enumerate() {
                let seed = derive_seed(0xC9, (si * 64 + ki * 8 + ti) as u64);
                let r = rn_ratio(space, sh, t, 30, 10_000, seed).unwrap();
                count += 1;
                lo = lo.min(r.estimate);
                hi = hi.max(r.estimate);
                if !(0.23..=4.3).contains(&r.estimate) {
                    ok = false;
                    eprintln!("out of bounds: {name} shadow {ki} t {ti}: {}", r.estimate);
                }
            }
        }
    }
    let trivial = &spaces[0].1;
    let shadows = shadows_of_root(trivial).unwrap();
    let sh_a = shadows.iter().find(|s| s.letter == Letter::new(Axis::A, 1)).unwrap();
    let r_away = rn_ratio(trivial, sh_a, Letter::new(Axis::A, 1), 30, 10_000, 0x91).unwrap();
    let r_into = rn_ratio(trivial, sh_a, Letter::new(Axis::A, -1), 30, 10_000, 0x92).unwrap();
    ok &= (r_away.estimate - 1.0 / 3.0).abs() <= 3.0 * r_away.stderr;
    ok &= (r_into.estimate - 3.0).abs() <= 3.0 * r_into.stderr;
    report(
        9,
        ok,
        &format!(
            "{count} ratios in [{lo:.3}, {hi:.3}]; trivial {:.3}+-{:.3} vs 1/3, {:.3}+-{:.3} vs 3",
            r_away.estimate, r_away.stderr, r_into.estimate, r_into.stderr
        ),
    );
}

#[test]
fn criterion_10_covering_return_inequality() {
    let results: Vec<(f64, f64, f64, f64)> = (0..20u32)
        .into_par_iter()
        .map(|config| {
            let n = 2 + config % 3;
            let p = [0.2, 0.4, 0.6, 0.8][(config / 3) as usize % 4];
            let seed = derive_seed(0xCA, u64::from(config));
            let roots = conjugate_roots(n);
            let (axis, i) = roots[config as usize % roots.len()];
            let root = coset_walk_core::conjugate_vertex(axis, i);
            let base = CosetSpace::kn_conjugate(n, axis, i, DEFAULT_BUDGET).unwrap();
            let cover =
                CosetSpace::cover(n, root, CellSampler::new(seed, p).unwrap(), DEFAULT_BUDGET).unwrap();
            let walk_seed = derive_seed(0xCAB, u64::from(config));
            let rb = expected_returns(&base, base.root(), 200, 10_000, walk_seed);
            let rc = expected_returns(&cover, cover.root(), 200, 10_000, walk_seed);
            (rc.estimate, rc.stderr, rb.estimate, rb.stderr)
        })
        .collect();
    let ok = results.iter().all(|(ce, cs, be, bs)| *ce <= be + 3.0 * (cs * cs + bs * bs).sqrt());
    let worst = results
        .iter()
        .map(|(ce, _, be, _)| ce - be)
        .fold(f64::NEG_INFINITY, f64::max);
    report(10, ok, &format!("20 configurations, worst cover-base excess {worst:.4}"));
}

#[test]
fn criterion_11_brute_force_oracle() {
    let s = CosetSpace::trivial();
    let mu = rank2_measure();
    let mut ok = true;
    for n in 1..=6u32 {
        // Enumerate all 4^n letter paths and tally reduced endpoints.
        let mut counts: HashMap<Word, u64> = HashMap::new();
        let total = 4u64.pow(n);
        for code in 0..total {
            let mut c = code;
            let mut w = Word::empty();
            for _ in 0..n {
                w.push(Letter::ALL[(c % 4) as usize]);
                c /= 4;
            }
            *counts.entry(w).or_insert(0) += 1;
        }
        let r_brute = *counts.get(&Word::empty()).unwrap_or(&0) as f64 / total as f64;
        let h_brute: f64 = counts
            .values()
            .map(|&k| {
                let p = k as f64 / total as f64;
                -p * p.ln()
            })
            .sum();
        let r_dp = return_probabilities(&s, s.root(), &mu, n).unwrap()[n as usize - 1];
        let mut d = SparseDist::point(s.root());
        for _ in 0..n {
            d = coset_walk_core::evolve(&s, &d, &mu).unwrap();
        }
        let h_dp = shannon_entropy(&d);
        ok &= (r_brute - r_dp).abs() <= 1e-12 && (h_brute - h_dp).abs() <= 1e-12;
    }
    report(11, ok, "return probabilities and entropies match 4^n path enumeration, n <= 6");
}
