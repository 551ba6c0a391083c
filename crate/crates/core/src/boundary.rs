//! Shadows of the root, Monte Carlo hitting probabilities, the boundary-side
//! entropy estimator, and return-time diagnostics.
//!
//! On a tree-like space, a long walk that does not return to the root exits
//! through exactly one proper neighbor; the shadow of that neighbor collects
//! every vertex whose geodesic from the root starts there. Hitting
//! probabilities of shadows approximate harmonic measure, and the entropy
//! functional is recovered from likelihood ratios of shadow masses between
//! the root and its translates.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{stratified_summary, IrsSpec};
use crate::error::{Error, Result};
use crate::group::{Letter, StepMeasure};
use crate::rng::{derive_seed, step_letter, stream};
use crate::spaces::{CosetSpace, State, VertexId};

/// The clamp constant for likelihood-ratio logs: |ln(y/x)| <= ln 4 holds for
/// exact shadow masses by the Radon-Nikodym bounds, so clamping only tames
/// Monte Carlo noise.
pub const RHO_CLAMP: f64 = 1.386294361119890_6; // ln 4

/// A proper neighbor of the root together with the boundary piece behind it.
#[derive(Clone, Debug)]
pub struct Shadow {
    /// Letter stepping from the root to the anchor.
    pub letter: Letter,
    pub anchor: VertexId,
    anchor_state: State,
}

impl Shadow {
    pub fn anchor_state(&self) -> &State {
        &self.anchor_state
    }
}

/// The distinct proper neighbors of the root, one shadow each. Letters that
/// loop at the root are skipped, so the full-group space has no shadows.
pub fn shadows_of_root(space: &CosetSpace) -> Result<Vec<Shadow>> {
    let root = space.root();
    let mut out: Vec<Shadow> = Vec::with_capacity(4);
    for l in Letter::ALL {
        let v = space.step(root, l)?;
        if v == root || out.iter().any(|s| s.anchor == v) {
            continue;
        }
        out.push(Shadow { letter: l, anchor: v, anchor_state: space.state(v) });
    }
    Ok(out)
}

/// Whether the geodesic from the root to `v` leaves through the shadow's
/// anchor. The root itself belongs to no shadow.
pub fn shadow_membership(space: &CosetSpace, sh: &Shadow, v: VertexId) -> bool {
    let state = space.state(v);
    space.geodesic_first_step(space.root_state(), &state).as_ref() == Some(&sh.anchor_state)
}

/// A Monte Carlo point estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub walks: u32,
}

fn binomial_estimate(hits: u64, walks: u32) -> McEstimate {
    let p = hits as f64 / walks as f64;
    McEstimate { estimate: p, stderr: (p * (1.0 - p) / walks as f64).sqrt(), walks }
}

/// Runs one n-step walk from `start` and returns the final state. Walk `w`
/// under `seed` always consumes the same letter stream.
fn walk_endpoint(space: &CosetSpace, start: &State, n: u32, seed: u64, w: u32) -> State {
    let mut rng = stream(seed, u64::from(w));
    let mut state = start.clone();
    for _ in 0..n {
        space.step_state_in_place(&mut state, step_letter(&mut rng));
    }
    state
}

/// Index of the shadow whose anchor starts the root geodesic to `state`.
fn classify(space: &CosetSpace, shadows: &[Shadow], state: &State) -> Option<usize> {
    let first = space.geodesic_first_step(space.root_state(), state)?;
    shadows.iter().position(|s| s.anchor_state == first)
}

/// Probability that an n-step walk from `start` ends in the shadow.
pub fn hitting_probability(
    space: &CosetSpace,
    start: VertexId,
    sh: &Shadow,
    n: u32,
    walks: u32,
    seed: u64,
) -> McEstimate {
    let start_state = space.state(start);
    let mut hits = 0u64;
    for w in 0..walks {
        let end = walk_endpoint(space, &start_state, n, seed, w);
        if space.geodesic_first_step(space.root_state(), &end).as_ref() == Some(&sh.anchor_state) {
            hits += 1;
        }
    }
    binomial_estimate(hits, walks)
}

/// Likelihood-ratio estimate nu_{Kt^-1}(B_s) / nu_K(B_s): hitting probability
/// of the shadow from the translated root over the one from the root.
/// Degenerate when both estimates are statistically indistinguishable from
/// zero, or when only the denominator is.
pub fn rn_ratio(
    space: &CosetSpace,
    sh: &Shadow,
    t: Letter,
    n: u32,
    walks: u32,
    seed: u64,
) -> Result<McEstimate> {
    let translated = space.step_state(space.root_state(), t.inverse());
    let translated = space.intern(translated)?;
    let den = hitting_probability(space, space.root(), sh, n, walks, derive_seed(seed, 0));
    let num = hitting_probability(space, translated, sh, n, walks, derive_seed(seed, 1));
    if den.estimate <= 3.0 * den.stderr {
        return Err(Error::DegenerateRatio(format!(
            "denominator {} +- {} not separated from zero",
            den.estimate, den.stderr
        )));
    }
    let r = num.estimate / den.estimate;
    let rel = if num.estimate > 0.0 {
        ((num.stderr / num.estimate).powi(2) + (den.stderr / den.estimate).powi(2)).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate { estimate: r, stderr: r * rel, walks })
}

/// `rn_ratio` addressed by the letter of the shadow anchor. Errors when `s`
/// loops at the root (no such shadow).
pub fn rn_ratio_by_letters(
    space: &CosetSpace,
    s: Letter,
    t: Letter,
    n: u32,
    walks: u32,
    seed: u64,
) -> Result<McEstimate> {
    let shadows = shadows_of_root(space)?;
    let sh = shadows
        .iter()
        .find(|sh| sh.letter == s)
        .ok_or_else(|| Error::DegenerateRatio(format!("no shadow anchored at '{}'", s.symbol())))?;
    rn_ratio(space, sh, t, n, walks, seed)
}

/// F(x, y) = clamp(-x ln(y/x), -C, C) with the total extensions F(0, .) = 0
/// and F(x, 0) = C.
pub fn rho_f(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        RHO_CLAMP
    } else {
        (-x * (y / x).ln()).clamp(-RHO_CLAMP, RHO_CLAMP)
    }
}

/// The boundary-side entropy of one rooted space: sum over step letters t and
/// root shadows s of mu(t) F(x_s, y_{t,s}), with x and y finite-horizon
/// hitting probabilities. Returns (estimate, stderr); the estimate uses all
/// walks pooled and the standard error comes from batch means.
pub fn rho_for_space(
    space: &CosetSpace,
    mu: &StepMeasure,
    n: u32,
    walks: u32,
    seed: u64,
) -> Result<(f64, f64)> {
    let shadows = shadows_of_root(space)?;
    if shadows.is_empty() {
        return Ok((0.0, 0.0));
    }
    let weights = mu.letter_weights()?;
    let root_state = space.root_state().clone();
    let starts: Vec<State> = std::iter::once(root_state.clone())
        .chain(weights.iter().map(|(t, _)| space.step_state(&root_state, t.inverse())))
        .collect();
    let batches = 20.min(walks.max(1)) as usize;
    // counts[start][shadow][batch]
    let mut counts = vec![vec![vec![0u64; batches]; shadows.len()]; starts.len()];
    for (si, start) in starts.iter().enumerate() {
        let start_seed = derive_seed(seed, si as u64);
        for w in 0..walks {
            let end = walk_endpoint(space, start, n, start_seed, w);
            if let Some(k) = classify(space, &shadows, &end) {
                counts[si][k][w as usize % batches] += 1;
            }
        }
    }
    let per_walks = |batch: Option<usize>| -> f64 {
        match batch {
            None => walks as f64,
            Some(b) => ((walks as usize + batches - 1 - b) / batches) as f64,
        }
    };
    let rho_of = |batch: Option<usize>| -> f64 {
        let m = per_walks(batch);
        let prob = |si: usize, k: usize| match batch {
            None => counts[si][k].iter().sum::<u64>() as f64 / m,
            Some(b) => counts[si][k][b] as f64 / m,
        };
        let mut total = 0.0;
        for (ti, (_, wt)) in weights.iter().enumerate() {
            for k in 0..shadows.len() {
                total += wt * rho_f(prob(0, k), prob(1 + ti, k));
            }
        }
        total
    };
    let estimate = rho_of(None);
    let stderr = if batches >= 2 {
        let vals: Vec<f64> = (0..batches).map(|b| rho_of(Some(b))).collect();
        let mean = vals.iter().sum::<f64>() / batches as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
        (var / batches as f64).sqrt()
    } else {
        0.0
    };
    Ok((estimate, stderr))
}

/// A lambda-averaged boundary-side entropy estimate.
#[derive(Clone, Debug, Serialize)]
pub struct RhoEstimate {
    pub irs: IrsSpec,
    pub n: u32,
    pub walks: u32,
    pub samples: u32,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Averages `rho_for_space` over the IRS: exactly over atoms when the law is
/// finitely supported, otherwise over `samples` stratified percolation draws
/// (sample layout shared with the increment estimator). Deterministic in
/// (irs, n, walks, samples, master_seed) for any thread count.
pub fn rho_entropy_estimate(
    irs: &IrsSpec,
    mu: &StepMeasure,
    n: u32,
    walks: u32,
    samples: u32,
    master_seed: u64,
    budget: usize,
) -> Result<RhoEstimate> {
    let (estimate, stderr, effective_samples) = match irs.atoms() {
        Some(atoms) => {
            let mut mean = 0.0;
            let mut se2 = 0.0;
            for (k, (w, spec)) in atoms.iter().enumerate() {
                let space = spec.build(budget)?;
                let (e, se) = rho_for_space(&space, mu, n, walks, derive_seed(master_seed, k as u64))?;
                mean += w * e;
                se2 += (w * se).powi(2);
            }
            (mean, se2.sqrt(), atoms.len() as u32)
        }
        None => {
            let per_sample: Vec<(f64, f64)> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let spec = irs.sample_spec(master_seed, i).expect("percolation sample");
                    let space = spec
                        .build(budget)
                        .map_err(|e| Error::Sample { index: i as usize, source: Box::new(e) })?;
                    rho_for_space(&space, mu, n, walks, derive_seed(master_seed, 2 * u64::from(i) + 1))
                        .map_err(|e| Error::Sample { index: i as usize, source: Box::new(e) })
                })
                .collect::<Result<_>>()?;
            let strata: Vec<usize> = (0..samples).map(|i| irs.sample_stratum(i).unwrap()).collect();
            let num_strata = strata.iter().copied().max().map_or(1, |m| m + 1);
            let vals: Vec<Vec<f64>> = per_sample.iter().map(|(e, _)| vec![*e]).collect();
            let (mean, se) = stratified_summary(&vals, &strata, num_strata, 1);
            // Within-sample walk noise, with each sample's stratum weight.
            let mut stratum_size = vec![0usize; num_strata];
            for &s in &strata {
                stratum_size[s] += 1;
            }
            let within: f64 = per_sample
                .iter()
                .zip(&strata)
                .map(|((_, se_i), &s)| (se_i / (num_strata * stratum_size[s]) as f64).powi(2))
                .sum();
            (mean[0], (se[0].powi(2) + within).sqrt(), samples)
        }
    };
    Ok(RhoEstimate { irs: irs.clone(), n, walks, samples: effective_samples, seed: master_seed, estimate, stderr })
}

/// Exact return probabilities R_1..R_m by sparse convolution.
pub fn return_probabilities(
    space: &CosetSpace,
    start: VertexId,
    mu: &StepMeasure,
    m_max: u32,
) -> Result<Vec<f64>> {
    use crate::entropy::{evolve, SparseDist};
    let mut d = SparseDist::point(start);
    let mut out = Vec::with_capacity(m_max as usize);
    for _ in 0..m_max {
        d = evolve(space, &d, mu)?;
        out.push(d.mass_at(start));
    }
    Ok(out)
}

/// Monte Carlo lower bound for R_{>=n}: fraction of walks revisiting `start`
/// at some time in [n, horizon]. Truncation at `horizon` only loses mass.
pub fn tail_return_estimate(
    space: &CosetSpace,
    start: VertexId,
    n: u32,
    horizon: u32,
    walks: u32,
    seed: u64,
) -> McEstimate {
    debug_assert!(horizon >= n && n >= 1);
    let start_state = space.state(start);
    let mut hits = 0u64;
    for w in 0..walks {
        let mut rng = stream(seed, u64::from(w));
        let mut state = start_state.clone();
        for m in 1..=horizon {
            space.step_state_in_place(&mut state, step_letter(&mut rng));
            if m >= n && state == start_state {
                hits += 1;
                break;
            }
        }
    }
    binomial_estimate(hits, walks)
}

/// Monte Carlo mean of the number of visits to `start` in [0, horizon]
/// (counting time 0, so the mean is at least 1).
pub fn expected_returns(
    space: &CosetSpace,
    start: VertexId,
    horizon: u32,
    walks: u32,
    seed: u64,
) -> McEstimate {
    let start_state = space.state(start);
    let mut sum = 0.0;
    let mut sq = 0.0;
    for w in 0..walks {
        let mut rng = stream(seed, u64::from(w));
        let mut state = start_state.clone();
        let mut visits = 1u64;
        for _ in 0..horizon {
            space.step_state_in_place(&mut state, step_letter(&mut rng));
            if state == start_state {
                visits += 1;
            }
        }
        sum += visits as f64;
        sq += (visits * visits) as f64;
    }
    let mean = sum / walks as f64;
    let var = (sq / walks as f64 - mean * mean).max(0.0);
    let stderr = if walks >= 2 {
        (var / (walks - 1) as f64).sqrt()
    } else {
        0.0
    };
    McEstimate { estimate: mean, stderr, walks }
}

/// Bundled return-time diagnostics for one (space, start).
#[derive(Clone, Debug, Serialize)]
pub struct ReturnStats {
    pub exact_r: Vec<f64>,
    pub tail_estimate: McEstimate,
    pub expected_returns: McEstimate,
}

#[allow(clippy::too_many_arguments)]
pub fn return_stats(
    space: &CosetSpace,
    start: VertexId,
    mu: &StepMeasure,
    m_max: u32,
    tail_n: u32,
    horizon: u32,
    walks: u32,
    seed: u64,
) -> Result<ReturnStats> {
    Ok(ReturnStats {
        exact_r: return_probabilities(space, start, mu, m_max)?,
        tail_estimate: tail_return_estimate(space, start, tail_n, horizon, walks, derive_seed(seed, 0)),
        expected_returns: expected_returns(space, start, horizon, walks, derive_seed(seed, 1)),
    })
}
