//! Exact n-step distribution evolution, Shannon entropy, and the increment
//! estimator for Furstenberg entropy averaged over an invariant random
//! subgroup.
//!
//! Entropies are in nats throughout. All n-step masses are dyadic rationals
//! k/4^n, exactly representable in an f64 for the walk lengths used here, so
//! the dynamic programming is exact up to the final logarithms. The averaged
//! entropy increments are monotone nonincreasing and converge to the entropy
//! from above, so a finite-horizon increment is always an upper estimate.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Axis, StepMeasure};
use crate::rng::derive_seed;
use crate::spaces::{conjugate_roots, CosetSpace, SpaceSpec, VertexId};

/// Finitely supported probability distribution over interned vertices.
/// Keys are kept ordered so that all accumulation is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDist {
    mass: BTreeMap<VertexId, f64>,
}

impl SparseDist {
    pub fn point(v: VertexId) -> SparseDist {
        SparseDist { mass: BTreeMap::from([(v, 1.0)]) }
    }

    pub fn mass_at(&self, v: VertexId) -> f64 {
        self.mass.get(&v).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.mass.iter().map(|(&v, &m)| (v, m))
    }
}

/// One convolution step: pushes the distribution forward through the four
/// letter transitions with the uniform step weights.
pub fn evolve(space: &CosetSpace, d: &SparseDist, mu: &StepMeasure) -> Result<SparseDist> {
    let weights = mu.letter_weights()?;
    let mut out: BTreeMap<VertexId, f64> = BTreeMap::new();
    for (v, m) in d.iter() {
        for (l, w) in weights {
            let u = space.step(v, l)?;
            *out.entry(u).or_insert(0.0) += m * w;
        }
    }
    Ok(SparseDist { mass: out })
}

/// Natural-log Shannon entropy; zero for a point mass (0 log 0 = 0).
pub fn shannon_entropy(d: &SparseDist) -> f64 {
    let mut h = 0.0;
    for (_, m) in d.iter() {
        if m > 0.0 {
            h -= m * m.ln();
        }
    }
    h
}

/// The exact increment sequence H(mu_K^n) - H(mu_K^{n-1}) for n = 1..n_max,
/// from the point mass at `start` (H of step 0 is zero).
pub fn entropy_increments(
    space: &CosetSpace,
    start: VertexId,
    mu: &StepMeasure,
    n_max: u32,
) -> Result<Vec<f64>> {
    let mut d = SparseDist::point(start);
    let mut h_prev = 0.0;
    let mut increments = Vec::with_capacity(n_max as usize);
    for _ in 0..n_max {
        d = evolve(space, &d, mu)?;
        debug_assert!((d.total_mass() - 1.0).abs() <= 1e-12);
        let h = shannon_entropy(&d);
        increments.push(h - h_prev);
        h_prev = h;
    }
    Ok(increments)
}

/// Supported invariant-random-subgroup laws.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum IrsSpec {
    /// Dirac mass on the trivial subgroup: the free group itself.
    TrivialSubgroup,
    /// Dirac mass on the full group: the one-point coset space.
    FullGroup,
    /// Equal mixture of the two normal closures killing one generator each;
    /// both quotients are the integers.
    ZQuotientMix,
    /// Uniform on the 2n-1 conjugates of K_n.
    ConjClassKn { n: u32 },
    /// K_n conjugates with an independent Bernoulli(p) percolation
    /// configuration pushed through the covering construction.
    PercolationKn { n: u32, p: f64 },
}

impl IrsSpec {
    /// Exact atomic decomposition, when the law is finitely supported and
    /// deterministic. `None` for the percolation family.
    pub fn atoms(&self) -> Option<Vec<(f64, SpaceSpec)>> {
        match self {
            IrsSpec::TrivialSubgroup => Some(vec![(1.0, SpaceSpec::Trivial)]),
            IrsSpec::FullGroup => Some(vec![(1.0, SpaceSpec::FullGroup)]),
            IrsSpec::ZQuotientMix => Some(vec![
                (0.5, SpaceSpec::ZQuotient { kill: Axis::A }),
                (0.5, SpaceSpec::ZQuotient { kill: Axis::B }),
            ]),
            IrsSpec::ConjClassKn { n } => {
                let roots = conjugate_roots(*n);
                let w = 1.0 / roots.len() as f64;
                Some(
                    roots
                        .into_iter()
                        .map(|root| (w, SpaceSpec::Kn { n: *n, root: Some(root) }))
                        .collect(),
                )
            }
            IrsSpec::PercolationKn { .. } => None,
        }
    }

    /// Stratum (conjugate-root index) of a percolation sample.
    pub fn sample_stratum(&self, index: u32) -> Option<usize> {
        match self {
            IrsSpec::PercolationKn { n, .. } => Some(index as usize % (2 * *n as usize - 1)),
            _ => None,
        }
    }

    /// The rooted cover drawn for percolation sample `index`. The conjugate
    /// root cycles through the 2n-1 conjugates; the sampler seed depends on
    /// (master_seed, index) only, never on p, so a shared master seed couples
    /// configurations monotonically across p.
    pub fn sample_spec(&self, master_seed: u64, index: u32) -> Option<SpaceSpec> {
        match self {
            IrsSpec::PercolationKn { n, p } => {
                let roots = conjugate_roots(*n);
                let root = roots[index as usize % roots.len()];
                let seed = derive_seed(master_seed, 2 * u64::from(index));
                Some(SpaceSpec::Cover { n: *n, p: *p, seed, root: Some(root) })
            }
            _ => None,
        }
    }
}

/// An averaged increment estimate. `point_estimate` is the last increment,
/// an upper-biased estimate of the Furstenberg entropy (the true value is the
/// infimum of the increment sequence).
#[derive(Clone, Debug, Serialize)]
pub struct EntropyEstimate {
    pub irs: IrsSpec,
    pub n_max: u32,
    pub samples: u32,
    pub seed: u64,
    pub increments: Vec<f64>,
    pub stderr: Vec<f64>,
    pub estimate: f64,
}

/// Exact increments for one rooted space description.
pub fn spec_increments(spec: &SpaceSpec, mu: &StepMeasure, n_max: u32, budget: usize) -> Result<Vec<f64>> {
    let space = spec.build(budget)?;
    let root = space.root();
    entropy_increments(&space, root, mu, n_max)
}

/// The averaged increment sequence for an IRS.
///
/// Atomic laws are averaged exactly over their atoms and `samples` is
/// ignored. The percolation family draws `samples` rooted covers, stratified
/// over the conjugate roots with exact stratum weights 1/(2n-1), which makes
/// the p = 0 and p = 1 endpoints reduce to the corresponding exact atomic
/// averages. The result is bit-identical for a fixed (irs, n_max, samples,
/// master_seed) regardless of thread count.
pub fn irs_entropy_estimate(
    irs: &IrsSpec,
    mu: &StepMeasure,
    n_max: u32,
    samples: u32,
    master_seed: u64,
    budget: usize,
) -> Result<EntropyEstimate> {
    let (increments, stderr, effective_samples) = match irs.atoms() {
        Some(atoms) => {
            let mut acc = vec![0.0; n_max as usize];
            for (w, spec) in &atoms {
                let inc = spec_increments(spec, mu, n_max, budget)?;
                for (a, x) in acc.iter_mut().zip(inc) {
                    *a += w * x;
                }
            }
            (acc, vec![0.0; n_max as usize], atoms.len() as u32)
        }
        None => {
            let per_sample: Vec<Vec<f64>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let spec = irs.sample_spec(master_seed, i).expect("percolation sample");
                    spec_increments(&spec, mu, n_max, budget)
                        .map_err(|e| Error::Sample { index: i as usize, source: Box::new(e) })
                })
                .collect::<Result<_>>()?;
            let strata: Vec<usize> = (0..samples).map(|i| irs.sample_stratum(i).unwrap()).collect();
            let num_strata = strata.iter().copied().max().map_or(1, |m| m + 1);
            let (mean, se) = stratified_summary(&per_sample, &strata, num_strata, n_max as usize);
            (mean, se, samples)
        }
    };
    let estimate = increments.last().copied().unwrap_or(0.0);
    Ok(EntropyEstimate {
        irs: irs.clone(),
        n_max,
        samples: effective_samples,
        seed: master_seed,
        increments,
        stderr,
        estimate,
    })
}

/// Mean and standard error of a per-sample vector statistic under stratified
/// sampling with equal stratum weights. Accumulation runs in fixed sample
/// order, so the result does not depend on how samples were computed.
pub(crate) fn stratified_summary(
    per_sample: &[Vec<f64>],
    strata: &[usize],
    num_strata: usize,
    len: usize,
) -> (Vec<f64>, Vec<f64>) {
    let w = 1.0 / num_strata as f64;
    let mut mean = vec![0.0; len];
    let mut se2 = vec![0.0; len];
    for c in 0..num_strata {
        let members: Vec<&Vec<f64>> = per_sample
            .iter()
            .zip(strata)
            .filter(|(_, &s)| s == c)
            .map(|(v, _)| v)
            .collect();
        let m = members.len();
        if m == 0 {
            continue;
        }
        for j in 0..len {
            let mc = members.iter().map(|v| v[j]).sum::<f64>() / m as f64;
            mean[j] += w * mc;
            if m >= 2 {
                let var = members.iter().map(|v| (v[j] - mc).powi(2)).sum::<f64>() / (m - 1) as f64;
                se2[j] += w * w * var / m as f64;
            }
        }
    }
    (mean, se2.into_iter().map(f64::sqrt).collect())
}

/// The maximal Furstenberg entropy of the rank-2 uniform walk: (1/2) ln 3.
///
/// Closed form of the boundary-hitting formula on the trivial subgroup: the
/// four shadows each carry boundary mass 1/4 and the one-step likelihood
/// ratios are 1/3 (away from the shadow) and 3 (into it), from the
/// first-passage probability q = 1/3 of the distance-to-root chain.
pub fn hmax_reference() -> f64 {
    0.5 * 3.0_f64.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::rank2_measure;
    use crate::spaces::DEFAULT_BUDGET;

    #[test]
    fn evolve_on_trivial_space() {
        let s = CosetSpace::trivial();
        let mu = rank2_measure();
        let d = evolve(&s, &SparseDist::point(s.root()), &mu).unwrap();
        assert_eq!(d.support_len(), 4);
        for (_, m) in d.iter() {
            assert_eq!(m, 0.25);
        }
        assert_eq!(d.total_mass(), 1.0);
    }

    #[test]
    fn evolve_on_full_group_is_identity() {
        let s = CosetSpace::full_group();
        let mu = rank2_measure();
        let d = evolve(&s, &SparseDist::point(s.root()), &mu).unwrap();
        assert_eq!(d.support_len(), 1);
        assert_eq!(d.mass_at(s.root()), 1.0);
    }

    #[test]
    fn evolve_on_k3_from_loop_vertex() {
        use crate::group::LETTER_A;
        let s = CosetSpace::kn(3).unwrap();
        let mu = rank2_measure();
        let a1 = s.step(s.root(), LETTER_A).unwrap();
        let d = evolve(&s, &SparseDist::point(a1), &mu).unwrap();
        // b and b^-1 loop, a moves out, a^-1 cancels back to the root.
        assert_eq!(d.mass_at(a1), 0.5);
        assert_eq!(d.mass_at(s.root()), 0.25);
        let a2 = s.step(a1, LETTER_A).unwrap();
        assert_eq!(d.mass_at(a2), 0.25);
    }

    #[test]
    fn entropy_values() {
        let s = CosetSpace::trivial();
        let mu = rank2_measure();
        assert_eq!(shannon_entropy(&SparseDist::point(s.root())), 0.0);
        let d1 = evolve(&s, &SparseDist::point(s.root()), &mu).unwrap();
        assert!((shannon_entropy(&d1) - 4.0_f64.ln()).abs() < 1e-12);
        // Brute-force two-step entropy: mass 1/4 at the root, 1/16 on each of
        // the twelve reduced two-letter words.
        let d2 = evolve(&s, &d1, &mu).unwrap();
        let expected = -(0.25 * 0.25_f64.ln()) - 12.0 * (0.0625 * 0.0625_f64.ln());
        assert!((shannon_entropy(&d2) - expected).abs() < 1e-12);
        assert!((expected - 2.426015).abs() < 1e-6);
    }

    #[test]
    fn increments_on_trivial_space() {
        let s = CosetSpace::trivial();
        let inc = entropy_increments(&s, s.root(), &rank2_measure(), 2).unwrap();
        assert!((inc[0] - 4.0_f64.ln()).abs() < 1e-12);
        assert!((inc[1] - 1.039721).abs() < 1e-6);
    }

    #[test]
    fn full_group_estimate_is_zero() {
        let est = irs_entropy_estimate(&IrsSpec::FullGroup, &rank2_measure(), 8, 1, 0, DEFAULT_BUDGET).unwrap();
        assert!(est.increments.iter().all(|&d| d == 0.0));
        assert!(est.stderr.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn percolation_at_p1_matches_trivial_exactly() {
        let mu = rank2_measure();
        let trivial = irs_entropy_estimate(&IrsSpec::TrivialSubgroup, &mu, 6, 1, 0, DEFAULT_BUDGET).unwrap();
        let perc = irs_entropy_estimate(
            &IrsSpec::PercolationKn { n: 2, p: 1.0 },
            &mu,
            6,
            6,
            123,
            DEFAULT_BUDGET,
        )
        .unwrap();
        for (a, b) in trivial.increments.iter().zip(&perc.increments) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn estimate_is_deterministic() {
        let mu = rank2_measure();
        let irs = IrsSpec::PercolationKn { n: 2, p: 0.4 };
        let a = irs_entropy_estimate(&irs, &mu, 5, 9, 77, DEFAULT_BUDGET).unwrap();
        let b = irs_entropy_estimate(&irs, &mu, 5, 9, 77, DEFAULT_BUDGET).unwrap();
        assert_eq!(a.increments, b.increments);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn hmax_value() {
        assert!((hmax_reference() - 0.5493061443).abs() < 1e-9);
    }
}
