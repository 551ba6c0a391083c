//! Cross-module invariant suite backing the `verify` command: structural
//! checks on the automata, the generator family, coupling, and estimator
//! sanity, each reported as an independent pass/fail.

use crate::boundary::{hitting_probability, shadows_of_root};
use crate::cover::{loop_at, stabilizer_witness, CellSampler, CellStatus, LoopId};
use crate::entropy::{entropy_increments, evolve, IrsSpec, SparseDist};
use crate::error::Result;
use crate::group::{rank2_measure, Axis, Letter, Word};
use crate::rng::{step_letter, stream};
use crate::segment::SegmentVertex;
use crate::spaces::{balls_isomorphic, CosetSpace};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: impl Into<String>) -> CheckResult {
        CheckResult { name, passed: true, detail: detail.into() }
    }

    fn fail(name: &'static str, detail: impl Into<String>) -> CheckResult {
        CheckResult { name, passed: false, detail: detail.into() }
    }

    fn of(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckResult {
        CheckResult { name, passed, detail: detail.into() }
    }
}

fn test_spaces(budget: usize) -> Result<Vec<(String, CosetSpace)>> {
    let mut out = vec![
        ("trivial".to_string(), CosetSpace::trivial_with_budget(budget)),
        ("full".to_string(), CosetSpace::full_group()),
        ("zq:a".to_string(), CosetSpace::z_quotient(Axis::A)),
    ];
    for n in 1..=4 {
        out.push((format!("kn:{n}"), CosetSpace::kn_with_budget(n, budget)?));
    }
    out.push(("kn:3@a^1".to_string(), CosetSpace::kn_conjugate(3, Axis::A, 1, budget)?));
    for (p, seed) in [(0.3, 101u64), (0.7, 102)] {
        let sampler = CellSampler::new(seed, p)?;
        out.push((
            format!("cover:kn=2,p={p}"),
            CosetSpace::cover(2, SegmentVertex::root(), sampler, budget)?,
        ));
    }
    Ok(out)
}

/// step(step(v, l), l^-1) = v along random walks on every space kind.
pub fn check_right_action(budget: usize) -> Result<CheckResult> {
    for (name, space) in test_spaces(budget)? {
        let mut rng = stream(0xACC0, 0);
        let mut v = space.root();
        for _ in 0..500 {
            let l = step_letter(&mut rng);
            let u = space.step(v, l)?;
            if space.step(u, l.inverse())? != v {
                return Ok(CheckResult::fail("right-action", format!("violated on {name}")));
            }
            v = u;
        }
    }
    Ok(CheckResult::pass("right-action", "500-step walks on all space kinds"))
}

/// Every generator g h g^-1 of the K_n family stabilizes the root, for
/// g a word of up to two n-blocks and h = a^k b^r a^-k or b^k a^r b^-k.
pub fn check_kn_generators(budget: usize) -> Result<CheckResult> {
    let mut checked = 0usize;
    for n in 1..=4u32 {
        let space = CosetSpace::kn_with_budget(n, budget)?;
        let nn = i64::from(n);
        let mut blocks = vec![Word::empty()];
        let units: Vec<Word> = [(Axis::A, nn), (Axis::A, -nn), (Axis::B, nn), (Axis::B, -nn)]
            .iter()
            .map(|&(ax, d)| Word::letter_power(ax, d))
            .collect();
        blocks.extend(units.iter().cloned());
        for x in &units {
            for y in &units {
                blocks.push(x.concat(y));
            }
        }
        let mut hs = Vec::new();
        for k in 1..nn {
            for k in [k, -k] {
                for r in -3..=3i64 {
                    for (outer, inner) in [(Axis::A, Axis::B), (Axis::B, Axis::A)] {
                        let wing = Word::letter_power(outer, k);
                        hs.push(wing.concat(&Word::letter_power(inner, r)).concat(&wing.inverse()));
                    }
                }
            }
        }
        for g in &blocks {
            for h in &hs {
                let w = g.concat(h).concat(&g.inverse());
                if space.apply_word(space.root(), &w)? != space.root() {
                    return Ok(CheckResult::fail(
                        "kn-generators",
                        format!("ghg^-1 = {w} does not stabilize the K_{n} root"),
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(CheckResult::pass("kn-generators", format!("{checked} generators stabilize their roots")))
}

/// Transition outputs stay in canonical segment form along long random walks.
pub fn check_canonical_closure() -> CheckResult {
    for n in 1..=4u32 {
        let mut rng = stream(0xCA11, u64::from(n));
        let mut v = SegmentVertex::root();
        for _ in 0..10_000 {
            crate::segment::kn_step_in_place(n, &mut v, step_letter(&mut rng));
            if !v.is_canonical(n) {
                return CheckResult::fail("canonical-closure", format!("non-canonical {v} in K_{n}"));
            }
        }
    }
    CheckResult::pass("canonical-closure", "10^4-step walks for n = 1..4")
}

/// Radius-8 balls of every tree-like space kind have acyclic skeletons, and
/// no bigon is detected during construction.
pub fn check_treelike_balls(budget: usize) -> Result<CheckResult> {
    for (name, space) in test_spaces(budget)? {
        if name == "full" {
            continue;
        }
        let ball = space.ball(8)?;
        if !ball.is_treelike() {
            return Ok(CheckResult::fail("tree-like", format!("cycle in radius-8 ball of {name}")));
        }
    }
    Ok(CheckResult::pass("tree-like", "radius-8 balls acyclic, bigon-free"))
}

/// The one-point space: a single vertex fixed by all four letters.
pub fn check_full_group_shape() -> Result<CheckResult> {
    let space = CosetSpace::full_group();
    let ball = space.ball(5)?;
    let ok = ball.vertex_count() == 1;
    Ok(CheckResult::of("full-group-shape", ok, format!("{} vertex", ball.vertex_count())))
}

/// Figure-style local pattern of K_3: five vertices at radius 1, with one
/// loop on the other axis at each offset-1 neighbor.
pub fn check_kn_loop_pattern(budget: usize) -> Result<CheckResult> {
    let space = CosetSpace::kn_with_budget(3, budget)?;
    let ball = space.ball(1)?;
    if ball.vertex_count() != 5 {
        return Ok(CheckResult::fail("kn-loop-pattern", format!("{} vertices at radius 1", ball.vertex_count())));
    }
    for (axis, sign) in [(Axis::A, 1), (Axis::A, -1), (Axis::B, 1), (Axis::B, -1)] {
        let v = space.step(space.root(), Letter::new(axis, sign))?;
        let other = Letter::new(axis.other(), 1);
        if space.step(v, other)? != v || space.step(v, other.inverse())? != v {
            return Ok(CheckResult::fail("kn-loop-pattern", format!("missing loop at offset-{sign} {axis:?} vertex")));
        }
    }
    if space.step(space.root(), Letter::new(Axis::A, 1)).map(|v| v == space.root())? {
        return Ok(CheckResult::fail("kn-loop-pattern", "loop at the root".to_string()));
    }
    Ok(CheckResult::pass("kn-loop-pattern", "5 radius-1 vertices, loops on the other axis"))
}

/// A status function is monotonically coupled when every cell open at p stays
/// open at all larger p. Parametric so a p-dependent fixture can fail it.
pub fn check_monotone_coupling_with<F>(status_open: F, cells: &[LoopId], grid: &[f64]) -> bool
where
    F: Fn(&LoopId, f64) -> bool,
{
    cells.iter().all(|cell| {
        let mut was_open = false;
        for &p in grid {
            let open = status_open(cell, p);
            if was_open && !open {
                return false;
            }
            was_open = open;
        }
        true
    })
}

pub fn check_monotone_coupling() -> CheckResult {
    let mut cells = Vec::new();
    for n in [2u32, 3] {
        for k in 1..40i64 {
            for axis in [Axis::A, Axis::B] {
                let v = SegmentVertex::single(axis, k);
                if let Some(cell) = loop_at(n, &v) {
                    cells.push(cell);
                }
            }
        }
    }
    let grid = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
    let ok = check_monotone_coupling_with(
        |cell, p| CellSampler::new(0xC0_u64, p).unwrap().status(cell) == CellStatus::Open,
        &cells,
        &grid,
    );
    CheckResult::of("monotone-coupling", ok, format!("{} cells over {} thresholds", cells.len(), grid.len()))
}

/// p = 0 covers match their base, p = 1 covers match the free group, up to
/// labeled ball isomorphism at radius 8.
pub fn check_endpoint_identifications(budget: usize) -> Result<CheckResult> {
    for n in [2u32, 3] {
        let base = CosetSpace::kn_with_budget(n, budget)?;
        let closed = CosetSpace::cover(n, SegmentVertex::root(), CellSampler::new(5, 0.0)?, budget)?;
        if !balls_isomorphic(&closed, &base, 8)? {
            return Ok(CheckResult::fail("endpoints", format!("p=0 cover differs from K_{n} at radius 8")));
        }
        let open = CosetSpace::cover(n, SegmentVertex::root(), CellSampler::new(5, 1.0)?, budget)?;
        if !balls_isomorphic(&open, &CosetSpace::trivial_with_budget(budget), 8)? {
            return Ok(CheckResult::fail("endpoints", format!("p=1 cover of K_{n} differs from the free group")));
        }
    }
    Ok(CheckResult::pass("endpoints", "p=0 and p=1 covers match base and free group, n in {2,3}"))
}

/// g s g^-1 fixes the cover root iff the loop it bounds is filled.
pub fn check_stabilizer_witnesses(budget: usize) -> Result<CheckResult> {
    let mut checked = 0usize;
    for n in [2u32, 3] {
        for (p, seed) in [(0.3, 7u64), (0.7, 8)] {
            let sampler = CellSampler::new(seed, p)?;
            let cover = CosetSpace::cover(n, SegmentVertex::root(), sampler, budget)?;
            for k in 1..=6i64 {
                for axis in [Axis::A, Axis::B] {
                    for k in [k, -k] {
                        if k.rem_euclid(i64::from(n)) == 0 {
                            continue;
                        }
                        let g = Word::letter_power(axis, k);
                        let s = Letter::new(axis.other(), 1);
                        let cell = loop_at(n, &SegmentVertex::single(axis, k)).expect("loop cell");
                        let filled = sampler.status(&cell) == CellStatus::Filled;
                        if stabilizer_witness(&cover, &g, s)? != filled {
                            return Ok(CheckResult::fail(
                                "stabilizer-witness",
                                format!("witness mismatch at n={n}, p={p}, g={g}"),
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(CheckResult::pass("stabilizer-witness", format!("{checked} witnesses match cell statuses")))
}

/// Mass conservation and increment monotonicity of the exact DP.
pub fn check_entropy_invariants(budget: usize) -> Result<CheckResult> {
    let mu = rank2_measure();
    for (name, space) in test_spaces(budget)? {
        let mut d = SparseDist::point(space.root());
        for _ in 0..8 {
            d = evolve(&space, &d, &mu)?;
            if (d.total_mass() - 1.0).abs() > 1e-12 {
                return Ok(CheckResult::fail("entropy-dp", format!("mass leak on {name}")));
            }
        }
        let inc = entropy_increments(&space, space.root(), &mu, 8)?;
        if inc.windows(2).any(|w| w[1] > w[0] + 1e-9) {
            return Ok(CheckResult::fail("entropy-dp", format!("increments not monotone on {name}")));
        }
    }
    Ok(CheckResult::pass("entropy-dp", "mass conserved, increments nonincreasing to n=8"))
}

/// Per-sample coupled increments are nondecreasing in p under a shared seed.
pub fn check_coupled_increments(budget: usize) -> Result<CheckResult> {
    let mu = rank2_measure();
    let grid = [0.0, 0.5, 1.0];
    for i in 0..6u32 {
        let mut prev: Option<Vec<f64>> = None;
        for p in grid {
            let irs = IrsSpec::PercolationKn { n: 2, p };
            let spec = irs.sample_spec(33, i).expect("sample");
            let inc = crate::entropy::spec_increments(&spec, &mu, 6, budget)?;
            if let Some(lo) = &prev {
                if lo.iter().zip(&inc).any(|(a, b)| *a > b + 1e-9) {
                    return Ok(CheckResult::fail("coupled-increments", format!("sample {i} decreased at p={p}")));
                }
            }
            prev = Some(inc);
        }
    }
    Ok(CheckResult::pass("coupled-increments", "6 coupled samples, grid {0, 0.5, 1}"))
}

/// Symmetry of the four root shadows on the free group, and the shadow
/// partition absorbing almost all long walks.
pub fn check_shadow_statistics(budget: usize) -> Result<CheckResult> {
    let space = CosetSpace::trivial_with_budget(budget);
    let shadows = shadows_of_root(&space)?;
    let ests: Vec<_> = shadows
        .iter()
        .map(|sh| hitting_probability(&space, space.root(), sh, 60, 4000, 0x5AD0))
        .collect();
    for e in &ests {
        if (e.estimate - 0.25).abs() > 3.0 * e.stderr + 0.01 {
            return Ok(CheckResult::fail("shadow-statistics", format!("asymmetric shadow mass {}", e.estimate)));
        }
    }
    let covered: f64 = ests.iter().map(|e| e.estimate).sum();
    if covered < 0.99 {
        return Ok(CheckResult::fail("shadow-statistics", format!("only {covered:.3} of walks land in a shadow")));
    }
    Ok(CheckResult::pass("shadow-statistics", format!("symmetric; coverage {covered:.3} at n=60")))
}

/// The full suite, in a fixed order.
pub fn run_all(budget: usize) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_right_action(budget)?,
        check_kn_generators(budget)?,
        check_canonical_closure(),
        check_treelike_balls(budget)?,
        check_full_group_shape()?,
        check_kn_loop_pattern(budget)?,
        check_monotone_coupling(),
        check_endpoint_identifications(budget)?,
        check_stabilizer_witnesses(budget)?,
        check_entropy_invariants(budget)?,
        check_coupled_increments(budget)?,
        check_shadow_statistics(budget)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::DEFAULT_BUDGET;

    #[test]
    fn suite_passes() {
        for r in run_all(DEFAULT_BUDGET).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn broken_coupling_fixture_fails() {
        let cells: Vec<LoopId> =
            (1..20).filter_map(|k| loop_at(3, &SegmentVertex::single(Axis::A, k))).collect();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        // A p-dependent uniform breaks the shared-uniform coupling.
        let broken = |cell: &LoopId, p: f64| {
            CellSampler::new(p.to_bits(), p).unwrap().status(cell) == CellStatus::Open
        };
        assert!(!check_monotone_coupling_with(broken, &cells, &grid));
    }
}
