//! Percolated covering spaces of the K_n coset graphs.
//!
//! Every loop of the base graph carries a 1-gon 2-cell. A seeded keyed hash
//! assigns each cell one uniform variate; the cell is in the percolation
//! configuration ("open") when the variate falls below p. Open loops unwind in
//! the universal cover of the base complex minus the configuration, filled
//! loops stay loops. Because the base minus its loops is a tree, a cover
//! vertex is fully described by its reduced loop-crossing word together with a
//! base vertex.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{Axis, Letter, Word};
use crate::segment::{kn_step_in_place, SegmentVertex};
use crate::spaces::CosetSpace;

/// The 2-cell filling the loop at `base` labeled by `axis`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopId {
    pub base: SegmentVertex,
    pub axis: Axis,
}

impl LoopId {
    /// Fixed byte encoding used for hashing: segment count as u64 LE, then
    /// (axis byte, displacement as i64 LE) per segment, then the loop axis
    /// byte. Reproducible bit-for-bit across runs and platforms.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let segs = self.base.segments();
        let mut out = Vec::with_capacity(8 + 9 * segs.len() + 1);
        out.extend_from_slice(&(segs.len() as u64).to_le_bytes());
        for s in segs {
            out.push(axis_byte(s.axis));
            out.extend_from_slice(&s.disp.to_le_bytes());
        }
        out.push(axis_byte(self.axis));
        out
    }
}

fn axis_byte(a: Axis) -> u8 {
    match a {
        Axis::A => 0,
        Axis::B => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    /// The cell is in the configuration: removed from the complex, so its
    /// loop unwinds in the cover.
    Open,
    /// The cell survives; the loop stays a loop upstairs.
    Filled,
}

/// Lazy Bernoulli(p) status sampler over 2-cells.
///
/// The uniform variate depends on (seed, cell) only, never on p, so statuses
/// couple monotonically across p: open at p implies open at every q >= p.
/// The hash is SHA-256 over seed and the canonical cell bytes, truncated to
/// 64 bits and mapped to [0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellSampler {
    seed: u64,
    p: f64,
}

impl CellSampler {
    pub fn new(seed: u64, p: f64) -> Result<CellSampler> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(CellSampler { seed, p })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn uniform(&self, cell: &LoopId) -> f64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(cell.canonical_bytes());
        let digest = h.finalize();
        let raw = u64::from_le_bytes(digest[..8].try_into().unwrap());
        raw as f64 / 18_446_744_073_709_551_616.0
    }

    pub fn status(&self, cell: &LoopId) -> CellStatus {
        if self.uniform(cell) < self.p {
            CellStatus::Open
        } else {
            CellStatus::Filled
        }
    }
}

/// The loop carried by a K_n vertex, if any: present exactly when the last
/// segment displacement is not a multiple of n, labeled by the other axis.
/// Vertices of the K_n family carry at most one loop axis.
pub fn loop_at(n: u32, v: &SegmentVertex) -> Option<LoopId> {
    let last = v.last()?;
    if last.disp % i64::from(n) == 0 {
        return None;
    }
    Some(LoopId { base: v.clone(), axis: last.axis.other() })
}

/// A signed crossing of an open loop.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub loop_id: LoopId,
    pub sign: i8,
}

/// A vertex of the percolated universal cover: a reduced word of open-loop
/// crossings plus the base vertex underneath.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverVertex {
    pub crossings: Vec<Crossing>,
    pub base: SegmentVertex,
}

impl CoverVertex {
    pub fn new_root(base: SegmentVertex) -> CoverVertex {
        CoverVertex { crossings: Vec::new(), base }
    }
}

/// Cover transition: base moves pass through; a filled loop stays put; an
/// open loop appends a signed crossing with reduction.
pub fn cover_step_in_place(
    n: u32,
    sampler: &CellSampler,
    cache: &mut HashMap<LoopId, bool>,
    v: &mut CoverVertex,
    t: Letter,
) {
    if kn_step_in_place(n, &mut v.base, t) {
        return;
    }
    // The letter loops at the base vertex; in the K_n family this happens
    // exactly at loop-carrying vertices, on the non-segment axis.
    let cell = loop_at(n, &v.base).expect("loop transition without a loop cell");
    debug_assert_eq!(cell.axis, t.axis);
    let open = *cache
        .entry(cell.clone())
        .or_insert_with(|| sampler.status(&cell) == CellStatus::Open);
    if !open {
        return;
    }
    match v.crossings.last() {
        Some(last) if last.loop_id == cell && last.sign == -t.sign => {
            v.crossings.pop();
        }
        _ => v.crossings.push(Crossing { loop_id: cell, sign: t.sign }),
    }
}

/// Tests whether g s g^-1 stabilizes the cover root, i.e. whether applying its
/// letters from the root returns there. Errors unless the base path of `g`
/// ends at a vertex looping on the axis of `s`.
pub fn stabilizer_witness(cover: &CosetSpace, g: &Word, s: Letter) -> Result<bool> {
    let (n, root) = cover.cover_root().ok_or(Error::WrongSpaceKind("stabilizer_witness needs a cover space"))?;
    let mut base_end = root.base.clone();
    for &l in g.letters() {
        kn_step_in_place(n, &mut base_end, l);
    }
    match loop_at(n, &base_end) {
        Some(cell) if cell.axis == s.axis => {}
        _ => return Err(Error::NoLoopAtVertex),
    }
    let mut state = crate::spaces::State::Cover(root.clone());
    for &l in g.letters() {
        cover.step_state_in_place(&mut state, l);
    }
    cover.step_state_in_place(&mut state, s);
    for &l in g.inverse().letters() {
        cover.step_state_in_place(&mut state, l);
    }
    Ok(state == crate::spaces::State::Cover(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::LETTER_A;

    fn v_a(k: i64) -> SegmentVertex {
        SegmentVertex::single(Axis::A, k)
    }

    #[test]
    fn loop_pattern_matches_offsets() {
        assert_eq!(loop_at(3, &v_a(1)), Some(LoopId { base: v_a(1), axis: Axis::B }));
        assert_eq!(loop_at(3, &SegmentVertex::root()), None);
        assert_eq!(loop_at(3, &v_a(3)), None);
    }

    #[test]
    fn sampler_endpoints_and_determinism() {
        let cell = LoopId { base: v_a(1), axis: Axis::B };
        assert_eq!(CellSampler::new(7, 0.0).unwrap().status(&cell), CellStatus::Filled);
        assert_eq!(CellSampler::new(7, 1.0).unwrap().status(&cell), CellStatus::Open);
        let s = CellSampler::new(7, 0.3).unwrap();
        assert_eq!(s.status(&cell), s.status(&cell));
        assert!(CellSampler::new(0, 1.5).is_err());
    }

    #[test]
    fn monotone_coupling_of_uniforms() {
        for k in 1..50 {
            let cell = LoopId { base: v_a(k), axis: Axis::B };
            let u = CellSampler::new(11, 0.5).unwrap().uniform(&cell);
            let mut was_open = false;
            for p in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0] {
                let open = CellSampler::new(11, p).unwrap().status(&cell) == CellStatus::Open;
                assert_eq!(open, u < p);
                assert!(open || !was_open || p == 0.0);
                was_open = open;
            }
        }
    }

    #[test]
    fn open_loop_crossing_reduces() {
        let sampler = CellSampler::new(3, 1.0).unwrap();
        let mut cache = HashMap::new();
        let mut v = CoverVertex::new_root(v_a(1));
        let b = Letter::new(Axis::B, 1);
        cover_step_in_place(3, &sampler, &mut cache, &mut v, b);
        assert_eq!(v.crossings.len(), 1);
        assert_eq!(v.base, v_a(1));
        cover_step_in_place(3, &sampler, &mut cache, &mut v, b.inverse());
        assert!(v.crossings.is_empty());
        // Base moves pass through untouched.
        cover_step_in_place(3, &sampler, &mut cache, &mut v, LETTER_A);
        assert_eq!(v.base, v_a(2));
        assert!(v.crossings.is_empty());
    }
}
