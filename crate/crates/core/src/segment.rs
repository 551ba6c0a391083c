//! Canonical coset representatives for the K_n family.
//!
//! A coset of K_n is represented by an alternating sequence of axis segments.
//! Reading left to right, the segments spell a word a^{d1} b^{d2} a^{d3} ...
//! where every displacement except possibly the last is a multiple of n.
//! The empty sequence is the root coset.

use std::fmt;

use crate::group::{Axis, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub axis: Axis,
    /// Nonzero signed displacement along the axis.
    pub disp: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentVertex(Vec<Segment>);

impl SegmentVertex {
    pub fn root() -> SegmentVertex {
        SegmentVertex(Vec::new())
    }

    pub fn single(axis: Axis, disp: i64) -> SegmentVertex {
        debug_assert!(disp != 0);
        SegmentVertex(vec![Segment { axis, disp }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Segment> {
        self.0.last().copied()
    }

    /// Graph distance to the root coset (the segment word is a geodesic).
    pub fn depth(&self) -> u64 {
        self.0.iter().map(|s| s.disp.unsigned_abs()).sum()
    }

    /// Checks the canonical-form invariants for the space parameter `n`.
    pub fn is_canonical(&self, n: u32) -> bool {
        let n = i64::from(n);
        let k = self.0.len();
        for (i, seg) in self.0.iter().enumerate() {
            if seg.disp == 0 {
                return false;
            }
            if i + 1 < k {
                if seg.axis == self.0[i + 1].axis {
                    return false;
                }
                if seg.disp % n != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// One unit step toward the root: shrinks the last displacement by 1.
    /// Returns `None` at the root.
    pub fn parent(&self) -> Option<SegmentVertex> {
        let mut v = self.clone();
        let last = v.0.last_mut()?;
        if last.disp > 0 {
            last.disp -= 1;
        } else {
            last.disp += 1;
        }
        if last.disp == 0 {
            v.0.pop();
        }
        Some(v)
    }

    /// The vertices of the geodesic from the root coset to `self`, starting
    /// with the root and ending with `self`.
    pub fn path_from_root(&self) -> Vec<SegmentVertex> {
        let mut path = Vec::with_capacity(self.depth() as usize + 1);
        let mut cur = self.clone();
        path.push(cur.clone());
        while let Some(p) = cur.parent() {
            path.push(p.clone());
            cur = p;
        }
        path.reverse();
        path
    }
}

impl fmt::Display for SegmentVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "[]");
        }
        write!(f, "[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}{:+}", s.axis.symbol(), s.disp)?;
        }
        write!(f, "]")
    }
}

/// Transition of the K_n Schreier automaton. Mutates `v` in place and returns
/// false exactly when the letter loops at `v`.
///
/// Rules for letter t = (axis, sign) at vertex V:
///   (i)   V empty: start a new segment (axis, sign);
///   (ii)  last segment on the same axis: shift its displacement by sign,
///         dropping the segment if it reaches zero;
///   (iii) different axis and the last displacement is a multiple of n:
///         branch, appending a new segment;
///   (iv)  different axis otherwise: loop, V unchanged.
pub fn kn_step_in_place(n: u32, v: &mut SegmentVertex, t: Letter) -> bool {
    let eps = i64::from(t.sign);
    match v.0.last_mut() {
        None => {
            v.0.push(Segment { axis: t.axis, disp: eps });
            true
        }
        Some(last) if last.axis == t.axis => {
            last.disp += eps;
            if last.disp == 0 {
                v.0.pop();
            }
            true
        }
        Some(last) => {
            if last.disp % i64::from(n) == 0 {
                v.0.push(Segment { axis: t.axis, disp: eps });
                true
            } else {
                false
            }
        }
    }
}

pub fn kn_step(n: u32, v: &SegmentVertex, t: Letter) -> SegmentVertex {
    let mut out = v.clone();
    kn_step_in_place(n, &mut out, t);
    out
}
