//! Rooted deterministic labeled automata realizing the coset spaces K\G.
//!
//! Each space is a lazy automaton over canonical vertex states plus an
//! append-only interning table mapping states to dense `VertexId` handles.
//! The spaces are infinite; a configurable budget caps the number of interned
//! states and aborts with an error rather than swapping.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use crate::cover::{cover_step_in_place, loop_at, CellSampler, CellStatus, CoverVertex, Crossing, LoopId};
use crate::error::{Error, Result};
use crate::group::{Axis, Letter, Word, LETTER_A, LETTER_B};
use crate::segment::{kn_step_in_place, SegmentVertex};

/// Default cap on interned states per space.
pub const DEFAULT_BUDGET: usize = 50_000_000;

/// Opaque handle to an interned canonical vertex state. Handles are equal iff
/// the canonical states are equal, within a single space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

/// Canonical vertex state across all supported space kinds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    /// Trivial subgroup: vertices are reduced words.
    Word(Word),
    /// Full group: the single coset.
    Point,
    /// Z-quotient: integer offsets along the surviving axis.
    Int(i64),
    /// K_n family.
    Segment(SegmentVertex),
    /// Percolated cover.
    Cover(CoverVertex),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Word(w) => write!(f, "{w}"),
            State::Point => write!(f, "*"),
            State::Int(k) => write!(f, "{k}"),
            State::Segment(v) => write!(f, "{v}"),
            State::Cover(c) => write!(f, "{}|{}", c.crossings.len(), c.base),
        }
    }
}

enum SpaceKind {
    Trivial,
    FullGroup,
    ZQuotient { kill: Axis },
    Kn { n: u32 },
    Cover { n: u32, sampler: CellSampler, statuses: RefCell<HashMap<LoopId, bool>> },
}

struct Interner {
    states: Vec<State>,
    ids: HashMap<State, u32>,
    /// Memoized transitions indexed by `Letter::index()`.
    trans: Vec<[Option<VertexId>; 4]>,
}

impl Interner {
    fn new() -> Interner {
        Interner { states: Vec::new(), ids: HashMap::new(), trans: Vec::new() }
    }

    fn intern(&mut self, s: State, budget: usize) -> Result<VertexId> {
        if let Some(&id) = self.ids.get(&s) {
            return Ok(VertexId(id));
        }
        if self.states.len() >= budget {
            return Err(Error::BudgetExceeded { limit: budget });
        }
        let id = self.states.len() as u32;
        self.states.push(s.clone());
        self.ids.insert(s, id);
        self.trans.push([None; 4]);
        Ok(VertexId(id))
    }
}

/// A rooted coset space with a total deterministic step function.
///
/// Interior mutability serves the interning table and the lazy cell-status
/// cache; a space is therefore a single-task value. Concurrent estimators
/// build one instance per task from a shared [`SpaceSpec`]; results never
/// depend on handle numbering, so they are independent of the task count.
pub struct CosetSpace {
    kind: SpaceKind,
    root_state: State,
    inner: RefCell<Interner>,
    budget: usize,
}

impl CosetSpace {
    fn with_root(kind: SpaceKind, root_state: State, budget: usize) -> CosetSpace {
        let space = CosetSpace { kind, root_state: root_state.clone(), inner: RefCell::new(Interner::new()), budget };
        space
            .inner
            .borrow_mut()
            .intern(root_state, budget)
            .expect("budget cannot be exhausted by a single root state");
        space
    }

    /// The free group acting on itself: vertices are reduced words, root ε.
    pub fn trivial() -> CosetSpace {
        Self::trivial_with_budget(DEFAULT_BUDGET)
    }

    pub fn trivial_with_budget(budget: usize) -> CosetSpace {
        Self::with_root(SpaceKind::Trivial, State::Word(Word::empty()), budget)
    }

    /// K = G: a single vertex with four loops.
    pub fn full_group() -> CosetSpace {
        Self::with_root(SpaceKind::FullGroup, State::Point, DEFAULT_BUDGET)
    }

    /// Quotient killing one generator: the walk on the integers, with loops
    /// on the killed axis.
    pub fn z_quotient(kill: Axis) -> CosetSpace {
        Self::with_root(SpaceKind::ZQuotient { kill }, State::Int(0), DEFAULT_BUDGET)
    }

    pub fn kn(n: u32) -> Result<CosetSpace> {
        Self::kn_with_budget(n, DEFAULT_BUDGET)
    }

    pub fn kn_with_budget(n: u32, budget: usize) -> Result<CosetSpace> {
        if n < 1 {
            return Err(Error::InvalidKnParameter(n));
        }
        Ok(Self::with_root(SpaceKind::Kn { n }, State::Segment(SegmentVertex::root()), budget))
    }

    /// K_n re-rooted at the conjugate a^-i K_n a^i (axis A) or b^-i K_n b^i
    /// (axis B). The automaton is unchanged; only the designated root moves.
    pub fn kn_conjugate(n: u32, axis: Axis, index: u32, budget: usize) -> Result<CosetSpace> {
        if n < 1 {
            return Err(Error::InvalidKnParameter(n));
        }
        if index >= n {
            return Err(Error::ConjugateOutOfRange { index, n });
        }
        let root = conjugate_vertex(axis, index);
        Ok(Self::with_root(SpaceKind::Kn { n }, State::Segment(root), budget))
    }

    /// The universal cover of the base K_n complex minus the sampled
    /// configuration, rooted over `base_root`.
    pub fn cover(n: u32, base_root: SegmentVertex, sampler: CellSampler, budget: usize) -> Result<CosetSpace> {
        if n < 1 {
            return Err(Error::InvalidKnParameter(n));
        }
        let root = CoverVertex::new_root(base_root);
        Ok(Self::with_root(
            SpaceKind::Cover { n, sampler, statuses: RefCell::new(HashMap::new()) },
            State::Cover(root),
            budget,
        ))
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The root handle; always the first interned state.
    pub fn root(&self) -> VertexId {
        VertexId(0)
    }

    pub fn root_state(&self) -> &State {
        &self.root_state
    }

    pub fn num_states(&self) -> usize {
        self.inner.borrow().states.len()
    }

    /// K_n parameter, for Kn and Cover kinds.
    pub fn kn_param(&self) -> Option<u32> {
        match &self.kind {
            SpaceKind::Kn { n } => Some(*n),
            SpaceKind::Cover { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub(crate) fn cover_root(&self) -> Option<(u32, CoverVertex)> {
        match (&self.kind, &self.root_state) {
            (SpaceKind::Cover { n, .. }, State::Cover(c)) => Some((*n, c.clone())),
            _ => None,
        }
    }

    pub fn state(&self, v: VertexId) -> State {
        self.inner.borrow().states[v.0 as usize].clone()
    }

    pub fn intern(&self, s: State) -> Result<VertexId> {
        self.inner.borrow_mut().intern(s, self.budget)
    }

    /// The right action of a letter on a raw state, without interning.
    pub fn step_state_in_place(&self, s: &mut State, t: Letter) {
        match (&self.kind, s) {
            (SpaceKind::Trivial, State::Word(w)) => w.push(t),
            (SpaceKind::FullGroup, State::Point) => {}
            (SpaceKind::ZQuotient { kill }, State::Int(k)) => {
                if t.axis != *kill {
                    *k += i64::from(t.sign);
                }
            }
            (SpaceKind::Kn { n }, State::Segment(v)) => {
                kn_step_in_place(*n, v, t);
            }
            (SpaceKind::Cover { n, sampler, statuses }, State::Cover(c)) => {
                cover_step_in_place(*n, sampler, &mut statuses.borrow_mut(), c, t);
            }
            _ => unreachable!("state kind does not match space kind"),
        }
    }

    pub fn step_state(&self, s: &State, t: Letter) -> State {
        let mut out = s.clone();
        self.step_state_in_place(&mut out, t);
        out
    }

    /// Interned transition with memoization.
    pub fn step(&self, v: VertexId, t: Letter) -> Result<VertexId> {
        let li = t.index();
        if let Some(u) = self.inner.borrow().trans[v.0 as usize][li] {
            return Ok(u);
        }
        let next = {
            let state = self.inner.borrow().states[v.0 as usize].clone();
            self.step_state(&state, t)
        };
        let mut inner = self.inner.borrow_mut();
        let u = inner.intern(next, self.budget)?;
        inner.trans[v.0 as usize][li] = Some(u);
        Ok(u)
    }

    /// Follows the letters of `g` from `start`.
    pub fn apply_word(&self, start: VertexId, g: &Word) -> Result<VertexId> {
        let mut v = start;
        for &l in g.letters() {
            v = self.step(v, l)?;
        }
        Ok(v)
    }

    /// Open/filled annotation for the base loop under a cover vertex.
    pub fn cover_loop_status(&self, s: &State) -> Option<(Axis, CellStatus)> {
        match (&self.kind, s) {
            (SpaceKind::Cover { n, sampler, statuses }, State::Cover(c)) => {
                let cell = loop_at(*n, &c.base)?;
                let open = *statuses
                    .borrow_mut()
                    .entry(cell.clone())
                    .or_insert_with(|| sampler.status(&cell) == CellStatus::Open);
                Some((cell.axis, if open { CellStatus::Open } else { CellStatus::Filled }))
            }
            _ => None,
        }
    }

    /// The vertex adjacent to `root` on the geodesic toward `v` in the
    /// loop-collapsed tree, or `None` when `v == root`. This is the basis of
    /// shadow membership.
    pub fn geodesic_first_step(&self, root: &State, v: &State) -> Option<State> {
        if root == v {
            return None;
        }
        match (&self.kind, root, v) {
            (SpaceKind::Trivial, State::Word(r), State::Word(w)) => {
                let first = prefix_first_step(r.letters(), w.letters())?;
                Some(State::Word(first))
            }
            (SpaceKind::FullGroup, _, _) => None,
            (SpaceKind::ZQuotient { .. }, State::Int(r), State::Int(k)) => {
                Some(State::Int(if k > r { r + 1 } else { r - 1 }))
            }
            (SpaceKind::Kn { .. }, State::Segment(r), State::Segment(u)) => {
                Some(State::Segment(segment_first_step(r, u)?))
            }
            (SpaceKind::Cover { .. }, State::Cover(r), State::Cover(c)) => {
                debug_assert!(r.crossings.is_empty(), "cover shadows are rooted at crossing-free vertices");
                match c.crossings.first() {
                    None => Some(State::Cover(CoverVertex::new_root(segment_first_step(&r.base, &c.base)?))),
                    Some(first) if first.loop_id.base == r.base => Some(State::Cover(CoverVertex {
                        crossings: vec![Crossing { loop_id: first.loop_id.clone(), sign: first.sign }],
                        base: r.base.clone(),
                    })),
                    Some(first) => Some(State::Cover(CoverVertex::new_root(segment_first_step(
                        &r.base,
                        &first.loop_id.base,
                    )?))),
                }
            }
            _ => unreachable!("state kind does not match space kind"),
        }
    }
}

/// The canonical vertex of the conjugate root a^-i K_n a^i (i >= 1), or the
/// base root for i = 0.
pub fn conjugate_vertex(axis: Axis, index: u32) -> SegmentVertex {
    if index == 0 {
        SegmentVertex::root()
    } else {
        SegmentVertex::single(axis, i64::from(index))
    }
}

/// All 2n-1 conjugate roots of K_n in a fixed order: the base root first,
/// then the a-axis conjugates, then the b-axis conjugates.
pub fn conjugate_roots(n: u32) -> Vec<(Axis, u32)> {
    let mut out = vec![(Axis::A, 0)];
    for i in 1..n {
        out.push((Axis::A, i));
    }
    for i in 1..n {
        out.push((Axis::B, i));
    }
    out
}

fn prefix_first_step(root: &[Letter], v: &[Letter]) -> Option<Word> {
    let common = root.iter().zip(v.iter()).take_while(|(x, y)| x == y).count();
    if common == root.len() && v.len() > root.len() {
        Some(Word::from_letters(v[..root.len() + 1].iter().copied()))
    } else if root.is_empty() {
        None
    } else {
        Some(Word::from_letters(root[..root.len() - 1].iter().copied()))
    }
}

fn segment_first_step(root: &SegmentVertex, v: &SegmentVertex) -> Option<SegmentVertex> {
    if root == v {
        return None;
    }
    let pr = root.path_from_root();
    let pv = v.path_from_root();
    let common = pr.iter().zip(pv.iter()).take_while(|(x, y)| x == y).count();
    if common == pr.len() && pv.len() > pr.len() {
        Some(pv[pr.len()].clone())
    } else {
        // Root is not an ancestor of v: the geodesic starts toward the root
        // coset, through root's parent.
        Some(pr[pr.len() - 2].clone())
    }
}

/// Restriction of a space to the ball of a given radius around the root, with
/// vertices in BFS discovery order (letters tried in `Letter::ALL` order).
#[derive(Debug)]
pub struct Ball {
    pub radius: u32,
    /// Ball-local index of the root; always 0.
    pub root: usize,
    pub states: Vec<State>,
    pub depths: Vec<u32>,
    /// Directed edges labeled by positive letters only; each geometric edge,
    /// loops included, appears exactly once.
    pub edges: Vec<BallEdge>,
    /// Cover spaces only: loop status annotations (vertex, loop axis, open).
    pub loops: Vec<(usize, Axis, bool)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallEdge {
    pub src: usize,
    pub dst: usize,
    pub axis: Axis,
}

impl CosetSpace {
    /// BFS ball export. Rejects spaces exhibiting bigons: the K_n family and
    /// its covers have 1-gon cells only, and the exporter asserts that.
    pub fn ball(&self, radius: u32) -> Result<Ball> {
        let root = self.root();
        let mut order: Vec<VertexId> = vec![root];
        let mut index: HashMap<VertexId, usize> = HashMap::from([(root, 0)]);
        let mut depths: Vec<u32> = vec![0];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            let d = depths[head];
            head += 1;
            if d == radius {
                continue;
            }
            for l in Letter::ALL {
                let u = self.step(v, l)?;
                if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(u) {
                    slot.insert(order.len());
                    order.push(u);
                    depths.push(d + 1);
                }
            }
        }

        let mut edges = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            // Bigon check: no two distinct non-inverse letters may share a
            // target, and no proper 2-cycles on a single letter.
            let mut targets: [Option<VertexId>; 4] = [None; 4];
            for l in Letter::ALL {
                targets[l.index()] = Some(self.step(v, l)?);
            }
            for x in 0..4 {
                for y in (x + 1)..4 {
                    let (tx, ty) = (targets[x].unwrap(), targets[y].unwrap());
                    if tx == ty && tx != v && Letter::ALL[x] != Letter::ALL[y].inverse() {
                        return Err(Error::BigonDetected {
                            vertex: self.state(v).to_string(),
                            letters: format!("{}{}", Letter::ALL[x], Letter::ALL[y]),
                        });
                    }
                }
            }
            for l in [LETTER_A, LETTER_B] {
                let u = targets[l.index()].unwrap();
                if u != v && self.step(u, l)? == v {
                    return Err(Error::BigonDetected {
                        vertex: self.state(v).to_string(),
                        letters: format!("{l}{l}"),
                    });
                }
                // Every labeled edge has a unique source under its positive
                // letter, so this enumeration emits each edge exactly once.
                if let Some(&j) = index.get(&u) {
                    edges.push(BallEdge { src: i, dst: j, axis: l.axis });
                }
            }
        }

        let mut loops = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            let state = self.state(v);
            if let Some((axis, status)) = self.cover_loop_status(&state) {
                loops.push((i, axis, status == CellStatus::Open));
            }
        }

        let states = order.iter().map(|&v| self.state(v)).collect();
        Ok(Ball { radius, root: 0, states, depths, edges, loops })
    }
}

impl Ball {
    pub fn vertex_count(&self) -> usize {
        self.states.len()
    }

    /// True iff the underlying undirected simple graph, with loops and
    /// parallel edges collapsed, is acyclic. The ball is connected by
    /// construction, so this is an edge count check.
    pub fn is_treelike(&self) -> bool {
        let mut simple: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.src != e.dst)
            .map(|e| (e.src.min(e.dst), e.src.max(e.dst)))
            .collect();
        simple.sort_unstable();
        simple.dedup();
        simple.len() + 1 == self.vertex_count()
    }

    /// JSON export with the fixed schema
    /// `{"root": 0, "vertices": N, "edges": [[src, dst, "a"|"b", dir], ...]}`;
    /// cover balls add `"loops": [[vertex, axis, "open"|"filled"], ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| serde_json::json!([e.src, e.dst, e.axis.symbol().to_string(), 1]))
            .collect();
        let mut out = serde_json::json!({
            "root": self.root,
            "vertices": self.vertex_count(),
            "edges": edges,
        });
        if !self.loops.is_empty() {
            let loops: Vec<serde_json::Value> = self
                .loops
                .iter()
                .map(|(v, axis, open)| {
                    serde_json::json!([v, axis.symbol().to_string(), if *open { "open" } else { "filled" }])
                })
                .collect();
            out["loops"] = serde_json::Value::Array(loops);
        }
        out
    }

    /// DOT export; one directed edge per geometric edge, labeled a or b.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ball {\n");
        for (i, d) in self.depths.iter().enumerate() {
            out.push_str(&format!("  v{i} [depth={d}];\n"));
        }
        for e in &self.edges {
            out.push_str(&format!("  v{} -> v{} [label=\"{}\"];\n", e.src, e.dst, e.axis.symbol()));
        }
        out.push_str("}\n");
        out
    }
}

/// Rooted labeled-graph isomorphism of balls: pairs vertices by breadth-first
/// letter traversal, requiring consistent bijective pairing at every depth
/// below the radius and matching loop patterns on the boundary sphere.
pub fn balls_isomorphic(a: &CosetSpace, b: &CosetSpace, radius: u32) -> Result<bool> {
    let mut pair_ab: HashMap<VertexId, VertexId> = HashMap::new();
    let mut pair_ba: HashMap<VertexId, VertexId> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    pair_ab.insert(a.root(), b.root());
    pair_ba.insert(b.root(), a.root());
    queue.push_back((a.root(), b.root(), 0u32));
    while let Some((va, vb, d)) = queue.pop_front() {
        for l in Letter::ALL {
            let ua = a.step(va, l)?;
            let ub = b.step(vb, l)?;
            if d == radius {
                // Only the loop pattern is visible from the sphere.
                if (ua == va) != (ub == vb) {
                    return Ok(false);
                }
                continue;
            }
            match (pair_ab.get(&ua), pair_ba.get(&ub)) {
                (None, None) => {
                    pair_ab.insert(ua, ub);
                    pair_ba.insert(ub, ua);
                    queue.push_back((ua, ub, d + 1));
                }
                (Some(&mapped), Some(&back)) => {
                    if mapped != ub || back != ua {
                        return Ok(false);
                    }
                }
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Cheap, cloneable description of a rooted space; the unit of work shipped
/// to concurrent tasks, which build their own `CosetSpace` instances.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Trivial,
    FullGroup,
    ZQuotient { kill: Axis },
    Kn { n: u32, root: Option<(Axis, u32)> },
    Cover { n: u32, p: f64, seed: u64, root: Option<(Axis, u32)> },
}

impl SpaceSpec {
    pub fn build(&self, budget: usize) -> Result<CosetSpace> {
        match self {
            SpaceSpec::Trivial => Ok(CosetSpace::trivial_with_budget(budget)),
            SpaceSpec::FullGroup => Ok(CosetSpace::full_group()),
            SpaceSpec::ZQuotient { kill } => Ok(CosetSpace::z_quotient(*kill)),
            SpaceSpec::Kn { n, root: None } => CosetSpace::kn_with_budget(*n, budget),
            SpaceSpec::Kn { n, root: Some((axis, i)) } => CosetSpace::kn_conjugate(*n, *axis, *i, budget),
            SpaceSpec::Cover { n, p, seed, root } => {
                let (axis, i) = root.unwrap_or((Axis::A, 0));
                if i >= *n {
                    return Err(Error::ConjugateOutOfRange { index: i, n: *n });
                }
                let sampler = CellSampler::new(*seed, *p)?;
                CosetSpace::cover(*n, conjugate_vertex(axis, i), sampler, budget)
            }
        }
    }
}
