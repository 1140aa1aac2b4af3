//! Transition-based Büchi automata over steps, one per command.
//!
//! Every node carries the system state it sits in and a set of status
//! markers. A finite trace `(σ, w, s)` is accepted when some run from
//! `init[σ]` over `w` ends in a node marked `s`; an infinite word is accepted
//! when some run takes accepting edges infinitely often.
//!
//! Automata returned by [`Nfa::finish`] are *closed*: aborted nodes are
//! universal and every node is marked incomplete, so the accepted set is
//! prefix-closed and abort-extension-closed.

use rustc_hash::FxHashMap as HashMap;

use crate::atomic::AtomicCommand;
use crate::state::{State, StateSpace, Status, Step};

pub const MARK_T: u8 = 1;
pub const MARK_A: u8 = 2;
pub const MARK_I: u8 = 4;
pub const MARK_ALL: u8 = MARK_T | MARK_A | MARK_I;

pub fn mark_of(s: Status) -> u8 {
    match s {
        Status::Terminated => MARK_T,
        Status::Aborted => MARK_A,
        Status::Incomplete => MARK_I,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub step: Step,
    pub target: u32,
    pub acc: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub sigma: State,
    pub marks: u8,
    pub edges: Vec<Edge>,
}

/// Raised when a construction grows past the node cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TooLarge;

#[derive(Debug, Clone)]
pub struct Nfa {
    space: StateSpace,
    nodes: Vec<Node>,
    init: Vec<u32>,
}

/// How two automata are combined pointwise.
#[derive(Clone, Copy)]
pub enum Product {
    /// Intersection of the accepted sets.
    Join,
    /// Stepwise synchronisation under a step table.
    Sync(fn(Step, Step) -> Option<Step>),
}

impl Nfa {
    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn init(&self, sigma: State) -> u32 {
        self.init[sigma as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn with_inits(space: StateSpace, marks: u8) -> Self {
        let nodes: Vec<Node> = space
            .states()
            .map(|sigma| Node {
                sigma,
                marks,
                edges: Vec::new(),
            })
            .collect();
        let init = (0..nodes.len() as u32).collect();
        Nfa { space, nodes, init }
    }

    /// Every observation.
    pub fn abort(space: StateSpace) -> Self {
        Self::with_inits(space, MARK_A | MARK_I)
    }

    /// Only the empty incomplete traces.
    pub fn magic(space: StateSpace) -> Self {
        Self::with_inits(space, MARK_I)
    }

    pub fn nil(space: StateSpace) -> Self {
        Self::with_inits(space, MARK_T | MARK_I)
    }

    pub fn atomic(a: &AtomicCommand) -> Self {
        let space = a.space();
        let n = space.size() as u32;
        let mut nfa = Self::with_inits(space, MARK_I);
        for sigma in space.states() {
            nfa.nodes.push(Node {
                sigma,
                marks: MARK_T | MARK_I,
                edges: Vec::new(),
            });
        }
        for s in a.steps() {
            nfa.nodes[s.pre as usize].edges.push(Edge {
                step: *s,
                target: n + s.post as u32,
                acc: false,
            });
        }
        nfa
    }

    /// Appends a copy of `other`'s nodes and returns the index offset.
    fn append(&mut self, other: &Nfa) -> u32 {
        let off = self.nodes.len() as u32;
        self.nodes.extend(other.nodes.iter().map(|n| Node {
            sigma: n.sigma,
            marks: n.marks,
            edges: n
                .edges
                .iter()
                .map(|e| Edge {
                    target: e.target + off,
                    ..*e
                })
                .collect(),
        }));
        off
    }

    /// Absorbs node `src` into `dst` as if by an empty move.
    fn absorb(&mut self, dst: usize, src: usize, marks: bool) {
        if marks {
            self.nodes[dst].marks |= self.nodes[src].marks;
        }
        let edges = self.nodes[src].edges.clone();
        self.nodes[dst].edges.extend(edges);
    }

    pub fn union(space: StateSpace, parts: &[&Nfa]) -> Self {
        let mut out = Self::with_inits(space, MARK_I);
        for p in parts {
            let off = out.append(p);
            for sigma in space.states() {
                let src = (off + p.init(sigma)) as usize;
                out.absorb(sigma as usize, src, true);
            }
        }
        out
    }

    pub fn seq(c: &Nfa, d: &Nfa) -> Self {
        let mut out = c.clone();
        let off = out.append(d);
        for q in 0..c.nodes.len() {
            if out.nodes[q].marks & MARK_T != 0 {
                out.nodes[q].marks &= !MARK_T;
                let src = (off + d.init(out.nodes[q].sigma)) as usize;
                out.absorb(q, src, true);
            }
        }
        out
    }

    /// Finite (`omega = false`) or omega iteration.
    ///
    /// Complete pieces run through a stripped copy of `c` whose terminated
    /// nodes loop back to a hub; the last piece runs through a full copy. In
    /// the omega case every piece entry is accepting, and a hub at a state
    /// where `c` terminates silently is aborting.
    pub fn iterate(c: &Nfa, omega: bool) -> Self {
        let space = c.space;
        let mut out = Self::with_inits(space, MARK_T | MARK_I);
        let p = out.append(c);
        for node in &mut out.nodes[p as usize..] {
            node.marks &= MARK_T;
            for e in &mut node.edges {
                e.acc = false;
            }
        }
        let b = out.append(c);
        for sigma in space.states() {
            let h = sigma as usize;
            let pi = (p + c.init(sigma)) as usize;
            let entries: Vec<Edge> = out.nodes[pi]
                .edges
                .iter()
                .map(|e| Edge { acc: omega, ..*e })
                .collect();
            out.nodes[h].edges.extend(entries);
            out.absorb(h, (b + c.init(sigma)) as usize, true);
            if omega && c.nodes[c.init(sigma) as usize].marks & MARK_T != 0 {
                out.nodes[h].marks |= MARK_A;
            }
        }
        for q in p as usize..b as usize {
            if out.nodes[q].marks & MARK_T != 0 {
                let h = out.nodes[q].sigma as usize;
                out.nodes[q].marks = 0;
                out.absorb(q, h, true);
            }
        }
        out
    }

    /// Product construction; a phase bit degeneralises the pair of
    /// acceptance conditions.
    pub fn product(a: &Nfa, b: &Nfa, mode: Product, cap: usize) -> Result<Self, TooLarge> {
        type Key = (u32, u32, bool);
        let space = a.space;
        let marks_of = |ka: u32, kb: u32| {
            let (ma, mb) = (a.nodes[ka as usize].marks, b.nodes[kb as usize].marks);
            match mode {
                Product::Join => ma & mb,
                Product::Sync(_) => {
                    let mut m = ma & mb & (MARK_T | MARK_I);
                    if (ma & MARK_A != 0 && mb & MARK_I != 0)
                        || (ma & MARK_I != 0 && mb & MARK_A != 0)
                    {
                        m |= MARK_A;
                    }
                    m
                }
            }
        };
        let mut index: HashMap<Key, u32> = HashMap::default();
        let mut nodes: Vec<Node> = Vec::new();
        let mut queue: Vec<(Key, u32)> = Vec::new();
        let mut intern = |key: Key, nodes: &mut Vec<Node>, queue: &mut Vec<(Key, u32)>| {
            if let Some(&i) = index.get(&key) {
                return Ok(i);
            }
            if nodes.len() >= cap {
                return Err(TooLarge);
            }
            let i = nodes.len() as u32;
            nodes.push(Node {
                sigma: a.nodes[key.0 as usize].sigma,
                marks: marks_of(key.0, key.1),
                edges: Vec::new(),
            });
            index.insert(key, i);
            queue.push((key, i));
            Ok(i)
        };
        let mut init = Vec::with_capacity(space.size());
        for sigma in space.states() {
            init.push(intern((a.init(sigma), b.init(sigma), false), &mut nodes, &mut queue)?);
        }
        while let Some(((qa, qb, phase), from)) = queue.pop() {
            let mut edges = Vec::new();
            for ea in &a.nodes[qa as usize].edges {
                for eb in &b.nodes[qb as usize].edges {
                    let step = match mode {
                        Product::Join => (ea.step == eb.step).then_some(ea.step),
                        Product::Sync(f) => f(ea.step, eb.step),
                    };
                    let Some(step) = step else { continue };
                    let (next, acc) = match (phase, ea.acc, eb.acc) {
                        (false, true, _) => (true, false),
                        (true, _, true) => (false, true),
                        _ => (phase, false),
                    };
                    let target = intern((ea.target, eb.target, next), &mut nodes, &mut queue)?;
                    edges.push(Edge { step, target, acc });
                }
            }
            nodes[from as usize].edges = edges;
        }
        Ok(Nfa { space, nodes, init })
    }

    /// Closes and shrinks the automaton: aborting nodes become universal,
    /// useless nodes are dropped, every node is marked incomplete and
    /// bisimilar nodes are merged.
    pub fn finish(mut self, cap: usize) -> Result<Self, TooLarge> {
        let space = self.space;
        let u0 = self.nodes.len() as u32;
        let universal = |sigma: State| -> Vec<Edge> {
            space
                .steps_from(sigma)
                .map(|step| Edge {
                    step,
                    target: u0 + step.post as u32,
                    acc: true,
                })
                .collect()
        };
        for node in &mut self.nodes {
            if node.marks & MARK_A != 0 {
                node.marks = MARK_ALL;
                node.edges = universal(node.sigma);
            }
        }
        for sigma in space.states() {
            self.nodes.push(Node {
                sigma,
                marks: MARK_ALL,
                edges: universal(sigma),
            });
        }
        if self.nodes.len() > cap {
            return Err(TooLarge);
        }
        self.trim();
        for node in &mut self.nodes {
            node.marks |= MARK_I;
        }
        let mut nfa = self.minimize().reduce_by_simulation();
        nfa.trim();
        Ok(nfa.minimize())
    }

    /// Keeps initial nodes and nodes that are reachable and can still
    /// produce an observation.
    fn trim(&mut self) {
        let n = self.nodes.len();
        let mut reach = vec![false; n];
        let mut stack: Vec<u32> = self.init.clone();
        for &i in &self.init {
            reach[i as usize] = true;
        }
        while let Some(q) = stack.pop() {
            for e in &self.nodes[q as usize].edges {
                if !reach[e.target as usize] {
                    reach[e.target as usize] = true;
                    stack.push(e.target);
                }
            }
        }
        let comp = scc(n, |q| self.nodes[q].edges.iter().map(|e| e.target as usize));
        let mut live_comp = vec![false; n];
        for (q, node) in self.nodes.iter().enumerate() {
            for e in &node.edges {
                if e.acc && comp[e.target as usize] == comp[q] {
                    live_comp[comp[q]] = true;
                }
            }
        }
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (q, node) in self.nodes.iter().enumerate() {
            for e in &node.edges {
                rev[e.target as usize].push(q as u32);
            }
        }
        let mut productive = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        for q in 0..n {
            if self.nodes[q].marks != 0 || live_comp[comp[q]] {
                productive[q] = true;
                stack.push(q as u32);
            }
        }
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !productive[p as usize] {
                    productive[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let mut keep: Vec<bool> = (0..n).map(|q| reach[q] && productive[q]).collect();
        for &i in &self.init {
            keep[i as usize] = true;
        }
        let mut renum = vec![u32::MAX; n];
        let mut nodes = Vec::new();
        for q in 0..n {
            if keep[q] {
                renum[q] = nodes.len() as u32;
                nodes.push(std::mem::replace(
                    &mut self.nodes[q],
                    Node {
                        sigma: 0,
                        marks: 0,
                        edges: Vec::new(),
                    },
                ));
            }
        }
        for node in &mut nodes {
            node.edges.retain(|e| keep[e.target as usize]);
            for e in &mut node.edges {
                e.target = renum[e.target as usize];
            }
        }
        for i in &mut self.init {
            *i = renum[*i as usize];
        }
        self.nodes = nodes;
    }

    /// Quotient by the coarsest bisimulation that respects state, markers
    /// and edge acceptance.
    fn minimize(self) -> Self {
        let n = self.nodes.len();
        let mut block: Vec<u32> = Vec::with_capacity(n);
        let mut ids: HashMap<(State, u8), u32> = HashMap::default();
        for node in &self.nodes {
            let next = ids.len() as u32;
            block.push(*ids.entry((node.sigma, node.marks)).or_insert(next));
        }
        let mut count = ids.len();
        loop {
            let mut sigs: HashMap<(u32, Vec<u64>), u32> = HashMap::default();
            let mut next_block = Vec::with_capacity(n);
            for (q, node) in self.nodes.iter().enumerate() {
                let mut out: Vec<u64> = node
                    .edges
                    .iter()
                    .map(|e| {
                        (self.space.step_index(e.step) as u64) << 33
                            | (e.acc as u64) << 32
                            | block[e.target as usize] as u64
                    })
                    .collect();
                out.sort_unstable();
                out.dedup();
                let fresh = sigs.len() as u32;
                next_block.push(*sigs.entry((block[q], out)).or_insert(fresh));
            }
            let stable = sigs.len() == count;
            count = sigs.len();
            block = next_block;
            if stable {
                break;
            }
        }
        let mut nodes: Vec<Option<Node>> = vec![None; count];
        for (q, node) in self.nodes.iter().enumerate() {
            let b = block[q] as usize;
            if nodes[b].is_some() {
                continue;
            }
            let mut edges: Vec<Edge> = node
                .edges
                .iter()
                .map(|e| Edge {
                    target: block[e.target as usize],
                    ..*e
                })
                .collect();
            edges.sort_unstable_by_key(|e| (e.step, e.target, e.acc));
            edges.dedup();
            nodes[b] = Some(Node {
                sigma: node.sigma,
                marks: node.marks,
                edges,
            });
        }
        Nfa {
            space: self.space,
            nodes: nodes.into_iter().map(Option::unwrap).collect(),
            init: self.init.iter().map(|&i| block[i as usize]).collect(),
        }
    }
}

/// Above this many nodes the quadratic simulation pass is skipped.
const SIMULATION_LIMIT: usize = 3000;

impl Nfa {
    /// Direct simulation preorder as bit rows: bit `p` of row `q` is set when
    /// `p` simulates `q` (same state, at least `q`'s markers, and every edge
    /// of `q` matched on the same step by an edge at least as accepting into
    /// a simulating target). Expects edges sorted by step.
    fn simulation(&self) -> Vec<Vec<u64>> {
        let n = self.nodes.len();
        let words = n.div_ceil(64);
        let mut sim = vec![vec![0u64; words]; n];
        for (q, a) in self.nodes.iter().enumerate() {
            for (p, b) in self.nodes.iter().enumerate() {
                if a.sigma == b.sigma && a.marks & !b.marks == 0 {
                    sim[q][p / 64] |= 1 << (p % 64);
                }
            }
        }
        let has = |sim: &[Vec<u64>], q: usize, p: usize| sim[q][p / 64] >> (p % 64) & 1 == 1;
        loop {
            let mut changed = false;
            for q in 0..n {
                for p in 0..n {
                    if p == q || !has(&sim, q, p) {
                        continue;
                    }
                    let pe = &self.nodes[p].edges;
                    let matched = self.nodes[q].edges.iter().all(|e| {
                        let lo = pe.partition_point(|f| f.step < e.step);
                        pe[lo..]
                            .iter()
                            .take_while(|f| f.step == e.step)
                            .any(|f| (f.acc || !e.acc) && has(&sim, e.target as usize, f.target as usize))
                    });
                    if !matched {
                        sim[q][p / 64] &= !(1 << (p % 64));
                        changed = true;
                    }
                }
            }
            if !changed {
                return sim;
            }
        }
    }

    /// Merges simulation-equivalent nodes and drops edges dominated by a
    /// sibling edge on the same step.
    fn reduce_by_simulation(self) -> Self {
        let n = self.nodes.len();
        if n > SIMULATION_LIMIT {
            return self;
        }
        let sim = self.simulation();
        let has = |q: usize, p: usize| sim[q][p / 64] >> (p % 64) & 1 == 1;
        let mut class = vec![u32::MAX; n];
        let mut reps: Vec<usize> = Vec::new();
        for q in 0..n {
            if class[q] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            class[q] = id;
            for (p, cp) in class.iter_mut().enumerate().skip(q + 1) {
                if *cp == u32::MAX && has(q, p) && has(p, q) {
                    *cp = id;
                }
            }
            reps.push(q);
        }
        let m = reps.len();
        let mut merged: Vec<Vec<Edge>> = vec![Vec::new(); m];
        for (q, node) in self.nodes.iter().enumerate() {
            let c = class[q] as usize;
            merged[c].extend(node.edges.iter().map(|e| Edge {
                target: class[e.target as usize],
                ..*e
            }));
        }
        let below = |x: u32, y: u32| has(reps[x as usize], reps[y as usize]);
        let nodes = merged
            .into_iter()
            .zip(&reps)
            .map(|(mut edges, &r)| {
                edges.sort_unstable_by_key(|e| (e.step, e.target, e.acc));
                edges.dedup();
                let kept = edges
                    .iter()
                    .filter(|e| {
                        !edges.iter().any(|f| {
                            f.step == e.step
                                && (f.acc || !e.acc)
                                && (f.target != e.target || f.acc != e.acc)
                                && below(e.target, f.target)
                        })
                    })
                    .copied()
                    .collect();
                Node {
                    sigma: self.nodes[r].sigma,
                    marks: self.nodes[r].marks,
                    edges: kept,
                }
            })
            .collect();
        Nfa {
            space: self.space,
            nodes,
            init: self.init.iter().map(|&i| class[i as usize]).collect(),
        }
    }
}

/// Strongly connected components (iterative Tarjan); returns a component id
/// per vertex.
pub fn scc<I, F>(n: usize, succ: F) -> Vec<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succ(root).collect(), 0));
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, succ(w).collect(), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}
