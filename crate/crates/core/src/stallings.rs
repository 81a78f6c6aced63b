//! Folded core graphs of finitely generated subgroups.
//!
//! [`CoreGraph::build`] lays out the wedge of generator loops at the basepoint and
//! folds it with a union-find over vertices. Each edge carries a tag, a word over
//! the generator alphabet `b_1..b_m`, such that the product of tags along any
//! closed path at the basepoint evaluates to the path label. Merging a vertex
//! re-gauges the tags of its incident edges, so the invariant survives every fold
//! and membership queries return an expression over the original generators.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::words::{Letter, Word};

/// Vertex 0 is always the basepoint.
pub const BASEPOINT: usize = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    /// Generator index, 1-based. Reading the edge backwards spells its inverse.
    pub letter: usize,
    pub dst: usize,
    tag: Word,
}

/// Expression of a subgroup element over the generators it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipWitness {
    pub expression: Word,
}

/// Basepoint-relative canonical numbering of a folded graph. Two core graphs
/// define the same subgroup iff their canonical forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertices: u32,
    pub edges: Vec<(u32, u32, u32)>,
}

#[derive(Debug, Clone)]
pub struct CoreGraph {
    generators: Vec<Word>,
    num_vertices: usize,
    edges: Vec<Edge>,
    /// `out[v][a-1]` is the edge leaving `v` labelled `x_a`.
    out: Vec<Vec<Option<usize>>>,
    inc: Vec<Vec<Option<usize>>>,
    alphabet: usize,
}

struct Folder {
    parent: Vec<usize>,
    incident: Vec<Vec<usize>>,
    src: Vec<usize>,
    dst: Vec<usize>,
    letter: Vec<usize>,
    tag: Vec<Word>,
    alive: Vec<bool>,
}

impl Folder {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn add_vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.incident.push(Vec::new());
        self.parent.len() - 1
    }

    fn add_edge(&mut self, src: usize, letter: usize, dst: usize, tag: Word) {
        let id = self.src.len();
        self.src.push(src);
        self.dst.push(dst);
        self.letter.push(letter);
        self.tag.push(tag);
        self.alive.push(true);
        self.incident[src].push(id);
        if dst != src {
            self.incident[dst].push(id);
        }
    }

    /// Adds the loop spelling `gen` at the basepoint; its first step carries `b_{index}`.
    fn add_loop(&mut self, gen: &Word, index: usize) {
        let marker = Word::gen(index);
        let n = gen.len();
        let mut prev = BASEPOINT;
        for (j, &l) in gen.letters().iter().enumerate() {
            let next = if j + 1 == n { BASEPOINT } else { self.add_vertex() };
            let tag = if j == 0 { marker.clone() } else { Word::identity() };
            if l.is_inverse() {
                self.add_edge(next, l.index(), prev, tag.inverse());
            } else {
                self.add_edge(prev, l.index(), next, tag);
            }
            prev = next;
        }
    }

    /// Drops dead and repeated entries from the incidence list of `x`.
    fn clean_incident(&mut self, x: usize) {
        let mut ids = std::mem::take(&mut self.incident[x]);
        ids.retain(|&id| self.alive[id]);
        ids.sort_unstable();
        ids.dedup();
        self.incident[x] = ids;
    }

    /// Arc-ends at representative `x`: (signed leaving letter, edge, leaves forward).
    fn arc_ends(&mut self, x: usize) -> Vec<(i32, usize, bool)> {
        self.clean_incident(x);
        let ids = self.incident[x].clone();
        let mut ends = Vec::with_capacity(ids.len() + 2);
        for id in ids {
            let a = self.letter[id] as i32;
            if self.find(self.src[id]) == x {
                ends.push((a, id, true));
            }
            if self.find(self.dst[id]) == x {
                ends.push((-a, id, false));
            }
        }
        ends
    }

    fn traversal_tag(&self, id: usize, forward: bool) -> Word {
        if forward {
            self.tag[id].clone()
        } else {
            self.tag[id].inverse()
        }
    }

    fn far_end(&mut self, id: usize, forward: bool) -> usize {
        if forward {
            self.find(self.dst[id])
        } else {
            self.find(self.src[id])
        }
    }

    /// Re-gauges every edge at representative `v` by `c`.
    fn regauge(&mut self, v: usize, c: &Word) {
        if c.is_empty() {
            return;
        }
        let ci = c.inverse();
        self.clean_incident(v);
        let ids = self.incident[v].clone();
        for id in ids {
            let s = self.find(self.src[id]) == v;
            let d = self.find(self.dst[id]) == v;
            let mut t = self.tag[id].clone();
            if s {
                t = c.mul(&t);
            }
            if d {
                t = t.mul(&ci);
            }
            self.tag[id] = t;
        }
    }

    /// Identifies arc-ends `(e1, f1)` and `(e2, f2)`, which leave the same vertex with the same letter.
    fn fold(&mut self, (e1, f1): (usize, bool), (e2, f2): (usize, bool)) -> usize {
        let far1 = self.far_end(e1, f1);
        let far2 = self.far_end(e2, f2);
        if far1 == far2 {
            self.alive[e2] = false;
            return far1;
        }
        let t1 = self.traversal_tag(e1, f1);
        let t2 = self.traversal_tag(e2, f2);
        // Absorb the vertex with fewer incident edges, but never the basepoint.
        let absorb_second = far2 != BASEPOINT
            && (far1 == BASEPOINT || self.incident[far2].len() <= self.incident[far1].len());
        let (keep, gone, dead, c) = if absorb_second {
            (far1, far2, e2, t1.inverse().mul(&t2))
        } else {
            (far2, far1, e1, t2.inverse().mul(&t1))
        };
        self.regauge(gone, &c);
        self.alive[dead] = false;
        self.parent[gone] = keep;
        let moved = std::mem::take(&mut self.incident[gone]);
        self.incident[keep].extend(moved);
        keep
    }
}

impl CoreGraph {
    /// Folded core graph of the subgroup generated by `generators`. Empty words are
    /// skipped but keep their position in the generator numbering.
    pub fn build(generators: &[Word]) -> CoreGraph {
        Self::build_with_order(generators, &mut |_| 0)
    }

    /// As [`CoreGraph::build`], with `pick(k)` choosing which of `k` pending
    /// vertices to process next. The result does not depend on the choices.
    pub fn build_with_order(generators: &[Word], pick: &mut dyn FnMut(usize) -> usize) -> CoreGraph {
        let alphabet = generators.iter().map(Word::max_index).max().unwrap_or(0);
        let mut f = Folder {
            parent: vec![BASEPOINT],
            incident: vec![Vec::new()],
            src: Vec::new(),
            dst: Vec::new(),
            letter: Vec::new(),
            tag: Vec::new(),
            alive: Vec::new(),
        };
        for (i, g) in generators.iter().enumerate() {
            if !g.is_empty() {
                f.add_loop(g, i + 1);
            }
        }

        let mut pending: Vec<usize> = vec![BASEPOINT];
        let mut queued = vec![true];
        queued.resize(f.parent.len(), false);
        while !pending.is_empty() {
            let k = pending.len();
            let i = pick(k).min(k - 1);
            let x0 = pending.swap_remove(i);
            queued[x0] = false;
            let x = f.find(x0);
            if x != x0 {
                continue;
            }
            let mut ends = f.arc_ends(x);
            ends.sort_unstable();
            let clash = ends
                .windows(2)
                .find(|p| p[0].0 == p[1].0 && p[0].1 != p[1].1)
                .map(|p| ((p[0].1, p[0].2), (p[1].1, p[1].2)));
            if let Some((h1, h2)) = clash {
                let keep = f.fold(h1, h2);
                for v in [x, keep] {
                    let r = f.find(v);
                    if !queued[r] {
                        queued[r] = true;
                        pending.push(r);
                    }
                }
            }
        }
        Self::finish(generators.to_vec(), f, alphabet)
    }

    fn finish(generators: Vec<Word>, mut f: Folder, alphabet: usize) -> CoreGraph {
        let total = f.parent.len();
        // Trim dangling vertices other than the basepoint.
        let mut degree = vec![0usize; total];
        for id in 0..f.src.len() {
            if f.alive[id] {
                let s = f.find(f.src[id]);
                let d = f.find(f.dst[id]);
                degree[s] += 1;
                degree[d] += 1;
            }
        }
        let mut stack: Vec<usize> =
            (0..total).filter(|&v| v != BASEPOINT && f.find(v) == v && degree[v] == 1).collect();
        while let Some(v) = stack.pop() {
            if degree[v] != 1 {
                continue;
            }
            let ids = f.incident[v].clone();
            for id in ids {
                if f.alive[id] {
                    f.alive[id] = false;
                    let s = f.find(f.src[id]);
                    let d = f.find(f.dst[id]);
                    degree[s] -= 1;
                    degree[d] -= 1;
                    let other = if s == v { d } else { s };
                    if other != BASEPOINT && degree[other] == 1 {
                        stack.push(other);
                    }
                }
            }
        }

        let mut index = vec![usize::MAX; total];
        index[BASEPOINT] = 0;
        let mut next = 1;
        let mut edges = Vec::new();
        for id in 0..f.src.len() {
            if !f.alive[id] {
                continue;
            }
            let s = f.find(f.src[id]);
            let d = f.find(f.dst[id]);
            for v in [s, d] {
                if index[v] == usize::MAX {
                    index[v] = next;
                    next += 1;
                }
            }
            edges.push(Edge { src: index[s], letter: f.letter[id], dst: index[d], tag: f.tag[id].clone() });
        }
        let mut g = CoreGraph {
            generators,
            num_vertices: next,
            edges,
            out: Vec::new(),
            inc: Vec::new(),
            alphabet,
        };
        g.index_edges();
        g
    }

    fn index_edges(&mut self) {
        self.out = vec![vec![None; self.alphabet]; self.num_vertices];
        self.inc = vec![vec![None; self.alphabet]; self.num_vertices];
        for (id, e) in self.edges.iter().enumerate() {
            debug_assert!(self.out[e.src][e.letter - 1].is_none(), "graph is not folded");
            debug_assert!(self.inc[e.dst][e.letter - 1].is_none(), "graph is not folded");
            self.out[e.src][e.letter - 1] = Some(id);
            self.inc[e.dst][e.letter - 1] = Some(id);
        }
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Rank of the subgroup, `|E| - |V| + 1`.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.num_vertices
    }

    /// Edge read when leaving `v` by letter `l`, and the vertex reached.
    pub fn step(&self, v: usize, l: Letter) -> Option<(usize, usize)> {
        let a = l.index();
        if a > self.alphabet {
            return None;
        }
        if l.is_inverse() {
            self.inc[v][a - 1].map(|id| (id, self.edges[id].src))
        } else {
            self.out[v][a - 1].map(|id| (id, self.edges[id].dst))
        }
    }

    /// Endpoint of reading `w` from the basepoint, if the whole word can be read.
    pub fn trace(&self, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(BASEPOINT, |v, &l| self.step(v, l).map(|(_, t)| t))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.trace(w) == Some(BASEPOINT)
    }

    /// Expression of `v` over the generators, if `v` lies in the subgroup.
    pub fn member(&self, v: &Word) -> Option<MembershipWitness> {
        let mut v_at = BASEPOINT;
        let mut expression = Word::identity();
        for &l in v.letters() {
            let (id, next) = self.step(v_at, l)?;
            if l.is_inverse() {
                expression.mul_assign(&self.edges[id].tag.inverse());
            } else {
                expression.mul_assign(&self.edges[id].tag);
            }
            v_at = next;
        }
        if v_at != BASEPOINT {
            return None;
        }
        debug_assert_eq!(expression.substitute(&self.generators).as_ref(), Ok(v));
        Some(MembershipWitness { expression })
    }

    /// Breadth-first spanning tree from the basepoint, exploring letters in the order
    /// `x1, X1, x2, X2, ...`. Returns the tree-path word to each vertex and the
    /// ids of tree edges.
    pub fn spanning_tree(&self) -> (Vec<Word>, Vec<bool>) {
        let mut path: Vec<Option<Word>> = vec![None; self.num_vertices];
        let mut in_tree = vec![false; self.edges.len()];
        path[BASEPOINT] = Some(Word::identity());
        let mut queue = VecDeque::from([BASEPOINT]);
        while let Some(v) = queue.pop_front() {
            for slot in 0..2 * self.alphabet {
                let l = Letter::from_slot(slot);
                if let Some((id, t)) = self.step(v, l) {
                    if path[t].is_none() {
                        let mut p = path[v].clone().expect("visited");
                        p.push(l);
                        path[t] = Some(p);
                        in_tree[id] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        (path.into_iter().map(|p| p.expect("core graphs are connected")).collect(), in_tree)
    }

    /// Free basis read off the spanning tree: one element per non-tree edge.
    pub fn tree_basis(&self) -> Vec<Word> {
        let (path, in_tree) = self.spanning_tree();
        self.edges
            .iter()
            .zip(&in_tree)
            .filter(|(_, &t)| !t)
            .map(|(e, _)| {
                let mut w = path[e.src].clone();
                w.push(Letter::gen(e.letter));
                w.mul(&path[e.dst].inverse())
            })
            .collect()
    }

    /// Canonical numbering by breadth-first relabelling from the basepoint.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut order = vec![u32::MAX; self.num_vertices];
        order[BASEPOINT] = 0;
        let mut next = 1u32;
        let mut queue = VecDeque::from([BASEPOINT]);
        while let Some(v) = queue.pop_front() {
            for slot in 0..2 * self.alphabet {
                if let Some((_, t)) = self.step(v, Letter::from_slot(slot)) {
                    if order[t] == u32::MAX {
                        order[t] = next;
                        next += 1;
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut edges: Vec<(u32, u32, u32)> =
            self.edges.iter().map(|e| (order[e.src], e.letter as u32, order[e.dst])).collect();
        edges.sort_unstable();
        CanonicalForm { vertices: next, edges }
    }

    /// One edge per line, `src --letter--> dst`, basepoint printed as `*`,
    /// vertices in canonical order.
    pub fn dump(&self) -> String {
        let canon = self.canonical_form();
        let name = |v: u32| if v == 0 { "*".to_string() } else { v.to_string() };
        let mut out = String::new();
        for (s, a, d) in &canon.edges {
            let l = Letter::gen(*a as usize).to_char();
            let _ = writeln!(out, "{} --{}--> {}", name(*s), l, name(*d));
        }
        out
    }
}

/// Rank of the image subgroup `<images>`. An endomorphism of `F_n` is injective
/// iff this equals `n`.
pub fn image_rank(images: &[Word]) -> usize {
    CoreGraph::build(images).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn ws(s: &[&str]) -> Vec<Word> {
        s.iter().map(|t| w(t)).collect()
    }

    #[test]
    fn build_examples() {
        let g = CoreGraph::build(&ws(&["aa", "b"]));
        assert_eq!((g.num_vertices(), g.num_edges(), g.rank()), (2, 3, 2));

        let g = CoreGraph::build(&[]);
        assert_eq!((g.num_vertices(), g.rank()), (1, 0));

        // <ab, abb> contains b = (ab)^-1 abb and then a, so it is all of F_2.
        let g = CoreGraph::build(&ws(&["ab", "abb"]));
        assert_eq!((g.num_vertices(), g.rank()), (1, 2));
        assert_eq!(g.canonical_form(), CoreGraph::build(&ws(&["ab", "b"])).canonical_form());
        assert_eq!(g.canonical_form(), CoreGraph::build(&ws(&["a", "b"])).canonical_form());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(CoreGraph::build(&ws(&["aa", "b"])).rank(), 2);
        assert_eq!(CoreGraph::build(&ws(&["1"])).rank(), 0);
        assert_eq!(CoreGraph::build(&ws(&["abA"])).rank(), 1);
        assert_eq!(CoreGraph::build(&ws(&["ab", "ba", "a", "b"])).rank(), 2);
    }

    #[test]
    fn member_examples() {
        let g = CoreGraph::build(&ws(&["aa", "b"]));
        assert_eq!(g.member(&w("aab")).unwrap().expression, w("ab"));
        assert_eq!(g.member(&w("a")), None);
        assert_eq!(g.member(&Word::identity()).unwrap().expression, Word::identity());
        let g = CoreGraph::build(&ws(&["ab", "abb"]));
        let e = g.member(&w("b")).unwrap().expression;
        assert_eq!(e.substitute(g.generators()).unwrap(), w("b"));
    }

    #[test]
    fn image_rank_examples() {
        assert_eq!(image_rank(&ws(&["a", "b"])), 2);
        assert_eq!(image_rank(&ws(&["aa", "aaa"])), 1);
        assert_eq!(image_rank(&ws(&["aab", "B"])), 2);
    }

    #[test]
    fn dump_format() {
        let g = CoreGraph::build(&ws(&["aa", "b"]));
        assert_eq!(g.dump(), "* --a--> 1\n* --b--> *\n1 --a--> *\n");
        let g = CoreGraph::build(&ws(&["abA"]));
        assert_eq!(g.dump(), "* --a--> 1\n1 --b--> 1\n");
    }

    #[test]
    fn tree_basis_spans_the_subgroup() {
        let g = CoreGraph::build(&ws(&["aBa", "bab", "abAB"]));
        let basis = g.tree_basis();
        assert_eq!(basis.len(), g.rank());
        let h = CoreGraph::build(&basis);
        assert_eq!(h.canonical_form(), g.canonical_form());
    }
}
