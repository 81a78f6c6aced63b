//! Candidate subgroups for the decision procedure, generated from topological graphs.
//!
//! A topological graph of rank `g` is a connected basepointed multigraph whose
//! vertices other than the basepoint have degree at least 3. Every subgroup
//! `H` containing `v` has a core graph obtained from such a graph by writing a
//! reduced word on each arc. Arcs that the loop of `v` traverses carry subwords of
//! `v`; the others can be assumed to carry words of length at most 3. Labelling
//! the arcs accordingly, and keeping the labellings in which `v` reads as a loop
//! at the basepoint, yields finitely many candidate subgroups, polynomially many
//! in `|v|` for fixed rank.
//!
//! [`generate_candidates`] follows the loop of each target word through the graph
//! and fixes visible labels as they are first traversed, which reaches the same
//! labellings as enumerating subword tuples blindly ([`subword_morphisms`],
//! [`label_graph`], [`read_loop`]) without the wasted work.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::stallings::{CanonicalForm, CoreGraph};
use crate::words::{FreeGroup, Letter, Word};

/// Basepointed multigraph; vertex 0 is the basepoint. Arc `i` runs from
/// `arcs[i].0` to `arcs[i].1`; loops have equal endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TopoGraph {
    pub vertices: usize,
    pub arcs: Vec<(usize, usize)>,
}

impl TopoGraph {
    pub fn rank(&self) -> usize {
        self.arcs.len() + 1 - self.vertices
    }

    pub fn degree(&self, v: usize) -> usize {
        self.arcs.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.arcs {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected, and every vertex but the basepoint has degree at least 3.
    pub fn is_topological(&self) -> bool {
        self.vertices >= 1
            && self.is_connected()
            && (1..self.vertices).all(|v| self.degree(v) >= 3)
            && (self.vertices > 1 || !self.arcs.is_empty())
    }

    /// Least sorted arc list over relabellings fixing the basepoint.
    pub fn canonical(&self) -> TopoGraph {
        let mut perm: Vec<usize> = (0..self.vertices).collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        loop {
            let mut arcs: Vec<(usize, usize)> = self
                .arcs
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (perm[a], perm[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            arcs.sort_unstable();
            if best.as_ref().is_none_or(|b| arcs < *b) {
                best = Some(arcs);
            }
            if !next_permutation(&mut perm[1..]) {
                break;
            }
        }
        TopoGraph { vertices: self.vertices, arcs: best.unwrap_or_default() }
    }

    /// Adjacency-list rendering: `* : 0-0 0-1`, one line per vertex.
    pub fn to_text(&self) -> String {
        let name = |v: usize| if v == 0 { "*".to_string() } else { v.to_string() };
        let mut s = String::new();
        for v in 0..self.vertices {
            let nbrs: Vec<String> = self
                .arcs
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, &(a, b))| {
                    let other = if a == v { b } else { a };
                    format!("e{}->{}", i, name(other))
                })
                .collect();
            s.push_str(&format!("{}: {}\n", name(v), nbrs.join(" ")));
        }
        s
    }

    /// Spanning trees as arc masks, in increasing mask order.
    pub fn spanning_trees(&self) -> Vec<u32> {
        let k = self.arcs.len();
        let need = self.vertices - 1;
        let mut out = Vec::new();
        for mask in 0u32..1 << k {
            if mask.count_ones() as usize != need {
                continue;
            }
            let mut parent: Vec<usize> = (0..self.vertices).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            let acyclic = (0..k).filter(|i| mask >> i & 1 == 1).all(|i| {
                let (a, b) = self.arcs[i];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
                ra != rb
            });
            if acyclic {
                out.push(mask);
            }
        }
        out
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All topological graphs of rank `g` up to basepoint-preserving isomorphism.
/// Such graphs have at most `2g` vertices and `3g - 1` arcs.
pub fn enumerate_topographs(g: usize) -> Vec<TopoGraph> {
    assert!(g >= 1, "rank must be positive");
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for vertices in 1..=2 * g {
        let arcs = g + vertices - 1;
        let pairs: Vec<(usize, usize)> =
            (0..vertices).flat_map(|a| (a..vertices).map(move |b| (a, b))).collect();
        let mut degree = vec![0usize; vertices];
        let mut chosen = Vec::with_capacity(arcs);
        multisets(&pairs, 0, arcs, &mut degree, &mut chosen, &mut |chosen| {
            let t = TopoGraph { vertices, arcs: chosen.to_vec() };
            if t.is_topological() {
                let c = t.canonical();
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        });
    }
    out.sort_by(|a, b| (a.vertices, a.arcs.len(), &a.arcs).cmp(&(b.vertices, b.arcs.len(), &b.arcs)));
    out
}

/// Arc multisets from `pairs[from..]`, pruned by the degree budget: every vertex but
/// the basepoint needs degree 3, the basepoint degree 1 when there are other vertices.
fn multisets(
    pairs: &[(usize, usize)],
    from: usize,
    remaining: usize,
    degree: &mut [usize],
    chosen: &mut Vec<(usize, usize)>,
    emit: &mut dyn FnMut(&[(usize, usize)]),
) {
    let deficit: usize = degree
        .iter()
        .enumerate()
        .map(|(v, &d)| {
            let need = if v == 0 { usize::from(degree.len() > 1) } else { 3 };
            need.saturating_sub(d)
        })
        .sum();
    if deficit > 2 * remaining {
        return;
    }
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for i in from..pairs.len() {
        let (a, b) = pairs[i];
        // Vertices below `a` receive no further arcs.
        if (1..a).any(|v| degree[v] < 3) {
            break;
        }
        degree[a] += 1;
        degree[b] += 1;
        chosen.push((a, b));
        multisets(pairs, i, remaining - 1, degree, chosen, emit);
        chosen.pop();
        degree[a] -= 1;
        degree[b] -= 1;
    }
}

/// Cached `Top(g)`.
pub fn topographs(g: usize) -> Arc<Vec<TopoGraph>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<TopoGraph>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("cache lock").get(&g) {
        return t.clone();
    }
    let t = Arc::new(enumerate_topographs(g));
    cache.lock().expect("cache lock").entry(g).or_insert(t).clone()
}

/// Distinct subwords of `v` by content, the empty word first.
pub fn distinct_subwords(v: &Word) -> Vec<Word> {
    let l = v.letters();
    let mut seen = HashSet::new();
    let mut out = vec![Word::identity()];
    seen.insert(Word::identity());
    for len in 1..=l.len() {
        for start in 0..=l.len() - len {
            let w = Word::from_signed(&l[start..start + len].iter().map(|x| x.signed()).collect::<Vec<_>>());
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
    }
    out
}

/// All `k`-tuples of (possibly empty) subwords of `v`, positions deduplicated by content.
/// At most `(|v| + 1)^(2k)` tuples.
pub fn subword_morphisms(v: &Word, k: usize) -> impl Iterator<Item = Vec<Word>> {
    let values = distinct_subwords(v);
    let mut odometer = vec![0usize; k];
    let mut done = values.is_empty();
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item: Vec<Word> = odometer.iter().map(|&i| values[i].clone()).collect();
        done = true;
        for d in odometer.iter_mut().rev() {
            *d += 1;
            if *d < values.len() {
                done = false;
                break;
            }
            *d = 0;
        }
        Some(item)
    })
}

/// Words written on the arcs of a topological graph, each read from the arc's
/// first endpoint to its second. `visible[i]` marks labels drawn from the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArcLabeling {
    pub graph: TopoGraph,
    pub labels: Vec<Word>,
    pub visible: Vec<bool>,
}

/// Longest word written on an invisible arc.
pub const MAX_INVISIBLE_LEN: usize = 3;

/// Letters leaving each vertex; `None` when two coincide, i.e. the expanded graph folds.
fn leaving_letters(graph: &TopoGraph, labels: &[Option<&Word>]) -> Option<Vec<u64>> {
    let mut masks = vec![0u64; graph.vertices];
    for (i, &(a, b)) in graph.arcs.iter().enumerate() {
        let Some(w) = labels[i] else { continue };
        for (v, l) in [(a, w.first()?), (b, w.last()?.inverse())] {
            let bit = 1u64 << l.slot();
            if masks[v] & bit != 0 {
                return None;
            }
            masks[v] |= bit;
        }
    }
    Some(masks)
}

impl ArcLabeling {
    /// No two arc-ends at a vertex start with the same letter, and every label is nonempty.
    pub fn is_folded(&self) -> bool {
        let labels: Vec<Option<&Word>> = self.labels.iter().map(Some).collect();
        self.labels.iter().all(|w| !w.is_empty()) && leaving_letters(&self.graph, &labels).is_some()
    }

    /// Arc traversals spelling `v` from the basepoint back to it, if there is one.
    /// `true` means the arc is read from its first endpoint.
    pub fn trace(&self, v: &Word) -> Option<Vec<(usize, bool)>> {
        let labels: Vec<Option<Word>> = self.labels.iter().cloned().map(Some).collect();
        trace_partial(&self.graph, &labels, v)
    }

    /// Basis read off the spanning tree `tree` (an arc mask): one element per
    /// non-tree arc, in arc order.
    pub fn tree_basis(&self, tree: u32) -> Vec<Word> {
        let paths = tree_paths(&self.graph, tree);
        let path_word = |v: usize| -> Word {
            paths[v].iter().fold(Word::identity(), |acc, &(arc, fwd)| {
                let w = &self.labels[arc];
                acc.mul(&if fwd { w.clone() } else { w.inverse() })
            })
        };
        (0..self.graph.arcs.len())
            .filter(|i| tree >> i & 1 == 0)
            .map(|i| {
                let (a, b) = self.graph.arcs[i];
                path_word(a).mul(&self.labels[i]).mul(&path_word(b).inverse())
            })
            .collect()
    }
}

/// Traces `v` through the arcs that carry a label; unlabelled arcs are impassable.
fn trace_partial(graph: &TopoGraph, labels: &[Option<Word>], v: &Word) -> Option<Vec<(usize, bool)>> {
    let letters = v.letters();
    let mut at = 0usize;
    let mut pos = 0usize;
    let mut out = Vec::new();
    while pos < letters.len() {
        let c = letters[pos];
        let (arc, forward) = graph.arcs.iter().enumerate().find_map(|(i, &(a, b))| {
            let w = labels[i].as_ref()?;
            if a == at && w.first() == Some(c) {
                Some((i, true))
            } else if b == at && w.last().map(Letter::inverse) == Some(c) {
                Some((i, false))
            } else {
                None
            }
        })?;
        let w = labels[arc].as_ref().expect("labelled");
        let len = w.len();
        if pos + len > letters.len() {
            return None;
        }
        let chunk = &letters[pos..pos + len];
        let matches = if forward {
            chunk == w.letters()
        } else {
            chunk.iter().zip(w.letters().iter().rev()).all(|(x, y)| *x == y.inverse())
        };
        if !matches {
            return None;
        }
        let (a, b) = graph.arcs[arc];
        at = if forward { b } else { a };
        pos += len;
        out.push((arc, forward));
    }
    (at == 0).then_some(out)
}

/// Tree path from the basepoint to every vertex, as arc traversals.
fn tree_paths(graph: &TopoGraph, tree: u32) -> Vec<Vec<(usize, bool)>> {
    let mut paths: Vec<Option<Vec<(usize, bool)>>> = vec![None; graph.vertices];
    paths[0] = Some(Vec::new());
    let mut changed = true;
    while changed {
        changed = false;
        for (i, &(a, b)) in graph.arcs.iter().enumerate() {
            if tree >> i & 1 == 0 {
                continue;
            }
            for (x, y, fwd) in [(a, b, true), (b, a, false)] {
                if paths[y].is_none() {
                    if let Some(p) = paths[x].clone() {
                        let mut p = p;
                        p.push((i, fwd));
                        paths[y] = Some(p);
                        changed = true;
                    }
                }
            }
        }
    }
    paths.into_iter().map(|p| p.expect("spanning tree reaches every vertex")).collect()
}

/// Expression of a traced loop over the basis of `tree`: non-tree arcs in arc order
/// are `x_1, x_2, ...`.
fn expression_over(graph: &TopoGraph, tree: u32, trace: &[(usize, bool)]) -> Word {
    let mut index = vec![0usize; graph.arcs.len()];
    let mut next = 1;
    for (i, slot) in index.iter_mut().enumerate() {
        if tree >> i & 1 == 0 {
            *slot = next;
            next += 1;
        }
    }
    let mut w = Word::identity();
    for &(arc, fwd) in trace {
        if tree >> arc & 1 == 0 {
            w.push(Letter::new(index[arc], !fwd));
        }
    }
    w
}

/// Reduced words of length `1..=MAX_INVISIBLE_LEN` over the ambient alphabet.
fn invisible_fills(rank: usize) -> Vec<Word> {
    let fg = FreeGroup::new(rank).expect("positive rank");
    (1..=MAX_INVISIBLE_LEN).flat_map(|l| fg.words_of_length(l)).collect()
}

/// Labellings of `graph` whose visible labels are exactly the distinct nonempty
/// entries of `labels`, each used at least once in either orientation; remaining
/// arcs are blank and filled with every reduced word of length 1 to 3. Foldable
/// labellings and those with more than `2g - 1` blank arcs are skipped.
pub fn label_graph(graph: &TopoGraph, labels: &[Word], rank: usize) -> Vec<ArcLabeling> {
    let fills = invisible_fills(rank);
    let mut out = Vec::new();
    for partial in visible_assignments(graph, labels) {
        fill_blanks(graph, partial, &fills, &mut out);
    }
    out
}

/// The visible half of [`label_graph`]: blank arcs are left as `None`.
fn visible_assignments(graph: &TopoGraph, labels: &[Word]) -> Vec<Vec<Option<Word>>> {
    let mut effective: Vec<Word> = labels.iter().filter(|w| !w.is_empty()).cloned().collect();
    effective.sort();
    effective.dedup();
    let max_blank = (2 * graph.rank()).saturating_sub(1);
    let mut current: Vec<Option<Word>> = vec![None; graph.arcs.len()];
    let mut used = vec![0usize; effective.len()];
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        blanks: usize,
        graph: &TopoGraph,
        effective: &[Word],
        current: &mut Vec<Option<Word>>,
        used: &mut Vec<usize>,
        max_blank: usize,
        out: &mut Vec<Vec<Option<Word>>>,
    ) {
        let refs: Vec<Option<&Word>> = current.iter().map(Option::as_ref).collect();
        if blanks > max_blank || leaving_letters(graph, &refs).is_none() {
            return;
        }
        if i == graph.arcs.len() {
            if used.iter().all(|&u| u > 0) {
                out.push(current.clone());
            }
            return;
        }
        for j in 0..effective.len() {
            for label in [effective[j].clone(), effective[j].inverse()] {
                current[i] = Some(label);
                used[j] += 1;
                rec(i + 1, blanks, graph, effective, current, used, max_blank, out);
                used[j] -= 1;
            }
        }
        current[i] = None;
        rec(i + 1, blanks + 1, graph, effective, current, used, max_blank, out);
    }

    rec(0, 0, graph, &effective, &mut current, &mut used, max_blank, &mut out);
    out
}

fn fill_blanks(graph: &TopoGraph, partial: Vec<Option<Word>>, fills: &[Word], out: &mut Vec<ArcLabeling>) {
    let visible: Vec<bool> = partial.iter().map(Option::is_some).collect();
    let blanks: Vec<usize> = (0..partial.len()).filter(|&i| !visible[i]).collect();
    let mut labels = partial;
    fn rec(
        b: usize,
        blanks: &[usize],
        graph: &TopoGraph,
        labels: &mut Vec<Option<Word>>,
        visible: &[bool],
        fills: &[Word],
        out: &mut Vec<ArcLabeling>,
    ) {
        if b == blanks.len() {
            out.push(ArcLabeling {
                graph: graph.clone(),
                labels: labels.iter().map(|l| l.clone().expect("filled")).collect(),
                visible: visible.to_vec(),
            });
            return;
        }
        for f in fills {
            labels[blanks[b]] = Some(f.clone());
            let refs: Vec<Option<&Word>> = labels.iter().map(Option::as_ref).collect();
            if leaving_letters(graph, &refs).is_some() {
                rec(b + 1, blanks, graph, labels, visible, fills, out);
            }
        }
        labels[blanks[b]] = None;
    }
    rec(0, &blanks, graph, &mut labels, &visible, fills, out);
}

/// Reads `v` as a loop at the basepoint. On success returns the expression of the
/// loop over the basis of the first spanning tree containing every arc the loop
/// misses, so that every basis element occurs in the expression.
pub fn read_loop(labeling: &ArcLabeling, v: &Word) -> Option<Word> {
    let trace = labeling.trace(v)?;
    let tree = admissible_trees(&labeling.graph, &traversed_mask(&trace)).into_iter().next()?;
    Some(expression_over(&labeling.graph, tree, &trace))
}

fn traversed_mask(trace: &[(usize, bool)]) -> u32 {
    trace.iter().fold(0u32, |m, &(arc, _)| m | 1 << arc)
}

/// Spanning trees containing every arc outside `traversed`.
fn admissible_trees(graph: &TopoGraph, traversed: &u32) -> Vec<u32> {
    let untraversed = !traversed & ((1u32 << graph.arcs.len()) - 1);
    graph.spanning_trees().into_iter().filter(|t| t & untraversed == untraversed).collect()
}

/// A candidate subgroup: a free basis together with the expression of each target over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCandidate {
    pub basis: Vec<Word>,
    /// One expression per target word, each over `x_1..x_m`.
    pub expressions: Vec<Word>,
    #[serde(skip)]
    pub key: Option<CanonicalForm>,
}

impl TestCandidate {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn expression(&self) -> &Word {
        &self.expressions[0]
    }

    pub fn total_len(&self) -> usize {
        self.basis.iter().map(Word::len).sum()
    }

    /// Ordering used to try candidates: rank, then total basis length, then the words.
    pub fn order_key(&self) -> (usize, usize, &[Word]) {
        (self.rank(), self.total_len(), &self.basis)
    }

    /// `candidates=[...] w=...` line for corpus output.
    pub fn to_line(&self) -> String {
        let basis: Vec<String> = self.basis.iter().map(Word::to_text).collect();
        let exprs: Vec<String> = self.expressions.iter().map(Word::to_text).collect();
        format!("basis=[{}] w={}", basis.join(","), exprs.join(";"))
    }

    /// Does every basis element occur in some expression?
    pub fn uses_every_generator(&self) -> bool {
        let mut used = vec![false; self.basis.len()];
        for e in &self.expressions {
            for l in e.letters() {
                used[l.index() - 1] = true;
            }
        }
        used.into_iter().all(|u| u)
    }
}

/// Counts gathered while generating candidates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// `(g, graph index within Top(g), labellings reading every target)`.
    pub per_graph: Vec<(usize, usize, usize)>,
    pub labellings: usize,
    pub emitted: usize,
}

/// Deduplicates candidates by subgroup, keeping the least basis per subgroup.
#[derive(Debug, Default)]
pub struct CandidateSet {
    by_key: BTreeMap<CanonicalForm, TestCandidate>,
}

impl CandidateSet {
    pub fn insert(&mut self, mut c: TestCandidate) {
        let key = c.key.clone().unwrap_or_else(|| CoreGraph::build(&c.basis).canonical_form());
        c.key = Some(key.clone());
        match self.by_key.get(&key) {
            Some(old) if old.order_key() <= c.order_key() => {}
            _ => {
                self.by_key.insert(key, c);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.by_key.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalForm> {
        self.by_key.keys()
    }

    /// Candidates in trial order.
    pub fn into_sorted(self) -> Vec<TestCandidate> {
        let mut v: Vec<TestCandidate> = self.by_key.into_values().collect();
        v.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        v
    }
}

/// Searches one labelled reading of the targets through a fixed topological graph.
struct Reader<'a> {
    graph: &'a TopoGraph,
    targets: &'a [Word],
    max_len: usize,
    fills: &'a [Word],
    trees: Vec<u32>,
    labels: Vec<Option<Word>>,
    masks: Vec<u64>,
    traces: Vec<Vec<(usize, bool)>>,
    found: usize,
    out: &'a mut CandidateSet,
}

impl Reader<'_> {
    fn arc_ends_at(&self, v: usize) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.graph.arcs.iter().enumerate().flat_map(move |(i, &(a, b))| {
            let mut ends = [None, None];
            if a == v {
                ends[0] = Some((i, true));
            }
            if b == v && a != b {
                ends[1] = Some((i, false));
            }
            ends.into_iter().flatten()
        })
    }

    fn set_label(&mut self, arc: usize, w: Word) -> bool {
        let (a, b) = self.graph.arcs[arc];
        let first = 1u64 << w.first().expect("nonempty").slot();
        let last = 1u64 << w.last().expect("nonempty").inverse().slot();
        if self.masks[a] & first != 0 {
            return false;
        }
        self.masks[a] |= first;
        if self.masks[b] & last != 0 {
            self.masks[a] &= !first;
            return false;
        }
        self.masks[b] |= last;
        self.labels[arc] = Some(w);
        true
    }

    fn clear_label(&mut self, arc: usize) {
        let (a, b) = self.graph.arcs[arc];
        let w = self.labels[arc].take().expect("labelled");
        self.masks[a] &= !(1u64 << w.first().expect("nonempty").slot());
        self.masks[b] &= !(1u64 << w.last().expect("nonempty").inverse().slot());
    }

    fn walk(&mut self, t: usize, pos: usize, at: usize) {
        let v = &self.targets[t];
        if pos == v.len() {
            if at != 0 {
                return;
            }
            if t + 1 < self.targets.len() {
                self.traces.push(Vec::new());
                self.walk(t + 1, 0, 0);
                self.traces.pop();
            } else {
                self.complete();
            }
            return;
        }
        let letters = v.letters();
        let c = letters[pos];
        // A labelled arc-end starting with `c` must be followed.
        if self.masks[at] >> c.slot() & 1 == 1 {
            let ends: Vec<(usize, bool)> = self.arc_ends_at(at).collect();
            let mut candidates = Vec::new();
            for (arc, fwd) in ends {
                let Some(w) = &self.labels[arc] else { continue };
                let oriented = if fwd { w.clone() } else { w.inverse() };
                if oriented.first() == Some(c) {
                    candidates.push((arc, fwd, oriented));
                }
                // A loop also leaves `at` backwards.
                let (a, b) = self.graph.arcs[arc];
                if a == b && fwd && w.last().map(Letter::inverse) == Some(c) {
                    candidates.push((arc, false, w.inverse()));
                }
            }
            for (arc, fwd, oriented) in candidates {
                let len = oriented.len();
                if pos + len <= letters.len() && &letters[pos..pos + len] == oriented.letters() {
                    let (a, b) = self.graph.arcs[arc];
                    let next = if fwd { b } else { a };
                    self.traces.last_mut().expect("trace").push((arc, fwd));
                    self.walk(t, pos + len, next);
                    self.traces.last_mut().expect("trace").pop();
                }
            }
            return;
        }
        let open: Vec<(usize, bool)> =
            self.arc_ends_at(at).filter(|&(arc, _)| self.labels[arc].is_none()).collect();
        for (arc, fwd) in open {
            let (a, b) = self.graph.arcs[arc];
            let next = if fwd { b } else { a };
            for len in 1..=letters.len() - pos {
                let chunk = Word::from_signed(
                    &letters[pos..pos + len].iter().map(|x| x.signed()).collect::<Vec<_>>(),
                );
                let label = if fwd { chunk } else { chunk.inverse() };
                if !self.set_label(arc, label) {
                    continue;
                }
                self.traces.last_mut().expect("trace").push((arc, fwd));
                self.walk(t, pos + len, next);
                self.traces.last_mut().expect("trace").pop();
                self.clear_label(arc);
            }
        }
    }

    /// All targets read; fill the invisible arcs and emit.
    fn complete(&mut self) {
        let g = self.graph.rank();
        let blanks: Vec<usize> = (0..self.labels.len()).filter(|&i| self.labels[i].is_none()).collect();
        if blanks.len() > (2 * g).saturating_sub(1) {
            return;
        }
        let traversed = self.traces.iter().fold(0u32, |m, t| m | traversed_mask(t));
        let untraversed = blanks.iter().fold(0u32, |m, &i| m | 1 << i);
        debug_assert_eq!(traversed & untraversed, 0);
        let trees: Vec<u32> = self.trees.iter().copied().filter(|t| t & untraversed == untraversed).collect();
        if trees.is_empty() {
            return;
        }
        self.found += 1;
        self.fill(&blanks, 0, &trees);
    }

    fn fill(&mut self, blanks: &[usize], b: usize, trees: &[u32]) {
        if b == blanks.len() {
            self.emit(trees);
            return;
        }
        for fi in 0..self.fills.len() {
            let f = self.fills[fi].clone();
            if self.set_label(blanks[b], f) {
                self.fill(blanks, b + 1, trees);
                self.clear_label(blanks[b]);
            }
        }
    }

    fn emit(&mut self, trees: &[u32]) {
        let labeling = ArcLabeling {
            graph: self.graph.clone(),
            labels: self.labels.iter().map(|l| l.clone().expect("labelled")).collect(),
            visible: vec![true; self.labels.len()],
        };
        let lens: Vec<usize> = labeling.labels.iter().map(Word::len).collect();
        for &tree in trees {
            let paths = tree_paths(self.graph, tree);
            let plen = |v: usize| paths[v].iter().map(|&(a, _)| lens[a]).sum::<usize>();
            let short = (0..lens.len()).filter(|i| tree >> i & 1 == 0).all(|i| {
                let (a, b) = self.graph.arcs[i];
                plen(a) + lens[i] + plen(b) <= self.max_len
            });
            if !short {
                continue;
            }
            let basis = labeling.tree_basis(tree);
            let expressions: Vec<Word> =
                self.traces.iter().map(|t| expression_over(self.graph, tree, t)).collect();
            debug_assert!(self
                .targets
                .iter()
                .zip(&expressions)
                .all(|(v, e)| e.substitute(&basis).as_ref() == Ok(v)));
            self.out.insert(TestCandidate { basis, expressions, key: None });
            return;
        }
    }
}

/// Test-subgroup candidates for the targets `vs` in `F_rank`: subgroups of rank
/// `1..=rank` containing every target, whose core graph is a labelled topological
/// graph with visible arcs spelling subwords of the targets and invisible arcs of
/// length at most 3, with a basis of elements no longer than the longest target in
/// which every basis element occurs. One candidate per subgroup.
pub fn generate_candidates(vs: &[Word], rank: usize) -> (Vec<TestCandidate>, SearchStats) {
    assert!(vs.iter().all(|v| !v.is_empty()), "targets must be nontrivial");
    let max_len = vs.iter().map(Word::len).max().unwrap_or(0);
    let fills = invisible_fills(rank);
    let mut set = CandidateSet::default();
    let mut stats = SearchStats::default();
    for g in 1..=rank {
        let graphs = topographs(g);
        for (gi, graph) in graphs.iter().enumerate() {
            let mut reader = Reader {
                graph,
                targets: vs,
                max_len,
                fills: &fills,
                trees: graph.spanning_trees(),
                labels: vec![None; graph.arcs.len()],
                masks: vec![0; graph.vertices],
                traces: vec![Vec::new()],
                found: 0,
                out: &mut set,
            };
            reader.walk(0, 0, 0);
            stats.per_graph.push((g, gi, reader.found));
            stats.labellings += reader.found;
        }
    }
    stats.emitted = set.len();
    (set.into_sorted(), stats)
}

/// The same candidates as [`generate_candidates`] for a single target, by blind
/// enumeration of subword tuples and labellings. Exponentially slower; kept for
/// cross-checking on short targets.
pub fn generate_candidates_by_labelling(v: &Word, rank: usize) -> Vec<TestCandidate> {
    let fills = invisible_fills(rank);
    let mut set = CandidateSet::default();
    for g in 1..=rank {
        for graph in topographs(g).iter() {
            let k = graph.arcs.len();
            let mut tried = HashSet::new();
            for tuple in subword_morphisms(v, k) {
                let mut eff: Vec<Word> = tuple.into_iter().filter(|w| !w.is_empty()).collect();
                eff.sort();
                eff.dedup();
                if !tried.insert(eff.clone()) {
                    continue;
                }
                for partial in visible_assignments(graph, &eff) {
                    let Some(trace) = trace_partial(graph, &partial, v) else { continue };
                    // Visible labels must be exactly the traversed arcs.
                    let traversed = traversed_mask(&trace);
                    let vis_mask = partial.iter().enumerate().fold(0u32, |m, (i, x)| m | u32::from(x.is_some()) << i);
                    if vis_mask != traversed {
                        continue;
                    }
                    let trees = admissible_trees(graph, &traversed);
                    let mut filled = Vec::new();
                    fill_blanks(graph, partial, &fills, &mut filled);
                    for labeling in filled {
                        for &tree in &trees {
                            let basis = labeling.tree_basis(tree);
                            if basis.iter().all(|b| b.len() <= v.len()) {
                                let expressions = vec![expression_over(graph, tree, &trace)];
                                set.insert(TestCandidate { basis, expressions, key: None });
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    set.into_sorted()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn graph(vertices: usize, arcs: &[(usize, usize)]) -> TopoGraph {
        TopoGraph { vertices, arcs: arcs.to_vec() }
    }

    #[test]
    fn rank_one_graphs() {
        let top1 = enumerate_topographs(1);
        assert_eq!(top1.len(), 2);
        assert!(top1.contains(&graph(1, &[(0, 0)])));
        assert!(top1.contains(&graph(2, &[(0, 1), (1, 1)])));
    }

    #[test]
    fn rank_two_graphs_respect_bounds() {
        let top2 = enumerate_topographs(2);
        for t in &top2 {
            assert!(t.arcs.len() <= 5 && t.vertices <= 4, "{t:?}");
            assert!(t.is_topological());
            assert_eq!(t.rank(), 2);
        }
        let wedge = graph(1, &[(0, 0), (0, 0)]);
        let theta = graph(2, &[(0, 1), (0, 1), (0, 1)]);
        let dumbbell = graph(2, &[(0, 0), (0, 1), (1, 1)]);
        for t in [wedge, theta, dumbbell] {
            assert!(top2.contains(&t.canonical()), "{t:?}");
        }
    }

    #[test]
    fn subword_examples() {
        assert_eq!(subword_morphisms(&w("ab"), 1).count(), 4);
        assert!(subword_morphisms(&w("ab"), 1).count() <= 9);
        let vals: Vec<Vec<Word>> = subword_morphisms(&w("a"), 1).collect();
        assert_eq!(vals, vec![vec![Word::identity()], vec![w("a")]]);
        let vals: Vec<Vec<Word>> = subword_morphisms(&w("aa"), 1).collect();
        assert_eq!(vals, vec![vec![Word::identity()], vec![w("a")], vec![w("aa")]]);
        assert_eq!(subword_morphisms(&w("aba"), 2).count(), 36);
    }

    #[test]
    fn label_graph_examples() {
        let loop1 = graph(1, &[(0, 0)]);
        let ls = label_graph(&loop1, &[w("aa")], 2);
        assert_eq!(ls.len(), 2);
        assert!(ls.iter().any(|l| l.labels == vec![w("aa")]));
        assert!(ls.iter().all(|l| l.is_folded()));

        let wedge = graph(1, &[(0, 0), (0, 0)]);
        assert!(label_graph(&wedge, &[w("a")], 2).iter().all(|l| l.visible.iter().filter(|&&v| v).count() == 1));
        let folded = ArcLabeling { graph: wedge.clone(), labels: vec![w("a"), w("a")], visible: vec![true, true] };
        assert!(!folded.is_folded());
        let folded = ArcLabeling { graph: wedge, labels: vec![w("ab"), w("aB")], visible: vec![true, true] };
        assert!(!folded.is_folded());
    }

    #[test]
    fn read_loop_examples() {
        let loop1 = graph(1, &[(0, 0)]);
        let l = ArcLabeling { graph: loop1.clone(), labels: vec![w("a")], visible: vec![true] };
        assert_eq!(read_loop(&l, &w("aa")), Some(w("aa")));
        assert_eq!(read_loop(&l, &w("b")), None);

        let lollipop = graph(2, &[(0, 1), (1, 1)]);
        let l = ArcLabeling { graph: lollipop, labels: vec![w("a"), w("b")], visible: vec![true, true] };
        assert_eq!(read_loop(&l, &w("abA")), Some(w("a")));
        assert_eq!(l.tree_basis(0b01), vec![w("abA")]);
    }

    #[test]
    fn candidate_examples() {
        let (c, _) = generate_candidates(&[w("aa")], 2);
        let got: Vec<(Vec<Word>, Word)> = c.iter().map(|c| (c.basis.clone(), c.expression().clone())).collect();
        assert_eq!(&got[..2], &[(vec![w("a")], w("aa")), (vec![w("aa")], w("a"))]);
        // Rank 2 is not empty: aa = (aB)(AB)^-1 with both generators used.
        let key = |b: &[&str]| CoreGraph::build(&b.iter().map(|s| w(s)).collect::<Vec<_>>()).canonical_form();
        let keys: Vec<CanonicalForm> = c.iter().map(|c| c.key.clone().unwrap()).collect();
        assert!(keys.contains(&key(&["AB", "aB"])));
        assert!(keys.contains(&key(&["Ab", "ab"])));
        assert_eq!(c.iter().filter(|c| c.rank() == 2).count(), 2);

        let (c, _) = generate_candidates(&[w("a")], 2);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].basis.clone(), c[0].expression().clone()), (vec![w("a")], w("a")));
    }

    #[test]
    fn candidates_satisfy_their_invariants() {
        let v = w("abAbb");
        let (cands, _) = generate_candidates(&[v.clone()], 2);
        assert!(!cands.is_empty());
        for c in cands {
            assert_eq!(c.expression().substitute(&c.basis).unwrap(), v);
            assert!(c.basis.iter().all(|b| b.len() <= v.len()));
            assert_eq!(CoreGraph::build(&c.basis).rank(), c.rank());
            assert!(c.uses_every_generator());
        }
    }

    #[test]
    fn guided_search_matches_blind_labelling() {
        let f2 = FreeGroup::new(2).unwrap();
        for v in f2.words_up_to(2).into_iter().skip(1) {
            let keys = |cs: Vec<TestCandidate>| -> Vec<CanonicalForm> {
                let mut k: Vec<_> = cs.into_iter().map(|c| c.key.unwrap()).collect();
                k.sort();
                k
            };
            let guided = keys(generate_candidates(&[v.clone()], 2).0);
            let blind = keys(generate_candidates_by_labelling(&v, 2));
            assert_eq!(guided, blind, "v = {v}");
        }
    }
}
