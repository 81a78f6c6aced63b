//! Brute-force oracles shared by the integration tests. Each one is written
//! directly from a definition and shares no code with the library algorithms
//! it checks.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use monomorph::{FreeGroup, Word};
use rand::Rng;

/// A random reduced word of exactly `len` letters over `rank` generators.
pub fn random_word(rng: &mut impl Rng, rank: usize, len: usize) -> Word {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=rank as i32);
        let x = if rng.gen_bool(0.5) { g } else { -g };
        if letters.last() == Some(&-x) {
            continue;
        }
        letters.push(x);
    }
    Word::from_signed(&letters)
}

pub fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

pub fn all_words(rank: usize, max_len: usize) -> Vec<Word> {
    FreeGroup::new(rank).unwrap().words_up_to(max_len)
}

// ---------------------------------------------------------------------------
// Topological graphs straight from the definition.

/// Basepointed multigraphs of rank `g` (connected, every vertex but 0 of degree
/// at least 3) up to isomorphisms fixing 0, as `(vertices, arcs)`.
///
/// Vertex bound: with `E = g + V - 1` arcs, `2E >= 3(V - 1) + deg(0)` and
/// `deg(0) >= 1` once `V >= 2`, which gives `V <= 2g`.
pub fn brute_topographs(g: usize) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut reps: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for v in 1..=2 * g {
        let e = g + v - 1;
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
        let mut arcs = Vec::with_capacity(e);
        every_multiset(&pairs, 0, e, &mut arcs, &mut |arcs| {
            if is_topological(v, arcs) && !reps.iter().any(|(rv, ra)| *rv == v && isomorphic(v, ra, arcs)) {
                reps.push((v, arcs.to_vec()));
            }
        });
    }
    reps
}

/// Every multiset of `left` more items from `items[from..]`, no pruning.
fn every_multiset<T: Copy>(items: &[T], from: usize, left: usize, acc: &mut Vec<T>, f: &mut dyn FnMut(&[T])) {
    if left == 0 {
        f(acc);
        return;
    }
    for i in from..items.len() {
        acc.push(items[i]);
        every_multiset(items, i, left - 1, acc, f);
        acc.pop();
    }
}

fn is_topological(v: usize, arcs: &[(usize, usize)]) -> bool {
    let mut deg = vec![0; v];
    let mut adj = vec![Vec::new(); v];
    for &(a, b) in arcs {
        deg[a] += 1;
        deg[b] += 1;
        adj[a].push(b);
        adj[b].push(a);
    }
    if (1..v).any(|x| deg[x] < 3) {
        return false;
    }
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn multiplicity(v: usize, arcs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; v]; v];
    for &(a, b) in arcs {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

/// Backtracking search for a vertex bijection fixing 0 that preserves multiplicities.
pub fn isomorphic(v: usize, a: &[(usize, usize)], b: &[(usize, usize)]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ma = multiplicity(v, a);
    let mb = multiplicity(v, b);
    let mut map = vec![usize::MAX; v];
    let mut used = vec![false; v];
    map[0] = 0;
    used[0] = true;
    fn extend(i: usize, v: usize, ma: &[Vec<usize>], mb: &[Vec<usize>], map: &mut [usize], used: &mut [bool]) -> bool {
        if i == v {
            return true;
        }
        for t in 1..v {
            if used[t] {
                continue;
            }
            map[i] = t;
            let ok = (0..=i).all(|j| ma[i][j] == mb[t][map[j]]);
            if ok {
                used[t] = true;
                if extend(i + 1, v, ma, mb, map, used) {
                    return true;
                }
                used[t] = false;
            }
        }
        map[i] = usize::MAX;
        false
    }
    if ma[0][0] != mb[0][0] {
        return false;
    }
    extend(1, v, &ma, &mb, &mut map, &mut used)
}

// ---------------------------------------------------------------------------
// Subgroups.

/// Every element of `<gens>` with a reduced expression of at most `len` letters.
/// Calls `f` on every element given by a reduced expression of length at most
/// `len` over `gens`, as freely reduced signed letters. Elements may repeat.
pub fn visit_products(gens: &[Word], len: usize, f: &mut dyn FnMut(&[i32])) {
    let mut letters: Vec<Vec<i32>> = Vec::new();
    for g in gens {
        letters.push(g.to_signed());
        letters.push(g.inverse().to_signed());
    }
    let mut buf: Vec<i32> = Vec::new();
    f(&buf);
    visit(&letters, len, usize::MAX, &mut buf, f);
}

fn visit(letters: &[Vec<i32>], left: usize, last: usize, buf: &mut Vec<i32>, f: &mut dyn FnMut(&[i32])) {
    if left == 0 {
        return;
    }
    for (i, l) in letters.iter().enumerate() {
        if last != usize::MAX && i == last ^ 1 {
            continue;
        }
        let mut cancelled = 0;
        while cancelled < l.len() && buf.last() == Some(&-l[cancelled]) {
            buf.pop();
            cancelled += 1;
        }
        buf.extend_from_slice(&l[cancelled..]);
        f(buf);
        visit(letters, left - 1, i, buf, f);
        buf.truncate(buf.len() - (l.len() - cancelled));
        for &x in l[..cancelled].iter().rev() {
            buf.push(-x);
        }
    }
}

pub fn products(gens: &[Word], len: usize) -> HashSet<Word> {
    let mut letters: Vec<Word> = Vec::new();
    for g in gens {
        letters.push(g.clone());
        letters.push(g.inverse());
    }
    let mut out = HashSet::new();
    out.insert(Word::identity());
    // (element, index of last letter used) so that expressions stay reduced
    let mut frontier: Vec<(Word, usize)> = vec![(Word::identity(), usize::MAX)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for (e, last) in &frontier {
            for (i, l) in letters.iter().enumerate() {
                if *last != usize::MAX && i == (*last ^ 1) {
                    continue;
                }
                let p = e.mul(l);
                out.insert(p.clone());
                next.push((p, i));
            }
        }
        frontier = next;
    }
    out
}

/// Naive folding: repeatedly merge any two edges sharing a source (or target) and
/// a label, then strip degree-one vertices other than the basepoint. Returns
/// `(vertices, edges)` of the core graph.
pub fn naive_core(gens: &[Word]) -> (usize, Vec<(usize, i32, usize)>) {
    let mut edges: Vec<(usize, i32, usize)> = Vec::new();
    let mut next = 1usize;
    for g in gens {
        let l = g.to_signed();
        if l.is_empty() {
            continue;
        }
        let mut at = 0usize;
        for (i, &x) in l.iter().enumerate() {
            let to = if i + 1 == l.len() {
                0
            } else {
                next += 1;
                next - 1
            };
            if x > 0 {
                edges.push((at, x, to));
            } else {
                edges.push((to, -x, at));
            }
            at = to;
        }
    }
    edges.sort_unstable();
    edges.dedup();
    loop {
        let mut merge: Option<(usize, usize)> = None;
        'scan: for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a, x, b) = edges[i];
                let (c, y, d) = edges[j];
                if x != y {
                    continue;
                }
                if a == c && b != d {
                    merge = Some((b.min(d), b.max(d)));
                    break 'scan;
                }
                if b == d && a != c {
                    merge = Some((a.min(c), a.max(c)));
                    break 'scan;
                }
            }
        }
        match merge {
            Some((keep, gone)) => {
                for e in edges.iter_mut() {
                    if e.0 == gone {
                        e.0 = keep;
                    }
                    if e.2 == gone {
                        e.2 = keep;
                    }
                }
                edges.sort_unstable();
                edges.dedup();
            }
            None => break,
        }
    }
    loop {
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for &(a, _, b) in &edges {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        let before = edges.len();
        edges.retain(|&(a, _, b)| (a == 0 || deg[&a] > 1) && (b == 0 || deg[&b] > 1));
        if edges.len() == before {
            break;
        }
    }
    let mut vs: HashSet<usize> = edges.iter().flat_map(|&(a, _, b)| [a, b]).collect();
    vs.insert(0);
    (vs.len(), edges)
}

pub fn naive_rank(gens: &[Word]) -> usize {
    let (v, e) = naive_core(gens);
    e.len() + 1 - v
}

// ---------------------------------------------------------------------------
// Automorphism orbits in F_2 via Nielsen moves.

/// Nielsen generators of Aut(F_2) and their inverses, as images of (a, b).
pub fn nielsen_moves_f2() -> Vec<[Word; 2]> {
    let m = |x: &str, y: &str| [w(x), w(y)];
    vec![
        m("b", "a"),
        m("A", "b"),
        m("a", "B"),
        m("ab", "b"),
        m("aB", "b"),
        m("ba", "b"),
        m("Ba", "b"),
        m("a", "ba"),
        m("a", "Ab"),
        m("a", "ab"),
        m("a", "bA"),
    ]
}

/// Partition of `words` by the relation "some composition of at most `depth`
/// Nielsen moves, with every intermediate image of length at most `cap`, joins
/// them", closed under transitivity. Returns a class id per word.
pub fn nielsen_classes(words: &[Word], depth: usize, cap: usize) -> Vec<usize> {
    let moves = nielsen_moves_f2();
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, start) in words.iter().enumerate() {
        let mut seen: HashSet<Word> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([(start.clone(), 0usize)]);
        while let Some((x, d)) = queue.pop_front() {
            if let Some(&j) = index.get(&x) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
            if d == depth {
                continue;
            }
            for m in &moves {
                let y = x.substitute(m).unwrap();
                if y.len() <= cap && seen.insert(y.clone()) {
                    queue.push_back((y, d + 1));
                }
            }
        }
    }
    (0..words.len()).map(|i| find(&mut parent, i)).collect()
}
