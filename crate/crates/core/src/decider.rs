//! The decision procedure, its witnesses, and a brute-force oracle.
//!
//! For `u, v` in `F_n`, a monomorphism `f` with `f(u) = v` exists iff some subgroup
//! `H = <b_1..b_m>` with `m <= n` contains `v = w(b_1..b_m)` and an automorphism of
//! `F_n = <z_1..z_n>` carries `u(z)` to `w(z_1..z_m)`. The candidate subgroups come
//! from one of two [`Strategy`] values; the automorphism question is answered by
//! [`crate::whitehead::OrbitSearch`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stallings::{image_rank, CoreGraph};
use crate::subgroup_search::{generate_candidates, CandidateSet, SearchStats, TestCandidate};
use crate::whitehead::{OrbitCertificate, OrbitSearch, Prepared};
use crate::words::{FreeGroup, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Every generating set of at most `n` words no longer than the target.
    Exhaustive,
    /// Labelled topological graphs; polynomial in the target length.
    #[serde(rename = "testsub")]
    TestSubgroups,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::TestSubgroups => "testsub",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "testsub" => Ok(Strategy::TestSubgroups),
            other => Err(format!("unknown strategy {other:?} (expected exhaustive or testsub)")),
        }
    }
}

/// `us[j]` should map to `vs[j]` for every `j`; a single pair when `us.len() == 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub rank: usize,
    pub us: Vec<Word>,
    pub vs: Vec<Word>,
}

impl Instance {
    pub fn new(rank: usize, u: Word, v: Word) -> Instance {
        Instance { rank, us: vec![u], vs: vec![v] }
    }

    pub fn multi(rank: usize, us: Vec<Word>, vs: Vec<Word>) -> Instance {
        Instance { rank, us, vs }
    }

    /// Parses words in letter syntax against the given rank.
    pub fn parse(rank: usize, u: &str, v: &str) -> Result<Instance> {
        let fg = FreeGroup::new(rank)?;
        Ok(Instance::new(rank, fg.parse(u)?, fg.parse(v)?))
    }

    pub fn validate(&self) -> Result<()> {
        let fg = FreeGroup::new(self.rank)?;
        if self.us.len() != self.vs.len() {
            return Err(Error::ArityMismatch { left: self.us.len(), right: self.vs.len() });
        }
        if self.us.is_empty() {
            return Err(Error::EmptyTuple);
        }
        self.us.iter().chain(&self.vs).try_for_each(|w| fg.check(w))
    }
}

/// Images `f(x_1), ..., f(x_n)` of a monomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub images: Vec<Word>,
}

impl Witness {
    pub fn identity(rank: usize) -> Witness {
        Witness { images: (1..=rank).map(Word::gen).collect() }
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images).expect("witness has an image for every generator")
    }

    /// Sends every `us[j]` to `vs[j]` and is injective.
    pub fn is_valid_for(&self, inst: &Instance) -> bool {
        self.images.len() == inst.rank
            && inst.us.iter().zip(&inst.vs).all(|(u, v)| u.substitute(&self.images).as_ref() == Ok(v))
            && image_rank(&self.images) == inst.rank
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Answer {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

/// The candidate and automorphism that produced a YES.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accepted {
    pub candidate: TestCandidate,
    pub certificate: OrbitCertificate,
    /// Words completing the candidate basis to rank `n`.
    pub extension: Vec<Word>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    /// Set when the instance was settled without a candidate search.
    pub shortcut: Option<String>,
    pub candidates: usize,
    pub whitehead_calls: usize,
    pub search: Option<SearchStats>,
    pub accepted: Option<Accepted>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub candidate_generation: Duration,
    pub whitehead: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<Witness>,
    pub trace: Trace,
    pub timings: Timings,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }

    fn shortcut(answer: Answer, witness: Option<Witness>, why: &str) -> Verdict {
        Verdict {
            answer,
            witness,
            trace: Trace { shortcut: Some(why.to_string()), ..Trace::default() },
            timings: Timings::default(),
        }
    }
}

/// Candidates for a fixed target tuple, with their expressions already minimised.
struct CandidateTable {
    candidates: Vec<TestCandidate>,
    prepared: Vec<Prepared>,
    stats: Option<SearchStats>,
    elapsed: Duration,
}

/// Reusable decision state for one rank: move tables plus per-target candidate caches.
pub struct Decider {
    rank: usize,
    search: OrbitSearch,
    tables: HashMap<(Strategy, Vec<Word>), Arc<CandidateTable>>,
}

impl Decider {
    pub fn new(rank: usize) -> Result<Decider> {
        FreeGroup::new(rank)?;
        Ok(Decider { rank, search: OrbitSearch::new(rank), tables: HashMap::new() })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Candidate subgroups for `vs`, in trial order.
    pub fn candidates(&mut self, vs: &[Word], strategy: Strategy) -> Vec<TestCandidate> {
        self.table(vs, strategy).candidates.clone()
    }

    fn table(&mut self, vs: &[Word], strategy: Strategy) -> Arc<CandidateTable> {
        let key = (strategy, vs.to_vec());
        if let Some(t) = self.tables.get(&key) {
            return t.clone();
        }
        let start = Instant::now();
        let (candidates, stats) = match strategy {
            Strategy::TestSubgroups => {
                let (c, s) = generate_candidates(vs, self.rank);
                (c, Some(s))
            }
            Strategy::Exhaustive => {
                let c = exhaustive_candidates(vs, self.rank).into_iter().map(|(c, _)| c).collect();
                (c, None)
            }
        };
        let prepared = candidates
            .iter()
            .map(|c| self.search.prepare(&c.expressions).expect("expressions lie in rank m <= n"))
            .collect();
        let table = Arc::new(CandidateTable { candidates, prepared, stats, elapsed: start.elapsed() });
        self.tables.insert(key, table.clone());
        table
    }

    /// Decides a single pair or a tuple instance.
    pub fn decide(&mut self, inst: &Instance, strategy: Strategy) -> Result<Verdict> {
        if inst.rank != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: inst.rank });
        }
        inst.validate()?;
        let n = self.rank;
        // Coordinates 1 -> 1 impose nothing; u -> 1 with u != 1 is never injective.
        let mut us = Vec::new();
        let mut vs = Vec::new();
        for (u, v) in inst.us.iter().zip(&inst.vs) {
            match (u.is_empty(), v.is_empty()) {
                (true, true) => {}
                (true, false) => return Ok(Verdict::shortcut(Answer::No, None, "trivial source, nontrivial target")),
                (false, true) => return Ok(Verdict::shortcut(Answer::No, None, "nontrivial source, trivial target")),
                (false, false) => {
                    us.push(u.clone());
                    vs.push(v.clone());
                }
            }
        }
        if us.is_empty() {
            return Ok(Verdict::shortcut(Answer::Yes, Some(Witness::identity(n)), "all coordinates trivial"));
        }
        if n == 1 {
            return Ok(decide_rank_one(&us, &vs));
        }

        let table = self.table(&vs, strategy);
        let start = Instant::now();
        let source = self.search.prepare(&us)?;
        let mut trace = Trace {
            candidates: table.candidates.len(),
            search: table.stats.clone(),
            ..Trace::default()
        };
        for (cand, target) in table.candidates.iter().zip(&table.prepared) {
            if source.minimal_len() != target.minimal_len() {
                continue;
            }
            trace.whitehead_calls += 1;
            let Some(cert) = self.search.equivalent_prepared(&source, target) else { continue };
            let extension = extend_basis(&cand.basis, n);
            let witness = build_witness(&cand.basis, &extension, &cert, n);
            debug_assert!(witness.is_valid_for(&Instance::multi(n, us.clone(), vs.clone())));
            trace.accepted = Some(Accepted { candidate: cand.clone(), certificate: cert, extension });
            return Ok(Verdict {
                answer: Answer::Yes,
                witness: Some(witness),
                trace,
                timings: Timings { candidate_generation: table.elapsed, whitehead: start.elapsed() },
            });
        }
        Ok(Verdict {
            answer: Answer::No,
            witness: None,
            trace,
            timings: Timings { candidate_generation: table.elapsed, whitehead: start.elapsed() },
        })
    }
}

/// In `F_1` a monomorphism is `x -> x^k` with `k != 0`.
fn decide_rank_one(us: &[Word], vs: &[Word]) -> Verdict {
    let exp = |w: &Word| w.letters().iter().map(|l| i64::from(l.sign())).sum::<i64>();
    let (a, b) = (exp(&us[0]), exp(&vs[0]));
    let k = b / a;
    let fits = b % a == 0 && us.iter().zip(vs).all(|(u, v)| exp(u) * k == exp(v));
    if fits {
        let witness = Witness { images: vec![Word::gen(1).pow(k)] };
        Verdict::shortcut(Answer::Yes, Some(witness), "rank one: exponent divisibility")
    } else {
        Verdict::shortcut(Answer::No, None, "rank one: exponent divisibility")
    }
}

/// Greedily adds words in length-lexicographic order that raise the rank, until the
/// subgroup has rank `n`. Returns the added words.
pub fn extend_basis(basis: &[Word], n: usize) -> Vec<Word> {
    let fg = FreeGroup::new(n).expect("positive rank");
    let mut current = basis.to_vec();
    let mut added = Vec::new();
    let mut len = 1;
    while current.len() < n {
        for c in fg.words_of_length(len) {
            if current.len() == n {
                break;
            }
            current.push(c.clone());
            if image_rank(&current) == current.len() {
                added.push(c);
            } else {
                current.pop();
            }
        }
        len += 1;
        assert!(len <= 64, "no rank-raising extension found for {basis:?}");
    }
    added
}

/// `f(x_i) = cert(z_i)` evaluated at `z = (basis, extension)`.
pub fn build_witness(basis: &[Word], extension: &[Word], cert: &OrbitCertificate, n: usize) -> Witness {
    let mut at: Vec<Word> = basis.to_vec();
    at.extend_from_slice(extension);
    assert_eq!(at.len(), n, "basis and extension must have n words");
    let images = cert
        .images(n)
        .iter()
        .map(|z| z.substitute(&at).expect("certificate images lie in rank n"))
        .collect();
    Witness { images }
}

/// Generating sets of at most `n` nontrivial words of length at most `max |v_j|`
/// that freely generate a subgroup containing every target, one per subgroup.
/// The flag says whether some listed basis of that subgroup uses every generator
/// in the expressions of the targets.
pub fn exhaustive_candidates(vs: &[Word], n: usize) -> Vec<(TestCandidate, bool)> {
    let max_len = vs.iter().map(Word::len).max().unwrap_or(0);
    let fg = FreeGroup::new(n).expect("positive rank");
    let pool: Vec<Word> = fg
        .words_up_to(max_len)
        .into_iter()
        .filter(|w| !w.is_empty() && *w <= w.inverse())
        .collect();
    let mut all = CandidateSet::default();
    let mut full = CandidateSet::default();
    let mut chosen: Vec<usize> = Vec::new();

    fn rec(
        from: usize,
        n: usize,
        pool: &[Word],
        vs: &[Word],
        chosen: &mut Vec<usize>,
        all: &mut CandidateSet,
        full: &mut CandidateSet,
    ) {
        if !chosen.is_empty() {
            let basis: Vec<Word> = chosen.iter().map(|&i| pool[i].clone()).collect();
            let core = CoreGraph::build(&basis);
            if core.rank() == basis.len() {
                let expressions: Option<Vec<Word>> =
                    vs.iter().map(|v| core.member(v).map(|m| m.expression)).collect();
                if let Some(expressions) = expressions {
                    let cand = TestCandidate { basis, expressions, key: Some(core.canonical_form()) };
                    if cand.uses_every_generator() {
                        full.insert(cand.clone());
                    }
                    all.insert(cand);
                }
            } else {
                // Supersets of a dependent set are dependent.
                return;
            }
        }
        if chosen.len() == n {
            return;
        }
        for i in from..pool.len() {
            chosen.push(i);
            rec(i + 1, n, pool, vs, chosen, all, full);
            chosen.pop();
        }
    }

    rec(0, n, &pool, vs, &mut chosen, &mut all, &mut full);
    let full_keys: BTreeSet<_> = full.keys().cloned().collect();
    let mut out: Vec<(TestCandidate, bool)> = Vec::new();
    let full_sorted = full.into_sorted();
    let mut by_key: HashMap<_, TestCandidate> =
        full_sorted.into_iter().map(|c| (c.key.clone().expect("keyed"), c)).collect();
    for c in all.into_sorted() {
        let key = c.key.clone().expect("keyed");
        if full_keys.contains(&key) {
            out.push((by_key.remove(&key).expect("present"), true));
        } else {
            out.push((c, false));
        }
    }
    out.sort_by(|a, b| a.0.order_key().cmp(&b.0.order_key()));
    out
}

/// Decides `u -> v` in `F_n`.
pub fn decide(inst: &Instance, strategy: Strategy) -> Result<Verdict> {
    Decider::new(inst.rank)?.decide(inst, strategy)
}

/// Decides whether one monomorphism sends every `us[j]` to `vs[j]`.
pub fn decide_multi(inst: &Instance, strategy: Strategy) -> Result<Verdict> {
    decide(inst, strategy)
}

/// Every `n`-tuple of reduced words of length at most `bound`, in length-lex order.
fn tuples(rank: usize, bound: usize) -> impl Iterator<Item = Vec<Word>> {
    let words = FreeGroup::new(rank).expect("positive rank").words_up_to(bound);
    let mut odometer = vec![0usize; rank];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item = odometer.iter().map(|&i| words[i].clone()).collect();
        done = true;
        for d in odometer.iter_mut().rev() {
            *d += 1;
            if *d < words.len() {
                done = false;
                break;
            }
            *d = 0;
        }
        Some(item)
    })
}

/// Brute force: the first injective assignment of words of length at most `bound`
/// to the generators that sends every `us[j]` to `vs[j]`.
pub fn oracle(inst: &Instance, bound: usize) -> Option<Witness> {
    inst.validate().ok()?;
    tuples(inst.rank, bound)
        .map(|images| Witness { images })
        .find(|w| w.is_valid_for(inst))
}

/// All targets reachable from `u` by injective assignments of words of length at
/// most `bound`, each with the first such assignment. Targets longer than
/// `max_target_len` are skipped.
pub fn oracle_table(rank: usize, u: &Word, bound: usize, max_target_len: usize) -> HashMap<Word, Witness> {
    let mut table: HashMap<Word, Witness> = HashMap::new();
    for images in tuples(rank, bound) {
        let v = u.substitute(&images).expect("rank-sized tuple");
        if v.len() > max_target_len || table.contains_key(&v) {
            continue;
        }
        if image_rank(&images) == rank {
            table.insert(v, Witness { images });
        }
    }
    table
}
