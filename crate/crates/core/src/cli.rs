//! Command-line front end.
//!
//! Exit status: 0 for YES (or success), 1 for NO (or a corpus mismatch), 2 for
//! usage and parse errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decider::{oracle, Decider, Instance, Strategy, Verdict};
use crate::error::Result;
use crate::stallings::CoreGraph;
use crate::subgroup_search::topographs;
use crate::whitehead::OrbitSearch;
use crate::words::{FreeGroup, Word};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "monomorph", version, about = "Decide whether a monomorphism of a free group sends u to v")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Rank of the free group; letters a..z are generators, A..Z their inverses.
    #[arg(short = 'n', long = "rank")]
    pub rank: usize,
    /// Source word ("1" for the identity). In tuple mode, coordinates separated by ';'.
    #[arg(short = 'u', allow_hyphen_values = true)]
    pub u: String,
    /// Target word, same syntax as -u.
    #[arg(short = 'v', allow_hyphen_values = true)]
    pub v: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a monomorphism sends u to v.
    Decide {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "testsub")]
        strategy: Strategy,
        /// Print f(x1), ..., f(xn) on YES.
        #[arg(long)]
        witness: bool,
    },
    /// Decide whether one monomorphism sends u_j to v_j for all j (';'-separated).
    DecideMulti {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value = "testsub")]
        strategy: Strategy,
        #[arg(long)]
        witness: bool,
    },
    /// Fold a subgroup generated by comma-separated words and print its core graph.
    Stallings {
        #[arg(short = 'n', long = "rank")]
        rank: usize,
        /// Comma-separated generators.
        #[arg(short = 'g', long = "gens")]
        gens: String,
        /// Also test membership of this word.
        #[arg(long)]
        member: Option<String>,
    },
    /// Decide whether an automorphism sends u to v (';' for tuples).
    Whitehead {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// List the topological graphs of rank g.
    Topo {
        #[arg(short = 'g')]
        g: usize,
    },
    /// List candidate subgroups for a target word.
    Candidates {
        #[arg(short = 'n', long = "rank")]
        rank: usize,
        #[arg(short = 'v', allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value = "testsub")]
        strategy: Strategy,
    },
    /// Brute-force search over images of length at most --bound.
    Oracle {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Run a corpus file: lines "n<TAB>u<TAB>v[<TAB>YES|NO]", '#' comments.
    Corpus {
        #[arg(long = "corpus")]
        path: PathBuf,
        #[arg(long, default_value = "testsub")]
        strategy: Strategy,
    },
}

/// Parses a word against a rank.
pub fn parse_word(text: &str, rank: usize) -> Result<Word> {
    FreeGroup::new(rank)?.parse(text)
}

fn parse_tuple(text: &str, rank: usize) -> Result<Vec<Word>> {
    text.split(';').map(|t| parse_word(t, rank)).collect()
}

fn texts(ws: &[Word]) -> Vec<String> {
    ws.iter().map(Word::to_text).collect()
}

/// JSON object with `answer`, `witness`, `trace`, `timings`; words as letter strings.
pub fn verdict_json(v: &Verdict) -> Value {
    let accepted = v.trace.accepted.as_ref().map(|a| {
        json!({
            "basis": texts(&a.candidate.basis),
            "expressions": texts(&a.candidate.expressions),
            "certificate": a.certificate.to_text(),
            "extension": texts(&a.extension),
        })
    });
    let per_graph = v.trace.search.as_ref().map(|s| s.per_graph.clone());
    json!({
        "answer": v.answer.to_string(),
        "witness": v.witness.as_ref().map(|w| texts(&w.images)),
        "trace": {
            "shortcut": v.trace.shortcut,
            "candidates": v.trace.candidates,
            "whitehead_calls": v.trace.whitehead_calls,
            "per_graph": per_graph,
            "accepted": accepted,
        },
        "timings": {
            "candidate_generation_ms": v.timings.candidate_generation.as_secs_f64() * 1e3,
            "whitehead_ms": v.timings.whitehead.as_secs_f64() * 1e3,
        },
    })
}

fn print_verdict(out: &mut dyn Write, v: &Verdict, format: Format, witness: bool) -> std::io::Result<i32> {
    match format {
        Format::Json => writeln!(out, "{}", verdict_json(v))?,
        Format::Text => {
            writeln!(out, "{}", v.answer)?;
            if let (true, Some(w)) = (witness, &v.witness) {
                for (i, img) in w.images.iter().enumerate() {
                    writeln!(out, "f(x{})={}", i + 1, img)?;
                }
            }
        }
    }
    Ok(if v.is_yes() { EXIT_YES } else { EXIT_NO })
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(RunError::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(RunError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Input(String),
    Io(std::io::Error),
}

impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> std::result::Result<i32, RunError> {
    let format = cli.format;
    match &cli.command {
        Command::Decide { pair, strategy, witness } => {
            let inst = Instance::new(pair.rank, parse_word(&pair.u, pair.rank)?, parse_word(&pair.v, pair.rank)?);
            let verdict = Decider::new(pair.rank)?.decide(&inst, *strategy)?;
            Ok(print_verdict(out, &verdict, format, *witness)?)
        }
        Command::DecideMulti { pair, strategy, witness } => {
            let inst = Instance::multi(pair.rank, parse_tuple(&pair.u, pair.rank)?, parse_tuple(&pair.v, pair.rank)?);
            let verdict = Decider::new(pair.rank)?.decide(&inst, *strategy)?;
            Ok(print_verdict(out, &verdict, format, *witness)?)
        }
        Command::Stallings { rank, gens, member } => {
            let gens: Vec<Word> = gens.split(',').map(|g| parse_word(g, *rank)).collect::<Result<_>>()?;
            let core = CoreGraph::build(&gens);
            let membership = match member {
                Some(m) => Some(core.member(&parse_word(m, *rank)?).map(|w| w.expression.to_text())),
                None => None,
            };
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    json!({
                        "vertices": core.num_vertices(),
                        "edges": core.num_edges(),
                        "rank": core.rank(),
                        "basis": texts(&core.tree_basis()),
                        "graph": core.dump(),
                        "member": membership,
                    })
                )?,
                Format::Text => {
                    writeln!(out, "vertices={} edges={} rank={}", core.num_vertices(), core.num_edges(), core.rank())?;
                    write!(out, "{}", core.dump())?;
                    if let Some(m) = &membership {
                        match m {
                            Some(expr) => writeln!(out, "member: yes, w={expr}")?,
                            None => writeln!(out, "member: no")?,
                        }
                    }
                }
            }
            Ok(match membership {
                Some(None) => EXIT_NO,
                _ => EXIT_YES,
            })
        }
        Command::Whitehead { pair } => {
            let us = parse_tuple(&pair.u, pair.rank)?;
            let vs = parse_tuple(&pair.v, pair.rank)?;
            let cert = OrbitSearch::new(pair.rank).equivalent(&us, &vs)?;
            match format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    json!({
                        "equivalent": cert.is_some(),
                        "certificate": cert.as_ref().map(|c| c.to_text()),
                        "images": cert.as_ref().map(|c| texts(&c.images(pair.rank))),
                    })
                )?,
                Format::Text => match &cert {
                    Some(c) => {
                        writeln!(out, "YES")?;
                        write!(out, "{}", c.to_text())?;
                    }
                    None => writeln!(out, "NO")?,
                },
            }
            Ok(if cert.is_some() { EXIT_YES } else { EXIT_NO })
        }
        Command::Topo { g } => {
            if *g == 0 {
                return Err(RunError::Input("rank must be at least 1".into()));
            }
            let graphs = topographs(*g);
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&*graphs).expect("serialisable"))?,
                Format::Text => {
                    writeln!(out, "{} graphs of rank {}", graphs.len(), g)?;
                    for (i, t) in graphs.iter().enumerate() {
                        writeln!(out, "# graph {i}: vertices={} arcs={}", t.vertices, t.arcs.len())?;
                        write!(out, "{}", t.to_text())?;
                    }
                }
            }
            Ok(EXIT_YES)
        }
        Command::Candidates { rank, v, strategy } => {
            let vs = parse_tuple(v, *rank)?;
            if vs.iter().any(Word::is_empty) {
                return Err(RunError::Input("candidate targets must be nontrivial".into()));
            }
            let cands = Decider::new(*rank)?.candidates(&vs, *strategy);
            match format {
                Format::Json => {
                    let rows: Vec<Value> = cands
                        .iter()
                        .map(|c| json!({"basis": texts(&c.basis), "w": texts(&c.expressions)}))
                        .collect();
                    writeln!(out, "{}", Value::Array(rows))?;
                }
                Format::Text => {
                    for c in &cands {
                        writeln!(out, "{}", c.to_line())?;
                    }
                }
            }
            Ok(EXIT_YES)
        }
        Command::Oracle { pair, bound } => {
            let inst = Instance::multi(pair.rank, parse_tuple(&pair.u, pair.rank)?, parse_tuple(&pair.v, pair.rank)?);
            inst.validate()?;
            let found = oracle(&inst, *bound);
            match format {
                Format::Json => writeln!(out, "{}", json!({"witness": found.as_ref().map(|w| texts(&w.images))}))?,
                Format::Text => match &found {
                    Some(w) => {
                        writeln!(out, "FOUND")?;
                        for (i, img) in w.images.iter().enumerate() {
                            writeln!(out, "f(x{})={}", i + 1, img)?;
                        }
                    }
                    None => writeln!(out, "NONE")?,
                },
            }
            Ok(if found.is_some() { EXIT_YES } else { EXIT_NO })
        }
        Command::Corpus { path, strategy } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Input(format!("cannot read {}: {e}", path.display())))?;
            let report = run_corpus(&text, *strategy);
            match format {
                Format::Json => writeln!(out, "{}", report.to_json())?,
                Format::Text => write!(out, "{}", report.to_text())?,
            }
            Ok(if report.mismatches().is_empty() { EXIT_YES } else { EXIT_NO })
        }
    }
}

/// One corpus line, parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRecord {
    pub line: usize,
    pub instance: Instance,
    pub expected: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusOutcome {
    Decided { record: CorpusRecord, yes: bool },
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusReport {
    pub outcomes: Vec<CorpusOutcome>,
}

impl CorpusReport {
    /// `(line, expected, got)` for every record whose verdict disagrees with its expectation.
    pub fn mismatches(&self) -> Vec<(usize, bool, bool)> {
        self.outcomes
            .iter()
            .filter_map(|o| match o {
                CorpusOutcome::Decided { record, yes } => match record.expected {
                    Some(e) if e != *yes => Some((record.line, e, *yes)),
                    _ => None,
                },
                CorpusOutcome::Malformed { .. } => None,
            })
            .collect()
    }

    fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for o in &self.outcomes {
            match o {
                CorpusOutcome::Decided { yes: true, .. } => c.0 += 1,
                CorpusOutcome::Decided { yes: false, .. } => c.1 += 1,
                CorpusOutcome::Malformed { .. } => c.2 += 1,
            }
        }
        c
    }

    pub fn to_text(&self) -> String {
        let yn = |b: bool| if b { "YES" } else { "NO" };
        let mut s = String::new();
        for o in &self.outcomes {
            match o {
                CorpusOutcome::Decided { record, yes } => {
                    let status = match record.expected {
                        Some(e) if e == *yes => format!(" (expected {}) ok", yn(e)),
                        Some(e) => format!(" (expected {}) MISMATCH", yn(e)),
                        None => String::new(),
                    };
                    s.push_str(&format!("line {}: {}{}\n", record.line, yn(*yes), status));
                }
                CorpusOutcome::Malformed { line, message } => {
                    s.push_str(&format!("line {line}: malformed: {message}\n"));
                }
            }
        }
        let (yes, no, bad) = self.counts();
        s.push_str(&format!(
            "records={} yes={} no={} malformed={} mismatches={}\n",
            yes + no,
            yes,
            no,
            bad,
            self.mismatches().len()
        ));
        s
    }

    pub fn to_json(&self) -> Value {
        let (yes, no, bad) = self.counts();
        let records: Vec<Value> = self
            .outcomes
            .iter()
            .map(|o| match o {
                CorpusOutcome::Decided { record, yes } => json!({
                    "line": record.line,
                    "answer": if *yes { "YES" } else { "NO" },
                    "expected": record.expected.map(|e| if e { "YES" } else { "NO" }),
                }),
                CorpusOutcome::Malformed { line, message } => json!({"line": line, "error": message}),
            })
            .collect();
        json!({
            "records": records,
            "yes": yes,
            "no": no,
            "malformed": bad,
            "mismatches": self.mismatches().iter().map(|m| m.0).collect::<Vec<_>>(),
        })
    }
}

/// Parses one corpus line; `Ok(None)` for blank lines and comments.
pub fn parse_corpus_line(line_no: usize, line: &str) -> std::result::Result<Option<CorpusRecord>, String> {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    let fields: Vec<&str> = content.split('\t').map(str::trim).collect();
    if !(3..=4).contains(&fields.len()) {
        return Err(format!("expected 3 or 4 tab-separated fields, found {}", fields.len()));
    }
    let rank: usize = fields[0].parse().map_err(|_| format!("bad rank {:?}", fields[0]))?;
    let us = parse_tuple(fields[1], rank).map_err(|e| e.to_string())?;
    let vs = parse_tuple(fields[2], rank).map_err(|e| e.to_string())?;
    let expected = match fields.get(3).copied() {
        None | Some("") => None,
        Some("YES") => Some(true),
        Some("NO") => Some(false),
        Some(other) => return Err(format!("expected YES or NO, found {other:?}")),
    };
    let instance = Instance::multi(rank, us, vs);
    instance.validate().map_err(|e| e.to_string())?;
    Ok(Some(CorpusRecord { line: line_no, instance, expected }))
}

/// Decides every record in a corpus text; malformed lines are reported and skipped.
pub fn run_corpus(text: &str, strategy: Strategy) -> CorpusReport {
    let mut deciders: std::collections::HashMap<usize, Decider> = Default::default();
    let mut report = CorpusReport::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        match parse_corpus_line(line_no, line) {
            Ok(None) => {}
            Err(message) => report.outcomes.push(CorpusOutcome::Malformed { line: line_no, message }),
            Ok(Some(record)) => {
                let rank = record.instance.rank;
                let decider = match deciders.entry(rank) {
                    std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::hash_map::Entry::Vacant(e) => match Decider::new(rank) {
                        Ok(d) => e.insert(d),
                        Err(err) => {
                            report.outcomes.push(CorpusOutcome::Malformed { line: line_no, message: err.to_string() });
                            continue;
                        }
                    },
                };
                match decider.decide(&record.instance, strategy) {
                    Ok(v) => report.outcomes.push(CorpusOutcome::Decided { record, yes: v.is_yes() }),
                    Err(err) => {
                        report.outcomes.push(CorpusOutcome::Malformed { line: line_no, message: err.to_string() })
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("monomorph").chain(args.iter().copied()).map(String::from);
        let code = main_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_word_examples() {
        let w = parse_word("abAB", 2).unwrap();
        assert_eq!(w.to_signed(), vec![1, 2, -1, -2]);
        assert!(parse_word("1", 3).unwrap().is_empty());
        assert!(parse_word("c", 2).is_err());
    }

    #[test]
    fn decide_exit_codes() {
        let (code, out, _) = run_args(&["decide", "-n", "2", "-u", "a", "-v", "abA"]);
        assert_eq!((code, out.trim()), (0, "YES"));
        let (code, out, _) = run_args(&["decide", "-n", "2", "-u", "aa", "-v", "aaa"]);
        assert_eq!((code, out.trim()), (1, "NO"));
        let (code, _, err) = run_args(&["decide", "-n", "2", "-u", "c", "-v", "a"]);
        assert_eq!(code, 2);
        assert!(err.contains("beyond"));
        let (code, _, _) = run_args(&["decide", "-n", "2"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn witness_lines() {
        let (code, out, _) = run_args(&["decide", "-n", "2", "-u", "ab", "-v", "aa", "--witness"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "YES");
        assert!(lines[1].starts_with("f(x1)=") && lines[2].starts_with("f(x2)="));
    }

    #[test]
    fn json_round_trip() {
        let (code, out, _) = run_args(&["--format", "json", "decide", "-n", "2", "-u", "ab", "-v", "aa"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["answer"], "YES");
        let images: Vec<Word> =
            v["witness"].as_array().unwrap().iter().map(|s| parse_word(s.as_str().unwrap(), 2).unwrap()).collect();
        assert_eq!(parse_word("ab", 2).unwrap().substitute(&images).unwrap(), parse_word("aa", 2).unwrap());
        assert!(v["timings"]["candidate_generation_ms"].is_number());
    }

    #[test]
    fn topo_lists_two_rank_one_graphs() {
        let (code, out, _) = run_args(&["topo", "-g", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("2 graphs of rank 1"));
    }

    #[test]
    fn corpus_reports() {
        let text = "# examples\n2\ta\tabA\tYES\n2\taa\taaa\tNO\n2\taabb\taa\tNO\n";
        assert!(run_corpus(text, Strategy::TestSubgroups).mismatches().is_empty());
        let wrong = "2\taa\taaa\tYES\n";
        assert_eq!(run_corpus(wrong, Strategy::TestSubgroups).mismatches(), vec![(1, true, false)]);
        assert!(run_corpus("", Strategy::TestSubgroups).outcomes.is_empty());
        let bad = "2\tq\ta\n2\ta\ta\tYES\n";
        let r = run_corpus(bad, Strategy::TestSubgroups);
        assert!(matches!(r.outcomes[0], CorpusOutcome::Malformed { line: 1, .. }));
        assert!(matches!(r.outcomes[1], CorpusOutcome::Decided { yes: true, .. }));
    }
}
