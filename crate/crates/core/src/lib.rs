//! Decision procedure for the monomorphism problem in free groups of finite rank:
//! given words `u` and `v` in `F_n`, decide whether some injective endomorphism
//! `f` of `F_n` satisfies `f(u) = v`, and produce `f(x_1), ..., f(x_n)` when it does.
//!
//! The pipeline has two parts. Candidate subgroups `H = <b_1, ..., b_m>` containing
//! `v` are generated either by listing short generating sets ([`decider::Strategy::Exhaustive`])
//! or by labelling topological graphs with subwords of `v`
//! ([`decider::Strategy::TestSubgroups`]). For each candidate, Whitehead's algorithm
//! decides whether an automorphism of `F_n` carries `u` to the expression of `v`
//! over the candidate basis.

pub mod cli;
pub mod decider;
pub mod error;
pub mod stallings;
pub mod subgroup_search;
pub mod whitehead;
pub mod words;

pub use decider::{decide, decide_multi, oracle, Answer, Decider, Instance, Strategy, Verdict, Witness};
pub use error::{Error, Result};
pub use stallings::{image_rank, CoreGraph, MembershipWitness};
pub use whitehead::{equivalent, minimize, OrbitCertificate, WhiteheadAut};
pub use words::{FreeGroup, Letter, Word};
