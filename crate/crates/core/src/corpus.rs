//! Exhaustive small-graph corpora for the expressiveness experiments.

use serde::{Deserialize, Serialize};

use crate::budget;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default cap on the corpus vertex count (2^21 candidate graphs at 7).
pub const CORPUS_N_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    /// Stable id derived from the vertex count and edge bitmask.
    pub id: String,
    pub graph: Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub note: String,
}

/// All undirected graphs on 1..=n_max vertices by edge-subset enumeration.
/// With `dedup`, one representative per isomorphism class is kept (the one
/// whose edge bitmask equals the exhaustive canonical form).
pub fn enumerate_corpus(n_max: usize, dedup: bool) -> Result<Corpus> {
    let cap = budget::cap(CORPUS_N_CAP);
    if n_max > cap {
        return Err(Error::BudgetExceeded {
            what: "n_max",
            value: n_max,
            cap,
        });
    }
    let mut entries = Vec::new();
    for n in 1..=n_max {
        let slots = n * (n - 1) / 2;
        for bits in 0u64..(1 << slots) {
            let g = graph_from_bits(n, bits);
            if dedup && g.canonical_bits()? != bits {
                continue;
            }
            entries.push(CorpusEntry {
                id: format!("n{n}_m{:02}_b{bits:x}", g.m()),
                graph: g,
            });
        }
    }
    Ok(Corpus {
        entries,
        note: format!(
            "all undirected graphs on 1..={n_max} vertices{}",
            if dedup {
                ", one representative per isomorphism class"
            } else {
                ""
            }
        ),
    })
}

/// Decodes an upper-triangle edge bitmask (row-major, i < j) into a graph.
pub fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let mut edges = Vec::new();
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if bits & (1 << idx) != 0 {
                edges.push((i, j));
            }
            idx += 1;
        }
    }
    Graph::new(n, &edges).expect("bitmask edges are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::are_isomorphic_bruteforce;

    #[test]
    fn deduplicated_counts_match_the_classic_sequence() {
        let corpus = enumerate_corpus(4, true).unwrap();
        let per_n = |n: usize| {
            corpus
                .entries
                .iter()
                .filter(|e| e.graph.n() == n)
                .count()
        };
        assert_eq!(per_n(1), 1);
        assert_eq!(per_n(2), 2);
        assert_eq!(per_n(3), 4);
        assert_eq!(per_n(4), 11);
    }

    #[test]
    fn single_vertex_corpus() {
        let corpus = enumerate_corpus(1, true).unwrap();
        assert_eq!(corpus.entries.len(), 1);
        assert_eq!(corpus.entries[0].graph.n(), 1);
    }

    #[test]
    fn representatives_are_pairwise_non_isomorphic() {
        let corpus = enumerate_corpus(4, true).unwrap();
        let graphs: Vec<&Graph> = corpus.entries.iter().map(|e| &e.graph).collect();
        for i in 0..graphs.len() {
            for j in (i + 1)..graphs.len() {
                assert!(!are_isomorphic_bruteforce(graphs[i], graphs[j]).unwrap());
            }
        }
    }

    #[test]
    fn undeduplicated_corpus_counts_all_subsets() {
        let corpus = enumerate_corpus(3, false).unwrap();
        assert_eq!(corpus.entries.len(), 1 + 2 + 8);
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(
            enumerate_corpus(20, true),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
