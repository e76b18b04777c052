//! Batch runner: a table of verdicts and message counts over graph pairs,
//! plus the pairwise containment summary of the distinguished sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hogdm::HoStructure;
use crate::transform::{cell_lift, clique_complex_lift};
use crate::wiring::Relation;
use crate::wl::{delta_kwl, kfwl, klwl_plus, kwl, lifted_refine, wl1, Verdict};

/// The tests the battery can run. The lifted variants refine over the
/// clique-complex lift (cliques up to triangles) and the cell lift with
/// induced cycles up to length 6, using boundary and upper adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WlTest {
    Wl1,
    Kwl(usize),
    Kfwl(usize),
    DeltaKwl(usize),
    KlwlPlus(usize),
    LiftedCqc,
    LiftedCell,
}

impl WlTest {
    pub fn parse(text: &str) -> Result<WlTest> {
        let parse_k = |rest: &str| -> Result<usize> {
            rest.parse()
                .map_err(|_| Error::InvalidDocument(format!("bad test parameter {rest:?}")))
        };
        Ok(match text {
            "wl1" => WlTest::Wl1,
            "lifted:cqc" => WlTest::LiftedCqc,
            "lifted:cell" => WlTest::LiftedCell,
            other => match other.split_once(':') {
                Some(("kwl", k)) => WlTest::Kwl(parse_k(k)?),
                Some(("kfwl", k)) => WlTest::Kfwl(parse_k(k)?),
                Some(("dkwl", k)) => WlTest::DeltaKwl(parse_k(k)?),
                Some(("klwlp", k)) => WlTest::KlwlPlus(parse_k(k)?),
                _ => {
                    return Err(Error::InvalidDocument(format!(
                        "unknown test {text:?}"
                    )))
                }
            },
        })
    }

    pub fn name(&self) -> String {
        match self {
            WlTest::Wl1 => "wl1".into(),
            WlTest::Kwl(k) => format!("kwl:{k}"),
            WlTest::Kfwl(k) => format!("kfwl:{k}"),
            WlTest::DeltaKwl(k) => format!("dkwl:{k}"),
            WlTest::KlwlPlus(k) => format!("klwlp:{k}"),
            WlTest::LiftedCqc => "lifted:cqc".into(),
            WlTest::LiftedCell => "lifted:cell".into(),
        }
    }

    pub fn run(&self, a: &Graph, b: &Graph) -> Result<Verdict> {
        match self {
            WlTest::Wl1 => wl1(a, b),
            WlTest::Kwl(k) => kwl(a, b, *k),
            WlTest::Kfwl(k) => kfwl(a, b, *k),
            WlTest::DeltaKwl(k) => delta_kwl(a, b, *k),
            WlTest::KlwlPlus(k) => klwl_plus(a, b, *k),
            WlTest::LiftedCqc => lifted_refine(
                &HoStructure::SimplicialComplex(clique_complex_lift(a, 3)),
                &HoStructure::SimplicialComplex(clique_complex_lift(b, 3)),
                &[Relation::Boundary, Relation::Upper],
            ),
            WlTest::LiftedCell => lifted_refine(
                &HoStructure::CellComplex(cell_lift(a, 2, 6, 0)?),
                &HoStructure::CellComplex(cell_lift(b, 2, 6, 0)?),
                &[Relation::Boundary, Relation::Upper],
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub test: String,
    pub graph_a: String,
    pub graph_b: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub rows: Vec<BatteryRow>,
    /// (test x, test y, does x's distinguished set contain y's).
    pub containment: Vec<(String, String, bool)>,
}

impl BatteryReport {
    /// One row per verdict: test, graph_a, graph_b, verdict, rounds,
    /// messages.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("test,graph_a,graph_b,verdict,rounds,messages\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.test,
                r.graph_a,
                r.graph_b,
                r.verdict.outcome,
                r.verdict.rounds,
                r.verdict.messages
            ));
        }
        out
    }
}

/// Runs every test on every pair. Pair labels come from the graphs' names.
pub fn battery(
    graphs: &[(String, Graph)],
    pairs: &[(usize, usize)],
    tests: &[WlTest],
) -> Result<BatteryReport> {
    let mut rows = Vec::new();
    let mut distinguished: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); tests.len()];
    for &(i, j) in pairs {
        let (name_a, a) = &graphs[i];
        let (name_b, b) = &graphs[j];
        for (ti, test) in tests.iter().enumerate() {
            let verdict = test.run(a, b)?;
            if verdict.distinguished() {
                distinguished[ti].insert((i, j));
            }
            rows.push(BatteryRow {
                test: test.name(),
                graph_a: name_a.clone(),
                graph_b: name_b.clone(),
                verdict,
            });
        }
    }
    let mut containment = Vec::new();
    for (xi, x) in tests.iter().enumerate() {
        for (yi, y) in tests.iter().enumerate() {
            if xi != yi {
                containment.push((
                    x.name(),
                    y.name(),
                    distinguished[yi].is_subset(&distinguished[xi]),
                ));
            }
        }
    }
    Ok(BatteryReport { rows, containment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, two_triangles};
    use crate::wl::Outcome;

    #[test]
    fn battery_on_the_motivating_pair() {
        let graphs = vec![
            ("c6".to_string(), cycle_graph(6)),
            ("2k3".to_string(), two_triangles()),
        ];
        let tests = [WlTest::Wl1, WlTest::Kfwl(2), WlTest::LiftedCqc];
        let report = battery(&graphs, &[(0, 1)], &tests).unwrap();
        let outcomes: Vec<Outcome> = report.rows.iter().map(|r| r.verdict.outcome).collect();
        assert_eq!(
            outcomes,
            vec![
                Outcome::Inconclusive,
                Outcome::Distinguished,
                Outcome::Distinguished
            ]
        );
        // kfwl:2 and lifted:cqc each contain wl1's (empty) distinguished set
        assert!(report
            .containment
            .iter()
            .any(|(x, y, c)| x == "kfwl:2" && y == "wl1" && *c));
    }

    #[test]
    fn battery_on_empty_pair_list() {
        let graphs = vec![("c6".to_string(), cycle_graph(6))];
        let report = battery(&graphs, &[], &[WlTest::Wl1]).unwrap();
        assert!(report.rows.is_empty());
    }

    #[test]
    fn test_names_round_trip() {
        for t in [
            WlTest::Wl1,
            WlTest::Kwl(2),
            WlTest::Kfwl(3),
            WlTest::DeltaKwl(2),
            WlTest::KlwlPlus(3),
            WlTest::LiftedCqc,
            WlTest::LiftedCell,
        ] {
            assert_eq!(WlTest::parse(&t.name()).unwrap(), t);
        }
        assert!(WlTest::parse("bogus").is_err());
    }
}
