use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{QueryPlan, QueryTerm, SparqlError};
use crate::model::{EntityId, Literal, Term};
use crate::uri::UriMapping;
use crate::view::GraphView;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl SolutionTable {
    pub fn column(&self, var: &str) -> Vec<&Term> {
        match self.header.iter().position(|h| h == var) {
            Some(i) => self.rows.iter().map(|r| &r[i]).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Slot {
    Var(usize),
    Const(Term),
    /// A constant that cannot occur in any graph (unknown IRI, plain literal).
    Never,
}

struct Graph {
    triples: Vec<[Term; 3]>,
    index: [HashMap<Term, Vec<usize>>; 3],
}

impl Graph {
    /// The view as a set of RDF triples: statements with equal values
    /// collapse into one.
    fn new<V: GraphView + ?Sized>(view: &V) -> Self {
        let triples: Vec<[Term; 3]> = view
            .statements()
            .into_iter()
            .map(|s| {
                [
                    Term::Entity(s.subject.clone()),
                    Term::Entity(s.predicate.clone()),
                    view.term(&s.object),
                ]
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut index: [HashMap<Term, Vec<usize>>; 3] = Default::default();
        for (i, t) in triples.iter().enumerate() {
            for (pos, term) in t.iter().enumerate() {
                index[pos].entry(term.clone()).or_default().push(i);
            }
        }
        Graph { triples, index }
    }

    fn candidates(&self, bound: &[Option<&Term>; 3]) -> Option<&[usize]> {
        bound
            .iter()
            .enumerate()
            .filter_map(|(pos, t)| t.map(|t| self.index[pos].get(t).map_or(&[][..], Vec::as_slice)))
            .min_by_key(|c| c.len())
    }
}

fn resolve(term: &QueryTerm, vars: &[String], uris: &UriMapping) -> Slot {
    match term {
        QueryTerm::Var(v) => Slot::Var(
            vars.iter()
                .position(|x| x == v)
                .expect("variables collected from patterns"),
        ),
        QueryTerm::Iri(iri) => match uris.entity(iri) {
            Some(id) => Slot::Const(Term::Entity(id)),
            None => Slot::Never,
        },
        QueryTerm::Literal {
            value,
            datatype: Some(dt),
        } => Slot::Const(Term::Literal(Literal::new(value.clone(), uris.datatype_from_iri(dt)))),
        // Stored literals always carry a datatype.
        QueryTerm::Literal { datatype: None, .. } => Slot::Never,
        QueryTerm::Prefixed { .. } => Slot::Never,
    }
}

/// Sort key of a bound value: the entity key or the literal's lexical form.
fn sort_key(t: &Term) -> &str {
    match t {
        Term::Entity(EntityId { key, .. }) => key,
        Term::Literal(l) => &l.value,
    }
}

/// Evaluates the basic graph pattern with a nested-loop join, most
/// selective pattern first. Rows are sorted by the bound keys.
pub fn execute<V: GraphView + ?Sized>(
    plan: &QueryPlan,
    view: &V,
    uris: &UriMapping,
) -> Result<SolutionTable, SparqlError> {
    if let Some(prefix) = plan.undeclared.first() {
        return Err(SparqlError::UnknownPrefix(prefix.clone()));
    }
    let vars = plan.variables();
    let header = plan.projection.clone();
    let patterns: Vec<[Slot; 3]> = plan
        .patterns
        .iter()
        .map(|p| p.terms().map(|t| resolve(t, &vars, uris)))
        .collect();
    if patterns.iter().flatten().any(|s| *s == Slot::Never) {
        return Ok(SolutionTable {
            header,
            rows: Vec::new(),
        });
    }
    let graph = Graph::new(view);

    // Static greedy order: most bound positions first, then fewest
    // candidates for the constants alone.
    let mut order = Vec::new();
    let mut bound_vars = vec![false; vars.len()];
    let mut remaining: Vec<usize> = (0..patterns.len()).collect();
    while !remaining.is_empty() {
        let score = |i: usize| {
            let p = &patterns[i];
            let bound = p
                .iter()
                .filter(|s| match s {
                    Slot::Var(v) => bound_vars[*v],
                    _ => true,
                })
                .count();
            let consts: [Option<&Term>; 3] = [0, 1, 2].map(|k| match &p[k] {
                Slot::Const(t) => Some(t),
                _ => None,
            });
            let size = graph.candidates(&consts).map_or(graph.triples.len(), <[usize]>::len);
            (std::cmp::Reverse(bound), size, i)
        };
        let best = *remaining.iter().min_by_key(|i| score(**i)).expect("non-empty");
        remaining.retain(|i| *i != best);
        for s in &patterns[best] {
            if let Slot::Var(v) = s {
                bound_vars[*v] = true;
            }
        }
        order.push(best);
    }

    let mut solutions: Vec<Vec<Option<Term>>> = vec![vec![None; vars.len()]];
    for &pi in &order {
        let pattern = &patterns[pi];
        let mut next = Vec::new();
        for solution in &solutions {
            let bound: [Option<&Term>; 3] = [0, 1, 2].map(|k| match &pattern[k] {
                Slot::Const(t) => Some(t),
                Slot::Var(v) => solution[*v].as_ref(),
                Slot::Never => unreachable!("filtered above"),
            });
            let all: Vec<usize>;
            let candidates = match graph.candidates(&bound) {
                Some(c) => c,
                None => {
                    all = (0..graph.triples.len()).collect();
                    &all
                }
            };
            'triples: for &ti in candidates {
                let triple = &graph.triples[ti];
                let mut extended = solution.clone();
                for k in 0..3 {
                    match &pattern[k] {
                        Slot::Const(t) => {
                            if *t != triple[k] {
                                continue 'triples;
                            }
                        }
                        Slot::Var(v) => match &extended[*v] {
                            Some(existing) if *existing != triple[k] => continue 'triples,
                            Some(_) => {}
                            None => extended[*v] = Some(triple[k].clone()),
                        },
                        Slot::Never => unreachable!(),
                    }
                }
                next.push(extended);
            }
        }
        solutions = next;
        if solutions.is_empty() {
            break;
        }
    }

    let columns: Vec<usize> = header
        .iter()
        .map(|h| {
            vars.iter()
                .position(|v| v == h)
                .expect("projection checked at parse time")
        })
        .collect();
    let mut rows: Vec<Vec<Term>> = solutions
        .into_iter()
        .map(|s| {
            columns
                .iter()
                .map(|c| s[*c].clone().expect("BGP binds every variable"))
                .collect()
        })
        .collect();
    rows.sort_by(|a, b| {
        let ka: Vec<&str> = a.iter().map(sort_key).collect();
        let kb: Vec<&str> = b.iter().map(sort_key).collect();
        ka.cmp(&kb).then_with(|| a.cmp(b))
    });
    if plan.distinct {
        rows.dedup();
    }
    Ok(SolutionTable { header, rows })
}
