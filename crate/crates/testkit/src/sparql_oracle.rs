//! The query engine against a brute-force evaluator that enumerates every
//! assignment of graph terms to query variables.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use smartreview::sparql;
use smartreview::uri::UriMapping;
use smartreview::{EntityId, GraphStore, Literal, NewEntity, Provenance, Term};

pub const RESOURCES: [&str; 5] = ["Rq1", "Rq2", "Rq3", "Rq4", "Rq5"];
pub const PREDICATES: [&str; 3] = ["Pqa", "Pqb", "Pqc"];
pub const LITERALS: [(&str, &str); 3] = [("x", "xsd:string"), ("y", "xsd:string"), ("1", "xsd:integer")];
const VARS: [&str; 4] = ["a", "b", "c", "d"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Res(String),
    Pred(String),
    Lit(String, String),
}

#[derive(Debug, Clone)]
pub enum QTerm {
    Var(usize),
    Const(Value),
    /// A plain literal; never equal to a typed one.
    Untyped(String),
    Missing,
}

pub type Triple = (Value, Value, Value);

fn object_value(i: usize) -> Value {
    if i < RESOURCES.len() {
        Value::Res(RESOURCES[i].into())
    } else {
        let (v, dt) = LITERALS[i - RESOURCES.len()];
        Value::Lit(v.into(), dt.into())
    }
}

pub fn graph_strategy() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec(
        (
            0..RESOURCES.len(),
            0..PREDICATES.len(),
            0..RESOURCES.len() + LITERALS.len(),
        ),
        0..=50,
    )
}

fn term_strategy(position: usize) -> impl Strategy<Value = QTerm> {
    let constant = match position {
        0 => (0..RESOURCES.len())
            .prop_map(|i| QTerm::Const(Value::Res(RESOURCES[i].into())))
            .boxed(),
        1 => (0..PREDICATES.len())
            .prop_map(|i| QTerm::Const(Value::Pred(PREDICATES[i].into())))
            .boxed(),
        _ => (0..RESOURCES.len() + LITERALS.len())
            .prop_map(|i| QTerm::Const(object_value(i)))
            .boxed(),
    };
    let mut options = vec![
        (6, (0..VARS.len()).prop_map(QTerm::Var).boxed()),
        (3, constant),
        (1, Just(QTerm::Missing).boxed()),
    ];
    if position == 2 {
        options.push((1, Just(QTerm::Untyped("x".into())).boxed()));
    }
    prop::strategy::Union::new_weighted(options)
}

fn pattern_strategy() -> impl Strategy<Value = [QTerm; 3]> {
    (term_strategy(0), term_strategy(1), term_strategy(2)).prop_map(|(s, p, o)| [s, p, o])
}

#[derive(Debug, Clone)]
pub struct Query {
    pub patterns: Vec<[QTerm; 3]>,
    pub projection: Vec<usize>,
    pub distinct: bool,
}

pub fn used_vars(patterns: &[[QTerm; 3]]) -> Vec<usize> {
    let mut vars: Vec<usize> = patterns
        .iter()
        .flatten()
        .filter_map(|t| match t {
            QTerm::Var(v) => Some(*v),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    vars.sort();
    vars
}

pub fn query_strategy() -> impl Strategy<Value = Query> {
    prop::collection::vec(pattern_strategy(), 1..=4)
        .prop_filter("needs a variable", |p| !used_vars(p).is_empty())
        .prop_flat_map(|patterns| {
            let vars = used_vars(&patterns);
            let n = vars.len();
            (Just(patterns), prop::sample::subsequence(vars, 1..=n), any::<bool>())
        })
        .prop_map(|(patterns, projection, distinct)| Query {
            patterns,
            projection,
            distinct,
        })
}

fn render_term(t: &QTerm, position: usize) -> String {
    match t {
        QTerm::Var(v) => format!("?{}", VARS[*v]),
        QTerm::Const(Value::Res(k)) => format!("orkgr:{k}"),
        QTerm::Const(Value::Pred(k)) => format!("orkgp:{k}"),
        QTerm::Const(Value::Lit(v, dt)) => format!("\"{v}\"^^{dt}"),
        QTerm::Untyped(v) => format!("\"{v}\""),
        QTerm::Missing => match position {
            1 => "orkgp:Pmissing".into(),
            _ => "<http://example.org/nowhere>".into(),
        },
    }
}

pub fn render(q: &Query, order: &[usize]) -> String {
    let vars: Vec<String> = q.projection.iter().map(|v| format!("?{}", VARS[*v])).collect();
    let body: Vec<String> = order
        .iter()
        .map(|i| {
            let p = &q.patterns[*i];
            format!(
                "{} {} {} .",
                render_term(&p[0], 0),
                render_term(&p[1], 1),
                render_term(&p[2], 2)
            )
        })
        .collect();
    format!(
        "SELECT {}{} WHERE {{\n  {}\n}}",
        if q.distinct { "DISTINCT " } else { "" },
        vars.join(" "),
        body.join("\n  ")
    )
}

pub fn build_store(edges: &[(usize, usize, usize)]) -> GraphStore {
    let mut store = GraphStore::in_memory();
    let prov = Provenance::now("system");
    store
        .write(|tx| {
            for r in RESOURCES {
                tx.create_entity(NewEntity::resource(r).with_key(r), &prov)?;
            }
            for p in PREDICATES {
                tx.create_entity(NewEntity::predicate(p).with_key(p), &prov)?;
            }
            for &(s, p, o) in edges {
                let subject = EntityId::resource(RESOURCES[s]);
                let predicate = EntityId::predicate(PREDICATES[p]);
                match object_value(o) {
                    Value::Res(k) => {
                        tx.add_statement(&subject, &predicate, &EntityId::resource(k), &prov)?;
                    }
                    Value::Lit(v, dt) => {
                        tx.add_literal(&subject, PREDICATES[p], Literal::new(v, dt), &prov)?;
                    }
                    Value::Pred(_) => unreachable!(),
                }
            }
            Ok(())
        })
        .unwrap();
    store
}

pub fn oracle_graph(edges: &[(usize, usize, usize)]) -> BTreeSet<Triple> {
    edges
        .iter()
        .map(|&(s, p, o)| {
            (
                Value::Res(RESOURCES[s].into()),
                Value::Pred(PREDICATES[p].into()),
                object_value(o),
            )
        })
        .collect()
}

/// Every assignment of domain values to the variables, kept when all
/// patterns are triples of the graph; projected; deduplicated if asked.
pub fn oracle(graph: &BTreeSet<Triple>, q: &Query) -> Vec<Vec<Value>> {
    let domain: Vec<Value> = graph
        .iter()
        .flat_map(|(s, p, o)| [s.clone(), p.clone(), o.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let vars = used_vars(&q.patterns);
    let mut rows = Vec::new();
    let total = domain.len().pow(vars.len() as u32);
    let mut assignment = vec![None; VARS.len()];
    for mut n in 0..total {
        for v in &vars {
            assignment[*v] = Some(domain[n % domain.len()].clone());
            n /= domain.len();
        }
        let value = |t: &QTerm| -> Option<Value> {
            match t {
                QTerm::Var(v) => assignment[*v].clone(),
                QTerm::Const(c) => Some(c.clone()),
                QTerm::Untyped(_) | QTerm::Missing => None,
            }
        };
        let holds = q
            .patterns
            .iter()
            .all(|p| match (value(&p[0]), value(&p[1]), value(&p[2])) {
                (Some(s), Some(pr), Some(o)) => graph.contains(&(s, pr, o)),
                _ => false,
            });
        if holds {
            rows.push(q.projection.iter().map(|v| assignment[*v].clone().unwrap()).collect());
        }
    }
    rows.sort();
    if q.distinct {
        rows.dedup();
    }
    rows
}

fn engine_value(t: &Term) -> Value {
    match t {
        Term::Entity(id) if id.kind == smartreview::EntityKind::Predicate => Value::Pred(id.key.clone()),
        Term::Entity(id) => Value::Res(id.key.clone()),
        Term::Literal(l) => Value::Lit(l.value.clone(), l.datatype.clone()),
    }
}

pub fn run(store: &GraphStore, text: &str) -> Vec<Vec<Term>> {
    sparql::query(text, store, &UriMapping::default()).unwrap().rows
}

pub fn as_values(rows: &[Vec<Term>]) -> Vec<Vec<Value>> {
    let mut out: Vec<Vec<Value>> = rows.iter().map(|r| r.iter().map(engine_value).collect()).collect();
    out.sort();
    out
}

pub fn edge_strategy() -> impl Strategy<Value = (usize, usize, usize)> {
    (
        0..RESOURCES.len(),
        0..PREDICATES.len(),
        0..RESOURCES.len() + LITERALS.len(),
    )
}

/// One oracle comparison: the engine's rows equal brute-force enumeration.
pub fn engine_matches(edges: &[(usize, usize, usize)], q: &Query) -> Result<(), TestCaseError> {
    let store = build_store(edges);
    let order: Vec<usize> = (0..q.patterns.len()).collect();
    let text = render(q, &order);
    let got = as_values(&run(&store, &text));
    prop_assert_eq!(got, oracle(&oracle_graph(edges), q), "query:\n{}", text);
    Ok(())
}

/// Permuting the patterns of a query leaves its rows unchanged.
pub fn order_is_irrelevant(edges: &[(usize, usize, usize)], q: &Query, seed: u64) -> Result<(), TestCaseError> {
    let store = build_store(edges);
    let order: Vec<usize> = (0..q.patterns.len()).collect();
    let mut shuffled = order.clone();
    // Deterministic rotation plus swap keeps the permutation reproducible.
    let n = shuffled.len();
    shuffled.rotate_left((seed as usize) % n);
    if n > 1 {
        shuffled.swap(0, ((seed >> 8) as usize) % n);
    }
    prop_assert_eq!(run(&store, &render(q, &order)), run(&store, &render(q, &shuffled)));
    Ok(())
}

/// Basic graph patterns are monotone: one more statement never loses a row.
pub fn monotone(edges: &[(usize, usize, usize)], extra: (usize, usize, usize), q: &Query) -> Result<(), TestCaseError> {
    let mut q = q.clone();
    q.distinct = true;
    let order: Vec<usize> = (0..q.patterns.len()).collect();
    let text = render(&q, &order);
    let before: BTreeSet<Vec<Value>> = as_values(&run(&build_store(edges), &text)).into_iter().collect();
    let mut more = edges.to_vec();
    more.push(extra);
    let after: BTreeSet<Vec<Value>> = as_values(&run(&build_store(&more), &text)).into_iter().collect();
    prop_assert!(before.is_subset(&after));
    Ok(())
}

/// Runs `cases` random oracle comparisons; the error describes the first
/// (shrunk) mismatch.
pub fn check_engine(cases: u32) -> Result<u32, String> {
    let mut runner = crate::runner(cases);
    runner
        .run(&(graph_strategy(), query_strategy()), |(edges, q)| {
            engine_matches(&edges, &q)
        })
        .map(|()| cases)
        .map_err(|e| e.to_string())
}
