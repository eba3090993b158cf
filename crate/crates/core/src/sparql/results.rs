use serde_json::{json, Map, Value};

use super::SolutionTable;
use crate::model::Term;
use crate::uri::UriMapping;

fn iri(uris: &UriMapping, term: &Term) -> Option<String> {
    match term {
        Term::Entity(id) => uris.iri(id),
        Term::Literal(_) => None,
    }
}

/// CSV with a header row of variable names; IRIs in full, literals by
/// lexical form.
pub fn to_csv(table: &SolutionTable, uris: &UriMapping) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer.write_record(&table.header).expect("writing to memory");
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|t| match t {
                Term::Literal(l) => l.value.clone(),
                entity => iri(uris, entity).unwrap_or_default(),
            })
            .collect();
        writer.write_record(&cells).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// A `application/sparql-results+json` document.
pub fn to_json(table: &SolutionTable, uris: &UriMapping) -> Value {
    let bindings: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut binding = Map::new();
            for (var, term) in table.header.iter().zip(row) {
                let value = match term {
                    Term::Literal(l) => json!({
                        "type": "literal",
                        "value": l.value,
                        "datatype": uris.datatype_iri(&l.datatype),
                    }),
                    entity => json!({ "type": "uri", "value": iri(uris, entity).unwrap_or_default() }),
                };
                binding.insert(var.clone(), value);
            }
            Value::Object(binding)
        })
        .collect();
    json!({
        "head": { "vars": table.header },
        "results": { "bindings": bindings },
    })
}
