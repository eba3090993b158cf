//! Expected answers for the shipped fixture, read from the TOML with a
//! generic parser rather than the seeding code.

use std::collections::BTreeSet;

use toml::Value;

pub const FIXTURE: &str = include_str!("../../core/data/fixture.toml");

pub const QUERY_1: &str = "SELECT DISTINCT ?smartReview
WHERE {
  ?smartReview a orkgc:SmartReview;
       orkgp:P30 orkgr:R278.
}
";

pub const QUERY_2: &str = "SELECT DISTINCT ?paper
WHERE {
  ?contrib a orkgc:Contribution;
       orkgp:P32 orkgr:R49584.
  ?paper orkgp:P31 ?contrib.
}
";

pub const QUERY_3: &str = "SELECT DISTINCT ?section
WHERE {
  ?review a orkgc:SmartReview;
       orkgp:P27 orkgr:R8193;
       orkgp:P31 ?contrib.
  ?contrib orkgp:HasSection ?section.
  ?section a orkgc:Introduction.
}
";

pub const QUERY_4: &str = "SELECT DISTINCT ?paper
WHERE {
  ?contrib a orkgc:Contribution;
       orkgp:P32 orkgr:R49584;
       orkgp:P7009 \"T\"^^xsd:string.
  ?paper orkgp:P31 ?contrib.
}
";

pub struct Expected {
    pub review: String,
    /// Reviews in research field R278.
    pub q1: BTreeSet<String>,
    /// Papers whose cells give P32 = R49584.
    pub q2: BTreeSet<String>,
    /// Headings of Introduction sections of reviews related to R8193.
    /// Section keys are generated, so callers map results to headings.
    pub q3: Vec<String>,
    /// Like `q2`, also requiring P7009 = "T".
    pub q4: BTreeSet<String>,
    pub papers: usize,
    pub comparisons: usize,
    /// Sections that show a comparison table.
    pub comparison_sections: usize,
}

fn str_at<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key).and_then(Value::as_str)
}

fn array<'a>(v: &'a Value, key: &str) -> &'a [Value] {
    v.get(key).and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[])
}

/// A cell holds one value or a list of values.
fn cell_has(cell: Option<&Value>, want: &str) -> bool {
    match cell {
        Some(Value::String(s)) => s == want,
        Some(Value::Array(vs)) => vs.iter().any(|v| v.as_str() == Some(want)),
        _ => false,
    }
}

pub fn expected() -> Expected {
    let doc: Value = FIXTURE.parse().expect("fixture is valid TOML");
    let review = &doc["review"];
    let key = str_at(review, "key").unwrap().to_owned();

    let mut q1 = BTreeSet::new();
    if str_at(review, "research_field") == Some("R278") {
        q1.insert(key.clone());
    }

    let (mut q2, mut q4) = (BTreeSet::new(), BTreeSet::new());
    for comparison in array(&doc, "comparisons") {
        let Some(cells) = comparison.get("cells").and_then(Value::as_table) else {
            continue;
        };
        for (paper, row) in cells {
            if cell_has(row.get("P32"), "R49584") {
                q2.insert(paper.clone());
                if cell_has(row.get("P7009"), "T") {
                    q4.insert(paper.clone());
                }
            }
        }
    }

    let sections = array(&doc, "sections");
    let q3 = if str_at(review, "related_field") == Some("R8193") {
        sections
            .iter()
            .filter(|s| str_at(s, "deo") == Some("Introduction"))
            .map(|s| str_at(s, "heading").unwrap().to_owned())
            .collect()
    } else {
        Vec::new()
    };

    Expected {
        review: key,
        q1,
        q2,
        q3,
        q4,
        papers: array(&doc, "papers").len(),
        comparisons: array(&doc, "comparisons").len(),
        comparison_sections: sections.iter().filter(|s| s.get("comparison").is_some()).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_the_fixture() {
        let e = expected();
        assert_eq!(e.review, "R135360");
        assert_eq!((e.papers, e.comparisons, e.comparison_sections), (14, 3, 3));
        assert_eq!(e.q3, ["Introduction"]);
        assert!(e.q4.is_subset(&e.q2));
    }
}
