//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.
//!
//! Counts that come from the published review (one SmartReview, three
//! comparisons, fourteen papers) are pinned as constants; everything else
//! is compared against an oracle from `smartreview-testkit`.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode, Stdio};

use smartreview::article::{self, SectionBody};
use smartreview::repository::Repository;
use smartreview::uri::{self, UriMapping};
use smartreview::versioning::VersionRef;
use smartreview::EntityId;
use smartreview_testkit::{
    api_fuzz, fixture_oracle, html_checks, markdown_golden, sessions, sparql_oracle, versioning_oracle,
};

const BIN: &str = env!("CARGO_BIN_EXE_smartreview");
const RESOURCE_NS: &str = "http://orkg.org/orkg/resource/";

const PUBLISHED_REVIEWS: usize = 1;
const PUBLISHED_COMPARISONS: usize = 3;
const PUBLISHED_PAPERS: usize = 14;

const SPARQL_CASES: u32 = 1000;
const VERSIONING_SCRIPTS: u32 = 128;
const FUZZ_CASES: u32 = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cli(data: &Path, args: &[&str], stdin: Option<&[u8]>) -> Result<Vec<u8>, String> {
    let mut child = Command::new(BIN)
        .args(args)
        .env("SMARTREVIEW_DATA_DIR", data)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    if let Some(input) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(input)
            .map_err(|e| e.to_string())?;
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`{}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn seeded_dir() -> Result<tempfile::TempDir, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    cli(dir.path(), &["seed-fixture"], None)?;
    Ok(dir)
}

fn query_keys(data: &Path, text: &str) -> Result<BTreeSet<String>, String> {
    let file = data.join("query.rq");
    std::fs::write(&file, text).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(cli(data, &["query", file.to_str().unwrap()], None)?).unwrap();
    let mut lines = csv.lines();
    lines.next().ok_or("no CSV header")?;
    lines
        .map(|l| {
            l.strip_prefix(RESOURCE_NS)
                .map(str::to_owned)
                .ok_or(format!("not a resource: {l}"))
        })
        .collect()
}

fn expect_set(name: &str, got: &BTreeSet<String>, want: &BTreeSet<String>) -> Result<(), String> {
    if got.is_empty() {
        return Err(format!("{name} returned nothing"));
    }
    if got != want {
        return Err(format!("{name}: got {got:?}, expected {want:?}"));
    }
    Ok(())
}

fn example_queries() -> Outcome {
    let dir = seeded_dir()?;
    let expected = fixture_oracle::expected();
    if expected.q1.len() != PUBLISHED_REVIEWS {
        return Err(format!("fixture has {} matching reviews", expected.q1.len()));
    }
    let q1 = query_keys(dir.path(), fixture_oracle::QUERY_1)?;
    expect_set("query 1", &q1, &expected.q1)?;
    let q2 = query_keys(dir.path(), fixture_oracle::QUERY_2)?;
    expect_set("query 2", &q2, &expected.q2)?;
    let q4 = query_keys(dir.path(), fixture_oracle::QUERY_4)?;
    expect_set("query 4", &q4, &expected.q4)?;

    // Section keys are generated; compare by heading.
    let q3 = query_keys(dir.path(), fixture_oracle::QUERY_3)?;
    let repo = Repository::open(dir.path()).map_err(|e| e.to_string())?;
    let review = repo
        .store
        .article(&EntityId::resource(&expected.review))
        .map_err(|e| e.to_string())?;
    let headings: Vec<String> = review
        .sections
        .iter()
        .filter(|s| q3.contains(&s.id.key))
        .map(|s| s.heading.clone())
        .collect();
    if q3.is_empty() || headings.len() != q3.len() || headings != expected.q3 {
        return Err(format!(
            "query 3: got {q3:?} ({headings:?}), expected sections {:?}",
            expected.q3
        ));
    }
    Ok(format!(
        "q1={} q2={} q3={} q4={}",
        q1.len(),
        q2.len(),
        q3.len(),
        q4.len()
    ))
}

fn fixture_shape() -> Outcome {
    let dir = seeded_dir()?;
    let expected = fixture_oracle::expected();
    let repo = Repository::open(dir.path()).map_err(|e| e.to_string())?;
    let review = repo
        .store
        .article(&EntityId::resource(&expected.review))
        .map_err(|e| e.to_string())?;
    let comparisons: BTreeSet<EntityId> = review
        .sections
        .iter()
        .filter_map(|s| match &s.body {
            SectionBody::Comparison { comparison } => Some(comparison.clone()),
            _ => None,
        })
        .collect();
    let mut papers = BTreeSet::new();
    for c in &comparisons {
        let loaded = article::load_comparison(&repo.store, c).map_err(|e| e.to_string())?;
        papers.extend(loaded.columns.into_iter().map(|col| col.paper));
    }
    if (comparisons.len(), papers.len()) != (PUBLISHED_COMPARISONS, PUBLISHED_PAPERS)
        || (comparisons.len(), papers.len()) != (expected.comparisons, expected.papers)
    {
        return Err(format!("{} comparisons, {} papers", comparisons.len(), papers.len()));
    }

    let out = dir.path().join("review.html");
    cli(
        dir.path(),
        &["render", &expected.review, "-o", out.to_str().unwrap()],
        None,
    )?;
    let html = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let doc = html_checks::parse(&html)?;
    let tables = doc
        .descendants()
        .filter(|n| n.has_tag_name("table") && html_checks::has_class(*n, "comparison-table"))
        .count();
    if tables != PUBLISHED_COMPARISONS {
        return Err(format!("{tables} comparison tables in the HTML"));
    }
    Ok(format!(
        "{} comparisons, {} papers, {tables} tables",
        comparisons.len(),
        papers.len()
    ))
}

fn sparql_equivalence() -> Outcome {
    let n = sparql_oracle::check_engine(SPARQL_CASES)?;
    Ok(format!("{n} cases, 0 mismatches"))
}

fn versioning_suite() -> Outcome {
    let a = versioning_oracle::check_snapshots(VERSIONING_SCRIPTS)?;
    let b = versioning_oracle::check_diffs(VERSIONING_SCRIPTS)?;
    Ok(format!("{a} immutability scripts, {b} diff scripts"))
}

fn rdf_round_trip() -> Outcome {
    let first = seeded_dir()?;
    let dump = cli(first.path(), &["export-rdf"], None)?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    cli(second.path(), &["import-rdf", "-"], Some(&dump))?;
    let again = cli(second.path(), &["export-rdf"], None)?;
    if again != dump {
        return Err("re-exported dump differs".into());
    }
    let text = String::from_utf8(dump).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = text.lines().collect();
    if !lines.windows(2).all(|w| w[0] < w[1]) {
        return Err("dump is not sorted and duplicate-free".into());
    }

    let rdf_type = format!("<{}>", uri::RDF_TYPE);
    let typed = |iri: &str, namespaces: &[&str]| {
        lines.iter().any(|l| {
            let mut parts = l.splitn(3, ' ');
            parts.next() == Some(&format!("<{iri}>"))
                && parts.next() == Some(&rdf_type)
                && parts
                    .next()
                    .is_some_and(|o| namespaces.iter().any(|ns| o.starts_with(&format!("<{ns}"))))
        })
    };
    let repo = Repository::open(first.path()).map_err(|e| e.to_string())?;
    let mapping = UriMapping::default();
    let review_id = EntityId::resource(&fixture_oracle::expected().review);
    if !typed(&mapping.iri(&review_id).unwrap(), &[uri::FABIO_NS]) {
        return Err("article has no FaBiO type".into());
    }
    let review = repo.store.article(&review_id).map_err(|e| e.to_string())?;
    for s in &review.sections {
        if !typed(&mapping.iri(&s.id).unwrap(), &[uri::DEO_NS, uri::DOCO_NS]) {
            return Err(format!("section `{}` has no DEO/DOCO type", s.heading));
        }
    }
    Ok(format!(
        "{} lines byte-identical, {} sections typed",
        lines.len(),
        review.sections.len()
    ))
}

fn acknowledgements() -> Outcome {
    let session = sessions::acknowledgement_session();
    let acks = session
        .repo
        .acknowledgements(&session.article, VersionRef::Head)
        .map_err(|e| e.to_string())?;
    if acks != session.expected || acks.contains(&session.outsider) {
        return Err(format!("got {acks:?}, expected {:?}", session.expected));
    }
    let html = session
        .repo
        .render(&session.article, VersionRef::Head)
        .map_err(|e| e.to_string())?
        .html;
    let doc = html_checks::parse(&html)?;
    let listed: Vec<&str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("li") && n.attribute("data-user").is_some())
        .filter_map(|n| n.text())
        .collect();
    if listed != session.expected_names {
        return Err(format!("rendered {listed:?}"));
    }
    Ok(listed.join(", "))
}

fn accessibility() -> Outcome {
    let mut repo = Repository::in_memory();
    let review = match smartreview::fixture::seed(&mut repo.store).map_err(|e| e.to_string())? {
        smartreview::fixture::SeedOutcome::Created(id) => id,
        other => return Err(format!("fresh store reported {other:?}")),
    };
    let outline =
        html_checks::check_accessible(&repo.render(&review, VersionRef::Head).map_err(|e| e.to_string())?.html)?;
    if outline.visualizations == 0 {
        return Err("fixture rendered no visualization".into());
    }
    let operator = repo
        .store
        .register_account("Checker", None)
        .map_err(|e| e.to_string())?;
    repo.publish(&review, "v1", &smartreview::Provenance::now(operator.user_id))
        .map_err(|e| e.to_string())?;
    html_checks::check_accessible(
        &repo
            .render(&review, VersionRef::Version(1))
            .map_err(|e| e.to_string())?
            .html,
    )?;
    Ok(format!(
        "{} headings, {} visualization(s) with alt text",
        outline.levels.len(),
        outline.visualizations
    ))
}

fn markdown_citations() -> Outcome {
    let n = markdown_golden::check()?;
    let all: String = markdown_golden::samples()
        .iter()
        .map(|p| std::fs::read_to_string(p).unwrap_or_default())
        .collect();
    for form in ["[@R100]", "[@R101; @R100]", "[@R999]"] {
        if !all.contains(form) {
            return Err(format!("no golden sample uses {form}"));
        }
    }
    if !all.lines().any(|l| l.starts_with("# ")) {
        return Err("no golden sample has an H1".into());
    }
    // Numbering in the review itself is identical across renders.
    let mut repo = Repository::in_memory();
    smartreview::fixture::seed(&mut repo.store).map_err(|e| e.to_string())?;
    let review = EntityId::resource(&fixture_oracle::expected().review);
    let a = repo.render(&review, VersionRef::Head).map_err(|e| e.to_string())?.html;
    let b = repo.render(&review, VersionRef::Head).map_err(|e| e.to_string())?.html;
    if a != b {
        return Err("review renders differ".into());
    }
    Ok(format!("{n} golden samples"))
}

fn unauthenticated_fuzz() -> Outcome {
    let report = api_fuzz::check_unauthenticated(FUZZ_CASES)?;
    if report.log_growth != 0 {
        return Err(format!("log grew by {} bytes", report.log_growth));
    }
    Ok(format!(
        "{} requests over {} endpoints, all 401, log growth 0",
        report.cases,
        api_fuzz::MUTATIONS.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("example queries 1-4", example_queries),
        ("fixture shape", fixture_shape),
        ("query engine oracle", sparql_equivalence),
        ("versioning suite", versioning_suite),
        ("RDF round trip and typing", rdf_round_trip),
        ("acknowledgement order", acknowledgements),
        ("accessible HTML", accessibility),
        ("markdown and citations", markdown_citations),
        ("unauthenticated mutations", unauthenticated_fuzz),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
