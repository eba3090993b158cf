//! Shared test oracles. Each oracle recomputes an expected answer without
//! going through the code it checks.

pub mod api_fuzz;
pub mod fixture_oracle;
pub mod html_checks;
pub mod markdown_golden;
pub mod sessions;
pub mod sparql_oracle;
pub mod versioning_oracle;

/// A runner for `cases` cases that does not persist failures, since
/// callers outside a test file have no source path to persist next to.
pub fn runner(cases: u32) -> proptest::test_runner::TestRunner {
    proptest::test_runner::TestRunner::new(proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    })
}
