//! Snapshot immutability and diff algebra under random edit scripts; see
//! `smartreview_testkit::versioning_oracle` for the model.

use proptest::prelude::*;
use smartreview_testkit::versioning_oracle::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn snapshots_are_immutable(ops in script()) {
        snapshot_immutable(&ops)?;
    }

    #[test]
    fn diff_matches_replayed_edits(ops in script(), more in script()) {
        diff_algebra(&ops, &more)?;
    }
}
