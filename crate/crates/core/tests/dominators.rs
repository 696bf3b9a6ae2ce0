mod common;

use std::time::Instant;

#[test]
fn random_digraphs_match_brute_force() {
    let start = Instant::now();
    common::dom_oracle::check(1000).unwrap();
    assert!(start.elapsed().as_secs() < 10, "took {:?}", start.elapsed());
}
