//! SSA invariants over the fixture tree and random programs, and
//! equivalence of each random program before and after SSA construction.

mod common;

use common::ssa_oracle;

#[test]
fn every_fixture_function_is_valid_ssa() {
    let n = ssa_oracle::fixture_functions().unwrap();
    assert!(n > 200, "only {n} functions");
}

#[test]
fn random_programs_are_valid_ssa_and_keep_their_meaning() {
    let s = ssa_oracle::random_programs(500).unwrap();
    assert!(s.returned > 1900, "only {} of {} runs returned", s.returned, s.runs);
    assert!(s.phis > 1000, "only {} phis; the generator is too tame", s.phis);
}
