mod common;

#[test]
fn taint_is_monotone_and_its_fixpoint_idempotent() {
    let (functions, tainted) = common::taint_oracle::check().unwrap();
    assert!(functions > 200);
    assert!(tainted >= 5, "only {tainted} functions carry taint");
}
