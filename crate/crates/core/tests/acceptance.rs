use pllsym::acceptance::{run, CRITERIA};

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let outcome = run(id);
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
