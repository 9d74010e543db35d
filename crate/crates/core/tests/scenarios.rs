//! The builtin verification scenarios and their headline values.

use scatter_core::verify;

fn run(name: &str) -> verify::Report {
    let r = verify::run_builtin(name).unwrap();
    for c in &r.criteria {
        println!("{}", c.summary_line());
    }
    r
}

#[test]
fn neumann_free_passes_identity_checks() {
    let r = run("neumann-free");
    assert!(r.all_pass());
    assert!(r.criteria.iter().any(|c| c.name.contains("identity")));
}

#[test]
fn robin_step_passes_with_vanishing_jost_value() {
    let r = run("robin-step");
    assert!(r.all_pass());
    let j0 = r.criteria.iter().flat_map(|c| &c.checks).find(|k| k.name == "|J(0)|").unwrap();
    assert!(j0.measured < 1e-6);
}

#[test]
fn dirichlet_counterexample_is_classified_growing() {
    let r = run("dirichlet-counterexample");
    assert!(r.all_pass());
    assert!(r.criteria.iter().flat_map(|c| &c.checks).any(|k| k.name.contains("classified growing")));
}

#[test]
fn report_csv_has_one_row_per_criterion() {
    let r = run("neumann-free");
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("id,name,measured,threshold,pass"));
    assert_eq!(lines.count(), r.criteria.len());
}
