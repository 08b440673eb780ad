use forestmat::corpus;
use forestmat::verify::verify_digraph;

#[test]
fn every_corpus_digraph_verifies() {
    let mut failures = Vec::new();
    for g in corpus::standard() {
        let report = verify_digraph(&g.graph).unwrap();
        for c in report.checks.iter().filter(|c| !c.passed()) {
            failures.push(format!("{}: {} dev={:e} tol={:e} {}", g.name, c.name, c.deviation, c.tolerance, c.detail));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn unit_weight_random_digraphs_verify() {
    for n in 4..=6 {
        for g in corpus::random_unit(n, 5, corpus::CORPUS_SEED) {
            let report = verify_digraph(&g.graph).unwrap();
            assert!(report.all_passed(), "{}: {:?}", g.name, report.checks.iter().find(|c| !c.passed()));
        }
    }
}
