mod common;

use common::{game, r, tv};
use schelling_core::topology::{build_graph, standard_graph, GraphKind};
use schelling_core::{enumerate_equilibria, optimal_welfare, price_ratios, Assignment, EnumerationConfig};

fn strings(found: &[Assignment]) -> Vec<String> {
    found.iter().map(|a| a.slots().iter().map(|t| t.to_string()).collect()).collect()
}

#[test]
fn path_of_five() {
    for t1 in [(0, 1), (1, 2)] {
        let g = game(standard_graph(GraphKind::Path, 5).unwrap(), 2, 2, tv(&[(1, 1), t1]));
        let found = enumerate_equilibria(&g, &EnumerationConfig::default()).unwrap();
        assert_eq!(strings(&found), ["11022", "22011"]);
        let (best, welfare) = optimal_welfare(&g, &EnumerationConfig::default()).unwrap();
        assert_eq!((strings(&[best]), welfare), (vec!["11022".to_string()], r(4, 1)));
    }
}

#[test]
fn cycle_of_six() {
    let g = game(standard_graph(GraphKind::Cycle, 6).unwrap(), 2, 2, tv(&[(1, 1), (0, 1)]));
    let found = enumerate_equilibria(&g, &EnumerationConfig::default()).unwrap();
    assert_eq!(strings(&found), ["011022", "022011", "102201", "110220", "201102", "220110"]);
}

#[test]
fn cycle_of_seven_three_types() {
    let g = game(standard_graph(GraphKind::Cycle, 7).unwrap(), 3, 2, tv(&[(1, 1), (1, 2), (0, 1)]));
    let report = price_ratios(&g, &EnumerationConfig::default()).unwrap();
    assert_eq!(report.equilibrium_count, 42);
    assert_eq!((report.opt, report.worst_eq, report.best_eq), (r(5, 1), r(15, 4), r(5, 1)));
    assert_eq!(report.poa, r(4, 3));
    let found = enumerate_equilibria(&g, &EnumerationConfig::default()).unwrap();
    assert_eq!(&strings(&found)[..4], ["0112233", "0112323", "0121233", "0323211"]);
}

#[test]
fn star_with_quarter_tolerance() {
    let edges: Vec<_> = (1..6).map(|v| (0, v)).collect();
    let g = game(build_graph(6, &edges).unwrap(), 2, 2, tv(&[(1, 1), (1, 4)]));
    let report = price_ratios(&g, &EnumerationConfig::default()).unwrap();
    assert_eq!(report.equilibrium_count, 60);
    assert_eq!((report.opt, report.worst_eq, report.best_eq), (r(2, 1), r(2, 1), r(2, 1)));
    assert_eq!(strings(&[report.optimal]), ["100122"]);
}
