//! Event-census monotonicity: growing a generator's size parameter must not
//! lose events of the kinds the construction is designed to produce.
//!
//! The grid is kept to the smallest sizes of each generator; the larger
//! fixed-size counts are frozen in the acceptance suite and the generator
//! unit tests, where a single simulation's cost is justified.

use geovor::cli::{run_census, CensusRow, CliOptions};
use geovor::gvd::DiagramEventKind;

fn census(generator: &str, ms: &[usize], ns: &[usize]) -> Vec<CensusRow> {
    run_census(generator, ms, ns, &CliOptions::default())
        .unwrap()
        .rows
}

fn kind_count(row: &CensusRow, kinds: &[DiagramEventKind]) -> usize {
    let all = DiagramEventKind::all();
    kinds
        .iter()
        .map(|k| row.counts[all.iter().position(|a| a == k).unwrap()])
        .sum()
}

fn total(row: &CensusRow) -> usize {
    row.counts.iter().sum()
}

#[test]
fn tshapes_census_grows_in_m_and_n() {
    let rows = census("tshapes", &[1, 2], &[2, 4]);
    let at = |m, n| total(rows.iter().find(|r| r.m == m && r.n == n).unwrap());
    assert!(at(2, 2) > at(1, 2), "more teeth, more events");
    assert!(at(1, 4) > at(1, 2), "more site pairs, more events");
    assert!(at(2, 4) >= at(2, 2).max(at(1, 4)));
}

#[test]
fn gridsweep_23_events_grow_with_m_and_n() {
    let kinds = [DiagramEventKind::Collapse23, DiagramEventKind::Expand23];
    let rows = census("gridsweep", &[2, 4], &[3, 4]);
    let at = |m, n| {
        let row = rows.iter().find(|r| r.m == m && r.n == n).unwrap();
        kind_count(row, &kinds)
    };
    assert!(at(4, 3) > at(2, 3), "2,3-events did not grow with m");
    assert!(at(4, 4) > at(4, 3), "2,3-events did not grow with n");
    assert!(at(4, 4) > at(2, 4), "2,3-events did not grow with m at n=4");
}

#[test]
fn spikes13_census_is_monotone_in_m() {
    let kinds = [DiagramEventKind::Collapse13, DiagramEventKind::Expand13];
    let rows = census("spikes13", &[2, 4], &[3]);
    assert!(kind_count(&rows[0], &kinds) >= 2, "no 1,3-event pair at m=2");
    assert!(kind_count(&rows[1], &kinds) >= kind_count(&rows[0], &kinds));
    assert!(total(&rows[1]) >= total(&rows[0]));
}

#[test]
fn spikes33_33_events_grow_with_n() {
    let kinds = [DiagramEventKind::Collapse33, DiagramEventKind::Expand33];
    let rows = census("spikes33", &[2], &[4, 6]);
    assert!(kind_count(&rows[0], &kinds) >= 1, "no 3,3-event at n=4");
    assert!(kind_count(&rows[1], &kinds) > kind_count(&rows[0], &kinds));
}
