//! The verification checks not owned by an acceptance criterion: the cubic
//! oracle suite, the classifier suite as a whole, and the green lattice
//! checks. (The full-norm orbit partition at q = 5 is intentionally absent:
//! it is the documented red acceptance check.)

use mori_class::verify::{self, NormFilter};

fn assert_all(results: Vec<verify::CheckResult>) {
    for r in &results {
        println!(
            "{} {} ({})",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    assert!(
        verify::all_passed(&results),
        "{}",
        verify::render_report(&results)
    );
}

#[test]
fn cubic_suite_passes() {
    assert_all(verify::cubic_suite());
}

#[test]
fn classifier_suite_passes() {
    assert_all(verify::classifier_suite());
}

#[test]
fn lattice_checks_pass_up_to_rank_four_and_on_even_norms() {
    assert_all(vec![
        verify::check_orbit_partition(4, NormFilter::All),
        verify::check_orbit_partition(5, NormFilter::EvenOnly),
        verify::check_alpha_lift_independence(),
        verify::check_isometry_searches(),
    ]);
}
