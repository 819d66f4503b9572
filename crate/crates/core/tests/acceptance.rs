//! Acceptance gate: one test per published criterion. Each test runs the
//! matching check runner, prints its pass/fail line with the measured
//! residuals, and asserts the verdict. Run with `--nocapture` to see the
//! lines for passing criteria too.

use tfimmse::checks;

fn gate(report: checks::CheckReport) {
    print!("{}", report.render());
    assert!(
        report.passed,
        "{} failed:\n{}",
        report.name,
        report.render()
    );
}

#[test]
fn criterion_1_wd_properties() {
    gate(checks::check_wd_properties());
}

#[test]
fn criterion_2_mixture_superposition() {
    gate(checks::check_mixture_identity());
}

#[test]
fn criterion_3_single_user_identity() {
    gate(checks::check_single_user_identity());
}

#[test]
fn criterion_4_two_user_decomposition() {
    gate(checks::check_two_user_decomposition());
}

#[test]
fn criterion_5_conditional_psd() {
    gate(checks::check_conditional_psd());
}

#[test]
fn criterion_6_tf_term_suite() {
    gate(checks::check_tf_term_suite());
}

#[test]
fn criterion_7_reproducibility() {
    gate(checks::check_reproducibility());
}
