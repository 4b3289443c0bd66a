//! Shared helpers for the integration tests.

/// Print one acceptance line.
pub fn report(id: u32, what: &str, pass: bool, measured: &str, tolerance: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {what} | measured: {measured} | tolerance: {tolerance}");
}
