//! Comparison against the exact dissociation-limit values.

use std::io::Write;

use fermicorr::limits::{self, analytic_checks, compare_report, table_i_reference, Check};

use crate::input::Input;
use crate::pipeline::{run, Selection, Settings};
use crate::Failure;

/// Tolerance for the analytic states, which reproduce the limit values exactly.
pub const ANALYTIC_TOLERANCE: f64 = 1e-9;

pub fn analytic() -> Result<Vec<Check>, Failure> {
    analytic_checks(ANALYTIC_TOLERANCE).map_err(|e| Failure::Input(e.to_string()))
}

/// Solves `input` and compares its ground and thermal states with the limit.
pub fn from_file(input: &Input, settings: &Settings, tolerance: f64) -> Result<Vec<Check>, Failure> {
    let settings = Settings {
        states: vec![Selection::Ground, Selection::Thermal],
        ..settings.clone()
    };
    let doc = run(input, &settings)?;
    let s = &doc.sector;
    if (s.n_spatial, s.n_up, s.n_down) != (7, 5, 5) {
        return Err(Failure::Input(format!(
            "{}: the dissociation limit is defined for the (7, 5, 5) sector, got ({}, {}, {})",
            input.path.display(),
            s.n_spatial,
            s.n_up,
            s.n_down
        )));
    }
    let table = table_i_reference();
    let (gs, thermal) = (&doc.reports[0].report, &doc.reports[1].report);
    let mut out = compare_report("gs", gs, &table.gs, &limits::gs_limit_scalars(), tolerance);
    out.extend(compare_report(
        "thermal",
        thermal,
        &table.thermal,
        &limits::thermal_limit_scalars(),
        tolerance,
    ));
    out.push(Check::new(
        "thermal S(p)",
        12f64.log2(),
        thermal.s_p.unwrap_or(f64::NAN),
        tolerance,
    ));
    Ok(out)
}

/// Writes one line per check and returns whether all passed.
pub fn print_table<W: Write>(checks: &[Check], mut out: W) -> Result<bool, Failure> {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    writeln!(
        out,
        "{:<6} {:<width$} {:>16} {:>16} {:>10} {:>8}",
        "", "check", "expected", "actual", "deviation", "tol"
    )
    .map_err(Failure::output)?;
    for c in checks {
        writeln!(
            out,
            "{:<6} {:<width$} {:>16.10} {:>16.10} {:>10.2e} {:>8.0e}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.expected,
            c.actual,
            (c.actual - c.expected).abs(),
            c.tolerance
        )
        .map_err(Failure::output)?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed == 0 {
        writeln!(out, "PASS: {} checks", checks.len()).map_err(Failure::output)?;
    } else {
        writeln!(out, "FAIL: {failed} of {} checks", checks.len()).map_err(Failure::output)?;
    }
    Ok(failed == 0)
}
