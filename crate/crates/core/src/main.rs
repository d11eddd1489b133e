use std::process::ExitCode;

use bubblekit::cli::{emit_report, parse_args, run, RunConfig};

fn execute(config: &RunConfig) -> anyhow::Result<bool> {
    let report = run(config)?;
    let path = emit_report(&report, config)?;
    let failures = report.failures().count()
        + report.integrals.values().filter(|c| !c.passed()).count();
    println!(
        "{}: {} ({} records, {} integrals, {} failing) -> {}",
        report.suite_id,
        if report.passed { "PASS" } else { "FAIL" },
        report.records.len(),
        report.integrals.len(),
        failures,
        path.display()
    );
    Ok(report.passed)
}

fn main() -> ExitCode {
    let config = match parse_args(std::env::args_os().skip(1)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
