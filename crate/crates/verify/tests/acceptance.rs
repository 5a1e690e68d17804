use std::process::ExitCode;

fn main() -> ExitCode {
    let criteria = periodlab_verify::run_all();
    for c in &criteria {
        println!("{c}");
    }
    let failed = criteria.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
