// Temporary: run selected verify cases from the CLI-less side.

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let case = args.first().map(|s| s.as_str());
    let report = mhfeps::fixtures::run_verify(case).unwrap();
    for c in &report.cases {
        println!(
            "[{}] {} ({:.1}s, {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.case,
            c.wall_seconds,
            c.truncation
        );
        for ch in &c.checks {
            println!(
                "    [{}] {}: computed {} vs {} ({}; {})",
                if ch.passed { "ok" } else { "FAIL" },
                ch.label,
                ch.computed,
                ch.reference,
                ch.tolerance,
                ch.source
            );
        }
    }
}
