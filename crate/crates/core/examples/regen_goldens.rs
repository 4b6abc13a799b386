//! Regenerate the committed fixture files and golden reports from the
//! in-code fixture definitions. Run from the repository root:
//! `cargo run -p pn-core --example regen_goldens`

use pn_core::fixtures;
use pn_core::suite::{run_structure, SuiteConfig};

fn main() {
    for (name, stem) in [
        ("FIX-0", "fix_0"),
        ("FIX-A", "fix_a"),
        ("FIX-B", "fix_b"),
        ("FIX-C", "fix_c"),
    ] {
        let def = fixtures::fixture_def(name).unwrap();
        std::fs::write(format!("fixtures/{stem}.json"), def.to_json() + "\n").unwrap();
        let s = def.build(name).unwrap();
        let report = run_structure(&s, &SuiteConfig::default()).normalized();
        std::fs::write(
            format!("fixtures/golden/{stem}.report.json"),
            report.to_json() + "\n",
        )
        .unwrap();
        println!("wrote fixtures/{stem}.json and fixtures/golden/{stem}.report.json");
    }
}
