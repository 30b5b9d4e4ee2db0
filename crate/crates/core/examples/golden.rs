//! Regenerates `tests/golden/max_ap_free.json`:
//!
//! ```text
//! cargo run --release -p apinc --example golden
//! ```

use std::time::Instant;

use apinc::oracle::max_ap_free;

const COMMAND: &str = "cargo run --release -p apinc --example golden";

fn main() {
    let t = Instant::now();
    let values: Vec<serde_json::Value> = (1..=20u64)
        .map(|n| serde_json::json!({ "N": n, "r": max_ap_free(n, 3).expect("within budget") }))
        .collect();
    let doc = serde_json::json!({
        "table": "max_ap_free",
        "k": 3,
        "method": "exhaustive branch and bound over subsets of [1, N]",
        "provenance": COMMAND,
        "values": values,
    });
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/max_ap_free.json");
    std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap() + "\n").expect("write golden file");
    eprintln!("wrote {path} in {:.2?}", t.elapsed());
}
