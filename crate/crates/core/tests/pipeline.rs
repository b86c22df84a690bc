use std::fs;
use std::path::PathBuf;

use adaptive_deploy::sim::{dtrp_run_from_tables, run, Scenario, Table};

fn scenarios() -> Vec<(String, Scenario)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut out: Vec<(String, Scenario)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let s = Scenario::from_toml_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, s)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn shortened(mut s: Scenario) -> Scenario {
    s.horizon.events = Some(s.horizon.events.unwrap_or(2000).min(2000));
    s.output.objective_samples = s.output.objective_samples.min(500);
    s
}

#[test]
fn bundled_scenarios_validate_and_reparse() {
    let all = scenarios();
    assert!(all.len() >= 8);
    for (name, s) in all {
        s.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = Scenario::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(again, s, "{name}");
    }
}

#[test]
fn traces_survive_a_text_round_trip() {
    for (name, s) in scenarios() {
        let out = run(&shortened(s)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = out.trace_text();
        assert!(text.starts_with("# algorithm"), "{name}");
        assert_eq!(Table::parse_csv(&text).unwrap(), out.trace, "{name}");
        assert!(!out.trace.rows.is_empty(), "{name}");
        let summary: toml::Table = out.summary_text().parse().unwrap();
        assert_eq!(summary, out.summary, "{name}");
    }
}

#[test]
fn routing_summaries_follow_from_the_written_rows() {
    for (name, s) in scenarios().into_iter().filter(|(n, _)| n.starts_with("dtrp")) {
        let out = run(&shortened(s)).unwrap();
        let arrivals = out.arrivals.as_ref().expect("routing runs record arrivals");
        let rebuilt = dtrp_run_from_tables(&out.trace, arrivals).expect("tables are complete");
        let completed = out.summary["completed"].as_integer().unwrap() as usize;
        assert_eq!(rebuilt.completions.len(), completed, "{name}");
    }
}
