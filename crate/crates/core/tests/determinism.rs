use std::fs;

use vlbm::cases::{build_problem, run_problem, RunConfig, RunOptions};
use vlbm::output::write_run;

fn outputs(config: &RunConfig) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let p = build_problem(config).unwrap();
    let out = run_problem(&p, RunOptions::from_config(config, &p)).unwrap();
    let mut files: Vec<(String, Vec<u8>)> = write_run(dir.path(), &p, &out)
        .unwrap()
        .into_iter()
        .map(|path| (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_bit_identical() {
    for config in [
        RunConfig { snapshot_every: Some(25), ..RunConfig::for_case("burgers_outflow") },
        RunConfig { j: Some(20), entropy_check: Some(true), ..RunConfig::for_case("burgers2d_oblique") },
        RunConfig { j: Some(8), variant: Some("b".into()), ..RunConfig::for_case("euler_mach10") },
    ] {
        let (a, b) = (outputs(&config), outputs(&config));
        assert!(!a.is_empty());
        assert_eq!(a, b, "{}", config.case);
    }
}

#[test]
fn metadata_echoes_resolved_configuration() {
    let config = RunConfig { omega: Some(1.2), left_bc: Some("extrap1".into()), ..RunConfig::for_case("burgers_outflow") };
    for (name, bytes) in outputs(&config) {
        let text = String::from_utf8(bytes).unwrap();
        for key in ["# case = burgers_outflow", "# omega_s = 1.19999", "# bc_west = extrapolation(order 1)", "# steps = 200", "# monotonicity_verdict = monotone"] {
            assert!(text.contains(key), "{name} lacks {key}");
        }
    }
}
