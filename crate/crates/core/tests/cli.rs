//! End-to-end runs of the `dysco` binary on the sample configs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dysco::table::ResultTable;

const SUBCOMMANDS: [(&str, &str); 9] = [
    ("map", "map"),
    ("sensitivity", "sensitivity"),
    ("dr-ramp", "dr_ramp"),
    ("spectrogram", "spectrogram"),
    ("noise-spectrum", "noise_spectrum"),
    ("filter-function", "filter_function"),
    ("trace", "trace"),
    ("baseline", "baseline"),
    ("export-program", "export_program"),
];

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/configs")
        .join(format!("{name}.toml"))
}

fn dysco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dysco"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn selftest_passes() {
    let out = dysco(&["selftest"]);
    let stdout = text(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.lines().count() >= 3);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
}

#[test]
fn every_subcommand_writes_parseable_tables() {
    let dir = tempfile::tempdir().unwrap();
    for (sub, name) in SUBCOMMANDS {
        let out_path = dir.path().join(format!("{name}.tsv"));
        let out = dysco(&[
            sub,
            "--config",
            config(name).to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{sub}: {}", text(&out.stderr));
        let table = ResultTable::parse(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
        assert!(!table.rows.is_empty(), "{sub} wrote no rows");
        assert!(
            table.render().contains(&format!("# experiment: {sub}")),
            "{sub}"
        );
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (sub, name) in [
        ("noise-spectrum", "noise_spectrum"),
        ("spectrogram", "spectrogram"),
        ("baseline", "baseline"),
    ] {
        let runs: Vec<Vec<u8>> = ["a", "b"]
            .iter()
            .map(|tag| {
                let p = dir.path().join(format!("{name}_{tag}.tsv"));
                let out = dysco(&[
                    sub,
                    "--config",
                    config(name).to_str().unwrap(),
                    "--out",
                    p.to_str().unwrap(),
                ]);
                assert!(out.status.success(), "{sub}: {}", text(&out.stderr));
                std::fs::read(&p).unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{sub} output differs between runs");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let path = config("noise_spectrum");
    let one = dysco(&[
        "noise-spectrum",
        "--config",
        path.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    let four = dysco(&[
        "noise-spectrum",
        "--config",
        path.to_str().unwrap(),
        "--threads",
        "4",
    ]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seed_override_changes_random_results() {
    let path = config("noise_spectrum");
    let a = dysco(&[
        "noise-spectrum",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    let b = dysco(&[
        "noise-spectrum",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "2",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn export_program_goes_to_stdout_without_out() {
    let out = dysco(&[
        "export-program",
        "--sequence",
        "dysco",
        "--n-units",
        "3",
        "--phi-rad",
        "0.5",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let table = ResultTable::parse(&text(&out.stdout)).unwrap();
    assert_eq!(table.rows.len(), 8 * 3 + 1);
}

#[test]
fn invalid_values_name_the_offending_key() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "experiment = \"map\"\n[sequence]\nbeta_k = 1.5\n[grid]\nb_points = 4\nb_stop_t = 1e-6\n",
    )
    .unwrap();
    let out = dysco(&["map", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains("beta_k"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"map\"\n[sequence]\nn_unit = 4\n").unwrap();
    let out = dysco(&["map", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains("n_unit"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn command_line_overrides_are_validated() {
    let out = dysco(&[
        "map",
        "--config",
        config("map").to_str().unwrap(),
        "--shots",
        "0",
    ]);
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("shots"), "{}", text(&out.stderr));
}

#[test]
fn modulation_beyond_bandwidth_is_rejected() {
    let out = dysco(&[
        "export-program",
        "--sequence",
        "dysco-modulated",
        "--f-s-hz",
        "5e6",
    ]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains("f_s_hz"),
        "{}",
        text(&out.stderr)
    );
}
