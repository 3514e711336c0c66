//! Black-box tests of the `plantsis` binary: exit-code contract, output
//! file conventions, and the regression anchors of the bundled fixture.
//! Each test builds its own dataset in a temp directory so nothing depends
//! on the checkout layout or is shared between tests.

use std::path::PathBuf;
use std::process::{Command, Output};

use plantsis::fixtures;

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
    config: PathBuf,
    out_dir: PathBuf,
}

impl Workspace {
    /// A fixture dataset plus a config covering every command, mirroring
    /// the bundled configs/fixture.toml but with hermetic paths.
    fn fixture() -> Workspace {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        fixtures::write_fixture_files(&root).unwrap();
        let out_dir = root.join("out");
        let config = root.join("run.toml");
        let text = format!(
            r#"
master_seed = 119

[paths]
edges = "{base}/edges.csv"
nodes = "{base}/nodes.csv"
footprints = "{base}/footprints.csv"
snapshots = "{base}/snapshots_train.csv"
points = "{base}/points.csv"
out_dir = "{out}"

[prior]
lower = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
upper = [0.45, 0.45, 0.15, 0.15, 0.02, 0.02]

[simulate]
params = [0.25, 0.30, 0.06, 0.04, 0.007, 0.006]
start_month = "2014-12"
horizon = 44
initial = [46, 47, 48, 56, 57, 58]

[rejection]
attempts = 2000
epsilon = 31.0

[filter]
epsilon = 31.0
generation_epsilon = 31.0

[forecast]
horizon = 3
replicates = 500

[validate]
snapshots = "{base}/snapshots_full.csv"
holdout_months = 2
replicates = 200

[bin]
snapshots = 45
start_month = "2014-12"
"#,
            base = root.display(),
            out = out_dir.display(),
        );
        std::fs::write(&config, text).unwrap();
        Workspace { _dir: dir, root, config, out_dir }
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_plantsis"))
            .arg("-c")
            .arg(&self.config)
            .args(args)
            .output()
            .unwrap()
    }

    fn output(&self, name: &str) -> String {
        std::fs::read_to_string(self.out_dir.join(name)).unwrap()
    }
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process terminated by signal")
}

/// Data rows of a CSV, skipping `#` metadata lines.
fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let output = Command::new(env!("CARGO_BIN_EXE_plantsis")).arg(flag).output().unwrap();
        assert_eq!(exit_code(&output), 0, "{flag} failed");
        assert!(stdout(&output).contains("plantsis"));
    }
}

#[test]
fn missing_config_is_a_usage_error() {
    let output = Command::new(env!("CARGO_BIN_EXE_plantsis"))
        .args(["-c", "/nonexistent/run.toml", "net-stats"])
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 1);
    assert!(stderr(&output).contains("cannot read config"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let ws = Workspace::fixture();
    let broken =
        std::fs::read_to_string(&ws.config).unwrap().replace("[simulate]", "typo = 3\n[simulate]");
    std::fs::write(&ws.config, broken).unwrap();
    let output = ws.run(&["net-stats"]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr(&output).contains("typo"));
}

#[test]
fn simulate_reproduces_the_bundled_snapshots() {
    let ws = Workspace::fixture();
    let output = ws.run(&["simulate"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert!(stdout(&output).contains("final infected 20 of 60"), "stdout: {}", stdout(&output));
    let trajectory = ws.output("trajectory.csv");
    let bundled = std::fs::read_to_string(ws.root.join("snapshots_full.csv")).unwrap();
    assert_eq!(data_rows(&trajectory), data_rows(&bundled));
}

#[test]
fn every_output_starts_with_the_metadata_header() {
    let ws = Workspace::fixture();
    assert_eq!(exit_code(&ws.run(&["simulate"])), 0);
    assert_eq!(exit_code(&ws.run(&["infer", "--mode", "rejection"])), 0);
    let digest_of = |name: &str| {
        let text = ws.output(name);
        let header = text.lines().next().unwrap().to_owned();
        assert!(
            header.starts_with("# plantsis ")
                && header.contains("seed=119")
                && header.contains("config="),
            "{name} header: {header}"
        );
        header
    };
    // The digest identifies the run configuration, so it is identical
    // across output files and independent of the command that wrote them.
    assert_eq!(digest_of("trajectory.csv"), digest_of("draws.csv"));
}

#[test]
fn rejection_with_a_huge_tolerance_accepts_everything() {
    let ws = Workspace::fixture();
    let output =
        ws.run(&["infer", "--mode", "rejection", "--epsilon", "1e12", "--attempts", "500"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let report = ws.output("infer_report.txt");
    assert!(report.contains("acceptance_rate: 1\n"), "report: {report}");
    // column header plus 500 accepted draws
    assert_eq!(data_rows(&ws.output("draws.csv")).len(), 501);
}

#[test]
fn mcmc_defaults_use_the_reference_tolerance() {
    let ws = Workspace::fixture();
    let config = std::fs::read_to_string(&ws.config).unwrap()
        + "\n[mcmc]\niterations = 2000\nburn_in = 100\nthin = 10\n";
    std::fs::write(&ws.config, config).unwrap();
    let output = ws.run(&["infer", "--mode", "mcmc"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    assert!(ws.output("infer_report.txt").contains("epsilon: 23\n"));
}

#[test]
fn filter_at_the_generation_tolerance_is_the_identity() {
    let ws = Workspace::fixture();
    assert_eq!(exit_code(&ws.run(&["infer", "--mode", "rejection"])), 0);
    let draws = ws.output("draws.csv");
    assert_eq!(exit_code(&ws.run(&["filter"])), 0);
    assert_eq!(ws.output("filtered.csv"), draws, "filtered.csv must be byte-identical");
}

#[test]
fn net_stats_reports_the_degree_histogram() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("edges.csv"), "# 3-node path\n0,1\n1,2\n").unwrap();
    std::fs::write(dir.path().join("nodes.csv"), "id,planted\n0,1\n1,1\n2,1\n").unwrap();
    let config = format!(
        "[paths]\nedges = \"{0}/edges.csv\"\nnodes = \"{0}/nodes.csv\"\nout_dir = \"{0}/out\"\n",
        dir.path().display()
    );
    let config_path = dir.path().join("run.toml");
    std::fs::write(&config_path, config).unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_plantsis"))
        .arg("-c")
        .arg(&config_path)
        .arg("net-stats")
        .output()
        .unwrap();
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let stats = std::fs::read_to_string(dir.path().join("out/net_stats.txt")).unwrap();
    // A 3-node path has two degree-1 ends and one degree-2 middle.
    assert!(stats.contains("1,2\n2,1"), "stats: {stats}");
}

#[test]
fn missing_snapshots_file_is_a_data_error() {
    let ws = Workspace::fixture();
    std::fs::remove_file(ws.root.join("snapshots_train.csv")).unwrap();
    let output = ws.run(&["infer", "--mode", "rejection"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("snapshots_train.csv"));
}

#[test]
fn malformed_edges_are_a_data_error() {
    let ws = Workspace::fixture();
    std::fs::write(ws.root.join("edges.csv"), "0,1\n5,not-a-number\n").unwrap();
    let output = ws.run(&["net-stats"]);
    assert_eq!(exit_code(&output), 2);
    assert!(stderr(&output).contains("not-a-number"), "stderr: {}", stderr(&output));
}

#[test]
fn mcmc_initialization_failure_cites_the_tolerance() {
    let ws = Workspace::fixture();
    let output = ws.run(&["infer", "--mode", "mcmc", "--epsilon", "1e-4"]);
    assert_eq!(exit_code(&output), 3);
    assert!(stderr(&output).contains("0.0001"), "stderr: {}", stderr(&output));
}

#[test]
fn bin_reproduces_snapshots_and_reports_rejects() {
    let ws = Workspace::fixture();
    let output = ws.run(&["bin"]);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    let binned = ws.output("binned_snapshots.csv");
    let bundled = std::fs::read_to_string(ws.root.join("snapshots_full.csv")).unwrap();
    assert_eq!(data_rows(&binned), data_rows(&bundled));
    // Header row plus the two stray path points.
    assert_eq!(data_rows(&ws.output("bin_rejects.csv")).len(), 3);
}

#[test]
fn forecast_and_validate_run_from_rejection_draws() {
    let ws = Workspace::fixture();
    assert_eq!(exit_code(&ws.run(&["infer", "--mode", "rejection"])), 0);
    let forecast = ws.run(&["forecast"]);
    assert_eq!(exit_code(&forecast), 0, "{}", stderr(&forecast));
    assert!(ws.output("forecast_report.txt").contains("steady_state_mean"));
    let validate = ws.run(&["validate"]);
    assert_eq!(exit_code(&validate), 0, "{}", stderr(&validate));
    let report = ws.output("validate_report.txt");
    assert!(report.contains("mean_loss") && report.contains("auc"), "report: {report}");
}
