use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const DUAN: &str = "\
[array]
n_modes = 2
pump_gains = 0.4
link_couplings = 1

[time]
times = 0, 0.5, 1

[observables]
intensities = false
duan_pairs = all

[output]
id = cli
";

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn chiwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiwave"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn run_writes_csv_to_stdout() {
    let spec = scratch("run.scn", DUAN);
    let out = chiwave(&["run", spec.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scenario_id,time,observable,i,j,k,phi,value");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("cli,1,duan,1,2,,0,"));
}

#[test]
fn json_and_out_flags() {
    let spec = scratch("json.scn", DUAN);
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("json-out.json");
    let out = chiwave(&[
        "--format",
        "json",
        "--out",
        target.to_str().unwrap(),
        "run",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.trim_start().starts_with('['));
    assert_eq!(text.matches("\"observable\": \"duan\"").count(), 3);
}

#[test]
fn validate_reports_ok() {
    let spec = scratch("valid.scn", DUAN);
    let out = chiwave(&["validate", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ok"));
}

#[test]
fn validation_errors_exit_2() {
    let spec = scratch("zero.scn", &DUAN.replace("n_modes = 2", "n_modes = 0"));
    let out = chiwave(&["validate", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_modes"));
    assert_eq!(chiwave(&["figure", "fig9"]).status.code(), Some(2));
    let spec = scratch("axis.scn", DUAN);
    assert_eq!(
        chiwave(&["sweep", spec.to_str().unwrap(), "--axis", "beta=0:1:2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn numerical_failure_exits_3() {
    let blowup = DUAN
        .replace("pump_gains = 0.4", "pump_gains = 200")
        .replace("times = 0, 0.5, 1", "times = 0, 5")
        .replace("[input]", "")
        .replace(
            "[time]",
            "[input]\nstate = coherent\nsite = 1\namplitude = 1\n\n[time]",
        );
    let spec = scratch("blowup.scn", &blowup);
    let out = chiwave(&["--tol", "1e-8", "run", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time step 1"));
}

#[test]
fn overflowing_propagator_exits_3() {
    let blowup = DUAN
        .replace("pump_gains = 0.4", "pump_gains = 200")
        .replace("times = 0, 0.5, 1", "times = 0, 5");
    let spec = scratch("overflow.scn", &blowup);
    let out = chiwave(&["run", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_exits_1() {
    let out = chiwave(&["run", "/nonexistent/scenario.scn"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_prefixes_axis_columns() {
    let spec = scratch("sweep.scn", DUAN);
    let out = chiwave(&[
        "sweep",
        spec.to_str().unwrap(),
        "--axis",
        "gamma=0:0.2:2",
        "--axis",
        "phi=0:1:3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "axis_gamma,axis_phi,scenario_id,time,observable,i,j,k,phi,value"
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("0.2,")).count(), 9);
}

#[test]
fn figure_output_has_metadata() {
    let out = chiwave(&["figure", "fig4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# figure: fig4\n"));
    assert!(text.contains("\nfig4_g2/3,0,vlf,2,1,3,1.5707963267948966,4\n"));
}
