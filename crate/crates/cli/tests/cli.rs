use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "experiment,snr_db,lambda,d,alpha,rho,policy,fading,analytic,mc_mean,mc_stderr,n_trials";

fn locrelay(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_locrelay"));
    cmd.args(args).env_remove(locrelay::WORKERS_ENV);
    if let Some(w) = workers {
        cmd.env(locrelay::WORKERS_ENV, w);
    }
    cmd.output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn rate_sweep_to_stdout() {
    let out = locrelay(
        &[
            "rate-vs-snr",
            "--snr-db",
            "0:10:5",
            "--trials",
            "300",
            "--fading",
            "none",
        ],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 3 * 4);
    assert!(lines[1].starts_with("rate-vs-snr,0,1,1,4,,optimum,none,0."));
    assert!(lines[2].starts_with("rate-vs-snr,0,1,1,4,,midpoint,none,,"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        "# outage sweep\nmetric = outage\nsnr_db = 14, 18\nlambda = 1\nd = 1\nrho = 1\nfading = rayleigh\npolicies = optimum\ntrials = 400\n",
    )
    .unwrap();
    let out = locrelay(
        &[
            "custom",
            "--config",
            cfg.to_str().unwrap(),
            "--lambda",
            "2",
            "--out",
            csv.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&csv);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(
        lines[1].starts_with("custom,14,2,1,4,1,optimum,rayleigh,"),
        "{}",
        lines[1]
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("outage 0.01"));
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &Path| {
        vec![
            "rate-vs-lambda".to_owned(),
            "--lambda".into(),
            "0.5,1".into(),
            "--trials".into(),
            "2000".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &Path, w| {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        assert!(locrelay(&refs, Some(w)).status.success());
    };
    run(&a, "1");
    run(&b, "3");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bad_inputs_exit_with_config_error() {
    let out = locrelay(&["dist-check", "--lambda", "0"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda must be positive"));
    let out = locrelay(&["custom", "--trials", "10"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = locrelay(&["rate-vs-snr", "--snr-db", "5:0:1"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = locrelay(&["rate-vs-snr", "--trials", "10"], Some("many"));
    assert_eq!(out.status.code(), Some(2));
    let out = locrelay(&["rate-vs-snr", "--config", "/nonexistent/x.cfg"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_mode_flags_disagreement() {
    // A window of radius 0.5 is empty in about half the trials, which drags
    // the simulated rate far below the untruncated closed form.
    let args = [
        "custom",
        "--snr-db",
        "5",
        "--lambda",
        "1",
        "--d",
        "1",
        "--tau",
        "0.5",
        "--policies",
        "optimum",
        "--trials",
        "200",
    ];
    let lax = locrelay(&args, None);
    assert!(lax.status.success());
    assert!(String::from_utf8_lossy(&lax.stderr).contains("disagreement"));
    let strict: Vec<&str> = args.iter().copied().chain(["--strict"]).collect();
    assert_eq!(locrelay(&strict, None).status.code(), Some(1));
}

#[test]
fn dist_check_writes_report_and_gates_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dc.csv");
    let out = locrelay(&["dist-check", "--trials", "200", "--out", csv.to_str().unwrap()], None);
    // 200 samples cannot meet the 0.01 KS gates
    assert_eq!(out.status.code(), Some(1));
    let report = read(&dir.path().join("dc.csv.report.txt"));
    assert!(report.contains("FAIL  ks_optimum_distance"));
    assert!(report.contains("PASS  halves_identity"));
    assert!(read(&csv).starts_with(HEADER));
}
