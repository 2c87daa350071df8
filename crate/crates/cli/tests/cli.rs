use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use easr_core::io::read_csv;
use easr_core::{write_bdf, BdfRecording, Signal};

fn easr() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_easr"));
    c.env_remove("EASR_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    easr().args(args).output().expect("spawn easr")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
}

fn simulate(dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("sim");
    let mut args = vec!["simulate", "--out-dir", s(&out)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn load_csv(p: &Path) -> Signal {
    read_csv(&std::fs::read_to_string(p).unwrap(), 500.0).unwrap()
}

#[test]
fn simulate_writes_two_signals_and_six_onsets() {
    let t = tempfile::tempdir().unwrap();
    let sim = simulate(t.path(), &[]);
    assert_eq!(load_csv(&sim.join("contaminated.csv")).len(), 30_000);
    assert_eq!(load_csv(&sim.join("ground_truth.csv")).len(), 30_000);
    let onsets = std::fs::read_to_string(sim.join("onsets.csv")).unwrap();
    assert_eq!(onsets.lines().count(), 1 + 6);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sa = simulate(a.path(), &["--seed", "11"]);
    let sb = simulate(b.path(), &["--seed", "11"]);
    for f in ["contaminated.csv", "ground_truth.csv", "onsets.csv", "simulation.txt"] {
        assert_eq!(
            std::fs::read(sa.join(f)).unwrap(),
            std::fs::read(sb.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn lower_snr_records_larger_alpha() {
    let alpha = |snr: &str| {
        let t = tempfile::tempdir().unwrap();
        let sim = simulate(t.path(), &["--snr-db", snr]);
        let text = std::fs::read_to_string(sim.join("simulation.txt")).unwrap();
        value(&text, "alpha").unwrap().parse::<f64>().unwrap()
    };
    assert!(alpha("-7") > alpha("2"));
}

#[test]
fn clean_bdf_channel_to_csv() {
    let t = tempfile::tempdir().unwrap();
    let sim = simulate(t.path(), &[]);
    let fp1 = load_csv(&sim.join("contaminated.csv")).with_label("Fp1");
    let fp2 = load_csv(&sim.join("ground_truth.csv")).with_label("Fp2");
    let bdf = t.path().join("s.bdf");
    std::fs::write(
        &bdf,
        write_bdf(&BdfRecording::from_signals(&[fp1, fp2], 1.0).unwrap()).unwrap(),
    )
    .unwrap();

    let out = t.path().join("clean.csv");
    let o = run(&["clean", "--input", s(&bdf), "--channel", "Fp1", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(load_csv(&out).len(), 30_000);
    let report = stdout(&o);
    assert!(report.contains(r#""m":90"#), "{report}");
    assert!(report.contains(r#""cutoff_k":17.0"#), "{report}");
    assert_eq!(value(&report, "channel"), Some("Fp1"));

    let o = run(&["clean", "--input", s(&bdf), "--channel", "Cz", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("Fp1") && err.contains("Fp2"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn saved_state_round_trips_through_files() {
    let t = tempfile::tempdir().unwrap();
    let sim = simulate(t.path(), &[]);
    let input = sim.join("contaminated.csv");
    let (a, b, state) = (
        t.path().join("a.csv"),
        t.path().join("b.csv"),
        t.path().join("state.json"),
    );
    let o = run(&[
        "clean",
        "--input",
        s(&input),
        "--fs",
        "500",
        "--out",
        s(&a),
        "--state-out",
        s(&state),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&[
        "clean",
        "--input",
        s(&input),
        "--fs",
        "500",
        "--out",
        s(&b),
        "--state-in",
        s(&state),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn evaluate_identical_signals() {
    let t = tempfile::tempdir().unwrap();
    let sim = simulate(t.path(), &[]);
    let gt = sim.join("ground_truth.csv");
    let c = sim.join("contaminated.csv");
    let o = run(&[
        "evaluate",
        "--contaminated",
        s(&c),
        "--cleaned",
        s(&gt),
        "--ground-truth",
        s(&gt),
        "--fs",
        "500",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert_eq!(value(&r, "rrmse_pct"), Some("0"));
    assert_eq!(value(&r, "cc"), Some("1"));
    assert_eq!(value(&r, "blinks_before"), Some("6"));
    assert!(value(&r, "version").is_some() && value(&r, "config").is_some());
}

#[test]
fn evaluate_without_truth_still_counts_blinks() {
    let t = tempfile::tempdir().unwrap();
    let sim = simulate(t.path(), &[]);
    let c = sim.join("contaminated.csv");
    let o = run(&["evaluate", "--contaminated", s(&c), "--cleaned", s(&c), "--fs", "500"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert_eq!(value(&r, "rrmse_pct"), None);
    assert_eq!(value(&r, "cc"), None);
    assert_eq!(value(&r, "blinks_after"), Some("6"));
    assert_eq!(value(&r, "reduction_pct"), Some("0"));
}

#[test]
fn evaluate_csv_columns() {
    let t = tempfile::tempdir().unwrap();
    let sim = simulate(t.path(), &[]);
    let (c, gt) = (sim.join("contaminated.csv"), sim.join("ground_truth.csv"));
    let blinks = t.path().join("blinks.csv");
    let o = run(&[
        "evaluate",
        "--contaminated",
        s(&c),
        "--cleaned",
        s(&gt),
        "--ground-truth",
        s(&gt),
        "--fs",
        "500",
        "--report-format",
        "csv",
        "--subject",
        "3",
        "--channel",
        "Fp2",
        "--blink-table",
        s(&blinks),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next(), Some("Subject,Channel,RRMSE (%),CC"));
    assert_eq!(rows.next(), Some("3,Fp2,0,1"));
    let b = std::fs::read_to_string(&blinks).unwrap();
    let mut rows = b.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        rows.next(),
        Some("Subject,Channel,Blinks before,Blinks after,Reduction (%),Time (s)")
    );
    assert_eq!(rows.next(), Some("3,Fp2,6,0,100,n/a"));
}

#[test]
fn bench_sweep_rows_and_jobs_agree() {
    let t = tempfile::tempdir().unwrap();
    let (seq, par) = (t.path().join("seq"), t.path().join("par"));
    let o = run(&["bench", "--sweep-snr", "-1..0", "--out-dir", s(&seq)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("43.87") && text.contains("56.82"), "{text}");
    let o = run(&["bench", "--sweep-snr", "-1..0", "--jobs", "2", "--out-dir", s(&par)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let results = std::fs::read_to_string(seq.join("results.csv")).unwrap();
    let rows: Vec<&str> = results.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // Two methods per SNR value.
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let cols: Vec<&str> = r.split(',').collect();
        assert!(cols[2].parse::<f64>().unwrap().is_finite());
        assert!(cols[3].parse::<f64>().unwrap().is_finite());
    }
    // Timings differ between runs; everything else must not.
    let strip = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect()
    };
    assert_eq!(strip(&seq.join("results.csv")), strip(&par.join("results.csv")));
    for f in ["band_power.csv", "timeseries_snr-1.csv", "timeseries_snr0.csv"] {
        assert_eq!(
            std::fs::read(seq.join(f)).unwrap(),
            std::fs::read(par.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn config_file_env_var_and_flag_precedence() {
    let t = tempfile::tempdir().unwrap();
    let cfg = t.path().join("easr.toml");
    std::fs::write(&cfg, "[simulate]\nseed = 4\n[asr]\ncutoff_k = 9.0\n").unwrap();
    let sim = simulate(t.path(), &[]);
    let input = sim.join("contaminated.csv");
    let out = t.path().join("o.csv");
    let clean = |extra: &[&str], env: bool| {
        let mut c = easr();
        if env {
            c.env("EASR_CONFIG", &cfg);
        }
        c.args(["clean", "--input", s(&input), "--fs", "500", "--out", s(&out)])
            .args(extra);
        let o = c.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        stdout(&o)
    };
    assert!(clean(&[], true).contains(r#""cutoff_k":9.0"#));
    assert!(clean(&["--config", s(&cfg)], false).contains(r#""cutoff_k":9.0"#));
    assert!(clean(&["--k", "30"], true).contains(r#""cutoff_k":30.0"#));
    assert!(clean(&[], false).contains(r#""cutoff_k":17.0"#));
}

#[test]
fn exit_codes_by_error_class() {
    let t = tempfile::tempdir().unwrap();
    let missing = t.path().join("missing.csv");
    let out = t.path().join("o.csv");
    assert_eq!(
        run(&["clean", "--input", s(&missing), "--fs", "500", "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["clean", "--nope"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let bad = t.path().join("bad.csv");
    std::fs::write(&bad, "x\n1.0\nabc\n").unwrap();
    assert_eq!(
        run(&["clean", "--input", s(&bad), "--fs", "500", "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );

    let sim = simulate(t.path(), &[]);
    let input = sim.join("contaminated.csv");
    let o = run(&[
        "clean",
        "--input",
        s(&input),
        "--fs",
        "500",
        "--out",
        s(&out),
        "--k",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(!out.exists());

    let cfg = t.path().join("bad.toml");
    std::fs::write(&cfg, "[asr]\nbogus = 1\n").unwrap();
    let o = run(&["--config", s(&cfg), "simulate", "--out-dir", s(&t.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
}
