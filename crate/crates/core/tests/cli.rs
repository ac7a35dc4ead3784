use std::fs;
use std::process::{Command, Output};

use binsim::interface::export::parse_summary;

fn binsim(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_binsim"));
    cmd.args(args).env_remove("BINSIM_SEED");
    if let Some(seed) = env_seed {
        cmd.env("BINSIM_SEED", seed);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = binsim(
        &[
            "run",
            "--seed",
            "42",
            "--ticks",
            "80",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in ["levels.csv", "ledger.csv", "summary.txt", "manifest.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let levels = fs::read_to_string(out.join("levels.csv")).unwrap();
    assert!(levels.starts_with("tick,bin_id,level,state\n0,0,0,green\n"));
    assert_eq!(levels.lines().count(), 1 + 81 * 25);
    let summary = parse_summary(&fs::read_to_string(out.join("summary.txt")).unwrap());
    assert_eq!(summary["bins"], "25");
    assert_eq!(summary["ticks"], "80");
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(
        binsim(
            &[
                "run",
                "--seed",
                "7",
                "--ticks",
                "150",
                "--out",
                a.to_str().unwrap()
            ],
            None
        )
        .status
        .code(),
        Some(0)
    );
    let manifest = a.join("manifest.txt");
    let o = binsim(
        &[
            "run",
            "--config",
            manifest.to_str().unwrap(),
            "--out",
            b.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for f in ["levels.csv", "ledger.csv", "summary.txt"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.txt");
    fs::write(&config, "seed = 5\nticks = 3\n").unwrap();
    let seed_of = |args: &[&str], env: Option<&str>| {
        let out = dir.path().join("o");
        let mut full = vec![
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        full.extend_from_slice(args);
        assert_eq!(binsim(&full, env).status.code(), Some(0));
        let text = fs::read_to_string(out.join("manifest.txt")).unwrap();
        text.lines()
            .find_map(|l| l.strip_prefix("seed = "))
            .unwrap()
            .to_string()
    };
    assert_eq!(seed_of(&[], None), "5");
    assert_eq!(seed_of(&[], Some("6")), "6");
    assert_eq!(seed_of(&["--seed", "7"], Some("6")), "7");
}

#[test]
fn plan_delayed_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(
        &graph,
        "[vertices]\nD 9 9\nL -4.5 0\nM 0 0\nO 9 0\nDUMP 12 12\n",
    )
    .unwrap();
    let o = binsim(
        &[
            "plan",
            "--graph",
            graph.to_str().unwrap(),
            "--start",
            "M",
            "--bins",
            "D,L,M,O",
            "--dump",
            "DUMP",
            "--capacity",
            "100",
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("pickups: M L O D\n"), "{text}");
    assert!(
        text.contains("stops: M(start) M(pickup) L(pickup) O(pickup) D(pickup) DUMP(dump)\n"),
        "{text}"
    );
    // 0 + 4.5 + 13.5 + 9 + sqrt(18)
    assert!(text.contains("total_distance = 31.242641\n"), "{text}");
}

#[test]
fn usage_errors_exit_one() {
    let o = binsim(&["run", "--config", "/nonexistent/missing.txt"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Configuration keys"));
    assert_eq!(binsim(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(binsim(&["run", "--seed", "x"], None).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "bin_capacity = 25\nyellow_threshold = 30\n").unwrap();
    let o = binsim(&["validate", "--config", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("yellow_threshold"));
}

#[test]
fn validate_ok() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    fs::write(
        &good,
        "# reproduction\ndispatch_threshold = 8\nprice_per_unit = 500\n",
    )
    .unwrap();
    let o = binsim(&["validate", "--config", good.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: 25 bins"));
}

#[test]
fn runtime_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cramped = dir.path().join("cramped.txt");
    fs::write(&cramped, "bin_count = 100\nworld_xmin = 0\nworld_xmax = 1\nworld_ymin = 0\nworld_ymax = 1\ndepot_x = 0\ndepot_y = 0\n").unwrap();
    let out = dir.path().join("o");
    let o = binsim(
        &[
            "run",
            "--config",
            cramped.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let graph = dir.path().join("g.txt");
    fs::write(&graph, "[vertices]\nA 0 0\nB 1 0\nC 5 5\n[edges]\nA B 1\n").unwrap();
    let o = binsim(
        &[
            "plan",
            "--graph",
            graph.to_str().unwrap(),
            "--start",
            "A",
            "--bins",
            "C",
            "--dump",
            "B",
            "--capacity",
            "100",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}
