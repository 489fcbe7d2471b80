use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sandlab::formats::parse_sa_rule;
use sandlab_core::rule::{Range, SaRule};
use sandlab_core::sample;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn sandlab(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandlab")).args(args.iter().map(|a| a.as_ref())).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &std::ffi::OsStr {
    path.as_os_str()
}

#[test]
fn collapse_orbit_renders_to_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.jsonl");
    let out = dir.path().join("t.txt");
    let o = sandlab(&[&"simulate", &"--rule", &p(&data("collapse.sarule")), &"--config", &p(&data("pile2.sandcfg")), &"--steps", &"2", &"--out", &p(&traj)]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(
        fs::read_to_string(&traj).unwrap(),
        "{\"step\":0,\"origin\":0,\"left\":\"0\",\"right\":\"0\",\"core\":[2]}\n\
         {\"step\":1,\"origin\":0,\"left\":\"0\",\"right\":\"0\",\"core\":[1]}\n\
         {\"step\":2,\"origin\":0,\"left\":\"0\",\"right\":\"0\",\"core\":[]}\n"
    );
    let o = sandlab(&[&"render", &"--traj", &p(&traj), &"--format", &"ascii", &"--out", &p(&out)]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(data("collapse_pile2.txt")).unwrap());
    let o = sandlab(&[&"render", &"--traj", &p(&traj), &"--format", &"svg"]);
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<g id=").count(), 3);
}

#[test]
fn distance_of_a_single_flip() {
    let o = sandlab(&[&"distance", &"--metric", &"ground", &p(&data("zero.sandcfg")), &p(&data("flip4.sandcfg"))]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "2^-4\n"));
    let o = sandlab(&[&"distance", &"--metric", &"top", &p(&data("zero.sandcfg")), &p(&data("zero.sandcfg"))]);
    assert_eq!(stdout(&o), "0\n");
    let o = sandlab(&[&"distance", &"--metric", &"ground", &p(&data("zero.sandcfg")), &p(&data("plane.sandcfg"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn encode_prints_the_staircase() {
    let o = sandlab(&[&"encode", &"--config", &p(&data("pile2.sandcfg")), &"--hlo", &"-1", &"--hhi", &"1", &"--vlo", &"-1", &"--vhi", &"3"]);
    assert_eq!(stdout(&o), "000\n010\n010\n111\n111\n");
}

#[test]
fn bridge_of_collapse_is_recognized_and_extracted() {
    let dir = tempfile::tempdir().unwrap();
    let ca = dir.path().join("n.carule");
    let ex = dir.path().join("x.sarule");
    let o = sandlab(&[&"sa2ca", &"--rule", &p(&data("collapse.sarule")), &"--out", &p(&ca)]);
    assert!(o.status.success(), "{o:?}");
    let o = sandlab(&[&"check-sa", &"--ca", &p(&ca), &"--extract", &p(&ex)]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "IS_SA\n"));
    let f = parse_sa_rule(&fs::read_to_string(&ex).unwrap()).unwrap();
    assert_eq!(f.radius(), 4);
    let n = SaRule::collapse(1, 1);
    let mut rng = sample::rng(4);
    for _ in 0..2000 {
        let x = sample::random_line(&mut rng, &sample::LineParams::default());
        assert_eq!(sandlab_core::sa::step(&f, &x), sandlab_core::sa::step(&n, &x));
    }
    assert_eq!(f.apply(&Range::flat(4, 1)), Ok(0));
}

#[test]
fn constant_one_is_not_a_sand_automaton() {
    let o = sandlab(&[&"check-sa", &"--ca", &p(&data("one_2d.carule"))]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "NOT_SA\nwitness column-preservation width 3 height 3 tops 0 0 0\n");
}

#[test]
fn reduction_of_the_zero_automaton_matches_the_golden_file() {
    let o = sandlab(&[&"reduce-ca", &"--ca", &p(&data("zero.carule"))]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), fs::read_to_string(data("reduce_zero.sarule")).unwrap());
    let o = sandlab(&[&"reduce-ca", &"--ca", &p(&data("one_2d.carule"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flatten_and_period_search_verdicts() {
    let o = sandlab(&[&"flatten", &"--rule", &p(&data("collapse.sarule")), &"--config", &p(&data("bounded.sandcfg")), &"--budget", &"1000"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "CONVERGED limit -3 step 12\n"));
    let o = sandlab(&[&"flatten", &"--rule", &p(&data("raise.sarule")), &"--config", &p(&data("zero.sandcfg")), &"--budget", &"10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NOT_CONVERGED steps 10"));
    let o = sandlab(&[&"flatten", &"--rule", &p(&data("collapse.sarule")), &"--config", &p(&data("infinities.sandcfg")), &"--budget", &"10"]);
    assert_eq!(o.status.code(), Some(2));

    let o = sandlab(&[&"period-search", &"--rule", &p(&data("identity.sarule")), &"--max-sum", &"3"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "PERIODIC n 0 p 1 drift 0\n"));
    let o = sandlab(&[&"period-search", &"--rule", &p(&data("raise.sarule")), &"--max-sum", &"3"]);
    assert_eq!(stdout(&o), "PERIODIC n 0 p 1 drift 1\n");
    let o = sandlab(&[&"period-search", &"--rule", &p(&data("collapse.sarule")), &"--max-sum", &"2"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("REFUTED\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("refuted")).count(), 3);
}

#[test]
fn usage_and_parse_errors_exit_with_2() {
    let o = sandlab(&[&"simulate", &"--rule", &p(&data("collapse.sarule"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = sandlab(&[&"frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sarule");
    fs::write(&bad, "sarule v1\ndim 1\nradius 1\ncase R[2] < 0 => -1\ndefault => 0\n").unwrap();
    let o = sandlab(&[&"simulate", &"--rule", &p(&bad), &"--config", &p(&data("zero.sandcfg")), &"--steps", &"1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.sarule:4:6: offset out of range for radius 1"), "{err}");
    let o = sandlab(&[&"simulate", &"--rule", &p(&data("collapse_2d.sarule")), &"--config", &p(&data("plane.sandcfg")), &"--steps", &"1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sandlab(&[&"--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn budget_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_sandlab"))
        .args(["sa2ca", "--rule"])
        .arg(data("collapse.sarule"))
        .env("SANDLAB_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("budget is 1000"));
    let o = Command::new(env!("CARGO_BIN_EXE_sandlab"))
        .args(["sa2ca", "--rule"])
        .arg(data("collapse.sarule"))
        .env("SANDLAB_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let runs: Vec<Output> = (0..2)
        .map(|_| sandlab(&[&"period-search", &"--rule", &p(&data("topple.sarule")), &"--max-sum", &"2", &"--samples", &"500", &"--seed", &"7"]))
        .collect();
    assert_eq!(runs[0].stdout, runs[1].stdout);
    assert_eq!(runs[0].status.code(), runs[1].status.code());
    let sims: Vec<Output> = (0..2)
        .map(|_| sandlab(&[&"simulate", &"--rule", &p(&data("topple.sarule")), &"--config", &p(&data("ramp.sandcfg")), &"--steps", &"20"]))
        .collect();
    assert!(sims[0].status.success());
    assert_eq!(sims[0].stdout, sims[1].stdout);
}
