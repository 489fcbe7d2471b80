//! One line per acceptance criterion; exits non-zero if any fails.

use std::fs;
use std::panic;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::Rng;
use sandlab::dsl::{parse_rule, print_rule};
use sandlab::formats::{parse_ca, parse_config, parse_sa_table, serialize_config};
use sandlab::traj::parse_jsonl;
use sandlab_core::bridge::{build_ca_from_sa, check_conjugacy, decide_sa, flat_window, Verdict};
use sandlab_core::ca::{CaBacking, CaRule, NativeCa};
use sandlab_core::config::Configuration;
use sandlab_core::height::{Finite, NegInf, PosInf};
use sandlab_core::metric::{dist_ground, ground_cylinder, staircase_count, top_cylinder, Distance};
use sandlab_core::nil::*;
use sandlab_core::rule::SaRule;
use sandlab_core::sa::{iterate_local_rule, oracle_step_window, step, step_n};
use sandlab_core::{sample, Height, DEFAULT_BUDGET, TABLE_BUDGET};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fig() -> Configuration {
    Configuration::from_ints(0, -3, &[5, -2, 1, 4, 2, 2, 5])
}

fn ac1() -> Result<String, String> {
    let x = fig();
    let top = top_cylinder(&x, &[0], 3).map_err(|e| e.to_string())?;
    let ground = ground_cylinder(&x, &[0], 3).map_err(|e| e.to_string())?;
    let want_top = [Finite(1), NegInf, Finite(-3), Finite(4), Finite(-2), Finite(-2), Finite(1)];
    let want_ground = [PosInf, Finite(-2), Finite(1), PosInf, Finite(2), Finite(2), PosInf];
    ensure(top.0.as_slice() == want_top, || format!("top cylinder {:?}", top.0.as_slice()))?;
    ensure(ground.0.as_slice() == want_ground, || format!("ground cylinder {:?}", ground.0.as_slice()))?;
    Ok("both cylinders exact".into())
}

fn ac2() -> Result<String, String> {
    let zero = Configuration::constant(0);
    for n in 0..=12i64 {
        for site in [n, -n] {
            for v in [1, -1] {
                let y = Configuration::from_ints(0, site, &[v]);
                let d = dist_ground(&y, &zero).map_err(|e| e.to_string())?;
                ensure(d == Distance::Pow(n as u64), || format!("site {site}, value {v}: {d}"))?;
            }
        }
    }
    Ok("2^-n for n in 0..=12, both sides, both signs".into())
}

fn ac3() -> Result<String, String> {
    let mut rng = sample::rng(3);
    let mut rules = vec![SaRule::collapse(1, 1), SaRule::collapse(2, 1), SaRule::raise(1), SaRule::identity(1)];
    rules.extend((0..20).map(|_| sample::random_table_rule(&mut rng, 1, 1)));
    for (k, f) in rules.iter().enumerate() {
        let rep = check_conjugacy(f, 200, 3, k as u64).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("{f}: {:?}", rep.mismatch))?;
    }
    Ok(format!("{} rules x 200 configurations, n <= 3", rules.len()))
}

fn ac4() -> Result<String, String> {
    let n = SaRule::collapse(1, 1);
    let g = build_ca_from_sa(&n).map_err(|e| e.to_string())?;
    ensure(staircase_count(5, 6) == Some(16807), || "invariance window count".into())?;
    ensure(staircase_count(4, 5) == Some(1296), || "column window count".into())?;
    let rep = decide_sa(&g, false, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::IsSa, || format!("bridge of collapse: {:?}", rep.witness))?;

    let one = CaRule::native(2, 1, 2, NativeCa::Constant(1)).unwrap();
    let rep = decide_sa(&one, false, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let w = rep.witness.clone().ok_or("constant 1 accepted")?;
    ensure(rep.verdict == Verdict::NotSa && w.replay(&one) == Ok(true), || "constant 1 witness".into())?;

    let table = g.to_table(TABLE_BUDGET).map_err(|e| e.to_string())?;
    let CaBacking::Table(t) = table.backing() else { return Err("not a table".into()) };
    let mut t = t.as_ref().clone();
    let idx = flat_window(5, 1).iter().rev().fold(0usize, |a, &c| a * 2 + c as usize);
    ensure(t[idx] == 1, || "flat window should keep its centre".into())?;
    t[idx] = 0;
    let bad = CaRule::table(2, 2, 2, t).unwrap();
    let rep = decide_sa(&bad, false, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let w = rep.witness.clone().ok_or("corrupted table accepted")?;
    ensure(rep.verdict == Verdict::NotSa && w.replay(&bad) == Ok(true), || "corrupted witness".into())?;
    ensure(w.replay(&g) == Ok(false), || "witness also fails the intact bridge".into())?;
    Ok("IS_SA after 16807 + 2592 windows; constant 1 and corrupted table NOT_SA with replaying witnesses".into())
}

fn ac5() -> Result<String, String> {
    let n = make_collapse(1, 1);
    let mut rng = sample::rng(5);
    let mut worst = 0f64;
    for _ in 0..100 {
        let x = sample::random_bounded_line(&mut rng, 16, -8, 8);
        let (min, max) = x.finite_range().unwrap();
        let width = x.as_line().map_or(0, |l| l.core().len()) as u64;
        let bound = 10 * width.max(1) * (max - min + 1) as u64;
        match detect_flatten(&n, &x, bound).map_err(|e| e.to_string())? {
            FlattenReport::Converged { limit, step } if limit == min && step <= bound => {
                worst = worst.max(step as f64 / bound as f64);
            }
            other => return Err(format!("{x:?}: {other:?}")),
        }
    }
    Ok(format!("100/100 converged to the minimum, worst N/bound = {worst:.3}"))
}

fn ac6() -> Result<String, String> {
    let e = |e: sandlab_core::Error| e.to_string();
    let zero = SpreadingCa::new(CaRule::native(1, 1, 2, NativeCa::Constant(0)).unwrap()).map_err(e)?;
    let f = build_reduction(&zero);
    let mut rng = sample::rng(6);
    let mut flattened = 0;
    for _ in 0..50 {
        let len = rng.gen_range(0..10);
        let y = CaConfig::finite(rng.gen_range(-5..5), (0..len).map(|_| rng.gen_range(0..2)).collect());
        let x = xi_encode(&y, rng.gen_range(-3..=3)).map_err(e)?;
        let rep = detect_flatten(&f, &x, 10_000).map_err(e)?;
        ensure(matches!(rep, FlattenReport::Converged { .. }), || format!("encoded {y:?}: {rep:?}"))?;
        flattened += 1;
    }
    for seed in 0..50 {
        let sc = invalid_repair_scenario(&zero, seed).map_err(e)?;
        let rep = detect_flatten(&f, &sc.config, 10_000).map_err(e)?;
        ensure(matches!(rep, FlattenReport::Converged { .. }), || format!("invalid {:?}: {rep:?}", sc.config))?;
        flattened += 1;
    }

    let min = SpreadingCa::new(CaRule::native(1, 1, 2, NativeCa::Min).unwrap()).map_err(e)?;
    let fm = build_reduction(&min);
    let ones = xi_encode(&CaConfig::periodic(vec![1]).map_err(e)?, 0).map_err(e)?;
    let mut x = ones.clone();
    for t in 0..1000 {
        x = step(&fm, &x).map_err(e)?;
        ensure(x == ones, || format!("xi(all 1) moved at step {t}"))?;
    }

    let rules = [zero, min, SpreadingCa::new(CaRule::native(1, 1, 3, NativeCa::Min).unwrap()).map_err(e)?];
    for k in 0..100 {
        let s = &rules[k % 3];
        let f = build_reduction(s);
        let states = s.states();
        let mut y = if k % 5 == 0 {
            CaConfig::periodic((0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..states)).collect()).map_err(e)?
        } else {
            CaConfig::finite(rng.gen_range(-4..4), (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..states)).collect())
        };
        let c = rng.gen_range(-4..=4);
        let mut x = xi_encode(&y, c).map_err(e)?;
        for t in 0..5 {
            y = y.step(s.rule()).map_err(e)?;
            x = step(&f, &x).map_err(e)?;
            ensure(x == xi_encode(&y, c).map_err(e)?, || format!("commutation broke at step {t} for {y:?}"))?;
        }
    }
    Ok(format!("{flattened}/100 flattened; xi(all 1) fixed for 1000 steps; commutation on 100 y x 5 steps"))
}

fn ac7() -> Result<String, String> {
    let e = |e: sandlab_core::Error| e.to_string();
    let mut rng = sample::rng(7);
    let rule = |t: u64, rng: &mut sample::SampleRng| match t % 5 {
        0 => SaRule::collapse(1, 1),
        1 => SaRule::collapse(2, 1),
        2 => SaRule::raise(1),
        3 => sample::random_table_rule(rng, 1, 2),
        _ => sample::random_table_rule(rng, 1, 1),
    };
    for t in 0..500u64 {
        let f = rule(t, &mut rng);
        let r = f.radius() as i64;
        let x = sample::random_line(&mut rng, &sample::LineParams::default());
        let n = (t % 4) as u32;
        let l = x.as_line().unwrap();
        let (lo, hi) = (l.origin() - n as i64 * r - 3, l.end() + n as i64 * r + 3);
        let out = oracle_step_window(&f, &x.window(&[lo], &[hi]).map_err(e)?, n).map_err(e)?;
        let m = n as i64 * r;
        let fx = step_n(&f, &x, n as u64).map_err(e)?;
        ensure(out == fx.window(&[lo + m], &[hi - m]).map_err(e)?, || format!("oracle: {f}, {x:?}, n = {n}"))?;
    }
    for t in 0..200u64 {
        let f = rule(t, &mut rng);
        let f2 = iterate_local_rule(&f, 2, TABLE_BUDGET).map_err(e)?;
        let x = sample::random_line(&mut rng, &sample::LineParams::default());
        ensure(step(&f2, &x).map_err(e)? == step_n(&f, &x, 2).map_err(e)?, || format!("iterate: {f}, {x:?}"))?;
    }
    Ok("500 oracle triples, 200 iterate(2) samples".into())
}

fn ac8() -> Result<String, String> {
    let e = |e: sandlab_core::Error| e.to_string();
    let id = find_ultimate_period(&SaRule::identity(1), 3, 1000, 8).map_err(e)?;
    ensure(id == PeriodReport::Periodic { n: 0, p: 1, drift: 0 }, || format!("identity: {id:?}"))?;
    let raise = find_ultimate_period(&SaRule::raise(1), 3, 1000, 8).map_err(e)?;
    ensure(raise == PeriodReport::Periodic { n: 0, p: 1, drift: 1 }, || format!("raise: {raise:?}"))?;
    let n = make_collapse(1, 1);
    let PeriodReport::Refuted(rs) = find_ultimate_period(&n, 3, 10_000, 8).map_err(e)? else {
        return Err("collapse not refuted".into());
    };
    let mut pairs: Vec<(u32, u32)> = rs.iter().map(|r| (r.n, r.p)).collect();
    pairs.sort();
    ensure(pairs == [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (2, 1)], || format!("pairs {pairs:?}"))?;
    for r in &rs {
        ensure(r.replay(&n) == Ok(true), || format!("witness for ({}, {}) does not replay", r.n, r.p))?;
    }
    Ok("identity (0,1,0), raise (0,1,1), collapse refuted on all 6 pairs".into())
}

fn ac9() -> Result<String, String> {
    let e = |e: sandlab_core::Error| e.to_string();
    let mut rng = sample::rng(9);
    let mut rules = vec![SaRule::collapse(1, 1), SaRule::collapse(2, 1), SaRule::raise(1), SaRule::identity(1)];
    rules.extend((0..4).map(|_| sample::random_table_rule(&mut rng, 1, 1)));
    for f in &rules {
        for k in 0..=8i64 {
            let side = |rng: &mut sample::SampleRng| -> Vec<Height> {
                (0..4).map(|_| sample::random_height(rng, -5, 5, 0.1)).collect()
            };
            let mut cx = side(&mut rng);
            let mut cy = side(&mut rng);
            cx.extend(std::iter::repeat_n(PosInf, 2 * k as usize + 1));
            cy.extend(std::iter::repeat_n(PosInf, 2 * k as usize + 1));
            cx.extend(side(&mut rng));
            cy.extend(side(&mut rng));
            let mut x = Configuration::finite(0, -k - 4, cx);
            let mut y = Configuration::finite(1, -k - 4, cy);
            for n in 0..=100 {
                let d = dist_ground(&x, &y).map_err(e)?;
                ensure(d < Distance::Pow(k as u64), || format!("{f}, k = {k}, n = {n}: {d}"))?;
                x = step(f, &x).map_err(e)?;
                y = step(f, &y).map_err(e)?;
            }
        }
    }
    Ok(format!("{} rules, k <= 8, n <= 100", rules.len()))
}

fn ac10() -> Result<String, String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let mut paths: Vec<_> = fs::read_dir(&dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    paths.sort();
    let (mut rules, mut cfgs) = (0, 0);
    let mut corpus = Vec::new();
    for p in &paths {
        let text = fs::read_to_string(p).map_err(|e| e.to_string())?;
        match p.extension().and_then(|e| e.to_str()) {
            Some("sarule") => {
                let printed = print_rule(&parse_rule(&text).map_err(|e| format!("{}:{e}", p.display()))?);
                ensure(printed == text, || format!("{} does not round-trip", p.display()))?;
                rules += 1;
            }
            Some("sandcfg") => {
                let printed = serialize_config(&parse_config(&text).map_err(|e| format!("{}:{e}", p.display()))?);
                ensure(printed == text, || format!("{} does not round-trip", p.display()))?;
                cfgs += 1;
            }
            _ => {}
        }
        corpus.push(text);
    }
    ensure(rules >= 10 && cfgs >= 10, || format!("only {rules} rules and {cfgs} configs"))?;

    let mut rng = sample::rng(10);
    let mut rejected = 0u32;
    for i in 0..100_000u32 {
        let text = if i % 2 == 0 {
            let len = rng.gen_range(0..200);
            let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        } else {
            let mut b = corpus[rng.gen_range(0..corpus.len())].as_bytes().to_vec();
            b.truncate(4096);
            for _ in 0..rng.gen_range(1..4) {
                let at = rng.gen_range(0..=b.len());
                b.insert(at, rng.gen_range(b' '..=b'~'));
            }
            String::from_utf8_lossy(&b).into_owned()
        };
        let outcome = panic::catch_unwind(|| {
            [
                parse_rule(&text).is_err(),
                parse_config(&text).is_err(),
                parse_sa_table(&text).is_err(),
                parse_ca(&text).is_err(),
                parse_jsonl(&text).is_err(),
            ]
        })
        .map_err(|_| format!("parser panicked on {text:?}"))?;
        rejected += outcome.iter().filter(|&&b| b).count() as u32;
    }

    let bad = "sarule v1\ndim 1\nradius 1\ncase R[2] < 0 => -1\ndefault => 0\n";
    for _ in 0..3 {
        let err = parse_rule(bad).unwrap_err();
        ensure((err.line, err.col) == (4, 6), || format!("unstable position {err}"))?;
    }
    Ok(format!("{rules} rules + {cfgs} configs byte-identical; 100000 fuzz inputs, {rejected} rejections, no panics"))
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, &str, Duration, Check); 10] = [
        ("AC1", "figure cylinders", Duration::from_millis(1), ac1),
        ("AC2", "perfectness distances", Duration::from_millis(10), ac2),
        ("AC3", "conjugacy with the bridge", Duration::from_secs(10), ac3),
        ("AC4", "decider", Duration::from_secs(30), ac4),
        ("AC5", "collapse nilpotency", Duration::from_secs(5), ac5),
        ("AC6", "reduction fidelity", Duration::from_secs(60), ac6),
        ("AC7", "oracle equivalence", Duration::from_secs(30), ac7),
        ("AC8", "period search", Duration::from_secs(60), ac8),
        ("AC9", "no positive expansivity", Duration::from_secs(10), ac9),
        ("AC10", "parser and formats", Duration::from_secs(30), ac10),
    ];
    let mut failed = 0;
    for (id, title, limit, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let result = result.and_then(|d| {
            if took <= limit {
                Ok(d)
            } else {
                Err(format!("{d}, but took longer than the limit"))
            }
        });
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id:<4} {title}: {detail} ({:.3} ms, limit {} ms)", took.as_secs_f64() * 1e3, limit.as_millis());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
