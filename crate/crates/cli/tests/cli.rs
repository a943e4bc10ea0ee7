use metrep::baire::Name;
use metrep::banach::{dsq_value, lp_value};
use metrep::num::{abs_q, pow2, Q};
use num_bigint::{BigInt, BigUint};
use std::path::Path;
use std::process::{Command, Output};

fn metrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrep")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = metrep(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_reader(csv_text.as_bytes());
    let head = rd.headers().unwrap().iter().map(String::from).collect();
    let body = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (head, body)
}

fn col(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn identity_table(dir: &Path) -> String {
    let path = dir.join("l.csv");
    let mut s = String::from("n,l\n");
    for n in 0..=16 {
        s.push_str(&format!("{n},{n}\n"));
    }
    std::fs::write(&path, s).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn entropy_rows_stay_within_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let table = identity_table(dir.path());
    let text = ok(&["entropy", "--space", "unit", "--rep", "cauchy", "--l-table", &table, "--n-max", "6"]);
    let (head, body) = rows(&text);
    assert_eq!(body.len(), 7);
    let (classes, bound, within) = (col(&head, "classes"), col(&head, "bound_exp"), col(&head, "within"));
    let (t, l_ref, cover) = (col(&head, "T"), col(&head, "l_ref"), col(&head, "cover"));
    for (n, r) in body.iter().enumerate() {
        assert_eq!(r[within], "true");
        let k: u64 = r[classes].parse().unwrap();
        let e: u64 = r[bound].parse().unwrap();
        let tv: u64 = r[t].parse().unwrap();
        assert_eq!(e, 2 * (tv * (tv + 1) + 1));
        assert!(e >= 64 || k <= 1 << e);
        assert_eq!(r[l_ref], n.to_string());
        // class representatives form a 2^{-n}-cover
        assert!(r[cover].parse::<u64>().unwrap() <= k);
    }
}

#[test]
fn fixed_seed_gives_identical_bytes() {
    for cmd in ["entropy", "dialog-cover"] {
        let a = metrep(&[cmd, "--seed", "7", "--samples", "60", "--n-max", "4"]);
        let b = metrep(&[cmd, "--seed", "7", "--samples", "60", "--n-max", "4"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        let c = metrep(&[cmd, "--seed", "8", "--samples", "60", "--n-max", "4"]);
        assert_ne!(a.stdout, c.stdout, "{cmd}");
    }
}

#[test]
fn out_flag_writes_the_same_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let p = path.to_str().unwrap();
    let printed = ok(&["bounds", "--table", "lorentz", "--n-max", "5"]);
    assert!(ok(&["bounds", "--table", "lorentz", "--n-max", "5", "--out", p]).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn empty_sample_gives_the_header_alone() {
    for cmd in ["entropy", "dialog-cover"] {
        let text = ok(&[cmd, "--samples", "0"]);
        assert_eq!(text.lines().count(), 1, "{cmd}");
        assert!(text.starts_with("n,seed,samples,"));
    }
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        &["entropy", "--space", "sphere"][..],
        &["entropy", "--rep", "xi"],
        &["entropy", "--bogus"],
        &["translate", "--from", "dsq", "--to", "lp", "--function", "poly:0:0,1:1"],
        &["translate", "--from", "xi-fs", "--to", "dsq", "--function", "poly:0:0,1/3:1,1:0"],
        &["translate", "--from", "lp", "--to", "xi-haar", "--function", "step:0,1:1"],
        &["eval", "--function", "cubic"],
        &["entropy", "--l-table", "/nonexistent/l.csv"],
    ] {
        let out = metrep(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_length_tables_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for (k, body) in ["n,l\n0,1\n2,3\n", "x,y\n0,1\n", "n,l\n", "n,l\n0,-1\n"].iter().enumerate() {
        let path = dir.path().join(format!("bad{k}.csv"));
        std::fs::write(&path, body).unwrap();
        let out = metrep(&["entropy", "--l-table", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body:?}");
    }
}

fn dsq_values(trace: &str, depth: u64, f: impl Fn(&Q) -> Q) {
    let psi = Name::from_trace(trace).unwrap();
    for n in 0..=depth {
        for m in 0..=depth {
            for r in 0..=(1u64 << m) {
                let x = Q::new(BigInt::from(r), BigInt::from(1u64 << m));
                let v = dsq_value(&psi, n, &BigUint::from(r), m).unwrap();
                assert!(abs_q(&(v - f(&x))) <= pow2(1 - n as i64), "n = {n}, x = {x}");
            }
        }
    }
}

#[test]
fn xi_to_delta_square_matches_the_direct_generator() {
    let f = "poly:0:0,1:1";
    let translated = ok(&["translate", "--from", "xi-fs", "--to", "dsq", "--function", f, "--depth", "6"]);
    let direct = ok(&["translate", "--from", "dsq", "--to", "dsq", "--function", f, "--depth", "6"]);
    assert_eq!(translated.lines().count(), direct.lines().count());
    dsq_values(&translated, 6, |x| x.clone());
    dsq_values(&direct, 6, |x| x.clone());
}

#[test]
fn delta_square_round_trip() {
    let f = "poly:0:1/2,3/8:-1,1:3/4";
    let g = |x: &Q| {
        let (a, b) = (Q::new(3.into(), 8.into()), Q::new(1.into(), 2.into()));
        if *x <= a {
            &b + (Q::from_integer((-1).into()) - &b) * x / &a
        } else {
            Q::from_integer((-1).into()) + (Q::new(3.into(), 4.into()) + Q::from_integer(1.into())) * (x - &a) / (Q::from_integer(1.into()) - &a)
        }
    };
    let text = ok(&["translate", "--from", "dsq", "--via", "xi-fs", "--to", "dsq", "--function", f, "--depth", "4"]);
    dsq_values(&text, 4, g);
}

#[test]
fn lp_round_trip() {
    let f = "step:0,1/4,1:3,-1";
    let text = ok(&["translate", "--from", "lp", "--via", "xi-haar", "--to", "lp", "--p", "2", "--function", f, "--depth", "3"]);
    let psi = Name::from_trace(&text).unwrap();
    let integral = |a: &Q, b: &Q| {
        let c = Q::new(1.into(), 4.into());
        let lo = |x: &Q| if *x < c { x.clone() } else { c.clone() };
        let hi = |x: &Q| if *x > c { x - &c } else { Q::from_integer(0.into()) };
        (lo(b) - lo(a)) * Q::from_integer(3.into()) - (hi(b) - hi(a))
    };
    for n in 0..=3u64 {
        for m in 0..=3u64 {
            for k in 0..=(1u64 << m) {
                for l in k..=(1u64 << m) {
                    let den = BigInt::from(1u64 << m);
                    let want = integral(&Q::new(k.into(), den.clone()), &Q::new(l.into(), den));
                    let v = lp_value(&psi, &k.into(), &l.into(), m, n).unwrap();
                    assert!(abs_q(&(v - want)) <= pow2(1 - n as i64));
                }
            }
        }
    }
}

#[test]
fn traces_reproduce_and_truncation_lists_missing_queries() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src.trace");
    let s = src.to_str().unwrap();
    let first = ok(&["translate", "--from", "xi-fs", "--to", "dsq", "--function", "poly:0:0,1/2:1,1:0", "--depth", "3", "--source-trace", s]);
    let again = ok(&["translate", "--from", "xi-fs", "--to", "dsq", "--input", s, "--depth", "3"]);
    assert_eq!(first, again);

    let full = std::fs::read_to_string(&src).unwrap();
    let kept: Vec<&str> = full.lines().take(full.lines().count() / 2).collect();
    let cut = dir.path().join("cut.trace");
    std::fs::write(&cut, kept.join("\n")).unwrap();
    let out = metrep(&["translate", "--from", "xi-fs", "--to", "dsq", "--input", cut.to_str().unwrap(), "--depth", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("missing queries"), "{err}");
    // every listed query is one the full trace answers
    let listed: Vec<&str> = err.split('"').skip(1).step_by(2).collect();
    assert!(!listed.is_empty());
    for q in listed {
        assert!(full.lines().any(|l| l.split('\t').next() == Some(q)), "{q}");
        assert!(!kept.iter().any(|l| l.split('\t').next() == Some(q)), "{q}");
    }
}

#[test]
fn meter_report_goes_to_stderr() {
    let out = metrep(&["translate", "--from", "xi-fs", "--to", "dsq", "--function", "poly:0:0,1:1", "--depth", "1"]);
    let err = String::from_utf8(out.stderr).unwrap();
    let mut lines = err.lines();
    assert_eq!(lines.next(), Some("targets\tsteps_total\tsteps_max\tsource_queries"));
    let vals: Vec<u64> = lines.next().unwrap().split('\t').map(|v| v.parse().unwrap()).collect();
    // <0^n, r, 10^m> for n, m <= 1 and r <= 2^m
    assert_eq!(vals[0], 2 * (2 + 3));
    assert!(vals[2] <= vals[1] && vals[1] > 0);
}

#[test]
fn dialog_bound_table() {
    let (head, body) = rows(&ok(&["bounds", "--table", "dialog", "--n-max", "10"]));
    assert_eq!(head, ["T", "bound"]);
    assert_eq!(body.len(), 11);
    for (t, r) in body.iter().enumerate() {
        // a T-step dialog has at most T answers of total length at most T
        let t = t as u64;
        assert_eq!(r[1].parse::<u64>().unwrap(), 2 * t * t + 2 * t + 2);
    }
}

#[test]
fn lorentz_table_for_geometric_widths() {
    let (_, body) = rows(&ok(&["bounds", "--table", "lorentz", "--n-max", "8"]));
    for (n, r) in body.iter().enumerate() {
        let lower: f64 = r[1].parse().unwrap();
        let upper: f64 = r[2].parse().unwrap();
        // N_i = i for δ_k = 2^{-k}: lower = ln 2 · Σ_{i ≤ n-1} i
        let want = std::f64::consts::LN_2 * (1..n.max(1)).sum::<usize>() as f64;
        assert!((lower - want).abs() < 1e-6, "n = {n}");
        assert!(upper >= lower);
    }
}

#[test]
fn fs_error_table_for_the_parabola() {
    let (head, body) = rows(&ok(&["eval", "--table", "fs", "--n-max", "6"]));
    assert_eq!(head, ["level", "terms", "grid", "max_error", "max_error_f64"]);
    for (k, r) in body.iter().enumerate() {
        // interpolating x(1-x) at spacing h misses by h²/4 at the midpoints
        assert_eq!(r[1], ((1u64 << k) + 1).to_string());
        assert_eq!(r[3], format!("1/{}", 1u64 << (2 * k + 2)));
    }
}

#[test]
fn haar_integral_table() {
    let (_, body) = rows(&ok(&["eval", "--table", "haar", "--n-max", "12", "--p", "1"]));
    assert_eq!(body.len(), 13);
    assert_eq!(body[0][4..], ["1/2", "1/2", "1", "1"]);
    for r in &body[1..] {
        // the L1-normalised f_i has height 2^{k-1} on halves of width 2^{-k}
        assert_eq!(r[4..], ["1/2", "-1/2", "0", "1"]);
    }
    let (_, body) = rows(&ok(&["eval", "--table", "haar", "--n-max", "12", "--p", "2"]));
    let expect = |i: usize| -> String {
        let k = usize::BITS - i.leading_zeros();
        // 2^{(k-1)/2 - k}
        if (k - 1) % 2 == 0 {
            format!("1/{}", 1u64 << (k - (k - 1) / 2))
        } else {
            format!("1/{}*2^(1/2)", 1u64 << (k - (k - 2) / 2))
        }
    };
    for (i, r) in body.iter().enumerate().skip(1) {
        assert_eq!(r[4], expect(i), "i = {i}");
        assert_eq!(r[6], "0");
        assert_eq!(r[7], "1");
    }
    // supports tile [0,1] level by level
    assert_eq!(body[5][2..4], ["1/4", "1/2"]);
    assert_eq!(body[12][2..4], ["1/2", "5/8"]);
}

#[test]
fn help_documents_every_column() {
    let cases: [(&[&str], &str); 6] = [
        (&["entropy", "--samples", "3", "--n-max", "0"], "entropy"),
        (&["dialog-cover", "--samples", "3", "--n-max", "0"], "dialog-cover"),
        (&["eval", "--table", "fs", "--n-max", "0"], "eval"),
        (&["eval", "--table", "haar", "--n-max", "0"], "eval"),
        (&["bounds", "--table", "dialog", "--n-max", "0"], "bounds"),
        (&["bounds", "--table", "lorentz", "--n-max", "0"], "bounds"),
    ];
    for (args, cmd) in cases {
        let help = ok(&[cmd, "--help"]);
        let (head, _) = rows(&ok(args));
        for h in head {
            let documented = help.lines().any(|l| l.trim_start().split([' ', ',']).next() == Some(h.as_str()));
            assert!(documented, "{cmd}: column {h} missing from --help");
        }
    }
    let help = ok(&["translate", "--help"]);
    for rep in ["xi-fs", "dsq", "xi-haar", "lp"] {
        assert!(help.contains(rep));
    }
}
