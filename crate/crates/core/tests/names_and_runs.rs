use metrep::baire::{is_length_monotone, length_of, pad, unpad, LengthFn, Name};
use metrep::entropy::{covering_number, max_packing, unit_grid, unit_interval_size, CoverMode, PointCloud};
use metrep::machine::{dialog_length_bound, metered_run, FnProgram, MeterReport, RunningTime};
use metrep::num::{q, Q};
use metrep::reprs::{cauchy_name_of, UnitInterval};
use metrep::strings::BinStr;
use std::sync::Arc;

#[test]
fn traces_replay_and_reject_misses() {
    let phi = cauchy_name_of(Arc::new(UnitInterval), q(2, 7));
    let queries: Vec<BinStr> = BinStr::all_up_to(4).collect();
    let text = phi.to_trace(&queries).unwrap();
    let replay = Name::from_trace(&text).unwrap();
    for a in &queries {
        assert_eq!(replay.query(a).unwrap(), phi.query(a).unwrap());
    }
    assert!(replay.query(&BinStr::lit("000000")).is_err());
}

#[test]
fn padding_makes_names_length_monotone() {
    let phi = Name::new("drops", |a| if a.is_empty() { BinStr::lit("11") } else { BinStr::new() });
    assert!(!is_length_monotone(&phi, 3).unwrap());
    let padded = pad(&phi, &LengthFn::constant(2));
    assert!(is_length_monotone(&padded, 5).unwrap());
    assert_eq!(length_of(&padded, 3).unwrap(), 4);
    let back = unpad(&padded);
    for a in BinStr::all_up_to(5) {
        assert_eq!(back.query(&a).unwrap(), phi.query(&a).unwrap());
    }
}

#[test]
fn metered_echo_and_report_text() {
    let echo = FnProgram::new("echo", |port| {
        let a = port.query(&BinStr::new())?;
        port.write(&a)
    });
    let phi = Name::constant(BinStr::lit("1"));
    let t = RunningTime::new("l(n)+4", |l, n| l.eval(n) as u64 + 4);
    let run = metered_run(&echo, &phi, &BinStr::new(), &t, &LengthFn::constant(1)).unwrap();
    assert_eq!(run.output, BinStr::lit("1"));
    assert!(run.report.steps_used <= run.report.budget);
    assert!(run.dialog.encode().len() as u64 <= dialog_length_bound(run.report.budget));
    let again = MeterReport::from_text(&run.report.to_text()).unwrap();
    assert_eq!(again, run.report);
}

#[test]
fn unit_interval_entropy_table() {
    let sizes: Vec<u32> = (0..8).map(unit_interval_size).collect();
    assert_eq!(sizes, vec![0, 0, 1, 2, 3, 4, 5, 6]);
    let grid: Vec<Q> = unit_grid(3);
    let cloud = PointCloud::line(&grid[..9]);
    let cover = covering_number(&cloud, 2, CoverMode::Exact).unwrap();
    assert!(cover.count >= max_packing(&cloud, 2).unwrap());
}
