use crate::Failure;
use clap::Args;
use metrep::baire::LengthFn;
use metrep::machine::RunningTime;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

#[derive(Args, Clone, Debug)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl Output {
    pub fn open(&self) -> Result<Box<dyn Write>, Failure> {
        match &self.out {
            None => Ok(Box::new(io::stdout().lock())),
            Some(p) => File::create(p)
                .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        }
    }

    pub fn csv(&self) -> Result<csv::Writer<Box<dyn Write>>, Failure> {
        Ok(csv::Writer::from_writer(self.open()?))
    }
}

pub fn io_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("output: {e}"))
}

/// A length table as CSV with columns `n,l`, rows n = 0, 1, 2, … in order.
/// Values past the last row repeat it.
pub fn read_l_table(path: &Path) -> Result<LengthFn, Failure> {
    let bad = |m: String| Failure::Config(format!("{}: {m}", path.display()));
    let mut rd = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "n" || &headers[1] != "l" {
        return Err(bad("expected the header n,l".into()));
    }
    let mut values = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let n: usize = rec[0].trim().parse().map_err(|_| bad(format!("row {}: bad n {:?}", k + 1, &rec[0])))?;
        let l: usize = rec[1].trim().parse().map_err(|_| bad(format!("row {}: bad l {:?}", k + 1, &rec[1])))?;
        if n != k {
            return Err(bad(format!("row {}: expected n = {k}, found {n}", k + 1)));
        }
        values.push(l);
    }
    if values.is_empty() {
        return Err(bad("no rows".into()));
    }
    Ok(LengthFn::table(values))
}

pub fn length_or(path: &Option<PathBuf>, default: LengthFn) -> Result<LengthFn, Failure> {
    match path {
        Some(p) => read_l_table(p),
        None => Ok(default),
    }
}

/// Second-order running times by id.
pub fn running_time(id: &str) -> Result<RunningTime, Failure> {
    match id {
        "exp-max" => Ok(RunningTime::exp_max()),
        "length" => Ok(RunningTime::length()),
        _ => Err(Failure::Config(format!("unknown running time {id:?} (known: exp-max, length)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_table_repeats_its_last_row() {
        let dir = std::env::temp_dir().join(format!("metrep-l-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("l.csv");
        std::fs::write(&path, "n,l\n0,3\n1,5\n").unwrap();
        let l = read_l_table(&path).unwrap();
        assert_eq!(l.table_upto(3), vec![3, 5, 5, 5]);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn running_time_ids() {
        assert!(running_time("exp-max").is_ok());
        assert!(running_time("length").is_ok());
        assert!(running_time("poly").is_err());
    }
}
