//! CSV formats: schedules (`k,delta` or `k,omega`) and coefficient files (`k,a,b`).
//!
//! Values are written with 17 significant digits so a round trip is exact.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Schedule, ScheduleKind};
use crate::error::{Error, Result};

pub(crate) fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {line}: bad number '{field}': {e}")))
}

fn check_index(field: &str, expect: usize, line: usize) -> Result<()> {
    let k: usize = field
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("line {line}: bad index '{field}': {e}")))?;
    if k != expect {
        return Err(Error::Parse(format!("line {line}: expected k = {expect}, found {k}")));
    }
    Ok(())
}

pub fn write_schedule<W: Write>(out: W, s: &Schedule) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", s.kind.column()])?;
    for (k, v) in s.values.iter().enumerate() {
        w.write_record([k.to_string(), fmt_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_schedule<R: Read>(input: R) -> Result<Schedule> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let kind = match (headers.get(0), headers.get(1), headers.len()) {
        (Some("k"), Some("delta"), 2) => ScheduleKind::Accuracy,
        (Some("k"), Some("omega"), 2) => ScheduleKind::Work,
        _ => {
            return Err(Error::Parse(format!(
                "schedule header must be 'k,delta' or 'k,omega', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )))
        }
    };
    let mut values = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        check_index(&rec[0], i, i + 2)?;
        values.push(parse_f64(&rec[1], i + 2)?);
    }
    Ok(Schedule { values, kind })
}

pub fn write_schedule_file(path: impl AsRef<Path>, s: &Schedule) -> Result<()> {
    write_schedule(File::create(path)?, s)
}

pub fn read_schedule_file(path: impl AsRef<Path>) -> Result<Schedule> {
    read_schedule(File::open(path)?)
}

pub fn write_coefficients<W: Write>(out: W, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput("a and b lengths differ".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "a", "b"])?;
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        w.write_record([k.to_string(), fmt_f64(*x), fmt_f64(*y)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coefficients<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["k", "a", "b"] {
        return Err(Error::Parse("coefficient header must be 'k,a,b'".into()));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        check_index(&rec[0], i, i + 2)?;
        a.push(parse_f64(&rec[1], i + 2)?);
        b.push(parse_f64(&rec[2], i + 2)?);
    }
    Ok((a, b))
}

pub fn write_coefficients_file(path: impl AsRef<Path>, a: &[f64], b: &[f64]) -> Result<()> {
    write_coefficients(File::create(path)?, a, b)
}

pub fn read_coefficients_file(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<f64>)> {
    read_coefficients(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn schedule_round_trip(values in prop::collection::vec(1e-300f64..1e300, 0..50), work in any::<bool>()) {
            let s = if work { Schedule::work(values) } else { Schedule::accuracy(values) };
            let mut buf = Vec::new();
            write_schedule(&mut buf, &s).unwrap();
            prop_assert_eq!(read_schedule(&buf[..]).unwrap(), s);
        }

        #[test]
        fn coefficient_round_trip(pairs in prop::collection::vec((1e-10f64..1e10, 1e-10f64..1e10), 1..40)) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let mut buf = Vec::new();
            write_coefficients(&mut buf, &a, &b).unwrap();
            let (a2, b2) = read_coefficients(&buf[..]).unwrap();
            prop_assert_eq!(a2, a);
            prop_assert_eq!(b2, b);
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_schedule("k,value\n0,1\n".as_bytes()).is_err());
        assert!(read_schedule("k,delta\n1,1\n".as_bytes()).is_err());
        assert!(read_schedule("k,delta\n0,abc\n".as_bytes()).is_err());
        assert!(read_coefficients("k,b,a\n0,1,1\n".as_bytes()).is_err());
        let s = read_schedule("k,omega\n0,1.5\n1,2\n".as_bytes()).unwrap();
        assert_eq!(s, Schedule::work(vec![1.5, 2.0]));
    }
}
