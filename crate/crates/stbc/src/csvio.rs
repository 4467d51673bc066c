//! CSV writers and readers. Numbers are printed with 12 significant digits;
//! lines starting with `#` are comments and are skipped by the readers.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::sim::SimResult;
use crate::tables::{Table1Row, Table2Row};

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp) as usize, x);
        trim(&s).to_string()
    } else {
        format!("{}e{}{:02}", trim(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn comments<W: Write>(out: &mut W, lines: &[String]) -> std::io::Result<()> {
    for l in lines {
        writeln!(out, "# {l}")?;
    }
    Ok(())
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input)
}

pub const TABLE1_HEADER: [&str; 3] = ["code", "constellation", "gain"];
pub const TABLE2_HEADER: [&str; 5] = ["apsk", "min_distance", "u", "v", "gain"];
pub const SIM_HEADER: [&str; 7] = ["snr_db", "codewords", "bits", "bit_errors", "ber", "decoder", "seed"];

pub fn write_table1<W: Write>(mut out: W, header: &[String], rows: &[Table1Row]) -> crate::Result<()> {
    comments(&mut out, header)?;
    let mut w = writer(out);
    w.write_record(TABLE1_HEADER)?;
    for r in rows {
        w.write_record([r.code.clone(), r.constellation.clone(), fmt12(r.gain)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table2<W: Write>(mut out: W, header: &[String], rows: &[Table2Row]) -> crate::Result<()> {
    comments(&mut out, header)?;
    let mut w = writer(out);
    w.write_record(TABLE2_HEADER)?;
    for r in rows {
        w.write_record([r.apsk.clone(), fmt12(r.min_distance), fmt12(r.u), fmt12(r.v), fmt12(r.gain)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sim<W: Write>(mut out: W, header: &[String], res: &SimResult) -> crate::Result<()> {
    comments(&mut out, header)?;
    let mut w = writer(out);
    w.write_record(SIM_HEADER)?;
    for p in &res.points {
        w.write_record([
            fmt12(p.snr_db),
            p.codewords.to_string(),
            p.bits.to_string(),
            p.bit_errors.to_string(),
            fmt12(p.ber),
            res.decoder.id().to_string(),
            res.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct SimRecord {
    pub snr_db: f64,
    pub codewords: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub decoder: String,
    pub seed: u64,
}

fn read_all<R: Read, T: for<'de> Deserialize<'de>>(input: R, header: &[&str]) -> crate::Result<Vec<T>> {
    let mut rd = reader(input);
    let got: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if got != header {
        return Err(crate::Error::Config(format!("unexpected CSV header {got:?}")));
    }
    Ok(rd.deserialize().collect::<Result<Vec<T>, _>>()?)
}

pub fn read_table1<R: Read>(input: R) -> crate::Result<Vec<Table1Row>> {
    read_all(input, &TABLE1_HEADER)
}

pub fn read_table2<R: Read>(input: R) -> crate::Result<Vec<Table2Row>> {
    read_all(input, &TABLE2_HEADER)
}

pub fn read_sim<R: Read>(input: R) -> crate::Result<Vec<SimRecord>> {
    read_all(input, &SIM_HEADER)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(0.5), "0.5");
        assert_eq!(fmt12(2.0), "2");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(0.028747), "0.028747");
        assert_eq!(fmt12(-1234.5), "-1234.5");
        assert_eq!(fmt12(1.5e-7), "1.5e-07");
        assert_eq!(fmt12(6.02214076e23), "6.02214076e+23");
        assert_eq!(fmt12(f64::INFINITY), "inf");
        assert_eq!(fmt12(0.9114378277661477), "0.911437827766");
    }

    #[test]
    fn parses_back() {
        for x in [0.1, 1.0 / 7.0, 123456.789, 3.2e-9, 0.0287470481] {
            let y: f64 = fmt12(x).parse().unwrap();
            assert!((x - y).abs() <= 1e-11 * x.abs());
        }
    }
}
