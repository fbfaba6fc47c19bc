//! CSV and aligned-table rendering of study rows.

use std::io::{Read, Write};

use nlmg::assembly::Kernel;

use crate::error::{BenchError, Result};
use crate::study::{ConvergenceStudy, StudyRow};

pub const CSV_HEADER: [&str; 8] = [
    "kernel",
    "alpha",
    "N",
    "levels",
    "error_inf",
    "rate",
    "iterations",
    "seconds",
];

/// Six significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.5e}")
}

/// The value a float takes after a trip through [`format_float`].
pub fn quantize(x: f64) -> f64 {
    format_float(x).parse().expect("formatted float parses")
}

impl StudyRow {
    /// This row as it reads back from CSV.
    pub fn quantized(&self) -> Self {
        let kernel = match self.kernel {
            Kernel::Fractional { alpha } => Kernel::Fractional {
                alpha: quantize(alpha),
            },
            Kernel::Constant => Kernel::Constant,
        };
        Self {
            kernel,
            error_inf: quantize(self.error_inf),
            rate: self.rate.map(quantize),
            seconds: quantize(self.seconds),
            ..self.clone()
        }
    }

    fn record(&self) -> [String; 8] {
        [
            self.kernel.name().to_string(),
            self.kernel.alpha().map(format_float).unwrap_or_default(),
            self.intervals.to_string(),
            self.levels.to_string(),
            format_float(self.error_inf),
            self.rate.map(format_float).unwrap_or_default(),
            self.iterations.to_string(),
            format_float(self.seconds),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[StudyRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn field<T: std::str::FromStr>(value: &str, name: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| BenchError::Parse(format!("bad {name} {value:?}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<StudyRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(BenchError::Parse(format!(
            "unexpected header {:?}",
            r.headers()?
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let kernel = match (&record[0], &record[1]) {
            ("fractional", alpha) if !alpha.is_empty() => {
                Kernel::fractional(field(alpha, "alpha")?)?
            }
            ("constant", "") => Kernel::Constant,
            (k, a) => return Err(BenchError::Parse(format!("bad kernel/alpha {k:?}/{a:?}"))),
        };
        let rate = match &record[5] {
            "" => None,
            v => Some(field(v, "rate")?),
        };
        rows.push(StudyRow {
            kernel,
            intervals: field(&record[2], "N")?,
            levels: field(&record[3], "levels")?,
            error_inf: field(&record[4], "error_inf")?,
            rate,
            iterations: field(&record[6], "iterations")?,
            seconds: field(&record[7], "seconds")?,
        });
    }
    Ok(rows)
}

pub fn parse_csv(text: &str) -> Result<Vec<StudyRow>> {
    read_csv(text.as_bytes())
}

/// Aligned table, one row per mesh size; stalled rows are
/// marked with `*`.
pub fn render_table(study: &ConvergenceStudy) -> String {
    let mut s = String::new();
    let Some(first) = study.rows.first() else {
        return "(no rows)\n".into();
    };
    s += &match first.kernel.alpha() {
        Some(alpha) => format!("{} kernel, alpha = {alpha}\n", first.kernel.name()),
        None => format!("{} kernel\n", first.kernel.name()),
    };
    s += &format!(
        "{:>9} {:>7} {:>13} {:>8} {:>6} {:>10}\n",
        "N", "levels", "error_inf", "rate", "iter", "seconds"
    );
    for row in &study.rows {
        let rate = row.rate.map_or("-".into(), |r| format!("{r:.4}"));
        let mark = if study.is_flagged(row.intervals) {
            " *"
        } else {
            ""
        };
        s += &format!(
            "{:>9} {:>7} {:>13.4e} {:>8} {:>6} {:>10.3}{mark}\n",
            format!("2^{}", row.intervals.trailing_zeros()),
            row.levels,
            row.error_inf,
            rate,
            row.iterations,
            row.seconds
        );
    }
    for flag in &study.flagged {
        s += &format!("* N = {}: {}\n", flag.intervals, flag.message);
    }
    s
}
