//! CSV form of a run log and the companion gnuplot script.
//!
//! One header row followed by one record per step. Values print in the
//! shortest form that parses back to the identical double, so writing and
//! re-reading a log is lossless and repeated runs are byte-identical.

use std::fmt;
use std::io::{self, BufRead, Write};

use helmfuzz::{SimLog, SimRecord};

pub const CSV_COLUMNS: [&str; 13] = [
    "t",
    "psi_cmd",
    "psi_d",
    "psi",
    "psi_err",
    "r_d",
    "r",
    "r_err",
    "delta_cmd",
    "delta_applied",
    "h",
    "zeta",
    "yuv",
];

pub fn write_csv<W: Write>(mut out: W, log: &SimLog) -> io::Result<()> {
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for rec in log.records() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            rec.t,
            rec.psi_cmd,
            rec.psi_d,
            rec.psi,
            rec.psi_err,
            rec.r_d,
            rec.r,
            rec.r_err,
            rec.delta_cmd,
            rec.delta_applied,
            rec.h,
            rec.zeta,
            rec.yuv
        )?;
    }
    out.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvReadError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CsvReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for CsvReadError {}

pub fn read_csv<R: BufRead>(input: R) -> Result<SimLog, CsvReadError> {
    let mut records = Vec::new();
    let mut lines = input.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| CsvReadError {
            line: 1,
            message: "empty input".into(),
        })?
        .1
        .map_err(|e| CsvReadError {
            line: 1,
            message: e.to_string(),
        })?;
    if header != CSV_COLUMNS.join(",") {
        return Err(CsvReadError {
            line: 1,
            message: format!("unexpected header '{header}'"),
        });
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| CsvReadError {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        let mut fields = [0.0_f64; 13];
        let mut count = 0;
        for (slot, token) in fields.iter_mut().zip(line.split(',')) {
            *slot = token.parse().map_err(|_| CsvReadError {
                line: line_no,
                message: format!("bad number '{token}'"),
            })?;
            count += 1;
        }
        if count != 13 || line.split(',').count() != 13 {
            return Err(CsvReadError {
                line: line_no,
                message: format!("expected 13 fields, got {}", line.split(',').count()),
            });
        }
        records.push(SimRecord {
            t: fields[0],
            psi_cmd: fields[1],
            psi_d: fields[2],
            psi: fields[3],
            psi_err: fields[4],
            r_d: fields[5],
            r: fields[6],
            r_err: fields[7],
            delta_cmd: fields[8],
            delta_applied: fields[9],
            h: fields[10],
            zeta: fields[11],
            yuv: fields[12],
        });
    }
    Ok(SimLog::from_records(records))
}

/// Gnuplot script with the four customary panels: heading against the
/// desired and commanded heading, heading error, rudder, and water depth.
/// Angles are converted to degrees in the plot itself; the CSV stays in
/// radians.
pub fn write_plot_script<W: Write>(mut out: W, csv_path: &str, title: &str) -> io::Result<()> {
    writeln!(out, "# gnuplot script generated by helmfuzz")?;
    writeln!(out, "set datafile separator \",\"")?;
    writeln!(out, "set terminal pngcairo size 1100,1400")?;
    writeln!(out, "set output \"{title}.png\"")?;
    writeln!(out, "r2d = 180.0 / pi")?;
    writeln!(out, "set multiplot layout 4,1 title \"{title}\"")?;
    writeln!(out, "set xlabel \"time [s]\"")?;
    writeln!(out, "set ylabel \"heading [deg]\"")?;
    writeln!(
        out,
        "plot \"{csv_path}\" every ::1 using 1:($2*r2d) with lines dashtype 2 title \"command\", \\"
    )?;
    writeln!(
        out,
        "     \"\" every ::1 using 1:($3*r2d) with lines dashtype 3 title \"desired\", \\"
    )?;
    writeln!(out, "     \"\" every ::1 using 1:($4*r2d) with lines title \"actual\"")?;
    writeln!(out, "set ylabel \"heading error [deg]\"")?;
    writeln!(
        out,
        "plot \"\" every ::1 using 1:($5*r2d) with lines title \"psi_d - psi\""
    )?;
    writeln!(out, "set ylabel \"rudder [deg]\"")?;
    writeln!(
        out,
        "plot \"\" every ::1 using 1:($10*r2d) with lines title \"applied\", \\"
    )?;
    writeln!(
        out,
        "     \"\" every ::1 using 1:($9*r2d) with lines dashtype 4 title \"commanded\""
    )?;
    writeln!(out, "set ylabel \"water depth [m]\"")?;
    writeln!(out, "plot \"\" every ::1 using 1:11 with lines title \"depth\"")?;
    writeln!(out, "unset multiplot")?;
    out.flush()
}
