//! Plot-ready curves: a header row, then one row of numbers per grid point.
//! A point whose evaluation failed leaves its cells empty.

use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Seventeen significant digits, which round-trips every `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

impl Curve {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(format_number).unwrap_or_default()))
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV output is ASCII")
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(|e| e.to_string())?;
            let row = record
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .map(Some)
                            .map_err(|e| format!("cell {cell:?}: {e}"))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Curve { columns, rows })
    }

    /// Rows with at least one empty cell.
    pub fn failed_rows(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.iter().any(Option::is_none))
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridVar {
    X,
    Y,
    Alpha,
}

impl GridVar {
    pub fn name(self) -> &'static str {
        match self {
            GridVar::X => "x",
            GridVar::Y => "y",
            GridVar::Alpha => "alpha",
        }
    }
}

/// `var=start:stop:count`, evenly spaced and including both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub var: GridVar,
    pub values: Vec<f64>,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (var, range) = s
            .split_once('=')
            .ok_or_else(|| format!("grid {s:?} is not of the form var=start:stop:count"))?;
        let var = match var.trim() {
            "x" => GridVar::X,
            "y" => GridVar::Y,
            "alpha" => GridVar::Alpha,
            other => {
                return Err(format!(
                    "unknown grid variable {other:?}; expected x, y or alpha"
                ))
            }
        };
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!(
                "grid range {range:?} is not of the form start:stop:count"
            ));
        };
        let number = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("grid bound {v:?} is not a finite number"))
        };
        let (start, stop) = (number(start)?, number(stop)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("grid count {count:?} is not a non-negative integer"))?;
        if count == 0 {
            return Err("grid count must be at least 1".into());
        }
        let values = (0..count)
            .map(|i| match i {
                0 => start,
                i if i == count - 1 => stop,
                i => start + (stop - start) * i as f64 / (count - 1) as f64,
            })
            .collect();
        Ok(Grid { var, values })
    }
}
