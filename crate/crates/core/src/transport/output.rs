use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Significant digits written to CSV and JSON.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Curves sampled along one axis (drive detuning in MHz or flux in rad).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult<T> {
    /// Column name of the axis, including its unit suffix.
    pub axis_label: String,
    pub axis: Vec<T>,
    /// `(column name, values)` in output order.
    pub curves: Vec<(String, Vec<T>)>,
}

impl<T: Real> SweepResult<T> {
    pub fn new(axis_label: impl Into<String>, axis: Vec<T>) -> Self {
        Self {
            axis_label: axis_label.into(),
            axis,
            curves: Vec::new(),
        }
    }

    pub fn push_curve(&mut self, name: impl Into<String>, values: Vec<T>) -> Result<&mut Self> {
        if values.len() != self.axis.len() {
            return Err(Error::LengthMismatch {
                expected: self.axis.len(),
                got: values.len(),
            });
        }
        self.curves.push((name.into(), values));
        Ok(self)
    }

    pub fn curve(&self, name: &str) -> Option<&[T]> {
        self.curves.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn columns(&self) -> Vec<&str> {
        std::iter::once(self.axis_label.as_str())
            .chain(self.curves.iter().map(|(n, _)| n.as_str()))
            .collect()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = T> + '_ {
        std::iter::once(self.axis[i]).chain(self.curves.iter().map(move |(_, v)| v[i]))
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for i in 0..self.axis.len() {
            let cells: Vec<String> = self.row(i).map(|x| format_significant(x.as_f64(), SIGNIFICANT_DIGITS)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [[...], ...]}` with the CSV rounding.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<serde_json::Value>> = (0..self.axis.len())
            .map(|i| {
                self.row(i)
                    .map(|x| {
                        let s = format_significant(x.as_f64(), SIGNIFICANT_DIGITS);
                        serde_json::from_str(&s).unwrap_or(serde_json::Value::Null)
                    })
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({ "columns": self.columns(), "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values are finite or null");
        s.push('\n');
        s
    }
}

/// Decimal rendering with `digits` significant digits; falls back to
/// scientific notation for very large or small magnitudes.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .expect("scientific format has an exponent");
    if (-5..digits as i32).contains(&exp) {
        format!("{:.*}", (digits as i32 - 1 - exp).max(0) as usize, x)
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.5, 12), "0.500000000000");
        assert_eq!(format_significant(-0.61880215351700, 12), "-0.618802153517");
        assert_eq!(format_significant(std::f64::consts::PI, 12), "3.14159265359");
        assert_eq!(format_significant(12.5, 12), "12.5000000000");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(1e-20, 3), "1.00e-20");
        assert_eq!(format_significant(9.9999999999999, 12), "10.0000000000");
    }

    #[test]
    fn csv_and_json_share_columns() {
        let mut s = SweepResult::new("delta_d_MHz", vec![-0.5, 0.0, 0.5]);
        s.push_curve("T1", vec![1.0, 0.0, 1.0]).unwrap();
        s.push_curve("T2", vec![0.0, 1.0, 0.0]).unwrap();
        assert!(s.push_curve("T3", vec![0.0]).is_err());
        let csv = s.to_csv();
        assert_eq!(csv.lines().next(), Some("delta_d_MHz,T1,T2"));
        assert_eq!(csv.lines().count(), 4);
        let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(json["columns"][0], "delta_d_MHz");
        assert_eq!(json["rows"][1][2], 1.0);
    }
}
