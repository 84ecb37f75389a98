//! Day-level trace files and CSV formatting.
//!
//! All CSV output is ASCII with LF line endings, a mandatory header row,
//! '.' as the decimal separator, and floats printed at 17 significant
//! digits so that values round-trip bit-exactly and reruns are
//! byte-identical.

use crate::audit::{CalibrationAudit, TraceRow};
use crate::error::{Error, Result};
use crate::model::Bit;

/// A float at 17 significant digits, enough to reproduce any f64 exactly.
pub fn csv_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_mean(mean: Option<f64>) -> String {
    mean.map(csv_f64).unwrap_or_default()
}

/// Render a day-level trace: `day,bit,forecast,discrepancy`.
pub fn trace_to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 48 + 32);
    out.push_str("day,bit,forecast,discrepancy\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.day,
            row.bit,
            csv_f64(row.forecast),
            csv_f64(row.discrepancy)
        ));
    }
    out
}

/// Render an audit checkpoint log: `day,rule,count,mean`. A rule with no
/// selected days yet has an empty mean field.
pub fn audit_to_csv(audit: &CalibrationAudit) -> String {
    let mut out = String::from("day,rule,count,mean\n");
    for row in audit.checkpoint_log() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.day,
            row.rule,
            row.count,
            csv_mean(row.mean)
        ));
    }
    out
}

/// Recorded (forecast, outcome) rows from an external forecaster,
/// parsed from the same CSV layout `run` writes. The discrepancy column
/// is optional on input; when present it must match `bit - forecast`.
#[derive(Debug, Clone, Default)]
pub struct ExternalTrace {
    pub forecasts: Vec<f64>,
    pub outcomes: Vec<Bit>,
}

impl ExternalTrace {
    pub fn len(&self) -> u64 {
        self.outcomes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Parse trace CSV text. Days must be contiguous from 1, forecasts in
    /// [0, 1], outcomes binary; any violation reports its row number
    /// (header = row 1).
    pub fn parse(text: &str) -> Result<ExternalTrace> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::TraceFormat {
            row: 1,
            message: "empty file".into(),
        })?;
        let with_discrepancy = match header.trim_end() {
            "day,bit,forecast,discrepancy" => true,
            "day,bit,forecast" => false,
            other => {
                return Err(Error::TraceFormat {
                    row: 1,
                    message: format!(
                        "expected header 'day,bit,forecast[,discrepancy]', got {other:?}"
                    ),
                })
            }
        };

        let mut trace = ExternalTrace::default();
        for (idx, line) in lines {
            let row = idx as u64 + 1;
            if line.is_empty() {
                return Err(Error::TraceFormat {
                    row,
                    message: "blank line".into(),
                });
            }
            let fields: Vec<&str> = line.split(',').collect();
            let expected = if with_discrepancy { 4 } else { 3 };
            if fields.len() != expected {
                return Err(Error::TraceFormat {
                    row,
                    message: format!("expected {expected} fields, got {}", fields.len()),
                });
            }
            let day: u64 = fields[0].parse().map_err(|_| Error::TraceFormat {
                row,
                message: format!("bad day {:?}", fields[0]),
            })?;
            if day != trace.outcomes.len() as u64 + 1 {
                return Err(Error::TraceFormat {
                    row,
                    message: format!(
                        "days must be contiguous from 1: expected {}, got {day}",
                        trace.outcomes.len() + 1
                    ),
                });
            }
            let bit = match fields[1] {
                "0" => Bit::ZERO,
                "1" => Bit::ONE,
                other => {
                    return Err(Error::TraceFormat {
                        row,
                        message: format!("outcome must be 0 or 1, got {other:?}"),
                    })
                }
            };
            let forecast: f64 = fields[2].parse().map_err(|_| Error::TraceFormat {
                row,
                message: format!("bad forecast {:?}", fields[2]),
            })?;
            if !(forecast.is_finite() && (0.0..=1.0).contains(&forecast)) {
                return Err(Error::TraceFormat {
                    row,
                    message: format!("forecast {forecast} outside [0, 1]"),
                });
            }
            if with_discrepancy {
                let d: f64 = fields[3].parse().map_err(|_| Error::TraceFormat {
                    row,
                    message: format!("bad discrepancy {:?}", fields[3]),
                })?;
                if (d - (bit.as_f64() - forecast)).abs() > 1e-12 {
                    return Err(Error::TraceFormat {
                        row,
                        message: format!(
                            "discrepancy {d} disagrees with bit - forecast = {}",
                            bit.as_f64() - forecast
                        ),
                    });
                }
            }
            trace.forecasts.push(forecast);
            trace.outcomes.push(bit);
        }
        if trace.is_empty() {
            return Err(Error::TraceFormat {
                row: 1,
                message: "trace has no data rows".into(),
            });
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_significant_digits() {
        assert_eq!(csv_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(csv_f64(-0.7), "-6.9999999999999996e-1");
        let x = 1.0 / 3.0;
        let printed = csv_f64(x);
        assert_eq!(printed.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn parse_round_trip_of_written_trace() {
        let rows = vec![
            TraceRow {
                day: 1,
                bit: Bit::ONE,
                forecast: 0.7,
                discrepancy: 1.0 - 0.7,
            },
            TraceRow {
                day: 2,
                bit: Bit::ZERO,
                forecast: 1.0 / 3.0,
                discrepancy: -(1.0 / 3.0),
            },
        ];
        let csv = trace_to_csv(&rows);
        let parsed = ExternalTrace::parse(&csv).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed.forecasts, vec![0.7, 1.0 / 3.0]);
        assert_eq!(parsed.outcomes, vec![Bit::ONE, Bit::ZERO]);
    }

    #[test]
    fn parse_accepts_three_column_form() {
        let parsed = ExternalTrace::parse("day,bit,forecast\n1,1,0.25\n2,0,0.5\n").unwrap();
        assert_eq!(parsed.forecasts, vec![0.25, 0.5]);
    }

    #[test]
    fn parse_reports_row_numbers() {
        let err = ExternalTrace::parse("day,bit,forecast\n1,1,0.25\n3,0,0.5\n").unwrap_err();
        match err {
            Error::TraceFormat { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = ExternalTrace::parse("day,bit,forecast\n1,2,0.25\n").unwrap_err();
        match err {
            Error::TraceFormat { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("outcome"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ExternalTrace::parse("nope\n").is_err());
        assert!(ExternalTrace::parse("day,bit,forecast\n1,1,1.5\n").is_err());
    }
}
