//! CSV output.

use std::io::Write;

use crate::error::Result;

/// Column names of bound and figure CSVs.
pub const BOUND_HEADER: [&str; 9] = ["scheme", "n", "beta_r", "beta_s", "rho", "metric", "value", "n_tau", "seed"];

/// One computed quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    /// `nldls` or `ldnls`.
    pub scheme: String,
    /// Blocklength.
    pub n: usize,
    /// Reliability exponent (first layer for layered codes).
    pub beta_r: f64,
    /// Secrecy exponent (first layer for layered codes).
    pub beta_s: f64,
    /// Normalized rate, empty when the quantity does not depend on it.
    pub rho: Option<f64>,
    /// Quantity name.
    pub metric: String,
    /// Value; NaN when undefined.
    pub value: f64,
    /// Monte-Carlo budget, empty for exact profiles.
    pub n_tau: Option<u64>,
    /// Master seed.
    pub seed: u64,
}

/// 17 significant digits.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

impl BoundRow {
    fn record(&self) -> [String; 9] {
        [
            self.scheme.clone(),
            self.n.to_string(),
            self.beta_r.to_string(),
            self.beta_s.to_string(),
            opt(self.rho),
            self.metric.clone(),
            fmt_value(self.value),
            opt(self.n_tau),
            self.seed.to_string(),
        ]
    }
}

/// Writes a header and rows.
pub fn write_bound_rows<W: Write>(out: W, rows: &[BoundRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOUND_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Parses rows written by [`write_bound_rows`].
pub fn read_bound_rows(text: &str) -> Result<Vec<BoundRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |what: &str| {
        crate::error::CliError::Core(polarsec_core::Error::InvalidArgument(format!("bad CSV field {what}")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| f(i).parse::<f64>().map_err(|_| bad(BOUND_HEADER[i]));
        rows.push(BoundRow {
            scheme: f(0).to_string(),
            n: f(1).parse().map_err(|_| bad("n"))?,
            beta_r: num(2)?,
            beta_s: num(3)?,
            rho: if f(4).is_empty() { None } else { Some(num(4)?) },
            metric: f(5).to_string(),
            value: num(6)?,
            n_tau: if f(7).is_empty() { None } else { Some(f(7).parse().map_err(|_| bad("n_tau"))?) },
            seed: f(8).parse().map_err(|_| bad("seed"))?,
        });
    }
    Ok(rows)
}

/// Column names of simulation CSVs.
pub const SIM_HEADER: [&str; 9] = ["scheme", "n", "rho", "trial", "block", "receiver", "metric", "value", "seed"];

/// One simulation statistic. Aggregate rows leave `trial` (and `block`) empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    /// `nldls` or `ldnls`.
    pub scheme: String,
    /// Blocklength.
    pub n: usize,
    /// Normalized rate, if configured.
    pub rho: Option<f64>,
    /// Trial index.
    pub trial: Option<u64>,
    /// Block position.
    pub block: Option<usize>,
    /// Receiver, one-based.
    pub receiver: usize,
    /// Statistic name.
    pub metric: String,
    /// Value.
    pub value: f64,
    /// Master seed.
    pub seed: u64,
}

/// Writes a header and simulation rows.
pub fn write_sim_rows<W: Write>(out: W, rows: &[SimRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIM_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            r.n.to_string(),
            opt(r.rho),
            opt(r.trial),
            opt(r.block),
            r.receiver.to_string(),
            r.metric.clone(),
            fmt_value(r.value),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip_exactly() {
        let rows = vec![
            BoundRow {
                scheme: "nldls".into(),
                n: 1024,
                beta_r: 0.16,
                beta_s: 0.3,
                rho: Some(0.9),
                metric: "pb_ub_1".into(),
                value: 0.001_772_166_585_420_158_5,
                n_tau: None,
                seed: 1,
            },
            BoundRow {
                scheme: "ldnls".into(),
                n: 128,
                beta_r: 0.24,
                beta_s: 0.3,
                rho: None,
                metric: "phi_rate".into(),
                value: 1.0 / 3.0,
                n_tau: Some(20000),
                seed: 7,
            },
        ];
        let mut buf = Vec::new();
        write_bound_rows(&mut buf, &rows).unwrap();
        let back = read_bound_rows(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn nan_survives() {
        let row = BoundRow {
            scheme: "nldls".into(),
            n: 4,
            beta_r: 0.1,
            beta_s: 0.2,
            rho: None,
            metric: "pb_ub_1".into(),
            value: f64::NAN,
            n_tau: None,
            seed: 0,
        };
        let mut buf = Vec::new();
        write_bound_rows(&mut buf, &[row]).unwrap();
        assert!(read_bound_rows(std::str::from_utf8(&buf).unwrap()).unwrap()[0].value.is_nan());
    }

    #[test]
    fn empty_output_is_header_only() {
        let mut buf = Vec::new();
        write_bound_rows(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "scheme,n,beta_r,beta_s,rho,metric,value,n_tau,seed\n");
    }
}
