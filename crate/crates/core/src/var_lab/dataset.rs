use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::fmt_num;

pub const DATASET_COLUMNS: [&str; 5] = ["week", "log_P", "log_H", "log_Phi", "halving_dummy"];

/// Weekly log-series `[log P, log H, log Phi]` plus the halving dummy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarDataset {
    #[serde(rename = "log_P")]
    pub log_p: Vec<f64>,
    #[serde(rename = "log_H")]
    pub log_h: Vec<f64>,
    #[serde(rename = "log_Phi")]
    pub log_phi: Vec<f64>,
    pub halving_dummy: Vec<u8>,
    pub meta: String,
}

impl VarDataset {
    pub fn len(&self) -> usize {
        self.log_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_p.is_empty()
    }

    /// Row `t` as `[log P, log H, log Phi]`.
    pub fn row(&self, t: usize) -> [f64; 3] {
        [self.log_p[t], self.log_h[t], self.log_phi[t]]
    }

    pub fn series(&self, var: usize) -> &[f64] {
        match var {
            0 => &self.log_p,
            1 => &self.log_h,
            _ => &self.log_phi,
        }
    }

    pub fn check(&self) -> Result<()> {
        let n = self.len();
        if self.log_h.len() != n || self.log_phi.len() != n || self.halving_dummy.len() != n {
            return Err(Error::Schema("series lengths differ".into()));
        }
        for t in 0..n {
            if self.row(t).iter().any(|v| !v.is_finite()) {
                return Err(Error::Dataset { line: t + 2, reason: "non-finite value".into() });
            }
            if self.halving_dummy[t] > 1 {
                return Err(Error::Dataset { line: t + 2, reason: "halving_dummy must be 0 or 1".into() });
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Schema(e.to_string());
        w.write_record(DATASET_COLUMNS).map_err(io)?;
        for t in 0..self.len() {
            w.write_record([
                t.to_string(),
                fmt_num(self.log_p[t]),
                fmt_num(self.log_h[t]),
                fmt_num(self.log_phi[t]),
                self.halving_dummy[t].to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Schema(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, meta: String) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader
            .headers()
            .map_err(|e| Error::Dataset { line: 1, reason: e.to_string() })?
            .clone();
        let mut idx = [0usize; 5];
        for (slot, name) in idx.iter_mut().zip(DATASET_COLUMNS) {
            *slot = headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::Schema(format!("missing column {name}")))?;
        }

        let mut data = VarDataset {
            log_p: Vec::new(),
            log_h: Vec::new(),
            log_phi: Vec::new(),
            halving_dummy: Vec::new(),
            meta,
        };
        for record in reader.records() {
            let record = record.map_err(|e| Error::Dataset {
                line: e.position().map_or(0, |p| p.line() as usize),
                reason: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |i: usize| -> Result<f64> {
                let raw = record.get(idx[i]).unwrap_or("").trim();
                let v: f64 = raw.parse().map_err(|_| Error::Dataset {
                    line,
                    reason: format!("cannot parse {} value {raw:?}", DATASET_COLUMNS[i]),
                })?;
                if !v.is_finite() {
                    return Err(Error::Dataset {
                        line,
                        reason: format!("non-finite {} value", DATASET_COLUMNS[i]),
                    });
                }
                Ok(v)
            };
            field(0)?;
            data.log_p.push(field(1)?);
            data.log_h.push(field(2)?);
            data.log_phi.push(field(3)?);
            let dummy = field(4)?;
            if dummy != 0.0 && dummy != 1.0 {
                return Err(Error::Dataset { line, reason: format!("halving_dummy must be 0 or 1, got {dummy}") });
            }
            data.halving_dummy.push(dummy as u8);
        }
        data.check()?;
        Ok(data)
    }
}

/// Reads a weekly dataset CSV with header `week,log_P,log_H,log_Phi,halving_dummy`.
pub fn load_dataset(path: &Path) -> Result<VarDataset> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Schema(format!("cannot open {}: {e}", path.display())))?;
    VarDataset::read_csv(file, format!("file:{}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<VarDataset> {
        VarDataset::read_csv(text.as_bytes(), "test".into())
    }

    #[test]
    fn three_rows() {
        let d = parse("week,log_P,log_H,log_Phi,halving_dummy\n0,1,2,3,0\n1,1.5,2,3,0\n2,1,2.5,-3e-2,1\n").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.row(2), [1.0, 2.5, -0.03]);
        assert_eq!(d.halving_dummy, [0, 0, 1]);
    }

    #[test]
    fn missing_column_named() {
        let err = parse("week,log_P,log_Phi,halving_dummy\n0,1,3,0\n").unwrap_err();
        assert!(err.to_string().contains("log_H"), "{err}");
    }

    #[test]
    fn bad_dummy_rejected_with_line() {
        let err = parse("week,log_P,log_H,log_Phi,halving_dummy\n0,1,2,3,0\n1,1,2,3,2\n").unwrap_err();
        match err {
            Error::Dataset { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_finite_and_garbage_rejected() {
        assert!(parse("week,log_P,log_H,log_Phi,halving_dummy\n0,NaN,2,3,0\n").is_err());
        assert!(parse("week,log_P,log_H,log_Phi,halving_dummy\n0,inf,2,3,0\n").is_err());
        let err = parse("week,log_P,log_H,log_Phi,halving_dummy\n0,1,2,3,0\n1,x,2,3,0\n").unwrap_err();
        assert!(matches!(err, Error::Dataset { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn csv_round_trip() {
        let d = VarDataset {
            log_p: vec![0.1, -0.2],
            log_h: vec![1.0 / 3.0, 2.0],
            log_phi: vec![-1e-300, 5.0],
            halving_dummy: vec![0, 1],
            meta: "x".into(),
        };
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = VarDataset::read_csv(buf.as_slice(), "x".into()).unwrap();
        assert_eq!(back, d);
    }
}
