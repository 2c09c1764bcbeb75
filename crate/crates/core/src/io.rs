//! JSON and CSV artifacts for designs and inner problems.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::driver::DesignState;
use crate::error::{Error, Result};
use crate::experiments::{num, Csv};
use crate::kernels::sdp::Sense;
use crate::linalg::{c, CMat, CVec};
use crate::waveform::SdpRecord;

/// `(V, s, w)` with every entry stored as `[re, im]`; `v` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub v: Vec<Vec<[f64; 2]>>,
    pub s: Vec<[f64; 2]>,
    pub w: Vec<[f64; 2]>,
}

impl DesignFile {
    pub fn new(v: &CMat, s: &CVec, w: &CVec) -> Self {
        let pair = |z: &crate::linalg::C64| [z.re, z.im];
        Self {
            v: (0..v.nrows()).map(|i| v.row(i).iter().map(pair).collect()).collect(),
            s: s.iter().map(pair).collect(),
            w: w.iter().map(pair).collect(),
        }
    }

    pub fn matrices(&self) -> Result<(CMat, CVec, CVec)> {
        let rows = self.v.len();
        let cols = self.v.first().map_or(0, Vec::len);
        if self.v.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged precoder rows".into()));
        }
        let v = CMat::from_fn(rows, cols, |i, j| c(self.v[i][j][0], self.v[i][j][1]));
        let vec = |x: &[[f64; 2]]| CVec::from_iterator(x.len(), x.iter().map(|p| c(p[0], p[1])));
        Ok((v, vec(&self.s), vec(&self.w)))
    }
}

/// Dense matrix as `{rows, cols, data}` with row-major `[re, im]` pairs.
pub fn matrix_json(m: &CMat) -> Value {
    let data: Vec<[f64; 2]> =
        (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| [m[(i, j)].re, m[(i, j)].im]).collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

pub fn record_json(r: &SdpRecord) -> Value {
    let constraints: Vec<Value> = r
        .constraints
        .iter()
        .map(|k| {
            let sense = match k.sense {
                Sense::Le => "<=",
                Sense::Eq => "==",
                Sense::Ge => ">=",
            };
            json!({ "a": matrix_json(&k.a), "sense": sense, "b": k.b })
        })
        .collect();
    json!({
        "name": r.name,
        "sense": if r.maximize { "maximize" } else { "minimize" },
        "objective": matrix_json(&r.objective),
        "denominator": r.denominator.as_ref().map(|(m, c0)| json!({ "r": matrix_json(m), "c": c0 })),
        "constraints": constraints,
        "solution": matrix_json(&r.solution),
    })
}

/// Writes one JSON file per record, prefixed by `tag`.
pub fn dump_records(dir: &Path, tag: &str, records: &[SdpRecord]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let path = dir.join(format!("{tag}_{i:02}_{}.json", r.name));
        std::fs::write(&path, serde_json::to_string_pretty(&record_json(r))?)?;
        out.push(path);
    }
    Ok(out)
}

pub fn write_design(path: &Path, st: &DesignState) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&DesignFile::new(&st.v, &st.s, &st.w))?)?;
    Ok(())
}

pub fn read_design(path: &Path) -> Result<(CMat, CVec, CVec)> {
    let f: DesignFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    f.matrices()
}

pub fn history_csv(st: &DesignState) -> Csv {
    let mut csv = Csv::new(&["outer_iter", "sinr_db", "rate_nats"]);
    for h in &st.history {
        csv.row(&[h.outer_iter.to_string(), num(h.sinr_db), num(h.rate_nats)]);
    }
    csv
}

/// Precoder SCA traces of all outer iterations, numbered consecutively.
pub fn precoder_trace_csv(st: &DesignState) -> Csv {
    let mut csv = Csv::new(&["outer_iter", "iter", "r_of_v", "rate_nats", "admm_iters"]);
    for (o, trace) in st.precoder_traces.iter().enumerate() {
        for r in trace {
            csv.row(&[(o + 1).to_string(), r.iter.to_string(), num(r.r_of_v), num(r.rate_nats), r.admm_iters.to_string()]);
        }
    }
    csv
}

pub fn waveform_trace_csv(st: &DesignState) -> Csv {
    let mut csv = Csv::new(&["outer_iter", "iter", "sinr_db", "rate_nats", "rank_before_reduction", "papr"]);
    for (o, trace) in st.waveform_traces.iter().enumerate() {
        for r in trace {
            csv.row(&[
                (o + 1).to_string(),
                r.iter.to_string(),
                num(r.sinr_db),
                num(r.rate_nats),
                r.rank_before_reduction.to_string(),
                num(r.papr),
            ]);
        }
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::sdp::TraceConstraint;

    #[test]
    fn design_roundtrip() {
        let v = CMat::from_fn(3, 2, |i, j| c(i as f64, -(j as f64) + 0.5));
        let s = CVec::from_fn(4, |i, _| c(0.25 * i as f64, 1.0));
        let w = CVec::from_fn(2, |i, _| c(-1.0, i as f64));
        let f = DesignFile::new(&v, &s, &w);
        assert_eq!(f.v[2][1], [2.0, -0.5]);
        let back: DesignFile = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        let (v2, s2, w2) = back.matrices().unwrap();
        assert_eq!((v2, s2, w2), (v, s, w));
    }

    #[test]
    fn matrix_json_is_row_major() {
        let m = CMat::from_fn(2, 2, |i, j| c((2 * i + j) as f64, 0.0));
        let j = matrix_json(&m);
        assert_eq!(j["data"][1][0], 1.0);
        assert_eq!(j["data"][2][0], 2.0);
    }

    #[test]
    fn record_has_every_field() {
        let id = CMat::identity(2, 2);
        let r = SdpRecord {
            name: "p".into(),
            objective: id.clone(),
            maximize: true,
            denominator: Some((id.clone(), 1.0)),
            constraints: vec![TraceConstraint::new(id.clone(), Sense::Le, 3.0)],
            solution: id,
        };
        let j = record_json(&r);
        assert_eq!(j["sense"], "maximize");
        assert_eq!(j["constraints"][0]["sense"], "<=");
        assert_eq!(j["denominator"]["c"], 1.0);
    }
}
