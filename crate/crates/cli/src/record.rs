use std::fmt;
use std::io::Write;

use occupancy::asymptotics::{CParameter, ValidityReport};
use occupancy::{BinsModelParams, ProbEstimate, SubsetModelParams};
use serde::{Deserialize, Serialize};

use crate::cli::Format;

/// A real printed with 12 significant digits, or a string for non-finite
/// values so JSON stays valid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Finite(f64),
    Special(String),
}

impl Num {
    pub fn new(x: f64) -> Self {
        if x.is_finite() {
            Num::Finite(format!("{x:.11e}").parse().unwrap())
        } else if x.is_nan() {
            Num::Special("nan".into())
        } else if x > 0.0 {
            Num::Special("inf".into())
        } else {
            Num::Special("-inf".into())
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Finite(x) => write!(f, "{x}"),
            Num::Special(s) => f.write_str(s),
        }
    }
}

fn num(x: f64) -> Option<Num> {
    Some(Num::new(x))
}

/// One line of output. Field order is the JSON key order and the CSV
/// column order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub model: String,
    pub method: String,
    #[serde(rename = "N")]
    pub universe: Option<u64>,
    #[serde(rename = "S")]
    pub block_len: Option<u64>,
    #[serde(rename = "K")]
    pub subset_size: Option<u64>,
    #[serde(rename = "m")]
    pub balls: Option<u64>,
    #[serde(rename = "n")]
    pub bins: Option<u64>,
    #[serde(rename = "R")]
    pub min_hits: Option<u64>,
    pub a: Option<Num>,
    pub target_prob: Option<Num>,
    pub value: Option<Num>,
    pub lower: Option<Num>,
    pub upper: Option<Num>,
    pub exact: Option<String>,
    pub c: Option<Num>,
    pub log_c: Option<Num>,
    pub ratio_a: Option<Num>,
    pub ratio_b: Option<Num>,
    pub ratio_c1: Option<Num>,
    pub ratio_c2: Option<Num>,
    pub alpha: Option<Num>,
    pub class_a: Option<String>,
    pub class_b: Option<String>,
    pub class_c1: Option<String>,
    pub class_c2: Option<String>,
    pub r_over_sqrt: Option<Num>,
    pub m_over_n2: Option<Num>,
    pub nr_over_m: Option<Num>,
    pub class_r: Option<String>,
    pub class_m: Option<String>,
    pub class_nr: Option<String>,
    pub validity: Option<String>,
    pub note: Option<String>,
    pub runtime_ms: Option<u64>,
}

impl OutputRecord {
    pub fn subset(p: &SubsetModelParams, method: &str) -> Self {
        OutputRecord {
            model: "subset".into(),
            method: method.into(),
            universe: Some(p.universe),
            block_len: Some(p.block_len),
            subset_size: Some(p.subset_size),
            min_hits: Some(p.min_hits),
            ..Default::default()
        }
    }

    pub fn bins(p: &BinsModelParams, method: &str) -> Self {
        OutputRecord {
            model: "bins".into(),
            method: method.into(),
            balls: Some(p.balls),
            bins: Some(p.bins),
            min_hits: Some(p.min_load),
            ..Default::default()
        }
    }

    pub fn with_estimate(mut self, est: &ProbEstimate) -> Self {
        self.value = num(est.value);
        self.lower = est.lower.and_then(num);
        self.upper = est.upper.and_then(num);
        self.exact = est.rational.as_ref().map(|q| format!("{}/{}", q.numer(), q.denom()));
        if !est.meta.is_empty() {
            self.push_note(
                &est.meta
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
        }
        self
    }

    pub fn with_c(mut self, c: &CParameter) -> Self {
        self.c = num(c.c);
        self.log_c = c.log_c.and_then(num);
        for w in &c.warnings {
            self.push_note(w);
        }
        self
    }

    pub fn with_validity(mut self, v: &ValidityReport) -> Self {
        if let Some(s) = &v.subset {
            self.ratio_a = num(s.ratio_a);
            self.ratio_b = num(s.ratio_b);
            self.ratio_c1 = num(s.ratio_c1);
            self.ratio_c2 = num(s.ratio_c2);
            self.alpha = num(s.alpha);
            self.class_a = Some(s.class_a.as_str().into());
            self.class_b = Some(s.class_b.as_str().into());
            self.class_c1 = Some(s.class_c1.as_str().into());
            self.class_c2 = Some(s.class_c2.as_str().into());
        }
        if let Some(b) = &v.bins {
            self.r_over_sqrt = num(b.r_over_sqrt);
            self.m_over_n2 = num(b.m_over_n2);
            self.nr_over_m = num(b.nr_over_m);
            self.class_r = Some(b.class_r.as_str().into());
            self.class_m = Some(b.class_m.as_str().into());
            self.class_nr = Some(b.class_nr.as_str().into());
        }
        self.validity = Some(v.worst().as_str().into());
        self
    }

    pub fn push_note(&mut self, text: &str) {
        match &mut self.note {
            Some(n) => {
                n.push(';');
                n.push_str(text);
            }
            None => self.note = Some(text.to_string()),
        }
    }

    fn params_label(&self) -> String {
        let mut parts = Vec::new();
        for (name, v) in [
            ("N", self.universe),
            ("S", self.block_len),
            ("K", self.subset_size),
            ("m", self.balls),
            ("n", self.bins),
            ("R", self.min_hits),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if let Some(a) = &self.a {
            parts.push(format!("a={a}"));
        }
        parts.join(" ")
    }
}

fn cell(x: &Option<Num>) -> String {
    match x {
        None => "-".into(),
        Some(Num::Finite(v)) if *v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e7) => format!("{v:.6e}"),
        Some(Num::Finite(v)) => format!("{:.10}", v).trim_end_matches('0').trim_end_matches('.').to_string(),
        Some(v) => v.to_string(),
    }
}

pub fn write_records(out: &mut impl Write, records: &[OutputRecord], format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Table => {
            let rows: Vec<[String; 8]> = records
                .iter()
                .map(|r| {
                    [
                        r.model.clone(),
                        r.params_label(),
                        r.method.clone(),
                        cell(&r.value),
                        cell(&r.lower),
                        cell(&r.upper),
                        cell(&r.c),
                        r.validity.clone().unwrap_or_else(|| "-".into()),
                    ]
                })
                .collect();
            let head = ["model", "params", "method", "value", "lower", "upper", "c", "validity"];
            let mut widths = head.map(str::len);
            for row in &rows {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(out, "{}", line(head.to_vec()))?;
            for row in &rows {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
            }
            for r in records.iter().filter(|r| r.note.is_some()) {
                writeln!(out, "# {} {}: {}", r.method, r.params_label(), r.note.as_deref().unwrap())?;
            }
        }
    }
    Ok(())
}
