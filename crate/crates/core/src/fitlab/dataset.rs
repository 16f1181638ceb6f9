use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_OBSERVATIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CsvLayout {
    /// `cable,wire,strength` rows; components are wires, groups are cables.
    Long,
    /// One column per component.
    Wide,
}

/// Positive observations per component, optionally tagged by group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeDataset {
    pub labels: Vec<String>,
    pub observations: Vec<Vec<f64>>,
    /// Group label of every observation, parallel to `observations`.
    pub groups: Option<Vec<Vec<String>>>,
    pub layout: CsvLayout,
}

fn check_value(v: f64, at: impl FnOnce() -> String) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Data(format!(
            "{}: observation {v} is not positive and finite",
            at()
        )))
    }
}

fn parse_cell(cell: &str, at: impl Fn() -> String) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::Data(format!("{}: cannot parse {cell:?} as a number", at())))?;
    check_value(v, at)
}

impl LifetimeDataset {
    pub fn from_columns(labels: Vec<String>, observations: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != observations.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: observations.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        for (label, col) in labels.iter().zip(&observations) {
            if col.is_empty() {
                return Err(Error::Data(format!("component {label} has no observations")));
            }
            for (i, &v) in col.iter().enumerate() {
                check_value(v, || format!("component {label}, row {}", i + 1))?;
            }
        }
        Ok(LifetimeDataset {
            labels,
            observations,
            groups: None,
            layout: CsvLayout::Wide,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file =
            std::fs::File::open(path).map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    /// Reads either layout; a header containing `wire` and `strength`
    /// selects the long layout, anything else is read as wide.
    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(r);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Data(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let lower: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
        let find = |name: &str| lower.iter().position(|h| h == name);
        let records = rdr
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Data(e.to_string()))?;
        if records.is_empty() {
            return Err(Error::Empty("CSV data rows"));
        }

        if let (Some(wi), Some(si)) = (find("wire"), find("strength")) {
            let ci = find("cable");
            let mut labels = Vec::new();
            let mut index = HashMap::new();
            let mut obs: Vec<Vec<f64>> = Vec::new();
            let mut groups: Vec<Vec<String>> = Vec::new();
            for (r, rec) in records.iter().enumerate() {
                let at = || format!("row {}", r + 2);
                let wire = rec
                    .get(wi)
                    .ok_or_else(|| Error::Data(format!("{}: missing wire", at())))?;
                let cell = rec
                    .get(si)
                    .ok_or_else(|| Error::Data(format!("{}: missing strength", at())))?;
                let v = parse_cell(cell, at)?;
                let k = *index.entry(wire.to_string()).or_insert_with(|| {
                    labels.push(wire.to_string());
                    obs.push(Vec::new());
                    groups.push(Vec::new());
                    labels.len() - 1
                });
                obs[k].push(v);
                let g = ci.and_then(|c| rec.get(c)).unwrap_or("").to_string();
                groups[k].push(g);
            }
            return Ok(LifetimeDataset {
                labels,
                observations: obs,
                groups: ci.map(|_| groups),
                layout: CsvLayout::Long,
            });
        }

        let mut obs = vec![Vec::new(); header.len()];
        for (r, rec) in records.iter().enumerate() {
            for (j, cell) in rec.iter().enumerate().take(header.len()) {
                if cell.is_empty() {
                    continue;
                }
                obs[j].push(parse_cell(cell, || format!("row {}, column {}", r + 2, header[j]))?);
            }
        }
        let mut ds = Self::from_columns(header, obs)?;
        ds.layout = CsvLayout::Wide;
        Ok(ds)
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn total(&self) -> usize {
        self.observations.iter().map(Vec::len).sum()
    }

    pub fn component(&self, label: &str) -> Result<&[f64]> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.observations[i].as_slice())
            .ok_or_else(|| Error::Data(format!("no component labelled {label:?}")))
    }

    /// All observations in one sample.
    pub fn pooled(&self) -> Vec<f64> {
        self.observations.concat()
    }

    pub fn ensure_fittable(&self) -> Result<()> {
        for (label, col) in self.labels.iter().zip(&self.observations) {
            if col.len() < MIN_FIT_OBSERVATIONS {
                return Err(Error::Data(format!(
                    "component {label} has {} observations, at least {MIN_FIT_OBSERVATIONS} are needed",
                    col.len()
                )));
            }
        }
        Ok(())
    }

    /// Columns aligned row by row, for copula work. With group labels the
    /// rows are the groups in order of first appearance and every component
    /// must be observed exactly once per group; otherwise all components
    /// must have equal length.
    pub fn matrix(&self) -> Result<Vec<Vec<f64>>> {
        let Some(groups) = &self.groups else {
            let n = self.observations[0].len();
            for col in &self.observations {
                if col.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: col.len(),
                    });
                }
            }
            return Ok(self.observations.clone());
        };
        let mut order: Vec<&str> = Vec::new();
        for g in groups.iter().flatten() {
            if !order.contains(&g.as_str()) {
                order.push(g);
            }
        }
        let mut cols = Vec::with_capacity(self.dimension());
        for ((label, col), gs) in self.labels.iter().zip(&self.observations).zip(groups) {
            let mut out = Vec::with_capacity(order.len());
            for g in &order {
                let hits: Vec<f64> = gs.iter().zip(col).filter(|(h, _)| h == g).map(|(_, &v)| v).collect();
                if hits.len() != 1 {
                    return Err(Error::Data(format!(
                        "component {label} has {} observations in group {g}, expected exactly one",
                        hits.len()
                    )));
                }
                out.push(hits[0]);
            }
            cols.push(out);
        }
        Ok(cols)
    }
}
