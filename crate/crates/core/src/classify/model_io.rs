//! Textual model files.
//!
//! Layout: a header line `hca-model <kind> <m> <V>` followed by rows of
//! tab-separated decimal reals printed with 17 significant digits, which
//! round-trips `f64` exactly. Row meanings per kind:
//!
//! * `nb`: smoothing; log priors (m); then m likelihood rows of V
//! * `maxent`: bias (m); then m lambda rows of V
//! * `svm`: regularization; bias (m); then m weight rows of V

use std::fs;
use std::path::Path;

use crate::classify::{maxent_predict, nb_predict, svm_predict};
use crate::classify::{MaxEntModel, NbModel, SvmModel};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::Scalar;

/// A trained classifier of any of the three kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<S: Scalar = f64> {
    Nb(NbModel<S>),
    MaxEnt(MaxEntModel<S>),
    Svm(SvmModel<S>),
}

fn format_real<S: Scalar>(value: S) -> String {
    let v = value.to_f64().expect("scalar converts to f64");
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn format_row<S: Scalar>(values: &[S]) -> String {
    values
        .iter()
        .map(|&v| format_real(v))
        .collect::<Vec<_>>()
        .join("\t")
}

struct RowReader<'a> {
    lines: std::str::Lines<'a>,
    path: &'a Path,
    line_no: usize,
}

impl<'a> RowReader<'a> {
    fn next_row<S: Scalar>(&mut self, expected_len: usize) -> Result<Vec<S>> {
        self.line_no += 1;
        let line = self
            .lines
            .next()
            .ok_or_else(|| Error::parse(self.path, self.line_no, "unexpected end of file"))?;
        let values: Vec<S> = line
            .split('\t')
            .map(|field| {
                field
                    .parse::<f64>()
                    .map(S::from_f64_lossy)
                    .map_err(|_| Error::parse(self.path, self.line_no, format!("bad real {field:?}")))
            })
            .collect::<Result<_>>()?;
        if values.len() != expected_len {
            return Err(Error::parse(
                self.path,
                self.line_no,
                format!("expected {expected_len} values, found {}", values.len()),
            ));
        }
        Ok(values)
    }
}

impl<S: Scalar> Model<S> {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Nb(_) => "nb",
            Model::MaxEnt(_) => "maxent",
            Model::Svm(_) => "svm",
        }
    }

    pub fn num_categories(&self) -> usize {
        match self {
            Model::Nb(m) => m.num_categories(),
            Model::MaxEnt(m) => m.num_categories(),
            Model::Svm(m) => m.num_categories(),
        }
    }

    pub fn vocab_size(&self) -> usize {
        match self {
            Model::Nb(m) => m.vocab_size,
            Model::MaxEnt(m) => m.vocab_size,
            Model::Svm(m) => m.vocab_size,
        }
    }

    /// What the per-class scores of [`Model::classify`] mean: normalized
    /// posteriors for nb/maxent, raw margins for svm.
    pub fn score_kind(&self) -> &'static str {
        match self {
            Model::Nb(_) | Model::MaxEnt(_) => "posterior",
            Model::Svm(_) => "margin",
        }
    }

    /// Predict one document: winning category index plus the emitted
    /// scores (posterior probabilities or margins per [`Model::score_kind`]).
    pub fn classify(&self, x: &FeatureVector) -> Result<(usize, Vec<S>)> {
        match self {
            Model::Nb(m) => {
                let (winner, log_posteriors) = nb_predict(m, x)?;
                Ok((winner, log_posteriors.iter().map(|&p| p.exp()).collect()))
            }
            Model::MaxEnt(m) => {
                let (winner, log_posteriors) = maxent_predict(m, x);
                Ok((winner, log_posteriors.iter().map(|&p| p.exp()).collect()))
            }
            Model::Svm(m) => Ok(svm_predict(m, x)),
        }
    }

    pub fn serialize(&self) -> String {
        let m = self.num_categories();
        let v = self.vocab_size();
        let mut out = format!("hca-model {} {m} {v}\n", self.kind());
        match self {
            Model::Nb(model) => {
                out.push_str(&format_real(model.smoothing));
                out.push('\n');
                out.push_str(&format_row(&model.log_priors));
                out.push('\n');
                for row in &model.log_likelihoods {
                    out.push_str(&format_row(row));
                    out.push('\n');
                }
            }
            Model::MaxEnt(model) => {
                out.push_str(&format_row(&model.bias));
                out.push('\n');
                for row in &model.lambdas {
                    out.push_str(&format_row(row));
                    out.push('\n');
                }
            }
            Model::Svm(model) => {
                out.push_str(&format_real(model.regularization));
                out.push('\n');
                out.push_str(&format_row(&model.bias));
                out.push('\n');
                for row in &model.weights {
                    out.push_str(&format_row(row));
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.serialize()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(content: &str, path: &Path) -> Result<Self> {
        let mut lines = content.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 4 || fields[0] != "hca-model" {
            return Err(Error::parse(
                path,
                1,
                "expected header `hca-model <kind> <m> <V>`",
            ));
        }
        let m: usize = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, 1, format!("bad category count {:?}", fields[2])))?;
        let v: usize = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, 1, format!("bad vocabulary size {:?}", fields[3])))?;
        if m == 0 {
            return Err(Error::parse(path, 1, "model has zero categories"));
        }
        let mut reader = RowReader {
            lines,
            path,
            line_no: 1,
        };
        let model = match fields[1] {
            "nb" => {
                let smoothing = reader.next_row::<S>(1)?[0];
                let log_priors = reader.next_row(m)?;
                let log_likelihoods = (0..m)
                    .map(|_| reader.next_row(v))
                    .collect::<Result<Vec<_>>>()?;
                Model::Nb(NbModel {
                    log_priors,
                    log_likelihoods,
                    smoothing,
                    vocab_size: v,
                })
            }
            "maxent" => {
                let bias = reader.next_row(m)?;
                let lambdas = (0..m)
                    .map(|_| reader.next_row(v))
                    .collect::<Result<Vec<_>>>()?;
                Model::MaxEnt(MaxEntModel {
                    lambdas,
                    bias,
                    vocab_size: v,
                })
            }
            "svm" => {
                let regularization = reader.next_row::<S>(1)?[0];
                let bias = reader.next_row(m)?;
                let weights = (0..m)
                    .map(|_| reader.next_row(v))
                    .collect::<Result<Vec<_>>>()?;
                Model::Svm(SvmModel {
                    weights,
                    bias,
                    regularization,
                    vocab_size: v,
                })
            }
            other => {
                return Err(Error::parse(
                    path,
                    1,
                    format!("unknown model kind {other:?}"),
                ))
            }
        };
        if reader.lines.next().is_some() {
            return Err(Error::parse(
                path,
                reader.line_no + 1,
                "trailing content after model rows",
            ));
        }
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&content, path)
    }
}
