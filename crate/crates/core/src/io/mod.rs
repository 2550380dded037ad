// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Configuration, trial files, reports and plot data.
//!
//! Trial files are JSON lines: a header object followed by one record per
//! trial in trial order. Reports and channel documents are JSON; experiment
//! configurations are TOML.

mod channel_doc;
mod plot;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{Contour, DiagnosticVerdict, LinearInversion, MLFit, ParityAccumulator, ParityEstimate, SubsetPolicy};
use crate::omega::union_bound_sample_size;
use crate::twirl::{ProtocolConfig, SpamModel, TrialRecord, Variant};

pub use channel_doc::{ChannelDocument, ChannelRef, ChannelSpec};
pub use plot::{emit_plot_data, PlotKind};

/// Version written into every document; readers reject anything else.
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn check_version(what: &str, found: u32) -> Result<()> {
    if found == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::SchemaVersion {
            expected: format!("{what} v{FORMAT_VERSION}"),
            found: format!("{what} v{found}"),
        })
    }
}

/// Flip probability given once for every qubit or per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlipSpec {
    Uniform(f64),
    PerQubit(Vec<f64>),
}

impl FlipSpec {
    fn expand(&self, n: usize) -> Vec<f64> {
        match self {
            FlipSpec::Uniform(p) => vec![*p; n],
            FlipSpec::PerQubit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamConfig {
    #[serde(default = "no_flips")]
    pub prep: FlipSpec,
    #[serde(default = "no_flips")]
    pub meas: FlipSpec,
}

fn no_flips() -> FlipSpec {
    FlipSpec::Uniform(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub delta: f64,
    pub epsilon: f64,
}

/// TOML experiment description for `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub n: usize,
    pub channel: ChannelRef,
    pub variant: Variant,
    /// Trials per input configuration; derived from `targets` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spam: Option<SpamConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Targets>,
    pub output: PathBuf,
    /// Also write a reference run (noise omitted) here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        check_version("config", cfg.format_version)?;
        Ok(cfg)
    }

    /// Reads a config; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.output = base.join(&cfg.output);
        cfg.reference_output = cfg.reference_output.map(|p| base.join(p));
        if let ChannelRef::File { file } = &cfg.channel {
            cfg.channel = ChannelRef::File { file: base.join(file) };
        }
        Ok(cfg)
    }

    pub fn trials(&self) -> Result<usize> {
        match (self.trials, self.targets) {
            (Some(0), _) => Err(Error::InvalidArgument("trials must be at least 1".into())),
            (Some(k), _) => Ok(k),
            (None, Some(t)) => Ok(union_bound_sample_size(self.n, t.delta, t.epsilon)? as usize),
            (None, None) => Err(Error::MissingSection("trials or targets".into())),
        }
    }

    pub fn protocol(&self) -> Result<ProtocolConfig> {
        let channel = self.channel.load(Path::new("."))?.build()?;
        Error::check_size(self.n, channel.num_qubits())?;
        let mut cfg = ProtocolConfig::new(channel, self.variant, self.trials()?, self.master_seed);
        if let Some(spam) = &self.spam {
            cfg = cfg.with_spam(SpamModel {
                prep: spam.prep.expand(self.n),
                meas: spam.meas.expand(self.n),
            });
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    Trials,
    Report,
}

/// First line of a trial file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialHeader {
    pub format_version: u32,
    pub kind: DocumentKind,
    pub n: usize,
    pub variant: Variant,
    /// Trials per input configuration.
    pub trials: usize,
    pub records: usize,
    pub master_seed: u64,
    pub reference: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spam: Option<SpamModel>,
}

impl TrialHeader {
    pub fn for_run(cfg: &ProtocolConfig, records: usize, reference: bool) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            kind: DocumentKind::Trials,
            n: cfg.num_qubits(),
            variant: cfg.variant,
            trials: cfg.trials,
            records,
            master_seed: cfg.master_seed,
            reference,
            spam: cfg.spam.clone(),
        }
    }

    fn check(&self) -> Result<()> {
        check_version("trials", self.format_version)?;
        if self.kind != DocumentKind::Trials {
            return Err(Error::SchemaVersion {
                expected: "trials".into(),
                found: format!("{:?}", self.kind).to_lowercase(),
            });
        }
        Ok(())
    }
}

pub fn write_trials<W: Write>(out: W, header: &TrialHeader, records: &[TrialRecord]) -> Result<()> {
    let mut out = BufWriter::new(out);
    serde_json::to_writer(&mut out, header)?;
    out.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trials_file(path: &Path, header: &TrialHeader, records: &[TrialRecord]) -> Result<()> {
    write_trials(File::create(path)?, header, records)
}

/// Streaming reader over a trial file.
pub struct TrialReader<R> {
    header: TrialHeader,
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> TrialReader<R> {
    pub fn new(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let first = lines.next().ok_or(Error::EmptyRecords)??;
        let header: TrialHeader = serde_json::from_str(&first)
            .map_err(|e| Error::Parse(format!("trial file header: {e}")))?;
        header.check()?;
        Ok(Self {
            header,
            lines,
            line_no: 1,
        })
    }

    pub fn header(&self) -> &TrialHeader {
        &self.header
    }
}

impl TrialReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        Self::new(BufReader::new(File::open(path)?))
    }
}

impl<R: BufRead> Iterator for TrialReader<R> {
    type Item = Result<TrialRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let n = self.header.n;
            let line_no = self.line_no;
            return Some(
                serde_json::from_str::<TrialRecord>(&line)
                    .map_err(|e| Error::Parse(format!("line {line_no}: {e}")))
                    .and_then(|r| {
                        Error::check_size(n, r.num_qubits())?;
                        r.validate()?;
                        Ok(r)
                    }),
            );
        }
    }
}

/// Reads a whole trial file into memory.
pub fn read_trials(path: &Path) -> Result<(TrialHeader, Vec<TrialRecord>)> {
    let reader = TrialReader::open(path)?;
    let header = reader.header().clone();
    let records = reader.collect::<Result<Vec<_>>>()?;
    Ok((header, records))
}

/// Folds a trial file into a parity estimate without holding the records.
pub fn estimate_from_file(path: &Path, policy: SubsetPolicy) -> Result<(TrialHeader, ParityEstimate)> {
    let reader = TrialReader::open(path)?;
    let header = reader.header().clone();
    let mut acc = ParityAccumulator::new(header.n, policy)?;
    for r in reader {
        acc.push(&r?)?;
    }
    if acc.records() as usize != header.records {
        return Err(Error::Parse(format!(
            "header announces {} records, file holds {}",
            header.records,
            acc.records()
        )));
    }
    if acc.is_reference().is_some_and(|r| r != header.reference) {
        return Err(Error::MixedVariants);
    }
    let est = acc.finish()?;
    if est.variant != header.variant {
        return Err(Error::MixedVariants);
    }
    Ok((header, est))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Linear,
    Mle,
}

/// Output of `estimate`; the input to `diagnose` and `plotdata`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub kind: DocumentKind,
    pub master_seed: u64,
    #[serde(rename = "K")]
    pub trials: u64,
    pub method: Method,
    #[serde(flatten)]
    pub estimate: ParityEstimate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_ref: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_ref_stderr: Option<Vec<f64>>,
    pub p_linear: Vec<f64>,
    pub p_linear_stderr: Vec<f64>,
    pub p_linear_nonphysical: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_mle: Option<Vec<f64>>,
    #[serde(rename = "logL", default, skip_serializing_if = "Option::is_none")]
    pub log_likelihood: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mle_iterations: Option<usize>,
    #[serde(default)]
    pub contours: Vec<Contour>,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticVerdict>,
}

impl Report {
    pub fn new(
        master_seed: u64,
        method: Method,
        estimate: ParityEstimate,
        reference: Option<&ParityEstimate>,
        linear: LinearInversion,
        mle: Option<MLFit>,
    ) -> Self {
        let (p_mle, log_likelihood, mle_iterations, contours) = match mle {
            Some(fit) => (
                Some(fit.p_hat.into_vec()),
                Some(fit.log_likelihood),
                Some(fit.iterations),
                fit.contours,
            ),
            None => (None, None, None, Vec::new()),
        };
        Self {
            format_version: FORMAT_VERSION,
            kind: DocumentKind::Report,
            master_seed,
            trials: estimate.trials(),
            method,
            c_ref: reference.map(|r| r.c_hat.clone()),
            c_ref_stderr: reference.map(|r| r.stderr.clone()),
            estimate,
            p_linear: linear.p,
            p_linear_stderr: linear.stderr,
            p_linear_nonphysical: linear.nonphysical,
            p_mle,
            log_likelihood,
            mle_iterations,
            contours,
            diagnostics: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.estimate.n
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses a report, refusing other versions or document kinds.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Probe {
            format_version: u32,
            kind: DocumentKind,
        }
        let probe: Probe = serde_json::from_str(text)?;
        check_version("report", probe.format_version)?;
        if probe.kind != DocumentKind::Report {
            return Err(Error::SchemaVersion {
                expected: "report".into(),
                found: "trials".into(),
            });
        }
        let report: Self = serde_json::from_str(text)?;
        report.estimate.validate()?;
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
