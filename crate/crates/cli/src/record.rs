//! Output records. JSON carries everything; CSV carries the flat fields of
//! the same record, formatted identically.

use serde::{Deserialize, Serialize};
use weil_core::{
    CensusCounts, ClassCount, PrimePower, SweepRow, VolumeEstimate, ENUMERATION_ORDER_VERSION,
};

use crate::error::{CliError, Result};

pub const SCHEMA: &str = "weil-census/1";

pub const CENSUS_HEADER: [&str; 14] = [
    "g",
    "p",
    "r",
    "q",
    "ell",
    "residues",
    "total",
    "ordinary",
    "prime_sub",
    "lambda2",
    "congruence_total",
    "congruence_ordinary",
    "congruence_classes",
    "residue_count",
];

pub const SWEEP_HEADER: [&str; 10] = [
    "r",
    "q",
    "total",
    "congruence_total",
    "d_frac",
    "e_frac",
    "dev_d",
    "dev_e",
    "sqrt_q_dev_d",
    "sqrt_q_dev_e",
];

pub const VOLUME_HEADER: [&str; 9] = [
    "g",
    "samples",
    "seed",
    "generator",
    "box_scale",
    "box_volume",
    "hits",
    "mean",
    "std_err",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
    pub cached: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record<P, R> {
    pub schema: String,
    pub command: String,
    pub parameters: P,
    pub results: R,
    pub timing: Timing,
    pub tool_version: String,
    pub enumeration_order_version: u32,
}

impl<P, R> Record<P, R> {
    pub fn new(command: &str, parameters: P, results: R, timing: Timing) -> Self {
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            parameters,
            results,
            timing,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            enumeration_order_version: ENUMERATION_ORDER_VERSION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusParameters {
    pub g: usize,
    pub p: u64,
    pub r: u32,
    pub q: u128,
    pub ell: u64,
    pub residues: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub m: Vec<u64>,
    pub total: u64,
    pub ordinary: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusResults {
    pub total: u64,
    pub ordinary: u64,
    pub prime_sub: u64,
    pub lambda2: u64,
    pub congruence_total: u64,
    pub congruence_ordinary: u64,
    pub congruence_classes: u64,
    pub residue_count: Option<u64>,
    pub classes: Vec<ClassRecord>,
}

pub type CensusRecord = Record<CensusParameters, CensusResults>;

pub fn q_u128(q: &PrimePower) -> Result<u128> {
    u128::try_from(q.q()).map_err(|_| CliError::Weil(weil_core::WeilError::BoxTooLarge))
}

impl CensusResults {
    pub fn from_counts(c: &CensusCounts, residues: Option<&[u64]>) -> Self {
        Self {
            total: c.total,
            ordinary: c.ordinary,
            prime_sub: c.prime_sub,
            lambda2: c.lambda2,
            congruence_total: c.congruence_total,
            congruence_ordinary: c.congruence_ordinary,
            congruence_classes: c.congruence_classes,
            residue_count: residues.and_then(|m| c.class(m)).map(|k| k.total),
            classes: c
                .per_residue
                .iter()
                .map(|k| ClassRecord {
                    m: k.m.clone(),
                    total: k.total,
                    ordinary: k.ordinary,
                })
                .collect(),
        }
    }

    pub fn to_counts(&self, g: usize, q: &PrimePower, ell: u64) -> CensusCounts {
        CensusCounts {
            g,
            q: q.clone(),
            ell,
            total: self.total,
            ordinary: self.ordinary,
            prime_sub: self.prime_sub,
            lambda2: self.lambda2,
            per_residue: self
                .classes
                .iter()
                .map(|k| ClassCount {
                    m: k.m.clone(),
                    total: k.total,
                    ordinary: k.ordinary,
                })
                .collect(),
            congruence_total: self.congruence_total,
            congruence_ordinary: self.congruence_ordinary,
            congruence_classes: self.congruence_classes,
        }
    }
}

pub fn join_residues(m: &[u64]) -> String {
    m.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn census_row(rec: &CensusRecord) -> Vec<String> {
    let (p, r) = (&rec.parameters, &rec.results);
    vec![
        p.g.to_string(),
        p.p.to_string(),
        p.r.to_string(),
        p.q.to_string(),
        p.ell.to_string(),
        p.residues.as_deref().map(join_residues).unwrap_or_default(),
        r.total.to_string(),
        r.ordinary.to_string(),
        r.prime_sub.to_string(),
        r.lambda2.to_string(),
        r.congruence_total.to_string(),
        r.congruence_ordinary.to_string(),
        r.congruence_classes.to_string(),
        opt(r.residue_count),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepParameters {
    pub g: usize,
    pub p: u64,
    pub ell: u64,
    pub rmin: u32,
    pub rmax: u32,
    pub residues: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRowRecord {
    pub r: u32,
    pub q: u128,
    pub total: u64,
    pub congruence_total: u64,
    pub class_total: u64,
    pub d_frac: f64,
    pub e_frac: f64,
    pub dev_d: f64,
    pub dev_e: f64,
    pub sqrt_q_dev_d: f64,
    pub sqrt_q_dev_e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResults {
    pub rows: Vec<SweepRowRecord>,
}

pub type SweepRecord = Record<SweepParameters, SweepResults>;

impl SweepRowRecord {
    pub fn from_row(row: &SweepRow) -> Result<Self> {
        Ok(Self {
            r: row.r,
            q: u128::try_from(&row.q)
                .map_err(|_| CliError::Weil(weil_core::WeilError::BoxTooLarge))?,
            total: row.total,
            congruence_total: row.congruence_total,
            class_total: row.class_total,
            d_frac: row.d_frac,
            e_frac: row.e_frac,
            dev_d: row.dev_d,
            dev_e: row.dev_e,
            sqrt_q_dev_d: row.sqrt_q_dev_d,
            sqrt_q_dev_e: row.sqrt_q_dev_e,
        })
    }

    pub fn csv(&self) -> Vec<String> {
        vec![
            self.r.to_string(),
            self.q.to_string(),
            self.total.to_string(),
            self.congruence_total.to_string(),
            fmt_f64(self.d_frac),
            fmt_f64(self.e_frac),
            fmt_f64(self.dev_d),
            fmt_f64(self.dev_e),
            fmt_f64(self.sqrt_q_dev_d),
            fmt_f64(self.sqrt_q_dev_e),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeParameters {
    pub g: usize,
    pub samples: u64,
    pub seed: u64,
    pub box_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeResults {
    pub generator: String,
    pub box_volume: f64,
    pub hits: u64,
    pub mean: f64,
    pub std_err: f64,
}

pub type VolumeRecord = Record<VolumeParameters, VolumeResults>;

impl VolumeRecord {
    pub fn from_estimate(v: &VolumeEstimate, timing: Timing) -> Self {
        Record::new(
            "volume",
            VolumeParameters {
                g: v.g,
                samples: v.samples,
                seed: v.seed,
                box_scale: v.box_scale,
            },
            VolumeResults {
                generator: v.generator.clone(),
                box_volume: v.box_volume,
                hits: v.hits,
                mean: v.mean,
                std_err: v.std_err,
            },
            timing,
        )
    }

    pub fn csv(&self) -> Vec<String> {
        let (p, r) = (&self.parameters, &self.results);
        vec![
            p.g.to_string(),
            p.samples.to_string(),
            p.seed.to_string(),
            r.generator.clone(),
            fmt_f64(p.box_scale),
            fmt_f64(r.box_volume),
            r.hits.to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.std_err),
        ]
    }
}

/// Shortest round-trip form, matching the JSON encoding of the same value.
pub fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 always serializes")
}
