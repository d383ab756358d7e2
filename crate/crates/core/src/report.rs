//! Machine-readable run reports: JSON with sorted keys, spectrum CSV and
//! edge lists.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::cayley::{ClosedFormCheck, PstCertificate, SpectrumTable};
use crate::ctqw::TransferCheck;
use crate::error::Result;
use crate::gf::FieldTower;
use crate::graph::Graph;
use crate::orbital::{OrbitalFormulaCheck, OrbitalSpectrum};

pub const SCHEMA: &str = "pst-report/1";

/// The field choices a run depends on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub q: u32,
    pub base_modulus: String,
    pub ext_modulus: String,
    /// generators as polynomials in x over F_p
    pub base_generator: String,
    pub ext_generator: String,
    /// the non-square Δ of F_q and its square root in F_{q²}
    pub delta: String,
    pub sqrt_delta: String,
}

impl FieldInfo {
    pub fn of(t: &FieldTower) -> Self {
        let (b, e) = (t.base(), t.ext());
        FieldInfo {
            p: t.p(),
            q: t.q(),
            base_modulus: b.modulus_string(),
            ext_modulus: e.modulus_string(),
            base_generator: b.format(b.generator()),
            ext_generator: e.format(e.generator()),
            delta: b.format(t.delta()),
            sqrt_delta: e.format(t.sqrt_delta()),
        }
    }
}

/// One brute-force or structural validation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CrossCheck {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CrossCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConnectionSetInfo {
    pub variant: String,
    pub classes: Vec<String>,
    pub size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitalInfo {
    /// ζ with z = ζI
    pub zeta: String,
    pub rep_set: Vec<String>,
    pub cosets: u64,
    pub explicit: bool,
    pub d_part_divisible_by_four: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SpectrumSection {
    Cayley(SpectrumTable),
    Orbital(OrbitalSpectrum),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FormulaChecks {
    Cayley(Vec<ClosedFormCheck>),
    Orbital(Vec<OrbitalFormulaCheck>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub family: String,
    pub q: u32,
    pub fields: FieldInfo,
    pub connection_set: Option<ConnectionSetInfo>,
    pub orbital: Option<OrbitalInfo>,
    pub spectrum: SpectrumSection,
    pub certificate: PstCertificate,
    pub simulation: Option<TransferCheck>,
    pub cross_checks: Vec<CrossCheck>,
    pub formula_checks: FormulaChecks,
    pub errata: Vec<String>,
    pub notes: Vec<String>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;
pub const EXIT_CROSS_CHECK: i32 = 3;

impl Report {
    pub fn cross_checks_pass(&self) -> bool {
        self.cross_checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if !self.certificate.valid {
            EXIT_CERTIFICATE
        } else if !self.cross_checks_pass() {
            EXIT_CROSS_CHECK
        } else {
            EXIT_OK
        }
    }

    /// Pretty JSON with lexicographically sorted keys and a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        // serde_json::Value keeps object keys in a BTreeMap
        let v = serde_json::to_value(self)?;
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        Ok(s)
    }

    pub fn spectrum_csv(&self) -> Result<String> {
        match &self.spectrum {
            SpectrumSection::Cayley(t) => cayley_csv(t),
            SpectrumSection::Orbital(s) => orbital_csv(s),
        }
    }
}

const CSV_HEADER: [&str; 8] = [
    "family",
    "q",
    "char-kind",
    "char-params",
    "degree",
    "theta",
    "multiplicity",
    "phi-sign",
];

fn sign_str(s: i64) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

pub fn cayley_csv(t: &SpectrumTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &t.rows {
        w.write_record([
            t.family.to_string(),
            t.q.to_string(),
            r.kind.clone(),
            r.params.clone(),
            r.degree.to_string(),
            r.theta.to_string(),
            r.multiplicity.to_string(),
            sign_str(r.sign).into(),
        ])?;
    }
    finish(w)
}

/// As [`cayley_csv`] with an extra column for the eigenvalue of D.
pub fn orbital_csv(s: &OrbitalSpectrum) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = CSV_HEADER.to_vec();
    header.push("d-part");
    w.write_record(&header)?;
    for r in &s.rows {
        w.write_record([
            "orbital".to_string(),
            s.q.to_string(),
            r.kind.clone(),
            r.params.clone(),
            r.degree.to_string(),
            r.theta.to_string(),
            r.multiplicity.to_string(),
            sign_str(r.sign).into(),
            r.e.to_string(),
        ])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| crate::error::Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// "u v" per edge, u < v, sorted.
pub fn edge_list(g: &Graph) -> String {
    let mut s = String::new();
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}
