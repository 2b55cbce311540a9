//! Check results, verification reports, and their JSON/CSV encodings.
//!
//! JSON floats are written with 17 significant digits so every value
//! round-trips exactly; non-finite values become `null`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constants::{ConstantsTable, OmegaConvention};
use crate::dirac::KernelConvention;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Non-finite floats are written as `null`; read them back as NaN.
fn nullable_f64<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// How `lhs` and `rhs` combine into a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckForm {
    /// `lhs <= rhs` with `rhs > 0`; ratio `lhs / rhs`.
    Multiplicative,
    /// `lhs <= rhs` for quantities of either sign; ratio `exp(lhs − rhs)`.
    Exponential,
    /// `lhs` is an error, `rhs` the allowed error; ratio `lhs / rhs`.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub extent: f64,
}

impl From<&GridSpec> for GridMeta {
    fn from(g: &GridSpec) -> Self {
        Self { n: g.n(), points: g.points(), extent: g.extent() }
    }
}

/// Conventions in force when a number was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionFlags {
    pub omega_variant: OmegaConvention,
    /// Kernel sign, when a kernel convention has been resolved.
    pub kernel_sign: Option<crate::dirac::KernelSign>,
    /// ω_n normalising the kernel, when resolved.
    pub kernel_omega: Option<OmegaConvention>,
}

impl ConventionFlags {
    pub fn new(omega: OmegaConvention, kernel: Option<KernelConvention>) -> Self {
        Self { omega_variant: omega, kernel_sign: kernel.map(|k| k.sign), kernel_omega: kernel.map(|k| k.omega) }
    }
}

/// Outcome of one inequality or identity check on one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub case_id: String,
    pub form: CheckForm,
    #[serde(deserialize_with = "nullable_f64")]
    pub lhs: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub rhs: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub ratio: f64,
    #[serde(deserialize_with = "nullable_f64")]
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid: GridMeta,
    pub conventions: ConventionFlags,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_time: f64,
}

/// Ratio for `form`; a zero right side with a nonpositive left side counts as 0.
pub fn check_ratio(form: CheckForm, lhs: f64, rhs: f64) -> f64 {
    match form {
        CheckForm::Exponential => (lhs - rhs).exp(),
        CheckForm::Multiplicative | CheckForm::Identity => {
            if rhs == 0.0 {
                if lhs <= 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                lhs / rhs
            }
        }
    }
}

impl CheckResult {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        check_id: impl Into<String>,
        case_id: impl Into<String>,
        form: CheckForm,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        grid: GridMeta,
        conventions: ConventionFlags,
    ) -> Self {
        let ratio = check_ratio(form, lhs, rhs);
        let pass = ratio.is_finite() && ratio <= 1.0 + tolerance || ratio == f64::NEG_INFINITY;
        Self {
            check_id: check_id.into(),
            case_id: case_id.into(),
            form,
            lhs,
            rhs,
            ratio,
            margin: 1.0 - ratio,
            tolerance,
            pass,
            grid,
            conventions,
            extras: BTreeMap::new(),
            note: None,
            wall_time: 0.0,
        }
    }

    /// A case that could not be evaluated; always a failure.
    pub fn errored(check_id: impl Into<String>, case_id: impl Into<String>, grid: GridMeta, conventions: ConventionFlags, err: &Error) -> Self {
        let mut r = Self::new(check_id, case_id, CheckForm::Multiplicative, f64::NAN, f64::NAN, 0.0, grid, conventions);
        r.pass = false;
        r.note = Some(err.to_string());
        r
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Force a failure while keeping the numbers.
    pub fn fail_with(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    #[serde(deserialize_with = "nullable_f64")]
    pub min_margin: f64,
}

impl Summary {
    pub fn of(results: &[CheckResult]) -> Self {
        let pass = results.iter().filter(|r| r.pass).count();
        let min_margin = results.iter().map(|r| r.margin).filter(|m| !m.is_nan()).fold(f64::INFINITY, f64::min);
        Self { pass, fail: results.len() - pass, min_margin }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub grid: GridMeta,
    pub conventions: ConventionFlags,
    pub constants: ConstantsTable,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub timestamp: u64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_17(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(format!("malformed report: {e}")))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_results_csv(&self.results, std::fs::File::create(path)?)
    }
}

/// Current time as whole seconds since the Unix epoch.
pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Pretty JSON with every float in `{:.16e}` form.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if num.is_f64() {
                let x = num.as_f64().unwrap_or(f64::NAN);
                if x.is_finite() {
                    out.push_str(&format!("{x:.16e}"));
                } else {
                    out.push_str("null");
                }
            } else {
                out.push_str(&num.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Keys whose values change from run to run.
pub const VOLATILE_KEYS: [&str; 2] = ["timestamp", "wall_time"];

/// Remove [`VOLATILE_KEYS`] at every depth.
pub fn strip_volatile(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for k in VOLATILE_KEYS {
                map.remove(k);
            }
            map.values_mut().for_each(strip_volatile);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}

/// Serialise a report with volatile fields removed, for reproducibility comparisons.
pub fn canonical_report_text(json: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(json).map_err(|e| Error::Io(format!("malformed report: {e}")))?;
    strip_volatile(&mut v);
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    Ok(out)
}

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// One CSV row per result.
pub fn write_results_csv<W: Write>(results: &[CheckResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["check_id", "case_id", "form", "lhs", "rhs", "ratio", "margin", "tolerance", "pass", "n", "N", "L", "note"])?;
    for r in results {
        let form = match r.form {
            CheckForm::Multiplicative => "multiplicative",
            CheckForm::Exponential => "exponential",
            CheckForm::Identity => "identity",
        };
        w.write_record([
            r.check_id.clone(),
            r.case_id.clone(),
            form.to_string(),
            fmt17(r.lhs),
            fmt17(r.rhs),
            fmt17(r.ratio),
            fmt17(r.margin),
            fmt17(r.tolerance),
            r.pass.to_string(),
            r.grid.n.to_string(),
            r.grid.points.to_string(),
            fmt17(r.grid.extent),
            r.note.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(check_id, case_id, ratio, margin)` rows sorted by ascending margin.
pub fn write_plot_csv<W: Write>(results: &[CheckResult], writer: W) -> Result<()> {
    let mut rows: Vec<&CheckResult> = results.iter().collect();
    rows.sort_by(|a, b| a.margin.total_cmp(&b.margin).then_with(|| a.check_id.cmp(&b.check_id)).then_with(|| a.case_id.cmp(&b.case_id)));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["check_id", "case_id", "ratio", "margin"])?;
    for r in rows {
        w.write_record([r.check_id.clone(), r.case_id.clone(), fmt17(r.ratio), fmt17(r.margin)])?;
    }
    w.flush()?;
    Ok(())
}
