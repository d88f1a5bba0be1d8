//! State files (JSON, complex entries as `[re, im]`, written as hex floats)
//! and input digests.

use std::path::Path;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::certificate::{Certificate, ProductTerm, Revalidation, Verdict, Witness, WitnessKind};
use crate::criteria::SearchBudget;
use crate::families::FixtureSpec;
use crate::linalg::{c, CMatrix, CVector, C64};
use crate::product_search::Subspace;
use crate::state::BipartiteState;
use crate::tolerance::ToleranceConfig;
use crate::tripartite::TripartitePure;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Exact hexadecimal rendering, e.g. `0x1.8p+1` for 3.
pub fn format_hex(x: f64) -> String {
    assert!(x.is_finite(), "hex floats are only written for finite values");
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let dot = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    format!("{sign}0x{lead}{dot}p{exp:+}")
}

/// Inverse of [`format_hex`]; accepts any `[-]0x<hex>[.<hex>]p<exp>`.
pub fn parse_hex(s: &str) -> Option<f64> {
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp.parse().ok()?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let digits = digits.trim_start_matches('0');
    if digits.len() > 15 {
        return None;
    }
    let m = if digits.is_empty() { 0 } else { u64::from_str_radix(digits, 16).ok()? };
    if m >= 1 << 53 {
        return None;
    }
    let e = exp - 4 * frac.len() as i64;
    if !(-2200..=2200).contains(&e) {
        return None;
    }
    let half = (e / 2) as i32;
    let v = m as f64 * 2f64.powi(half) * 2f64.powi(e as i32 - half);
    v.is_finite().then_some(if neg { -v } else { v })
}

/// A real number in a state file: JSON number or hex-float string.
#[derive(Clone, Copy, Debug)]
struct Real(f64);

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<'a> {
            Num(f64),
            Str(&'a str),
            Owned(String),
        }
        let x = match Raw::deserialize(d)? {
            Raw::Num(x) => x,
            Raw::Str(s) => parse_hex(s).ok_or_else(|| de::Error::custom(format!("invalid hex float {s:?}")))?,
            Raw::Owned(s) => parse_hex(&s).ok_or_else(|| de::Error::custom(format!("invalid hex float {s:?}")))?,
        };
        if !x.is_finite() {
            return Err(de::Error::custom("non-finite number"));
        }
        Ok(Real(x))
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
struct Entry(Real, Real);

impl Entry {
    fn value(self) -> C64 {
        c(self.0 .0, self.1 .0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bipartite,
    Tripartite,
    Subspace,
    Fixture,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverride {
    pub rank_tol_factor: Option<f64>,
    pub psd_tol: Option<f64>,
    pub residual_tol: Option<f64>,
}

impl ToleranceOverride {
    pub fn apply(&self, base: ToleranceConfig) -> Result<ToleranceConfig> {
        ToleranceConfig::new(
            self.rank_tol_factor.unwrap_or(base.rank_tol_factor),
            self.psd_tol.unwrap_or(base.psd_tol),
            self.residual_tol.unwrap_or(base.residual_tol),
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile<'a> {
    version: u32,
    kind: Kind,
    #[serde(default)]
    dims: Vec<usize>,
    #[serde(borrow)]
    data: &'a RawValue,
    #[serde(default)]
    tolerance: Option<ToleranceOverride>,
}

#[derive(Clone, Debug)]
pub enum StateData {
    Bipartite(BipartiteState),
    Tripartite(TripartitePure),
    Subspace(Subspace),
    Fixture(FixtureSpec),
}

#[derive(Clone, Debug)]
pub struct LoadedFile {
    pub data: StateData,
    pub tolerance: Option<ToleranceOverride>,
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    let hex: String = d.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
    (line, col)
}

fn positioned(e: serde_json::Error, src: &str, base: usize) -> Error {
    let (l0, c0) = line_col(src, base);
    let (line, column) = if e.line() <= 1 { (l0, c0 + e.column().saturating_sub(1)) } else { (l0 + e.line() - 1, e.column()) };
    let msg = e.to_string();
    let message = msg.split(" at line ").next().unwrap_or(&msg).to_string();
    Error::Parse { line, column, message }
}

fn parse_part<'a, T: Deserialize<'a>>(raw: &'a RawValue, src: &str) -> Result<T> {
    let base = raw.get().as_ptr() as usize - src.as_ptr() as usize;
    serde_json::from_str(raw.get()).map_err(|e| positioned(e, src, base))
}

fn expect_dims(dims: &[usize], n: usize, kind: &str) -> Result<()> {
    if dims.len() != n || dims.contains(&0) {
        return Err(Error::Format(format!("{kind} files need {n} positive dims, got {dims:?}")));
    }
    Ok(())
}

/// Parse a state file; errors carry line and column.
pub fn parse_state_file(src: &str) -> Result<LoadedFile> {
    let raw: RawFile = serde_json::from_str(src).map_err(|e| positioned(e, src, 0))?;
    if raw.version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {}", raw.version)));
    }
    let tol = match &raw.tolerance {
        Some(o) => o.apply(ToleranceConfig::default())?,
        None => ToleranceConfig::default(),
    };
    let data = match raw.kind {
        Kind::Bipartite => {
            expect_dims(&raw.dims, 2, "bipartite")?;
            let (m, n) = (raw.dims[0], raw.dims[1]);
            let rows: Vec<Vec<Entry>> = parse_part(raw.data, src)?;
            let d = m * n;
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Format(format!("bipartite data must be a {d}×{d} matrix")));
            }
            let mat = CMatrix::from_fn(d, d, |i, j| rows[i][j].value());
            StateData::Bipartite(BipartiteState::with_tolerance(m, n, mat, tol)?)
        }
        Kind::Tripartite => {
            expect_dims(&raw.dims, 3, "tripartite")?;
            let amps: Vec<Entry> = parse_part(raw.data, src)?;
            let v = CVector::from_iterator(amps.len(), amps.iter().map(|e| e.value()));
            StateData::Tripartite(TripartitePure::with_tolerance((raw.dims[0], raw.dims[1], raw.dims[2]), v, tol)?)
        }
        Kind::Subspace => {
            expect_dims(&raw.dims, 2, "subspace")?;
            let vs: Vec<Vec<Entry>> = parse_part(raw.data, src)?;
            let basis = vs
                .iter()
                .map(|v| CVector::from_iterator(v.len(), v.iter().map(|e| e.value())))
                .collect();
            StateData::Subspace(Subspace::with_tolerance(raw.dims[0], raw.dims[1], basis, &tol)?)
        }
        Kind::Fixture => StateData::Fixture(parse_part(raw.data, src)?),
    };
    Ok(LoadedFile {
        data,
        tolerance: raw.tolerance,
        digest: digest(src.as_bytes()),
    })
}

pub fn read_state_file(path: &Path) -> Result<LoadedFile> {
    let src = std::fs::read_to_string(path)?;
    parse_state_file(&src)
}

pub fn complex_json(z: C64) -> Value {
    json!([format_hex(z.re), format_hex(z.im)])
}

pub fn vector_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex_json(z)).collect())
}

/// Serialized state file; exact for every finite double.
pub fn render_state_file(data: &StateData) -> Result<String> {
    let (kind, dims, payload) = match data {
        StateData::Bipartite(rho) => {
            let m = rho.matrix();
            let rows: Vec<Value> = (0..m.nrows())
                .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
                .collect();
            (Kind::Bipartite, vec![rho.dim_a(), rho.dim_b()], Value::Array(rows))
        }
        StateData::Tripartite(psi) => {
            let (a, b, cc) = psi.dims();
            (Kind::Tripartite, vec![a, b, cc], vector_json(psi.amplitudes()))
        }
        StateData::Subspace(v) => (
            Kind::Subspace,
            vec![v.dim_a(), v.dim_b()],
            Value::Array(v.basis().iter().map(vector_json).collect()),
        ),
        StateData::Fixture(spec) => (
            Kind::Fixture,
            vec![],
            serde_json::to_value(spec).map_err(|e| Error::Format(e.to_string()))?,
        ),
    };
    let doc = json!({
        "version": FORMAT_VERSION,
        "kind": kind,
        "dims": dims,
        "data": payload,
    });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Write through a temporary file and rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Report payloads. Numbers are plain JSON doubles (shortest round-trip form).

pub fn complex_num(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_num(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex_num(z)).collect())
}

pub fn matrix_num(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_num(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn witness_json(w: &Witness) -> Value {
    let detail = match &w.kind {
        WitnessKind::TrivialSubmatrix { row, col } => json!({ "row": row, "col": col }),
        WitnessKind::TwoByNProjection { a_op, b_op, x, trivial } => json!({
            "a_op": matrix_num(a_op),
            "b_op": b_op.as_ref().map(matrix_num),
            "x": x.map(complex_num),
            "trivial": trivial.map(|(r, c)| json!([r, c])),
        }),
        WitnessKind::ReductionViolation { side, vector } => json!({
            "side": format!("{side:?}"),
            "vector": vector_num(vector),
        }),
        WitnessKind::SchmidtRank2 { psi } => json!({
            "dims": [psi.dim_a(), psi.dim_b()],
            "psi": vector_num(psi.amplitudes()),
        }),
    };
    json!({ "kind": w.kind_name(), "value": w.value, "detail": detail })
}

pub fn products_json(products: &[ProductTerm]) -> Value {
    Value::Array(
        products
            .iter()
            .map(|p| json!({ "a": vector_num(&p.a), "b": vector_num(&p.b) }))
            .collect(),
    )
}

pub fn revalidation_json(r: &Revalidation) -> Value {
    json!({
        "min_eig_gamma": r.min_eig_gamma,
        "witness_value": r.witness_value,
        "witness_relative": r.witness_relative,
        "reconstruction_residual": r.reconstruction_residual,
    })
}

pub fn certificate_json(cert: &Certificate, reval: Option<&Revalidation>) -> Value {
    let payload = match &cert.verdict {
        Verdict::Separable { products } => json!({ "products": products_json(products) }),
        Verdict::Ppt { min_eig_gamma } => json!({ "min_eig_gamma": min_eig_gamma }),
        Verdict::PptEntangled { min_eig_gamma, search_report } => {
            json!({ "min_eig_gamma": min_eig_gamma, "product_search": search_report })
        }
        Verdict::Distillable { witness } => json!({ "witness": witness_json(witness) }),
        Verdict::Undecided { budget_report } => json!({ "budget": budget_report }),
    };
    json!({
        "verdict": cert.verdict.name(),
        "trail": cert.trail,
        "payload": payload,
        "revalidation": reval.map(revalidation_json),
    })
}

pub fn budget_json(b: &SearchBudget) -> Value {
    json!({
        "seed": b.seed,
        "product_restarts": b.product_restarts,
        "witness_frames": b.witness_frames,
        "x_sweep": b.x_sweep,
        "frp_samples": b.frp_samples,
    })
}

pub fn tolerance_json(t: &ToleranceConfig) -> Value {
    json!({
        "rank_tol_factor": t.rank_tol_factor,
        "psd_tol": t.psd_tol,
        "residual_tol": t.residual_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_roundtrip() {
        for x in [0.0, -0.0, 1.0, 3.0, -0.1, 1e-300, 5e-324, f64::MAX, f64::MIN_POSITIVE, std::f64::consts::PI] {
            let s = format_hex(x);
            let y = parse_hex(&s).unwrap();
            assert_eq!(x.to_bits(), y.to_bits(), "{x} -> {s}");
        }
        assert_eq!(format_hex(3.0), "0x1.8p+1");
        assert_eq!(parse_hex("0x1p-1"), Some(0.5));
        assert_eq!(parse_hex("nonsense"), None);
    }

    #[test]
    fn decimal_and_hex_entries() {
        let src = r#"{"version":1,"kind":"bipartite","dims":[1,2],"data":[[[1,0],["0x0p+0",0]],[[0,0],["0x1p+0",0]]]}"#;
        let f = parse_state_file(src).unwrap();
        let StateData::Bipartite(rho) = f.data else { panic!() };
        assert_eq!(rho.trace(), 2.0);
    }

    #[test]
    fn errors_are_positioned() {
        let src = "{\n  \"version\": 1,\n  \"kind\": \"bipartite\",\n  \"dims\": [1, 1],\n  \"data\": [[[1, \"0xZ\"]]]\n}";
        match parse_state_file(src) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        match parse_state_file("{\"version\": 1,\n \"kind\": \"nope\"}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_psd_is_rejected() {
        let src = r#"{"version":1,"kind":"bipartite","dims":[1,1],"data":[[[-1,0]]]}"#;
        assert!(matches!(parse_state_file(src), Err(Error::NotPsd { .. }) | Err(Error::ZeroTrace)));
    }
}
