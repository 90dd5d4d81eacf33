//! Job files and result records.
//!
//! A job is a line-oriented text file. A `#` outside quotes starts a comment;
//! every other non-empty line is `key value`:
//!
//! ```text
//! ring x1, x2, x3                 source variables V
//! parameters s                    deformation parameters S (optional)
//! extension t                     free-extension parameters T (optional)
//! weights 1, 1, 1, 1              positive, one per variable of V, S, T
//! divisor "x1*x2*x3"              h on V, S, T
//! field "x1", "0", "0"            candidate Saito basis column (repeatable)
//! target z1, z2, z3, z4           ambient variables of a free divisor E
//! target-weights 1, 1, 1, 1
//! free-divisor "z1*z2*z3*z4"      equation of E
//! map "x1", "x2", "x3", "x1+x2+x3-s"   one polynomial per target variable
//! germ "x", "y^3+x^2*y"           map germ on the ring variables
//! germ-target X, Z                target of the germ; `map` then lives here
//! germ-target-weights 1, 3
//! unfolding-ring x, u, y
//! unfolding "x", "u", "y^3+x^2*y+u*y"
//! command mu-e
//! degree-bound 12                 options: degree-bound, order, seed, k,
//! window 2                        window, aux-bound
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::{json, Value};

use crate::checked::{
    contracted_volume, de_rham_check, is_socle_class, kahler_strictly_smaller, mu_e_derham, pairing_kernel_matches,
    torsion_length, FormsComplex, SliceGrading,
};
use crate::deformation::{
    ae_codim_damon, ae_codim_direct, cm_proxy, ke_discriminant_reducedness, kev_normal_space, log_critical_ideal,
    mu_e_alternating, mu_e_good_equation, mu_e_total_space, radical_power, sequence_kernel_matches, t1_log_relative,
    torsion_routes, DeformationSetup, InducingMap,
};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::groebner::{ideal_basis, syzygy_module};
use crate::logarithmic::{
    derlog, derlog_h, euler_field, h_log_forms, is_free, nonnegative_grading, pairing_gate, saito_check, Certification,
    Divisor, FreenessVerdict, LogBasis,
};
use crate::module::FreeElement;
use crate::order::{MonomialOrder, OrderKind};
use crate::parse::{parse_poly, split_list};
use crate::poly::{Poly, Rational};

pub const JOB_FORMAT: &str = "freediv-job/1";
pub const RESULT_SCHEMA: &str = "freediv-result/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    IsFree,
    Derlog,
    SaitoCheck,
    OmegaCheck,
    DeRhamCheck,
    TorsionLength,
    KevCodim,
    T1Log,
    CriticalIdeal,
    MuE,
    AeCodim,
    FittingReduced,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::IsFree,
        Command::Derlog,
        Command::SaitoCheck,
        Command::OmegaCheck,
        Command::DeRhamCheck,
        Command::TorsionLength,
        Command::KevCodim,
        Command::T1Log,
        Command::CriticalIdeal,
        Command::MuE,
        Command::AeCodim,
        Command::FittingReduced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::IsFree => "is-free",
            Command::Derlog => "derlog",
            Command::SaitoCheck => "saito-check",
            Command::OmegaCheck => "omega-check",
            Command::DeRhamCheck => "de-rham-check",
            Command::TorsionLength => "torsion-length",
            Command::KevCodim => "kev-codim",
            Command::T1Log => "t1-log",
            Command::CriticalIdeal => "critical-ideal",
            Command::MuE => "mu-e",
            Command::AeCodim => "ae-codim",
            Command::FittingReduced => "fitting-reduced",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub degree_bound: i64,
    pub order: OrderKind,
    pub seed: u64,
    pub k: Option<usize>,
    pub window: i64,
    pub aux_bound: i64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            degree_bound: 20,
            order: OrderKind::WDegRevLex,
            seed: 0,
            k: None,
            window: 2,
            aux_bound: 4,
        }
    }
}

/// A validated job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub ring: Vec<String>,
    pub parameters: Vec<String>,
    pub extension: Vec<String>,
    pub weights: Option<Vec<u32>>,
    pub divisor: Option<Poly>,
    pub fields: Vec<Vec<Poly>>,
    pub target: Vec<String>,
    pub target_weights: Option<Vec<u32>>,
    pub free_divisor: Option<Poly>,
    pub map: Vec<Poly>,
    pub germ: Vec<Poly>,
    pub germ_target: Vec<String>,
    pub germ_target_weights: Option<Vec<u32>>,
    pub unfolding_ring: Vec<String>,
    pub unfolding: Vec<Poly>,
    pub options: Options,
}

impl JobSpec {
    /// `V ++ S ++ T`.
    pub fn source(&self) -> Vec<String> {
        self.ring
            .iter()
            .chain(&self.parameters)
            .chain(&self.extension)
            .cloned()
            .collect()
    }
}

struct Line<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    /// 1-based column of the first byte of `value`.
    col: usize,
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

fn ident_list(l: &Line) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    if l.value.trim().is_empty() {
        return Ok(out);
    }
    for (off, item) in split_list(l.value) {
        if !is_ident(item) {
            return Err(perr(l.line, l.col + off, format!("invalid variable name '{}'", item)));
        }
        if out.iter().any(|x| x == item) {
            return Err(perr(l.line, l.col + off, format!("variable '{}' declared twice", item)));
        }
        out.push(item.to_string());
    }
    Ok(out)
}

fn weight_list(l: &Line, expected: usize, what: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for (off, item) in split_list(l.value) {
        let w: i64 = item
            .parse()
            .map_err(|_| perr(l.line, l.col + off, format!("weight '{}' is not an integer", item)))?;
        if w <= 0 {
            return Err(perr(l.line, l.col + off, "nonpositive weight"));
        }
        out.push(w as u32);
    }
    if out.len() != expected {
        return Err(perr(
            l.line,
            l.col,
            format!("{} weights given for {} variables of {}", out.len(), expected, what),
        ));
    }
    Ok(out)
}

fn integer<T: std::str::FromStr>(l: &Line) -> Result<T> {
    l.value.trim().parse().map_err(|_| {
        perr(
            l.line,
            l.col,
            format!("'{}' is not a valid value for {}", l.value.trim(), l.key),
        )
    })
}

/// Quoted strings separated by commas, with their 1-based columns.
fn quoted_list(l: &Line) -> Result<Vec<(usize, String)>> {
    let b = l.value.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let skip = |i: &mut usize| {
        while *i < b.len() && (b[*i] as char).is_ascii_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip(&mut i);
        if i >= b.len() || b[i] != b'"' {
            return Err(perr(l.line, l.col + i, "expected a quoted polynomial"));
        }
        let start = i + 1;
        let Some(len) = l.value[start..].find('"') else {
            return Err(perr(l.line, l.col + i, "unterminated string"));
        };
        out.push((l.col + start, l.value[start..start + len].to_string()));
        i = start + len + 1;
        skip(&mut i);
        if i >= b.len() {
            return Ok(out);
        }
        if b[i] != b',' {
            return Err(perr(l.line, l.col + i, "expected ',' between polynomials"));
        }
        i += 1;
    }
}

fn poly_list(l: &Line, names: &[String]) -> Result<Vec<Poly>> {
    quoted_list(l)?
        .into_iter()
        .map(|(col, text)| parse_poly(&text, names).map_err(|e| perr(l.line, col + e.offset, e.message)))
        .collect()
}

fn single_poly(l: &Line, names: &[String]) -> Result<Poly> {
    let mut v = poly_list(l, names)?;
    if v.len() != 1 {
        return Err(perr(l.line, l.col, format!("{} takes exactly one polynomial", l.key)));
    }
    Ok(v.remove(0))
}

const KEYS: [&str; 22] = [
    "ring",
    "parameters",
    "extension",
    "weights",
    "divisor",
    "field",
    "target",
    "target-weights",
    "free-divisor",
    "map",
    "germ",
    "germ-target",
    "germ-target-weights",
    "unfolding-ring",
    "unfolding",
    "command",
    "degree-bound",
    "order",
    "seed",
    "k",
    "window",
    "aux-bound",
];

/// Parses and validates a job file.
pub fn parse_job(text: &str) -> Result<JobSpec> {
    parse_job_with(text, None)
}

/// Cuts a trailing `# ...` comment that is not inside a quoted string.
fn strip_comment(s: &str) -> &str {
    let mut quoted = false;
    for (i, c) in s.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &s[..i],
            _ => {}
        }
    }
    s
}

/// As [`parse_job`], with a command used when the file names none. A file
/// naming a different command is rejected.
pub fn parse_job_with(text: &str, default_command: Option<Command>) -> Result<JobSpec> {
    let mut lines: BTreeMap<&str, Vec<Line>> = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - trimmed.len();
        let key_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let key = &trimmed[..key_len];
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(perr(line, indent + 1, format!("unknown key '{}'", key)));
        };
        let rest = strip_comment(&trimmed[key_len..]);
        let value_start = rest.len() - rest.trim_start().len();
        let value = rest.trim();
        let col = indent + key_len + value_start + 1;
        let entry = lines.entry(key).or_default();
        if key != "field" && !entry.is_empty() {
            return Err(perr(line, indent + 1, format!("'{}' given twice", key)));
        }
        entry.push(Line { line, key, value, col });
    }
    let one = |k: &str| lines.get(k).and_then(|v| v.first());

    let idents = |k: &str| one(k).map(ident_list).transpose().map(|v| v.unwrap_or_default());
    let ring = idents("ring")?;
    let parameters = idents("parameters")?;
    let extension = idents("extension")?;
    let target = idents("target")?;
    let germ_target = idents("germ-target")?;
    let unfolding_ring = idents("unfolding-ring")?;
    let source: Vec<String> = ring.iter().chain(&parameters).chain(&extension).cloned().collect();
    for (i, v) in source.iter().enumerate() {
        if source[..i].contains(v) {
            let l = one("parameters").or(one("extension")).or(one("ring")).unwrap();
            return Err(perr(l.line, l.col, format!("variable '{}' declared twice", v)));
        }
    }

    let weights = one("weights")
        .map(|l| weight_list(l, source.len(), "V, S and T"))
        .transpose()?;
    let target_weights = one("target-weights")
        .map(|l| weight_list(l, target.len(), "the target"))
        .transpose()?;
    let germ_target_weights = one("germ-target-weights")
        .map(|l| weight_list(l, germ_target.len(), "the germ target"))
        .transpose()?;

    let command = match (one("command"), default_command) {
        (None, Some(c)) => c,
        (None, None) => return Err(perr(text.lines().count().max(1), 1, "missing 'command'")),
        (Some(l), d) => {
            let c = Command::from_name(l.value.trim())
                .ok_or_else(|| perr(l.line, l.col, format!("unknown command '{}'", l.value.trim())))?;
            if d.is_some_and(|d| d != c) {
                return Err(perr(
                    l.line,
                    l.col,
                    format!("job is '{}' but '{}' was requested", c.name(), d.unwrap().name()),
                ));
            }
            c
        }
    };

    let divisor = one("divisor").map(|l| single_poly(l, &source)).transpose()?;
    let free_divisor = one("free-divisor").map(|l| single_poly(l, &target)).transpose()?;
    let map_names = if germ_target.is_empty() { &source } else { &germ_target };
    let map = one("map")
        .map(|l| poly_list(l, map_names))
        .transpose()?
        .unwrap_or_default();
    if let Some(l) = one("map") {
        if map.len() != target.len() {
            return Err(perr(
                l.line,
                l.col,
                format!("map has {} components for {} target variables", map.len(), target.len()),
            ));
        }
    }
    let germ = one("germ")
        .map(|l| poly_list(l, &ring))
        .transpose()?
        .unwrap_or_default();
    let unfolding = one("unfolding")
        .map(|l| poly_list(l, &unfolding_ring))
        .transpose()?
        .unwrap_or_default();
    let mut fields = Vec::new();
    for l in lines.get("field").map(|v| v.as_slice()).unwrap_or(&[]) {
        let f = poly_list(l, &source)?;
        if f.len() != source.len() {
            return Err(perr(
                l.line,
                l.col,
                format!("field has {} components for {} variables", f.len(), source.len()),
            ));
        }
        fields.push(f);
    }

    let mut options = Options::default();
    if let Some(l) = one("degree-bound") {
        options.degree_bound = integer(l)?;
        if options.degree_bound < 0 {
            return Err(perr(l.line, l.col, "degree-bound must be nonnegative"));
        }
    }
    if let Some(l) = one("order") {
        options.order = match l.value.trim() {
            "wdegrevlex" => OrderKind::WDegRevLex,
            "lex" => OrderKind::Lex,
            other => return Err(perr(l.line, l.col, format!("unknown order '{}'", other))),
        };
    }
    if let Some(l) = one("seed") {
        options.seed = integer(l)?;
    }
    if let Some(l) = one("k") {
        options.k = Some(integer(l)?);
    }
    if let Some(l) = one("window") {
        options.window = integer(l)?;
    }
    if let Some(l) = one("aux-bound") {
        options.aux_bound = integer(l)?;
    }

    Ok(JobSpec {
        command,
        ring,
        parameters,
        extension,
        weights,
        divisor,
        fields,
        target,
        target_weights,
        free_divisor,
        map,
        germ,
        germ_target,
        germ_target_weights,
        unfolding_ring,
        unfolding,
        options,
    })
}

fn join_u32(v: &[u32]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn quoted(ps: &[Poly], names: &[String]) -> String {
    ps.iter()
        .map(|p| format!("\"{}\"", p.format(names)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text of a job; `parse_job(&to_text(j)) == j`.
pub fn to_text(job: &JobSpec) -> String {
    let mut out = format!("# {}\n", JOB_FORMAT);
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        if !v.is_empty() {
            out.push(' ');
            out.push_str(&v);
        }
        out.push('\n');
    };
    let source = job.source();
    put("command", job.command.name().into());
    if !job.ring.is_empty() {
        put("ring", job.ring.join(", "));
    }
    if !job.parameters.is_empty() {
        put("parameters", job.parameters.join(", "));
    }
    if !job.extension.is_empty() {
        put("extension", job.extension.join(", "));
    }
    if let Some(w) = &job.weights {
        put("weights", join_u32(w));
    }
    if let Some(h) = &job.divisor {
        put("divisor", quoted(std::slice::from_ref(h), &source));
    }
    for f in &job.fields {
        put("field", quoted(f, &source));
    }
    if !job.target.is_empty() {
        put("target", job.target.join(", "));
    }
    if let Some(w) = &job.target_weights {
        put("target-weights", join_u32(w));
    }
    if let Some(h) = &job.free_divisor {
        put("free-divisor", quoted(std::slice::from_ref(h), &job.target));
    }
    if !job.germ_target.is_empty() {
        put("germ-target", job.germ_target.join(", "));
    }
    if let Some(w) = &job.germ_target_weights {
        put("germ-target-weights", join_u32(w));
    }
    if !job.map.is_empty() {
        let names = if job.germ_target.is_empty() {
            &source
        } else {
            &job.germ_target
        };
        put("map", quoted(&job.map, names));
    }
    if !job.germ.is_empty() {
        put("germ", quoted(&job.germ, &job.ring));
    }
    if !job.unfolding_ring.is_empty() {
        put("unfolding-ring", job.unfolding_ring.join(", "));
    }
    if !job.unfolding.is_empty() {
        put("unfolding", quoted(&job.unfolding, &job.unfolding_ring));
    }
    let o = &job.options;
    put("degree-bound", o.degree_bound.to_string());
    put("order", o.order.name().into());
    put("seed", o.seed.to_string());
    if let Some(k) = o.k {
        put("k", k.to_string());
    }
    put("window", o.window.to_string());
    put("aux-bound", o.aux_bound.to_string());
    out
}

/// Outcome of one job.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub command: Command,
    pub input: String,
    pub outcome: std::result::Result<Value, Error>,
    pub elapsed_ms: Option<u128>,
}

impl ResultRecord {
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(_) => 0,
            Err(e) => e.exit_code(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "schema": RESULT_SCHEMA,
            "command": self.command.name(),
            "input": self.input,
        });
        match &self.outcome {
            Ok(r) => v["result"] = r.clone(),
            Err(e) => v["error"] = json!({ "kind": e.kind(), "code": e.exit_code(), "message": e.to_string() }),
        }
        if let Some(ms) = self.elapsed_ms {
            v["timing_ms"] = json!(ms as u64);
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values always serialize");
        s.push('\n');
        s
    }

    /// Indented `key: value` rendering of the same data.
    pub fn to_text_string(&self) -> String {
        let mut out = String::new();
        render_text(&self.to_json(), 0, &mut out);
        out
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{}{}:\n", pad, k));
                        render_text(x, indent + 1, out);
                    }
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("{}{}: |\n", pad, k));
                        for l in s.lines() {
                            out.push_str(&format!("{}  {}\n", pad, l));
                        }
                    }
                    _ => out.push_str(&format!("{}{}: {}\n", pad, k, scalar(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_flat(x) {
                    out.push_str(&format!("{}- {}\n", pad, scalar(x)));
                } else {
                    out.push_str(&format!("{}-\n", pad));
                    render_text(x, indent + 1, out);
                }
            }
        }
        _ => out.push_str(&format!("{}{}\n", pad, scalar(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Runs a job. `timing` adds wall-clock time, which breaks byte-for-byte
/// reproducibility and is therefore off by default.
pub fn run(job: &JobSpec, timing: bool) -> ResultRecord {
    let start = Instant::now();
    let outcome = dispatch(job);
    ResultRecord {
        command: job.command,
        input: to_text(job),
        outcome,
        elapsed_ms: timing.then(|| start.elapsed().as_millis()),
    }
}

fn dispatch(job: &JobSpec) -> Result<Value> {
    match job.command {
        Command::IsFree => cmd_is_free(job),
        Command::Derlog => cmd_derlog(job),
        Command::SaitoCheck => cmd_saito_check(job),
        Command::OmegaCheck => cmd_omega_check(job),
        Command::DeRhamCheck => cmd_de_rham(job),
        Command::TorsionLength => cmd_torsion(job),
        Command::KevCodim => cmd_kev(job),
        Command::T1Log => cmd_t1(job),
        Command::CriticalIdeal => cmd_critical_ideal(job),
        Command::MuE => cmd_mu_e(job),
        Command::AeCodim => cmd_ae_codim(job),
        Command::FittingReduced => cmd_fitting(job),
    }
}

fn rational_text(q: &Rational) -> String {
    Poly::constant(0, q.clone()).format(&[])
}

fn dim_json(d: Dimension) -> Value {
    match d {
        Dimension::Finite(n) => json!(n),
        Dimension::Infinite => json!("INFINITE"),
    }
}

fn routed(value: Value, route: &str) -> Value {
    json!({ "value": value, "route": route })
}

fn route_result<T>(r: Result<T>, route: &str, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(x) => routed(f(x), route),
        Err(e) => json!({ "route": route, "error": { "kind": e.kind(), "message": e.to_string() } }),
    }
}

fn fields_json(fields: &[FreeElement], names: &[String]) -> Value {
    json!(fields.iter().map(|f| f.format(names)).collect::<Vec<_>>())
}

fn source_divisor(job: &JobSpec) -> Result<Divisor> {
    let h = job
        .divisor
        .clone()
        .ok_or_else(|| Error::precondition(format!("{} needs a 'divisor'", job.command.name())))?;
    Divisor::new(job.source(), h, job.weights.clone())
}

fn certification_of(d: &Divisor) -> Certification {
    if d.weights().is_some() {
        Certification::Certified
    } else {
        Certification::UncertifiedLocal
    }
}

fn basis_json(b: &LogBasis, names: &[String]) -> Value {
    json!({
        "fields": fields_json(&b.fields, names),
        "witnesses": b.witnesses.iter().map(|w| w.format(names)).collect::<Vec<_>>(),
        "unit": rational_text(&b.unit),
        "determinant_check": b.verify(),
    })
}

fn require_basis(d: &Divisor) -> Result<LogBasis> {
    match is_free(d)? {
        FreenessVerdict::Free(b) => Ok(b),
        FreenessVerdict::NotFree { minimal_generators } => Err(Error::precondition(format!(
            "divisor is not free ({} minimal logarithmic generators)",
            minimal_generators
        ))),
        FreenessVerdict::Inconclusive { reason } => {
            Err(Error::precondition(format!("freeness not certified: {}", reason)))
        }
    }
}

/// Slice weights: the declared weights, else a nonnegative grading of `h`.
fn slice_weights(d: &Divisor) -> Result<Vec<u32>> {
    match d.weights() {
        Some(w) => Ok(w.to_vec()),
        None => nonnegative_grading(d.h())
            .ok_or_else(|| Error::precondition("h is not homogeneous for any nonnegative weights")),
    }
}

fn cmd_is_free(job: &JobSpec) -> Result<Value> {
    let d = source_divisor(job)?;
    let names = d.names().to_vec();
    let cert = certification_of(&d);
    Ok(match is_free(&d)? {
        FreenessVerdict::Free(b) => json!({
            "verdict": "FREE",
            "route": "minimal-generators+saito",
            "certificate": basis_json(&b, &names),
            "certification": cert,
        }),
        FreenessVerdict::NotFree { minimal_generators } => json!({
            "verdict": "NOT_FREE",
            "route": "minimal-generators",
            "minimal_generators": minimal_generators,
            "rank": d.nvars(),
            "certification": cert,
        }),
        FreenessVerdict::Inconclusive { reason } => json!({
            "verdict": "INCONCLUSIVE",
            "route": "irredundant-generators+subset-search",
            "reason": reason,
            "certification": cert,
        }),
    })
}

fn cmd_derlog(job: &JobSpec) -> Result<Value> {
    let d = source_divisor(job)?;
    let names = d.names().to_vec();
    let gens = derlog(&d)?;
    let mut v = json!({
        "route": "syzygies-of-gradient-and-h",
        "count": gens.len(),
        "generators": gens.iter().map(|g| json!({
            "field": g.field.format(&names),
            "witness": g.witness.format(&names),
        })).collect::<Vec<_>>(),
        "minimal": d.weights().is_some(),
        "certification": certification_of(&d),
    });
    if d.weights().is_some() {
        v["annihilating"] = json!({ "route": "syzygies-of-gradient", "fields": fields_json(&derlog_h(&d)?, &names) });
    }
    Ok(v)
}

fn cmd_saito_check(job: &JobSpec) -> Result<Value> {
    let d = source_divisor(job)?;
    if job.fields.is_empty() {
        return Err(Error::precondition("saito-check needs 'field' lines"));
    }
    let n = d.nvars();
    let cands: Vec<FreeElement> = job.fields.iter().map(|f| FreeElement::new(n, f.clone())).collect();
    Ok(match saito_check(&d, &cands) {
        Ok(b) => json!({
            "verdict": "VALID",
            "route": "determinant",
            "certificate": basis_json(&b, d.names()),
        }),
        Err(reason) => json!({ "verdict": "INVALID", "route": "determinant", "reason": reason }),
    })
}

fn cmd_omega_check(job: &JobSpec) -> Result<Value> {
    let d = source_divisor(job)?;
    let names = d.names().to_vec();
    let b = require_basis(&d)?;
    let w = slice_weights(&d)?;
    let n = d.nvars();
    let mut per_k = Vec::new();
    for k in 0..=n {
        let gens = h_log_forms(&b, k)?;
        let syz = syzygy_module(&gens)?;
        let strict = if k >= 1 {
            Some(kahler_strictly_smaller(&b, k, &w)?)
        } else {
            None
        };
        per_k.push(json!({
            "k": k,
            "generators": gens.iter().map(|g| g.format(&names)).collect::<Vec<_>>(),
            "pairing_gate": routed(json!(pairing_gate(&b, k)?), "complementary-minors"),
            "syzygies_vanish": routed(json!(syz.is_empty()), "syzygy-module"),
            "strictly_larger_than_kahler": strict,
        }));
    }
    Ok(json!({
        "certificate": basis_json(&b, &names),
        "pairing_kernel_matches": routed(json!(pairing_kernel_matches(&b)?), "kernel-of-pairing"),
        "degrees": per_k,
        "certification": certification_of(&d),
    }))
}

fn setup(job: &JobSpec) -> Result<DeformationSetup> {
    let h = job
        .free_divisor
        .clone()
        .ok_or_else(|| Error::precondition(format!("{} needs a 'free-divisor'", job.command.name())))?;
    if job.map.is_empty() {
        return Err(Error::precondition(format!("{} needs a 'map'", job.command.name())));
    }
    let e = Divisor::new(job.target.clone(), h, job.target_weights.clone())?;
    let map = InducingMap::new(job.source(), job.target.clone(), job.map.clone())?;
    DeformationSetup::new(
        e,
        map,
        job.ring.len(),
        job.parameters.len(),
        job.extension.len(),
        job.weights.clone(),
    )
}

fn cmd_de_rham(job: &JobSpec) -> Result<Value> {
    let o = &job.options;
    if job.divisor.is_some() {
        let d = source_divisor(job)?;
        let w = slice_weights(&d)?;
        let cx = FormsComplex::free(require_basis(&d)?, SliceGrading::new(w.clone()))?;
        let r = de_rham_check(&cx, o.degree_bound, o.aux_bound)?;
        return Ok(json!({
            "kind": "free",
            "slice_weights": w,
            "route": "per-slice-ranks",
            "report": r,
            "certification": certification_of(&d),
        }));
    }
    let st = setup(job)?;
    let r = de_rham_check(&st.d0_complex()?, o.degree_bound, o.aux_bound)?;
    Ok(json!({
        "kind": "almost-free",
        "route": "per-slice-ranks",
        "report": r,
        "certification": st.certification(),
    }))
}

fn cmd_torsion(job: &JobSpec) -> Result<Value> {
    let o = &job.options;
    let steps = o.degree_bound.max(1) as usize;
    if job.divisor.is_some() {
        let d = source_divisor(job)?;
        let n = d.nvars();
        let k = o.k.unwrap_or(n.saturating_sub(1));
        let cx = FormsComplex::free(require_basis(&d)?, SliceGrading::new(slice_weights(&d)?))?;
        let t = torsion_length(&cx.module(k)?, steps)?;
        return Ok(
            json!({ "k": k, "torsion_length": routed(json!(t), "saturation"), "certification": certification_of(&d) }),
        );
    }
    let st = setup(job)?;
    let n = st.nv;
    let k = o.k.unwrap_or(n.saturating_sub(1));
    let cx = st.d0_complex()?;
    let m = cx.module(k)?;
    let colon = torsion_length(&m, steps)?;
    let mut v =
        json!({ "k": k, "torsion_length": routed(json!(colon), "saturation"), "certification": st.certification() });
    if st.ns > 0 {
        v["wedge_route"] = route_result(
            torsion_routes(&st, k, o.degree_bound, o.window),
            "ds-wedge-kernel",
            |r| json!(r),
        );
    }
    if let (Some(w), true) = (st.source_weights.as_ref(), k + 1 == n) {
        let chi = euler_field(&w[..n])?;
        let form = contracted_volume(&chi, n);
        v["euler_contraction"] = json!({
            "form": form.format(&st.map.source[..n]),
            "nonzero": !m.is_zero_class(&form)?,
            "socle": is_socle_class(&m, &form)?,
        });
    }
    Ok(v)
}

fn cmd_kev(job: &JobSpec) -> Result<Value> {
    let st = setup(job)?;
    let kev = kev_normal_space(&st)?;
    Ok(json!({
        "codimension": routed(dim_json(kev.dimension), "normal-space-presentation"),
        "sequence_exact": routed(json!(sequence_kernel_matches(&st)?), "syzygy-projection"),
        "certification": st.certification(),
    }))
}

fn cmd_t1(job: &JobSpec) -> Result<Value> {
    let st = setup(job)?;
    let t1 = t1_log_relative(&st)?;
    let kev = kev_normal_space(&st)?;
    Ok(json!({
        "relative": routed(dim_json(t1.relative.dimension), if t1.extended { "free-extension" } else { "saito-basis-rows" }),
        "restricted": routed(dim_json(t1.restricted), "modulo-parameters"),
        "kev_codimension": routed(dim_json(kev.dimension), "normal-space-presentation"),
        "restricted_equals_kev": t1.restricted == kev.dimension,
        "certification": st.certification(),
    }))
}

fn cmd_critical_ideal(job: &JobSpec) -> Result<Value> {
    let st = setup(job)?;
    let gens = log_critical_ideal(&st)?;
    let keep = st.vs_vars(st.ns);
    let names: Vec<String> = keep.iter().map(|&i| st.map.source[i].clone()).collect();
    let nv = keep.len();
    let mono = match job.options.order {
        OrderKind::WDegRevLex => match st.source_weights.as_ref() {
            Some(w) => MonomialOrder::wdegrevlex(keep.iter().map(|&i| w[i]).collect())?,
            None => MonomialOrder::degrevlex(nv),
        },
        OrderKind::Lex => MonomialOrder::lex(nv),
    };
    let gb = ideal_basis(&gens, &mono);
    let powers: Vec<Value> = (0..st.nv)
        .map(|i| {
            json!({
                "variable": names[i],
                "power_in_ideal": radical_power(&gens, &Poly::var(nv, i), job.options.degree_bound.max(1) as u32),
            })
        })
        .collect();
    Ok(json!({
        "route": "maximal-minors",
        "generators": gens.iter().map(|g| g.format(&names)).collect::<Vec<_>>(),
        "groebner_basis": { "order": job.options.order.name(), "elements": gb.iter().map(|g| g.format(&names)).collect::<Vec<_>>() },
        "source_variables_in_radical": powers,
        "certification": st.certification(),
    }))
}

fn cmd_mu_e(job: &JobSpec) -> Result<Value> {
    let st = setup(job)?;
    let w = job.options.window;
    let derham = st.d0_complex().and_then(|cx| mu_e_derham(&cx, w));
    let alternating = mu_e_alternating(&st);
    let good = mu_e_good_equation(&st);
    let values: Vec<Option<i64>> = vec![
        derham.as_ref().ok().map(|m| m.value as i64),
        alternating.as_ref().ok().map(|a| a.value),
        good.as_ref().ok().map(|&g| g as i64),
    ];
    let available: Vec<i64> = values.iter().flatten().copied().collect();
    if available.is_empty() {
        return Err(derham.expect_err("derham failed when no route is available"));
    }
    let agree = available.windows(2).all(|p| p[0] == p[1]);
    let mut v = json!({
        "routes": {
            "derham": route_result(derham, "derham-slices", |m| json!(m)),
            "alternating": route_result(alternating, "alternating-t1-chain", |a| json!(a)),
            "good_equation": route_result(good, "good-equation", |g| json!(g)),
        },
        "agree": agree,
        "routes_available": available.len(),
        "certification": st.certification(),
    });
    if st.ns == 1 {
        let t1 = t1_log_relative(&st).map(|t| t.relative.dimension);
        let mu0 = values[0];
        let mud = mu_e_total_space(&st, w).map(|m| m.value as i64);
        let holds = match (&t1, mu0, &mud) {
            (Ok(Dimension::Finite(t)), Some(a), Ok(b)) => Some(a + b == *t as i64),
            _ => None,
        };
        let t1_route = if st.nt > 0 {
            "free-extension"
        } else {
            "saito-basis-rows"
        };
        v["count"] = json!({
            "t1_relative": route_result(t1, t1_route, dim_json),
            "mu_fibre": mu0,
            "mu_total": route_result(mud, "derham-slices", |m| json!(m)),
            "holds": holds,
        });
    }
    Ok(v)
}

fn cmd_ae_codim(job: &JobSpec) -> Result<Value> {
    if job.germ.is_empty() {
        return Err(Error::precondition("ae-codim needs a 'germ'"));
    }
    let direct = ae_codim_direct(&job.germ, job.options.degree_bound.max(1) as u32)?;
    let mut values = vec![direct.value];
    let mut v = json!({
        "routes": { "direct": routed(json!(direct), "jet-linear-algebra") },
    });
    let has_damon = !job.unfolding.is_empty() && job.free_divisor.is_some() && !job.map.is_empty();
    if has_damon {
        let e = Divisor::new(
            job.target.clone(),
            job.free_divisor.clone().unwrap(),
            job.target_weights.clone(),
        )?;
        let inclusion = InducingMap::new(job.germ_target.clone(), job.target.clone(), job.map.clone())?;
        let r = ae_codim_damon(&job.unfolding, e, inclusion, job.germ_target_weights.clone())?;
        values.push(r.value.finite());
        v["routes"]["damon"] = routed(dim_json(r.value), "kev-of-discriminant");
        let p = job.germ_target.len();
        let torsion = r
            .setup
            .d0_complex()
            .and_then(|cx| cx.module(p.saturating_sub(1)))
            .and_then(|m| torsion_length(&m, job.options.degree_bound.max(1) as usize));
        if let Ok(t) = &torsion {
            values.push(Some(*t));
        }
        v["routes"]["torsion"] = route_result(torsion, "saturation-of-discriminant-forms", |t| json!(t));
        v["certification"] = json!(r.setup.certification());
    }
    let available = values.iter().filter(|x| x.is_some()).count();
    if available == 0 {
        let last = direct
            .history
            .last()
            .map_or(String::new(), |(n, d)| format!(" (order {} gave {})", n, d));
        return Err(Error::NonStabilization(format!(
            "jet cokernel did not stabilize below order {}{}",
            job.options.degree_bound.max(1),
            last
        )));
    }
    v["routes_available"] = json!(available);
    v["agree"] = json!(values.iter().all(|x| x.is_some() && *x == values[0]));
    Ok(v)
}

fn cmd_fitting(job: &JobSpec) -> Result<Value> {
    let st = setup(job)?;
    let r = ke_discriminant_reducedness(&st)?;
    let s_name = vec![st.map.source[st.nv].clone()];
    let cm = cm_proxy(&st, job.options.seed)?;
    Ok(json!({
        "fitting_ideal": routed(json!(r.fitting.format(&s_name)), "characteristic-polynomial"),
        "annihilator_on_base": routed(json!(r.eliminated.format(&s_name)), "lex-elimination"),
        "reduced": r.reduced,
        "cohen_macaulay_proxy": cm,
        "certification": st.certification(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_comments() {
        let j = parse_job("ring x, y   # source\ndivisor \"x*y\" # h\ncommand is-free\n").unwrap();
        assert_eq!(j.ring, vec!["x", "y"]);
        assert_eq!(j.divisor, Some(Poly::var(2, 0) * Poly::var(2, 1)));
    }

    #[test]
    fn minimal_job() {
        let j = parse_job("ring x, y, z\ndivisor \"x*y*z\"\ncommand is-free\n").unwrap();
        assert_eq!(j.command, Command::IsFree);
        assert_eq!(j.ring, vec!["x", "y", "z"]);
        assert_eq!(parse_job(&to_text(&j)).unwrap(), j);
    }

    #[test]
    fn undeclared_variable_position() {
        let e = parse_job("ring x, y\ndivisor \"x*w\"\ncommand is-free\n").unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 12);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn weights_enable_grading() {
        let j = parse_job("ring a, b\nweights 2, 3\ndivisor \"4*a^3+27*b^2\"\ncommand derlog\n").unwrap();
        assert_eq!(j.weights, Some(vec![2, 3]));
        let r = run(&j, false);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.to_json()["result"]["certification"], "CERTIFIED");
    }

    #[test]
    fn rejects_bad_input() {
        for (text, line) in [
            ("ring x\nweights 0\ndivisor \"x\"\ncommand is-free\n", 2),
            ("ring x\ndivisor \"x+\"\ncommand is-free\n", 2),
            ("ring x\ndivisor \"x\"\ncommand fly\n", 3),
            ("ring x\nbogus 1\ncommand is-free\n", 2),
            ("ring x, x\ncommand is-free\n", 1),
        ] {
            match parse_job(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{}", text),
                other => panic!("{:?}", other),
            }
        }
    }

    #[test]
    fn errors_carry_codes() {
        let j = parse_job("ring x, y, z\ndivisor \"x*y*z*(x+y+z)\"\ncommand omega-check\n").unwrap();
        let r = run(&j, false);
        assert_eq!(r.exit_code(), 3);
        assert_eq!(r.to_json()["error"]["kind"], "precondition");
    }

    #[test]
    fn text_output_mentions_verdict() {
        let j = parse_job("ring x, y\ndivisor \"x*y\"\ncommand is-free\n").unwrap();
        let t = run(&j, false).to_text_string();
        assert!(t.contains("verdict: FREE"), "{}", t);
    }
}
