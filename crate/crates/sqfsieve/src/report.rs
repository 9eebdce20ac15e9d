//! Report emission in JSON, CSV and plain-table form.
//!
//! Every command produces a [`Report`]: a JSON object (always carrying
//! `"schema":1` and a `"kind"`), a list of headline fields, and optionally
//! one table. CSV output is the table when there is one, otherwise the
//! headline fields as `key,value` rows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};
use sqfsieve_core::arithstat::EulerProductResult;
use sqfsieve_core::forms::{FormVector, GroupElement};
use sqfsieve_core::geosieve::{SampleMode, SieveReport};
use sqfsieve_core::localdensity::{LocalDensityRecord, PointClass};
use sqfsieve_core::moves::MoveRecord;

use crate::cache::SCHEMA;
use crate::config::Format;

/// `n` or `n/d` in lowest terms.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal value with its tail bound, e.g. `0.6045… ± 1.2e-10`.
pub fn euler_display(e: &EulerProductResult) -> String {
    if e.tail_bound == 0.0 {
        e.value.to_string()
    } else {
        format!("{} ± {:.3e}", e.value, e.tail_bound)
    }
}

pub fn euler_json(e: &EulerProductResult) -> Value {
    json!({
        "value": e.value.to_string(),
        "precision": e.value.scale(),
        "tailBound": e.tail_bound,
        "cutoff": e.cutoff,
        "display": euler_display(e),
    })
}

pub fn class_name(c: PointClass) -> &'static str {
    match c {
        PointClass::NotMultiple => "not_multiple",
        PointClass::WeakMultiple => "weak",
        PointClass::StrongMultiple => "strong",
    }
}

fn matrix_json(m: &[Vec<BigRational>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|x| rational_string(x).into()).collect())).collect())
}

pub fn gamma_json(g: &GroupElement) -> Value {
    json!({
        "blocks": g.blocks.iter().map(|b| matrix_json(b)).collect::<Vec<_>>(),
        "twist": g.twist,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    pub summary: Vec<(String, String)>,
    pub table: Option<Table>,
    /// Bare value printed when no format is requested.
    pub plain: Option<String>,
}

impl Report {
    /// Starts a report whose JSON object begins with `schema` and `kind`.
    pub fn new(kind: &str) -> Self {
        let mut m = Map::new();
        m.insert("schema".into(), SCHEMA.into());
        m.insert("kind".into(), kind.into());
        Report { json: Value::Object(m), summary: Vec::new(), table: None, plain: None }
    }

    /// Sets a JSON field.
    pub fn field(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        if let Value::Object(m) = &mut self.json {
            m.insert(key.into(), v.into());
        }
        self
    }

    /// Adds a headline line for csv/table output.
    pub fn line(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.summary.push((key.into(), v.to_string()));
        self
    }

    /// Sets a JSON field and the matching headline line.
    pub fn both(&mut self, key: &str, v: impl Into<Value> + ToString) -> &mut Self {
        let s = v.to_string();
        self.field(key, v);
        self.line(key, s)
    }

    pub fn render(&self, format: Option<Format>) -> String {
        let format = match (format, &self.plain) {
            (Some(f), _) => f,
            (None, Some(v)) => return format!("{v}\n"),
            (None, None) => Format::Json,
        };
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Table => self.render_table(),
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header).expect("in-memory write");
                for r in &t.rows {
                    w.write_record(r).expect("in-memory write");
                }
            }
            None => {
                w.write_record(["key", "value"]).expect("in-memory write");
                for (k, v) in &self.summary {
                    w.write_record([k, v]).expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let width = self.summary.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &self.summary {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        if let Some(t) = &self.table {
            if !self.summary.is_empty() {
                out.push('\n');
            }
            let mut widths: Vec<usize> = t.header.iter().map(|h| h.chars().count()).collect();
            for r in &t.rows {
                for (w, c) in widths.iter_mut().zip(r) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let fmt_row = |cells: &[String]| {
                let line: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
                line.join("  ").trim_end().to_string() + "\n"
            };
            out.push_str(&fmt_row(&t.header));
            out.push_str(&fmt_row(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>()));
            for r in &t.rows {
                out.push_str(&fmt_row(r));
            }
        }
        out
    }
}

pub fn form_json(v: &FormVector) -> Value {
    Value::String(v.to_string())
}

/// JSON line of a local-density record, plus derived density fields.
pub fn record_json(rec: &LocalDensityRecord) -> Value {
    json!({
        "family": rec.family.id(),
        "p": rec.p,
        "cp": rational_string(&rec.cp),
        "strong": rational_string(&rec.strong),
        "weak": rational_string(&rec.weak),
        "method": rec.method.name(),
        "ci": rec.ci,
        "samples": rec.samples,
        "volume": rec.volume().to_string(),
        "density": rational_f64(&rec.density()),
        "localFactor": rational_string(&rec.local_factor()),
    })
}

pub fn record_report(recs: &[(LocalDensityRecord, bool)]) -> Report {
    let mut r = Report::new("local_density");
    r.field("records", recs.iter().map(|(rec, hit)| {
        let mut j = record_json(rec);
        j["cached"] = (*hit).into();
        j
    }).collect::<Vec<_>>());
    let mut t = Table::new(&["family", "p", "method", "cp", "strong", "weak", "density", "ci"]);
    for (rec, _) in recs {
        t.push(vec![
            rec.family.id().into(),
            rec.p.to_string(),
            rec.method.name().into(),
            rational_string(&rec.cp),
            rational_string(&rec.strong),
            rational_string(&rec.weak),
            format!("{:.6e}", rational_f64(&rec.density())),
            format!("{:.3e}", rec.ci),
        ]);
    }
    r.table = Some(t);
    r
}

fn mode_name(m: SampleMode) -> &'static str {
    match m {
        SampleMode::Exhaustive => "exhaustive",
        SampleMode::MonteCarlo => "montecarlo",
    }
}

/// Sieve report with the per-prime table `p, strong, weak, first_square, sandwich`.
pub fn sieve_report(rep: &SieveReport) -> Report {
    let mut r = Report::new("sieve_report");
    r.both("family", rep.family.id())
        .both("N", rep.n)
        .both("mode", mode_name(rep.mode))
        .both("prime_cutoff", rep.prime_cutoff)
        .both("trial_bound", rep.trial_bound)
        .both("total", rep.total)
        .both("disc_zero", rep.disc_zero)
        .both("squarefree", rep.squarefree)
        .both("not_squarefree", rep.not_squarefree)
        .both("unresolved", rep.unresolved)
        .both("squarefree_fraction", rep.squarefree_fraction())
        .both("radius", rep.radius());
    r.field("seed", rep.seed);
    if let Some(s) = rep.seed {
        r.line("seed", s);
    }
    if let Some(w) = rep.wall_clock {
        r.both("wall_clock", w);
    }
    let sandwich = rep.sandwich_counts();
    let mut rows = Vec::new();
    let mut t = Table::new(&["P", "strong", "weak", "first_square", "sandwich"]);
    for (&p, &s) in &rep.per_prime_strong {
        let w = rep.per_prime_weak.get(&p).copied().unwrap_or(0);
        let first = rep.first_square_prime.get(&p).copied().unwrap_or(0);
        let sw = sandwich.get(&p).copied().unwrap_or(0);
        rows.push(json!({ "p": p, "strong": s, "weak": w, "first_square": first, "sandwich": sw }));
        t.push(vec![p.to_string(), s.to_string(), w.to_string(), first.to_string(), sw.to_string()]);
    }
    r.field("per_prime", rows);
    r.table = Some(t);
    r
}

pub fn move_json(m: &MoveRecord) -> Value {
    json!({
        "family": m.family.id(),
        "p": m.p,
        "input": form_json(&m.input),
        "output": form_json(&m.output),
        "gamma": gamma_json(&m.gamma),
        "scale": rational_string(&m.scale),
        "disc_ratio": rational_string(&m.disc_ratio),
        "target_class": class_name(m.target_class),
    })
}

pub fn move_report(kind: &str, m: &MoveRecord, disc_in: &BigInt, disc_out: &BigInt) -> Report {
    let mut r = Report::new("move");
    r.both("move", kind)
        .both("family", m.family.id())
        .both("p", m.p)
        .both("input", m.input.to_string())
        .both("output", m.output.to_string())
        .both("scale", rational_string(&m.scale))
        .both("disc_ratio", rational_string(&m.disc_ratio))
        .both("disc_input", disc_in.to_string())
        .both("disc_output", disc_out.to_string())
        .both("target_class", class_name(m.target_class));
    r.field("gamma", gamma_json(&m.gamma));
    r.line("gamma", gamma_json(&m.gamma));
    r
}
