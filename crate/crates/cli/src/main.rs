use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use quartic_core::forms::{parse_coefficients, parse_ternary, serialize_ternary};
use quartic_core::incidence::{find_split_line, find_split_tangent, pencil_report};
use quartic_core::lab::{self, ExperimentConfig};
use quartic_core::quartic::{fixtures, PlaneQuartic, DEFAULT_BUDGET};
use quartic_core::special::{
    bitangency_classification, bitangents, flexes_rational, geometric_flexes, is_galois_point, two_rank,
};
use quartic_core::tangential::{aubry_margin, count_xc_points, xc_irreducibility_verdict};
use quartic_core::{Error, FieldCtx};

#[derive(Parser)]
#[command(name = "quartic", version, about = "Plane quartics over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one curve.
    Analyze(Single),
    /// Split-line sweep over random smooth curves.
    Thm1(Sweep),
    /// Split-tangent sweep over random smooth curves.
    Thm2(Sweep),
    /// Completely split fibers of the projection from a random point.
    Chebotarev(Sweep),
    /// Fraction of random curves with a rational flex.
    Flexprob(Sweep),
    /// Smooth pointless quartics over F_2 and the reducibility of X_C.
    CensusF2 {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[command(flatten)]
        out: Output,
    },
    /// Point counts and irreducibility verdict for X_C.
    Xc(Single),
    /// Named curves.
    Fixtures {
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Clone)]
struct Output {
    /// Write tables as CSV; the summary goes to stderr.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Sweep {
    /// `p[:n[:modulus]]`
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Single {
    /// `p[:n[:modulus]]`
    #[arg(long)]
    field: String,
    /// `expr:<polynomial>`, `coeffs:<encodings>`, `@<file>` or `fixture:<name>`
    #[arg(long)]
    curve: String,
    /// Largest extension degree searched. Without it points, flexes and X_C
    /// use degree 1 and bitangents the largest degree up to 6 with at most
    /// 2^20 lines.
    #[arg(long)]
    ext: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

/// Renders a parse error with a caret under the offending position.
fn annotate(what: &str, text: &str, e: Error) -> Failure {
    match e {
        Error::Parse { pos, msg } => Failure::Input(format!(
            "{what}: parse error at position {pos}: {msg}\n  {text}\n  {}^",
            " ".repeat(pos.min(text.len()))
        )),
        other => Failure::Input(format!("{what}: {other}")),
    }
}

fn parse_field(text: &str) -> Run<FieldCtx> {
    FieldCtx::from_descriptor(text).map_err(|e| annotate("field", text, e))
}

fn read_curve_file(path: &str) -> Run<String> {
    let body = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("curve file {path}: {e}")))?;
    Ok(body
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" "))
}

fn parse_curve(source: &str, k: &FieldCtx) -> Run<PlaneQuartic> {
    let form = if let Some(name) = source.strip_prefix("fixture:") {
        return Ok(fixtures::by_name(name, Some(k))?);
    } else if let Some(text) = source.strip_prefix("expr:") {
        parse_ternary(text, k).map_err(|e| annotate("curve", text, e))?
    } else if let Some(text) = source.strip_prefix("coeffs:") {
        parse_coefficients(text, 4, k).map_err(|e| annotate("curve", text, e))?
    } else if let Some(path) = source.strip_prefix('@') {
        let text = read_curve_file(path)?;
        parse_ternary(&text, k).map_err(|e| annotate("curve", &text, e))?
    } else {
        return Err(Failure::Input(format!(
            "curve source must start with expr:, coeffs:, @ or fixture:, got {source:?}"
        )));
    };
    Ok(PlaneQuartic::new(form)?)
}

struct Sink {
    w: Box<dyn Write>,
    csv: bool,
}

impl Sink {
    fn open(out: &Option<PathBuf>, csv: bool) -> Run<Sink> {
        let w: Box<dyn Write> = match out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { w, csv })
    }

    fn line(&mut self, v: &Value) -> Run<()> {
        writeln!(self.w, "{v}")?;
        Ok(())
    }

    fn rows<T: Serialize>(&mut self, rows: &[T]) -> Run<()> {
        if self.csv {
            lab::write_csv(rows, &mut self.w)?;
        } else {
            for r in rows {
                writeln!(self.w, "{}", serde_json::to_string(r).map_err(io::Error::other)?)?;
            }
        }
        Ok(())
    }

    /// Trailing summary: a JSONL line, or stderr in CSV mode.
    fn summary(&mut self, v: Value) -> Run<()> {
        let v = json!({ "summary": v });
        if self.csv {
            eprintln!("{v}");
        } else {
            self.line(&v)?;
        }
        self.w.flush()?;
        Ok(())
    }
}

fn config(s: &Sweep) -> Run<ExperimentConfig> {
    Ok(ExperimentConfig { field: parse_field(&s.field)?, samples: s.samples, seed: s.seed, budget: s.budget })
}

fn sweep_summary(name: &str, cfg: &ExperimentConfig, rows: usize, violations: usize) -> Value {
    json!({
        "experiment": name,
        "field": cfg.field.descriptor(),
        "q": cfg.field.order().to_string(),
        "samples": cfg.samples,
        "seed": cfg.seed,
        "rows": rows,
        "violations": violations,
    })
}

fn section(name: &str, r: quartic_core::Result<Value>) -> Value {
    let mut v = r.unwrap_or_else(|e| json!({ "error": e.to_string() }));
    v.as_object_mut().expect("object").insert("section".into(), json!(name));
    v
}

impl Single {
    fn ext(&self) -> usize {
        self.ext.unwrap_or(1)
    }

    fn bitangent_ext(&self, q: u128) -> usize {
        self.ext.unwrap_or_else(|| {
            (1..=6).take_while(|&e| q.checked_pow(2 * e as u32).is_some_and(|n| n <= self.budget.min(1 << 20))).last().unwrap_or(1)
        })
    }
}

fn analyze(a: &Single) -> Run<u8> {
    let k = parse_field(&a.field)?;
    let c = parse_curve(&a.curve, &k)?;
    let mut sink = Sink::open(&a.out, false)?;
    let sm = c.smoothness();
    sink.line(&json!({
        "section": "curve",
        "field": k.descriptor(),
        "q": k.order().to_string(),
        "form": serialize_ternary(c.form()),
        "coeffs": quartic_core::forms::coefficient_text(c.form()),
        "smooth": sm.smooth,
        "singular_point": sm.witness.as_ref().map(|w| json!({ "point": w.point.to_string(), "degree": w.degree })),
    }))?;
    if !sm.smooth {
        sink.summary(json!({ "command": "analyze", "smooth": false }))?;
        return Ok(0);
    }
    let counts = (1..=a.ext())
        .map(|d| {
            let f = FieldCtx::extension_of_degree(&k, d)?;
            Ok(json!({ "degree": d, "count": c.count_points(&f, a.budget)? }))
        })
        .collect::<quartic_core::Result<Vec<_>>>();
    sink.line(&section("points", counts.map(|v| json!({ "counts": v }))))?;

    let contact = (1..=a.ext())
        .map(|d| flexes_rational(&c, d, a.budget))
        .collect::<quartic_core::Result<Vec<_>>>();
    let rational_contact = contact.as_ref().ok().map(|v| v[0].len());
    sink.line(&section(
        "flexes_contact",
        contact.map(|v| {
            json!({ "by_degree": v.iter().enumerate().map(|(i, fl)| json!({
                "degree": i + 1,
                "count": fl.len(),
                "flexes": fl.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>() })
        }),
    ))?;
    let geo = geometric_flexes(&c, a.budget).map(|g| {
        let rational = g.records.iter().filter(|r| r.degree == 1).count();
        json!({
            "method": g.method,
            "count": g.count,
            "weight_sum": g.weight_sum,
            "rational": rational,
            "agrees_with_contact": rational_contact.map(|n| n == rational),
            "closed_points": g.records.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        })
    });
    sink.line(&section("flexes_geometric", geo))?;

    let bext = a.bitangent_ext(k.order());
    let bts = bitangents(&c, bext, a.budget).map(|b| {
        let base = b.iter().filter(|r| r.degree == 1).count();
        json!({
            "max_degree": bext,
            "rational": base,
            "two_rank": if k.characteristic() == 2 { two_rank(base) } else { None },
            "lines": b.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        })
    });
    sink.line(&section("bitangents", bts))?;
    let cls = bitangency_classification(&c, bext, a.budget).map(|b| {
        json!({
            "non_hyperflex_bitangency_point": b.has_non_hyperflex_bitangency_point,
            "exceptional_family": b.exceptional_family,
        })
    });
    sink.line(&section("classification", cls))?;

    let line = find_split_line(&c).map(|d| json!({ "found": d.is_some(), "divisor": d.map(|d| d.to_json()) }));
    sink.line(&section("split_line", line))?;
    let tangent = find_split_tangent(&c, a.budget).map(|s| {
        json!({
            "found": s.is_some(),
            "point": s.as_ref().map(|s| s.point.to_string()),
            "divisor": s.map(|s| s.divisor.to_json()),
        })
    });
    sink.line(&section("split_tangent", tangent))?;

    let pencil = c.points_over(&k, a.budget).and_then(|pts| {
        if pts.is_empty() {
            return Ok(json!({ "point": null }));
        }
        let p = &pts[(lab::sample_seed(a.seed, 0) % pts.len() as u64) as usize];
        let g = is_galois_point(&c, p, 2)?;
        let r = pencil_report(&c, p)?;
        Ok(json!({
            "galois": g.verdict.as_str(),
            "galois_evidence": g.evidence,
            "report": r,
        }))
    });
    sink.line(&section("pencil", pencil))?;

    sink.line(&section("xc", xc_report(&c, a)))?;
    sink.summary(json!({ "command": "analyze", "smooth": true }))?;
    Ok(0)
}

fn xc_report(c: &PlaneQuartic, a: &Single) -> quartic_core::Result<Value> {
    let q = c.ctx().order();
    let counts = (1..=a.ext())
        .map(|m| {
            let n = count_xc_points(c, m, a.budget)?;
            Ok(json!({ "m": m, "count": n.to_string(), "aubry_margin": aubry_margin(q, m, n) }))
        })
        .collect::<quartic_core::Result<Vec<_>>>()?;
    let census = xc_irreducibility_verdict(c, a.budget)?;
    Ok(json!({ "counts": counts, "census": census }))
}

fn xc(a: &Single) -> Run<u8> {
    let k = parse_field(&a.field)?;
    let c = parse_curve(&a.curve, &k)?;
    if !c.is_smooth() {
        return Err(Failure::Input("curve is not smooth".into()));
    }
    let mut sink = Sink::open(&a.out, false)?;
    let r = xc_report(&c, a)?;
    let verdict = r["census"]["verdict"].clone();
    sink.line(&r)?;
    sink.summary(json!({ "command": "xc", "verdict": verdict }))?;
    Ok(0)
}

fn verdict_code(violations: usize) -> u8 {
    u8::from(violations > 0)
}

#[derive(Serialize)]
struct CensusCsvRow {
    key: u16,
    orbit_size: usize,
    verdict: String,
    m0: usize,
    count0: String,
    m1: usize,
    count1: String,
    frobenius_nonclassical: bool,
    klein_twist: Option<u8>,
    representative: String,
}

fn census(budget: u128, out: &Output) -> Run<u8> {
    let c = lab::f2_census(budget)?;
    let mut sink = Sink::open(&out.out, out.csv)?;
    if out.csv {
        let rows: Vec<CensusCsvRow> = c
            .classes
            .iter()
            .map(|cl| CensusCsvRow {
                key: cl.key,
                orbit_size: cl.orbit_size,
                verdict: serde_json::to_value(cl.verdict).unwrap().as_str().unwrap_or_default().into(),
                m0: cl.counts.first().map(|x| x.0).unwrap_or(0),
                count0: cl.counts.first().map(|x| x.1.to_string()).unwrap_or_default(),
                m1: cl.counts.get(1).map(|x| x.0).unwrap_or(0),
                count1: cl.counts.get(1).map(|x| x.1.to_string()).unwrap_or_default(),
                frobenius_nonclassical: cl.frobenius_nonclassical,
                klein_twist: cl.klein_twist,
                representative: cl.representative.clone(),
            })
            .collect();
        sink.rows(&rows)?;
    } else {
        sink.rows(&c.classes)?;
    }
    sink.summary(json!({
        "experiment": "census-f2",
        "forms": c.forms,
        "orbits": c.orbits,
        "smooth_forms": c.smooth_forms,
        "smooth_pointless_forms": c.smooth_pointless_forms,
        "pointless_classes": c.classes.len(),
        "reducible": c.reducible,
        "klein_keys": c.klein_keys,
        "matches_klein": c.matches_klein,
    }))?;
    Ok(u8::from(!c.matches_klein))
}

fn fixtures_cmd(field: &Option<String>, out: &Output) -> Run<u8> {
    let k = field.as_deref().map(parse_field).transpose()?;
    let mut rows = Vec::new();
    for name in fixtures::NAMES {
        match fixtures::by_name(name, k.as_ref()) {
            Ok(c) => rows.push(json!({
                "name": name,
                "field": c.ctx().descriptor(),
                "form": serialize_ternary(c.form()),
                "smooth": c.is_smooth(),
            })),
            Err(Error::Invalid(_) | Error::WrongCharacteristic(_)) if k.is_some() => {}
            Err(e) => return Err(e.into()),
        }
    }
    let mut sink = Sink::open(&out.out, out.csv)?;
    if out.csv {
        #[derive(Serialize)]
        struct Row<'a> {
            name: &'a str,
            field: &'a str,
            form: &'a str,
            smooth: bool,
        }
        let table: Vec<Row> = rows
            .iter()
            .map(|r| Row {
                name: r["name"].as_str().unwrap(),
                field: r["field"].as_str().unwrap(),
                form: r["form"].as_str().unwrap(),
                smooth: r["smooth"].as_bool().unwrap(),
            })
            .collect();
        sink.rows(&table)?;
    } else {
        sink.rows(&rows)?;
    }
    sink.summary(json!({ "command": "fixtures", "count": rows.len() }))?;
    Ok(0)
}

fn run(cli: Cli) -> Run<u8> {
    let start = Instant::now();
    let code = match &cli.cmd {
        Command::Analyze(a) => analyze(a)?,
        Command::Xc(a) => xc(a)?,
        Command::Thm1(s) => {
            let cfg = config(s)?;
            let r = lab::split_line_sweep(&cfg)?;
            let mut sink = Sink::open(&s.out.out, s.out.csv)?;
            sink.rows(&r.rows)?;
            sink.summary(sweep_summary("thm1", &cfg, r.rows.len(), r.violations))?;
            verdict_code(r.violations)
        }
        Command::Thm2(s) => {
            let cfg = config(s)?;
            let r = lab::split_tangent_sweep(&cfg)?;
            let mut sink = Sink::open(&s.out.out, s.out.csv)?;
            sink.rows(&r.rows)?;
            sink.summary(sweep_summary("thm2", &cfg, r.rows.len(), r.violations))?;
            verdict_code(r.violations)
        }
        Command::Chebotarev(s) => {
            let cfg = config(s)?;
            let r = lab::chebotarev_survey(&cfg)?;
            let mut sink = Sink::open(&s.out.out, s.out.csv)?;
            sink.rows(&r.rows)?;
            let mut sum = sweep_summary("chebotarev", &cfg, r.rows.len(), r.violations);
            sum["split_tangent_rows"] = json!(r.rows.iter().filter(|x| x.split_tangent).count());
            sum["flagged_rows"] = json!(r.rows.iter().filter(|x| x.flagged).count());
            sink.summary(sum)?;
            verdict_code(r.violations)
        }
        Command::Flexprob(s) => {
            let cfg = config(s)?;
            let r = lab::flex_probability_survey(&cfg)?;
            let mut sink = Sink::open(&s.out.out, s.out.csv)?;
            sink.rows(&r.rows)?;
            let mut sum = sweep_summary("flexprob", &cfg, r.rows.len(), 0);
            sum["estimate"] = json!(r.estimate);
            sum["interval"] = json!(r.interval);
            sum["reference_name"] = json!(r.reference_name);
            sum["reference"] = json!(r.reference);
            sink.summary(sum)?;
            0
        }
        Command::CensusF2 { budget, out } => census(*budget, out)?,
        Command::Fixtures { field, out } => fixtures_cmd(field, out)?,
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
