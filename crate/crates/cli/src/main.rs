use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use splitcone::cone::{self, Membership, OrderedPartition};
use splitcone::cry::{self, CryError};
use splitcone::io::{self, IoError, SystemFile};
use splitcone::metric::{self, check_equidistant, full_matrix, QuadrupleWitness};
use splitcone::netviz::{self, EdgeLabel, SplitNetwork};
use splitcone::rational::{self, Rational};
use splitcone::split::{complete_system, Split, SplitSystem};
use splitcone::xdiagram::{self, Indicator, XDiagram};
use splitcone::DissimilarityMatrix;

#[derive(Parser)]
#[command(name = "splitcone", version, about = "Equidistant circular split networks in exact arithmetic")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Input {
    /// Input file (same as --input).
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,
    #[arg(long = "input", value_name = "FILE", conflicts_with = "file")]
    input: Option<PathBuf>,
}

impl Input {
    fn path(&self) -> Result<&Path> {
        self.file
            .as_deref()
            .or(self.input.as_deref())
            .ok_or_else(|| anyhow!("an input file is required"))
    }

    fn read(&self) -> Result<String> {
        let path = self.path()?;
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

/// A split system given either as a file or as `--n` with `--splits`.
#[derive(Args)]
struct SystemInput {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    n: Option<usize>,
    /// Non-trivial splits as `lo-hi`, comma separated.
    #[arg(long, requires = "n")]
    splits: Option<String>,
}

impl SystemInput {
    fn load(&self) -> Result<SystemFile> {
        if let Some(n) = self.n {
            if self.input.file.is_some() || self.input.input.is_some() {
                bail!("give either an input file or --n, not both");
            }
            let list = io::parse_split_list(self.splits.as_deref().unwrap_or(""), n)?;
            let system = SplitSystem::with_trivials(n, list.into_iter().filter(|s| !s.is_trivial()))?;
            return Ok(SystemFile { system, weights: None });
        }
        Ok(io::parse_system_json(&self.input.read()?)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tree, circular and metric tests of a dissimilarity matrix.
    Classify {
        #[command(subcommand)]
        test: ClassifyTest,
    },
    /// Recover equidistant weights on KN_n from a matrix, or with --system
    /// compute the matrix of a weighted split system.
    Weights {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        system: bool,
    },
    /// Facet inequalities of the equidistant cone.
    Facets {
        #[arg(long)]
        n: usize,
    },
    /// Extreme rays r_τ, one record per fixed-order partition.
    Rays {
        #[arg(long)]
        n: usize,
        /// Also list the facets containing each ray.
        #[arg(long)]
        incidence: bool,
    },
    /// Position of a matrix relative to the cone or to a face of it.
    Membership {
        #[command(flatten)]
        input: Input,
        /// Split system file describing the face.
        #[arg(long, value_name = "FILE")]
        system: Option<PathBuf>,
    },
    /// Conic combination of rays summing to the matrix.
    Decompose {
        #[command(flatten)]
        input: Input,
    },
    /// Rays of the face of a split system.
    Face {
        #[command(flatten)]
        system: SystemInput,
    },
    Xdiagram {
        #[command(subcommand)]
        action: XdiagramAction,
    },
    Cry {
        #[command(subcommand)]
        action: CryAction,
    },
    Net {
        #[command(subcommand)]
        action: NetAction,
    },
}

#[derive(Subcommand)]
enum ClassifyTest {
    FourPoint {
        #[command(flatten)]
        input: Input,
        /// Report the three pair sums of this quadruple, e.g. `1,2,3,4`.
        #[arg(long)]
        quadruple: Option<String>,
    },
    Kalmanson {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        quadruple: Option<String>,
        /// Search all circular orderings (n <= 8) instead of the identity.
        #[arg(long)]
        exhaustive_orderings: bool,
    },
    Metric {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand)]
enum XdiagramAction {
    /// X-diagram of a matrix.
    Show {
        #[command(flatten)]
        input: Input,
    },
    /// Local rule check of a diagram file or of the diagram of a matrix.
    Check {
        #[command(flatten)]
        input: Input,
    },
    /// Ray whose tight facets include the diagram's tight set.
    Ray {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Subcommand)]
enum CryAction {
    /// CRY matrix (square CSV) to its PEDC point.
    Phi {
        #[command(flatten)]
        input: Input,
    },
    /// PEDC point (matrix file) to its CRY matrix.
    Psi {
        #[command(flatten)]
        input: Input,
    },
    /// The 2^(n-1) vertices of both polytopes.
    Vertices {
        #[arg(long)]
        n: usize,
    },
    /// Normalized volume, n <= 5.
    Volume {
        #[arg(long)]
        n: usize,
    },
    /// Ehrhart coefficients; with --dilation, lattice counts of the dilate.
    Ehrhart {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dilation: Option<usize>,
    },
}

#[derive(Subcommand)]
enum NetAction {
    /// Split network of a system, splits inserted in --order.
    Build {
        #[command(flatten)]
        system: SystemInput,
        #[arg(long)]
        order: Option<String>,
    },
    /// Checks a network file, or the network built from a system file.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        order: Option<String>,
    },
    /// SVG of the dual polygon.
    RenderPolygon {
        #[command(flatten)]
        system: SystemInput,
    },
    /// Graphviz description of a network file or of a system's network.
    RenderGraph {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        order: Option<String>,
    },
}

/// Command result in all three formats.
struct Report {
    text: String,
    json: Value,
    csv: String,
}

impl Report {
    /// Format-independent documents such as SVG and DOT.
    fn raw(text: String) -> Self {
        Report { json: Value::String(text.clone()), csv: text.clone(), text }
    }
}

/// Input errors end with exit code 2, domain failures with 1.
enum Failure {
    Input(anyhow::Error),
    Domain(Report),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn verdict(ok: bool, report: Report) -> Outcome {
    if ok {
        Ok(report)
    } else {
        Err(Failure::Domain(report))
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory writer");
    for row in rows {
        w.write_record(&row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

fn fmt_q(v: &Rational) -> String {
    rational::format(v)
}

fn fmt_split(s: &Split, n: usize) -> String {
    format!("{}-{} ({})", s.lo(), s.hi(), s.set_notation(n))
}

fn split_json(s: &Split) -> Value {
    json!([s.lo(), s.hi()])
}

fn load_matrix(input: &Input) -> Result<DissimilarityMatrix> {
    let path = input.path()?;
    io::parse_matrix(&input.read()?).with_context(|| format!("{}", path.display()))
}

fn parse_quadruple(text: &str, n: usize) -> Result<[usize; 4]> {
    let v: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("--quadruple: {e}"))?;
    match v.as_slice() {
        &[i, j, k, l] if 1 <= i && i < j && j < k && k < l && l <= n => Ok([i, j, k, l]),
        _ => bail!("--quadruple needs four increasing taxa in 1..={n}"),
    }
}

fn sums_json(sums: &[Rational; 3]) -> Value {
    sums.iter().map(rational::to_json).collect()
}

fn sums_text(sums: &[Rational; 3]) -> String {
    sums.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

fn quadruple_text(q: [usize; 4]) -> String {
    q.map(|t| t.to_string()).join(",")
}

/// Shared shape of the four-point and Kalmanson reports.
fn quadruple_report(
    holds: bool,
    witness: Option<QuadrupleWitness>,
    probe: Option<([usize; 4], [Rational; 3])>,
    extra: Vec<(String, Value)>,
) -> Outcome {
    let mut text = format!("{holds}\n");
    let mut doc = json!({ "holds": holds });
    let mut rows = Vec::new();
    if let Some(w) = &witness {
        text.push_str(&format!("violated at {}: sums {}\n", quadruple_text(w.quadruple), sums_text(&w.sums)));
        doc["witness"] = json!({ "quadruple": w.quadruple, "sums": sums_json(&w.sums) });
        rows.push(row("witness", w.quadruple, &w.sums));
    }
    if let Some((q, sums)) = &probe {
        text.push_str(&format!("quadruple {}: sums {}\n", quadruple_text(*q), sums_text(sums)));
        doc["quadruple"] = json!({ "quadruple": q, "sums": sums_json(sums) });
        rows.push(row("quadruple", *q, sums));
    }
    for (key, v) in extra {
        text.push_str(&format!("{key}: {}\n", plain(&v)));
        doc[key] = v;
    }
    let report = Report {
        text,
        json: doc,
        csv: csv_table(&["holds", "kind", "i", "j", "k", "l", "s1", "s2", "s3"], {
            if rows.is_empty() {
                rows.push(vec![String::new(); 8]);
            }
            rows.into_iter().map(|r| std::iter::once(holds.to_string()).chain(r).collect())
        }),
    };
    verdict(holds, report)
}

fn row(kind: &str, q: [usize; 4], sums: &[Rational; 3]) -> Vec<String> {
    let mut r = vec![kind.to_string()];
    r.extend(q.iter().map(usize::to_string));
    r.extend(sums.iter().map(fmt_q));
    r
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn classify(test: &ClassifyTest) -> Outcome {
    match test {
        ClassifyTest::FourPoint { input, quadruple } => {
            let d = load_matrix(input)?;
            let probe = match quadruple {
                Some(q) => {
                    let q = parse_quadruple(q, d.n())?;
                    Some((q, metric::quadruple_sums(&d, q)))
                }
                None => None,
            };
            let c = metric::check_four_point(&d);
            quadruple_report(c.holds, c.witness, probe, Vec::new())
        }
        ClassifyTest::Kalmanson { input, quadruple, exhaustive_orderings } => {
            let d = load_matrix(input)?;
            let probe = match quadruple {
                Some(q) => {
                    let q = parse_quadruple(q, d.n())?;
                    Some((q, metric::kalmanson_sums(&d, q)))
                }
                None => None,
            };
            if *exhaustive_orderings {
                let order = metric::kalmanson_ordering(&d)?;
                let extra = match &order {
                    Some(o) => vec![("ordering".to_string(), json!(o))],
                    None => Vec::new(),
                };
                return quadruple_report(order.is_some(), None, probe, extra);
            }
            let c = metric::check_kalmanson(&d);
            quadruple_report(c.holds, c.witness, probe, Vec::new())
        }
        ClassifyTest::Metric { input } => {
            let d = load_matrix(input)?;
            let c = metric::check_metric(&d);
            let mut text = format!("{}\n", c.holds);
            let mut doc = json!({ "holds": c.holds });
            let mut csv_row = vec![c.holds.to_string(), String::new(), String::new(), String::new()];
            if let Some([x, y, z]) = c.witness {
                text.push_str(&format!(
                    "δ({x},{z}) = {} > δ({x},{y}) + δ({y},{z}) = {}\n",
                    fmt_q(&d.get(x, z)),
                    fmt_q(&(d.get(x, y) + d.get(y, z)))
                ));
                doc["witness"] = json!([x, y, z]);
                csv_row = vec![c.holds.to_string(), x.to_string(), y.to_string(), z.to_string()];
            }
            let report = Report { text, json: doc, csv: csv_table(&["holds", "x", "y", "z"], [csv_row]) };
            verdict(c.holds, report)
        }
    }
}

fn matrix_text(d: &DissimilarityMatrix) -> String {
    io::matrix_to_csv(d)
}

fn weights(input: &Input, system: bool) -> Outcome {
    if system {
        let file = io::parse_system_json(&input.read()?)?;
        let w = file.weights.ok_or_else(|| anyhow!("the system file carries no weights"))?;
        let fm = full_matrix(&file.system, &w)?;
        let eq = check_equidistant(&file.system, &w);
        let root: Vec<String> = fm.root.iter().map(fmt_q).collect();
        let mut text = matrix_text(&fm.matrix);
        text.push_str(&format!("root distances: {}\n", root.join(" ")));
        text.push_str(&format!("equidistant: {}\n", eq.holds));
        let doc = json!({
            "matrix": io::matrix_to_json(&fm.matrix),
            "root": fm.root.iter().map(rational::to_json).collect::<Vec<_>>(),
            "equidistant": eq.holds,
        });
        return Ok(Report { text, json: doc, csv: io::matrix_to_csv(&fm.matrix) });
    }
    let d = load_matrix(input)?;
    if d.n() < 2 {
        return Err(anyhow!("weight recovery needs n >= 2").into());
    }
    let n = d.n();
    let w = cone::recover_weights(&d);
    let kn = complete_system(n);
    let ok = w.is_nonnegative();
    let mut text = String::new();
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for s in kn.splits() {
        let v = w.get(s);
        text.push_str(&format!("{}: {}\n", fmt_split(s, n), fmt_q(&v)));
        records.push(json!({ "split": split_json(s), "weight": rational::to_json(&v) }));
        rows.push(vec![s.lo().to_string(), s.hi().to_string(), fmt_q(&v)]);
    }
    let reproduces = ok && full_matrix(&kn, &w).map(|fm| fm.matrix == d).unwrap_or(false);
    let root = check_equidistant(&kn, &w).root_distance;
    let mut doc = json!({ "in_cone": ok, "reproduces": reproduces, "weights": records });
    if let Some(r) = &root {
        text.push_str(&format!("root distance: {}\n", fmt_q(r)));
        doc["root_distance"] = rational::to_json(r);
    }
    if !ok {
        let negative: Vec<String> = w.iter().filter(|(_, v)| v.is_negative()).map(|(s, _)| s.to_string()).collect();
        text.push_str(&format!("not in the cone: negative weights on {}\n", negative.join(" ")));
    }
    let report = Report { text, json: doc, csv: csv_table(&["lo", "hi", "weight"], rows) };
    verdict(ok, report)
}

fn facets(n: usize) -> Outcome {
    let list = cone::facets(n)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    for f in &list {
        let s = f.paired_split(n);
        text.push_str(&format!("{f}: {}  [split {}]\n", f.inequality(n), fmt_split(&s, n)));
        let mut doc = f.to_json(n);
        doc["inequality"] = Value::String(f.inequality(n));
        docs.push(doc);
        rows.push(vec![f.kind_name().to_string(), f.to_string(), s.lo().to_string(), s.hi().to_string(), f.inequality(n)]);
    }
    Ok(Report { text, json: Value::Array(docs), csv: csv_table(&["kind", "facet", "lo", "hi", "inequality"], rows) })
}

fn upper_text(d: &DissimilarityMatrix) -> String {
    d.upper().iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

fn rays(n: usize, incidence: bool) -> Outcome {
    if !(2..=63).contains(&n) {
        return Err(anyhow!("rays need 2 <= n <= 63").into());
    }
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    for t in cone::all_rays(n) {
        let r = cone::ray_vector(&t);
        let cuts: Vec<String> = t.cuts().iter().map(usize::to_string).collect();
        let mut line = format!("{t}: {}", upper_text(&r));
        let mut doc = json!({ "tau": t.to_string(), "cuts": t.cuts(), "vector": r.upper().iter().map(rational::to_json).collect::<Vec<_>>() });
        let mut row = vec![t.to_string(), cuts.join(" "), upper_text(&r)];
        if incidence {
            let on: Vec<String> = cone::facet_incidence(&t, n).iter().map(ToString::to_string).collect();
            line.push_str(&format!("  on {}", on.join(" ")));
            doc["facets"] = json!(on);
            row.push(on.join(" "));
        }
        text.push_str(&line);
        text.push('\n');
        docs.push(doc);
        rows.push(row);
    }
    let header: &[&str] = if incidence { &["tau", "cuts", "vector", "facets"] } else { &["tau", "cuts", "vector"] };
    Ok(Report { text, json: Value::Array(docs), csv: csv_table(header, rows) })
}

fn membership(input: &Input, system: Option<&Path>) -> Outcome {
    let d = load_matrix(input)?;
    let sys = match system {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            io::parse_system_json(&text)?.system
        }
        None => complete_system(d.n()),
    };
    if sys.n() != d.n() {
        return Err(cone::ConeError::SizeMismatch { matrix: d.n(), system: sys.n() }.into());
    }
    let n = d.n();
    let m = cone::membership(&d, &sys);
    let (ok, text, doc, rows) = match &m {
        Membership::Interior => (true, "interior\n".to_string(), json!({ "status": "interior" }), vec![vec!["interior".into(), String::new()]]),
        Membership::OnFace(face) => {
            let splits: Vec<String> = face.non_trivial().map(|s| fmt_split(s, n)).collect();
            let text = format!("face\nsplits: {}\n", splits.join(", "));
            let doc = json!({ "status": "face", "splits": face.non_trivial().map(split_json).collect::<Vec<_>>() });
            let rows = face.non_trivial().map(|s| vec!["face".into(), format!("{}-{}", s.lo(), s.hi())]).collect();
            (true, text, doc, rows)
        }
        Membership::Outside(v) => {
            let reasons: Vec<String> = v.iter().map(ToString::to_string).collect();
            let text = format!("outside\n{}\n", reasons.join("\n"));
            let doc = json!({ "status": "outside", "violations": reasons });
            let rows = reasons.iter().map(|r| vec!["outside".into(), r.clone()]).collect();
            (false, text, doc, rows)
        }
    };
    let report = Report { text, json: doc, csv: csv_table(&["status", "detail"], rows) };
    verdict(ok, report)
}

fn decompose(input: &Input) -> Outcome {
    let d = load_matrix(input)?;
    match cone::decompose(&d) {
        Ok(terms) => {
            let text: String = terms.iter().map(|t| format!("{} * r[{}]\n", fmt_q(&t.coefficient), t.tau)).collect();
            let rows = terms.iter().map(|t| vec![fmt_q(&t.coefficient), t.tau.to_string()]);
            Ok(Report {
                text,
                json: Value::Array(terms.iter().map(cone::Term::to_json).collect()),
                csv: csv_table(&["coefficient", "tau"], rows),
            })
        }
        Err(cone::ConeError::NotInCone(reason)) => {
            let text = format!("outside the cone: {reason}\n");
            Err(Failure::Domain(Report {
                json: json!({ "in_cone": false, "reason": reason }),
                csv: csv_table(&["reason"], [vec![reason.clone()]]),
                text,
            }))
        }
        Err(e) => Err(e.into()),
    }
}

fn partition_records(list: &[OrderedPartition]) -> (String, Value, String) {
    let text: String = list.iter().map(|t| format!("{t}\n")).collect();
    let doc = list.iter().map(|t| json!({ "tau": t.to_string(), "cuts": t.cuts() })).collect();
    let rows = list.iter().map(|t| vec![t.to_string(), t.cuts().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")]);
    (text, doc, csv_table(&["tau", "cuts"], rows))
}

fn face(system: &SystemInput) -> Outcome {
    let sys = system.load()?.system;
    if sys.n() < 2 {
        return Err(anyhow!("faces need n >= 2").into());
    }
    let (text, json, csv) = partition_records(&cone::rays_of_face(&sys));
    Ok(Report { text, json, csv })
}

fn is_diagram(text: &str) -> bool {
    serde_json::from_str::<Value>(text)
        .map(|v| ["f", "g", "h"].iter().any(|k| v.get(k).is_some()))
        .unwrap_or(false)
}

fn load_diagram(input: &Input) -> Result<XDiagram> {
    let text = input.read()?;
    if is_diagram(&text) {
        Ok(io::parse_xdiagram_json(&text)?)
    } else {
        Ok(xdiagram::xdiagram_of(&io::parse_matrix(&text)?))
    }
}

fn diagram_rows(x: &XDiagram) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (name, which) in [("f", Indicator::F), ("g", Indicator::G), ("h", Indicator::H)] {
        for (&(k, l), &v) in x.map(which) {
            rows.push(vec![name.to_string(), k.to_string(), l.to_string(), u8::from(v).to_string()]);
        }
    }
    rows
}

fn xdiagram_cmd(action: &XdiagramAction) -> Outcome {
    match action {
        XdiagramAction::Show { input } => {
            let d = load_matrix(input)?;
            let x = xdiagram::xdiagram_of(&d);
            let mut text = xdiagram::render_ascii(&x);
            for (name, which) in [("f", Indicator::F), ("g", Indicator::G), ("h", Indicator::H)] {
                let ones: Vec<String> = x.ones(which).iter().map(|(k, l)| format!("({k},{l})")).collect();
                text.push_str(&format!("{name} = 1 at {}\n", ones.join(" ")));
            }
            Ok(Report { text, json: io::xdiagram_to_json(&x), csv: csv_table(&["map", "k", "l", "value"], diagram_rows(&x)) })
        }
        XdiagramAction::Check { input } => {
            let x = load_diagram(input)?;
            let v = xdiagram::check_rules(&x);
            let ok = v.is_empty();
            let entry = |(which, (k, l), value): &(Indicator, (usize, usize), bool)| format!("{which}({k},{l})={}", u8::from(*value));
            let mut text = format!("{ok}\n");
            let mut docs = Vec::new();
            let mut rows = Vec::new();
            for r in &v {
                let entries: Vec<String> = r.entries.iter().map(entry).collect();
                text.push_str(&format!("rule {}: {}\n", r.rule, entries.join(" ")));
                docs.push(json!({ "rule": r.rule, "entries": entries }));
                rows.push(vec![r.rule.to_string(), entries.join(" ")]);
            }
            let report = Report { text, json: json!({ "holds": ok, "violations": docs }), csv: csv_table(&["rule", "entries"], rows) };
            verdict(ok, report)
        }
        XdiagramAction::Ray { input } => {
            let x = load_diagram(input)?;
            match xdiagram::ray_for_tight_set(&x) {
                Ok(Some(t)) => {
                    let r = cone::ray_vector(&t);
                    Ok(Report {
                        text: format!("{t}\n{}", matrix_text(&r)),
                        json: json!({ "tau": t.to_string(), "cuts": t.cuts(), "ray": io::matrix_to_json(&r) }),
                        csv: csv_table(&["tau", "vector"], [vec![t.to_string(), upper_text(&r)]]),
                    })
                }
                Ok(None) => Ok(Report {
                    text: "zero: every facet is tight\n".into(),
                    json: json!({ "tau": Value::Null }),
                    csv: csv_table(&["tau", "vector"], [vec![String::new(), String::new()]]),
                }),
                Err(e @ xdiagram::XDiagramError::InvalidTightSet) => Err(Failure::Domain(Report {
                    text: format!("{e}\n"),
                    json: json!({ "error": e.to_string() }),
                    csv: csv_table(&["error"], [vec![e.to_string()]]),
                })),
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn cry_rows_json(x: &cry::CryMatrix) -> Value {
    x.rows().iter().map(|r| r.iter().map(rational::to_json).collect::<Vec<_>>()).collect()
}

fn not_in_polytope(e: CryError) -> Failure {
    match e {
        CryError::NotInCry { .. } | CryError::NotInPolytope { .. } => Failure::Domain(Report {
            text: format!("{e}\n"),
            json: json!({ "error": e.to_string() }),
            csv: csv_table(&["error"], [vec![e.to_string()]]),
        }),
        other => Failure::Input(other.into()),
    }
}

fn permutation(x: &cry::CryMatrix) -> Vec<usize> {
    x.rows().iter().map(|r| r.iter().position(|v| !v.is_zero()).map_or(0, |j| j + 1)).collect()
}

fn cry_cmd(action: &CryAction) -> Outcome {
    match action {
        CryAction::Phi { input } => {
            let x = match io::parse_cry_csv(&input.read()?) {
                Ok(x) => x,
                Err(IoError::Cry(e)) => return Err(not_in_polytope(e)),
                Err(e) => return Err(e.into()),
            };
            let d = cry::phi(&x).into_matrix();
            Ok(Report { text: matrix_text(&d), json: io::matrix_to_json(&d), csv: io::matrix_to_csv(&d) })
        }
        CryAction::Psi { input } => {
            let d = load_matrix(input)?;
            let x = cry::psi_of(&d).map_err(not_in_polytope)?;
            Ok(Report {
                text: io::cry_to_csv(&x),
                json: json!({ "n": x.n(), "x": cry_rows_json(&x) }),
                csv: io::cry_to_csv(&x),
            })
        }
        CryAction::Vertices { n } => {
            if !(2..=63).contains(n) {
                return Err(anyhow!("vertices need 2 <= n <= 63").into());
            }
            let labels: Vec<String> = std::iter::once((1..=*n).map(|t| t.to_string()).collect::<Vec<_>>().join(if *n >= 10 { "," } else { "" }))
                .chain(cone::all_rays(*n).iter().map(ToString::to_string))
                .collect();
            let mut text = String::new();
            let mut docs = Vec::new();
            let mut rows = Vec::new();
            for ((label, x), p) in labels.iter().zip(cry::cry_vertices(*n)).zip(cry::pedc_vertices(*n)) {
                let perm: Vec<String> = permutation(&x).iter().map(usize::to_string).collect();
                let image = cry::phi(&x);
                debug_assert_eq!(image, p);
                let vector = upper_text(p.matrix());
                text.push_str(&format!("{label}: permutation {} -> {vector}\n", perm.join(" ")));
                docs.push(json!({ "tau": label, "permutation": permutation(&x), "pedc": p.matrix().upper().iter().map(rational::to_json).collect::<Vec<_>>() }));
                rows.push(vec![label.clone(), perm.join(" "), vector]);
            }
            Ok(Report { text, json: Value::Array(docs), csv: csv_table(&["tau", "permutation", "pedc"], rows) })
        }
        CryAction::Volume { n } => {
            if *n < 2 || !cry::is_full_dimensional(*n) {
                return Err(anyhow!("volume needs a full-dimensional polytope, n >= 2").into());
            }
            let v = cry::normalized_volume(*n)?;
            let catalan = cry::catalan_product(*n);
            Ok(Report {
                text: format!("{}\n", fmt_q(&v)),
                json: json!({ "n": n, "volume": rational::to_json(&v), "catalan_product": catalan.to_string() }),
                csv: csv_table(&["n", "volume", "catalan_product"], [vec![n.to_string(), fmt_q(&v), catalan.to_string()]]),
            })
        }
        CryAction::Ehrhart { n, dilation } => {
            if let Some(t) = dilation {
                let c = cry::count_lattice_points(*n, *t)?;
                return Ok(Report {
                    text: format!("pedc: {}\ncry: {}\n", c.pedc, c.cry),
                    json: json!({ "n": n, "t": t, "pedc": c.pedc, "cry": c.cry }),
                    csv: csv_table(&["n", "t", "pedc", "cry"], [vec![n.to_string(), t.to_string(), c.pedc.to_string(), c.cry.to_string()]]),
                });
            }
            let poly = cry::ehrhart_polynomial(*n)?;
            let text: String = poly.iter().enumerate().map(|(k, c)| format!("t^{k}: {}\n", fmt_q(c))).collect();
            let rows = poly.iter().enumerate().map(|(k, c)| vec![k.to_string(), fmt_q(c)]);
            Ok(Report {
                text,
                json: json!({ "n": n, "coefficients": poly.iter().map(rational::to_json).collect::<Vec<_>>() }),
                csv: csv_table(&["degree", "coefficient"], rows),
            })
        }
    }
}

fn order_for(sys: &SplitSystem, order: Option<&str>) -> Result<Vec<Split>> {
    match order {
        Some(text) => Ok(io::parse_split_list(text, sys.n())?),
        None => Ok(netviz::default_order(sys)),
    }
}

/// A network file, or a system file whose network is built on the spot.
fn load_network(input: &Input, order: Option<&str>) -> Result<(SplitNetwork, Option<SystemFile>)> {
    let text = input.read()?;
    let doc: Value = serde_json::from_str(&text).map_err(IoError::from)?;
    if doc.get("edges").is_some() {
        if order.is_some() {
            bail!("--order applies to system files only");
        }
        return Ok((io::parse_network_json(&text)?, None));
    }
    let file = io::parse_system_json(&text)?;
    let g = netviz::build_network(&file.system, &order_for(&file.system, order)?)?;
    Ok((g, Some(file)))
}

fn network_text(g: &SplitNetwork) -> String {
    let mut out = format!("vertices: {}\nedges: {}\n", g.vertex_count(), g.edges().len());
    let leaves: Vec<String> = (0..=g.n()).map(|t| format!("{t}:v{}", g.leaf(t))).collect();
    out.push_str(&format!("leaves: {}\n", leaves.join(" ")));
    for (label, class) in g.edge_classes() {
        let edges: Vec<String> = class.iter().map(|&k| format!("v{}-v{}", g.edges()[k].u, g.edges()[k].v)).collect();
        out.push_str(&format!("{label}: {}\n", edges.join(" ")));
    }
    out
}

fn label_text(label: &EdgeLabel) -> String {
    match label {
        EdgeLabel::RootPendant => "root".into(),
        EdgeLabel::Split(s) => format!("{}-{}", s.lo(), s.hi()),
    }
}

fn net_cmd(action: &NetAction) -> Outcome {
    match action {
        NetAction::Build { system, order } => {
            let sys = system.load()?.system;
            let g = netviz::build_network(&sys, &order_for(&sys, order.as_deref())?)?;
            let rows = g.edges().iter().map(|e| vec![e.u.to_string(), e.v.to_string(), label_text(&e.label)]);
            Ok(Report { text: network_text(&g), json: io::network_to_json(&g), csv: csv_table(&["u", "v", "split"], rows) })
        }
        NetAction::Verify { input, order } => {
            let (g, source) = load_network(input, order.as_deref())?;
            let check = netviz::verify_split_graph(&g);
            let mut ok = check.holds;
            let mut text = format!("{}\n", check.holds);
            let mut doc = json!({ "holds": check.holds });
            let mut rows = vec![vec![check.holds.to_string(), String::new(), String::new()]];
            if let Some(f) = &check.witness {
                let label = f.label.as_ref().map_or_else(|| "-".to_string(), label_text);
                text.push_str(&format!("class {label}: {}\n", f.reason));
                doc["witness"] = json!({ "class": label, "reason": f.reason });
                rows = vec![vec!["false".into(), label, f.reason.clone()]];
            }
            if let (true, Some(SystemFile { system, weights: Some(w) })) = (check.holds, &source) {
                let mismatch = (0..=system.n())
                    .flat_map(|i| (i + 1..=system.n()).map(move |j| (i, j)))
                    .find(|&(i, j)| netviz::path_distance(&g, w, i, j) != metric::distance(system, w, i, j));
                doc["distances_match"] = json!(mismatch.is_none());
                match mismatch {
                    None => text.push_str("path distances match split distances\n"),
                    Some((i, j)) => {
                        ok = false;
                        text.push_str(&format!("path distance differs for taxa {i},{j}\n"));
                        rows = vec![vec!["false".into(), format!("{i},{j}"), "path distance differs".into()]];
                    }
                }
            }
            let report = Report { text, json: doc, csv: csv_table(&["holds", "class", "reason"], rows) };
            verdict(ok, report)
        }
        NetAction::RenderPolygon { system } => {
            let file = system.load()?;
            Ok(Report::raw(netviz::render_polygon(&file.system, file.weights.as_ref())))
        }
        NetAction::RenderGraph { input, order } => {
            let (g, _) = load_network(input, order.as_deref())?;
            Ok(Report::raw(netviz::render_network(&g)))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Classify { test } => classify(test),
        Command::Weights { input, system } => weights(input, *system),
        Command::Facets { n } => facets(*n),
        Command::Rays { n, incidence } => rays(*n, *incidence),
        Command::Membership { input, system } => membership(input, system.as_deref()),
        Command::Decompose { input } => decompose(input),
        Command::Face { system } => face(system),
        Command::Xdiagram { action } => xdiagram_cmd(action),
        Command::Cry { action } => cry_cmd(action),
        Command::Net { action } => net_cmd(action),
    }
}

fn emit(report: &Report, format: Format) {
    let body = match format {
        Format::Text => report.text.clone(),
        Format::Csv => report.csv.clone(),
        Format::Json => match &report.json {
            Value::String(s) => s.clone(),
            v => format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")),
        },
    };
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = out.write_all(body.as_bytes()).and_then(|_| out.flush());
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("SPLITCONE_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow!("SPLITCONE_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(report) => {
            emit(&report, cli.format);
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(report)) => {
            emit(&report, cli.format);
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
