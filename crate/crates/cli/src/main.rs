mod input;
mod output;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use blocksmith_core::brauer::{self, BrauerTree};
use blocksmith_core::cartan::{enumerate_cartan_bounded, filter_block_feasible, min_sum_for_l, prime_power_base};
use blocksmith_core::casebook::{self, Verdict};
use blocksmith_core::contrib::{self, ContributionResult};
use blocksmith_core::gram::{self, GramProblem, SolveStatus};
use blocksmith_core::intmat::{smith_normal_form, IntMatrix};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use output::{table, Envelope, Status};

#[derive(Parser)]
#[command(name = "blocksmith", version, about = "Exact computations for blocks with small basic algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Candidate Cartan matrices with a given entry sum
    EnumerateCartan {
        #[arg(long)]
        sum: u64,
        /// Matrix size; all sizes when omitted
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        feasible_only: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Integral solutions of QᵗQ = C
    SolveGram {
        /// Target matrix, JSON literal or file
        #[arg(long)]
        gram: String,
        #[arg(long)]
        signed: bool,
        /// K or K1..K2
        #[arg(long)]
        rows: Option<String>,
        /// Blocks the solution must be orthogonal to (repeatable)
        #[arg(long)]
        fixed: Vec<String>,
        /// Prescribed contribution diagonal d1,...,dk
        #[arg(long, requires = "defect_order")]
        diag: Option<String>,
        #[arg(long, requires = "diag")]
        defect_order: Option<String>,
        #[arg(long)]
        zero_rows: Option<String>,
        #[arg(long)]
        allow_zero_rows: bool,
        #[arg(long)]
        indecomposable: bool,
    },
    /// Smith normal form with unimodular transforms
    Snf {
        #[arg(long)]
        matrix: String,
    },
    /// Contribution matrix |D|·Q·C⁻¹·Qᵗ
    Contribution {
        #[arg(long)]
        q: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        defect_order: String,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        heights: bool,
    },
    /// Character heights from a contribution diagonal or from Q and C
    Heights {
        #[arg(long, conflicts_with_all = ["q", "c"])]
        diag: Option<String>,
        #[arg(long, requires = "c")]
        q: Option<String>,
        #[arg(long, requires = "q")]
        c: Option<String>,
        #[arg(long)]
        defect_order: String,
        #[arg(long)]
        p: Option<String>,
    },
    /// Brauer tree shapes, or all defect-one Brauer tree algebras of a dimension
    BrauerTrees {
        #[arg(long, conflicts_with = "dim", required_unless_present = "dim")]
        edges: Option<usize>,
        /// Exceptional multiplicity for --edges
        #[arg(long, requires = "edges")]
        m: Option<u64>,
        #[arg(long)]
        dim: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Replay the case analysis of one dimension
    Casebook {
        #[command(subcommand)]
        action: CasebookAction,
    },
}

#[derive(Subcommand)]
enum CasebookAction {
    Run {
        #[arg(long)]
        dim: u64,
        /// Rule file; the shipped rules for --dim otherwise
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Also write the report to this file
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        table: bool,
    },
}

/// What a command produced: the envelope and, for text formats, the text.
struct Outcome {
    envelope: Envelope,
    text: Option<String>,
}

fn num(x: &BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| json!(x.to_string()), |v| json!(v))
}

fn nums(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

fn flat(m: &IntMatrix) -> String {
    m.entries().iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn joined(xs: &[BigInt], sep: &str) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

fn big(flag: &str, s: &str) -> Result<BigInt> {
    s.trim().parse().with_context(|| format!("{flag}: {s:?} is not an integer"))
}

fn enumerate(sum: u64, l: Option<usize>, feasible_only: bool, format: Format) -> Result<Outcome> {
    let max_sum = input::max_sum()?;
    let sizes: Vec<usize> = match l {
        Some(l) => vec![l],
        None => (1..).take_while(|&l| min_sum_for_l(l) <= sum.max(1)).collect(),
    };
    let mut cands = Vec::new();
    for l in sizes {
        cands.extend(enumerate_cartan_bounded(sum, l, max_sum)?);
    }
    let rows: Vec<_> = cands
        .into_iter()
        .map(|c| {
            let v = filter_block_feasible(&c);
            (c, v)
        })
        .filter(|(_, v)| !feasible_only || v.is_feasible())
        .collect();
    let verdict = |v: &blocksmith_core::cartan::FeasibilityVerdict| {
        let status = if v.is_feasible() { "feasible" } else { "rejected" };
        match v.reason {
            Some(r) => format!("{status}:{}", r.code()),
            None => status.to_string(),
        }
    };
    let payload = json!({
        "sum": sum,
        "l": l,
        "max_sum": max_sum,
        "count": rows.len(),
        "candidates": rows.iter().map(|(c, v)| json!({"candidate": c, "feasibility": v})).collect::<Vec<_>>(),
    });
    let inputs = json!({"sum": sum, "l": l, "feasible_only": feasible_only, "max_sum": max_sum});
    let text = match format {
        Format::Json => None,
        Format::Csv => {
            let mut s = String::from("matrix,det,elementary_divisors,verdict\n");
            for (c, v) in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    flat(&c.matrix),
                    c.determinant,
                    joined(&c.elementary_divisors, " "),
                    verdict(v)
                ));
            }
            Some(s)
        }
        Format::Table => Some(table(
            &["l", "C", "elementary divisors", "verdict", "det C"],
            &rows
                .iter()
                .map(|(c, v)| {
                    vec![
                        c.l.to_string(),
                        flat(&c.matrix),
                        joined(&c.elementary_divisors, " "),
                        verdict(v),
                        c.determinant.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        )),
    };
    Ok(Outcome { envelope: Envelope::new("enumerate-cartan", &inputs, Status::Ok, payload), text })
}

#[allow(clippy::too_many_arguments)]
fn solve_gram(
    gram_arg: &str,
    signed: bool,
    rows: Option<&str>,
    fixed: &[String],
    diag: Option<&str>,
    defect_order: Option<&str>,
    zero_rows: Option<&str>,
    allow_zero_rows: bool,
    indecomposable: bool,
) -> Result<Outcome> {
    let mut p = GramProblem::new(input::matrix("--gram", gram_arg)?);
    if signed {
        p = p.signed();
    }
    if let Some(r) = rows {
        p = p.rows(input::row_count(r)?);
    }
    for f in fixed {
        p = p.orthogonal_to(input::matrix("--fixed", f)?);
    }
    if let (Some(d), Some(order)) = (diag, defect_order) {
        p = p.with_diag(input::int_list("--diag", d)?, big("--defect-order", order)?);
    }
    if let Some(z) = zero_rows {
        p = p.with_zero_rows(input::index_list("--zero-rows", z)?);
    }
    if allow_zero_rows {
        p = p.allow_zero_rows();
    }
    if indecomposable {
        p = p.indecomposable();
    }
    let out = gram::solve(&p)?;
    let status = match out.status {
        SolveStatus::Solutions => Status::Ok,
        SolveStatus::ProvedEmpty => Status::ProvedEmpty,
    };
    let payload = json!({
        "status": out.status,
        "count": out.solutions.len(),
        "row_counts": out.row_counts(),
        "solutions": out
            .solutions
            .iter()
            .map(|s| json!({"rows": s.q.row_count(), "q": s.q, "canonical_key": s.canonical_key}))
            .collect::<Vec<_>>(),
        "diagnostic": out.diagnostic,
    });
    let inputs = serde_json::to_value(&p)?;
    Ok(Outcome { envelope: Envelope::new("solve-gram", &inputs, status, payload), text: None })
}

fn snf(arg: &str) -> Result<Outcome> {
    let m = input::matrix("--matrix", arg)?;
    let s = smith_normal_form(&m);
    let mut payload = serde_json::to_value(&s)?;
    payload["elementary_divisors"] = nums(&s.elementary_divisors());
    payload["rank"] = json!(s.rank());
    Ok(Outcome { envelope: Envelope::new("snf", &json!({"matrix": m}), Status::Ok, payload), text: None })
}

fn apply_p(r: &mut ContributionResult, p: Option<&str>) -> Result<()> {
    let Some(p) = p else { return Ok(()) };
    let p = big("--p", p)?;
    match &r.p {
        Some(q) if *q != p => bail!("--p {p} disagrees with |D| = {}, a power of {q}", r.defect_order),
        _ => r.p = Some(p),
    }
    Ok(())
}

fn height_payload(r: &ContributionResult) -> Result<Value> {
    let h = contrib::heights_from_contribution(r)?;
    Ok(json!({"heights": h.heights, "k": h.k, "k_h": h.k_h, "k0": h.k_of_height(0)}))
}

fn contribution(q: &str, c: &str, d: &str, p: Option<&str>, heights: bool) -> Result<Outcome> {
    let (q, c, d) = (input::matrix("--q", q)?, input::matrix("--c", c)?, big("--defect-order", d)?);
    let mut r = contrib::contribution_matrix(&q, &c, &d)?;
    apply_p(&mut r, p)?;
    let mut payload = json!({
        "matrix": r.m,
        "diagonal": nums(&r.diag()),
        "defect_order": num(&r.defect_order),
        "p": r.p.as_ref().map(num),
        "l": r.l,
    });
    if heights {
        payload["heights"] = height_payload(&r)?;
    }
    let inputs = json!({"q": q, "c": c, "defect_order": d.to_string(), "p": p, "heights": heights});
    Ok(Outcome { envelope: Envelope::new("contribution", &inputs, Status::Ok, payload), text: None })
}

fn heights(diag: Option<&str>, q: Option<&str>, c: Option<&str>, d: &str, p: Option<&str>) -> Result<Outcome> {
    let d = big("--defect-order", d)?;
    let (mut r, inputs) = match (diag, q, c) {
        (Some(diag), None, None) => {
            let values = input::int_list("--diag", diag)?;
            let r = ContributionResult {
                m: IntMatrix::diagonal(&values)?,
                defect_order: d.clone(),
                p: prime_power_base(&d),
                l: 0,
            };
            (r, json!({"diag": nums(&values), "defect_order": d.to_string(), "p": p}))
        }
        (None, Some(q), Some(c)) => {
            let (q, c) = (input::matrix("--q", q)?, input::matrix("--c", c)?);
            let r = contrib::contribution_matrix(&q, &c, &d)?;
            (r, json!({"q": q, "c": c, "defect_order": d.to_string(), "p": p}))
        }
        _ => bail!("heights needs --diag, or --q together with --c"),
    };
    apply_p(&mut r, p)?;
    let payload = height_payload(&r)?;
    Ok(Outcome { envelope: Envelope::new("heights", &inputs, Status::Ok, payload), text: None })
}

fn brauer_trees(edges: Option<usize>, m: Option<u64>, dim: Option<u64>, format: Format) -> Result<Outcome> {
    if format == Format::Csv {
        bail!("brauer-trees supports --format json or table");
    }
    let (inputs, payload, rows, header): (Value, Value, Vec<Vec<String>>, Vec<&str>) = match (edges, dim) {
        (Some(e), None) => {
            let shapes = brauer::enumerate_trees(e)?;
            let mut items = Vec::new();
            let mut rows = Vec::new();
            for s in shapes {
                let marked = m.is_some_and(|m| m > 1);
                let mut item = json!({"shape": s, "label": s.label(marked), "degrees": s.degrees()});
                let mut row = vec![s.label(marked), s.code.clone()];
                if let Some(m) = m {
                    let t = BrauerTree::new(s.clone(), m)?;
                    let c = brauer::cartan_of_tree(&t);
                    item["m"] = json!(m);
                    item["cartan"] = json!(c);
                    item["dim"] = json!(brauer::dim_of_tree(&t));
                    row.extend([flat(&c), brauer::dim_of_tree(&t).to_string()]);
                }
                items.push(item);
                rows.push(row);
            }
            let header = if m.is_some() { vec!["tree", "code", "C", "dim"] } else { vec!["tree", "code"] };
            (json!({"edges": e, "m": m}), json!({"count": items.len(), "trees": items}), rows, header)
        }
        (None, Some(n)) => {
            let found = brauer::classify_defect1(n)?;
            let rows = found
                .iter()
                .map(|t| {
                    vec![
                        t.label.clone(),
                        t.m.to_string(),
                        t.p.to_string(),
                        t.l.to_string(),
                        t.k.to_string(),
                        flat(&t.cartan),
                        t.dim_a.to_string(),
                    ]
                })
                .collect();
            (
                json!({"dim": n}),
                json!({"count": found.len(), "algebras": found}),
                rows,
                vec!["tree", "m", "p", "l", "k", "C", "dim"],
            )
        }
        _ => bail!("brauer-trees needs exactly one of --edges and --dim"),
    };
    let text = (format == Format::Table).then(|| table(&header, &rows));
    Ok(Outcome { envelope: Envelope::new("brauer-trees", &inputs, Status::Ok, payload), text })
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Rejected { reason } => format!("rejected ({reason})"),
        Verdict::Excluded { by } => format!("excluded ({by})"),
        Verdict::Realized { classes } => {
            let names: Vec<_> = classes.iter().map(|c| c.morita_class.as_str()).collect();
            format!("realized: {}", names.join(", "))
        }
        Verdict::Open { note } => format!("open ({note})"),
    }
}

fn casebook_run(dim: u64, rules: Option<&PathBuf>, report: Option<&PathBuf>, as_table: bool) -> Result<Outcome> {
    let set = match rules {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("--rules: reading {}", path.display()))?;
            casebook::RuleSet::from_json(&text).with_context(|| format!("--rules {}", path.display()))?
        }
        None => casebook::shipped_rules(dim)?,
    };
    let max_sum = input::max_sum()?;
    let r = casebook::run_dimension_bounded(dim, &set, max_sum)?;
    let payload = serde_json::to_value(&r)?;
    if let Some(path) = report {
        let mut s = serde_json::to_string_pretty(&r)?;
        s.push('\n');
        std::fs::write(path, s).with_context(|| format!("--report: writing {}", path.display()))?;
    }
    let status = if r.has_regressions() { Status::Regression } else { Status::Ok };
    let text = as_table.then(|| {
        let mut s = table(
            &["l", "C", "verdict", "det C"],
            &r.candidates
                .iter()
                .map(|c| vec![c.l.to_string(), flat(&c.matrix), verdict_text(&c.terminal), c.determinant.to_string()])
                .collect::<Vec<_>>(),
        );
        s.push('\n');
        s.push_str(&table(
            &["D", "Morita class"],
            &r.final_table.iter().map(|c| vec![c.defect_group.clone(), c.morita_class.clone()]).collect::<Vec<_>>(),
        ));
        for reg in &r.regressions {
            s.push_str(&format!("\nregression in {}: expected {} got {}\n", reg.rule, reg.expected, reg.computed));
        }
        s
    });
    let inputs = json!({"dim": dim, "rules": set, "max_sum": max_sum});
    Ok(Outcome { envelope: Envelope::new("casebook run", &inputs, status, payload), text })
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::EnumerateCartan { sum, l, feasible_only, format } => enumerate(sum, l, feasible_only, format),
        Command::SolveGram { gram, signed, rows, fixed, diag, defect_order, zero_rows, allow_zero_rows, indecomposable } => {
            solve_gram(
                &gram,
                signed,
                rows.as_deref(),
                &fixed,
                diag.as_deref(),
                defect_order.as_deref(),
                zero_rows.as_deref(),
                allow_zero_rows,
                indecomposable,
            )
        }
        Command::Snf { matrix } => snf(&matrix),
        Command::Contribution { q, c, defect_order, p, heights: h } => contribution(&q, &c, &defect_order, p.as_deref(), h),
        Command::Heights { diag, q, c, defect_order, p } => {
            heights(diag.as_deref(), q.as_deref(), c.as_deref(), &defect_order, p.as_deref())
        }
        Command::BrauerTrees { edges, m, dim, format } => brauer_trees(edges, m, dim, format),
        Command::Casebook { action: CasebookAction::Run { dim, rules, report, table } } => {
            casebook_run(dim, rules.as_ref(), report.as_ref(), table)
        }
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let command = argv.get(1).cloned().unwrap_or_default();
    match dispatch(cli) {
        Ok(out) => {
            match out.text {
                Some(t) => print!("{t}"),
                None => print!("{}", out.envelope.render()),
            }
            std::process::exit(out.envelope.status.exit_code());
        }
        Err(e) => {
            let env = Envelope::new(&command, &json!(argv[1..]), Status::InvalidInput, json!({"error": format!("{e:#}")}));
            print!("{}", env.render());
            eprintln!("error: {e:#}");
            std::process::exit(Status::InvalidInput.exit_code());
        }
    }
}
