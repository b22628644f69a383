mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use highway_toll::axioms::{axiom_matrix, expected_axioms, harness_table, verify_harness, Axiom, SuiteConfig};
use highway_toll::equity::{gini, lorenz, rank_correlations, ranking, Correlations};
use highway_toll::game::{core_check_with, sps_core_criterion_with};
use highway_toll::generate::{block_structured_matrix_with, parse_blocks};
use highway_toll::io::{
    allocation_rows, load_matrix, read_allocation_table, to_json, write_correlation_csv, write_lorenz_csv,
    write_triplets,
};
use highway_toll::{
    at_oracle, game_from, random_matrix, scaled_tolerance, shapley_oracle, tau_oracle, Allocation, AllocationRule,
    Counterexample, Method, TollMatrix, DEFAULT_TOLERANCE,
};
use output::{csv_table, emit, markdown_table, with_meta, Format, Meta};
use serde_json::{json, Value};

/// Toll allocation for one-way linear highways.
#[derive(Parser)]
#[command(name = "highway-toll", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Toll matrix: triplet CSV (`entry,exit,toll`), dense CSV or JSON
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of segments, when the input leaves trailing segments unused
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Omit the timestamp so identical runs give identical bytes
    #[arg(long)]
    no_timestamp: bool,
}

impl Common {
    fn meta(&self, command: &'static str) -> Meta {
        Meta {
            command,
            seed: self.seed,
            tol: self.tol,
            input: self.input.as_ref().map(|p| p.display().to_string()),
            timestamp: !self.no_timestamp,
        }
    }

    fn matrix(&self) -> Result<TollMatrix> {
        let path = self.input.as_deref().context("--input is required")?;
        load_matrix(path, self.segments).with_context(|| format!("reading {}", path.display()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-segment shares and percentages for each method
    Allocate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ses,sps,scs")]
        method: String,
    },
    /// Solve the segments game and compare with the matching method
    Game {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        solution: Solution,
    },
    /// Core membership of each method's allocation
    Core {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ses,sps,scs")]
        method: String,
    },
    /// Seeded axiom checks and the independence harness
    Axioms {
        #[command(flatten)]
        common: Common,
        /// Methods or alternative rules (e.g. `scs,A2_hybrid`)
        #[arg(long, default_value = "ses,sps,scs")]
        method: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_segments: usize,
        /// Also run the independence harness
        #[arg(long)]
        harness: bool,
    },
    /// Gini index, Lorenz curves, correlations and rankings
    Equity {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "ses,sps,scs")]
        method: String,
        /// Precomputed allocations: CSV with `segment` and one column per method
        #[arg(long, conflicts_with = "input")]
        allocations: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        top: usize,
        /// Directory for `lorenz_<method>.csv` files
        #[arg(long)]
        lorenz_dir: Option<PathBuf>,
        /// Path for the correlation matrix CSV (Spearman below, Pearson above the diagonal)
        #[arg(long)]
        correlations: Option<PathBuf>,
    },
    /// Write a random or block-structured toll matrix
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 10.0)]
        max_toll: f64,
        /// Sub-highway partition such as `1-3,4,5-6`
        #[arg(long)]
        blocks: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Solution {
    Shapley,
    Tau,
    At,
}

impl Solution {
    fn method(self) -> Method {
        match self {
            Solution::Shapley => Method::Ses,
            Solution::Tau => Method::Sps,
            Solution::At => Method::Scs,
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

fn allocate(common: &Common, method: &str) -> Result<ExitCode> {
    let t = common.matrix()?;
    let methods = Method::parse_list(method)?;
    let total = t.total();
    let allocations: Vec<(Method, Allocation)> = methods.iter().map(|m| (*m, m.apply(&t))).collect();
    let meta = common.meta("allocate");
    let text = match common.format {
        Format::Json => {
            let mut res = serde_json::Map::new();
            for (m, x) in &allocations {
                res.insert(m.to_string(), serde_json::to_value(allocation_rows(x, total))?);
            }
            with_meta(&meta, json!({ "segments": t.n(), "total": total, "allocations": res }))
        }
        Format::Csv | Format::Markdown => {
            let mut header = vec!["segment".to_string()];
            for (m, _) in &allocations {
                header.push(m.to_string());
                header.push(format!("{m}_percent"));
            }
            let per_method: Vec<_> = allocations.iter().map(|(_, x)| allocation_rows(x, total)).collect();
            let rows: Vec<Vec<String>> = (0..t.n())
                .map(|i| {
                    let mut row = vec![(i + 1).to_string()];
                    for rows in &per_method {
                        row.push(fmt(rows[i].share));
                        row.push(format!("{:.2}", rows[i].percent));
                    }
                    row
                })
                .collect();
            if common.format == Format::Csv {
                meta.csv_header() + &csv_table(&header, &rows)?
            } else {
                meta.markdown_header() + &markdown_table(&header, &rows)
            }
        }
    };
    emit(&text, common.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn game(common: &Common, solution: Solution) -> Result<ExitCode> {
    let t = common.matrix()?;
    let g = game_from(&t)?;
    let vector = match solution {
        Solution::Shapley => shapley_oracle(&g)?,
        Solution::Tau => tau_oracle(&g)?,
        Solution::At => at_oracle(&g),
    };
    let method = solution.method();
    let diff = vector.max_abs_diff(&method.apply(&t));
    let ok = diff <= scaled_tolerance(common.tol, t.total());
    let name = format!("{solution:?}").to_lowercase();
    let meta = common.meta("game");
    let text = match common.format {
        Format::Json => with_meta(
            &meta,
            json!({ "solution": name, "vector": vector.as_slice(), "matches_method": method.as_str(), "max_abs_diff": diff, "within_tol": ok }),
        ),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                vector.as_slice().iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), v.to_string()]).collect();
            format!("{}# matches_method={method}\n# max_abs_diff={diff:e}\n", meta.csv_header())
                + &csv_table(&["segment".into(), name.clone()], &rows)?
        }
        Format::Markdown => {
            let rows: Vec<Vec<String>> =
                vector.as_slice().iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), fmt(*v)]).collect();
            format!(
                "{}{}\nmax |{name} - {method}| = {diff:e} ({})\n",
                meta.markdown_header(),
                markdown_table(&["segment".into(), name.clone()], &rows),
                if ok { "within tolerance" } else { "ABOVE TOLERANCE" }
            )
        }
    };
    emit(&text, common.output.as_deref())?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn core(common: &Common, method: &str) -> Result<ExitCode> {
    let t = common.matrix()?;
    let g = game_from(&t)?;
    let methods = Method::parse_list(method)?;
    let meta = common.meta("core");
    let mut reports = Vec::new();
    for m in &methods {
        let report = core_check_with(&g, &m.apply(&t), common.tol)?;
        let criterion = (*m == Method::Sps).then(|| sps_core_criterion_with(&t, common.tol));
        reports.push((*m, report, criterion));
    }
    let text = match common.format {
        Format::Json => {
            let res: Vec<Value> = reports
                .iter()
                .map(|(m, r, c)| json!({ "method": m.as_str(), "report": r, "worst": r.worst(), "sps_criterion": c }))
                .collect();
            with_meta(&meta, Value::Array(res))
        }
        Format::Csv | Format::Markdown => {
            let header: Vec<String> =
                ["method", "member", "efficiency_gap", "violations", "worst_interval", "allocated", "value", "deficit"]
                    .map(String::from)
                    .to_vec();
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|(m, r, _)| {
                    let w = r.worst();
                    vec![
                        m.to_string(),
                        r.is_member.to_string(),
                        format!("{:e}", r.efficiency_gap),
                        r.violated.len().to_string(),
                        w.map_or("-".into(), |w| format!("[{},{}]", w.entry, w.exit)),
                        w.map_or("-".into(), |w| fmt(w.allocated)),
                        w.map_or("-".into(), |w| fmt(w.value)),
                        w.map_or("-".into(), |w| fmt(w.deficit)),
                    ]
                })
                .collect();
            let criterion = reports.iter().find_map(|(_, _, c)| c.as_ref()).map(|c| {
                format!(
                    "sps criterion: satisfied={} beta={} worst_interval={} rhs_max={}\n",
                    c.satisfied,
                    c.beta.map_or("-".into(), fmt),
                    c.worst_interval.map_or("-".into(), |w| w.to_string()),
                    c.rhs_max.map_or("-".into(), fmt)
                )
            });
            if common.format == Format::Csv {
                let note = criterion.map(|c| format!("# {c}")).unwrap_or_default();
                meta.csv_header() + &note + &csv_table(&header, &rows)?
            } else {
                meta.markdown_header()
                    + &markdown_table(&header, &rows)
                    + &criterion.map(|c| format!("\n{c}")).unwrap_or_default()
            }
        }
    };
    emit(&text, common.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

enum Rule {
    Named(Method),
    Counter(Counterexample),
}

impl Rule {
    fn parse(name: &str) -> Result<Rule> {
        if let Ok(m) = name.parse::<Method>() {
            return Ok(Rule::Named(m));
        }
        Ok(Rule::Counter(name.parse::<Counterexample>().with_context(|| format!("unknown method `{name}`"))?))
    }

    fn as_rule(&self) -> &dyn AllocationRule {
        match self {
            Rule::Named(m) => m,
            Rule::Counter(c) => c,
        }
    }
}

fn axioms(common: &Common, method: &str, trials: usize, max_segments: usize, harness: bool) -> Result<ExitCode> {
    let rules: Vec<Rule> =
        method.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Rule::parse).collect::<Result<_>>()?;
    let config =
        SuiteConfig { trials, seed: common.seed, max_segments, tolerance: common.tol, ..SuiteConfig::default() };
    let dyn_rules: Vec<&dyn AllocationRule> = rules.iter().map(Rule::as_rule).collect();
    let matrix = axiom_matrix(&dyn_rules, &Axiom::ALL, &config);

    // anchored expectations only bind the named methods
    let mut failures = Vec::new();
    for (rule, row) in rules.iter().zip(&matrix) {
        if let Rule::Named(m) = rule {
            for v in row.iter().filter(|v| !v.holds && expected_axioms(*m).contains(&v.axiom)) {
                failures.push(format!("{m} fails {}", v.axiom));
            }
        }
    }
    let harness_rows = harness.then(|| harness_table(&config));
    let harness_error = harness_rows.clone().and_then(|rows| verify_harness(rows).err());

    let anchored = |rule: &Rule, axiom: Axiom| matches!(rule, Rule::Named(m) if expected_axioms(*m).contains(&axiom));
    let meta = common.meta("axioms");
    let text = match common.format {
        Format::Json => {
            let cells: Vec<Value> = rules
                .iter()
                .zip(&matrix)
                .flat_map(|(rule, row)| {
                    row.iter().map(move |v| {
                        json!({
                            "rule": v.rule,
                            "axiom": v.axiom,
                            "holds": v.holds,
                            "anchored": anchored(rule, v.axiom),
                            "instances": v.instances_checked,
                            "worst_gap": v.worst_gap,
                            "witness": v.witness.as_ref().map(|w| json!({ "instance": w.instance.describe(), "evaluation": w.evaluation })),
                        })
                    })
                })
                .collect();
            let harness = harness_rows.as_ref().map(|rows| {
                rows.iter()
                    .map(|r| json!({ "characterization": r.characterization, "rule": r.rule, "fails": r.designated, "matches": r.matches() }))
                    .collect::<Vec<_>>()
            });
            with_meta(&meta, json!({ "trials": trials, "cells": cells, "harness": harness, "failures": failures }))
        }
        Format::Csv | Format::Markdown => {
            let mut header = vec!["axiom".to_string()];
            header.extend(rules.iter().map(|r| r.as_rule().name()));
            let rows: Vec<Vec<String>> = Axiom::ALL
                .iter()
                .enumerate()
                .map(|(a, axiom)| {
                    let mut row = vec![axiom.label().to_string()];
                    for (rule, cells) in rules.iter().zip(&matrix) {
                        let mark = if cells[a].holds { "yes" } else { "no" };
                        row.push(if anchored(rule, *axiom) { mark.to_string() } else { format!("{mark}*") });
                    }
                    row
                })
                .collect();
            let mut text = if common.format == Format::Csv {
                meta.csv_header() + &format!("# trials={trials}\n") + &csv_table(&header, &rows)?
            } else {
                meta.markdown_header()
                    + &markdown_table(&header, &rows)
                    + "\n`*` empirical result without a proved expectation.\n"
            };
            if let Some(rows) = &harness_rows {
                let header = ["characterization", "rule", "fails", "matches"].map(String::from).to_vec();
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.characterization.to_string(),
                            r.rule.clone(),
                            r.designated.to_string(),
                            r.matches().to_string(),
                        ]
                    })
                    .collect();
                text.push('\n');
                text += &if common.format == Format::Csv {
                    csv_table(&header, &body)?
                } else {
                    markdown_table(&header, &body)
                };
            }
            text
        }
    };
    emit(&text, common.output.as_deref())?;
    for f in &failures {
        eprintln!("expected axiom violated: {f}");
    }
    if let Some(e) = &harness_error {
        eprintln!("{e}");
    }
    Ok(if failures.is_empty() && harness_error.is_none() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn equity(
    common: &Common,
    method: &str,
    allocations: Option<&Path>,
    top: usize,
    lorenz_dir: Option<&Path>,
    correlations: Option<&Path>,
) -> Result<ExitCode> {
    let columns: Vec<(String, Allocation)> = match allocations {
        Some(path) => {
            let file = std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
            read_allocation_table(file)?
        }
        None => {
            let t = common.matrix()?;
            Method::parse_list(method)?.into_iter().map(|m| (m.to_string(), m.apply(&t))).collect()
        }
    };
    let names: Vec<String> = columns.iter().map(|c| c.0.clone()).collect();
    let k = columns.len();
    let corr: Vec<Vec<Option<Correlations>>> = (0..k)
        .map(|a| (0..k).map(|b| rank_correlations(columns[a].1.as_slice(), columns[b].1.as_slice()).ok()).collect())
        .collect();

    let mut summaries = Vec::new();
    for (name, x) in &columns {
        let g = gini(x.as_slice()).ok();
        let curve = lorenz(x.as_slice()).ok();
        if let (Some(dir), Some(curve)) = (lorenz_dir, &curve) {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("lorenz_{name}.csv"));
            write_lorenz_csv(
                curve,
                std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?,
            )?;
        }
        summaries.push((name.clone(), g, ranking(x.as_slice(), top, top)));
    }
    if let Some(path) = correlations {
        let nan = Correlations { spearman: f64::NAN, pearson: f64::NAN };
        let file = std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_correlation_csv(&names, &|a, b| corr[a][b].unwrap_or(nan), file)?;
    }

    let meta = common.meta("equity");
    let segs = |r: &[highway_toll::equity::RankedSegment]| {
        r.iter().map(|s| s.segment.to_string()).collect::<Vec<_>>().join(" ")
    };
    let text = match common.format {
        Format::Json => {
            let methods: Vec<Value> =
                summaries.iter().map(|(name, g, r)| json!({ "method": name, "gini": g, "ranking": r })).collect();
            let pairs: Vec<Value> = (0..k)
                .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
                .map(|(a, b)| json!({ "x": names[a], "y": names[b], "correlations": corr[a][b] }))
                .collect();
            with_meta(
                &meta,
                json!({ "methods": methods, "correlations": pairs, "tie_break": "ascending segment index" }),
            )
        }
        Format::Csv | Format::Markdown => {
            let header = ["method", "gini", "top", "bottom"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> = summaries
                .iter()
                .map(|(name, g, r)| {
                    vec![name.clone(), g.map_or("-".into(), |g| format!("{g:.4}")), segs(&r.top), segs(&r.bottom)]
                })
                .collect();
            let mut corr_header = vec![String::new()];
            corr_header.extend(names.iter().cloned());
            let corr_rows: Vec<Vec<String>> = (0..k)
                .map(|a| {
                    let mut row = vec![names[a].clone()];
                    row.extend((0..k).map(|b| match a.cmp(&b) {
                        std::cmp::Ordering::Equal => "-".to_string(),
                        std::cmp::Ordering::Greater => corr[b][a].map_or("-".into(), |c| format!("{:.3}", c.spearman)),
                        std::cmp::Ordering::Less => corr[a][b].map_or("-".into(), |c| format!("{:.3}", c.pearson)),
                    }));
                    row
                })
                .collect();
            if common.format == Format::Csv {
                meta.csv_header() + &csv_table(&header, &rows)?
            } else {
                format!(
                    "{}{}\nRanking ties break by ascending segment index.\n\nSpearman below the diagonal, Pearson above:\n\n{}",
                    meta.markdown_header(),
                    markdown_table(&header, &rows),
                    markdown_table(&corr_header, &corr_rows)
                )
            }
        }
    };
    emit(&text, common.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn generate(common: &Common, density: f64, max_toll: f64, blocks: Option<&str>) -> Result<ExitCode> {
    let t = match blocks {
        Some(spec) => block_structured_matrix_with(&parse_blocks(spec)?, density, max_toll, common.seed)?,
        None => {
            let n = common.segments.context("--segments is required without --blocks")?;
            random_matrix(n, density, max_toll, common.seed)?
        }
    };
    let meta = common.meta("generate");
    let text = match common.format {
        Format::Json => to_json(&t)? + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            write_triplets(&t, &mut buf)?;
            format!("{}# density={density}\n# max_toll={max_toll}\n{}", meta.csv_header(), String::from_utf8(buf)?)
        }
        Format::Markdown => bail!("generate writes csv or json"),
    };
    emit(&text, common.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Allocate { common, method } => allocate(common, method),
        Command::Game { common, solution } => game(common, *solution),
        Command::Core { common, method } => core(common, method),
        Command::Axioms { common, method, trials, max_segments, harness } => {
            axioms(common, method, *trials, *max_segments, *harness)
        }
        Command::Equity { common, method, allocations, top, lorenz_dir, correlations } => {
            equity(common, method, allocations.as_deref(), *top, lorenz_dir.as_deref(), correlations.as_deref())
        }
        Command::Generate { common, density, max_toll, blocks } => {
            generate(common, *density, *max_toll, blocks.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
