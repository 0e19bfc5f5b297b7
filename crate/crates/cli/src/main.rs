//! `mechindep`: run independence checkers on CSV Jacobians, JSON derivative
//! tensors and JSON grid regions.
//!
//! Exit status: `0` when every requested criterion holds, `1` when one
//! fails, `2` on usage or input errors.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use mechindep::criteria::{
    check_type_d, check_type_d_irreducible, check_type_h, check_type_h_irreducible, check_type_m,
    check_type_m_irreducible, check_type_o, check_type_s, check_type_s_irreducible, check_type_s_pairwise,
    decompose, hierarchy_audit,
};
use mechindep::graph::{block_count_audit_with, AuditOptions};
use mechindep::numeric::{parse_matrix_csv, write_matrix_csv};
use mechindep::report::{emit_report, parse_region_json, parse_tensor_json, Format, Report, ReportHeader};
use mechindep::synth::{gen_overlap_jacobian, OverlapTemplate};
use mechindep::topology::premise_report;
use mechindep::{BlockSpec, Certificate, DerivTensor, Exec, Matrix, Tolerance};

const DEFAULT_SEED: u64 = 0xa10;

#[derive(Parser, Debug)]
#[command(name = "mechindep", version, about = "Mechanistic independence checks for Jacobians and derivative tensors")]
struct Cli {
    /// Relative zero tolerance.
    #[arg(long, global = true, env = "MECHINDEP_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Absolute zero tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Seed for randomized audits and generators.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Text,
    /// Graphviz, `decompose` only.
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Crit {
    D,
    M,
    S,
    #[value(name = "s-pairwise")]
    SPairwise,
    O,
    #[value(name = "d-irreducible")]
    DIrreducible,
    #[value(name = "m-irreducible")]
    MIrreducible,
    #[value(name = "s-irreducible")]
    SIrreducible,
    H2,
    H3,
    #[value(name = "h-irreducible")]
    HIrreducible,
    Hierarchy,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check criteria on a Jacobian CSV against a block split.
    Analyze {
        /// Comma list of criteria.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "d,m,s")]
        criteria: Vec<Crit>,
        /// Block sizes, e.g. `2,2`.
        #[arg(long)]
        blocks: String,
        /// Derivative tensor JSON for `h2`, `h3`, `h-irreducible` and `hierarchy`.
        #[arg(long)]
        tensor: Option<PathBuf>,
        /// Analyze every `*.csv` in this directory instead of one input.
        #[arg(long, conflicts_with = "input")]
        batch: Option<PathBuf>,
        #[arg(required_unless_present = "batch")]
        input: Option<PathBuf>,
    },
    /// Split columns into `D`-graph components and certify each irreducible.
    Decompose { input: PathBuf },
    /// Sparsity gap of the block split.
    Gap {
        #[arg(long)]
        blocks: String,
        /// Also report every block pair.
        #[arg(long)]
        pairwise: bool,
        input: PathBuf,
    },
    /// Connectivity premises of a discretized latent region.
    Topology { input: PathBuf },
    /// Generate an overlapping-slot Jacobian with its ground truth.
    Synth {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        overlap: f64,
        #[arg(long, default_value_t = 3)]
        slot_dim: usize,
        #[arg(long, default_value_t = 20)]
        slot_out: usize,
        /// Writes `<out>.csv` and `<out>.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit the block structure of a matrix and, given blocks, the
    /// implication order of the criteria.
    Audit {
        /// Expected block count; defaults to the detected one.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long)]
        blocks: Option<String>,
        /// Hessian JSON for the hierarchy audit.
        #[arg(long)]
        tensor: Option<PathBuf>,
        input: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String, mechindep::Error),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Input(src, e) => write!(f, "{src}: {e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

trait Context<T> {
    fn ctx(self, src: &str) -> CliResult<T>;
}

impl<T> Context<T> for mechindep::Result<T> {
    fn ctx(self, src: &str) -> CliResult<T> {
        self.map_err(|e| CliError::Input(src.to_string(), e))
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

fn load_matrix(path: &Path) -> CliResult<Matrix> {
    parse_matrix_csv(&read(path)?).ctx(&name(path))
}

fn load_tensor(path: &Path) -> CliResult<DerivTensor> {
    parse_tensor_json(&read(path)?).ctx(&name(path))
}

fn parse_blocks(text: &str) -> CliResult<BlockSpec> {
    BlockSpec::parse(text).ctx("--blocks")
}

/// Settings shared by every command.
struct Settings {
    tol: Tolerance,
    seed: u64,
    format: OutFormat,
}

impl Settings {
    fn header(&self, command: &str, inputs: Vec<String>, blocks: Option<&BlockSpec>) -> ReportHeader {
        ReportHeader::new(command, inputs, blocks.map(|b| b.to_string()), self.seed, self.tol)
    }

    fn render(&self, report: &Report) -> CliResult<String> {
        let format = match self.format {
            OutFormat::Json => Format::Json,
            OutFormat::Text => Format::Text,
            OutFormat::Dot => return Err(CliError::Usage("--format dot is only available for decompose".into())),
        };
        emit_report(report, format).ctx("report")
    }
}

/// Output text and whether every criterion held.
type Outcome = (String, bool);

fn per_block(
    blocks: &BlockSpec,
    mut check: impl FnMut(usize) -> mechindep::Result<Certificate>,
) -> mechindep::Result<Vec<Certificate>> {
    (1..=blocks.len()).map(|b| check(b).map(|c| c.with_note(format!("block {b}")))).collect()
}

fn analyze_certificates(
    j: &Matrix,
    blocks: &BlockSpec,
    criteria: &[Crit],
    tensor: Option<&DerivTensor>,
    tol: &Tolerance,
) -> CliResult<Vec<Certificate>> {
    let need_tensor = |what: &str| {
        tensor.ok_or_else(|| CliError::Usage(format!("criterion {what} needs --tensor")))
    };
    let mut certs = Vec::new();
    for &c in criteria {
        let src = "analysis";
        match c {
            Crit::D => certs.push(check_type_d(j, blocks, tol).ctx(src)?),
            Crit::M => certs.push(check_type_m(j, blocks, tol).ctx(src)?),
            Crit::S => certs.push(check_type_s(j, blocks, tol).ctx(src)?),
            Crit::SPairwise => certs.push(check_type_s_pairwise(j, blocks, tol).ctx(src)?),
            Crit::O => certs.push(check_type_o(j, blocks, tol).ctx(src)?),
            Crit::DIrreducible => certs.extend(per_block(blocks, |b| check_type_d_irreducible(j, blocks, b, tol)).ctx(src)?),
            Crit::MIrreducible => certs.extend(per_block(blocks, |b| check_type_m_irreducible(j, blocks, b, tol)).ctx(src)?),
            Crit::SIrreducible => certs.extend(per_block(blocks, |b| check_type_s_irreducible(j, blocks, b, tol)).ctx(src)?),
            Crit::H2 | Crit::H3 => {
                let n = if c == Crit::H2 { 2 } else { 3 };
                certs.push(check_type_h(need_tensor("h2/h3")?, blocks, n, tol).ctx(src)?);
            }
            Crit::HIrreducible => {
                let t = need_tensor("h-irreducible")?;
                certs.extend(per_block(blocks, |b| check_type_h_irreducible(t, blocks, b, t.order(), tol)).ctx(src)?);
            }
            Crit::Hierarchy => certs.push(hierarchy_audit(j, blocks, tensor, tol).ctx(src)?),
        }
    }
    Ok(certs)
}

fn analyze_one(
    s: &Settings,
    input: &Path,
    blocks: &BlockSpec,
    criteria: &[Crit],
    tensor: Option<&Path>,
) -> CliResult<Report> {
    let j = load_matrix(input)?;
    blocks.check_columns(j.cols()).ctx(&name(input))?;
    let t = tensor.map(load_tensor).transpose()?;
    let certificates = analyze_certificates(&j, blocks, criteria, t.as_ref(), &s.tol)?;
    let mut inputs = vec![name(input)];
    inputs.extend(tensor.map(name));
    Ok(Report {
        header: s.header("analyze", inputs, Some(blocks)),
        certificates,
        result: None,
    })
}

fn batch_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::Io(dir.to_path_buf(), e))?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("no .csv files in {}", dir.display())));
    }
    Ok(files)
}

/// Every file is analyzed independently; a failing file is reported in
/// place and makes the batch exit with status 2.
fn analyze_batch(
    s: &Settings,
    dir: &Path,
    blocks: &BlockSpec,
    criteria: &[Crit],
    tensor: Option<&Path>,
) -> CliResult<(String, u8)> {
    let files = batch_files(dir)?;
    let results = Exec::default().map_slice(&files, |f| analyze_one(s, f, blocks, criteria, tensor));
    let status = if results.iter().any(Result::is_err) {
        2
    } else if results.iter().all(|r| r.as_ref().is_ok_and(Report::all_hold)) {
        0
    } else {
        1
    };
    let out = match s.format {
        OutFormat::Json => {
            let items: Vec<serde_json::Value> = files
                .iter()
                .zip(&results)
                .map(|(f, r)| match r {
                    Ok(report) => serde_json::to_value(report).expect("reports serialize"),
                    Err(e) => json!({ "input": name(f), "error": e.to_string() }),
                })
                .collect();
            serde_json::to_string_pretty(&items).expect("reports serialize") + "\n"
        }
        _ => {
            let mut out = String::new();
            for (f, r) in files.iter().zip(&results) {
                out.push_str(&format!("== {} ==\n", name(f)));
                match r {
                    Ok(report) => out.push_str(&s.render(report)?),
                    Err(e) => out.push_str(&format!("error: {e}\n")),
                }
            }
            out
        }
    };
    Ok((out, status))
}

fn run_decompose(s: &Settings, input: &Path) -> CliResult<Outcome> {
    let j = load_matrix(input)?;
    let dec = decompose(&j, &s.tol).ctx(&name(input))?;
    let holds = dec.irreducible.iter().all(|c| c.holds);
    if s.format == OutFormat::Dot {
        return Ok((dec.graph.to_dot(), holds));
    }
    let certificates = dec
        .irreducible
        .iter()
        .zip(&dec.components)
        .map(|(c, comp)| c.clone().with_note(format!("component {comp:?}")))
        .collect();
    let report = Report {
        header: s.header("decompose", vec![name(input)], None),
        certificates,
        result: Some(json!({
            "components": dec.components,
            "blocks": dec.blocks,
            "columnOrder": dec.column_order,
            "contiguous": dec.contiguous,
        })),
    };
    Ok((s.render(&report)?, holds))
}

fn run_gap(s: &Settings, input: &Path, blocks: &BlockSpec, pairwise: bool) -> CliResult<Outcome> {
    let j = load_matrix(input)?;
    let src = name(input);
    let mut certificates = vec![check_type_s(&j, blocks, &s.tol).ctx(&src)?];
    if pairwise {
        certificates.push(check_type_s_pairwise(&j, blocks, &s.tol).ctx(&src)?);
    }
    let result = match &certificates[0].witness {
        mechindep::Witness::SparsityGap { rho_plus, rho_minus, .. } => json!({
            "rhoPlus": rho_plus,
            "rhoMinus": rho_minus,
            "independent": certificates[0].holds,
        }),
        _ => json!(null),
    };
    let report = Report {
        header: s.header("gap", vec![src], Some(blocks)),
        certificates,
        result: Some(result),
    };
    Ok((s.render(&report)?, report.all_hold()))
}

fn run_topology(s: &Settings, input: &Path) -> CliResult<Outcome> {
    let region = parse_region_json(&read(input)?).ctx(&name(input))?;
    let cert = premise_report(&region).ctx(&name(input))?;
    let report = Report {
        header: s.header("topology", vec![name(input)], None),
        certificates: vec![cert],
        result: None,
    };
    Ok((s.render(&report)?, report.all_hold()))
}

fn run_synth(s: &Settings, k: usize, overlap: f64, slot_dim: usize, slot_out: usize, out: &Path) -> CliResult<Outcome> {
    let template = OverlapTemplate {
        k,
        slot_dim,
        slot_out,
        overlap_ratio: overlap,
        seed: s.seed,
    };
    let inst = gen_overlap_jacobian(&template).ctx("synth")?;
    let sidecar = serde_json::to_string_pretty(&inst.sidecar()).expect("sidecar serializes") + "\n";
    let write = |ext: &str, text: &str| {
        let path = out.with_extension(ext);
        fs::write(&path, text).map_err(|e| CliError::Io(path, e))
    };
    write("csv", &write_matrix_csv(&inst.jacobian))?;
    write("json", &sidecar)?;
    Ok((sidecar, true))
}

fn run_audit(
    s: &Settings,
    input: &Path,
    k: Option<usize>,
    draws: usize,
    blocks: Option<&BlockSpec>,
    tensor: Option<&Path>,
) -> CliResult<Outcome> {
    let j = load_matrix(input)?;
    let src = name(input);
    let opts = AuditOptions {
        draws,
        seed: s.seed,
        ..AuditOptions::default()
    };
    let mut cert = block_count_audit_with(&j, k.unwrap_or(0), &s.tol, opts).ctx(&src)?;
    if k.is_none() {
        // no expectation given: report the detected count as the verdict
        cert.holds = true;
        cert.notes.retain(|n| !n.starts_with("expected"));
    }
    let mut certificates = vec![cert];
    let mut inputs = vec![src.clone()];
    if let Some(b) = blocks {
        b.check_columns(j.cols()).ctx(&src)?;
        let t = tensor.map(load_tensor).transpose()?;
        inputs.extend(tensor.map(name));
        certificates.push(hierarchy_audit(&j, b, t.as_ref(), &s.tol).ctx(&src)?);
    } else if tensor.is_some() {
        return Err(CliError::Usage("--tensor needs --blocks".into()));
    }
    let report = Report {
        header: s.header("audit", inputs, blocks),
        certificates,
        result: None,
    };
    Ok((s.render(&report)?, report.all_hold()))
}

fn run(cli: Cli) -> CliResult<(String, u8)> {
    let tol = Tolerance::new(cli.tol, cli.abs_tol).ctx("tolerance")?;
    let s = Settings {
        tol,
        seed: cli.seed,
        format: cli.format,
    };
    let status = |(out, holds): Outcome| (out, if holds { 0 } else { 1 });
    match cli.command {
        Command::Analyze {
            criteria,
            blocks,
            tensor,
            batch,
            input,
        } => {
            let blocks = parse_blocks(&blocks)?;
            if let Some(dir) = batch {
                return analyze_batch(&s, &dir, &blocks, &criteria, tensor.as_deref());
            }
            let input = input.expect("clap requires an input without --batch");
            let report = analyze_one(&s, &input, &blocks, &criteria, tensor.as_deref())?;
            Ok(status((s.render(&report)?, report.all_hold())))
        }
        Command::Decompose { input } => run_decompose(&s, &input).map(status),
        Command::Gap {
            blocks,
            pairwise,
            input,
        } => run_gap(&s, &input, &parse_blocks(&blocks)?, pairwise).map(status),
        Command::Topology { input } => run_topology(&s, &input).map(status),
        Command::Synth {
            k,
            overlap,
            slot_dim,
            slot_out,
            out,
        } => run_synth(&s, k, overlap, slot_dim, slot_out, &out).map(status),
        Command::Audit {
            k,
            draws,
            blocks,
            tensor,
            input,
        } => {
            let blocks = blocks.as_deref().map(parse_blocks).transpose()?;
            run_audit(&s, &input, k, draws, blocks.as_ref(), tensor.as_deref()).map(status)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
