use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use icext_core::abc::parse_receiver;
use icext_core::*;

/// Exit statuses.
const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const GUARD: u8 = 2;
const USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "icext",
    version,
    about = "Index coding problems: minrank, verification and rank-invariant extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a problem file is a well-formed fitting matrix.
    Validate { file: PathBuf },
    /// Exact minimum code length with a witness code.
    Minrank {
        file: PathBuf,
        /// Field modulus; defaults to the problem's own field, or 2 for text files.
        #[arg(long)]
        field: Option<u32>,
        #[arg(long)]
        max_rank: Option<usize>,
        /// Largest subspace count allowed per code length.
        #[arg(long, default_value_t = 1_000_000_000)]
        guard: u128,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write the witness to PREFIX.code.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a code against a problem and print its decoding matrix.
    Verify {
        problem: PathBuf,
        #[arg(long)]
        code: PathBuf,
    },
    /// m-fold replication of the seed.
    ExtendReplicate {
        #[command(flatten)]
        seed: Seed,
        #[arg(short)]
        m: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Block construction from an involutory permutation and a column layout.
    ExtendInvolutory {
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        perm: String,
        /// Blocks such as "1-3,4-6"; "+" joins pieces of one block, as in "1+5,2+7".
        #[arg(long)]
        blocks: String,
        #[command(flatten)]
        out: Out,
    },
    /// Block construction after row-reducing the code to systematic form.
    ExtendSystematic {
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        out: Out,
    },
    /// General construction with the smallest admissible off-diagonal block.
    ExtendGeneral {
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        out: Out,
    },
    /// Generate a three-type block problem and its code.
    GenAbc {
        #[arg(long, required_unless_present = "spec")]
        r: Option<usize>,
        /// Block types, e.g. ABBC.
        #[arg(long, required_unless_present = "spec")]
        types: Option<String>,
        #[arg(long, required_unless_present = "spec")]
        perm: Option<String>,
        #[arg(long, default_value_t = 2)]
        field: u32,
        /// Type C receivers (block:message) that use the second condition, e.g. "4:1,4:3".
        #[arg(long)]
        cond2: Option<String>,
        /// Extra side information as 1-based row:column cells, e.g. "2:10,4:2".
        #[arg(long)]
        widen: Option<String>,
        /// Read the spec from a JSON file instead of flags.
        #[arg(long, conflicts_with_all = ["r", "types", "perm", "cond2"])]
        spec: Option<PathBuf>,
        #[command(flatten)]
        out: Out,
    },
    /// Encode random messages and decode at every receiver.
    Simulate {
        problem: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct Seed {
    problem: PathBuf,
    #[arg(long)]
    code: PathBuf,
}

#[derive(Args)]
struct Out {
    /// Write PREFIX.fx, PREFIX.code (and PREFIX.bxx) instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Loads a fitting matrix from text or JSON; JSON carries its own field.
fn load_problem(path: &Path) -> anyhow::Result<(FittingMatrix, Option<FieldSpec>)> {
    let text = read(path)?;
    if is_json(&text) {
        let p = IcProblem::from_json(&text)?;
        Ok((FittingMatrix::from_problem(&p)?, Some(p.field)))
    } else {
        Ok((text.parse()?, None))
    }
}

fn load_code(path: &Path) -> anyhow::Result<CodeMatrix> {
    Ok(CodeMatrix::new(read(path)?.parse()?)?)
}

fn load_seed(seed: &Seed) -> anyhow::Result<(FittingMatrix, CodeMatrix)> {
    let (f, field) = load_problem(&seed.problem)?;
    let g = load_code(&seed.code)?;
    if let Some(field) = field {
        if field != g.field() {
            return Err(Error::FieldMismatch { left: field.modulus(), right: g.field().modulus() }.into());
        }
    }
    Ok((f, g))
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes each (extension, text) pair to PREFIX.extension, or prints them separated by blank lines.
fn emit(out: &Out, parts: &[(&str, String)]) -> anyhow::Result<()> {
    match &out.out {
        Some(prefix) => {
            for (ext, text) in parts {
                let path = with_suffix(prefix, ext);
                fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
                println!("wrote {}", path.display());
            }
        }
        None => {
            let blocks: Vec<&str> = parts.iter().map(|(_, t)| t.as_str()).collect();
            print!("{}", blocks.join("\n"));
        }
    }
    Ok(())
}

fn emit_extension(out: &Out, ext: &ExtensionResult) -> anyhow::Result<()> {
    let mut parts = vec![("fx", ext.f_ext.to_string()), ("code", ext.g_ext.matrix().to_string())];
    if let Some(b) = &ext.b {
        parts.push(("bxx", b.to_string()));
    }
    emit(out, &parts)
}

fn parse_cells(s: &str) -> anyhow::Result<Vec<(usize, usize)>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| Ok(parse_receiver(t)?)).collect()
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Validate { file } => {
            let text = read(&file)?;
            let verdict = if is_json(&text) {
                IcProblem::from_json(&text).map(|p| (p.receivers.len(), p.k))
            } else {
                let p: Pattern = text.parse()?;
                problem::validate(&p).map(|_| (p.rows(), p.cols()))
            };
            match verdict {
                Ok((l, k)) => {
                    println!("valid: {l} receivers, {k} messages");
                    Ok(OK)
                }
                Err(e @ Error::Parse(_)) => Err(e.into()),
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Minrank { file, field, max_rank, guard, workers, out } => {
            let (f, own) = load_problem(&file)?;
            let field = match field {
                Some(p) => FieldSpec::new(p)?,
                None => own.unwrap_or(FieldSpec::GF2),
            };
            let config = MinrankConfig { guard, workers: workers.max(1), max_rank };
            let res = minrank(&f, field, &config)?;
            for c in &res.certificate {
                println!("length {}: {} subspaces ruled out", c.rank, c.subspaces_examined);
            }
            println!("minrank = {}", res.value);
            let code = res.witness.matrix().to_string();
            match out {
                Some(prefix) => emit(&Out { out: Some(prefix) }, &[("code", code)])?,
                None => print!("{code}"),
            }
            Ok(OK)
        }
        Command::Verify { problem, code } => {
            let (f, g) = load_seed(&Seed { problem, code })?;
            match find_decoding(&g, &f)? {
                Some(d) => {
                    println!("valid code of length {}", g.len());
                    print!("{}", d.matrix());
                    Ok(OK)
                }
                None => {
                    println!("not a valid code");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::ExtendReplicate { seed, m, out } => {
            let (f, g) = load_seed(&seed)?;
            emit_extension(&out, &replicate_extension(&f, &g, m)?)?;
            Ok(OK)
        }
        Command::ExtendInvolutory { seed, perm, blocks, out } => {
            let (f, g) = load_seed(&seed)?;
            let c = InvolutoryPermutation::parse_cycles(&perm, g.len())?;
            let layout = BlockLayout::parse(&blocks, f.cols())?;
            emit_extension(&out, &involutory_block_extension(&f, &g, &layout, &c)?)?;
            Ok(OK)
        }
        Command::ExtendSystematic { seed, perm, out } => {
            let (f, g) = load_seed(&seed)?;
            let c = InvolutoryPermutation::parse_cycles(&perm, g.len())?;
            emit_extension(&out, &systematic_extension(&f, &g, &c)?)?;
            Ok(OK)
        }
        Command::ExtendGeneral { seed, perm, out } => {
            let (f, g) = load_seed(&seed)?;
            let c = InvolutoryPermutation::parse_cycles(&perm, g.len())?.to_matrix(g.field());
            emit_extension(&out, &derive_bxx(&f, &g, &c)?)?;
            Ok(OK)
        }
        Command::GenAbc { r, types, perm, field, cond2, widen, spec, out } => {
            let spec = match spec {
                Some(path) => AbcSpec::from_json(&read(&path)?)?,
                None => {
                    let (Some(r), Some(types), Some(perm)) = (r, types, perm) else {
                        bail!("--r, --types and --perm are required without --spec");
                    };
                    let sigma = InvolutoryPermutation::parse_cycles(&perm, r)?;
                    let mut spec = AbcSpec::new(AbcSpec::parse_types(&types)?, sigma, FieldSpec::new(field)?)?;
                    for (b, k) in parse_cells(cond2.as_deref().unwrap_or(""))? {
                        spec.set_choice(b, k, TypeCChoice::Cond2)?;
                    }
                    spec
                }
            };
            let mut f = abc_problem(&spec);
            if let Some(cells) = widen {
                let cells: Vec<_> =
                    parse_cells(&cells)?.into_iter().map(|(r, c)| (r.wrapping_sub(1), c.wrapping_sub(1))).collect();
                f = f.with_stars(&cells)?;
            }
            emit(&out, &[("fx", f.to_string()), ("code", abc_code(&spec).matrix().to_string())])?;
            Ok(OK)
        }
        Command::Simulate { problem, code, trials, seed } => {
            let (f, g) = load_seed(&Seed { problem, code })?;
            let report = simulate(&g, &f, trials, seed)?;
            println!("trials: {}", report.trials);
            println!("receivers: {}", report.receivers);
            println!("failures: {}", report.failures);
            Ok(if report.failures == 0 { OK } else { NEGATIVE })
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ResourceGuard { .. }) => GUARD,
        Some(
            Error::Parse(_)
            | Error::DimensionMismatch(_)
            | Error::FieldMismatch { .. }
            | Error::InvalidModulus(_)
            | Error::EntryOutOfRange { .. }
            | Error::InvalidPermutation(_)
            | Error::NotInvolutory(_)
            | Error::InvalidLayout(_)
            | Error::InvalidSpec(_)
            | Error::RankOutOfRange { .. },
        ) => USAGE,
        Some(_) => NEGATIVE,
        None => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
