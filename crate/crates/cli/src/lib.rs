//! The `tangle` command line.
//!
//! Exit status: 0 on success, 1 when no drawing exists within the budget or
//! a witness fails verification, 2 on usage, input or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tangle_core::dp::{self, Objective, SpaceMode};
use tangle_core::fpt;
use tangle_core::hardness::{self, Digraph, Shape};
use tangle_core::render::render_svg;
use tangle_core::sbt::{self, ExactSorter, GreedySorter, Sorter};
use tangle_core::tree::RootedTree;
use tangle_core::witness::{Verdict, Witness};
use tangle_core::Permutation;

#[derive(Debug, Parser)]
#[command(name = "tangle", version, about = "Block-crossing minimization for one-sided tanglegrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Find a leaf order and at most K block crossings, exactly.
    Solve {
        tree: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: OutArg,
        /// Print search statistics to standard error.
        #[arg(long)]
        stats: bool,
    },
    /// Breakpoint-minimal leaf order, then sort it (factor-3 approximation with greedy).
    Approx {
        tree: PathBuf,
        #[arg(long, value_enum, default_value_t = SorterArg::Greedy)]
        sorter: SorterArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Minimum blocks or breakpoints over all leaf orders.
    Bpmin {
        tree: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Breakpoints)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        /// Use the low-memory variant of the complete-tree solver.
        #[arg(long)]
        compact: bool,
    },
    /// Sort a permutation by transpositions.
    Sbt {
        permutation: PathBuf,
        #[arg(long, value_enum, default_value_t = SbtMode::Exact)]
        mode: SbtMode,
        /// Budget, required for `--mode fpt`.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a witness file against a tree.
    Verify {
        tree: PathBuf,
        witness: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Generate trees.
    Gen(GenArgs),
    /// Draw a solved tanglegram as SVG.
    Render {
        tree: PathBuf,
        witness: PathBuf,
        /// Fixed tree to draw on the left; its leaves must read 1..n.
        #[arg(long)]
        left_tree: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output file; standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
struct GenSource {
    /// Complete tree from a permutation (padded to length 2^p - 1).
    #[arg(long, value_name = "FILE")]
    from_perm: Option<PathBuf>,
    /// Tree from a digraph, one arc "u v" per line.
    #[arg(long, value_name = "FILE")]
    from_digraph: Option<PathBuf>,
    /// Breakpoint tree from a tree and a block budget given with --blocks.
    #[arg(long, value_name = "FILE", requires = "blocks")]
    from_tree: Option<PathBuf>,
    /// Random tree from --seed, --n and --shape.
    #[arg(long, requires = "n")]
    random: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    source: GenSource,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Binary)]
    shape: ShapeArg,
    #[arg(long)]
    blocks: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SorterArg {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Blocks,
    Breakpoints,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Binary,
    Complete,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SbtMode {
    Exact,
    Fpt,
    Greedy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeArg {
    Binary,
    Complete,
    Arbitrary,
}

/// A run that completed but answered "no".
struct Negative(String);

/// Runs the command line `args` (program name first) and returns the exit
/// status. Results go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(None) => 0,
        Ok(Some(Negative(msg))) => {
            let _ = writeln!(stderr, "{msg}");
            1
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            2
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Option<Negative>> {
    match cmd {
        Command::Solve { tree, k, out, stats } => {
            let t = read_tree(&tree)?;
            let (found, st) = fpt::solve_with_stats(&t, k)?;
            if stats {
                writeln!(
                    stderr,
                    "search nodes {} max depth {} sorted orders {} contractions {}",
                    st.nodes, st.max_depth, st.sorted_orders, st.contractions
                )?;
            }
            match found {
                Some(w) => emit(&out, stdout, &w.to_text()).map(|_| None),
                None => Ok(Some(Negative(format!("UNSAT: no drawing with at most {k} block crossings")))),
            }
        }
        Command::Approx { tree, sorter, out } => {
            let t = read_tree(&tree)?;
            let backend: Box<dyn Sorter> = match sorter {
                SorterArg::Greedy => Box::new(GreedySorter),
                SorterArg::Exact => Box::new(ExactSorter::default()),
            };
            let w = dp::approximate_otbcm(&t, backend.as_ref())?;
            emit(&out, stdout, &w.to_text())?;
            Ok(None)
        }
        Command::Bpmin {
            tree,
            objective,
            engine,
            compact,
        } => {
            let t = read_tree(&tree)?;
            let obj = match objective {
                ObjectiveArg::Blocks => Objective::Blocks,
                ObjectiveArg::Breakpoints => Objective::Breakpoints,
            };
            let mode = if compact { SpaceMode::Compact } else { SpaceMode::Full };
            let best = match engine {
                EngineArg::Binary => dp::min_blocks_binary(&t, obj)?,
                EngineArg::Complete => dp::min_blocks_complete_with(&t, obj, mode)?,
                EngineArg::Auto if t.is_complete_binary() => dp::min_blocks_complete_with(&t, obj, mode)?,
                EngineArg::Auto => dp::min_blocks_binary(&t, obj)?,
            };
            let name = match obj {
                Objective::Blocks => "blocks",
                Objective::Breakpoints => "breakpoints",
            };
            writeln!(stdout, "{name} {}", best.value)?;
            writeln!(stdout, "{}", row_text(&best.permutation))?;
            Ok(None)
        }
        Command::Sbt { permutation, mode, k, out } => {
            let text = read(&permutation)?;
            let pi: Permutation = text.trim().parse().with_context(|| format!("parsing {}", permutation.display()))?;
            let result = match mode {
                SbtMode::Exact => sbt::exact_distance(&pi)?,
                SbtMode::Greedy => sbt::greedy_sort(&pi),
                SbtMode::Fpt => {
                    let Some(k) = k else { bail!("--mode fpt needs --k") };
                    match sbt::fpt_sort(&pi, k) {
                        Some(r) => r,
                        None => return Ok(Some(Negative(format!("UNSAT: distance exceeds {k}")))),
                    }
                }
            };
            if let (Some(k), false) = (k, matches!(mode, SbtMode::Fpt)) {
                if result.distance > k {
                    return Ok(Some(Negative(format!("UNSAT: found {} steps, more than {k}", result.distance))));
                }
            }
            emit(&out, stdout, &Witness::new(pi, result.sequence).to_text())?;
            Ok(None)
        }
        Command::Verify { tree, witness, k } => {
            let t = read_tree(&tree)?;
            let w = read_witness(&witness)?;
            match w.check(&t, k)? {
                Verdict::Valid => {
                    let noun = if w.len() == 1 { "crossing" } else { "crossings" };
                    writeln!(stdout, "valid: {} block {noun}", w.len())?;
                    Ok(None)
                }
                Verdict::NotALeafOrder => Ok(Some(Negative(
                    "INVALID: permutation is not a leaf order of the tree".into(),
                ))),
                Verdict::DoesNotSort => Ok(Some(Negative(
                    "INVALID: sequence does not sort the permutation".into(),
                ))),
                Verdict::TooLong { length, budget } => Ok(Some(Negative(format!(
                    "INVALID: {length} block crossings exceed the budget {budget}"
                )))),
            }
        }
        Command::Gen(args) => {
            let (t, threshold) = generate(&args)?;
            if let Some(th) = threshold {
                writeln!(stderr, "threshold {th}")?;
            }
            emit(&args.out, stdout, &format!("{}\n", t.serialize()))?;
            Ok(None)
        }
        Command::Render {
            tree,
            witness,
            left_tree,
            out,
        } => {
            let t = read_tree(&tree)?;
            let w = read_witness(&witness)?;
            let left = left_tree.as_deref().map(read_tree).transpose()?;
            match render_svg(&t, &w, left.as_ref()) {
                Ok(svg) => emit(&out, stdout, &svg).map(|_| None),
                Err(tangle_core::render::RenderError::InvalidWitness(v)) => {
                    Ok(Some(Negative(format!("INVALID: witness rejected ({v:?})"))))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn generate(args: &GenArgs) -> Result<(RootedTree, Option<usize>)> {
    let src = &args.source;
    if let Some(path) = &src.from_perm {
        let pi: Permutation = read(path)?.trim().parse().with_context(|| format!("parsing {}", path.display()))?;
        let inst = hardness::build_sbt_tree(&hardness::pad_permutation(&pi))?;
        return Ok((inst.tree, Some(inst.threshold)));
    }
    if let Some(path) = &src.from_digraph {
        let g: Digraph = read(path)?.parse().with_context(|| format!("parsing {}", path.display()))?;
        let inst = hardness::build_hp_tree(&g);
        return Ok((inst.tree, Some(inst.threshold)));
    }
    if let Some(path) = &src.from_tree {
        let t = read_tree(path)?;
        let inst = hardness::build_bp_tree(&t, args.blocks.expect("clap enforces --blocks"));
        return Ok((inst.tree, Some(inst.threshold)));
    }
    let shape = match args.shape {
        ShapeArg::Binary => Shape::Binary,
        ShapeArg::Complete => Shape::Complete,
        ShapeArg::Arbitrary => Shape::Arbitrary,
    };
    let n = args.n.expect("clap enforces --n");
    Ok((hardness::random_instance(args.seed, n, shape)?, None))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_tree(path: &Path) -> Result<RootedTree> {
    RootedTree::parse(&read(path)?).with_context(|| format!("parsing tree {}", path.display()))
}

fn read_witness(path: &Path) -> Result<Witness> {
    Witness::parse(&read(path)?).with_context(|| format!("parsing witness {}", path.display()))
}

fn row_text(p: &Permutation) -> String {
    p.as_slice().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn emit(out: &OutArg, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing standard output"),
    }
}
