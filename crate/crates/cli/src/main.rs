//! `vpbridge`: validate diagrams, compute invariants, apply rewrite
//! moves, glue and factor along summing spheres, evaluate the classical
//! bounds, search for thinner positions, and run the self-verifying
//! demo cases.
//!
//! Exit codes: 0 success, 1 validation/check failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use vpbridge_core::invariant::{
    check_identities, invariants, invariants_unchecked, nonnegativity_bound,
};
use vpbridge_core::model::{BodyId, Diagram, SurfaceId};
use vpbridge_core::moves::{self, MoveSpec};
use vpbridge_core::search::{minimize, SearchBudget};
use vpbridge_core::sums::{additivity_check, glue, split_prime, SumAttach, SumPoint};
use vpbridge_core::textfmt;

mod demo;

#[derive(Parser)]
#[command(
    name = "vpbridge",
    version,
    about = "Combinatorial engine for v.p.-bridge surface diagrams"
)]
struct Cli {
    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Print invariants after every step of multi-step operations.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a diagram file; exit 1 on the first violated invariant.
    Validate { file: PathBuf },
    /// Print the invariant report of a diagram.
    Invariants {
        file: PathBuf,
        /// Also evaluate the global identities; exit 0 iff all hold.
        #[arg(long)]
        check_identities: bool,
        /// Also evaluate the non-negativity bound (needs the irreducible
        /// flag).
        #[arg(long)]
        bound: bool,
    },
    /// Apply a moves file to a diagram and print the result.
    Apply {
        diagram: PathBuf,
        moves: PathBuf,
        /// Write the resulting diagram here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Glue two diagrams along a summing sphere.
    Glue {
        file1: PathBuf,
        /// Sum point: body:bridge | body:vertical:SID | body:ghost:SID:SID
        /// | body:loop | body:vertex:SID
        point1: String,
        file2: PathBuf,
        point2: String,
        /// Puncture count of the summing sphere.
        #[arg(long)]
        kind: u8,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Split a diagram along its thin summing spheres into prime factors.
    Factor {
        file: PathBuf,
        /// Directory for the factor files (default: alongside the input).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Closed-form bounds on classical invariants.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Breadth-limited minimization of netext (and width).
    Search {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// netχ cap; omit for no cap.
        #[arg(long)]
        chi_cap: Option<i64>,
        /// Track width too (requires the width-hypothesis flags).
        #[arg(long)]
        width: bool,
        #[arg(long, default_value_t = 4000)]
        max_diagrams: usize,
        /// Stem for the emitted best-diagram and script files.
        #[arg(long)]
        out_stem: Option<PathBuf>,
    },
    /// Run the built-in verified demo cases.
    Demo {
        /// Case name, or `all`.
        #[arg(default_value = "all")]
        case: String,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Tunnel-number bounds for a connected sum.
    Tunnel(TunnelArgs),
    /// Prime-summand bounds for a composite (g,b)-knot.
    Morimoto {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        b: u32,
    },
    /// Bridge-number superadditivity check.
    Bridge(BridgeArgs),
}

#[derive(Args)]
struct TunnelArgs {
    /// Number of prime factors.
    #[arg(long)]
    n: usize,
    /// Number of m-small factors (listed first).
    #[arg(long)]
    j: usize,
    /// Comma-separated tunnel numbers, m-small factors first.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u32>,
}

#[derive(Args)]
struct BridgeArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    bg: u32,
    /// Comma-separated genus:bridge pairs.
    #[arg(long, value_delimiter = ',')]
    parts: Vec<String>,
    /// Assert t(K_i) ≥ g_i for the two-summand equality.
    #[arg(long)]
    tunnel_ge_genus: bool,
}

fn read_diagram(path: &Path) -> Result<Diagram> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    textfmt::parse(&text).map_err(|e| anyhow!("{}: {}", path.display(), e))
}

fn parse_point(s: &str) -> Result<SumPoint> {
    let bits: Vec<&str> = s.split(':').collect();
    if bits.len() < 2 {
        return Err(anyhow!("sum point must be body:kind[:args], got {:?}", s));
    }
    let body = BodyId(bits[0].to_owned());
    let attach = match (bits[1], bits.len()) {
        ("bridge", 2) => SumAttach::OnBridge,
        ("loop", 2) => SumAttach::OnLoop,
        ("vertical", 3) => SumAttach::OnVertical(SurfaceId(bits[2].to_owned())),
        ("ghost", 4) => {
            SumAttach::OnGhost(SurfaceId(bits[2].to_owned()), SurfaceId(bits[3].to_owned()))
        }
        ("vertex", 3) => SumAttach::AtVertex(SurfaceId(bits[2].to_owned())),
        _ => return Err(anyhow!("bad sum point {:?}", s)),
    };
    Ok(SumPoint { body, attach })
}

fn print_report(d: &Diagram, check: bool, bound: bool, quiet: bool) -> Result<bool> {
    let rep = invariants(d).map_err(|e| anyhow!("{}", e))?;
    println!("{:<14} {}", "netext", rep.netext);
    println!("{:<14} {}", "width", rep.width);
    println!("{:<14} {}", "netchi", rep.netchi);
    match rep.gabai_width {
        Some(w) => println!("{:<14} {}", "gabai-width", w),
        None => println!("{:<14} undefined (non-sphere component)", "gabai-width"),
    }
    if !quiet {
        for (bid, dl) in &rep.delta_by_body {
            println!("{:<14} {}", format!("delta {}", bid), dl);
        }
    }
    let mut all_hold = true;
    if check {
        for c in check_identities(d) {
            all_hold &= c.holds;
            println!("identity {}", c);
        }
    }
    if bound {
        let r = nonnegativity_bound(d).map_err(|e| anyhow!("{}", e))?;
        println!(
            "{:<14} {} [{}]",
            "nonneg-bound",
            r.bound,
            if r.satisfied { "ok" } else { "VIOLATED" }
        );
        if let Some(ok) = r.width_vs_netext {
            println!(
                "{:<14} {}",
                "w >= netext",
                if ok { "ok" } else { "VIOLATED" }
            );
            all_hold &= ok;
        }
        all_hold &= r.satisfied;
    }
    Ok(all_hold)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => print!("{}", text),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { file } => {
            let d = read_diagram(&file)?;
            let rep = d.validate();
            if rep.is_valid() {
                if !cli.quiet {
                    println!("valid");
                }
                Ok(0)
            } else {
                println!("invalid: {}", rep.violations[0]);
                if cli.trace {
                    for v in &rep.violations[1..] {
                        println!("invalid: {}", v);
                    }
                }
                Ok(1)
            }
        }
        Command::Invariants {
            file,
            check_identities,
            bound,
        } => {
            let d = read_diagram(&file)?;
            let ok = print_report(&d, check_identities, bound, cli.quiet)?;
            Ok(u8::from(!ok))
        }
        Command::Apply {
            diagram,
            moves,
            out,
        } => {
            let d = read_diagram(&diagram)?;
            let text = std::fs::read_to_string(&moves)
                .with_context(|| format!("cannot read {}", moves.display()))?;
            let script =
                textfmt::parse_moves(&text).map_err(|e| anyhow!("{}: {}", moves.display(), e))?;
            let mut cur = d;
            for (k, m) in script.moves.iter().enumerate() {
                let as_thinning = script.thinning[k];
                cur = match (m, as_thinning) {
                    (MoveSpec::Untelescope(u), true) => moves::elementary_thinning(&cur, u)
                        .map_err(|e| anyhow!("step {}: {}", k + 1, e))?,
                    _ => {
                        moves::apply_move(&cur, m).map_err(|e| anyhow!("step {}: {}", k + 1, e))?
                    }
                };
                if cli.trace {
                    let r = invariants_unchecked(&cur);
                    eprintln!(
                        "# step {} ({}): netext={} width={} netchi={}",
                        k + 1,
                        m.name(),
                        r.netext,
                        r.width,
                        r.netchi
                    );
                }
            }
            write_or_print(&out, &textfmt::print(&cur))?;
            Ok(0)
        }
        Command::Glue {
            file1,
            point1,
            file2,
            point2,
            kind,
            out,
        } => {
            let d1 = read_diagram(&file1)?;
            let d2 = read_diagram(&file2)?;
            let p1 = parse_point(&point1)?;
            let p2 = parse_point(&point2)?;
            if p1.kind() != kind || p2.kind() != kind {
                return Err(anyhow!(
                    "--kind {} does not match the sum points (kinds {} and {})",
                    kind,
                    p1.kind(),
                    p2.kind()
                ));
            }
            let g = glue(&d1, &p1, &d2, &p2).map_err(|e| anyhow!("{}", e))?;
            write_or_print(&out, &textfmt::print(&g))?;
            Ok(0)
        }
        Command::Factor { file, out_dir } => {
            let d = read_diagram(&file)?;
            let fac = split_prime(&d).map_err(|e| anyhow!("{}", e))?;
            let dir =
                out_dir.unwrap_or_else(|| file.parent().map(Path::to_path_buf).unwrap_or_default());
            let stem = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "diagram".into());
            for (k, f) in fac.factors.iter().enumerate() {
                let path = dir.join(format!("{}.factor{}.diag", stem, k + 1));
                std::fs::write(&path, textfmt::print(f))
                    .with_context(|| format!("cannot write {}", path.display()))?;
                if !cli.quiet {
                    let r = invariants_unchecked(f);
                    println!(
                        "factor {} -> {} (netext={} width={} netchi={})",
                        k + 1,
                        path.display(),
                        r.netext,
                        r.width,
                        r.netchi
                    );
                }
            }
            println!("factors={} p2={} p3={}", fac.factors.len(), fac.p2, fac.p3);
            if cli.trace {
                let add = additivity_check(&fac.factors, &d, fac.p2, fac.p3);
                println!(
                    "additivity netext {} = {} [{}]",
                    add.netext_whole,
                    add.netext_parts,
                    if add.netext_ok { "ok" } else { "FAIL" }
                );
            }
            Ok(0)
        }
        Command::Bounds { which } => {
            match which {
                BoundsCmd::Tunnel(args) => {
                    let profile =
                        vpbridge_core::bounds::SummandProfile::tunnels(args.n, args.j, &args.t);
                    let (lo, hi) = vpbridge_core::bounds::tunnel_bounds(&profile)
                        .map_err(|e| anyhow!("{}", e))?;
                    println!("lower={} upper={}", lo, hi);
                    if lo == hi && !cli.quiet {
                        println!("# tunnel number pinned exactly: t(K) = {}", lo);
                    }
                }
                BoundsCmd::Morimoto { g, b } => {
                    let (m, m11, m2b) = vpbridge_core::bounds::morimoto_bounds(g, b)
                        .map_err(|e| anyhow!("{}", e))?;
                    println!("max={} min11={} min2bridge={}", m, m11, m2b);
                }
                BoundsCmd::Bridge(args) => {
                    let mut parts = Vec::new();
                    for p in &args.parts {
                        let bits: Vec<&str> = p.split(':').collect();
                        if bits.len() != 2 {
                            return Err(anyhow!("parts must be genus:bridge pairs"));
                        }
                        parts.push((bits[0].parse::<u32>()?, bits[1].parse::<u32>()?));
                    }
                    let rep = vpbridge_core::bounds::bridge_superadditivity_check(
                        args.g,
                        args.bg,
                        &parts,
                        args.tunnel_ge_genus,
                    )
                    .map_err(|e| anyhow!("{}", e))?;
                    println!(
                        "superadditive={} lhs={} rhs={}",
                        rep.superadditive_ok, rep.lhs, rep.rhs
                    );
                    if let Some(eq) = rep.equality {
                        println!("equality={}", eq);
                    }
                    return Ok(u8::from(!rep.superadditive_ok));
                }
            }
            Ok(0)
        }
        Command::Search {
            file,
            depth,
            chi_cap,
            width,
            max_diagrams,
            out_stem,
        } => {
            let d = read_diagram(&file)?;
            let budget = SearchBudget {
                max_depth: depth,
                max_diagrams,
                netchi_cap: chi_cap,
                width_tracking: width,
            };
            let m = minimize(&d, &budget).map_err(|e| anyhow!("{}", e))?;
            println!(
                "best netext={} width={} netchi={} explored={}{}",
                m.report.netext,
                m.report.width,
                m.report.netchi,
                m.explored,
                if m.exhausted {
                    " (budget exhausted)"
                } else {
                    ""
                }
            );
            println!("# upper bounds only; no geometric realizability is claimed");
            if cli.trace {
                let traj =
                    vpbridge_core::search::replay(&d, &m.script).map_err(|e| anyhow!("{}", e))?;
                for (k, step) in traj.iter().enumerate() {
                    let r = invariants_unchecked(step);
                    eprintln!(
                        "# depth {}: netext={} width={} netchi={}",
                        k, r.netext, r.width, r.netchi
                    );
                }
            }
            let stem = out_stem.unwrap_or_else(|| {
                let mut p = file.clone();
                p.set_extension("");
                p
            });
            let best_path = stem.with_extension("best.diag");
            let script_path = stem.with_extension("script");
            std::fs::write(&best_path, textfmt::print(&m.best))
                .with_context(|| format!("cannot write {}", best_path.display()))?;
            let thinning = vec![true; m.script.len()];
            std::fs::write(&script_path, textfmt::print_moves(&m.script, &thinning))
                .with_context(|| format!("cannot write {}", script_path.display()))?;
            if !cli.quiet {
                println!(
                    "wrote {} and {}",
                    best_path.display(),
                    script_path.display()
                );
            }
            Ok(0)
        }
        Command::Demo { case } => demo::run(&case, cli.quiet),
    }
}

fn main() -> ExitCode {
    // Dying quietly on a closed pipe beats a panic trace under `| head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}
