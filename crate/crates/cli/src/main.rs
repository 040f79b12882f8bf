//! Command-line front end: parse fan/tuple/skeleton files, dispatch to the
//! toolkit, and emit deterministic text or structured output.
//!
//! Exit codes: 0 on success, 1 on a mathematical failure (a divisibility
//! violation, a non-integral integral, a failed membership or identity
//! check), 2 on input errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use torloc::fan::{parse_fan, render_fan, resolve, Fan, PivotPolicy};
use torloc::localize::{
    adams_pullback_check, dual_basis, euler_char_with_oracle, gkm_check, integrate, pexp_check,
    FixedPointTuple, PExpClass,
};
use torloc::mult::multiplicity_table;
use torloc::ring::VarStyle;
use torloc::rr::{verify_adams_rr_point, verify_grr_pushforward, verify_todd_identity};
use torloc::spherical::{
    assemble_system, check_relation_list, check_relations, membership, parse_labelled_tuple,
    parse_labelled_tuple_owned, parse_skeleton, surface_data, SurfaceKind,
};
use torloc::suite;

const FORMAT_VERSION: &str = "torloc.v1";

#[derive(Parser)]
#[command(
    name = "torloc",
    about = "Exact equivariant localization computations on toric and spherical varieties",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format: human-readable text or the versioned structured form.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Print the equivariant multiplicity table of a complete fan.
    Emult {
        #[arg(long)]
        fan: PathBuf,
        /// Restrict output to one cone id.
        #[arg(long)]
        cone: Option<usize>,
    },
    /// Equivariant Euler characteristic of a named divisor.
    Euler {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        divisor: String,
        /// Also run the lattice-point enumeration and diff the results.
        #[arg(long)]
        oracle: bool,
    },
    /// Integrate a fixed-point tuple against the multiplicities.
    Integrate {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Check the wall congruences of a tuple.
    GkmCheck {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Check face agreement of a tuple on all shared faces.
    PexpCheck {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Dual basis of orbit-closure classes (cone ids, comma-separated).
    DualBasis {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, value_delimiter = ',')]
        cones: Vec<usize>,
    },
    /// Riemann-Roch identity checks at every fixed point.
    RrCheck {
        #[arg(long)]
        fan: PathBuf,
        /// Also check the pushforward identity for this divisor.
        #[arg(long)]
        divisor: Option<String>,
        /// Also check the Adams ratio identity for this j.
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        adams: Option<i64>,
        /// Truncation degree (default 10; the pushforward check uses 8).
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Verify that the Adams image of a valid class is again valid.
    AdamsCheck {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i64).range(1..))]
        adams: i64,
    },
    /// Check a tuple against a surface catalogue entry or a skeleton.
    SphericalCheck {
        /// Surface kind: point|p1|pv|p1p1|fn:N|pn:N|kn:N.
        #[arg(long, conflicts_with = "skeleton")]
        kind: Option<String>,
        #[arg(long)]
        skeleton: Option<PathBuf>,
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Smooth refinement of a fan by stellar subdivision.
    Resolve {
        #[arg(long)]
        fan: PathBuf,
    },
    /// Run the full acceptance suite over the built-in corpus.
    Corpus,
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (e.g. `torloc ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_fan(path: &PathBuf) -> Result<Fan> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading fan file {}", path.display()))?;
    parse_fan(&text).map_err(|e| anyhow!("{e}"))
}

fn load_tuple(fan: &Fan, path: &PathBuf) -> Result<FixedPointTuple> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading tuple file {}", path.display()))?;
    FixedPointTuple::parse(fan, &text).map_err(|e| anyhow!("{e}"))
}

fn header(cli: &Cli, command: &str) {
    if cli.format == Format::Structured {
        println!("{FORMAT_VERSION} {command}");
    }
}

fn cone_label(fan: &Fan, id: usize) -> String {
    let rays: Vec<String> = fan.cone(id).rays.iter().map(|r| r.to_string()).collect();
    format!("cone {id} <{}>", rays.join(","))
}

/// Returns Ok(true) for success/pass, Ok(false) for a mathematical failure,
/// Err for input problems.
fn dispatch(cli: &Cli) -> Result<bool> {
    let style = VarStyle::Indexed;
    match &cli.command {
        Command::Emult { fan, cone } => {
            let fan = load_fan(fan)?;
            let table = multiplicity_table(&fan).map_err(|e| anyhow!("{e}"))?;
            header(cli, "emult");
            for &m in fan.maximal_cones() {
                if cone.is_some_and(|c| c != m) {
                    continue;
                }
                let em_k = table.em_k[&m].render(&style);
                let em_a = table.em_a[&m].render(&style);
                match cli.format {
                    Format::Text => {
                        println!("{}:", cone_label(&fan, m));
                        println!("  em^K = {em_k}");
                        println!("  em^A = {em_a}");
                    }
                    Format::Structured => {
                        println!("em-k {m} {}", table.em_k[&m].to_pairs());
                        println!("em-a {m} {em_a}");
                    }
                }
            }
            Ok(true)
        }
        Command::Euler {
            fan,
            divisor,
            oracle,
        } => {
            let fan = load_fan(fan)?;
            let d = fan.divisor(divisor).map_err(|e| anyhow!("{e}"))?.clone();
            header(cli, "euler");
            if *oracle {
                let (value, lattice, agree) =
                    euler_char_with_oracle(&fan, &d).map_err(|e| anyhow!("{e}"))?;
                match cli.format {
                    Format::Text => {
                        println!("chi = {}", value.render(&style));
                        println!("lattice-point sum = {}", lattice.render(&style));
                        println!("oracle: {}", if agree { "agree" } else { "DISAGREE" });
                    }
                    Format::Structured => {
                        println!("chi {}", value.to_pairs());
                        println!("oracle {}", lattice.to_pairs());
                        println!("agree {agree}");
                    }
                }
                Ok(agree)
            } else {
                let value = torloc::localize::euler_char(&fan, &d).map_err(|e| anyhow!("{e}"))?;
                match cli.format {
                    Format::Text => println!("chi = {}", value.render(&style)),
                    Format::Structured => println!("chi {}", value.to_pairs()),
                }
                Ok(true)
            }
        }
        Command::Integrate { fan, tuple } => {
            let fan = load_fan(fan)?;
            let tuple = load_tuple(&fan, tuple)?;
            header(cli, "integrate");
            match integrate(&fan, &tuple) {
                Ok(value) => {
                    match cli.format {
                        Format::Text => println!("integral = {}", value.render(&style)),
                        Format::Structured => println!("integral {}", value.to_pairs()),
                    }
                    Ok(true)
                }
                Err(torloc::localize::LocalizeError::NonIntegralResult { residue }) => {
                    println!("non-integral: residue {}", residue.render(&style));
                    Ok(false)
                }
                Err(e) => Err(anyhow!("{e}")),
            }
        }
        Command::GkmCheck { fan, tuple } => {
            let fan = load_fan(fan)?;
            let tuple = load_tuple(&fan, tuple)?;
            header(cli, "gkm-check");
            let violations = gkm_check(&fan, &tuple).map_err(|e| anyhow!("{e}"))?;
            if violations.is_empty() {
                println!("pass");
                Ok(true)
            } else {
                for v in &violations {
                    println!(
                        "violated wall between {} and {}: weight {}, remainder {}",
                        cone_label(&fan, v.wall.sides.0),
                        cone_label(&fan, v.wall.sides.1),
                        torloc::ring::render_character(&v.wall.weight, &style),
                        v.remainder.render(&style)
                    );
                }
                Ok(false)
            }
        }
        Command::PexpCheck { fan, tuple } => {
            let fan = load_fan(fan)?;
            let tuple = load_tuple(&fan, tuple)?;
            header(cli, "pexp-check");
            let violations = pexp_check(&fan, &tuple).map_err(|e| anyhow!("{e}"))?;
            if violations.is_empty() {
                println!("pass");
                Ok(true)
            } else {
                for v in &violations {
                    println!(
                        "face disagreement between {} and {} on rays {:?}",
                        cone_label(&fan, v.cones.0),
                        cone_label(&fan, v.cones.1),
                        v.face_rays
                    );
                }
                Ok(false)
            }
        }
        Command::DualBasis { fan, cones } => {
            let fan = load_fan(fan)?;
            let db = dual_basis(&fan, cones).map_err(|e| anyhow!("{e}"))?;
            header(cli, "dual-basis");
            for (i, dual) in db.duals.iter().enumerate() {
                match cli.format {
                    Format::Text => {
                        println!("dual {i} (of cone {}):", cones[i]);
                        for (&p, f) in dual.entries() {
                            println!("  at {}: {}", cone_label(&fan, p), f.render(&style));
                        }
                    }
                    Format::Structured => {
                        for (&p, f) in dual.entries() {
                            println!("dual {i} {p} {}", f.to_pairs());
                        }
                    }
                }
            }
            match cli.format {
                Format::Text => {
                    println!("image matrix (rows = duals, columns = basis):");
                    for row in &db.image_matrix {
                        let cells: Vec<String> = row.iter().map(|x| x.render(&style)).collect();
                        println!("  [{}]", cells.join(" | "));
                    }
                    println!("determinant = {}", db.determinant.render(&style));
                }
                Format::Structured => {
                    for (i, row) in db.image_matrix.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            println!("image {i} {j} {}", x.to_pairs());
                        }
                    }
                    println!("determinant {}", db.determinant.to_pairs());
                }
            }
            Ok(true)
        }
        Command::RrCheck {
            fan,
            divisor,
            adams,
            degree,
        } => {
            let fan = load_fan(fan)?;
            header(cli, "rr-check");
            let todd_degree = degree.unwrap_or(10);
            let mut all_pass = true;
            let print = |report: &torloc::rr::RRReport| {
                let place = report
                    .cone
                    .map_or("fan".to_string(), |c| cone_label(&fan, c));
                println!(
                    "{} {} degree {}: {}{}",
                    report.check,
                    place,
                    report.degree,
                    if report.pass { "pass" } else { "FAIL" },
                    if report.detail.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", report.detail)
                    }
                );
            };
            for &m in fan.maximal_cones() {
                let report = verify_todd_identity(&fan, m, todd_degree).map_err(|e| anyhow!("{e}"))?;
                all_pass &= report.pass;
                print(&report);
                if let Some(j) = adams {
                    let report = verify_adams_rr_point(&fan, m, *j).map_err(|e| anyhow!("{e}"))?;
                    all_pass &= report.pass;
                    print(&report);
                }
            }
            if let Some(name) = divisor {
                let d = fan.divisor(name).map_err(|e| anyhow!("{e}"))?.clone();
                let report = verify_grr_pushforward(&fan, &d, degree.unwrap_or(8))
                    .map_err(|e| anyhow!("{e}"))?;
                all_pass &= report.pass;
                print(&report);
            }
            Ok(all_pass)
        }
        Command::AdamsCheck { fan, tuple, adams } => {
            let fan = load_fan(fan)?;
            let tuple = load_tuple(&fan, tuple)?;
            header(cli, "adams-check");
            let class = PExpClass::new(&fan, tuple)
                .map_err(|v| anyhow!("input tuple is not a valid class ({} face violations)", v.len()))?;
            let violations = adams_pullback_check(&fan, *adams, &class).map_err(|e| anyhow!("{e}"))?;
            if violations.is_empty() {
                println!("pass");
                Ok(true)
            } else {
                println!("Adams image violates {} face conditions", violations.len());
                Ok(false)
            }
        }
        Command::SphericalCheck {
            kind,
            skeleton,
            tuple,
        } => {
            let text = std::fs::read_to_string(tuple)
                .with_context(|| format!("reading tuple file {}", tuple.display()))?;
            header(cli, "spherical-check");
            if let Some(kind) = kind {
                let kind = SurfaceKind::parse(kind).map_err(|e| anyhow!("{e}"))?;
                let data = surface_data(kind).map_err(|e| anyhow!("{e}"))?;
                let entries =
                    parse_labelled_tuple(&data.points, 1, &text).map_err(|e| anyhow!("{e}"))?;
                let violations = check_relations(kind, &entries).map_err(|e| anyhow!("{e}"))?;
                let member = membership(kind, &entries).map_err(|e| anyhow!("{e}"))?;
                match &member {
                    Ok(coeffs) => {
                        let rendered: Vec<String> = coeffs
                            .iter()
                            .map(|c| c.render(&VarStyle::T))
                            .collect();
                        println!("member: coefficients [{}]", rendered.join(", "));
                    }
                    Err(nm) => {
                        println!(
                            "not a member: stuck at {}",
                            data.points.get(nm.stuck_at).copied().unwrap_or("end")
                        );
                    }
                }
                for v in &violations {
                    println!("violated: {} (remainder {})", v.label, v.remainder.render(&VarStyle::T));
                }
                Ok(violations.is_empty() && member.is_ok())
            } else if let Some(skeleton) = skeleton {
                let stext = std::fs::read_to_string(skeleton)
                    .with_context(|| format!("reading skeleton file {}", skeleton.display()))?;
                let sk = parse_skeleton(&stext).map_err(|e| anyhow!("{e}"))?;
                let entries = parse_labelled_tuple_owned(&sk.points, sk.rank, &text)
                    .map_err(|e| anyhow!("{e}"))?;
                let system = assemble_system(&sk).map_err(|e| anyhow!("{e}"))?;
                let violations = check_relation_list(&system, &entries);
                if violations.is_empty() {
                    println!("pass ({} relations)", system.len());
                    Ok(true)
                } else {
                    for v in &violations {
                        println!("violated: {}", v.label);
                    }
                    Ok(false)
                }
            } else {
                bail!("spherical-check needs --kind or --skeleton");
            }
        }
        Command::Resolve { fan } => {
            let fan = load_fan(fan)?;
            let (smooth, fiber) = resolve(&fan, PivotPolicy::MinSum);
            header(cli, "resolve");
            print!("{}", render_fan(&smooth));
            for (i, &m) in smooth.maximal_cones().iter().enumerate() {
                println!(
                    "# maximal {} over input maximal {}",
                    cone_label(&smooth, m),
                    fiber[i]
                );
            }
            Ok(true)
        }
        Command::Corpus => {
            header(cli, "corpus");
            let reports = suite::run_all();
            let mut all = true;
            for r in &reports {
                println!("{}", r.line());
                all &= r.passed;
            }
            Ok(all)
        }
    }
}

