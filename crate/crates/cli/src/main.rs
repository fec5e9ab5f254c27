//! `amalgam`: amalgam norms, semigroup evolution, mild-solution solves and
//! scenario verification from the command line.
//!
//! Exit codes: 0 pass, 1 fail, 2 not applicable, 3 error.

mod config;
mod generate;
mod solve;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amalgam_core::amalgam::io::{read_field, write_field, write_norm_csv};
use amalgam_core::spectral::SpectralWorkspace;
use amalgam_core::{amalgam_norm, Exponent, GridField, NormSpec};
use amalgam_verify::catalog::{self, CATALOG};
use amalgam_verify::emit::emit_report;
use amalgam_verify::Verdict;
use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "amalgam",
    version,
    about = "Wiener amalgam norms, heat and Oseen flows, mild solutions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// E^p_q norm of a field file.
    Norm {
        field: PathBuf,
        #[arg(short, long, default_value = "2")]
        p: Exponent,
        #[arg(short, long, default_value = "2")]
        q: Exponent,
    },
    /// Heat or Oseen evolution of a field; prints one norm per time as CSV.
    Evolve {
        field: PathBuf,
        #[arg(long, value_enum, default_value_t = Op::Heat)]
        op: Op,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',', default_value = "0.25,1,4")]
        times: Vec<f64>,
        /// Derivative order for the heat flow.
        #[arg(long, default_value_t = 0)]
        h: u8,
        #[arg(short, long, default_value = "2")]
        p: Exponent,
        #[arg(short, long, default_value = "2")]
        q: Exponent,
        /// Also write the evolved fields here, one file per time.
        #[arg(long)]
        fields_dir: Option<PathBuf>,
    },
    /// Picard or regularized solve; writes a JSON report.
    Solve {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Override a config value, `key=value`.
        #[arg(long = "set")]
        sets: Vec<String>,
        /// Report path; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sample a construction into a field file.
    Generate {
        /// Generator name; `list` prints them.
        name: String,
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long = "set")]
        sets: Vec<String>,
        #[arg(short, long, default_value = "field.amlg")]
        out: PathBuf,
    },
    /// Run a catalog scenario and emit CSV, JSON and SVG reports.
    Verify {
        id: String,
        /// TOML file; a `[<id>]` table is used when present.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "set")]
        sets: Vec<String>,
        /// Report directory, `reports/<id>` by default.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List scenario ids.
    Catalog,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Heat,
    /// `e^{tΔ}ℙ∇·(u⊗u)` of a vector field.
    Oseen,
}

fn read(path: &Path) -> Result<GridField> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_field(BufReader::new(f))?)
}

fn write(path: &Path, field: &GridField) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    write_field(&mut w, field)?;
    w.flush()?;
    Ok(())
}

fn with_seed(mut sets: Vec<String>, seed: Option<u64>) -> Vec<String> {
    if let Some(s) = seed {
        sets.push(format!("seed={s}"));
    }
    sets
}

/// `u_i u_j` as a `d×d` tensor field.
fn outer(u: &GridField) -> Result<GridField> {
    let d = u.spec().d();
    if u.components() != d {
        bail!("Oseen evolution needs a field with {d} components");
    }
    let comps = (0..d * d)
        .map(|ij| {
            u.component(ij / d)
                .iter()
                .zip(u.component(ij % d))
                .map(|(a, b)| a * b)
                .collect()
        })
        .collect();
    Ok(GridField::from_components(u.spec().clone(), comps)?)
}

fn evolve(
    field: &Path,
    op: Op,
    times: &[f64],
    h: u8,
    p: Exponent,
    q: Exponent,
    dir: Option<&Path>,
) -> Result<()> {
    let u = read(field)?;
    let ws = SpectralWorkspace::new(u.spec());
    let source = match op {
        Op::Heat => u,
        Op::Oseen => outer(&u)?,
    };
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    let mut rows = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let v = match op {
            Op::Heat => ws.heat_evolve(&source, t, h)?,
            Op::Oseen => ws.oseen_apply(&source, t)?,
        };
        rows.push((t, amalgam_norm(&v, p, q)));
        if let Some(d) = dir {
            write(&d.join(format!("t{j:03}.amlg")), &v)?;
        }
    }
    write_norm_csv(io::stdout().lock(), &NormSpec::Epq { p, q }, &rows)?;
    Ok(())
}

fn verify(id: &str, config: Option<&Path>, sets: &[String], out: Option<&Path>) -> Result<Verdict> {
    let entry = catalog::lookup(id)?;
    let mut ps = config::load(config, Some(id), sets)?;
    let reports = (entry.run)(&mut ps)?;
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| Path::new("reports").join(id));
    let emitted = emit_report(&reports, &dir)?;
    let mut verdict = Verdict::Measured;
    for r in &reports {
        println!("{}", r.summary());
        verdict = verdict.and(r.verdict);
    }
    println!(
        "reports written to {}",
        emitted.json.parent().unwrap_or(&dir).display()
    );
    Ok(verdict)
}

fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Norm { field, p, q } => {
            let u = read(&field)?;
            println!("{}", amalgam_norm(&u, p, q));
        }
        Command::Evolve {
            field,
            op,
            times,
            h,
            p,
            q,
            fields_dir,
        } => {
            evolve(&field, op, &times, h, p, q, fields_dir.as_deref())?;
        }
        Command::Solve {
            config,
            seed,
            sets,
            out,
        } => {
            let mut ps = config::load(config.as_deref(), None, &with_seed(sets, seed))?;
            let report = solve::solve(&mut ps)?;
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(p) => {
                    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?
                }
                None => println!("{text}"),
            }
            return Ok(report.verdict);
        }
        Command::Generate {
            name,
            config,
            sets,
            out,
        } => {
            if name == "list" {
                for (n, about) in generate::GENERATORS {
                    println!("{n:<18} {about}");
                }
                return Ok(Verdict::Pass);
            }
            let mut ps = config::load(config.as_deref(), Some(&name), &sets)?;
            let f = generate::generate(&name, &mut ps)?;
            write(&out, &f)?;
            let cells: Vec<String> = f
                .spec()
                .cells_per_axis()
                .iter()
                .map(usize::to_string)
                .collect();
            println!(
                "{} components on {} cells, written to {}",
                f.components(),
                cells.join("x"),
                out.display()
            );
        }
        Command::Verify {
            id,
            config,
            seed,
            sets,
            out,
        } => {
            return verify(
                &id,
                config.as_deref(),
                &with_seed(sets, seed),
                out.as_deref(),
            );
        }
        Command::Catalog => {
            for e in CATALOG {
                println!("{:<20} {:<15} {}", e.id, e.tag, e.title);
            }
        }
    }
    Ok(Verdict::Pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(v) => ExitCode::from(v.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
