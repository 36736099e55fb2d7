//! `mori-class`: invariants, pairwise comparison, census and verification
//! for simply connected 3-dimensional Mori fiber spaces with torsion-free
//! homology, described in the `[mfs]` file format.
//!
//! Exit codes for `compare`: 0 diffeomorphic, 1 not diffeomorphic,
//! 2 undetermined-but-finite, 3 input error. `verify` exits 0 when every
//! check passes and 1 otherwise; all commands exit 3 on bad input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mori_class::classifier::{census, CensusBounds, CensusFamily};
use mori_class::format::{parse_str, MfsFile};
use mori_class::verify;

#[derive(Parser)]
#[command(
    name = "mori-class",
    version,
    about = "Diffeomorphism classification of 3-dimensional Mori fiber spaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the invariant record extracted from a description file.
    Invariants { file: PathBuf },
    /// Decide oriented diffeomorphism of two described spaces.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Emit the reason trace as JSON objects, one per line.
        #[arg(long)]
        json_lines: bool,
    },
    /// Enumerate feasible records of one family within bounds and group them
    /// by diffeomorphism class.
    Census {
        #[arg(long)]
        family: FamilyArg,
        #[arg(long, allow_negative_numbers = true)]
        min_degree: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_degree: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        min_ex: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_ex: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        min_k: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_k: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        min_d: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_d: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        min_relk3: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_relk3: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        min_twist: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_twist: Option<i64>,
        /// Blow-up count of the base surface (conic-bundle families).
        #[arg(long, allow_negative_numbers = true)]
        min_q: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_q: Option<i64>,
        /// Entry range for c1(E) / the relative c1.
        #[arg(long, allow_negative_numbers = true)]
        min_c1: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_c1: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        min_c2: Option<i64>,
        #[arg(long, allow_negative_numbers = true)]
        max_c2: Option<i64>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "fano")]
    Fano,
    #[value(name = "dp1")]
    Dp1,
    #[value(name = "cb-smooth")]
    CbSmooth,
    #[value(name = "cb-singular")]
    CbSingular,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lattice,
    Cubic,
    Classifier,
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::from(0);
            }
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };
    ExitCode::from(run(cli))
}

fn load(path: &Path) -> Result<MfsFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_str(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn run(cli: Cli) -> u8 {
    match cli.cmd {
        Cmd::Invariants { file } => {
            let parsed = match load(&file) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 3;
                }
            };
            if let Some(name) = &parsed.name {
                println!("name={name}");
            }
            print!("{}", parsed.description.invariants().render());
            0
        }
        Cmd::Compare {
            file_a,
            file_b,
            json_lines,
        } => {
            let (fa, fb) = match (load(&file_a), load(&file_b)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("error: {e}");
                    return 3;
                }
            };
            let ra = fa.description.invariants();
            let rb = fb.description.invariants();
            let verdict = match mori_class::compare(&ra, &rb) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 3;
                }
            };
            if json_lines {
                for r in &verdict.reasons {
                    println!("{}", serde_json::to_string(r).expect("serializable"));
                }
                println!(
                    "{}",
                    serde_json::json!({
                        "verdict": verdict.outcome,
                        "branch": verdict.branch.to_string(),
                    })
                );
                println!("{}", verdict.machine_line());
            } else {
                print!("{}", verdict.render());
            }
            verdict.exit_code() as u8
        }
        Cmd::Census {
            family,
            min_degree,
            max_degree,
            min_ex,
            max_ex,
            min_k,
            max_k,
            min_d,
            max_d,
            min_relk3,
            max_relk3,
            min_twist,
            max_twist,
            min_q,
            max_q,
            min_c1,
            max_c1,
            min_c2,
            max_c2,
        } => {
            let bound = |name: &str, lo: Option<i64>, hi: Option<i64>| match (lo, hi) {
                (Some(a), Some(b)) => Ok(Some((a, b))),
                (None, None) => Ok(None),
                _ => Err(format!("both --min-{name} and --max-{name} are required")),
            };
            let bounds = (|| -> Result<CensusBounds, String> {
                Ok(CensusBounds {
                    degree: bound("degree", min_degree, max_degree)?,
                    euler: bound("ex", min_ex, max_ex)?,
                    k: bound("k", min_k, max_k)?,
                    d: bound("d", min_d, max_d)?,
                    rel_k3: bound("relk3", min_relk3, max_relk3)?,
                    twist: bound("twist", min_twist, max_twist)?,
                    blowups: bound("q", min_q, max_q)?,
                    c1: bound("c1", min_c1, max_c1)?,
                    c2: bound("c2", min_c2, max_c2)?,
                })
            })();
            let bounds = match bounds {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 3;
                }
            };
            let fam = match family {
                FamilyArg::Fano => CensusFamily::Fano,
                FamilyArg::Dp1 => CensusFamily::DelPezzo,
                FamilyArg::CbSmooth => CensusFamily::CbSmooth,
                FamilyArg::CbSingular => CensusFamily::CbSingular,
            };
            match census(fam, &bounds) {
                Ok(classes) => {
                    for (i, c) in classes.iter().enumerate() {
                        let fields = c
                            .representative
                            .render()
                            .lines()
                            .collect::<Vec<_>>()
                            .join(" ");
                        println!("class={} count={} {}", i + 1, c.count, fields);
                    }
                    println!("classes={}", classes.len());
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    3
                }
            }
        }
        Cmd::Verify { suite } => {
            let results = match suite {
                SuiteArg::Lattice => verify::lattice_suite(),
                SuiteArg::Cubic => verify::cubic_suite(),
                SuiteArg::Classifier => verify::classifier_suite(),
                SuiteArg::All => {
                    let mut r = verify::lattice_suite();
                    r.extend(verify::cubic_suite());
                    r.extend(verify::classifier_suite());
                    r
                }
            };
            print!("{}", verify::render_report(&results));
            if verify::all_passed(&results) {
                0
            } else {
                1
            }
        }
    }
}
