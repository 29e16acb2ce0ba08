//! Command-line front end: corpus generation, smoothness verdicts, line and
//! pencil inspection, closure runs, and the full verification battery.

use clap::{Parser, Subcommand};
use cubicspan::forms::CubicForm;
use cubicspan::gf::Field;
use cubicspan::harness::{census, random_surface, sample_corpus, verify_corpus};
use cubicspan::io::{
    parse_filter, parse_point, read_corpus_file, write_corpus_line, CorpusRecord,
};
use cubicspan::projgeom::ProjPoint;
use cubicspan::smoothcheck::{exhaustive_singular_search, is_smooth, ORACLE_CAP};
use cubicspan::span::span_closure;
use cubicspan::surface::SurfaceModel;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cubicspan",
    version,
    about = "Generate every rational point of a smooth cubic surface from a single one \
             by tangent and secant draws, and verify the supporting classification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw random cubic surfaces over GF(p^k) into a corpus file.
    Random {
        /// Field characteristic.
        #[arg(long)]
        p: u64,
        /// Extension degree.
        #[arg(long)]
        k: usize,
        /// Irreducible modulus coefficients, constant term first, comma
        /// separated; defaults to a canonical choice.
        #[arg(long)]
        modulus: Option<String>,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Comma-separated predicates: smooth, lines>=N, no-skew, insep-line.
        /// Without this flag records are raw draws (possibly singular).
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Attempt budget for filtered sampling.
        #[arg(long, default_value_t = 10_000)]
        max_attempts: u64,
    },
    /// Smoothness verdict for every record, cross-checked against a
    /// brute-force singular-point scan when the extension fits under the cap.
    Smooth {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rational lines of each surface, as point lists.
    Lines {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Classify the pencil of planes through one rational line.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        line: usize,
        /// Record index within the corpus file.
        #[arg(long, default_value_t = 0)]
        surface: usize,
    },
    /// Close a single surface point under tangent and secant draws.
    Span {
        #[arg(long = "in")]
        input: PathBuf,
        /// Point as colon-separated element indices, e.g. "1:1:1:0".
        #[arg(long)]
        point: String,
        /// Record index within the corpus file.
        #[arg(long, default_value_t = 0)]
        surface: usize,
        /// Write the witness chain here, one JSON record per line.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Run the verification battery; one report record per surface.
    VerifyTheorem {
        #[arg(long = "in")]
        input: PathBuf,
        /// Stop each generator search at the first hit instead of counting
        /// all generating points.
        #[arg(long)]
        early_exit: bool,
        #[arg(long)]
        report: PathBuf,
    },
    /// Verify a corpus and aggregate one summary record.
    Census {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn fmt_coords(coords: &[cubicspan::FieldElement]) -> String {
    coords
        .iter()
        .map(|c| c.index().to_string())
        .collect::<Vec<_>>()
        .join(":")
}

fn load_built(path: &Path) -> Result<Vec<(Field, CubicForm)>, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    for (i, rec) in read_corpus_file(path)?.iter().enumerate() {
        out.push(rec.build().map_err(|e| format!("record {i}: {e}"))?);
    }
    Ok(out)
}

/// Record indices that built, their models, and how many records did not.
type LoadedModels = (Vec<usize>, Vec<SurfaceModel>, usize);

/// Build models for every record, reporting unusable ones instead of dying.
fn load_models(path: &Path) -> Result<LoadedModels, Box<dyn std::error::Error>> {
    let mut ids = Vec::new();
    let mut models = Vec::new();
    let mut skipped = 0;
    for (i, (f, form)) in load_built(path)?.iter().enumerate() {
        match SurfaceModel::build(f, *form) {
            Ok(m) => {
                ids.push(i);
                models.push(m);
            }
            Err(e) => {
                eprintln!("surface {i}: skipped ({e})");
                skipped += 1;
            }
        }
    }
    Ok((ids, models, skipped))
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Random { p, k, modulus, count, seed, filter, out, max_attempts } => {
            let modulus = modulus
                .map(|s| {
                    s.split(',')
                        .map(|t| t.trim().parse::<u32>())
                        .collect::<Result<Vec<u32>, _>>()
                })
                .transpose()
                .map_err(|e| format!("bad modulus: {e}"))?;
            let f = Field::new(p, k, modulus)?;
            let mut file = BufWriter::new(File::create(&out)?);
            match filter {
                None => {
                    for idx in 0..count as u64 {
                        let form = random_surface(&f, seed, idx);
                        let rec = CorpusRecord::from_surface(&f, &form);
                        writeln!(file, "{}", write_corpus_line(&rec))?;
                    }
                    println!("wrote {} raw records to {}", count, out.display());
                }
                Some(spec) => {
                    let mut filt = parse_filter(&spec)?;
                    filt.max_attempts = max_attempts;
                    let sample = sample_corpus(&f, &filt, count, seed);
                    for (_, model) in &sample.surfaces {
                        let rec = CorpusRecord::from_surface(&f, model.form());
                        writeln!(file, "{}", write_corpus_line(&rec))?;
                    }
                    println!(
                        "wrote {} records to {} ({} attempts)",
                        sample.surfaces.len(),
                        out.display(),
                        sample.attempts
                    );
                    if sample.exhausted {
                        eprintln!(
                            "warning: attempt budget exhausted, corpus is partial ({}/{})",
                            sample.surfaces.len(),
                            count
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Smooth { input } => {
            let mut contradictions = 0;
            for (i, (f, form)) in load_built(&input)?.iter().enumerate() {
                let verdict = is_smooth(f, form);
                let q = f.order() as u64;
                let depth = (1..=2).rev().find(|&d| q.pow(d) <= ORACLE_CAP);
                let note = match depth {
                    None => String::from("oracle skipped (over cap)"),
                    Some(d) => match exhaustive_singular_search(f, form, d as usize) {
                        Err(e) => format!("oracle error: {e}"),
                        Ok(sing) if sing.is_empty() => {
                            format!("oracle d<={d}: no singular point")
                        }
                        Ok(sing) => {
                            if verdict {
                                contradictions += 1;
                                format!(
                                    "CONTRADICTION: oracle found {} singular points",
                                    sing.len()
                                )
                            } else {
                                format!("oracle d<={d}: {} singular points", sing.len())
                            }
                        }
                    },
                };
                println!(
                    "surface {i}: {} ({note})",
                    if verdict { "smooth" } else { "singular" }
                );
            }
            Ok(if contradictions == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }

        Cmd::Lines { input } => {
            for (i, (f, form)) in load_built(&input)?.iter().enumerate() {
                match SurfaceModel::build(f, *form) {
                    Err(e) => println!("surface {i}: unusable ({e})"),
                    Ok(m) => {
                        println!(
                            "surface {i}: {} points, {} lines{}",
                            m.points().len(),
                            m.klines().len(),
                            if m.has_skew_pair() { ", skew pair present" } else { "" }
                        );
                        for li in 0..m.klines().len() {
                            let pts: Vec<String> = m
                                .line_point_ids(li)
                                .iter()
                                .map(|&id| fmt_coords(m.points()[id].coords()))
                                .collect();
                            println!("  line {li}: {}", pts.join(" "));
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Classify { input, line, surface } => {
            let built = load_built(&input)?;
            let (f, form) = built
                .get(surface)
                .ok_or_else(|| format!("surface index {surface} out of range"))?;
            let model = SurfaceModel::build(f, *form)?;
            if line >= model.klines().len() {
                return Err(format!(
                    "line index {line} out of range ({} lines)",
                    model.klines().len()
                )
                .into());
            }
            let pencil = model.pencil(line);
            println!(
                "surface {surface} line {line}: {} planes, separable: {}, parabolic points: {:?}, triple points: {:?}",
                pencil.planes.len(),
                pencil.separable,
                pencil.parabolic,
                pencil.eckardt,
            );
            for (pi, plane) in pencil.planes.iter().enumerate() {
                let contact = plane
                    .contact_point
                    .map(|id| format!(", contact {}", fmt_coords(model.points()[id].coords())))
                    .unwrap_or_default();
                println!(
                    "  plane {pi} [{}]: {:?}, {} rational points{contact}",
                    fmt_coords(plane.plane.dual()),
                    plane.section_type,
                    plane.gamma_points.len()
                );
            }
            let c = model.pencil_census(line);
            let record = serde_json::json!({
                "line": line,
                "type_counts": c.type_counts,
                "parabolic": c.parabolic_count,
                "eckardt": c.eckardt_count,
                "n_nonparabolic": c.n_nonparabolic,
                "separable": c.separable,
                "violations": c.violations,
            });
            println!("{record}");
            Ok(if c.violations.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }

        Cmd::Span { input, point, surface, witnesses } => {
            let built = load_built(&input)?;
            let (f, form) = built
                .get(surface)
                .ok_or_else(|| format!("surface index {surface} out of range"))?;
            let model = SurfaceModel::build(f, *form)?;
            let pt: ProjPoint = parse_point(f, &point)?;
            let id = model
                .point_id(&pt)
                .ok_or_else(|| format!("point {point} is not on the surface"))?;
            let closure = span_closure(&model, &[id]);
            println!(
                "closure of {}: {} of {} points{}",
                fmt_coords(model.points()[id].coords()),
                closure.len(),
                model.points().len(),
                if closure.complete() { " (full surface)" } else { "" }
            );
            if let Some(path) = witnesses {
                let mut file = BufWriter::new(File::create(&path)?);
                for w in closure.witnesses() {
                    writeln!(file, "{}", serde_json::to_string(w)?)?;
                }
                println!(
                    "wrote {} witnesses to {}",
                    closure.witnesses().len(),
                    path.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::VerifyTheorem { input, early_exit, report } => {
            let (ids, models, skipped) = load_models(&input)?;
            let reports = verify_corpus(&models, !early_exit);
            let mut file = BufWriter::new(File::create(&report)?);
            let mut failures = 0;
            for (i, r) in ids.iter().zip(&reports) {
                writeln!(file, "{}", serde_json::to_string(r)?)?;
                let ok = r.passed();
                if !ok {
                    failures += 1;
                }
                println!(
                    "surface {i}: {} (points={}, lines={}, m={}, generator={})",
                    if ok { "PASS" } else { "FAIL" },
                    r.points,
                    r.klines,
                    r.m,
                    r.generator_found,
                );
                for c in r.failed_checks() {
                    println!("  {}: {}", c.name, c.detail);
                }
            }
            println!(
                "{} verified, {failures} failed, {skipped} skipped; report: {}",
                reports.len(),
                report.display()
            );
            Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }

        Cmd::Census { input, report } => {
            let (_, models, skipped) = load_models(&input)?;
            let reports = verify_corpus(&models, false);
            let summary = census(&reports);
            let mut file = BufWriter::new(File::create(&report)?);
            writeln!(file, "{}", serde_json::to_string(&summary)?)?;
            println!(
                "{} surfaces ({skipped} skipped), {} lines ({} separable)",
                summary.surfaces, summary.lines, summary.separable_lines
            );
            println!("plane type totals: {:?}", summary.total_type_counts);
            println!("off-line classes [triple, split node, cusp, non-split node]: {:?}", summary.off_line_classes);
            println!("n histogram: {:?}", summary.n_histogram);
            println!("m histogram: {:?}", summary.m_histogram);
            println!(
                "generator found on {}/{} surfaces; {} check failures",
                summary.surfaces_with_generator, summary.surfaces, summary.check_failures
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
