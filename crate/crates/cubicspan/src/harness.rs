//! Corpus generation and batch verification: seeded random surfaces,
//! filtered sampling, the per-surface check battery, and corpus-level
//! aggregation.  Every theorem-level claim is exercised here with named
//! pass/fail records; exploration fields (q outside the theorem) report
//! observations without failing.

use crate::forms::CubicForm;
use crate::gf::Field;
use crate::io::{CorpusFilter, FieldDesc};
use crate::span::{
    build_generated_set, pigeonhole_check, single_generators, span_closure, SpanError,
};
use crate::surface::{OffLineClass, SurfaceModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The theorem's field-size hypothesis.
pub fn in_hypothesis(q: u64) -> bool {
    q == 8 || q >= 16
}

/// Deterministic surface draw: one independent stream per (seed, index).
/// Never returns the zero form.
pub fn random_surface(f: &Field, master_seed: u64, index: u64) -> CubicForm {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    loop {
        let mut c = [f.zero(); 20];
        for slot in c.iter_mut() {
            *slot = f.element(rng.gen_range(0..f.order()));
        }
        if let Ok(form) = CubicForm::new(c) {
            return form;
        }
    }
}

pub struct CorpusSample {
    /// Accepted surfaces with the draw index that produced them, in index
    /// order (deterministic for fixed seed/filter/count).
    pub surfaces: Vec<(u64, SurfaceModel)>,
    pub attempts: u64,
    /// max_attempts ran out before `count` surfaces were accepted.
    pub exhausted: bool,
}

fn try_accept(f: &Field, filter: &CorpusFilter, master_seed: u64, index: u64) -> Option<SurfaceModel> {
    let form = random_surface(f, master_seed, index);
    let model = SurfaceModel::build(f, form).ok()?;
    if model.klines().len() < filter.min_klines {
        return None;
    }
    if filter.forbid_skew_pair && model.has_skew_pair() {
        return None;
    }
    if filter.require_inseparable_line && model.pencils().iter().all(|p| p.separable) {
        return None;
    }
    Some(model)
}

/// Rejection-sample smooth surfaces passing the filter until `count` accepted
/// or the attempt budget is spent.  Acceptance is by draw index, so the
/// result does not depend on scheduling.
pub fn sample_corpus(
    f: &Field,
    filter: &CorpusFilter,
    count: usize,
    master_seed: u64,
) -> CorpusSample {
    let mut surfaces = Vec::new();
    let mut attempts = 0u64;
    let chunk = 64u64;
    while attempts < filter.max_attempts && surfaces.len() < count {
        let hi = (attempts + chunk).min(filter.max_attempts);
        let batch: Vec<(u64, Option<SurfaceModel>)> = (attempts..hi)
            .into_par_iter()
            .map(|idx| (idx, try_accept(f, filter, master_seed, idx)))
            .collect();
        attempts = hi;
        for (idx, model) in batch {
            if let Some(model) = model {
                if surfaces.len() < count {
                    surfaces.push((idx, model));
                }
            }
        }
    }
    let exhausted = surfaces.len() < count;
    CorpusSample { surfaces, attempts, exhausted }
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
    Info,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LineCensusRecord {
    pub line: usize,
    pub type_counts: [u64; 7],
    pub n_nonparabolic: u64,
    pub parabolic: u64,
    pub eckardt: u64,
    pub separable: bool,
    pub violations: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CountingRecord {
    pub line: usize,
    /// "ok", "inseparable", "no-external-plane", or "precondition:…".
    pub outcome: String,
    pub t_size: u64,
    pub n_nonparabolic: u64,
    pub lower_bound: Option<u64>,
    pub meets_lower_bound: bool,
    pub external_floor: bool,
    pub complement_within_bound: bool,
    pub threshold_passed: bool,
    pub closure_complete: Option<bool>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerificationReport {
    pub field: FieldDesc,
    pub coeffs: Vec<Vec<u32>>,
    pub points: u64,
    pub m: i64,
    pub klines: u64,
    pub skew_pair: bool,
    pub line_census: Vec<LineCensusRecord>,
    /// Counts by class: conjugate-line triple, split node, cusp, non-split
    /// node.
    pub off_line_classes: [u64; 4],
    pub generator_found: bool,
    /// Present only when the exhaustive search ran.
    pub generator_count: Option<u64>,
    pub counting: Vec<CountingRecord>,
    pub checks: Vec<CheckRecord>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn passed(&self) -> bool {
        self.failed_checks().next().is_none()
    }
}

/// Run the full check battery on one surface.  `exhaustive_generators`
/// counts every generator point instead of stopping at the first.
pub fn verify_surface(model: &SurfaceModel, exhaustive_generators: bool) -> VerificationReport {
    let start = std::time::Instant::now();
    let f = model.field();
    let q = f.order() as u64;
    let hypothesis = in_hypothesis(q);
    let mut checks = Vec::new();

    // Pencil censuses.
    let mut line_census = Vec::new();
    let mut census_violations = 0usize;
    for li in 0..model.klines().len() {
        let census = model.pencil_census(li);
        census_violations += census.violations.len();
        line_census.push(LineCensusRecord {
            line: li,
            type_counts: census.type_counts,
            n_nonparabolic: census.n_nonparabolic,
            parabolic: census.parabolic_count,
            eckardt: census.eckardt_count,
            separable: census.separable,
            violations: census.violations,
        });
    }
    checks.push(if model.klines().is_empty() {
        CheckRecord {
            name: "pencil-census".into(),
            status: CheckStatus::Skip,
            detail: "no rational lines".into(),
        }
    } else if census_violations == 0 {
        CheckRecord {
            name: "pencil-census".into(),
            status: CheckStatus::Pass,
            detail: format!("{} lines clean", model.klines().len()),
        }
    } else {
        CheckRecord {
            name: "pencil-census".into(),
            status: CheckStatus::Fail,
            detail: format!("{census_violations} violations; see line_census"),
        }
    });

    // Structural invariants.
    let mut structural = model.validate();
    structural.extend(model.no_skew_conic_check());
    checks.push(if structural.is_empty() {
        CheckRecord {
            name: "surface-invariants".into(),
            status: CheckStatus::Pass,
            detail: String::new(),
        }
    } else {
        CheckRecord {
            name: "surface-invariants".into(),
            status: CheckStatus::Fail,
            detail: structural.join("; "),
        }
    });

    // Off-line tangent sections.
    let mut off_line_classes = [0u64; 4];
    let mut off_line_errors = Vec::new();
    for id in 0..model.points().len() {
        if !model.lines_through(id).is_empty() {
            continue;
        }
        match model.classify_off_line(id) {
            Ok(OffLineClass::EckardtConjugateTriple) => off_line_classes[0] += 1,
            Ok(OffLineClass::SplitNode) => off_line_classes[1] += 1,
            Ok(OffLineClass::Cusp) => off_line_classes[2] += 1,
            Ok(OffLineClass::NonSplitNode) => off_line_classes[3] += 1,
            Err(e) => off_line_errors.push(format!("point {id}: {e}")),
        }
    }
    checks.push(if off_line_errors.is_empty() {
        CheckRecord {
            name: "off-line-classification".into(),
            status: CheckStatus::Pass,
            detail: format!("{} points classified", off_line_classes.iter().sum::<u64>()),
        }
    } else {
        CheckRecord {
            name: "off-line-classification".into(),
            status: CheckStatus::Fail,
            detail: off_line_errors.join("; "),
        }
    });

    // Counting argument per line.
    let mut counting = Vec::new();
    let mut counting_failures = Vec::new();
    for li in 0..model.klines().len() {
        let mut rec = CountingRecord {
            line: li,
            outcome: "ok".into(),
            t_size: 0,
            n_nonparabolic: 0,
            lower_bound: None,
            meets_lower_bound: false,
            external_floor: false,
            complement_within_bound: false,
            threshold_passed: false,
            closure_complete: None,
        };
        match build_generated_set(model, li) {
            Err(SpanError::InseparableLine) => rec.outcome = "inseparable".into(),
            Err(SpanError::NoExternalPlane) => rec.outcome = "no-external-plane".into(),
            Err(e) => rec.outcome = format!("error: {e}"),
            Ok(report) => {
                rec.t_size = report.t_size;
                rec.n_nonparabolic = report.n_nonparabolic;
                rec.lower_bound = report.lower_bound;
                rec.meets_lower_bound = report.meets_lower_bound;
                rec.external_floor = report.external_plane_floor;
                rec.complement_within_bound = report.complement_within_bound;
                match pigeonhole_check(model, &report.t) {
                    Err(SpanError::Precondition(p)) => {
                        rec.outcome = format!("precondition: {p}");
                    }
                    Err(e) => rec.outcome = format!("error: {e}"),
                    Ok(pigeon) => {
                        rec.threshold_passed = pigeon.passed;
                        rec.closure_complete = pigeon.closure_equals_sk;
                        if hypothesis {
                            if !report.meets_lower_bound
                                || !report.external_plane_floor
                                || !report.complement_within_bound
                            {
                                counting_failures
                                    .push(format!("line {li}: size bound violated"));
                            }
                            if !pigeon.passed {
                                counting_failures
                                    .push(format!("line {li}: threshold not met"));
                            } else if pigeon.closure_equals_sk != Some(true) {
                                counting_failures
                                    .push(format!("line {li}: closure fell short"));
                            }
                        }
                    }
                }
            }
        }
        counting.push(rec);
    }
    let applicable = counting.iter().filter(|r| r.outcome == "ok").count();
    checks.push(if model.klines().is_empty() {
        CheckRecord {
            name: "counting-argument".into(),
            status: CheckStatus::Skip,
            detail: "no rational lines".into(),
        }
    } else if !counting_failures.is_empty() {
        CheckRecord {
            name: "counting-argument".into(),
            status: CheckStatus::Fail,
            detail: counting_failures.join("; "),
        }
    } else if applicable == 0 {
        CheckRecord {
            name: "counting-argument".into(),
            status: CheckStatus::Info,
            detail: "no line admits the construction (inseparable, skew, or no external plane)"
                .into(),
        }
    } else if hypothesis {
        CheckRecord {
            name: "counting-argument".into(),
            status: CheckStatus::Pass,
            detail: format!("{applicable} lines closed"),
        }
    } else {
        CheckRecord {
            name: "counting-argument".into(),
            status: CheckStatus::Info,
            detail: format!("{applicable} lines evaluated (field outside the theorem)"),
        }
    });

    // Single generators.
    let generators = single_generators(model, !exhaustive_generators);
    let generator_found = !generators.is_empty();
    let generator_count = exhaustive_generators.then_some(generators.len() as u64);
    checks.push(if model.klines().is_empty() {
        CheckRecord {
            name: "single-generator".into(),
            status: CheckStatus::Skip,
            detail: "no rational lines (theorem hypothesis unmet)".into(),
        }
    } else if hypothesis {
        if generator_found {
            CheckRecord {
                name: "single-generator".into(),
                status: CheckStatus::Pass,
                detail: match generator_count {
                    Some(n) => format!("{n} generator points"),
                    None => format!("first generator: point {}", generators[0]),
                },
            }
        } else {
            CheckRecord {
                name: "single-generator".into(),
                status: CheckStatus::Fail,
                detail: "no point generates the full surface".into(),
            }
        }
    } else {
        CheckRecord {
            name: "single-generator".into(),
            status: CheckStatus::Info,
            detail: format!(
                "generator {}found (field outside the theorem)",
                if generator_found { "" } else { "not " }
            ),
        }
    });

    // Skew-pair route: every non-Eckardt rational point of a line that
    // belongs to some skew pair generates everything (needs #K ≥ 4).
    let skew_pair = model.has_skew_pair();
    checks.push(if !skew_pair {
        CheckRecord {
            name: "skew-generators".into(),
            status: CheckStatus::Skip,
            detail: "no skew pair".into(),
        }
    } else if q < 4 {
        CheckRecord {
            name: "skew-generators".into(),
            status: CheckStatus::Skip,
            detail: "field too small for the skew-pair theorem".into(),
        }
    } else {
        let mut in_pair = vec![false; model.klines().len()];
        for i in 0..model.klines().len() {
            for j in i + 1..model.klines().len() {
                if crate::projgeom::skew(f, &model.klines()[i], &model.klines()[j]) {
                    in_pair[i] = true;
                    in_pair[j] = true;
                }
            }
        }
        let mut tested = 0;
        let mut failures = Vec::new();
        for (li, _) in in_pair.iter().enumerate().filter(|(_, &x)| x) {
            let eckardt = &model.pencil(li).eckardt;
            for &p in model.line_point_ids(li) {
                if eckardt.contains(&p) {
                    continue;
                }
                tested += 1;
                if !span_closure(model, &[p]).complete() {
                    failures.push(format!("line {li} point {p}"));
                }
            }
        }
        if failures.is_empty() {
            CheckRecord {
                name: "skew-generators".into(),
                status: CheckStatus::Pass,
                detail: format!("{tested} points generate"),
            }
        } else {
            CheckRecord {
                name: "skew-generators".into(),
                status: CheckStatus::Fail,
                detail: failures.join("; "),
            }
        }
    });

    // Inseparable-line route (characteristic 2, ≥ 8 elements).
    let insep_lines: Vec<usize> = (0..model.klines().len())
        .filter(|&li| !model.pencil(li).separable)
        .collect();
    checks.push(if insep_lines.is_empty() {
        CheckRecord {
            name: "inseparable-generators".into(),
            status: CheckStatus::Skip,
            detail: "no inseparable line".into(),
        }
    } else if q < 8 {
        CheckRecord {
            name: "inseparable-generators".into(),
            status: CheckStatus::Info,
            detail: format!(
                "{} inseparable lines (field below the lemma's size)",
                insep_lines.len()
            ),
        }
    } else {
        let mut tested = 0;
        let mut failures = Vec::new();
        for &li in &insep_lines {
            let eckardt = &model.pencil(li).eckardt;
            for &p in model.line_point_ids(li) {
                if eckardt.contains(&p) {
                    continue;
                }
                tested += 1;
                if !span_closure(model, &[p]).complete() {
                    failures.push(format!("line {li} point {p}"));
                }
            }
        }
        if failures.is_empty() {
            CheckRecord {
                name: "inseparable-generators".into(),
                status: CheckStatus::Pass,
                detail: format!("{tested} points generate"),
            }
        } else {
            CheckRecord {
                name: "inseparable-generators".into(),
                status: CheckStatus::Fail,
                detail: failures.join("; "),
            }
        }
    });

    VerificationReport {
        field: FieldDesc::of_field(f),
        coeffs: model.form().coeffs().iter().map(|&c| f.to_coeffs(c)).collect(),
        points: model.points().len() as u64,
        m: model.m_value(),
        klines: model.klines().len() as u64,
        skew_pair,
        line_census,
        off_line_classes,
        generator_found,
        generator_count,
        counting,
        checks,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Verify many surfaces in parallel; report order matches input order.
pub fn verify_corpus(models: &[SurfaceModel], exhaustive_generators: bool) -> Vec<VerificationReport> {
    models
        .par_iter()
        .map(|m| verify_surface(m, exhaustive_generators))
        .collect()
}

#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct CensusSummary {
    pub surfaces: u64,
    pub lines: u64,
    pub separable_lines: u64,
    pub total_type_counts: [u64; 7],
    /// (n, how many separable lines had it), ascending.
    pub n_histogram: Vec<(u64, u64)>,
    /// (m, surface count), ascending.
    pub m_histogram: Vec<(i64, u64)>,
    pub off_line_classes: [u64; 4],
    pub surfaces_with_generator: u64,
    pub check_failures: u64,
}

/// Deterministic fold of reports into one summary record.
pub fn census(reports: &[VerificationReport]) -> CensusSummary {
    let mut s = CensusSummary { surfaces: reports.len() as u64, ..Default::default() };
    let mut n_hist = std::collections::BTreeMap::new();
    let mut m_hist = std::collections::BTreeMap::new();
    for r in reports {
        *m_hist.entry(r.m).or_insert(0u64) += 1;
        s.lines += r.klines;
        if r.generator_found {
            s.surfaces_with_generator += 1;
        }
        s.check_failures += r.failed_checks().count() as u64;
        for lc in &r.line_census {
            for (slot, c) in s.total_type_counts.iter_mut().zip(lc.type_counts) {
                *slot += c;
            }
            if lc.separable {
                s.separable_lines += 1;
                *n_hist.entry(lc.n_nonparabolic).or_insert(0u64) += 1;
            }
        }
        for (slot, c) in s.off_line_classes.iter_mut().zip(r.off_line_classes) {
            *slot += c;
        }
    }
    s.n_histogram = n_hist.into_iter().collect();
    s.m_histogram = m_hist.into_iter().collect();
    s
}
