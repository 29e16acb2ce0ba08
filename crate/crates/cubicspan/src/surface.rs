//! Surface model: rational points, rational lines, tangent-plane pencils and
//! their seven-way classification, parabolic and Eckardt structure, and
//! classification of singular tangent sections at points off all rational
//! lines.
//!
//! Everything observable is computed from K-rational data only (point counts,
//! rational root patterns, tangency); no extension-field line construction
//! happens here.  Cross-checks (restriction identities, tangent cones) guard
//! the count-based classification.

use crate::forms::{self, CubicForm, QuadForm, TernaryConic};
use crate::gf::{Field, FieldElement};
use crate::projgeom::{
    self, line_through, plane_basis, plane_coords, point_on_plane, points_on_line, ProjLine,
    ProjPlane, ProjPoint,
};
use crate::smoothcheck;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("surface is not smooth")]
    NotSmooth,
    #[error("internal contract violated: {0}")]
    ContractViolation(String),
    #[error("point lies on a rational line of the surface")]
    PointOnLine,
    #[error("point is not on the surface")]
    NotOnSurface,
}

/// How a plane through a rational line of the surface meets it.  The section
/// is always the line plus a residual conic; the type records the conic's
/// splitting behavior and how it touches the line.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SectionType {
    /// Irreducible conic crossing the line in two rational points.
    SecantConic,
    /// Two rational lines meeting the base line in two distinct points.
    SplitPair,
    /// Irreducible conic meeting the line only over the quadratic extension.
    ExternalConic,
    /// Two conjugate lines; their common point is rational but off the line.
    ConjugatePair,
    /// Irreducible conic tangent to the line (parabolic, non-Eckardt).
    TangentConic,
    /// Two rational lines concurrent with the base line (rational Eckardt).
    SplitEckardt,
    /// Two conjugate lines concurrent with the base line (Eckardt with no
    /// new rational points).
    ConjugateEckardt,
}

impl SectionType {
    /// Number of rational points of the whole section (line ∪ conic).
    pub fn expected_gamma_count(&self, q: u64) -> u64 {
        match self {
            SectionType::SecantConic => 2 * q,
            SectionType::SplitPair => 3 * q,
            SectionType::ExternalConic => 2 * q + 2,
            SectionType::ConjugatePair => q + 2,
            SectionType::TangentConic => 2 * q + 1,
            // Three concurrent rational lines share exactly one point:
            // 3(q+1) − 3 + 1.
            SectionType::SplitEckardt => 3 * q + 1,
            SectionType::ConjugateEckardt => q + 1,
        }
    }

    /// Tangent-plane types: the conic meets the line in a single rational
    /// point, which is parabolic.
    pub fn is_tangent_kind(&self) -> bool {
        matches!(
            self,
            SectionType::TangentConic | SectionType::SplitEckardt | SectionType::ConjugateEckardt
        )
    }

    pub fn is_eckardt_kind(&self) -> bool {
        matches!(self, SectionType::SplitEckardt | SectionType::ConjugateEckardt)
    }

    pub fn census_slot(&self) -> usize {
        match self {
            SectionType::SecantConic => 0,
            SectionType::SplitPair => 1,
            SectionType::ExternalConic => 2,
            SectionType::ConjugatePair => 3,
            SectionType::TangentConic => 4,
            SectionType::SplitEckardt => 5,
            SectionType::ConjugateEckardt => 6,
        }
    }
}

pub const SECTION_TYPES: [SectionType; 7] = [
    SectionType::SecantConic,
    SectionType::SplitPair,
    SectionType::ExternalConic,
    SectionType::ConjugatePair,
    SectionType::TangentConic,
    SectionType::SplitEckardt,
    SectionType::ConjugateEckardt,
];

/// Classification of the tangent section Γ_Q at a rational point lying on no
/// rational line: Γ_Q is then an irreducible singular cubic, or three
/// conjugate lines over the cubic extension.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OffLineClass {
    /// Three conjugate lines through Q; Q is the only rational point.
    EckardtConjugateTriple,
    /// Node at Q with rational tangent directions: q rational points.
    SplitNode,
    /// Cusp at Q: q+1 rational points.
    Cusp,
    /// Node at Q with conjugate tangent directions: q+2 rational points.
    NonSplitNode,
}

/// One classified plane of a line's pencil.
#[derive(Clone, Debug)]
pub struct PlaneRecord {
    pub plane: ProjPlane,
    pub section_type: SectionType,
    /// Ids of all surface points on the plane (the section's rational points).
    pub gamma_points: Vec<usize>,
    /// For tangent-kind planes: the id of the parabolic point of contact.
    pub contact_point: Option<usize>,
}

/// Classification of the full pencil of planes through one rational line.
#[derive(Clone, Debug)]
pub struct LinePencil {
    pub planes: Vec<PlaneRecord>,
    /// Point ids on the line whose tangent plane is of tangent kind.
    pub parabolic: Vec<usize>,
    /// Point ids on the line whose tangent plane is of Eckardt kind.
    pub eckardt: Vec<usize>,
    /// Gauss-map separability: always true in odd characteristic; false in
    /// characteristic 2 exactly when two or more rational points are
    /// parabolic.
    pub separable: bool,
}

#[derive(Clone, Debug, Default)]
pub struct PencilCensus {
    pub type_counts: [u64; 7],
    pub parabolic_count: u64,
    pub eckardt_count: u64,
    pub n_nonparabolic: u64,
    pub separable: bool,
    pub violations: Vec<String>,
}

/// Immutable model of one smooth cubic surface: every cache is filled at
/// construction so readers need no synchronization.
pub struct SurfaceModel {
    field: Field,
    form: CubicForm,
    parts: [QuadForm; 4],
    points: Vec<ProjPoint>,
    point_ids: HashMap<ProjPoint, usize>,
    gradients: Vec<[FieldElement; 4]>,
    tangent_planes: Vec<ProjPlane>,
    klines: Vec<ProjLine>,
    kline_points: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
    pencils: Vec<LinePencil>,
    m_value: i64,
    warnings: Vec<String>,
}

impl SurfaceModel {
    pub fn build(field: &Field, form: CubicForm) -> Result<SurfaceModel, SurfaceError> {
        if !smoothcheck::is_smooth(field, &form) {
            return Err(SurfaceError::NotSmooth);
        }
        let mut warnings = Vec::new();
        let q = field.order() as u64;
        if q < 8 {
            warnings.push(format!(
                "field of size {q} is below the intended range; generation claims need q = 8 or q >= 16"
            ));
        }
        let parts = forms::partials(field, &form);

        let mut points = Vec::new();
        for p in projgeom::enumerate_points_p3(field) {
            if forms::evaluate(field, &form, p.coords()).is_zero() {
                points.push(p);
            }
        }
        let point_ids: HashMap<ProjPoint, usize> =
            points.iter().enumerate().map(|(i, p)| (*p, i)).collect();

        let count = points.len() as i64;
        let qi = q as i64;
        let residue = count - qi * qi - 1;
        if residue % qi != 0 || !(-2..=7).contains(&(residue / qi)) {
            return Err(SurfaceError::ContractViolation(format!(
                "point count {count} does not fit q^2 + m*q + 1 with m in [-2, 7]"
            )));
        }
        let m_value = residue / qi;

        let mut gradients = Vec::with_capacity(points.len());
        let mut tangent_planes = Vec::with_capacity(points.len());
        for p in &points {
            let g = forms::gradient_at(field, &parts, p.coords());
            let plane = projgeom::normalize_plane(field, g).map_err(|_| {
                SurfaceError::ContractViolation(
                    "vanishing gradient on a surface that passed the smoothness check".into(),
                )
            })?;
            gradients.push(g);
            tangent_planes.push(plane);
        }

        // Rational lines: a line joining two surface points lies in the
        // surface iff both mixed polarization coefficients vanish, because
        // F(sP+tQ) = (Q·∇F(P))s²t + (P·∇F(Q))st² when F(P) = F(Q) = 0.
        let dot = |a: &[FieldElement; 4], b: &[FieldElement; 4]| {
            let mut acc = field.zero();
            for i in 0..4 {
                acc = field.add(acc, field.mul(a[i], b[i]));
            }
            acc
        };
        let mut kline_set = std::collections::HashSet::new();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if dot(points[j].coords(), &gradients[i]).is_zero()
                    && dot(points[i].coords(), &gradients[j]).is_zero()
                {
                    let line = line_through(field, &points[i], &points[j])
                        .expect("distinct points");
                    kline_set.insert(line);
                }
            }
        }
        let mut klines: Vec<ProjLine> = kline_set.into_iter().collect();
        klines.sort();
        if klines.len() > 27 {
            return Err(SurfaceError::ContractViolation(format!(
                "{} rational lines on a smooth cubic surface",
                klines.len()
            )));
        }

        let mut kline_points = Vec::with_capacity(klines.len());
        let mut point_lines = vec![Vec::new(); points.len()];
        for (li, line) in klines.iter().enumerate() {
            let mut ids = Vec::new();
            for p in points_on_line(field, line) {
                let id = *point_ids.get(&p).ok_or_else(|| {
                    SurfaceError::ContractViolation(
                        "line point missing from the surface point list".into(),
                    )
                })?;
                point_lines[id].push(li);
                ids.push(id);
            }
            kline_points.push(ids);
        }

        let mut model = SurfaceModel {
            field: field.clone(),
            form,
            parts,
            points,
            point_ids,
            gradients,
            tangent_planes,
            klines,
            kline_points,
            point_lines,
            pencils: Vec::new(),
            m_value,
            warnings,
        };
        for li in 0..model.klines.len() {
            let pencil = model.classify_pencil(li)?;
            model.pencils.push(pencil);
        }
        Ok(model)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn form(&self) -> &CubicForm {
        &self.form
    }

    pub fn partials(&self) -> &[QuadForm; 4] {
        &self.parts
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn point_id(&self, p: &ProjPoint) -> Option<usize> {
        self.point_ids.get(p).copied()
    }

    pub fn gradient(&self, id: usize) -> &[FieldElement; 4] {
        &self.gradients[id]
    }

    pub fn tangent_plane_of(&self, id: usize) -> &ProjPlane {
        &self.tangent_planes[id]
    }

    pub fn klines(&self) -> &[ProjLine] {
        &self.klines
    }

    /// Ids of the q+1 points on rational line `li`, in parameter order.
    pub fn line_point_ids(&self, li: usize) -> &[usize] {
        &self.kline_points[li]
    }

    /// Indices of the rational lines through point `id` (empty for most).
    pub fn lines_through(&self, id: usize) -> &[usize] {
        &self.point_lines[id]
    }

    pub fn pencil(&self, li: usize) -> &LinePencil {
        &self.pencils[li]
    }

    pub fn pencils(&self) -> &[LinePencil] {
        &self.pencils
    }

    pub fn m_value(&self) -> i64 {
        self.m_value
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn has_skew_pair(&self) -> bool {
        for i in 0..self.klines.len() {
            for j in i + 1..self.klines.len() {
                if projgeom::skew(&self.field, &self.klines[i], &self.klines[j]) {
                    return true;
                }
            }
        }
        false
    }

    /// All surface point ids incident with a plane.
    pub fn plane_section_ids(&self, plane: &ProjPlane) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&i| point_on_plane(&self.field, &self.points[i], plane))
            .collect()
    }

    fn classify_pencil(&self, li: usize) -> Result<LinePencil, SurfaceError> {
        let f = &self.field;
        let line = &self.klines[li];
        let line_ids = &self.kline_points[li];
        let planes = projgeom::planes_through_line(f, line);
        let mut records = Vec::with_capacity(planes.len());
        for plane in &planes {
            let basis = plane_basis(f, plane);
            let (section_type, contact) =
                classify_section(f, &self.form, line, &basis, plane)?;
            let contact_point = match contact {
                Some(p) => Some(self.point_ids.get(&p).copied().ok_or_else(|| {
                    SurfaceError::ContractViolation(
                        "contact point missing from the surface".into(),
                    )
                })?),
                None => None,
            };
            let gamma_points = self.plane_section_ids(plane);
            records.push(PlaneRecord {
                plane: *plane,
                section_type,
                gamma_points,
                contact_point,
            });
        }

        // A point of the line is parabolic exactly when its tangent plane is
        // one of the tangent-kind planes of the pencil.
        let mut parabolic = Vec::new();
        let mut eckardt = Vec::new();
        for &pid in line_ids {
            let tp = &self.tangent_planes[pid];
            let rec = records
                .iter()
                .find(|r| r.plane == *tp)
                .ok_or_else(|| {
                    SurfaceError::ContractViolation(
                        "tangent plane of a line point is outside the pencil".into(),
                    )
                })?;
            if rec.section_type.is_tangent_kind() {
                parabolic.push(pid);
                if rec.section_type.is_eckardt_kind() {
                    eckardt.push(pid);
                }
                if rec.contact_point != Some(pid) {
                    return Err(SurfaceError::ContractViolation(
                        "tangent-kind plane disagrees about its contact point".into(),
                    ));
                }
            }
        }
        let separable = if f.characteristic() != 2 {
            true
        } else {
            parabolic.len() < 2
        };
        Ok(LinePencil { planes: records, parabolic, eckardt, separable })
    }

    /// Census identities for one line's pencil.  Violations are collected,
    /// not panicked, so the harness can report them with a witness.
    pub fn pencil_census(&self, li: usize) -> PencilCensus {
        let q = self.field.order() as u64;
        let pencil = &self.pencils[li];
        let mut census = PencilCensus {
            separable: pencil.separable,
            parabolic_count: pencil.parabolic.len() as u64,
            eckardt_count: pencil.eckardt.len() as u64,
            ..Default::default()
        };
        for rec in &pencil.planes {
            census.type_counts[rec.section_type.census_slot()] += 1;
        }
        census.n_nonparabolic = q + 1 - census.parabolic_count;
        let t = &census.type_counts;
        let total: u64 = t.iter().sum();
        let v = &mut census.violations;
        if total != q + 1 {
            v.push(format!("pencil has {total} planes instead of q+1"));
        }
        // Expected section sizes per type.
        for rec in &pencil.planes {
            let want = rec.section_type.expected_gamma_count(q);
            let got = rec.gamma_points.len() as u64;
            if want != got {
                v.push(format!(
                    "{:?} section has {got} rational points, expected {want}",
                    rec.section_type
                ));
            }
        }
        // Parabolic and Eckardt count laws.
        if self.field.characteristic() == 2 {
            if pencil.separable {
                if census.parabolic_count != 1 {
                    v.push(format!(
                        "separable even-characteristic line with {} parabolic points",
                        census.parabolic_count
                    ));
                }
                if census.eckardt_count > 1 {
                    v.push("separable even-characteristic line with more than one Eckardt point"
                        .into());
                }
            } else if census.parabolic_count != q + 1 {
                // All five tritangent planes through the line exist over the
                // closure, but only the rational ones contribute Eckardt
                // points here, so no lower bound on eckardt_count applies.
                v.push("inseparable line where not every rational point is parabolic".into());
            }
        } else {
            if census.parabolic_count != 0 && census.parabolic_count != 2 {
                v.push(format!(
                    "odd-characteristic line with {} parabolic points",
                    census.parabolic_count
                ));
            }
            if census.eckardt_count > 2 {
                v.push("odd-characteristic line with more than two Eckardt points".into());
            }
        }
        if census.eckardt_count > 5 {
            v.push("line with more than five Eckardt points".into());
        }
        let tangent_planes = t[4] + t[5] + t[6];
        if tangent_planes != census.parabolic_count {
            v.push(format!(
                "{} tangent-kind planes but {} parabolic points",
                tangent_planes, census.parabolic_count
            ));
        }
        if pencil.separable {
            let n = census.n_nonparabolic;
            if n % 2 != 0 {
                v.push(format!("odd number {n} of non-parabolic points"));
            }
            if t[0] + t[1] != n / 2 {
                v.push(format!(
                    "secant-fiber planes {} != n/2 = {}",
                    t[0] + t[1],
                    n / 2
                ));
            }
            if t[2] + t[3] != n / 2 {
                v.push(format!(
                    "conjugate-fiber planes {} != n/2 = {}",
                    t[2] + t[3],
                    n / 2
                ));
            }
            if self.field.characteristic() == 2 {
                if n != q {
                    v.push(format!("even characteristic expects n = q, got {n}"));
                }
            } else if n + 1 != q && n != q + 1 {
                v.push(format!("odd characteristic expects n = q±1, got {n}"));
            }
            if q >= 13 && t[2] == 0 {
                v.push("no external-conic plane although q >= 13".into());
            }
        } else {
            let tangent_total = t[4] + t[5] + t[6];
            if tangent_total != q + 1 {
                v.push("inseparable line whose planes are not all of tangent kind".into());
            }
        }
        if t[3] > 5 {
            v.push(format!("{} conjugate-pair planes exceed the limit of 5", t[3]));
        }
        // Pencil planes partition the surface outside the line.
        let line_count = self.kline_points[li].len() as u64;
        let off_line: u64 = pencil
            .planes
            .iter()
            .map(|r| r.gamma_points.len() as u64 - line_count)
            .sum();
        if off_line != self.points.len() as u64 - line_count {
            v.push("pencil sections fail to partition the surface off the line".into());
        }
        census
    }

    /// Classify Γ_Q for a surface point on no rational line, by rational
    /// point count, cross-checked against the tangent cone at Q.
    pub fn classify_off_line(&self, id: usize) -> Result<OffLineClass, SurfaceError> {
        let f = &self.field;
        if id >= self.points.len() {
            return Err(SurfaceError::NotOnSurface);
        }
        if !self.point_lines[id].is_empty() {
            return Err(SurfaceError::PointOnLine);
        }
        let q = f.order() as u64;
        let plane = &self.tangent_planes[id];
        let count = self.plane_section_ids(plane).len() as u64;
        let by_count = if count == 1 {
            OffLineClass::EckardtConjugateTriple
        } else if count == q {
            OffLineClass::SplitNode
        } else if count == q + 1 {
            OffLineClass::Cusp
        } else if count == q + 2 {
            OffLineClass::NonSplitNode
        } else {
            return Err(SurfaceError::ContractViolation(format!(
                "tangent section at an off-line point has {count} rational points"
            )));
        };

        // Tangent cone route: write the section in a basis starting at Q.
        // With Q at (1:0:0), the x³ and x²-linear coefficients must vanish
        // (Q is a double point), and the quadratic part is the tangent cone.
        let p = &self.points[id];
        let basis3 = plane_basis(f, plane);
        let pc = plane_coords(f, &basis3, p)
            .map_err(|_| SurfaceError::ContractViolation("point off its tangent plane".into()))?;
        let m = pc.coords().iter().position(|c| !c.is_zero()).unwrap();
        let (i, j) = match m {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let shifted = [*p.coords(), basis3[i], basis3[j]];
        let local = forms::restrict_to_plane_with_basis(f, &self.form, &shifted);
        if !local.0[0].is_zero() || !local.0[1].is_zero() || !local.0[2].is_zero() {
            return Err(SurfaceError::ContractViolation(
                "tangent section is not singular at the point of tangency".into(),
            ));
        }
        let cone = forms::BinaryQuadratic([local.0[3], local.0[4], local.0[5]]);
        let by_cone = if cone.is_zero() {
            OffLineClass::EckardtConjugateTriple
        } else {
            let roots = forms::roots_binary_quadratic(f, &cone).expect("nonzero");
            match roots.len() {
                0 => OffLineClass::NonSplitNode,
                2 if roots[0] == roots[1] => OffLineClass::Cusp,
                2 => OffLineClass::SplitNode,
                _ => unreachable!(),
            }
        };
        if by_cone != by_count {
            return Err(SurfaceError::ContractViolation(format!(
                "count-based class {by_count:?} disagrees with tangent cone {by_cone:?}"
            )));
        }
        Ok(by_count)
    }

    /// Structural invariants; returns human-readable failures (empty = good).
    pub fn validate(&self) -> Vec<String> {
        let f = &self.field;
        let mut bad = Vec::new();
        for p in &self.points {
            if !forms::evaluate(f, &self.form, p.coords()).is_zero() {
                bad.push(format!("cached point {:?} is off the surface", p));
            }
        }
        for line in &self.klines {
            if !forms::restrict_to_line(f, &self.form, line).is_zero() {
                bad.push(format!("cached line {:?} is not contained in the surface", line));
            }
        }
        // Every rational line through P lies in the tangent plane at P.
        for (id, p) in self.points.iter().enumerate() {
            for &li in &self.point_lines[id] {
                if !projgeom::line_in_plane(f, &self.klines[li], &self.tangent_planes[id]) {
                    bad.push(format!(
                        "line {li} through point {id} is not inside the tangent plane at {:?}",
                        p
                    ));
                }
            }
        }
        bad
    }

    /// When the surface has no skew pair of rational lines, the rational
    /// points of residual conics in secant/external/tangent planes, off the
    /// base line, must avoid every rational line of the surface.  Returns
    /// violations (empty when the property holds or a skew pair exists).
    pub fn no_skew_conic_check(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.has_skew_pair() {
            return bad;
        }
        for li in 0..self.klines.len() {
            let on_line: std::collections::HashSet<usize> =
                self.kline_points[li].iter().copied().collect();
            for rec in &self.pencils[li].planes {
                if !matches!(
                    rec.section_type,
                    SectionType::SecantConic
                        | SectionType::ExternalConic
                        | SectionType::TangentConic
                ) {
                    continue;
                }
                for &pid in &rec.gamma_points {
                    if !on_line.contains(&pid) && !self.point_lines[pid].is_empty() {
                        bad.push(format!(
                            "conic point {pid} of a {:?} plane lies on a rational line",
                            rec.section_type
                        ));
                    }
                }
            }
        }
        bad
    }

    /// Exhaustive rational-line search through all lines of P³ — a slow
    /// oracle for the pair-scan route, intended for q ≤ 7.
    pub fn fullscan_klines(&self) -> Vec<ProjLine> {
        let f = &self.field;
        let all: Vec<ProjPoint> = projgeom::enumerate_points_p3(f).collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let line = line_through(f, &all[i], &all[j]).expect("distinct");
                if seen.insert(line) && forms::restrict_to_line(f, &self.form, &line).is_zero() {
                    out.push(line);
                }
            }
        }
        out.sort();
        out
    }
}

fn collinear_p2(f: &Field, a: &[FieldElement; 3], b: &[FieldElement; 3], c: &[FieldElement; 3]) -> bool {
    // 3×3 determinant.
    let m = |x: FieldElement, y: FieldElement| f.mul(x, y);
    let term1 = m(a[0], f.sub(m(b[1], c[2]), m(b[2], c[1])));
    let term2 = m(a[1], f.sub(m(b[0], c[2]), m(b[2], c[0])));
    let term3 = m(a[2], f.sub(m(b[0], c[1]), m(b[1], c[0])));
    f.add(f.sub(term1, term2), term3).is_zero()
}

/// Classify one plane section through a rational line of the surface.
/// `basis` may be any three independent points of the plane, and the verdict
/// does not depend on that choice.  Returns the type and, for tangent-kind
/// planes, the rational point of contact on the line.
pub fn classify_section(
    f: &Field,
    form: &CubicForm,
    line: &ProjLine,
    basis: &[[FieldElement; 4]; 3],
    plane: &ProjPlane,
) -> Result<(SectionType, Option<ProjPoint>), SurfaceError> {
    for row in basis {
        let mut acc = f.zero();
        for c in 0..4 {
            acc = f.add(acc, f.mul(row[c], plane.dual()[c]));
        }
        if !acc.is_zero() {
            return Err(SurfaceError::ContractViolation(
                "basis row lies off the plane it is meant to span".into(),
            ));
        }
    }
    let gamma = forms::restrict_to_plane_with_basis(f, form, basis);
    // The line in plane coordinates, via two of its points.
    let lp = points_on_line(f, line);
    let a3 = lp[0];
    let b3 = lp[1];
    let a = plane_coords(f, basis, &a3)
        .map_err(|_| SurfaceError::ContractViolation("line leaves its pencil plane".into()))?;
    let b = plane_coords(f, basis, &b3)
        .map_err(|_| SurfaceError::ContractViolation("line leaves its pencil plane".into()))?;
    let lam = forms::ternary_line_through(f, &a, &b)
        .map_err(|_| SurfaceError::ContractViolation("degenerate line image".into()))?;
    let conic = forms::divide_by_linear(f, &gamma, &lam).map_err(|_| {
        SurfaceError::ContractViolation(
            "line is not a component of its own plane section".into(),
        )
    })?;
    if conic.is_zero() {
        return Err(SurfaceError::ContractViolation("zero residual conic".into()));
    }
    classify_residual(f, &conic, &a, &b).map(|(ty, contact)| {
        let contact = contact.map(|param| {
            let [s, t] = *param.coords();
            let mut v = [f.zero(); 4];
            for c in 0..4 {
                v[c] = f.add(f.mul(s, a3.coords()[c]), f.mul(t, b3.coords()[c]));
            }
            projgeom::normalize_point(f, v).expect("contact point is a projective point")
        });
        (ty, contact)
    })
}

/// Classification from the residual conic: the rational point count decides
/// irreducible vs split vs conjugate, and the conic's restriction to the
/// line decides the sub-case.  The contact parameter is in the (a, b) span
/// coordinates of the line.
fn classify_residual(
    f: &Field,
    conic: &TernaryConic,
    a: &projgeom::P2,
    b: &projgeom::P2,
) -> Result<(SectionType, Option<projgeom::P1>), SurfaceError> {
    let q = f.order() as u64;
    let conic_pts: Vec<projgeom::P2> = projgeom::enumerate_points_p2(f)
        .filter(|p| forms::eval_ternary_conic(f, conic, p.coords()).is_zero())
        .collect();
    let count = conic_pts.len() as u64;
    let on_line = forms::restrict_conic_to_span(f, conic, a.coords(), b.coords());
    if on_line.is_zero() {
        return Err(SurfaceError::ContractViolation(
            "residual conic contains the base line (non-reduced section)".into(),
        ));
    }
    let meets = forms::roots_binary_quadratic(f, &on_line).expect("nonzero restriction");
    if count == 2 * q + 1 {
        // Two rational lines.  They meet the base line in the two roots.
        match meets.len() {
            2 if meets[0] == meets[1] => Ok((SectionType::SplitEckardt, Some(meets[0]))),
            2 => Ok((SectionType::SplitPair, None)),
            _ => Err(SurfaceError::ContractViolation(
                "split conic pair missing rational intersections with the line".into(),
            )),
        }
    } else if count == q + 1 {
        // Irreducible conic — or a rational double line, which cannot occur
        // on a smooth surface; three collinear points expose it.
        if collinear_p2(
            f,
            conic_pts[0].coords(),
            conic_pts[1].coords(),
            conic_pts[2].coords(),
        ) {
            return Err(SurfaceError::ContractViolation(
                "residual conic is a double line".into(),
            ));
        }
        match meets.len() {
            0 => Ok((SectionType::ExternalConic, None)),
            2 if meets[0] == meets[1] => Ok((SectionType::TangentConic, Some(meets[0]))),
            2 => Ok((SectionType::SecantConic, None)),
            _ => unreachable!("binary quadratic root multisets have size 0 or 2"),
        }
    } else if count == 1 {
        // Conjugate pair of lines; the lone rational point is their vertex.
        let vertex = &conic_pts[0];
        // Is the vertex on the base line?  Check whether it is in the span
        // of a and b: the restriction roots are exactly the line points of
        // the conic, so equivalently the restriction has a double root at
        // the vertex parameter.
        match meets.len() {
            2 if meets[0] == meets[1] => {
                // Verify the root parameter reproduces the vertex.
                let [s, t] = *meets[0].coords();
                let mut v = [f.zero(); 3];
                for c in 0..3 {
                    v[c] = f.add(f.mul(s, a.coords()[c]), f.mul(t, b.coords()[c]));
                }
                let on = projgeom::normalize_p2(f, v)
                    .map_err(|_| SurfaceError::ContractViolation("degenerate parameter".into()))?;
                if on == *vertex {
                    Ok((SectionType::ConjugateEckardt, Some(meets[0])))
                } else {
                    Err(SurfaceError::ContractViolation(
                        "conjugate pair tangency point is not the vertex".into(),
                    ))
                }
            }
            0 => Ok((SectionType::ConjugatePair, None)),
            2 => Err(SurfaceError::ContractViolation(
                "conjugate line pair meets the base line in two rational points".into(),
            )),
            _ => unreachable!(),
        }
    } else {
        Err(SurfaceError::ContractViolation(format!(
            "residual conic with {count} rational points"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projgeom::normalize_point;
    use crate::testutil::{fermat, form_from_indices, gf, sample_surface};

    #[test]
    fn fermat_gf8_structure_is_frozen() {
        let f = gf(2, 3);
        let model = SurfaceModel::build(&f, fermat(&f)).unwrap();
        // The cube map is a bijection on GF(8), so the surface maps
        // bijectively onto the plane x₀+x₁+x₂+x₃ = 0: 73 points, m = 1.
        assert_eq!(model.points().len(), 73);
        assert_eq!(model.m_value(), 1);
        // Exactly three rational lines, pairwise coplanar through (1:1:1:1).
        assert_eq!(model.klines().len(), 3);
        assert!(!model.has_skew_pair());
        let e = normalize_point(&f, [f.one(), f.one(), f.one(), f.one()]).unwrap();
        let e_id = model.point_id(&e).unwrap();
        assert_eq!(model.lines_through(e_id).len(), 3);
        for li in 0..3 {
            let pencil = model.pencil(li);
            assert!(!pencil.separable, "the Gauss map squares the parameter here");
            assert_eq!(pencil.parabolic.len(), 9, "all q+1 points parabolic");
            // Of the five tritangent planes through the line, two involve
            // cube roots of unity and are only defined over GF(64), leaving
            // three rational Eckardt points.
            assert_eq!(pencil.eckardt.len(), 3);
            assert!(pencil.eckardt.contains(&e_id));
            let census = model.pencil_census(li);
            assert_eq!(census.violations, Vec::<String>::new());
            // 6 tangent-conic, 1 rational-Eckardt, 2 conjugate-Eckardt.
            assert_eq!(census.type_counts, [0, 0, 0, 0, 6, 1, 2]);
        }
        assert_eq!(model.validate(), Vec::<String>::new());
    }

    #[test]
    fn fermat_gf16_has_all_lines_rational() {
        let f = gf(2, 4);
        let model = SurfaceModel::build(&f, fermat(&f)).unwrap();
        // F₄ ⊂ F₁₆ makes all 27 lines rational; the split case has
        // q² + 7q + 1 points.
        assert_eq!(model.klines().len(), 27);
        assert_eq!(model.points().len(), 369);
        assert_eq!(model.m_value(), 7);
        assert!(model.has_skew_pair());
        // The line {x₀+x₁ = 0, x₂+x₃ = 0} exists and is inseparable.
        let a = normalize_point(&f, [f.one(), f.one(), f.zero(), f.zero()]).unwrap();
        let b = normalize_point(&f, [f.zero(), f.zero(), f.one(), f.one()]).unwrap();
        let line = line_through(&f, &a, &b).unwrap();
        let li = model.klines().iter().position(|l| *l == line).unwrap();
        let pencil = model.pencil(li);
        assert!(!pencil.separable);
        assert_eq!(pencil.parabolic.len(), 17);
        assert_eq!(pencil.eckardt.len(), 5);
        let census = model.pencil_census(li);
        assert_eq!(census.violations, Vec::<String>::new());
    }

    #[test]
    fn nonsmooth_is_rejected() {
        let f = gf(5, 1);
        let cone = form_from_indices(&f, &[(0, 1), (10, 1), (16, 1)]);
        assert!(matches!(
            SurfaceModel::build(&f, cone),
            Err(SurfaceError::NotSmooth)
        ));
    }

    #[test]
    fn line_scan_matches_full_scan() {
        for f in [gf(2, 2), gf(5, 1), gf(7, 1)] {
            let model = sample_surface(&f, 1, 0);
            assert_eq!(model.klines().to_vec(), model.fullscan_klines());
        }
    }

    #[test]
    fn census_identities_on_sampled_surfaces() {
        for f in [gf(7, 1), gf(2, 3), gf(3, 2), gf(11, 1)] {
            let mut with_lines = 0;
            let mut seed = 1;
            while with_lines < 3 {
                let model = sample_surface(&f, seed, 1);
                seed += 1000;
                with_lines += 1;
                for li in 0..model.klines().len() {
                    let census = model.pencil_census(li);
                    assert_eq!(
                        census.violations,
                        Vec::<String>::new(),
                        "q = {}, line {li}",
                        f.order()
                    );
                }
                assert_eq!(model.validate(), Vec::<String>::new());
            }
        }
    }

    #[test]
    fn off_line_classification_agrees_both_ways() {
        // classify_off_line internally cross-checks count vs tangent cone;
        // here we also check the distribution is sane and errors fire.
        for f in [gf(7, 1), gf(2, 3), gf(3, 2)] {
            let model = sample_surface(&f, 13, 1);
            let mut seen = 0;
            for id in 0..model.points().len() {
                if !model.lines_through(id).is_empty() {
                    assert!(matches!(
                        model.classify_off_line(id),
                        Err(SurfaceError::PointOnLine)
                    ));
                    continue;
                }
                model.classify_off_line(id).unwrap();
                seen += 1;
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn classification_is_basis_independent() {
        let f = gf(7, 1);
        let model = sample_surface(&f, 5, 1);
        let line = &model.klines()[0];
        let planes = projgeom::planes_through_line(&f, line);
        let mut state = 99u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            f.element(((state >> 33) % f.order() as u64) as u32)
        };
        for plane in &planes {
            let basis = plane_basis(&f, plane);
            let (want, _) =
                classify_section(&f, model.form(), line, &basis, plane).unwrap();
            // Re-classify in several scrambled bases of the same plane.
            let mut tried = 0;
            while tried < 5 {
                let coeffs: Vec<[FieldElement; 3]> =
                    (0..3).map(|_| [next(), next(), next()]).collect();
                let mut alt = [[f.zero(); 4]; 3];
                for r in 0..3 {
                    for c in 0..4 {
                        let mut acc = f.zero();
                        for k in 0..3 {
                            acc = f.add(acc, f.mul(coeffs[r][k], basis[k][c]));
                        }
                        alt[r][c] = acc;
                    }
                }
                if projgeom::rank(&f, &alt) != 3 {
                    continue;
                }
                tried += 1;
                let (got, _) =
                    classify_section(&f, model.form(), line, &alt, plane).unwrap();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn no_skew_pair_conic_points_avoid_lines() {
        // When the surface has no skew pair of rational lines, the residual
        // conics of secant/external/tangent planes carry no rational line
        // points outside the base line.
        for f in [gf(7, 1), gf(2, 3), gf(5, 1)] {
            let mut found = 0;
            let mut seed = 3;
            while found < 2 {
                let model = sample_surface(&f, seed, 1);
                seed += 777;
                if model.has_skew_pair() {
                    continue;
                }
                found += 1;
                assert_eq!(model.no_skew_conic_check(), Vec::<String>::new());
            }
        }
    }

    #[test]
    fn small_field_warns() {
        let f = gf(2, 2);
        let model = sample_surface(&f, 1, 0);
        assert!(!model.warnings().is_empty());
        let f8 = gf(2, 3);
        let model8 = SurfaceModel::build(&f8, fermat(&f8)).unwrap();
        assert!(model8.warnings().is_empty());
    }
}
