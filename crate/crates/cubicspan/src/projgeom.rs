//! Projective geometry over P^3(F_q) (with a little P^2 and P^1 support).
//!
//! Everything is kept in canonical form so that structural equality is
//! projective equality:
//!
//! * points and planes scale their first nonzero coordinate to 1,
//! * lines are stored as the reduced row echelon basis of their 2-dimensional
//!   span, which is unique,
//! * P^1 parameters follow the fixed order [1:0], [1:t] for t in field order,
//!   then [0:1] — this pins down root labels when binary forms get restricted
//!   to lines.

use crate::gf::{Field, FieldElement};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("the two points coincide, they span no line")]
    IdenticalPoints,
    #[error("all coordinates are zero")]
    ZeroCoordinates,
    #[error("point does not lie on the given object")]
    NotIncident,
}

/// Canonical point of P^3: first nonzero coordinate equals 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjPoint([FieldElement; 4]);

impl ProjPoint {
    pub fn coords(&self) -> &[FieldElement; 4] {
        &self.0
    }
}

/// Canonical plane of P^3, stored by its dual vector (first nonzero = 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjPlane([FieldElement; 4]);

impl ProjPlane {
    pub fn dual(&self) -> &[FieldElement; 4] {
        &self.0
    }
}

/// Canonical line of P^3: the unique reduced row echelon basis of its span.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjLine {
    rows: [[FieldElement; 4]; 2],
}

impl ProjLine {
    pub fn rows(&self) -> &[[FieldElement; 4]; 2] {
        &self.rows
    }
}

/// Canonical point of P^1 (used as a line parameter or binary-form root).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct P1(pub(crate) [FieldElement; 2]);

impl P1 {
    pub fn coords(&self) -> &[FieldElement; 2] {
        &self.0
    }
}

/// Canonical point of P^2 (plane-internal coordinates).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct P2(pub(crate) [FieldElement; 3]);

impl P2 {
    pub fn coords(&self) -> &[FieldElement; 3] {
        &self.0
    }
}

fn normalize_vec<const N: usize>(
    f: &Field,
    mut v: [FieldElement; N],
) -> Option<[FieldElement; N]> {
    let lead = v.iter().position(|c| !c.is_zero())?;
    if !v[lead].is_one() {
        let s = f.inv(v[lead]).expect("nonzero leading coordinate");
        for c in v.iter_mut() {
            *c = f.mul(*c, s);
        }
    }
    Some(v)
}

pub fn normalize_point(f: &Field, coords: [FieldElement; 4]) -> Result<ProjPoint, GeomError> {
    normalize_vec(f, coords)
        .map(ProjPoint)
        .ok_or(GeomError::ZeroCoordinates)
}

pub fn normalize_plane(f: &Field, dual: [FieldElement; 4]) -> Result<ProjPlane, GeomError> {
    normalize_vec(f, dual)
        .map(ProjPlane)
        .ok_or(GeomError::ZeroCoordinates)
}

pub fn normalize_p1(f: &Field, coords: [FieldElement; 2]) -> Result<P1, GeomError> {
    normalize_vec(f, coords).map(P1).ok_or(GeomError::ZeroCoordinates)
}

pub fn normalize_p2(f: &Field, coords: [FieldElement; 3]) -> Result<P2, GeomError> {
    normalize_vec(f, coords).map(P2).ok_or(GeomError::ZeroCoordinates)
}

/// In-place reduced row echelon form; returns the rank.  Deterministic:
/// pivots are chosen left to right, first candidate row wins.
pub(crate) fn rref<const N: usize>(f: &Field, rows: &mut Vec<[FieldElement; N]>) -> usize {
    let mut rank = 0;
    for col in 0..N {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
        for c in 0..N {
            rows[rank][c] = f.mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col];
                for c in 0..N {
                    let sub = f.mul(factor, rows[rank][c]);
                    rows[r][c] = f.sub(rows[r][c], sub);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rank
}

pub(crate) fn rank<const N: usize>(f: &Field, rows: &[[FieldElement; N]]) -> usize {
    let mut work = rows.to_vec();
    rref(f, &mut work)
}

/// Canonical basis (reduced row echelon form) of the solution space of
/// `rows * x = 0`.
pub(crate) fn null_space<const N: usize>(
    f: &Field,
    rows: &[[FieldElement; N]],
) -> Vec<[FieldElement; N]> {
    let mut work = rows.to_vec();
    let r = rref(f, &mut work);
    let mut pivot_cols = Vec::with_capacity(r);
    for row in work.iter() {
        let lead = row.iter().position(|c| !c.is_zero()).expect("rref row nonzero");
        pivot_cols.push(lead);
    }
    let mut basis = Vec::with_capacity(N - r);
    for free in 0..N {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = [f.zero(); N];
        v[free] = f.one();
        for (row, &pc) in work.iter().zip(&pivot_cols) {
            v[pc] = f.neg(row[free]);
        }
        basis.push(v);
    }
    // Re-echelonize so the basis itself is canonical.
    rref(f, &mut basis);
    basis
}

/// Line spanned by two distinct points.
pub fn line_through(f: &Field, p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine, GeomError> {
    if p == q {
        return Err(GeomError::IdenticalPoints);
    }
    Ok(line_from_rows(f, p.0, q.0).expect("distinct canonical points are independent"))
}

/// Canonical line from any two spanning vectors; `None` if dependent.
pub(crate) fn line_from_rows(
    f: &Field,
    a: [FieldElement; 4],
    b: [FieldElement; 4],
) -> Option<ProjLine> {
    let mut rows = vec![a, b];
    (rref(f, &mut rows) == 2).then(|| ProjLine { rows: [rows[0], rows[1]] })
}

/// The canonical q+1 representatives of P^1 in parameter order.
pub fn p1_reps(f: &Field) -> Vec<P1> {
    let mut out = Vec::with_capacity(f.order() as usize + 1);
    for t in f.enumerate() {
        out.push(P1([f.one(), t]));
    }
    out.push(P1([f.zero(), f.one()]));
    out
}

/// Point s*r0 + t*r1 for a P^1 parameter [s:t].
pub fn point_from_param(f: &Field, line: &ProjLine, param: &P1) -> ProjPoint {
    let [s, t] = param.0;
    let mut v = [f.zero(); 4];
    for c in 0..4 {
        v[c] = f.add(f.mul(s, line.rows[0][c]), f.mul(t, line.rows[1][c]));
    }
    normalize_point(f, v).expect("basis rows are independent")
}

/// Inverse of [`point_from_param`]: read the parameter off the pivot columns
/// of the canonical basis.
pub fn param_of_point(f: &Field, line: &ProjLine, p: &ProjPoint) -> Result<P1, GeomError> {
    if !point_on_line(f, p, line) {
        return Err(GeomError::NotIncident);
    }
    let c0 = line.rows[0].iter().position(|c| !c.is_zero()).unwrap();
    let c1 = line.rows[1].iter().position(|c| !c.is_zero()).unwrap();
    normalize_p1(f, [p.0[c0], p.0[c1]])
}

/// The q+1 points of a line, in P^1 parameter order.
pub fn points_on_line(f: &Field, line: &ProjLine) -> Vec<ProjPoint> {
    p1_reps(f)
        .iter()
        .map(|t| point_from_param(f, line, t))
        .collect()
}

pub fn point_on_plane(f: &Field, p: &ProjPoint, plane: &ProjPlane) -> bool {
    let mut acc = f.zero();
    for c in 0..4 {
        acc = f.add(acc, f.mul(p.0[c], plane.0[c]));
    }
    acc.is_zero()
}

pub fn point_on_line(f: &Field, p: &ProjPoint, line: &ProjLine) -> bool {
    rank(f, &[line.rows[0], line.rows[1], p.0]) == 2
}

pub fn line_in_plane(f: &Field, line: &ProjLine, plane: &ProjPlane) -> bool {
    line.rows.iter().all(|row| {
        let mut acc = f.zero();
        for c in 0..4 {
            acc = f.add(acc, f.mul(row[c], plane.0[c]));
        }
        acc.is_zero()
    })
}

/// The pencil of q+1 planes containing a line, in P^1 parameter order over
/// the canonical null-space basis of the line.
pub fn planes_through_line(f: &Field, line: &ProjLine) -> Vec<ProjPlane> {
    let ns = null_space(f, &[line.rows[0], line.rows[1]]);
    debug_assert_eq!(ns.len(), 2);
    let mut out = Vec::with_capacity(f.order() as usize + 1);
    for param in p1_reps(f) {
        let [s, t] = param.0;
        let mut v = [f.zero(); 4];
        for c in 0..4 {
            v[c] = f.add(f.mul(s, ns[0][c]), f.mul(t, ns[1][c]));
        }
        out.push(normalize_plane(f, v).expect("null-space rows are independent"));
    }
    out
}

/// Canonical three-point basis of a plane: the reduced echelon basis of the
/// solution space of its dual equation.  Rows double as canonical points.
pub fn plane_basis(f: &Field, plane: &ProjPlane) -> [[FieldElement; 4]; 3] {
    let ns = null_space(f, &[plane.0]);
    debug_assert_eq!(ns.len(), 3);
    [ns[0], ns[1], ns[2]]
}

/// Coordinates of a plane point with respect to any independent basis of the
/// plane: solves `x0*B0 + x1*B1 + x2*B2 = p` and fails if `p` is off the
/// span.
pub fn plane_coords(
    f: &Field,
    basis: &[[FieldElement; 4]; 3],
    p: &ProjPoint,
) -> Result<P2, GeomError> {
    // Augmented system [Bᵀ | p], one row per 3-space coordinate.
    let mut aug: Vec<[FieldElement; 4]> = (0..4)
        .map(|r| [basis[0][r], basis[1][r], basis[2][r], p.0[r]])
        .collect();
    rref(f, &mut aug);
    let mut coords = [f.zero(); 3];
    for row in &aug {
        match row[..3].iter().position(|c| !c.is_zero()) {
            Some(pivot) => coords[pivot] = row[3],
            None if !row[3].is_zero() => return Err(GeomError::NotIncident),
            None => {}
        }
    }
    normalize_p2(f, coords)
}

/// 3-space point `u*B0 + v*B1 + w*B2` from plane coordinates.
pub fn point_from_plane_coords(
    f: &Field,
    basis: &[[FieldElement; 4]; 3],
    coords: &P2,
) -> ProjPoint {
    let mut v = [f.zero(); 4];
    for (i, row) in basis.iter().enumerate() {
        for c in 0..4 {
            v[c] = f.add(v[c], f.mul(coords.0[i], row[c]));
        }
    }
    normalize_point(f, v).expect("basis rows are independent")
}

/// All q+1 lines of a plane through one of its points.
pub fn lines_in_plane_through_point(
    f: &Field,
    plane: &ProjPlane,
    p: &ProjPoint,
) -> Result<Vec<ProjLine>, GeomError> {
    if !point_on_plane(f, p, plane) {
        return Err(GeomError::NotIncident);
    }
    let basis = plane_basis(f, plane);
    let pc = plane_coords(f, &basis, p)?;
    // Pick the two basis directions that stay independent from p: drop the
    // first index where p's plane coordinate is nonzero.
    let m = pc.0.iter().position(|c| !c.is_zero()).unwrap();
    let (i, j) = match m {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut out = Vec::with_capacity(f.order() as usize + 1);
    for t in f.enumerate() {
        let mut v = [f.zero(); 4];
        for c in 0..4 {
            v[c] = f.add(basis[i][c], f.mul(t, basis[j][c]));
        }
        let x = normalize_point(f, v).expect("basis rows are independent");
        out.push(line_through(f, p, &x).expect("x independent from p"));
    }
    let x = normalize_point(f, basis[j]).expect("basis row nonzero");
    out.push(line_through(f, p, &x).expect("x independent from p"));
    Ok(out)
}

/// Two lines are skew iff their combined span is all of P^3.
pub fn skew(f: &Field, a: &ProjLine, b: &ProjLine) -> bool {
    rank(f, &[a.rows[0], a.rows[1], b.rows[0], b.rows[1]]) == 4
}

/// Canonical enumeration of P^3: chart by chart, leading coordinate 1.
pub fn enumerate_points_p3(f: &Field) -> impl Iterator<Item = ProjPoint> + '_ {
    let one = f.one();
    let zero = f.zero();
    let chart0 = f.enumerate().flat_map(move |a| {
        f.enumerate()
            .flat_map(move |b| f.enumerate().map(move |c| ProjPoint([one, a, b, c])))
    });
    let chart1 = f
        .enumerate()
        .flat_map(move |b| f.enumerate().map(move |c| ProjPoint([zero, one, b, c])));
    let chart2 = f.enumerate().map(move |c| ProjPoint([zero, zero, one, c]));
    let chart3 = std::iter::once(ProjPoint([zero, zero, zero, one]));
    chart0.chain(chart1).chain(chart2).chain(chart3)
}

/// Canonical enumeration of P^2.
pub fn enumerate_points_p2(f: &Field) -> impl Iterator<Item = P2> + '_ {
    let one = f.one();
    let zero = f.zero();
    let chart0 = f
        .enumerate()
        .flat_map(move |a| f.enumerate().map(move |b| P2([one, a, b])));
    let chart1 = f.enumerate().map(move |b| P2([zero, one, b]));
    let chart2 = std::iter::once(P2([zero, zero, one]));
    chart0.chain(chart1).chain(chart2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn gf(p: u64, k: usize) -> Field {
        Field::new(p, k, None).unwrap()
    }

    fn pt(f: &Field, v: [u32; 4]) -> ProjPoint {
        normalize_point(f, [f.element(v[0]), f.element(v[1]), f.element(v[2]), f.element(v[3])])
            .unwrap()
    }

    #[test]
    fn canonicalization_scale_invariant() {
        for f in [gf(2, 2), gf(3, 1), gf(2, 3), gf(7, 1)] {
            let q = f.order();
            // All nonzero 4-vectors, all nonzero scalars.
            for raw in 1..q.pow(4) {
                let mut v = [f.zero(); 4];
                let mut x = raw;
                for c in v.iter_mut() {
                    *c = f.element(x % q);
                    x /= q;
                }
                let p = normalize_point(&f, v).unwrap();
                let again = normalize_point(&f, *p.coords()).unwrap();
                assert_eq!(p, again, "idempotent");
                for s in f.enumerate().skip(1) {
                    let scaled: Vec<_> = v.iter().map(|&c| f.mul(c, s)).collect();
                    let sp =
                        normalize_point(&f, [scaled[0], scaled[1], scaled[2], scaled[3]]).unwrap();
                    assert_eq!(p, sp, "scaling must not change the representative");
                }
            }
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let f = gf(5, 1);
        assert!(normalize_point(&f, [f.zero(); 4]).is_err());
    }

    #[test]
    fn line_through_axis_points() {
        let f = gf(5, 1);
        let p = pt(&f, [1, 0, 0, 0]);
        let q = pt(&f, [0, 1, 0, 0]);
        let l = line_through(&f, &p, &q).unwrap();
        assert_eq!(l.rows()[0], *p.coords());
        assert_eq!(l.rows()[1], *q.coords());
        assert!(matches!(
            line_through(&f, &p, &p),
            Err(GeomError::IdenticalPoints)
        ));
        // Order of the spanning points must not matter.
        let l2 = line_through(&f, &q, &p).unwrap();
        assert_eq!(l, l2);
    }

    #[test]
    fn points_on_line_are_the_line() {
        for f in [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1), gf(2, 3)] {
            let a = pt(&f, [1, 2 % f.order(), 0, 1]);
            let b = pt(&f, [0, 1, 1, 1]);
            let l = line_through(&f, &a, &b).unwrap();
            let pts = points_on_line(&f, &l);
            assert_eq!(pts.len(), f.order() as usize + 1);
            let set: HashSet<_> = pts.iter().collect();
            assert_eq!(set.len(), pts.len(), "points are distinct");
            for p in &pts {
                assert!(point_on_line(&f, p, &l));
                // Parameter extraction inverts the parametrization.
                let param = param_of_point(&f, &l, p).unwrap();
                assert_eq!(point_from_param(&f, &l, &param), *p);
            }
            assert!(set.contains(&a) && set.contains(&b));
        }
    }

    #[test]
    fn pencil_partitions_complement() {
        for f in [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1)] {
            let a = pt(&f, [1, 0, 0, 0]);
            let b = pt(&f, [0, 1, 1, 0]);
            let l = line_through(&f, &a, &b).unwrap();
            let pencil = planes_through_line(&f, &l);
            assert_eq!(pencil.len(), f.order() as usize + 1);
            let distinct: HashSet<_> = pencil.iter().collect();
            assert_eq!(distinct.len(), pencil.len());
            for plane in &pencil {
                assert!(line_in_plane(&f, &l, plane));
            }
            // Every point off the line lies in exactly one plane of the pencil.
            let line_pts: HashSet<_> = points_on_line(&f, &l).into_iter().collect();
            for p in enumerate_points_p3(&f) {
                let count = pencil.iter().filter(|pl| point_on_plane(&f, &p, pl)).count();
                if line_pts.contains(&p) {
                    assert_eq!(count, pencil.len());
                } else {
                    assert_eq!(count, 1, "pencil must partition the complement");
                }
            }
        }
    }

    #[test]
    fn lines_through_point_in_plane() {
        for f in [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1)] {
            let plane =
                normalize_plane(&f, [f.one(), f.one(), f.zero(), f.element(f.order() - 1)])
                    .unwrap();
            let basis = plane_basis(&f, &plane);
            let p = normalize_point(&f, basis[1]).unwrap();
            let lines = lines_in_plane_through_point(&f, &plane, &p).unwrap();
            assert_eq!(lines.len(), f.order() as usize + 1);
            let distinct: HashSet<_> = lines.iter().collect();
            assert_eq!(distinct.len(), lines.len());
            for l in &lines {
                assert!(point_on_line(&f, &p, l));
                assert!(line_in_plane(&f, l, &plane));
            }
            // Pairwise intersections are exactly {p}: every other plane point
            // lies on exactly one of the lines.
            for x in enumerate_points_p3(&f).filter(|x| point_on_plane(&f, x, &plane)) {
                let count = lines.iter().filter(|l| point_on_line(&f, &x, l)).count();
                if x == p {
                    assert_eq!(count, lines.len());
                } else {
                    assert_eq!(count, 1);
                }
            }
            // Off-plane points give an incidence error.
            let off = enumerate_points_p3(&f)
                .find(|x| !point_on_plane(&f, x, &plane))
                .unwrap();
            assert!(lines_in_plane_through_point(&f, &plane, &off).is_err());
        }
    }

    #[test]
    fn skew_and_meeting_lines() {
        let f = gf(2, 2);
        let a = line_through(&f, &pt(&f, [1, 0, 0, 0]), &pt(&f, [0, 1, 0, 0])).unwrap();
        let b = line_through(&f, &pt(&f, [0, 0, 1, 0]), &pt(&f, [0, 0, 0, 1])).unwrap();
        assert!(skew(&f, &a, &b));
        let c = line_through(&f, &pt(&f, [1, 0, 0, 0]), &pt(&f, [0, 0, 1, 0])).unwrap();
        assert!(!skew(&f, &a, &c), "lines sharing a point are not skew");
        assert!(!skew(&f, &a, &a));
    }

    #[test]
    fn p3_point_count() {
        for f in [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1), gf(7, 1)] {
            let q = f.order() as usize;
            let pts: Vec<_> = enumerate_points_p3(&f).collect();
            assert_eq!(pts.len(), q * q * q + q * q + q + 1);
            let set: HashSet<_> = pts.iter().collect();
            assert_eq!(set.len(), pts.len(), "representatives are distinct");
        }
    }

    #[test]
    fn p2_point_count() {
        for f in [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1)] {
            let q = f.order() as usize;
            let pts: Vec<_> = enumerate_points_p2(&f).collect();
            assert_eq!(pts.len(), q * q + q + 1);
            assert_eq!(pts.iter().collect::<HashSet<_>>().len(), pts.len());
        }
    }

    #[test]
    fn line_count_in_p3() {
        // #lines = (q^2+1)(q^2+q+1), checked by deduplicating all spans.
        for f in [gf(2, 1), gf(3, 1), gf(2, 2)] {
            let q = f.order() as usize;
            let pts: Vec<_> = enumerate_points_p3(&f).collect();
            let mut lines = HashSet::new();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    lines.insert(line_through(&f, &pts[i], &pts[j]).unwrap());
                }
            }
            assert_eq!(lines.len(), (q * q + 1) * (q * q + q + 1));
        }
    }

    #[test]
    fn plane_coords_roundtrip() {
        for f in [gf(3, 1), gf(2, 2), gf(5, 1)] {
            let plane = normalize_plane(&f, [f.one(), f.element(f.order() - 1), f.one(), f.zero()])
                .unwrap();
            let basis = plane_basis(&f, &plane);
            for p in enumerate_points_p3(&f).filter(|p| point_on_plane(&f, p, &plane)) {
                let coords = plane_coords(&f, &basis, &p).unwrap();
                assert_eq!(point_from_plane_coords(&f, &basis, &coords), p);
            }
            // And every P^2 representative maps to a distinct plane point.
            let imgs: HashSet<_> = enumerate_points_p2(&f)
                .map(|c| point_from_plane_coords(&f, &basis, &c))
                .collect();
            let q = f.order() as usize;
            assert_eq!(imgs.len(), q * q + q + 1);
        }
    }
}
