//! Homogeneous forms: cubic surfaces in 4 variables, their plane and line
//! restrictions, exact division by linear factors, and root finding for
//! binary forms.
//!
//! Coefficients are always stored densely in descending lexicographic order
//! of the exponent tuples (see the `EXP*` tables).  Formal derivatives and
//! substitution are characteristic-aware; nothing here assumes char ≠ 2, 3.

use crate::gf::{Field, FieldElement};
use crate::projgeom::{self, normalize_plane, P1, P2, ProjLine, ProjPlane, ProjPoint};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("form is identically zero")]
    ZeroForm,
    #[error("linear form is not a factor")]
    NotDivisible,
    #[error("supplied parameter is not a root")]
    NotARoot,
    #[error("all partial derivatives vanish at the point")]
    SingularPoint,
}

/// Degree-3 exponent tuples in 4 variables, descending lexicographic.
pub const EXP4_3: [[u8; 4]; 20] = [
    [3, 0, 0, 0], [2, 1, 0, 0], [2, 0, 1, 0], [2, 0, 0, 1], [1, 2, 0, 0],
    [1, 1, 1, 0], [1, 1, 0, 1], [1, 0, 2, 0], [1, 0, 1, 1], [1, 0, 0, 2],
    [0, 3, 0, 0], [0, 2, 1, 0], [0, 2, 0, 1], [0, 1, 2, 0], [0, 1, 1, 1],
    [0, 1, 0, 2], [0, 0, 3, 0], [0, 0, 2, 1], [0, 0, 1, 2], [0, 0, 0, 3],
];

/// Degree-2 exponent tuples in 4 variables.
pub const EXP4_2: [[u8; 4]; 10] = [
    [2, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1], [0, 2, 0, 0],
    [0, 1, 1, 0], [0, 1, 0, 1], [0, 0, 2, 0], [0, 0, 1, 1], [0, 0, 0, 2],
];

/// Degree-3 exponent tuples in 3 variables.
pub const EXP3_3: [[u8; 3]; 10] = [
    [3, 0, 0], [2, 1, 0], [2, 0, 1], [1, 2, 0], [1, 1, 1],
    [1, 0, 2], [0, 3, 0], [0, 2, 1], [0, 1, 2], [0, 0, 3],
];

/// Degree-2 exponent tuples in 3 variables.
pub const EXP3_2: [[u8; 3]; 6] =
    [[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]];

/// Degree-1 exponent tuples in 3 variables.
pub const EXP3_1: [[u8; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// Degree-3 exponent tuples in 2 variables.
pub const EXP2_3: [[u8; 2]; 4] = [[3, 0], [2, 1], [1, 2], [0, 3]];

/// Degree-2 exponent tuples in 2 variables.
pub const EXP2_2: [[u8; 2]; 3] = [[2, 0], [1, 1], [0, 2]];

/// Nonzero homogeneous cubic in x₀..x₃ — a cubic surface equation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CubicForm {
    coeffs: [FieldElement; 20],
}

impl CubicForm {
    pub fn new(coeffs: [FieldElement; 20]) -> Result<Self, FormsError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(FormsError::ZeroForm);
        }
        Ok(CubicForm { coeffs })
    }

    pub fn coeffs(&self) -> &[FieldElement; 20] {
        &self.coeffs
    }
}

/// Homogeneous quadratic in 4 variables (partial derivatives live here).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct QuadForm(pub [FieldElement; 10]);

/// Homogeneous cubic in 3 variables — a plane section in plane coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TernaryCubic(pub [FieldElement; 10]);

/// Homogeneous quadratic in 3 variables — a residual conic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TernaryConic(pub [FieldElement; 6]);

/// Linear form in 3 variables — a line inside a plane.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TernaryLinear(pub [FieldElement; 3]);

/// Homogeneous binary cubic — a line's intersection divisor with a surface.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BinaryCubic(pub [FieldElement; 4]);

/// Homogeneous binary quadratic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct BinaryQuadratic(pub [FieldElement; 3]);

impl TernaryCubic {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Scale so the first nonzero coefficient is 1 (projective equality).
    pub fn canonical(&self, f: &Field) -> TernaryCubic {
        TernaryCubic(canonical_scale(f, self.0))
    }
}

impl TernaryConic {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn canonical(&self, f: &Field) -> TernaryConic {
        TernaryConic(canonical_scale(f, self.0))
    }
}

impl BinaryCubic {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

impl BinaryQuadratic {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

fn canonical_scale<const N: usize>(f: &Field, mut v: [FieldElement; N]) -> [FieldElement; N] {
    if let Some(lead) = v.iter().position(|c| !c.is_zero()) {
        if !v[lead].is_one() {
            let s = f.inv(v[lead]).expect("nonzero coefficient");
            for c in v.iter_mut() {
                *c = f.mul(*c, s);
            }
        }
    }
    v
}

fn eval_generic<const NV: usize>(
    f: &Field,
    coeffs: &[FieldElement],
    exps: &[[u8; NV]],
    x: &[FieldElement; NV],
) -> FieldElement {
    let mut acc = f.zero();
    for (c, e) in coeffs.iter().zip(exps) {
        if c.is_zero() {
            continue;
        }
        let mut term = *c;
        for (xi, &ei) in x.iter().zip(e) {
            for _ in 0..ei {
                term = f.mul(term, *xi);
            }
        }
        acc = f.add(acc, term);
    }
    acc
}

pub fn evaluate(f: &Field, form: &CubicForm, x: &[FieldElement; 4]) -> FieldElement {
    eval_generic(f, &form.coeffs, &EXP4_3, x)
}

pub fn eval_quad(f: &Field, q: &QuadForm, x: &[FieldElement; 4]) -> FieldElement {
    eval_generic(f, &q.0, &EXP4_2, x)
}

pub fn eval_ternary_cubic(f: &Field, g: &TernaryCubic, x: &[FieldElement; 3]) -> FieldElement {
    eval_generic(f, &g.0, &EXP3_3, x)
}

pub fn eval_ternary_conic(f: &Field, c: &TernaryConic, x: &[FieldElement; 3]) -> FieldElement {
    eval_generic(f, &c.0, &EXP3_2, x)
}

pub fn eval_ternary_linear(f: &Field, l: &TernaryLinear, x: &[FieldElement; 3]) -> FieldElement {
    eval_generic(f, &l.0, &EXP3_1, x)
}

pub fn eval_binary_cubic(f: &Field, g: &BinaryCubic, x: &[FieldElement; 2]) -> FieldElement {
    eval_generic(f, &g.0, &EXP2_3, x)
}

pub fn eval_binary_quadratic(
    f: &Field,
    g: &BinaryQuadratic,
    x: &[FieldElement; 2],
) -> FieldElement {
    eval_generic(f, &g.0, &EXP2_2, x)
}

/// Formal partial derivatives; integer multipliers reduce modulo the
/// characteristic (so e.g. cube terms vanish from derivatives in char 3).
pub fn partials(f: &Field, form: &CubicForm) -> [QuadForm; 4] {
    let mut out = [QuadForm([f.zero(); 10]); 4];
    for (c, e) in form.coeffs.iter().zip(&EXP4_3) {
        if c.is_zero() {
            continue;
        }
        for var in 0..4 {
            if e[var] == 0 {
                continue;
            }
            let mut de = *e;
            de[var] -= 1;
            let idx = EXP4_2.iter().position(|t| *t == de).expect("degree-2 tuple");
            let mult = f.from_int(e[var] as u64);
            let term = f.mul(*c, mult);
            out[var].0[idx] = f.add(out[var].0[idx], term);
        }
    }
    out
}

pub fn gradient_at(f: &Field, parts: &[QuadForm; 4], x: &[FieldElement; 4]) -> [FieldElement; 4] {
    [
        eval_quad(f, &parts[0], x),
        eval_quad(f, &parts[1], x),
        eval_quad(f, &parts[2], x),
        eval_quad(f, &parts[3], x),
    ]
}

/// Tangent plane with dual coordinates ∇F(P).  Incidence P ∈ Π_P needs no
/// separate check: P·∇F(P) = 3·F(P), which vanishes for every surface point
/// in every characteristic (trivially so in char 3).
pub fn tangent_plane(
    f: &Field,
    parts: &[QuadForm; 4],
    p: &ProjPoint,
) -> Result<ProjPlane, FormsError> {
    let g = gradient_at(f, parts, p.coords());
    normalize_plane(f, g).map_err(|_| FormsError::SingularPoint)
}

/// Dense multiplication over explicit exponent tables (they are tiny, so the
/// index lookup is a linear scan).
fn mul_generic<const NV: usize>(
    f: &Field,
    a: &[FieldElement],
    a_exps: &[[u8; NV]],
    b: &[FieldElement],
    b_exps: &[[u8; NV]],
    out_exps: &[[u8; NV]],
) -> Vec<FieldElement> {
    let mut out = vec![f.zero(); out_exps.len()];
    for (ca, ea) in a.iter().zip(a_exps) {
        if ca.is_zero() {
            continue;
        }
        for (cb, eb) in b.iter().zip(b_exps) {
            if cb.is_zero() {
                continue;
            }
            let mut e = [0u8; NV];
            for v in 0..NV {
                e[v] = ea[v] + eb[v];
            }
            let idx = out_exps.iter().position(|t| *t == e).expect("product tuple");
            out[idx] = f.add(out[idx], f.mul(*ca, *cb));
        }
    }
    out
}

fn identity_exps<const NV: usize>() -> Vec<[u8; NV]> {
    (0..NV)
        .map(|i| {
            let mut e = [0u8; NV];
            e[i] = 1;
            e
        })
        .collect()
}

/// Substitute NV-variable linear forms for each of the `NIN` original
/// variables of a cubic; returns coefficients in the NV-variable degree-3
/// table order.
fn substitute_cubic<const NIN: usize, const NV: usize>(
    f: &Field,
    coeffs: &[FieldElement],
    in_exps: &[[u8; NIN]],
    lin: &[[FieldElement; NV]],
    quad_exps: &[[u8; NV]],
    cubic_exps: &[[u8; NV]],
) -> Vec<FieldElement> {
    let deg1 = identity_exps::<NV>();
    let mut out = vec![f.zero(); cubic_exps.len()];
    for (c, e) in coeffs.iter().zip(in_exps) {
        if c.is_zero() {
            continue;
        }
        let mut factors = Vec::with_capacity(3);
        for (var, &ev) in e.iter().enumerate() {
            for _ in 0..ev {
                factors.push(var);
            }
        }
        debug_assert_eq!(factors.len(), 3);
        let q = mul_generic(f, &lin[factors[0]], &deg1, &lin[factors[1]], &deg1, quad_exps);
        let t = mul_generic(f, &q, quad_exps, &lin[factors[2]], &deg1, cubic_exps);
        for (o, v) in out.iter_mut().zip(t) {
            *o = f.add(*o, f.mul(*c, v));
        }
    }
    out
}

fn substitute_conic<const NV: usize>(
    f: &Field,
    coeffs: &[FieldElement; 6],
    lin: &[[FieldElement; NV]; 3],
    quad_exps: &[[u8; NV]],
) -> Vec<FieldElement> {
    let deg1 = identity_exps::<NV>();
    let mut out = vec![f.zero(); quad_exps.len()];
    for (c, e) in coeffs.iter().zip(&EXP3_2) {
        if c.is_zero() {
            continue;
        }
        let mut factors = Vec::with_capacity(2);
        for (var, &ev) in e.iter().enumerate() {
            for _ in 0..ev {
                factors.push(var);
            }
        }
        let q = mul_generic(f, &lin[factors[0]], &deg1, &lin[factors[1]], &deg1, quad_exps);
        for (o, v) in out.iter_mut().zip(q) {
            *o = f.add(*o, f.mul(*c, v));
        }
    }
    out
}

/// Restrict to the plane spanned by three basis points: Γ(u,v,w) = F(uB₀+vB₁+wB₂).
pub fn restrict_to_plane_with_basis(
    f: &Field,
    form: &CubicForm,
    basis: &[[FieldElement; 4]; 3],
) -> TernaryCubic {
    // The linear image of original variable x_c is B₀[c]·u + B₁[c]·v + B₂[c]·w.
    let lin: Vec<[FieldElement; 3]> =
        (0..4).map(|c| [basis[0][c], basis[1][c], basis[2][c]]).collect();
    let out = substitute_cubic(f, &form.coeffs, &EXP4_3, &lin, &EXP3_2, &EXP3_3);
    TernaryCubic(out.try_into().unwrap())
}

/// Restrict using the plane's canonical echelon basis.
pub fn restrict_to_plane(f: &Field, form: &CubicForm, plane: &ProjPlane) -> TernaryCubic {
    let basis = projgeom::plane_basis(f, plane);
    restrict_to_plane_with_basis(f, form, &basis)
}

/// F(s·a + t·b) for arbitrary spanning vectors — the intersection divisor of
/// the (a,b)-parametrized line with the surface.
pub fn restrict_to_span(
    f: &Field,
    form: &CubicForm,
    a: &[FieldElement; 4],
    b: &[FieldElement; 4],
) -> BinaryCubic {
    let lin: Vec<[FieldElement; 2]> = (0..4).map(|c| [a[c], b[c]]).collect();
    let out = substitute_cubic(f, &form.coeffs, &EXP4_3, &lin, &EXP2_2, &EXP2_3);
    BinaryCubic(out.try_into().unwrap())
}

/// Restriction along a line's canonical basis; zero iff the line lies in the
/// surface.
pub fn restrict_to_line(f: &Field, form: &CubicForm, line: &ProjLine) -> BinaryCubic {
    restrict_to_span(f, form, &line.rows()[0], &line.rows()[1])
}

/// Γ(s·a + t·b) for a plane cubic and two spanning plane points.
pub fn restrict_ternary_to_span(
    f: &Field,
    g: &TernaryCubic,
    a: &[FieldElement; 3],
    b: &[FieldElement; 3],
) -> BinaryCubic {
    let lin: Vec<[FieldElement; 2]> = (0..3).map(|c| [a[c], b[c]]).collect();
    let out = substitute_cubic(f, &g.0, &EXP3_3, &lin, &EXP2_2, &EXP2_3);
    BinaryCubic(out.try_into().unwrap())
}

/// C(s·a + t·b) for a conic and two spanning plane points.
pub fn restrict_conic_to_span(
    f: &Field,
    c: &TernaryConic,
    a: &[FieldElement; 3],
    b: &[FieldElement; 3],
) -> BinaryQuadratic {
    let lin = [[a[0], b[0]], [a[1], b[1]], [a[2], b[2]]];
    let out = substitute_conic(f, &c.0, &lin, &EXP2_2);
    BinaryQuadratic(out.try_into().unwrap())
}

/// Full linear change of variables y ↦ F(M·y), rows of `m` giving the images
/// of the original coordinates.
pub fn substitute_linear_4(
    f: &Field,
    form: &CubicForm,
    m: &[[FieldElement; 4]; 4],
) -> Result<CubicForm, FormsError> {
    let out = substitute_cubic(f, &form.coeffs, &EXP4_3, m, &EXP4_2, &EXP4_3);
    CubicForm::new(out.try_into().unwrap())
}

/// Linear change of variables for a plane cubic.
pub fn substitute_linear_3(
    f: &Field,
    g: &TernaryCubic,
    m: &[[FieldElement; 3]; 3],
) -> TernaryCubic {
    let out = substitute_cubic(f, &g.0, &EXP3_3, m, &EXP3_2, &EXP3_3);
    TernaryCubic(out.try_into().unwrap())
}

pub fn mul_conic_linear(f: &Field, c: &TernaryConic, l: &TernaryLinear) -> TernaryCubic {
    let out = mul_generic(f, &c.0, &EXP3_2, &l.0, &EXP3_1, &EXP3_3);
    TernaryCubic(out.try_into().unwrap())
}

/// The line through two distinct plane points, as a linear form (the cross
/// product vanishes exactly on their span).
pub fn ternary_line_through(f: &Field, a: &P2, b: &P2) -> Result<TernaryLinear, FormsError> {
    let u = a.coords();
    let v = b.coords();
    let cross = [
        f.sub(f.mul(u[1], v[2]), f.mul(u[2], v[1])),
        f.sub(f.mul(u[2], v[0]), f.mul(u[0], v[2])),
        f.sub(f.mul(u[0], v[1]), f.mul(u[1], v[0])),
    ];
    if cross.iter().all(|c| c.is_zero()) {
        return Err(FormsError::ZeroForm);
    }
    Ok(TernaryLinear(cross))
}

/// Exact division Γ = λ·C.  Solved as a 10×6 linear system in C's
/// coefficients; an inconsistent system means λ is not a factor.
pub fn divide_by_linear(
    f: &Field,
    g: &TernaryCubic,
    l: &TernaryLinear,
) -> Result<TernaryConic, FormsError> {
    if l.0.iter().all(|c| c.is_zero()) {
        return Err(FormsError::ZeroForm);
    }
    // Augmented matrix: one row per cubic monomial, one column per conic
    // monomial (the coefficient of λ·that monomial), last column Γ.
    let mut rows = vec![vec![f.zero(); 7]; 10];
    for j in 0..6 {
        let mut unit = [f.zero(); 6];
        unit[j] = f.one();
        let col = mul_conic_linear(f, &TernaryConic(unit), l);
        for i in 0..10 {
            rows[i][j] = col.0[i];
        }
    }
    for i in 0..10 {
        rows[i][6] = g.0[i];
    }
    // Gaussian elimination.
    let mut rank_row = 0;
    for col in 0..6 {
        let Some(piv) = (rank_row..10).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank_row, piv);
        let inv = f.inv(rows[rank_row][col]).expect("pivot nonzero");
        for c in 0..7 {
            rows[rank_row][c] = f.mul(rows[rank_row][c], inv);
        }
        for r in 0..10 {
            if r != rank_row && !rows[r][col].is_zero() {
                let factor = rows[r][col];
                for c in 0..7 {
                    let sub = f.mul(factor, rows[rank_row][c]);
                    rows[r][c] = f.sub(rows[r][c], sub);
                }
            }
        }
        rank_row += 1;
    }
    // Multiplication by a nonzero linear form is injective, so all six
    // columns must have pivots; remaining rows must be identically zero.
    if rank_row != 6 || rows[6..].iter().any(|r| !r[6].is_zero()) {
        return Err(FormsError::NotDivisible);
    }
    let mut out = [f.zero(); 6];
    for r in 0..6 {
        let lead = rows[r].iter().position(|c| !c.is_zero()).unwrap();
        out[lead] = rows[r][6];
    }
    Ok(TernaryConic(out))
}

/// Roots of a nonzero binary quadratic, with multiplicity: zero or two
/// entries, sorted.
pub fn roots_binary_quadratic(
    f: &Field,
    g: &BinaryQuadratic,
) -> Result<Vec<P1>, FormsError> {
    let [a, b, c] = g.0;
    if g.is_zero() {
        return Err(FormsError::ZeroForm);
    }
    let mut roots = if !a.is_zero() {
        // No root at [1:0]; dehomogenize to s² + (b/a)s + (c/a) at t = 1.
        let ia = f.inv(a).expect("nonzero");
        f.solve_quadratic(f.mul(b, ia), f.mul(c, ia))
            .into_iter()
            .map(|s| projgeom::normalize_p1(f, [s, f.one()]).expect("t = 1"))
            .collect()
    } else if !b.is_zero() {
        // t·(b·s + c·t): two distinct roots.
        vec![
            projgeom::normalize_p1(f, [f.one(), f.zero()]).unwrap(),
            projgeom::normalize_p1(f, [c, f.neg(b)]).unwrap(),
        ]
    } else {
        // c·t²: double root at [1:0].
        let r = projgeom::normalize_p1(f, [f.one(), f.zero()]).unwrap();
        vec![r, r]
    };
    roots.sort();
    Ok(roots)
}

/// Divide out the linear factor vanishing at `root`; errors when the
/// parameter is not actually a root.
pub fn deflate_binary_cubic(
    f: &Field,
    g: &BinaryCubic,
    root: &P1,
) -> Result<BinaryQuadratic, FormsError> {
    let [c30, c21, c12, c03] = g.0;
    if g.is_zero() {
        return Err(FormsError::ZeroForm);
    }
    if root.coords()[0].is_zero() {
        // Root [0:1] ⇔ no t³ term; the factor is s itself.
        if !c03.is_zero() {
            return Err(FormsError::NotARoot);
        }
        return Ok(BinaryQuadratic([c30, c21, c12]));
    }
    // Root [1:r]: synthetic division of c03·r³ + c12·r² + c21·r + c30 by (r − r₀).
    let r0 = root.coords()[1];
    let a = c03;
    let b = f.add(c12, f.mul(r0, a));
    let c = f.add(c21, f.mul(r0, b));
    let rem = f.add(c30, f.mul(r0, c));
    if !rem.is_zero() {
        return Err(FormsError::NotARoot);
    }
    Ok(BinaryQuadratic([c, b, a]))
}

/// All rational roots of a nonzero binary cubic, with multiplicity (0, 1, 2
/// or 3 entries), sorted.  Finds one root by scan, deflates, then solves the
/// residual quadratic exactly.
pub fn roots_binary_cubic(f: &Field, g: &BinaryCubic) -> Result<Vec<P1>, FormsError> {
    if g.is_zero() {
        return Err(FormsError::ZeroForm);
    }
    let first = if g.0[3].is_zero() {
        Some(projgeom::normalize_p1(f, [f.zero(), f.one()]).unwrap())
    } else {
        f.enumerate()
            .map(|t| projgeom::normalize_p1(f, [f.one(), t]).unwrap())
            .find(|r| eval_binary_cubic(f, g, r.coords()).is_zero())
    };
    let Some(first) = first else {
        return Ok(Vec::new());
    };
    let quad = deflate_binary_cubic(f, g, &first).expect("verified root");
    let mut roots = vec![first];
    if let Ok(qr) = roots_binary_quadratic(f, &quad) {
        roots.extend(qr);
    }
    roots.sort();
    Ok(roots)
}
