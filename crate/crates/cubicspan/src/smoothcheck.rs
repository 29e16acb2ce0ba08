//! Exact smoothness test for cubic surfaces.
//!
//! A surface is singular somewhere over the algebraic closure iff, in some
//! affine chart x_i = 1, the ideal generated by the dehomogenized form and
//! its four partials has a common zero — equivalently (weak Nullstellensatz)
//! iff that ideal is not the unit ideal.  Unit-ideal detection is done with a
//! small Buchberger engine specialized to 3 variables and degree ≤ 3 inputs.
//! The form itself is always included among the generators so characteristic
//! 3 needs no Euler-relation shortcut.
//!
//! A brute-force search over small extension fields serves as an independent
//! oracle for the soundness direction.

use crate::forms::{partials, CubicForm, EXP4_2, EXP4_3};
use crate::gf::{Embedding, Field, FieldElement, FieldError};
use crate::projgeom::{enumerate_points_p3, ProjPoint};
use std::cmp::Ordering;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmoothError {
    #[error("extension field of size {0} exceeds the enumeration cap {1}")]
    CapExceeded(u64, u64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Affine points of P³ over GF(q^d) enumerated by the oracle are capped at
/// this extension size.
pub const ORACLE_CAP: u64 = 1 << 10;

type Mono = [u16; 3];

fn total_degree(m: &Mono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Graded reverse lexicographic: higher total degree wins; on ties the
/// rightmost differing exponent decides, smaller being greater.
fn cmp_grevlex(a: &Mono, b: &Mono) -> Ordering {
    match total_degree(a).cmp(&total_degree(b)) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for i in (0..3).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
            Ordering::Equal => {}
        }
    }
    Ordering::Equal
}

fn mono_divides(d: &Mono, m: &Mono) -> bool {
    d.iter().zip(m).all(|(a, b)| a <= b)
}

fn mono_sub(m: &Mono, d: &Mono) -> Mono {
    [m[0] - d[0], m[1] - d[1], m[2] - d[2]]
}

fn mono_add(a: &Mono, b: &Mono) -> Mono {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn mono_lcm(a: &Mono, b: &Mono) -> Mono {
    [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]
}

/// Sparse polynomial in 3 affine variables; terms sorted leading-first in
/// grevlex, no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffinePoly {
    terms: Vec<(Mono, FieldElement)>,
}

impl AffinePoly {
    pub fn from_terms(f: &Field, raw: Vec<(Mono, FieldElement)>) -> AffinePoly {
        let mut terms = raw;
        terms.sort_by(|a, b| cmp_grevlex(&b.0, &a.0));
        let mut out: Vec<(Mono, FieldElement)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = f.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        AffinePoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn leading(&self) -> Option<&(Mono, FieldElement)> {
        self.terms.first()
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.leading(), Some(([0, 0, 0], _)))
    }

    fn monic(&self, f: &Field) -> AffinePoly {
        let Some(&(_, lc)) = self.leading() else {
            return self.clone();
        };
        if lc.is_one() {
            return self.clone();
        }
        let inv = f.inv(lc).expect("leading coefficient nonzero");
        AffinePoly {
            terms: self.terms.iter().map(|&(m, c)| (m, f.mul(c, inv))).collect(),
        }
    }

    pub fn evaluate(&self, f: &Field, x: &[FieldElement; 3]) -> FieldElement {
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut term = *c;
            for (xi, &e) in x.iter().zip(m) {
                for _ in 0..e {
                    term = f.mul(term, *xi);
                }
            }
            acc = f.add(acc, term);
        }
        acc
    }
}

/// a + scale·x^shift·b, by sorted merge (multiplying by a monomial preserves
/// grevlex order).
fn add_scaled(
    f: &Field,
    a: &AffinePoly,
    b: &AffinePoly,
    shift: &Mono,
    scale: FieldElement,
) -> AffinePoly {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let mut i = 0;
    let mut j = 0;
    while i < a.terms.len() || j < b.terms.len() {
        let pick_a = if i >= a.terms.len() {
            false
        } else if j >= b.terms.len() {
            true
        } else {
            let bm = mono_add(&b.terms[j].0, shift);
            match cmp_grevlex(&a.terms[i].0, &bm) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    let c = f.add(a.terms[i].1, f.mul(scale, b.terms[j].1));
                    if !c.is_zero() {
                        out.push((a.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                    continue;
                }
            }
        };
        if pick_a {
            out.push(a.terms[i]);
            i += 1;
        } else {
            let c = f.mul(scale, b.terms[j].1);
            if !c.is_zero() {
                out.push((mono_add(&b.terms[j].0, shift), c));
            }
            j += 1;
        }
    }
    AffinePoly { terms: out }
}

/// Full normal form: reduce every term, picking divisors in basis insertion
/// order for determinism.
fn normal_form(f: &Field, p: &AffinePoly, basis: &[AffinePoly]) -> AffinePoly {
    let mut work = p.clone();
    let mut remainder: Vec<(Mono, FieldElement)> = Vec::new();
    'outer: while let Some(&(lm, lc)) = work.leading() {
        for g in basis {
            let (gm, _) = g.leading().expect("basis elements nonzero");
            if mono_divides(gm, &lm) {
                let shift = mono_sub(&lm, gm);
                work = add_scaled(f, &work, g, &shift, f.neg(lc));
                continue 'outer;
            }
        }
        // Irreducible leading term: move it to the remainder.  Terms come off
        // in strictly decreasing order, so the remainder stays sorted.
        remainder.push((lm, lc));
        work.terms.remove(0);
    }
    AffinePoly { terms: remainder }
}

fn spoly(f: &Field, a: &AffinePoly, b: &AffinePoly) -> AffinePoly {
    let (am, _) = a.leading().expect("nonzero");
    let (bm, _) = b.leading().expect("nonzero");
    let lcm = mono_lcm(am, bm);
    // Both inputs are monic.
    let sa = AffinePoly {
        terms: a
            .terms
            .iter()
            .map(|&(m, c)| (mono_add(&m, &mono_sub(&lcm, am)), c))
            .collect(),
    };
    add_scaled(f, &sa, b, &mono_sub(&lcm, bm), f.neg(f.one()))
}

/// Buchberger with the product criterion and an early exit as soon as a
/// nonzero constant appears (the only consumer cares about ideal triviality).
pub fn buchberger(f: &Field, gens: &[AffinePoly]) -> Vec<AffinePoly> {
    let mut basis: Vec<AffinePoly> = Vec::new();
    for g in gens {
        if !g.is_zero() {
            basis.push(g.monic(f));
        }
    }
    let one = AffinePoly::from_terms(f, vec![([0, 0, 0], f.one())]);
    if basis.iter().any(|g| g.is_constant()) {
        return vec![one];
    }
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            queue.push_back((i, j));
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        let (mi, _) = basis[i].leading().unwrap();
        let (mj, _) = basis[j].leading().unwrap();
        // Product criterion: coprime leading monomials reduce to zero.
        if mono_lcm(mi, mj) == mono_add(mi, mj) {
            continue;
        }
        let s = spoly(f, &basis[i], &basis[j]);
        let r = normal_form(f, &s, &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return vec![one];
        }
        let r = r.monic(f);
        let new_idx = basis.len();
        for k in 0..new_idx {
            queue.push_back((k, new_idx));
        }
        basis.push(r);
    }
    // Minimize: drop any element whose leading monomial is divisible by
    // another surviving element's.
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (mi, _) = *basis[i].leading().unwrap();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (mj, _) = basis[j].leading().unwrap();
            if mono_divides(mj, &mi) && (*mj != mi || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<AffinePoly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| k.then_some(g))
        .collect();
    // Tail-reduce for a unique reduced basis.
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<AffinePoly> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| (j != i).then(|| g.clone()))
            .collect();
        let r = normal_form(f, &minimal[i], &others);
        if !r.is_zero() {
            reduced.push(r.monic(f));
        }
    }
    reduced
}

pub fn is_unit_ideal(basis: &[AffinePoly]) -> bool {
    basis.iter().any(|g| g.is_constant())
}

/// Dehomogenize a 4-variable form by fixing chart coordinate `chart` to 1;
/// the remaining coordinates keep their relative order.
fn dehomogenize(
    f: &Field,
    coeffs: &[FieldElement],
    exps: &[[u8; 4]],
    chart: usize,
) -> AffinePoly {
    let vars: Vec<usize> = (0..4).filter(|&v| v != chart).collect();
    let mut terms = Vec::new();
    for (c, e) in coeffs.iter().zip(exps) {
        if c.is_zero() {
            continue;
        }
        let m = [e[vars[0]] as u16, e[vars[1]] as u16, e[vars[2]] as u16];
        terms.push((m, *c));
    }
    AffinePoly::from_terms(f, terms)
}

/// Smoothness over the algebraic closure: the Jacobian system {F, ∂₀F, …,
/// ∂₃F} must generate the unit ideal in every affine chart.
pub fn is_smooth(f: &Field, form: &CubicForm) -> bool {
    let parts = partials(f, form);
    for chart in 0..4 {
        let mut gens = vec![dehomogenize(f, form.coeffs(), &EXP4_3, chart)];
        for p in &parts {
            gens.push(dehomogenize(f, &p.0, &EXP4_2, chart));
        }
        let basis = buchberger(f, &gens);
        if !is_unit_ideal(&basis) {
            return false;
        }
    }
    true
}

/// Brute-force oracle: all singular points of the surface with coordinates
/// in GF(q^d), found by scanning P³ over the extension.  Deliberately
/// independent of the Gröbner route.
pub fn exhaustive_singular_search(
    f: &Field,
    form: &CubicForm,
    d: usize,
) -> Result<Vec<(Field, ProjPoint)>, SmoothError> {
    let order = f.order() as u64;
    let ext_order = order.pow(d as u32);
    if ext_order > ORACLE_CAP {
        return Err(SmoothError::CapExceeded(ext_order, ORACLE_CAP));
    }
    let (ext, lifted): (Field, [FieldElement; 20]) = if d == 1 {
        (f.clone(), *form.coeffs())
    } else {
        let ext = f.extension(d)?;
        let emb = Embedding::new(f, &ext)?;
        let mut lifted = [ext.zero(); 20];
        for (dst, src) in lifted.iter_mut().zip(form.coeffs()) {
            *dst = emb.apply(*src);
        }
        (ext, lifted)
    };
    let lifted_form = CubicForm::new(lifted).expect("nonzero form stays nonzero");
    let parts = partials(&ext, &lifted_form);
    let mut out = Vec::new();
    for p in enumerate_points_p3(&ext) {
        if !crate::forms::evaluate(&ext, &lifted_form, p.coords()).is_zero() {
            continue;
        }
        let grad = crate::forms::gradient_at(&ext, &parts, p.coords());
        if grad.iter().all(|g| g.is_zero()) {
            out.push((ext.clone(), p));
        }
    }
    Ok(out)
}
