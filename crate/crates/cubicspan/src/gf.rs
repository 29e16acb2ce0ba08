//! Arithmetic in small finite fields GF(p^k), p prime, p^k <= 2^20.
//!
//! An element is a polynomial of degree < k over Z_p, reduced modulo a monic
//! irreducible modulus (coefficient vectors are constant-term first).  We pack
//! the coefficient vector (c_0, ..., c_{k-1}) into the integer
//! `sum c_i * p^i`, so elements are `Copy`, comparisons are cheap, and the
//! canonical enumeration order is simply 0, 1, 2, ..., q-1 (0 first, 1
//! second).  All arithmetic goes through the owning [`Field`], which carries
//! the modulus and a few precomputed reduction/solver tables.
//!
//! Each element carries a 32-bit fingerprint of its field so that mixing
//! elements from different fields is caught at the operation boundary instead
//! of producing garbage.

use std::fmt;
use thiserror::Error;

/// Largest supported field size p^k.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Largest supported extension degree (reached by GF(2^20)).
const MAX_K: usize = 20;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("field size {0}^{1} exceeds the supported maximum 2^20")]
    TooLarge(u64, usize),
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over Z_{0}")]
    ReducibleModulus(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("bad coefficient vector: {0}")]
    BadElement(String),
    #[error("incompatible embedding: {0}")]
    BadEmbedding(String),
    #[error("source modulus has no root in the target field")]
    NoEmbeddingRoot,
}

/// Element of a specific [`Field`]: packed coefficient vector plus the
/// owning field's fingerprint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    val: u32,
    tag: u32,
}

impl FieldElement {
    /// Packed value `sum c_i * p^i`; doubles as the element's index in the
    /// canonical enumeration order.
    pub fn index(self) -> u32 {
        self.val
    }

    pub fn is_zero(self) -> bool {
        self.val == 0
    }

    pub fn is_one(self) -> bool {
        self.val == 1
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.val)
    }
}

/// GF(2) linear-system solver for y^2 + y = d, precomputed per binary field.
#[derive(Clone, Debug)]
struct ArtinSolver {
    /// Row i is the bitmask over y-coordinates of the i-th coordinate of
    /// y^2 + y expressed in the monomial basis 1, x, ..., x^{k-1}.
    rows: Vec<u32>,
}

/// Tonelli-Shanks bits for odd-order fields.
#[derive(Clone, Debug)]
struct SqrtAux {
    /// Least quadratic non-residue in enumeration order (packed value).
    nonresidue: u32,
    /// q - 1 = 2^e * s with s odd.
    e: u32,
    s: u64,
}

/// A concrete finite field GF(p^k) with a fixed monic irreducible modulus.
#[derive(Clone, Debug)]
pub struct Field {
    p: u32,
    k: usize,
    q: u32,
    /// Monic modulus, constant term first, length k+1.
    modulus: Vec<u32>,
    tag: u32,
    /// xred[i] = coefficient vector (length k) of x^{k+i} mod modulus.
    xred: Vec<Vec<u32>>,
    /// Same as `xred` but packed, used by the char-2 fast path.
    xred_mask: Vec<u32>,
    artin: Option<ArtinSolver>,
    sqrt_aux: Option<SqrtAux>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.k)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d <= n / d {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid on integers; p prime, a != 0 mod p.
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    (t0.rem_euclid(p as i128)) as u64
}

fn fnv1a(data: &[u64]) -> u32 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &d in data {
        for byte in d.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    (h ^ (h >> 32)) as u32
}

// ---- dense polynomial helpers over Z_p (little-endian, constant first) ----

fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_divmod(num: &[u32], den: &[u32], p: u64) -> (Vec<u32>, Vec<u32>) {
    assert!(!den.is_empty());
    let mut rem: Vec<u32> = num.to_vec();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    let lead_inv = inv_mod(den[dd] as u64, p);
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let mut quot = vec![0u32; rem.len() - dd];
    while rem.len() > dd {
        let rd = rem.len() - 1;
        let c = (rem[rd] as u64 * lead_inv) % p;
        quot[rd - dd] = c as u32;
        for i in 0..=dd {
            let sub = (c * den[i] as u64) % p;
            let idx = rd - dd + i;
            rem[idx] = ((rem[idx] as u64 + p - sub) % p) as u32;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

fn poly_mul(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai as u64 * bj as u64 % p;
        }
    }
    let mut v: Vec<u32> = out.into_iter().map(|x| (x % p) as u32).collect();
    poly_trim(&mut v);
    v
}

fn poly_sub(a: &[u32], b: &[u32], p: u64) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut v = vec![0u32; n];
    for i in 0..n {
        let ai = *a.get(i).unwrap_or(&0) as u64;
        let bi = *b.get(i).unwrap_or(&0) as u64;
        v[i] = ((ai + p - bi) % p) as u32;
    }
    poly_trim(&mut v);
    v
}

/// Irreducibility over Z_p by exhaustive trial division: a reducible
/// polynomial of degree k has a monic factor of degree <= k/2, and p^(k/2)
/// stays tiny for every field in scope.
fn poly_irreducible(f: &[u32], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for c in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut v = c;
            for _ in 0..d {
                g.push((v % p) as u32);
                v /= p;
            }
            g.push(1);
            let (_, rem) = poly_divmod(f, &g, p);
            if rem.is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Build GF(p^k).  `modulus` is constant-term first of length k+1 and
    /// must be monic irreducible; `None` selects the default modulus: the
    /// monic irreducible of degree k whose non-leading coefficient vector
    /// packs to the smallest integer (so GF(8) gets x^3 + x + 1).
    pub fn new(p: u64, k: usize, modulus: Option<Vec<u32>>) -> Result<Field, FieldError> {
        // Size cap before primality: keeps trial division cheap on garbage.
        if p > MAX_FIELD_SIZE {
            return Err(FieldError::TooLarge(p, k));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::BadModulus("degree k must be >= 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).ok_or(FieldError::TooLarge(p, k))?;
            if q > MAX_FIELD_SIZE {
                return Err(FieldError::TooLarge(p, k));
            }
        }
        let p32 = p as u32;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k + 1 {
                    return Err(FieldError::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        k + 1,
                        m.len()
                    )));
                }
                if m[k] != 1 {
                    return Err(FieldError::BadModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p32) {
                    return Err(FieldError::BadModulus(format!(
                        "coefficients must be reduced mod {p}"
                    )));
                }
                if !poly_irreducible(&m, p) {
                    return Err(FieldError::ReducibleModulus(p));
                }
                m
            }
            None => Self::default_modulus(p, k),
        };

        let tag = fnv1a(
            &std::iter::once(p)
                .chain(std::iter::once(k as u64))
                .chain(modulus.iter().map(|&c| c as u64))
                .collect::<Vec<_>>(),
        );

        // x^k mod m = -(m_0 + m_1 x + ... + m_{k-1} x^{k-1}); higher powers by
        // one multiplication-by-x step each.
        let mut xred: Vec<Vec<u32>> = Vec::new();
        if k > 1 {
            let mut cur: Vec<u32> = (0..k).map(|i| (p32 - modulus[i]) % p32).collect();
            xred.push(cur.clone());
            for _ in 1..k {
                let top = cur[k - 1] as u64;
                let mut next = vec![0u32; k];
                for i in 1..k {
                    next[i] = cur[i - 1];
                }
                if top != 0 {
                    for i in 0..k {
                        next[i] =
                            ((next[i] as u64 + top * xred[0][i] as u64) % p) as u32;
                    }
                }
                xred.push(next.clone());
                cur = next;
            }
        }
        let xred_mask = if p == 2 {
            xred.iter()
                .map(|v| v.iter().enumerate().fold(0u32, |m, (i, &c)| m | (c << i)))
                .collect()
        } else {
            Vec::new()
        };

        let mut field = Field {
            p: p32,
            k,
            q: q as u32,
            modulus,
            tag,
            xred,
            xred_mask,
            artin: None,
            sqrt_aux: None,
        };

        if p == 2 {
            // Matrix of the F_2-linear map y -> y^2 + y in the monomial basis.
            let mut rows = vec![0u32; k];
            for j in 0..k {
                let ej = FieldElement { val: 1 << j, tag };
                let img = field.add(field.mul(ej, ej), ej);
                for (i, row) in rows.iter_mut().enumerate() {
                    *row |= ((img.val >> i) & 1) << j;
                }
            }
            field.artin = Some(ArtinSolver { rows });
        } else {
            let qm1 = q - 1;
            let e = qm1.trailing_zeros();
            let s = qm1 >> e;
            let half = qm1 / 2;
            let mut nonresidue = 0u32;
            for v in 2..q as u32 {
                let cand = FieldElement { val: v, tag };
                if field.pow(cand, half).val != 1 {
                    nonresidue = v;
                    break;
                }
            }
            // Every odd-order field with q > 3 has a non-residue above; q = 3
            // finds 2 as well.  q values in scope are all >= 2.
            field.sqrt_aux = Some(SqrtAux { nonresidue, e, s });
        }
        Ok(field)
    }

    fn default_modulus(p: u64, k: usize) -> Vec<u32> {
        if k == 1 {
            return vec![0, 1];
        }
        let count = (p as u64).pow(k as u32);
        for c in 0..count {
            let mut m = Vec::with_capacity(k + 1);
            let mut v = c;
            for _ in 0..k {
                m.push((v % p) as u32);
                v /= p;
            }
            m.push(1);
            if poly_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("irreducible polynomials exist in every degree");
    }

    /// Degree-`m` extension of this field with the default modulus over the
    /// same prime subfield.
    pub fn extension(&self, m: usize) -> Result<Field, FieldError> {
        Field::new(self.p as u64, self.k * m, None)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// Field size q = p^k.
    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn check(&self, a: FieldElement) {
        assert!(
            a.tag == self.tag,
            "field element belongs to a different field"
        );
        debug_assert!(a.val < self.q);
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { val: 0, tag: self.tag }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { val: 1, tag: self.tag }
    }

    /// Element with the given packed value / enumeration index.
    pub fn element(&self, index: u32) -> FieldElement {
        assert!(index < self.q, "index {index} out of range for {self}");
        FieldElement { val: index, tag: self.tag }
    }

    pub fn from_index(&self, index: u32) -> Option<FieldElement> {
        (index < self.q).then(|| FieldElement { val: index, tag: self.tag })
    }

    /// Image of an integer under Z -> Z_p -> GF(p^k).
    pub fn from_int(&self, n: u64) -> FieldElement {
        FieldElement { val: (n % self.p as u64) as u32, tag: self.tag }
    }

    /// All q elements in canonical order (0 first, then 1, ...).
    pub fn enumerate(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let tag = self.tag;
        (0..self.q).map(move |val| FieldElement { val, tag })
    }

    fn unpack(&self, val: u32) -> [u32; MAX_K] {
        let mut out = [0u32; MAX_K];
        if self.p == 2 {
            for (i, o) in out.iter_mut().enumerate().take(self.k) {
                *o = (val >> i) & 1;
            }
        } else {
            let mut v = val;
            for o in out.iter_mut().take(self.k) {
                *o = v % self.p;
                v /= self.p;
            }
        }
        out
    }

    fn pack(&self, coeffs: &[u32]) -> u32 {
        let mut val = 0u32;
        for i in (0..self.k).rev() {
            val = val * self.p + coeffs[i] % self.p;
        }
        val
    }

    /// Coefficient vector, constant term first, length k.
    pub fn to_coeffs(&self, a: FieldElement) -> Vec<u32> {
        self.check(a);
        self.unpack(a.val)[..self.k].to_vec()
    }

    /// Element from a constant-term-first coefficient vector of length k.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.k {
            return Err(FieldError::BadElement(format!(
                "expected {} coefficients, got {}",
                self.k,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadElement(format!(
                "coefficients must be reduced mod {}",
                self.p
            )));
        }
        Ok(FieldElement { val: self.pack(coeffs), tag: self.tag })
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if self.p == 2 {
            return FieldElement { val: a.val ^ b.val, tag: self.tag };
        }
        if self.k == 1 {
            let v = (a.val as u64 + b.val as u64) % self.p as u64;
            return FieldElement { val: v as u32, tag: self.tag };
        }
        let av = self.unpack(a.val);
        let bv = self.unpack(b.val);
        let mut out = [0u32; MAX_K];
        for i in 0..self.k {
            out[i] = (av[i] + bv[i]) % self.p;
        }
        FieldElement { val: self.pack(&out), tag: self.tag }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        if self.p == 2 {
            return a;
        }
        if self.k == 1 {
            return FieldElement { val: (self.p - a.val) % self.p, tag: self.tag };
        }
        let av = self.unpack(a.val);
        let mut out = [0u32; MAX_K];
        for i in 0..self.k {
            out[i] = (self.p - av[i]) % self.p;
        }
        FieldElement { val: self.pack(&out), tag: self.tag }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if self.k == 1 {
            let v = a.val as u64 * b.val as u64 % self.p as u64;
            return FieldElement { val: v as u32, tag: self.tag };
        }
        if self.p == 2 {
            // Carry-less multiply then fold the high bits with the reduction
            // masks; each fold only touches bits below k, so one pass is
            // enough.
            let mut prod: u64 = 0;
            let av = a.val as u64;
            for i in 0..self.k {
                if (b.val >> i) & 1 == 1 {
                    prod ^= av << i;
                }
            }
            for d in (self.k..=2 * self.k - 2).rev() {
                if (prod >> d) & 1 == 1 {
                    prod ^= 1u64 << d;
                    prod ^= self.xred_mask[d - self.k] as u64;
                }
            }
            return FieldElement { val: prod as u32, tag: self.tag };
        }
        let p = self.p as u64;
        let av = self.unpack(a.val);
        let bv = self.unpack(b.val);
        let mut acc = [0u64; 2 * MAX_K - 1];
        for i in 0..self.k {
            if av[i] == 0 {
                continue;
            }
            for j in 0..self.k {
                acc[i + j] += av[i] as u64 * bv[j] as u64;
            }
        }
        let mut low = [0u64; MAX_K];
        low[..self.k].copy_from_slice(&acc[..self.k]);
        for d in self.k..=2 * self.k - 2 {
            let c = acc[d] % p;
            if c != 0 {
                let red = &self.xred[d - self.k];
                for i in 0..self.k {
                    low[i] += c * red[i] as u64;
                }
            }
        }
        let mut out = [0u32; MAX_K];
        for i in 0..self.k {
            out[i] = (low[i] % p) as u32;
        }
        FieldElement { val: self.pack(&out), tag: self.tag }
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        self.check(a);
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via extended Euclid on polynomials.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        self.check(a);
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let p = self.p as u64;
        if self.k == 1 {
            return Ok(FieldElement {
                val: inv_mod(a.val as u64, p) as u32,
                tag: self.tag,
            });
        }
        let mut acoeffs: Vec<u32> = self.unpack(a.val)[..self.k].to_vec();
        poly_trim(&mut acoeffs);
        let mut r0 = self.modulus.clone();
        let mut r1 = acoeffs;
        let mut t0: Vec<u32> = Vec::new();
        let mut t1: Vec<u32> = vec![1];
        while r1.len() > 1 {
            let (quot, rem) = poly_divmod(&r0, &r1, p);
            let t = poly_sub(&t0, &poly_mul(&quot, &t1, p), p);
            r0 = std::mem::replace(&mut r1, rem);
            t0 = std::mem::replace(&mut t1, t);
        }
        debug_assert_eq!(r1.len(), 1, "modulus irreducible, gcd must be constant");
        let cinv = inv_mod(r1[0] as u64, p);
        let mut out = [0u32; MAX_K];
        for (i, &c) in t1.iter().enumerate() {
            out[i] = (c as u64 * cinv % p) as u32;
        }
        Ok(FieldElement { val: self.pack(&out), tag: self.tag })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square root.  Always exists in characteristic 2 (inverse Frobenius);
    /// in odd characteristic returns `None` for non-squares.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        self.check(a);
        if a.is_zero() {
            return Some(a);
        }
        if self.p == 2 {
            return Some(self.pow(a, self.q as u64 / 2));
        }
        let aux = self.sqrt_aux.as_ref().unwrap();
        let qm1 = self.q as u64 - 1;
        if self.pow(a, qm1 / 2).val != 1 {
            return None;
        }
        // Tonelli-Shanks.
        let mut m = aux.e;
        let mut c = self.pow(self.element(aux.nonresidue), aux.s);
        let mut t = self.pow(a, aux.s);
        let mut r = self.pow(a, (aux.s + 1) / 2);
        loop {
            if t.is_one() {
                return Some(r);
            }
            let mut i = 0u32;
            let mut tt = t;
            while !tt.is_one() {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let b = self.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
    }

    /// Absolute trace to F_2 (characteristic 2 only), returned as 0 or 1.
    pub fn trace2(&self, a: FieldElement) -> u32 {
        assert_eq!(self.p, 2, "trace2 is specific to characteristic 2");
        self.check(a);
        let mut acc = a;
        let mut t = a;
        for _ in 1..self.k {
            t = self.mul(t, t);
            acc = self.add(acc, t);
        }
        debug_assert!(acc.val <= 1);
        acc.val
    }

    fn artin_solve(&self, d: FieldElement) -> Option<FieldElement> {
        let solver = self.artin.as_ref().unwrap();
        let k = self.k;
        // Augmented Gaussian elimination on k rows of k+1 bits.
        let mut rows: Vec<u64> = solver
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| r as u64 | ((((d.val >> i) & 1) as u64) << k))
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut rank = 0usize;
        for col in 0..k {
            if let Some(r) = (rank..k).find(|&r| (rows[r] >> col) & 1 == 1) {
                rows.swap(rank, r);
                let prow = rows[rank];
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != rank && (*row >> col) & 1 == 1 {
                        *row ^= prow;
                    }
                }
                pivots.push((rank, col));
                rank += 1;
            }
        }
        // Inconsistent system: a remaining row 0...0 | 1.
        if rows[rank..].iter().any(|&r| (r >> k) & 1 == 1) {
            return None;
        }
        let mut y = 0u32;
        for &(row, col) in &pivots {
            if (rows[row] >> k) & 1 == 1 {
                y |= 1 << col;
            }
        }
        Some(FieldElement { val: y, tag: self.tag })
    }

    /// Roots of x^2 + b*x + c, as a multiset of size 0 or 2 (double roots
    /// appear twice), sorted by packed value.
    ///
    /// Odd characteristic uses the discriminant and Tonelli-Shanks; in
    /// characteristic 2, b = 0 gives the unique square root twice and b != 0
    /// reduces to the Artin-Schreier equation y^2 + y = c/b^2, solvable
    /// exactly when the absolute trace of c/b^2 vanishes.
    pub fn solve_quadratic(&self, b: FieldElement, c: FieldElement) -> Vec<FieldElement> {
        self.check(b);
        self.check(c);
        if self.p == 2 {
            if b.is_zero() {
                let r = self.sqrt(c).unwrap();
                return vec![r, r];
            }
            let binv = self.inv(b).unwrap();
            let d = self.mul(c, self.mul(binv, binv));
            if self.trace2(d) != 0 {
                return Vec::new();
            }
            let y = self.artin_solve(d).expect("trace-zero element is solvable");
            let mut roots = vec![self.mul(b, y), self.mul(b, self.add(y, self.one()))];
            roots.sort();
            return roots;
        }
        let disc = self.sub(self.mul(b, b), self.mul(self.from_int(4), c));
        let inv2 = self.inv(self.from_int(2)).unwrap();
        if disc.is_zero() {
            let r = self.mul(self.neg(b), inv2);
            return vec![r, r];
        }
        match self.sqrt(disc) {
            None => Vec::new(),
            Some(s) => {
                let mut roots = vec![
                    self.mul(self.add(self.neg(b), s), inv2),
                    self.mul(self.sub(self.neg(b), s), inv2),
                ];
                roots.sort();
                roots
            }
        }
    }
}

/// Fixed embedding GF(p^k) -> GF(p^{k*m}): the source generator x maps to the
/// smallest root (in canonical element order) of the source modulus inside
/// the target field.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: Field,
    tgt: Field,
    root: FieldElement,
}

impl Embedding {
    pub fn new(src: &Field, tgt: &Field) -> Result<Embedding, FieldError> {
        if src.p != tgt.p {
            return Err(FieldError::BadEmbedding(format!(
                "different characteristics {} and {}",
                src.p, tgt.p
            )));
        }
        if tgt.k % src.k != 0 {
            return Err(FieldError::BadEmbedding(format!(
                "degree {} does not divide degree {}",
                src.k, tgt.k
            )));
        }
        let root = tgt
            .enumerate()
            .find(|&r| {
                let mut acc = tgt.zero();
                for &c in src.modulus.iter().rev() {
                    acc = tgt.add(tgt.mul(acc, r), tgt.from_int(c as u64));
                }
                acc.is_zero()
            })
            .ok_or(FieldError::NoEmbeddingRoot)?;
        Ok(Embedding { src: src.clone(), tgt: tgt.clone(), root })
    }

    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn target(&self) -> &Field {
        &self.tgt
    }

    pub fn apply(&self, a: FieldElement) -> FieldElement {
        self.src.check(a);
        let coeffs = self.src.unpack(a.val);
        let mut acc = self.tgt.zero();
        for i in (0..self.src.k).rev() {
            acc = self.tgt.add(
                self.tgt.mul(acc, self.root),
                self.tgt.from_int(coeffs[i] as u64),
            );
        }
        acc
    }
}
