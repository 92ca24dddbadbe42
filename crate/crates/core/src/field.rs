//! Finite fields GF(p^k), sesqui-morphisms and the quadratic extension that
//! turns arbitrary edge-colored graphs into sigma-symmetric ones.
//!
//! Elements are integer codes: the element `c_0 + c_1 a + ... + c_{k-1} a^{k-1}`
//! (with `a` the class of `X` modulo the field's modulus) has code
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. Code 0 is zero and code 1 is one.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Integer code of a field element.
pub type Elem = u32;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Orders up to this bound get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// A finite field GF(p^k) given by a monic irreducible modulus over GF(p).
///
/// Cheap to clone; all clones share the same tables.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

struct FieldData {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    pows: Vec<u32>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    exp: Vec<Elem>,
    log: Vec<u32>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn checked_order(p: u32, k: u32) -> Result<u32> {
    let mut q: u64 = 1;
    for _ in 0..k {
        q *= u64::from(p);
        if q > u64::from(MAX_ORDER) {
            return Err(Error::OrderTooLarge { p, k });
        }
    }
    Ok(q as u32)
}

// Polynomials over GF(p), coefficients low degree first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = (r[top] * lead_inv) % p;
        if c != 0 {
            for i in 0..=dm {
                let j = top - dm + i;
                r[j] = (r[j] + p - (c * m[i]) % p) % p;
            }
        }
        r.pop();
        r = poly_trim(r);
    }
    poly_trim(r)
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = u64::from(a % p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % u64::from(p);
        }
        b = b * b % u64::from(p);
        e >>= 1;
    }
    r as u32
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg == 0 || m[deg] != 1 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for low in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = low;
            for _ in 0..d {
                div.push(c % p);
                c /= p;
            }
            div.push(1);
            if poly_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// GF(p^k) with the canonical modulus: the monic irreducible polynomial of
    /// degree `k` whose coefficient vector has the smallest base-p code.
    pub fn new(p: u32, k: u32) -> Result<Field> {
        let modulus = Self::canonical_modulus(p, k)?;
        Self::with_modulus(p, &modulus)
    }

    /// Shorthand for a prime field.
    pub fn prime(p: u32) -> Result<Field> {
        Self::new(p, 1)
    }

    pub fn canonical_modulus(p: u32, k: u32) -> Result<Vec<u32>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let low_count = checked_order(p, k)?;
        for low in 0..low_count {
            let mut m = Vec::with_capacity(k as usize + 1);
            let mut c = low;
            for _ in 0..k {
                m.push(c % p);
                c /= p;
            }
            m.push(1);
            if is_irreducible(&m, p) {
                return Ok(m);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// GF(p)[X] / (modulus); `modulus` lists coefficients from degree 0 up.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(Error::ZeroDegree);
        }
        let k = (modulus.len() - 1) as u32;
        let q = checked_order(p, k)?;
        if modulus.iter().any(|&c| c >= p) || !is_irreducible(modulus, p) {
            return Err(Error::BadModulus(k as usize));
        }
        let mut data = FieldData {
            p,
            k,
            q,
            modulus: modulus.to_vec(),
            pows: (0..=k).map(|i| p.pow(i)).collect(),
            add: Vec::new(),
            mul: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            inv: Vec::new(),
        };
        data.neg = (0..q).map(|a| data.neg_slow(a)).collect();
        if q <= TABLE_LIMIT {
            let n = q as usize;
            data.add = vec![0; n * n];
            data.mul = vec![0; n * n];
            for a in 0..q {
                for b in 0..q {
                    data.add[a as usize * n + b as usize] = data.add_slow(a, b);
                    data.mul[a as usize * n + b as usize] = data.mul_slow(a, b);
                }
            }
            data.inv = vec![0; n];
            for a in 1..q {
                let b = (1..q)
                    .find(|&b| data.mul[a as usize * n + b as usize] == 1)
                    .expect("nonzero elements are invertible");
                data.inv[a as usize] = b;
            }
        } else {
            data.build_log_tables();
        }
        Ok(Field(Arc::new(data)))
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.0.q
    }

    pub fn nonzero(&self) -> std::ops::Range<Elem> {
        1..self.0.q
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.0.q
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::BadElement(a))
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let d = &self.0;
        if d.add.is_empty() {
            d.add_slow(a, b)
        } else {
            d.add[(a * d.q + b) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.0.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let d = &self.0;
        if !d.mul.is_empty() {
            return d.mul[(a * d.q + b) as usize];
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let s = (d.log[a as usize] + d.log[b as usize]) % (d.q - 1);
        d.exp[s as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            None
        } else {
            Some(self.0.inv[a as usize])
        }
    }

    /// `a / b`. Panics when `b` is zero; callers guarantee a nonzero divisor.
    #[inline]
    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b).expect("division by zero field element"))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, i: i64) -> Elem {
        i.rem_euclid(i64::from(self.0.p)) as Elem
    }

    /// Base-p coefficient vector of an element, length `k`.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        self.0.digits(a)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        self.0.from_digits(digits)
    }

    /// The Frobenius map `x -> x^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, u64::from(self.0.p))
    }

    /// Short display name such as `GF(4)`.
    pub fn name(&self) -> String {
        format!("GF({})", self.0.q)
    }
}

impl FieldData {
    fn digits(&self, mut a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    fn from_digits(&self, digits: &[u32]) -> Elem {
        digits
            .iter()
            .zip(&self.pows)
            .map(|(&c, &w)| c * w)
            .sum()
    }

    fn add_slow(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return a ^ b;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        self.from_digits(&s)
    }

    fn neg_slow(&self, a: Elem) -> Elem {
        let d: Vec<u32> = self
            .digits(a)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        self.from_digits(&d)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let (da, db) = (self.digits(a), self.digits(b));
        let k = self.k as usize;
        let mut prod = vec![0u32; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(k, 0);
        self.from_digits(&r)
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let mut factors = Vec::new();
        let mut m = order;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                factors.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        let pow_slow = |data: &FieldData, a: Elem, mut e: u32| {
            let mut r = 1;
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    r = data.mul_slow(r, b);
                }
                b = data.mul_slow(b, b);
                e >>= 1;
            }
            r
        };
        let generator = (2..q)
            .find(|&g| factors.iter().all(|&f| pow_slow(self, g, order / f) != 1))
            .expect("the multiplicative group is cyclic");
        self.exp = vec![0; order as usize];
        self.log = vec![0; q as usize];
        let mut x = 1;
        for i in 0..order {
            self.exp[i as usize] = x;
            self.log[x as usize] = i;
            x = self.mul_slow(x, generator);
        }
        self.inv = vec![0; q as usize];
        for a in 1..q {
            let l = self.log[a as usize];
            self.inv[a as usize] = self.exp[((order - l) % order) as usize];
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; modulus {:?})", self.0.p, self.0.k, self.0.modulus)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "field {} {}", self.0.p, self.0.k)
    }
}

/// True iff `table` is an involution on the field whose normalization
/// `x -> table[x] / table[1]` is a field automorphism. Decided exhaustively.
pub fn sesqui_check(field: &Field, table: &[Elem]) -> Result<bool> {
    let q = field.order() as usize;
    if table.len() != q {
        return Err(Error::TableSize {
            got: table.len(),
            expected: q,
        });
    }
    if let Some(&bad) = table.iter().find(|&&v| !field.contains(v)) {
        return Err(Error::BadElement(bad));
    }
    let s = |a: Elem| table[a as usize];
    if field.elements().any(|a| s(s(a)) != a) {
        return Ok(false);
    }
    let s1 = s(1);
    let Some(s1_inv) = field.inv(s1) else {
        return Ok(false);
    };
    let norm = |a: Elem| field.mul(s(a), s1_inv);
    for a in field.elements() {
        for b in field.elements() {
            if norm(field.add(a, b)) != field.add(norm(a), norm(b))
                || norm(field.mul(a, b)) != field.mul(norm(a), norm(b))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An involution `sigma` on a field with `x -> sigma(x)/sigma(1)` an automorphism.
#[derive(Clone, PartialEq, Eq)]
pub struct Sesquimorphism {
    field: Field,
    table: Vec<Elem>,
}

impl Sesquimorphism {
    pub fn new(field: &Field, table: Vec<Elem>) -> Result<Self> {
        if sesqui_check(field, &table)? {
            Ok(Sesquimorphism {
                field: field.clone(),
                table,
            })
        } else {
            Err(Error::NotSesquimorphism)
        }
    }

    pub fn identity(field: &Field) -> Self {
        Sesquimorphism {
            field: field.clone(),
            table: field.elements().collect(),
        }
    }

    /// `x -> -x` (the identity in characteristic 2).
    pub fn negation(field: &Field) -> Self {
        Sesquimorphism {
            field: field.clone(),
            table: field.elements().map(|a| field.neg(a)).collect(),
        }
    }

    /// Conjugation `x -> x^(p^(k/2))` of GF(p^k) over GF(p^(k/2)).
    pub fn frobenius_conjugation(field: &Field) -> Result<Self> {
        let k = field.degree();
        if k % 2 != 0 {
            return Err(Error::OddDegree(k));
        }
        let e = u64::from(field.characteristic()).pow(k / 2);
        Ok(Sesquimorphism {
            field: field.clone(),
            table: field.elements().map(|a| field.pow(a, e)).collect(),
        })
    }

    /// Parses `id`, `neg`, `frob-inv` or a whitespace separated list of codes.
    pub fn parse(field: &Field, spec: &str) -> Result<Self> {
        let words: Vec<&str> = spec.split_whitespace().collect();
        match words.as_slice() {
            ["id"] => Ok(Self::identity(field)),
            ["neg"] => Ok(Self::negation(field)),
            ["frob-inv"] => Self::frobenius_conjugation(field),
            codes => {
                let mut table = Vec::with_capacity(codes.len());
                for c in codes {
                    let v: u32 = c
                        .parse()
                        .map_err(|_| Error::Unsupported(format!("sigma spec {spec:?}")))?;
                    table.push(v);
                }
                Self::new(field, table)
            }
        }
    }

    /// Shortest textual form accepted by [`Sesquimorphism::parse`].
    pub fn spec_string(&self) -> String {
        if *self == Self::identity(&self.field) {
            return "id".into();
        }
        if *self == Self::negation(&self.field) {
            return "neg".into();
        }
        if let Ok(c) = Self::frobenius_conjugation(&self.field) {
            if c == *self {
                return "frob-inv".into();
            }
        }
        self.table
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.table[a as usize]
    }

    pub fn sigma_one(&self) -> Elem {
        self.table[1]
    }

    /// `lambda` is compatible iff `sigma(lambda) = lambda * sigma(1)^2`.
    pub fn is_compatible(&self, lambda: Elem) -> Result<bool> {
        self.field.check(lambda)?;
        if lambda == 0 {
            return Err(Error::ZeroLambda);
        }
        let f = &self.field;
        let s1 = self.sigma_one();
        Ok(self.apply(lambda) == f.mul(lambda, f.mul(s1, s1)))
    }

    pub fn compatible_set(&self) -> Vec<Elem> {
        self.field
            .nonzero()
            .filter(|&l| self.is_compatible(l).unwrap_or(false))
            .collect()
    }
}

impl fmt::Debug for Sesquimorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma {} over {}", self.spec_string(), self.field.name())
    }
}

/// The degree-two extension `F[X] / (X^2 - p(X+1))` together with the
/// coordinates `gamma`, `tau` and the swap `sigma~(a gamma + b tau) = b gamma + a tau`.
#[derive(Clone, Debug)]
pub struct QuadraticExtension {
    base: Field,
    ext: Field,
    embedding: Vec<Elem>,
    p_elt: Elem,
    alpha: Elem,
    gamma: Elem,
    tau: Elem,
    sigma_tilde: Sesquimorphism,
    split: Vec<(Elem, Elem)>,
}

impl QuadraticExtension {
    /// Builds the extension. `p_elt` is the smallest nonzero code making
    /// `X^2 - p(X+1)` rootless over the base.
    ///
    /// Over a prime base the extension uses that polynomial itself as its
    /// modulus. Over a non-prime base it is realized as GF(p^{2k}) with the
    /// canonical modulus, the base embedded through a root of its own modulus.
    pub fn new(base: &Field) -> Result<Self> {
        let f = base;
        let p_elt = f
            .nonzero()
            .find(|&pe| {
                f.elements()
                    .all(|r| f.mul(r, r) != f.mul(pe, f.add(r, 1)))
            })
            .expect("a rootless X^2 - p(X+1) always exists over a finite field");
        let pchar = f.characteristic();
        let (ext, embedding, alpha) = if f.is_prime_field() {
            let minus_p = f.neg(p_elt);
            let ext = Field::with_modulus(pchar, &[minus_p, minus_p, 1])?;
            let embedding: Vec<Elem> = f.elements().collect();
            (ext, embedding, pchar)
        } else {
            let ext = Field::new(pchar, 2 * f.degree())?;
            let m = f.modulus();
            let root = ext
                .elements()
                .find(|&r| {
                    let mut acc = 0;
                    for &c in m.iter().rev() {
                        acc = ext.add(ext.mul(acc, r), c);
                    }
                    acc == 0
                })
                .expect("the base modulus splits in the extension");
            let embedding: Vec<Elem> = f
                .elements()
                .map(|a| {
                    let mut acc = 0;
                    for &c in f.digits(a).iter().rev() {
                        acc = ext.add(ext.mul(acc, root), c);
                    }
                    acc
                })
                .collect();
            let pe = embedding[p_elt as usize];
            let alpha = ext
                .elements()
                .find(|&x| ext.mul(x, x) == ext.mul(pe, ext.add(x, 1)))
                .expect("X^2 - p(X+1) splits in the extension");
            (ext, embedding, alpha)
        };
        let pe_inv = ext
            .inv(embedding[p_elt as usize])
            .expect("p is nonzero");
        let tau = ext.mul(pe_inv, alpha);
        let gamma = ext.sub(1, tau);
        let q2 = ext.order() as usize;
        let mut split = vec![(u32::MAX, u32::MAX); q2];
        for a in f.elements() {
            for b in f.elements() {
                let v = ext.add(
                    ext.mul(embedding[a as usize], gamma),
                    ext.mul(embedding[b as usize], tau),
                );
                split[v as usize] = (a, b);
            }
        }
        debug_assert!(split.iter().all(|&(a, _)| a != u32::MAX));
        let table: Vec<Elem> = (0..q2)
            .map(|v| {
                let (a, b) = split[v];
                ext.add(
                    ext.mul(embedding[b as usize], gamma),
                    ext.mul(embedding[a as usize], tau),
                )
            })
            .collect();
        let sigma_tilde = Sesquimorphism::new(&ext, table)?;
        Ok(QuadraticExtension {
            base: base.clone(),
            ext,
            embedding,
            p_elt,
            alpha,
            gamma,
            tau,
            sigma_tilde,
            split,
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn ext(&self) -> &Field {
        &self.ext
    }

    pub fn p_elt(&self) -> Elem {
        self.p_elt
    }

    pub fn alpha(&self) -> Elem {
        self.alpha
    }

    pub fn gamma(&self) -> Elem {
        self.gamma
    }

    pub fn tau(&self) -> Elem {
        self.tau
    }

    pub fn sigma_tilde(&self) -> &Sesquimorphism {
        &self.sigma_tilde
    }

    /// Image of a base element inside the extension.
    pub fn embed(&self, a: Elem) -> Elem {
        self.embedding[a as usize]
    }

    /// `f~(a, b) = a gamma + b tau`.
    pub fn f_tilde(&self, a: Elem, b: Elem) -> Elem {
        let e = &self.ext;
        e.add(e.mul(self.embed(a), self.gamma), e.mul(self.embed(b), self.tau))
    }

    /// Inverse of [`QuadraticExtension::f_tilde`]: the unique `(a, b)`.
    pub fn coordinates(&self, v: Elem) -> (Elem, Elem) {
        self.split[v as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.order(), 2);
        assert_eq!(f2.add(1, 1), 0);
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.mul(2, 2), 1);
        assert_eq!(f3.neg(1), 2);
    }

    #[test]
    fn gf4_has_a_cube_root_of_unity() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let a = 2;
        let a2 = f.mul(a, a);
        assert_eq!(a2, 3);
        assert_eq!(f.add(1, f.add(a, a2)), 0);
        assert_eq!(f.mul(a2, a), 1);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(2, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(
            Field::new(2, 17).unwrap_err(),
            Error::OrderTooLarge { .. }
        ));
        assert!(Field::new(2, 16).is_ok());
        assert!(matches!(
            Field::with_modulus(2, &[1, 0, 1]).unwrap_err(),
            Error::BadModulus(2)
        ));
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(Field::canonical_modulus(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(Field::canonical_modulus(2, 3).unwrap(), vec![1, 1, 0, 1]);
        assert_eq!(Field::canonical_modulus(5, 1).unwrap(), vec![0, 1]);
    }

    fn check_axioms(f: &Field) {
        for a in f.elements() {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements() {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn field_axioms_up_to_order_64() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (2, 5), (2, 6), (3, 3), (7, 2)] {
            check_axioms(&Field::new(p, k).unwrap());
        }
    }

    #[test]
    fn large_field_uses_log_tables_consistently() {
        let f = Field::new(2, 10).unwrap();
        let g = Field::new(3, 6).unwrap();
        for fld in [f, g] {
            let data = &fld.0;
            for a in (0..fld.order()).step_by(37) {
                for b in (0..fld.order()).step_by(53) {
                    assert_eq!(fld.mul(a, b), data.mul_slow(a, b));
                }
            }
        }
    }

    #[test]
    fn sesqui_examples() {
        let f2 = Field::new(2, 1).unwrap();
        assert!(sesqui_check(&f2, &[0, 1]).unwrap());
        let f4 = Field::new(2, 2).unwrap();
        assert!(sesqui_check(&f4, &[0, 1, 3, 2]).unwrap());
        assert!(!sesqui_check(&f4, &[0, 1, 2, 2]).unwrap());
        assert_eq!(
            Sesquimorphism::frobenius_conjugation(&f4).unwrap().table(),
            &[0, 1, 3, 2]
        );
        let f3 = Field::new(3, 1).unwrap();
        assert!(sesqui_check(&f3, &[0, 2, 1]).unwrap());
        assert!(matches!(
            sesqui_check(&f3, &[0, 1]),
            Err(Error::TableSize { .. })
        ));
        assert_eq!(sesqui_check(&f3, &[0, 1, 7]), Err(Error::BadElement(7)));
        // a scaled identity x -> 2x is a sesqui-morphism over GF(3) as well
        assert!(sesqui_check(&f3, &[0, 2, 1]).unwrap());
        let f5 = Field::new(5, 1).unwrap();
        // x -> 2x is not an involution over GF(5)
        assert!(!sesqui_check(&f5, &[0, 2, 4, 1, 3]).unwrap());
    }

    #[test]
    fn compatibility() {
        let f4 = Field::new(2, 2).unwrap();
        let s4 = Sesquimorphism::frobenius_conjugation(&f4).unwrap();
        assert!(s4.is_compatible(1).unwrap());
        assert!(!s4.is_compatible(2).unwrap());
        assert!(!s4.is_compatible(3).unwrap());
        assert_eq!(s4.compatible_set(), vec![1]);
        let f3 = Field::new(3, 1).unwrap();
        let neg = Sesquimorphism::negation(&f3);
        assert!(!neg.is_compatible(1).unwrap());
        assert!(!neg.is_compatible(2).unwrap());
        assert!(neg.compatible_set().is_empty());
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(Sesquimorphism::identity(&f2).compatible_set(), vec![1]);
        assert_eq!(neg.is_compatible(0), Err(Error::ZeroLambda));
    }

    #[test]
    fn sigma_parse_round_trip() {
        let f4 = Field::new(2, 2).unwrap();
        for spec in ["id", "frob-inv", "0 1 3 2"] {
            let s = Sesquimorphism::parse(&f4, spec).unwrap();
            assert_eq!(Sesquimorphism::parse(&f4, &s.spec_string()).unwrap(), s);
        }
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(Sesquimorphism::parse(&f3, "neg").unwrap().spec_string(), "neg");
        assert!(Sesquimorphism::parse(&f3, "frob-inv").is_err());
    }

    #[test]
    fn extension_of_gf2_is_gf4() {
        let f2 = Field::new(2, 1).unwrap();
        let qe = QuadraticExtension::new(&f2).unwrap();
        assert_eq!(qe.p_elt(), 1);
        assert_eq!(qe.ext().modulus(), &[1, 1, 1]);
        assert_eq!(*qe.ext(), Field::new(2, 2).unwrap());
        let e = qe.ext();
        assert_eq!(qe.gamma(), e.add(1, qe.alpha()));
        assert_eq!(qe.tau(), qe.alpha());
        assert_eq!(qe.f_tilde(1, 1), 1);
    }

    #[test]
    fn extension_of_gf3() {
        let f3 = Field::new(3, 1).unwrap();
        let qe = QuadraticExtension::new(&f3).unwrap();
        assert_eq!(qe.p_elt(), 1);
        // X^2 - X - 1
        assert_eq!(qe.ext().modulus(), &[2, 2, 1]);
        assert_eq!(qe.ext().order(), 9);
    }

    #[test]
    fn extension_of_gf4_embeds_base() {
        let f4 = Field::new(2, 2).unwrap();
        let qe = QuadraticExtension::new(&f4).unwrap();
        let e = qe.ext();
        assert_eq!(e.order(), 16);
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(qe.embed(f4.add(a, b)), e.add(qe.embed(a), qe.embed(b)));
                assert_eq!(qe.embed(f4.mul(a, b)), e.mul(qe.embed(a), qe.embed(b)));
            }
        }
        assert_eq!(e.add(qe.gamma(), qe.tau()), 1);
    }
}
