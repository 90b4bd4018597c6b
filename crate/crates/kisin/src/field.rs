//! The coefficient field `k = GF(p^f)` in polynomial-basis representation.
//!
//! A [`FinField`] owns the arithmetic: elements ([`FFElt`]) are plain
//! indices in vector encoding (`sum c_i a^i` is stored as the integer
//! `sum c_i p^i` where `a` is the class of the generator of the defining
//! quotient).  Multiplication goes through discrete-log tables, which keeps
//! the series and matrix layers fast for the small fields this crate
//! targets (`p^f` up to `2^16`).

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported field size `p^f`.
const MAX_Q: u64 = 1 << 16;

/// Defining data of `GF(p^f)`: the characteristic, the extension degree and
/// a monic irreducible modulus of degree `f` over `GF(p)`.
///
/// Coefficients of `modulus` are listed from the constant term up and
/// include the leading `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u32,
    pub f: u32,
    pub modulus: Vec<u32>,
}

impl FieldParams {
    /// Prime-field parameters (`f = 1`, modulus `x`).
    pub fn prime(p: u32) -> Self {
        FieldParams { p, f: 1, modulus: vec![0, 1] }
    }
}

/// An element of `GF(p^f)` in vector encoding.  Only meaningful relative to
/// the [`FinField`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FFElt(pub u32);

impl FFElt {
    pub const ZERO: FFElt = FFElt(0);
    pub const ONE: FFElt = FFElt(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Arithmetic context for `GF(p^f)`.
///
/// Construction checks that `p` is prime and the modulus is a monic
/// irreducible polynomial of degree `f`, then builds exponential/logarithm
/// tables with respect to a multiplicative generator.
pub struct FinField {
    params: FieldParams,
    q: u32,
    /// exp[i] = g^i for i in 0..q-1, g a fixed generator.
    exp: Vec<u32>,
    /// log[x] for x in 1..q, with log[exp[i]] = i.
    log: Vec<u32>,
    /// Frobenius table: frob[x] = x^p.
    frob: Vec<u32>,
}

impl fmt::Debug for FinField {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "FinField(p={}, f={})", self.params.p, self.params.f)
    }
}

impl PartialEq for FinField {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}
impl Eq for FinField {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n as u64 {
        if n as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// --- small polynomial arithmetic over GF(p), used only at construction ---

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for i in 0..=dm {
            let idx = k + i;
            let sub = (c as u64 * m[i] as u64 % p as u64) as u32;
            r[idx] = (r[idx] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(base: &[u32], mut n: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = poly_rem(base, m, p);
    while n > 0 {
        if n & 1 == 1 {
            result = poly_mulmod(&result, &b, m, p);
        }
        b = poly_mulmod(&b, &b, m, p);
        n >>= 1;
    }
    result
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mod_inv(a: u32, p: u32) -> u32 {
    // p is prime and a != 0 mod p.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut n = p as u64 - 2;
    while n > 0 {
        if n & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        n >>= 1;
    }
    result as u32
}

/// Irreducibility over GF(p) via the standard criterion:
/// `x^(p^f) = x (mod m)` and `gcd(x^(p^(f/l)) - x, m) = 1` for every prime
/// `l` dividing `f`.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let f = m.len() - 1;
    if f == 0 {
        return false;
    }
    let x = vec![0u32, 1];
    // x^(p^f) mod m by repeated p-th powers.
    let mut xp = x.clone();
    for _ in 0..f {
        xp = poly_powmod(&xp, p as u64, m, p);
    }
    let mut diff = xp.clone();
    // diff = x^(p^f) - x
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // prime divisors of f
    let mut ff = f;
    let mut l = 2usize;
    while l * l <= ff {
        if ff % l == 0 {
            while ff % l == 0 {
                ff /= l;
            }
            if !irreducible_subcheck(m, p, f / l) {
                return false;
            }
        }
        l += 1;
    }
    if ff > 1 && ff < f + 1 && !irreducible_subcheck(m, p, f / ff) {
        return false;
    }
    true
}

fn irreducible_subcheck(m: &[u32], p: u32, k: usize) -> bool {
    let x = vec![0u32, 1];
    let mut xp = x.clone();
    for _ in 0..k {
        xp = poly_powmod(&xp, p as u64, m, p);
    }
    let mut diff = xp;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if diff.is_empty() {
        return false; // x^(p^k) = x would mean m splits over a subfield
    }
    let g = poly_gcd(&diff, m, p);
    g.len() == 1
}

impl FinField {
    /// Builds the field from explicit parameters.
    pub fn new(params: FieldParams) -> Result<Arc<FinField>> {
        let p = params.p;
        let f = params.f;
        if !is_prime(p) {
            return Err(Error::BadFieldParams("p is not prime".to_string()));
        }
        if f == 0 {
            return Err(Error::BadFieldParams("f must be at least 1".to_string()));
        }
        let q128 = (p as u64).checked_pow(f);
        let q = match q128 {
            Some(q) if q <= MAX_Q => q as u32,
            _ => return Err(Error::BadFieldParams("p^f too large".to_string())),
        };
        if params.modulus.len() != f as usize + 1 {
            return Err(Error::BadFieldParams("modulus degree must equal f".to_string()));
        }
        if params.modulus.last() != Some(&1) {
            return Err(Error::BadFieldParams("modulus must be monic".to_string()));
        }
        if params.modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadFieldParams("modulus coefficients must lie in 0..p".to_string()));
        }
        if f > 1 && !is_irreducible(&params.modulus, p) {
            return Err(Error::BadFieldParams("modulus is reducible".to_string()));
        }

        // Raw product in vector encoding via polynomial multiplication mod modulus.
        let decode = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(f as usize);
            let mut t = x;
            for _ in 0..f {
                v.push(t % p);
                t /= p;
            }
            poly_trim(&mut v);
            v
        };
        let encode = |v: &[u32]| -> u32 {
            let mut x = 0u32;
            for &c in v.iter().rev() {
                x = x * p + c;
            }
            x
        };
        let raw_mul = |a: u32, b: u32| -> u32 {
            let pa = decode(a);
            let pb = decode(b);
            encode(&poly_mulmod(&pa, &pb, &params.modulus, p))
        };

        // Find a multiplicative generator by scanning elements.
        let order = q - 1;
        let mut generator = 0u32;
        'outer: for cand in 2..q.max(3) {
            if cand >= q {
                break;
            }
            let mut x = cand;
            let mut n = 1u32;
            while x != 1 {
                x = raw_mul(x, cand);
                n += 1;
                if n > order {
                    continue 'outer;
                }
            }
            if n == order {
                generator = cand;
                break;
            }
        }
        if generator == 0 {
            if q == 2 {
                generator = 1;
            } else {
                return Err(Error::BadFieldParams("no generator found".to_string()));
            }
        }

        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = raw_mul(x, generator);
        }

        let mut field = FinField { params, q, exp, log, frob: Vec::new() };
        let mut frob = vec![0u32; q as usize];
        for v in 0..q {
            let mut acc = FFElt(v);
            let mut result = FFElt::ONE;
            let mut n = p;
            while n > 0 {
                if n & 1 == 1 {
                    result = field.mul(result, acc);
                }
                acc = field.mul(acc, acc);
                n >>= 1;
            }
            frob[v as usize] = result.0;
        }
        field.frob = frob;
        Ok(Arc::new(field))
    }

    /// `GF(p)` with the trivial modulus.
    pub fn prime(p: u32) -> Result<Arc<FinField>> {
        FinField::new(FieldParams::prime(p))
    }

    /// `GF(p^f)` with the lexicographically first monic irreducible modulus.
    pub fn extension(p: u32, f: u32) -> Result<Arc<FinField>> {
        if f == 1 {
            return FinField::prime(p);
        }
        if !is_prime(p) {
            return Err(Error::BadFieldParams("p is not prime".to_string()));
        }
        let count = (p as u64)
            .checked_pow(f)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::BadFieldParams("p^f too large".to_string()))?;
        for tail in 0..count {
            let mut modulus = Vec::with_capacity(f as usize + 1);
            let mut t = tail;
            for _ in 0..f {
                modulus.push((t % p as u64) as u32);
                t /= p as u64;
            }
            modulus.push(1);
            if is_irreducible(&modulus, p) {
                return FinField::new(FieldParams { p, f, modulus });
            }
        }
        Err(Error::BadFieldParams("no irreducible modulus found".to_string()))
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn f(&self) -> u32 {
        self.params.f
    }

    /// Field size `q = p^f`.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Element from an integer (reduced mod p, inside the prime field).
    pub fn from_int(&self, n: i64) -> FFElt {
        let p = self.params.p as i64;
        FFElt(n.rem_euclid(p) as u32)
    }

    /// The class `a` of the polynomial generator (only interesting for f > 1).
    pub fn gen_elt(&self) -> FFElt {
        if self.params.f == 1 {
            FFElt::ONE
        } else {
            FFElt(self.params.p)
        }
    }

    /// `a^k` for the polynomial generator `a`.
    pub fn gen_pow(&self, k: u32) -> FFElt {
        let mut x = FFElt::ONE;
        for _ in 0..k {
            x = self.mul(x, self.gen_elt());
        }
        x
    }

    pub fn add(&self, a: FFElt, b: FFElt) -> FFElt {
        let p = self.params.p;
        let mut x = a.0;
        let mut y = b.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.params.f {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FFElt(out)
    }

    pub fn neg(&self, a: FFElt) -> FFElt {
        let p = self.params.p;
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.params.f {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FFElt(out)
    }

    pub fn sub(&self, a: FFElt, b: FFElt) -> FFElt {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FFElt, b: FFElt) -> FFElt {
        if a.is_zero() || b.is_zero() {
            return FFElt::ZERO;
        }
        let order = self.q - 1;
        let i = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        FFElt(self.exp[(i % order as u64) as usize])
    }

    pub fn inv(&self, a: FFElt) -> Result<FFElt> {
        if a.is_zero() {
            return Err(Error::ZeroToPrecision);
        }
        let order = self.q - 1;
        let i = self.log[a.0 as usize];
        Ok(FFElt(self.exp[((order - i) % order) as usize]))
    }

    /// Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: FFElt) -> FFElt {
        FFElt(self.frob[a.0 as usize])
    }

    /// `x -> x^(p^k)`.
    pub fn frobenius_pow(&self, a: FFElt, k: u32) -> FFElt {
        let mut x = a;
        for _ in 0..k {
            x = self.frobenius(x);
        }
        x
    }

    pub fn pow(&self, a: FFElt, n: u64) -> FFElt {
        if a.is_zero() {
            return if n == 0 { FFElt::ONE } else { FFElt::ZERO };
        }
        let order = (self.q - 1) as u64;
        let i = self.log[a.0 as usize] as u64;
        FFElt(self.exp[((i * (n % order)) % order) as usize])
    }

    /// All field elements, zero first.
    pub fn elements(&self) -> impl Iterator<Item = FFElt> + '_ {
        (0..self.q).map(FFElt)
    }

    /// Dimension over GF(p) of the subfield fixed by `x -> x^(p^d)`,
    /// i.e. of `k` intersected with `GF(p^d)`.
    pub fn subfield_degree(&self, d: u32) -> u32 {
        gcd(self.params.f, d)
    }

    /// Renders an element as a polynomial in the generator `a`.
    pub fn format_elt(&self, x: FFElt) -> alloc::string::String {
        use core::fmt::Write;
        let p = self.params.p;
        if self.params.f == 1 || x.0 < p {
            return x.0.to_string();
        }
        let mut parts: Vec<alloc::string::String> = Vec::new();
        let mut t = x.0;
        for i in 0..self.params.f {
            let c = t % p;
            t /= p;
            if c == 0 {
                continue;
            }
            let mut s = alloc::string::String::new();
            match (c, i) {
                (_, 0) => write!(s, "{c}").unwrap(),
                (1, 1) => write!(s, "a").unwrap(),
                (1, _) => write!(s, "a^{i}").unwrap(),
                (_, 1) => write!(s, "{c}*a").unwrap(),
                (_, _) => write!(s, "{c}*a^{i}").unwrap(),
            }
            parts.push(s);
        }
        parts.join("+")
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_field_axioms(field: &FinField) {
        let elts: Vec<FFElt> = field.elements().collect();
        for &a in &elts {
            assert_eq!(field.add(a, FFElt::ZERO), a);
            assert_eq!(field.mul(a, FFElt::ONE), a);
            assert_eq!(field.add(a, field.neg(a)), FFElt::ZERO);
            // x^(p^f) = x
            assert_eq!(field.frobenius_pow(a, field.f()), a);
            if !a.is_zero() {
                assert_eq!(field.mul(a, field.inv(a).unwrap()), FFElt::ONE);
            }
            for &b in &elts {
                assert_eq!(field.add(a, b), field.add(b, a));
                assert_eq!(field.mul(a, b), field.mul(b, a));
                // Frobenius is additive and multiplicative
                assert_eq!(
                    field.frobenius(field.add(a, b)),
                    field.add(field.frobenius(a), field.frobenius(b))
                );
                assert_eq!(
                    field.frobenius(field.mul(a, b)),
                    field.mul(field.frobenius(a), field.frobenius(b))
                );
                for &c in &elts {
                    assert_eq!(field.mul(a, field.add(b, c)), field.add(field.mul(a, b), field.mul(a, c)));
                    assert_eq!(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_all_small_fields() {
        // exhaustive for p^f <= 81
        for (p, f) in [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (7, 1), (7, 2), (79, 1)] {
            let field = FinField::extension(p, f).unwrap();
            if field.q() <= 81 {
                check_field_axioms(&field);
            } else {
                // spot-check larger ones
                let a = field.gen_elt();
                assert_eq!(field.frobenius_pow(a, field.f()), a);
                assert_eq!(field.mul(a, field.inv(a).unwrap()), FFElt::ONE);
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FinField::prime(4).is_err());
        assert!(FinField::prime(1).is_err());
        // x^2 + 1 is reducible over GF(2)
        assert!(FinField::new(FieldParams { p: 2, f: 2, modulus: vec![1, 0, 1] }).is_err());
        // x^2 + x + 1 is irreducible over GF(2)
        assert!(FinField::new(FieldParams { p: 2, f: 2, modulus: vec![1, 1, 1] }).is_ok());
    }

    #[test]
    fn subfield_degrees() {
        let f4 = FinField::extension(2, 2).unwrap();
        assert_eq!(f4.subfield_degree(2), 2);
        assert_eq!(f4.subfield_degree(1), 1);
        assert_eq!(f4.subfield_degree(3), 1);
        let f8 = FinField::extension(2, 3).unwrap();
        assert_eq!(f8.subfield_degree(2), 1);
        assert_eq!(f8.subfield_degree(6), 3);
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let field = FinField::extension(3, 2).unwrap();
        for n in 0..3 {
            let x = field.from_int(n);
            assert_eq!(field.frobenius(x), x);
        }
        // and moves the generator (a^3 != a in GF(9))
        let a = field.gen_elt();
        assert_ne!(field.frobenius(a), a);
    }
}
