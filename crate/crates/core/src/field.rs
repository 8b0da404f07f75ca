//! Finite fields `F_{p^n}` and towers of extensions over them.
//!
//! A [`FieldCtx`] is a cheap, shareable handle. Elements are plain `Copy`
//! values that carry the tag of the field they belong to; every operation
//! goes through the context and checks that tag.
//!
//! Internally an element is a packed vector of its absolute coordinates over
//! the prime field, `bits` bits per digit, lowest degree first. For a tower
//! `K[t]/(m)` over `K` the packing is the concatenation of the base
//! coordinates, so a base element embeds into the extension unchanged. The
//! external integer encoding is `sum c_i p^i` over the same digits.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::UniPoly;

const MAX_PRIME: u64 = 1 << 31;
const MAX_EXT_PRIME: u64 = 1 << 20;
const MAX_DIGITS: usize = 128;
/// Extension fields up to this order multiply through log tables.
const TABLE_ORDER: u128 = 1 << 10;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    raw: u128,
    tag: u32,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.raw == 0
    }

    /// Packed representation, only meaningful together with its field.
    pub fn raw(&self) -> u128 {
        self.raw
    }

    pub fn tag(&self) -> u32 {
        self.tag
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({:#x})", self.raw)
    }
}

#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

struct Inner {
    tag: u32,
    p: u64,
    bits: u32,
    degree: u32,
    order: u128,
    layer: Layer,
    generator: u128,
    seed: u64,
    tables: Option<Tables>,
}

/// Discrete log and exponential tables over raw encodings.
struct Tables {
    log: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2 (q - 1)`.
    exp: Vec<u32>,
}

enum Layer {
    Prime,
    /// `F_2[t]/(m)`, `poly` holds all bits of `m` including the leading one.
    Binary { n: u32, poly: u128 },
    /// `F_p[t]/(m)` for odd `p`; `neg_low[i]` is `-m_i mod p`.
    OverPrime { n: usize, neg_low: Vec<u64> },
    /// `K[t]/(m)` over a non-prime `K`; `neg_low` holds base raws of `-m_i`.
    Tower { base: FieldCtx, n: usize, neg_low: Vec<u128> },
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.tag == other.0.tag
    }
}
impl Eq for FieldCtx {}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.0.tag.hash(h)
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self.descriptor())
    }
}

fn fnv(mut h: u64, x: u128) -> u64 {
    for b in x.to_le_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn smallest_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut m = p - 1;
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    (2..p)
        .find(|&g| primes.iter().all(|&r| pow_mod_u64(g, (p - 1) / r, p) != 1))
        .expect("prime fields have primitive roots")
}

impl FieldCtx {
    pub fn prime(p: u64) -> Result<FieldCtx> {
        if p >= MAX_PRIME {
            return Err(Error::FieldTooLarge(format!("prime {p} exceeds 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let bits = 64 - (p - 1).leading_zeros();
        Ok(FieldCtx(Arc::new(Inner {
            tag: fnv(0xcbf2_9ce4_8422_2325, p as u128) as u32,
            p,
            bits: bits.max(1),
            degree: 1,
            order: p as u128,
            layer: Layer::Prime,
            generator: smallest_primitive_root(p) as u128,
            seed: p,
            tables: None,
        })))
    }

    /// `F_{p^n}`; when `modulus` (ascending, monic, length `n + 1`) is omitted a
    /// modulus is found by deterministic search.
    pub fn new(p: u64, n: u32, modulus: Option<&[u64]>) -> Result<FieldCtx> {
        let prime = FieldCtx::prime(p)?;
        if n == 0 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        match modulus {
            None if n == 1 => Ok(prime),
            None => FieldCtx::extension_of_degree(&prime, n as usize),
            Some(m) => {
                if m.len() != n as usize + 1 {
                    return Err(Error::BadModulus(format!(
                        "expected {} coefficients, got {}",
                        n + 1,
                        m.len()
                    )));
                }
                if n == 1 {
                    if m[1] % p != 1 {
                        return Err(Error::BadModulus("modulus is not monic".into()));
                    }
                    return Ok(prime);
                }
                let coeffs: Vec<FieldElement> =
                    m.iter().map(|&c| prime.from_u64(c % p)).collect();
                let poly = UniPoly::new(&prime, coeffs);
                FieldCtx::extension(&prime, &poly)
            }
        }
    }

    /// Parses `p[:n[:c0,c1,...,1]]`.
    pub fn from_descriptor(text: &str) -> Result<FieldCtx> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let num = |s: &str, pos: usize| -> Result<u64> {
            s.trim().parse::<u64>().map_err(|_| Error::Parse {
                pos,
                msg: format!("expected an integer, found {s:?}"),
            })
        };
        if parts.is_empty() || parts.len() > 3 {
            return Err(Error::Parse { pos: 0, msg: "expected p[:n[:modulus]]".into() });
        }
        let p = num(parts[0], 0)?;
        let n = if parts.len() > 1 { num(parts[1], parts[0].len() + 1)? as u32 } else { 1 };
        if parts.len() == 3 {
            let offset = parts[0].len() + parts[1].len() + 2;
            let coeffs = parts[2]
                .split(',')
                .map(|c| num(c, offset))
                .collect::<Result<Vec<u64>>>()?;
            FieldCtx::new(p, n, Some(&coeffs))
        } else {
            FieldCtx::new(p, n, None)
        }
    }

    /// `base[t]/(modulus)`; the modulus must be monic, irreducible, degree >= 2.
    pub fn extension(base: &FieldCtx, modulus: &UniPoly) -> Result<FieldCtx> {
        if modulus.ctx() != base {
            return Err(Error::BadModulus("modulus lives over a different field".into()));
        }
        let n = modulus.degree().unwrap_or(0);
        if n < 2 {
            return Err(Error::BadModulus("degree must be at least 2".into()));
        }
        if !base.is_one(modulus.leading()) {
            return Err(Error::BadModulus("modulus is not monic".into()));
        }
        if !modulus.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        FieldCtx::extension_unchecked(base, modulus)
    }

    /// As [`FieldCtx::extension`] for a modulus already known to be irreducible.
    pub(crate) fn extension_unchecked(base: &FieldCtx, modulus: &UniPoly) -> Result<FieldCtx> {
        let n = modulus.degree().expect("nonzero modulus");
        let modulus = modulus.monic();
        let degree = base.degree() * n as u32;
        let bits = base.0.bits;
        let p = base.0.p;
        if (degree as u64) * (bits as u64) > 128 || (p == 2 && degree > 64) {
            return Err(Error::FieldTooLarge(format!("{p}^{degree}")));
        }
        if p >= MAX_EXT_PRIME {
            return Err(Error::FieldTooLarge(format!("extensions of F_{p} are not supported")));
        }
        let order = base.order().pow(n as u32);
        let mut h = fnv(0x84222325 ^ base.0.tag as u64, n as u128);
        for c in modulus.coeffs() {
            h = fnv(h, c.raw);
        }
        let tag = (h ^ (h >> 32)) as u32;
        let base_bits = bits * base.degree();
        let layer = match base.0.layer {
            Layer::Prime if p == 2 => {
                let mut poly = 0u128;
                for (i, c) in modulus.coeffs().iter().enumerate() {
                    poly |= c.raw << i;
                }
                Layer::Binary { n: n as u32, poly }
            }
            Layer::Prime => Layer::OverPrime {
                n,
                neg_low: modulus.coeffs()[..n]
                    .iter()
                    .map(|c| base.neg(*c).raw as u64)
                    .collect(),
            },
            _ => Layer::Tower {
                base: base.clone(),
                n,
                neg_low: modulus.coeffs()[..n].iter().map(|c| base.neg(*c).raw).collect(),
            },
        };
        let mut ctx = FieldCtx(Arc::new(Inner {
            tag,
            p,
            bits,
            degree,
            order,
            layer,
            generator: 1u128 << base_bits,
            seed: h,
            tables: None,
        }));
        if order <= TABLE_ORDER && bits * degree <= 16 {
            let t = ctx.build_tables();
            Arc::get_mut(&mut ctx.0).expect("fresh context").tables = Some(t);
        }
        Ok(ctx)
    }

    /// Log tables from the first primitive element in encoding order.
    fn build_tables(&self) -> Tables {
        let q1 = (self.0.order - 1) as usize;
        let size = 1usize << (self.0.bits * self.0.degree);
        let mut exp = vec![0u32; 2 * q1];
        for v in 1..self.0.order {
            let g = self.from_encoding_unchecked(v).raw;
            let mut x = 1u128;
            let mut ok = true;
            for (i, slot) in exp.iter_mut().take(q1).enumerate() {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                *slot = x as u32;
                x = self.raw_mul(x, g);
            }
            if ok {
                let mut log = vec![0u32; size];
                for i in 0..q1 {
                    exp[q1 + i] = exp[i];
                    log[exp[i] as usize] = i as u32;
                }
                return Tables { log, exp };
            }
        }
        unreachable!("finite fields have primitive elements")
    }

    /// Smallest (in encoding order of the lower coefficients) monic
    /// irreducible of degree `k` over `base`, and the extension it defines.
    pub fn extension_of_degree(base: &FieldCtx, k: usize) -> Result<FieldCtx> {
        if k == 1 {
            return Ok(base.clone());
        }
        let bits = (k as u64) * base.degree() as u64 * base.0.bits as u64;
        if bits > 128 {
            return Err(Error::FieldTooLarge(format!("degree {k} over {}", base.descriptor())));
        }
        let q = base.order();
        let mut counter = vec![0u128; k];
        loop {
            let mut coeffs: Vec<FieldElement> =
                counter.iter().map(|&c| base.from_encoding_unchecked(c)).collect();
            coeffs.push(base.one());
            let poly = UniPoly::new(base, coeffs);
            if poly.is_irreducible() {
                return FieldCtx::extension_unchecked(base, &poly);
            }
            let mut i = 0;
            loop {
                counter[i] += 1;
                if counter[i] < q {
                    break;
                }
                counter[i] = 0;
                i += 1;
                if i == k {
                    return Err(Error::Invalid("no irreducible polynomial found".into()));
                }
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    /// Absolute degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn order(&self) -> u128 {
        self.0.order
    }

    pub fn tag(&self) -> u32 {
        self.0.tag
    }

    pub fn seed(&self) -> u64 {
        self.0.seed
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self.0.layer, Layer::Prime)
    }

    /// Immediate base field, `None` for a prime field.
    pub fn base(&self) -> Option<FieldCtx> {
        match &self.0.layer {
            Layer::Prime => None,
            Layer::Binary { .. } | Layer::OverPrime { .. } => {
                Some(FieldCtx::prime(self.0.p).expect("valid prime"))
            }
            Layer::Tower { base, .. } => Some(base.clone()),
        }
    }

    /// Degree over the immediate base.
    pub fn relative_degree(&self) -> usize {
        match &self.0.layer {
            Layer::Prime => 1,
            Layer::Binary { n, .. } => *n as usize,
            Layer::OverPrime { n, .. } | Layer::Tower { n, .. } => *n,
        }
    }

    /// The defining polynomial over the immediate base.
    pub fn modulus(&self) -> Option<UniPoly> {
        let base = self.base()?;
        let n = self.relative_degree();
        let mut coeffs: Vec<FieldElement> = match &self.0.layer {
            Layer::Prime => unreachable!(),
            Layer::Binary { poly, .. } => {
                (0..n).map(|i| base.from_u64(((poly >> i) & 1) as u64)).collect()
            }
            Layer::OverPrime { neg_low, .. } => {
                neg_low.iter().map(|&c| base.neg(base.from_u64(c))).collect()
            }
            Layer::Tower { neg_low, .. } => neg_low
                .iter()
                .map(|&c| base.neg(FieldElement { raw: c, tag: base.0.tag }))
                .collect(),
        };
        coeffs.push(base.one());
        Some(UniPoly::new(&base, coeffs))
    }

    /// `p`, `p:n:c0,...,1`, or for towers `base/[c0,...,1]` with base encodings.
    pub fn descriptor(&self) -> String {
        match &self.0.layer {
            Layer::Prime => self.0.p.to_string(),
            Layer::Binary { .. } | Layer::OverPrime { .. } => {
                let m = self.modulus().expect("extension");
                let cs: Vec<String> =
                    m.coeffs().iter().map(|c| self.base_encoding_str(c)).collect();
                format!("{}:{}:{}", self.0.p, self.0.degree, cs.join(","))
            }
            Layer::Tower { base, .. } => {
                let m = self.modulus().expect("extension");
                let cs: Vec<String> =
                    m.coeffs().iter().map(|c| base.encoding(*c).to_string()).collect();
                format!("{}/[{}]", base.descriptor(), cs.join(","))
            }
        }
    }

    fn base_encoding_str(&self, c: &FieldElement) -> String {
        (c.raw).to_string()
    }

    #[inline]
    fn check(&self, a: FieldElement) {
        assert_eq!(
            a.tag,
            self.0.tag,
            "field element used with a different field context ({})",
            self.descriptor()
        );
    }

    #[inline]
    fn wrap(&self, raw: u128) -> FieldElement {
        FieldElement { raw, tag: self.0.tag }
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    pub fn is_one(&self, a: FieldElement) -> bool {
        self.check(a);
        a.raw == 1
    }

    /// The class of `t` for an extension, the smallest primitive root for a
    /// prime field.
    pub fn generator(&self) -> FieldElement {
        self.wrap(self.0.generator)
    }

    pub fn from_u64(&self, v: u64) -> FieldElement {
        self.wrap((v % self.0.p) as u128)
    }

    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.0.p as i64;
        self.wrap(v.rem_euclid(p) as u128)
    }

    /// Integer encoding `sum c_i p^i` of the absolute coordinates.
    pub fn encoding(&self, a: FieldElement) -> u128 {
        self.check(a);
        if self.0.p == 2 || self.0.degree == 1 {
            return a.raw;
        }
        let mask = (1u128 << self.0.bits) - 1;
        let mut v = 0u128;
        for i in (0..self.0.degree).rev() {
            v = v * self.0.p as u128 + ((a.raw >> (i * self.0.bits)) & mask);
        }
        v
    }

    pub fn from_encoding(&self, v: u128) -> Result<FieldElement> {
        if v >= self.0.order {
            return Err(Error::Invalid(format!(
                "element encoding {v} out of range for {}",
                self.descriptor()
            )));
        }
        Ok(self.from_encoding_unchecked(v))
    }

    fn from_encoding_unchecked(&self, mut v: u128) -> FieldElement {
        if self.0.p == 2 || self.0.degree == 1 {
            return self.wrap(v);
        }
        let p = self.0.p as u128;
        let mut raw = 0u128;
        for i in 0..self.0.degree {
            raw |= (v % p) << (i * self.0.bits);
            v /= p;
        }
        self.wrap(raw)
    }

    /// Coordinates over the immediate base.
    pub fn coordinates(&self, a: FieldElement) -> Vec<FieldElement> {
        self.check(a);
        let base = match self.base() {
            None => return vec![a],
            Some(b) => b,
        };
        let w = base.0.bits * base.0.degree;
        let mask = (1u128 << w) - 1;
        (0..self.relative_degree())
            .map(|i| base.wrap((a.raw >> (i as u32 * w)) & mask))
            .collect()
    }

    pub fn from_coordinates(&self, coords: &[FieldElement]) -> FieldElement {
        let base = match self.base() {
            None => return coords[0],
            Some(b) => b,
        };
        assert!(coords.len() <= self.relative_degree());
        let w = base.0.bits * base.0.degree;
        let mut raw = 0u128;
        for (i, c) in coords.iter().enumerate() {
            base.check(*c);
            raw |= c.raw << (i as u32 * w);
        }
        self.wrap(raw)
    }

    /// Whether `other` is this field or one of its ancestors in the tower.
    pub fn contains_field(&self, other: &FieldCtx) -> bool {
        let mut cur = Some(self.clone());
        while let Some(c) = cur {
            if c.0.tag == other.0.tag {
                return true;
            }
            cur = c.base();
        }
        false
    }

    /// Embeds an element of a subfield in the tower.
    pub fn lift(&self, a: FieldElement) -> FieldElement {
        if a.tag == self.0.tag {
            return a;
        }
        let mut cur = self.base();
        while let Some(c) = cur {
            if c.0.tag == a.tag {
                return self.wrap(a.raw);
            }
            cur = c.base();
        }
        panic!("element does not belong to a subfield of {}", self.descriptor());
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        self.wrap(self.raw_add(a.raw, b.raw))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        self.wrap(self.raw_add(a.raw, self.raw_neg(b.raw)))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.check(a);
        self.wrap(self.raw_neg(a.raw))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        self.wrap(self.raw_mul(a.raw, b.raw))
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, e: u128) -> FieldElement {
        self.check(a);
        self.wrap(self.raw_pow(a.raw, e))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a);
        if a.raw == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.wrap(self.raw_inv(a.raw)))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        let bi = self.inv(b)?;
        Ok(self.mul(a, bi))
    }

    /// `x -> x^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.0.p as u128)
    }

    /// Inverse of the Frobenius: `x^(p^(n-1))`.
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.0.order / self.0.p as u128)
    }

    /// Whether `a` is a square in this field (always true when `q` is even).
    pub fn is_square(&self, a: FieldElement) -> bool {
        if self.0.p == 2 || a.is_zero() {
            return true;
        }
        self.is_one(self.pow(a, (self.0.order - 1) / 2))
    }

    /// Trace down to the prime field, as an integer in `[0, p)`.
    pub fn absolute_trace(&self, a: FieldElement) -> u64 {
        let mut acc = self.zero();
        let mut x = a;
        for _ in 0..self.0.degree {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        self.encoding(acc) as u64
    }

    /// Multiplicative scalar from the prime field.
    pub fn mul_int(&self, a: FieldElement, k: i64) -> FieldElement {
        self.mul(a, self.from_int(k))
    }

    /// All `q` elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let q = self.0.order;
        (0..q).map(move |v| self.from_encoding_unchecked(v))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let v = rng.gen_range(0..self.0.order);
        self.from_encoding_unchecked(v)
    }

    fn raw_add(&self, a: u128, b: u128) -> u128 {
        match &self.0.layer {
            Layer::Prime => {
                let s = a + b;
                if s >= self.0.p as u128 {
                    s - self.0.p as u128
                } else {
                    s
                }
            }
            Layer::Binary { .. } => a ^ b,
            Layer::OverPrime { .. } => {
                let (bits, p) = (self.0.bits, self.0.p as u128);
                let mask = (1u128 << bits) - 1;
                let mut r = 0u128;
                for i in 0..self.0.degree {
                    let sh = i * bits;
                    let mut s = ((a >> sh) & mask) + ((b >> sh) & mask);
                    if s >= p {
                        s -= p;
                    }
                    r |= s << sh;
                }
                r
            }
            Layer::Tower { base, n, .. } => {
                let w = base.0.bits * base.0.degree;
                let mask = (1u128 << w) - 1;
                let mut r = 0u128;
                for i in 0..*n as u32 {
                    let sh = i * w;
                    r |= base.raw_add((a >> sh) & mask, (b >> sh) & mask) << sh;
                }
                r
            }
        }
    }

    fn raw_neg(&self, a: u128) -> u128 {
        match &self.0.layer {
            Layer::Prime => {
                if a == 0 {
                    0
                } else {
                    self.0.p as u128 - a
                }
            }
            Layer::Binary { .. } => a,
            Layer::OverPrime { .. } => {
                let (bits, p) = (self.0.bits, self.0.p as u128);
                let mask = (1u128 << bits) - 1;
                let mut r = 0u128;
                for i in 0..self.0.degree {
                    let sh = i * bits;
                    let d = (a >> sh) & mask;
                    if d != 0 {
                        r |= (p - d) << sh;
                    }
                }
                r
            }
            Layer::Tower { base, n, .. } => {
                let w = base.0.bits * base.0.degree;
                let mask = (1u128 << w) - 1;
                let mut r = 0u128;
                for i in 0..*n as u32 {
                    let sh = i * w;
                    r |= base.raw_neg((a >> sh) & mask) << sh;
                }
                r
            }
        }
    }

    fn raw_mul(&self, a: u128, b: u128) -> u128 {
        if let Some(t) = &self.0.tables {
            if a == 0 || b == 0 {
                return 0;
            }
            return t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u128;
        }
        match &self.0.layer {
            Layer::Prime => ((a as u64) * (b as u64) % self.0.p) as u128,
            Layer::Binary { n, poly } => {
                let mut r = 0u128;
                let mut x = a;
                let mut y = b;
                while y != 0 {
                    if y & 1 == 1 {
                        r ^= x;
                    }
                    x <<= 1;
                    y >>= 1;
                }
                let n = *n;
                if r >> n != 0 {
                    for i in (n..2 * n - 1).rev() {
                        if (r >> i) & 1 == 1 {
                            r ^= poly << (i - n);
                        }
                    }
                }
                r
            }
            Layer::OverPrime { n, neg_low } => {
                let n = *n;
                let (bits, p) = (self.0.bits, self.0.p);
                let mask = (1u128 << bits) - 1;
                let mut da = [0u64; MAX_DIGITS];
                let mut db = [0u64; MAX_DIGITS];
                for i in 0..n {
                    da[i] = ((a >> (i as u32 * bits)) & mask) as u64;
                    db[i] = ((b >> (i as u32 * bits)) & mask) as u64;
                }
                let mut prod = [0u64; 2 * MAX_DIGITS];
                for i in 0..n {
                    if da[i] == 0 {
                        continue;
                    }
                    for j in 0..n {
                        prod[i + j] += da[i] * db[j];
                    }
                }
                for k in (n..2 * n - 1).rev() {
                    let c = prod[k] % p;
                    if c != 0 {
                        for j in 0..n {
                            prod[k - n + j] += c * neg_low[j];
                        }
                    }
                }
                let mut r = 0u128;
                for (i, v) in prod.iter().enumerate().take(n) {
                    r |= ((v % p) as u128) << (i as u32 * bits);
                }
                r
            }
            Layer::Tower { base, n, neg_low } => {
                let n = *n;
                let w = base.0.bits * base.0.degree;
                let mask = (1u128 << w) - 1;
                let ca: Vec<u128> = (0..n).map(|i| (a >> (i as u32 * w)) & mask).collect();
                let cb: Vec<u128> = (0..n).map(|i| (b >> (i as u32 * w)) & mask).collect();
                let mut prod = vec![0u128; 2 * n - 1];
                for i in 0..n {
                    if ca[i] == 0 {
                        continue;
                    }
                    for j in 0..n {
                        if cb[j] != 0 {
                            prod[i + j] = base.raw_add(prod[i + j], base.raw_mul(ca[i], cb[j]));
                        }
                    }
                }
                for k in (n..2 * n - 1).rev() {
                    let c = prod[k];
                    if c != 0 {
                        for j in 0..n {
                            prod[k - n + j] =
                                base.raw_add(prod[k - n + j], base.raw_mul(c, neg_low[j]));
                        }
                    }
                }
                let mut r = 0u128;
                for (i, v) in prod.iter().enumerate().take(n) {
                    r |= v << (i as u32 * w);
                }
                r
            }
        }
    }

    fn raw_pow(&self, a: u128, mut e: u128) -> u128 {
        if let Some(t) = &self.0.tables {
            if a == 0 {
                return u128::from(e == 0);
            }
            let q1 = self.0.order - 1;
            return t.exp[(t.log[a as usize] as u128 * (e % q1) % q1) as usize] as u128;
        }
        let mut r = 1u128;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.raw_mul(r, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.raw_mul(b, b);
            }
        }
        r
    }

    fn raw_inv(&self, a: u128) -> u128 {
        match &self.0.layer {
            Layer::Prime => {
                let p = self.0.p as i64;
                let (mut r0, mut r1) = (p, a as i64);
                let (mut s0, mut s1) = (0i64, 1i64);
                while r1 != 0 {
                    let qt = r0 / r1;
                    (r0, r1) = (r1, r0 - qt * r1);
                    (s0, s1) = (s1, s0 - qt * s1);
                }
                s0.rem_euclid(p) as u128
            }
            _ => self.raw_pow(a, self.0.order - 2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f9() -> FieldCtx {
        FieldCtx::new(3, 2, Some(&[2, 2, 1])).unwrap()
    }

    #[test]
    fn prime_field_basics() {
        let f3 = FieldCtx::prime(3).unwrap();
        let els: Vec<u128> = f3.elements().map(|e| f3.encoding(e)).collect();
        assert_eq!(els, vec![0, 1, 2]);
        let two = f3.from_u64(2);
        assert_eq!(f3.pth_root(two), two);
        assert_eq!(f3.inv(two).unwrap(), two);
        assert_eq!(f3.inv(f3.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn squares_and_traces_by_counting() {
        for k in [FieldCtx::prime(7).unwrap(), f9(), FieldCtx::new(2, 4, None).unwrap()] {
            let q = k.order();
            let sq: std::collections::HashSet<u128> =
                k.elements().map(|x| k.encoding(k.square(x))).collect();
            for x in k.elements() {
                assert_eq!(k.is_square(x), sq.contains(&k.encoding(x)));
            }
            let zero_trace = k.elements().filter(|&x| k.absolute_trace(x) == 0).count() as u128;
            assert_eq!(zero_trace * k.characteristic() as u128, q);
        }
    }

    #[test]
    fn not_prime_is_rejected() {
        assert_eq!(FieldCtx::prime(9).unwrap_err(), Error::NotPrime(9));
        assert!(FieldCtx::from_descriptor("81").is_err());
    }

    #[test]
    fn f9_generator_relation() {
        let f = f9();
        let a = f.generator();
        assert_eq!(f.encoding(a), 3);
        assert_eq!(f.mul(a, a), f.add(a, f.one()));
        let first: Vec<u128> = f.elements().take(5).map(|e| f.encoding(e)).collect();
        assert_eq!(first, vec![0, 1, 2, 3, 4]);
        assert_eq!(f.elements().count(), 9);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 + 2 = (t + 1)(t + 2) over F_3
        assert_eq!(FieldCtx::new(3, 2, Some(&[2, 0, 1])).unwrap_err(), Error::NotIrreducible);
        assert!(matches!(FieldCtx::new(3, 2, Some(&[2, 0, 2])), Err(Error::BadModulus(_))));
    }

    #[test]
    fn f32_lagrange() {
        let f = FieldCtx::new(2, 5, Some(&[1, 0, 1, 0, 0, 1])).unwrap();
        assert_eq!(f.order(), 32);
        for g in f.elements().skip(1) {
            assert_eq!(f.pow(g, 31), f.one());
        }
        // default search lands on the same modulus
        let g = FieldCtx::new(2, 5, None).unwrap();
        assert_eq!(g.descriptor(), "2:5:1,0,1,0,0,1");
    }

    #[test]
    fn pth_root_inverts_frobenius_exhaustively() {
        for f in [f9(), FieldCtx::new(3, 3, None).unwrap(), FieldCtx::new(2, 6, None).unwrap()] {
            for v in f.elements() {
                let r = f.pth_root(v);
                assert_eq!(f.frobenius(r), v);
                let mut x = v;
                for _ in 0..f.degree() {
                    x = f.frobenius(x);
                }
                assert_eq!(x, v);
            }
        }
        let f = f9();
        for v in f.elements() {
            assert_eq!(f.pth_root(v), f.pow(v, 3));
        }
    }

    #[test]
    fn tower_lifts_and_arithmetic() {
        let f9 = f9();
        let k = FieldCtx::extension_of_degree(&f9, 3).unwrap();
        assert_eq!(k.order(), 729);
        assert_eq!(k.degree(), 6);
        let a = f9.generator();
        let la = k.lift(a);
        assert_eq!(k.mul(la, la), k.add(la, k.one()));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = k.random(&mut rng);
            if !x.is_zero() {
                assert_eq!(k.mul(x, k.inv(x).unwrap()), k.one());
            }
            assert_eq!(k.pow(x, 729), x);
        }
    }

    #[test]
    fn encoding_round_trip_and_descriptor() {
        let f = FieldCtx::from_descriptor("3:2:2,2,1").unwrap();
        for v in 0..9u128 {
            assert_eq!(f.encoding(f.from_encoding(v).unwrap()), v);
        }
        assert_eq!(f.descriptor(), "3:2:2,2,1");
        assert!(f.from_encoding(9).is_err());
    }

    #[test]
    #[should_panic(expected = "different field context")]
    fn mixing_contexts_panics() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f5 = FieldCtx::prime(5).unwrap();
        f3.add(f3.one(), f5.one());
    }

    fn field_axioms(f: &FieldCtx, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.sub(f.add(a, b), b), a);
            assert_eq!(f.add(a, f.zero()), a);
            assert_eq!(f.mul(a, f.one()), a);
        }
    }

    #[test]
    fn axioms_on_random_triples() {
        for d in ["2", "3", "5", "127", "2:4", "3:2:2,2,1", "3:3", "5:2", "2:13", "7:3"] {
            field_axioms(&FieldCtx::from_descriptor(d).unwrap(), 11);
        }
        let f4 = FieldCtx::new(2, 2, None).unwrap();
        field_axioms(&FieldCtx::extension_of_degree(&f4, 3).unwrap(), 5);
    }
}
