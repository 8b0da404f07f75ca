use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};

/// Dense univariate polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    ctx: FieldCtx,
    c: Vec<FieldElement>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let enc: Vec<u128> = self.c.iter().map(|e| self.ctx.encoding(*e)).collect();
        write!(f, "UniPoly{enc:?}")
    }
}

impl UniPoly {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<FieldElement>) -> UniPoly {
        let mut p = UniPoly { ctx: ctx.clone(), c: coeffs };
        p.trim();
        p
    }

    pub fn from_ints(ctx: &FieldCtx, coeffs: &[i64]) -> UniPoly {
        UniPoly::new(ctx, coeffs.iter().map(|&v| ctx.from_int(v)).collect())
    }

    pub fn zero(ctx: &FieldCtx) -> UniPoly {
        UniPoly { ctx: ctx.clone(), c: Vec::new() }
    }

    pub fn one(ctx: &FieldCtx) -> UniPoly {
        UniPoly::constant(ctx, ctx.one())
    }

    pub fn constant(ctx: &FieldCtx, a: FieldElement) -> UniPoly {
        UniPoly::new(ctx, vec![a])
    }

    /// `c * t^k`
    pub fn monomial(ctx: &FieldCtx, c: FieldElement, k: usize) -> UniPoly {
        let mut v = vec![ctx.zero(); k + 1];
        v[k] = c;
        UniPoly::new(ctx, v)
    }

    /// The polynomial `t`.
    pub fn var(ctx: &FieldCtx) -> UniPoly {
        UniPoly::monomial(ctx, ctx.one(), 1)
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|c| c.is_zero()) {
            self.c.pop();
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.c.get(i).copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.ctx.is_one(self.c[0])
    }

    pub fn leading(&self) -> FieldElement {
        self.c.last().copied().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let f = &self.ctx;
        let x = f.lift(x);
        let mut acc = f.zero();
        for &c in self.c.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// Coefficients mapped into an extension of this polynomial's field.
    pub fn lift(&self, k: &FieldCtx) -> UniPoly {
        if k == &self.ctx {
            return self.clone();
        }
        UniPoly { ctx: k.clone(), c: self.c.iter().map(|&c| k.lift(c)).collect() }
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let f = &self.ctx;
        let n = self.c.len().max(o.c.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        UniPoly::new(f, v)
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let f = &self.ctx;
        let n = self.c.len().max(o.c.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        UniPoly::new(f, v)
    }

    pub fn neg(&self) -> UniPoly {
        let f = &self.ctx;
        UniPoly { ctx: f.clone(), c: self.c.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, a: FieldElement) -> UniPoly {
        let f = &self.ctx;
        UniPoly::new(f, self.c.iter().map(|&c| f.mul(c, a)).collect())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        let f = &self.ctx;
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(f);
        }
        let mut v = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, v)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.ctx.zero(); k];
        v.extend_from_slice(&self.c);
        UniPoly { ctx: self.ctx.clone(), c: v }
    }

    pub fn pow(&self, mut e: u64) -> UniPoly {
        let mut r = UniPoly::one(&self.ctx);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.ctx.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    pub fn divrem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let f = &self.ctx;
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        if self.c.len() <= dd {
            return Ok((UniPoly::zero(f), self.clone()));
        }
        let inv = f.inv(d.leading())?;
        let mut r = self.c.clone();
        let mut q = vec![f.zero(); self.c.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(r[k], inv);
            if c.is_zero() {
                continue;
            }
            q[k - dd] = c;
            for j in 0..=dd {
                r[k - dd + j] = f.sub(r[k - dd + j], f.mul(c, d.c[j]));
            }
        }
        r.truncate(dd);
        Ok((UniPoly::new(f, q), UniPoly::new(f, r)))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divrem(d).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UniPoly {
        let f = &self.ctx;
        if self.c.len() <= 1 {
            return UniPoly::zero(f);
        }
        let v = (1..self.c.len()).map(|i| f.mul(self.c[i], f.from_u64(i as u64))).collect();
        UniPoly::new(f, v)
    }

    pub fn mulmod(&self, o: &UniPoly, m: &UniPoly) -> UniPoly {
        self.mul(o).rem(m)
    }

    /// `self^e mod m`.
    pub fn powmod(&self, mut e: u128, m: &UniPoly) -> UniPoly {
        let mut r = UniPoly::one(&self.ctx).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mulmod(&b, m);
            }
        }
        r
    }

    /// `g(self) mod m` by Horner.
    pub fn compose_mod(&self, g: &UniPoly, m: &UniPoly) -> UniPoly {
        let mut acc = UniPoly::zero(&self.ctx);
        let x = self.rem(m);
        for &c in g.c.iter().rev() {
            acc = acc.mulmod(&x, m).add(&UniPoly::constant(&self.ctx, c));
        }
        acc
    }

    /// `self(t) = g(t^p)` with coefficients of `g` replaced by their p-th roots,
    /// so that `self = h^p` for the returned `h`. Requires a zero derivative.
    pub(crate) fn pth_root_poly(&self) -> UniPoly {
        let f = &self.ctx;
        let p = f.characteristic() as usize;
        let v = self.c.iter().step_by(p).map(|&c| f.pth_root(c)).collect();
        UniPoly::new(f, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let f5 = FieldCtx::prime(5).unwrap();
        let a = UniPoly::from_ints(&f5, &[1, 2, 3, 4, 1, 2]);
        let b = UniPoly::from_ints(&f5, &[3, 0, 2]);
        let (q, r) = a.divrem(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < b.deg());
    }

    #[test]
    fn gcd_of_products() {
        let f7 = FieldCtx::prime(7).unwrap();
        let g = UniPoly::from_ints(&f7, &[1, 1, 1]);
        let a = g.mul(&UniPoly::from_ints(&f7, &[2, 1]));
        let b = g.mul(&UniPoly::from_ints(&f7, &[1, 0, 1]));
        assert_eq!(a.gcd(&b), g);
    }

    #[test]
    fn powmod_matches_pow() {
        let f3 = FieldCtx::prime(3).unwrap();
        let m = UniPoly::from_ints(&f3, &[2, 2, 1]);
        let t = UniPoly::var(&f3);
        assert_eq!(t.powmod(9, &m), t.pow(9).rem(&m));
        assert_eq!(t.powmod(9, &m), t);
    }
}
