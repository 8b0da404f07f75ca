//! Polynomials in `y` with coefficients in `F[x]`: content, pseudo-division,
//! gcd and the subresultant resultant with respect to `y`.

use crate::field::{FieldCtx, FieldElement};
use crate::forms::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    ctx: FieldCtx,
    /// `c[j]` is the coefficient of `y^j`.
    c: Vec<UniPoly>,
}

impl BiPoly {
    pub fn new(ctx: &FieldCtx, c: Vec<UniPoly>) -> BiPoly {
        let mut p = BiPoly { ctx: ctx.clone(), c };
        while p.c.last().is_some_and(|u| u.is_zero()) {
            p.c.pop();
        }
        p
    }

    pub fn zero(ctx: &FieldCtx) -> BiPoly {
        BiPoly { ctx: ctx.clone(), c: Vec::new() }
    }

    pub fn from_x(u: UniPoly) -> BiPoly {
        let ctx = u.ctx().clone();
        BiPoly::new(&ctx, vec![u])
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree in `y`, -1 for zero.
    pub fn deg_y(&self) -> isize {
        self.c.len() as isize - 1
    }

    /// Total degree, -1 for zero.
    pub fn total_degree(&self) -> isize {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, u)| !u.is_zero())
            .map(|(j, u)| j as isize + u.deg())
            .max()
            .unwrap_or(-1)
    }

    pub fn lc(&self) -> UniPoly {
        self.c.last().cloned().unwrap_or_else(|| UniPoly::zero(&self.ctx))
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let n = self.c.len().max(o.c.len());
        let z = UniPoly::zero(&self.ctx);
        let v = (0..n)
            .map(|j| self.c.get(j).unwrap_or(&z).add(o.c.get(j).unwrap_or(&z)))
            .collect();
        BiPoly::new(&self.ctx, v)
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly { ctx: self.ctx.clone(), c: self.c.iter().map(|u| u.neg()).collect() }
    }

    pub fn scale_x(&self, u: &UniPoly) -> BiPoly {
        BiPoly::new(&self.ctx, self.c.iter().map(|v| v.mul(u)).collect())
    }

    pub fn scale(&self, a: FieldElement) -> BiPoly {
        BiPoly::new(&self.ctx, self.c.iter().map(|v| v.scale(a)).collect())
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero(&self.ctx);
        }
        let mut v = vec![UniPoly::zero(&self.ctx); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        BiPoly::new(&self.ctx, v)
    }

    fn shift_y(&self, k: usize) -> BiPoly {
        let mut v = vec![UniPoly::zero(&self.ctx); k];
        v.extend(self.c.iter().cloned());
        BiPoly::new(&self.ctx, v)
    }

    /// Monic gcd of the coefficients.
    pub fn content(&self) -> UniPoly {
        let mut g = UniPoly::zero(&self.ctx);
        for u in &self.c {
            g = g.gcd(u);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive_part(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        self.div_x(&c).expect("content divides")
    }

    /// Divides every coefficient by `u`, if exact.
    pub fn div_x(&self, u: &UniPoly) -> Option<BiPoly> {
        let v: Option<Vec<UniPoly>> = self.c.iter().map(|a| a.exact_div(u)).collect();
        Some(BiPoly::new(&self.ctx, v?))
    }

    /// `lc(b)^(deg a - deg b + 1) a mod b`.
    pub fn prem(&self, b: &BiPoly) -> BiPoly {
        let db = b.deg_y();
        assert!(db >= 0, "pseudo-division by zero");
        let mut r = self.clone();
        let da = self.deg_y();
        if da < db {
            return r;
        }
        let lb = b.lc();
        let mut e = da - db + 1;
        while r.deg_y() >= db {
            let s = BiPoly::from_x(r.lc()).shift_y((r.deg_y() - db) as usize);
            r = r.scale_x(&lb).sub(&s.mul(b));
            e -= 1;
        }
        if e > 0 {
            r = r.scale_x(&lb.pow(e as u64));
        }
        r
    }

    /// Exact quotient `self / b` in `F[x][y]`.
    pub fn exact_div(&self, b: &BiPoly) -> Option<BiPoly> {
        let db = b.deg_y();
        if db < 0 {
            return None;
        }
        let mut r = self.clone();
        let mut q = vec![UniPoly::zero(&self.ctx); (self.deg_y() - db + 1).max(0) as usize];
        let lb = b.lc();
        while r.deg_y() >= db {
            let k = (r.deg_y() - db) as usize;
            let c = r.lc().exact_div(&lb)?;
            r = r.sub(&BiPoly::from_x(c.clone()).shift_y(k).mul(b));
            q[k] = c;
        }
        r.is_zero().then(|| BiPoly::new(&self.ctx, q))
    }

    /// Gcd normalized so the leading coefficient in `y` is monic in `x`.
    pub fn gcd(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() {
            return o.normalized();
        }
        if o.is_zero() {
            return self.normalized();
        }
        let c = self.content().gcd(&o.content());
        let (mut a, mut b) = (self.primitive_part(), o.primitive_part());
        if a.deg_y() < b.deg_y() {
            std::mem::swap(&mut a, &mut b);
        }
        while b.deg_y() > 0 {
            let r = a.prem(&b);
            a = b;
            if r.is_zero() {
                return BiPoly::from_x(c).mul(&a.primitive_part()).normalized();
            }
            b = r.primitive_part();
        }
        BiPoly::from_x(c).normalized()
    }

    fn normalized(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc().leading();
        let inv = self.ctx.inv(l).expect("nonzero");
        self.scale(inv)
    }

    /// Resultant with respect to `y`.
    pub fn resultant(&self, o: &BiPoly) -> UniPoly {
        let ctx = &self.ctx;
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(ctx);
        }
        let (ca, cb) = (self.content(), o.content());
        let mut a = self.div_x(&ca).expect("content divides");
        let mut b = o.div_x(&cb).expect("content divides");
        let mut t = ca.pow(o.deg_y() as u64).mul(&cb.pow(self.deg_y() as u64));
        let mut g = UniPoly::one(ctx);
        let mut h = UniPoly::one(ctx);
        let mut s_neg = false;
        if a.deg_y() < b.deg_y() {
            std::mem::swap(&mut a, &mut b);
            if a.deg_y() % 2 == 1 && b.deg_y() % 2 == 1 {
                s_neg = !s_neg;
            }
        }
        if b.deg_y() == 0 {
            return t.mul(&b.lc().pow(a.deg_y() as u64)).scale(sign(ctx, s_neg));
        }
        loop {
            let delta = (a.deg_y() - b.deg_y()) as u64;
            if a.deg_y() % 2 == 1 && b.deg_y() % 2 == 1 {
                s_neg = !s_neg;
            }
            let r = a.prem(&b);
            a = b;
            let den = g.mul(&h.pow(delta));
            b = r.div_x(&den).expect("subresultant division is exact");
            g = a.lc();
            h = if delta == 0 {
                h
            } else {
                g.pow(delta).exact_div(&h.pow(delta - 1)).expect("exact")
            };
            if b.deg_y() <= 0 {
                break;
            }
        }
        if b.is_zero() {
            return UniPoly::zero(ctx);
        }
        let da = a.deg_y() as u64;
        let hh = b.lc().pow(da).exact_div(&h.pow(da - 1)).expect("exact");
        t = t.mul(&hh);
        t.scale(sign(ctx, s_neg))
    }

    /// Specializes `x = x0` for `x0` in `k` (this field or an extension).
    pub fn eval_x(&self, x0: FieldElement, k: &FieldCtx) -> UniPoly {
        let v = self
            .c
            .iter()
            .map(|u| {
                let mut acc = k.zero();
                for &c in u.coeffs().iter().rev() {
                    acc = k.add(k.mul(acc, x0), k.lift(c));
                }
                acc
            })
            .collect();
        UniPoly::new(k, v)
    }

    pub fn eval(&self, x0: FieldElement, y0: FieldElement, k: &FieldCtx) -> FieldElement {
        self.eval_x(x0, k).eval(y0)
    }
}

fn sign(ctx: &FieldCtx, neg: bool) -> FieldElement {
    if neg {
        ctx.neg(ctx.one())
    } else {
        ctx.one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(ctx: &FieldCtx, rows: &[&[i64]]) -> BiPoly {
        BiPoly::new(ctx, rows.iter().map(|r| UniPoly::from_ints(ctx, r)).collect())
    }

    /// Sylvester determinant evaluated at a point, by Gaussian elimination.
    fn sylvester_at(a: &UniPoly, b: &UniPoly) -> FieldElement {
        let k = a.ctx();
        let (m, n) = (a.degree().unwrap(), b.degree().unwrap());
        let sz = m + n;
        let mut mat = vec![vec![k.zero(); sz]; sz];
        for i in 0..n {
            for j in 0..=m {
                mat[i][i + j] = a.coeff(m - j);
            }
        }
        for i in 0..m {
            for j in 0..=n {
                mat[n + i][i + j] = b.coeff(n - j);
            }
        }
        let mut det = k.one();
        for col in 0..sz {
            let piv = (col..sz).find(|&r| !mat[r][col].is_zero());
            let Some(piv) = piv else { return k.zero() };
            if piv != col {
                mat.swap(piv, col);
                det = k.neg(det);
            }
            det = k.mul(det, mat[col][col]);
            let inv = k.inv(mat[col][col]).unwrap();
            for r in col + 1..sz {
                let f = k.mul(mat[r][col], inv);
                for c in col..sz {
                    mat[r][c] = k.sub(mat[r][c], k.mul(f, mat[col][c]));
                }
            }
        }
        det
    }

    #[test]
    fn resultant_matches_sylvester_pointwise() {
        let k = FieldCtx::prime(101).unwrap();
        let a = bp(&k, &[&[1, 2, 3], &[0, 1], &[5, 0, 1], &[1], &[2, 1]]);
        let b = bp(&k, &[&[7, 1], &[3, 3, 3], &[1, 0, 0, 1]]);
        let r = a.resultant(&b);
        for x in [0i64, 1, 5, 17, 33] {
            let x0 = k.from_int(x);
            let (ax, bx) = (a.eval_x(x0, &k), b.eval_x(x0, &k));
            if ax.degree() == Some(4) && bx.degree() == Some(2) {
                assert_eq!(r.eval(x0), sylvester_at(&ax, &bx));
            }
        }
        assert!(a.resultant(&a).is_zero());
    }

    #[test]
    fn gcd_finds_common_factor() {
        let k = FieldCtx::prime(7).unwrap();
        let common = bp(&k, &[&[1, 1], &[0, 2], &[1]]);
        let a = common.mul(&bp(&k, &[&[3], &[1, 0, 1]]));
        let b = common.mul(&bp(&k, &[&[0, 1], &[2], &[1]]));
        let g = a.gcd(&b);
        assert_eq!(g.deg_y(), 2);
        assert!(a.exact_div(&g).is_some());
        assert!(b.exact_div(&g).is_some());
    }
}
