use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::UniPoly;

/// Homogeneous `g(s, t) = sum c_i s^(d-i) t^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    ctx: FieldCtx,
    c: Vec<FieldElement>,
}

/// A point of P^1 written `(s:t)` with the last nonzero coordinate equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum P1Point {
    /// `(s:1)`
    Finite(FieldElement),
    /// `(1:0)`
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinarySquarefree {
    pub unit: FieldElement,
    /// Squarefree, pairwise coprime forms normalized to leading coefficient 1
    /// (the form `t` stands for the point at infinity).
    pub factors: Vec<(BinaryForm, usize)>,
}

/// Rational roots with multiplicity plus the degrees of the remaining
/// irreducible factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootPattern {
    pub roots: Vec<(P1Point, usize)>,
    /// `(degree, multiplicity)` of non-linear irreducible factors, descending.
    pub residual: Vec<(usize, usize)>,
}

impl BinaryForm {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<FieldElement>) -> BinaryForm {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        BinaryForm { ctx: ctx.clone(), c: coeffs }
    }

    pub fn from_ints(ctx: &FieldCtx, coeffs: &[i64]) -> BinaryForm {
        BinaryForm::new(ctx, coeffs.iter().map(|&v| ctx.from_int(v)).collect())
    }

    /// `s - a t` (root `(a:1)`) or `t` (root `(1:0)`).
    pub fn linear(ctx: &FieldCtx, root: P1Point) -> BinaryForm {
        match root {
            P1Point::Finite(a) => BinaryForm::new(ctx, vec![ctx.one(), ctx.neg(a)]),
            P1Point::Infinity => BinaryForm::new(ctx, vec![ctx.zero(), ctx.one()]),
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, s: FieldElement, t: FieldElement) -> FieldElement {
        let f = &self.ctx;
        let mut acc = f.zero();
        let mut tp = f.one();
        for &c in self.c.iter() {
            acc = f.add(f.mul(acc, s), f.mul(c, tp));
            tp = f.mul(tp, t);
        }
        acc
    }

    pub fn eval_point(&self, p: P1Point) -> FieldElement {
        match p {
            P1Point::Finite(a) => self.eval(a, self.ctx.one()),
            P1Point::Infinity => self.c[0],
        }
    }

    /// `g(s, 1)` as a polynomial in `s`.
    pub fn dehomogenize(&self) -> UniPoly {
        let d = self.degree();
        UniPoly::new(&self.ctx, (0..=d).map(|k| self.c[d - k]).collect())
    }

    /// Homogenizes `f(s)` to degree `d >= deg f`.
    pub fn homogenize(f: &UniPoly, d: usize) -> BinaryForm {
        let ctx = f.ctx();
        assert!(f.deg() <= d as isize);
        BinaryForm::new(ctx, (0..=d).map(|i| f.coeff(d - i)).collect())
    }

    pub fn mul(&self, o: &BinaryForm) -> BinaryForm {
        let f = &self.ctx;
        let mut v = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        BinaryForm { ctx: f.clone(), c: v }
    }

    pub fn add(&self, o: &BinaryForm) -> BinaryForm {
        assert_eq!(self.degree(), o.degree(), "adding forms of different degree");
        let f = &self.ctx;
        BinaryForm {
            ctx: f.clone(),
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn scale(&self, a: FieldElement) -> BinaryForm {
        let f = &self.ctx;
        BinaryForm { ctx: f.clone(), c: self.c.iter().map(|&c| f.mul(c, a)).collect() }
    }

    /// Multiplicity of `(1:0)` as a root: number of leading zero coefficients.
    pub fn infinity_multiplicity(&self) -> usize {
        self.c.iter().take_while(|c| c.is_zero()).count()
    }

    /// Multiplicity of a root in `P^1`.
    pub fn root_multiplicity(&self, p: P1Point) -> usize {
        match p {
            P1Point::Infinity => self.infinity_multiplicity(),
            P1Point::Finite(a) => {
                let mut g = self.dehomogenize();
                let lin = UniPoly::new(&self.ctx, vec![self.ctx.neg(a), self.ctx.one()]);
                let mut m = 0;
                while !g.is_zero() {
                    match g.exact_div(&lin) {
                        Some(h) => {
                            g = h;
                            m += 1;
                        }
                        None => break,
                    }
                }
                m
            }
        }
    }

    /// Exact quotient by another form, if it divides.
    pub fn exact_div(&self, d: &BinaryForm) -> Option<BinaryForm> {
        let deg = self.degree().checked_sub(d.degree())?;
        let inf = self.infinity_multiplicity();
        let dinf = d.infinity_multiplicity();
        if dinf > inf {
            return None;
        }
        let a = self.dehomogenize();
        let b = d.dehomogenize();
        let q = a.exact_div(&b)?;
        Some(BinaryForm::homogenize(&q, deg))
    }

    pub fn squarefree_decomposition(&self) -> Result<BinarySquarefree> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.dehomogenize();
        let inf = self.infinity_multiplicity();
        let sqf = g.squarefree_decomposition()?;
        let mut factors: Vec<(BinaryForm, usize)> = Vec::new();
        let tform = BinaryForm::linear(&self.ctx, P1Point::Infinity);
        let mut inf_done = inf == 0;
        for (h, m) in sqf.factors {
            let mut form = BinaryForm::homogenize(&h, h.degree().unwrap());
            if m == inf {
                form = form.mul(&tform);
                inf_done = true;
            }
            factors.push((form, m));
        }
        if !inf_done {
            factors.push((tform, inf));
            factors.sort_by_key(|(_, m)| *m);
        }
        Ok(BinarySquarefree { unit: g.leading(), factors })
    }

    /// Perfect square over the algebraic closure: every multiplicity is even.
    pub fn is_perfect_square(&self) -> bool {
        match self.squarefree_decomposition() {
            Ok(d) => d.factors.iter().all(|(_, m)| m % 2 == 0),
            Err(_) => false,
        }
    }

    /// Rational roots in `P^1` with multiplicity and the residual pattern.
    pub fn roots_with_multiplicity(&self) -> Result<RootPattern> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.dehomogenize();
        let inf = self.infinity_multiplicity();
        let mut roots = Vec::new();
        let mut residual = Vec::new();
        if !g.is_constant() {
            for (h, m) in g.factor()? {
                let d = h.degree().unwrap();
                if d == 1 {
                    roots.push((P1Point::Finite(self.ctx.neg(h.coeff(0))), m));
                } else {
                    residual.push((d, m));
                }
            }
        }
        if inf > 0 {
            roots.push((P1Point::Infinity, inf));
        }
        roots.sort();
        residual.sort_by(|a, b| b.cmp(a));
        Ok(RootPattern { roots, residual })
    }

    pub fn lift(&self, k: &FieldCtx) -> BinaryForm {
        BinaryForm { ctx: k.clone(), c: self.c.iter().map(|&c| k.lift(c)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermat_line_restriction_is_squarefree() {
        let f5 = FieldCtx::prime(5).unwrap();
        let g = BinaryForm::from_ints(&f5, &[1, 0, 0, 0, 1]);
        let d = g.squarefree_decomposition().unwrap();
        assert_eq!(d.factors.len(), 1);
        assert_eq!(d.factors[0].1, 1);
        assert!(!g.is_perfect_square());
        let pat = g.roots_with_multiplicity().unwrap();
        assert!(pat.roots.is_empty());
        assert_eq!(pat.residual, vec![(2, 1), (2, 1)]);
    }

    #[test]
    fn fourth_power_char_three() {
        let f3 = FieldCtx::prime(3).unwrap();
        // 2(s - t)^4 = 2s^4 + s^3 t + 0 + s t^3 + 2 t^4
        let g = BinaryForm::from_ints(&f3, &[2, 1, 0, 1, 2]);
        let d = g.squarefree_decomposition().unwrap();
        assert_eq!(d.unit, f3.from_int(2));
        assert_eq!(d.factors, vec![(BinaryForm::from_ints(&f3, &[1, -1]), 4)]);
        assert!(g.is_perfect_square());
        let pat = g.roots_with_multiplicity().unwrap();
        assert_eq!(pat.roots, vec![(P1Point::Finite(f3.one()), 4)]);
    }

    #[test]
    fn root_at_infinity_counts() {
        let f5 = FieldCtx::prime(5).unwrap();
        // s t (s + t)(s + 2t)
        let g = BinaryForm::from_ints(&f5, &[1, 0])
            .mul(&BinaryForm::from_ints(&f5, &[0, 1]))
            .mul(&BinaryForm::from_ints(&f5, &[1, 1]))
            .mul(&BinaryForm::from_ints(&f5, &[1, 2]));
        let pat = g.roots_with_multiplicity().unwrap();
        assert_eq!(pat.roots.len(), 4);
        assert!(pat.roots.contains(&(P1Point::Infinity, 1)));
        let sq = BinaryForm::from_ints(&f5, &[1, 0, 1]);
        assert!(sq.mul(&sq).is_perfect_square());
    }
}
