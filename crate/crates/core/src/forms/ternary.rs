//! Homogeneous forms in `x, y, z`.
//!
//! Coefficients are stored in descending lexicographic order of the exponent
//! triple `(i, j, k)` of `x^i y^j z^k`. For quartics this is
//!
//! ```text
//! x4 x3y x3z x2y2 x2yz x2z2 xy3 xy2z xyz2 xz3 y4 y3z y2z2 yz3 z4
//! ```
//!
//! The coefficient written `a_ij` in the generic-quartic display (power `i` of
//! `x`, power `j` of `z`, `y` carrying the rest) sits at slot
//! `index(i, 4 - i - j, j)`.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::{BinaryForm, BiPoly, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryForm {
    ctx: FieldCtx,
    d: u32,
    c: Vec<FieldElement>,
}

pub fn monomial_count(d: u32) -> usize {
    ((d + 1) * (d + 2) / 2) as usize
}

/// Slot of `x^i y^j z^k` with `i + j + k = d`.
pub fn monomial_index(d: u32, i: u32, j: u32) -> usize {
    let r = d - i;
    (r * (r + 1) / 2 + (r - j)) as usize
}

/// Exponent triples in storage order.
pub fn monomials(d: u32) -> Vec<[u32; 3]> {
    let mut v = Vec::with_capacity(monomial_count(d));
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            v.push([i, j, d - i - j]);
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
}

impl TernaryForm {
    pub fn new(ctx: &FieldCtx, d: u32, coeffs: Vec<FieldElement>) -> TernaryForm {
        assert_eq!(coeffs.len(), monomial_count(d), "wrong number of coefficients");
        TernaryForm { ctx: ctx.clone(), d, c: coeffs }
    }

    pub fn from_ints(ctx: &FieldCtx, d: u32, coeffs: &[i64]) -> TernaryForm {
        TernaryForm::new(ctx, d, coeffs.iter().map(|&v| ctx.from_int(v)).collect())
    }

    pub fn zero(ctx: &FieldCtx, d: u32) -> TernaryForm {
        TernaryForm { ctx: ctx.clone(), d, c: vec![ctx.zero(); monomial_count(d)] }
    }

    pub fn monomial(ctx: &FieldCtx, c: FieldElement, e: [u32; 3]) -> TernaryForm {
        let d = e[0] + e[1] + e[2];
        let mut f = TernaryForm::zero(ctx, d);
        f.c[monomial_index(d, e[0], e[1])] = c;
        f
    }

    /// `a x + b y + c z`
    pub fn linear(ctx: &FieldCtx, l: [FieldElement; 3]) -> TernaryForm {
        TernaryForm::new(ctx, 1, l.to_vec())
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn coeff(&self, e: [u32; 3]) -> FieldElement {
        self.c[monomial_index(self.d, e[0], e[1])]
    }

    pub fn set_coeff(&mut self, e: [u32; 3], v: FieldElement) {
        let i = monomial_index(self.d, e[0], e[1]);
        self.c[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    /// Nonzero terms as (exponents, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], FieldElement)> + '_ {
        monomials(self.d).into_iter().zip(self.c.iter().copied()).filter(|(_, c)| !c.is_zero())
    }

    pub fn add(&self, o: &TernaryForm) -> TernaryForm {
        assert_eq!(self.d, o.d, "adding forms of different degree");
        let f = &self.ctx;
        TernaryForm {
            ctx: f.clone(),
            d: self.d,
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, o: &TernaryForm) -> TernaryForm {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> TernaryForm {
        let f = &self.ctx;
        TernaryForm { ctx: f.clone(), d: self.d, c: self.c.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, a: FieldElement) -> TernaryForm {
        let f = &self.ctx;
        let a = f.lift(a);
        TernaryForm { ctx: f.clone(), d: self.d, c: self.c.iter().map(|&c| f.mul(c, a)).collect() }
    }

    pub fn mul(&self, o: &TernaryForm) -> TernaryForm {
        let f = &self.ctx;
        let d = self.d + o.d;
        let mut r = TernaryForm::zero(f, d);
        let mo = monomials(o.d);
        for (ea, a) in self.terms() {
            for (eb, &b) in mo.iter().zip(&o.c) {
                if b.is_zero() {
                    continue;
                }
                let idx = monomial_index(d, ea[0] + eb[0], ea[1] + eb[1]);
                r.c[idx] = f.add(r.c[idx], f.mul(a, b));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> TernaryForm {
        let mut r = TernaryForm::monomial(&self.ctx, self.ctx.one(), [0, 0, 0]);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn lift(&self, k: &FieldCtx) -> TernaryForm {
        if k == &self.ctx {
            return self.clone();
        }
        TernaryForm { ctx: k.clone(), d: self.d, c: self.c.iter().map(|&c| k.lift(c)).collect() }
    }

    /// Evaluates at a point whose coordinates live in this form's field or an
    /// extension of it.
    pub fn eval(&self, p: &[FieldElement; 3], k: &FieldCtx) -> FieldElement {
        let d = self.d as usize;
        let mut pw = [[k.one(); 13]; 3];
        assert!(d <= 12, "degree too large for evaluation");
        for v in 0..3 {
            for e in 1..=d {
                pw[v][e] = k.mul(pw[v][e - 1], p[v]);
            }
        }
        let mut acc = k.zero();
        for (e, c) in monomials(self.d).iter().zip(&self.c) {
            if c.is_zero() {
                continue;
            }
            let m = k.mul(pw[0][e[0] as usize], k.mul(pw[1][e[1] as usize], pw[2][e[2] as usize]));
            acc = k.add(acc, k.mul(k.lift(*c), m));
        }
        acc
    }

    pub fn partial(&self, v: Var) -> TernaryForm {
        let f = &self.ctx;
        if self.d == 0 {
            return TernaryForm::zero(f, 0);
        }
        let mut r = TernaryForm::zero(f, self.d - 1);
        let vi = v as usize;
        for (e, c) in self.terms() {
            if e[vi] == 0 {
                continue;
            }
            let mut e2 = e;
            e2[vi] -= 1;
            let val = f.mul(c, f.from_u64(e[vi] as u64));
            r.set_coeff(e2, val);
        }
        r
    }

    pub fn gradient(&self) -> [TernaryForm; 3] {
        [self.partial(Var::X), self.partial(Var::Y), self.partial(Var::Z)]
    }

    /// `F(sP + tQ)` for points with coordinates in `k`.
    pub fn restrict(&self, p: &[FieldElement; 3], q: &[FieldElement; 3], k: &FieldCtx) -> BinaryForm {
        let d = self.d as usize;
        let lin: Vec<BinaryForm> =
            (0..3).map(|v| BinaryForm::new(k, vec![p[v], q[v]])).collect();
        let one = BinaryForm::new(k, vec![k.one()]);
        let mut pw: Vec<Vec<BinaryForm>> = Vec::with_capacity(3);
        for l in &lin {
            let mut row = vec![one.clone()];
            for e in 1..=d {
                let next = row[e - 1].mul(l);
                row.push(next);
            }
            pw.push(row);
        }
        let mut acc = vec![k.zero(); d + 1];
        for (e, c) in self.terms() {
            let m = pw[0][e[0] as usize].mul(&pw[1][e[1] as usize]).mul(&pw[2][e[2] as usize]);
            let c = k.lift(c);
            for (a, &b) in acc.iter_mut().zip(m.coeffs()) {
                *a = k.add(*a, k.mul(c, b));
            }
        }
        BinaryForm::new(k, acc)
    }

    /// `F(L_0, L_1, L_2)` where `L_v` are linear forms given by their
    /// coefficient rows; a coordinate change `x -> M x`.
    pub fn substitute_linear(&self, m: &[[FieldElement; 3]; 3]) -> TernaryForm {
        let f = &self.ctx;
        let d = self.d;
        let lin: Vec<TernaryForm> = (0..3).map(|v| TernaryForm::linear(f, m[v])).collect();
        let mut pw: Vec<Vec<TernaryForm>> = Vec::with_capacity(3);
        for l in &lin {
            let mut row = vec![TernaryForm::monomial(f, f.one(), [0, 0, 0])];
            for e in 1..=d as usize {
                let next = row[e - 1].mul(l);
                row.push(next);
            }
            pw.push(row);
        }
        let mut acc = TernaryForm::zero(f, d);
        for (e, c) in self.terms() {
            let m = pw[0][e[0] as usize].mul(&pw[1][e[1] as usize]).mul(&pw[2][e[2] as usize]);
            acc = acc.add(&m.scale(c));
        }
        acc
    }

    /// Restriction to `z = 0` as a binary form in `(x, y)`.
    pub fn at_infinity(&self) -> BinaryForm {
        let d = self.d;
        let v = (0..=d).map(|j| self.coeff([d - j, j, 0])).collect();
        BinaryForm::new(&self.ctx, v)
    }

    /// `F(x, y, 1)` as a polynomial in `y` with coefficients in `F[x]`.
    pub fn dehomogenize_z(&self) -> BiPoly {
        let f = &self.ctx;
        let d = self.d as usize;
        let mut ys: Vec<Vec<FieldElement>> = vec![vec![f.zero(); d + 1]; d + 1];
        for (e, c) in self.terms() {
            ys[e[1] as usize][e[0] as usize] = c;
        }
        BiPoly::new(f, ys.into_iter().map(|v| UniPoly::new(f, v)).collect())
    }

    /// Exponents written out, e.g. `x^2*y*z`.
    pub fn monomial_text(e: [u32; 3]) -> String {
        let mut parts = Vec::new();
        for (name, k) in ["x", "y", "z"].iter().zip(e) {
            match k {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{k}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// The `3x3` Hessian determinant, of degree `3(d - 2)`.
    pub fn hessian(&self) -> Result<TernaryForm> {
        if self.d < 2 {
            return Err(Error::Invalid("Hessian needs degree at least 2".into()));
        }
        let g = self.gradient();
        let h: Vec<Vec<TernaryForm>> = g.iter().map(|gi| gi.gradient().to_vec()).collect();
        let t1 = h[0][0].mul(&h[1][1].mul(&h[2][2]).sub(&h[1][2].mul(&h[2][1])));
        let t2 = h[0][1].mul(&h[1][0].mul(&h[2][2]).sub(&h[1][2].mul(&h[2][0])));
        let t3 = h[0][2].mul(&h[1][0].mul(&h[2][1]).sub(&h[1][1].mul(&h[2][0])));
        Ok(t1.sub(&t2).add(&t3))
    }

    /// The cofactor `L` with `self = L * f`, if it exists.
    pub fn divide(&self, f: &TernaryForm) -> Option<TernaryForm> {
        if self.is_zero() {
            return Some(TernaryForm::zero(&self.ctx, self.d.checked_sub(f.d)?));
        }
        let dl = self.d.checked_sub(f.d)?;
        let k = &self.ctx;
        // Descending lex is a monomial order, so the leading term of a product
        // is the product of leading terms and division is back-substitution.
        let (lead_e, lead_c) = f.terms().next()?;
        let lead_inv = k.inv(lead_c).ok()?;
        let mut rem = self.clone();
        let mut quo = TernaryForm::zero(k, dl);
        let mf: Vec<([u32; 3], FieldElement)> = f.terms().collect();
        for (idx, e) in monomials(self.d).iter().enumerate() {
            let c = rem.c[idx];
            if c.is_zero() {
                continue;
            }
            if e[0] < lead_e[0] || e[1] < lead_e[1] || e[2] < lead_e[2] {
                return None;
            }
            let qe = [e[0] - lead_e[0], e[1] - lead_e[1], e[2] - lead_e[2]];
            let qc = k.mul(c, lead_inv);
            quo.set_coeff(qe, qc);
            for (fe, fc) in &mf {
                let te = [qe[0] + fe[0], qe[1] + fe[1], qe[2] + fe[2]];
                let ti = monomial_index(self.d, te[0], te[1]);
                rem.c[ti] = k.sub(rem.c[ti], k.mul(qc, *fc));
            }
        }
        Some(quo)
    }
}
