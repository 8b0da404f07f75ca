//! Squarefree decomposition, distinct/equal-degree factorization and root
//! extraction for univariate polynomials over any [`FieldCtx`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::UniPoly;

/// Fields up to this size find roots by evaluating at every element.
pub const ROOT_SCAN_LIMIT: u128 = 1 << 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: FieldElement,
    /// Monic squarefree, pairwise coprime factors, sorted by multiplicity.
    pub factors: Vec<(UniPoly, usize)>,
}

impl SquarefreeDecomposition {
    pub fn reconstruct(&self, ctx: &FieldCtx) -> UniPoly {
        let mut r = UniPoly::constant(ctx, self.unit);
        for (g, m) in &self.factors {
            r = r.mul(&g.pow(*m as u64));
        }
        r
    }
}

fn rng_for(ctx: &FieldCtx, f: &UniPoly) -> ChaCha8Rng {
    let mut h = ctx.seed() ^ 0x9e37_79b9_7f4a_7c15;
    for c in f.coeffs() {
        h = (h ^ c.raw() as u64 ^ (c.raw() >> 64) as u64).wrapping_mul(0x1000_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn sqf_monic(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let ctx = f.ctx();
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let d = f.derivative();
    let mut c = f.gcd(&d);
    let mut w = f.exact_div(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y).expect("gcd divides");
        if !z.is_constant() {
            out.push((z, i));
        }
        i += 1;
        c = c.exact_div(&y).expect("gcd divides");
        w = y;
    }
    if !c.is_constant() {
        let p = ctx.characteristic() as usize;
        let root = c.pth_root_poly();
        for (g, m) in sqf_monic(&root) {
            out.push((g, m * p));
        }
    }
    out
}

impl UniPoly {
    pub fn squarefree_decomposition(&self) -> Result<SquarefreeDecomposition> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut factors = sqf_monic(&self.monic());
        factors.sort_by_key(|(_, m)| *m);
        Ok(SquarefreeDecomposition { unit: self.leading(), factors })
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> UniPoly {
        match self.squarefree_decomposition() {
            Ok(d) => d.factors.iter().fold(UniPoly::one(self.ctx()), |acc, (g, _)| acc.mul(g)),
            Err(_) => self.clone(),
        }
    }

    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).is_constant()
    }

    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let q = f.ctx().order();
        let t = UniPoly::var(f.ctx());
        let mut h = t.clone();
        for _ in 1..=n / 2 {
            h = h.powmod(q, &f);
            if !f.gcd(&h.sub(&t)).is_one() {
                return false;
            }
        }
        true
    }

    /// Full factorization into monic irreducibles with multiplicities,
    /// sorted by degree and then by coefficients.
    pub fn factor(&self) -> Result<Vec<(UniPoly, usize)>> {
        let sqf = self.squarefree_decomposition()?;
        let mut rng = rng_for(self.ctx(), self);
        let mut out = Vec::new();
        for (g, m) in sqf.factors {
            for (h, d) in distinct_degree(&g) {
                for irr in equal_degree(&h, d, &mut rng) {
                    out.push((irr, m));
                }
            }
        }
        out.sort_by(|(a, _), (b, _)| {
            (a.degree(), a.coeffs().iter().map(|c| c.raw()).rev().collect::<Vec<_>>())
                .cmp(&(b.degree(), b.coeffs().iter().map(|c| c.raw()).rev().collect::<Vec<_>>()))
        });
        Ok(out)
    }

    /// Distinct roots in the coefficient field, ascending.
    pub fn roots(&self) -> Vec<FieldElement> {
        if self.is_zero() {
            return Vec::new();
        }
        let ctx = self.ctx();
        match self.degree() {
            Some(0) => return Vec::new(),
            Some(1) => {
                let r = ctx.neg(ctx.div(self.coeff(0), self.coeff(1)).expect("nonzero"));
                return vec![r];
            }
            _ => {}
        }
        let mut roots: Vec<FieldElement> = if ctx.order() <= ROOT_SCAN_LIMIT {
            ctx.elements().filter(|&x| self.eval(x).is_zero()).collect()
        } else {
            let f = self.monic();
            let t = UniPoly::var(ctx);
            let g = f.gcd(&t.powmod(ctx.order(), &f).sub(&t));
            if g.is_constant() {
                return Vec::new();
            }
            let mut rng = rng_for(ctx, &g);
            equal_degree(&g, 1, &mut rng)
                .into_iter()
                .map(|l| ctx.neg(l.coeff(0)))
                .collect()
        };
        roots.sort();
        roots
    }

    /// Number of distinct roots in the coefficient field.
    pub fn count_roots(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        match self.degree() {
            Some(0) => 0,
            Some(1) => 1,
            _ => {
                let ctx = self.ctx();
                if ctx.order() <= ROOT_SCAN_LIMIT {
                    ctx.elements().filter(|&x| self.eval(x).is_zero()).count()
                } else {
                    let f = self.monic();
                    let t = UniPoly::var(ctx);
                    f.gcd(&t.powmod(ctx.order(), &f).sub(&t)).degree().unwrap_or(0)
                }
            }
        }
    }

    /// Roots with multiplicities, ascending by root.
    pub fn roots_with_multiplicity(&self) -> Result<Vec<(FieldElement, usize)>> {
        let sqf = self.squarefree_decomposition()?;
        let mut out = Vec::new();
        for (g, m) in sqf.factors {
            for r in g.roots() {
                out.push((r, m));
            }
        }
        out.sort();
        Ok(out)
    }
}

/// Splits a monic squarefree polynomial into products of irreducibles of
/// equal degree.
pub fn distinct_degree(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let ctx = f.ctx();
    let q = ctx.order();
    let t = UniPoly::var(ctx);
    let mut rest = f.monic();
    let mut h = t.rem(&rest);
    let mut out = Vec::new();
    let mut i = 1;
    while rest.degree().unwrap_or(0) >= 2 * i {
        h = h.powmod(q, &rest);
        let g = rest.gcd(&h.sub(&t));
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if !rest.is_constant() {
        let d = rest.degree().unwrap();
        out.push((rest, d));
    }
    out
}

fn random_poly(ctx: &FieldCtx, deg: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    UniPoly::new(ctx, (0..deg).map(|_| ctx.random(rng)).collect())
}

/// Splits a monic squarefree product of irreducibles of degree `d`.
pub fn equal_degree(f: &UniPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![f.monic()];
    }
    let ctx = f.ctx();
    let q = ctx.order();
    loop {
        let a = random_poly(ctx, n, rng);
        if a.is_constant() {
            continue;
        }
        let t = if ctx.characteristic() == 2 {
            let m = ctx.degree() as usize * d;
            let mut acc = a.clone();
            let mut cur = a.clone();
            for _ in 1..m {
                cur = cur.mulmod(&cur, f);
                acc = acc.add(&cur);
            }
            acc
        } else {
            let mut b = a.clone();
            let mut cur = a.clone();
            for _ in 1..d {
                cur = cur.powmod(q, f);
                b = b.mulmod(&cur, f);
            }
            b.powmod((q - 1) / 2, f).sub(&UniPoly::one(ctx))
        };
        let g = f.gcd(&t);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let h = f.exact_div(&g).expect("gcd divides");
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}
