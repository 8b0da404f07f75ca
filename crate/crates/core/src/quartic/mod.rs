//! Plane quartic curves: smoothness, points, tangents, coordinate changes.

pub mod fixtures;
mod geometry;
mod solve;

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::{BiPoly, BinaryForm, P1Point, TernaryForm, UniPoly};

pub use geometry::{lines, points_of_plane, Pgl3, ProjLine, ProjPoint};
pub use solve::{adjoin_root, solve, ClosedPoint, Solutions};

/// Default cap on the number of field elements scanned when enumerating points.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smoothness {
    pub smooth: bool,
    /// A singular point, over the field it generates, when not smooth.
    pub witness: Option<ClosedPoint>,
}

#[derive(Debug)]
pub struct PlaneQuartic {
    form: TernaryForm,
    grad: [TernaryForm; 3],
    affine: BiPoly,
    smooth: OnceLock<Smoothness>,
}

impl Clone for PlaneQuartic {
    fn clone(&self) -> Self {
        let c = PlaneQuartic::new(self.form.clone()).expect("valid quartic");
        if let Some(s) = self.smooth.get() {
            let _ = c.smooth.set(s.clone());
        }
        c
    }
}

impl PartialEq for PlaneQuartic {
    fn eq(&self, o: &Self) -> bool {
        self.form == o.form
    }
}

impl PlaneQuartic {
    pub fn new(form: TernaryForm) -> Result<PlaneQuartic> {
        if form.degree() != 4 {
            return Err(Error::Invalid(format!("expected a quartic, got degree {}", form.degree())));
        }
        if form.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(PlaneQuartic { grad: form.gradient(), affine: form.dehomogenize_z(), form, smooth: OnceLock::new() })
    }

    pub fn parse(text: &str, ctx: &FieldCtx) -> Result<PlaneQuartic> {
        PlaneQuartic::new(crate::forms::parse_ternary(text, ctx)?)
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.form.ctx()
    }

    pub fn form(&self) -> &TernaryForm {
        &self.form
    }

    pub fn gradient(&self) -> &[TernaryForm; 3] {
        &self.grad
    }

    pub fn smoothness(&self) -> &Smoothness {
        self.smooth.get_or_init(|| {
            let mut forms = vec![self.grad[0].clone(), self.grad[1].clone(), self.grad[2].clone()];
            forms.push(self.form.clone());
            match solve(&forms).expect("elimination over a finite field") {
                Solutions::Finite(pts) => Smoothness { smooth: pts.is_empty(), witness: pts.into_iter().next() },
                Solutions::Infinite(p) => Smoothness { smooth: false, witness: Some(p) },
            }
        })
    }

    pub fn is_smooth(&self) -> bool {
        self.smoothness().smooth
    }

    pub fn eval(&self, p: &ProjPoint) -> FieldElement {
        self.form.eval(p.coords(), p.ctx())
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.eval(p).is_zero()
    }

    pub fn gradient_at(&self, p: &ProjPoint) -> [FieldElement; 3] {
        let k = p.ctx();
        [self.grad[0].eval(p.coords(), k), self.grad[1].eval(p.coords(), k), self.grad[2].eval(p.coords(), k)]
    }

    /// Points over `k` (this curve's field or an extension of it), in
    /// [`ProjPoint`] order.
    pub fn points_over(&self, k: &FieldCtx, budget: u128) -> Result<Vec<ProjPoint>> {
        let mut out = Vec::new();
        self.for_each_point(k, budget, |p| out.push(p))?;
        Ok(out)
    }

    /// Points over the degree-`ext` extension of the base field.
    pub fn rational_points(&self, ext: usize, budget: u128) -> Result<Vec<ProjPoint>> {
        let k = FieldCtx::extension_of_degree(self.ctx(), ext)?;
        self.points_over(&k, budget)
    }

    pub fn count_points(&self, k: &FieldCtx, budget: u128) -> Result<usize> {
        let mut n = 0;
        self.for_each_point(k, budget, |_| n += 1)?;
        Ok(n)
    }

    /// Calls `f` on every point over `k` in [`ProjPoint`] order.
    pub fn for_each_point<F: FnMut(ProjPoint)>(&self, k: &FieldCtx, budget: u128, mut f: F) -> Result<()> {
        if k.order() > budget {
            return Err(Error::BudgetExceeded);
        }
        let cols: Vec<UniPoly> = self.affine.coeffs().iter().map(|u| u.lift(k)).collect();
        let one = k.one();
        for x in k.elements() {
            let v: Vec<FieldElement> = cols.iter().map(|u| u.eval(x)).collect();
            let g = UniPoly::new(k, v);
            if g.is_zero() {
                return Err(Error::LineInCurve);
            }
            for y in g.roots() {
                f(ProjPoint::new(k, [x, y, one]).expect("affine"));
            }
        }
        let inf = self.form.at_infinity().lift(k);
        let g = inf.dehomogenize();
        if g.is_zero() {
            return Err(Error::LineInCurve);
        }
        for x in g.roots() {
            f(ProjPoint::new(k, [x, one, k.zero()]).expect("point"));
        }
        if k.lift(self.form.coeff([4, 0, 0])).is_zero() {
            f(ProjPoint::new(k, [one, k.zero(), k.zero()]).expect("point"));
        }
        Ok(())
    }

    /// Restriction of the equation to a line, in the line's parametrization.
    pub fn restrict(&self, l: &ProjLine) -> Result<BinaryForm> {
        let [p, q] = l.basis();
        let g = self.form.restrict(p, q, l.ctx());
        if g.is_zero() {
            return Err(Error::LineInCurve);
        }
        Ok(g)
    }

    /// Tangent line at `p`, parametrized as `s p + t R`.
    pub fn tangent_line(&self, p: &ProjPoint) -> Result<ProjLine> {
        if !self.contains(p) {
            return Err(Error::NotOnCurve);
        }
        let g = self.gradient_at(p);
        if g.iter().all(|c| c.is_zero()) {
            return Err(Error::SingularPoint);
        }
        ProjLine::new(p.ctx(), g)?.with_base_point(p)
    }

    /// Intersection multiplicity of the tangent at `p` with the curve at `p`.
    pub fn contact_order(&self, p: &ProjPoint) -> Result<usize> {
        let l = self.tangent_line(p)?;
        let g = self.restrict(&l)?;
        Ok(g.infinity_multiplicity())
    }

    /// The curve `{M P : P in C}`, with equation `F(M^-1 x)`.
    pub fn transform(&self, m: &Pgl3) -> PlaneQuartic {
        PlaneQuartic::new(self.form.substitute_linear(m.inverse_matrix())).expect("quartic")
    }

    /// First smooth quartic drawn from uniform coefficient vectors with the
    /// given seed.
    pub fn random_smooth(ctx: &FieldCtx, seed: u64) -> PlaneQuartic {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let c: Vec<FieldElement> = (0..15).map(|_| ctx.random(&mut rng)).collect();
            if let Ok(q) = PlaneQuartic::new(TernaryForm::new(ctx, 4, c)) {
                if q.is_smooth() {
                    return q;
                }
            }
        }
    }

    /// Residual divisor of the tangent at `p`: `g(s,t) = t^2 h(s,t)` in the
    /// tangent's parametrization, `h` returned.
    pub fn tangent_residual(&self, p: &ProjPoint) -> Result<(ProjLine, BinaryForm)> {
        let l = self.tangent_line(p)?;
        let g = self.restrict(&l)?;
        let c = g.coeffs();
        let h = BinaryForm::new(l.ctx(), vec![c[2], c[3], c[4]]);
        Ok((l, h))
    }

    pub fn point_on_line(&self, l: &ProjLine, t: P1Point) -> ProjPoint {
        l.point_at(t)
    }
}

/// `q + 1 - 3 floor(2 sqrt q)`, the lower point-count bound for genus 3.
pub fn serre_weil_floor(q: u128) -> i128 {
    let m = (4 * q).isqrt();
    q as i128 + 1 - 3 * m as i128
}

/// `floor(2 sqrt q)`.
pub fn two_sqrt_floor(q: u128) -> u128 {
    (4 * q).isqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serre_weil_values() {
        assert_eq!(serre_weil_floor(127), 62);
        assert_eq!(serre_weil_floor(4), -7);
        assert_eq!(serre_weil_floor(4357), 3962);
    }

    #[test]
    fn fermat_char_two_is_singular() {
        let k = FieldCtx::prime(2).unwrap();
        let c = PlaneQuartic::parse("x^4+y^4+z^4", &k).unwrap();
        assert!(!c.is_smooth());
    }

    #[test]
    fn cusp_like_example_singular_at_expected_point() {
        let k = FieldCtx::prime(5).unwrap();
        let c = PlaneQuartic::parse("y*z^3 + x^4 + z^4", &k).unwrap();
        let s = c.smoothness();
        assert!(!s.smooth);
        let w = s.witness.as_ref().unwrap();
        assert_eq!(w.point, ProjPoint::from_ints(&k, [0, 1, 0]).unwrap());
    }

    #[test]
    fn fermat_f5_pointless_and_f3_tangent() {
        let k5 = FieldCtx::prime(5).unwrap();
        let c = PlaneQuartic::parse("x^4+y^4+z^4", &k5).unwrap();
        assert!(c.is_smooth());
        assert!(c.rational_points(1, DEFAULT_BUDGET).unwrap().is_empty());
        let k3 = FieldCtx::prime(3).unwrap();
        let c3 = PlaneQuartic::parse("x^4+y^4+z^4", &k3).unwrap();
        let p = ProjPoint::from_ints(&k3, [1, 1, 1]).unwrap();
        let l = c3.tangent_line(&p).unwrap();
        assert_eq!(l, ProjLine::from_ints(&k3, [1, 1, 1]).unwrap());
        assert_eq!(c3.contact_order(&p).unwrap(), 4);
    }

    #[test]
    fn tangent_on_twisted_fermat() {
        let k = FieldCtx::prime(5).unwrap();
        let c = PlaneQuartic::parse("x^4+y^4+4*z^4", &k).unwrap();
        let p = ProjPoint::from_ints(&k, [1, 0, 1]).unwrap();
        assert_eq!(c.tangent_line(&p).unwrap(), ProjLine::from_ints(&k, [4, 0, 1]).unwrap());
        assert_eq!(c.contact_order(&p).unwrap(), 4);
    }
}
