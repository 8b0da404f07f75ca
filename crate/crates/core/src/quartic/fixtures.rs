//! Named curves used as ground truth.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::{parse_ternary, TernaryForm};
use crate::quartic::PlaneQuartic;

pub const KLEIN_TWIST_1: &str =
    "x^4 + x^2*y^2 + x^2*y*z + x^2*z^2 + x*y^2*z + x*y*z^2 + y^4 + y^2*z^2 + z^4";
pub const KLEIN_TWIST_2: &str = "x^4 + x^3*z + x*y^3 + x*y*z^2 + y^4 + y*z^3 + z^4";
pub const CHAR3_ORBIT8: &str =
    "2*x^4 + 2*x^3*y + x^3*z + 2*x^2*z^2 + x*y^3 + 2*x*y^2*z + y^3*z + y*z^3";
pub const CHAR3_ORBIT7: &str =
    "x^3*y + x^2*z^2 + 2*x*y^3 + x*y^2*z + 2*x*y*z^2 + 2*x*z^3 + y^4 + 2*y*z^3";
/// Over F_9 with `a^2 = a + 1`.
pub const CHAR3_ORBIT6: &str = "a^6*x^4 + a*x^3*y + a^7*x^3*z + a^6*x^2*y^2 + a^2*x^2*z^2 \
    + a^7*x*y^3 + a^7*x*y^2*z + x*y*z^2 + a^5*x*z^3 + a^5*y^4 + a^3*y^3*z + a^5*y^2*z^2 \
    + 2*y*z^3 + a^7*z^4";
pub const F9_DESCRIPTOR: &str = "3:2:2,2,1";
/// Singular at (0:1:0) in every characteristic; kept out of checks.
pub const GALOIS_EXTREMAL: &str = "y*z^3 + x^4 + z^4";

pub const NAMES: &[&str] = &[
    "fermat",
    "klein_twist_1",
    "klein_twist_2",
    "char3_orbit8",
    "char3_orbit7",
    "char3_orbit6",
    "char2_family1",
    "char2_family2",
    "char2_family3",
    "char2_family4",
    "galois_extremal",
];

pub fn fermat(ctx: &FieldCtx) -> PlaneQuartic {
    PlaneQuartic::parse("x^4 + y^4 + z^4", ctx).expect("fixture")
}

pub fn klein_twist_1() -> PlaneQuartic {
    PlaneQuartic::parse(KLEIN_TWIST_1, &f(2)).expect("fixture")
}

pub fn klein_twist_2() -> PlaneQuartic {
    PlaneQuartic::parse(KLEIN_TWIST_2, &f(2)).expect("fixture")
}

pub fn char3_orbit8() -> PlaneQuartic {
    PlaneQuartic::parse(CHAR3_ORBIT8, &f(3)).expect("fixture")
}

pub fn char3_orbit7() -> PlaneQuartic {
    PlaneQuartic::parse(CHAR3_ORBIT7, &f(3)).expect("fixture")
}

pub fn char3_orbit6() -> PlaneQuartic {
    let k = FieldCtx::from_descriptor(F9_DESCRIPTOR).expect("F_9");
    PlaneQuartic::parse(CHAR3_ORBIT6, &k).expect("fixture")
}

fn f(p: u64) -> FieldCtx {
    FieldCtx::prime(p).expect("prime")
}

/// `Q = a x^2 + b y^2 + c z^2 + d xy + e yz + f zx`, coefficients in that order.
pub fn conic_q(ctx: &FieldCtx, q: [FieldElement; 6]) -> TernaryForm {
    let mut t = TernaryForm::zero(ctx, 2);
    let exps = [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [0, 1, 1], [1, 0, 1]];
    for (e, c) in exps.into_iter().zip(q) {
        t.set_coeff(e, c);
    }
    t
}

/// The quartic multiplied against `Q^2` in each characteristic-2 family.
pub fn char2_family_product(ctx: &FieldCtx, family: u8) -> Result<TernaryForm> {
    let text = match family {
        1 => "x*y^3 + x^3*z",
        2 => "x*y^3 + x^2*y*z",
        3 => "x*y^2*z + x*y*z^2",
        4 => "x^2*y*z + x*y^2*z + x*y*z^2",
        _ => return Err(Error::UnknownFixture(format!("char2_family{family}"))),
    };
    parse_ternary(text, ctx)
}

/// Whether `Q` meets the open conditions attached to a family.
pub fn char2_admissible(ctx: &FieldCtx, family: u8, q: &[FieldElement; 6]) -> bool {
    let [a, b, c, _, e, _] = *q;
    match family {
        1 => !c.is_zero(),
        2 => !ctx.mul(a, c).is_zero(),
        3 => !ctx.mul(ctx.mul(a, b), c).is_zero() && !ctx.add(ctx.add(b, c), e).is_zero(),
        4 => true,
        _ => false,
    }
}

/// `Q^2 + (family product)` over a field of characteristic 2.
pub fn char2_normal_form(ctx: &FieldCtx, family: u8, q: [FieldElement; 6]) -> Result<PlaneQuartic> {
    if ctx.characteristic() != 2 {
        return Err(Error::WrongCharacteristic("normal forms need characteristic 2".into()));
    }
    let qf = conic_q(ctx, q);
    PlaneQuartic::new(qf.mul(&qf).add(&char2_family_product(ctx, family)?))
}

/// All admissible smooth members of a family with `Q` over `ctx`, in
/// lexicographic order of the coefficient encodings.
pub fn char2_family_members(ctx: &FieldCtx, family: u8) -> Result<Vec<([FieldElement; 6], PlaneQuartic)>> {
    let elems: Vec<FieldElement> = ctx.elements().collect();
    let n = elems.len();
    let mut out = Vec::new();
    for mut idx in 0..n.pow(6) {
        let mut q = [ctx.zero(); 6];
        for slot in q.iter_mut().rev() {
            *slot = elems[idx % n];
            idx /= n;
        }
        if !char2_admissible(ctx, family, &q) {
            continue;
        }
        let c = char2_normal_form(ctx, family, q)?;
        if c.is_smooth() {
            out.push((q, c));
        }
    }
    Ok(out)
}

/// Fixture by name. `ctx` selects the field for `fermat` (default F_3) and
/// for the characteristic-2 families (default F_2); other fixtures carry
/// their own field and reject a conflicting one.
pub fn by_name(name: &str, ctx: Option<&FieldCtx>) -> Result<PlaneQuartic> {
    let native = |c: PlaneQuartic| -> Result<PlaneQuartic> {
        match ctx {
            Some(k) if k != c.ctx() => Err(Error::Invalid(format!(
                "fixture {name} is defined over {}",
                c.ctx().descriptor()
            ))),
            _ => Ok(c),
        }
    };
    match name {
        "fermat" => Ok(fermat(&ctx.cloned().unwrap_or_else(|| f(3)))),
        "klein_twist_1" => native(klein_twist_1()),
        "klein_twist_2" => native(klein_twist_2()),
        "char3_orbit8" => native(char3_orbit8()),
        "char3_orbit7" => native(char3_orbit7()),
        "char3_orbit6" => native(char3_orbit6()),
        "galois_extremal" => PlaneQuartic::parse(GALOIS_EXTREMAL, &ctx.cloned().unwrap_or_else(|| f(5))),
        _ => {
            let fam = name
                .strip_prefix("char2_family")
                .and_then(|s| s.parse::<u8>().ok())
                .filter(|f| (1..=4).contains(f))
                .ok_or_else(|| Error::UnknownFixture(name.into()))?;
            let k = ctx.cloned().unwrap_or_else(|| f(2));
            char2_family_members(&k, fam)?
                .into_iter()
                .next()
                .map(|(_, c)| c)
                .ok_or_else(|| Error::Invalid(format!("no smooth member of {name} over {}", k.descriptor())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_round_trip() {
        use crate::forms::serialize_ternary;
        for name in NAMES {
            let c = by_name(name, None).unwrap();
            let back = parse_ternary(&serialize_ternary(c.form()), c.ctx()).unwrap();
            assert_eq!(&back, c.form(), "{name}");
        }
    }

    #[test]
    fn klein_twists_smooth_and_pointless() {
        for c in [klein_twist_1(), klein_twist_2()] {
            assert!(c.is_smooth());
            assert!(c.rational_points(1, 1 << 20).unwrap().is_empty());
        }
    }

    #[test]
    fn orbit_fixtures_are_smooth() {
        assert!(char3_orbit8().is_smooth());
        assert!(char3_orbit7().is_smooth());
        assert!(char3_orbit6().is_smooth());
    }

    #[test]
    fn galois_extremal_is_singular() {
        assert!(!by_name("galois_extremal", None).unwrap().is_smooth());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(by_name("nope", None), Err(Error::UnknownFixture(_))));
        assert!(matches!(by_name("char2_family9", None), Err(Error::UnknownFixture(_))));
    }
}
