//! Text forms of ternary forms.
//!
//! ```text
//! expr    := [sign] term (sign term)*
//! term    := factor ([*] factor)*
//! factor  := integer | g[^k] | a[^k] | #encoding | x[^e] | y[^e] | z[^e]
//! ```
//!
//! `g` (alias `a`) is the generator of the field, integers are reduced mod p
//! and `#n` is the element with integer encoding `n`.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::forms::ternary::{monomial_count, monomials};
use crate::forms::TernaryForm;

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u128> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse { pos: start, msg: "expected a number".into() });
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse::<u128>()
            .map_err(|_| Error::Parse { pos: start, msg: "number too large".into() })
    }

    fn exponent(&mut self) -> Result<u128> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.number()
        } else {
            Ok(1)
        }
    }
}

fn reduce_int(ctx: &FieldCtx, v: u128) -> FieldElement {
    ctx.from_u64((v % ctx.characteristic() as u128) as u64)
}

/// Parses a homogeneous polynomial in `x, y, z` over `ctx`.
pub fn parse_ternary(text: &str, ctx: &FieldCtx) -> Result<TernaryForm> {
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let mut terms: Vec<(FieldElement, [u32; 3], usize)> = Vec::new();
    let mut first = true;
    loop {
        let mut negate = false;
        match lx.peek() {
            None if first => return Err(Error::Parse { pos: lx.pos, msg: "empty expression".into() }),
            None => break,
            Some(b'+') => lx.pos += 1,
            Some(b'-') => {
                negate = true;
                lx.pos += 1;
            }
            Some(_) if first => {}
            Some(c) => {
                return Err(Error::Parse {
                    pos: lx.pos,
                    msg: format!("expected '+' or '-', found {:?}", c as char),
                })
            }
        }
        first = false;
        let start = {
            lx.skip_ws();
            lx.pos
        };
        let mut coeff = ctx.one();
        let mut exps = [0u32; 3];
        let mut factors = 0;
        loop {
            let c = match lx.peek() {
                Some(c) => c,
                None => break,
            };
            if c == b'*' {
                if factors == 0 {
                    return Err(Error::Parse { pos: lx.pos, msg: "unexpected '*'".into() });
                }
                lx.pos += 1;
                if matches!(lx.peek(), None | Some(b'+') | Some(b'-') | Some(b'*')) {
                    return Err(Error::Parse { pos: lx.pos, msg: "expected a factor".into() });
                }
                continue;
            }
            match c {
                b'0'..=b'9' => {
                    let v = lx.number()?;
                    coeff = ctx.mul(coeff, reduce_int(ctx, v));
                }
                b'#' => {
                    lx.pos += 1;
                    let at = lx.pos;
                    let v = lx.number()?;
                    let e = ctx
                        .from_encoding(v)
                        .map_err(|_| Error::Parse { pos: at, msg: "element encoding out of range".into() })?;
                    coeff = ctx.mul(coeff, e);
                }
                b'g' | b'a' => {
                    lx.pos += 1;
                    let e = lx.exponent()?;
                    coeff = ctx.mul(coeff, ctx.pow(ctx.generator(), e));
                }
                b'x' | b'y' | b'z' => {
                    lx.pos += 1;
                    let at = lx.pos;
                    let e = lx.exponent()?;
                    let e = u32::try_from(e)
                        .ok()
                        .filter(|&e| e <= 64)
                        .ok_or(Error::Parse { pos: at, msg: "exponent too large".into() })?;
                    exps[(c - b'x') as usize] += e;
                }
                b'+' | b'-' => break,
                other => {
                    return Err(Error::Parse {
                        pos: lx.pos,
                        msg: format!("unknown symbol {:?}", other as char),
                    })
                }
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(Error::Parse { pos: lx.pos, msg: "expected a term".into() });
        }
        if negate {
            coeff = ctx.neg(coeff);
        }
        terms.push((coeff, exps, start));
    }
    let d = terms[0].1.iter().sum::<u32>();
    for (_, e, _) in &terms {
        if e.iter().sum::<u32>() != d {
            return Err(Error::NotHomogeneous);
        }
    }
    if monomial_count(d) > 1 << 16 {
        return Err(Error::Invalid("degree too large".into()));
    }
    let mut f = TernaryForm::zero(ctx, d);
    for (c, e, _) in terms {
        let cur = f.coeff(e);
        f.set_coeff(e, ctx.add(cur, c));
    }
    Ok(f)
}

/// Writes a form in the grammar accepted by [`parse_ternary`].
pub fn serialize_ternary(f: &TernaryForm) -> String {
    let ctx = f.ctx();
    let mut parts = Vec::new();
    for (e, c) in f.terms() {
        let mono = TernaryForm::monomial_text(e);
        for coeff in coefficient_texts(ctx, c) {
            parts.push(if mono == "1" {
                coeff
            } else if coeff == "1" {
                mono.clone()
            } else {
                format!("{coeff}*{mono}")
            });
        }
    }
    if parts.is_empty() {
        let d = f.degree();
        return if d == 0 { "0".into() } else { format!("0*{}", TernaryForm::monomial_text([d, 0, 0])) };
    }
    parts.join(" + ")
}

fn coefficient_texts(ctx: &FieldCtx, c: FieldElement) -> Vec<String> {
    if ctx.is_prime_field() {
        return vec![ctx.encoding(c).to_string()];
    }
    let base = ctx.base().expect("extension");
    if !base.is_prime_field() {
        return vec![format!("#{}", ctx.encoding(c))];
    }
    ctx.coordinates(c)
        .into_iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero())
        .map(|(i, d)| {
            let v = base.encoding(d);
            match (i, v) {
                (0, v) => v.to_string(),
                (1, 1) => "g".into(),
                (1, v) => format!("{v}*g"),
                (i, 1) => format!("g^{i}"),
                (i, v) => format!("{v}*g^{i}"),
            }
        })
        .collect()
}

/// Comma-separated element encodings in storage order.
pub fn coefficient_text(f: &TernaryForm) -> String {
    let ctx = f.ctx();
    f.coeffs().iter().map(|c| ctx.encoding(*c).to_string()).collect::<Vec<_>>().join(",")
}

/// Parses [`coefficient_text`] output for a form of degree `d`.
pub fn parse_coefficients(text: &str, d: u32, ctx: &FieldCtx) -> Result<TernaryForm> {
    let mut v = Vec::new();
    let mut pos = 0;
    for part in text.split(',') {
        let n: u128 = part.trim().parse().map_err(|_| Error::Parse {
            pos,
            msg: format!("expected an element encoding, found {part:?}"),
        })?;
        v.push(ctx.from_encoding(n).map_err(|_| Error::Parse { pos, msg: "encoding out of range".into() })?);
        pos += part.len() + 1;
    }
    if v.len() != monomials(d).len() {
        return Err(Error::Parse {
            pos: text.len(),
            msg: format!("expected {} coefficients, got {}", monomials(d).len(), v.len()),
        });
    }
    Ok(TernaryForm::new(ctx, d, v))
}
