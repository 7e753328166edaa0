//! Ordered polynomials in the spin components, such as `-0.5*S3*S3 + S1`.
//!
//! Words keep their operator order; no symmetrization is applied, so
//! `S1*S2` and `S2*S1` are distinct terms.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Complex, Real};
use crate::su2::{spin_matrices, OperatorMatrix, SpinContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinComponent {
    S1,
    S2,
    S3,
}

impl SpinComponent {
    pub const ALL: [SpinComponent; 3] = [Self::S1, Self::S2, Self::S3];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

impl fmt::Display for SpinComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.index() + 1)
    }
}

/// One term: a coefficient times an ordered word (empty word = identity).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinTerm<T: Real> {
    pub coefficient: Complex<T>,
    pub word: Vec<SpinComponent>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialSpinExpression<T: Real> {
    terms: Vec<SpinTerm<T>>,
}

impl<T: Real> PolynomialSpinExpression<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::zero().with_term(Complex::new(c, T::zero()), &[])
    }

    pub fn component(c: SpinComponent) -> Self {
        Self::zero().with_term(Complex::new(T::one(), T::zero()), &[c])
    }

    /// Adds a term; non-finite coefficients are rejected by [`Self::validate`].
    pub fn with_term(mut self, coefficient: Complex<T>, word: &[SpinComponent]) -> Self {
        self.terms.push(SpinTerm {
            coefficient,
            word: word.to_vec(),
        });
        self
    }

    pub fn with_real_term(self, coefficient: T, word: &[SpinComponent]) -> Self {
        self.with_term(Complex::new(coefficient, T::zero()), word)
    }

    /// `Σ v_i S_i`.
    pub fn linear(v: [T; 3]) -> Self {
        SpinComponent::ALL
            .iter()
            .zip(v)
            .filter(|(_, x)| *x != T::zero())
            .fold(Self::zero(), |e, (c, x)| e.with_real_term(x, &[*c]))
    }

    /// `H = −Σ D_ij S_i S_j − Σ B_i S_i`, with both orders of every
    /// off-diagonal pair kept.
    pub fn quadratic(d: [[T; 3]; 3], b: [T; 3]) -> Self {
        let mut e = Self::linear([-b[0], -b[1], -b[2]]);
        for (i, row) in d.iter().enumerate() {
            for (j, &dij) in row.iter().enumerate() {
                if dij != T::zero() {
                    e = e.with_real_term(-dij, &[SpinComponent::from_index(i), SpinComponent::from_index(j)]);
                }
            }
        }
        e
    }

    pub fn terms(&self) -> &[SpinTerm<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient == Complex::new(T::zero(), T::zero()))
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.word.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| SpinTerm {
                    coefficient: t.coefficient * factor,
                    word: t.word.clone(),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    /// Word-concatenation product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut word = a.word.clone();
                word.extend_from_slice(&b.word);
                terms.push(SpinTerm {
                    coefficient: a.coefficient * b.coefficient,
                    word,
                });
            }
        }
        Self { terms }
    }

    /// Commutator `[self, other]` as a word polynomial.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other)
            .add(&other.mul(self).scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            if !to_f64(t.coefficient.re).is_finite() || !to_f64(t.coefficient.im).is_finite() {
                return Err(Error::Domain("non-finite coefficient in spin expression".into()));
            }
        }
        Ok(())
    }

    /// The matrix of the expression in the spin-`S` representation.
    pub fn to_operator(&self, ctx: &SpinContext) -> Result<OperatorMatrix<T>> {
        self.validate()?;
        let sm = spin_matrices::<T>(ctx);
        let n = ctx.hilbert_dim();
        let mut total = OperatorMatrix::zeros(n);
        for t in &self.terms {
            let mut w = OperatorMatrix::identity(n);
            for c in &t.word {
                w = &w * sm.component(c.index());
            }
            total = &total + &w.scale(t.coefficient);
        }
        Ok(total)
    }

    /// Checks that the expression is a Hermitian operator for spin `S`.
    pub fn require_hermitian(&self, ctx: &SpinContext) -> Result<OperatorMatrix<T>> {
        let op = self.to_operator(ctx)?;
        let dev = op.hermiticity_deviation();
        let scale = op.max_abs().max(T::one());
        if dev > lit::<T>(1e-12) * scale {
            return Err(Error::NotHermitian {
                deviation: to_f64(dev),
            });
        }
        Ok(op)
    }

    /// Parses expressions like `-0.5*S3*S3 + 1.0*S1`, `S3^2`, `2 Sx Sy`, `I`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut out = Self::zero();
        for (sign, body) in split_terms(src)? {
            let mut coef = Complex::new(lit::<T>(sign), T::zero());
            let mut word = Vec::new();
            let mut factors = Vec::new();
            for piece in body.split('*') {
                if piece.trim().is_empty() {
                    return Err(Error::Parse(format!("empty factor in `{src}`")));
                }
                factors.extend(piece.split_whitespace());
            }
            for f in factors {
                let (base, power) = match f.split_once('^') {
                    Some((b, p)) => {
                        let p: usize = p
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad exponent in `{f}`")))?;
                        (b, p)
                    }
                    None => (f, 1),
                };
                if let Some(c) = component_of(base) {
                    word.extend(std::iter::repeat_n(c, power));
                } else if base == "I" {
                } else if let Some(im) = base.strip_suffix('i') {
                    let v: f64 = if im.is_empty() {
                        1.0
                    } else {
                        im.parse().map_err(|_| Error::Parse(format!("bad number `{base}`")))?
                    };
                    coef *= Complex::new(T::zero(), lit::<T>(v)).powu(power as u32);
                } else {
                    let v: f64 = base
                        .parse()
                        .map_err(|_| Error::Parse(format!("unknown factor `{base}`")))?;
                    coef *= lit::<T>(v.powi(power as i32));
                }
            }
            out = out.with_term(coef, &word);
        }
        out.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(out)
    }
}

fn component_of(s: &str) -> Option<SpinComponent> {
    match s {
        "S1" | "Sx" => Some(SpinComponent::S1),
        "S2" | "Sy" => Some(SpinComponent::S2),
        "S3" | "Sz" => Some(SpinComponent::S3),
        _ => None,
    }
}

/// Splits at top-level `+`/`−`, leaving exponent signs like `1e-3` alone.
fn split_terms(src: &str) -> Result<Vec<(f64, String)>> {
    let s = src.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut cur = String::new();
    for (k, &c) in chars.iter().enumerate() {
        let prev = chars[..k].iter().rev().find(|c| !c.is_whitespace()).copied();
        let in_exponent =
            matches!(prev, Some('e' | 'E')) && k >= 2 && chars[k - 2].is_ascii_digit();
        if (c == '+' || c == '-') && !in_exponent {
            if !cur.trim().is_empty() {
                out.push((sign, std::mem::take(&mut cur)));
                sign = 1.0;
            } else if matches!(prev, Some('*' | '^')) {
                return Err(Error::Parse(format!("misplaced sign in `{src}`")));
            } else {
                cur.clear();
            }
            if c == '-' {
                sign = -sign;
            }
        } else {
            cur.push(c);
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("trailing operator in `{src}`")));
    }
    out.push((sign, cur));
    Ok(out)
}

impl<T: Real> fmt::Display for PolynomialSpinExpression<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in &self.terms {
            let (re, im) = (to_f64(t.coefficient.re), to_f64(t.coefficient.im));
            let parts = [(re, ""), (im, "i")];
            for (k, (v, unit)) in parts.iter().enumerate() {
                if *v == 0.0 && !(k == 0 && im == 0.0) {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{v:?}{unit}")?;
                if t.word.is_empty() {
                    write!(f, "*I")?;
                }
                for c in &t.word {
                    write!(f, "*{c}")?;
                }
            }
        }
        Ok(())
    }
}
