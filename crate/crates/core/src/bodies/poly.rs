//! Polynomials in the coordinates `u1..un`, used by the perturbed-ball
//! support catalog entry. Syntax: sums of terms `c*u1^a*u2^b`, e.g.
//! `u1^2*u2 - 0.5*u3 + 2`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    /// Exponent per coordinate; length equals the ambient dimension.
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn eval(&self, z: &Vector) -> f64 {
        self.exps
            .iter()
            .enumerate()
            .fold(self.coef, |acc, (i, &e)| acc * z[i].powi(e as i32))
    }

    /// Value of `d/dz_i` of the monomial, excluding the coefficient-free
    /// short cut when the exponent is zero.
    fn partial(&self, z: &Vector, i: usize) -> f64 {
        let ei = self.exps[i];
        if ei == 0 {
            return 0.0;
        }
        let mut acc = self.coef * ei as f64;
        for (j, &e) in self.exps.iter().enumerate() {
            let e = if j == i { e - 1 } else { e };
            acc *= z[j].powi(e as i32);
        }
        acc
    }

    fn second_partial(&self, z: &Vector, i: usize, k: usize) -> f64 {
        let mut exps = self.exps.clone();
        let mut acc = self.coef;
        for idx in [i, k] {
            if exps[idx] == 0 {
                return 0.0;
            }
            acc *= exps[idx] as f64;
            exps[idx] -= 1;
        }
        exps.iter()
            .enumerate()
            .fold(acc, |a, (j, &e)| a * z[j].powi(e as i32))
    }

    pub fn gradient(&self, z: &Vector) -> Vector {
        Vector::from_fn(z.len(), |i, _| self.partial(z, i))
    }

    pub fn hessian(&self, z: &Vector) -> Matrix {
        Matrix::from_fn(z.len(), z.len(), |i, k| self.second_partial(z, i, k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let err = |msg: String| Error::Parse(format!("polynomial `{text}`: {msg}"));
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty".into()));
        }
        // split into signed terms; `e+`/`e-` inside float literals is kept
        let mut pieces: Vec<(f64, String)> = Vec::new();
        let mut sign = 1.0;
        let mut cur = String::new();
        let chars: Vec<char> = cleaned.chars().collect();
        for (idx, &c) in chars.iter().enumerate() {
            let in_float_exp = idx >= 2
                && matches!(chars[idx - 1], 'e' | 'E')
                && chars[idx - 2].is_ascii_digit();
            if (c == '+' || c == '-') && !in_float_exp {
                if cur.ends_with('*') || cur.ends_with('^') {
                    return Err(err(format!("dangling operator at {idx}")));
                }
                if !cur.is_empty() {
                    pieces.push((sign, std::mem::take(&mut cur)));
                    sign = 1.0;
                }
                if c == '-' {
                    sign = -sign;
                }
                continue;
            }
            cur.push(c);
        }
        if cur.is_empty() {
            return Err(err("trailing operator".into()));
        }
        pieces.push((sign, cur));

        let mut terms = Vec::with_capacity(pieces.len());
        for (sign, piece) in pieces {
            let mut coef = sign;
            let mut exps = vec![0u32; dim];
            for factor in piece.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor".into()));
                }
                if let Some(rest) = factor.strip_prefix('u') {
                    let (idx, power) = match rest.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|e| err(e.to_string()))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| err(format!("bad variable `{factor}`")))?;
                    if idx == 0 || idx > dim {
                        return Err(err(format!("variable u{idx} outside dimension {dim}")));
                    }
                    exps[idx - 1] += power;
                } else {
                    let v: f64 = factor.parse().map_err(|_| err(format!("bad factor `{factor}`")))?;
                    coef *= v;
                }
            }
            terms.push(Monomial { coef, exps });
        }
        Ok(Self { dim, terms })
    }

    pub fn eval(&self, z: &Vector) -> f64 {
        self.terms.iter().map(|m| m.eval(z)).sum()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for m in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", m.coef)?;
            for (i, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*u{}", i + 1)?,
                    _ => write!(f, "*u{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    #[test]
    fn parses_catalog_example() {
        let p = Polynomial::parse("u1^2*u2", 2).unwrap();
        assert_eq!(p.terms.len(), 1);
        assert_eq!(p.terms[0].exps, vec![2, 1]);
        assert!((p.eval(&v(&[0.5, 2.0])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn parses_signs_and_constants() {
        let p = Polynomial::parse("-u1 + 0.5*u2^3 - 2 + 1e-1*u1*u2", 2).unwrap();
        let z = v(&[0.3, -0.7]);
        let expected = -0.3 + 0.5 * (-0.7f64).powi(3) - 2.0 + 0.1 * 0.3 * -0.7;
        assert!((p.eval(&z) - expected).abs() < 1e-14);
        let q = Polynomial::parse("u1--u2", 2).unwrap();
        assert!((q.eval(&z) - (0.3 - 0.7)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Polynomial::parse("u3", 2).is_err());
        assert!(Polynomial::parse("u1*", 2).is_err());
        assert!(Polynomial::parse("x1", 2).is_err());
        assert!(Polynomial::parse("", 2).is_err());
        assert!(Polynomial::parse("u1+", 2).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = Polynomial::parse("u1^2*u2 - 0.3*u2^3*u3 + u1*u3", 3).unwrap();
        let z = v(&[0.4, -0.3, 0.8]);
        let step = 1e-5;
        for m in &p.terms {
            let g = m.gradient(&z);
            let h = m.hessian(&z);
            for i in 0..3 {
                let mut zp = z.clone();
                zp[i] += step;
                let mut zm = z.clone();
                zm[i] -= step;
                let fd = (m.eval(&zp) - m.eval(&zm)) / (2.0 * step);
                assert!((fd - g[i]).abs() < 1e-8);
                let gd = (m.gradient(&zp) - m.gradient(&zm)) / (2.0 * step);
                for k in 0..3 {
                    assert!((gd[k] - h[(k, i)]).abs() < 1e-8);
                }
            }
        }
    }
}
