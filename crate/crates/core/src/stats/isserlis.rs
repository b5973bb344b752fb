//! Exact moments of polynomials in independent standard complex Gaussians.
//!
//! For independent `g_s` with `E|g_s|^2 = 1`, pairing gives
//! `E[prod_s g_s^{p_s} conj(g_s)^{q_s}] = prod_s [p_s = q_s] p_s!`
//! (each `g_s` must be paired with a `conj(g_s)`; there are `p_s!` ways).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{ModeIndex, Model};
use crate::randfield::slot_of;
use crate::{Basis, Complex};

/// Largest total degree accepted by the oracle.
pub const MAX_DEGREE: u32 = 8;

/// Largest number of pairings (or monomial pairs) enumerated by the oracle.
pub const PAIRING_BUDGET: u64 = 1_000_000;

/// `g_slot^p conj(g_slot)^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub slot: u64,
    pub p: u32,
    pub q: u32,
}

/// A finite sum of monomials with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Vec<Factor>, Complex>,
}

fn merge(a: &[Factor], b: &[Factor]) -> Vec<Factor> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].slot < b[j].slot) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].slot < a[i].slot {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(Factor { slot: a[i].slot, p: a[i].p + b[j].p, q: a[i].q + b[j].q });
            i += 1;
            j += 1;
        }
    }
    out
}

fn degree_of(m: &[Factor]) -> u32 {
    m.iter().map(|f| f.p + f.q).sum()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Expectation of one monomial.
fn monomial_expect(m: &[Factor]) -> f64 {
    m.iter().map(|f| if f.p == f.q { factorial(f.p) } else { 0.0 }).product()
}

fn pairings(m: &[Factor]) -> u64 {
    m.iter().map(|f| if f.p == f.q { factorial(f.p) as u64 } else { 0 }).product()
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex) -> Self {
        let mut p = Self::zero();
        p.push(Vec::new(), c);
        p
    }

    /// `coeff * g_slot` (or `coeff * conj(g_slot)`).
    pub fn var(slot: u64, conj: bool, coeff: Complex) -> Self {
        let f = if conj { Factor { slot, p: 0, q: 1 } } else { Factor { slot, p: 1, q: 0 } };
        let mut p = Self::zero();
        p.push(alloc::vec![f], coeff);
        p
    }

    fn push(&mut self, key: Vec<Factor>, c: Complex) {
        if c == Complex::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry(key).or_insert(Complex::new(0.0, 0.0));
        *e += c;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Factor], Complex)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| degree_of(k)).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.push(k.clone(), *v);
        }
        out
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for (k, v) in &other.terms {
            self.push(k.clone(), *v);
        }
    }

    pub fn scale(&self, c: Complex) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, v) in &self.terms {
            out.push(k.clone(), v * c);
        }
        out
    }

    pub fn conj(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, v) in &self.terms {
            let key = k.iter().map(|f| Factor { slot: f.slot, p: f.q, q: f.p }).collect();
            out.push(key, v.conj());
        }
        out
    }

    /// Product, refusing results above [`MAX_DEGREE`] or the term budget.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        let work = self.terms.len() as u64 * other.terms.len() as u64;
        if work > PAIRING_BUDGET {
            return Err(Error::ResourceExhausted(format!(
                "product of {} by {} terms",
                self.terms.len(),
                other.terms.len()
            )));
        }
        if self.degree() + other.degree() > MAX_DEGREE {
            return Err(Error::invalid(format!("degree above {MAX_DEGREE}")));
        }
        let mut out = Polynomial::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                out.push(merge(ka, kb), va * vb);
            }
        }
        Ok(out)
    }
}

/// Exact `E[f]` by pairing.
pub fn isserlis_expect(f: &Polynomial) -> Result<Complex> {
    if f.degree() > MAX_DEGREE {
        return Err(Error::invalid(format!("degree {} exceeds {MAX_DEGREE}", f.degree())));
    }
    let total: u64 = f.terms.keys().map(|k| pairings(k)).fold(0u64, |a, b| a.saturating_add(b));
    if total > PAIRING_BUDGET {
        return Err(Error::ResourceExhausted(format!("{total} pairings")));
    }
    Ok(f.terms.iter().map(|(k, v)| v * monomial_expect(k)).sum())
}

/// Exact `E|f|^2`, pairing only monomials with matching charges
/// `p_s - q_s` (all other cross terms vanish).
pub fn second_moment(f: &Polynomial) -> Result<f64> {
    if 2 * f.degree() > MAX_DEGREE {
        return Err(Error::invalid(format!("degree {} of |f|^2 exceeds {MAX_DEGREE}", 2 * f.degree())));
    }
    let mut groups: BTreeMap<Vec<(u64, i64)>, Vec<(&Vec<Factor>, Complex)>> = BTreeMap::new();
    for (k, v) in &f.terms {
        let charge: Vec<(u64, i64)> = k
            .iter()
            .filter(|x| x.p != x.q)
            .map(|x| (x.slot, x.p as i64 - x.q as i64))
            .collect();
        groups.entry(charge).or_default().push((k, *v));
    }
    let work: u64 = groups.values().map(|g| (g.len() as u64) * (g.len() as u64)).sum();
    if work > PAIRING_BUDGET {
        return Err(Error::ResourceExhausted(format!("{work} monomial pairs")));
    }
    let mut acc = Complex::new(0.0, 0.0);
    for g in groups.values() {
        for (ka, va) in g {
            for (kb, vb) in g {
                let conj_b: Vec<Factor> = kb.iter().map(|x| Factor { slot: x.slot, p: x.q, q: x.p }).collect();
                acc += va * vb.conj() * monomial_expect(&merge(ka, &conj_b));
            }
        }
    }
    Ok(acc.re)
}

/// Symbolic circle field: coefficient `c_k` as a polynomial, `|k| <= n`.
pub type SymField = BTreeMap<i64, Polynomial>;

/// `phi_n` for a circle model with the same Gaussian slots as
/// [`crate::randfield::sample_mu`].
pub fn symbolic_circle(model: Model, n: usize) -> Result<SymField> {
    if !model.is_circle() {
        return Err(Error::unsupported("symbolic fields are built for circle models"));
    }
    let basis = Basis::new(model, n)?;
    let mut out = SymField::new();
    for k in -(n as i64)..=n as i64 {
        let s = model.sigma(ModeIndex::Circle(k));
        let c = Complex::new(s, 0.0);
        let p = if model == Model::BenjaminOno {
            match k {
                0 => Polynomial::zero(),
                k if k > 0 => Polynomial::var(k as u64 - 1, false, c),
                k => Polynomial::var(k.unsigned_abs() - 1, true, c),
            }
        } else {
            Polynomial::var(slot_of(&basis, (k + n as i64) as usize), false, c)
        };
        out.insert(k, p);
    }
    Ok(out)
}

/// Keep modes with `|k| <= m`.
pub fn truncate(f: &SymField, m: usize) -> SymField {
    f.iter().filter(|(k, _)| k.unsigned_abs() as usize <= m).map(|(k, v)| (*k, v.clone())).collect()
}

/// Coefficients of the pointwise product.
pub fn convolve(a: &SymField, b: &SymField) -> Result<SymField> {
    let mut out = SymField::new();
    for (ka, pa) in a {
        for (kb, pb) in b {
            let prod = pa.mul(pb)?;
            out.entry(ka + kb).or_default().add_assign(&prod);
        }
    }
    Ok(out)
}

/// Coefficients of the complex conjugate field.
pub fn conjugate(a: &SymField) -> SymField {
    a.iter().map(|(k, v)| (-k, v.conj())).collect()
}

/// `||u||^2 = sum |c_k|^2`.
pub fn mass(a: &SymField) -> Result<Polynomial> {
    let mut out = Polynomial::zero();
    for p in a.values() {
        out.add_assign(&p.mul(&p.conj())?);
    }
    Ok(out)
}

/// `int |u|^4 = sum_k |(u^2)_k|^2`.
pub fn quartic_integral(a: &SymField) -> Result<Polynomial> {
    mass(&convolve(a, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex {
        Complex::new(1.0, 0.0)
    }

    #[test]
    fn single_gaussian_moments() {
        let g = Polynomial::var(3, false, one());
        let g2 = g.mul(&g.conj()).unwrap();
        assert_eq!(isserlis_expect(&g2).unwrap(), one());
        let g4 = g2.mul(&g2).unwrap();
        assert_eq!(isserlis_expect(&g4).unwrap(), Complex::new(2.0, 0.0));
        assert_eq!(isserlis_expect(&g.mul(&g).unwrap()).unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(second_moment(&g2).unwrap(), 2.0);
    }

    #[test]
    fn second_moment_matches_expanded_product() {
        let a = Polynomial::var(0, false, Complex::new(0.5, 0.2));
        let b = Polynomial::var(1, true, Complex::new(-1.0, 0.3));
        let f = a.mul(&b).unwrap().add(&a.mul(&a.conj()).unwrap()).add(&Polynomial::constant(one()));
        let direct = isserlis_expect(&f.mul(&f.conj()).unwrap()).unwrap();
        assert!((second_moment(&f).unwrap() - direct.re).abs() < 1e-14);
        assert!(direct.im.abs() < 1e-14);
    }

    #[test]
    fn limits_are_enforced() {
        let g = Polynomial::var(0, false, one());
        let mut p = g.clone();
        for _ in 0..8 {
            p = p.mul(&g).unwrap_or(p);
        }
        assert_eq!(p.degree(), 8);
        assert!(p.mul(&g).is_err());
        let wide: Polynomial = (0..1001u64).fold(Polynomial::zero(), |acc, s| acc.add(&Polynomial::var(s, false, one())));
        assert!(matches!(wide.mul(&wide), Err(Error::ResourceExhausted(_))));
    }

    #[test]
    fn half_wave_quartic_mean() {
        // E f_N = 2 sum_{|n| <= N} (1 + |n|)^{-2}.
        for n in [1usize, 2, 4] {
            let phi = symbolic_circle(Model::HalfWave, n).unwrap();
            let m = mass(&phi).unwrap();
            let f = quartic_integral(&phi).unwrap().scale(-one()).add(&m.mul(&m).unwrap().scale(Complex::new(2.0, 0.0)));
            let want: f64 = (-(n as i64)..=n as i64).map(|k| 2.0 / (1.0 + k.abs() as f64).powi(2)).sum();
            assert!((isserlis_expect(&f).unwrap().re - want).abs() < 1e-12, "n={n}");
        }
    }
}
