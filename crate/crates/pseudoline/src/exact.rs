//! Exact arithmetic for the polygon-based generators.
//!
//! The regular-polygon constructions need coordinates of the form
//! `cos(pi*a/K)`, which are not rational. We work in the cyclotomic field
//! `Q(zeta_m)` with `zeta_m = exp(2*pi*i/m)` and `m` divisible by 4, so all
//! needed cosines and sines are field elements. Elements are polynomials in
//! `zeta` with rational coefficients, reduced modulo the cyclotomic
//! polynomial, which makes equality (and hence incidence) testing exact.
//!
//! Signs of real elements are decided by a fast f64 evaluation with a
//! conservative error bound; in the rare inconclusive case we fall back to
//! exact rational interval arithmetic with Taylor enclosures of the
//! cosines.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// 100 decimal digits of pi; the true value lies strictly between
/// `PI_DIGITS/10^100` and `(PI_DIGITS+1)/10^100`.
const PI_DIGITS: &str = "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

fn pi_bounds() -> (BigRational, BigRational) {
    let num: BigInt = PI_DIGITS.parse().unwrap();
    let den = BigInt::from(10u8).pow(100);
    (
        BigRational::new(num.clone(), den.clone()),
        BigRational::new(num + 1, den),
    )
}

// ---------------------------------------------------------------------
// dense polynomial helpers (little endian coefficients)
// ---------------------------------------------------------------------

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Exact division of integer polynomials (the remainder must vanish).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    let mut den = den.to_vec();
    poly_trim(&mut den);
    let lead = den.last().expect("division by zero polynomial").clone();
    let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(den.len()) + 1];
    while rem.len() >= den.len() && !rem.is_empty() {
        let k = rem.len() - den.len();
        let q = rem.last().unwrap() / &lead;
        assert!(
            (&q * &lead) == *rem.last().unwrap(),
            "non-exact polynomial division"
        );
        quot[k] = q.clone();
        for (i, d) in den.iter().enumerate() {
            let t = &rem[k + i] - d * &q;
            rem[k + i] = t;
        }
        poly_trim(&mut rem);
    }
    assert!(rem.is_empty(), "non-zero remainder in exact division");
    poly_trim(&mut quot);
    quot
}

/// The m-th cyclotomic polynomial with integer coefficients.
fn cyclotomic(m: usize) -> Vec<BigInt> {
    // x^m - 1 divided by the cyclotomic polynomials of all proper divisors.
    let mut num = vec![BigInt::zero(); m + 1];
    num[0] = BigInt::from(-1);
    num[m] = BigInt::one();
    let mut out = num;
    for d in 1..m {
        if m % d == 0 {
            out = poly_div_exact(&out, &cyclotomic(d));
        }
    }
    out
}

// ---------------------------------------------------------------------
// the field
// ---------------------------------------------------------------------

pub struct CycloField {
    pub m: usize,
    pub phi: usize,
    /// `x^k mod Phi_m` for `k < m`, as reduced coefficient vectors.
    zeta_pow: Vec<Vec<BigRational>>,
    cos_f64: Vec<f64>,
    cos_enclosures: RefCell<BTreeMap<usize, (BigRational, BigRational)>>,
}

impl fmt::Debug for CycloField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloField(m={})", self.m)
    }
}

impl CycloField {
    /// `m` must be divisible by 4 so that `i = zeta^(m/4)` is available and
    /// sines reduce to cosines.
    pub fn new(m: usize) -> Result<Rc<Self>> {
        if m % 4 != 0 || m == 0 {
            return Err(Error::BadParameter(format!(
                "cyclotomic order {m} must be a positive multiple of 4"
            )));
        }
        let modulus_int = cyclotomic(m);
        let phi = modulus_int.len() - 1;
        let modulus: Vec<BigRational> = modulus_int
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();

        // Iteratively reduce powers of zeta.
        let mut zeta_pow: Vec<Vec<BigRational>> = Vec::with_capacity(m);
        for k in 0..m {
            if k < phi {
                let mut v = vec![BigRational::zero(); phi];
                v[k] = BigRational::one();
                zeta_pow.push(v);
            } else {
                // x * (previous power), reduced by the monic modulus.
                let prev = &zeta_pow[k - 1];
                let mut v = vec![BigRational::zero(); phi + 1];
                for (i, c) in prev.iter().enumerate() {
                    v[i + 1] = c.clone();
                }
                let lead = v[phi].clone();
                if !lead.is_zero() {
                    for i in 0..phi {
                        let t = &v[i] - &lead * &modulus[i];
                        v[i] = t;
                    }
                }
                v.pop();
                zeta_pow.push(v);
            }
        }

        let cos_f64: Vec<f64> = (0..m)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / m as f64).cos())
            .collect();

        Ok(Rc::new(CycloField {
            m,
            phi,
            zeta_pow,
            cos_f64,
            cos_enclosures: RefCell::new(BTreeMap::new()),
        }))
    }

    fn reduce_product(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.phi];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let prod = ai * bj;
                let k = i + j;
                if k < self.phi {
                    out[k] += prod;
                } else {
                    // zeta^k in reduced form (k < 2*phi - 1 < m always
                    // since phi <= m/2 for m > 2... not in general; reduce
                    // exponent mod m first).
                    let k = k % self.m;
                    for (t, c) in self.zeta_pow[k].iter().enumerate() {
                        if !c.is_zero() {
                            out[t] += &prod * c;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn zero(self: &Rc<Self>) -> CycEl {
        CycEl {
            f: Rc::clone(self),
            c: vec![BigRational::zero(); self.phi],
        }
    }

    pub fn from_rational(self: &Rc<Self>, q: BigRational) -> CycEl {
        let mut e = self.zero();
        e.c[0] = q;
        e
    }

    pub fn from_int(self: &Rc<Self>, v: i64) -> CycEl {
        self.from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zeta(self: &Rc<Self>, t: i64) -> CycEl {
        let t = t.rem_euclid(self.m as i64) as usize;
        CycEl {
            f: Rc::clone(self),
            c: self.zeta_pow[t].clone(),
        }
    }

    /// `cos(2*pi*t/m)` as a field element.
    pub fn cos2pi(self: &Rc<Self>, t: i64) -> CycEl {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.zeta(t).add(&self.zeta(-t)).scale(&half)
    }

    /// `sin(2*pi*t/m)` as a field element.
    pub fn sin2pi(self: &Rc<Self>, t: i64) -> CycEl {
        self.cos2pi(self.m as i64 / 4 - t)
    }

    /// Rigorous rational enclosure of `cos(2*pi*t/m)`.
    fn cos_enclosure(&self, t: usize) -> (BigRational, BigRational) {
        if let Some(enc) = self.cos_enclosures.borrow().get(&t) {
            return enc.clone();
        }
        let enc = enclose_cos2pi(t as i64, self.m as i64);
        self.cos_enclosures.borrow_mut().insert(t, enc.clone());
        enc
    }
}

/// Rigorous enclosure of `cos(2*pi*q)` for `q = t/m`, via quadrant symmetry
/// and a Taylor sum with explicit remainder.
fn enclose_cos2pi(t: i64, m: i64) -> (BigRational, BigRational) {
    let t = t.rem_euclid(m);
    let q = BigRational::new(BigInt::from(t), BigInt::from(m));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if q > half {
        return enclose_cos2pi(m - t, m);
    }
    if q > quarter {
        // cos(2 pi q) = -cos(2 pi (1/2 - q)); m is always even here.
        assert!(m % 2 == 0);
        let (lo, hi) = enclose_cos2pi(m / 2 - t, m);
        return (-hi, -lo);
    }
    // x = 2*pi*q in [0, pi/2]
    let (pi_lo, pi_hi) = pi_bounds();
    let two_q = &q * BigRational::from_integer(BigInt::from(2));
    let x_lo = &two_q * &pi_lo;
    let x_hi = &two_q * &pi_hi;
    // Evaluate the Taylor polynomial at a truncation of the midpoint.
    let mid = (&x_lo + &x_hi) * BigRational::new(BigInt::one(), BigInt::from(2));
    let scale = BigInt::from(10u8).pow(110);
    let mid_trunc = BigRational::new(
        (mid.numer() * &scale) / mid.denom(),
        scale,
    );
    let slack = (&x_hi - &x_lo) + BigRational::new(BigInt::one(), BigInt::from(10u8).pow(105));
    let x2 = &mid_trunc * &mid_trunc;
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let terms = 26usize;
    for j in 1..=terms {
        term = &term * &x2
            / BigRational::from_integer(BigInt::from((2 * j - 1) as u64 * (2 * j) as u64));
        if j % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
    }
    // Remainder bound: next Taylor term at x <= 1.58, plus the distance
    // between the true x and the truncated midpoint.
    let next = &term * &x2
        / BigRational::from_integer(BigInt::from((2 * terms + 1) as u64 * (2 * terms + 2) as u64));
    let err = next.abs() + slack;
    // Round outward to 60 digits; the exact Taylor rationals have
    // thousands of digits and would poison every later multiplication.
    let lo = &sum - &err;
    let hi = sum + err;
    (round_down(&lo, 60), round_up(&hi, 60))
}

fn round_down(q: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10u8).pow(digits);
    BigRational::new((q.numer() * &scale).div_floor(q.denom()), scale)
}

fn round_up(q: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10u8).pow(digits);
    BigRational::new((q.numer() * &scale).div_ceil(q.denom()), scale)
}

/// A real element of the cyclotomic field.
#[derive(Clone)]
pub struct CycEl {
    f: Rc<CycloField>,
    c: Vec<BigRational>,
}

impl fmt::Debug for CycEl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycEl({:.6})", self.approx_f64())
    }
}

impl CycEl {
    pub fn field(&self) -> &Rc<CycloField> {
        &self.f
    }

    pub fn add(&self, o: &CycEl) -> CycEl {
        CycEl {
            f: Rc::clone(&self.f),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &CycEl) -> CycEl {
        CycEl {
            f: Rc::clone(&self.f),
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, o: &CycEl) -> CycEl {
        CycEl {
            f: Rc::clone(&self.f),
            c: self.f.reduce_product(&self.c, &o.c),
        }
    }

    pub fn neg(&self) -> CycEl {
        CycEl {
            f: Rc::clone(&self.f),
            c: self.c.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> CycEl {
        CycEl {
            f: Rc::clone(&self.f),
            c: self.c.iter().map(|a| a * q).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    pub fn approx_f64(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .map(|(t, c)| c.to_f64().unwrap_or(f64::NAN) * self.f.cos_f64[t])
            .sum()
    }

    /// Exact sign of a real element.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        // Fast path: f64 evaluation with a conservative error bound.
        let mut val = 0.0f64;
        let mut mag = 0.0f64;
        let mut exact = true;
        for (t, c) in self.c.iter().enumerate() {
            match c.to_f64() {
                Some(x) if x.is_finite() => {
                    val += x * self.f.cos_f64[t];
                    mag += x.abs();
                }
                _ => {
                    exact = false;
                    break;
                }
            }
        }
        if exact {
            let bound = mag * 1e-12 + 1e-300;
            if val > bound {
                return 1;
            }
            if val < -bound {
                return -1;
            }
        }
        // Rigorous fallback: exact interval arithmetic.
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (t, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (elo, ehi) = self.f.cos_enclosure(t);
            if c.is_positive() {
                lo += c * &elo;
                hi += c * &ehi;
            } else {
                lo += c * &ehi;
                hi += c * &elo;
            }
        }
        if lo.is_positive() {
            1
        } else if hi.is_negative() {
            -1
        } else {
            // The element is provably nonzero (nonzero reduced coordinates)
            // but the enclosure straddles zero; our constructions never get
            // within 1e-50 of zero without being exactly zero.
            panic!("sign(): enclosure straddles zero for a nonzero element");
        }
    }
}

// ---------------------------------------------------------------------
// generic scalar used by the line-arrangement geometry
// ---------------------------------------------------------------------

/// Minimal scalar interface for the geometric pipeline: ring operations,
/// exact (or tolerance-based) sign, and an f64 view for output.
pub trait GeomScalar: Clone + fmt::Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sign(&self) -> i8;
    fn approx(&self) -> f64;
}

impl GeomScalar for BigRational {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sign(&self) -> i8 {
        if Zero::is_zero(self) {
            0
        } else if Signed::is_positive(self) {
            1
        } else {
            -1
        }
    }
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// f64 with an absolute tolerance for sign decisions (user-supplied float
/// line sets; the exact backends are used everywhere correctness matters).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsF64(pub f64);

pub const F64_EPS: f64 = 1e-9;

impl GeomScalar for EpsF64 {
    fn add(&self, o: &Self) -> Self {
        EpsF64(self.0 + o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        EpsF64(self.0 - o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        EpsF64(self.0 * o.0)
    }
    fn neg(&self) -> Self {
        EpsF64(-self.0)
    }
    fn sign(&self) -> i8 {
        if self.0.abs() <= F64_EPS {
            0
        } else if self.0 > 0.0 {
            1
        } else {
            -1
        }
    }
    fn approx(&self) -> f64 {
        self.0
    }
}

impl GeomScalar for CycEl {
    fn add(&self, o: &Self) -> Self {
        CycEl::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CycEl::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CycEl::mul(self, o)
    }
    fn neg(&self) -> Self {
        CycEl::neg(self)
    }
    fn sign(&self) -> i8 {
        CycEl::sign(self)
    }
    fn approx(&self) -> f64 {
        self.approx_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        // Phi_12 = x^4 - x^2 + 1
        let p = cyclotomic(12);
        let want: Vec<BigInt> = [1, 0, -1, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(p, want);
        assert_eq!(cyclotomic(36).len() - 1, 12);
    }

    #[test]
    fn trig_identities_hold_exactly() {
        let f = CycloField::new(36).unwrap();
        for t in 0..36 {
            let c = f.cos2pi(t);
            let s = f.sin2pi(t);
            let one = f.from_int(1);
            let sum = c.mul(&c).add(&s.mul(&s));
            assert!(sum.sub(&one).is_zero(), "cos^2+sin^2 != 1 at t={t}");
        }
        // cos(2pi/3) = -1/2 exactly
        let f12 = CycloField::new(12).unwrap();
        let c = f12.cos2pi(4);
        let minus_half = f12.from_rational(BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert!(c.sub(&minus_half).is_zero());
    }

    #[test]
    fn signs_match_f64() {
        let f = CycloField::new(36).unwrap();
        for t in 0..36i64 {
            let c = f.cos2pi(t);
            let approx = (2.0 * std::f64::consts::PI * t as f64 / 36.0).cos();
            if approx.abs() > 1e-6 {
                assert_eq!(c.sign(), if approx > 0.0 { 1 } else { -1 }, "t={t}");
            }
        }
    }

    #[test]
    fn rigorous_enclosure_brackets_cos() {
        for (t, m) in [(1i64, 36i64), (5, 36), (7, 12), (0, 12)] {
            let (lo, hi) = enclose_cos2pi(t, m);
            let truth = (2.0 * std::f64::consts::PI * t as f64 / m as f64).cos();
            assert!(lo.to_f64().unwrap() <= truth + 1e-12);
            assert!(hi.to_f64().unwrap() >= truth - 1e-12);
            assert!((&hi - &lo).to_f64().unwrap() < 1e-40);
        }
    }
}
