//! Exact arithmetic in cyclotomic integer rings `Z[ξ_m]`.
//!
//! Elements are stored in the power basis `1, ξ, …, ξ^{φ(m)-1}`, reduced modulo the
//! `m`-th cyclotomic polynomial, so two values with the same conductor are equal as ring
//! elements exactly when their coefficient vectors agree.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("invalid conductor {0}: must be at least 1")]
    InvalidConductor(u32),
    #[error("conductor mismatch: {0} vs {1}; lift with embed() first")]
    ConductorMismatch(u32, u32),
    #[error("cannot embed conductor {from} into {to}: {from} does not divide {to}")]
    EmbeddingUndefined { from: u32, to: u32 },
    #[error("expected {expected} coefficients for conductor {conductor}, got {got}")]
    BadLength {
        conductor: u32,
        expected: usize,
        got: usize,
    },
}

/// Per-conductor reduction data, built once and shared.
#[derive(Debug)]
pub struct Ring {
    conductor: u32,
    modulus: Vec<i64>,
    /// `powers[e]` is the reduced coefficient vector of `ξ^e`, for `0 <= e < m`.
    powers: Vec<Vec<i64>>,
    /// `exp(2πik/m)` for `k < φ(m)`.
    basis: Vec<Complex64>,
}

impl Ring {
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Euler φ of the conductor, i.e. the dimension of the power basis.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    fn power_row(&self, e: i64) -> &[i64] {
        let m = self.conductor as i64;
        &self.powers[e.rem_euclid(m) as usize]
    }
}

type Cache<T> = OnceLock<RwLock<HashMap<u32, Arc<T>>>>;

static POLYS: Cache<Vec<i64>> = OnceLock::new();
static RINGS: Cache<Ring> = OnceLock::new();

fn cached<T>(cache: &Cache<T>, key: u32, build: impl FnOnce() -> T) -> Arc<T> {
    let lock = cache.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = lock.read().expect("cache poisoned").get(&key) {
        return Arc::clone(v);
    }
    let value = Arc::new(build());
    let mut guard = lock.write().expect("cache poisoned");
    Arc::clone(guard.entry(key).or_insert(value))
}

/// Coefficients of the `m`-th cyclotomic polynomial, ascending, monic.
///
/// Computed from `x^m - 1 = Π_{d|m} Φ_d` by exact division, cached per `m`.
pub fn cyclotomic_poly(m: u32) -> Result<Vec<i64>, CycError> {
    if m == 0 {
        return Err(CycError::InvalidConductor(m));
    }
    Ok(cyclotomic_poly_cached(m).as_ref().clone())
}

fn cyclotomic_poly_cached(m: u32) -> Arc<Vec<i64>> {
    cached(&POLYS, m, || {
        let mut num = vec![0i64; m as usize + 1];
        num[0] = -1;
        num[m as usize] = 1;
        for d in (1..m).filter(|d| m % d == 0) {
            num = div_exact_monic(&num, &cyclotomic_poly_cached(d));
        }
        num
    })
}

fn div_exact_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        if c != 0 {
            for (i, &d) in den.iter().enumerate() {
                rem[k + i] = rem[k + i]
                    .checked_sub(c.checked_mul(d).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Shared reduction data for conductor `m`.
pub fn ring(m: u32) -> Result<Arc<Ring>, CycError> {
    if m == 0 {
        return Err(CycError::InvalidConductor(m));
    }
    Ok(cached(&RINGS, m, || build_ring(m)))
}

fn build_ring(m: u32) -> Ring {
    let modulus = cyclotomic_poly_cached(m).as_ref().clone();
    let deg = modulus.len() - 1;
    let mut powers = Vec::with_capacity(m as usize);
    let mut cur = vec![0i64; deg];
    cur[0] = 1;
    for _ in 0..m {
        powers.push(cur.clone());
        // multiply by x and fold the overflow term back with the monic modulus
        let top = cur[deg - 1];
        for i in (1..deg).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..deg {
                cur[i] = cur[i]
                    .checked_sub(top.checked_mul(modulus[i]).expect("power table overflow"))
                    .expect("power table overflow");
            }
        }
    }
    let basis = (0..deg)
        .map(|k| {
            let (s, c) = (std::f64::consts::TAU * k as f64 / m as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect();
    Ring {
        conductor: m,
        modulus,
        powers,
        basis,
    }
}

/// An element of `Z[ξ_m]`.
#[derive(Clone)]
pub struct CycNum {
    ring: Arc<Ring>,
    coeffs: Vec<BigInt>,
}

impl CycNum {
    pub fn zero(m: u32) -> Result<Self, CycError> {
        let ring = ring(m)?;
        let coeffs = vec![BigInt::zero(); ring.degree()];
        Ok(CycNum { ring, coeffs })
    }

    pub fn one(m: u32) -> Result<Self, CycError> {
        Self::from_int(m, 1)
    }

    pub fn from_int(m: u32, k: i64) -> Result<Self, CycError> {
        let mut z = Self::zero(m)?;
        z.coeffs[0] = BigInt::from(k);
        Ok(z)
    }

    /// `ξ_m^j`, for any integer `j`.
    pub fn root_of_unity(m: u32, j: i64) -> Result<Self, CycError> {
        Self::from_terms(m, &[(j, 1)])
    }

    /// Already-reduced coefficient vector of length `φ(m)`.
    pub fn from_coeffs(m: u32, coeffs: Vec<BigInt>) -> Result<Self, CycError> {
        let ring = ring(m)?;
        if coeffs.len() != ring.degree() {
            return Err(CycError::BadLength {
                conductor: m,
                expected: ring.degree(),
                got: coeffs.len(),
            });
        }
        Ok(CycNum { ring, coeffs })
    }

    /// `Σ coeff · ξ^exp` over arbitrary integer exponents, reduced.
    pub fn from_terms(m: u32, terms: &[(i64, i64)]) -> Result<Self, CycError> {
        let ring = ring(m)?;
        let mut acc = vec![0i128; ring.degree()];
        for &(e, c) in terms {
            if c == 0 {
                continue;
            }
            for (a, &p) in acc.iter_mut().zip(ring.power_row(e)) {
                *a += c as i128 * p as i128;
            }
        }
        let coeffs = acc.into_iter().map(BigInt::from).collect();
        Ok(CycNum { ring, coeffs })
    }

    pub fn conductor(&self) -> u32 {
        self.ring.conductor
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn same_ring(&self, other: &Self) -> Result<(), CycError> {
        if self.ring.conductor != other.ring.conductor {
            return Err(CycError::ConductorMismatch(
                self.ring.conductor,
                other.ring.conductor,
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CycError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CycError> {
        self.same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycNum {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CycError> {
        self.same_ring(other)?;
        let coeffs = match (small(&self.coeffs), small(&other.coeffs)) {
            (Some(a), Some(b)) => mul_small(&self.ring, &a, &b),
            _ => mul_big(&self.ring, &self.coeffs, &other.coeffs),
        };
        Ok(CycNum {
            ring: Arc::clone(&self.ring),
            coeffs,
        })
    }

    /// Complex conjugate, `ξ ↦ ξ^{-1}`.
    pub fn conj(&self) -> Self {
        self.map_exponents(self.ring.conductor, |k| -k)
    }

    /// Image under `ξ_m ↦ ξ_{target}^{target/m}`.
    pub fn embed(&self, target: u32) -> Result<Self, CycError> {
        let m = self.ring.conductor;
        if target == 0 || target % m != 0 {
            return Err(CycError::EmbeddingUndefined { from: m, to: target });
        }
        let step = (target / m) as i64;
        Ok(self.map_exponents(target, |k| k * step))
    }

    fn map_exponents(&self, target: u32, f: impl Fn(i64) -> i64) -> Self {
        let ring = ring(target).expect("target conductor is positive");
        let mut out = vec![BigInt::zero(); ring.degree()];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(ring.power_row(f(k as i64))) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        CycNum { ring, coeffs: out }
    }

    /// Complex value `Σ c_k exp(2πik/m)` with Neumaier-compensated summation.
    pub fn to_complex(&self) -> Complex64 {
        let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
        for (c, b) in self.coeffs.iter().zip(&self.ring.basis) {
            if c.is_zero() {
                continue;
            }
            let c = c.to_f64().unwrap_or(f64::NAN);
            re.add(c * b.re);
            im.add(c * b.im);
        }
        Complex64::new(re.total(), im.total())
    }

    /// Largest absolute coefficient, as a quick size measure.
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

const SMALL_LIMIT: i64 = 1 << 31;

fn small(coeffs: &[BigInt]) -> Option<Vec<i64>> {
    coeffs
        .iter()
        .map(|c| c.to_i64().filter(|v| v.abs() < SMALL_LIMIT))
        .collect()
}

fn mul_small(ring: &Ring, a: &[i64], b: &[i64]) -> Vec<BigInt> {
    let deg = ring.degree();
    let mut prod = vec![0i128; 2 * deg - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] += x as i128 * y as i128;
        }
    }
    let (low, high) = prod.split_at_mut(deg);
    for (k, &c) in high.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (l, &p) in low.iter_mut().zip(ring.power_row((deg + k) as i64)) {
            *l += c * p as i128;
        }
    }
    low.iter().map(|&c| BigInt::from(c)).collect()
}

fn mul_big(ring: &Ring, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let deg = ring.degree();
    let mut prod = vec![BigInt::zero(); 2 * deg - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    let high = prod.split_off(deg);
    for (k, c) in high.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (l, &p) in prod.iter_mut().zip(ring.power_row((deg + k) as i64)) {
            if p != 0 {
                *l += c * p;
            }
        }
    }
    prod
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.ring.conductor == other.ring.conductor && self.coeffs == other.coeffs
    }
}

impl Eq for CycNum {}

impl Hash for CycNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.conductor.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for CycNum {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Conductor first, then lexicographic on the coefficient vector.
impl Ord for CycNum {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ring
            .conductor
            .cmp(&other.ring.conductor)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]@{}", self.ring.conductor)
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CycNum> for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait<CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            ring: Arc::clone(&self.ring),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithValue {
    Num(CycNum),
    Bool(bool),
}

/// Dispatch a ring operation by name. `Neg` ignores `y` apart from the conductor check.
pub fn cyc_arith(op: ArithOp, x: &CycNum, y: &CycNum) -> Result<ArithValue, CycError> {
    x.same_ring(y)?;
    Ok(match op {
        ArithOp::Add => ArithValue::Num(x.checked_add(y)?),
        ArithOp::Sub => ArithValue::Num(x.checked_sub(y)?),
        ArithOp::Mul => ArithValue::Num(x.checked_mul(y)?),
        ArithOp::Neg => ArithValue::Num(-x),
        ArithOp::Eq => ArithValue::Bool(x == y),
    })
}
