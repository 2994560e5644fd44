//! Finite coefficient sets, in particular `Ω_n = {(ξ_n^j - ξ_n^k)/(1 - ξ_n)}`.
//!
//! All elements of `Ω_n` live in `Z[ξ_{2n}]`; the half-integer rotations of the polar
//! description are the odd powers of `ξ_{2n}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::cyclotomic::{CycError, CycNum};

/// Safety margin added to the growth bound.
pub const GROWTH_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("invalid polygon order {0}: must be at least 2")]
    InvalidOrder(u32),
    #[error("coefficient set is empty")]
    Empty,
    #[error("elements have mixed conductors ({0} and {1})")]
    MixedConductors(u32, u32),
    #[error(transparent)]
    Cyc(#[from] CycError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Closure {
    pub negation: bool,
    pub conjugation: bool,
    pub contains_one: bool,
}

/// A finite, exactly deduplicated set of cyclotomic integers in canonical order.
#[derive(Debug, Clone)]
pub struct CoeffSet {
    order: Option<u32>,
    conductor: u32,
    elements: Vec<CycNum>,
    approx: Vec<Complex64>,
    index: HashMap<CycNum, usize>,
    closure: Closure,
    growth_bound: f64,
}

impl CoeffSet {
    /// Builds a set from arbitrary elements of `Z[ξ_conductor]`. `order` is the polygon
    /// order `n` when the set is `Ω_n`, and `None` for a free-standing set.
    pub fn new(
        order: Option<u32>,
        conductor: u32,
        elements: impl IntoIterator<Item = CycNum>,
    ) -> Result<Self, CoeffError> {
        let mut elements: Vec<CycNum> = elements.into_iter().collect();
        if let Some(bad) = elements.iter().find(|e| e.conductor() != conductor) {
            return Err(CoeffError::MixedConductors(conductor, bad.conductor()));
        }
        if elements.is_empty() {
            return Err(CoeffError::Empty);
        }
        elements.sort();
        elements.dedup();
        let mut approx: Vec<Complex64> = elements.iter().map(CycNum::to_complex).collect();
        let index: HashMap<CycNum, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        // conjugate pairs are mirrored bit for bit so float work at λ and conj(λ)
        // are exact mirror images
        for (i, e) in elements.iter().enumerate() {
            match index.get(&e.conj()) {
                Some(&j) if j > i => approx[j] = approx[i].conj(),
                Some(&j) if j == i => approx[i].im = 0.0,
                _ => {}
            }
        }
        let mut set = CoeffSet {
            order,
            conductor,
            elements,
            approx,
            index,
            closure: Closure {
                negation: false,
                conjugation: false,
                contains_one: false,
            },
            growth_bound: 0.0,
        };
        set.closure = closure_checks(&set);
        set.growth_bound = growth_bound(&set);
        Ok(set)
    }

    /// Convenience constructor for sets of rational integers.
    pub fn from_integers(values: &[i64]) -> Result<Self, CoeffError> {
        let elements = values
            .iter()
            .map(|&v| CycNum::from_int(1, v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(None, 1, elements)
    }

    pub fn order(&self) -> Option<u32> {
        self.order
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CycNum] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &CycNum {
        &self.elements[i]
    }

    pub fn approx(&self) -> &[Complex64] {
        &self.approx
    }

    pub fn index_of(&self, x: &CycNum) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &CycNum) -> bool {
        self.index.contains_key(x)
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    /// The bound `L`, including [`GROWTH_MARGIN`].
    pub fn growth_bound(&self) -> f64 {
        self.growth_bound
    }

    pub fn max_modulus(&self) -> f64 {
        self.approx.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn zero(&self) -> CycNum {
        CycNum::zero(self.conductor).expect("conductor validated at construction")
    }

    pub fn one(&self) -> CycNum {
        CycNum::one(self.conductor).expect("conductor validated at construction")
    }

    /// `true` when both sets have the same elements (order labels are ignored).
    pub fn ring_equal(&self, other: &CoeffSet) -> bool {
        self.conductor == other.conductor && self.elements == other.elements
    }

    pub fn to_json(&self) -> Value {
        #[derive(Serialize)]
        struct Out<'a> {
            n: Option<u32>,
            conductor: u32,
            elements: Vec<Vec<Value>>,
            approx: Vec<[f64; 2]>,
            #[serde(rename = "L")]
            l: f64,
            flags: &'a Closure,
        }
        serde_json::to_value(Out {
            n: self.order,
            conductor: self.conductor,
            elements: self
                .elements
                .iter()
                .map(|e| e.coeffs().iter().map(int_json).collect())
                .collect(),
            approx: self.approx.iter().map(|z| [z.re, z.im]).collect(),
            l: self.growth_bound,
            flags: &self.closure,
        })
        .expect("coefficient set serializes")
    }
}

/// Integers that fit in `i64` become JSON numbers, anything larger a decimal string.
pub fn int_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(c.to_string()),
    }
}

fn check_order(n: u32) -> Result<(), CoeffError> {
    if n < 2 {
        Err(CoeffError::InvalidOrder(n))
    } else {
        Ok(())
    }
}

/// `Ω_n` from its defining differences, embedded in `Z[ξ_{2n}]`.
pub fn omega_set(n: u32) -> Result<CoeffSet, CoeffError> {
    check_order(n)?;
    let m = 2 * n;
    let mut elements = Vec::with_capacity((n * n) as usize);
    for j in 0..n as i64 {
        for k in 0..n as i64 {
            // (ξ^j - ξ^k)/(1 - ξ) = ξ^k (1 + ξ + … + ξ^{j-k-1}) for j > k
            let (lo, hi, sign) = if j >= k { (k, j, 1) } else { (j, k, -1) };
            let terms: Vec<(i64, i64)> = (lo..hi).map(|e| (2 * e, sign)).collect();
            elements.push(CycNum::from_terms(m, &terms)?);
        }
    }
    CoeffSet::new(Some(n), m, elements)
}

/// `sin(kπ/n)/sin(π/n)` as an element of `Z[ξ_{2n}]`, for any integer `k`.
pub fn sin_ratio(n: u32, k: i64) -> CycNum {
    let m = 2 * n;
    let sign = k.signum();
    let k = k.abs();
    let terms: Vec<(i64, i64)> = (0..k).map(|t| (2 * t - k + 1, sign)).collect();
    CycNum::from_terms(m, &terms).expect("2n is a positive conductor")
}

/// One entry `ξ_{2n}^rotation · sin(ratio·π/n)/sin(π/n)` of the polar description.
#[derive(Debug, Clone)]
pub struct PolarTerm {
    pub rotation: i64,
    pub ratio: u32,
    pub value: CycNum,
}

/// All `(rotation, ratio)` pairs of the polar description of `Ω_n`, zero included.
///
/// Odd `n = 2p+1`: every rotation `0..2n` with ratios `0..=p`. Even `n`: even ratios
/// carry odd rotations and odd ratios carry even rotations, with ratios up to `n/2`.
pub fn omega_polar_terms(n: u32) -> Result<Vec<PolarTerm>, CoeffError> {
    check_order(n)?;
    let m = 2 * n;
    let mut pairs: Vec<(i64, u32)> = Vec::new();
    if n % 2 == 1 {
        let p = (n - 1) / 2;
        for l in 0..m as i64 {
            for r in 0..=p {
                pairs.push((l, r));
            }
        }
    } else {
        // n = 4p: even r up to 2p, odd r up to 2p-1; n = 4p+2: even r up to 2p, odd r up to 2p+1.
        let half = n / 2;
        let (max_even, max_odd) = if n % 4 == 0 {
            (half, half - 1)
        } else {
            (half - 1, half)
        };
        for l in 0..n as i64 {
            for r in (0..=max_even).step_by(2) {
                pairs.push((2 * l + 1, r));
            }
            for r in (1..=max_odd).step_by(2) {
                pairs.push((2 * l, r));
            }
        }
    }
    Ok(pairs
        .into_iter()
        .map(|(rotation, ratio)| {
            let value = &CycNum::root_of_unity(m, rotation).expect("valid conductor")
                * &sin_ratio(n, ratio as i64);
            PolarTerm {
                rotation,
                ratio,
                value,
            }
        })
        .collect())
}

/// `Ω_n` from its polar description.
pub fn omega_polar(n: u32) -> Result<CoeffSet, CoeffError> {
    let terms = omega_polar_terms(n)?;
    CoeffSet::new(Some(n), 2 * n, terms.into_iter().map(|t| t.value))
}

/// `sup{|a|, |ab|, |(a-b)c|}` over the set, plus [`GROWTH_MARGIN`].
///
/// The supremum factorises: `max|ab| = max|a|²` and `max|(a-b)c| = max|a-b| · max|c|`,
/// so only the pairwise differences need enumerating.
pub fn growth_bound(g: &CoeffSet) -> f64 {
    let max_abs = g.max_modulus();
    let mut max_diff: f64 = 0.0;
    for (i, a) in g.approx.iter().enumerate() {
        for b in &g.approx[i + 1..] {
            max_diff = max_diff.max((a - b).norm());
        }
    }
    max_abs.max(max_abs * max_abs).max(max_diff * max_abs) + GROWTH_MARGIN
}

pub fn closure_checks(g: &CoeffSet) -> Closure {
    Closure {
        negation: g.elements.iter().all(|e| g.contains(&-e)),
        conjugation: g.elements.iter().all(|e| g.contains(&e.conj())),
        contains_one: g.contains(&g.one()),
    }
}
