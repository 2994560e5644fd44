//! Truncated series `1 + Σ a_i z^i` with exact coefficients, their roots, and the
//! finite zero sets `Y^G_N`.

use std::fmt;
use std::io::Write;
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::coeffsets::CoeffSet;
use crate::cyclotomic::CycNum;

/// Default refusal threshold for full zero-set enumeration.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;
/// Default residual tolerance `|p(root)|`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
/// Roots closer than this are reported as a multiplicity cluster.
pub const CLUSTER_RADIUS: f64 = 1e-7;

const MAX_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("constant term must be exactly 1")]
    ConstantNotOne,
    #[error("series needs at least one coefficient")]
    Empty,
    #[error("coefficients have mixed conductors")]
    MixedConductors,
    #[error("coefficient index {0} is out of range for the coefficient set")]
    BadIndex(usize),
    #[error("coefficient at position {0} is not in the coefficient set")]
    NotAMember(usize),
    #[error("length must be at least 2, got {0}")]
    InvalidLength(usize),
    #[error("radius {0} must lie in [0, 1)")]
    InvalidRadius(f64),
    #[error("the coefficient set must contain 1")]
    MissingOne,
    #[error("root finding failed for {poly}: {reason}")]
    NumericFailure { poly: String, reason: String },
    #[error("enumeration of {count} polynomials exceeds the budget of {budget}")]
    BudgetExceeded { count: String, budget: u64 },
    #[error("polynomial index {0} out of range")]
    IndexOutOfRange(u64),
}

/// A truncated series `1 + a_1 z + … + a_{N-1} z^{N-1}` with exact coefficients.
///
/// `coeffs[0]` is always exactly one. The same type carries both members of `Q^G_N`
/// and the products `(1 + δ z^e)·p` that live in the wider ball `W`.
#[derive(Clone, PartialEq, Eq)]
pub struct GPoly {
    coeffs: Vec<CycNum>,
}

impl GPoly {
    pub fn new(coeffs: Vec<CycNum>) -> Result<Self, PolyError> {
        let first = coeffs.first().ok_or(PolyError::Empty)?;
        if !first.is_one() {
            return Err(PolyError::ConstantNotOne);
        }
        let m = first.conductor();
        if coeffs.iter().any(|c| c.conductor() != m) {
            return Err(PolyError::MixedConductors);
        }
        Ok(GPoly { coeffs })
    }

    /// Member of `Q^G_N` from the indices of `a_1, …, a_{N-1}` in canonical order.
    pub fn from_indices(g: &CoeffSet, indices: &[usize]) -> Result<Self, PolyError> {
        let mut coeffs = Vec::with_capacity(indices.len() + 1);
        coeffs.push(g.one());
        for &i in indices {
            if i >= g.len() {
                return Err(PolyError::BadIndex(i));
            }
            coeffs.push(g.element(i).clone());
        }
        Ok(GPoly { coeffs })
    }

    /// The length `N` (number of stored coefficients, constant term included).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn conductor(&self) -> u32 {
        self.coeffs[0].conductor()
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    /// Coefficient `i`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> CycNum {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| CycNum::zero(self.conductor()).expect("valid conductor"))
    }

    pub fn approx(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(CycNum::to_complex).collect()
    }

    /// Actual degree, ignoring exact trailing zeros.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    /// Complex coefficients up to the actual degree.
    pub fn trimmed_approx(&self) -> Vec<Complex64> {
        self.coeffs[..=self.degree()]
            .iter()
            .map(CycNum::to_complex)
            .collect()
    }

    /// Indices of `a_1, …` in `g`, or `None` if some coefficient is not a member.
    pub fn indices_in(&self, g: &CoeffSet) -> Option<Vec<usize>> {
        self.coeffs[1..].iter().map(|c| g.index_of(c)).collect()
    }

    /// Membership in `Q^G_N`.
    pub fn is_member(&self, g: &CoeffSet, n: usize) -> bool {
        self.len() == n && self.conductor() == g.conductor() && self.indices_in(g).is_some()
    }

    /// `(1 + δ z^e) · self`, exactly.
    pub fn mul_binomial(&self, delta: &CycNum, e: usize) -> GPoly {
        let mut out = self.coeffs.clone();
        out.resize(self.len() + e, CycNum::zero(self.conductor()).expect("valid"));
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + e] = &out[i + e] + &(delta * c);
        }
        GPoly { coeffs: out }
    }

    /// `C_N`: keep the first `n` coefficients, zero-padding shorter series.
    pub fn truncate(&self, n: usize) -> GPoly {
        let mut coeffs: Vec<CycNum> = self.coeffs.iter().take(n).cloned().collect();
        coeffs.resize(n, CycNum::zero(self.conductor()).expect("valid"));
        GPoly { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.approx(), z)
    }
}

impl fmt::Debug for GPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

/// Least `i >= 1` with `a_i != b_i`, zero-padding the shorter series; `None` is infinity.
pub fn val(f: &GPoly, g: &GPoly) -> Option<usize> {
    let len = f.len().max(g.len());
    (1..len).find(|&i| f.coeff(i) != g.coeff(i))
}

pub fn truncate(f: &GPoly, n: usize) -> Result<GPoly, PolyError> {
    if n < 2 {
        return Err(PolyError::InvalidLength(n));
    }
    Ok(f.truncate(n))
}

/// `1 + z + … + z^{N-1}`; its roots are the `N`-th roots of unity other than 1.
pub fn geometric_target(g: &CoeffSet, n: usize) -> Result<GPoly, PolyError> {
    if n < 2 {
        return Err(PolyError::InvalidLength(n));
    }
    if !g.closure().contains_one {
        return Err(PolyError::MissingOne);
    }
    Ok(GPoly {
        coeffs: vec![g.one(); n],
    })
}

/// `2L·ρ^N/(1-ρ)`: bounds `|f - g|` on `|z| <= ρ` when `Val(f, g) >= N` and both lie in `W`.
pub fn tail_bound(l: f64, rho: f64, n: usize) -> Result<f64, PolyError> {
    if !(0.0..1.0).contains(&rho) {
        return Err(PolyError::InvalidRadius(rho));
    }
    Ok(2.0 * l * rho.powi(n as i32) / (1.0 - rho))
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// `true` when the root lies within [`CLUSTER_RADIUS`] of another listed root.
    pub clustered: Vec<bool>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    fn empty() -> Self {
        RootSet {
            roots: Vec::new(),
            residuals: Vec::new(),
            clustered: Vec::new(),
        }
    }
}

fn describe(coeffs: &[Complex64]) -> String {
    let parts: Vec<String> = coeffs.iter().map(|c| format!("{c}")).collect();
    format!("[{}]", parts.join(", "))
}

/// All complex roots of `Σ coeffs[k] z^k` by Aberth–Ehrlich iteration, each certified
/// by `|p(root)| <= tol`. Trailing zero coefficients are stripped first.
pub fn roots_certified(coeffs: &[Complex64], tol: f64) -> Result<RootSet, PolyError> {
    let Some(top) = coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) else {
        return Err(PolyError::NumericFailure {
            poly: describe(coeffs),
            reason: "zero polynomial".into(),
        });
    };
    let coeffs = &coeffs[..=top];
    let degree = top;
    if degree == 0 {
        return Ok(RootSet::empty());
    }
    let roots = if degree == 1 {
        vec![-coeffs[0] / coeffs[1]]
    } else {
        aberth(coeffs).ok_or_else(|| PolyError::NumericFailure {
            poly: describe(coeffs),
            reason: format!("no convergence within {MAX_ITERATIONS} iterations"),
        })?
    };
    let mut roots: Vec<Complex64> = roots.into_iter().map(|z| polish(coeffs, z)).collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals: Vec<f64> = roots.iter().map(|&z| horner(coeffs, z).norm()).collect();
    if let Some((i, r)) = residuals.iter().enumerate().find(|(_, r)| !(**r <= tol)) {
        return Err(PolyError::NumericFailure {
            poly: describe(coeffs),
            reason: format!("residual {r:e} of root {} exceeds {tol:e}", roots[i]),
        });
    }
    let clustered = (0..roots.len())
        .map(|i| {
            (0..roots.len()).any(|j| j != i && (roots[i] - roots[j]).norm_sqr() < CLUSTER_RADIUS * CLUSTER_RADIUS)
        })
        .collect();
    Ok(RootSet {
        roots,
        residuals,
        clustered,
    })
}

fn aberth(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    // start on a circle of the geometric-mean root modulus, rotated off the axes
    let radius = (coeffs[0] / lead).norm().powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius * (1.0 + 0.01 * k as f64 / d as f64), theta)
        })
        .collect();
    // a root whose last step was negligible stays put; Newton polishing follows
    let mut done = vec![false; d];
    for _ in 0..MAX_ITERATIONS {
        let mut active = false;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (p, dp) = horner_with_derivative(coeffs, z[i]);
            if p.norm_sqr() == 0.0 {
                done[i] = true;
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if !step.is_finite() {
                active = true;
                continue;
            }
            z[i] -= step;
            if step.norm_sqr() < 1e-28 * z[i].norm_sqr().max(1.0) {
                done[i] = true;
            } else {
                active = true;
            }
        }
        if !active {
            return Some(z);
        }
    }
    // linear convergence at multiple roots can stall above the step threshold;
    // the residual check downstream decides whether the result is usable
    z.iter().all(|v| v.is_finite()).then_some(z)
}

fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = horner(coeffs, z).norm_sqr();
    for _ in 0..3 {
        let (p, dp) = horner_with_derivative(coeffs, z);
        let cand = z - p / dp;
        if !cand.is_finite() {
            break;
        }
        let r = horner(coeffs, cand).norm_sqr();
        if r < best {
            best = r;
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Random access to `Q^G_N` in mixed-radix odometer order: `a_{N-1}` varies fastest.
#[derive(Debug, Clone)]
pub struct ZeroSetEnumerator<'a> {
    set: &'a CoeffSet,
    zero: Option<usize>,
    len: usize,
    total: Option<u64>,
    tol: f64,
}

#[derive(Debug, Clone)]
pub struct ZeroSetEntry {
    pub index: u64,
    pub digits: Vec<usize>,
    /// Actual degree of the member.
    pub degree: usize,
    pub roots: RootSet,
}

impl ZeroSetEntry {
    /// The exact member this entry describes.
    pub fn poly(&self, set: &CoeffSet) -> GPoly {
        GPoly::from_indices(set, &self.digits).expect("digits index the set")
    }
}

impl<'a> ZeroSetEnumerator<'a> {
    pub fn new(set: &'a CoeffSet, len: usize) -> Result<Self, PolyError> {
        if len < 2 {
            return Err(PolyError::InvalidLength(len));
        }
        let total = (set.len() as u64).checked_pow((len - 1) as u32);
        Ok(ZeroSetEnumerator {
            set,
            zero: set.index_of(&set.zero()),
            len,
            total,
            tol: DEFAULT_ROOT_TOL,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Number of polynomials, `None` if it overflows `u64`.
    pub fn total(&self) -> Option<u64> {
        self.total
    }

    pub fn digits_at(&self, index: u64) -> Result<Vec<usize>, PolyError> {
        if self.total.is_some_and(|t| index >= t) {
            return Err(PolyError::IndexOutOfRange(index));
        }
        let k = self.set.len() as u64;
        let mut rest = index;
        let mut digits = vec![0; self.len - 1];
        for d in digits.iter_mut().rev() {
            *d = (rest % k) as usize;
            rest /= k;
        }
        Ok(digits)
    }

    pub fn poly_at(&self, index: u64) -> Result<GPoly, PolyError> {
        GPoly::from_indices(self.set, &self.digits_at(index)?)
    }

    pub fn entry(&self, index: u64) -> Result<ZeroSetEntry, PolyError> {
        let digits = self.digits_at(index)?;
        let degree = digits
            .iter()
            .rposition(|&d| Some(d) != self.zero)
            .map_or(0, |i| i + 1);
        let approx = self.set.approx();
        let coeffs: Vec<Complex64> = std::iter::once(Complex64::new(1.0, 0.0))
            .chain(digits[..degree].iter().map(|&d| approx[d]))
            .collect();
        let roots = roots_certified(&coeffs, self.tol)?;
        Ok(ZeroSetEntry {
            index,
            digits,
            degree,
            roots,
        })
    }

    pub fn range(&self, range: Range<u64>) -> impl Iterator<Item = Result<ZeroSetEntry, PolyError>> + '_ {
        range.map(move |i| self.entry(i))
    }

    /// Evaluates a range on the ambient rayon pool; output keeps odometer order.
    pub fn par_range(&self, range: Range<u64>) -> Result<Vec<ZeroSetEntry>, PolyError> {
        range.into_par_iter().map(|i| self.entry(i)).collect()
    }
}

fn check_budget(e: &ZeroSetEnumerator<'_>, budget: u64) -> Result<u64, PolyError> {
    match e.total {
        Some(t) if t <= budget => Ok(t),
        Some(t) => Err(PolyError::BudgetExceeded {
            count: t.to_string(),
            budget,
        }),
        None => Err(PolyError::BudgetExceeded {
            count: format!("{}^{}", e.set.len(), e.len - 1),
            budget,
        }),
    }
}

/// Streams every member of `Q^G_N` with its certified roots, refusing when the family
/// is larger than `budget`.
pub fn enumerate_zero_set<'a>(
    set: &'a CoeffSet,
    len: usize,
    budget: u64,
) -> Result<impl Iterator<Item = Result<ZeroSetEntry, PolyError>> + 'a, PolyError> {
    let e = ZeroSetEnumerator::new(set, len)?;
    let total = check_budget(&e, budget)?;
    Ok((0..total).map(move |i| e.entry(i)))
}

/// Parallel variant of [`enumerate_zero_set`], collected in odometer order.
pub fn enumerate_zero_set_par(
    set: &CoeffSet,
    len: usize,
    budget: u64,
    tol: f64,
) -> Result<Vec<ZeroSetEntry>, PolyError> {
    let e = ZeroSetEnumerator::new(set, len)?.with_tolerance(tol);
    let total = check_budget(&e, budget)?;
    e.par_range(0..total)
}

/// CSV dump: `poly_index,coeff_indices,root_re,root_im,residual`, one row per root.
/// Coefficient indices are `;`-separated.
pub fn write_roots_csv<W: Write>(
    out: W,
    entries: impl IntoIterator<Item = ZeroSetEntry>,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["poly_index", "coeff_indices", "root_re", "root_im", "residual"])?;
    for e in entries {
        let digits: Vec<String> = e.digits.iter().map(|d| d.to_string()).collect();
        let digits = digits.join(";");
        for (z, r) in e.roots.roots.iter().zip(&e.roots.residuals) {
            w.write_record([
                e.index.to_string(),
                digits.clone(),
                format!("{:.17e}", z.re),
                format!("{:.17e}", z.im),
                format!("{r:.3e}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
