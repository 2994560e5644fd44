//! Membership in the zero set `X^G`, rasterization of `M_n = X^{Ω_n}`, and chaos-game
//! sampling of fractal n-gon attractors.
//!
//! A parameter `λ` lies in `X^G` exactly when some infinite path of the recurrence
//! `t_0 = 1`, `t_{k+1} = t_k/λ + a` (`a ∈ G`) stays in the disc `|t| <= r*` with
//! `r* = A_max|λ|/(1 - |λ|)`. The search keeps the set of reachable states at each
//! depth, discarding those provably outside the disc. An empty level certifies `Out`;
//! an exactly repeating state (possible only with rational `λ`) certifies `In`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coeffsets::{omega_set, CoeffError, CoeffSet};
use crate::cyclotomic::{CycError, CycNum};

pub const DEFAULT_DEPTH: usize = 48;
pub const DEFAULT_BUDGET: usize = 1_000_000;
/// Per-pixel budget for rasters; undecided pixels are the ones that exhaust it.
pub const DEFAULT_RENDER_BUDGET: usize = 20_000;
/// Grid resolution `2^-q` used to merge states once a level grows large.
pub const DEFAULT_QUANTIZE_BITS: u32 = 10;
pub const DEFAULT_QUANTIZE_AFTER: usize = 1 << 12;
const BURN_IN: usize = 64;
const U: f64 = f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocusError {
    #[error("parameter must satisfy 0 < |lambda| < 1, got {0}")]
    Domain(String),
    #[error("cannot parse parameter {0:?}; expected `re`, `re,im` or `re+imi` with decimal or p/q parts")]
    Parse(String),
    #[error("raster dimensions must be positive")]
    EmptyRaster,
    #[error("point count must be positive")]
    NoPoints,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Cyc(#[from] CycError),
}

/// A parameter value, either a float or exact rational components.
#[derive(Debug, Clone, PartialEq)]
pub enum Lambda {
    Float(Complex64),
    Rational { re: BigRational, im: BigRational },
}

impl Lambda {
    pub fn rational(re: (i64, i64), im: (i64, i64)) -> Self {
        Lambda::Rational {
            re: BigRational::new(re.0.into(), re.1.into()),
            im: BigRational::new(im.0.into(), im.1.into()),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Lambda::Float(z) => *z,
            Lambda::Rational { re, im } => Complex64::new(
                re.to_f64().unwrap_or(f64::NAN),
                im.to_f64().unwrap_or(f64::NAN),
            ),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Lambda::Float(z) => Lambda::Float(z.conj()),
            Lambda::Rational { re, im } => Lambda::Rational {
                re: re.clone(),
                im: -im.clone(),
            },
        }
    }
}

impl From<Complex64> for Lambda {
    fn from(z: Complex64) -> Self {
        Lambda::Float(z)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Float(z) => write!(f, "{z}"),
            Lambda::Rational { re, im } => write!(f, "{re}+{im}i"),
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        return (!q.is_zero()).then(|| BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("0{int}{frac}")).ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, scale);
    Some(if neg { -r } else { r })
}

impl FromStr for Lambda {
    type Err = LocusError;

    /// Accepts `re`, `re,im`, `re+imi` or `re-imi`; each part a decimal or `p/q`.
    /// Parsed values are exact.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LocusError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (re, im) = if let Some((a, b)) = t.split_once(',') {
            (a.to_string(), b.to_string())
        } else if let Some(body) = t.strip_suffix('i') {
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
                .map(|(i, _)| i)
                .last();
            match split {
                Some(i) => (body[..i].to_string(), body[i..].to_string()),
                None => ("0".to_string(), body.to_string()),
            }
        } else {
            (t.clone(), "0".to_string())
        };
        let fix = |p: &str| match p {
            "" | "+" => "1".to_string(),
            "-" => "-1".to_string(),
            other => other.to_string(),
        };
        Ok(Lambda::Rational {
            re: parse_rational(&re).ok_or_else(err)?,
            im: parse_rational(&fix(&im)).ok_or_else(err)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InReason {
    AnnulusRule,
    ExactCycle,
    PolynomialRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum MembershipVerdict {
    In { reason: InReason },
    /// Every state left the disc by this depth.
    Out { depth: usize },
    /// Depth or budget ran out with live states remaining.
    Unknown { depth: usize },
}

impl MembershipVerdict {
    /// Raster code: `In = 2`, `Unknown = 1`, `Out = 0`.
    pub fn code(&self) -> u8 {
        match self {
            MembershipVerdict::In { .. } => 2,
            MembershipVerdict::Unknown { .. } => 1,
            MembershipVerdict::Out { .. } => 0,
        }
    }

    pub fn is_in(&self) -> bool {
        matches!(self, MembershipVerdict::In { .. })
    }

    pub fn is_out(&self) -> bool {
        matches!(self, MembershipVerdict::Out { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub depth: usize,
    /// Maximum number of states kept over the whole search.
    pub budget: usize,
    pub quantize_bits: u32,
    /// Level size beyond which float states are merged on the grid.
    pub quantize_after: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            depth: DEFAULT_DEPTH,
            budget: DEFAULT_BUDGET,
            quantize_bits: DEFAULT_QUANTIZE_BITS,
            quantize_after: DEFAULT_QUANTIZE_AFTER,
        }
    }
}

impl SearchParams {
    /// Defaults for rasters: same depth, smaller per-pixel budget.
    pub fn render() -> Self {
        SearchParams {
            budget: DEFAULT_RENDER_BUDGET,
            ..SearchParams::default()
        }
    }
}

/// `1/√n < |λ| < 1`.
pub fn annulus_certificate(lambda: Complex64, n: u32) -> bool {
    let m2 = lambda.norm_sqr();
    m2 * f64::from(n) > 1.0 && m2 < 1.0
}

fn check_domain(z: Complex64) -> Result<(), LocusError> {
    let m = z.norm();
    if m > 0.0 && m < 1.0 {
        Ok(())
    } else {
        Err(LocusError::Domain(z.to_string()))
    }
}

/// Decides whether `λ ∈ X^G` by reachable-set search.
pub fn membership(
    lambda: &Lambda,
    g: &CoeffSet,
    params: &SearchParams,
) -> Result<MembershipVerdict, LocusError> {
    let z = lambda.to_complex();
    check_domain(z)?;
    if let Some(n) = g.order() {
        // strict margin keeps the rule clear of rounding at the inner circle
        if annulus_certificate(z, n) && z.norm_sqr() * f64::from(n) > 1.0 + 1e-12 {
            return Ok(MembershipVerdict::In {
                reason: InReason::AnnulusRule,
            });
        }
    }
    let r_star = g.max_modulus() * z.norm() / (1.0 - z.norm());
    // states farther than this are certainly outside the disc
    let cutoff = r_star * (1.0 + 1e-9) + 1e-300;
    if 1.0 > cutoff {
        return Ok(MembershipVerdict::Out { depth: 0 });
    }
    match lambda {
        Lambda::Float(z) => Ok(float_search(*z, g, cutoff, params)),
        Lambda::Rational { re, im } => exact_search(re, im, g, cutoff, params),
    }
}

/// Membership for a float parameter with default search parameters.
pub fn membership_default(lambda: Complex64, g: &CoeffSet) -> Result<MembershipVerdict, LocusError> {
    membership(&Lambda::Float(lambda), g, &SearchParams::default())
}

#[derive(Clone, Copy)]
struct Ball {
    c: Complex64,
    r: f64,
}

fn float_search(lambda: Complex64, g: &CoeffSet, cutoff: f64, p: &SearchParams) -> MembershipVerdict {
    let coeffs = g.approx();
    let norms: Vec<f64> = coeffs.iter().map(|a| a.norm()).collect();
    let inv = lambda.inv();
    let inv_norm = inv.norm();
    let scale = f64::from(1u32 << p.quantize_bits.min(30));
    let mut level = vec![Ball {
        c: Complex64::new(1.0, 0.0),
        r: 0.0,
    }];
    let mut kept = 1usize;
    for depth in 1..=p.depth {
        let quantize = level.len() > p.quantize_after;
        let mut next: Vec<((u64, u64), Ball)> = Vec::with_capacity(level.len() * coeffs.len());
        for b in &level {
            let w = b.c * inv;
            let base = b.r * inv_norm * (1.0 + 4.0 * U) + f64::MIN_POSITIVE;
            let w_norm = b.c.norm_sqr().sqrt() * inv_norm;
            for (&a, &a_norm) in coeffs.iter().zip(&norms) {
                let c = w + a;
                let c_norm = c.norm_sqr().sqrt();
                // propagated radius plus rounding of 1/λ, the product, the sum and the
                // modulus itself
                let r = base + 8.0 * U * (w_norm + a_norm + c_norm);
                if c_norm - r > cutoff {
                    continue;
                }
                let ball = if quantize {
                    // merge into a ball covering the whole cell
                    let cell = Complex64::new(
                        ((c.re * scale).floor() + 0.5) / scale,
                        ((c.im * scale).floor() + 0.5) / scale,
                    );
                    Ball {
                        c: cell,
                        r: (c - cell).norm() * (1.0 + 4.0 * U) + r,
                    }
                } else {
                    Ball { c, r }
                };
                next.push(((ball.c.re.to_bits(), ball.c.im.to_bits()), ball));
            }
        }
        if next.is_empty() {
            return MembershipVerdict::Out { depth };
        }
        next.sort_unstable_by_key(|e| e.0);
        level.clear();
        let mut last_key = None;
        for (key, ball) in next {
            if last_key == Some(key) {
                let top = level.last_mut().expect("pushed with the key");
                top.r = top.r.max(ball.r);
            } else {
                level.push(ball);
                last_key = Some(key);
            }
        }
        kept += level.len();
        if kept > p.budget {
            return MembershipVerdict::Unknown { depth };
        }
    }
    MembershipVerdict::Unknown { depth: p.depth }
}

/// `num / den` with `den > 0` and no common factor.
#[derive(Clone, PartialEq, Eq, Hash)]
struct ExactState {
    num: CycNum,
    den: BigInt,
}

struct ExactStepper {
    m: u32,
    /// `d·(a - b·i)` where `λ = (a + b·i)/d`.
    mult: CycNum,
    /// `a² + b²`.
    norm: BigInt,
    coeffs: Vec<CycNum>,
}

fn scalar(m: u32, k: BigInt) -> Result<CycNum, CycError> {
    let deg = CycNum::zero(m)?.coeffs().len();
    let mut v = vec![BigInt::zero(); deg];
    v[0] = k;
    CycNum::from_coeffs(m, v)
}

impl ExactStepper {
    fn new(re: &BigRational, im: &BigRational, g: &CoeffSet) -> Result<Self, LocusError> {
        let m = g.conductor().lcm(&4);
        let d = re.denom().lcm(im.denom());
        let a = re.numer() * (&d / re.denom());
        let b = im.numer() * (&d / im.denom());
        let i = CycNum::root_of_unity(m, i64::from(m / 4))?;
        let mult = &scalar(m, &d * &a)? - &(&scalar(m, &d * &b)? * &i);
        let coeffs = g
            .elements()
            .iter()
            .map(|c| c.embed(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExactStepper {
            m,
            mult,
            norm: &a * &a + &b * &b,
            coeffs,
        })
    }

    fn step(&self, s: &ExactState, c: &CycNum) -> Result<ExactState, CycError> {
        let num = &(&s.num * &self.mult) + &(c * &scalar(self.m, &s.den * &self.norm)?);
        let den = &s.den * &self.norm;
        let g = num.coeffs().iter().fold(den.clone(), |acc, x| acc.gcd(x));
        if g.is_one() {
            return Ok(ExactState { num, den });
        }
        let coeffs = num.coeffs().iter().map(|x| x / &g).collect();
        Ok(ExactState {
            num: CycNum::from_coeffs(self.m, coeffs)?,
            den: den / g,
        })
    }

    fn modulus(s: &ExactState) -> f64 {
        let den = s.den.to_f64().unwrap_or(f64::INFINITY);
        s.num.to_complex().norm() / den
    }
}

/// True when the explored state graph contains a directed cycle.
fn has_cycle(edges: &[Vec<usize>]) -> bool {
    let mut color = vec![0u8; edges.len()];
    for root in 0..edges.len() {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if let Some(&w) = edges[v].get(*i) {
                *i += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    false
}

fn exact_search(
    re: &BigRational,
    im: &BigRational,
    g: &CoeffSet,
    cutoff: f64,
    p: &SearchParams,
) -> Result<MembershipVerdict, LocusError> {
    let stepper = ExactStepper::new(re, im, g)?;
    let start = ExactState {
        num: CycNum::one(stepper.m)?,
        den: BigInt::one(),
    };
    let mut ids: HashMap<ExactState, usize> = HashMap::new();
    let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
    ids.insert(start.clone(), 0);
    let mut level = vec![(start, 0usize)];
    for depth in 1..=p.depth {
        let mut next = Vec::new();
        let mut revisit = false;
        for (s, id) in &level {
            for c in &stepper.coeffs {
                let t = stepper.step(s, c)?;
                if t.num.is_zero() {
                    // 1 + a_1 λ + … + a_k λ^k vanishes exactly
                    return Ok(MembershipVerdict::In {
                        reason: InReason::PolynomialRoot,
                    });
                }
                if ExactStepper::modulus(&t) > cutoff {
                    continue;
                }
                let tid = match ids.get(&t) {
                    Some(&tid) => {
                        revisit = true;
                        tid
                    }
                    None => {
                        let tid = edges.len();
                        edges.push(Vec::new());
                        ids.insert(t.clone(), tid);
                        next.push((t, tid));
                        tid
                    }
                };
                edges[*id].push(tid);
            }
        }
        if revisit && has_cycle(&edges) {
            return Ok(MembershipVerdict::In {
                reason: InReason::ExactCycle,
            });
        }
        if next.is_empty() {
            // every state is expanded and the graph is acyclic, so every path dies
            return Ok(MembershipVerdict::Out { depth });
        }
        if ids.len() > p.budget {
            return Ok(MembershipVerdict::Unknown { depth });
        }
        level = next;
    }
    Ok(MembershipVerdict::Unknown { depth: p.depth })
}

/// Axis-aligned rectangle in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Region {
    fn default() -> Self {
        Region {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        }
    }
}

impl Region {
    pub fn centered(center: Complex64, half_width: f64) -> Self {
        Region {
            re_min: center.re - half_width,
            re_max: center.re + half_width,
            im_min: center.im - half_width,
            im_max: center.im + half_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Raster {
    pub n: u32,
    pub region: Region,
    pub width: usize,
    pub height: usize,
    pub depth: usize,
    pub budget: usize,
    /// Row-major verdict codes; row 0 is the top edge (largest imaginary part).
    pub codes: Vec<u8>,
}

impl Raster {
    /// Parameter at the center of pixel `(x, y)`.
    pub fn pixel_center(&self, x: usize, y: usize) -> Complex64 {
        pixel_center(&self.region, self.width, self.height, x, y)
    }

    pub fn code(&self, x: usize, y: usize) -> u8 {
        self.codes[y * self.width + x]
    }

    /// Pixel counts for codes `[Out, Unknown, In]`.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for &k in &self.codes {
            c[k as usize] += 1;
        }
        c
    }

    fn gray(&self) -> Vec<u8> {
        self.codes
            .iter()
            .map(|&k| match k {
                2 => 0,
                1 => 160,
                _ => 255,
            })
            .collect()
    }

    /// Binary PPM: members black, undecided gray, non-members white.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let rgb: Vec<u8> = self.gray().into_iter().flat_map(|v| [v, v, v]).collect();
        out.write_all(&rgb)
    }

    /// 8-bit grayscale PNG with the same shading as [`Raster::write_ppm`].
    pub fn write_png<W: Write>(&self, out: W) -> Result<(), png::EncodingError> {
        let mut enc = png::Encoder::new(out, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header()?;
        w.write_image_data(&self.gray())?;
        w.finish()
    }
}

fn pixel_center(r: &Region, w: usize, h: usize, x: usize, y: usize) -> Complex64 {
    let dx = (r.re_max - r.re_min) / w as f64;
    let dy = (r.im_max - r.im_min) / h as f64;
    Complex64::new(
        r.re_min + (x as f64 + 0.5) * dx,
        r.im_max - (y as f64 + 0.5) * dy,
    )
}

/// Rasterizes `M_n` over `region`, one membership search per pixel center.
///
/// Rows run on the ambient rayon pool; the output does not depend on its size.
pub fn render_locus(
    n: u32,
    region: Region,
    width: usize,
    height: usize,
    params: &SearchParams,
) -> Result<Raster, LocusError> {
    if width == 0 || height == 0 {
        return Err(LocusError::EmptyRaster);
    }
    let g = omega_set(n)?;
    let rows: Vec<Vec<u8>> = (0..height)
        .into_par_iter()
        .map(|y| {
            (0..width)
                .map(|x| {
                    let z = pixel_center(&region, width, height, x, y);
                    membership(&Lambda::Float(z), &g, params).map_or(0, |v| v.code())
                })
                .collect()
        })
        .collect();
    Ok(Raster {
        n,
        region,
        width,
        height,
        depth: params.depth,
        budget: params.budget,
        codes: rows.concat(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorCloud {
    pub n: u32,
    pub lambda: Complex64,
    pub seed: u64,
    /// Iterations performed, burn-in included.
    pub iterations: usize,
    pub points: Vec<Complex64>,
}

impl AttractorCloud {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im"])?;
        for z in &self.points {
            w.write_record([format!("{:.17e}", z.re), format!("{:.17e}", z.im)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Chaos-game sample of the attractor of `{λz + ξ_n^i}` after a 64-step burn-in.
pub fn attractor_points(
    n: u32,
    lambda: Complex64,
    count: usize,
    seed: u64,
) -> Result<AttractorCloud, LocusError> {
    check_domain(lambda)?;
    if count == 0 {
        return Err(LocusError::NoPoints);
    }
    if n < 2 {
        return Err(CoeffError::InvalidOrder(n).into());
    }
    let roots: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * f64::from(i) / f64::from(n)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Complex64::new(0.0, 0.0);
    let mut points = Vec::with_capacity(count);
    for step in 0..BURN_IN + count {
        z = lambda * z + roots[rng.random_range(0..roots.len())];
        if step >= BURN_IN {
            points.push(z);
        }
    }
    Ok(AttractorCloud {
        n,
        lambda,
        seed,
        iterations: BURN_IN + count,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn annulus_rule() {
        assert!(annulus_certificate(re(0.8), 2));
        assert!(!annulus_certificate(re(0.5), 2));
        assert!(annulus_certificate(re(0.58), 3));
        assert!(!annulus_certificate(re(1.0), 3));
    }

    #[test]
    fn small_parameter_is_out_immediately() {
        let g = omega_set(2).unwrap();
        assert_eq!(
            membership_default(re(0.3), &g).unwrap(),
            MembershipVerdict::Out { depth: 0 }
        );
        let g4 = omega_set(4).unwrap();
        assert_eq!(
            membership_default(re(0.3), &g4).unwrap(),
            MembershipVerdict::Out { depth: 0 }
        );
    }

    #[test]
    fn annulus_parameter_is_in() {
        let g = omega_set(2).unwrap();
        assert_eq!(
            membership_default(re(0.75), &g).unwrap(),
            MembershipVerdict::In {
                reason: InReason::AnnulusRule
            }
        );
    }

    #[test]
    fn one_half_closes_a_cycle() {
        let g = omega_set(2).unwrap();
        let half: Lambda = "0.5".parse().unwrap();
        assert_eq!(
            membership(&half, &g, &SearchParams::default()).unwrap(),
            MembershipVerdict::In {
                reason: InReason::ExactCycle
            }
        );
    }

    #[test]
    fn exact_polynomial_root() {
        // 1 - 2λ with coefficients {1, -2}: λ = 1/2 and no cycle is needed
        let g = CoeffSet::from_integers(&[-2, 1]).unwrap();
        let half: Lambda = "1/2".parse().unwrap();
        assert_eq!(
            membership(&half, &g, &SearchParams::default()).unwrap(),
            MembershipVerdict::In {
                reason: InReason::PolynomialRoot
            }
        );
    }

    #[test]
    fn domain_errors() {
        let g = omega_set(2).unwrap();
        assert!(matches!(membership_default(re(0.0), &g), Err(LocusError::Domain(_))));
        assert!(matches!(membership_default(re(1.0), &g), Err(LocusError::Domain(_))));
        assert!(attractor_points(2, re(1.2), 10, 0).is_err());
    }

    #[test]
    fn lambda_parsing() {
        let l: Lambda = "0.3,-1/4".parse().unwrap();
        assert_eq!(l, Lambda::rational((3, 10), (-1, 4)));
        let l: Lambda = "0.25-0.5i".parse().unwrap();
        assert_eq!(l, Lambda::rational((1, 4), (-1, 2)));
        let l: Lambda = "-i".parse().unwrap();
        assert_eq!(l, Lambda::rational((0, 1), (-1, 1)));
        assert!("abc".parse::<Lambda>().is_err());
    }

    #[test]
    fn exact_and_float_agree_on_out() {
        let g = omega_set(2).unwrap();
        let exact: Lambda = "0.55,0.1".parse().unwrap();
        let v_exact = membership(&exact, &g, &SearchParams::default()).unwrap();
        let v_float = membership_default(Complex64::new(0.55, 0.1), &g).unwrap();
        assert_eq!(v_exact, MembershipVerdict::Out { depth: 3 });
        assert_eq!(v_float, v_exact);
    }

    #[test]
    fn cycle_detection() {
        assert!(has_cycle(&[vec![0]]));
        assert!(has_cycle(&[vec![1], vec![2], vec![0]]));
        assert!(!has_cycle(&[vec![1, 2], vec![2], vec![]]));
    }

    #[test]
    fn tiny_rasters() {
        let p = SearchParams::render();
        let r = render_locus(2, Region::centered(re(0.75), 0.001), 1, 1, &p).unwrap();
        assert_eq!(r.codes, vec![2]);
        let r = render_locus(4, Region::centered(re(0.3), 0.001), 1, 1, &p).unwrap();
        assert_eq!(r.codes, vec![0]);
        let r = render_locus(2, Region::centered(re(0.0), 0.3), 8, 8, &p).unwrap();
        assert!(r.codes.iter().all(|&c| c == 0));
    }

    #[test]
    fn raster_images() {
        let r = render_locus(2, Region::default(), 6, 4, &SearchParams::render()).unwrap();
        let mut ppm = Vec::new();
        r.write_ppm(&mut ppm).unwrap();
        assert!(ppm.starts_with(b"P6\n6 4\n255\n"));
        assert_eq!(ppm.len(), b"P6\n6 4\n255\n".len() + 6 * 4 * 3);
        let mut png_bytes = Vec::new();
        r.write_png(&mut png_bytes).unwrap();
        assert!(png_bytes.starts_with(&[0x89, b'P', b'N', b'G']));
    }

    #[test]
    fn attractor_near_fixed_points() {
        let cloud = attractor_points(2, re(0.01), 500, 3).unwrap();
        let fixed = 1.0 / 0.99;
        for z in &cloud.points {
            assert!((z - re(fixed)).norm() < 0.03 || (z + re(fixed)).norm() < 0.03);
        }
    }

    #[test]
    fn attractor_in_invariant_ball() {
        let cloud = attractor_points(4, re(0.2), 2000, 9).unwrap();
        assert!(cloud.points.iter().all(|z| z.norm() <= 1.25 + 1e-12));
        let again = attractor_points(4, re(0.2), 2000, 9).unwrap();
        assert_eq!(cloud, again);
    }
}
