//! Tracking a root through a join sequence until it enters the annulus
//! `M_R = {R < |z| < 1}`, with every hop of length at most `ε`.
//!
//! Each hop `q_i → p_{i+1} = C_N(q_i)` is certified by Rouché's theorem when
//! possible: on a circle `|z - s| = r` the perturbation `|q_i - p_{i+1}|` is bounded
//! above, `|q_i|` is bounded below from samples plus a Lipschitz correction, and a
//! strict inequality places a root of `p_{i+1}` inside the disc. When no radius
//! certifies, the nearest root of `p_{i+1}` within `ε` is taken instead.

use std::f64::consts::{PI, TAU};
use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::coeffsets::CoeffSet;
use crate::join::{walk_join, JoinError};
use crate::polyseries::{
    geometric_target, horner, roots_certified, tail_bound, GPoly, PolyError, DEFAULT_ROOT_TOL,
};
use crate::star::StarCertificate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("no root of the truncated polynomial within {eps} of {s} (nearest at distance {nearest}); increase N")]
    NoRootWithinEps {
        s: Complex64,
        eps: f64,
        nearest: f64,
    },
    #[error(transparent)]
    Numeric(#[from] PolyError),
    #[error(transparent)]
    Join(#[from] JoinError),
    #[error("coefficient set fails the chain condition; cannot run")]
    CannotRun,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("{reason}; last chain had {} points ending at {}", partial.points.len(), partial.last())]
    Exhausted {
        reason: String,
        partial: Box<EpsilonChain>,
    },
}

/// Parameters of a single hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoucheParams {
    pub eps: f64,
    /// Coefficient bound `L` of the ball `W`.
    pub bound: f64,
    /// Truncation length `N`.
    pub len: usize,
    pub samples: usize,
    pub tol: f64,
    /// Radii tried are `ε, ε/2, …, ε/2^halvings`.
    pub halvings: u32,
}

impl RoucheParams {
    pub fn new(eps: f64, bound: f64, len: usize) -> Self {
        RoucheParams {
            eps,
            bound,
            len,
            samples: 256,
            tol: DEFAULT_ROOT_TOL,
            halvings: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoucheCheck {
    pub center: (f64, f64),
    pub radius: f64,
    /// Lower bound for `|q|` on the circle.
    pub lower_bound: f64,
    /// Upper bound for `|q - p_next|` on the circle.
    pub perturbation_bound: f64,
    pub passed: bool,
}

fn trim(c: &[Complex64]) -> &[Complex64] {
    let end = c.iter().rposition(|x| *x != Complex64::new(0.0, 0.0)).map_or(0, |i| i + 1);
    &c[..end]
}

/// Lower bound for `|q|` on `|z - s| = r` by sampling plus a derivative bound.
fn circle_lower_bound(q: &[Complex64], s: Complex64, r: f64, samples: usize) -> f64 {
    let rho = s.norm() + r;
    let deriv: f64 = q
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c.norm() * rho.powi(i as i32 - 1))
        .sum();
    let min = (0..samples)
        .map(|k| horner(q, s + Complex64::from_polar(r, TAU * k as f64 / samples as f64)).norm())
        .fold(f64::INFINITY, f64::min);
    // every circle point is within arc length πr/K of a sample
    min - deriv * PI * r / samples as f64
}

fn perturbation_bound(q: &[Complex64], rho: f64, params: &RoucheParams) -> f64 {
    let explicit: f64 = q
        .iter()
        .enumerate()
        .skip(params.len)
        .map(|(i, c)| c.norm() * rho.powi(i as i32))
        .sum();
    match tail_bound(params.bound, rho, params.len) {
        Ok(t) => t.min(explicit),
        Err(_) => explicit,
    }
}

fn nearest(roots: &[Complex64], s: Complex64, within: f64) -> Option<Complex64> {
    roots
        .iter()
        .copied()
        .filter(|z| (z - s).norm() <= within)
        .min_by(|a, b| {
            (a - s)
                .norm()
                .total_cmp(&(b - s).norm())
                .then(a.arg().total_cmp(&b.arg()))
        })
}

/// Moves the root `s` of `q` to a root of `p_next` within `ε`.
///
/// `p_next` is expected to agree with `q` below `params.len`.
pub fn rouche_step(
    q: &[Complex64],
    p_next: &[Complex64],
    s: Complex64,
    params: &RoucheParams,
) -> Result<(Complex64, RoucheCheck), ChainError> {
    let q = trim(q);
    let p = trim(p_next);
    if q == p {
        return Ok((
            s,
            RoucheCheck {
                center: (s.re, s.im),
                radius: 0.0,
                lower_bound: 0.0,
                perturbation_bound: 0.0,
                passed: true,
            },
        ));
    }
    let roots = roots_certified(p, params.tol)?.roots;
    let mut last = None;
    for k in 0..=params.halvings {
        let r = params.eps / f64::from(1u32 << k);
        let rho = s.norm() + r;
        if rho >= 1.0 {
            continue;
        }
        let check = RoucheCheck {
            center: (s.re, s.im),
            radius: r,
            lower_bound: circle_lower_bound(q, s, r, params.samples),
            perturbation_bound: perturbation_bound(q, rho, params),
            passed: false,
        };
        if check.perturbation_bound < check.lower_bound {
            if let Some(z) = nearest(&roots, s, r) {
                return Ok((z, RoucheCheck { passed: true, ..check }));
            }
        }
        last.get_or_insert(check);
    }
    let check = last.unwrap_or(RoucheCheck {
        center: (s.re, s.im),
        radius: params.eps,
        lower_bound: 0.0,
        perturbation_bound: f64::INFINITY,
        passed: false,
    });
    match nearest(&roots, s, params.eps) {
        Some(z) => Ok((z, check)),
        None => Err(ChainError::NoRootWithinEps {
            s,
            eps: params.eps,
            nearest: roots
                .iter()
                .map(|z| (z - s).norm())
                .fold(f64::INFINITY, f64::min),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    ReachedAnnulus,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainPoint {
    pub z: Complex64,
    /// Index `i` of the series `p_i` in the join sequence that `z` is a root of.
    pub poly_index: usize,
    pub residual: f64,
    /// Whether the hop into this point passed the Rouché check.
    pub certified: bool,
    pub poly: GPoly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonChain {
    pub eps: f64,
    pub radius: f64,
    pub tol: f64,
    /// Truncation length used for the successful walk.
    pub len: usize,
    pub points: Vec<ChainPoint>,
    pub terminal: Terminal,
}

impl EpsilonChain {
    pub fn last(&self) -> Complex64 {
        self.points.last().map_or(Complex64::new(f64::NAN, f64::NAN), |p| p.z)
    }

    pub fn all_certified(&self) -> bool {
        self.points.iter().all(|p| p.certified)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "eps": self.eps,
            "R": self.radius,
            "N": self.len,
            "points": self.points.iter().map(|p| json!({
                "re": p.z.re,
                "im": p.z.im,
                "poly_index": p.poly_index,
                "residual": p.residual,
                "certified": p.certified,
            })).collect::<Vec<_>>(),
            "terminal": self.terminal,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub eps: f64,
    pub radius: f64,
    pub tol: f64,
    pub samples: usize,
    /// Largest truncation length tried before giving up.
    pub len_cap: usize,
    /// Hop budget per walk.
    pub max_hops: usize,
}

impl ChainConfig {
    /// Defaults for `Ω_n`: `ε = 0.1`, `R = 1/√n + 0.01`.
    pub fn for_order(n: u32) -> Self {
        ChainConfig {
            eps: 0.1,
            radius: default_radius(n),
            tol: DEFAULT_ROOT_TOL,
            samples: 256,
            len_cap: 160,
            max_hops: 2_000_000,
        }
    }
}

/// `1/√n + 0.01`, just inside the annulus known to lie in `M_n`.
pub fn default_radius(n: u32) -> f64 {
    1.0 / f64::from(n).sqrt() + 0.01
}

fn in_annulus(z: Complex64, radius: f64) -> bool {
    let m = z.norm();
    radius < m && m < 1.0
}

enum Outcome {
    Reached,
    Failed(ChainError),
    Completed,
}

/// Builds an `ε`-chain from the root `s` of `a` into `M_R`.
///
/// Walks the join from `a` to the geometric target of the same length. If a hop has
/// no root within `ε`, the walk restarts from `a·(1 + z^N)`, which has length `2N`
/// and the same roots among others, until `config.len_cap` is exceeded.
pub fn connect_to_annulus(
    a: &GPoly,
    s: Complex64,
    g: &CoeffSet,
    cert: &StarCertificate,
    config: &ChainConfig,
) -> Result<EpsilonChain, ChainError> {
    if !cert.is_satisfied() {
        return Err(ChainError::CannotRun);
    }
    if !(config.eps > 0.0 && config.radius > 0.0 && config.radius + config.eps < 1.0) {
        return Err(ChainError::InvalidParameters(format!(
            "need eps > 0, R > 0 and R + eps < 1 (eps = {}, R = {})",
            config.eps, config.radius
        )));
    }
    if s.norm() >= 1.0 {
        return Err(ChainError::InvalidParameters(format!("|s| = {} is not below 1", s.norm())));
    }
    let residual = a.eval(s).norm();
    if !(residual <= config.tol) {
        return Err(ChainError::InvalidParameters(format!(
            "s is not a root of A (residual {residual:e})"
        )));
    }
    let start = |poly: &GPoly| ChainPoint {
        z: s,
        poly_index: 0,
        residual: poly.eval(s).norm(),
        certified: true,
        poly: poly.clone(),
    };
    let mut current = a.clone();
    loop {
        let len = current.len();
        let mut chain = EpsilonChain {
            eps: config.eps,
            radius: config.radius,
            tol: config.tol,
            len,
            points: vec![start(&current)],
            terminal: Terminal::ReachedAnnulus,
        };
        if in_annulus(s, config.radius) {
            return Ok(chain);
        }
        let target = geometric_target(g, len)?;
        let mut params = RoucheParams::new(config.eps, g.growth_bound(), len);
        params.samples = config.samples;
        params.tol = config.tol;
        let mut outcome = Outcome::Completed;
        let mut z = s;
        let flow = walk_join(&current, &target, g, cert, |view| {
            if view.index >= config.max_hops {
                outcome = Outcome::Failed(ChainError::InvalidParameters(format!(
                    "hop budget {} exhausted",
                    config.max_hops
                )));
                return ControlFlow::Break(());
            }
            let q = view.hop.product.approx();
            let p = view.to.approx();
            match rouche_step(&q, &p, z, &params) {
                Ok((next, check)) => {
                    z = next;
                    chain.points.push(ChainPoint {
                        z,
                        poly_index: view.index + 1,
                        residual: horner(&p, z).norm(),
                        certified: check.passed,
                        poly: view.to.clone(),
                    });
                    if in_annulus(z, config.radius) {
                        outcome = Outcome::Reached;
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                }
                Err(e) => {
                    outcome = Outcome::Failed(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        let reason = match outcome {
            Outcome::Reached => return Ok(chain),
            Outcome::Failed(ChainError::InvalidParameters(msg)) => {
                chain.terminal = Terminal::Exhausted;
                return Err(ChainError::Exhausted {
                    reason: msg,
                    partial: Box::new(chain),
                });
            }
            Outcome::Failed(e) => e.to_string(),
            Outcome::Completed => {
                debug_assert!(flow.is_continue());
                "walk reached the target without entering the annulus".to_string()
            }
        };
        if 2 * len > config.len_cap {
            chain.terminal = Terminal::Exhausted;
            return Err(ChainError::Exhausted {
                reason: format!("{reason}; length cap {} reached", config.len_cap),
                partial: Box::new(chain),
            });
        }
        current = current.mul_binomial(&g.one(), len);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub hops_within_eps: bool,
    pub residuals_within_tol: bool,
    pub inside_unit_disc: bool,
    pub terminal_consistent: bool,
}

impl ChainReport {
    pub fn all(&self) -> bool {
        self.hops_within_eps
            && self.residuals_within_tol
            && self.inside_unit_disc
            && self.terminal_consistent
    }
}

/// Re-checks an `ε`-chain from its stored points and polynomials.
pub fn verify_chain(chain: &EpsilonChain, eps: f64) -> ChainReport {
    let hops_within_eps = chain.points.windows(2).all(|w| (w[1].z - w[0].z).norm() <= eps);
    let residuals_within_tol = chain.points.iter().all(|p| {
        let value: Complex64 = p
            .poly
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_complex() * p.z.powu(i as u32))
            .sum();
        value.norm() <= chain.tol
    });
    let inside_unit_disc = chain.points.iter().all(|p| p.z.norm() < 1.0);
    let terminal_consistent = match chain.terminal {
        Terminal::ReachedAnnulus => chain.points.last().is_some_and(|p| {
            let m = p.z.norm();
            chain.radius < m && m < 1.0
        }),
        Terminal::Exhausted => true,
    };
    ChainReport {
        hops_within_eps,
        residuals_within_tol,
        inside_unit_disc,
        terminal_consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffsets::omega_set;
    use crate::cyclotomic::CycNum;
    use crate::star::check_star;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_perturbation() {
        let q = [c(1.0), c(-2.0)];
        let s = c(0.5);
        let (next, check) = rouche_step(&q, &q, s, &RoucheParams::new(0.1, 2.0, 2)).unwrap();
        assert_eq!(next, s);
        assert!(check.passed);
    }

    #[test]
    fn shared_root_survives_truncation() {
        // (1 - 2z)(1 + z^5) truncated to length 4
        let q = [c(1.0), c(-2.0), c(0.0), c(0.0), c(0.0), c(1.0), c(-2.0)];
        let p = [c(1.0), c(-2.0), c(0.0), c(0.0)];
        let (next, check) = rouche_step(&q, &p, c(0.5), &RoucheParams::new(0.1, 2.0, 4)).unwrap();
        assert_eq!(next, c(0.5));
        assert!(check.passed);
    }

    #[test]
    fn boundary_root_falls_back_to_nearest() {
        // (1 + z)(1 + 0.1 z^3) truncated to length 3 is 1 + z
        let q = [c(1.0), c(1.0), c(0.0), c(0.1), c(0.1)];
        let p = [c(1.0), c(1.0), c(0.0)];
        let (next, check) = rouche_step(&q, &p, c(-1.0), &RoucheParams::new(0.1, 2.0, 3)).unwrap();
        assert_eq!(next, c(-1.0));
        assert!(!check.passed);
    }

    #[test]
    fn no_root_nearby_is_reported() {
        let q = [c(1.0), c(-2.0), c(0.0), c(5.0)];
        let p = [c(1.0), c(1.0)];
        let err = rouche_step(&q, &p, c(0.5), &RoucheParams::new(0.1, 5.0, 2)).unwrap_err();
        assert!(matches!(err, ChainError::NoRootWithinEps { .. }));
    }

    #[test]
    fn omega_two_series_root_reaches_annulus() {
        let g = omega_set(2).unwrap();
        let cert = check_star(&g);
        // 1 - z - z^2 - … - z^9
        let minus = CycNum::from_int(4, -1).unwrap();
        let mut coeffs = vec![CycNum::one(4).unwrap()];
        coeffs.extend(std::iter::repeat_n(minus, 9));
        let a = GPoly::new(coeffs).unwrap();
        let roots = roots_certified(&a.approx(), 1e-9).unwrap();
        let s = *roots
            .roots
            .iter()
            .find(|z| (z.re - 0.5).abs() < 0.05 && z.im.abs() < 1e-9)
            .unwrap();
        let config = ChainConfig::for_order(2);
        let chain = connect_to_annulus(&a, s, &g, &cert, &config).unwrap();
        assert_eq!(chain.terminal, Terminal::ReachedAnnulus);
        assert!(verify_chain(&chain, 0.1).all());
        assert!(chain.points.len() > 1);
    }

    #[test]
    fn point_already_in_annulus() {
        let g = omega_set(2).unwrap();
        let cert = check_star(&g);
        let family = crate::polyseries::ZeroSetEnumerator::new(&g, 5).unwrap();
        let (a, s) = (0..family.total().unwrap())
            .find_map(|i| {
                let e = family.entry(i).unwrap();
                let z = e.roots.roots.iter().copied().find(|z| z.norm() > 0.72 && z.norm() < 1.0);
                z.map(|z| (e.poly(&g), z))
            })
            .unwrap();
        let mut config = ChainConfig::for_order(2);
        config.radius = 1.0 / 2f64.sqrt();
        let chain = connect_to_annulus(&a, s, &g, &cert, &config).unwrap();
        assert_eq!(chain.points.len(), 1);
        assert!(verify_chain(&chain, 0.1).all());
    }

    #[test]
    fn displaced_point_fails_hop_check() {
        let g = omega_set(2).unwrap();
        let one = GPoly::from_indices(&g, &[0]).unwrap();
        let point = |z: Complex64| ChainPoint {
            z,
            poly_index: 0,
            residual: 0.0,
            certified: true,
            poly: one.clone(),
        };
        let chain = EpsilonChain {
            eps: 0.1,
            radius: 0.7,
            tol: 1e-9,
            len: 2,
            points: vec![point(c(0.0)), point(c(0.2)), point(c(0.0))],
            terminal: Terminal::Exhausted,
        };
        let report = verify_chain(&chain, 0.1);
        assert!(!report.hops_within_eps);
    }

    #[test]
    fn invalid_radius_is_rejected() {
        let g = omega_set(2).unwrap();
        let cert = check_star(&g);
        let a = GPoly::from_indices(&g, &[2]).unwrap();
        let mut config = ChainConfig::for_order(2);
        config.radius = 0.95;
        let err = connect_to_annulus(&a, c(-0.5), &g, &cert, &config).unwrap_err();
        assert!(matches!(err, ChainError::InvalidParameters(_)));
    }
}
