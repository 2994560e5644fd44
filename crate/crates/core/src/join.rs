//! Sequences `p_0, q_0, p_1, …, p_m` joining two members of `Q^G_N`.
//!
//! Each hop multiplies the current series by `1 + δ z^e` and truncates back to
//! length `N`. The construction recurses on the first differing position `j`:
//! walking the certificate chain `a = b_1, …, b_m = b` at position `j`, every step
//! `δ = b_{t+1} - b_t` first moves (recursively, touching only positions `> j`) to a
//! target whose tail is filled with witnesses so that `(1 + δ z^j)·target` still has
//! coefficients in `G` below `N`.

use std::ops::ControlFlow;

use serde_json::{json, Value};
use thiserror::Error;

use crate::coeffsets::{int_json, CoeffSet};
use crate::cyclotomic::CycNum;
use crate::polyseries::GPoly;
use crate::star::StarCertificate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoinError {
    #[error("coefficient set fails the chain condition; no join exists in general")]
    CannotJoin,
    #[error("{which} is not a member of Q^G_N for this coefficient set and length")]
    NotAMember { which: &'static str },
    #[error("no admissible chain between coefficient indices {from} and {to}")]
    NoChain { from: usize, to: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// One multiplication-and-truncation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop {
    pub delta: CycNum,
    pub exponent: usize,
    /// `(1 + δ z^e)·p_i` with all its coefficients.
    pub product: GPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSequence {
    pub len: usize,
    pub start: GPoly,
    pub end: GPoly,
    /// `p_0, …, p_m`.
    pub polys: Vec<GPoly>,
    /// `hops[i]` carries `q_i`; `polys[i + 1]` is its truncation.
    pub hops: Vec<Hop>,
}

impl JoinSequence {
    /// Number of hops `m`.
    pub fn hop_count(&self) -> usize {
        self.hops.len()
    }

    pub fn to_json(&self) -> Value {
        let exact = |x: &CycNum| Value::from(x.coeffs().iter().map(int_json).collect::<Vec<_>>());
        let poly = |p: &GPoly| Value::from(p.coeffs().iter().map(exact).collect::<Vec<_>>());
        json!({
            "N": self.len,
            "conductor": self.start.conductor(),
            "start": poly(&self.start),
            "end": poly(&self.end),
            "polys": self.polys.iter().map(poly).collect::<Vec<_>>(),
            "hops": self.hops.iter().map(|h| json!({
                "delta": exact(&h.delta),
                "exponent": h.exponent,
                "product": poly(&h.product),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Data handed to a walk visitor for hop `index`.
pub struct HopView<'a> {
    pub index: usize,
    pub from: &'a GPoly,
    pub hop: &'a Hop,
    pub to: &'a GPoly,
}

struct Walker<'a, F> {
    g: &'a CoeffSet,
    cert: &'a StarCertificate,
    len: usize,
    visit: F,
    count: usize,
}

impl<F> Walker<'_, F>
where
    F: FnMut(HopView<'_>) -> ControlFlow<()>,
{
    fn poly(&self, idx: &[usize]) -> GPoly {
        GPoly::from_indices(self.g, &idx[1..]).expect("indices come from the set")
    }

    /// Joins `cur` to `target` in place, with every position below `floor` untouched.
    fn join(
        &mut self,
        cur: &mut Vec<usize>,
        target: &[usize],
        floor: usize,
    ) -> Result<ControlFlow<()>, JoinError> {
        let Some(j) = (1..self.len).find(|&i| cur[i] != target[i]) else {
            return Ok(ControlFlow::Continue(()));
        };
        if j <= floor {
            return Err(JoinError::Internal(format!(
                "valuation {j} did not increase past {floor}"
            )));
        }
        let chain = self
            .cert
            .chain(cur[j], target[j])
            .ok_or(JoinError::NoChain {
                from: cur[j],
                to: target[j],
            })?;
        for pair in chain.windows(2) {
            let delta = self.g.element(pair[1]) - self.g.element(pair[0]);
            let wit = self
                .cert
                .step(&delta)
                .ok_or_else(|| JoinError::Internal(format!("step {delta} is not admissible")))?
                .witnesses
                .clone();
            // intermediate target: positions past j hold d(δ, coefficient j places back)
            let mut mid = cur.clone();
            for pos in j + 1..self.len {
                mid[pos] = wit[mid[pos - j]];
            }
            if self.join(cur, &mid, j)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
            if self.hop(cur, delta, j)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
            if cur[j] != pair[1] {
                return Err(JoinError::Internal(format!(
                    "hop at position {j} landed on index {} instead of {}",
                    cur[j], pair[1]
                )));
            }
        }
        self.join(cur, target, j)
    }

    fn hop(
        &mut self,
        cur: &mut Vec<usize>,
        delta: CycNum,
        e: usize,
    ) -> Result<ControlFlow<()>, JoinError> {
        let from = self.poly(cur);
        let product = from.mul_binomial(&delta, e);
        for (pos, slot) in cur.iter_mut().enumerate().skip(1) {
            *slot = self.g.index_of(&product.coeffs()[pos]).ok_or_else(|| {
                JoinError::Internal(format!("truncated coefficient {pos} left the set"))
            })?;
        }
        let to = self.poly(cur);
        let hop = Hop {
            delta,
            exponent: e,
            product,
        };
        let flow = (self.visit)(HopView {
            index: self.count,
            from: &from,
            hop: &hop,
            to: &to,
        });
        self.count += 1;
        Ok(flow)
    }
}

fn member_indices(
    p: &GPoly,
    g: &CoeffSet,
    len: usize,
    which: &'static str,
) -> Result<Vec<usize>, JoinError> {
    if !p.is_member(g, len) {
        return Err(JoinError::NotAMember { which });
    }
    let mut idx = vec![usize::MAX];
    idx.extend(p.indices_in(g).ok_or(JoinError::NotAMember { which })?);
    Ok(idx)
}

/// Walks the join from `a` to `b` hop by hop without materializing the sequence.
///
/// The visitor may stop the walk early; the return value reports whether it did
/// (`Break`) or the walk reached `b` (`Continue`).
pub fn walk_join<F>(
    a: &GPoly,
    b: &GPoly,
    g: &CoeffSet,
    cert: &StarCertificate,
    visit: F,
) -> Result<ControlFlow<()>, JoinError>
where
    F: FnMut(HopView<'_>) -> ControlFlow<()>,
{
    if !cert.is_satisfied() {
        return Err(JoinError::CannotJoin);
    }
    let len = a.len();
    let mut cur = member_indices(a, g, len, "start")?;
    let target = member_indices(b, g, len, "end")?;
    let mut walker = Walker {
        g,
        cert,
        len,
        visit,
        count: 0,
    };
    let flow = walker.join(&mut cur, &target, 0)?;
    if flow.is_continue() && cur != target {
        return Err(JoinError::Internal("walk ended away from the target".into()));
    }
    Ok(flow)
}

/// Full join sequence from `a` to `b`; `a == b` gives zero hops.
pub fn join_sequence(
    a: &GPoly,
    b: &GPoly,
    g: &CoeffSet,
    cert: &StarCertificate,
) -> Result<JoinSequence, JoinError> {
    let mut polys = vec![a.clone()];
    let mut hops = Vec::new();
    let _complete = walk_join(a, b, g, cert, |view| {
        hops.push(view.hop.clone());
        polys.push(view.to.clone());
        ControlFlow::Continue(())
    })?;
    Ok(JoinSequence {
        len: a.len(),
        start: a.clone(),
        end: b.clone(),
        polys,
        hops,
    })
}

/// Outcome of re-checking the five defining conditions of a join sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct JoinReport {
    /// every `p_i ∈ Q^G_N`
    pub members: bool,
    /// every coefficient of every `q_i` has modulus at most the growth bound
    pub products_bounded: bool,
    /// `q_i = (1 + δ_i z^{e_i})·p_i` coefficient by coefficient
    pub products_exact: bool,
    /// `C_N(q_i) = p_{i+1}`
    pub truncations: bool,
    /// `p_0 = A` and `p_m = B`
    pub endpoints: bool,
}

impl JoinReport {
    pub fn all(&self) -> bool {
        self.members
            && self.products_bounded
            && self.products_exact
            && self.truncations
            && self.endpoints
    }
}

/// Schoolbook product of coefficient vectors.
fn convolve(x: &[CycNum], y: &[CycNum], m: u32) -> Vec<CycNum> {
    let zero = CycNum::zero(m).expect("valid conductor");
    let mut out = vec![zero; x.len() + y.len() - 1];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (k, yk) in y.iter().enumerate() {
            out[i + k] = &out[i + k] + &(xi * yk);
        }
    }
    out
}

fn strip(v: &[CycNum]) -> &[CycNum] {
    let end = v.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
    &v[..end]
}

/// Independent check of a join sequence; failures are reported, never raised.
pub fn verify_join(seq: &JoinSequence, g: &CoeffSet, len: usize) -> JoinReport {
    let m = g.conductor();
    let bound = g.growth_bound();
    let members = seq
        .polys
        .iter()
        .all(|p| p.len() == len && p.conductor() == m && p.coeffs()[0].is_one()
            && p.coeffs()[1..].iter().all(|c| g.contains(c)));
    let shapes = seq.polys.len() == seq.hops.len() + 1;
    let products_bounded = seq.hops.iter().all(|h| {
        h.product.conductor() == m
            && h.product
                .coeffs()
                .iter()
                .all(|c| c.to_complex().norm() <= bound)
    });
    let products_exact = shapes
        && seq.hops.iter().zip(&seq.polys).all(|(h, p)| {
            if h.delta.conductor() != m || h.exponent == 0 {
                return false;
            }
            let zero = CycNum::zero(m).expect("valid conductor");
            let mut mult = vec![zero; h.exponent + 1];
            mult[0] = CycNum::one(m).expect("valid conductor");
            mult[h.exponent] = &mult[h.exponent] + &h.delta;
            let expanded = convolve(&mult, p.coeffs(), m);
            strip(&expanded) == strip(h.product.coeffs())
        });
    let truncations = shapes
        && seq.hops.iter().zip(&seq.polys[1..]).all(|(h, next)| {
            let zero = CycNum::zero(m).expect("valid conductor");
            (0..len).all(|i| {
                let qi = h.product.coeffs().get(i).unwrap_or(&zero);
                next.coeffs().get(i) == Some(qi)
            })
        });
    let endpoints = seq.polys.first() == Some(&seq.start)
        && seq.polys.last() == Some(&seq.end)
        && seq.start.len() == len
        && seq.end.len() == len;
    JoinReport {
        members,
        products_bounded,
        products_exact,
        truncations,
        endpoints,
    }
}
