//! Deciding the chain condition on a finite coefficient set.
//!
//! A difference `δ` is *admissible* for `G` when every `c ∈ G` has some `d ∈ G` with
//! `δc + d ∈ G`. Witnesses may depend on both the step and on `c`, so a chain
//! `a = b_1, …, b_m = b` works for every `c` at once exactly when each consecutive
//! difference is admissible. The condition is therefore `1 ∈ G` plus strong
//! connectivity of the digraph on `G` with an edge `u → v` whenever `v - u` is
//! admissible.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::coeffsets::{int_json, omega_polar_terms, omega_set, sin_ratio, CoeffError, CoeffSet};
use crate::cyclotomic::{CycError, CycNum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarError {
    #[error(transparent)]
    Cyc(#[from] CycError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("{0} is not a member of the coefficient set")]
    NotAMember(CycNum),
    #[error("the ladder target must be non-zero")]
    ZeroTarget,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("set is not closed under negation or lacks 0; reduced check does not apply")]
    NotSymmetric,
    #[error("explicit ladder failed validation: {0}")]
    LadderInvalid(String),
}

/// Witnesses for one admissible step: `witnesses[c]` is the index of the chosen `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessMap {
    pub step: CycNum,
    pub witnesses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepVerdict {
    Admissible(WitnessMap),
    /// `c` (an index into `G`) has no valid `d`.
    Refused { c: usize },
}

impl StepVerdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, StepVerdict::Admissible(_))
    }
}

fn check_conductor(delta: &CycNum, g: &CoeffSet) -> Result<(), StarError> {
    if delta.conductor() != g.conductor() {
        return Err(CycError::ConductorMismatch(delta.conductor(), g.conductor()).into());
    }
    Ok(())
}

/// Direct check of one step: for each `c`, the lexicographically smallest `d`.
pub fn admissible_step(delta: &CycNum, g: &CoeffSet) -> Result<StepVerdict, StarError> {
    check_conductor(delta, g)?;
    let mut witnesses = Vec::with_capacity(g.len());
    for (ci, c) in g.elements().iter().enumerate() {
        let dc = delta * c;
        match g.elements().iter().position(|d| g.contains(&(&dc + d))) {
            Some(di) => witnesses.push(di),
            None => return Ok(StepVerdict::Refused { c: ci }),
        }
    }
    Ok(StepVerdict::Admissible(WitnessMap {
        step: delta.clone(),
        witnesses,
    }))
}

/// Lookup table `g - d ↦ smallest d`, so that a witness for `δc` is a single probe.
struct DifferenceTable {
    first_d: HashMap<CycNum, usize>,
}

impl DifferenceTable {
    fn new(g: &CoeffSet) -> Self {
        let mut first_d = HashMap::with_capacity(g.len() * g.len());
        for (di, d) in g.elements().iter().enumerate() {
            for e in g.elements() {
                first_d.entry(e - d).or_insert(di);
            }
        }
        DifferenceTable { first_d }
    }

    fn verdict(&self, delta: &CycNum, g: &CoeffSet) -> StepVerdict {
        let mut witnesses = Vec::with_capacity(g.len());
        for (ci, c) in g.elements().iter().enumerate() {
            match self.first_d.get(&(delta * c)) {
                Some(&d) => witnesses.push(d),
                None => return StepVerdict::Refused { c: ci },
            }
        }
        StepVerdict::Admissible(WitnessMap {
            step: delta.clone(),
            witnesses,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedStep {
    /// Index of the element the blocked step starts from.
    pub from: usize,
    pub delta: CycNum,
    /// Index of a `c` admitting no witness for `delta`.
    pub c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefutationReason {
    MissingOne,
    Unreachable,
}

/// `element` cannot be reached from `from`: every step into `element` from the set of
/// elements reachable from `from` is blocked, as listed in `blocked`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub reason: RefutationReason,
    pub from: Option<usize>,
    pub element: Option<usize>,
    pub blocked: Vec<BlockedStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Refuted(Refutation),
}

#[derive(Debug, Clone)]
pub struct StarCertificate {
    conductor: u32,
    size: usize,
    steps: Vec<WitnessMap>,
    step_index: HashMap<CycNum, usize>,
    /// `parents[s][v]`: predecessor of `v` on the BFS tree rooted at `s`.
    parents: Vec<Vec<Option<usize>>>,
    verdict: Verdict,
}

impl StarCertificate {
    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn is_satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn set_size(&self) -> usize {
        self.size
    }

    /// Admissible non-zero steps, in canonical order.
    pub fn steps(&self) -> &[WitnessMap] {
        &self.steps
    }

    pub fn step(&self, delta: &CycNum) -> Option<&WitnessMap> {
        self.step_index.get(delta).map(|&i| &self.steps[i])
    }

    pub fn is_admissible(&self, delta: &CycNum) -> bool {
        delta.is_zero() || self.step_index.contains_key(delta)
    }

    /// Witness `d` (as an index) for `delta · g[c] + d ∈ G`.
    pub fn witness(&self, delta: &CycNum, c: usize) -> Option<usize> {
        self.step(delta).map(|w| w.witnesses[c])
    }

    /// Shortest admissible chain from `a` to `b` as element indices, both ends included.
    pub fn chain(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let parents = self.parents.get(a)?;
        if a == b {
            return Some(vec![a]);
        }
        parents.get(b)?.as_ref()?;
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parents[cur]?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    pub fn to_json(&self, g: &CoeffSet) -> Value {
        let exact = |x: &CycNum| Value::from(x.coeffs().iter().map(int_json).collect::<Vec<_>>());
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|w| json!({"delta": exact(&w.step), "witnesses": w.witnesses}))
            .collect();
        let mut out = json!({
            "verdict": if self.is_satisfied() { "satisfied" } else { "refuted" },
            "elements": g.elements().iter().map(exact).collect::<Vec<_>>(),
            "steps": steps,
        });
        match &self.verdict {
            Verdict::Satisfied => {
                let mut chains = Vec::new();
                for a in 0..self.size {
                    for b in 0..self.size {
                        if a != b {
                            chains.push(json!({"from": a, "to": b, "path": self.chain(a, b)}));
                        }
                    }
                }
                out["chains"] = Value::from(chains);
            }
            Verdict::Refuted(r) => {
                out["refutation"] = json!({
                    "reason": match r.reason {
                        RefutationReason::MissingOne => "missing-one",
                        RefutationReason::Unreachable => "unreachable",
                    },
                    "from": r.from,
                    "element": r.element,
                    "blocked": r.blocked.iter().map(|b| json!({
                        "from": b.from, "delta": exact(&b.delta), "c": b.c,
                    })).collect::<Vec<_>>(),
                });
            }
        }
        out
    }
}

/// Decides the chain condition for `g`, returning chains or a refutation.
///
/// Step admissibility is evaluated in parallel on the ambient rayon pool.
pub fn check_star(g: &CoeffSet) -> StarCertificate {
    let size = g.len();
    let elems = g.elements();

    let mut deltas: Vec<CycNum> = Vec::with_capacity(size * size);
    for u in elems {
        for v in elems {
            if u != v {
                deltas.push(v - u);
            }
        }
    }
    deltas.sort();
    deltas.dedup();

    let table = DifferenceTable::new(g);
    let verdicts: Vec<StepVerdict> = deltas.par_iter().map(|d| table.verdict(d, g)).collect();
    let verdict_of: HashMap<&CycNum, &StepVerdict> = deltas.iter().zip(&verdicts).collect();

    let mut steps = Vec::new();
    for v in &verdicts {
        if let StepVerdict::Admissible(w) = v {
            steps.push(w.clone());
        }
    }
    let step_index = steps
        .iter()
        .enumerate()
        .map(|(i, w)| (w.step.clone(), i))
        .collect();

    let mut adjacency = vec![Vec::new(); size];
    for (u, eu) in elems.iter().enumerate() {
        for (v, ev) in elems.iter().enumerate() {
            if u != v && verdict_of[&(ev - eu)].is_admissible() {
                adjacency[u].push(v);
            }
        }
    }
    let parents: Vec<Vec<Option<usize>>> = (0..size).map(|s| bfs_parents(&adjacency, s)).collect();

    let verdict = if !g.closure().contains_one {
        Verdict::Refuted(Refutation {
            reason: RefutationReason::MissingOne,
            from: None,
            element: None,
            blocked: Vec::new(),
        })
    } else {
        match find_unreachable(&parents) {
            None => Verdict::Satisfied,
            Some((a, b)) => {
                let blocked = (0..size)
                    .filter(|&u| u == a || parents[a][u].is_some())
                    .map(|u| {
                        let delta = &elems[b] - &elems[u];
                        let c = match verdict_of[&delta] {
                            StepVerdict::Refused { c } => *c,
                            StepVerdict::Admissible(_) => {
                                unreachable!("admissible edge into an unreachable element")
                            }
                        };
                        BlockedStep { from: u, delta, c }
                    })
                    .collect();
                Verdict::Refuted(Refutation {
                    reason: RefutationReason::Unreachable,
                    from: Some(a),
                    element: Some(b),
                    blocked,
                })
            }
        }
    };

    StarCertificate {
        conductor: g.conductor(),
        size,
        steps,
        step_index,
        parents,
        verdict,
    }
}

fn bfs_parents(adjacency: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut parent = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    seen[source] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    parent
}

fn find_unreachable(parents: &[Vec<Option<usize>>]) -> Option<(usize, usize)> {
    for (a, row) in parents.iter().enumerate() {
        for (b, p) in row.iter().enumerate() {
            if a != b && p.is_none() {
                return Some((a, b));
            }
        }
    }
    None
}

/// Symmetric shortcut: when `-G = G` and `0 ∈ G`, admissibility is closed under
/// negation, so it suffices that every element is reachable from `0`.
/// Uses [`admissible_step`] directly, independently of [`check_star`].
pub fn check_star_reduced(g: &CoeffSet) -> Result<bool, StarError> {
    let zero = g.zero();
    let Some(root) = g.index_of(&zero) else {
        return Err(StarError::NotSymmetric);
    };
    if !g.closure().negation {
        return Err(StarError::NotSymmetric);
    }
    if !g.closure().contains_one {
        return Ok(false);
    }
    let mut memo: HashMap<CycNum, bool> = HashMap::new();
    let mut seen = vec![false; g.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for v in 0..g.len() {
            if seen[v] {
                continue;
            }
            let delta = g.element(v) - g.element(u);
            let ok = match memo.get(&delta) {
                Some(&ok) => ok,
                None => {
                    let ok = admissible_step(&delta, g)?.is_admissible();
                    memo.insert(delta, ok);
                    ok
                }
            };
            if ok {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    Ok(seen.into_iter().all(|s| s))
}

/// The index `j` paired with `(q, r)` by the sine identities.
pub fn lemma_j(n: u32, q: i64, r: i64) -> i64 {
    let n = n as i64;
    let s = q + r - 1;
    let upper = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 - 1 };
    if (1..=upper).contains(&s) {
        s
    } else {
        n - s
    }
}

/// The explicit chain from `0` to a non-zero `a ∈ Ω_n` built from sine ratios.
#[derive(Debug, Clone)]
pub struct SinLadder {
    pub n: u32,
    pub target: usize,
    /// `a = ξ_{2n}^rotation · sin(ratio·π/n)/sin(π/n)`.
    pub rotation: i64,
    pub ratio: u32,
    /// Element indices `b_1 = 0, …, b_m = a`.
    pub chain: Vec<usize>,
    /// `witnesses[i][c]`: the `d` used for step `i` and element `c`.
    pub witnesses: Vec<Vec<usize>>,
}

impl SinLadder {
    /// Every step must be an admissible step of the certificate.
    pub fn validate_against(&self, g: &CoeffSet, cert: &StarCertificate) -> bool {
        self.chain
            .windows(2)
            .all(|w| cert.is_admissible(&(g.element(w[1]) - g.element(w[0]))))
    }

    /// Re-checks each step with [`admissible_step`].
    pub fn validate_steps(&self, g: &CoeffSet) -> Result<bool, StarError> {
        for w in self.chain.windows(2) {
            let delta = g.element(w[1]) - g.element(w[0]);
            if !admissible_step(&delta, g)?.is_admissible() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Builds [`SinLadder`]s for one `Ω_n`, caching the polar decomposition.
pub struct LadderBuilder {
    n: u32,
    set: CoeffSet,
    /// element index ↦ (rotation, ratio) for non-zero elements
    polar: HashMap<usize, (i64, u32)>,
}

impl LadderBuilder {
    pub fn new(n: u32) -> Result<Self, StarError> {
        let set = omega_set(n)?;
        let mut polar = HashMap::new();
        for t in omega_polar_terms(n)? {
            if t.ratio == 0 {
                continue;
            }
            let idx = set
                .index_of(&t.value)
                .ok_or_else(|| StarError::NotAMember(t.value.clone()))?;
            polar.entry(idx).or_insert((t.rotation, t.ratio));
        }
        Ok(LadderBuilder { n, set, polar })
    }

    pub fn set(&self) -> &CoeffSet {
        &self.set
    }

    fn decompose(&self, c: usize) -> (i64, i64) {
        match self.polar.get(&c) {
            Some(&(e, r)) => (e, r as i64),
            // zero: ratio 0 with a rotation of the parity the even-n families expect
            None => (if self.n % 2 == 0 { 1 } else { 0 }, 0),
        }
    }

    pub fn build(&self, a: &CycNum) -> Result<SinLadder, StarError> {
        let n = self.n;
        let m = 2 * n;
        let g = &self.set;
        let target = g.index_of(a).ok_or_else(|| StarError::NotAMember(a.clone()))?;
        if a.is_zero() {
            return Err(StarError::ZeroTarget);
        }
        let (rot, q) = self.decompose(target);
        let unit = CycNum::root_of_unity(m, rot)?;

        // ladder ratios after b_1 = 0
        let ratios: Vec<i64> = if q % 2 == 0 {
            (1..=q / 2).map(|i| 2 * i).collect()
        } else {
            (1..=(q + 1) / 2).map(|i| 2 * i - 1).collect()
        };
        let mut chain = vec![g.index_of(&g.zero()).expect("0 is in Ω_n")];
        for &r in &ratios {
            let b = &unit * &sin_ratio(n, r);
            chain.push(g.index_of(&b).ok_or(StarError::NotAMember(b))?);
        }

        let mut witnesses = Vec::with_capacity(ratios.len());
        for (step, &lq) in ratios.iter().enumerate() {
            let delta = g.element(chain[step + 1]) - g.element(chain[step]);
            let mut row = Vec::with_capacity(g.len());
            for ci in 0..g.len() {
                let (rot_c, r) = self.decompose(ci);
                let turn = CycNum::root_of_unity(m, rot + rot_c)?;
                let (d, result) = if lq == 1 {
                    // first step of an odd ladder: δc + (-δc) = 0
                    (-(&turn * &sin_ratio(n, r)), g.zero())
                } else {
                    let j = lemma_j(n, lq, r);
                    let k = r - lq + 1;
                    (-(&turn * &sin_ratio(n, j)), &turn * &sin_ratio(n, k))
                };
                let di = g.index_of(&d).ok_or_else(|| {
                    StarError::LadderInvalid(format!("witness {d} for c = {ci} is not in Ω_{n}"))
                })?;
                let lhs = &(&delta * g.element(ci)) + &d;
                if lhs != result || !g.contains(&result) {
                    return Err(StarError::LadderInvalid(format!(
                        "step {step} with c = {ci}: δc + d = {lhs}, expected {result} in Ω_{n}"
                    )));
                }
                row.push(di);
            }
            witnesses.push(row);
        }

        Ok(SinLadder {
            n,
            target,
            rotation: rot,
            ratio: q as u32,
            chain,
            witnesses,
        })
    }
}

pub fn explicit_chain(a: &CycNum, n: u32) -> Result<SinLadder, StarError> {
    LadderBuilder::new(n)?.build(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaResidual {
    pub j: i64,
    pub k: i64,
    pub exact_zero: bool,
    pub float_residual: f64,
}

/// Evaluates `(sin qπ/n − sin (q−2)π/n) sin rπ/n − sin jπ/n sin π/n − sin kπ/n sin π/n`
/// in floating point and exactly.
///
/// Exactly, each sine is `(ζ^a − ζ^{−a})/(2i)` with `ζ = ξ_{2n}`; every product carries
/// the same factor `(2i)^{-2}`, so the check runs on the numerators in `Z[ξ_{2n}]`.
pub fn lemma_residual(n: u32, q: i64, r: i64) -> Result<LemmaResidual, StarError> {
    let (q_max, r_max) = if n % 2 == 1 {
        ((n as i64 - 1) / 2, (n as i64 - 1) / 2)
    } else {
        (n as i64 / 2, n as i64 / 2)
    };
    if n < 2 || !(2..=q_max).contains(&q) || !(0..=r_max).contains(&r) {
        return Err(StarError::Precondition(format!(
            "(n, q, r) = ({n}, {q}, {r}) needs 2 <= q <= {q_max} and 0 <= r <= {r_max}"
        )));
    }
    let j = lemma_j(n, q, r);
    let k = r - q + 1;

    let sin = |a: i64| (a as f64 * std::f64::consts::PI / n as f64).sin();
    let float_residual = ((sin(q) - sin(q - 2)) * sin(r) - sin(j) * sin(1) - sin(k) * sin(1)).abs();

    // S(a)·S(b) with S(a) = ζ^a − ζ^{−a}, appended with an overall sign
    fn product(terms: &mut Vec<(i64, i64)>, sign: i64, a: i64, b: i64) {
        terms.extend([
            (a + b, sign),
            (a - b, -sign),
            (b - a, -sign),
            (-a - b, sign),
        ]);
    }
    let mut terms = Vec::with_capacity(16);
    product(&mut terms, 1, q, r);
    product(&mut terms, -1, q - 2, r);
    product(&mut terms, -1, j, 1);
    product(&mut terms, -1, k, 1);
    let exact_zero = CycNum::from_terms(2 * n, &terms)?.is_zero();

    Ok(LemmaResidual {
        j,
        k,
        exact_zero,
        float_residual,
    })
}

#[derive(Debug, Clone, Default)]
pub struct LemmaSweep {
    pub checked: usize,
    pub failures: Vec<(u32, i64, i64)>,
    pub max_float_residual: f64,
}

/// Runs [`lemma_residual`] over every valid `(n, q, r)` for odd `n <= max_odd` and even
/// `n <= max_even`.
pub fn lemma_sweep(max_odd: u32, max_even: u32) -> LemmaSweep {
    let mut report = LemmaSweep::default();
    let ns = (3..=max_odd)
        .filter(|n| n % 2 == 1)
        .chain((2..=max_even).filter(|n| n % 2 == 0));
    for n in ns {
        let (q_max, r_max) = if n % 2 == 1 {
            ((n as i64 - 1) / 2, (n as i64 - 1) / 2)
        } else {
            (n as i64 / 2, n as i64 / 2)
        };
        for q in 2..=q_max {
            for r in 0..=r_max {
                let res = lemma_residual(n, q, r).expect("parameters in range");
                report.checked += 1;
                report.max_float_residual = report.max_float_residual.max(res.float_residual);
                if !res.exact_zero {
                    report.failures.push((n, q, r));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(m: u32, k: i64) -> CycNum {
        CycNum::from_int(m, k).unwrap()
    }

    #[test]
    fn minus_two_in_omega_two() {
        let g = omega_set(2).unwrap();
        let StepVerdict::Admissible(w) = admissible_step(&int(4, -2), &g).unwrap() else {
            panic!("-2 should be admissible");
        };
        // canonical order: -1, 0, 1
        let idx = |k| g.index_of(&int(4, k)).unwrap();
        assert_eq!(w.witnesses[idx(1)], idx(1));
        assert_eq!(w.witnesses[idx(-1)], idx(-1));
        // the smallest witness for c = 0 is -1 (any d works)
        assert_eq!(w.witnesses[idx(0)], idx(-1));
    }

    #[test]
    fn zero_step_always_admissible() {
        let g = omega_set(3).unwrap();
        let StepVerdict::Admissible(w) = admissible_step(&g.zero(), &g).unwrap() else {
            panic!()
        };
        // smallest d with d ∈ G is element 0 in canonical order
        assert!(w.witnesses.iter().all(|&d| d == 0));
        let g = CoeffSet::from_integers(&[0, 1, 10]).unwrap();
        let zero = g.index_of(&int(1, 0)).unwrap();
        let StepVerdict::Admissible(w) = admissible_step(&int(1, 0), &g).unwrap() else {
            panic!()
        };
        assert!(w.witnesses.iter().all(|&d| d == zero));
    }

    #[test]
    fn big_step_refused() {
        let g = CoeffSet::from_integers(&[0, 1, 10]).unwrap();
        assert_eq!(
            admissible_step(&int(1, 10), &g).unwrap(),
            StepVerdict::Refused {
                c: g.index_of(&int(1, 10)).unwrap()
            }
        );
    }

    #[test]
    fn table_route_matches_direct_route() {
        for g in [omega_set(3).unwrap(), omega_set(4).unwrap(), CoeffSet::from_integers(&[0, 1, 10, -3]).unwrap()] {
            let table = DifferenceTable::new(&g);
            for u in g.elements() {
                for v in g.elements() {
                    let d = v - u;
                    assert_eq!(table.verdict(&d, &g), admissible_step(&d, &g).unwrap());
                }
            }
        }
    }

    #[test]
    fn omega_two_satisfied() {
        let g = omega_set(2).unwrap();
        let cert = check_star(&g);
        assert!(cert.is_satisfied());
        for a in 0..3 {
            for b in 0..3 {
                let chain = cert.chain(a, b).unwrap();
                assert_eq!(chain.first(), Some(&a));
                assert_eq!(chain.last(), Some(&b));
            }
        }
    }

    #[test]
    fn singleton_one_satisfied() {
        let g = CoeffSet::from_integers(&[1]).unwrap();
        assert!(check_star(&g).is_satisfied());
    }

    #[test]
    fn missing_one_refuted() {
        let g = CoeffSet::from_integers(&[0, 2]).unwrap();
        match check_star(&g).verdict() {
            Verdict::Refuted(r) => assert_eq!(r.reason, RefutationReason::MissingOne),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn ten_is_unreachable() {
        let g = CoeffSet::from_integers(&[0, 1, 10]).unwrap();
        let cert = check_star(&g);
        let Verdict::Refuted(r) = cert.verdict() else {
            panic!("expected refutation")
        };
        let ten = g.index_of(&int(1, 10)).unwrap();
        assert_eq!(r.element, Some(ten));
        let mut deltas: Vec<i64> = r
            .blocked
            .iter()
            .map(|b| b.delta.coeffs()[0].clone().try_into().unwrap())
            .collect();
        deltas.sort();
        assert_eq!(deltas, vec![9, 10]);
        for b in &r.blocked {
            assert_eq!(b.c, ten);
            assert!(!admissible_step(&b.delta, &g).unwrap().is_admissible());
        }
    }

    #[test]
    fn reduced_checker_agrees() {
        for n in 2..=8 {
            let g = omega_set(n).unwrap();
            assert_eq!(check_star_reduced(&g).unwrap(), check_star(&g).is_satisfied());
        }
        let g = CoeffSet::from_integers(&[0, 1]).unwrap();
        assert_eq!(check_star_reduced(&g).unwrap_err(), StarError::NotSymmetric);
    }

    #[test]
    fn golden_ratio_ladder() {
        let n = 5;
        let a = sin_ratio(n, 2);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((a.to_complex().re - phi).abs() < 1e-12);
        let ladder = explicit_chain(&a, n).unwrap();
        assert_eq!(ladder.chain.len(), 2);
        assert_eq!((ladder.rotation, ladder.ratio), (0, 2));
    }

    #[test]
    fn seven_ladder_passes_through_one() {
        let n = 7;
        let a = sin_ratio(n, 3);
        let ladder = explicit_chain(&a, n).unwrap();
        let g = omega_set(n).unwrap();
        let vals: Vec<CycNum> = ladder.chain.iter().map(|&i| g.element(i).clone()).collect();
        assert_eq!(vals, vec![g.zero(), g.one(), a]);
        assert!(ladder.validate_steps(&g).unwrap());
    }

    #[test]
    fn sixth_root_ladder() {
        let a = CycNum::root_of_unity(6, 1).unwrap();
        let ladder = explicit_chain(&a, 3).unwrap();
        assert_eq!(ladder.chain.len(), 2);
        assert_eq!(ladder.ratio, 1);
    }

    #[test]
    fn ladder_errors() {
        assert_eq!(
            explicit_chain(&CycNum::zero(10).unwrap(), 5).unwrap_err(),
            StarError::ZeroTarget
        );
        let two = int(10, 2);
        assert_eq!(explicit_chain(&two, 5).unwrap_err(), StarError::NotAMember(two));
    }

    #[test]
    fn lemma_examples() {
        let r = lemma_residual(5, 2, 2).unwrap();
        assert!(r.exact_zero);
        assert!(r.float_residual <= 1e-15);
        for n in [5, 6, 9, 12] {
            assert!(lemma_residual(n, 2, 0).unwrap().exact_zero);
        }
        let r = lemma_residual(6, 2, 3).unwrap();
        assert_eq!((r.j, r.k), (2, 2));
        assert!(r.exact_zero);
    }

    #[test]
    fn lemma_out_of_range() {
        assert!(matches!(lemma_residual(5, 3, 0), Err(StarError::Precondition(_))));
        assert!(matches!(lemma_residual(6, 2, 4), Err(StarError::Precondition(_))));
        assert!(matches!(lemma_residual(6, 1, 0), Err(StarError::Precondition(_))));
    }

    #[test]
    fn lemma_detects_wrong_index() {
        // perturbing k must break exactness: the checker is not vacuous
        let n = 11;
        let (q, r) = (3, 4);
        let j = lemma_j(n, q, r);
        let k = r - q + 2;
        let mut terms = Vec::new();
        for (s, a, b) in [(1, q, r), (-1, q - 2, r), (-1, j, 1), (-1, k, 1)] {
            terms.extend([(a + b, s), (a - b, -s), (b - a, -s), (-a - b, s)]);
        }
        assert!(!CycNum::from_terms(2 * n, &terms).unwrap().is_zero());
    }
}
