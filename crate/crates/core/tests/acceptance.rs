//! Acceptance suite. Runs every criterion in sequence (so wall-clock limits are not
//! distorted by sibling tests), prints one PASS/FAIL line per criterion straight to
//! stderr, and fails if any criterion fails.

use std::collections::HashMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ngon_core::chain::{connect_to_annulus, verify_chain, ChainConfig, Terminal};
use ngon_core::coeffsets::{omega_polar, omega_set, CoeffSet};
use ngon_core::join::{join_sequence, verify_join};
use ngon_core::locus::{
    membership, membership_default, render_locus, InReason, Lambda, MembershipVerdict, Region,
    SearchParams,
};
use ngon_core::polyseries::{
    enumerate_zero_set_par, GPoly, ZeroSetEnumerator, DEFAULT_ENUM_BUDGET, DEFAULT_ROOT_TOL,
};
use ngon_core::star::{check_star, check_star_reduced, explicit_chain, lemma_sweep};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: u64, what: &str) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_secs), || {
        format!("{what} took {elapsed:.1?}, limit {limit_secs} s")
    })
}

fn report(id: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (tag, detail, ok) = match &result {
        Ok(d) => ("PASS", d.as_str(), true),
        Err(d) => ("FAIL", d.as_str(), false),
    };
    // written to the raw handle so the line survives output capture
    let _ = writeln!(
        std::io::stderr(),
        "[{tag}] criterion {id}: {title} ({elapsed:.2?}) {detail}"
    );
    ok
}

/// Direct numeric enumeration of `(ξ^j - ξ^k)/(1 - ξ)`, deduplicated at 1e-9.
fn numeric_omega(n: u32) -> Vec<Complex64> {
    let xi = |j: u32| Complex64::from_polar(1.0, std::f64::consts::TAU * f64::from(j) / f64::from(n));
    let denom = Complex64::new(1.0, 0.0) - xi(1);
    let mut out: Vec<Complex64> = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let v = (xi(j) - xi(k)) / denom;
            if !out.iter().any(|w| (w - v).norm() < 1e-9) {
                out.push(v);
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for n in 2..=40u32 {
        let g = omega_set(n).map_err(|e| e.to_string())?;
        let polar = omega_polar(n).map_err(|e| e.to_string())?;
        ensure(g.ring_equal(&polar), || format!("n={n}: polar form differs"))?;
        let expected = if n % 2 == 1 { n * n - n + 1 } else { n * n / 2 + 1 } as usize;
        let oracle = numeric_omega(n);
        ensure(g.len() == expected && oracle.len() == expected, || {
            format!("n={n}: |Ω|={} oracle={} formula={expected}", g.len(), oracle.len())
        })?;
        for z in g.approx() {
            ensure(oracle.iter().any(|w| (w - z).norm() < 1e-9), || {
                format!("n={n}: element {z} missing from the numeric enumeration")
            })?;
        }
    }
    within(start.elapsed(), 10, "n = 2..40")?;
    Ok("n = 2..40 equal, cardinalities match".into())
}

fn criterion_2() -> Outcome {
    let mut ladders = 0;
    let mut slowest = Duration::ZERO;
    for n in 2..=12u32 {
        let g = omega_set(n).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let cert = check_star(&g);
        let elapsed = t.elapsed();
        slowest = slowest.max(elapsed);
        within(elapsed, 60, &format!("check_star n={n}"))?;
        ensure(cert.is_satisfied(), || format!("n={n}: refuted {:?}", cert.verdict()))?;
        ensure(check_star_reduced(&g) == Ok(true), || format!("n={n}: reduced check disagrees"))?;
        if n < 3 {
            continue;
        }
        for a in g.elements().iter().filter(|a| !a.is_zero()) {
            let ladder = explicit_chain(a, n).map_err(|e| format!("n={n} a={a}: {e}"))?;
            ensure(ladder.validate_steps(&g) == Ok(true), || format!("n={n} a={a}: step refused"))?;
            ensure(ladder.validate_against(&g, &cert), || format!("n={n} a={a}: not in certificate"))?;
            ensure(ladder.chain.last() == g.index_of(a).as_ref(), || format!("n={n}: wrong end"))?;
            for (w, wit) in ladder.chain.windows(2).zip(&ladder.witnesses) {
                let delta = g.element(w[1]) - g.element(w[0]);
                for (c, &d) in wit.iter().enumerate() {
                    let v = &(&delta * g.element(c)) + g.element(d);
                    ensure(g.contains(&v), || format!("n={n} a={a}: witness {d} fails for c={c}"))?;
                }
            }
            ladders += 1;
        }
    }
    Ok(format!("n = 2..12 satisfied (slowest {slowest:.2?}), {ladders} ladders validated"))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let sweep = lemma_sweep(101, 100);
    within(t.elapsed(), 30, "sweep")?;
    ensure(sweep.failures.is_empty(), || format!("exact failures: {:?}", sweep.failures))?;
    ensure(sweep.max_float_residual <= 1e-12, || {
        format!("float residual {:e}", sweep.max_float_residual)
    })?;
    Ok(format!(
        "{} identities exact, max float residual {:.1e}",
        sweep.checked, sweep.max_float_residual
    ))
}

fn random_member(g: &CoeffSet, len: usize, rng: &mut ChaCha8Rng) -> GPoly {
    let idx: Vec<usize> = (1..len).map(|_| rng.random_range(0..g.len())).collect();
    GPoly::from_indices(g, &idx).expect("indices in range")
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let sets: HashMap<u32, (CoeffSet, _)> = (2..=5u32)
        .map(|n| {
            let g = omega_set(n).expect("valid order");
            let cert = check_star(&g);
            (n, (g, cert))
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a6f_696e);
    let mut hops = 0;
    for pair in 0..200 {
        let n = rng.random_range(2..=5u32);
        let len = rng.random_range(2..=8usize);
        let (g, cert) = &sets[&n];
        let a = random_member(g, len, &mut rng);
        let b = random_member(g, len, &mut rng);
        let seq = join_sequence(&a, &b, g, cert).map_err(|e| format!("pair {pair}: {e}"))?;
        let r = verify_join(&seq, g, len);
        ensure(r.all(), || format!("pair {pair} (n={n}, N={len}): {r:?}"))?;
        for h in &seq.hops {
            ensure((1..len).contains(&h.exponent), || format!("pair {pair}: exponent {}", h.exponent))?;
            ensure(
                g.elements()
                    .iter()
                    .all(|c| (&h.delta * c).to_complex().norm() <= g.growth_bound()),
                || format!("pair {pair}: |δc| exceeds L"),
            )?;
        }
        hops += seq.hop_count();
    }
    within(t.elapsed(), 60, "200 joins")?;
    Ok(format!("200 pairs verified, {hops} hops in total"))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut summary = Vec::new();
    for n in 2..=4u32 {
        let g = omega_set(n).map_err(|e| e.to_string())?;
        let cert = check_star(&g);
        let family = ZeroSetEnumerator::new(&g, 10).map_err(|e| e.to_string())?;
        let config = ChainConfig::for_order(n);
        ensure(
            (config.radius - (1.0 / f64::from(n).sqrt() + 0.01)).abs() < 1e-15 && config.eps == 0.1,
            || "unexpected chain defaults".into(),
        )?;
        let mut rng = ChaCha8Rng::seed_from_u64(u64::from(n) * 7919);
        let mut done = 0;
        let mut points = 0;
        let mut doubled = 0;
        while done < 50 {
            let index = rng.random_range(0..family.total().expect("fits"));
            let entry = family.entry(index).map_err(|e| e.to_string())?;
            let a = entry.poly(&g);
            for &s in entry.roots.roots.iter().filter(|z| z.norm() <= config.radius) {
                let chain = connect_to_annulus(&a, s, &g, &cert, &config)
                    .map_err(|e| format!("n={n} poly {index} root {s}: {e}"))?;
                let r = verify_chain(&chain, 0.1);
                ensure(chain.terminal == Terminal::ReachedAnnulus && r.all(), || {
                    format!("n={n} poly {index} root {s}: {r:?}")
                })?;
                ensure(chain.points[0].z == s, || "chain does not start at the root".into())?;
                ensure(chain.points.iter().all(|p| p.residual <= 1e-9), || "residual".into())?;
                let last = chain.last().norm();
                ensure(config.radius < last && last < 1.0, || format!("ends at modulus {last}"))?;
                points += chain.points.len();
                if chain.len > 10 {
                    doubled += 1;
                }
                done += 1;
                if done == 50 {
                    break;
                }
            }
        }
        summary.push(format!("n={n}: 50 chains, {points} points, {doubled} needed N>10"));
    }
    within(t.elapsed(), 300, "chains")?;
    Ok(summary.join("; "))
}

fn random_in_annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let r = rng.random_range(lo..hi);
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

fn check_ring(n: u32, g: &CoeffSet) -> Result<String, String> {
    let t = Instant::now();
    let raster = render_locus(n, Region::default(), 256, 256, &SearchParams::render())
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    within(elapsed, 60, &format!("256x256 render of M_{n}"))?;
    let inner = 1.0 / f64::from(n).sqrt();
    for y in 0..256 {
        for x in 0..256 {
            let z = raster.pixel_center(x, y);
            let m = z.norm();
            if inner + 1e-9 < m && m < 1.0 - 1e-9 {
                ensure(raster.code(x, y) == 2, || format!("M_{n}: annulus pixel {z} not In"))?;
            }
            if m > 0.0 && g.max_modulus() * m / (1.0 - m) < 1.0 {
                ensure(raster.code(x, y) == 0, || format!("M_{n}: small pixel {z} not Out"))?;
            }
            if m >= 1.0 {
                ensure(raster.code(x, y) == 0, || format!("M_{n}: pixel {z} outside the disc"))?;
            }
        }
    }
    let [o, u, i] = raster.counts();
    Ok(format!("M_{n} in {elapsed:.1?} (in {i}, unknown {u}, out {o})"))
}

fn criterion_6() -> Outcome {
    let g2 = omega_set(2).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..500 {
        let z = random_in_annulus(&mut rng, 1e-6, 0.49);
        let v = membership_default(z, &g2).map_err(|e| e.to_string())?;
        ensure(v.is_out(), || format!("{z} gave {v:?}"))?;
    }
    for _ in 0..500 {
        let z = random_in_annulus(&mut rng, 0.72 + 1e-9, 0.99);
        let v = membership_default(z, &g2).map_err(|e| e.to_string())?;
        ensure(v.is_in(), || format!("{z} gave {v:?}"))?;
    }
    let half: Lambda = "0.5".parse().map_err(|e: ngon_core::locus::LocusError| e.to_string())?;
    let v = membership(&half, &g2, &SearchParams::default()).map_err(|e| e.to_string())?;
    ensure(v == MembershipVerdict::In { reason: InReason::ExactCycle }, || {
        format!("λ = 0.5 gave {v:?}")
    })?;
    let g4 = omega_set(4).map_err(|e| e.to_string())?;
    let m2 = check_ring(2, &g2)?;
    let m4 = check_ring(4, &g4)?;
    Ok(format!("1000 samples and λ = 1/2 correct; {m2}; {m4}"))
}

/// Search parameters for the consistency sweep: full depth, 200 states per root.
fn sweep_params() -> SearchParams {
    SearchParams {
        budget: 200,
        ..SearchParams::default()
    }
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let params = sweep_params();
    let mut roots = 0usize;
    let mut unknown = 0usize;
    for n in 2..=4u32 {
        let g = omega_set(n).map_err(|e| e.to_string())?;
        for len in 2..=8usize {
            let entries = enumerate_zero_set_par(&g, len, DEFAULT_ENUM_BUDGET, DEFAULT_ROOT_TOL)
                .map_err(|e| e.to_string())?;
            for e in &entries {
                for &z in &e.roots.roots {
                    let m = z.norm();
                    if !(m > 0.0 && m < 1.0) {
                        continue;
                    }
                    roots += 1;
                    let v = membership(&Lambda::Float(z), &g, &params).map_err(|e| e.to_string())?;
                    ensure(!v.is_out(), || {
                        format!("n={n} N={len} poly {} root {z} certified {v:?}", e.index)
                    })?;
                    if !v.is_in() {
                        unknown += 1;
                    }
                }
            }
        }
    }
    within(t.elapsed(), 120, "consistency sweep")?;
    Ok(format!("{roots} roots in the disc, none Out ({unknown} undecided)"))
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for n in 2..=4u32 {
        let g = omega_set(n).map_err(|e| e.to_string())?;
        ensure(g.closure().conjugation, || format!("Ω_{n} not conjugation-closed"))?;
        let conj_index: Vec<usize> = g
            .elements()
            .iter()
            .map(|a| g.index_of(&a.conj()).expect("closed under conjugation"))
            .collect();
        for len in 2..=5usize {
            let family = ZeroSetEnumerator::new(&g, len).map_err(|e| e.to_string())?;
            let entries = enumerate_zero_set_par(&g, len, DEFAULT_ENUM_BUDGET, DEFAULT_ROOT_TOL)
                .map_err(|e| e.to_string())?;
            let by_digits: HashMap<&[usize], usize> =
                entries.iter().enumerate().map(|(i, e)| (e.digits.as_slice(), i)).collect();
            let degrees: usize = (0..family.total().expect("fits"))
                .map(|i| family.poly_at(i).expect("in range").degree())
                .sum();
            let roots: usize = entries.iter().map(|e| e.roots.len()).sum();
            ensure(degrees == roots, || {
                format!("n={n} N={len}: degrees {degrees} vs roots {roots}")
            })?;
            for e in &entries {
                let mirror: Vec<usize> = e.digits.iter().map(|&d| conj_index[d]).collect();
                let other = &entries[by_digits[mirror.as_slice()]];
                let mut pool: Vec<Complex64> = other.roots.roots.clone();
                for z in &e.roots.roots {
                    let target = z.conj();
                    let best = pool
                        .iter()
                        .enumerate()
                        .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
                        .map(|(i, w)| (i, (w - target).norm()));
                    match best {
                        Some((i, d)) if d < 1e-6 => {
                            pool.swap_remove(i);
                        }
                        _ => return Err(format!("n={n} N={len}: conjugate of {z} missing")),
                    }
                }
            }
            checked += roots;
        }
    }
    Ok(format!("{checked} roots counted and matched with conjugates"))
}

#[test]
fn acceptance() {
    let results = [
        report(1, "Ω_n dual construction", criterion_1),
        report(2, "chain condition and explicit ladders", criterion_2),
        report(3, "sine-ratio identity sweep", criterion_3),
        report(4, "join sequences", criterion_4),
        report(5, "ε-chains into the annulus", criterion_5),
        report(6, "locus of M_2 and renders", criterion_6),
        report(7, "no root certified outside", criterion_7),
        report(8, "root bookkeeping and conjugation", criterion_8),
    ];
    let failed: Vec<usize> = (1..=8).filter(|i| !results[i - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
