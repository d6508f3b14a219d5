//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_force_weight, ginibre};
use cweight::hermitian::{basis_vector, ComplexMatrix, DEFAULT_RANK_TOL};
use cweight::mmcs::{
    classify, construct, random_rank2_qutrit, random_reversible_spec, random_theorem2_spec, QutritClassification,
    MMCS_WEIGHT_TOL,
};
use cweight::qubit::{
    analytic_cone_ratio, is_maximal_pair, l1_comparison, mixedness_tradeoff_check, pair_maximal, qubit_weight,
    volume_ratio,
};
use cweight::states::{
    diagnostics, direct_sum, haar_vector, substream, DensityMatrix, DirectSumSpec, GaussianSource,
    DEFAULT_COHERENCE_RANK_TOL,
};
use cweight::weight::{solve, verify_certificate, SolverConfig};
use rayon::prelude::*;

/// One solver call, independently re-verified.
#[derive(Clone, Copy)]
struct Solved {
    weight: f64,
    gap: f64,
    /// Gap recomputed by the weak-duality checker; `None` if it rejected the certificate.
    checked_gap: Option<f64>,
    bound: f64,
    /// Minimum eigenvalue of the coherent remainder when `0 < weight < 1`.
    remainder_min_eig: Option<f64>,
    full_rank: bool,
}

fn solve_checked(rho: &DensityMatrix) -> Solved {
    let cfg = SolverConfig::default();
    let full_rank = rho.eig().split_range(DEFAULT_RANK_TOL).1.is_empty();
    match solve(rho, &cfg) {
        Ok(sol) => {
            let dec = &sol.decomposition;
            let remainder_min_eig = match (&dec.rho_f, &dec.rho_r) {
                (Some(_), Some(r)) => Some(r.eig().min()),
                _ => None,
            };
            Solved {
                weight: dec.weight,
                gap: dec.gap,
                checked_gap: verify_certificate(rho, dec, &sol.witness).ok(),
                bound: sol.witness.bound,
                remainder_min_eig,
                full_rank,
            }
        }
        Err(_) => Solved {
            weight: f64::NAN,
            gap: f64::INFINITY,
            checked_gap: None,
            bound: f64::NAN,
            remainder_min_eig: None,
            full_rank,
        },
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::NEG_INFINITY, f64::max)
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Every solved state seen by the gate, for the boundary and certificate criteria.
#[derive(Default)]
struct Pool {
    solved: Vec<Solved>,
    /// Solutions of full-rank samples drawn from the Hilbert–Schmidt ensemble.
    ginibre: Vec<Solved>,
}

fn qubit_closed_form(pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let n = 10_000u64;
    let rows: Vec<(f64, Solved)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = ginibre(2, 101, i);
            (qubit_weight(&rho).unwrap(), solve_checked(&rho))
        })
        .collect();
    let elapsed = start.elapsed();
    let worst = max(rows.iter().map(|(a, s)| (a - s.weight).abs()));
    pool.solved.extend(rows.iter().map(|r| r.1));
    pool.ginibre.extend(rows.iter().map(|r| r.1));
    outcome(
        worst <= 1e-6 && secs(elapsed) <= 60.0,
        format!("{n} qubits, max |closed form - solver| = {worst:.3e}, {:.1} s", secs(elapsed)),
    )
}

fn pair_rule() -> Outcome {
    let n = 10_000u64;
    let e0 = basis_vector(2, 0);
    let e1 = basis_vector(2, 1);
    let rows: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = ginibre(2, 101, i);
            let r = pair_maximal(&rho, &e0, &e1, 1e-10).unwrap();
            let diff = (1.0 - (r.lambda1 + r.lambda2) - qubit_weight(&rho).unwrap()).abs();
            (diff, is_maximal_pair(&rho, &e0, &e1, r.lambda1, r.lambda2, 1e-6, 1e-9).unwrap())
        })
        .collect();
    let worst = max(rows.iter().map(|r| r.0));
    let not_maximal = rows.iter().filter(|r| !r.1).count();
    outcome(
        worst <= 1e-9 && not_maximal == 0,
        format!("{n} qubits, max deviation {worst:.3e}, {not_maximal} outputs fail the epsilon-maximality test"),
    )
}

fn tradeoff() -> Outcome {
    let n = 100_000u64;
    let worst = (0..n)
        .into_par_iter()
        .map(|i| mixedness_tradeoff_check(&ginibre(2, 303, i)).unwrap())
        .reduce(|| f64::NEG_INFINITY, f64::max);
    outcome(worst <= 1.0 + 1e-9, format!("{n} qubits, max C_w^2 + M = {worst:.12}"))
}

fn l1_order_and_volume() -> Outcome {
    let n = 100_000u64;
    let worst = (0..n)
        .into_par_iter()
        .map(|i| {
            let c = l1_comparison(&ginibre(2, 404, i)).unwrap();
            c.cl1 - c.cw
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let census = volume_ratio(100_000, 405).unwrap();
    let analytic = analytic_cone_ratio();
    outcome(
        worst <= 1e-8 && (0.95..=1.05).contains(&census.ratio) && analytic == 1.0,
        format!(
            "max C_l1 - C_w = {worst:.3e}; strict:equal = {}:{} (ratio {:.4}); analytic ratio {analytic}",
            census.strict, census.equal, census.ratio
        ),
    )
}

fn partitions(n: usize, min: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in min..=n {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn weight_one_families(pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    for d in 3..=6usize {
        let options = partitions(d, 2);
        let batch: Vec<Solved> = (0..200u64)
            .into_par_iter()
            .map(|i| {
                let seed = 5000 + 1000 * d as u64 + i / 2;
                let spec = if i % 2 == 0 {
                    random_theorem2_spec(d, seed).unwrap()
                } else {
                    random_reversible_spec(&options[(i / 2) as usize % options.len()], seed).unwrap()
                };
                solve_checked(&construct(&spec, seed).unwrap())
            })
            .collect();
        rows.extend(batch);
    }
    let elapsed = start.elapsed();
    let low = rows.iter().filter(|s| !(s.weight >= 1.0 - 1e-6 && s.gap <= 1e-6)).count();
    let min_w = rows.iter().map(|s| s.weight).fold(f64::INFINITY, f64::min);
    pool.solved.extend(&rows);
    outcome(
        low == 0 && secs(elapsed) <= 120.0,
        format!("{} states (100 per family per d = 3..6), min weight {min_w:.9}, {low} failures, {:.1} s", rows.len(), secs(elapsed)),
    )
}

fn additivity(pool: &mut Pool) -> Outcome {
    let rows: Vec<(f64, Vec<Solved>)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut src = GaussianSource::new(substream(606, i));
            let d = 2 + (i % 5) as usize;
            // random composition of d into at least two parts
            let mut sizes = Vec::new();
            let mut left = d;
            while left > 0 {
                let cap = if sizes.is_empty() { left - 1 } else { left };
                let s = 1 + ((src.uniform() * cap as f64) as usize).min(cap - 1);
                sizes.push(s);
                left -= s;
            }
            let raw: Vec<f64> = sizes.iter().map(|_| 0.05 + src.uniform()).collect();
            let total: f64 = raw.iter().sum();
            let mut acc = 0.0;
            let mut blocks = Vec::new();
            for (k, &n) in sizes.iter().enumerate() {
                let p = if k + 1 == sizes.len() { 1.0 - acc } else { raw[k] / total };
                acc += p;
                blocks.push((p, ginibre(n, 607 + i, k as u64)));
            }
            let parts: Vec<Solved> = blocks.iter().map(|(_, s)| solve_checked(s)).collect();
            let expected: f64 = blocks.iter().zip(&parts).map(|((p, _), s)| p * s.weight).sum();
            let whole = solve_checked(&direct_sum(&DirectSumSpec::new(blocks)).unwrap());
            let mut all = parts;
            all.push(whole);
            ((whole.weight - expected).abs(), all)
        })
        .collect();
    let worst = max(rows.iter().map(|r| r.0));
    for (_, s) in &rows {
        pool.solved.extend(s);
    }
    outcome(worst <= 1e-6, format!("100 block-diagonal states, d <= 6, max deviation {worst:.3e}"))
}

fn qutrit_classifier(pool: &mut Pool) -> Outcome {
    let rows: Vec<(bool, Solved, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let rho = random_rank2_qutrit(808_000 + i);
            let v = classify(&rho, DEFAULT_RANK_TOL, DEFAULT_COHERENCE_RANK_TOL).unwrap();
            (v.qutrit_classification == QutritClassification::Mmcs, solve_checked(&rho), v.participation_ratio)
        })
        .collect();
    let mismatches = rows.iter().filter(|(m, s, _)| *m != (s.weight >= 1.0 - MMCS_WEIGHT_TOL)).count();
    let mmcs = rows.iter().filter(|r| r.0).count();
    let too_mixed = rows.iter().filter(|(_, s, r)| s.weight >= 1.0 - MMCS_WEIGHT_TOL && *r > 2.0 + 1e-6).count();
    pool.solved.extend(rows.iter().map(|r| r.1));
    outcome(
        mismatches == 0 && too_mixed == 0,
        format!("1000 rank-2 qutrits ({mmcs} mmcs), {mismatches} verdict mismatches, {too_mixed} weight-one states with R > 2"),
    )
}

fn l1_lower_bound(pool: &mut Pool) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for d in 2..=6usize {
        let rows: Vec<(f64, Solved)> = (0..1000u64)
            .into_par_iter()
            .map(|i| {
                let rho = ginibre(d, 909, i);
                (rho.l1_coherence() / (d - 1) as f64, solve_checked(&rho))
            })
            .collect();
        worst = worst.max(max(rows.iter().map(|(l, s)| l - s.weight)));
        pool.solved.extend(rows.iter().map(|r| r.1));
        pool.ginibre.extend(rows.iter().map(|r| r.1));
    }
    outcome(worst <= 1e-8, format!("1000 states per d = 2..6, max C_l1/(d-1) - C_w = {worst:.3e}"))
}

/// `(1 - t) diag(sigma) + t sigma` scaled to off-diagonal Frobenius mass `mass`.
fn with_off_diagonal_mass(sigma: &DensityMatrix, mass: f64) -> DensityMatrix {
    let t = mass / sigma.matrix().off_diagonal_norm();
    sigma.mix(&sigma.dephased(), t).unwrap()
}

fn faithful_and_convex(pool: &mut Pool) -> Outcome {
    // Off-diagonal mass below 1e-6 / d forces C_w <= C_l1 < 1e-6; mass above
    // 1e-6 d forces C_w >= C_l1 / (d - 1) > 1e-6.
    let rows: Vec<(bool, Solved)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let d = 2 + (i % 5) as usize;
            let sigma = ginibre(d, 1010, i);
            let mut src = GaussianSource::new(substream(1011, i));
            let u = src.uniform();
            let (rho, small) = match i % 4 {
                0 => (sigma.dephased(), true),
                1 => (with_off_diagonal_mass(&sigma, 1e-6 / d as f64 * 10f64.powf(-4.0 * u)), true),
                2 => (with_off_diagonal_mass(&sigma, (1e-6 * d as f64 * 10f64.powf(4.0 * u)).min(sigma.matrix().off_diagonal_norm())), false),
                _ => (sigma, false),
            };
            assert_eq!(rho.matrix().off_diagonal_norm() <= 1e-6, small);
            (small, solve_checked(&rho))
        })
        .collect();
    let faithful_bad = rows.iter().filter(|(small, s)| (s.weight <= 1e-6) != *small).count();
    pool.solved.extend(rows.iter().map(|r| r.1));

    let mixes: Vec<(f64, [Solved; 3])> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let d = 2 + (i % 5) as usize;
            let mut src = GaussianSource::new(substream(1012, i));
            let a = ginibre(d, 1013, i);
            let b = if i % 2 == 0 {
                ginibre(d, 1014, i)
            } else {
                DensityMatrix::pure(&haar_vector(d, &mut src)).unwrap()
            };
            let p = src.uniform();
            let sa = solve_checked(&a);
            let sb = solve_checked(&b);
            let sm = solve_checked(&a.mix(&b, p).unwrap());
            (sm.weight - (p * sa.weight + (1.0 - p) * sb.weight), [sa, sb, sm])
        })
        .collect();
    let worst = max(mixes.iter().map(|m| m.0));
    for (_, s) in &mixes {
        pool.solved.extend(s);
    }
    outcome(
        faithful_bad == 0 && worst <= 1e-6,
        format!("faithfulness: {faithful_bad}/1000 misclassified; convexity: max violation {worst:.3e} over 1000 mixtures"),
    )
}

struct CorpusRow {
    solved: Solved,
    participation_ratio: f64,
    kernel_coherence_rank: usize,
    min_eigenvalue: f64,
}

fn large_samples(pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let n = 100_000u64;
    let mut notes = Vec::new();
    let mut pass = true;
    for d in 3..=6usize {
        let rows: Vec<CorpusRow> = (0..n)
            .into_par_iter()
            .map(|i| {
                let rho = ginibre(d, 1111, i);
                let diag = diagnostics(&rho, DEFAULT_COHERENCE_RANK_TOL).unwrap();
                CorpusRow {
                    solved: solve_checked(&rho),
                    participation_ratio: diag.participation_ratio,
                    kernel_coherence_rank: diag.min_eigvec_coherence_rank,
                    min_eigenvalue: diag.min_eigenvalue,
                }
            })
            .collect();
        let best = rows.iter().fold(&rows[0], |b, r| if r.solved.weight > b.solved.weight { r } else { b });
        let smaller = rows.iter().filter(|r| r.min_eigenvalue < best.min_eigenvalue).count();
        let mut ok = best.kernel_coherence_rank == d && best.solved.weight >= 0.99;
        let mut note = format!(
            "d={d}: max C_w {:.7}, R {:.4}, lambda_min {:.3e} ({smaller} smaller), r_c {}",
            best.solved.weight, best.participation_ratio, best.min_eigenvalue, best.kernel_coherence_rank
        );
        if d == 3 {
            let high = rows.iter().filter(|r| r.participation_ratio > 2.05 && r.solved.weight >= 0.999).count();
            ok &= high == 0;
            note.push_str(&format!(", {high} with R > 2.05 and C_w >= 0.999"));
        }
        pass &= ok;
        notes.push(note);
        pool.solved.extend(rows.iter().map(|r| r.solved));
        pool.ginibre.extend(rows.iter().map(|r| r.solved));
    }
    let elapsed = start.elapsed();
    pass &= secs(elapsed) <= 1800.0;
    outcome(pass, format!("{} in {:.0} s", notes.join("; "), secs(elapsed)))
}

fn boundary(pool: &Pool) -> Outcome {
    let interior: Vec<f64> = pool.solved.iter().filter_map(|s| s.remainder_min_eig).collect();
    let outside = interior.iter().filter(|&&m| !(-1e-8..=1e-6).contains(&m)).count();
    let lo = interior.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = max(interior.iter().cloned());
    let full: Vec<&Solved> = pool.ginibre.iter().filter(|s| s.full_rank).collect();
    let at_one = full.iter().filter(|s| !(s.weight < 1.0 - 1e-9)).count();
    outcome(
        outside == 0 && at_one == 0 && full.len() == pool.ginibre.len(),
        format!(
            "{} remainders with min eigenvalue in [{lo:.2e}, {hi:.2e}], {outside} outside; {} full-rank samples, {at_one} reach weight 1",
            interior.len(),
            full.len()
        ),
    )
}

fn self_certification(pool: &Pool) -> Outcome {
    let rejected = pool.solved.iter().filter(|s| s.checked_gap.is_none()).count();
    let unbracketed = pool
        .solved
        .iter()
        .filter(|s| !(s.bound <= s.weight + 1e-8 && s.gap <= 1e-6 && s.checked_gap.is_some_and(|g| g <= 1e-6)))
        .count();
    let worst_gap = max(pool.solved.iter().map(|s| s.gap));

    let oracle: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let d = 2 + (i % 2) as usize;
            let rho = if i % 4 == 3 {
                // rank-deficient mixture of d - 1 pure states
                let mut src = GaussianSource::new(substream(1213, i));
                let mut m = ComplexMatrix::zeros(d);
                for _ in 0..d - 1 {
                    m = &m + &ComplexMatrix::outer(&haar_vector(d, &mut src)).scale(1.0 / (d - 1) as f64);
                }
                DensityMatrix::new(m).unwrap()
            } else {
                ginibre(d, 1212, i)
            };
            (solve_checked(&rho).weight - brute_force_weight(&rho)).abs()
        })
        .collect();
    let oracle_worst = max(oracle.iter().cloned());
    outcome(
        rejected == 0 && unbracketed == 0 && oracle_worst <= 1e-3,
        format!(
            "{} solutions re-verified, {rejected} rejected, {unbracketed} unbracketed, max gap {worst_gap:.2e}; brute-force oracle max deviation {oracle_worst:.2e} over 100 states",
            pool.solved.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut pool = Pool::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "qubit closed form matches solver", qubit_closed_form(&mut pool)));
    results.push((2, "pair subtraction rule matches closed form", pair_rule()));
    results.push((3, "coherence-mixedness trade-off", tradeoff()));
    results.push((4, "weight dominates l1 coherence; cone volume ratio", l1_order_and_volume()));
    results.push((5, "weight-one constructions", weight_one_families(&mut pool)));
    results.push((6, "additivity on direct sums", additivity(&mut pool)));
    let qutrits = qutrit_classifier(&mut pool);
    let l1 = l1_lower_bound(&mut pool);
    let faithful = faithful_and_convex(&mut pool);
    let large = large_samples(&mut pool);
    results.push((7, "remainder on the boundary; full rank below one", boundary(&pool)));
    results.push((8, "qutrit weight-one classifier", qutrits));
    results.push((9, "normalized l1 lower bound", l1));
    results.push((10, "faithfulness and convexity", faithful));
    results.push((11, "largest weights in large samples", large));
    results.push((12, "self-certification and brute-force oracle", self_certification(&pool)));

    let mut failed = 0;
    for (k, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {tag}  {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
