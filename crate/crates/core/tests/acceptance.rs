//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use champrec::data::{generate_synthetic, SynthConfig};
use champrec::evaluation::{
    cohort_recommendations, grid_search, hit_rate_at_k, normal_cdf, popularity_share,
    sample_cohort, z_test_one_sided, HyperGrid,
};
use champrec::ratings::Dataset;
use champrec::slope_one::{predict_slope_one, train_slope_one};
use champrec::svd::{
    fold_in, fold_in_objective, init_model, objective, objective_gradient, rating_gradient,
    sgd_epoch, training_rng,
};
use champrec::{
    build_training_set, normalize_user, recommend, train, FactorModel, Hyperparams, MasteryRecord,
    RatingTriple,
};

type Outcome = Result<String, String>;

/// Criteria that cannot pass as stated. Their lines still print FAIL; the
/// analysis is in the README.
const KNOWN_UNATTAINABLE: &[usize] = &[3];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn triples(rows: &[(&str, u32, u8)]) -> Dataset {
    Dataset::from_triples(
        rows.iter()
            .map(|&(p, c, r)| RatingTriple {
                player_id: p.into(),
                champion_id: c,
                rating: r,
            })
            .collect(),
    )
    .unwrap()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn c1_normalization() -> Outcome {
    let cmp = [367_191u64, 136_709, 106_064, 89_306, 59_486];
    let records: Vec<MasteryRecord> = cmp
        .iter()
        .enumerate()
        .map(|(i, &c)| MasteryRecord::new("table-player", i as u32 + 1, c))
        .collect();
    let ratings: Vec<u8> = normalize_user(&records)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|t| t.rating)
        .collect();
    ensure(ratings == [100, 38, 29, 25, 17], || format!("got {ratings:?}"))?;
    Ok(format!("{ratings:?}"))
}

/// Random small instance: up to 10 ratings over 3 users and 4 champions.
fn random_instance(rng: &mut ChaCha8Rng) -> (Dataset, FactorModel) {
    let mut cells: Vec<(usize, u32)> = (0..3).flat_map(|u| (1..=4).map(move |c| (u, c))).collect();
    let n = rng.random_range(1..=10);
    let mut rows = Vec::new();
    for _ in 0..n {
        let (u, c) = cells.swap_remove(rng.random_range(0..cells.len()));
        rows.push(RatingTriple {
            player_id: format!("u{u}"),
            champion_id: c,
            rating: rng.random_range(1..=100),
        });
    }
    let d = Dataset::from_triples(rows).unwrap();
    let h = Hyperparams {
        factors: rng.random_range(1..=4),
        regularization: rng.random_range(0.0..0.5),
        learning_rate: 0.01,
        seed: rng.random(),
        init_std: 1.0,
        ..Hyperparams::paper_tuned()
    };
    let m = init_model(&d, &h).unwrap();
    (d, m)
}

fn c2_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let (d, mut m) = random_instance(&mut rng);
        let (gu, gi) = objective_gradient(&m, &d).map_err(|e| e.to_string())?;
        let analytic: Vec<f64> = gu.iter().chain(&gi).copied().collect();
        let n_users = gu.len();
        for (k, &a) in analytic.iter().enumerate() {
            let get = |m: &mut FactorModel| {
                let (u, i) = m.factors_mut();
                if k < n_users {
                    u[k]
                } else {
                    i[k - n_users]
                }
            };
            let set = |m: &mut FactorModel, v: f64| {
                let (u, i) = m.factors_mut();
                if k < n_users {
                    u[k] = v
                } else {
                    i[k - n_users] = v
                }
            };
            let x = get(&mut m);
            let step = 1e-5 * x.abs().max(1.0);
            set(&mut m, x + step);
            let up = objective(&m, &d).unwrap();
            set(&mut m, x - step);
            let down = objective(&m, &d).unwrap();
            set(&mut m, x);
            let numeric = (up - down) / (2.0 * step);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1.0);
            worst = worst.max(rel);
            ensure(rel <= 1e-5, || {
                format!("trial {trial}, coordinate {k}: analytic {a}, numeric {numeric}")
            })?;
        }

        // one SGD step on a single rating moves by -gamma/2 times its gradient
        let row = &d.triples()[0];
        let single = triples(&[(&row.player_id, row.champion_id, row.rating)]);
        let mut one = init_model(&single, m.hyperparams()).unwrap();
        let (p0, q0) = (one.user_vector(0).to_vec(), one.item_vector(0).to_vec());
        let h = *one.hyperparams();
        let (gp, gq) = rating_gradient(&p0, &q0, f64::from(row.rating), h.regularization);
        sgd_epoch(&mut one, &single, &mut training_rng(&h)).unwrap();
        for k in 0..h.factors {
            let dp = one.user_vector(0)[k] - (p0[k] - h.learning_rate / 2.0 * gp[k]);
            let dq = one.item_vector(0)[k] - (q0[k] - h.learning_rate / 2.0 * gq[k]);
            ensure(dp.abs() < 1e-12 && dq.abs() < 1e-12, || {
                format!("trial {trial}: SGD step differs from gradient step by {dp:e}, {dq:e}")
            })?;
        }
    }
    Ok(format!("20 instances, worst relative error {worst:.1e}"))
}

fn c3_descent() -> Outcome {
    let records = generate_synthetic(&SynthConfig::two_archetype(50, 20, 7)).unwrap();
    let d = build_training_set(&records).unwrap();
    let h = Hyperparams {
        seed: 7,
        ..Hyperparams::paper_default()
    };
    let literal = train(&d, &h);
    let swapped = train(&d, &Hyperparams { learning_rate: 0.005, regularization: 0.02, ..h });
    let swapped_note = match &swapped {
        Ok((_, t)) => format!(
            "with gamma 0.005, lambda 0.02 instead: J1 {:.1} -> J20 {:.1}",
            t.objective[0], t.objective[19]
        ),
        Err(e) => format!("with gamma 0.005, lambda 0.02 instead: {e}"),
    };
    match literal {
        Ok((_, t)) => {
            let (first, last) = (t.objective[0], t.objective[t.objective.len() - 1]);
            ensure(last < first, || format!("J1 {first} -> J20 {last}"))?;
            Ok(format!("J1 {first:.1} -> J20 {last:.1}"))
        }
        Err(e) => Err(format!(
            "{e} (gamma 0.02 overshoots on the 1..100 scale); {swapped_note}"
        )),
    }
}

fn c4_fold_in() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let f = rng.random_range(1..=4);
        let n_items = rng.random_range(1..=6u32);
        let rows: Vec<(String, u32, u8)> = (1..=n_items).map(|c| ("x".to_string(), c, 50)).collect();
        let d = Dataset::from_triples(
            rows.iter()
                .map(|(p, c, r)| RatingTriple {
                    player_id: p.clone(),
                    champion_id: *c,
                    rating: *r,
                })
                .collect(),
        )
        .unwrap();
        let h = Hyperparams {
            factors: f,
            ..Hyperparams::paper_tuned()
        };
        let mut m = init_model(&d, &h).unwrap();
        for v in m.factors_mut().1.iter_mut() {
            *v = normal(&mut rng);
        }
        let size = rng.random_range(1..=n_items.min(5));
        let profile: Vec<(u32, f64)> = (1..=size)
            .map(|c| (c, f64::from(rng.random_range(1..=100u8))))
            .collect();
        let reg = rng.random_range(0.1..2.0);
        let closed = fold_in(&m, &profile, reg).map_err(|e| e.to_string())?;

        // gradient descent on the same objective, step 1 / L
        let q: Vec<&[f64]> = profile.iter().map(|&(c, _)| m.item_vector_of(c).unwrap()).collect();
        let frob: f64 = q.iter().flat_map(|row| row.iter()).map(|v| v * v).sum();
        let step = 1.0 / (2.0 * (frob + reg));
        let mut p = vec![0.0; f];
        for _ in 0..1_000_000 {
            let mut grad: Vec<f64> = p.iter().map(|v| 2.0 * reg * v).collect();
            for (row, &(_, r)) in q.iter().zip(&profile) {
                let e: f64 = row.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() - r;
                for (g, a) in grad.iter_mut().zip(row.iter()) {
                    *g += 2.0 * e * a;
                }
            }
            if grad.iter().map(|g| g * g).sum::<f64>().sqrt() < 1e-11 {
                break;
            }
            for (v, g) in p.iter_mut().zip(&grad) {
                *v -= step * g;
            }
        }
        let diff = closed.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff);
        ensure(diff <= 1e-6, || format!("trial {trial}: closed form differs by {diff:e}"))?;

        let base = fold_in_objective(&m, &profile, reg, &closed).unwrap();
        for _ in 0..100 {
            let dir: Vec<f64> = (0..f).map(|_| normal(&mut rng)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let moved: Vec<f64> = closed.iter().zip(&dir).map(|(v, d)| v + 1e-3 * d / norm).collect();
            let value = fold_in_objective(&m, &profile, reg, &moved).unwrap();
            ensure(value >= base - 1e-9, || format!("trial {trial}: perturbation lowered J by {}", base - value))?;
        }
    }
    Ok(format!("20 instances, max deviation from descent oracle {worst:.1e}"))
}

/// Slope One straight from its definition, on raw (user, item, rating) rows.
fn brute_slope_one(rows: &[(usize, u32, f64)], profile: &[(u32, f64)], target: u32) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &(i, r_i) in profile {
        if i == target {
            continue;
        }
        let mut diffs = Vec::new();
        for &(u, item, r) in rows {
            if item != target {
                continue;
            }
            if let Some(&(_, _, r_ui)) = rows.iter().find(|&&(v, it, _)| v == u && it == i) {
                diffs.push(r - r_ui);
            }
        }
        if diffs.is_empty() {
            continue;
        }
        let c = diffs.len() as f64;
        let dev = diffs.iter().sum::<f64>() / c;
        num += c * (r_i + dev);
        den += c;
    }
    let raw = if den > 0.0 {
        num / den
    } else {
        profile.iter().map(|p| p.1).sum::<f64>() / profile.len() as f64
    };
    raw.clamp(1.0, 100.0)
}

fn c5_slope_one() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = 0;
    for trial in 0..200 {
        let n_users = rng.random_range(1..=5usize);
        let n_items = rng.random_range(2..=5u32);
        let mut rows = Vec::new();
        for u in 0..n_users {
            for c in 1..=n_items {
                if rng.random_bool(0.6) {
                    rows.push((u, c, f64::from(rng.random_range(1..=100u8))));
                }
            }
        }
        // every item appears at least once so the model knows it
        for c in 1..=n_items {
            if !rows.iter().any(|r| r.1 == c) {
                rows.push((0, c, f64::from(rng.random_range(1..=100u8))));
            }
        }
        let d = Dataset::from_triples(
            rows.iter()
                .map(|&(u, c, r)| RatingTriple {
                    player_id: format!("u{u}"),
                    champion_id: c,
                    rating: r as u8,
                })
                .collect(),
        )
        .unwrap();
        let model = train_slope_one(&d);
        let size = rng.random_range(1..n_items) as usize;
        let mut items: Vec<u32> = (1..=n_items).collect();
        let mut profile = Vec::new();
        for _ in 0..size {
            let c = items.swap_remove(rng.random_range(0..items.len()));
            profile.push((c, f64::from(rng.random_range(1..=100u8))));
        }
        for &target in &items {
            let fast = predict_slope_one(&model, &profile, target).map_err(|e| e.to_string())?;
            let slow = brute_slope_one(&rows, &profile, target);
            ensure((fast - slow).abs() <= 1e-12, || {
                format!("trial {trial}, champion {target}: {fast} vs {slow}")
            })?;
            checks += 1;
        }
    }
    Ok(format!("200 instances, {checks} predictions agree"))
}

fn c6_popularity_bias() -> Outcome {
    let seed = 6;
    let records = generate_synthetic(&SynthConfig::skewed(500, 60, 6, 6, seed)).unwrap();
    let d = build_training_set(&records).unwrap();
    let svd = train(&d, &Hyperparams { seed, ..Hyperparams::paper_tuned() })
        .map_err(|e| e.to_string())?
        .0;
    let slope_one = train_slope_one(&d);
    let cohort = sample_cohort(&records, 100, seed);
    let svd_recs = cohort_recommendations(&svd, &records, &cohort, 5).map_err(|e| e.to_string())?;
    let so_recs = cohort_recommendations(&slope_one, &records, &cohort, 5).map_err(|e| e.to_string())?;
    let svd_share = popularity_share(&svd_recs, &d, 0.1);
    let so_share = popularity_share(&so_recs, &d, 0.1);
    let detail = format!("top-decile share: slope one {so_share:.3}, svd {svd_share:.3}");
    ensure(so_share >= svd_share, || detail.clone())?;
    Ok(detail)
}

fn c7_hit_rate() -> Outcome {
    let seed = 7;
    let (n_users, n_items) = (300, 40u32);
    let records = generate_synthetic(&SynthConfig::two_archetype(n_users, n_items, seed)).unwrap();
    let d = build_training_set(&records).unwrap();
    let h = Hyperparams { seed, ..Hyperparams::paper_tuned() };
    let report = hit_rate_at_k(&d, &h, 5, seed, None).map_err(|e| e.to_string())?;
    let baseline = 5.0 / f64::from(n_items - 5);
    ensure(report.rate > baseline, || {
        format!("hit rate {:.3} not above baseline {baseline:.3}", report.rate)
    })?;

    let model = train(&d, &h).map_err(|e| e.to_string())?.0;
    let query: Vec<MasteryRecord> = (1..=5u32)
        .map(|c| MasteryRecord::new("query", c, 50_000 / u64::from(c)))
        .collect();
    let list = recommend(&model, &query, 5).map_err(|e| e.to_string())?;
    let same_pool = list.champions().filter(|&c| c <= n_items / 2).count();
    ensure(same_pool >= 4, || format!("only {same_pool}/5 recommendations from the query's pool"))?;
    Ok(format!(
        "hit rate@5 {:.3} ({} trials) vs baseline {baseline:.3}; cluster recovery {same_pool}/5",
        report.rate, report.trials
    ))
}

/// (a, b, z, p) computed with scipy: Welch standard error, `norm.sf(z)`.
#[allow(clippy::type_complexity)]
const Z_ORACLE: &[(&[f64], &[f64], f64, f64)] = &[
    (&[7.9, 4.69, 5.61, 5.89, 4.89, 3.95, 6.97, 6.54, 3.07, 9.52, 7.45, 4.86, 7.35, 5.3, 5.91, 7.18, 4.11, 6.86, 8.1, 7.98, 5.55], &[7.31, 2.26, 5.18, 6.4, 2.81, 5.34, 8.95, 10.0, 7.05], 0.03324970197215135, 0.4867377317848355),
    (&[4.86, 4.49, 4.18, 7.11, 7.43, 5.31, 4.46, 6.69, 6.77, 6.1, 8.2, 6.16, 6.2, 4.64, 6.5, 8.32, 6.39, 6.41, 6.95, 6.72], &[6.56, 6.57, 6.74, 3.91, 6.1, 2.29, 6.03, 2.98, 5.36, 6.45, 4.67, 5.7, 2.22, 3.79, 6.88, 3.19, 6.8, 2.72, 3.69], 2.7920959309402535, 0.002618391397032427),
    (&[6.61, 7.4, 5.0, 6.33, 9.03, 6.12, 5.38, 7.18, 6.26, 5.55, 3.91, 7.83, 5.74, 6.6, 5.0, 8.55], &[7.0, 7.46, 5.28, 6.44, 7.28, 7.55, 6.12], -0.7074346977124388, 0.760351809630442),
    (&[6.36, 5.78, 5.45, 7.44, 6.53, 3.91, 6.67, 8.5, 6.49, 4.12, 6.71, 8.08, 7.2, 6.26, 9.67, 9.75, 6.75, 8.12], &[6.28, 7.06, 8.41, 7.14, 5.68, 4.19, 3.88, 5.45, 7.82, 6.1, 5.61, 6.01, 5.57], 1.5158186783318794, 0.06478260385146707),
    (&[5.52, 4.24, 6.56], &[3.2, 8.73, 5.18, 4.99, 2.42], 0.41855597574273473, 0.3377703348028066),
    (&[6.56, 9.18, 8.76], &[3.95, 6.32, 1.0, 4.15, 7.99, 7.08, 5.85, 5.44, 2.66, 2.78, 5.95, 9.02, 1.16, 6.76, 6.7, 7.4, 3.76, 4.44, 5.59, 3.44, 3.04, 3.73, 5.36], 3.4951847965131915, 0.00023686681692904277),
    (&[7.76, 7.92, 6.77, 6.72, 9.48, 7.72, 7.68, 9.2, 9.66, 9.71, 8.41, 7.72, 8.23], &[5.86, 8.29, 6.08, 6.78, 5.44, 8.24, 1.39], 2.402904511650616, 0.00813271702491545),
    (&[10.0, 8.67, 9.23], &[3.18, 9.8, 5.2, 5.18, 3.34, 7.26, 5.95, 4.32, 5.95, 6.87, 7.93, 5.93, 3.57, 4.39, 1.0, 4.04, 6.97, 6.43, 5.28, 4.82, 8.67, 6.06, 7.32, 6.29, 4.16, 8.61, 3.02, 3.11, 4.64], 7.130001555896448, 5.018389639918426e-13),
    (&[7.56, 7.5, 9.88, 8.48, 8.93, 6.02, 7.13, 10.0, 6.59, 10.0, 6.85, 8.85, 7.13, 8.69, 7.05, 8.02], &[8.85, 4.75, 9.57, 4.58, 3.15, 5.65, 4.68, 9.01, 7.22, 7.86, 6.76, 10.0, 7.09, 6.56, 3.84], 2.194921672068927, 0.014084608462492947),
    (&[8.98, 10.0, 10.0, 7.28], &[6.56, 5.89, 3.26, 6.52, 1.0, 6.03, 10.0, 3.46, 5.54, 1.71, 3.99, 7.01, 3.42, 5.43, 4.79], 4.710877727441342, 1.2332609608577858e-06),
];

fn c8_z_test() -> Outcome {
    for (n, &(a, b, z, p)) in Z_ORACLE.iter().enumerate() {
        let t = z_test_one_sided(a, b).map_err(|e| e.to_string())?;
        ensure((t.z - z).abs() <= 1e-6 && (t.p - p).abs() <= 1e-8, || {
            format!("pair {n}: got z {} p {}, expected z {z} p {p}", t.z, t.p)
        })?;
    }
    let tail = 1.0 - normal_cdf(2.239);
    ensure((tail - 0.01257).abs() <= 1e-4, || format!("1 - cdf(2.239) = {tail}"))?;
    Ok(format!("10 pairs match; 1 - cdf(2.239) = {tail:.5}"))
}

fn c9_grid_search() -> Outcome {
    let records = generate_synthetic(&SynthConfig::two_archetype(60, 20, 9)).unwrap();
    let d = build_training_set(&records).unwrap();
    let grid = HyperGrid {
        epochs: vec![5, 10, 20],
        regularization: vec![0.005, 0.02, 0.4],
        learning_rate: vec![0.0005, 0.005],
    };
    let base = Hyperparams {
        factors: 20,
        seed: 9,
        ..Hyperparams::paper_tuned()
    };
    let result = grid_search(&d, &grid, &base, 3, 9).map_err(|e| e.to_string())?;
    ensure(result.table.len() == 18, || format!("{} rows", result.table.len()))?;
    let (min_pos, min_row) = result
        .table
        .iter()
        .enumerate()
        .fold(None::<(usize, &champrec::evaluation::GridRow)>, |acc, (i, r)| match acc {
            Some((_, best)) if best.mean_rmse <= r.mean_rmse => acc,
            _ => Some((i, r)),
        })
        .unwrap();
    ensure(result.best_rmse == min_row.mean_rmse, || {
        format!("returned {} but table minimum is {}", result.best_rmse, min_row.mean_rmse)
    })?;
    ensure(
        result.best.epochs == min_row.epochs
            && result.best.regularization == min_row.lambda
            && result.best.learning_rate == min_row.gamma,
        || format!("returned point differs from table row {min_pos}"),
    )?;
    Ok(format!(
        "optimum epochs {} lambda {} gamma {} rmse {:.4} is row {min_pos} of 18",
        min_row.epochs, min_row.lambda, min_row.gamma, min_row.mean_rmse
    ))
}

fn c10_cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_champrec");
    let run_once = |dir: &std::path::Path| -> Result<(Vec<u8>, Vec<u8>), String> {
        let step = |args: &[&str]| -> Result<Vec<u8>, String> {
            let out = Command::new(bin)
                .args(args)
                .current_dir(dir)
                .env("SOURCE_DATE_EPOCH", "1700000000")
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), || {
                format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
            })?;
            Ok(out.stdout)
        };
        step(&["synth", "--users", "200", "--items", "40", "--seed", "10", "--out", "data.csv"])?;
        step(&["train", "--data", "data.csv", "--seed", "10", "--out", "model.bin"])?;
        let json = step(&[
            "recommend", "--model", "model.bin", "--data", "data.csv", "--player", "synth-017", "-k", "5",
            "--format", "json",
        ])?;
        let model = std::fs::read(dir.join("model.bin")).map_err(|e| e.to_string())?;
        Ok((model, json))
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (model_a, json_a) = run_once(a.path())?;
    let (model_b, json_b) = run_once(b.path())?;
    ensure(model_a == model_b, || "model files differ".into())?;
    ensure(json_a == json_b, || "recommendation JSON differs".into())?;
    ensure(!json_a.is_empty(), || "empty recommendation output".into())?;
    Ok(format!("model {} bytes and JSON {} bytes identical", model_a.len(), json_a.len()))
}

fn c11_scale() -> Outcome {
    let records = generate_synthetic(&SynthConfig::two_archetype(12_500, 140, 11)).unwrap();
    let all = build_training_set(&records).unwrap();
    ensure(all.n_rows() >= 300_000, || format!("only {} rows generated", all.n_rows()))?;
    let d = Dataset::from_triples(all.triples()[..300_000].to_vec()).unwrap();
    let h = Hyperparams {
        seed: 11,
        ..Hyperparams::paper_tuned()
    };
    let start = Instant::now();
    let (_, trace) = train(&d, &h).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!(
        "{} rows, {} users, {} champions, f 100, 20 epochs in {:.1}s (J {:.3e} -> {:.3e})",
        d.n_rows(),
        d.n_users(),
        d.n_items(),
        took.as_secs_f64(),
        trace.objective[0],
        trace.objective[19]
    ))
}

#[test]
fn acceptance() {
    let criteria: [(usize, &str, Duration, fn() -> Outcome); 11] = [
        (1, "normalization exactness", Duration::from_millis(1), c1_normalization),
        (2, "gradient correctness", Duration::from_secs(1), c2_gradient),
        (3, "training descent (default preset)", Duration::from_secs(5), c3_descent),
        (4, "fold-in optimality", Duration::from_secs(1), c4_fold_in),
        (5, "slope one oracle equivalence", Duration::from_secs(5), c5_slope_one),
        (6, "popularity bias", Duration::from_secs(60), c6_popularity_bias),
        (7, "hit rate and cluster recovery", Duration::from_secs(60), c7_hit_rate),
        (8, "z-test correctness", Duration::from_secs(1), c8_z_test),
        (9, "grid search exhaustiveness", Duration::from_secs(120), c9_grid_search),
        (10, "end-to-end determinism", Duration::from_secs(30), c10_cli_determinism),
        (11, "desk-scale training time", Duration::from_secs(300), c11_scale),
    ];
    let mut unexpected = Vec::new();
    let mut seen_fail = HashSet::new();
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; took {took:?}, budget {budget:?}")),
            other => other,
        };
        let line = match &outcome {
            Ok(detail) => format!("PASS {n:>2}. {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                seen_fail.insert(n);
                if !KNOWN_UNATTAINABLE.contains(&n) {
                    unexpected.push(n);
                }
                format!("FAIL {n:>2}. {name}: {why} [{took:.2?}]")
            }
        };
        println!("{line}");
    }
    let passed = 11 - seen_fail.len();
    println!("{passed}/11 criteria pass");
    for n in KNOWN_UNATTAINABLE {
        if !seen_fail.contains(n) {
            println!("note: criterion {n} is listed as unattainable but passed");
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
