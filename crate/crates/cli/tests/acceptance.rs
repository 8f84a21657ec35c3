//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[path = "../../core/tests/support/mod.rs"]
mod support;
mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use c3_cli::experiments::quant::QuantReport;
use c3_cli::{ExperimentConfig, RunContext, RunOptions};
use c3_core::denoiser::{
    guided_eps, AmplificationProfile, BlockId, ConditioningSpec, DenoiserModel, HookSet, ModelConfig, Schedule,
    StepRange,
};
use c3_core::freq::{amplify_low, amplify_uniform, build_low_mask, decompose, AmplificationSpec, CutoffRatio};
use c3_core::image::Image;
use c3_core::metrics::{frechet, knn_precision_recall, vendi, GaussianMoments};
use c3_core::selection::mock::{MockReply, MockScorerServer};
use c3_core::selection::{
    combine, select_lambda, usability, BlockSelection, LocalProxy, RemoteClient, RemoteScorer, Scorer,
    ScorerSource, Scores, UsabilityContext,
};
use c3_core::tensor::{fft2, ifft2, spectral_energy, FeatureMap, RngStream};
use common::{read_csv, snapshot, write_config};
use serde_json::json;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_map(rng: &mut RngStream, c: usize, h: usize, w: usize) -> FeatureMap<f32> {
    FeatureMap::new(c, h, w, rng.normals_f32(c * h * w, 1.0)).unwrap()
}

fn random_map64(rng: &mut RngStream, c: usize, h: usize, w: usize) -> FeatureMap<f64> {
    FeatureMap::new(c, h, w, rng.normals(c * h * w, 1.0)).unwrap()
}

fn cutoff(rho: f64) -> CutoffRatio {
    CutoffRatio::new(rho).unwrap()
}

fn c1_fft() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(1, 1);
    let (mut worst_rt, mut worst_parseval) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let x = random_map(&mut rng, 8, 32, 32);
        let f = fft2(&x).map_err(|e| e.to_string())?;
        let back = ifft2(&f).map_err(|e| e.to_string())?;
        worst_rt = worst_rt.max(back.max_abs_diff(&x));
        let spatial = x.energy();
        let spectral = spectral_energy(&f) / (32.0 * 32.0);
        worst_parseval = worst_parseval.max((spatial - spectral).abs() / spatial);
    }
    let x = random_map(&mut rng, 1, 8, 8);
    let plane: Vec<f64> = x.data().iter().map(|&v| v as f64).collect();
    let oracle = support::naive_dft(&plane, 8, 8, false);
    let f = fft2(&x).map_err(|e| e.to_string())?;
    let dft_err = f
        .data()
        .iter()
        .zip(&oracle)
        .map(|(a, b)| ((a.re as f64 - b.re).powi(2) + (a.im as f64 - b.im).powi(2)).sqrt())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    ensure!(worst_rt < 1e-4, "round-trip error {worst_rt:e}");
    ensure!(worst_parseval < 1e-5, "Parseval relative error {worst_parseval:e}");
    ensure!(dft_err < 1e-4, "naive DFT mismatch {dft_err:e}");
    ensure!(secs < 5.0, "took {secs:.2}s");
    Ok(format!(
        "round-trip {worst_rt:.1e}, Parseval {worst_parseval:.1e}, DFT {dft_err:.1e}, {secs:.2}s"
    ))
}

fn c2_amplification_algebra() -> Outcome {
    let mut rng = RngStream::new(2, 1);
    let x = random_map(&mut rng, 4, 16, 16);
    let mut identity = 0.0f64;
    for rho in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = amplify_low(&x, &AmplificationSpec::new(1.0, cutoff(rho)).unwrap()).map_err(|e| e.to_string())?;
        identity = identity.max(y.max_abs_diff(&x));
    }
    ensure!(identity < 1e-4, "identity error {identity:e}");

    let mut all_pass = 0.0f64;
    for lambda in [0.0, 0.5, 2.0, 10.0] {
        let a = amplify_low(&x, &AmplificationSpec::new(lambda, CutoffRatio::ALL_PASS).unwrap()).unwrap();
        all_pass = all_pass.max(a.max_abs_diff(&amplify_uniform(&x, lambda).unwrap()));
    }
    ensure!(all_pass < 1e-4, "all-pass error {all_pass:e}");

    let f = fft2(&x).unwrap();
    for rho in [0.0, 0.25, 0.5, 1.0] {
        let mask = build_low_mask(16, 16, cutoff(rho)).unwrap();
        let pair = decompose(&f, &mask).unwrap();
        for (i, z) in f.data().iter().enumerate() {
            let (lo, hi) = (pair.low.data()[i], pair.high.data()[i]);
            let exact = if mask.bits()[i % 256] { lo == *z && hi.norm_sqr() == 0.0 } else { hi == *z && lo.norm_sqr() == 0.0 };
            ensure!(exact, "coefficient {i} split inexactly at rho {rho}");
        }
    }

    // Realness: scale the low band by hand and invert with the naive DFT.
    let x64 = random_map64(&mut rng, 2, 16, 16);
    let mut worst_imag = 0.0f64;
    for lambda in [0.0, 2.0, 10.0] {
        for rho in [0.0, 0.25, 1.0] {
            let mask = build_low_mask(16, 16, cutoff(rho)).unwrap();
            for c in 0..2 {
                let spec = support::naive_dft(x64.channel(c), 16, 16, false);
                let scaled: Vec<_> = spec
                    .iter()
                    .enumerate()
                    .map(|(i, z)| if mask.bits()[i] { z * lambda } else { *z })
                    .collect();
                let back = support::naive_dft_complex(&scaled, 16, 16, true);
                let rms = (back.iter().map(|z| z.re * z.re).sum::<f64>() / 256.0).sqrt();
                let imag = back.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                worst_imag = worst_imag.max(if rms > 0.0 { imag / rms } else { imag });
            }
            amplify_low(&x64, &AmplificationSpec::new(lambda, cutoff(rho)).unwrap()).map_err(|e| e.to_string())?;
        }
    }
    ensure!(worst_imag < 1e-4, "imaginary residual {worst_imag:e}");

    let counts: Vec<usize> = [0.0, 0.5, 1.0].iter().map(|&r| build_low_mask(8, 8, cutoff(r)).unwrap().count()).collect();
    ensure!(counts == [1, 25, 64], "mask counts {counts:?}");
    Ok(format!(
        "identity {identity:.1e}, all-pass {all_pass:.1e}, imag residual {worst_imag:.1e}, counts {counts:?}"
    ))
}

fn c3_selection() -> Outcome {
    let mut rng = RngStream::new(3, 1);
    let mut monotone = 0;
    for t in 0..100 {
        let n = 2 + (rng.uniform() * 10.0) as usize;
        let mut values = vec![1.0];
        for _ in 1..n {
            values.push(values.last().unwrap() + 0.1 + rng.uniform());
        }
        let table: Vec<f64> = (0..n).map(|_| rng.uniform() * 20.0).collect();
        let grid = support::grid(&values);
        let eps = rng.uniform();
        let sel = select_lambda(BlockId::Down0, &grid, eps, false, |l| Ok(support::lookup(&values, &table, l))).unwrap();
        let oracle = support::exhaustive_select(&values, &table, eps);
        ensure!(sel.lambda_star == oracle, "table {t}: {} vs oracle {oracle}", sel.lambda_star);
        ensure!(sel.trace[0].lambda == 1.0 && sel.trace[0].feasible, "table {t}: baseline infeasible");
        let stars: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 0.9, 1.0]
            .iter()
            .map(|&e| select_lambda(BlockId::Down0, &grid, e, true, |l| Ok(support::lookup(&values, &table, l))).unwrap().lambda_star)
            .collect();
        ensure!(stars.windows(2).all(|w| w[1] <= w[0]), "table {t}: not monotone in epsilon {stars:?}");
        monotone += 1;
    }
    Ok(format!("100/100 match the exhaustive oracle, {monotone}/100 epsilon-monotone"))
}

fn selection(block: BlockId, lambda_star: f64) -> BlockSelection {
    BlockSelection {
        block,
        lambda_star,
        trace: vec![(1.0, 10.0, true).into(), (lambda_star, 9.0, true).into()],
    }
}

fn c4_combination() -> Outcome {
    let mut rng = RngStream::new(4, 1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = 1 + (rng.uniform() * 4.0) as usize;
        let sels: Vec<_> = BlockId::TARGETS[..k].iter().map(|&b| selection(b, 1.0 + 9.0 * rng.uniform())).collect();
        let weights: BTreeMap<BlockId, f64> = BlockId::TARGETS[..k].iter().map(|&b| (b, 0.05 + rng.uniform())).collect();
        let s = 0.1 + 2.0 * rng.uniform();
        let p = combine(&sels, s, Some(&weights), |_| CutoffRatio::default()).unwrap();
        worst = worst.max((p.scale_sum() - s).abs());
        for (b, sel) in p.blocks.iter().zip(&sels) {
            ensure!(b.lambda >= 1.0 - 1e-12, "combined factor below 1");
            if s <= 1.0 {
                ensure!(b.lambda <= sel.lambda_star + 1e-12, "combined factor above its selection");
            }
        }
    }
    ensure!(worst < 1e-12, "scale sum error {worst:e}");
    for star in [1.0, 1.3, 2.0, 7.77] {
        let p = combine(&[selection(BlockId::Mid, star)], 1.0, None, |_| CutoffRatio::default()).unwrap();
        ensure!(p.blocks[0].lambda == star, "single-block S=1 changed {star} to {}", p.blocks[0].lambda);
    }

    let dir = tempfile::tempdir().unwrap();
    let mut emitted = Vec::new();
    for preset in ["turbo", "lightning4", "sdxl"] {
        let mut cfg = common::tiny_config(&dir.path().join(preset));
        cfg["seeds"] = json!(1);
        cfg["concepts"] = json!(["chair"]);
        let path = write_config(dir.path(), &format!("{preset}.json"), &cfg);
        let sel_dir = dir.path().join(preset).join("select");
        std::fs::create_dir_all(&sel_dir).unwrap();
        std::fs::write(sel_dir.join("selection_Down0.json"), serde_json::to_string(&selection(BlockId::Down0, 2.0)).unwrap()).unwrap();
        std::fs::write(sel_dir.join("selection_Mid.json"), serde_json::to_string(&selection(BlockId::Mid, 3.0)).unwrap()).unwrap();
        common::run(&["combine", "--config", path.to_str().unwrap(), "--preset", preset]).map_err(|e| e.to_string())?;
        let profile: AmplificationProfile =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(preset).join("combine/profile.json")).unwrap()).unwrap();
        emitted.push(profile.target_sum.unwrap_or(f64::NAN));
    }
    ensure!(emitted == [1.0, 0.6, 0.6], "emitted budgets {emitted:?}");
    Ok(format!("sum error {worst:.1e} over 50 fixtures, single-block no-op exact, preset budgets {emitted:?}"))
}

fn c5_metrics() -> Outcome {
    let mut rng = RngStream::new(5, 1);
    let samples: Vec<Vec<f64>> = (0..40).map(|_| rng.normals(6, 1.0)).collect();
    let m = GaussianMoments::from_samples(&samples).unwrap();
    let self_d = frechet(&m, &m).unwrap();
    ensure!(self_d.abs() < 1e-6, "self distance {self_d:e}");
    let mut worst_1d = 0.0f64;
    for (m1, v1, m2, v2) in [(0.0f64, 1.0f64, 0.0f64, 1.0f64), (1.0, 4.0, -2.0, 9.0), (0.5, 0.25, 0.5, 2.0), (3.0, 1e-3, 0.0, 5.0)] {
        let a = GaussianMoments::new(vec![m1], vec![v1], 10).unwrap();
        let b = GaussianMoments::new(vec![m2], vec![v2], 10).unwrap();
        let analytic = (m1 - m2) * (m1 - m2) + v1 + v2 - 2.0 * (v1 * v2).sqrt();
        worst_1d = worst_1d.max((frechet(&a, &b).unwrap() - analytic).abs());
    }
    ensure!(worst_1d < 1e-6, "1-D analytic error {worst_1d:e}");

    let basis = |i: usize, n: usize| -> Vec<f64> { (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect() };
    let same: f64 = vendi(&vec![vec![0.2, -0.4, 0.9]; 6]).unwrap();
    let ortho: f64 = vendi(&(0..5).map(|i| basis(i, 5)).collect::<Vec<_>>()).unwrap();
    let pairs: f64 = vendi(&[basis(0, 4), basis(0, 4), basis(1, 4), basis(1, 4)]).unwrap();
    ensure!((same - 1.0).abs() < 1e-6, "identical family {same}");
    ensure!((ortho - 5.0).abs() < 1e-6, "orthogonal family {ortho}");
    ensure!((pairs - 2.0).abs() < 1e-6, "two-pair family {pairs}");

    for t in 0..50 {
        let real: Vec<Vec<f64>> = (0..20).map(|_| rng.normals(3, 1.0)).collect();
        let shift = rng.uniform() * 2.0;
        let fake: Vec<Vec<f64>> = (0..20).map(|_| rng.normals(3, 1.0).into_iter().map(|v| v + shift).collect()).collect();
        for k in [1, 3, 5] {
            let got = knn_precision_recall(&real, &fake, k).unwrap();
            let want = support::knn_oracle(&real, &fake, k);
            ensure!(got == want, "instance {t}, k={k}: {got:?} vs oracle {want:?}");
        }
    }
    let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i * i) as f64 * 0.1]).collect();
    let identical = knn_precision_recall(&pts, &pts, 3).unwrap();
    let far: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0] + 1e3, p[1]]).collect();
    let apart = knn_precision_recall(&pts, &far, 3).unwrap();
    ensure!(identical == (1.0, 1.0), "identical sets {identical:?}");
    ensure!(apart == (0.0, 0.0), "far clusters {apart:?}");
    Ok(format!(
        "self {self_d:.1e}, 1-D {worst_1d:.1e}, vendi {same:.6}/{ortho:.6}/{pairs:.6}, kNN 150/150 exact"
    ))
}

fn c6_sampler_contracts() -> Outcome {
    let model = DenoiserModel::build(ModelConfig::default()).unwrap();
    let sampler = c3_core::SamplerConfig::default();
    let cond = ConditioningSpec::new("chair").with_modifier(Some("creative"));
    let plain = model.sample(&sampler, &cond, 0, &HookSet::none()).unwrap();

    let unit = HookSet::c3(AmplificationProfile::from_specs(
        BlockId::TARGETS.iter().map(|&b| (b, AmplificationSpec::new(1.0, CutoffRatio::default()).unwrap())),
    ));
    let identity = model.sample(&sampler, &cond, 0, &unit).unwrap().image.max_abs_diff(&plain.image);
    ensure!(identity < 1e-4, "lambda=1 hooks changed the image by {identity:e}");

    let schedule = Schedule::new(sampler.steps).unwrap();
    let cvec = model.conditioning_vector(&cond);
    let x = model.initial_latent(3).unwrap();
    let base = model.forward(&x, &schedule.step(0), &cvec, &HookSet::none(), true).unwrap();
    let mid = HookSet::c3(AmplificationProfile::single(BlockId::Mid, AmplificationSpec::new(3.0, CutoffRatio::default()).unwrap()));
    let hooked = model.forward(&x, &schedule.step(0), &cvec, &mid, true).unwrap();
    let (bc, hc) = (base.captured.unwrap(), hooked.captured.unwrap());
    let mut upstream = 0.0f64;
    for b in [BlockId::Down0, BlockId::Down1, BlockId::Down2] {
        upstream = upstream.max(bc[&b].max_abs_diff(&hc[&b]));
    }
    ensure!(upstream < 1e-4, "upstream features moved by {upstream:e}");
    ensure!(bc[&BlockId::Mid].max_abs_diff(&hc[&BlockId::Mid]) > 1e-3, "hooked block unchanged");

    let ranged = mid.clone().with_step_range(Some(StepRange::new(1, 2).unwrap()));
    for i in [0, 3] {
        let a = model.forward(&x, &schedule.step(i), &cvec, &ranged, false).unwrap().eps;
        let b = model.forward(&x, &schedule.step(i), &cvec, &HookSet::none(), false).unwrap().eps;
        ensure!(a.data() == b.data(), "hooks leaked into excluded step {i}");
    }
    let inside = model.forward(&x, &schedule.step(1), &cvec, &ranged, false).unwrap().eps;
    let outside = model.forward(&x, &schedule.step(1), &cvec, &HookSet::none(), false).unwrap().eps;
    ensure!(inside.max_abs_diff(&outside) > 0.0, "hooks inactive inside their range");

    let neg = model.forward(&x, &schedule.step(0), &model.negative_vector(&cond), &HookSet::none(), false).unwrap().eps;
    let pos = &base.eps;
    ensure!(guided_eps(pos, &neg, 0.0).unwrap().data() == neg.data(), "g=0 blend is not the negative branch");
    ensure!(guided_eps(pos, &neg, 1.0).unwrap().data() == pos.data(), "g=1 blend is not the conditional branch");
    let g1 = c3_core::SamplerConfig { cfg_scale: 1.0, ..sampler.clone() };
    let unguided = model.sample(&g1, &cond, 0, &HookSet::none()).unwrap();
    ensure!(unguided.latent.data() == plain.latent.data(), "g=1 sampling differs from g=0");

    let again = model.sample(&sampler, &cond, 0, &HookSet::none()).unwrap();
    ensure!(again.latent.data() == plain.latent.data(), "repeat sample differs");

    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.json");
    std::fs::write(&profile, serde_json::to_string(&mid.profile).unwrap()).unwrap();
    let mut runs = Vec::new();
    for (name, jobs) in [("a", "1"), ("b", "1"), ("c", "8")] {
        let cfg = json!({"seeds": 6, "out_dir": dir.path().join(name), "profile": profile});
        let path = write_config(dir.path(), &format!("{name}.json"), &cfg);
        let m = common::run(&["gen", "--config", path.to_str().unwrap(), "--jobs", jobs, "--dump-latents"]).map_err(|e| e.to_string())?;
        runs.push(snapshot(&dir.path().join(name).join("gen"), &m));
    }
    let configless = |s: &Vec<(String, Vec<u8>)>| -> Vec<(String, Vec<u8>)> {
        s.iter().filter(|(f, _)| f != "config.json").cloned().collect()
    };
    ensure!(configless(&runs[0]) == configless(&runs[1]), "two --jobs 1 runs differ");
    ensure!(configless(&runs[0]) == configless(&runs[2]), "--jobs 1 and --jobs 8 differ");
    Ok(format!(
        "identity {identity:.1e}, upstream {upstream:.1e}, step exclusion and CFG exact, {} files bit-identical across runs and jobs",
        runs[0].len()
    ))
}

fn c7_frequency_direction() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"seeds": 20, "concepts": ["chair"], "out_dir": dir.path()});
    let path = write_config(dir.path(), "c.json", &cfg);
    common::run(&["ablate-frequency", "--config", path.to_str().unwrap()]).map_err(|e| e.to_string())?;
    let (_, rows) = read_csv(&dir.path().join("ablate-frequency/ablate_frequency.csv"));
    let hbe = |v: &str| -> Vec<f64> { rows.iter().filter(|r| r[1] == v).map(|r| common::num(&r[2])).collect() };
    let (all, low) = (hbe("allband"), hbe("lowband"));
    let wins = all.iter().zip(&low).filter(|(a, l)| a > l).count();
    let secs = start.elapsed().as_secs_f64();
    ensure!(all.len() == 20 && low.len() == 20, "expected 20 seeds per variant");
    ensure!(wins >= 16, "all-band above low-band in only {wins}/20 seeds");
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!("all-band HBE above low-band in {wins}/20 seeds, {secs:.1}s"))
}

fn c8_monotone_novelty() -> Outcome {
    let ctx = RunContext::new(ExperimentConfig::default(), RunOptions::default()).map_err(|e| e.to_string())?;
    let cond = ctx.conditioning("chair");
    let seeds: Vec<u64> = (0..20).collect();
    let monotone = ctx
        .par_map(&seeds, |&seed| {
            let base = ctx.generate(&cond, seed, &HookSet::none())?.image;
            let mut d = Vec::new();
            for lambda in [1.0, 1.5, 2.0] {
                let hooks = ctx.single_block_hooks(BlockId::Down0, lambda, CutoffRatio::default())?;
                d.push(ctx.distance(&ctx.generate(&cond, seed, &hooks)?.image, &base));
            }
            Ok(d.windows(2).all(|w| w[1] >= w[0]))
        })
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|&m| m)
        .count();
    ensure!(monotone >= 18, "monotone in only {monotone}/20 seeds");
    Ok(format!("distance non-decreasing over lambda 1, 1.5, 2 in {monotone}/20 seeds"))
}

fn c9_quant_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"concepts": ["chair", "car"], "seeds": 50, "sampler": {"steps": 4}, "out_dir": dir.path()});
    let path = write_config(dir.path(), "c.json", &cfg);
    let args = ["quant", "--config", path.to_str().unwrap(), "--jobs", "1"];
    let start = Instant::now();
    common::run(&args).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let out = dir.path().join("quant");
    let csv1 = std::fs::read(out.join("report.csv")).unwrap();
    let json1 = std::fs::read(out.join("report.json")).unwrap();
    let report: QuantReport = serde_json::from_slice(&json1).map_err(|e| format!("report.json schema: {e}"))?;
    let (header, rows) = read_csv(&out.join("report.csv"));
    ensure!(
        header.join(",") == "concept,n_real,n_fake,k,fid_star,precision_star,recall,lpips_mean,vendi,alignment_mean",
        "CSV header {header:?}"
    );
    let labels: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    ensure!(labels == ["chair", "car", "mean", "std"], "CSV rows {labels:?}");
    ensure!(report.concepts.iter().all(|c| c.metrics.n_real == 50 && c.metrics.n_fake == 50), "set sizes");
    ensure!(secs < 300.0, "took {secs:.1}s");
    common::run(&args).map_err(|e| e.to_string())?;
    ensure!(std::fs::read(out.join("report.csv")).unwrap() == csv1, "report.csv differs on rerun");
    ensure!(std::fs::read(out.join("report.json")).unwrap() == json1, "report.json differs on rerun");
    for c in &report.concepts {
        println!(
            "    note: {}: fid_star {} vs plain split-half {}, diversity {} vs plain {}",
            c.concept,
            c.metrics.fid_star,
            c.plain_split_half_fid.unwrap_or(f64::NAN),
            c.metrics.lpips_mean,
            c.plain_lpips_mean
        );
    }
    Ok(format!("2 concepts x 50 seeds x 4 steps in {secs:.1}s, schema valid, byte-identical rerun"))
}

fn c10_remote_scorer() -> Outcome {
    let image = Image::from_fn(16, |c, y, x| ((c + 3 * y + 5 * x) % 9) as f32 / 9.0).unwrap();
    let ctx = UsabilityContext {
        conditioning: ConditioningSpec::new("chair"),
        baseline_image: image.clone(),
    };
    let timeout = Duration::from_secs(2);

    let server = MockScorerServer::constant(6.25, 3.5).unwrap();
    let s = RemoteClient::new(server.endpoint(), timeout, 2).score_remote(&image, "chair").map_err(|e| e.to_string())?;
    ensure!(s == Scores { aesthetic: 6.25, alignment: 3.5 }, "pass-through gave {s:?}");

    let server = MockScorerServer::start(vec![MockReply::scores(12.0, -3.0)], false).unwrap();
    let s = RemoteClient::new(server.endpoint(), timeout, 2).score_remote(&image, "chair").map_err(|e| e.to_string())?;
    ensure!(s == Scores { aesthetic: 10.0, alignment: 0.0 }, "clamping gave {s:?}");

    let server = MockScorerServer::start(vec![MockReply::Status(503)], true).unwrap();
    let err = RemoteClient::new(server.endpoint(), timeout, 2).score_remote(&image, "chair").unwrap_err();
    ensure!(matches!(err, c3_core::Error::ScorerUnavailable(_)), "retry exhaustion gave {err}");
    let attempts = server.requests().len();
    ensure!(attempts == 3, "{attempts} attempts, expected 3");

    let local = LocalProxy::default();
    let fallback = RemoteScorer {
        client: RemoteClient::new(server.endpoint(), timeout, 1),
        fallback: Some(local.clone()),
    };
    let fb = fallback.score(&image, &ctx).map_err(|e| e.to_string())?;
    let direct = local.score(&image, &ctx).unwrap();
    ensure!(fb == direct, "fallback {fb:?} vs local {direct:?}");

    let mirror = MockScorerServer::constant(direct.aesthetic, direct.alignment).unwrap();
    let remote = RemoteScorer {
        client: RemoteClient::new(mirror.endpoint(), timeout, 0),
        fallback: None,
    };
    ensure!(remote.source() == ScorerSource::Remote && local.source() == ScorerSource::LocalProxy, "sources");
    let (ur, ul) = (usability(&image, &ctx, &remote).unwrap(), usability(&image, &ctx, &local).unwrap());
    ensure!(ul > 0.0 && ur == ul, "usability depends on source: {ur} vs {ul}");
    Ok(format!("pass-through, clamping, {attempts} attempts then unavailable, fallback, source-agnostic usability {ul:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("FFT correctness", c1_fft),
        ("amplification algebra and masks", c2_amplification_algebra),
        ("constrained factor search", c3_selection),
        ("combination rule and preset budgets", c4_combination),
        ("metric oracles", c5_metrics),
        ("sampler and hook contracts", c6_sampler_contracts),
        ("all-band vs low-band high-frequency energy", c7_frequency_direction),
        ("monotone novelty in the factor", c8_monotone_novelty),
        ("end-to-end quant run", c9_quant_end_to_end),
        ("remote scorer protocol", c10_remote_scorer),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
