//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Pass substrings as arguments to run only the matching criteria, e.g.
//! `cargo test -p noisy-ea --test acceptance -- hurdle`.

use std::process::ExitCode;
use std::time::Instant;

use noisy_ea::bounds::{clone_noise_probability, inequality_chain, mixing_bound, noisy_restart_bound, restart_bound};
use noisy_ea::harness::{self, powers_of_two, CellSummary, ExperimentConfig};
use noisy_ea::mutation::MutationOperator;
use noisy_ea::oracle::{self, AbsorbedChain};
use noisy_ea::{AlgorithmConfig, BitString, NoiseModel, ProblemInstance, RandomSource, StoppingRule};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sweep(
    instance: ProblemInstance,
    algorithm: AlgorithmConfig,
    noise: &[NoiseModel],
    runs: usize,
    cap: u64,
    seed: u64,
) -> Vec<CellSummary> {
    let cells = noise
        .iter()
        .map(|&m| harness::Cell {
            param: m.p(),
            lambda: algorithm.lambda(),
            noise: m,
        })
        .collect();
    let mut cfg = ExperimentConfig::new(
        instance,
        algorithm,
        cells,
        runs,
        StoppingRule::new(cap).unwrap(),
        seed,
    );
    cfg.budget = u128::MAX;
    harness::run_sweep(&cfg).expect("valid sweep")
}

fn one_bit(p: f64) -> NoiseModel {
    NoiseModel::one_bit(p).unwrap()
}

fn lo(n: usize) -> ProblemInstance {
    ProblemInstance::leading_ones(n).unwrap()
}

fn oracle_matches_simulation() -> Verdict {
    let runs = 100_000;
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [4, 5, 6] {
        let noise: Vec<NoiseModel> = [0.0, 0.1, 0.3].map(one_bit).to_vec();
        let sims = sweep(lo(n), AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap(), &noise, runs, 1 << 40, 11);
        for (m, s) in noise.iter().zip(&sims) {
            let exact = oracle::expected_optimisation_time(&lo(n), &AlgorithmConfig::ea(1, *m).unwrap())
                .unwrap()
                .expected_time_uniform_start;
            let se = s.std_generations / (runs as f64).sqrt();
            let z = (s.mean_generations - exact) / se;
            ok &= z.abs() <= 3.0 && s.success_rate == 1.0;
            lines.push(format!("n={n} p={}: {:.3} vs {exact:.3} (z={z:+.2})", m.p(), s.mean_generations));
        }
    }
    check(ok, lines.join("; "))
}

fn monotone_transitions() -> Verdict {
    let mut total = 0;
    let mut checked = 0;
    for n in [3, 4, 5] {
        let mut models: Vec<NoiseModel> = [0.1, 0.3, 0.5].map(one_bit).to_vec();
        models.push(NoiseModel::bit_wise(1.0, n as f64 / 2.0, n).unwrap());
        for m in models {
            let matrix = oracle::build_transition_matrix(&lo(n), &AlgorithmConfig::ea(1, m).unwrap()).unwrap();
            total += oracle::check_monotonicity(&matrix, &lo(n)).unwrap().len();
            checked += 1;
        }
    }
    check(total == 0, format!("{total} violations over {checked} chains"))
}

fn stationary_optimum_mass() -> Verdict {
    let mut ok = true;
    let mut lines = Vec::new();
    for n in [3, 4, 5] {
        for p in [0.1, 0.5] {
            let m = one_bit(p);
            let matrix = oracle::build_transition_matrix(&lo(n), &AlgorithmConfig::ea(1, m).unwrap()).unwrap();
            let pi = oracle::stationary_distribution(&matrix, &m).unwrap();
            let opt = pi[pi.len() - 1];
            let max = pi.iter().copied().fold(0.0, f64::max);
            ok &= opt >= 0.5f64.powi(n as i32) && opt >= max;
            lines.push(format!("n={n} p={p}: {opt:.4}"));
        }
    }
    check(ok, lines.join("; "))
}

fn leadingones_threshold(n: usize, cap: u64, efficient_log2: i32, hopeless_log2: i32, runs: usize) -> Verdict {
    let noise = [0.0, 2f64.powi(efficient_log2), 2f64.powi(hopeless_log2)].map(one_bit);
    let s = sweep(lo(n), AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap(), &noise, runs, cap, 21);
    let ratio = s[1].mean_generations / s[0].mean_generations;
    check(
        (1.0 / 1.5..=1.5).contains(&ratio) && s[2].success_rate <= 0.05,
        format!(
            "mean p=0 {:.0}, p=2^{efficient_log2} {:.0} (ratio {ratio:.3}); success at p=2^{hopeless_log2}: {:.3}",
            s[0].mean_generations, s[1].mean_generations, s[2].success_rate
        ),
    )
}

fn threshold_full_scale() -> Verdict {
    leadingones_threshold(100, 100_000, -15, -6, 200)
}

fn threshold_scaled() -> Verdict {
    // p n^2 kept fixed when halving n: exponents shift by +2
    leadingones_threshold(50, 25_000, -13, -4, 200)
}

fn offspring_shift_threshold() -> Verdict {
    let a = sweep(lo(100), AlgorithmConfig::ea(8, NoiseModel::NoNoise).unwrap(), &[one_bit(0.25)], 100, 100_000, 31);
    let b = sweep(lo(100), AlgorithmConfig::ea(16, NoiseModel::NoNoise).unwrap(), &[one_bit(0.5)], 100, 100_000, 32);
    check(
        a[0].success_rate >= 0.9 && b[0].success_rate >= 0.9,
        format!(
            "(1+8) at p=1/4: {:.2} success, mean {:.0}; (1+16) at p=1/2: {:.2} success, mean {:.0}",
            a[0].success_rate, a[0].mean_generations, b[0].success_rate, b[0].mean_generations
        ),
    )
}

fn best_fitness_plateaus() -> Verdict {
    let noise = [one_bit(0.5), NoiseModel::bit_wise(1.0, 1.0, 100).unwrap()];
    let s = sweep(lo(100), AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap(), &noise, 500, 100_000, 41);
    let baseline = harness::uniform_sampling_statistics(&lo(100), 100_000, 1000, 42, None).unwrap();
    let within = |v: f64, target: f64, tol: f64| (v - target).abs() <= tol * target;
    check(
        within(s[0].mean_best_fitness, 30.414, 0.10)
            && within(s[1].mean_best_fitness, 25.781, 0.10)
            && within(baseline.mean(), 16.926, 0.05),
        format!(
            "one-bit p=1/2: {:.3}; bit-wise q=1: {:.3}; uniform sampling: {:.3}",
            s[0].mean_best_fitness,
            s[1].mean_best_fitness,
            baseline.mean()
        ),
    )
}

fn noise_helps_on_hurdle() -> Verdict {
    let p = [one_bit(2f64.powi(-8))];
    let rls = sweep(
        ProblemInstance::hurdle(100, 14).unwrap(),
        AlgorithmConfig::rls(1, NoiseModel::NoNoise).unwrap(),
        &p,
        200,
        1_000_000,
        51,
    );
    let ea = sweep(
        ProblemInstance::hurdle(100, 6).unwrap(),
        AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap(),
        &p,
        200,
        1_000_000,
        52,
    );
    check(
        rls[0].success_rate >= 0.95 && ea[0].success_rate <= 0.01,
        format!(
            "RLS w=14: {:.3} success (mean {:.0}); EA w=6: {:.3} success",
            rls[0].success_rate, rls[0].mean_generations, ea[0].success_rate
        ),
    )
}

fn offspring_harm_on_hurdle() -> Verdict {
    let noise: Vec<NoiseModel> = powers_of_two(-10, -4).into_iter().map(one_bit).collect();
    let s = sweep(
        ProblemInstance::hurdle(100, 14).unwrap(),
        AlgorithmConfig::rls(8, NoiseModel::NoNoise).unwrap(),
        &noise,
        40,
        1_000_000,
        61,
    );
    let worst = s.iter().map(|c| c.success_rate).fold(0.0, f64::max);
    check(
        worst <= 0.05,
        format!(
            "success per cell: [{}]",
            s.iter().map(|c| format!("{:.3}", c.success_rate)).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn bounds_suite() -> Verdict {
    let mut chain_points = 0u64;
    let mut chain_ok = true;
    let ps: Vec<f64> = std::iter::once(0.0)
        .chain((0..=60).map(|k| 10f64.powf(-6.0 + k as f64 / 10.0)))
        .collect();
    for &p in &ps {
        for ell in 1..=10_000 {
            chain_ok &= inequality_chain(p.min(1.0), ell).unwrap().holds;
            chain_points += 1;
        }
    }

    let mut restart_ok = true;
    for pi in 0..=99 {
        for m in 1..=10_000 {
            let (a, b) = restart_bound(m as f64, pi as f64 / 100.0).unwrap();
            restart_ok &= a.ln <= b.ln;
        }
    }

    // clone experiment: parent and each offspring equal to it are perturbed
    let (p, n, lambda, trials) = (0.5, 100usize, 10, 10_000_000u64);
    let noise = one_bit(p);
    let mutation = MutationOperator::StandardBit.prepare(n);
    let mut rng = RandomSource::new(71);
    let parent = BitString::random(n, &mut rng);
    let mut child = parent.clone();
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut perturbed = parent.clone();
        noise.apply(&mut perturbed, &mut rng);
        let mut all = perturbed != parent;
        for _ in 0..lambda {
            if !all {
                break;
            }
            child.clone_from(&parent);
            mutation.apply(&mut child, &mut rng);
            if child == parent {
                let mut c = child.clone();
                noise.apply(&mut c, &mut rng);
                all = c != child;
            }
        }
        hits += all as u64;
    }
    let formula = clone_noise_probability(p, n as u64, lambda as u64).unwrap();
    let est = hits as f64 / trials as f64;
    let z_clone = (est - formula) / (formula * (1.0 - formula) / trials as f64).sqrt();

    // single bit under repeated standard mutation, started at 1
    let (n, t, chains) = (10usize, 20u64, 1_000_000u64);
    let mutation = MutationOperator::StandardBit.prepare(n);
    let mut ones = 0u64;
    for _ in 0..chains {
        let mut x = BitString::ones(n);
        for _ in 0..t {
            mutation.apply(&mut x, &mut rng);
        }
        ones += x.get(0) as u64;
    }
    let bound = mixing_bound(t, n as u64).unwrap();
    let frac = ones as f64 / chains as f64;
    let se = (frac * (1.0 - frac) / chains as f64).sqrt();
    let mixing_ok = frac <= bound + 3.0 * se;

    check(
        chain_ok && restart_ok && z_clone.abs() <= 3.0 && mixing_ok,
        format!(
            "inequality chain on {chain_points} points: {chain_ok}; restart inequality: {restart_ok}; \
             clone noise {est:.5} vs {formula:.5} (z={z_clone:+.2}); mixing {frac:.5} vs bound {bound:.5}"
        ),
    )
}

fn restart_bound_end_to_end() -> Verdict {
    let inst = lo(6);
    let noise_free = AbsorbedChain::new(&inst, &AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap()).unwrap();
    let median = noise_free.worst_case_median(1_000_000).expect("noise-free chain finishes") as f64;
    let noisy = oracle::expected_optimisation_time(&inst, &AlgorithmConfig::ea(1, one_bit(0.05)).unwrap()).unwrap();
    let bound = noisy_restart_bound(median, 0.05, 2).unwrap().value();
    let worst = noisy.worst_case_time();
    check(
        worst <= bound,
        format!("worst-case expected time {worst:.3} <= {bound:.3} (noise-free worst-case median {median})"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("oracle_matches_simulation", oracle_matches_simulation),
        ("monotone_transitions", monotone_transitions),
        ("stationary_optimum_mass", stationary_optimum_mass),
        ("leadingones_threshold_full_scale", threshold_full_scale),
        ("leadingones_threshold_scaled", threshold_scaled),
        ("offspring_shift_threshold", offspring_shift_threshold),
        ("best_fitness_plateaus", best_fitness_plateaus),
        ("noise_helps_on_hurdle", noise_helps_on_hurdle),
        ("offspring_harm_on_hurdle", offspring_harm_on_hurdle),
        ("bounds_suite", bounds_suite),
        ("restart_bound_end_to_end", restart_bound_end_to_end),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (name, f) in criteria {
        if !filters.is_empty() && !filters.iter().any(|s| name.contains(s.as_str())) {
            continue;
        }
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        ran += 1;
        match verdict {
            Ok(d) => println!("[PASS] {name} ({secs:.1}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.1}s): {d}");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
