//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resune::demand::total_demand;
use resune::equilibrium::*;
use resune::hash_supply::{hash_supply_derivative, solve_hash_supply};
use resune::model::{DemandParams, MinerCostModel, SecurityParams};
use resune::scenarios::{halving_report, parameter_sweep, SweepAxis};
use resune::security::safety;
use resune::var_lab::{run_ensemble, Replication};
use resune::Economy;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("took {elapsed:?}, limit {limit_s} s"))
}

fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1e-3);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn supply_closed_form() -> Check {
    let start = Instant::now();
    let eco = economy(baseline_params());
    let reward = eco.protocol().reward();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let p = 1e-4 * 1e6f64.powf(i as f64 / 199.0);
        let h = solve_hash_supply(&eco, p).map_err(|e| e.to_string())?.h;
        worst = worst.max(rel_err(h, (p * reward).sqrt().min(1.0)));
    }
    ensure(worst <= 1e-9, || format!("max relative error {worst:e}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("max relative error {worst:.1e} over 200 prices"))
}

fn derivative_suite() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [0.0f64; 4];
    let families = [MinerCostModel::uniform(0.0, 1.0, 1.0), MinerCostModel::uniform(0.3, 2.0, 1.5), power_costs()];
    let mut n = 0;
    while n < 60 {
        let mut params = baseline_params();
        params.costs = families[n % families.len()].clone();
        let eco = economy(params);
        let p = 10f64.powf(rng.gen_range(-3.0..1.5));
        let step = 1e-5 * p;
        let (lo, hi) = (solve_hash_supply(&eco, p - step).unwrap(), solve_hash_supply(&eco, p + step).unwrap());
        if lo.at_corner || hi.at_corner {
            continue;
        }
        let an = hash_supply_derivative(&eco, p).unwrap();
        worst[0] = worst[0].max(rel_err(an, (hi.h - lo.h) / (2.0 * step)));
        n += 1;
    }
    for _ in 0..60 {
        let sec = SecurityParams {
            g: rng.gen_range(0.2..3.0),
            k: rng.gen_range(0.2..6.0),
            sigma_eps: rng.gen_range(0.3..3.0),
            s_star: rng.gen_range(-1.0..1.0),
        };
        let (p, h) = (rng.gen_range(0.05..3.0), rng.gen_range(0.05..1.0));
        let pt = safety(&sec, p, h);
        let tail = |x: f64, y: f64| {
            let s = safety(&sec, x, y);
            if pt.z < 0.0 { s.safety } else { -s.pi_attack }
        };
        worst[1] = worst[1]
            .max(rel_err(pt.d_safety_dp, central(|x| tail(x, h), p)))
            .max(rel_err(pt.d_safety_dh, central(|y| tail(p, y), h)));

        let dem = DemandParams {
            theta_u: rng.gen_range(0.5..20.0),
            eps: rng.gen_range(0.3..2.5),
            theta_s: rng.gen_range(1.0..10.0),
            delta: rng.gen_range(0.0..0.5),
        };
        let (p, s) = (rng.gen_range(0.05..5.0), rng.gen_range(0.2..0.95));
        let d = total_demand(&dem, p, s).unwrap();
        worst[2] = worst[2]
            .max(rel_err(d.dd_dp, central(|x| total_demand(&dem, x, s).unwrap().d_total, p)))
            .max(rel_err(d.dd_dsigma, central(|x| total_demand(&dem, p, x).unwrap().d_total, s)));
    }
    let economies: Vec<Economy> = feedback_params().into_iter().chain([multiplicity_params()]).map(economy).collect();
    for i in 0..60 {
        let eco = &economies[i % economies.len()];
        let p = 10f64.powf(rng.gen_range(-2.5..0.7));
        let slope = aggregate_demand_slope(eco, p).unwrap();
        worst[3] = worst[3].max(rel_err(slope.total, central(|x| excess_demand(eco, x).unwrap(), p)));
    }
    ensure(worst.iter().all(|w| *w <= 1e-5), || format!("max relative errors {worst:?}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("max relative errors dH/dP {:.1e}, safety {:.1e}, demand {:.1e}, slope {:.1e}", worst[0], worst[1], worst[2], worst[3]))
}

fn existence() -> Check {
    let scan = ScanConfig::default();
    let eco = economy(baseline_params());
    let set = find_equilibria(&eco, &scan).map_err(|e| e.to_string())?;
    ensure(set.boundary.z_at_p_min > 0.0 && set.boundary.z_at_p_max < 0.0, || format!("{:?}", set.boundary))?;
    ensure(!set.equilibria.is_empty(), || "no equilibrium".into())?;
    let q = eco.protocol().q;
    ensure(set.equilibria.iter().all(|e| e.excess_residual.abs() <= 1e-9 * q), || "residual too large".into())?;
    let lim = find_equilibria(&economy(limiting_params()), &scan).map_err(|e| e.to_string())?;
    ensure(lim.equilibria.len() == 1, || format!("{} limiting equilibria", lim.equilibria.len()))?;
    let p = lim.equilibria[0].p_star;
    ensure((p - 1.0).abs() <= 1e-6, || format!("limiting P* = {p}"))?;
    Ok(format!("baseline P* = {:.10}, limiting P* = {p:.12}", set.equilibria[0].p_star))
}

fn brute_force_count(eco: &Economy, scan: &ScanConfig, refine: usize) -> usize {
    let n = scan.n_grid * refine;
    let z: Vec<f64> = (0..n)
        .map(|i| excess_demand(eco, scan.p_min * (scan.p_max / scan.p_min).powf(i as f64 / (n - 1) as f64)).unwrap())
        .collect();
    z.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

fn uniqueness() -> Check {
    let start = Instant::now();
    let scan = ScanConfig::default();
    let mut unique_checked = 0;
    for params in feedback_params().into_iter().chain([limiting_params()]) {
        let eco = economy(params);
        if check_uniqueness_condition(&eco, &scan).unwrap().holds_everywhere {
            let n = find_equilibria(&eco, &scan).unwrap().equilibria.len();
            ensure(n == 1, || format!("condition holds but {n} equilibria"))?;
            unique_checked += 1;
        }
    }
    let values = vec![0.3, 0.35, 0.4, 0.5, 0.7, 1.0, 3.0, 10.0, 100.0, 1e9];
    let axis = SweepAxis { field: "security.sigma_eps".into(), values };
    let sweep = parameter_sweep(&multiplicity_params(), &axis, &scan).map_err(|e| e.to_string())?;
    for row in &sweep.rows {
        let mut params = multiplicity_params();
        params.security.sigma_eps = row.axis_value;
        let eco = economy(params);
        if check_uniqueness_condition(&eco, &scan).unwrap().holds_everywhere {
            ensure(row.equilibria.len() == 1, || format!("sigma {}: {} equilibria", row.axis_value, row.equilibria.len()))?;
            unique_checked += 1;
        }
    }
    let violating = sweep
        .rows
        .iter()
        .find(|r| r.equilibria.len() >= 3)
        .ok_or_else(|| "sweep found no economy with 3 or more equilibria".to_string())?;
    let mut params = multiplicity_params();
    params.security.sigma_eps = violating.axis_value;
    let eco = economy(params);
    let fine = brute_force_count(&eco, &scan, 10);
    ensure(fine == violating.equilibria.len(), || format!("scan {} vs fine {fine}", violating.equilibria.len()))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "{unique_checked} economies unique under the condition; sigma_eps = {} gives {} equilibria, fine scan agrees",
        violating.axis_value,
        violating.equilibria.len()
    ))
}

fn stability() -> Check {
    let scan = ScanConfig::default();
    let eco = economy(multiplicity_params());
    let set = find_equilibria(&eco, &scan).map_err(|e| e.to_string())?;
    ensure(set.equilibria.len() >= 3, || format!("{} equilibria", set.equilibria.len()))?;
    let mut runs = 0;
    for e in &set.equilibria {
        for shift in [-0.1, 0.1] {
            let cfg = TatonnementConfig { p0: e.p_star * (1.0 + shift), kappa: 0.5 / e.slope.total.abs(), tol: 1e-10, max_iters: 10_000 };
            let r = tatonnement(&eco, &cfg, &scan).map_err(|e| e.to_string())?;
            match e.stability {
                Stability::Stable => match r.outcome {
                    TatonnementOutcome::Converged { p_limit } if rel_err(p_limit, e.p_star) < 1e-6 => {}
                    other => return Err(format!("stable P* = {} from shift {shift}: {other:?}", e.p_star)),
                },
                _ => ensure(r.trajectory.iter().any(|s| rel_err(s.p, e.p_star) > 0.01), || {
                    format!("stayed near unstable P* = {}", e.p_star)
                })?,
            }
            runs += 1;
        }
    }
    let pattern: Vec<&str> = set.equilibria.iter().map(|e| e.stability.as_str()).collect();
    Ok(format!("{runs} runs, pattern {}", pattern.join("/")))
}

fn halving_statics() -> Check {
    let scan = ScanConfig::default();
    let mut confirmed = 0;
    for params in feedback_params() {
        let r = halving_report(&economy(params), &scan).map_err(|e| e.to_string())?;
        if r.uniqueness_pre && r.uniqueness_post {
            ensure(r.delta_p < 0.0 && r.delta_h < 0.0, || format!("delta_P {} delta_H {}", r.delta_p, r.delta_h))?;
            confirmed += 1;
        }
    }
    ensure(confirmed >= 3, || format!("only {confirmed} economies unique pre and post"))?;
    let lim = halving_report(&economy(limiting_params()), &scan).map_err(|e| e.to_string())?;
    ensure(lim.delta_h < 0.0 && lim.delta_p.abs() < 1e-6, || format!("limiting delta_P {} delta_H {}", lim.delta_p, lim.delta_h))?;
    Ok(format!("{confirmed} feedback economies lower P and H; limiting |delta_P| = {:.1e}", lim.delta_p.abs()))
}

fn ensemble() -> Result<(Vec<Replication>, Duration), String> {
    let start = Instant::now();
    let seeds: Vec<u64> = (0..50).collect();
    let runs = run_ensemble(&economy(baseline_params()), &ensemble_dynamics(), &seeds, 2, 52, 6).map_err(|e| e.to_string())?;
    Ok((runs, start.elapsed()))
}

fn sign_suite(runs: &[Replication], elapsed: Duration) -> Check {
    let negative = |v: usize| runs.iter().filter(|r| r.irf.responses[1..=8].iter().all(|x| x[v] < 0.0)).count();
    let (p, h, phi) = (negative(0), negative(1), negative(2));
    let need = (0.9 * runs.len() as f64).ceil() as usize;
    ensure(p >= need && h >= need, || format!("log_P negative in {p}, log_H in {h} of {}", runs.len()))?;
    within(elapsed, 60.0)?;
    Ok(format!(
        "log_P negative {p}/{n}, log_H negative {h}/{n}, log_Phi negative {phi}/{n} (not asserted), {elapsed:.1?}",
        n = runs.len()
    ))
}

fn lead_lag(runs: &[Replication]) -> Check {
    let wins = runs
        .iter()
        .filter(|r| {
            let (ph, hp) = r.lead_lag.incremental_r2();
            ph > hp
        })
        .count();
    ensure(2 * wins > runs.len(), || format!("price leads in {wins} of {}", runs.len()))?;
    Ok(format!("price leads hash in {wins}/{}", runs.len()))
}

fn run_cli(cmd: &str, config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_resune"))
        .args([cmd, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("{cmd}: {}", String::from_utf8_lossy(&status.stderr)))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = serde_json::json!({
        "economy": serde_json::to_value(baseline_params()).unwrap(),
        "sweep": { "field": "security.sigma_eps", "values": [0.5, 1.0, 2.0] },
        "tatonnement": { "p0": 1.5, "kappa": 0.05 },
        "dynamics": serde_json::to_value(ensemble_dynamics()).unwrap(),
    });
    let path = dir.path().join("run.json");
    std::fs::write(&path, config.to_string()).map_err(|e| e.to_string())?;
    let commands = ["solve", "halving", "sweep", "uniqueness-check", "tatonnement", "simulate", "var", "irf"];
    let mut files = 0;
    for cmd in commands {
        let (a, b) = (dir.path().join(format!("{cmd}-a")), dir.path().join(format!("{cmd}-b")));
        run_cli(cmd, &path, &a)?;
        run_cli(cmd, &path, &b)?;
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        ensure(!names.is_empty(), || format!("{cmd} wrote nothing"))?;
        for name in names {
            let (x, y) = (std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap_or_default());
            ensure(x == y, || format!("{cmd}: {} differs", name.to_string_lossy()))?;
            files += 1;
        }
    }
    Ok(format!("{} commands, {files} artifacts byte-identical", commands.len()))
}

fn main() {
    let mut results: Vec<(&str, Check)> = vec![
        ("1 closed-form supply", supply_closed_form()),
        ("2 derivative suite", derivative_suite()),
        ("3 existence", existence()),
        ("4 uniqueness", uniqueness()),
        ("5 stability", stability()),
        ("6 halving statics", halving_statics()),
    ];
    match ensemble() {
        Ok((runs, elapsed)) => {
            results.push(("7 impulse-response signs", sign_suite(&runs, elapsed)));
            results.push(("8 lead-lag", lead_lag(&runs)));
        }
        Err(e) => {
            results.push(("7 impulse-response signs", Err(e.clone())));
            results.push(("8 lead-lag", Err(e)));
        }
    }
    results.push(("9 determinism", determinism()));

    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
