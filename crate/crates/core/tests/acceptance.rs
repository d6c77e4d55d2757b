//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use motion_camouflage::analysis::{self, HypothesisSet};
use motion_camouflage::dynamics::{self, CurvatureControl, ParticleState, SpeedProfile};
use motion_camouflage::geometry::{FrenetFrame, Vec3};
use motion_camouflage::guidance;
use motion_camouflage::scenario::config::SpeedSpec;
use motion_camouflage::scenario::sweep::compare_guidance;
use motion_camouflage::scenario::{audit, export, presets, run, ScenarioConfig, SimLog};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Shipped {
    cfg: ScenarioConfig,
    log: SimLog,
    elapsed: Duration,
}

fn shipped() -> Vec<Shipped> {
    presets::all()
        .expect("shipped configs load")
        .into_iter()
        .map(|cfg| {
            let start = Instant::now();
            let log = run(&cfg).expect("shipped config runs");
            Shipped {
                cfg,
                log,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn speed_ratio(runs: &[Shipped]) -> Outcome {
    for r in runs {
        r.cfg
            .require_speed_ratio(presets::SPEED_RATIO)
            .map_err(|e| format!("{}: {e}", r.cfg.name))?;
    }
    let mut off = runs[0].cfg.clone();
    off.evader.speed = SpeedSpec::Constant { speed: 0.85 };
    check(
        off.require_speed_ratio(presets::SPEED_RATIO).is_err(),
        "all four at 0.9 exactly; 0.85 rejected".into(),
    )
}

fn accessibility(runs: &[Shipped]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in runs {
        let c = r.cfg.certificate().unwrap().unwrap();
        let t1 = r.log.time_to_gamma(c.gamma_target());
        let pass = c.epsilon == 0.02
            && t1.is_some_and(|t| t <= c.horizon)
            && r.elapsed < Duration::from_secs(5);
        ok &= pass;
        parts.push(format!(
            "{} t1={} T={:.5} mu={:.3} ({:.2}s)",
            r.cfg.name,
            t1.map_or("none".into(), |t| format!("{t:.3}")),
            c.horizon,
            c.mu,
            r.elapsed.as_secs_f64()
        ));
    }
    check(ok, parts.join("; "))
}

fn per_run(runs: &[Shipped], f: impl Fn(&Shipped) -> Vec<audit::AuditReport>) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in runs {
        for rep in f(r) {
            ok &= rep.passed();
            parts.push(format!(
                "{} {} {:.2e}/{:.0e} n={}",
                r.cfg.name, rep.name, rep.worst, rep.tolerance, rep.samples
            ));
        }
    }
    check(ok, parts.join("; "))
}

fn envelope(runs: &[Shipped]) -> Outcome {
    per_run(runs, |r| {
        let c = r.cfg.certificate().unwrap().unwrap();
        vec![audit::envelope(&r.log, &c).unwrap()]
    })
}

fn parallel_baselines(runs: &[Shipped]) -> Outcome {
    let straight = runs.iter().find(|r| r.cfg.name == "straight").unwrap();
    let ratio = audit::transverse_ratio(&straight.log).unwrap();
    let disp = audit::dispersion_degrees(&straight.log).unwrap();
    let dir = Vec3::new(0.3, -0.5, 0.8);
    let synthetic: Vec<Vec3<f64>> = (0..2000).map(|k| dir * (10.0 - 0.004 * k as f64)).collect();
    let synth = analysis::baseline_dispersion(&synthetic, 0.05).unwrap();
    check(
        ratio <= 1e-2 && disp <= 1.0 && synth <= 1e-9,
        format!(
            "straight |w|/|rdot| {ratio:.2e}, dispersion {disp:.2e} deg; synthetic {synth:.1e} rad"
        ),
    )
}

fn transverse_identity(runs: &[Shipped]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let mut v = || {
            let d = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            d * 10f64.powf(rng.gen_range(-3.0..3.0))
        };
        let (r, rd) = (v(), v());
        if r.norm() < 1e-6 || rd.norm() < 1e-6 {
            continue;
        }
        let w = guidance::transverse_w(r, rd).unwrap();
        let g = guidance::gamma(r, rd).unwrap();
        let v2 = rd.norm_squared();
        worst = worst.max((w.norm_squared() - v2 * (1.0 - g * g)).abs() / v2);
    }
    let random = check(worst <= 1e-10, format!("1000 random states {worst:.1e}"))?;
    per_run(runs, |r| vec![audit::transverse_identity(&r.log)]).map(|s| format!("{random}; {s}"))
}

fn gamma_rate(runs: &[Shipped]) -> Outcome {
    per_run(runs, |r| {
        let rep = audit::gamma_rate_oracle(&r.log, &r.cfg.evader_profile).unwrap();
        assert_eq!(rep.samples, audit::ORACLE_SAMPLES);
        vec![rep]
    })
}

fn equivalence(runs: &[Shipped]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in runs {
        let c = compare_guidance(&r.cfg).unwrap();
        let worst = c.max_relative_residual();
        ok &= worst <= 1e-8 && !c.residuals.is_empty();
        parts.push(format!("{} {worst:.1e}", r.cfg.name));
    }
    check(ok, parts.join("; "))
}

fn bounds(runs: &[Shipped]) -> Outcome {
    per_run(runs, |r| {
        let h = r.cfg.hypotheses().unwrap();
        vec![
            audit::relative_speed_band(&r.log, &h),
            audit::shrink_bound(&r.log, &h),
        ]
    })
}

/// Final-position error of a unit-speed, unit-curvature arc over one time unit.
fn circle_error(dt: f64) -> f64 {
    let steps = (1.0 / dt).round() as usize;
    let c = CurvatureControl::new(0.6, 0.8);
    let profile = SpeedProfile::constant(1.0);
    let mut s = ParticleState::new(Vec3::zero(), FrenetFrame::identity(), 1.0, 0.0);
    for k in 0..steps {
        s = dynamics::step(&s, &c, &profile, k as f64 * dt, dt).unwrap();
    }
    let n = Vec3::new(0.0, 0.6, 0.8);
    let exact = Vec3::e1() * 1f64.sin() + n * (1.0 - 1f64.cos());
    (s.position - exact).norm()
}

fn numerics(runs: &[Shipped]) -> Outcome {
    let dts: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
    let pts: Vec<(f64, f64)> = dts
        .iter()
        .map(|&h| (h.ln(), circle_error(h).ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let slope_ok = check((slope - 4.0).abs() <= 0.2, format!("RK4 slope {slope:.3}"))?;
    per_run(runs, |r| {
        let s = r.cfg.resolve().unwrap();
        vec![
            audit::frame_orthonormality(&r.log),
            audit::speed_tracking(&r.log, &s),
        ]
    })
    .map(|s| format!("{slope_ok}; {s}"))
    .map_err(|s| format!("{slope_ok}; {s}"))
}

fn certificate_chain() -> Outcome {
    let h = HypothesisSet {
        nu_p_low: 1.0,
        nu_p_high: 1.0,
        nu_e_low: 0.9,
        nu_e_high: 0.9,
        nu_max: 0.9,
        alpha_p: 0.0,
        alpha_e: 0.0,
        kappa_e_max: 0.0,
        gamma0: 0.0,
        r0_initial: 10.0,
    };
    let c = analysis::certify(&h, 0.02, 1.0).map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    // Hand substitution: c2 = 1.9·½ln(99)/9, mu = 19(1.9 + c2), T = 9/1.9.
    let c2_hand = 1.9 * 0.5 * 99f64.ln() / 9.0;
    let ok = rel(c.c2, 0.48504) <= 1e-4
        && rel(c.c2, c2_hand) <= 1e-12
        && c.c0 == c.c2
        && c.c1 == 0.0
        && rel(c.mu, 45.316) <= 1e-4
        && rel(c.mu, 19.0 * (1.9 + c2_hand)) <= 1e-12
        && rel(c.horizon, 4.73684) <= 1e-4;
    check(
        ok,
        format!(
            "c2={:.6} c0={:.6} mu={:.4} T={:.6}",
            c.c2, c.c0, c.mu, c.horizon
        ),
    )
}

fn determinism(runs: &[Shipped]) -> Outcome {
    let mut ok = true;
    for r in runs {
        let again = run(&r.cfg).unwrap();
        ok &= export::csv_string(&r.log).unwrap() == export::csv_string(&again).unwrap();
    }
    check(ok, "repeat runs byte-identical for all four".into())
}

fn main() -> ExitCode {
    let runs = shipped();
    let criteria: [(&str, Outcome); 11] = [
        ("speed ratio", speed_ratio(&runs)),
        ("finite-time accessibility", accessibility(&runs)),
        ("gamma envelope", envelope(&runs)),
        (
            "transverse velocity and parallel baselines",
            parallel_baselines(&runs),
        ),
        ("transverse identity", transverse_identity(&runs)),
        ("gamma rate against finite differences", gamma_rate(&runs)),
        ("MCPG and PPNG equivalence", equivalence(&runs)),
        ("relative speed band and range shrink", bounds(&runs)),
        ("integrator numerics", numerics(&runs)),
        ("certificate arithmetic", certificate_chain()),
        ("determinism", determinism(&runs)),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in criteria.iter().enumerate() {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} [{detail}]", i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
