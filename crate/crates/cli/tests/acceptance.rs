//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
//! any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use epitaxy_cli::schema::{check, Kind};
use epitaxy_core::datagen::make_thm3;
use epitaxy_core::dynamics::{rhs, Checkpoint};
use epitaxy_core::experiments::*;
use epitaxy_core::semigroup::kernel_l1_constant;
use epitaxy_core::spectral::spectral_derivative;
use epitaxy_core::{Field, ModelSpec, Outcome, TorusGrid};
use serde_json::Value;

type Check = Result<String, String>;

fn w(r: &Report, key: &str) -> Result<f64, String> {
    r.verdict.get(key).ok_or_else(|| format!("missing witness {key}"))
}

fn require(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn slope_rate() -> Check {
    let grid = TorusGrid::new(1, 512).map_err(|e| e.to_string())?;
    let model = ModelSpec::slope_selection(0.1).map_err(|e| e.to_string())?;
    let h = make_thm3(0.1, 0.0, grid).map_err(|e| e.to_string())?;
    let rate = spectral_derivative(&rhs(&h, &model), 0, 1)
        .map_err(|e| e.to_string())?
        .at(0);
    let rel = (rate - 1.2).abs() / 1.2;
    require(rel <= 0.01, format!("rate {rate:.6} vs 1.2, rel error {rel:.2e}"))
}

fn crossing() -> Check {
    let at = |n| {
        let p = Conjecture1Params {
            n,
            resolution_check: false,
            ..Conjecture1Params::default()
        };
        conjecture1_falsification(&p).map_err(|e| e.to_string())
    };
    let (coarse, fine) = (at(512)?, at(1024)?);
    let (t0, t1) = (w(&coarse, "crossing_time")?, w(&fine, "crossing_time")?);
    let (p0, p1) = (w(&coarse, "peak_grad_sup")?, w(&fine, "peak_grad_sup")?);
    let change = ((t1 - t0) / t1).abs().max(((p1 - p0) / p1).abs());
    require(
        fine.verdict.outcome == Outcome::Confirmed && p1 > 1.0 && t1.is_finite() && change <= 0.01,
        format!("t0 = {t1:.4e}, peak {p1:.6}, change under doubling {change:.1e}"),
    )
}

fn energy() -> Check {
    let r = energy_law(&EnergyLawParams::default(), 2).map_err(|e| e.to_string())?;
    let res = w(&r, "max_residual_d1")?.max(w(&r, "max_residual_d2")?);
    let inc = w(&r, "max_energy_increase_d1")?.max(w(&r, "max_energy_increase_d2")?);
    require(
        res <= 1e-3 && inc <= 1e-10,
        format!("max relative residual {res:.2e}, max energy increase {inc:.1e}"),
    )
}

fn constants() -> Check {
    let c = kernel_l1_constant(1, 4.0).map_err(|e| e.to_string())?;
    let routes = (c.lobes - c.primitive).abs();
    let mut gauss = 0f64;
    for d in 1..=3 {
        let g = kernel_l1_constant(d, 2.0).map_err(|e| e.to_string())?;
        gauss = gauss.max((g.value - 1.0).abs());
    }
    require(
        routes <= 1e-6 && c.value > 1.0 && gauss <= 1e-8,
        format!("C(1,4) = {:.12}, routes differ by {routes:.1e}, |C(d,2) - 1| <= {gauss:.1e}", c.value),
    )
}

fn linear_lower_bound() -> Check {
    let r = thm5_lower_bound(&LowerBoundParams::default()).map_err(|e| e.to_string())?;
    let c1 = w(&r, "c1")?;
    let slope = w(&r, "linear_slope_origin")?;
    let target = c1 - 0.1 / 3.0;
    require(
        slope >= target,
        format!("slope at origin {slope:.6} >= C1 - eps/3 = {target:.6}"),
    )
}

fn smoothing() -> Check {
    let r = smoothing_rates(&SmoothingParams::default()).map_err(|e| e.to_string())?;
    let (e1, e2) = (w(&r, "exponent_m1")?, w(&r, "exponent_m2")?);
    require(
        (e1 + 0.25).abs() <= 0.03 && (e2 + 0.5).abs() <= 0.03,
        format!("exponents {e1:.4} (m=1), {e2:.4} (m=2)"),
    )
}

fn sawtooth() -> Check {
    let r = sawtooth_scaling(&SawtoothParams::default(), 4).map_err(|e| e.to_string())?;
    let e = w(&r, "energy_exponent")?;
    let peak = w(&r, "b1_observed")?;
    let trend = w(&r, "peak_nu_exponent")?;
    require(
        (e - 0.5).abs() <= 0.1 && trend >= -0.05 && peak.is_finite(),
        format!("energy exponent {e:.4}, sup slope {peak:.4}, its nu exponent {trend:.1e}"),
    )
}

fn bridge() -> Check {
    let r = cahn_hilliard_bridge(&BridgeParams::default()).map_err(|e| e.to_string())?;
    let gap = w(&r, "sup_difference")?;
    let u = w(&r, "u_sup_final")?;
    require(
        gap <= 1e-5 * (1.0 + u),
        format!("sup difference {gap:.2e} vs 1e-5 (1 + {u:.3})"),
    )
}

fn longtime() -> Check {
    let r = longtime_1d(&LongtimeParams::default()).map_err(|e| e.to_string())?;
    let plateau = w(&r, "plateau_grad_sup")?;
    let rate = w(&r, "dt_h_l2_final")?;
    require(
        w(&r, "even_data")? == 1.0 && plateau <= 1.05 && rate <= 1e-6,
        format!("plateau {plateau:.6}, |dt h|_2 {rate:.1e}"),
    )
}

fn integrator() -> Check {
    let r = integrator_order(&IntegratorOrderParams::default()).map_err(|e| e.to_string())?;
    let (r4, r2) = (w(&r, "etdrk4_ratio")?, w(&r, "imex_ratio")?);
    let cross = w(&r, "cross_scheme_difference")?;
    require(
        (r4 / 16.0 - 1.0).abs() <= 0.15 && (r2 / 4.0 - 1.0).abs() <= 0.15 && cross <= 1e-6,
        format!("ratios {r4:.2} (ETDRK4), {r2:.2} (IMEX), cross difference {cross:.1e}"),
    )
}

fn run_cli(cfg: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_epitaxy"))
        .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    match status.code() {
        Some(0 | 3 | 4) => Ok(()),
        other => Err(format!("{} exited with {other:?}", cfg.display())),
    }
}

fn all_files(dir: &Path, acc: &mut Vec<std::path::PathBuf>) {
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            all_files(&p, acc);
        } else {
            acc.push(p);
        }
    }
}

fn formats() -> Check {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let configs = [
        ("c1", r#"{"experiment":"conjecture1","n":256,"t_end":0.005}"#),
        ("lt", r#"{"experiment":"longtime_1d","t_long":2}"#),
        ("ss", r#"{"experiment":"smoothing_rates"}"#),
        ("ref", r#"{"experiment":"max_principle_reference"}"#),
    ];
    let mut compared = 0;
    let mut validated = 0;
    for (name, json) in configs {
        let cfg = tmp.path().join(format!("{name}.json"));
        fs::write(&cfg, json).map_err(|e| e.to_string())?;
        check(Kind::Config, &serde_json::from_str(json).unwrap()).map_err(|v| v.to_string())?;
        let (a, b) = (tmp.path().join(format!("{name}_a")), tmp.path().join(format!("{name}_b")));
        run_cli(&cfg, &a)?;
        run_cli(&cfg, &b)?;
        let mut files = vec![];
        all_files(&a, &mut files);
        for fa in files {
            let fb = b.join(fa.strip_prefix(&a).unwrap());
            if fs::read(&fa).ok() != fs::read(&fb).ok() {
                return Err(format!("{} differs between runs", fb.display()));
            }
            compared += 1;
            let kind = match fa.file_name().and_then(|f| f.to_str()) {
                Some("verdict.json") => Some(Kind::Verdict),
                Some(f) if f.ends_with(".json") => Some(Kind::Plot),
                _ => None,
            };
            if let Some(kind) = kind {
                let v: Value = serde_json::from_slice(&fs::read(&fa).unwrap()).map_err(|e| e.to_string())?;
                check(kind, &v).map_err(|v| format!("{}: {v}", fa.display()))?;
                validated += 1;
            }
            if fa.extension().is_some_and(|e| e == "bin") {
                let bytes = fs::read(&fa).unwrap();
                let c = Checkpoint::from_bytes(&bytes).map_err(|e| e.to_string())?;
                if c.to_bytes() != bytes {
                    return Err("checkpoint re-serialization differs".into());
                }
            }
        }
    }
    // in-memory roundtrip with awkward values
    let grid = TorusGrid::new(2, 16).unwrap();
    let field = Field::from_fn(grid, |x| (x[0] * 1e-300).sin() + f64::EPSILON * x[1]).unwrap();
    let c = Checkpoint {
        t: 0.1 + 0.2,
        nu: 1e-5,
        gamma: 4.0,
        field,
    };
    let back = Checkpoint::from_bytes(&c.to_bytes()).map_err(|e| e.to_string())?;
    let exact = back.t.to_bits() == c.t.to_bits()
        && back
            .field
            .values()
            .iter()
            .zip(c.field.values())
            .all(|(a, b)| a.to_bits() == b.to_bits());
    require(
        exact,
        format!("{compared} files identical across runs, {validated} JSON artifacts schema-valid, checkpoints bit-exact"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("1 slope-rate identity", slope_rate, Duration::from_secs(1)),
        ("2 conjecture falsification", crossing, Duration::from_secs(60)),
        ("3 energy law", energy, Duration::from_secs(60)),
        ("4 kernel constants", constants, Duration::from_secs(10)),
        ("5 linear lower bound", linear_lower_bound, Duration::from_secs(60)),
        ("6 smoothing exponents", smoothing, Duration::from_secs(10)),
        ("7 sawtooth energy scaling", sawtooth, Duration::from_secs(300)),
        ("8 Cahn-Hilliard bridge", bridge, Duration::from_secs(60)),
        ("9 long-time even data", longtime, Duration::from_secs(300)),
        ("10 integrator order", integrator, Duration::from_secs(60)),
        ("11 determinism and formats", formats, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if took <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {name}: {detail} [{:.2} s of {} s]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
