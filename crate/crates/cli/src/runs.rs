use crate::config::RunConfig;
use anyhow::{anyhow, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use spintor_core::action::{spin_current, total_action};
use spintor_core::battery::run_battery;
use spintor_core::dynamics::{evolve_wave, solve_static, SolverConfig};
use spintor_core::geometry::MetricChart;
use spintor_core::io::{save_snapshot, SnapshotMeta};
use spintor_core::spinor::{GammaRep, TwistedSpinorField};
use spintor_core::torsion::{delta_a_two_form, TorsionPotential};
use std::io::Write;
use std::path::Path;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_manifest(cfg: &RunConfig, dir: &Path, command: &str) -> Result<()> {
    let manifest = json!({
        "schema_version": cfg.schema_version,
        "command": command,
        "config": cfg,
    });
    let mut f = std::fs::File::create(dir.join("manifest.json"))?;
    f.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

fn build_psi(
    cfg: &RunConfig,
    chart: &MetricChart,
    gamma: &GammaRep,
    rng: &mut ChaCha8Rng,
) -> TwistedSpinorField {
    match cfg.psi_init.as_str() {
        "zero" => TwistedSpinorField::zeros(chart, gamma),
        "constant" => {
            let u: Vec<Complex64> = (0..gamma.d)
                .map(|a| {
                    Complex64::new(
                        cfg.psi_amplitude * (1.0 + 0.3 * a as f64),
                        cfg.psi_amplitude * 0.2 * a as f64,
                    )
                })
                .collect();
            TwistedSpinorField::constant_uniform(chart, gamma, &u)
        }
        "modulated" => TwistedSpinorField::modulated_legs(chart, gamma, cfg.psi_amplitude),
        "random" => TwistedSpinorField::random(chart, gamma, rng, cfg.psi_amplitude),
        other => unreachable!("validated psi_init {other}"),
    }
}

fn build_a(
    cfg: &RunConfig,
    chart: &MetricChart,
    rng: &mut ChaCha8Rng,
) -> Result<TorsionPotential> {
    Ok(match cfg.a_init.as_str() {
        "zero" => TorsionPotential::zeros(chart),
        "random" => TorsionPotential::random(chart, rng, cfg.a_amplitude),
        "coexact" => {
            let mut two = spintor_core::torsion::TorsionFieldStrength::zeros(chart);
            let n = chart.n();
            for x in chart.sites() {
                for a in 0..n {
                    for b in (a + 1)..n {
                        for j in 0..n {
                            for k in (j + 1)..n {
                                use rand::Rng;
                                let v = cfg.a_amplitude * rng.gen_range(-1.0..1.0);
                                two.set(x, a, b, j, k, v);
                                two.set(x, b, a, j, k, -v);
                                two.set(x, a, b, k, j, -v);
                                two.set(x, b, a, k, j, v);
                            }
                        }
                    }
                }
            }
            delta_a_two_form(chart, None, &two)?
        }
        "plane_wave" => {
            let mut a = TorsionPotential::zeros(chart);
            let axis = cfg.wave_axis;
            let l = chart.lat.dims[axis] as f64;
            let comp = (axis + 1) % chart.n();
            for x in chart.sites() {
                let c = chart.lat.coords(x)[axis] as f64;
                let v = cfg.a_amplitude
                    * (2.0 * std::f64::consts::PI * cfg.wave_mode as f64 * c / l).cos();
                a.set(x, comp, 0, 1, v);
                a.set(x, comp, 1, 0, -v);
            }
            a
        }
        "snapshot" => {
            let path = cfg.a_snapshot.as_ref().expect("validated");
            let (meta, payload) = spintor_core::io::load_snapshot(Path::new(path))?;
            if meta.dims != chart.lat.dims
                || meta.shape != vec![chart.n(), chart.n(), chart.n()]
            {
                return Err(anyhow!(
                    "snapshot {} does not match the configured lattice",
                    path
                ));
            }
            TorsionPotential::new(chart, payload)?
        }
        other => unreachable!("validated a_init {other}"),
    })
}

fn save_potential(
    chart: &MetricChart,
    a: &TorsionPotential,
    dir: &Path,
    name: &str,
) -> Result<()> {
    let meta = SnapshotMeta::for_chart(
        chart,
        vec![chart.n(), chart.n(), chart.n()],
        "torsion_potential",
        false,
    );
    save_snapshot(&dir.join(name), &meta, &a.data)?;
    Ok(())
}

/// Identity battery: JSON report, one line per identity, exit 0 iff all
/// pass.
pub fn cmd_check(cfg: &RunConfig, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    write_manifest(cfg, out, "check")?;
    let results = run_battery(cfg.seed)?;
    let all_pass = results.iter().all(|r| r.pass);
    let report = json!({
        "schema_version": cfg.schema_version,
        "seed": cfg.seed,
        "checks": results,
        "all_pass": all_pass,
    });
    let mut f = std::fs::File::create(out.join("check_report.json"))?;
    f.write_all(serde_json::to_string_pretty(&report)?.as_bytes())?;
    f.write_all(b"\n")?;
    for r in &results {
        println!(
            "{} {}: residual {:.3e} (threshold {:.1e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.residual,
            r.threshold
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}

/// Static solve: snapshots, residual history CSV and the action
/// breakdown of the solution.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    write_manifest(cfg, out, "solve")?;
    let chart = cfg.build_chart()?;
    let gamma = GammaRep::build(cfg.signature()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let psi = build_psi(cfg, &chart, &gamma, &mut rng);
    let a0 = build_a(cfg, &chart, &mut rng)?;
    let solver: SolverConfig = cfg.solver();
    let report = solve_static(&chart, &gamma, &a0, &psi, cfg.coupling_g, &solver)?;

    let mut csv = String::from("iter,action,residual\n");
    for row in &report.history {
        csv.push_str(&format!("{},{:.17e},{:.17e}\n", row.iter, row.action, row.residual));
    }
    std::fs::write(out.join("residuals.csv"), csv)?;
    save_potential(&chart, &report.a_star, out, "a_star.f64")?;

    let breakdown = total_action(
        &chart,
        &gamma,
        &report.a_star,
        &psi,
        cfg.coupling_form()?,
        cfg.coupling_g,
    )?;
    let summary = json!({
        "schema_version": cfg.schema_version,
        "converged": report.converged,
        "iterations": report.iterations,
        "final_residual": report.final_residual,
        "action": breakdown,
    });
    std::fs::write(
        out.join("solve_report.json"),
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    println!(
        "solve: converged = {}, iterations = {}, residual = {:.3e}",
        report.converged, report.iterations, report.final_residual
    );
    Ok(if report.converged { 0 } else { 1 })
}

/// Wave run: energy CSV and final-state snapshot.
pub fn cmd_evolve(cfg: &RunConfig, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    write_manifest(cfg, out, "evolve")?;
    let chart = cfg.build_chart()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a0 = build_a(cfg, &chart, &mut rng)?;
    let v0 = TorsionPotential::zeros(&chart);
    let report = evolve_wave(&chart, &a0, &v0, cfg.wave_steps, cfg.wave_dt)?;
    let mut csv = String::from("t,energy,max_abs_a\n");
    for (t, e, m) in &report.energy_log {
        csv.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", t, e, m));
    }
    std::fs::write(out.join("energy.csv"), csv)?;
    save_potential(&chart, &report.state.a, out, "a_final.f64")?;
    println!(
        "evolve: {} steps, dt = {}, final max|A| = {:.3e}",
        cfg.wave_steps,
        cfg.wave_dt,
        report.state.a.norm_inf()
    );
    Ok(0)
}

/// Action evaluation for the configured fields, plus the weak-coupling
/// diagnostics.
pub fn cmd_action(cfg: &RunConfig, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    write_manifest(cfg, out, "action")?;
    let chart = cfg.build_chart()?;
    let gamma = GammaRep::build(cfg.signature()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let psi = build_psi(cfg, &chart, &gamma, &mut rng);
    let a = build_a(cfg, &chart, &mut rng)?;
    let breakdown =
        total_action(&chart, &gamma, &a, &psi, cfg.coupling_form()?, cfg.coupling_g)?;
    let weak = spintor_core::dynamics::weak_coupling_report(&chart, &a, cfg.coupling_g)?;
    let current = spin_current(&chart, &gamma, &psi)?;
    let report = json!({
        "schema_version": cfg.schema_version,
        "action": breakdown,
        "weak_coupling": {
            "effective_lambda": weak.effective_lambda,
            "commutator_ratio": weak.commutator_ratio,
        },
        "spin_current_sup": current.field.norm_inf(),
    });
    std::fs::write(
        out.join("action_report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    println!(
        "action: total = {:.6e} (scal {:.3e}, fermion {:.3e}, torsion {:.3e})",
        breakdown.total, breakdown.scal_term, breakdown.fermion_term, breakdown.torsion_term
    );
    Ok(0)
}
