//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the binary
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use zoneforge::cell::{CellPotential, DEFAULT_GRID_SIZE};
use zoneforge::floquet::{self, kronig_penney_discriminant};
use zoneforge::shooting;
use zoneforge::sweep::{self, ReportFormat, ScenarioName, ShiftSpec};
use zoneforge::transforms::{self, FreeBase, WeightAnchor};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn kronig_penney_oracle() -> Check {
    let mut worst = 0.0f64;
    for v in [4.0, -4.0, 0.0] {
        let p = CellPotential::comb(v);
        for e in linspace(0.1, 30.0, 1000) {
            let numeric = floquet::discriminant(&p, e).map_err(|err| err.to_string())?;
            worst = worst.max((numeric - kronig_penney_discriminant(v, e)).abs());
        }
    }
    ensure(worst < 1e-9, format!("max |Δ_num − Δ_KP| = {worst:.2e} (tol 1e-9)"))
}

fn band_edge_identity() -> Check {
    let bs = floquet::band_edges(&CellPotential::comb(4.0), [0.0, 16.0]).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (zone, level) in [(1, 1.0), (2, 4.0), (3, 9.0)] {
        let z = bs.zone(zone).ok_or(format!("zone {zone} missing"))?;
        worst = worst.max((z.upper - level).abs());
    }
    ensure(worst < 1e-8, format!("upper edges of zones 1-3 vs 1, 4, 9: max error {worst:.2e} (tol 1e-8)"))
}

fn isospectral_except_one() -> Check {
    let mut worst = 0.0f64;
    for t in [1.0, 2.0, 3.0] {
        let res = transforms::level_shift_on(4.0, 2, t, DEFAULT_GRID_SIZE).map_err(|e| e.to_string())?;
        let levels = shooting::dirichlet_levels(&res.potential, 6, 0.0).map_err(|e| e.to_string())?;
        let mut expected = vec![1.0, 4.0 + t, 9.0, 16.0, 25.0, 36.0];
        expected.sort_by(f64::total_cmp);
        for (a, b) in levels.iter().zip(&expected) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-6, format!("t ∈ {{1, 2, 3}}: max |E_k − expected| = {worst:.2e} (tol 1e-6)"))
}

fn fig1a_merge() -> Check {
    let s = sweep::with_values(ScenarioName::Fig1a, &[1.0]);
    let err = |e: zoneforge::Error| e.to_string();
    let t_star = sweep::locate_merge(&s, 0.9, 1.2, 1e-6).map_err(err)?;
    // the gap width is monotone on either side of the merge, so its minimum
    // over the tolerance band sits at the point of the band nearest t*
    let nearest = t_star.clamp(0.95, 1.05);
    let width = sweep::signed_focus_gap(&s, nearest).map_err(err)?.abs();
    let merge_ok = width < 1e-3;

    let report = sweep::run_fig1a(&[2.0, 3.0, 3.9]).map_err(err)?;
    let mut reopen_ok = true;
    let mut notes = Vec::new();
    for e in &report.entries {
        let gap = e.focus_gap().map_or(0.0, |g| g.width);
        let role = e.shifted_level().copied();
        let upper = e.bands().and_then(|b| b.zone(3)).map_or(f64::NAN, |z| z.upper);
        let ok = gap > s.tolerances.gap_tol
            && role.is_some_and(|r| r.lower_edge_of == Some(3))
            && (upper - 9.0).abs() < 1e-6;
        reopen_ok &= ok;
        notes.push(format!("t={}: gap {gap:.3}, 4+t lower edge of zone 3: {ok}", e.value));
    }
    ensure(
        merge_ok && reopen_ok,
        format!(
            "gap 2-3 closes at ΔE* = {t_star:.5}; min width on [0.95, 1.05] = {width:.2e} (tol 1e-3): {}; reopening: {}",
            if merge_ok { "ok" } else { "outside the ±0.05 band" },
            notes.join("; ")
        ),
    )
}

fn fig1b_merge() -> Check {
    let s = sweep::with_values(ScenarioName::Fig1b, &[-1.8]);
    let err = |e: zoneforge::Error| e.to_string();
    let t_star = sweep::locate_merge(&s, -2.0, -1.6, 1e-6).map_err(err)?;
    let nearest = t_star.clamp(-1.9, -1.7);
    let width = sweep::signed_focus_gap(&s, nearest).map_err(err)?.abs();
    ensure(
        width < 1e-3,
        format!("gap 1-2 closes at ΔE* = {t_star:.5}; min width on [−1.9, −1.7] = {width:.2e} (tol 1e-3)"),
    )
}

fn fig1c_merge() -> Check {
    let s = sweep::with_values(ScenarioName::Fig1c, &[1.0]);
    let err = |e: zoneforge::Error| e.to_string();
    let t_star = sweep::locate_merge(&s, 1.3, 1.6, 1e-6).map_err(err)?;
    let report = sweep::run_fig1c(&[t_star - 0.1, t_star, t_star + 0.2]).map_err(err)?;
    let upper2 = |i: usize| report.entries[i].bands().and_then(|b| b.zone(2)).map_or(f64::NAN, |z| z.upper);
    let width = |i: usize| report.entries[i].focus_gap().map_or(f64::NAN, |g| g.width);
    let before = (upper2(0) - 4.0).abs();
    let at = (upper2(1) - 4.0).abs();
    let ok = width(1) < 1e-3 && at < 1e-3 && before > 1e-3 && width(2) > s.tolerances.gap_tol;
    ensure(
        ok,
        format!(
            "V° = −4: gap 2-3 closes at ΔE* = {t_star:.5} with width {:.2e} and |E_up(zone 2) − 4| = {at:.2e}; \
             0.1 earlier the edge is {before:.3} away; 0.2 later the gap is {:.3}",
            width(1),
            width(2)
        ),
    )
}

fn closed_form_vs_ode() -> Check {
    let res = transforms::level_shift_on(4.0, 2, 1.0, DEFAULT_GRID_SIZE).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut energies = Vec::new();
    while energies.len() < 5 {
        let e: f64 = rng.random_range(0.5..20.0);
        if (e - 4.0).abs() > 0.1 {
            energies.push(e);
        }
    }
    let xs = linspace(0.0, PI, 201);
    let mut worst = 0.0f64;
    for &e in &energies {
        let cf: Vec<(f64, f64)> = xs
            .iter()
            .map(|&x| transforms::level_shift_solution_with(&res, e, FreeBase::Sine, x))
            .collect::<zoneforge::Result<_>>()
            .map_err(|err| err.to_string())?;
        let ode = shooting::integrate_solution(&res.potential, e, &xs, [cf[0].0, cf[0].1]).map_err(|err| err.to_string())?;
        for (a, b) in cf.iter().zip(&ode) {
            worst = worst.max((a.0 - b[0]).abs());
        }
    }
    let list: Vec<String> = energies.iter().map(|e| format!("{e:.3}")).collect();
    ensure(worst < 1e-6, format!("(n, t) = (2, 1), E = {}: sup |ψ_cf − ψ_ode| = {worst:.2e} (tol 1e-6)", list.join(", ")))
}

fn weight_change_isospectral() -> Check {
    let err = |e: zoneforge::Error| e.to_string();
    let base = CellPotential::comb(4.0);
    let id = transforms::weight_change(&base, WeightAnchor::WellLevel(2), 1.0).map_err(err)?;
    let identical = id.potential.samples().zip(base.samples()).all(|(a, b)| a == b);
    let mut worst = 0.0f64;
    for m in [1, 2] {
        for r in [0.5, 2.0, 4.0] {
            let res = transforms::weight_change(&base, WeightAnchor::WellLevel(m), r).map_err(err)?;
            let levels = shooting::dirichlet_levels(&res.potential, 6, 0.0).map_err(err)?;
            for (k, e) in levels.iter().enumerate() {
                worst = worst.max((e - ((k + 1) * (k + 1)) as f64).abs());
            }
        }
    }
    ensure(
        identical && worst < 1e-6,
        format!("ratio 1 reproduces the base: {identical}; anchors m ∈ {{1, 2}}, ratios {{0.5, 2, 4}}: max |E_k − k²| = {worst:.2e} (tol 1e-6)"),
    )
}

fn fig1d_monotone() -> Check {
    let err = |e: zoneforge::Error| e.to_string();
    let report = sweep::run_fig1d(&[1.0, 2.0, 4.0]).map_err(err)?;
    let imk: Vec<f64> = report.entries.iter().map(|e| e.im_k_at_point().unwrap_or(f64::NAN)).collect();
    let bare = floquet::imag_quasimomentum(&CellPotential::comb(4.0), 2.0).map_err(err)?;
    let identity = (imk[0] - bare).abs();
    ensure(
        imk[0] < imk[1] && imk[1] < imk[2] && identity < 1e-9,
        format!(
            "Im K(2) at ratios 1, 2, 4 = {:.6}, {:.6}, {:.6}; |ratio-1 − bare| = {identity:.2e} (tol 1e-9)",
            imk[0], imk[1], imk[2]
        ),
    )
}

fn growth_law() -> Check {
    let p = CellPotential::comb(4.0);
    let mut worst = 0.0f64;
    for e in [0.3, 2.0, 10.0] {
        let m = floquet::monodromy(&p, e).map_err(|err| err.to_string())?;
        let imk = floquet::im_k_from_discriminant(m.half_trace());
        let mut v = [1.0, 0.37];
        // burn-in aligns the vector with the growing Floquet direction
        for _ in 0..5 {
            v = m.apply(v);
        }
        let start = v[0].hypot(v[1]);
        for _ in 0..10 {
            v = m.apply(v);
        }
        let growth = v[0].hypot(v[1]) / start;
        let expected = (10.0 * PI * imk).exp();
        worst = worst.max((growth / expected - 1.0).abs());
    }
    ensure(worst < 0.01, format!("E ∈ {{0.3, 2, 10}}: max relative deviation from exp(10π Im K) = {worst:.2e} (tol 1%)"))
}

fn archive_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
}

fn symmetry_report() -> Check {
    let err = |e: zoneforge::Error| e.to_string();
    let pairs = [ShiftSpec { n: 1, t: 0.5 }, ShiftSpec { n: 2, t: 0.5 }, ShiftSpec { n: 3, t: 0.5 }];
    let a = sweep::run_symmetry_experiment(&pairs).map_err(err)?;
    let b = sweep::run_symmetry_experiment(&pairs).map_err(err)?;
    let path = archive_dir().join("symmetry_report.json");
    sweep::write_report(&a, &path, ReportFormat::Json).map_err(err)?;
    let back = sweep::read_report_json(&path).map_err(err)?;
    let sym = a.symmetry.as_ref().ok_or("no symmetry section")?;
    let complete = sym.distances.iter().flatten().all(Option::is_some);
    let d = |i: usize, j: usize| sym.distances[i][j].unwrap_or(f64::NAN);
    let verdict = if sym.all_coincide { "confirmed" } else { "refuted" };
    ensure(
        complete && a == b && back == a,
        format!(
            "distances d12 = {:.3e}, d13 = {:.3e}, d23 = {:.3e}; coincidence at 1e-6 {verdict}; reproducible: {}; archived at {}",
            d(0, 1),
            d(0, 2),
            d(1, 2),
            a == b && back == a,
            path.display()
        ),
    )
}

fn determinism() -> Check {
    let err = |e: zoneforge::Error| e.to_string();
    let deltas = [0.5, 1.0, 2.0, 3.0, 3.9];
    let dir = archive_dir();
    let (p1, p2) = (dir.join("fig1a_run1.csv"), dir.join("fig1a_run2.csv"));
    sweep::write_report(&sweep::run_fig1a(&deltas).map_err(err)?, &p1, ReportFormat::Csv).map_err(err)?;
    sweep::write_report(&sweep::run_fig1a(&deltas).map_err(err)?, &p2, ReportFormat::Csv).map_err(err)?;
    let a = std::fs::read(&p1).map_err(|e| e.to_string())?;
    let b = std::fs::read(&p2).map_err(|e| e.to_string())?;
    ensure(a == b && !a.is_empty(), format!("two fig1a sweeps: {} bytes each, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("Kronig-Penney oracle equivalence", kronig_penney_oracle),
        ("band-edge identity", band_edge_identity),
        ("isospectrality except one level", isospectral_except_one),
        ("Fig. 1a merge event", fig1a_merge),
        ("Fig. 1b merge event", fig1b_merge),
        ("Fig. 1c merge event", fig1c_merge),
        ("closed form vs ODE", closed_form_vs_ode),
        ("weight-change isospectrality and identity", weight_change_isospectral),
        ("Fig. 1d monotonicity", fig1d_monotone),
        ("Floquet growth law", growth_law),
        ("symmetry experiment report", symmetry_report),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} [{secs:.1}s]: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
