//! End-to-end acceptance checks, one `PASS`/`FAIL` line each. Runs without
//! the libtest harness so the lines always reach stdout.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use siegel::arith::{rotation_number, CircleMapLift, RigidRotation};
use siegel::blaschke::{
    classify_c5, solve_blaschke, solve_critical, solve_critical_all_starts, standard_f_theta,
    SolverOptions,
};
use siegel::boettcher::{boettcher_map, phi, phi_winding, SCubic};
use siegel::cubic::{classify_cubic, ClassifyOptions, CubicPolynomial, OrbitTag};
use siegel::render::{
    render_julia, render_parameter_blaschke, render_parameter_cubic, MapSpec, RenderOptions, Window,
};
use siegel::surgery::{
    beltrami_sample, circle_conjugacy, default_step, CircleConjugacy, DiskExtension, DEFAULT_ORDER,
};
use siegel::{CubicMap64, RotationAngle};

type C = Complex<f64>;

fn report(id: u32, name: &str, pass: bool, detail: String) -> bool {
    println!(
        "{} [{id:02}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn golden() -> RotationAngle {
    RotationAngle::golden()
}

fn lambda() -> C {
    C::from_polar(1.0, TAU * golden().value())
}

/// The marked cubic written out term by term.
fn cubic_oracle(c: C, z: C) -> C {
    let one = C::new(1.0, 0.0);
    lambda() * z * (one - 0.5 * (one + c.inv()) * z + z * z / (3.0 * c))
}

fn random_annulus(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> C {
    let r = rmin * (rmax / rmin).powf(rng.gen::<f64>());
    C::from_polar(r, TAU * rng.gen::<f64>())
}

fn a01_rotation_factor_of_standard_map() -> bool {
    let start = Instant::now();
    let cal = standard_f_theta::<f64>(&golden(), 1e-10).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = (cal.t - 0.613648).abs() <= 1e-4 && secs < 60.0;
    report(
        1,
        "t(golden)",
        pass,
        format!(
            "t = {:.9} (target 0.613648 +- 1e-4), {secs:.2}s (< 60s)",
            cal.t
        ),
    )
}

fn a02_locus_radius() -> bool {
    let start = Instant::now();
    let window = Window::new(C::new(0.0, 0.0), 24.0, 24.0, 64, 64).unwrap();
    let raster = render_parameter_cubic::<f64>(&golden(), &window, 2000, &RenderOptions::default());
    let secs = start.elapsed().as_secs_f64();
    let mut outside = 0;
    let mut in_locus = 0;
    for j in 0..64 {
        for i in 0..64 {
            if raster.cell(i, j).code.in_locus() {
                in_locus += 1;
                let r = window.point(i, j).norm();
                if !(1.0 / 11.27..=11.27).contains(&r) {
                    outside += 1;
                }
            }
        }
    }
    // Far parameters are checked directly since the window cannot reach |c| >= 30.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut far = 0;
    for _ in 0..200 {
        let c = random_annulus(&mut rng, 30.0, 1e4);
        for c in [c, c.inv()] {
            if classify_cubic(
                &CubicMap64::new(&golden(), c).unwrap(),
                2000,
                &ClassifyOptions::default(),
            )
            .in_locus()
            {
                far += 1;
            }
        }
    }
    let pass = outside == 0 && far == 0 && in_locus > 0 && secs < 60.0;
    report(
        2,
        "locus radius",
        pass,
        format!("{in_locus} in-locus pixels, {outside} beyond 11.27 or inside 1/11.27, {far} far in-locus samples, {secs:.2}s (< 60s)"),
    )
}

fn a03_escape_growth() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    for _ in 0..10_000 {
        let c = random_annulus(&mut rng, 1e-3, 1e3);
        let p = CubicMap64::new(&golden(), c).unwrap();
        let m = 4.38 * c.norm().max(1.0);
        let z = C::from_polar(m * (1.0 + 9.0 * rng.gen::<f64>()), TAU * rng.gen::<f64>());
        if p.eval(z).norm() < 1.0148 * z.norm() {
            violations += 1;
        }
    }
    report(
        3,
        "escape growth",
        violations == 0,
        format!("{violations} violations of |P(z)| >= 1.0148|z| over 10^4 samples"),
    )
}

fn a04_marking_swap_conjugacy() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let c = random_annulus(&mut rng, 1e-2, 1e2);
        let z = random_annulus(&mut rng, 1e-2, 10.0);
        let p = CubicMap64::new(&golden(), c).unwrap();
        let q = CubicMap64::new(&golden(), c.inv()).unwrap();
        let lhs = p.eval(z) / c;
        let rhs = q.eval(z / c);
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE));
        let direct = (p.eval(z) - cubic_oracle(c, z)).norm() / p.eval(z).norm();
        worst = worst.max(direct);
    }
    report(
        4,
        "marking swap",
        worst <= 1e-12,
        format!("max relative error {worst:.2e} (<= 1e-12)"),
    )
}

fn a05_superattracting_center() -> bool {
    let center = C::new(3.0, 0.0) - 6.0 * lambda().conj();
    let fixed = (cubic_oracle(center, center) - center).norm();
    let class = classify_cubic(
        &CubicMap64::new(&golden(), center).unwrap(),
        2000,
        &ClassifyOptions::default(),
    );
    let (pass, detail) = match class.tag {
        OrbitTag::HyperbolicLike {
            period, multiplier, ..
        } => (
            multiplier.norm() < 1e-6 && fixed < 1e-12,
            format!(
                "period {period}, |multiplier| {:.2e} (< 1e-6)",
                multiplier.norm()
            ),
        ),
        other => (false, format!("classified {other:?}")),
    };
    report(5, "superattracting center", pass, detail)
}

/// `B′/B` for `e^{2πit} z³ Π (z − a)/(1 − ā z)` over zeros `p, q`.
fn log_derivative_oracle(p: C, q: C, z: C) -> C {
    let one = C::new(1.0, 0.0);
    let mut d = 3.0 / z;
    for a in [p, q] {
        d += 1.0 / (z - a) + a.conj() / (one - a.conj() * z);
    }
    d
}

fn a06_blaschke_solver() -> bool {
    let g = golden();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_res, mut worst_crit, mut worst_spread, mut worst_rho) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_zero = f64::INFINITY;
    let mut few_starts = 0;
    for k in 0..20 {
        let mu = C::from_polar(1.2 + 18.8 * rng.gen::<f64>(), TAU * rng.gen::<f64>());
        let params = solve_blaschke(mu, &g, 1e-10).unwrap();
        worst_res = params
            .residuals
            .iter()
            .fold(worst_res, |m, r| m.max(r.abs()));
        min_zero = min_zero.min(params.p.norm()).min(params.q.norm());
        let one = C::new(1.0, 0.0);
        let h = 1e-5;
        let second = (log_derivative_oracle(params.p, params.q, one + h)
            - log_derivative_oracle(params.p, params.q, one - h))
            / (2.0 * h);
        worst_crit = worst_crit
            .max(log_derivative_oracle(params.p, params.q, mu).norm())
            .max(log_derivative_oracle(params.p, params.q, one).norm())
            .max(second.norm());
        // The first eight of 256 random starts that converge are compared.
        let opts = SolverOptions {
            random_starts: 256,
            seed: 1000 + k,
            ..Default::default()
        };
        let sols = solve_critical_all_starts(mu, &opts).unwrap();
        if sols.len() < 8 {
            few_starts += 1;
        }
        for s in sols.iter().take(8) {
            let reference = siegel::blaschke::CriticalSolution {
                p: params.p,
                q: params.q,
                residual: 0.0,
                steps: 0,
            };
            worst_spread = worst_spread.max(s.distance(&reference));
        }
        let est = rotation_number(&params.map().circle_lift(), 0.0, 1_000_000).unwrap();
        worst_rho = worst_rho.max((est.estimate - est.estimate.floor() - g.value()).abs());
    }
    let pass = worst_res <= 1e-10
        && worst_crit <= 1e-8
        && min_zero > 1.0
        && worst_spread <= 1e-8
        && worst_rho <= 1e-6
        && few_starts == 0;
    report(
        6,
        "blaschke solver",
        pass,
        format!(
            "residual {worst_res:.1e} (<= 1e-10), critical check {worst_crit:.1e}, min |zero| {min_zero:.3} (> 1), \
             8-start spread {worst_spread:.1e} (<= 1e-8, {few_starts} with < 8 converged), rotation error {worst_rho:.1e} (<= 1e-6)"
        ),
    )
}

fn a07_degeneration() -> bool {
    let gaps: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&r| {
            let (sol, _) = solve_critical(C::new(r, 0.0), &SolverOptions::default()).unwrap();
            let near = if sol.p.norm() < sol.q.norm() {
                sol.p
            } else {
                sol.q
            };
            (near - C::new(3.0, 0.0)).norm()
        })
        .collect();
    let pass = gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[1] <= 0.05;
    report(
        7,
        "degeneration",
        pass,
        format!(
            "|q-3| = {:.2e}, {:.2e}, {:.2e} (decreasing, <= 0.05 at 10^3)",
            gaps[0], gaps[1], gaps[2]
        ),
    )
}

fn a08_phi_degree() -> bool {
    let g = golden();
    let degrees: Vec<i64> = [30.0, 50.0, 100.0]
        .iter()
        .map(|&r| phi_winding(&g, r, 1024, 2000).unwrap())
        .collect();
    let l = lambda();
    let mut worst: f64 = 0.0;
    for k in 0..32 {
        let s = C::from_polar(100.0, TAU * k as f64 / 32.0);
        let model = (l / 3.0).sqrt() * (-l / 6.0 * s * s * s + l / 2.0 * s);
        worst = worst.max((phi(&g, s, 2000).unwrap() / model - 1.0).norm());
    }
    let pass = degrees.iter().all(|&d| d == 3) && worst <= 0.05;
    report(
        8,
        "phi degree",
        pass,
        format!("windings {degrees:?} (all 3), asymptotic ratio error {worst:.2e} (<= 0.05)"),
    )
}

fn a09_boettcher_conjugacy() -> bool {
    let g = golden();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = random_annulus(&mut rng, 0.2, 5.0);
        let m = SCubic::new(&g, s).unwrap();
        let z = C::from_polar(
            m.escape_radius() * (1.0 + 20.0 * rng.gen::<f64>()),
            TAU * rng.gen::<f64>(),
        );
        let b = boettcher_map(&m, z, 100).unwrap();
        let b1 = boettcher_map(&m, m.eval(z), 100).unwrap();
        let cube = b * b * b;
        worst = worst.max((b1 - cube).norm() / cube.norm());
    }
    report(
        9,
        "boettcher conjugacy",
        worst <= 1e-8,
        format!("max relative error {worst:.2e} over 10^3 samples (<= 1e-8)"),
    )
}

fn a10_c5_symmetry() -> bool {
    let g = golden();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = 0;
    for _ in 0..50 {
        let mu = random_annulus(&mut rng, 1.05, 8.0);
        let a = classify_c5(mu, &g, 500).unwrap();
        let b = classify_c5(mu.inv(), &g, 500).unwrap();
        if a.is_member() != b.is_member() || a.tag != b.tag {
            mismatches += 1;
        }
    }
    let mut non_members = 0;
    for k in 0..50 {
        let mu = C::from_polar(1.0, TAU * (k as f64 + 0.5) / 50.0);
        if !classify_c5(mu, &g, 500).unwrap().is_member() {
            non_members += 1;
        }
    }
    let pass = mismatches == 0 && non_members == 0;
    report(
        10,
        "c5 symmetry",
        pass,
        format!(
            "{mismatches} of 50 pairs disagree, {non_members} of 50 circle samples are non-members"
        ),
    )
}

fn a11_surgery_probes() -> bool {
    let g = golden();
    let params = solve_blaschke(C::new(2.0, 0.0), &g, 1e-10).unwrap();
    let lift = params.map().circle_lift();

    let h = circle_conjugacy(&params, 4096).unwrap();
    let table: Vec<(f64, f64)> = h.table().collect();
    let monotone = table.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
    // Every orbit point but the last maps onto another table point.
    let mut on_table: f64 = 0.0;
    let mut x = 0.0;
    for _ in 0..table.len() - 1 {
        on_table = on_table.max(h.residual(&lift, x));
        x = siegel::scalar::frac(lift.lift(x));
    }

    let residuals: Vec<f64> = [1024, 2048, 4096, 8192]
        .iter()
        .map(|&n| {
            circle_conjugacy(&params, n)
                .unwrap()
                .mean_probe_residual(&lift, 997)
        })
        .collect();
    let halving = residuals.windows(2).all(|w| w[1] <= 0.5 * w[0]);

    let probes = [
        C::new(0.0, 0.0),
        C::new(0.3, 0.1),
        C::new(-0.5, 0.4),
        C::new(0.1, -0.8),
        C::new(0.9, 0.0),
        C::new(-0.2, -0.95),
    ];
    let identity = DiskExtension::new(CircleConjugacy::identity(g.value(), 4096), 512);
    let id_err = probes
        .iter()
        .map(|&w| (identity.eval(w).unwrap() - w).norm())
        .fold(0.0f64, f64::max);
    let rigid =
        CircleConjugacy::from_lift(&RigidRotation { shift: g.value() }, g.value(), 4096).unwrap();
    let rigid_ext = DiskExtension::new(rigid, 512);
    let rigid_err = probes
        .iter()
        .map(|&w| (rigid_ext.eval(w).unwrap() - w).norm())
        .fold(0.0f64, f64::max);

    let ext = DiskExtension::new(h, DEFAULT_ORDER);
    let a = C::new(0.3, 0.2);
    let mobius = move |z: C| (z - a) / (C::new(1.0, 0.0) - a.conj() * z);
    let natural = probes
        .iter()
        .map(|&w| (ext.eval_composed(w, &mobius).unwrap() - mobius(ext.eval(w).unwrap())).norm())
        .fold(0.0f64, f64::max);

    let mut worst_mu: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let w = C::from_polar(0.05 + 0.09 * i as f64, TAU * j as f64 / 10.0);
            worst_mu = worst_mu.max(beltrami_sample(&ext, w, default_step(w)).unwrap().mu.norm());
        }
    }

    let pass = monotone
        && on_table < 1e-9
        && halving
        && id_err <= 1e-10
        && rigid_err <= 1e-10
        && natural <= 1e-6
        && worst_mu < 1.0;
    report(
        11,
        "surgery probes",
        pass,
        format!(
            "monotone {monotone}, table residual {on_table:.1e}, mean residuals {:?} (each <= half the previous), \
             identity error {id_err:.1e} / rigid {rigid_err:.1e} (<= 1e-10), naturality {natural:.1e} (<= 1e-6), max |mu| {worst_mu:.3} (< 1)",
            residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn a12_determinism() -> bool {
    let g = golden();
    let window = Window::new(C::new(0.0, 0.0), 24.0, 24.0, 48, 40).unwrap();
    let par = RenderOptions::default();
    let ser = RenderOptions {
        parallel: false,
        ..RenderOptions::default()
    };
    let m3 = render_parameter_cubic::<f64>(&g, &window, 1000, &par).to_ppm();
    let m3_again = render_parameter_cubic::<f64>(&g, &window, 1000, &par).to_ppm();
    let m3_serial = render_parameter_cubic::<f64>(&g, &window, 1000, &ser).to_ppm();

    let small = Window::new(C::new(0.5, 0.5), 6.0, 6.0, 16, 12).unwrap();
    let c5 = render_parameter_blaschke::<f64>(&g, &small, 300, &par).to_ppm();
    let c5_serial = render_parameter_blaschke::<f64>(&g, &small, 300, &ser).to_ppm();

    let spec = MapSpec::Blaschke {
        mu: C::new(2.0, 1.0),
    };
    let julia = render_julia::<f64>(&g, &spec, &small, 300, &par)
        .unwrap()
        .to_ppm();
    let julia_serial = render_julia::<f64>(&g, &spec, &small, 300, &ser)
        .unwrap()
        .to_ppm();

    let pass = m3 == m3_again && m3 == m3_serial && c5 == c5_serial && julia == julia_serial;
    report(
        12,
        "determinism",
        pass,
        format!(
            "repeat identical {}, cubic parallel = serial {}, blaschke parameter parallel = serial {}, julia parallel = serial {}",
            m3 == m3_again,
            m3 == m3_serial,
            c5 == c5_serial,
            julia == julia_serial
        ),
    )
}

fn main() {
    let checks: [(u32, fn() -> bool); 12] = [
        (1, a01_rotation_factor_of_standard_map),
        (2, a02_locus_radius),
        (3, a03_escape_growth),
        (4, a04_marking_swap_conjugacy),
        (5, a05_superattracting_center),
        (6, a06_blaschke_solver),
        (7, a07_degeneration),
        (8, a08_phi_degree),
        (9, a09_boettcher_conjugacy),
        (10, a10_c5_symmetry),
        (11, a11_surgery_probes),
        (12, a12_determinism),
    ];
    let mut failed = 0;
    for (id, check) in checks {
        match std::panic::catch_unwind(check) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("FAIL [{id:02}] panicked");
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
