use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde_json::json;

use siegel::arith::{
    calibrate_t, continued_fraction, CalibrationOptions, RigidFamily, RotationAngle,
};
use siegel::blaschke::{classify_c5, solve_blaschke, standard_f_theta, Marking};
use siegel::boettcher::{phi, phi_asymptotic, phi_winding};
use siegel::cubic::{classify_cubic, linearizer, ClassifyOptions, CubicMap};
use siegel::render::{
    orbit_dump, parse_complex, parse_config, render_julia, render_parameter_blaschke,
    render_parameter_cubic, CellCode, Config, MapSpec, Raster, RenderOptions, Window,
};
use siegel::surgery::{
    beltrami_sample, circle_conjugacy, default_step, DiskExtension, DEFAULT_ORDER,
};
use siegel::Error;

/// Siegel-disk cubics and their Blaschke models.
#[derive(Parser)]
#[command(name = "siegel", version)]
struct Cli {
    /// `key=value` file supplying defaults for any flag (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction digits, convergents and Brjuno sums.
    Theta {
        #[arg(long)]
        value: Option<String>,
        #[arg(long)]
        digits: Option<String>,
    },
    /// Rotation factor t giving rotation number θ on the circle.
    TOfTheta {
        /// `standard` or `rigid`.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    ClassifyCubic {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        iters: Option<String>,
    },
    /// Linearizer series and its capacity estimate.
    Capacity {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        order: Option<String>,
    },
    SolveBlaschke {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    ClassifyC5 {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        iters: Option<String>,
    },
    Phi {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        s: Option<String>,
    },
    PhiWinding {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        radius: Option<String>,
        #[arg(long)]
        samples: Option<String>,
    },
    /// Extension, modified map and Beltrami samples on a polar grid.
    SurgeryProbe {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        orbit: Option<String>,
        #[arg(long)]
        grid: Option<String>,
    },
    RenderM3(RenderArgs),
    RenderC5(RenderArgs),
    RenderJulia {
        #[command(flatten)]
        render: RenderArgs,
        /// `cubic`, `quadratic` or `blaschke`.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        mu: Option<String>,
    },
    /// Orbit as JSON lines.
    Orbit {
        #[arg(long)]
        theta: Option<String>,
        /// `cubic`, `quadratic`, `blaschke` or `rigid`.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long)]
        z0: Option<String>,
        #[arg(long)]
        iters: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    theta: Option<String>,
    /// `cx,cy,w,h`.
    #[arg(long)]
    window: Option<String>,
    /// `nx,ny`.
    #[arg(long)]
    res: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    /// P6 PPM output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    png: Option<PathBuf>,
    /// Per-cell JSON lines.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Render on a single thread.
    #[arg(long)]
    serial: bool,
}

/// How a successful run ended.
enum Outcome {
    Complete,
    Partial,
}

struct Settings {
    config: Config,
}

impl Settings {
    fn raw(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.config.get(key).cloned())
    }

    fn value<T: FromStr>(&self, flag: &Option<String>, key: &str, default: Option<T>) -> Result<T>
    where
        T::Err: Display,
    {
        match self.raw(flag, key) {
            Some(s) => s
                .trim()
                .parse::<T>()
                .map_err(|e| anyhow!("--{key} `{s}`: {e}")),
            None => default.ok_or_else(|| anyhow!("missing --{key}")),
        }
    }

    fn complex(&self, flag: &Option<String>, key: &str) -> Result<Complex<f64>> {
        let s = self
            .raw(flag, key)
            .ok_or_else(|| anyhow!("missing --{key}"))?;
        Ok(parse_complex(&s)?)
    }

    fn path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone()
            .or_else(|| self.config.get(key).map(PathBuf::from))
    }

    fn theta(&self, flag: &Option<String>) -> Result<RotationAngle> {
        let s = self.raw(flag, "theta").unwrap_or_else(|| "golden".into());
        parse_theta(&s, 40, true)
    }
}

/// `golden`, `silver`, `cf:a1,a2,...`, or a decimal in (0,1). A decimal is
/// expanded exactly; with `lenient`, an expansion that terminates early keeps
/// the digits it has.
fn parse_theta(text: &str, digits: usize, lenient: bool) -> Result<RotationAngle> {
    let text = text.trim();
    match text {
        "golden" if lenient => return Ok(RotationAngle::golden()),
        "silver" if lenient => return Ok(RotationAngle::silver()),
        "golden" => return Ok(RotationAngle::from_digits(&vec![1; digits])?),
        "silver" => return Ok(RotationAngle::from_digits(&vec![2; digits])?),
        _ => {}
    }
    if let Some(list) = text.strip_prefix("cf:") {
        let d = list
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .context("continued-fraction digits")?;
        return Ok(RotationAngle::from_digits(&d)?);
    }
    let x: f64 = text
        .parse()
        .map_err(|_| anyhow!("cannot parse theta `{text}`"))?;
    match continued_fraction(&x, digits) {
        Err(Error::RationalInput(k)) if lenient && k >= 2 => Ok(continued_fraction(&x, k)?),
        other => Ok(other?),
    }
}

fn pair(z: Complex<f64>) -> serde_json::Value {
    json!([z.re, z.im])
}

fn emit(out: &mut impl Write, value: serde_json::Value) -> Result<()> {
    writeln!(out, "{value}")?;
    Ok(())
}

fn theta_cmd(
    s: &Settings,
    value: &Option<String>,
    digits: &Option<String>,
    out: &mut impl Write,
) -> Result<Outcome> {
    let n: usize = s.value(digits, "digits", Some(10))?;
    let text = s
        .raw(value, "value")
        .ok_or_else(|| anyhow!("missing --value"))?;
    let angle = parse_theta(&text, n, false)?;
    let brjuno = angle.brjuno_partial_sums();
    emit(
        out,
        json!({ "value": angle.value(), "digits": angle.digits(), "max_digit": angle.digits().iter().max() }),
    )?;
    for (k, (&a, &(p, q))) in angle.digits().iter().zip(angle.convergents()).enumerate() {
        emit(
            out,
            json!({ "k": k + 1, "a": a, "p": p.to_string(), "q": q.to_string(), "brjuno": brjuno.get(k) }),
        )?;
    }
    Ok(Outcome::Complete)
}

fn write_raster(
    s: &Settings,
    args: &RenderArgs,
    raster: &Raster,
    out: &mut impl Write,
) -> Result<Outcome> {
    let ppm = s
        .path(&args.out, "out")
        .ok_or_else(|| anyhow!("missing --out"))?;
    std::fs::write(&ppm, raster.to_ppm()).with_context(|| format!("writing {}", ppm.display()))?;
    if let Some(png) = s.path(&args.png, "png") {
        let w = raster.window;
        let img = image::RgbImage::from_raw(w.nx as u32, w.ny as u32, raster.rgb())
            .ok_or_else(|| anyhow!("raster size mismatch"))?;
        img.save(&png)
            .with_context(|| format!("writing {}", png.display()))?;
    }
    if let Some(dump) = s.path(&args.dump, "dump") {
        let file = BufWriter::new(
            File::create(&dump).with_context(|| format!("creating {}", dump.display()))?,
        );
        raster.write_json_lines(file)?;
    }
    let counts: serde_json::Map<String, serde_json::Value> = CellCode::ALL
        .iter()
        .filter_map(|&c| {
            let n = raster.count(c);
            (n > 0).then(|| (format!("{c:?}"), json!(n)))
        })
        .collect();
    emit(
        out,
        json!({ "out": ppm, "cells": raster.cells.len(), "failures": raster.meta.failures, "fallbacks": raster.meta.fallbacks, "counts": counts }),
    )?;
    Ok(if raster.meta.failures > 0 {
        Outcome::Partial
    } else {
        Outcome::Complete
    })
}

fn render_setup(
    s: &Settings,
    args: &RenderArgs,
) -> Result<(RotationAngle, Window, usize, RenderOptions)> {
    let theta = s.theta(&args.theta)?;
    let window = s
        .raw(&args.window, "window")
        .ok_or_else(|| anyhow!("missing --window"))?;
    let res = s.raw(&args.res, "res").unwrap_or_else(|| "256,256".into());
    let window = Window::parse(&window, &res)?;
    let iters = s.value(&args.iters, "iters", Some(2000usize))?;
    let serial = args.serial || s.config.get("serial").is_some_and(|v| v == "true");
    Ok((
        theta,
        window,
        iters,
        RenderOptions {
            parallel: !serial,
            ..RenderOptions::default()
        },
    ))
}

fn map_spec(
    s: &Settings,
    map: &Option<String>,
    c: &Option<String>,
    mu: &Option<String>,
) -> Result<MapSpec> {
    let kind = s.raw(map, "map").unwrap_or_else(|| "cubic".into());
    Ok(match kind.as_str() {
        "cubic" => MapSpec::Cubic {
            c: s.complex(c, "c")?,
        },
        "quadratic" => MapSpec::Quadratic,
        "blaschke" => MapSpec::Blaschke {
            mu: s.complex(mu, "mu")?,
        },
        "rigid" => MapSpec::Rigid,
        other => bail!("unknown map `{other}`"),
    })
}

fn marking_name(m: Marking) -> &'static str {
    match m {
        Marking::Outside => "outside",
        Marking::Inside => "inside",
        Marking::Circle => "circle",
    }
}

fn surgery_probe(
    s: &Settings,
    theta: RotationAngle,
    mu: Complex<f64>,
    orbit: usize,
    grid: usize,
    out: &mut impl Write,
) -> Result<Outcome> {
    let params = solve_blaschke(mu, &theta, 1e-10)?;
    let h = circle_conjugacy(&params, orbit)?;
    let lift = params.map().circle_lift();
    let order = s.value(&None, "order", Some(DEFAULT_ORDER))?;
    emit(
        out,
        json!({
            "t": params.t, "p": pair(params.p), "q": pair(params.q), "table": h.len(),
            "midpoint_residual": h.midpoint_residual(&lift), "mean_residual": h.mean_probe_residual(&lift, 997),
        }),
    )?;
    let ext = DiskExtension::new(h, order);
    let mut failed = false;
    for i in 0..grid {
        for j in 0..grid {
            let r = 0.95 * (i as f64 + 0.5) / grid as f64;
            let w = Complex::from_polar(r, std::f64::consts::TAU * j as f64 / grid as f64);
            match beltrami_sample(&ext, w, default_step(w)) {
                Ok(b) => emit(
                    out,
                    json!({ "w": pair(w), "H": pair(b.h), "mu": pair(b.mu), "K": b.dilatation }),
                )?,
                Err(e) => {
                    failed = true;
                    emit(out, json!({ "w": pair(w), "error": e.to_string() }))?;
                }
            }
        }
    }
    Ok(if failed {
        Outcome::Partial
    } else {
        Outcome::Complete
    })
}

fn run(cli: Cli, out: &mut impl Write) -> Result<Outcome> {
    let config = match &cli.config {
        Some(p) => parse_config(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => Config::new(),
    };
    let s = Settings { config };
    match &cli.command {
        Command::Theta { value, digits } => theta_cmd(&s, value, digits, out),
        Command::TOfTheta { family, theta, tol } => {
            let theta = s.theta(theta)?;
            let tol = s.value(tol, "tol", Some(1e-10))?;
            let family = s.raw(family, "family").unwrap_or_else(|| "standard".into());
            let cal = match family.as_str() {
                "standard" => standard_f_theta::<f64>(&theta, tol)?,
                "rigid" => calibrate_t::<f64, _>(
                    &RigidFamily,
                    &theta,
                    tol,
                    &CalibrationOptions {
                        allow_fine_tolerance: true,
                        ..Default::default()
                    },
                )?,
                other => bail!("unknown family `{other}`"),
            };
            emit(
                out,
                json!({ "family": family, "theta": theta.value(), "t": cal.t, "bracket": [cal.bracket.0, cal.bracket.1], "rho_bound": cal.rho_bound, "steps": cal.steps }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::ClassifyCubic { theta, c, iters } => {
            let theta = s.theta(theta)?;
            let c = s.complex(c, "c")?;
            let iters = s.value(iters, "iters", Some(2000usize))?;
            let class = classify_cubic(
                &CubicMap::new(&theta, c)?,
                iters,
                &ClassifyOptions::default(),
            );
            emit(
                out,
                json!({ "c": pair(c), "class": class, "in_locus": class.in_locus() }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::Capacity { theta, c, order } => {
            let theta = s.theta(theta)?;
            let c = s.complex(c, "c")?;
            let order = s.value(order, "order", Some(256usize))?;
            let map = CubicMap::new(&theta, c)?;
            let series = linearizer(&map, order)?;
            emit(
                out,
                json!({ "c": pair(c), "order": series.order(), "capacity": series.capacity, "truncated": series.truncated, "residual": series.functional_residual(&map) }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::SolveBlaschke { theta, mu, tol } => {
            let theta = s.theta(theta)?;
            let mu = s.complex(mu, "mu")?;
            let tol = s.value(tol, "tol", Some(siegel::blaschke::DEFAULT_T_TOL))?;
            let p = solve_blaschke(mu, &theta, tol)?;
            emit(
                out,
                json!({
                    "mu": pair(mu), "t": p.t, "p": pair(p.p), "q": pair(p.q), "residuals": p.residuals,
                    "marking": marking_name(p.marking), "rho_bound": p.calibration.rho_bound,
                }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::ClassifyC5 { theta, mu, iters } => {
            let theta = s.theta(theta)?;
            let mu = s.complex(mu, "mu")?;
            let iters = s.value(iters, "iters", Some(2000usize))?;
            let class = classify_c5(mu, &theta, iters)?;
            emit(
                out,
                json!({ "mu": pair(mu), "class": class, "member": class.is_member() }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::Phi { theta, s: sv } => {
            let theta = s.theta(theta)?;
            let sv = s.complex(sv, "s")?;
            let budget = s.value(&None, "budget", Some(2000usize))?;
            let value = phi(&theta, sv, budget)?;
            emit(
                out,
                json!({ "s": pair(sv), "phi": pair(value), "abs": value.norm(), "asymptotic": pair(phi_asymptotic(&theta, sv)) }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::PhiWinding {
            theta,
            radius,
            samples,
        } => {
            let theta = s.theta(theta)?;
            let radius: f64 = s.value(radius, "radius", None)?;
            let samples = s.value(samples, "samples", Some(1024usize))?;
            let degree = phi_winding(&theta, radius, samples, 2000)?;
            emit(
                out,
                json!({ "radius": radius, "samples": samples, "degree": degree }),
            )?;
            Ok(Outcome::Complete)
        }
        Command::SurgeryProbe {
            theta,
            mu,
            orbit,
            grid,
        } => {
            let theta = s.theta(theta)?;
            let mu = s.complex(mu, "mu")?;
            let orbit = s.value(orbit, "orbit", Some(4096usize))?;
            let grid = s.value(grid, "grid", Some(10usize))?;
            surgery_probe(&s, theta, mu, orbit, grid, out)
        }
        Command::RenderM3(args) => {
            let (theta, window, iters, opts) = render_setup(&s, args)?;
            write_raster(
                &s,
                args,
                &render_parameter_cubic::<f64>(&theta, &window, iters, &opts),
                out,
            )
        }
        Command::RenderC5(args) => {
            let (theta, window, iters, opts) = render_setup(&s, args)?;
            write_raster(
                &s,
                args,
                &render_parameter_blaschke::<f64>(&theta, &window, iters, &opts),
                out,
            )
        }
        Command::RenderJulia { render, map, c, mu } => {
            let (theta, window, iters, opts) = render_setup(&s, render)?;
            let spec = map_spec(&s, map, c, mu)?;
            write_raster(
                &s,
                render,
                &render_julia::<f64>(&theta, &spec, &window, iters, &opts)?,
                out,
            )
        }
        Command::Orbit {
            theta,
            map,
            c,
            mu,
            z0,
            iters,
            out: path,
        } => {
            let theta = s.theta(theta)?;
            let spec = map_spec(&s, map, c, mu)?;
            let z0 = match s.raw(z0, "z0") {
                Some(t) => parse_complex(&t)?,
                None => match spec {
                    MapSpec::Cubic { .. } => Complex::new(1.0, 0.0),
                    MapSpec::Quadratic => -theta.multiplier::<f64>() * 0.5,
                    MapSpec::Blaschke { mu } => mu,
                    MapSpec::Rigid => Complex::new(0.5, 0.0),
                },
            };
            let n = s.value(iters, "iters", Some(1000usize))?;
            let dump = orbit_dump::<f64>(&theta, &spec, z0, n)?;
            match s.path(path, "out") {
                Some(p) => dump.write_json_lines(BufWriter::new(create(&p)?))?,
                None => dump.write_json_lines(&mut *out)?,
            }
            Ok(Outcome::Complete)
        }
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(Outcome::Complete), Ok(())) => ExitCode::SUCCESS,
        (Ok(Outcome::Partial), Ok(())) => ExitCode::from(2),
        (Err(e), _) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        (_, Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
