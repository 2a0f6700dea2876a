//! `qii figure1`: isoperimetric quotients of regular polygons in the plane
//! and on the Bloch sphere.

use std::f64::consts::PI;

use qii_core::{
    regular_polygon_quotient, sphere_check, spherical_polygon, spherical_polygon_closed_form, strong_qii, summarize,
};
use serde::{Deserialize, Serialize};

use crate::run::{config_err, CliError, CliResult, Run};
use crate::svg::Axes;

/// Loops are only sampled for polygons up to this many points in total.
const MAX_LOOP_POINTS: usize = 1 << 16;

#[derive(Debug, Clone, Default, Serialize, Deserialize, clap::Args)]
#[serde(default, rename_all = "kebab-case")]
pub struct Figure1Args {
    /// Polar angle of the spherical polygon vertices.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Side counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Samples per edge for the sampled spherical polygons.
    #[arg(long)]
    pub n_per_edge: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1Config {
    pub theta: f64,
    pub n_list: Vec<usize>,
    pub n_per_edge: usize,
}

impl Figure1Args {
    pub fn resolve(&self) -> CliResult<Figure1Config> {
        let c = Figure1Config {
            theta: self.theta.unwrap_or(PI / 4.0),
            n_list: self.n_list.clone().unwrap_or_else(|| vec![3, 4, 5, 6, 8, 12, 16, 32, 64, 10_000]),
            n_per_edge: self.n_per_edge.unwrap_or(64),
        };
        if c.n_list.is_empty() || c.n_list.iter().any(|&n| n < 3) {
            return Err(CliError::Usage("--n-list needs side counts of at least 3".into()));
        }
        if !(c.theta > 0.0 && c.theta < PI) {
            return Err(CliError::Usage(format!("--theta {} outside (0, π)", c.theta)));
        }
        if c.n_per_edge == 0 {
            return Err(CliError::Usage("--n-per-edge must be positive".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Serialize)]
struct PlanarRow {
    n: usize,
    quotient: f64,
}

#[derive(Debug, Clone, Serialize)]
struct SphericalRow {
    n: usize,
    perimeter: f64,
    area: f64,
    quotient: f64,
    margin: f64,
    loop_d_fs: Option<f64>,
    loop_gamma_b: Option<f64>,
    loop_strong_margin: Option<f64>,
}

pub fn run(args: &Figure1Args, out: &Run) -> CliResult<()> {
    let cfg = args.resolve()?;
    out.manifest("figure1", &cfg, None)?;

    let mut planar = Vec::new();
    let mut spherical = Vec::new();
    for &n in &cfg.n_list {
        planar.push(PlanarRow { n, quotient: regular_polygon_quotient(n).map_err(config_err)? });
        // Bloch sphere in the Fubini–Study metric: radius 1/2
        let (p, a) = spherical_polygon_closed_form(n, cfg.theta, 0.5).map_err(config_err)?;
        let rep = sphere_check(p, a, 0.5)?;
        let mut row = SphericalRow {
            n,
            perimeter: p,
            area: a,
            quotient: rep.quotient.unwrap_or(f64::NAN),
            margin: rep.margin,
            loop_d_fs: None,
            loop_gamma_b: None,
            loop_strong_margin: None,
        };
        if n * cfg.n_per_edge <= MAX_LOOP_POINTS {
            let s = summarize(&spherical_polygon(n, cfg.theta, cfg.n_per_edge)?);
            row.loop_d_fs = Some(s.d_fs);
            row.loop_gamma_b = Some(s.gamma_b);
            row.loop_strong_margin = Some(strong_qii(&s).margin);
        }
        spherical.push(row);
    }
    out.table("figure1_planar", &planar)?;
    out.table("figure1_spherical", &spherical)?;

    println!("{:>8}  {:>10}  {:>10}", "N", "planar", "spherical");
    for (p, s) in planar.iter().zip(&spherical) {
        println!("{:>8}  {:>10.6}  {:>10.6}", p.n, p.quotient, s.quotient);
    }

    let lx = |n: usize| (n as f64).log10();
    let xs: Vec<f64> = cfg.n_list.iter().map(|&n| lx(n)).collect();
    let xmax = xs.iter().copied().fold(1.0, f64::max);
    let ymax = planar.iter().map(|r| r.quotient).chain(spherical.iter().map(|r| r.quotient)).fold(1.0, f64::max);
    let ax = Axes::new((lx(3), xmax), (0.9, ymax * 1.05));
    let mut svg = ax.canvas(&format!("inverse isoperimetric quotient, theta = {:.4}", cfg.theta), "log10 N", "quotient");
    let mut order: Vec<usize> = (0..planar.len()).collect();
    order.sort_by_key(|&i| planar[i].n);
    let pp: Vec<_> = order.iter().map(|&i| ax.map(xs[i], planar[i].quotient)).collect();
    let sp: Vec<_> = order.iter().map(|&i| ax.map(xs[i], spherical[i].quotient)).collect();
    svg.polyline(&[ax.map(lx(3), 1.0), ax.map(xmax, 1.0)], "lightgray");
    svg.polyline(&pp, "steelblue");
    svg.polyline(&sp, "darkorange");
    for (&a, &b) in pp.iter().zip(&sp) {
        svg.circle(a, 3.0, "steelblue");
        svg.circle(b, 3.0, "darkorange");
    }
    svg.text((330.0, 70.0), "plane (blue)");
    svg.text((330.0, 86.0), "sphere (orange)");
    svg.save(&out.path("figure1.svg"))?;
    Ok(())
}
