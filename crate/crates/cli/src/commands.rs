use num_complex::Complex;
use rayon::prelude::*;

use toric_zeros::character::{character_1d_todd, character_exact, geometric_sum};
use toric_zeros::ensemble::{empirical_zero_stats, facet_polytope};
use toric_zeros::momentmap::{NormalSolver, Region, TorusPoint};
use toric_zeros::szego::{convergence_profile, SzegoKernel};
use toric_zeros::zerocurrent::oracle::ExampleId;
use toric_zeros::zerocurrent::{bk_volume_check, psi_density_with, PsiOptions};
use toric_zeros::{Error, LatticePolytope};

use crate::config::{Command, ExperimentConfig};
use crate::error::CliError;
use crate::table::{num, Table};

fn load(config: &ExperimentConfig) -> Result<LatticePolytope, CliError> {
    let path = config.polytope_path.as_deref().unwrap_or_default();
    LatticePolytope::load(path).map_err(|e| CliError::Config(format!("cannot load polytope {path}: {e}")))
}

fn solver<'a>(poly: &'a LatticePolytope, config: &ExperimentConfig) -> Result<NormalSolver<'a, f64>, CliError> {
    let s = NormalSolver::new(poly).map_err(|e| CliError::Config(format!("polytope not usable for the decay solver: {e}")))?;
    Ok(match config.tolerances.transition {
        Some(t) => s.with_transition_tol(t),
        None => s,
    })
}

fn psi_options(config: &ExperimentConfig) -> PsiOptions<f64> {
    let d = PsiOptions::default();
    PsiOptions {
        step: config.tolerances.fd_step.unwrap_or(d.step),
        rank_threshold: config.tolerances.rank_threshold.unwrap_or(d.rank_threshold),
    }
}

fn rho_columns(m: usize) -> Vec<String> {
    (1..=m).map(|j| format!("rho_{j}")).collect()
}

fn at(rho: &[f64]) -> String {
    format!("rho = {rho:?}")
}

/// Evaluates `f` on every grid point in parallel and keeps grid order; the
/// first failure in grid order is reported.
fn grid_rows<F>(config: &ExperimentConfig, m: usize, f: F) -> Result<Vec<Vec<String>>, CliError>
where
    F: Fn(&[f64]) -> Result<Vec<String>, Error> + Sync,
{
    let pts = config.grid.as_ref().expect("validated").points(m);
    let rows: Vec<Result<Vec<String>, CliError>> = pts
        .par_iter()
        .map(|rho| {
            let mut row: Vec<String> = rho.iter().map(|&x| num(x)).collect();
            row.extend(f(rho).map_err(|e| CliError::numeric(at(rho), e))?);
            Ok(row)
        })
        .collect();
    rows.into_iter().collect()
}

pub fn execute(config: &ExperimentConfig) -> Result<Table, CliError> {
    config.validate()?;
    match config.command {
        Command::PolytopeInfo => polytope_info(config),
        Command::PolytopeEhrhart => polytope_ehrhart(config),
        Command::BpGrid => bp_grid(config),
        Command::RegionGrid => region_grid(config),
        Command::SzegoConverge => szego_converge(config),
        Command::SzegoMassGrid => szego_mass_grid(config),
        Command::CharacterTable => character_table(config),
        Command::CharacterTodd1d => character_todd1d(config),
        Command::PsiGrid => psi_grid(config, false),
        Command::PsiRankMap => psi_grid(config, true),
        Command::PsiBkCheck => psi_bk_check(config),
        Command::EnsembleM1 => ensemble_m1(config),
        Command::EnsembleTentacles => ensemble_tentacles(config),
    }
}

fn polytope_info(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let mut t = Table::new(["face_id", "dim", "active_set", "vertices"]);
    t.note("m", poly.ambient_dim());
    t.note("p", poly.degree_bound());
    t.note("dim", poly.dim());
    t.note("volume", poly.volume());
    t.note("simple", poly.is_simple());
    t.note("lattice_points", poly.count_points(1));
    for h in poly.halfspaces() {
        t.note("halfspace", format!("{:?}·x + {} ≥ 0", h.normal, h.offset));
    }
    for f in poly.faces() {
        let active: Vec<String> = f.active_set.iter().map(|j| j.to_string()).collect();
        let verts: Vec<String> = f
            .vertex_indices
            .iter()
            .map(|&i| {
                let v: Vec<String> = poly.vertices()[i].iter().map(|x| x.to_string()).collect();
                v.join(" ")
            })
            .collect();
        t.push(vec![f.id.to_string(), f.dim.to_string(), active.join(" "), verts.join(";")]);
    }
    Ok(t)
}

fn polytope_ehrhart(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let fit = poly.ehrhart_fit().map_err(|e| CliError::numeric("Ehrhart fit", e))?;
    let d = fit.len() - 1;
    let mut t = Table::new(["power", "coefficient"]);
    t.note(
        "coefficients",
        fit.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
    );
    for (k, c) in fit.iter().enumerate() {
        t.push(vec![(d - k).to_string(), c.to_string()]);
    }
    Ok(t)
}

fn bp_grid(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let m = poly.ambient_dim();
    let s = solver(&poly, config)?;
    let mut cols = rho_columns(m);
    cols.extend(["b", "face_id", "face_dim", "transition"].map(String::from));
    cols.extend((1..=m).map(|j| format!("q_{j}")));
    cols.extend((1..=m).map(|j| format!("tau_{j}")));
    let mut t = Table::new(cols);
    t.rows = grid_rows(config, m, |rho| {
        let nd = s.solve(&TorusPoint::from_rho(rho.to_vec()))?;
        let mut row = vec![num(nd.b), nd.face_id.to_string(), nd.face_dim.to_string(), nd.transition_flag.to_string()];
        row.extend(nd.q.iter().map(|&x| num(x)));
        row.extend(nd.tau.iter().map(|&x| num(x)));
        Ok(row)
    })?;
    Ok(t)
}

fn region_grid(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let m = poly.ambient_dim();
    let s = solver(&poly, config)?;
    let mut cols = rho_columns(m);
    cols.extend(["region", "face_id", "face_dim"].map(String::from));
    let mut t = Table::new(cols);
    t.rows = grid_rows(config, m, |rho| {
        let nd = s.solve(&TorusPoint::from_rho(rho.to_vec()))?;
        let region = s.region_of(&nd);
        Ok(vec![region.label(), nd.face_id.to_string(), nd.face_dim.to_string()])
    })?;
    Ok(t)
}

fn szego_converge(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let rho = config.point.clone().expect("validated");
    if rho.len() != poly.ambient_dim() {
        return Err(CliError::Config(format!("point has {} coordinates, polytope needs {}", rho.len(), poly.ambient_dim())));
    }
    let z = TorusPoint::from_rho(rho.clone());
    let ns = config.n_list.clone().expect("validated");
    let prof = convergence_profile(&poly, &z, &ns).map_err(|e| CliError::numeric(at(&rho), e))?;
    let mut cols = vec!["N".to_string()];
    cols.extend(rho_columns(rho.len()));
    cols.extend(["log_pi", "mass", "u_N", "u_inf", "residual"].map(String::from));
    let mut t = Table::new(cols);
    for e in prof {
        let mut row = vec![e.n.to_string()];
        row.extend(rho.iter().map(|&x| num(x)));
        row.extend([num(e.log_pi), num(e.mass()), num(e.u_n), num(e.u_inf), num(e.residual())]);
        t.push(row);
    }
    Ok(t)
}

fn szego_mass_grid(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let m = poly.ambient_dim();
    let scale = {
        let v = poly.volume();
        *v.numer() as f64 / *v.denom() as f64 / (poly.degree_bound() as f64).powi(m as i32)
    };
    let mut cols = rho_columns(m);
    cols.extend(["N", "mass", "mass_scaled"].map(String::from));
    let mut t = Table::new(cols);
    t.note("mass_scaled", "mass · Vol(P) / p^m, tending to 1 on the allowed region");
    let pts = config.grid.as_ref().expect("validated").points(m);
    let zs: Vec<TorusPoint<f64>> = pts.iter().map(|r| TorusPoint::from_rho(r.clone())).collect();
    for &n in config.n_list.as_ref().expect("validated") {
        let k = SzegoKernel::<f64>::new(&poly, n).map_err(|e| CliError::numeric(format!("N = {n}"), e))?;
        let logs = k.log_pi_grid(&zs);
        for (rho, l) in pts.iter().zip(logs) {
            let mass = (l - k.log_count()).exp();
            let mut row: Vec<String> = rho.iter().map(|&x| num(x)).collect();
            row.extend([n.to_string(), num(mass), num(mass * scale)]);
            t.push(row);
        }
    }
    Ok(t)
}

fn complex_w(config: &ExperimentConfig) -> Vec<Complex<f64>> {
    config
        .w
        .as_ref()
        .expect("validated")
        .iter()
        .map(|&[re, im]| Complex::new(re, im))
        .collect()
}

fn character_table(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let w = complex_w(config);
    if w.len() != poly.ambient_dim() {
        return Err(CliError::Config(format!("w has {} entries, polytope needs {}", w.len(), poly.ambient_dim())));
    }
    let support = poly
        .vertices()
        .iter()
        .map(|v| v.iter().zip(&w).map(|(&k, x)| k as f64 * x.re).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut t = Table::new(["N", "re", "im", "log_abs", "arg", "support_gap"]);
    t.note("support_re_w", num(support));
    for &n in config.n_list.as_ref().expect("validated") {
        let e = character_exact(&poly, n, &w).map_err(|e| CliError::numeric(format!("N = {n}"), e))?;
        t.push(vec![
            n.to_string(),
            num(e.value.re),
            num(e.value.im),
            num(e.log_value.re),
            num(e.log_value.im),
            num((e.log_value.re / n as f64 - support).abs()),
        ]);
    }
    Ok(t)
}

fn character_todd1d(config: &ExperimentConfig) -> Result<Table, CliError> {
    let [a, b] = config.interval.expect("validated");
    let n = config.n.expect("validated");
    let w = complex_w(config)[0];
    let max_order = config.max_order.unwrap_or(12);
    let exact = geometric_sum(n * a, n * b, w);
    let mut t = Table::new(["order", "re", "im", "exact_re", "exact_im", "abs_error"]);
    for order in 0..=max_order {
        let v = character_1d_todd(a, b, n, w, order).map_err(|e| match e {
            Error::InvalidArgument(msg) => CliError::Config(msg),
            e => CliError::numeric(format!("order {order}"), e),
        })?;
        t.push(vec![order.to_string(), num(v.re), num(v.im), num(exact.re), num(exact.im), num((v - exact).norm())]);
    }
    Ok(t)
}

fn psi_grid(config: &ExperimentConfig, ranks_only: bool) -> Result<Table, CliError> {
    let poly = load(config)?;
    let m = poly.ambient_dim();
    let s = solver(&poly, config)?;
    let opts = psi_options(config);
    let mut cols = rho_columns(m);
    cols.extend(["region", "rank"].map(String::from));
    if !ranks_only {
        cols.extend((1..=m).map(|j| format!("eig_{j}")));
        for j in 1..=m {
            for k in j..=m {
                cols.push(format!("m_{j}{k}"));
            }
        }
    }
    cols.extend(["oracle_rank", "max_abs_diff"].map(String::from));
    let width = cols.len() - m;
    let mut t = Table::new(cols);
    let example = ExampleId::identify(&poly);
    if let Some(ex) = example {
        t.note("oracle", format!("{ex:?}"));
    }
    t.rows = grid_rows(config, m, |rho| {
        let z = TorusPoint::from_rho(rho.to_vec());
        match psi_density_with(&s, &z, opts) {
            Ok(psi) => {
                let mut row = vec![psi.region.label(), psi.rank.to_string()];
                if !ranks_only {
                    row.extend(psi.eigenvalues.iter().map(|&x| num(x)));
                    for j in 0..m {
                        for k in j..m {
                            row.push(num(psi.matrix[j][k]));
                        }
                    }
                }
                match example.map(|ex| ex.psi(&z)) {
                    Some(Ok(o)) => {
                        let diff = (0..m)
                            .flat_map(|j| (0..m).map(move |k| (j, k)))
                            .map(|(j, k)| (psi.matrix[j][k] - o.matrix[j][k]).abs())
                            .fold(0.0, f64::max);
                        row.extend([o.rank.to_string(), num(diff)]);
                    }
                    _ => row.extend([String::new(), String::new()]),
                }
                Ok(row)
            }
            Err(Error::TransitionPoint | Error::StencilStraddles) => {
                let mut row = vec![Region::Transition.label()];
                row.resize(width, String::new());
                Ok(row)
            }
            Err(e) => Err(e),
        }
    })?;
    Ok(t)
}

fn psi_bk_check(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    let res = config.resolution.unwrap_or(32);
    let r = bk_volume_check::<f64>(&poly, res).map_err(|e| match e {
        Error::NotFullDimensional { .. } | Error::OnSimplexBoundary => CliError::Config(e.to_string()),
        e => CliError::numeric(format!("resolution {res}"), e),
    })?;
    let mut t = Table::new(["resolution", "numeric", "exact", "relative_error", "solves"]);
    t.push(vec![res.to_string(), num(r.numeric), r.exact.to_string(), num(r.relative_error()), r.solves.to_string()]);
    Ok(t)
}

fn ensemble_m1(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    if poly.ambient_dim() != 1 {
        return Err(CliError::Config("ensemble m1 needs a polytope with m = 1".into()));
    }
    let (n, samples, seed) = (config.n.unwrap(), config.samples.unwrap(), config.seed.unwrap());
    let s = empirical_zero_stats::<f64>(&poly, n, samples, seed).map_err(|e| CliError::numeric(format!("N = {n}, seed = {seed}"), e))?;
    let mut t = Table::new(["bin_center_in_Σ", "empirical_density", "predicted_density", "predicted_density_finite_N"]);
    t.note("total_roots", s.total_roots);
    t.note("allowed_fraction", num(s.allowed_fraction));
    t.note("allowed_fraction_stderr", num(s.allowed_fraction_stderr()));
    t.note("forbidden_count", s.forbidden_count);
    t.note("transition_count", s.transition_count);
    t.note("resamples", s.resamples);
    t.note("max_backward_error", num(s.max_backward_error));
    t.note("sup_error_limit", num(s.histogram.sup_error()));
    t.note("sup_error_finite_N", num(s.histogram.sup_error_finite_n()));
    let h = &s.histogram;
    for (i, c) in h.centers().into_iter().enumerate() {
        t.push(vec![num(c), num(h.empirical[i]), num(h.predicted[i]), num(h.predicted_finite_n[i])]);
    }
    Ok(t)
}

fn ensemble_tentacles(config: &ExperimentConfig) -> Result<Table, CliError> {
    let poly = load(config)?;
    if poly.ambient_dim() != 2 {
        return Err(CliError::Config("ensemble tentacles needs a polytope with m = 2".into()));
    }
    let (n, samples, seed) = (config.n.unwrap(), config.samples.unwrap(), config.seed.unwrap());
    let facets: Vec<usize> = match config.facet {
        Some(j) if j > 2 => return Err(CliError::Config(format!("facet {j} out of range 0..=2"))),
        Some(j) => vec![j],
        None => vec![0, 1, 2],
    };
    let mut t = Table::new(["facet", "length", "roots_per_sample", "allowed_fraction", "allowed_fraction_stderr"]);
    t.note("facets", "0: x_1 + x_2 = p, 1: x_1 = 0, 2: x_2 = 0");
    for j in facets {
        let facet = match facet_polytope(&poly, j) {
            Ok(f) => f,
            Err(Error::DegenerateFacet) => {
                t.note("skipped_facet", format!("{j} (meets P in at most a point)"));
                continue;
            }
            Err(e) => return Err(CliError::numeric(format!("facet {j}"), e)),
        };
        let s = empirical_zero_stats::<f64>(&facet, n, samples, seed).map_err(|e| CliError::numeric(format!("facet {j}"), e))?;
        t.push(vec![
            j.to_string(),
            facet.volume().to_string(),
            num(s.total_roots as f64 / samples as f64),
            num(s.allowed_fraction),
            num(s.allowed_fraction_stderr()),
        ]);
    }
    Ok(t)
}
