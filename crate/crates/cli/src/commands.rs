use std::sync::Arc;

use hardy_core::acceptance::{self, Preset};
use hardy_core::kernels::{self, Kernels};
use hardy_core::linear::{make_test_functions, solve_linear, weak_residual};
use hardy_core::nonlinear::{self, SolveOptions};
use hardy_core::operator::DiscreteOperator;
use hardy_core::regularizing::{standard_families, verify_regularizing_estimates};
use hardy_core::spectral::{self, boundary_exponent_fit, default_window};
use hardy_core::trace::{classify_trace, ladder, trace_mass};
use hardy_core::{exponents, Field, Grid, HardyError};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::output::Table;

/// Everything a subcommand produces; `failed` marks acceptance failures.
pub struct Outcome {
    pub result: Value,
    pub tables: Vec<Table>,
    pub failed: bool,
}

impl Outcome {
    fn new(result: Value, tables: Vec<Table>) -> Self {
        Self {
            result,
            tables,
            failed: false,
        }
    }
}

type Res = Result<Outcome, HardyError>;

fn grid(c: &ExperimentConfig) -> Result<Arc<Grid>, HardyError> {
    Grid::new(c.domain.spec(), c.domain.grid_options())
}

fn kernels(c: &ExperimentConfig) -> Result<Kernels, HardyError> {
    let op = DiscreteOperator::assemble(&grid(c)?, c.physics.mu, c.physics.shift)?;
    Kernels::from_operator(op)
}

fn solve_options(c: &ExperimentConfig) -> SolveOptions {
    SolveOptions {
        levels: c.run.levels,
        newton_tol: c.run.newton_tol,
        picard_tol: c.run.picard_tol,
        ..Default::default()
    }
}

/// `x, y, delta` and one column per field.
fn field_table(name: &str, fields: &[(&str, &Field)]) -> Table {
    let mut header = vec!["x".to_string(), "y".into(), "delta".into()];
    header.extend(fields.iter().map(|(n, _)| n.to_string()));
    let g = fields[0].1.grid();
    let rows = (0..g.len())
        .map(|i| {
            let p = g.coords()[i];
            let mut r = vec![p[0], p[1], g.deltas()[i]];
            r.extend(fields.iter().map(|(_, f)| f.values()[i]));
            r.into_iter().map(|v| v.to_string()).collect()
        })
        .collect();
    Table::new(name, header, rows)
}

pub fn exponents_cmd(c: &ExperimentConfig) -> Res {
    let e = exponents(c.physics.mu, c.domain.dim)?;
    let result = json!({
        "alpha_plus": e.alpha_plus,
        "alpha_minus": e.alpha_minus,
        "q_crit": e.q_crit,
    });
    Ok(Outcome::new(result, Vec::new()))
}

pub fn spectral_cmd(c: &ExperimentConfig) -> Res {
    let g = grid(c)?;
    let h = spectral::hardy_constant(&g)?;
    let mu = c.physics.mu;
    let ep = spectral::principal_eigenpair(&g, mu)?;
    let window = default_window(&g);
    let fit = boundary_exponent_fit(&ep.phi, window)?;
    let alpha_plus = exponents(mu, c.domain.dim)?.alpha_plus;
    let result = json!({
        "hardy_constant": h,
        "mu": mu,
        "lambda_1": ep.lambda,
        "lambda_2": ep.lambda2,
        "eigen_residual": ep.residual,
        "eigen_iterations": ep.iterations,
        "eigen_seed": ep.seed,
        "exponent_window": window,
        "fitted_exponent": fit,
        "alpha_plus": alpha_plus,
    });
    Ok(Outcome::new(result, vec![field_table("eigenfunction", &[("phi", &ep.phi)])]))
}

pub fn green_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let g = k.grid().clone();
    let source = c
        .data
        .tau_atoms
        .first()
        .map_or(g.coords()[g.center_node()], |a| g.coords()[g.nearest_node(a.point).0]);
    let col = k.green_column(source)?;
    let b0 = g.domain().beta0;
    let sources = kernels::sample_points(&g, &[b0 / 8.0, b0 / 2.0, 0.9 * g.domain().reach()], &[0.0, 1.7]);
    let bracket = kernels::green_bracket(&k, &sources)?;
    let classical = if k.mu() == 0.0 {
        kernels::classical_green_check(&k, &[source], b0 / 2.0).ok()
    } else {
        None
    };
    let result = json!({
        "source": g.coords()[col.node],
        "bracket": bracket,
        "bracket_constant": bracket.constant(),
        "classical": classical,
    });
    Ok(Outcome::new(result, vec![field_table("green_column", &[("green", &col.field)])]))
}

pub fn martin_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let g = k.grid().clone();
    let y = c.data.y;
    let col = k.martin_column(y)?;
    let exclusion = kernels::pole_radius(&g, y);
    let martin = kernels::martin_bracket(&k, &[y], exclusion)?;
    let equivalence = kernels::equivalence_bracket(&k, &[y], exclusion)?;
    let e = *k.exponents();
    let betas = ladder(g.domain().beta0, c.run.trace_levels);
    let masses = betas
        .iter()
        .map(|&b| trace_mass(&col.field, e.alpha_minus, b))
        .collect::<Result<Vec<_>, _>>()?;
    let classical = if k.mu() == 0.0 {
        kernels::classical_poisson_check(&k, &[y], g.domain().beta0 / 2.0).ok()
    } else {
        None
    };
    let halfspace = kernels::halfspace_check(&k).ok();
    let result = json!({
        "pole": y,
        "exclusion": exclusion,
        "martin_bracket": martin,
        "equivalence_bracket": equivalence,
        "trace_ladder": betas,
        "trace_masses": masses,
        "classical": classical,
        "halfspace": halfspace,
    });
    let rows = betas.iter().zip(&masses).map(|(b, m)| vec![b.to_string(), m.to_string()]).collect();
    Ok(Outcome::new(
        result,
        vec![
            field_table("martin_column", &[("martin", &col.field)]),
            Table::new("martin_masses", vec!["beta".into(), "mass".into()], rows),
        ],
    ))
}

pub fn weaklp_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let (taus, nus) = standard_families(k.grid());
    let r = verify_regularizing_estimates(&k, &taus, &nus, 0.0)?;
    let mut rows = Vec::new();
    for p in &r.pairs {
        for (label, ratio) in &p.ratios {
            rows.push(vec![
                format!("{:?}", p.pair.potential).to_lowercase(),
                p.pair.p.to_string(),
                p.pair.weight.to_string(),
                label.clone(),
                ratio.to_string(),
            ]);
        }
    }
    let header = ["potential", "p", "weight", "measure", "ratio"].map(String::from).to_vec();
    let result = json!({ "report": r, "max_spread": r.max_spread() });
    Ok(Outcome::new(result, vec![Table::new("regularizing", header, rows)]))
}

pub fn trace_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let tau = c.tau(k.grid());
    let nu = c.data.nu();
    let u = solve_linear(&k, &tau, &nu)?.u;
    let candidates = if nu.is_zero() {
        Vec::new()
    } else {
        vec![("nu".to_string(), nu)]
    };
    let e = *k.exponents();
    let levels = c.run.trace_levels.max(hardy_core::trace::classify_levels(e.alpha_plus, e.alpha_minus));
    let r = classify_trace(&k, &u, &candidates, levels)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    let table = Table::from_csv("trace", &buf);
    Ok(Outcome::new(serde_json::to_value(&r).unwrap_or(Value::Null), vec![table]))
}

pub fn linear_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let tau = c.tau(k.grid());
    let nu = c.data.nu();
    let sol = solve_linear(&k, &tau, &nu)?;
    let tf = make_test_functions(&k)?;
    let mut residuals = Vec::new();
    let mut rows = Vec::new();
    for z in &tf {
        let r = weak_residual(&k, &sol.u, &tau, &nu, z)?;
        rows.push(vec![
            format!("{:?}", z.kind),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.relative.to_string(),
        ]);
        residuals.push(json!({ "kind": z.kind, "certificate": z.certificate, "residual": r }));
    }
    let result = json!({
        "trace": sol.trace,
        "norm": sol.norm,
        "weak_residuals": residuals,
    });
    let header = ["test_function", "lhs", "rhs", "relative"].map(String::from).to_vec();
    Ok(Outcome::new(
        result,
        vec![
            Table::new("weak_residuals", header, rows),
            field_table("solution", &[("u", &sol.u), ("green", &sol.green), ("martin", &sol.martin)]),
        ],
    ))
}

pub fn nonlinear_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let sol = nonlinear::solve_for(&k, c.physics.q, c.data.nu(), &solve_options(c))?;
    let r = &sol.report;
    let rows = r
        .levels
        .iter()
        .map(|l| {
            vec![
                l.beta.to_string(),
                l.free_nodes.to_string(),
                l.iterations.to_string(),
                l.newton_steps.to_string(),
                l.norm.to_string(),
            ]
        })
        .collect();
    let header = ["beta", "free_nodes", "iterations", "newton_steps", "norm"].map(String::from).to_vec();
    let mut fields = vec![("u", &sol.u), ("martin", &sol.martin)];
    if let Some(p) = &sol.picard {
        fields.push(("picard", p));
    }
    let mut result = serde_json::to_value(r).unwrap_or(Value::Null);
    result["identity_within_tolerance"] = json!(r.identity_residual <= c.run.residual_tol);
    Ok(Outcome::new(
        result,
        vec![Table::new("ladder", header, rows), field_table("solution", &fields)],
    ))
}

pub fn dirac_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let (p, _) = nonlinear::dirac_profile(&k, c.physics.q, c.data.k, c.data.y, c.run.samples, &solve_options(c))?;
    let rows = p
        .depths
        .iter()
        .zip(&p.distances)
        .zip(&p.ratios)
        .map(|((d, r), q)| vec![d.to_string(), r.to_string(), q.to_string()])
        .collect();
    let header = ["depth", "distance", "ratio"].map(String::from).to_vec();
    Ok(Outcome::new(
        serde_json::to_value(&p).unwrap_or(Value::Null),
        vec![Table::new("profile", header, rows)],
    ))
}

pub fn critical_scan_cmd(c: &ExperimentConfig) -> Res {
    let k = kernels(c)?;
    let opts = SolveOptions {
        picard: false,
        ..solve_options(c)
    };
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &q in &c.run.q_list {
        let r = nonlinear::supercritical_probe(&k, q, c.data.y, c.run.gamma, 8, Some(c.data.k), c.run.trace_levels, &opts)?;
        let growth = r.growth.last().copied().unwrap_or(f64::NAN);
        let retention = r.trace.as_ref().map_or(f64::NAN, |t| t.final_ratio);
        let verdict = if q < r.q_crit { "exists" } else { "removable" };
        rows.push(vec![
            q.to_string(),
            (q < r.q_crit).to_string(),
            growth.to_string(),
            retention.to_string(),
            verdict.to_string(),
        ]);
        reports.push(json!({ "verdict": verdict, "probe": r }));
    }
    let header = ["q", "subcritical", "j_growth", "trace_retention", "verdict"].map(String::from).to_vec();
    let result = json!({ "q_crit": k.exponents().q_crit, "scan": reports });
    Ok(Outcome::new(result, vec![Table::new("critical_scan", header, rows)]))
}

pub fn verify_all_cmd(preset: &Preset, criteria: &[usize]) -> Res {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut failed = false;
    for &id in criteria {
        let r = acceptance::run_criterion(id, preset);
        eprintln!("{}", r.summary());
        failed |= !r.passed;
        for ch in &r.checks {
            rows.push(vec![
                id.to_string(),
                r.title.to_string(),
                r.passed.to_string(),
                ch.name.clone(),
                ch.value.map_or(String::new(), |v| v.to_string()),
                ch.target.clone(),
                ch.passed.to_string(),
            ]);
        }
        reports.push(r);
    }
    let header = ["id", "title", "criterion_passed", "check", "value", "target", "check_passed"]
        .map(String::from)
        .to_vec();
    let result = json!({ "preset": preset, "criteria": reports, "passed": !failed });
    Ok(Outcome {
        result,
        tables: vec![Table::new("acceptance", header, rows)],
        failed,
    })
}
