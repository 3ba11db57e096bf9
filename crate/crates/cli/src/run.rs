//! Executes a configuration: convergence study or robustness sweep.

use std::fs;
use std::path::{Path, PathBuf};

use transport_fem::analysis::{self, consecutive_rates, robustness_sweep, LevelErrors};
use transport_fem::cases::ProblemCase;
use transport_fem::formulations::{self, Solution, StabilizationConfig};
use transport_fem::mesh::{Mesh, Perturbation};
use transport_fem::space::FiniteElementSpace;

use crate::config::{check_levels, RunConfig};
use crate::output::{format_sweep, format_table, write_vtk, TableRow};
use crate::CliError;

/// Command-line overrides of the configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub vtk: bool,
    pub levels: Option<Vec<u32>>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub table: Option<PathBuf>,
    pub sweep: Option<PathBuf>,
    pub vtk_files: Vec<PathBuf>,
    pub rows: Vec<TableRow>,
    /// Failures that were expected by the configuration.
    pub tolerated_failures: usize,
}

struct LevelOutcome {
    level: u32,
    h: Option<f64>,
    result: Result<(FiniteElementSpace, Solution, Option<LevelErrors>), String>,
}

fn run_level(
    case: &ProblemCase,
    config: &StabilizationConfig,
    degree: usize,
    level: u32,
    perturb: Option<Perturbation>,
) -> LevelOutcome {
    let mesh = match Mesh::build_level(level, perturb) {
        Ok(m) => m,
        Err(e) => {
            return LevelOutcome {
                level,
                h: None,
                result: Err(e.to_string()),
            }
        }
    };
    let h = Some(mesh.mesh_size());
    let result = (|| {
        let space = FiniteElementSpace::on_mesh(mesh, config.method.continuity(), degree)?;
        let sol = formulations::solve(case, &space, config)?;
        let errors = match case.exact {
            Some(_) => Some(analysis::solution_errors(&sol, case, &space)?),
            None => None,
        };
        Ok::<_, transport_fem::Error>((space, sol, errors))
    })()
    .map_err(|e| e.to_string());
    LevelOutcome { level, h, result }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary, CliError> {
    let dir = opts
        .output_dir
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::Io {
        path: dir.clone(),
        source: e,
    })?;
    let mut perturb = cfg.perturbation();
    if let Some(seed) = opts.seed {
        match perturb.as_mut() {
            Some(p) => p.seed = seed,
            None => {
                return Err(CliError::Config(
                    "--seed needs a [perturbation] section".into(),
                ))
            }
        }
    }
    if cfg.sweep.is_some() {
        run_sweep(cfg, &dir)
    } else {
        run_study(cfg, opts, &dir, perturb)
    }
}

fn run_study(
    cfg: &RunConfig,
    opts: &RunOptions,
    dir: &Path,
    perturb: Option<Perturbation>,
) -> Result<RunSummary, CliError> {
    let levels = match &opts.levels {
        Some(l) => {
            check_levels(l)?;
            l.clone()
        }
        None => cfg
            .study
            .as_ref()
            .map(|s| s.levels.clone())
            .unwrap_or_default(),
    };
    let case = cfg.problem_case()?;
    let config = cfg.stabilization();
    let degree = cfg.method.degree;
    let (case, config) = (&case, &config);
    let outcomes: Vec<LevelOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&level| s.spawn(move || run_level(case, config, degree, level, perturb)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level worker panicked"))
            .collect()
    });

    let mut rows: Vec<TableRow> = outcomes
        .iter()
        .map(|o| {
            let mut row = TableRow {
                level: o.level,
                h: o.h,
                ..Default::default()
            };
            if let Ok((space, sol, errors)) = &o.result {
                row.dofs = Some(sol.system_size());
                if let Some(e) = errors {
                    row.l2_error = Some(e.l2);
                    row.sd_error = Some(e.sd);
                    row.sp_seminorm = Some(e.sp);
                    row.z_l2 = e.z_l2;
                } else if let Some(z) = &sol.z {
                    row.z_l2 = analysis::l2_norm(space, z).ok();
                }
            }
            row
        })
        .collect();
    let l2: Vec<Option<f64>> = rows.iter().map(|r| r.l2_error).collect();
    let sd: Vec<Option<f64>> = rows.iter().map(|r| r.sd_error).collect();
    for ((row, l2r), sdr) in rows
        .iter_mut()
        .zip(consecutive_rates(&levels, &l2))
        .zip(consecutive_rates(&levels, &sd))
    {
        row.l2_rate = l2r;
        row.sd_rate = sdr;
    }

    let table = dir.join("table.csv");
    write_file(&table, &format_table(&rows))?;

    let mut vtk_files = Vec::new();
    if opts.vtk || cfg.output.vtk {
        for o in &outcomes {
            if let Ok((space, sol, _)) = &o.result {
                let path = dir.join(format!("field_{}.vtk", o.level));
                let mut fields: Vec<(&str, &[f64])> = vec![("u", &sol.u)];
                if let Some(z) = &sol.z {
                    fields.push(("z", z));
                }
                let file = fs::File::create(&path).map_err(|e| CliError::Io {
                    path: path.clone(),
                    source: e,
                })?;
                write_vtk(std::io::BufWriter::new(file), space, &fields).map_err(|e| {
                    CliError::Io {
                        path: path.clone(),
                        source: e,
                    }
                })?;
                vtk_files.push(path);
            }
        }
    }

    let failures: Vec<String> = outcomes
        .iter()
        .filter_map(|o| {
            o.result
                .as_ref()
                .err()
                .map(|e| format!("level {}: {e}", o.level))
        })
        .collect();
    if !failures.is_empty() {
        return Err(CliError::SolveFailed(failures));
    }
    Ok(RunSummary {
        table: Some(table),
        sweep: None,
        vtk_files,
        rows,
        tolerated_failures: 0,
    })
}

fn run_sweep(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let sweep = cfg.sweep.as_ref().expect("sweep section present");
    let formulations: Vec<_> = sweep.formulations.iter().map(|&f| f.into()).collect();
    let entries = robustness_sweep(
        &sweep.eps,
        &sweep.gamma,
        sweep.n,
        cfg.method.degree,
        &formulations,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let path = dir.join("sweep.csv");
    write_file(&path, &format_sweep(&entries))?;
    let failures: Vec<String> = entries
        .iter()
        .filter_map(|e| {
            e.outcome
                .as_ref()
                .err()
                .map(|m| format!("eps={} gamma={} {:?}: {m}", e.eps, e.gamma, e.formulation))
        })
        .collect();
    if !failures.is_empty() && !sweep.expect_failures {
        return Err(CliError::SolveFailed(failures));
    }
    Ok(RunSummary {
        sweep: Some(path),
        tolerated_failures: failures.len(),
        ..Default::default()
    })
}
