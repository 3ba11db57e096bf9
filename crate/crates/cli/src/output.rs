//! CSV tables and legacy VTK files.

use std::fmt::Write as _;
use std::io::{self, Write};

use transport_fem::analysis::SweepEntry;
use transport_fem::formulations::Formulation;
use transport_fem::space::FiniteElementSpace;

pub const TABLE_HEADER: &str = "N,h,dofs,l2_error,sd_error,l2_rate,sd_rate,z_l2,sp_seminorm";
pub const SWEEP_HEADER: &str = "eps,gamma,formulation,sd_error,l2_error,status";

/// One row of `table.csv`; `None` cells are written empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableRow {
    pub level: u32,
    pub h: Option<f64>,
    pub dofs: Option<usize>,
    pub l2_error: Option<f64>,
    pub sd_error: Option<f64>,
    pub l2_rate: Option<f64>,
    pub sd_rate: Option<f64>,
    pub z_l2: Option<f64>,
    pub sp_seminorm: Option<f64>,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.level,
            cell(r.h),
            r.dofs.map(|d| d.to_string()).unwrap_or_default(),
            cell(r.l2_error),
            cell(r.sd_error),
            cell(r.l2_rate),
            cell(r.sd_rate),
            cell(r.z_l2),
            cell(r.sp_seminorm),
        );
    }
    out
}

pub fn formulation_name(f: Formulation) -> &'static str {
    match f {
        Formulation::Standard => "standard",
        Formulation::PrimalDual => "primal-dual",
    }
}

pub fn format_sweep(entries: &[SweepEntry]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for e in entries {
        let (sd, l2, status) = match &e.outcome {
            Ok(errs) => (Some(errs.sd), Some(errs.l2), "ok".to_string()),
            Err(msg) => (
                None,
                None,
                format!("failed: {}", msg.replace([',', '\n'], ";")),
            ),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            cell(Some(e.eps)),
            cell(Some(e.gamma)),
            formulation_name(e.formulation),
            cell(sd),
            cell(l2),
            status
        );
    }
    out
}

/// Writes nodal fields of `space` as a legacy ASCII unstructured grid.
///
/// Points are the dof coordinates, so discontinuous spaces get separate
/// points per element. P2 elements become quadratic triangles.
pub fn write_vtk(
    mut w: impl Write,
    space: &FiniteElementSpace,
    fields: &[(&str, &[f64])],
) -> io::Result<()> {
    let coords = space.dof_coords();
    let ne = space.mesh().num_triangles();
    let nloc = space.local_dim();
    let cell_type = if space.degree() == 2 { 22 } else { 5 };
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "transport-fem solution")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", coords.len())?;
    for p in coords {
        writeln!(w, "{:.17e} {:.17e} 0", p[0], p[1])?;
    }
    writeln!(w, "CELLS {} {}", ne, ne * (nloc + 1))?;
    for e in 0..ne {
        write!(w, "{nloc}")?;
        for d in space.element_dofs(e) {
            write!(w, " {d}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(w, "{cell_type}")?;
    }
    writeln!(w, "POINT_DATA {}", coords.len())?;
    for (name, values) in fields {
        if values.len() != coords.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!(
                    "field {name} has {} values for {} points",
                    values.len(),
                    coords.len()
                ),
            ));
        }
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in *values {
            writeln!(w, "{v:.17e}")?;
        }
    }
    Ok(())
}
