//! CSV snapshots, tables and the run manifest. Every file is written to a
//! temporary sibling first and renamed into place.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use fks_core::problems::ErrorReport;
use fks_core::{MomentField, SpatialGrid};

use crate::timing::TimingRecord;

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

pub fn snapshot_name(cycle: usize) -> String {
    format!("snapshot_{cycle:06}.csv")
}

/// One row per cell: indices, center coordinates, then `rho`, velocity,
/// `theta = p / rho`, `E`, `p`.
pub fn snapshot_csv(moments: &MomentField, grid: &SpatialGrid, gamma: f64) -> String {
    let dim = grid.dim();
    let mut s = String::with_capacity(64 * grid.len());
    s.push_str(if dim == 1 {
        "i,x,rho,u,theta,E,p\n"
    } else {
        "i,j,x,y,rho,u,v,theta,E,p\n"
    });
    for (j, c) in moments.cells().iter().enumerate() {
        let idx = grid.unflatten(j);
        let x = grid.center(j);
        let p = c.pressure(gamma);
        let u = c.velocity();
        for i in &idx[..dim] {
            let _ = write!(s, "{i},");
        }
        for xa in &x[..dim] {
            let _ = write!(s, "{xa:e},");
        }
        let _ = write!(s, "{:e},", c.density());
        for ua in &u[..dim] {
            let _ = write!(s, "{ua:e},");
        }
        let _ = writeln!(s, "{:e},{:e},{:e}", p / c.density(), c.energy(), p);
    }
    s
}

pub fn write_snapshot(
    dir: &Path,
    cycle: usize,
    moments: &MomentField,
    grid: &SpatialGrid,
    gamma: f64,
) -> io::Result<PathBuf> {
    let path = dir.join(snapshot_name(cycle));
    write_atomic(&path, &snapshot_csv(moments, grid, gamma))?;
    Ok(path)
}

/// Column header of [`timing_csv`].
pub const TIMING_HEADER: &str =
    "problem,scheme,cells,dofs,cycles,wall_s,time_per_cycle_s,time_per_cell_s";

pub fn timing_csv(rows: &[(String, String, TimingRecord)]) -> String {
    let mut s = String::new();
    s.push_str(TIMING_HEADER);
    s.push('\n');
    for (problem, scheme, t) in rows {
        let _ = writeln!(
            s,
            "{problem},{scheme},{},{},{},{:e},{:e},{:e}",
            t.cells,
            t.dofs,
            t.cycles,
            t.wall,
            t.time_per_cycle(),
            t.time_per_cell()
        );
    }
    s
}

/// Column header of [`errors_csv`].
pub const ERRORS_HEADER: &str = "scheme,cells,l1,l1_rate,linf,linf_rate";

/// Error table with one row per mesh; the rates of the first mesh are empty.
pub fn errors_csv(scheme: &str, report: &ErrorReport) -> String {
    let mut s = String::new();
    s.push_str(ERRORS_HEADER);
    s.push('\n');
    for (i, m) in report.meshes.iter().enumerate() {
        let (r1, ri) = report
            .rates(i)
            .map_or((String::new(), String::new()), |(a, b)| {
                (format!("{a:.4}"), format!("{b:.4}"))
            });
        let _ = writeln!(s, "{scheme},{},{:e},{r1},{:e},{ri}", m.cells, m.l1, m.linf);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use fks_core::problems::MeshError;
    use fks_core::{Boundary, ConservedMoments};

    #[test]
    fn snapshot_layout() {
        let g =
            SpatialGrid::new(2, &[2, 2], &[(0.0, 1.0), (0.0, 1.0)], &[Boundary::Copy; 2]).unwrap();
        let m = MomentField::from_fn(&g, |_| {
            ConservedMoments::from_pressure(2.0, &[1.0, 0.0], 1.0, 2.0)
        });
        let csv = snapshot_csv(&m, &g, 2.0);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "i,j,x,y,rho,u,v,theta,E,p");
        let cols: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(&cols[..4], &[0.0, 1.0, 0.25, 0.75]);
        assert_eq!(&cols[4..], &[2.0, 1.0, 0.0, 0.5, 2.0, 1.0]);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.csv");
        write_atomic(&p, "x\n").unwrap();
        write_atomic(&p, "y\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "y\n");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
        assert_eq!(snapshot_name(42), "snapshot_000042.csv");
    }

    #[test]
    fn error_table() {
        let mut r = ErrorReport::default();
        r.push(MeshError {
            cells: 25,
            l1: 4e-2,
            linf: 1e-1,
        });
        r.push(MeshError {
            cells: 50,
            l1: 1e-2,
            linf: 5e-2,
        });
        let csv = errors_csv("hofks", &r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], ERRORS_HEADER);
        assert!(lines[1].ends_with(",,1e-1,"));
        assert!(lines[2].contains(",2.0000,"));
        assert!(lines[2].ends_with(",1.0000"));
    }
}
