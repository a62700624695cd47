//! CSV field dumps and mesh export. Every float is written with 17
//! significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::FrameField;
use crate::gauss::MetricField;
use crate::gauss_maps::LagrangianMapField;
use crate::grid::{Grid, GridField};
use crate::minkowski::{mink_from_herm, to_poincare_ball, HermMatrix, MinkVector};
use crate::surface::{NumericForms, SurfaceData};

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write(path: &Path, text: String) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// `i,j,x,y,u`, row-major.
pub fn u_csv(u: &MetricField) -> String {
    let g = *u.grid();
    let mut out = String::from("i,j,x,y,u\n");
    for (i, j) in g.nodes() {
        let _ = writeln!(out, "{i},{j},{},{},{}", f(g.x(i)), f(g.y(j)), f(u.u(i, j)));
    }
    out
}

pub fn write_u_csv(u: &MetricField, path: &Path) -> Result<()> {
    write(path, u_csv(u))
}

/// Reads a `u` field written by [`write_u_csv`] for the given grid. Nodes
/// may come in any order but every node must appear once.
pub fn read_u_csv(text: &str, grid: &Grid) -> Result<GridField<f64>> {
    let bad = |line: usize, msg: &str| Error::Parse(format!("u csv line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "i,j,x,y,u" => {}
        _ => return Err(bad(1, "expected header i,j,x,y,u")),
    }
    let mut field = GridField::constant(*grid, f64::NAN);
    let mut seen = vec![false; grid.len()];
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(bad(line_no, "expected 5 columns"));
        }
        let i: usize = cols[0].parse().map_err(|_| bad(line_no, "bad i"))?;
        let j: usize = cols[1].parse().map_err(|_| bad(line_no, "bad j"))?;
        let u: f64 = cols[4].parse().map_err(|_| bad(line_no, "bad u"))?;
        if i >= grid.nx() || j >= grid.ny() {
            return Err(bad(line_no, "node outside the grid"));
        }
        let k = grid.idx(i, j);
        if seen[k] {
            return Err(bad(line_no, "duplicate node"));
        }
        seen[k] = true;
        field.set(i, j, u);
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        let (i, j) = grid.node(k);
        return Err(Error::Parse(format!("u csv is missing node ({i}, {j})")));
    }
    Ok(field)
}

/// `i,j` followed by real and imaginary parts of `a11, a12, a21, a22`.
pub fn frame_csv(psi: &FrameField) -> String {
    let g = *psi.grid();
    let mut out = String::from("i,j,re_a11,im_a11,re_a12,im_a12,re_a21,im_a21,re_a22,im_a22\n");
    for (i, j) in g.nodes() {
        let _ = write!(out, "{i},{j}");
        for e in psi.get(i, j).entries() {
            let _ = write!(out, ",{},{}", f(e.re), f(e.im));
        }
        out.push('\n');
    }
    out
}

pub fn write_frame_csv(psi: &FrameField, path: &Path) -> Result<()> {
    write(path, frame_csv(psi))
}

/// Disk images as `i,j,x,y,re_w,im_w`, sphere images as `i,j,x,y,s1,s2,s3`.
pub fn gaussmap_csv(map: &LagrangianMapField) -> Result<String> {
    let g = *map.l().grid();
    let mut out = String::new();
    if let Some(w) = map.disk() {
        out.push_str("i,j,x,y,re_w,im_w\n");
        for (i, j) in g.nodes() {
            let v = w.get(i, j);
            let _ = writeln!(out, "{i},{j},{},{},{},{}", f(g.x(i)), f(g.y(j)), f(v.re), f(v.im));
        }
    } else if let Some(s) = map.sphere() {
        out.push_str("i,j,x,y,s1,s2,s3\n");
        for (i, j) in g.nodes() {
            let v = s.get(i, j);
            let _ = writeln!(out, "{i},{j},{},{},{},{},{}", f(g.x(i)), f(g.y(j)), f(v[0]), f(v[1]), f(v[2]));
        }
    } else {
        return Err(Error::NotOnOrbit {
            reason: format!("frame at lambda = {} is neither SU(1,1) nor SU(2)", map.lambda()),
        });
    }
    Ok(out)
}

pub fn write_gaussmap_csv(map: &LagrangianMapField, path: &Path) -> Result<()> {
    write(path, gaussmap_csv(map)?)
}

/// Vertices in the Poincare ball and triangles wound so that their normals
/// point to the side of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

fn ball(p: MinkVector, node: (usize, usize)) -> Result<[f64; 3]> {
    to_poincare_ball(p).map_err(|e| match e {
        Error::NotOnHyperboloid { residual } => Error::HyperboloidDrift { node, drift: residual },
        other => other,
    })
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn mesh(s: &SurfaceData) -> Result<Mesh> {
    let g = *s.grid();
    let mut vertices = Vec::with_capacity(g.len());
    for (i, j) in g.nodes() {
        vertices.push(ball(s.point(i, j), (i, j))?);
    }
    // Orientation from the base cell: compare the parameter-domain winding
    // with the ball image of a short step along n.
    let (i0, j0) = g.base_point();
    let (i0, j0) = (i0.min(g.nx() - 2), j0.min(g.ny() - 2));
    let p = vertices[g.idx(i0, j0)];
    let normal = cross(sub(vertices[g.idx(i0 + 1, j0)], p), sub(vertices[g.idx(i0, j0 + 1)], p));
    let t: f64 = 1e-6;
    let f = s.f().get(i0, j0) * t.cosh() + s.n().get(i0, j0) * t.sinh();
    let step = sub(ball(mink_from_herm(&HermMatrix::from_c2x2(&f)), (i0, j0))?, p);
    let flip = dot(normal, step) < 0.0;
    let mut triangles = Vec::with_capacity(2 * (g.nx() - 1) * (g.ny() - 1));
    for j in 0..g.ny() - 1 {
        for i in 0..g.nx() - 1 {
            let (a, b, c, d) = (g.idx(i, j), g.idx(i + 1, j), g.idx(i + 1, j + 1), g.idx(i, j + 1));
            for tri in [[a, b, c], [a, c, d]] {
                triangles.push(if flip { [tri[0], tri[2], tri[1]] } else { tri });
            }
        }
    }
    Ok(Mesh { vertices, triangles })
}

impl Mesh {
    pub fn obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", f(v[0]), f(v[1]), f(v[2]));
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }

    pub fn ply(&self) -> String {
        let mut out = format!(
            "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\n\
             property double z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
            self.vertices.len(),
            self.triangles.len()
        );
        for v in &self.vertices {
            let _ = writeln!(out, "{} {} {}", f(v[0]), f(v[1]), f(v[2]));
        }
        for t in &self.triangles {
            let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
        }
        out
    }

    pub fn write_obj(&self, path: &Path) -> Result<()> {
        write(path, self.obj())
    }

    pub fn write_ply(&self, path: &Path) -> Result<()> {
        write(path, self.ply())
    }
}

/// Per-vertex diagnostics `i,j,K_num,H_num,reQ,imQ`; `nan` where the first
/// form degenerates.
pub fn mesh_sidecar_csv(forms: &GridField<NumericForms>) -> String {
    let g = *forms.grid();
    let mut out = String::from("i,j,K_num,H_num,reQ,imQ\n");
    for (i, j) in g.nodes() {
        let fm = forms.get(i, j);
        let k = fm.gaussian_curvature().unwrap_or(f64::NAN);
        let h = fm.mean_curvature().unwrap_or(f64::NAN);
        let _ = writeln!(out, "{i},{j},{},{},{},{}", f(k), f(h), f(fm.q.re), f(fm.q.im));
    }
    out
}

pub fn write_mesh_sidecar(forms: &GridField<NumericForms>, path: &Path) -> Result<()> {
    write(path, mesh_sidecar_csv(forms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::umbilic_seed;

    #[test]
    fn u_csv_round_trip() {
        let g = Grid::inscribed(0.8, 9).unwrap();
        let u = umbilic_seed(-0.75, &g).unwrap();
        let text = u_csv(&u);
        assert!(text.starts_with("i,j,x,y,u\n0,0,"));
        let back = read_u_csv(&text, &g).unwrap();
        assert_eq!(&back, u.field());
        let other = Grid::inscribed(0.8, 11).unwrap();
        assert!(read_u_csv(&text, &other).is_err());
    }
}
