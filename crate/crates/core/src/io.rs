//! Plain-text mesh format and CSV helpers.
//!
//! A mesh file is whitespace separated. Lines starting with `#` are ignored.
//!
//! ```text
//! <model tag> <n> <vertex count> <triangle count> <genus>
//! x_1 .. x_n [ν_1 .. ν_n]      one line per vertex
//! a b c                        one line per triangle, 0-based, outward
//! ```
//!
//! Vertex lines either all carry a normal or all omit it; missing normals are
//! rebuilt from area-weighted face conormals.

use std::io::{BufRead, Write};

use crate::develop::{DevelopedPatch, GridPatch, PatchFrame};
use crate::error::{Error, Result};
use crate::fixtures::covector_to_unit;
use crate::hull::ConvexHull;
use crate::spaces::{Model, ModelSpace, Vector};
use crate::surfaces::TriSurface;

/// Mesh as read from disk, before any topological validation.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub model: Model,
    pub dim: usize,
    pub vertices: Vec<Vector>,
    pub normals: Vec<Vector>,
    pub triangles: Vec<[usize; 3]>,
    pub genus: usize,
}

impl Mesh {
    pub fn space(&self) -> Result<ModelSpace> {
        ModelSpace::new(self.model, self.dim)
    }

    /// Validates the mesh as a closed oriented surface.
    pub fn into_surface(self) -> Result<TriSurface> {
        let space = self.space()?;
        TriSurface::new(&space, self.vertices, self.triangles, self.normals, self.genus)
    }

    pub fn from_surface(surface: &TriSurface) -> Self {
        Mesh {
            model: surface.model,
            dim: surface.vertices.first().map_or(3, |v| v.len()),
            vertices: surface.vertices.clone(),
            normals: surface.normals.clone(),
            triangles: surface.triangles.clone(),
            genus: surface.genus,
        }
    }
}

/// Unit normals from area-weighted face conormals, converted to vectors with
/// the metric at each vertex. Only meaningful for 3-dimensional models.
pub fn area_weighted_normals(space: &ModelSpace, vertices: &[Vector], triangles: &[[usize; 3]]) -> Result<Vec<Vector>> {
    if space.dim() != 3 {
        return Err(Error::UnsupportedSpace);
    }
    let mut acc = vec![Vector::zeros(3); vertices.len()];
    for t in triangles {
        let a = &vertices[t[0]];
        let c = (&vertices[t[1]] - a).cross(&(&vertices[t[2]] - a));
        for &v in t {
            acc[v] += &c;
        }
    }
    acc.iter()
        .zip(vertices)
        .enumerate()
        .map(|(k, (w, x))| {
            if w.norm() == 0.0 {
                Err(Error::DegenerateLink(k))
            } else {
                Ok(covector_to_unit(space, x, w))
            }
        })
        .collect()
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("line {line}: missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what}")))
}

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut lines = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((k + 1, t.to_string()));
        }
    }
    let mut it = lines.into_iter();
    let (ln, header) = it.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let mut h = header.split_whitespace();
    let tag: String = parse(h.next(), ln, "model tag")?;
    let model = Model::from_tag(&tag).ok_or_else(|| Error::Parse(format!("line {ln}: unknown model tag {tag}")))?;
    let dim: usize = parse(h.next(), ln, "dimension")?;
    let nv: usize = parse(h.next(), ln, "vertex count")?;
    let nt: usize = parse(h.next(), ln, "triangle count")?;
    let genus: usize = parse(h.next(), ln, "genus")?;
    let space = ModelSpace::new(model, dim)?;
    let mut vertices = Vec::with_capacity(nv);
    let mut normals = Vec::with_capacity(nv);
    let mut with_normals = None;
    for _ in 0..nv {
        let (ln, line) = it.next().ok_or_else(|| Error::Parse("truncated vertex block".into()))?;
        let vals: Vec<f64> = line.split_whitespace().map(|s| parse(Some(s), ln, "coordinate")).collect::<Result<_>>()?;
        let has = match vals.len() {
            l if l == dim => false,
            l if l == 2 * dim => true,
            _ => return Err(Error::Parse(format!("line {ln}: expected {dim} or {} values", 2 * dim))),
        };
        if *with_normals.get_or_insert(has) != has {
            return Err(Error::Parse(format!("line {ln}: normals given for some vertices only")));
        }
        vertices.push(Vector::from_column_slice(&vals[..dim]));
        if has {
            normals.push(Vector::from_column_slice(&vals[dim..]));
        }
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, line) = it.next().ok_or_else(|| Error::Parse("truncated triangle block".into()))?;
        let mut s = line.split_whitespace();
        let t: [usize; 3] = [parse(s.next(), ln, "index")?, parse(s.next(), ln, "index")?, parse(s.next(), ln, "index")?];
        if t.iter().any(|&i| i >= nv) || s.next().is_some() {
            return Err(Error::Parse(format!("line {ln}: bad triangle")));
        }
        triangles.push(t);
    }
    if let Some((ln, _)) = it.next() {
        return Err(Error::Parse(format!("line {ln}: trailing data")));
    }
    if with_normals != Some(true) {
        normals = area_weighted_normals(&space, &vertices, &triangles)?;
    }
    Ok(Mesh { model, dim, vertices, normals, triangles, genus })
}

pub fn write_mesh<W: Write>(mut w: W, mesh: &Mesh) -> Result<()> {
    writeln!(w, "{} {} {} {} {}", mesh.model.tag(), mesh.dim, mesh.vertices.len(), mesh.triangles.len(), mesh.genus)?;
    for (k, v) in mesh.vertices.iter().enumerate() {
        let mut row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        if let Some(n) = mesh.normals.get(k) {
            row.extend(n.iter().map(|x| x.to_string()));
        }
        writeln!(w, "{}", row.join(" "))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

/// Hull boundary as a mesh in its linear chart (`klein` for hyperbolic
/// input, `euclidean` otherwise) over the extreme points only.
pub fn hull_mesh(hull: &ConvexHull) -> Result<Mesh> {
    let model = if hull.model == Model::Euclidean { Model::Euclidean } else { Model::Klein };
    let space = ModelSpace::new(model, 3)?;
    let mut remap = vec![usize::MAX; hull.coords.len()];
    for (k, &v) in hull.vertices.iter().enumerate() {
        remap[v] = k;
    }
    let vertices: Vec<Vector> = hull.vertices.iter().map(|&v| Vector::from_column_slice(&hull.coords[v])).collect();
    let triangles: Vec<[usize; 3]> = hull.facets.iter().map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]]).collect();
    let normals = area_weighted_normals(&space, &vertices, &triangles)?;
    Ok(Mesh { model, dim: 3, vertices, normals, triangles, genus: 0 })
}

/// Triangulated image of a developed patch with normals `ν′ = Σ⟨ν, e_i⟩ e_i′`.
pub fn developed_mesh(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame, image: &DevelopedPatch) -> Mesh {
    let normals = (0..patch.len())
        .map(|k| Vector::from_fn(3, |i, _| space.inner(&patch.points[k], &patch.normals[k], &frame.frames[k][i])))
        .collect();
    let mut triangles = Vec::with_capacity(2 * (patch.nu - 1) * (patch.nv - 1));
    for i in 0..patch.nu - 1 {
        for j in 0..patch.nv - 1 {
            let (a, b, c, d) = (patch.idx(i, j), patch.idx(i + 1, j), patch.idx(i + 1, j + 1), patch.idx(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh { model: Model::Euclidean, dim: 3, vertices: image.points.clone(), normals, triangles, genus: 0 }
}

/// CSV table with a fixed header; rows are written in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Two-column whitespace-separated plot data.
pub fn plot_data(points: &[(f64, f64)]) -> String {
    points.iter().map(|(x, y)| format!("{x:.12e} {y:.12e}\n")).collect()
}
