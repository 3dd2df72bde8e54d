//! Conforming triangulations of the model domains together with red and
//! newest-vertex refinement.
//!
//! Cells are stored counter-clockwise with the refinement edge opposite the
//! first vertex, so local edge `j` is the edge opposite local vertex `j`.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Model domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    UnitSquare,
    UnitTriangle,
    LShape,
    TShape,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::UnitSquare => "unit_square",
            Domain::UnitTriangle => "unit_triangle",
            Domain::LShape => "l_shape",
            Domain::TShape => "t_shape",
        }
    }

    /// Area of the domain.
    pub fn area(self) -> f64 {
        match self {
            Domain::UnitSquare => 1.0,
            Domain::UnitTriangle => 0.5,
            Domain::LShape => 3.0,
            Domain::TShape => 5.0,
        }
    }

    fn lattice_origin(self) -> Point {
        match self {
            Domain::UnitSquare | Domain::UnitTriangle => [0.0, 0.0],
            Domain::LShape => [-1.0, -1.0],
            Domain::TShape => [-1.5, -2.0],
        }
    }

    fn extent(self) -> (usize, usize) {
        match self {
            Domain::UnitSquare | Domain::UnitTriangle => (1, 1),
            Domain::LShape => (2, 2),
            Domain::TShape => (3, 3),
        }
    }

    fn contains(self, p: Point) -> bool {
        let [x, y] = p;
        match self {
            Domain::UnitSquare => (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y),
            Domain::UnitTriangle => x >= 0.0 && y >= 0.0 && x + y <= 1.0,
            Domain::LShape => !(x > 0.0 && y > 0.0),
            Domain::TShape => y > 0.0 || x.abs() < 0.5,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_square" => Ok(Domain::UnitSquare),
            "unit_triangle" => Ok(Domain::UnitTriangle),
            "l_shape" => Ok(Domain::LShape),
            "t_shape" => Ok(Domain::TShape),
            other => Err(Error::UnknownDomain(other.to_string())),
        }
    }
}

/// An edge of the triangulation.
///
/// The vertices are ordered counter-clockwise with respect to `cells[0]`, whose
/// outward normal is the reference normal of the edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub cells: [usize; 2],
    pub local: [usize; 2],
    pub boundary: bool,
}

impl Edge {
    /// The neighbour across the edge, if any.
    pub fn exterior(&self) -> Option<usize> {
        (!self.boundary).then_some(self.cells[1])
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    cell_edges: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
    parent: Option<Vec<usize>>,
}

impl Mesh {
    /// Structured triangulation with `n` subdivisions per unit length.
    ///
    /// Lattice squares are split along the anti-diagonal so that every cell is a
    /// right isosceles triangle whose hypotenuse is the refinement edge.
    pub fn generate(domain: Domain, n: usize) -> Result<Mesh> {
        if n == 0 {
            return Err(Error::InvalidArgument("subdivision count must be positive".into()));
        }
        let origin = domain.lattice_origin();
        let (ex, ey) = domain.extent();
        let h = 1.0 / n as f64;
        let at = |i: usize, j: usize| [origin[0] + i as f64 * h, origin[1] + j as f64 * h];

        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut cells = Vec::new();
        let mut vid = |i: usize, j: usize, vertices: &mut Vec<Point>| {
            *index.entry((i, j)).or_insert_with(|| {
                vertices.push(at(i, j));
                vertices.len() - 1
            })
        };
        for j in 0..ey * n {
            for i in 0..ex * n {
                let lower_centroid = {
                    let a = at(i, j);
                    [a[0] + h / 3.0, a[1] + h / 3.0]
                };
                let upper_centroid = {
                    let a = at(i, j);
                    [a[0] + 2.0 * h / 3.0, a[1] + 2.0 * h / 3.0]
                };
                if domain.contains(lower_centroid) {
                    let a = vid(i, j, &mut vertices);
                    let b = vid(i + 1, j, &mut vertices);
                    let c = vid(i, j + 1, &mut vertices);
                    cells.push([a, b, c]);
                }
                if domain.contains(upper_centroid) {
                    let a = vid(i + 1, j + 1, &mut vertices);
                    let b = vid(i, j + 1, &mut vertices);
                    let c = vid(i + 1, j, &mut vertices);
                    cells.push([a, b, c]);
                }
            }
        }
        Mesh::from_parts(vertices, cells)
    }

    /// Builds a mesh from raw vertices and counter-clockwise cells.
    ///
    /// The refinement edge of each cell is taken to be the edge opposite its first vertex.
    pub fn from_parts(vertices: Vec<Point>, cells: Vec<[usize; 3]>) -> Result<Mesh> {
        for (c, cell) in cells.iter().enumerate() {
            if cell.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!("cell {c} references a missing vertex")));
            }
            let [a, b, d] = cell.map(|v| vertices[v]);
            if orient(a, b, d) <= 0.0 {
                return Err(Error::InvalidArgument(format!("cell {c} is not counter-clockwise")));
            }
        }
        let mut edges: Vec<Edge> = Vec::with_capacity(3 * cells.len() / 2 + 1);
        let mut cell_edges = vec![[usize::MAX; 3]; cells.len()];
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.capacity());
        for (c, cell) in cells.iter().enumerate() {
            for j in 0..3 {
                let a = cell[(j + 1) % 3];
                let b = cell[(j + 2) % 3];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if !edge.boundary {
                            return Err(Error::InvalidArgument(format!(
                                "edge ({a}, {b}) is shared by more than two cells"
                            )));
                        }
                        edge.cells[1] = c;
                        edge.local[1] = j;
                        edge.boundary = false;
                        cell_edges[c][j] = e;
                    }
                    None => {
                        lookup.insert(key, edges.len());
                        cell_edges[c][j] = edges.len();
                        edges.push(Edge { vertices: [a, b], cells: [c, c], local: [j, j], boundary: true });
                    }
                }
            }
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for e in edges.iter().filter(|e| e.boundary) {
            boundary_vertex[e.vertices[0]] = true;
            boundary_vertex[e.vertices[1]] = true;
        }
        Ok(Mesh { vertices, cells, edges, cell_edges, boundary_vertex, parent: None })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges of cell `c`; entry `j` is opposite local vertex `j`.
    pub fn cell_edges(&self, c: usize) -> [usize; 3] {
        self.cell_edges[c]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// Cell index of the parent in the previous mesh, for refined meshes.
    pub fn parent_map(&self) -> Option<&[usize]> {
        self.parent.as_deref()
    }

    pub fn cell_points(&self, c: usize) -> [Point; 3] {
        self.cells[c].map(|v| self.vertices[v])
    }

    pub fn area(&self, c: usize) -> f64 {
        let [a, b, d] = self.cell_points(c);
        0.5 * orient(a, b, d)
    }

    pub fn centroid(&self, c: usize) -> Point {
        let [a, b, d] = self.cell_points(c);
        [(a[0] + b[0] + d[0]) / 3.0, (a[1] + b[1] + d[1]) / 3.0]
    }

    /// Longest edge of cell `c`.
    pub fn diameter(&self, c: usize) -> f64 {
        let p = self.cell_points(c);
        (0..3).map(|j| dist(p[(j + 1) % 3], p[(j + 2) % 3])).fold(0.0, f64::max)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        dist(self.vertices[a], self.vertices[b])
    }

    /// Unit normal of edge `e`, pointing out of `cells[0]`.
    pub fn edge_normal(&self, e: usize) -> Point {
        let [a, b] = self.edges[e].vertices.map(|v| self.vertices[v]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e].vertices.map(|v| self.vertices[v]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Largest cell diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.diameter(c)).fold(0.0, f64::max)
    }

    /// Smallest interior angle over all cells, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut best = f64::INFINITY;
        for c in 0..self.n_cells() {
            let p = self.cell_points(c);
            for j in 0..3 {
                let o = p[j];
                let u = [p[(j + 1) % 3][0] - o[0], p[(j + 1) % 3][1] - o[1]];
                let v = [p[(j + 2) % 3][0] - o[0], p[(j + 2) % 3][1] - o[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                best = best.min(cos.clamp(-1.0, 1.0).acos());
            }
        }
        best
    }

    /// Red refinement: every cell is split into four similar children.
    pub fn uniform_refine(&self) -> Mesh {
        let nv = self.n_vertices();
        let mut vertices = self.vertices.clone();
        vertices.extend((0..self.n_edges()).map(|e| self.edge_midpoint(e)));
        let mut cells = Vec::with_capacity(4 * self.n_cells());
        let mut parent = Vec::with_capacity(4 * self.n_cells());
        for (c, &[a, b, d]) in self.cells.iter().enumerate() {
            let ce = self.cell_edges[c];
            let (m_bd, m_da, m_ab) = (nv + ce[0], nv + ce[1], nv + ce[2]);
            // children keep the refinement edge of the parent by similarity
            cells.push([a, m_ab, m_da]);
            cells.push([m_ab, b, m_bd]);
            cells.push([m_da, m_bd, d]);
            cells.push([m_bd, m_da, m_ab]);
            parent.extend([c; 4]);
        }
        let mut mesh = Mesh::from_parts(vertices, cells).expect("red refinement preserves validity");
        mesh.parent = Some(parent);
        mesh
    }

    /// Newest-vertex bisection of the marked cells plus the closure needed for
    /// conformity. Every marked cell is bisected at least once.
    pub fn bisect_refine(&self, marked: &[usize]) -> Result<Mesh> {
        if let Some(&c) = marked.iter().find(|&&c| c >= self.n_cells()) {
            return Err(Error::InvalidArgument(format!("marked cell {c} does not exist")));
        }
        let mut edge_marked = vec![false; self.n_edges()];
        let mut stack: Vec<usize> = Vec::new();
        for &c in marked {
            let e = self.cell_edges[c][0];
            if !edge_marked[e] {
                edge_marked[e] = true;
                stack.push(e);
            }
        }
        // closure: a cell with any marked edge must bisect its refinement edge
        while let Some(e) = stack.pop() {
            let edge = &self.edges[e];
            let n = if edge.boundary { 1 } else { 2 };
            for &c in &edge.cells[..n] {
                let r = self.cell_edges[c][0];
                if !edge_marked[r] {
                    edge_marked[r] = true;
                    stack.push(r);
                }
            }
        }
        if !edge_marked.iter().any(|&m| m) {
            let mut same = self.clone();
            same.parent = Some((0..self.n_cells()).collect());
            return Ok(same);
        }

        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut pending: HashMap<(usize, usize), Option<usize>> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge_marked[e] {
                pending.insert(key(edge.vertices[0], edge.vertices[1]), None);
            }
        }
        let mut vertices = self.vertices.clone();
        let mut cells: Vec<([usize; 3], usize)> =
            self.cells.iter().copied().enumerate().map(|(c, cell)| (cell, c)).collect();
        loop {
            let mut next = Vec::with_capacity(cells.len() + cells.len() / 2);
            let mut split_any = false;
            for &([a, b, d], origin) in &cells {
                match pending.get_mut(&key(b, d)) {
                    Some(slot) => {
                        let m = *slot.get_or_insert_with(|| {
                            let (pb, pd) = (vertices[b], vertices[d]);
                            vertices.push([0.5 * (pb[0] + pd[0]), 0.5 * (pb[1] + pd[1])]);
                            vertices.len() - 1
                        });
                        next.push(([m, a, b], origin));
                        next.push(([m, d, a], origin));
                        split_any = true;
                    }
                    None => next.push(([a, b, d], origin)),
                }
            }
            cells = next;
            if !split_any {
                break;
            }
        }
        let parent = cells.iter().map(|&(_, p)| p).collect();
        let mut mesh = Mesh::from_parts(vertices, cells.into_iter().map(|(c, _)| c).collect())?;
        mesh.parent = Some(parent);
        Ok(mesh)
    }

    /// Writes the plain-text dump format.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "vvpmesh 1")?;
        for v in &self.vertices {
            writeln!(out, "v {} {}", v[0], v[1])?;
        }
        for c in &self.cells {
            writeln!(out, "c {} {} {} 0", c[0], c[1], c[2])?;
        }
        for e in &self.edges {
            writeln!(out, "e {} {} {}", e.vertices[0], e.vertices[1], u8::from(e.boundary))?;
        }
        Ok(())
    }

    /// Reads the plain-text dump format; edge records are rebuilt from the cells.
    pub fn read_dump<R: BufRead>(input: R) -> Result<Mesh> {
        let mut vertices = Vec::new();
        let mut cells = Vec::new();
        let parse_err = |line: usize, message: &str| Error::Parse { line, message: message.to_string() };
        for (i, line) in input.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| parse_err(lineno, &e.to_string()))?;
            let mut tok = line.split_whitespace();
            let Some(tag) = tok.next() else { continue };
            let rest: Vec<&str> = tok.collect();
            match (tag, i) {
                ("vvpmesh", 0) => {
                    if rest != ["1"] {
                        return Err(parse_err(lineno, "unsupported mesh version"));
                    }
                }
                (_, 0) => return Err(parse_err(lineno, "missing `vvpmesh 1` header")),
                ("v", _) => {
                    let xy: Vec<f64> = rest
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(lineno, &e.to_string()))?;
                    if xy.len() != 2 {
                        return Err(parse_err(lineno, "vertex needs two coordinates"));
                    }
                    vertices.push([xy[0], xy[1]]);
                }
                ("c", _) => {
                    let ids: Vec<usize> = rest
                        .iter()
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_err(lineno, &e.to_string()))?;
                    if ids.len() != 4 || ids[3] > 2 {
                        return Err(parse_err(lineno, "cell needs three vertices and a refinement edge"));
                    }
                    let r = ids[3];
                    cells.push([ids[r], ids[(r + 1) % 3], ids[(r + 2) % 3]]);
                }
                ("e", _) => {}
                _ => return Err(parse_err(lineno, "unknown record")),
            }
        }
        Mesh::from_parts(vertices, cells)
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let m = Mesh::generate(Domain::UnitSquare, 1).unwrap();
        assert_eq!((m.n_cells(), m.n_vertices(), m.n_edges()), (2, 4, 5));
        let m = Mesh::generate(Domain::UnitSquare, 2).unwrap();
        assert_eq!((m.n_cells(), m.n_vertices()), (8, 9));
    }

    #[test]
    fn l_shape_area_and_boundary() {
        let m = Mesh::generate(Domain::LShape, 1).unwrap();
        let area: f64 = (0..m.n_cells()).map(|c| m.area(c)).sum();
        assert!((area - 3.0).abs() < 1e-14);
        assert_eq!(m.edges().iter().filter(|e| e.boundary).count(), 8);
    }

    #[test]
    fn triangle_single_cell() {
        let m = Mesh::generate(Domain::UnitTriangle, 1).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert!((m.mesh_size() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn t_shape_area() {
        for n in [1, 2, 3] {
            let m = Mesh::generate(Domain::TShape, n).unwrap();
            let area: f64 = (0..m.n_cells()).map(|c| m.area(c)).sum();
            assert!((area - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_edge_is_longest_initially() {
        let m = Mesh::generate(Domain::LShape, 2).unwrap();
        for c in 0..m.n_cells() {
            let p = m.cell_points(c);
            let r = dist(p[1], p[2]);
            assert!((r - m.diameter(c)).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_marking_is_noop() {
        let m = Mesh::generate(Domain::UnitSquare, 2).unwrap();
        let r = m.bisect_refine(&[]).unwrap();
        assert_eq!(r.cells(), m.cells());
        assert_eq!(r.vertices(), m.vertices());
    }

    #[test]
    fn single_bisection_on_paired_diagonal() {
        let m = Mesh::generate(Domain::UnitSquare, 1).unwrap();
        let r = m.bisect_refine(&[0]).unwrap();
        // the shared diagonal is bisected in both cells
        assert_eq!(r.n_cells(), 4);
        assert_eq!(r.n_vertices(), 5);
    }

    #[test]
    fn dump_round_trip() {
        let m = Mesh::generate(Domain::TShape, 2).unwrap().bisect_refine(&[0, 5]).unwrap();
        let mut buf = Vec::new();
        m.write_dump(&mut buf).unwrap();
        let r = Mesh::read_dump(buf.as_slice()).unwrap();
        assert_eq!(r.cells(), m.cells());
        assert_eq!(r.vertices(), m.vertices());
        assert_eq!(r.edges(), m.edges());
    }
}
