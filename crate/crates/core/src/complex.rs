//! The cell complex obtained by gluing one polyhedron per label along faces
//! with the same degenerate configuration.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::combinatorics::{enumerate_labels, face_config, DegenerateConfig, Label, LabelError, Marking, WeightVector};
use crate::lorentz::{build_model, LorentzError};
use crate::moduli::{pentagon_side, psi5, ModuliError};

/// Schema tag written into every exported document.
pub const SCHEMA: &str = "polymod-complex/1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error("complex needs n = 5 or n = 6, got {0}")]
    UnsupportedSize(usize),
    #[error("weight vector has {got} angles, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("face key {key} matched {count} slots")]
    PairingFailure { key: String, count: usize },
    #[error("cells {0:?} are not the full set of labels")]
    BadCellList(Vec<String>),
    #[error("ideal vertices exist only at the equal weight")]
    NotEqualWeight,
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
    #[error("export failed: {0}")]
    Export(String),
}

impl ComplexError {
    pub fn kind(&self) -> &'static str {
        match self {
            ComplexError::Label(e) => e.kind(),
            ComplexError::Lorentz(e) => e.kind(),
            ComplexError::Moduli(e) => e.kind(),
            ComplexError::UnsupportedSize(_) => "UnsupportedSize",
            ComplexError::DimensionMismatch { .. } => "DimensionMismatch",
            ComplexError::PairingFailure { .. } => "PairingFailure",
            ComplexError::BadCellList(_) => "BadCellList",
            ComplexError::NotEqualWeight => "NotEqualWeight",
            ComplexError::UnknownFormat(_) => "UnknownFormat",
            ComplexError::Export(_) => "ExportError",
        }
    }
}

/// A facet of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub cell: usize,
    pub facet: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pairing {
    pub key: String,
    pub a: Slot,
    pub b: Slot,
}

/// A codimension-two face of a cell, given by the two facets through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Corner {
    pub cell: usize,
    pub facets: [usize; 2],
}

/// One equivalence class of corners under the gluing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerClass {
    pub key: String,
    pub corners: Vec<Corner>,
}

#[derive(Debug, Clone)]
pub struct GluedComplex {
    n: usize,
    theta: WeightVector,
    cells: Vec<Label>,
    pairings: Vec<Pairing>,
    corner_classes: Vec<CornerClass>,
}

/// Whether facets `j < k` of `marking` meet in a codimension-two face.
/// Non-adjacent facets always do; adjacent ones only when the three
/// colliding angles sum to less than `π`.
fn corner_exists(marking: &Marking, theta: &WeightVector, j: usize, k: usize) -> bool {
    let n = marking.n();
    if k == j + 1 {
        marking.run_sum(theta, j, 3) < PI
    } else if j == 0 && k == n - 1 {
        marking.run_sum(theta, n - 1, 3) < PI
    } else {
        true
    }
}

/// Builds the complex with cells in sorted label order.
pub fn build_complex(n: usize, theta: &WeightVector) -> Result<GluedComplex, ComplexError> {
    if n != 5 && n != 6 {
        return Err(ComplexError::UnsupportedSize(n));
    }
    build_complex_with_cells(theta, enumerate_labels(n)?)
}

/// Builds the complex with cells in the given order, which must be a
/// permutation of all labels.
pub fn build_complex_with_cells(theta: &WeightVector, cells: Vec<Label>) -> Result<GluedComplex, ComplexError> {
    let n = cells.first().map(Label::n).unwrap_or(0);
    if n != 5 && n != 6 {
        return Err(ComplexError::UnsupportedSize(n));
    }
    if theta.n() != n {
        return Err(ComplexError::DimensionMismatch { got: theta.n(), expected: n });
    }
    let mut sorted = cells.clone();
    sorted.sort();
    sorted.dedup();
    if sorted != enumerate_labels(n)? {
        return Err(ComplexError::BadCellList(cells.iter().map(|l| l.to_string()).collect()));
    }
    let markings: Vec<Marking> = cells.iter().map(Label::marking).collect();

    let mut by_key: BTreeMap<DegenerateConfig, Vec<Slot>> = BTreeMap::new();
    for (cell, m) in markings.iter().enumerate() {
        for facet in 0..n {
            by_key.entry(face_config(m, facet)?).or_default().push(Slot { cell, facet });
        }
    }
    let mut pairings = Vec::with_capacity(by_key.len());
    for (key, slots) in &by_key {
        if slots.len() != 2 || slots[0].cell == slots[1].cell {
            return Err(ComplexError::PairingFailure { key: key.to_string(), count: slots.len() });
        }
        pairings.push(Pairing { key: key.to_string(), a: slots[0], b: slots[1] });
    }

    let mut corners = Vec::new();
    let mut corner_key = Vec::new();
    let mut index: HashMap<Corner, usize> = HashMap::new();
    for (cell, m) in markings.iter().enumerate() {
        for j in 0..n {
            for k in j + 1..n {
                if corner_exists(m, theta, j, k) {
                    let c = Corner { cell, facets: [j, k] };
                    index.insert(c, corners.len());
                    corners.push(c);
                    corner_key.push(DegenerateConfig::collapse(m, &[j, k])?);
                }
            }
        }
    }
    // Corners on a glued face are identified with the corner of the partner
    // face that has the same configuration.
    let mut uf = UnionFind::<usize>::new(corners.len());
    let on_facet = |slot: Slot| -> Vec<usize> {
        (0..n)
            .filter(|&k| k != slot.facet)
            .filter_map(|k| {
                let facets = if k < slot.facet { [k, slot.facet] } else { [slot.facet, k] };
                index.get(&Corner { cell: slot.cell, facets }).copied()
            })
            .collect()
    };
    for p in &pairings {
        let theirs = on_facet(p.b);
        for i in on_facet(p.a) {
            for &t in &theirs {
                if corner_key[i] == corner_key[t] {
                    uf.union(i, t);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..corners.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut corner_classes: Vec<CornerClass> = groups
        .into_values()
        .map(|members| CornerClass {
            key: corner_key[members[0]].to_string(),
            corners: members.iter().map(|&i| corners[i]).collect(),
        })
        .collect();
    corner_classes.sort_by(|a, b| a.key.cmp(&b.key).then(a.corners.cmp(&b.corners)));

    Ok(GluedComplex { n, theta: theta.clone(), cells, pairings, corner_classes })
}

impl GluedComplex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> &WeightVector {
        &self.theta
    }

    pub fn cells(&self) -> &[Label] {
        &self.cells
    }

    pub fn pairings(&self) -> &[Pairing] {
        &self.pairings
    }

    /// Classes of codimension-two faces: vertices for `n = 5`, edges for
    /// `n = 6`.
    pub fn corner_classes(&self) -> &[CornerClass] {
        &self.corner_classes
    }

    pub fn marking(&self, cell: usize) -> Marking {
        self.cells[cell].marking()
    }

    /// Cells having a corner in the class with configuration `key`.
    pub fn cells_around(&self, key: &str) -> Vec<&Label> {
        let mut out: Vec<&Label> = self
            .corner_classes
            .iter()
            .filter(|c| c.key == key)
            .flat_map(|c| c.corners.iter().map(|k| &self.cells[k.cell]))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Names `"(ij)"` of the point pairs that collide on some face.
    pub fn surface_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .cells
            .iter()
            .flat_map(|l| {
                let m = l.marking();
                (0..self.n).map(move |j| {
                    let (a, b) = (m.point(j), m.point(j + 1));
                    format!("({}{})", a.min(b), a.max(b))
                })
            })
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Largest difference between the lengths of two glued pentagon sides,
    /// relative to `max(1, length)`. Long sides belong to pentagons with a
    /// parameter close to 1, where only relative accuracy is available.
    pub fn face_length_mismatch(&self) -> Result<f64, ComplexError> {
        if self.n != 5 {
            return Err(ComplexError::UnsupportedSize(self.n));
        }
        let shapes = self
            .cells
            .iter()
            .map(|l| psi5(&self.theta, &l.marking()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.pairings.iter().fold(0.0f64, |m, p| {
            let a = pentagon_side(&shapes[p.a.cell], p.a.facet);
            let b = pentagon_side(&shapes[p.b.cell], p.b.facet);
            m.max((a - b).abs() / a.abs().max(b.abs()).max(1.0))
        }))
    }
}

/// `V − E + F` of the surface glued from pentagons.
pub fn euler_characteristic(complex: &GluedComplex) -> Result<i64, ComplexError> {
    if complex.n != 5 {
        return Err(ComplexError::UnsupportedSize(complex.n));
    }
    let v = complex.corner_classes.len() as i64;
    let e = complex.pairings.len() as i64;
    let f = complex.cells.len() as i64;
    Ok(v - e + f)
}

/// One ideal vertex of a cell: the points at positions `k, k+1, k+2` collide
/// and so do the other three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CuspIncidence {
    pub cell: usize,
    pub k: usize,
}

impl CuspIncidence {
    pub fn facets(&self) -> [usize; 4] {
        let k = self.k;
        [k, k + 1, (k + 3) % 6, (k + 4) % 6]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspClass {
    /// The two colliding triples, each sorted, the one holding `1` first.
    pub partition: [[u8; 3]; 2],
    pub incidences: Vec<CuspIncidence>,
}

fn triple_partition(m: &Marking, k: usize) -> [[u8; 3]; 2] {
    let mut t: [u8; 3] = [m.point(k), m.point(k + 1), m.point(k + 2)];
    let mut c: [u8; 3] = [m.point(k + 3), m.point(k + 4), m.point(k + 5)];
    t.sort_unstable();
    c.sort_unstable();
    if t[0] < c[0] {
        [t, c]
    } else {
        [c, t]
    }
}

/// Classes of ideal vertices of the hexahedral complex at the equal weight,
/// found by union-find across the face pairings.
pub fn cusp_classes(complex: &GluedComplex) -> Result<Vec<CuspClass>, ComplexError> {
    if complex.n != 6 {
        return Err(ComplexError::UnsupportedSize(complex.n));
    }
    if !complex.theta.is_equal_weight(1e-12) {
        return Err(ComplexError::NotEqualWeight);
    }
    let cells = complex.cells.len();
    let id = |cell: usize, k: usize| cell * 3 + k;
    let mut uf = UnionFind::<usize>::new(cells * 3);
    let through = |slot: Slot| -> Vec<CuspIncidence> {
        (0..3)
            .map(|k| CuspIncidence { cell: slot.cell, k })
            .filter(|c| c.facets().contains(&slot.facet))
            .collect()
    };
    for p in &complex.pairings {
        let (ma, mb) = (complex.marking(p.a.cell), complex.marking(p.b.cell));
        for a in through(p.a) {
            for b in through(p.b) {
                if triple_partition(&ma, a.k) == triple_partition(&mb, b.k) {
                    uf.union(id(a.cell, a.k), id(b.cell, b.k));
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<CuspIncidence>> = BTreeMap::new();
    for cell in 0..cells {
        for k in 0..3 {
            groups.entry(uf.find(id(cell, k))).or_default().push(CuspIncidence { cell, k });
        }
    }
    let mut out: Vec<CuspClass> = groups
        .into_values()
        .map(|incidences| CuspClass {
            partition: triple_partition(&complex.marking(incidences[0].cell), incidences[0].k),
            incidences,
        })
        .collect();
    out.sort_by(|a, b| a.partition.cmp(&b.partition).then(a.incidences.cmp(&b.incidences)));
    Ok(out)
}

/// A class of edges along which the hexahedra meet at angles other than
/// `π/2`, with the total angle around it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularEdge {
    pub key: String,
    pub corners: Vec<Corner>,
    pub dihedrals: Vec<f64>,
    pub cone_angle: f64,
}

/// Edges created by three points colliding, with their cone angles.
pub fn singular_edges(complex: &GluedComplex) -> Result<Vec<SingularEdge>, ComplexError> {
    if complex.n != 6 {
        return Err(ComplexError::UnsupportedSize(complex.n));
    }
    let n = complex.n;
    let mut models = HashMap::new();
    let mut out = Vec::new();
    for class in &complex.corner_classes {
        let adjacent = |c: &Corner| c.facets[1] == c.facets[0] + 1 || (c.facets[0] == 0 && c.facets[1] == n - 1);
        if !class.corners.iter().all(adjacent) {
            continue;
        }
        let mut dihedrals = Vec::with_capacity(class.corners.len());
        for c in &class.corners {
            if let std::collections::hash_map::Entry::Vacant(e) = models.entry(c.cell) {
                e.insert(build_model(&complex.theta, &complex.marking(c.cell))?);
            }
            dihedrals.push(models[&c.cell].dihedral_angle(c.facets[0], c.facets[1])?);
        }
        out.push(SingularEdge {
            key: class.key.clone(),
            corners: class.corners.clone(),
            cone_angle: dihedrals.iter().sum(),
            dihedrals,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = ComplexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(ComplexError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Json => "json",
            ExportFormat::Csv => "csv",
        })
    }
}

/// The complex as a JSON value: cells, pairings and corner classes, plus
/// the Euler characteristic (`n = 5`) or cusp classes (`n = 6`, equal weight).
pub fn adjacency_document(complex: &GluedComplex) -> Result<serde_json::Value, ComplexError> {
    let label = |cell: usize| complex.cells[cell].to_string();
    let slot = |s: &Slot| json!({"cell": s.cell, "label": label(s.cell), "facet": s.facet});
    let cells: Vec<_> = complex
        .cells
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let m = l.marking();
            let faces: Vec<String> = (0..complex.n).map(|j| face_config(&m, j).map(|c| c.to_string())).collect::<Result<_, _>>()?;
            Ok(json!({"index": i, "label": l.to_string(), "faces": faces}))
        })
        .collect::<Result<_, ComplexError>>()?;
    let pairings: Vec<_> =
        complex.pairings.iter().map(|p| json!({"key": p.key, "a": slot(&p.a), "b": slot(&p.b)})).collect();
    let classes: Vec<_> = complex
        .corner_classes
        .iter()
        .map(|c| {
            let corners: Vec<_> =
                c.corners.iter().map(|k| json!({"cell": k.cell, "label": label(k.cell), "facets": k.facets})).collect();
            json!({"key": c.key, "size": c.corners.len(), "corners": corners})
        })
        .collect();
    let mut doc = json!({
        "schema": SCHEMA,
        "version": env!("CARGO_PKG_VERSION"),
        "n": complex.n,
        "theta": complex.theta.angles(),
        "cells": cells,
        "pairings": pairings,
        "corner_classes": classes,
    });
    if complex.n == 5 {
        doc["euler_characteristic"] = json!(euler_characteristic(complex)?);
    } else if complex.theta.is_equal_weight(1e-12) {
        let cusps: Vec<_> = cusp_classes(complex)?
            .iter()
            .map(|c| json!({"partition": c.partition, "size": c.incidences.len()}))
            .collect();
        doc["cusp_classes"] = json!(cusps);
    }
    Ok(doc)
}

/// Deterministic serialization of the complex. JSON carries everything;
/// CSV lists one pairing per row.
pub fn export_adjacency(complex: &GluedComplex, format: ExportFormat) -> Result<String, ComplexError> {
    match format {
        ExportFormat::Json => {
            let doc = adjacency_document(complex)?;
            crate::json::to_string(&doc).map_err(|e| ComplexError::Export(e.to_string()))
        }
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| ComplexError::Export(e.to_string());
            w.write_record(["schema", "key", "cell_a", "label_a", "facet_a", "cell_b", "label_b", "facet_b"])
                .map_err(err)?;
            for p in &complex.pairings {
                w.write_record([
                    SCHEMA.to_string(),
                    p.key.clone(),
                    p.a.cell.to_string(),
                    complex.cells[p.a.cell].to_string(),
                    p.a.facet.to_string(),
                    p.b.cell.to_string(),
                    complex.cells[p.b.cell].to_string(),
                    p.b.facet.to_string(),
                ])
                .map_err(err)?;
            }
            let bytes = w.into_inner().map_err(|e| ComplexError::Export(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
        }
    }
}
