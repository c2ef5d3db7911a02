//! CSV and JSON artifacts. Floating-point values carry 17 significant
//! digits so that files round-trip exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dtnlab::linalg::DenseMatrix;
use dtnlab::mesh::Point;
use dtnlab::spectral::{SemigroupKernel, SpectralDecomposition};
use serde::Serialize;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `kernel_t0.5.csv` for `t = 0.5`.
pub fn kernel_file_name(t: f64) -> String {
    format!("kernel_t{t}.csv")
}

fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_spectrum(path: &Path, values: &[f64]) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "index,eigenvalue")?;
    for (i, &l) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, fmt_f64(l))?;
    }
    w.flush()
}

/// One row per boundary node: `node,x,y,phi_1,...`. `rows` index into the
/// eigenvectors, `nodes[rows[r]]` is the mesh node.
pub fn write_traces(
    path: &Path,
    dec: &SpectralDecomposition<f64>,
    rows: &[usize],
    nodes: &[usize],
    vertices: &[Point<f64>],
) -> std::io::Result<()> {
    let mut w = create(path)?;
    let header: Vec<String> = (1..=dec.len()).map(|k| format!("phi_{k}")).collect();
    writeln!(w, "node,x,y,{}", header.join(","))?;
    let phi = dec.vectors();
    for &r in rows {
        let node = nodes[r];
        let [x, y] = vertices[node];
        let vals: Vec<String> = phi.row(r).iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{node},{},{},{}", fmt_f64(x), fmt_f64(y), vals.join(","))?;
    }
    w.flush()
}

/// Kernel matrix with node ids as header row and first column.
pub fn write_kernel(path: &Path, k: &DenseMatrix<f64>, nodes: &[usize]) -> std::io::Result<()> {
    let mut w = create(path)?;
    let ids: Vec<String> = nodes.iter().map(ToString::to_string).collect();
    writeln!(w, "node,{}", ids.join(","))?;
    for (i, id) in ids.iter().enumerate() {
        let vals: Vec<String> = k.row(i).iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{id},{}", vals.join(","))?;
    }
    w.flush()
}

/// `t, Σ K_t(x,x) m_x, Σ e^{-λ_i t}, max_x Σ_y K_t(x,y) m_y`.
pub fn write_trace_decay(
    path: &Path,
    dec: &SpectralDecomposition<f64>,
    kernels: &[SemigroupKernel<f64>],
) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,kernel_trace,spectral_trace,max_row_sum")?;
    for k in kernels {
        let row_max = k.weighted_row_sums().into_iter().fold(f64::NEG_INFINITY, f64::max);
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(k.t),
            fmt_f64(k.trace()),
            fmt_f64(dec.spectral_trace(k.t)),
            fmt_f64(row_max)
        )?;
    }
    w.flush()
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> std::io::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}
