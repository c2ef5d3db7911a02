//! The numerical core instantiated at `f32`. Property tolerances are
//! calibrated for `f64`, so these tests only ask for single-precision
//! agreement.

use dtnlab::dtn::{build_dtn, build_robin};
use dtnlab::fem::{assemble, CoefficientField};
use dtnlab::{Mesh32, Mesh64};
use dtnlab::mesh::Preset;

#[test]
fn disk_steklov_spectrum_in_single_precision() {
    let m: Mesh32 = Mesh32::preset(Preset::Disk, 2).unwrap().refined(2);
    let b = assemble(&m, &CoefficientField::laplacian(&m)).unwrap();
    let dec = build_dtn(&b, b.default_gate_tol()).unwrap().spectrum().unwrap();
    let oracle = [0.0f32, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
    for (l, o) in dec.values().iter().zip(oracle) {
        assert!((l - o).abs() <= 0.03 * o.max(1.0), "{l} vs {o}");
    }
}

#[test]
fn single_and_double_precision_agree() {
    let m64: Mesh64 = Mesh64::preset(Preset::Annulus, 2).unwrap().refined(1);
    let m32: Mesh32 = m64.cast();
    let b64 = assemble(&m64, &CoefficientField::laplacian(&m64).with_uniform_potential(1.0)).unwrap();
    let b32 = assemble(&m32, &CoefficientField::laplacian(&m32).with_uniform_potential(1.0)).unwrap();
    let d64 = build_robin(&b64).spectrum().unwrap();
    let d32 = build_robin(&b32).spectrum().unwrap();
    let scale = d64.values().iter().fold(1.0f64, |a, x| a.max(x.abs()));
    for (a, b) in d64.values().iter().zip(d32.values()) {
        assert!((a - *b as f64).abs() <= 1e-4 * scale, "{a} vs {b}");
    }
    let k = d32.kernel_matrix(0.5).unwrap();
    assert!(k.min_entry() > 0.0);
    let ones = k.weighted_row_sums();
    // V = 1, β = 0: S_t 𝟙 = e^{-t} 𝟙.
    assert!(ones.iter().all(|v| (v - (-0.5f32).exp()).abs() < 1e-4));
}
