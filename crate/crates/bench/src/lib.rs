//! Benchmark fixtures.

use gsqg_core::experiments::initial::RoughParams;
use gsqg_core::experiments::InitialRecipe;
use gsqg_core::SpectralField;

pub const GRID_SIZES: [usize; 3] = [64, 128, 256];

/// Seeded rough datum filling the dealiased band of an `m x m` grid.
pub fn rough_datum(m: usize) -> SpectralField {
    InitialRecipe::Rough(RoughParams {
        amplitude: 0.1,
        exponent: 1.55,
        kmin: 1.0,
        kmax: m as f64 / 3.0,
        seed: 11,
    })
    .field(m, 0.01, None)
    .expect("rough datum")
}
