use serde::{Deserialize, Serialize};

/// Numeric tolerances used across the crate. Every threshold lives here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Margin from the unit circle for interior points.
    pub boundary: f64,
    /// Width of the parabolic band around |trace| = 2.
    pub trace: f64,
    /// Matrix distance to +-identity.
    pub identity: f64,
    /// Angular snapping distance to arc endpoints.
    pub snap: f64,
    /// Interior angles of the constructed triangle.
    pub angle: f64,
    /// Quantization grid for vertex keys.
    pub vertex_grid: f64,
    /// Euclidean distance under which two vertices are the same.
    pub vertex_match: f64,
    /// Edge endpoint validation.
    pub edge: f64,
    /// Generator relation check.
    pub relation: f64,
    /// Convergence threshold of the normal extremity iteration (boundary angle).
    pub extremity: f64,
    pub extremity_max_iter: usize,
    /// Tiling gap / overlap of spectacles.
    pub tiling: f64,
    /// Axis endpoint agreement for exceptional pairs.
    pub axis: f64,
    /// Largest number of vertices a graph ball may hold.
    pub vertex_cap: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        boundary: 1e-12,
        trace: 1e-9,
        identity: 1e-10,
        snap: 1e-11,
        angle: 1e-10,
        vertex_grid: 1e-7,
        vertex_match: 1e-7,
        edge: 1e-8,
        relation: 1e-9,
        extremity: 1e-9,
        extremity_max_iter: 200,
        tiling: 1e-9,
        axis: 1e-7,
        vertex_cap: 200_000,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
