//! Dyadic cubes, sectors and the auxiliary geometry of the bilinear decomposition.

mod cubes;
mod feta;
mod gaps;
mod levelset;
mod sectors;

pub use cubes::{enumerate_cubes, whitney_related, DyadicCube};
pub use feta::{a1_exact, f_eta, hessian_bounds_scan, hessian_f_eta, sym_eigenvalues, HessianScan, Mat2, Witness};
pub use sectors::{
    a1_sup, angle_between, build_sectors, theta_bar_scan, DecompositionConfig, Sector, SectorDecomposition,
    DEFAULT_N_WHITNEY, THETA_BAR_CAP,
};
pub use gaps::{
    adjacent_pairs_in_sector, center_estimates, overlap_count, related_pairs_in_sector, sumset_gap_stats, CenterStats,
    CubePair, GapStats, OverlapReport,
};
pub use levelset::{
    level_function, levelset_comparability, levelset_radius, levelset_ratio, levelset_ratio_at, psi_eta,
    psi_reciprocal_max, ComparabilityReport, RatioReport,
};
