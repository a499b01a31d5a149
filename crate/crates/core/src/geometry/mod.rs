//! Lattice sites, region predicates and the constructive lattice-geometry checks.

mod constructions;
mod region;
mod site;

pub use constructions::{
    boundary_partition, check_edge_disjoint, disjoint_detours, distance_to_segment,
    halfspace_projection, nearest_interior_distance, partition_census, projection_paths,
    segment_path, verify_connectivity, verify_detours_along_segment, DetourReport,
    PartitionCensus, PartitionWitness, Segment,
};
pub use region::{
    box_sites, classify, default_collar, Direction, RegionSpec, SiteClass, BALL_MARGIN,
};
pub use site::{CanonicalEdge, Site, COORD_LIMIT, MAX_DIM};

/// A lattice path given by its vertex sequence. A path with no steps is empty.
pub type LatticePath = Vec<Site>;

/// Number of edges of a path.
pub fn path_steps(path: &[Site]) -> usize {
    path.len().saturating_sub(1)
}
