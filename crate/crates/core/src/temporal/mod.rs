//! Time-domain multiplexing: rastering, rastered permutation networks and
//! de Bruijn delay networks.

pub mod debruijn;
pub mod mux;
pub mod permutation;
pub mod raster;

pub use debruijn::{de_bruijn, reduced_de_bruijn, window_oracle, DeBruijnSequence, MAX_WORDS};
pub use mux::{
    debruijn_mux_route, debruijn_pmux_exact, debruijn_pmux_mc, debruijn_pmux_single, extract_groups, replay_debruijn, replay_spatiotemporal,
    routable_counts, spatiotemporal_debruijn, spatiotemporal_group_probabilities, DeBruijnSchedule, DelayNetwork, PmuxEnumeration,
    SpaceTimeOccupancy, SpatioTemporalRoute,
};
pub use permutation::{replay_permutation, sort_to_top, temporal_permutation, Arrival, PermutationSchedule, PermutationVariant};
pub use raster::{count_groups, enhanced_raster_rate, enhanced_raster_yield, raster_simulate, RasterSimulation};
