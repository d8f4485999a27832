//! Deterministic ray tracing: reflections, obstacle transmissions and edge
//! diffraction, with full polarimetric field bookkeeping.

pub mod antenna;
pub mod config;
pub mod facets;
pub mod field;
pub mod fresnel;
pub mod path;
pub mod simulate;
pub mod trace;
pub mod utd;

pub use antenna::{dipole_gain, DIPOLE_PEAK_GAIN};
pub use config::{DiffractionEdges, PropagationConfig, TransmissionCounting};
pub use field::{path_field, received_power, FieldContribution};
pub use fresnel::{fresnel_coefficients, Polarization};
pub use path::{Counts, Interaction, InteractionKind, Medium, RayPath, Reference};
pub use simulate::{simulate_radio_map, simulate_radio_map_with_workers};
pub use trace::{trace_paths, Tracer};
pub use utd::{utd_wedge_coefficient, Wedge, WedgeFaces};
