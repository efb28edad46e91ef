//! Ball growth, comparison fields, and weak-L2 energy estimates for planar
//! vortex currents.
//!
//! The crate models a finite set of planar points carrying unit vortices
//! against a background measure. Around such a configuration it constructs
//! the multiplicative ball-growth family, the annuli swept between merge
//! events, their minimal concentric rearrangement, a piecewise vortex
//! comparison field, and the renormalized energy of the current, and it
//! estimates weak-L2 quantities of the fields on sampling grids. The
//! `verify` module assembles these pieces into checkable bounds.

pub mod annuli;
pub mod background;
pub mod config;
pub mod cutoff;
pub mod energy;
pub mod error;
pub mod field;
pub mod growth;
pub mod lattice;
pub mod lorentz;
pub mod plane;
pub mod quad;
pub mod region;
pub mod svg;
pub mod verify;

pub use annuli::{
    annuli_from_trace, mcr_brute, mcr_exact, mcr_paper_partition, AnnuliCollection, Annulus,
    McrPartition,
};
pub use background::BackgroundMeasure;
pub use config::{Instance, PointConfig};
pub use cutoff::{Cutoff, RampShape};
pub use energy::{
    energy_density, renormalized_energy, truncated_energy, DensityPoint, EnergyOpts, EnergyReport,
};
pub use error::{Error, Result};
pub use field::{comparison_field, synthetic_current, AnalyticField, Term};
pub use growth::{grow, initial_collection, GrowthTrace};
pub use lattice::{
    hex_disc, hex_shells, hex_spacing, line_segment, poisson_box, square_disc, square_spacing,
};
pub use lorentz::SampledField;
pub use plane::{Ball, Point2};
pub use region::Region;
pub use verify::{
    build_covering, check_annulus_bounds, check_corollary, check_theorem_main, compare_lattices,
    line_lattice_study, localized_construction, scaling_study, Construction, CorollaryReport,
    InequalityRecord, LatticeComparison, LineLatticeStudy, ScalingReport, VerifyOpts, VerifyReport,
};
