//! Model operators for ℤ₂ spectral flow experiments: a Kitaev chain with a
//! flux insertion in two gauges, symmetric disorder, and a Rice-Mele pump
//! with its BdG doubling.

pub mod bdg;
pub mod disorder;
pub mod error;
pub mod flow;
pub mod io;
pub mod kitaev;
pub mod pump;

pub use bdg::{bdg_residual, from_majorana, hermitian_eigen, hermitian_eigenvalues, majorana_rep, C64};
pub use error::{ModelError, Result};
pub use flow::{complex_spectral_flow, FlowOptions, FlowReport};
pub use kitaev::{
    defect_kernel_parity, flux_sf2, gauge_transform, halfline_split, kitaev_hamiltonian,
    symmetry_suite, Boundary, DefectReport, FluxGauge, FluxReport, GaugeKind, GaugeTransform,
    HalflineSplit, KitaevConfig, SuiteItem,
};
pub use pump::{z2_polarization, PolarizationReport, PumpConfig, RiceMele};
