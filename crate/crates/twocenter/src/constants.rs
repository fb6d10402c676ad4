//! Physical constants. Energies are in Rydberg, lengths in bohr.

/// Fine-structure constant (CODATA 2018).
pub const FINE_STRUCTURE: f64 = 7.2973525693e-3;

/// Bohr magneton in Rydberg atomic units (e = 1, m = 1/2, hbar = 1, c = 2/alpha).
pub const BOHR_MAGNETON: f64 = FINE_STRUCTURE / 2.0;
