#pragma once

// Unit system throughout the library: lengths in nm, energies in eV,
// effective masses as ratios m*/m0, electric fields in kV/cm.

namespace qrom::units {

inline constexpr double kHbar = 1.054571817e-34;            // J s
inline constexpr double kElectronMass = 9.1093837015e-31;   // kg
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

/// hbar^2 / (2 m0) in eV nm^2 (about 0.0380998).
inline constexpr double kHbar2Over2m0 =
    kHbar * kHbar / (2.0 * kElectronMass) / kElementaryCharge * 1.0e18;

/// Potential-energy slope seen by an electron in a 1 kV/cm field, eV/nm.
/// 1 kV/cm = 1e5 V/m = 1e-4 V/nm.
inline constexpr double kFieldSlopePerKvCm = 1.0e-4;

}  // namespace qrom::units
