#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qlgc {

/// An N-level ladder: only adjacent levels |m> <-> |m+1> are dipole coupled.
///
/// Index conventions follow the physics: transition m (1-based) couples
/// levels m and m+1 and is stored at position m-1 of `dipoles` and
/// `frequencies`. Immutable once built through `build_ladder_system`.
struct LevelSystem {
  std::string name;
  std::vector<double> energies;     // J, strictly increasing
  std::vector<double> dipoles;      // C m, one per transition
  std::vector<double> frequencies;  // rad/s, one per transition
  std::vector<double> lifetimes;    // s, excited-state lifetimes; may be empty
  std::optional<double> min_detuning_override;  // rad/s

  int levels() const { return static_cast<int>(energies.size()); }
  int transitions() const { return levels() - 1; }
  double dipole(int transition) const { return dipoles.at(transition - 1); }
  double frequency(int transition) const { return frequencies.at(transition - 1); }
};

struct ValidityBudget {
  double min_detuning;                // rad/s, +inf for a two-level system
  std::optional<double> min_lifetime;  // s
};

/// Builds a ladder from energies and dipoles; transition frequencies are
/// derived as (E_{m+1} - E_m)/hbar.
///
/// Throws InputError on inconsistent lengths, non-increasing energies or
/// non-positive dipoles, and DistinctFrequencyError if two transition
/// frequencies coincide to 1e-9 relative.
LevelSystem build_ladder_system(std::vector<double> energies, std::vector<double> dipoles,
                                std::vector<double> lifetimes = {},
                                std::string name = "custom");

/// Morse ladder: E_n = hbar w0 (n - 1/2)[1 - (B/2)(n - 1/2)], d_n = p0 sqrt(n).
/// Adjacent gaps are hbar w0 (1 - B n).
LevelSystem morse_system(double omega0, double anharmonicity, double dipole_unit, int levels,
                         std::string name = "morse");

/// Four electronic levels of 87Rb (5S1/2, 5P3/2, 4D, 6P3/2), hyperfine
/// structure ignored.
LevelSystem rb4_preset();

/// Lowest four vibrational levels of the HF Morse model.
LevelSystem hf4_preset();

/// Preset lookup by name ("rb4", "hf4"); nullopt for unknown names.
std::optional<LevelSystem> find_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Minimum detuning from off-resonant transitions: the smallest pairwise gap
/// between transition frequencies, or the system's declared override.
double min_detuning(const LevelSystem& system);

ValidityBudget validity_budget(const LevelSystem& system);

/// Morse parameters of the HF preset.
namespace hf {
inline constexpr double omega0 = 0.78e15;      // rad/s
inline constexpr double anharmonicity = 0.0419;
inline constexpr double dipole_unit = 3.24e-31;  // C m
}  // namespace hf

namespace rb {
inline constexpr double dipole_unit = 4.89e-29;   // C m
inline constexpr double min_detuning = 4e14;      // rad/s
}  // namespace rb

}  // namespace qlgc
