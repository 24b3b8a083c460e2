#include "qlgc/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlgc/constants.hpp"
#include "qlgc/error.hpp"

namespace qlgc {

namespace {

constexpr double kDistinctFrequencyTolerance = 1e-9;

bool same_frequency(double a, double b) {
  return std::abs(a - b) <= kDistinctFrequencyTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

LevelSystem build_ladder_system(std::vector<double> energies, std::vector<double> dipoles,
                                std::vector<double> lifetimes, std::string name) {
  const std::size_t n = energies.size();
  if (n < 2) throw InputError("a ladder system needs at least two levels");
  if (dipoles.size() != n - 1) {
    std::ostringstream msg;
    msg << "expected " << n - 1 << " transition dipoles for " << n << " levels, got "
        << dipoles.size();
    throw InputError(msg.str());
  }
  for (double e : energies) {
    if (!std::isfinite(e)) throw InputError("energies must be finite");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(energies[i + 1] > energies[i])) {
      std::ostringstream msg;
      msg << "energies must be strictly increasing (E_" << i + 1 << " >= E_" << i + 2 << ")";
      throw InputError(msg.str());
    }
  }
  for (double d : dipoles) {
    if (!(d > 0.0) || !std::isfinite(d)) throw InputError("transition dipoles must be positive");
  }
  for (double tau : lifetimes) {
    if (!(tau > 0.0)) throw InputError("lifetimes must be positive");
  }

  std::vector<double> frequencies(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    frequencies[i] = (energies[i + 1] - energies[i]) / constants::hbar;
  }
  for (std::size_t a = 0; a < frequencies.size(); ++a) {
    for (std::size_t b = a + 1; b < frequencies.size(); ++b) {
      if (same_frequency(frequencies[a], frequencies[b])) {
        std::ostringstream msg;
        msg << "transitions " << a + 1 << " and " << b + 1
            << " share a frequency; they cannot be addressed selectively";
        throw DistinctFrequencyError(msg.str());
      }
    }
  }

  LevelSystem system;
  system.name = std::move(name);
  system.energies = std::move(energies);
  system.dipoles = std::move(dipoles);
  system.frequencies = std::move(frequencies);
  system.lifetimes = std::move(lifetimes);
  return system;
}

LevelSystem morse_system(double omega0, double anharmonicity, double dipole_unit, int levels,
                         std::string name) {
  if (levels < 2) throw InputError("a Morse ladder needs at least two levels");
  if (!(omega0 > 0.0)) throw InputError("Morse frequency must be positive");
  if (anharmonicity < 0.0) throw InputError("Morse anharmonicity must be non-negative");
  if (!(dipole_unit > 0.0)) throw InputError("dipole unit must be positive");

  std::vector<double> energies(levels);
  std::vector<double> dipoles(levels - 1);
  for (int n = 1; n <= levels; ++n) {
    const double v = n - 0.5;
    energies[n - 1] = constants::hbar * omega0 * v * (1.0 - 0.5 * anharmonicity * v);
  }
  for (int n = 1; n < levels; ++n) dipoles[n - 1] = dipole_unit * std::sqrt(double(n));
  return build_ladder_system(std::move(energies), std::move(dipoles), {}, std::move(name));
}

LevelSystem rb4_preset() {
  // Transition frequencies are nominal (5S-5P3/2 at 780 nm, 5P3/2-4D at
  // 1.53 um, 4D-6P3/2 in the mid infrared). Interaction-picture dynamics do
  // not depend on them; only their distinctness and the declared minimum
  // detuning enter the validity checks.
  const std::vector<double> frequencies = {2.4153e15, 1.2314e15, 0.6523e15};
  // Dipoles reconstructed from the pi-pulse lengths at a 1e5 V/m field:
  // square pulses 124.2, 132.7, 697.1 ps (tau0 = 20 ps) and Gaussian pulses
  // 235.1, 254.7, 1528.2 ps, least squares per transition. In units of
  // p0 = 4.89e-29 C m these are 0.650, 0.600 and 0.100.
  std::vector<double> dipoles = {3.18011e-29, 2.93619e-29, 4.89258e-30};

  std::vector<double> energies(4, 0.0);
  for (int m = 0; m < 3; ++m) energies[m + 1] = energies[m] + constants::hbar * frequencies[m];

  LevelSystem system = build_ladder_system(std::move(energies), std::move(dipoles),
                                           {28e-9, 90e-9, 107e-9}, "rb4");
  system.min_detuning_override = rb::min_detuning;
  return system;
}

LevelSystem hf4_preset() {
  return morse_system(hf::omega0, hf::anharmonicity, hf::dipole_unit, 4, "hf4");
}

std::optional<LevelSystem> find_preset(std::string_view name) {
  if (name == "rb4") return rb4_preset();
  if (name == "hf4") return hf4_preset();
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"rb4", "hf4"}; }

double min_detuning(const LevelSystem& system) {
  if (system.min_detuning_override) return *system.min_detuning_override;
  double best = std::numeric_limits<double>::infinity();
  const auto& w = system.frequencies;
  for (std::size_t a = 0; a < w.size(); ++a) {
    for (std::size_t b = a + 1; b < w.size(); ++b) best = std::min(best, std::abs(w[a] - w[b]));
  }
  return best;
}

ValidityBudget validity_budget(const LevelSystem& system) {
  ValidityBudget budget{min_detuning(system), std::nullopt};
  if (!system.lifetimes.empty()) {
    budget.min_lifetime = *std::min_element(system.lifetimes.begin(), system.lifetimes.end());
  }
  return budget;
}

}  // namespace qlgc
