#ifndef SDA_CONFIG_HPP
#define SDA_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sda/io.hpp"
#include "sda/synthesis.hpp"

namespace sda {

// External-noise dominance floors (MHz -> dB) for 4..12 MHz.
const std::map<Real, Real>& default_epsilon_table();

struct ArraySpec {
  int n{5};
  Real radius_m{3};
  Real rotation_deg{0};
  std::optional<SensorArray<Real>> layout;

  SensorArray<Real> build() const;
};

struct CompositeSpec {
  Eigen::Index count{8};
  Real spacing_m{15};
  Vector3<Real> axis{Vector3<Real>::UnitX()};
  std::optional<ComplexVector<Real>> excitations;
};

enum class SweepVariable { radius_m, radius_lambda, f_mhz, n };

struct SweepSpec {
  SweepVariable variable{SweepVariable::radius_lambda};
  std::vector<Real> values;
  std::vector<int> n_values;
};

struct RunConfig {
  ArraySpec array;
  std::vector<Real> f_mhz{4, 6, 8, 10, 12};
  Direction<Real> look{kPi<Real> / 2, 0};
  std::map<Real, Real> epsilon_db = default_epsilon_table();
  Real sidelobe_db{-25};
  Real delta_db{0.5};
  Real grid_deg{1};
  QuadratureSpec quadrature{};
  std::optional<CompositeSpec> composite;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed{1};

  /// Floor for a frequency; ConfigError naming the frequency when absent.
  Real epsilon_for(Real f_mhz) const;
  SynthesisConfig synthesis_config(Real f_mhz) const;
};

RunConfig parse_run_config(const json& doc);
RunConfig load_run_config(const std::string& path);

/// "64x128" -> {64, 128}.
QuadratureSpec parse_quadrature(const std::string& text);

}  // namespace sda

#endif  // SDA_CONFIG_HPP
