#ifndef SDA_IO_HPP
#define SDA_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sda/composite.hpp"
#include "sda/synthesis.hpp"

namespace sda {

using json = nlohmann::json;

// Six significant digits, locale independent.
std::string format_g6(double value);

// Layout schema: {"elements": [{"x": m, "y": m, "z": m, "pattern": "isotropic"}, ...]}
json array_to_json(const SensorArray<Real>& array);
SensorArray<Real> array_from_json(const json& doc);

// Layout schema plus {"count", "spacing_m", "axis": [x, y, z], "excitations": [[re, im], ...],
// "weights": [[re, im], ...]}
json composite_to_json(const CompositeArray<Real>& comp);
CompositeArray<Real> composite_from_json(const json& doc);

json weights_to_json(const WeightVector<Real>& w);
WeightVector<Real> weights_from_json(const json& doc);

json directivity_matrices_to_json(const DirectivityMatrices<Real>& mats);
json synthesis_result_to_json(const SynthesisResult& result);

/// CSV with header theta_deg,phi_deg,re,im,magnitude_dB; magnitude is relative to |reference|
/// and clipped below at -400 dB.
void write_pattern_csv(std::ostream& out, const PatternGrid<Real>& grid, Complex<Real> reference);

struct PolarTrace {
  std::vector<Real> phi_rad;
  std::vector<Real> magnitude_db;
};

/// Azimuth cut at fixed theta, normalized to |reference| in dB.
template <typename Response>
PolarTrace azimuth_cut(Response&& response, Real theta, Complex<Real> reference, Real step_deg = 1) {
  PolarTrace t;
  const int n = int(std::lround(360.0 / step_deg));
  for (int j = 0; j < n; ++j) {
    const Real phi = deg2rad(step_deg * j);
    const Real mag = std::abs(response(Direction<Real>(theta, phi))) / std::abs(reference);
    t.phi_rad.push_back(phi);
    t.magnitude_db.push_back(mag > 0 ? 20 * std::log10(mag) : -400.0);
  }
  return t;
}

/// Polar plot of a trace in dB, clipped at floor_db, with a marker at the look azimuth.
void write_polar_svg(std::ostream& out, const PolarTrace& trace, Real look_phi, const std::string& title,
                     Real floor_db = -60);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace sda

#endif  // SDA_IO_HPP
