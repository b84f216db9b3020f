#ifndef SDA_SYNTHESIS_HPP
#define SDA_SYNTHESIS_HPP

#include <string>
#include <vector>

#include "sda/geometry.hpp"
#include "sda/metrics.hpp"
#include "sda/qp.hpp"

namespace sda {

using Real = double;

struct SynthesisConfig {
  Direction<Real> look{kPi<Real> / 2, 0};
  Real epsilon_db{-30};
  Real sidelobe_level_db{-25};
  Real delta_db{0.5};
  int max_outer_iterations{10};
  int max_pin_iterations{50};
  Real epsilon_step_db{1};
  Real grid_deg{1};
  // worst sidelobe may exceed the target by this much at convergence
  Real convergence_tol_db{0.1};
  // peaks within this distance below the target are re-pinned
  Real pin_margin_db{0.5};
  QuadratureSpec quadrature{};

  void validate() const;
};

enum class SynthesisStatus { converged, sidelobe_infeasible, rein_infeasible };

std::string to_string(SynthesisStatus status);

struct PinnedPeak {
  Direction<Real> dir;
  Complex<Real> target;
};

/// One pass through the pinning loop, recorded for the weight it produced.
struct IterationRecord {
  int outer{0};
  int pin_iteration{0};
  Real epsilon0_db{0};
  Real norm_bound{0};
  Real norm2{0};
  Real mu{0};
  bool ball_active{false};
  Real worst_sidelobe_db{0};
  Real gamma_db{0};
  Real directivity_db{0};
  Real objective{0};
  std::size_t pinned{0};
  WeightVector<Real> w;
};

struct SynthesisResult {
  SynthesisStatus status{SynthesisStatus::converged};
  WeightVector<Real> w_opt;
  Real directivity_db{0};
  Real gamma_db{0};
  Real dmax_db{0};
  Real epsilon_final_db{0};
  Real worst_sidelobe_db{0};
  Real mainlobe_exclusion_rad{0};
  std::vector<PinnedPeak> pinned_peaks;
  std::vector<IterationRecord> iterations;
  std::vector<std::string> dropped_rows;
  std::vector<std::string> notes;
  Real loading{0};
  Eigen::Index mainlobe_rows{0};
};

/// Maximum number of sidelobe points that can be pinned with N sensors and M mainlobe rows.
int m_max(int n_sensors, int mainlobe_rows);

/// Desired complex pattern value at a pinned peak: magnitude `level`, phase of the current pattern.
/// A zero current value gets zero phase and sets *zero_phase when given.
Complex<Real> pin_target(Complex<Real> current, Real level, bool* zero_phase = nullptr);
std::vector<Complex<Real>> pin_targets(const std::vector<Complex<Real>>& current, Real level,
                                       std::vector<std::size_t>* zero_phase = nullptr);

SynthesisResult synthesize(const SensorArray<Real>& array, const CarrierContext<Real>& ctx,
                           const SynthesisConfig& config);

SynthesisResult synthesize(const SensorArray<Real>& array, const DirectivityMatrices<Real>& mats,
                           const SynthesisConfig& config);

/// REIN of the maximum-directivity weight for an n-sensor UCA of the given radius.
struct MaxDirectivityPoint {
  Real dmax_db{0};
  Real gamma_db{0};
  std::vector<std::string> dropped_rows;
  Real loading{0};
};

MaxDirectivityPoint max_directivity_point(const SensorArray<Real>& array, const CarrierContext<Real>& ctx,
                                          const Direction<Real>& look, const QuadratureSpec& quad = {});

struct RadiusSearch {
  Real radius_m{0};
  Real radius_lambda{0};
  Real gamma_db{0};
  Real dmax_db{0};
  int evaluations{0};
};

/// Radius at which the maximum-directivity REIN of an n-sensor UCA equals epsilon_db (within
/// tol_db). Bisects in log-radius; gamma must increase with radius across the bracket.
RadiusSearch radius_for_rein(int n, const CarrierContext<Real>& ctx, Real epsilon_db, const Direction<Real>& look,
                             const QuadratureSpec& quad = {}, Real tol_db = 0.05);

}  // namespace sda

#endif  // SDA_SYNTHESIS_HPP
