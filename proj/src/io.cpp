#include "sda/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sda {

std::string format_g6(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

json direction_to_json(const Direction<Real>& d) {
  return {{"theta_deg", rad2deg(d.theta)}, {"phi_deg", rad2deg(d.phi)}};
}

json complex_pair(Complex<Real> z) { return json::array({z.real(), z.imag()}); }

Complex<Real> complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [re, im] pair");
  return {j.at(0).get<Real>(), j.at(1).get<Real>()};
}

// dB values that may be -inf are written as null.
json db_value(Real db) { return std::isfinite(db) ? json(db) : json(nullptr); }

}  // namespace

json array_to_json(const SensorArray<Real>& array) {
  json elems = json::array();
  for (Eigen::Index k = 0; k < array.size(); ++k) {
    const auto p = array.position(k);
    elems.push_back({{"x", p.x()}, {"y", p.y()}, {"z", p.z()}, {"pattern", array.pattern(k).tag}});
  }
  return {{"elements", elems}};
}

SensorArray<Real> array_from_json(const json& doc) {
  if (!doc.contains("elements") || !doc.at("elements").is_array() || doc.at("elements").empty())
    throw ConfigError("layout: 'elements' must be a non-empty list");
  const auto& elems = doc.at("elements");
  SensorArray<Real>::Positions pos(3, Eigen::Index(elems.size()));
  for (std::size_t k = 0; k < elems.size(); ++k) {
    const auto& e = elems[k];
    for (const char* key : {"x", "y", "z"})
      if (!e.contains(key) || !e.at(key).is_number())
        throw ConfigError("layout: element " + std::to_string(k) + " missing numeric '" + key + "'");
    const std::string tag = e.value("pattern", std::string("isotropic"));
    if (tag != "isotropic")
      throw ConfigError("layout: element " + std::to_string(k) + " has unsupported pattern '" + tag + "'");
    pos.col(Eigen::Index(k)) << e.at("x").get<Real>(), e.at("y").get<Real>(), e.at("z").get<Real>();
  }
  return SensorArray<Real>(std::move(pos));
}

json weights_to_json(const WeightVector<Real>& w) {
  json out = json::array();
  for (Eigen::Index k = 0; k < w.size(); ++k) out.push_back(complex_pair(w(k)));
  return out;
}

WeightVector<Real> weights_from_json(const json& doc) {
  if (!doc.is_array()) throw ConfigError("weights: expected a list of [re, im] pairs");
  WeightVector<Real> w(Eigen::Index(doc.size()));
  for (std::size_t k = 0; k < doc.size(); ++k) w(Eigen::Index(k)) = complex_from(doc[k]);
  return w;
}

json composite_to_json(const CompositeArray<Real>& comp) {
  json out = array_to_json(comp.subarray);
  out["count"] = comp.count;
  out["spacing_m"] = comp.spacing;
  out["axis"] = {comp.axis.x(), comp.axis.y(), comp.axis.z()};
  out["excitations"] = weights_to_json(comp.excitations);
  out["weights"] = weights_to_json(comp.subarray_weights);
  return out;
}

CompositeArray<Real> composite_from_json(const json& doc) {
  CompositeArray<Real> comp;
  comp.subarray = array_from_json(doc);
  comp.count = doc.value("count", Eigen::Index(1));
  comp.spacing = doc.value("spacing_m", 0.0);
  if (doc.contains("axis")) {
    const auto& a = doc.at("axis");
    if (!a.is_array() || a.size() != 3) throw ConfigError("composite: 'axis' must be [x, y, z]");
    comp.axis = Vector3<Real>(a[0].get<Real>(), a[1].get<Real>(), a[2].get<Real>()).normalized();
  }
  comp.excitations = doc.contains("excitations") ? weights_from_json(doc.at("excitations"))
                                                 : ComplexVector<Real>::Ones(comp.count);
  comp.subarray_weights = doc.contains("weights") ? weights_from_json(doc.at("weights"))
                                                  : WeightVector<Real>::Ones(comp.subarray.size());
  try {
    comp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return comp;
}

json directivity_matrices_to_json(const DirectivityMatrices<Real>& mats) {
  auto matrix = [](const ComplexMatrix<Real>& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_pair(m(i, j)));
      rows.push_back(row);
    }
    return rows;
  };
  return {{"f0_hz", mats.ctx.f0},
          {"c_m_per_s", mats.ctx.c},
          {"look", direction_to_json(mats.look)},
          {"quadrature", {{"n_theta", mats.quadrature.n_theta}, {"n_phi", mats.quadrature.n_phi}}},
          {"A", matrix(mats.A)},
          {"B", matrix(mats.B)}};
}

json synthesis_result_to_json(const SynthesisResult& r) {
  json pins = json::array();
  for (const auto& p : r.pinned_peaks) {
    json j = direction_to_json(p.dir);
    j["target"] = complex_pair(p.target);
    pins.push_back(j);
  }
  json trace = json::array();
  for (const auto& it : r.iterations) {
    trace.push_back({{"outer", it.outer},
                     {"pin_iteration", it.pin_iteration},
                     {"epsilon0_dB", it.epsilon0_db},
                     {"norm_bound", it.norm_bound},
                     {"norm2", it.norm2},
                     {"mu", it.mu},
                     {"ball_active", it.ball_active},
                     {"worst_sidelobe_dB", db_value(it.worst_sidelobe_db)},
                     {"gamma_dB", it.gamma_db},
                     {"directivity_dB", it.directivity_db},
                     {"objective", it.objective},
                     {"pinned", it.pinned}});
  }
  return {{"status", to_string(r.status)},
          {"weights", weights_to_json(r.w_opt)},
          {"directivity_dB", r.directivity_db},
          {"gamma_dB", r.gamma_db},
          {"dmax_dB", r.dmax_db},
          {"epsilon_final_dB", r.epsilon_final_db},
          {"worst_sidelobe_dB", db_value(r.worst_sidelobe_db)},
          {"mainlobe_exclusion_deg", rad2deg(r.mainlobe_exclusion_rad)},
          {"pinned_peaks", pins},
          {"iterations", trace},
          {"diagnostics",
           {{"dropped_rows", r.dropped_rows},
            {"mainlobe_rows", r.mainlobe_rows},
            {"diagonal_loading", r.loading},
            {"notes", r.notes}}}};
}

void write_pattern_csv(std::ostream& out, const PatternGrid<Real>& grid, Complex<Real> reference) {
  const Real ref = std::abs(reference);
  out << "theta_deg,phi_deg,re,im,magnitude_dB\n";
  for (std::size_t i = 0; i < grid.theta.size(); ++i) {
    for (std::size_t j = 0; j < grid.phi.size(); ++j) {
      const Complex<Real> v = grid.values(Eigen::Index(i), Eigen::Index(j));
      const Real rel = std::abs(v) / ref;
      const Real db = rel > 0 ? std::max(Real(-400), 20 * std::log10(rel)) : Real(-400);
      out << format_g6(rad2deg(grid.theta[i])) << ',' << format_g6(rad2deg(grid.phi[j])) << ','
          << format_g6(v.real()) << ',' << format_g6(v.imag()) << ',' << format_g6(db) << '\n';
    }
  }
}

void write_polar_svg(std::ostream& out, const PolarTrace& trace, Real look_phi, const std::string& title,
                     Real floor_db) {
  const Real size = 480, cx = 240, cy = 250, rmax = 200;
  auto radius = [&](Real db) { return rmax * (std::max(db, floor_db) - floor_db) / -floor_db; };
  auto fmt = [](Real v) { return format_g6(v); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << cx << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
  for (int ring = 0; ring <= 3; ++ring) {
    const Real db = floor_db * ring / 3.0;
    out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << fmt(radius(db))
        << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    out << "<text x=\"" << fmt(cx + 3) << "\" y=\"" << fmt(cy - radius(db) - 2) << "\" fill=\"#888\">"
        << fmt(db) << " dB</text>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i <= trace.phi_rad.size() && !trace.phi_rad.empty(); ++i) {
    const std::size_t k = i % trace.phi_rad.size();
    const Real r = radius(trace.magnitude_db[k]);
    out << fmt(cx + r * std::cos(trace.phi_rad[k])) << ',' << fmt(cy - r * std::sin(trace.phi_rad[k])) << ' ';
  }
  out << "\"/>\n";
  out << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << fmt(cx + rmax * std::cos(look_phi)) << "\" y2=\""
      << fmt(cy - rmax * std::sin(look_phi)) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  out << "</svg>\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << contents;
}

}  // namespace sda
