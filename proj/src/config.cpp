#include "sda/config.hpp"

#include <cmath>
#include <fstream>

namespace sda {

const std::map<Real, Real>& default_epsilon_table() {
  static const std::map<Real, Real> table{{4, -30}, {6, -23}, {8, -19}, {10, -16}, {12, -13}};
  return table;
}

SensorArray<Real> ArraySpec::build() const {
  if (layout) return *layout;
  return make_uca<Real>(n, radius_m, deg2rad(rotation_deg));
}

Real RunConfig::epsilon_for(Real f) const {
  for (const auto& [key, value] : epsilon_db)
    if (std::abs(key - f) <= 1e-9 * std::max(Real(1), std::abs(f))) return value;
  throw ConfigError("epsilon_db: no entry for frequency " + format_g6(f) + " MHz");
}

SynthesisConfig RunConfig::synthesis_config(Real f) const {
  SynthesisConfig cfg;
  cfg.look = look;
  cfg.epsilon_db = epsilon_for(f);
  cfg.sidelobe_level_db = sidelobe_db;
  cfg.delta_db = delta_db;
  cfg.grid_deg = grid_deg;
  cfg.quadrature = quadrature;
  return cfg;
}

namespace {

template <typename T>
T number(const json& doc, const char* field) {
  const auto& v = doc.at(field);
  if (!v.is_number()) throw ConfigError(std::string("field '") + field + "' must be a number");
  return v.get<T>();
}

template <typename T>
T number_or(const json& doc, const char* field, T fallback) {
  return doc.contains(field) ? number<T>(doc, field) : fallback;
}

std::vector<Real> number_list(const json& v, const char* field) {
  if (v.is_number()) return {v.get<Real>()};
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("field '") + field + "' must be a number or list");
  std::vector<Real> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("field '") + field + "' must contain numbers only");
    out.push_back(x.get<Real>());
  }
  return out;
}

}  // namespace

QuadratureSpec parse_quadrature(const std::string& text) {
  const auto x = text.find('x');
  QuadratureSpec q;
  try {
    if (x == std::string::npos) throw std::invalid_argument("missing 'x'");
    q.n_theta = std::stol(text.substr(0, x));
    q.n_phi = std::stol(text.substr(x + 1));
    q.validate();
  } catch (const std::exception& e) {
    throw ConfigError("quadrature: expected NTHETAxNPHI with n_theta >= 8, n_phi >= 16 (" + std::string(e.what()) +
                      ")");
  }
  return q;
}

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;

  if (doc.contains("array")) {
    const auto& a = doc.at("array");
    if (a.contains("layout")) {
      cfg.array.layout = array_from_json(a.at("layout"));
    } else {
      cfg.array.n = number_or<int>(a, "n", cfg.array.n);
      cfg.array.radius_m = number_or<Real>(a, "radius_m", cfg.array.radius_m);
      cfg.array.rotation_deg = number_or<Real>(a, "rotation_deg", cfg.array.rotation_deg);
      if (cfg.array.n < 1) throw ConfigError("field 'array.n' must be >= 1");
      if (!(cfg.array.radius_m >= 0)) throw ConfigError("field 'array.radius_m' must be >= 0");
    }
  }
  if (doc.contains("f_mhz")) {
    cfg.f_mhz = number_list(doc.at("f_mhz"), "f_mhz");
    for (Real f : cfg.f_mhz)
      if (!(f > 0)) throw ConfigError("field 'f_mhz' must be positive");
  }
  if (doc.contains("look_deg")) {
    const auto& l = doc.at("look_deg");
    const Real theta = number_or<Real>(l, "theta", 90);
    if (theta < 0 || theta > 180) throw ConfigError("field 'look_deg.theta' must be in [0, 180]");
    cfg.look = Direction<Real>::from_degrees(theta, number_or<Real>(l, "phi", 0));
  }
  if (doc.contains("epsilon_db")) {
    const auto& e = doc.at("epsilon_db");
    if (!e.is_object()) throw ConfigError("field 'epsilon_db' must map frequency (MHz) to dB");
    for (const auto& [key, value] : e.items()) {
      Real f = 0;
      try {
        f = std::stod(key);
      } catch (const std::exception&) {
        throw ConfigError("field 'epsilon_db' has non-numeric frequency key '" + key + "'");
      }
      if (!value.is_number()) throw ConfigError("field 'epsilon_db." + key + "' must be a number");
      cfg.epsilon_db[f] = value.get<Real>();
    }
  }
  cfg.sidelobe_db = number_or<Real>(doc, "sidelobe_db", cfg.sidelobe_db);
  cfg.delta_db = number_or<Real>(doc, "delta_db", cfg.delta_db);
  cfg.grid_deg = number_or<Real>(doc, "grid_deg", cfg.grid_deg);
  if (!(cfg.sidelobe_db < 0)) throw ConfigError("field 'sidelobe_db' must be negative");
  if (!(cfg.delta_db > 0)) throw ConfigError("field 'delta_db' must be positive");
  if (!(cfg.grid_deg > 0) || cfg.grid_deg > 10) throw ConfigError("field 'grid_deg' must be in (0, 10]");

  if (doc.contains("quadrature")) {
    const auto& q = doc.at("quadrature");
    cfg.quadrature.n_theta = number_or<Eigen::Index>(q, "n_theta", cfg.quadrature.n_theta);
    cfg.quadrature.n_phi = number_or<Eigen::Index>(q, "n_phi", cfg.quadrature.n_phi);
    try {
      cfg.quadrature.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("field 'quadrature': ") + e.what());
    }
  }

  if (doc.contains("composite")) {
    const auto& c = doc.at("composite");
    CompositeSpec spec;
    spec.count = number_or<Eigen::Index>(c, "count", spec.count);
    spec.spacing_m = number_or<Real>(c, "spacing_m", spec.spacing_m);
    if (spec.count < 1) throw ConfigError("field 'composite.count' must be >= 1");
    if (c.contains("axis")) {
      const auto& a = c.at("axis");
      if (a.is_string()) {
        const std::string s = a.get<std::string>();
        if (s == "x") spec.axis = Vector3<Real>::UnitX();
        else if (s == "y") spec.axis = Vector3<Real>::UnitY();
        else if (s == "z") spec.axis = Vector3<Real>::UnitZ();
        else throw ConfigError("field 'composite.axis' must be x, y, z or [x, y, z]");
      } else {
        const auto v = number_list(a, "composite.axis");
        if (v.size() != 3) throw ConfigError("field 'composite.axis' must have three components");
        spec.axis = Vector3<Real>(v[0], v[1], v[2]);
        if (!(spec.axis.norm() > 0)) throw ConfigError("field 'composite.axis' must be nonzero");
        spec.axis.normalize();
      }
    }
    if (c.contains("excitations")) {
      spec.excitations = weights_from_json(c.at("excitations"));
      if (spec.excitations->size() != spec.count)
        throw ConfigError("field 'composite.excitations' must have 'count' entries");
    }
    cfg.composite = spec;
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    SweepSpec spec;
    const std::string var = s.value("variable", std::string("radius_lambda"));
    if (var == "radius_m") spec.variable = SweepVariable::radius_m;
    else if (var == "radius_lambda") spec.variable = SweepVariable::radius_lambda;
    else if (var == "f_mhz" || var == "frequency") spec.variable = SweepVariable::f_mhz;
    else if (var == "n") spec.variable = SweepVariable::n;
    else throw ConfigError("field 'sweep.variable' must be radius_m, radius_lambda, f_mhz or n");
    if (!s.contains("values")) throw ConfigError("field 'sweep.values' is required");
    spec.values = number_list(s.at("values"), "sweep.values");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
      if (!(spec.values[i] > spec.values[i - 1])) throw ConfigError("field 'sweep.values' must be increasing");
    if (s.contains("n_values"))
      for (Real v : number_list(s.at("n_values"), "sweep.n_values")) spec.n_values.push_back(int(v));
    cfg.sweep = spec;
  }
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return parse_run_config(doc);
}

}  // namespace sda
