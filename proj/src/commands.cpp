#include "sda/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

namespace sda {

namespace {

Real single_frequency(const RunConfig& cfg) {
  if (cfg.f_mhz.size() != 1) throw ConfigError("field 'f_mhz' must hold exactly one frequency for this command");
  return cfg.f_mhz.front();
}

void require_distinct_sensors(const SensorArray<Real>& array, const CarrierContext<Real>& ctx) {
  if (array.size() > 1 && !(array.min_separation() > 1e-9 * ctx.lambda))
    throw NumericalError("degenerate geometry: coincident sensors");
}

std::string path_in(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

json look_json(const Direction<Real>& d) { return {{"theta", rad2deg(d.theta)}, {"phi", rad2deg(d.phi)}}; }

struct PatternFiles {
  std::string csv;
  std::string svg;
};

PatternFiles render_pattern(const SensorArray<Real>& array, const CarrierContext<Real>& ctx,
                            const WeightVector<Real>& w, const Direction<Real>& look, Real grid_deg,
                            const std::string& title) {
  auto response = [&](const Direction<Real>& d) { return pattern_response(w, steering_vector(array, ctx, d)); };
  const Complex<Real> reference = response(look);
  std::ostringstream csv, svg;
  write_pattern_csv(csv, sample_pattern(array, ctx, w, grid_deg), reference);
  write_polar_svg(svg, azimuth_cut(response, look.theta, reference, grid_deg), look.phi, title);
  return {csv.str(), svg.str()};
}

}  // namespace

int cmd_synth(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Real f = single_frequency(cfg);
  const auto ctx = CarrierContext<Real>::from_mhz(f);
  const auto array = cfg.array.build();
  require_distinct_sensors(array, ctx);
  const auto result = synthesize(array, ctx, cfg.synthesis_config(f));

  json doc = synthesis_result_to_json(result);
  doc["f_mhz"] = f;
  doc["look_deg"] = look_json(cfg.look);
  doc["sidelobe_dB"] = cfg.sidelobe_db;
  doc["array"] = array_to_json(array);
  write_text_file(path_in(out_dir, "result.json"), doc.dump(2) + "\n");

  const auto files = render_pattern(array, ctx, result.w_opt, cfg.look, cfg.grid_deg,
                                    std::to_string(array.size()) + "-sensor array, " + format_g6(f) + " MHz");
  write_text_file(path_in(out_dir, "pattern.csv"), files.csv);
  write_text_file(path_in(out_dir, "pattern.svg"), files.svg);

  log << "status " << to_string(result.status) << "  D " << format_g6(result.directivity_db) << " dB  gamma "
      << format_g6(result.gamma_db) << " dB  epsilon " << format_g6(result.epsilon_final_db) << " dB\n";
  return result.status == SynthesisStatus::converged ? kExitOk : kExitInfeasible;
}

int cmd_table2(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const auto array = cfg.array.build();
  std::vector<SynthesisConfig> configs;
  for (Real f : cfg.f_mhz) configs.push_back(cfg.synthesis_config(f));

  std::vector<std::future<SynthesisResult>> jobs;
  for (std::size_t i = 0; i < cfg.f_mhz.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      const auto ctx = CarrierContext<Real>::from_mhz(cfg.f_mhz[i]);
      require_distinct_sensors(array, ctx);
      return synthesize(array, ctx, configs[i]);
    }));
  }
  std::ostringstream csv;
  csv << "f_MHz,D_dB,gamma_dB,epsilon_dB,status\n";
  bool all_converged = true;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto r = jobs[i].get();
    all_converged = all_converged && r.status == SynthesisStatus::converged;
    csv << format_g6(cfg.f_mhz[i]) << ',' << format_g6(r.directivity_db) << ',' << format_g6(r.gamma_db) << ','
        << format_g6(r.epsilon_final_db) << ',' << to_string(r.status) << '\n';
  }
  write_text_file(path_in(out_dir, "table2.csv"), csv.str());
  log << csv.str();
  return all_converged ? kExitOk : kExitInfeasible;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  if (!cfg.sweep) throw ConfigError("field 'sweep' is required for the sweep command");
  const SweepSpec& sweep = *cfg.sweep;
  if (cfg.array.layout && sweep.variable != SweepVariable::f_mhz)
    throw ConfigError("field 'sweep.variable': layouts can only be swept in frequency");
  const Real f_base = cfg.f_mhz.front();

  struct Point {
    int n;
    Real radius_m;
    Real f_mhz;
  };
  std::vector<Point> points;
  const std::vector<int> ns = sweep.n_values.empty() ? std::vector<int>{cfg.array.n} : sweep.n_values;
  if (sweep.variable == SweepVariable::n) {
    for (Real v : sweep.values) points.push_back({int(v), cfg.array.radius_m, f_base});
  } else {
    for (int n : ns) {
      for (Real v : sweep.values) {
        switch (sweep.variable) {
          case SweepVariable::radius_m:
            points.push_back({n, v, f_base});
            break;
          case SweepVariable::radius_lambda:
            points.push_back({n, v * CarrierContext<Real>::from_mhz(f_base).lambda, f_base});
            break;
          default:
            points.push_back({n, cfg.array.radius_m, v});
            break;
        }
      }
    }
  }

  struct Row {
    MaxDirectivityPoint value;
    std::string status;
  };
  auto evaluate = [&](const Point& p) -> Row {
    const auto ctx = CarrierContext<Real>::from_mhz(p.f_mhz);
    if (p.n < 1) return {{}, "invalid-n"};
    const auto array = cfg.array.layout ? *cfg.array.layout : make_uca<Real>(p.n, p.radius_m);
    if (array.size() > 1 && !(array.min_separation() > 1e-9 * ctx.lambda)) return {{}, "degenerate-geometry"};
    try {
      return {max_directivity_point(array, ctx, cfg.look, cfg.quadrature), "ok"};
    } catch (const InfeasibleError&) {
      return {{}, "infeasible"};
    } catch (const NumericalError&) {
      return {{}, "numerical-failure"};
    }
  };

  // Points run concurrently in batches; rows are written in input order.
  std::vector<Row> rows(points.size());
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < points.size(); start += width) {
    std::vector<std::future<Row>> batch;
    for (std::size_t i = start; i < std::min(points.size(), start + width); ++i)
      batch.push_back(std::async(std::launch::async, evaluate, points[i]));
    for (std::size_t i = 0; i < batch.size(); ++i) rows[start + i] = batch[i].get();
  }

  std::ostringstream csv;
  csv << "n,radius_m,radius_lambda,f_MHz,Dmax_dB,gamma_dB,status\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const Real lambda = CarrierContext<Real>::from_mhz(p.f_mhz).lambda;
    const bool ok = rows[i].status == "ok";
    csv << p.n << ',' << format_g6(p.radius_m) << ',' << format_g6(p.radius_m / lambda) << ','
        << format_g6(p.f_mhz) << ',' << (ok ? format_g6(rows[i].value.dmax_db) : "") << ','
        << (ok ? format_g6(rows[i].value.gamma_db) : "") << ',' << rows[i].status << '\n';
  }
  write_text_file(path_in(out_dir, "sweep.csv"), csv.str());
  log << csv.str();
  return kExitOk;
}

int cmd_compose(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Real f = single_frequency(cfg);
  const auto ctx = CarrierContext<Real>::from_mhz(f);
  const auto sub = cfg.array.build();
  require_distinct_sensors(sub, ctx);
  const auto result = synthesize(sub, ctx, cfg.synthesis_config(f));

  const CompositeSpec spec = cfg.composite.value_or(CompositeSpec{});
  CompositeArray<Real> comp = CompositeArray<Real>::uniform(sub, result.w_opt, spec.count, spec.spacing_m, spec.axis);
  if (spec.excitations) comp.excitations = *spec.excitations;
  const auto flat = flatten(comp);
  const auto metrics = composite_metrics(comp, ctx, cfg.look, cfg.quadrature);

  const auto files = render_pattern(flat.array, ctx, flat.w_total, cfg.look, cfg.grid_deg,
                                    std::to_string(comp.count) + " x " + std::to_string(sub.size()) +
                                        "-sensor composite, " + format_g6(f) + " MHz");
  write_text_file(path_in(out_dir, "composite_pattern.csv"), files.csv);
  write_text_file(path_in(out_dir, "composite_pattern_polar.svg"), files.svg);

  json doc = composite_to_json(comp);
  doc["f_mhz"] = f;
  doc["look_deg"] = look_json(cfg.look);
  doc["directivity_dB"] = metrics.directivity_db;
  doc["gamma_dB"] = metrics.gamma_db;
  doc["subarray"] = synthesis_result_to_json(result);
  write_text_file(path_in(out_dir, "composite.json"), doc.dump(2) + "\n");

  log << "sub-array " << to_string(result.status) << "  D " << format_g6(result.directivity_db) << " dB  gamma "
      << format_g6(result.gamma_db) << " dB\n"
      << "composite " << comp.count << " x " << sub.size() << "  D " << format_g6(metrics.directivity_db)
      << " dB  gamma " << format_g6(metrics.gamma_db) << " dB\n";
  return result.status == SynthesisStatus::converged ? kExitOk : kExitInfeasible;
}

int cmd_radius_for_rein(const RunConfig& cfg, const std::string& out_dir, std::ostream& log) {
  const Real f = single_frequency(cfg);
  const auto ctx = CarrierContext<Real>::from_mhz(f);
  const Real eps = cfg.epsilon_for(f);
  const auto r = radius_for_rein(cfg.array.n, ctx, eps, cfg.look, cfg.quadrature);
  json doc = {{"n", cfg.array.n},         {"f_mhz", f},
              {"epsilon_dB", eps},        {"radius_m", r.radius_m},
              {"radius_lambda", r.radius_lambda}, {"gamma_dB", r.gamma_db},
              {"dmax_dB", r.dmax_db}};
  write_text_file(path_in(out_dir, "radius.json"), doc.dump(2) + "\n");
  log << "n " << cfg.array.n << "  f " << format_g6(f) << " MHz  epsilon " << format_g6(eps) << " dB  radius "
      << format_g6(r.radius_m) << " m (" << format_g6(r.radius_lambda) << " lambda)  gamma "
      << format_g6(r.gamma_db) << " dB  Dmax " << format_g6(r.dmax_db) << " dB\n";
  return kExitOk;
}

}  // namespace sda
