#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbt/sweep.hpp"

namespace {

int exit_code(nbt::ErrorCode c) {
  switch (c) {
    case nbt::ErrorCode::Config: return 2;
    case nbt::ErrorCode::IO: return 4;
    default: return 3;
  }
}

std::string sibling(const std::string& path, const std::string& suffix) {
  const std::string ext = ".csv";
  if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
    return path.substr(0, path.size() - ext.size()) + suffix;
  return path + suffix;
}

// --a.b value | --a.b=value
void apply_extras(nlohmann::json& j, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() < 3) throw nbt::Error(nbt::ErrorCode::Config, "unexpected argument " + tok);
    std::string key = tok.substr(2), value;
    if (auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw nbt::Error(nbt::ErrorCode::Config, "missing value for --" + key);
      value = extras[++i];
    }
    nbt::apply_override(j, key, value);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw nbt::Error(nbt::ErrorCode::IO, "cannot write " + path);
  return os;
}

struct Common {
  std::string config_path;
  std::string output;
};

nbt::SweepConfig load(const Common& c, CLI::App* sub) {
  nlohmann::json j = c.config_path.empty() ? nlohmann::json{{"model", nlohmann::json::object()}}
                                           : nbt::load_json(c.config_path);
  apply_extras(j, sub->remaining());
  if (!c.output.empty()) j["output_path"] = c.output;
  return nbt::parse_config(j);
}

int jobs_default() {
  if (const char* e = std::getenv("NBT_JOBS")) {
    const int v = std::atoi(e);
    if (v > 0) return v;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Bloch topology toolkit: GBZ, surrogate Hamiltonian and polarization invariants"};
  app.set_version_flag("--version", nbt::kToolVersion);
  app.require_subcommand(1);

  Common common;
  int jobs = jobs_default();
  auto add = [&](const char* name, const char* desc) {
    auto* s = app.add_subcommand(name, desc);
    s->add_option("-c,--config", common.config_path, "JSON config file");
    s->add_option("-o,--output", common.output, "output path (overrides output_path)");
    s->allow_extras();
    return s;
  };
  auto* sweep = add("sweep", "run a parameter sweep and write one record per point");
  sweep->add_option("-j,--jobs", jobs, "worker threads (default: config jobs, or NBT_JOBS)");
  auto* spectrum = add("spectrum", "entanglement spectrum and mode profiles at one point");
  auto* gbz = add("gbz", "GBZ contour at one point");
  auto* surrogate = add("surrogate", "surrogate hoppings and decay fit at one point");
  auto* classify = add("classify", "full pipeline at one point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed()) {
      auto cfg = load(common, sweep);
      if (!cfg.sweep) throw nbt::Error(nbt::ErrorCode::Config, "missing field sweep");
      const int n = jobs > 0 ? jobs : cfg.jobs;
      const auto m = nbt::run_sweep(cfg, n);
      std::cerr << "wrote " << cfg.output_path << " (" << m.points << " points, " << m.wall_time_s << " s)\n";
      return 0;
    }
    if (classify->parsed()) {
      auto cfg = load(common, classify);
      const auto rec = nbt::classify_phase(cfg.model, cfg.L, cfg.pipeline());
      if (cfg.output_path.empty()) {
        nbt::csv::write_records(std::cout, {rec}, nbt::output_columns(cfg));
      } else {
        auto os = open_out(cfg.output_path);
        nbt::csv::write_records(os, {rec}, nbt::output_columns(cfg));
      }
      return 0;
    }
    if (gbz->parsed()) {
      auto cfg = load(common, gbz);
      if (cfg.output_path.empty()) throw nbt::Error(nbt::ErrorCode::Config, "output_path is empty");
      nbt::GBZContour c;
      try {
        c = nbt::compute_gbz(cfg.model, cfg.gbz);
      } catch (const nbt::Error& e) {
        if (e.code() != nbt::ErrorCode::InsufficientSeed) throw;
        std::cerr << "status TSM: " << e.what() << '\n';
        return 3;
      }
      auto os = open_out(cfg.output_path);
      nbt::csv::write_contour(os, c);
      return 0;
    }
    if (surrogate->parsed()) {
      auto cfg = load(common, surrogate);
      if (cfg.output_path.empty()) throw nbt::Error(nbt::ErrorCode::Config, "output_path is empty");
      const auto c = nbt::compute_gbz(cfg.model, cfg.gbz);
      const int n_max = cfg.n_max > 0 ? cfg.n_max : nbt::default_n_max(cfg.L);
      const auto s = nbt::build_surrogate(c, cfg.model, cfg.L, n_max);
      auto os = open_out(cfg.output_path);
      nbt::csv::write_hoppings(os, s);
      if (n_max >= 16) {
        const auto d = nbt::hopping_decay_profile(s);
        nlohmann::json dj = {{"classification", nbt::to_string(d.classification)},
                             {"alpha", d.classification == nbt::DecayKind::PowerLaw ? nlohmann::json(d.alpha) : nullptr},
                             {"xi", d.classification == nbt::DecayKind::Exponential ? nlohmann::json(d.xi) : nullptr},
                             {"residual", d.fit_residual}};
        auto js = open_out(sibling(cfg.output_path, "_decay.json"));
        js << dj.dump(2) << '\n';
      }
      return 0;
    }
    if (spectrum->parsed()) {
      auto cfg = load(common, spectrum);
      if (cfg.output_path.empty()) throw nbt::Error(nbt::ErrorCode::Config, "output_path is empty");
      const auto r = nbt::spectrum_point(cfg.model, cfg.L, cfg.pipeline());
      auto os = open_out(cfg.output_path);
      nbt::csv::write_spectrum(os, r.report);
      auto ps = open_out(sibling(cfg.output_path, "_profiles.csv"));
      nbt::write_profiles(ps, r, cfg.L);
      std::cerr << r.profiles.size() << " profiled modes\n";
      return 0;
    }
  } catch (const nbt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
