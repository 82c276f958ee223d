#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nbt/classify.hpp"
#include "nbt/csv.hpp"

namespace nbt {

inline constexpr const char* kToolVersion = "0.3.1";

struct SweepAxis {
  std::string axis = "t1";
  double start = 0.0, stop = 0.0, step = 0.0;
};

struct SweepConfig {
  ModelParams model;
  std::optional<SweepAxis> sweep;
  int L = 200;
  GBZOptions gbz;
  int n_max = 0;
  CellRange subsystem{0, 0};
  std::vector<std::string> outputs;
  std::string output_path;
  int jobs = 1;
  nlohmann::json source;

  PipelineOptions pipeline() const {
    PipelineOptions o;
    o.gbz = gbz;
    o.n_max = n_max;
    o.subsystem = subsystem;
    return o;
  }
};

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::Config, where.empty() ? "config root must be an object" : where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw Error(ErrorCode::Config, "unknown field " + (where.empty() ? "" : where + ".") + it.key());
}

template <class T>
T get(const nlohmann::json& j, const char* key, const std::string& path, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Config, "invalid value for " + path);
  }
}

inline double* axis_field(ModelParams& p, const std::string& axis) {
  if (axis == "t1") return &p.t1;
  if (axis == "t2") return &p.t2;
  if (axis == "t3") return &p.t3;
  if (axis == "gamma") return &p.gamma;
  return nullptr;
}

}  // namespace detail

inline SweepConfig parse_config(const nlohmann::json& j) {
  using detail::get;
  detail::check_keys(j, "", {"model", "sweep", "L", "gbz", "n_max", "subsystem", "outputs", "output_path", "jobs"});
  SweepConfig c;
  c.source = j;
  if (!j.contains("model")) throw Error(ErrorCode::Config, "missing field model");
  const auto& m = j.at("model");
  detail::check_keys(m, "model", {"t1", "t2", "t3", "gamma"});
  c.model = {get(m, "t1", "model.t1", 0.0), get(m, "t2", "model.t2", 0.0), get(m, "t3", "model.t3", 0.0),
             get(m, "gamma", "model.gamma", 0.0)};
  if (!finite(c.model)) throw Error(ErrorCode::Config, "model fields must be finite");
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const auto& s = j.at("sweep");
    detail::check_keys(s, "sweep", {"axis", "start", "stop", "step"});
    SweepAxis a;
    a.axis = get<std::string>(s, "axis", "sweep.axis", "t1");
    a.start = get(s, "start", "sweep.start", 0.0);
    a.stop = get(s, "stop", "sweep.stop", 0.0);
    a.step = get(s, "step", "sweep.step", 0.0);
    ModelParams probe;
    if (!detail::axis_field(probe, a.axis)) throw Error(ErrorCode::Config, "sweep.axis must be one of t1, t2, t3, gamma");
    if (!(a.step > 0.0)) throw Error(ErrorCode::Config, "sweep.step must be > 0");
    if (!(a.stop >= a.start)) throw Error(ErrorCode::Config, "sweep range is empty (sweep.stop < sweep.start)");
    c.sweep = a;
  }
  c.L = get(j, "L", "L", 200);
  if (c.L < 4) throw Error(ErrorCode::Config, "L must be >= 4");
  if (j.contains("gbz")) {
    const auto& g = j.at("gbz");
    detail::check_keys(g, "gbz", {"seed_chain_length", "resample_count", "modulus_tolerance", "refine", "seed_tolerance"});
    c.gbz.seed_chain_length = get(g, "seed_chain_length", "gbz.seed_chain_length", c.gbz.seed_chain_length);
    c.gbz.resample_count = get(g, "resample_count", "gbz.resample_count", c.gbz.resample_count);
    c.gbz.modulus_tolerance = get(g, "modulus_tolerance", "gbz.modulus_tolerance", c.gbz.modulus_tolerance);
    c.gbz.refine = get(g, "refine", "gbz.refine", c.gbz.refine);
    c.gbz.seed_tolerance = get(g, "seed_tolerance", "gbz.seed_tolerance", c.gbz.seed_tolerance);
  }
  if (c.gbz.seed_chain_length < 40) throw Error(ErrorCode::Config, "gbz.seed_chain_length must be >= 40");
  if (c.gbz.resample_count < 64) throw Error(ErrorCode::Config, "gbz.resample_count must be >= 64");
  if (!(c.gbz.modulus_tolerance > 0.0)) throw Error(ErrorCode::Config, "gbz.modulus_tolerance must be > 0");
  if (!(c.gbz.seed_tolerance > 0.0)) throw Error(ErrorCode::Config, "gbz.seed_tolerance must be > 0");
  c.n_max = get(j, "n_max", "n_max", 0);
  if (c.n_max < 0 || c.n_max > c.L / 2 - 1) throw Error(ErrorCode::Config, "n_max must be in [1, L/2-1] (0 = default)");
  if (j.contains("subsystem")) {
    const auto& s = j.at("subsystem");
    detail::check_keys(s, "subsystem", {"first", "count"});
    c.subsystem.first = get(s, "first", "subsystem.first", 0);
    c.subsystem.count = get(s, "count", "subsystem.count", 0);
    if (c.subsystem.count != 0 && (c.subsystem.count < 2 || c.subsystem.count > c.L - 2))
      throw Error(ErrorCode::Config, "subsystem.count must be in [2, L-2] (0 = half chain)");
  }
  c.outputs = get(j, "outputs", "outputs", std::vector<std::string>{});
  for (const auto& o : c.outputs) {
    const auto& cols = csv::record_columns();
    if (std::find(cols.begin(), cols.end(), o) == cols.end()) throw Error(ErrorCode::Config, "outputs: unknown column " + o);
  }
  c.output_path = get<std::string>(j, "output_path", "output_path", "");
  c.jobs = get(j, "jobs", "jobs", 1);
  if (c.jobs < 1) throw Error(ErrorCode::Config, "jobs must be >= 1");
  return c;
}

// `path` uses dots (model.t1); the value is parsed as JSON, else taken as a string.
inline void apply_override(nlohmann::json& j, const std::string& path, const std::string& value) {
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    v = value;
  }
  std::string ptr = "/" + path;
  std::replace(ptr.begin(), ptr.end(), '.', '/');
  try {
    j[nlohmann::json::json_pointer(ptr)] = v;
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Config, "cannot override " + path);
  }
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("malformed JSON: ") + e.what());
  }
}

inline std::vector<ModelParams> sweep_points(const SweepConfig& c) {
  if (!c.sweep) return {c.model};
  const auto& a = *c.sweep;
  const long n = static_cast<long>(std::floor((a.stop - a.start) / a.step + 1e-9)) + 1;
  std::vector<ModelParams> pts;
  for (long i = 0; i < n; ++i) {
    ModelParams p = c.model;
    *detail::axis_field(p, a.axis) = a.start + static_cast<double>(i) * a.step;
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<std::string> output_columns(const SweepConfig& c) {
  if (c.outputs.empty()) return csv::record_columns();
  static const std::set<std::string> always = {"t1", "t2", "t3", "gamma", "L", "status"};
  std::vector<std::string> cols;
  for (const auto& col : csv::record_columns())
    if (always.count(col) || std::find(c.outputs.begin(), c.outputs.end(), col) != c.outputs.end()) cols.push_back(col);
  return cols;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string config_hash(const SweepConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(c.source.dump())));
  return buf;
}

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::map<std::string, int> status_counts;
  double wall_time_s = 0.0;
  std::size_t points = 0;

  nlohmann::json to_json() const {
    return {{"config_hash", config_hash}, {"tool_version", tool_version}, {"status_counts", status_counts},
            {"wall_time_s", wall_time_s}, {"points", points}};
  }
};

// Evaluates every sweep point; results are in axis order regardless of `jobs`.
inline std::vector<PolarizationRecord> evaluate_sweep(const SweepConfig& c, int jobs) {
  const auto pts = sweep_points(c);
  const auto opts = c.pipeline();
  std::vector<PolarizationRecord> out(pts.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < pts.size();) {
      try {
        out[i] = classify_phase(pts[i], c.L, opts);
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(pts.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

inline RunManifest run_sweep(const SweepConfig& c, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  if (c.output_path.empty()) throw Error(ErrorCode::Config, "output_path is empty");
  const auto recs = evaluate_sweep(c, jobs);
  std::ofstream os(c.output_path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IO, "cannot write " + c.output_path);
  csv::write_records(os, recs, output_columns(c));
  if (!os.flush()) throw Error(ErrorCode::IO, "write failed: " + c.output_path);
  RunManifest m;
  m.config_hash = config_hash(c);
  m.points = recs.size();
  for (const auto& r : recs) ++m.status_counts[to_string(r.status)];
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream ms(c.output_path + ".manifest.json");
  if (!ms) throw Error(ErrorCode::IO, "cannot write manifest");
  ms << m.to_json().dump(2) << '\n';
  return m;
}

struct ModeProfile {
  int index = 0;
  cplx xi;
  std::vector<double> amplitude;  // |ψ_R| per site of A, max-normalized
};

struct SpectrumResult {
  EntanglementReport report;
  CellRange cells;
  std::vector<ModeProfile> profiles;
};

inline bool profiled_mode(cplx xi, double threshold = 2e-2) {
  const bool midgap = std::min(std::abs(xi), std::abs(xi - 1.0)) > threshold;
  const bool outside = xi.real() < -1e-3 || xi.real() > 1.0 + 1e-3;
  return midgap || outside;
}

inline SpectrumResult spectrum_point(const ModelParams& p, int L, const PipelineOptions& o = {}) {
  const auto contour = compute_gbz(p, o.gbz);
  const int n_max = o.n_max > 0 ? o.n_max : default_n_max(L);
  const auto s = build_surrogate(contour, p, L, n_max);
  const auto sys = biorth_eig(s.realized);
  SpectrumResult r;
  r.cells = o.subsystem.count > 0 ? o.subsystem : CellRange{0, L / 2};
  r.report = entanglement_spectrum(correlation_matrix(sys, r.cells));
  for (Eigen::Index m = 0; m < r.report.spectrum.size(); ++m) {
    if (!profiled_mode(r.report.spectrum[m])) continue;
    ModeProfile mp;
    mp.index = static_cast<int>(m);
    mp.xi = r.report.spectrum[m];
    const Eigen::VectorXd a = r.report.right.col(m).cwiseAbs();
    const double mx = a.maxCoeff();
    mp.amplitude.assign(a.data(), a.data() + a.size());
    for (auto& v : mp.amplitude) v /= mx;
    r.profiles.push_back(std::move(mp));
  }
  return r;
}

inline void write_profiles(std::ostream& os, const SpectrumResult& r, int L) {
  csv::write_row(os, {"index", "re_xi", "im_xi", "site", "cell", "sublattice", "abs_psi_r"});
  for (const auto& mp : r.profiles)
    for (std::size_t s = 0; s < mp.amplitude.size(); ++s) {
      const int cell = ((r.cells.first + static_cast<int>(s / 2)) % L + L) % L;
      csv::write_row(os, {std::to_string(mp.index), csv::num(mp.xi.real()), csv::num(mp.xi.imag()), std::to_string(s),
                          std::to_string(cell), s % 2 ? "B" : "A", csv::num(mp.amplitude[s])});
    }
}

}  // namespace nbt
