#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nbt/classify.hpp"

namespace nbt::csv {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }
inline std::string num(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {"t1",     "t2",         "t3",     "gamma",   "L",
                                                "status", "chi",        "p_beta", "w_norm",  "p_resta",
                                                "det_S_norm", "p_flux", "p_bloch", "winding", "ent_gap",
                                                "pairing_residual", "alpha"};
  return cols;
}

inline std::string record_field(const PolarizationRecord& r, const std::string& col) {
  if (col == "t1") return num(r.params.t1);
  if (col == "t2") return num(r.params.t2);
  if (col == "t3") return num(r.params.t3);
  if (col == "gamma") return num(r.params.gamma);
  if (col == "L") return std::to_string(r.L);
  if (col == "status") return to_string(r.status);
  if (col == "chi") return num(r.chi);
  if (col == "p_beta") return num(r.p_beta);
  if (col == "w_norm") return num(r.w_norm);
  if (col == "p_resta") return num(r.p_resta);
  if (col == "det_S_norm") return num(r.det_s_norm);
  if (col == "p_flux") return num(r.p_flux);
  if (col == "p_bloch") return num(r.p_bloch);
  if (col == "winding") return num(r.winding);
  if (col == "ent_gap") return num(r.ent_gap);
  if (col == "pairing_residual") return num(r.pairing_residual);
  if (col == "alpha") return num(r.alpha);
  return {};
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
  os << '\n';
}

inline void write_records(std::ostream& os, const std::vector<PolarizationRecord>& recs,
                          const std::vector<std::string>& cols) {
  write_row(os, cols);
  for (const auto& r : recs) {
    std::vector<std::string> f;
    for (const auto& c : cols) f.push_back(record_field(r, c));
    write_row(os, f);
  }
}

inline void write_contour(std::ostream& os, const GBZContour& c) {
  write_row(os, {"theta", "re_beta", "im_beta", "abs_beta", "re_E", "im_E"});
  for (std::size_t j = 0; j < c.size(); ++j)
    write_row(os, {num(c.angles[j]), num(c.points[j].real()), num(c.points[j].imag()), num(std::abs(c.points[j])),
                   num(c.energies[j].real()), num(c.energies[j].imag())});
}

inline void write_hoppings(std::ostream& os, const SurrogateHamiltonian& s) {
  write_row(os, {"n", "abs_t", "re_aa", "im_aa", "re_ab", "im_ab", "re_ba", "im_ba", "re_bb", "im_bb"});
  for (int n = -s.n_max; n <= s.n_max; ++n) {
    const Block2& t = s.hopping(n);
    write_row(os, {std::to_string(n), num(t.cwiseAbs().maxCoeff()), num(t(0, 0).real()), num(t(0, 0).imag()),
                   num(t(0, 1).real()), num(t(0, 1).imag()), num(t(1, 0).real()), num(t(1, 0).imag()),
                   num(t(1, 1).real()), num(t(1, 1).imag())});
  }
}

inline void write_spectrum(std::ostream& os, const EntanglementReport& r) {
  write_row(os, {"index", "re_xi", "im_xi", "left_weight", "right_weight"});
  for (Eigen::Index m = 0; m < r.spectrum.size(); ++m) {
    const double wl = r.left_weight[m].real();
    write_row(os, {std::to_string(m), num(r.spectrum[m].real()), num(r.spectrum[m].imag()), num(wl), num(1.0 - wl)});
  }
}

}  // namespace nbt::csv
