#pragma once

#include <optional>
#include <string>

#include "nbt/invariants.hpp"
#include "nbt/surrogate.hpp"

namespace nbt {

enum class PhaseStatus { Gapped, TSM, EPNear };

inline const char* to_string(PhaseStatus s) {
  switch (s) {
    case PhaseStatus::Gapped: return "Gapped";
    case PhaseStatus::TSM: return "TSM";
    case PhaseStatus::EPNear: return "EPNear";
  }
  return "?";
}

struct PolarizationRecord {
  ModelParams params;
  int L = 0;
  PhaseStatus status = PhaseStatus::Gapped;
  std::optional<double> chi, p_beta, w_norm, p_resta, det_s_norm, p_flux, p_bloch;
  std::optional<int> winding;
  std::optional<double> ent_gap, pairing_residual, alpha;
  std::string note;
};

struct PipelineOptions {
  GBZOptions gbz;
  int n_max = 0;            // 0: default_n_max(L)
  CellRange subsystem{0, 0};  // count 0: half chain
  int bloch_points = 720;
  bool resta = true;
  bool decay = true;
};

inline PolarizationRecord classify_phase(const ModelParams& p, int L, const PipelineOptions& o = {}) {
  PolarizationRecord rec;
  rec.params = p;
  rec.L = L;
  try {
    rec.winding = spectral_winding(p, 0.0);
  } catch (const Error&) {
  }
  try {
    rec.p_bloch = bloch_polarization(p, o.bloch_points).p_beta;
  } catch (const Error&) {
  }

  auto fail = [&](PhaseStatus s, const Error& e) {
    rec.status = s;
    rec.chi.reset();
    rec.p_beta.reset();
    rec.note = e.what();
    return rec;
  };

  GBZContour contour;
  try {
    contour = compute_gbz(p, o.gbz);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientSeed) throw;
    // gapless: the loop norm is still informative when a contour exists
    try {
      GBZOptions relaxed = o.gbz;
      relaxed.reject_gapless = false;
      rec.w_norm = nonbloch_polarization(compute_gbz(p, relaxed), p).w_norm;
    } catch (const Error&) {
    }
    return fail(PhaseStatus::TSM, e);
  }

  try {
    const auto wl = nonbloch_polarization(contour, p);
    rec.w_norm = wl.w_norm;
    if (wl.w_norm < 0.1) {
      rec.status = PhaseStatus::EPNear;
      rec.note = "Wilson loop norm collapsed";
      return rec;
    }
    rec.p_beta = wl.p_beta;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EPOnContour) throw;
    return fail(PhaseStatus::EPNear, e);
  }

  const int n_max = o.n_max > 0 ? o.n_max : default_n_max(L);
  const auto s = build_surrogate(contour, p, L, n_max);
  if (o.decay && n_max >= 16) {
    const auto d = hopping_decay_profile(s);
    if (d.classification == DecayKind::PowerLaw) rec.alpha = d.alpha;
  }

  BiorthogonalEigensystem sys;
  try {
    sys = biorth_eig(s.realized);
    check_half_filling(sys);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NearDefective) return fail(PhaseStatus::EPNear, e);
    if (e.code() == ErrorCode::HalfFillingAmbiguous) return fail(PhaseStatus::TSM, e);
    throw;
  }

  const CellRange a = o.subsystem.count > 0 ? o.subsystem : CellRange{0, L / 2};
  try {
    const auto c = correlation_matrix(sys, a);
    const auto es = entanglement_spectrum(c);
    rec.ent_gap = es.gap;
    rec.pairing_residual = es.pairing_residual;
    try {
      rec.p_flux = flux_polarization(c);
    } catch (const Error&) {
    }
    rec.chi = entanglement_polarization(es).chi;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AmbiguousLocalization) return fail(PhaseStatus::TSM, e);
    if (e.code() == ErrorCode::NearDefective || e.code() == ErrorCode::PairingViolation)
      return fail(PhaseStatus::EPNear, e);
    throw;
  }

  if (o.resta) {
    const auto r = resta_polarization(sys, L);
    rec.det_s_norm = r.det_norm;
    if (r.well_defined) rec.p_resta = r.corrected;
  }
  rec.status = PhaseStatus::Gapped;
  return rec;
}

}  // namespace nbt
