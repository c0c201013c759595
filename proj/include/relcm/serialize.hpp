#pragma once

#include <json.hpp>

#include "relcm/scattering.hpp"

namespace relcm {

using json = nlohmann::json;

inline json to_json(cx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ScaleParams& p) {
  return json{{"a_plus", p.a_plus},
              {"a_minus", p.a_minus},
              {"rho", p.rho},
              {"kappa", p.kappa},
              {"rho_kappa", p.rho_kappa()}};
}

inline json to_json(const PoleDatum& pd) {
  return json{{"location", to_json(pd.location)}, {"residue", to_json(pd.residue)}};
}

// Kernel summary: parameters, parities, pole/residue lists, sampled T/R/C/U.
inline json to_json(const KernelSpec& K) {
  json jw = json::array(), jwh = json::array();
  for (const auto& pd : K.w_poles) jw.push_back(to_json(pd));
  for (const auto& pd : K.what_poles) jwh.push_back(to_json(pd));
  json samples = json::array();
  for (double k : {0.5, 1.0, 1.5}) {
    samples.push_back(json{{"k", k},
                           {"T", to_json(K.T(cx(k, 0.0)))},
                           {"R", to_json(K.R(cx(k, 0.0)))}});
  }
  return json{{"name", K.name},
              {"N", K.N},
              {"phi", K.phi},
              {"sigma", K.sigma},
              {"params", to_json(K.params)},
              {"ell_parity", K.ell_parity},
              {"v_parity", K.v_parity},
              {"double_pole", K.double_pole},
              {"w_poles", jw},
              {"what_poles", jwh},
              {"amplitude_samples", samples}};
}

inline json to_json(const DefectReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.gram_defect) {
    json r = json::array();
    for (cx v : row) r.push_back(to_json(v));
    rows.push_back(r);
  }
  json factors = json::array();
  for (const auto& [vec, lam] : rep.factors) {
    json v = json::array();
    for (cx c : vec) v.push_back(to_json(c));
    factors.push_back(json{{"vector", v}, {"scalar", lam}});
  }
  return json{{"side", rep.side == DefectReport::Side::forward ? "forward" : "adjoint"},
              {"gram_defect", rows},
              {"numerical_rank", rep.numerical_rank},
              {"factors", factors},
              {"quad_tol", rep.quad_tol},
              {"hermiticity_defect", rep.hermiticity_defect}};
}

inline json to_json(const std::vector<DefectLadderPoint>& ladder) {
  json arr = json::array();
  for (const auto& p : ladder) arr.push_back(json{{"t", p.t}, {"defect", p.defect}});
  return arr;
}

}  // namespace relcm
