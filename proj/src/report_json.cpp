#include "parabolic/report_json.hpp"

#include <cmath>

namespace parabolic {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

json real_vector_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) {
    return number(*v);
  } else {
    return json(*v);
  }
}

}  // namespace

json complex_to_json(Complex z) { return json::array({number(z.real()), number(z.imag())}); }

json to_json(const ClassificationReport& r) {
  json j;
  j["components"] = r.components;
  j["cells"] = r.cells;
  j["real"] = r.real;
  j["constant"] = r.constant;
  j["quasi_positive"] = optional_json(r.quasi_positive);
  j["l1_dissipative"] = optional_json(r.l1);
  j["l2_dissipative"] = r.l2;
  j["linf_dissipative"] = optional_json(r.linf);
  j["margins"] = {{"l1", optional_json(r.margin_l1)}, {"l2", number(r.margin_l2)}, {"linf", optional_json(r.margin_linf)}};
  json numeric = json::array();
  for (const auto& n : r.numeric_lp) {
    json e{{"p", n.p}, {"dissipative", n.dissipative}, {"verdict", "numeric"}};
    if (n.witness_cell) e["witness_cell"] = *n.witness_cell;
    if (n.witness) e["witness"] = real_vector_json(*n.witness);
    numeric.push_back(e);
  }
  j["numeric_lp"] = numeric;
  j["axis_tolerance"] = number(r.axis_tolerance);
  json probes = json::array();
  for (const auto& p : r.imaginary_probes) {
    json basis = json::array();
    for (const auto& v : p.basis) basis.push_back(vector_json(v));
    probes.push_back({{"beta", p.beta}, {"kernel_basis", basis}});
  }
  j["imaginary_probes"] = probes;
  j["positive_kernel_vector"] = r.positive_kernel_vector ? real_vector_json(*r.positive_kernel_vector) : json(nullptr);
  if (r.diagonalizer) {
    const auto& d = *r.diagonalizer;
    json u = json::array();
    for (Eigen::Index i = 0; i < d.transform.rows(); ++i) u.push_back(vector_json(d.transform.row(i).transpose()));
    json curves = json::array();
    for (const auto& c : d.curves) {
      double lo_re = kInf, hi_re = -kInf;
      for (Eigen::Index i = 0; i < c.size(); ++i) {
        lo_re = std::min(lo_re, c(i).real());
        hi_re = std::max(hi_re, c(i).real());
      }
      curves.push_back({{"at_reference", complex_to_json(c(d.reference_cell))},
                        {"min_re", number(lo_re)},
                        {"max_re", number(hi_re)}});
    }
    j["diagonalizer"] = {{"transform", u}, {"reference_cell", d.reference_cell}, {"curves", curves}};
  } else {
    j["diagonalizer"] = nullptr;
  }
  j["coupling_irreducible"] = r.irreducible;
  if (r.constant_exp) {
    const auto& e = *r.constant_exp;
    j["constant_exp"] = {{"converges", e.converges},
                         {"spectral_bound", number(e.spectral_bound)},
                         {"imaginary_axis_eigs", e.imaginary_axis_eigs},
                         {"zero_semisimple", e.zero_semisimple}};
    json eigs = json::array();
    for (const auto& z : r.constant_eigenvalues) eigs.push_back(complex_to_json(z));
    j["constant_eigenvalues"] = eigs;
  }
  return j;
}

json to_json(const Prediction& p) {
  json j;
  j["verdict"] = std::string(to_string(p.verdict));
  j["rule"] = std::string(rule_tag(p.rule));
  j["limit_rank_hint"] = std::string(to_string(p.limit_rank_hint));
  if (const auto* w = std::get_if<KernelWitness>(&p.witness)) {
    j["witness"] = {{"kind", "common_kernel"}, {"beta", w->beta}, {"vector", vector_json(w->vector)}};
  } else if (const auto* w = std::get_if<EigenCurveWitness>(&p.witness)) {
    j["witness"] = {{"kind", "eigen_curve"}, {"k", w->k}, {"lambda", complex_to_json(w->lambda)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const DetectionReport& d) {
  json j;
  j["verdict"] = std::string(to_string(d.verdict));
  j["period"] = optional_json(d.period);
  j["fit_residual"] = optional_json(d.fit_residual);
  j["final_residual"] = number(d.final_residual);
  j["residual_threshold"] = number(d.residual_threshold);
  j["growth"] = number(d.growth);
  j["residual_decreasing"] = d.residual_decreasing;
  if (d.limit) {
    j["limit_mean"] = vector_json(d.limit->values().colwise().mean().transpose());
  }
  return j;
}

json to_json(const SpectrumReport& s) {
  json j;
  j["size"] = s.eigenvalues.size();
  j["spectral_bound"] = number(s.spectral_bound);
  j["tolerance"] = number(s.tolerance);
  j["gap"] = number(s.gap);
  json boundary = json::array();
  for (const auto& z : s.boundary_spectrum) boundary.push_back(complex_to_json(z));
  j["boundary_spectrum"] = boundary;
  json axis = json::array();
  for (const auto& z : imaginary_axis_eigenvalues(s)) axis.push_back(complex_to_json(z));
  j["imaginary_axis_eigenvalues"] = axis;
  return j;
}

json to_json(const VerifyReport& v) {
  json j;
  j["classification"] = to_json(v.classification);
  j["prediction"] = to_json(v.prediction);
  j["detection"] = to_json(v.detection);
  j["spectrum"] = v.spectrum ? to_json(*v.spectrum) : json(nullptr);
  j["spectral_verdict"] = std::string(to_string(v.spectral));
  if (!v.spectral_note.empty()) j["spectral_note"] = v.spectral_note;
  j["limit_rank"] = v.projection ? json(v.projection->rank) : json(nullptr);
  j["limit_error"] = optional_json(v.limit_error);
  json rows = json::array();
  for (const auto& r : v.rows) {
    rows.push_back({{"left", r.left},
                    {"right", r.right},
                    {"left_value", r.left_value},
                    {"right_value", r.right_value},
                    {"outcome", std::string(to_string(r.outcome))}});
  }
  j["agreement"] = rows;
  j["contradiction"] = v.contradiction();
  return j;
}

}  // namespace parabolic
