#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfev/common.hpp"
#include "gfev/design.hpp"
#include "gfev/distsim.hpp"
#include "gfev/filters.hpp"
#include "gfev/nullspace.hpp"

namespace gfev {

using json = nlohmann::json;

namespace detail {

inline json scalar_json(double v) { return v; }
inline json scalar_json(const Cplx& v) { return json::array({v.real(), v.imag()}); }

inline void scalar_from(const json& j, double& v) { v = j.get<double>(); }
inline void scalar_from(const json& j, Cplx& v) {
  v = Cplx(j.at(0).get<double>(), j.at(1).get<double>());
}

template <class S>
json vec_json(const VecX<S>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(scalar_json(v(i)));
  return a;
}

template <class S>
VecX<S> vec_from(const json& j) {
  VecX<S> v(j.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) scalar_from(j.at(i), v(i));
  return v;
}

template <class S>
json dense_json(const MatX<S>& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m(i, j)));
    a.push_back(row);
  }
  return a;
}

template <class S>
MatX<S> dense_from(const json& j) {
  const Eigen::Index rows = j.size();
  const Eigen::Index cols = rows > 0 ? j.at(0).size() : 0;
  MatX<S> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) scalar_from(j.at(i).at(c), m(i, c));
  return m;
}

// sparse coefficient matrices as nonzero triplets
template <class S>
json triplet_json(const MatX<S>& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != S(0))
        a.push_back(json::array({i, j, scalar_json(m(i, j))}));
  return a;
}

template <class S>
MatX<S> triplet_from(const json& j, Eigen::Index n) {
  MatX<S> m = MatX<S>::Zero(n, n);
  for (const auto& t : j) {
    S v;
    scalar_from(t.at(2), v);
    m(t.at(0).get<Eigen::Index>(), t.at(1).get<Eigen::Index>()) = v;
  }
  return m;
}

}  // namespace detail

template <class S>
void to_json(json& j, const NullspaceBasis<S>& b) {
  j = json{{"basis", detail::dense_json(b.basis)},
           {"dim", b.dim},
           {"singular_values", detail::vec_json(b.singular_values)},
           {"tolerance", b.tolerance}};
}

template <class S>
void from_json(const json& j, NullspaceBasis<S>& b) {
  b.basis = detail::dense_from<S>(j.at("basis"));
  b.dim = j.at("dim").get<int>();
  b.singular_values = detail::vec_from<double>(j.at("singular_values"));
  b.tolerance = j.at("tolerance").get<double>();
}

template <class S>
json filter_json(const FilterSpec<S>& f) {
  json j;
  j["field"] = is_complex_v<S> ? "complex" : "real";
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ClassicalFir<S>>) {
          j["family"] = "classical_fir";
          json taps = json::array();
          for (const auto& t : v.taps) taps.push_back(detail::scalar_json(t));
          j["taps"] = taps;
        } else if constexpr (std::is_same_v<T, NodeVariantFir<S>>) {
          j["family"] = "node_variant_fir";
          json taps = json::array();
          for (const auto& t : v.taps) taps.push_back(detail::vec_json(t));
          j["taps"] = taps;
          j["n"] = v.taps.empty() ? 0 : v.taps[0].size();
        } else if constexpr (std::is_same_v<T, EdgeVariantFir<S>>) {
          j["family"] = "edge_variant_fir";
          json mats = json::array();
          for (const auto& m : v.mats) mats.push_back(detail::triplet_json(m));
          j["mats"] = mats;
          j["n"] = v.mats.empty() ? 0 : v.mats[0].rows();
        } else if constexpr (std::is_same_v<T, ConstrainedEvFir<S>>) {
          j["family"] = "constrained_ev_fir";
          json mats = json::array();
          for (const auto& m : v.mats) mats.push_back(detail::triplet_json(m));
          j["mats"] = mats;
          j["n"] = v.mats.empty() ? 0 : v.mats[0].rows();
        } else if constexpr (std::is_same_v<T, SievFir<S>>) {
          j["family"] = "si_edge_variant_fir";
          j["basis"] = detail::dense_json(v.basis);
          j["alpha0"] = detail::vec_json(v.alpha0);
          json alphas = json::array();
          for (const auto& a : v.alphas) alphas.push_back(detail::vec_json(a));
          j["alphas"] = alphas;
        } else if constexpr (std::is_same_v<T, SicevFir<S>>) {
          j["family"] = "si_constrained_ev_fir";
          j["basis"] = detail::dense_json(v.basis);
          json alphas = json::array();
          for (const auto& a : v.alphas) alphas.push_back(detail::vec_json(a));
          j["alphas"] = alphas;
        } else if constexpr (std::is_same_v<T, ClassicalArma1<S>>) {
          j["family"] = "classical_arma1";
          j["psi"] = detail::scalar_json(v.psi);
          j["phi"] = detail::scalar_json(v.phi);
        } else if constexpr (std::is_same_v<T, EvArma1<S>>) {
          j["family"] = "edge_variant_arma1";
          j["phi0"] = detail::triplet_json(v.phi0);
          j["phi1"] = detail::triplet_json(v.phi1);
          j["n"] = v.phi0.rows();
        } else {  // Sieva1
          j["family"] = "si_edge_variant_arma1";
          j["basis"] = detail::dense_json(v.basis);
          j["alpha0"] = detail::vec_json(v.alpha0);
          j["alpha1"] = detail::vec_json(v.alpha1);
        }
      },
      f);
  return j;
}

template <class S>
FilterSpec<S> filter_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const std::string field = j.at("field").get<std::string>();
  if ((field == "complex") != is_complex_v<S>)
    fail(ErrorCode::unsupported_kind, "filter field does not match: " + field);
  if (family == "classical_fir") {
    ClassicalFir<S> v;
    for (const auto& t : j.at("taps")) {
      S s;
      detail::scalar_from(t, s);
      v.taps.push_back(s);
    }
    return v;
  }
  if (family == "node_variant_fir") {
    NodeVariantFir<S> v;
    for (const auto& t : j.at("taps")) v.taps.push_back(detail::vec_from<S>(t));
    return v;
  }
  if (family == "edge_variant_fir" || family == "constrained_ev_fir") {
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    std::vector<MatX<S>> mats;
    for (const auto& m : j.at("mats"))
      mats.push_back(detail::triplet_from<S>(m, n));
    if (family == "edge_variant_fir") return EdgeVariantFir<S>{std::move(mats)};
    return ConstrainedEvFir<S>{std::move(mats)};
  }
  if (family == "si_edge_variant_fir") {
    SievFir<S> v;
    v.basis = detail::dense_from<S>(j.at("basis"));
    v.alpha0 = detail::vec_from<S>(j.at("alpha0"));
    for (const auto& a : j.at("alphas")) v.alphas.push_back(detail::vec_from<S>(a));
    return v;
  }
  if (family == "si_constrained_ev_fir") {
    SicevFir<S> v;
    v.basis = detail::dense_from<S>(j.at("basis"));
    for (const auto& a : j.at("alphas")) v.alphas.push_back(detail::vec_from<S>(a));
    return v;
  }
  if (family == "classical_arma1") {
    ClassicalArma1<S> v;
    detail::scalar_from(j.at("psi"), v.psi);
    detail::scalar_from(j.at("phi"), v.phi);
    return v;
  }
  if (family == "edge_variant_arma1") {
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    return EvArma1<S>{detail::triplet_from<S>(j.at("phi0"), n),
                      detail::triplet_from<S>(j.at("phi1"), n)};
  }
  if (family == "si_edge_variant_arma1") {
    Sieva1<S> v;
    v.basis = detail::dense_from<S>(j.at("basis"));
    v.alpha0 = detail::vec_from<S>(j.at("alpha0"));
    v.alpha1 = detail::vec_from<S>(j.at("alpha1"));
    return v;
  }
  fail(ErrorCode::unsupported_kind, "unknown filter family: " + family);
}

inline void to_json(json& j, const DesignReport& r) {
  j = json{{"nse", r.nse},
           {"modified_nse", r.modified_nse},
           {"margin", r.margin},
           {"iterations", r.iterations},
           {"rank_deficient", r.rank_deficient},
           {"objective_trace", r.objective_trace}};
}

inline void from_json(const json& j, DesignReport& r) {
  r.nse = j.at("nse").get<double>();
  r.modified_nse = j.at("modified_nse").get<double>();
  r.margin = j.at("margin").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.rank_deficient = j.at("rank_deficient").get<bool>();
  r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
}

// One JSON object per line, one line per round.
template <class S>
void write_trace_jsonl(const SimulationTrace<S>& trace,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path);
  json header{{"rounds", trace.rounds},
              {"total_scalars_sent", trace.total_scalars_sent},
              {"violations", trace.violations}};
  out << header.dump() << "\n";
  for (int r = 0; r < trace.rounds; ++r) {
    json line{{"round", r + 1},
              {"scalars_sent", trace.messages_per_round[r]}};
    if (static_cast<size_t>(r) < trace.states.size())
      line["state"] = detail::vec_json(trace.states[r]);
    out << line.dump() << "\n";
  }
}

}  // namespace gfev
