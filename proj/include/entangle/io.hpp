#pragma once

// JSON reading and writing for states, polygons, scenarios, margins, and results.
// Every parse error names the offending field.

#include "entangle/bell.hpp"
#include "entangle/classify.hpp"
#include "entangle/spin_states.hpp"
#include "entangle/system.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace entangle::io {

using json = nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path, "path");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what(), "path");
  }
}

inline const json& require(const json& j, const std::string& key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidInput, field + ": missing", field);
  return j.at(key);
}

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidInput, field + ": expected a number", field);
  return j.get<double>();
}

/// [re, im] or a bare real number.
inline Complex complex_value(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::InvalidInput, field + ": expected [re, im] or a number", field);
}

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

inline json to_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

/// "3/2", "1", 1, or 1.5 as twice the spin.
inline int parse_two_j(const json& j, const std::string& field) {
  auto from_double = [&](double x) {
    const double t = 2.0 * x;
    if (!(t >= 1.0) || std::abs(t - std::round(t)) > 1e-12)
      throw Error(ErrorCode::InvalidSpec, field + ": spin must be a positive half-integer", field);
    return static_cast<int>(std::round(t));
  };
  if (j.is_number()) return from_double(j.get<double>());
  if (!j.is_string()) throw Error(ErrorCode::InvalidSpec, field + ": expected a spin such as \"3/2\"", field);
  const auto s = j.get<std::string>();
  try {
    std::size_t used = 0;
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      const double x = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return from_double(x);
    }
    const int num = std::stoi(s.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(s);
    const std::string den_s = s.substr(slash + 1);
    const int den = std::stoi(den_s, &used);
    if (used != den_s.size() || den != 2 || num < 1) throw std::invalid_argument(s);
    return num;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidSpec, field + ": cannot parse spin \"" + s + "\"", field);
  }
}

inline std::string spin_string(int two_j) {
  return two_j % 2 == 0 ? std::to_string(two_j / 2) : std::to_string(two_j) + "/2";
}

inline SystemSpec parse_system(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "system: expected an object", "system");
  if (j.contains("composite")) {
    const auto& c = j.at("composite");
    if (!c.is_array()) throw Error(ErrorCode::InvalidSpec, "system.composite: expected a list of dimensions", "system.composite");
    std::vector<int> dims;
    for (const auto& d : c) {
      if (!d.is_number_integer()) throw Error(ErrorCode::InvalidSpec, "system.composite: dimensions must be integers", "system.composite");
      dims.push_back(d.get<int>());
    }
    return SystemSpec::composite(dims);
  }
  if (j.contains("spin")) return SystemSpec::spin(parse_two_j(j.at("spin"), "system.spin"));
  throw Error(ErrorCode::InvalidSpec, "system: expected \"composite\" or \"spin\"", "system");
}

inline json to_json(const SystemSpec& s) {
  if (s.is_spin()) return {{"spin", spin_string(s.two_j())}};
  return {{"composite", s.factors()}};
}

inline QuantumState parse_state(const json& j) {
  const SystemSpec spec = parse_system(require(j, "system", "system"));
  const auto& a = require(j, "amplitudes", "amplitudes");
  if (!a.is_array()) throw Error(ErrorCode::InvalidInput, "amplitudes: expected a list", "amplitudes");
  CVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_value(a[i], "amplitudes[" + std::to_string(i) + "]");
  return QuantumState(spec, v);
}

inline json to_json(const QuantumState& s) {
  return {{"system", to_json(s.spec())}, {"amplitudes", to_json(s.amplitudes())}};
}

inline PolygonString parse_polygon(const json& j) {
  const auto& vs = require(j, "vectors", "vectors");
  if (!vs.is_array()) throw Error(ErrorCode::InvalidInput, "vectors: expected a list", "vectors");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string field = "vectors[" + std::to_string(i) + "]";
    if (!vs[i].is_array() || vs[i].size() != 3) throw Error(ErrorCode::InvalidInput, field + ": expected [x, y, z]", field);
    out.emplace_back(number(vs[i][0], field), number(vs[i][1], field), number(vs[i][2], field));
  }
  return make_polygon(std::move(out));
}

inline CMatrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidInput, field + ": expected a list of rows", field);
  const std::size_t n = j.size();
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) throw Error(ErrorCode::DimensionMismatch, rf + ": matrix must be square", rf);
    for (std::size_t c = 0; c < n; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_value(j[r][c], rf + "[" + std::to_string(c) + "]");
  }
  return m;
}

/// {"observables": [matrix, ...], "commuting_subsets": [[i, j], ...], "labels": [...]}.
inline BellScenario parse_scenario(const json& j) {
  const auto& obs = require(j, "observables", "observables");
  if (!obs.is_array()) throw Error(ErrorCode::InvalidInput, "observables: expected a list", "observables");
  std::vector<CMatrix> xs;
  for (std::size_t i = 0; i < obs.size(); ++i) xs.push_back(parse_matrix(obs[i], "observables[" + std::to_string(i) + "]"));
  const auto& subs = require(j, "commuting_subsets", "commuting_subsets");
  if (!subs.is_array()) throw Error(ErrorCode::InvalidInput, "commuting_subsets: expected a list", "commuting_subsets");
  std::vector<std::vector<std::size_t>> js;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    const std::string field = "commuting_subsets[" + std::to_string(k) + "]";
    if (!subs[k].is_array()) throw Error(ErrorCode::InvalidInput, field + ": expected a list of indices", field);
    std::vector<std::size_t> idx;
    for (const auto& x : subs[k]) {
      if (!x.is_number_integer() || x.get<long long>() < 0) throw Error(ErrorCode::InvalidInput, field + ": indices must be nonnegative integers", field);
      idx.push_back(x.get<std::size_t>());
    }
    js.push_back(std::move(idx));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j.at("labels").is_array()) throw Error(ErrorCode::InvalidInput, "labels: expected a list of strings", "labels");
    for (const auto& l : j.at("labels")) {
      if (!l.is_string()) throw Error(ErrorCode::InvalidInput, "labels: expected a list of strings", "labels");
      labels.push_back(l.get<std::string>());
    }
  }
  return make_scenario(std::move(xs), std::move(js), std::move(labels));
}

inline json scenario_to_json(const BellScenario& s) {
  json obs = json::array();
  for (const auto& x : s.observables) {
    json m = json::array();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < x.cols(); ++c) row.push_back(to_json(x(r, c)));
      m.push_back(row);
    }
    obs.push_back(m);
  }
  return {{"observables", obs}, {"commuting_subsets", s.commuting_subsets}, {"labels", s.labels}};
}

/// {"margins": [[p, ...], ...]} with one table per commuting subset.
inline std::vector<RVector> parse_margins(const json& j) {
  const auto& ms = j.is_array() ? j : require(j, "margins", "margins");
  if (!ms.is_array()) throw Error(ErrorCode::InvalidInput, "margins: expected a list of tables", "margins");
  std::vector<RVector> out;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const std::string field = "margins[" + std::to_string(k) + "]";
    if (!ms[k].is_array()) throw Error(ErrorCode::InvalidInput, field + ": expected a list of probabilities", field);
    RVector p(static_cast<Eigen::Index>(ms[k].size()));
    for (std::size_t i = 0; i < ms[k].size(); ++i) p(static_cast<Eigen::Index>(i)) = number(ms[k][i], field);
    out.push_back(p);
  }
  return out;
}

inline json margins_to_json(const std::vector<RVector>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return {{"margins", a}};
}

/// {"vectors": [[c, c, c] x 5]} with complex or real entries.
inline PentagonConfig parse_pentagon(const json& j) {
  const auto& vs = require(j, "vectors", "vectors");
  if (!vs.is_array() || vs.size() != 5) throw Error(ErrorCode::InvalidInput, "vectors: expected five vectors", "vectors");
  std::array<CVector, 5> e;
  for (std::size_t i = 0; i < 5; ++i) {
    const std::string field = "vectors[" + std::to_string(i) + "]";
    if (!vs[i].is_array()) throw Error(ErrorCode::InvalidInput, field + ": expected a list", field);
    e[i] = CVector(static_cast<Eigen::Index>(vs[i].size()));
    for (std::size_t k = 0; k < vs[i].size(); ++k) e[i](static_cast<Eigen::Index>(k)) = complex_value(vs[i][k], field);
  }
  return make_pentagon(std::move(e));
}

inline json kellerer_to_json(const BellScenario& s, const KellererFunction& f) {
  json tables = json::array();
  for (std::size_t j = 0; j < f.tables.size(); ++j)
    tables.push_back({{"subset", s.commuting_subsets[j]}, {"values", to_json(f.tables[j])}});
  return tables;
}

/// "A1*B1 + A2*B1 - A1*B2 + 2" style rendering of a correlator expansion.
inline std::string format_correlators(const BellScenario& s, const std::vector<CorrelatorTerm>& terms) {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms) {
    double c = t.coefficient;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    c = std::abs(c);
    std::string prod;
    for (auto i : t.observables) prod += (prod.empty() ? "" : "*") + s.labels[i];
    if (prod.empty() || std::abs(c - 1.0) > 1e-12) {
      std::ostringstream num;
      num << c;
      os << num.str() << (prod.empty() ? "" : "*");
    }
    os << prod;
    first = false;
  }
  return first ? "0" : os.str();
}

inline json verdict_to_json(const StabilityVerdict& v) {
  json j = {{"class", std::string(to_string(v.cls))},
            {"method", std::string(to_string(v.method))},
            {"moment_norm", v.moment_norm},
            {"variance", v.variance},
            {"margin", v.margin},
            {"tolerance", v.tolerance}};
  if (v.method == Method::HilbertMumford) {
    j["stable"] = v.stable;
    json frame = json::array();
    for (const auto& n : v.certificate_frame) frame.push_back(to_json(n));
    j["certificate_frame"] = frame;
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline json error_to_json(const Error& e) {
  json j = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (!e.field().empty()) j["field"] = e.field();
  return {{"error", j}};
}

}  // namespace entangle::io
