#pragma once

// Command-line front end: entangle {classify|entropy|hyperdet|det2|slices|spin|bell} ...

#include "entangle/bell.hpp"
#include "entangle/classify.hpp"
#include "entangle/hilbert_mumford.hpp"
#include "entangle/io.hpp"
#include "entangle/kempf_ness.hpp"
#include "entangle/spin_states.hpp"
#include "entangle/tensor_invariants.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace entangle::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInconclusive = 3;

struct RunConfig {
  std::string command;
  std::string subcommand;
  std::vector<std::string> inputs;
  double tol = kDefaultMomentTol;
  std::uint64_t seed = kDefaultSeed;
  int starts = 64;
  int max_iters = 20000;
  bool json_output = false;
  bool text_output = false;
  std::string plot;

  // classify
  std::string method = "auto";
  bool cross_check = false;
  // slices
  std::vector<std::size_t> split;
  // bell
  std::string builtin;
  bool correlation = false;
  bool regular = false;
  std::string state_path;
};

struct Outcome {
  json result;
  int exit_code = kExitOk;
};

namespace detail {

inline std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

inline bool is_flat(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (e.is_object() || (e.is_array() && !is_flat(e))) return false;
  return true;
}

inline std::string inline_value(const json& j) {
  if (j.is_number_float()) return format_number(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + inline_value(j[i]);
    return s + "]";
  }
  return j.dump();
}

/// Indented key: value report of a JSON result.
inline void render_text(const json& j, std::ostream& out, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() || (value.is_array() && !is_flat(value))) {
        out << pad << key << ":\n";
        render_text(value, out, indent + 2);
      } else {
        out << pad << key << ": " << inline_value(value) << "\n";
      }
    }
  } else if (j.is_array() && !is_flat(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      out << pad << "- [" << i << "]\n";
      render_text(j[i], out, indent + 2);
    }
  } else {
    out << pad << inline_value(j) << "\n";
  }
}

inline std::string input(const RunConfig& cfg, std::size_t i, const std::string& what) {
  if (i >= cfg.inputs.size()) throw Error(ErrorCode::InvalidInput, what + " file is required", "argv");
  return cfg.inputs[i];
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + path, "plot");
  f << content;
}

inline KempfNessOptions kn_options(const RunConfig& cfg) {
  KempfNessOptions o;
  o.seed = cfg.seed;
  o.max_iters = cfg.max_iters;
  o.ce_tol = cfg.tol;
  return o;
}

inline HilbertMumfordOptions hm_options(const RunConfig& cfg) {
  HilbertMumfordOptions o;
  o.seed = cfg.seed;
  o.starts = cfg.starts;
  return o;
}

/// 1 semistable, 0 unstable, -1 undecided.
inline int semistable_vote(StabilityClass c) {
  switch (c) {
    case StabilityClass::CompletelyEntangled:
    case StabilityClass::Semistable: return 1;
    case StabilityClass::Coherent:
    case StabilityClass::Unstable: return 0;
    default: return -1;
  }
}

inline bool decisive(StabilityClass c) { return semistable_vote(c) >= 0; }

inline Outcome classify(const RunConfig& cfg) {
  const auto state = io::parse_state(io::load_json(input(cfg, 0, "state")));
  const auto basis = build_basis(state.spec());
  const auto rep = representation_data(state.spec(), basis);

  std::vector<StabilityVerdict> verdicts;
  std::vector<std::string> skipped;
  const bool all = cfg.cross_check;
  if (all || cfg.method == "auto" || cfg.method == "moment") verdicts.push_back(classify_by_moment(state, basis, rep, cfg.tol));
  const bool need_kn = all || cfg.method == "kempf-ness" ||
                       (cfg.method == "auto" && verdicts.back().cls == StabilityClass::Indeterminate);
  if (need_kn) verdicts.push_back(semistability(state, basis, rep, kn_options(cfg)));
  if (all || cfg.method == "hilbert-mumford") {
    if (all && !state.spec().is_spin() && !state.spec().all_qubits()) {
      skipped.push_back("hilbert_mumford: supports qubit composites and spin systems only");
    } else {
      verdicts.push_back(stability_search(state, hm_options(cfg)));
    }
  }

  // The reported class is the first decisive verdict; a semistable moment-test
  // "Indeterminate" resolved by Kempf-Ness is reported as Semistable.
  const StabilityVerdict* chosen = &verdicts.back();
  for (const auto& v : verdicts)
    if (decisive(v.cls)) {
      chosen = &v;
      break;
    }

  bool consistent = true;
  int vote = -1;
  for (const auto& v : verdicts) {
    const int s = semistable_vote(v.cls);
    if (s < 0) continue;
    if (vote >= 0 && s != vote) consistent = false;
    vote = s;
  }
  if (consistent && verdicts.size() > 1 && verdicts[0].cls == StabilityClass::CompletelyEntangled) {
    for (const auto& v : verdicts)
      if (v.method == Method::KempfNess && v.cls != StabilityClass::CompletelyEntangled) consistent = false;
  }

  Outcome o;
  o.result = io::verdict_to_json(*chosen);
  o.result["system"] = state.spec().describe();
  if (verdicts.size() > 1) {
    json all_v = json::array();
    for (const auto& v : verdicts) all_v.push_back(io::verdict_to_json(v));
    o.result["verdicts"] = all_v;
  }
  if (cfg.cross_check) o.result["consistent"] = consistent;
  if (!skipped.empty()) o.result["skipped"] = skipped;
  if (!consistent || !decisive(chosen->cls)) o.exit_code = kExitInconclusive;
  return o;
}

inline Outcome entropy(const RunConfig& cfg) {
  const auto state = io::parse_state(io::load_json(input(cfg, 0, "state")));
  const auto basis = build_basis(state.spec());
  const auto opts = kn_options(cfg);
  const auto run = minimize_orbit_norm(state, basis, opts);
  Outcome o;
  o.result = {{"system", state.spec().describe()},
              {"status", std::string(to_string(run.status))},
              {"minimal_norm_sq", run.minimal_norm_sq},
              {"iterations", run.iterations}};
  if (run.status == MinimizationStatus::MaxIters) {
    o.result["note"] = run.note;
    o.exit_code = kExitInconclusive;
    return o;
  }
  if (run.status == MinimizationStatus::NullCone)
    throw Error(ErrorCode::NotSemistable, "state is in the null cone; no density matrix exists", "amplitudes");
  const auto checked = density_matrix_checked(state, basis, opts);
  o.result["entropy"] = entanglement_entropy(checked.rho);
  o.result["eigenvalues"] = io::to_json(RVector(checked.rho.eigenvalues()));
  o.result["degenerate"] = checked.degenerate;
  o.result["discrepancy"] = checked.discrepancy;
  if (state.spec().is_composite()) {
    json per = json::array();
    for (const auto& r : factor_density_matrices(run)) per.push_back(entanglement_entropy(r));
    o.result["factor_entropies"] = per;
  }
  return o;
}

inline json complex_result(Complex z) { return {{"value", io::to_json(z)}, {"abs", std::abs(z)}}; }

inline Outcome hyperdet(const RunConfig& cfg) {
  const auto state = io::parse_state(io::load_json(input(cfg, 0, "state")));
  Outcome o;
  o.result = complex_result(hyperdet_222(TensorView(state)));
  return o;
}

inline Outcome det2(const RunConfig& cfg) {
  const auto state = io::parse_state(io::load_json(input(cfg, 0, "state")));
  Outcome o;
  o.result = complex_result(entangle::det2(TensorView(state)));
  return o;
}

inline Outcome slices(const RunConfig& cfg) {
  const auto state = io::parse_state(io::load_json(input(cfg, 0, "state")));
  const TensorView t(state);
  const double r = slice_gram_residual(t);
  Outcome o;
  o.result = {{"residual", r}, {"tolerance", cfg.tol}, {"orthonormal_slices", r <= cfg.tol}};
  if (!cfg.split.empty()) o.result["flattening_det"] = complex_result(flattening_det(t, cfg.split));
  return o;
}

inline json roots_json(const std::vector<Vec3>& roots) {
  json a = json::array();
  for (const auto& p : roots) a.push_back(io::to_json(p));
  return a;
}

inline Outcome spin(const RunConfig& cfg) {
  Outcome o;
  if (cfg.subcommand == "from-polygon") {
    const auto poly = io::parse_polygon(io::load_json(input(cfg, 0, "polygon")));
    const auto state = polygon_to_state(poly);
    const auto basis = build_basis(state.spec());
    const auto roots = state_to_roots(state);
    o.result = {{"state", io::to_json(state)},
                {"closure_residual", poly.closure_residual},
                {"moment_norm", moment_norm(state, basis)},
                {"roots", roots_json(roots)}};
    if (!cfg.plot.empty()) write_file(cfg.plot, polygon_svg(poly.vectors, roots));
    return o;
  }
  const auto state = io::parse_state(io::load_json(input(cfg, 0, "state")));
  if (!state.spec().is_spin()) throw Error(ErrorCode::InvalidSpec, "system: spin commands need a spin system", "system");
  const auto roots = state_to_roots(state);
  if (cfg.subcommand == "roots") {
    o.result = {{"roots", roots_json(roots)}, {"max_multiplicity", max_root_multiplicity(roots)}};
    if (!cfg.plot.empty()) write_file(cfg.plot, polygon_svg(roots, roots));
    return o;
  }
  const auto form = binary_form(state);
  o.result = {{"spin", io::spin_string(state.spec().two_j())}, {"max_multiplicity", max_root_multiplicity(roots)}};
  o.result["discriminant"] = state.spec().two_j() >= 2 ? io::to_json(discriminant(form)) : json(nullptr);
  o.result["catalecticant"] = state.spec().two_j() % 2 == 0 ? io::to_json(catalecticant(form)) : json(nullptr);
  if (!cfg.plot.empty()) write_file(cfg.plot, polygon_svg(roots, roots));
  return o;
}

inline BellScenario load_scenario(const RunConfig& cfg) {
  if (!cfg.builtin.empty()) {
    if (cfg.builtin == "chsh") return chsh_scenario();
    if (cfg.builtin == "three-party") return three_party_scenario();
    if (cfg.builtin == "pentagon") return pentagon_scenario(regular_pentagon());
    throw Error(ErrorCode::InvalidInput, "unknown builtin scenario " + cfg.builtin, "builtin");
  }
  return io::parse_scenario(io::load_json(input(cfg, 0, "scenario")));
}

/// Correlator form of F rescaled by a power of two so that every coefficient is an integer.
inline std::string inequality_string(const BellScenario& s, const RVector& values) {
  auto terms = correlator_expansion(s, values);
  double scale = 1.0;
  auto integral = [&] {
    for (const auto& t : terms)
      if (std::abs(t.coefficient * scale - std::round(t.coefficient * scale)) > 1e-9) return false;
    return true;
  };
  while (!integral() && scale < 1 << 20) scale *= 2.0;
  if (!integral()) scale = 1.0;
  for (auto& t : terms) t.coefficient *= scale;
  return io::format_correlators(s, terms) + " >= 0";
}

inline Outcome bell_enumerate(const RunConfig& cfg) {
  const auto s = load_scenario(cfg);
  EnumerationOptions opts;
  opts.mode = cfg.correlation ? ConeMode::Correlation : ConeMode::Kellerer;
  const auto res = enumerate_extremal(s, opts);
  json classes = json::array();
  for (const auto& c : res.classes) {
    json e = {{"class", c.symmetry_class},
              {"trivial", c.trivial},
              {"extremal", c.extremal},
              {"orbit_size", c.orbit_size},
              {"min_over_lambda", c.min_over_lambda},
              {"values", c.values},
              {"quantum_minimum", quantum_value(s, c.function).value}};
    if (is_dichotomic(s)) {
      RVector v(static_cast<Eigen::Index>(c.values.size()));
      for (std::size_t i = 0; i < c.values.size(); ++i) v(static_cast<Eigen::Index>(i)) = static_cast<double>(c.values[i]);
      e["correlators"] = inequality_string(s, v);
    }
    classes.push_back(e);
  }
  Outcome o;
  o.result = {{"labels", s.labels},
              {"mode", cfg.correlation ? "correlation" : "kellerer"},
              {"rays", res.ray_count},
              {"dimension", res.dimension},
              {"group_order", res.group_order},
              {"nontrivial_classes", res.nontrivial_count()},
              {"classes", classes}};
  return o;
}

inline Outcome bell_feasible(const RunConfig& cfg) {
  const auto s = load_scenario(cfg);
  const auto margins = io::parse_margins(io::load_json(input(cfg, cfg.builtin.empty() ? 1 : 0, "margins")));
  const auto res = classical_feasibility(s, margins);
  Outcome o;
  o.result = {{"feasible", res.feasible}};
  if (res.feasible) {
    json support = json::array();
    for (std::size_t idx = 0; idx < s.joint_size(); ++idx) {
      const double p = res.joint(static_cast<Eigen::Index>(idx));
      if (p <= 1e-12) continue;
      const auto d = s.decode(idx);
      json lambda = json::array();
      for (std::size_t i = 0; i < d.size(); ++i) lambda.push_back(s.spectra[i][d[i]]);
      support.push_back({{"lambda", lambda}, {"p", p}});
    }
    o.result["residual"] = res.residual;
    o.result["joint_support"] = support;
  } else {
    o.result["certificate"] = io::kellerer_to_json(s, *res.certificate);
    o.result["pairing"] = res.pairing;
    o.result["certificate_min"] = res.certificate_min;
    if (is_dichotomic(s))
      o.result["correlators"] = inequality_string(s, function_values(s, *res.certificate));
  }
  return o;
}

inline Outcome bell_pentagon(const RunConfig& cfg) {
  const bool regular = cfg.regular || cfg.inputs.empty();
  if (cfg.regular && !cfg.inputs.empty())
    throw Error(ErrorCode::InvalidInput, "give either --regular or a configuration file", "argv");
  const PentagonConfig pc = regular ? regular_pentagon() : io::parse_pentagon(io::load_json(cfg.inputs[0]));
  CVector psi;
  if (!cfg.state_path.empty()) {
    const auto st = io::parse_state(io::load_json(cfg.state_path));
    if (st.dim() != 3) throw Error(ErrorCode::DimensionMismatch, "state: pentagon states live in C^3", "state");
    psi = st.amplitudes();
  } else if (regular) {
    psi = pentagon_axis();
  }
  const auto r = pentagon(pc, psi);
  Outcome o;
  o.result = {{"configuration", regular ? "regular" : "file"},
              {"cos2_sum", r.cos2_sum},
              {"classical_bound", 2.0},
              {"violates", r.cos2_sum > 2.0 + 1e-12},
              {"expectation", r.expectation},
              {"min_eigenvalue", r.min_eigenvalue},
              {"state", io::to_json(r.state)}};
  if (regular) o.result["closed_form"] = 5.0 * regular_pentagon_cos2();
  return o;
}

inline Outcome dispatch(const RunConfig& cfg) {
  if (cfg.command == "classify") return classify(cfg);
  if (cfg.command == "entropy") return entropy(cfg);
  if (cfg.command == "hyperdet") return hyperdet(cfg);
  if (cfg.command == "det2") return det2(cfg);
  if (cfg.command == "slices") return slices(cfg);
  if (cfg.command == "spin") return spin(cfg);
  if (cfg.subcommand == "enumerate") return bell_enumerate(cfg);
  if (cfg.subcommand == "feasible") return bell_feasible(cfg);
  return bell_pentagon(cfg);
}

inline void add_common(CLI::App* app, RunConfig& cfg) {
  app->add_option("--tol", cfg.tol, "moment and residual tolerance")->capture_default_str();
  app->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app->add_option("--starts", cfg.starts, "Hilbert-Mumford frame search starts")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--max-iters", cfg.max_iters, "Kempf-Ness iteration limit")->capture_default_str()->check(CLI::PositiveNumber);
  auto* j = app->add_flag("--json", cfg.json_output, "JSON output (default)");
  app->add_flag("--text", cfg.text_output, "human-readable report")->excludes(j);
}

}  // namespace detail

/// Parses argv, runs one command, and writes the result to `out`. Errors are written
/// to `out` as {"error": {...}} with a one-line summary on `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"entangle: entanglement classification by geometric invariant theory"};
  app.require_subcommand(1, 1);

  auto state_cmd = [&](const std::string& name, const std::string& desc) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("state", cfg.inputs, "state JSON file")->required()->expected(1);
    detail::add_common(c, cfg);
    return c;
  };
  auto* classify = state_cmd("classify", "stability class by moment test, Kempf-Ness, and Hilbert-Mumford");
  classify->add_option("--method", cfg.method, "auto runs the moment test then Kempf-Ness")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "moment", "kempf-ness", "hilbert-mumford"}));
  classify->add_flag("--cross-check", cfg.cross_check, "run all three methods and compare");
  state_cmd("entropy", "Kempf-Ness density matrix and entanglement entropy");
  state_cmd("hyperdet", "2x2x2 hyperdeterminant");
  state_cmd("det2", "determinant of a square two-factor state");
  state_cmd("slices", "slice orthonormality residual")
      ->add_option("--split", cfg.split, "factor indices of the row group for a flattening determinant")
      ->delimiter(',');

  auto* spin = app.add_subcommand("spin", "spin-j states and binary forms");
  spin->require_subcommand(1, 1);
  auto spin_cmd = [&](const std::string& name, const std::string& arg, const std::string& desc) {
    auto* c = spin->add_subcommand(name, desc);
    c->add_option(arg, cfg.inputs, arg + " JSON file")->required()->expected(1);
    c->add_option("--plot", cfg.plot, "write an SVG figure to this path");
    detail::add_common(c, cfg);
  };
  spin_cmd("from-polygon", "polygon", "state whose roots are the polygon's stereographic images");
  spin_cmd("roots", "state", "Majorana roots on the sphere");
  spin_cmd("invariants", "state", "discriminant, catalecticant, root multiplicity");

  auto* bell = app.add_subcommand("bell", "Bell inequalities and the marginal problem");
  bell->require_subcommand(1, 1);
  auto* enumerate = bell->add_subcommand("enumerate", "extremal Kellerer inequalities up to symmetry");
  enumerate->add_option("scenario", cfg.inputs, "scenario JSON file")->expected(1);
  enumerate->add_option("--builtin", cfg.builtin, "chsh, three-party, or pentagon")
      ->check(CLI::IsMember({"chsh", "three-party", "pentagon"}));
  enumerate->add_flag("--correlation", cfg.correlation, "correlation-function subcone of dichotomic scenarios");
  detail::add_common(enumerate, cfg);
  auto* feasible = bell->add_subcommand("feasible", "classical feasibility of margins or a Kellerer certificate");
  feasible->add_option("files", cfg.inputs, "scenario and margins JSON files")->expected(1, 2);
  feasible->add_option("--builtin", cfg.builtin, "chsh, three-party, or pentagon")
      ->check(CLI::IsMember({"chsh", "three-party", "pentagon"}));
  detail::add_common(feasible, cfg);
  auto* pent = bell->add_subcommand("pentagon", "five-reflection inequality in C^3");
  pent->add_option("config", cfg.inputs, "pentagon configuration JSON file")->expected(1);
  pent->add_flag("--regular", cfg.regular, "regular pentagon about the z axis (default)");
  pent->add_option("--state", cfg.state_path, "test state JSON file (composite [3])");
  detail::add_common(pent, cfg);

  auto fail = [&](const Error& e) {
    out << io::error_to_json(e).dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    return fail(Error(ErrorCode::InvalidInput, e.what(), "argv"));
  }

  for (auto* c : app.get_subcommands()) {
    cfg.command = c->get_name();
    for (auto* sub : c->get_subcommands()) cfg.subcommand = sub->get_name();
  }

  try {
    const auto o = detail::dispatch(cfg);
    if (cfg.text_output) {
      detail::render_text(o.result, out);
    } else {
      out << o.result.dump(2) << "\n";
    }
    return o.exit_code;
  } catch (const Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    out << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump(2) << "\n";
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace entangle::cli
