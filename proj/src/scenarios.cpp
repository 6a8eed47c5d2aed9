#include "netgame/scenarios.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "netgame/error.hpp"

namespace netgame {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& parent) {
  const std::string field = parent.empty() ? key : parent + "." + key;
  if (!j.is_object() || !j.contains(key)) field_error(field, "missing");
  return j.at(key);
}

double number_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  field_error(field, "expected a number (or \"inf\"/\"-inf\")");
}

json number_to_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

Vector vector_from_json(const json& j, std::size_t n, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array");
  if (j.size() != n) {
    field_error(field, "expected " + std::to_string(n) + " entries, found " + std::to_string(j.size()));
  }
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = j[i];
    if (!e.is_number()) field_error(field + "[" + std::to_string(i) + "]", "expected a number");
    v[static_cast<Eigen::Index>(i)] = e.get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Matrix matrix_from_json(const json& j, std::size_t n, const std::string& field) {
  if (!j.is_array() || j.size() != n) field_error(field, "expected " + std::to_string(n) + " rows");
  Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    M.row(static_cast<Eigen::Index>(i)) =
        vector_from_json(j[i], n, field + "[" + std::to_string(i) + "]").transpose();
  }
  return M;
}

json matrix_to_json(const Matrix& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) out.push_back(vector_to_json(M.row(i).transpose()));
  return out;
}

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

NetworkGame cournot_to_game(const CournotParams& p) {
  const auto n = p.P.rows();
  if (p.alpha.size() != n || p.d.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Cournot alpha and d must have one entry per firm");
  }
  if ((p.alpha.array() <= 0.0).any()) throw Error(ErrorCode::InvalidGame, "Cournot alpha must be positive");
  if ((p.d.array() <= 0.0).any()) throw Error(ErrorCode::InvalidGame, "Cournot marginal costs must be positive");
  if (!(p.beta > 0.0)) throw Error(ErrorCode::InvalidGame, "Cournot beta must be positive");
  return NetworkGame(p.P, -p.beta, p.alpha - p.d, p.action_set, p.intervention_set);
}

double cournot_price(const CournotParams& p, std::size_t i, const Vector& x) {
  const auto k = static_cast<Eigen::Index>(i);
  double substitutes = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (j != k) substitutes += p.P(k, j) * x[j];
  }
  return p.alpha[k] - 0.5 * (x[k] + 2.0 * p.beta * substitutes);
}

double cournot_profit(const CournotParams& p, std::size_t i, const Vector& x, double u_i) {
  const auto k = static_cast<Eigen::Index>(i);
  return x[k] * cournot_price(p, i, x) - x[k] * p.d[k] + x[k] * u_i;
}

NetworkGame random_game(const RandomGameOptions& o) {
  if (o.n < 2) throw Error(ErrorCode::InvalidConfig, "random_game needs n >= 2");
  if (!(o.density >= 0.0 && o.density <= 1.0)) throw Error(ErrorCode::InvalidConfig, "density must lie in [0, 1]");
  if (!(o.margin > 0.0 && o.margin < 1.0)) throw Error(ErrorCode::InvalidConfig, "margin must lie in (0, 1)");
  if (o.a_sign != 1 && o.a_sign != -1) throw Error(ErrorCode::InvalidConfig, "a_sign must be +1 or -1");

  const auto n = static_cast<Eigen::Index>(o.n);
  std::mt19937_64 rng(o.seed);
  Matrix P = Matrix::Zero(n, n);
  bool found = false;
  for (int attempt = 0; attempt < 100 && !found; ++attempt) {
    P.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = o.symmetric ? i + 1 : 0; j < n; ++j) {
        if (i == j) continue;
        const bool edge = canonical(rng) < o.density;
        const double weight = 1.0 - canonical(rng);  // (0, 1]
        if (!edge) continue;
        P(i, j) = weight;
        if (o.symmetric) P(j, i) = weight;
      }
    }
    found = P.cwiseAbs().maxCoeff() > 0.0;
  }
  if (!found) throw Error(ErrorCode::DegenerateNetwork, "100 draws produced an empty network");

  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = o.b_lo + (o.b_hi - o.b_lo) * canonical(rng);

  const Matrix S = P + P.transpose();
  const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues();
  const double extreme = o.a_sign > 0 ? eig.maxCoeff() : eig.minCoeff();
  const double a = (1.0 - o.margin) / extreme;

  return NetworkGame(P, a, b, o.action_set.value_or(ConstraintSet::uniform_box(o.n, -kInf, kInf)),
                     o.intervention_set.value_or(ConstraintSet::full(o.n)));
}

NetworkGame random_game(std::size_t n, double density, int a_sign, double margin, std::uint64_t seed) {
  RandomGameOptions o;
  o.n = n;
  o.density = density;
  o.a_sign = a_sign;
  o.margin = margin;
  o.seed = seed;
  return random_game(o);
}

bool operator==(const ScenarioSpec& l, const ScenarioSpec& r) {
  return l.label == r.label && l.game == r.game && l.protocol == r.protocol && l.x_s == r.x_s &&
         l.skip_target_check == r.skip_target_check && l.sim == r.sim && l.x0 == r.x0 &&
         l.x_opt_reference == r.x_opt_reference;
}

json set_to_json(const ConstraintSet& set) {
  return std::visit(overloaded{
                        [](const Box& b) {
                          json intervals = json::array();
                          for (const auto& iv : b.intervals) {
                            intervals.push_back(json::array({number_to_json(iv.lo), number_to_json(iv.hi)}));
                          }
                          return json{{"kind", "box"}, {"intervals", intervals}};
                        },
                        [](const Ball& b) { return json{{"kind", "ball"}, {"radius", b.radius}}; },
                        [](const Subspace& s) { return json{{"kind", "subspace"}, {"free", s.free}}; },
                        [](const FullSpace& f) { return json{{"kind", "full"}, {"dim", f.dim}}; },
                    },
                    set.variant());
}

ConstraintSet set_from_json(const json& j, std::size_t dim, const std::string& field) {
  const auto& kind_j = require(j, "kind", field);
  if (!kind_j.is_string()) field_error(field + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  try {
    if (kind == "box") {
      const auto& ivs = require(j, "intervals", field);
      if (!ivs.is_array() || ivs.size() != dim) {
        field_error(field + ".intervals", "expected " + std::to_string(dim) + " intervals");
      }
      std::vector<ScalarInterval> intervals;
      for (std::size_t i = 0; i < dim; ++i) {
        const std::string f = field + ".intervals[" + std::to_string(i) + "]";
        if (!ivs[i].is_array() || ivs[i].size() != 2) field_error(f, "expected [lo, hi]");
        intervals.push_back({number_from_json(ivs[i][0], f + "[0]"), number_from_json(ivs[i][1], f + "[1]")});
      }
      return ConstraintSet::box(std::move(intervals));
    }
    if (kind == "ball") {
      return ConstraintSet::ball(dim, number_from_json(require(j, "radius", field), field + ".radius"));
    }
    if (kind == "subspace") {
      const auto& free_j = require(j, "free", field);
      if (!free_j.is_array()) field_error(field + ".free", "expected an array of indices");
      std::vector<std::size_t> free;
      for (const auto& e : free_j) {
        if (!e.is_number_unsigned()) field_error(field + ".free", "indices must be nonnegative integers");
        free.push_back(e.get<std::size_t>());
      }
      return ConstraintSet::subspace(dim, std::move(free));
    }
    if (kind == "full") {
      if (j.contains("dim") && (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() != dim)) {
        field_error(field + ".dim", "must equal n = " + std::to_string(dim));
      }
      return ConstraintSet::full(dim);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSet) field_error(field, e.what());
    throw;
  }
  field_error(field + ".kind", "unknown set kind '" + kind + "'");
}

json scenario_to_json(const ScenarioSpec& s) {
  const auto& g = s.game;
  json j;
  j["label"] = s.label;
  j["n"] = g.size();
  j["P"] = matrix_to_json(g.P());
  j["a"] = g.a();
  j["b"] = vector_to_json(g.b());
  if (g.options().allow_weights_outside_unit) j["allow_weights_outside_unit"] = true;
  j["action_set"] = set_to_json(g.action_set());
  j["intervention_set"] = set_to_json(g.intervention_set());
  j["protocol"] = std::string(to_string(s.protocol));
  if (s.x_s) j["x_s"] = vector_to_json(*s.x_s);
  if (s.skip_target_check) j["skip_target_check"] = true;
  j["sim"] = json{{"h", s.sim.h},
                  {"t_max", s.sim.t_max},
                  {"conv_tol", s.sim.conv_tol},
                  {"record_stride", s.sim.record_stride},
                  {"lyapunov_slack", s.sim.lyapunov_slack},
                  {"bound_ceiling", s.sim.bound_ceiling}};
  j["x0"] = vector_to_json(s.x0);
  if (s.x_opt_reference) j["x_opt"] = vector_to_json(*s.x_opt_reference);
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "scenario must be a JSON object");
  const auto& n_j = require(j, "n", "");
  if (!n_j.is_number_unsigned() || n_j.get<std::size_t>() == 0) field_error("n", "expected a positive integer");
  const auto n = n_j.get<std::size_t>();

  const Matrix P = matrix_from_json(require(j, "P", ""), n, "P");
  const ConstraintSet action_set = set_from_json(require(j, "action_set", ""), n, "action_set");
  const ConstraintSet u_set = set_from_json(require(j, "intervention_set", ""), n, "intervention_set");

  // A "full" action set is stored as the unbounded box so the game keeps its
  // per-player interval structure.
  const ConstraintSet actions = action_set.is_box()
                                    ? action_set
                                    : (action_set.is_whole_space()
                                           ? ConstraintSet::uniform_box(n, -kInf, kInf)
                                           : throw Error(ErrorCode::ParseError,
                                                         "field 'action_set': must be a box or full"));

  NetworkGame::Options options;
  if (j.contains("allow_weights_outside_unit")) {
    if (!j["allow_weights_outside_unit"].is_boolean()) field_error("allow_weights_outside_unit", "expected a boolean");
    options.allow_weights_outside_unit = j["allow_weights_outside_unit"].get<bool>();
  }

  std::optional<NetworkGame> game;
  if (j.contains("cournot")) {
    const auto& c = j["cournot"];
    CournotParams params;
    params.alpha = vector_from_json(require(c, "alpha", "cournot"), n, "cournot.alpha");
    params.d = vector_from_json(require(c, "d", "cournot"), n, "cournot.d");
    params.beta = number_from_json(require(c, "beta", "cournot"), "cournot.beta");
    params.P = P;
    params.action_set = actions;
    params.intervention_set = u_set;
    game.emplace(cournot_to_game(params));
  } else {
    const double a = number_from_json(require(j, "a", ""), "a");
    const Vector b = vector_from_json(require(j, "b", ""), n, "b");
    game.emplace(P, a, b, actions, u_set, options);
  }

  const auto& proto_j = require(j, "protocol", "");
  if (!proto_j.is_string()) field_error("protocol", "expected a protocol name");
  const auto kind = parse_protocol_kind(proto_j.get<std::string>());
  if (!kind) field_error("protocol", "unknown protocol '" + proto_j.get<std::string>() + "'");

  SimConfig sim;
  if (j.contains("sim")) {
    const auto& s = j["sim"];
    if (!s.is_object()) field_error("sim", "expected an object");
    auto num = [&](const char* key, double& out) {
      if (s.contains(key)) out = number_from_json(s[key], std::string("sim.") + key);
    };
    num("h", sim.h);
    num("t_max", sim.t_max);
    num("conv_tol", sim.conv_tol);
    num("lyapunov_slack", sim.lyapunov_slack);
    num("bound_ceiling", sim.bound_ceiling);
    if (s.contains("record_stride")) {
      if (!s["record_stride"].is_number_unsigned()) field_error("sim.record_stride", "expected a positive integer");
      sim.record_stride = s["record_stride"].get<std::size_t>();
    }
    try {
      sim.validate();
    } catch (const Error& e) {
      field_error("sim", e.what());
    }
  }

  ScenarioSpec spec{
      .label = j.value("label", std::string{}),
      .game = std::move(*game),
      .protocol = *kind,
      .x_s = std::nullopt,
      .skip_target_check = false,
      .sim = sim,
      .x0 = Vector::Zero(static_cast<Eigen::Index>(n)),
      .x_opt_reference = std::nullopt,
  };
  if (j.contains("x_s")) spec.x_s = vector_from_json(j["x_s"], n, "x_s");
  if (j.contains("skip_target_check")) {
    if (!j["skip_target_check"].is_boolean()) field_error("skip_target_check", "expected a boolean");
    spec.skip_target_check = j["skip_target_check"].get<bool>();
  }
  if (j.contains("x0")) spec.x0 = vector_from_json(j["x0"], n, "x0");
  if (j.contains("x_opt")) spec.x_opt_reference = vector_from_json(j["x_opt"], n, "x_opt");
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read scenario file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, scenario_to_json(spec).dump(2) + "\n");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json analysis_to_json(const AnalysisReport& r) {
  const auto& a = r.assumptions;
  json j;
  j["assumptions"] = json{{"assumption1_ok", a.assumption1_ok},
                          {"symmetric", a.symmetric},
                          {"lambda_min_PPt", a.lambda_min_PPt},
                          {"lambda_max_PPt", a.lambda_max_PPt},
                          {"margin", a.margin},
                          {"aP_spectral_norm", a.aP_spectral_norm},
                          {"assumption2_ok", a.assumption2_ok},
                          {"weak_coupling_ok", a.weak_coupling_ok},
                          {"zero_coupling", a.zero_coupling}};
  j["margin"] = a.margin;
  j["x_ne"] = r.x_ne ? vector_to_json(*r.x_ne) : json(nullptr);
  j["x_opt"] = r.x_opt ? vector_to_json(*r.x_opt) : json(nullptr);
  j["feasible"] = r.verdict ? json(r.verdict->feasible) : json(nullptr);
  j["u_opt"] = (r.verdict && r.verdict->u_opt) ? vector_to_json(*r.verdict->u_opt) : json(nullptr);
  j["welfare_gap"] = r.welfare_gap ? json(*r.welfare_gap) : json(nullptr);
  j["residuals"] = json{{"nash", r.ne_residual},
                        {"social_optimum", r.opt_residual},
                        {"feasibility", r.verdict ? r.verdict->residual : 0.0}};
  return j;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  const std::size_t n = traj.x_states.empty() ? 0 : static_cast<std::size_t>(traj.x_states.front().size());
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",u_" << i;
  out << ",V,residual\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.x_states[k].size(); ++i) out << ',' << format_double(traj.x_states[k][i]);
    for (Eigen::Index i = 0; i < traj.u_values[k].size(); ++i) out << ',' << format_double(traj.u_values[k][i]);
    out << ',' << format_double(traj.lyapunov[k]) << ',' << format_double(traj.vi_residuals[k]) << '\n';
  }
  return out.str();
}

json summary_to_json(const Trajectory& traj, const ConvergenceMetrics& m) {
  json j;
  j["converged"] = traj.converged;
  j["t_converged"] = traj.t_converged ? json(*traj.t_converged) : json(nullptr);
  j["final_error"] = m.final_error;
  j["lyapunov_violations"] = m.lyapunov_violations;
  j["step_lyapunov_violations"] = traj.step_lyapunov_violations;
  j["steps"] = traj.steps;
  j["peak_norms"] = json{{"x", traj.peaks.x}, {"u", traj.peaks.u}, {"z", traj.peaks.z},
                         {"w", traj.peaks.w}, {"K", traj.peaks.K}};
  j["warnings"] = traj.warnings;
  return j;
}

void save_results(const Trajectory& traj, const ConvergenceMetrics& metrics,
                  const AnalysisReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "trajectory.csv", trajectory_csv(traj));
  write_text_file(dir / "summary.json", summary_to_json(traj, metrics).dump(2) + "\n");
  write_text_file(dir / "analysis.json", analysis_to_json(report).dump(2) + "\n");
}

}  // namespace netgame
