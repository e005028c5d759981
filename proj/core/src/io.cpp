#include "bpgd/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bpgd {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path, "unknown field '" + key + "'");
  }
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

Vec as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Mat as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nested array (row-major matrix)");
  const size_t rows = j.size();
  if (!j[0].is_array()) fail(path, "expected a nested array (row-major matrix)");
  const size_t cols = j[0].size();
  Mat M(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(path, "ragged matrix rows");
    for (size_t c = 0; c < cols; ++c) {
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return M;
}

ProxOperator parse_prox(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (!j.contains("type")) fail(path, "missing 'type'");
  const std::string type = j["type"].get<std::string>();
  if (type == "box") {
    expect_keys(j, path, {"type", "lo", "hi"});
    if (!j.contains("lo") || !j.contains("hi")) fail(path, "box needs 'lo' and 'hi'");
    return ProxOperator::box(as_vector(j["lo"], path + ".lo"), as_vector(j["hi"], path + ".hi"));
  }
  if (type == "ball") {
    expect_keys(j, path, {"type", "center", "radius"});
    if (!j.contains("center") || !j.contains("radius")) fail(path, "ball needs 'center' and 'radius'");
    return ProxOperator::ball(as_vector(j["center"], path + ".center"),
                              as_number(j["radius"], path + ".radius"));
  }
  if (type == "box_l1") {
    expect_keys(j, path, {"type", "lo", "hi", "weight"});
    if (!j.contains("lo") || !j.contains("hi") || !j.contains("weight")) {
      fail(path, "box_l1 needs 'lo', 'hi' and 'weight'");
    }
    return ProxOperator::box_l1(as_vector(j["lo"], path + ".lo"), as_vector(j["hi"], path + ".hi"),
                                as_vector(j["weight"], path + ".weight"));
  }
  fail(path + ".type", "unknown prox type '" + type + "' (box | ball | box_l1)");
}

ParametrizedModel parse_model(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("special_case")) {
    expect_keys(j, path, {"special_case"});
    const json& s = j["special_case"];
    const std::string sp = path + ".special_case";
    expect_keys(s, sp, {"A", "B", "E", "Q", "R", "S", "N", "x0"});
    for (const char* k : {"A", "B", "E", "Q", "R", "S", "N", "x0"}) {
      if (!s.contains(k)) fail(sp, std::string("missing '") + k + "'");
    }
    return special_case(as_matrix(s["A"], sp + ".A"), as_matrix(s["B"], sp + ".B"),
                        as_matrix(s["E"], sp + ".E"), as_matrix(s["Q"], sp + ".Q"),
                        as_matrix(s["R"], sp + ".R"), as_matrix(s["S"], sp + ".S"),
                        as_int(s["N"], sp + ".N"), as_vector(s["x0"], sp + ".x0"));
  }
  expect_keys(j, path, {"n", "m", "l", "N", "x0", "A", "B", "e", "Q", "R", "S"});
  for (const char* k : {"n", "m", "l", "N", "x0", "A", "B", "e", "Q", "R", "S"}) {
    if (!j.contains(k)) fail(path, std::string("missing '") + k + "'");
  }
  const int l = as_int(j["l"], path + ".l");
  auto matrix_list = [&](const json& arr, const std::string& p) {
    if (!arr.is_array()) fail(p, "expected an array of matrices");
    std::vector<Mat> out;
    for (size_t i = 0; i < arr.size(); ++i) {
      out.push_back(as_matrix(arr[i], p + "[" + std::to_string(i) + "]"));
    }
    return out;
  };
  auto vector_list = [&](const json& arr, const std::string& p) {
    if (!arr.is_array()) fail(p, "expected an array of vectors");
    std::vector<Vec> out;
    for (size_t i = 0; i < arr.size(); ++i) {
      out.push_back(as_vector(arr[i], p + "[" + std::to_string(i) + "]"));
    }
    return out;
  };
  return make_model(as_int(j["n"], path + ".n"), as_int(j["m"], path + ".m"), l,
                    as_int(j["N"], path + ".N"), as_vector(j["x0"], path + ".x0"),
                    matrix_list(j["A"], path + ".A"), matrix_list(j["B"], path + ".B"),
                    vector_list(j["e"], path + ".e"), as_matrix(j["Q"], path + ".Q"),
                    as_matrix(j["R"], path + ".R"), as_matrix(j["S"], path + ".S"));
}

NoiseSpec parse_noise(const json& j, const std::string& path, bool& seed_set) {
  expect_keys(j, path, {"amplitude", "distribution", "seed", "direction"});
  NoiseSpec spec;
  if (!j.contains("amplitude")) fail(path, "missing 'amplitude'");
  spec.amplitude = as_number(j["amplitude"], path + ".amplitude");
  if (spec.amplitude < 0) fail(path + ".amplitude", "must be nonnegative");
  if (j.contains("distribution")) {
    const std::string dist = j["distribution"].get<std::string>();
    if (dist == "uniform-ball") {
      spec.kind = NoiseSpec::Kind::UniformBall;
    } else if (dist == "constant-vector") {
      spec.kind = NoiseSpec::Kind::ConstantVector;
    } else {
      fail(path + ".distribution", "unknown distribution '" + dist + "'");
    }
  }
  if (j.contains("direction")) spec.direction = as_vector(j["direction"], path + ".direction");
  if (j.contains("seed")) {
    spec.seed = j["seed"].get<std::uint64_t>();
    seed_set = true;
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be an object");
  expect_keys(root, origin,
              {"seed", "problem", "prox_p", "prox_u", "solver", "oracle", "certify",
               "step_size_grid", "p0", "u0", "sweep", "out"});
  for (const char* k : {"problem", "prox_p", "prox_u", "p0"}) {
    if (!root.contains(k)) fail(origin, std::string("missing required field '") + k + "'");
  }

  ExperimentConfig cfg;
  if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
  cfg.model = parse_model(root["problem"], origin + ".problem");
  cfg.prox_p = parse_prox(root["prox_p"], origin + ".prox_p");
  cfg.prox_u = parse_prox(root["prox_u"], origin + ".prox_u");
  cfg.p0 = as_vector(root["p0"], origin + ".p0");
  if (root.contains("u0")) cfg.u0 = as_vector(root["u0"], origin + ".u0");
  if (root.contains("out")) cfg.out_dir = root["out"].get<std::string>();
  if (root.contains("step_size_grid")) {
    cfg.step_size_grid = as_int(root["step_size_grid"], origin + ".step_size_grid");
  }

  if (root.contains("solver")) {
    const json& s = root["solver"];
    const std::string sp = origin + ".solver";
    expect_keys(s, sp,
                {"mu", "nu", "kappa", "max_outer", "stop_tol", "warm_start", "log_inner", "noise"});
    if (s.contains("mu")) cfg.solver.mu = as_number(s["mu"], sp + ".mu");
    if (s.contains("nu")) cfg.solver.nu = as_number(s["nu"], sp + ".nu");
    if (s.contains("kappa")) cfg.solver.kappa = as_int(s["kappa"], sp + ".kappa");
    if (s.contains("max_outer")) cfg.solver.max_outer = as_int(s["max_outer"], sp + ".max_outer");
    if (s.contains("stop_tol")) cfg.solver.stop_tol = as_number(s["stop_tol"], sp + ".stop_tol");
    if (s.contains("warm_start")) cfg.solver.warm_start = as_bool(s["warm_start"], sp + ".warm_start");
    if (s.contains("log_inner")) cfg.solver.log_inner = as_bool(s["log_inner"], sp + ".log_inner");
    if (s.contains("noise")) {
      cfg.solver.noise = parse_noise(s["noise"], sp + ".noise", cfg.noise_seed_set);
    }
  }

  if (root.contains("oracle")) {
    const json& o = root["oracle"];
    const std::string op = origin + ".oracle";
    expect_keys(o, op, {"tol", "max_iter", "fd_step", "multistart", "seed"});
    if (o.contains("tol")) cfg.oracle.tol = as_number(o["tol"], op + ".tol");
    if (o.contains("max_iter")) cfg.oracle.max_iter = o["max_iter"].get<long>();
    if (o.contains("fd_step")) cfg.oracle.fd_step = as_number(o["fd_step"], op + ".fd_step");
    if (o.contains("multistart")) cfg.oracle.multistart = as_int(o["multistart"], op + ".multistart");
    if (o.contains("seed")) {
      cfg.oracle.seed = o["seed"].get<std::uint64_t>();
      cfg.oracle_seed_set = true;
    }
  }

  if (root.contains("certify")) {
    const json& c = root["certify"];
    const std::string cp = origin + ".certify";
    expect_keys(c, cp, {"domain_samples", "gain_samples", "kappa_max", "kappa"});
    if (c.contains("domain_samples")) {
      cfg.certify.domain_samples = as_int(c["domain_samples"], cp + ".domain_samples");
    }
    if (c.contains("gain_samples")) {
      cfg.certify.gain_samples = as_int(c["gain_samples"], cp + ".gain_samples");
    }
    if (c.contains("kappa_max")) cfg.certify.kappa_max = as_int(c["kappa_max"], cp + ".kappa_max");
    if (c.contains("kappa")) cfg.certify.kappa = as_int(c["kappa"], cp + ".kappa");
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    const std::string sp = origin + ".sweep";
    expect_keys(s, sp, {"kappa_range", "noise_amplitudes"});
    if (s.contains("kappa_range")) {
      const json& r = s["kappa_range"];
      if (!r.is_array() || r.size() != 3) fail(sp + ".kappa_range", "expected [lo, hi, step]");
      cfg.has_kappa_sweep = true;
      cfg.sweep_kappa_lo = as_int(r[0], sp + ".kappa_range[0]");
      cfg.sweep_kappa_hi = as_int(r[1], sp + ".kappa_range[1]");
      cfg.sweep_kappa_step = as_int(r[2], sp + ".kappa_range[2]");
      if (cfg.sweep_kappa_lo < 1 || cfg.sweep_kappa_hi < cfg.sweep_kappa_lo ||
          cfg.sweep_kappa_step < 1) {
        fail(sp + ".kappa_range", "requires 1 <= lo <= hi and step >= 1");
      }
    }
    if (s.contains("noise_amplitudes")) {
      const Vec amp = as_vector(s["noise_amplitudes"], sp + ".noise_amplitudes");
      cfg.sweep_noise_amplitudes.assign(amp.data(), amp.data() + amp.size());
    }
  }

  if (cfg.p0.size() != cfg.model.l) fail(origin + ".p0", "length must equal the parameter dimension");
  if (cfg.prox_p.dim() != cfg.model.l) fail(origin + ".prox_p", "dimension must equal l");
  if (cfg.prox_u.dim() != cfg.model.N * cfg.model.m) {
    fail(origin + ".prox_u", "dimension must equal N*m");
  }
  if (cfg.u0.size() != 0 && cfg.u0.size() != static_cast<Eigen::Index>(cfg.model.N) * cfg.model.m) {
    fail(origin + ".u0", "length must equal N*m");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_text_file(path), path);
}

void finalize_config(ExperimentConfig& cfg, std::optional<std::uint64_t> seed_override) {
  if (seed_override) cfg.seed = *seed_override;
  if (!cfg.oracle_seed_set) cfg.oracle.seed = derive_seed(cfg.seed, "oracle");
  if (cfg.solver.noise && !cfg.noise_seed_set) {
    cfg.solver.noise->seed = derive_seed(cfg.seed, "noise");
  }
  cfg.certify.seed = derive_seed(cfg.seed, "certify");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

std::optional<double> parse_cell(const std::string& s, const std::string& where) {
  if (s == "NA") return std::nullopt;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": malformed numeric cell '" + s + "'");
  }
}

// Non-finite doubles serialize as tagged strings so certificates and reports
// round-trip exactly.
json jnum(double x) {
  if (std::isfinite(x)) return json(x);
  return json(format_double(x));
}

double from_jnum(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError(where + ": expected a number");
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ostringstream out;
  out << "ell";
  for (int i = 0; i < trace.param_dim; ++i) out << ",p_" << i;
  out << ",dp_norm,lambda_p,cost_outer,omega_u,grad_err,d_norm,status\n";
  for (const TraceRow& row : trace.rows) {
    out << row.ell;
    for (int i = 0; i < trace.param_dim; ++i) out << ',' << format_double(row.p[i]);
    out << ',' << format_double(row.dp_norm) << ',' << cell(row.lambda_p) << ','
        << cell(row.cost_outer) << ',' << cell(row.omega_u) << ',' << cell(row.grad_err) << ','
        << cell(row.d_norm) << ',' << row.status << '\n';
  }
  write_text_file(path, out.str());
}

Trace read_trace_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty trace file");

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };

  const auto header = split(line);
  int l = 0;
  for (const std::string& h : header) {
    if (h.rfind("p_", 0) == 0) ++l;
  }
  const size_t expected_cols = 1 + l + 7;
  if (header.size() != expected_cols || header[0] != "ell" || header.back() != "status") {
    throw ConfigError(path + ": unexpected trace schema");
  }

  Trace trace;
  trace.param_dim = l;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = path + ":" + std::to_string(line_no);
    if (cells.size() != expected_cols) throw ConfigError(where + ": wrong column count");
    TraceRow row;
    try {
      size_t pos = 0;
      row.ell = std::stoi(cells[0], &pos);
      if (pos != cells[0].size()) throw std::invalid_argument(cells[0]);
    } catch (const std::exception&) {
      throw ConfigError(where + ": malformed iteration index '" + cells[0] + "'");
    }
    row.p.resize(l);
    for (int i = 0; i < l; ++i) {
      const auto v = parse_cell(cells[1 + i], where);
      if (!v) throw ConfigError(where + ": parameter cell may not be NA");
      row.p[i] = *v;
    }
    const int base = 1 + l;
    const auto dp = parse_cell(cells[base], where);
    if (!dp) throw ConfigError(where + ": dp_norm may not be NA");
    row.dp_norm = *dp;
    row.lambda_p = parse_cell(cells[base + 1], where);
    row.cost_outer = parse_cell(cells[base + 2], where);
    row.omega_u = parse_cell(cells[base + 3], where);
    row.grad_err = parse_cell(cells[base + 4], where);
    row.d_norm = parse_cell(cells[base + 5], where);
    row.status = cells[base + 6];
    trace.rows.push_back(std::move(row));
  }
  if (trace.rows.empty()) throw ConfigError(path + ": trace has no rows");

  const std::string& final_status = trace.rows.back().status;
  if (final_status == "converged") {
    trace.status = RunStatus::Converged;
  } else if (final_status == "diverged") {
    trace.status = RunStatus::Diverged;
  } else {
    trace.status = RunStatus::MaxIterations;
  }
  return trace;
}

void apply_run_summary(const std::string& summary_path, Trace& trace) {
  json j;
  try {
    j = json::parse(read_text_file(summary_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(summary_path + ": " + e.what());
  }
  for (const char* k : {"mu", "nu", "kappa", "stop_tol", "seed", "warm_start"}) {
    if (!j.contains(k)) throw ConfigError(summary_path + ": missing field '" + std::string(k) + "'");
  }
  trace.mu = j["mu"].get<double>();
  trace.nu = j["nu"].get<double>();
  trace.kappa = j["kappa"].get<int>();
  trace.stop_tol = j["stop_tol"].get<double>();
  trace.seed = j["seed"].get<std::uint64_t>();
  trace.warm_start = j["warm_start"].get<bool>();
  trace.oracle_attached = j.value("oracle_attached", false);
}

std::string certificate_to_json(const Certificate& cert) {
  json j;
  j["certificate_type"] = "empirical";  // sampling-based constants, not formal bounds
  j["eta"] = jnum(cert.eta);
  j["lambda_star"] = jnum(cert.lambda_star);
  j["f_bound"] = jnum(cert.f_bound);
  j["b1"] = jnum(cert.b1);
  j["b2"] = jnum(cert.b2);
  j["alpha0"] = jnum(cert.alpha0);
  j["gamma0"] = jnum(cert.gamma0);
  j["kappa"] = cert.kappa;
  j["alpha_kappa"] = jnum(cert.alpha_kappa);
  j["gamma_kappa"] = jnum(cert.gamma_kappa);
  j["a"] = jnum(cert.a);
  j["rho"] = jnum(cert.rho);
  j["theta"] = jnum(cert.theta);
  j["gamma1"] = jnum(cert.gamma1);
  j["gamma2"] = jnum(cert.gamma2);
  j["k_min"] = cert.k_min;
  j["certified"] = cert.certified;
  j["margins"] = {{"pass", cert.margins.pass},
                  {"margin_a", jnum(cert.margins.margin_a)},
                  {"margin_u_cycle", jnum(cert.margins.margin_u_cycle)},
                  {"margin_jstar_cycle", jnum(cert.margins.margin_jstar_cycle)}};
  j["mu"] = jnum(cert.mu);
  j["nu"] = jnum(cert.nu);
  j["j_star"] = jnum(cert.j_star);
  json pstar = json::array();
  for (const Vec& p : cert.p_star) {
    json row = json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(jnum(p[i]));
    pstar.push_back(row);
  }
  j["p_star"] = pstar;
  j["p_star_isolated"] = cert.p_star_isolated;
  j["domain_sample_count"] = cert.domain_sample_count;
  j["gain_sample_count"] = cert.gain_sample_count;
  j["kappa_max"] = cert.kappa_max;
  j["seed"] = cert.seed;
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
  Certificate c;
  try {
    c.eta = from_jnum(j.at("eta"), "eta");
    c.lambda_star = from_jnum(j.at("lambda_star"), "lambda_star");
    c.f_bound = from_jnum(j.at("f_bound"), "f_bound");
    c.b1 = from_jnum(j.at("b1"), "b1");
    c.b2 = from_jnum(j.at("b2"), "b2");
    c.alpha0 = from_jnum(j.at("alpha0"), "alpha0");
    c.gamma0 = from_jnum(j.at("gamma0"), "gamma0");
    c.kappa = j.at("kappa").get<int>();
    c.alpha_kappa = from_jnum(j.at("alpha_kappa"), "alpha_kappa");
    c.gamma_kappa = from_jnum(j.at("gamma_kappa"), "gamma_kappa");
    c.a = from_jnum(j.at("a"), "a");
    c.rho = from_jnum(j.at("rho"), "rho");
    c.theta = from_jnum(j.at("theta"), "theta");
    c.gamma1 = from_jnum(j.at("gamma1"), "gamma1");
    c.gamma2 = from_jnum(j.at("gamma2"), "gamma2");
    c.k_min = j.at("k_min").get<int>();
    c.certified = j.at("certified").get<bool>();
    const json& m = j.at("margins");
    c.margins.pass = m.at("pass").get<bool>();
    c.margins.margin_a = from_jnum(m.at("margin_a"), "margin_a");
    c.margins.margin_u_cycle = from_jnum(m.at("margin_u_cycle"), "margin_u_cycle");
    c.margins.margin_jstar_cycle = from_jnum(m.at("margin_jstar_cycle"), "margin_jstar_cycle");
    c.mu = from_jnum(j.at("mu"), "mu");
    c.nu = from_jnum(j.at("nu"), "nu");
    c.j_star = from_jnum(j.at("j_star"), "j_star");
    for (const json& row : j.at("p_star")) {
      Vec p(row.size());
      for (size_t i = 0; i < row.size(); ++i) {
        p[static_cast<Eigen::Index>(i)] = from_jnum(row[i], "p_star");
      }
      c.p_star.push_back(std::move(p));
    }
    c.p_star_isolated = j.at("p_star_isolated").get<bool>();
    c.domain_sample_count = j.at("domain_sample_count").get<int>();
    c.gain_sample_count = j.at("gain_sample_count").get<int>();
    c.kappa_max = j.at("kappa_max").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("certificate: ") + e.what());
  }
  return c;
}

Certificate load_certificate(const std::string& path) {
  return certificate_from_json(read_text_file(path));
}

namespace {

json check_to_json(const CheckResult& r) {
  json j;
  j["checked"] = r.checked;
  j["pass"] = r.pass;
  j["worst_slack"] = jnum(r.worst_slack);
  j["worst_row"] = r.worst_row;
  j["note"] = r.note;
  return j;
}

}  // namespace

std::string iss_report_to_json(const IssReport& report) {
  json j;
  j["checks"] = {{"eq15_contraction", check_to_json(report.eq15_contraction)},
                 {"lemma4_dissipation", check_to_json(report.lemma4_dissipation)},
                 {"eq19a_omega", check_to_json(report.eq19a_omega)},
                 {"eq19b_jstar", check_to_json(report.eq19b_jstar)},
                 {"eq19c_increment", check_to_json(report.eq19c_increment)},
                 {"eq20_increment", check_to_json(report.eq20_increment)},
                 {"def2_envelope", check_to_json(report.def2_envelope)}};
  j["incomplete"] = report.incomplete;
  j["certified_kappa"] = report.certified_kappa;
  j["kappa"] = report.kappa;
  j["envelope_rate"] = jnum(report.envelope_rate);
  j["envelope_gain"] = jnum(report.envelope_gain);
  j["note"] = report.note;
  j["verdict"] = report.verdict;
  return j.dump(2) + "\n";
}

std::string optimal_set_to_json(const OptimalSet& set) {
  json j;
  json cands = json::array();
  for (const Vec& p : set.candidates) {
    json row = json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(jnum(p[i]));
    cands.push_back(row);
  }
  j["candidates"] = cands;
  json vals = json::array();
  for (double v : set.values) vals.push_back(jnum(v));
  j["values"] = vals;
  j["j_star"] = jnum(set.j_star);
  j["cluster_radius"] = jnum(set.cluster_radius);
  j["isolated"] = set.isolated;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path + ": cannot open file for writing");
  out << content;
}

}  // namespace bpgd
