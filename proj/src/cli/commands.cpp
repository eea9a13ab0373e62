#include "kgres/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "kgres/profile_ode.hpp"
#include "kgres/resonance.hpp"
#include "kgres/spectral/fits.hpp"
#include "kgres/spectral/solver.hpp"

namespace kgres::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_resonant(const NonlinearSystem& sys, const char* what) {
  if (!sys.resonant()) {
    throw ConfigError(std::string(what) + " requires the mass resonance m2 = 2 m1; got m1 = " + to_string(sys.masses.m1) +
                      ", m2 = " + to_string(sys.masses.m2));
  }
}

cplx parse_complex(const RunConfig& cfg, const std::string& key) {
  const auto v = cfg.num_list(key);
  if (v.empty() || v.size() > 2) throw ConfigError("key '" + key + "' expects 're' or 're,im'");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

std::vector<Vec2> z_samples(const RunConfig& cfg) {
  const std::string& s = cfg.str("ode.z_samples");
  if (s == "default") return default_z_samples();
  if (s.rfind("random:", 0) == 0) {
    long n = 0;
    try {
      n = std::stol(s.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("ode.z_samples 'random:N' needs an integer N");
    }
    if (n <= 0) throw ConfigError("ode.z_samples random count must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> rho(0.0, 4.0), th(0.0, 2.0 * std::numbers::pi);
    std::vector<Vec2> out;
    for (long i = 0; i < n; ++i) {
      const double r = rho(rng);
      const double a = th(rng);
      out.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return out;
  }
  // Explicit list "z1 z2; z1 z2; ..."
  std::vector<Vec2> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) {
    std::istringstream pair(item);
    Vec2 z{};
    if (!(pair >> z[0] >> z[1])) throw ConfigError("ode.z_samples entries must be 'z1 z2' separated by ';'");
    std::string rest;
    if (pair >> rest) throw ConfigError("ode.z_samples entry has extra text: '" + item + "'");
    out.push_back(z);
  }
  if (out.empty()) throw ConfigError("ode.z_samples is empty");
  return out;
}

spectral::SolverOptions solver_options(const RunConfig& cfg) {
  spectral::SolverOptions o;
  o.L = cfg.num("pde.L");
  const long n = cfg.integer("pde.N");
  if (n < 4 || (n & (n - 1)) != 0) throw ConfigError("pde.N must be a power of two >= 4");
  o.N = static_cast<std::size_t>(n);
  o.m1 = cfg.num("system.m1");
  o.m2 = cfg.num("system.m2");
  o.horizon = cfg.num("pde.t_end");
  o.margin = cfg.num("pde.margin");
  o.dealias = cfg.flag("pde.dealias");
  o.parallel = cfg.flag("pde.parallel");
  o.threads = static_cast<int>(cfg.integer("pde.threads"));
  o.guard_tol = cfg.num("pde.guard_tol");
  if (o.horizon > o.L - cfg.num("pde.K") - o.margin) {
    throw ConfigError("pde.t_end exceeds L - K - margin = " + csv_num(o.L - cfg.num("pde.K") - o.margin) +
                      "; the periodic box would wrap around");
  }
  return o;
}

spectral::InitialData initial_data(const RunConfig& cfg) {
  spectral::InitialData d;
  const std::string& p = cfg.str("pde.profile");
  if (p == "bump") d.profile = spectral::Profile::Bump;
  else if (p == "gaussian") d.profile = spectral::Profile::Gaussian;
  else throw ConfigError("pde.profile must be 'bump' or 'gaussian'");
  d.K = cfg.num("pde.K");
  d.eps = cfg.num("pde.eps");
  if (d.eps < 0.0) throw ConfigError("pde.eps must be >= 0");
  d.f1 = cfg.num("pde.f1");
  d.f2 = cfg.num("pde.f2");
  d.g1 = cfg.num("pde.g1");
  d.g2 = cfg.num("pde.g2");
  return d;
}

std::vector<std::string> norm_list(const RunConfig& cfg) {
  std::vector<std::string> out;
  std::istringstream in(cfg.str("pde.norms"));
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item != "L2" && item != "L4" && item != "Linf") throw ConfigError("pde.norms entries must be L2, L4 or Linf");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("pde.norms is empty");
  return out;
}

nlohmann::json decay_json(const spectral::RunResult& r, const std::string& name, double t0, double t1) {
  try {
    const auto f = spectral::decay_fit(r.t, r.column(name), t0, t1);
    return {{"norm", name},         {"exponent", f.exponent}, {"amplitude", f.amplitude},
            {"residual_rms", f.residual_rms}, {"t_min", t0}, {"t_max", t1}, {"samples", f.samples}};
  } catch (const std::exception& e) {
    return {{"norm", name}, {"error", e.what()}};
  }
}

nlohmann::json growth_json(const spectral::RunResult& r, const std::string& name, double t0, double t1) {
  try {
    const auto f = spectral::log_growth_fit(r.t, r.column(name), t0, t1);
    return {{"norm", name},
            {"c", f.c},
            {"offset", f.offset},
            {"log_rms", f.log_rms},
            {"power_rms", f.power_rms},
            {"power_exponent", f.power_exponent},
            {"model_preference", f.model_preference},
            {"t_min", t0},
            {"t_max", t1},
            {"samples", f.samples}};
  } catch (const std::exception& e) {
    return {{"norm", name}, {"error", e.what()}};
  }
}

}  // namespace

NonlinearSystem system_from_config(const RunConfig& cfg) {
  Masses masses;
  try {
    masses.m1 = parse_rational(cfg.str("system.m1"));
    masses.m2 = parse_rational(cfg.str("system.m2"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system masses: ") + e.what());
  }
  if (masses.m1 <= 0 || masses.m2 <= 0) throw ConfigError("system masses must be positive");
  try {
    return parse_system(cfg.str("system.nonlinearity"), masses);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("system.nonlinearity: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system.nonlinearity: ") + e.what());
  }
}

nlohmann::json cmd_classify(const RunConfig& cfg, int& exit_code) {
  const NonlinearSystem sys = system_from_config(cfg);
  require_resonant(sys, "classification");
  ClassifyTolerances tol{cfg.num("classify.zero_tol"), cfg.num("classify.pos_tol")};
  SamplingDomain dom{cfg.num("classify.rho_max"), static_cast<int>(cfg.integer("classify.n_rho")),
                     static_cast<int>(cfg.integer("classify.n_theta"))};
  const PhiPolynomial p1 = phi(sys, 1);
  const PhiPolynomial p2 = phi(sys, 2);
  ConditionClass c;
  try {
    c = classify(p1, p2, tol, dom);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json report = classification_report(p1, p2, c);
  report["manifest"] = cfg.manifest();
  ensure_dir(cfg.out_dir);
  write_json(fs::path(cfg.out_dir) / "classify.json", report);
  exit_code = kSuccess;
  return report;
}

nlohmann::json cmd_ode(const RunConfig& cfg, int& exit_code) {
  const NonlinearSystem sys = system_from_config(cfg);
  require_resonant(sys, "the profile system");
  const double tau0 = cfg.num("ode.tau0");
  if (!(tau0 > 0.0)) throw ConfigError("ode.tau0 must be positive");
  const double kappa = cfg.num("ode.kappa");
  if (!(kappa > 0.0)) throw ConfigError("ode.kappa must be positive");
  ProfileState state = make_profile_state(sys, z_samples(cfg), tau0, kappa);
  const cplx b1 = parse_complex(cfg, "ode.beta1");
  const cplx b2 = parse_complex(cfg, "ode.beta2");
  for (auto& s : state.samples) {
    s.beta1 = b1;
    s.beta2 = b2;
  }
  ForcingSpec forcing;
  const std::string& mode = cfg.str("ode.forcing");
  if (mode == "powerlaw") forcing.mode = ForcingSpec::Mode::PowerLaw;
  else if (mode != "zero") throw ConfigError("ode.forcing must be 'zero' or 'powerlaw'");
  forcing.C = cfg.num("ode.forcing_C");
  forcing.eps = cfg.num("ode.forcing_eps");
  forcing.delta = cfg.num("ode.forcing_delta");
  try {
    forcing.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  IntegrateOptions opt;
  opt.tau_end = cfg.num("ode.tau_end");
  opt.steps_per_decade = static_cast<int>(cfg.integer("ode.steps_per_decade"));
  opt.records_per_decade = static_cast<int>(cfg.integer("ode.records_per_decade"));
  opt.eps = cfg.num("ode.eps");
  if (!(opt.tau_end > tau0)) throw ConfigError("ode.tau_end must exceed ode.tau0");
  if (opt.steps_per_decade < 1) throw ConfigError("ode.steps_per_decade must be positive");
  if (opt.records_per_decade < 0) throw ConfigError("ode.records_per_decade must be >= 0");

  const IntegrateResult result = integrate(state, forcing, opt);
  nlohmann::json summary = profile_summary(result, state, forcing, opt.eps);
  double max_drift = 0.0;
  bool any_drift = false;
  for (double d : result.max_relative_drift) {
    if (std::isfinite(d)) {
      max_drift = std::max(max_drift, d);
      any_drift = true;
    }
  }
  summary["max_drift"] = any_drift ? nlohmann::json(max_drift) : nlohmann::json(nullptr);
  if (phi(sys, 1).is_zero() && forcing.mode == ForcingSpec::Mode::Zero) {
    double err = 0.0;
    for (const auto& r : result.records) {
      const auto& p = state.samples[r.sample];
      const cplx exact = counterexample_closed_form(r.tau, tau0, p.beta1, p.beta2, p.chi2 * p.phi2);
      err = std::max({err, std::abs(r.beta2 - exact), std::abs(r.beta1 - p.beta1)});
    }
    summary["closed_form_max_error"] = err;
  }
  summary["manifest"] = cfg.manifest();
  ensure_dir(cfg.out_dir);
  {
    std::ofstream f(fs::path(cfg.out_dir) / "ode_trajectory.csv", std::ios::binary);
    write_trajectory_csv(f, result, state);
  }
  write_json(fs::path(cfg.out_dir) / "ode_summary.json", summary);
  exit_code = kSuccess;
  return summary;
}

nlohmann::json cmd_pde(const RunConfig& cfg, int& exit_code) {
  const NonlinearSystem sys = system_from_config(cfg);
  const spectral::SolverOptions opt = solver_options(cfg);
  const spectral::InitialData data = initial_data(cfg);
  spectral::RunOptions ro;
  ro.dt = cfg.num("pde.dt");
  ro.t_end = cfg.num("pde.t_end");
  ro.sample_every = cfg.num("pde.sample_every");
  ro.margin = opt.margin;
  ro.p_list = norm_list(cfg);
  if (!(ro.dt > 0.0)) throw ConfigError("pde.dt must be positive");

  spectral::FieldState state = spectral::init(opt, data);
  const spectral::RunResult result = spectral::run(state, sys, ro);

  nlohmann::json report;
  report["guard"] = {{"tripped", result.guard_tripped},
                     {"message", result.guard_message},
                     {"max_tail_fraction", result.max_tail_fraction},
                     {"tolerance", opt.guard_tol}};
  report["support"] = {{"max_exterior_fraction", result.max_exterior_fraction}, {"margin", opt.margin}};
  report["steps"] = result.steps;
  report["t_final"] = result.t.empty() ? 0.0 : result.t.back();
  const double d0 = cfg.num("pde.decay_t_min"), d1 = cfg.num("pde.decay_t_max");
  const double g0 = cfg.num("pde.growth_t_min"), g1 = cfg.num("pde.growth_t_max");
  auto known = [&](const std::string& n) { return std::find(result.names.begin(), result.names.end(), n) != result.names.end(); };
  for (const auto& key : {"pde.decay_norm", "pde.growth_norm"}) {
    if (!known(cfg.str(key))) throw ConfigError(std::string(key) + " names an untracked norm '" + cfg.str(key) + "'");
  }
  report["decay_fit"] = decay_json(result, cfg.str("pde.decay_norm"), d0, d1);
  report["growth_fit"] = growth_json(result, cfg.str("pde.growth_norm"), g0, g1);
  nlohmann::json by_p = nlohmann::json::object();
  for (const auto& p : ro.p_list) by_p[p + "_u"] = decay_json(result, p + "_u", d0, d1);
  report["decay_by_p"] = by_p;
  report["manifest"] = cfg.manifest();

  ensure_dir(cfg.out_dir);
  {
    std::ofstream f(fs::path(cfg.out_dir) / "pde_norms.csv", std::ios::binary);
    spectral::write_norms_csv(f, result);
  }
  const fs::path plot = fs::path(cfg.out_dir) / "plot";
  ensure_dir(plot.string());
  for (std::size_t c = 0; c < result.names.size(); ++c) {
    std::string text;
    for (std::size_t i = 0; i < result.t.size(); ++i) text += csv_num(result.t[i]) + " " + csv_num(result.columns[c][i]) + "\n";
    write_text(plot / (result.names[c] + ".dat"), text);
  }
  write_json(fs::path(cfg.out_dir) / "pde_report.json", report);
  exit_code = result.guard_tripped ? kGuardTripped : kSuccess;
  return report;
}

namespace {

struct Axis {
  std::string key;  // target key, without the "sweep." prefix
  std::vector<std::string> values;
};

std::vector<Axis> sweep_axes(const RunConfig& cfg) {
  std::vector<Axis> axes;
  for (const auto& [k, v] : cfg.values()) {
    if (k.rfind("sweep.", 0) != 0 || k == "sweep.mode") continue;
    Axis a{k.substr(6), {}};
    const char sep = a.key == "system.nonlinearity" ? '|' : ',';
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, sep)) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) a.values.push_back(item);
    }
    axes.push_back(std::move(a));
  }
  return axes;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json cmd_sweep(const RunConfig& cfg, int& exit_code) {
  const std::string mode = cfg.str("sweep.mode");
  if (mode != "classify" && mode != "ode" && mode != "pde") throw ConfigError("sweep.mode must be classify, ode or pde");
  const std::vector<Axis> axes = sweep_axes(cfg);
  std::size_t rows = axes.empty() ? 0 : 1;
  for (const auto& a : axes) rows *= a.values.size();

  std::vector<std::vector<std::string>> cells(rows);
  std::vector<std::string> header{"row", "config_hash"};
  for (const auto& a : axes) header.push_back(a.key);
  for (const char* h : {"status", "classification", "exponent", "amplitude", "growth_c", "model_preference",
                        "max_drift", "max_exterior_fraction"}) {
    header.emplace_back(h);
  }

  ensure_dir(cfg.out_dir);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ri = 0; ri < static_cast<std::ptrdiff_t>(rows); ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    RunConfig row;
    row.seed = cfg.seed;
    std::vector<std::string> line{std::to_string(r), ""};
    std::string status = "ok", cls = "", expo = "nan", amp = "nan", gc = "nan", pref = "nan", drift = "nan", ext = "nan";
    try {
      for (const auto& [k, v] : cfg.values()) {
        if (k.rfind("sweep.", 0) != 0) row.set(k, v);
      }
      std::size_t stride = 1;
      for (std::size_t a = axes.size(); a-- > 0;) {
        const auto& ax = axes[a];
        const std::size_t idx = (r / stride) % ax.values.size();
        stride *= ax.values.size();
        row.set(ax.key, ax.values[idx]);
      }
      char dir[32];
      std::snprintf(dir, sizeof dir, "row_%04zu", r);
      row.out_dir = (fs::path(cfg.out_dir) / dir).string();
      line[1] = row.hash();
      for (const auto& ax : axes) line.push_back(row.str(ax.key));

      const NonlinearSystem sys = system_from_config(row);
      if (sys.resonant()) {
        ClassifyTolerances tol{row.num("classify.zero_tol"), row.num("classify.pos_tol")};
        SamplingDomain dom{row.num("classify.rho_max"), static_cast<int>(row.integer("classify.n_rho")),
                           static_cast<int>(row.integer("classify.n_theta"))};
        cls = to_string(classify(phi(sys, 1), phi(sys, 2), tol, dom).tag);
      } else {
        cls = "non-resonant";
      }
      int code = 0;
      if (mode == "classify") {
        if (sys.resonant()) cmd_classify(row, code);
      } else if (mode == "ode") {
        if (!sys.resonant()) throw ConfigError("the profile system requires m2 = 2 m1");
        const auto s = cmd_ode(row, code);
        if (!s["max_drift"].is_null()) drift = csv_num(s["max_drift"].get<double>());
        double g = 0.0;
        for (const auto& smp : s["samples"]) g = std::max(g, smp["growth_coefficient"].get<double>());
        gc = csv_num(g);
      } else {
        const auto rep = cmd_pde(row, code);
        if (rep["decay_fit"].contains("exponent")) {
          expo = csv_num(rep["decay_fit"]["exponent"].get<double>());
          amp = csv_num(rep["decay_fit"]["amplitude"].get<double>());
        }
        if (rep["growth_fit"].contains("c")) {
          gc = csv_num(rep["growth_fit"]["c"].get<double>());
          pref = csv_num(rep["growth_fit"]["model_preference"].get<double>());
        }
        ext = csv_num(rep["support"]["max_exterior_fraction"].get<double>());
        if (code == kGuardTripped) status = "guard: " + rep["guard"]["message"].get<std::string>();
      }
    } catch (const std::exception& e) {
      status = std::string("error: ") + e.what();
      while (line.size() < 2 + axes.size()) line.emplace_back("");
    }
    for (const auto& v : {status, cls, expo, amp, gc, pref, drift, ext}) line.push_back(v);
    cells[r] = std::move(line);
  }

  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + csv_field(header[i]);
  text += "\n";
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& line : cells) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < line.size(); ++i) {
      text += (i ? "," : "") + csv_field(line[i]);
      obj[header[i]] = line[i];
    }
    text += "\n";
    rows_json.push_back(obj);
  }
  write_text(fs::path(cfg.out_dir) / "sweep.csv", text);
  nlohmann::json summary{{"rows", rows_json}, {"mode", mode}, {"manifest", cfg.manifest()}};
  write_json(fs::path(cfg.out_dir) / "sweep_manifest.json", summary);
  exit_code = kSuccess;
  return summary;
}

std::string cmd_report(const std::string& out_dir, int& exit_code) {
  if (!fs::is_directory(out_dir)) throw ConfigError("report: '" + out_dir + "' is not a directory");
  std::ostringstream os;
  bool found = false;
  auto load = [&](const char* name, nlohmann::json& j) {
    std::ifstream f(fs::path(out_dir) / name);
    if (!f) return false;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(std::string("report: cannot parse ") + name + ": " + e.what());
    }
    found = true;
    return true;
  };
  nlohmann::json j;
  if (load("classify.json", j)) {
    os << "classify: " << j["tag"].get<std::string>() << "\n"
       << "  Phi1 = " << j["phi1_text"].get<std::string>() << "\n"
       << "  Phi2 = " << j["phi2_text"].get<std::string>() << "\n"
       << "  reason: " << j["reason"].get<std::string>() << "\n";
  }
  if (load("ode_summary.json", j)) {
    os << "ode: " << j["samples"].size() << " samples, tau in [" << j["tau0"] << ", " << j["tau_end"] << "]\n"
       << "  max drift: " << j["max_drift"].dump() << "\n";
    if (j.contains("closed_form_max_error")) os << "  closed-form max error: " << j["closed_form_max_error"].dump() << "\n";
    os << "  under-resolved: " << (j["under_resolved"].get<bool>() ? "yes" : "no") << "\n";
  }
  if (load("pde_report.json", j)) {
    os << "pde: t_final = " << j["t_final"].dump() << ", guard " << (j["guard"]["tripped"].get<bool>() ? "TRIPPED" : "ok")
       << ", max exterior fraction " << j["support"]["max_exterior_fraction"].dump() << "\n";
    os << "  decay fit " << j["decay_fit"].dump() << "\n";
    os << "  growth fit " << j["growth_fit"].dump() << "\n";
  }
  {
    std::ifstream f(fs::path(out_dir) / "sweep.csv");
    if (f) {
      found = true;
      std::string line;
      std::size_t n = 0;
      os << "sweep:\n";
      while (std::getline(f, line)) {
        os << "  " << line << "\n";
        ++n;
      }
      os << "  (" << (n ? n - 1 : 0) << " rows)\n";
    }
  }
  if (!found) throw ConfigError("report: no run outputs found in '" + out_dir + "'");
  exit_code = kSuccess;
  return os.str();
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int code = kFailure;
  try {
    if (name == "classify") out << cmd_classify(cfg, code).dump(2) << "\n";
    else if (name == "ode") out << cmd_ode(cfg, code).dump(2) << "\n";
    else if (name == "pde") out << cmd_pde(cfg, code).dump(2) << "\n";
    else if (name == "sweep") out << cmd_sweep(cfg, code).dump(2) << "\n";
    else if (name == "report") out << cmd_report(cfg.out_dir, code);
    else throw ConfigError("unknown command '" + name + "'");
    if (code == kGuardTripped) err << "error: numerical guard tripped; see the report\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const spectral::GuardError& e) {
    err << "guard: " << e.what() << "\n";
    return kGuardTripped;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace kgres::cli
