#include "kgres/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace kgres::cli {

const std::map<std::string, std::string>& RunConfig::defaults() {
  static const std::map<std::string, std::string> d{
      // nonlinearity and masses
      {"system.nonlinearity", "Q1 = v1*v2; Q2 = v1^2"},
      {"system.m1", "1"},
      {"system.m2", "2"},
      // classification
      {"classify.zero_tol", "1e-12"},
      {"classify.pos_tol", "1e-9"},
      {"classify.rho_max", "10"},
      {"classify.n_rho", "200"},
      {"classify.n_theta", "128"},
      // profile system
      {"ode.tau0", "5.5"},
      {"ode.tau_end", "55000"},
      {"ode.steps_per_decade", "2000"},
      {"ode.records_per_decade", "10"},
      {"ode.eps", "0.01"},
      {"ode.kappa", "6"},
      {"ode.beta1", "0.01,0"},
      {"ode.beta2", "0.01,0"},
      {"ode.z_samples", "default"},
      {"ode.forcing", "zero"},
      {"ode.forcing_C", "1"},
      {"ode.forcing_eps", "0.01"},
      {"ode.forcing_delta", "0.5"},
      // PDE solver
      {"pde.L", "64"},
      {"pde.N", "512"},
      {"pde.K", "2"},
      {"pde.eps", "0.05"},
      {"pde.dt", "0.02"},
      {"pde.t_end", "56"},
      {"pde.sample_every", "0.5"},
      {"pde.margin", "4"},
      {"pde.profile", "bump"},
      {"pde.f1", "1"},
      {"pde.f2", "1"},
      {"pde.g1", "0"},
      {"pde.g2", "0"},
      {"pde.dealias", "true"},
      {"pde.parallel", "true"},
      {"pde.threads", "0"},
      {"pde.guard_tol", "1e-8"},
      {"pde.norms", "L2,L4,Linf"},
      {"pde.decay_norm", "Linf_u"},
      {"pde.decay_t_min", "16"},
      {"pde.decay_t_max", "56"},
      {"pde.growth_norm", "L2_total_u2"},
      {"pde.growth_t_min", "8"},
      {"pde.growth_t_max", "48"},
      // sweep: every other key of the [sweep] section is an axis
      {"sweep.mode", "pde"},
  };
  return d;
}

RunConfig::RunConfig() : values_(defaults()) {}

namespace {

bool is_sweep_axis(const std::string& key) {
  return key.rfind("sweep.", 0) == 0 && key != "sweep.mode";
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!defaults().contains(key) && !is_sweep_axis(key)) throw ConfigError("unknown configuration key '" + key + "'");
  if (is_sweep_axis(key)) {
    const std::string target = key.substr(6);
    if (!defaults().contains(target) || target.rfind("sweep.", 0) == 0) {
      throw ConfigError("sweep axis '" + key + "' does not name a configuration key");
    }
  }
  values_[key] = value;
}

void RunConfig::load_string(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must appear inside a [section]");
    for (const auto& [key, node] : body) set(section + "." + key, node.get_value<std::string>());
  }
}

void RunConfig::load_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must appear inside a [section]");
    for (const auto& [key, node] : body) set(section + "." + key, node.get_value<std::string>());
  }
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like section.key=value: '" + assignment + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

bool RunConfig::has(const std::string& key) const { return values_.contains(key); }

const std::string& RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing configuration key '" + key + "'");
  return it->second;
}

double RunConfig::num(const std::string& key) const {
  const std::string& s = str(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "' expects a finite number, got '" + s + "'");
  }
  return v;
}

long RunConfig::integer(const std::string& key) const {
  const std::string& s = str(key);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + s + "'");
  }
  return v;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& s = str(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("key '" + key + "' expects true or false, got '" + s + "'");
}

std::vector<double> RunConfig::num_list(const std::string& key) const {
  std::vector<double> out;
  const std::string& s = str(key);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    std::string item = s.substr(start, end - start);
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) {
      item = item.substr(b, e - b + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size()) {
        throw ConfigError("key '" + key + "' expects comma separated numbers, got '" + s + "'");
      }
      out.push_back(v);
    }
    if (end == s.size()) break;
    start = end + 1;
  }
  return out;
}

nlohmann::json RunConfig::manifest() const {
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : values_) cfg[k] = v;
  return {{"config", cfg}, {"seed", seed}, {"config_hash", hash()}};
}

std::string RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [k, v] : values_) feed(k + "=" + v + "\n");
  feed("seed=" + std::to_string(seed) + "\n");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace kgres::cli
