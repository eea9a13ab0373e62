#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kgres/cli/commands.hpp"
#include "kgres/cli/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("kgres_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

Outcome run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch() / ("stdout_" + std::to_string(counter));
  const fs::path err = scratch() / ("stderr_" + std::to_string(counter++));
  const std::string cmd = std::string(KGRES_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

// Small grid that keeps PDE runs to a fraction of a second.
const char* kSmallPde =
    "[pde]\nL = 16\nN = 256\nt_end = 8\ndecay_t_min = 2\ndecay_t_max = 8\ngrowth_t_min = 2\ngrowth_t_max = 8\n";

}  // namespace

TEST(Cli, ClassifyYukawa) {
  const auto r = run_cli("classify --out " + out_dir("cls_y"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(fs::path(out_dir("cls_y")) / "classify.json");
  EXPECT_EQ(j["tag"], "PositiveB");
  EXPECT_EQ(j["phi1"][0]["re"], "1/4");
  EXPECT_EQ(j["phi2"][0]["re"], "1/4");
  EXPECT_EQ(json::parse(r.out)["tag"], "PositiveB");
}

TEST(Cli, ClassifyCounterexampleAndNull) {
  auto r = run_cli("classify --out " + out_dir("cls_c") + " --override 'system.nonlinearity=Q1=0; Q2=v1^2'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(fs::path(out_dir("cls_c")) / "classify.json")["tag"], "Neither");
  r = run_cli("classify --out " + out_dir("cls_n") + " --override 'system.nonlinearity=Q1=0; Q2=0'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(fs::path(out_dir("cls_n")) / "classify.json")["tag"], "NullA");
}

TEST(Cli, NonResonantMassesAreAConfigError) {
  const auto r = run_cli("classify --out " + out_dir("cls_m") + " --override system.m2=3");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("m2 = 2 m1"), std::string::npos) << r.err;
}

TEST(Cli, ParseErrorReportsColumn) {
  const auto r = run_cli("classify --out " + out_dir("cls_p") + " --override 'system.nonlinearity=Q1 = v1*v2; Q2 = v1*x3'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("column 21"), std::string::npos) << r.err;
}

TEST(Cli, UnknownKeysAndBadOverridesAreRejected) {
  const auto cfg = write_config("bad.ini", "[pde]\nbogus = 1\n");
  EXPECT_EQ(run_cli("pde --config " + cfg.string() + " --out " + out_dir("bad1")).code, 2);
  EXPECT_EQ(run_cli("pde --out " + out_dir("bad2") + " --override pde.nope=3").code, 2);
  EXPECT_EQ(run_cli("pde --out " + out_dir("bad3") + " --override missing_equals").code, 2);
  EXPECT_EQ(run_cli("pde --out " + out_dir("bad4") + " --override pde.t_end=70").code, 2);
  EXPECT_EQ(run_cli("classify --config /nonexistent/file.ini").code, 2);
  EXPECT_NE(run_cli("frobnicate").code, 0);
}

TEST(Cli, OverridesWinOverFile) {
  const auto cfg = write_config("eps.ini", std::string(kSmallPde) + "eps = 0.01\n");
  const auto r = run_cli("pde --config " + cfg.string() + " --out " + out_dir("ovr") + " --override pde.eps=0.02");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(fs::path(out_dir("ovr")) / "pde_report.json");
  EXPECT_EQ(j["manifest"]["config"]["pde.eps"], "0.02");
  EXPECT_EQ(j["manifest"]["config"]["pde.N"], "256");
}

TEST(Cli, ManifestEchoesEveryDefault) {
  ASSERT_EQ(run_cli("classify --seed 7 --out " + out_dir("man")).code, 0);
  const auto j = load_json(fs::path(out_dir("man")) / "classify.json");
  for (const auto& [k, v] : kgres::cli::RunConfig::defaults()) {
    ASSERT_TRUE(j["manifest"]["config"].contains(k)) << k;
    EXPECT_EQ(j["manifest"]["config"][k], v) << k;
  }
  EXPECT_EQ(j["manifest"]["seed"], 7);
}

TEST(Cli, OdeYukawaConservesAndCounterexampleMatchesClosedForm) {
  auto r = run_cli("ode --out " + out_dir("ode_y"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = load_json(fs::path(out_dir("ode_y")) / "ode_summary.json");
  EXPECT_LE(j["max_drift"].get<double>(), 1e-8);
  EXPECT_EQ(j["tau0"], 5.5);
  const std::string csv = slurp(fs::path(out_dir("ode_y")) / "ode_trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,z1,z2,re_beta1,im_beta1,re_beta2,im_beta2,B_eps");

  r = run_cli("ode --out " + out_dir("ode_c") + " --override 'system.nonlinearity=F1 = 0; F2 = u1^2'" +
            " --override ode.beta1=0.5,0.2");
  ASSERT_EQ(r.code, 0) << r.err;
  j = load_json(fs::path(out_dir("ode_c")) / "ode_summary.json");
  EXPECT_LE(j["closed_form_max_error"].get<double>(), 1e-9);
  EXPECT_TRUE(j["max_drift"].is_null());
  EXPECT_GT(j["samples"][0]["growth_coefficient"].get<double>(), 0.0);
}

TEST(Cli, OdeConditionAIsFrozen) {
  const auto r = run_cli("ode --out " + out_dir("ode_a") +
                       " --override 'system.nonlinearity=Q1 = 0; Q2 = m1^2*v1^2 + w(1,0)^2 - w(1,1)^2 - w(1,2)^2'");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(fs::path(out_dir("ode_a")) / "ode_summary.json");
  for (const auto& s : j["samples"]) EXPECT_EQ(s["growth_coefficient"].get<double>(), 0.0);
  EXPECT_EQ(j["closed_form_max_error"].get<double>(), 0.0);
}

TEST(Cli, DeterministicOutputs) {
  const auto cfg = write_config("det.ini", std::string(kSmallPde) + "[ode]\nz_samples = random:5\n");
  for (const char* dir : {"det_a", "det_b"}) {
    ASSERT_EQ(run_cli("pde --seed 11 --config " + cfg.string() + " --out " + out_dir(dir)).code, 0);
    ASSERT_EQ(run_cli("ode --seed 11 --config " + cfg.string() + " --out " + out_dir(dir)).code, 0);
  }
  for (const char* f : {"pde_norms.csv", "pde_report.json", "ode_trajectory.csv", "ode_summary.json", "plot/Linf_u.dat"}) {
    const auto a = slurp(fs::path(out_dir("det_a")) / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(fs::path(out_dir("det_b")) / f)) << f;
  }
  // A different seed moves the random z samples.
  ASSERT_EQ(run_cli("ode --seed 12 --config " + cfg.string() + " --out " + out_dir("det_c")).code, 0);
  EXPECT_NE(slurp(fs::path(out_dir("det_a")) / "ode_trajectory.csv"),
            slurp(fs::path(out_dir("det_c")) / "ode_trajectory.csv"));
}

TEST(Cli, PdeZeroAmplitudeRejectsFits) {
  const auto cfg = write_config("zero.ini", std::string(kSmallPde) + "eps = 0\n");
  const auto r = run_cli("pde --config " + cfg.string() + " --out " + out_dir("pde0"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(fs::path(out_dir("pde0")) / "pde_report.json");
  EXPECT_NE(j["decay_fit"]["error"].get<std::string>().find("nonpositive series"), std::string::npos);
  EXPECT_NE(j["growth_fit"]["error"].get<std::string>().find("nonpositive series"), std::string::npos);
  const std::string csv = slurp(fs::path(out_dir("pde0")) / "pde_norms.csv");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0);
  }
}

TEST(Cli, GuardTripExitsWithThree) {
  const auto r = run_cli("pde --out " + out_dir("guard") +
                       " --override pde.L=16 --override pde.N=16 --override pde.t_end=4 --override pde.eps=0.5");
  EXPECT_EQ(r.code, 3) << r.err;
  const auto j = load_json(fs::path(out_dir("guard")) / "pde_report.json");
  EXPECT_TRUE(j["guard"]["tripped"].get<bool>());
}

TEST(Cli, SweepEmptyGridWritesHeaderOnly) {
  const auto r = run_cli("sweep --out " + out_dir("sw_empty"));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(fs::path(out_dir("sw_empty")) / "sweep.csv");
  EXPECT_EQ(csv,
            "row,config_hash,status,classification,exponent,amplitude,growth_c,model_preference,max_drift,"
            "max_exterior_fraction\n");
}

TEST(Cli, SweepMassesMarksNonResonantRows) {
  const auto cfg = write_config("mass.ini", "[sweep]\nmode = classify\nsystem.m2 = 1.5, 2\n");
  const auto r = run_cli("sweep --config " + cfg.string() + " --out " + out_dir("sw_mass"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(fs::path(out_dir("sw_mass")) / "sweep_manifest.json");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["system.m2"], "1.5");
  EXPECT_EQ(j["rows"][0]["classification"], "non-resonant");
  EXPECT_EQ(j["rows"][1]["classification"], "PositiveB");
  EXPECT_NE(j["rows"][0]["config_hash"], j["rows"][1]["config_hash"]);
  EXPECT_TRUE(fs::exists(fs::path(out_dir("sw_mass")) / "row_0001" / "classify.json"));
}

TEST(Cli, SweepContinuesPastFailedRows) {
  const auto cfg = write_config("eps_sweep.ini", std::string(kSmallPde) +
                                                     "[sweep]\nmode = pde\npde.eps = 0.0125, 0.025, 0.05\n"
                                                     "pde.N = 256, 48\n");
  const auto r = run_cli("sweep --config " + cfg.string() + " --out " + out_dir("sw_eps"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load_json(fs::path(out_dir("sw_eps")) / "sweep_manifest.json");
  ASSERT_EQ(j["rows"].size(), 6u);
  int failed = 0;
  for (const auto& row : j["rows"]) {
    if (row["pde.N"] == "48") {
      EXPECT_EQ(row["status"].get<std::string>().rfind("error:", 0), 0u);
      ++failed;
    } else {
      EXPECT_EQ(row["status"], "ok");
      EXPECT_GT(std::stod(row["amplitude"].get<std::string>()), 0.0);
    }
  }
  EXPECT_EQ(failed, 3);
}

TEST(Cli, SweepOverNonlinearities) {
  const auto cfg = write_config("nl.ini", "[sweep]\nmode = classify\nsystem.nonlinearity = Q1 = v1*v2; Q2 = v1^2 | Q1 = 0; Q2 = v1^2\n");
  ASSERT_EQ(run_cli("sweep --config " + cfg.string() + " --out " + out_dir("sw_nl")).code, 0);
  const auto j = load_json(fs::path(out_dir("sw_nl")) / "sweep_manifest.json");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["classification"], "PositiveB");
  EXPECT_EQ(j["rows"][1]["classification"], "Neither");
}

TEST(Cli, ReportSummarizesOutputs) {
  ASSERT_EQ(run_cli("classify --out " + out_dir("rep")).code, 0);
  const auto r = run_cli("report --out " + out_dir("rep"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("classify: PositiveB"), std::string::npos);
  fs::create_directories(out_dir("rep_empty"));
  EXPECT_EQ(run_cli("report --out " + out_dir("rep_empty")).code, 2);
}

TEST(Config, ParsingAndHash) {
  kgres::cli::RunConfig a;
  a.load_string("[pde]\neps = 0.025\n[system]\nm1 = 1/2\nm2 = 1\n");
  EXPECT_EQ(a.num("pde.eps"), 0.025);
  EXPECT_EQ(a.str("system.m1"), "1/2");
  EXPECT_THROW(a.load_string("[pde]\nwhat = 1\n"), kgres::cli::ConfigError);
  EXPECT_THROW((void)a.num("system.nonlinearity"), kgres::cli::ConfigError);
  kgres::cli::RunConfig b = a;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 1;
  EXPECT_NE(a.hash(), b.hash());
  b.seed = 0;
  b.apply_override("pde.eps=0.05");
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(kgres::cli::format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(kgres::cli::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Config, InProcessDispatch) {
  kgres::cli::RunConfig cfg;
  cfg.out_dir = out_dir("inproc");
  std::ostringstream out, err;
  EXPECT_EQ(kgres::cli::run_command("classify", cfg, out, err), 0);
  EXPECT_EQ(kgres::cli::run_command("nope", cfg, out, err), 2);
}
