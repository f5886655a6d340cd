#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "cimpmm/error.hpp"
#include "commands.hpp"

using namespace cimpmm;
using namespace cimpmm::cli;

namespace {

// Collects flag values and applies only those given on the command line.
class Overrides {
 public:
  explicit Overrides(CLI::App* app) : app_(app) {}

  template <typename T>
  void add(const std::string& name, const std::string& desc, std::function<void(RunConfig&, const T&)> set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(name, *value, desc);
    if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) opt->delimiter(',');
    apply_.push_back([opt, value, set](RunConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
  }

  void apply(RunConfig& c) const {
    for (const auto& f : apply_) f(c);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> apply_;
};

void add_run_config_flags(Overrides& o) {
  o.add<std::size_t>("--degree,-n", "polynomial degree n (power of two)", [](auto& c, auto v) { c.degree = v; });
  o.add<unsigned>("--bitwidth,-k", "modulus bitwidth k", [](auto& c, auto v) { c.bitwidth = v; });
  o.add<u64>("--modulus,-q", "explicit odd modulus q (overrides --bitwidth)", [](auto& c, auto v) { c.modulus = v; });
  o.add<std::string>("--phi", "modulus polynomial: x^n+1 or x^n-1", [](auto& c, auto v) { c.phi = v; });
  o.add<std::size_t>("--rows", "crossbar rows", [](auto& c, auto v) { c.rows = v; });
  o.add<std::size_t>("--cols", "crossbar columns", [](auto& c, auto v) { c.cols = v; });
  o.add<unsigned>("--adc-bits", "ADC precision", [](auto& c, auto v) { c.adc_bits = v; });
  o.add<std::size_t>("--cols-per-adc", "columns sharing one ADC", [](auto& c, auto v) { c.cols_per_adc = v; });
  o.add<std::string>("--mode", "bit-mapping, conventional or both", [](auto& c, auto v) { c.mode = v; });
  o.add<std::size_t>("--arrays", "physical array budget", [](auto& c, auto v) { c.arrays = v; });
  o.add<double>("--sigma", "column noise sigma in cell currents", [](auto& c, auto v) { c.sigma = v; });
  o.add<double>("--flip-prob", "cell read flip probability", [](auto& c, auto v) { c.flip_prob = v; });
  o.add<std::uint64_t>("--seed", "random seed", [](auto& c, auto v) { c.seed = v; });
  o.add<std::size_t>("--pmms", "PMMs streamed through the pipeline", [](auto& c, auto v) { c.pmms = v; });
  o.add<std::size_t>("--pairs", "random pairs per verify configuration", [](auto& c, auto v) { c.pairs = v; });
  o.add<std::vector<std::size_t>>("--degrees", "degree grid", [](auto& c, const auto& v) { c.degrees = v; });
  o.add<std::vector<unsigned>>("--bitwidths", "bitwidth grid", [](auto& c, const auto& v) { c.bitwidths = v; });
  o.add<std::vector<std::size_t>>("--budgets", "array budget grid", [](auto& c, const auto& v) { c.budgets = v; });
  o.add<std::vector<double>>("--sigmas", "noise-study sigmas", [](auto& c, const auto& v) { c.sigmas = v; });
  o.add<std::vector<std::size_t>>("--noise-degrees", "noise-study degrees",
                                  [](auto& c, const auto& v) { c.noise_degrees = v; });
  o.add<std::size_t>("--seeds", "paired seeds per noise configuration", [](auto& c, auto v) { c.seeds = v; });
  o.add<std::string>("--operand", "dump-plan operand: random, zero or toy", [](auto& c, auto v) { c.operand = v; });
  o.add<std::string>("--costs", "cost table file", [](auto& c, auto v) { c.costs = v; });
  o.add<std::string>("--out", "write output to this file", [](auto& c, auto v) { c.out = v; });
  o.add<std::string>("--format", "table, csv or json", [](auto& c, auto v) { c.format = v; });
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::unique_ptr<Overrides> overrides;
  std::string config_path;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crossbar PMM simulator: verification, runs, sweeps and plan inspection"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> names = {
      {"verify", "cross-check every PMM path against the reference oracle"},
      {"run", "simulate one PMM end to end and report cost"},
      {"sweep", "cost reports over a degree/bitwidth/budget grid (CSV)"},
      {"compare-mapping", "bit mapping versus conventional mapping ratios"},
      {"noise-study", "paired Conv1D versus NTT-on-crossbar error statistics"},
      {"dump-plan", "print a mapping plan"},
  };
  std::map<std::string, Subcommand> subs;
  bool corrupt_mu = false;
  bool list_checks = false;
  for (const auto& [name, desc] : names) {
    // Options bind to members by reference, so build the entry in place.
    Subcommand& s = subs[name];
    s.app = app.add_subcommand(name, desc);
    s.app->add_option("--config", s.config_path, "JSON run config; flags override its values");
    s.overrides = std::make_unique<Overrides>(s.app);
    add_run_config_flags(*s.overrides);
    if (name == "verify") {
      s.app->add_flag("--corrupt-barrett-mu", corrupt_mu, "fault injection: perturb Barrett mu")->group("");
      s.app->add_flag("--list-checks", list_checks, "print the check manifest and exit");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      if (name == "verify" && list_checks) {
        for (const auto& check : verify_check_names()) std::cout << check << '\n';
        return kExitOk;
      }
      RunConfig cfg = s.config_path.empty() ? RunConfig{} : load_config(s.config_path);
      s.overrides->apply(cfg);

      std::ofstream file;
      if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) throw ConfigError("cannot write '" + cfg.out + "'");
      }
      std::ostream& out = cfg.out.empty() ? std::cout : file;
      if (name == "verify") return cmd_verify(cfg, out, corrupt_mu);
      if (name == "run") return cmd_run(cfg, out);
      if (name == "sweep") return cmd_sweep(cfg, out);
      if (name == "compare-mapping") return cmd_compare_mapping(cfg, out);
      if (name == "noise-study") return cmd_noise_study(cfg, out);
      if (name == "dump-plan") return cmd_dump_plan(cfg, out);
    }
  } catch (const cimpmm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
