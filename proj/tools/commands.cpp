#include "commands.hpp"

#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "cimpmm/error.hpp"
#include "cimpmm/noise_study.hpp"
#include "cimpmm/ntt_fabric.hpp"
#include "cimpmm/poly.hpp"
#include "cimpmm/sweep.hpp"

namespace cimpmm::cli {

using nlohmann::ordered_json;

namespace {

ordered_json echo(const RunConfig& c) {
  ordered_json j;
  to_json(j, c);
  return j;
}

void echo_comment(const RunConfig& c, std::ostream& out) { out << "# config " << echo(c).dump() << '\n'; }

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

ordered_json counters_json(const EventCounters& e) {
  return {{"adc_conversions", e.adc_conversions}, {"shift_add_ops", e.shift_add_ops},
          {"adder_tree_ops", e.adder_tree_ops},   {"accumulate_ops", e.accumulate_ops},
          {"reduction_ops", e.reduction_ops},     {"array_activations", e.array_activations}};
}

ordered_json report_json(const CostReport& r) {
  ordered_json area, energy;
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    const auto name = to_string(kComponents[i]);
    area[name] = {{"units", r.units[i]}, {"um2", r.area_um2[i]}, {"fraction", r.area_fraction[i]}};
    energy[name] = {{"pj", r.energy_pj[i]}, {"fraction", r.energy_fraction[i]}};
  }
  return {{"mode", to_string(r.mode)},
          {"arrays", r.arrays},
          {"cycles", r.total_cycles},
          {"initiation_interval", r.initiation_interval},
          {"frequency_mhz", r.frequency_mhz},
          {"area_mm2", r.area_mm2},
          {"latency_us", r.latency_us},
          {"energy_nj", r.energy_nj},
          {"throughput_kops", r.throughput_kops},
          {"tpa_kops_mm2", r.throughput_per_area},
          {"dominant_area", to_string(r.dominant_area())},
          {"dominant_energy", to_string(r.dominant_energy())},
          {"area_breakdown", area},
          {"energy_breakdown", energy}};
}

ordered_json plan_json(const MappingPlan& p) {
  return {{"mode", to_string(p.mode)},
          {"pe_count", p.pe_count},
          {"row_tiles", p.row_tiles},
          {"col_tiles", p.col_tiles},
          {"logical_arrays", p.logical_count()},
          {"physical_arrays", p.physical_count()},
          {"instantiated_arrays", p.instantiated_arrays()},
          {"reuse_factor", p.reuse_factor()},
          {"shift_adders", p.shift_adder_count},
          {"adder_tree_nodes", p.adder_tree_nodes},
          {"time_multiplex", p.time_multiplex}};
}

void write_rows(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& [k, _] : rows) w = std::max(w, k.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(w + 2)) << k << v << '\n';
}

FabricConfig fabric_config(const RunConfig& c, const RingParams& ring, MappingMode mode) {
  FabricConfig fc;
  fc.xbar = crossbar_of(c);
  fc.ring = ring;
  fc.mode = mode;
  fc.array_budget = c.arrays;
  fc.validate();
  return fc;
}

// ---------------------------------------------------------------- verify

const std::vector<std::string> kChecks = {
    "barrett_exhaustive_q17",
    "barrett_random",
    "conv1d_vs_double_loop",
    "reduce_degree_vs_long_division",
    "ntt_vs_reference",
    "plan_reconstructs_weights",
    "fabric_bit_mapping_vs_reference",
    "fabric_conventional_vs_reference",
    "counters_predicted_vs_simulated",
    "dedup_vs_materialized",
    "pipeline_recurrence",
    "ntt_xbar_vs_reference",
};

class Tallies {
 public:
  Tallies() {
    for (const auto& n : kChecks) index_[n] = tallies_.size(), tallies_.push_back({n, 0, 0, {}});
  }

  void run(const std::string& check, const std::string& label, const std::function<bool()>& body) {
    VerifyTally& t = tallies_.at(index_.at(check));
    ++t.cases;
    bool ok = false;
    std::string why;
    try {
      ok = body();
    } catch (const std::exception& e) {
      why = std::string(": ") + e.what();
    }
    if (!ok) {
      ++t.mismatches;
      if (t.first_failure.empty()) t.first_failure = label + why;
    }
  }

  std::vector<VerifyTally> take() { return std::move(tallies_); }

 private:
  std::vector<VerifyTally> tallies_;
  std::map<std::string, std::size_t> index_;
};

BarrettParams barrett_for(u64 q, unsigned k, bool corrupt) {
  BarrettParams bp = barrett_precompute(q, k);
  if (corrupt) bp.mu += 1;
  return bp;
}

// Independent oracles: plain loops over boost integers.
std::vector<WideInt> double_loop(const Polynomial& a, const Polynomial& b) {
  const std::size_t n = a.size();
  std::vector<WideInt> w(2 * n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i + j] += WideInt(a[i]) * WideInt(b[j]);
  }
  return w;
}

std::vector<u64> long_division_remainder(const Polynomial& a, const Polynomial& b) {
  const RingParams& p = a.params();
  const std::size_t n = p.n;
  std::vector<u64> r(2 * n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) r[i + j] = add_mod(r[i + j], mul_mod(a[i], b[j], p.q), p.q);
  }
  for (std::size_t d = 2 * n - 2; d >= n; --d) {
    const u64 lead = r[d];
    r[d] = 0;
    r[d - n] = p.phi == ModulusPoly::XnPlus1 ? sub_mod(r[d - n], lead, p.q) : add_mod(r[d - n], lead, p.q);
  }
  r.resize(n);
  return r;
}

std::string ring_label(const RingParams& r) {
  return "n=" + std::to_string(r.n) + " q=" + std::to_string(r.q) + " phi=" + to_string(r.phi);
}

}  // namespace

const std::vector<std::string>& verify_check_names() { return kChecks; }

std::vector<VerifyTally> run_verify_checks(const RunConfig& c, bool corrupt) {
  Tallies t;
  const std::vector<std::size_t> degrees = c.degrees.empty() ? std::vector<std::size_t>{4, 8, 16, 32, 64} : c.degrees;
  const std::vector<unsigned> bitwidths = c.bitwidths.empty() ? std::vector<unsigned>{4, 8, 16} : c.bitwidths;
  std::mt19937_64 rng(c.seed);

  {
    const auto bp = barrett_for(17, 5, corrupt);
    for (u64 x = 0; x < (u64{1} << bp.m); ++x) {
      t.run("barrett_exhaustive_q17", "x=" + std::to_string(x), [&] { return barrett_reduce(x, bp) == x % 17; });
    }
  }

  for (const std::size_t n : degrees) {
    for (const unsigned k : bitwidths) {
      for (const ModulusPoly phi : {ModulusPoly::XnPlus1, ModulusPoly::XnMinus1}) {
        const auto ring = RingParams::make(n, default_modulus(n, k), phi);
        const std::string label = ring_label(ring);

        const auto bp = barrett_for(ring.q, ring.k, corrupt);
        std::uniform_int_distribution<u64> below_m(0, bp.m >= 64 ? ~u64{0} : (u64{1} << bp.m) - 1);
        for (int i = 0; i < 200; ++i) {
          u128 x = below_m(rng);
          if (bp.m > 64) x |= static_cast<u128>(below_m(rng) & ((u64{1} << (bp.m - 64)) - 1)) << 64;
          t.run("barrett_random", label, [&] { return barrett_reduce(x, bp) == static_cast<u64>(x % ring.q); });
        }

        std::optional<NttContext> ctx;
        try {
          ctx = NttContext::make(ring);
        } catch (const UnsupportedParameters&) {
        }

        for (const MappingMode mode : {MappingMode::BitMapping, MappingMode::Conventional}) {
          const auto fc = fabric_config(c, ring, mode);
          const std::string fabric_check = mode == MappingMode::BitMapping ? "fabric_bit_mapping_vs_reference"
                                                                           : "fabric_conventional_vs_reference";
          for (std::size_t pair = 0; pair < c.pairs; ++pair) {
            const auto a = random_polynomial(ring, rng);
            const auto b = random_polynomial(ring, rng);
            const std::string case_label = label + " mode=" + to_string(mode) + " pair=" + std::to_string(pair);
            const auto expect = pmm_reference(a, b);

            if (mode == MappingMode::BitMapping) {
              t.run("conv1d_vs_double_loop", case_label, [&] { return poly_mul_conv1d(a, b).vals == double_loop(a, b); });
              t.run("reduce_degree_vs_long_division", case_label, [&] {
                return std::vector<u64>(expect.coeffs().begin(), expect.coeffs().end()) == long_division_remainder(a, b);
              });
              if (ctx) t.run("ntt_vs_reference", case_label, [&] { return pmm_via_ntt(a, b, *ctx) == expect; });
              if (ctx && n <= 32) {
                t.run("ntt_xbar_vs_reference", case_label,
                      [&] { return simulate_pmm_ntt_on_xbar(a, b, *ctx, fc.xbar).result == expect; });
              }
            }

            PmmFabric fabric(a, fc);
            if (corrupt) fabric.override_barrett(bp);
            std::optional<FabricResult> res;
            t.run(fabric_check, case_label, [&] {
              res = fabric.simulate(b);
              return res->result == expect;
            });
            t.run("counters_predicted_vs_simulated", case_label,
                  [&] { return res && res->trace.counters == fabric.predicted_counters(); });

            if (pair == 0) {
              t.run("plan_reconstructs_weights", case_label,
                    [&] { return reconstruct_weights(fabric.plan()) == ConvMatrix(a).dense(); });
              t.run("dedup_vs_materialized", case_label, [&] {
                PmmFabric full(a, fc, materialize_logical(fabric.plan()));
                if (corrupt) full.override_barrett(bp);
                const auto r2 = full.simulate(b);
                return res && r2.result == res->result && r2.trace.counters == res->trace.counters &&
                       fabric.plan().physical_count() <= full.plan().physical_count();
              });
              for (std::size_t m = 1; m <= 4; ++m) {
                t.run("pipeline_recurrence", case_label + " m=" + std::to_string(m), [&] {
                  const auto s = fabric.stage_cycles();
                  const auto tr = schedule_pipeline(s, fabric.predicted_counters(), m);
                  return tr.total_cycles == s.fill_latency() + (m - 1) * s.initiation_interval();
                });
              }
            }
          }
        }
      }
    }
  }

  // NTT-friendly primes of several sizes.
  for (const std::size_t n : degrees) {
    for (const u64 q : {u64{7681}, u64{12289}}) {
      std::optional<NttContext> ctx;
      try {
        ctx = NttContext::make(n, q);
      } catch (const UnsupportedParameters&) {
        continue;
      }
      for (std::size_t pair = 0; pair < c.pairs; ++pair) {
        const auto a = random_polynomial(ctx->params, rng);
        const auto b = random_polynomial(ctx->params, rng);
        t.run("ntt_vs_reference", ring_label(ctx->params),
              [&] { return pmm_via_ntt(a, b, *ctx) == pmm_reference(a, b); });
      }
    }
  }
  return t.take();
}

int cmd_verify(const RunConfig& c, std::ostream& out, bool corrupt_barrett_mu) {
  validate(c);
  const auto tallies = run_verify_checks(c, corrupt_barrett_mu);
  std::size_t cases = 0, mismatches = 0;
  for (const auto& t : tallies) cases += t.cases, mismatches += t.mismatches;
  const auto format = output_format(c);
  if (format == OutputFormat::Json) {
    ordered_json checks = ordered_json::array();
    for (const auto& t : tallies) {
      checks.push_back({{"check", t.check}, {"cases", t.cases}, {"mismatches", t.mismatches},
                        {"first_failure", t.first_failure}});
    }
    out << ordered_json{{"config", echo(c)}, {"checks", checks}, {"cases", cases}, {"mismatches", mismatches}}.dump(2)
        << '\n';
  } else if (format == OutputFormat::Csv) {
    out << "# cimpmm verify csv v1\n";
    echo_comment(c, out);
    out << "check,cases,mismatches\n";
    for (const auto& t : tallies) out << t.check << ',' << t.cases << ',' << t.mismatches << '\n';
  } else {
    echo_comment(c, out);
    for (const auto& t : tallies) {
      out << std::left << std::setw(34) << t.check << std::right << std::setw(8) << t.cases << " cases "
          << std::setw(6) << t.mismatches << " mismatches";
      if (!t.first_failure.empty()) out << "  first: " << t.first_failure;
      out << '\n';
    }
    out << cases << " cases, " << mismatches << " mismatches\n";
  }
  return mismatches == 0 ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------- run

int cmd_run(const RunConfig& c, std::ostream& out) {
  validate(c);
  const auto ring = ring_of(c);
  const auto mode = mapping_mode_from_string(c.mode);
  const auto fc = fabric_config(c, ring, mode);
  std::mt19937_64 rng(c.seed);
  const auto a = random_polynomial(ring, rng);
  const auto b = random_polynomial(ring, rng);

  const PmmFabric fabric(a, fc);
  const bool noisy = fc.xbar.noisy();
  const auto res = fabric.simulate(b, noisy ? std::optional<std::uint64_t>(c.seed) : std::nullopt);
  const auto trace = schedule_pipeline(res.trace.stages, res.trace.counters, c.pmms);
  const auto report = estimate(fabric.plan(), ring, trace, costs_of(c));
  const bool exact = res.result == pmm_reference(a, b);

  switch (output_format(c)) {
    case OutputFormat::Json: {
      ordered_json j{{"config", echo(c)},
                     {"ring", {{"n", ring.n}, {"q", ring.q}, {"k", ring.k}, {"phi", to_string(ring.phi)}}},
                     {"plan", plan_json(fabric.plan())},
                     {"result",
                      {{"matches_reference", exact},
                       {"coefficients", std::vector<u64>(res.result.coeffs().begin(), res.result.coeffs().end())}}},
                     {"trace",
                      {{"pmm_count", trace.pmm_count},
                       {"total_cycles", trace.total_cycles},
                       {"initiation_interval", trace.initiation_interval},
                       {"fill_latency", trace.fill_latency},
                       {"stage_busy", trace.stages.busy},
                       {"stage_latency", trace.stages.latency},
                       {"counters", counters_json(trace.counters)}}},
                     {"cost", report_json(report)}};
      if (res.error_stats) {
        j["error_stats"] = {{"mean_abs_error", res.error_stats->mean_abs_error},
                            {"max_abs_error", res.error_stats->max_abs_error},
                            {"error_rate", res.error_stats->error_rate}};
      }
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv:
      out << sweep_csv({SweepRow{{ring.n, ring.k, mode, c.arrays}, ring.q, report}}, echo(c).dump());
      break;
    case OutputFormat::Table: {
      echo_comment(c, out);
      std::vector<std::pair<std::string, std::string>> rows = {
          {"ring", ring_label(ring) + " k=" + std::to_string(ring.k)},
          {"mode", to_string(mode)},
          {"arrays", std::to_string(report.arrays) + " instantiated / " +
                         std::to_string(fabric.plan().logical_count()) + " logical"},
          {"matches_reference", exact ? "yes" : "no"},
          {"initiation_interval", std::to_string(trace.initiation_interval) + " cycles"},
          {"total_cycles", std::to_string(trace.total_cycles) + " (" + std::to_string(c.pmms) + " PMMs)"},
          {"area_mm2", fmt(report.area_mm2)},
          {"latency_us", fmt(report.latency_us)},
          {"energy_nj", fmt(report.energy_nj)},
          {"throughput_kops", fmt(report.throughput_kops)},
          {"tpa_kops_mm2", fmt(report.throughput_per_area)},
          {"dominant_area", to_string(report.dominant_area())},
          {"dominant_energy", to_string(report.dominant_energy())},
      };
      if (res.error_stats) {
        rows.push_back({"mean_abs_error", fmt(res.error_stats->mean_abs_error)});
        rows.push_back({"error_rate", fmt(res.error_stats->error_rate)});
      }
      write_rows(out, rows);
      break;
    }
  }
  return !noisy && !exact ? kExitMismatch : kExitOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  validate(c);
  SweepGrid grid;
  grid.degrees = c.degrees.empty() ? std::vector<std::size_t>{256, 512, 1024, 2048} : c.degrees;
  grid.bitwidths = c.bitwidths.empty() ? std::vector<unsigned>{c.bitwidth} : c.bitwidths;
  grid.modes = modes_of(c);
  grid.budgets.clear();
  if (c.budgets.empty()) {
    grid.budgets.push_back(c.arrays);
  } else {
    for (const auto b : c.budgets) grid.budgets.emplace_back(b);
  }
  const auto rows = sweep(grid, crossbar_of(c), StageTiming{}, costs_of(c), c.seed);

  switch (output_format(c)) {
    case OutputFormat::Csv:
      out << sweep_csv(rows, echo(c).dump());
      break;
    case OutputFormat::Json: {
      ordered_json arr = ordered_json::array();
      for (const auto& r : rows) {
        auto j = report_json(r.report);
        j["n"] = r.point.n;
        j["k"] = r.point.k;
        j["q"] = r.q;
        j["budget"] = r.point.array_budget ? ordered_json(*r.point.array_budget) : ordered_json(nullptr);
        arr.push_back(std::move(j));
      }
      out << ordered_json{{"config", echo(c)}, {"rows", arr}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::Table:
      echo_comment(c, out);
      out << std::right << std::setw(6) << "n" << std::setw(4) << "k" << std::setw(14) << "mode" << std::setw(8)
          << "budget" << std::setw(8) << "arrays" << std::setw(9) << "cycles" << std::setw(11) << "area_mm2"
          << std::setw(12) << "energy_nj" << std::setw(12) << "kops" << std::setw(12) << "kops/mm2" << '\n';
      for (const auto& r : rows) {
        const auto& p = r.report;
        out << std::setw(6) << r.point.n << std::setw(4) << r.point.k << std::setw(14) << to_string(r.point.mode)
            << std::setw(8) << (r.point.array_budget ? std::to_string(*r.point.array_budget) : "-") << std::setw(8)
            << p.arrays << std::setw(9) << p.total_cycles << std::setw(11) << fmt(p.area_mm2, 4) << std::setw(12)
            << fmt(p.energy_nj, 5) << std::setw(12) << fmt(p.throughput_kops, 5) << std::setw(12)
            << fmt(p.throughput_per_area, 5) << '\n';
      }
      break;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- compare-mapping

int cmd_compare_mapping(const RunConfig& c, std::ostream& out) {
  validate(c);
  const auto ring = ring_of(c);
  const auto costs = costs_of(c);
  const auto xbar = crossbar_of(c);
  std::mt19937_64 rng(c.seed);
  const auto a = random_polynomial(ring, rng);

  std::vector<CostReport> reports;
  for (const MappingMode mode : {MappingMode::BitMapping, MappingMode::Conventional}) {
    const auto plan = mode == MappingMode::BitMapping ? plan_bit_mapping(a, xbar, c.arrays)
                                                      : plan_conventional(a, xbar, c.arrays);
    const auto stages = stage_cycles(plan, StageTiming{}, ring.k, ring.n);
    const auto counters = predict_counters(plan, ring.k, ring.n, LimbReducer::limbs_for_ring(ring.n, ring.k));
    reports.push_back(estimate(plan, ring, schedule_pipeline(stages, counters, c.pmms), costs));
  }
  auto table = compare(reports[0], reports[1]);
  const auto sa = static_cast<std::size_t>(Component::ShiftAdder);
  RatioEntry count{"shift_adders", reports[0].units[sa], reports[1].units[sa], std::nullopt};
  if (count.b != 0) count.ratio = count.a / count.b;
  table.insert(table.begin(), count);

  switch (output_format(c)) {
    case OutputFormat::Json: {
      ordered_json rows = ordered_json::array();
      for (const auto& e : table) {
        rows.push_back({{"field", e.field},
                        {"bit_mapping", e.a},
                        {"conventional", e.b},
                        {"ratio", e.ratio ? ordered_json(*e.ratio) : ordered_json(nullptr)},
                        {"flagged", !e.ratio.has_value()}});
      }
      out << ordered_json{{"config", echo(c)}, {"ratios", rows}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv:
      out << "# cimpmm compare csv v1\n";
      echo_comment(c, out);
      out << "field,bit_mapping,conventional,ratio\n";
      for (const auto& e : table) {
        out << e.field << ',' << fmt(e.a, 10) << ',' << fmt(e.b, 10) << ',' << (e.ratio ? fmt(*e.ratio, 10) : "div0")
            << '\n';
      }
      break;
    case OutputFormat::Table:
      echo_comment(c, out);
      out << std::left << std::setw(24) << "field" << std::right << std::setw(16) << "bit-mapping" << std::setw(16)
          << "conventional" << std::setw(14) << "ratio" << '\n';
      for (const auto& e : table) {
        out << std::left << std::setw(24) << e.field << std::right << std::setw(16) << fmt(e.a) << std::setw(16)
            << fmt(e.b) << std::setw(14) << (e.ratio ? fmt(*e.ratio, 4) : "div0 (flagged)") << '\n';
      }
      break;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- noise-study

int cmd_noise_study(const RunConfig& c, std::ostream& out) {
  validate(c);
  NoiseStudyConfig nc;
  nc.sigmas = c.sigmas;
  nc.degrees = c.noise_degrees;
  nc.seeds = c.seeds;
  nc.base_seed = c.seed;
  nc.flip_prob = c.flip_prob;
  nc.xbar = crossbar_of(c);
  const auto study = run_noise_study(nc);
  const double frac = ordering_fraction(study);

  switch (output_format(c)) {
    case OutputFormat::Json: {
      ordered_json arr = ordered_json::array();
      for (const auto& s : study) {
        ordered_json pairs = ordered_json::array();
        for (const auto& p : s.pairs) pairs.push_back({p.seed, p.conv_error, p.ntt_error});
        arr.push_back({{"sigma", s.sigma},
                       {"n", s.n},
                       {"q", s.q},
                       {"mean_conv", s.mean_conv},
                       {"mean_ntt", s.mean_ntt},
                       {"mean_diff", s.mean_diff},
                       {"se_diff", s.se_diff},
                       {"ordering_holds", s.ordering_holds},
                       {"strictly_greater", s.strictly_greater},
                       {"pairs", pairs}});
      }
      out << ordered_json{{"config", echo(c)}, {"configs", arr}, {"ordering_fraction", frac}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv:
      out << "# cimpmm noise csv v1\n";
      echo_comment(c, out);
      out << "sigma,n,q,seed,conv_error,ntt_error\n";
      for (const auto& s : study) {
        for (const auto& p : s.pairs) {
          out << s.sigma << ',' << s.n << ',' << s.q << ',' << p.seed << ',' << fmt(p.conv_error, 10) << ','
              << fmt(p.ntt_error, 10) << '\n';
        }
      }
      for (const auto& s : study) {
        out << "# summary sigma=" << s.sigma << " n=" << s.n << " mean_conv=" << fmt(s.mean_conv)
            << " mean_ntt=" << fmt(s.mean_ntt) << " mean_diff=" << fmt(s.mean_diff) << " se=" << fmt(s.se_diff)
            << " holds=" << s.ordering_holds << " strict=" << s.strictly_greater << '\n';
      }
      out << "# ordering_fraction=" << fmt(frac) << '\n';
      break;
    case OutputFormat::Table:
      echo_comment(c, out);
      out << std::right << std::setw(6) << "sigma" << std::setw(5) << "n" << std::setw(6) << "q" << std::setw(12)
          << "conv_err" << std::setw(12) << "ntt_err" << std::setw(11) << "diff" << std::setw(9) << "se"
          << std::setw(7) << "holds" << std::setw(8) << "strict" << '\n';
      for (const auto& s : study) {
        out << std::setw(6) << s.sigma << std::setw(5) << s.n << std::setw(6) << s.q << std::setw(12)
            << fmt(s.mean_conv, 5) << std::setw(12) << fmt(s.mean_ntt, 5) << std::setw(11) << fmt(s.mean_diff, 4)
            << std::setw(9) << fmt(s.se_diff, 3) << std::setw(7) << (s.ordering_holds ? "yes" : "no")
            << std::setw(8) << (s.strictly_greater ? "yes" : "no") << '\n';
      }
      out << "ordering holds in " << fmt(100 * frac, 4) << "% of configurations\n";
      break;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- dump-plan

WeightMatrix toy_weights() {
  WeightMatrix w(4, 4);
  w << 1, 2, 3, 0,
       2, 3, 0, 1,
       3, 0, 1, 2,
       0, 1, 2, 3;
  return w;
}

int cmd_dump_plan(const RunConfig& c, std::ostream& out) {
  validate(c);
  std::vector<MappingPlan> plans;
  for (const MappingMode mode : modes_of(c)) {
    if (c.operand == "toy") {
      CrossbarConfig toy = crossbar_of(c);
      toy.rows = 2;
      toy.cols = 2;
      toy.cols_per_adc = 1;
      plans.push_back(plan_mapping(mode, DenseWeights(toy_weights(), 2), toy, c.arrays));
    } else {
      const auto ring = ring_of(c);
      std::mt19937_64 rng(c.seed);
      const auto a = c.operand == "zero" ? Polynomial::zero(ring) : random_polynomial(ring, rng);
      plans.push_back(plan_mapping(mode, ConvMatrix(a), crossbar_of(c), c.arrays));
    }
  }
  if (output_format(c) == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : plans) {
      auto j = plan_json(p);
      ordered_json pes = ordered_json::array();
      for (std::size_t pe = 0; pe < p.pe_count; ++pe) {
        pes.push_back({{"pe", pe}, {"shift", p.pe_shift[pe]}, {"distinct_arrays", p.distinct_in_pe(pe)}});
      }
      j["pes"] = pes;
      arr.push_back(std::move(j));
    }
    out << ordered_json{{"config", echo(c)}, {"plans", arr}}.dump(2) << '\n';
  } else {
    echo_comment(c, out);
    for (const auto& p : plans) out << describe_plan(p);
  }
  return kExitOk;
}

}  // namespace cimpmm::cli
