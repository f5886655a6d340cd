#include <random>

#include <gtest/gtest.h>

#include "cimpmm/error.hpp"
#include "cimpmm/fabric.hpp"
#include "cimpmm/ntt_fabric.hpp"
#include "cimpmm/poly.hpp"
#include "oracles.hpp"

using namespace cimpmm;

namespace {

RingParams ring(std::size_t n, unsigned k, ModulusPoly phi = ModulusPoly::XnPlus1) {
  return RingParams::make(n, default_modulus(n, k), phi);
}

FabricConfig config(const RingParams& r, MappingMode mode = MappingMode::BitMapping,
                    std::optional<std::size_t> budget = std::nullopt) {
  FabricConfig fc;
  fc.ring = r;
  fc.mode = mode;
  fc.array_budget = budget;
  return fc;
}

std::vector<u64> as_vec(const Polynomial& p) { return {p.coeffs().begin(), p.coeffs().end()}; }

Polynomial oracle_pmm(const Polynomial& a, const Polynomial& b) {
  const int sign = a.params().phi == ModulusPoly::XnPlus1 ? 1 : -1;
  return Polynomial(a.params(), oracle::pmm(as_vec(a), as_vec(b), sign, a.params().q));
}

}  // namespace

TEST(Fabric, ProgramsEachPhysicalArrayOnce) {
  std::mt19937_64 rng(1);
  const auto r = ring(256, 16);
  const auto plan = plan_bit_mapping(random_polynomial(r, rng), CrossbarConfig{});
  const auto f = Fabric::load(plan);
  EXPECT_EQ(f.program_count(), plan.physical_count());
  EXPECT_EQ(f.arrays().size(), plan.physical_count());
  for (std::size_t i = 0; i < plan.physical_count(); ++i) EXPECT_EQ(f.arrays()[i].packed(), plan.physical_arrays[i]);

  const auto zero = Fabric::load(plan_bit_mapping(Polynomial::zero(r), CrossbarConfig{}));
  EXPECT_EQ(zero.program_count(), 1u);
}

TEST(Fabric, BasisProbeReadsWeightRows) {
  std::mt19937_64 rng(2);
  // 200 x 150 so both tile grids have ragged edges
  WeightMatrix w(200, 150);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng() % 64;
  const DenseWeights m(w, 6);
  for (const auto mode : {MappingMode::BitMapping, MappingMode::Conventional}) {
    const auto f = Fabric::load(plan_mapping(mode, m, CrossbarConfig{}));
    for (const std::size_t j : {0, 1, 127, 128, 199}) {
      BitVector e = BitVector::Zero(200);
      e(static_cast<Eigen::Index>(j)) = 1;
      EventCounters c;
      const auto parts = f.pe_partials(e, nullptr, c);
      for (std::size_t col = 0; col < m.cols(); ++col) {
        const u64 want = w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(col));
        if (mode == MappingMode::BitMapping) {
          for (unsigned p = 0; p < 6; ++p) ASSERT_EQ(static_cast<u64>(parts[p][col]), (want >> p) & 1U);
        } else {
          ASSERT_EQ(static_cast<u64>(parts[0][col]), want);
        }
      }
    }
    EventCounters c;
    EXPECT_THROW(f.pe_partials(BitVector::Zero(199), nullptr, c), DimensionMismatch);
  }
}

TEST(Fabric, PeComputeMatchesIntegerMatvec) {
  std::mt19937_64 rng(3);
  const auto r = ring(256, 16);
  const ConvMatrix m(random_polynomial(r, rng));
  const auto planes = bit_slice_weights(m, 16);
  const auto f = Fabric::load(plan_bit_mapping(m, CrossbarConfig{}));
  const auto b = random_polynomial(r, rng);
  EventCounters c;
  const auto out = f.pe_compute(b.coeffs(), 16, nullptr, c);
  ASSERT_EQ(out.size(), 16u);
  for (unsigned p = 0; p < 16; ++p) {
    for (std::size_t col = 0; col < m.cols(); col += 17) {
      oracle::Big want = 0;
      for (std::size_t row = 0; row < 256; ++row) {
        want += oracle::Big(b[row]) * planes[p].bits(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
      }
      ASSERT_EQ(oracle::Big(out[p][col].value().str()), want);
    }
  }
}

TEST(Fabric, TimeMultiplexDoublesBusyNotValues) {
  std::mt19937_64 rng(4);
  const auto r = ring(256, 16);
  const auto a = random_polynomial(r, rng), b = random_polynomial(r, rng);
  const PmmFabric full(a, config(r));
  const std::size_t phys = full.plan().physical_count();
  const PmmFabric half(a, config(r, MappingMode::BitMapping, (phys + 1) / 2));
  EXPECT_EQ(half.plan().time_multiplex, 2u);
  const auto pe = static_cast<std::size_t>(Stage::PeCompute);
  EXPECT_EQ(half.stage_cycles().busy[pe], 2 * full.stage_cycles().busy[pe]);
  EXPECT_EQ(half.simulate(b).result, full.simulate(b).result);
}

TEST(TileAccumulate, ShiftsAndSums) {
  std::vector<std::vector<WideAccumulator>> outs(2, std::vector<WideAccumulator>(2));
  outs[0][0].add(5);
  outs[0][1].add(1);
  outs[1][0].add(2);
  EventCounters c;
  const std::vector<unsigned> shifts{0, 3};
  const auto w = tile_accumulate(outs, shifts, &c);
  EXPECT_EQ(w.vals[0], WideInt(5 + 16));
  EXPECT_EQ(w.vals[1], WideInt(1));
  EXPECT_EQ(c.accumulate_ops, 4u);
  const std::vector<unsigned> one{0};
  EXPECT_THROW(tile_accumulate(outs, one), DimensionMismatch);
}

TEST(TileAccumulate, FullWidthPartialsDoNotOverflow) {
  // 64 PEs of 128-bit all-ones partials shifted up to 63: needs ~191 bits.
  std::vector<std::vector<WideAccumulator>> outs(64, std::vector<WideAccumulator>(1));
  std::vector<unsigned> shifts;
  oracle::Big want = 0;
  const u128 ones = ~u128{0};
  const oracle::Big big_ones = (oracle::Big(1) << 128) - 1;
  for (unsigned p = 0; p < 64; ++p) {
    outs[p][0].add(ones);
    shifts.push_back(p);
    want += big_ones << p;
  }
  EXPECT_EQ(oracle::Big(tile_accumulate(outs, shifts).vals[0].str()), want);
}

TEST(TileReduce, MatchesLongDivision) {
  std::mt19937_64 rng(5);
  for (const auto phi : {ModulusPoly::XnPlus1, ModulusPoly::XnMinus1}) {
    for (const unsigned k : {5, 16, 40, 64}) {
      const auto r = ring(32, k, phi);
      const LimbReducer red(barrett_precompute(r.q, r.k));
      for (int t = 0; t < 20; ++t) {
        const auto a = random_polynomial(r, rng), b = random_polynomial(r, rng);
        EventCounters c;
        const auto got = tile_reduce(poly_mul_conv1d(a, b), r, red, &c);
        ASSERT_EQ(got, oracle_pmm(a, b));
        ASSERT_EQ(c.reduction_ops, 32u * LimbReducer::limbs_for_ring(32, k));
      }
    }
  }
}

TEST(PmmFabric, UnitOperandReturnsResident) {
  std::mt19937_64 rng(6);
  const auto r = ring(64, 12);
  const auto a = random_polynomial(r, rng);
  for (const auto mode : {MappingMode::BitMapping, MappingMode::Conventional}) {
    EXPECT_EQ(PmmFabric(a, config(r, mode)).simulate(Polynomial::one(r)).result, a);
    EXPECT_EQ(PmmFabric(Polynomial::one(r), config(r, mode)).simulate(a).result, a);
  }
}

TEST(PmmFabric, ExactAgainstOracle) {
  std::mt19937_64 rng(7);
  for (const auto phi : {ModulusPoly::XnPlus1, ModulusPoly::XnMinus1}) {
    for (const std::size_t n : {4, 16, 128, 256}) {
      for (const unsigned k : {4, 8, 16, 32}) {
        const auto r = ring(n, k, phi);
        for (const auto mode : {MappingMode::BitMapping, MappingMode::Conventional}) {
          for (int t = 0; t < 3; ++t) {
            const auto a = random_polynomial(r, rng), b = random_polynomial(r, rng);
            const auto res = PmmFabric(a, config(r, mode)).simulate(b);
            ASSERT_EQ(res.result, oracle_pmm(a, b)) << n << " " << k << " " << to_string(mode);
            ASSERT_FALSE(res.noisy);
            ASSERT_FALSE(res.error_stats);
          }
        }
      }
    }
  }
}

TEST(PmmFabric, MaximalCoefficients) {
  for (const unsigned k : {16, 64}) {
    const auto r = ring(256, k);
    const Polynomial a(r, std::vector<u64>(256, r.q - 1));
    EXPECT_EQ(PmmFabric(a, config(r)).simulate(a).result, oracle_pmm(a, a));
  }
}

TEST(PmmFabric, RingMismatchAndBadPlan) {
  std::mt19937_64 rng(8);
  const auto r = ring(16, 8);
  const auto a = random_polynomial(r, rng);
  const PmmFabric f(a, config(r));
  EXPECT_THROW(f.simulate(random_polynomial(ring(16, 9), rng)), ConfigError);
  EXPECT_THROW(PmmFabric(random_polynomial(ring(32, 8), rng), config(r)), ConfigError);
  const auto conv_plan = plan_conventional(a, CrossbarConfig{});
  EXPECT_THROW(PmmFabric(a, config(r), conv_plan), ConfigError);
  EXPECT_NO_THROW(PmmFabric(a, config(r, MappingMode::Conventional), conv_plan));
}

TEST(PmmFabric, ModesAndBudgetsAgree) {
  std::mt19937_64 rng(9);
  const auto r = ring(256, 16);
  const auto a = random_polynomial(r, rng), b = random_polynomial(r, rng);
  const auto base = PmmFabric(a, config(r)).simulate(b).result;
  EXPECT_EQ(PmmFabric(a, config(r, MappingMode::Conventional)).simulate(b).result, base);
  std::uint64_t prev_busy = 0;
  for (const std::size_t budget : {64, 32, 16, 8, 1}) {
    const PmmFabric f(a, config(r, MappingMode::BitMapping, budget));
    EXPECT_EQ(f.simulate(b).result, base) << budget;
    const auto busy = f.stage_cycles().busy[0];
    EXPECT_GE(busy, prev_busy);
    prev_busy = busy;
  }
}

TEST(PmmFabric, Deterministic) {
  std::mt19937_64 rng(10);
  const auto r = ring(64, 16);
  const auto a = random_polynomial(r, rng), b = random_polynomial(r, rng);
  FabricConfig fc = config(r);
  fc.xbar.noise_sigma = 0.5;
  const PmmFabric f(a, fc);
  const auto x = f.simulate(b, 3), y = f.simulate(b, 3);
  EXPECT_EQ(x.result, y.result);
  EXPECT_EQ(x.trace.counters, y.trace.counters);
  ASSERT_TRUE(x.error_stats);
  EXPECT_EQ(x.error_stats->abs_error, y.error_stats->abs_error);
  EXPECT_EQ(f.simulate(b).result, oracle_pmm(a, b));  // no seed, no noise
}

TEST(PmmFabric, ErrorStatsOnlyWhenNoisy) {
  std::mt19937_64 rng(11);
  const auto r = ring(16, 8);
  const auto a = random_polynomial(r, rng), b = random_polynomial(r, rng);
  EXPECT_FALSE(PmmFabric(a, config(r)).simulate(b, 5).error_stats);
  FabricConfig fc = config(r);
  fc.xbar.noise_sigma = 2.0;
  const auto res = PmmFabric(a, fc).simulate(b, 5);
  ASSERT_TRUE(res.error_stats);
  EXPECT_EQ(res.error_stats->abs_error.size(), 16u);
  EXPECT_LE(res.error_stats->max_abs_error, r.q / 2);
  const auto direct = compare_to_oracle(res.result, oracle_pmm(a, b));
  EXPECT_EQ(direct.abs_error, res.error_stats->abs_error);
}

TEST(CompareToOracle, CenteredError) {
  const auto r = RingParams::make(4, 17);
  const auto s = compare_to_oracle(Polynomial(r, {1, 16, 5, 0}), Polynomial(r, {16, 1, 5, 8}));
  EXPECT_EQ(s.abs_error, (std::vector<u64>{2, 2, 0, 8}));
  EXPECT_DOUBLE_EQ(s.mean_abs_error, 3.0);
  EXPECT_EQ(s.max_abs_error, 8u);
  EXPECT_DOUBLE_EQ(s.error_rate, 0.75);
}

TEST(Counters, PredictedEqualSimulated) {
  std::mt19937_64 rng(12);
  for (const std::size_t n : {4, 64, 256}) {
    for (const unsigned k : {4, 16}) {
      const auto r = ring(n, k);
      for (const auto mode : {MappingMode::BitMapping, MappingMode::Conventional}) {
        const PmmFabric f(random_polynomial(r, rng), config(r, mode));
        const auto res = f.simulate(random_polynomial(r, rng));
        EXPECT_EQ(res.trace.counters, f.predicted_counters()) << n << " " << k << " " << to_string(mode);
        EXPECT_EQ(res.trace.counters.adc_conversions, f.plan().logical_count() * 128u * k);
      }
    }
  }
}

TEST(Pipeline, DefaultInitiationInterval) {
  std::mt19937_64 rng(13);
  const auto r = ring(256, 16);
  const auto a = random_polynomial(r, rng);
  EXPECT_EQ(PmmFabric(a, config(r)).stage_cycles().initiation_interval(), 128u);
  EXPECT_EQ(PmmFabric(a, config(r, MappingMode::Conventional)).stage_cycles().initiation_interval(), 144u);
}

TEST(Pipeline, ScheduleRecurrence) {
  StageCycles s;
  s.busy = {10, 3, 4};
  s.latency = {12, 3, 4};
  const EventCounters per{1, 2, 3, 4, 5, 6};
  EXPECT_THROW(schedule_pipeline(s, per, 0), ConfigError);

  const auto one = schedule_pipeline(s, per, 1);
  EXPECT_EQ(one.total_cycles, s.fill_latency());
  EXPECT_EQ(one.total_cycles, 19u);

  const auto many = schedule_pipeline(s, per, 1000);
  EXPECT_EQ(many.initiation_interval, 10u);
  EXPECT_EQ(many.total_cycles, 19u + 999u * 10u);
  EXPECT_NEAR(static_cast<double>(many.total_cycles) / 1000.0, 10.0, 0.1);
  EXPECT_EQ(many.counters, per.scaled(1000));
  for (std::size_t i = 1; i < 1000; ++i) {
    for (std::size_t st = 0; st < kStageCount; ++st) {
      const auto& cur = many.intervals[i * kStageCount + st];
      ASSERT_GE(cur.start, many.intervals[(i - 1) * kStageCount + st].busy_end);
      if (st > 0) ASSERT_GE(cur.start, many.intervals[i * kStageCount + st - 1].done);
    }
  }
}

TEST(Pipeline, BalancedStagesStreamAtBusyRate) {
  StageCycles s;
  s.busy = {7, 7, 7};
  s.latency = {7, 7, 7};
  const auto t = schedule_pipeline(s, {}, 50);
  EXPECT_EQ(t.total_cycles, 21u + 49u * 7u);
}

TEST(Pipeline, ExportTraceFormat) {
  StageCycles s;
  s.busy = {2, 1, 1};
  s.latency = {3, 1, 1};
  const std::string text = export_trace(schedule_pipeline(s, {}, 2));
  EXPECT_EQ(text.rfind("# pipeline trace v1\n", 0), 0u);
  EXPECT_NE(text.find("event pmm=0 stage=pe_compute start=0 busy_end=2 done=3\n"), std::string::npos);
  EXPECT_NE(text.find("event pmm=1 stage=pe_compute start=2 busy_end=4 done=5\n"), std::string::npos);
  EXPECT_NE(text.find("summary pmms=2 total_cycles=7 initiation_interval=2 fill_latency=5"), std::string::npos);
}

TEST(NttOnCrossbar, ExactWithoutNoise) {
  std::mt19937_64 rng(14);
  for (const auto phi : {ModulusPoly::XnPlus1, ModulusPoly::XnMinus1}) {
    for (const std::size_t n : {4, 8, 16}) {
      for (const u64 q : {smallest_ntt_prime(n, phi), u64{7681}, u64{12289}}) {
        const auto ctx = NttContext::make(n, q, phi);
        const NttXbarPipeline pipe(ctx, CrossbarConfig{});
        for (int t = 0; t < 20; ++t) {
          const auto a = random_polynomial(ctx.params, rng), b = random_polynomial(ctx.params, rng);
          const auto res = pipe.simulate(a, b);
          ASSERT_EQ(res.result, oracle_pmm(a, b)) << n << " " << q;
          ASSERT_FALSE(res.error_stats);
        }
        const auto z = Polynomial::zero(ctx.params);
        EXPECT_EQ(pipe.simulate(z, random_polynomial(ctx.params, rng)).result, z);
      }
    }
  }
}

TEST(NttOnCrossbar, TwiddleMatricesAreInverse) {
  const auto ctx = NttContext::make(16, 97);
  const WeightMatrix f = NttXbarPipeline::forward_matrix(ctx);
  const WeightMatrix g = NttXbarPipeline::inverse_matrix(ctx);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      oracle::Big s = 0;
      for (int l = 0; l < 16; ++l) s += oracle::Big(f(i, l)) * g(l, j);
      ASSERT_EQ(oracle::mod(s, 97), i == j ? 1u : 0u);
    }
  }
}

TEST(NttOnCrossbar, RejectsLargeDegree) {
  const auto ctx = NttContext::make(2048, smallest_ntt_prime(2048));
  EXPECT_THROW(NttXbarPipeline(ctx, CrossbarConfig{}), UnsupportedParameters);
}
