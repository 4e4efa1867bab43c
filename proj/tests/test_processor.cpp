#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "hybridfft/io.hpp"
#include "hybridfft/oracle.hpp"
#include "hybridfft/processor.hpp"

using namespace hfft;

namespace {

/// Every 2 x 2^(k-1) window of the planned unit-input stream must hold one
/// butterfly block exactly, and the set of leading indices must match the
/// enumeration.
void check_stage_windows(const StagePlan& pl) {
  const std::uint64_t N = pl.config.n_samples;
  const int serial = pl.layout.serial();
  for (const StageStep& st : pl.steps) {
    const std::uint64_t cols = std::uint64_t{1} << (st.radix_log2 - 1);
    const std::uint64_t slots = (N >> pl.layout.parallel) / cols;
    std::vector<std::uint64_t> leads;
    for (int unit = 0; unit < pl.config.parallelism; ++unit) {
      for (std::uint64_t slot = 0; slot < slots; ++slot) {
        const std::uint64_t m =
            st.layout_in.apply((std::uint64_t(2 * unit) << serial) | (slot * cols));
        const std::vector<std::uint64_t> want =
            build_block(N, st.stage, pl.radices, m);
        for (int r = 0; r < 2; ++r) {
          for (std::uint64_t c = 0; c < cols; ++c) {
            const std::uint64_t pos =
                (std::uint64_t(2 * unit + r) << serial) | (slot * cols + c);
            REQUIRE(st.layout_in.apply(pos) == want[cols * std::uint64_t(r) + c]);
          }
        }
        leads.push_back(m);
      }
    }
    std::vector<std::uint64_t> expect = block_leading_indices(N, st.stage, pl.radices);
    std::sort(leads.begin(), leads.end());
    std::sort(expect.begin(), expect.end());
    REQUIRE(leads == expect);
  }
}

}  // namespace

TEST_CASE("stage radices") {
  CHECK(stage_radices(4096, 5) == std::vector<int>{2, 5, 5});
  CHECK(stage_radices(32, 5) == std::vector<int>{5});
  CHECK(stage_radices(std::uint64_t{1} << 19, 5) == std::vector<int>{4, 5, 5, 5});
  CHECK(stage_radices(2, 5) == std::vector<int>{1});
  for (int n = 1; n <= 19; ++n) {
    int sum = 0;
    for (int ks : stage_radices(std::uint64_t{1} << n, 5)) sum += ks;
    CHECK(sum == n);
  }
}

TEST_CASE("stage strides") {
  const std::vector<int> radices{2, 5, 5};
  CHECK(stage_stride(4096, 0, radices) == 4096);
  CHECK(stage_stride(4096, 1, radices) == 1024);
  CHECK(stage_stride(4096, 2, radices) == 32);
  CHECK(stage_stride(4096, 3, radices) == 1);
}

TEST_CASE("block leading indices") {
  const std::vector<int> radices{2, 5, 5};
  SUBCASE("first stage runs over [0, 1024)") {
    const auto m = block_leading_indices(4096, 1, radices);
    REQUIRE(m.size() == 1024);
    for (std::uint64_t i = 0; i < m.size(); ++i) CHECK(m[i] == i);
  }
  SUBCASE("second stage merges four intervals") {
    const auto m = block_leading_indices(4096, 2, radices);
    REQUIRE(m.size() == 128);
    for (std::uint64_t v = 0; v < 4; ++v) {
      for (std::uint64_t o = 0; o < 32; ++o) CHECK(m[32 * v + o] == 1024 * v + o);
    }
  }
  SUBCASE("last stage strides by the block size") {
    const auto m = block_leading_indices(4096, 3, radices);
    REQUIRE(m.size() == 128);
    for (std::uint64_t i = 0; i < m.size(); ++i) CHECK(m[i] == 32 * i);
  }
  SUBCASE("every stage covers all samples exactly once") {
    for (int stage = 1; stage <= 3; ++stage) {
      std::vector<bool> seen(4096, false);
      for (std::uint64_t m : block_leading_indices(4096, stage, radices)) {
        for (std::uint64_t idx : build_block(4096, stage, radices, m)) {
          CHECK(!seen[idx]);
          seen[idx] = true;
        }
      }
      CHECK(std::count(seen.begin(), seen.end(), true) == 4096);
    }
  }
}

TEST_CASE("block construction matches the worked 4096-point layouts") {
  const std::vector<int> radices{2, 5, 5};
  SUBCASE("first-stage input block") {
    CHECK(build_block(4096, 1, radices, 0) ==
          std::vector<std::uint64_t>{0, 1024, 2048, 3072});
  }
  SUBCASE("second-stage input block") {
    const auto block = build_block(4096, 2, radices, 0);
    REQUIRE(block.size() == 32);
    for (std::uint64_t c = 0; c < 16; ++c) {
      CHECK(block[c] == 32 * c);         // row 0: 0, 32, ..., 480
      CHECK(block[16 + c] == 512 + 32 * c);  // row 1: 512, ..., 992
    }
  }
  SUBCASE("first-stage output interleave") {
    // Leaves as [[x(2048), x(0)], [x(3072), x(1024)]]: stream order per row
    // is x(0), x(2048) on the upper lane and x(1024), x(3072) on the lower.
    CHECK(block_output_indices(4096, 1, radices, 0) ==
          std::vector<std::uint64_t>{0, 2048, 1024, 3072});
  }
  SUBCASE("last-stage block is 32 consecutive indices") {
    const auto block = build_block(4096, 3, radices, 96);
    for (std::uint64_t j = 0; j < 32; ++j) CHECK(block[j] == 96 + j);
  }
  SUBCASE("an out-of-range leading index is rejected") {
    CHECK_THROWS_AS(build_block(4096, 3, radices, 4090), ConfigError);
  }
}

TEST_CASE("plans place one butterfly block in every unit window") {
  for (int n = 1; n <= 12; ++n) {
    for (int P : {1, 2, 4}) {
      for (Mode mode : {Mode::Pipeline, Mode::Memory}) {
        PlanConfig cfg{std::uint64_t{1} << n, 5, P, mode, true};
        try {
          const StagePlan pl = plan(cfg);
          check_stage_windows(pl);
        } catch (const ConfigError&) {
          // unsupported combination
        }
      }
    }
  }
}

TEST_CASE("the 4096-point single-lane plan needs no first-stage exchanges") {
  PlanConfig cfg{4096, 5, 1, Mode::Pipeline, false};
  const StagePlan pl = plan(cfg);
  CHECK(pl.stages == 3);
  CHECK(pl.radices == std::vector<int>{2, 5, 5});
  CHECK(pl.steps[0].reshuffle.empty());
  CHECK(pl.steps[0].w == 11);
  CHECK(pl.steps[1].w == 6);
  CHECK(pl.steps[2].w == 11);
  CHECK_FALSE(pl.reshuffle_over_budget);
}

TEST_CASE("first-stage reshuffle tables") {
  SUBCASE("single lane") {
    const auto rows = stage1_reshuffle_table(5, 1);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<SwapStep>{{1, 8}, {1, 1}, {1, 8}, {1, 4}, {1, 2}, {1, 4}});
    CHECK(rows[1].empty());
    CHECK(rows[2].empty());
    CHECK(rows[3] == std::vector<SwapStep>{{1, 2}, {1, 1}, {1, 2}});
    CHECK(rows[4] == std::vector<SwapStep>{{1, 4}, {1, 1}, {1, 4}});
  }
  SUBCASE("four lanes") {
    const auto rows = stage1_reshuffle_table(5, 4);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<SwapStep>{{4, 4}, {2, 8}, {1, 2}, {1, 1}, {1, 2}});
    CHECK(rows[1].empty());
    CHECK(rows[2] == std::vector<SwapStep>{{2, 1}});
    CHECK(rows[3] == std::vector<SwapStep>{{4, 1}, {2, 2}});
    CHECK(rows[4] == std::vector<SwapStep>{{4, 2}, {2, 4}});
  }
  SUBCASE("rows do not depend on the representative size") {
    for (int P : {1, 4}) {
      const int lp = P == 4 ? 2 : 0;
      for (int residue = 0; residue < 5; ++residue) {
        int n = residue;
        while (n <= 5 || n < 5 + lp || n % 5 != residue) ++n;
        PlanConfig small{std::uint64_t{1} << n, 5, P, Mode::Pipeline, false};
        PlanConfig big{std::uint64_t{1} << (n + 5), 5, P, Mode::Pipeline, false};
        CHECK(plan(small).steps[0].reshuffle == plan(big).steps[0].reshuffle);
      }
    }
  }
}

TEST_CASE("runs reproduce known spectra") {
  SUBCASE("impulse gives a flat spectrum") {
    for (std::uint64_t N : {2ull, 64ull, 1024ull}) {
      std::vector<ComplexSample> x(N, {0, 0});
      x[0] = {1, 0};
      PlanConfig cfg{N, 5, 1, Mode::Pipeline, false};
      const RunResult r = run(cfg, x);
      for (const ComplexSample& v : r.unscrambled) CHECK(std::abs(v - ComplexSample{1, 0}) < 1e-12);
    }
  }
  SUBCASE("constant input concentrates at frequency zero") {
    std::vector<ComplexSample> x(64, {1, 0});
    PlanConfig cfg{64, 5, 2, Mode::Pipeline, false};
    const RunResult r = run(cfg, x);
    CHECK(std::abs(r.unscrambled[0] - ComplexSample{64, 0}) < 1e-12);
    for (std::size_t i = 1; i < 64; ++i) CHECK(std::abs(r.unscrambled[i]) < 1e-12);
  }
  SUBCASE("random 4096-point input matches the direct DFT in both modes") {
    const auto x = random_samples(4096, 7);
    const auto ref = dft_direct(x);
    for (Mode mode : {Mode::Pipeline, Mode::Memory}) {
      PlanConfig cfg{4096, 5, mode == Mode::Memory ? 4 : 1, mode, false};
      const RunResult r = run(cfg, x);
      double err = 0.0;
      for (std::size_t i = 0; i < 4096; ++i) err = std::max(err, std::abs(r.unscrambled[i] - ref[i]));
      CHECK(err < 1e-9);
      CHECK(r.report.conflicts == 0);
    }
  }
}

TEST_CASE("Parseval holds for simulated spectra") {
  const auto x = random_samples(2048, 3);
  PlanConfig cfg{2048, 5, 2, Mode::Pipeline, false};
  const RunResult r = run(cfg, x);
  double in = 0.0, out = 0.0;
  for (const ComplexSample& v : x) in += std::norm(v);
  for (const ComplexSample& v : r.unscrambled) out += std::norm(v);
  CHECK(std::abs(out - 2048.0 * in) <= 1e-9 * out);
}

TEST_CASE("in-place runs reuse exactly the addresses they read") {
  PlanConfig cfg{4096, 5, 4, Mode::Memory, false};
  const RunResult r = run(cfg, random_samples(4096, 11));
  CHECK(r.report.conflicts == 0);
  std::map<int, std::multiset<std::pair<int, std::uint64_t>>> reads, writes;
  for (const AccessEvent& ev : r.trace) {
    if (ev.batch == 0) continue;  // initial load
    auto& side = ev.op == 'R' ? reads : writes;
    side[ev.batch].insert({ev.bank, ev.address});
  }
  REQUIRE(reads.size() == 3);
  for (const auto& [stage, addresses] : reads) {
    CHECK(addresses == writes[stage]);
  }
}

TEST_CASE("in-place schedules hand each stage the previous read addresses") {
  PlanConfig cfg{4096, 5, 4, Mode::Memory, false};
  const StagePlan pl = plan(cfg);
  REQUIRE(pl.steps.size() == 3);
  CHECK(pl.steps[0].schedule.write_perm.is_identity());
  for (std::size_t s = 1; s < pl.steps.size(); ++s) {
    CHECK(pl.steps[s].schedule.write_perm == pl.steps[s - 1].schedule.read_perm);
  }
  for (std::size_t s = 0; s < pl.steps.size(); ++s) {
    CHECK(pl.steps[s].schedule.read_perm ==
          inplace_serial_reversal(4096, static_cast<int>(s) + 1, 5, 4));
  }
}

TEST_CASE("worked in-place example stays within the exchange budget") {
  PlanConfig cfg{4096, 5, 4, Mode::Memory, false};
  const StagePlan pl = plan(cfg);
  CHECK(pl.steps[0].w == 9);
  CHECK(pl.steps[0].w_tilde == 0);
  CHECK(pl.steps[1].w == 9);
  CHECK(pl.steps[1].w_tilde == 4);
  CHECK(pl.steps[2].w == 4);
  CHECK(pl.steps[2].w_tilde == 0);
  for (const StageStep& st : pl.steps) CHECK(st.reshuffle.size() <= 6);
  CHECK_FALSE(pl.reshuffle_over_budget);
}

TEST_CASE("observed cycles equal the model plus the per-stage fill") {
  for (auto [N, P, mode] : {std::tuple<std::uint64_t, int, Mode>{4096, 1, Mode::Pipeline},
                            {4096, 4, Mode::Memory},
                            {256, 2, Mode::Pipeline}}) {
    PlanConfig cfg{N, 5, P, mode, false};
    const StagePlan pl = plan(cfg);
    const RunResult r = run(cfg, random_samples(N, 1));
    std::uint64_t fill = 0, fill_max = 0;
    for (const StageStep& st : pl.steps) {
      fill += st.fill_latency;
      fill_max = std::max(fill_max, st.fill_latency);
    }
    CHECK(r.report.cycles_observed == pl.cycles_model + fill);
    CHECK(r.report.cycles_observed - r.report.cycles_model <=
          fill_max * static_cast<std::uint64_t>(pl.stages));
  }
}

TEST_CASE("metrics closed forms") {
  PlanConfig cfg{4096, 5, 4, Mode::Memory, false};
  const Metrics m = metrics(cfg);
  CHECK(m.iterations == 3);
  CHECK(m.sample_lanes == 4);
  CHECK(m.cycles_model == 3 * 4096 / 4);

  SUBCASE("iterations across the supported range") {
    for (int n = 5; n <= 19; ++n) {
      PlanConfig c{std::uint64_t{1} << n, 5, 1, Mode::Pipeline, false};
      CHECK(metrics(c).iterations == (n + 4) / 5);
    }
  }
  SUBCASE("average utilization per parallelism band") {
    auto average = [](int P, int n_lo, int n_hi) {
      double sum = 0.0;
      for (int n = n_lo; n <= n_hi; ++n) {
        PlanConfig c{std::uint64_t{1} << n, 5, P, Mode::Pipeline, false};
        sum += metrics(c).utilization;
      }
      return sum / (n_hi - n_lo + 1);
    };
    CHECK(average(1, 11, 19) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(average(2, 6, 10) == doctest::Approx(0.80).epsilon(1e-12));
    CHECK(average(4, 1, 5) == doctest::Approx(0.60).epsilon(1e-12));
  }
}

TEST_CASE("analytic output order agrees with the probe recovery") {
  for (auto [N, P, mode] : {std::tuple<std::uint64_t, int, Mode>{256, 1, Mode::Pipeline},
                            {1024, 2, Mode::Pipeline},
                            {2048, 4, Mode::Memory}}) {
    PlanConfig cfg{N, 5, P, mode, false};
    const auto probe = probe_samples(N);
    const RunResult r = run(cfg, probe);
    const auto recovered = recover_output_order(r.raw_output, dft_direct(probe));
    REQUIRE(recovered.has_value());
    CHECK(recovered->map() == r.report.output_permutation);
  }
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(plan({48, 5, 1, Mode::Pipeline, false}), ConfigError);
  CHECK_THROWS_AS(plan({std::uint64_t{1} << 20, 5, 1, Mode::Pipeline, false}), ConfigError);
  CHECK_THROWS_AS(plan({32, 5, 2, Mode::Pipeline, false}), ConfigError);   // single stage needs P=1
  CHECK_THROWS_AS(plan({64, 5, 4, Mode::Pipeline, false}), ConfigError);   // n < k + log2 P
  CHECK_THROWS_AS(plan({32, 5, 1, Mode::Memory, false}), ConfigError);     // below in-place range
  CHECK_THROWS_AS(plan({65536, 5, 4, Mode::Memory, false}), ConfigError);  // above in-place range
  CHECK_THROWS_AS(plan({1024, 5, 4, Mode::Memory, false}), ConfigError);   // short range is gated
  CHECK_NOTHROW(plan({1024, 5, 4, Mode::Memory, true}));
  CHECK_THROWS_AS(run({64, 5, 1, Mode::Pipeline, false}, std::vector<ComplexSample>(63)),
                  ConfigError);
}

TEST_CASE("mixed radix configurations also match the oracle") {
  for (int k = 2; k <= 4; ++k) {
    const std::uint64_t N = 1024;
    const auto x = random_samples(N, 40 + static_cast<std::uint64_t>(k));
    const auto ref = dft_direct(x);
    PlanConfig cfg{N, k, 2, Mode::Pipeline, false};
    const RunResult r = run(cfg, x);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) err = std::max(err, std::abs(r.unscrambled[i] - ref[i]));
    CHECK(err < 1e-9);
  }
}
