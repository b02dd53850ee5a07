#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rescyc/metrics.hpp"
#include "rescyc/sensitivity.hpp"

using namespace rescyc;

namespace {

std::vector<ResilienceCycle> sample_cycles() {
  return {
      {0, 2, 6, 0.9, 0.6, 0.9},    // leveled
      {6, 9, 12, 0.85, 0.5, 0.7},  // insufficient
      {12, 15, 22, 0.8, 0.72, 0.95}, // adaptive, shallow dip
      {22, 25, 30, 0.9, 0.2, 0.4}, // deep dip
  };
}

const ToleranceConfig kCfg{0.0001, 0.8, RestabDenominator::eq4};

} // namespace

TEST_CASE("default robustness-range grid has 20 rows") {
  const SweepResult r = sweep_rr(sample_cycles(), kCfg, 0.0001, 0.002, 0.0001);
  REQUIRE(r.grid.size() == 20);
  CHECK(r.grid.front() == Catch::Approx(0.0001));
  CHECK(r.grid.back() == Catch::Approx(0.002));
  CHECK(r.micro_start == 20);
  REQUIRE(r.scores.size() == 20);
  for (const auto& row : r.scores) CHECK(row.size() == 4);
}

TEST_CASE("single-point grid equals direct scoring") {
  const auto cycles = sample_cycles();
  const SweepResult r = sweep_rr(cycles, kCfg, 0.0001, 0.0001, 0.0001);
  REQUIRE(r.grid.size() == 1);
  PerformanceSeries unused{"s", std::vector<double>(31, 0.5), false};
  const ScoredBatch batch = score_all(cycles, unused, kCfg);
  REQUIRE(batch.scores.size() == 4);
  for (std::size_t c = 0; c < 4; ++c)
    CHECK(r.scores[0][c] == Catch::Approx(batch.scores[c].ri).margin(1e-15));
}

TEST_CASE("trajectories are affine in the robustness range") {
  const auto cycles = sample_cycles();
  const SweepResult r = sweep_rr(cycles, kCfg, 0.0001, 0.002, 0.0001);
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    const double r_e = restabilization(cycles[c], kCfg);
    const double slope_expected =
        2.0 * (1.0 - r_e) * rebuilding(cycles[c]).r_d * reconfiguration(cycles[c]);
    for (std::size_t g = 1; g < r.grid.size(); ++g) {
      const double slope =
          (r.scores[g][c] - r.scores[g - 1][c]) / (r.grid[g] - r.grid[g - 1]);
      CHECK(slope == Catch::Approx(slope_expected).margin(1e-9));
    }
  }
}

TEST_CASE("default elasticity grid is 101 main plus 11 micro rows") {
  const MicroRange micro{0.99, 1.0, 0.001};
  const SweepResult r = sweep_et(sample_cycles(), kCfg, 0.0, 1.0, 0.01, &micro);
  REQUIRE(r.grid.size() == 112);
  CHECK(r.micro_start == 101);
  CHECK(r.grid[0] == 0.0);
  CHECK(r.grid[100] == Catch::Approx(1.0));
  CHECK(r.grid[101] == Catch::Approx(0.99));
  CHECK(r.grid.back() == Catch::Approx(1.0));
  for (std::size_t g = 1; g < r.grid.size(); ++g) {
    if (g == r.micro_start) continue;
    CHECK(r.grid[g] > r.grid[g - 1]);
  }
}

TEST_CASE("full-height threshold extinguishes every score") {
  const MicroRange micro{0.99, 1.0, 0.001};
  const SweepResult r = sweep_et(sample_cycles(), kCfg, 0.0, 1.0, 0.01, &micro);
  for (double v : r.scores[100]) CHECK(v == 0.0);
  for (double v : r.scores.back()) CHECK(v == 0.0);
}

TEST_CASE("score is flat until the threshold reaches the dip") {
  // p_event / p_pre = 0.9: no phase transition while p_et <= 0.9
  const std::vector<ResilienceCycle> cycles = {{0, 2, 6, 0.8, 0.72, 0.8}};
  const SweepResult r = sweep_et(cycles, kCfg, 0.0, 1.0, 0.005);
  REQUIRE(r.grid.size() == 201);
  const double base = r.scores[0][0];
  CHECK(base > 0.0);
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    if (r.grid[g] < 0.9 - 1e-9)
      CHECK(r.scores[g][0] == Catch::Approx(base).margin(1e-15));
    else if (g > 0 && r.grid[g - 1] > 0.905)
      CHECK(r.scores[g][0] < r.scores[g - 1][0]);
  }
}

TEST_CASE("monotone responses along both sweeps") {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ResilienceCycle> cycles;
  for (int i = 0; i < 12; ++i) {
    const double p_pre = 0.3 + 0.7 * unit(rng);
    const double p_event = p_pre * (0.2 + 0.7 * unit(rng));
    const double p_post = p_event + (p_pre - p_event) * 1.4 * unit(rng);
    cycles.push_back({std::size_t(i * 10), std::size_t(i * 10 + 2 + i % 3),
                      std::size_t(i * 10 + 5 + i % 4), p_pre, p_event, p_post});
  }
  const SweepResult rr = sweep_rr(cycles, kCfg, 0.0, 0.01, 0.0005);
  for (std::size_t g = 1; g < rr.grid.size(); ++g)
    for (std::size_t c = 0; c < rr.scores[g].size(); ++c)
      CHECK(rr.scores[g][c] >= rr.scores[g - 1][c]);

  const SweepResult et = sweep_et(cycles, kCfg, 0.0, 1.0, 0.02);
  for (std::size_t g = 1; g < et.grid.size(); ++g)
    for (std::size_t c = 0; c < et.scores[g].size(); ++c)
      CHECK(et.scores[g][c] <= et.scores[g - 1][c]);
}

TEST_CASE("inexact ranges stop before the upper bound") {
  const SweepResult r = sweep_rr(sample_cycles(), kCfg, 0.0, 0.001, 0.0003);
  REQUIRE(r.grid.size() == 4); // 0, 0.0003, 0.0006, 0.0009
  CHECK(r.grid.back() == Catch::Approx(0.0009));
}

TEST_CASE("sweeps do not mutate their inputs") {
  const auto cycles = sample_cycles();
  const auto copy = cycles;
  const ToleranceConfig cfg = kCfg;
  (void)sweep_rr(cycles, cfg, 0.0001, 0.002, 0.0001);
  (void)sweep_et(cycles, cfg, 0.0, 1.0, 0.25);
  CHECK(cfg.p_rr == kCfg.p_rr);
  CHECK(cfg.p_et == kCfg.p_et);
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    CHECK(cycles[i].p_pre == copy[i].p_pre);
    CHECK(cycles[i].t_post == copy[i].t_post);
  }
}

TEST_CASE("degenerate cycles are excluded from the matrix") {
  std::vector<ResilienceCycle> cycles = sample_cycles();
  cycles.insert(cycles.begin() + 1, {3, 4, 5, 0.5, 0.5, 0.5});
  const SweepResult r = sweep_rr(cycles, kCfg, 0.0001, 0.002, 0.0001);
  REQUIRE(r.cycle_index.size() == 4);
  CHECK(r.cycle_index == std::vector<std::size_t>{0, 2, 3, 4});
  CHECK(r.t_event == std::vector<std::size_t>{2, 9, 15, 25});
}
