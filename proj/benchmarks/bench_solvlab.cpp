// Microbenchmarks for the hot paths: exact digit arithmetic, the block
// boundary metric, word lengths (closed form vs breadth-first search), graph
// distance in the tree pair, spectral analysis, and envelope section tables.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "solvlab/boundary.hpp"
#include "solvlab/furman.hpp"
#include "solvlab/groups.hpp"
#include "solvlab/horoprod.hpp"
#include "solvlab/madic.hpp"
#include "solvlab/qimaps.hpp"
#include "solvlab/spectral.hpp"

namespace {

using namespace solvlab;

madic::MAdic random_exact_madic(int base, std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> val(-4, 2);
  std::uniform_int_distribution<int> len(0, 6);
  std::uniform_int_distribution<int> digit(0, base - 1);
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(len(rng)));
  for (auto& d : digits) d = static_cast<std::uint8_t>(digit(rng));
  return madic::MAdic(base, val(rng), std::move(digits), true);
}

void BM_MadicDist(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<madic::MAdic> xs, ys;
  for (int i = 0; i < 256; ++i) {
    xs.push_back(random_exact_madic(3, rng));
    ys.push_back(random_exact_madic(3, rng));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(madic::madic_dist(xs[i & 255], ys[i & 255]));
    ++i;
  }
}
BENCHMARK(BM_MadicDist);

void BM_SpectralAnalyze(benchmark::State& state) {
  auto M = spectral::parse_int_matrix("[[2,1],[1,1]]");
  for (auto _ : state) benchmark::DoNotOptimize(spectral::analyze(M));
}
BENCHMARK(BM_SpectralAnalyze);

void BM_BlockMetric(benchmark::State& state) {
  auto split = spectral::analyze(spectral::parse_int_matrix("[[2,0],[0,3]]"));
  const auto& block = split.Mbar1;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> real(-3.0, 3.0);
  std::vector<boundary::BlockVector> pts;
  for (int i = 0; i < 256; ++i) {
    Eigen::VectorXd v(split.n1);
    for (int c = 0; c < split.n1; ++c) v(c) = real(rng);
    pts.push_back(boundary::BlockVector::from_flat(block, v));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(boundary::dM_metric(pts[i & 255], pts[(i + 1) & 255], block));
    ++i;
  }
}
BENCHMARK(BM_BlockMetric);

void BM_LampLengthClosedForm(benchmark::State& state) {
  const groups::LampGroup G{2};
  auto g = groups::evaluate_word(G, "s t s t s^-3 t s");
  for (auto _ : state) benchmark::DoNotOptimize(groups::walk_adjust_length(G, g));
}
BENCHMARK(BM_LampLengthClosedForm);

void BM_LampLengthBfs(benchmark::State& state) {
  const groups::LampGroup G{2};
  auto g = groups::evaluate_word(G, "s t s t s^-3 t s");
  for (auto _ : state)
    benchmark::DoNotOptimize(groups::word_length(G, g, groups::LampGenerators::WalkAdjust, 12));
}
BENCHMARK(BM_LampLengthBfs);

void BM_AbcWordLengthBfs(benchmark::State& state) {
  IMat M(1, 1);
  M(0, 0) = 2;
  auto G = groups::AbcGroup::from_matrix(M);
  auto g = groups::evaluate_word(G, "a b a^-1 b a b^-1");
  for (auto _ : state) benchmark::DoNotOptimize(groups::word_length(G, g, 12));
}
BENCHMARK(BM_AbcWordLengthBfs);

void BM_TreePairDistance(benchmark::State& state) {
  const groups::LampGroup G{2};
  auto space = horoprod::ModelSpace::dl(2, 2);
  auto origin = groups::lamp_to_dl_point(G, groups::identity(G));
  auto far = groups::lamp_to_dl_point(G, groups::evaluate_word(G, "s t s t s^-3 t s"));
  for (auto _ : state) benchmark::DoNotOptimize(horoprod::dl_distance(space, origin, far));
}
BENCHMARK(BM_TreePairDistance);

void BM_EnvelopeSectionTable(benchmark::State& state) {
  auto env = furman::Envelope::lamp_mirror(groups::LampGroup{2});
  auto h = furman::env_identity(env);
  h.phi = 1;
  const int radius = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(furman::q_map(env, h, radius));
}
BENCHMARK(BM_EnvelopeSectionTable)->Arg(3)->Arg(5);

void BM_QiConstantFit(benchmark::State& state) {
  auto env = furman::Envelope::lamp_mirror(groups::LampGroup{2});
  auto h = furman::env_identity(env);
  h.phi = 1;
  auto map = furman::q_map(env, h, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qimaps::estimate_qi_constants(map));
}
BENCHMARK(BM_QiConstantFit)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
