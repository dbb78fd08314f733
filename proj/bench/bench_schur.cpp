// Serial reference vs OpenMP Schur-complement assembly on random
// block-diagonal data shaped like the cb-norm and gamma programs.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <tuple>

#include "ncb/sdp_schur.hpp"

namespace {

struct Instance {
  std::vector<ncb::sdp::ConstraintMatrix> a;
  std::vector<ncb::RMat> x, z_inv;
};

Instance make_instance(int dim, int m) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(0, dim - 1);
  std::normal_distribution<double> g(0.0, 1.0);
  Instance in;
  ncb::RMat r = ncb::RMat::Random(dim, dim);
  in.x.push_back(r * r.transpose() + ncb::RMat::Identity(dim, dim));
  ncb::RMat q = ncb::RMat::Random(dim, dim);
  in.z_inv.push_back(q * q.transpose() + ncb::RMat::Identity(dim, dim));
  in.a.resize(m);
  for (auto& cm : in.a) {
    std::map<std::pair<int, int>, double> ent;
    for (int k = 0; k < 4; ++k) {
      const int p = pick(rng), c = pick(rng);
      const double v = g(rng);
      ent[{p, c}] += v;
      if (p != c) ent[{c, p}] += v;
    }
    for (const auto& [key, v] : ent) cm.entries.push_back({0, key.first, key.second, v});
  }
  return in;
}

void BM_SchurSerial(benchmark::State& st) {
  const Instance in = make_instance(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ncb::sdp::assemble_schur_serial(in.a, in.x, in.z_inv));
}

void BM_SchurOmp(benchmark::State& st) {
  const Instance in = make_instance(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ncb::sdp::assemble_schur_omp(in.a, in.x, in.z_inv));
}

}  // namespace

BENCHMARK(BM_SchurSerial)->Args({16, 64})->Args({36, 200})->Args({72, 600})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurOmp)->Args({16, 64})->Args({36, 200})->Args({72, 600})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
