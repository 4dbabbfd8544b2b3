#include "wdeloc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

#include "wdeloc/measures.hpp"

namespace wdeloc {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 on the combined key.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngEngine stream_rng(std::uint64_t seed, std::uint64_t index) {
  return RngEngine(mix_seed(seed, index));
}

namespace {

Eigen::VectorXcd complex_normal(int n, RngEngine& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = {re, im};
  }
  return v;
}

std::vector<double> dirichlet_uniform(int count, RngEngine& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(count);
  double sum = 0.0;
  for (double& x : w) {
    x = expo(rng);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

std::vector<int> random_subset(int n, int size, RngEngine& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < size; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(size);
  return idx;
}

}  // namespace

PureState random_pure(int n, RngEngine& rng) {
  if (n < 1) {
    throw Error(ErrorKind::MalformedInput, "need n >= 1");
  }
  Eigen::VectorXcd v = complex_normal(n, rng);
  v /= v.norm();
  return PureState(std::move(v));
}

DensityMatrix random_mixed(int n, int rank, RngEngine& rng) {
  if (rank < 1 || rank > n) {
    throw Error(ErrorKind::RankOutOfRange, "need 1 <= rank <= n");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(n, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = {re, im};
    }
  }
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  // Round off the tiny anti-Hermitian part so construction sees an exactly
  // Hermitian matrix.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

DensityMatrix random_diagonal(int n, RngEngine& rng) {
  const std::vector<double> pops = dirichlet_uniform(n, rng);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) rho(i, i) = pops[i];
  return DensityMatrix(std::move(rho));
}

DensityMatrix random_producible(int n, int max_block, int max_components,
                                RngEngine& rng) {
  if (max_block < 1 || max_block >= n) {
    throw Error(ErrorKind::BlockTooLarge, "need 1 <= max_block < n");
  }
  if (max_components < 1) {
    throw Error(ErrorKind::MalformedInput, "need max_components >= 1");
  }
  std::uniform_int_distribution<int> comp_count(1, max_components);
  const int components = comp_count(rng);
  const std::vector<double> weights = dirichlet_uniform(components, rng);

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  for (int c = 0; c < components; ++c) {
    std::uniform_int_distribution<int> size_dist(1, max_block);
    const int size = size_dist(rng);
    const std::vector<int> modes = random_subset(n, size, rng);
    Eigen::VectorXcd amp = complex_normal(size, rng);
    amp /= amp.norm();
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < size; ++i) full(modes[i]) = amp(i);
    acc += weights[c] * (full * full.adjoint());
  }
  return DensityMatrix(std::move(acc));
}

namespace {

ScatterPoint sample_point(const SamplerConfig& cfg, int measure_k,
                          std::uint64_t index) {
  RngEngine rng = stream_rng(cfg.seed, index);
  switch (cfg.kind) {
    case SampleKind::PureHaar: {
      const DensityMatrix rho = from_pure(random_pure(cfg.n, rng));
      return {purity(rho), tau_of(rho, measure_k)};
    }
    case SampleKind::MixedGinibre: {
      const int rank = cfg.rank > 0 ? cfg.rank : cfg.n;
      const DensityMatrix rho = random_mixed(cfg.n, rank, rng);
      return {purity(rho), tau_of(rho, measure_k)};
    }
    case SampleKind::DiagonalSeparable: {
      const DensityMatrix rho = random_diagonal(cfg.n, rng);
      return {purity(rho), tau_of(rho, measure_k)};
    }
    case SampleKind::Producible: {
      const DensityMatrix rho =
          random_producible(cfg.n, cfg.max_block, cfg.max_components, rng);
      return {purity(rho), tau_of(rho, measure_k)};
    }
  }
  throw Error(ErrorKind::MalformedInput, "unknown sampler kind");
}

}  // namespace

void scatter_experiment(const SamplerConfig& cfg, int measure_k,
                        const std::function<void(const ScatterPoint*, long)>& sink,
                        int threads) {
  if (cfg.count < 1 || cfg.n < 1) {
    throw Error(ErrorKind::MalformedInput, "need count >= 1 and n >= 1");
  }
  if (measure_k < 2 || measure_k > cfg.n) {
    throw Error(ErrorKind::KOutOfRange, "need 2 <= k <= n");
  }
  const int workers = std::max(1, threads);
  constexpr long kChunk = 1 << 16;
  std::vector<ScatterPoint> buffer;

  for (long base = 0; base < cfg.count; base += kChunk) {
    const long chunk = std::min(kChunk, cfg.count - base);
    buffer.resize(static_cast<std::size_t>(chunk));
    auto fill = [&](long lo, long hi) {
      for (long i = lo; i < hi; ++i) {
        buffer[static_cast<std::size_t>(i)] =
            sample_point(cfg, measure_k, static_cast<std::uint64_t>(base + i));
      }
    };
    if (workers == 1 || chunk < 1024) {
      fill(0, chunk);
    } else {
      std::vector<std::thread> pool;
      const long slice = (chunk + workers - 1) / workers;
      for (int t = 0; t < workers; ++t) {
        const long lo = t * slice;
        const long hi = std::min(chunk, lo + slice);
        if (lo >= hi) break;
        pool.emplace_back(fill, lo, hi);
      }
      for (auto& th : pool) th.join();
    }
    sink(buffer.data(), chunk);
  }
}

}  // namespace wdeloc
