#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "wdeloc/density_matrix.hpp"

namespace wdeloc {

using RngEngine = std::mt19937_64;

/// splitmix64 mix of (seed, stream index); used to key one engine per
/// sample so parallel generation is reproducible for any thread count.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);
RngEngine stream_rng(std::uint64_t seed, std::uint64_t index);

/// Haar-uniform state on the single-excitation sphere (normalized
/// complex-normal vector).
PureState random_pure(int n, RngEngine& rng);

/// Induced (Ginibre) measure: G G^dag / Tr with an n x rank complex-normal G.
DensityMatrix random_mixed(int n, int rank, RngEngine& rng);

/// Diagonal state with simplex-uniform populations.
DensityMatrix random_diagonal(int n, RngEngine& rng);

/// Convex mixture of up to max_components Haar-random pure states, each
/// supported on a uniformly chosen mode subset of size <= max_block, with
/// Dirichlet-uniform mixing weights.
DensityMatrix random_producible(int n, int max_block, int max_components,
                                RngEngine& rng);

enum class SampleKind { PureHaar, MixedGinibre, DiagonalSeparable, Producible };

struct SamplerConfig {
  int n = 3;
  SampleKind kind = SampleKind::MixedGinibre;
  int rank = 0;            // MixedGinibre; 0 means full rank
  int max_block = 1;       // Producible
  int max_components = 3;  // Producible
  std::uint64_t seed = 0;
  long count = 1;
};

struct ScatterPoint {
  double purity;
  double tau;
};

/// Streams (purity, tau_k) points through `sink` in sample-index order,
/// chunked so no more than a fixed number of states is alive at once.
/// Output is identical for any thread count.
void scatter_experiment(const SamplerConfig& cfg, int measure_k,
                        const std::function<void(const ScatterPoint*, long)>& sink,
                        int threads = 1);

}  // namespace wdeloc
