#pragma once

// Data-parallel inner loops of the Monte Carlo engine. Every kernel exists as
// a scalar reference and, where the CPU supports it, an AVX2 variant; both
// process kLanes independent replicates in lock-step and must agree bit for
// bit. The active table is chosen once at runtime.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mdp/rng.hpp"

namespace mdp::kernels {

inline constexpr int kLanes = 4;
inline constexpr int kMaxLag = 8;

/// Writes 4*blocks standard normals per lane, interleaved:
/// out[i * kLanes + lane] is draw (4*first_block + i) of stream `streams[lane]`.
using NormalFillFn = void (*)(const Philox4x32::Key& key, const std::uint64_t* streams,
                              std::uint64_t first_block, std::size_t blocks, double* out);

struct ArParams {
  double theta = 0.0;
  double theta_pow_m1 = 0.0;  ///< theta^(m-1), weight of the noise leaving the window
  int max_lag = 0;            ///< largest covariance lag accumulated (<= kMaxLag)
  int m = 2;                  ///< truncation width, >= 2
};

/// Lock-step state of kLanes AR(1) paths started at step j = -H from zero.
///
/// Before step j: hist_x[i] = X_{j-1-i}, hist_d[i] = D_{j-1-i} with
/// D = X - X^{(m)} the truncation residual, hist_xi[i] = xi_{j-1-i}.
/// Sums run over steps 1..n as the caller feeds them.
struct ArLanes {
  explicit ArLanes(const ArParams& params, std::int64_t first_step);

  std::int64_t step;          ///< index j of the next noise value
  std::int64_t ring_pos = 0;  ///< (j + H) mod m, slot receiving xi_j
  alignas(32) double hist_x[kMaxLag + 1][kLanes] = {};
  alignas(32) double hist_d[kMaxLag + 1][kLanes] = {};
  alignas(32) double hist_xi[kMaxLag + 1][kLanes] = {};
  alignas(32) double cov[kMaxLag + 1][kLanes] = {};   ///< sum_{k=1}^{n-l} X_{k+l} X_k
  alignas(32) double gap[kMaxLag + 1][kLanes] = {};   ///< sum_{k=1}^{n-l} (U^{(m)}_{k,l} - U_{k,l})
  alignas(32) double head[kMaxLag + 1][kLanes] = {};  ///< X_0 .. X_L
  alignas(32) double ls_num[kLanes] = {};             ///< sum_{k=1}^n X_k X_{k-1}
  alignas(32) double ls_den[kLanes] = {};             ///< sum_{k=1}^n X_{k-1}^2
  std::vector<double> ring;                           ///< last m noise values, m x kLanes
};

/// Advances all lanes over `count` steps; noise[i * kLanes + lane] = xi_{step+i}.
using ArSweepFn = void (*)(const ArParams& params, ArLanes& lanes, const double* noise,
                           std::size_t count);

struct KernelTable {
  const char* name;
  NormalFillFn normal_fill;
  ArSweepFn ar_sweep;
};

const KernelTable& scalar_table();

/// Null when the binary was built without AVX2 support.
const KernelTable* avx2_table();

/// AVX2 if the running CPU has it, else scalar. MDP_FORCE_SCALAR=1 forces scalar.
const KernelTable& active_table();

}  // namespace mdp::kernels
