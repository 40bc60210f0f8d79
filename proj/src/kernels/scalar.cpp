#include "mdp/fastmath.hpp"
#include "mdp/kernels.hpp"

namespace mdp::kernels {

ArLanes::ArLanes(const ArParams& params, std::int64_t first_step)
    : step(first_step), ring(static_cast<std::size_t>(params.m) * kLanes, 0.0) {}

namespace {

void normal_fill_scalar(const Philox4x32::Key& key, const std::uint64_t* streams,
                        std::uint64_t first_block, std::size_t blocks, double* out) {
  for (int lane = 0; lane < kLanes; ++lane) {
    const StreamId id{0, streams[lane]};
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto w = Philox4x32::apply(id.counter(first_block + b), key);
      double z[4];
      fastmath::box_muller(uniform_open01(w[0]), uniform_open01(w[1]), z[0], z[1]);
      fastmath::box_muller(uniform_open01(w[2]), uniform_open01(w[3]), z[2], z[3]);
      for (int i = 0; i < 4; ++i) out[(4 * b + i) * kLanes + lane] = z[i];
    }
  }
}

void ar_sweep_scalar(const ArParams& p, ArLanes& s, const double* noise, std::size_t count) {
  const int lags = p.max_lag;
  const auto m = static_cast<std::int64_t>(p.m);
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t j = s.step;
    const std::int64_t next = s.ring_pos + 1 == m ? 0 : s.ring_pos + 1;
    const auto read_slot = static_cast<std::size_t>(next);
    const auto write_slot = static_cast<std::size_t>(s.ring_pos);
    for (int lane = 0; lane < kLanes; ++lane) {
      const double e = noise[i * kLanes + lane];
      const double x = p.theta * s.hist_x[0][lane] + e;
      const double d = p.theta * s.hist_d[0][lane] + p.theta_pow_m1 * s.ring[read_slot * kLanes + lane];
      s.ring[write_slot * kLanes + lane] = e;
      if (j >= 1) {
        const double prev = s.hist_x[0][lane];
        s.ls_num[lane] = s.ls_num[lane] + x * prev;
        s.ls_den[lane] = s.ls_den[lane] + prev * prev;
        for (int l = 0; l <= lags; ++l) {
          if (j < l + 1) break;
          const double partner = l == 0 ? x : s.hist_x[l - 1][lane];
          s.cov[l][lane] = s.cov[l][lane] + x * partner;
          const double g = l == 0 ? e * s.hist_d[0][lane] + e * s.hist_d[0][lane]
                                  : s.hist_xi[l - 1][lane] * s.hist_d[0][lane] + e * s.hist_d[l][lane];
          s.gap[l][lane] = s.gap[l][lane] - p.theta * g;
        }
      }
      if (j >= 0 && j <= lags) s.head[j][lane] = x;
      for (int h = lags; h >= 1; --h) {
        s.hist_x[h][lane] = s.hist_x[h - 1][lane];
        s.hist_d[h][lane] = s.hist_d[h - 1][lane];
        s.hist_xi[h][lane] = s.hist_xi[h - 1][lane];
      }
      s.hist_x[0][lane] = x;
      s.hist_d[0][lane] = d;
      s.hist_xi[0][lane] = e;
    }
    ++s.step;
    s.ring_pos = next;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", &normal_fill_scalar, &ar_sweep_scalar};
  return table;
}

}  // namespace mdp::kernels
