// AVX2 variants of the engine kernels. Each lane runs the exact operation
// sequence of the scalar reference in scalar.cpp.

#include <immintrin.h>

#include <algorithm>
#include <utility>

#include "mdp/fastmath.hpp"
#include "mdp/kernels.hpp"

namespace mdp::kernels {
namespace {

inline __m256d u32_to_double(__m256i w) {
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(w, magic)), _mm256_set1_pd(0x1p52));
}

inline __m256d uniform_open01(__m256i w) {
  return _mm256_mul_pd(_mm256_add_pd(u32_to_double(w), _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1p-32));
}

// The transcendental helpers work on kBatch independent vectors at once so
// that the long Horner dependency chains overlap.
inline constexpr int kBatch = 8;

inline void log_pd(const __m256d* x, __m256d* out) {
  __m256d e[kBatch], s[kBatch], s2[kBatch], poly[kBatch];
  for (int u = 0; u < kBatch; ++u) {
    const __m256i bits = _mm256_castpd_si256(x[u]);
    const __m256i biased = _mm256_srli_epi64(bits, 52);
    e[u] = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_set1_epi64x(0x4330000000000000ll))),
        _mm256_set1_pd(0x1p52));
    e[u] = _mm256_sub_pd(e[u], _mm256_set1_pd(1023.0));
    __m256d f = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                        _mm256_set1_epi64x(0x3FF0000000000000ll)));
    const __m256d big = _mm256_cmp_pd(f, _mm256_set1_pd(fastmath::kSqrt2), _CMP_GT_OQ);
    f = _mm256_blendv_pd(f, _mm256_mul_pd(f, _mm256_set1_pd(0.5)), big);
    e[u] = _mm256_blendv_pd(e[u], _mm256_add_pd(e[u], _mm256_set1_pd(1.0)), big);
    const __m256d one = _mm256_set1_pd(1.0);
    s[u] = _mm256_div_pd(_mm256_sub_pd(f, one), _mm256_add_pd(f, one));
    s2[u] = _mm256_mul_pd(s[u], s[u]);
    poly[u] = _mm256_set1_pd(fastmath::kLogCoeff[11]);
  }
  for (int k = 10; k >= 0; --k)
    for (int u = 0; u < kBatch; ++u)
      poly[u] = _mm256_add_pd(_mm256_mul_pd(poly[u], s2[u]), _mm256_set1_pd(fastmath::kLogCoeff[k]));
  for (int u = 0; u < kBatch; ++u) {
    const __m256d tail = _mm256_add_pd(_mm256_mul_pd(e[u], _mm256_set1_pd(fastmath::kLn2Lo)),
                                       _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s[u]), poly[u]));
    out[u] = _mm256_add_pd(_mm256_mul_pd(e[u], _mm256_set1_pd(fastmath::kLn2Hi)), tail);
  }
}

inline void sincos_2pi_pd(const __m256d* uin, __m256d* sin_out, __m256d* cos_out) {
  __m256d q[kBatch], y2[kBatch], y[kBatch], ps[kBatch], pc[kBatch];
  for (int u = 0; u < kBatch; ++u) {
    const __m256d v = _mm256_mul_pd(_mm256_set1_pd(4.0), uin[u]);
    q[u] = _mm256_round_pd(_mm256_add_pd(v, _mm256_set1_pd(0.5)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
    y[u] = _mm256_mul_pd(_mm256_sub_pd(v, q[u]), _mm256_set1_pd(fastmath::kHalfPi));
    y2[u] = _mm256_mul_pd(y[u], y[u]);
    ps[u] = _mm256_set1_pd(fastmath::kSinCoeff[8]);
    pc[u] = _mm256_set1_pd(fastmath::kCosCoeff[8]);
  }
  for (int k = 7; k >= 0; --k)
    for (int u = 0; u < kBatch; ++u) {
      ps[u] = _mm256_add_pd(_mm256_mul_pd(ps[u], y2[u]), _mm256_set1_pd(fastmath::kSinCoeff[k]));
      pc[u] = _mm256_add_pd(_mm256_mul_pd(pc[u], y2[u]), _mm256_set1_pd(fastmath::kCosCoeff[k]));
    }
  const __m256d sign = _mm256_set1_pd(-0.0);
  for (int u = 0; u < kBatch; ++u) {
    const __m256d sy = _mm256_mul_pd(y[u], ps[u]);
    const __m256d cy = pc[u];
    const __m256d nsy = _mm256_xor_pd(sy, sign);
    const __m256d ncy = _mm256_xor_pd(cy, sign);
    const __m256d quarter = _mm256_floor_pd(_mm256_mul_pd(q[u], _mm256_set1_pd(0.25)));
    const __m256d r = _mm256_sub_pd(q[u], _mm256_mul_pd(quarter, _mm256_set1_pd(4.0)));
    const __m256d is1 = _mm256_cmp_pd(r, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d is2 = _mm256_cmp_pd(r, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d is3 = _mm256_cmp_pd(r, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
    __m256d sn = sy, cs = cy;
    sn = _mm256_blendv_pd(sn, cy, is1);
    cs = _mm256_blendv_pd(cs, nsy, is1);
    sn = _mm256_blendv_pd(sn, nsy, is2);
    cs = _mm256_blendv_pd(cs, ncy, is2);
    sn = _mm256_blendv_pd(sn, ncy, is3);
    cs = _mm256_blendv_pd(cs, sy, is3);
    sin_out[u] = sn;
    cos_out[u] = cs;
  }
}

// u1[u], u2[u] -> z0[u] = r cos, z1[u] = r sin
inline void box_muller_pd(const __m256d* u1, const __m256d* u2, __m256d* z0, __m256d* z1) {
  __m256d lg[kBatch], s[kBatch], c[kBatch];
  log_pd(u1, lg);
  sincos_2pi_pd(u2, s, c);
  for (int u = 0; u < kBatch; ++u) {
    const __m256d radius = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), lg[u]));
    z0[u] = _mm256_mul_pd(radius, c[u]);
    z1[u] = _mm256_mul_pd(radius, s[u]);
  }
}

void normal_fill_avx2(const Philox4x32::Key& key, const std::uint64_t* streams,
                      std::uint64_t first_block, std::size_t blocks, double* out) {
  const __m256i mask32 = _mm256_set1_epi64x(0xFFFFFFFFll);
  const __m256i mul0 = _mm256_set1_epi64x(Philox4x32::kMul0);
  const __m256i mul1 = _mm256_set1_epi64x(Philox4x32::kMul1);
  __m256i round_key0[Philox4x32::kRounds];
  __m256i round_key1[Philox4x32::kRounds];
  {
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < Philox4x32::kRounds; ++r) {
      if (r > 0) {
        k0 += Philox4x32::kWeyl0;
        k1 += Philox4x32::kWeyl1;
      }
      round_key0[r] = _mm256_set1_epi64x(k0);
      round_key1[r] = _mm256_set1_epi64x(k1);
    }
  }
  const __m256i stream = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(streams));
  const __m256i stream_lo = _mm256_and_si256(stream, mask32);
  const __m256i stream_hi = _mm256_srli_epi64(stream, 32);

  // Blocks are processed kBatch/2 at a time: each block yields two
  // Box-Muller pairs, so one batch of transforms covers two blocks.
  constexpr int kPerBatch = kBatch / 2;
  alignas(32) double spill[4 * kPerBatch * kLanes];
  for (std::size_t b = 0; b < blocks; b += kPerBatch) {
    __m256i c0[kPerBatch], c1[kPerBatch], c2[kPerBatch], c3[kPerBatch];
    for (int u = 0; u < kPerBatch; ++u) {
      const std::uint64_t block = first_block + b + static_cast<std::uint64_t>(u);
      c0[u] = _mm256_set1_epi64x(static_cast<std::uint32_t>(block));
      c1[u] = _mm256_set1_epi64x(static_cast<std::uint32_t>(block >> 32));
      c2[u] = stream_lo;
      c3[u] = stream_hi;
    }
    for (int r = 0; r < Philox4x32::kRounds; ++r) {
      for (int u = 0; u < kPerBatch; ++u) {
        const __m256i p0 = _mm256_mul_epu32(c0[u], mul0);
        const __m256i p1 = _mm256_mul_epu32(c2[u], mul1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1[u]), round_key0[r]);
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3[u]), round_key1[r]);
        c1[u] = _mm256_and_si256(p1, mask32);
        c3[u] = _mm256_and_si256(p0, mask32);
        c0[u] = n0;
        c2[u] = n2;
      }
    }
    __m256d u1[kBatch], u2[kBatch], za[kBatch], zb[kBatch];
    for (int u = 0; u < kPerBatch; ++u) {
      u1[2 * u] = uniform_open01(c0[u]);
      u2[2 * u] = uniform_open01(c1[u]);
      u1[2 * u + 1] = uniform_open01(c2[u]);
      u2[2 * u + 1] = uniform_open01(c3[u]);
    }
    box_muller_pd(u1, u2, za, zb);
    const std::size_t live = std::min<std::size_t>(kPerBatch, blocks - b);
    double* dst = live == kPerBatch ? out + 4 * b * kLanes : spill;
    for (int u = 0; u < kPerBatch; ++u) {
      double* blk = dst + 4 * static_cast<std::size_t>(u) * kLanes;
      _mm256_storeu_pd(blk, za[2 * u]);
      _mm256_storeu_pd(blk + kLanes, zb[2 * u]);
      _mm256_storeu_pd(blk + 2 * kLanes, za[2 * u + 1]);
      _mm256_storeu_pd(blk + 3 * kLanes, zb[2 * u + 1]);
    }
    if (dst == spill)
      for (std::size_t i = 0; i < 4 * live * kLanes; ++i) out[4 * b * kLanes + i] = spill[i];
  }
}

// Instantiated per lag count so the history lives in registers.
template <int lags>
void ar_sweep_fixed(const ArParams& p, ArLanes& s, const double* noise, std::size_t count) {
  const auto m = static_cast<std::int64_t>(p.m);
  const __m256d theta = _mm256_set1_pd(p.theta);
  const __m256d weight = _mm256_set1_pd(p.theta_pow_m1);

  __m256d hx[kMaxLag + 1], hd[kMaxLag + 1], he[kMaxLag + 1], cov[kMaxLag + 1], gap[kMaxLag + 1];
  for (int h = 0; h <= lags; ++h) {
    hx[h] = _mm256_load_pd(s.hist_x[h]);
    hd[h] = _mm256_load_pd(s.hist_d[h]);
    he[h] = _mm256_load_pd(s.hist_xi[h]);
    cov[h] = _mm256_load_pd(s.cov[h]);
    gap[h] = _mm256_load_pd(s.gap[h]);
  }
  __m256d ls_num = _mm256_load_pd(s.ls_num);
  __m256d ls_den = _mm256_load_pd(s.ls_den);

  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t j = s.step;
    const std::int64_t next = s.ring_pos + 1 == m ? 0 : s.ring_pos + 1;
    double* read = s.ring.data() + static_cast<std::size_t>(next) * kLanes;
    double* write = s.ring.data() + static_cast<std::size_t>(s.ring_pos) * kLanes;
    const __m256d e = _mm256_loadu_pd(noise + i * kLanes);
    const __m256d x = _mm256_add_pd(_mm256_mul_pd(theta, hx[0]), e);
    const __m256d d = _mm256_add_pd(_mm256_mul_pd(theta, hd[0]), _mm256_mul_pd(weight, _mm256_loadu_pd(read)));
    _mm256_storeu_pd(write, e);
    if (j >= 1) {
      ls_num = _mm256_add_pd(ls_num, _mm256_mul_pd(x, hx[0]));
      ls_den = _mm256_add_pd(ls_den, _mm256_mul_pd(hx[0], hx[0]));
      for (int l = 0; l <= lags; ++l) {
        if (j < l + 1) break;
        const __m256d partner = l == 0 ? x : hx[l - 1];
        cov[l] = _mm256_add_pd(cov[l], _mm256_mul_pd(x, partner));
        const __m256d g = l == 0 ? _mm256_add_pd(_mm256_mul_pd(e, hd[0]), _mm256_mul_pd(e, hd[0]))
                                 : _mm256_add_pd(_mm256_mul_pd(he[l - 1], hd[0]), _mm256_mul_pd(e, hd[l]));
        gap[l] = _mm256_sub_pd(gap[l], _mm256_mul_pd(theta, g));
      }
    }
    if (j >= 0 && j <= lags) _mm256_store_pd(s.head[j], x);
    for (int h = lags; h >= 1; --h) {
      hx[h] = hx[h - 1];
      hd[h] = hd[h - 1];
      he[h] = he[h - 1];
    }
    hx[0] = x;
    hd[0] = d;
    he[0] = e;
    ++s.step;
    s.ring_pos = next;
  }

  for (int h = 0; h <= lags; ++h) {
    _mm256_store_pd(s.hist_x[h], hx[h]);
    _mm256_store_pd(s.hist_d[h], hd[h]);
    _mm256_store_pd(s.hist_xi[h], he[h]);
    _mm256_store_pd(s.cov[h], cov[h]);
    _mm256_store_pd(s.gap[h], gap[h]);
  }
  _mm256_store_pd(s.ls_num, ls_num);
  _mm256_store_pd(s.ls_den, ls_den);
}

template <int... L>
void ar_sweep_dispatch(const ArParams& p, ArLanes& s, const double* noise, std::size_t count,
                       std::integer_sequence<int, L...>) {
  using Fn = void (*)(const ArParams&, ArLanes&, const double*, std::size_t);
  static constexpr Fn table[] = {&ar_sweep_fixed<L>...};
  table[p.max_lag](p, s, noise, count);
}

void ar_sweep_avx2(const ArParams& p, ArLanes& s, const double* noise, std::size_t count) {
  ar_sweep_dispatch(p, s, noise, count, std::make_integer_sequence<int, kMaxLag + 1>{});
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", &normal_fill_avx2, &ar_sweep_avx2};
  return &table;
}

}  // namespace mdp::kernels
