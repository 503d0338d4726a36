#include <cstddef>
#include <cstdint>

#include "dipolesim/kernels.hpp"
#include "kernels_detail.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace dipolesim::kernels {

namespace {

namespace d = detail;

inline __m256d v_const(double v) { return _mm256_set1_pd(v); }
inline __m256i v_const_i(std::uint64_t v) {
  return _mm256_set1_epi64x(static_cast<long long>(v));
}

// Arithmetic >> 52 for packed 64-bit lanes (AVX2 has no vpsraq).
inline __m256i v_sra52(__m256i x) {
  __m256i logical = _mm256_srli_epi64(x, 52);
  __m256i sign = _mm256_cmpgt_epi64(_mm256_setzero_si256(), x);
  // 12 data bits survive the shift; the top 52 take the sign fill.
  __m256i high = _mm256_and_si256(sign, v_const_i(0xFFFFFFFFFFFFF000ull));
  return _mm256_or_si256(logical, high);
}

// int64 lanes (|v| < 2^51) to double via the 1.5*2^52 magic bias.
inline __m256d v_i64_to_pd(__m256i v) {
  __m256i biased = _mm256_add_epi64(v, _mm256_castpd_si256(v_const(d::kExpShift)));
  return _mm256_sub_pd(_mm256_castsi256_pd(biased), v_const(d::kExpShift));
}

inline __m256d v_uniform(__m256i bits) {
  __m256i m = _mm256_srli_epi64(bits, 12);
  // m < 2^52: OR in the 2^52 exponent, subtract 2^52; both steps exact.
  __m256i mb = _mm256_or_si256(m, v_const_i(0x4330000000000000ull));
  __m256d md = _mm256_sub_pd(_mm256_castsi256_pd(mb), v_const(0x1p52));
  return _mm256_mul_pd(_mm256_add_pd(md, v_const(0.5)),
                       v_const(d::kTwoPowNeg52));
}

inline __m256d v_log(__m256d x) {
  __m256d tiny = _mm256_cmp_pd(x, v_const(0x1p-1022), _CMP_LT_OQ);
  __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, v_const(0x1p54)), tiny);
  __m256d adj = _mm256_blendv_pd(_mm256_setzero_pd(), v_const(-54.0), tiny);

  __m256i bits = _mm256_castpd_si256(xs);
  __m256i ix = _mm256_sub_epi64(bits, v_const_i(d::kLogOff));
  __m256i e = v_sra52(ix);
  __m256i mbits = _mm256_add_epi64(_mm256_and_si256(ix, v_const_i(d::kMantMask)),
                                   v_const_i(d::kLogOff));
  __m256d m = _mm256_castsi256_pd(mbits);
  __m256d ed = _mm256_add_pd(v_i64_to_pd(e), adj);

  __m256d s = _mm256_div_pd(_mm256_sub_pd(m, v_const(1.0)),
                            _mm256_add_pd(m, v_const(1.0)));
  __m256d w = _mm256_mul_pd(s, s);
  __m256d p = v_const(d::kLogC[11]);
  for (int k = 10; k >= 0; --k) p = _mm256_fmadd_pd(p, w, v_const(d::kLogC[k]));
  __m256d lnm = _mm256_mul_pd(s, p);
  __m256d t = _mm256_fmadd_pd(ed, v_const(d::kLn2Lo), lnm);
  __m256d res = _mm256_fmadd_pd(ed, v_const(d::kLn2Hi), t);

  __m256d inf = v_const(d::pinf());
  res = _mm256_blendv_pd(res, inf, _mm256_cmp_pd(x, inf, _CMP_EQ_OQ));
  res = _mm256_blendv_pd(res, v_const(-d::pinf()),
                         _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
  __m256d bad = _mm256_or_pd(_mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ),
                             _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return _mm256_blendv_pd(res, v_const(d::qnan()), bad);
}

inline __m256d v_exp(__m256d x) {
  __m256d xc = _mm256_max_pd(x, v_const(d::kExpLo));
  xc = _mm256_min_pd(xc, v_const(d::kExpHi));
  __m256d t = _mm256_fmadd_pd(xc, v_const(d::kInvLn2), v_const(d::kExpShift));
  __m256i k = _mm256_sub_epi64(_mm256_castpd_si256(t),
                               _mm256_castpd_si256(v_const(d::kExpShift)));
  __m256d kd = _mm256_sub_pd(t, v_const(d::kExpShift));
  __m256d r = _mm256_fmadd_pd(kd, v_const(-d::kLn2Hi), xc);
  r = _mm256_fmadd_pd(kd, v_const(-d::kLn2Lo), r);
  __m256d p = v_const(d::kExpC[11]);
  for (int i = 10; i >= 0; --i) p = _mm256_fmadd_pd(p, r, v_const(d::kExpC[i]));
  __m256d tail = _mm256_fmadd_pd(p, _mm256_mul_pd(r, r), r);
  __m256d frac = _mm256_add_pd(v_const(1.0), tail);
  __m256d res = _mm256_castsi256_pd(_mm256_add_epi64(
      _mm256_castpd_si256(frac), _mm256_slli_epi64(k, 52)));

  res = _mm256_blendv_pd(res, v_const(d::pinf()),
                         _mm256_cmp_pd(x, v_const(d::kExpHi), _CMP_GT_OQ));
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(),
                         _mm256_cmp_pd(x, v_const(d::kExpLo), _CMP_LT_OQ));
  return _mm256_blendv_pd(res, v_const(d::qnan()),
                          _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
}

inline __m256i v_load_bits(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

void a_to_uniform(const std::uint64_t* bits, double* u, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(u + i, v_uniform(v_load_bits(bits + i)));
  for (; i < n; ++i) u[i] = d::uniform_from_bits(bits[i]);
}

void a_exp1(const std::uint64_t* bits, double* x, std::size_t n) {
  std::size_t i = 0;
  __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d u = v_uniform(v_load_bits(bits + i));
    _mm256_storeu_pd(x + i, _mm256_sub_pd(zero, v_log(u)));
  }
  for (; i < n; ++i) x[i] = d::uexp1(bits[i]);
}

void a_pareto_gain(const std::uint64_t* gbits, const std::uint64_t* dbits,
                   double alpha, double* out, std::size_t n) {
  double c = alpha * -0.5;
  std::size_t i = 0;
  __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d lg = v_log(v_uniform(v_load_bits(gbits + i)));
    __m256d ld = v_log(v_uniform(v_load_bits(dbits + i)));
    __m256d pw = v_exp(_mm256_mul_pd(ld, v_const(c)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(zero, lg), pw));
  }
  for (; i < n; ++i) out[i] = d::upareto(gbits[i], dbits[i], alpha);
}

void a_gain_at(const std::uint64_t* gbits, const double* d2, double alpha,
               double* out, std::size_t n) {
  double c = alpha * -0.5;
  std::size_t i = 0;
  __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d lg = v_log(v_uniform(v_load_bits(gbits + i)));
    __m256d ld = v_log(_mm256_loadu_pd(d2 + i));
    __m256d pw = v_exp(_mm256_mul_pd(ld, v_const(c)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(zero, lg), pw));
  }
  for (; i < n; ++i) out[i] = d::ugain_at(gbits[i], d2[i], alpha);
}

void a_vlog(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, v_log(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = d::ulog(x[i]);
}

void a_vexp(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, v_exp(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = d::uexp(x[i]);
}

double a_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; i < n; ++i) lane[i & 3] += x[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double a_masked_sum(const double* x, const double* u, double p,
                    std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  __m256d vp = v_const(p);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(u + i), vp, _CMP_LT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; i < n; ++i) lane[i & 3] += u[i] < p ? x[i] : 0.0;
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

std::size_t a_count_greater(const double* x, double t, std::size_t n) {
  __m256d vt = v_const(t);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), vt, _CMP_GT_OQ);
    c += static_cast<std::size_t>(__builtin_popcount(
        static_cast<unsigned>(_mm256_movemask_pd(mask))));
  }
  for (; i < n; ++i) c += x[i] > t ? 1 : 0;
  return c;
}

double a_max_value(const double* x, std::size_t n) {
  double m = x[0];
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double m01 = lane[0] > lane[1] ? lane[0] : lane[1];
    double m23 = lane[2] > lane[3] ? lane[2] : lane[3];
    m = m01 > m23 ? m01 : m23;
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

void a_sq_dist(const double* ax, const double* ay, double bx, double by,
               double* d2, std::size_t n) {
  __m256d vbx = v_const(bx);
  __m256d vby = v_const(by);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + i), vbx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + i), vby);
    _mm256_storeu_pd(d2 + i, _mm256_add_pd(_mm256_mul_pd(dx, dx),
                                           _mm256_mul_pd(dy, dy)));
  }
  for (; i < n; ++i) {
    double dx = ax[i] - bx;
    double dy = ay[i] - by;
    d2[i] = dx * dx + dy * dy;
  }
}

}  // namespace

const Backend* avx2_backend() {
  static const Backend b = {
      "avx2",    a_to_uniform,    a_exp1,  a_pareto_gain, a_gain_at,
      a_vlog,    a_vexp,          a_sum,   a_masked_sum,  a_count_greater,
      a_max_value, a_sq_dist,
  };
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &b : nullptr;
}

}  // namespace dipolesim::kernels

#else  // non-x86 build: no AVX2 backend, dispatch falls back to scalar

namespace dipolesim::kernels {
const Backend* avx2_backend() { return nullptr; }
}  // namespace dipolesim::kernels

#endif
