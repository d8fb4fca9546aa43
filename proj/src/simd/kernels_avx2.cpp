// AVX2/FMA variants. Compiled with -mavx2 -mfma; only called after a cpuid check.
// exp and sincos use the Cephes rational/polynomial approximations with
// Cody-Waite argument reduction, four lanes at a time.

#include "heptamap/simd.hpp"

#include <immintrin.h>

#include <algorithm>

namespace hepta::simd::detail {

namespace {

inline __m256d set1(double v) { return _mm256_set1_pd(v); }

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline __m256d exp_pd(__m256d x) {
    const __m256d lo_mask = _mm256_cmp_pd(x, set1(-708.0), _CMP_GE_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, set1(-708.0)), set1(708.0));
    const __m256d n =
        _mm256_round_pd(_mm256_mul_pd(x, set1(1.4426950408889634073599)),
                        _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, set1(6.93145751953125E-1), x);
    r = _mm256_fnmadd_pd(n, set1(1.42860682030941723212E-6), r);
    const __m256d xx = _mm256_mul_pd(r, r);
    __m256d p = set1(1.26177193074810590878E-4);
    p = _mm256_fmadd_pd(p, xx, set1(3.02994407707441961300E-2));
    p = _mm256_fmadd_pd(p, xx, set1(9.99999999999999999910E-1));
    const __m256d px = _mm256_mul_pd(r, p);
    __m256d q = set1(3.00198505138664455042E-6);
    q = _mm256_fmadd_pd(q, xx, set1(2.52448340349684104192E-3));
    q = _mm256_fmadd_pd(q, xx, set1(2.27265548208155028766E-1));
    q = _mm256_fmadd_pd(q, xx, set1(2.00000000000000000009E0));
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(q, px));
    e = _mm256_fmadd_pd(set1(2.0), e, set1(1.0));
    __m256i ni = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
    ni = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(ni));
    return _mm256_and_pd(e, lo_mask);
}

inline void sincos_pd(__m256d x, __m256d* s, __m256d* c) {
    const __m256d sign_bit = set1(-0.0);
    const __m256d xsign = _mm256_and_pd(x, sign_bit);
    const __m256d ax = _mm256_andnot_pd(sign_bit, x);
    const __m256d q = _mm256_round_pd(_mm256_mul_pd(ax, set1(0.63661977236758134308)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(q, set1(1.57079625129699707031), ax);
    r = _mm256_fnmadd_pd(q, set1(7.54978941586159635336E-8), r);
    r = _mm256_fnmadd_pd(q, set1(5.39030285815811905290E-15), r);
    const __m256d zz = _mm256_mul_pd(r, r);

    __m256d ps = set1(1.58962301576546568060E-10);
    ps = _mm256_fmadd_pd(ps, zz, set1(-2.50507477628578072866E-8));
    ps = _mm256_fmadd_pd(ps, zz, set1(2.75573136213857245213E-6));
    ps = _mm256_fmadd_pd(ps, zz, set1(-1.98412698295895385996E-4));
    ps = _mm256_fmadd_pd(ps, zz, set1(8.33333333332211858878E-3));
    ps = _mm256_fmadd_pd(ps, zz, set1(-1.66666666666666307295E-1));
    const __m256d sv = _mm256_fmadd_pd(_mm256_mul_pd(r, zz), ps, r);

    __m256d pc = set1(-1.13585365213876817300E-11);
    pc = _mm256_fmadd_pd(pc, zz, set1(2.08757008419747316778E-9));
    pc = _mm256_fmadd_pd(pc, zz, set1(-2.75573141792967388112E-7));
    pc = _mm256_fmadd_pd(pc, zz, set1(2.48015872888517045348E-5));
    pc = _mm256_fmadd_pd(pc, zz, set1(-1.38888888888730564116E-3));
    pc = _mm256_fmadd_pd(pc, zz, set1(4.16666666666665929218E-2));
    __m256d cv = _mm256_fnmadd_pd(set1(0.5), zz, set1(1.0));
    cv = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc, cv);

    // quadrant q mod 4
    const __m256d q4 = _mm256_sub_pd(
        q, _mm256_mul_pd(set1(4.0), _mm256_floor_pd(_mm256_mul_pd(q, set1(0.25)))));
    const __m256d odd = _mm256_cmp_pd(_mm256_sub_pd(q4, _mm256_mul_pd(set1(2.0),
                                      _mm256_floor_pd(_mm256_mul_pd(q4, set1(0.5))))),
                                      set1(0.5), _CMP_GT_OQ);
    const __m256d sin_neg = _mm256_cmp_pd(q4, set1(1.5), _CMP_GT_OQ);
    const __m256d cos_neg = _mm256_and_pd(_mm256_cmp_pd(q4, set1(0.5), _CMP_GT_OQ),
                                          _mm256_cmp_pd(q4, set1(2.5), _CMP_LT_OQ));
    __m256d so = _mm256_blendv_pd(sv, cv, odd);
    __m256d co = _mm256_blendv_pd(cv, sv, odd);
    so = _mm256_xor_pd(so, _mm256_and_pd(sin_neg, sign_bit));
    co = _mm256_xor_pd(co, _mm256_and_pd(cos_neg, sign_bit));
    *s = _mm256_xor_pd(so, xsign);
    *c = co;
}

}  // namespace

ExpSum exp_sum_avx2(const double* re, const double* im, const double* a, const double* b,
                    std::size_t n) {
    __m256d s0r = _mm256_setzero_pd(), s0i = s0r, s1r = s0r, s1i = s0r, s2r = s0r, s2i = s0r;
    __m256d mx = s0r;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d m = exp_pd(_mm256_loadu_pd(re + k));
        __m256d sn, cs;
        sincos_pd(_mm256_loadu_pd(im + k), &sn, &cs);
        const __m256d cr = _mm256_mul_pd(m, cs);
        const __m256d ci = _mm256_mul_pd(m, sn);
        s0r = _mm256_add_pd(s0r, cr);
        s0i = _mm256_add_pd(s0i, ci);
        if (a) {
            const __m256d av = _mm256_loadu_pd(a + k);
            s1r = _mm256_fmadd_pd(av, cr, s1r);
            s1i = _mm256_fmadd_pd(av, ci, s1i);
        }
        if (b) {
            const __m256d bv = _mm256_loadu_pd(b + k);
            s2r = _mm256_fmadd_pd(bv, cr, s2r);
            s2i = _mm256_fmadd_pd(bv, ci, s2i);
        }
        mx = _mm256_max_pd(mx, m);
    }
    ExpSum out{{hsum(s0r), hsum(s0i)}, {hsum(s1r), hsum(s1i)}, {hsum(s2r), hsum(s2i)}, hmax(mx)};
    if (k < n) {
        const ExpSum tail = exp_sum_scalar(re + k, im + k, a ? a + k : nullptr,
                                           b ? b + k : nullptr, n - k);
        out.s0 += tail.s0;
        out.s1 += tail.s1;
        out.s2 += tail.s2;
        out.max_abs = std::max(out.max_abs, tail.max_abs);
    }
    return out;
}

void exp_cis_avx2(const double* re, const double* im, double* out_re, double* out_im,
                  std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d m = exp_pd(_mm256_loadu_pd(re + k));
        __m256d sn, cs;
        sincos_pd(_mm256_loadu_pd(im + k), &sn, &cs);
        _mm256_storeu_pd(out_re + k, _mm256_mul_pd(m, cs));
        _mm256_storeu_pd(out_im + k, _mm256_mul_pd(m, sn));
    }
    if (k < n) exp_cis_scalar(re + k, im + k, out_re + k, out_im + k, n - k);
}

double inv_sqrt_poly_sum_avx2(const double* x, std::size_t n, const double* poly, int npoly,
                              const double* roots, int nroots) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d xv = _mm256_loadu_pd(x + k);
        __m256d p = _mm256_setzero_pd();
        for (int j = npoly - 1; j >= 0; --j) p = _mm256_fmadd_pd(p, xv, set1(poly[j]));
        __m256d q = set1(1.0);
        for (int j = 0; j < nroots; ++j) q = _mm256_mul_pd(q, _mm256_sub_pd(xv, set1(roots[j])));
        q = _mm256_sqrt_pd(_mm256_and_pd(q, abs_mask));
        acc = _mm256_add_pd(acc, _mm256_div_pd(p, q));
    }
    double out = hsum(acc);
    if (k < n) out += inv_sqrt_poly_sum_scalar(x + k, n - k, poly, npoly, roots, nroots);
    return out;
}

}  // namespace hepta::simd::detail
