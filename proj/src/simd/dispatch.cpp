#include "heptamap/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace hepta::simd {

bool available(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(HEPTA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Backend best_backend() { return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar; }

Backend active_backend() {
    static const Backend chosen = [] {
        const char* env = std::getenv("HEPTA_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        return best_backend();
    }();
    return chosen;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

ExpSum exp_sum(Backend be, const double* re, const double* im, const double* a,
               const double* b, std::size_t n) {
#ifdef HEPTA_HAVE_AVX2
    if (be == Backend::Avx2) return detail::exp_sum_avx2(re, im, a, b, n);
#endif
    (void)be;
    return detail::exp_sum_scalar(re, im, a, b, n);
}

void exp_cis(Backend be, const double* re, const double* im, double* out_re, double* out_im,
             std::size_t n) {
#ifdef HEPTA_HAVE_AVX2
    if (be == Backend::Avx2) return detail::exp_cis_avx2(re, im, out_re, out_im, n);
#endif
    (void)be;
    detail::exp_cis_scalar(re, im, out_re, out_im, n);
}

double inv_sqrt_poly_sum(Backend be, const double* x, std::size_t n, const double* poly,
                         int npoly, const double* roots, int nroots) {
#ifdef HEPTA_HAVE_AVX2
    if (be == Backend::Avx2)
        return detail::inv_sqrt_poly_sum_avx2(x, n, poly, npoly, roots, nroots);
#endif
    (void)be;
    return detail::inv_sqrt_poly_sum_scalar(x, n, poly, npoly, roots, nroots);
}

}  // namespace hepta::simd
