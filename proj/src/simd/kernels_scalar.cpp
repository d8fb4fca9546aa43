#include "heptamap/simd.hpp"

#include <algorithm>
#include <cmath>

namespace hepta::simd::detail {

ExpSum exp_sum_scalar(const double* re, const double* im, const double* a, const double* b,
                      std::size_t n) {
    double s0r = 0, s0i = 0, s1r = 0, s1i = 0, s2r = 0, s2i = 0, mx = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::exp(re[k]);
        const double cr = m * std::cos(im[k]);
        const double ci = m * std::sin(im[k]);
        s0r += cr;
        s0i += ci;
        if (a) {
            s1r += a[k] * cr;
            s1i += a[k] * ci;
        }
        if (b) {
            s2r += b[k] * cr;
            s2i += b[k] * ci;
        }
        mx = std::max(mx, m);
    }
    return {{s0r, s0i}, {s1r, s1i}, {s2r, s2i}, mx};
}

void exp_cis_scalar(const double* re, const double* im, double* out_re, double* out_im,
                    std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        const double m = std::exp(re[k]);
        out_re[k] = m * std::cos(im[k]);
        out_im[k] = m * std::sin(im[k]);
    }
}

double inv_sqrt_poly_sum_scalar(const double* x, std::size_t n, const double* poly, int npoly,
                                const double* roots, int nroots) {
    double acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xk = x[k];
        double p = 0;
        for (int j = npoly - 1; j >= 0; --j) p = p * xk + poly[j];
        double q = 1;
        for (int j = 0; j < nroots; ++j) q *= xk - roots[j];
        acc += p / std::sqrt(std::fabs(q));
    }
    return acc;
}

}  // namespace hepta::simd::detail
