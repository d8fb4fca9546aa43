#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The backend is picked at runtime; HEPTA_SIMD=scalar forces the reference.

#include <complex>
#include <cstddef>

namespace hepta::simd {

enum class Backend { Scalar, Avx2 };

bool available(Backend b);
Backend best_backend();
Backend active_backend();
const char* backend_name(Backend b);

struct ExpSum {
    std::complex<double> s0;  // sum exp(z_k)
    std::complex<double> s1;  // sum a_k exp(z_k)
    std::complex<double> s2;  // sum b_k exp(z_k)
    double max_abs = 0.0;     // max exp(re_k)
};

// z_k = re[k] + i*im[k]; a, b may be null when weighted sums are not needed.
ExpSum exp_sum(Backend be, const double* re, const double* im, const double* a,
               const double* b, std::size_t n);

// out_k = exp(re_k) * (cos im_k, sin im_k)
void exp_cis(Backend be, const double* re, const double* im, double* out_re,
             double* out_im, std::size_t n);

// sum_k P(x_k) / sqrt|prod_j (x_k - r_j)| with P given by ascending coefficients
double inv_sqrt_poly_sum(Backend be, const double* x, std::size_t n, const double* poly,
                         int npoly, const double* roots, int nroots);

namespace detail {
ExpSum exp_sum_scalar(const double*, const double*, const double*, const double*, std::size_t);
void exp_cis_scalar(const double*, const double*, double*, double*, std::size_t);
double inv_sqrt_poly_sum_scalar(const double*, std::size_t, const double*, int, const double*,
                                int);
#ifdef HEPTA_HAVE_AVX2
ExpSum exp_sum_avx2(const double*, const double*, const double*, const double*, std::size_t);
void exp_cis_avx2(const double*, const double*, double*, double*, std::size_t);
double inv_sqrt_poly_sum_avx2(const double*, std::size_t, const double*, int, const double*, int);
#endif
}  // namespace detail

}  // namespace hepta::simd
