#include "levyma/fftconv.hpp"

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace levyma::fft {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
} // namespace

std::vector<double> convolve_full(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("convolve_full: empty input");
    std::size_t out_len = a.size() + b.size() - 1;
    std::size_t n = next_pow2(out_len);
    std::size_t nc = n / 2 + 1;

    double* ra = fftw_alloc_real(n);
    double* rb = fftw_alloc_real(n);
    fftw_complex* ca = fftw_alloc_complex(nc);
    fftw_complex* cb = fftw_alloc_complex(nc);

    std::memset(ra, 0, n * sizeof(double));
    std::memset(rb, 0, n * sizeof(double));
    std::memcpy(ra, a.data(), a.size() * sizeof(double));
    std::memcpy(rb, b.data(), b.size() * sizeof(double));

    fftw_plan pf_a, pf_b, pb;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        pf_a = fftw_plan_dft_r2c_1d(int(n), ra, ca, FFTW_ESTIMATE);
        pf_b = fftw_plan_dft_r2c_1d(int(n), rb, cb, FFTW_ESTIMATE);
        pb = fftw_plan_dft_c2r_1d(int(n), ca, ra, FFTW_ESTIMATE);
    }
    fftw_execute(pf_a);
    fftw_execute(pf_b);
    for (std::size_t i = 0; i < nc; ++i) {
        double re = ca[i][0] * cb[i][0] - ca[i][1] * cb[i][1];
        double im = ca[i][0] * cb[i][1] + ca[i][1] * cb[i][0];
        ca[i][0] = re;
        ca[i][1] = im;
    }
    fftw_execute(pb);

    std::vector<double> out(out_len);
    double scale = 1.0 / double(n);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = ra[i] * scale;

    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(pf_a);
        fftw_destroy_plan(pf_b);
        fftw_destroy_plan(pb);
    }
    fftw_free(ra);
    fftw_free(rb);
    fftw_free(ca);
    fftw_free(cb);
    return out;
}

} // namespace levyma::fft
