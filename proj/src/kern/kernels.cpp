#include "loglin/kern/kernels.hpp"

#include <atomic>

#include "loglin/errors.hpp"

namespace loglin::kern {

namespace scalar {

void gauss2_misfit(const Gauss2Inputs& in, double* quad, double* det) {
    for (std::size_t i = 0; i < in.n_samples; ++i) {
        const double a = in.c00[i];
        const double b = in.c01[i];
        const double c = in.c11[i];
        const double dt = a * c - b * b;
        const double i00 = c / dt;
        const double i01 = -b / dt;
        const double i11 = a / dt;
        const double mx = in.mx[i];
        const double my = in.my[i];
        double q = 0.0;
        for (std::size_t j = 0; j < in.n_points; ++j) {
            const double dx = in.yx[j] - mx;
            const double dy = in.yy[j] - my;
            q += dx * (i00 * dx + i01 * dy) + dy * (i01 * dx + i11 * dy);
        }
        quad[i] = q;
        det[i] = dt;
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double max_value(const double* v, std::size_t n) {
    double m = v[0];
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] > m) m = v[i];
    return m;
}

} // namespace scalar

#ifndef LOGLIN_HAVE_AVX2
bool avx2_compiled_in() { return false; }
namespace avx2 {
void gauss2_misfit(const Gauss2Inputs&, double*, double*) {
    throw invalid_input("AVX2 kernels not compiled in");
}
double dot(const double*, const double*, std::size_t) {
    throw invalid_input("AVX2 kernels not compiled in");
}
double max_value(const double*, std::size_t) {
    throw invalid_input("AVX2 kernels not compiled in");
}
} // namespace avx2
#else
bool avx2_compiled_in() { return true; }
#endif

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return avx2_compiled_in() && __builtin_cpu_supports("avx2") &&
           __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend detect() { return avx2_supported() ? Backend::avx2 : Backend::scalar; }

std::atomic<Backend> g_backend{detect()};

} // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw invalid_input("set_backend: AVX2 not supported on this host");
    g_backend.store(b, std::memory_order_relaxed);
}

void reset_backend() { g_backend.store(detect(), std::memory_order_relaxed); }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

void gauss2_misfit(const Gauss2Inputs& in, double* quad, double* det) {
    if (active_backend() == Backend::avx2)
        avx2::gauss2_misfit(in, quad, det);
    else
        scalar::gauss2_misfit(in, quad, det);
}

double dot(const double* a, const double* b, std::size_t n) {
    return active_backend() == Backend::avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

double max_value(const double* v, std::size_t n) {
    return active_backend() == Backend::avx2 ? avx2::max_value(v, n)
                                             : scalar::max_value(v, n);
}

} // namespace loglin::kern
