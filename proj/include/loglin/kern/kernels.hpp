#pragma once

#include <cstddef>

namespace loglin::kern {

/// Batched evaluation of 2x2 Gaussian misfits. For each sample i with mean
/// (mx[i], my[i]) and symmetric covariance [[c00, c01], [c01, c11]][i]:
///   quad[i] = sum_j (y_j - mu_i)^T C_i^-1 (y_j - mu_i)
///   det[i]  = c00[i] c11[i] - c01[i]^2
/// A non-positive determinant poisons quad[i] with inf/nan and is left to the
/// caller to detect via det[i].
struct Gauss2Inputs {
    const double* mx;
    const double* my;
    const double* c00;
    const double* c01;
    const double* c11;
    std::size_t n_samples;
    const double* yx;
    const double* yy;
    std::size_t n_points;
};

enum class Backend { scalar, avx2 };

bool avx2_compiled_in();
bool avx2_supported();      // compiled in and the CPU reports AVX2+FMA
Backend active_backend();
void set_backend(Backend b); // throws invalid_input when unsupported
void reset_backend();        // back to runtime auto-detection

const char* backend_name(Backend b);

// Dispatched entry points.
void gauss2_misfit(const Gauss2Inputs& in, double* quad, double* det);
double dot(const double* a, const double* b, std::size_t n);
double max_value(const double* v, std::size_t n);

// Reference kernels; the dispatched variants are equivalence-tested against
// these.
namespace scalar {
void gauss2_misfit(const Gauss2Inputs& in, double* quad, double* det);
double dot(const double* a, const double* b, std::size_t n);
double max_value(const double* v, std::size_t n);
} // namespace scalar

namespace avx2 {
void gauss2_misfit(const Gauss2Inputs& in, double* quad, double* det);
double dot(const double* a, const double* b, std::size_t n);
double max_value(const double* v, std::size_t n);
} // namespace avx2

} // namespace loglin::kern
