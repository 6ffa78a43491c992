#pragma once

#include <vector>

#include "loglin/types.hpp"

namespace loglin::ett {

/// Gaussian belief over the kinematic state (position, velocity).
struct KinematicBelief {
    VecX mean;
    MatX cov;
};

/// Inverse-Wishart belief over the target extent: nu > 2d, scale SPD.
/// Extent point estimate is scale / (nu - 2d - 2).
struct ExtentBelief {
    double dof = 0.0;
    MatX scale;

    Eigen::Index dim() const { return scale.rows(); }
};

/// Measurement model y ~ N(Hx, sX + R).
struct EttModel {
    MatX h;   // d x n observation matrix
    double s; // extent scaling, > 0
    MatX r;   // d x d sensor noise covariance, SPD
};

struct MeasurementBatch {
    std::vector<VecX> points;

    int count() const { return static_cast<int>(points.size()); }
};

/// Constant-velocity motion model plus inverse-Wishart forgetting constants.
struct MotionModel {
    MatX a;       // n x n transition
    MatX q;       // n x n process noise, PSD
    double tau;   // sampling period [s]
    double tau0;  // forgetting time constant [s]
};

void validate(const KinematicBelief& b);
void validate(const ExtentBelief& b);
void validate(const EttModel& m);
void validate(const MotionModel& m);

MatX extent_mean(const ExtentBelief& b); // scale / (nu - 2d - 2)

struct BatchStats {
    VecX mean;     // (1/m) sum y_j
    MatX spread;   // (1/m) sum (y_j - predicted)(y_j - predicted)^T
};

/// Mean and spread of one scan about the predicted measurement.
BatchStats batch_stats(const MeasurementBatch& b, const VecX& predicted);

/// Scatter about the batch's own mean: (1/m) sum (y_j - ybar)(y_j - ybar)^T.
MatX scatter_about_mean(const MeasurementBatch& b);

/// Kalman-gain form: K = P H^T S^-1 with S = H P H^T + (s X_hat + R)/m.
KinematicBelief kinematic_update(const KinematicBelief& prior, const EttModel& model,
                                 const MeasurementBatch& b, const MatX& extent_hat);

/// Information form of the same update:
/// P+ = (P^-1 + m H^T (s X_hat + R)^-1 H)^-1. Agrees with the gain form.
KinematicBelief kinematic_update_information(const KinematicBelief& prior,
                                             const EttModel& model,
                                             const MeasurementBatch& b,
                                             const MatX& extent_hat);

/// Diagnostics accumulated across extent updates.
struct UpdateDiag {
    long spd_repairs = 0;
};

// -- Extent update increments, exposed for direct testing of the algebra. --

/// Moment-matched unbiased increment built from matrix square roots:
/// X^1/2 (Ybar1)^-1/2 Y1 (Ybar1)^-1/2 X^1/2 + (m-1) X^1/2 (Ybar2)^-1/2 Y2 (Ybar2)^-1/2 X^1/2.
MatX ffk_increment(const MatX& y1, const MatX& y2, int m, const MatX& extent_hat,
                   const MatX& hph, const MatX& sxr);

/// Linearization increment m X_hat + m s X_hat C^-1 [Y - C] C^-1 X_hat for a
/// given innovation center C (s X_hat + R, optionally plus H P H^T).
MatX linearized_increment(const MatX& spread, int m, const MatX& extent_hat,
                          const MatX& center, double s);

// -- Full measurement updates (nu += m, scale += increment). --

/// Baseline unbiased extent update; requires m >= 2 (the within-scan scatter
/// term is undefined for a single measurement).
ExtentBelief ffk_extent_update(const ExtentBelief& prior, const KinematicBelief& kin_prior,
                               const EttModel& model, const MeasurementBatch& b,
                               UpdateDiag* diag = nullptr);

/// Unbiased linearized update: innovation center H P H^T + s X_hat + R.
ExtentBelief ull_extent_update(const ExtentBelief& prior, const KinematicBelief& kin_prior,
                               const EttModel& model, const MeasurementBatch& b,
                               UpdateDiag* diag = nullptr);

/// Plain linearized update: innovation center s X_hat + R (ignores kinematic
/// uncertainty, biased upward when H P H^T is nonzero).
ExtentBelief lll_extent_update(const ExtentBelief& prior, const EttModel& model,
                               const MeasurementBatch& b, const VecX& x_hat,
                               UpdateDiag* diag = nullptr);

/// Product-form factorization of the scan likelihood about (x_hat, X_hat):
/// a per-point Gaussian factor N(y; Hx, s X_hat + R) and an inverse-Wishart
/// factor IW(X; m, M). The returned M equals the lll increment.
struct Factorization {
    MatX gaussian_cov;  // s X_hat + R
    int iw_dof;         // m
    MatX iw_scale;      // M
};

Factorization factorize_likelihood(const EttModel& model, const MeasurementBatch& b,
                               const VecX& x_hat, const MatX& extent_hat);

/// d f1 / dZ with f1(Z) = log|sI + Z^1/2 R Z^1/2|: (Z + s R^-1)^-T.
MatX grad_f1(const MatX& z, double s, const MatX& r);

/// d f2 / dZ with f2(Z) = tr(N (s Z^-1 + R)^-1):
/// s [Z^-1 (s Z^-1 + R)^-1 N (s Z^-1 + R)^-1 Z^-1]^T.
MatX grad_f2(const MatX& z, double s, const MatX& r, const MatX& n);

/// Kalman predict for the kinematics plus exponential forgetting for the
/// extent: nu' = exp(-tau/tau0) nu (floored at 2d + 3), scale rescaled so the
/// extent mean is exactly preserved.
struct TimeUpdateResult {
    KinematicBelief kin;
    ExtentBelief ext;
};

TimeUpdateResult time_update(const KinematicBelief& kin, const ExtentBelief& ext,
                             const MotionModel& motion);

} // namespace loglin::ett
