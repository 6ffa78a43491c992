#include "loglin/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "loglin/errors.hpp"

namespace loglin::linalg {

MatX symmetrize(const MatX& a) {
    if (a.rows() != a.cols())
        throw invalid_input("symmetrize: matrix is not square");
    const double scale = a.cwiseAbs().maxCoeff();
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > kAsymmetryTol * scale)
        throw invalid_parameter("symmetrize: asymmetry " + std::to_string(asym / scale) +
                                " exceeds tolerance");
    return 0.5 * (a + a.transpose());
}

bool is_spd(const MatX& a) {
    if (a.rows() != a.cols()) return false;
    const double scale = a.cwiseAbs().maxCoeff();
    if (!a.allFinite()) return false;
    if (scale > 0.0 && (a - a.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTol * scale)
        return false;
    Eigen::LLT<MatX> llt(0.5 * (a + a.transpose()));
    return llt.info() == Eigen::Success;
}

void require_spd(const MatX& a, const char* name) {
    if (!is_spd(a))
        throw invalid_parameter(std::string(name) + " must be symmetric positive definite");
}

bool is_psd(const MatX& a, double rel_tol) {
    if (a.rows() != a.cols() || !a.allFinite()) return false;
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale > 0.0 && (a - a.transpose()).cwiseAbs().maxCoeff() > kAsymmetryTol * scale)
        return false;
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (a + a.transpose()),
                                           Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    return es.eigenvalues().minCoeff() >= -rel_tol * std::max(lmax, 1.0);
}

double logdet_spd(const MatX& a) {
    Eigen::LLT<MatX> llt(a);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("logdet_spd: Cholesky failed (matrix not SPD?)");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

namespace {

MatX eig_pow(const MatX& a, double exponent) {
    Eigen::SelfAdjointEigenSolver<MatX> es(a);
    if (es.info() != Eigen::Success)
        throw numerical_failure("eigendecomposition failed");
    VecX lam = es.eigenvalues();
    const double floor = kSqrtFloor * std::max(lam.cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        lam(i) = std::pow(std::max(lam(i), floor), exponent);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

MatX sqrt_spd(const MatX& a) { return eig_pow(symmetrize(a), 0.5); }

MatX invsqrt_spd(const MatX& a) { return eig_pow(symmetrize(a), -0.5); }

MatX inverse_spd(const MatX& a) {
    Eigen::LLT<MatX> llt(a);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("inverse_spd: Cholesky failed");
    return llt.solve(MatX::Identity(a.rows(), a.cols()));
}

MatX solve_spd(const MatX& a, const MatX& b) {
    Eigen::LLT<MatX> llt(a);
    if (llt.info() != Eigen::Success)
        throw numerical_failure("solve_spd: Cholesky failed");
    return llt.solve(b);
}

SpdRepair repair_spd(const MatX& a, double floor_rel) {
    const MatX sym = 0.5 * (a + a.transpose());
    const double floor = floor_rel * sym.trace() / static_cast<double>(sym.rows());
    Eigen::SelfAdjointEigenSolver<MatX> es(sym);
    if (es.info() != Eigen::Success)
        throw numerical_failure("repair_spd: eigendecomposition failed");
    VecX lam = es.eigenvalues();
    bool moved = false;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < floor) {
            lam(i) = floor;
            moved = true;
        }
    }
    if (!moved) return {sym, false};
    return {es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose(), true};
}

} // namespace loglin::linalg
