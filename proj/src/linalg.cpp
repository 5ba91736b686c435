#include "qpmix/linalg.hpp"

#include <cmath>

namespace qpmix {

std::optional<double> cholesky_log_det(const Eigen::MatrixXd& a, double ratio) {
    const Eigen::Index n = a.rows();
    if (n == 0) return 0.0;
    const double max_diag = a.diagonal().maxCoeff();
    if (!(max_diag > 0.0)) return std::nullopt;
    const double threshold = ratio * max_diag;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    double log_det = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > threshold)) return std::nullopt;
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        log_det += std::log(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return log_det;
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, std::span<const int> idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = a(idx[i], idx[j]);
    return out;
}

std::optional<Eigen::MatrixXd> spd_inverse(const Eigen::MatrixXd& a, double ratio) {
    if (a.rows() == 0) return Eigen::MatrixXd(0, 0);
    if (!cholesky_log_det(a, ratio)) return std::nullopt;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
    return Eigen::MatrixXd((inv + inv.transpose()) / 2.0);
}

}  // namespace qpmix
