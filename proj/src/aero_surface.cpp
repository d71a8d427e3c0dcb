#include <cmath>

#include <Eigen/Dense>

#include "morphwing/aero.hpp"
#include "morphwing/error.hpp"

namespace morphwing {

AeroSurface fit_surface(std::span<const SurfacePoint> points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (n < 6) {
        throw Error(ErrorKind::RankDeficient, "quadratic surface needs at least 6 points");
    }
    Eigen::MatrixXd X(n, 6);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& p = points[static_cast<std::size_t>(k)];
        X.row(k) << 1.0, p.alpha, p.freq, p.alpha * p.alpha, p.freq * p.freq, p.alpha * p.freq;
        y[k] = p.value;
    }
    // Column scaling keeps the rank test meaningful when alpha^2 and F differ
    // by orders of magnitude.
    Eigen::VectorXd scale = X.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < 6; ++j) {
        if (scale[j] == 0.0) scale[j] = 1.0;
    }
    const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    qr.setThreshold(1e-10);
    if (qr.rank() < 6) {
        throw Error(ErrorKind::RankDeficient, "design matrix is rank deficient (points not in "
                                              "general position)");
    }
    const Eigen::VectorXd beta = qr.solve(y).cwiseQuotient(scale);

    AeroSurface s;
    s.z0 = beta[0];
    s.a = beta[1];
    s.b = beta[2];
    s.c = beta[3];
    s.d = beta[4];
    s.f = beta[5];
    s.n_points = static_cast<int>(n);

    const Eigen::VectorXd fitted = X * beta;
    const Eigen::VectorXd resid = y - fitted;
    s.rmse = std::sqrt(resid.squaredNorm() / static_cast<double>(n));

    const double ym = y.mean();
    const double fm = fitted.mean();
    const double syy = (y.array() - ym).square().sum();
    const double sff = (fitted.array() - fm).square().sum();
    const double syf = ((y.array() - ym) * (fitted.array() - fm)).sum();
    if (syy <= 0.0 || sff <= 0.0) {
        s.r_value = resid.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + std::abs(ym)) ? 1.0 : 0.0;
    } else {
        s.r_value = syf / std::sqrt(syy * sff);
    }
    return s;
}

} // namespace morphwing
