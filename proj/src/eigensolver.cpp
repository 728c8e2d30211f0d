#include "qzsim/eigensolver.hpp"

#include "qzsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qzsim {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Annihilates a(p,q) with one plane rotation, accumulating it into v.
// Rutishauser's formulation: the updates are expressed as corrections
// t*a(p,q) and tau-scaled increments so rounding stays symmetric.
void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
    const double apq = a(p, q);
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const double tau = s / (1.0 + c);
    const Eigen::Index n = a.rows();

    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        if (r == p || r == q) continue;
        const double arp = a(r, p);
        const double arq = a(r, q);
        const double new_rp = arp - s * (arq + tau * arp);
        const double new_rq = arq + s * (arp - tau * arq);
        a(r, p) = a(p, r) = new_rp;
        a(r, q) = a(q, r) = new_rq;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        const double vrp = v(r, p);
        const double vrq = v(r, q);
        v(r, p) = vrp - s * (vrq + tau * vrp);
        v(r, q) = vrq + s * (vrp - tau * vrq);
    }
}

}  // namespace

Eigensystem eig_sym(const Eigen::MatrixXd& h, const JacobiOptions& options) {
    if (h.rows() != h.cols() || h.rows() == 0) throw InvalidValue("H", "must be a non-empty square matrix");
    if (!h.allFinite()) throw InvalidValue("H", "contains non-finite entries");
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InvalidValue("H", "not symmetric within 1e-12");

    const Eigen::Index n = h.rows();
    Eigen::MatrixXd a = 0.5 * (h + h.transpose());
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

    const double scale = a.norm();
    const double target = options.tolerance * scale;
    int sweep = 0;
    double off = off_diagonal_norm(a);
    while (off > target) {
        if (sweep == options.max_sweeps) throw ConvergenceFailure(sweep, off);
        ++sweep;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Negligible against both diagonal entries: drop it instead of rotating.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 4 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
                    std::abs(a(q, q)) + g == std::abs(a(q, q))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
            }
        }
        off = off_diagonal_norm(a);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

    Eigensystem es;
    es.eigenvalues.resize(n);
    es.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        es.eigenvalues(k) = a(src, src);
        Eigen::VectorXd col = v.col(src);
        Eigen::Index big = 0;
        for (Eigen::Index r = 1; r < n; ++r)
            if (std::abs(col(r)) > std::abs(col(big))) big = r;
        if (col(big) < 0.0) col = -col;
        es.eigenvectors.col(k) = col;
    }
    return es;
}

}  // namespace qzsim
