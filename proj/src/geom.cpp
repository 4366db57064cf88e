#include "sdfm/geom.hpp"

#include <algorithm>

namespace sdfm {

double operator_norm(const Mat& m) {
    const std::size_t r = m.rows(), c = m.cols();
    if (r == 0 || c == 0) return 0.0;

    // Power iteration on M^T M with a fixed, slightly asymmetric start vector
    // (avoids starting orthogonal to the top singular direction for the
    // symmetric matrices common here).
    std::vector<double> v(c);
    for (std::size_t j = 0; j < c; ++j) v[j] = 1.0 + 0.01 * static_cast<double>(j + 1);
    double nv = norm(v);
    for (auto& x : v) x /= nv;

    std::vector<double> mv(r), w(c);
    double s2 = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t i = 0; i < r; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < c; ++j) s += m(i, j) * v[j];
            mv[i] = s;
        }
        for (std::size_t j = 0; j < c; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < r; ++i) s += m(i, j) * mv[i];
            w[j] = s;
        }
        const double nw = norm(w);
        if (nw == 0.0) return 0.0;
        for (std::size_t j = 0; j < c; ++j) v[j] = w[j] / nw;
        const double prev = s2;
        s2 = nw; // ||M^T M v|| -> largest eigenvalue of M^T M
        if (it > 4 && std::abs(s2 - prev) <= 1e-14 * std::max(1.0, s2)) break;
    }
    return std::sqrt(s2);
}

double min_eigenvalue_symmetric(const Mat& m) {
    const std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    if (n == 2) {
        const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), d = m(1, 1);
        const double tr = a + d;
        const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * b * b));
        return 0.5 * (tr - disc);
    }
    // Cyclic Jacobi sweeps for the (rare) larger symmetric case.
    Mat a = m;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = avg;
        }
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    double mn = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, a(i, i));
    return mn;
}

Mat rotation2d(double angle) {
    Mat r(2, 2);
    r(0, 0) = std::cos(angle);
    r(0, 1) = -std::sin(angle);
    r(1, 0) = std::sin(angle);
    r(1, 1) = std::cos(angle);
    return r;
}

} // namespace sdfm
