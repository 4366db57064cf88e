#include "sdfm/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdfm/errors.hpp"

namespace sdfm {

int Weights::argmax() const {
    int best = 0;
    for (std::size_t i = 1; i < alpha.size(); ++i)
        if (alpha[i] > alpha[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

double Weights::max() const {
    double m = 0.0;
    for (double a : alpha) m = std::max(m, a);
    return m;
}

void softmax_weights_u(double u, std::span<const double> x, const AtomSet& atoms,
                       double epsilon, std::span<double> out) {
    const int n = atoms.size();
    const std::size_t d = static_cast<std::size_t>(atoms.dim);
    const double t = 1.0 - u;
    // D = (1-t)^2 + t^2 eps^2; for eps = 0 this is u^2, possibly ~1e-300.
    const double D = u * u + t * t * epsilon * epsilon;

    // Scores s_k = -||x - t a_k||^2 / (2D); max-subtracted exponentials so the
    // largest weight is exp(0) = 1 and everything else underflows gracefully.
    double smax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const auto& a = atoms[k];
        double d2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double diff = x[i] - t * a[i];
            d2 += diff * diff;
        }
        const double s = -d2 / (2.0 * D);
        out[static_cast<std::size_t>(k)] = s;
        smax = std::max(smax, s);
    }
    double z = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = std::exp(out[static_cast<std::size_t>(k)] - smax);
        out[static_cast<std::size_t>(k)] = w;
        z += w;
    }
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] /= z;
}

namespace {

void require_time(double t, double epsilon) {
    if (epsilon == 0.0) {
        if (!(t >= 0.0 && t < 1.0))
            throw InvalidTime("t must be in [0,1) when epsilon = 0");
    } else {
        if (!(t >= 0.0 && t <= 1.0))
            throw InvalidTime("t must be in [0,1] when epsilon > 0");
    }
}

void require_dim(const Point& x, const AtomSet& atoms) {
    if (x.size() != static_cast<std::size_t>(atoms.dim))
        throw DimensionMismatch("point dimension does not match atoms");
}

} // namespace

Weights softmax_weights(double t, const Point& x, const AtomSet& atoms, double epsilon) {
    require_time(t, epsilon);
    require_dim(x, atoms);
    Weights w;
    w.alpha.resize(static_cast<std::size_t>(atoms.size()));
    softmax_weights_u(1.0 - t, x, atoms, epsilon, w.alpha);
    return w;
}

void barycenter_into(std::span<const double> alpha, const AtomSet& atoms,
                     std::span<double> out) {
    const std::size_t d = static_cast<std::size_t>(atoms.dim);
    for (std::size_t i = 0; i < d; ++i) out[i] = 0.0;
    for (int k = 0; k < atoms.size(); ++k) {
        const double a = alpha[static_cast<std::size_t>(k)];
        const auto& p = atoms[k];
        for (std::size_t i = 0; i < d; ++i) out[i] += a * p[i];
    }
}

Point velocity(double t, const Point& x, const AtomSet& atoms, double epsilon) {
    require_time(t, epsilon);
    require_dim(x, atoms);
    const std::size_t d = static_cast<std::size_t>(atoms.dim);
    const double u = 1.0 - t;
    std::vector<double> alpha(static_cast<std::size_t>(atoms.size()));
    softmax_weights_u(u, x, atoms, epsilon, alpha);

    Point m(d, 0.0);
    barycenter_into(alpha, atoms, m);

    Point v(d);
    if (epsilon == 0.0) {
        // sum_k alpha_k (a_k - x) / u = (m - x) / u since the weights sum to 1
        for (std::size_t i = 0; i < d; ++i) v[i] = (m[i] - x[i]) / u;
    } else {
        const double D = u * u + t * t * epsilon * epsilon;
        const double te2 = t * epsilon * epsilon;
        for (std::size_t i = 0; i < d; ++i)
            v[i] = (u * (m[i] - x[i]) + te2 * x[i]) / D;
    }
    return v;
}

Point bounded_drift(double tau, const Point& x, const AtomSet& atoms) {
    if (!(tau >= 0.0)) throw InvalidTime("tau must be nonnegative");
    require_dim(x, atoms);
    std::vector<double> alpha(static_cast<std::size_t>(atoms.size()));
    Point out(static_cast<std::size_t>(atoms.dim));
    bounded_drift_u(std::exp(-tau), x, atoms, alpha, out);
    return out;
}

void bounded_drift_u(double u, std::span<const double> x, const AtomSet& atoms,
                     std::span<double> weight_scratch, std::span<double> out) {
    const std::size_t d = static_cast<std::size_t>(atoms.dim);
    softmax_weights_u(u, x, atoms, 0.0, weight_scratch);
    barycenter_into(weight_scratch, atoms, out);
    for (std::size_t i = 0; i < d; ++i) out[i] -= x[i];
}

Mat velocity_jacobian(double t, const Point& x, const AtomSet& atoms) {
    if (!(t >= 0.0 && t < 1.0)) throw InvalidTime("velocity_jacobian needs t in [0,1)");
    require_dim(x, atoms);
    const std::size_t d = static_cast<std::size_t>(atoms.dim);
    const double u = 1.0 - t;
    std::vector<double> alpha(static_cast<std::size_t>(atoms.size()));
    softmax_weights_u(u, x, atoms, 0.0, alpha);

    Point m(d, 0.0);
    barycenter_into(alpha, atoms, m);

    // C = sum_l alpha_l a_l a_l^T - m m^T (weighted atom covariance)
    Mat jac(d, d);
    for (int l = 0; l < atoms.size(); ++l) {
        const double a = alpha[static_cast<std::size_t>(l)];
        const auto& p = atoms[l];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) jac(i, j) += a * p[i] * p[j];
    }
    const double scale = t / (u * u * u);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            jac(i, j) = scale * (jac(i, j) - m[i] * m[j]);
            if (i == j) jac(i, j) -= 1.0 / u;
        }
    return jac;
}

} // namespace sdfm
