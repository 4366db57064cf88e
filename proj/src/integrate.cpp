#include "sdfm/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace sdfm {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
// 5th-order weights (also the a7* row; FSAL).
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// Embedded error weights (b5 - b4hat).
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

bool all_finite(const std::vector<double>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace

double DormandPrince54::integrate(const Rhs& rhs, double t0, double t1,
                                  std::vector<double>& y, const Observer& observer,
                                  const std::vector<double>& output_times,
                                  const Output& on_output) const {
    const std::size_t d = y.size();
    std::vector<double> k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d);
    std::vector<double> ytmp(d), ynew(d);

    double t = t0;
    rhs(t, y, k1);
    if (!all_finite(k1)) throw NonFiniteState("non-finite derivative at start");

    // Initial step from the scaled derivative norm, then refined by rejection.
    double h;
    {
        double dn = 0.0, yn = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double sc = ctrl_.abs_tol + ctrl_.rel_tol * std::abs(y[i]);
            dn = std::max(dn, std::abs(k1[i]) / sc);
            yn = std::max(yn, std::abs(y[i]) / sc);
        }
        h = (dn > 0.0) ? 0.01 * std::max(1.0, yn) / dn : 1e-3 * (t1 - t0);
        h = std::min({h, ctrl_.h_max, t1 - t0});
        h = std::max(h, 1e-12);
    }

    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] <= t0) ++next_out;

    long steps = 0;
    bool last_rejected = false;
    while (t < t1) {
        if (++steps > ctrl_.max_steps)
            throw StepLimitExceeded("step limit exceeded during integration");

        // Land exactly on the next requested output time and on t1.
        double target = t1;
        if (next_out < output_times.size()) target = std::min(target, output_times[next_out]);
        if (t + h >= target) h = target - t;
        // Tiny leftover intervals are integrated in one nonzero step.
        if (h <= 0.0) h = std::max(1e-15, 1e-15 * std::abs(t));

        // Stage evaluations.
        for (std::size_t i = 0; i < d; ++i) ytmp[i] = y[i] + h * A21 * k1[i];
        rhs(t + C2 * h, ytmp, k2);
        for (std::size_t i = 0; i < d; ++i)
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        rhs(t + C3 * h, ytmp, k3);
        for (std::size_t i = 0; i < d; ++i)
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + C4 * h, ytmp, k4);
        for (std::size_t i = 0; i < d; ++i)
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + C5 * h, ytmp, k5);
        for (std::size_t i = 0; i < d; ++i)
            ytmp[i] = y[i] +
                      h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < d; ++i)
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        rhs(t + h, ynew, k7); // FSAL stage, reused as k1 on acceptance

        if (!all_finite(ynew) || !all_finite(k7))
            throw NonFiniteState("non-finite state during integration");

        // Scaled RMS error of the embedded pair.
        double err2 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                  E6 * k6[i] + E7 * k7[i]);
            const double sc =
                ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err2 += (e / sc) * (e / sc);
        }
        const double err = std::sqrt(err2 / static_cast<double>(d));

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);

            if (next_out < output_times.size() && t >= output_times[next_out]) {
                if (on_output) on_output(t, y);
                ++next_out;
            }
            if (observer && observer(t, y) == StepAction::Stop) return t;

            const double fac =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2,
                           last_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, ctrl_.h_max);
            last_rejected = false;
        } else {
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
            h *= fac;
            last_rejected = true;
        }
    }
    return t;
}

} // namespace sdfm
