#pragma once

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with PI-free step
// control, FSAL, exact landing on requested output times, and a per-step
// callback that may stop the integration early.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "sdfm/errors.hpp"

namespace sdfm {

struct StepControl {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 1000000;
};

// Observer outcome after each accepted step.
enum class StepAction { Continue, Stop };

// Integrates y' = f(t, y) from t0 to t1 (t1 > t0).
//
// rhs(t, y, dydt) evaluates the field. observer(t, y), if provided, runs after
// every accepted step and may stop the integration. output_times (must be
// strictly increasing, within (t0, t1]) are landed on exactly; on_output(t, y)
// is called at each. Initial state y is updated in place to the final state.
//
// Throws StepLimitExceeded / NonFiniteState.
class DormandPrince54 {
public:
    using Rhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;
    using Observer = std::function<StepAction(double, const std::vector<double>&)>;
    using Output = std::function<void(double, const std::vector<double>&)>;

    explicit DormandPrince54(StepControl ctrl) : ctrl_(ctrl) {}

    // Returns the time actually reached (t1, or earlier if observer stopped).
    double integrate(const Rhs& rhs, double t0, double t1, std::vector<double>& y,
                     const Observer& observer = nullptr,
                     const std::vector<double>& output_times = {},
                     const Output& on_output = nullptr) const;

private:
    StepControl ctrl_;
};

} // namespace sdfm
