#pragma once

// Forward/backward integration of the flow ODE, terminal assignment, grid
// tessellation, and cell-center curves.
//
// For eps = 0 the ODE is integrated in log time tau with t = 1 - e^-tau,
// where the drift sum_k alpha_k (a_k - x) is bounded; a trajectory is
// "captured" by atom k at the first accepted step with
//   ||x - a_k|| < sep_radius  AND  alpha_k >= 1 - capture_alpha,
// after which its terminal point is a_k exactly. For eps > 0 the smoothed
// field is nonsingular and is integrated in plain t over [0,1]; no capture.

#include <optional>
#include <utility>
#include <vector>

#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/geom.hpp"

namespace sdfm {

struct CaptureEvent {
    int atom = 0;         // capturing atom index (1-based label)
    double time = 0.0;    // t at which capture was declared
    double residual = 0.0; // ||x - a_k|| at declaration; < sep_radius
};

struct Trajectory {
    std::vector<double> times;       // strictly increasing t in [0,1], starts at 0
    std::vector<Point> states;       // matching states
    std::optional<CaptureEvent> capture;
    Point terminal;

    std::optional<int> captured_by() const {
        return capture ? std::optional<int>(capture->atom) : std::nullopt;
    }
    std::optional<double> capture_time() const {
        return capture ? std::optional<double>(capture->time) : std::nullopt;
    }
};

struct CenterCurve {
    int atom = 0;                                  // 1-based label
    std::vector<std::pair<double, Point>> samples; // (t, gamma_t^{-1}(a_k))
    Point limit;                                   // last sample
    double arc_length = 0.0;                       // sum of consecutive distances
    bool cauchy_ok = true;  // consecutive gaps halve (or are negligible) past t > 0.999
};

// Integrates from x0 at t=0. See header comment for the two time
// parameterizations and the capture rule.
Trajectory integrate_forward(const Point& x0, const AtomSet& atoms, const FlowConfig& cfg);

// Continues an eps=0 integration from state x at log time tau0 until tau_max
// with capture DISABLED; returns the final state. Used by the
// capture-stability check.
Point integrate_tau_range(const Point& x, double tau0, const AtomSet& atoms,
                          const FlowConfig& cfg);

// Evaluates gamma_t(x0) at the requested times exactly (capture disabled, so
// this is the pure ODE flow). times must be increasing, in [0,1) for eps=0,
// [0,1] for eps>0.
std::vector<Point> flow_at(const Point& x0, const std::vector<double>& times,
                           const AtomSet& atoms, const FlowConfig& cfg);

// Terminal label of x0: captured atom (eps=0) or nearest atom to the eps>0
// terminal with ties within 1e-9 unresolved. UNRESOLVED if uncaptured.
int assign(const Point& x0, const AtomSet& atoms, const FlowConfig& cfg);

// assign() at every grid node; deterministic regardless of worker count.
// Node-level integration failures become UNRESOLVED, never abort the field.
LabelField tessellate(const AtomSet& atoms, const GridSpec& grid, const FlowConfig& cfg);

// Tessellates the affine 2-plane {origin + s*axis_u + r*axis_v} of a
// higher-dimensional atom set; grid coordinates are (s, r). axis_u/axis_v must
// be orthonormal. Returns false in *axes_in_hull (if given) when the axes do
// not lie in the span of the atom differences.
LabelField tessellate_plane(const AtomSet& atoms, const GridSpec& grid, const FlowConfig& cfg,
                            const Point& origin, const Point& axis_u, const Point& axis_v,
                            bool* axes_in_hull = nullptr);

// Cell-center curve gamma_t^{-1}(a_k) over the schedule (default dyadic
// t_j = 1 - 2^-j, j = 1..20), computed by integrating the reversed flow
// backward from a_k. k is a 1-based label.
CenterCurve center_curve(int k, const AtomSet& atoms, const FlowConfig& cfg,
                         const std::vector<double>& schedule = {});

// gamma_t^{-1}(y): backward integration from y at time t down to time 0.
Point flow_inverse(const Point& y, double t, const AtomSet& atoms, const FlowConfig& cfg);

} // namespace sdfm
