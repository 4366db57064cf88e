#include "sdfm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdfm/errors.hpp"
#include "sdfm/integrate.hpp"
#include "sdfm/parallel.hpp"
#include "sdfm/velocity.hpp"

namespace sdfm {

namespace {

// t from log time, computed as -expm1(-tau) to keep precision while t < 1 is
// representable (saturates at 1.0 for tau beyond ~36).
double t_of_tau(double tau) { return -std::expm1(-tau); }

StepControl control_from(const FlowConfig& cfg, double h_max) {
    StepControl c;
    c.rel_tol = cfg.rel_tol;
    c.abs_tol = cfg.abs_tol;
    c.h_max = h_max;
    c.max_steps = cfg.max_steps;
    return c;
}

// Reparameterized eps=0 field dx/dtau = sum_k alpha_k (a_k - x), u = e^-tau.
struct TauRhs {
    const AtomSet& atoms;
    mutable std::vector<double> alpha;

    explicit TauRhs(const AtomSet& a)
        : atoms(a), alpha(static_cast<std::size_t>(a.size())) {}

    void operator()(double tau, const std::vector<double>& y, std::vector<double>& dy) const {
        bounded_drift_u(std::exp(-tau), y, atoms, alpha, dy);
    }
};

// Smoothed field dx/dt = v_t(x) for eps > 0, nonsingular on [0,1].
struct EpsRhs {
    const AtomSet& atoms;
    double epsilon;
    mutable std::vector<double> alpha;
    mutable std::vector<double> m;

    EpsRhs(const AtomSet& a, double eps)
        : atoms(a), epsilon(eps), alpha(static_cast<std::size_t>(a.size())),
          m(static_cast<std::size_t>(a.dim)) {}

    void operator()(double t, const std::vector<double>& y, std::vector<double>& dy) const {
        const double u = 1.0 - t;
        const double D = u * u + t * t * epsilon * epsilon;
        softmax_weights_u(u, y, atoms, epsilon, alpha);
        barycenter_into(alpha, atoms, m);
        const double te2 = t * epsilon * epsilon;
        for (std::size_t i = 0; i < dy.size(); ++i)
            dy[i] = (u * (m[i] - y[i]) + te2 * y[i]) / D;
    }
};

// Capture test: nearest atom within sep_radius whose weight exceeds
// 1 - capture_alpha. Returns 0-based index or -1.
int capture_atom(double u, const std::vector<double>& y, const AtomSet& atoms,
                 double capture_alpha, std::vector<double>& alpha_scratch) {
    int nearest = -1;
    double best = atoms.sep_radius * atoms.sep_radius;
    for (int k = 0; k < atoms.size(); ++k) {
        const double d2 = dist2(y, atoms[k]);
        if (d2 < best) {
            best = d2;
            nearest = k;
        }
    }
    if (nearest < 0) return -1;
    softmax_weights_u(u, y, atoms, 0.0, alpha_scratch);
    if (alpha_scratch[static_cast<std::size_t>(nearest)] >= 1.0 - capture_alpha)
        return nearest;
    return -1;
}

} // namespace

Trajectory integrate_forward(const Point& x0, const AtomSet& atoms, const FlowConfig& cfg) {
    if (x0.size() != static_cast<std::size_t>(atoms.dim))
        throw DimensionMismatch("integrate_forward: point dimension mismatch");

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);

    std::vector<double> y = x0;

    if (cfg.epsilon == 0.0) {
        TauRhs rhs(atoms);
        std::vector<double> alpha(static_cast<std::size_t>(atoms.size()));
        DormandPrince54 stepper(control_from(cfg, 1.0));

        auto observer = [&](double tau, const std::vector<double>& state) {
            const double t = t_of_tau(tau);
            // Keep samples strictly increasing in t; late tau values collide
            // at the double just below 1, which we record only once.
            if (t > traj.times.back()) {
                traj.times.push_back(t);
                traj.states.push_back(state);
            }
            const int k = capture_atom(std::exp(-tau), state, atoms, cfg.capture_alpha, alpha);
            if (k >= 0) {
                CaptureEvent ev;
                ev.atom = k + 1;
                ev.time = t;
                ev.residual = dist(state, atoms[k]);
                traj.capture = ev;
                return StepAction::Stop;
            }
            return StepAction::Continue;
        };

        stepper.integrate(rhs, 0.0, cfg.tau_max, y, observer);
        if (traj.capture) {
            traj.terminal = atoms[traj.capture->atom - 1];
        } else {
            traj.terminal = y;
        }
    } else {
        EpsRhs rhs(atoms, cfg.epsilon);
        DormandPrince54 stepper(control_from(cfg, 1.0));
        auto observer = [&](double t, const std::vector<double>& state) {
            if (t > traj.times.back()) {
                traj.times.push_back(t);
                traj.states.push_back(state);
            }
            return StepAction::Continue;
        };
        stepper.integrate(rhs, 0.0, 1.0, y, observer);
        traj.terminal = y;
    }
    return traj;
}

Point integrate_tau_range(const Point& x, double tau0, const AtomSet& atoms,
                          const FlowConfig& cfg) {
    if (tau0 >= cfg.tau_max) return x;
    TauRhs rhs(atoms);
    DormandPrince54 stepper(control_from(cfg, 1.0));
    std::vector<double> y = x;
    stepper.integrate(rhs, tau0, cfg.tau_max, y);
    return y;
}

std::vector<Point> flow_at(const Point& x0, const std::vector<double>& times,
                           const AtomSet& atoms, const FlowConfig& cfg) {
    std::vector<Point> out;
    out.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (i > 0 && !(t > times[i - 1])) throw Error("flow_at: times must increase");
        if (cfg.epsilon == 0.0) {
            if (!(t >= 0.0 && t < 1.0)) throw InvalidTime("flow_at: t must be in [0,1) for eps=0");
        } else if (!(t >= 0.0 && t <= 1.0)) {
            throw InvalidTime("flow_at: t must be in [0,1] for eps>0");
        }
    }

    std::vector<double> y = x0;
    if (cfg.epsilon == 0.0) {
        TauRhs rhs(atoms);
        DormandPrince54 stepper(control_from(cfg, 1.0));
        std::vector<double> taus;
        taus.reserve(times.size());
        for (double t : times) {
            if (t == 0.0) {
                out.push_back(x0);
                continue;
            }
            taus.push_back(-std::log1p(-t)); // tau = -log(1-t), accurately
        }
        if (!taus.empty()) {
            stepper.integrate(
                rhs, 0.0, taus.back(), y, nullptr, taus,
                [&](double, const std::vector<double>& state) { out.push_back(state); });
        }
    } else {
        EpsRhs rhs(atoms, cfg.epsilon);
        DormandPrince54 stepper(control_from(cfg, 1.0));
        std::vector<double> ts;
        for (double t : times) {
            if (t == 0.0) {
                out.push_back(x0);
                continue;
            }
            ts.push_back(t);
        }
        if (!ts.empty()) {
            stepper.integrate(
                rhs, 0.0, ts.back(), y, nullptr, ts,
                [&](double, const std::vector<double>& state) { out.push_back(state); });
        }
    }
    return out;
}

int assign(const Point& x0, const AtomSet& atoms, const FlowConfig& cfg) {
    const Trajectory traj = integrate_forward(x0, atoms, cfg);
    if (cfg.epsilon == 0.0) {
        return traj.capture ? traj.capture->atom : UNRESOLVED;
    }
    // Nearest atom to the smoothed terminal; ties within 1e-9 unresolved.
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    int label = UNRESOLVED;
    for (int k = 0; k < atoms.size(); ++k) {
        const double dk = dist(traj.terminal, atoms[k]);
        if (dk < best) {
            second = best;
            best = dk;
            label = k + 1;
        } else if (dk < second) {
            second = dk;
        }
    }
    if (atoms.size() > 1 && second - best < 1e-9) return UNRESOLVED;
    return label;
}

LabelField tessellate(const AtomSet& atoms, const GridSpec& grid, const FlowConfig& cfg) {
    if (atoms.dim != 2)
        throw DimensionMismatch("tessellate needs 2D atoms; use tessellate_plane for slices");
    LabelField field;
    field.grid = grid;
    field.labels.assign(static_cast<std::size_t>(grid.node_count()), UNRESOLVED);
    field.producer = cfg.epsilon == 0.0 ? Producer::FM : Producer::FM_EPS;
    field.epsilon = cfg.epsilon;

    parallel_for(grid.node_count(), [&](long idx) {
        const int i = static_cast<int>(idx % grid.nx);
        const int j = static_cast<int>(idx / grid.nx);
        const Point x = {grid.x(i), grid.y(j)};
        int label = UNRESOLVED;
        try {
            label = assign(x, atoms, cfg);
        } catch (const Error&) {
            label = UNRESOLVED; // node-level failure must not abort the field
        }
        field.labels[static_cast<std::size_t>(idx)] = label;
    });
    return field;
}

LabelField tessellate_plane(const AtomSet& atoms, const GridSpec& grid, const FlowConfig& cfg,
                            const Point& origin, const Point& axis_u, const Point& axis_v,
                            bool* axes_in_hull) {
    const std::size_t d = static_cast<std::size_t>(atoms.dim);
    if (origin.size() != d || axis_u.size() != d || axis_v.size() != d)
        throw DimensionMismatch("tessellate_plane: origin/axes dimension mismatch");
    if (std::abs(norm(axis_u) - 1.0) > 1e-9 || std::abs(norm(axis_v) - 1.0) > 1e-9 ||
        std::abs(dot(axis_u, axis_v)) > 1e-9)
        throw Error("tessellate_plane: axes must be orthonormal");

    if (axes_in_hull) {
        // Orthonormal basis of span{a_k - a_1} by Gram-Schmidt, then test both
        // axes for membership in that span.
        std::vector<Point> basis;
        for (int k = 1; k < atoms.size(); ++k) {
            Point w = atoms[k] - atoms[0];
            for (const auto& b : basis) {
                const double c = dot(w, b);
                for (std::size_t i = 0; i < d; ++i) w[i] -= c * b[i];
            }
            const double nw = norm(w);
            if (nw > 1e-10) {
                for (auto& x : w) x /= nw;
                basis.push_back(std::move(w));
            }
        }
        auto in_span = [&](const Point& u) {
            Point r = u;
            for (const auto& b : basis) {
                const double c = dot(r, b);
                for (std::size_t i = 0; i < d; ++i) r[i] -= c * b[i];
            }
            return norm(r) < 1e-9;
        };
        *axes_in_hull = in_span(axis_u) && in_span(axis_v);
    }

    LabelField field;
    field.grid = grid;
    field.labels.assign(static_cast<std::size_t>(grid.node_count()), UNRESOLVED);
    field.producer = cfg.epsilon == 0.0 ? Producer::FM : Producer::FM_EPS;
    field.epsilon = cfg.epsilon;

    parallel_for(grid.node_count(), [&](long idx) {
        const int i = static_cast<int>(idx % grid.nx);
        const int j = static_cast<int>(idx / grid.nx);
        const double s = grid.x(i), r = grid.y(j);
        Point x(d);
        for (std::size_t c = 0; c < d; ++c) x[c] = origin[c] + s * axis_u[c] + r * axis_v[c];
        int label = UNRESOLVED;
        try {
            label = assign(x, atoms, cfg);
        } catch (const Error&) {
            label = UNRESOLVED;
        }
        field.labels[static_cast<std::size_t>(idx)] = label;
    });
    return field;
}

Point flow_inverse(const Point& y, double t, const AtomSet& atoms, const FlowConfig& cfg) {
    if (y.size() != static_cast<std::size_t>(atoms.dim))
        throw DimensionMismatch("flow_inverse: point dimension mismatch");
    if (t == 0.0) return y;

    std::vector<double> state = y;
    if (cfg.epsilon == 0.0) {
        if (!(t > 0.0 && t < 1.0)) throw InvalidTime("flow_inverse: t must be in (0,1) for eps=0");
        // Backward flow in sigma with u' = (1-t) e^sigma: d eta / d sigma =
        // eta - m(u', eta). Runs from sigma = 0 (time t) to sigma = -log(1-t)
        // (time 0); the drift stays bounded all the way to the singular end.
        const double u_t = 1.0 - t;
        const double sigma_end = -std::log(u_t);
        struct BackRhs {
            const AtomSet& atoms;
            double u_t;
            mutable std::vector<double> alpha;
            mutable std::vector<double> m;
            BackRhs(const AtomSet& a, double u)
                : atoms(a), u_t(u), alpha(static_cast<std::size_t>(a.size())),
                  m(static_cast<std::size_t>(a.dim)) {}
            void operator()(double sigma, const std::vector<double>& e,
                            std::vector<double>& de) const {
                const double u = std::min(1.0, u_t * std::exp(sigma));
                softmax_weights_u(u, e, atoms, 0.0, alpha);
                barycenter_into(alpha, atoms, m);
                for (std::size_t i = 0; i < de.size(); ++i) de[i] = e[i] - m[i];
            }
        } rhs(atoms, u_t);
        DormandPrince54 stepper(control_from(cfg, 1.0));
        stepper.integrate(rhs, 0.0, sigma_end, state);
    } else {
        if (!(t > 0.0 && t <= 1.0)) throw InvalidTime("flow_inverse: t must be in (0,1] for eps>0");
        // Plain backward time integration of the nonsingular smoothed field.
        EpsRhs fwd(atoms, cfg.epsilon);
        auto rhs = [&](double s, const std::vector<double>& e, std::vector<double>& de) {
            fwd(t - s, e, de);
            for (auto& v : de) v = -v;
        };
        DormandPrince54 stepper(control_from(cfg, 1.0));
        stepper.integrate(rhs, 0.0, t, state);
    }
    return state;
}

CenterCurve center_curve(int k, const AtomSet& atoms, const FlowConfig& cfg,
                         const std::vector<double>& schedule) {
    if (k < 1 || k > atoms.size()) throw Error("center_curve: label out of range");

    std::vector<double> ts = schedule;
    if (ts.empty()) {
        // Dyadic schedule t_j = 1 - 2^-j, j = 1..20.
        for (int j = 1; j <= 20; ++j) ts.push_back(1.0 - std::ldexp(1.0, -j));
    }

    CenterCurve curve;
    curve.atom = k;
    const Point& a = atoms[k - 1];
    for (double t : ts) curve.samples.emplace_back(t, flow_inverse(a, t, atoms, cfg));

    curve.limit = curve.samples.back().second;
    curve.arc_length = 0.0;
    std::vector<double> gaps;
    for (std::size_t j = 0; j + 1 < curve.samples.size(); ++j) {
        const double g = dist(curve.samples[j].second, curve.samples[j + 1].second);
        curve.arc_length += g;
        gaps.push_back(g);
    }

    // Cauchy check on the dyadic tail: past t > 0.999 each gap must at most
    // halve, modulo the integrator noise floor (gaps this small mean the curve
    // has converged to solver precision).
    constexpr double kGapFloor = 5e-7;
    curve.cauchy_ok = true;
    for (std::size_t j = 0; j + 1 < gaps.size(); ++j) {
        if (curve.samples[j].first <= 0.999) continue;
        if (gaps[j + 1] > 0.5 * gaps[j] && gaps[j + 1] > kGapFloor) curve.cauchy_ok = false;
    }
    return curve;
}

} // namespace sdfm
