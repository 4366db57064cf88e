#pragma once

// Closed-form velocity field of the Gaussian-to-discrete flow and its
// smoothed (Gaussian mixture) variant:
//
//   eps = 0:  v_t(x) = sum_k alpha_k(t,x) (a_k - x) / (1-t)
//   eps > 0:  v_t(x) = sum_k alpha_k(t,x) [(1-t)(a_k - x) + t eps^2 x] / D
//
// with D = (1-t)^2 + t^2 eps^2 and softmax weights
//   alpha_k(t,x) ∝ exp(-||x - t a_k||^2 / (2D)).
//
// All internals are parameterized by u = 1 - t rather than t, so late times
// (u down to e^-40 ~ 4e-18) keep full precision.

#include <span>
#include <vector>

#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/geom.hpp"

namespace sdfm {

// Posterior assignment weights; alpha[k] in [0,1], sum = 1.
struct Weights {
    std::vector<double> alpha;

    int argmax() const;
    double max() const;
};

// Allocation-free core used by the integrators: u = 1 - t.
// Writes n weights into out. Log-sum-exp with max subtraction throughout.
void softmax_weights_u(double u, std::span<const double> x, const AtomSet& atoms,
                       double epsilon, std::span<double> out);

// Public wrapper. Requires t < 1 when epsilon = 0 (InvalidTime otherwise);
// t in [0,1] for epsilon > 0.
Weights softmax_weights(double t, const Point& x, const AtomSet& atoms, double epsilon);

// The velocity field itself; same time preconditions as softmax_weights.
Point velocity(double t, const Point& x, const AtomSet& atoms, double epsilon);

// Reparameterized eps=0 drift: with t = 1 - e^-tau,
//   dx/dtau = (1-t) v_t(x) = sum_k alpha_k (a_k - x),
// which is bounded by max_k ||a_k - x||.
Point bounded_drift(double tau, const Point& x, const AtomSet& atoms);

// Allocation-free drift core: u = e^-tau = 1 - t, scratch must hold n doubles.
void bounded_drift_u(double u, std::span<const double> x, const AtomSet& atoms,
                     std::span<double> weight_scratch, std::span<double> out);

// Velocity Jacobian for eps = 0 (t < 1):
//   grad v_t(x) = -I/(1-t) + t/(1-t)^3 * C(t,x)
// where C = sum_l alpha_l a_l a_l^T - m m^T is the weighted atom covariance
// and m = sum_l alpha_l a_l. Symmetric since the field is a gradient.
Mat velocity_jacobian(double t, const Point& x, const AtomSet& atoms);

// Weighted atom barycenter m = sum_k alpha_k a_k for given weights.
void barycenter_into(std::span<const double> alpha, const AtomSet& atoms,
                     std::span<double> out);

} // namespace sdfm
