#pragma once

// Scripted verification suites: equivariance, hull reduction, eps-convergence,
// monotonicity scans, and the four-point counterexample battery.

#include <utility>
#include <vector>

#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/flow.hpp"
#include "sdfm/geom.hpp"
#include "sdfm/ot.hpp"
#include "sdfm/report.hpp"

namespace sdfm {

// Terminal-map identity under x -> c A x + b with orthogonal A:
// transformed atoms ~a_k = c A a_k + b satisfy ~gamma(A x) = c A gamma(x) + b.
// measured = max over probes of the residual; passes if < 1e-6.
// Throws NonOrthogonal if A is not orthogonal within 1e-12.
CheckResult check_equivariance(const AtomSet& atoms, const FlowConfig& cfg, double c,
                               const Mat& A, const Point& b,
                               const std::vector<Point>& probes);

// Label-level form on a probe grid: assign_{cAa+b}(A x) == assign_a(x).
CheckResult check_equivariance_labels(const AtomSet& atoms, const FlowConfig& cfg, double c,
                                      const Mat& A, const Point& b, const GridSpec& probe_grid);

// Tessellations of {c a_k} for every c in cs are node-wise identical.
CheckResult check_scaling_tessellations(const AtomSet& atoms, const FlowConfig& cfg,
                                        const GridSpec& grid, const std::vector<double>& cs);

// Out-of-hull linear shrink: for atoms spanning a proper subspace,
// gamma_t(x) = gamma_t(x_par) + (1-t) x_perp. measured = max residual over
// probes x times sampled t; passes if < 1e-6.
CheckResult check_hull_reduction(const AtomSet& atoms, const FlowConfig& cfg,
                                 const std::vector<Point>& probes,
                                 const std::vector<double>& times);

struct EpsSweepResult {
    std::vector<double> eps_list;
    std::vector<double> agreement;       // fraction agreeing with the eps=0 field
    std::vector<LabelField> fields;      // FM_EPS fields, one per eps
    LabelField base_field;               // eps = 0
    // per-probe terminal distances ||gamma^eps(x) - gamma(x)||, [probe][eps]
    std::vector<std::vector<double>> probe_distances;
    double monotone_fraction = 0.0;      // probes whose distances decrease along eps_list
};

// eps_list must decrease toward 0 (all > 0). Agreement counts nodes resolved
// in both fields.
EpsSweepResult eps_sweep(const AtomSet& atoms, const GridSpec& grid, const FlowConfig& cfg,
                         const std::vector<double>& eps_list, int n_probes = 50,
                         unsigned long long probe_seed = 7);

// min over given pairs of <gamma(x2) - gamma(x1), x2 - x1>; the check PASSES
// when the minimum is negative (violation found) if expect_violation, and when
// the minimum is >= -1e-9 otherwise.
CheckResult monotonicity_scan_semidiscrete(const AtomSet& atoms, const FlowConfig& cfg,
                                           const std::vector<std::pair<Point, Point>>& pairs,
                                           bool expect_violation);

// Violating pairs for the four-point set: x1 = c1 a_3, x2 = (c2/2)(1, sqrt 3)
// with c2 > 2 c1 so that <gamma(x2) - gamma(x1), x2 - x1> = -(c2/2 - c1).
// Includes the reference pair (c1, c2) = (2, 20), a feasible-radius pair
// (1.5, 3.6), and the (2, 20) pair rotated by 120 degrees onto the exactly
// representable axis ray (see the implementation for why radius 20 on the
// diagonal ray is not resolvable in double precision).
std::vector<std::pair<Point, Point>> four_point_monotonicity_pair();

struct GmmScanResult {
    GridSpec grid;
    std::vector<double> min_eig;  // per node, row-major
    double minimum = 0.0;
    int argmin_i = 0, argmin_j = 0;
    double richardson_gap = 0.0;  // |lambda_h - lambda_{h/2}| at the argmin
    LabelField eps_field;         // FM_EPS labels on the same grid
    double boundary_distance_cells = 0.0; // argmin distance to nearest boundary node
    CheckResult check;            // passes when minimum < 0
};

// Smallest eigenvalue of the symmetrized finite-difference Jacobian of the
// eps-smoothed terminal map at every grid node.
GmmScanResult monotonicity_scan_gmm(const AtomSet& atoms, double epsilon, const GridSpec& grid,
                                    const FlowConfig& cfg, double fd_step = 1e-4);

// Smallest symmetrized-Jacobian eigenvalue at a single point.
double gmm_min_eig_at(const AtomSet& atoms, double epsilon, const Point& x,
                      const FlowConfig& cfg, double fd_step = 1e-4);

// The four-point counterexample battery (seven checks, in order):
//   1. ray points -c a_k assign to label 4 (k = 1,2 at c in {0.5, 2, 3};
//      k = 3 at c in {0.5, 2, 8, 32} - the exactly representable axis ray)
//   2. (c, 0) assigns to label 3 (c in {4, 8, 16}; smallest passing c recorded)
//   3. FM adjacency on the inner window lacks (1,2), (1,3), (2,3) and
//      contains (1,4), (2,4), (3,4)
//   4. Laguerre adjacency contains (1,2), (1,3), (2,3)
//   5. FM cell 4 unbounded under probe; Laguerre cell 4 bounded
//   6. convexity witness exists for FM cell 4
//   7. FM cell 3 / cell 4 boundary deviates > 5 grid cells from its best-fit line
std::vector<CheckResult> counterexample_suite(const FlowConfig& cfg, int resolution = 400,
                                              double box_half_width = 3.0,
                                              double inner_half_width = 1.2);

// Same battery over precomputed four-point fields (avoids re-tessellating when
// the caller already has them). fm_field is the wide eps = 0 field (witness
// and boundary-shape checks), fm_inner the narrow eps = 0 field (adjacency:
// the separating arms of cell 4 must be wider than the node spacing),
// lag_field a Laguerre field for the same atoms.
std::vector<CheckResult> counterexample_suite_on(const LabelField& fm_field,
                                                 const LabelField& fm_inner,
                                                 const LabelField& lag_field,
                                                 const LaguerreWeights& lw,
                                                 const FlowConfig& cfg);

} // namespace sdfm
