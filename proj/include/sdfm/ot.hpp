#pragma once

// Semi-discrete optimal transport from the standard Gaussian to the uniform
// discrete target: Laguerre (power-cell) assignment and Kantorovich dual
// ascent for the cell weights.
//
//   L_k(psi) = { x : 1/2||x - a_k||^2 - psi_k <= 1/2||x - a_j||^2 - psi_j  for all j }
//
// The dual objective F(psi) = E_x[ min_k(1/2||x - a_k||^2 - psi_k) ] + (1/n) sum_k psi_k
// is concave with gradient (1/n - mass_k(psi)); it is estimated on one fixed
// Monte Carlo sample set (common random numbers), which makes the ascent
// deterministic and the estimated objective piecewise linear in psi.

#include <cstdint>
#include <vector>

#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/geom.hpp"

namespace sdfm {

struct LaguerreWeights {
    std::vector<double> psi;    // gauge-normalized: min_k psi_k = 0
    std::vector<double> masses; // estimated Gaussian masses of the cells
    double residual = 0.0;      // max_k |masses_k - 1/n|
    int iterations = 0;
    long mc_samples = 0;
    std::uint64_t seed = 0;
    bool converged = false;
};

// argmin_k (1/2||x - a_k||^2 - psi_k), 1-based; UNRESOLVED when the two best
// scores tie within 1e-12. Throws LengthMismatch if psi has the wrong length.
int laguerre_assign(const Point& x, const AtomSet& atoms, const std::vector<double>& psi);

// Deterministic standard-normal sample block (Box-Muller over mt19937_64):
// count points of dimension d, flattened row-major.
std::vector<double> gaussian_samples(std::uint64_t seed, long count, int d);

// Estimated Laguerre-cell masses of psi under the given flattened sample set.
std::vector<double> estimate_masses(const AtomSet& atoms, const std::vector<double>& psi,
                                    const std::vector<double>& samples);

// Convenience: estimate on a fresh deterministic sample set.
std::vector<double> estimate_masses(const AtomSet& atoms, const std::vector<double>& psi,
                                    std::uint64_t seed, long mc_samples);

// Dual ascent psi_k += eta (1/n - mass_k) with halving backtracking on the
// estimated dual objective, common random numbers throughout; stops at
// residual <= tol or 10^4 iterations. Never throws on non-convergence: the
// best iterate is returned with converged = false.
LaguerreWeights solve_weights(const AtomSet& atoms, long mc_samples = 200000,
                              std::uint64_t seed = 1, double tol = 1e-3);

// laguerre_assign at every grid node; producer tag LAGUERRE.
LabelField tessellate_laguerre(const AtomSet& atoms, const std::vector<double>& psi,
                               const GridSpec& grid);

} // namespace sdfm
