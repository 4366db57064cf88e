#include "sdfm/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "sdfm/errors.hpp"
#include "sdfm/parallel.hpp"

namespace sdfm {

int laguerre_assign(const Point& x, const AtomSet& atoms, const std::vector<double>& psi) {
    if (psi.size() != static_cast<std::size_t>(atoms.size()))
        throw LengthMismatch("laguerre_assign: psi length must equal atom count");
    if (x.size() != static_cast<std::size_t>(atoms.dim))
        throw DimensionMismatch("laguerre_assign: point dimension mismatch");

    double best = std::numeric_limits<double>::infinity();
    double second = best;
    int label = UNRESOLVED;
    for (int k = 0; k < atoms.size(); ++k) {
        const double score = 0.5 * dist2(x, atoms[k]) - psi[static_cast<std::size_t>(k)];
        if (score < best) {
            second = best;
            best = score;
            label = k + 1;
        } else if (score < second) {
            second = score;
        }
    }
    if (atoms.size() > 1 && second - best < 1e-12) return UNRESOLVED;
    return label;
}

std::vector<double> gaussian_samples(std::uint64_t seed, long count, int d) {
    // Explicit Box-Muller over the fully specified mt19937_64 stream, so the
    // sample set is reproducible across standard libraries.
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<double> out(static_cast<std::size_t>(count) * d);
    std::size_t i = 0;
    const std::size_t total = out.size();
    while (i < total) {
        const double u1 = std::max(uniform(), 0x1.0p-60);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i++] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (i < total) out[i++] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    return out;
}

namespace {

// Index of the best (lowest) Laguerre score for one sample; ties go to the
// lowest index, which is measure-zero under the Gaussian anyway.
inline int best_cell(const double* x, const AtomSet& atoms, const std::vector<double>& psi) {
    int best = 0;
    double bs = std::numeric_limits<double>::infinity();
    for (int k = 0; k < atoms.size(); ++k) {
        const auto& a = atoms[k];
        double d2 = 0.0;
        for (int i = 0; i < atoms.dim; ++i) {
            const double diff = x[i] - a[i];
            d2 += diff * diff;
        }
        const double score = 0.5 * d2 - psi[static_cast<std::size_t>(k)];
        if (score < bs) {
            bs = score;
            best = k;
        }
    }
    return best;
}

// Per-chunk partial results combined in chunk order: deterministic regardless
// of worker count.
constexpr long kChunk = 8192;

struct ChunkStats {
    std::vector<long> counts;  // per-cell sample counts
    double score_sum = 0.0;    // sum of min_k scores
};

std::vector<ChunkStats> chunk_stats(const AtomSet& atoms, const std::vector<double>& psi,
                                    const std::vector<double>& samples) {
    const int d = atoms.dim;
    const long count = static_cast<long>(samples.size()) / d;
    const long nchunks = (count + kChunk - 1) / kChunk;
    std::vector<ChunkStats> stats(static_cast<std::size_t>(nchunks));
    parallel_for(nchunks, [&](long c) {
        ChunkStats s;
        s.counts.assign(static_cast<std::size_t>(atoms.size()), 0);
        const long begin = c * kChunk;
        const long end = std::min(count, begin + kChunk);
        for (long i = begin; i < end; ++i) {
            const double* x = samples.data() + static_cast<std::size_t>(i) * d;
            const int k = best_cell(x, atoms, psi);
            ++s.counts[static_cast<std::size_t>(k)];
            double d2 = 0.0;
            for (int j = 0; j < d; ++j) {
                const double diff = x[j] - atoms[k][static_cast<std::size_t>(j)];
                d2 += diff * diff;
            }
            s.score_sum += 0.5 * d2 - psi[static_cast<std::size_t>(k)];
        }
        stats[static_cast<std::size_t>(c)] = std::move(s);
    });
    return stats;
}

std::vector<double> masses_from(const std::vector<ChunkStats>& stats, int n, long count) {
    std::vector<long> totals(static_cast<std::size_t>(n), 0);
    for (const auto& s : stats)
        for (int k = 0; k < n; ++k) totals[static_cast<std::size_t>(k)] += s.counts[static_cast<std::size_t>(k)];
    std::vector<double> masses(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        masses[static_cast<std::size_t>(k)] =
            static_cast<double>(totals[static_cast<std::size_t>(k)]) / static_cast<double>(count);
    return masses;
}

// Estimated dual objective F(psi) = mean_i min_k score_ik + (1/n) sum_k psi_k.
double objective_from(const std::vector<ChunkStats>& stats, const std::vector<double>& psi,
                      long count) {
    double score = 0.0;
    for (const auto& s : stats) score += s.score_sum;
    double psi_sum = 0.0;
    for (double p : psi) psi_sum += p;
    return score / static_cast<double>(count) + psi_sum / static_cast<double>(psi.size());
}

double residual_from(const std::vector<double>& masses) {
    const double target = 1.0 / static_cast<double>(masses.size());
    double r = 0.0;
    for (double m : masses) r = std::max(r, std::abs(m - target));
    return r;
}

} // namespace

std::vector<double> estimate_masses(const AtomSet& atoms, const std::vector<double>& psi,
                                    const std::vector<double>& samples) {
    if (psi.size() != static_cast<std::size_t>(atoms.size()))
        throw LengthMismatch("estimate_masses: psi length must equal atom count");
    const long count = static_cast<long>(samples.size()) / atoms.dim;
    return masses_from(chunk_stats(atoms, psi, samples), atoms.size(), count);
}

std::vector<double> estimate_masses(const AtomSet& atoms, const std::vector<double>& psi,
                                    std::uint64_t seed, long mc_samples) {
    return estimate_masses(atoms, psi, gaussian_samples(seed, mc_samples, atoms.dim));
}

LaguerreWeights solve_weights(const AtomSet& atoms, long mc_samples, std::uint64_t seed,
                              double tol) {
    if (mc_samples < 10000) throw Error("solve_weights: mc_samples must be >= 1e4");
    if (tol < 1e-4) throw Error("solve_weights: tol must be >= 1e-4");

    const int n = atoms.size();
    const double target = 1.0 / n;
    const std::vector<double> samples = gaussian_samples(seed, mc_samples, atoms.dim);

    LaguerreWeights best;
    best.mc_samples = mc_samples;
    best.seed = seed;

    std::vector<double> psi(static_cast<std::size_t>(n), 0.0);
    auto stats = chunk_stats(atoms, psi, samples);
    std::vector<double> masses = masses_from(stats, n, mc_samples);
    double objective = objective_from(stats, psi, mc_samples);
    double residual = residual_from(masses);

    best.psi = psi;
    best.masses = masses;
    best.residual = residual;

    constexpr int kMaxIterations = 10000;
    int it = 0;
    for (; it < kMaxIterations && residual > tol; ++it) {
        // Ascent direction: target mass minus current mass.
        std::vector<double> grad(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) grad[static_cast<std::size_t>(k)] = target - masses[static_cast<std::size_t>(k)];

        // Backtracking on the common-sample objective (concave, piecewise
        // linear): accept the first step that does not decrease it.
        double eta = 1.0;
        bool accepted = false;
        std::vector<double> trial(static_cast<std::size_t>(n));
        while (eta > 1e-12) {
            for (int k = 0; k < n; ++k)
                trial[static_cast<std::size_t>(k)] =
                    psi[static_cast<std::size_t>(k)] + eta * grad[static_cast<std::size_t>(k)];
            auto trial_stats = chunk_stats(atoms, trial, samples);
            const double trial_obj = objective_from(trial_stats, trial, mc_samples);
            if (trial_obj >= objective) {
                psi = trial;
                stats = std::move(trial_stats);
                objective = trial_obj;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break; // flat to machine precision; cannot improve

        masses = masses_from(stats, n, mc_samples);
        residual = residual_from(masses);
        if (residual < best.residual) {
            best.psi = psi;
            best.masses = masses;
            best.residual = residual;
        }
    }

    best.iterations = it;
    best.converged = best.residual <= tol;

    // Fix the dual gauge: min_k psi_k = 0.
    const double mn = *std::min_element(best.psi.begin(), best.psi.end());
    for (auto& p : best.psi) p -= mn;
    return best;
}

LabelField tessellate_laguerre(const AtomSet& atoms, const std::vector<double>& psi,
                               const GridSpec& grid) {
    if (atoms.dim != 2) throw DimensionMismatch("tessellate_laguerre needs 2D atoms");
    LabelField field;
    field.grid = grid;
    field.labels.assign(static_cast<std::size_t>(grid.node_count()), UNRESOLVED);
    field.producer = Producer::LAGUERRE;

    parallel_for(grid.node_count(), [&](long idx) {
        const int i = static_cast<int>(idx % grid.nx);
        const int j = static_cast<int>(idx / grid.nx);
        field.labels[static_cast<std::size_t>(idx)] =
            laguerre_assign({grid.x(i), grid.y(j)}, atoms, psi);
    });
    return field;
}

} // namespace sdfm
