#pragma once

#include <string>
#include <vector>

#include "sdfm/geom.hpp"

namespace sdfm {

// Immutable set of target atoms a_1..a_n in R^d. min_gap is the minimum
// pairwise distance (+infinity for n = 1); sep_radius is the capture-ball
// radius, strictly below min_gap / 2.
struct AtomSet {
    int dim = 0;
    std::vector<Point> atoms;
    double min_gap = 0.0;
    double sep_radius = 0.0;

    int size() const { return static_cast<int>(atoms.size()); }
    const Point& operator[](int k) const { return atoms[static_cast<std::size_t>(k)]; }
};

// Validates dimensions, rejects duplicates (any pair closer than 1e-12), and
// computes min_gap and the default sep_radius = min_gap / 4.
// Throws DimensionMismatch / DuplicateAtoms.
AtomSet make_atoms(std::vector<Point> points);

// As make_atoms but with an explicit capture radius (must be in (0, min_gap/2)).
AtomSet make_atoms(std::vector<Point> points, double sep_radius);

// The regular-triangle-plus-center configuration used throughout the
// counterexample checks:
//   a_1 = (-1/2,  sqrt(3)/2), a_2 = (-1/2, -sqrt(3)/2), a_3 = (1, 0), a_4 = (0, 0).
// min_gap = 1 (center to vertex), sep_radius = 1/4.
AtomSet four_point_example();

// A fixed, well-separated 10-atom planar configuration in convex position
// (frozen constants, used by the long-running field checks so results are
// reproducible; see the implementation note for why convex position matters).
AtomSet ten_point_example();

// n standard-normal atoms in R^d, deterministic in seed (Box-Muller over
// mt19937_64). Regenerates until the duplicate check passes.
AtomSet random_atoms(unsigned long long seed, int n, int d);

// Reads an atom file: first line "d n", then n lines of d decimals.
AtomSet load_atoms(const std::string& path);

// Applies x -> c * A * x + b to every atom (A given row-major, d x d).
AtomSet transform_atoms(const AtomSet& atoms, double c, const Mat& A, const Point& b);

// Uniform scaling convenience: atoms c * a_k.
AtomSet scale_atoms(const AtomSet& atoms, double c);

} // namespace sdfm
