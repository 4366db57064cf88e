#pragma once

// Grid-level topological and geometric diagnostics of a LabelField.
//
// Connectivity convention: 8-connectivity for a label's nodes,
// 4-connectivity for its complement (the standard dual pairing on pixel
// grids). All verdicts are "at grid resolution": they corroborate continuum
// statements but cannot prove them.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/flow.hpp"
#include "sdfm/geom.hpp"

namespace sdfm {

// Number of 8-connected components of {nodes with label k}.
int connected_components(const LabelField& field, int k);

// Number of 4-connected components of the complement of label k that do not
// touch the grid boundary.
int hole_count(const LabelField& field, int k);

// Unordered pairs of distinct definite labels that touch: 8-neighbors, or
// 8-neighbors-but-one with a single UNRESOLVED node in between (cell
// boundaries rasterize to UNRESOLVED, which must not hide adjacency).
std::set<std::pair<int, int>> adjacency(const LabelField& field);

// Grid-coordinate witness that label k is not convex: two label-k nodes whose
// rasterized segment passes through an interior node of a different definite
// label. "Interior" = all 8 neighbors share that node's label, which filters
// out staircase artifacts of rasterized straight boundaries.
struct ConvexityWitness {
    std::pair<int, int> p1, p2; // the two label-k nodes (grid indices)
    std::pair<int, int> hit;    // the violating node on the segment
    int hit_label = 0;
};

std::optional<ConvexityWitness> convexity_witness(const LabelField& field, int k);

// For each definite label k: over all its nodes, count interior nodes of other
// labels encountered on the rasterized segment from the node to a_k.
// Index 0 of the result is unused; entry k is the violation count for label k.
std::vector<long> star_shape_violations(const LabelField& field, const AtomSet& atoms);

// Probes boundedness: direction u is attributed to label l if the assigner
// returns l (definite, identical) at R*u for every radius R.
// Returns label -> directions attributed to it.
std::map<int, std::vector<Point>> unbounded_probe(
    const std::function<int(const Point&)>& assigner,
    const std::vector<Point>& directions,
    const std::vector<double>& radii = {8.0, 16.0, 32.0});

// m unit vectors evenly spaced over the circle.
std::vector<Point> sampled_directions(int m);

// Aggregated per-label diagnostics.
struct CellDiagnostics {
    int label = 0;
    int component_count = 0;
    int hole_count = 0;
    std::set<int> adjacent_labels;
    std::vector<Point> unbounded_directions;
    std::optional<ConvexityWitness> convexity;
    long star_shape_violations = 0;
};

// Computes every diagnostic for label k on the given field. The assigner is
// used only for the unbounded probe (pass nullptr to skip it).
CellDiagnostics compute_diagnostics(const LabelField& field, int k, const AtomSet& atoms,
                                    const std::function<int(const Point&)>& assigner,
                                    int probe_directions = 64);

} // namespace sdfm
