#include <vector>

#include "doctest.h"
#include "sdfm/atoms.hpp"
#include "sdfm/config.hpp"
#include "sdfm/topology.hpp"

using namespace sdfm;

// builds a field over [0,1]^2 from explicit rows, row 0 = lowest y
static LabelField field_from_rows(const std::vector<std::vector<int>>& rows) {
    LabelField f;
    const int ny = static_cast<int>(rows.size());
    const int nx = static_cast<int>(rows[0].size());
    f.grid = make_grid(0.0, 1.0, 0.0, 1.0, nx, ny);
    for (const auto& r : rows)
        for (int v : r) f.labels.push_back(v);
    return f;
}

TEST_CASE("connected components with 8-connectivity") {
    LabelField f = field_from_rows({
        {1, 1, 0, 2},
        {1, 0, 1, 0},
        {0, 0, 0, 1},
        {2, 0, 0, 1},
    });
    // the label-1 block links diagonally: (2,1) touches (1,0) and (3,2)
    CHECK(connected_components(f, 1) == 1);
    CHECK(connected_components(f, 2) == 2);
    CHECK(connected_components(f, 3) == 0);
}

TEST_CASE("hole counting uses the 4-connected complement") {
    LabelField ring = field_from_rows({
        {1, 1, 1, 0},
        {1, 2, 1, 0},
        {1, 1, 1, 0},
        {0, 0, 0, 0},
    });
    CHECK(connected_components(ring, 1) == 1);
    CHECK(hole_count(ring, 1) == 1); // the enclosed label-2 node
    CHECK(hole_count(ring, 2) == 0); // complement of 2 touches the boundary

    // a missing corner does not open the ring: foreground stays 8-connected
    // through the diagonal, so the 4-connected complement is still trapped
    LabelField corner_gap = field_from_rows({
        {1, 1, 1, 0},
        {1, 0, 1, 0},
        {1, 1, 0, 0},
        {0, 0, 0, 0},
    });
    CHECK(connected_components(corner_gap, 1) == 1);
    CHECK(hole_count(corner_gap, 1) == 1);

    // a missing edge node does open it: the center escapes 4-connectedly
    LabelField edge_gap = field_from_rows({
        {1, 1, 1, 0},
        {1, 0, 1, 0},
        {1, 0, 1, 0},
        {0, 0, 0, 0},
    });
    CHECK(hole_count(edge_gap, 1) == 0);
}

TEST_CASE("adjacency sees through a single unresolved node") {
    LabelField touching = field_from_rows({
        {1, 1, 2, 2},
        {1, 1, 2, 2},
    });
    auto adj = adjacency(touching);
    CHECK(adj.count({1, 2}) == 1);

    LabelField gap1 = field_from_rows({
        {1, 0, 2, 2},
        {1, 0, 2, 2},
    });
    // cell boundaries rasterize to a one-node band of UNRESOLVED; that must
    // not hide the contact
    CHECK(adjacency(gap1).count({1, 2}) == 1);

    LabelField gap2 = field_from_rows({
        {1, 0, 0, 2},
        {1, 0, 0, 2},
    });
    CHECK(adjacency(gap2).empty());
}

TEST_CASE("convexity witness") {
    // two label-1 bars sandwich a label-2 slab; the segment between bar nodes
    // crosses interior label-2 nodes
    std::vector<std::vector<int>> rows(11, std::vector<int>(11, 2));
    rows[0] = std::vector<int>(11, 1);
    rows[10] = std::vector<int>(11, 1);
    LabelField f = field_from_rows(rows);
    auto w = convexity_witness(f, 1);
    REQUIRE(w.has_value());
    CHECK(w->hit_label == 2);
    // the witness hit must be an interior node of label 2
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di)
            CHECK(f.at(w->hit.first + di, w->hit.second + dj) == 2);

    // half planes are convex at grid resolution: no witness on either side
    std::vector<std::vector<int>> half(8, std::vector<int>(8, 1));
    for (auto& r : half)
        for (int i = 4; i < 8; ++i) r[i] = 2;
    LabelField h = field_from_rows(half);
    CHECK(!convexity_witness(h, 1).has_value());
    CHECK(!convexity_witness(h, 2).has_value());
}

TEST_CASE("star shape violations") {
    // atoms placed at the centers of two half planes: every segment to the
    // atom stays inside its own cell
    std::vector<std::vector<int>> half(9, std::vector<int>(9, 1));
    for (auto& r : half)
        for (int i = 5; i < 9; ++i) r[i] = 2;
    LabelField f = field_from_rows(half);
    AtomSet atoms = make_atoms({{0.25, 0.5}, {0.875, 0.5}});
    auto viol = star_shape_violations(f, atoms);
    REQUIRE(viol.size() == 3);
    CHECK(viol[1] == 0);
    CHECK(viol[2] == 0);
}

TEST_CASE("sampled directions snap the cardinals") {
    auto d4 = sampled_directions(4);
    REQUIRE(d4.size() == 4);
    CHECK(d4[0][0] == 1.0);
    CHECK(d4[0][1] == 0.0);
    CHECK(d4[1][0] == 0.0);
    CHECK(d4[1][1] == 1.0);
    CHECK(d4[2][0] == -1.0);
    CHECK(d4[2][1] == 0.0);
    CHECK(d4[3][0] == 0.0);
    CHECK(d4[3][1] == -1.0);
    auto d64 = sampled_directions(64);
    REQUIRE(d64.size() == 64);
    for (const auto& v : d64)
        CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unbounded probe attributes directions by stable far assignment") {
    // right half plane is label 1, the rest label 2; both are unbounded
    auto assigner = [](const Point& p) { return p[0] > 0.0 ? 1 : 2; };
    auto dirs = sampled_directions(8);
    auto attributed = unbounded_probe(assigner, dirs);
    REQUIRE(attributed.count(1) == 1);
    REQUIRE(attributed.count(2) == 1);
    CHECK(attributed[1].size() == 3); // (1,0) and the two snapped diagonals with x>0
    CHECK(attributed[2].size() == 5);

    // a bounded cell gets nothing: label 3 only within radius 5
    auto bounded = [](const Point& p) { return norm(p) < 5.0 ? 3 : 4; };
    auto attr2 = unbounded_probe(bounded, dirs);
    CHECK(attr2.count(3) == 0);
    CHECK(attr2[4].size() == 8);

    // an assigner that flips between radii attributes nothing
    auto flipping = [](const Point& p) { return norm(p) < 12.0 ? 1 : 2; };
    auto attr3 = unbounded_probe(flipping, dirs);
    CHECK(attr3.count(1) == 0);
    CHECK(attr3.count(2) == 0); // disagrees at radius 8 vs 16
}

TEST_CASE("aggregate diagnostics") {
    LabelField f = field_from_rows({
        {1, 1, 2, 2},
        {1, 1, 2, 2},
        {1, 1, 2, 2},
        {1, 1, 2, 2},
    });
    AtomSet atoms = make_atoms({{0.17, 0.5}, {0.83, 0.5}});
    auto assigner = [](const Point& p) { return p[0] > 0.5 ? 2 : 1; };
    CellDiagnostics d = compute_diagnostics(f, 1, atoms, assigner, 8);
    CHECK(d.label == 1);
    CHECK(d.component_count == 1);
    CHECK(d.hole_count == 0);
    CHECK(d.adjacent_labels == std::set<int>{2});
    CHECK(!d.convexity.has_value());
    CHECK(d.star_shape_violations == 0);
    // directions with x-component <= 0.5/32 stay in the left half plane at
    // every probe radius: the three with x < 0 plus the two x = 0 cardinals
    CHECK(d.unbounded_directions.size() == 5);

    // the probe is optional
    CellDiagnostics d2 = compute_diagnostics(f, 2, atoms, nullptr, 8);
    CHECK(d2.unbounded_directions.empty());
}
