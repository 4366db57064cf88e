#include "sdfm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>

namespace sdfm {

namespace {

constexpr int DX8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int DY8[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int DX4[4] = {1, 0, -1, 0};
constexpr int DY4[4] = {0, 1, 0, -1};

// Flood fill over the mask (true = member) from seed, marking visited.
// conn8 selects 8- vs 4-connectivity. Returns whether the component touches
// the grid boundary.
bool flood(const LabelField& f, std::vector<char>& visited, const std::vector<char>& mask,
           int si, int sj, bool conn8) {
    const int nx = f.grid.nx, ny = f.grid.ny;
    bool touches_boundary = false;
    std::queue<std::pair<int, int>> q;
    q.emplace(si, sj);
    visited[static_cast<std::size_t>(sj) * nx + si] = 1;
    while (!q.empty()) {
        auto [i, j] = q.front();
        q.pop();
        if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) touches_boundary = true;
        const int ndirs = conn8 ? 8 : 4;
        for (int dir = 0; dir < ndirs; ++dir) {
            const int ni = i + (conn8 ? DX8[dir] : DX4[dir]);
            const int nj = j + (conn8 ? DY8[dir] : DY4[dir]);
            if (ni < 0 || nj < 0 || ni >= nx || nj >= ny) continue;
            const std::size_t nidx = static_cast<std::size_t>(nj) * nx + ni;
            if (visited[nidx] || !mask[nidx]) continue;
            visited[nidx] = 1;
            q.emplace(ni, nj);
        }
    }
    return touches_boundary;
}

} // namespace

int connected_components(const LabelField& field, int k) {
    const int nx = field.grid.nx, ny = field.grid.ny;
    std::vector<char> mask(field.labels.size());
    for (std::size_t i = 0; i < field.labels.size(); ++i) mask[i] = field.labels[i] == k;
    std::vector<char> visited(field.labels.size(), 0);
    int components = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
            if (mask[idx] && !visited[idx]) {
                ++components;
                flood(field, visited, mask, i, j, /*conn8=*/true);
            }
        }
    return components;
}

int hole_count(const LabelField& field, int k) {
    const int nx = field.grid.nx, ny = field.grid.ny;
    std::vector<char> mask(field.labels.size());
    for (std::size_t i = 0; i < field.labels.size(); ++i) mask[i] = field.labels[i] != k;
    std::vector<char> visited(field.labels.size(), 0);
    int holes = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
            if (mask[idx] && !visited[idx]) {
                if (!flood(field, visited, mask, i, j, /*conn8=*/false)) ++holes;
            }
        }
    return holes;
}

std::set<std::pair<int, int>> adjacency(const LabelField& field) {
    const int nx = field.grid.nx, ny = field.grid.ny;
    std::set<std::pair<int, int>> pairs;
    auto record = [&pairs](int a, int b) {
        if (a == UNRESOLVED || b == UNRESOLVED || a == b) return;
        pairs.emplace(std::min(a, b), std::max(a, b));
    };
    // Canonical half of the 8 directions; scanning every node covers both
    // orientations. A single UNRESOLVED node between two definite labels is
    // transparent (boundaries rasterize to UNRESOLVED).
    constexpr int CDX[4] = {1, 1, 0, -1};
    constexpr int CDY[4] = {0, 1, 1, 1};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int a = field.at(i, j);
            if (a == UNRESOLVED) continue;
            for (int dir = 0; dir < 4; ++dir) {
                const int i1 = i + CDX[dir], j1 = j + CDY[dir];
                if (!field.in_bounds(i1, j1)) continue;
                const int b = field.at(i1, j1);
                if (b != UNRESOLVED) {
                    record(a, b);
                } else {
                    const int i2 = i + 2 * CDX[dir], j2 = j + 2 * CDY[dir];
                    if (field.in_bounds(i2, j2)) record(a, field.at(i2, j2));
                }
            }
        }
    return pairs;
}

namespace {

// True when all 8 neighbors of (i, j) exist and carry the same label.
bool is_interior(const LabelField& f, int i, int j, int label) {
    for (int dir = 0; dir < 8; ++dir) {
        const int ni = i + DX8[dir], nj = j + DY8[dir];
        if (!f.in_bounds(ni, nj) || f.at(ni, nj) != label) return false;
    }
    return true;
}

long long cross(long long ox, long long oy, long long ax, long long ay, long long bx,
                long long by) {
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

// Andrew monotone chain over integer points; returns CCW hull.
std::vector<std::pair<int, int>> convex_hull(std::vector<std::pair<int, int>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<std::pair<int, int>> hull(2 * n);
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (h >= 2 && cross(hull[h - 2].first, hull[h - 2].second, hull[h - 1].first,
                               hull[h - 1].second, pts[i].first, pts[i].second) <= 0)
            --h;
        hull[h++] = pts[i];
    }
    const std::size_t lower = h + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (h >= lower && cross(hull[h - 2].first, hull[h - 2].second, hull[h - 1].first,
                                   hull[h - 1].second, pts[i].first, pts[i].second) <= 0)
            --h;
        hull[h++] = pts[i];
    }
    hull.resize(h - 1);
    return hull;
}

bool strictly_inside_hull(const std::vector<std::pair<int, int>>& hull, int x, int y) {
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        if (cross(a.first, a.second, b.first, b.second, x, y) <= 0) return false;
    }
    return true;
}

// Nodes visited by the rounded line rasterization from (x0,y0) to (x1,y1) in
// grid coordinates (doubles allowed: atom positions are off-lattice).
std::vector<std::pair<int, int>> raster_segment(double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0, dy = y1 - y0;
    const int m = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
    std::vector<std::pair<int, int>> nodes;
    nodes.reserve(static_cast<std::size_t>(m) + 1);
    for (int s = 0; s <= m; ++s) {
        const double f = static_cast<double>(s) / m;
        const int xi = static_cast<int>(std::llround(x0 + f * dx));
        const int yi = static_cast<int>(std::llround(y0 + f * dy));
        if (nodes.empty() || nodes.back() != std::make_pair(xi, yi)) nodes.emplace_back(xi, yi);
    }
    return nodes;
}

} // namespace

std::optional<ConvexityWitness> convexity_witness(const LabelField& field, int k) {
    const int nx = field.grid.nx, ny = field.grid.ny;

    std::vector<std::pair<int, int>> members;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (field.at(i, j) == k) members.emplace_back(i, j);
    if (members.size() < 2) return std::nullopt;

    const auto hull = convex_hull(members);

    // Candidate violations: interior nodes of other labels strictly inside the
    // hull of the k-nodes. For a convex cell the hull stays inside the cell,
    // so no candidates exist and the scan is immediate.
    std::vector<char> is_member(field.labels.size(), 0);
    for (const auto& [i, j] : members) is_member[static_cast<std::size_t>(j) * nx + i] = 1;

    for (int qj = 0; qj < ny; ++qj)
        for (int qi = 0; qi < nx; ++qi) {
            const int ql = field.at(qi, qj);
            if (ql == UNRESOLVED || ql == k) continue;
            if (!strictly_inside_hull(hull, qi, qj)) continue;
            if (!is_interior(field, qi, qj, ql)) continue;

            // Look for two k-nodes exactly collinear with q, on opposite
            // sides. Walk candidate endpoints along the primitive direction.
            for (const auto& [pi, pj] : members) {
                int ex = qi - pi, ey = qj - pj;
                const int g = std::gcd(std::abs(ex), std::abs(ey));
                if (g == 0) continue;
                ex /= g;
                ey /= g;
                for (int s = 1;; ++s) {
                    const int ri = qi + s * ex, rj = qj + s * ey;
                    if (!field.in_bounds(ri, rj)) break;
                    if (is_member[static_cast<std::size_t>(rj) * nx + ri]) {
                        // Exact collinear lattice points: the rasterized
                        // segment provably passes through q; verify anyway.
                        const auto seg = raster_segment(pi, pj, ri, rj);
                        if (std::find(seg.begin(), seg.end(), std::make_pair(qi, qj)) !=
                            seg.end()) {
                            ConvexityWitness w;
                            w.p1 = {pi, pj};
                            w.p2 = {ri, rj};
                            w.hit = {qi, qj};
                            w.hit_label = ql;
                            return w;
                        }
                        break;
                    }
                }
            }
        }
    return std::nullopt;
}

std::vector<long> star_shape_violations(const LabelField& field, const AtomSet& atoms) {
    const int nx = field.grid.nx, ny = field.grid.ny;
    const auto& g = field.grid;
    std::vector<long> violations(static_cast<std::size_t>(atoms.size()) + 1, 0);

    // Atom positions in grid coordinates.
    std::vector<std::pair<double, double>> agrid;
    agrid.reserve(static_cast<std::size_t>(atoms.size()));
    for (int k = 0; k < atoms.size(); ++k)
        agrid.emplace_back((atoms[k][0] - g.lo[0]) / g.dx(), (atoms[k][1] - g.lo[1]) / g.dy());

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k = field.at(i, j);
            if (k == UNRESOLVED || k > atoms.size()) continue;
            const auto [ax, ay] = agrid[static_cast<std::size_t>(k) - 1];
            const auto seg = raster_segment(i, j, ax, ay);
            for (const auto& [si, sj] : seg) {
                if (si == i && sj == j) continue;
                if (!field.in_bounds(si, sj)) continue;
                const int l = field.at(si, sj);
                if (l == UNRESOLVED || l == k) continue;
                // Count only interior hits: grazing a rasterized boundary
                // staircase is resolution noise, crossing another cell is not.
                if (is_interior(field, si, sj, l)) ++violations[static_cast<std::size_t>(k)];
            }
        }
    return violations;
}

std::map<int, std::vector<Point>> unbounded_probe(
    const std::function<int(const Point&)>& assigner, const std::vector<Point>& directions,
    const std::vector<double>& radii) {
    std::map<int, std::vector<Point>> attributed;
    for (const auto& u : directions) {
        int label = UNRESOLVED;
        bool consistent = true;
        for (double r : radii) {
            const int l = assigner(r * u);
            if (l == UNRESOLVED || (label != UNRESOLVED && l != label)) {
                consistent = false;
                break;
            }
            label = l;
        }
        if (consistent && label != UNRESOLVED) attributed[label].push_back(u);
    }
    return attributed;
}

std::vector<Point> sampled_directions(int m) {
    std::vector<Point> dirs;
    dirs.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double a = 2.0 * std::numbers::pi * i / m;
        double cx = std::cos(a), cy = std::sin(a);
        // Snap the cardinal directions exactly: sin/cos of multiples of pi/2
        // leave ~1e-16 residue that would push probe points off axis rays.
        if (std::abs(cx) < 1e-12) cx = 0.0;
        if (std::abs(cy) < 1e-12) cy = 0.0;
        if (std::abs(std::abs(cx) - 1.0) < 1e-12) cx = cx < 0 ? -1.0 : 1.0;
        if (std::abs(std::abs(cy) - 1.0) < 1e-12) cy = cy < 0 ? -1.0 : 1.0;
        dirs.push_back({cx, cy});
    }
    return dirs;
}

CellDiagnostics compute_diagnostics(const LabelField& field, int k, const AtomSet& atoms,
                                    const std::function<int(const Point&)>& assigner,
                                    int probe_directions) {
    CellDiagnostics d;
    d.label = k;
    d.component_count = connected_components(field, k);
    d.hole_count = sdfm::hole_count(field, k);
    for (const auto& [a, b] : adjacency(field)) {
        if (a == k) d.adjacent_labels.insert(b);
        if (b == k) d.adjacent_labels.insert(a);
    }
    d.convexity = convexity_witness(field, k);
    d.star_shape_violations = star_shape_violations(field, atoms)[static_cast<std::size_t>(k)];
    if (assigner) {
        auto attributed = unbounded_probe(assigner, sampled_directions(probe_directions));
        if (auto it = attributed.find(k); it != attributed.end())
            d.unbounded_directions = it->second;
    }
    return d;
}

} // namespace sdfm
