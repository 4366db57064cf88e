#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdfm/geom.hpp"

namespace sdfm {

// Integration / capture configuration for the flow solver.
struct FlowConfig {
    double epsilon = 0.0;       // mixture standard deviation; 0 = exact semi-discrete
    double tau_max = 40.0;      // log-time horizon for the eps=0 path (1-t = e^-tau)
    double rel_tol = 1e-9;      // adaptive stepper relative tolerance
    double abs_tol = 1e-12;     // adaptive stepper absolute tolerance
    double capture_alpha = 1e-12; // capture requires alpha_k >= 1 - capture_alpha
    long max_steps = 1000000;   // hard step cap per integration
};

// Axis-aligned 2D evaluation lattice: nodes are evenly spaced with both box
// corners included, node(0,0) at lo and node(nx-1, ny-1) at hi.
struct GridSpec {
    Point lo;   // 2D lower corner
    Point hi;   // 2D upper corner
    int nx = 0; // nodes along x
    int ny = 0; // nodes along y

    double dx() const { return nx > 1 ? (hi[0] - lo[0]) / (nx - 1) : 0.0; }
    double dy() const { return ny > 1 ? (hi[1] - lo[1]) / (ny - 1) : 0.0; }

    double x(int i) const { return nx > 1 ? lo[0] + i * (hi[0] - lo[0]) / (nx - 1) : lo[0]; }
    double y(int j) const { return ny > 1 ? lo[1] + j * (hi[1] - lo[1]) / (ny - 1) : lo[1]; }

    long node_count() const { return static_cast<long>(nx) * ny; }
};

GridSpec make_grid(double xlo, double xhi, double ylo, double yhi, int nx, int ny);

// Label value for nodes whose assignment could not be resolved (uncaptured
// boundary trajectories, nearest-atom ties). Definite labels are 1..n.
inline constexpr int UNRESOLVED = 0;

enum class Producer { FM, FM_EPS, LAGUERRE, NEAREST_TERMINAL };

std::string producer_name(Producer p);
Producer producer_from_name(const std::string& name);

// Rasterized assignment: labels[j * nx + i] is the label at grid node (i, j),
// row-major from the lo corner.
struct LabelField {
    GridSpec grid;
    std::vector<int> labels;
    Producer producer = Producer::FM;
    double epsilon = 0.0; // meaningful for FM_EPS

    int at(int i, int j) const { return labels[static_cast<std::size_t>(j) * grid.nx + i]; }
    int& at(int i, int j) { return labels[static_cast<std::size_t>(j) * grid.nx + i]; }
    bool in_bounds(int i, int j) const {
        return i >= 0 && i < grid.nx && j >= 0 && j < grid.ny;
    }
    int max_label() const;
};

} // namespace sdfm
