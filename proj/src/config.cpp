#include "sdfm/config.hpp"

#include <algorithm>

#include "sdfm/errors.hpp"

namespace sdfm {

GridSpec make_grid(double xlo, double xhi, double ylo, double yhi, int nx, int ny) {
    if (!(xlo < xhi) || !(ylo < yhi)) throw Error("grid box must have positive extent");
    if (nx < 1 || ny < 1) throw Error("grid resolution must be >= 1");
    GridSpec g;
    g.lo = {xlo, ylo};
    g.hi = {xhi, yhi};
    g.nx = nx;
    g.ny = ny;
    return g;
}

std::string producer_name(Producer p) {
    switch (p) {
        case Producer::FM: return "FM";
        case Producer::FM_EPS: return "FM_EPS";
        case Producer::LAGUERRE: return "LAGUERRE";
        case Producer::NEAREST_TERMINAL: return "NEAREST_TERMINAL";
    }
    return "FM";
}

Producer producer_from_name(const std::string& name) {
    if (name == "FM") return Producer::FM;
    if (name == "FM_EPS") return Producer::FM_EPS;
    if (name == "LAGUERRE") return Producer::LAGUERRE;
    if (name == "NEAREST_TERMINAL") return Producer::NEAREST_TERMINAL;
    throw Error("unknown producer tag: " + name);
}

int LabelField::max_label() const {
    int m = 0;
    for (int l : labels) m = std::max(m, l);
    return m;
}

} // namespace sdfm
