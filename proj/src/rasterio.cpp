#include "sdfm/rasterio.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdfm/errors.hpp"

namespace sdfm {

// Distinct hues for up to 16 labels; chosen for contrast on white.
const std::array<std::array<std::uint8_t, 3>, 16> LABEL_PALETTE = {{
    {31, 119, 180},  // blue
    {255, 127, 14},  // orange
    {44, 160, 44},   // green
    {214, 39, 40},   // red
    {148, 103, 189}, // purple
    {140, 86, 75},   // brown
    {227, 119, 194}, // pink
    {127, 127, 127}, // gray
    {188, 189, 34},  // olive
    {23, 190, 207},  // cyan
    {174, 199, 232}, // light blue
    {255, 187, 120}, // light orange
    {152, 223, 138}, // light green
    {255, 152, 150}, // light red
    {197, 176, 213}, // light purple
    {196, 156, 148}, // light brown
}};

void emit_raster(const LabelField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write raster: " + path);
    out << "P6\n" << field.grid.nx << " " << field.grid.ny << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(field.grid.nx) * 3);
    for (int j = 0; j < field.grid.ny; ++j) {
        for (int i = 0; i < field.grid.nx; ++i) {
            const int l = field.at(i, j);
            std::uint8_t r = 255, g = 255, b = 255; // UNRESOLVED -> white
            if (l != UNRESOLVED) {
                const auto& c = LABEL_PALETTE[static_cast<std::size_t>((l - 1) % 16)];
                r = c[0];
                g = c[1];
                b = c[2];
            }
            row[static_cast<std::size_t>(i) * 3 + 0] = r;
            row[static_cast<std::size_t>(i) * 3 + 1] = g;
            row[static_cast<std::size_t>(i) * 3 + 2] = b;
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

// Shortest-round-trip double formatting (17 significant digits always parses
// back to the same bits).
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void label_field_to_csv(const LabelField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write labels csv: " + path);
    out << "# labels v1\n";
    out << "# producer " << producer_name(field.producer) << " epsilon "
        << fmt_double(field.epsilon) << "\n";
    out << "# grid " << fmt_double(field.grid.lo[0]) << " " << fmt_double(field.grid.hi[0])
        << " " << fmt_double(field.grid.lo[1]) << " " << fmt_double(field.grid.hi[1]) << " "
        << field.grid.nx << " " << field.grid.ny << "\n";
    for (int j = 0; j < field.grid.ny; ++j) {
        for (int i = 0; i < field.grid.nx; ++i) {
            if (i) out << ",";
            out << field.at(i, j);
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

LabelField label_field_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read labels csv: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# labels", 0) != 0)
        throw IoError("bad labels csv header: " + path);

    LabelField field;
    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    int nx = 0, ny = 0;
    if (!std::getline(in, line)) throw IoError("truncated labels csv: " + path);
    {
        std::istringstream ls(line);
        std::string hash, key, name, eps_key;
        double eps = 0.0;
        if (!(ls >> hash >> key >> name >> eps_key >> eps) || key != "producer")
            throw IoError("bad producer line: " + path);
        field.producer = producer_from_name(name);
        field.epsilon = eps;
    }
    if (!std::getline(in, line)) throw IoError("truncated labels csv: " + path);
    {
        std::istringstream ls(line);
        std::string hash, key;
        if (!(ls >> hash >> key >> xlo >> xhi >> ylo >> yhi >> nx >> ny) || key != "grid")
            throw IoError("bad grid line: " + path);
    }
    field.grid = make_grid(xlo, xhi, ylo, yhi, nx, ny);
    field.labels.reserve(static_cast<std::size_t>(field.grid.node_count()));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) field.labels.push_back(std::stoi(cell));
    }
    if (field.labels.size() != static_cast<std::size_t>(field.grid.node_count()))
        throw IoError("label count does not match grid: " + path);
    return field;
}

void trajectory_to_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trajectory csv: " + path);
    const std::size_t d = traj.states.empty() ? 0 : traj.states[0].size();
    out << "t";
    for (std::size_t i = 0; i < d; ++i) out << ",x" << i;
    out << ",captured\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        out << fmt_double(traj.times[s]);
        for (std::size_t i = 0; i < d; ++i) out << "," << fmt_double(traj.states[s][i]);
        const bool past_capture = traj.capture && traj.times[s] >= traj.capture->time;
        out << "," << (past_capture ? traj.capture->atom : 0) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void weights_to_csv(const LaguerreWeights& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write weights csv: " + path);
    out << "k,psi_k,mass_k\n";
    for (std::size_t k = 0; k < w.psi.size(); ++k)
        out << (k + 1) << "," << fmt_double(w.psi[k]) << "," << fmt_double(w.masses[k]) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

void center_curves_to_csv(const std::vector<CenterCurve>& curves, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write center-curve csv: " + path);
    const std::size_t d = curves.empty() || curves[0].samples.empty()
                              ? 0
                              : curves[0].samples[0].second.size();
    out << "k,t";
    for (std::size_t i = 0; i < d; ++i) out << ",x" << i;
    out << "\n";
    for (const auto& c : curves) {
        for (const auto& [t, p] : c.samples) {
            out << c.atom << "," << fmt_double(t);
            for (std::size_t i = 0; i < d; ++i) out << "," << fmt_double(p[i]);
            out << "\n";
        }
        out << c.atom << ",limit";
        for (std::size_t i = 0; i < d; ++i) out << "," << fmt_double(c.limit[i]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace sdfm
