#include "sdfm/atoms.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "sdfm/errors.hpp"

namespace sdfm {

namespace {

constexpr double kDuplicateThreshold = 1e-12;

AtomSet finish(std::vector<Point> points, double sep_radius, bool sep_given) {
    if (points.empty()) throw DimensionMismatch("atom set must be non-empty");
    const std::size_t d = points[0].size();
    if (d == 0) throw DimensionMismatch("atoms must have dimension >= 1");
    for (const auto& p : points)
        if (p.size() != d)
            throw DimensionMismatch("all atoms must share one dimension");

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double g = dist(points[i], points[j]);
            if (g < kDuplicateThreshold) {
                std::ostringstream os;
                os << "atoms " << i << " and " << j << " coincide (distance " << g << ")";
                throw DuplicateAtoms(os.str());
            }
            min_gap = std::min(min_gap, g);
        }

    AtomSet s;
    s.dim = static_cast<int>(d);
    s.atoms = std::move(points);
    s.min_gap = min_gap; // +inf for n = 1
    if (sep_given) {
        if (!(sep_radius > 0.0) || !(sep_radius < 0.5 * min_gap))
            throw Error("sep_radius must lie in (0, min_gap/2)");
        s.sep_radius = sep_radius;
    } else {
        s.sep_radius = 0.25 * min_gap;
    }
    return s;
}

} // namespace

AtomSet make_atoms(std::vector<Point> points) {
    return finish(std::move(points), 0.0, false);
}

AtomSet make_atoms(std::vector<Point> points, double sep_radius) {
    return finish(std::move(points), sep_radius, true);
}

AtomSet four_point_example() {
    const double s = std::numbers::sqrt3 / 2.0;
    return make_atoms({{-0.5, s}, {-0.5, -s}, {1.0, 0.0}, {0.0, 0.0}});
}

AtomSet ten_point_example() {
    // Ten atoms in convex position (jittered circle of radius ~1.7), frozen as
    // literals so every build and platform sees the identical configuration.
    // min_gap ~ 0.897, all coordinates within [-1.9, 1.9]. Convex position
    // matters for the raster topology checks: a cell whose atom lies inside
    // the convex hull of the others has no far-field cone, only arms whose
    // width decays like exp(-c r^2), and those alias into isolated specks at
    // any fixed grid resolution. With every atom a hull vertex each cell owns
    // an open cone of directions and stays wider than the node spacing.
    return make_atoms({
        {1.8373092206321289, 0.04301468370607655},
        {1.3818256446012442, 1.1145118197904718},
        {0.3741816148694863, 1.6498313471641755},
        {-0.5771938346019223, 1.5827148937465705},
        {-1.4317431203175877, 1.0034383737905366},
        {-1.7478096217825443, 0.014040708155435006},
        {-1.406896854218139, -1.1039674906216812},
        {-0.4909108316874143, -1.6654970718664575},
        {0.5930608141666494, -1.6754743579077447},
        {1.3484314690083705, -1.191352872639639},
    });
}

AtomSet random_atoms(unsigned long long seed, int n, int d) {
    if (n < 1 || d < 1) throw DimensionMismatch("random_atoms needs n >= 1, d >= 1");
    std::mt19937_64 rng(seed);
    auto next_uniform = [&rng]() {
        // 53-bit mantissa uniform in [0, 1); explicit so the stream is fully
        // specified by the engine, not by library-dependent distributions.
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<Point> pts;
        pts.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            Point p(static_cast<std::size_t>(d));
            for (int j = 0; j < d; j += 2) {
                // Box-Muller; u1 pushed away from 0 to keep log finite.
                const double u1 = std::max(next_uniform(), 0x1.0p-60);
                const double u2 = next_uniform();
                const double r = std::sqrt(-2.0 * std::log(u1));
                p[static_cast<std::size_t>(j)] = r * std::cos(2.0 * std::numbers::pi * u2);
                if (j + 1 < d)
                    p[static_cast<std::size_t>(j + 1)] =
                        r * std::sin(2.0 * std::numbers::pi * u2);
            }
            pts.push_back(std::move(p));
        }
        try {
            return make_atoms(std::move(pts));
        } catch (const DuplicateAtoms&) {
            // astronomically unlikely; redraw
        }
    }
    throw DuplicateAtoms("random_atoms: could not draw a duplicate-free set");
}

AtomSet load_atoms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open atom file: " + path);
    int d = 0, n = 0;
    if (!(in >> d >> n) || d < 1 || n < 1)
        throw Error("atom file must start with 'd n': " + path);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Point p(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            if (!(in >> p[static_cast<std::size_t>(j)]))
                throw Error("atom file truncated: " + path);
        pts.push_back(std::move(p));
    }
    return make_atoms(std::move(pts));
}

AtomSet transform_atoms(const AtomSet& atoms, double c, const Mat& A, const Point& b) {
    if (A.rows() != static_cast<std::size_t>(atoms.dim) ||
        A.cols() != static_cast<std::size_t>(atoms.dim) ||
        b.size() != static_cast<std::size_t>(atoms.dim))
        throw DimensionMismatch("transform_atoms: A/b dimensions must match atoms");
    std::vector<Point> pts;
    pts.reserve(atoms.atoms.size());
    for (const auto& a : atoms.atoms) {
        Point y = A.apply(a);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = c * y[i] + b[i];
        pts.push_back(std::move(y));
    }
    return make_atoms(std::move(pts));
}

AtomSet scale_atoms(const AtomSet& atoms, double c) {
    std::vector<Point> pts;
    pts.reserve(atoms.atoms.size());
    for (const auto& a : atoms.atoms) pts.push_back(c * a);
    return make_atoms(std::move(pts));
}

} // namespace sdfm
