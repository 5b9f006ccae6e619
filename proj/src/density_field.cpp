#include "chaoskit/density_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chaoskit {

DensityField::DensityField(int dim, int grid_size, int n_species, double time)
    : dim_(dim), m_(grid_size), time_(time) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("DensityField: dim must be 1..3");
    if (grid_size < 1) throw std::invalid_argument("DensityField: grid_size must be >= 1");
    if (n_species < 1) throw std::invalid_argument("DensityField: need at least one species");
    cells_ = 1;
    for (int c = 0; c < dim; ++c) cells_ *= static_cast<std::size_t>(grid_size);
    cell_vol_ = 1.0 / static_cast<double>(cells_);
    data_.assign(static_cast<std::size_t>(n_species), std::vector<double>(cells_, 0.0));
}

double DensityField::center(std::size_t cell, int axis) const {
    // row-major: axis 0 is the slowest-varying index
    std::size_t stride = 1;
    for (int a = dim_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(m_);
    std::size_t idx = (cell / stride) % static_cast<std::size_t>(m_);
    return (static_cast<double>(idx) + 0.5) / static_cast<double>(m_);
}

std::size_t DensityField::flat_index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a)
        flat = flat * static_cast<std::size_t>(m_) + static_cast<std::size_t>(idx.at(a));
    return flat;
}

double DensityField::species_mass(int species) const {
    double s = 0.0;
    for (double v : grid(species)) s += v;
    return s * cell_vol_;
}

double DensityField::total_mass() const {
    double s = 0.0;
    for (int sp = 1; sp <= n_species(); ++sp) s += species_mass(sp);
    return s;
}

double DensityField::min_value(int species) const {
    const auto& g = grid(species);
    return *std::min_element(g.begin(), g.end());
}

double DensityField::min_value() const {
    double m = grid(1).front();
    for (const auto& g : data_)
        for (double v : g) m = std::min(m, v);
    return m;
}

double DensityField::max_value() const {
    double m = grid(1).front();
    for (const auto& g : data_)
        for (double v : g) m = std::max(m, v);
    return m;
}

void DensityField::normalize() {
    double mass = total_mass();
    if (mass <= 0.0) throw std::invalid_argument("normalize: nonpositive total mass");
    for (auto& g : data_)
        for (double& v : g) v /= mass;
}

DensityField uniform_field(int dim, int grid_size, const std::vector<double>& masses) {
    DensityField f(dim, grid_size, static_cast<int>(masses.size()));
    for (int s = 1; s <= f.n_species(); ++s) {
        double density = masses[static_cast<std::size_t>(s - 1)];  // mass / volume(=1)
        std::ranges::fill(f.grid(s), density);
    }
    return f;
}

DensityField cosine_field(int dim, int grid_size, const std::vector<double>& masses,
                          double amplitude, const std::vector<double>& phases) {
    if (std::abs(amplitude) >= 1.0)
        throw std::invalid_argument("cosine_field: |amplitude| must be < 1 for positivity");
    DensityField f(dim, grid_size, static_cast<int>(masses.size()));
    using std::numbers::pi;
    for (int s = 1; s <= f.n_species(); ++s) {
        double phase = phases.empty() ? 0.0 : phases[(s - 1) % phases.size()];
        auto& g = f.grid(s);
        double sum = 0.0;
        for (std::size_t c = 0; c < f.cells(); ++c) {
            double x = f.center(c, 0);
            g[c] = 1.0 + amplitude * std::cos(2.0 * pi * (x - phase));
            sum += g[c];
        }
        // exact discrete mass despite cosine quadrature
        double scale = masses[static_cast<std::size_t>(s - 1)] / (sum * f.cell_volume());
        for (double& v : g) v *= scale;
    }
    return f;
}

DensityField point_mass_field(int dim, int grid_size, int n_species, int species,
                              std::size_t cell) {
    DensityField f(dim, grid_size, n_species);
    f.grid(species).at(cell) = 1.0 / f.cell_volume();
    return f;
}

void save_field_csv(const DensityField& f, std::ostream& out) {
    char buf[64];
    out << "# M=" << f.grid_size() << " d=" << f.dim() << "\n";
    out << "time,species,cell_index,density\n";
    for (int s = 1; s <= f.n_species(); ++s)
        for (std::size_t c = 0; c < f.cells(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", f.grid(s)[c]);
            out << f.time() << "," << s << "," << c << "," << buf << "\n";
        }
}

DensityField load_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("field csv: empty input");
    int m = 0, d = 0;
    if (std::sscanf(line.c_str(), "# M=%d d=%d", &m, &d) != 2)
        throw std::runtime_error("field csv: missing '# M=<int> d=<int>' sidecar line");
    if (!std::getline(in, line)) throw std::runtime_error("field csv: missing header");

    struct Row { double t; int s; std::size_t c; double v; };
    std::vector<Row> rows;
    int max_species = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row r;
        if (std::sscanf(line.c_str(), "%lf,%d,%zu,%lf", &r.t, &r.s, &r.c, &r.v) != 4)
            throw std::runtime_error("field csv: malformed row '" + line + "'");
        max_species = std::max(max_species, r.s);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("field csv: no data rows");
    DensityField f(d, m, max_species, rows.front().t);
    for (const auto& r : rows) {
        if (r.c >= f.cells()) throw std::runtime_error("field csv: cell index out of range");
        f.grid(r.s).at(r.c) = r.v;
    }
    return f;
}

DensityField load_field_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file '" + path + "'");
    return load_field_csv(in);
}

}  // namespace chaoskit
