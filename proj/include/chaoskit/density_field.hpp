#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace chaoskit {

/// Per-species cell-centered densities on a uniform periodic M^d grid over
/// the unit torus. Cell centers sit at ((i_1+0.5)/M, ..., (i_d+0.5)/M) and
/// cells are indexed row-major. Values are probability per unit volume.
class DensityField {
public:
    DensityField() = default;
    DensityField(int dim, int grid_size, int n_species, double time = 0.0);

    int dim() const { return dim_; }
    int grid_size() const { return m_; }
    int n_species() const { return static_cast<int>(data_.size()); }
    std::size_t cells() const { return cells_; }
    double cell_volume() const { return cell_vol_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    /// Grid of one species; species indices are 1-based throughout.
    std::vector<double>& grid(int species) { return data_.at(species - 1); }
    const std::vector<double>& grid(int species) const { return data_.at(species - 1); }

    /// Cell center coordinate along one axis for a flat cell index.
    double center(std::size_t cell, int axis) const;
    /// Flat index from per-axis cell indices.
    std::size_t flat_index(const std::vector<int>& idx) const;

    double species_mass(int species) const;
    double total_mass() const;

    double min_value(int species) const;
    double min_value() const;
    double max_value() const;

    /// Scales all values so the total mass is exactly 1; errors if empty.
    void normalize();

    bool operator==(const DensityField&) const = default;

private:
    int dim_ = 1;
    int m_ = 1;
    std::size_t cells_ = 1;
    double cell_vol_ = 1.0;
    double time_ = 0.0;
    std::vector<std::vector<double>> data_;  // [species][cell]
};

/// Uniform density with the given per-species masses (summing to ~1).
DensityField uniform_field(int dim, int grid_size, const std::vector<double>& masses);

/// Smooth strictly positive profile: species s carries mass masses[s] shaped
/// as 1 + amplitude*cos(2*pi*(x_1 - phase_s)) along the first axis.
DensityField cosine_field(int dim, int grid_size, const std::vector<double>& masses,
                          double amplitude, const std::vector<double>& phases);

/// All mass of one species concentrated in a single cell.
DensityField point_mass_field(int dim, int grid_size, int n_species, int species,
                              std::size_t cell);

/// CSV dump: sidecar line "# M=<int> d=<int>" then "time,species,cell_index,density".
void save_field_csv(const DensityField& f, std::ostream& out);
DensityField load_field_csv(std::istream& in);
DensityField load_field_csv_file(const std::string& path);

}  // namespace chaoskit
