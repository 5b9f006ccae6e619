#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaoskit/kernel.hpp"

namespace chaoskit {

/// One bimolecular reaction in normalized form: both the input pair and the
/// output pair are stored in ascending species order.
struct Reaction {
    int in_a = 0, in_b = 0;    // input pair (k, l), k <= l
    int out_a = 0, out_b = 0;  // output pair (k', l'), k' <= l'
    std::string kernel_name;

    bool operator==(const Reaction&) const = default;
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                             std::to_string(col_) + ")"),
          line(line_), column(col_) {}
};

/// A validated bimolecular chemical reaction network. Species are indexed
/// 1..n_species; names are a frontend convenience mapped by first appearance.
/// Immutable after construction; safe to share across threads.
class ReactionNetwork {
public:
    ReactionNetwork(std::vector<std::string> species_names, std::vector<Reaction> reactions,
                    std::map<std::string, Kernel> kernel_table);

    int n_species() const { return static_cast<int>(names_.size()); }
    int n_reactions() const { return static_cast<int>(reactions_.size()); }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const std::vector<std::string>& species_names() const { return names_; }
    const std::map<std::string, Kernel>& kernel_table() const { return kernels_; }

    const Kernel& kernel_of(const Reaction& r) const { return kernels_.at(r.kernel_name); }
    const Kernel& kernel_of(int reaction_index) const {
        return kernel_of(reactions_.at(reaction_index));
    }

    /// Sum over reactions of the kernel sup norms.
    double total_linf() const;
    /// Per-reaction L1 norms of the kernels (the mass-action rate constants).
    std::vector<double> rate_constants(int dim) const;

    bool operator==(const ReactionNetwork&) const = default;

private:
    std::vector<std::string> names_;
    std::vector<Reaction> reactions_;
    std::map<std::string, Kernel> kernels_;
};

/// Parses the line-oriented CRN grammar:
///   species: S1, S2, ...                         (optional)
///   kernel <name> = tophat(radius=<f>, rate=<f>) | constant(rate=<f>)
///                 | gaussian(width=<f>, rate=<f>)
///   <name> + <name> -> <name> + <name> @ <kernelname>
///   # comment
/// Input and output pairs are normalized to ascending species order.
ReactionNetwork parse_network(const std::string& text);

/// Canonical textual form; parse_network(pretty_print(net)) == net.
std::string pretty_print(const ReactionNetwork& net);

/// Closure of v0 under the reaction dynamics: repeatedly adds both outputs
/// of every reaction whose input set is contained in the current set.
/// Terminates in at most n_species passes.
std::set<int> closure(const ReactionNetwork& net, const std::set<int>& v0);

class DensityField;

/// True if the species with positive initial mass generate the full species
/// set under closure. Mass threshold 1e-12 guards against grid noise.
bool is_propagating(const ReactionNetwork& net, const DensityField& rho0);

}  // namespace chaoskit
