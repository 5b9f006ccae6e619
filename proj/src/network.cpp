#include "chaoskit/network.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <tuple>

#include "chaoskit/density_field.hpp"

namespace chaoskit {

namespace {
constexpr int kMaxSpecies = 4096;
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species_names,
                                 std::vector<Reaction> reactions,
                                 std::map<std::string, Kernel> kernel_table)
    : names_(std::move(species_names)),
      reactions_(std::move(reactions)),
      kernels_(std::move(kernel_table)) {
    const int n = n_species();
    std::set<std::tuple<int, int, int, int, std::string>> seen;
    for (const auto& r : reactions_) {
        if (r.in_a < 1 || r.in_b < 1 || r.out_a < 1 || r.out_b < 1 || r.in_a > n ||
            r.in_b > n || r.out_a > n || r.out_b > n)
            throw std::invalid_argument("reaction references species index out of range");
        if (r.in_a > r.in_b || r.out_a > r.out_b)
            throw std::invalid_argument("reaction pairs must be in ascending order");
        if (!kernels_.contains(r.kernel_name))
            throw std::invalid_argument("reaction references unknown kernel '" + r.kernel_name + "'");
        if (!seen.insert({r.in_a, r.in_b, r.out_a, r.out_b, r.kernel_name}).second)
            throw std::invalid_argument("duplicate reaction (same input, output, kernel)");
    }
}

double ReactionNetwork::total_linf() const {
    double s = 0.0;
    for (const auto& r : reactions_) s += kernel_of(r).linf_norm();
    return s;
}

std::vector<double> ReactionNetwork::rate_constants(int dim) const {
    std::vector<double> out;
    out.reserve(reactions_.size());
    for (const auto& r : reactions_) out.push_back(kernel_of(r).l1_norm(dim));
    return out;
}

namespace {

struct Cursor {
    const std::string& s;
    int line;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, static_cast<int>(pos) + 1);
    }
    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    void expect(char c, const std::string& what) {
        if (!eat(c)) fail("expected '" + std::string(1, c) + "' " + what);
    }
    bool at_end() {
        skip_ws();
        return pos >= s.size();
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                  s[pos] == '_' || s[pos] == '\''))
            ++pos;
        if (pos == start) fail("expected identifier");
        return s.substr(start, pos - start);
    }
    double number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) ||
                                  s[pos] == '.' || s[pos] == '-' || s[pos] == '+' ||
                                  s[pos] == 'e' || s[pos] == 'E'))
            ++pos;
        if (pos == start) fail("expected number");
        try {
            std::size_t used = 0;
            std::string tok = s.substr(start, pos - start);
            double v = std::stod(tok, &used);
            if (used != tok.size()) fail("malformed number '" + tok + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("malformed number");
        }
    }
};

struct Builder {
    std::vector<std::string> names;
    std::map<std::string, int> index_of;  // 1-based
    std::vector<Reaction> reactions;
    std::map<std::string, Kernel> kernels;

    int species(const std::string& name, Cursor& cur) {
        auto it = index_of.find(name);
        if (it != index_of.end()) return it->second;
        if (static_cast<int>(names.size()) >= kMaxSpecies) cur.fail("species index overflow");
        names.push_back(name);
        int idx = static_cast<int>(names.size());
        index_of.emplace(name, idx);
        return idx;
    }
};

double named_arg(Cursor& cur, const std::string& key) {
    std::string got = cur.ident();
    if (got != key) cur.fail("expected parameter '" + key + "', got '" + got + "'");
    cur.expect('=', "after parameter name");
    return cur.number();
}

Kernel parse_kernel_expr(Cursor& cur) {
    std::string shape = cur.ident();
    cur.expect('(', "after kernel shape");
    Kernel k;
    if (shape == "tophat") {
        double radius = named_arg(cur, "radius");
        cur.expect(',', "between kernel parameters");
        double rate = named_arg(cur, "rate");
        k = Kernel::tophat(radius, rate);
    } else if (shape == "constant") {
        k = Kernel::constant(named_arg(cur, "rate"));
    } else if (shape == "gaussian") {
        double width = named_arg(cur, "width");
        cur.expect(',', "between kernel parameters");
        double rate = named_arg(cur, "rate");
        k = Kernel::gaussian(width, rate);
    } else {
        cur.fail("unknown kernel shape '" + shape + "'");
    }
    cur.expect(')', "to close kernel parameters");
    return k;
}

void parse_reaction_line(Cursor& cur, Builder& b, const std::string& first_name) {
    int in_a = b.species(first_name, cur);
    if (!cur.eat('+')) cur.fail("non-bimolecular reaction: expected '+' after first input species");
    int in_b = b.species(cur.ident(), cur);
    cur.skip_ws();
    if (cur.pos + 1 >= cur.s.size() || cur.s[cur.pos] != '-' || cur.s[cur.pos + 1] != '>')
        cur.fail("expected '->' after input pair");
    cur.pos += 2;
    int out_a = b.species(cur.ident(), cur);
    if (!cur.eat('+')) cur.fail("non-bimolecular reaction: expected '+' after first output species");
    int out_b = b.species(cur.ident(), cur);
    cur.expect('@', "before kernel name");
    std::string kname = cur.ident();
    if (!cur.at_end()) cur.fail("trailing characters after reaction");
    if (!b.kernels.contains(kname)) cur.fail("unknown kernel reference '" + kname + "'");

    Reaction r;
    r.in_a = std::min(in_a, in_b);
    r.in_b = std::max(in_a, in_b);
    r.out_a = std::min(out_a, out_b);
    r.out_b = std::max(out_a, out_b);
    r.kernel_name = std::move(kname);
    b.reactions.push_back(std::move(r));
}

}  // namespace

ReactionNetwork parse_network(const std::string& text) {
    Builder b;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        Cursor cur{raw, line_no};
        if (cur.at_end()) continue;

        // "species:" prefix declares names up front
        std::size_t save = cur.pos;
        std::string head = cur.ident();
        if (head == "species" && cur.eat(':')) {
            do {
                b.species(cur.ident(), cur);
            } while (cur.eat(','));
            if (!cur.at_end()) cur.fail("trailing characters after species list");
            continue;
        }
        if (head == "kernel") {
            std::string name = cur.ident();
            cur.expect('=', "after kernel name");
            Kernel k = parse_kernel_expr(cur);
            if (!cur.at_end()) cur.fail("trailing characters after kernel definition");
            if (!b.kernels.emplace(name, k).second) cur.fail("kernel '" + name + "' redefined");
            continue;
        }
        cur.pos = save;
        parse_reaction_line(cur, b, cur.ident());
    }
    try {
        return ReactionNetwork(std::move(b.names), std::move(b.reactions), std::move(b.kernels));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no, 1);
    }
}

std::string pretty_print(const ReactionNetwork& net) {
    std::ostringstream out;
    out << "species:";
    const auto& names = net.species_names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : " ") << names[i];
    out << "\n";
    for (const auto& [name, k] : net.kernel_table())
        out << "kernel " << name << " = " << to_string(k) << "\n";
    for (const auto& r : net.reactions())
        out << names[r.in_a - 1] << " + " << names[r.in_b - 1] << " -> " << names[r.out_a - 1]
            << " + " << names[r.out_b - 1] << " @ " << r.kernel_name << "\n";
    return out.str();
}

std::set<int> closure(const ReactionNetwork& net, const std::set<int>& v0) {
    std::set<int> v = v0;
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& r : net.reactions()) {
            if (v.contains(r.in_a) && v.contains(r.in_b)) {
                grew |= v.insert(r.out_a).second;
                grew |= v.insert(r.out_b).second;
            }
        }
    }
    return v;
}

bool is_propagating(const ReactionNetwork& net, const DensityField& rho0) {
    if (rho0.n_species() != net.n_species())
        throw std::invalid_argument("is_propagating: species-count mismatch");
    std::set<int> v0;
    for (int s = 1; s <= net.n_species(); ++s)
        if (rho0.species_mass(s) > 1e-12) v0.insert(s);
    return static_cast<int>(closure(net, v0).size()) == net.n_species();
}

}  // namespace chaoskit
