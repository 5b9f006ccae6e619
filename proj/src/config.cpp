#include "chaoskit/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chaoskit {

DiffusionSpec ExperimentConfig::diffusion(int n_species) const {
    if (sigma.empty()) return DiffusionSpec::uniform(n_species, 0.05);
    if (sigma.size() == 1) return DiffusionSpec::uniform(n_species, sigma[0]);
    if (static_cast<int>(sigma.size()) != n_species)
        throw std::invalid_argument("config: sigma must list one value or one per species");
    return DiffusionSpec{sigma};
}

DensityField ExperimentConfig::initial_field(int n_species) const {
    std::vector<double> masses = init_masses;
    if (masses.empty())
        masses.assign(static_cast<std::size_t>(n_species), 1.0 / n_species);
    if (static_cast<int>(masses.size()) != n_species)
        throw std::invalid_argument("config: init.masses must list one value per species");
    if (init_profile == "uniform") return uniform_field(dim, grid_size, masses);
    if (init_profile == "cosine")
        return cosine_field(dim, grid_size, masses, init_cos_amplitude, init_cos_phases);
    if (init_profile == "point")
        return point_mass_field(dim, grid_size, n_species, init_point_species, init_point_cell);
    if (init_profile == "file") {
        DensityField f = load_field_csv_file(init_file);
        if (f.n_species() != n_species)
            throw std::invalid_argument("config: initial field species count mismatch");
        return f;
    }
    throw std::invalid_argument("config: unknown init.profile '" + init_profile + "'");
}

PairPath ExperimentConfig::path() const {
    if (pair_path == "auto") return PairPath::Auto;
    if (pair_path == "naive") return PairPath::Naive;
    if (pair_path == "celllist") return PairPath::CellList;
    throw std::invalid_argument("config: unknown sim.pair_path '" + pair_path + "'");
}

void ExperimentConfig::validate_against(const ReactionNetwork& net) const {
    double bound = dt * net.n_reactions() * net.total_linf();
    if (!dt_bound_override && bound > 0.1 + 1e-15) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "config: dt violates the bound dt * n_r * |Phi|_inf <= 0.1 "
                      "(got %.6g); lower sim.dt or set sim.dt_bound_override = true",
                      bound);
        throw std::invalid_argument(buf);
    }
    for (std::size_t n : n_list)
        if (n < 2) throw std::invalid_argument("config: sim.N must be >= 2");
    if (runs < 1) throw std::invalid_argument("config: sim.runs must be >= 1");
    if (t_final < 0.0) throw std::invalid_argument("config: sim.t_final must be >= 0");
    if (grid_size < 1) throw std::invalid_argument("config: pde.M must be >= 1");
}

namespace {

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x != std::floor(x))
        throw std::invalid_argument("config: key '" + key + "' expects an integer");
    return static_cast<long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: key '" + key + "' expects true/false");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: missing '=' on line " + std::to_string(line_no));
        auto trim = [](std::string s) {
            auto x = s.find_first_not_of(" \t");
            auto y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key on line " + std::to_string(line_no));
        if (!kv.emplace(key, value).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");
    }

    ExperimentConfig c;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        if (fp.is_relative() && !base_dir.empty()) fp = std::filesystem::path(base_dir) / fp;
        return fp.string();
    };

    bool network_seen = false;
    for (const auto& [key, value] : kv) {
        if (key == "experiment") c.experiment = value;
        else if (key == "network.inline") {
            std::string t = value;
            std::replace(t.begin(), t.end(), ';', '\n');
            c.network_text = t;
            network_seen = true;
        } else if (key == "network.file") {
            std::ifstream f(resolve(value));
            if (!f) throw std::invalid_argument("config: cannot open network file '" + value + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            c.network_text = ss.str();
            network_seen = true;
        } else if (key == "sigma") c.sigma = to_doubles(key, value);
        else if (key == "init.profile") c.init_profile = value;
        else if (key == "init.masses") c.init_masses = to_doubles(key, value);
        else if (key == "init.cos_amplitude") c.init_cos_amplitude = to_double(key, value);
        else if (key == "init.cos_phases") c.init_cos_phases = to_doubles(key, value);
        else if (key == "init.point_species") c.init_point_species = static_cast<int>(to_long(key, value));
        else if (key == "init.point_cell") c.init_point_cell = static_cast<std::size_t>(to_long(key, value));
        else if (key == "init.file") c.init_file = resolve(value);
        else if (key == "sim.N") {
            c.n_list.clear();
            for (double v : to_doubles(key, value))
                c.n_list.push_back(static_cast<std::size_t>(v));
        } else if (key == "sim.runs") c.runs = static_cast<int>(to_long(key, value));
        else if (key == "sim.dt") c.dt = to_double(key, value);
        else if (key == "sim.dt_bound_override") c.dt_bound_override = to_bool(key, value);
        else if (key == "sim.t_final") c.t_final = to_double(key, value);
        else if (key == "sim.record") c.record_times = to_doubles(key, value);
        else if (key == "sim.histogram_bins") c.histogram_bins = static_cast<int>(to_long(key, value));
        else if (key == "sim.snapshots") c.snapshots = to_bool(key, value);
        else if (key == "sim.pair_path") c.pair_path = value;
        else if (key == "pde.M") c.grid_size = static_cast<int>(to_long(key, value));
        else if (key == "pde.dim") c.dim = static_cast<int>(to_long(key, value));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, value));
        else if (key == "output") c.output_dir = resolve(value);
        else if (key == "ldp.grid") c.ldp_grid = static_cast<int>(to_long(key, value));
        else if (key == "ldp.trials") c.ldp_trials = static_cast<int>(to_long(key, value));
        else if (key == "ldp.N") {
            c.ldp_n_list.clear();
            for (double v : to_doubles(key, value)) c.ldp_n_list.push_back(static_cast<int>(v));
        } else if (key == "ldp.k_max") c.ldp_k_max = static_cast<int>(to_long(key, value));
        else if (key == "ldp.moment_n") c.ldp_moment_n = static_cast<int>(to_long(key, value));
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    if (c.experiment.empty()) throw std::invalid_argument("config: missing 'experiment'");
    if (!network_seen && c.experiment != "ldp_suite" && c.experiment != "operator_suite")
        throw std::invalid_argument("config: missing 'network.inline' or 'network.file'");
    if (c.output_dir.empty()) c.output_dir = resolve("out_" + c.experiment);

    if (network_seen) {
        ReactionNetwork net = c.network();  // surfaces parse errors early
        c.validate_against(net);
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}
}  // namespace

std::string ExperimentConfig::echo() const {
    std::ostringstream o;
    o << "experiment = " << experiment << "\n";
    o << "seed = " << seed << "\n";
    o << "output = " << output_dir << "\n";
    if (!sigma.empty()) o << "sigma = " << join(sigma) << "\n";
    o << "init.profile = " << init_profile << "\n";
    if (!init_masses.empty()) o << "init.masses = " << join(init_masses) << "\n";
    if (init_profile == "cosine") {
        o << "init.cos_amplitude = " << num(init_cos_amplitude) << "\n";
        if (!init_cos_phases.empty()) o << "init.cos_phases = " << join(init_cos_phases) << "\n";
    }
    if (init_profile == "point") {
        o << "init.point_species = " << init_point_species << "\n";
        o << "init.point_cell = " << init_point_cell << "\n";
    }
    if (init_profile == "file") o << "init.file = " << init_file << "\n";
    o << "sim.N =";
    for (std::size_t i = 0; i < n_list.size(); ++i) o << (i ? ", " : " ") << n_list[i];
    o << "\n";
    o << "sim.runs = " << runs << "\n";
    o << "sim.dt = " << num(dt) << "\n";
    o << "sim.dt_bound_override = " << (dt_bound_override ? "true" : "false") << "\n";
    o << "sim.t_final = " << num(t_final) << "\n";
    if (!record_times.empty()) o << "sim.record = " << join(record_times) << "\n";
    o << "sim.histogram_bins = " << histogram_bins << "\n";
    o << "sim.snapshots = " << (snapshots ? "true" : "false") << "\n";
    o << "sim.pair_path = " << pair_path << "\n";
    o << "pde.M = " << grid_size << "\n";
    o << "pde.dim = " << dim << "\n";
    o << "ldp.grid = " << ldp_grid << "\n";
    o << "ldp.trials = " << ldp_trials << "\n";
    o << "ldp.N =";
    for (std::size_t i = 0; i < ldp_n_list.size(); ++i) o << (i ? ", " : " ") << ldp_n_list[i];
    o << "\n";
    o << "ldp.k_max = " << ldp_k_max << "\n";
    o << "ldp.moment_n = " << ldp_moment_n << "\n";
    if (!network_text.empty()) {
        // canonical re-loadable form, newlines folded to ';'
        std::string flat;
        std::istringstream nt(pretty_print(network()));
        std::string line;
        while (std::getline(nt, line)) {
            if (line.empty()) continue;
            if (!flat.empty()) flat += "; ";
            flat += line;
        }
        o << "network.inline = " << flat << "\n";
    }
    return o.str();
}

}  // namespace chaoskit
