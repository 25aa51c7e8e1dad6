#include "gwtucker/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gwt {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

int parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs an integer, got '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config: key '" + key + "' needs an integer, got '" + value + "'");
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs a number, got '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config: key '" + key + "' needs a number, got '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs an unsigned integer, got '" +
                                    value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config: key '" + key + "' needs an unsigned integer, got '" +
                                    value + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_int(key, trim(item)));
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    topology.validate();
    generator.validate();
    ranks.validate_against(topology.rx_antennas, topology.tx_antennas, topology.num_taps);
    if (ranks.m < topology.num_streams)
        throw std::invalid_argument("config: rank m = " + std::to_string(ranks.m) +
                                    " must be >= num_streams L = " + std::to_string(topology.num_streams) +
                                    " so the compressed precoder yields L streams");
    if (ranks.n < topology.num_streams)
        throw std::invalid_argument("config: rank n = " + std::to_string(ranks.n) +
                                    " must be >= num_streams L = " + std::to_string(topology.num_streams) +
                                    " so the compressed precoder yields L streams");
    if (iters < 0)
        throw std::invalid_argument("config: iters must be >= 0");
    if (out_dir.empty())
        throw std::invalid_argument("config: out_dir must not be empty");
    if (sweep) {
        if (sweep->axis != 'n' && sweep->axis != 'p')
            throw std::invalid_argument("config: sweep_axis must be n or p");
        if (sweep->values.empty())
            throw std::invalid_argument("config: sweep_values must not be empty");
        for (int v : sweep->values) {
            CompressionRanks r = ranks;
            (sweep->axis == 'n' ? r.n : r.p) = v;
            r.validate_against(topology.rx_antennas, topology.tx_antennas, topology.num_taps);
            if (sweep->axis == 'n' && v < topology.num_streams)
                throw std::invalid_argument("config: swept n = " + std::to_string(v) +
                                            " must be >= num_streams L");
        }
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::optional<char> sweep_axis;
    std::optional<std::vector<int>> sweep_values;
    std::set<std::string> seen;

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key or value");
        if (!seen.insert(key).second)
            throw std::invalid_argument("config: duplicate key '" + key + "'");

        if (key == "J") cfg.topology.num_cells = parse_int(key, value);
        else if (key == "K") cfg.topology.users_per_cell = parse_int(key, value);
        else if (key == "M") cfg.topology.rx_antennas = parse_int(key, value);
        else if (key == "N") cfg.topology.tx_antennas = parse_int(key, value);
        else if (key == "P") cfg.topology.num_taps = parse_int(key, value);
        else if (key == "L") cfg.topology.num_streams = parse_int(key, value);
        else if (key == "sigma") cfg.topology.noise_std = parse_double(key, value);
        else if (key == "m") cfg.ranks.m = parse_int(key, value);
        else if (key == "n") cfg.ranks.n = parse_int(key, value);
        else if (key == "p") cfg.ranks.p = parse_int(key, value);
        else if (key == "model") cfg.model = model_from_name(value);
        else if (key == "iters") cfg.iters = parse_int(key, value);
        else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "scope") {
            if (value == "full") cfg.scope = InterferenceScope::full;
            else if (value == "paper_experiment") cfg.scope = InterferenceScope::paper_experiment;
            else throw std::invalid_argument("config: scope must be full or paper_experiment, got '" + value + "'");
        }
        else if (key == "rays") cfg.generator.rays_per_slice = parse_int(key, value);
        else if (key == "tap_decay") cfg.generator.tap_decay = parse_double(key, value);
        else if (key == "rician") cfg.generator.rician_factor = parse_double(key, value);
        else if (key == "coeff_decay") cfg.generator.coeff_decay = parse_double(key, value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "sweep_axis") {
            if (value != "n" && value != "p")
                throw std::invalid_argument("config: sweep_axis must be n or p, got '" + value + "'");
            sweep_axis = value[0];
        }
        else if (key == "sweep_values") sweep_values = parse_int_list(key, value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    if (sweep_axis.has_value() != sweep_values.has_value())
        throw std::invalid_argument("config: sweep_axis and sweep_values must be given together");
    if (sweep_axis)
        cfg.sweep = SweepSpec{*sweep_axis, *sweep_values};
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace gwt
