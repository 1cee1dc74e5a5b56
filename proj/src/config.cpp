#include "qae3d/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qae3d/circuit.hpp"

namespace qae3d {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected integer, got '" +
                                 value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected number, got '" +
                                 value + "'");
    }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(static_cast<int>(parse_long(key, item)));
    }
    return out;
}

}  // namespace

void apply_config_override(TrainConfig& c, const std::string& key,
                           const std::string& value) {
    if (key == "dataset") c.dataset = value;
    else if (key == "fps") c.fps = parse_double(key, value);
    else if (key == "train_seconds") c.train_seconds = parse_double(key, value);
    else if (key == "test_seconds") c.test_seconds = parse_double(key, value);
    else if (key == "joints") c.joints = parse_int_list(key, value);
    else if (key == "model") c.model = value;
    else if (key == "n_qubits") c.n_qubits = static_cast<int>(parse_long(key, value));
    else if (key == "n_discard") c.n_discard = static_cast<int>(parse_long(key, value));
    else if (key == "blocks") c.blocks = static_cast<int>(parse_long(key, value));
    else if (key == "block_kind") c.block_kind = value;
    else if (key == "architecture") c.architecture = value;
    else if (key == "init") c.init = value;
    else if (key == "bottleneck") c.bottleneck = value;
    else if (key == "fc_rank") c.fc_rank = static_cast<int>(parse_long(key, value));
    else if (key == "fc_match_params")
        c.fc_match_params = static_cast<int>(parse_long(key, value));
    else if (key == "epochs") c.epochs = parse_long(key, value);
    else if (key == "max_steps") c.max_steps = parse_long(key, value);
    else if (key == "lr") c.lr = parse_double(key, value);
    else if (key == "beta1") c.beta1 = parse_double(key, value);
    else if (key == "beta2") c.beta2 = parse_double(key, value);
    else if (key == "eps") c.eps = parse_double(key, value);
    else if (key == "sched_factor") c.sched_factor = parse_double(key, value);
    else if (key == "sched_patience")
        c.sched_patience = static_cast<int>(parse_long(key, value));
    else if (key == "sched_min_lr") c.sched_min_lr = parse_double(key, value);
    else if (key == "sched_threshold") c.sched_threshold = parse_double(key, value);
    else if (key == "ema_decay") c.ema_decay = parse_double(key, value);
    else if (key == "seed")
        c.seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "out") c.out = value;
    else if (key == "eval_interval") c.eval_interval = parse_long(key, value);
    else if (key == "checkpoint_interval") c.checkpoint_interval = parse_long(key, value);
    else throw std::runtime_error("unknown config key '" + key + "'");
}

TrainConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    TrainConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        apply_config_override(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void validate_config(const TrainConfig& c) {
    static const char* kinds[] = {"quantum", "constant", "mimic", "fc", "qecd", "ceqd"};
    bool known = false;
    for (const char* k : kinds) known = known || c.model == k;
    if (!known) throw std::runtime_error("config key 'model': unknown value '" + c.model + "'");
    block_kind_from_name(c.block_kind);
    architecture_from_name(c.architecture);
    init_scheme_from_name(c.init);
    bottleneck_from_name(c.bottleneck);
    if (c.blocks < 1) throw std::runtime_error("config key 'blocks': must be >= 1");
    if (c.n_discard < 1) throw std::runtime_error("config key 'n_discard': must be >= 1");
    if (c.n_qubits != 0 && c.n_discard >= c.n_qubits)
        throw std::runtime_error("config key 'n_discard': must be below n_qubits");
    if (c.lr <= 0.0) throw std::runtime_error("config key 'lr': must be positive");
    if (c.sched_factor <= 0.0 || c.sched_factor >= 1.0)
        throw std::runtime_error("config key 'sched_factor': must be in (0, 1)");
    if (c.sched_min_lr <= 0.0)
        throw std::runtime_error("config key 'sched_min_lr': must be positive");
    if (c.train_seconds <= 0.0 || c.test_seconds <= 0.0)
        throw std::runtime_error("config key 'train_seconds'/'test_seconds': must be positive");
    if (c.epochs < 0) throw std::runtime_error("config key 'epochs': must be >= 0");
    if (c.fc_rank < 0) throw std::runtime_error("config key 'fc_rank': must be >= 0");
}

}  // namespace qae3d
