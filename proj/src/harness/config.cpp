#include "ghznet/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ghznet/errors.hpp"

namespace ghznet::harness {

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Characterize: return "characterize";
        case RunMode::Keygen: return "keygen";
        case RunMode::Attack: return "attack";
        case RunMode::Sweep: return "sweep";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + value + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("key '" + key + "': empty list entry");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': expected a comma-separated list");
    return out;
}

const std::set<std::string> kKnownKeys = {
    "mode", "n_parties", "rounds", "seed", "workers",
    "source", "mu", "decoy_mu", "decoy_prob",
    "phase_mode", "phase_window", "quad_nodes", "estimator",
    "theta", "phi", "eta_delay", "eta_channel", "hwp_angle", "ring_direction",
    "pol_misalignment",
    "det_efficiency", "dark_count", "basis_prob_z",
    "topology", "colluder", "attack_strategy", "extra_loss", "tampered_channel",
    "sweep_parameter", "sweep_grid",
};

/// Per-party lists accept a single value (applied to every party) or exactly
/// n_parties values.
std::vector<double> broadcast(const std::string& key, std::vector<double> v, int n_parties) {
    if (static_cast<int>(v.size()) == n_parties) return v;
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(n_parties), v[0]);
    throw ConfigError("key '" + key + "': expected 1 or " + std::to_string(n_parties) +
                      " values, got " + std::to_string(v.size()));
}

std::string render(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string render(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += render(v[i]);
    }
    return out;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> raw;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        if (!kKnownKeys.count(key)) {
            throw ConfigError("unknown key '" + key + "'");
        }
        if (raw.count(key)) {
            throw ConfigError("duplicate key '" + key + "'");
        }
        raw.emplace(std::move(key), std::move(value));
    }

    ExperimentConfig cfg;
    auto take = [&](const char* key) -> std::string {
        auto it = raw.find(key);
        if (it == raw.end()) return {};
        std::string v = it->second;
        raw.erase(it);
        return v;
    };

    if (auto v = take("mode"); !v.empty()) {
        if (v == "characterize") cfg.mode = RunMode::Characterize;
        else if (v == "keygen") cfg.mode = RunMode::Keygen;
        else if (v == "attack") cfg.mode = RunMode::Attack;
        else if (v == "sweep") cfg.mode = RunMode::Sweep;
        else throw ConfigError("key 'mode': expected characterize|keygen|attack|sweep, got '" + v + "'");
    }
    if (auto v = take("n_parties"); !v.empty()) cfg.n_parties = static_cast<int>(parse_uint("n_parties", v));
    if (auto v = take("rounds"); !v.empty()) cfg.rounds = parse_uint("rounds", v);
    if (auto v = take("seed"); !v.empty()) cfg.seed = parse_uint("seed", v);
    if (auto v = take("workers"); !v.empty()) cfg.workers = static_cast<int>(parse_uint("workers", v));
    if (auto v = take("source"); !v.empty()) {
        if (v == "single-photon") cfg.source = protocol::SourceKind::SinglePhoton;
        else if (v == "coherent") cfg.source = protocol::SourceKind::Coherent;
        else throw ConfigError("key 'source': expected single-photon|coherent, got '" + v + "'");
    }
    if (auto v = take("mu"); !v.empty()) cfg.mu = parse_double("mu", v);
    if (auto v = take("decoy_mu"); !v.empty()) cfg.decoy_mu = parse_list("decoy_mu", v);
    if (auto v = take("decoy_prob"); !v.empty()) cfg.decoy_prob = parse_list("decoy_prob", v);
    if (auto v = take("phase_mode"); !v.empty()) {
        if (v == "fixed") cfg.phase_mode = ghz::PhaseMode::Kind::Fixed;
        else if (v == "randomized") cfg.phase_mode = ghz::PhaseMode::Kind::Randomized;
        else if (v == "postselected") cfg.phase_mode = ghz::PhaseMode::Kind::PostSelected;
        else throw ConfigError("key 'phase_mode': expected fixed|randomized|postselected, got '" + v + "'");
    }
    if (auto v = take("phase_window"); !v.empty()) cfg.phase_window = parse_double("phase_window", v);
    if (auto v = take("quad_nodes"); !v.empty()) cfg.quad_nodes = static_cast<int>(parse_uint("quad_nodes", v));
    if (auto v = take("estimator"); !v.empty()) {
        if (v == "sampling") cfg.estimator = Estimator::Sampling;
        else if (v == "exact") cfg.estimator = Estimator::Exact;
        else throw ConfigError("key 'estimator': expected sampling|exact, got '" + v + "'");
    }

    const int n = cfg.n_parties;
    cfg.circuit.n_parties = n;
    if (auto v = take("theta"); !v.empty()) cfg.circuit.theta = broadcast("theta", parse_list("theta", v), n);
    if (auto v = take("phi"); !v.empty()) cfg.circuit.phi = broadcast("phi", parse_list("phi", v), n);
    if (auto v = take("eta_delay"); !v.empty()) cfg.circuit.eta_delay = broadcast("eta_delay", parse_list("eta_delay", v), n);
    if (auto v = take("eta_channel"); !v.empty()) cfg.circuit.eta_channel = broadcast("eta_channel", parse_list("eta_channel", v), n);
    if (auto v = take("hwp_angle"); !v.empty()) cfg.circuit.hwp_angle = parse_double("hwp_angle", v);
    if (auto v = take("ring_direction"); !v.empty()) {
        if (v == "forward") cfg.circuit.reverse_ring = false;
        else if (v == "reverse") cfg.circuit.reverse_ring = true;
        else throw ConfigError("key 'ring_direction': expected forward|reverse, got '" + v + "'");
    }
    if (auto v = take("pol_misalignment"); !v.empty()) cfg.pol_misalignment = parse_double("pol_misalignment", v);
    if (auto v = take("det_efficiency"); !v.empty()) cfg.detector.efficiency = parse_double("det_efficiency", v);
    if (auto v = take("dark_count"); !v.empty()) cfg.detector.dark_count = parse_double("dark_count", v);
    if (auto v = take("basis_prob_z"); !v.empty()) cfg.basis_prob_z = parse_double("basis_prob_z", v);
    if (auto v = take("topology"); !v.empty()) {
        if (v == "localized") cfg.topology = adversary::Topology::Localized;
        else if (v == "equitable") cfg.topology = adversary::Topology::Equitable;
        else throw ConfigError("key 'topology': expected localized|equitable, got '" + v + "'");
    }
    if (auto v = take("colluder"); !v.empty()) cfg.colluder = static_cast<int>(parse_uint("colluder", v));
    if (auto v = take("attack_strategy"); !v.empty()) {
        if (v == "faked-measurement") cfg.attack_strategy = adversary::Strategy::FakedMeasurement;
        else if (v == "loss-tamper") cfg.attack_strategy = adversary::Strategy::ChannelLossTamper;
        else throw ConfigError("key 'attack_strategy': expected faked-measurement|loss-tamper, got '" + v + "'");
    }
    if (auto v = take("extra_loss"); !v.empty()) cfg.extra_loss = parse_double("extra_loss", v);
    if (auto v = take("tampered_channel"); !v.empty()) cfg.tampered_channel = static_cast<int>(parse_uint("tampered_channel", v));
    if (auto v = take("sweep_parameter"); !v.empty()) cfg.sweep_parameter = v;
    if (auto v = take("sweep_grid"); !v.empty()) cfg.sweep_grid = parse_list("sweep_grid", v);

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void ExperimentConfig::validate() const {
    if (n_parties < 2 || n_parties > 16) {
        throw ConfigError("key 'n_parties': must be in [2, 16], got " + std::to_string(n_parties));
    }
    if (rounds < 1) throw ConfigError("key 'rounds': must be >= 1");
    if (workers < 1) throw ConfigError("key 'workers': must be >= 1");
    if (mu < 0.0) throw ConfigError("key 'mu': must be >= 0");
    if (quad_nodes < 1) throw ConfigError("key 'quad_nodes': must be >= 1");
    if (!(phase_window >= 0.0 && phase_window <= std::numbers::pi)) {
        throw ConfigError("key 'phase_window': must be in [0, pi]");
    }
    if (!(basis_prob_z > 0.0 && basis_prob_z < 1.0)) {
        throw ConfigError("key 'basis_prob_z': must be in (0, 1)");
    }
    if (!(pol_misalignment >= -std::numbers::pi && pol_misalignment <= std::numbers::pi)) {
        throw ConfigError("key 'pol_misalignment': must be in [-pi, pi]");
    }
    if (circuit.n_parties != n_parties) {
        throw ConfigError("internal: circuit party count out of sync");
    }
    circuit.validate();   // names theta/phi/eta_delay/eta_channel
    detector.validate();  // names det_efficiency/dark_count
    if (!decoy_mu.empty() || !decoy_prob.empty()) {
        protocol::DecoyConfig decoys{decoy_mu, decoy_prob};
        decoys.validate();
    }
    if (colluder < 0 || colluder >= n_parties) {
        throw ConfigError("key 'colluder': must be in [0, " + std::to_string(n_parties - 1) + "]");
    }
    if (!(extra_loss >= 0.0 && extra_loss <= 1.0)) {
        throw ConfigError("key 'extra_loss': must be in [0, 1]");
    }
    if (tampered_channel < 0 || tampered_channel >= n_parties) {
        throw ConfigError("key 'tampered_channel': must be in [0, " + std::to_string(n_parties - 1) + "]");
    }
    if (mode == RunMode::Sweep) {
        if (sweep_parameter.empty()) throw ConfigError("key 'sweep_parameter': required in sweep mode");
        bool known = sweep_parameter == "mu" || sweep_parameter == "global_phase" ||
                     sweep_parameter == "extra_loss" || sweep_parameter == "phase_window" ||
                     (sweep_parameter.rfind("eta_channel[", 0) == 0 && sweep_parameter.back() == ']');
        if (!known) {
            throw ConfigError("key 'sweep_parameter': unknown parameter '" + sweep_parameter + "'");
        }
        if (sweep_parameter.rfind("eta_channel[", 0) == 0) {
            const std::string inner = sweep_parameter.substr(12, sweep_parameter.size() - 13);
            std::uint64_t idx = parse_uint("sweep_parameter", inner);
            if (idx >= static_cast<std::uint64_t>(n_parties)) {
                throw ConfigError("key 'sweep_parameter': channel index out of range");
            }
        }
    }
    if (mode == RunMode::Attack && attack_strategy == adversary::Strategy::FakedMeasurement) {
        adversary::AttackConfig attack{colluder, attack_strategy, extra_loss};
        attack.validate(n_parties, topology);
        if (source != protocol::SourceKind::SinglePhoton) {
            throw ConfigError("key 'source': faked-measurement attack mode models single photons");
        }
        if (!circuit.lossless() || detector.efficiency != 1.0 || detector.dark_count != 0.0) {
            throw ConfigError("attack mode assumes ideal channels and detectors; "
                              "clear eta_*/det_* overrides");
        }
    }
}

std::string ExperimentConfig::canonical() const {
    // Sorted key = value lines over every experiment-defining field.
    // Execution details (workers, output format) are deliberately absent.
    std::map<std::string, std::string> kv;
    kv["mode"] = to_string(mode);
    kv["n_parties"] = std::to_string(n_parties);
    kv["rounds"] = std::to_string(rounds);
    kv["seed"] = std::to_string(seed);
    kv["source"] = source == protocol::SourceKind::Coherent ? "coherent" : "single-photon";
    kv["mu"] = render(mu);
    if (!decoy_mu.empty()) kv["decoy_mu"] = render(decoy_mu);
    if (!decoy_prob.empty()) kv["decoy_prob"] = render(decoy_prob);
    kv["phase_mode"] = phase_mode == ghz::PhaseMode::Kind::Fixed ? "fixed"
                       : phase_mode == ghz::PhaseMode::Kind::Randomized ? "randomized"
                                                                        : "postselected";
    kv["phase_window"] = render(phase_window);
    kv["quad_nodes"] = std::to_string(quad_nodes);
    kv["estimator"] = estimator == Estimator::Exact ? "exact" : "sampling";
    if (!circuit.theta.empty()) kv["theta"] = render(circuit.theta);
    if (!circuit.phi.empty()) kv["phi"] = render(circuit.phi);
    if (!circuit.eta_delay.empty()) kv["eta_delay"] = render(circuit.eta_delay);
    if (!circuit.eta_channel.empty()) kv["eta_channel"] = render(circuit.eta_channel);
    kv["hwp_angle"] = render(circuit.hwp_angle);
    kv["ring_direction"] = circuit.reverse_ring ? "reverse" : "forward";
    kv["pol_misalignment"] = render(pol_misalignment);
    kv["det_efficiency"] = render(detector.efficiency);
    kv["dark_count"] = render(detector.dark_count);
    kv["basis_prob_z"] = render(basis_prob_z);
    kv["topology"] = topology == adversary::Topology::Localized ? "localized" : "equitable";
    kv["colluder"] = std::to_string(colluder);
    kv["attack_strategy"] = attack_strategy == adversary::Strategy::ChannelLossTamper
                                ? "loss-tamper"
                                : "faked-measurement";
    kv["extra_loss"] = render(extra_loss);
    kv["tampered_channel"] = std::to_string(tampered_channel);
    if (!sweep_parameter.empty()) kv["sweep_parameter"] = sweep_parameter;
    if (!sweep_grid.empty()) kv["sweep_grid"] = render(sweep_grid);

    std::string out;
    for (const auto& [key, value] : kv) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex16(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::uint64_t ExperimentConfig::config_hash() const { return fnv1a64(canonical()); }

std::string ExperimentConfig::config_hash_hex() const { return to_hex16(config_hash()); }

ghz::PhaseMode ExperimentConfig::make_phase_mode() const {
    switch (phase_mode) {
        case ghz::PhaseMode::Kind::Fixed: return ghz::PhaseMode::fixed();
        case ghz::PhaseMode::Kind::Randomized: return ghz::PhaseMode::randomized(quad_nodes);
        case ghz::PhaseMode::Kind::PostSelected:
            return ghz::PhaseMode::post_selected(phase_window, quad_nodes);
    }
    return ghz::PhaseMode::fixed();
}

} // namespace ghznet::harness
