#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "eta/csv.hpp"
#include "eta/problems.hpp"

namespace eta::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
    return out;
}

double parse_num(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("invalid numeric value for '" + key + "': " + value);
    }
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    const double v = parse_num(key, value);
    if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
        throw UsageError("invalid count for '" + key + "': " + value);
    return static_cast<std::size_t>(v);
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "problem") {
        if (value == "toy1d") cfg.problem = Problem::kToy1d;
        else if (value == "toy2d") cfg.problem = Problem::kToy2d;
        else if (value == "custom-csv") cfg.problem = Problem::kCustomCsv;
        else throw UsageError("unknown problem: " + value);
    } else if (key == "hidden") {
        cfg.hidden.clear();
        for (const auto& tok : split(value, ',')) cfg.hidden.push_back(parse_count(key, tok));
    } else if (key == "lr") {
        cfg.lr = parse_num(key, value);
        if (!(cfg.lr > 0)) throw UsageError("lr must be positive");
    } else if (key == "steps_erm") {
        cfg.steps_erm = parse_count(key, value);
    } else if (key == "steps_eta") {
        cfg.steps_eta = parse_count(key, value);
    } else if (key == "lambda") {
        cfg.lambda = parse_num(key, value);
        if (cfg.lambda < 0) throw UsageError("lambda must be >= 0");
    } else if (key == "tau") {
        cfg.tau = parse_num(key, value);
        if (!(cfg.tau >= 0 && cfg.tau < 1)) throw UsageError("tau must be in [0,1)");
    } else if (key == "omega") {
        cfg.omega = parse_count(key, value);
        if (cfg.omega < 1) throw UsageError("omega must be >= 1");
    } else if (key == "batch") {
        cfg.batch = parse_count(key, value);
    } else if (key == "n_train") {
        cfg.n_train = parse_count(key, value);
    } else if (key == "pool_size") {
        cfg.pool_size = parse_count(key, value);
    } else if (key == "n_reference") {
        cfg.n_reference = parse_count(key, value);
    } else if (key == "n_eval") {
        cfg.n_eval = parse_count(key, value);
    } else if (key == "sigma2") {
        cfg.sigma2 = parse_num(key, value);
        if (!(cfg.sigma2 > 0)) throw UsageError("sigma2 must be positive");
    } else if (key == "exclusion_center") {
        const auto parts = split(value, ',');
        if (parts.size() != 2) throw UsageError("exclusion_center needs two coordinates");
        cfg.exclusion_center = {parse_num(key, parts[0]), parse_num(key, parts[1])};
    } else if (key == "exclusion_radius") {
        cfg.exclusion_radius = parse_num(key, value);
        if (cfg.exclusion_radius < 0) throw UsageError("exclusion_radius must be >= 0");
    } else if (key == "quantile_blocks") {
        cfg.quantile_blocks = value;
    } else if (key == "reference") {
        if (value == "analytic") {
            cfg.reference_kind = ReferenceKind::kAnalytic;
            cfg.reference_path.clear();
        } else if (value.rfind("csv:", 0) == 0) {
            cfg.reference_kind = ReferenceKind::kCsv;
            cfg.reference_path = value.substr(4);
        } else if (value.rfind("gevd:", 0) == 0) {
            cfg.reference_kind = ReferenceKind::kGevd;
            cfg.reference_path = value.substr(5);
        } else {
            throw UsageError("reference must be analytic, csv:PATH, or gevd:PATH");
        }
    } else if (key == "observable") {
        cfg.observable = value;
    } else if (key == "dataset_csv") {
        cfg.dataset_csv = value;
    } else if (key == "pool_csv") {
        cfg.pool_csv = value;
    } else if (key == "init_checkpoint") {
        cfg.init_checkpoint = value;
    } else if (key == "checkpoint_interval") {
        cfg.checkpoint_interval = parse_count(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_count(key, value));
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "consistency_q") {
        cfg.consistency_q = parse_num(key, value);
        if (!(cfg.consistency_q > 0 && cfg.consistency_q < 1))
            throw UsageError("consistency_q must be in (0,1)");
    } else if (key == "tail_eval_min_q") {
        cfg.tail_eval_min_q = parse_num(key, value);
        if (!(cfg.tail_eval_min_q >= 0 && cfg.tail_eval_min_q <= 1))
            throw UsageError("tail_eval_min_q must be in [0,1]");
    } else if (key == "threshold_qs") {
        cfg.threshold_qs.clear();
        for (const auto& tok : split(value, ',')) cfg.threshold_qs.push_back(parse_num(key, tok));
    } else {
        throw UsageError("unknown config key: " + key);
    }
}

}  // namespace

ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::map<std::string, std::string>& overrides) {
    ExperimentConfig cfg;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw UsageError("cannot open config file: " + *path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw UsageError("config line " + std::to_string(lineno) + " is not key = value");
            apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    for (const auto& [key, value] : overrides) apply(cfg, key, value);
    return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["problem"] = cfg.problem == Problem::kToy1d    ? "toy1d"
                    : cfg.problem == Problem::kToy2d ? "toy2d"
                                                     : "custom-csv";
    {
        std::string h;
        for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
            if (i) h += ',';
            h += std::to_string(cfg.hidden[i]);
        }
        kv["hidden"] = h;
    }
    kv["lr"] = csv::format_double(cfg.lr);
    kv["steps_erm"] = std::to_string(cfg.steps_erm);
    kv["steps_eta"] = std::to_string(cfg.steps_eta);
    kv["lambda"] = csv::format_double(cfg.lambda);
    kv["tau"] = csv::format_double(cfg.tau);
    kv["omega"] = std::to_string(cfg.omega);
    kv["batch"] = std::to_string(cfg.batch);
    kv["n_train"] = std::to_string(cfg.n_train);
    kv["pool_size"] = std::to_string(cfg.pool_size);
    kv["n_reference"] = std::to_string(cfg.n_reference);
    kv["n_eval"] = std::to_string(cfg.n_eval);
    kv["sigma2"] = csv::format_double(cfg.sigma2);
    kv["exclusion_center"] = csv::format_double(cfg.exclusion_center[0]) + "," +
                             csv::format_double(cfg.exclusion_center[1]);
    kv["exclusion_radius"] = csv::format_double(cfg.exclusion_radius);
    kv["quantile_blocks"] = cfg.quantile_blocks;
    kv["reference"] = cfg.reference_kind == ReferenceKind::kAnalytic
                          ? "analytic"
                          : (cfg.reference_kind == ReferenceKind::kCsv ? "csv:" : "gevd:") +
                                cfg.reference_path;
    kv["observable"] = cfg.observable;
    kv["dataset_csv"] = cfg.dataset_csv;
    kv["pool_csv"] = cfg.pool_csv;
    kv["init_checkpoint"] = cfg.init_checkpoint;
    kv["checkpoint_interval"] = std::to_string(cfg.checkpoint_interval);
    kv["seed"] = std::to_string(cfg.seed);
    kv["out"] = cfg.out;
    kv["consistency_q"] = csv::format_double(cfg.consistency_q);
    kv["tail_eval_min_q"] = csv::format_double(cfg.tail_eval_min_q);
    {
        std::string t;
        for (std::size_t i = 0; i < cfg.threshold_qs.size(); ++i) {
            if (i) t += ',';
            t += csv::format_double(cfg.threshold_qs[i]);
        }
        kv["threshold_qs"] = t;
    }
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t sub_seed(std::uint64_t master, SeedPurpose purpose) {
    // splitmix64 round over the tagged master seed
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(purpose) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

QuantileSet resolve_quantile_set(const ExperimentConfig& cfg) {
    std::string blocks_key = cfg.quantile_blocks;
    if (blocks_key == "auto") {
        if (cfg.problem == Problem::kToy1d) blocks_key = "toy1d";
        else if (cfg.problem == Problem::kToy2d) blocks_key = "toy2d";
        else throw UsageError("custom-csv needs explicit quantile_blocks");
    }
    if (blocks_key == "toy1d")
        return build_quantile_set(toy1d_quantile_blocks(), cfg.tau);
    if (blocks_key == "toy2d")
        return build_quantile_set(toy2d_quantile_blocks(), cfg.tau);
    std::vector<LinspBlock> blocks;
    for (const auto& blk : split(cfg.quantile_blocks, ';')) {
        const auto parts = split(blk, ':');
        if (parts.size() != 3) throw UsageError("quantile block must be a:b:n — got " + blk);
        blocks.push_back({parse_num("quantile_blocks", parts[0]),
                          parse_num("quantile_blocks", parts[1]),
                          parse_count("quantile_blocks", parts[2])});
    }
    try {
        return build_quantile_set(blocks, cfg.tau);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("invalid quantile blocks: ") + e.what());
    }
}

}  // namespace eta::cli
