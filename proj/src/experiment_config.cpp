#include "hdtest/experiment_config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace hdtest {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long to_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') throw Error("config: key '" + key + "' is not an integer: " + v);
    return x;
}

double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') throw Error("config: key '" + key + "' is not a number: " + v);
    return x;
}

}  // namespace

ExperimentSpec parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw Error(path + ":" + std::to_string(lineno) + ": empty key or value");
        if (!kv.emplace(key, val).second)
            throw Error(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    auto take = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) return std::string();
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    const std::string family = take("family");
    if (family != "fp" && family != "csi")
        throw Error("config: key 'family' must be fp or csi, got '" + family + "'");

    ExperimentSpec spec;
    const std::string alt = take("alternative");

    std::string dim = take("N");
    if (dim.empty()) dim = take("n");

    if (family == "fp") {
        FpDgpSpec dgp;
        if (!dim.empty()) dgp.n_units = static_cast<int>(to_long("N", dim));
        if (auto v = take("T"); !v.empty()) dgp.n_time = static_cast<int>(to_long("T", v));
        if (alt == "null" || alt.empty()) dgp.alternative = FpAlternative::Null;
        else if (alt == "sparse_ha1") dgp.alternative = FpAlternative::SparseHa1;
        else if (alt == "weak_ha2") dgp.alternative = FpAlternative::WeakHa2;
        else throw Error("config: unknown fp alternative '" + alt + "'");
        spec.dgp = dgp;
        spec.methods = {Method::Wald, Method::PE};
    } else {
        CsiDgpSpec dgp;
        if (!dim.empty()) dgp.n_units = static_cast<int>(to_long("n", dim));
        if (auto v = take("T"); !v.empty()) dgp.n_time = static_cast<int>(to_long("T", v));
        if (alt == "null" || alt.empty()) dgp.alternative = CsiAlternative::Null;
        else if (alt == "spatial") dgp.alternative = CsiAlternative::Spatial;
        else throw Error("config: unknown csi alternative '" + alt + "'");
        spec.dgp = dgp;
        spec.methods = {Method::J1, Method::PE};
    }

    if (auto v = take("methods"); !v.empty()) {
        spec.methods.clear();
        std::stringstream ss(v);
        std::string m;
        while (std::getline(ss, m, ',')) spec.methods.push_back(method_from_string(trim(m)));
    }
    if (auto v = take("reps"); !v.empty()) spec.reps = static_cast<int>(to_long("reps", v));
    if (auto v = take("seed"); !v.empty()) spec.master_seed = static_cast<std::uint64_t>(to_long("seed", v));
    if (auto v = take("level"); !v.empty()) spec.level = to_double("level", v);
    if (auto v = take("rule"); !v.empty()) spec.fp_config.rule = threshold_rule_from_string(v);
    if (auto v = take("c_min"); !v.empty()) spec.fp_config.grid.c_min = to_double("c_min", v);
    if (auto v = take("c_max"); !v.empty()) spec.fp_config.grid.c_max = to_double("c_max", v);
    if (auto v = take("c_step"); !v.empty()) spec.fp_config.grid.step = to_double("c_step", v);
    if (auto v = take("c_target"); !v.empty()) spec.fp_config.c_target = to_double("c_target", v);

    spec.scenario = take("scenario");
    if (spec.scenario.empty())
        spec.scenario = family + "-" + (alt.empty() ? "null" : alt);

    if (!kv.empty()) throw Error("config: unknown key '" + kv.begin()->first + "'");
    if (spec.reps < 1) throw Error("config: reps must be >= 1");
    if (!(spec.level > 0 && spec.level < 1)) throw Error("config: level must be in (0,1)");
    return spec;
}

}  // namespace hdtest
