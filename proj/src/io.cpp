#include "sdo/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace sdo {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": empty key or value");
        if (kv.count(key))
            throw ConfigError(path + ": duplicate key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

double parse_double(const std::string& key, const std::string& val) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(val, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: " + val);
    }
    if (pos != val.size())
        throw ConfigError("key '" + key + "': trailing characters in " + val);
    return x;
}

int parse_int(const std::string& key, const std::string& val) {
    const double x = parse_double(key, val);
    const int n = static_cast<int>(x);
    if (static_cast<double>(n) != x)
        throw ConfigError("key '" + key + "': expected an integer, got " + val);
    return n;
}

} // namespace

RunParams read_params_file(const std::string& path) {
    auto kv = read_kv_file(path);
    const char* required[] = {"alpha", "beta", "eta", "mu", "eps"};
    for (const char* k : required)
        if (!kv.count(k)) throw ConfigError(path + ": missing key '" + std::string(k) + "'");

    std::string family = "arctan";
    int hill_n = 0;
    int k_order = 1;
    std::map<std::string, std::string> rest;
    for (auto& [key, val] : kv) {
        if (key == "sigmoid.family") {
            family = val;
        } else if (key == "sigmoid.n") {
            hill_n = parse_int(key, val);
        } else if (key == "sigmoid.k") {
            k_order = parse_int(key, val);
        } else if (key == "alpha" || key == "beta" || key == "eta" ||
                   key == "mu" || key == "eps") {
            rest[key] = val;
        } else {
            throw ConfigError(path + ": unknown key '" + key + "'");
        }
    }

    SigmoidSpec sig;
    if (family == "arctan") {
        sig = SigmoidSpec::arctan();
        if (k_order != 1)
            throw ConfigError("sigmoid.k must be 1 for the arctan family");
    } else if (family == "hill") {
        if (hill_n < 1) throw ConfigError("hill family requires sigmoid.n >= 1");
        sig = SigmoidSpec::hill(hill_n);
    } else if (family == "gk") {
        sig = SigmoidSpec::goldbeter_koshland(0.0);
    } else {
        throw ConfigError("unknown sigmoid.family '" + family + "'");
    }

    try {
        ModelParams p(parse_double("alpha", rest["alpha"]),
                      parse_double("beta", rest["beta"]),
                      parse_double("eta", rest["eta"]),
                      parse_double("mu", rest["mu"]),
                      parse_double("eps", rest["eps"]));
        return RunParams{p, sig};
    } catch (const ModelError& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
}

GammaVector read_gamma_file(const std::string& path) {
    auto kv = read_kv_file(path);
    const char* required[] = {"k", "alpha", "beta", "phiL0", "phiR0"};
    for (const char* k : required)
        if (!kv.count(k)) throw ConfigError(path + ": missing key '" + std::string(k) + "'");
    for (auto& [key, val] : kv) {
        (void)val;
        bool known = false;
        for (const char* k : required) known = known || key == k;
        if (!known) throw ConfigError(path + ": unknown key '" + key + "'");
    }
    try {
        return GammaVector(parse_int("k", kv["k"]),
                           parse_double("alpha", kv["alpha"]),
                           parse_double("beta", kv["beta"]),
                           parse_double("phiL0", kv["phiL0"]),
                           parse_double("phiR0", kv["phiR0"]));
    } catch (const ModelError& e) {
        throw ConfigError(std::string("invalid gamma file: ") + e.what());
    }
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

} // namespace sdo
