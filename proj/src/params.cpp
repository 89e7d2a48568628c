#include "medliab/params.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace medliab {

std::string_view to_string(Mode m) noexcept { return m == Mode::A ? "A" : "I"; }

Mode parse_mode(std::string_view s) {
    if (s == "A" || s == "a") return Mode::A;
    if (s == "I" || s == "i") return Mode::I;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "' (expected A or I)");
}

namespace {

template <class P>
auto& field_ref(P& p, std::string_view name) {
    if (name == "lambda") return p.lambda;
    if (name == "mu_a") return p.mu_a;
    if (name == "mu_i") return p.mu_i;
    if (name == "q") return p.q;
    if (name == "h") return p.h;
    if (name == "big_l") return p.big_l;
    if (name == "c_w") return p.c_w;
    if (name == "c_n") return p.c_n;
    if (name == "kappa") return p.kappa;
    if (name == "k_a") return p.k_a;
    if (name == "k_i") return p.k_i;
    if (name == "w") return p.w;
    throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& s : parts) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

double& field(ModelParams& p, std::string_view name) { return field_ref(p, name); }
double field(const ModelParams& p, std::string_view name) { return field_ref(p, name); }

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument("invalid parameters: " + join(violations)),
      violations_(std::move(violations)) {}

ModelParams validate(const ModelParams& p) {
    std::vector<std::string> v;
    for (auto name : kParamNames) {
        if (!std::isfinite(field(p, name))) v.push_back(std::string(name) + " must be finite");
    }
    if (!(p.lambda > 0)) v.emplace_back("lambda must be positive");
    if (!(p.mu_i > 0)) v.emplace_back("mu_i must be positive");
    if (!(p.mu_a > p.mu_i)) v.emplace_back("mu_a must exceed mu_i");
    if (!(p.q > 0)) v.emplace_back("q must be positive");
    if (!(p.q < p.h)) v.emplace_back("q must be below h");
    if (!(p.h < 1)) v.emplace_back("h must be below 1");
    if (!(p.big_l > 0)) v.emplace_back("big_l must be positive");
    if (!(p.c_w > 0)) v.emplace_back("c_w must be positive");
    if (!(p.c_n > 0)) v.emplace_back("c_n must be positive");
    if (!(p.kappa > 0)) v.emplace_back("kappa must be positive");
    if (!(p.k_a > 0)) v.emplace_back("k_a must be positive");
    if (!(p.k_a < p.k_i)) v.emplace_back("k_a must be below k_i");
    if (!(p.w > 0)) v.emplace_back("w must be positive");
    if (!v.empty()) throw ValidationError(std::move(v));
    return p;
}

ModeAttrs mode_attrs(Mode m, const ModelParams& p) noexcept {
    if (m == Mode::A) return {p.mu_a, 1.0 - p.q, p.k_a};
    return {p.mu_i, 1.0 - p.h, p.k_i};
}

ConfigFile parse_config(std::istream& in, std::string_view source_name) {
    ConfigFile cfg;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(std::string(source_name) + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string text = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) fail("missing key");
        if (text.empty()) fail("missing value for '" + key + "'");

        errno = 0;
        char* end = nullptr;
        const double value = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || errno == ERANGE) fail("malformed number '" + text + "'");
        if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

        if (key == "alpha") {
            cfg.scenario.alpha = value;
        } else if (key == "theta_floor") {
            cfg.scenario.theta_floor = value;
        } else {
            try {
                field(cfg.params, key) = value;
            } catch (const std::invalid_argument&) {
                fail("unknown key '" + key + "'");
            }
        }
    }
    try {
        validate(cfg.params);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string(source_name) + ": " + e.what());
    }
    if (!(cfg.scenario.alpha > 0 && cfg.scenario.alpha < 1))
        throw ConfigError(std::string(source_name) + ": alpha must lie in (0, 1)");
    if (!(cfg.scenario.theta_floor >= 0 && cfg.scenario.theta_floor <= 1))
        throw ConfigError(std::string(source_name) + ": theta_floor must lie in [0, 1]");
    return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in, path.string());
}

std::string write_config(const ConfigFile& cfg) {
    std::ostringstream os;
    char buf[64];
    auto put = [&](std::string_view key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << key << " = " << buf << '\n';
    };
    for (auto name : kParamNames) put(name, field(cfg.params, name));
    put("alpha", cfg.scenario.alpha);
    put("theta_floor", cfg.scenario.theta_floor);
    return os.str();
}

}  // namespace medliab
