#include "collapse_kaon/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace collapse_kaon {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + message
                                  : "config: " + message),
      line_(line) {}

namespace {

int line_at(std::string_view text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

/// Locates keys in the raw text so errors can point at a line.
class KeyLocator {
public:
    explicit KeyLocator(std::string_view text) : text_(text) {}

    /// Position of `"key"` searched from `from`; npos if absent.
    std::size_t find(const std::string& key, std::size_t from = 0) const {
        return text_.find("\"" + key + "\"", from);
    }

    int line(const std::string& key, std::size_t from = 0) const {
        const auto pos = find(key, from);
        return pos == std::string_view::npos ? 0 : line_at(text_, pos);
    }

private:
    std::string_view text_;
};

struct Section {
    const json& node;
    std::string path;  // dotted prefix for messages
    std::size_t offset;
    const KeyLocator& where;

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError("'" + path + key + "' " + what, where.line(key, offset));
    }

    void reject_unknown(std::initializer_list<const char*> known) const {
        std::set<std::string> allowed(known.begin(), known.end());
        for (const auto& [key, value] : node.items()) {
            if (!allowed.count(key)) fail(key, "is not a recognized key");
        }
    }

    const json* get(const std::string& key) const {
        auto it = node.find(key);
        return it == node.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) const {
        if (const json* v = get(key)) {
            if (!v->is_number()) fail(key, "must be a number");
            out = v->get<double>();
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out) const {
        if (const json* v = get(key)) {
            if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() &&
                                            v->get<long long>() < 0)) {
                fail(key, "must be a nonnegative integer");
            }
            out = v->get<Int>();
        }
    }

    void string(const std::string& key, std::string& out) const {
        if (const json* v = get(key)) {
            if (!v->is_string()) fail(key, "must be a string");
            out = v->get<std::string>();
        }
    }

    Section child(const std::string& key) const {
        const json* v = get(key);
        if (!v->is_object()) fail(key, "must be an object");
        auto pos = where.find(key, offset);
        return Section{*v, path + key + ".", pos == std::string_view::npos ? offset : pos, where};
    }
};

}  // namespace

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (theta0.empty()) throw ConfigError("theta0 list must not be empty");
    for (double th : theta0) {
        if (!(th >= 0.0 && th <= 1.0)) throw ConfigError("theta0 values must lie in [0, 1]");
    }
    if (!(std::isfinite(t_max) && t_max > 0.0)) throw ConfigError("t_max must be > 0");
    if (t_steps < 1) throw ConfigError("t_steps must be >= 1");
    if (trajectories < 1) throw ConfigError("trajectories must be >= 1");
    if (!(std::isfinite(dt) && dt > 0.0)) throw ConfigError("dt must be > 0");
    if (dt > t_max) throw ConfigError("dt must not exceed t_max");
    if (grid.points < 2) throw ConfigError("grid.points must be >= 2");
    if (!(std::isfinite(grid.extent) && grid.extent >= 0.0)) {
        throw ConfigError("grid.extent must be >= 0");
    }
    try {
        montecarlo::Grid check(grid, params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (output_path.empty()) throw ConfigError("output.path must not be empty");
}

std::vector<double> RunConfig::time_grid() const {
    std::vector<double> times;
    times.reserve(t_steps + 1);
    for (int k = 0; k <= t_steps; ++k) {
        const double t = t_max * k / t_steps;
        times.push_back(static_cast<double>(std::llround(t / dt)) * dt);
    }
    return times;
}

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what(), line_at(text, e.byte));
    }
    if (!root.is_object()) throw ConfigError("top level must be an object", 1);

    KeyLocator where(text);
    RunConfig c;
    Section top{root, "", 0, where};
    top.reject_unknown({"params", "theta0", "t_max", "t_steps", "scheme", "trajectories", "dt",
                        "master_seed", "grid", "threads", "output"});

    if (top.get("params")) {
        Section p = top.child("params");
        p.reject_unknown(
            {"m_S", "m_L", "m_0", "Gamma_S", "Gamma_L", "lambda", "alpha", "p_i"});
        p.number("m_S", c.params.m_S);
        p.number("m_L", c.params.m_L);
        p.number("m_0", c.params.m_0);
        p.number("Gamma_S", c.params.Gamma_S);
        p.number("Gamma_L", c.params.Gamma_L);
        p.number("lambda", c.params.lambda);
        p.number("alpha", c.params.alpha);
        p.number("p_i", c.params.p_i);
    }
    if (const json* th = top.get("theta0")) {
        if (!th->is_array()) top.fail("theta0", "must be an array of numbers");
        c.theta0.clear();
        for (const auto& v : *th) {
            if (!v.is_number()) top.fail("theta0", "must be an array of numbers");
            c.theta0.push_back(v.get<double>());
        }
    }
    top.number("t_max", c.t_max);
    top.integer("t_steps", c.t_steps);
    if (top.get("scheme")) {
        std::string name;
        top.string("scheme", name);
        if (name == "auto") {
            c.scheme.reset();
        } else {
            try {
                c.scheme = montecarlo::parse_scheme(name);
            } catch (const std::invalid_argument& e) {
                top.fail("scheme", e.what());
            }
        }
    }
    top.integer("trajectories", c.trajectories);
    top.number("dt", c.dt);
    top.integer("master_seed", c.master_seed);
    if (top.get("grid")) {
        Section g = top.child("grid");
        g.reject_unknown({"points", "extent"});
        g.integer("points", c.grid.points);
        g.number("extent", c.grid.extent);
    }
    top.integer("threads", c.threads);
    if (top.get("output")) {
        Section o = top.child("output");
        o.reject_unknown({"path", "format"});
        o.string("path", c.output_path);
        std::string format = c.format == OutputFormat::Json ? "json" : "csv";
        o.string("format", format);
        if (format == "csv") {
            c.format = OutputFormat::Csv;
        } else if (format == "json") {
            c.format = OutputFormat::Json;
        } else {
            o.fail("format", "must be \"csv\" or \"json\"");
        }
    }

    try {
        c.validate();
    } catch (const ConfigError& e) {
        // point at the first key the message names, if any
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        int line = 0;
        for (const char* key : {"m_S", "m_L", "m_0", "Gamma_S", "Gamma_L", "lambda", "alpha",
                                "p_i", "theta0", "t_max", "t_steps", "trajectories", "dt",
                                "points", "extent", "path", "grid"}) {
            if (msg.find(key) != std::string::npos && (line = where.line(key)) > 0) break;
        }
        throw ConfigError(msg, line);
    }
    return c;
}

std::string serialize_config(const RunConfig& c) {
    ordered_json j;
    j["params"] = {{"m_S", c.params.m_S},         {"m_L", c.params.m_L},
                   {"m_0", c.params.m_0},         {"Gamma_S", c.params.Gamma_S},
                   {"Gamma_L", c.params.Gamma_L}, {"lambda", c.params.lambda},
                   {"alpha", c.params.alpha},     {"p_i", c.params.p_i}};
    j["theta0"] = c.theta0;
    j["t_max"] = c.t_max;
    j["t_steps"] = c.t_steps;
    j["scheme"] = c.scheme ? std::string(montecarlo::to_string(*c.scheme)) : "auto";
    j["trajectories"] = c.trajectories;
    j["dt"] = c.dt;
    j["master_seed"] = c.master_seed;
    j["grid"] = {{"points", c.grid.points}, {"extent", c.grid.extent}};
    j["threads"] = c.threads;
    j["output"] = {{"path", c.output_path},
                   {"format", c.format == OutputFormat::Json ? "json" : "csv"}};
    return j.dump(2) + "\n";
}

}  // namespace collapse_kaon
