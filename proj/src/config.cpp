#include "ctw/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace ctw {

namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string s) {
    boost::algorithm::trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

class Section {
public:
    Section(const pt::ptree* tree, std::string name, const std::set<std::string>& known) : tree_(tree), name_(std::move(name)) {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_)
            if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }
    bool present() const { return tree_ != nullptr; }
    bool has(const std::string& key) const { return tree_ && tree_->get_child_optional(key); }
    std::string text(const std::string& key) const {
        if (!has(key)) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
        return unquote(tree_->get<std::string>(key));
    }
    std::string text(const std::string& key, const std::string& fallback) const { return has(key) ? text(key) : fallback; }
    double number(const std::string& key) const { return parse_number(text(key), name_ + "." + key); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const double x = number(key);
        if (x != std::round(x) || std::abs(x) > 1e9) throw ConfigError(name_ + "." + key + " must be an integer");
        return int(x);
    }
    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        std::string s = boost::algorithm::to_lower_copy(text(key));
        if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
        if (s == "false" || s == "no" || s == "off" || s == "0") return false;
        throw ConfigError(name_ + "." + key + ": expected true or false, got '" + s + "'");
    }
    const std::string& name() const { return name_; }

private:
    const pt::ptree* tree_;
    std::string name_;
};

const pt::ptree* child(const pt::ptree& root, const std::string& name) {
    auto c = root.get_child_optional(name);
    return c ? &*c : nullptr;
}

std::array<int, 2> parse_pair(const std::string& s, const std::string& key) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, s, boost::is_any_of(",x"));
    if (parts.size() != 2) throw ConfigError(key + ": expected two integers 'a,b', got '" + s + "'");
    std::array<int, 2> out{};
    for (int i = 0; i < 2; ++i) {
        const double x = parse_number(parts[i], key);
        if (x != std::round(x)) throw ConfigError(key + ": '" + parts[i] + "' is not an integer");
        out[i] = int(x);
    }
    return out;
}

}  // namespace

double parse_number(const std::string& text, const std::string& key) {
    std::string s = unquote(text);
    const std::string low = boost::algorithm::to_lower_copy(s);
    if (low == "inf" || low == "+inf") return std::numeric_limits<double>::infinity();
    if (low == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        Expr e = parse(s);
        if (!e.free_vars().empty()) throw ConfigError(key + ": expected a constant, got '" + s + "'");
        const double x = e.eval(Bindings());
        if (!std::isfinite(x)) throw ConfigError(key + ": '" + s + "' is not finite");
        return x;
    } catch (const ParseError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    const std::set<std::string> sections = {"model", "torus", "mode", "transport", "field", "output"};
    for (const auto& [name, sub] : root) {
        if (sub.empty() && !sub.data().empty()) throw ConfigError(origin + ": key '" + name + "' outside any section");
        if (!sections.count(name)) throw ConfigError(origin + ": unknown section [" + name + "]");
    }

    RunConfig cfg;
    cfg.source = origin;

    Section model(child(root, "model"), "model", {"u_left", "u_right", "f1", "f2", "g", "d1", "mu", "case"});
    if (!model.present()) throw ConfigError(origin + ": missing [model] section");
    cfg.model.u_left = model.number("u_left");
    cfg.model.u_right = model.number("u_right");
    cfg.model.f1 = model.text("f1");
    cfg.model.f2 = model.text("f2", "1");
    cfg.model.g = model.text("g");
    cfg.model.d1 = model.text("d1", "0");
    cfg.model.mu = model.integer("mu", 0);
    cfg.model.tag = parse_case(model.text("case"));

    Section torus(child(root, "torus"), "torus", {"E", "kappa"});
    if (!torus.present()) throw ConfigError(origin + ": missing [torus] section");
    cfg.E = torus.number("E", 1.0);
    if (!(cfg.E > 0)) throw ConfigError("torus.E must be positive");
    const std::string k = torus.text("kappa");
    if (k != "from-nu") cfg.kappa = parse_number(k, "torus.kappa");

    Section mode(child(root, "mode"), "mode", {"nu", "h", "reference"});
    if (!mode.present()) throw ConfigError(origin + ": missing [mode] section");
    cfg.nu = parse_pair(mode.text("nu"), "mode.nu");
    const std::string hs = mode.text("h");
    if (hs != "from-quantization") {
        cfg.h = parse_number(hs, "mode.h");
        if (!(*cfg.h > 0)) throw ConfigError("mode.h must be positive");
    }
    if (!cfg.kappa && cfg.h) throw ConfigError("kappa = from-nu needs h = from-quantization");
    cfg.reference = cfg.kappa ? ReferencePolicy::Configured : ReferencePolicy::Quantized;
    if (mode.has("reference")) {
        const std::string r = mode.text("reference");
        ReferencePolicy p;
        if (r == "configured") p = ReferencePolicy::Configured;
        else if (r == "quantized") p = ReferencePolicy::Quantized;
        else throw ConfigError("mode.reference: expected 'configured' or 'quantized', got '" + r + "'");
        if (p == ReferencePolicy::Configured && !cfg.kappa)
            throw ConfigError("mode.reference = configured needs a numeric torus.kappa");
        if (p == ReferencePolicy::Quantized && cfg.h) throw ConfigError("mode.reference = quantized needs h = from-quantization");
        cfg.reference = p;
    }

    Section tr(child(root, "transport"), "transport", {"N", "grid", "divisor_floor"});
    cfg.transport.N = tr.integer("N", cfg.transport.N);
    cfg.transport.grid = tr.integer("grid", cfg.transport.grid);
    cfg.transport.divisor_floor = tr.number("divisor_floor", cfg.transport.divisor_floor);
    if (cfg.transport.N < 1) throw ConfigError("transport.N must be at least 1");
    if (cfg.transport.grid < 2 * cfg.transport.N + 2) throw ConfigError("transport.grid must exceed 2 N + 1");
    if (!(cfg.transport.divisor_floor >= 0)) throw ConfigError("transport.divisor_floor must be non-negative");

    Section fd(child(root, "field"), "field", {"nu", "nv", "delta", "caustic_band", "window_band", "u_min", "u_max"});
    cfg.field.nu = fd.integer("nu", cfg.field.nu);
    cfg.field.nv = fd.integer("nv", cfg.field.nv);
    cfg.field.delta = fd.number("delta", cfg.field.delta);
    cfg.field.caustic_band = fd.number("caustic_band", cfg.field.caustic_band);
    cfg.residual.band = fd.number("window_band", cfg.residual.band);
    if (fd.has("u_min")) cfg.field.u_min = fd.number("u_min");
    if (fd.has("u_max")) cfg.field.u_max = fd.number("u_max");
    if (cfg.field.nu < 16 || cfg.field.nv < 16) throw ConfigError("field grid must be at least 16 x 16");
    if (!(cfg.field.delta > 0) || cfg.field.delta > M_PI / 2) throw ConfigError("field.delta must lie in (0, pi/2]");
    if (!(cfg.residual.band > 0) || cfg.residual.band >= M_PI / 2) throw ConfigError("field.window_band must lie in (0, pi/2)");

    Section out(child(root, "output"), "output", {"directory", "formats", "plots", "physical"});
    cfg.output.directory = out.text("directory", cfg.output.directory);
    if (out.has("formats")) {
        cfg.output.csv = cfg.output.binary = false;
        std::vector<std::string> parts;
        const std::string f = out.text("formats");
        boost::algorithm::split(parts, f, boost::is_any_of(", "), boost::token_compress_on);
        for (auto& p : parts) {
            if (p == "csv") cfg.output.csv = true;
            else if (p == "bin" || p == "binary") cfg.output.binary = true;
            else if (p == "none" || p.empty()) continue;
            else throw ConfigError("output.formats: unknown format '" + p + "'");
        }
    }
    cfg.output.plots = out.flag("plots", cfg.output.plots);
    cfg.output.physical = out.flag("physical", cfg.output.physical);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace ctw
