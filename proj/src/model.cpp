#include "ctw/model.hpp"

#include <algorithm>
#include <cmath>

namespace ctw {

namespace {

constexpr double kShoreTol = 1e-12;

std::string side_name(bool left) { return left ? "u_L" : "u_R"; }

Expr parse_field(const std::string& name, const std::string& src) {
    if (src.empty()) throw ConfigError("model: expression '" + name + "' is missing");
    try {
        return parse(src);
    } catch (const ParseError& e) {
        throw ConfigError("model: cannot parse " + name + ": " + e.what());
    }
}

void require_vars(const std::string& name, const Expr& e, bool allow_u, bool allow_v) {
    if ((!allow_u && e.depends_on(Var::U)) || (!allow_v && e.depends_on(Var::V)))
        throw ConfigError("model: " + name + " may only depend on " +
                          std::string(allow_u && allow_v ? "u, v" : allow_u ? "u" : "v"));
}

bool vanishes(const DepthModel& m, double u) { return std::abs(m.F2(u)) <= kShoreTol && m.F1(u) > 0.0; }

}  // namespace

CaseTag parse_case(const std::string& s) {
    if (s == "A" || s == "a") return CaseTag::A;
    if (s == "B" || s == "b") return CaseTag::B;
    if (s == "C" || s == "c") return CaseTag::C;
    throw ConfigError("model: unknown case tag '" + s + "' (expected A, B or C)");
}

const char* case_name(CaseTag c) { return c == CaseTag::A ? "A" : c == CaseTag::B ? "B" : "C"; }

DepthModel load_model(const ModelSpec& spec) {
    DepthModel m;
    m.u_left = spec.u_left;
    m.u_right = spec.u_right;
    m.tag = spec.tag;
    m.mu = spec.mu;
    if (spec.mu != 0 && spec.mu != 1) throw ConfigError("model: mu must be 0 or 1");
    if (!(spec.u_left < spec.u_right)) throw ConfigError("model: u_left must be below u_right");
    m.f1 = parse_field("f1", spec.f1);
    m.f2 = parse_field("f2", spec.f2);
    m.g = parse_field("g", spec.g);
    m.d1 = parse_field("d1", spec.d1.empty() ? "0" : spec.d1);
    require_vars("f1", m.f1, true, false);
    require_vars("f2", m.f2, true, false);
    require_vars("g", m.g, false, true);

    const bool finite_l = std::isfinite(m.u_left), finite_r = std::isfinite(m.u_right);
    for (bool left : {true, false}) {
        const bool shore = left ? m.shore_left() : m.shore_right();
        const double end = left ? m.u_left : m.u_right;
        if (shore) {
            if (!(left ? finite_l : finite_r)) throw ConfigError("model: declared shore " + side_name(left) + " must be finite");
            Dual d = m.f2.eval_dual(Bindings().set(Var::U, end), Var::U);
            if (std::abs(d.value) > kShoreTol) throw ConfigError("f2 does not vanish at declared shore " + side_name(left));
            if (std::abs(d.derivative) <= kShoreTol)
                throw ConfigError("f2 has a degenerate zero at declared shore " + side_name(left));
            if (!(m.F1(end) > 0.0)) throw ConfigError("f1 must be positive at shore " + side_name(left));
            for (int j = 0; j < 256; ++j) {
                double v = 2.0 * M_PI * j / 256;
                if (std::abs(m.D1(end, v)) > kShoreTol) throw ConfigError("D1 does not vanish at shore " + side_name(left));
            }
        } else if (left ? finite_l : finite_r) {
            const double span = std::isfinite(m.u_right - m.u_left) ? m.u_right - m.u_left : 1.0;
            for (int j = 0; j <= 64; ++j) {
                double u = left ? end + 0.05 * span * j / 64 : end - 0.05 * span * j / 64;
                if (!(m.F2(u) > 1e-8)) throw ConfigError("f2 is not bounded away from 0 near non-shore endpoint " + side_name(left));
            }
        }
    }
    if (finite_l && finite_r) {
        for (int j = 1; j < 1024; ++j) {
            double u = m.u_left + (m.u_right - m.u_left) * j / 1024;
            if (!(m.F2(u) > 0.0)) throw ConfigError("f2 must be positive inside the cylinder (fails at u=" + std::to_string(u) + ")");
        }
    }
    for (int j = 0; j < 1024; ++j) {
        double g = m.G(2.0 * M_PI * j / 1024);
        if (!std::isfinite(g)) throw ConfigError("g is not finite on [0, 2pi]");
    }
    CaseTag detected = classify_case(m);
    if (detected != m.tag)
        throw ConfigError(std::string("model: configured case ") + case_name(m.tag) + " but f behaves as case " + case_name(detected));
    return m;
}

CaseTag classify_case(const DepthModel& m) {
    const bool inf_l = std::isfinite(m.u_left) && vanishes(m, m.u_left);
    const bool inf_r = std::isfinite(m.u_right) && vanishes(m, m.u_right);
    if (!inf_l && !inf_r) return CaseTag::A;
    if (inf_l && inf_r) return CaseTag::B;
    if (inf_l) return CaseTag::C;
    throw ConfigError("model: a shore only at u_R is not supported; reflect u -> -u so the shore is on the left");
}

double depth(const DepthModel& m, double u, double v) {
    double f2 = m.F2(u);
    return f2 / (m.F1(u) + f2 * m.G(v));
}

double h_sub_raw(const DepthModel& m, double u, double v, double pu, double pv) { return m.D1(u, v) * (pu * pu + pv * pv); }

double h_sub_on_shell(const DepthModel& m, double E, double u, double v) {
    return m.D1(u, v) * E * (m.F1(u) + m.F2(u) * m.G(v)) / m.F2(u);
}

}  // namespace ctw
