#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core.hpp"
#include "pathsum.hpp"

namespace dqca {
namespace io {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, locale independent; round-trips every double.
inline std::string fmt(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// State files: {"sites":[{"x":int,"R":[re,im],"L":[re,im]}, ...]}
// ---------------------------------------------------------------------------

namespace detail {

inline Cplx read_component(const nlohmann::json& site, const char* name, std::size_t index) {
    const std::string where = "sites[" + std::to_string(index) + "]." + name;
    if (!site.contains(name)) throw parse_error("state file: missing field " + where);
    const auto& pair = site[name];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        throw parse_error("state file: field " + where + " must be [re, im]");
    Cplx v(pair[0].get<double>(), pair[1].get<double>());
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw parse_error("state file: field " + where + " must be finite");
    return v;
}

}  // namespace detail

inline FieldState parse_state(const std::string& text, std::string* warning = nullptr) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("state file: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sites"))
        throw parse_error("state file: top-level object with a \"sites\" array expected");
    const auto& sites = doc["sites"];
    if (!sites.is_array()) throw parse_error("state file: field sites must be an array");
    if (sites.empty()) throw parse_error("state file: sites array is empty");

    int min_x = 0, max_x = 0;
    std::vector<std::pair<int, Spinor>> parsed;
    parsed.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto& site = sites[i];
        const std::string where = "sites[" + std::to_string(i) + "]";
        if (!site.is_object()) throw parse_error("state file: " + where + " must be an object");
        if (!site.contains("x") || !site["x"].is_number_integer())
            throw parse_error("state file: missing integer field " + where + ".x");
        int x = site["x"].get<int>();
        Spinor s{detail::read_component(site, "R", i), detail::read_component(site, "L", i)};
        if (parsed.empty()) {
            min_x = max_x = x;
        } else {
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
        }
        parsed.emplace_back(x, s);
    }

    FieldState state;
    state.offset = min_x;
    state.amps.assign(static_cast<std::size_t>(max_x - min_x) + 1, Spinor{});
    for (const auto& [x, s] : parsed) {
        auto& dst = state.amps[static_cast<std::size_t>(x - min_x)];
        dst.up += s.up;
        dst.lo += s.lo;
    }

    if (warning) {
        warning->clear();
        double nsq = state.norm_sq();
        if (std::abs(nsq - 1.0) > 1e-9)
            *warning = "state norm^2 = " + fmt(nsq) + " deviates from 1";
    }
    return state;
}

inline FieldState load_state(const std::string& path, std::string* warning = nullptr) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open state file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state(buf.str(), warning);
}

inline std::string state_to_json(const FieldState& state) {
    std::string out = "{\"sites\":[";
    bool first = true;
    for (int x = state.min_x(); !state.empty() && x <= state.max_x(); ++x) {
        Spinor s = state.at(x);
        if (!first) out += ',';
        first = false;
        out += "{\"x\":" + std::to_string(x);
        out += ",\"R\":[" + fmt(s.up.real()) + ',' + fmt(s.up.imag()) + ']';
        out += ",\"L\":[" + fmt(s.lo.real()) + ',' + fmt(s.lo.imag()) + "]}";
    }
    out += "]}\n";
    return out;
}

inline void write_state(const FieldState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open output file: " + path);
    out << state_to_json(state);
}

// ---------------------------------------------------------------------------
// Evolution and kernel writers
// ---------------------------------------------------------------------------

/// Per-site rows over the window [lo, hi] (normally the causal cone of the
/// input, so structurally-zero edge sites are still listed).
inline void write_evolution_csv(std::ostream& os, const FieldState& state, int lo, int hi) {
    os << "x,prob,reR,imR,reL,imL\n";
    for (int x = lo; x <= hi; ++x) {
        Spinor s = state.at(x);
        os << x << ',' << fmt(s.norm_sq()) << ',' << fmt(s.up.real()) << ',' << fmt(s.up.imag())
           << ',' << fmt(s.lo.real()) << ',' << fmt(s.lo.imag()) << '\n';
    }
}

inline void write_evolution_json(std::ostream& os, const FieldState& state, int lo, int hi) {
    os << "{\"time\":" << state.time << ",\"sites\":[";
    for (int x = lo; x <= hi; ++x) {
        Spinor s = state.at(x);
        if (x > lo) os << ',';
        os << "{\"x\":" << x << ",\"prob\":" << fmt(s.norm_sq()) << ",\"R\":[" << fmt(s.up.real())
           << ',' << fmt(s.up.imag()) << "],\"L\":[" << fmt(s.lo.real()) << ',' << fmt(s.lo.imag())
           << "]}";
    }
    os << "]}\n";
}

inline void write_kernel_csv(std::ostream& os, const pathsum::PropagatorKernel& kernel) {
    os << "d,row,col,re,im\n";
    for (int d = -kernel.t; d <= kernel.t; ++d)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                Cplx v = kernel.at(d)(r, c);
                os << d << ',' << r << ',' << c << ',' << fmt(v.real()) << ',' << fmt(v.imag())
                   << '\n';
            }
}

inline void write_kernel_json(std::ostream& os, const pathsum::PropagatorKernel& kernel) {
    os << "{\"t\":" << kernel.t << ",\"entries\":[";
    bool first = true;
    for (int d = -kernel.t; d <= kernel.t; ++d)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                Cplx v = kernel.at(d)(r, c);
                if (!first) os << ',';
                first = false;
                os << "{\"d\":" << d << ",\"row\":" << r << ",\"col\":" << c << ",\"re\":"
                   << fmt(v.real()) << ",\"im\":" << fmt(v.imag()) << '}';
            }
    os << "]}\n";
}

}  // namespace io
}  // namespace dqca
