// LP and MPS serialization.
#include "greenplan/export.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace greenplan {

namespace {

constexpr size_t name_limit = 255;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_name(const std::string& n) {
    if (n.size() > name_limit)
        throw std::invalid_argument("name longer than format limit: " + n);
}

} // namespace

std::string write_lp(const MilpModel& m) {
    for (const auto& v : m.vars) check_name(v.name);
    for (const auto& r : m.rows) check_name(r.name);

    std::string out;
    out.reserve(1 << 20);
    out += "\\ " + m.name + "\n";
    out += "Minimize\n obj:";
    {
        bool any = false;
        for (const auto& v : m.vars) {
            if (v.obj == 0.0) continue;
            if (v.obj < 0.0)
                out += " - " + num(-v.obj);
            else
                out += any ? " + " + num(v.obj) : " " + num(v.obj);
            out += " " + v.name;
            any = true;
        }
        if (m.obj_constant != 0.0) {
            if (m.obj_constant < 0.0)
                out += " - " + num(-m.obj_constant);
            else
                out += any ? " + " + num(m.obj_constant) : " " + num(m.obj_constant);
            any = true;
        }
        if (!any) out += " 0 " + m.vars.front().name;
        out += "\n";
    }
    out += "Subject To\n";
    for (const auto& r : m.rows) {
        out += " " + r.name + ":";
        bool any = false;
        for (const auto& [c, coef] : r.terms) {
            if (coef < 0.0)
                out += " - " + num(-coef);
            else
                out += any ? " + " + num(coef) : " " + num(coef);
            out += " " + m.vars[c].name;
            any = true;
        }
        if (!any) out += " 0 " + m.vars.front().name;
        out += r.sense == 'L' ? " <= " : r.sense == 'G' ? " >= " : " = ";
        out += num(r.rhs) + "\n";
    }
    out += "Bounds\n";
    for (const auto& v : m.vars) {
        if (v.integer) {
            // binaries default to [0,1]; only fixings need a line
            if (v.lb == v.ub) out += " " + v.name + " = " + num(v.lb) + "\n";
        } else {
            // continuous default is [0, +inf); ours all use it
            if (v.lb != 0.0) out += " " + v.name + " >= " + num(v.lb) + "\n";
            if (v.ub != std::numeric_limits<double>::infinity())
                out += " " + v.name + " <= " + num(v.ub) + "\n";
        }
    }
    out += "Binary\n";
    for (const auto& v : m.vars)
        if (v.integer) out += " " + v.name + "\n";
    out += "End\n";
    return out;
}

std::string write_mps(const MilpModel& m) {
    for (const auto& v : m.vars) check_name(v.name);
    for (const auto& r : m.rows) check_name(r.name);

    std::string out;
    out.reserve(1 << 20);
    out += "NAME          " + m.name + "\n";
    out += "ROWS\n N  obj\n";
    for (const auto& r : m.rows) {
        out += r.sense == 'L' ? " L  " : r.sense == 'G' ? " G  " : " E  ";
        out += r.name + "\n";
    }

    // transpose rows into per-column entry lists, preserving row order
    std::vector<std::vector<std::pair<int, double>>> cols(m.vars.size());
    for (int ri = 0; ri < static_cast<int>(m.rows.size()); ++ri)
        for (const auto& [c, coef] : m.rows[ri].terms) cols[c].emplace_back(ri, coef);

    out += "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    auto set_int = [&](bool want) {
        if (want == in_int) return;
        char buf[80];
        std::snprintf(buf, sizeof buf, "    MARKER%04d  'MARKER'  '%s'\n", marker++,
                      want ? "INTORG" : "INTEND");
        out += buf;
        in_int = want;
    };
    for (size_t c = 0; c < m.vars.size(); ++c) {
        const Variable& v = m.vars[c];
        set_int(v.integer);
        if (v.obj != 0.0) out += "    " + v.name + "  obj  " + num(v.obj) + "\n";
        for (const auto& [ri, coef] : cols[c])
            out += "    " + v.name + "  " + m.rows[ri].name + "  " + num(coef) + "\n";
        if (v.obj == 0.0 && cols[c].empty())
            out += "    " + v.name + "  obj  0\n"; // keep the column declared
    }
    set_int(false);

    out += "RHS\n";
    if (m.obj_constant != 0.0) out += "    rhs  obj  " + num(-m.obj_constant) + "\n";
    for (const auto& r : m.rows)
        if (r.rhs != 0.0) out += "    rhs  " + r.name + "  " + num(r.rhs) + "\n";

    out += "BOUNDS\n";
    for (const auto& v : m.vars) {
        if (v.integer) {
            if (v.lb == v.ub)
                out += " FX bnd  " + v.name + "  " + num(v.lb) + "\n";
            else
                out += " BV bnd  " + v.name + "\n";
        } else {
            if (v.lb != 0.0) out += " LO bnd  " + v.name + "  " + num(v.lb) + "\n";
            if (v.ub != std::numeric_limits<double>::infinity())
                out += " UP bnd  " + v.name + "  " + num(v.ub) + "\n";
        }
    }
    out += "ENDATA\n";
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string fnv1a64_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace greenplan
