// External solver subprocess handling and solution parsing.
#include "greenplan/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "greenplan/export.hpp"

namespace greenplan {

namespace fs = std::filesystem;

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::timeout: return "timeout";
        default: return "error";
    }
}

namespace {

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    size_t pos = 0;
    while ((pos = tmpl.find(key, pos)) != std::string::npos) {
        tmpl.replace(pos, key.size(), value);
        pos += value.size();
    }
    return tmpl;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Path of the running executable's directory, when the OS exposes it.
fs::path exe_dir() {
    std::error_code ec;
    fs::path p = fs::read_symlink("/proc/self/exe", ec);
    if (ec) return {};
    return p.parent_path();
}

bool parse_number(const std::string& s, double& out) {
    try {
        size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (...) {
        return false;
    }
}

} // namespace

std::string default_solver_template() {
    if (const char* env = std::getenv("GREENPLAN_SOLVER"); env && *env) return env;
    const fs::path dir = exe_dir();
    for (const fs::path& cand : {dir / "milp_solve.py", dir / "tools" / "milp_solve.py",
                                dir.parent_path() / "tools" / "milp_solve.py"}) {
        std::error_code ec;
        if (!cand.empty() && fs::exists(cand, ec))
            return "python3 " + cand.string() +
                   " --model {model} --solution {solution} --time-limit {time_limit} --gap {gap}";
    }
    throw SolverError("no external solver configured: set GREENPLAN_SOLVER or keep milp_solve.py "
                      "next to the binaries");
}

RawSolution parse_solution_text(const std::string& text) {
    RawSolution sol;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }

    auto classify = [](const std::string& status_line) {
        std::string s;
        for (char ch : status_line) s += static_cast<char>(std::tolower(ch));
        if (s == "optimal") return SolveStatus::optimal;
        if (s == "feasible") return SolveStatus::feasible;
        if (s == "infeasible") return SolveStatus::infeasible;
        if (s == "time limit reached" || s == "timeout") return SolveStatus::timeout;
        return SolveStatus::error;
    };

    size_t i = 0;
    bool highs_style = false;
    for (const auto& l : lines)
        if (l == "Model status") { highs_style = true; break; }

    if (highs_style) {
        while (i < lines.size() && lines[i] != "Model status") ++i;
        ++i;
        while (i < lines.size() && lines[i].empty()) ++i;
        if (i >= lines.size()) throw SolverError("solution file ends after the status header");
        sol.message = lines[i];
        sol.status = classify(lines[i]);
        for (; i < lines.size(); ++i) {
            std::istringstream ls(lines[i]);
            std::string a, b;
            if (lines[i].rfind("Objective", 0) == 0) {
                ls >> a >> b;
                double obj;
                if (!parse_number(b, obj)) throw SolverError("bad objective line: " + lines[i]);
                sol.objective = obj;
            } else if (lines[i].rfind("# Columns", 0) == 0) {
                std::string hash, word, count;
                ls >> hash >> word >> count;
                double n = 0;
                if (!parse_number(count, n)) throw SolverError("bad column count: " + lines[i]);
                for (int k = 0; k < static_cast<int>(n) && ++i < lines.size();) {
                    std::istringstream vs(lines[i]);
                    std::string name, val;
                    if (vs >> name >> val) {
                        double v;
                        if (!parse_number(val, v))
                            throw SolverError("bad value for column " + name + ": " + val);
                        sol.values[name] = v;
                        ++k;
                    }
                }
            } else if (lines[i].rfind("# mip_dual_bound", 0) == 0) {
                std::string hash, word, val;
                ls >> hash >> word >> val;
                parse_number(val, sol.best_bound);
            } else if (lines[i].rfind("# mip_gap", 0) == 0) {
                std::string hash, word, val;
                ls >> hash >> word >> val;
                parse_number(val, sol.gap);
            }
        }
        if (sol.has_solution() && sol.values.empty())
            throw SolverError("solver reported a solution but no column section was found");
        return sol;
    }

    // generic two-column format
    sol.status = SolveStatus::optimal;
    for (; i < lines.size(); ++i) {
        const std::string& l = lines[i];
        if (l.empty() || l[0] == '#') continue;
        std::istringstream ls(l);
        std::string a, b;
        if (!(ls >> a >> b)) throw SolverError("bad solution line: " + l);
        std::string lower = a;
        for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
        if (lower == "objective" || lower == "obj") {
            if (!parse_number(b, sol.objective)) throw SolverError("bad objective line: " + l);
            continue;
        }
        if (lower == "status") {
            sol.message = b;
            sol.status = classify(b);
            continue;
        }
        double v;
        if (!parse_number(b, v)) throw SolverError("bad value for column " + a + ": " + b);
        sol.values[a] = v;
    }
    if (sol.values.empty() && sol.status == SolveStatus::optimal)
        throw SolverError("solution text contains no variable values");
    return sol;
}

std::string format_solution(const RawSolution& sol) {
    std::ostringstream os;
    os << "status " << to_string(sol.status) << "\n";
    char buf[40];
    if (std::isfinite(sol.objective)) {
        std::snprintf(buf, sizeof buf, "%.17g", sol.objective);
        os << "objective " << buf << "\n";
    }
    for (const auto& [name, value] : sol.values) {
        std::snprintf(buf, sizeof buf, "%.17g", value);
        os << name << " " << buf << "\n";
    }
    return os.str();
}

RawSolution solve(const MilpModel& model, const SolverConfig& config) {
    if (config.format != "lp" && config.format != "mps")
        throw SolverError("unknown model format \"" + config.format + "\" (use lp or mps)");

    const std::string tmpl =
        config.command_template.empty() ? default_solver_template() : config.command_template;

    fs::path base = config.work_dir.empty() ? fs::temp_directory_path() : fs::path(config.work_dir);
    std::error_code ec;
    fs::create_directories(base, ec);
    static std::mt19937_64 rng{std::random_device{}()};
    fs::path dir;
    do {
        dir = base / ("gp-solve-" + std::to_string(rng()));
    } while (fs::exists(dir));
    fs::create_directories(dir);

    const fs::path model_path = dir / ("model." + config.format);
    const fs::path sol_path = dir / "solution.sol";
    const fs::path log_path = dir / "solver.log";
    write_file(model_path.string(), config.format == "lp" ? write_lp(model) : write_mps(model));

    std::string cmd = tmpl;
    cmd = substitute(cmd, "{model}", model_path.string());
    cmd = substitute(cmd, "{solution}", sol_path.string());
    cmd = substitute(cmd, "{time_limit}", std::to_string(config.time_limit_s));
    cmd = substitute(cmd, "{gap}", std::to_string(config.mip_rel_gap));
    cmd = substitute(cmd, "{threads}", std::to_string(config.threads));
    cmd += " > " + log_path.string() + " 2>&1";

    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system(cmd.c_str());
    const auto t1 = std::chrono::steady_clock::now();

    auto cleanup = [&] {
        if (!config.keep_files) fs::remove_all(dir, ec);
    };

    if (rc != 0 || !fs::exists(sol_path)) {
        std::string log = read_file(log_path);
        cleanup();
        throw SolverError("external solver failed (exit " + std::to_string(rc) + "): " +
                          (log.size() > 2000 ? log.substr(log.size() - 2000) : log));
    }

    RawSolution sol;
    try {
        sol = parse_solution_text(read_file(sol_path));
    } catch (...) {
        cleanup();
        throw;
    }
    cleanup();
    sol.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

    if (sol.has_solution()) {
        double recomputed = model.obj_constant;
        for (const auto& v : model.vars) {
            auto it = sol.values.find(v.name);
            if (it != sol.values.end()) recomputed += v.obj * it->second;
        }
        const double tol = 1e-6 * std::max(1.0, std::abs(sol.objective));
        if (std::abs(recomputed - sol.objective) > tol)
            throw SolverError("objective mismatch: solver reported " + std::to_string(sol.objective) +
                              " but values give " + std::to_string(recomputed));
        sol.objective = recomputed;
    }
    return sol;
}

} // namespace greenplan
