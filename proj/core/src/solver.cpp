#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "fortifynet/error.hpp"
#include "fortifynet/solver_bridge.hpp"

#ifndef FORTIFYNET_DEFAULT_SOLVER
#define FORTIFYNET_DEFAULT_SOLVER ""
#endif

namespace fs = std::filesystem;

namespace fortifynet {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

void fill_zeros(RawSolution& r, const MilpModel& m) {
    for (const auto& v : m.variables()) r.values.emplace(v.name, 0.0);
}

RawSolution parse_highs(const std::string& text) {
    RawSolution r;
    std::istringstream in(text);
    std::string line, model_status, primal;
    enum { Start, Status, Primal, Cols, Done } st = Start;
    long long cols_left = 0;
    bool have_obj = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (st == Start) {
            if (line == "Model status") st = Status;
            continue;
        }
        if (st == Status) {
            if (line.empty()) continue;
            model_status = line;
            st = Primal;
            continue;
        }
        if (st == Primal) {
            if (line == "# Primal solution values") {
                std::getline(in, primal);
                primal = trim(primal);
            } else if (starts_with(line, "Objective ")) {
                r.objective = std::stod(line.substr(10));
                have_obj = true;
            } else if (starts_with(line, "# Columns ")) {
                cols_left = std::stoll(line.substr(10));
                st = cols_left > 0 ? Cols : Done;
            }
            continue;
        }
        if (st == Cols) {
            const auto sp = line.find_last_of(" \t");
            if (sp == std::string::npos) throw SolverError("malformed HiGHS column line: " + line);
            r.values[trim(line.substr(0, sp))] = std::stod(line.substr(sp + 1));
            if (--cols_left == 0) st = Done;
            continue;
        }
    }
    const std::string ms = lower(model_status);
    if (ms == "optimal")
        r.status = SolveStatus::Optimal;
    else if (ms == "infeasible")
        r.status = SolveStatus::Infeasible;
    else if (ms == "unbounded")
        r.status = SolveStatus::Unbounded;
    else if (ms.find("infeasible or unbounded") != std::string::npos)
        r.status = SolveStatus::Infeasible;
    else if (primal == "Feasible")
        r.status = SolveStatus::Feasible;
    else
        r.status = SolveStatus::Error;
    if ((r.status == SolveStatus::Optimal || r.status == SolveStatus::Feasible) && (!have_obj || r.values.empty()) &&
        primal != "Feasible")
        r.status = SolveStatus::Error;
    return r;
}

RawSolution parse_cbc(const std::string& text) {
    RawSolution r;
    std::istringstream in(text);
    std::string first;
    std::getline(in, first);
    const std::string head = lower(trim(first));
    const auto objpos = head.find("objective value");
    if (objpos != std::string::npos) {
        try {
            r.objective = std::stod(head.substr(objpos + 15));
        } catch (const std::exception&) {
        }
    }
    if (starts_with(head, "optimal"))
        r.status = SolveStatus::Optimal;
    else if (starts_with(head, "infeasible") || starts_with(head, "integer infeasible"))
        r.status = SolveStatus::Infeasible;
    else if (starts_with(head, "unbounded"))
        r.status = SolveStatus::Unbounded;
    else if (starts_with(head, "stopped") && head.find("no integer solution") == std::string::npos)
        r.status = SolveStatus::Feasible;
    else
        r.status = SolveStatus::Error;
    for (std::string line; std::getline(in, line);) {
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (!tok.empty() && tok[0] == "**") tok.erase(tok.begin());
        if (tok.size() < 3) continue;
        r.values[tok[1]] = std::stod(tok[2]);
    }
    return r;
}

RawSolution parse_name_value(const std::string& text) {
    RawSolution r;
    r.status = SolveStatus::Optimal;
    bool have_obj = false;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        ls >> a >> b;
        if (b.empty()) throw SolverError("malformed solution line: " + line);
        if (lower(a) == "status") {
            const std::string s = lower(b);
            r.status = s == "optimal" ? SolveStatus::Optimal
                       : s == "feasible" ? SolveStatus::Feasible
                       : s == "infeasible" ? SolveStatus::Infeasible
                       : s == "unbounded" ? SolveStatus::Unbounded
                                          : SolveStatus::Error;
        } else if (lower(a) == "objective") {
            r.objective = std::stod(b);
            have_obj = true;
        } else {
            r.values[a] = std::stod(b);
        }
    }
    (void)have_obj;
    return r;
}

std::string xml_unescape(std::string s) {
    s = replace_all(s, "&lt;", "<");
    s = replace_all(s, "&gt;", ">");
    s = replace_all(s, "&quot;", "\"");
    s = replace_all(s, "&apos;", "'");
    return replace_all(s, "&amp;", "&");
}

RawSolution parse_xml(const std::string& text) {
    RawSolution r;
    std::smatch m;
    static const std::regex obj_re(R"re(objectiveValue\s*=\s*"([^"]*)")re");
    static const std::regex st_re(R"re(solutionStatusString\s*=\s*"([^"]*)")re");
    static const std::regex var_re(R"re(<variable\b[^>]*>)re");
    static const std::regex name_re(R"re(\bname\s*=\s*"([^"]*)")re");
    static const std::regex val_re(R"re(\bvalue\s*=\s*"([^"]*)")re");
    if (std::regex_search(text, m, obj_re)) r.objective = std::stod(m[1]);
    const std::string status = std::regex_search(text, m, st_re) ? lower(m[1].str()) : std::string();
    if (status.find("infeasible") != std::string::npos)
        r.status = SolveStatus::Infeasible;
    else if (status.find("unbounded") != std::string::npos)
        r.status = SolveStatus::Unbounded;
    else if (status.find("optimal") != std::string::npos && status.find("tolerance") == std::string::npos)
        r.status = SolveStatus::Optimal;
    else if (!status.empty())
        r.status = SolveStatus::Feasible;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), var_re); it != std::sregex_iterator(); ++it) {
        const std::string tag = it->str();
        std::smatch a, b;
        if (std::regex_search(tag, a, name_re) && std::regex_search(tag, b, val_re))
            r.values[xml_unescape(a[1])] = std::stod(b[1]);
    }
    return r;
}

void parse_log(RawSolution& r, SolutionDialect d) {
    std::istringstream in(r.log);
    for (std::string line; std::getline(in, line);) {
        const std::string t = trim(line);
        try {
            if (d == SolutionDialect::Highs) {
                if (starts_with(t, "Dual bound")) r.best_bound = std::stod(t.substr(10));
                if (starts_with(t, "Gap") && t.find('%') != std::string::npos)
                    r.gap = std::stod(t.substr(3, t.find('%') - 3)) / 100.0;
            } else if (d == SolutionDialect::Cbc) {
                if (starts_with(t, "Lower bound:")) r.best_bound = std::stod(t.substr(12));
                if (starts_with(t, "Gap:")) r.gap = std::stod(t.substr(4));
            }
        } catch (const std::exception&) {
        }
    }
}

}  // namespace

std::string dialect_name(SolutionDialect d) {
    switch (d) {
        case SolutionDialect::NameValue: return "name-value";
        case SolutionDialect::CplexXml: return "cplex-xml";
        case SolutionDialect::Cbc: return "cbc";
        case SolutionDialect::Highs: return "highs";
    }
    return {};
}

std::optional<SolutionDialect> parse_dialect(const std::string& s) {
    for (auto d : {SolutionDialect::NameValue, SolutionDialect::CplexXml, SolutionDialect::Cbc, SolutionDialect::Highs})
        if (dialect_name(d) == s) return d;
    return std::nullopt;
}

SolverConfig solver_config_for(const std::string& executable) {
    SolverConfig c;
    c.executable = executable;
    const std::string base = lower(fs::path(executable).filename().string());
    if (base.find("highs") != std::string::npos) {
        c.dialect = SolutionDialect::Highs;
        c.args_template = {"--model_file", "{model}", "--solution_file", "{solution}", "--time_limit", "{time_limit}",
                           "--options_file", "{dir}/highs.opt"};
    } else if (base.find("cbc") != std::string::npos) {
        c.dialect = SolutionDialect::Cbc;
        c.args_template = {"{model}", "sec", "{time_limit}", "ratio", "{gap}", "threads", "{threads}",
                           "solve", "solu", "{solution}"};
    } else {
        c.dialect = SolutionDialect::NameValue;
        c.args_template = {"{model}", "{solution}"};
    }
    return c;
}

std::string default_solver_executable() {
    if (const char* env = std::getenv("FORTIFYNET_SOLVER"); env && *env) return env;
    return FORTIFYNET_DEFAULT_SOLVER;
}

RawSolution parse_solution(const std::string& text, SolutionDialect dialect, const MilpModel& model) {
    RawSolution r;
    try {
        switch (dialect) {
            case SolutionDialect::Highs: r = parse_highs(text); break;
            case SolutionDialect::Cbc:
                r = parse_cbc(text);
                if (r.status == SolveStatus::Optimal || r.status == SolveStatus::Feasible) fill_zeros(r, model);
                break;
            case SolutionDialect::NameValue: r = parse_name_value(text); break;
            case SolutionDialect::CplexXml: r = parse_xml(text); break;
        }
    } catch (const std::invalid_argument& e) {
        throw SolverError(std::string("unparsable solution file: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw SolverError(std::string("unparsable solution file: ") + e.what());
    }
    r.objective += model.objective().constant;
    return r;
}

RawSolution solve(const MilpModel& model, const SolverConfig& config) {
    if (!(config.time_limit > 0)) throw ValidationError("time limit must be positive");
    if (!(config.gap_tolerance >= 0)) throw ValidationError("gap tolerance must be nonnegative");
    if (config.executable.empty()) throw SolverError("no solver executable configured");
    if (access(config.executable.c_str(), X_OK) != 0) throw SolverError("solver not executable: " + config.executable);

    const fs::path parent = config.work_dir.empty() ? fs::temp_directory_path() : fs::path(config.work_dir);
    fs::create_directories(parent);
    std::string tmpl = (parent / "fortifynet-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw SolverError("cannot create a temporary directory under " + parent.string());
    const fs::path dir = tmpl;
    const fs::path model_path = dir / "model.lp";
    const fs::path sol_path = dir / "solution.sol";
    const fs::path log_path = dir / "solver.log";
    {
        std::ofstream f(model_path);
        f << write_lp(model);
        if (!f) throw SolverError("cannot write " + model_path.string());
    }
    if (config.dialect == SolutionDialect::Highs) {
        std::ofstream f(dir / "highs.opt");
        f << "mip_rel_gap = " << fmt(config.gap_tolerance) << "\n";
        f << "threads = " << config.threads << "\n";
        f << "random_seed = 0\n";
        f << "mip_allow_restart = false\n";
    }

    std::vector<std::string> args{config.executable};
    for (std::string a : config.args_template) {
        a = replace_all(a, "{model}", model_path.string());
        a = replace_all(a, "{solution}", sol_path.string());
        a = replace_all(a, "{time_limit}", fmt(config.time_limit));
        a = replace_all(a, "{gap}", fmt(config.gap_tolerance));
        a = replace_all(a, "{threads}", std::to_string(config.threads));
        a = replace_all(a, "{dir}", dir.string());
        args.push_back(a);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const pid_t pid = fork();
    if (pid < 0) throw SolverError("fork failed");
    if (pid == 0) {
        const int fd = open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd >= 0) {
            dup2(fd, 1);
            dup2(fd, 2);
            close(fd);
        }
        if (chdir(dir.c_str()) != 0) _exit(126);
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        execv(argv[0], argv.data());
        _exit(127);
    }
    const double hard_limit = config.time_limit * 1.5 + 60.0;
    int wstatus = 0;
    bool killed = false;
    for (;;) {
        const pid_t w = waitpid(pid, &wstatus, WNOHANG);
        if (w == pid) break;
        if (w < 0) throw SolverError("waitpid failed");
        const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (el > hard_limit && !killed) {
            kill(pid, SIGKILL);
            killed = true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string log;
    if (fs::exists(log_path)) log = read_file(log_path.string());
    RawSolution r;
    const bool have_file = fs::exists(sol_path) && fs::file_size(sol_path) > 0;
    if (have_file) {
        r = parse_solution(read_file(sol_path.string()), config.dialect, model);
    } else {
        r.status = SolveStatus::Error;
    }
    r.log = log;
    r.seconds = seconds;
    parse_log(r, config.dialect);
    if (r.status == SolveStatus::Optimal && !r.gap) r.gap = 0.0;
    if (!have_file && !killed && WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0)
        r.log += "\nsolver exited without writing a solution";
    if (!config.keep_artifacts) {
        std::error_code ec;
        fs::remove_all(dir, ec);
    } else {
        r.log += "\nartifacts kept in " + dir.string();
    }
    return r;
}

}  // namespace fortifynet
