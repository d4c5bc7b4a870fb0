#pragma once

// Command-line front end: certify / solve / verify pipelines, majorant
// tables and the problem registry, with JSON reports and meaningful exit
// codes (0 ok, 1 rejected certificate, 2 failed bound check or a run that
// left the certified ball, 3 input/runtime error).

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kantsolve/certify.hpp"
#include "kantsolve/majorant.hpp"
#include "kantsolve/newton.hpp"
#include "kantsolve/precondition.hpp"
#include "kantsolve/problem.hpp"
#include "kantsolve/report_json.hpp"
#include "kantsolve/verify.hpp"

namespace kantsolve {

enum class Command { certify, solve, verify, majorant, problems };
enum class OutputFormat { json, table };

struct RunConfig {
    Command command = Command::certify;

    // Problem selection: builtin name or path to a problem JSON file.
    std::string problem;
    ParamMap params;
    std::optional<std::vector<double>> x0;
    std::optional<double> R;
    std::optional<double> L; // supplied Lipschitz constant
    std::optional<double> b; // direct-mode residual constant
    std::optional<VectorNormKind> norm;
    bool guard_L = false;    // cross-check a supplied L against the sampled lower bound

    int k_max = 10; // majorant table length / predicted gap count
    StopCriteria stop;
    int n_samples = 32;
    int n_pairs = 32;
    std::uint64_t seed = 42;

    std::string output; // path, empty = stdout
    OutputFormat format = OutputFormat::json;
};

namespace cli_detail {

struct ResolvedProblem {
    ProblemSpec spec;
    LipschitzSource source;
    VectorNormKind norm;
};

inline bool looks_like_file(const std::string& s) {
    return s.find('/') != std::string::npos ||
           (s.size() > 5 && s.substr(s.size() - 5) == ".json");
}

inline ResolvedProblem resolve_problem(const RunConfig& cfg) {
    if (cfg.problem.empty()) throw InvalidInput("no problem given (use --problem)");
    std::optional<Vector> x0;
    if (cfg.x0) {
        Vector v(static_cast<int>(cfg.x0->size()));
        for (std::size_t i = 0; i < cfg.x0->size(); ++i) v(static_cast<int>(i)) = (*cfg.x0)[i];
        x0 = std::move(v);
    }

    ResolvedProblem rp;
    std::optional<double> L = cfg.L;
    std::optional<VectorNormKind> norm = cfg.norm;
    if (looks_like_file(cfg.problem)) {
        LoadedProblem loaded = load_problem_file(cfg.problem);
        // flags override file values
        ParamMap params = loaded.spec.params;
        for (const auto& [k, v] : cfg.params) params[k] = v;
        std::optional<Vector> file_x0 = loaded.spec.x0.size() ? std::optional(loaded.spec.x0)
                                                              : std::nullopt;
        rp.spec = builtin(loaded.spec.name, params, x0 ? x0 : file_x0,
                          cfg.R ? cfg.R : std::optional<double>(loaded.spec.R));
        if (!L) L = loaded.L;
        if (!norm) norm = loaded.norm;
    } else {
        rp.spec = builtin(cfg.problem, cfg.params, x0, cfg.R);
    }
    rp.norm = norm.value_or(VectorNormKind::euclidean);
    if (L) {
        rp.source = cfg.guard_L ? LipschitzSource::estimate_guarded(*L)
                                : LipschitzSource::supplied(*L);
    } else {
        rp.source = LipschitzSource::known();
    }
    return rp;
}

inline std::string certificate_table(const Certificate& cert) {
    std::ostringstream os;
    os << std::setprecision(15);
    os << "status              " << to_string(cert.status) << "\n";
    if (!cert.certified()) os << "reason              " << to_string(cert.reason) << "\n";
    os << "b                   " << cert.b << "\n"
       << "L                   " << cert.L << "\n"
       << "R                   " << cert.R << "\n";
    if (cert.analysis) {
        os << "t_star              " << cert.analysis->t_star << "\n"
           << "t_star2             " << cert.analysis->t_star2 << "\n"
           << "theta               " << cert.analysis->theta << "\n";
    }
    if (cert.certified()) {
        os << "existence_radius    " << cert.existence_radius << "\n"
           << "uniqueness_radius   " << cert.uniqueness_radius
           << (cert.uniqueness_open ? " (open)" : " (closed)") << "\n"
           << "rate                " << to_string(cert.rate) << "\n";
        if (cert.quadratic_coefficient) {
            os << "quadratic_coeff     " << *cert.quadratic_coefficient << "\n";
        }
    }
    for (const auto& w : cert.warnings) os << "warning: " << w << "\n";
    return os.str();
}

inline std::string trace_table(const NewtonTrace& trace) {
    std::ostringstream os;
    os << std::setprecision(15);
    os << "   k  |x_k - x0|            |G(x_k)|              step\n";
    for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
        os << std::setw(4) << k << "  " << std::setw(20) << trace.distances_from_x0[k] << "  "
           << std::setw(20) << trace.residual_norms[k] << "  ";
        if (k < trace.step_norms.size()) os << std::setw(20) << trace.step_norms[k];
        os << "\n";
    }
    os << "stop: " << to_string(trace.stop_reason) << "\n";
    if (trace.stop_reason == StopReason::left_certified_ball) {
        os << "an iterate left the certified ball B[x0, t*]; the theory forbids this, so the "
              "inputs are unsound (L below the true constant, wrong R, or evaluator bugs)\n";
    }
    return os.str();
}

inline std::string report_table(const BoundReport& report) {
    std::ostringstream os;
    os << std::setprecision(15);
    int failed = 0;
    for (const auto& c : report.checks) failed += c.pass ? 0 : 1;
    os << "checks: " << report.checks.size() << ", failed: " << failed << "\n";
    for (const auto& c : report.checks) {
        if (!c.pass) {
            os << "FAIL " << to_string(c.id) << " k=" << c.k << " lhs=" << c.lhs
               << " rhs=" << c.rhs << " margin=" << c.margin << "\n";
        }
    }
    for (const auto& n : report.notices) os << "notice: " << n << "\n";
    os << (report.all_pass ? "ALL CHECKS PASS" : "CHECK FAILURES PRESENT") << "\n";
    return os.str();
}

inline void emit(const RunConfig& cfg, const Json& payload, const std::string& table,
                 std::ostream& out) {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.output.empty()) {
        file.open(cfg.output);
        if (!file) throw InvalidInput("cannot open output file '" + cfg.output + "'");
        sink = &file;
    }
    if (cfg.format == OutputFormat::json) {
        *sink << payload.dump(2) << "\n";
    } else {
        *sink << table;
    }
}

inline Json majorant_rows(const MajorantParams& p, int k_max) {
    const MajorantAnalysis a = analyze(p);
    const MajorantTrajectory traj = majorant_sequence(p, k_max);
    auto rows = Json::array();
    for (int k = 0; k <= k_max; ++k) {
        const double t_rec = traj.t[static_cast<std::size_t>(k)];
        const double fp = f_prime(p, t_rec);
        Json row;
        row["k"] = k;
        row["t_recursive"] = t_rec;
        row["t_closed_form"] = closed_form_t(p, k);
        row["gap"] = traj.gaps[static_cast<std::size_t>(k)];
        row["rate_factor"] = fp < 0.0 ? Json(p.L() / (-2.0 * fp)) : Json();
        rows.push_back(std::move(row));
    }
    Json j;
    j["b"] = p.b();
    j["L"] = p.L();
    j["t_star"] = a.t_star;
    j["t_star2"] = a.t_star2;
    j["theta"] = a.theta;
    j["rows"] = std::move(rows);
    return j;
}

inline std::string majorant_table(const Json& j) {
    std::ostringstream os;
    os << std::setprecision(15);
    os << "majorant f(t) = (L/2) t^2 - t + b with b = " << j["b"].get<double>()
       << ", L = " << j["L"].get<double>() << ", t* = " << j["t_star"].get<double>() << "\n";
    os << "   k  t_k (recursive)       t_k (closed form)     gap t*-t_k            rate factor\n";
    for (const auto& row : j["rows"]) {
        os << std::setw(4) << row["k"].get<int>() << "  " << std::setw(20)
           << row["t_recursive"].get<double>() << "  " << std::setw(20)
           << row["t_closed_form"].get<double>() << "  " << std::setw(20)
           << row["gap"].get<double>() << "  ";
        if (row["rate_factor"].is_number()) {
            os << std::setw(20) << row["rate_factor"].get<double>();
        } else {
            os << std::setw(20) << "-";
        }
        os << "\n";
    }
    return os.str();
}

} // namespace cli_detail

/// Execute a parsed configuration. Returns the process exit code.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    using namespace cli_detail;
    try {
        switch (cfg.command) {
            case Command::majorant: {
                if (!cfg.b || !cfg.L) throw InvalidInput("majorant: need --b and --L");
                const MajorantParams p(*cfg.b, *cfg.L);
                const Json j = majorant_rows(p, cfg.k_max);
                emit(cfg, j, majorant_table(j), out);
                return 0;
            }
            case Command::problems: {
                auto rows = Json::array();
                for (const auto& name : builtin_names()) {
                    const ProblemSpec ps = builtin(name);
                    Json row;
                    row["name"] = name;
                    row["dim"] = ps.dim;
                    row["R"] = ps.R;
                    row["known_L"] = ps.known_L ? Json(*ps.known_L) : Json();
                    row["known_roots"] = ps.known_roots.size();
                    row["params"] = ps.params;
                    rows.push_back(std::move(row));
                }
                Json j;
                j["problems"] = std::move(rows);
                std::ostringstream table;
                for (const auto& name : builtin_names()) table << name << "\n";
                emit(cfg, j, table.str(), out);
                return 0;
            }
            case Command::certify: {
                Certificate cert;
                if (cfg.b) {
                    if (!cfg.L || !cfg.R) throw InvalidInput("certify: need --L and --R with --b");
                    cert = certify(*cfg.b, *cfg.L, *cfg.R,
                                   cfg.norm.value_or(VectorNormKind::euclidean), cfg.k_max);
                } else {
                    const ResolvedProblem rp = resolve_problem(cfg);
                    try {
                        cert = certify_problem(rp.spec, rp.source, cfg.k_max, rp.norm,
                                               cfg.n_samples, cfg.seed)
                                   .second;
                    } catch (const SingularBasePoint& e) {
                        cert.status = CertStatus::rejected;
                        cert.reason = RejectReason::singular_base_point;
                        cert.R = rp.spec.R;
                        cert.norm = rp.norm;
                        cert.warnings.push_back(e.what());
                    }
                }
                emit(cfg, to_json(cert), certificate_table(cert), out);
                return cert.certified() ? 0 : 1;
            }
            case Command::solve:
            case Command::verify: {
                const ResolvedProblem rp = resolve_problem(cfg);
                Json payload;
                Certificate cert;
                std::optional<PreconditionedSystem> pcs;
                try {
                    auto [system, certificate] = certify_problem(rp.spec, rp.source, cfg.k_max,
                                                                 rp.norm, cfg.n_samples, cfg.seed);
                    pcs.emplace(std::move(system));
                    cert = std::move(certificate);
                } catch (const SingularBasePoint& e) {
                    cert.status = CertStatus::rejected;
                    cert.reason = RejectReason::singular_base_point;
                    cert.R = rp.spec.R;
                    cert.norm = rp.norm;
                    cert.warnings.push_back(e.what());
                }
                payload["certificate"] = to_json(cert);
                if (!cert.certified()) {
                    emit(cfg, payload, certificate_table(cert), out);
                    return 1;
                }

                const NewtonTrace trace = solve(*pcs, cert, cfg.stop);
                payload["trace"] = to_json(trace);
                std::string table = certificate_table(cert) + "\n" + trace_table(trace);
                const bool left = trace.stop_reason == StopReason::left_certified_ball;

                if (cfg.command == Command::solve) {
                    emit(cfg, payload, table, out);
                    return left ? 2 : 0;
                }

                BoundReport report;
                if (trace.iterates.size() >= 2) {
                    VerifyOptions opts;
                    opts.n_samples = cfg.n_samples;
                    opts.n_pairs = cfg.n_pairs;
                    opts.seed = cfg.seed;
                    report = full_verification(*pcs, cert, trace, opts);
                    if (left) {
                        report.notices.push_back(
                            "LEFT_CERTIFIED_BALL: an iterate left B[x0, t*], which the theory "
                            "forbids; the certificate inputs are unsound (L below the true "
                            "constant, wrong R, or evaluator bugs)");
                    }
                } else {
                    report.notices.push_back(
                        "trace has a single iterate (x0 already within tolerance); trace checks "
                        "skipped");
                    report.add(check_inverse_bound(*pcs, cert, 0.5 * cert.existence_radius,
                                                   cfg.n_samples, cfg.seed));
                    report.add(check_linearization(*pcs, cert.L, cfg.n_pairs, cfg.seed + 1));
                    report.add(uniqueness_checks(*pcs, cert, trace));
                }
                payload["report"] = to_json(report);
                table += "\n" + report_table(report);
                emit(cfg, payload, table, out);
                return left || !report.all_pass ? 2 : 0;
            }
        }
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

/// CLI11 wiring shared by the binary and the tests. Every flag can also be
/// given through an INI config file (--config); explicit flags win.
inline void attach_cli(CLI::App& app, RunConfig& cfg) {
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);
    app.fallthrough();

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--output", cfg.output, "Write the report to this path");
        sub->add_option("--format", cfg.format, "Report format")
            ->transform(CLI::CheckedTransformer(
                std::map<std::string, OutputFormat>{{"json", OutputFormat::json},
                                                    {"table", OutputFormat::table}}));
        sub->add_option("--kmax", cfg.k_max, "Majorant table / predicted gap length")
            ->check(CLI::NonNegativeNumber);
    };
    auto add_problem = [&cfg](CLI::App* sub) {
        sub->add_option("--problem", cfg.problem, "Builtin name or problem file path");
        sub->add_option_function<std::vector<std::string>>(
            "--param",
            [&cfg](const std::vector<std::string>& kvs) {
                for (const auto& kv : kvs) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) {
                        throw CLI::ValidationError("--param expects key=value, got '" + kv + "'");
                    }
                    cfg.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
                }
            },
            "Problem parameter key=value (repeatable)");
        sub->add_option("--x0", cfg.x0, "Base point (comma separated for systems)")
            ->delimiter(',');
        sub->add_option("--R", cfg.R, "Domain radius");
        sub->add_option("--L", cfg.L, "Scaled Lipschitz constant (supplied)");
        sub->add_flag("--guard-L", cfg.guard_L,
                      "Cross-check a supplied L against the sampled lower bound");
        sub->add_option("--norm", cfg.norm, "Vector norm")
            ->transform(CLI::CheckedTransformer(
                std::map<std::string, VectorNormKind>{{"euclidean", VectorNormKind::euclidean},
                                                      {"max", VectorNormKind::max}}));
        sub->add_option("--seed", cfg.seed, "Sampling seed");
        sub->add_option("--samples", cfg.n_samples, "Sample count for the inverse-norm sweep");
        sub->add_option("--pairs", cfg.n_pairs, "Pair count for the linearization sweep");
    };
    auto add_stops = [&cfg](CLI::App* sub) {
        sub->add_option("--majorant-tol", cfg.stop.majorant_tol,
                        "Stop when the majorant gap t* - t_k falls below this");
        sub->add_option("--step-tol", cfg.stop.step_tol, "Stop on steps shorter than this");
        sub->add_option("--max-iter", cfg.stop.k_max, "Iteration cap");
    };

    CLI::App* certify = app.add_subcommand("certify", "Check the Kantorovich hypotheses");
    certify->add_option("--b", cfg.b, "Residual bound ||F'(x0)^-1 F(x0)||");
    add_problem(certify);
    add_common(certify);
    certify->callback([&cfg] { cfg.command = Command::certify; });

    CLI::App* solve = app.add_subcommand("solve", "Certify, then run Newton with trace capture");
    add_problem(solve);
    add_stops(solve);
    add_common(solve);
    solve->callback([&cfg] { cfg.command = Command::solve; });

    CLI::App* verify =
        app.add_subcommand("verify", "Certify, solve, and check every guaranteed inequality");
    add_problem(verify);
    add_stops(verify);
    add_common(verify);
    verify->callback([&cfg] { cfg.command = Command::verify; });

    CLI::App* majorant = app.add_subcommand("majorant", "Print the scalar majorant table");
    majorant->add_option("--b", cfg.b, "Residual bound b")->required();
    majorant->add_option("--L", cfg.L, "Lipschitz constant L")->required();
    add_common(majorant);
    majorant->callback([&cfg] { cfg.command = Command::majorant; });

    CLI::App* problems = app.add_subcommand("problems", "List builtin problems");
    add_common(problems);
    problems->callback([&cfg] { cfg.command = Command::problems; });
}

/// Parse argv and execute; the entry point of the binary.
inline int run_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    RunConfig cfg;
    CLI::App app{"Certified Newton solving via Kantorovich's theorem"};
    attach_cli(app, cfg);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 3;
    }
    return run(cfg, out, err);
}

} // namespace kantsolve
