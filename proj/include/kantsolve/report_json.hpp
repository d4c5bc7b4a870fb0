#pragma once

// JSON views of certificates, traces and bound reports (stable field names:
// these payloads are the canonical machine-readable output), plus the
// problem-file loader. Reports carry no timestamps so identical inputs give
// byte-identical output.

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "kantsolve/certify.hpp"
#include "kantsolve/newton.hpp"
#include "kantsolve/problem.hpp"
#include "kantsolve/verify.hpp"

namespace kantsolve {

using Json = nlohmann::json;

inline Json to_json(const Certificate& cert) {
    Json j;
    j["status"] = to_string(cert.status);
    j["reason"] = cert.status == CertStatus::rejected ? Json(to_string(cert.reason)) : Json();
    j["b"] = cert.b;
    j["L"] = cert.L;
    j["R"] = cert.R;
    if (cert.analysis) {
        j["t_star"] = cert.analysis->t_star;
        j["t_star2"] = cert.analysis->t_star2;
        j["theta"] = cert.analysis->theta;
    } else {
        j["t_star"] = nullptr;
        j["t_star2"] = nullptr;
        j["theta"] = nullptr;
    }
    if (cert.certified()) {
        j["existence_radius"] = cert.existence_radius;
        j["uniqueness_radius"] = cert.uniqueness_radius;
        j["uniqueness_open"] = cert.uniqueness_open;
        j["rate"] = to_string(cert.rate);
        j["quadratic_coefficient"] =
            cert.quadratic_coefficient ? Json(*cert.quadratic_coefficient) : Json();
        j["predicted_gaps"] = cert.predicted_gaps;
    } else {
        j["existence_radius"] = nullptr;
        j["uniqueness_radius"] = nullptr;
        j["uniqueness_open"] = nullptr;
        j["rate"] = nullptr;
        j["quadratic_coefficient"] = nullptr;
        j["predicted_gaps"] = Json::array();
    }
    j["norm"] = to_string(cert.norm);
    j["warnings"] = cert.warnings;
    return j;
}

inline Json to_json(const NewtonTrace& trace) {
    Json j;
    auto iterates = Json::array();
    for (const auto& x : trace.iterates) {
        iterates.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    }
    j["iterates"] = std::move(iterates);
    j["step_norms"] = trace.step_norms;
    j["residual_norms"] = trace.residual_norms;
    j["sigma_mins"] = trace.sigma_mins;
    j["distances_from_x0"] = trace.distances_from_x0;
    j["stop_reason"] = to_string(trace.stop_reason);
    return j;
}

inline Json to_json(const BoundCheck& c) {
    Json j;
    j["id"] = to_string(c.id);
    j["k"] = c.k;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["margin"] = c.margin;
    j["slack"] = c.slack;
    j["pass"] = c.pass;
    return j;
}

inline Json to_json(const BoundReport& report) {
    Json j;
    auto checks = Json::array();
    for (const auto& c : report.checks) checks.push_back(to_json(c));
    j["checks"] = std::move(checks);
    int failed = 0;
    for (const auto& c : report.checks) failed += c.pass ? 0 : 1;
    j["summary"] = {{"all_pass", report.all_pass},
                    {"n_checks", report.checks.size()},
                    {"n_failed", failed},
                    {"notices", report.notices}};
    return j;
}

inline VectorNormKind norm_from_string(const std::string& s) {
    if (s == "euclidean") return VectorNormKind::euclidean;
    if (s == "max") return VectorNormKind::max;
    throw InvalidInput("unknown norm '" + s + "' (expected \"euclidean\" or \"max\")");
}

/// A problem file references a builtin by name:
///   { "name": ..., "params": {...}, "x0": [...], "R": ..., "L": ..., "norm": ... }
/// All fields except "name" are optional. Authoring new residuals requires
/// the library API, not the file format.
struct LoadedProblem {
    ProblemSpec spec;
    std::optional<double> L;             // certification L from the file
    std::optional<VectorNormKind> norm;
};

inline LoadedProblem problem_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("name")) {
        throw InvalidInput("problem file: expected an object with a \"name\" field");
    }
    ParamMap params;
    if (j.contains("params")) {
        for (const auto& [key, value] : j.at("params").items()) {
            if (!value.is_number()) {
                throw InvalidInput("problem file: param '" + key + "' must be a number");
            }
            params[key] = value.get<double>();
        }
    }
    std::optional<Vector> x0;
    if (j.contains("x0")) {
        const auto arr = j.at("x0").get<std::vector<double>>();
        Vector v(static_cast<int>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i];
        x0 = std::move(v);
    }
    std::optional<double> R;
    if (j.contains("R")) R = j.at("R").get<double>();

    LoadedProblem loaded;
    loaded.spec = builtin(j.at("name").get<std::string>(), params, x0, R);
    if (j.contains("L")) loaded.L = j.at("L").get<double>();
    if (j.contains("norm")) loaded.norm = norm_from_string(j.at("norm").get<std::string>());
    return loaded;
}

inline LoadedProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open problem file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw InvalidInput("problem file '" + path + "': " + e.what());
    }
    return problem_from_json(j);
}

} // namespace kantsolve
