// Copyright 2026 The diracwalk Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diracwalk/io.hpp"
#include "diracwalk/matrixkit.hpp"

namespace diracwalk {

using Json = nlohmann::ordered_json;

enum class Relation { at_most, at_least, is_true };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::at_most: return "<=";
        case Relation::at_least: return ">=";
        case Relation::is_true: return "true";
    }
    return "?";
}

// One pass/fail number with the operation that produced it.
struct Check {
    std::string module;
    std::string name;
    std::string op;
    double value = 0.0;
    double tolerance = 0.0;
    Relation relation = Relation::at_most;

    bool passed() const {
        if (std::isnan(value)) return false;
        switch (relation) {
            case Relation::at_most: return value <= tolerance;
            case Relation::at_least: return value >= tolerance;
            case Relation::is_true: return value != 0.0;
        }
        return false;
    }
};

// A printed relation that the computation does not reproduce: reported,
// never counted as a failure.
struct DiscrepancyNote {
    std::string module;
    std::string name;
    std::string description;
    double deviation = 0.0;
};

struct CheckList {
    std::vector<Check> checks;
    std::vector<DiscrepancyNote> discrepancies;
    // Reported numbers without a pass/fail threshold.
    Json measurements = Json::object();

    Check& at_most(std::string module, std::string name, std::string op, double value, double tol) {
        checks.push_back({std::move(module), std::move(name), std::move(op), value, tol, Relation::at_most});
        return checks.back();
    }
    Check& at_least(std::string module, std::string name, std::string op, double value, double tol) {
        checks.push_back({std::move(module), std::move(name), std::move(op), value, tol, Relation::at_least});
        return checks.back();
    }
    Check& holds(std::string module, std::string name, std::string op, bool ok) {
        checks.push_back({std::move(module), std::move(name), std::move(op), ok ? 1.0 : 0.0, 1.0, Relation::is_true});
        return checks.back();
    }
    void discrepancy(std::string module, std::string name, std::string description, double deviation) {
        discrepancies.push_back({std::move(module), std::move(name), std::move(description), deviation});
    }
    void append(CheckList other) {
        for (auto& c : other.checks) checks.push_back(std::move(c));
        for (auto& d : other.discrepancies) discrepancies.push_back(std::move(d));
        for (auto& [k, v] : other.measurements.items()) measurements[k] = v;
    }

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed()) return false;
        return true;
    }
    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += c.passed() ? 0 : 1;
        return n;
    }
};

inline Json to_json(const Check& c) {
    Json j;
    j["module"] = c.module;
    j["name"] = c.name;
    j["op"] = c.op;
    j["value"] = c.value;
    j["relation"] = to_string(c.relation);
    j["tolerance"] = c.tolerance;
    j["passed"] = c.passed();
    return j;
}

inline Json to_json(const DiscrepancyNote& d) {
    Json j;
    j["module"] = d.module;
    j["name"] = d.name;
    j["description"] = d.description;
    j["deviation"] = d.deviation;
    return j;
}

inline Json to_json(const CheckList& list) {
    Json j;
    j["passed"] = list.all_passed();
    j["failures"] = list.failures();
    j["checks"] = Json::array();
    for (const auto& c : list.checks) j["checks"].push_back(to_json(c));
    j["discrepancies"] = Json::array();
    for (const auto& d : list.discrepancies) j["discrepancies"].push_back(to_json(d));
    j["measurements"] = list.measurements;
    return j;
}

inline std::string checks_csv(const CheckList& list) {
    io::Csv csv{"module", "check", "value", "relation", "tolerance", "passed"};
    for (const auto& c : list.checks) {
        csv.cell_text(c.module).cell_text(c.name).cell(c.value).cell_text(to_string(c.relation)).cell(c.tolerance)
            .cell(c.passed());
        csv.end_row();
    }
    return csv.str();
}

inline std::string rational_string(const Rational& r) {
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

template <std::size_t N>
Json matrix_json(const SquareMatrix<Rational, N>& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < N; ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < N; ++c) row.push_back(rational_string(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

template <std::size_t N>
Json matrix_json(const SquareMatrix<double, N>& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < N; ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < N; ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace diracwalk
