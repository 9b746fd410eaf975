#pragma once

// Run reports: tables, assertions, and their tabular / structured emission.

#include "gexp/extended_real.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gexp::cli {

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;

    void add(std::vector<nlohmann::json> row);
};

struct Assertion {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct RunReport {
    nlohmann::json config;
    std::string task;
    nlohmann::json tree;
    nlohmann::json results = nlohmann::json::object();
    std::vector<Table> tables;
    std::vector<Assertion> assertions;
    std::vector<std::string> warnings;
    /// Written to timing.json only, so that report.json stays reproducible.
    double elapsed_seconds = 0.0;

    Table& table(const std::string& name, std::vector<std::string> columns);
    void check(std::string name, bool passed, std::string detail = {});
    bool passed() const;
};

/// JSON value for an extended real: a number, or "inf" / "-inf".
nlohmann::json to_json(const ExtReal& x);

/// Serializes with every floating value printed as %.17g.
std::string dump_json(const nlohmann::json& value, int indent = 2);

/// One CSV document with a header row; numbers printed as %.17g.
std::string to_csv(const Table& table);

struct Formats {
    bool tabular = true;
    bool structured = true;
};

/// Writes <table>.csv per table, report.json and timing.json into `dir`
/// (created if missing). Throws std::runtime_error on unwritable paths.
void emit(const RunReport& report, const std::string& dir, const Formats& formats);

nlohmann::json report_document(const RunReport& report);

}  // namespace gexp::cli
