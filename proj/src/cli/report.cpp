#include "gexp/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gexp::cli {

using nlohmann::json;

void Table::add(std::vector<json> row)
{
    if (row.size() != columns.size()) {
        throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                               std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

Table& RunReport::table(const std::string& name, std::vector<std::string> columns)
{
    tables.push_back(Table{name, std::move(columns), {}});
    return tables.back();
}

void RunReport::check(std::string name, bool ok, std::string detail)
{
    assertions.push_back(Assertion{std::move(name), ok, std::move(detail)});
}

bool RunReport::passed() const
{
    for (const auto& a : assertions) {
        if (!a.passed) {
            return false;
        }
    }
    return true;
}

json to_json(const ExtReal& x)
{
    if (x.is_finite()) {
        return x.value();
    }
    return x.is_plus_infinity() ? "inf" : "-inf";
}

namespace {

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "\"nan\"";
    }
    if (std::isinf(v)) {
        return v > 0 ? "\"inf\"" : "\"-inf\"";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // Keep floats recognizable as such.
    if (s.find_first_of(".eE") == std::string::npos) {
        s += ".0";
    }
    return s;
}

void write(std::ostringstream& os, const json& v, int indent, int level)
{
    const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * level), ' ');
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) {
                os << ",\n";
            }
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            write(os, it.value(), indent, level + 1);
        }
        os << "\n" << close << "}";
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            os << "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive(); });
        if (flat) {
            os << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) {
                    os << ", ";
                }
                write(os, v[i], indent, level + 1);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) {
                os << ",\n";
            }
            os << pad;
            write(os, v[i], indent, level + 1);
        }
        os << "\n" << close << "]";
        return;
    }
    case json::value_t::number_float: os << format_double(v.get<double>()); return;
    default: os << v.dump(); return;
    }
}

std::string csv_cell(const json& v)
{
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            return std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", d);
        return buf;
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char c : s) {
            q += c;
            if (c == '"') {
                q += '"';
            }
        }
        return q + "\"";
    }
    if (v.is_null()) {
        return "";
    }
    return v.dump();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

}  // namespace

std::string dump_json(const json& value, int indent)
{
    std::ostringstream os;
    write(os, value, indent, 0);
    os << "\n";
    return os.str();
}

std::string to_csv(const Table& table)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        os << (i ? "," : "") << table.columns[i];
    }
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << csv_cell(row[i]);
        }
        os << "\n";
    }
    return os.str();
}

json report_document(const RunReport& report)
{
    json doc = json::object();
    doc["task"] = report.task;
    doc["config"] = report.config;
    doc["tree"] = report.tree;
    doc["results"] = report.results;
    json tables = json::object();
    for (const auto& t : report.tables) {
        json rows = json::array();
        for (const auto& r : t.rows) {
            rows.push_back(r);
        }
        tables[t.name] = json{{"columns", t.columns}, {"rows", rows}};
    }
    doc["tables"] = tables;
    json assertions = json::array();
    for (const auto& a : report.assertions) {
        assertions.push_back(json{{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    }
    doc["assertions"] = assertions;
    doc["warnings"] = report.warnings;
    doc["passed"] = report.passed();
    return doc;
}

void emit(const RunReport& report, const std::string& dir, const Formats& formats)
{
    namespace fs = std::filesystem;
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    }
    if (formats.tabular) {
        for (const auto& t : report.tables) {
            write_file(root / (t.name + ".csv"), to_csv(t));
        }
    }
    if (formats.structured) {
        write_file(root / "report.json", dump_json(report_document(report)));
    }
    write_file(root / "timing.json", dump_json(json{{"elapsed_seconds", report.elapsed_seconds}}));
}

}  // namespace gexp::cli
