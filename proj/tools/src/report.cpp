#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fslab/errors.hpp"

namespace fslab::cli {

void add_verdict(json& report, const std::string& name, double value, const std::string& relation, double threshold) {
    bool pass = false;
    if (relation == "<=") pass = value <= threshold;
    else if (relation == "<") pass = value < threshold;
    else if (relation == ">=") pass = value >= threshold;
    else if (relation == ">") pass = value > threshold;
    else if (relation == "==") pass = value == threshold;
    report["verdicts"].push_back(
        json{{"name", name}, {"value", value}, {"relation", relation}, {"threshold", threshold}, {"pass", pass}});
}

bool all_pass(const json& report) {
    if (!report.contains("verdicts")) return true;
    for (const auto& v : report["verdicts"])
        if (!v["pass"].get<bool>()) return false;
    return true;
}

namespace {

void emit(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(it.key()).dump() << ": ";
                emit(os, it.value(), indent, depth + 1);
            }
            os << '\n' << close << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << pad;
                emit(os, j[i], indent, depth + 1);
            }
            os << '\n' << close << ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s(buf);
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            os << s;
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

void write_json(std::ostream& os, const json& j, int indent) {
    emit(os, j, indent, 0);
    os << '\n';
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    write_json(os, j);
}

}  // namespace fslab::cli
