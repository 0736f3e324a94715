#pragma once

#include "json.hpp"

#include <string>
#include <utility>
#include <vector>

namespace padfeec {

inline constexpr const char* kToolVersion = "0.3.0";

enum class Verdict { pass, fail, skipped };
std::string verdict_name(Verdict v);
Verdict parse_verdict(const std::string& s);

struct Record {
    std::string name;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, double>> numbers;
    Verdict verdict = Verdict::pass;
    std::string reason;  // failure diagnostic or skip reason

    Record& num(const std::string& key, double v) {
        numbers.emplace_back(key, v);
        return *this;
    }
    double number(const std::string& key) const;
};

struct Report {
    std::string version = kToolVersion;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<Record> records;
    // Wall-clock seconds per phase; emitted only when requested, since it
    // breaks byte-for-byte reproducibility.
    std::vector<std::pair<std::string, double>> phases;
    bool emit_timings = false;

    bool all_pass() const;
    int count(Verdict v) const;
};

enum class Format { json, csv };
Format parse_format(const std::string& s);

// Stable field order, floats with 17 significant digits.
std::string emit(const Report& r, Format f);
Report parse_report_json(const std::string& text);

// Same float formatting for any JSON value.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);
std::string format_double(double v);

}  // namespace padfeec
