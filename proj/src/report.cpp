#include "padfeec/report.hpp"

#include "padfeec/errors.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace padfeec {

std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
    }
    return "fail";
}

Verdict parse_verdict(const std::string& s) {
    if (s == "pass") return Verdict::pass;
    if (s == "fail") return Verdict::fail;
    if (s == "skipped") return Verdict::skipped;
    throw InvalidParameter("unknown verdict '" + s + "'");
}

double Record::number(const std::string& key) const {
    for (const auto& [k, v] : numbers)
        if (k == key) return v;
    throw InvalidParameter("record " + name + " has no number " + key);
}

bool Report::all_pass() const { return count(Verdict::fail) == 0; }

int Report::count(Verdict v) const {
    int c = 0;
    for (const auto& r : records) c += r.verdict == v;
    return c;
}

Format parse_format(const std::string& s) {
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    throw InvalidParameter("unknown format '" + s + "' (json or csv)");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // keep it a JSON float
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace {

void dump_rec(const nlohmann::ordered_json& j, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    if (j.is_number_float()) {
        const double v = j.get<double>();
        // non-finite values are not JSON numbers
        out += std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
    } else if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + nlohmann::ordered_json(it.key()).dump() + ": ";
            dump_rec(it.value(), indent, depth + 1, out);
        }
        out += "\n" + close + "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            dump_rec(j[i], indent, depth + 1, out);
        }
        out += "\n" + close + "]";
    } else {
        out += j.dump();
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
}

double json_number(const nlohmann::ordered_json& v) {
    if (v.is_number()) return v.get<double>();
    const std::string s = v.get<std::string>();
    if (s == "NaN") return NAN;
    if (s == "Infinity") return INFINITY;
    if (s == "-Infinity") return -INFINITY;
    throw InvalidParameter("not a number: " + s);
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j, int indent) {
    std::string out;
    dump_rec(j, indent, 0, out);
    return out;
}

std::string emit(const Report& r, Format f) {
    if (f == Format::json) {
        nlohmann::ordered_json j;
        j["version"] = r.version;
        j["config"] = r.config;
        nlohmann::ordered_json recs = nlohmann::ordered_json::array();
        for (const auto& rec : r.records) {
            nlohmann::ordered_json x;
            x["name"] = rec.name;
            x["inputs"] = rec.inputs;
            nlohmann::ordered_json nums = nlohmann::ordered_json::object();
            for (const auto& [k, v] : rec.numbers) nums[k] = v;
            x["numbers"] = nums;
            x["verdict"] = verdict_name(rec.verdict);
            if (!rec.reason.empty()) x["reason"] = rec.reason;
            recs.push_back(x);
        }
        j["records"] = recs;
        nlohmann::ordered_json summary;
        summary["pass"] = r.count(Verdict::pass);
        summary["fail"] = r.count(Verdict::fail);
        summary["skipped"] = r.count(Verdict::skipped);
        j["summary"] = summary;
        if (r.emit_timings) {
            nlohmann::ordered_json ph = nlohmann::ordered_json::object();
            for (const auto& [k, v] : r.phases) ph[k] = v;
            j["phases"] = ph;
        }
        return dump_json(j) + "\n";
    }
    // One row per record; columns are the union of number keys in first-seen order.
    std::vector<std::string> keys;
    std::set<std::string> seen;
    for (const auto& rec : r.records)
        for (const auto& [k, v] : rec.numbers)
            if (seen.insert(k).second) keys.push_back(k);
    std::string out = "name,verdict";
    for (const auto& k : keys) out += "," + csv_field(k);
    out += ",reason\n";
    for (const auto& rec : r.records) {
        out += csv_field(rec.name) + "," + verdict_name(rec.verdict);
        for (const auto& k : keys) {
            out += ",";
            for (const auto& [kk, v] : rec.numbers)
                if (kk == k) {
                    out += format_double(v);
                    break;
                }
        }
        out += "," + csv_field(rec.reason) + "\n";
    }
    return out;
}

Report parse_report_json(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    Report r;
    r.version = j.at("version").get<std::string>();
    r.config = j.at("config");
    for (const auto& x : j.at("records")) {
        Record rec;
        rec.name = x.at("name").get<std::string>();
        rec.inputs = x.at("inputs");
        for (auto it = x.at("numbers").begin(); it != x.at("numbers").end(); ++it)
            rec.numbers.emplace_back(it.key(), json_number(it.value()));
        rec.verdict = parse_verdict(x.at("verdict").get<std::string>());
        if (x.contains("reason")) rec.reason = x.at("reason").get<std::string>();
        r.records.push_back(rec);
    }
    if (j.contains("phases")) {
        r.emit_timings = true;
        for (auto it = j.at("phases").begin(); it != j.at("phases").end(); ++it)
            r.phases.emplace_back(it.key(), json_number(it.value()));
    }
    return r;
}

}  // namespace padfeec
