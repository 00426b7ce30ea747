#include "groupnoise/report.hpp"

#include "groupnoise/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace groupnoise {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> parse_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

template <class T>
std::optional<T> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("bad report field '" + s + "'");
    return v;
}

template <class T>
std::string optional_text(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<T>) {
        return format_number(*v);
    } else {
        return std::to_string(*v);
    }
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> json_optional(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << csv_field(r.kind) << ',' << csv_field(r.group) << ',' << optional_text(r.rho) << ','
           << optional_text(r.n) << ',' << csv_field(r.metric) << ',' << format_number(r.value) << ','
           << optional_text(r.std_error) << ',' << optional_text(r.reps) << ',' << optional_text(r.seed) << ','
           << optional_text(r.wall_ms) << '\n';
    }
}

void write_json(std::ostream& os, const std::vector<ReportRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"kind", r.kind},
                       {"group", r.group},
                       {"rho", optional_json(r.rho)},
                       {"n", optional_json(r.n)},
                       {"metric", r.metric},
                       {"value", r.value},
                       {"stderr", optional_json(r.std_error)},
                       {"reps", optional_json(r.reps)},
                       {"seed", optional_json(r.seed)},
                       {"wall_ms", optional_json(r.wall_ms)}});
    }
    os << out.dump(2) << '\n';
}

std::vector<ReportRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw ConfigError("report: missing CSV header");
    std::vector<ReportRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = parse_csv_line(line);
        if (f.size() != 10) throw ConfigError("report: expected 10 CSV fields");
        ReportRow r;
        r.kind = f[0];
        r.group = f[1];
        r.rho = parse_optional<double>(f[2]);
        r.n = parse_optional<int>(f[3]);
        r.metric = f[4];
        r.value = parse_optional<double>(f[5]).value_or(0.0);
        r.std_error = parse_optional<double>(f[6]);
        r.reps = parse_optional<std::size_t>(f[7]);
        r.seed = parse_optional<std::uint64_t>(f[8]);
        r.wall_ms = parse_optional<double>(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ReportRow> read_json(std::istream& is) {
    nlohmann::json in;
    try {
        is >> in;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("report: bad JSON: ") + e.what());
    }
    std::vector<ReportRow> rows;
    for (const auto& j : in) {
        ReportRow r;
        r.kind = j.at("kind").get<std::string>();
        r.group = j.at("group").get<std::string>();
        r.rho = json_optional<double>(j, "rho");
        r.n = json_optional<int>(j, "n");
        r.metric = j.at("metric").get<std::string>();
        r.value = j.at("value").get<double>();
        r.std_error = json_optional<double>(j, "stderr");
        r.reps = json_optional<std::size_t>(j, "reps");
        r.seed = json_optional<std::uint64_t>(j, "seed");
        r.wall_ms = json_optional<double>(j, "wall_ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& path, const std::string& format) {
    if (rows.empty()) throw ConfigError("no report rows to emit");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    auto write = [&](std::ostream& os) { format == "csv" ? write_csv(os, rows) : write_json(os, rows); };
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report to " + path);
    write(out);
    if (!out) throw Error("failed writing report to " + path);
}

}  // namespace groupnoise
