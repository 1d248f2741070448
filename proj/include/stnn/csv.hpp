#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stnn/measurement.hpp"
#include "stnn/profile.hpp"

namespace stnn {

/// Parsed window CSV: header `t,<ch1>,<ch2>,...`, one row per timestamp.
/// Empty or non-numeric cells come through as NaN and are zero-filled and
/// pre-flagged at ingestion.
struct CsvWindow {
    std::vector<Sample> rows;
    std::vector<std::string> channel_ids;
    double inferred_dt = 0.0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline double parse_cell(const std::string& field, const std::string& source, std::size_t line_no) {
    std::size_t lo = 0, hi = field.size();
    while (lo < hi && (field[lo] == ' ' || field[lo] == '\t')) ++lo;
    while (hi > lo && (field[hi - 1] == ' ' || field[hi - 1] == '\t' || field[hi - 1] == '\r')) --hi;
    if (lo == hi) return std::numeric_limits<double>::quiet_NaN();

    const std::string body = field.substr(lo, hi - lo);
    if (body == "nan" || body == "NaN" || body == "NAN")
        return std::numeric_limits<double>::quiet_NaN();

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size())
        throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                                 ": malformed number '" + body + "'");
    return value;
}

} // namespace detail

inline CsvWindow read_window_csv(std::istream& in, const std::string& source = "input") {
    CsvWindow out;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line))
        throw std::runtime_error(source + ": line 1: missing header row");
    ++line_no;
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
    auto header = detail::split_csv_line(line);
    if (header.size() < 3 || (header[0] != "t" && header[0] != "t\r"))
        throw std::runtime_error(source + ": line 1: header must be t,<ch1>,<ch2>,...");
    for (std::size_t i = 1; i < header.size(); ++i) {
        std::string id = header[i];
        if (!id.empty() && id.back() == '\r') id.pop_back();
        out.channel_ids.push_back(id);
    }

    const std::size_t n_b = out.channel_ids.size();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != n_b + 1)
            throw std::runtime_error(source + ": line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(n_b + 1) + " fields, got " +
                                     std::to_string(fields.size()));
        Sample row;
        row.t = detail::parse_cell(fields[0], source, line_no);
        if (!std::isfinite(row.t))
            throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                                     ": timestamp must be numeric");
        for (std::size_t i = 1; i < fields.size(); ++i)
            row.values.push_back(detail::parse_cell(fields[i], source, line_no));
        out.rows.push_back(std::move(row));
    }
    if (out.rows.size() >= 2) out.inferred_dt = out.rows[1].t - out.rows[0].t;
    return out;
}

inline void write_window_csv(std::ostream& os, const MeasurementWindow& window, double t0 = 0.0) {
    os << "t";
    for (const std::string& id : window.channel_ids) os << ',' << id;
    os << '\n';
    char buf[64];
    for (std::size_t j = 0; j < window.n; ++j) {
        std::snprintf(buf, sizeof(buf), "%.9g", t0 + static_cast<double>(j) * window.dt);
        os << buf;
        for (std::size_t i = 0; i < window.n_b; ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g", window.value(i, j));
            os << ',' << buf;
        }
        os << '\n';
    }
}

/// Plot-friendly export: `u,p_nn,neighbor,spans_boundary`, 1-based indices;
/// positions skipped under the boundary policy show p_nn=nan, neighbor=0.
inline void write_profile_csv(std::ostream& os, const StnnProfile& profile) {
    os << "u,p_nn,neighbor,spans_boundary\n";
    char buf[64];
    for (std::size_t u0 = 0; u0 < profile.size(); ++u0) {
        if (profile.evaluated(u0)) {
            std::snprintf(buf, sizeof(buf), "%.12g", profile.values[u0]);
        } else {
            std::snprintf(buf, sizeof(buf), "nan");
        }
        os << (u0 + 1) << ',' << buf << ',' << profile.neighbor_index[u0] << ','
           << (profile.spans_boundary[u0] ? 1 : 0) << '\n';
    }
}

} // namespace stnn
