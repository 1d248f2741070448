#pragma once

#include <cstddef>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stnn {

struct ConfusionTotals {
    std::size_t n_all = 0;
    std::size_t n_ta = 0;
    std::size_t n_fn = 0;
    std::size_t n_fa = 0;

    ConfusionTotals& operator+=(const ConfusionTotals& other) {
        n_all += other.n_all;
        n_ta += other.n_ta;
        n_fn += other.n_fn;
        n_fa += other.n_fa;
        return *this;
    }
};

/// The four evaluation percentages. precision is empty when no instance was
/// flagged at all (n_ta + n_fa == 0).
struct Scores {
    double misdetection = 0.0;
    double false_alarm = 0.0;
    double accuracy = 100.0;
    std::optional<double> precision;
};

/// mis = n_fn/n_all, fal = n_fa/n_all, pre = n_ta/(n_ta+n_fa), all as
/// percentages. Accuracy is evaluated as 100 - mis - fal, the algebraically
/// identical form of (n_all - n_fn - n_fa)/n_all, so the identity between
/// the three rates holds exactly in floating point.
inline Scores score(const ConfusionTotals& totals) {
    if (totals.n_all == 0) throw std::invalid_argument("score: empty evaluation (n_all = 0)");
    if (totals.n_ta + totals.n_fn > totals.n_all || totals.n_fa > totals.n_all)
        throw std::invalid_argument("score: inconsistent confusion totals");
    const double n_all = static_cast<double>(totals.n_all);
    Scores s;
    s.misdetection = static_cast<double>(totals.n_fn) / n_all * 100.0;
    s.false_alarm = static_cast<double>(totals.n_fa) / n_all * 100.0;
    s.accuracy = 100.0 - s.misdetection - s.false_alarm;
    if (totals.n_ta + totals.n_fa > 0)
        s.precision = static_cast<double>(totals.n_ta) /
                      static_cast<double>(totals.n_ta + totals.n_fa) * 100.0;
    return s;
}

struct MetricRow {
    std::string label;
    Scores scores;
};

inline std::string format_percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

/// Aligned plain-text table, two decimals, matching the usual reporting
/// format for these four rates.
inline std::string render_metrics_table(const std::vector<MetricRow>& rows) {
    std::size_t label_width = 6;
    for (const MetricRow& r : rows) label_width = std::max(label_width, r.label.size());

    std::string out;
    const auto pad = [](std::string s, std::size_t w) {
        while (s.size() < w) s.push_back(' ');
        return s;
    };
    out += pad("Method", label_width) + "  Mis/%    Fal/%    Pre/%    Acc/%\n";
    for (const MetricRow& r : rows) {
        out += pad(r.label, label_width);
        out += pad("  " + format_percent(r.scores.misdetection), 9);
        out += pad("  " + format_percent(r.scores.false_alarm), 9);
        out += pad("  " + (r.scores.precision ? format_percent(*r.scores.precision) : std::string("n/a")), 9);
        out += "  " + format_percent(r.scores.accuracy) + "\n";
    }
    return out;
}

inline std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
    std::string out = "method,mis_pct,fal_pct,pre_pct,acc_pct\n";
    for (const MetricRow& r : rows) {
        out += r.label + ',' + format_percent(r.scores.misdetection) + ',' +
               format_percent(r.scores.false_alarm) + ',' +
               (r.scores.precision ? format_percent(*r.scores.precision) : std::string()) + ',' +
               format_percent(r.scores.accuracy) + '\n';
    }
    return out;
}

} // namespace stnn
