// Command-line front end: detect on a file, stream from a file or stdin,
// generate synthetic windows, and run seeded benchmark suites.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stnn/csv.hpp"
#include "stnn/detector.hpp"
#include "stnn/measurement.hpp"
#include "stnn/metrics.hpp"
#include "stnn/profile.hpp"
#include "stnn/report.hpp"
#include "stnn/stream.hpp"
#include "stnn/synth.hpp"
#include "stnn/trials.hpp"

namespace {

namespace fs = std::filesystem;

struct DetectFlags {
    std::string input;
    std::string out;
    std::string profile_out;
    std::size_t m = 0;  // 0 -> n/10
    double k_coeff = 6.0;
    std::size_t exclusion = 0;
    std::string boundary = "include";
    bool no_normalize = false;
};

stnn::BoundaryPolicy parse_boundary(const std::string& s) {
    return s == "exclude" ? stnn::BoundaryPolicy::exclude : stnn::BoundaryPolicy::include;
}

int run_detect(const DetectFlags& flags) {
    std::ifstream in(flags.input);
    if (!in) {
        std::cerr << "error: cannot open " << flags.input << "\n";
        return 1;
    }
    const stnn::CsvWindow csv = stnn::read_window_csv(in, flags.input);
    if (csv.rows.size() < 2) {
        std::cerr << "error: " << flags.input << ": need at least 2 data rows\n";
        return 1;
    }

    const double dt = csv.inferred_dt;
    stnn::MeasurementWindow window = stnn::ingest_window(csv.rows, dt, 3, csv.channel_ids);
    if (!flags.no_normalize) window = stnn::normalize_per_channel(window);

    const stnn::ConcatenatedSeries series = stnn::concatenate(window);
    const std::size_t m = flags.m > 0 ? flags.m : std::max<std::size_t>(3, window.n / 10);
    const stnn::StnnProfile profile =
        stnn::compute_profile(series, m, flags.exclusion, parse_boundary(flags.boundary));

    stnn::DetectionConfig config;
    config.threshold_coefficient = flags.k_coeff;
    const stnn::DetectionReport report =
        stnn::detect(profile, series, config, fs::path(flags.input).filename().string(),
                     window.pre_flags);

    const stnn::json j = stnn::report_to_json(report, window.channel_ids);
    if (flags.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream os(flags.out);
        if (!os) {
            std::cerr << "error: cannot write " << flags.out << "\n";
            return 1;
        }
        os << j.dump(2) << "\n";
    }
    if (!flags.profile_out.empty()) {
        std::ofstream os(flags.profile_out);
        if (!os) {
            std::cerr << "error: cannot write " << flags.profile_out << "\n";
            return 1;
        }
        stnn::write_profile_csv(os, profile);
    }
    return report.anomalies.empty() ? 0 : 2;
}

struct StreamFlags {
    std::string input = "-";
    std::string reports_out;
    std::string alerts_out;
    double window_sec = 5.0;
    double step_sec = 0.5;
    double m_fraction = 0.1;
    double k_coeff = 6.0;
    std::size_t exclusion = 0;
    std::string boundary = "include";
};

int run_stream_cmd(const StreamFlags& flags) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (flags.input != "-") {
        file.open(flags.input);
        if (!file) {
            std::cerr << "error: cannot open " << flags.input << "\n";
            return 1;
        }
        in = &file;
    }

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(*in, line)) {
        std::cerr << "error: empty feed\n";
        return 1;
    }
    ++line_no;
    auto header = stnn::detail::split_csv_line(line);
    if (header.size() < 3 || header[0] != "t") {
        std::cerr << "error: line 1: header must be t,<ch1>,<ch2>,...\n";
        return 1;
    }
    std::vector<std::string> channel_ids(header.begin() + 1, header.end());

    stnn::StreamConfig config;
    config.window_seconds = flags.window_sec;
    config.step_seconds = flags.step_sec;
    config.m_fraction = flags.m_fraction;
    config.detection.threshold_coefficient = flags.k_coeff;
    config.exclusion_halfwidth = flags.exclusion;
    config.boundary_policy = parse_boundary(flags.boundary);

    std::ofstream reports_file;
    std::ostream* reports_os = &std::cout;
    if (!flags.reports_out.empty()) {
        reports_file.open(flags.reports_out);
        if (!reports_file) {
            std::cerr << "error: cannot write " << flags.reports_out << "\n";
            return 1;
        }
        reports_os = &reports_file;
    }

    std::unique_ptr<stnn::StreamProcessor> proc;
    stnn::Sample first_row;
    bool have_first = false;

    while (std::getline(*in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = stnn::detail::split_csv_line(line);
        if (fields.size() != channel_ids.size() + 1) {
            std::cerr << "error: line " << line_no << ": expected " << channel_ids.size() + 1
                      << " fields\n";
            return 1;
        }
        stnn::Sample row;
        row.t = stnn::detail::parse_cell(fields[0], flags.input, line_no);
        for (std::size_t i = 1; i < fields.size(); ++i)
            row.values.push_back(stnn::detail::parse_cell(fields[i], flags.input, line_no));

        if (!proc) {
            if (!have_first) {
                first_row = std::move(row);
                have_first = true;
                continue;
            }
            const double dt = row.t - first_row.t;
            proc = std::make_unique<stnn::StreamProcessor>(dt, config, channel_ids);
            proc->push(first_row);
        }
        if (auto report = proc->push(row)) {
            *reports_os << stnn::report_to_json(*report, channel_ids).dump() << "\n";
            reports_os->flush();
        }
    }

    if (!proc) {
        std::cerr << "error: feed too short for one window\n";
        return 1;
    }
    if (proc->rejected_rows() > 0)
        std::cerr << "warning: dropped " << proc->rejected_rows() << " late/duplicate rows\n";

    stnn::json alerts = stnn::json::array();
    for (const stnn::Alert& a : proc->alerts()) alerts.push_back(stnn::alert_to_json(a));
    if (flags.alerts_out.empty()) {
        std::cout << alerts.dump(2) << "\n";
    } else {
        std::ofstream os(flags.alerts_out);
        if (!os) {
            std::cerr << "error: cannot write " << flags.alerts_out << "\n";
            return 1;
        }
        os << alerts.dump(2) << "\n";
    }
    return proc->alerts().empty() ? 0 : 2;
}

struct GenerateFlags {
    std::string out_dir = ".";
    std::size_t n_b = 5;
    std::size_t n = 500;
    double dt = 0.01;
    double coupling = 0.9;
    double noise = 0.001;
    std::uint64_t seed = 1;
    bool no_event = false;
    std::size_t event_onset = 40;
    double event_depth = 0.2;
    std::size_t event_duration = 20;
    double ring_freq = 1.2;
    double ring_damping = 0.3;
    std::string kind = "spike";
    std::size_t channel = 2;
    std::size_t start = 300;
    std::size_t span = 1;
    double magnitude = -0.3;
    bool magnitude_set = false;
};

int run_generate(const GenerateFlags& flags) {
    stnn::GridScenario scenario;
    scenario.n_b = flags.n_b;
    scenario.n = flags.n;
    scenario.dt = flags.dt;
    scenario.coupling = flags.coupling;
    scenario.noise_std = flags.noise;
    scenario.seed = flags.seed;
    if (!flags.no_event)
        scenario.events.push_back({flags.event_onset, flags.event_depth, flags.event_duration,
                                   flags.ring_freq, flags.ring_damping});

    const stnn::GeneratedWindow generated = stnn::generate(scenario);

    std::vector<stnn::BadDataScenario> truth;
    stnn::MeasurementWindow injected = generated.noisy;
    if (flags.kind != "none") {
        stnn::BadDataScenario bad;
        bad.kind = stnn::bad_data_kind_from_string(flags.kind);
        bad.channel = flags.channel;
        bad.start_sample = flags.start;
        bad.span = flags.span;
        bad.magnitude = flags.magnitude;
        bad.seed = flags.seed;
        if (bad.kind == stnn::BadDataKind::false_injection) {
            stnn::GridScenario donor = scenario;
            donor.seed = flags.seed + 1;
            donor.noise_std = 0.0;
            const stnn::MeasurementWindow replay = stnn::generate(donor).clean;
            const std::size_t ring0 = flags.no_event
                                          ? 0
                                          : std::min(replay.n - bad.span,
                                                     flags.event_onset - 1 + flags.event_duration);
            for (std::size_t k = 0; k < bad.span; ++k)
                bad.source_segment.push_back(replay.value(0, ring0 + k));
            if (!flags.magnitude_set) bad.magnitude = 1.0;  // replace-mode default
        }
        stnn::InjectionResult result = stnn::inject(generated.noisy, bad);
        injected = std::move(result.window);
        truth = std::move(result.truth);
    }

    std::error_code ec;
    fs::create_directories(flags.out_dir, ec);
    const auto write_or_fail = [&](const std::string& name, auto&& writer) -> bool {
        std::ofstream os(fs::path(flags.out_dir) / name);
        if (!os) {
            std::cerr << "error: cannot write " << name << " in " << flags.out_dir << "\n";
            return false;
        }
        writer(os);
        return true;
    };

    bool ok = write_or_fail("clean.csv", [&](std::ostream& os) {
        stnn::write_window_csv(os, generated.noisy);
    });
    ok = ok && write_or_fail("injected.csv", [&](std::ostream& os) {
        stnn::write_window_csv(os, injected);
    });
    ok = ok && write_or_fail("scenario.json", [&](std::ostream& os) {
        stnn::json j = stnn::grid_scenario_to_json(scenario);
        if (!truth.empty()) j["bad_data"] = stnn::scenario_to_json(truth.front());
        os << j.dump(2) << "\n";
    });
    ok = ok && write_or_fail("truth.json", [&](std::ostream& os) {
        os << stnn::truth_to_json(truth).dump(2) << "\n";
    });
    return ok ? 0 : 1;
}

struct BenchFlags {
    std::size_t trials = 200;
    std::size_t n_b = 5;
    std::size_t n = 500;
    double dt = 0.01;
    std::size_t m = 0;
    double k_coeff = 6.0;
    long long exclusion = -1;  // -1 -> m/2
    std::uint64_t seed = 20240101;
    std::string out_dir;
    std::string boundary = "exclude";
    bool no_brute = false;
};

int run_bench(const BenchFlags& flags) {
    stnn::TrialSuiteConfig cfg;
    cfg.trials = flags.trials;
    cfg.n_b = flags.n_b;
    cfg.n = flags.n;
    cfg.dt = flags.dt;
    cfg.m = flags.m;
    cfg.threshold_coefficient = flags.k_coeff;
    cfg.seed = flags.seed;
    cfg.time_brute_force = !flags.no_brute;
    cfg.boundary_policy = parse_boundary(flags.boundary);
    if (flags.exclusion >= 0) cfg.exclusion_halfwidth = static_cast<std::size_t>(flags.exclusion);

    const stnn::SuiteResult result = stnn::run_suite(cfg);
    const stnn::Scores scores = stnn::score(result.totals);
    const std::vector<stnn::MetricRow> rows{{"Proposed", scores}};

    std::ostringstream table;
    table << result.totals.n_all << " windows (" << result.clean_trials << " clean, "
          << result.anomalous_trials << " with injected bad data), n_b=" << cfg.n_b
          << ", n=" << cfg.n << ", m=" << cfg.effective_m()
          << ", exclusion=" << cfg.effective_exclusion() << ", K=" << cfg.threshold_coefficient
          << ", seed=" << cfg.seed << "\n\n";
    table << stnn::render_metrics_table(rows) << "\n";
    table << "Detection rate       : " << stnn::format_percent(result.detection_rate()) << " %\n";
    table << "Clean false alarms   : " << stnn::format_percent(result.clean_false_alarm_rate())
          << " %\n\n";
    table << "Average execution time\n";
    table << "  fast STNN profile  : " << stnn::format_percent(result.mean_fast_ms) << " ms\n";
    if (cfg.time_brute_force) {
        table << "  brute-force        : " << stnn::format_percent(result.mean_brute_ms) << " ms\n";
        if (result.mean_fast_ms > 0.0)
            table << "  speedup            : "
                  << stnn::format_percent(result.mean_brute_ms / result.mean_fast_ms) << " x\n";
    }
    std::cout << table.str();

    if (!flags.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(flags.out_dir, ec);
        {
            std::ofstream os(fs::path(flags.out_dir) / "bench_table.txt");
            os << table.str();
        }
        {
            std::ofstream os(fs::path(flags.out_dir) / "bench_metrics.csv");
            os << stnn::metrics_to_csv(rows);
        }
        std::ofstream os(fs::path(flags.out_dir) / "trials.csv");
        os << "trial,seed,kind,window_flagged,truth_detected,false_alarm,fast_ms,brute_ms,max_abs_dev\n";
        for (const stnn::BenchmarkRecord& r : result.records) {
            os << r.trial << ',' << r.seed << ',' << r.kind << ',' << int(r.window_flagged) << ','
               << int(r.truth_detected) << ',' << int(r.false_alarm) << ',' << r.fast_ms << ','
               << r.brute_ms << ',' << r.max_abs_dev << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial-temporal nearest-neighbor bad-data detection for multi-channel recordings"};
    app.require_subcommand(1);

    DetectFlags detect_flags;
    auto* cmd_detect = app.add_subcommand("detect", "Detect bad data in one window CSV");
    cmd_detect->set_config("--config", "", "Read options from a key=value file");
    cmd_detect->add_option("input", detect_flags.input, "Window CSV (t,<ch1>,...)")->required();
    cmd_detect->add_option("--m", detect_flags.m, "Subsequence length (default: n/10)");
    cmd_detect->add_option("--k-coeff", detect_flags.k_coeff, "Threshold coefficient K");
    cmd_detect->add_option("--exclusion", detect_flags.exclusion, "Exclusion half-width");
    cmd_detect->add_option("--boundary", detect_flags.boundary, "Boundary policy: include|exclude")
        ->check(CLI::IsMember({"include", "exclude"}));
    cmd_detect->add_option("--out", detect_flags.out, "Report JSON path (default: stdout)");
    cmd_detect->add_option("--profile-out", detect_flags.profile_out, "Profile CSV path");
    cmd_detect->add_flag("--no-normalize", detect_flags.no_normalize,
                         "Skip per-channel steady-state normalization");

    StreamFlags stream_flags;
    auto* cmd_stream = app.add_subcommand("stream", "Sliding-window detection over a feed");
    cmd_stream->set_config("--config", "", "Read options from a key=value file");
    cmd_stream->add_option("input", stream_flags.input, "Feed CSV path, or - for stdin");
    cmd_stream->add_option("--window-sec", stream_flags.window_sec, "Window length, seconds");
    cmd_stream->add_option("--step-sec", stream_flags.step_sec, "Window step, seconds");
    cmd_stream->add_option("--m-fraction", stream_flags.m_fraction, "m as fraction of window");
    cmd_stream->add_option("--k-coeff", stream_flags.k_coeff, "Threshold coefficient K");
    cmd_stream->add_option("--exclusion", stream_flags.exclusion, "Exclusion half-width");
    cmd_stream->add_option("--boundary", stream_flags.boundary, "Boundary policy: include|exclude")
        ->check(CLI::IsMember({"include", "exclude"}));
    cmd_stream->add_option("--reports-out", stream_flags.reports_out,
                           "Per-window report JSONL path (default: stdout)");
    cmd_stream->add_option("--out", stream_flags.alerts_out, "Merged alerts JSON path");

    GenerateFlags gen_flags;
    auto* cmd_generate = app.add_subcommand("generate", "Write a synthetic window with ground truth");
    cmd_generate->set_config("--config", "", "Read options from a key=value file");
    cmd_generate->add_option("--out", gen_flags.out_dir, "Output directory");
    cmd_generate->add_option("--n-b", gen_flags.n_b, "Channels");
    cmd_generate->add_option("--n", gen_flags.n, "Samples per channel");
    cmd_generate->add_option("--dt", gen_flags.dt, "Sampling interval, seconds");
    cmd_generate->add_option("--coupling", gen_flags.coupling, "Cross-channel coupling in [0,1]");
    cmd_generate->add_option("--noise", gen_flags.noise, "Gaussian noise std, per-unit");
    cmd_generate->add_option("--seed", gen_flags.seed, "Generator seed");
    cmd_generate->add_flag("--no-event", gen_flags.no_event, "Quiescent window, no event dip");
    cmd_generate->add_option("--event-onset", gen_flags.event_onset, "Event onset sample (1-based)");
    cmd_generate->add_option("--event-depth", gen_flags.event_depth, "Dip depth, per-unit");
    cmd_generate->add_option("--event-duration", gen_flags.event_duration, "Dip duration, samples");
    cmd_generate->add_option("--ring-freq", gen_flags.ring_freq, "Ring-down frequency, Hz");
    cmd_generate->add_option("--ring-damping", gen_flags.ring_damping, "Ring-down damping, 1/s");
    cmd_generate->add_option("--kind", gen_flags.kind, "Bad data kind, or none")
        ->check(CLI::IsMember({"spike", "repeated", "false_injection", "data_loss_zero", "none"}));
    cmd_generate->add_option("--channel", gen_flags.channel, "Injected channel (1-based)");
    cmd_generate->add_option("--start", gen_flags.start, "Injection start sample (1-based)");
    cmd_generate->add_option("--span", gen_flags.span, "Injection span, samples");
    cmd_generate->add_option("--magnitude", gen_flags.magnitude, "Injection magnitude");

    BenchFlags bench_flags;
    auto* cmd_bench = app.add_subcommand("bench", "Seeded metric and timing suite");
    cmd_bench->set_config("--config", "", "Read options from a key=value file");
    cmd_bench->add_option("--trials", bench_flags.trials, "Trial count")
        ->check(CLI::PositiveNumber);
    cmd_bench->add_option("--n-b", bench_flags.n_b, "Channels");
    cmd_bench->add_option("--n", bench_flags.n, "Samples per channel");
    cmd_bench->add_option("--dt", bench_flags.dt, "Sampling interval, seconds");
    cmd_bench->add_option("--m", bench_flags.m, "Subsequence length (default: n/10)");
    cmd_bench->add_option("--k-coeff", bench_flags.k_coeff, "Threshold coefficient K");
    cmd_bench->add_option("--exclusion", bench_flags.exclusion,
                          "Exclusion half-width (-1: m/2)");
    cmd_bench->add_option("--boundary", bench_flags.boundary, "Boundary policy: include|exclude")
        ->check(CLI::IsMember({"include", "exclude"}));
    cmd_bench->add_option("--seed", bench_flags.seed, "Suite seed");
    cmd_bench->add_option("--out", bench_flags.out_dir, "Directory for tables and trial records");
    cmd_bench->add_flag("--no-brute", bench_flags.no_brute, "Skip the brute-force timing baseline");

    CLI11_PARSE(app, argc, argv);
    gen_flags.magnitude_set = cmd_generate->count("--magnitude") > 0;

    try {
        if (cmd_detect->parsed()) return run_detect(detect_flags);
        if (cmd_stream->parsed()) return run_stream_cmd(stream_flags);
        if (cmd_generate->parsed()) return run_generate(gen_flags);
        if (cmd_bench->parsed()) return run_bench(bench_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
