#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gaitguide/artifacts.hpp"
#include "gaitguide/simulate.hpp"

namespace fs = std::filesystem;
using namespace gaitguide;

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("GAITGUIDE_OUT")) return env;
    return "out";
}

ScenarioConfig load_with_overrides(const std::string& path,
                                   const std::vector<std::string>& overrides,
                                   std::optional<std::uint64_t> seed) {
    std::ifstream f(path);
    if (!f) throw ScenarioInvalid("cannot open scenario file " + path);
    auto entries = parse_scenario_entries(f);
    for (const std::string& o : overrides) apply_override(entries, o);
    if (seed) apply_override(entries, "scenario.seed=" + std::to_string(*seed));
    return build_scenario(entries);
}

void print_metrics(const RunMetrics& m, std::ostream& out) {
    out.precision(6);
    out << "arrived            " << (m.arrived ? "yes" : "no")
        << (m.timed_out ? " (timed out)" : "") << "\n";
    out << "completion_time    " << m.completion_time << " s\n";
    out << "path_length        " << m.path_length << " m\n";
    out << "lateral_rmse       " << m.lateral_rmse << " m\n";
    out << "final_heading_err  " << m.final_heading_error_deg << " deg\n";
    out << "collision_count    " << m.collision_count << "\n";
    out << "steps              " << m.steps << "\n";
}

bool parse_seed_range(const std::string& spec, std::uint64_t& a, std::uint64_t& b) {
    const auto dots = spec.find("..");
    if (dots == std::string::npos) return false;
    try {
        a = std::stoull(spec.substr(0, dots));
        b = std::stoull(spec.substr(dots + 2));
    } catch (...) {
        return false;
    }
    return b >= a;
}

int cmd_run(const std::string& file, const std::string& out_dir,
            const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed) {
    const ScenarioConfig cfg = load_with_overrides(file, overrides, seed);
    const RunResult result = run_scenario(cfg);
    const WorldModel world = cfg.kind == ScenarioKind::ObstacleCourse
                                 ? obstacle_course_world(cfg, cfg.seed)
                                 : cfg.world;
    const std::string dir =
        out_dir + "/" + kind_token(cfg.kind) + "-seed" + std::to_string(cfg.seed);
    emit_artifacts(result, world, dir);
    std::cout << "run " << kind_token(cfg.kind) << " seed " << cfg.seed << " -> " << dir << "\n";
    print_metrics(result.metrics, std::cout);
    return 0;
}

int cmd_batch(const std::string& file, const std::string& seeds, const std::string& out_dir,
              const std::vector<std::string>& overrides, int jobs) {
    std::uint64_t a = 0, b = 0;
    if (!parse_seed_range(seeds, a, b)) {
        std::cerr << "batch: --seeds expects A..B\n";
        return 1;
    }
    const ScenarioConfig cfg = load_with_overrides(file, overrides, std::nullopt);
    const BatchReport report = run_batch(cfg, a, b, jobs);

    fs::create_directories(out_dir);
    const std::string summary_path = out_dir + "/batch-" + std::string(kind_token(cfg.kind)) +
                                     "-" + controller_token(cfg.controller) + ".csv";
    std::ofstream f(summary_path);
    write_batch_csv(report, f);
    print_batch_summary(report, std::cout);
    std::cout << "summary -> " << summary_path << "\n";
    return report.pass ? 0 : 2;
}

int cmd_replay(const std::string& file) {
    std::ifstream probe(file);
    if (!probe) {
        std::cerr << "replay: cannot open " << file << "\n";
        return 1;
    }
    std::string first;
    std::getline(probe, first);
    probe.close();

    if (first.rfind("# gaitguide-trace", 0) == 0 || first == kTraceHeader) {
        const Trace trace = read_trace_csv_file(file);
        std::cout << "trace " << kind_token(trace.meta.kind) << ", seed " << trace.meta.seed
                  << ", " << trace.rows.size() << " rows\n";
        print_metrics(metrics_from_trace(trace), std::cout);
        return 0;
    }

    // Bare rope stream: t,left_len,right_len
    std::ifstream f(file);
    std::string line;
    GaitRecognizer recognizer;
    bool configured = false;
    double prev_t = 0.0;
    std::size_t n = 0;
    std::vector<std::array<double, 3>> pending;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
        std::istringstream ss(line);
        std::string cell;
        std::array<double, 3> v{};
        for (int i = 0; i < 3 && std::getline(ss, cell, ','); ++i) v[i] = std::stod(cell);
        if (!configured) {
            pending.push_back(v);
            if (pending.size() == 2) {
                RecognizerConfig rc;
                rc.sample_rate_hz = 1.0 / std::max(1e-6, pending[1][0] - pending[0][0]);
                recognizer = GaitRecognizer(rc);
                configured = true;
                for (const auto& p : pending) {
                    recognizer.ingest({p[0], p[1], p[2]});
                    ++n;
                }
                prev_t = pending[1][0];
            }
            continue;
        }
        if (v[0] <= prev_t) continue;
        prev_t = v[0];
        recognizer.ingest({v[0], v[1], v[2]});
        ++n;
    }
    const GaitEstimate est = recognizer.estimate();
    std::cout << "rope stream: " << n << " samples\n";
    std::cout << "steps left " << est.left.step_count << ", right " << est.right.step_count
              << ", cadence_hat " << est.cadence_hat << " steps/s\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    bool any = false;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        std::ifstream f(entry.path());
        std::string first;
        std::getline(f, first);
        if (first != "# gaitguide-batch v1") continue;
        any = true;
        std::cout << entry.path().filename().string() << "\n";
        std::string line;
        while (std::getline(f, line)) {
            if (line.rfind("# ", 0) == 0 && line.find(' ', 2) != std::string::npos) {
                std::cout << "  " << line.substr(2) << "\n";
            }
        }
    }
    if (!any) {
        std::cerr << "report: no batch summaries found in " << dir << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaitguide: deterministic gait-guidance navigation simulator"};
    app.require_subcommand(1);

    std::string scenario_file, trace_file, report_dir;
    std::string out_dir = default_out_dir();
    std::string seeds;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    int jobs = 0;

    auto* run = app.add_subcommand("run", "run one scenario and emit artifacts");
    run->add_option("scenario", scenario_file, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--override", overrides, "section.key=value override")->take_all();

    auto* batch = app.add_subcommand("batch", "run a scenario over a seed range");
    batch->add_option("scenario", scenario_file, "scenario file")->required();
    batch->add_option("--seeds", seeds, "seed range A..B")->required();
    batch->add_option("--out", out_dir, "output directory");
    batch->add_option("--jobs", jobs, "worker threads (0 = auto)");
    batch->add_option("--override", overrides, "section.key=value override")->take_all();

    auto* replay = app.add_subcommand("replay", "recompute metrics from a trace or rope CSV");
    replay->add_option("trace", trace_file, "trace.csv or t,left_len,right_len stream")
        ->required();

    auto* report = app.add_subcommand("report", "summarize batch CSVs in a directory");
    report->add_option("dir", report_dir, "directory with batch summaries")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(scenario_file, out_dir, overrides, seed);
        if (batch->parsed()) return cmd_batch(scenario_file, seeds, out_dir, overrides, jobs);
        if (replay->parsed()) return cmd_replay(trace_file);
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
