#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "octarm/scenario.hpp"

using namespace octarm;

namespace {

int default_threads() {
    if (const char* env = std::getenv("OCTARM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void print_record_summary(const TrajectoryRecord& rec) {
    std::printf("frames: %zu  sim time: %.4f s  wall: %.2f s\n",
                rec.frames.size(),
                rec.frames.empty() ? 0.0 : rec.frames.back().time,
                rec.wall_time_s);
    std::printf("max penetration ratio: %.4f\n", rec.max_penetration_ratio);
    std::printf("final energy: kinetic %.6e J, elastic %.6e J\n",
                rec.final_kinetic_energy, rec.final_elastic_energy);
    if (rec.failure_frame >= 0)
        std::printf("UNSTABLE at frame %lld\n",
                    static_cast<long long>(rec.failure_frame));
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            int stride) {
    ScenarioConfig config = load_scenario(config_path);
    if (stride >= 0) config.output.trajectory_stride = stride;
    const TrajectoryRecord rec = run(config);
    print_record_summary(rec);
    if (!out_path.empty()) {
        write_trajectory(rec, out_path);
        std::printf("trajectory written to %s\n", out_path.c_str());
    }
    return rec.failure_frame >= 0 ? 1 : 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              int threads) {
    const ScenarioConfig base = load_scenario(config_path);
    std::vector<double> angles;
    for (double a = 40.0; a <= 85.0; a += 5.0) angles.push_back(a);
    const SweepTable table = sweep_winding_angle(base, angles, threads);

    std::string csv = "angle_deg,steady_abs_twist,ok,message\n";
    for (const auto& row : table.rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%.1f,%.6g,%d,%s\n", row.angle_deg,
                      row.steady_twist, row.ok ? 1 : 0, row.message.c_str());
        csv += line;
        std::printf("angle %5.1f  |Tw| %10.6f  %s%s\n", row.angle_deg,
                    row.steady_twist, row.ok ? "ok" : "FAILED: ",
                    row.ok ? "" : row.message.c_str());
    }
    std::printf("argmax: %.1f deg\n", table.argmax_angle);
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw ConfigError("sweep: cannot write '" + out_path + "'");
        f << csv;
    }
    bool any_ok = false;
    for (const auto& row : table.rows) any_ok |= row.ok;
    return any_ok ? 0 : 1;
}

int cmd_validate(const std::string& suite) {
    const ValidationReport report = run_validation_suite(suite);
    for (const auto& row : report.rows)
        std::printf("%-28s measured %12.6g  bound %12.6g  %s\n",
                    row.id.c_str(), row.measured, row.bound,
                    row.pass ? "pass" : "FAIL");
    std::printf("suite %s: %s\n", report.suite.c_str(),
                report.all_pass() ? "PASS" : "FAIL");
    return report.all_pass() ? 0 : 1;
}

int cmd_analyze(const std::string& trajectory_path, const std::string& what,
                const std::string& out_path) {
    const TrajectoryRecord rec = read_trajectory(trajectory_path);
    std::string csv;
    if (what == "knot") {
        csv = "time,link,writhe,twist,residual\n";
        for (const auto& row : analyze_knot(rec)) {
            char line[160];
            std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%.3e\n",
                          row.time, row.link, row.writhe, row.twist,
                          row.residual);
            csv += line;
        }
    } else if (what == "bend") {
        csv = "time,arc_position,velocity\n";
        for (const auto& row : analyze_bend(rec)) {
            char line[120];
            std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g\n", row.time,
                          row.arc_position, row.velocity);
            csv += line;
        }
    } else {
        throw CLI::ValidationError("analyze",
                                   "kind must be 'knot' or 'bend'");
    }
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(out_path);
        if (!f) throw ConfigError("analyze: cannot write '" + out_path + "'");
        f << csv;
        std::printf("analysis written to %s\n", out_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"octarm: muscular-hydrostat arm simulation"};
    app.require_subcommand(1);

    std::string config_path, out_path, suite, trajectory_path, analyze_what;
    int threads = default_threads();
    int stride = -1;

    auto* run_cmd = app.add_subcommand("run", "Run one scenario");
    run_cmd->add_option("--config", config_path, "Scenario JSON file")
        ->required();
    run_cmd->add_option("--out", out_path, "Trajectory output file");
    run_cmd->add_option("--stride", stride,
                        "Record every Nth step (0 = ~250 frames)");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "Winding-angle sweep, 40..85 deg");
    sweep_cmd->add_option("--config", config_path, "Base scenario JSON file")
        ->required();
    sweep_cmd->add_option("--out", out_path, "Sweep table CSV output");
    sweep_cmd->add_option("--threads", threads, "Concurrent sweep rows");

    auto* validate_cmd = app.add_subcommand("validate", "Run a named suite");
    validate_cmd->add_option("--suite", suite, "Suite name")->required();

    auto* analyze_cmd =
        app.add_subcommand("analyze", "Extract tables from a trajectory");
    analyze_cmd
        ->add_option("trajectory", trajectory_path, "Trajectory file")
        ->required();
    analyze_cmd->add_option("kind", analyze_what, "knot | bend")->required();
    analyze_cmd->add_option("--out", out_path, "Analysis CSV output");

    try {
        app.parse(argc, argv);
        if (*run_cmd) return cmd_run(config_path, out_path, stride);
        if (*sweep_cmd) return cmd_sweep(config_path, out_path, threads);
        if (*validate_cmd) return cmd_validate(suite);
        if (*analyze_cmd)
            return cmd_analyze(trajectory_path, analyze_what, out_path);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
