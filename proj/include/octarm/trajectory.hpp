#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "octarm/types.hpp"

namespace octarm {

// One sampled instant of the whole assembly.
struct TrajectoryFrame {
    double time = 0.0;
    // Indexed [rod][node] / [rod][element].
    std::vector<std::vector<Vec3>> node_positions;
    std::vector<std::vector<Mat3>> directors;
    std::vector<std::vector<Vec3>> node_velocities;
    // One activation level per rod, evaluated mid-arc.
    std::vector<double> activations;
};

struct TrajectoryRecord {
    // Header.
    std::uint64_t config_hash = 0;
    std::string engine_version;
    std::string units;  // e.g. "SI: m, s, kg, N"
    std::vector<int> rod_elements;  // elements per rod

    std::vector<TrajectoryFrame> frames;

    // Footer.
    double wall_time_s = 0.0;
    double max_penetration_ratio = 0.0;
    double final_kinetic_energy = 0.0;
    double final_elastic_energy = 0.0;
    double dissipated_work = 0.0;
    // Frame index at which the run went non-finite; -1 for a clean run.
    std::int64_t failure_frame = -1;

    void validate() const;  // monotone times, consistent shapes
};

// Self-describing columnar binary; round-trips bit-exactly.
void write_trajectory(const TrajectoryRecord& record, const std::string& path);
TrajectoryRecord read_trajectory(const std::string& path);

// Plain-text export for desk inspection: one row per (frame, rod, node).
void export_trajectory_csv(const TrajectoryRecord& record, const std::string& path);

// FNV-1a, used for the config hash.
std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace octarm
