#include "octarm/trajectory.hpp"

#include <cstring>
#include <fstream>

namespace octarm {

namespace {

constexpr char kMagic[8] = {'O', 'C', 'T', 'T', 'R', 'J', '0', '1'};

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path)
        : out(path, std::ios::binary) {
        if (!out) throw ConfigError("trajectory: cannot open for writing: " + path);
    }
    void raw(const void* p, size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i64(std::int64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void vec3(const Vec3& v) {
        f64(v.x());
        f64(v.y());
        f64(v.z());
    }
    void mat3(const Mat3& m) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) f64(m(r, c));
    }
};

struct Reader {
    std::ifstream in;
    std::string path;
    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw ConfigError("trajectory: cannot open: " + p);
    }
    void raw(void* p, size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (!in)
            throw ConfigError("trajectory: truncated or corrupt file: " + path);
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    std::string str() {
        const auto n = u64();
        if (n > (1u << 20))
            throw ConfigError("trajectory: implausible string length in " + path);
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }
    Vec3 vec3() {
        Vec3 v;
        v.x() = f64();
        v.y() = f64();
        v.z() = f64();
        return v;
    }
    Mat3 mat3() {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = f64();
        return m;
    }
};

}  // namespace

void TrajectoryRecord::validate() const {
    const size_t n_rods = rod_elements.size();
    double previous = -1.0;
    for (size_t f = 0; f < frames.size(); ++f) {
        const auto& fr = frames[f];
        if (fr.time <= previous)
            throw ConfigError("trajectory: frame times not monotone at frame " +
                              std::to_string(f));
        previous = fr.time;
        if (fr.node_positions.size() != n_rods || fr.directors.size() != n_rods ||
            fr.node_velocities.size() != n_rods || fr.activations.size() != n_rods)
            throw ConfigError("trajectory: rod count mismatch at frame " +
                              std::to_string(f));
        for (size_t r = 0; r < n_rods; ++r) {
            const size_t n = static_cast<size_t>(rod_elements[r]);
            if (fr.node_positions[r].size() != n + 1 ||
                fr.node_velocities[r].size() != n + 1 ||
                fr.directors[r].size() != n)
                throw ConfigError("trajectory: element count mismatch at frame " +
                                  std::to_string(f) + ", rod " + std::to_string(r));
        }
    }
}

void write_trajectory(const TrajectoryRecord& record, const std::string& path) {
    record.validate();
    Writer w(path);
    w.raw(kMagic, sizeof kMagic);
    w.u64(record.config_hash);
    w.str(record.engine_version);
    w.str(record.units);
    w.u64(record.rod_elements.size());
    for (const int n : record.rod_elements) w.i64(n);
    w.u64(record.frames.size());
    for (const auto& fr : record.frames) {
        w.f64(fr.time);
        for (size_t r = 0; r < record.rod_elements.size(); ++r) {
            for (const auto& p : fr.node_positions[r]) w.vec3(p);
            for (const auto& q : fr.directors[r]) w.mat3(q);
            for (const auto& v : fr.node_velocities[r]) w.vec3(v);
            w.f64(fr.activations[r]);
        }
    }
    w.f64(record.wall_time_s);
    w.f64(record.max_penetration_ratio);
    w.f64(record.final_kinetic_energy);
    w.f64(record.final_elastic_energy);
    w.f64(record.dissipated_work);
    w.i64(record.failure_frame);
}

TrajectoryRecord read_trajectory(const std::string& path) {
    Reader rd(path);
    char magic[8];
    rd.raw(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw ConfigError("trajectory: bad magic in " + path);
    TrajectoryRecord rec;
    rec.config_hash = rd.u64();
    rec.engine_version = rd.str();
    rec.units = rd.str();
    const auto n_rods = rd.u64();
    if (n_rods > (1u << 20))
        throw ConfigError("trajectory: implausible rod count in " + path);
    rec.rod_elements.resize(n_rods);
    for (auto& n : rec.rod_elements) {
        n = static_cast<int>(rd.i64());
        if (n < 1 || n > (1 << 24))
            throw ConfigError("trajectory: implausible element count in " + path);
    }
    const auto n_frames = rd.u64();
    rec.frames.resize(n_frames);
    for (size_t f = 0; f < n_frames; ++f) {
        auto& fr = rec.frames[f];
        fr.time = rd.f64();
        fr.node_positions.resize(n_rods);
        fr.directors.resize(n_rods);
        fr.node_velocities.resize(n_rods);
        fr.activations.resize(n_rods);
        for (size_t r = 0; r < n_rods; ++r) {
            const int n = rec.rod_elements[r];
            fr.node_positions[r].resize(n + 1);
            for (auto& p : fr.node_positions[r]) p = rd.vec3();
            fr.directors[r].resize(n);
            for (auto& q : fr.directors[r]) q = rd.mat3();
            fr.node_velocities[r].resize(n + 1);
            for (auto& v : fr.node_velocities[r]) v = rd.vec3();
            fr.activations[r] = rd.f64();
        }
    }
    rec.wall_time_s = rd.f64();
    rec.max_penetration_ratio = rd.f64();
    rec.final_kinetic_energy = rd.f64();
    rec.final_elastic_energy = rd.f64();
    rec.dissipated_work = rd.f64();
    rec.failure_frame = rd.i64();
    rec.validate();
    return rec;
}

void export_trajectory_csv(const TrajectoryRecord& record,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("trajectory: cannot open for writing: " + path);
    out << "frame,time,rod,node,x,y,z,vx,vy,vz,activation\n";
    out.precision(17);
    for (size_t f = 0; f < record.frames.size(); ++f) {
        const auto& fr = record.frames[f];
        for (size_t r = 0; r < fr.node_positions.size(); ++r)
            for (size_t i = 0; i < fr.node_positions[r].size(); ++i) {
                const auto& p = fr.node_positions[r][i];
                const auto& v = fr.node_velocities[r][i];
                out << f << ',' << fr.time << ',' << r << ',' << i << ','
                    << p.x() << ',' << p.y() << ',' << p.z() << ',' << v.x()
                    << ',' << v.y() << ',' << v.z() << ',' << fr.activations[r]
                    << '\n';
            }
    }
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace octarm
