#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "octarm/types.hpp"

namespace octarm {

// Open ribbon: axial curve plus a unit normal and a local radius per node.
// The auxiliary curve x + r*d1 traces the ribbon edge.
struct RibbonFrame {
    std::vector<Vec3> centerline;
    std::vector<Vec3> normals;
    std::vector<double> radii;
    double extension_factor = 1e3;

    int n_nodes() const { return static_cast<int>(centerline.size()); }
    // Central-difference node tangent (one-sided at the ends).
    Vec3 node_tangent(int i) const;
    std::vector<Vec3> edge_curve() const;
    // |d1| = 1 and d1 perpendicular to the node tangent within 1e-8.
    void validate() const;
};

struct KnotQuantities {
    double link = 0.0;
    double writhe = 0.0;
    double twist = 0.0;
    double cfw_residual = 0.0;
};

// Flags segment pairs that came closer than `tolerance` during the
// solid-angle sum (the sum is then ill-conditioned).
struct LinkDiagnostics {
    std::optional<std::pair<int, int>> closest_pair;
    double min_distance = std::numeric_limits<double>::max();
    double tolerance = 1e-9;
};

// Appends a straight, untwisted segment of length alpha*L to both ends,
// along the respective end tangents. alpha = 0 returns the input unchanged.
RibbonFrame extend_curve(const RibbonFrame& ribbon);

// Gauss linking number of two polylines: (1/4pi) * sum of the solid angles
// subtended by every segment pair (exact per pair).
double link(const std::vector<Vec3>& curve_a, const std::vector<Vec3>& curve_b,
            LinkDiagnostics* diag = nullptr);

// Self-link with self and adjacent pairs excluded.
double writhe(const std::vector<Vec3>& curve, LinkDiagnostics* diag = nullptr);

// Total rotation of the normal about the tangent under parallel transport,
// in turns.
double twist(const RibbonFrame& ribbon);

// Lk, Wr, Tw of the extended ribbon plus the residual |Lk - (Wr + Tw)|.
KnotQuantities cfw_check(const RibbonFrame& ribbon);

// Solid angle subtended at the Gauss sphere by segments (p1,p2) and (p3,p4).
double segment_pair_solid_angle(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                const Vec3& p4);

}  // namespace octarm
