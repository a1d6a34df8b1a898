#include "octarm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace octarm {

namespace {

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

// Minimum distance between the endpoints of two segments; cheap proxy used
// only to flag ill-conditioned pairs.
double pair_proximity(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                      const Vec3& p4) {
    return std::min(std::min((p3 - p1).norm(), (p4 - p1).norm()),
                    std::min((p3 - p2).norm(), (p4 - p2).norm()));
}

void note_pair(LinkDiagnostics* diag, int i, int j, const Vec3& p1,
               const Vec3& p2, const Vec3& p3, const Vec3& p4) {
    if (!diag) return;
    const double d = pair_proximity(p1, p2, p3, p4);
    if (d < diag->min_distance) {
        diag->min_distance = d;
        if (d < diag->tolerance) diag->closest_pair = {i, j};
    }
}

}  // namespace

double segment_pair_solid_angle(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                const Vec3& p4) {
    // Spherical excess of the Gauss-map quadrilateral spanned by the four
    // end-to-end directions (Klenin & Langowski method 1a).
    const Vec3 r13 = p3 - p1, r14 = p4 - p1, r23 = p3 - p2, r24 = p4 - p2;
    Vec3 n1 = r13.cross(r14);
    Vec3 n2 = r14.cross(r24);
    Vec3 n3 = r24.cross(r23);
    Vec3 n4 = r23.cross(r13);
    const double eps = 1e-14;
    if (n1.norm() < eps || n2.norm() < eps || n3.norm() < eps ||
        n4.norm() < eps)
        return 0.0;  // coplanar pair subtends no area
    n1.normalize();
    n2.normalize();
    n3.normalize();
    n4.normalize();
    const double omega = std::asin(clamp1(n1.dot(n2))) +
                         std::asin(clamp1(n2.dot(n3))) +
                         std::asin(clamp1(n3.dot(n4))) +
                         std::asin(clamp1(n4.dot(n1)));
    const double sign = (p4 - p3).cross(p2 - p1).dot(r13);
    return sign >= 0.0 ? omega : -omega;
}

Vec3 RibbonFrame::node_tangent(int i) const {
    const int n = n_nodes();
    Vec3 d;
    if (i == 0)
        d = centerline[1] - centerline[0];
    else if (i == n - 1)
        d = centerline[n - 1] - centerline[n - 2];
    else
        d = centerline[i + 1] - centerline[i - 1];
    const double len = d.norm();
    if (len < 1e-14) throw GeometryError("ribbon: singular tangent at node " + std::to_string(i));
    return d / len;
}

std::vector<Vec3> RibbonFrame::edge_curve() const {
    std::vector<Vec3> edge(centerline.size());
    for (int i = 0; i < n_nodes(); ++i)
        edge[i] = centerline[i] + radii[i] * normals[i];
    return edge;
}

void RibbonFrame::validate() const {
    if (n_nodes() < 2) throw GeometryError("ribbon: need at least 2 nodes");
    if (normals.size() != centerline.size() || radii.size() != centerline.size())
        throw GeometryError("ribbon: normals/radii size mismatch");
    for (int i = 0; i < n_nodes(); ++i) {
        if (std::abs(normals[i].norm() - 1.0) > 1e-8)
            throw GeometryError("ribbon: normal not unit at node " + std::to_string(i));
        if (std::abs(normals[i].dot(node_tangent(i))) > 1e-8)
            throw GeometryError("ribbon: normal not perpendicular to tangent at node " +
                                std::to_string(i));
    }
}

RibbonFrame extend_curve(const RibbonFrame& ribbon) {
    if (ribbon.n_nodes() < 2) throw GeometryError("extend_curve: need at least 2 nodes");
    if (ribbon.extension_factor == 0.0) return ribbon;

    const auto& x = ribbon.centerline;
    const int n = ribbon.n_nodes();
    double length = 0.0;
    for (int i = 0; i + 1 < n; ++i) length += (x[i + 1] - x[i]).norm();

    const Vec3 t_base = x[1] - x[0];
    const Vec3 t_tip = x[n - 1] - x[n - 2];
    if (t_base.norm() < 1e-14 || t_tip.norm() < 1e-14)
        throw GeometryError("extend_curve: zero-length end segment");
    const double ext = ribbon.extension_factor * length;

    RibbonFrame out;
    out.extension_factor = ribbon.extension_factor;
    out.centerline.reserve(n + 2);
    out.normals.reserve(n + 2);
    out.radii.reserve(n + 2);

    out.centerline.push_back(x[0] - ext * t_base.normalized());
    out.normals.push_back(ribbon.normals.front());
    out.radii.push_back(ribbon.radii.front());
    for (int i = 0; i < n; ++i) {
        out.centerline.push_back(x[i]);
        out.normals.push_back(ribbon.normals[i]);
        out.radii.push_back(ribbon.radii[i]);
    }
    out.centerline.push_back(x[n - 1] + ext * t_tip.normalized());
    out.normals.push_back(ribbon.normals.back());
    out.radii.push_back(ribbon.radii.back());
    return out;
}

double link(const std::vector<Vec3>& curve_a, const std::vector<Vec3>& curve_b,
            LinkDiagnostics* diag) {
    const int na = static_cast<int>(curve_a.size()) - 1;
    const int nb = static_cast<int>(curve_b.size()) - 1;
    double total = 0.0;
    for (int i = 0; i < na; ++i) {
        double row = 0.0;
        for (int j = 0; j < nb; ++j) {
            note_pair(diag, i, j, curve_a[i], curve_a[i + 1], curve_b[j],
                      curve_b[j + 1]);
            row += segment_pair_solid_angle(curve_a[i], curve_a[i + 1],
                                            curve_b[j], curve_b[j + 1]);
        }
        total += row;
    }
    return total / (4.0 * std::numbers::pi);
}

double writhe(const std::vector<Vec3>& curve, LinkDiagnostics* diag) {
    const int n = static_cast<int>(curve.size()) - 1;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = i + 2; j < n; ++j) {
            note_pair(diag, i, j, curve[i], curve[i + 1], curve[j],
                      curve[j + 1]);
            row += segment_pair_solid_angle(curve[i], curve[i + 1], curve[j],
                                            curve[j + 1]);
        }
        total += row;
    }
    // Each unordered pair once above; the Gauss sum counts ordered pairs.
    return 2.0 * total / (4.0 * std::numbers::pi);
}

double twist(const RibbonFrame& ribbon) {
    const int n = ribbon.n_nodes();
    if (n < 2) return 0.0;
    double angle = 0.0;
    Vec3 t_prev = ribbon.node_tangent(0);
    Vec3 a_prev = ribbon.normals[0];
    for (int i = 1; i < n; ++i) {
        const Vec3 t = ribbon.node_tangent(i);
        // Parallel-transport the previous normal onto the new tangent plane
        // so that pure tangent rotation does not alias into twist.
        Vec3 a_pt = a_prev;
        const Vec3 axis = t_prev.cross(t);
        const double s = axis.norm(), c = clamp1(t_prev.dot(t));
        if (s > 1e-14) a_pt = rotation_exp(std::atan2(s, c) * (axis / s)) * a_pt;
        const Vec3 a = ribbon.normals[i];
        angle += std::atan2(a_pt.cross(a).dot(t), a_pt.dot(a));
        t_prev = t;
        a_prev = a;
    }
    return angle / (2.0 * std::numbers::pi);
}

KnotQuantities cfw_check(const RibbonFrame& ribbon) {
    ribbon.validate();
    const RibbonFrame ext = extend_curve(ribbon);
    KnotQuantities q;
    q.link = link(ext.centerline, ext.edge_curve());
    q.writhe = writhe(ext.centerline);
    q.twist = twist(ext);
    q.cfw_residual = std::abs(q.link - (q.writhe + q.twist));
    return q;
}

}  // namespace octarm
