#include "vem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vem {

namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Point2& a, const Point2& b, const Point2& c)
{
    const double v = cross(b - a, c - a);
    const double scale = (b - a).norm() * (c - a).norm();
    if (std::abs(v) <= 1e-14 * scale) {
        return 0;
    }
    return v > 0 ? 1 : -1;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p)
{
    return std::min(a.x(), b.x()) - 1e-14 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
           std::min(a.y(), b.y()) - 1e-14 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-14;
}

}  // namespace

double signed_area(std::span<const Point2> loop)
{
    double twice = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        twice += cross(loop[i], loop[(i + 1) % n]);
    }
    return 0.5 * twice;
}

Point2 polygon_centroid(std::span<const Point2> loop)
{
    // Shift to the first vertex to limit cancellation on small elements.
    const Point2 origin = loop.front();
    double twice_area = 0.0;
    Point2 moment = Point2::Zero();
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = loop[i] - origin;
        const Point2 q = loop[(i + 1) % n] - origin;
        const double c = cross(p, q);
        twice_area += c;
        moment += c * (p + q);
    }
    return origin + moment / (3.0 * twice_area);
}

double polygon_diameter(std::span<const Point2> loop)
{
    double d = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        for (std::size_t j = i + 1; j < loop.size(); ++j) {
            d = std::max(d, (loop[i] - loop[j]).norm());
        }
    }
    return d;
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d)
{
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) {
        return true;
    }
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool is_simple_loop(std::span<const Point2> loop)
{
    const std::size_t n = loop.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges may only share their common vertex; a
                // collinear fold-back shows up as overlap.
                const std::size_t shared = (j == i + 1) ? j : i;
                const Point2& p = loop[shared];
                const Point2& a = loop[(shared + n - 1) % n];
                const Point2& b = loop[(shared + 1) % n];
                if (orientation(a, p, b) == 0 && (a - p).dot(b - p) > 0.0) {
                    return false;
                }
                continue;
            }
            if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

std::vector<Point2> clip_convex(std::span<const Point2> polygon, const HalfPlane& hp)
{
    std::vector<Point2> out;
    const std::size_t n = polygon.size();
    if (n == 0) {
        return out;
    }
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = polygon[i];
        const Point2& q = polygon[(i + 1) % n];
        const double sp = hp.normal.dot(p) - hp.offset;
        const double sq = hp.normal.dot(q) - hp.offset;
        if (sp <= 0.0) {
            out.push_back(p);
        }
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

std::vector<HalfPlane> edge_half_planes(std::span<const Point2> ccw_loop)
{
    std::vector<HalfPlane> planes;
    const std::size_t n = ccw_loop.size();
    planes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = ccw_loop[i];
        const Point2 d = ccw_loop[(i + 1) % n] - a;
        const Point2 normal = Point2(d.y(), -d.x()).normalized();
        planes.push_back({normal, normal.dot(a)});
    }
    return planes;
}

std::vector<Point2> polygon_kernel(std::span<const Point2> ccw_loop)
{
    Point2 lo = ccw_loop.front();
    Point2 hi = ccw_loop.front();
    for (const auto& p : ccw_loop) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    std::vector<Point2> kernel = {lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    for (const auto& hp : edge_half_planes(ccw_loop)) {
        kernel = clip_convex(kernel, hp);
        if (kernel.size() < 3) {
            return {};
        }
    }
    if (signed_area(kernel) <= 0.0) {
        return {};
    }
    return kernel;
}

Disk largest_inscribed_disk(std::span<const HalfPlane> planes)
{
    // Linear program max r s.t. n_i . c + r <= b_i; the optimum sits on a
    // vertex where three constraints are active, so enumerate the triples.
    Disk best{Point2::Zero(), -std::numeric_limits<double>::infinity()};
    const std::size_t n = planes.size();
    double scale = 0.0;
    for (const auto& hp : planes) {
        scale = std::max(scale, std::abs(hp.offset));
    }
    const double tol = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t l = j + 1; l < n; ++l) {
                Eigen::Matrix3d m;
                Eigen::Vector3d rhs;
                const HalfPlane* trio[3] = {&planes[i], &planes[j], &planes[l]};
                for (int r = 0; r < 3; ++r) {
                    m(r, 0) = trio[r]->normal.x();
                    m(r, 1) = trio[r]->normal.y();
                    m(r, 2) = 1.0;
                    rhs(r) = trio[r]->offset;
                }
                Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
                if (!lu.isInvertible()) {
                    continue;
                }
                const Eigen::Vector3d sol = lu.solve(rhs);
                if (sol(2) <= best.radius) {
                    continue;
                }
                const Point2 c(sol(0), sol(1));
                bool feasible = true;
                for (const auto& hp : planes) {
                    if (hp.normal.dot(c) + sol(2) > hp.offset + tol) {
                        feasible = false;
                        break;
                    }
                }
                if (feasible) {
                    best = {c, sol(2)};
                }
            }
        }
    }
    return best;
}

}  // namespace vem
