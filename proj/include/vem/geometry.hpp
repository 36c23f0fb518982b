#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace vem {

using Point2 = Eigen::Vector2d;

/// Signed area of a closed vertex loop (positive for counter-clockwise).
double signed_area(std::span<const Point2> loop);

/// Centroid of a simple polygon, from the shoelace first moments.
Point2 polygon_centroid(std::span<const Point2> loop);

/// Largest distance between two vertices of the loop.
double polygon_diameter(std::span<const Point2> loop);

/// True when two closed segments share at least one point.
bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d);

/// True when no two non-adjacent edges of the loop touch.
bool is_simple_loop(std::span<const Point2> loop);

/// Half-plane {x : normal . x <= offset}.
struct HalfPlane {
    Point2 normal;
    double offset;
};

/// Clip a convex polygon against one half-plane (Sutherland-Hodgman).
std::vector<Point2> clip_convex(std::span<const Point2> polygon, const HalfPlane& hp);

/// Inward half-planes of every edge of a counter-clockwise polygon.
std::vector<HalfPlane> edge_half_planes(std::span<const Point2> ccw_loop);

/// Kernel of a counter-clockwise polygon: the points that see the whole
/// polygon. Empty when the polygon is not star-shaped.
std::vector<Point2> polygon_kernel(std::span<const Point2> ccw_loop);

/// Center and radius of the largest disk inside the intersection of the
/// half-planes. Radius is <= 0 when the intersection has empty interior.
struct Disk {
    Point2 center;
    double radius;
};
Disk largest_inscribed_disk(std::span<const HalfPlane> planes);

}  // namespace vem
