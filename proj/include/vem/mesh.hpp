#pragma once

#include "vem/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vem {

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Edge {
    std::array<int, 2> vertices;   // global orientation: vertices[0] -> vertices[1]
    Point2 normal;                 // unit, to the right of the global orientation
    double length = 0.0;
    bool on_boundary = false;
    std::array<int, 2> elements{-1, -1};
};

struct Element {
    std::vector<int> vertices;       // counter-clockwise
    std::vector<int> edges;          // edges[i] joins vertices[i] and vertices[i+1]
    std::vector<int> outward_signs;  // n_{P,E} = sign * n_E
    double area = 0.0;
    Point2 centroid = Point2::Zero();
    double diameter = 0.0;
};

/// The six families of the numerical study.
enum class Family { a, b, c, d, e, f };

Family parse_family(const std::string& tag);
char family_char(Family family);

struct PolygonalMesh {
    std::vector<Point2> vertices;
    std::vector<Edge> edges;
    std::vector<Element> elements;
    double h = 0.0;
    std::optional<std::string> family_tag;
    std::uint64_t seed = 0;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_edges() const { return edges.size(); }
    std::size_t num_elements() const { return elements.size(); }
};

/// Build a mesh from vertex coordinates and vertex-id loops. Loops given
/// clockwise are reversed. Throws MeshError on duplicate vertices, invalid
/// ids, self-intersecting loops and edges shared by more than two cells.
PolygonalMesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<int>> cells);

/// Geometry of one element in the form the local VEM code consumes.
struct ElementGeometry {
    std::vector<Point2> vertices;  // counter-clockwise
    std::vector<int> edge_signs;   // +1 when the global edge runs vertices[i] -> vertices[i+1]
    double area = 0.0;
    Point2 centroid = Point2::Zero();
    double diameter = 0.0;
    Point2 star_center = Point2::Zero();
    double kernel_radius = 0.0;  // <= 0 when the polygon is not star-shaped
};

ElementGeometry element_geometry(const PolygonalMesh& mesh, int element);

/// Standalone polygon (all edges carry the local orientation). Throws
/// MeshError when the loop is not simple or not star-shaped.
ElementGeometry make_geometry(std::vector<Point2> loop);

struct MeshQualityReport {
    double rho_edge = 0.0;             // min h_E / h_P
    bool star_shaped_ok = false;
    double kernel_radius_ratio = 0.0;  // min r / h_P over the kernel's inscribed disks
};

MeshQualityReport check_regularity(const PolygonalMesh& mesh);

/// Number of cells per side of the structured base grid at a level.
int cells_per_side(int level);

inline constexpr std::uint64_t kDefaultSeed = 20210917;

/// Deterministic generator for the six mesh families on [0,1]^2; level n has
/// 2^n cells per side (4^n Voronoi seeds for family b).
PolygonalMesh generate_family(Family family, int level, std::uint64_t seed = kDefaultSeed);

void write_mesh(const std::string& path, const PolygonalMesh& mesh);
PolygonalMesh read_mesh(const std::string& path);
std::string mesh_to_text(const PolygonalMesh& mesh);
PolygonalMesh mesh_from_text(const std::string& text);

}  // namespace vem
