#include "vem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace vem {

Family parse_family(const std::string& tag)
{
    if (tag.size() == 1 && tag[0] >= 'a' && tag[0] <= 'f') {
        return static_cast<Family>(tag[0] - 'a');
    }
    throw std::invalid_argument("unknown mesh family '" + tag + "' (expected a..f)");
}

char family_char(Family family) { return static_cast<char>('a' + static_cast<int>(family)); }

namespace {

void reject_duplicate_vertices(const std::vector<Point2>& vertices)
{
    std::vector<int> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vertices[a].x() < vertices[b].x(); });
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const Point2& p = vertices[order[i]];
            const Point2& q = vertices[order[j]];
            if (q.x() - p.x() > 1e-12) {
                break;
            }
            if (std::abs(q.y() - p.y()) <= 1e-12) {
                std::ostringstream msg;
                msg << "duplicate vertices " << std::min(order[i], order[j]) << " and "
                    << std::max(order[i], order[j]);
                throw MeshError(msg.str());
            }
        }
    }
}

}  // namespace

PolygonalMesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<int>> cells)
{
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        if (!vertices[v].allFinite()) {
            throw MeshError("vertex " + std::to_string(v) + " has non-finite coordinates");
        }
    }
    reject_duplicate_vertices(vertices);

    PolygonalMesh mesh;
    mesh.vertices = std::move(vertices);
    const int nv = static_cast<int>(mesh.vertices.size());
    std::vector<char> used(mesh.vertices.size(), 0);
    std::map<std::pair<int, int>, int> edge_ids;

    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto& loop = cells[c];
        const std::string where = "cell " + std::to_string(c);
        if (loop.size() < 3) {
            throw MeshError(where + " has fewer than 3 vertices");
        }
        for (int id : loop) {
            if (id < 0 || id >= nv) {
                throw MeshError(where + " references vertex " + std::to_string(id) +
                                " outside [0, " + std::to_string(nv) + ")");
            }
        }
        std::vector<Point2> coords;
        coords.reserve(loop.size());
        for (int id : loop) {
            coords.push_back(mesh.vertices[id]);
        }
        if (!is_simple_loop(coords)) {
            throw MeshError(where + " is not a simple polygon");
        }
        if (signed_area(coords) < 0.0) {
            std::reverse(loop.begin(), loop.end());
            std::reverse(coords.begin(), coords.end());
        }

        Element elem;
        elem.vertices = loop;
        elem.area = signed_area(coords);
        elem.centroid = polygon_centroid(coords);
        elem.diameter = polygon_diameter(coords);
        if (!(elem.area > 0.0)) {
            throw MeshError(where + " has zero area");
        }

        const int n = static_cast<int>(loop.size());
        const int elem_id = static_cast<int>(mesh.elements.size());
        for (int i = 0; i < n; ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % n];
            used[a] = 1;
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_ids.try_emplace({key.first, key.second},
                                                       static_cast<int>(mesh.edges.size()));
            if (inserted) {
                Edge e;
                e.vertices = {key.first, key.second};
                const Point2 d = mesh.vertices[key.second] - mesh.vertices[key.first];
                e.length = d.norm();
                e.normal = Point2(d.y(), -d.x()) / e.length;
                e.elements = {elem_id, -1};
                mesh.edges.push_back(e);
            } else {
                Edge& e = mesh.edges[it->second];
                if (e.elements[1] != -1) {
                    throw MeshError("edge (" + std::to_string(key.first) + ", " +
                                    std::to_string(key.second) +
                                    ") is shared by more than two cells");
                }
                if (e.elements[0] == elem_id) {
                    throw MeshError(where + " uses edge (" + std::to_string(key.first) + ", " +
                                    std::to_string(key.second) + ") twice");
                }
                e.elements[1] = elem_id;
            }
            elem.edges.push_back(it->second);
            elem.outward_signs.push_back(a == key.first ? 1 : -1);
        }
        mesh.h = std::max(mesh.h, elem.diameter);
        mesh.elements.push_back(std::move(elem));
    }

    for (std::size_t v = 0; v < used.size(); ++v) {
        if (!used[v]) {
            throw MeshError("vertex " + std::to_string(v) + " is not used by any cell");
        }
    }
    for (auto& e : mesh.edges) {
        e.on_boundary = e.elements[1] == -1;
    }
    return mesh;
}

namespace {

void fill_star_center(ElementGeometry& g)
{
    const auto planes = edge_half_planes(g.vertices);
    const Disk disk = largest_inscribed_disk(planes);
    g.kernel_radius = disk.radius;
    g.star_center = disk.radius > 0.0 ? disk.center : g.centroid;
}

}  // namespace

ElementGeometry element_geometry(const PolygonalMesh& mesh, int element)
{
    const Element& elem = mesh.elements.at(static_cast<std::size_t>(element));
    ElementGeometry g;
    g.vertices.reserve(elem.vertices.size());
    for (int v : elem.vertices) {
        g.vertices.push_back(mesh.vertices[v]);
    }
    g.edge_signs = elem.outward_signs;
    g.area = elem.area;
    g.centroid = elem.centroid;
    g.diameter = elem.diameter;
    fill_star_center(g);
    return g;
}

ElementGeometry make_geometry(std::vector<Point2> loop)
{
    if (!is_simple_loop(loop)) {
        throw MeshError("polygon is not simple");
    }
    if (signed_area(loop) < 0.0) {
        std::reverse(loop.begin(), loop.end());
    }
    ElementGeometry g;
    g.area = signed_area(loop);
    g.centroid = polygon_centroid(loop);
    g.diameter = polygon_diameter(loop);
    g.edge_signs.assign(loop.size(), 1);
    g.vertices = std::move(loop);
    fill_star_center(g);
    if (g.kernel_radius <= 0.0) {
        throw MeshError("polygon is not star-shaped with respect to a disk");
    }
    return g;
}

MeshQualityReport check_regularity(const PolygonalMesh& mesh)
{
    MeshQualityReport report;
    report.rho_edge = 1.0;
    report.star_shaped_ok = true;
    report.kernel_radius_ratio = std::numeric_limits<double>::infinity();
    for (const auto& elem : mesh.elements) {
        for (int e : elem.edges) {
            report.rho_edge = std::min(report.rho_edge, mesh.edges[e].length / elem.diameter);
        }
        std::vector<Point2> coords;
        for (int v : elem.vertices) {
            coords.push_back(mesh.vertices[v]);
        }
        const auto planes = edge_half_planes(coords);
        const Disk disk = largest_inscribed_disk(planes);
        if (!(disk.radius > 0.0)) {
            report.star_shaped_ok = false;
        }
        report.kernel_radius_ratio =
            std::min(report.kernel_radius_ratio, std::max(disk.radius, 0.0) / elem.diameter);
    }
    if (mesh.elements.empty()) {
        report.kernel_radius_ratio = 0.0;
    }
    return report;
}

}  // namespace vem
