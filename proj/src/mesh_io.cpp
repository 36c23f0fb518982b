#include "vem/mesh.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vem {

namespace {

constexpr int kFormatVersion = 1;

std::string number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t line_of(const std::string& text, std::size_t byte)
{
    const std::size_t end = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
}

}  // namespace

std::string mesh_to_text(const PolygonalMesh& mesh)
{
    std::ostringstream out;
    out << "{\n  \"version\": " << kFormatVersion << ",\n";
    if (mesh.family_tag) {
        out << "  \"family_tag\": " << nlohmann::json(*mesh.family_tag).dump() << ",\n";
    }
    out << "  \"seed\": " << mesh.seed << ",\n";
    out << "  \"vertices\": [\n";
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        out << "    [" << number(mesh.vertices[v].x()) << ", " << number(mesh.vertices[v].y()) << "]"
            << (v + 1 < mesh.vertices.size() ? ",\n" : "\n");
    }
    out << "  ],\n  \"cells\": [\n";
    for (std::size_t c = 0; c < mesh.elements.size(); ++c) {
        out << "    [";
        const auto& loop = mesh.elements[c].vertices;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            out << loop[i] << (i + 1 < loop.size() ? ", " : "");
        }
        out << "]" << (c + 1 < mesh.elements.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
    return out.str();
}

PolygonalMesh mesh_from_text(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw MeshError("mesh parse error at line " + std::to_string(line_of(text, err.byte)) + ": " +
                        err.what());
    }

    try {
        const int version = doc.at("version").get<int>();
        if (version != kFormatVersion) {
            throw MeshError("unsupported mesh format version " + std::to_string(version));
        }
        std::vector<Point2> vertices;
        const auto& jv = doc.at("vertices");
        for (std::size_t i = 0; i < jv.size(); ++i) {
            const auto& p = jv[i];
            if (!p.is_array() || p.size() != 2) {
                throw MeshError("vertices[" + std::to_string(i) + "] must be [x, y]");
            }
            vertices.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        std::vector<std::vector<int>> cells;
        for (const auto& c : doc.at("cells")) {
            cells.push_back(c.get<std::vector<int>>());
        }
        PolygonalMesh mesh = build_mesh(std::move(vertices), std::move(cells));
        if (doc.contains("family_tag")) {
            mesh.family_tag = doc["family_tag"].get<std::string>();
        }
        if (doc.contains("seed")) {
            mesh.seed = doc["seed"].get<std::uint64_t>();
        }
        return mesh;
    } catch (const nlohmann::json::exception& err) {
        throw MeshError(std::string("invalid mesh document: ") + err.what());
    }
}

void write_mesh(const std::string& path, const PolygonalMesh& mesh)
{
    std::ofstream out(path);
    if (!out) {
        throw MeshError("cannot open '" + path + "' for writing");
    }
    out << mesh_to_text(mesh);
}

PolygonalMesh read_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MeshError("cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return mesh_from_text(buf.str());
}

}  // namespace vem
