#include "vem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

namespace vem {

int cells_per_side(int level)
{
    if (level < 0 || level > 12) {
        throw std::invalid_argument("mesh level must lie in [0, 12]");
    }
    return 1 << level;
}

namespace {

// Uniform draw in [0,1) from the raw engine output; std distributions are
// not reproducible across standard library implementations.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct GridIndex {
    int n;
    int operator()(int i, int j) const { return j * (n + 1) + i; }
};

std::vector<Point2> grid_vertices(int n)
{
    std::vector<Point2> v;
    v.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            v.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
        }
    }
    return v;
}

PolygonalMesh squares(int n, double perturbation, std::uint64_t seed)
{
    auto vertices = grid_vertices(n);
    const GridIndex id{n};
    if (perturbation > 0.0) {
        std::mt19937_64 rng(seed);
        const double amp = perturbation / n;
        for (int j = 1; j < n; ++j) {
            for (int i = 1; i < n; ++i) {
                const double dx = (2.0 * unit_draw(rng) - 1.0) * amp;
                const double dy = (2.0 * unit_draw(rng) - 1.0) * amp;
                vertices[id(i, j)] += Point2(dx, dy);
            }
        }
    }
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return build_mesh(std::move(vertices), std::move(cells));
}

PolygonalMesh diagonal_triangles(int n)
{
    const GridIndex id{n};
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return build_mesh(grid_vertices(n), std::move(cells));
}

PolygonalMesh criss_cross(int n)
{
    const GridIndex id{n};
    auto vertices = grid_vertices(n);
    const int corner_count = static_cast<int>(vertices.size());
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int c = corner_count + j * n + i;
            vertices.emplace_back((i + 0.5) / n, (j + 0.5) / n);
            const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
            cells.push_back({v00, v10, c});
            cells.push_back({v10, v11, c});
            cells.push_back({v11, v01, c});
            cells.push_back({v01, v00, c});
        }
    }
    return build_mesh(std::move(vertices), std::move(cells));
}

// Concave cells: every cell receives exactly one inward chevron ("dent") on
// one of its interior edges, assigned along a boustrophedon path so that the
// assignment never conflicts. The neighbour across that edge sees a convex
// bulge instead.
PolygonalMesh chevron_cells(int n)
{
    const GridIndex id{n};
    auto vertices = grid_vertices(n);
    const double depth = 0.25 / n;

    // Vertical edge V(i,j): x = i/n, row j. Horizontal edge H(i,j): y = j/n, column i.
    std::map<std::tuple<char, int, int>, int> dent;
    auto add_dent = [&](char kind, int i, int j, Point2 shift) {
        const Point2 mid = kind == 'V' ? Point2(static_cast<double>(i) / n, (j + 0.5) / n)
                                       : Point2((i + 0.5) / n, static_cast<double>(j) / n);
        dent[{kind, i, j}] = static_cast<int>(vertices.size());
        vertices.push_back(mid + shift);
    };
    for (int j = 0; j < n; ++j) {
        if (j % 2 == 0) {
            for (int i = 0; i + 1 < n; ++i) {
                add_dent('V', i + 1, j, {-depth, 0.0});
            }
            if (j + 1 < n) {
                add_dent('H', n - 1, j + 1, {0.0, -depth});
            }
        } else {
            for (int i = 1; i < n; ++i) {
                add_dent('V', i, j, {depth, 0.0});
            }
            add_dent('H', 0, j, {0.0, depth});
        }
    }

    auto chevron = [&](char kind, int i, int j) -> int {
        const auto it = dent.find({kind, i, j});
        return it == dent.end() ? -1 : it->second;
    };
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::vector<int> loop;
            auto side = [&](int corner, int mid) {
                loop.push_back(corner);
                if (mid >= 0) {
                    loop.push_back(mid);
                }
            };
            side(id(i, j), chevron('H', i, j));
            side(id(i + 1, j), chevron('V', i + 1, j));
            side(id(i + 1, j + 1), chevron('H', i, j + 1));
            side(id(i, j + 1), chevron('V', i, j));
            cells.push_back(std::move(loop));
        }
    }
    return build_mesh(std::move(vertices), std::move(cells));
}

// --- Lloyd-relaxed Voronoi tessellation clipped to the unit square ---------

std::vector<Point2> unit_square() { return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}; }

std::vector<std::vector<Point2>> voronoi_cells(const std::vector<Point2>& seeds)
{
    std::vector<std::vector<Point2>> cells(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        std::vector<Point2> cell = unit_square();
        // Closer seeds cut first and shrink the cell fast.
        std::vector<std::size_t> order;
        order.reserve(seeds.size());
        for (std::size_t t = 0; t < seeds.size(); ++t) {
            if (t != s) order.push_back(t);
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return (seeds[a] - seeds[s]).squaredNorm() < (seeds[b] - seeds[s]).squaredNorm();
        });
        for (std::size_t t : order) {
            double reach = 0.0;
            for (const auto& p : cell) {
                reach = std::max(reach, (p - seeds[s]).norm());
            }
            // Seeds farther than twice the cell radius cannot cut it.
            if ((seeds[t] - seeds[s]).norm() > 2.0 * reach) {
                break;
            }
            const Point2 normal = seeds[t] - seeds[s];
            const double offset = normal.dot(0.5 * (seeds[t] + seeds[s]));
            cell = clip_convex(cell, {normal, offset});
        }
        cells[s] = std::move(cell);
    }
    return cells;
}

double snap(double v)
{
    if (std::abs(v) < 1e-12) return 0.0;
    if (std::abs(v - 1.0) < 1e-12) return 1.0;
    return v;
}

int boundary_rank(const Point2& p)
{
    const bool bx = p.x() == 0.0 || p.x() == 1.0;
    const bool by = p.y() == 0.0 || p.y() == 1.0;
    return static_cast<int>(bx) + static_cast<int>(by);
}

PolygonalMesh voronoi(int level, std::uint64_t seed)
{
    const int count = 1 << (2 * level);
    std::mt19937_64 rng(seed);
    std::vector<Point2> seeds(static_cast<std::size_t>(count));
    for (auto& s : seeds) {
        const double x = unit_draw(rng);
        const double y = unit_draw(rng);
        s = Point2(x, y);
    }

    constexpr int kLloydIterations = 60;
    for (int it = 0; it < kLloydIterations; ++it) {
        const auto cells = voronoi_cells(seeds);
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            seeds[s] = polygon_centroid(cells[s]);
        }
    }
    auto cells = voronoi_cells(seeds);

    // Weld coincident corners of neighbouring cells.
    constexpr double kWeld = 1e-9;
    std::vector<Point2> vertices;
    std::map<std::pair<long long, long long>, int> buckets;
    auto weld = [&](Point2 p) {
        p = Point2(snap(p.x()), snap(p.y()));
        const long long bx = std::llround(p.x() / kWeld);
        const long long by = std::llround(p.y() / kWeld);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                const auto it = buckets.find({bx + dx, by + dy});
                if (it != buckets.end() && (vertices[it->second] - p).norm() < kWeld) {
                    return it->second;
                }
            }
        }
        const int id = static_cast<int>(vertices.size());
        vertices.push_back(p);
        buckets[{bx, by}] = id;
        return id;
    };
    std::vector<std::vector<int>> loops;
    for (const auto& cell : cells) {
        std::vector<int> loop;
        for (const auto& p : cell) {
            const int id = weld(p);
            if (loop.empty() || loop.back() != id) {
                loop.push_back(id);
            }
        }
        while (loop.size() > 1 && loop.front() == loop.back()) {
            loop.pop_back();
        }
        loops.push_back(std::move(loop));
    }

    // Collapse short edges; Voronoi diagrams of nearly cocircular seeds
    // produce tiny edges that violate the edge-length regularity.
    constexpr double kShortEdge = 0.1;
    for (;;) {
        std::vector<double> diameter(loops.size());
        for (std::size_t c = 0; c < loops.size(); ++c) {
            std::vector<Point2> coords;
            for (int v : loops[c]) coords.push_back(vertices[v]);
            diameter[c] = polygon_diameter(coords);
        }
        std::map<std::pair<int, int>, double> limit;
        for (std::size_t c = 0; c < loops.size(); ++c) {
            const auto& loop = loops[c];
            for (std::size_t i = 0; i < loop.size(); ++i) {
                const auto key = std::minmax(loop[i], loop[(i + 1) % loop.size()]);
                auto [it, inserted] = limit.try_emplace({key.first, key.second}, diameter[c]);
                if (!inserted) it->second = std::min(it->second, diameter[c]);
            }
        }
        double worst = kShortEdge;
        std::pair<int, int> victim{-1, -1};
        for (const auto& [key, diam] : limit) {
            const double ratio = (vertices[key.first] - vertices[key.second]).norm() / diam;
            if (ratio < worst) {
                worst = ratio;
                victim = key;
            }
        }
        if (victim.first < 0) {
            break;
        }
        auto [keep, drop] = victim;
        const Point2 pk = vertices[keep];
        const Point2 pd = vertices[drop];
        const int rk = boundary_rank(pk);
        const int rd = boundary_rank(pd);
        if (rd > rk) {
            std::swap(keep, drop);
        } else if (rd == rk && rk < 2) {
            const bool same_side = rk == 0 || (pk.x() == pd.x() && (pk.x() == 0.0 || pk.x() == 1.0)) ||
                                   (pk.y() == pd.y() && (pk.y() == 0.0 || pk.y() == 1.0));
            if (same_side) {
                vertices[keep] = 0.5 * (pk + pd);
            }
        }
        for (auto& loop : loops) {
            std::replace(loop.begin(), loop.end(), drop, keep);
            loop.erase(std::unique(loop.begin(), loop.end()), loop.end());
            while (loop.size() > 1 && loop.front() == loop.back()) {
                loop.pop_back();
            }
        }
    }

    // Drop vertices no longer referenced.
    std::vector<int> remap(vertices.size(), -1);
    std::vector<Point2> compact;
    for (auto& loop : loops) {
        for (int& v : loop) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(compact.size());
                compact.push_back(vertices[v]);
            }
            v = remap[v];
        }
    }
    return build_mesh(std::move(compact), std::move(loops));
}

}  // namespace

PolygonalMesh generate_family(Family family, int level, std::uint64_t seed)
{
    const int n = cells_per_side(level);
    const std::uint64_t level_seed = seed + static_cast<std::uint64_t>(level);
    PolygonalMesh mesh;
    switch (family) {
    case Family::a: mesh = squares(n, 0.15, level_seed); break;
    case Family::b: mesh = voronoi(level, level_seed); break;
    case Family::c: mesh = chevron_cells(n); break;
    case Family::d: mesh = diagonal_triangles(n); break;
    case Family::e: mesh = criss_cross(n); break;
    case Family::f: mesh = squares(n, 0.0, level_seed); break;
    }
    mesh.family_tag = std::string(1, family_char(family));
    mesh.seed = seed;
    return mesh;
}

}  // namespace vem
