#include "padfeec/mesh.hpp"

#include "padfeec/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace padfeec {

namespace {

std::string simplex_str(const Simplex& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "]";
}

double dist(const Point& a, const Point& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                     (a[2] - b[2]) * (a[2] - b[2]));
}

// Point p strictly inside the relative interior of a facet (barycentric test).
bool inside_facet(int dim, const std::vector<Point>& f, const Point& p) {
    const int m = static_cast<int>(f.size());  // dim vertices
    Eigen::MatrixXd a(dim + 1, m);
    Eigen::VectorXd b(dim + 1);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < dim; ++i) a(i, j) = f[j][i];
        a(dim, j) = 1.0;
    }
    for (int i = 0; i < dim; ++i) b(i) = p[i];
    b(dim) = 1.0;
    const Eigen::VectorXd lam = a.colPivHouseholderQr().solve(b);
    if ((a * lam - b).norm() > 1e-10) return false;
    for (int j = 0; j < m; ++j)
        if (lam(j) <= 1e-10) return false;
    return true;
}

}  // namespace

std::vector<std::vector<int>> combinations(int m, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > m) return out;
    std::vector<int> c(k);
    std::iota(c.begin(), c.end(), 0);
    while (true) {
        out.push_back(c);
        int i = k - 1;
        while (i >= 0 && c[i] == m - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
    return out;
}

int permutation_parity(std::vector<int> p) {
    int sign = 1;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) sign = -sign;
    return sign;
}

int SubSimplexTable::index_of(const Simplex& s) const {
    auto it = std::lower_bound(simplices.begin(), simplices.end(), s);
    if (it == simplices.end() || *it != s) return -1;
    return static_cast<int>(it - simplices.begin());
}

double signed_volume(int dim, const std::vector<Point>& pts) {
    Eigen::MatrixXd m(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) m(i, j) = pts[j + 1][i] - pts[0][i];
    double fact = 1.0;
    for (int i = 2; i <= dim; ++i) fact *= i;
    return m.determinant() / fact;
}

Mesh::Mesh(int dim, std::vector<Point> vertices, std::vector<Simplex> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
    if (dim_ < 1 || dim_ > 3) throw InvalidParameter("mesh dimension must be 1, 2 or 3");
    if (cells_.empty()) throw MeshError("mesh has no cells");
    const int nv = num_vertices();
    std::set<Simplex> seen;
    for (size_t c = 0; c < cells_.size(); ++c) {
        auto& cell = cells_[c];
        if (static_cast<int>(cell.size()) != dim_ + 1)
            throw MeshError("cell " + std::to_string(c) + " has wrong vertex count");
        for (int v : cell)
            if (v < 0 || v >= nv) throw MeshError("cell " + std::to_string(c) + " has vertex index out of range");
        std::sort(cell.begin(), cell.end());
        if (std::adjacent_find(cell.begin(), cell.end()) != cell.end())
            throw MeshError("cell " + std::to_string(c) + " repeats a vertex");
        if (!seen.insert(cell).second) throw MeshError("duplicate cell " + simplex_str(cell));
        std::vector<Point> pts;
        for (int v : cell) pts.push_back(vertices_[v]);
        const double vol = signed_volume(dim_, pts);
        double scale = 0.0;
        for (int i = 1; i <= dim_; ++i) scale = std::max(scale, dist(pts[0], pts[i]));
        if (std::abs(vol) <= 1e-14 * std::pow(scale, dim_))
            throw MeshError("degenerate cell " + simplex_str(cell));
        orientation_.push_back(vol > 0 ? 1 : -1);
        volume_.push_back(std::abs(vol));
    }

    tables_.resize(dim_ + 1);
    for (int k = 0; k <= dim_; ++k) {
        SubSimplexTable& t = tables_[k];
        t.k = k;
        const auto local = combinations(dim_ + 1, k + 1);
        std::set<Simplex> all;
        for (const auto& cell : cells_)
            for (const auto& loc : local) {
                Simplex s;
                for (int p : loc) s.push_back(cell[p]);
                all.insert(s);
            }
        t.simplices.assign(all.begin(), all.end());
        t.star.assign(t.simplices.size(), {});
        t.cell_subs.assign(cells_.size(), {});
        t.cell_signs.assign(cells_.size(), {});
        for (size_t c = 0; c < cells_.size(); ++c)
            for (const auto& loc : local) {
                Simplex s;
                for (int p : loc) s.push_back(cells_[c][p]);
                std::vector<int> order(s.size());
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](int a, int b) { return s[a] < s[b]; });
                Simplex sorted = s;
                std::sort(sorted.begin(), sorted.end());
                const int idx = t.index_of(sorted);
                t.cell_subs[c].push_back(idx);
                t.cell_signs[c].push_back(permutation_parity(order));
                t.star[idx].push_back(static_cast<int>(c));
            }
    }

    // Facets: conformity and boundary classification.
    const SubSimplexTable& facets = tables_[dim_ - 1];
    std::vector<bool> boundary_vertex(nv, false);
    std::vector<int> boundary_facets;
    for (int f = 0; f < facets.size(); ++f) {
        const auto nc = facets.star[f].size();
        if (nc > 2)
            throw MeshError("non-conforming complex: facet " + simplex_str(facets.simplices[f]) +
                            " shared by " + std::to_string(nc) + " cells");
        if (nc == 1) boundary_facets.push_back(f);
    }
    // Hanging vertices show up inside boundary facets of the neighbor.
    for (int f : boundary_facets) {
        std::vector<Point> pts;
        for (int v : facets.simplices[f]) pts.push_back(vertices_[v]);
        for (int v = 0; v < nv; ++v) {
            const auto& s = facets.simplices[f];
            if (std::find(s.begin(), s.end(), v) != s.end()) continue;
            if (dim_ >= 2 && inside_facet(dim_, pts, vertices_[v]))
                throw MeshError("non-conforming complex: vertex " + std::to_string(v) +
                                " hangs on facet " + simplex_str(s));
        }
    }
    for (int k = 0; k <= dim_; ++k) {
        SubSimplexTable& t = tables_[k];
        t.boundary.assign(t.simplices.size(), false);
        if (k == dim_) continue;
        for (int f : boundary_facets) {
            const auto& fs = facets.simplices[f];
            for (const auto& loc : combinations(dim_, k + 1)) {
                Simplex s;
                for (int p : loc) s.push_back(fs[p]);
                t.boundary[t.index_of(s)] = true;
            }
        }
    }
}

double Mesh::total_volume() const {
    return std::accumulate(volume_.begin(), volume_.end(), 0.0);
}

Eigen::MatrixXi Mesh::boundary_matrix(int k) const {
    const auto& hi = tables_.at(k);
    const auto& lo = tables_.at(k - 1);
    Eigen::MatrixXi b = Eigen::MatrixXi::Zero(lo.size(), hi.size());
    for (int j = 0; j < hi.size(); ++j) {
        const auto& s = hi.simplices[j];
        for (size_t omit = 0; omit < s.size(); ++omit) {
            Simplex f;
            for (size_t i = 0; i < s.size(); ++i)
                if (i != omit) f.push_back(s[i]);
            b(lo.index_of(f), j) += (omit % 2 == 0) ? 1 : -1;
        }
    }
    return b;
}

Patch Mesh::vertex_patch(int v) const {
    Patch p;
    p.center = v;
    const auto& cells = tables_[0].star.at(v);
    if (dim_ != 2 || cells.size() <= 2) {
        p.cells = cells;
        return p;
    }
    // Order by walking across shared edges through v; start at a cell with a
    // boundary edge at v if there is one so that open fans come out linear.
    auto share_edge = [&](int a, int b) {
        int common = 0;
        for (int x : cells_[a])
            if (std::find(cells_[b].begin(), cells_[b].end(), x) != cells_[b].end()) ++common;
        return common == 2;
    };
    std::vector<int> rest = cells;
    int start = rest.front();
    for (int c : rest) {
        int neighbors = 0;
        for (int d : rest)
            if (d != c && share_edge(c, d)) ++neighbors;
        if (neighbors < 2) {
            start = c;
            break;
        }
    }
    p.cells.push_back(start);
    rest.erase(std::find(rest.begin(), rest.end(), start));
    while (!rest.empty()) {
        auto it = std::find_if(rest.begin(), rest.end(), [&](int c) { return share_edge(p.cells.back(), c); });
        if (it == rest.end()) it = rest.begin();
        p.cells.push_back(*it);
        rest.erase(it);
    }
    return p;
}

std::vector<int> Mesh::boundary_vertices_without_interior_neighbor() const {
    const auto& verts = tables_[0];
    const auto& edges = tables_[1];
    std::vector<bool> ok(num_vertices(), false);
    for (const auto& e : edges.simplices) {
        if (!verts.boundary[e[1]]) ok[e[0]] = true;
        if (!verts.boundary[e[0]]) ok[e[1]] = true;
    }
    std::vector<int> out;
    for (int v = 0; v < num_vertices(); ++v)
        if (verts.boundary[v] && !ok[v]) out.push_back(v);
    return out;
}

MeshQuality Mesh::quality() const {
    MeshQuality q;
    q.min_angle_deg = 180.0;
    for (const auto& cell : cells_) {
        double longest = 0.0;
        for (size_t i = 0; i < cell.size(); ++i)
            for (size_t j = i + 1; j < cell.size(); ++j)
                longest = std::max(longest, dist(vertices_[cell[i]], vertices_[cell[j]]));
        q.h_max = std::max(q.h_max, longest);
        std::vector<Point> pts;
        for (int v : cell) pts.push_back(vertices_[v]);
        // Inradius-based aspect: h / (2 r) style ratio, dimension generic.
        double facet_area = 0.0;
        for (size_t omit = 0; omit < cell.size(); ++omit) {
            if (dim_ == 1) { facet_area += 1.0; continue; }
            std::vector<Point> f;
            for (size_t i = 0; i < cell.size(); ++i)
                if (i != omit) f.push_back(pts[i]);
            if (dim_ == 2) facet_area += dist(f[0], f[1]);
            else {
                Eigen::Vector3d a(f[1][0] - f[0][0], f[1][1] - f[0][1], f[1][2] - f[0][2]);
                Eigen::Vector3d b(f[2][0] - f[0][0], f[2][1] - f[0][1], f[2][2] - f[0][2]);
                facet_area += 0.5 * a.cross(b).norm();
            }
        }
        const double r = dim_ * std::abs(signed_volume(dim_, pts)) / facet_area;
        q.max_aspect = std::max(q.max_aspect, longest / (2.0 * r));
        if (dim_ == 2)
            for (int i = 0; i < 3; ++i) {
                const Point& a = pts[i];
                const Point& b = pts[(i + 1) % 3];
                const Point& c = pts[(i + 2) % 3];
                const double u0 = b[0] - a[0], u1 = b[1] - a[1], v0 = c[0] - a[0], v1 = c[1] - a[1];
                const double ang = std::acos(std::clamp((u0 * v0 + u1 * v1) / (std::hypot(u0, u1) * std::hypot(v0, v1)), -1.0, 1.0));
                q.min_angle_deg = std::min(q.min_angle_deg, ang * 180.0 / M_PI);
            }
    }
    if (dim_ != 2) q.min_angle_deg = 0.0;
    return q;
}

std::string Mesh::to_json() const {
    nlohmann::ordered_json j;
    j["dim"] = dim_;
    j["vertices"] = nlohmann::json::array();
    for (const auto& p : vertices_) {
        std::vector<double> x(p.begin(), p.begin() + dim_);
        j["vertices"].push_back(x);
    }
    j["cells"] = cells_;
    return j.dump();
}

Mesh Mesh::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw MeshError(std::string("mesh JSON parse failure: ") + e.what());
    }
    if (!j.contains("dim") || !j.contains("vertices") || !j.contains("cells"))
        throw MeshError("mesh JSON needs dim, vertices and cells");
    const int dim = j["dim"].get<int>();
    std::vector<Point> verts;
    for (const auto& v : j["vertices"]) {
        if (static_cast<int>(v.size()) != dim) throw MeshError("vertex with wrong coordinate count");
        Point p{0.0, 0.0, 0.0};
        for (int i = 0; i < dim; ++i) p[i] = v[i].get<double>();
        verts.push_back(p);
    }
    std::vector<Simplex> cells;
    for (const auto& c : j["cells"]) cells.push_back(c.get<Simplex>());
    return Mesh(dim, std::move(verts), std::move(cells));
}

Mesh generate_structured(int n, int N, Domain domain) {
    if (n != 2 && n != 3) throw InvalidParameter("structured meshes exist for n = 2, 3");
    if (N < 1) throw InvalidParameter("N must be positive");
    const bool hole = domain == Domain::box_with_hole;
    if (hole && (N % 4 != 0)) throw InvalidParameter("hole variant needs N divisible by 4");
    const int lo = N / 4, hi = 3 * N / 4;
    auto in_hole = [&](int i, int j) { return hole && i >= lo && i < hi && j >= lo && j < hi; };

    std::vector<Point> verts;
    std::vector<Simplex> cells;
    if (n == 2) {
        auto id = [&](int i, int j) { return j * (N + 1) + i; };
        for (int j = 0; j <= N; ++j)
            for (int i = 0; i <= N; ++i) verts.push_back({double(i) / N, double(j) / N, 0.0});
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                if (in_hole(i, j)) continue;
                cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
    } else {
        auto id = [&](int i, int j, int k) { return (k * (N + 1) + j) * (N + 1) + i; };
        for (int k = 0; k <= N; ++k)
            for (int j = 0; j <= N; ++j)
                for (int i = 0; i <= N; ++i) verts.push_back({double(i) / N, double(j) / N, double(k) / N});
        // Six tetrahedra per cube along the main diagonal; the hole is a tunnel in z.
        const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
        for (int k = 0; k < N; ++k)
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i) {
                    if (in_hole(i, j)) continue;
                    for (const auto& p : perms) {
                        std::array<int, 3> x{i, j, k};
                        Simplex t{id(x[0], x[1], x[2])};
                        for (int a : p) {
                            ++x[a];
                            t.push_back(id(x[0], x[1], x[2]));
                        }
                        cells.push_back(t);
                    }
                }
    }
    // Drop vertices not used by any cell and renumber.
    std::vector<int> remap(verts.size(), -1);
    for (const auto& c : cells)
        for (int v : c) remap[v] = 0;
    std::vector<Point> used;
    for (size_t v = 0; v < verts.size(); ++v)
        if (remap[v] == 0) {
            remap[v] = static_cast<int>(used.size());
            used.push_back(verts[v]);
        }
    for (auto& c : cells)
        for (int& v : c) v = remap[v];
    return Mesh(n, std::move(used), std::move(cells));
}

Mesh refine_uniform(const Mesh& mesh) {
    if (mesh.dim() != 2) throw Unsupported("uniform refinement is implemented for n = 2 only");
    const auto& edges = mesh.subsimplices(1);
    std::vector<Point> verts = mesh.vertices();
    const int nv = mesh.num_vertices();
    for (const auto& e : edges.simplices) {
        const Point& a = verts[e[0]];
        const Point& b = verts[e[1]];
        verts.push_back({0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.0});
    }
    std::vector<Simplex> cells;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& t = mesh.cell(c);
        auto mid = [&](int a, int b) { return nv + edges.index_of({std::min(a, b), std::max(a, b)}); };
        const int m01 = mid(t[0], t[1]), m02 = mid(t[0], t[2]), m12 = mid(t[1], t[2]);
        cells.push_back({t[0], m01, m02});
        cells.push_back({t[1], m01, m12});
        cells.push_back({t[2], m02, m12});
        cells.push_back({m01, m02, m12});
    }
    return Mesh(2, std::move(verts), std::move(cells));
}

Mesh load_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return Mesh::from_json(ss.str());
}

Mesh mesh_from_source(const std::string& source) {
    const auto colon = source.find(':');
    if (colon != std::string::npos) {
        const std::string kind = source.substr(0, colon);
        const std::string num = source.substr(colon + 1);
        int n = 2;
        Domain d;
        if (kind == "box" || kind == "box3") d = Domain::unit_box;
        else if (kind == "hole" || kind == "hole3") d = Domain::box_with_hole;
        else return load_mesh_file(source);
        if (kind.back() == '3') n = 3;
        int N = 0;
        try {
            size_t used = 0;
            N = std::stoi(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
            throw InvalidParameter("bad mesh size in '" + source + "'");
        }
        return generate_structured(n, N, d);
    }
    return load_mesh_file(source);
}

}  // namespace padfeec
