#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace padfeec {

using Point = std::array<double, 3>;
using Simplex = std::vector<int>;

enum class Domain { unit_box, box_with_hole };

// Oriented sub-simplices of one dimension. Entries are sorted vertex tuples
// in lexicographic order; cell_subs[c] follows the lexicographic order of
// local vertex positions inside the (sorted) cell.
struct SubSimplexTable {
    int k = 0;
    std::vector<Simplex> simplices;
    std::vector<bool> boundary;
    std::vector<std::vector<int>> cell_subs;
    std::vector<std::vector<int>> cell_signs;  // parity local order -> sorted order
    std::vector<std::vector<int>> star;        // cells containing each sub-simplex

    int size() const { return static_cast<int>(simplices.size()); }
    int index_of(const Simplex& s) const;  // -1 if absent
};

struct Patch {
    int center = -1;
    std::vector<int> cells;
};

struct MeshQuality {
    double min_angle_deg = 0.0;
    double max_aspect = 0.0;
    double h_max = 0.0;
};

class Mesh {
public:
    Mesh() = default;
    // Validates conformity; cell tuples are stored sorted ascending.
    Mesh(int dim, std::vector<Point> vertices, std::vector<Simplex> cells);

    int dim() const { return dim_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Simplex>& cells() const { return cells_; }
    const Simplex& cell(int c) const { return cells_[c]; }
    int orientation(int c) const { return orientation_[c]; }
    double volume(int c) const { return volume_[c]; }
    double total_volume() const;

    const SubSimplexTable& subsimplices(int k) const { return tables_.at(k); }
    // Integer incidence of (k-1)-faces in k-simplices, rows = faces.
    Eigen::MatrixXi boundary_matrix(int k) const;

    Patch vertex_patch(int v) const;
    std::vector<int> boundary_vertices_without_interior_neighbor() const;
    bool standing_hypothesis_holds() const {
        return boundary_vertices_without_interior_neighbor().empty();
    }
    MeshQuality quality() const;

    std::string to_json() const;
    static Mesh from_json(const std::string& text);

private:
    int dim_ = 0;
    std::vector<Point> vertices_;
    std::vector<Simplex> cells_;
    std::vector<int> orientation_;
    std::vector<double> volume_;
    std::vector<SubSimplexTable> tables_;
};

double signed_volume(int dim, const std::vector<Point>& pts);

// N >= 1 for the box; the hole variant needs N divisible by 4.
Mesh generate_structured(int n, int N, Domain domain);
Mesh refine_uniform(const Mesh& mesh);

// "box:N", "hole:N", optionally "box3:N"/"hole3:N", else a JSON file path.
Mesh mesh_from_source(const std::string& source);
Mesh load_mesh_file(const std::string& path);

// All size-k subsets of {0..m-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int m, int k);
int permutation_parity(std::vector<int> p);

}  // namespace padfeec
