#include "doctest.h"

#include "padfeec/errors.hpp"
#include "padfeec/mesh.hpp"

#include <string>

using namespace padfeec;

namespace {

int euler(const Mesh& m) {
    int chi = 0;
    for (int k = 0; k <= m.dim(); ++k) chi += (k % 2 ? -1 : 1) * m.subsimplices(k).size();
    return chi;
}

}  // namespace

TEST_CASE("structured unit box counts") {
    for (int n : {1, 2, 4, 8}) {
        const Mesh m = generate_structured(2, n, Domain::unit_box);
        CHECK(m.num_vertices() == (n + 1) * (n + 1));
        CHECK(m.num_cells() == 2 * n * n);
        CHECK(m.subsimplices(1).size() == 3 * n * n + 2 * n);
        CHECK(euler(m) == 1);
        CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("box with a hole has one tunnel") {
    for (int n : {4, 8}) {
        const Mesh m = generate_structured(2, n, Domain::box_with_hole);
        CHECK(euler(m) == 0);
        CHECK(m.total_volume() < 1.0);
    }
    CHECK_THROWS_AS(generate_structured(2, 6, Domain::box_with_hole), InvalidParameter);
}

TEST_CASE("three-dimensional box") {
    const Mesh m = mesh_from_source("box3:1");
    CHECK(m.dim() == 3);
    CHECK(euler(m) == 1);
    CHECK(m.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boundary operator squares to zero") {
    for (const char* src : {"box:3", "hole:4", "box3:1"}) {
        const Mesh m = mesh_from_source(src);
        for (int k = 2; k <= m.dim(); ++k) CHECK((m.boundary_matrix(k - 1) * m.boundary_matrix(k)).cwiseAbs().sum() == 0);
    }
}

TEST_CASE("uniform refinement quadruples the cells") {
    const Mesh m = generate_structured(2, 2, Domain::unit_box);
    const Mesh r = refine_uniform(m);
    CHECK(r.num_cells() == 4 * m.num_cells());
    CHECK(r.total_volume() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.quality().h_max == doctest::Approx(m.quality().h_max / 2).epsilon(1e-12));
    CHECK(euler(r) == 1);
}

TEST_CASE("json round trip") {
    const Mesh m = mesh_from_source("hole:4");
    const Mesh back = Mesh::from_json(m.to_json());
    CHECK(back.num_cells() == m.num_cells());
    CHECK(back.to_json() == m.to_json());
}

TEST_CASE("malformed meshes are rejected with the offending entity") {
    // three triangles on the facet (0,1)
    const std::string bad =
        R"({"dim":2,"vertices":[[0,0],[1,0],[0,1],[1,1],[0.5,-1]],"cells":[[0,1,2],[0,1,3],[0,1,4]]})";
    try {
        Mesh::from_json(bad);
        FAIL("accepted a non-manifold facet");
    } catch (const MeshError& e) {
        CHECK(std::string(e.what()).find("facet") != std::string::npos);
    }
    CHECK_THROWS_AS(Mesh::from_json(R"({"dim":2,"vertices":[[0,0],[1,0],[2,0]],"cells":[[0,1,2]]})"), MeshError);
    CHECK_THROWS_AS(Mesh::from_json(R"({"dim":2,"vertices":[[0,0]],"cells":[[0,1,2]]})"), MeshError);
    CHECK_THROWS_AS(Mesh::from_json("{not json"), MeshError);
}

TEST_CASE("standing hypothesis is reported on coarse boxes") {
    // A corner vertex of box:1 touches only boundary vertices.
    CHECK_FALSE(mesh_from_source("box:1").standing_hypothesis_holds());
    const Mesh m = mesh_from_source("box:4");
    for (int v : m.boundary_vertices_without_interior_neighbor()) CHECK(v < m.num_vertices());
}

TEST_CASE("vertex patches cover every cell three times in 2D") {
    const Mesh m = mesh_from_source("box:3");
    int total = 0;
    for (int v = 0; v < m.num_vertices(); ++v) total += static_cast<int>(m.vertex_patch(v).cells.size());
    CHECK(total == 3 * m.num_cells());
}
