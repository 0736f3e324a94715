#include "doctest.h"

#include "padfeec/spaces.hpp"

using namespace padfeec;

namespace {

std::shared_ptr<const Mesh> load(const char* src) { return std::make_shared<const Mesh>(mesh_from_source(src)); }

int interior(const Mesh& m, int k) {
    const auto& t = m.subsimplices(k);
    int c = 0;
    for (int i = 0; i < t.size(); ++i) c += !t.boundary[i];
    return c;
}

}  // namespace

TEST_CASE("conforming Whitney dimensions count simplices") {
    for (const char* src : {"box:2", "hole:4", "box3:1"}) {
        const auto m = load(src);
        for (int k = 0; k <= m->dim(); ++k) {
            const GlobalSpace w = conforming_whitney(m, k, BC::none);
            const GlobalSpace w0 = conforming_whitney(m, k, BC::homogeneous);
            CHECK(w.dofs() == m->subsimplices(k).size());
            CHECK(w0.dofs() == interior(*m, k));
            CHECK(trace_continuity_defect(w) < 1e-12);
            CHECK(trace_continuity_defect(w0) < 1e-12);
            // the dual conforming space is the cell-wise star of the primal one
            CHECK(conforming_dual(m, m->dim() - k, BC::none).dofs() == w.dofs());
        }
    }
}

TEST_CASE("ABCFES contains the conforming space and matches its local basis") {
    for (const char* src : {"box:2", "hole:4", "box3:1"}) {
        const auto m = load(src);
        for (int k = 0; k < m->dim(); ++k)
            for (BC bc : {BC::none, BC::homogeneous}) {
                const AbcResult a = abcfes_by_constraints(m, k, bc);
                CHECK(a.space.dofs() == a.space.broken_dim() - a.constraints.rank);
                const GlobalSpace w = conforming_whitney(m, k, bc);
                const Metric g = Metric::identity(a.space.broken_dim());
                CHECK(containment_residual(Subspace(w.coords()), Subspace(a.space.coords()), g) < 1e-10);
                const BasisAtlas atlas = abcfes_local_basis(m, k, bc);
                CHECK(static_cast<int>(atlas.functions.size()) == a.space.dofs());
                CHECK(max_principal_angle(Subspace(atlas.to_broken()), Subspace(a.space.coords()), g) < 1e-9);
            }
    }
}

TEST_CASE("Type-II functions per interior vertex patch") {
    const auto m = load("box:4");
    const BasisAtlas atlas = abcfes_local_basis(m, 1, BC::none);
    const auto per = atlas.type_ii_per_anchor(m->num_vertices());
    const auto& verts = m->subsimplices(0);
    for (int v = 0; v < m->num_vertices(); ++v)
        if (!verts.boundary[v]) CHECK(per[v] == static_cast<int>(m->vertex_patch(v).cells.size()) - 1);
}

TEST_CASE("top degree ABCFES is the broken space") {
    const auto m = load("box:2");
    for (BC bc : {BC::none, BC::homogeneous}) {
        const AbcResult a = abcfes_by_constraints(m, 2, bc);
        CHECK(a.space.dofs() == a.space.broken_dim());
    }
}

TEST_CASE("broken operators are exact on Whitney layouts") {
    const auto m = load("hole:4");
    for (int k = 0; k < 2; ++k) {
        const LayoutPtr a = make_layout(m, k, LocalFamily::primal);
        const LayoutPtr b = make_layout(m, k + 1, LocalFamily::primal);
        const Mat d1 = broken_op(*a, DiffOp::d, *b);
        if (k == 0) {
            const LayoutPtr c = make_layout(m, 2, LocalFamily::primal);
            const Mat d2 = broken_op(*b, DiffOp::d, *c);
            CHECK((d2 * d1).norm() < 1e-14 * d2.norm() * d1.norm());
        }
    }
}

TEST_CASE("P0 projection and star are consistent") {
    const auto m = load("box:2");
    for (int j = 0; j <= 2; ++j) {
        const Mat s = p0_star(*m, j);
        const Mat back = p0_star(*m, 2 - j);
        const double sign = (j * (2 - j)) % 2 ? -1.0 : 1.0;
        CHECK((back * s - sign * Mat::Identity(s.cols(), s.cols())).norm() < 1e-12);
    }
}
