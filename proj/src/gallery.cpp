#include "padfeec/gallery.hpp"

#include "padfeec/errors.hpp"

namespace padfeec {

namespace {

void require_2d(const CellGeometry& cell) {
    if (cell.dim() != 2) throw Unsupported("gallery families exist for n = 2 only");
}

void require_2d(const PolyForm& f) {
    if (f.n() != 2) throw Unsupported("vector calculus helpers exist for n = 2 only");
}

PolyForm vector_form(const PolyForm& u, const PolyForm& v) {
    return wedge(u, PolyForm::dx(2, {0})) + wedge(v, PolyForm::dx(2, {1}));
}

}  // namespace

PolyForm grad(const PolyForm& f) {
    require_2d(f);
    return exterior_derivative(f);
}

PolyForm div(const PolyForm& u) {
    require_2d(u);
    return hodge_star(exterior_derivative(hodge_star(u)));
}

PolyForm curl(const PolyForm& f) {
    require_2d(f);
    return -hodge_star(exterior_derivative(f));
}

PolyForm rot(const PolyForm& u) {
    require_2d(u);
    return hodge_star(exterior_derivative(u));
}

double edge_length(const CellGeometry& cell, int i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    return (cell.vertices()[j] - cell.vertices()[k]).norm();
}

double height(const CellGeometry& cell, int i) { return 2.0 * cell.volume() / edge_length(cell, i); }

PolyForm psi_bubble(const CellGeometry& cell) {
    require_2d(cell);
    std::vector<PolyForm> l;
    for (int i = 0; i < 3; ++i) l.push_back(PolyForm::barycentric(cell, i));
    PolyForm out(2, 0);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        out += wedge(wedge(l[i], l[j]), l[i] - l[j]);
    }
    return out;
}

PolyForm psi_zero(const CellGeometry& cell) {
    require_2d(cell);
    std::vector<PolyForm> l;
    for (int i = 0; i < 3; ++i) l.push_back(PolyForm::barycentric(cell, i));
    return wedge(l[0], l[1]) + wedge(l[1], l[2]) + wedge(l[2], l[0]) - PolyForm::scalar(2, 1.0 / 6.0);
}

LocalSpace gallery_2d(const CellGeometry& cell, LocalTag family) {
    require_2d(cell);
    LocalSpace s;
    s.cell = cell;
    s.tag = family;
    std::vector<PolyForm> l;
    for (int i = 0; i < 3; ++i) l.push_back(PolyForm::barycentric(cell, i));
    const auto& a = cell.vertices();
    const double area2 = 2.0 * cell.volume();
    auto p2 = [&] {
        std::vector<PolyForm> b = l;
        b.push_back(wedge(l[0], l[1]));
        b.push_back(wedge(l[1], l[2]));
        b.push_back(wedge(l[0], l[2]));
        return b;
    };
    auto p1vec = [&] {
        std::vector<PolyForm> b;
        for (int axis = 0; axis < 2; ++axis)
            for (int i = 0; i < 3; ++i) b.push_back(wedge(l[i], PolyForm::dx(2, {axis})));
        return b;
    };
    switch (family) {
        case LocalTag::RT:
            s.k = 1;
            for (int i = 0; i < 3; ++i) {
                const Vec c = a[i] - a[(i + 1) % 3] - a[(i + 2) % 3];
                const PolyForm u = PolyForm::coordinate(2, 0, -c(0)) * (1.0 / area2);
                const PolyForm v = PolyForm::coordinate(2, 1, -c(1)) * (1.0 / area2);
                s.basis.push_back(vector_form(u, v));
            }
            break;
        case LocalTag::RTperp:
            s.k = 1;
            for (int i = 0; i < 3; ++i) {
                // (a - x)^perp = (x_2 - a_2, a_1 - x_1)
                const double h = height(cell, i);
                const PolyForm u = PolyForm::coordinate(2, 1, a[i](1)) * (1.0 / h);
                const PolyForm v = PolyForm::coordinate(2, 0, a[i](0)) * (-1.0 / h);
                s.basis.push_back(vector_form(u, v));
            }
            break;
        case LocalTag::P1:
            s.k = 0;
            s.basis = l;
            break;
        case LocalTag::CR:
            s.k = 0;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + 1) % 3, j = (k + 2) % 3;
                s.basis.push_back((l[i] + l[j] - l[k]) * (1.0 / edge_length(cell, k)));
            }
            break;
        case LocalTag::P2:
            s.k = 0;
            s.basis = p2();
            break;
        case LocalTag::P2plus:
            s.k = 0;
            s.basis = p2();
            s.basis.push_back(psi_bubble(cell));
            break;
        case LocalTag::P1vec:
            s.k = 1;
            s.basis = p1vec();
            break;
        case LocalTag::P1plus:
            s.k = 1;
            s.basis = p1vec();
            s.basis.push_back(curl(psi_bubble(cell)));
            break;
        default:
            throw InvalidParameter("not a gallery family: " + tag_name(family));
    }
    return s;
}

std::string family_name(PairFamily f) {
    switch (f) {
        case PairFamily::RT: return "RT";
        case PairFamily::CR: return "CR";
        case PairFamily::eFS: return "eFS";
        case PairFamily::eBDM: return "eBDM";
        case PairFamily::eBDMlow: return "eBDMlow";
    }
    return "?";
}

LocalPair gallery_pair(const CellGeometry& cell, PairFamily f) {
    auto neg_div = [](const PolyForm& u) { return -div(u); };
    auto neg_grad = [](const PolyForm& u) { return -grad(u); };
    switch (f) {
        case PairFamily::RT:
            return make_local_pair(gallery_2d(cell, LocalTag::P1), gallery_2d(cell, LocalTag::RT), grad, neg_div);
        case PairFamily::CR:
            return make_local_pair(gallery_2d(cell, LocalTag::CR), gallery_2d(cell, LocalTag::RTperp), curl, rot);
        case PairFamily::eFS:
            return make_local_pair(gallery_2d(cell, LocalTag::P2plus), gallery_2d(cell, LocalTag::P1vec), curl,
                                   rot);
        case PairFamily::eBDM:
            return make_local_pair(gallery_2d(cell, LocalTag::P1plus), gallery_2d(cell, LocalTag::P2), div,
                                   neg_grad);
        case PairFamily::eBDMlow:
            return make_local_pair(gallery_2d(cell, LocalTag::P1vec), gallery_2d(cell, LocalTag::P2), div,
                                   neg_grad);
    }
    throw InvalidParameter("unknown family");
}

}  // namespace padfeec
