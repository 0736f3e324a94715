#pragma once

#include "padfeec/polyform.hpp"

#include <functional>
#include <vector>

namespace padfeec {

// Barycentric points and weights summing to 1 (multiply by |T|).
struct QuadRule {
    std::vector<Vec> bary;
    std::vector<double> weights;
};

// Grundmann-Moeller rule on the n-simplex, exact for polynomials of total degree <= degree.
QuadRule simplex_rule(int n, int degree);

// Componentwise field: value of each dx^alpha coefficient at a Cartesian point.
using FormField = std::function<Vec(const Vec&)>;

double quad_inner(const FormField& f, const PolyForm& g, const CellGeometry& cell, int degree = 6);
double quad_inner(const PolyForm& f, const PolyForm& g, const CellGeometry& cell, int degree = 6);

}  // namespace padfeec
