#pragma once

#include "padfeec/shape.hpp"

namespace padfeec {

// Vector calculus on 2-D forms: a vector field (u, v) is the 1-form u dx + v dy.
PolyForm grad(const PolyForm& f);
PolyForm div(const PolyForm& u);
PolyForm curl(const PolyForm& f);  // (f_y, -f_x)
PolyForm rot(const PolyForm& u);   // u2_x - u1_y

// Closed-form local bases of the 2-D families, unnormalized:
//   RT      b^{a_i} = (x + a_i - a_j - a_k) / (2S)
//   RTperp  psi_i = (a_i - x)^perp / h_i, x^perp = (-y, x)
//   P1      lambda_i
//   CR      b_k = (lambda_i + lambda_j - lambda_k) / |e_k|
//   P2, P1vec, P2plus = P2 + psi_B, P1plus = P1vec + curl psi_B
LocalSpace gallery_2d(const CellGeometry& cell, LocalTag family);

PolyForm psi_bubble(const CellGeometry& cell);  // psi_B
PolyForm psi_zero(const CellGeometry& cell);    // psi_0

enum class PairFamily { RT, CR, eFS, eBDM, eBDMlow };
std::string family_name(PairFamily f);

// The local base pairs of the 2-D examples:
//   RT:      (grad, P1)      / (-div, RT)
//   CR:      (curl, CR)      / (rot, RTperp)
//   eFS:     (curl, P2plus)  / (rot, P1vec)
//   eBDM:    (div, P1plus)   / (-grad, P2)
//   eBDMlow: (div, P1vec)    / (-grad, P2)
LocalPair gallery_pair(const CellGeometry& cell, PairFamily f);

// Length of the edge opposite vertex i and the matching height.
double edge_length(const CellGeometry& cell, int i);
double height(const CellGeometry& cell, int i);

}  // namespace padfeec
