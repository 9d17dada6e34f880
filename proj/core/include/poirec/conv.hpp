#pragma once

#include <vector>

#include "poirec/hypergraph.hpp"
#include "poirec/matrix.hpp"

namespace poirec {

// Two-step node -> hyperedge -> node convolution with mean pooling.

// m_e = mean of member-node rows.
Matrix hg_aggregate(const Hypergraph& g, const Matrix& nodes);

// v_i = mean of messages over edges containing i; isolated nodes keep
// their row from `prev`.
Matrix hg_propagate(const Hypergraph& g, const Matrix& messages,
                    const Matrix& prev);

// Directed variant: aggregation reads source rows only, propagation
// writes to target nodes only.
Matrix dir_aggregate(const DirectedHypergraph& g, const Matrix& nodes);
Matrix dir_propagate(const DirectedHypergraph& g, const Matrix& messages,
                     const Matrix& prev);

// Combination weights for the averaged residual sum over layers 0..L
// (the l = -1 term is zero).
std::vector<double> residual_coeffs(int layers);

// L-layer stack with averaged residual connections.
Matrix residual_stack(const Hypergraph& g, const Matrix& init, int layers);
Matrix directed_conv(const DirectedHypergraph& g, const Matrix& init,
                     int layers);

}  // namespace poirec
