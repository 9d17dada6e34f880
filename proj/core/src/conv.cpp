#include "poirec/conv.hpp"

#include <cassert>

namespace poirec {

Matrix hg_aggregate(const Hypergraph& g, const Matrix& nodes) {
  assert(nodes.rows == g.node_count);
  Matrix out(g.edge_count(), nodes.cols);
  for (int e = 0; e < g.edge_count(); ++e) {
    auto dst = out.row(e);
    double inv = 1.0 / static_cast<double>(g.edges[e].size());
    for (int n : g.edges[e]) {
      auto src = nodes.row(n);
      for (int c = 0; c < nodes.cols; ++c) dst[c] += src[c];
    }
    for (int c = 0; c < nodes.cols; ++c) dst[c] *= inv;
  }
  return out;
}

Matrix hg_propagate(const Hypergraph& g, const Matrix& messages,
                    const Matrix& prev) {
  assert(messages.rows == g.edge_count());
  assert(prev.rows == g.node_count);
  Matrix out(g.node_count, prev.cols);
  for (int n = 0; n < g.node_count; ++n) {
    auto dst = out.row(n);
    int deg = g.degree(n);
    if (deg == 0) {
      auto src = prev.row(n);
      for (int c = 0; c < prev.cols; ++c) dst[c] = src[c];
      continue;
    }
    double inv = 1.0 / static_cast<double>(deg);
    for (int k = g.node_offsets[n]; k < g.node_offsets[n + 1]; ++k) {
      auto src = messages.row(g.node_edges[k]);
      for (int c = 0; c < prev.cols; ++c) dst[c] += src[c];
    }
    for (int c = 0; c < prev.cols; ++c) dst[c] *= inv;
  }
  return out;
}

Matrix dir_aggregate(const DirectedHypergraph& g, const Matrix& nodes) {
  assert(nodes.rows == g.node_count);
  Matrix out(g.edge_count(), nodes.cols);
  for (int e = 0; e < g.edge_count(); ++e) {
    auto dst = out.row(e);
    double inv = 1.0 / static_cast<double>(g.sources[e].size());
    for (int n : g.sources[e]) {
      auto src = nodes.row(n);
      for (int c = 0; c < nodes.cols; ++c) dst[c] += src[c];
    }
    for (int c = 0; c < nodes.cols; ++c) dst[c] *= inv;
  }
  return out;
}

Matrix dir_propagate(const DirectedHypergraph& g, const Matrix& messages,
                     const Matrix& prev) {
  assert(messages.rows == g.edge_count());
  assert(prev.rows == g.node_count);
  Matrix out(g.node_count, prev.cols);
  for (int n = 0; n < g.node_count; ++n) {
    auto dst = out.row(n);
    int deg = g.in_degree(n);
    if (deg == 0) {
      auto src = prev.row(n);
      for (int c = 0; c < prev.cols; ++c) dst[c] = src[c];
      continue;
    }
    double inv = 1.0 / static_cast<double>(deg);
    for (int k = g.in_offsets[n]; k < g.in_offsets[n + 1]; ++k) {
      auto src = messages.row(g.in_edges[k]);
      for (int c = 0; c < prev.cols; ++c) dst[c] += src[c];
    }
    for (int c = 0; c < prev.cols; ++c) dst[c] *= inv;
  }
  return out;
}

std::vector<double> residual_coeffs(int layers) {
  // sum_{l=0..L} (v^l + v^{l-1}) collects coefficient 2 on every layer
  // except the last, then everything is scaled by 1/(L+1).
  std::vector<double> c(layers + 1, 2.0);
  c[layers] = 1.0;
  double inv = 1.0 / (layers + 1);
  for (auto& v : c) v *= inv;
  return c;
}

Matrix residual_stack(const Hypergraph& g, const Matrix& init, int layers) {
  assert(layers >= 1);
  auto coeffs = residual_coeffs(layers);
  Matrix current = init;
  Matrix acc(init.rows, init.cols);
  axpy(acc, current, coeffs[0]);
  for (int l = 1; l <= layers; ++l) {
    Matrix messages = hg_aggregate(g, current);
    current = hg_propagate(g, messages, current);
    axpy(acc, current, coeffs[l]);
  }
  return acc;
}

Matrix directed_conv(const DirectedHypergraph& g, const Matrix& init,
                     int layers) {
  assert(layers >= 1);
  auto coeffs = residual_coeffs(layers);
  Matrix current = init;
  Matrix acc(init.rows, init.cols);
  axpy(acc, current, coeffs[0]);
  for (int l = 1; l <= layers; ++l) {
    Matrix messages = dir_aggregate(g, current);
    current = dir_propagate(g, messages, current);
    axpy(acc, current, coeffs[l]);
  }
  return acc;
}

}  // namespace poirec
