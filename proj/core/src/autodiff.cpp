#include "poirec/autodiff.hpp"

#include <cassert>
#include <cmath>
#include <memory>

#include "poirec/conv.hpp"
#include "poirec/types.hpp"

namespace poirec::ad {

namespace {
constexpr double kNormFloor = 1e-12;
}

int Tape::push(Matrix value, std::function<void(Tape&, int)> fn) {
  Node n;
  n.owned = std::move(value);
  n.backprop = std::move(fn);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::leaf(Matrix value) { return {push(std::move(value), nullptr)}; }

Var Tape::param(const Matrix* value) {
  Node n;
  n.view = value;
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

const Matrix& Tape::value(Var v) const { return val(v.id); }

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  if (!n.grad_set) {
    const Matrix& m = val(v.id);
    n.grad = Matrix(m.rows, m.cols);
    n.grad_set = true;
  }
  return n.grad;
}

Matrix Tape::grad_or_zero(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad_set) return n.grad;
  const Matrix& m = val(v.id);
  return Matrix(m.rows, m.cols);
}

double Tape::scalar(Var v) const {
  const Matrix& m = val(v.id);
  assert(m.rows == 1 && m.cols == 1);
  return m.data[0];
}

void Tape::backward(Var root) {
  const Matrix& r = val(root.id);
  if (r.rows != 1 || r.cols != 1)
    throw DataError("backward() root must be a 1x1 scalar");
  grad(root).data[0] = 1.0;
  for (int i = root.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad_set && n.backprop) n.backprop(*this, i);
  }
}

Var Tape::add(Var a, Var b) {
  Matrix out = val(a.id);
  axpy(out, val(b.id), 1.0);
  return {push(std::move(out), [a, b](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    axpy(t.grad(a), g, 1.0);
    axpy(t.grad(b), g, 1.0);
  })};
}

Var Tape::scale(Var a, double k) {
  Matrix out = val(a.id);
  for (auto& v : out.data) v *= k;
  return {push(std::move(out), [a, k](Tape& t, int self) {
    axpy(t.grad(a), t.nodes_[self].grad, k);
  })};
}

Var Tape::add_scaled(Var a, Var b, double k) {
  Matrix out = val(a.id);
  axpy(out, val(b.id), k);
  return {push(std::move(out), [a, b, k](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    axpy(t.grad(a), g, 1.0);
    axpy(t.grad(b), g, k);
  })};
}

Var Tape::gather_rows(Var m, std::vector<int> idx) {
  const Matrix& src = val(m.id);
  Matrix out(static_cast<int>(idx.size()), src.cols);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    auto s = src.row(idx[k]);
    auto d = out.row(static_cast<int>(k));
    std::copy(s.begin(), s.end(), d.begin());
  }
  return {push(std::move(out),
               [m, idx = std::move(idx)](Tape& t, int self) {
                 const Matrix& g = t.nodes_[self].grad;
                 Matrix& gm = t.grad(m);
                 for (std::size_t k = 0; k < idx.size(); ++k) {
                   auto s = g.row(static_cast<int>(k));
                   auto d = gm.row(idx[k]);
                   for (int c = 0; c < g.cols; ++c) d[c] += s[c];
                 }
               })};
}

Var Tape::overlay_rows(Var base, std::vector<int> positions, Var rows) {
  Matrix out = val(base.id);
  const Matrix& r = val(rows.id);
  assert(static_cast<int>(positions.size()) == r.rows);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    auto s = r.row(static_cast<int>(k));
    auto d = out.row(positions[k]);
    std::copy(s.begin(), s.end(), d.begin());
  }
  return {push(std::move(out),
               [base, rows, positions = std::move(positions)](Tape& t,
                                                              int self) {
                 const Matrix& g = t.nodes_[self].grad;
                 Matrix masked = g;
                 Matrix& gr = t.grad(rows);
                 for (std::size_t k = 0; k < positions.size(); ++k) {
                   auto s = g.row(positions[k]);
                   auto d = gr.row(static_cast<int>(k));
                   for (int c = 0; c < g.cols; ++c) d[c] += s[c];
                   auto z = masked.row(positions[k]);
                   std::fill(z.begin(), z.end(), 0.0);
                 }
                 axpy(t.grad(base), masked, 1.0);
               })};
}

Var Tape::mean_rows(Var m, std::vector<std::vector<int>> groups) {
  const Matrix& src = val(m.id);
  Matrix out(static_cast<int>(groups.size()), src.cols);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    assert(!groups[k].empty());
    auto d = out.row(static_cast<int>(k));
    double inv = 1.0 / static_cast<double>(groups[k].size());
    for (int i : groups[k]) {
      auto s = src.row(i);
      for (int c = 0; c < src.cols; ++c) d[c] += s[c];
    }
    for (int c = 0; c < src.cols; ++c) d[c] *= inv;
  }
  return {push(std::move(out),
               [m, groups = std::move(groups)](Tape& t, int self) {
                 const Matrix& g = t.nodes_[self].grad;
                 Matrix& gm = t.grad(m);
                 for (std::size_t k = 0; k < groups.size(); ++k) {
                   double inv = 1.0 / static_cast<double>(groups[k].size());
                   auto s = g.row(static_cast<int>(k));
                   for (int i : groups[k]) {
                     auto d = gm.row(i);
                     for (int c = 0; c < g.cols; ++c) d[c] += inv * s[c];
                   }
                 }
               })};
}

Var Tape::lift_rows(Var poi_rows, const UserLift& lift,
                    std::vector<int> users) {
  Matrix out = poirec::lift_user_rows(val(poi_rows.id), lift, users);
  const UserLift* lp = &lift;
  return {push(std::move(out),
               [poi_rows, lp, users = std::move(users)](Tape& t, int self) {
                 const Matrix& g = t.nodes_[self].grad;
                 Matrix& gm = t.grad(poi_rows);
                 for (std::size_t k = 0; k < users.size(); ++k) {
                   int u = users[k];
                   auto s = g.row(static_cast<int>(k));
                   for (int j = lp->offsets[u]; j < lp->offsets[u + 1]; ++j) {
                     auto d = gm.row(lp->poi[j]);
                     double w = lp->weight[j];
                     for (int c = 0; c < g.cols; ++c) d[c] += w * s[c];
                   }
                 }
               })};
}

Var Tape::hg_aggregate(const Hypergraph& g, Var nodes) {
  Matrix out = poirec::hg_aggregate(g, val(nodes.id));
  const Hypergraph* gp = &g;
  return {push(std::move(out), [nodes, gp](Tape& t, int self) {
    const Matrix& go = t.nodes_[self].grad;
    Matrix& gn = t.grad(nodes);
    for (int e = 0; e < gp->edge_count(); ++e) {
      double inv = 1.0 / static_cast<double>(gp->edges[e].size());
      auto s = go.row(e);
      for (int n : gp->edges[e]) {
        auto d = gn.row(n);
        for (int c = 0; c < go.cols; ++c) d[c] += inv * s[c];
      }
    }
  })};
}

Var Tape::hg_propagate(const Hypergraph& g, Var messages, Var prev) {
  Matrix out = poirec::hg_propagate(g, val(messages.id), val(prev.id));
  const Hypergraph* gp = &g;
  return {push(std::move(out), [messages, prev, gp](Tape& t, int self) {
    const Matrix& go = t.nodes_[self].grad;
    Matrix& gm = t.grad(messages);
    Matrix& gv = t.grad(prev);
    for (int n = 0; n < gp->node_count; ++n) {
      int deg = gp->degree(n);
      auto s = go.row(n);
      if (deg == 0) {
        auto d = gv.row(n);
        for (int c = 0; c < go.cols; ++c) d[c] += s[c];
        continue;
      }
      double inv = 1.0 / static_cast<double>(deg);
      for (int k = gp->node_offsets[n]; k < gp->node_offsets[n + 1]; ++k) {
        auto d = gm.row(gp->node_edges[k]);
        for (int c = 0; c < go.cols; ++c) d[c] += inv * s[c];
      }
    }
  })};
}

Var Tape::dir_aggregate(const DirectedHypergraph& g, Var nodes) {
  Matrix out = poirec::dir_aggregate(g, val(nodes.id));
  const DirectedHypergraph* gp = &g;
  return {push(std::move(out), [nodes, gp](Tape& t, int self) {
    const Matrix& go = t.nodes_[self].grad;
    Matrix& gn = t.grad(nodes);
    for (int e = 0; e < gp->edge_count(); ++e) {
      double inv = 1.0 / static_cast<double>(gp->sources[e].size());
      auto s = go.row(e);
      for (int n : gp->sources[e]) {
        auto d = gn.row(n);
        for (int c = 0; c < go.cols; ++c) d[c] += inv * s[c];
      }
    }
  })};
}

Var Tape::dir_propagate(const DirectedHypergraph& g, Var messages, Var prev) {
  Matrix out = poirec::dir_propagate(g, val(messages.id), val(prev.id));
  const DirectedHypergraph* gp = &g;
  return {push(std::move(out), [messages, prev, gp](Tape& t, int self) {
    const Matrix& go = t.nodes_[self].grad;
    Matrix& gm = t.grad(messages);
    Matrix& gv = t.grad(prev);
    for (int n = 0; n < gp->node_count; ++n) {
      int deg = gp->in_degree(n);
      auto s = go.row(n);
      if (deg == 0) {
        auto d = gv.row(n);
        for (int c = 0; c < go.cols; ++c) d[c] += s[c];
        continue;
      }
      double inv = 1.0 / static_cast<double>(deg);
      for (int k = gp->in_offsets[n]; k < gp->in_offsets[n + 1]; ++k) {
        auto d = gm.row(gp->in_edges[k]);
        for (int c = 0; c < go.cols; ++c) d[c] += inv * s[c];
      }
    }
  })};
}

Var Tape::gate_scale(Var e, Var w) {
  const Matrix& ev = val(e.id);
  const Matrix& wv = val(w.id);
  assert(wv.rows == 1 && wv.cols == ev.cols);
  Matrix out(ev.rows, ev.cols);
  std::vector<double> sig(ev.rows);
  for (int r = 0; r < ev.rows; ++r) {
    double z = dot(ev.row(r), wv.row(0));
    sig[r] = 1.0 / (1.0 + std::exp(-z));
    auto s = ev.row(r);
    auto d = out.row(r);
    for (int c = 0; c < ev.cols; ++c) d[c] = sig[r] * s[c];
  }
  return {push(std::move(out), [e, w, sig = std::move(sig)](Tape& t,
                                                            int self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& ev = t.val(e.id);
    const Matrix& wv = t.val(w.id);
    Matrix& ge = t.grad(e);
    Matrix& gw = t.grad(w);
    for (int r = 0; r < ev.rows; ++r) {
      double s = sig[r];
      double ds = s * (1.0 - s);
      double ge_dot = dot(g.row(r), ev.row(r));
      auto gr = g.row(r);
      auto er = ev.row(r);
      auto wr = wv.row(0);
      auto ger = ge.row(r);
      auto gwr = gw.row(0);
      for (int c = 0; c < ev.cols; ++c) {
        ger[c] += s * gr[c] + ge_dot * ds * wr[c];
        gwr[c] += ge_dot * ds * er[c];
      }
    }
  })};
}

Var Tape::scores_nt(Var a, Var b) {
  const Matrix& av = val(a.id);
  const Matrix& bv = val(b.id);
  assert(av.cols == bv.cols);
  Matrix out(av.rows, bv.rows);
  for (int i = 0; i < av.rows; ++i)
    for (int j = 0; j < bv.rows; ++j) out(i, j) = dot(av.row(i), bv.row(j));
  return {push(std::move(out), [a, b](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& av = t.val(a.id);
    const Matrix& bv = t.val(b.id);
    Matrix& ga = t.grad(a);
    Matrix& gb = t.grad(b);
    for (int i = 0; i < av.rows; ++i) {
      auto gi = g.row(i);
      auto gai = ga.row(i);
      auto ai = av.row(i);
      for (int j = 0; j < bv.rows; ++j) {
        double gij = gi[j];
        if (gij == 0.0) continue;
        auto bj = bv.row(j);
        auto gbj = gb.row(j);
        for (int c = 0; c < av.cols; ++c) {
          gai[c] += gij * bj[c];
          gbj[c] += gij * ai[c];
        }
      }
    }
  })};
}

Var Tape::softmax_ce(Var scores, std::vector<int> targets) {
  const Matrix& sv = val(scores.id);
  assert(static_cast<int>(targets.size()) == sv.rows);
  std::vector<double> lse(sv.rows);
  double loss = 0.0;
  for (int r = 0; r < sv.rows; ++r) {
    auto row = sv.row(r);
    double m = row[0];
    for (double v : row) {
      if (!std::isfinite(v)) throw DataError("non-finite score in rec loss");
      m = std::max(m, v);
    }
    double s = 0.0;
    for (double v : row) s += std::exp(v - m);
    lse[r] = m + std::log(s);
    loss += lse[r] - row[targets[r]];
  }
  loss /= sv.rows;
  Matrix out(1, 1);
  out.data[0] = loss;
  return {push(std::move(out),
               [scores, targets = std::move(targets),
                lse = std::move(lse)](Tape& t, int self) {
                 double g = t.nodes_[self].grad.data[0];
                 const Matrix& sv = t.val(scores.id);
                 Matrix& gs = t.grad(scores);
                 double inv = g / sv.rows;
                 for (int r = 0; r < sv.rows; ++r) {
                   auto row = sv.row(r);
                   auto grow = gs.row(r);
                   for (int c = 0; c < sv.cols; ++c)
                     grow[c] += inv * std::exp(row[c] - lse[r]);
                   grow[targets[r]] -= inv;
                 }
               })};
}

Var Tape::info_nce(Var a, Var b, double tau) {
  const Matrix& av = val(a.id);
  const Matrix& bv = val(b.id);
  assert(av.same_shape(bv));
  int n = av.rows;
  int d = av.cols;

  // Normalized rows; zero-norm rows are masked (cosine defined as 0).
  Matrix an(n, d), bn(n, d);
  std::vector<double> na(n), nb(n);
  std::vector<bool> act_a(n), act_b(n);
  for (int i = 0; i < n; ++i) {
    na[i] = l2_norm(av.row(i));
    act_a[i] = na[i] > kNormFloor;
    if (act_a[i]) {
      auto s = av.row(i);
      auto o = an.row(i);
      for (int c = 0; c < d; ++c) o[c] = s[c] / na[i];
    }
    nb[i] = l2_norm(bv.row(i));
    act_b[i] = nb[i] > kNormFloor;
    if (act_b[i]) {
      auto s = bv.row(i);
      auto o = bn.row(i);
      for (int c = 0; c < d; ++c) o[c] = s[c] / nb[i];
    }
  }
  Matrix sim(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sim(i, j) = (act_a[i] && act_b[j]) ? dot(an.row(i), bn.row(j)) : 0.0;

  double loss = 0.0;
  std::vector<double> lse(n);
  for (int i = 0; i < n; ++i) {
    auto row = sim.row(i);
    double m = row[0];
    for (double v : row) m = std::max(m, v);
    double s = 0.0;
    for (double v : row) s += std::exp((v - m) / tau);
    lse[i] = m / tau + std::log(s);
    loss += lse[i] - sim(i, i) / tau;
  }
  loss /= n;
  Matrix out(1, 1);
  out.data[0] = loss;

  struct Cache {
    Matrix an, bn, sim;
    std::vector<double> na, nb, lse;
    std::vector<bool> act_a, act_b;
  };
  auto cache = std::make_shared<Cache>(
      Cache{std::move(an), std::move(bn), std::move(sim), std::move(na),
            std::move(nb), std::move(lse), std::move(act_a), std::move(act_b)});

  return {push(std::move(out), [a, b, tau, cache](Tape& t, int self) {
    double g = t.nodes_[self].grad.data[0];
    int n = cache->sim.rows;
    int d = cache->an.cols;
    // dL/dsim(i,j) = (softmax_ij - delta_ij) * g / (n * tau)
    Matrix gan(n, d), gbn(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!cache->act_a[i] || !cache->act_b[j]) continue;
        double p = std::exp(cache->sim(i, j) / tau - cache->lse[i]);
        double gs = (p - (i == j ? 1.0 : 0.0)) * g / (n * tau);
        if (gs == 0.0) continue;
        auto ai = cache->an.row(i);
        auto bj = cache->bn.row(j);
        auto gi = gan.row(i);
        auto gj = gbn.row(j);
        for (int c = 0; c < d; ++c) {
          gi[c] += gs * bj[c];
          gj[c] += gs * ai[c];
        }
      }
    }
    // back through row normalization: dx = (g - (g.y)y)/|x|
    Matrix& ga = t.grad(a);
    Matrix& gb = t.grad(b);
    for (int i = 0; i < n; ++i) {
      if (cache->act_a[i]) {
        auto y = cache->an.row(i);
        auto gy = gan.row(i);
        double proj = dot(gy, y);
        auto dst = ga.row(i);
        for (int c = 0; c < d; ++c)
          dst[c] += (gy[c] - proj * y[c]) / cache->na[i];
      }
      if (cache->act_b[i]) {
        auto y = cache->bn.row(i);
        auto gy = gbn.row(i);
        double proj = dot(gy, y);
        auto dst = gb.row(i);
        for (int c = 0; c < d; ++c)
          dst[c] += (gy[c] - proj * y[c]) / cache->nb[i];
      }
    }
  })};
}

Var Tape::weighted_sum(Var a, Matrix weights) {
  const Matrix& av = val(a.id);
  assert(av.same_shape(weights));
  Matrix out(1, 1);
  for (std::size_t i = 0; i < av.data.size(); ++i)
    out.data[0] += av.data[i] * weights.data[i];
  return {push(std::move(out),
               [a, weights = std::move(weights)](Tape& t, int self) {
                 double g = t.nodes_[self].grad.data[0];
                 axpy(t.grad(a), weights, g);
               })};
}

Var residual_stack(Tape& t, const Hypergraph& g, Var init, int layers) {
  auto coeffs = residual_coeffs(layers);
  Var acc = t.scale(init, coeffs[0]);
  Var current = init;
  for (int l = 1; l <= layers; ++l) {
    Var messages = t.hg_aggregate(g, current);
    current = t.hg_propagate(g, messages, current);
    acc = t.add_scaled(acc, current, coeffs[l]);
  }
  return acc;
}

Var directed_conv(Tape& t, const DirectedHypergraph& g, Var init, int layers) {
  auto coeffs = residual_coeffs(layers);
  Var acc = t.scale(init, coeffs[0]);
  Var current = init;
  for (int l = 1; l <= layers; ++l) {
    Var messages = t.dir_aggregate(g, current);
    current = t.dir_propagate(g, messages, current);
    acc = t.add_scaled(acc, current, coeffs[l]);
  }
  return acc;
}

}  // namespace poirec::ad
