#pragma once

#include <functional>
#include <vector>

#include "poirec/fusion.hpp"
#include "poirec/hypergraph.hpp"
#include "poirec/matrix.hpp"

namespace poirec::ad {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode tape over dense matrices. Each op records a closure that
// pulls the output gradient and accumulates into its parents. Built per
// training batch and discarded afterwards.
class Tape {
 public:
  Var leaf(Matrix value);
  // Non-owning leaf over a trainable tensor; the caller keeps it alive
  // for the tape's lifetime.
  Var param(const Matrix* value);

  const Matrix& value(Var v) const;
  // Gradient buffer, zero-initialized on first touch.
  Matrix& grad(Var v);
  Matrix grad_or_zero(Var v) const;
  double scalar(Var v) const;

  // Seeds d(root)/d(root) = 1 and sweeps the tape in reverse. `root`
  // must be 1x1.
  void backward(Var root);

  Var add(Var a, Var b);
  Var scale(Var a, double k);
  Var add_scaled(Var a, Var b, double k);  // a + k*b
  Var gather_rows(Var m, std::vector<int> idx);
  // Copy of `base` with base_row[positions[r]] replaced by rows[r];
  // positions must be distinct.
  Var overlay_rows(Var base, std::vector<int> positions, Var rows);
  // out[k] = mean of m rows listed in groups[k] (with multiplicity).
  Var mean_rows(Var m, std::vector<std::vector<int>> groups);
  Var lift_rows(Var poi_rows, const UserLift& lift, std::vector<int> users);

  Var hg_aggregate(const Hypergraph& g, Var nodes);
  Var hg_propagate(const Hypergraph& g, Var messages, Var prev);
  Var dir_aggregate(const DirectedHypergraph& g, Var nodes);
  Var dir_propagate(const DirectedHypergraph& g, Var messages, Var prev);

  Var gate_scale(Var e, Var w);
  Var scores_nt(Var a, Var b);  // a * b^T
  Var softmax_ce(Var scores, std::vector<int> targets);
  Var info_nce(Var a, Var b, double tau);
  Var weighted_sum(Var a, Matrix weights);  // sum_ij a_ij * w_ij, 1x1

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    const Matrix* view = nullptr;
    Matrix grad;
    bool grad_set = false;
    std::function<void(Tape&, int)> backprop;
  };
  std::vector<Node> nodes_;

  const Matrix& val(int id) const {
    const Node& n = nodes_[id];
    return n.view ? *n.view : n.owned;
  }
  int push(Matrix value, std::function<void(Tape&, int)> fn);
};

// Residual conv stacks expressed as tape ops (match the plain versions
// in conv.hpp exactly).
Var residual_stack(Tape& t, const Hypergraph& g, Var init, int layers);
Var directed_conv(Tape& t, const DirectedHypergraph& g, Var init, int layers);

}  // namespace poirec::ad
