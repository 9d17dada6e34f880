#include <doctest.h>

#include <random>

#include "poirec/autodiff.hpp"
#include "poirec/conv.hpp"
#include "testutil.hpp"

using namespace poirec;

TEST_CASE("aggregate basics") {
  Hypergraph g;
  g.node_count = 2;
  g.edges = {{0, 1}};
  g.finalize();
  Matrix nodes(2, 2);
  nodes(0, 0) = 1;
  nodes(0, 1) = 2;
  nodes(1, 0) = 3;
  nodes(1, 1) = 4;
  Matrix m = hg_aggregate(g, nodes);
  CHECK(m(0, 0) == 2.0);
  CHECK(m(0, 1) == 3.0);

  Hypergraph s;
  s.node_count = 1;
  s.edges = {{0}};
  s.finalize();
  Matrix one(1, 2);
  one(0, 0) = 7;
  one(0, 1) = -1;
  Matrix ms = hg_aggregate(s, one);
  CHECK(ms(0, 0) == 7.0);
  CHECK(ms(0, 1) == -1.0);
}

TEST_CASE("aggregate matches the dense incidence oracle") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    Hypergraph g = testutil::random_hypergraph(20, 8, rng);
    Matrix nodes = uniform_matrix(g.node_count, 4, -1, 1, rng);
    Matrix got = hg_aggregate(g, nodes);
    // dense: D_e^-1 H^T V
    for (int e = 0; e < g.edge_count(); ++e)
      for (int c = 0; c < 4; ++c) {
        double sum = 0;
        for (int n = 0; n < g.node_count; ++n) {
          bool member = std::find(g.edges[e].begin(), g.edges[e].end(), n) !=
                        g.edges[e].end();
          if (member) sum += nodes(n, c);
        }
        CHECK(got(e, c) ==
              doctest::Approx(sum / g.edges[e].size()).epsilon(1e-12));
      }
  }
}

TEST_CASE("propagate basics") {
  Hypergraph g;
  g.node_count = 3;
  g.edges = {{0, 1}, {1}};
  g.finalize();
  Matrix prev(3, 1);
  prev(2, 0) = 9.0;
  Matrix msg(2, 1);
  msg(0, 0) = 4.0;
  msg(1, 0) = -4.0;
  Matrix out = hg_propagate(g, msg, prev);
  CHECK(out(0, 0) == 4.0);               // single incident edge
  CHECK(out(1, 0) == 0.0);               // mean of 4 and -4
  CHECK(out(2, 0) == 9.0);               // isolated: carries prev
}

TEST_CASE("residual stack closed forms") {
  SUBCASE("L=1 formula") {
    std::mt19937_64 rng(67);
    Hypergraph g = testutil::random_hypergraph(10, 5, rng);
    Matrix init = uniform_matrix(g.node_count, 3, -1, 1, rng);
    Matrix v1 = hg_propagate(g, hg_aggregate(g, init), init);
    Matrix want(init.rows, init.cols);
    for (std::size_t i = 0; i < want.data.size(); ++i)
      want.data[i] = (2.0 * init.data[i] + v1.data[i]) / 2.0;
    Matrix got = residual_stack(g, init, 1);
    CHECK(max_abs_diff(got, want) < 1e-12);
  }
  SUBCASE("singleton self-edges are a fixed point scaled by (2L+1)/(L+1)") {
    Hypergraph g;
    g.node_count = 4;
    for (int n = 0; n < 4; ++n) g.edges.push_back({n});
    g.finalize();
    std::mt19937_64 rng(71);
    Matrix init = uniform_matrix(4, 3, -1, 1, rng);
    for (int L = 1; L <= 3; ++L) {
      Matrix got = residual_stack(g, init, L);
      double scale = (2.0 * L + 1) / (L + 1);
      for (std::size_t i = 0; i < init.data.size(); ++i)
        CHECK(got.data[i] == doctest::Approx(scale * init.data[i]));
    }
  }
}

TEST_CASE("residual stack matches the explicit-loop oracle") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    Hypergraph g = testutil::random_hypergraph(30, 15, rng);
    int L = 1 + static_cast<int>(rng() % 3);
    Matrix init = uniform_matrix(g.node_count, 8, -1, 1, rng);
    Matrix got = residual_stack(g, init, L);
    Matrix want = testutil::oracle_residual_stack(g, init, L);
    CHECK(max_abs_diff(got, want) < 1e-9);
  }
}

TEST_CASE("directed conv basics") {
  SUBCASE("single edge moves source to target, source carries forward") {
    DirectedHypergraph g;
    g.node_count = 2;
    g.sources = {{0}};
    g.targets = {{1}};
    g.finalize();
    Matrix init(2, 1);
    init(0, 0) = 5.0;
    init(1, 0) = 1.0;
    Matrix msg = dir_aggregate(g, init);
    CHECK(msg(0, 0) == 5.0);
    Matrix out = dir_propagate(g, msg, init);
    CHECK(out(0, 0) == 5.0);  // no incoming edge
    CHECK(out(1, 0) == 5.0);  // received the source value
  }
  SUBCASE("two-cycle swaps pre-residual values") {
    DirectedHypergraph g;
    g.node_count = 2;
    g.sources = {{0}, {1}};
    g.targets = {{1}, {0}};
    g.finalize();
    Matrix init(2, 1);
    init(0, 0) = 2.0;
    init(1, 0) = -3.0;
    Matrix out = dir_propagate(g, dir_aggregate(g, init), init);
    CHECK(out(0, 0) == -3.0);
    CHECK(out(1, 0) == 2.0);
  }
}

TEST_CASE("directed conv matches the explicit-loop oracle") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 30; ++trial) {
    DirectedHypergraph g = testutil::random_directed(30, 15, rng);
    int L = 1 + static_cast<int>(rng() % 3);
    Matrix init = uniform_matrix(g.node_count, 8, -1, 1, rng);
    Matrix got = directed_conv(g, init, L);
    Matrix want = testutil::oracle_directed_conv(g, init, L);
    CHECK(max_abs_diff(got, want) < 1e-9);
  }
}

TEST_CASE("permutation equivariance") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    Hypergraph g = testutil::random_hypergraph(15, 8, rng);
    Matrix init = uniform_matrix(g.node_count, 4, -1, 1, rng);
    std::vector<int> perm(g.node_count);
    for (int i = 0; i < g.node_count; ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng() % i]);

    Hypergraph pg;
    pg.node_count = g.node_count;
    for (const auto& e : g.edges) {
      std::vector<int> pe;
      for (int n : e) pe.push_back(perm[n]);
      pg.edges.push_back(pe);
    }
    pg.finalize();
    Matrix pinit(init.rows, init.cols);
    for (int n = 0; n < init.rows; ++n)
      for (int c = 0; c < init.cols; ++c) pinit(perm[n], c) = init(n, c);

    Matrix out = residual_stack(g, init, 2);
    Matrix pout = residual_stack(pg, pinit, 2);
    for (int n = 0; n < init.rows; ++n)
      for (int c = 0; c < init.cols; ++c)
        CHECK(pout(perm[n], c) == doctest::Approx(out(n, c)).epsilon(1e-12));
  }
}

TEST_CASE("mean-pooling keeps outputs inside the scaled init hull") {
  // Each layer is a per-coordinate convex combination of the previous
  // one, and the residual coefficients sum to (2L+1)/(L+1).
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 20; ++trial) {
    Hypergraph g = testutil::random_hypergraph(20, 12, rng);
    int L = 1 + static_cast<int>(rng() % 3);
    Matrix init = uniform_matrix(g.node_count, 3, -2, 2, rng);
    Matrix out = residual_stack(g, init, L);
    double scale = (2.0 * L + 1) / (L + 1);
    for (int c = 0; c < init.cols; ++c) {
      double lo = init(0, c), hi = init(0, c);
      for (int n = 0; n < init.rows; ++n) {
        lo = std::min(lo, init(n, c));
        hi = std::max(hi, init(n, c));
      }
      for (int n = 0; n < init.rows; ++n) {
        CHECK(out(n, c) >= scale * lo - 1e-9);
        CHECK(out(n, c) <= scale * hi + 1e-9);
      }
    }
  }
}

TEST_CASE("conv gradient matches central finite differences") {
  std::mt19937_64 rng(97);
  Hypergraph g = testutil::random_hypergraph(10, 6, rng);
  Matrix init = uniform_matrix(g.node_count, 4, -1, 1, rng);
  Matrix weights = uniform_matrix(g.node_count, 4, -1, 1, rng);

  ad::Tape tape;
  ad::Var leaf = tape.leaf(init);
  ad::Var out = ad::residual_stack(tape, g, leaf, 3);
  ad::Var loss = tape.weighted_sum(out, weights);
  tape.backward(loss);
  Matrix grad = tape.grad_or_zero(leaf);

  double h = 1e-4;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < init.data.size(); ++i) {
    Matrix plus = init, minus = init;
    plus.data[i] += h;
    minus.data[i] -= h;
    double fp = 0, fm = 0;
    Matrix op = residual_stack(g, plus, 3);
    Matrix om = residual_stack(g, minus, 3);
    for (std::size_t k = 0; k < op.data.size(); ++k) {
      fp += op.data[k] * weights.data[k];
      fm += om.data[k] * weights.data[k];
    }
    double fd = (fp - fm) / (2 * h);
    double denom = std::max({std::fabs(fd), std::fabs(grad.data[i]), 1e-6});
    max_rel = std::max(max_rel, std::fabs(fd - grad.data[i]) / denom);
  }
  CHECK(max_rel < 1e-3);
}
