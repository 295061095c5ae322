#include <doctest.h>

#include <algorithm>
#include <random>

#include "qbound/bcjr.hpp"
#include "qbound/coupled.hpp"
#include "qbound/error.hpp"
#include "support.hpp"

using namespace qbound;

namespace {

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// ||pi P - pi||_inf with P from the test-side chain.
double residual(const std::vector<std::vector<double>>& P, const std::vector<double>& pi) {
  double r = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) v += pi[i] * P[i][j];
    r = std::max(r, std::abs(v - pi[j]));
  }
  return r;
}

}  // namespace

TEST_SUITE("coupled") {
  TEST_CASE("coupled edges carry positive channel probability") {
    const auto ch = builtin_dec(0.3);
    const auto qg = builtin_dec3();
    const auto cg = build_coupled(ch, qg);
    CHECK(cg.size() == 6);
    std::size_t positive = 0;
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 4; ++y) positive += ch.prob(y, x, s) > 0.0;
    CHECK(cg.edges.size() == positive * qg.nq());
    for (const auto& e : cg.edges) {
      const std::size_t s = cg.state_of(e.from), q = cg.context_of(e.from);
      CHECK(e.w > 0.0);
      CHECK(e.w == ch.prob(e.y, e.x, s));
      CHECK(e.to == cg.node(ch.next(e.x, e.y, s), qg.next(q, e.y)));
    }
    CHECK_THROWS_AS(build_coupled(ch, builtin_bec2()), Error);
  }

  TEST_CASE("DEC coupled graph: one closed class without (s1,q1) and (s0,q2)") {
    const auto cg = build_coupled(builtin_dec(0.5), builtin_dec3());
    const auto classes = closed_classes(cg);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0] == std::vector<std::size_t>{0, 3, 4, 5});
    CHECK(period(cg, classes[0]) == 1);
  }

  TEST_CASE("BEC two-node graph: one closed class without (s0,q2)") {
    const auto cg = build_coupled(builtin_bec_no11(0.4), builtin_bec2());
    const auto classes = closed_classes(cg);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0] == std::vector<std::size_t>{0, 1, 3});
  }

  TEST_CASE("closed classes of random coupled graphs match the closure oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      auto ch = testsupport::random_channel(rng, 2, 2 + trial % 2, 1 + trial % 3, 0.5);
      auto qg = testsupport::random_qgraph(rng, 1 + trial % 4, ch.ny());
      auto cg = build_coupled(ch, qg);
      CHECK(closed_classes(cg) == testsupport::closed_classes_bruteforce(cg.adjacency()));
    }
  }

  TEST_CASE("closed classes cover all states and contexts when every output is possible from every state") {
    std::mt19937_64 rng(22);
    int tested = 0;
    while (tested < 200) {
      auto ch = testsupport::random_channel(rng, 2, 2, 2 + tested % 3, 0.4);
      auto qg = testsupport::random_qgraph(rng, 1 + tested % 5, 2);
      if (!is_strongly_connected(ch) || !is_irreducible(qg) || !testsupport::full_output_support(ch)) continue;
      ++tested;
      CHECK(lemma1_check(build_coupled(ch, qg)));
    }
  }

  TEST_CASE("closed classes always cover all states") {
    std::mt19937_64 rng(25);
    int tested = 0;
    while (tested < 500) {
      auto ch = testsupport::random_channel(rng, 2, 2, 2 + tested % 3, 0.5);
      auto qg = testsupport::random_qgraph(rng, 1 + tested % 5, 2);
      if (!is_strongly_connected(ch) || !is_irreducible(qg)) continue;
      ++tested;
      const auto cg = build_coupled(ch, qg);
      const auto classes = closed_classes(cg);
      CHECK_FALSE(classes.empty());
      for (const auto& c : classes) {
        std::vector<bool> seen(ch.ns(), false);
        for (std::size_t v : c) seen[cg.state_of(v)] = true;
        CHECK(std::count(seen.begin(), seen.end(), false) == 0);
      }
    }
  }

  TEST_CASE("a closed class can miss a context when an output is impossible in some state") {
    // y=1 only from s=2, and it always lands in s=0, which only emits y=0; context 1
    // is entered from context 1 or 2 on y=1 twice in a row, which never happens.
    std::vector<double> kernel(2 * 2 * 3, 0.0);
    auto W = [&](std::size_t y, std::size_t x, std::size_t s) -> double& { return kernel[(y * 2 + x) * 3 + s]; };
    W(0, 0, 0) = W(0, 1, 0) = 1.0;
    W(0, 0, 1) = 1.0;
    W(0, 1, 1) = 0.59;
    W(1, 1, 1) = 0.41;
    W(0, 0, 2) = 0.55;
    W(1, 0, 2) = 0.45;
    W(0, 1, 2) = 1.0;
    std::vector<std::size_t> next(2 * 2 * 3, 0);
    auto f = [&](std::size_t x, std::size_t y, std::size_t s) -> std::size_t& { return next[(x * 2 + y) * 3 + s]; };
    f(0, 0, 0) = 2; f(0, 0, 1) = 0; f(0, 0, 2) = 1;
    f(1, 0, 0) = 2; f(1, 0, 1) = 1; f(1, 0, 2) = 0;
    f(0, 1, 0) = 0; f(0, 1, 1) = 2; f(0, 1, 2) = 0;
    f(1, 1, 0) = 0; f(1, 1, 1) = 0; f(1, 1, 2) = 1;
    UnifilarChannel ch(2, 2, 3, kernel, next);
    REQUIRE(validate(ch).ok());
    REQUIRE(is_strongly_connected(ch));
    QGraph qg(3, 2, {0, 2, 1, 2, 0, 1});
    REQUIRE(is_irreducible(qg));
    const auto cg = build_coupled(ch, qg);
    const auto classes = closed_classes(cg);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0] == std::vector<std::size_t>{0, 1, 2, 6});
    CHECK_FALSE(lemma1_check(cg));
  }

  TEST_CASE("pruning removes zero-probability inputs only") {
    const auto ch = builtin_dec(0.5);
    const auto qg = builtin_dec3();
    auto u = dec3_policy(1.0, 0.3);
    const auto cg = build_coupled(ch, qg);
    const auto pr = prune(cg, u);
    for (const auto& e : pr.edges) CHECK(u(e.x, cg.state_of(e.from), cg.context_of(e.from)) > kPruneTol);
    std::size_t dropped = 0;
    for (const auto& e : cg.edges) dropped += u(e.x, cg.state_of(e.from), cg.context_of(e.from)) <= kPruneTol;
    CHECK(pr.edges.size() + dropped == cg.edges.size());
    CHECK(dropped > 0);
  }

  TEST_CASE("policies with several closed classes are rejected") {
    // trapdoor with p=0 never changes state: deterministic x=s keeps both states closed
    const auto ch = builtin_trapdoor(0.0);
    const auto qg = builtin_single(2);
    InputPolicy u(2, 2, 1);
    u(0, 0, 0) = 1.0;
    u(1, 1, 0) = 1.0;
    CHECK_FALSE(in_P_pi(ch, qg, u));
    CHECK_THROWS_AS(stationary(ch, qg, u), Error);
    try {
      stationary(ch, qg, u);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::not_in_p_pi);
    }
    StationaryOptions so;
    so.anchor = 1;
    const auto st = stationary(ch, qg, u, so);
    CHECK(st.pi[1] == doctest::Approx(1.0));
    CHECK(st.pi[0] == 0.0);
  }

  TEST_CASE("stationary agrees with power iteration on random pairs") {
    std::mt19937_64 rng(23);
    int solved = 0;
    for (int trial = 0; trial < 150; ++trial) {
      auto ch = testsupport::random_channel(rng, 2 + trial % 2, 2 + trial % 3, 1 + trial % 3, 0.3);
      auto qg = testsupport::random_qgraph(rng, 1 + trial % 4, ch.ny());
      auto u = testsupport::random_policy(rng, ch, qg.nq());
      if (!in_P_pi(ch, qg, u)) continue;
      const auto st = stationary(ch, qg, u);
      const auto P = testsupport::chain(ch, qg, u);
      std::vector<double> start(P.size(), 1.0 / static_cast<double>(P.size()));
      const auto ref = testsupport::power_stationary(P, start);
      CHECK(max_gap(st.pi, ref) < 1e-9);
      CHECK(st.residual <= 1e-10);
      CHECK(residual(P, st.pi) <= 1e-10);
      double sum = 0.0;
      for (double v : st.pi) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      ++solved;
    }
    CHECK(solved > 50);
  }

  TEST_CASE("transfer matrix rows are stochastic and match the chain") {
    std::mt19937_64 rng(24);
    auto ch = testsupport::random_channel(rng, 3, 3, 2);
    auto qg = testsupport::random_qgraph(rng, 3, 3);
    auto u = testsupport::random_policy(rng, ch, 3);
    const auto T = transfer_matrix(ch, qg, u);
    const auto P = testsupport::chain(ch, qg, u);
    const std::size_t n = P.size();
    REQUIRE(T.size() == n * n);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(T[i * n + j] == doctest::Approx(P[i][j]).epsilon(1e-14));
        row += T[i * n + j];
      }
      CHECK(row == doctest::Approx(1.0));
    }
  }

  TEST_CASE("closed-form stationary vectors") {
    const std::vector<double> grid{0.25, 0.5, 0.75};
    for (double eps : grid)
      for (double p : grid) {
        // two-node BEC graph; nodes (s,q) at q*2+s
        {
          const auto st = stationary(builtin_bec_no11(eps), builtin_bec2(), bec2_policy(p));
          const std::vector<double> want{1 / (1 + p), eps * p / (1 + p), 0.0, (1 - eps) * p / (1 + p)};
          CHECK(max_gap(st.pi, want) <= 1e-10);
        }
        // three-node BEC graph, p in [0, 1/2]
        if (p <= 0.5) {
          const auto ch = builtin_bec_no11(eps);
          const auto st = stationary(ch, builtin_bec3(), bec3_lower_policy(ch, p));
          const double eb = 1 - eps, d = 1 + eb * p;
          const std::vector<double> want{0.0, eb * p / d, eb / d, 0.0, eps * (1 - p) / d, eps * p / d};
          CHECK(max_gap(st.pi, want) <= 1e-10);
        }
        for (double a : grid) {
          const auto st = stationary(builtin_dec(eps), builtin_dec3(), dec3_policy(a, p));
          const double d = 2 * eps + 2 * (1 - eps) * p;
          const std::vector<double> want{(1 - eps) * p / d, 0.0, 0.0, (1 - eps) * p / d, eps / d, eps / d};
          CHECK(max_gap(st.pi, want) <= 1e-10);
        }
      }
  }

  TEST_CASE("period and cyclic partition of a periodic coupled graph") {
    // memoryless-in-state toggle: s' = 1 - s regardless, single context
    UnifilarChannel ch(1, 1, 2, {1.0, 1.0}, {1, 0}, {}, "toggle");
    const auto cg = build_coupled(ch, builtin_single(1));
    const auto cls = closed_classes(cg);
    REQUIRE(cls.size() == 1);
    CHECK(period(cg, cls[0]) == 2);
    auto parts = cyclic_partition(cg, cls[0]);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == std::vector<std::size_t>{0});
    CHECK(parts[1] == std::vector<std::size_t>{1});
    // the stationary vector still exists for a periodic class
    const auto st = stationary(ch, builtin_single(1), InputPolicy::uniform(ch, 1));
    CHECK(st.pi[0] == doctest::Approx(0.5));
  }

  TEST_CASE("select_class prefers the anchor") {
    const auto ch = builtin_trapdoor(0.0);
    const auto cg = build_coupled(ch, builtin_single(2));
    // with p=0 the unpruned graph already has the two self-contained states
    CHECK(closed_classes(cg).size() == 2);
    CHECK(select_class(cg, 1) == std::vector<std::size_t>{1});
    CHECK(select_class(cg, std::nullopt) == std::vector<std::size_t>{0});
  }
}
