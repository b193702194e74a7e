#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "willmin/quadrature.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using willmin::QuadNode;
using willmin::QuadRule;

namespace {

// integral of v^p w^q over the unit triangle is p! q! / (p+q+2)!.
double monomial_integral(int p, int q) {
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  return fact(p) * fact(q) / fact(p + q + 2);
}

}  // namespace

TEST_CASE("seven point composite rule measures the unit triangle") {
  for (int n : {1, 2, 4, 8}) {
    const std::vector<QuadNode> nodes = willmin::composite_rule(n);
    REQUIRE(nodes.size() == static_cast<std::size_t>(7 * n * n));
    double total = 0.0;
    for (const QuadNode& q : nodes) {
      CHECK(q.v > 0.0);
      CHECK(q.w > 0.0);
      CHECK(q.v + q.w < 1.0);
      CHECK(q.weight > 0.0);
      total += q.weight;
    }
    CHECK_THAT(total, WithinAbs(0.5, 1e-14));
  }
  for (int bad : {0, -2, 3, 6, 12})
    CHECK_THROWS_AS(willmin::composite_rule(bad), willmin::Error);
}

TEST_CASE("composite rule integrates degree five monomials exactly") {
  for (int n : {1, 2}) {
    const std::vector<QuadNode> nodes = willmin::composite_rule(n);
    for (int p = 0; p <= 5; ++p) {
      for (int q = 0; p + q <= 5; ++q) {
        double sum = 0.0;
        for (const QuadNode& node : nodes)
          sum += node.weight * std::pow(node.v, p) * std::pow(node.w, q);
        INFO("n=" << n << " p=" << p << " q=" << q);
        CHECK_THAT(sum, WithinAbs(monomial_integral(p, q), 1e-14));
      }
    }
  }
  // Degree 6 must not be exact with one cell; this pins the rule's order.
  double sum = 0.0;
  for (const QuadNode& node : willmin::composite_rule(1))
    sum += node.weight * std::pow(node.v, 6);
  CHECK(std::abs(sum - monomial_integral(6, 0)) > 1e-9);
}

TEST_CASE("make_quadrature validates its arguments") {
  CHECK_THROWS_MATCHES(willmin::make_quadrature(3, 4), willmin::Error,
                       MessageMatches(ContainsSubstring("dyadic")));
  CHECK_THROWS_AS(willmin::make_quadrature(0, 4), willmin::Error);
  CHECK_THROWS_AS(willmin::make_quadrature(8, 0), willmin::Error);
  try {
    willmin::make_quadrature(5, 4);
    FAIL("expected a throw");
  } catch (const willmin::Error& e) {
    CHECK(e.kind() == willmin::Error::Kind::Input);
  }
  CHECK(willmin::make_quadrature(16, 2).regular.size() == 7u * 256u);
}

TEST_CASE("ring layout tiles the punctured triangle") {
  for (int D : {1, 4, 16}) {
    const QuadRule rule = willmin::make_quadrature(2, D);
    double total = 0.0;
    for (const willmin::RingQuadNode& node : rule.rings) {
      total += node.weight;
      double v = 0.0, w = 0.0;
      willmin::ring_node_param(node, v, w);
      CHECK(v > 0.0);
      CHECK(w > 0.0);
      CHECK(v + w < 1.0);
      const double lo = std::exp2(static_cast<double>(-node.depth));
      CHECK(v + w > lo);
      CHECK(v + w < 2.0 * lo);
    }
    const double expected = 0.5 * (1.0 - std::exp2(static_cast<double>(-2 * D)));
    CHECK_THAT(total, WithinRel(expected, 1e-14));
  }
  // Ring 1 refines with n, deeper rings stay at a fixed grid of 2.
  const QuadRule rule = willmin::make_quadrature(8, 3);
  std::size_t ring1 = 0, deeper = 0;
  for (const willmin::RingQuadNode& node : rule.rings)
    (node.depth == 1 ? ring1 : deeper) += 1;
  CHECK(ring1 == 3u * 7u * 64u);
  CHECK(deeper == 2u * 3u * 7u * 4u);
}

TEST_CASE("ring layout reproduces the quintic oracle") {
  // v^2 w^3 is degree 5, so every ring cell integrates it exactly and only
  // the neglected 4^-D corner is missing, far below roundoff at D = 16.
  const QuadRule rule = willmin::make_quadrature(2, 16);
  double sum = 0.0;
  for (const willmin::RingQuadNode& node : rule.rings) {
    double v = 0.0, w = 0.0;
    willmin::ring_node_param(node, v, w);
    sum += node.weight * v * v * w * w * w;
  }
  CHECK_THAT(sum, WithinAbs(1.0 / 420.0, 1e-14));
}
