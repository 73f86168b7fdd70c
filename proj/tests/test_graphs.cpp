#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kmcl/graphon.hpp"
#include "kmcl/numerics.hpp"
#include "kmcl/rng.hpp"
#include "kmcl/weight_matrix.hpp"

using namespace kmcl;

namespace {

Graphon product_graphon() {
  return Graphon::callable([](double x, double y) { return x * y; }, "xy",
                           /*symmetric_hint=*/true);
}

}  // namespace

TEST_CASE("graphon_average: uniform kernel is exact") {
  const auto w = Graphon::uniform(0.5);
  CHECK(graphon_average(w, 7, 3, 6) == 0.5);
  CHECK(graphon_average(w, 2, 0, 0) == 0.5);
}

TEST_CASE("graphon_average: W(x,y)=xy against the symbolic integral") {
  // 4 * (int_0^1/2 x dx)^2 = 4 (1/8)^2 = 1/16 and 4 (3/8)^2 = 9/16.
  const auto w = product_graphon();
  CHECK(graphon_average(w, 2, 0, 0) == doctest::Approx(1.0 / 16).epsilon(1e-13));
  CHECK(graphon_average(w, 2, 1, 1) == doctest::Approx(9.0 / 16).epsilon(1e-13));
  CHECK(graphon_average(w, 2, 0, 1) == doctest::Approx(3.0 / 16).epsilon(1e-13));
}

TEST_CASE("graphon_average: affine integrands are exact under midpoint rule") {
  const auto w = Graphon::callable(
      [](double x, double y) { return 0.25 + 0.5 * x + 0.125 * y; }, "affine");
  // n^2 * int over I_2 x I_0 for n = 4: evaluate symbolically.
  const double x_mean = (2.0 + 0.5) / 4.0;  // midpoint of I_2^4
  const double y_mean = 0.5 / 4.0;
  const double expected = 0.25 + 0.5 * x_mean + 0.125 * y_mean;
  CHECK(graphon_average(w, 4, 2, 0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("graphon invariants: negative and non-finite values rejected") {
  CHECK_THROWS(Graphon::uniform(0.0));
  CHECK_THROWS(Graphon::uniform(1.5));
  // Construction estimates the integrability bounds, which evaluates the
  // kernel and surfaces bad values immediately.
  CHECK_THROWS_AS(Graphon::callable([](double, double) { return -1.0; }),
                  std::domain_error);
  CHECK_THROWS_AS(
      Graphon::callable(
          [](double x, double) { return x > 0.5 ? 1e308 * 1e308 : 0.1; }),
      std::domain_error);
}

TEST_CASE("graphon integrability bound fields") {
  const auto u = Graphon::uniform(0.25);
  CHECK(u.bound_c1() == 0.25);
  CHECK(u.bound_c2() == 0.25);

  const auto g = Graphon::grid(2, {0.2, 0.8, 0.4, 0.6});
  // Column sums (0.3, 0.7) and row sums (0.5, 0.5) averaged over 2 cells.
  CHECK(g.bound_c1() == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(g.bound_c2() == doctest::Approx(0.5).epsilon(1e-15));

  // Supplied analytic bounds dominate the estimates; too-small ones throw.
  const auto ok = Graphon::callable(
      [](double x, double y) { return x * y; }, "xy", true, 0.5, 0.5);
  CHECK(ok.bound_c1() == 0.5);
  CHECK_THROWS(Graphon::callable([](double x, double y) { return x * y; },
                                 "xy", true, 0.1, 0.5));
}

TEST_CASE("build_deterministic_dense: complete graph with loops") {
  const auto m = build_deterministic_dense(Graphon::uniform(1.0), 3);
  CHECK(m.is_uniform());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(m.at(i, j) == 1.0);
    }
  }
  CHECK(m.alpha_n() == 1.0);
  CHECK(m.kind() == GraphKind::kDeterministicDense);
  CHECK(m.symmetric());
}

TEST_CASE("build_deterministic_dense: uniform fast path at large n") {
  const auto m = build_deterministic_dense(Graphon::uniform(0.5), 1000);
  CHECK(m.is_uniform());
  CHECK(m.uniform_value() == 0.5);
  CHECK(m.at(999, 0) == 0.5);  // expanded on demand
}

TEST_CASE("build_deterministic_dense: product kernel matrix") {
  const auto m = build_deterministic_dense(product_graphon(), 2);
  CHECK(m.at(0, 0) == doctest::Approx(1.0 / 16).epsilon(1e-13));
  CHECK(m.at(0, 1) == doctest::Approx(3.0 / 16).epsilon(1e-13));
  CHECK(m.at(1, 0) == doctest::Approx(3.0 / 16).epsilon(1e-13));
  CHECK(m.at(1, 1) == doctest::Approx(9.0 / 16).epsilon(1e-13));
  CHECK(m.symmetric());
  CHECK(m.at(0, 1) == m.at(1, 0));
}

TEST_CASE("sample_random_dense: Bernoulli(1) is the complete graph") {
  const auto m = sample_random_dense(Graphon::uniform(1.0), 50, 1234);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = 0; j < 50; ++j) {
      REQUIRE(m.at(i, j) == 1.0);
    }
  }
  CHECK(m.edge_count() == 50 * 51 / 2);
}

TEST_CASE("sample_random_dense: edge count within 4 sigma of the binomial mean") {
  const std::size_t n = 1000;
  const auto m = sample_random_dense(Graphon::uniform(0.5), n, 99);
  const double trials = static_cast<double>(n) * (n + 1) / 2.0;
  const double mean = 0.5 * trials;
  const double sigma = std::sqrt(trials * 0.25);
  CHECK(std::abs(static_cast<double>(m.edge_count()) - mean) < 4.0 * sigma);
}

TEST_CASE("sample_random_dense: undirected samples are symmetric (exhaustive)") {
  const auto m = sample_random_dense(Graphon::uniform(0.3), 200, 7);
  CHECK(m.symmetric());
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = i + 1; j < 200; ++j) {
      REQUIRE(m.at(i, j) == m.at(j, i));
    }
  }
}

TEST_CASE("sampling determinism: identical (recipe, seed) gives bit-identical matrices") {
  const auto a = sample_random_dense(Graphon::uniform(0.4), 128, 42);
  const auto b = sample_random_dense(Graphon::uniform(0.4), 128, 42);
  for (std::size_t i = 0; i < 128; ++i) {
    for (std::size_t j = 0; j < 128; ++j) {
      REQUIRE(a.at(i, j) == b.at(i, j));
    }
  }
  const auto c = sample_random_sparse(Graphon::uniform(1.0), 300, 0.3, 42);
  const auto d = sample_random_sparse(Graphon::uniform(1.0), 300, 0.3, 42);
  REQUIRE(c.edge_count() == d.edge_count());
  for (std::size_t i = 0; i < 300; ++i) {
    const auto ra = c.row(i);
    const auto rb = d.row(i);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t k = 0; k < ra.size(); ++k) REQUIRE(ra[k] == rb[k]);
  }
}

TEST_CASE("sample_random_sparse: alpha_n and expected edge count") {
  const std::size_t n = 1000;
  const double gamma = 0.3;
  const double alpha = std::pow(1000.0, -0.3);
  const auto m = sample_random_sparse(Graphon::uniform(1.0), n, gamma, 5);
  CHECK(m.alpha_n() == doctest::Approx(alpha).epsilon(1e-15));
  CHECK(m.gamma().value() == gamma);
  CHECK(m.kind() == GraphKind::kRandomSparse);

  // Binomial expectation oracle over the upper triangle, 20 seeds.
  const double trials = static_cast<double>(n) * (n + 1) / 2.0;
  const int seeds = 20;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    total += static_cast<double>(
        sample_random_sparse(Graphon::uniform(1.0), n, gamma, 1000 + s)
            .edge_count());
  }
  const double mean_count = total / seeds;
  const double expect = alpha * trials;
  const double se = std::sqrt(alpha * (1.0 - alpha) * trials / seeds);
  CHECK(std::abs(mean_count - expect) < 3.0 * se);
  // Mean degree ~ alpha * n ~ 125.9.
  CHECK(mean_count * 2.0 / n / n == doctest::Approx(alpha).epsilon(0.05));
}

TEST_CASE("sample_random_sparse: truncation is a no-op for kernels bounded by 1") {
  // min(alpha^-1, W) = W when W <= 1 < alpha^-1: the sparse sample with a
  // grid kernel must follow alpha * <W> exactly; check via expectation.
  const std::size_t n = 400;
  const double gamma = 0.25;
  const double alpha = std::pow(static_cast<double>(n), -gamma);
  const auto w = Graphon::grid(2, {0.2, 0.8, 0.8, 0.4});
  const double trials = static_cast<double>(n) * (n + 1) / 2.0;
  // Average cell probability over the upper triangle ~ mean of W scaled.
  double expect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      expect += alpha * graphon_average(w, n, i, j);
    }
  }
  const int seeds = 20;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    total += static_cast<double>(
        sample_random_sparse(w, n, gamma, 7000 + s).edge_count());
  }
  const double se = std::sqrt(expect * (1.0 - expect / trials) / seeds);
  CHECK(std::abs(total / seeds - expect) < 3.0 * se);
}

TEST_CASE("sample_random_sparse: gamma domain errors") {
  CHECK_THROWS_AS(sample_random_sparse(Graphon::uniform(1.0), 100, 0.0, 1),
                  std::domain_error);
  CHECK_THROWS_AS(sample_random_sparse(Graphon::uniform(1.0), 100, 0.5, 1),
                  std::domain_error);
  CHECK_THROWS_AS(sample_random_sparse(Graphon::uniform(1.0), 100, -0.1, 1),
                  std::domain_error);
}

TEST_CASE("density law: sparse edge fraction over alpha*p approaches 1") {
  for (std::size_t n : {200, 1000, 5000}) {
    const double gamma = 0.3;
    const double alpha = std::pow(static_cast<double>(n), -gamma);
    const double trials = static_cast<double>(n) * (n + 1) / 2.0;
    const int seeds = 20;
    double mean_fraction = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const auto m = sample_random_sparse(Graphon::uniform(1.0), n, gamma,
                                          90000 + s);
      mean_fraction += static_cast<double>(m.edge_count()) / trials;
    }
    mean_fraction /= seeds;
    const double se = std::sqrt(alpha * (1.0 - alpha) / trials / seeds);
    INFO("n = ", n);
    CHECK(std::abs(mean_fraction / alpha - 1.0) < 3.0 * se / alpha);
  }
}

TEST_CASE("estimate_integrability_bounds") {
  const auto [c1u, c2u] = Graphon::uniform(0.5).integrability_bounds();
  CHECK(c1u == 0.5);
  CHECK(c2u == 0.5);
  const auto [c1, c2] = product_graphon().integrability_bounds(128);
  CHECK(c1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c2 == doctest::Approx(0.5).epsilon(1e-12));
  const auto ones = Graphon::callable([](double, double) { return 1.0; });
  const auto [d1, d2] = ones.integrability_bounds(64);
  CHECK(d1 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(d2 == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("coordinate list and density summary exports") {
  const auto m = sample_random_dense(Graphon::uniform(0.5), 4, 11);
  std::ostringstream os;
  m.write_coordinate_list(os);
  // 1-based triples, sorted by (i, j).
  std::istringstream is(os.str());
  int prev_i = 0, prev_j = 0;
  int i, j;
  double w;
  std::size_t rows = 0;
  while (is >> i >> j >> w) {
    CHECK(w == 1.0);
    CHECK(i >= 1);
    CHECK(j >= 1);
    CHECK(i <= 4);
    CHECK(j <= 4);
    CHECK((i > prev_i || (i == prev_i && j > prev_j)));
    prev_i = i;
    prev_j = j;
    ++rows;
  }
  CHECK(rows == 2 * m.edge_count() -
                    [&] {  // diagonal entries are not mirrored
                      std::size_t loops = 0;
                      for (std::size_t k = 0; k < 4; ++k) {
                        if (m.at(k, k) != 0.0) ++loops;
                      }
                      return loops;
                    }());

  const auto json = m.density_summary_json();
  CHECK(json.find("\"kind\": \"random_dense\"") != std::string::npos);
  CHECK(json.find("\"n\": 4") != std::string::npos);
  CHECK(json.find("\"seed\": 11") != std::string::npos);
}

TEST_CASE("build_graph dispatches on the recipe case") {
  GraphRecipe complete{GraphCase::kComplete, 16, 1.0, 0.3, 0};
  const auto a = build_graph(complete);
  CHECK(a.kind() == GraphKind::kDeterministicDense);
  CHECK(a.is_uniform());
  CHECK(a.at(3, 7) == 1.0);

  // p < 1 deterministic uniform is permitted for the complete case.
  complete.p = 0.5;
  CHECK(build_graph(complete).at(0, 0) == 0.5);

  GraphRecipe dense{GraphCase::kRandomDense, 32, 0.4, 0.3, 9};
  const auto b = build_graph(dense);
  CHECK(b.kind() == GraphKind::kRandomDense);
  CHECK(b.seed() == 9);

  GraphRecipe sparse{GraphCase::kRandomSparse, 64, 1.0, 0.25, 9};
  const auto c = build_graph(sparse);
  CHECK(c.kind() == GraphKind::kRandomSparse);
  CHECK(c.alpha_n() == doctest::Approx(std::pow(64.0, -0.25)).epsilon(1e-15));
}

TEST_CASE("directed sampling mode samples all ordered pairs independently") {
  const auto m = sample_random_dense(Graphon::uniform(0.5), 100, 3,
                                     /*directed=*/true);
  CHECK_FALSE(m.symmetric());
  bool found_asymmetric = false;
  for (std::size_t i = 0; i < 100 && !found_asymmetric; ++i) {
    for (std::size_t j = i + 1; j < 100; ++j) {
      if (m.at(i, j) != m.at(j, i)) {
        found_asymmetric = true;
        break;
      }
    }
  }
  CHECK(found_asymmetric);
}
