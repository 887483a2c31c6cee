#include <doctest.h>

#include <cmath>

#include "backflow/backflow_analysis.hpp"
#include "backflow/errors.hpp"
#include "support.hpp"

using namespace backflow;
using testing::kPi;

TEST_SUITE("backflow_analysis") {

TEST_CASE("sine: rising windows located to the time resolution") {
  const std::function<double(double)> p = [](double t) { return std::sin(t); };
  const auto iv = find_backflow_intervals(p, 12.0);
  REQUIRE(iv.size() == 3);
  CHECK(iv[0].t_start == 0.0);
  CHECK(iv[0].t_end == doctest::Approx(0.5 * kPi).epsilon(1e-6));
  CHECK(iv[1].t_start == doctest::Approx(1.5 * kPi).epsilon(1e-6));
  CHECK(iv[1].t_end == doctest::Approx(2.5 * kPi).epsilon(1e-6));
  CHECK(iv[1].probability_gain == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(iv[1].t_max == iv[1].t_end);
  CHECK(iv[2].t_start == doctest::Approx(3.5 * kPi).epsilon(1e-6));
  CHECK(iv[2].t_end == 12.0);
  for (std::size_t i = 1; i < iv.size(); ++i) CHECK(iv[i - 1].t_end < iv[i].t_start);
}

TEST_CASE("explicit rate gives the same windows") {
  const std::function<double(double)> p = [](double t) { return std::sin(t); };
  const std::function<double(double)> r = [](double t) { return std::cos(t); };
  const auto a = find_backflow_intervals(p, 10.0);
  const auto b = find_backflow_intervals(p, r, 10.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].t_start - b[i].t_start) <= 2e-6);
}

TEST_CASE("a narrow rise inside one coarse cell is found") {
  // dips between two roots 2e-3 apart, inside one 2048-sample cell of [0, 10]
  const double c = 5.0012;
  const std::function<double(double)> r = [c](double t) { return 1e-6 - (t - c) * (t - c); };
  const std::function<double(double)> p = [c](double t) { return 1e-6 * t - std::pow(t - c, 3) / 3.0; };
  const auto iv = find_backflow_intervals(p, r, 10.0, 1e-12);
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].t_start == doctest::Approx(c - 1e-3).epsilon(1e-6));
  CHECK(iv[0].t_end == doctest::Approx(c + 1e-3).epsilon(1e-6));
}

TEST_CASE("rises below tol are dropped") {
  const std::function<double(double)> p = [](double t) { return -t + 1e-11 * std::sin(50.0 * t); };
  CHECK(find_backflow_intervals(p, 10.0, 1e-9).empty());
  const std::function<double(double)> flat = [](double) { return 0.25; };
  CHECK(find_backflow_intervals(flat, 10.0).empty());
}

TEST_CASE("detector errors") {
  const std::function<double(double)> nan = [](double t) { return t > 3.0 ? NAN : 0.0; };
  CHECK_THROWS_AS(find_backflow_intervals(nan, 10.0), EvaluationError);
  const std::function<double(double)> p = [](double t) { return t; };
  CHECK_THROWS_AS(find_backflow_intervals(p, 10.0, 0.0), DomainError);
  CHECK_THROWS_AS(find_backflow_intervals(p, -1.0), DomainError);
}

TEST_CASE("backflow amount is the gain of the earliest interval") {
  CHECK(backflow_amount({}) == 0.0);
  CHECK(backflow_amount({{5.0, 6.0, 0.3, 6.0}, {1.0, 2.0, 0.1, 2.0}}) == 0.1);
}

TEST_CASE("a single gaussian shows no backflow") {
  for (double eta : {0.0, 0.5, 1.0, 2.0}) {
    for (double gamma : {0.0, 0.1, 0.3}) {
      const SuperposedState s(testing::fast_packet(eta), testing::slow_packet(eta), 0.0, 0.0);
      CHECK(single_particle_backflow(s, CKParams{gamma}, 20.0).empty());
    }
  }
}

TEST_CASE("interval counts with and without damping") {
  CHECK(single_particle_backflow(testing::reference_state(), CKParams{0.0}, 10.0).size() >= 2);
  CHECK(single_particle_backflow(testing::reference_state(), CKParams{0.3}, 10.0).size() == 1);
}

TEST_CASE("reported intervals are consistent with the current") {
  for (double gamma : {0.0, 0.2}) {
    const auto s = testing::reference_state(kPi, 1.9, 0.5);
    const CKParams p{gamma};
    const auto iv = single_particle_backflow(s, p, 10.0);
    REQUIRE(!iv.empty());
    for (const auto& i : iv) {
      CHECK(i.t_start < i.t_end);
      CHECK(i.probability_gain > 0.0);
      CHECK(left_probability(s, p, i.t_end) > left_probability(s, p, i.t_start));
      for (int k = 1; k < 50; ++k) {
        const double t = i.t_start + (i.t_end - i.t_start) * k / 50.0;
        CHECK(current_density(s, p, 0.0, t) < 0.0);
      }
      // endpoints are sign changes of j(0, t) within the time resolution
      if (i.t_start > 0.0) {
        CHECK(current_density(s, p, 0.0, i.t_start - 1e-6) > 0.0);
        CHECK(current_density(s, p, 0.0, i.t_start + 1e-6) < 0.0);
      }
      if (i.t_end < 10.0) {
        CHECK(current_density(s, p, 0.0, i.t_end - 1e-6) < 0.0);
        CHECK(current_density(s, p, 0.0, i.t_end + 1e-6) > 0.0);
      }
    }
  }
}

TEST_CASE("dense-grid completeness") {
  const auto s = testing::reference_state(0.8 * kPi, 1.9, 0.0);
  const CKParams p{0.05};
  const auto iv = single_particle_backflow(s, p, 10.0);
  auto covered = [&](double a, double b) {
    for (const auto& i : iv) {
      if (a < i.t_end + 1e-6 && b > i.t_start - 1e-6) return true;
    }
    return false;
  };
  double prev = left_probability(s, p, 0.0);
  for (int k = 1; k <= 10000; ++k) {
    const double t0 = (k - 1) * 1e-3;
    const double t1 = k * 1e-3;
    const double cur = left_probability(s, p, t1);
    if (cur - prev > 1e-9) CHECK(covered(t0, t1));
    prev = cur;
  }
}

TEST_CASE("amount decreases with stretching") {
  for (double gamma : {0.0, 0.3}) {
    double previous = INFINITY;
    for (double eta : {0.0, 0.5, 1.0, 2.0}) {
      const double a = backflow_amount(single_particle_backflow(testing::reference_state(kPi, 1.9, eta), CKParams{gamma}, 10.0));
      CHECK(a < previous);
      previous = a;
    }
  }
}

TEST_CASE("current sign map") {
  const auto family = [](double theta) { return testing::reference_state(theta); };
  std::vector<double> thetas;
  for (int i = 0; i < 256; ++i) thetas.push_back(2.0 * kPi * i / 255.0);
  const std::vector<double> times = {0.0, 0.2, 0.4};
  const auto grid = current_sign_map(family, CKParams{}, thetas, times);
  REQUIRE(grid.current_values.size() == thetas.size());
  REQUIRE(grid.current_values[0].size() == times.size());

  // negative-current window in theta at each time, and its center
  std::vector<double> centers;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (grid.current_values[i][k] < 0.0) {
        lo = std::min(lo, thetas[i]);
        hi = std::max(hi, thetas[i]);
      }
    }
    REQUIRE(lo <= hi);
    if (k == 0) {
      CHECK(lo < kPi);
      CHECK(hi > kPi);
    }
    centers.push_back(0.5 * (lo + hi));
  }
  CHECK(centers[1] < centers[0]);
  CHECK(centers[2] < centers[1]);

  const auto one = current_sign_map(family, CKParams{0.1}, {1.0}, {2.0});
  CHECK(one.current_values[0][0] == current_density(family(1.0), CKParams{0.1}, 0.0, 2.0));
}

TEST_CASE("scans are deterministic and independent of the thread count") {
  const auto family = [](double theta) { return testing::reference_state(theta); };
  std::vector<double> thetas;
  std::vector<double> times;
  for (int i = 0; i < 40; ++i) thetas.push_back(0.15 * i);
  for (int i = 0; i < 30; ++i) times.push_back(0.3 * i);
  const auto a = current_sign_map(family, CKParams{0.2}, thetas, times, 1);
  const auto b = current_sign_map(family, CKParams{0.2}, thetas, times, 4);
  CHECK(a.current_values == b.current_values);
  const auto c = single_particle_backflow(testing::reference_state(), CKParams{}, 10.0);
  const auto d = single_particle_backflow(testing::reference_state(), CKParams{}, 10.0);
  REQUIRE(c.size() == d.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c[i].t_start == d[i].t_start);
    CHECK(c[i].probability_gain == d[i].probability_gain);
  }
}

TEST_CASE("sign map errors") {
  const auto family = [](double theta) { return testing::reference_state(theta); };
  CHECK_THROWS_AS(current_sign_map(family, CKParams{}, {}, {1.0}), DomainError);
  CHECK_THROWS_AS(current_sign_map(family, CKParams{}, {1.0}, {-1.0}), DomainError);
  try {
    current_sign_map(family, CKParams{0.0, 0.5}, {1.0, 2.0}, {3.0}, 2);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("theta = 1") != std::string::npos);
  }
}

TEST_CASE("fidelity and backflow scan") {
  FidelityScanConfig cfg{testing::fast_packet(), testing::slow_packet(), 1.9, kPi, kPi, {}, 10.0, 1e-9};
  const auto records = fidelity_backflow_scan({1.0, 1.9, 3.5}, cfg, 2);
  REQUIRE(records.size() == 3);
  CHECK(records[1].fidelity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(records[1].backflow_amount > records[0].backflow_amount);
  CHECK(records[1].backflow_amount > records[2].backflow_amount);
  for (const auto& r : records) CHECK(r.backflow_amount == backflow_amount(r.intervals));

  // nearly orthogonal chi and phi
  FidelityScanConfig far = cfg;
  far.theta_phi = 0.0;
  const auto low = fidelity_backflow_scan({1.0 / 1.9}, far);
  CHECK(low[0].fidelity < 1e-20);
  CHECK(low[0].backflow_amount == 0.0);
  CHECK_THROWS_AS(fidelity_backflow_scan({-1.0}, cfg), DomainError);
}

TEST_CASE("parallel_for rethrows the first failure") {
  std::vector<int> seen(100, 0);
  parallel_for(seen.size(), 3, [&](std::size_t i) { seen[i] = 1; });
  CHECK(std::count(seen.begin(), seen.end(), 1) == 100);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw EvaluationError("boom");
                  }),
                  EvaluationError);
}

}
