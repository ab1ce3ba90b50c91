#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ictree/rng.hpp"
#include "ictree/turnbull.hpp"
#include "oracles.hpp"

using namespace ictree;

namespace {

std::vector<CensoredObservation> random_interval_data(Rng& rng, int n, bool allow_exact) {
  std::vector<CensoredObservation> obs;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    if (allow_exact && u < 0.25) {
      obs.push_back(exact_obs(1.0 + 9.0 * uniform01(rng)));
    } else if (u < 0.45) {
      obs.push_back(right_censored_obs(10.0 * uniform01(rng)));
    } else {
      const double l = 10.0 * uniform01(rng);
      obs.push_back(interval_obs(l, l + 0.2 + 5.0 * uniform01(rng)));
    }
  }
  return obs;
}

std::vector<CensoredObservation> random_exact_time_data(Rng& rng, int n) {
  std::vector<CensoredObservation> obs;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 + 9.0 * uniform01(rng);
    if (uniform01(rng) < 0.35)
      obs.push_back(right_censored_obs(t));
    else
      obs.push_back(exact_obs(t));
  }
  // make sure at least one event exists
  obs.front() = exact_obs(obs.front().left);
  return obs;
}

}  // namespace

TEST_CASE("turnbull intervals: non-overlapping intervals are their own classes") {
  const auto tb = turnbull_intervals({interval_obs(0, 1), interval_obs(1, 2)});
  REQUIRE(tb.size() == 2);
  CHECK(tb[0].lower == 0.0);
  CHECK(tb[0].upper == 1.0);
  CHECK(tb[1].lower == 1.0);
  CHECK(tb[1].upper == 2.0);
}

TEST_CASE("turnbull intervals: overlap keeps only the intersection") {
  const auto tb = turnbull_intervals({interval_obs(0, 2), interval_obs(1, 3)});
  REQUIRE(tb.size() == 1);
  CHECK(tb[0].lower == 1.0);
  CHECK(tb[0].upper == 2.0);
}

TEST_CASE("turnbull intervals: exact observation forms a degenerate class") {
  const auto tb = turnbull_intervals({exact_obs(2), interval_obs(0, 3)});
  REQUIRE(tb.size() == 1);
  CHECK(tb[0].degenerate());
  CHECK(tb[0].lower == 2.0);
}

TEST_CASE("turnbull intervals: empty input is an error") {
  CHECK_THROWS_AS(turnbull_intervals({}), std::invalid_argument);
}

TEST_CASE("turnbull intervals match the endpoint-pair enumeration oracle") {
  Rng rng = make_rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const auto obs = random_interval_data(rng, 2 + static_cast<int>(uniform01(rng) * 12), true);
    auto got = turnbull_intervals(obs);
    auto want = oracles::enumerate_maximal_intersections(obs);
    REQUIRE(got.size() == want.size());
    for (std::size_t j = 0; j < got.size(); ++j) {
      CHECK(got[j].lower == want[j].lower);
      CHECK(got[j].upper == want[j].upper);
    }
  }
}

TEST_CASE("fit_npmle: exact uncensored times give the empirical distribution") {
  const auto curve = fit_npmle({exact_obs(1), exact_obs(2), exact_obs(3)});
  REQUIRE(curve.size() == 3);
  for (double m : curve.masses()) CHECK(m == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(curve.survival(1) == doctest::Approx(2.0 / 3));
  CHECK(curve.survival(2) == doctest::Approx(1.0 / 3));
  CHECK(curve.survival(3) == doctest::Approx(0.0));
}

TEST_CASE("fit_npmle: one equivalence class carries all mass") {
  const auto curve = fit_npmle({interval_obs(0, 2), interval_obs(1, 3)});
  REQUIRE(curve.size() == 1);
  CHECK(curve.masses()[0] == 1.0);
  CHECK(curve.survival(1.0) == 1.0);
  CHECK(curve.survival(0.999) == 1.0);
  CHECK(curve.survival(2.0) == 0.0);
  CHECK(curve.survival(5.0) == 0.0);
}

TEST_CASE("survival_at: single interval (1,2] with mass 1") {
  const auto curve = fit_npmle({interval_obs(0, 2), interval_obs(1, 3)});
  CHECK(curve.survival(0.5) == 1.0);
  CHECK(curve.survival(2.0) == 0.0);
}

TEST_CASE("survival_at: product-limit value fixed by the oracle") {
  const std::vector<CensoredObservation> obs = {exact_obs(1), exact_obs(2),
                                                right_censored_obs(1.5)};
  const auto curve = fit_npmle(obs);
  const auto km = oracles::KmOracle::fit({1, 2, 1.5}, {true, true, false});
  CHECK(curve.survival(1.0) == doctest::Approx(km.survival(1.0)).epsilon(1e-12));
  CHECK(km.survival(1.0) == doctest::Approx(2.0 / 3));
  CHECK(curve.survival(2.0) == doctest::Approx(km.survival(2.0)).epsilon(1e-12));
}

TEST_CASE("KM reduction: NPMLE equals the product-limit oracle on exact-time data") {
  Rng rng = make_rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const auto obs = random_exact_time_data(rng, 3 + static_cast<int>(uniform01(rng) * 40));
    std::vector<double> times;
    std::vector<bool> events;
    for (const auto& o : obs) {
      times.push_back(o.left);
      events.push_back(o.exact);
    }
    const auto km = oracles::KmOracle::fit(times, events);
    const auto curve = fit_npmle(obs);
    for (double t : times) {
      CHECK(std::fabs(curve.survival(t) - km.survival(t)) <= 1e-8);
      CHECK(std::fabs(curve.survival(t * 0.99) - km.survival(t * 0.99)) <= 1e-8);
    }
  }
}

TEST_CASE("KM reduction holds for the forced EM path too") {
  Rng rng = make_rng(8);
  NpmleOptions opt;
  opt.allow_product_limit = false;
  for (int rep = 0; rep < 30; ++rep) {
    const auto obs = random_exact_time_data(rng, 3 + static_cast<int>(uniform01(rng) * 25));
    std::vector<double> times;
    std::vector<bool> events;
    for (const auto& o : obs) {
      times.push_back(o.left);
      events.push_back(o.exact);
    }
    const auto km = oracles::KmOracle::fit(times, events);
    const auto curve = fit_npmle(obs, opt);
    for (double t : times) CHECK(std::fabs(curve.survival(t) - km.survival(t)) <= 1e-7);
  }
}

TEST_CASE("log_likelihood: spec arithmetic cases") {
  // one observation fully covered -> log 1 = 0
  const auto curve1 = fit_npmle({interval_obs(0, 2), interval_obs(0, 1)});
  CHECK(log_likelihood({interval_obs(0, 2)}, curve1) == doctest::Approx(0.0).epsilon(1e-12));

  // two observations each covering disjoint mass 0.5
  const auto curve2 = fit_npmle({interval_obs(0, 1), interval_obs(1, 2)});
  CHECK(curve2.masses()[0] == doctest::Approx(0.5));
  CHECK(log_likelihood({interval_obs(0, 1), interval_obs(1, 2)}, curve2) ==
        doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));

  // zero-probability observation flags -inf
  CHECK(log_likelihood({interval_obs(5, 6)}, curve2) == -kInf);
}

TEST_CASE("NPMLE beats the simplex grid oracle on small instances") {
  Rng rng = make_rng(11);
  int tested = 0;
  while (tested < 60) {
    const auto obs = random_interval_data(rng, 2 + static_cast<int>(uniform01(rng) * 6), false);
    const auto tb = turnbull_intervals(obs);
    if (tb.size() > 3) continue;
    ++tested;
    const auto curve = fit_npmle(obs);
    const double best = oracles::simplex_grid_best_loglik(obs, tb, 100);
    CHECK(log_likelihood(obs, curve) >= best - 1e-4);
  }
}

TEST_CASE("EM is monotone in log-likelihood and conserves mass") {
  Rng rng = make_rng(13);
  NpmleOptions opt;
  opt.check_monotone = true;  // throws on any decrease
  opt.max_iter = 5000000;     // wide random intervals can need slow tail iterations
  for (int rep = 0; rep < 40; ++rep) {
    const auto obs = random_interval_data(rng, 5 + static_cast<int>(uniform01(rng) * 40), true);
    const auto curve = fit_npmle(obs, opt);
    double sum = 0.0;
    for (double m : curve.masses()) {
      CHECK(m >= 0.0);
      sum += m;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    // S(t) non-increasing on a grid
    double prev = 1.0;
    for (double t = 0.0; t <= 16.0; t += 0.25) {
      const double s = curve.survival(t);
      CHECK(s <= prev + 1e-15);
      prev = s;
    }
  }
}

TEST_CASE("fitted curve is bit-for-bit invariant to observation order") {
  Rng rng = make_rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    auto obs = random_interval_data(rng, 25, true);
    // duplicate a few rows with distinct weights to exercise merge ordering
    obs[3].weight = 2.5;
    obs.push_back(obs[3]);
    const auto a = fit_npmle(obs);
    std::shuffle(obs.begin(), obs.end(), rng);
    const auto b = fit_npmle(obs);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a.masses()[j] == b.masses()[j]);
      CHECK(a.intervals()[j].lower == b.intervals()[j].lower);
      CHECK(a.intervals()[j].upper == b.intervals()[j].upper);
    }
    CHECK(a.loglik() == b.loglik());
  }
}

TEST_CASE("optimized EM kernel agrees with the dense reference implementation") {
  Rng rng = make_rng(19);
  NpmleOptions opt;
  opt.allow_product_limit = false;
  for (int rep = 0; rep < 25; ++rep) {
    const auto obs = random_interval_data(rng, 4 + static_cast<int>(uniform01(rng) * 30), true);
    const auto fast = fit_npmle(obs, opt);
    const auto ref = fit_npmle_reference(obs, opt);
    REQUIRE(fast.size() == ref.size());
    for (std::size_t j = 0; j < fast.size(); ++j)
      CHECK(std::fabs(fast.masses()[j] - ref.masses()[j]) <= 1e-7);
  }
}

TEST_CASE("last interval (c, inf] keeps survival positive at finite times") {
  const auto curve = fit_npmle({exact_obs(1), right_censored_obs(2)});
  CHECK(curve.survival(1e12) == doctest::Approx(0.5));
  CHECK(curve.quantile(0.25) == std::nullopt);
}

TEST_CASE("fit_npmle error paths") {
  CHECK_THROWS_AS(fit_npmle({}), std::invalid_argument);
  CHECK_THROWS_AS(fit_npmle({interval_obs(0, 1, 0.0), interval_obs(1, 2, 0.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_npmle({interval_obs(3, 2)}), std::invalid_argument);

  // max_iter reached: error carries the last iterate
  NpmleOptions strict;
  strict.tol = 0.0;  // unattainable
  strict.max_iter = 5;
  strict.allow_product_limit = false;
  try {
    fit_npmle({interval_obs(0, 2), interval_obs(1, 3), interval_obs(2.5, 4)}, strict);
    FAIL("expected EmNotConverged");
  } catch (const EmNotConverged& e) {
    CHECK(e.last.iterations() == 5);
    CHECK_FALSE(e.last.converged());
    double sum = 0.0;
    for (double m : e.last.masses()) sum += m;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quantile: smallest time where S reaches the level") {
  const auto curve = fit_npmle({exact_obs(1), exact_obs(2), exact_obs(3), exact_obs(4)});
  CHECK(*curve.quantile(0.75) == 1.0);
  CHECK(*curve.quantile(0.5) == 2.0);
  CHECK(*curve.quantile(0.25) == 3.0);
  CHECK(*curve.quantile(0.0) == 4.0);
}
