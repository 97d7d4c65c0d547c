#include <doctest.h>

#include <cmath>
#include <sstream>

#include "edm/boltzmann.hpp"

using namespace edm;
using namespace edm::boltzmann;

namespace {

EnergyModel gaussian_well(double temperature) {
  EnergyModel m;
  m.dimension = 1;
  m.temperature = temperature;
  m.energy = [](const Vec& x) { return 0.5 * x[0] * x[0]; };
  m.gradient = [](const Vec& x) { return Vec{x[0]}; };
  return m;
}

EnergyModel double_well(double temperature) {
  EnergyModel m;
  m.dimension = 1;
  m.temperature = temperature;
  m.energy = [](const Vec& x) { return 0.25 * std::pow(x[0], 4) - 0.5 * x[0] * x[0]; };
  m.gradient = [](const Vec& x) { return Vec{std::pow(x[0], 3) - x[0]}; };
  return m;
}

DensityTable table_1d(const EnergyModel& m, double lo, double hi, int pts) {
  return gibbs_density(m, GridND{{Grid1D{lo, hi, pts}}});
}

}  // namespace

TEST_CASE("gibbs density of the gaussian well") {
  DensityTable t = table_1d(gaussian_well(1.0), -8, 8, 2001);
  int mid = 1000;  // x = 0
  CHECK(t.values[mid] == doctest::Approx(0.39894).epsilon(2.5e-4));
  CHECK(t.mass_1d(-8, 8) == doctest::Approx(1.0).epsilon(1e-6));

  DensityTable t2 = table_1d(gaussian_well(2.0), -8, 8, 2001);
  CHECK(t2.values[mid] == doctest::Approx(1.0 / std::sqrt(2 * M_PI * 2.0)).epsilon(4e-4));
}

TEST_CASE("double-well density is symmetric and bimodal") {
  DensityTable t = table_1d(double_well(0.5), -3, 3, 1201);
  auto at = [&](double x) {
    int i = static_cast<int>(std::lround((x - (-3.0)) / t.grid.axes[0].step()));
    return t.values[i];
  };
  CHECK(at(1.0) == doctest::Approx(at(-1.0)).epsilon(1e-10));
  CHECK(at(1.0) > at(0.0));
}

TEST_CASE("gibbs density survives large energy offsets") {
  EnergyModel shifted = gaussian_well(1.0);
  shifted.energy = [](const Vec& x) { return 0.5 * x[0] * x[0] + 5000.0; };
  DensityTable t = table_1d(shifted, -8, 8, 2001);
  CHECK(t.values[1000] == doctest::Approx(0.39894).epsilon(2.5e-4));
}

TEST_CASE("gradient check helper") {
  Rng rng(5);
  CHECK(gradient_check(double_well(1.0), 32, 2.0, rng) < 1e-4);
  EnergyModel broken = double_well(1.0);
  broken.gradient = [](const Vec& x) { return Vec{2.0 * x[0]}; };
  Rng rng2(5);
  CHECK(gradient_check(broken, 32, 2.0, rng2) > 1e-2);
}

TEST_CASE("langevin sampling is seeded and matches the OU law") {
  EnergyModel m = gaussian_well(1.0);
  Rng a(99), b(99);
  auto sa = langevin_sample(m, {0.0}, 1e-3, 20000, 2000, 10, a);
  auto sb = langevin_sample(m, {0.0}, 1e-3, 20000, 2000, 10, b);
  REQUIRE(sa.size() == sb.size());
  for (size_t i = 0; i < sa.size(); ++i) CHECK(sa[i][0] == sb[i][0]);

  Rng c(2);
  auto s = langevin_sample(m, {0.0}, 1e-3, 1000000, 100000, 10, c);
  double mean = 0, var = 0;
  for (const Vec& x : s) mean += x[0];
  mean /= s.size();
  for (const Vec& x : s) var += (x[0] - mean) * (x[0] - mean);
  var /= (s.size() - 1);
  CHECK(std::fabs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("near-zero temperature reduces to descent into the nearest well") {
  EnergyModel m = double_well(1e-12);
  Rng rng(8);
  auto s = langevin_sample(m, {0.1}, 1e-2, 5000, 500, 10, rng);
  CHECK(s.back()[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("tv distance between a table and its own draws is small") {
  DensityTable t = table_1d(double_well(0.5), -3, 3, 1201);
  Rng rng(17);
  auto draws = sample_from_table(t, 100000, rng);
  std::vector<double> edges(51);
  for (int i = 0; i <= 50; ++i) edges[i] = -3.0 + 6.0 * i / 50;
  CHECK(tv_distance(draws, t, edges) < 0.02);
}

TEST_CASE("tv distance approaches one for a point mass vs a broad table") {
  DensityTable t = table_1d(gaussian_well(1.0), -4, 4, 801);
  std::vector<double> point(2000, 0.001);
  std::vector<double> edges(41);
  for (int i = 0; i <= 40; ++i) edges[i] = -4.0 + 8.0 * i / 40;
  CHECK(tv_distance(point, t, edges) > 0.9);
}

TEST_CASE("independent draws from one table both sit within binning noise") {
  DensityTable t = table_1d(double_well(0.5), -3, 3, 1201);
  Rng a(3), b(51);
  auto s1 = sample_from_table(t, 50000, a);
  auto s2 = sample_from_table(t, 50000, b);
  std::vector<double> edges(51);
  for (int i = 0; i <= 50; ++i) edges[i] = -3.0 + 6.0 * i / 50;
  CHECK(tv_distance(s1, t, edges) < 0.03);
  CHECK(tv_distance(s2, t, edges) < 0.03);
}

TEST_CASE("tv distance input guards") {
  DensityTable t = table_1d(gaussian_well(1.0), -4, 4, 801);
  std::vector<double> few(10, 0.0);
  std::vector<double> edges{-4, 0, 4};
  CHECK_THROWS_AS(tv_distance(few, t, edges), DomainError);
}

TEST_CASE("dissipativity coefficient is positive for coercive wells") {
  Rng rng(23);
  CHECK(dissipativity_coefficient(gaussian_well(1.0), 2.0, 64, rng) ==
        doctest::Approx(1.0).epsilon(1e-9));
  Rng rng2(23);
  // double well: <grad E, x>/||x||^2 on ||x|| = r equals r^2 - 1
  CHECK(dissipativity_coefficient(double_well(0.5), 2.0, 64, rng2) ==
        doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("langevin stationarity against the quadrature density") {
  EnergyModel m = double_well(0.5);
  Rng rng(3);
  auto samples = langevin_sample(m, {0.1}, 1e-3, 1000000, 100000, 10, rng);
  std::vector<double> xs(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) xs[i] = samples[i][0];
  DensityTable t = table_1d(m, -3.5, 3.5, 2001);
  std::vector<double> edges(51);
  for (int i = 0; i <= 50; ++i) edges[i] = -3.5 + 7.0 * i / 50;
  CHECK(tv_distance(xs, t, edges) < 0.05);
}

TEST_CASE("temperature scaling of OU variance is linear within 10%") {
  for (double temperature : {0.5, 1.0, 2.0}) {
    EnergyModel m = gaussian_well(temperature);
    Rng rng(31 + static_cast<std::uint64_t>(temperature * 2));
    auto s = langevin_sample(m, {0.0}, 1e-3, 10000000, 1000000, 10, rng);
    double mean = 0, var = 0;
    for (const Vec& x : s) mean += x[0];
    mean /= s.size();
    for (const Vec& x : s) var += (x[0] - mean) * (x[0] - mean);
    var /= (s.size() - 1);
    CHECK(var / temperature == doctest::Approx(1.0).epsilon(0.10));
  }
}

TEST_CASE("two-dimensional quadrature normalizes the gaussian") {
  EnergyModel m;
  m.dimension = 2;
  m.temperature = 1.0;
  m.energy = [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); };
  m.gradient = [](const Vec& x) { return x; };
  GridND grid{{Grid1D{-6, 6, 301}, Grid1D{-6, 6, 301}}};
  DensityTable t = gibbs_density(m, grid);
  // peak sits at 1/(2 pi)
  CHECK(t.value_at({150, 150}) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-3));
  // trapezoid-integrates back to one
  double total = 0;
  auto w = [](int i) { return (i == 0 || i == 300) ? 0.5 : 1.0; };
  double cell = 0.04 * 0.04;
  for (int i = 0; i <= 300; ++i)
    for (int j = 0; j <= 300; ++j) total += w(i) * w(j) * t.value_at({i, j}) * cell;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("csv exporters") {
  DensityTable t = table_1d(gaussian_well(1.0), -1, 1, 3);
  std::ostringstream os;
  write_density_csv(t, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,density");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);

  std::ostringstream ss;
  write_samples_csv({{0.5}, {-1.25}}, ss);
  CHECK(ss.str() == "x\n0.5\n-1.25\n");
}
