#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

#include "aiedet/montecarlo.hpp"

namespace aiedet {

Interval wilson_interval(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0) return {0.0, 1.0};
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (phat + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, std::min(centre - half, phat)), std::min(1.0, std::max(centre + half, phat))};
}

CountBand binomial_band(std::size_t n, double p, double level) {
  if (!(p > 0.0 && p < 1.0) || n == 0) {
    throw InvalidParameter("binomial_band: need n > 0 and 0 < p < 1");
  }
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  const double tail = 0.5 * (1.0 - level);
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(mean * (1.0 - p));

  auto smallest_reaching = [&](double target) {
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(mean - 10.0 * sd - 1.0)));
    while (k < n && boost::math::cdf(dist, static_cast<double>(k)) < target) ++k;
    return k;
  };
  return {smallest_reaching(tail), smallest_reaching(1.0 - tail)};
}

}  // namespace aiedet
