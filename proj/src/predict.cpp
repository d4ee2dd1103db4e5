#include "combosim/predict.hpp"

#include <cmath>
#include <stdexcept>

#include "combosim/rng.hpp"

namespace combosim {

void MarkovBitModel::validate() const {
  if (std::abs(b) > 0.5) throw std::invalid_argument("|b| must be <= 0.5");
  if (std::abs(a) > 1.0) throw std::invalid_argument("|a| must be <= 1");
  const double t11 = p1_given_1();
  const double t10 = p1_given_0();
  if (t11 < 0 || t11 > 1 || t10 < 0 || t10 > 1)
    throw std::invalid_argument(
        "(b, a) imply transition probabilities outside [0, 1]");
}

double predict_deadtime_autocorr(Picos tau_d, Picos tau) {
  if (tau <= 0) throw std::invalid_argument("tau must be > 0");
  if (tau_d < 0) throw std::invalid_argument("tau_d must be >= 0");
  return std::expm1(-static_cast<double>(tau_d) / static_cast<double>(tau));
}

double predict_deadtime_autocorr_approx(Picos tau_d, Picos tau) {
  if (tau <= 0) throw std::invalid_argument("tau must be > 0");
  return -static_cast<double>(tau_d) / static_cast<double>(tau);
}

double predict_net_autocorr(const DeadTimeModel& model) {
  if (model.mean_period <= 0)
    throw std::invalid_argument("mean_period must be > 0");
  return model.afterpulse_prob - static_cast<double>(model.dead_time) /
                                     static_cast<double>(model.mean_period);
}

double predict_f0(double afterpulse_prob, Picos tau_d) {
  if (tau_d <= 0) throw std::invalid_argument("tau_d must be > 0");
  return afterpulse_prob / ps_to_sec(tau_d);
}

PairXorPrediction propagate_pairxor(const MarkovBitModel& m) {
  m.validate();
  const double b = m.b;
  const double a = m.a;
  const double pq = 0.25 - b * b;  // p(1) p(0)
  PairXorPrediction out;
  out.exact.b = -2.0 * b * b - 2.0 * a * pq;
  const double denom = 1.0 - 2.0 * (1.0 - a) * pq;  // = P(y = 0)
  if (denom == 0.0)
    throw std::invalid_argument("degenerate model: P(y=0) vanishes");
  out.exact.a = 2.0 * a * (1.0 - a) * b * b / denom;
  out.approx.b = -2.0 * b * b - 0.5 * a;
  out.approx.a = 4.0 * a * b * b;
  out.approx_valid = std::abs(a) <= 1e-2 && b * b <= 0.25 * 1e-2;
  return out;
}

MarkovBitModel propagate_xor(const MarkovBitModel& t,
                             const MarkovBitModel& y) {
  t.validate();
  y.validate();
  MarkovBitModel c;
  // XOR of independent streams flips the product bias: with u = 2x - 1,
  // u_C = -u_T u_Y and E[u] = 2b, so b_C = -2 b_T b_Y.
  c.b = -2.0 * t.b * y.b;
  c.a = t.a * y.a + 4.0 * (t.a * y.b * y.b + y.a * t.b * t.b);
  return c;
}

double required_sample_size(const MarkovBitModel& m, double z) {
  if (z <= 0) throw std::invalid_argument("z must be > 0");
  const bool has_b = m.b != 0.0;
  const bool has_a = m.a != 0.0;
  if (!has_b && !has_a)
    throw std::invalid_argument(
        "unbounded: a perfectly random model is never distinguishable");
  double n = std::numeric_limits<double>::infinity();
  if (has_b) {
    const double nb = (z / (2.0 * m.b)) * (z / (2.0 * m.b));
    n = std::min(n, std::max(1.0, std::ceil(nb)));
  }
  if (has_a) {
    const double na = (z / m.a) * (z / m.a) + 1.0;
    n = std::min(n, std::max(2.0, std::ceil(na)));
  }
  return n;
}

BitStream gen_markov_bits(const MarkovBitModel& m, std::uint64_t n,
                          std::uint64_t seed) {
  m.validate();
  BitStream bits(StreamLabel::X);
  Rng rng(seed);
  const double p1 = m.p1();
  const double t11 = m.p1_given_1();
  const double t10 = m.p1_given_0();
  bool prev = rng.bernoulli(p1);  // stationary start
  if (n > 0) bits.append(prev);
  for (std::uint64_t i = 1; i < n; ++i) {
    prev = rng.bernoulli(prev ? t11 : t10);
    bits.append(prev);
  }
  return bits;
}

}  // namespace combosim
