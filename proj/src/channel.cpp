#include "secuav/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "secuav/errors.hpp"

namespace secuav {

const char* to_string(ColludeMode mode) {
  return mode == ColludeMode::NonColluding ? "noncolluding" : "colluding";
}

ColludeMode parse_mode(std::string_view text) {
  if (text == "noncolluding") return ColludeMode::NonColluding;
  if (text == "colluding") return ColludeMode::Colluding;
  throw ValidationError("unknown eavesdropper mode '" + std::string(text) + "'");
}

double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }

double link_gain(const Scenario& s, Vec2 q, double z, Vec2 w) {
  const double d2 = squared_norm(q - w) + z * z;
  // alpha = 2 is the common case; skip pow.
  const double d_alpha = s.alpha == 2.0 ? d2 : std::pow(d2, 0.5 * s.alpha);
  return s.beta0 / (s.sigma2 * d_alpha);
}

double legit_snr(const Scenario& s, Vec2 q, double z, double p) {
  double sum = 0.0;
  for (const auto& w : s.gr_positions) sum += link_gain(s, q, z, w);
  return sum * p;
}

double eav_snr(const Scenario& s, Vec2 q, double z, double p, ColludeMode mode) {
  double acc = 0.0;
  for (const auto& w : s.eav_positions) {
    const double g = link_gain(s, q, z, w);
    acc = mode == ColludeMode::NonColluding ? std::max(acc, g) : acc + g;
  }
  return acc * p;
}

double secrecy_rate(const Scenario& s, Vec2 q, double z, double p, ColludeMode mode, Clamp clamp) {
  const double r = log2_1p(legit_snr(s, q, z, p)) - log2_1p(eav_snr(s, q, z, p, mode));
  return clamp == Clamp::Positive ? std::max(r, 0.0) : r;
}

}  // namespace secuav
