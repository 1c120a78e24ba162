#pragma once

#include "secuav/geometry.hpp"
#include "secuav/scenario.hpp"

namespace secuav {

enum class ColludeMode { NonColluding, Colluding };

const char* to_string(ColludeMode mode);
ColludeMode parse_mode(std::string_view text);

/// One quasi-stationary decision.
struct Placement {
  Vec2 q;
  double z = 0.0;
  double p = 0.0;  // mW
};

/// beta0 / (sigma2 · (‖q−w‖² + z²)^(alpha/2)), per mW.
double link_gain(const Scenario& s, Vec2 q, double z, Vec2 w);

/// Receiver-combined (MRC) SNR at the legitimate receivers.
double legit_snr(const Scenario& s, Vec2 q, double z, double p);

/// Strongest single eavesdropper (non-colluding) or combined (colluding).
double eav_snr(const Scenario& s, Vec2 q, double z, double p, ColludeMode mode);

enum class Clamp { Positive, None };

/// [log2(1+γ_b) − log2(1+γ_e)]^+, or the unclamped difference.
double secrecy_rate(const Scenario& s, Vec2 q, double z, double p, ColludeMode mode,
                    Clamp clamp = Clamp::Positive);

/// log2(1 + x) accurate near zero.
double log2_1p(double x);

inline double secrecy_rate(const Scenario& s, const Placement& pl, ColludeMode mode,
                           Clamp clamp = Clamp::Positive) {
  return secrecy_rate(s, pl.q, pl.z, pl.p, mode, clamp);
}

}  // namespace secuav
