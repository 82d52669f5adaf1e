#include "dofid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dofid {

void SynthSpec::validate(double duration) const {
  if (!(duration > 0.0)) throw ConfigError("synth: duration must be positive");
  if (!(rate > 0.0)) throw ConfigError("synth: rate must be positive");
  if (!(len_mean >= 1.0) || !(len_std >= 0.0)) throw ConfigError("synth: invalid length distribution");
  if (!(attack_rate_mult > 0.0) || !(attack_len_mult > 0.0)) {
    throw ConfigError("synth: attack multipliers must be positive");
  }
  double prev_end = 0.0;
  for (const auto& a : attacks) {
    if (!(a.start >= prev_end && a.end > a.start && a.end <= duration)) {
      throw ConfigError("synth: attack intervals must be ordered, disjoint and within the duration");
    }
    prev_end = a.end;
  }
}

std::vector<PacketRecord> synth_generate(const SynthSpec& spec, double duration) {
  spec.validate(duration);
  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  std::vector<PacketRecord> out;
  out.reserve(static_cast<std::size_t>(spec.rate * duration * 1.1) + 16);
  auto attack = spec.attacks.begin();
  double t = 0.0;
  while (t < duration) {
    while (attack != spec.attacks.end() && t >= attack->end) ++attack;
    const bool in_attack = attack != spec.attacks.end() && t >= attack->start;
    const double boundary = in_attack ? attack->end
                            : attack != spec.attacks.end() ? attack->start
                                                           : duration;
    const double rate = in_attack ? spec.rate * spec.attack_rate_mult : spec.rate;
    const double dt = unit_exp(rng) / rate;
    if (t + dt >= boundary) {
      // memoryless: restart the arrival clock at the rate change
      t = boundary;
      continue;
    }
    t += dt;
    const double scale = in_attack ? spec.attack_len_mult : 1.0;
    const double len = std::round(scale * (spec.len_mean + spec.len_std * unit_normal(rng)));
    out.push_back({t, static_cast<std::uint32_t>(std::max(1.0, len)), in_attack ? std::uint8_t{1} : std::uint8_t{0}});
  }
  return out;
}

}  // namespace dofid
