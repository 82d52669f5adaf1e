#pragma once

#include <vector>

#include "dofid/traffic.hpp"

namespace dofid {

struct AttackInterval {
  double start = 0.0;  // seconds, inclusive
  double end = 0.0;    // seconds, exclusive
};

/// Poisson benign traffic with normally distributed lengths; inside each attack
/// interval the rate and the length distribution are scaled and every packet is
/// labeled malicious.
struct SynthSpec {
  double rate = 10.0;        // benign packets per second
  double len_mean = 200.0;   // bytes
  double len_std = 50.0;
  std::vector<AttackInterval> attacks;
  double attack_rate_mult = 1.0;
  double attack_len_mult = 1.0;
  std::uint64_t seed = 1;

  void validate(double duration) const;
};

std::vector<PacketRecord> synth_generate(const SynthSpec& spec, double duration);

}  // namespace dofid
