#include "dofid/metrics.hpp"

#include <cstdio>

#include "dofid/orchestrator.hpp"

namespace dofid {

Metrics compute_metrics(std::span<const std::uint8_t> decisions,
                        std::span<const std::uint8_t> truths) {
  if (decisions.size() != truths.size()) {
    throw std::invalid_argument("compute_metrics: decision and truth sequences differ in length");
  }
  Metrics m;
  auto& c = m.confusion;
  for (std::size_t k = 0; k < decisions.size(); ++k) {
    const bool y = decisions[k] != 0;
    const bool g = truths[k] != 0;
    if (y && g) ++c.tp;
    else if (!y && !g) ++c.tn;
    else if (y) ++c.fp;
    else ++c.fn;
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.tpr = ratio(c.tp, c.tp + c.fn);
  m.tnr = ratio(c.tn, c.tn + c.fp);
  return m;
}

TimingSummary aggregate_timings(std::span<const WindowRecord> records) {
  TimingSummary s;
  for (const auto& r : records) {
    if (r.warmup || r.frozen) continue;
    s.learn_us += r.learn_us;
    s.update_us += r.update_us;
    s.refit_us += r.refit_us;
    s.detect_us += r.detect_us;
    ++s.windows;
  }
  if (s.windows > 0) {
    const auto n = static_cast<double>(s.windows);
    s.learn_us /= n;
    s.update_us /= n;
    s.refit_us /= n;
    s.detect_us /= n;
  }
  return s;
}

std::string format_ratio(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace dofid
