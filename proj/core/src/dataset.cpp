#include "dofid/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace dofid {

std::optional<DatasetFormat> parse_dataset_format(std::string_view name) {
  if (name == "generic") return DatasetFormat::Generic;
  if (name == "kitsune_csv" || name == "kitsune") return DatasetFormat::KitsuneCsv;
  if (name == "botiot_csv" || name == "botiot") return DatasetFormat::BotIotCsv;
  return std::nullopt;
}

std::string_view dataset_format_name(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Generic: return "generic";
    case DatasetFormat::KitsuneCsv: return "kitsune_csv";
    case DatasetFormat::BotIotCsv: return "botiot_csv";
  }
  return "?";
}

ColumnMap default_columns(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Generic: return {"0", "1", "2"};
    case DatasetFormat::KitsuneCsv: return {"timestamp", "length", "label"};
    case DatasetFormat::BotIotCsv: return {"stime", "bytes", "attack"};
  }
  return {};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint8_t> to_label(std::string_view s) {
  if (auto v = to_double(s)) {
    if (*v == 0.0) return 0;
    if (*v == 1.0) return 1;
    return std::nullopt;
  }
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "benign" || lower == "normal") return 0;
  if (lower == "malicious" || lower == "attack") return 1;
  return std::nullopt;
}

bool is_index(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::size_t resolve(const std::string& spec, const std::vector<std::string_view>& header) {
  if (is_index(spec)) return static_cast<std::size_t>(std::stoul(spec));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == spec) return i;
  }
  throw DataError("column '" + spec + "' not found in header");
}

}  // namespace

LoadResult parse_dataset(std::istream& in, const LoadOptions& opts) {
  ColumnMap cols = default_columns(opts.format);
  if (!opts.columns.time.empty()) cols.time = opts.columns.time;
  if (!opts.columns.length.empty()) cols.length = opts.columns.length;
  if (!opts.columns.label.empty()) cols.label = opts.columns.label;

  LoadResult res;
  std::string line;
  std::string header_line;
  bool first = true;
  std::size_t it = 0, il = 1, ib = 2;
  bool resolved = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (first) {
      first = false;
      if (!to_double(fields[0])) {
        // non-numeric first field: header line
        header_line = line;
        const auto header = split(header_line);
        it = resolve(cols.time, header);
        il = resolve(cols.length, header);
        ib = resolve(cols.label, header);
        resolved = true;
        continue;
      }
    }
    if (!resolved) {
      const std::vector<std::string_view> none;
      it = resolve(cols.time, none);
      il = resolve(cols.length, none);
      ib = resolve(cols.label, none);
      resolved = true;
    }
    ++res.rows;
    const std::size_t need = std::max({it, il, ib});
    if (fields.size() <= need) {
      ++res.malformed;
      continue;
    }
    const auto t = to_double(fields[it]);
    const auto len = to_double(fields[il]);
    const auto label = to_label(fields[ib]);
    if (!t || !len || !label || *len < 1.0 || *len != std::floor(*len)) {
      ++res.malformed;
      continue;
    }
    res.packets.push_back({*t, static_cast<std::uint32_t>(*len), *label});
  }
  if (res.rows > 0 &&
      static_cast<double>(res.malformed) > opts.max_malformed * static_cast<double>(res.rows)) {
    throw DataError("too many malformed rows: " + std::to_string(res.malformed) + " of " +
                    std::to_string(res.rows));
  }
  std::stable_sort(res.packets.begin(), res.packets.end(),
                   [](const PacketRecord& a, const PacketRecord& b) { return a.t < b.t; });
  if (!res.packets.empty()) {
    const double t0 = res.packets.front().t;
    for (auto& p : res.packets) p.t -= t0;
  }
  if (opts.flip) res.packets = flip_time_axis(res.packets);
  return res;
}

LoadResult load_dataset(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open packet file: " + path);
  return parse_dataset(in, opts);
}

void write_generic_csv(std::ostream& out, std::span<const PacketRecord> packets) {
  out << "timestamp_seconds,length_bytes,label\n";
  char buf[64];
  for (const auto& p : packets) {
    std::snprintf(buf, sizeof buf, "%.9f,%u,%u\n", p.t, p.len, static_cast<unsigned>(p.label));
    out << buf;
  }
}

}  // namespace dofid
