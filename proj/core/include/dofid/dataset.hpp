#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dofid/traffic.hpp"

namespace dofid {

enum class DatasetFormat { Generic, KitsuneCsv, BotIotCsv };

std::optional<DatasetFormat> parse_dataset_format(std::string_view name);
std::string_view dataset_format_name(DatasetFormat f);

/// Source column for each record field: a header name, or a zero-based index
/// written as digits. Empty fields take the format's default.
struct ColumnMap {
  std::string time;
  std::string length;
  std::string label;
};

/// Defaults: generic "0","1","2"; kitsune_csv "timestamp","length","label";
/// botiot_csv "stime","bytes","attack".
ColumnMap default_columns(DatasetFormat f);

struct LoadOptions {
  DatasetFormat format = DatasetFormat::Generic;
  bool flip = false;
  ColumnMap columns;            // merged over default_columns(format)
  double max_malformed = 0.01;  // fraction of data rows
};

struct LoadResult {
  std::vector<PacketRecord> packets;  // sorted, times shifted so the first is 0
  std::size_t malformed = 0;
  std::size_t rows = 0;
};

/// Reads a comma-separated packet file. Malformed rows are skipped and counted;
/// more than `max_malformed` of them is a DataError, as is an unreadable file.
LoadResult load_dataset(const std::string& path, const LoadOptions& opts = {});
LoadResult parse_dataset(std::istream& in, const LoadOptions& opts = {});

/// Writes the generic three-column form with a header line.
void write_generic_csv(std::ostream& out, std::span<const PacketRecord> packets);

}  // namespace dofid
