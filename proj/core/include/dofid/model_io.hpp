#pragma once

#include <iosfwd>
#include <string>

#include "dofid/drnn.hpp"

namespace dofid {

/// A detector together with the activation parameters it was trained under.
struct ModelDocument {
  DrnnParams params;
  IdsModel model;
};

/// JSON text with explicit shapes and row-major entries. Doubles are written in
/// shortest round-trip form, so parse(serialize(m)) reproduces every bit.
std::string serialize_model(const ModelDocument& doc, int indent = -1);
ModelDocument parse_model(const std::string& text);

void write_model(std::ostream& os, const ModelDocument& doc);
ModelDocument read_model(std::istream& is);

}  // namespace dofid
