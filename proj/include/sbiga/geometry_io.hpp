#pragma once

#include <filesystem>
#include <string>

#include "sbiga/geometry.hpp"

namespace sbiga::io {

/// The geometry document is a line-oriented text format (one `key values`
/// statement per line, `#` comments). Maps carry two knot vectors and an
/// m x n control grid in radial-major order; the `orientation` field says
/// whether radial rows run center-to-boundary (internal convention) or
/// boundary-to-center (the order reference tables are printed in); the
/// loader reverses the rows of boundary-to-center documents. Schema
/// violations raise SchemaError with the offending line number.

enum class DocumentType { Map, Curve };

/// Reads just enough of the document to learn its type.
DocumentType peek_type(const std::filesystem::path& path);

GeometryMap read_map(const std::filesystem::path& path);
CurveGeometry read_curve(const std::filesystem::path& path);

/// Writers emit 17 significant digits, so a write/read round trip
/// reproduces every numeric field bit-exactly.
void write_map(const std::filesystem::path& path, const GeometryMap& map,
               const std::string& kind = "");
void write_curve(const std::filesystem::path& path, const CurveGeometry& curve,
                 const std::string& kind = "");

}  // namespace sbiga::io
