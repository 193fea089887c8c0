#pragma once

#include <filesystem>
#include <string>

#include "mfg/grid.hpp"

namespace mfg {

enum class FieldKind { Cell, FaceAxis0, FaceAxis1 };

std::string field_kind_name(FieldKind k);

// Fields are stored as raw little-endian 64-bit floats, row-major (last axis
// fastest), with a text sidecar `<path>.meta` carrying dim, extents, cells,
// kind and an FNV-1a checksum of the payload bytes.
void write_field(const std::filesystem::path& path, const Grid& g, FieldKind kind,
                 const std::vector<double>& values);

// Reads and validates a field against the expected grid and kind. Throws
// IoError on missing files, header mismatch, or checksum failure.
std::vector<double> read_field(const std::filesystem::path& path, const Grid& g,
                               FieldKind kind);

void write_cell_field(const std::filesystem::path& path, const Grid& g,
                      const CellField& f);
CellField read_cell_field(const std::filesystem::path& path, const Grid& g);

// One file per axis: `<stem>_axis<k>.f64` next to `path`.
void write_face_field(const std::filesystem::path& path, const Grid& g,
                      const FaceField& f);
FaceField read_face_field(const std::filesystem::path& path, const Grid& g);

std::uint64_t fnv1a64(const void* data, size_t bytes);

}  // namespace mfg
