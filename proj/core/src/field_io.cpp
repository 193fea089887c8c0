#include "mfg/field_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace mfg {

std::uint64_t fnv1a64(const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string field_kind_name(FieldKind k) {
    switch (k) {
        case FieldKind::Cell: return "cell";
        case FieldKind::FaceAxis0: return "face-axis-0";
        case FieldKind::FaceAxis1: return "face-axis-1";
    }
    return "?";
}

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

size_t expected_count(const Grid& g, FieldKind kind) {
    switch (kind) {
        case FieldKind::Cell: return static_cast<size_t>(g.total_cells());
        case FieldKind::FaceAxis0: return static_cast<size_t>(g.face_count(0));
        case FieldKind::FaceAxis1: return static_cast<size_t>(g.face_count(1));
    }
    return 0;
}

std::map<std::string, std::string> parse_meta(const std::filesystem::path& meta_path) {
    std::ifstream in(meta_path);
    if (!in) throw IoError("cannot open " + meta_path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace

void write_field(const std::filesystem::path& path, const Grid& g, FieldKind kind,
                 const std::vector<double>& values) {
    if (values.size() != expected_count(g, kind))
        throw IoError("field size does not match grid for " + path.string());

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out) throw IoError("short write to " + path.string());
    out.close();

    const std::uint64_t sum = fnv1a64(values.data(), values.size() * sizeof(double));
    std::ostringstream meta;
    meta << "dim = " << g.dim << "\n";
    meta << "extent =";
    for (int k = 0; k < g.dim; ++k) meta << " " << format_g17(g.extent[k]);
    meta << "\ncells =";
    for (int k = 0; k < g.dim; ++k) meta << " " << g.cells[k];
    meta << "\nkind = " << field_kind_name(kind) << "\n";
    char sumbuf[32];
    std::snprintf(sumbuf, sizeof(sumbuf), "%016" PRIx64, sum);
    meta << "checksum = " << sumbuf << "\n";

    std::ofstream mo(path.string() + ".meta");
    if (!mo) throw IoError("cannot write " + path.string() + ".meta");
    mo << meta.str();
}

std::vector<double> read_field(const std::filesystem::path& path, const Grid& g,
                               FieldKind kind) {
    if (!std::filesystem::exists(path)) throw IoError("missing field file " + path.string());
    const auto kv = parse_meta(path.string() + ".meta");

    auto require = [&](const std::string& key, const std::string& want) {
        auto it = kv.find(key);
        if (it == kv.end() || it->second != want)
            throw IoError(path.string() + ".meta: bad or missing '" + key + "' (want " +
                          want + ")");
    };
    require("dim", std::to_string(g.dim));
    require("kind", field_kind_name(kind));
    {
        std::ostringstream want;
        for (int k = 0; k < g.dim; ++k) want << (k ? " " : "") << g.cells[k];
        require("cells", want.str());
    }

    const size_t count = expected_count(g, kind);
    std::ifstream in(path, std::ios::binary);
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != count * sizeof(double))
        throw IoError("short read from " + path.string());
    char extra;
    if (in.read(&extra, 1)) throw IoError(path.string() + " larger than expected");

    char sumbuf[32];
    std::snprintf(sumbuf, sizeof(sumbuf), "%016" PRIx64,
                  fnv1a64(values.data(), values.size() * sizeof(double)));
    auto it = kv.find("checksum");
    if (it == kv.end() || it->second != sumbuf)
        throw IoError("checksum mismatch for " + path.string());
    return values;
}

void write_cell_field(const std::filesystem::path& path, const Grid& g,
                      const CellField& f) {
    write_field(path, g, FieldKind::Cell, f);
}

CellField read_cell_field(const std::filesystem::path& path, const Grid& g) {
    return read_field(path, g, FieldKind::Cell);
}

namespace {
std::filesystem::path axis_path(const std::filesystem::path& path, int axis) {
    std::filesystem::path p = path;
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + "_axis" + std::to_string(axis) + ext;
}
}  // namespace

void write_face_field(const std::filesystem::path& path, const Grid& g,
                      const FaceField& f) {
    for (int k = 0; k < g.dim; ++k)
        write_field(axis_path(path, k), g,
                    k == 0 ? FieldKind::FaceAxis0 : FieldKind::FaceAxis1, f.axis[k]);
}

FaceField read_face_field(const std::filesystem::path& path, const Grid& g) {
    FaceField f;
    for (int k = 0; k < g.dim; ++k)
        f.axis[k] = read_field(axis_path(path, k), g,
                               k == 0 ? FieldKind::FaceAxis0 : FieldKind::FaceAxis1);
    return f;
}

}  // namespace mfg
