#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wbomd {

inline constexpr std::string_view kCoreVersion = "0.1.0";

/// Round-trip formatting of a double: 17 significant digits, enough to
/// reconstruct the exact bit pattern when parsed back.
std::string format_full(double value);

/// FNV-1a 64-bit hash; stable across platforms and builds, used to stamp
/// output files with a digest of the run configuration.
std::uint64_t fnv1a64(std::string_view data);

std::string to_hex(std::uint64_t value);

/// CSV emitter: one provenance comment line, one header row, then data rows
/// with full-precision numeric formatting.  Output is a pure function of the
/// written values, so identical runs produce byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view provenance);
    ~CsvWriter();

    void header(std::initializer_list<std::string_view> columns);
    void row(std::span<const double> values);
    void row(std::initializer_list<double> values);
    /// Mixed row: first cell verbatim (label), remaining cells numeric.
    void labeled_row(std::string_view label, std::span<const double> values);

private:
    std::ofstream out_;
};

} // namespace wbomd
