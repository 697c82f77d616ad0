#include "wbomd/csvio.hpp"

#include <cstdio>
#include <stdexcept>

namespace wbomd {

std::string format_full(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view provenance)
    : out_(path, std::ios::binary | std::ios::trunc)
{
    if (!out_)
        throw std::runtime_error("CsvWriter: cannot open " + path.string());
    out_ << "# " << provenance << "\n";
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::header(std::initializer_list<std::string_view> columns)
{
    bool first = true;
    for (auto col : columns) {
        if (!first)
            out_ << ',';
        out_ << col;
        first = false;
    }
    out_ << "\n";
}

void CsvWriter::row(std::span<const double> values)
{
    bool first = true;
    for (double v : values) {
        if (!first)
            out_ << ',';
        out_ << format_full(v);
        first = false;
    }
    out_ << "\n";
}

void CsvWriter::row(std::initializer_list<double> values)
{
    row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::labeled_row(std::string_view label, std::span<const double> values)
{
    out_ << label;
    for (double v : values)
        out_ << ',' << format_full(v);
    out_ << "\n";
}

} // namespace wbomd
