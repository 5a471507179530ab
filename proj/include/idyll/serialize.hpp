// serialize.hpp
// JSON and CSV writers. Every floating-point value is written with 17
// significant digits; object keys come out sorted, so equal payloads are
// byte-identical.
#pragma once

#include "idyll/fields.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace idyll {

using json = nlohmann::json;

/// "%.17g"; NaN and infinities become "nan", "inf", "-inf".
std::string format_double(double x);

/// Pretty-printed JSON (2-space indent) with 17-digit floats; non-finite
/// numbers are written as null.
std::string dump_json(const json& value);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& value);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string str() const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Field samples: columns (index, y, value...) and the {grid, data} envelope.
CsvTable field_csv(const PeriodicGrid1D& grid, const std::vector<std::string>& names,
                   const std::vector<Eigen::VectorXd>& values);
json field_json(const PeriodicGrid1D& grid, const Eigen::VectorXd& values);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace idyll
