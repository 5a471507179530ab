// serialize.cpp
#include "idyll/serialize.hpp"

#include "idyll/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace idyll {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void emit(std::ostringstream& os, const json& v, int depth) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (v.type()) {
    case json::value_t::object: {
        if (v.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            emit(os, it.value(), depth + 1);
        }
        os << "\n" << close << "}";
        return;
    }
    case json::value_t::array: {
        if (v.empty()) {
            os << "[]";
            return;
        }
        // arrays of scalars stay on one line
        bool flat = true;
        for (const auto& e : v) flat = flat && !e.is_structured();
        if (flat) {
            os << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ", ";
                emit(os, v[i], depth + 1);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            emit(os, v[i], depth + 1);
        }
        os << "\n" << close << "]";
        return;
    }
    case json::value_t::number_float: {
        const double x = v.get<double>();
        os << (std::isfinite(x) ? format_double(x) : "null");
        return;
    }
    default:
        os << v.dump();
    }
}

}  // namespace

std::string dump_json(const json& value) {
    std::ostringstream os;
    emit(os, value, 0);
    os << "\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw ConfigError("write to " + path.string() + " failed");
}

void write_json(const std::filesystem::path& path, const json& value) { write_text(path, dump_json(value)); }

std::string CsvTable::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw NumericalError("CSV row width does not match the header");
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << "\n";
    }
    return os.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.str()); }

CsvTable field_csv(const PeriodicGrid1D& grid, const std::vector<std::string>& names,
                   const std::vector<Eigen::VectorXd>& values) {
    if (names.size() != values.size()) throw ConfigError("field_csv: names and values differ in count");
    CsvTable t;
    t.columns = {"index", "y"};
    t.columns.insert(t.columns.end(), names.begin(), names.end());
    for (int j = 0; j < grid.n(); ++j) {
        std::vector<double> row{static_cast<double>(j), grid.node(j)};
        for (const auto& v : values) {
            if (v.size() != grid.n()) throw ConfigError("field_csv: sample count does not match the grid");
            row.push_back(v[j]);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

json field_json(const PeriodicGrid1D& grid, const Eigen::VectorXd& values) {
    if (values.size() != grid.n()) throw ConfigError("field_json: sample count does not match the grid");
    return json{{"grid", {{"n", grid.n()}, {"length", grid.length()}}},
                {"data", std::vector<double>(values.data(), values.data() + values.size())}};
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace idyll
