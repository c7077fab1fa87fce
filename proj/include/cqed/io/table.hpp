// table.hpp - result tables and their CSV / JSON serialization.
//
// CSV: ',' separator, '.' decimal point, LF line endings, doubles printed
// with 17 significant digits via std::to_chars (locale independent, exact
// round trip). NaN is rejected; non-numeric outcomes go in as text flags.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cqed::io {

enum class ColumnType { real, integer, flag, text };

struct Column {
    std::string name;
    ColumnType type = ColumnType::real;
    bool energy = false;  // rescaled by the output energy unit
};

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Metadata {
    std::string version;
    std::string command;
    std::string config_hash;
    double wall_time_s = 0.0;
};

class ResultTable {
public:
    ResultTable() = default;
    explicit ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

    [[nodiscard]] const std::vector<Column>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    Metadata& metadata() noexcept { return meta_; }
    [[nodiscard]] const Metadata& metadata() const noexcept { return meta_; }

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns_.size()) {
            throw std::invalid_argument("ResultTable: row has " + std::to_string(row.size()) +
                                        " cells, schema has " + std::to_string(columns_.size()));
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (const auto* d = std::get_if<double>(&row[i]); d && std::isnan(*d)) {
                throw std::domain_error("ResultTable: NaN in column '" + columns_[i].name +
                                        "'; use a flag instead");
            }
        }
        rows_.push_back(std::move(row));
    }

    /// Divides real cells of energy columns by `unit`.
    void rescale_energies(double unit) {
        if (!(unit > 0.0) || !std::isfinite(unit)) {
            throw std::invalid_argument("rescale_energies: unit must be positive and finite");
        }
        for (auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (!columns_[i].energy) continue;
                if (auto* d = std::get_if<double>(&row[i])) *d /= unit;
            }
        }
    }

    [[nodiscard]] std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i].name == name) return i;
        }
        throw std::out_of_range("ResultTable: no column '" + std::string(name) + "'");
    }

    friend bool operator==(const ResultTable& a, const ResultTable& b) {
        if (a.columns_.size() != b.columns_.size() || a.rows_ != b.rows_) return false;
        for (std::size_t i = 0; i < a.columns_.size(); ++i) {
            if (a.columns_[i].name != b.columns_[i].name || a.columns_[i].type != b.columns_[i].type) return false;
        }
        return true;
    }

private:
    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
    Metadata meta_;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) throw std::domain_error("format_double: NaN is not serializable");
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf, res.ptr};
}

inline std::string format_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\n\r\"") != std::string::npos) {
                throw std::invalid_argument("CSV text cells may not contain ',', '\"' or line breaks");
            }
            return s;
        }
    };
    return std::visit(Visitor{}, c);
}

inline std::string to_csv(const ResultTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns().size(); ++i) {
        if (i) out += ',';
        out += t.columns()[i].name;
    }
    out += '\n';
    for (const auto& row : t.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline const char* to_string(ColumnType t) {
    switch (t) {
        case ColumnType::real: return "real";
        case ColumnType::integer: return "integer";
        case ColumnType::flag: return "flag";
        case ColumnType::text: return "text";
    }
    return "?";
}

inline nlohmann::json cell_to_json(const Cell& c) {
    struct Visitor {
        nlohmann::json operator()(double v) const {
            if (std::isnan(v)) throw std::domain_error("cell_to_json: NaN is not serializable");
            if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
            return v;
        }
        nlohmann::json operator()(std::int64_t v) const { return v; }
        nlohmann::json operator()(bool v) const { return v; }
        nlohmann::json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

inline nlohmann::json metadata_json(const Metadata& m) {
    return {{"version", m.version},
            {"command", m.command},
            {"config_hash", m.config_hash},
            {"wall_time_s", m.wall_time_s}};
}

inline nlohmann::json to_json(const ResultTable& t) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : t.columns()) cols.push_back({{"name", c.name}, {"type", to_string(c.type)}});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows()) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) r.push_back(cell_to_json(c));
        rows.push_back(std::move(r));
    }
    return {{"columns", cols}, {"rows", rows}};
}

namespace detail {

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline Cell parse_cell(const std::string& s, ColumnType type) {
    switch (type) {
        case ColumnType::real: {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return v;
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
            return s;
        }
        case ColumnType::integer: {
            std::int64_t v = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec == std::errc{} && res.ptr == s.data() + s.size()) return v;
            return s;
        }
        case ColumnType::flag:
            if (s == "true") return true;
            if (s == "false") return false;
            return s;
        case ColumnType::text:
            return s;
    }
    return s;
}

}  // namespace detail

/// Inverse of to_csv for a known schema; cells that do not parse as the
/// column type come back as text flags.
inline ResultTable parse_csv(std::string_view text, const std::vector<Column>& schema) {
    ResultTable t(schema);
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) throw std::invalid_argument("parse_csv: missing final line feed");
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        const auto fields = detail::split_line(line);
        if (fields.size() != schema.size()) throw std::invalid_argument("parse_csv: field count mismatch");
        if (header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] != schema[i].name) throw std::invalid_argument("parse_csv: header mismatch");
            }
            header = false;
            continue;
        }
        std::vector<Cell> row;
        for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(detail::parse_cell(fields[i], schema[i].type));
        t.add_row(std::move(row));
    }
    return t;
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace cqed::io
