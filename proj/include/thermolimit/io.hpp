#pragma once

// Result tables and their serialized forms. CSV carries the data with a
// sidecar .meta.json; JSON carries columns-as-arrays plus the metadata object
// inline. Reals are written with 17 significant digits so parse(emit(t))
// reproduces every double bit-exactly; writes go through a temp file and a
// rename so a failed run never leaves a partial table behind.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "thermolimit/errors.hpp"
#include "thermolimit/hilbert.hpp"

namespace thermolimit {

// Numeric data uses real/integer/complex; text labels the rows of verdict and
// validation tables.
enum class ColumnType { Real, Integer, Complex, Text };

struct Column {
    std::string name;
    ColumnType type = ColumnType::Real;
    bool operator==(const Column&) const = default;
};

using Cell = std::variant<double, long long, Complex, std::string>;

struct ResultTable {
    std::string name;  // "<experiment>-<stage>", also the file stem
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    std::string config_echo;  // raw config text, preserved byte-exactly
    std::string version;
    std::string wall_clock;   // excluded from determinism comparisons

    bool operator==(const ResultTable&) const = default;

    void push_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw InvalidSpec("ResultTable: row width != column count");
        for (std::size_t i = 0; i < row.size(); ++i) {
            const bool ok =
                (columns[i].type == ColumnType::Real && std::holds_alternative<double>(row[i])) ||
                (columns[i].type == ColumnType::Integer &&
                 std::holds_alternative<long long>(row[i])) ||
                (columns[i].type == ColumnType::Complex &&
                 std::holds_alternative<Complex>(row[i])) ||
                (columns[i].type == ColumnType::Text &&
                 std::holds_alternative<std::string>(row[i]));
            if (!ok) throw InvalidSpec("ResultTable: cell type does not match column type");
        }
        rows.push_back(std::move(row));
    }
};

enum class OutputFormat { Csv, Json };

namespace detail {

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Expand complex columns into _re/_im pairs; shared by both formats.
inline std::vector<std::pair<std::string, ColumnType>> flat_columns(const ResultTable& t) {
    std::vector<std::pair<std::string, ColumnType>> out;
    for (const Column& c : t.columns) {
        if (c.type == ColumnType::Complex) {
            out.emplace_back(c.name + "_re", ColumnType::Real);
            out.emplace_back(c.name + "_im", ColumnType::Real);
        } else {
            out.emplace_back(c.name, c.type);
        }
    }
    return out;
}

inline std::vector<std::string> flat_row(const ResultTable& t, const std::vector<Cell>& row) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        switch (t.columns[i].type) {
            case ColumnType::Real:
                out.push_back(format_real(std::get<double>(row[i])));
                break;
            case ColumnType::Integer:
                out.push_back(std::to_string(std::get<long long>(row[i])));
                break;
            case ColumnType::Complex: {
                Complex z = std::get<Complex>(row[i]);
                out.push_back(format_real(z.real()));
                out.push_back(format_real(z.imag()));
                break;
            }
            case ColumnType::Text:
                out.push_back(std::get<std::string>(row[i]));
                break;
        }
    }
    return out;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoFailure("cannot open " + tmp.string());
        out << content;
        if (!out.flush()) throw IoFailure("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoFailure("rename failed for " + path.string() + ": " + ec.message());
}

inline nlohmann::json real_to_json(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline double real_from_json(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw IoFailure("malformed real value in JSON table");
}

inline nlohmann::json metadata_json(const ResultTable& t) {
    return nlohmann::json{{"config", t.config_echo},
                          {"version", t.version},
                          {"wall_clock", t.wall_clock}};
}

}  // namespace detail

/// Writes the table under `dir` and returns the data-file path.
/// CSV: <name>.csv plus <name>.meta.json. JSON: everything in <name>.json.
inline std::filesystem::path emit(const ResultTable& table, OutputFormat format,
                                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto flat = detail::flat_columns(table);

    if (format == OutputFormat::Csv) {
        std::ostringstream csv;
        for (std::size_t i = 0; i < flat.size(); ++i)
            csv << (i ? "," : "") << detail::csv_quote(flat[i].first);
        csv << "\r\n";
        for (const auto& row : table.rows) {
            const auto cells = detail::flat_row(table, row);
            for (std::size_t i = 0; i < cells.size(); ++i)
                csv << (i ? "," : "") << detail::csv_quote(cells[i]);
            csv << "\r\n";
        }
        // Column types ride along in the metadata so parsing recovers them.
        nlohmann::json meta = detail::metadata_json(table);
        nlohmann::json cols = nlohmann::json::array();
        for (const Column& c : table.columns)
            cols.push_back({{"name", c.name},
                            {"type", c.type == ColumnType::Real      ? "real"
                                     : c.type == ColumnType::Integer ? "integer"
                                     : c.type == ColumnType::Complex ? "complex"
                                                                     : "text"}});
        meta["columns"] = cols;

        const auto data_path = dir / (table.name + ".csv");
        detail::atomic_write(data_path, csv.str());
        detail::atomic_write(dir / (table.name + ".meta.json"), meta.dump(2) + "\n");
        return data_path;
    }

    nlohmann::json doc;
    doc["metadata"] = detail::metadata_json(table);
    nlohmann::json cols = nlohmann::json::object();
    nlohmann::json order = nlohmann::json::array();
    std::vector<nlohmann::json> arrays(flat.size(), nlohmann::json::array());
    for (const auto& row : table.rows) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            switch (table.columns[i].type) {
                case ColumnType::Real:
                    arrays[k++].push_back(detail::real_to_json(std::get<double>(row[i])));
                    break;
                case ColumnType::Integer:
                    arrays[k++].push_back(std::get<long long>(row[i]));
                    break;
                case ColumnType::Complex: {
                    Complex z = std::get<Complex>(row[i]);
                    arrays[k++].push_back(detail::real_to_json(z.real()));
                    arrays[k++].push_back(detail::real_to_json(z.imag()));
                    break;
                }
                case ColumnType::Text:
                    arrays[k++].push_back(std::get<std::string>(row[i]));
                    break;
            }
        }
    }
    for (std::size_t i = 0; i < flat.size(); ++i) {
        cols[flat[i].first] = arrays[i];
        order.push_back(flat[i].first);
    }
    doc["columns"] = cols;
    doc["column_order"] = order;
    nlohmann::json types = nlohmann::json::array();
    for (const Column& c : table.columns)
        types.push_back({{"name", c.name},
                         {"type", c.type == ColumnType::Real      ? "real"
                                  : c.type == ColumnType::Integer ? "integer"
                                  : c.type == ColumnType::Complex ? "complex"
                                                                  : "text"}});
    doc["column_types"] = types;

    const auto data_path = dir / (table.name + ".json");
    detail::atomic_write(data_path, doc.dump(2) + "\n");
    return data_path;
}

namespace detail {

inline std::vector<std::string> parse_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline ColumnType column_type_from_string(const std::string& s) {
    if (s == "real") return ColumnType::Real;
    if (s == "integer") return ColumnType::Integer;
    if (s == "complex") return ColumnType::Complex;
    if (s == "text") return ColumnType::Text;
    throw IoFailure("unknown column type: " + s);
}

}  // namespace detail

/// Inverse of emit for either format. `data_path` is the path emit returned.
inline ResultTable parse(const std::filesystem::path& data_path) {
    ResultTable table;
    table.name = data_path.stem().string();

    if (data_path.extension() == ".csv") {
        const auto meta_path =
            data_path.parent_path() / (data_path.stem().string() + ".meta.json");
        std::ifstream meta_in(meta_path);
        if (!meta_in) throw IoFailure("missing metadata file " + meta_path.string());
        nlohmann::json meta = nlohmann::json::parse(meta_in);
        table.config_echo = meta.at("config").get<std::string>();
        table.version = meta.at("version").get<std::string>();
        table.wall_clock = meta.at("wall_clock").get<std::string>();
        for (const auto& c : meta.at("columns"))
            table.columns.push_back({c.at("name").get<std::string>(),
                                     detail::column_type_from_string(c.at("type"))});

        std::ifstream in(data_path, std::ios::binary);
        if (!in) throw IoFailure("cannot open " + data_path.string());
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (header) {
                header = false;
                continue;
            }
            const auto fields = detail::parse_csv_record(line);
            std::vector<Cell> row;
            std::size_t k = 0;
            for (const Column& c : table.columns) {
                switch (c.type) {
                    case ColumnType::Real:
                        row.emplace_back(std::strtod(fields.at(k++).c_str(), nullptr));
                        break;
                    case ColumnType::Integer:
                        row.emplace_back(static_cast<long long>(
                            std::strtoll(fields.at(k++).c_str(), nullptr, 10)));
                        break;
                    case ColumnType::Complex: {
                        double re = std::strtod(fields.at(k++).c_str(), nullptr);
                        double im = std::strtod(fields.at(k++).c_str(), nullptr);
                        row.emplace_back(Complex(re, im));
                        break;
                    }
                    case ColumnType::Text:
                        row.emplace_back(fields.at(k++));
                        break;
                }
            }
            table.rows.push_back(std::move(row));
        }
        return table;
    }

    std::ifstream in(data_path);
    if (!in) throw IoFailure("cannot open " + data_path.string());
    nlohmann::json doc = nlohmann::json::parse(in);
    const auto& meta = doc.at("metadata");
    table.config_echo = meta.at("config").get<std::string>();
    table.version = meta.at("version").get<std::string>();
    table.wall_clock = meta.at("wall_clock").get<std::string>();
    for (const auto& c : doc.at("column_types"))
        table.columns.push_back(
            {c.at("name").get<std::string>(), detail::column_type_from_string(c.at("type"))});

    const auto& cols = doc.at("columns");
    std::size_t nrows = 0;
    if (!table.columns.empty()) {
        const auto flat = detail::flat_columns(table);
        nrows = cols.at(flat.front().first).size();
    }
    for (std::size_t r = 0; r < nrows; ++r) {
        std::vector<Cell> row;
        for (const Column& c : table.columns) {
            switch (c.type) {
                case ColumnType::Real:
                    row.emplace_back(detail::real_from_json(cols.at(c.name).at(r)));
                    break;
                case ColumnType::Integer:
                    row.emplace_back(cols.at(c.name).at(r).get<long long>());
                    break;
                case ColumnType::Complex: {
                    double re = detail::real_from_json(cols.at(c.name + "_re").at(r));
                    double im = detail::real_from_json(cols.at(c.name + "_im").at(r));
                    row.emplace_back(Complex(re, im));
                    break;
                }
                case ColumnType::Text:
                    row.emplace_back(cols.at(c.name).at(r).get<std::string>());
                    break;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace thermolimit
