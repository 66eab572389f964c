#include "table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace survkit {

const char* column_kind_name(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Numeric: return "numeric";
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::Identifier: return "identifier";
    }
    return "unknown";
}

ColumnKind column_kind_from_name(const std::string& name) {
    if (name == "numeric") return ColumnKind::Numeric;
    if (name == "categorical") return ColumnKind::Categorical;
    if (name == "identifier") return ColumnKind::Identifier;
    fail(ErrorCode::Config, "unknown column kind '" + name + "'");
}

std::size_t Column::missing_count() const {
    std::size_t n = 0;
    for (auto m : missing) n += m != 0;
    return n;
}

const SchemaColumn* SchemaSpec::find(const std::string& name) const {
    for (const auto& [n, col] : columns) {
        if (n == name) return &col;
    }
    return nullptr;
}

SchemaSpec SchemaSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open schema file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

SchemaSpec SchemaSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::Config, std::string("schema JSON parse failure: ") + e.what());
    }
    SchemaSpec spec;
    require(j.contains("id_column"), ErrorCode::Config, "schema missing 'id_column'");
    spec.id_column = j.at("id_column").get<std::string>();
    require(j.contains("columns") && j.at("columns").is_array(), ErrorCode::Config,
            "schema missing 'columns' array");
    for (const auto& c : j.at("columns")) {
        SchemaColumn sc;
        const std::string name = c.at("name").get<std::string>();
        sc.kind = column_kind_from_name(c.at("kind").get<std::string>());
        if (c.contains("categories")) {
            std::vector<std::string> cats = c.at("categories").get<std::vector<std::string>>();
            std::set<std::string> seen(cats.begin(), cats.end());
            require(seen.size() == cats.size(), ErrorCode::Config,
                    "schema category list for '" + name + "' contains duplicates");
            sc.categories = std::move(cats);
        }
        spec.columns.emplace_back(name, std::move(sc));
    }
    if (!spec.find(spec.id_column)) {
        SchemaColumn idc;
        idc.kind = ColumnKind::Identifier;
        spec.columns.insert(spec.columns.begin(), {spec.id_column, idc});
    }
    return spec;
}

std::string SchemaSpec::to_json_text() const {
    nlohmann::ordered_json j;
    j["id_column"] = id_column;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& [name, col] : columns) {
        nlohmann::ordered_json c;
        c["name"] = name;
        c["kind"] = column_kind_name(col.kind);
        if (col.categories) c["categories"] = *col.categories;
        j["columns"].push_back(c);
    }
    return j.dump(2) + "\n";
}

TableFrame::TableFrame(std::vector<Column> columns, std::string id_column)
    : columns_(std::move(columns)), id_column_(std::move(id_column)) {
    require(!columns_.empty(), ErrorCode::Integrity, "TableFrame needs at least one column");
    n_rows_ = columns_.front().size();
    bool found_id = false;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const Column& c = columns_[i];
        require(c.size() == n_rows_, ErrorCode::Integrity,
                "column '" + c.name + "' length differs from the first column");
        require(c.missing.size() == n_rows_, ErrorCode::Integrity,
                "column '" + c.name + "' missing mask length mismatch");
        if (c.name == id_column_) {
            require(c.kind == ColumnKind::Identifier, ErrorCode::Integrity,
                    "ID column '" + c.name + "' must have identifier kind");
            found_id = true;
            id_index_ = i;
        }
    }
    require(found_id, ErrorCode::Integrity, "ID column '" + id_column_ + "' not present");
    const Column& ids = columns_[id_index_];
    std::set<std::string> seen;
    for (std::size_t r = 0; r < n_rows_; ++r) {
        require(!ids.is_missing(r), ErrorCode::Integrity,
                "missing patient ID at row " + std::to_string(r + 1));
        if (!seen.insert(ids.text[r]).second) {
            fail(ErrorCode::Integrity, "duplicate patient ID '" + ids.text[r] + "'");
        }
    }
}

const Column& TableFrame::column(const std::string& name) const {
    const Column* c = find_column(name);
    if (!c) fail(ErrorCode::Integrity, "no column named '" + name + "'");
    return *c;
}

const Column* TableFrame::find_column(const std::string& name) const {
    for (const auto& c : columns_) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

const std::vector<std::string>& TableFrame::patient_ids() const {
    return columns_[id_index_].text;
}

TableFrame TableFrame::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const Column& c : columns_) {
        Column out;
        out.name = c.name;
        out.kind = c.kind;
        out.missing.reserve(rows.size());
        if (c.kind == ColumnKind::Numeric) {
            out.numeric.reserve(rows.size());
            for (std::size_t r : rows) out.numeric.push_back(c.numeric[r]);
        } else {
            out.text.reserve(rows.size());
            for (std::size_t r : rows) out.text.push_back(c.text[r]);
        }
        for (std::size_t r : rows) out.missing.push_back(c.missing[r]);
        cols.push_back(std::move(out));
    }
    return TableFrame(std::move(cols), id_column_);
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_numeric_cell(const std::string& cell, std::size_t row, const std::string& col,
                          const std::string& source) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        fail(ErrorCode::Parse, source + ": unparseable numeric cell '" + cell + "' at row " +
                                   std::to_string(row) + ", column '" + col + "'");
    }
    return value;
}

}  // namespace

TableFrame parse_table(const std::string& text, const SchemaSpec& schema, const LoadOptions& opts,
                       const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::Parse,
            source_name + ": empty file");
    const std::vector<std::string> header = split_line(line, opts.delimiter);

    std::vector<Column> cols(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        const SchemaColumn* sc = schema.find(header[i]);
        if (!sc) {
            fail(ErrorCode::Config,
                 source_name + ": header column '" + header[i] + "' absent from schema");
        }
        cols[i].name = header[i];
        cols[i].kind = sc->kind;
    }

    std::size_t row = 1;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        ++row;
        const std::vector<std::string> cells = split_line(line, opts.delimiter);
        require(cells.size() == header.size(), ErrorCode::Parse,
                source_name + ": row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(header.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            Column& c = cols[i];
            const bool missing = opts.missing_tokens.count(cells[i]) > 0;
            if (missing && c.kind == ColumnKind::Identifier) {
                fail(ErrorCode::Integrity,
                     source_name + ": missing identifier at row " + std::to_string(row));
            }
            c.missing.push_back(missing ? 1 : 0);
            if (c.kind == ColumnKind::Numeric) {
                c.numeric.push_back(
                    missing ? std::numeric_limits<double>::quiet_NaN()
                            : parse_numeric_cell(cells[i], row, c.name, source_name));
            } else {
                c.text.push_back(missing ? std::string() : cells[i]);
            }
        }
    }
    return TableFrame(std::move(cols), schema.id_column);
}

TableFrame load_table(const std::string& path, const SchemaSpec& schema, const LoadOptions& opts) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open data file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str(), schema, opts, path);
}

std::string format_table(const TableFrame& frame, char delimiter) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < frame.n_cols(); ++i) {
        if (i) out << delimiter;
        out << frame.column(i).name;
    }
    out << '\n';
    for (std::size_t r = 0; r < frame.n_rows(); ++r) {
        for (std::size_t i = 0; i < frame.n_cols(); ++i) {
            if (i) out << delimiter;
            const Column& c = frame.column(i);
            if (c.is_missing(r)) {
                out << "NA";
            } else if (c.kind == ColumnKind::Numeric) {
                out << c.numeric[r];
            } else {
                out << c.text[r];
            }
        }
        out << '\n';
    }
    return out.str();
}

void write_table(const TableFrame& frame, const std::string& path, char delimiter) {
    std::ofstream out(path);
    require(out.good(), ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << format_table(frame, delimiter);
}

std::vector<TableFrame> intersect_patients(const std::vector<TableFrame>& frames) {
    require(!frames.empty(), ErrorCode::Validation, "intersect_patients: no frames");
    std::set<std::string> common(frames[0].patient_ids().begin(), frames[0].patient_ids().end());
    for (std::size_t f = 1; f < frames.size(); ++f) {
        std::set<std::string> ids(frames[f].patient_ids().begin(), frames[f].patient_ids().end());
        std::set<std::string> kept;
        std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(),
                              std::inserter(kept, kept.begin()));
        common.swap(kept);
    }
    require(!common.empty(), ErrorCode::Integrity,
            "intersect_patients: no patient present in every frame");

    // std::set iterates lexicographically, which is the canonical order.
    std::vector<TableFrame> out;
    out.reserve(frames.size());
    for (const TableFrame& frame : frames) {
        std::map<std::string, std::size_t> row_of;
        const auto& ids = frame.patient_ids();
        for (std::size_t r = 0; r < ids.size(); ++r) row_of[ids[r]] = r;
        std::vector<std::size_t> rows;
        rows.reserve(common.size());
        for (const std::string& id : common) rows.push_back(row_of.at(id));
        out.push_back(frame.select_rows(rows));
    }
    return out;
}

SchemaSpec schema_from_frame(const TableFrame& frame) {
    SchemaSpec schema;
    schema.id_column = frame.id_column_name();
    for (const Column& col : frame.columns()) {
        schema.columns.emplace_back(col.name, SchemaColumn{col.kind, std::nullopt});
    }
    return schema;
}

}  // namespace survkit
