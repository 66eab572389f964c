#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "common.hpp"

namespace survkit {

enum class ColumnKind { Numeric, Categorical, Identifier };

const char* column_kind_name(ColumnKind kind);
ColumnKind column_kind_from_name(const std::string& name);

/// One named column. Numeric columns carry doubles, categorical and
/// identifier columns carry strings. A cell flagged missing carries no
/// interpretable value (numeric slots hold NaN, string slots are empty).
struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::vector<double> numeric;     // used when kind == Numeric
    std::vector<std::string> text;   // used otherwise
    std::vector<std::uint8_t> missing;

    std::size_t size() const {
        return kind == ColumnKind::Numeric ? numeric.size() : text.size();
    }
    bool is_missing(std::size_t row) const { return missing[row] != 0; }
    std::size_t missing_count() const;
};

struct SchemaColumn {
    ColumnKind kind = ColumnKind::Categorical;
    std::optional<std::vector<std::string>> categories;  // fixed list for categoricals
};

/// Declared kinds per column plus the patient-identifier column name.
struct SchemaSpec {
    std::string id_column;
    std::vector<std::pair<std::string, SchemaColumn>> columns;

    const SchemaColumn* find(const std::string& name) const;
    static SchemaSpec from_json_file(const std::string& path);
    static SchemaSpec from_json_text(const std::string& text);
    std::string to_json_text() const;
};

/// Immutable-after-construction table keyed by patient ID.
class TableFrame {
public:
    TableFrame() = default;
    TableFrame(std::vector<Column> columns, std::string id_column);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t i) const { return columns_[i]; }
    const Column& column(const std::string& name) const;
    const Column* find_column(const std::string& name) const;
    bool has_column(const std::string& name) const { return find_column(name) != nullptr; }
    const std::string& id_column_name() const { return id_column_; }
    const std::vector<std::string>& patient_ids() const;

    /// New frame containing the given rows, in the given order.
    TableFrame select_rows(const std::vector<std::size_t>& rows) const;

private:
    std::vector<Column> columns_;
    std::string id_column_;
    std::size_t n_rows_ = 0;
    std::size_t id_index_ = 0;
};

struct LoadOptions {
    char delimiter = '\t';
    std::set<std::string> missing_tokens = {"", "NA", "NaN", "null"};
};

/// Parses a delimiter-separated text file with a header row. Every cell equal
/// to a missing token is flagged; numeric cells are parsed as decimal numbers.
TableFrame load_table(const std::string& path, const SchemaSpec& schema, const LoadOptions& opts = {});

TableFrame parse_table(const std::string& text, const SchemaSpec& schema, const LoadOptions& opts,
                       const std::string& source_name);

/// Writes the frame back to the text format; missing cells become "NA".
void write_table(const TableFrame& frame, const std::string& path, char delimiter = '\t');
std::string format_table(const TableFrame& frame, char delimiter = '\t');

/// Restricts every frame to the patients present in all of them, reordered
/// into a single canonical lexicographic ID order.
std::vector<TableFrame> intersect_patients(const std::vector<TableFrame>& frames);

/// Schema matching an existing frame: column kinds only, no fixed categories.
SchemaSpec schema_from_frame(const TableFrame& frame);

}  // namespace survkit
