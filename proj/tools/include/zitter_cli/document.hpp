#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "zitter_cli/config.hpp"

namespace zitter::cli {

// One column holds either numbers or labels.
struct Column {
    std::string name;
    std::vector<double> numbers;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return labels.empty() ? numbers.size() : labels.size(); }
};

struct Table {
    std::string name;
    std::vector<Column> columns;

    Column& add(std::string name, std::vector<double> values);
    Column& add_labels(std::string name, std::vector<std::string> values);
    const Column& column(const std::string& name) const;
};

// Header metadata plus tables. CSV output writes the header as
// "# key: <json value>" comment lines (gnuplot skips them) and each table as
// a comma-separated block; numbers use 17 significant digits so a read-back
// is lossless.
struct Document {
    nlohmann::ordered_json header = nlohmann::ordered_json::object();
    std::vector<Table> tables;

    Table& table(std::string name);
};

void write_document(const Document& doc, Format format, std::ostream& out);

Document read_csv(std::istream& in);
Document read_json(std::istream& in);

}  // namespace zitter::cli
