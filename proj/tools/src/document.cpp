#include "zitter_cli/document.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "zitter/errors.hpp"

namespace zitter::cli {

namespace {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, v, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_number(const std::string& text, double& value) {
    if (text == "nan") return value = NAN, true;
    if (text == "inf") return value = INFINITY, true;
    if (text == "-inf") return value = -INFINITY, true;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

}  // namespace

Column& Table::add(std::string column_name, std::vector<double> values) {
    columns.push_back({std::move(column_name), std::move(values), {}});
    return columns.back();
}

Column& Table::add_labels(std::string column_name, std::vector<std::string> values) {
    columns.push_back({std::move(column_name), {}, std::move(values)});
    return columns.back();
}

const Column& Table::column(const std::string& column_name) const {
    for (const auto& c : columns)
        if (c.name == column_name) return c;
    throw ConfigError("no column \"" + column_name + "\" in table " + name);
}

Table& Document::table(std::string table_name) {
    tables.push_back({std::move(table_name), {}});
    return tables.back();
}

void write_document(const Document& doc, Format format, std::ostream& out) {
    if (format == Format::json) {
        nlohmann::ordered_json j;
        j["header"] = doc.header;
        for (const auto& t : doc.tables) {
            nlohmann::ordered_json table = nlohmann::ordered_json::object();
            for (const auto& c : t.columns) {
                if (c.labels.empty()) {
                    auto& arr = table[c.name] = nlohmann::ordered_json::array();
                    for (double v : c.numbers)
                        arr.push_back(std::isfinite(v) ? nlohmann::ordered_json(v)
                                                       : nlohmann::ordered_json(format_number(v)));
                } else {
                    table[c.name] = c.labels;
                }
            }
            j[t.name] = std::move(table);
        }
        out << j.dump(2) << '\n';
        return;
    }
    for (const auto& item : doc.header.items())
        out << "# " << item.key() << ": " << item.value().dump() << '\n';
    for (const auto& t : doc.tables) {
        out << "\n# table: " << t.name << '\n';
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            out << (c ? "," : "") << t.columns[c].name;
        out << '\n';
        const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < t.columns.size(); ++c) {
                const auto& col = t.columns[c];
                out << (c ? "," : "")
                    << (col.labels.empty() ? format_number(col.numbers[r]) : col.labels[r]);
            }
            out << '\n';
        }
    }
}

Document read_csv(std::istream& in) {
    Document doc;
    std::string line;
    Table* current = nullptr;
    bool expect_names = false;
    std::vector<bool> numeric;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# table: ", 0) == 0) {
            current = &doc.table(line.substr(9));
            expect_names = true;
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) throw ConfigError("malformed header line: " + line);
            doc.header[line.substr(2, colon - 2)] = nlohmann::ordered_json::parse(line.substr(colon + 2));
            continue;
        }
        if (!current) throw ConfigError("data line outside a table");
        const auto cells = split(line);
        if (expect_names) {
            for (const auto& name : cells) current->columns.push_back({name, {}, {}});
            numeric.assign(cells.size(), true);
            expect_names = false;
            continue;
        }
        if (cells.size() != current->columns.size())
            throw ConfigError("row width differs from header in table " + current->name);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            auto& col = current->columns[c];
            double v;
            if (numeric[c] && parse_number(cells[c], v)) {
                col.numbers.push_back(v);
                continue;
            }
            if (numeric[c]) {
                // first non-numeric cell: the whole column is labels
                for (double x : col.numbers) col.labels.push_back(format_number(x));
                col.numbers.clear();
                numeric[c] = false;
            }
            col.labels.push_back(cells[c]);
        }
    }
    return doc;
}

Document read_json(std::istream& in) {
    const auto j = nlohmann::ordered_json::parse(in);
    Document doc;
    doc.header = j.at("header");
    for (const auto& item : j.items()) {
        if (item.key() == "header") continue;
        auto& t = doc.table(item.key());
        for (const auto& col : item.value().items()) {
            Column c{col.key(), {}, {}};
            for (const auto& v : col.value()) {
                if (v.is_number()) {
                    c.numbers.push_back(v.get<double>());
                } else {
                    double x;
                    if (c.labels.empty() && parse_number(v.get<std::string>(), x))
                        c.numbers.push_back(x);
                    else
                        c.labels.push_back(v.get<std::string>());
                }
            }
            t.columns.push_back(std::move(c));
        }
    }
    return doc;
}

}  // namespace zitter::cli
