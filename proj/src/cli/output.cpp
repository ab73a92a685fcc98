#include "seclab/cli/output.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "seclab/core.hpp"

namespace seclab::cli {

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw std::logic_error("CSV row width does not match header");
    }
    rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream &out) const {
    auto write_line = [&](std::vector<std::string> const &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << csv_field(cells[i]);
        }
        out << '\n';
    };
    write_line(header_);
    for (auto const &row : rows_) {
        write_line(row);
    }
}

std::string CsvTable::str() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

std::string format_number(double value) { return fmt::format("{}", value); }

void write_file(std::filesystem::path const &dir, std::string const &name, std::string const &content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

std::string RunManifest::dump() const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["tool_version"] = tool_version;
    doc["args"] = args;
    for (auto const &[key, value] : fields.items()) {
        doc[key] = value;
    }
    return doc.dump(2) + "\n";
}

RunManifest RunManifest::load(std::filesystem::path const &path) {
    std::ifstream in(path);
    if (!in) {
        throw input_error("cannot open manifest '" + path.string() + "'");
    }
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(in);
    } catch (nlohmann::json::exception const &e) {
        throw input_error("malformed manifest '" + path.string() + "': " + e.what());
    }
    RunManifest manifest;
    try {
        manifest.command = doc.at("command").get<std::string>();
        manifest.args = doc.at("args").get<std::vector<std::string>>();
    } catch (nlohmann::json::exception const &e) {
        throw input_error("manifest '" + path.string() + "' lacks command/args: " + e.what());
    }
    for (auto const &[key, value] : doc.items()) {
        if (key != "command" && key != "args" && key != "tool_version") {
            manifest.fields[key] = value;
        }
    }
    return manifest;
}

}  // namespace seclab::cli
