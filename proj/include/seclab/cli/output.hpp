#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace seclab::cli {

inline constexpr std::string_view tool_version = "0.3.0";

/// Quotes a CSV field when it contains a comma, quote or line break (RFC 4180).
[[nodiscard]] std::string csv_field(std::string_view field);

/// A header plus rows of already-formatted cells.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row);

    void write(std::ostream &out) const;
    [[nodiscard]] std::string str() const;

    [[nodiscard]] std::vector<std::string> const &header() const noexcept { return header_; }
    [[nodiscard]] std::vector<std::vector<std::string>> const &rows() const noexcept { return rows_; }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_number(double value);

/// Writes `content` to `dir / name`, creating the directory if needed.
void write_file(std::filesystem::path const &dir, std::string const &name, std::string const &content);

/// Everything needed to reproduce a run: the normalised argument list plus
/// the fields it resolved to.
struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    nlohmann::ordered_json fields = nlohmann::ordered_json::object();

    [[nodiscard]] std::string dump() const;
    static RunManifest load(std::filesystem::path const &path);
};

}  // namespace seclab::cli
