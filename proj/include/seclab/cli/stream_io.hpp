#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seclab/core.hpp"

namespace seclab::cli {

/// One line of an attack stream file.
///   {"id": "...", "surrogate_loss": 0.7, "target_loss": 1.2, "fooled": true}
/// target_loss and fooled may be absent or null; unknown fields are ignored.
struct StreamRecord {
    std::string id;
    double surrogate_loss = 0.0;
    std::optional<double> target_loss;
    std::optional<bool> fooled;

    friend bool operator==(StreamRecord const &, StreamRecord const &) = default;
};

/// Parses one JSON object. Errors mention `line_number` when it is nonzero.
[[nodiscard]] StreamRecord parse_record(std::string_view line, std::size_t line_number = 0);

/// Serialises without a trailing newline; absent optionals are omitted.
[[nodiscard]] std::string format_record(StreamRecord const &record);

/// Reads JSONL, skipping blank lines. Throws input_error naming the 1-based
/// line of the first bad record.
[[nodiscard]] std::vector<StreamRecord> read_records(std::istream &in);
[[nodiscard]] std::vector<StreamRecord> read_records_file(std::string const &path);

/// File order becomes arrival order.
[[nodiscard]] Stream to_stream(std::vector<StreamRecord> const &records);

}  // namespace seclab::cli
