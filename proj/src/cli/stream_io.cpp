#include "seclab/cli/stream_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace seclab::cli {

namespace {

[[noreturn]] void fail(std::size_t line_number, std::string const &message) {
    if (line_number == 0) {
        throw input_error(message);
    }
    throw input_error("line " + std::to_string(line_number) + ": " + message);
}

double read_loss(nlohmann::json const &value, char const *field, std::size_t line_number) {
    if (!value.is_number()) {
        fail(line_number, std::string("'") + field + "' must be a number");
    }
    double loss = value.get<double>();
    if (!std::isfinite(loss) || loss < 0.0) {
        fail(line_number, std::string("'") + field + "' must be finite and >= 0");
    }
    return loss;
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

StreamRecord parse_record(std::string_view line, std::size_t line_number) {
    nlohmann::json object;
    try {
        object = nlohmann::json::parse(line);
    } catch (nlohmann::json::parse_error const &e) {
        fail(line_number, std::string("malformed JSON: ") + e.what());
    }
    if (!object.is_object()) {
        fail(line_number, "record must be a JSON object");
    }

    StreamRecord record;
    auto id = object.find("id");
    if (id == object.end() || !id->is_string()) {
        fail(line_number, "'id' must be present and a string");
    }
    record.id = id->get<std::string>();

    auto surrogate = object.find("surrogate_loss");
    if (surrogate == object.end()) {
        fail(line_number, "'surrogate_loss' is required");
    }
    record.surrogate_loss = read_loss(*surrogate, "surrogate_loss", line_number);

    if (auto target = object.find("target_loss"); target != object.end() && !target->is_null()) {
        record.target_loss = read_loss(*target, "target_loss", line_number);
    }
    if (auto fooled = object.find("fooled"); fooled != object.end() && !fooled->is_null()) {
        if (!fooled->is_boolean()) {
            fail(line_number, "'fooled' must be a boolean");
        }
        record.fooled = fooled->get<bool>();
    }
    return record;
}

std::string format_record(StreamRecord const &record) {
    nlohmann::ordered_json object;
    object["id"] = record.id;
    object["surrogate_loss"] = record.surrogate_loss;
    if (record.target_loss) {
        object["target_loss"] = *record.target_loss;
    }
    if (record.fooled) {
        object["fooled"] = *record.fooled;
    }
    return object.dump();
}

std::vector<StreamRecord> read_records(std::istream &in) {
    std::vector<StreamRecord> records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (is_blank(line)) {
            continue;
        }
        records.push_back(parse_record(line, line_number));
    }
    if (records.empty()) {
        throw input_error("stream file contains no records");
    }
    return records;
}

std::vector<StreamRecord> read_records_file(std::string const &path) {
    std::ifstream in(path);
    if (!in) {
        throw input_error("cannot open stream file '" + path + "'");
    }
    return read_records(in);
}

Stream to_stream(std::vector<StreamRecord> const &records) {
    std::vector<StreamItem> items;
    items.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        StreamItem item;
        item.id = records[i].id;
        item.arrival = static_cast<std::int64_t>(i + 1);
        item.observed_value = records[i].surrogate_loss;
        item.true_value = records[i].target_loss;
        item.fooled = records[i].fooled;
        items.push_back(std::move(item));
    }
    return Stream(std::move(items));
}

}  // namespace seclab::cli
