#include "jointdesc/behavior_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "jointdesc/error.hpp"

namespace jointdesc {

namespace {

using json = nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::ParseError, "field '" + field + "': " + what);
}

int read_int(const json& j, const char* field) {
    if (!j.contains(field)) field_error(field, "missing");
    const auto& v = j.at(field);
    if (!v.is_number_integer()) field_error(field, "expected an integer");
    return v.get<int>();
}

bool read_bool(const json& j, const char* field) {
    if (!j.contains(field)) field_error(field, "missing");
    const auto& v = j.at(field);
    if (!v.is_boolean()) field_error(field, "expected true or false");
    return v.get<bool>();
}

std::pair<int, int> parse_key(const std::string& key, const ScenarioDescriptor& s) {
    auto comma = key.find(',');
    auto bad = [&] { field_error("table", "bad key \"" + key + "\" (expected \"x,y\")"); };
    if (comma == std::string::npos) bad();
    int x = 0, y = 0;
    try {
        std::size_t used = 0;
        x = std::stoi(key.substr(0, comma), &used);
        if (used != comma) bad();
        std::string rest = key.substr(comma + 1);
        y = std::stoi(rest, &used);
        if (used != rest.size()) bad();
    } catch (const std::logic_error&) {
        bad();
    }
    if (x < 1 || x > s.settings_a || y < 1 || y > s.settings_b) {
        field_error("table", "key \"" + key + "\" outside the scenario's settings");
    }
    return {x, y};
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

}  // namespace

Behavior behavior_from_json(const json& j, const ReadOptions& options) {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "behavior file must hold a single object");
    static const std::set<std::string> known = {"settings_a", "settings_b", "outcomes_a", "outcomes_b",
                                                "friend_on_a", "friend_on_b", "table"};
    for (const auto& [key, _] : j.items()) {
        if (known.count(key) == 0 && !(options.allow_protocol && key == "protocol")) {
            field_error(key, "unknown field");
        }
    }
    ScenarioDescriptor s{read_int(j, "settings_a"), read_int(j, "settings_b"), read_int(j, "outcomes_a"),
                         read_int(j, "outcomes_b"), read_bool(j, "friend_on_a"), read_bool(j, "friend_on_b")};
    try {
        s.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }

    if (!j.contains("table")) field_error("table", "missing");
    const auto& table = j.at("table");
    if (!table.is_object()) field_error("table", "expected an object");

    std::vector<Behavior::Cell> cells(s.cell_count());
    for (const auto& [key, matrix] : table.items()) {
        auto [x, y] = parse_key(key, s);
        const std::string where = "table[\"" + key + "\"]";
        if (!matrix.is_array() || static_cast<int>(matrix.size()) != s.outcomes_a) {
            field_error(where, "expected " + std::to_string(s.outcomes_a) + " rows");
        }
        Behavior::Cell cell;
        cell.reserve(s.cell_size());
        for (int a = 0; a < s.outcomes_a; ++a) {
            const auto& row = matrix[static_cast<std::size_t>(a)];
            if (!row.is_array() || static_cast<int>(row.size()) != s.outcomes_b) {
                field_error(where + "[" + std::to_string(a) + "]",
                            "expected " + std::to_string(s.outcomes_b) + " entries");
            }
            for (int b = 0; b < s.outcomes_b; ++b) {
                const auto& e = row[static_cast<std::size_t>(b)];
                const std::string entry_where = where + "[" + std::to_string(a) + "][" + std::to_string(b) + "]";
                if (!e.is_string()) field_error(entry_where, "entries must be strings");
                try {
                    cell.push_back(Rational::parse(e.get<std::string>(), options.max_den));
                } catch (const Error& err) {
                    throw Error(err.kind(), entry_where + ": " + err.what());
                }
            }
        }
        cells[static_cast<std::size_t>(x - 1) * s.settings_b + (y - 1)] = std::move(cell);
    }
    return Behavior(s, std::move(cells));
}

Behavior parse_behavior(std::string_view text, const ReadOptions& options) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
    }
    return behavior_from_json(j, options);
}

Behavior read_behavior(const std::filesystem::path& path, const ReadOptions& options) {
    return parse_behavior(read_text_file(path), options);
}

nlohmann::ordered_json behavior_to_json(const Behavior& b) {
    b.require_complete();
    const auto& s = b.scenario();
    nlohmann::ordered_json j;
    j["settings_a"] = s.settings_a;
    j["settings_b"] = s.settings_b;
    j["outcomes_a"] = s.outcomes_a;
    j["outcomes_b"] = s.outcomes_b;
    j["friend_on_a"] = s.friend_on_a;
    j["friend_on_b"] = s.friend_on_b;
    nlohmann::ordered_json table = nlohmann::ordered_json::object();
    for (int x = 1; x <= s.settings_a; ++x) {
        for (int y = 1; y <= s.settings_b; ++y) {
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (int a = 0; a < s.outcomes_a; ++a) {
                nlohmann::ordered_json row = nlohmann::ordered_json::array();
                for (int bb = 0; bb < s.outcomes_b; ++bb) row.push_back(b(x, y, a, bb).to_string());
                rows.push_back(std::move(row));
            }
            table[std::to_string(x) + "," + std::to_string(y)] = std::move(rows);
        }
    }
    j["table"] = std::move(table);
    return j;
}

std::string format_behavior(const Behavior& b) { return behavior_to_json(b).dump(2) + "\n"; }

void write_behavior(const Behavior& b, const std::filesystem::path& path) {
    write_text_file(path, format_behavior(b));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace jointdesc
