#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "jointdesc/behavior.hpp"

namespace jointdesc {

struct ReadOptions {
    // Cap for rationalizing decimal entries; unset means decimals stay exact.
    std::optional<std::uint64_t> max_den;
    // Accept an extra top-level "protocol" object (quantum protocol files).
    bool allow_protocol = true;
};

// Behavior file: one JSON object with settings_a, settings_b, outcomes_a,
// outcomes_b, friend_on_a, friend_on_b and table {"x,y": [[entry, ...], ...]}.
// Entries are "p/q" or decimal strings. Unknown fields raise ParseError.
Behavior parse_behavior(std::string_view text, const ReadOptions& options = {});
Behavior behavior_from_json(const nlohmann::json& j, const ReadOptions& options = {});
Behavior read_behavior(const std::filesystem::path& path, const ReadOptions& options = {});

// Writers emit "p/q" in lowest terms, fields in declaration order, table keys
// in (x,y) order; output is byte-stable for equal behaviors.
nlohmann::ordered_json behavior_to_json(const Behavior& b);
std::string format_behavior(const Behavior& b);
void write_behavior(const Behavior& b, const std::filesystem::path& path);

// Reads a whole file; Error(ParseError) when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace jointdesc
