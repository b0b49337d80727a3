#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rebuttal {

bool is_blank(std::string_view s);
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

std::size_t word_count(std::string_view s);
std::vector<std::string> words(std::string_view s);

/// Lowercase, drop punctuation, collapse whitespace. Two texts that differ
/// only in case, punctuation or spacing normalize to the same string.
std::string normalize_for_match(std::string_view s);

/// True when `needle` occurs in `haystack` after both are normalized.
bool normalized_contains(std::string_view haystack, std::string_view needle);

/// Paragraphs separated by one or more blank lines, trimmed, non-empty.
std::vector<std::string> split_paragraphs(std::string_view body);

/// Hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

/// Replaces every {{NAME}} marker in a single pass. Missing or unused slots
/// are errors so a template edit can't silently drop an input.
std::string render_template(
    std::string_view tmpl,
    const std::vector<std::pair<std::string, std::string>>& slots);

/// Text between "<name>:\n<<<\n" and the next "\n>>>" in a rendered prompt,
/// or empty when the section is absent.
std::string prompt_section(std::string_view prompt, std::string_view name);

/// Whole file as bytes. kPrecondition when it can not be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file. Parent directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace rebuttal
