// Small string/file helpers shared by every module.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace semlens {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);  // keeps no terminators
std::string join(const std::vector<std::string>& parts, const std::string& sep);

bool is_ident_start(char c);
bool is_ident_char(char c);
bool is_identifier(std::string_view s);

// Whitespace/punctuation-normalized lowercase word tokens.
std::vector<std::string> word_tokens(std::string_view text);
// Identifier sub-tokens: split on camelCase humps, digits and underscores.
std::vector<std::string> sub_tokens(std::string_view identifier);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);
// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::filesystem::path& p, std::string_view content);

std::string sha256_hex(std::string_view data);

// Fixed-format floating point for reports: %.6f, stable across platforms.
std::string format_metric(double v);

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// exception after all workers finish.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace semlens
