#pragma once
// Shared vocabulary for the narrlens pipeline: domain/language enums,
// the error type, and small string/file/hash helpers used across modules.

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace narrlens {

// Single exception type; every module throws this with a contextual message.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Topic domain of a taxonomy or article. Unknown doubles as "mixed" for
// merged taxonomy views used when routing articles of unknown domain.
enum class Domain { CC, URW, Unknown };

// The five task languages.
enum class Language { BG, EN, HI, PT, RU };

// Which level of the two-level taxonomy a label lives at.
enum class LabelLevel { Main, Sub };

std::string to_string(Domain d);
std::string to_string(Language l);
std::string to_string(LabelLevel l);
Domain parse_domain(std::string_view s);
Language parse_language(std::string_view s);
bool try_parse_language(std::string_view s, Language& out);

// --- string helpers -------------------------------------------------------

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Splits on runs of ASCII whitespace; never returns empty tokens.
std::vector<std::string> whitespace_tokenize(std::string_view text);

// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

// --- hashing --------------------------------------------------------------

// FNV-1a over the raw bytes. Offset 14695981039346656037, prime 1099511628211.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed);
std::string to_hex(std::uint64_t v);

// --- deterministic shuffling ----------------------------------------------

// Fisher-Yates driven by mt19937_64 with explicit modulo draws, so the
// permutation is identical across standard libraries.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(items[i - 1], items[j]);
    }
}

// --- file helpers ----------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::vector<std::string> read_lines(const std::filesystem::path& path);

} // namespace narrlens
