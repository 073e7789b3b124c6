#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skys3/profile.hpp"

namespace skys3::io {

/// File-system problems get their own type so the CLI can map them to the
/// invalid-input exit code rather than the solver-failure one.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// %.{digits}g formatting; all CSV numbers use 15 significant digits, all
/// JSON numbers 17 (round-trip exact).
std::string format_double(double v, int significant_digits);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string to_string(const Csv& csv);
/// Minimal parser for the files this library writes (no quoting/escapes).
Csv parse_csv(std::string_view text);

/// Streaming writer for deterministic JSON: insertion order preserved,
/// doubles at 17 significant digits, no whitespace dependence on locale.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long v);
    JsonWriter& value(std::size_t v);
    JsonWriter& value(std::string_view v);
    JsonWriter& value(const char* v);
    JsonWriter& value(bool v);
    const std::string& str() const { return out_; }

private:
    void separator();
    std::string out_;
    std::vector<bool> has_items_;
    bool pending_key_ = false;
};

/// Profile table `psi,F` at 15 significant digits.
void write_profile_csv(const std::filesystem::path& path, const Profile& p);
/// Inverse of write_profile_csv; the charge is inferred from F(pi) and the
/// slopes are reconstructed by finite differences.
Profile read_profile_csv(const std::filesystem::path& path);

} // namespace skys3::io
