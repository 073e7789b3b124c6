#include "skys3/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace skys3::io {

std::string format_double(double v, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::string to_string(const Csv& csv) {
    std::string out;
    for (std::size_t i = 0; i < csv.header.size(); ++i) {
        if (i) out += ',';
        out += csv.header[i];
    }
    out += '\n';
    for (const auto& row : csv.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

Csv parse_csv(std::string_view text) {
    Csv csv;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t c = 0;
        while (true) {
            std::size_t comma = line.find(',', c);
            if (comma == std::string_view::npos) {
                cells.emplace_back(line.substr(c));
                break;
            }
            cells.emplace_back(line.substr(c, comma - c));
            c = comma + 1;
        }
        if (first) {
            csv.header = std::move(cells);
            first = false;
        } else {
            csv.rows.push_back(std::move(cells));
        }
    }
    return csv;
}

void JsonWriter::separator() {
    if (!has_items_.empty() && !pending_key_) {
        if (has_items_.back()) out_ += ',';
        has_items_.back() = true;
    }
    pending_key_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    separator();
    out_ += '{';
    has_items_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    has_items_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separator();
    out_ += '[';
    has_items_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    has_items_.pop_back();
    return *this;
}

namespace {
void append_escaped(std::string& out, std::string_view s) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    out += '"';
}
} // namespace

JsonWriter& JsonWriter::key(std::string_view k) {
    if (has_items_.empty()) throw std::logic_error("JsonWriter: key outside object");
    if (has_items_.back()) out_ += ',';
    has_items_.back() = true;
    append_escaped(out_, k);
    out_ += ':';
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    separator();
    out_ += std::isfinite(v) ? format_double(v, 17) : "null";
    return *this;
}

JsonWriter& JsonWriter::value(int v) { return value(static_cast<long>(v)); }

JsonWriter& JsonWriter::value(long v) {
    separator();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(std::size_t v) {
    separator();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
    separator();
    append_escaped(out_, v);
    return *this;
}

JsonWriter& JsonWriter::value(const char* v) { return value(std::string_view(v)); }

JsonWriter& JsonWriter::value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    return *this;
}

void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
    Csv csv;
    csv.header = {"psi", "F"};
    csv.rows.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        csv.rows.push_back({format_double(p.grid()[i], 15), format_double(p.values()[i], 15)});
    write_text_file(path, to_string(csv));
}

Profile read_profile_csv(const std::filesystem::path& path) {
    const Csv csv = parse_csv(read_text_file(path));
    if (csv.header.size() < 2 || csv.header[0] != "psi" || csv.header[1] != "F")
        throw IoError("profile CSV must start with header psi,F: " + path.string());
    std::vector<double> psi, f;
    psi.reserve(csv.rows.size());
    f.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        if (row.size() < 2) throw IoError("short row in profile CSV: " + path.string());
        try {
            psi.push_back(std::stod(row[0]));
            f.push_back(std::stod(row[1]));
        } catch (const std::exception&) {
            throw IoError("non-numeric cell in profile CSV: " + path.string());
        }
    }
    if (psi.size() < 3) throw IoError("profile CSV needs at least 3 rows: " + path.string());
    const int q = static_cast<int>(std::lround(f.back() / pi));
    return Profile(std::move(psi), std::move(f), ChargeSector{q});
}

} // namespace skys3::io
