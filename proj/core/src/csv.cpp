#include "motifcrf/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "motifcrf/errors.hpp"

namespace motifcrf::csv {

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open " + path.string());

    Table t;
    t.path = path.string();
    std::string line;
    long lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        auto fields = split_line(line, ',');
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw MalformedRow(t.path, lineno,
                               "expected " + std::to_string(t.header.size()) +
                                   " columns, got " + std::to_string(fields.size()));
        }
        t.rows.push_back(Row{std::move(fields), lineno});
    }
    if (!have_header) throw MalformedRow(path.string(), 1, "missing header row");
    return t;
}

std::size_t column(const Table& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    throw MalformedRow(t.path, 1, "missing column '" + name + "'");
}

double parse_double(const Table& t, const Row& r, std::size_t col) {
    const std::string& s = r.fields.at(col);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw MalformedRow(t.path, r.line, "bad float '" + s + "'");
    return v;
}

long parse_long(const Table& t, const Row& r, std::size_t col) {
    const std::string& s = r.fields.at(col);
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw MalformedRow(t.path, r.line, "bad integer '" + s + "'");
    return v;
}

bool parse_bool01(const Table& t, const Row& r, std::size_t col) {
    long v = parse_long(t, r, col);
    if (v != 0 && v != 1)
        throw MalformedRow(t.path, r.line, "expected 0/1, got " + std::to_string(v));
    return v == 1;
}

std::vector<long> parse_id_list(const Table& t, const Row& r, std::size_t col) {
    const std::string& s = r.fields.at(col);
    std::vector<long> ids;
    std::string cur;
    auto flush = [&] {
        if (cur.empty())
            throw MalformedRow(t.path, r.line, "empty id in list '" + s + "'");
        long v = 0;
        auto [p, ec] = std::from_chars(cur.data(), cur.data() + cur.size(), v);
        if (ec != std::errc() || p != cur.data() + cur.size())
            throw MalformedRow(t.path, r.line, "bad id '" + cur + "'");
        ids.push_back(v);
        cur.clear();
    };
    for (char c : s) {
        if (c == ';')
            flush();
        else
            cur.push_back(c);
    }
    flush();
    return ids;
}

std::string format_double(double v) {
    char buf[40];
    // max_digits10 for binary64: text round-trips bit-exactly
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact("cannot hash " + path.string());
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + out;
}

std::string join(const std::vector<std::string>& fields, char sep) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(sep);
        out += fields[i];
    }
    return out;
}

}  // namespace motifcrf::csv
