#include "wolfcast/kv_file.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wolfcast {

namespace kv {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
    if (end == begin || (end != nullptr && *end != '\0')) {
        throw SchemaError(context + ": not a number: '" + s + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& context) {
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        throw SchemaError(context + ": not an integer: '" + s + "'");
    }
    return static_cast<std::int64_t>(v);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void Document::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

void Document::set(const std::string& key, double value) { set(key, format_double(value)); }
void Document::set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }

void Document::set_doubles(const std::string& key, const std::vector<double>& values) {
    std::string joined;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) joined += ' ';
        joined += format_double(values[i]);
    }
    set(key, joined);
}

bool Document::has(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return true;
    }
    return false;
}

const std::string& Document::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    throw SchemaError("missing key '" + key + "'");
}

std::string Document::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double Document::get_double(const std::string& key) const {
    return parse_double(get(key), "key '" + key + "'");
}

std::int64_t Document::get_int(const std::string& key) const {
    return parse_int(get(key), "key '" + key + "'");
}

std::vector<double> Document::get_doubles(const std::string& key) const {
    std::istringstream in(get(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, "key '" + key + "'"));
    return out;
}

std::string Document::str() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

Document Document::parse(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw SchemaError("line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw SchemaError("line " + std::to_string(lineno) + ": empty key");
        }
        doc.entries_.emplace_back(key, value);
    }
    return doc;
}

Document Document::load(const std::string& path) {
    try {
        return parse(read_file(path));
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

void Document::save(const std::string& path) const { write_file_atomic(path, str()); }

}  // namespace kv

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "': " + std::strerror(errno));
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace wolfcast
