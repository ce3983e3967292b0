#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wolfcast {

// Thrown for malformed input files (CSV, config, serialized models). The CLI
// maps it to the usage/schema exit code.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

namespace kv {

// %.17g rendering: parses back to the identical double.
std::string format_double(double x);
double parse_double(const std::string& s, const std::string& context);
std::int64_t parse_int(const std::string& s, const std::string& context);

/**
 * Flat key-value text document: one `key = value` per line, `#` comments.
 * Keys keep insertion order so serialized files are byte-stable.
 */
class Document {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::int64_t value);
    void set_doubles(const std::string& key, const std::vector<double>& values);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // throws SchemaError if absent
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string str() const;
    static Document parse(const std::string& text);
    static Document load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace kv

// Writes the whole payload to a temp file then renames it into place, so a
// failed command never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace wolfcast
