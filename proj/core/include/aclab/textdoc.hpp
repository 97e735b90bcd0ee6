#ifndef ACLAB_TEXTDOC_HPP
#define ACLAB_TEXTDOC_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace aclab {

// All instance files, configs, and oracle reports share one plain-text
// format: `key = value` lines with optional [section] headers (keys inside a
// section are addressed as "section.key"), # comments, string values in
// double quotes, booleans, numbers, and (multi-line) numeric arrays in
// brackets. Every document carries a `schema` key naming its type and
// version. The syntax is a strict subset of TOML, so the files read
// naturally in standard tooling.
class TextDoc {
 public:
  struct Value {
    enum class Kind { boolean, number, string, number_list };
    Kind kind = Kind::number;
    bool b = false;
    double num = 0.0;
    std::string str;
    std::vector<double> list;
    bool is_integer = false;  // number was written without '.', 'e', 'inf', 'nan'
  };

  struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
  };

  static TextDoc parse(const std::string& text);
  static TextDoc load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const Value& at(const std::string& key) const;

  double get_number(const std::string& key) const;
  std::int64_t get_integer(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  const std::vector<double>& get_list(const std::string& key) const;

  double get_number_or(const std::string& key, double fallback) const;
  std::int64_t get_integer_or(const std::string& key, std::int64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;

  // Keys not in `allowed`, in document order. Configs treat a nonempty result
  // as a hard error so stale or misspelled keys never pass silently.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& allowed) const;

  const std::vector<std::string>& keys() const { return order_; }

  void set_number(const std::string& key, double v);
  void set_integer(const std::string& key, std::int64_t v);
  void set_bool(const std::string& key, bool v);
  void set_string(const std::string& key, const std::string& v);
  void set_list(const std::string& key, const std::vector<double>& v);

  // Serializes with section grouping restored; floats carry 17 significant
  // digits so a round trip is bit-stable.
  std::string serialize() const;
  void save(const std::string& path) const;

 private:
  void insert(const std::string& key, Value v);
  std::map<std::string, Value> values_;
  std::vector<std::string> order_;
};

// "%.17g" with a trailing ".0" appended to integral values so the reader
// can tell numbers from integers; used everywhere a float is printed.
std::string format_double(double v);

// Locale-free CSV float field, 17 significant digits.
std::string csv_double(double v);

}  // namespace aclab

#endif
