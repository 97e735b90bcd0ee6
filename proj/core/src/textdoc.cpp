#include "aclab/textdoc.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace aclab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"') in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& tok, double* out, bool* is_integer) {
  if (tok.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) return false;
  *out = v;
  *is_integer = tok.find_first_of(".eEnN") == std::string::npos;
  return true;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      return false;
  }
  return true;
}

}  // namespace

TextDoc TextDoc::parse(const std::string& text) {
  TextDoc doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;

  // state for a bracketed list continuing over several lines
  bool in_list = false;
  std::string list_key;
  int list_start_line = 0;
  std::vector<double> list_values;

  auto flush_list_chunk = [&](const std::string& chunk, int line) {
    std::string tok;
    auto push = [&]() {
      if (tok.empty()) return;
      double v;
      bool is_int;
      if (!parse_number(trim(tok), &v, &is_int))
        throw ParseError("bad number '" + trim(tok) + "' in list '" + list_key + "'", line);
      list_values.push_back(v);
      tok.clear();
    };
    for (char c : chunk) {
      if (c == ',') {
        push();
      } else if (c == ']') {
        push();
        Value val;
        val.kind = Value::Kind::number_list;
        val.list = list_values;
        doc.insert(list_key, std::move(val));
        in_list = false;
        list_values.clear();
        return;
      } else {
        tok += c;
      }
    }
    push();
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(strip_comment(raw));
    if (in_list) {
      flush_list_chunk(line, lineno);
      continue;
    }
    if (line.empty()) continue;

    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) throw ParseError("bad section name '" + section + "'", lineno);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = trim(line.substr(0, eq));
    std::string rhs = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ParseError("bad key '" + key + "'", lineno);
    if (!section.empty()) key = section + "." + key;
    if (doc.values_.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);

    if (rhs.empty()) throw ParseError("missing value for '" + key + "'", lineno);

    if (rhs.front() == '[') {
      in_list = true;
      list_key = key;
      list_start_line = lineno;
      list_values.clear();
      flush_list_chunk(rhs.substr(1), lineno);
      continue;
    }

    Value val;
    if (rhs.front() == '"') {
      if (rhs.size() < 2 || rhs.back() != '"')
        throw ParseError("unterminated string for '" + key + "'", lineno);
      val.kind = Value::Kind::string;
      val.str = rhs.substr(1, rhs.size() - 2);
    } else if (rhs == "true" || rhs == "false") {
      val.kind = Value::Kind::boolean;
      val.b = (rhs == "true");
    } else {
      double v;
      bool is_int;
      if (!parse_number(rhs, &v, &is_int))
        throw ParseError("bad value '" + rhs + "' for '" + key + "'", lineno);
      val.kind = Value::Kind::number;
      val.num = v;
      val.is_integer = is_int;
    }
    doc.insert(key, std::move(val));
  }
  if (in_list)
    throw ParseError("unterminated list '" + list_key + "'", list_start_line);
  return doc;
}

TextDoc TextDoc::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

const TextDoc::Value& TextDoc::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("missing key '" + key + "'");
  return it->second;
}

double TextDoc::get_number(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::number) throw std::runtime_error("key '" + key + "' is not a number");
  return v.num;
}

std::int64_t TextDoc::get_integer(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::number || !v.is_integer)
    throw std::runtime_error("key '" + key + "' is not an integer");
  return static_cast<std::int64_t>(v.num);
}

bool TextDoc::get_bool(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::boolean) throw std::runtime_error("key '" + key + "' is not a bool");
  return v.b;
}

const std::string& TextDoc::get_string(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::string) throw std::runtime_error("key '" + key + "' is not a string");
  return v.str;
}

const std::vector<double>& TextDoc::get_list(const std::string& key) const {
  const Value& v = at(key);
  if (v.kind != Value::Kind::number_list)
    throw std::runtime_error("key '" + key + "' is not a list");
  return v.list;
}

double TextDoc::get_number_or(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}
std::int64_t TextDoc::get_integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_integer(key) : fallback;
}
bool TextDoc::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}
std::string TextDoc::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<std::string> TextDoc::unknown_keys(const std::vector<std::string>& allowed) const {
  std::vector<std::string> out;
  for (const auto& k : order_) {
    bool ok = false;
    for (const auto& a : allowed) {
      if (k == a) {
        ok = true;
        break;
      }
    }
    if (!ok) out.push_back(k);
  }
  return out;
}

void TextDoc::insert(const std::string& key, Value v) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = std::move(v);
}

void TextDoc::set_number(const std::string& key, double v) {
  Value val;
  val.kind = Value::Kind::number;
  val.num = v;
  insert(key, std::move(val));
}
void TextDoc::set_integer(const std::string& key, std::int64_t v) {
  Value val;
  val.kind = Value::Kind::number;
  val.num = static_cast<double>(v);
  val.is_integer = true;
  insert(key, std::move(val));
}
void TextDoc::set_bool(const std::string& key, bool v) {
  Value val;
  val.kind = Value::Kind::boolean;
  val.b = v;
  insert(key, std::move(val));
}
void TextDoc::set_string(const std::string& key, const std::string& v) {
  Value val;
  val.kind = Value::Kind::string;
  val.str = v;
  insert(key, std::move(val));
}
void TextDoc::set_list(const std::string& key, const std::vector<double>& v) {
  Value val;
  val.kind = Value::Kind::number_list;
  val.list = v;
  insert(key, std::move(val));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
  return s;
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string TextDoc::serialize() const {
  std::ostringstream out;
  std::string current_section;
  for (const auto& full_key : order_) {
    const Value& v = values_.at(full_key);
    std::string section, key = full_key;
    const std::size_t dot = full_key.find('.');
    if (dot != std::string::npos) {
      section = full_key.substr(0, dot);
      key = full_key.substr(dot + 1);
    }
    if (section != current_section) {
      if (!section.empty()) out << "\n[" << section << "]\n";
      current_section = section;
    }
    out << key << " = ";
    switch (v.kind) {
      case Value::Kind::boolean:
        out << (v.b ? "true" : "false");
        break;
      case Value::Kind::number:
        if (v.is_integer) {
          out << static_cast<std::int64_t>(v.num);
        } else {
          out << format_double(v.num);
        }
        break;
      case Value::Kind::string:
        out << '"' << v.str << '"';
        break;
      case Value::Kind::number_list: {
        out << "[";
        for (std::size_t i = 0; i < v.list.size(); ++i) {
          if (i % 8 == 0) out << "\n  ";
          out << format_double(v.list[i]);
          if (i + 1 < v.list.size()) out << ", ";
        }
        out << "\n]";
        break;
      }
    }
    out << "\n";
  }
  return out.str();
}

void TextDoc::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << serialize();
}

}  // namespace aclab
