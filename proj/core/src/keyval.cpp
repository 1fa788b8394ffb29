#include "rramc/keyval.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rramc/errors.hpp"
#include "rramc/textio.hpp"

namespace rramc::textio {

double parse_double(std::string_view s) {
  std::string buf(trim(s));
  if (buf.empty()) throw ConfigError("empty numeric value");
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || errno == ERANGE)
    throw ConfigError("bad numeric value '" + buf + "'");
  return v;
}

long long parse_int(std::string_view s) {
  std::string buf(trim(s));
  if (buf.empty()) throw ConfigError("empty integer value");
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || errno == ERANGE)
    throw ConfigError("bad integer value '" + buf + "'");
  return v;
}

unsigned long parse_uint(std::string_view s) {
  long long v = parse_int(s);
  if (v < 0) throw ConfigError("expected non-negative integer, got '" + std::string(trim(s)) + "'");
  return static_cast<unsigned long>(v);
}

}  // namespace rramc::textio

namespace rramc::keyval {

void Document::set(std::string key, std::string value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = std::move(value);
    return;
  }
  index_.emplace(key, entries_.size());
  entries_.emplace_back(std::move(key), std::move(value));
}

bool Document::has(std::string_view key) const { return index_.find(key) != index_.end(); }

std::optional<std::string> Document::get(std::string_view key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

double Document::get_double(std::string_view key) const {
  auto v = get(key);
  if (!v) throw ConfigError("missing key '" + std::string(key) + "'");
  try {
    return textio::parse_double(*v);
  } catch (const ConfigError&) {
    throw ConfigError("key '" + std::string(key) + "': bad numeric value '" + *v + "'");
  }
}

double Document::get_double(std::string_view key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

unsigned long Document::get_uint(std::string_view key) const {
  auto v = get(key);
  if (!v) throw ConfigError("missing key '" + std::string(key) + "'");
  try {
    return textio::parse_uint(*v);
  } catch (const ConfigError&) {
    throw ConfigError("key '" + std::string(key) + "': bad integer value '" + *v + "'");
  }
}

unsigned long Document::get_uint(std::string_view key, unsigned long fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

std::string Document::get_string(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

void Document::merge_from(const Document& other) {
  for (const auto& [k, v] : other.entries_) set(k, v);
}

std::string Document::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

Document parse(std::string_view text) {
  Document doc;
  std::size_t line_no = 0;
  for (std::string_view line : textio::split(text, '\n')) {
    ++line_no;
    std::string_view t = textio::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key(textio::trim(t.substr(0, eq)));
    std::string value(textio::trim(t.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    doc.set(std::move(key), std::move(value));
  }
  return doc;
}

Document load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoFailure("read error on '" + path + "'");
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_file(const Document& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << doc.serialize();
  if (!out) throw IoFailure("write error on '" + path + "'");
}

}  // namespace rramc::keyval
